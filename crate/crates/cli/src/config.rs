//! Argument grammar. The parsed [`RunConfig`] is also the config echo
//! written into every output file.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use shapelab_core::fem::SolverOptions;
use shapelab_core::functionals::EvalOptions;
use shapelab_core::geometry::DomainSpec;
use shapelab_core::RobinCoefficient;

use crate::error::CliError;
use crate::grid::Grid;

/// Robin coefficients travel through JSON as their command-line text.
mod beta_text {
    use serde::{Deserialize, Deserializer, Serializer};
    use shapelab_core::RobinCoefficient;

    pub fn serialize<S: Serializer>(b: &RobinCoefficient, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(b)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<RobinCoefficient, D::Error> {
        String::deserialize(d)?
            .parse()
            .map_err(serde::de::Error::custom)
    }
}

fn parse_beta(s: &str) -> Result<RobinCoefficient, String> {
    s.parse()
        .map_err(|e: shapelab_core::ShapeError| e.to_string())
}

#[derive(Parser, Serialize, Deserialize, Clone, Debug, PartialEq)]
#[command(
    name = "shapelab",
    version,
    about = "Robin eigenvalue and torsion laboratory"
)]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,

    /// Output directory for generated files.
    #[arg(long, global = true, env = "SHAPELAB_OUT", default_value = ".")]
    pub out_dir: PathBuf,

    /// Output file name (inside the output directory); never overwritten.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,

    /// Worker threads for independent grid points; 1 is fully serial.
    #[arg(long, global = true, default_value_t = 1)]
    pub jobs: usize,

    /// Also write an SVG plot next to the CSV.
    #[arg(long, global = true)]
    pub svg: bool,
}

#[derive(Subcommand, Serialize, Deserialize, Clone, Debug, PartialEq)]
pub enum Command {
    /// Principal eigenvalue.
    Eig(QuantityArgs),
    /// Torsional rigidity.
    Torsion(QuantityArgs),
    /// F_q = lambda T^q.
    Functional {
        #[command(flatten)]
        args: QuantityArgs,
        #[arg(long, default_value_t = 1.0)]
        q: f64,
        /// Rescale the domain to unit measure first.
        #[arg(long)]
        normalize: bool,
    },
    #[command(subcommand)]
    Experiment(Experiment),
    #[command(subcommand)]
    Mesh(MeshCommand),
}

#[derive(Subcommand, Serialize, Deserialize, Clone, Debug, PartialEq)]
pub enum Experiment {
    /// One ball of radius delta plus many tiny balls; slope of F_q in delta.
    Threshold {
        #[arg(long)]
        q: f64,
        #[arg(long, default_value_t = 2)]
        d: usize,
        #[arg(long, value_parser = parse_beta)]
        #[serde(with = "beta_text")]
        beta: RobinCoefficient,
        #[arg(long, default_value = "1e-1:1e-3:geom:7")]
        deltas: Grid,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
    /// Many equal balls of radius epsilon; slope of F_q in epsilon.
    Divergence {
        #[arg(long)]
        q: f64,
        #[arg(long, default_value_t = 2)]
        d: usize,
        #[arg(long, value_parser = parse_beta)]
        #[serde(with = "beta_text")]
        beta: RobinCoefficient,
        #[arg(long, default_value = "1e-1:1e-3:geom:7")]
        eps: Grid,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
    /// Robin quantities of perforated unit squares.
    Homogenize {
        #[arg(long, default_value_t = 1.0)]
        beta: f64,
        #[arg(long, default_value_t = 1.0)]
        k: f64,
        #[arg(long, value_delimiter = ',', default_value = "4,8,12")]
        ns: Vec<usize>,
        #[arg(long, default_value_t = 24)]
        cell_resolution: usize,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Newtonian energy of the shell lattice against the cube, d = 3.
    H1decay {
        #[arg(long, default_value_t = 1.0)]
        k: f64,
        #[arg(long, value_delimiter = ',', default_value = "1,2,4,8,16")]
        ns: Vec<usize>,
        #[arg(long, default_value_t = 1 << 20)]
        shell_samples: usize,
        #[arg(long, default_value_t = 1 << 22)]
        cube_samples: usize,
        #[arg(long, default_value_t = 20_240_601)]
        seed: u64,
    },
    /// Gagliardo-Nirenberg type ratio of the Robin eigenfunction.
    Gn {
        #[arg(long, default_value_t = 1.0)]
        beta: f64,
        /// Mesh files; the built-in unit-area corpus when absent.
        #[arg(long = "mesh")]
        meshes: Vec<PathBuf>,
        /// Uniform refinements applied to every mesh.
        #[arg(long, default_value_t = 0)]
        refine: usize,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// F_q over the unit-measure corpus against the ball.
    Kj {
        #[arg(long)]
        q: f64,
        #[arg(long, value_parser = parse_beta)]
        #[serde(with = "beta_text")]
        beta: RobinCoefficient,
        #[arg(long, default_value_t = 0.05)]
        h: f64,
        #[arg(long, default_value_t = 24)]
        cell_resolution: usize,
        #[command(flatten)]
        solver: SolverArgs,
    },
}

#[derive(Subcommand, Serialize, Deserialize, Clone, Debug, PartialEq)]
pub enum MeshCommand {
    /// Generate a mesh file.
    Make {
        #[command(flatten)]
        domain: DomainArgs,
    },
    /// Area, perimeter, h_max and minimum angle of a mesh file.
    Stats {
        #[arg(long)]
        mesh: PathBuf,
    },
}

#[derive(ValueEnum, Serialize, Deserialize, Clone, Copy, Debug, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum DomainKind {
    Ball,
    Rect,
    Perforated,
    /// A mesh file given by `--mesh`.
    Mesh,
}

#[derive(Args, Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct DomainArgs {
    #[arg(long, value_enum, default_value = "ball")]
    pub domain: DomainKind,
    #[arg(long, default_value_t = 1.0)]
    pub r: f64,
    #[arg(long, default_value_t = 2)]
    pub d: usize,
    #[arg(long, default_value_t = 1.0)]
    pub width: f64,
    #[arg(long, default_value_t = 1.0)]
    pub height: f64,
    /// Lattice size of a perforated square.
    #[arg(long, default_value_t = 4)]
    pub n: usize,
    #[arg(long, default_value_t = 1.0)]
    pub k: f64,
    #[arg(long)]
    pub mesh: Option<PathBuf>,
    /// Target longest edge for disk and rectangle meshes.
    #[arg(long, default_value_t = 0.05)]
    pub h: f64,
    /// Polygon sides per hole for perforated squares.
    #[arg(long, default_value_t = 24)]
    pub cell_resolution: usize,
}

#[derive(Args, Serialize, Deserialize, Clone, Copy, Debug, PartialEq)]
pub struct SolverArgs {
    #[arg(long, default_value_t = shapelab_core::fem::DEFAULT_CG_TOL)]
    pub cg_tol: f64,
    #[arg(long, default_value_t = shapelab_core::fem::DEFAULT_EIG_TOL)]
    pub eig_tol: f64,
    #[arg(long, default_value_t = 2000)]
    pub max_eig_iterations: usize,
}

#[derive(Args, Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct QuantityArgs {
    #[command(flatten)]
    pub domain: DomainArgs,
    #[arg(long, value_parser = parse_beta)]
    #[serde(with = "beta_text")]
    pub beta: RobinCoefficient,
    /// Absolute tolerance of the radial eigenvalue solver.
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    #[command(flatten)]
    pub solver: SolverArgs,
}

fn positive(name: &str, v: f64) -> Result<(), CliError> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(CliError::Usage(format!(
            "--{name} must be positive and finite, got {v}"
        )))
    }
}

fn finite(name: &str, v: f64) -> Result<(), CliError> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(CliError::Usage(format!("--{name} must be finite, got {v}")))
    }
}

fn decreasing_in_unit_interval(name: &str, g: &Grid) -> Result<(), CliError> {
    let v = g.values();
    if v.len() < 4 {
        return Err(CliError::Usage(format!(
            "--{name} needs at least 4 values for a slope fit"
        )));
    }
    if v.iter().any(|x| !(*x > 0.0 && *x < 1.0)) || v.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(CliError::Usage(format!(
            "--{name} must be strictly decreasing inside (0, 1)"
        )));
    }
    Ok(())
}

impl SolverArgs {
    pub fn options(&self) -> SolverOptions {
        SolverOptions {
            cg_tol: self.cg_tol,
            eig_tol: self.eig_tol,
            max_eig_iterations: self.max_eig_iterations,
        }
    }

    fn validate(&self) -> Result<(), CliError> {
        positive("cg-tol", self.cg_tol)?;
        positive("eig-tol", self.eig_tol)?;
        if self.max_eig_iterations < 2 {
            return Err(CliError::Usage("--max-eig-iterations must be >= 2".into()));
        }
        Ok(())
    }
}

impl DomainArgs {
    /// The symbolic domain; `None` for a mesh file.
    pub fn spec(&self) -> Option<DomainSpec> {
        match self.domain {
            DomainKind::Ball => Some(DomainSpec::Ball {
                radius: self.r,
                dim: self.d,
            }),
            DomainKind::Rect => Some(DomainSpec::Rectangle {
                width: self.width,
                height: self.height,
            }),
            DomainKind::Perforated => Some(DomainSpec::PerforatedSquare {
                n: self.n,
                k: self.k,
                dim: self.d,
            }),
            DomainKind::Mesh => None,
        }
    }

    pub fn eval_options(&self, solver: &SolverArgs, radial_tol: f64) -> EvalOptions {
        EvalOptions {
            h: self.h,
            cell_resolution: self.cell_resolution,
            solver: solver.options(),
            radial_tol,
        }
    }

    fn validate(&self, meshable: bool) -> Result<(), CliError> {
        positive("h", self.h)?;
        if self.cell_resolution < 4 {
            return Err(CliError::Usage("--cell-resolution must be >= 4".into()));
        }
        match self.spec() {
            Some(spec) => {
                spec.validate()?;
                if meshable && spec.dim() != 2 {
                    return Err(CliError::Usage(
                        "only planar domains (--d 2) can be meshed".into(),
                    ));
                }
            }
            None if self.mesh.is_none() => {
                return Err(CliError::Usage("--domain mesh needs --mesh <file>".into()));
            }
            None if meshable => {
                return Err(CliError::Usage("--domain mesh cannot be re-meshed".into()))
            }
            None => {}
        }
        Ok(())
    }
}

impl QuantityArgs {
    fn validate(&self) -> Result<(), CliError> {
        self.domain.validate(false)?;
        positive("tol", self.tol)?;
        self.solver.validate()
    }
}

impl RunConfig {
    /// Checks every numeric field before any computation starts.
    pub fn validate(&self) -> Result<(), CliError> {
        if self.jobs == 0 {
            return Err(CliError::Usage("--jobs must be >= 1".into()));
        }
        match &self.command {
            Command::Eig(a) | Command::Torsion(a) => a.validate(),
            Command::Functional { args, q, .. } => {
                finite("q", *q)?;
                args.validate()
            }
            Command::Experiment(e) => match e {
                Experiment::Threshold {
                    q, d, deltas, tol, ..
                } => {
                    finite("q", *q)?;
                    dimension(*d)?;
                    positive("tol", *tol)?;
                    decreasing_in_unit_interval("deltas", deltas)
                }
                Experiment::Divergence { q, d, eps, tol, .. } => {
                    finite("q", *q)?;
                    dimension(*d)?;
                    positive("tol", *tol)?;
                    decreasing_in_unit_interval("eps", eps)
                }
                Experiment::Homogenize {
                    beta,
                    k,
                    ns,
                    cell_resolution,
                    solver,
                } => {
                    positive("beta", *beta)?;
                    positive("k", *k)?;
                    if ns.is_empty() || *cell_resolution < 4 {
                        return Err(CliError::Usage(
                            "--ns must be nonempty and --cell-resolution >= 4".into(),
                        ));
                    }
                    for &n in ns {
                        DomainSpec::PerforatedSquare { n, k: *k, dim: 2 }.validate()?;
                    }
                    solver.validate()
                }
                Experiment::H1decay {
                    k,
                    ns,
                    shell_samples,
                    cube_samples,
                    ..
                } => {
                    positive("k", *k)?;
                    if ns.is_empty() || ns.contains(&0) {
                        return Err(CliError::Usage(
                            "--ns must be a nonempty list of positive sizes".into(),
                        ));
                    }
                    if *shell_samples < 4 || *cube_samples < 4 {
                        return Err(CliError::Usage("sample counts must be >= 4".into()));
                    }
                    Ok(())
                }
                Experiment::Gn { beta, solver, .. } => {
                    positive("beta", *beta)?;
                    solver.validate()
                }
                Experiment::Kj {
                    q,
                    h,
                    cell_resolution,
                    solver,
                    ..
                } => {
                    finite("q", *q)?;
                    positive("h", *h)?;
                    if *cell_resolution < 4 {
                        return Err(CliError::Usage("--cell-resolution must be >= 4".into()));
                    }
                    solver.validate()
                }
            },
            Command::Mesh(MeshCommand::Make { domain }) => domain.validate(true),
            Command::Mesh(MeshCommand::Stats { .. }) => Ok(()),
        }
    }

    /// Short name used for generated file names.
    pub fn tag(&self) -> &'static str {
        match &self.command {
            Command::Eig(_) => "eig",
            Command::Torsion(_) => "torsion",
            Command::Functional { .. } => "functional",
            Command::Experiment(e) => match e {
                Experiment::Threshold { .. } => "threshold",
                Experiment::Divergence { .. } => "divergence",
                Experiment::Homogenize { .. } => "homogenize",
                Experiment::H1decay { .. } => "h1decay",
                Experiment::Gn { .. } => "gn",
                Experiment::Kj { .. } => "kj",
            },
            Command::Mesh(MeshCommand::Make { .. }) => "mesh",
            Command::Mesh(MeshCommand::Stats { .. }) => "mesh-stats",
        }
    }

    /// Files the command reads; outputs may never coincide with these.
    pub fn inputs(&self) -> Vec<PathBuf> {
        match &self.command {
            Command::Eig(a) | Command::Torsion(a) | Command::Functional { args: a, .. } => {
                a.domain.mesh.iter().cloned().collect()
            }
            Command::Experiment(Experiment::Gn { meshes, .. }) => meshes.clone(),
            Command::Mesh(MeshCommand::Stats { mesh }) => vec![mesh.clone()],
            Command::Mesh(MeshCommand::Make { domain }) => domain.mesh.iter().cloned().collect(),
            Command::Experiment(_) => Vec::new(),
        }
    }
}

fn dimension(d: usize) -> Result<(), CliError> {
    if d < 2 {
        return Err(CliError::Usage(format!("--d must be >= 2, got {d}")));
    }
    Ok(())
}
