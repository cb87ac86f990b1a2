//! One function per subcommand. Each fills a [`ResultTable`] and returns the
//! one-line summary printed on success.

use std::path::{Path, PathBuf};
use std::time::Instant;

use shapelab_core::experiments::{
    divergence_family, gn_probe, homogenization_sweep, kj_probe, threshold_family, FamilyResult,
};
use shapelab_core::fem::{assemble, solve_eig_with, solve_torsion};
use shapelab_core::functionals::{
    evaluate, evaluate_normalized, f_q, mesh_for, EvalOptions, QuantityReport,
};
use shapelab_core::geometry::{
    mesh_stats, read_mesh, refine_uniform, scale_mesh, write_mesh, DomainSpec, Mesh,
};
use shapelab_core::homog_h1::{h1_energy, H1Options, ShellLattice};
use shapelab_core::RobinCoefficient;

use crate::config::{Command, DomainArgs, Experiment, MeshCommand, QuantityArgs, RunConfig};
use crate::error::CliError;
use crate::output::{output_path, write_new, Cell, ResultTable};
use crate::svg::emit_svg;

const QUANTITY_HEADER: [&str; 8] = [
    "domain", "beta", "q", "lambda", "torsion", "F", "solver", "mesh_h",
];

/// What a finished command leaves behind.
#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub summary: String,
    pub files: Vec<PathBuf>,
}

struct Plot {
    series: Vec<Vec<(f64, f64)>>,
    labels: Vec<String>,
    reference_slopes: Vec<f64>,
}

struct Product {
    table: ResultTable,
    summary: String,
    plot: Option<Plot>,
    /// A mesh file written in addition to the table.
    mesh: Option<Mesh>,
}

impl Product {
    fn new(table: ResultTable, summary: String) -> Self {
        Product {
            table,
            summary,
            plot: None,
            mesh: None,
        }
    }
}

pub fn execute(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let start = Instant::now();
    let mut product = match &cfg.command {
        Command::Eig(a) => quantity(a, 1.0, false, |l, _, _| format!("lambda = {l:.12}"))?,
        Command::Torsion(a) => quantity(a, 1.0, false, |_, t, _| format!("T = {t:.12}"))?,
        Command::Functional { args, q, normalize } => quantity(args, *q, *normalize, |l, t, f| {
            format!("F_{q} = {f:.12} (lambda = {l:.12}, T = {t:.12})")
        })?,
        Command::Experiment(e) => experiment(e, cfg.jobs)?,
        Command::Mesh(MeshCommand::Make { domain }) => mesh_make(domain)?,
        Command::Mesh(MeshCommand::Stats { mesh }) => mesh_stats_table(mesh)?,
    };
    let echo = serde_json::to_string(cfg).expect("configs always serialize");
    let mut table = ResultTable::new(&[]);
    table.meta("version", env!("CARGO_PKG_VERSION"));
    table.meta("config", echo);
    table.meta(
        "wall_time_s",
        format!("{:.3}", start.elapsed().as_secs_f64()),
    );
    table.metadata.append(&mut product.table.metadata);
    product.table.metadata = table.metadata;

    let ext = if product.mesh.is_some() {
        "mesh"
    } else {
        "csv"
    };
    let main = output_path(&cfg.out_dir, cfg.output.as_deref(), cfg.tag(), ext);
    refuse_inputs(cfg, &main)?;
    let mut files = Vec::new();
    match &product.mesh {
        Some(mesh) => {
            write_new(&main, &write_mesh(mesh))?;
            let sidecar = main.with_extension("csv");
            refuse_inputs(cfg, &sidecar)?;
            write_new(&sidecar, &product.table.to_csv())?;
            files.push(main);
            files.push(sidecar);
        }
        None => {
            write_new(&main, &product.table.to_csv())?;
            files.push(main);
        }
    }
    if cfg.svg {
        if let Some(plot) = &product.plot {
            let path = files[0].with_extension("svg");
            refuse_inputs(cfg, &path)?;
            write_new(
                &path,
                &emit_svg(&plot.series, &plot.labels, &plot.reference_slopes),
            )?;
            files.push(path);
        }
    }
    Ok(Outcome {
        summary: product.summary,
        files,
    })
}

fn same_file(a: &Path, b: &Path) -> bool {
    match (a.canonicalize(), b.canonicalize()) {
        (Ok(x), Ok(y)) => x == y,
        _ => a == b,
    }
}

fn refuse_inputs(cfg: &RunConfig, out: &Path) -> Result<(), CliError> {
    match cfg.inputs().iter().find(|i| same_file(i, out)) {
        Some(i) => Err(CliError::Usage(format!(
            "output {} would overwrite input {}",
            out.display(),
            i.display()
        ))),
        None => Ok(()),
    }
}

fn load_mesh(path: &Path) -> Result<Mesh, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    Ok(read_mesh(&text)?)
}

/// `[q, lambda, T, F]` plus the identifying columns.
fn quantity_row(
    domain: String,
    beta: RobinCoefficient,
    values: [f64; 4],
    solver: String,
    h: Option<f64>,
) -> Vec<Cell> {
    let mut row = vec![domain.into(), beta.to_string().into()];
    row.extend(values.map(Cell::Num));
    row.push(solver.into());
    row.push(h.map_or(Cell::Text(String::new()), Cell::Num));
    row
}

fn report_row(r: &QuantityReport) -> Vec<Cell> {
    quantity_row(
        r.domain_id(),
        r.beta,
        [r.q, r.lambda, r.torsion, r.f],
        r.solver.to_string(),
        r.mesh_h,
    )
}

fn quantity(
    a: &QuantityArgs,
    q: f64,
    normalize: bool,
    summary: impl Fn(f64, f64, f64) -> String,
) -> Result<Product, CliError> {
    let opts = a.domain.eval_options(&a.solver, a.tol);
    let mut table = ResultTable::new(&QUANTITY_HEADER);
    let line = match (a.domain.spec(), &a.domain.mesh) {
        (Some(spec), _) => {
            let r = if normalize {
                evaluate_normalized(&spec, a.beta, q, &opts)?
            } else {
                evaluate(&spec, a.beta, q, &opts)?
            };
            table.push(report_row(&r));
            summary(r.lambda, r.torsion, r.f)
        }
        (None, Some(path)) => {
            let mut mesh = load_mesh(path)?;
            let mut scale = 1.0;
            if normalize {
                scale = mesh_stats(&mesh)?.area.powf(-0.5);
                mesh = scale_mesh(&mesh, scale)?;
            }
            let sys = assemble(&mesh)?;
            let eig = solve_eig_with(&sys, a.beta, &opts.solver)?;
            let tor = solve_torsion(&sys, a.beta, opts.solver.cg_tol)?;
            let f = f_q(eig.lambda, tor.torsion, q)?;
            let id = if scale == 1.0 {
                format!("mesh({})", path.display())
            } else {
                format!("{scale:e}*mesh({})", path.display())
            };
            let values = [q, eig.lambda, tor.torsion, f];
            table.push(quantity_row(
                id,
                a.beta,
                values,
                "fem".into(),
                Some(sys.h_max),
            ));
            summary(eig.lambda, tor.torsion, f)
        }
        (None, None) => return Err(CliError::Usage("--domain mesh needs --mesh <file>".into())),
    };
    Ok(Product::new(table, line))
}

fn family(kind: &str, res: FamilyResult) -> Product {
    let mut table = ResultTable::new(&["parameter", "n_small", "scale", "lambda", "torsion", "F"]);
    for r in &res.rows {
        table.push(vec![
            r.parameter.into(),
            r.n_small.into(),
            r.scale.into(),
            r.lambda.into(),
            r.torsion.into(),
            r.f.into(),
        ]);
    }
    table.meta("slope", format!("{:.16e}", res.fit.slope));
    table.meta("intercept", format!("{:.16e}", res.fit.intercept));
    table.meta("r2", format!("{:.16e}", res.fit.r2));
    table.meta("expected_slope", format!("{:.16e}", res.expected_slope));
    let summary = format!(
        "{kind} slope = {:.6} (expected {:.6}, r2 = {:.6})",
        res.fit.slope, res.expected_slope, res.fit.r2
    );
    let points = res.rows.iter().map(|r| (r.parameter, r.f)).collect();
    let mut p = Product::new(table, summary);
    p.plot = Some(Plot {
        series: vec![points],
        labels: vec!["F".into()],
        reference_slopes: vec![res.expected_slope],
    });
    p
}

fn unit_area_corpus() -> Vec<DomainSpec> {
    vec![
        DomainSpec::Ball {
            radius: 1.0 / std::f64::consts::PI.sqrt(),
            dim: 2,
        },
        DomainSpec::Rectangle {
            width: 1.0,
            height: 1.0,
        },
        DomainSpec::Rectangle {
            width: 2.0,
            height: 0.5,
        },
        DomainSpec::PerforatedSquare {
            n: 4,
            k: 1.0,
            dim: 2,
        },
    ]
}

fn experiment(e: &Experiment, jobs: usize) -> Result<Product, CliError> {
    Ok(match e {
        Experiment::Threshold {
            q,
            d,
            beta,
            deltas,
            tol,
        } => family(
            "threshold",
            threshold_family(*q, *d, *beta, deltas.values(), *tol)?,
        ),
        Experiment::Divergence {
            q,
            d,
            beta,
            eps,
            tol,
        } => family(
            "divergence",
            divergence_family(*q, *d, *beta, eps.values(), *tol)?,
        ),
        Experiment::Homogenize {
            beta,
            k,
            ns,
            cell_resolution,
            solver,
        } => {
            let opts = EvalOptions {
                cell_resolution: *cell_resolution,
                solver: solver.options(),
                ..Default::default()
            };
            let rows = homogenization_sweep(*beta, *k, ns, *cell_resolution, &opts, jobs)?;
            let mut table = ResultTable::new(&[
                "n",
                "k",
                "beta",
                "lambda",
                "torsion",
                "F1",
                "area",
                "perimeter",
                "h_max",
                "target_lambda",
                "target_F1",
            ]);
            for r in &rows {
                table.push(vec![
                    r.n.into(),
                    r.k.into(),
                    r.beta.into(),
                    r.lambda.into(),
                    r.torsion.into(),
                    r.f1.into(),
                    r.area.into(),
                    r.perimeter.into(),
                    r.h_max.into(),
                    r.target_lambda.into(),
                    r.target_f1.into(),
                ]);
            }
            let last = rows.last().expect("validated nonempty");
            let summary = format!(
                "N = {}: lambda = {:.6}, F1 = {:.6} (targets {:.6}, {:.6})",
                last.n, last.lambda, last.f1, last.target_lambda, last.target_f1
            );
            let mut p = Product::new(table, summary);
            p.plot = Some(Plot {
                series: vec![
                    rows.iter().map(|r| (r.n as f64, r.lambda)).collect(),
                    rows.iter().map(|r| (r.n as f64, r.f1)).collect(),
                ],
                labels: vec!["lambda".into(), "F1".into()],
                reference_slopes: Vec::new(),
            });
            p
        }
        Experiment::H1decay {
            k,
            ns,
            shell_samples,
            cube_samples,
            seed,
        } => {
            let opts = H1Options {
                shell_samples: *shell_samples,
                cube_samples: *cube_samples,
                seed: *seed,
                jobs,
            };
            let mut table = ResultTable::new(&[
                "N",
                "k",
                "r_N",
                "separated",
                "S_NN_self",
                "S_NN_cross",
                "S_Nmu",
                "S_mumu",
                "E_N",
                "mc_stderr",
                "seed",
            ]);
            let mut points = Vec::new();
            for &n in ns {
                let lat = ShellLattice::new(n, *k)?;
                let e = h1_energy(&lat, &opts)?;
                table.push(vec![
                    n.into(),
                    lat.k.into(),
                    lat.r.into(),
                    lat.is_separated().into(),
                    e.s_nn_self.into(),
                    e.s_nn_cross.into(),
                    e.s_nmu.into(),
                    e.s_mumu.into(),
                    e.e_n.into(),
                    e.mc_stderr.into(),
                    Cell::Int(*seed as i64),
                ]);
                points.push((n as f64, e.e_n));
            }
            let (n, e) = points.last().copied().expect("validated nonempty");
            let mut p = Product::new(table, format!("E_N at N = {n} is {e:.6e}"));
            p.plot = Some(Plot {
                series: vec![points],
                labels: vec!["E_N".into()],
                reference_slopes: Vec::new(),
            });
            p
        }
        Experiment::Gn {
            beta,
            meshes,
            refine,
            solver,
        } => {
            let opts = EvalOptions {
                solver: solver.options(),
                ..Default::default()
            };
            let (names, mut list): (Vec<String>, Vec<Mesh>) = if meshes.is_empty() {
                let corpus = unit_area_corpus();
                let built = corpus
                    .iter()
                    .map(|d| mesh_for(d, &opts))
                    .collect::<Result<Vec<_>, _>>()?;
                (corpus.iter().map(|d| d.to_string()).collect(), built)
            } else {
                let loaded = meshes
                    .iter()
                    .map(|m| load_mesh(m))
                    .collect::<Result<Vec<_>, _>>()?;
                (
                    meshes.iter().map(|m| m.display().to_string()).collect(),
                    loaded,
                )
            };
            for _ in 0..*refine {
                list = list.iter().map(refine_uniform).collect();
            }
            let rep = gn_probe(&list, *beta, &opts, jobs)?;
            let mut table = ResultTable::new(&["mesh", "vertices", "refinements", "ratio"]);
            for ((name, mesh), v) in names.iter().zip(&list).zip(&rep.values) {
                table.push(vec![
                    name.as_str().into(),
                    mesh.num_vertices().into(),
                    (*refine).into(),
                    (*v).into(),
                ]);
            }
            table.meta("constant", format!("{:.16e}", rep.constant));
            Product::new(
                table,
                format!(
                    "largest ratio = {:.12} over {} meshes",
                    rep.constant,
                    list.len()
                ),
            )
        }
        Experiment::Kj {
            q,
            beta,
            h,
            cell_resolution,
            solver,
        } => {
            let opts = EvalOptions {
                h: *h,
                cell_resolution: *cell_resolution,
                solver: solver.options(),
                ..Default::default()
            };
            let rep = kj_probe(*q, *beta, &unit_area_corpus(), &opts, jobs)?;
            let mut header = QUANTITY_HEADER.to_vec();
            header.extend(["gap", "flagged"]);
            let mut table = ResultTable::new(&header);
            let mut ball = report_row(&rep.ball);
            ball.extend([0.0.into(), false.into()]);
            table.push(ball);
            for e in &rep.entries {
                let mut row = report_row(&e.report);
                row.extend([e.gap.into(), e.flagged.into()]);
                table.push(row);
            }
            table.meta("direction", format!("{:?}", rep.direction));
            let flagged = rep.entries.iter().filter(|e| e.flagged).count();
            Product::new(
                table,
                format!(
                    "F_{q} ranges over [{:.6}, {:.6}]; ball {:.6}; {flagged} flagged",
                    rep.min_f, rep.max_f, rep.ball.f
                ),
            )
        }
    })
}

fn mesh_make(d: &DomainArgs) -> Result<Product, CliError> {
    let spec = d
        .spec()
        .ok_or_else(|| CliError::Usage("--domain mesh cannot be re-meshed".into()))?;
    let opts = EvalOptions {
        h: d.h,
        cell_resolution: d.cell_resolution,
        ..Default::default()
    };
    let mesh = mesh_for(&spec, &opts)?;
    let mut p = stats_product(&spec.to_string(), &mesh)?;
    p.mesh = Some(mesh);
    Ok(p)
}

fn mesh_stats_table(path: &Path) -> Result<Product, CliError> {
    stats_product(&path.display().to_string(), &load_mesh(path)?)
}

fn stats_product(name: &str, mesh: &Mesh) -> Result<Product, CliError> {
    let s = mesh_stats(mesh)?;
    let mut table = ResultTable::new(&[
        "mesh",
        "vertices",
        "triangles",
        "boundary_edges",
        "area",
        "perimeter",
        "h_max",
        "min_angle",
    ]);
    table.push(vec![
        name.into(),
        mesh.num_vertices().into(),
        mesh.triangles().len().into(),
        mesh.boundary_edges().len().into(),
        s.area.into(),
        s.perimeter.into(),
        s.h_max.into(),
        s.min_angle.into(),
    ]);
    let summary = format!(
        "{} vertices, {} triangles, area {:.6}, h_max {:.4}, min angle {:.2} deg",
        mesh.num_vertices(),
        mesh.triangles().len(),
        s.area,
        s.h_max,
        s.min_angle
    );
    Ok(Product::new(table, summary))
}
