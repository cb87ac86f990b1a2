//! The functionals `F_q = lambda * T^q`, union and scaling rules, the
//! elementary comparison bounds and the perturbed-ball curve.

use std::fmt;

use crate::error::{invalid, Result};
use crate::fem::{assemble, solve_eig_with, solve_torsion, AssembledSystem, SolverOptions};
use crate::geometry::{
    make_disk_mesh, make_perforated_square_mesh, make_rect_mesh, DomainSpec, Mesh,
};
use crate::radial::{eig_ball, torsion_ball, unit_ball_volume};
use crate::robin::RobinCoefficient;

fn check_positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(invalid(format!(
            "{name} must be positive and finite, got {v}"
        )))
    }
}

pub fn f_q(lambda: f64, torsion: f64, q: f64) -> Result<f64> {
    check_positive("lambda", lambda)?;
    check_positive("torsion", torsion)?;
    if !q.is_finite() {
        return Err(invalid(format!("q must be finite, got {q}")));
    }
    Ok(lambda * torsion.powf(q))
}

/// `(min lambda, sum T)` over pairwise disjoint parts.
pub fn union_quantities(parts: &[(f64, f64)]) -> Result<(f64, f64)> {
    let weighted: Vec<(f64, f64, f64)> = parts.iter().map(|&(l, t)| (l, t, 1.0)).collect();
    union_with_multiplicity(&weighted)
}

/// [`union_quantities`] where part `i` occurs `count_i` times.
///
/// Counts are real so that unions of astronomically many small balls can be
/// represented.
pub fn union_with_multiplicity(parts: &[(f64, f64, f64)]) -> Result<(f64, f64)> {
    if parts.is_empty() {
        return Err(invalid("a union needs at least one part"));
    }
    let mut lambda = f64::INFINITY;
    let mut torsion = 0.0;
    for &(l, t, count) in parts {
        check_positive("lambda", l)?;
        check_positive("torsion", t)?;
        check_positive("multiplicity", count)?;
        lambda = lambda.min(l);
        torsion += count * t;
    }
    Ok((lambda, torsion))
}

/// Quantities of `t Omega` at `beta` from those of `Omega` at `t beta`.
pub fn transport_by_scaling(
    lambda_at_tbeta: f64,
    torsion_at_tbeta: f64,
    t: f64,
    d: usize,
) -> Result<(f64, f64)> {
    check_positive("t", t)?;
    if t == 1.0 {
        return Ok((lambda_at_tbeta, torsion_at_tbeta));
    }
    Ok((
        lambda_at_tbeta / (t * t),
        torsion_at_tbeta * t.powi(d as i32 + 2),
    ))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolverTag {
    Radial,
    Fem,
    Union,
}

impl fmt::Display for SolverTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SolverTag::Radial => "radial",
            SolverTag::Fem => "fem",
            SolverTag::Union => "union",
        })
    }
}

/// `lambda`, `T` and `F_q` of one domain.
#[derive(Clone, Debug, PartialEq)]
pub struct QuantityReport {
    pub domain: DomainSpec,
    /// The quantities are those of `scale * domain`.
    pub scale: f64,
    pub beta: RobinCoefficient,
    pub q: f64,
    pub lambda: f64,
    pub torsion: f64,
    pub f: f64,
    pub solver: SolverTag,
    /// Longest mesh edge; `None` for purely radial evaluations.
    pub mesh_h: Option<f64>,
}

impl QuantityReport {
    pub const CSV_HEADER: &'static str = "domain,beta,q,lambda,torsion,F,solver,mesh_h";

    pub fn domain_id(&self) -> String {
        if self.scale == 1.0 {
            self.domain.to_string()
        } else {
            format!("{:e}*{}", self.scale, self.domain)
        }
    }

    pub fn to_csv_row(&self) -> String {
        format!(
            "{},{},{:.16e},{:.16e},{:.16e},{:.16e},{},{}",
            csv_field(&self.domain_id()),
            self.beta,
            self.q,
            self.lambda,
            self.torsion,
            self.f,
            self.solver,
            self.mesh_h.map(|h| format!("{h:.16e}")).unwrap_or_default()
        )
    }
}

/// Quotes a CSV field when needed.
pub fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Inequality {
    pub name: &'static str,
    pub lhs: f64,
    pub rhs: f64,
    /// Positive when the inequality holds.
    pub slack: f64,
    pub holds: bool,
}

fn le(name: &'static str, lhs: f64, rhs: f64) -> Inequality {
    let slack = rhs - lhs;
    Inequality {
        name,
        lhs,
        rhs,
        slack,
        holds: slack >= 0.0,
    }
}

/// `lambda_beta <= min(lambda_inf, beta P / A)` and
/// `T_beta >= max(T_inf, A^2 / (beta P))`, as diagnostics.
pub fn comparison_check(
    report: &QuantityReport,
    dirichlet: &QuantityReport,
    area: f64,
    perimeter: f64,
) -> Vec<Inequality> {
    let beta = report.beta.as_f64();
    vec![
        le("lambda_beta <= lambda_inf", report.lambda, dirichlet.lambda),
        le(
            "lambda_beta <= beta*P/A",
            report.lambda,
            beta * perimeter / area,
        ),
        le("T_inf <= T_beta", dirichlet.torsion, report.torsion),
        le(
            "A^2/(beta*P) <= T_beta",
            area * area / (beta * perimeter),
            report.torsion,
        ),
    ]
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PerturbedBallReport {
    pub c: f64,
    pub beta: f64,
    pub lambda_bc: f64,
    pub torsion_lower: f64,
    pub m1_lower: f64,
}

/// `(lambda_beta(B) + c) / (beta P + c)` for the unit-measure ball `B` and
/// each constant potential `c`.
pub fn perturbed_ball_curve(
    beta: f64,
    cs: &[f64],
    d: usize,
    tol: f64,
) -> Result<Vec<PerturbedBallReport>> {
    check_positive("beta", beta)?;
    if let Some(c) = cs.iter().find(|c| !(c.is_finite() && **c >= 0.0)) {
        return Err(invalid(format!("c must be nonnegative, got {c}")));
    }
    let omega = unit_ball_volume(d);
    let radius = omega.powf(-1.0 / d as f64);
    let perimeter = d as f64 * omega.powf(1.0 / d as f64);
    let lambda = eig_ball(radius, RobinCoefficient::Finite(beta), d, tol)?;
    Ok(cs
        .iter()
        .map(|&c| {
            let lambda_bc = lambda + c;
            let torsion_lower = 1.0 / (beta * perimeter + c);
            PerturbedBallReport {
                c,
                beta,
                lambda_bc,
                torsion_lower,
                m1_lower: lambda_bc * torsion_lower,
            }
        })
        .collect())
}

/// Discretisation and solver settings for [`evaluate`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EvalOptions {
    /// Target longest edge for disk and rectangle meshes.
    pub h: f64,
    /// Polygon sides per hole for perforated squares.
    pub cell_resolution: usize,
    pub solver: SolverOptions,
    /// Absolute tolerance of the radial eigenvalue solver.
    pub radial_tol: f64,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions {
            h: 0.05,
            cell_resolution: 24,
            solver: SolverOptions::default(),
            radial_tol: 1e-10,
        }
    }
}

/// Mesh of a planar domain at the requested resolution.
pub fn mesh_for(domain: &DomainSpec, opts: &EvalOptions) -> Result<Mesh> {
    domain.validate()?;
    check_positive("h", opts.h)?;
    match *domain {
        DomainSpec::Ball { radius, dim: 2 } => {
            let rings = ((2.0 * radius / opts.h).ceil() as usize).max(2);
            make_disk_mesh(radius, (4 * rings).max(8), rings)
        }
        DomainSpec::Rectangle { width, height } => {
            let cells =
                |side: f64| ((std::f64::consts::SQRT_2 * side / opts.h).ceil() as usize).max(1);
            make_rect_mesh(width, height, cells(width), cells(height))
        }
        DomainSpec::PerforatedSquare { n, k, dim: 2 } => {
            make_perforated_square_mesh(n, k, opts.cell_resolution)
        }
        _ => Err(invalid(format!(
            "{domain} cannot be meshed (only connected planar domains can)"
        ))),
    }
}

/// A domain made ready for repeated solves: balls stay symbolic, planar
/// domains are meshed and assembled once.
#[derive(Clone, Debug)]
pub enum Prepared {
    Ball { radius: f64, dim: usize },
    Fem { system: Box<AssembledSystem> },
    Union(Vec<Prepared>),
}

impl Prepared {
    pub fn new(domain: &DomainSpec, opts: &EvalOptions) -> Result<Self> {
        domain.validate()?;
        Ok(match domain {
            DomainSpec::Ball { radius, dim } => Prepared::Ball {
                radius: *radius,
                dim: *dim,
            },
            DomainSpec::DisjointUnion(parts) => Prepared::Union(
                parts
                    .iter()
                    .map(|p| Prepared::new(p, opts))
                    .collect::<Result<_>>()?,
            ),
            _ => Prepared::Fem {
                system: Box::new(assemble(&mesh_for(domain, opts)?)?),
            },
        })
    }

    /// Measure of the domain actually solved on (the mesh area for FEM parts).
    pub fn measure(&self) -> f64 {
        match self {
            Prepared::Ball { radius, dim } => unit_ball_volume(*dim) * radius.powi(*dim as i32),
            Prepared::Fem { system } => system.area,
            Prepared::Union(parts) => parts.iter().map(Prepared::measure).sum(),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Prepared::Ball { dim, .. } => *dim,
            Prepared::Fem { .. } => 2,
            Prepared::Union(parts) => parts.first().map_or(2, Prepared::dim),
        }
    }

    fn mesh_h(&self) -> Option<f64> {
        match self {
            Prepared::Ball { .. } => None,
            Prepared::Fem { system } => Some(system.h_max),
            Prepared::Union(parts) => parts.iter().filter_map(Prepared::mesh_h).reduce(f64::max),
        }
    }

    fn tag(&self) -> SolverTag {
        match self {
            Prepared::Ball { .. } => SolverTag::Radial,
            Prepared::Fem { .. } => SolverTag::Fem,
            Prepared::Union(_) => SolverTag::Union,
        }
    }

    /// `(lambda, T)` at `beta`.
    pub fn solve(&self, beta: RobinCoefficient, opts: &EvalOptions) -> Result<(f64, f64)> {
        match self {
            Prepared::Ball { radius, dim } => Ok((
                eig_ball(*radius, beta, *dim, opts.radial_tol)?,
                torsion_ball(*radius, beta, *dim)?,
            )),
            Prepared::Fem { system } => {
                let eig = solve_eig_with(system, beta, &opts.solver)?;
                let tor = solve_torsion(system, beta, opts.solver.cg_tol)?;
                Ok((eig.lambda, tor.torsion))
            }
            Prepared::Union(parts) => {
                let values = parts
                    .iter()
                    .map(|p| p.solve(beta, opts))
                    .collect::<Result<Vec<_>>>()?;
                union_quantities(&values)
            }
        }
    }
}

/// `lambda`, `T` and `F_q` of a domain as given.
pub fn evaluate(
    domain: &DomainSpec,
    beta: RobinCoefficient,
    q: f64,
    opts: &EvalOptions,
) -> Result<QuantityReport> {
    let prepared = Prepared::new(domain, opts)?;
    report(domain, &prepared, 1.0, beta, q, opts)
}

/// Quantities of the rescaled copy `t Omega` of unit measure.
///
/// Solved once on `Omega` with coefficient `t beta` and carried over by
/// the scaling law, so no re-meshing takes place.
pub fn evaluate_normalized(
    domain: &DomainSpec,
    beta: RobinCoefficient,
    q: f64,
    opts: &EvalOptions,
) -> Result<QuantityReport> {
    let prepared = Prepared::new(domain, opts)?;
    let t = prepared.measure().powf(-1.0 / prepared.dim() as f64);
    report(domain, &prepared, t, beta, q, opts)
}

fn report(
    domain: &DomainSpec,
    prepared: &Prepared,
    t: f64,
    beta: RobinCoefficient,
    q: f64,
    opts: &EvalOptions,
) -> Result<QuantityReport> {
    let (l, tor) = prepared.solve(beta.scaled(t), opts)?;
    let (lambda, torsion) = transport_by_scaling(l, tor, t, prepared.dim())?;
    Ok(QuantityReport {
        domain: domain.clone(),
        scale: t,
        beta,
        q,
        lambda,
        torsion,
        f: f_q(lambda, torsion, q)?,
        solver: prepared.tag(),
        mesh_h: prepared.mesh_h().map(|h| h * t),
    })
}
