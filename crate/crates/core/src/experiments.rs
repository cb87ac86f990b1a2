//! Ball-union families, perforated squares and the probes built on them.

use crate::error::{invalid, Result};
use crate::fem::{assemble, solve_eig_with, solve_torsion, AssembledSystem};
use crate::functionals::{
    evaluate_normalized, f_q, transport_by_scaling, union_with_multiplicity, EvalOptions,
    QuantityReport,
};
use crate::geometry::{make_perforated_square_mesh, DomainSpec, Mesh};
use crate::parallel::ordered_map;
use crate::radial::{eig_ball, torsion_ball, unit_ball_volume};
use crate::robin::RobinCoefficient;

/// Least-squares line through `(log x, log y)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
    pub points: Vec<(f64, f64)>,
}

pub fn slope_fit(points: &[(f64, f64)]) -> Result<SlopeFit> {
    if points.len() < 4 {
        return Err(invalid(format!(
            "slope fit needs at least 4 points, got {}",
            points.len()
        )));
    }
    if let Some(p) = points
        .iter()
        .find(|(x, y)| !(x.is_finite() && *x > 0.0 && y.is_finite() && *y > 0.0))
    {
        return Err(invalid(format!(
            "slope fit needs positive finite points, got {p:?}"
        )));
    }
    let logs: Vec<(f64, f64)> = points.iter().map(|(x, y)| (x.ln(), y.ln())).collect();
    let n = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = logs.iter().map(|p| (p.1 - my).powi(2)).sum();
    if sxx == 0.0 {
        return Err(invalid("slope fit needs distinct x values"));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = logs
        .iter()
        .map(|p| (p.1 - intercept - slope * p.0).powi(2))
        .sum();
    let r2 = if syy == 0.0 {
        1.0
    } else {
        (1.0 - sse / syy).clamp(0.0, 1.0)
    };
    Ok(SlopeFit {
        slope,
        intercept,
        r2,
        points: logs,
    })
}

/// One member of a ball-union family, normalised to unit measure.
#[derive(Clone, Debug, PartialEq)]
pub struct FamilyRow {
    /// `delta` for the threshold family, `epsilon` for the divergence family.
    pub parameter: f64,
    /// Number of small balls (real: it can exceed any integer type).
    pub n_small: f64,
    /// Factor applied to reach unit measure.
    pub scale: f64,
    pub lambda: f64,
    pub torsion: f64,
    pub f: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FamilyResult {
    pub rows: Vec<FamilyRow>,
    pub fit: SlopeFit,
    /// The exponent the construction is designed to exhibit.
    pub expected_slope: f64,
}

fn check_family_input(q: f64, d: usize, params: &[f64], name: &str) -> Result<()> {
    if !q.is_finite() {
        return Err(invalid(format!("q must be finite, got {q}")));
    }
    if d < 2 {
        return Err(invalid(format!("dimension must be >= 2, got {d}")));
    }
    if params.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(invalid(format!("{name} must be strictly decreasing")));
    }
    if let Some(p) = params
        .iter()
        .find(|p| !(p.is_finite() && **p > 0.0 && **p < 1.0))
    {
        return Err(invalid(format!("{name} must lie in (0, 1), got {p}")));
    }
    Ok(())
}

/// Quantities of `t (sum_i count_i B_{r_i})` at `beta`, with `t` fixing the
/// total measure to one.
fn normalized_union(
    balls: &[(f64, f64)],
    beta: RobinCoefficient,
    d: usize,
    tol: f64,
) -> Result<(f64, f64, f64)> {
    let omega = unit_ball_volume(d);
    let measure: f64 = balls
        .iter()
        .map(|(r, count)| count * omega * r.powi(d as i32))
        .sum();
    let t = measure.powf(-1.0 / d as f64);
    let tb = beta.scaled(t);
    let mut parts = Vec::with_capacity(balls.len());
    for &(r, count) in balls {
        parts.push((eig_ball(r, tb, d, tol)?, torsion_ball(r, tb, d)?, count));
    }
    let (l, tor) = union_with_multiplicity(&parts)?;
    let (lambda, torsion) = transport_by_scaling(l, tor, t, d)?;
    Ok((t, lambda, torsion))
}

/// `B_delta` plus `N` balls of radius `delta^(d+2)` filling the remaining
/// measure, rescaled to unit measure; `F_q` fitted against `delta`.
pub fn threshold_family(
    q: f64,
    d: usize,
    beta: RobinCoefficient,
    deltas: &[f64],
    tol: f64,
) -> Result<FamilyResult> {
    check_family_input(q, d, deltas, "deltas")?;
    let omega = unit_ball_volume(d);
    let mut rows = Vec::with_capacity(deltas.len());
    for &delta in deltas {
        let eps = delta.powi(d as i32 + 2);
        let n = ((1.0 / omega - delta.powi(d as i32)) / eps.powi(d as i32)).floor();
        if !(n >= 1.0) {
            return Err(invalid(format!(
                "delta = {delta} leaves no room for a small ball"
            )));
        }
        let (scale, lambda, torsion) = normalized_union(&[(delta, 1.0), (eps, n)], beta, d, tol)?;
        rows.push(FamilyRow {
            parameter: delta,
            n_small: n,
            scale,
            lambda,
            torsion,
            f: f_q(lambda, torsion, q)?,
        });
    }
    let fit = slope_fit(&rows.iter().map(|r| (r.parameter, r.f)).collect::<Vec<_>>())?;
    let df = d as f64;
    let expected_slope = if beta.is_dirichlet() {
        -2.0 + q * (df + 2.0)
    } else {
        -1.0 + q * (df + 1.0)
    };
    Ok(FamilyResult {
        rows,
        fit,
        expected_slope,
    })
}

/// `N` equal balls of radius `epsilon`, `N = round(1 / (omega_d epsilon^d))`,
/// rescaled to unit measure; `F_q` fitted against `epsilon`.
pub fn divergence_family(
    q: f64,
    d: usize,
    beta: RobinCoefficient,
    epsilons: &[f64],
    tol: f64,
) -> Result<FamilyResult> {
    check_family_input(q, d, epsilons, "epsilons")?;
    let omega = unit_ball_volume(d);
    let mut rows = Vec::with_capacity(epsilons.len());
    for &eps in epsilons {
        let n = (1.0 / (omega * eps.powi(d as i32))).round();
        if !(n >= 1.0) {
            return Err(invalid(format!(
                "epsilon = {eps} exceeds the unit-measure ball"
            )));
        }
        let (scale, lambda, torsion) = normalized_union(&[(eps, n)], beta, d, tol)?;
        rows.push(FamilyRow {
            parameter: eps,
            n_small: n,
            scale,
            lambda,
            torsion,
            f: f_q(lambda, torsion, q)?,
        });
    }
    let fit = slope_fit(&rows.iter().map(|r| (r.parameter, r.f)).collect::<Vec<_>>())?;
    Ok(FamilyResult {
        rows,
        fit,
        expected_slope: -2.0 + 2.0 * q,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct HomogenizationRow {
    pub n: usize,
    pub k: f64,
    pub beta: f64,
    pub lambda: f64,
    pub torsion: f64,
    pub f1: f64,
    pub area: f64,
    pub perimeter: f64,
    pub h_max: f64,
    /// `beta * 2 pi k`: the hole boundary measure in the limit, times `beta`.
    pub target_lambda: f64,
    /// `2 pi k / (4 + 2 pi k)`.
    pub target_f1: f64,
}

/// Robin `lambda`, `T` and `F_1` on perforated unit squares, one row per `N`.
pub fn homogenization_sweep(
    beta: f64,
    k: f64,
    ns: &[usize],
    cell_resolution: usize,
    opts: &EvalOptions,
    jobs: usize,
) -> Result<Vec<HomogenizationRow>> {
    let b = RobinCoefficient::finite(beta)?;
    if b.is_dirichlet() {
        return Err(invalid("the homogenization sweep needs a finite beta"));
    }
    for &n in ns {
        DomainSpec::PerforatedSquare { n, k, dim: 2 }.validate()?;
    }
    let sigma_k = 2.0 * std::f64::consts::PI * k;
    ordered_map(ns, jobs, |&n| {
        let mesh = make_perforated_square_mesh(n, k, cell_resolution)?;
        let sys = assemble(&mesh)?;
        let eig = solve_eig_with(&sys, b, &opts.solver)?;
        let tor = solve_torsion(&sys, b, opts.solver.cg_tol)?;
        Ok(HomogenizationRow {
            n,
            k,
            beta,
            lambda: eig.lambda,
            torsion: tor.torsion,
            f1: eig.lambda * tor.torsion,
            area: sys.area,
            perimeter: sys.perimeter,
            h_max: sys.h_max,
            target_lambda: beta * sigma_k,
            target_f1: sigma_k / (4.0 + sigma_k),
        })
    })
    .into_iter()
    .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct GnReport {
    /// `R(u)` for the principal eigenfunction on each mesh.
    pub values: Vec<f64>,
    /// Largest value: an empirical lower estimate of the inequality constant.
    pub constant: f64,
}

/// `|u|_2^2 / (E(u)^(d/(d+1)) |u|_1^(2/(d+1)))` with `E(u) = int |grad u|^2 + int_bd u^2`,
/// `d = 2`, evaluated on the Robin eigenfunction of each mesh.
pub fn gn_ratio(sys: &AssembledSystem, u: &[f64]) -> f64 {
    let d = 2.0;
    let e = sys.a.bilinear(u, u) + sys.mb.bilinear(u, u);
    let l2 = sys.m.bilinear(u, u);
    let l1: f64 = u.iter().zip(&sys.b).map(|(v, w)| v.abs() * w).sum();
    l2 / (e.powf(d / (d + 1.0)) * l1.powf(2.0 / (d + 1.0)))
}

pub fn gn_probe(meshes: &[Mesh], beta: f64, opts: &EvalOptions, jobs: usize) -> Result<GnReport> {
    if meshes.is_empty() {
        return Err(invalid("gn probe needs at least one mesh"));
    }
    let b = RobinCoefficient::finite(beta)?;
    let values = ordered_map(meshes, jobs, |mesh| {
        let sys = assemble(mesh)?;
        if !(0.5..=2.0).contains(&sys.area) {
            return Err(invalid(format!(
                "gn probe needs areas within a factor 2 of 1, got {}",
                sys.area
            )));
        }
        let eig = solve_eig_with(&sys, b, &opts.solver)?;
        Ok(gn_ratio(&sys, &eig.u))
    })
    .into_iter()
    .collect::<Result<Vec<f64>>>()?;
    let constant = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(GnReport { values, constant })
}

/// Which side of the ball a domain is conjectured to fall on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KjDirection {
    /// `F_q(Omega) >= F_q(B)`: small `q`.
    BallMinimizes,
    /// `F_q(Omega) <= F_q(B)`: large `q`.
    BallMaximizes,
    /// No conjecture at this `q`.
    Unknown,
}

impl KjDirection {
    pub fn for_q(q: f64, d: usize) -> Self {
        if q <= 1.0 / (d as f64 + 1.0) {
            KjDirection::BallMinimizes
        } else if q > 1.0 {
            KjDirection::BallMaximizes
        } else {
            KjDirection::Unknown
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct KjEntry {
    pub report: QuantityReport,
    /// `F_q(Omega) / F_q(B) - 1`.
    pub gap: f64,
    /// The entry lies on the unexpected side of the ball.
    pub flagged: bool,
}

/// Exploratory comparison of `F_q` over a corpus against the unit-measure
/// ball. Reports only; nothing here is an assertion about the domains.
#[derive(Clone, Debug, PartialEq)]
pub struct KjReport {
    pub ball: QuantityReport,
    pub entries: Vec<KjEntry>,
    pub direction: KjDirection,
    pub min_f: f64,
    pub max_f: f64,
}

pub fn kj_probe(
    q: f64,
    beta: RobinCoefficient,
    corpus: &[DomainSpec],
    opts: &EvalOptions,
    jobs: usize,
) -> Result<KjReport> {
    if corpus.is_empty() {
        return Err(invalid("kj probe needs a nonempty corpus"));
    }
    let d = corpus[0].dim();
    if corpus.iter().any(|c| c.dim() != d) {
        return Err(invalid("all corpus domains must share the dimension"));
    }
    let ball = evaluate_normalized(
        &DomainSpec::Ball {
            radius: 1.0,
            dim: d,
        },
        beta,
        q,
        opts,
    )?;
    let reports = ordered_map(corpus, jobs, |dom| evaluate_normalized(dom, beta, q, opts))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let direction = KjDirection::for_q(q, d);
    let entries: Vec<KjEntry> = reports
        .into_iter()
        .map(|report| {
            let gap = report.f / ball.f - 1.0;
            let flagged = match direction {
                KjDirection::BallMinimizes => gap < 0.0,
                KjDirection::BallMaximizes => gap > 0.0,
                KjDirection::Unknown => false,
            };
            KjEntry {
                report,
                gap,
                flagged,
            }
        })
        .collect();
    let min_f = entries.iter().map(|e| e.report.f).fold(ball.f, f64::min);
    let max_f = entries.iter().map(|e| e.report.f).fold(ball.f, f64::max);
    Ok(KjReport {
        ball,
        entries,
        direction,
        min_f,
        max_f,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_power_law() {
        let pts: Vec<(f64, f64)> = (1..=6).map(|i| (i as f64, (i as f64).powi(3))).collect();
        let f = slope_fit(&pts).unwrap();
        assert!((f.slope - 3.0).abs() < 1e-12);
        assert!((f.r2 - 1.0).abs() < 1e-12);
        let flat: Vec<(f64, f64)> = (1..=5).map(|i| (i as f64, 2.5)).collect();
        assert!(slope_fit(&flat).unwrap().slope.abs() < 1e-15);
    }

    #[test]
    fn slope_fit_rejects_bad_input() {
        assert!(slope_fit(&[(1.0, 1.0), (2.0, 2.0), (3.0, 3.0)]).is_err());
        assert!(slope_fit(&[(1.0, 1.0), (1.0, 2.0), (1.0, 3.0), (1.0, 4.0)]).is_err());
        assert!(slope_fit(&[(1.0, 1.0), (2.0, -2.0), (3.0, 3.0), (4.0, 4.0)]).is_err());
    }

    #[test]
    fn family_preconditions() {
        let b = RobinCoefficient::Finite(1.0);
        assert!(threshold_family(0.5, 2, b, &[0.9, 0.8, 0.7, 0.6], 1e-10).is_err());
        assert!(threshold_family(0.5, 2, b, &[0.01, 0.1, 0.05, 0.02], 1e-10).is_err());
        assert!(divergence_family(0.5, 2, b, &[0.9, 0.8, 0.7, 0.6], 1e-10).is_err());
    }

    #[test]
    fn kj_direction() {
        assert_eq!(KjDirection::for_q(0.0, 2), KjDirection::BallMinimizes);
        assert_eq!(KjDirection::for_q(1.0 / 3.0, 2), KjDirection::BallMinimizes);
        assert_eq!(KjDirection::for_q(0.5, 2), KjDirection::Unknown);
        assert_eq!(KjDirection::for_q(10.0, 2), KjDirection::BallMaximizes);
    }
}
