//! Balls in any dimension: closed-form torsion, eigenvalue by radial shooting.
//!
//! The principal eigenfunction of a ball is radial, so `lambda` is the
//! smallest value for which the solution of
//! `u'' + (d-1)/s u' + lambda u = 0, u(0)=1, u'(0)=0` meets the boundary
//! condition at `s = r`. The ODE is integrated with fixed-step RK4 and the
//! boundary functional is bisected in `lambda`.

use crate::error::{invalid, Result, ShapeError};
use crate::robin::RobinCoefficient;

/// Lebesgue measure of the unit ball of `R^d`.
pub fn unit_ball_volume(d: usize) -> f64 {
    // omega_d = omega_{d-2} 2 pi / d, from omega_0 = 1 or omega_1 = 2
    let (mut k, mut w) = if d.is_multiple_of(2) {
        (0, 1.0)
    } else {
        (1, 2.0)
    };
    while k < d {
        k += 2;
        w *= 2.0 * std::f64::consts::PI / k as f64;
    }
    w
}

fn check_ball(r: f64, d: usize) -> Result<()> {
    if !(r.is_finite() && r > 0.0) {
        return Err(invalid(format!(
            "radius must be positive and finite, got {r}"
        )));
    }
    if d < 2 {
        return Err(invalid(format!("dimension must be >= 2, got {d}")));
    }
    Ok(())
}

fn check_beta(beta: f64) -> Result<()> {
    if beta.is_finite() && beta > 0.0 {
        Ok(())
    } else {
        Err(invalid(format!(
            "beta must be positive and finite, got {beta}"
        )))
    }
}

/// Torsional rigidity of `B_r` in `R^d`.
pub fn torsion_ball(r: f64, beta: RobinCoefficient, d: usize) -> Result<f64> {
    check_ball(r, d)?;
    let w = unit_ball_volume(d);
    let df = d as f64;
    Ok(match beta {
        RobinCoefficient::Finite(b) => {
            check_beta(b)?;
            w / df * (r.powi(d as i32 + 1) / b + r.powi(d as i32 + 2) / (df + 2.0))
        }
        RobinCoefficient::Infinite => w * r.powi(d as i32 + 2) / (df * (df + 2.0)),
    })
}

/// Torsion function of `B_r` at distance `s` from the centre,
/// `(r^2 - s^2)/(2d) + r/(d beta)`.
pub fn torsion_ball_profile(r: f64, beta: f64, d: usize, s: f64) -> Result<f64> {
    check_ball(r, d)?;
    check_beta(beta)?;
    if !(0.0..=r).contains(&s) {
        return Err(invalid(format!("s must lie in [0, {r}], got {s}")));
    }
    let df = d as f64;
    Ok((r * r - s * s) / (2.0 * df) + r / (df * beta))
}

/// `beta / (4 r (1 + beta r))`, a lower bound for `lambda_beta(B_r)`.
pub fn eig_ball_lower_bound(r: f64, beta: f64) -> Result<f64> {
    if !(r.is_finite() && r > 0.0) {
        return Err(invalid(format!(
            "radius must be positive and finite, got {r}"
        )));
    }
    check_beta(beta)?;
    Ok(beta / (4.0 * r * (1.0 + beta * r)))
}

/// Radial solution on the unit ball; returns `(u(1), u'(1))`.
fn shoot(mu: f64, d: usize, n: usize) -> (f64, f64) {
    let s0 = 1e-8;
    let c = (d - 1) as f64;
    let df = d as f64;
    let mut s = s0;
    let mut u = 1.0 - mu * s0 * s0 / (2.0 * df);
    let mut v = -mu * s0 / df;
    let h = (1.0 - s0) / n as f64;
    let f = |s: f64, u: f64, v: f64| -c / s * v - mu * u;
    for _ in 0..n {
        let k1u = v;
        let k1v = f(s, u, v);
        let k2u = v + 0.5 * h * k1v;
        let k2v = f(s + 0.5 * h, u + 0.5 * h * k1u, v + 0.5 * h * k1v);
        let k3u = v + 0.5 * h * k2v;
        let k3v = f(s + 0.5 * h, u + 0.5 * h * k2u, v + 0.5 * h * k2v);
        let k4u = v + h * k3v;
        let k4v = f(s + h, u + h * k3u, v + h * k3v);
        u += h / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
        v += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
        s += h;
    }
    (u, v)
}

fn bisect(mut lo: f64, mut hi: f64, g: impl Fn(f64) -> f64) -> Result<f64> {
    let (g_lo, g_hi) = (g(lo), g(hi));
    if !(g_lo > 0.0 && g_hi < 0.0) {
        return Err(ShapeError::BracketFailure {
            lo,
            hi,
            f_lo: g_lo,
            f_hi: g_hi,
        });
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if g(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

const SCAN_STEP: f64 = 0.5;
const SCAN_LIMIT: f64 = 1e5;

/// First Dirichlet eigenvalue of the unit ball at RK4 resolution `n`.
fn dirichlet_unit(d: usize, n: usize) -> Result<f64> {
    let g = |mu: f64| shoot(mu, d, n).0;
    let mut lo = 0.0;
    let mut g_lo = 1.0;
    loop {
        let hi = lo + SCAN_STEP;
        let g_hi = g(hi);
        if g_hi < 0.0 {
            return bisect(lo.max(f64::MIN_POSITIVE), hi, g);
        }
        if hi > SCAN_LIMIT {
            return Err(ShapeError::BracketFailure {
                lo: 0.0,
                hi,
                f_lo: g_lo,
                f_hi: g_hi,
            });
        }
        lo = hi;
        g_lo = g_hi;
    }
}

/// First Robin eigenvalue of the unit ball with coefficient `b` at resolution `n`.
fn robin_unit(b: f64, d: usize, n: usize) -> Result<f64> {
    let upper = dirichlet_unit(d, n)?;
    let lower = b / (4.0 * (1.0 + b));
    bisect(lower, upper, |mu| {
        let (u, v) = shoot(mu, d, n);
        v + b * u
    })
}

/// Principal eigenvalue of `B_r` in `R^d`, with absolute error at most `tol`
/// (or `1e-12` relative, whichever is larger).
///
/// The step count is doubled from 256 until two successive estimates agree
/// to that target.
pub fn eig_ball(r: f64, beta: RobinCoefficient, d: usize, tol: f64) -> Result<f64> {
    check_ball(r, d)?;
    if !(tol.is_finite() && tol > 0.0) {
        return Err(invalid(format!("tol must be positive, got {tol}")));
    }
    // the problem on B_r is the unit-ball problem with coefficient beta*r, scaled by r^-2
    let unit = |n: usize| match beta {
        RobinCoefficient::Finite(b) => {
            check_beta(b)?;
            robin_unit(b * r, d, n)
        }
        RobinCoefficient::Infinite => dirichlet_unit(d, n),
    };
    let r2 = r * r;
    let mut n = 256;
    let mut prev = unit(n)? / r2;
    loop {
        n *= 2;
        let next = unit(n)? / r2;
        let target = (tol * next.min(1.0)).max(1e-12 * next);
        if (next - prev).abs() <= target {
            return Ok(next);
        }
        if n >= 1 << 20 {
            return Err(ShapeError::Stagnation {
                iterations: n,
                residual: (next - prev).abs(),
            });
        }
        prev = next;
    }
}

/// Largest `lambda_beta(B_r) r (1 + beta r) / beta` over a grid of `(r, beta)`.
///
/// An empirical lower estimate of the dimensional constant in the two-sided
/// ball eigenvalue bound.
pub fn estimate_cd(d: usize, grid: &[(f64, f64)], tol: f64) -> Result<f64> {
    if grid.is_empty() {
        return Err(invalid("estimate_cd needs a nonempty grid"));
    }
    let mut best = f64::NEG_INFINITY;
    for &(r, b) in grid {
        check_beta(b)?;
        let lam = eig_ball(r, RobinCoefficient::Finite(b), d, tol)?;
        best = best.max(lam * r * (1.0 + b * r) / b);
    }
    Ok(best)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QuantityKind {
    Eigenvalue,
    Torsion,
}

/// A radial quantity together with the ball it belongs to.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BallQuantity {
    pub radius: f64,
    pub dim: usize,
    pub beta: RobinCoefficient,
    pub value: f64,
    pub kind: QuantityKind,
}

impl BallQuantity {
    pub fn eigenvalue(radius: f64, beta: RobinCoefficient, dim: usize, tol: f64) -> Result<Self> {
        let value = eig_ball(radius, beta, dim, tol)?;
        Ok(BallQuantity {
            radius,
            dim,
            beta,
            value,
            kind: QuantityKind::Eigenvalue,
        })
    }

    pub fn torsion(radius: f64, beta: RobinCoefficient, dim: usize) -> Result<Self> {
        let value = torsion_ball(radius, beta, dim)?;
        Ok(BallQuantity {
            radius,
            dim,
            beta,
            value,
            kind: QuantityKind::Torsion,
        })
    }
}
