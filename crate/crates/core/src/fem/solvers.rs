use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::assembly::AssembledSystem;
use super::sparse::{dot, norm, SparseSymmetric};
use crate::error::{invalid, Result, ShapeError};
use crate::robin::RobinCoefficient;

pub const DEFAULT_CG_TOL: f64 = 1e-12;
pub const DEFAULT_EIG_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolverOptions {
    /// Relative residual target of every linear solve.
    pub cg_tol: f64,
    /// Relative change of the Rayleigh quotient, and eigen-residual target.
    pub eig_tol: f64,
    pub max_eig_iterations: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            cg_tol: DEFAULT_CG_TOL,
            eig_tol: DEFAULT_EIG_TOL,
            max_eig_iterations: 2000,
        }
    }
}

impl SolverOptions {
    fn validate(&self) -> Result<()> {
        for (name, v) in [("cg_tol", self.cg_tol), ("eig_tol", self.eig_tol)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(invalid(format!("{name} must be positive, got {v}")));
            }
        }
        if self.max_eig_iterations < 2 {
            return Err(invalid("max_eig_iterations must be >= 2"));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CgOutcome {
    pub x: Vec<f64>,
    pub iterations: usize,
    /// `|K x - rhs| / |rhs|`, recomputed from scratch.
    pub residual: f64,
}

/// Jacobi-preconditioned conjugate gradients; `x` satisfies
/// `|K x - rhs| <= tol |rhs|`.
pub fn cg_solve(k: &SparseSymmetric, rhs: &[f64], tol: f64) -> Result<Vec<f64>> {
    cg_solve_from(k, rhs, None, tol).map(|o| o.x)
}

/// [`cg_solve`] with an optional initial guess and iteration statistics.
///
/// The cap is `10 n` iterations. Convergence is always confirmed on the true
/// residual; a recurrence residual that drifted below the target restarts
/// the iteration from the current iterate.
pub fn cg_solve_from(
    k: &SparseSymmetric,
    rhs: &[f64],
    x0: Option<&[f64]>,
    tol: f64,
) -> Result<CgOutcome> {
    let n = k.dim();
    if rhs.len() != n || x0.is_some_and(|x| x.len() != n) {
        return Err(invalid("right-hand side length does not match the matrix"));
    }
    if !(tol.is_finite() && tol > 0.0) {
        return Err(invalid(format!("tol must be positive, got {tol}")));
    }
    let diag = k.diagonal();
    if let Some(i) = diag.iter().position(|&d| !(d > 0.0)) {
        return Err(invalid(format!(
            "matrix is not positive definite (diagonal entry {i} is {})",
            diag[i]
        )));
    }
    let rhs_norm = norm(rhs);
    if rhs_norm == 0.0 {
        return Ok(CgOutcome {
            x: vec![0.0; n],
            iterations: 0,
            residual: 0.0,
        });
    }
    let target = tol * rhs_norm;
    let cap = 10 * n.max(1);

    let mut x = x0.map_or_else(|| vec![0.0; n], <[f64]>::to_vec);
    let mut r = vec![0.0; n];
    let mut kp = vec![0.0; n];
    let mut iterations = 0;
    loop {
        // (re)start from the true residual
        k.matvec_into(&x, &mut r);
        for (ri, bi) in r.iter_mut().zip(rhs) {
            *ri = bi - *ri;
        }
        let true_res = norm(&r);
        if true_res <= target {
            return Ok(CgOutcome {
                x,
                iterations,
                residual: true_res / rhs_norm,
            });
        }
        if iterations >= cap {
            return Err(ShapeError::CgNotConverged {
                iterations,
                residual: true_res / rhs_norm,
            });
        }
        let mut z: Vec<f64> = r.iter().zip(&diag).map(|(a, d)| a / d).collect();
        let mut p = z.clone();
        let mut rz = dot(&r, &z);
        while iterations < cap {
            iterations += 1;
            k.matvec_into(&p, &mut kp);
            let pkp = dot(&p, &kp);
            if !(pkp > 0.0) {
                return Err(ShapeError::CgNotConverged {
                    iterations,
                    residual: norm(&r) / rhs_norm,
                });
            }
            let alpha = rz / pkp;
            for i in 0..n {
                x[i] += alpha * p[i];
                r[i] -= alpha * kp[i];
            }
            if norm(&r) <= 0.5 * target {
                break;
            }
            for i in 0..n {
                z[i] = r[i] / diag[i];
            }
            let rz_new = dot(&r, &z);
            let beta = rz_new / rz;
            rz = rz_new;
            for i in 0..n {
                p[i] = z[i] + beta * p[i];
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TorsionSolution {
    /// Nodal values on all vertices (zero on the boundary in Dirichlet mode).
    pub w: Vec<f64>,
    /// `b^T w`.
    pub torsion: f64,
    /// `w^T K w`; equal to `torsion` up to the solver tolerance.
    pub energy: f64,
    pub cg_iterations: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpectralSolution {
    pub lambda: f64,
    /// Mass-normalised eigenvector on all vertices.
    pub u: Vec<f64>,
    /// `|K u - lambda M u|_2` with `u^T M u = 1`.
    pub residual: f64,
    pub iterations: usize,
}

/// The operator pencil for one boundary condition, on the active unknowns.
struct Pencil {
    k: SparseSymmetric,
    m: SparseSymmetric,
    b: Vec<f64>,
    /// Active unknowns, or `None` when all vertices are unknowns.
    active: Option<Vec<bool>>,
}

impl Pencil {
    fn new(sys: &AssembledSystem, beta: RobinCoefficient) -> Result<Self> {
        match beta {
            RobinCoefficient::Finite(b) => {
                if !(b.is_finite() && b > 0.0) {
                    return Err(invalid(format!("beta must be positive, got {b}")));
                }
                Ok(Pencil {
                    k: sys.a.add_scaled(&sys.mb, b),
                    m: sys.m.clone(),
                    b: sys.b.clone(),
                    active: None,
                })
            }
            RobinCoefficient::Infinite => {
                if sys.num_interior() == 0 {
                    return Err(invalid(
                        "mesh has no interior vertex; Dirichlet problem is empty",
                    ));
                }
                let keep = &sys.interior;
                let b = sys
                    .b
                    .iter()
                    .zip(keep)
                    .filter(|(_, &k)| k)
                    .map(|(v, _)| *v)
                    .collect();
                Ok(Pencil {
                    k: sys.a.principal_submatrix(keep),
                    m: sys.m.principal_submatrix(keep),
                    b,
                    active: Some(keep.clone()),
                })
            }
        }
    }

    fn expand(&self, x: Vec<f64>) -> Vec<f64> {
        match &self.active {
            None => x,
            Some(keep) => {
                let mut it = x.into_iter();
                keep.iter()
                    .map(|&k| if k { it.next().expect("sized") } else { 0.0 })
                    .collect()
            }
        }
    }
}

/// Torsion function and torsional rigidity; `tol` is the CG tolerance.
pub fn solve_torsion(
    sys: &AssembledSystem,
    beta: RobinCoefficient,
    tol: f64,
) -> Result<TorsionSolution> {
    let pencil = Pencil::new(sys, beta)?;
    let out = cg_solve_from(&pencil.k, &pencil.b, None, tol)?;
    let torsion = dot(&pencil.b, &out.x);
    let energy = pencil.k.bilinear(&out.x, &out.x);
    Ok(TorsionSolution {
        w: pencil.expand(out.x),
        torsion,
        energy,
        cg_iterations: out.iterations,
    })
}

/// Principal eigenpair by inverse power iteration with default CG tolerance.
pub fn solve_eig(
    sys: &AssembledSystem,
    beta: RobinCoefficient,
    tol: f64,
) -> Result<SpectralSolution> {
    solve_eig_with(
        sys,
        beta,
        &SolverOptions {
            eig_tol: tol,
            ..SolverOptions::default()
        },
    )
}

/// Principal eigenpair by inverse power iteration.
///
/// Starts from the constant vector and stops once the Rayleigh quotient
/// changes by less than `eig_tol` relative and the eigen-residual is below
/// `eig_tol * max(1, lambda)`. Halfway through the iteration budget the
/// iterate is replaced once by a fixed pseudo-random vector.
pub fn solve_eig_with(
    sys: &AssembledSystem,
    beta: RobinCoefficient,
    opts: &SolverOptions,
) -> Result<SpectralSolution> {
    opts.validate()?;
    let p = Pencil::new(sys, beta)?;
    let n = p.k.dim();

    let mut u = vec![1.0; n];
    normalize(&p.m, &mut u);
    let mut rho = p.k.bilinear(&u, &u);
    let mut residual = f64::INFINITY;
    let restart_at = opts.max_eig_iterations / 2;
    for it in 1..=opts.max_eig_iterations {
        if it == restart_at {
            let mut rng = ChaCha8Rng::seed_from_u64(1);
            u = (0..n).map(|_| rng.random_range(0.5..1.5)).collect();
            normalize(&p.m, &mut u);
            rho = p.k.bilinear(&u, &u);
        }
        let mu = p.m.matvec(&u);
        let guess: Vec<f64> = u.iter().map(|v| v / rho).collect();
        let mut next = cg_solve_from(&p.k, &mu, Some(&guess), opts.cg_tol)?.x;
        normalize(&p.m, &mut next);
        let ku = p.k.matvec(&next);
        let rho_next = dot(&next, &ku);
        let m_next = p.m.matvec(&next);
        residual = norm(
            &ku.iter()
                .zip(&m_next)
                .map(|(a, b)| a - rho_next * b)
                .collect::<Vec<_>>(),
        );
        let change = (rho_next - rho).abs();
        u = next;
        rho = rho_next;
        if change < opts.eig_tol * rho && residual <= opts.eig_tol * rho.max(1.0) {
            // fix the sign so that the eigenvector is positive on average
            if u.iter().sum::<f64>() < 0.0 {
                u.iter_mut().for_each(|v| *v = -*v);
            }
            return Ok(SpectralSolution {
                lambda: rho,
                u: p.expand(u),
                residual,
                iterations: it,
            });
        }
    }
    Err(ShapeError::Stagnation {
        iterations: opts.max_eig_iterations,
        residual,
    })
}

fn normalize(m: &SparseSymmetric, u: &mut [f64]) {
    let s = m.bilinear(u, u).sqrt();
    u.iter_mut().for_each(|v| *v /= s);
}

/// `lambda_h * T_h` on one system; never exceeds the mesh area beyond
/// solver error.
pub fn discrete_f1(sys: &AssembledSystem, beta: RobinCoefficient, tol: f64) -> Result<f64> {
    let eig = solve_eig(sys, beta, tol)?;
    let tor = solve_torsion(sys, beta, DEFAULT_CG_TOL)?;
    Ok(eig.lambda * tor.torsion)
}
