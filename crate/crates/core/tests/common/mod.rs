//! Reference values computed by methods that share no code with the library.
#![allow(dead_code)]

use std::f64::consts::PI;

use shapelab_core::homog_h1::ShellLattice;

/// `J_0(x)` and `J_1(x)` from their power series (fine for `x < 10`).
pub fn bessel_j0_j1(x: f64) -> (f64, f64) {
    let h = 0.5 * x;
    let (mut t0, mut t1) = (1.0, h);
    let (mut j0, mut j1) = (t0, t1);
    for m in 1..60 {
        let mf = m as f64;
        t0 *= -h * h / (mf * mf);
        t1 *= -h * h / (mf * (mf + 1.0));
        j0 += t0;
        j1 += t1;
    }
    (j0, j1)
}

fn bisect(mut lo: f64, mut hi: f64, f: impl Fn(f64) -> f64) -> f64 {
    let f_lo = f(lo);
    assert!(
        f_lo * f(hi) < 0.0,
        "oracle bracket [{lo}, {hi}] has no sign change"
    );
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if (f(mid) > 0.0) == (f_lo > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// First Dirichlet eigenvalue of the unit disk, `j_{0,1}^2`.
pub fn disk_dirichlet_eig() -> f64 {
    let x = bisect(2.0, 3.0, |x| bessel_j0_j1(x).0);
    x * x
}

/// First Robin eigenvalue of the unit disk: the first root of
/// `x J_1(x) = beta J_0(x)`, squared.
pub fn disk_robin_eig(beta: f64) -> f64 {
    let x = bisect(1e-9, 2.404825557695773, |x| {
        let (j0, j1) = bessel_j0_j1(x);
        x * j1 - beta * j0
    });
    x * x
}

/// First Robin eigenvalue of the unit ball in `R^3`: eigenfunction
/// `sin(kx)/x`, boundary condition `k cos k = (1 - beta) sin k`.
pub fn ball3_robin_eig(beta: f64) -> f64 {
    let x = bisect(1e-9, PI - 1e-12, |k| k * k.cos() - (1.0 - beta) * k.sin());
    x * x
}

/// Average of `f(|s - c|)` over the sphere of radius `r` centred at
/// distance `dist` from `c`, by adaptive Simpson in the polar cosine.
pub fn sphere_average_of_distance(dist: f64, r: f64, f: impl Fn(f64) -> f64) -> f64 {
    let g = |t: f64| f((dist * dist + r * r + 2.0 * dist * r * t).max(0.0).sqrt());
    0.5 * adaptive_simpson(&g, -1.0, 1.0, 1e-13, 40)
}

pub fn adaptive_simpson(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
    #[allow(clippy::too_many_arguments)]
    fn step(
        f: &impl Fn(f64) -> f64,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
            return left + right + (left + right - whole) / 15.0;
        }
        step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
            + step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
    let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    step(f, a, b, fa, fm, fb, whole, tol, depth)
}

/// Gauss-Legendre nodes and weights on `[-1, 1]` by Newton iteration on `P_n`.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    (0..n)
        .map(|i| {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let kf = k as f64;
                    let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            (x, 2.0 / ((1.0 - x * x) * dp * dp))
        })
        .collect()
}

/// `int_{[0,1]^3} f(|y - x|) dy` for `x` inside the cube, in spherical
/// coordinates about `x`. `radial(R)` must return `int_0^R f(rho) rho^2 drho`.
/// The direction integral is carried to the faces, where a direction that
/// exits through a point at distance `rho` has solid angle `h / rho^3 dA`.
/// Each face is split at the foot of `x` and graded towards it.
pub fn cube_radial_integral(x: [f64; 3], radial: impl Fn(f64) -> f64) -> f64 {
    assert!(
        x.iter().all(|v| *v > 0.0 && *v < 1.0),
        "point must be interior"
    );
    let rule = gauss_legendre(12);
    let nodes = |foot: f64| -> Vec<(f64, f64)> {
        let mut out = Vec::new();
        for end in [0.0, 1.0] {
            let len = (end - foot).abs();
            let mut edges = vec![0.0];
            edges.extend((0..=8).rev().map(|j| len * 0.25f64.powi(j)));
            for w in edges.windows(2) {
                for &(s, wt) in &rule {
                    let t = w[0] + 0.5 * (s + 1.0) * (w[1] - w[0]);
                    out.push((foot + t * (end - foot).signum(), 0.5 * wt * (w[1] - w[0])));
                }
            }
        }
        out
    };
    let mut total = 0.0;
    for a in 0..3 {
        let (b, c) = ((a + 1) % 3, (a + 2) % 3);
        let (nb, nc) = (nodes(x[b]), nodes(x[c]));
        for h in [x[a], 1.0 - x[a]] {
            for &(yb, wb) in &nb {
                for &(yc, wc) in &nc {
                    let rho = (h * h + (yb - x[b]).powi(2) + (yc - x[c]).powi(2)).sqrt();
                    total += wb * wc * h / rho.powi(3) * radial(rho);
                }
            }
        }
    }
    total
}

/// Newtonian potential of the unit cube, `int_Q |y - x|^{-1} dy`.
pub fn cube_potential(x: [f64; 3]) -> f64 {
    cube_radial_integral(x, |rho| 0.5 * rho * rho)
}

/// `int_Q int_Q |x - y|^{-1}`, computed once with scipy's `tplquad` in the
/// difference variable and frozen.
pub const CUBE_MEAN_INVERSE_DISTANCE: f64 = 1.8823126444690814;

pub fn dist3(a: [f64; 3], b: [f64; 3]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
}

/// Lattice energy assembled pair by pair. Shell potentials come from
/// averaging the point potential over a sphere, shell-cube terms from the
/// cube quadrature, the cube self-energy from the frozen reference value.
pub fn brute_force_energy(lat: &ShellLattice) -> f64 {
    let (m, r) = (lat.m, lat.r);
    let c = lat.limit_density();
    let centers = lat.centers();
    let mut shells = 0.0;
    for &x in &centers {
        for &y in &centers {
            // potential of shell x averaged over shell y; the point potential
            // of shell x is m / (4 pi max(rho, r))
            let avg = sphere_average_of_distance(dist3(x, y), r, |rho| 1.0 / rho.max(r));
            shells += m * m / (4.0 * PI) * avg;
        }
    }
    // shell-cube: c m / (4 pi) int_Q 1/max(|y - x|, r) dy
    let radial = |big_r: f64| {
        if big_r <= r {
            big_r.powi(3) / (3.0 * r)
        } else {
            r * r / 3.0 + 0.5 * (big_r * big_r - r * r)
        }
    };
    let mixed: f64 = centers
        .iter()
        .map(|&x| c * m / (4.0 * PI) * cube_radial_integral(x, radial))
        .sum();
    let cube = c * c / (4.0 * PI) * CUBE_MEAN_INVERSE_DISTANCE;
    shells - 2.0 * mixed + cube
}
