//! Newtonian energy of a lattice of spherical shells against the uniform
//! measure on the unit cube, in `R^3`.
//!
//! With `G(x) = 1/(4 pi |x|)`, `nu_N = mu_N - mu` where `mu_N` puts surface
//! measure on `N^3` spheres of radius `r_N = k N^{-3/2}` centred in the
//! lattice cells and `mu = 4 pi k^2 dx` on the cube. The energy
//! `<G * nu_N, nu_N>` splits into shell self-energies, shell pair energies
//! (exact, by the shell theorem), shell-cube energies and the cube
//! self-energy (both by stratified Monte Carlo).

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Mutex, OnceLock};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{invalid, Result};
use crate::parallel::ordered_map;

pub type Point3 = [f64; 3];

/// Lattice of `N^3` equal shells in the unit cube.
///
/// Neighbouring shells overlap when `2 r_N >= 1/N` (small `N` at `k = 1`);
/// all energies below are exact for overlapping shells as well.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ShellLattice {
    pub n: usize,
    pub k: f64,
    pub r: f64,
    /// Mass of one shell, `4 pi r^2`.
    pub m: f64,
}

impl ShellLattice {
    pub fn new(n: usize, k: f64) -> Result<Self> {
        if n < 1 {
            return Err(invalid("lattice size N must be >= 1"));
        }
        if !(k.is_finite() && k > 0.0) {
            return Err(invalid(format!("k must be positive, got {k}")));
        }
        let r = k * (n as f64).powf(-1.5);
        Ok(ShellLattice {
            n,
            k,
            r,
            m: 4.0 * PI * r * r,
        })
    }

    /// Whether neighbouring shells are disjoint and stay inside their cells.
    pub fn is_separated(&self) -> bool {
        2.0 * self.r < 1.0 / self.n as f64
    }

    /// Cell centres `(l - 1/2)/N`, `l = 1..N`, in lexicographic order.
    pub fn centers(&self) -> Vec<Point3> {
        let n = self.n;
        let coord = |l: usize| (l as f64 + 0.5) / n as f64;
        let mut out = Vec::with_capacity(n * n * n);
        for i in 0..n {
            for j in 0..n {
                for l in 0..n {
                    out.push([coord(i), coord(j), coord(l)]);
                }
            }
        }
        out
    }

    pub fn total_mass(&self) -> f64 {
        (self.n as f64).powi(3) * self.m
    }

    /// Density `4 pi k^2` of the limit measure on the cube.
    pub fn limit_density(&self) -> f64 {
        4.0 * PI * self.k * self.k
    }
}

/// Monte-Carlo value with its standard error.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct McEstimate {
    pub value: f64,
    pub stderr: f64,
}

/// Mutual energy of two uniform shells of mass `m` and radius `r` whose
/// centres are `dist` apart.
///
/// Disjoint shells interact as point masses; overlapping shells average
/// `1/max(rho, r)` over the second sphere.
pub fn shell_pair_energy(dist: f64, m: f64, r: f64) -> f64 {
    if dist >= 2.0 * r {
        return m * m / (4.0 * PI * dist);
    }
    if dist == 0.0 {
        return shell_self_energy(m, r);
    }
    let inner = (r * r - (dist - r) * (dist - r)) / (2.0 * r);
    m * m / (4.0 * PI) * (inner + dist) / (2.0 * r * dist)
}

pub fn shell_self_energy(m: f64, r: f64) -> f64 {
    m * m / (4.0 * PI * r)
}

/// Image of `x` under the cube symmetry that moves it into the fundamental
/// region `x_1 <= x_2 <= x_3 <= 1/2`.
fn canonical_center(x: Point3) -> Point3 {
    let mut c = x.map(|v| v.min(1.0 - v));
    c.sort_by(f64::total_cmp);
    c
}

fn mix_seed(seed: u64, x: Point3) -> u64 {
    // splitmix64 over the seed and the coordinate bits
    let mut h = seed ^ 0x9e37_79b9_7f4a_7c15;
    for v in x {
        h ^= v.to_bits();
        h = h.wrapping_add(0x9e37_79b9_7f4a_7c15);
        h = (h ^ (h >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        h = (h ^ (h >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        h ^= h >> 31;
    }
    h
}

/// Stratified estimate of `int_{[0,1]^3} f`: `n_s^3` strata, each with two
/// independent antithetic pairs.
fn stratified(samples: usize, seed: u64, f: impl Fn(Point3) -> f64) -> McEstimate {
    let ns = ((samples / 4) as f64).cbrt().floor().max(1.0) as usize;
    let h = 1.0 / ns as f64;
    let vol = h * h * h;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut total, mut var) = (0.0, 0.0);
    for i in 0..ns {
        for j in 0..ns {
            let mut row = 0.0;
            for l in 0..ns {
                let base = [i as f64 * h, j as f64 * h, l as f64 * h];
                let mut pair = || {
                    let u: Point3 = [rng.random(), rng.random(), rng.random()];
                    let p = std::array::from_fn(|a| base[a] + h * u[a]);
                    let q = std::array::from_fn(|a| base[a] + h * (1.0 - u[a]));
                    0.5 * (f(p) + f(q))
                };
                let (a1, a2) = (pair(), pair());
                row += 0.5 * (a1 + a2);
                var += vol * vol * (a1 - a2) * (a1 - a2) / 4.0;
            }
            total += vol * row;
        }
    }
    McEstimate {
        value: total,
        stderr: var.sqrt(),
    }
}

/// `<G * mu, shell>` for a shell of mass `m`, radius `r` at `center` and
/// density `c` on the cube: `c m/(4 pi) int_Q 1/max(|y - center|, r) dy`.
///
/// When the ball lies inside the cube the integral equals
/// `int_{Q \ B} |y - center|^{-1} dy + |B|/r`. The estimate depends on the
/// centre only through its orbit under the symmetries of the cube.
pub fn shell_cube_energy(
    center: Point3,
    r: f64,
    m: f64,
    c: f64,
    samples: usize,
    seed: u64,
) -> McEstimate {
    let x = canonical_center(center);
    let est = stratified(samples, seed, |y| {
        let rho = ((y[0] - x[0]).powi(2) + (y[1] - x[1]).powi(2) + (y[2] - x[2]).powi(2)).sqrt();
        1.0 / rho.max(r)
    });
    let scale = c * m / (4.0 * PI);
    McEstimate {
        value: scale * est.value,
        stderr: scale * est.stderr,
    }
}

/// `int_{[0,x]x[0,y]x[0,z]} |w|^{-1} dw`-type antiderivative; see
/// [`box_inverse_distance_integral`].
fn box_antiderivative(x: f64, y: f64, z: f64) -> f64 {
    let rho = (x * x + y * y + z * z).sqrt();
    if rho == 0.0 {
        return 0.0;
    }
    let log_term = |coef: f64, a: f64| {
        if coef == 0.0 {
            0.0
        } else {
            coef * (a + rho).ln()
        }
    };
    let atan_term = |a: f64, b: f64, c: f64| {
        if a == 0.0 {
            0.0
        } else {
            0.5 * a * a * (b * c / (a * rho)).atan()
        }
    };
    log_term(y * z, x) + log_term(x * z, y) + log_term(x * y, z)
        - atan_term(x, y, z)
        - atan_term(y, x, z)
        - atan_term(z, x, y)
}

/// Closed form of `int_{[lo, hi]} |y - x|^{-1} dy` over an axis-aligned box.
pub fn box_inverse_distance_integral(x: Point3, lo: Point3, hi: Point3) -> f64 {
    let mut total = 0.0;
    for corner in 0..8 {
        let mut sign = 1.0;
        let c: Point3 = std::array::from_fn(|a| {
            if corner >> a & 1 == 1 {
                hi[a] - x[a]
            } else {
                sign = -sign;
                lo[a] - x[a]
            }
        });
        total += sign * box_antiderivative(c[0], c[1], c[2]);
    }
    total
}

/// `int_Q int_Q |x - y|^{-1}` on the difference variable `z`, whose density
/// on `[-1,1]^3` is `prod (1 - |z_i|)`. The singular part `8/|z|` is
/// integrated exactly; stratified Monte Carlo handles the bounded rest.
fn cube_mean_inverse_distance(samples: usize, seed: u64) -> McEstimate {
    static CACHE: OnceLock<Mutex<HashMap<(usize, u64), McEstimate>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(e) = cache.lock().expect("cache poisoned").get(&(samples, seed)) {
        return *e;
    }
    let singular = 8.0 * box_inverse_distance_integral([0.0; 3], [0.0; 3], [1.0; 3]);
    let rest = stratified(samples, seed, |z| {
        let norm = (z[0] * z[0] + z[1] * z[1] + z[2] * z[2]).sqrt();
        8.0 * ((1.0 - z[0]) * (1.0 - z[1]) * (1.0 - z[2]) - 1.0) / norm
    });
    let est = McEstimate {
        value: singular + rest.value,
        stderr: rest.stderr,
    };
    cache
        .lock()
        .expect("cache poisoned")
        .insert((samples, seed), est);
    est
}

/// `<G * mu, mu>` for density `c` on the unit cube.
pub fn cube_self_energy(c: f64, samples: usize, seed: u64) -> McEstimate {
    let e = cube_mean_inverse_distance(samples, seed);
    let scale = c * c / (4.0 * PI);
    McEstimate {
        value: scale * e.value,
        stderr: scale * e.stderr,
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EnergyBreakdown {
    pub s_nn_self: f64,
    pub s_nn_cross: f64,
    pub s_nmu: f64,
    pub s_mumu: f64,
    pub e_n: f64,
    pub mc_stderr: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct H1Options {
    /// Monte-Carlo samples for each distinct shell-cube integral.
    pub shell_samples: usize,
    /// Monte-Carlo samples for the cube self-energy.
    pub cube_samples: usize,
    pub seed: u64,
    pub jobs: usize,
}

impl Default for H1Options {
    fn default() -> Self {
        H1Options {
            shell_samples: 1 << 20,
            cube_samples: 1 << 22,
            seed: 20_240_601,
            jobs: 1,
        }
    }
}

/// `sum_{l != p}` of shell pair energies, grouped by lattice difference
/// vector: the offset `a` occurs `prod (N - |a_i|)` times.
pub fn cross_energy(lat: &ShellLattice) -> f64 {
    let n = lat.n as i64;
    let mut total = 0.0;
    for a in -(n - 1)..n {
        for b in -(n - 1)..n {
            for c in -(n - 1)..n {
                if a == 0 && b == 0 && c == 0 {
                    continue;
                }
                let count = ((n - a.abs()) * (n - b.abs()) * (n - c.abs())) as f64;
                let dist = ((a * a + b * b + c * c) as f64).sqrt() / n as f64;
                total += count * shell_pair_energy(dist, lat.m, lat.r);
            }
        }
    }
    total
}

/// The four terms of the lattice energy and their combination.
pub fn h1_energy(lat: &ShellLattice, opts: &H1Options) -> Result<EnergyBreakdown> {
    if opts.shell_samples < 4 || opts.cube_samples < 4 {
        return Err(invalid("Monte-Carlo sample counts must be >= 4"));
    }
    let c = lat.limit_density();
    let n3 = (lat.n as f64).powi(3);
    let s_nn_self = n3 * shell_self_energy(lat.m, lat.r);
    let s_nn_cross = cross_energy(lat);

    // symmetric centres share one estimate
    let mut classes: Vec<(Point3, usize)> = Vec::new();
    let mut index: HashMap<[u64; 3], usize> = HashMap::new();
    for x in lat.centers() {
        let key = canonical_center(x);
        let bits = key.map(f64::to_bits);
        match index.get(&bits) {
            Some(&i) => classes[i].1 += 1,
            None => {
                index.insert(bits, classes.len());
                classes.push((key, 1));
            }
        }
    }
    let estimates = ordered_map(&classes, opts.jobs, |(x, _)| {
        shell_cube_energy(
            *x,
            lat.r,
            lat.m,
            c,
            opts.shell_samples,
            mix_seed(opts.seed, *x),
        )
    });
    let mut s_nmu = 0.0;
    let mut var_nmu = 0.0;
    for ((_, count), e) in classes.iter().zip(&estimates) {
        s_nmu += *count as f64 * e.value;
        var_nmu += (*count as f64 * e.stderr).powi(2);
    }
    let cube = cube_self_energy(c, opts.cube_samples, opts.seed);
    let e_n = s_nn_self + s_nn_cross - 2.0 * s_nmu + cube.value;
    Ok(EnergyBreakdown {
        s_nn_self,
        s_nn_cross,
        s_nmu,
        s_mumu: cube.value,
        e_n,
        mc_stderr: (4.0 * var_nmu + cube.stderr * cube.stderr).sqrt(),
    })
}

/// Polynomial `c0 + g.x + x^T H x` on `R^3`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Quadratic {
    pub c0: f64,
    pub g: [f64; 3],
    /// Symmetric.
    pub h: [[f64; 3]; 3],
}

impl Quadratic {
    pub fn constant(c0: f64) -> Self {
        Quadratic {
            c0,
            g: [0.0; 3],
            h: [[0.0; 3]; 3],
        }
    }

    pub fn eval(&self, x: Point3) -> f64 {
        let mut v = self.c0;
        for i in 0..3 {
            v += self.g[i] * x[i];
            for j in 0..3 {
                v += self.h[i][j] * x[i] * x[j];
            }
        }
        v
    }

    fn trace(&self) -> f64 {
        self.h[0][0] + self.h[1][1] + self.h[2][2]
    }
}

/// `|int p dmu_N - int p dmu|`, both integrals in closed form.
pub fn narrow_convergence_check(lat: &ShellLattice, p: &Quadratic) -> f64 {
    let sphere_shift = lat.r * lat.r / 3.0 * p.trace();
    let shells: f64 = lat
        .centers()
        .iter()
        .map(|&x| lat.m * (p.eval(x) + sphere_shift))
        .sum();
    let mut cube = p.c0 + 0.5 * (p.g[0] + p.g[1] + p.g[2]);
    for i in 0..3 {
        for j in 0..3 {
            cube += p.h[i][j] * if i == j { 1.0 / 3.0 } else { 0.25 };
        }
    }
    (shells - lat.limit_density() * cube).abs()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RiemannCheck {
    pub sum: f64,
    pub integral: f64,
    pub gap: f64,
}

/// `N^{-3} sum 1/|x - x_p|` over lattice points within `2 epsilon` of the
/// most central centre `x`, against `int_{|y - x| <= 2 epsilon} 1/|y - x| = 2 pi (2 epsilon)^2`.
pub fn riemann_sum_check(lat: &ShellLattice, epsilon: f64) -> Result<RiemannCheck> {
    if !(epsilon > 0.0 && epsilon < 0.5) {
        return Err(invalid(format!(
            "epsilon must lie in (0, 1/2), got {epsilon}"
        )));
    }
    let n = lat.n;
    let mid = (n.div_ceil(2) - 1) as f64;
    let x = [(mid + 0.5) / n as f64; 3];
    let radius = 2.0 * epsilon;
    let mut sum = 0.0;
    for p in lat.centers() {
        let d = ((p[0] - x[0]).powi(2) + (p[1] - x[1]).powi(2) + (p[2] - x[2]).powi(2)).sqrt();
        if d > 0.0 && d <= radius {
            sum += 1.0 / d;
        }
    }
    sum /= (n as f64).powi(3);
    let integral = 2.0 * PI * radius * radius;
    Ok(RiemannCheck {
        sum,
        integral,
        gap: (sum - integral).abs(),
    })
}
