mod common;

use std::f64::consts::PI;

use shapelab_core::homog_h1::{
    box_inverse_distance_integral, cross_energy, cube_self_energy, h1_energy,
    narrow_convergence_check, riemann_sum_check, shell_cube_energy, shell_pair_energy, H1Options,
    Quadratic, ShellLattice,
};

#[test]
fn cube_oracle_agrees_with_box_potential() {
    for x in [[0.5, 0.5, 0.5], [0.1, 0.7, 0.3], [0.02, 0.5, 0.9]] {
        let a = common::cube_potential(x);
        let b = box_inverse_distance_integral(x, [0.0; 3], [1.0; 3]);
        assert!((a - b).abs() < 1e-10 * b, "{x:?}: {a} vs {b}");
    }
}

#[test]
fn cube_oracle_integrates_to_reference() {
    // tensor Gauss over the cube of the quadrature potential
    let rule = common::gauss_legendre(10);
    let mut total = 0.0;
    for &(a, wa) in &rule {
        for &(b, wb) in &rule {
            for &(c, wc) in &rule {
                let x = [0.5 * (a + 1.0), 0.5 * (b + 1.0), 0.5 * (c + 1.0)];
                total += wa * wb * wc / 8.0 * common::cube_potential(x);
            }
        }
    }
    assert!(
        (total - common::CUBE_MEAN_INVERSE_DISTANCE).abs() < 1e-4,
        "{total}"
    );
}

#[test]
fn fast_path_matches_brute_force_for_small_lattices() {
    let opts = H1Options::default();
    for n in [1, 2] {
        let lat = ShellLattice::new(n, 1.0).unwrap();
        let fast = h1_energy(&lat, &opts).unwrap().e_n;
        let brute = common::brute_force_energy(&lat);
        assert!(
            (fast - brute).abs() < 0.01 * brute,
            "N = {n}: {fast} vs {brute}"
        );
    }
}

#[test]
fn overlapping_pair_energy_matches_sphere_average() {
    let (m, r) = (1.3, 0.4);
    for d in [0.05, 0.3, 0.79, 0.8, 1.5] {
        let avg = common::sphere_average_of_distance(d, r, |rho| 1.0 / rho.max(r));
        let oracle = m * m / (4.0 * PI) * avg;
        assert!(
            (shell_pair_energy(d, m, r) - oracle).abs() < 1e-10,
            "d = {d}"
        );
    }
}

#[test]
fn cross_energy_matches_pair_sum() {
    let lat = ShellLattice::new(3, 1.0).unwrap();
    let centers = lat.centers();
    let mut direct = 0.0;
    for (i, &x) in centers.iter().enumerate() {
        for (j, &y) in centers.iter().enumerate() {
            if i != j {
                direct += shell_pair_energy(common::dist3(x, y), lat.m, lat.r);
            }
        }
    }
    assert!((cross_energy(&lat) - direct).abs() < 1e-12 * direct);
}

#[test]
fn self_energy_closed_form() {
    for n in [1, 2, 4, 8, 16] {
        let lat = ShellLattice::new(n, 1.0).unwrap();
        let e = h1_energy(
            &lat,
            &H1Options {
                shell_samples: 64,
                cube_samples: 64,
                ..Default::default()
            },
        )
        .unwrap();
        let closed = (4.0 * PI).powi(2) * (n as f64).powf(-1.5) / (4.0 * PI);
        assert!((e.s_nn_self - closed).abs() < 1e-12 * closed);
    }
}

#[test]
fn monte_carlo_terms_agree_with_quadrature() {
    let lat = ShellLattice::new(4, 1.0).unwrap();
    let c = lat.limit_density();
    let x = [0.375, 0.125, 0.625];
    let est = shell_cube_energy(x, lat.r, lat.m, c, 1 << 18, 3);
    let radial = |big_r: f64| {
        let r = lat.r;
        if big_r <= r {
            big_r.powi(3) / (3.0 * r)
        } else {
            r * r / 3.0 + 0.5 * (big_r * big_r - r * r)
        }
    };
    let exact = c * lat.m / (4.0 * PI) * common::cube_radial_integral(x, radial);
    assert!(
        (est.value - exact).abs() < 4.0 * est.stderr.max(1e-12),
        "{} vs {exact}",
        est.value
    );
    let cube = cube_self_energy(1.0, 1 << 18, 5);
    let exact = common::CUBE_MEAN_INVERSE_DISTANCE / (4.0 * PI);
    assert!((cube.value - exact).abs() < 4.0 * cube.stderr.max(1e-12));
}

#[test]
fn energy_decays_with_refinement() {
    let opts = H1Options::default();
    let energies: Vec<_> = [1, 2, 4, 8]
        .iter()
        .map(|&n| h1_energy(&ShellLattice::new(n, 1.0).unwrap(), &opts).unwrap())
        .collect();
    for e in &energies {
        assert!(e.e_n > 0.0);
    }
    for w in energies.windows(2) {
        assert!(w[1].e_n < w[0].e_n + 3.0 * (w[0].mc_stderr + w[1].mc_stderr));
    }
}

#[test]
fn deterministic_for_fixed_seed_and_jobs() {
    let lat = ShellLattice::new(4, 1.0).unwrap();
    let serial = H1Options {
        shell_samples: 1 << 12,
        cube_samples: 1 << 12,
        seed: 9,
        jobs: 1,
    };
    let parallel = H1Options { jobs: 3, ..serial };
    assert_eq!(
        h1_energy(&lat, &serial).unwrap(),
        h1_energy(&lat, &parallel).unwrap()
    );
}

#[test]
fn narrow_convergence_of_quadratics() {
    let p = Quadratic {
        c0: 0.3,
        g: [1.0, -2.0, 0.5],
        h: [[1.0, 0.2, 0.0], [0.2, -0.5, 0.1], [0.0, 0.1, 2.0]],
    };
    // midpoint rule error -1/(12 N^2) and sphere average shift r^2/3 per
    // diagonal entry; mixed and linear terms are integrated exactly
    let trace = 2.5;
    for n in [2, 3, 4, 8, 16] {
        let nf = n as f64;
        let expected = (4.0 * PI * trace * (nf.powi(-3) / 3.0 - 1.0 / (12.0 * nf * nf))).abs();
        let gap = narrow_convergence_check(&ShellLattice::new(n, 1.0).unwrap(), &p);
        assert!(
            (gap - expected).abs() < 1e-12,
            "N = {n}: {gap} vs {expected}"
        );
    }
}

#[test]
fn riemann_sum_near_centre() {
    let lat = ShellLattice::new(32, 1.0).unwrap();
    let check = riemann_sum_check(&lat, 0.2).unwrap();
    assert!(check.gap < 0.15 * check.integral, "{check:?}");
}
