//! One PASS/FAIL line per acceptance criterion. Tolerances are pinned below.

mod common;

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use shapelab_core::experiments::{
    divergence_family, gn_probe, homogenization_sweep, threshold_family,
};
use shapelab_core::fem::{
    assemble, discrete_f1, solve_eig, solve_torsion, DEFAULT_CG_TOL, DEFAULT_EIG_TOL,
};
use shapelab_core::functionals::{evaluate_normalized, mesh_for, EvalOptions};
use shapelab_core::geometry::{
    make_disk_mesh, make_perforated_square_mesh, make_rect_mesh, mesh_stats, refine_uniform,
    scale_mesh, DomainSpec, Mesh,
};
use shapelab_core::homog_h1::{h1_energy, H1Options, ShellLattice};
use shapelab_core::radial::{eig_ball, eig_ball_lower_bound, estimate_cd, torsion_ball};
use shapelab_core::Result;
use shapelab_core::RobinCoefficient::{Finite, Infinite};

const EXACT_TOL: f64 = 1e-12;
const FEM_REL_TOL: f64 = 0.01;
const ORACLE_TOL: f64 = 1e-6;
const SCALING_TOL: f64 = 1e-8;
const DIRICHLET_LIMIT_TOL: f64 = 0.01;
const SLOPE_TOL: f64 = 0.05;
const F1_SLACK: f64 = 1e-8;
const F1_REFERENCE: f64 = 0.5 * (2.0 * PI / (4.0 + 2.0 * PI));
const MC_SIGMAS: f64 = 3.0;
const BRUTE_FORCE_TOL: f64 = 0.01;
const EXTREMALITY_TOL: f64 = 0.02;
const GN_REFINEMENT_TOL: f64 = 0.05;
const MESH_H: f64 = 0.05;
const RADIAL_TOL: f64 = 1e-10;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn geom(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| lo * (hi / lo).powf(i as f64 / (n - 1) as f64))
        .collect()
}

fn unit_disk_mesh() -> Result<Mesh> {
    mesh_for(
        &DomainSpec::Ball {
            radius: 1.0,
            dim: 2,
        },
        &EvalOptions {
            h: MESH_H,
            ..Default::default()
        },
    )
}

fn c1() -> Result<Outcome> {
    let exact = 5.0 * PI / 8.0;
    let closed = torsion_ball(1.0, Finite(1.0), 2)?;
    let mesh = unit_disk_mesh()?;
    let sys = assemble(&mesh)?;
    let fem = solve_torsion(&sys, Finite(1.0), DEFAULT_CG_TOL)?.torsion;
    let pass = (closed - exact).abs() <= EXACT_TOL
        && sys.h_max <= MESH_H
        && rel(fem, exact) <= FEM_REL_TOL;
    Ok(outcome(
        pass,
        format!(
            "closed {closed:.15} fem {fem:.6} (h {:.4}) exact {exact:.15}",
            sys.h_max
        ),
    ))
}

fn c2() -> Result<Outcome> {
    let sys = assemble(&unit_disk_mesh()?)?;
    let fem = solve_eig(&sys, Finite(1.0), DEFAULT_EIG_TOL)?.lambda;
    let radial = eig_ball(1.0, Finite(1.0), 2, RADIAL_TOL)?;
    let oracle = common::disk_robin_eig(1.0);
    let pass = sys.h_max <= MESH_H
        && rel(fem, radial) <= FEM_REL_TOL
        && (radial - oracle).abs() <= ORACLE_TOL;
    Ok(outcome(
        pass,
        format!("fem {fem:.6} radial {radial:.12} bessel {oracle:.12}"),
    ))
}

fn c3() -> Result<Outcome> {
    let grid: Vec<(f64, f64)> = [0.5, 1.0, 2.0]
        .iter()
        .flat_map(|&r| [0.1, 1.0, 10.0].map(|b| (r, b)))
        .collect();
    let mut worst = f64::INFINITY;
    let mut cds = Vec::new();
    for d in [2, 3] {
        for &(r, b) in &grid {
            let lam = eig_ball(r, Finite(b), d, RADIAL_TOL)?;
            worst = worst.min(lam / eig_ball_lower_bound(r, b)?);
        }
        cds.push(estimate_cd(d, &grid, RADIAL_TOL)?);
    }
    let pass = worst > 1.0 && cds.iter().all(|c| c.is_finite() && *c >= 0.25);
    Ok(outcome(
        pass,
        format!(
            "min lambda/bound {worst:.4}; C_2 >= {:.4}, C_3 >= {:.4}",
            cds[0], cds[1]
        ),
    ))
}

fn c4() -> Result<Outcome> {
    let mut worst: f64 = 0.0;
    for d in [2, 3] {
        for beta in [Finite(1.0), Infinite] {
            for t in [0.5, 2.0, 5.0] {
                // lambda_beta(t B) = t^-2 lambda_{t beta}(B), T likewise with t^(d+2)
                let lam_scaled = eig_ball(t, beta, d, RADIAL_TOL)?;
                let lam_moved = eig_ball(1.0, beta.scaled(t), d, RADIAL_TOL)? / (t * t);
                let tor_scaled = torsion_ball(t, beta, d)?;
                let tor_moved = torsion_ball(1.0, beta.scaled(t), d)? * t.powi(d as i32 + 2);
                worst = worst
                    .max(rel(lam_scaled, lam_moved))
                    .max(rel(tor_scaled, tor_moved));
            }
        }
    }
    let radial_worst = worst;
    let mesh = make_disk_mesh(1.0, 64, 16)?;
    let sys = assemble(&mesh)?;
    let mut fem_worst: f64 = 0.0;
    for t in [0.5, 2.0, 5.0] {
        let scaled = assemble(&scale_mesh(&mesh, t)?)?;
        let a = solve_eig(&scaled, Finite(1.0), DEFAULT_EIG_TOL)?.lambda;
        let b = solve_eig(&sys, Finite(t), DEFAULT_EIG_TOL)?.lambda / (t * t);
        let ta = solve_torsion(&scaled, Finite(1.0), DEFAULT_CG_TOL)?.torsion;
        let tb = solve_torsion(&sys, Finite(t), DEFAULT_CG_TOL)?.torsion * t.powi(4);
        fem_worst = fem_worst.max(rel(a, b)).max(rel(ta, tb));
    }
    let pass = radial_worst <= SCALING_TOL && fem_worst <= SCALING_TOL;
    Ok(outcome(
        pass,
        format!("radial max rel {radial_worst:.1e}; fem max rel {fem_worst:.1e}"),
    ))
}

fn c5() -> Result<Outcome> {
    let mut worst: f64 = 0.0;
    for d in [2, 3] {
        let lam = rel(
            eig_ball(1.0, Finite(1e4), d, RADIAL_TOL)?,
            eig_ball(1.0, Infinite, d, RADIAL_TOL)?,
        );
        let tor = rel(
            torsion_ball(1.0, Finite(1e4), d)?,
            torsion_ball(1.0, Infinite, d)?,
        );
        worst = worst.max(lam).max(tor);
    }
    let lam_inf = eig_ball(1.0, Infinite, 2, RADIAL_TOL)?;
    let oracle = common::disk_dirichlet_eig();
    let pass = worst <= DIRICHLET_LIMIT_TOL && (lam_inf - oracle).abs() <= ORACLE_TOL;
    Ok(outcome(
        pass,
        format!("beta=1e4 max rel gap {worst:.2e}; lambda_inf {lam_inf:.10} j01^2 {oracle:.10}"),
    ))
}

fn c6() -> Result<Outcome> {
    let deltas = geom(1e-1, 1e-3, 7);
    let mut pass = true;
    let mut parts = Vec::new();
    for (d, q, beta) in [
        (2, 0.5, Finite(1.0)),
        (2, 1.0, Finite(1.0)),
        (3, 1.0, Finite(1.0)),
        (2, 0.5, Infinite),
        (2, 1.0, Infinite),
    ] {
        let fam = threshold_family(q, d, beta, &deltas, RADIAL_TOL)?;
        pass &= (fam.fit.slope - fam.expected_slope).abs() <= SLOPE_TOL;
        parts.push(format!(
            "d{d} q{q} {beta}: {:.4} (want {:.2})",
            fam.fit.slope, fam.expected_slope
        ));
    }
    Ok(outcome(pass, parts.join("; ")))
}

fn c7() -> Result<Outcome> {
    let eps = geom(1e-1, 1e-3, 7);
    let mut pass = true;
    let mut parts = Vec::new();
    for beta in [Finite(1.0), Infinite] {
        for q in [0.25, 0.5, 0.75] {
            let fam = divergence_family(q, 2, beta, &eps, RADIAL_TOL)?;
            pass &= (fam.fit.slope - fam.expected_slope).abs() <= SLOPE_TOL;
            parts.push(format!(
                "{beta} q{q}: {:.4} (want {:.2})",
                fam.fit.slope, fam.expected_slope
            ));
        }
    }
    Ok(outcome(pass, parts.join("; ")))
}

fn c8() -> Result<Outcome> {
    let opts = EvalOptions {
        h: MESH_H,
        ..Default::default()
    };
    let meshes = vec![
        ("disk", unit_disk_mesh()),
        (
            "square",
            mesh_for(
                &DomainSpec::Rectangle {
                    width: 1.0,
                    height: 1.0,
                },
                &opts,
            ),
        ),
        (
            "rect 2x0.5",
            mesh_for(
                &DomainSpec::Rectangle {
                    width: 2.0,
                    height: 0.5,
                },
                &opts,
            ),
        ),
        (
            "perforated N=2",
            make_perforated_square_mesh(2, 1.0, opts.cell_resolution),
        ),
        (
            "perforated N=4",
            make_perforated_square_mesh(4, 1.0, opts.cell_resolution),
        ),
    ];
    let mut pass = true;
    let mut worst = f64::NEG_INFINITY;
    let mut missing = Vec::new();
    for (name, mesh) in meshes {
        let mesh = match mesh {
            Ok(m) => m,
            Err(e) => {
                pass = false;
                missing.push(format!("{name}: {e}"));
                continue;
            }
        };
        let sys = assemble(&mesh)?;
        for beta in [Finite(0.5), Finite(1.0), Finite(10.0), Infinite] {
            let f1 = discrete_f1(&sys, beta, DEFAULT_EIG_TOL)?;
            worst = worst.max(f1 - sys.area);
            pass &= f1 <= sys.area + F1_SLACK;
        }
    }
    let mut detail = format!("max lambda_h T_h - area {worst:.3e}");
    if !missing.is_empty() {
        detail.push_str(&format!("; not meshable: {}", missing.join(", ")));
    }
    Ok(outcome(pass, detail))
}

fn c9() -> Result<Outcome> {
    let rows = homogenization_sweep(1.0, 1.0, &[4, 8, 12], 24, &EvalOptions::default(), 1)?;
    let increasing = rows.windows(2).all(|w| w[1].lambda > w[0].lambda);
    let f1_last = rows.last().map_or(0.0, |r| r.f1);
    let bounded = rows.iter().all(|r| r.f1 <= r.area + F1_SLACK);
    let lambdas: Vec<String> = rows
        .iter()
        .map(|r| format!("N{}: {:.4}", r.n, r.lambda))
        .collect();
    Ok(outcome(
        increasing && f1_last > F1_REFERENCE && bounded,
        format!(
            "lambda {} (increasing: {increasing}); F1(12) {f1_last:.4} vs {F1_REFERENCE:.4}; F1 <= area: {bounded}",
            lambdas.join(", ")
        ),
    ))
}

fn c10() -> Result<Outcome> {
    let opts = H1Options::default();
    let mut energies = Vec::new();
    for n in [1, 2, 4, 8, 16] {
        energies.push(h1_energy(&ShellLattice::new(n, 1.0)?, &opts)?);
    }
    let positive = energies.iter().all(|e| e.e_n > 0.0);
    let decaying = energies
        .windows(2)
        .all(|w| w[1].e_n < w[0].e_n + MC_SIGMAS * (w[0].mc_stderr + w[1].mc_stderr));
    let mut brute_gap: f64 = 0.0;
    for n in [1, 2] {
        let brute = common::brute_force_energy(&ShellLattice::new(n, 1.0)?);
        brute_gap = brute_gap.max(rel(energies[n - 1].e_n, brute));
    }
    let mut self_gap: f64 = 0.0;
    for (e, n) in energies.iter().zip([1.0f64, 2.0, 4.0, 8.0, 16.0]) {
        let closed = (4.0 * PI).powi(2) * n.powf(-1.5) / (4.0 * PI);
        self_gap = self_gap.max(rel(e.s_nn_self, closed));
    }
    let list: Vec<String> = energies.iter().map(|e| format!("{:.5}", e.e_n)).collect();
    Ok(outcome(
        positive && decaying && brute_gap <= BRUTE_FORCE_TOL && self_gap <= EXACT_TOL,
        format!("E_N (N=1..16) [{}]; brute-force rel gap {brute_gap:.2e}; self-term rel gap {self_gap:.1e}", list.join(", ")),
    ))
}

fn corpus() -> Vec<DomainSpec> {
    vec![
        DomainSpec::Ball {
            radius: 1.0,
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

fn c11() -> Result<Outcome> {
    let opts = EvalOptions {
        h: MESH_H,
        ..Default::default()
    };
    let mut pass = true;
    let mut worst_lam = f64::INFINITY;
    let mut worst_tor = f64::NEG_INFINITY;
    for beta in [Finite(1.0), Infinite] {
        let ball = evaluate_normalized(
            &DomainSpec::Ball {
                radius: 1.0,
                dim: 2,
            },
            beta,
            1.0,
            &opts,
        )?;
        for dom in corpus() {
            // the ball entry is meshed, so it goes through the FEM path
            let rep = match dom {
                DomainSpec::Ball { .. } => {
                    let mesh = mesh_for(&dom, &opts)?;
                    let area = mesh_stats(&mesh)?.area;
                    let sys = assemble(&scale_mesh(&mesh, area.powf(-0.5))?)?;
                    (
                        solve_eig(&sys, beta, DEFAULT_EIG_TOL)?.lambda,
                        solve_torsion(&sys, beta, DEFAULT_CG_TOL)?.torsion,
                    )
                }
                _ => {
                    let r = evaluate_normalized(&dom, beta, 1.0, &opts)?;
                    (r.lambda, r.torsion)
                }
            };
            worst_lam = worst_lam.min(rep.0 / ball.lambda - 1.0);
            worst_tor = worst_tor.max(rep.1 / ball.torsion - 1.0);
            pass &= rep.0 >= ball.lambda * (1.0 - EXTREMALITY_TOL)
                && rep.1 <= ball.torsion * (1.0 + EXTREMALITY_TOL);
        }
    }
    Ok(outcome(
        pass,
        format!("min lambda/lambda_B - 1 {worst_lam:.4}; max T/T_B - 1 {worst_tor:.4}"),
    ))
}

fn unit_area(mesh: Mesh) -> Result<Mesh> {
    let area = mesh_stats(&mesh)?.area;
    scale_mesh(&mesh, area.powf(-0.5))
}

fn c12() -> Result<Outcome> {
    let opts = EvalOptions::default();
    let base = vec![
        unit_area(make_disk_mesh(1.0, 64, 16)?)?,
        make_rect_mesh(1.0, 1.0, 16, 16)?,
        unit_area(make_rect_mesh(2.0, 0.5, 32, 8)?)?,
        unit_area(make_perforated_square_mesh(4, 1.0, 16)?)?,
    ];
    let fine: Vec<Mesh> = base.iter().map(refine_uniform).collect();
    let coarse = gn_probe(&base, 1.0, &opts, 1)?.constant;
    let refined = gn_probe(&fine, 1.0, &opts, 1)?.constant;
    let change = rel(refined, coarse);
    Ok(outcome(
        change < GN_REFINEMENT_TOL,
        format!("constant {coarse:.6} -> {refined:.6} (rel change {change:.2e})"),
    ))
}

type Check = fn() -> Result<Outcome>;

fn main() {
    let criteria: [(&str, Check, Option<Duration>); 12] = [
        (
            "1 ball torsion closed form and FEM",
            c1,
            Some(Duration::from_secs(30)),
        ),
        (
            "2 ball eigenvalue cross-validation",
            c2,
            Some(Duration::from_secs(60)),
        ),
        ("3 eigenvalue lower bound and C_d", c3, None),
        ("4 scaling law", c4, None),
        ("5 Dirichlet limit", c5, None),
        ("6 threshold slopes", c6, Some(Duration::from_secs(5))),
        ("7 divergence slopes", c7, Some(Duration::from_secs(5))),
        ("8 discrete F_1 <= area", c8, None),
        ("9 homogenization trend", c9, Some(Duration::from_secs(600))),
        ("10 H^-1 decay", c10, Some(Duration::from_secs(120))),
        ("11 ball extremality probes", c11, None),
        ("12 GN probe refinement stability", c12, None),
    ];
    let mut failed = 0;
    for (name, check, limit) in criteria {
        let start = Instant::now();
        let result = check();
        let elapsed = start.elapsed();
        let (pass, detail) = match result {
            Ok(o) => (o.pass, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        let in_time = limit.is_none_or(|l| elapsed <= l);
        let ok = pass && in_time;
        if !ok {
            failed += 1;
        }
        let budget = limit
            .map(|l| format!(" / {}s", l.as_secs()))
            .unwrap_or_default();
        println!(
            "{} criterion {name}: {detail} [{:.2}s{budget}]",
            if ok { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64()
        );
    }
    println!("{} of 12 criteria passed", 12 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
