use std::path::{Path, PathBuf};
use std::process::Command;

use shapelab_cli::{config_echo, run_with, RunConfig};

fn run_in(dir: &Path, args: &[&str]) -> (i32, String, String) {
    let mut argv = vec![
        "shapelab".to_string(),
        "--out-dir".into(),
        dir.display().to_string(),
    ];
    argv.extend(args.iter().map(|s| s.to_string()));
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run_with(argv, &mut out, &mut err);
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

fn files(dir: &Path) -> Vec<PathBuf> {
    let mut v: Vec<PathBuf> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .collect();
    v.sort();
    v
}

fn only_csv(dir: &Path) -> String {
    let csvs: Vec<PathBuf> = files(dir)
        .into_iter()
        .filter(|p| p.extension().is_some_and(|e| e == "csv"))
        .collect();
    assert_eq!(csvs.len(), 1, "{csvs:?}");
    std::fs::read_to_string(&csvs[0]).unwrap()
}

fn value_after(line: &str, key: &str) -> f64 {
    let rest = &line[line.find(key).unwrap() + key.len()..];
    rest.split_whitespace().next().unwrap().parse().unwrap()
}

#[test]
fn eig_of_the_unit_disk() {
    let dir = tempfile::tempdir().unwrap();
    let (code, out, _) = run_in(
        dir.path(),
        &[
            "eig", "--domain", "ball", "--r", "1", "--beta", "1", "--d", "2",
        ],
    );
    assert_eq!(code, 0);
    // smallest root of k J1(k) = J0(k), squared
    assert!(
        (value_after(&out, "lambda = ") - 1.576992730809).abs() < 1e-9,
        "{out}"
    );
    let csv = only_csv(dir.path());
    let row = csv.lines().last().unwrap();
    assert!(row.starts_with("ball(r=1;d=2),1,"), "{row}");
    assert!(row.ends_with(",radial,"), "{row}");
}

#[test]
fn torsion_of_the_unit_disk() {
    let dir = tempfile::tempdir().unwrap();
    let (code, out, _) = run_in(
        dir.path(),
        &[
            "torsion", "--domain", "ball", "--r", "1", "--beta", "1", "--d", "2",
        ],
    );
    assert_eq!(code, 0);
    assert!(
        (value_after(&out, "T = ") - 5.0 * std::f64::consts::PI / 8.0).abs() < 1e-10,
        "{out}"
    );
}

#[test]
fn threshold_experiment_slope() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "experiment",
        "threshold",
        "--q",
        "0.5",
        "--d",
        "2",
        "--beta",
        "1",
        "--deltas",
        "1e-1:1e-3:geom:7",
    ];
    let (code, out, _) = run_in(dir.path(), &args);
    assert_eq!(code, 0);
    assert!((value_after(&out, "slope = ") - 0.5).abs() < 0.01, "{out}");
    let csv = only_csv(dir.path());
    let slope: f64 = csv
        .lines()
        .find_map(|l| l.strip_prefix("# slope: "))
        .unwrap()
        .parse()
        .unwrap();
    assert!((slope - 0.5).abs() < 0.01);
    let body: Vec<&str> = csv.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(body[0], "parameter,n_small,scale,lambda,torsion,F");
    assert_eq!(body.len(), 8);
    assert!(body[1..].iter().all(|r| r.split(',').count() == 6));
    assert!(!csv.contains('\r'));
}

#[test]
fn config_echo_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "experiment",
        "divergence",
        "--q",
        "0.25",
        "--beta",
        "inf",
        "--eps",
        "0.1,0.05,0.02,0.01",
    ];
    assert_eq!(run_in(dir.path(), &args).0, 0);
    let csv = only_csv(dir.path());
    let echoed: RunConfig = serde_json::from_str(config_echo(&csv).unwrap()).unwrap();
    let mut argv = vec!["shapelab", "--out-dir"];
    let d = dir.path().display().to_string();
    argv.push(&d);
    argv.extend(args);
    let direct = <RunConfig as clap::Parser>::try_parse_from(argv).unwrap();
    assert_eq!(echoed, direct);

    // re-running the echo gives the same table body
    let again = tempfile::tempdir().unwrap();
    let mut cfg = echoed;
    cfg.out_dir = again.path().to_path_buf();
    shapelab_cli::execute(&cfg).unwrap();
    let body = |s: &str| {
        s.lines()
            .filter(|l| !l.starts_with("# wall_time_s") && !l.starts_with("# config"))
            .collect::<Vec<_>>()
            .join("\n")
    };
    assert_eq!(body(&csv), body(&only_csv(again.path())));
}

#[test]
fn usage_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        vec!["frobnicate"],
        vec!["eig", "--beta", "1", "--bogus-flag"],
        vec!["eig", "--beta=-1"],
        vec!["eig", "--beta", "nan"],
        vec!["eig", "--beta", "1", "--r", "0"],
        vec![
            "experiment",
            "threshold",
            "--q",
            "0.5",
            "--beta",
            "1",
            "--deltas",
            "1e-1:1e-3:log:7",
        ],
        vec![
            "experiment",
            "threshold",
            "--q",
            "0.5",
            "--beta",
            "1",
            "--deltas",
            "0.1,0.2,0.05,0.01",
        ],
        vec!["mesh", "make", "--domain", "ball", "--d", "3"],
        vec!["--jobs", "0", "eig", "--beta", "1"],
    ] {
        let (code, _, err) = run_in(dir.path(), &args);
        assert_eq!(code, 1, "{args:?}");
        assert!(!err.is_empty(), "{args:?}");
    }
    assert!(files(dir.path()).is_empty());
}

#[test]
fn solver_failure_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "eig",
        "--domain",
        "rect",
        "--beta",
        "1",
        "--h",
        "0.1",
        "--max-eig-iterations",
        "2",
    ];
    let (code, _, err) = run_in(dir.path(), &args);
    assert_eq!(code, 2, "{err}");
}

#[test]
fn help_and_version_exit_zero() {
    let dir = tempfile::tempdir().unwrap();
    let (code, out, _) = run_in(dir.path(), &["--help"]);
    assert_eq!(code, 0);
    for sub in ["eig", "torsion", "functional", "experiment", "mesh"] {
        assert!(out.contains(sub), "{sub}");
    }
    let (code, out, _) = run_in(dir.path(), &["experiment", "--help"]);
    assert_eq!(code, 0);
    for sub in [
        "threshold",
        "divergence",
        "homogenize",
        "h1decay",
        "gn",
        "kj",
    ] {
        assert!(out.contains(sub), "{sub}");
    }
}

#[test]
fn mesh_round_trip_leaves_input_untouched() {
    let dir = tempfile::tempdir().unwrap();
    let (code, _, _) = run_in(
        dir.path(),
        &[
            "mesh", "make", "--domain", "rect", "--h", "0.2", "--output", "sq.mesh",
        ],
    );
    assert_eq!(code, 0);
    let mesh = dir.path().join("sq.mesh");
    let before = std::fs::read(&mesh).unwrap();
    let m = mesh.display().to_string();

    let (code, out, _) = run_in(
        dir.path(),
        &["mesh", "stats", "--mesh", &m, "--output", "stats.csv"],
    );
    assert_eq!(code, 0, "{out}");
    let stats = std::fs::read_to_string(dir.path().join("stats.csv")).unwrap();
    let row: Vec<&str> = stats.lines().last().unwrap().split(',').collect();
    assert!((row[4].parse::<f64>().unwrap() - 1.0).abs() < 1e-12);
    assert!((row[5].parse::<f64>().unwrap() - 4.0).abs() < 1e-12);

    let (code, _, _) = run_in(
        dir.path(),
        &[
            "eig", "--domain", "mesh", "--mesh", &m, "--beta", "inf", "--output", "e.csv",
        ],
    );
    assert_eq!(code, 0);
    let (code, _, err) = run_in(
        dir.path(),
        &["mesh", "stats", "--mesh", &m, "--output", "sq.mesh"],
    );
    assert_eq!(code, 1);
    assert!(err.contains("overwrite"), "{err}");
    assert_eq!(std::fs::read(&mesh).unwrap(), before);
}

#[test]
fn outputs_are_never_overwritten() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["torsion", "--beta", "inf", "--output", "t.csv"];
    assert_eq!(run_in(dir.path(), &args).0, 0);
    let first = std::fs::read(dir.path().join("t.csv")).unwrap();
    assert_eq!(run_in(dir.path(), &args).0, 1);
    assert_eq!(std::fs::read(dir.path().join("t.csv")).unwrap(), first);
    // generated names never collide
    assert_eq!(run_in(dir.path(), &["torsion", "--beta", "inf"]).0, 0);
    assert_eq!(run_in(dir.path(), &["torsion", "--beta", "inf"]).0, 0);
    assert_eq!(files(dir.path()).len(), 3);
}

#[test]
fn svg_written_on_request() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "--svg",
        "experiment",
        "divergence",
        "--q",
        "0.5",
        "--beta",
        "1",
        "--output",
        "div.csv",
    ];
    assert_eq!(run_in(dir.path(), &args).0, 0);
    let svg = std::fs::read_to_string(dir.path().join("div.svg")).unwrap();
    assert!(svg.starts_with("<svg"));
    assert!(svg.contains("slope -1"));
}

#[test]
fn jobs_do_not_change_results() {
    let table = |jobs: &str| {
        let dir = tempfile::tempdir().unwrap();
        let args = [
            "--jobs",
            jobs,
            "experiment",
            "h1decay",
            "--ns",
            "1,2,3",
            "--shell-samples",
            "512",
            "--cube-samples",
            "4096",
        ];
        assert_eq!(run_in(dir.path(), &args).0, 0);
        only_csv(dir.path())
            .lines()
            .filter(|l| !l.starts_with('#'))
            .collect::<Vec<_>>()
            .join("\n")
    };
    assert_eq!(table("1"), table("3"));
}

#[test]
fn out_dir_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let flagged = tempfile::tempdir().unwrap();
    let bin = env!("CARGO_BIN_EXE_shapelab");
    let status = Command::new(bin)
        .args(["torsion", "--beta", "1"])
        .env("SHAPELAB_OUT", dir.path())
        .current_dir(flagged.path())
        .output()
        .unwrap();
    assert!(status.status.success());
    assert_eq!(files(dir.path()).len(), 1);
    assert!(files(flagged.path()).is_empty());

    // the flag wins over the environment
    let status = Command::new(bin)
        .args(["torsion", "--beta", "1", "--out-dir"])
        .arg(flagged.path())
        .env("SHAPELAB_OUT", dir.path())
        .output()
        .unwrap();
    assert!(status.status.success());
    assert_eq!(files(dir.path()).len(), 1);
    assert_eq!(files(flagged.path()).len(), 1);

    let bad = Command::new(bin).arg("nope").output().unwrap();
    assert_eq!(bad.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("Usage"));
}
