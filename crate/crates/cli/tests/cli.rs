use std::path::PathBuf;
use std::process::{Command, Output};

fn mrpi(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mrpi")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("mrpi-cli-{}-{name}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    dir
}

#[test]
fn bound_prints_tail_and_n_min() {
    let o = mrpi(&["bound", "--gamma", "0.5", "--rw", "1", "--n", "2"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "tail_bound = 0.5\n");

    let o = mrpi(&["bound", "--gamma", "0.5", "--rw", "1", "--epsilon", "0.01"]);
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("n_min = 8\n"));
}

#[test]
fn bad_input_exits_with_usage_code() {
    for args in [
        &["bound", "--gamma", "1.0", "--rw", "1", "--n", "2"][..],
        &["bound", "--gamma", "0.5", "--rw", "-1", "--n", "2"],
        &["bound", "--gamma", "0.5", "--rw", "1", "--epsilon", "0"],
        &["bound", "--gamma", "0.5", "--rw", "1"],
        &["exp1", "--norm", "mahalanobis"],
        &["exp1", "--n-range", "1..300"],
        &["exp4", "--dims", "3"],
        &["exp4", "--norm", "euclidean"],
    ] {
        assert_eq!(mrpi(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn flags_override_config_file() {
    let dir = scratch("override");
    std::fs::create_dir_all(&dir).unwrap();
    let cfg = dir.join("run.conf");
    std::fs::write(&cfg, "# small run\nseed = 3\nn_range = 1..5\ndims = 2\ndir_count = 50\n").unwrap();
    let out = dir.join("out");
    let o = mrpi(&["exp1", "--config", cfg.to_str().unwrap(), "--seed", "4", "--output-dir", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let manifest = std::fs::read_to_string(out.join("manifest.txt")).unwrap();
    assert!(manifest.contains("\nseed = 4\n") && manifest.contains("\nn_range = 1..5\n"));
    let csv = std::fs::read_to_string(out.join("curve_dim2.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("n,d_num,d_bound,gamma,r_w,convention,seed"));
    assert_eq!(csv.lines().count(), 6);
    assert!(csv.lines().skip(1).all(|l| l.ends_with(",N,4")));
    let svg = std::fs::read_to_string(out.join("curves.svg")).unwrap();
    assert!(svg.starts_with("<svg") && !svg.contains("href"));
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn exponent_convention_shifts_the_bound() {
    let dir = scratch("convention");
    let run = |conv: &str| {
        let out = dir.join(conv.replace('+', "p"));
        let o = mrpi(&[
            "exp1", "--dims", "1", "--n-range", "1..3", "--dir-count", "10", "--exponent-convention", conv,
            "--output-dir", out.to_str().unwrap(),
        ]);
        assert!(o.status.success());
        std::fs::read_to_string(out.join("curve_dim1.csv")).unwrap()
    };
    let (n, n1) = (run("N"), run("N+1"));
    let bound = |csv: &str, row: usize| -> f64 { csv.lines().nth(row).unwrap().split(',').nth(2).unwrap().parse().unwrap() };
    assert!(bound(&n1, 1) < bound(&n, 1));
    assert!((bound(&n1, 1) - bound(&n, 2)).abs() < 1e-15);
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn exp4_writes_both_designs() {
    let dir = scratch("exp4");
    let o = mrpi(&["exp4", "--rollouts", "3", "--steps", "10", "--output-dir", dir.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    for f in ["feasible.csv", "feasible.svg", "trajectories_baseline.csv", "trajectories_certified.svg", "manifest.txt"] {
        assert!(dir.join(f).exists(), "{f}");
    }
    let traj = std::fs::read_to_string(dir.join("trajectories_certified.csv")).unwrap();
    assert_eq!(traj.lines().count(), 1 + 3 * 10);
    assert!(std::fs::read_to_string(dir.join("manifest.txt")).unwrap().contains("# certified.certificate = n="));
    std::fs::remove_dir_all(dir).unwrap();
}
