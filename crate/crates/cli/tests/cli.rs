use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs").join(name)
}

/// A copy of a shipped config with text replaced, written into `dir`.
fn edited(dir: &Path, name: &str, edits: &[(&str, &str)]) -> PathBuf {
    let mut text = std::fs::read_to_string(config(name)).unwrap();
    for (from, to) in edits {
        assert!(text.contains(from), "`{from}` not in {name}");
        text = text.replacen(from, to, 1);
    }
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn run(cmd: &str, cfg: &Path, out: Option<&Path>) -> Output {
    let mut c = Command::new(env!("CARGO_BIN_EXE_mildsol"));
    c.arg(cmd).arg("--config").arg(cfg);
    if let Some(o) = out {
        c.arg("--out").arg(o);
    }
    c.output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn solve_writes_its_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let o = run("solve", &config("linear_decay.toml"), Some(dir.path()));
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    for f in ["trajectory.csv", "residual.txt", "b3.csv", "apriori.txt"] {
        assert!(dir.path().join(f).is_file(), "{f} missing");
    }
    let residual = std::fs::read_to_string(dir.path().join("residual.txt")).unwrap();
    assert!(residual.contains("certified       = true"), "{residual}");
}

#[test]
fn all_shipped_configs_solve() {
    for name in ["linear_decay.toml", "impulse.toml", "memory.toml", "linear_control.toml", "population.toml"] {
        let dir = tempfile::tempdir().unwrap();
        let o = run("solve", &config(name), Some(dir.path()));
        assert_eq!(code(&o), 0, "{name}: {}", stderr(&o));
    }
}

#[test]
fn solve_is_deterministic() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for d in [&a, &b] {
        assert_eq!(code(&run("solve", &config("population.toml"), Some(d.path()))), 0);
    }
    for f in ["trajectory.csv", "residual.txt"] {
        let x = std::fs::read(a.path().join(f)).unwrap();
        let y = std::fs::read(b.path().join(f)).unwrap();
        assert_eq!(x, y, "{f}");
    }
}

#[test]
fn solve_needs_an_output_directory() {
    let o = run("solve", &config("linear_decay.toml"), None);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("--out"), "{}", stderr(&o));
}

#[test]
fn impulse_after_the_horizon_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = edited(
        dir.path(),
        "linear_decay.toml",
        &[("t_end = 2.0", "t_end = 2.0\ntimes = [3.0]\nimpulses = [{ kind = \"constant\", value = 0.1 }]")],
    );
    let o = run("solve", &cfg, Some(dir.path()));
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("schedule.times"), "{}", stderr(&o));
}

#[test]
fn unknown_field_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = edited(dir.path(), "linear_decay.toml", &[("picard_tol", "tolerance = 1.0\npicard_tol")]);
    assert_eq!(code(&run("solve", &cfg, Some(dir.path()))), 1);
}

#[test]
fn unreachable_tolerance_exits_with_nonconvergence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = edited(
        dir.path(),
        "memory.toml",
        &[("picard_tol = 1e-12", "picard_tol = 1e-30\nmax_iters = 2")],
    );
    let o = run("solve", &cfg, Some(dir.path()));
    assert_eq!(code(&o), 2, "{}", stderr(&o));
}

#[test]
fn wrong_shift_bound_fails_the_fading_check() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = edited(dir.path(), "linear_decay.toml", &[("mu = 1.0", "mu = 1.0\np_rate = 2.0")]);
    let o = run("verify", &cfg, None);
    assert_eq!(code(&o), 3);
    assert!(stderr(&o).contains("fading condition"), "{}", stderr(&o));
}

#[test]
fn zero_removal_rate_fails_b2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = edited(dir.path(), "linear_decay.toml", &[("value = 1.0 }", "value = 0.0 }")]);
    let o = run("verify", &cfg, None);
    assert_eq!(code(&o), 3);
    assert!(stderr(&o).contains("b2"), "{}", stderr(&o));
}

#[test]
fn verify_passes_on_the_population_model() {
    let dir = tempfile::tempdir().unwrap();
    let o = run("verify", &config("population.toml"), Some(dir.path()));
    assert_eq!(code(&o), 0, "{}{}", stdout(&o), stderr(&o));
    assert!(dir.path().join("verify.txt").is_file());
}

#[test]
fn optimize_writes_the_cost_table() {
    let dir = tempfile::tempdir().unwrap();
    let o = run("optimize", &config("linear_control.toml"), Some(dir.path()));
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    for f in ["optimization.txt", "optimization.csv", "best_trajectory.csv"] {
        assert!(dir.path().join(f).is_file(), "{f} missing");
    }
    let csv = std::fs::read_to_string(dir.path().join("optimization.csv")).unwrap();
    assert_eq!(csv.lines().count(), 6, "{csv}");
}

#[test]
fn budget_one_gives_a_single_row() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = edited(dir.path(), "linear_control.toml", &[("budget = 5", "budget = 1")]);
    let out = dir.path().join("out");
    std::fs::create_dir(&out).unwrap();
    assert_eq!(code(&run("optimize", &cfg, Some(&out))), 0);
    let csv = std::fs::read_to_string(out.join("optimization.csv")).unwrap();
    assert_eq!(csv.lines().count(), 2, "{csv}");
}

fn best_terminal(cfg: &Path, out: &Path) -> f64 {
    assert_eq!(code(&run("optimize", cfg, Some(out))), 0);
    let traj = std::fs::read_to_string(out.join("best_trajectory.csv")).unwrap();
    let last = traj.lines().next_back().unwrap();
    last.rsplit(',').next().unwrap().trim().parse().unwrap()
}

#[test]
fn maximizing_picks_the_opposite_control() {
    let dir = tempfile::tempdir().unwrap();
    let (lo_dir, hi_dir) = (dir.path().join("lo"), dir.path().join("hi"));
    std::fs::create_dir(&lo_dir).unwrap();
    std::fs::create_dir(&hi_dir).unwrap();
    let max = edited(dir.path(), "linear_control.toml", &[("\"minimize\"", "\"maximize\"")]);
    let lo = best_terminal(&config("linear_control.toml"), &lo_dir);
    let hi = best_terminal(&max, &hi_dir);
    let e = (-0.5f64).exp();
    assert!((lo - (e - 0.5 * (1.0 - e))).abs() < 1e-6, "{lo}");
    assert!((hi - (e + 0.5 * (1.0 - e))).abs() < 1e-6, "{hi}");
}

#[test]
fn optimize_without_a_section_is_a_config_error() {
    let o = run("optimize", &config("linear_decay.toml"), None);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("optimize"), "{}", stderr(&o));
}
