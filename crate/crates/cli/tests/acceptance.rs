//! Acceptance suite: one PASS/FAIL line per criterion, then a single
//! assertion that every criterion passed.

use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use mildsol::evolution::check_composition;
use mildsol::inclusion::{Nonlinearity, SelectionStrategy};
use mildsol::optimizer::{optimize, sample_solution_set, CostFunctional, CostKind};
use mildsol::phase_space::{check_fading, fading_rtol, seminorm, seminorm_tail, AnalyticForm, FadingWeight, History};
use mildsol::population::{build_instance, ControlSpec};
use mildsol::profile::Profile;
use mildsol::solver::{
    apriori_radius, certify, solve, solve_trajectory, weighted_sup_norm, AprioriInputs, ProblemInstance,
    Side, SolverConfig, Trajectory,
};
use mildsol::StateSpace;
use mildsol_cli::RunConfig;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const BENCHMARKS: [&str; 5] = [
    "linear_decay.toml",
    "impulse.toml",
    "memory.toml",
    "linear_control.toml",
    "population.toml",
];

struct Outcome {
    id: usize,
    name: &'static str,
    passed: bool,
    detail: String,
}

fn config_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs").join(name)
}

fn load(name: &str) -> (RunConfig, ProblemInstance) {
    let (run, base) = RunConfig::load(&config_path(name)).unwrap();
    let problem = build_instance(&run.problem(), Some(&base)).unwrap();
    (run, problem)
}

/// `max |y - exact|` over the stored nodes; right-limit rows use `right`.
fn node_error(traj: &Trajectory, left: impl Fn(f64) -> f64, right: impl Fn(f64) -> f64) -> f64 {
    traj.rows()
        .into_iter()
        .map(|(t, side, v)| {
            let exact = if side == Side::Right { right(t) } else { left(t) };
            (v[0] - exact).abs()
        })
        .fold(0.0, f64::max)
}

fn decay_exact(t: f64) -> f64 {
    (-t).exp()
}

fn impulse_left(t: f64) -> f64 {
    if t <= 1.0 {
        (-t).exp()
    } else {
        impulse_right(t)
    }
}

fn impulse_right(t: f64) -> f64 {
    ((-1.0f64).exp() + 0.3) * (-(t - 1.0)).exp()
}

/// `y' = -y + kappa m`, `m' = y`, `y(0) = m(0) = 1`.
fn memory_exact(kappa: f64, t: f64) -> f64 {
    let disc = (1.0 + 4.0 * kappa).sqrt();
    let (l1, l2) = ((-1.0 + disc) / 2.0, (-1.0 - disc) / 2.0);
    let c1 = (kappa - 1.0 - l2) / (l1 - l2);
    c1 * (l1 * t).exp() + (1.0 - c1) * (l2 * t).exp()
}

fn solve_with_h(problem: &ProblemInstance, run: &RunConfig, h: f64) -> Trajectory {
    let mut cfg = run.solver.clone();
    cfg.h = h;
    solve_trajectory(problem, &run.inclusion.selection, &cfg).unwrap().0
}

fn criterion_1() -> Outcome {
    let (run, problem) = load("linear_decay.toml");
    let start = Instant::now();
    let traj = solve_with_h(&problem, &run, 1e-3);
    let secs = start.elapsed().as_secs_f64();
    let err = node_error(&traj, decay_exact, decay_exact);
    Outcome {
        id: 1,
        name: "linear decay oracle",
        passed: err <= 1e-5 && secs < 5.0,
        detail: format!("max error {err:.3e} (<= 1e-5), runtime {secs:.3} s (< 5 s)"),
    }
}

fn criterion_2() -> Outcome {
    let (run, problem) = load("impulse.toml");
    let traj = solve_with_h(&problem, &run, 1e-3);
    let err = node_error(&traj, impulse_left, impulse_right);
    let jump = &traj.jumps()[0];
    let identity = (jump.right[0] - (jump.left[0] + 0.3)).abs();
    let tol = f64::EPSILON * (jump.left[0].abs() + 0.3);
    Outcome {
        id: 2,
        name: "impulse oracle",
        passed: err <= 1e-5 && identity <= tol,
        detail: format!("max error {err:.3e} (<= 1e-5), jump identity deviation {identity:.3e} (<= {tol:.1e})"),
    }
}

fn criterion_3() -> Outcome {
    let mut passed = true;
    let mut parts = Vec::new();
    for name in BENCHMARKS {
        let (run, problem) = load(name);
        let sel = &run.inclusion.selection;
        let sol = solve(&problem, sel, &run.solver).unwrap();
        let cert = certify(&sol, &problem, sel, &run.solver).unwrap();
        passed &= cert.passed;
        parts.push(format!("{name} {:.2e} <= {:.2e}", cert.residual, cert.threshold));
    }
    Outcome {
        id: 3,
        name: "mild-equation certification",
        passed,
        detail: parts.join("; "),
    }
}

fn order_ratio(name: &str, exact_left: impl Fn(f64) -> f64, exact_right: impl Fn(f64) -> f64) -> (f64, f64, f64) {
    let (run, problem) = load(name);
    let h = run.solver.h;
    let coarse = node_error(&solve_with_h(&problem, &run, h), &exact_left, &exact_right);
    let fine = node_error(&solve_with_h(&problem, &run, h / 2.0), &exact_left, &exact_right);
    (coarse, fine, coarse / fine)
}

fn criterion_4() -> Outcome {
    let in_range = |r: f64| (3.5..=4.5).contains(&r);
    let (d0, d1, dr) = order_ratio("linear_decay.toml", decay_exact, decay_exact);
    let (i0, i1, ir) = order_ratio("impulse.toml", impulse_left, impulse_right);
    // supplementary: benchmarks whose discretization error is not zero
    let kappa = 0.5;
    let (m0, m1, mr) = order_ratio("memory.toml", |t| memory_exact(kappa, t), |t| memory_exact(kappa, t));
    let c = 0.5;
    let lin = |t: f64| (1.0 + c) * (-t).exp() - c;
    let (l0, l1, lr) = order_ratio("linear_control.toml", lin, lin);
    Outcome {
        id: 4,
        name: "order of convergence",
        passed: in_range(dr) && in_range(ir),
        detail: format!(
            "decay {d0:.2e} -> {d1:.2e} ratio {dr:.3}; impulse {i0:.2e} -> {i1:.2e} ratio {ir:.3}; \
             supplementary: memory ratio {mr:.3} ({m0:.2e} -> {m1:.2e}), linear control ratio {lr:.3} ({l0:.2e} -> {l1:.2e})"
        ),
    }
}

fn criterion_5() -> Outcome {
    const LAW_TOL: f64 = 1e-10;
    let tau = 1.0;
    let weight = FadingWeight::exponential(tau, 1.0).unwrap();
    let space = StateSpace::unit_interval(5);
    let hist = |amp: f64, rate: f64| {
        History::from_analytic(space.clone(), tau, 1e-2, AnalyticForm::exponential(space.constant(amp), rate)).unwrap()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut law_dev: f64 = 0.0;
    for _ in 0..50 {
        let a = hist(rng.gen_range(-2.0..2.0), rng.gen_range(0.0..2.0));
        let b = hist(rng.gen_range(-2.0..2.0), rng.gen_range(0.0..2.0));
        let alpha = rng.gen_range(-3.0..3.0);
        let (na, nb) = (seminorm(&a, &weight).unwrap(), seminorm(&b, &weight).unwrap());
        let homog = (seminorm(&a.scaled(alpha), &weight).unwrap() - alpha.abs() * na).abs();
        let sum = seminorm(&History::combine(1.0, &a, 1.0, &b).unwrap(), &weight).unwrap();
        law_dev = law_dev.max(homog).max(sum - na - nb);
    }
    let laws = law_dev <= LAW_TOL;

    let phi = hist(1.0, 0.5);
    let exact = seminorm_tail(phi.tail(), &weight, &space).unwrap().value;
    let mut trunc = true;
    let mut trunc_parts = Vec::new();
    for m in [2.0, 4.0, 8.0] {
        let cut = phi.truncated(m * tau, 1e-3).unwrap();
        let t = seminorm_tail(cut.tail(), &weight, &space).unwrap();
        let err = (exact - t.value).abs();
        trunc &= err <= t.error_bound() + LAW_TOL;
        trunc_parts.push(format!("{m}tau {err:.2e} <= {:.2e}", t.error_bound()));
    }

    let samples: Vec<(f64, f64)> = (0..256)
        .map(|_| (rng.gen_range(-10.0..=0.0), rng.gen_range(-30.0..-tau)))
        .collect();
    let mut fading = true;
    for mu in [0.25, 1.0, 3.0] {
        let w = FadingWeight::exponential(tau, mu).unwrap();
        let r = check_fading(&w, &samples);
        fading &= r.passed
            && r.rows
                .iter()
                .all(|row| (row.lhs - row.rhs).abs() <= fading_rtol(mu * (row.xi + row.theta)) * row.rhs);
    }

    let mut b3 = true;
    for name in BENCHMARKS {
        let (run, problem) = load(name);
        b3 &= solve(&problem, &run.inclusion.selection, &run.solver).unwrap().b3.passed;
    }
    Outcome {
        id: 5,
        name: "phase-space suite",
        passed: laws && trunc && fading && b3,
        detail: format!(
            "seminorm laws dev {law_dev:.2e} ({}); tail truncation {} ({}); fading exact {fading}; B3 on all benchmarks {b3}",
            if laws { "ok" } else { "fail" },
            trunc_parts.join(", "),
            if trunc { "ok" } else { "fail" },
        ),
    }
}

fn criterion_6() -> Outcome {
    let (_, problem) = load("population.toml");
    let ev = problem.evolution.as_ref();
    let (t0, t_end) = (problem.t0(), problem.t_end());
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let dim = problem.space.dim();
    let vecs: Vec<Vec<f64>> = (0..3).map(|_| (0..dim).map(|_| rng.gen_range(-1.0..=1.0)).collect()).collect();
    let identity = (0..20).all(|_| {
        let t = rng.gen_range(t0..=t_end);
        vecs.iter().all(|v| ev.apply(t, t, v).unwrap() == *v)
    });
    let triples: Vec<(f64, f64, f64)> = (0..100)
        .map(|_| {
            let mut x = [0.0; 3].map(|_| rng.gen_range(t0..=t_end));
            x.sort_by(f64::total_cmp);
            (x[2], x[1], x[0])
        })
        .collect();
    let comp = check_composition(ev, &triples, &vecs).unwrap();
    Outcome {
        id: 6,
        name: "evolution laws",
        passed: identity && comp.max_relative_deviation <= 1e-12,
        detail: format!(
            "identity exact {identity}; composition max relative deviation {:.3e} on 100 triples",
            comp.max_relative_deviation
        ),
    }
}

fn criterion_7() -> Outcome {
    let worked = AprioriInputs {
        d: 1.0,
        alpha: Profile::constant(0.5),
        k_sup: 1.0,
        m_sup: 1.0,
        t0: 0.0,
        t1: 1.0,
        start_norm: 1.0,
        history_seminorm: 1.0,
    };
    let ell = worked.contraction(2.0);
    let expected = (1.0 - (-2.0f64).exp()) / 2.0;
    let worked_ok = (ell - expected).abs() <= 1e-12;
    let mut passed = worked_ok;
    let mut parts = vec![format!("worked l1 {ell:.15} vs {expected:.15}")];
    for name in BENCHMARKS {
        let (run, problem) = load(name);
        let Ok(b) = apriori_radius(&problem, 1) else {
            parts.push(format!("{name} no growth bound"));
            continue;
        };
        let sol = solve(&problem, &run.inclusion.selection, &run.solver).unwrap();
        let norm = weighted_sup_norm(&sol.trajectory, b.rate);
        let ok = norm <= b.radius + run.solver.picard_tol;
        passed &= ok;
        parts.push(format!("{name} {norm:.4} <= {:.4}", b.radius));
    }
    Outcome {
        id: 7,
        name: "a priori bound",
        passed,
        detail: parts.join("; "),
    }
}

fn criterion_8() -> Outcome {
    let (run, _) = load("linear_control.toml");
    let t_end = run.schedule.t_end;
    let cost = CostFunctional::minimize(CostKind::TerminalNorm);
    let mut passed = true;
    let mut parts = Vec::new();
    for c in [0.25, 0.5, 1.0] {
        let mut cfg = run.problem();
        cfg.inclusion.omega = ControlSpec::Box { c };
        let problem = build_instance(&cfg, None).unwrap();
        let best = |h: f64| {
            let solver = SolverConfig { h, ..run.solver.clone() };
            let family = sample_solution_set(&problem, 5, &solver, &cost, "acceptance").unwrap();
            let report = optimize(&family, &cost).unwrap();
            let entry = family.entries[report.best].selection.clone();
            (report, entry)
        };
        let (coarse, selection) = best(run.solver.h);
        let (fine, _) = best(run.solver.h / 2.0);
        let e = (-t_end).exp();
        let closed = (e - c * (1.0 - e)).powi(2);
        let rel = (coarse.best_cost - closed).abs() / closed;
        let extreme = matches!(selection, SelectionStrategy::Vertex { .. } | SelectionStrategy::BangBang { .. });
        let ok = rel <= 1e-4 && extreme && coarse.best_id == fine.best_id;
        passed &= ok;
        parts.push(format!(
            "c={c}: {} cost {:.6e} rel err {rel:.1e}, id {} -> {}",
            selection.label(),
            coarse.best_cost,
            coarse.best_id,
            fine.best_id
        ));
    }
    Outcome {
        id: 8,
        name: "optimizer oracle",
        passed,
        detail: parts.join("; "),
    }
}

fn criterion_9() -> Outcome {
    let (run, problem) = load("memory.toml");
    let kappa = match run.inclusion.g {
        Nonlinearity::Memory { kappa } => kappa,
        ref other => panic!("memory benchmark has g = {other:?}"),
    };
    let tau = problem.initial.tau();
    let d = problem.evolution.bound_d();
    let len = problem.t_end() - problem.t0();
    let h = 1e-2;
    let sel = &run.inclusion.selection;
    let mut passed = true;
    let mut diffs = Vec::new();
    let mut parts = Vec::new();
    for m in [2.0, 4.0, 8.0] {
        let cutoff = m * tau;
        let full = problem.initial.sampled_to(cutoff, h).unwrap();
        let trunc = problem.initial.zeroed_beyond(cutoff, h).unwrap();
        let mass = full.tail_abs_mass(cutoff).unwrap();
        let a = solve_trajectory(&problem.with_initial(full), sel, &run.solver).unwrap().0;
        let b = solve_trajectory(&problem.with_initial(trunc), sel, &run.solver).unwrap().0;
        let diff = mildsol::solver::max_node_difference(&a, &b).unwrap();
        let bound = d * kappa * mass * len * (d * kappa * len * len).exp();
        passed &= diff <= bound;
        parts.push(format!("{m}tau {diff:.3e} <= {bound:.3e}"));
        diffs.push(diff);
    }
    let monotone = diffs.windows(2).all(|w| w[1] <= w[0]);
    Outcome {
        id: 9,
        name: "fading-memory sensitivity",
        passed: passed && monotone,
        detail: format!("{}; monotone {monotone}", parts.join(", ")),
    }
}

fn run_binary(cmd: &str, config: &Path, out: &Path) -> (Option<i32>, Vec<u8>) {
    let o = Command::new(env!("CARGO_BIN_EXE_mildsol"))
        .args([cmd, "--seed", "7", "--config"])
        .arg(config)
        .arg("--out")
        .arg(out)
        .output()
        .unwrap();
    (o.status.code(), o.stdout)
}

fn dir_bytes(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap()))
        .collect();
    files.sort();
    files
}

fn criterion_10() -> Outcome {
    let mut passed = true;
    let mut compared = 0;
    for (cmd, name) in [
        ("solve", "population.toml"),
        ("verify", "population.toml"),
        ("optimize", "linear_control.toml"),
        ("optimize", "population.toml"),
    ] {
        let runs: Vec<_> = (0..2)
            .map(|_| {
                let dir = tempfile::tempdir().unwrap();
                let (code, stdout) = run_binary(cmd, &config_path(name), dir.path());
                (code, stdout, dir_bytes(dir.path()))
            })
            .collect();
        passed &= runs[0].0 == Some(0) && runs[0] == runs[1];
        compared += runs[0].2.len();
    }
    Outcome {
        id: 10,
        name: "determinism",
        passed,
        detail: format!("{compared} output files and stdout compared across repeated runs"),
    }
}

#[test]
fn acceptance() {
    let outcomes = [
        criterion_1(),
        criterion_2(),
        criterion_3(),
        criterion_4(),
        criterion_5(),
        criterion_6(),
        criterion_7(),
        criterion_8(),
        criterion_9(),
        criterion_10(),
    ];
    for o in &outcomes {
        let tag = if o.passed { "PASS" } else { "FAIL" };
        println!("{tag} criterion {:>2} {}: {}", o.id, o.name, o.detail);
    }
    let failed: Vec<usize> = outcomes.iter().filter(|o| !o.passed).map(|o| o.id).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
