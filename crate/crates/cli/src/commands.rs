use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use mildsol::evolution::check_composition;
use mildsol::optimizer::{optimize, sample_solution_set};
use mildsol::phase_space::{
    check_b4, check_continuity_proxy, check_fading, seminorm, seminorm_recent, seminorm_tail,
    AnalyticForm, History,
};
use mildsol::population::{
    analytic_decay_oracle, build_instance, verify_hypotheses, HypothesisSamples, HypothesisStatus,
};
use mildsol::solver::{
    apriori_radius, certify, diagnostic_times, max_node_difference, solve, weighted_sup_norm,
    ProblemInstance, Solution, SolverConfig,
};
use mildsol::table::write_trajectory;
use mildsol::{Error, Result};

use crate::config::RunConfig;
use crate::report::{csv, num, write, KeyValues};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_NONCONVERGENCE: i32 = 2;
pub const EXIT_PROPERTY: i32 = 3;

/// Exit code of a library error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::NonConvergence { .. } | Error::EmptyFamily(_) => EXIT_NONCONVERGENCE,
        Error::Hypothesis { .. } | Error::Membership { .. } | Error::NotIntegrable(_) => EXIT_PROPERTY,
        Error::Config { .. }
        | Error::Domain { .. }
        | Error::Grid(_)
        | Error::Misuse(_)
        | Error::Parse { .. }
        | Error::Io(_) => EXIT_CONFIG,
    }
}

#[derive(Debug, Clone)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure {
            code: exit_code(&e),
            message: e.to_string(),
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub config: PathBuf,
    pub out: Option<PathBuf>,
    /// Replaces `solver.h`.
    pub grid_override: Option<f64>,
    /// Replaces the configured seed.
    pub seed: Option<u64>,
}

fn load(opts: &RunOptions) -> Result<(RunConfig, PathBuf)> {
    let (mut run, base) = RunConfig::load(&opts.config)?;
    if let Some(h) = opts.grid_override {
        run.solver.h = h;
    }
    if let Some(seed) = opts.seed {
        run.seed = seed;
    }
    run.validate()?;
    Ok((run, base))
}

fn out_dir(opts: &RunOptions) -> Result<&Path> {
    let dir = opts.out.as_deref().ok_or_else(|| Error::Config {
        field: "--out".into(),
        detail: "an output directory is required".into(),
    })?;
    std::fs::create_dir_all(dir)?;
    Ok(dir)
}

/// Solves with the configured selection and writes the trajectory and its
/// reports. Property failures still leave every file in place.
pub fn cmd_solve(opts: &RunOptions) -> Result<String, Failure> {
    let (run, base) = load(opts)?;
    let dir = out_dir(opts)?;
    let problem = build_instance(&run.problem(), Some(&base))?;
    let selection = &run.inclusion.selection;
    let solution = solve(&problem, selection, &run.solver)?;
    let cert = certify(&solution, &problem, selection, &run.solver)?;

    write(dir, "trajectory.csv", &write_trajectory(&solution.trajectory))?;
    let mut residual = KeyValues::new();
    residual
        .put("selection", selection.label())
        .float("h", cert.h)
        .float("residual", cert.residual)
        .float("picard_tol", cert.picard_tol)
        .float("richardson_diff", cert.richardson_diff)
        .float("constant", cert.constant)
        .float("threshold", cert.threshold)
        .put("certified", cert.passed)
        .put(
            "iterations",
            solution.iterations.iter().map(ToString::to_string).collect::<Vec<_>>().join(" "),
        )
        .put("provenance", run.provenance());
    write(dir, "residual.txt", &residual.render())?;
    write(
        dir,
        "b3.csv",
        &csv(
            "t,lhs,rhs,ok",
            solution.b3.rows.iter().map(|r| [num(r.t), num(r.lhs), num(r.rhs), r.ok.to_string()]),
        ),
    )?;
    if let Some(g) = &solution.growth {
        write(
            dir,
            "growth.csv",
            &csv(
                "t,lhs,rhs,ok",
                g.rows.iter().map(|r| [num(r.t), num(r.lhs), num(r.rhs), r.ok.to_string()]),
            ),
        )?;
    }
    let apriori = apriori_report(&problem, &solution, &run.solver);
    write(dir, "apriori.txt", &apriori.0.render())?;

    let mut failed = Vec::new();
    if !cert.passed {
        failed.push("certification");
    }
    if !solution.b3.passed {
        failed.push("axiom B3");
    }
    if solution.growth.as_ref().is_some_and(|g| !g.passed) {
        failed.push("growth bound");
    }
    if apriori.1 == Some(false) {
        failed.push("a priori bound");
    }
    let summary = residual.render();
    if failed.is_empty() {
        Ok(summary)
    } else {
        Err(Failure {
            code: EXIT_PROPERTY,
            message: format!("{summary}failed: {}", failed.join(", ")),
        })
    }
}

/// The a priori report, and whether the weighted norm stayed inside the
/// ball (`None` when no bound is available).
fn apriori_report(problem: &ProblemInstance, solution: &Solution, cfg: &SolverConfig) -> (KeyValues, Option<bool>) {
    let mut kv = KeyValues::new();
    match apriori_radius(problem, 1) {
        Ok(b) => {
            let weighted = weighted_sup_norm(&solution.trajectory, b.rate);
            let within = weighted <= b.radius + cfg.picard_tol;
            kv.put("status", "available")
                .float("rate", b.rate)
                .float("contraction", b.contraction)
                .float("offset", b.offset)
                .float("radius", b.radius)
                .float("d", b.d)
                .float("k_sup", b.k_sup)
                .float("m_sup", b.m_sup)
                .float("alpha_l1", b.alpha_l1)
                .float("weighted_sup_norm", weighted)
                .put("within", within);
            (kv, Some(within))
        }
        Err(e) => {
            kv.put("status", "unavailable").put("reason", e);
            (kv, None)
        }
    }
}

struct Check {
    name: String,
    passed: bool,
    detail: String,
}

impl Check {
    fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            passed,
            detail: detail.into(),
        }
    }
}

const LAW_TOL: f64 = 1e-10;

fn seminorm_laws(initial: &History, rate: f64, step: f64, rng: &mut ChaCha8Rng, weight: &mildsol::phase_space::FadingWeight) -> Result<Check> {
    let space = initial.space().clone();
    let tau = initial.tau();
    let mut hs = vec![initial.clone()];
    for _ in 0..4 {
        let amp: Vec<f64> = (0..space.dim()).map(|_| rng.gen_range(-2.0..=2.0)).collect();
        hs.push(History::from_analytic(space.clone(), tau, step, AnalyticForm::exponential(amp, rate))?);
    }
    let zero = seminorm(&History::zero(space.clone(), tau, step)?, weight)?;
    let mut worst_scale: f64 = 0.0;
    let mut worst_triangle = f64::NEG_INFINITY;
    for (i, a) in hs.iter().enumerate() {
        let sa = seminorm(a, weight)?;
        if sa < 0.0 {
            return Ok(Check::new("seminorm laws", false, format!("negative value {sa}")));
        }
        for alpha in [-2.5, 0.3, 0.0] {
            let s = seminorm(&a.scaled(alpha), weight)?;
            worst_scale = worst_scale.max((s - alpha.abs() * sa).abs() / (1.0 + alpha.abs() * sa));
        }
        for b in &hs[i + 1..] {
            let sum = seminorm(&History::combine(1.0, a, 1.0, b)?, weight)?;
            let sb = seminorm(b, weight)?;
            worst_triangle = worst_triangle.max(sum - sa - sb);
        }
    }
    let passed = zero == 0.0 && worst_scale <= LAW_TOL && worst_triangle <= LAW_TOL;
    Ok(Check::new(
        "seminorm laws",
        passed,
        format!("zero {zero:.3e}, homogeneity dev {worst_scale:.3e}, triangle excess {worst_triangle:.3e}"),
    ))
}

fn tail_truncation(initial: &History, step: f64, weight: &mildsol::phase_space::FadingWeight) -> Result<Check> {
    let exact = seminorm(initial, weight)?;
    let tau = initial.tau();
    let mut details = Vec::new();
    let mut passed = true;
    for m in [2.0, 4.0, 8.0] {
        let trunc = initial.truncated(m * tau, step)?;
        let recent = seminorm_recent(trunc.recent(), tau, trunc.space())?;
        let tail = seminorm_tail(trunc.tail(), weight, trunc.space())?;
        let err = (exact - recent - tail.value).abs();
        let bound = tail.error_bound();
        let ok = err <= bound + LAW_TOL * (1.0 + exact);
        passed &= ok;
        details.push(format!("{m}tau: {err:.3e} <= {bound:.3e}"));
    }
    Ok(Check::new("tail truncation", passed, details.join("; ")))
}

fn push_solver_checks(checks: &mut Vec<Check>, run: &RunConfig, base: &Path, problem: &ProblemInstance, rng: &mut ChaCha8Rng) -> Result<()> {
    let ev = &problem.evolution;
    let (t0, t_end) = (problem.t0(), problem.t_end());
    let dim = problem.space.dim();
    let vecs: Vec<Vec<f64>> = (0..4)
        .map(|_| (0..dim).map(|_| rng.gen_range(-1.0..=1.0)).collect())
        .collect();
    let mut identity = true;
    for v in &vecs {
        let t = rng.gen_range(t0..=t_end);
        identity &= ev.apply(t, t, v)? == *v;
    }
    checks.push(Check::new("evolution identity", identity, "U(t,t)v == v on 4 samples"));
    let triples: Vec<(f64, f64, f64)> = (0..100)
        .map(|_| {
            let mut x = [
                rng.gen_range(t0..=t_end),
                rng.gen_range(t0..=t_end),
                rng.gen_range(t0..=t_end),
            ];
            x.sort_by(f64::total_cmp);
            (x[2], x[1], x[0])
        })
        .collect();
    let comp = check_composition(ev.as_ref(), &triples, &vecs)?;
    checks.push(Check::new(
        "evolution composition",
        comp.passed,
        format!("max relative deviation {:.3e} over {} samples", comp.max_relative_deviation, comp.samples),
    ));

    let selection = &run.inclusion.selection;
    let solution = match solve(problem, selection, &run.solver) {
        Ok(s) => s,
        Err(e) => {
            checks.push(Check::new("solve", false, e.to_string()));
            return Ok(());
        }
    };
    let cert = certify(&solution, problem, selection, &run.solver)?;
    checks.push(Check::new(
        "certification",
        cert.passed,
        format!("residual {:.3e} <= {:.3e}", cert.residual, cert.threshold),
    ));
    let worst_b3 = solution.b3.rows.iter().map(|r| r.lhs - r.rhs).fold(f64::NEG_INFINITY, f64::max);
    checks.push(Check::new(
        "axiom B3",
        solution.b3.passed,
        format!("max lhs - rhs {worst_b3:.3e} over {} times", solution.b3.rows.len()),
    ));
    let times = diagnostic_times(problem, 21);
    let b4 = check_b4(&solution.trajectory, problem.constants.h, &problem.weight, &times)?;
    checks.push(Check::new("axiom B4", b4.passed, format!("H = {}, {} violations", b4.h, b4.violations.len())));
    let cont = check_continuity_proxy(&solution.trajectory, &problem.weight, &times, 0.05 * (t_end - t0))?;
    checks.push(Check::new("continuity proxy", cont.passed, format!("{} samples", cont.rows.len())));
    if let Some(g) = &solution.growth {
        checks.push(Check::new("growth bound", g.passed, format!("{} samples", g.rows.len())));
    }
    if let Ok(b) = apriori_radius(problem, 1) {
        let weighted = weighted_sup_norm(&solution.trajectory, b.rate);
        checks.push(Check::new(
            "a priori bound",
            weighted <= b.radius + run.solver.picard_tol,
            format!("weighted norm {weighted:.6} <= r = {:.6} (rate {}, contraction {:.4})", b.radius, b.rate, b.contraction),
        ));
    }
    let omega = run.problem().control(Some(base))?;
    if run.oracle_eligible(&omega) {
        let oracle = analytic_decay_oracle(&run.problem(), Some(base), run.solver.h)?;
        let err = max_node_difference(&solution.trajectory, &oracle)?;
        let h = solution.trajectory.max_spacing();
        let scale = 1.0 + problem.space.norm(problem.initial.current());
        let tol = 1e-12 + h * h * scale;
        checks.push(Check::new("decay oracle", err <= tol, format!("max error {err:.3e} <= {tol:.3e}")));
    }
    Ok(())
}

fn render_checks(checks: &[Check]) -> String {
    let width = checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
    let mut out = String::new();
    for c in checks {
        let status = if c.passed { "pass" } else { "FAIL" };
        writeln!(out, "{status}  {:<width$}  {}", c.name, c.detail).unwrap();
    }
    out
}

/// Runs every property check on the configuration and prints the table.
pub fn cmd_verify(opts: &RunOptions) -> Result<String, Failure> {
    let (run, base) = load(opts)?;
    let config = run.problem();
    let mut rng = ChaCha8Rng::seed_from_u64(run.seed);
    let mut checks = Vec::new();

    let hyp = verify_hypotheses(&config, Some(&base), &HypothesisSamples::new(2000, run.seed))?;
    for r in &hyp.rows {
        checks.push(Check::new(
            format!("hypothesis {}", r.id),
            r.status != HypothesisStatus::Fail,
            format!("[{}] {}: {}", r.status.as_str(), r.description, r.detail),
        ));
    }

    let weight = config.weight()?;
    let pairs: Vec<(f64, f64)> = (0..256)
        .map(|_| {
            let tau = weight.tau();
            (rng.gen_range(-4.0 * tau..=0.0), rng.gen_range(-8.0 * tau..-tau))
        })
        .collect();
    let fading = check_fading(&weight, &pairs);
    let detail = match fading.rows.iter().find(|r| !r.ok) {
        Some(r) => format!("rho({}) = {:e} > P({}) rho({}) = {:e}", r.xi + r.theta, r.lhs, r.xi, r.theta, r.rhs),
        None => format!("{} samples", fading.rows.len()),
    };
    checks.push(Check::new("fading condition", fading.passed, detail));

    let initial = config.initial_history(Some(&base))?;
    let rate = match &config.population.psi_star {
        mildsol::population::InitialSpec::Analytic { rate, .. } => *rate,
        mildsol::population::InitialSpec::Table { tail_rate, .. } => *tail_rate,
    };
    let step = config.population.history_step;
    checks.push(seminorm_laws(&initial, rate, step, &mut rng, &weight)?);
    checks.push(tail_truncation(&initial, step, &weight)?);

    match build_instance(&config, Some(&base)) {
        Ok(problem) => push_solver_checks(&mut checks, &run, &base, &problem, &mut rng)?,
        Err(e) => checks.push(Check::new("problem assembly", false, e.to_string())),
    }

    let table = render_checks(&checks);
    if let Some(dir) = &opts.out {
        std::fs::create_dir_all(dir).map_err(Error::from)?;
        write(dir, "verify.txt", &table)?;
    }
    let failed: Vec<&str> = checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
    if failed.is_empty() {
        Ok(table)
    } else {
        Err(Failure {
            code: EXIT_PROPERTY,
            message: format!("{table}failed: {}", failed.join(", ")),
        })
    }
}

/// Samples the solution set, optimizes the configured cost over it and
/// writes the report with the best trajectory.
pub fn cmd_optimize(opts: &RunOptions) -> Result<String, Failure> {
    let (run, base) = load(opts)?;
    let request = run.optimize.clone().ok_or_else(|| Error::Config {
        field: "optimize".into(),
        detail: "section is required for this command".into(),
    })?;
    let dir = out_dir(opts)?;
    let problem = build_instance(&run.problem(), Some(&base))?;
    let family = sample_solution_set(&problem, request.budget, &run.solver, &request.cost, &run.provenance())?;
    let report = optimize(&family, &request.cost)?;
    let text = report.to_text();
    write(dir, "optimization.txt", &text)?;
    write(dir, "optimization.csv", &report.to_csv())?;
    write(dir, "best_trajectory.csv", &write_trajectory(&family.entries[report.best].trajectory))?;
    Ok(text)
}
