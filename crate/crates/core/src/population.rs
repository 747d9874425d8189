//! The population model on `[0, 1]`: removal coefficient `b(t, x)`,
//! pointwise growth law `g`, feedback control sets, and impulses acting
//! on the memory integral.
//!
//! The spatial domain is discretized by a uniform grid; the state norm is
//! the trapezoid approximation of the `L^2` norm.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::evolution::{EvolutionSystem, MultiplicationEvolution};
use crate::inclusion::{eval_f, ControlMultimap, GrowthData, Nonlinearity, SelectionStrategy};
use crate::phase_space::{
    panel_count, seminorm, weighted_history_integral, AnalyticForm, Beyond, FadingWeight, History,
    PhaseSpaceConstants,
};
use crate::profile::Profile;
use crate::solver::{ImpulseMap, ImpulseSchedule, ProblemInstance, Segment, Trajectory};
use crate::space::StateSpace;
use crate::table::{parse_table, read_history};

fn default_eps_tail() -> f64 {
    1e-8
}

fn default_step() -> f64 {
    1e-3
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhaseSpaceSection {
    pub tau: f64,
    pub mu: f64,
    /// Rate of the shift bound `P(xi) = exp(p_rate xi)`; defaults to `mu`.
    #[serde(default)]
    pub p_rate: Option<f64>,
    /// Tail cutoff `Theta`.
    #[serde(default)]
    pub cutoff: Option<f64>,
    #[serde(default = "default_eps_tail")]
    pub eps_tail: f64,
    /// Overrides the calibrated `K`, `M`, `H`.
    #[serde(default)]
    pub constants: Option<PhaseSpaceConstants>,
}

/// Removal coefficient `b(t, x)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case")]
pub enum RemovalSpec {
    Constant { value: f64 },
    /// `time(t) * space(x)`
    Separable { time: Profile, space: Profile },
    /// Columnar file `t,side,v_0,...` with one column per spatial node,
    /// linear in `t` between rows.
    Table { path: PathBuf },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvolutionSection {
    pub b: RemovalSpec,
    /// Time step at which analytic forms are sampled.
    #[serde(default = "default_step")]
    pub step: f64,
}

/// Control sets, with finite vertex lists optionally read from a table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum ControlSpec {
    Ball { radius: f64 },
    Box { c: f64 },
    Finite { vertices: Vec<Vec<f64>> },
    /// One vertex per row of a columnar file `i,side,v_0,...`.
    FiniteTable { path: PathBuf },
}

fn default_nonlinearity() -> Nonlinearity {
    Nonlinearity::Zero
}

fn default_control() -> ControlSpec {
    ControlSpec::Box { c: 0.0 }
}

fn default_selection() -> SelectionStrategy {
    SelectionStrategy::Zero
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InclusionSection {
    #[serde(default = "default_nonlinearity")]
    pub g: Nonlinearity,
    #[serde(default = "default_control")]
    pub omega: ControlSpec,
    /// Overrides the derived growth bound `alpha = h + R`.
    #[serde(default)]
    pub alpha: Option<Profile>,
    /// Selection used by single solves.
    #[serde(default = "default_selection")]
    pub selection: SelectionStrategy,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleSection {
    pub t0: f64,
    pub t_end: f64,
    #[serde(default)]
    pub times: Vec<f64>,
    #[serde(default)]
    pub impulses: Vec<ImpulseMap>,
}

/// Initial datum `psi*(theta, x)` for `theta <= 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case")]
pub enum InitialSpec {
    /// `amplitude(x) * exp(rate * theta)`
    Analytic { amplitude: Profile, rate: f64 },
    /// Sampled history file `theta,side,v_0,...`, continued below its
    /// first row by `tail_amplitude(x) * exp(tail_rate * theta)`.
    Table {
        path: PathBuf,
        tail_amplitude: Profile,
        tail_rate: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PopulationSection {
    pub n_space: usize,
    pub psi_star: InitialSpec,
    /// Step of the sampled recent window of the initial history.
    #[serde(default = "default_step")]
    pub history_step: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PopulationConfig {
    pub phase_space: PhaseSpaceSection,
    pub evolution: EvolutionSection,
    pub inclusion: InclusionSection,
    pub schedule: ScheduleSection,
    pub population: PopulationSection,
}

fn resolve(base: Option<&Path>, p: &Path) -> PathBuf {
    match base {
        Some(b) if p.is_relative() => b.join(p),
        _ => p.to_path_buf(),
    }
}

fn read_file(base: Option<&Path>, p: &Path, field: &str) -> Result<String> {
    let full = resolve(base, p);
    std::fs::read_to_string(&full).map_err(|e| Error::config(field, format!("{}: {e}", full.display())))
}

/// Hex SHA-256 of `text`.
pub fn digest(text: &str) -> String {
    let bytes = Sha256::digest(text.as_bytes());
    let mut out = String::with_capacity(64);
    for b in bytes.iter() {
        write!(out, "{b:02x}").unwrap();
    }
    out
}

impl PopulationConfig {
    /// Hash of the configuration's debug representation.
    pub fn provenance(&self) -> String {
        digest(&format!("{self:?}"))
    }

    /// Field-level checks that need no file access.
    pub fn validate(&self) -> Result<()> {
        let ps = &self.phase_space;
        if !(ps.tau > 0.0) {
            return Err(Error::config("phase_space.tau", "must be positive"));
        }
        if !(ps.mu > 0.0) {
            return Err(Error::config("phase_space.mu", "must be positive"));
        }
        if let Some(c) = ps.cutoff {
            if !(c >= ps.tau) {
                return Err(Error::config("phase_space.cutoff", format!("{c} is below tau = {}", ps.tau)));
            }
        }
        if !(ps.eps_tail > 0.0 && ps.eps_tail < 1.0) {
            return Err(Error::config("phase_space.eps_tail", "must lie in (0, 1)"));
        }
        if self.population.n_space == 0 {
            return Err(Error::config("population.n_space", "must be at least 1"));
        }
        if !(self.population.history_step > 0.0) {
            return Err(Error::config("population.history_step", "must be positive"));
        }
        if !(self.evolution.step > 0.0) {
            return Err(Error::config("evolution.step", "must be positive"));
        }
        let s = &self.schedule;
        ImpulseSchedule::new(s.t0, s.t_end, s.times.clone(), s.impulses.clone())?;
        Ok(())
    }

    pub fn space(&self) -> StateSpace {
        StateSpace::unit_interval(self.population.n_space)
    }

    pub fn weight(&self) -> Result<FadingWeight> {
        let ps = &self.phase_space;
        FadingWeight::with_p_rate(ps.tau, ps.mu, ps.p_rate.unwrap_or(ps.mu))
    }

    /// `Theta`, configured or from `eps_tail`.
    pub fn cutoff(&self) -> Result<f64> {
        let w = self.weight()?;
        Ok(self
            .phase_space
            .cutoff
            .unwrap_or_else(|| w.default_cutoff(self.phase_space.eps_tail)))
    }

    /// `(times, b[time][node])` as sampled for the evolution system.
    pub fn removal_table(&self, base: Option<&Path>) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
        let space = self.space();
        let (t0, t_end) = (self.schedule.t0, self.schedule.t_end);
        let uniform = |f: &dyn Fn(f64, f64) -> f64| {
            let n = panel_count(t_end - t0, self.evolution.step);
            let times: Vec<f64> = (0..=n)
                .map(|j| if j == n { t_end } else { t0 + (t_end - t0) * j as f64 / n as f64 })
                .collect();
            let rows = times
                .iter()
                .map(|&t| space.nodes().iter().map(|&x| f(t, x)).collect())
                .collect();
            (times, rows)
        };
        match &self.evolution.b {
            RemovalSpec::Constant { value } => Ok(uniform(&|_, _| *value)),
            RemovalSpec::Separable { time, space: sp } => Ok(uniform(&|t, x| time.eval(t) * sp.eval(x))),
            RemovalSpec::Table { path } => {
                let text = read_file(base, path, "evolution.b.path")?;
                let (_, rows) = parse_table(&text)?;
                if rows.iter().any(|r| r.values.len() != space.dim()) {
                    return Err(Error::config(
                        "evolution.b.path",
                        format!("removal table needs {} value columns", space.dim()),
                    ));
                }
                Ok((rows.iter().map(|r| r.x).collect(), rows.into_iter().map(|r| r.values).collect()))
            }
        }
    }

    pub fn control(&self, base: Option<&Path>) -> Result<ControlMultimap> {
        let omega = match &self.inclusion.omega {
            ControlSpec::Ball { radius } => ControlMultimap::Ball { radius: *radius },
            ControlSpec::Box { c } => ControlMultimap::Box { c: *c },
            ControlSpec::Finite { vertices } => ControlMultimap::Finite {
                vertices: vertices.clone(),
            },
            ControlSpec::FiniteTable { path } => {
                let text = read_file(base, path, "inclusion.omega.path")?;
                let (_, rows) = parse_table(&text)?;
                ControlMultimap::Finite {
                    vertices: rows.into_iter().map(|r| r.values).collect(),
                }
            }
        };
        omega.validate(&self.space())?;
        Ok(omega)
    }

    pub fn initial_history(&self, base: Option<&Path>) -> Result<History> {
        let space = self.space();
        let tau = self.phase_space.tau;
        let sample = |p: &Profile| -> Vec<f64> { space.nodes().iter().map(|&x| p.eval(x)).collect() };
        match &self.population.psi_star {
            InitialSpec::Analytic { amplitude, rate } => {
                let form = AnalyticForm::exponential(sample(amplitude), *rate);
                History::from_analytic(space.clone(), tau, self.population.history_step, form)
            }
            InitialSpec::Table {
                path,
                tail_amplitude,
                tail_rate,
            } => {
                let text = read_file(base, path, "population.psi_star.path")?;
                let form = AnalyticForm::exponential(sample(tail_amplitude), *tail_rate);
                read_history(&text, space.clone(), tau, Beyond::Analytic(form))
            }
        }
    }
}

/// Assembles the problem: multiplication evolution, right-hand side,
/// impulse schedule and initial history. Relative file paths resolve
/// against `base`.
pub fn build_instance(config: &PopulationConfig, base: Option<&Path>) -> Result<ProblemInstance> {
    config.validate()?;
    let space = config.space();
    let weight = config.weight()?;
    let (times, rows) = config.removal_table(base)?;
    let evolution = MultiplicationEvolution::new(times, rows)?;
    if let Some((t, i, v)) = evolution.positivity_violations().first() {
        return Err(Error::Hypothesis {
            hypothesis: "b2".into(),
            detail: format!(
                "removal rate b({t}, {}) = {v} is not positive",
                space.nodes()[*i]
            ),
        });
    }
    let control = config.control(base)?;
    let nonlinearity = config.inclusion.g.clone();
    let growth = match &config.inclusion.alpha {
        Some(alpha) => Some(GrowthData {
            alpha: alpha.clone(),
            mu: None,
        }),
        None => GrowthData::derived(&nonlinearity, &control, &space),
    };
    let s = &config.schedule;
    let schedule = ImpulseSchedule::new(s.t0, s.t_end, s.times.clone(), s.impulses.clone())?;
    let constants = config
        .phase_space
        .constants
        .clone()
        .unwrap_or_else(|| PhaseSpaceConstants::calibrated(&weight));
    let problem = ProblemInstance {
        initial: config.initial_history(base)?,
        space,
        weight,
        constants,
        evolution: Arc::new(evolution),
        nonlinearity,
        control,
        growth,
        schedule,
    };
    problem.validate()?;
    Ok(problem)
}

/// `∫_{t0}^t b(sigma, x_i) dsigma` in closed form for analytic removal
/// rates, exactly for the piecewise-linear table.
fn exact_removal_integral(config: &PopulationConfig, base: Option<&Path>, t: f64) -> Result<Vec<f64>> {
    let space = config.space();
    let t0 = config.schedule.t0;
    match &config.evolution.b {
        RemovalSpec::Constant { value } => Ok(space.constant(value * (t - t0))),
        RemovalSpec::Separable { time, space: sp } => {
            let it = time.integral(t0, t);
            Ok(space.nodes().iter().map(|&x| it * sp.eval(x)).collect())
        }
        RemovalSpec::Table { .. } => {
            let (times, rows) = config.removal_table(base)?;
            let mut acc = space.zeros();
            for j in 1..times.len() {
                let (a, c) = (times[j - 1], times[j]);
                if a >= t {
                    break;
                }
                let e = c.min(t);
                let w = (e - a) / (c - a);
                for (i, x) in acc.iter_mut().enumerate() {
                    let (ba, bc) = (rows[j - 1][i], rows[j][i]);
                    let be = ba + w * (bc - ba);
                    *x += 0.5 * (e - a) * (ba + be);
                }
            }
            Ok(acc)
        }
    }
}

/// `u(t, x) = exp(-∫_{t0}^t b(sigma, x) dsigma) psi*(t0, x)` on the uniform
/// grid of step at most `h`, for problems without nonlinearity, control or
/// impulses.
pub fn analytic_decay_oracle(config: &PopulationConfig, base: Option<&Path>, h: f64) -> Result<Trajectory> {
    config.validate()?;
    if !config.inclusion.g.is_zero() {
        return Err(Error::Misuse("decay oracle needs g = 0".into()));
    }
    if config.control(base)?.vertex_count() != 0 {
        return Err(Error::Misuse("decay oracle needs the trivial control set".into()));
    }
    if !config.schedule.times.is_empty() {
        return Err(Error::Misuse("decay oracle needs a schedule without impulses".into()));
    }
    let initial = config.initial_history(base)?;
    let start = initial.current().to_vec();
    let (t0, t_end) = (config.schedule.t0, config.schedule.t_end);
    let n = panel_count(t_end - t0, h);
    let times: Vec<f64> = (0..=n)
        .map(|j| if j == n { t_end } else { t0 + (t_end - t0) * j as f64 / n as f64 })
        .collect();
    let values = times
        .iter()
        .map(|&t| {
            let b = exact_removal_integral(config, base, t)?;
            Ok(b.iter().zip(&start).map(|(b, u)| (-b).exp() * u).collect())
        })
        .collect::<Result<Vec<Vec<f64>>>>()?;
    Trajectory::new(config.space(), initial, vec![Segment { times, values }], Vec::new())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum HypothesisStatus {
    Pass,
    Fail,
    /// Holds for every shipped form and is not sampled.
    Assumed,
    /// Holds only in a restricted sense named in the detail.
    Flagged,
}

impl HypothesisStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            HypothesisStatus::Pass => "pass",
            HypothesisStatus::Fail => "FAIL",
            HypothesisStatus::Assumed => "assumed",
            HypothesisStatus::Flagged => "flagged",
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct HypothesisRow {
    pub id: &'static str,
    pub description: &'static str,
    pub status: HypothesisStatus,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct HypothesisReport {
    pub rows: Vec<HypothesisRow>,
    pub passed: bool,
}

impl HypothesisReport {
    pub fn failures(&self) -> impl Iterator<Item = &HypothesisRow> {
        self.rows.iter().filter(|r| r.status == HypothesisStatus::Fail)
    }
}

/// Sampling plan of [`verify_hypotheses`].
#[derive(Debug, Clone)]
pub struct HypothesisSamples {
    pub count: usize,
    pub seed: u64,
    /// Extra `(v, w)` pairs tested against the control growth bound.
    pub controls: Vec<(Vec<f64>, Vec<f64>)>,
}

impl HypothesisSamples {
    pub fn new(count: usize, seed: u64) -> Self {
        HypothesisSamples {
            count,
            seed,
            controls: Vec::new(),
        }
    }
}

/// Samples every checkable hypothesis on the removal rate, the growth law,
/// the control sets, the impulses and the initial datum.
pub fn verify_hypotheses(config: &PopulationConfig, base: Option<&Path>, samples: &HypothesisSamples) -> Result<HypothesisReport> {
    use HypothesisStatus::*;
    config.validate()?;
    let space = config.space();
    let weight = config.weight()?;
    let (t0, t_end) = (config.schedule.t0, config.schedule.t_end);
    let mut rng = ChaCha8Rng::seed_from_u64(samples.seed);
    let mut rows = Vec::new();
    let mut row = |id, description, status, detail: String| {
        rows.push(HypothesisRow {
            id,
            description,
            status,
            detail,
        })
    };

    row("b1", "removal rate measurable", Assumed, "named forms and tables".into());
    let (times, b) = config.removal_table(base)?;
    let bad: Vec<String> = times
        .iter()
        .zip(&b)
        .flat_map(|(t, r)| {
            r.iter()
                .enumerate()
                .filter(|(_, v)| !(**v > 0.0))
                .map(move |(i, v)| format!("b({t}, x_{i}) = {v}"))
        })
        .take(3)
        .collect();
    // dominating function: the sampled spatial maximum, integrated by trapezoid
    let dom: f64 = times
        .windows(2)
        .zip(b.windows(2))
        .map(|(t, r)| {
            let m0 = r[0].iter().fold(f64::MIN, |a, &x| a.max(x));
            let m1 = r[1].iter().fold(f64::MIN, |a, &x| a.max(x));
            0.5 * (t[1] - t[0]) * (m0 + m1)
        })
        .sum();
    if bad.is_empty() && dom.is_finite() {
        row("b2", "0 < b(t, x) <= s(t) with s integrable", Pass, format!("∫ s = {dom:.6}"));
    } else {
        row("b2", "0 < b(t, x) <= s(t) with s integrable", Fail, format!("not positive: {}", bad.join(", ")));
    }
    row("b3", "removal rate continuous in t", Assumed, "analytic forms, linear interpolation of tables".into());

    let nl = &config.inclusion.g;
    row("g1", "x -> g(t, v(x), q(x)) square integrable", Assumed, "pointwise on the grid".into());
    row("g2", "g measurable in t", Assumed, "shipped forms are time independent".into());
    row("g3", "g continuous in (p, q)", Assumed, "shipped forms are continuous".into());

    let ball = nl.working_ball().unwrap_or(1.0);
    let range = 10.0 * ball.max(1.0);
    match nl.growth_h() {
        Some(h) => {
            let mut worst = (0.0f64, 0.0, 0.0);
            for _ in 0..samples.count {
                let t = rng.gen_range(t0..=t_end);
                let p = rng.gen_range(-range..=range);
                let q = rng.gen_range(-range..=range);
                let g = nl.eval(t, p, q).abs();
                if g > worst.0 {
                    worst = (g, p, q);
                }
            }
            if worst.0 <= h {
                row("g4", "|g(t, p, q)| <= h(t)", Pass, format!("h = {h}, max |g| = {:.6}", worst.0));
            } else {
                row(
                    "g4",
                    "|g(t, p, q)| <= h(t)",
                    Fail,
                    format!("|g| = {:.6} > h = {h} at p = {:.4}, q = {:.4}", worst.0, worst.1, worst.2),
                );
            }
        }
        None => row("g4", "|g(t, p, q)| <= h(t)", Fail, "g is unbounded".into()),
    }

    match nl.lipschitz() {
        Some(lip) => {
            let mut worst: f64 = 0.0;
            let amp = nl.working_ball().unwrap_or(2.0);
            let h_step = config.population.history_step.max(0.01);
            for _ in 0..samples.count.min(200) {
                let t = rng.gen_range(t0..=t_end);
                let v1: Vec<f64> = (0..space.dim()).map(|_| rng.gen_range(-amp..=amp)).collect();
                let v2: Vec<f64> = (0..space.dim()).map(|_| rng.gen_range(-amp..=amp)).collect();
                let a1: Vec<f64> = (0..space.dim()).map(|_| rng.gen_range(-amp..=amp)).collect();
                let a2: Vec<f64> = (0..space.dim()).map(|_| rng.gen_range(-amp..=amp)).collect();
                let h1 = History::from_analytic(space.clone(), weight.tau(), h_step, AnalyticForm::exponential(a1, 1.0))?;
                let h2 = History::from_analytic(space.clone(), weight.tau(), h_step, AnalyticForm::exponential(a2, 1.0))?;
                let lhs = space.distance(&eval_f(nl, t, &v1, &h1)?, &eval_f(nl, t, &v2, &h2)?);
                let diff = History::combine(1.0, &h1, -1.0, &h2)?;
                let rhs = lip * (space.distance(&v1, &v2) + seminorm(&diff, &weight)?);
                if rhs > 0.0 {
                    worst = worst.max(lhs / rhs);
                } else if lhs > 0.0 {
                    worst = f64::INFINITY;
                }
            }
            let status = if worst > 1.0 + 1e-12 {
                Fail
            } else if nl.working_ball().is_some() {
                Flagged
            } else {
                Pass
            };
            let scope = if nl.working_ball().is_some() { ", on the working ball only" } else { "" };
            row("g5", "Lipschitz in (v, phi)", status, format!("q = {lip}, max ratio {worst:.6}{scope}"));
        }
        None => row(
            "g5",
            "Lipschitz in (v, phi)",
            Flagged,
            "no modulus: the memory integral is not controlled by the fading seminorm".into(),
        ),
    }
    let g00 = (0..=16)
        .map(|i| {
            let t = t0 + (t_end - t0) * i as f64 / 16.0;
            space.norm(&space.constant(nl.eval(t, 0.0, 0.0)))
        })
        .fold(0.0, f64::max);
    row(
        "g6",
        "t -> ‖g(t, 0, 0)‖ integrable",
        if g00.is_finite() { Pass } else { Fail },
        format!("sup = {g00}"),
    );

    row("Ω1", "compact convex values", Assumed, "ball, box and polytope shapes".into());
    row("Ω2", "upper semicontinuous", Assumed, "sets depend continuously on v".into());
    row("Ω3", "maps bounded sets to relatively compact sets", Assumed, "finite-dimensional grid".into());
    let omega = config.control(base)?;
    let r = omega.growth_r(&space);
    let mut pairs = Vec::new();
    for _ in 0..samples.count.min(1000) {
        let scale = rng.gen_range(0.0..=10.0);
        let v: Vec<f64> = (0..space.dim()).map(|_| scale * rng.gen_range(-1.0..=1.0)).collect();
        for w in omega.vertices(&space, &v) {
            pairs.push((v.clone(), w));
        }
    }
    pairs.extend(samples.controls.iter().cloned());
    let violation = pairs
        .iter()
        .find(|(v, w)| space.norm(w) > r * (1.0 + space.norm(v)) * (1.0 + 1e-12) + 1e-12);
    match violation {
        None => row("Ω4", "‖Ω(v)‖ <= R (1 + ‖v‖)", Pass, format!("R = {r}, {} pairs", pairs.len())),
        Some((v, w)) => row(
            "Ω4",
            "‖Ω(v)‖ <= R (1 + ‖v‖)",
            Fail,
            format!("‖w‖ = {} > R (1 + ‖v‖) = {}", space.norm(w), r * (1.0 + space.norm(v))),
        ),
    }

    let maps = &config.schedule.impulses;
    if maps.iter().all(ImpulseMap::is_bounded) {
        row("impulses", "impulse maps bounded and continuous", Pass, format!("{} maps", maps.len()));
    } else {
        row(
            "impulses",
            "impulse maps bounded and continuous",
            Flagged,
            "linear maps are bounded only on the a priori ball".into(),
        );
    }

    let initial = config.initial_history(base)?;
    let semi = seminorm(&initial, &weight);
    let needs_memory = nl.uses_memory() || maps.iter().any(ImpulseMap::uses_memory);
    let integrable = !needs_memory || weighted_history_integral(&initial).is_ok();
    match semi {
        Ok(s) if s.is_finite() && integrable => {
            row("initial", "initial history in the phase space", Pass, format!("seminorm {s:.6}"))
        }
        Ok(_) => row("initial", "initial history in the phase space", Fail, "memory integral diverges".into()),
        Err(e) => row("initial", "initial history in the phase space", Fail, e.to_string()),
    }

    let passed = rows.iter().all(|r| r.status != Fail);
    Ok(HypothesisReport { rows, passed })
}

/// The removal rate sampled on the evolution grid, as used by
/// [`build_instance`].
pub fn removal_evolution(config: &PopulationConfig, base: Option<&Path>) -> Result<Arc<dyn EvolutionSystem>> {
    let (times, rows) = config.removal_table(base)?;
    Ok(Arc::new(MultiplicationEvolution::new(times, rows)?))
}
