//! The multivalued right-hand side `F(t, v, phi) = f(t, v, phi) + Omega(v)`.
//!
//! The single-valued part acts pointwise in space through a scalar map
//! `g(t, p, q)` of the local state `p` and the local memory integral `q`.
//! The control part is a convex multimap; solutions are realized through
//! explicit selection strategies evaluated at solver nodes.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::phase_space::{seminorm, weighted_history_integral, FadingWeight, History};
use crate::profile::Profile;
use crate::space::StateSpace;

const MEMBERSHIP_TOL: f64 = 1e-12;

/// The scalar map `g(t, p, q)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Nonlinearity {
    Zero,
    /// `kappa * q`
    Memory { kappa: f64 },
    /// `a * p`
    Linear { a: f64 },
    /// `-a * p^3`; bounded and Lipschitz only on `|p| <= ball`.
    Cubic { a: f64, ball: f64 },
    /// `rate * p (1 - p)` with `p` clamped to `[0, 1]`.
    Logistic { rate: f64 },
    /// `a * p^2`; bounded only on `|p| <= ball`.
    Square { a: f64, ball: f64 },
}

impl Nonlinearity {
    pub fn eval(&self, _t: f64, p: f64, q: f64) -> f64 {
        match *self {
            Nonlinearity::Zero => 0.0,
            Nonlinearity::Memory { kappa } => kappa * q,
            Nonlinearity::Linear { a } => a * p,
            Nonlinearity::Cubic { a, .. } => -a * p * p * p,
            Nonlinearity::Logistic { rate } => {
                let c = p.clamp(0.0, 1.0);
                rate * c * (1.0 - c)
            }
            Nonlinearity::Square { a, .. } => a * p * p,
        }
    }

    pub fn uses_memory(&self) -> bool {
        matches!(self, Nonlinearity::Memory { kappa } if *kappa != 0.0)
    }

    pub fn is_zero(&self) -> bool {
        match *self {
            Nonlinearity::Zero => true,
            Nonlinearity::Memory { kappa: a }
            | Nonlinearity::Linear { a }
            | Nonlinearity::Cubic { a, .. }
            | Nonlinearity::Square { a, .. }
            | Nonlinearity::Logistic { rate: a } => a == 0.0,
        }
    }

    /// `h` with `|g(t, p, q)| <= h` for all arguments, or on the working
    /// ball for the polynomial forms. `None` when `g` is unbounded.
    pub fn growth_h(&self) -> Option<f64> {
        match *self {
            Nonlinearity::Zero => Some(0.0),
            Nonlinearity::Logistic { rate } => Some(rate.abs() / 4.0),
            Nonlinearity::Cubic { a, ball } => Some(a.abs() * ball.powi(3)),
            Nonlinearity::Square { a, ball } => Some(a.abs() * ball * ball),
            Nonlinearity::Memory { kappa: 0.0 } => Some(0.0),
            Nonlinearity::Linear { a: 0.0 } => Some(0.0),
            Nonlinearity::Memory { .. } | Nonlinearity::Linear { .. } => None,
        }
    }

    /// `a` with `‖f(t, v, phi)‖ <= a (1 + ‖v‖ + ‖phi‖)` on a unit-measure
    /// spatial domain.
    pub fn sublinear_bound(&self) -> Option<f64> {
        match *self {
            Nonlinearity::Linear { a } => Some(a.abs()),
            _ => self.growth_h(),
        }
    }

    /// Lipschitz modulus in `(v, phi)` with respect to the state norm plus
    /// the phase-space seminorm. `None` when no such modulus exists: the
    /// memory integral weighs the remote past more than the fading weight.
    pub fn lipschitz(&self) -> Option<f64> {
        match *self {
            Nonlinearity::Zero => Some(0.0),
            Nonlinearity::Linear { a } => Some(a.abs()),
            Nonlinearity::Logistic { rate } => Some(rate.abs()),
            Nonlinearity::Cubic { a, ball } => Some(3.0 * a.abs() * ball * ball),
            Nonlinearity::Square { a, ball } => Some(2.0 * a.abs() * ball),
            Nonlinearity::Memory { kappa: 0.0 } => Some(0.0),
            Nonlinearity::Memory { .. } => None,
        }
    }

    /// Working ball of the polynomial forms, where their bounds hold.
    pub fn working_ball(&self) -> Option<f64> {
        match *self {
            Nonlinearity::Cubic { ball, .. } | Nonlinearity::Square { ball, .. } => Some(ball),
            _ => None,
        }
    }

    /// `g` applied at every node given the memory integral (ignored when
    /// `g` does not read it).
    pub fn eval_with_memory(&self, t: f64, v: &[f64], memory: Option<&[f64]>) -> Vec<f64> {
        match memory {
            Some(q) => v.iter().zip(q).map(|(p, q)| self.eval(t, *p, *q)).collect(),
            None => v.iter().map(|p| self.eval(t, *p, 0.0)).collect(),
        }
    }
}

/// `f(t, v, phi)(x) = g(t, v(x), ∫_{-inf}^0 phi(theta)(x) dtheta)`
pub fn eval_f(nl: &Nonlinearity, t: f64, v: &[f64], history: &History) -> Result<Vec<f64>> {
    if nl.uses_memory() {
        let q = weighted_history_integral(history)?;
        Ok(nl.eval_with_memory(t, v, Some(&q)))
    } else {
        Ok(nl.eval_with_memory(t, v, None))
    }
}

/// Convex, bounded control sets depending on the current state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum ControlMultimap {
    /// `{w : ‖w‖ <= radius (1 + ‖v‖)}`
    Ball { radius: f64 },
    /// `[-c, c]` at every node. `c = 0` is the trivial set `{0}`.
    Box { c: f64 },
    /// Convex hull of the origin and the given points.
    Finite { vertices: Vec<Vec<f64>> },
}

impl ControlMultimap {
    pub fn trivial() -> Self {
        ControlMultimap::Box { c: 0.0 }
    }

    pub fn validate(&self, space: &StateSpace) -> Result<()> {
        match self {
            ControlMultimap::Ball { radius } if !(*radius >= 0.0) => {
                Err(Error::config("inclusion.omega.radius", "must be >= 0"))
            }
            ControlMultimap::Box { c } if !(*c >= 0.0) => {
                Err(Error::config("inclusion.omega.c", "must be >= 0"))
            }
            ControlMultimap::Finite { vertices } => {
                if let Some(v) = vertices.iter().find(|v| v.len() != space.dim()) {
                    return Err(Error::config(
                        "inclusion.omega.vertices",
                        format!("vertex of dimension {} in a {}-node space", v.len(), space.dim()),
                    ));
                }
                if vertices.iter().flatten().any(|x| !x.is_finite()) {
                    return Err(Error::config("inclusion.omega.vertices", "non-finite entry"));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// Growth constant `R` with `‖w‖ <= R (1 + ‖v‖)` for all members.
    pub fn growth_r(&self, space: &StateSpace) -> f64 {
        match self {
            ControlMultimap::Ball { radius } => *radius,
            ControlMultimap::Box { c } => c * space.unit_norm(),
            ControlMultimap::Finite { vertices } => vertices
                .iter()
                .map(|w| space.norm(w))
                .fold(0.0, f64::max),
        }
    }

    /// Extreme points for the given state, in a fixed order.
    pub fn vertices(&self, space: &StateSpace, v: &[f64]) -> Vec<Vec<f64>> {
        match self {
            ControlMultimap::Ball { radius } => {
                if *radius == 0.0 {
                    return Vec::new();
                }
                let scale = radius * (1.0 + space.norm(v)) / space.unit_norm();
                vec![space.constant(scale), space.constant(-scale)]
            }
            ControlMultimap::Box { c } => {
                if *c == 0.0 {
                    return Vec::new();
                }
                vec![space.constant(*c), space.constant(-c)]
            }
            ControlMultimap::Finite { vertices } => vertices.clone(),
        }
    }

    /// Number of extreme points, independent of the state.
    pub fn vertex_count(&self) -> usize {
        match self {
            ControlMultimap::Ball { radius } if *radius > 0.0 => 2,
            ControlMultimap::Box { c } if *c > 0.0 => 2,
            ControlMultimap::Finite { vertices } => vertices.len(),
            _ => 0,
        }
    }

    /// Distance from `w` to `Omega(v)` in the state norm; zero for members.
    pub fn distance(&self, space: &StateSpace, v: &[f64], w: &[f64]) -> f64 {
        match self {
            ControlMultimap::Ball { radius } => {
                (space.norm(w) - radius * (1.0 + space.norm(v))).max(0.0)
            }
            ControlMultimap::Box { c } => {
                let excess: Vec<f64> = w.iter().map(|x| (x.abs() - c).max(0.0)).collect();
                space.norm(&excess)
            }
            ControlMultimap::Finite { vertices } => hull_distance(space, vertices, w),
        }
    }

    pub fn contains(&self, space: &StateSpace, v: &[f64], w: &[f64]) -> bool {
        self.distance(space, v, w) <= MEMBERSHIP_TOL * (1.0 + space.norm(w))
    }
}

/// Distance to `conv({0} ∪ vertices)` by away-step Frank-Wolfe iterations
/// with exact line search, started from the origin.
fn hull_distance(space: &StateSpace, vertices: &[Vec<f64>], w: &[f64]) -> f64 {
    let n = w.len();
    let dot = |a: &[f64], b: &[f64]| -> f64 {
        a.iter()
            .zip(b)
            .zip(space.weights())
            .map(|((x, y), k)| k * x * y)
            .sum()
    };
    if vertices.iter().any(|p| p.as_slice() == w) || w.iter().all(|x| *x == 0.0) {
        return 0.0;
    }
    let zero = vec![0.0; n];
    let atoms: Vec<&[f64]> = std::iter::once(zero.as_slice())
        .chain(vertices.iter().map(Vec::as_slice))
        .collect();
    let mut lambda = vec![0.0; atoms.len()];
    lambda[0] = 1.0;
    let mut x = vec![0.0; n];
    for _ in 0..20_000 {
        let grad: Vec<f64> = x.iter().zip(w).map(|(a, b)| a - b).collect();
        let scores: Vec<f64> = atoms.iter().map(|a| dot(&grad, a)).collect();
        let fw = (0..atoms.len())
            .min_by(|&i, &j| scores[i].total_cmp(&scores[j]))
            .unwrap();
        let away = (0..atoms.len())
            .filter(|&i| lambda[i] > 0.0)
            .max_by(|&i, &j| scores[i].total_cmp(&scores[j]))
            .unwrap();
        let gx = dot(&grad, &x);
        let gap_fw = gx - scores[fw];
        let gap_away = scores[away] - gx;
        if gap_fw <= 1e-30 {
            break;
        }
        let (d, gamma_max, toward) = if gap_fw >= gap_away {
            let d: Vec<f64> = atoms[fw].iter().zip(&x).map(|(a, b)| a - b).collect();
            (d, 1.0, true)
        } else {
            let d: Vec<f64> = x.iter().zip(atoms[away]).map(|(a, b)| a - b).collect();
            (d, lambda[away] / (1.0 - lambda[away]), false)
        };
        let dd = dot(&d, &d);
        if dd == 0.0 {
            break;
        }
        let gamma = (-dot(&grad, &d) / dd).clamp(0.0, gamma_max);
        for (xi, di) in x.iter_mut().zip(&d) {
            *xi += gamma * di;
        }
        if toward {
            lambda.iter_mut().for_each(|l| *l *= 1.0 - gamma);
            lambda[fw] += gamma;
        } else {
            lambda.iter_mut().for_each(|l| *l *= 1.0 + gamma);
            lambda[away] -= gamma;
            if gamma == gamma_max {
                lambda[away] = 0.0;
            }
        }
    }
    let r: Vec<f64> = x.iter().zip(w).map(|(a, b)| a - b).collect();
    space.norm(&r)
}

/// `{from, control}` row of a feedback table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableEntry {
    pub from: f64,
    pub control: Vec<f64>,
}

/// A rule choosing `w ∈ Omega(v)`, piecewise constant on the solver grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum SelectionStrategy {
    Zero,
    /// The `index`-th extreme point of `Omega(v)`.
    Vertex { index: usize },
    /// Extreme point `high` while `threshold - mean(v) > 0`, else `low`.
    BangBang {
        threshold: f64,
        high: usize,
        low: usize,
    },
    /// Piecewise-constant open-loop control; each entry holds from its
    /// start time until the next one.
    Table { entries: Vec<TableEntry> },
}

impl SelectionStrategy {
    pub fn label(&self) -> String {
        match self {
            SelectionStrategy::Zero => "zero".into(),
            SelectionStrategy::Vertex { index } => format!("vertex[{index}]"),
            SelectionStrategy::BangBang {
                threshold,
                high,
                low,
            } => format!("bang_bang[{threshold};{high}/{low}]"),
            SelectionStrategy::Table { entries } => format!("table[{}]", entries.len()),
        }
    }

    /// `true` when the control does not depend on the state.
    pub fn is_open_loop(&self, omega: &ControlMultimap) -> bool {
        match self {
            SelectionStrategy::Zero | SelectionStrategy::Table { .. } => true,
            SelectionStrategy::Vertex { .. } => !matches!(omega, ControlMultimap::Ball { .. }),
            SelectionStrategy::BangBang { .. } => false,
        }
    }

    /// The raw proposal, before any membership test.
    fn propose(&self, omega: &ControlMultimap, space: &StateSpace, t: f64, v: &[f64]) -> Result<Vec<f64>> {
        let pick = |idx: usize| -> Result<Vec<f64>> {
            let verts = omega.vertices(space, v);
            verts.into_iter().nth(idx).ok_or_else(|| Error::Membership {
                t,
                detail: format!("extreme point {idx} does not exist"),
            })
        };
        match self {
            SelectionStrategy::Zero => Ok(space.zeros()),
            SelectionStrategy::Vertex { index } => pick(*index),
            SelectionStrategy::BangBang {
                threshold,
                high,
                low,
            } => {
                let trigger = threshold - space.integral(v) / space.weights().iter().sum::<f64>();
                pick(if trigger > 0.0 { *high } else { *low })
            }
            SelectionStrategy::Table { entries } => {
                let k = entries.partition_point(|e| e.from <= t);
                if k == 0 {
                    return Ok(space.zeros());
                }
                let w = &entries[k - 1].control;
                if w.len() != space.dim() {
                    return Err(Error::Membership {
                        t,
                        detail: format!("table control of dimension {}", w.len()),
                    });
                }
                Ok(w.clone())
            }
        }
    }
}

/// The strategy's control at `(t, v)`, checked for membership in
/// `Omega(v)`.
pub fn select_control(
    omega: &ControlMultimap,
    strategy: &SelectionStrategy,
    t: f64,
    v: &[f64],
    history: &History,
) -> Result<Vec<f64>> {
    select_on(omega, strategy, history.space(), t, v)
}

pub(crate) fn select_on(
    omega: &ControlMultimap,
    strategy: &SelectionStrategy,
    space: &StateSpace,
    t: f64,
    v: &[f64],
) -> Result<Vec<f64>> {
    let w = strategy.propose(omega, space, t, v)?;
    let dist = omega.distance(space, v, &w);
    if dist > MEMBERSHIP_TOL * (1.0 + space.norm(&w)) {
        return Err(Error::Membership {
            t,
            detail: format!("{} is at distance {dist:e} from the set", strategy.label()),
        });
    }
    Ok(w)
}

/// The selection of `F` realized by `strategy`: `f(t, v, phi) + w`.
pub fn rhs_selection(
    nl: &Nonlinearity,
    omega: &ControlMultimap,
    strategy: &SelectionStrategy,
    t: f64,
    v: &[f64],
    history: &History,
) -> Result<Vec<f64>> {
    let mut f = eval_f(nl, t, v, history)?;
    let w = select_control(omega, strategy, t, v, history)?;
    for (a, b) in f.iter_mut().zip(&w) {
        *a += b;
    }
    Ok(f)
}

/// `alpha` for the sublinear growth bound, with the compactness modulus
/// kept as metadata only.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthData {
    pub alpha: Profile,
    #[serde(default)]
    pub mu: Option<Profile>,
}

impl GrowthData {
    /// `alpha = h + R` from the shipped forms; `None` when `g` has no
    /// sublinear bound.
    pub fn derived(nl: &Nonlinearity, omega: &ControlMultimap, space: &StateSpace) -> Option<Self> {
        let a = nl.sublinear_bound()?;
        Some(GrowthData {
            alpha: Profile::constant(a + omega.growth_r(space)),
            mu: None,
        })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct GrowthRow {
    pub t: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub ok: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct GrowthReport {
    pub rows: Vec<GrowthRow>,
    pub passed: bool,
}

/// `‖f + w‖ <= alpha(t) (1 + ‖v‖ + ‖phi‖)` at each `(t, v, phi)` sample.
pub fn check_f3(
    nl: &Nonlinearity,
    omega: &ControlMultimap,
    strategy: &SelectionStrategy,
    growth: &GrowthData,
    weight: &FadingWeight,
    samples: &[(f64, Vec<f64>, History)],
) -> Result<GrowthReport> {
    let mut rows = Vec::with_capacity(samples.len());
    for (t, v, hist) in samples {
        let space = hist.space();
        let lhs = space.norm(&rhs_selection(nl, omega, strategy, *t, v, hist)?);
        let rhs = growth.alpha.eval(*t) * (1.0 + space.norm(v) + seminorm(hist, weight)?);
        rows.push(GrowthRow {
            t: *t,
            lhs,
            rhs,
            ok: lhs <= rhs * (1.0 + 1e-12) + 1e-14,
        });
    }
    let passed = rows.iter().all(|r| r.ok);
    Ok(GrowthReport { rows, passed })
}

/// Deterministic finite family of strategies: the zero selection, every
/// extreme point, then the two threshold switches between the first and
/// last extreme points, truncated to `budget`.
pub fn enumerate_selections(omega: &ControlMultimap, budget: usize) -> Result<Vec<SelectionStrategy>> {
    if budget == 0 {
        return Err(Error::config("optimize.budget", "must be at least 1"));
    }
    let k = omega.vertex_count();
    let mut out = vec![SelectionStrategy::Zero];
    out.extend((0..k).map(|index| SelectionStrategy::Vertex { index }));
    if k >= 2 {
        out.push(SelectionStrategy::BangBang {
            threshold: 0.0,
            high: 0,
            low: k - 1,
        });
        out.push(SelectionStrategy::BangBang {
            threshold: 0.0,
            high: k - 1,
            low: 0,
        });
    }
    out.truncate(budget);
    Ok(out)
}
