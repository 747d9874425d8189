//! Finite samples of the solution set and cost optimization over them.
//!
//! The family is built from the enumerated selections of the control set.
//! Every member is solved, certified against its own `h/2` run, and kept
//! only when certified. The optimum reported is the optimum over the
//! sample, which bounds the optimum over all mild solutions.

use std::fmt::Write as _;

use log::{info, warn};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::inclusion::{enumerate_selections, SelectionStrategy};
use crate::solver::{certify, solve, Certificate, ProblemInstance, SolverConfig, Trajectory};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CostKind {
    /// `‖y(T)‖²`
    TerminalNorm,
    /// `∫ ‖y(t)‖² dt` by the trapezoid rule on the solver nodes.
    Energy,
    /// `∫_0^1 y(T, x) dx`
    TerminalMass,
    /// `Σ w_i ‖y(t_i)‖²` with left limits at the listed times.
    Custom { points: Vec<(f64, f64)> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    #[default]
    Minimize,
    Maximize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostFunctional {
    #[serde(flatten)]
    pub kind: CostKind,
    #[serde(default)]
    pub direction: Direction,
}

impl CostFunctional {
    pub fn minimize(kind: CostKind) -> Self {
        CostFunctional {
            kind,
            direction: Direction::Minimize,
        }
    }

    pub fn maximize(kind: CostKind) -> Self {
        CostFunctional {
            kind,
            direction: Direction::Maximize,
        }
    }

    /// `false` for user point evaluations, whose semicontinuity along the
    /// trajectory space is not checked.
    pub fn is_validated(&self) -> bool {
        !matches!(self.kind, CostKind::Custom { .. })
    }

    pub fn name(&self) -> &'static str {
        match self.kind {
            CostKind::TerminalNorm => "terminal_norm",
            CostKind::Energy => "energy",
            CostKind::TerminalMass => "terminal_mass",
            CostKind::Custom { .. } => "custom",
        }
    }
}

pub fn evaluate_cost(cost: &CostFunctional, traj: &Trajectory) -> Result<f64> {
    let space = traj.space();
    match &cost.kind {
        CostKind::TerminalNorm => Ok(space.norm(traj.final_value()).powi(2)),
        CostKind::TerminalMass => Ok(space.integral(traj.final_value())),
        CostKind::Energy => Ok(traj
            .segments()
            .iter()
            .map(|seg| {
                seg.times
                    .windows(2)
                    .zip(seg.values.windows(2))
                    .map(|(t, v)| 0.5 * (t[1] - t[0]) * (space.norm(&v[0]).powi(2) + space.norm(&v[1]).powi(2)))
                    .sum::<f64>()
            })
            .sum()),
        CostKind::Custom { points } => points
            .iter()
            .map(|&(t, w)| Ok(w * space.norm(&traj.eval_left(t)?).powi(2)))
            .sum(),
    }
}

#[derive(Debug, Clone)]
pub struct FamilyEntry {
    /// Position in the selection enumeration.
    pub id: usize,
    pub selection: SelectionStrategy,
    pub trajectory: Trajectory,
    pub residual: f64,
    pub certificate: Certificate,
    pub cost: f64,
}

/// A selection dropped from the family, with the reason.
#[derive(Debug, Clone, Serialize)]
pub struct Discarded {
    pub id: usize,
    pub label: String,
    pub reason: String,
}

#[derive(Debug, Clone)]
pub struct SolutionFamily {
    pub entries: Vec<FamilyEntry>,
    pub discarded: Vec<Discarded>,
    /// Cost used for the `cost` column.
    pub cost: CostFunctional,
    /// Hash of the configuration the family was built from.
    pub provenance: String,
}

impl SolutionFamily {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

fn run_member(problem: &ProblemInstance, selection: &SelectionStrategy, cfg: &SolverConfig) -> Result<(Trajectory, f64, Certificate)> {
    let solution = solve(problem, selection, cfg)?;
    let certificate = certify(&solution, problem, selection, cfg)?;
    Ok((solution.trajectory, solution.residual, certificate))
}

/// Solves every enumerated selection up to `budget`, in parallel, and
/// keeps the certified runs in enumeration order.
pub fn sample_solution_set(
    problem: &ProblemInstance,
    budget: usize,
    cfg: &SolverConfig,
    cost: &CostFunctional,
    provenance: &str,
) -> Result<SolutionFamily> {
    cfg.validate()?;
    let selections = enumerate_selections(&problem.control, budget)?;
    let runs: Vec<Result<(Trajectory, f64, Certificate)>> = selections
        .par_iter()
        .map(|s| run_member(problem, s, cfg))
        .collect();

    let mut entries = Vec::new();
    let mut discarded = Vec::new();
    for (id, (selection, run)) in selections.into_iter().zip(runs).enumerate() {
        let reason = match run {
            Ok((trajectory, residual, certificate)) if certificate.passed => {
                let value = evaluate_cost(cost, &trajectory)?;
                entries.push(FamilyEntry {
                    id,
                    selection,
                    trajectory,
                    residual,
                    certificate,
                    cost: value,
                });
                continue;
            }
            Ok((_, residual, certificate)) => format!(
                "not certified: residual {residual:e} above threshold {:e}",
                certificate.threshold
            ),
            Err(e) => e.to_string(),
        };
        warn!("selection {id} ({}) discarded: {reason}", selection.label());
        discarded.push(Discarded {
            id,
            label: selection.label(),
            reason,
        });
    }
    if entries.is_empty() {
        return Err(Error::EmptyFamily(format!("all {} selections were discarded", discarded.len())));
    }
    info!("solution family: {} certified, {} discarded", entries.len(), discarded.len());
    Ok(SolutionFamily {
        entries,
        discarded,
        cost: cost.clone(),
        provenance: provenance.to_string(),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct CostRow {
    pub id: usize,
    pub label: String,
    pub cost: Option<f64>,
    pub residual: Option<f64>,
    pub converged: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct OptimizationReport {
    pub functional: String,
    pub direction: Direction,
    /// `false` for functionals whose semicontinuity is not checked.
    pub validated: bool,
    /// Index of the best entry in the family.
    pub best: usize,
    pub best_id: usize,
    pub best_cost: f64,
    /// Certified rows and discarded rows, by selection id.
    pub rows: Vec<CostRow>,
    pub provenance: String,
}

/// Best entry of the family for `cost`, with the full cost table. Costs
/// are re-evaluated; ties go to the lowest selection id.
pub fn optimize(family: &SolutionFamily, cost: &CostFunctional) -> Result<OptimizationReport> {
    if family.is_empty() {
        return Err(Error::EmptyFamily("nothing to optimize over".into()));
    }
    let costs = family
        .entries
        .iter()
        .map(|e| evaluate_cost(cost, &e.trajectory))
        .collect::<Result<Vec<f64>>>()?;
    let mut best = 0;
    for (i, &c) in costs.iter().enumerate().skip(1) {
        let better = match cost.direction {
            Direction::Minimize => c < costs[best],
            Direction::Maximize => c > costs[best],
        };
        if better {
            best = i;
        }
    }
    let mut rows: Vec<CostRow> = family
        .entries
        .iter()
        .zip(&costs)
        .map(|(e, &c)| CostRow {
            id: e.id,
            label: e.selection.label(),
            cost: Some(c),
            residual: Some(e.residual),
            converged: true,
        })
        .chain(family.discarded.iter().map(|d| CostRow {
            id: d.id,
            label: d.label.clone(),
            cost: None,
            residual: None,
            converged: false,
        }))
        .collect();
    rows.sort_by_key(|r| r.id);
    Ok(OptimizationReport {
        functional: cost.name().to_string(),
        direction: cost.direction,
        validated: cost.is_validated(),
        best,
        best_id: family.entries[best].id,
        best_cost: costs[best],
        rows,
        provenance: family.provenance.clone(),
    })
}

fn cell(x: Option<f64>) -> String {
    x.map_or_else(|| "-".to_string(), |v| format!("{v:.12e}"))
}

impl OptimizationReport {
    /// Aligned text table followed by the best-entry block.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let width = self.rows.iter().map(|r| r.label.len()).max().unwrap_or(5).max(9);
        writeln!(out, "{:>3}  {:<width$}  {:>19}  {:>19}  converged", "id", "selection", "cost", "residual").unwrap();
        for r in &self.rows {
            writeln!(
                out,
                "{:>3}  {:<width$}  {:>19}  {:>19}  {}",
                r.id,
                r.label,
                cell(r.cost),
                cell(r.residual),
                if r.converged { "yes" } else { "no" }
            )
            .unwrap();
        }
        let best = self.rows.iter().find(|r| r.id == self.best_id).expect("best row present");
        writeln!(out).unwrap();
        writeln!(out, "best").unwrap();
        writeln!(out, "  functional = {}", self.functional).unwrap();
        let dir = match self.direction {
            Direction::Minimize => "minimize",
            Direction::Maximize => "maximize",
        };
        writeln!(out, "  direction  = {dir}").unwrap();
        writeln!(out, "  id         = {}", self.best_id).unwrap();
        writeln!(out, "  selection  = {}", best.label).unwrap();
        writeln!(out, "  cost       = {:.12e}", self.best_cost).unwrap();
        writeln!(out, "  scope      = optimum over the certified sample only").unwrap();
        if !self.validated {
            writeln!(out, "  warning    = functional not validated as lower semicontinuous").unwrap();
        }
        writeln!(out, "  provenance = {}", self.provenance).unwrap();
        out
    }

    /// `id,selection,cost,residual,converged` rows.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("id,selection,cost,residual,converged\n");
        for r in &self.rows {
            let num = |x: Option<f64>| x.map_or_else(String::new, |v| format!("{v:.17e}"));
            writeln!(out, "{},{},{},{},{}", r.id, r.label, num(r.cost), num(r.residual), r.converged).unwrap();
        }
        out
    }
}
