use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use mildsol::inclusion::ControlMultimap;
use mildsol::optimizer::CostFunctional;
use mildsol::population::{
    digest, EvolutionSection, InclusionSection, PhaseSpaceSection, PopulationConfig, PopulationSection,
    ScheduleSection,
};
use mildsol::solver::SolverConfig;
use mildsol::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizeSection {
    #[serde(flatten)]
    pub cost: CostFunctional,
    pub budget: usize,
}

/// One run: the population problem, the solver settings, the optional
/// optimization request and the sampling seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub seed: u64,
    pub phase_space: PhaseSpaceSection,
    pub evolution: EvolutionSection,
    pub inclusion: InclusionSection,
    pub schedule: ScheduleSection,
    pub population: PopulationSection,
    pub solver: SolverConfig,
    #[serde(default)]
    pub optimize: Option<OptimizeSection>,
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let config: RunConfig = toml::from_str(text).map_err(|e| Error::Config {
            field: "config".into(),
            detail: e.to_string(),
        })?;
        config.validate()?;
        Ok(config)
    }

    /// Reads and validates a configuration; relative paths inside it
    /// resolve against the returned directory.
    pub fn load(path: &Path) -> Result<(Self, PathBuf)> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config {
            field: "config".into(),
            detail: format!("{}: {e}", path.display()),
        })?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok((Self::parse(&text)?, base))
    }

    /// Cross-field checks: window and cutoff, schedule order, solver and
    /// optimizer settings.
    pub fn validate(&self) -> Result<()> {
        self.problem().validate()?;
        self.solver.validate()?;
        if let Some(opt) = &self.optimize {
            if opt.budget == 0 {
                return Err(Error::Config {
                    field: "optimize.budget".into(),
                    detail: "must be at least 1".into(),
                });
            }
        }
        Ok(())
    }

    pub fn problem(&self) -> PopulationConfig {
        PopulationConfig {
            phase_space: self.phase_space.clone(),
            evolution: self.evolution.clone(),
            inclusion: self.inclusion.clone(),
            schedule: self.schedule.clone(),
            population: self.population.clone(),
        }
    }

    /// Hash of every setting that influences the outputs.
    pub fn provenance(&self) -> String {
        digest(&format!("{self:?}"))
    }

    /// `true` when the problem has a closed-form solution to compare with.
    pub fn oracle_eligible(&self, omega: &ControlMultimap) -> bool {
        self.inclusion.g.is_zero() && omega.vertex_count() == 0 && self.schedule.times.is_empty()
    }
}
