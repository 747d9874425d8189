//! The fading-memory phase space: histories made of a piecewise-continuous
//! recent window on `[-tau, 0]` and a weighted-integrable tail, with their
//! seminorm and numerical checks of the phase-space axioms.

mod checks;
mod extract;
mod history;
mod samples;
mod seminorm;
mod weight;

pub use checks::{
    check_b3, check_b4, check_continuity_proxy, B3Report, B3Row, B4Report, ContinuityReport,
    ContinuityRow,
};
pub use extract::history_at;
pub use history::{AnalyticForm, Beyond, History, TailMode, TailRepresentation};
pub use samples::{Jump, RecentSegment, Samples, SamplesBuilder};
pub use seminorm::{
    memory_integral_with_bound, seminorm, seminorm_recent, seminorm_tail,
    weighted_history_integral, TailSeminorm,
};
pub use weight::{check_fading, fading_rtol, FadingReport, FadingRow, FadingWeight, PhaseSpaceConstants};
pub(crate) use samples::panel_count;
