//! Merit-based sortition.
//!
//! Participants carry an exponential moving average of their quality. Each
//! epoch the top `n_act` averages form the active set; inactive participants
//! are nudged toward a percentile of the active set's scores so they can
//! eventually earn a seat, and active participants that skip an epoch are
//! pushed below the worst score.
//!
//! * [`engine`]: the selection algorithm itself, pure over explicit state.
//! * [`population`]: a synthetic participant pool with arrivals and departures.
//! * [`experiments`]: merit vs. random runs, correlations, z-scores and the
//!   percentile sweep.
//! * [`presets`]: bundled scenarios.

pub mod engine;
pub mod error;
pub mod experiments;
pub mod population;
pub mod presets;
pub mod rng;
pub mod stats;
pub mod types;

pub use engine::{apply_targets, compute_targets, ema_update, initial_state, select_active, step};
pub use error::{Result, SortitionError};
pub use experiments::{
    activity_quality_correlation, percentile_sweep, percentile_sweep_seeds, run_paired,
    run_scenario, run_scenario_traced, z_score, EpochRecord, RunSummary, ScenarioConfig,
    SelectionMode, SweepPoint, Trace,
};
pub use population::{Population, SimConfig, SimParticipant};
pub use stats::percentile;
pub use types::{
    EpochContributions, ParticipantId, ParticipantState, SortitionParams, SystemState,
};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
