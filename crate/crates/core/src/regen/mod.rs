//! Split-chain simulation with retrospective regeneration and empirical
//! estimation of the MSE constants.

mod diagnostics;
mod estimate;
mod export;
mod model;
mod split;

pub use diagnostics::{
    block_lag1_check, kac_check, lemma_check, marginal_law_battery, regeneration_rate_check,
    KsResult, ZCheck,
};
pub use estimate::{
    estimate_c0, estimate_c1_c2, estimate_constants, estimate_rmse, estimate_sigma_as,
    plain_states_at, EmpiricalConstants, Estimate, EstimationConfig, FirstTourConstants,
    SigmaEstimate, DEFAULT_MIN_BLOCKS,
};
pub use export::{constants_json, write_trajectory_csv};
pub use model::{SplitChainModel, BELL_SLACK};
pub use split::{
    collect_tours, simulate_split, Block, RegenerationRecord, SplitWalker, Tour, TourConfig,
    TourSample,
};

/// Stream-id families. Replicate or chain `r` of a task uses `FAMILY + r`,
/// so tasks never share random numbers and results do not depend on
/// scheduling.
pub mod streams {
    pub const TRAJECTORY: u64 = 0;
    pub const TOURS: u64 = 1 << 56;
    pub const FIRST_TOUR: u64 = 2 << 56;
    pub const RMSE: u64 = 3 << 56;
    pub const PLAIN: u64 = 4 << 56;
    pub const SPLIT_MARGINAL: u64 = 5 << 56;
    pub const SANITY: u64 = 6 << 56;
}
