//! Concrete chains with their drift and minorization constants.

pub mod contracting;
pub mod hier_t;
pub mod pump;
pub mod toy_poly;

use serde::{Deserialize, Serialize};

use crate::bounds::SqrtVSource;

pub use contracting::{
    contracting_exact_plan, contracting_params, ContractingNormals, ContractingNormalsParams, StartLaw,
};
pub use hier_t::{
    admissibility_threshold, hier_t_drift, hier_t_exact_mse, hier_t_minorization, hier_t_sigma_as_sq, HierT,
    HierTParams,
};
pub use pump::{load_pump_data, pump_data_path, PumpData, PumpHyper, PumpModel, PumpState};
pub use toy_poly::{ToyPoly, ToyPolyParams};

/// Which stationary moments feed the bounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MomentPolicy {
    /// Exact stationary moments where the model knows them.
    KnownPiV,
    /// Only the drift condition; `pi(V^{1/2})` from the given source.
    DriftOnly(SqrtVSource),
}
