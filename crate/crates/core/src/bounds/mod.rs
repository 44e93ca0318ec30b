//! Explicit upper bounds on the constants of the MSE inequality
//!
//! `sqrt(MSE) <= sigma_as / sqrt(n) (1 + C0 / n) + C1 / n + C2 / n`
//!
//! under geometric or polynomial drift, plus confidence planning.

mod geometric;
mod plan;
mod polynomial;
mod types;

pub use geometric::{
    fbar_norm_bound as geo_fbar_norm_bound, geo_bounds, geo_c0, geo_c1_sq_unit, geo_c2_sq_unit,
    geo_complementary, geo_sigma_sq_unit, pi_sqrt_v_drift_bound, pi_v_drift_bound,
    xi_pn_sqrt_v_cap, xi_pn_v_cap, C0Variant,
};
pub use plan::{
    combine_mse_bound, confidence_plan, optimize_small_set, DEFAULT_CEILING, DEFAULT_GRID_POINTS,
    SMALL_SET_TOL,
};
pub use polynomial::{
    fbar_norm_bound as poly_fbar_norm_bound, nu_pn_v_eta_bound, pi_j_lower, pi_v_eta_bound,
    poly_bounds, poly_c0, poly_c1_sq_unit, poly_c2_sq_unit, poly_complementary, poly_fill_all,
    poly_sigma_sq_unit, required_pi_exponents, required_xi_exponents,
};
pub use types::{
    BoundComponents, ConfidencePlan, GeometricDriftParams, MomentInputs, PolynomialDriftParams,
    Provenance, SqrtVSource,
};
