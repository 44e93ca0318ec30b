//! Reproduction of the reference tables: hierarchical-t bounds against
//! simulation, the pump pipeline, and contracting-normals plans.

use serde::Serialize;

use crate::bounds::{
    combine_mse_bound, optimize_small_set, BoundComponents, C0Variant, Provenance, SqrtVSource,
    DEFAULT_GRID_POINTS,
};
use crate::error::Result;
use crate::models::{
    admissibility_threshold, contracting_exact_plan, hier_t_exact_mse, hier_t_sigma_as_sq,
    ContractingNormals, ContractingNormalsParams, HierT, HierTParams, MomentPolicy, StartLaw,
};
use crate::regen::{estimate_constants, estimate_rmse, EmpiricalConstants, Estimate, EstimationConfig};

pub const TABLE1_T: [u32; 3] = [5, 50, 500];
pub const TABLE_T: u32 = 50;
pub const TABLE3_N: [u64; 7] = [10, 50, 100, 1000, 5000, 10_000, 50_000];
pub const TABLE4_C: f64 = 0.5;
pub const TABLE4_D: f64 = 1.7875;
pub const TABLE4_EPS: f64 = 0.1;
pub const TABLE4_ALPHA: f64 = 0.1;

/// Drift-only bounds for the tables take `pi(V^{1/2})` from its own drift bound.
pub const TABLE_DRIFT_ONLY: MomentPolicy = MomentPolicy::DriftOnly(SqrtVSource::DriftBound);

fn hier_t_sigma_bound(t: u32, a: f64, policy: MomentPolicy) -> f64 {
    HierT::new(HierTParams { t, a })
        .and_then(|m| m.bound_components(policy, C0Variant::SqrtV))
        .map(|c| c.sigma_as())
        .unwrap_or(f64::INFINITY)
}

/// Small-set half-width minimizing the `sigma_as` bound, with the minimum.
pub fn optimal_half_width(t: u32, policy: MomentPolicy, lo: f64, hi: f64) -> Result<(f64, f64)> {
    optimize_small_set(|a| hier_t_sigma_bound(t, a, policy), lo, hi, DEFAULT_GRID_POINTS)
}

fn default_width_range(t: u32) -> (f64, f64) {
    let th = admissibility_threshold(t);
    (th * (1.0 + 1e-6), 12.0_f64.max(6.0 * th))
}

#[derive(Debug, Clone, Serialize)]
pub struct Table1Row {
    pub t: u32,
    pub sigma_as: f64,
    pub a_known: f64,
    pub bound_known: f64,
    pub a_drift: f64,
    pub bound_drift: f64,
}

pub fn table1() -> Result<Vec<Table1Row>> {
    TABLE1_T
        .iter()
        .map(|&t| {
            let (lo, hi) = default_width_range(t);
            let (a_known, bound_known) = optimal_half_width(t, MomentPolicy::KnownPiV, lo, hi)?;
            let (a_drift, bound_drift) = optimal_half_width(t, TABLE_DRIFT_ONLY, lo, hi)?;
            Ok(Table1Row {
                t,
                sigma_as: hier_t_sigma_as_sq(t).sqrt(),
                a_known,
                bound_known,
                a_drift,
                bound_drift,
            })
        })
        .collect()
}

/// Half-width used by Tables 2 and 3: the drift-only optimum for `t = 50`.
pub fn table_half_width() -> Result<f64> {
    let (lo, hi) = default_width_range(TABLE_T);
    Ok(optimal_half_width(TABLE_T, TABLE_DRIFT_ONLY, lo, hi)?.0)
}

pub fn table_model() -> Result<HierT> {
    HierT::new(HierTParams {
        t: TABLE_T,
        a: table_half_width()?,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct Table2 {
    pub a: f64,
    pub known: BoundComponents,
    pub drift: BoundComponents,
    pub empirical: Option<EmpiricalConstants>,
}

/// Bound columns of Table 2; the simulated column when `cfg` is given.
pub fn table2(cfg: Option<&EstimationConfig>, seed: u64) -> Result<Table2> {
    let m = table_model()?;
    let known = m.bound_components(MomentPolicy::KnownPiV, C0Variant::SqrtV)?;
    let drift = m.bound_components(TABLE_DRIFT_ONLY, C0Variant::SqrtV)?;
    let empirical = cfg
        .map(|c| estimate_constants(&m, &0.0, c, seed))
        .transpose()?;
    Ok(Table2 {
        a: m.params.a,
        known,
        drift,
        empirical,
    })
}

/// Column (a): exact `sigma_as` with simulated `C0, C1, C2`.
pub fn true_constants(emp: &EmpiricalConstants) -> BoundComponents {
    BoundComponents {
        sigma_as_sq: hier_t_sigma_as_sq(TABLE_T),
        c0: emp.c0_hat,
        c1: emp.c1_hat,
        c2: emp.c2_hat,
        provenance: Provenance::Empirical,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Table3Row {
    pub n: u64,
    /// `sqrt(n)` times the exact RMSE from `mu_0 = 0`.
    pub exact: f64,
    pub simulated: Option<Estimate>,
    pub col_a: Option<f64>,
    pub col_b: f64,
    pub col_c: f64,
}

/// Replicates per row of the simulated RMSE column, scaled down for long runs.
pub fn table3_replicates(n: u64, base: usize) -> usize {
    let cap = (2e7 / n as f64) as usize;
    base.min(cap).max(100)
}

pub fn table3(t2: &Table2, rmse_replicates: Option<usize>, seed: u64) -> Result<Vec<Table3Row>> {
    let m = HierT::new(HierTParams { t: TABLE_T, a: t2.a })?;
    let col_a_comp = t2.empirical.as_ref().map(true_constants);
    TABLE3_N
        .iter()
        .map(|&n| {
            let rn = (n as f64).sqrt();
            let simulated = rmse_replicates
                .map(|r| estimate_rmse(&m, n, table3_replicates(n, r), &0.0, seed, None))
                .transpose()?
                .map(|e| Estimate {
                    value: e.value * rn,
                    stderr: e.stderr * rn,
                });
            Ok(Table3Row {
                n,
                exact: hier_t_exact_mse(TABLE_T, n, 0.0)?.sqrt() * rn,
                simulated,
                col_a: col_a_comp
                    .as_ref()
                    .map(|c| combine_mse_bound(c, n).map(|b| b * rn))
                    .transpose()?,
                col_b: combine_mse_bound(&t2.known, n)? * rn,
                col_c: combine_mse_bound(&t2.drift, n)? * rn,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct Table4 {
    pub c: f64,
    pub d: f64,
    pub drift_only: u64,
    pub known_pi_v: u64,
    /// Exact plan with `X_0` drawn from the stationary law.
    pub reality: u64,
    /// Exact plan with `X_0 = 0`.
    pub reality_from_zero: u64,
}

/// Chebyshev plans from the bounds at the published half-width, and the
/// exact plans.
pub fn table4() -> Result<Table4> {
    let m = ContractingNormals::new(ContractingNormalsParams {
        c: TABLE4_C,
        d: TABLE4_D,
    })?;
    let drift = m.bound_plan(
        MomentPolicy::DriftOnly(SqrtVSource::JensenFromPiV),
        C0Variant::SqrtV,
        TABLE4_EPS,
        TABLE4_ALPHA,
    )?;
    let known = m.bound_plan(MomentPolicy::KnownPiV, C0Variant::SqrtV, TABLE4_EPS, TABLE4_ALPHA)?;
    Ok(Table4 {
        c: TABLE4_C,
        d: TABLE4_D,
        drift_only: drift.n_min,
        known_pi_v: known.n_min,
        reality: contracting_exact_plan(TABLE4_C, StartLaw::Stationary, TABLE4_EPS, TABLE4_ALPHA)?,
        reality_from_zero: contracting_exact_plan(TABLE4_C, StartLaw::Point(0.0), TABLE4_EPS, TABLE4_ALPHA)?,
    })
}

/// Rounds to `digits` significant digits.
pub fn round_sig(x: f64, digits: i32) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    let e = digits - 1 - x.abs().log10().floor() as i32;
    let s = 10f64.powi(e);
    (x * s).round() / s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table1_analytic_columns() {
        let rows = table1().unwrap();
        let want = [(6.40, 11.89), (2.38, 2.68), (2.00, 2.08)];
        for (r, (k, d)) in rows.iter().zip(want) {
            eprintln!("{r:?}");
            assert_eq!(round_sig(r.bound_known, 3), round_sig(k, 3));
            assert_eq!(round_sig(r.bound_drift, 3), round_sig(d, 3));
        }
    }

    #[test]
    fn table2_and_3_bound_columns() {
        let t2 = table2(None, 0).unwrap();
        assert!((t2.a - 3.9146).abs() < 1e-3, "{}", t2.a);
        assert_eq!(round_sig(t2.known.c0, 4), 1.761);
        assert_eq!(round_sig(t2.drift.c0, 4), 2.025);
        assert_eq!(round_sig(t2.drift.c1, 4), 2.771);
        assert_eq!(round_sig(t2.drift.c2, 4), 3.752);
        let rows = table3(&t2, None, 0).unwrap();
        let b = [4.87, 3.39, 3.08, 2.60, 2.48, 2.45, 2.41];
        let c = [5.29, 3.71, 3.39, 2.89, 2.77, 2.75, 2.71];
        for (r, (b, c)) in rows.iter().zip(b.iter().zip(c)) {
            assert_eq!(round_sig(r.col_b, 3), *b, "n = {}", r.n);
            assert_eq!(round_sig(r.col_c, 3), c, "n = {}", r.n);
        }
    }

    #[test]
    fn rounding() {
        assert_eq!(round_sig(77_673.4, 3), 77_700.0);
        assert_eq!(round_sig(0.0012345, 2), 0.0012);
        assert_eq!(round_sig(-2.675, 2), -2.7);
    }
}
