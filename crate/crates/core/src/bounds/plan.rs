//! Turning the constants into an RMSE bound, a simulation length, or an
//! optimized small set.

use super::types::{BoundComponents, ConfidencePlan};
use crate::error::{ensure_finite, Error, Result};
use crate::numerics::grid_then_golden;

pub const DEFAULT_CEILING: u64 = 1_000_000_000_000;
pub const DEFAULT_GRID_POINTS: usize = 400;
pub const SMALL_SET_TOL: f64 = 1e-4;

/// Upper bound on the root-MSE of the ergodic average after `n` steps.
pub fn combine_mse_bound(comp: &BoundComponents, n: u64) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidInput("n must be at least 1".into()));
    }
    for (name, v) in [
        ("sigma_as_sq", comp.sigma_as_sq),
        ("c0", comp.c0),
        ("c1", comp.c1),
        ("c2", comp.c2),
    ] {
        ensure_finite(name, v)?;
        if v < 0.0 {
            return Err(Error::InvalidInput(format!("{name} = {v} is negative")));
        }
    }
    let n = n as f64;
    Ok(comp.sigma_as_sq.sqrt() / n.sqrt() * (1.0 + comp.c0 / n) + (comp.c1 + comp.c2) / n)
}

/// Least `n` with `bound_fn(n)^2 <= epsilon^2 alpha_conf`, by doubling then
/// integer bisection. `bound_fn` must be nonincreasing once it qualifies.
pub fn confidence_plan<F>(bound_fn: F, epsilon: f64, alpha_conf: f64, ceiling: u64) -> Result<ConfidencePlan>
where
    F: Fn(u64) -> f64,
{
    if !(epsilon > 0.0) || !epsilon.is_finite() {
        return Err(Error::InvalidParameter {
            name: "epsilon",
            value: epsilon,
            reason: "must be positive",
        });
    }
    if !(alpha_conf > 0.0 && alpha_conf < 1.0) {
        return Err(Error::InvalidParameter {
            name: "alpha_conf",
            value: alpha_conf,
            reason: "must lie in (0, 1)",
        });
    }
    let target = epsilon * epsilon * alpha_conf;
    let ok = |n: u64| {
        let b = bound_fn(n);
        b.is_finite() && b * b <= target
    };
    let plan = |n_min| ConfidencePlan {
        epsilon,
        alpha_conf,
        n_min,
    };
    if ok(1) {
        return Ok(plan(1));
    }
    let mut lo = 1u64; // fails
    let mut hi = 2u64;
    loop {
        if hi > ceiling {
            if ok(ceiling) {
                hi = ceiling;
                break;
            }
            return Err(Error::InfeasibleWithinCeiling { ceiling });
        }
        if ok(hi) {
            break;
        }
        lo = hi;
        hi = hi.saturating_mul(2);
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if ok(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(plan(hi))
}

/// Minimizes `objective` over a small-set width in `[lo, hi]` by a grid scan
/// followed by golden-section refinement. Widths where the objective is not
/// finite (inadmissible small sets) are skipped.
pub fn optimize_small_set<F>(objective: F, lo: f64, hi: f64, grid_points: usize) -> Result<(f64, f64)>
where
    F: Fn(f64) -> f64,
{
    grid_then_golden(objective, lo, hi, grid_points, SMALL_SET_TOL)
}
