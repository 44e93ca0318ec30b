//! One-dimensional minimization: golden-section search and a grid pre-scan
//! for objectives that are not unimodal on the whole range.

use crate::error::{Error, Result};

const INV_PHI: f64 = 0.618_033_988_749_894_9;
const MAX_GOLDEN_ITER: usize = 500;

/// Golden-section search for a local minimizer of `f` on `[lo, hi]`.
///
/// For unimodal `f` the returned point is within `tol` of the minimizer.
pub fn golden_min<F>(f: F, lo: f64, hi: f64, tol: f64) -> Result<(f64, f64)>
where
    F: Fn(f64) -> f64,
{
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::InvalidInput(format!(
            "golden_min needs a finite interval with lo < hi, got [{lo}, {hi}]"
        )));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidInput(format!("tolerance must be positive, got {tol}")));
    }
    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    let mut iter = 0;
    while (b - a) > 2.0 * tol {
        iter += 1;
        if iter > MAX_GOLDEN_ITER {
            return Err(Error::Convergence {
                routine: "golden_min",
                iterations: MAX_GOLDEN_ITER,
            });
        }
        // NaN compares false, so a NaN probe is treated as the larger value
        if fc < fd || fd.is_nan() {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    let fx = f(x);
    // the midpoint can be marginally worse than the last probes
    let best = [(x, fx), (c, fc), (d, fd)]
        .into_iter()
        .filter(|(_, v)| v.is_finite())
        .min_by(|p, q| p.1.total_cmp(&q.1));
    best.ok_or_else(|| Error::OptimizationFailed("objective is not finite near the minimizer".into()))
}

/// Coarse grid scan over `[lo, hi]` with `points` nodes followed by
/// golden-section refinement around the best node.
pub fn grid_then_golden<F>(f: F, lo: f64, hi: f64, points: usize, tol: f64) -> Result<(f64, f64)>
where
    F: Fn(f64) -> f64,
{
    if !(lo <= hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::InvalidInput(format!("invalid range [{lo}, {hi}]")));
    }
    if lo == hi {
        let v = f(lo);
        return if v.is_finite() {
            Ok((lo, v))
        } else {
            Err(Error::OptimizationFailed("objective not finite at the single point".into()))
        };
    }
    let points = points.max(3);
    let step = (hi - lo) / (points - 1) as f64;
    let node = |i: usize| if i == points - 1 { hi } else { lo + step * i as f64 };
    let best = (0..points)
        .map(|i| (i, f(node(i))))
        .filter(|(_, v)| v.is_finite())
        .min_by(|p, q| p.1.total_cmp(&q.1));
    let Some((i, grid_value)) = best else {
        return Err(Error::OptimizationFailed(
            "objective is not finite anywhere on the grid".into(),
        ));
    };
    let a = node(i.saturating_sub(1));
    let b = node((i + 1).min(points - 1));
    let (x, v) = golden_min(&f, a, b, tol)?;
    if v <= grid_value {
        Ok((x, v))
    } else {
        Ok((node(i), grid_value))
    }
}
