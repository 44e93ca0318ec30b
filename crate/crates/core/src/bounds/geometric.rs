//! Bounds for chains satisfying a geometric drift condition.

use serde::{Deserialize, Serialize};

use super::types::{BoundComponents, GeometricDriftParams, MomentInputs, Provenance, SqrtVSource};
use crate::error::{Error, Result};

/// Which stationary moment the `C0` bound is written in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum C0Variant {
    /// Uses `pi(V)`.
    V,
    /// Uses `pi(V^{1/2})`; usually the tighter of the two.
    #[default]
    SqrtV,
}

/// `pi(V) <= (K - lambda) / (1 - lambda)`.
pub fn pi_v_drift_bound(p: &GeometricDriftParams) -> f64 {
    (p.k - p.lambda) / (1.0 - p.lambda)
}

/// `pi(V^{1/2}) <= (K^{1/2} - lambda^{1/2}) / (1 - lambda^{1/2})`.
pub fn pi_sqrt_v_drift_bound(p: &GeometricDriftParams) -> f64 {
    (p.sqrt_k() - p.sqrt_lambda()) / (1.0 - p.sqrt_lambda())
}

/// Invariant level for `xi P^n (V)` once the start is below it.
pub fn xi_pn_v_cap(p: &GeometricDriftParams) -> f64 {
    p.k / (1.0 - p.lambda)
}

pub fn xi_pn_sqrt_v_cap(p: &GeometricDriftParams) -> f64 {
    p.sqrt_k() / (1.0 - p.sqrt_lambda())
}

/// `||fbar||_{V^{1/2}}` from `||f||_{V^{1/2}}` and the infimum of `V`.
pub fn fbar_norm_bound(p: &GeometricDriftParams, f_norm: f64, inf_v: f64) -> f64 {
    f_norm * (1.0 + pi_sqrt_v_drift_bound(p) / inf_v.sqrt())
}

/// Fills every moment the geometric bounds need that the caller left out.
///
/// A caller-supplied `pi_V` always wins; `pi(V^{1/2})` then defaults to its
/// Jensen bound `sqrt(pi_V)`. Without `pi_V`, `sqrt_source` decides how
/// `pi(V^{1/2})` is bounded. The `xi P^n` caps are applied only when the
/// start moments sit below them.
pub fn geo_complementary(
    p: &GeometricDriftParams,
    partial: &MomentInputs,
    sqrt_source: SqrtVSource,
) -> Result<MomentInputs> {
    p.validate()?;
    partial.validate()?;
    let mut m = partial.clone();
    if m.pi_v.is_none() && m.pi_sqrt_v.is_some() {
        // supplied pi(V^{1/2}) stays; only pi(V) gets bounded
        m.pi_v_is_bound = true;
    }

    if m.pi_v.is_none() {
        m.pi_v = Some(pi_v_drift_bound(p));
        m.pi_v_is_bound = true;
    }
    if m.pi_sqrt_v.is_none() {
        let pi_v = m.pi_v.unwrap_or_default();
        m.pi_sqrt_v = Some(if !m.pi_v_is_bound {
            pi_v.sqrt()
        } else {
            match sqrt_source {
                SqrtVSource::DriftBound => pi_sqrt_v_drift_bound(p),
                SqrtVSource::JensenFromPiV => pi_v.sqrt(),
            }
        });
    }

    if m.xi_v.is_none() {
        m.xi_v = m.xi_v_value();
    }
    if m.xi_sqrt_v.is_none() {
        m.xi_sqrt_v = m.xi_sqrt_v_value();
    }
    if m.xi_pn_v.is_none() {
        if let Some(xv) = m.xi_v {
            if xv <= xi_pn_v_cap(p) {
                m.xi_pn_v = Some(xi_pn_v_cap(p));
            }
        }
    }
    if m.xi_pn_sqrt_v.is_none() {
        if let Some(xs) = m.xi_sqrt_v {
            if xs <= xi_pn_sqrt_v_cap(p) {
                m.xi_pn_sqrt_v = Some(xi_pn_sqrt_v_cap(p));
            }
        }
    }

    if m.fbar_norm.is_none() {
        if let Some(f) = m.f_norm {
            m.fbar_norm = Some(fbar_norm_bound(p, f, m.inf_v));
        }
    }
    Ok(m)
}

fn need(v: Option<f64>, quantity: &str, formula: &'static str) -> Result<f64> {
    v.ok_or_else(|| Error::MomentUnavailable {
        quantity: quantity.to_string(),
        formula,
    })
}

/// `C0` bound.
pub fn geo_c0(p: &GeometricDriftParams, m: &MomentInputs, variant: C0Variant) -> Result<f64> {
    let (l, k, b) = (p.lambda, p.k, p.beta);
    let (sl, sk) = (p.sqrt_lambda(), p.sqrt_k());
    let c0 = match variant {
        C0Variant::V => {
            let pi_v = need(m.pi_v, "pi(V)", "C0 bound (pi(V) form)")?;
            l / (1.0 - l) * pi_v + (k - l - b) / (b * (1.0 - l)) + 0.5
        }
        C0Variant::SqrtV => {
            let pi_s = need(m.pi_sqrt_v, "pi(V^1/2)", "C0 bound (pi(V^1/2) form)")?;
            sl / (1.0 - sl) * pi_s + (sk - sl - b) / (b * (1.0 - sl)) + 0.5
        }
    };
    Ok(c0.max(0.0))
}

/// `sigma_as^2 / ||fbar||^2` bound.
pub fn geo_sigma_sq_unit(p: &GeometricDriftParams, m: &MomentInputs) -> Result<f64> {
    let b = p.beta;
    let (sl, sk) = (p.sqrt_lambda(), p.sqrt_k());
    let pi_v = need(m.pi_v, "pi(V)", "asymptotic variance bound")?;
    let pi_s = need(m.pi_sqrt_v, "pi(V^1/2)", "asymptotic variance bound")?;
    Ok((1.0 + sl) / (1.0 - sl) * pi_v + 2.0 * (sk - sl - b) / (b * (1.0 - sl)) * pi_s)
}

/// Right side of the first-tour second-moment bound, in units of `||fbar||^2`,
/// for an initial law with moments `v` and `sqrt_v`.
fn tour_moment_unit(p: &GeometricDriftParams, v: f64, sqrt_v: f64) -> f64 {
    let (l, k, b) = (p.lambda, p.k, p.beta);
    let (sl, sk) = (p.sqrt_lambda(), p.sqrt_k());
    let g = sk - sl - b;
    let one_m = (1.0 - sl) * (1.0 - sl);
    v / one_m + 2.0 * g / (b * one_m) * sqrt_v + (b * (k - l - b) + 2.0 * g * g) / (b * b * one_m)
}

pub fn geo_c1_sq_unit(p: &GeometricDriftParams, m: &MomentInputs) -> Result<f64> {
    let v = need(m.xi_v_value(), "xi(V)", "C1 bound")?;
    let s = need(m.xi_sqrt_v_value(), "xi(V^1/2)", "C1 bound")?;
    Ok(tour_moment_unit(p, v, s))
}

pub fn geo_c2_sq_unit(p: &GeometricDriftParams, m: &MomentInputs) -> Result<f64> {
    let v = need(m.xi_pn_v, "xi P^n (V)", "C2 bound")?;
    let s = need(m.xi_pn_sqrt_v, "xi P^n (V^1/2)", "C2 bound")?;
    Ok(tour_moment_unit(p, v, s))
}

/// All four bounds from a complete set of moments.
///
/// `C2` uses the `xi P^n` moments in `m`; with the invariant caps filled in
/// by [`geo_complementary`] it does not depend on `n`.
pub fn geo_bounds(
    p: &GeometricDriftParams,
    m: &MomentInputs,
    c0_variant: C0Variant,
) -> Result<BoundComponents> {
    p.validate()?;
    m.validate()?;
    let fbar = need(m.fbar_norm, "||fbar||_{V^1/2}", "asymptotic variance bound")?;
    let c0 = geo_c0(p, m, c0_variant)?;
    let sigma_as_sq = fbar * fbar * geo_sigma_sq_unit(p, m)?.max(0.0);
    let c1 = fbar * geo_c1_sq_unit(p, m)?.max(0.0).sqrt();
    let c2 = fbar * geo_c2_sq_unit(p, m)?.max(0.0).sqrt();
    Ok(BoundComponents {
        sigma_as_sq,
        c0,
        c1,
        c2,
        provenance: if m.pi_v_is_bound {
            Provenance::DriftOnly
        } else {
            Provenance::KnownPiV
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pump() -> GeometricDriftParams {
        GeometricDriftParams::new(0.46, 3.3, 0.14).unwrap()
    }

    #[test]
    fn pi_v_bound_arithmetic() {
        assert!((pi_v_drift_bound(&pump()) - 2.84 / 0.54).abs() < 1e-14);
        assert!((pi_v_drift_bound(&pump()) - 5.259_259_259_259_259).abs() < 1e-12);
    }

    #[test]
    fn trivial_chain_has_unit_moment() {
        let p = GeometricDriftParams::new(1e-12, 1.0, 1.0).unwrap();
        assert!((pi_v_drift_bound(&p) - 1.0).abs() < 1e-11);
    }

    #[test]
    fn fbar_from_f_norm() {
        let m = geo_complementary(
            &pump(),
            &MomentInputs::new().with_f_norm(3.327),
            SqrtVSource::DriftBound,
        )
        .unwrap();
        let (sl, sk) = (0.46f64.sqrt(), 3.3f64.sqrt());
        let want = 3.327 * (1.0 + (sk - sl) / (1.0 - sl));
        assert!((m.fbar_norm.unwrap() - want).abs() < 1e-12);
        assert!((m.fbar_norm.unwrap() - 15.097_363_124_874_407).abs() < 1e-12);
    }

    #[test]
    fn caller_pi_v_takes_jensen_default() {
        let m = geo_complementary(&pump(), &MomentInputs::new().with_pi_v(4.0), SqrtVSource::DriftBound)
            .unwrap();
        assert_eq!(m.pi_sqrt_v, Some(2.0));
        assert!(!m.pi_v_is_bound);
    }

    #[test]
    fn caps_need_start_below_level() {
        let p = pump();
        let low = geo_complementary(&p, &MomentInputs::new().started_at(1.0), SqrtVSource::DriftBound)
            .unwrap();
        assert_eq!(low.xi_pn_v, Some(xi_pn_v_cap(&p)));
        assert_eq!(low.xi_pn_sqrt_v, Some(xi_pn_sqrt_v_cap(&p)));
        let high = geo_complementary(&p, &MomentInputs::new().started_at(100.0), SqrtVSource::DriftBound)
            .unwrap();
        assert_eq!(high.xi_pn_v, None);
        let err = geo_bounds(&p, &high.with_fbar_norm(1.0), C0Variant::V).unwrap_err();
        assert!(matches!(err, Error::MomentUnavailable { formula: "C2 bound", .. }));
    }

    #[test]
    fn missing_moment_names_formula() {
        let m = MomentInputs::new().with_fbar_norm(1.0);
        match geo_bounds(&pump(), &m, C0Variant::V) {
            Err(Error::MomentUnavailable { quantity, .. }) => assert_eq!(quantity, "pi(V)"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn zero_function_has_zero_bounds() {
        let m = geo_complementary(
            &pump(),
            &MomentInputs::new().started_at(1.0).with_fbar_norm(0.0),
            SqrtVSource::DriftBound,
        )
        .unwrap();
        let b = geo_bounds(&pump(), &m, C0Variant::SqrtV).unwrap();
        assert_eq!((b.sigma_as_sq, b.c1, b.c2), (0.0, 0.0, 0.0));
        assert!(b.c0 > 0.0);
    }

    #[test]
    fn pump_pipeline() {
        let m = geo_complementary(
            &pump(),
            &MomentInputs::new().started_at(1.0).with_f_norm(3.327),
            SqrtVSource::JensenFromPiV,
        )
        .unwrap();
        let b = geo_bounds(&pump(), &m, C0Variant::SqrtV).unwrap();
        assert!((b.c0 - 27.50).abs() < 5e-3, "{}", b.c0);
        assert!((b.c1 - 547.7).abs() < 0.05, "{}", b.c1);
        assert!((b.c2 - 676.1).abs() < 0.05, "{}", b.c2);
        assert_eq!(b.provenance, Provenance::DriftOnly);
    }
}
