//! Bounds for chains satisfying a polynomial drift condition with
//! `2/3 < alpha <= 1`.

use super::types::{BoundComponents, MomentInputs, PolynomialDriftParams, Provenance};
use crate::error::{Error, Result};

fn ratio(p: &PolynomialDriftParams) -> f64 {
    (p.k - p.lambda) / (1.0 - p.lambda)
}

/// `pi(V^eta) <= ((K - lambda) / (1 - lambda))^(eta / alpha)` for `eta <= alpha`.
pub fn pi_v_eta_bound(p: &PolynomialDriftParams, eta: f64) -> Result<f64> {
    check_eta(p, eta)?;
    Ok(ratio(p).powf(eta / p.alpha))
}

/// Lower bound on the stationary mass of the small set.
pub fn pi_j_lower(p: &PolynomialDriftParams) -> f64 {
    (1.0 - p.lambda) / (p.k - p.lambda)
}

/// Bound on `E_nu V^eta(X_n)`, uniform in `n`.
pub fn nu_pn_v_eta_bound(p: &PolynomialDriftParams, eta: f64) -> Result<f64> {
    check_eta(p, eta)?;
    Ok(p.beta.powf(-eta / p.alpha) * ratio(p).powf(2.0 * eta / p.alpha))
}

/// `||fbar||_{V^eta} <= ||f||_{V^eta} [1 + pi(V^eta) bound]`.
pub fn fbar_norm_bound(p: &PolynomialDriftParams, eta: f64, f_norm: f64) -> Result<f64> {
    Ok(f_norm * (1.0 + pi_v_eta_bound(p, eta)?))
}

fn check_eta(p: &PolynomialDriftParams, eta: f64) -> Result<()> {
    if !(eta > 0.0 && eta <= p.alpha * (1.0 + 1e-15)) {
        return Err(Error::InvalidExponent {
            eta,
            alpha: p.alpha,
        });
    }
    Ok(())
}

/// Fills `pi(V^eta)` and, when `f_norm` is given, `||fbar||_{V^eta}`.
pub fn poly_complementary(
    p: &PolynomialDriftParams,
    eta: f64,
    partial: &MomentInputs,
) -> Result<MomentInputs> {
    p.validate()?;
    let mut m = partial.clone();
    if m.pi_v_eta(eta).is_none() {
        m.set_pi_v_eta(eta, pi_v_eta_bound(p, eta)?);
        m.pi_v_is_bound = true;
    } else {
        check_eta(p, eta)?;
    }
    if m.fbar_norm.is_none() {
        if let Some(f) = m.f_norm {
            m.fbar_norm = Some(fbar_norm_bound(p, eta, f)?);
        }
    }
    Ok(m)
}

/// Exponents of the stationary moments the polynomial bounds use.
pub fn required_pi_exponents(alpha: f64) -> [f64; 4] {
    [alpha, 2.0 * alpha - 1.0, 3.0 * alpha - 2.0, 1.5 * alpha - 1.0]
}

/// Exponents of the initial-law moments used by the `C1` bound.
pub fn required_xi_exponents(alpha: f64) -> [f64; 3] {
    [2.0 * alpha - 1.0, alpha, 0.5 * alpha]
}

/// Fills every moment required by [`poly_bounds`]; the norm of `fbar` is
/// taken in `V^{(3/2) alpha - 1}`.
pub fn poly_fill_all(p: &PolynomialDriftParams, partial: &MomentInputs) -> Result<MomentInputs> {
    let mut m = partial.clone();
    let norm_eta = 1.5 * p.alpha - 1.0;
    m = poly_complementary(p, norm_eta, &m)?;
    for eta in required_pi_exponents(p.alpha) {
        m = poly_complementary(p, eta, &m)?;
    }
    Ok(m)
}

struct Shared {
    e: f64,
    tail: f64,
}

fn shared_terms(p: &PolynomialDriftParams) -> Shared {
    let (l, k, b, a) = (p.lambda, p.k, p.beta, p.alpha);
    let om = 1.0 - l;
    let kh = k.powf(0.5 * a);
    let e = (8.0 * kh - 8.0 - 8.0 * b) / (a * a * b * om * om) + (4.0 - 4.0 * b) / (a * b * om);
    let d = (2.0 * kh - 2.0 - 2.0 * b) / (a * b * om) + 1.0 / b;
    let tail = (a * om + 4.0) / (a * b * om)
        + (k.powf(2.0 * a - 1.0) - 1.0 - b) / ((2.0 * a - 1.0) * b * om)
        + 4.0 * (k.powf(a) - 1.0 - b) / (a * a * b * om * om)
        + 2.0 * d * d
        - 2.0 * d;
    Shared { e, tail }
}

fn need(v: Option<f64>, quantity: String, formula: &'static str) -> Result<f64> {
    v.ok_or(Error::MomentUnavailable { quantity, formula })
}

fn pi_eta(m: &MomentInputs, eta: f64, formula: &'static str) -> Result<f64> {
    need(m.pi_v_eta(eta), format!("pi(V^{eta})"), formula)
}

fn xi_eta(m: &MomentInputs, eta: f64) -> Result<f64> {
    need(m.xi_v_eta(eta), format!("xi(V^{eta})"), "C1 bound")
}

pub fn poly_c0(p: &PolynomialDriftParams, m: &MomentInputs) -> Result<f64> {
    let (l, k, b, a) = (p.lambda, p.k, p.beta, p.alpha);
    let pa = pi_eta(m, a, "C0 bound")?;
    Ok(pa / (a * (1.0 - l)) + (k.powf(a) - 1.0 - b) / (b * a * (1.0 - l)) + 1.0 / b - 0.5)
}

pub fn poly_sigma_sq_unit(p: &PolynomialDriftParams, m: &MomentInputs) -> Result<f64> {
    let (l, k, b, a) = (p.lambda, p.k, p.beta, p.alpha);
    let f = "asymptotic variance bound";
    let p3 = pi_eta(m, 3.0 * a - 2.0, f)?;
    let p2 = pi_eta(m, 2.0 * a - 1.0, f)?;
    let p15 = pi_eta(m, 1.5 * a - 1.0, f)?;
    let coef = (2.0 * k.powf(0.5 * a) - 2.0 - 2.0 * b) / (a * b * (1.0 - l)) + 1.0 / b - 1.0;
    Ok(p3 + 4.0 * p2 / (a * (1.0 - l)) + 2.0 * coef * p15)
}

pub fn poly_c1_sq_unit(p: &PolynomialDriftParams, m: &MomentInputs) -> Result<f64> {
    let (l, a) = (p.lambda, p.alpha);
    let om = 1.0 - l;
    let s = shared_terms(p);
    let x2 = xi_eta(m, 2.0 * a - 1.0)?;
    let x1 = xi_eta(m, a)?;
    let xh = xi_eta(m, 0.5 * a)?;
    Ok(x2 / ((2.0 * a - 1.0) * om) + 4.0 * x1 / (a * a * om * om) + s.e * xh + s.tail)
}

/// The overshoot bound needs only the drift constants.
pub fn poly_c2_sq_unit(p: &PolynomialDriftParams) -> f64 {
    let (l, k, b, a) = (p.lambda, p.k, p.beta, p.alpha);
    let om = 1.0 - l;
    let s = shared_terms(p);
    let r = ratio(p);
    r.powf((4.0 * a - 2.0) / a) / ((2.0 * a - 1.0) * b.powf((2.0 * a - 1.0) / a) * om)
        + 4.0 * (k - l).powi(2) / (a * a * b * om.powi(4))
        + s.e * (k - l) / (b.sqrt() * om)
        + s.tail
}

pub fn poly_bounds(p: &PolynomialDriftParams, m: &MomentInputs) -> Result<BoundComponents> {
    p.validate()?;
    m.validate()?;
    let fbar = need(
        m.fbar_norm,
        "||fbar||_{V^(3/2 alpha - 1)}".into(),
        "asymptotic variance bound",
    )?;
    let c0 = poly_c0(p, m)?.max(0.0);
    let sigma_as_sq = fbar * fbar * poly_sigma_sq_unit(p, m)?.max(0.0);
    let c1 = fbar * poly_c1_sq_unit(p, m)?.max(0.0).sqrt();
    let c2 = fbar * poly_c2_sq_unit(p).max(0.0).sqrt();
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
