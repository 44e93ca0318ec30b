//! A polynomially ergodic chain on `[1, inf)` with `V(x) = x`.
//!
//! From `x` the chain resets to `1 + Exp(1)` with probability
//! `q(x) = x^(alpha - 1)` and otherwise moves to `x + Exp(1)`. Then
//! `PV(x) = x + 1 - x^alpha + x^(alpha - 1)`, which satisfies
//! `PV <= V - (1 - lambda) V^alpha` exactly when
//! `lambda x^alpha >= 1 + x^(alpha - 1)`; `J = [1, x_J]` is the set where
//! that fails. The reset move gives the minorization with
//! `beta = x_J^(alpha - 1)` and `nu = 1 + Exp(1)`, and the stationary
//! density is proportional to `exp(-(x^alpha - 1) / alpha)`.

use rand_distr::{Distribution, Exp1};
use serde::{Deserialize, Serialize};

use super::MomentPolicy;
use crate::bounds::{poly_bounds, poly_fill_all, BoundComponents, MomentInputs, PolynomialDriftParams};
use crate::error::{Error, Result};
use crate::numerics::{integrate, RngStream};
use crate::regen::SplitChainModel;

pub const DRIFT_GRID_POINTS: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ToyPolyParams {
    pub alpha: f64,
    pub lambda: f64,
    /// Optional looser `K`; must dominate `sup_J PV`.
    #[serde(rename = "K", default)]
    pub k: Option<f64>,
    /// Optional larger right end of `J`.
    #[serde(default)]
    pub j_upper: Option<f64>,
}

impl Default for ToyPolyParams {
    fn default() -> Self {
        Self {
            alpha: 0.8,
            lambda: 0.5,
            k: None,
            j_upper: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ToyPoly {
    pub params: ToyPolyParams,
    pub drift: PolynomialDriftParams,
    pub x_j: f64,
    /// Exponent of the target `f(x) = x^s`, `s = (3/2) alpha - 1`.
    pub s: f64,
    theta: f64,
    ln_norm: f64,
}

fn pv(alpha: f64, x: f64) -> f64 {
    x + 1.0 - x.powf(alpha) + x.powf(alpha - 1.0)
}

fn drift_root(alpha: f64, lambda: f64) -> f64 {
    let h = |x: f64| lambda * x.powf(alpha) - 1.0 - x.powf(alpha - 1.0);
    let (mut lo, mut hi) = (1.0, 2.0);
    while h(hi) < 0.0 {
        lo = hi;
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if h(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-15 * hi {
            break;
        }
    }
    hi
}

/// Largest violation of the drift contract on a log-spaced grid; `<= 0`
/// means the contract holds at every grid point.
pub fn drift_violation(alpha: f64, lambda: f64, k: f64, x_j: f64, points: usize) -> f64 {
    let hi: f64 = 1e8 * x_j;
    let step = hi.ln() / (points - 1) as f64;
    let mut worst = f64::NEG_INFINITY;
    for i in 0..points {
        let x = (i as f64 * step).exp();
        let gap = if x <= x_j {
            pv(alpha, x) - k
        } else {
            pv(alpha, x) - x + (1.0 - lambda) * x.powf(alpha)
        };
        worst = worst.max(gap);
    }
    worst
}

impl ToyPoly {
    pub fn new(params: ToyPolyParams) -> Result<Self> {
        let (alpha, lambda) = (params.alpha, params.lambda);
        if !(lambda > 0.0 && lambda < 1.0) {
            return Err(Error::InvalidParameter {
                name: "lambda",
                value: lambda,
                reason: "must lie in (0, 1)",
            });
        }
        if !(alpha > 2.0 / 3.0 && alpha < 1.0) {
            return Err(Error::InvalidParameter {
                name: "alpha",
                value: alpha,
                reason: "must lie in (2/3, 1) for this chain",
            });
        }
        let root = drift_root(alpha, lambda);
        let x_j = match params.j_upper {
            Some(u) if u >= root => u,
            Some(u) => {
                return Err(Error::ConstructionInvalid(format!(
                    "J = [1, {u}] is too small, the drift fails below {root}"
                )))
            }
            None => root,
        };
        // PV is increasing, so its sup over J is at the right end
        let k_min = pv(alpha, x_j);
        let k = match params.k {
            Some(k) if k >= k_min => k,
            Some(k) => {
                return Err(Error::ConstructionInvalid(format!(
                    "K = {k} is below sup over J of PV = {k_min}"
                )))
            }
            None => k_min,
        };
        let beta = x_j.powf(alpha - 1.0);
        let worst = drift_violation(alpha, lambda, k * (1.0 + 1e-12), x_j, DRIFT_GRID_POINTS);
        // relative slack for rounding at the boundary of J
        if worst > 1e-9 * x_j {
            return Err(Error::ConstructionInvalid(format!(
                "drift condition violated on the grid by {worst}"
            )));
        }
        let drift = PolynomialDriftParams::new(lambda, k, beta, alpha)?;
        let s = 1.5 * alpha - 1.0;
        let upper = (1.0 + 800.0 * alpha).powf(1.0 / alpha);
        let w = |x: f64| (-(x.powf(alpha) - 1.0) / alpha).exp();
        let z = integrate(w, 1.0, upper, 1e-13);
        let theta = integrate(|x| x.powf(s) * w(x), 1.0, upper, 1e-13) / z;
        Ok(Self {
            params,
            drift,
            x_j,
            s,
            theta,
            ln_norm: z.ln(),
        })
    }

    pub fn stationary_density(&self, x: f64) -> f64 {
        if x < 1.0 {
            return 0.0;
        }
        let a = self.params.alpha;
        (-(x.powf(a) - 1.0) / a - self.ln_norm).exp()
    }

    /// `pi(V^eta)` by quadrature.
    pub fn stationary_moment(&self, eta: f64) -> f64 {
        let a = self.params.alpha;
        let upper = (1.0 + 800.0 * a).powf(1.0 / a);
        integrate(|x| x.powf(eta) * self.stationary_density(x), 1.0, upper, 1e-13)
    }

    /// `||fbar||` in the `V^s` norm: `sup |x^s - theta| / x^s`.
    pub fn fbar_norm(&self) -> f64 {
        (self.theta - 1.0).max(1.0)
    }

    fn reset_prob(&self, x: f64) -> f64 {
        x.powf(self.params.alpha - 1.0)
    }

    /// Bounds for `f = x^s` started at `x0 = 1`. `KnownPiV` uses the exact
    /// stationary moments, `DriftOnly` the drift bounds for them.
    pub fn bound_components(&self, policy: MomentPolicy) -> Result<BoundComponents> {
        let mut m = MomentInputs::new().started_at(1.0).with_fbar_norm(self.fbar_norm());
        if let MomentPolicy::KnownPiV = policy {
            for eta in crate::bounds::required_pi_exponents(self.params.alpha) {
                m.set_pi_v_eta(eta, self.stationary_moment(eta));
            }
        }
        let m = poly_fill_all(&self.drift, &m)?;
        let mut c = poly_bounds(&self.drift, &m)?;
        if let MomentPolicy::KnownPiV = policy {
            c.provenance = crate::bounds::Provenance::KnownPiV;
        }
        Ok(c)
    }
}

impl SplitChainModel for ToyPoly {
    type State = f64;

    fn name(&self) -> &'static str {
        "toy_poly"
    }

    fn step(&self, x: &f64, rng: &mut RngStream) -> f64 {
        let u = rng.uniform();
        let e: f64 = Exp1.sample(rng);
        if u < self.reset_prob(*x) {
            1.0 + e
        } else {
            x + e
        }
    }

    fn in_small_set(&self, x: &f64) -> bool {
        *x <= self.x_j
    }

    fn beta(&self) -> f64 {
        self.drift.beta
    }

    fn transition_density(&self, x: &f64, y: &f64) -> Option<f64> {
        if *y < 1.0 {
            return Some(0.0);
        }
        let q = self.reset_prob(*x);
        let stay = if y >= x { (1.0 - q) * (x - y).exp() } else { 0.0 };
        Some(q * (1.0 - y).exp() + stay)
    }

    fn nu_density(&self, y: &f64) -> Option<f64> {
        Some(if *y >= 1.0 { (1.0 - y).exp() } else { 0.0 })
    }

    fn drift_v(&self, x: &f64) -> f64 {
        *x
    }

    fn f(&self, x: &f64) -> f64 {
        x.powf(self.s)
    }

    fn theta(&self) -> Option<f64> {
        Some(self.theta)
    }

    fn projection(&self, x: &f64) -> f64 {
        *x
    }

    fn default_start(&self) -> f64 {
        1.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model() -> ToyPoly {
        ToyPoly::new(ToyPolyParams::default()).unwrap()
    }

    #[test]
    fn default_construction() {
        let m = model();
        assert!((m.x_j - 4.8).abs() < 0.1, "{}", m.x_j);
        let a = 0.8;
        assert!((0.5 * m.x_j.powf(a) - 1.0 - m.x_j.powf(a - 1.0)).abs() < 1e-12);
        assert!((m.drift.beta - m.x_j.powf(-0.2)).abs() < 1e-15);
        assert!(drift_violation(a, 0.5, m.drift.k * (1.0 + 1e-12), m.x_j, DRIFT_GRID_POINTS) <= 1e-9);
    }

    #[test]
    fn rejects_small_k_and_j() {
        let p = ToyPolyParams {
            k: Some(1.5),
            ..Default::default()
        };
        assert!(matches!(ToyPoly::new(p), Err(Error::ConstructionInvalid(_))));
        let p = ToyPolyParams {
            j_upper: Some(2.0),
            ..Default::default()
        };
        assert!(matches!(ToyPoly::new(p), Err(Error::ConstructionInvalid(_))));
    }

    #[test]
    fn larger_j_still_valid() {
        let m = ToyPoly::new(ToyPolyParams {
            j_upper: Some(10.0),
            ..Default::default()
        })
        .unwrap();
        assert_eq!(m.x_j, 10.0);
        assert!(m.drift.beta < model().drift.beta);
    }

    #[test]
    fn density_and_moments() {
        let m = model();
        assert!((m.stationary_moment(0.0) - 1.0).abs() < 1e-10);
        assert!((m.stationary_moment(m.s) - m.theta().unwrap()).abs() < 1e-10);
        for x in [1.0, 2.5, 4.0, 10.0] {
            let total = integrate(|y| m.transition_density(&x, &y).unwrap(), 1.0, x + 60.0, 1e-12);
            assert!((total - 1.0).abs() < 1e-8, "x = {x}: {total}");
        }
    }

    #[test]
    fn minorization_on_grid() {
        let m = model();
        for i in 0..=100 {
            let x = 1.0 + (m.x_j - 1.0) * i as f64 / 100.0;
            for j in 0..=400 {
                let y = 1.0 + j as f64 * 0.05;
                let p = m.transition_density(&x, &y).unwrap();
                assert!(m.beta() * m.nu_density(&y).unwrap() <= p * (1.0 + 1e-12));
            }
        }
    }

    #[test]
    fn one_step_mean_matches_pv() {
        let m = model();
        let mut rng = RngStream::new(5, 0);
        let n = 200_000;
        for x in [1.0, 6.0] {
            let ys: Vec<f64> = (0..n).map(|_| m.step(&x, &mut rng)).collect();
            let mean = ys.iter().sum::<f64>() / n as f64;
            let sd = (ys.iter().map(|y| (y - mean).powi(2)).sum::<f64>() / n as f64).sqrt();
            assert!((mean - pv(0.8, x)).abs() < 4.0 * sd / (n as f64).sqrt());
        }
    }

    #[test]
    fn bounds_available() {
        let m = model();
        let known = m.bound_components(MomentPolicy::KnownPiV).unwrap();
        let drift = m.bound_components(MomentPolicy::DriftOnly(Default::default())).unwrap();
        assert!(known.sigma_as_sq.is_finite() && known.sigma_as_sq > 0.0);
        assert!(drift.sigma_as_sq >= known.sigma_as_sq);
    }
}
