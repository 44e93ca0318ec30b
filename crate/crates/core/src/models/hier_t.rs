//! Gibbs chain of a simple hierarchical model whose `mu`-marginal moves by
//! `mu' = (1 + mu^2 / t)^{1/2} * T`, `T ~ Student-t(t)`.

use rand_distr::{ChiSquared, Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::MomentPolicy;
use crate::bounds::{
    geo_bounds, geo_complementary, BoundComponents, C0Variant, GeometricDriftParams, MomentInputs,
};
use crate::error::{Error, Result};
use crate::numerics::{student_t_cdf, student_t_ln_pdf, RngStream};
use crate::regen::SplitChainModel;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HierTParams {
    pub t: u32,
    pub a: f64,
}

/// Smallest admissible small-set half-width.
pub fn admissibility_threshold(t: u32) -> f64 {
    let t = t as f64;
    (t / (t - 3.0)).sqrt()
}

fn check_t(t: u32) -> Result<()> {
    if t < 4 {
        return Err(Error::InvalidParameter {
            name: "t",
            value: t as f64,
            reason: "must be at least 4",
        });
    }
    Ok(())
}

/// `(lambda, K, pi(V))` for `V = mu^2 + 1` and `J = [-a, a]`.
pub fn hier_t_drift(p: &HierTParams) -> Result<(f64, f64, f64)> {
    check_t(p.t)?;
    if !(p.a > admissibility_threshold(p.t)) {
        return Err(Error::InadmissibleSmallSet(format!(
            "a = {} must exceed sqrt(t/(t-3)) = {}",
            p.a,
            admissibility_threshold(p.t)
        )));
    }
    let t = p.t as f64;
    let a2 = p.a * p.a;
    let lambda = ((2.0 * t - 3.0) / (1.0 + a2) + 1.0) / (t - 2.0);
    let k = 2.0 + (a2 + 2.0) / (t - 2.0);
    let pi_v = (2.0 * t - 3.0) / (t - 3.0);
    Ok((lambda, k, pi_v))
}

/// Switch point `h(a)` of the minorizing density and the mass `beta`.
pub fn hier_t_minorization(p: &HierTParams) -> Result<(f64, f64)> {
    check_t(p.t)?;
    let t = p.t as f64;
    let a2 = p.a * p.a;
    let denom = (1.0 + a2 / t).powf(t / (t + 1.0)) - 1.0;
    let radicand = a2 / denom - t;
    if !(radicand >= 0.0) || !(p.a > 0.0) {
        return Err(Error::Domain(format!(
            "h(a) undefined for a = {}: radicand {radicand}",
            p.a
        )));
    }
    let h = radicand.sqrt();
    let shrink = (1.0 + a2 / t).sqrt();
    let inside = |x: f64| student_t_cdf(x, t) - student_t_cdf(-x, t);
    let beta = 1.0 - inside(h) + inside(h / shrink);
    Ok((h, beta))
}

/// Exact MSE of the ergodic average of `mu` after `n` steps from `mu0`.
pub fn hier_t_exact_mse(t: u32, n: u64, mu0: f64) -> Result<f64> {
    check_t(t)?;
    if n == 0 {
        return Err(Error::InvalidInput("n must be at least 1".into()));
    }
    let t = t as f64;
    let n_f = n as f64;
    let decay = 1.0 - (t - 2.0).powf(-n_f);
    Ok(t / (n_f * (t - 3.0)) - t * (t - 2.0) / (n_f * n_f * (t - 3.0).powi(2)) * decay
        + (t - 2.0) / (n_f * n_f * (t - 3.0)) * decay * mu0 * mu0)
}

/// Stationary variance of `mu`, equal to the asymptotic variance of its average.
pub fn hier_t_sigma_as_sq(t: u32) -> f64 {
    let t = t as f64;
    t / (t - 3.0)
}

#[derive(Debug, Clone)]
pub struct HierT {
    pub params: HierTParams,
    pub lambda: f64,
    pub k: f64,
    pub pi_v: f64,
    pub h: f64,
    pub beta: f64,
    chi: ChiSquared<f64>,
    ln_norm: f64,
}

impl HierT {
    pub fn new(params: HierTParams) -> Result<Self> {
        let (lambda, k, pi_v) = hier_t_drift(&params)?;
        let (h, beta) = hier_t_minorization(&params)?;
        let t = params.t as f64;
        let chi = ChiSquared::new(t).map_err(|e| Error::Model(e.to_string()))?;
        Ok(Self {
            params,
            lambda,
            k,
            pi_v,
            h,
            beta,
            chi,
            ln_norm: student_t_ln_pdf(0.0, t),
        })
    }

    fn df(&self) -> f64 {
        self.params.t as f64
    }

    pub fn drift_params(&self) -> GeometricDriftParams {
        GeometricDriftParams {
            lambda: self.lambda,
            k: self.k,
            beta: self.beta,
            small_set: format!("|mu| <= {}", self.params.a),
        }
    }

    /// Density of `mu'` given `mu`.
    pub fn density(&self, mu: f64, y: f64) -> f64 {
        let t = self.df();
        let s = (1.0 + mu * mu / t).sqrt();
        let z = y / s;
        // student_t_ln_pdf(z) = ln_norm - (t+1)/2 ln(1 + z^2/t)
        (self.ln_norm - 0.5 * (t + 1.0) * (z * z / t).ln_1p()).exp() / s
    }

    /// Subprobability density `beta nu`: the lower envelope of the
    /// transition densities from `J`, attained at `mu = a` near the centre
    /// and at `mu = 0` in the tails.
    pub fn p_min(&self, y: f64) -> f64 {
        if y.abs() <= self.h {
            self.density(self.params.a, y)
        } else {
            self.density(0.0, y)
        }
    }

    /// Bounds with `||fbar||_{V^{1/2}} = 1` (`f = mu`) and a start at 0.
    pub fn bound_components(&self, policy: MomentPolicy, c0_variant: C0Variant) -> Result<BoundComponents> {
        let partial = MomentInputs::new().started_at(1.0).with_fbar_norm(1.0);
        let (partial, src) = match policy {
            MomentPolicy::KnownPiV => (partial.with_pi_v(self.pi_v), Default::default()),
            MomentPolicy::DriftOnly(src) => (partial, src),
        };
        let m = geo_complementary(&self.drift_params(), &partial, src)?;
        geo_bounds(&self.drift_params(), &m, c0_variant)
    }
}

impl SplitChainModel for HierT {
    type State = f64;

    fn name(&self) -> &'static str {
        "hier_t"
    }

    fn step(&self, mu: &f64, rng: &mut RngStream) -> f64 {
        let t = self.df();
        let z: f64 = StandardNormal.sample(rng);
        let chi = self.chi.sample(rng);
        (1.0 + mu * mu / t).sqrt() * z / (chi / t).sqrt()
    }

    fn in_small_set(&self, mu: &f64) -> bool {
        mu.abs() <= self.params.a
    }

    fn beta(&self) -> f64 {
        self.beta
    }

    fn transition_density(&self, mu: &f64, y: &f64) -> Option<f64> {
        Some(self.density(*mu, *y))
    }

    fn nu_density(&self, y: &f64) -> Option<f64> {
        Some(self.p_min(*y) / self.beta)
    }

    fn bell_probability(&self, mu: &f64, y: &f64) -> Result<f64> {
        Ok(self.p_min(*y) / self.density(*mu, *y))
    }

    fn drift_v(&self, mu: &f64) -> f64 {
        mu * mu + 1.0
    }

    fn f(&self, mu: &f64) -> f64 {
        *mu
    }

    fn theta(&self) -> Option<f64> {
        Some(0.0)
    }

    fn projection(&self, mu: &f64) -> f64 {
        *mu
    }

    fn default_start(&self) -> f64 {
        0.0
    }
}
