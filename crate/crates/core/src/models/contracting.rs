//! The autoregressive chain `X' ~ N(c X, 1 - c^2)` with stationary law N(0, 1).

use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::MomentPolicy;
use crate::bounds::{
    combine_mse_bound, confidence_plan, geo_bounds, geo_complementary, BoundComponents, C0Variant,
    ConfidencePlan, GeometricDriftParams, MomentInputs, DEFAULT_CEILING,
};
use crate::error::{Error, Result};
use crate::numerics::{normal_cdf, RngStream};
use crate::regen::SplitChainModel;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContractingNormalsParams {
    pub c: f64,
    /// Half-width of the small set `[-d, d]`.
    pub d: f64,
}

impl ContractingNormalsParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.c.abs() < 1.0) {
            return Err(Error::InvalidParameter {
                name: "c",
                value: self.c,
                reason: "must satisfy |c| < 1",
            });
        }
        if !(self.d > 1.0) || !self.d.is_finite() {
            return Err(Error::InvalidParameter {
                name: "d",
                value: self.d,
                reason: "must exceed 1",
            });
        }
        Ok(())
    }
}

/// Drift and minorization constants for `V = 1 + x^2`, `J = [-d, d]`.
///
/// `PV(x) = 2 - c^2 + c^2 x^2`, so `PV / V` is largest off `J` at `|x| = d`,
/// giving `lambda = c^2 + 2 (1 - c^2) / (1 + d^2)`.
pub fn contracting_params(p: &ContractingNormalsParams) -> Result<GeometricDriftParams> {
    p.validate()?;
    let (c2, d2) = (p.c * p.c, p.d * p.d);
    let s = (1.0 - c2).sqrt();
    let ac = p.c.abs();
    let lambda = c2 + 2.0 * (1.0 - c2) / (1.0 + d2);
    let k = 2.0 + c2 * (d2 - 1.0);
    let beta = 2.0 * (normal_cdf((1.0 + ac) * p.d / s) - normal_cdf(ac * p.d / s));
    Ok(GeometricDriftParams {
        lambda,
        k,
        beta,
        small_set: format!("|x| <= {}", p.d),
    })
}

/// Law of `X_0` for the exact computation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StartLaw {
    Point(f64),
    Stationary,
}

/// Least `n` with `P(|mean(X_0..X_{n-1})| < epsilon) > 1 - alpha_conf`,
/// from the exact Gaussian law of the average.
pub fn contracting_exact_plan(c: f64, start: StartLaw, epsilon: f64, alpha_conf: f64) -> Result<u64> {
    if !(c.abs() < 1.0) {
        return Err(Error::InvalidParameter {
            name: "c",
            value: c,
            reason: "must satisfy |c| < 1",
        });
    }
    if !(epsilon > 0.0) || !(alpha_conf > 0.0 && alpha_conf < 1.0) {
        return Err(Error::InvalidInput("need epsilon > 0 and alpha in (0, 1)".into()));
    }
    let x0 = match start {
        StartLaw::Point(x) => x,
        StartLaw::Stationary => 0.0,
    };
    let var_x = |i: u64| match start {
        StartLaw::Point(_) => 1.0 - c.powi(2).powf(i as f64),
        StartLaw::Stationary => 1.0,
    };
    // S_n = sum_{i<n} X_i; A_n = Cov(S_n, X_n) = c (A_{n-1} + Var X_{n-1}).
    // From a point start the coverage is 1 at n = 1 and dips before it
    // recovers, so the plan is the least n after which coverage holds for
    // good. Once sd and |mean| both shrink, coverage can only grow.
    let (mut var_s, mut cov, mut mean_s) = (0.0f64, 0.0f64, 0.0f64);
    let mut candidate: Option<u64> = None;
    let mut prev: Option<(f64, f64)> = None;
    for n in 1..=DEFAULT_CEILING.min(1 << 40) {
        let i = n - 1;
        let v = var_x(i);
        var_s += v + 2.0 * cov;
        cov = c * (cov + v);
        mean_s += x0 * c.powf(i as f64);
        let nf = n as f64;
        let (m, sd) = (mean_s / nf, var_s.sqrt() / nf);
        let prob = if sd > 0.0 {
            normal_cdf((epsilon - m) / sd) - normal_cdf((-epsilon - m) / sd)
        } else if m.abs() < epsilon {
            1.0
        } else {
            0.0
        };
        if prob > 1.0 - alpha_conf {
            let first = *candidate.get_or_insert(n);
            let settled = matches!(prev, Some((ps, pm)) if sd < ps && m.abs() <= pm && m.abs() < epsilon);
            if settled {
                return Ok(first);
            }
        } else {
            candidate = None;
        }
        prev = Some((sd, m.abs()));
    }
    Err(Error::InfeasibleWithinCeiling { ceiling: 1 << 40 })
}

/// Variance of `sum_{i<n} X_i` from `X_0 = 0` by direct summation of the
/// covariance matrix.
pub fn brute_force_sum_variance(c: f64, n: u64) -> f64 {
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            let lo = i.min(j) as f64;
            s += c.powf((i as f64 - j as f64).abs()) * (1.0 - c.powf(2.0 * lo));
        }
    }
    s
}

#[derive(Debug, Clone)]
pub struct ContractingNormals {
    pub params: ContractingNormalsParams,
    pub drift: GeometricDriftParams,
    scale: f64,
}

impl ContractingNormals {
    pub fn new(params: ContractingNormalsParams) -> Result<Self> {
        let drift = contracting_params(&params)?;
        Ok(Self {
            params,
            drift,
            scale: (1.0 - params.c * params.c).sqrt(),
        })
    }

    fn normal_density(&self, mean: f64, y: f64) -> f64 {
        let z = (y - mean) / self.scale;
        (-0.5 * z * z).exp() / (self.scale * (2.0 * std::f64::consts::PI).sqrt())
    }

    pub fn density(&self, x: f64, y: f64) -> f64 {
        self.normal_density(self.params.c * x, y)
    }

    /// Overlap of the transition densities from the two ends of `J`,
    /// restricted to `[-d, d]`; its mass is `beta`.
    pub fn p_min(&self, y: f64) -> f64 {
        if y.abs() > self.params.d {
            return 0.0;
        }
        let m = self.params.c * self.params.d;
        self.normal_density(m, y).min(self.normal_density(-m, y))
    }

    /// Bounds for `f(x) = x` (`||f||_{V^{1/2}} = 1`, centred since the
    /// stationary mean is 0) from a start at 0. Without `pi(V)` the square
    /// root moment comes from `policy`.
    pub fn bound_components(&self, policy: MomentPolicy, c0_variant: C0Variant) -> Result<BoundComponents> {
        let partial = MomentInputs::new().started_at(1.0).with_fbar_norm(1.0);
        let (partial, src) = match policy {
            MomentPolicy::KnownPiV => (partial.with_pi_v(2.0), Default::default()),
            MomentPolicy::DriftOnly(src) => (partial, src),
        };
        let m = geo_complementary(&self.drift, &partial, src)?;
        geo_bounds(&self.drift, &m, c0_variant)
    }

    /// Chebyshev plan: least `n` whose MSE bound is at most `epsilon^2 alpha`.
    pub fn bound_plan(
        &self,
        policy: MomentPolicy,
        c0_variant: C0Variant,
        epsilon: f64,
        alpha_conf: f64,
    ) -> Result<ConfidencePlan> {
        let comp = self.bound_components(policy, c0_variant)?;
        confidence_plan(
            |n| combine_mse_bound(&comp, n).unwrap_or(f64::INFINITY),
            epsilon,
            alpha_conf,
            DEFAULT_CEILING,
        )
    }
}

impl SplitChainModel for ContractingNormals {
    type State = f64;

    fn name(&self) -> &'static str {
        "contracting_normals"
    }

    fn step(&self, x: &f64, rng: &mut RngStream) -> f64 {
        let z: f64 = StandardNormal.sample(rng);
        self.params.c * x + self.scale * z
    }

    fn in_small_set(&self, x: &f64) -> bool {
        x.abs() <= self.params.d
    }

    fn beta(&self) -> f64 {
        self.drift.beta
    }

    fn transition_density(&self, x: &f64, y: &f64) -> Option<f64> {
        Some(self.density(*x, *y))
    }

    fn nu_density(&self, y: &f64) -> Option<f64> {
        Some(self.p_min(*y) / self.drift.beta)
    }

    fn bell_probability(&self, x: &f64, y: &f64) -> Result<f64> {
        Ok(self.p_min(*y) / self.density(*x, *y))
    }

    fn drift_v(&self, x: &f64) -> f64 {
        1.0 + x * x
    }

    fn f(&self, x: &f64) -> f64 {
        *x
    }

    fn theta(&self) -> Option<f64> {
        Some(0.0)
    }

    fn projection(&self, x: &f64) -> f64 {
        *x
    }

    fn default_start(&self) -> f64 {
        0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::integrate;

    fn reference() -> ContractingNormals {
        ContractingNormals::new(ContractingNormalsParams { c: 0.5, d: 1.7875 }).unwrap()
    }

    #[test]
    fn constants_at_reference_point() {
        let p = reference().drift;
        assert!((p.lambda - 0.607_555_216_209_169_8).abs() < 1e-14);
        assert!((p.k - 2.548_789_062_5).abs() < 1e-14);
        assert!((p.beta - 0.300_104_509_977_972_2).abs() < 1e-12);
    }

    #[test]
    fn iid_case() {
        let p = contracting_params(&ContractingNormalsParams { c: 0.0, d: 2.0 }).unwrap();
        assert!((p.lambda - 2.0 / 5.0).abs() < 1e-15);
        assert_eq!(p.k, 2.0);
    }

    #[test]
    fn wide_set_limits() {
        let p = contracting_params(&ContractingNormalsParams { c: 0.5, d: 60.0 }).unwrap();
        assert!(p.beta < 1e-12);
        assert!((p.lambda - 0.25).abs() < 1e-3);
    }

    #[test]
    fn drift_holds_on_grid() {
        let m = reference();
        let (l, k) = (m.drift.lambda, m.drift.k);
        let c2 = 0.25;
        for i in 0..=40_000 {
            let x = i as f64 * 1e-3;
            let pv = 2.0 - c2 + c2 * x * x;
            if x > 1.7875 {
                assert!(pv <= l * (1.0 + x * x) * (1.0 + 1e-14), "x = {x}");
            } else {
                assert!(pv <= k * (1.0 + 1e-14));
            }
        }
    }

    #[test]
    fn envelope_mass_is_beta() {
        let m = reference();
        let mass = integrate(|y| m.p_min(y), -1.7875, 1.7875, 1e-13);
        assert!((mass - m.drift.beta).abs() < 1e-10);
    }

    #[test]
    fn envelope_below_every_transition_from_j() {
        let m = reference();
        for i in 0..=100 {
            let x = -1.7875 + 3.575 * i as f64 / 100.0;
            for j in -300..=300 {
                let y = j as f64 * 0.01;
                assert!(m.p_min(y) <= m.density(x, y) * (1.0 + 1e-12));
            }
        }
    }

    #[test]
    fn sum_variance_matches_covariance_matrix() {
        for n in [1u64, 2, 3, 7] {
            let mut var = 0.0;
            let mut cov = 0.0;
            for i in 0..n {
                let v = 1.0 - 0.25f64.powf(i as f64);
                var += v + 2.0 * cov;
                cov = 0.5 * (cov + v);
            }
            assert!((var - brute_force_sum_variance(0.5, n)).abs() < 1e-14);
        }
        // n = 3 by hand: Var = 0 + 3/4 + 15/16 + 2 (1/2 * 3/4) = 2.4375
        assert!((brute_force_sum_variance(0.5, 3) - 2.4375).abs() < 1e-15);
    }

    #[test]
    fn exact_plans() {
        assert_eq!(contracting_exact_plan(0.5, StartLaw::Stationary, 0.1, 0.1).unwrap(), 811);
        assert_eq!(contracting_exact_plan(0.5, StartLaw::Point(0.0), 0.1, 0.1).unwrap(), 809);
    }

    #[test]
    fn iid_exact_plan() {
        let n = contracting_exact_plan(0.0, StartLaw::Stationary, 0.1, 0.1).unwrap();
        let ok = |n: u64| 2.0 * normal_cdf(0.1 * (n as f64).sqrt()) - 1.0 > 0.9;
        assert!(ok(n) && !ok(n - 1));
    }
}
