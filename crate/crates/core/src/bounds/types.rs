use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, Error, Result};

/// Constants of a geometric drift condition `PV <= lambda V` off `J`,
/// `PV <= K` on `J`, together with the minorization mass `beta` on `J`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometricDriftParams {
    pub lambda: f64,
    #[serde(rename = "K")]
    pub k: f64,
    pub beta: f64,
    #[serde(default)]
    pub small_set: String,
}

impl GeometricDriftParams {
    pub fn new(lambda: f64, k: f64, beta: f64) -> Result<Self> {
        let p = Self {
            lambda,
            k,
            beta,
            small_set: String::new(),
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_small_set(mut self, label: impl Into<String>) -> Self {
        self.small_set = label.into();
        self
    }

    pub fn validate(&self) -> Result<()> {
        validate_common(self.lambda, self.k, self.beta)
    }

    /// Soft plausibility checks. The bounds stay valid, but terms such as
    /// `K - lambda - beta` turn negative and the output is usually useless.
    pub fn warnings(&self) -> Vec<String> {
        let mut w = Vec::new();
        if self.k < self.lambda + self.beta {
            w.push(format!(
                "K = {} is below lambda + beta = {}; several bound terms are negative",
                self.k,
                self.lambda + self.beta
            ));
        }
        w
    }

    pub(crate) fn sqrt_lambda(&self) -> f64 {
        self.lambda.sqrt()
    }

    pub(crate) fn sqrt_k(&self) -> f64 {
        self.k.sqrt()
    }
}

/// Constants of a polynomial drift condition
/// `PV <= V - (1 - lambda) V^alpha` off `J`, `PV <= K` on `J`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolynomialDriftParams {
    pub lambda: f64,
    #[serde(rename = "K")]
    pub k: f64,
    pub beta: f64,
    pub alpha: f64,
}

impl PolynomialDriftParams {
    pub fn new(lambda: f64, k: f64, beta: f64, alpha: f64) -> Result<Self> {
        let p = Self {
            lambda,
            k,
            beta,
            alpha,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        validate_common(self.lambda, self.k, self.beta)?;
        ensure_finite("alpha", self.alpha)?;
        if self.alpha > 1.0 {
            return Err(Error::InvalidParameter {
                name: "alpha",
                value: self.alpha,
                reason: "must be at most 1",
            });
        }
        if self.alpha <= 2.0 / 3.0 {
            return Err(Error::UnsupportedRegime(format!(
                "alpha = {} but the polynomial bounds require alpha > 2/3",
                self.alpha
            )));
        }
        Ok(())
    }

    pub fn warnings(&self) -> Vec<String> {
        let mut w = Vec::new();
        if self.k < 1.0 + self.beta {
            w.push(format!(
                "K = {} is below 1 + beta; several bound terms are negative",
                self.k
            ));
        }
        w
    }
}

fn validate_common(lambda: f64, k: f64, beta: f64) -> Result<()> {
    ensure_finite("lambda", lambda)?;
    ensure_finite("K", k)?;
    ensure_finite("beta", beta)?;
    if !(lambda > 0.0 && lambda < 1.0) {
        return Err(Error::InvalidParameter {
            name: "lambda",
            value: lambda,
            reason: "must lie in (0, 1)",
        });
    }
    if k < 1.0 {
        return Err(Error::InvalidParameter {
            name: "K",
            value: k,
            reason: "must be at least 1",
        });
    }
    if k <= lambda {
        return Err(Error::InvalidParameter {
            name: "K",
            value: k,
            reason: "must exceed lambda",
        });
    }
    if !(beta > 0.0 && beta <= 1.0) {
        return Err(Error::InvalidParameter {
            name: "beta",
            value: beta,
            reason: "must lie in (0, 1]",
        });
    }
    Ok(())
}

/// Where `pi(V^{1/2})` comes from when only drift constants are available.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SqrtVSource {
    /// The direct drift bound `(K^{1/2} - lambda^{1/2}) / (1 - lambda^{1/2})`.
    /// Never tighter than the Jensen route when `K >= 1`; kept because
    /// published tables are computed with it.
    DriftBound,
    /// Square root of the bound on `pi(V)`.
    #[default]
    JensenFromPiV,
}

/// Moments of `V` under the stationary law `pi` and the initial law `xi`.
///
/// Absent values are filled by the complementary bounds. `xi_pn_*` are the
/// moments of `xi P^n`, needed for the overshoot constant.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MomentInputs {
    #[serde(default, rename = "pi_V")]
    pub pi_v: Option<f64>,
    #[serde(default, rename = "pi_sqrtV")]
    pub pi_sqrt_v: Option<f64>,
    /// `(eta, pi(V^eta))` pairs.
    #[serde(default, rename = "pi_V_eta")]
    pub pi_v_eta: Vec<(f64, f64)>,
    #[serde(default, rename = "xi_V")]
    pub xi_v: Option<f64>,
    #[serde(default, rename = "xi_sqrtV")]
    pub xi_sqrt_v: Option<f64>,
    /// `(eta, xi(V^eta))` pairs.
    #[serde(default, rename = "xi_V_eta")]
    pub xi_v_eta: Vec<(f64, f64)>,
    #[serde(default, rename = "xi_Pn_V")]
    pub xi_pn_v: Option<f64>,
    #[serde(default, rename = "xi_Pn_sqrtV")]
    pub xi_pn_sqrt_v: Option<f64>,
    /// `V(x0)` for a deterministic start; implies every `xi` moment.
    #[serde(default, rename = "start_V")]
    pub start_v: Option<f64>,
    #[serde(default)]
    pub fbar_norm: Option<f64>,
    #[serde(default)]
    pub f_norm: Option<f64>,
    #[serde(default = "one", rename = "inf_V")]
    pub inf_v: f64,
    /// Set when `pi_v` came from a drift bound rather than the caller.
    #[serde(default, skip_deserializing)]
    pub pi_v_is_bound: bool,
}

fn one() -> f64 {
    1.0
}

impl MomentInputs {
    pub fn new() -> Self {
        Self {
            inf_v: 1.0,
            ..Default::default()
        }
    }

    /// Deterministic start with `V(x0) = v0`.
    pub fn started_at(mut self, v0: f64) -> Self {
        self.start_v = Some(v0);
        self
    }

    pub fn with_pi_v(mut self, v: f64) -> Self {
        self.pi_v = Some(v);
        self
    }

    pub fn with_fbar_norm(mut self, v: f64) -> Self {
        self.fbar_norm = Some(v);
        self
    }

    pub fn with_f_norm(mut self, v: f64) -> Self {
        self.f_norm = Some(v);
        self
    }

    pub fn pi_v_eta(&self, eta: f64) -> Option<f64> {
        lookup(&self.pi_v_eta, eta)
    }

    pub fn set_pi_v_eta(&mut self, eta: f64, value: f64) {
        set(&mut self.pi_v_eta, eta, value);
    }

    /// `xi(V^eta)`, from the explicit table or the deterministic start.
    pub fn xi_v_eta(&self, eta: f64) -> Option<f64> {
        lookup(&self.xi_v_eta, eta).or_else(|| self.start_v.map(|v| v.powf(eta)))
    }

    pub fn set_xi_v_eta(&mut self, eta: f64, value: f64) {
        set(&mut self.xi_v_eta, eta, value);
    }

    pub(crate) fn xi_v_value(&self) -> Option<f64> {
        self.xi_v.or(self.start_v)
    }

    pub(crate) fn xi_sqrt_v_value(&self) -> Option<f64> {
        self.xi_sqrt_v.or(self.start_v.map(f64::sqrt))
    }

    pub fn validate(&self) -> Result<()> {
        let at_least_one = |name: &'static str, v: Option<f64>| -> Result<()> {
            if let Some(v) = v {
                ensure_finite(name, v)?;
                if v < 1.0 {
                    return Err(Error::InvalidParameter {
                        name,
                        value: v,
                        reason: "moments of V are at least 1",
                    });
                }
            }
            Ok(())
        };
        at_least_one("pi_V", self.pi_v)?;
        at_least_one("pi_sqrtV", self.pi_sqrt_v)?;
        at_least_one("xi_V", self.xi_v)?;
        at_least_one("xi_sqrtV", self.xi_sqrt_v)?;
        at_least_one("xi_Pn_V", self.xi_pn_v)?;
        at_least_one("xi_Pn_sqrtV", self.xi_pn_sqrt_v)?;
        at_least_one("start_V", self.start_v)?;
        at_least_one("inf_V", Some(self.inf_v))?;
        for &(eta, v) in self.pi_v_eta.iter().chain(&self.xi_v_eta) {
            ensure_finite("eta", eta)?;
            at_least_one("V^eta moment", Some(v))?;
        }
        for (name, v) in [("fbar_norm", self.fbar_norm), ("f_norm", self.f_norm)] {
            if let Some(v) = v {
                ensure_finite(name, v)?;
                if v < 0.0 {
                    return Err(Error::InvalidParameter {
                        name,
                        value: v,
                        reason: "norms are nonnegative",
                    });
                }
            }
        }
        // bounds on the two moments need not satisfy Jensen, true values must
        if let (Some(pv), Some(ps), false) = (self.pi_v, self.pi_sqrt_v, self.pi_v_is_bound) {
            if ps > pv.sqrt() * (1.0 + 1e-12) {
                return Err(Error::InvalidInput(format!(
                    "pi_sqrtV = {ps} exceeds sqrt(pi_V) = {}, impossible by Jensen",
                    pv.sqrt()
                )));
            }
        }
        Ok(())
    }
}

const ETA_MATCH: f64 = 1e-12;

fn lookup(table: &[(f64, f64)], eta: f64) -> Option<f64> {
    table
        .iter()
        .find(|(e, _)| (e - eta).abs() <= ETA_MATCH)
        .map(|&(_, v)| v)
}

fn set(table: &mut Vec<(f64, f64)>, eta: f64, value: f64) {
    match table.iter_mut().find(|(e, _)| (*e - eta).abs() <= ETA_MATCH) {
        Some(slot) => slot.1 = value,
        None => table.push((eta, value)),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    KnownPiV,
    DriftOnly,
    Empirical,
}

/// Upper bounds on the four constants of the MSE inequality.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundComponents {
    pub sigma_as_sq: f64,
    pub c0: f64,
    pub c1: f64,
    pub c2: f64,
    pub provenance: Provenance,
}

impl BoundComponents {
    pub fn sigma_as(&self) -> f64 {
        self.sigma_as_sq.sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConfidencePlan {
    pub epsilon: f64,
    pub alpha_conf: f64,
    pub n_min: u64,
}
