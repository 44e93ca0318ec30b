//! Gibbs sampler for the Poisson-Gamma pump-failure model:
//! `r | phi ~ Gamma(m alpha + sigma, gamma + sum phi)`,
//! `phi_i | r ~ Gamma(y_i + alpha, t_i + r)` (shape, rate).

use std::path::{Path, PathBuf};

use rand_distr::{Distribution, Gamma};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::bounds::{
    geo_bounds, geo_complementary, BoundComponents, C0Variant, GeometricDriftParams, MomentInputs,
    SqrtVSource,
};
use crate::error::{Error, Result};
use crate::numerics::{integrate, ln_gamma, RngStream};
use crate::regen::SplitChainModel;

pub const DATA_ENV: &str = "MCMC_CERTIFY_DATA";
const CHECKSUM_TAG: &str = "# sha256 of the lines below:";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PumpData {
    pub y: Vec<u32>,
    pub t: Vec<f64>,
}

/// Bundled data file, or the path in `MCMC_CERTIFY_DATA` when set.
pub fn pump_data_path() -> PathBuf {
    std::env::var_os(DATA_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| Path::new(env!("CARGO_MANIFEST_DIR")).join("data/pump.csv"))
}

/// Parses the CSV and verifies the embedded checksum of its data lines.
pub fn parse_pump_csv(text: &str) -> Result<PumpData> {
    let mut expected = None;
    let mut body = String::new();
    for line in text.lines() {
        if let Some(rest) = line.strip_prefix(CHECKSUM_TAG) {
            expected = Some(rest.trim().to_ascii_lowercase());
        } else if !line.starts_with('#') && !line.trim().is_empty() {
            body.push_str(line.trim_end());
            body.push('\n');
        }
    }
    let expected =
        expected.ok_or_else(|| Error::Data("missing sha256 checksum comment".into()))?;
    let actual = hex::encode(Sha256::digest(body.as_bytes()));
    if actual != expected {
        return Err(Error::Data(format!(
            "checksum mismatch: file says {expected}, contents hash to {actual}"
        )));
    }
    let mut lines = body.lines();
    if lines.next().map(str::trim) != Some("pump,y,t") {
        return Err(Error::Data("expected header `pump,y,t`".into()));
    }
    let (mut y, mut t) = (Vec::new(), Vec::new());
    for (k, line) in lines.enumerate() {
        let cols: Vec<&str> = line.split(',').map(str::trim).collect();
        let bad = || Error::Data(format!("malformed row {}: `{line}`", k + 1));
        if cols.len() != 3 {
            return Err(bad());
        }
        y.push(cols[1].parse().map_err(|_| bad())?);
        let ti: f64 = cols[2].parse().map_err(|_| bad())?;
        if !(ti > 0.0) {
            return Err(bad());
        }
        t.push(ti);
    }
    if y.len() != 10 {
        return Err(Error::Data(format!("expected 10 pumps, found {}", y.len())));
    }
    Ok(PumpData { y, t })
}

pub fn load_pump_data(path: &Path) -> Result<PumpData> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Data(format!("cannot read {}: {e}", path.display())))?;
    parse_pump_csv(&text)
}

/// Prior hyperparameters, named apart from the drift exponent and the
/// asymptotic standard deviation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PumpHyper {
    pub alpha_h: f64,
    pub sigma_h: f64,
    pub gamma_h: f64,
}

impl Default for PumpHyper {
    fn default() -> Self {
        Self {
            alpha_h: 1.802,
            sigma_h: 0.01,
            gamma_h: 1.0,
        }
    }
}

/// Published drift and minorization constants for `V = 1 + (sum phi - 6.5)^2`
/// and `J = {4 <= sum phi <= 9}`.
pub fn reference_drift_constants() -> GeometricDriftParams {
    GeometricDriftParams {
        lambda: 0.46,
        k: 3.3,
        beta: 0.14,
        small_set: "4 <= sum(phi) <= 9".into(),
    }
}

pub const SHIFT: f64 = 3.327;
/// `||phi_i - SHIFT||_{V^{1/2}}` is at most this.
pub const F_NORM: f64 = 3.327;
const J_LO: f64 = 4.0;
const J_HI: f64 = 9.0;

#[derive(Debug, Clone, PartialEq)]
pub struct PumpState {
    pub phi: Vec<f64>,
    pub r: f64,
}

#[derive(Debug, Clone)]
pub struct PumpModel {
    pub data: PumpData,
    pub hyper: PumpHyper,
    pub component: usize,
    r_shape: f64,
    /// Mass of the overlap of the `r` updates from the edges of `J`.
    overlap_beta: f64,
}

fn gamma_ln_pdf(x: f64, shape: f64, rate: f64) -> f64 {
    shape * rate.ln() + (shape - 1.0) * x.ln() - rate * x - ln_gamma(shape)
}

impl PumpModel {
    pub fn new(data: PumpData, hyper: PumpHyper, component: usize) -> Result<Self> {
        if component >= data.y.len() {
            return Err(Error::Model(format!(
                "component {component} out of range for {} pumps",
                data.y.len()
            )));
        }
        if !(hyper.alpha_h > 0.0 && hyper.sigma_h > 0.0 && hyper.gamma_h > 0.0) {
            return Err(Error::Model("hyperparameters must be positive".into()));
        }
        let r_shape = data.y.len() as f64 * hyper.alpha_h + hyper.sigma_h;
        let mut m = Self {
            data,
            hyper,
            component,
            r_shape,
            overlap_beta: 0.0,
        };
        let mean_hi = r_shape / (hyper.gamma_h + J_LO);
        m.overlap_beta = integrate(|r| m.r_envelope(r), 1e-12, 20.0 * mean_hi + 50.0, 1e-13);
        Ok(m)
    }

    pub fn from_bundled(component: usize) -> Result<Self> {
        Self::new(load_pump_data(&pump_data_path())?, PumpHyper::default(), component)
    }

    /// Density of the `r` update given `sum phi`.
    fn r_density(&self, r: f64, sum_phi: f64) -> f64 {
        gamma_ln_pdf(r, self.r_shape, self.hyper.gamma_h + sum_phi).exp()
    }

    /// `min` over `sum phi in [4, 9]` of the `r` density; log-concave in the
    /// rate, so the minimum sits at an endpoint.
    fn r_envelope(&self, r: f64) -> f64 {
        self.r_density(r, J_LO).min(self.r_density(r, J_HI))
    }

    pub fn overlap_beta(&self) -> f64 {
        self.overlap_beta
    }

    fn phi_ln_density(&self, phi: &[f64], r: f64) -> f64 {
        phi.iter()
            .zip(self.data.y.iter().zip(&self.data.t))
            .map(|(&p, (&y, &t))| gamma_ln_pdf(p, y as f64 + self.hyper.alpha_h, t + r))
            .sum()
    }

    /// Bounds for `f = phi_i - 3.327` from the published constants, a start
    /// with `V = 1`, and `pi(V^{1/2}) <= pi(V)^{1/2}`.
    pub fn bound_components() -> Result<BoundComponents> {
        let p = reference_drift_constants();
        let m = geo_complementary(
            &p,
            &MomentInputs::new().started_at(1.0).with_f_norm(F_NORM),
            SqrtVSource::JensenFromPiV,
        )?;
        geo_bounds(&p, &m, C0Variant::SqrtV)
    }

    /// Expected `r` update given `phi`, for moment checks.
    pub fn r_conditional_mean(&self, sum_phi: f64) -> f64 {
        self.r_shape / (self.hyper.gamma_h + sum_phi)
    }
}

impl SplitChainModel for PumpModel {
    type State = PumpState;

    fn name(&self) -> &'static str {
        "pump"
    }

    fn step(&self, x: &PumpState, rng: &mut RngStream) -> PumpState {
        let sum: f64 = x.phi.iter().sum();
        let r = Gamma::new(self.r_shape, 1.0 / (self.hyper.gamma_h + sum))
            .expect("positive shape and rate")
            .sample(rng);
        let phi = self
            .data
            .y
            .iter()
            .zip(&self.data.t)
            .map(|(&y, &t)| {
                Gamma::new(y as f64 + self.hyper.alpha_h, 1.0 / (t + r))
                    .expect("positive shape and rate")
                    .sample(rng)
            })
            .collect();
        PumpState { phi, r }
    }

    fn in_small_set(&self, x: &PumpState) -> bool {
        let s: f64 = x.phi.iter().sum();
        (J_LO..=J_HI).contains(&s)
    }

    fn beta(&self) -> f64 {
        self.overlap_beta
    }

    fn transition_density(&self, x: &PumpState, y: &PumpState) -> Option<f64> {
        let sum: f64 = x.phi.iter().sum();
        Some(self.r_density(y.r, sum) * self.phi_ln_density(&y.phi, y.r).exp())
    }

    fn nu_density(&self, y: &PumpState) -> Option<f64> {
        Some(self.r_envelope(y.r) * self.phi_ln_density(&y.phi, y.r).exp() / self.overlap_beta)
    }

    // the phi factors are shared by numerator and denominator
    fn bell_probability(&self, x: &PumpState, y: &PumpState) -> Result<f64> {
        let sum: f64 = x.phi.iter().sum();
        Ok(self.r_envelope(y.r) / self.r_density(y.r, sum))
    }

    fn drift_v(&self, x: &PumpState) -> f64 {
        let s: f64 = x.phi.iter().sum();
        1.0 + (s - 6.5).powi(2)
    }

    fn f(&self, x: &PumpState) -> f64 {
        x.phi[self.component] - SHIFT
    }

    fn projection(&self, x: &PumpState) -> f64 {
        x.phi.iter().sum()
    }

    fn default_start(&self) -> PumpState {
        let m = self.data.y.len();
        PumpState {
            phi: vec![6.5 / m as f64; m],
            r: 1.0,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_data_loads() {
        let d = load_pump_data(&pump_data_path()).expect("pump data file must be present");
        assert_eq!(d.y, vec![5, 1, 5, 14, 3, 19, 1, 1, 4, 22]);
        assert_eq!(d.t[0], 94.32);
        assert_eq!(d.t[9], 10.48);
    }

    #[test]
    fn tampered_data_rejected() {
        let text = std::fs::read_to_string(pump_data_path()).unwrap();
        let bad = text.replace("1,5,94.320", "1,6,94.320");
        assert!(matches!(parse_pump_csv(&bad), Err(Error::Data(_))));
        let no_sum: String = text
            .lines()
            .filter(|l| !l.starts_with(CHECKSUM_TAG))
            .map(|l| format!("{l}\n"))
            .collect();
        assert!(matches!(parse_pump_csv(&no_sum), Err(Error::Data(_))));
    }

    #[test]
    fn overlap_mass() {
        let m = PumpModel::from_bundled(0).unwrap();
        // closed form: crossing point r* = a ln(10/5) / 5
        assert!((m.overlap_beta() - 0.144_288_473_534_398_2).abs() < 1e-10, "{}", m.overlap_beta());
        assert!(m.overlap_beta() >= reference_drift_constants().beta);
    }

    #[test]
    fn envelope_below_updates_from_j() {
        let m = PumpModel::from_bundled(0).unwrap();
        for i in 0..=50 {
            let s = 4.0 + 5.0 * i as f64 / 50.0;
            for j in 1..=400 {
                let r = j as f64 * 0.02;
                assert!(m.r_envelope(r) <= m.r_density(r, s) * (1.0 + 1e-12));
            }
        }
    }

    #[test]
    fn r_update_mean() {
        let m = PumpModel::from_bundled(0).unwrap();
        let x = m.default_start();
        let mut rng = RngStream::new(17, 0);
        let n = 100_000;
        let rs: Vec<f64> = (0..n).map(|_| m.step(&x, &mut rng).r).collect();
        let mean = rs.iter().sum::<f64>() / n as f64;
        let sd = (rs.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / n as f64).sqrt();
        let want = m.r_conditional_mean(6.5);
        assert!((mean - want).abs() < 4.0 * sd / (n as f64).sqrt());
    }
}
