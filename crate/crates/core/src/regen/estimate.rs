use rayon::prelude::*;
use serde::Serialize;

use super::model::{checked_bell, SplitChainModel};
use super::split::{collect_tours, TourConfig, TourSample};
use super::streams;
use crate::error::{Error, Result};
use crate::numerics::RngStream;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub value: f64,
    pub stderr: f64,
}

impl Estimate {
    /// `|value - reference| <= k stderr`.
    pub fn within(&self, reference: f64, k: f64) -> bool {
        (self.value - reference).abs() <= k * self.stderr
    }
}

/// `mean(a) / mean(b)` with its delta-method standard error.
pub(crate) fn ratio_estimate(a: &[f64], b: &[f64]) -> Estimate {
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let r = ma / mb;
    let ss: f64 = a.iter().zip(b).map(|(x, y)| (x - r * y).powi(2)).sum();
    Estimate {
        value: r,
        stderr: (ss / (n * (n - 1.0))).sqrt() / mb,
    }
}

pub(crate) fn mean_estimate(a: &[f64]) -> Estimate {
    let n = a.len() as f64;
    let m = a.iter().sum::<f64>() / n;
    let ss: f64 = a.iter().map(|x| (x - m).powi(2)).sum();
    Estimate {
        value: m,
        stderr: (ss / (n * (n - 1.0))).sqrt(),
    }
}

/// `sqrt(E S^2)` from draws of `S`.
fn root_second_moment(s: &[f64]) -> Estimate {
    let sq: Vec<f64> = s.iter().map(|x| x * x).collect();
    let m = mean_estimate(&sq);
    let value = m.value.sqrt();
    Estimate {
        value,
        stderr: if value > 0.0 { m.stderr / (2.0 * value) } else { 0.0 },
    }
}

pub const DEFAULT_MIN_BLOCKS: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SigmaEstimate {
    pub sigma_as_sq: Estimate,
    pub theta: f64,
    /// `theta` was estimated from the same tours.
    pub theta_is_plug_in: bool,
    pub n_blocks: usize,
}

/// `E_nu Xi(fbar)^2 / E_nu T` from tours that start at a regeneration.
pub fn estimate_sigma_as(
    sample: &TourSample,
    theta: Option<f64>,
    min_blocks: usize,
) -> Result<SigmaEstimate> {
    let n = sample.len();
    if n < min_blocks.max(2) {
        return Err(Error::InsufficientData {
            have: n,
            need: min_blocks.max(2),
        });
    }
    let (theta, plug_in) = match theta {
        Some(t) => (t, false),
        None => {
            let sf: f64 = sample.tours().map(|t| t.sum_f).sum();
            (sf / sample.total_steps() as f64, true)
        }
    };
    let sq: Vec<f64> = sample
        .tours()
        .map(|t| (t.sum_f - theta * t.len as f64).powi(2))
        .collect();
    let len: Vec<f64> = sample.tours().map(|t| t.len as f64).collect();
    Ok(SigmaEstimate {
        sigma_as_sq: ratio_estimate(&sq, &len),
        theta,
        theta_is_plug_in: plug_in,
        n_blocks: n,
    })
}

/// `C0 = E_pi T - 1/2` through the renewal-reward identity
/// `E_pi T = E_nu [T (T + 1)] / (2 E_nu T)`.
pub fn estimate_c0(sample: &TourSample) -> Estimate {
    let (num, len): (Vec<f64>, Vec<f64>) = sample
        .tours()
        .map(|t| {
            let l = t.len as f64;
            (0.5 * l * (l + 1.0), l)
        })
        .unzip();
    let e = ratio_estimate(&num, &len);
    Estimate {
        value: e.value - 0.5,
        stderr: e.stderr,
    }
}

/// `C0` on the first and second half of every chain's tours; a large gap
/// points at insufficient burn-in.
fn c0_halves(sample: &TourSample) -> (Estimate, Estimate) {
    let split = |first: bool| TourSample {
        per_chain: sample
            .per_chain
            .iter()
            .map(|c| {
                let h = c.len() / 2;
                if first {
                    c[..h].to_vec()
                } else {
                    c[h..].to_vec()
                }
            })
            .collect(),
    };
    (estimate_c0(&split(true)), estimate_c0(&split(false)))
}

/// Per-replicate `Xi(|fbar|)` of the first block and the overshoot sum
/// `1(T_1 < n) sum_{i=n}^{T_{R(n)}-1} |fbar|(X_i)`.
fn first_and_overshoot<M: SplitChainModel>(
    model: &M,
    x0: &M::State,
    theta: f64,
    n: u64,
    rng: RngStream,
) -> Result<(f64, f64)> {
    let mut x = x0.clone();
    let mut rng = rng;
    let (mut first, mut over) = (0.0, 0.0);
    let mut t1: Option<u64> = None;
    let mut i = 0u64;
    loop {
        let y = model.step(&x, &mut rng);
        let bell = if model.in_small_set(&x) {
            let q = checked_bell(model, &x, &y)?;
            rng.uniform() < q
        } else {
            false
        };
        let a = (model.f(&x) - theta).abs();
        if t1.is_none() {
            first += a;
        }
        if i >= n {
            over += a;
        }
        x = y;
        i += 1;
        if bell {
            if t1.is_none() {
                t1 = Some(i);
            }
            // i is now a regeneration epoch; stop once past n
            if i > n {
                break;
            }
        }
    }
    let t1 = t1.expect("loop exits after a regeneration");
    Ok((first, if t1 < n { over } else { 0.0 }))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FirstTourConstants {
    pub c1: Estimate,
    pub c2: Estimate,
    pub replicates: usize,
}

/// `C1` and `C2(n)` from `replicates` independent runs started at `x0`.
pub fn estimate_c1_c2<M: SplitChainModel>(
    model: &M,
    x0: &M::State,
    theta: f64,
    n: u64,
    replicates: usize,
    seed: u64,
) -> Result<FirstTourConstants> {
    if replicates < 2 {
        return Err(Error::InsufficientData {
            have: replicates,
            need: 2,
        });
    }
    let draws = (0..replicates as u64)
        .into_par_iter()
        .map(|r| {
            first_and_overshoot(
                model,
                x0,
                theta,
                n,
                RngStream::new(seed, streams::FIRST_TOUR + r),
            )
        })
        .collect::<Result<Vec<_>>>()?;
    let (first, over): (Vec<f64>, Vec<f64>) = draws.into_iter().unzip();
    Ok(FirstTourConstants {
        c1: root_second_moment(&first),
        c2: root_second_moment(&over),
        replicates,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimationConfig {
    pub tours: TourConfig,
    pub min_blocks: usize,
    pub replicates: usize,
    pub n_for_c2: u64,
}

impl Default for EstimationConfig {
    fn default() -> Self {
        Self {
            tours: TourConfig::default(),
            min_blocks: DEFAULT_MIN_BLOCKS,
            replicates: 10_000,
            n_for_c2: 100,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EmpiricalConstants {
    pub sigma_as_sq_hat: f64,
    pub c0_hat: f64,
    pub c1_hat: f64,
    pub c2_hat: f64,
    pub se_sigma_as_sq: f64,
    pub se_c0: f64,
    pub se_c1: f64,
    pub se_c2: f64,
    pub n_blocks: usize,
    pub n_replicates: usize,
    pub n_for_c2: u64,
    pub theta: f64,
    pub theta_is_plug_in: bool,
    pub warnings: Vec<String>,
}

impl EmpiricalConstants {
    pub fn sigma_as(&self) -> Estimate {
        let v = self.sigma_as_sq_hat.max(0.0).sqrt();
        Estimate {
            value: v,
            stderr: if v > 0.0 { self.se_sigma_as_sq / (2.0 * v) } else { 0.0 },
        }
    }
}

/// Estimates all four constants of the MSE inequality for the chain started
/// at `x0`. Without a known `theta` the grand mean of the tours stands in for
/// it, and the result is flagged as plug-in.
pub fn estimate_constants<M: SplitChainModel>(
    model: &M,
    x0: &M::State,
    cfg: &EstimationConfig,
    seed: u64,
) -> Result<EmpiricalConstants> {
    let sample = collect_tours(model, x0, &cfg.tours, seed)?;
    let sigma = estimate_sigma_as(&sample, model.theta(), cfg.min_blocks)?;
    let theta = sigma.theta;
    let c0 = estimate_c0(&sample);
    let mut warnings = Vec::new();
    if sigma.theta_is_plug_in {
        warnings.push(format!(
            "stationary mean unknown; using the tour average {theta:.6} in its place"
        ));
    }
    let (h1, h2) = c0_halves(&sample);
    let gap_se = (h1.stderr.powi(2) + h2.stderr.powi(2)).sqrt();
    if (h1.value - h2.value).abs() > 3.0 * gap_se {
        warnings.push(format!(
            "C0 differs between halves of the run ({:.4} vs {:.4}, {:.4} combined stderr); burn-in may be too short",
            h1.value, h2.value, gap_se
        ));
    }
    let ft = estimate_c1_c2(model, x0, theta, cfg.n_for_c2, cfg.replicates, seed)?;
    Ok(EmpiricalConstants {
        sigma_as_sq_hat: sigma.sigma_as_sq.value,
        c0_hat: c0.value,
        c1_hat: ft.c1.value,
        c2_hat: ft.c2.value,
        se_sigma_as_sq: sigma.sigma_as_sq.stderr,
        se_c0: c0.stderr,
        se_c1: ft.c1.stderr,
        se_c2: ft.c2.stderr,
        n_blocks: sigma.n_blocks,
        n_replicates: ft.replicates,
        n_for_c2: cfg.n_for_c2,
        theta,
        theta_is_plug_in: sigma.theta_is_plug_in,
        warnings,
    })
}

/// Final state of a plain (unsplit) chain after `n` steps together with
/// the ergodic average `(1/n) sum_{i<n} f(X_i)`.
fn plain_run<M: SplitChainModel>(model: &M, x0: &M::State, n: u64, mut rng: RngStream) -> (M::State, f64) {
    let mut x = x0.clone();
    let mut s = 0.0;
    for _ in 0..n {
        s += model.f(&x);
        x = model.step(&x, &mut rng);
    }
    (x, s / n as f64)
}

/// Root-MSE of the ergodic average over `n` steps of the plain chain.
pub fn estimate_rmse<M: SplitChainModel>(
    model: &M,
    n: u64,
    replicates: usize,
    x0: &M::State,
    seed: u64,
    theta: Option<f64>,
) -> Result<Estimate> {
    let theta = theta.or_else(|| model.theta()).ok_or_else(|| {
        Error::InvalidInput("the stationary mean is needed to measure the error".into())
    })?;
    if n == 0 || replicates < 2 {
        return Err(Error::InvalidInput("need n >= 1 and at least two replicates".into()));
    }
    let errs: Vec<f64> = (0..replicates as u64)
        .into_par_iter()
        .map(|r| plain_run(model, x0, n, RngStream::new(seed, streams::RMSE + r)).1 - theta)
        .collect();
    Ok(root_second_moment(&errs))
}

/// `X_n` of the plain chain in `replicates` independent runs.
pub fn plain_states_at<M: SplitChainModel>(
    model: &M,
    x0: &M::State,
    n: u64,
    replicates: usize,
    seed: u64,
) -> Vec<M::State> {
    (0..replicates as u64)
        .into_par_iter()
        .map(|r| plain_run(model, x0, n, RngStream::new(seed, streams::PLAIN + r)).0)
        .collect()
}
