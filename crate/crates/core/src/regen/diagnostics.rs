//! Statistical self-checks of the split-chain simulation.

use serde::Serialize;

use super::estimate::{mean_estimate, plain_states_at, ratio_estimate};
use super::model::SplitChainModel;
use super::split::{SplitWalker, TourSample};
use super::streams;
use crate::error::Result;
use crate::numerics::{ks_two_sample, RngStream};
use rayon::prelude::*;

/// An estimate compared with a reference value in standard-error units.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZCheck {
    pub name: &'static str,
    pub estimate: f64,
    pub reference: f64,
    pub stderr: f64,
}

impl ZCheck {
    pub fn z(&self) -> f64 {
        (self.estimate - self.reference) / self.stderr
    }

    pub fn passes(&self, k: f64) -> bool {
        (self.estimate - self.reference).abs() <= k * self.stderr
    }
}

/// Observed regeneration rate `1 / mean(tau)` against `beta pi(J)` with
/// `pi(J)` estimated by occupation of `J`.
///
/// Each visit to `J` rings the bell with probability exactly `beta`, so
/// `1 - beta n_J` has mean zero per tour; its spread gives the error bar.
pub fn regeneration_rate_check(sample: &TourSample, beta: f64) -> ZCheck {
    let d: Vec<f64> = sample.tours().map(|t| 1.0 - beta * t.n_in_j as f64).collect();
    let len: Vec<f64> = sample.tours().map(|t| t.len as f64).collect();
    let mean_len = mean_estimate(&len).value;
    let diff = mean_estimate(&d);
    let steps = sample.total_steps() as f64;
    let n_j: u64 = sample.tours().map(|t| t.n_in_j).sum();
    ZCheck {
        name: "regeneration rate vs beta pi(J)",
        estimate: sample.len() as f64 / steps,
        reference: beta * n_j as f64 / steps,
        stderr: diff.stderr / mean_len,
    }
}

/// Lag-1 autocorrelation of consecutive block sums `Xi_k(fbar)` within
/// each chain; zero for independent blocks.
pub fn block_lag1_check(sample: &TourSample, theta: f64) -> ZCheck {
    let centered = |c: &[super::split::Tour]| -> Vec<f64> {
        c.iter().map(|t| t.sum_f - theta * t.len as f64).collect()
    };
    let all: Vec<f64> = sample.per_chain.iter().flat_map(|c| centered(c)).collect();
    let m = all.iter().sum::<f64>() / all.len() as f64;
    let var = all.iter().map(|x| (x - m).powi(2)).sum::<f64>();
    let mut cov = 0.0;
    let mut pairs = 0usize;
    for c in &sample.per_chain {
        let xs = centered(c);
        for w in xs.windows(2) {
            cov += (w[0] - m) * (w[1] - m);
            pairs += 1;
        }
    }
    let r1 = cov / var * all.len() as f64 / pairs as f64;
    ZCheck {
        name: "block lag-1 autocorrelation",
        estimate: r1,
        reference: 0.0,
        stderr: 1.0 / (pairs as f64).sqrt(),
    }
}

/// Tour-level second moment of `g = V^{1/2}` against its expression through
/// stationary time averages,
/// `E_nu Xi(g)^2 = E_nu T (E_pi g^2 + 2 sum_n E_pi g(X_0) g(X_n) 1(T > n))`,
/// with `E_nu T` taken as `1 / (beta pi(J))`.
///
/// Summed over a run, the bracket is the average over time points of
/// `g(X_i)` times twice the remaining sum of `g` in the same tour plus
/// `g(X_i)`, which per tour adds up to `Xi(g)^2`.
pub fn lemma_check(sample: &TourSample, beta: f64) -> ZCheck {
    let w: Vec<f64> = sample.tours().map(|t| t.sum_sqrt_v.powi(2)).collect();
    let nj: Vec<f64> = sample.tours().map(|t| t.n_in_j as f64).collect();
    let len: Vec<f64> = sample.tours().map(|t| t.len as f64).collect();
    let n = w.len() as f64;
    let mw = w.iter().sum::<f64>() / n;
    let mn = nj.iter().sum::<f64>() / n;
    let steps: f64 = len.iter().sum();
    let time_avg = w.iter().sum::<f64>() / steps;
    let e_nu_t = steps / (beta * nj.iter().sum::<f64>());
    let rhs = e_nu_t * time_avg;
    // linearized difference lhs - rhs = mw (1 - 1 / (beta mn))
    let a = 1.0 - 1.0 / (beta * mn);
    let b = mw / (beta * mn * mn);
    let psi: Vec<f64> = w
        .iter()
        .zip(&nj)
        .map(|(wk, nk)| a * (wk - mw) + b * (nk - mn))
        .collect();
    ZCheck {
        name: "tour second moment of V^1/2",
        estimate: mw,
        reference: rhs,
        stderr: mean_estimate(&psi).stderr,
    }
}

/// `sum Xi_k(f) / sum tau_k` against the known stationary mean.
pub fn kac_check(sample: &TourSample, theta: f64) -> ZCheck {
    let f: Vec<f64> = sample.tours().map(|t| t.sum_f).collect();
    let len: Vec<f64> = sample.tours().map(|t| t.len as f64).collect();
    let e = ratio_estimate(&f, &len);
    ZCheck {
        name: "tour mean of f vs stationary mean",
        estimate: e.value,
        reference: theta,
        stderr: e.stderr,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KsResult {
    pub n: u64,
    pub statistic: f64,
    pub p_value: f64,
}

/// Compares the law of `X_n` under the split simulation with that of the
/// plain chain at each `n` in `times`, by two-sample KS on the projection.
pub fn marginal_law_battery<M: SplitChainModel>(
    model: &M,
    x0: &M::State,
    times: &[u64],
    replicates: usize,
    seed: u64,
) -> Result<Vec<KsResult>> {
    times
        .iter()
        .map(|&n| {
            let split: Vec<f64> = (0..replicates as u64)
                .into_par_iter()
                .map(|r| {
                    let rng = RngStream::new(seed, streams::SPLIT_MARGINAL + r);
                    let mut w = SplitWalker::new(model, x0.clone(), rng);
                    for _ in 0..n {
                        w.advance()?;
                    }
                    Ok(model.projection(w.current()))
                })
                .collect::<Result<_>>()?;
            let plain: Vec<f64> = plain_states_at(model, x0, n, replicates, seed)
                .iter()
                .map(|x| model.projection(x))
                .collect();
            let (statistic, p_value) = ks_two_sample(&split, &plain);
            Ok(KsResult {
                n,
                statistic,
                p_value,
            })
        })
        .collect()
}
