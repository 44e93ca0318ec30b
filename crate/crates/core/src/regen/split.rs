use rayon::prelude::*;
use serde::Serialize;

use super::model::{checked_bell, SplitChainModel};
use super::streams;
use crate::error::{Error, Result};
use crate::numerics::RngStream;

/// Walks the split chain one transition at a time.
pub struct SplitWalker<'a, M: SplitChainModel> {
    model: &'a M,
    x: M::State,
    rng: RngStream,
}

impl<'a, M: SplitChainModel> SplitWalker<'a, M> {
    pub fn new(model: &'a M, x0: M::State, rng: RngStream) -> Self {
        Self { model, x: x0, rng }
    }

    pub fn current(&self) -> &M::State {
        &self.x
    }

    /// Moves from `X_i` to `X_{i+1}` and returns `(X_i, Gamma_i)`; a ringing
    /// bell means the chain regenerates at time `i + 1`.
    pub fn advance(&mut self) -> Result<(M::State, bool)> {
        let y = self.model.step(&self.x, &mut self.rng);
        let bell = if self.model.in_small_set(&self.x) {
            let q = checked_bell(self.model, &self.x, &y)?;
            self.rng.uniform() < q
        } else {
            false
        };
        Ok((std::mem::replace(&mut self.x, y), bell))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Block {
    pub start: u64,
    pub end: u64,
    pub sum_f: f64,
    pub sum_abs_fbar: f64,
    pub len: u64,
}

/// A split-chain trajectory with its regeneration structure.
///
/// The trajectory is extended past `n` up to `T_{R(n)}`, the first
/// regeneration epoch strictly after `n`.
#[derive(Debug, Clone, Serialize)]
pub struct RegenerationRecord<S> {
    pub n: u64,
    pub states: Vec<S>,
    pub bells: Vec<bool>,
    /// `T_1 < T_2 < ...`; `Gamma_{k-1} = 1` exactly when `k` is listed.
    pub regen_epochs: Vec<u64>,
    /// `R(n)`, 1-based index into `regen_epochs`.
    pub r_of_n: usize,
    /// `[0, T_1)`, distributed according to the start rather than `nu`.
    pub first_block: Block,
    /// Blocks partitioning `[T_1, T_{R(n)})`.
    pub blocks: Vec<Block>,
    /// Centering used for `sum_abs_fbar`.
    pub theta: f64,
    pub theta_is_plug_in: bool,
}

impl<S> RegenerationRecord<S> {
    /// `Delta(n) = T_{R(n)} - n`.
    pub fn overshoot(&self) -> u64 {
        self.regen_epochs[self.r_of_n - 1] - self.n
    }

    /// Block index of every time point: 0 for the first block, `k - 1`
    /// for `[T_{k-1}, T_k)`.
    pub fn block_ids(&self) -> Vec<usize> {
        let mut ids = Vec::with_capacity(self.states.len());
        let mut k = 0;
        for i in 0..self.states.len() as u64 {
            while k < self.regen_epochs.len() && self.regen_epochs[k] <= i {
                k += 1;
            }
            ids.push(k);
        }
        ids
    }
}

/// Runs the split chain from `x0` for `n` steps and on to `T_{R(n)}`.
///
/// `|f - theta|` uses the known `theta` when the model has one, otherwise
/// the average of `f` over the first `n` states.
pub fn simulate_split<M: SplitChainModel>(
    model: &M,
    n: u64,
    x0: M::State,
    seed: u64,
) -> Result<RegenerationRecord<M::State>> {
    if n == 0 {
        return Err(Error::InvalidInput("n must be at least 1".into()));
    }
    let mut walker = SplitWalker::new(model, x0, RngStream::new(seed, streams::TRAJECTORY));
    let mut states = Vec::new();
    let mut bells = Vec::new();
    let mut regen_epochs = Vec::new();
    loop {
        let (x, bell) = walker.advance()?;
        states.push(x);
        bells.push(bell);
        let t = states.len() as u64;
        if bell {
            regen_epochs.push(t);
            if t > n {
                break;
            }
        }
    }
    let (theta, theta_is_plug_in) = match model.theta() {
        Some(t) => (t, false),
        None => {
            let s: f64 = states[..n as usize].iter().map(|x| model.f(x)).sum();
            (s / n as f64, true)
        }
    };
    let block = |start: u64, end: u64| {
        let (mut sum_f, mut sum_abs) = (0.0, 0.0);
        for x in &states[start as usize..end as usize] {
            let v = model.f(x);
            sum_f += v;
            sum_abs += (v - theta).abs();
        }
        Block {
            start,
            end,
            sum_f,
            sum_abs_fbar: sum_abs,
            len: end - start,
        }
    };
    let first_block = block(0, regen_epochs[0]);
    let blocks = regen_epochs.windows(2).map(|w| block(w[0], w[1])).collect();
    Ok(RegenerationRecord {
        n,
        r_of_n: regen_epochs.len(),
        states,
        bells,
        regen_epochs,
        first_block,
        blocks,
        theta,
        theta_is_plug_in,
    })
}

/// Summary of one tour `[T_{k-1}, T_k)`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct Tour {
    pub len: u64,
    pub sum_f: f64,
    /// Visits to the small set.
    pub n_in_j: u64,
    /// Sum of `V^{1/2}` over the tour.
    pub sum_sqrt_v: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TourConfig {
    pub chains: usize,
    /// Complete tours kept in total, after burn-in.
    pub tours: usize,
    /// Fraction of each chain's tours discarded as burn-in.
    pub burn_in_fraction: f64,
}

impl Default for TourConfig {
    fn default() -> Self {
        Self {
            chains: 32,
            tours: 100_000,
            burn_in_fraction: 0.1,
        }
    }
}

/// Tours from several independent split chains, grouped by chain.
///
/// Every kept tour starts at a regeneration, so all of them are i.i.d.
/// copies of the tour under `nu`.
#[derive(Debug, Clone)]
pub struct TourSample {
    pub per_chain: Vec<Vec<Tour>>,
}

impl TourSample {
    pub fn tours(&self) -> impl Iterator<Item = &Tour> {
        self.per_chain.iter().flatten()
    }

    pub fn len(&self) -> usize {
        self.per_chain.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn total_steps(&self) -> u64 {
        self.tours().map(|t| t.len).sum()
    }
}

fn run_chain<M: SplitChainModel>(
    model: &M,
    x0: M::State,
    keep: usize,
    burn: usize,
    rng: RngStream,
) -> Result<Vec<Tour>> {
    let mut walker = SplitWalker::new(model, x0, rng);
    let mut tours = Vec::with_capacity(keep);
    let mut cur = Tour::default();
    // the block before the first regeneration is started from x0, not nu
    let mut skip = burn + 1;
    while tours.len() < keep {
        let (x, bell) = walker.advance()?;
        if skip == 0 {
            cur.len += 1;
            cur.sum_f += model.f(&x);
            cur.sum_sqrt_v += model.drift_v(&x).sqrt();
            if model.in_small_set(&x) {
                cur.n_in_j += 1;
            }
        }
        if bell {
            if skip == 0 {
                tours.push(std::mem::take(&mut cur));
            } else {
                skip -= 1;
            }
        }
    }
    Ok(tours)
}

/// Collects complete tours from `cfg.chains` independent chains started at
/// `x0`; chain `c` draws from stream `c` of the tour family, so the result
/// does not depend on the number of worker threads.
pub fn collect_tours<M: SplitChainModel>(
    model: &M,
    x0: &M::State,
    cfg: &TourConfig,
    seed: u64,
) -> Result<TourSample> {
    if cfg.chains == 0 || cfg.tours == 0 {
        return Err(Error::InvalidInput("need at least one chain and one tour".into()));
    }
    if !(0.0..1.0).contains(&cfg.burn_in_fraction) {
        return Err(Error::InvalidInput(format!(
            "burn-in fraction {} outside [0, 1)",
            cfg.burn_in_fraction
        )));
    }
    let chains = cfg.chains.min(cfg.tours);
    let base = cfg.tours / chains;
    let extra = cfg.tours % chains;
    let per_chain = (0..chains)
        .into_par_iter()
        .map(|c| {
            let keep = base + usize::from(c < extra);
            let burn = (cfg.burn_in_fraction * keep as f64).ceil() as usize;
            run_chain(
                model,
                x0.clone(),
                keep,
                burn,
                RngStream::new(seed, streams::TOURS + c as u64),
            )
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(TourSample { per_chain })
}
