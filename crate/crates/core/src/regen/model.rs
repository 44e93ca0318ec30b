use crate::error::{Error, Result};
use crate::numerics::RngStream;

/// Tolerance on bell probabilities above one before the model is blamed.
pub const BELL_SLACK: f64 = 1e-9;

/// A Markov kernel together with a small set `J` and minorization
/// `P(x, .) >= beta 1(x in J) nu(.)`, enough to run the split chain.
///
/// Regenerations are identified retrospectively: after drawing
/// `y ~ P(x, .)` from `x in J`, the bell rings with probability
/// `beta nu(y) / p(y | x)`.
pub trait SplitChainModel: Sync {
    type State: Clone + Send + Sync;

    fn name(&self) -> &'static str;

    fn step(&self, x: &Self::State, rng: &mut RngStream) -> Self::State;

    fn in_small_set(&self, x: &Self::State) -> bool;

    fn beta(&self) -> f64;

    fn transition_density(&self, _x: &Self::State, _y: &Self::State) -> Option<f64> {
        None
    }

    fn nu_density(&self, _y: &Self::State) -> Option<f64> {
        None
    }

    /// `beta nu(y) / p(y | x)` for `x in J`. Models whose densities share
    /// factors can override this with the simplified ratio.
    fn bell_probability(&self, x: &Self::State, y: &Self::State) -> Result<f64> {
        let p = self
            .transition_density(x, y)
            .ok_or(Error::MissingDensity(self.name()))?;
        let nu = self.nu_density(y).ok_or(Error::MissingDensity(self.name()))?;
        if p <= 0.0 {
            // y was drawn from p(.|x), so this only happens through underflow
            return Ok(0.0);
        }
        Ok(self.beta() * nu / p)
    }

    /// Drift function, at least 1.
    fn drift_v(&self, x: &Self::State) -> f64;

    /// Target function whose stationary mean is estimated.
    fn f(&self, x: &Self::State) -> f64;

    /// Known stationary mean of `f`, when available.
    fn theta(&self) -> Option<f64> {
        None
    }

    /// Scalar summary of a state for export and distribution tests.
    fn projection(&self, x: &Self::State) -> f64;

    /// Natural deterministic starting point.
    fn default_start(&self) -> Self::State;

    /// Start used to describe the moments of the initial law: `V(x0)`.
    fn start_v(&self, x0: &Self::State) -> f64 {
        self.drift_v(x0)
    }
}

pub(crate) fn checked_bell<M: SplitChainModel>(model: &M, x: &M::State, y: &M::State) -> Result<f64> {
    let q = model.bell_probability(x, y)?;
    if !(q <= 1.0 + BELL_SLACK) || q < 0.0 {
        return Err(Error::MinorizationViolated {
            x: model.projection(x),
            y: model.projection(y),
            ratio: q,
        });
    }
    Ok(q.min(1.0))
}
