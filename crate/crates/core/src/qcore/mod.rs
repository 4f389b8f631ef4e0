//! Small-dimension complex linear algebra and the quantum side of the
//! framework: states, tensor products, POVMs, Born probabilities and the
//! pairwise distinguishability / overlap measures.

mod experiment;
mod fragment;
pub mod linalg;
mod state;

pub use experiment::{Experiment, Outcome};
pub use fragment::Fragment;
pub use linalg::CMatrix;
pub use num_complex::Complex64 as Complex;
pub use state::{
    inner_product, optimal_guess_probability, quantum_distinguishability, quantum_overlap,
    same_ray, tensor, PureState,
};

use crate::Result;

/// Probability of `outcome` when `state` is measured with `experiment`.
///
/// Computed as `<s|E|s>` and clamped to `[0, 1]`.
pub fn born_probability(state: &PureState, experiment: &Experiment, outcome: &str) -> Result<f64> {
    let o = experiment.outcome(outcome)?;
    experiment.check_dim(state.dim())?;
    Ok(linalg::expectation(&o.effect, state.amplitudes()).clamp(0.0, 1.0))
}

/// Born probabilities for every outcome, in declaration order.
pub fn born_distribution(state: &PureState, experiment: &Experiment) -> Result<Vec<f64>> {
    experiment.check_dim(state.dim())?;
    Ok(experiment
        .outcomes()
        .iter()
        .map(|o| linalg::expectation(&o.effect, state.amplitudes()).clamp(0.0, 1.0))
        .collect())
}
