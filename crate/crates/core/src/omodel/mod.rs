//! Finite ontological models: preparations as distributions over a finite
//! ontic space `Λ = {0, .., n-1}` (with the power set as its σ-algebra),
//! experiments as response functions, and the metrics and checks defined on
//! them.

mod bayes;
mod classify;
mod generators;
mod metrics;
mod model;

pub use bayes::{bayes_posterior, posterior_ratio};
pub use classify::{classify, ModelClassification};
pub use generators::{canonical_psi_ontic, discretized_qubit_model, fibonacci_sphere};
pub use metrics::{
    classical_overlap, model_distinguishability, ontologically_distinct, support, tv_distance,
};
pub use model::{
    predicted_distribution, predicted_probability, reproduces_fragment, validate_model,
    DeviationRow, FiniteDistribution, OntModel, Reproduction, ResponseFunction, ResponseOutcome,
};
