//! Numerical tolerances shared by every check in the crate.

/// All slack values used when comparing floating-point quantities against
/// exact statements. [`Tolerances::DEFAULT`] carries the documented defaults.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// State normalization.
    pub normalization: f64,
    /// Hermiticity of effects.
    pub hermitian: f64,
    /// Minimum eigenvalue allowed for an effect.
    pub positivity: f64,
    /// Completeness of a POVM, entrywise.
    pub completeness: f64,
    /// Global-phase equality of states, on `1 - |<a|b>|`.
    pub phase_equal: f64,
    /// Normalization of distributions and response sums.
    pub distribution: f64,
    /// Response values outside `[0, 1]`.
    pub response_range: f64,
    /// Weight below which an ontic state is outside a support.
    pub support: f64,
    /// Outcome probability counted as precluded.
    pub preclusion: f64,
    /// Equality in the maximal ψ-epistemic classification.
    pub classification: f64,
    /// LP primal feasibility.
    pub lp_feasibility: f64,
    /// LP complementary slackness / duality gap.
    pub lp_optimality: f64,
    /// Posterior mass counted as "uniquely determined".
    pub determination: f64,
}

impl Tolerances {
    pub const DEFAULT: Tolerances = Tolerances {
        normalization: 1e-12,
        hermitian: 1e-12,
        positivity: 1e-10,
        completeness: 1e-10,
        phase_equal: 1e-10,
        distribution: 1e-10,
        response_range: 1e-12,
        support: 1e-12,
        preclusion: 1e-10,
        classification: 1e-6,
        lp_feasibility: 1e-9,
        lp_optimality: 1e-7,
        determination: 1e-9,
    };
}

impl Default for Tolerances {
    fn default() -> Self {
        Self::DEFAULT
    }
}
