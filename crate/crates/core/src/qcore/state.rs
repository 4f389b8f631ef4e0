use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::FRAC_1_SQRT_2;

use super::linalg::{ONE, ZERO};
use crate::{Error, Result, Tolerances};

/// A unit vector in `C^dim`.
///
/// States are compared projectively by [`same_ray`]; the stored amplitudes
/// keep whatever global phase they were built with.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Complex64>", into = "Vec<Complex64>")]
pub struct PureState {
    amps: Vec<Complex64>,
}

impl PureState {
    /// Wraps amplitudes that must already be normalized.
    pub fn new(amps: Vec<Complex64>) -> Result<Self> {
        if amps.is_empty() {
            return Err(Error::InvalidState("zero-dimensional state".into()));
        }
        if amps.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidState("non-finite amplitude".into()));
        }
        let norm2: f64 = amps.iter().map(|z| z.norm_sqr()).sum();
        if (norm2 - 1.0).abs() > Tolerances::DEFAULT.normalization {
            return Err(Error::InvalidState(format!("squared norm {norm2} != 1")));
        }
        Ok(Self { amps })
    }

    /// Rescales a nonzero vector to unit norm.
    pub fn normalized(amps: Vec<Complex64>) -> Result<Self> {
        let norm = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::InvalidState("cannot normalize a zero vector".into()));
        }
        Self::new(amps.into_iter().map(|z| z / norm).collect())
    }

    pub fn from_real(amps: &[f64]) -> Result<Self> {
        Self::normalized(amps.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    /// Computational basis vector `|index>`.
    pub fn basis(dim: usize, index: usize) -> Self {
        assert!(index < dim, "basis index {index} out of range for dim {dim}");
        let mut amps = vec![ZERO; dim];
        amps[index] = ONE;
        Self { amps }
    }

    pub fn zero() -> Self {
        Self::basis(2, 0)
    }

    pub fn one() -> Self {
        Self::basis(2, 1)
    }

    /// `(|0> + |1>)/√2`.
    pub fn plus() -> Self {
        Self {
            amps: vec![Complex64::new(FRAC_1_SQRT_2, 0.0); 2],
        }
    }

    /// `(|0> - |1>)/√2`.
    pub fn minus() -> Self {
        Self {
            amps: vec![
                Complex64::new(FRAC_1_SQRT_2, 0.0),
                Complex64::new(-FRAC_1_SQRT_2, 0.0),
            ],
        }
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    /// Bloch vector of a qubit state.
    pub fn bloch(&self) -> Result<[f64; 3]> {
        if self.dim() != 2 {
            return Err(Error::DimensionMismatch(self.dim(), 2));
        }
        let (a, b) = (self.amps[0], self.amps[1]);
        let c = a.conj() * b;
        Ok([2.0 * c.re, 2.0 * c.im, a.norm_sqr() - b.norm_sqr()])
    }

    /// Qubit state with the given Bloch direction.
    pub fn from_bloch(n: [f64; 3]) -> Result<Self> {
        let r = (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt();
        if !(r > 0.0) {
            return Err(Error::InvalidState("zero Bloch vector".into()));
        }
        let theta = (n[2] / r).clamp(-1.0, 1.0).acos();
        let phi = n[1].atan2(n[0]);
        Self::normalized(vec![
            Complex64::new((theta / 2.0).cos(), 0.0),
            Complex64::from_polar((theta / 2.0).sin(), phi),
        ])
    }
}

impl TryFrom<Vec<Complex64>> for PureState {
    type Error = Error;

    fn try_from(v: Vec<Complex64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<PureState> for Vec<Complex64> {
    fn from(s: PureState) -> Self {
        s.amps
    }
}

/// `<a|b>`: conjugate-linear in `a`, linear in `b`.
pub fn inner_product(a: &PureState, b: &PureState) -> Result<Complex64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch(a.dim(), b.dim()));
    }
    Ok(a.amps.iter().zip(&b.amps).map(|(x, y)| x.conj() * y).sum())
}

/// `a ⊗ b` with `a` as the slow (row-major) index.
pub fn tensor(a: &PureState, b: &PureState) -> PureState {
    let amps = a
        .amps
        .iter()
        .flat_map(|x| b.amps.iter().map(move |y| x * y))
        .collect();
    PureState { amps }
}

/// Equality up to global phase.
pub fn same_ray(a: &PureState, b: &PureState) -> Result<bool> {
    Ok(1.0 - inner_product(a, b)?.norm() <= Tolerances::DEFAULT.phase_equal)
}

fn overlap_sqr(a: &PureState, b: &PureState) -> Result<f64> {
    Ok(inner_product(a, b)?.norm_sqr().min(1.0))
}

/// `√(1 − |<a|b>|²)`.
pub fn quantum_distinguishability(a: &PureState, b: &PureState) -> Result<f64> {
    Ok((1.0 - overlap_sqr(a, b)?).max(0.0).sqrt())
}

/// `1 − √(1 − |<a|b>|²)`.
pub fn quantum_overlap(a: &PureState, b: &PureState) -> Result<f64> {
    Ok(1.0 - quantum_distinguishability(a, b)?)
}

/// Success probability of the optimal single-shot guess between two equiprobable states.
pub fn optimal_guess_probability(a: &PureState, b: &PureState) -> Result<f64> {
    Ok((1.0 + quantum_distinguishability(a, b)?) / 2.0)
}
