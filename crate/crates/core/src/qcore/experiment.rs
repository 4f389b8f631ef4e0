use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

use super::linalg::{self, CMatrix};
use super::PureState;
use crate::{Error, Result, Tolerances};

/// One labelled POVM element.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Outcome {
    pub label: String,
    #[serde(with = "effect_serde")]
    pub effect: CMatrix,
}

/// A finite, outcome-labelled POVM.
///
/// [`Experiment::new`] enforces the POVM invariants. Deserialized values and
/// [`Experiment::new_unchecked`] only enforce the structural ones (square
/// effects of one size, unique labels); call [`Experiment::violations`] to
/// audit the rest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawExperiment", into = "RawExperiment")]
pub struct Experiment {
    dim: usize,
    outcomes: Vec<Outcome>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawExperiment {
    outcomes: Vec<Outcome>,
}

impl TryFrom<RawExperiment> for Experiment {
    type Error = Error;
    fn try_from(raw: RawExperiment) -> Result<Self> {
        Experiment::new_unchecked(raw.outcomes)
    }
}

impl From<Experiment> for RawExperiment {
    fn from(e: Experiment) -> Self {
        RawExperiment { outcomes: e.outcomes }
    }
}

impl Experiment {
    pub fn new(outcomes: Vec<Outcome>) -> Result<Self> {
        let e = Self::new_unchecked(outcomes)?;
        let v = e.violations(&Tolerances::DEFAULT);
        if !v.is_empty() {
            return Err(Error::InvalidExperiment(v.join("; ")));
        }
        Ok(e)
    }

    pub fn new_unchecked(outcomes: Vec<Outcome>) -> Result<Self> {
        let first = outcomes
            .first()
            .ok_or_else(|| Error::InvalidExperiment("no outcomes".into()))?;
        let dim = first.effect.nrows();
        if dim == 0 {
            return Err(Error::InvalidExperiment("zero-dimensional effect".into()));
        }
        let mut seen = BTreeSet::new();
        for o in &outcomes {
            if o.effect.nrows() != dim || o.effect.ncols() != dim {
                return Err(Error::InvalidExperiment(format!(
                    "effect `{}` is {}x{}, expected {dim}x{dim}",
                    o.label,
                    o.effect.nrows(),
                    o.effect.ncols()
                )));
            }
            if o.effect.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                return Err(Error::InvalidExperiment(format!("effect `{}` not finite", o.label)));
            }
            if !seen.insert(o.label.as_str()) {
                return Err(Error::InvalidExperiment(format!("duplicate label `{}`", o.label)));
            }
        }
        Ok(Self { dim, outcomes })
    }

    /// Rank-one projective measurement onto an orthonormal basis.
    pub fn projective<S: Into<String>>(
        basis: &[PureState],
        labels: impl IntoIterator<Item = S>,
    ) -> Result<Self> {
        let outcomes = basis
            .iter()
            .zip(labels)
            .map(|(v, l)| Outcome {
                label: l.into(),
                effect: linalg::outer(v.amplitudes()),
            })
            .collect::<Vec<_>>();
        if outcomes.len() != basis.len() {
            return Err(Error::InvalidExperiment("label count mismatch".into()));
        }
        Self::new(outcomes)
    }

    /// The computational-basis measurement with labels `"0"`, `"1"`, ...
    pub fn computational(dim: usize) -> Self {
        let basis: Vec<_> = (0..dim).map(|i| PureState::basis(dim, i)).collect();
        Self::projective(&basis, (0..dim).map(|i| i.to_string()))
            .expect("computational basis is a valid POVM")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn outcomes(&self) -> &[Outcome] {
        &self.outcomes
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.outcomes.iter().map(|o| o.label.as_str())
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.outcomes
            .iter()
            .position(|o| o.label == label)
            .ok_or_else(|| Error::UnknownOutcome(label.to_string()))
    }

    pub fn outcome(&self, label: &str) -> Result<&Outcome> {
        Ok(&self.outcomes[self.index_of(label)?])
    }

    pub(crate) fn check_dim(&self, dim: usize) -> Result<()> {
        if dim != self.dim {
            return Err(Error::DimensionMismatch(dim, self.dim));
        }
        Ok(())
    }

    /// Every POVM invariant that fails, as human-readable strings.
    pub fn violations(&self, tol: &Tolerances) -> Vec<String> {
        let mut out = Vec::new();
        let mut sum = CMatrix::zeros(self.dim, self.dim);
        for o in &self.outcomes {
            let h = linalg::hermitian_defect(&o.effect);
            if h > tol.hermitian {
                out.push(format!("effect `{}` not Hermitian (defect {h:.3e})", o.label));
            }
            let m = linalg::min_eigenvalue(&o.effect);
            if m < -tol.positivity {
                out.push(format!("effect `{}` has negative eigenvalue {m:.3e}", o.label));
            }
            sum += &o.effect;
        }
        let c = linalg::max_abs_diff(&sum, &linalg::identity(self.dim));
        if c > tol.completeness {
            out.push(format!("effects do not sum to identity (defect {c:.3e})"));
        }
        out
    }

    pub fn is_valid(&self, tol: &Tolerances) -> bool {
        self.violations(tol).is_empty()
    }
}

/// Effects as row-major nested arrays of `[re, im]`.
mod effect_serde {
    use super::*;
    use serde::{de::Error as _, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(m: &CMatrix, s: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<Complex64>> = (0..m.nrows())
            .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
            .collect();
        rows.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<CMatrix, D::Error> {
        let rows = Vec::<Vec<Complex64>>::deserialize(d)?;
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(D::Error::custom("effect must be a square matrix"));
        }
        Ok(CMatrix::from_fn(n, n, |i, j| rows[i][j]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::{born_distribution, born_probability};

    #[test]
    fn computational_measurement() {
        let e = Experiment::computational(2);
        assert!((born_probability(&PureState::plus(), &e, "0").unwrap() - 0.5).abs() < 1e-15);
        assert_eq!(born_probability(&PureState::zero(), &e, "1").unwrap(), 0.0);
        assert!(matches!(
            born_probability(&PureState::zero(), &e, "2"),
            Err(Error::UnknownOutcome(_))
        ));
        let d = born_distribution(&PureState::plus(), &e).unwrap();
        assert!((d.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn invalid_povms_rejected() {
        let half = CMatrix::identity(2, 2) * Complex64::new(0.5, 0.0);
        let too_much = vec![
            Outcome { label: "a".into(), effect: half.clone() },
            Outcome { label: "b".into(), effect: half.clone() },
            Outcome { label: "c".into(), effect: half.clone() },
        ];
        assert!(Experiment::new(too_much.clone()).is_err());
        let e = Experiment::new_unchecked(too_much).unwrap();
        assert_eq!(e.violations(&Tolerances::DEFAULT).len(), 1);

        let neg = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            Complex64::new(1.5, 0.0),
            Complex64::new(-0.5, 0.0),
        ]));
        let rest = CMatrix::identity(2, 2) - &neg;
        let e = Experiment::new_unchecked(vec![
            Outcome { label: "a".into(), effect: neg },
            Outcome { label: "b".into(), effect: rest },
        ])
        .unwrap();
        assert_eq!(e.violations(&Tolerances::DEFAULT).len(), 2);

        let dup = vec![
            Outcome { label: "a".into(), effect: half.clone() },
            Outcome { label: "a".into(), effect: half },
        ];
        assert!(Experiment::new_unchecked(dup).is_err());
    }

    #[test]
    fn json_shape() {
        let e = Experiment::computational(2);
        let v = serde_json::to_value(&e).unwrap();
        assert_eq!(v["outcomes"][0]["label"], "0");
        assert_eq!(v["outcomes"][0]["effect"][0][0], serde_json::json!([1.0, 0.0]));
        let back: Experiment = serde_json::from_value(v).unwrap();
        assert_eq!(back, e);
    }
}
