//! Antidistinguishability: certificates, the explicit two-qubit measurement
//! for the `|0>, |+>` product quadruple, a numerical POVM search and the
//! exact criterion for triples.

mod search;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::omodel::{predicted_distribution, OntModel};
use crate::qcore::{born_distribution, tensor, Complex, Experiment, PureState};
use crate::{Error, Result, Tolerances};

pub use search::search_antidist;

/// An experiment together with, for every outcome, the state it rules out.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AntidistCertificate {
    pub states: Vec<PureState>,
    pub experiment: Experiment,
    /// Outcome label to the index of the precluded state.
    pub assignment: BTreeMap<String, usize>,
    /// Born probability of each outcome (in experiment order) on its
    /// precluded state.
    pub preclusion_values: Vec<f64>,
}

impl AntidistCertificate {
    /// Builds a certificate, computing the preclusion values.
    pub fn new(
        states: Vec<PureState>,
        experiment: Experiment,
        assignment: BTreeMap<String, usize>,
    ) -> Result<Self> {
        let mut c = Self {
            states,
            experiment,
            assignment,
            preclusion_values: Vec::new(),
        };
        c.preclusion_values = c.computed_preclusions()?;
        Ok(c)
    }

    fn computed_preclusions(&self) -> Result<Vec<f64>> {
        if self.states.is_empty() {
            return Err(Error::MalformedCertificate("no states".into()));
        }
        if self.assignment.len() != self.experiment.outcomes().len() {
            return Err(Error::MalformedCertificate(format!(
                "assignment has {} entries for {} outcomes",
                self.assignment.len(),
                self.experiment.outcomes().len()
            )));
        }
        let mut dists = Vec::with_capacity(self.states.len());
        for s in &self.states {
            if s.dim() != self.experiment.dim() {
                return Err(Error::MalformedCertificate(format!(
                    "state of dimension {} for a {}-dimensional experiment",
                    s.dim(),
                    self.experiment.dim()
                )));
            }
            dists.push(born_distribution(s, &self.experiment)?);
        }
        self.experiment
            .labels()
            .enumerate()
            .map(|(k, label)| {
                let i = *self.assignment.get(label).ok_or_else(|| {
                    Error::MalformedCertificate(format!("outcome `{label}` unassigned"))
                })?;
                dists
                    .get(i)
                    .map(|d| d[k])
                    .ok_or_else(|| Error::MalformedCertificate(format!("state index {i} out of range")))
            })
            .collect()
    }
}

/// Checks a certificate from scratch. Returns whether it is valid at `tol`
/// together with the largest recomputed preclusion value.
///
/// Stored preclusion values that disagree with the recomputed ones by more
/// than `1e-9` invalidate the certificate.
pub fn verify_certificate(c: &AntidistCertificate, tol: f64) -> Result<(bool, f64)> {
    let values = c.computed_preclusions()?;
    if c.preclusion_values.len() != values.len() {
        return Err(Error::MalformedCertificate(format!(
            "{} preclusion values for {} outcomes",
            c.preclusion_values.len(),
            values.len()
        )));
    }
    let max = values.iter().copied().fold(0.0, f64::max);
    let consistent = values
        .iter()
        .zip(&c.preclusion_values)
        .all(|(a, b)| (a - b).abs() <= 1e-9);
    let valid = c.experiment.is_valid(&Tolerances::DEFAULT);
    Ok((valid && consistent && max <= tol, max))
}

fn combine(terms: &[(f64, PureState)]) -> PureState {
    let dim = terms[0].1.dim();
    let mut v = vec![Complex::new(0.0, 0.0); dim];
    for (w, s) in terms {
        for (x, a) in v.iter_mut().zip(s.amplitudes()) {
            *x += a * *w;
        }
    }
    PureState::normalized(v).expect("nonzero combination")
}

/// The product quadruple `|00>, |0+>, |+0>, |++>` in that order.
pub fn pbr_states() -> Vec<PureState> {
    let (z, p) = (PureState::zero(), PureState::plus());
    vec![tensor(&z, &z), tensor(&z, &p), tensor(&p, &z), tensor(&p, &p)]
}

/// The entangled basis whose `k`-th element is orthogonal to the `k`-th
/// state of [`pbr_states`].
pub fn pbr_measurement() -> AntidistCertificate {
    let (z, o, p, m) = (
        PureState::zero(),
        PureState::one(),
        PureState::plus(),
        PureState::minus(),
    );
    let basis = [
        combine(&[(1.0, tensor(&z, &o)), (1.0, tensor(&o, &z))]),
        combine(&[(1.0, tensor(&z, &m)), (1.0, tensor(&o, &p))]),
        combine(&[(1.0, tensor(&p, &o)), (1.0, tensor(&m, &z))]),
        combine(&[(1.0, tensor(&p, &m)), (1.0, tensor(&m, &p))]),
    ];
    let labels: Vec<String> = (1..=4).map(|k| format!("xi{k}")).collect();
    let experiment =
        Experiment::projective(&basis, labels.clone()).expect("the basis is orthonormal");
    let assignment = labels.into_iter().enumerate().map(|(k, l)| (l, k)).collect();
    AntidistCertificate::new(pbr_states(), experiment, assignment)
        .expect("certificate is well formed")
}

/// Exact antidistinguishability test for three pure states in terms of their
/// pairwise squared overlaps. The boundary `(1-a-b-c)^2 = 4abc` counts as
/// antidistinguishable; a slack of `1e-12` absorbs rounding at it.
pub fn triple_criterion(a: f64, b: f64, c: f64) -> bool {
    let s = a + b + c;
    s < 1.0 && (1.0 - s).powi(2) >= 4.0 * a * b * c - 1e-12
}

/// Checks that no ontic state carries weight under every listed preparation.
///
/// `preps[i]` names the model preparation of `c.states[i]`; `experiment`
/// names the certificate's experiment in the model. Fails with
/// [`Error::Precondition`] when the model does not reproduce the
/// certificate's statistics within `1e-8`.
pub fn null_joint_overlap_check(
    m: &OntModel,
    c: &AntidistCertificate,
    experiment: &str,
    preps: &[&str],
) -> Result<bool> {
    if preps.len() != c.states.len() {
        return Err(Error::Input(format!(
            "{} preparation names for {} states",
            preps.len(),
            c.states.len()
        )));
    }
    let labels: Vec<&str> = c.experiment.labels().collect();
    let declared: Vec<&str> = m.experiment(experiment)?.iter().map(|o| o.label.as_str()).collect();
    if labels != declared {
        return Err(Error::Precondition(format!(
            "model experiment `{experiment}` has different outcomes"
        )));
    }
    for (name, state) in preps.iter().zip(&c.states) {
        let model_p = predicted_distribution(m, name, experiment)?;
        let born = born_distribution(state, &c.experiment)?;
        let dev = model_p
            .iter()
            .zip(&born)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        if dev > 1e-8 {
            return Err(Error::Precondition(format!(
                "preparation `{name}` misses the statistics by {dev:.3e}"
            )));
        }
    }
    let dists = preps
        .iter()
        .map(|p| m.preparation(p))
        .collect::<Result<Vec<_>>>()?;
    Ok(!(0..m.lambda_size).any(|l| dists.iter().all(|d| d.0[l] > 1e-10)))
}
