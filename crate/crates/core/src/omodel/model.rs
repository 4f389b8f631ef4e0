use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};

use crate::qcore::{born_distribution, Fragment};
use crate::{Error, Result, Tolerances};

/// Probability weights, one per ontic state index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FiniteDistribution(pub Vec<f64>);

impl FiniteDistribution {
    pub fn point(size: usize, index: usize) -> Self {
        let mut w = vec![0.0; size];
        w[index] = 1.0;
        Self(w)
    }

    pub fn uniform(size: usize) -> Self {
        Self(vec![1.0 / size as f64; size])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn weights(&self) -> &[f64] {
        &self.0
    }

    pub fn total(&self) -> f64 {
        self.0.iter().sum()
    }
}

/// Per-ontic-state probability of one outcome.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ResponseFunction(pub Vec<f64>);

impl ResponseFunction {
    pub fn constant(size: usize, value: f64) -> Self {
        Self(vec![value; size])
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResponseOutcome {
    pub label: String,
    pub response: ResponseFunction,
}

/// A finite ontological model.
///
/// Fields are public so that generators and LP fits can assemble models
/// directly; [`validate_model`] audits the invariants. Deserialization
/// enforces the structural ones (vector lengths, finite numbers, unique
/// outcome labels).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawModel", into = "RawModel")]
pub struct OntModel {
    pub lambda_size: usize,
    pub preparations: BTreeMap<String, FiniteDistribution>,
    pub experiments: BTreeMap<String, Vec<ResponseOutcome>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawModel {
    lambda_size: usize,
    preparations: BTreeMap<String, FiniteDistribution>,
    experiments: BTreeMap<String, Vec<ResponseOutcome>>,
}

impl TryFrom<RawModel> for OntModel {
    type Error = Error;
    fn try_from(r: RawModel) -> Result<Self> {
        let m = OntModel {
            lambda_size: r.lambda_size,
            preparations: r.preparations,
            experiments: r.experiments,
        };
        m.check_structure()?;
        Ok(m)
    }
}

impl From<OntModel> for RawModel {
    fn from(m: OntModel) -> Self {
        RawModel {
            lambda_size: m.lambda_size,
            preparations: m.preparations,
            experiments: m.experiments,
        }
    }
}

impl OntModel {
    pub fn new(lambda_size: usize) -> Self {
        Self {
            lambda_size,
            preparations: BTreeMap::new(),
            experiments: BTreeMap::new(),
        }
    }

    /// Lengths, finiteness and label uniqueness.
    pub fn check_structure(&self) -> Result<()> {
        let n = self.lambda_size;
        if n == 0 {
            return Err(Error::Input("lambda_size must be positive".into()));
        }
        for (name, p) in &self.preparations {
            if p.len() != n {
                return Err(Error::Input(format!(
                    "preparation `{name}` has {} weights, lambda_size is {n}",
                    p.len()
                )));
            }
            if p.0.iter().any(|w| !w.is_finite()) {
                return Err(Error::Input(format!("preparation `{name}` has non-finite weight")));
            }
        }
        for (name, outs) in &self.experiments {
            if outs.is_empty() {
                return Err(Error::Input(format!("experiment `{name}` has no outcomes")));
            }
            let mut seen = BTreeSet::new();
            for o in outs {
                if !seen.insert(o.label.as_str()) {
                    return Err(Error::Input(format!("experiment `{name}` repeats `{}`", o.label)));
                }
                if o.response.0.len() != n {
                    return Err(Error::Input(format!(
                        "response `{name}/{}` has {} values, lambda_size is {n}",
                        o.label,
                        o.response.0.len()
                    )));
                }
                if o.response.0.iter().any(|v| !v.is_finite()) {
                    return Err(Error::Input(format!("response `{name}/{}` not finite", o.label)));
                }
            }
        }
        Ok(())
    }

    pub fn preparation(&self, name: &str) -> Result<&FiniteDistribution> {
        self.preparations
            .get(name)
            .ok_or_else(|| Error::UnknownPreparation(name.to_string()))
    }

    pub fn experiment(&self, name: &str) -> Result<&[ResponseOutcome]> {
        self.experiments
            .get(name)
            .map(Vec::as_slice)
            .ok_or_else(|| Error::UnknownExperiment(name.to_string()))
    }
}

/// Every invariant violation of `m`, each naming its location.
pub fn validate_model(m: &OntModel, tol: &Tolerances) -> Vec<String> {
    let n = m.lambda_size;
    let mut out = Vec::new();
    if n == 0 {
        out.push("lambda_size is zero".to_string());
    }
    for (name, p) in &m.preparations {
        if p.len() != n {
            out.push(format!("preparation `{name}`: length {} != {n}", p.len()));
            continue;
        }
        for (i, &w) in p.0.iter().enumerate() {
            if !(w >= 0.0) {
                out.push(format!("preparation `{name}`: negative weight {w} at λ={i}"));
            }
        }
        let s = p.total();
        if !((s - 1.0).abs() <= tol.distribution) {
            out.push(format!("preparation `{name}`: weights sum to {s}"));
        }
    }
    for (name, outs) in &m.experiments {
        if outs.iter().any(|o| o.response.0.len() != n) {
            out.push(format!("experiment `{name}`: response length != {n}"));
            continue;
        }
        for o in outs {
            for (i, &v) in o.response.0.iter().enumerate() {
                if !(v >= -tol.response_range && v <= 1.0 + tol.response_range) {
                    out.push(format!("experiment `{name}/{}`: response {v} at λ={i}", o.label));
                }
            }
        }
        for i in 0..n {
            let s: f64 = outs.iter().map(|o| o.response.0[i]).sum();
            if !((s - 1.0).abs() <= tol.distribution) {
                out.push(format!("experiment `{name}`: responses sum to {s} at λ={i}"));
            }
        }
    }
    out
}

fn expectation(f: &ResponseFunction, p: &FiniteDistribution) -> f64 {
    f.0.iter().zip(&p.0).map(|(a, b)| a * b).sum()
}

/// `Σ_λ f_k(λ) P(λ)` clamped to `[0, 1]`.
pub fn predicted_probability(m: &OntModel, prep: &str, exp: &str, outcome: &str) -> Result<f64> {
    let p = m.preparation(prep)?;
    let outs = m.experiment(exp)?;
    let o = outs
        .iter()
        .find(|o| o.label == outcome)
        .ok_or_else(|| Error::UnknownOutcome(outcome.to_string()))?;
    Ok(expectation(&o.response, p).clamp(0.0, 1.0))
}

/// Predicted outcome distribution in declaration order.
pub fn predicted_distribution(m: &OntModel, prep: &str, exp: &str) -> Result<Vec<f64>> {
    let p = m.preparation(prep)?;
    Ok(m.experiment(exp)?
        .iter()
        .map(|o| expectation(&o.response, p).clamp(0.0, 1.0))
        .collect())
}

/// One compared statistic.
#[derive(Debug, Clone, PartialEq)]
pub struct DeviationRow {
    pub preparation: String,
    pub experiment: String,
    pub outcome: String,
    pub model_p: f64,
    pub born_p: f64,
}

impl DeviationRow {
    pub fn deviation(&self) -> f64 {
        (self.model_p - self.born_p).abs()
    }
}

#[derive(Debug, Clone)]
pub struct Reproduction {
    pub reproduces: bool,
    pub max_deviation: f64,
    pub rows: Vec<DeviationRow>,
}

impl Reproduction {
    pub fn worst(&self) -> Option<&DeviationRow> {
        self.rows
            .iter()
            .max_by(|a, b| a.deviation().total_cmp(&b.deviation()))
    }

    /// `prep,experiment,outcome,model_p,born_p,abs_diff` rows with a header.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("prep,experiment,outcome,model_p,born_p,abs_diff\n");
        for r in &self.rows {
            s.push_str(&format!(
                "{},{},{},{},{},{}\n",
                r.preparation,
                r.experiment,
                r.outcome,
                crate::io::fmt12(r.model_p),
                crate::io::fmt12(r.born_p),
                crate::io::fmt12(r.deviation())
            ));
        }
        s
    }
}

/// Compares every (preparation, experiment, outcome) statistic of `f`
/// against the model's prediction.
pub fn reproduces_fragment(m: &OntModel, f: &Fragment, tol: f64) -> Result<Reproduction> {
    let mut rows = Vec::new();
    for (ename, e) in f.experiments() {
        let outs = m.experiment(ename)?;
        let labels: Vec<&str> = e.labels().collect();
        let model_labels: Vec<&str> = outs.iter().map(|o| o.label.as_str()).collect();
        if labels != model_labels {
            return Err(Error::Input(format!(
                "experiment `{ename}` outcome labels differ between model and fragment"
            )));
        }
        for (pname, state) in f.preparations() {
            let p = m.preparation(pname)?;
            let born = born_distribution(state, e)?;
            for (o, b) in outs.iter().zip(born) {
                rows.push(DeviationRow {
                    preparation: pname.clone(),
                    experiment: ename.clone(),
                    outcome: o.label.clone(),
                    model_p: expectation(&o.response, p),
                    born_p: b,
                });
            }
        }
    }
    for pname in f.preparations().keys() {
        m.preparation(pname)?;
    }
    let max_deviation = rows.iter().map(DeviationRow::deviation).fold(0.0, f64::max);
    Ok(Reproduction {
        reproduces: max_deviation <= tol,
        max_deviation,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_state_model() -> OntModel {
        let mut m = OntModel::new(2);
        m.preparations.insert("u".into(), FiniteDistribution::uniform(2));
        m.preparations.insert("a".into(), FiniteDistribution::point(2, 0));
        m.experiments.insert(
            "e".into(),
            vec![
                ResponseOutcome { label: "x".into(), response: ResponseFunction(vec![1.0, 0.0]) },
                ResponseOutcome { label: "y".into(), response: ResponseFunction(vec![0.0, 1.0]) },
            ],
        );
        m.experiments.insert(
            "g".into(),
            vec![
                ResponseOutcome { label: "x".into(), response: ResponseFunction(vec![0.3, 0.5]) },
                ResponseOutcome { label: "y".into(), response: ResponseFunction(vec![0.7, 0.5]) },
            ],
        );
        m
    }

    #[test]
    fn predicted_examples() {
        let m = two_state_model();
        assert!(validate_model(&m, &Tolerances::DEFAULT).is_empty());
        assert_eq!(predicted_probability(&m, "u", "e", "x").unwrap(), 0.5);
        assert_eq!(predicted_probability(&m, "a", "g", "x").unwrap(), 0.3);
        assert!(matches!(
            predicted_probability(&m, "zz", "e", "x"),
            Err(Error::UnknownPreparation(_))
        ));
        assert!(matches!(
            predicted_probability(&m, "u", "e", "q"),
            Err(Error::UnknownOutcome(_))
        ));
    }

    #[test]
    fn violations_are_reported() {
        let mut m = two_state_model();
        m.experiments.get_mut("g").unwrap()[0].response.0[1] = 0.6;
        m.experiments.get_mut("g").unwrap()[1].response.0[1] = 0.6;
        let v = validate_model(&m, &Tolerances::DEFAULT);
        assert_eq!(v.len(), 1, "{v:?}");
        assert!(v[0].contains("sum"));

        let mut m = two_state_model();
        m.preparations.insert("neg".into(), FiniteDistribution(vec![-0.1, 1.1]));
        let v = validate_model(&m, &Tolerances::DEFAULT);
        assert_eq!(v.len(), 1, "{v:?}");
        assert!(v[0].contains("negative"));
    }

    #[test]
    fn structure_checked_on_load() {
        let bad = r#"{"lambda_size":2,"preparations":{"a":[1.0]},"experiments":{}}"#;
        assert!(serde_json::from_str::<OntModel>(bad).is_err());
        let ok = serde_json::to_string(&two_state_model()).unwrap();
        let back: OntModel = serde_json::from_str(&ok).unwrap();
        assert_eq!(back, two_state_model());
    }
}
