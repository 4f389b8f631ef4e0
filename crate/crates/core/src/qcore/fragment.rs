use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

use super::{Experiment, PureState};
use crate::{Error, Result, Tolerances};

/// Named pure-state preparations and named experiments over one Hilbert
/// space: the statistics an ontological model is asked to reproduce.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawFragment", into = "RawFragment")]
pub struct Fragment {
    dim: usize,
    preparations: BTreeMap<String, PureState>,
    experiments: BTreeMap<String, Experiment>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFragment {
    dim: usize,
    preparations: BTreeMap<String, PureState>,
    experiments: BTreeMap<String, Experiment>,
}

impl TryFrom<RawFragment> for Fragment {
    type Error = Error;
    fn try_from(r: RawFragment) -> Result<Self> {
        Fragment::build(r.dim, r.preparations, r.experiments, false)
    }
}

impl From<Fragment> for RawFragment {
    fn from(f: Fragment) -> Self {
        RawFragment {
            dim: f.dim,
            preparations: f.preparations,
            experiments: f.experiments,
        }
    }
}

impl Fragment {
    /// Builds a fragment, requiring every experiment to be a valid POVM.
    pub fn new(
        dim: usize,
        preparations: BTreeMap<String, PureState>,
        experiments: BTreeMap<String, Experiment>,
    ) -> Result<Self> {
        Self::build(dim, preparations, experiments, true)
    }

    fn build(
        dim: usize,
        preparations: BTreeMap<String, PureState>,
        experiments: BTreeMap<String, Experiment>,
        strict: bool,
    ) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidState("fragment dimension must be positive".into()));
        }
        for s in preparations.values() {
            if s.dim() != dim {
                return Err(Error::DimensionMismatch(s.dim(), dim));
            }
        }
        for (name, e) in &experiments {
            if e.dim() != dim {
                return Err(Error::DimensionMismatch(e.dim(), dim));
            }
            if strict {
                let v = e.violations(&Tolerances::DEFAULT);
                if !v.is_empty() {
                    return Err(Error::InvalidExperiment(format!("`{name}`: {}", v.join("; "))));
                }
            }
        }
        Ok(Self {
            dim,
            preparations,
            experiments,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn preparations(&self) -> &BTreeMap<String, PureState> {
        &self.preparations
    }

    pub fn experiments(&self) -> &BTreeMap<String, Experiment> {
        &self.experiments
    }

    pub fn preparation(&self, name: &str) -> Result<&PureState> {
        self.preparations
            .get(name)
            .ok_or_else(|| Error::UnknownPreparation(name.to_string()))
    }

    pub fn experiment(&self, name: &str) -> Result<&Experiment> {
        self.experiments
            .get(name)
            .ok_or_else(|| Error::UnknownExperiment(name.to_string()))
    }

    /// Same fragment with one more experiment.
    pub fn with_experiment(&self, name: impl Into<String>, e: Experiment) -> Result<Self> {
        let mut experiments = self.experiments.clone();
        experiments.insert(name.into(), e);
        Self::new(self.dim, self.preparations.clone(), experiments)
    }

    /// Same preparations, no experiments.
    pub fn without_experiments(&self) -> Self {
        Self {
            dim: self.dim,
            preparations: self.preparations.clone(),
            experiments: BTreeMap::new(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dims_must_agree() {
        let mut preps = BTreeMap::new();
        preps.insert("a".to_string(), PureState::zero());
        preps.insert("b".to_string(), PureState::basis(3, 0));
        assert!(matches!(
            Fragment::new(2, preps, BTreeMap::new()),
            Err(Error::DimensionMismatch(3, 2))
        ));
    }

    #[test]
    fn json_round_trip() {
        let mut preps = BTreeMap::new();
        preps.insert("0".to_string(), PureState::zero());
        preps.insert("+".to_string(), PureState::plus());
        let mut exps = BTreeMap::new();
        exps.insert("z".to_string(), Experiment::computational(2));
        let f = Fragment::new(2, preps, exps).unwrap();
        let s = serde_json::to_string(&f).unwrap();
        let back: Fragment = serde_json::from_str(&s).unwrap();
        assert_eq!(back, f);
        assert_eq!(serde_json::to_string(&back).unwrap(), s);
    }
}
