//! Preparation-independence and preparation-uninformativeness for the
//! two-system product-state setup, the theorem verifiers built on them, and
//! the N-subsystem determination analysis.
//!
//! Preparation choices are indexed `0 = ψ`, `1 = φ`. Joint preparations are
//! keyed `"psi,psi"`, `"psi,phi"`, `"phi,psi"`, `"phi,phi"`; key index
//! `2a + b` matches the order of [`crate::antidist::pbr_states`]. Posteriors
//! use a uniform prior over the four pairs.

mod array;
mod generate;
mod theorems;

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

use crate::omodel::{FiniteDistribution, OntModel, ResponseOutcome};
use crate::{Error, Result, Tolerances};

pub use array::{
    canonical_array, extendibility_probe, hand_built_array, n_array_determination,
    planted_pair_array, ArrayReport, ArrayRow, ArrayScenario, ConsistencyEntry,
    ExtendibilityReport, FractionEntry,
};
pub use generate::{
    canonical_pbr_scenario, pbr_fragment, pip_fit, puc_lp_scenario, search_puc_nca_gap, GapResult,
    PBR_EXPERIMENT,
};
pub use theorems::{
    epsilon_of_experiment, verify_pbr_conclusion, verify_puc_theorem, verify_robustness,
    LambdaDetermination, PbrVerdict, PucTheoremVerdict, RobustnessMode, RobustnessVerdict,
};

pub const KEYS: [&str; 4] = ["psi,psi", "psi,phi", "phi,psi", "phi,phi"];

pub fn key(a: usize, b: usize) -> &'static str {
    KEYS[2 * a + b]
}

/// Outcome of a tolerance check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub holds: bool,
    pub worst: f64,
    /// Ontic state of the worst violation, when the check is pointwise.
    pub at: Option<usize>,
}

impl Check {
    fn new(worst: f64, at: Option<usize>, tol: f64) -> Self {
        Self {
            holds: worst <= tol,
            worst,
            at,
        }
    }
}

/// Four joint preparations over an unstructured joint Λ.
#[derive(Debug, Clone, PartialEq)]
pub struct JointScenario {
    pub model: OntModel,
    /// False for scenarios, like the shared entangled state, that are not a
    /// pair of local state preparations.
    pub local_state_preparation: bool,
}

impl JointScenario {
    pub fn new(model: OntModel) -> Result<Self> {
        model.check_structure()?;
        for k in KEYS {
            model.preparation(k)?;
        }
        if let Some(extra) = model.preparations.keys().find(|k| !KEYS.contains(&k.as_str())) {
            return Err(Error::Input(format!("unexpected preparation `{extra}`; scenarios use {KEYS:?}")));
        }
        Ok(Self {
            model,
            local_state_preparation: true,
        })
    }

    pub fn dist(&self, a: usize, b: usize) -> &FiniteDistribution {
        &self.model.preparations[key(a, b)]
    }

    /// Uniform-prior posterior over the four pairs at `λ`, or `None` when no
    /// pair puts weight above the support tolerance there.
    pub fn posterior(&self, lambda: usize) -> Option<[f64; 4]> {
        let w: Vec<f64> = KEYS.iter().map(|k| self.model.preparations[*k].0[lambda]).collect();
        let total: f64 = w.iter().sum();
        (total > Tolerances::DEFAULT.support).then(|| [w[0] / total, w[1] / total, w[2] / total, w[3] / total])
    }
}

/// Four joint preparations over `Λ_A × Λ_B`, joint index `i * |Λ_B| + j`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductJointScenario {
    pub lambda_a_size: usize,
    pub lambda_b_size: usize,
    pub model: OntModel,
}

impl ProductJointScenario {
    pub fn new(lambda_a_size: usize, lambda_b_size: usize, model: OntModel) -> Result<Self> {
        if lambda_a_size * lambda_b_size != model.lambda_size {
            return Err(Error::Input(format!(
                "{lambda_a_size} x {lambda_b_size} does not match lambda_size {}",
                model.lambda_size
            )));
        }
        JointScenario::new(model.clone())?;
        Ok(Self {
            lambda_a_size,
            lambda_b_size,
            model,
        })
    }

    /// Product joints `P_ab = P^A_a ⊗ P^B_b` from local distributions.
    pub fn from_locals(
        a: [&FiniteDistribution; 2],
        b: [&FiniteDistribution; 2],
        experiments: BTreeMap<String, Vec<ResponseOutcome>>,
    ) -> Result<Self> {
        let (na, nb) = (a[0].len(), b[0].len());
        let mut model = OntModel::new(na * nb);
        for x in 0..2 {
            for y in 0..2 {
                let w = a[x]
                    .0
                    .iter()
                    .flat_map(|p| b[y].0.iter().map(move |q| p * q))
                    .collect();
                model.preparations.insert(key(x, y).to_string(), FiniteDistribution(w));
            }
        }
        model.experiments = experiments;
        Self::new(na, nb, model)
    }

    pub fn weight(&self, a: usize, b: usize, i: usize, j: usize) -> f64 {
        self.model.preparations[key(a, b)].0[i * self.lambda_b_size + j]
    }

    pub fn marginal_a(&self, a: usize, b: usize) -> FiniteDistribution {
        FiniteDistribution(
            (0..self.lambda_a_size)
                .map(|i| (0..self.lambda_b_size).map(|j| self.weight(a, b, i, j)).sum())
                .collect(),
        )
    }

    pub fn marginal_b(&self, a: usize, b: usize) -> FiniteDistribution {
        FiniteDistribution(
            (0..self.lambda_b_size)
                .map(|j| (0..self.lambda_a_size).map(|i| self.weight(a, b, i, j)).sum())
                .collect(),
        )
    }

    /// Forgets the product structure.
    pub fn flatten(&self) -> JointScenario {
        JointScenario {
            model: self.model.clone(),
            local_state_preparation: true,
        }
    }

    /// True when swapping the subsystems maps `P_ab` onto `P_ba` within `tol`.
    pub fn exchange_symmetric(&self, tol: f64) -> bool {
        if self.lambda_a_size != self.lambda_b_size {
            return false;
        }
        let n = self.lambda_a_size;
        (0..2).all(|a| {
            (0..2).all(|b| {
                (0..n).all(|i| (0..n).all(|j| (self.weight(a, b, i, j) - self.weight(b, a, j, i)).abs() <= tol))
            })
        })
    }
}

/// A scenario file: a joint scenario, optionally with product structure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawScenario", into = "RawScenario")]
pub enum Scenario {
    Joint(JointScenario),
    Product(ProductJointScenario),
}

fn is_true(b: &bool) -> bool {
    *b
}

fn yes() -> bool {
    true
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    lambda_size: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    lambda_a_size: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    lambda_b_size: Option<usize>,
    #[serde(default = "yes", skip_serializing_if = "is_true")]
    local_state_preparation: bool,
    preparations: BTreeMap<String, FiniteDistribution>,
    #[serde(default)]
    experiments: BTreeMap<String, Vec<ResponseOutcome>>,
}

impl TryFrom<RawScenario> for Scenario {
    type Error = Error;
    fn try_from(r: RawScenario) -> Result<Self> {
        let model = OntModel {
            lambda_size: r.lambda_size,
            preparations: r.preparations,
            experiments: r.experiments,
        };
        match (r.lambda_a_size, r.lambda_b_size) {
            (Some(a), Some(b)) => {
                if !r.local_state_preparation {
                    return Err(Error::Input("product scenarios are local preparations".into()));
                }
                Ok(Scenario::Product(ProductJointScenario::new(a, b, model)?))
            }
            (None, None) => {
                let mut s = JointScenario::new(model)?;
                s.local_state_preparation = r.local_state_preparation;
                Ok(Scenario::Joint(s))
            }
            _ => Err(Error::Input("give both lambda_a_size and lambda_b_size or neither".into())),
        }
    }
}

impl From<Scenario> for RawScenario {
    fn from(s: Scenario) -> Self {
        let (model, sizes, local) = match s {
            Scenario::Joint(j) => (j.model, None, j.local_state_preparation),
            Scenario::Product(p) => (p.model, Some((p.lambda_a_size, p.lambda_b_size)), true),
        };
        RawScenario {
            lambda_size: model.lambda_size,
            lambda_a_size: sizes.map(|s| s.0),
            lambda_b_size: sizes.map(|s| s.1),
            local_state_preparation: local,
            preparations: model.preparations,
            experiments: model.experiments,
        }
    }
}

impl Scenario {
    pub fn joint(&self) -> JointScenario {
        match self {
            Scenario::Joint(j) => j.clone(),
            Scenario::Product(p) => p.flatten(),
        }
    }

    pub fn model(&self) -> &OntModel {
        match self {
            Scenario::Joint(j) => &j.model,
            Scenario::Product(p) => &p.model,
        }
    }
}

/// Posterior factorization `Cr(a,b|λ) = Cr(a|λ) Cr(b|λ)` at every ontic
/// state with positive total weight; reports the largest deviation.
pub fn check_puc(s: &JointScenario, tol: f64) -> Check {
    let mut worst = (0.0, None);
    for l in 0..s.model.lambda_size {
        let Some(q) = s.posterior(l) else { continue };
        let x = [q[0] + q[1], q[2] + q[3]];
        let y = [q[0] + q[2], q[1] + q[3]];
        for a in 0..2 {
            for b in 0..2 {
                let v = (q[2 * a + b] - x[a] * y[b]).abs();
                if v > worst.0 {
                    worst = (v, Some(l));
                }
            }
        }
    }
    Check::new(worst.0, worst.1, tol)
}

fn max_abs_diff(p: &FiniteDistribution, q: &FiniteDistribution) -> f64 {
    p.0.iter().zip(&q.0).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
}

/// Ontic parameter independence: each subsystem's marginal does not depend
/// on the other subsystem's preparation choice.
pub fn check_opi(s: &ProductJointScenario, tol: f64) -> Check {
    let mut worst = 0.0f64;
    for c in 0..2 {
        worst = worst.max(max_abs_diff(&s.marginal_a(c, 0), &s.marginal_a(c, 1)));
        worst = worst.max(max_abs_diff(&s.marginal_b(0, c), &s.marginal_b(1, c)));
    }
    Check::new(worst, None, tol)
}

/// Each joint distribution equals the product of its marginals.
pub fn check_independence(s: &ProductJointScenario, tol: f64) -> Check {
    let mut worst = (0.0, None);
    for a in 0..2 {
        for b in 0..2 {
            let (ma, mb) = (s.marginal_a(a, b), s.marginal_b(a, b));
            for i in 0..s.lambda_a_size {
                for j in 0..s.lambda_b_size {
                    let v = (s.weight(a, b, i, j) - ma.0[i] * mb.0[j]).abs();
                    if v > worst.0 {
                        worst = (v, Some(i * s.lambda_b_size + j));
                    }
                }
            }
        }
    }
    Check::new(worst.0, worst.1, tol)
}

/// The preparation independence postulate: the product structure (given by
/// the type) plus ontic parameter independence plus independence.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PipCheck {
    pub holds: bool,
    pub opi: Check,
    pub independence: Check,
}

pub fn check_pip(s: &ProductJointScenario, tol: f64) -> PipCheck {
    let opi = check_opi(s, tol);
    let independence = check_independence(s, tol);
    PipCheck {
        holds: opi.holds && independence.holds,
        opi,
        independence,
    }
}

/// Both parties act on a shared `|Φ+>` with identity (`ψ`) or a bit flip
/// (`φ`). Matched choices yield the same state and share ontic state 0;
/// mismatched choices share ontic state 1.
pub fn phi_plus_example() -> JointScenario {
    let mut m = OntModel::new(2);
    for (k, atom) in [("psi,psi", 0), ("phi,phi", 0), ("psi,phi", 1), ("phi,psi", 1)] {
        m.preparations.insert(k.to_string(), FiniteDistribution::point(2, atom));
    }
    JointScenario {
        model: m,
        local_state_preparation: false,
    }
}

/// Local operations that leave four distinct product states, each on its own
/// ontic state.
pub fn disentangled_example() -> JointScenario {
    let mut m = OntModel::new(4);
    for (i, k) in KEYS.iter().enumerate() {
        m.preparations.insert(k.to_string(), FiniteDistribution::point(4, i));
    }
    JointScenario {
        model: m,
        local_state_preparation: true,
    }
}
