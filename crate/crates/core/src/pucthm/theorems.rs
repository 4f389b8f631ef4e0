use serde::{Deserialize, Serialize};

use super::{check_pip, check_puc, key, JointScenario, ProductJointScenario, Scenario, KEYS};
use crate::antidist::{verify_certificate, AntidistCertificate};
use crate::omodel::{classical_overlap, ontologically_distinct, predicted_distribution, OntModel};
use crate::qcore::born_distribution;
use crate::{Error, Result, Tolerances};

/// Requires `m` to reproduce the certificate's statistics on the four keyed
/// preparations (state `k` of the certificate is preparation `KEYS[k]`).
fn require_reproduction(m: &OntModel, cert: &AntidistCertificate, experiment: &str, tol: f64) -> Result<()> {
    if cert.states.len() != 4 {
        return Err(Error::Precondition("certificate must cover four states".into()));
    }
    if !verify_certificate(cert, Tolerances::DEFAULT.preclusion)?.0 {
        return Err(Error::Precondition("certificate does not verify".into()));
    }
    let labels: Vec<&str> = cert.experiment.labels().collect();
    let declared: Vec<&str> = m.experiment(experiment)?.iter().map(|o| o.label.as_str()).collect();
    if labels != declared {
        return Err(Error::Precondition(format!("`{experiment}` has different outcome labels")));
    }
    for (k, state) in KEYS.iter().zip(&cert.states) {
        let model_p = predicted_distribution(m, k, experiment)?;
        let born = born_distribution(state, &cert.experiment)?;
        let dev = model_p.iter().zip(&born).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        if dev > tol {
            return Err(Error::Precondition(format!(
                "`{k}` misses `{experiment}` by {dev:.3e} (tolerance {tol:.1e})"
            )));
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PbrVerdict {
    pub distinct_a: bool,
    pub distinct_b: bool,
    pub omega_a: f64,
    pub omega_b: f64,
    pub exchange_symmetric: bool,
    /// At least one side distinct, and both when exchange symmetric.
    pub pass: bool,
}

/// Under the independence postulate and an antidistinguishing experiment the
/// local distributions of `ψ` and `φ` must be ontologically distinct on at
/// least one side (both under exchange symmetry).
///
/// Fails with [`Error::Precondition`] when `check_pip` fails at `tol` or the
/// scenario misses the certificate's statistics by more than `tol`.
pub fn verify_pbr_conclusion(
    s: &ProductJointScenario,
    cert: &AntidistCertificate,
    experiment: &str,
    tol: f64,
) -> Result<PbrVerdict> {
    let pip = check_pip(s, tol);
    if !pip.holds {
        return Err(Error::Precondition(format!(
            "check_pip failed (opi {:.3e}, independence {:.3e})",
            pip.opi.worst, pip.independence.worst
        )));
    }
    require_reproduction(&s.model, cert, experiment, tol)?;
    let (pa, fa) = (s.marginal_a(0, 0), s.marginal_a(1, 1));
    let (pb, fb) = (s.marginal_b(0, 0), s.marginal_b(1, 1));
    let distinct_a = ontologically_distinct(&pa, &fa)?;
    let distinct_b = ontologically_distinct(&pb, &fb)?;
    let exchange_symmetric = s.exchange_symmetric(tol);
    Ok(PbrVerdict {
        distinct_a,
        distinct_b,
        omega_a: classical_overlap(&pa, &fa)?,
        omega_b: classical_overlap(&pb, &fb)?,
        exchange_symmetric,
        pass: (distinct_a || distinct_b) && (!exchange_symmetric || (distinct_a && distinct_b)),
    })
}

/// `max_k min_ab P(k | a, b)`: zero exactly when every outcome is precluded
/// by some preparation pair in the model.
pub fn epsilon_of_experiment(s: &JointScenario, experiment: &str) -> Result<f64> {
    let dists = KEYS
        .iter()
        .map(|k| predicted_distribution(&s.model, k, experiment))
        .collect::<Result<Vec<_>>>()?;
    Ok((0..dists[0].len())
        .map(|o| dists.iter().map(|d| d[o]).fold(f64::INFINITY, f64::min))
        .fold(0.0, f64::max))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RobustnessMode {
    Pip,
    Puc,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RobustnessVerdict {
    pub mode: RobustnessMode,
    pub epsilon: f64,
    /// `2 sqrt(ε)` for PIP, `4 sqrt(ε)` for PUC.
    pub bound: f64,
    /// Named overlaps compared against the bound.
    pub overlaps: Vec<(String, f64)>,
    pub pass: bool,
}

const BOUND_SLACK: f64 = 1e-7;
const PREMISE_TOL: f64 = 1e-9;

/// Checks the approximate-preclusion overlap bounds.
///
/// PUC mode: `ω(P_ψψ, P_φφ)` and `ω(P_ψφ, P_φψ)` are at most `4 sqrt(ε)`.
/// PIP mode: the local overlaps satisfy `sqrt(ω_A ω_B) <= 2 sqrt(ε)`, and
/// under exchange symmetry each is at most `2 sqrt(ε)`.
pub fn verify_robustness(s: &Scenario, experiment: &str, mode: RobustnessMode) -> Result<RobustnessVerdict> {
    let joint = s.joint();
    let epsilon = epsilon_of_experiment(&joint, experiment)?;
    let root = epsilon.sqrt();
    let (bound, overlaps, pass) = match mode {
        RobustnessMode::Puc => {
            let c = check_puc(&joint, PREMISE_TOL);
            if !c.holds {
                return Err(Error::Precondition(format!("check_puc failed (worst {:.3e})", c.worst)));
            }
            let o1 = classical_overlap(joint.dist(0, 0), joint.dist(1, 1))?;
            let o2 = classical_overlap(joint.dist(0, 1), joint.dist(1, 0))?;
            let bound = 4.0 * root;
            (
                bound,
                vec![(format!("{}|{}", key(0, 0), key(1, 1)), o1), (format!("{}|{}", key(0, 1), key(1, 0)), o2)],
                o1 <= bound + BOUND_SLACK && o2 <= bound + BOUND_SLACK,
            )
        }
        RobustnessMode::Pip => {
            let Scenario::Product(p) = s else {
                return Err(Error::Precondition("PIP mode needs a product scenario".into()));
            };
            let c = check_pip(p, PREMISE_TOL);
            if !c.holds {
                return Err(Error::Precondition("check_pip failed".into()));
            }
            let oa = classical_overlap(&p.marginal_a(0, 0), &p.marginal_a(1, 1))?;
            let ob = classical_overlap(&p.marginal_b(0, 0), &p.marginal_b(1, 1))?;
            let mean = (oa * ob).sqrt();
            let bound = 2.0 * root;
            let mut pass = mean <= bound + BOUND_SLACK;
            if p.exchange_symmetric(PREMISE_TOL) {
                pass &= oa <= bound + BOUND_SLACK && ob <= bound + BOUND_SLACK;
            }
            (
                bound,
                vec![("A".to_string(), oa), ("B".to_string(), ob), ("geometric_mean".to_string(), mean)],
                pass,
            )
        }
    };
    Ok(RobustnessVerdict {
        mode,
        epsilon,
        bound,
        overlaps,
        pass,
    })
}

/// Which sides the posterior pins down at one ontic state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LambdaDetermination {
    pub lambda: usize,
    pub weight: f64,
    pub a_determined: bool,
    pub b_determined: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PucTheoremVerdict {
    pub lambdas: Vec<LambdaDetermination>,
    /// Ontic states where neither side is determined.
    pub undetermined: Vec<usize>,
    pub omega_psipsi_phiphi: f64,
    pub omega_psiphi_phipsi: f64,
    pub pass: bool,
}

pub(crate) fn determined(p: f64) -> bool {
    let t = Tolerances::DEFAULT.determination;
    p >= 1.0 - t || p <= t
}

/// Under PUC and exact antidistinguishability, every ontic state fixes the
/// preparation of at least one side, so `P_ψψ, P_φφ` and `P_ψφ, P_φψ` have
/// null overlap.
///
/// Fails with [`Error::Precondition`] unless `check_puc` holds at `tol` and
/// the scenario reproduces the certificate's statistics within `1e-10`.
pub fn verify_puc_theorem(
    s: &JointScenario,
    cert: &AntidistCertificate,
    experiment: &str,
    tol: f64,
) -> Result<PucTheoremVerdict> {
    let c = check_puc(s, tol);
    if !c.holds {
        return Err(Error::Precondition(format!("check_puc failed (worst {:.3e})", c.worst)));
    }
    require_reproduction(&s.model, cert, experiment, 1e-10)?;
    let mut lambdas = Vec::new();
    let mut undetermined = Vec::new();
    for l in 0..s.model.lambda_size {
        let Some(q) = s.posterior(l) else { continue };
        let weight: f64 = KEYS.iter().map(|k| s.model.preparations[*k].0[l]).sum();
        let a_determined = determined(q[0] + q[1]);
        let b_determined = determined(q[0] + q[2]);
        if !a_determined && !b_determined {
            undetermined.push(l);
        }
        lambdas.push(LambdaDetermination {
            lambda: l,
            weight,
            a_determined,
            b_determined,
        });
    }
    let o1 = classical_overlap(s.dist(0, 0), s.dist(1, 1))?;
    let o2 = classical_overlap(s.dist(0, 1), s.dist(1, 0))?;
    Ok(PucTheoremVerdict {
        pass: undetermined.is_empty() && o1 <= 1e-9 && o2 <= 1e-9,
        lambdas,
        undetermined,
        omega_psipsi_phiphi: o1,
        omega_psiphi_phipsi: o2,
    })
}
