use serde::{Deserialize, Serialize};

use super::metrics::{ontologically_distinct, tv_distance};
use super::model::{reproduces_fragment, OntModel};
use crate::qcore::{inner_product, quantum_distinguishability, same_ray, Fragment};
use crate::{Error, Result, Tolerances};

/// Reproduction slack required before a model is classified.
const REPRODUCTION_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelClassification {
    pub psi_ontic: bool,
    pub psi_epistemic: bool,
    /// Every non-orthogonal pair of distinct states overlaps on Λ.
    pub pairwise_psi_epistemic: bool,
    /// `δ(P_ψ, P_φ) = √(1 − |<φ|ψ>|²)` for every pair.
    pub maximally_psi_epistemic: bool,
    /// A pair falsifying the first false flag among ψ-ontic,
    /// pairwise ψ-epistemic and maximally ψ-epistemic.
    pub witness: Option<(String, String)>,
}

/// Classifies `m` relative to the pure states of `f`.
pub fn classify(m: &OntModel, f: &Fragment) -> Result<ModelClassification> {
    let rep = reproduces_fragment(m, f, REPRODUCTION_TOL)?;
    if !rep.reproduces {
        return Err(Error::Precondition(format!(
            "model does not reproduce the fragment (max deviation {:.3e})",
            rep.max_deviation
        )));
    }
    let tol = Tolerances::DEFAULT;
    let names: Vec<&String> = f.preparations().keys().collect();
    let mut ontic_witness = None;
    let mut pairwise_witness = None;
    let mut maximal_witness = None;
    for (i, a) in names.iter().enumerate() {
        for b in &names[i + 1..] {
            let (sa, sb) = (f.preparation(a)?, f.preparation(b)?);
            if same_ray(sa, sb)? {
                continue;
            }
            let (pa, pb) = (m.preparation(a)?, m.preparation(b)?);
            let pair = || ((*a).clone(), (*b).clone());
            let distinct = ontologically_distinct(pa, pb)?;
            let orthogonal = inner_product(sa, sb)?.norm() <= tol.phase_equal;
            if !distinct && ontic_witness.is_none() {
                ontic_witness = Some(pair());
            }
            if distinct && !orthogonal && pairwise_witness.is_none() {
                pairwise_witness = Some(pair());
            }
            let gap = (tv_distance(pa, pb)? - quantum_distinguishability(sa, sb)?).abs();
            if gap > tol.classification && maximal_witness.is_none() {
                maximal_witness = Some(pair());
            }
        }
    }
    let psi_ontic = ontic_witness.is_none();
    let pairwise = pairwise_witness.is_none();
    let maximal = maximal_witness.is_none();
    let witness = if !psi_ontic {
        ontic_witness
    } else if !pairwise {
        pairwise_witness
    } else {
        maximal_witness
    };
    Ok(ModelClassification {
        psi_ontic,
        psi_epistemic: !psi_ontic,
        pairwise_psi_epistemic: pairwise,
        maximally_psi_epistemic: maximal,
        witness,
    })
}
