use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{BclmFamily, PairEvidence};
use crate::io::fmt12;
use crate::lpopt::{max_total_overlap_fit, Responses};
use crate::omodel::{
    canonical_psi_ontic, classical_overlap, reproduces_fragment, OntModel, ResponseFunction,
    ResponseOutcome,
};
use crate::qcore::{born_distribution, quantum_overlap, Fragment};
use crate::{Error, Result};

/// The closed-form quantities of the average-overlap bound in dimension `d`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundArithmetic {
    pub d: usize,
    /// `1 - sqrt(1 - 1/d)`, the quantum overlap at `|<φ|ψ>| = 1/sqrt(d)`.
    pub omega_q: f64,
    /// `1/d^2`.
    pub mean_bound: f64,
    /// `(1/d)(1 + sqrt(1 - 1/d))`, so that `mean_bound = ratio_coefficient * omega_q`.
    pub ratio_coefficient: f64,
    pub two_over_d: f64,
    /// `|mean_bound - ratio_coefficient * omega_q|`.
    pub identity_residual: f64,
}

pub fn bound_arithmetic(d: usize) -> Result<BoundArithmetic> {
    if d < 4 {
        return Err(Error::Input(format!("dimension {d} is below 4")));
    }
    let df = d as f64;
    let root = (1.0 - 1.0 / df).sqrt();
    let omega_q = 1.0 - root;
    let mean_bound = 1.0 / (df * df);
    let ratio_coefficient = (1.0 + root) / df;
    Ok(BoundArithmetic {
        d,
        omega_q,
        mean_bound,
        ratio_coefficient,
        two_over_d: 2.0 / df,
        identity_residual: (mean_bound - ratio_coefficient * omega_q).abs(),
    })
}

/// One `(φ, ψ_i)` row of an audit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairRow {
    pub index: usize,
    pub omega: f64,
    pub omega_q: f64,
    /// `omega / omega_q`.
    pub ratio: f64,
    /// Evidence kinds of the pairs involving `ψ_i`, e.g. `orthogonal:3;certificate:12`.
    pub evidence: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub omega_bar: f64,
    pub omega_sum: f64,
    pub bounds: BoundArithmetic,
    pub rows: Vec<PairRow>,
    pub min_index: usize,
    pub min_omega: f64,
    pub min_ratio: f64,
    /// `omega_bar <= 1/d^2 + 1e-8`.
    pub mean_ok: bool,
    /// `Σ ω <= 1 + 1e-8`.
    pub sum_ok: bool,
    /// Some `ω_i < (2/d) ω_Q`.
    pub witness_ok: bool,
    /// Some `ω_i < ratio_coefficient * ω_Q` (the sharper clause).
    pub strict_witness_ok: bool,
    pub pass: bool,
}

impl AuditReport {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("pair_index,omega,omega_q,ratio,evidence\n");
        for r in &self.rows {
            s.push_str(&format!(
                "{},{},{},{},{}\n",
                r.index,
                fmt12(r.omega),
                fmt12(r.omega_q),
                fmt12(r.ratio),
                r.evidence
            ));
        }
        s
    }
}

fn evidence_summary(fam: &BclmFamily, i: usize) -> String {
    let (mut orth, mut cert, mut crit) = (0, 0, 0);
    for p in fam.pairs.iter().filter(|p| p.i == i || p.j == i) {
        match &p.evidence {
            PairEvidence::Orthogonal { .. } => orth += 1,
            PairEvidence::Triple {
                certificate: Some(_),
                ..
            } => cert += 1,
            PairEvidence::Triple { .. } => crit += 1,
        }
    }
    format!("orthogonal:{orth};certificate:{cert};criterion:{crit}")
}

/// Audits a model of the family fragment against the average-overlap bound.
///
/// Fails with [`Error::Precondition`] unless `m` reproduces
/// [`BclmFamily::fragment`] within `1e-8`.
pub fn audit_model(m: &OntModel, fam: &BclmFamily) -> Result<AuditReport> {
    let frag = fam.fragment()?;
    let rep = reproduces_fragment(m, &frag, 1e-8)?;
    if !rep.reproduces {
        return Err(Error::Precondition(format!(
            "model does not reproduce the family fragment (deviation {:.3e})",
            rep.max_deviation
        )));
    }
    let d = fam.phi.dim();
    let bounds = bound_arithmetic(d)?;
    let p_phi = m.preparation("phi")?;
    let mut rows = Vec::new();
    for (i, psi) in fam.psis.iter().enumerate() {
        let omega = classical_overlap(p_phi, m.preparation(&BclmFamily::psi_name(i))?)?;
        let omega_q = quantum_overlap(&fam.phi, psi)?;
        rows.push(PairRow {
            index: i,
            omega,
            omega_q,
            ratio: omega / omega_q,
            evidence: evidence_summary(fam, i),
        });
    }
    let omega_sum: f64 = rows.iter().map(|r| r.omega).sum();
    let omega_bar = omega_sum / rows.len() as f64;
    let min = rows
        .iter()
        .fold(&rows[0], |best, r| if r.omega < best.omega { r } else { best });
    let witness_ok = rows.iter().any(|r| r.omega < bounds.two_over_d * r.omega_q);
    let strict_witness_ok = rows.iter().any(|r| r.omega < bounds.ratio_coefficient * r.omega_q);
    let mean_ok = omega_bar <= bounds.mean_bound + 1e-8;
    let sum_ok = omega_sum <= 1.0 + 1e-8;
    Ok(AuditReport {
        omega_bar,
        omega_sum,
        min_index: min.index,
        min_omega: min.omega,
        min_ratio: min.ratio,
        bounds,
        mean_ok,
        sum_ok,
        witness_ok,
        strict_witness_ok,
        pass: mean_ok && witness_ok,
        rows,
    })
}

/// A seeded response family for the family fragment.
///
/// It contains the canonical one-atom-per-preparation responses, a few
/// random-response atoms, and for a random subset of the `ψ_i` a split
/// gadget: three atoms `(shared, φ-rest, ψ-rest)` such that
/// `t·shared + (1-t)·φ-rest` reproduces `φ` and `t·shared + (1-t)·ψ-rest`
/// reproduces `ψ_i`. The shared atom's responses are a random reweighting of
/// `min(Born_φ, Born_ψi)` per experiment.
///
/// Returns the responses and the indices that received a gadget.
pub fn gadget_responses(fam: &BclmFamily, frag: &Fragment, seed: u64) -> Result<(Responses, Vec<usize>)> {
    let canon = canonical_psi_ontic(frag)?;
    let exps: Vec<&String> = frag.experiments().keys().collect();
    let mut atoms: Vec<BTreeMap<&String, Vec<f64>>> = (0..canon.lambda_size)
        .map(|l| {
            exps.iter()
                .map(|e| (*e, canon.experiments[*e].iter().map(|o| o.response.0[l]).collect()))
                .collect()
        })
        .collect();
    let born = |name: &str| -> Result<BTreeMap<&String, Vec<f64>>> {
        let s = frag.preparation(name)?;
        exps.iter()
            .map(|e| Ok((*e, born_distribution(s, &frag.experiments()[*e])?)))
            .collect()
    };
    let b_phi = born("phi")?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..fam.psis.len()).collect();
    order.shuffle(&mut rng);
    let count = rng.random_range(4..=12.min(order.len()));
    let mut gadgets = Vec::new();
    for &i in &order[..count] {
        let b_psi = born(&BclmFamily::psi_name(i))?;
        let mut shared = BTreeMap::new();
        let mut t_max = 1.0f64;
        let mut usable = true;
        for e in &exps {
            let mins: Vec<f64> = b_phi[*e]
                .iter()
                .zip(&b_psi[*e])
                .map(|(a, b)| if a.min(*b) < 1e-12 { 0.0 } else { a.min(*b) })
                .collect();
            let w: Vec<f64> = mins.iter().map(|m| m * rng.random_range(0.5..1.5)).collect();
            let total: f64 = w.iter().sum();
            if total <= 0.0 {
                usable = false;
                break;
            }
            let f: Vec<f64> = w.iter().map(|x| x / total).collect();
            for (m, fk) in mins.iter().zip(&f) {
                if *fk > 0.0 {
                    t_max = t_max.min(m / fk);
                }
            }
            shared.insert(*e, f);
        }
        if !usable {
            continue;
        }
        let t = t_max.min(0.95) * rng.random_range(0.2..0.9);
        let rest = |b: &BTreeMap<&String, Vec<f64>>| -> BTreeMap<&String, Vec<f64>> {
            exps.iter()
                .map(|e| {
                    let v = b[*e]
                        .iter()
                        .zip(&shared[*e])
                        .map(|(p, s)| ((p - t * s) / (1.0 - t)).max(0.0))
                        .collect();
                    (*e, v)
                })
                .collect()
        };
        let (ra, rb) = (rest(&b_phi), rest(&b_psi));
        atoms.push(shared);
        atoms.push(ra);
        atoms.push(rb);
        gadgets.push(i);
    }
    for _ in 0..4 {
        atoms.push(
            exps.iter()
                .map(|e| {
                    let w: Vec<f64> = (0..frag.experiments()[*e].outcomes().len())
                        .map(|_| rng.random_range(0.0..1.0))
                        .collect();
                    let s: f64 = w.iter().sum();
                    (*e, w.iter().map(|x| x / s).collect())
                })
                .collect(),
        );
    }
    gadgets.sort_unstable();
    let experiments = exps
        .iter()
        .map(|e| {
            let outs = frag.experiments()[*e]
                .labels()
                .enumerate()
                .map(|(k, l)| ResponseOutcome {
                    label: l.to_string(),
                    response: ResponseFunction(atoms.iter().map(|a| a[*e][k]).collect()),
                })
                .collect();
            ((*e).clone(), outs)
        })
        .collect();
    Ok((
        Responses {
            lambda_size: atoms.len(),
            experiments,
        },
        gadgets,
    ))
}

/// One seeded adversarial audit.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SeededAudit {
    pub seed: u64,
    pub lambda_size: usize,
    pub gadgets: Vec<usize>,
    /// Optimal `Σ_i ω(P_φ, P_ψi)` found by the LP.
    pub lp_total: f64,
    pub report: AuditReport,
}

/// Maximizes the total overlap of `φ` with the `ψ_i` over the seeded
/// response family, then audits the optimal model.
pub fn seeded_audit(fam: &BclmFamily, seed: u64) -> Result<(SeededAudit, OntModel)> {
    let frag = fam.fragment()?;
    let (responses, gadgets) = gadget_responses(fam, &frag, seed)?;
    let names: Vec<String> = (0..fam.psis.len()).map(BclmFamily::psi_name).collect();
    let pairs: Vec<(&str, &str)> = names.iter().map(|n| ("phi", n.as_str())).collect();
    let fit = max_total_overlap_fit(&frag, &responses, &pairs)?;
    let report = audit_model(&fit.model, fam)?;
    Ok((
        SeededAudit {
            seed,
            lambda_size: responses.lambda_size,
            gadgets,
            lp_total: fit.omega,
            report,
        },
        fit.model,
    ))
}
