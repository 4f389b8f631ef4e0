//! The 16-state family built from mutually unbiased bases in dimension four,
//! its pair evidence, the overlap-bound arithmetic and model audits.

mod audit;

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::antidist::{search_antidist, triple_criterion, AntidistCertificate};
use crate::qcore::linalg::{identity, kron, CMatrix};
use crate::qcore::{inner_product, Complex, Experiment, Fragment, PureState};
use crate::{Error, Result};

pub use audit::{
    audit_model, bound_arithmetic, gadget_responses, seeded_audit, AuditReport, BoundArithmetic,
    PairRow, SeededAudit,
};

/// Five mutually unbiased bases of a four-dimensional space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MubSet {
    pub dim: usize,
    pub bases: Vec<Vec<PureState>>,
}

impl MubSet {
    /// Lists every violated orthonormality or unbiasedness condition.
    pub fn violations(&self, tol: f64) -> Vec<String> {
        let mut out = Vec::new();
        let unbiased = 1.0 / (self.dim as f64).sqrt();
        for (b1, basis1) in self.bases.iter().enumerate() {
            for (b2, basis2) in self.bases.iter().enumerate().skip(b1) {
                for (i, u) in basis1.iter().enumerate() {
                    for (j, v) in basis2.iter().enumerate() {
                        let x = match inner_product(u, v) {
                            Ok(z) => z.norm(),
                            Err(e) => {
                                out.push(e.to_string());
                                continue;
                            }
                        };
                        let want = if b1 != b2 {
                            unbiased
                        } else if i == j {
                            1.0
                        } else {
                            0.0
                        };
                        if (x - want).abs() > tol {
                            out.push(format!("|<{b1}.{i}|{b2}.{j}>| = {x}, expected {want}"));
                        }
                    }
                }
            }
        }
        out
    }
}

fn pauli(c: char) -> CMatrix {
    let (o, z, i) = (Complex::new(1.0, 0.0), Complex::new(0.0, 0.0), Complex::new(0.0, 1.0));
    let v = match c {
        'I' => [o, z, z, o],
        'X' => [z, o, o, z],
        'Y' => [z, -i, i, z],
        'Z' => [o, z, z, -o],
        _ => unreachable!("not a Pauli label"),
    };
    CMatrix::from_row_slice(2, 2, &v)
}

fn pauli2(s: &str) -> CMatrix {
    let c: Vec<char> = s.chars().collect();
    kron(&pauli(c[0]), &pauli(c[1]))
}

/// Commuting pairs generating the five stabilizer bases.
const PARTITION: [(&str, &str); 5] = [
    ("ZI", "IZ"),
    ("XI", "IX"),
    ("YI", "IY"),
    ("XZ", "ZY"),
    ("ZX", "YZ"),
];

/// Two-qubit MUBs: the common eigenbases of five commuting Pauli pairs whose
/// products exhaust the fifteen non-identity Pauli operators. Basis 0 is the
/// computational basis.
pub fn mubs_d4() -> MubSet {
    let id = identity(4);
    let bases = PARTITION
        .iter()
        .map(|(a, b)| {
            let (a, b) = (pauli2(a), pauli2(b));
            [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)]
                .iter()
                .map(|&(s1, s2)| {
                    let proj = (&id + &a * Complex::from(s1)) * (&id + &b * Complex::from(s2))
                        * Complex::from(0.25);
                    // Largest column of the rank-one projector, lowest index on ties.
                    let col = (0..4)
                        .map(|j| (j, proj.column(j).norm()))
                        .fold((0, -1.0), |best, c| if c.1 > best.1 + 1e-12 { c } else { best })
                        .0;
                    PureState::normalized(proj.column(col).iter().copied().collect())
                        .expect("projector column is nonzero")
                })
                .collect()
        })
        .collect();
    MubSet { dim: 4, bases }
}

/// Evidence that a pair of family states satisfies the pair property.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PairEvidence {
    /// Same basis, so orthogonal.
    Orthogonal { inner: f64 },
    /// `{φ, ψ_i, ψ_j}` antidistinguishable.
    Triple {
        squared_overlaps: [f64; 3],
        criterion: bool,
        certificate: Option<AntidistCertificate>,
        /// Set when only the criterion vouches for the triple.
        warning: bool,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairRecord {
    pub i: usize,
    pub j: usize,
    pub evidence: PairEvidence,
}

/// A reference state `φ` and the sixteen vectors of the other four bases.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BclmFamily {
    pub phi: PureState,
    pub psis: Vec<PureState>,
    /// `(basis, vector)` of `φ` and of every `ψ_i`.
    pub phi_origin: (usize, usize),
    pub psi_origins: Vec<(usize, usize)>,
    pub pairs: Vec<PairRecord>,
}

/// Iteration budget and seed base for the per-triple POVM searches.
const SEARCH_ITERS: usize = 300;

/// Builds the family around basis vector `phi_vector` of basis `phi_basis`.
///
/// Every cross-basis triple is certified by the exact criterion and, where
/// the numerical search succeeds, an explicit certificate. A failing pair
/// aborts with [`Error::Certification`].
pub fn construct_family(phi_basis: usize, phi_vector: usize) -> Result<BclmFamily> {
    let mubs = mubs_d4();
    let bad = mubs.violations(1e-10);
    if !bad.is_empty() {
        return Err(Error::Certification(bad.join("; ")));
    }
    if phi_basis >= mubs.bases.len() || phi_vector >= mubs.dim {
        return Err(Error::Input(format!("no basis vector ({phi_basis}, {phi_vector})")));
    }
    let phi = mubs.bases[phi_basis][phi_vector].clone();
    let mut psis = Vec::new();
    let mut psi_origins = Vec::new();
    for (b, basis) in mubs.bases.iter().enumerate().filter(|(b, _)| *b != phi_basis) {
        for (v, s) in basis.iter().enumerate() {
            psis.push(s.clone());
            psi_origins.push((b, v));
        }
    }
    for (i, s) in psis.iter().enumerate() {
        let x = inner_product(&phi, s)?.norm();
        if (x - 0.5).abs() > 1e-10 {
            return Err(Error::Certification(format!("|<phi|psi_{i}>| = {x}")));
        }
    }
    let index_pairs: Vec<(usize, usize)> = (0..psis.len())
        .flat_map(|i| (i + 1..psis.len()).map(move |j| (i, j)))
        .collect();
    let pairs = index_pairs
        .par_iter()
        .enumerate()
        .map(|(n, &(i, j))| {
            let (a, b) = (&psis[i], &psis[j]);
            let evidence = if psi_origins[i].0 == psi_origins[j].0 {
                let inner = inner_product(a, b)?.norm();
                if inner > 1e-10 {
                    return Err(Error::Certification(format!("same-basis pair ({i}, {j}) not orthogonal")));
                }
                PairEvidence::Orthogonal { inner }
            } else {
                let sq = [
                    inner_product(&phi, a)?.norm_sqr(),
                    inner_product(a, b)?.norm_sqr(),
                    inner_product(&phi, b)?.norm_sqr(),
                ];
                let criterion = triple_criterion(sq[0], sq[1], sq[2]);
                let certificate =
                    search_antidist(&[phi.clone(), a.clone(), b.clone()], SEARCH_ITERS, 1e-10, n as u64)?;
                if !criterion && certificate.is_none() {
                    return Err(Error::Certification(format!("triple with pair ({i}, {j}) uncertified")));
                }
                PairEvidence::Triple {
                    squared_overlaps: sq,
                    criterion,
                    warning: certificate.is_none(),
                    certificate,
                }
            };
            Ok(PairRecord { i, j, evidence })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BclmFamily {
        phi,
        psis,
        phi_origin: (phi_basis, phi_vector),
        psi_origins,
        pairs,
    })
}

impl BclmFamily {
    pub fn psi_name(i: usize) -> String {
        format!("psi{i:02}")
    }

    pub fn triple_name(i: usize, j: usize) -> String {
        format!("triple_{i:02}_{j:02}")
    }

    /// Fraction of cross-basis pairs carrying an explicit certificate.
    pub fn certified_fraction(&self) -> f64 {
        let (mut total, mut explicit) = (0, 0);
        for p in &self.pairs {
            if let PairEvidence::Triple { certificate, .. } = &p.evidence {
                total += 1;
                explicit += usize::from(certificate.is_some());
            }
        }
        if total == 0 {
            1.0
        } else {
            explicit as f64 / total as f64
        }
    }

    /// The statistics the overlap argument uses: preparations `phi` and
    /// `psi00..psi15`, one basis measurement per `ψ` basis (`basis{b}`) and one
    /// antidistinguishing experiment per certified cross-basis pair
    /// (`triple_{i}_{j}`, outcome `k` precluding `[φ, ψ_i, ψ_j][k]`).
    pub fn fragment(&self) -> Result<Fragment> {
        let mut preps = BTreeMap::new();
        preps.insert("phi".to_string(), self.phi.clone());
        for (i, s) in self.psis.iter().enumerate() {
            preps.insert(Self::psi_name(i), s.clone());
        }
        let mut exps = BTreeMap::new();
        let mut bases: BTreeMap<usize, Vec<(usize, PureState)>> = BTreeMap::new();
        for (s, &(b, v)) in self.psis.iter().zip(&self.psi_origins) {
            bases.entry(b).or_default().push((v, s.clone()));
        }
        for (b, mut vs) in bases {
            vs.sort_by_key(|(v, _)| *v);
            let states: Vec<PureState> = vs.into_iter().map(|(_, s)| s).collect();
            let e = Experiment::projective(&states, (0..states.len()).map(|v| v.to_string()))?;
            exps.insert(format!("basis{b}"), e);
        }
        for p in &self.pairs {
            if let PairEvidence::Triple {
                certificate: Some(c),
                ..
            } = &p.evidence
            {
                exps.insert(Self::triple_name(p.i, p.j), c.experiment.clone());
            }
        }
        Fragment::new(4, preps, exps)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mubs_are_unbiased() {
        let m = mubs_d4();
        assert_eq!(m.bases.iter().map(Vec::len).sum::<usize>(), 20);
        assert!(m.violations(1e-10).is_empty());
        // Basis 0 is computational.
        for (i, s) in m.bases[0].iter().enumerate() {
            assert!((s.amplitudes()[i].norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn pauli_partition_covers_all() {
        let mut seen = std::collections::BTreeSet::new();
        for (a, b) in PARTITION {
            let (ma, mb) = (pauli2(a), pauli2(b));
            assert!(crate::qcore::linalg::max_abs_diff(&(&ma * &mb), &(&mb * &ma)) < 1e-15);
            let prod = &ma * &mb;
            for m in [ma, mb, prod] {
                // Identify the operator up to phase by its label.
                let label = ["I", "X", "Y", "Z"]
                    .iter()
                    .flat_map(|x| ["I", "X", "Y", "Z"].iter().map(move |y| format!("{x}{y}")))
                    .find(|l| {
                        let t = (pauli2(l).adjoint() * &m).trace();
                        (t.norm() - 4.0).abs() < 1e-12
                    })
                    .unwrap();
                seen.insert(label);
            }
        }
        assert_eq!(seen.len(), 15);
        assert!(!seen.contains("II"));
    }

    #[test]
    fn bad_indices_rejected() {
        assert!(construct_family(5, 0).is_err());
        assert!(construct_family(0, 4).is_err());
    }
}
