//! Scenario generators: the canonical product scenario and LP constructions
//! of PUC-satisfying and PIP-satisfying scenarios.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{check_independence, check_puc, Check, JointScenario, ProductJointScenario, KEYS};
use crate::antidist::{pbr_measurement, pbr_states};
use crate::lpopt::{solve_lp, LinearProgram, LpStatus, Sense};
use crate::omodel::{predicted_distribution, FiniteDistribution, OntModel, ResponseFunction, ResponseOutcome};
use crate::qcore::{born_distribution, Fragment};
use crate::{Error, Result};

/// Name of the antidistinguishing experiment in generated scenarios.
pub const PBR_EXPERIMENT: &str = "pbr";

const ZERO: f64 = 1e-12;

/// The product quadruple keyed by preparation pair, with the explicit
/// antidistinguishing measurement as experiment `pbr`.
pub fn pbr_fragment() -> Fragment {
    let cert = pbr_measurement();
    let preps = KEYS.iter().map(|k| k.to_string()).zip(pbr_states()).collect();
    let exps = [(PBR_EXPERIMENT.to_string(), cert.experiment)].into();
    Fragment::new(4, preps, exps).expect("valid fragment")
}

struct Targets {
    labels: Vec<String>,
    /// `t[2a+b][k]`, exact zeros where the Born probability vanishes.
    t: Vec<Vec<f64>>,
}

fn targets(f: &Fragment, epsilon: f64) -> Result<Targets> {
    let (name, e) = f
        .experiments()
        .iter()
        .next()
        .ok_or_else(|| Error::Input("fragment declares no experiment".into()))?;
    if f.experiments().len() != 1 {
        return Err(Error::Input(format!("expected one experiment, found `{name}` and others")));
    }
    let t = KEYS
        .iter()
        .map(|k| {
            let born = born_distribution(f.preparation(k)?, e)?;
            let n = born.len() as f64;
            Ok(born
                .into_iter()
                .map(|p| {
                    let p = if p < ZERO { 0.0 } else { p };
                    (1.0 - n * epsilon) * p + epsilon
                })
                .collect())
        })
        .collect::<Result<Vec<Vec<f64>>>>()?;
    Ok(Targets {
        labels: e.labels().map(str::to_string).collect(),
        t,
    })
}

fn responses(labels: &[String], f: &[Vec<f64>]) -> Vec<ResponseOutcome> {
    labels
        .iter()
        .enumerate()
        .map(|(k, l)| ResponseOutcome {
            label: l.clone(),
            response: ResponseFunction(f.iter().map(|v| v[k]).collect()),
        })
        .collect()
}

/// The ψ-ontic product scenario: one local ontic state per choice, Born
/// probabilities as responses.
pub fn canonical_pbr_scenario() -> ProductJointScenario {
    let t = targets(&pbr_fragment(), 0.0).expect("pbr targets");
    let f: Vec<Vec<f64>> = (0..4).map(|c| t.t[c].clone()).collect();
    let exps = [(PBR_EXPERIMENT.to_string(), responses(&t.labels, &f))].into();
    let (psi, phi) = (FiniteDistribution::point(2, 0), FiniteDistribution::point(2, 1));
    ProductJointScenario::from_locals([&psi, &phi], [&psi, &phi], exps).expect("canonical scenario")
}

/// An ontic state with a factorized posterior `x_a y_b` (`x = Cr(a = ψ)`,
/// `y = Cr(b = ψ)`) and fixed responses.
#[derive(Debug, Clone)]
struct Atom {
    x: f64,
    y: f64,
    f: Vec<f64>,
}

impl Atom {
    fn q(&self, c: usize) -> f64 {
        let (a, b) = (c / 2, c % 2);
        let xa = if a == 0 { self.x } else { 1.0 - self.x };
        let yb = if b == 0 { self.y } else { 1.0 - self.y };
        xa * yb
    }
}

fn draw_coordinate(rng: &mut ChaCha8Rng) -> f64 {
    match rng.random_range(0..3) {
        0 => 0.0,
        1 => 1.0,
        _ => rng.random_range(0.05..0.95),
    }
}

fn random_response(rng: &mut ChaCha8Rng, allowed: &[bool]) -> Vec<f64> {
    let w: Vec<f64> = allowed
        .iter()
        .map(|&ok| if ok { rng.random_range(0.05..1.0) } else { 0.0 })
        .collect();
    let s: f64 = w.iter().sum();
    w.iter().map(|x| x / s).collect()
}

/// A random atom whose responses live on the outcomes no supported pair
/// precludes, with probability `confine` (when such outcomes exist).
fn random_atom(rng: &mut ChaCha8Rng, t: &Targets, confine: f64) -> Atom {
    let (x, y) = (draw_coordinate(rng), draw_coordinate(rng));
    let mut atom = Atom { x, y, f: Vec::new() };
    let n = t.labels.len();
    let allowed: Vec<bool> = (0..n)
        .map(|k| (0..4).all(|c| atom.q(c) == 0.0 || t.t[c][k] > 0.0))
        .collect();
    atom.f = if allowed.iter().any(|&a| a) && rng.random_bool(confine) {
        random_response(rng, &allowed)
    } else {
        random_response(rng, &vec![true; n])
    };
    atom
}

const GADGETS: usize = 3;

/// A shared atom plus, for each pair it supports, a deterministic-posterior
/// remainder atom such that weight `s` on the shared atom and `1 - s q_ab`
/// on the remainder reproduces the targets of pair `ab`. `s` is `scale`
/// times its largest admissible value. Empty when the shared atom puts
/// weight on an outcome some supported pair must never see.
fn split_gadget(shared: Atom, t: &Targets, scale: f64) -> Vec<Atom> {
    let mut s_max = f64::INFINITY;
    for c in (0..4).filter(|&c| shared.q(c) > 0.0) {
        s_max = s_max.min(0.95 / shared.q(c));
        for (k, fk) in shared.f.iter().enumerate().filter(|(_, fk)| **fk > 0.0) {
            s_max = s_max.min(t.t[c][k] / (shared.q(c) * fk));
        }
    }
    if !(s_max > 0.0) || !s_max.is_finite() {
        return Vec::new();
    }
    let s = scale * s_max;
    let mut out = Vec::new();
    for c in (0..4).filter(|&c| shared.q(c) > 0.0) {
        let sq = s * shared.q(c);
        let f = t.t[c]
            .iter()
            .zip(&shared.f)
            .map(|(tk, fk)| ((tk - sq * fk) / (1.0 - sq)).max(0.0))
            .collect();
        out.push(Atom {
            x: if c / 2 == 0 { 1.0 } else { 0.0 },
            y: if c % 2 == 0 { 1.0 } else { 0.0 },
            f,
        });
    }
    out.push(shared);
    out
}

/// Solves for atom weights `w` with `P_ab(λ) = w_λ q_ab(λ)` reproducing the
/// targets, maximizing `Σ w_λ gain(λ)`.
fn solve_weights(atoms: &[Atom], t: &Targets, gain: impl Fn(&Atom) -> f64) -> Result<Option<Vec<f64>>> {
    let n_out = t.labels.len();
    let mut lp = LinearProgram::new(0, Sense::Maximize);
    let cols: Vec<Option<usize>> = atoms
        .iter()
        .map(|a| {
            let forced_zero =
                (0..4).any(|c| a.q(c) > 0.0 && (0..n_out).any(|k| t.t[c][k] == 0.0 && a.f[k] > ZERO));
            (!forced_zero).then(|| lp.add_var(gain(a), 0.0, f64::INFINITY))
        })
        .collect();
    for c in 0..4 {
        let norm: Vec<(usize, f64)> = atoms
            .iter()
            .zip(&cols)
            .filter_map(|(a, col)| col.map(|j| (j, a.q(c))))
            .filter(|&(_, v)| v != 0.0)
            .collect();
        lp.add_eq(norm, 1.0);
        // The last outcome row follows from the others and normalization.
        for k in 0..n_out - 1 {
            let row: Vec<(usize, f64)> = atoms
                .iter()
                .zip(&cols)
                .filter_map(|(a, col)| col.map(|j| (j, a.q(c) * a.f[k])))
                .filter(|&(_, v)| v != 0.0)
                .collect();
            if row.is_empty() && t.t[c][k] == 0.0 {
                continue;
            }
            lp.add_eq(row, t.t[c][k]);
        }
    }
    let sol = solve_lp(&lp)?;
    match sol.status {
        LpStatus::Optimal => Ok(Some(cols.iter().map(|c| c.map_or(0.0, |j| sol.values[j].max(0.0))).collect())),
        LpStatus::Infeasible => Ok(None),
        LpStatus::Unbounded => Err(Error::Lp("weight LP unbounded".into())),
    }
}

fn atoms_model(atoms: &[Atom], w: &[f64], t: &Targets) -> OntModel {
    let mut m = OntModel::new(atoms.len());
    for c in 0..4 {
        m.preparations.insert(
            KEYS[c].to_string(),
            FiniteDistribution(atoms.iter().zip(w).map(|(a, w)| w * a.q(c)).collect()),
        );
    }
    let f: Vec<Vec<f64>> = atoms.iter().map(|a| a.f.clone()).collect();
    m.experiments.insert(PBR_EXPERIMENT.to_string(), responses(&t.labels, &f));
    m
}

fn require_targets(m: &OntModel, t: &Targets, tol: f64) -> Result<()> {
    for c in 0..4 {
        let p = predicted_distribution(m, KEYS[c], PBR_EXPERIMENT)?;
        let dev = p.iter().zip(&t.t[c]).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        if dev > tol {
            return Err(Error::Lp(format!("generated scenario misses `{}` by {dev:.3e}", KEYS[c])));
        }
    }
    Ok(())
}

fn canonical_atoms(t: &Targets) -> Vec<Atom> {
    (0..4)
        .map(|c| Atom {
            x: if c / 2 == 0 { 1.0 } else { 0.0 },
            y: if c % 2 == 0 { 1.0 } else { 0.0 },
            f: t.t[c].clone(),
        })
        .collect()
}

/// A PUC-satisfying scenario for the product quadruple, built by LP.
///
/// Every ontic state has a factorized posterior by construction, so PUC
/// holds exactly. The statistics of `pbr` are the Born probabilities mixed
/// with noise so that each precluded outcome gets probability exactly
/// `epsilon`. Alongside one canonical atom per pair (which keeps the LP
/// feasible) the seed draws a few split gadgets (a shared atom plus
/// remainders that make it usable) and `random_atoms` free atoms, and the
/// LP weights them to maximize `ω(P_ψψ, P_φφ) + ω(P_ψφ, P_φψ)`.
pub fn puc_lp_scenario(seed: u64, epsilon: f64, random_atoms: usize) -> Result<Option<JointScenario>> {
    if !(0.0..=0.25).contains(&epsilon) {
        return Err(Error::Input(format!("epsilon {epsilon} outside [0, 1/4]")));
    }
    let t = targets(&pbr_fragment(), epsilon)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let confine = if epsilon == 0.0 { 0.5 } else { 0.0 };
    let mut atoms = canonical_atoms(&t);
    for _ in 0..GADGETS {
        let shared = random_atom(&mut rng, &t, confine);
        atoms.extend(split_gadget(shared, &t, rng.random_range(0.5..0.95)));
    }
    atoms.extend((0..random_atoms).map(|_| random_atom(&mut rng, &t, confine)));
    let gain = |a: &Atom| a.q(0).min(a.q(3)) + a.q(1).min(a.q(2));
    let Some(w) = solve_weights(&atoms, &t, gain)? else {
        return Ok(None);
    };
    let m = atoms_model(&atoms, &w, &t);
    require_targets(&m, &t, 1e-9)?;
    Ok(Some(JointScenario::new(m)?))
}

/// Fits responses to symmetric product preparations.
///
/// Both subsystems use the local distributions `p_psi`, `p_phi`; joints are
/// their products. Solves for responses on the joint ontic states that give
/// the Born statistics of `pbr` mixed so each precluded outcome has
/// probability `epsilon`. `Ok(None)` means no responses exist for these
/// distributions.
pub fn pip_fit(p_psi: &FiniteDistribution, p_phi: &FiniteDistribution, epsilon: f64) -> Result<Option<ProductJointScenario>> {
    if p_psi.len() != p_phi.len() {
        return Err(Error::DimensionMismatch(p_psi.len(), p_phi.len()));
    }
    let t = targets(&pbr_fragment(), epsilon)?;
    let shell = ProductJointScenario::from_locals([p_psi, p_phi], [p_psi, p_phi], BTreeMap::new())?;
    let n = shell.model.lambda_size;
    let k_out = t.labels.len();
    let mut lp = LinearProgram::new(n * k_out, Sense::Maximize);
    let var = |l: usize, k: usize| l * k_out + k;
    for l in 0..n {
        lp.add_eq((0..k_out).map(|k| (var(l, k), 1.0)).collect(), 1.0);
    }
    for c in 0..4 {
        let p = &shell.model.preparations[KEYS[c]].0;
        for k in 0..k_out - 1 {
            let row: Vec<(usize, f64)> = (0..n).filter(|&l| p[l] > 0.0).map(|l| (var(l, k), p[l])).collect();
            lp.add_eq(row, t.t[c][k]);
        }
    }
    let sol = solve_lp(&lp)?;
    match sol.status {
        LpStatus::Infeasible => return Ok(None),
        LpStatus::Unbounded => return Err(Error::Lp("response LP unbounded".into())),
        LpStatus::Optimal => {}
    }
    let f: Vec<Vec<f64>> = (0..n)
        .map(|l| {
            let v: Vec<f64> = (0..k_out).map(|k| sol.values[var(l, k)].clamp(0.0, 1.0)).collect();
            let s: f64 = v.iter().sum();
            v.iter().map(|x| x / s).collect()
        })
        .collect();
    let mut model = shell.model;
    model.experiments.insert(PBR_EXPERIMENT.to_string(), responses(&t.labels, &f));
    require_targets(&model, &t, 1e-9)?;
    Ok(Some(ProductJointScenario::new(shell.lambda_a_size, shell.lambda_b_size, model)?))
}

/// Best scenario found by [`search_puc_nca_gap`].
#[derive(Debug, Clone)]
pub struct GapResult {
    pub seed: u64,
    pub omega: f64,
    pub scenario: ProductJointScenario,
    pub puc: Check,
    pub independence: Check,
}

/// Randomized search for a product-structured scenario that satisfies PUC
/// and exactly reproduces the fragment's antidistinguishing experiment while
/// `P_ψψ` and `P_ψφ` overlap.
///
/// The fragment must hold the four keyed preparations and one experiment.
/// The joint ontic space is a `grid.0 x grid.1` grid (at most 32 cells);
/// cells `(a, b)` with `a, b < 2` hold canonical atoms, the rest random
/// factorized-posterior atoms. Each seed solves an LP maximizing
/// `ω(P_ψψ, P_ψφ)`. Returns the best scenario passing PUC at `1e-9` and
/// failing independence at `1e-9`; no optimality is claimed.
pub fn search_puc_nca_gap(fragment: &Fragment, grid: (usize, usize), seeds: &[u64]) -> Result<Option<GapResult>> {
    let (na, nb) = grid;
    if na < 2 || nb < 2 || na * nb > 32 {
        return Err(Error::Input(format!("grid {na}x{nb} must be at least 2x2 and at most 32 cells")));
    }
    let t = targets(fragment, 0.0)?;
    let canon = canonical_atoms(&t);
    let mut best: Option<GapResult> = None;
    for &seed in seeds {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut atoms = Vec::with_capacity(na * nb);
        for i in 0..na {
            for j in 0..nb {
                atoms.push(if i < 2 && j < 2 {
                    canon[2 * i + j].clone()
                } else {
                    random_atom(&mut rng, &t, 1.0)
                });
            }
        }
        let Some(w) = solve_weights(&atoms, &t, |a| a.q(0).min(a.q(1)))? else {
            continue;
        };
        let m = atoms_model(&atoms, &w, &t);
        require_targets(&m, &t, 1e-9)?;
        let scenario = ProductJointScenario::new(na, nb, m)?;
        let puc = check_puc(&scenario.flatten(), 1e-9);
        let independence = check_independence(&scenario, 1e-9);
        if !puc.holds || independence.holds {
            continue;
        }
        let joint = scenario.flatten();
        let omega = crate::omodel::classical_overlap(joint.dist(0, 0), joint.dist(0, 1))?;
        if best.as_ref().is_none_or(|b| omega > b.omega) {
            best = Some(GapResult {
                seed,
                omega,
                scenario,
                puc,
                independence,
            });
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pucthm::{check_pip, check_puc, key};

    #[test]
    fn canonical_scenario_is_pip() {
        let s = canonical_pbr_scenario();
        assert!(check_pip(&s, 0.0).holds);
        assert!(check_puc(&s.flatten(), 0.0).holds);
        let t = targets(&pbr_fragment(), 0.0).unwrap();
        require_targets(&s.model, &t, 1e-12).unwrap();
    }

    #[test]
    fn depolarized_targets() {
        let t = targets(&pbr_fragment(), 0.01).unwrap();
        for (c, row) in t.t.iter().enumerate() {
            assert!((row[c] - 0.01).abs() < 1e-15);
            assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn overlapping_locals_cannot_fit_exactly() {
        let p = FiniteDistribution(vec![0.8, 0.0, 0.2]);
        let q = FiniteDistribution(vec![0.0, 0.8, 0.2]);
        assert!(pip_fit(&p, &q, 0.0).unwrap().is_none());
        let p = FiniteDistribution(vec![1.0, 0.0]);
        let q = FiniteDistribution(vec![0.0, 1.0]);
        assert!(pip_fit(&p, &q, 0.0).unwrap().is_some());
    }

    #[test]
    fn key_order_matches_states() {
        assert_eq!(key(0, 1), "psi,phi");
        assert_eq!(key(1, 0), "phi,psi");
    }
}
