//! N-subsystem arrays of `ψ`/`φ` product preparations.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::theorems::determined;
use super::{check_puc, JointScenario, KEYS};
use crate::antidist::pbr_measurement;
use crate::omodel::{predicted_distribution, FiniteDistribution, OntModel, ResponseFunction, ResponseOutcome};
use crate::qcore::born_distribution;
use crate::{Error, Result, Tolerances};

/// Preparations keyed by bitstrings (`'0'` = `ψ`, `'1'` = `φ` per subsystem)
/// over one joint Λ, with the pairwise antidistinguishing experiments
/// `pair_{i}_{j}` (`i < j`, zero-based).
#[derive(Debug, Clone, PartialEq)]
pub struct ArrayScenario {
    pub n: usize,
    pub model: OntModel,
}

pub fn bitstring(x: usize, n: usize) -> String {
    (0..n).map(|i| if (x >> (n - 1 - i)) & 1 == 1 { '1' } else { '0' }).collect()
}

fn bit(x: usize, n: usize, i: usize) -> usize {
    (x >> (n - 1 - i)) & 1
}

pub fn pair_name(i: usize, j: usize) -> String {
    format!("pair_{i}_{j}")
}

fn pairs(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..n).flat_map(move |i| (i + 1..n).map(move |j| (i, j)))
}

/// Born rows of the antidistinguishing measurement, by quadruple index.
fn born_table() -> (Vec<String>, Vec<Vec<f64>>) {
    let c = pbr_measurement();
    let rows = c
        .states
        .iter()
        .map(|s| {
            born_distribution(s, &c.experiment)
                .expect("matching dimensions")
                .into_iter()
                .map(|p| if p < 1e-12 { 0.0 } else { p })
                .collect()
        })
        .collect();
    (c.experiment.labels().map(str::to_string).collect(), rows)
}

impl ArrayScenario {
    pub fn new(n: usize, model: OntModel) -> Result<Self> {
        if !(2..=8).contains(&n) {
            return Err(Error::Input(format!("{n} subsystems; expected 2 to 8")));
        }
        model.check_structure()?;
        for x in 0..1 << n {
            model.preparation(&bitstring(x, n))?;
        }
        for (i, j) in pairs(n) {
            model.experiment(&pair_name(i, j))?;
        }
        Ok(Self { n, model })
    }

    fn dist(&self, x: usize) -> &FiniteDistribution {
        &self.model.preparations[&bitstring(x, self.n)]
    }

    /// The two-subsystem scenario for `(i, j)`, averaging uniformly over the
    /// other subsystems' choices.
    pub fn pair_scenario(&self, i: usize, j: usize) -> Result<JointScenario> {
        let n = self.n;
        let mut m = OntModel::new(self.model.lambda_size);
        let scale = 1.0 / (1usize << (n - 2)) as f64;
        for a in 0..2 {
            for b in 0..2 {
                let mut w = vec![0.0; m.lambda_size];
                for x in (0..1usize << n).filter(|&x| bit(x, n, i) == a && bit(x, n, j) == b) {
                    w.iter_mut().zip(&self.dist(x).0).for_each(|(s, p)| *s += scale * p);
                }
                m.preparations.insert(KEYS[2 * a + b].to_string(), FiniteDistribution(w));
            }
        }
        let name = pair_name(i, j);
        m.experiments.insert(name.clone(), self.model.experiment(&name)?.to_vec());
        JointScenario::new(m)
    }
}

fn array_model(n: usize, lambda_size: usize) -> OntModel {
    let mut m = OntModel::new(lambda_size);
    let (labels, _) = born_table();
    for (i, j) in pairs(n) {
        let outs = labels
            .iter()
            .map(|l| ResponseOutcome {
                label: l.clone(),
                response: ResponseFunction(vec![0.0; lambda_size]),
            })
            .collect();
        m.experiments.insert(pair_name(i, j), outs);
    }
    m
}

fn set_response(m: &mut OntModel, pair: (usize, usize), lambda: usize, f: &[f64]) {
    let outs = m.experiments.get_mut(&pair_name(pair.0, pair.1)).expect("declared pair");
    for (o, v) in outs.iter_mut().zip(f) {
        o.response.0[lambda] = *v;
    }
}

/// One ontic state per bitstring; responses are the Born rows of the pair.
pub fn canonical_array(n: usize) -> Result<ArrayScenario> {
    let size = 1usize << n;
    let (_, born) = born_table();
    let mut m = array_model(n, size);
    for x in 0..size {
        m.preparations.insert(bitstring(x, n), FiniteDistribution::point(size, x));
        for (i, j) in pairs(n) {
            set_response(&mut m, (i, j), x, &born[2 * bit(x, n, i) + bit(x, n, j)]);
        }
    }
    ArrayScenario::new(n, m)
}

/// Canonical array in which all-`ψ` and all-`ψ`-but-the-last share an ontic
/// state `λ*` with weight `t`; the rest of each sits on a private state.
/// At `λ*` exactly the last subsystem is undetermined. Requires `0 < t <= 1/2`.
pub fn hand_built_array(n: usize, t: f64) -> Result<ArrayScenario> {
    shared_array(n, 1, t)
}

/// Like [`hand_built_array`] but the sharing pair differs in the last two
/// subsystems, which leaves two undetermined and breaks pairwise PUC.
pub fn planted_pair_array(n: usize, t: f64) -> Result<ArrayScenario> {
    shared_array(n, 0b11, t)
}

fn shared_array(n: usize, partner: usize, t: f64) -> Result<ArrayScenario> {
    if !(t > 0.0 && t <= 0.5) {
        return Err(Error::Input(format!("sharing weight {t} outside (0, 1/2]")));
    }
    let size = (1usize << n) + 1;
    let star = size - 1;
    let (_, born) = born_table();
    let mut m = array_model(n, size);
    for x in 0..1usize << n {
        let mut w = vec![0.0; size];
        w[x] = 1.0;
        for (i, j) in pairs(n) {
            let row = &born[2 * bit(x, n, i) + bit(x, n, j)];
            set_response(&mut m, (i, j), x, row);
        }
        if x == 0 || x == partner {
            w[x] = 1.0 - t;
            w[star] = t;
        }
        m.preparations.insert(bitstring(x, n), FiniteDistribution(w));
    }
    // Shared responses: the normalized pointwise minimum of the two Born rows.
    for (i, j) in pairs(n) {
        let r0 = &born[0];
        let r1 = &born[2 * bit(partner, n, i) + bit(partner, n, j)];
        let mins: Vec<f64> = r0.iter().zip(r1).map(|(a, b)| a.min(*b)).collect();
        let s: f64 = mins.iter().sum();
        let shared: Vec<f64> = mins.iter().map(|v| v / s).collect();
        set_response(&mut m, (i, j), star, &shared);
        for x in [0, partner] {
            let row = &born[2 * bit(x, n, i) + bit(x, n, j)];
            let rest: Vec<f64> = row.iter().zip(&shared).map(|(p, f)| (p - t * f) / (1.0 - t)).collect();
            if rest.iter().any(|v| *v < -1e-12) {
                return Err(Error::Input(format!("sharing weight {t} too large for pair ({i}, {j})")));
            }
            set_response(&mut m, (i, j), x, &rest.iter().map(|v| v.max(0.0)).collect::<Vec<_>>());
        }
    }
    ArrayScenario::new(n, m)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArrayRow {
    pub lambda: usize,
    pub weight: f64,
    pub undetermined: Vec<usize>,
    pub fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArrayReport {
    pub n: usize,
    pub rows: Vec<ArrayRow>,
    pub min_fraction: f64,
    /// `(n - 1) / n`.
    pub bound: f64,
    /// Every row leaves at most one subsystem undetermined.
    pub pass: bool,
}

const PREMISE_TOL: f64 = 1e-9;

fn check_premises(s: &ArrayScenario) -> Result<()> {
    let (_, born) = born_table();
    let n = s.n;
    for (i, j) in pairs(n) {
        let name = pair_name(i, j);
        for x in 0..1usize << n {
            let p = predicted_distribution(&s.model, &bitstring(x, n), &name)?;
            let want = &born[2 * bit(x, n, i) + bit(x, n, j)];
            let dev = p.iter().zip(want).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            if dev > PREMISE_TOL {
                return Err(Error::Precondition(format!(
                    "pair ({i}, {j}): `{}` misses the statistics by {dev:.3e}",
                    bitstring(x, n)
                )));
            }
        }
        let c = check_puc(&s.pair_scenario(i, j)?, PREMISE_TOL);
        if !c.holds {
            return Err(Error::Precondition(format!(
                "pair ({i}, {j}): PUC fails by {:.3e}",
                c.worst
            )));
        }
    }
    Ok(())
}

/// Checks that every ontic state with positive weight leaves at most one
/// subsystem's preparation undetermined (uniform prior over bitstrings).
///
/// Fails with [`Error::Precondition`] when some pair's experiment is not
/// reproduced or its two-subsystem scenario violates PUC.
pub fn n_array_determination(s: &ArrayScenario) -> Result<ArrayReport> {
    check_premises(s)?;
    let n = s.n;
    let mut rows = Vec::new();
    for l in 0..s.model.lambda_size {
        let w: Vec<f64> = (0..1usize << n).map(|x| s.dist(x).0[l]).collect();
        let total: f64 = w.iter().sum();
        if total <= Tolerances::DEFAULT.support {
            continue;
        }
        let undetermined: Vec<usize> = (0..n)
            .filter(|&i| {
                let p0: f64 = w.iter().enumerate().filter(|(x, _)| bit(*x, n, i) == 0).map(|(_, v)| v).sum();
                !determined(p0 / total)
            })
            .collect();
        rows.push(ArrayRow {
            lambda: l,
            weight: total / (1usize << n) as f64,
            fraction: (n - undetermined.len()) as f64 / n as f64,
            undetermined,
        });
    }
    let min_fraction = rows.iter().map(|r| r.fraction).fold(1.0, f64::min);
    Ok(ArrayReport {
        n,
        pass: rows.iter().all(|r| r.undetermined.len() <= 1),
        rows,
        min_fraction,
        bound: (n - 1) as f64 / n as f64,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConsistencyEntry {
    pub n_small: usize,
    pub n_large: usize,
    /// Largest statistic mismatch over all embeddings, preparations and pairs.
    pub max_deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FractionEntry {
    pub n: usize,
    /// `(n - 1) / n`.
    pub bound: f64,
    /// Smallest determined fraction, when the premises hold.
    pub observed: Option<f64>,
    pub premise_failure: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtendibilityReport {
    pub entries: Vec<ConsistencyEntry>,
    pub fractions: Vec<FractionEntry>,
    pub consistent: bool,
}

/// Statistics of `pair (i, j)` for every preparation of `small`, compared
/// with `large` restricted to `embed` (positions of the small subsystems),
/// averaging uniformly over the remaining subsystems.
fn embedding_deviation(small: &ArrayScenario, large: &ArrayScenario, embed: &[usize]) -> Result<f64> {
    let (n, big) = (small.n, large.n);
    let mut worst = 0.0f64;
    for (i, j) in pairs(n) {
        let name = pair_name(i, j);
        let big_name = pair_name(embed[i], embed[j]);
        for y in 0..1usize << n {
            let p = predicted_distribution(&small.model, &bitstring(y, n), &name)?;
            let mut avg = vec![0.0; p.len()];
            let mut count = 0.0;
            for x in (0..1usize << big).filter(|&x| (0..n).all(|k| bit(x, big, embed[k]) == bit(y, n, k))) {
                let q = predicted_distribution(&large.model, &bitstring(x, big), &big_name)?;
                avg.iter_mut().zip(&q).for_each(|(a, b)| *a += b);
                count += 1.0;
            }
            for (a, b) in avg.iter().zip(&p) {
                worst = worst.max((a / count - b).abs());
            }
        }
    }
    Ok(worst)
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    (0..1usize << n)
        .filter(|m| m.count_ones() as usize == k)
        .map(|m| (0..n).filter(|i| m >> i & 1 == 1).collect())
        .collect()
}

/// Compares every generated scenario for `2 <= n < n' <= n_max` on all
/// embeddings of `n` subsystems into `n'`, and reports the determination
/// fractions against `(n - 1) / n`.
pub fn extendibility_probe(
    generator: impl Fn(usize) -> Result<ArrayScenario>,
    n_max: usize,
) -> Result<ExtendibilityReport> {
    if !(2..=6).contains(&n_max) {
        return Err(Error::Input(format!("n_max {n_max} outside 2..=6")));
    }
    let mut scenarios = BTreeMap::new();
    for n in 2..=n_max {
        let s = generator(n)?;
        if s.n != n {
            return Err(Error::Input(format!("generator returned {} subsystems for {n}", s.n)));
        }
        scenarios.insert(n, s);
    }
    let mut entries = Vec::new();
    for (&n, small) in &scenarios {
        for (&big, large) in scenarios.range(n + 1..) {
            let mut worst = 0.0f64;
            for embed in subsets(big, n) {
                worst = worst.max(embedding_deviation(small, large, &embed)?);
            }
            entries.push(ConsistencyEntry {
                n_small: n,
                n_large: big,
                max_deviation: worst,
            });
        }
    }
    let fractions = scenarios
        .values()
        .map(|s| {
            let (observed, premise_failure) = match n_array_determination(s) {
                Ok(r) => (Some(r.min_fraction), None),
                Err(Error::Precondition(m)) => (None, Some(m)),
                Err(e) => return Err(e),
            };
            Ok(FractionEntry {
                n: s.n,
                bound: (s.n - 1) as f64 / s.n as f64,
                observed,
                premise_failure,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ExtendibilityReport {
        consistent: entries.iter().all(|e| e.max_deviation <= 1e-9) && fractions.iter().all(|f| f.premise_failure.is_none()),
        entries,
        fractions,
    })
}
