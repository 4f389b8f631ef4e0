use std::collections::BTreeMap;

use super::simplex::{solve_lp, LinearProgram, LpSolution, LpStatus, Sense};
use crate::omodel::{
    classical_overlap, reproduces_fragment, validate_model, FiniteDistribution, OntModel,
    ResponseOutcome,
};
use crate::qcore::{born_distribution, Fragment};
use crate::{Error, Result, Tolerances};

/// Born probabilities below this are treated as exact zeros.
const ZERO_TARGET: f64 = 1e-12;
/// Response values above this make an atom unusable for a precluded statistic.
const ZERO_RESPONSE: f64 = 1e-12;
/// Residual norm below which a constraint row counts as dependent.
const DEPENDENT_ROW: f64 = 1e-9;
/// Reproduction slack demanded of every fitted model.
const FIT_TOL: f64 = 1e-8;

/// A fixed family of response functions over `Λ = {0, .., lambda_size-1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Responses {
    pub lambda_size: usize,
    pub experiments: BTreeMap<String, Vec<ResponseOutcome>>,
}

impl Responses {
    pub fn of_model(m: &OntModel) -> Self {
        Self {
            lambda_size: m.lambda_size,
            experiments: m.experiments.clone(),
        }
    }

    fn as_model(&self) -> OntModel {
        OntModel {
            lambda_size: self.lambda_size,
            preparations: BTreeMap::new(),
            experiments: self.experiments.clone(),
        }
    }
}

/// An overlap-maximizing fit.
#[derive(Debug, Clone)]
pub struct OverlapFit {
    pub model: OntModel,
    /// Optimal total overlap over the requested pairs.
    pub omega: f64,
    /// `classical_overlap` of each pair in the returned model.
    pub pair_overlaps: Vec<f64>,
    pub solution: LpSolution,
}

struct Builder<'a> {
    fragment: &'a Fragment,
    responses: &'a Responses,
    lp: LinearProgram,
    /// `vars[p][λ]` is the LP column of `P_p(λ)` when usable.
    vars: Vec<Vec<Option<usize>>>,
    names: Vec<String>,
}

fn independent_rows(rows: Vec<(Vec<(usize, f64)>, f64)>) -> Vec<(Vec<(usize, f64)>, f64)> {
    // Gram-Schmidt on augmented [a | b] rows, keeping original rows.
    let mut basis: Vec<BTreeMap<usize, f64>> = Vec::new();
    let mut kept = Vec::new();
    const RHS: usize = usize::MAX;
    for (row, b) in rows {
        let mut v: BTreeMap<usize, f64> = row.iter().copied().collect();
        v.insert(RHS, b);
        let norm0 = v.values().map(|x| x * x).sum::<f64>().sqrt();
        if norm0 == 0.0 {
            continue;
        }
        for q in &basis {
            let dot: f64 = v.iter().map(|(k, x)| x * q.get(k).copied().unwrap_or(0.0)).sum();
            for (k, qx) in q {
                *v.entry(*k).or_insert(0.0) -= dot * qx;
            }
        }
        let norm = v.values().map(|x| x * x).sum::<f64>().sqrt();
        if norm > DEPENDENT_ROW * norm0 {
            basis.push(v.into_iter().map(|(k, x)| (k, x / norm)).collect());
            kept.push((row, b));
        }
    }
    kept
}

impl<'a> Builder<'a> {
    fn new(fragment: &'a Fragment, responses: &'a Responses, sense: Sense) -> Result<Self> {
        let violations = validate_model(&responses.as_model(), &Tolerances::DEFAULT);
        if !violations.is_empty() {
            return Err(Error::Input(format!("invalid responses: {}", violations.join("; "))));
        }
        for (ename, e) in fragment.experiments() {
            let outs = responses
                .experiments
                .get(ename)
                .ok_or_else(|| Error::UnknownExperiment(ename.clone()))?;
            if !outs.iter().map(|o| o.label.as_str()).eq(e.labels()) {
                return Err(Error::Input(format!("outcome labels of `{ename}` differ")));
            }
        }
        let n = responses.lambda_size;
        let names: Vec<String> = fragment.preparations().keys().cloned().collect();
        let mut lp = LinearProgram::new(0, sense);
        let mut vars = Vec::new();
        for state in fragment.preparations().values() {
            let mut stats = Vec::new();
            for (ename, e) in fragment.experiments() {
                let born = born_distribution(state, e)?;
                for (o, target) in responses.experiments[ename].iter().zip(born) {
                    stats.push((&o.response.0, if target < ZERO_TARGET { 0.0 } else { target }));
                }
            }
            let usable: Vec<bool> = (0..n)
                .map(|l| {
                    !stats
                        .iter()
                        .any(|(f, t)| *t == 0.0 && f[l] > ZERO_RESPONSE)
                })
                .collect();
            let cols: Vec<Option<usize>> = usable
                .iter()
                .map(|&u| u.then(|| lp.add_var(0.0, 0.0, f64::INFINITY)))
                .collect();
            let mut rows = vec![(
                cols.iter().flatten().map(|&c| (c, 1.0)).collect::<Vec<_>>(),
                1.0,
            )];
            for (f, t) in stats {
                let row: Vec<(usize, f64)> = cols
                    .iter()
                    .enumerate()
                    .filter_map(|(l, c)| c.map(|c| (c, f[l])))
                    .filter(|&(_, a)| a != 0.0)
                    .collect();
                if t == 0.0 && row.iter().all(|&(_, a)| a.abs() <= ZERO_RESPONSE) {
                    continue;
                }
                rows.push((row, t));
            }
            for (row, b) in independent_rows(rows) {
                lp.add_eq(row, b);
            }
            vars.push(cols);
        }
        Ok(Self {
            fragment,
            responses,
            lp,
            vars,
            names,
        })
    }

    fn index(&self, name: &str) -> Result<usize> {
        self.names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| Error::UnknownPreparation(name.to_string()))
    }

    /// Adds `m_λ ≤ P_a(λ), m_λ ≤ P_b(λ)` with objective `+Σ m_λ`.
    fn add_overlap(&mut self, a: usize, b: usize) {
        for l in 0..self.responses.lambda_size {
            if let (Some(ca), Some(cb)) = (self.vars[a][l], self.vars[b][l]) {
                let m = self.lp.add_var(1.0, 0.0, f64::INFINITY);
                self.lp.add_le(vec![(m, 1.0), (ca, -1.0)], 0.0);
                if cb != ca {
                    self.lp.add_le(vec![(m, 1.0), (cb, -1.0)], 0.0);
                }
            }
        }
    }

    fn solve(&self) -> Result<Option<(OntModel, LpSolution)>> {
        if self.vars.iter().any(|v| v.iter().all(Option::is_none)) {
            return Ok(None);
        }
        let sol = solve_lp(&self.lp)?;
        match sol.status {
            LpStatus::Infeasible => return Ok(None),
            LpStatus::Unbounded => return Err(Error::Lp("fit LP reported unbounded".into())),
            LpStatus::Optimal => {}
        }
        let n = self.responses.lambda_size;
        let mut model = OntModel::new(n);
        model.experiments = self.responses.experiments.clone();
        for (name, cols) in self.names.iter().zip(&self.vars) {
            let mut w: Vec<f64> = cols
                .iter()
                .map(|c| c.map_or(0.0, |c| sol.values[c].max(0.0)))
                .collect();
            let s: f64 = w.iter().sum();
            w.iter_mut().for_each(|x| *x /= s);
            model.preparations.insert(name.clone(), FiniteDistribution(w));
        }
        let rep = reproduces_fragment(&model, self.fragment, FIT_TOL)?;
        if !rep.reproduces {
            return Err(Error::Lp(format!(
                "fitted model misses the fragment by {:.3e}",
                rep.max_deviation
            )));
        }
        Ok(Some((model, sol)))
    }
}

/// Finds preparation distributions over the fixed responses that reproduce
/// every statistic of `f`, or `None` when none exist.
pub fn fit_preparations(f: &Fragment, responses: &Responses) -> Result<Option<OntModel>> {
    let b = Builder::new(f, responses, Sense::Maximize)?;
    Ok(b.solve()?.map(|(m, _)| m))
}

/// Maximizes `Σ ω(P_a, P_b)` over the listed pairs subject to reproducing `f`.
pub fn max_total_overlap_fit(
    f: &Fragment,
    responses: &Responses,
    pairs: &[(&str, &str)],
) -> Result<OverlapFit> {
    let mut b = Builder::new(f, responses, Sense::Maximize)?;
    let mut idx = Vec::new();
    for (a, c) in pairs {
        let (ia, ic) = (b.index(a)?, b.index(c)?);
        b.add_overlap(ia, ic);
        idx.push((a.to_string(), c.to_string()));
    }
    let (model, solution) = b
        .solve()?
        .ok_or_else(|| Error::Infeasible("no model over these responses reproduces the fragment".into()))?;
    let pair_overlaps = idx
        .iter()
        .map(|(a, c)| classical_overlap(&model.preparations[a], &model.preparations[c]))
        .collect::<Result<Vec<_>>>()?;
    Ok(OverlapFit {
        omega: solution.objective_value,
        model,
        pair_overlaps,
        solution,
    })
}

/// Maximizes `ω(P_a, P_b)` subject to reproducing `f`.
pub fn max_overlap_fit(
    f: &Fragment,
    responses: &Responses,
    prep_a: &str,
    prep_b: &str,
) -> Result<OverlapFit> {
    max_total_overlap_fit(f, responses, &[(prep_a, prep_b)])
}
