use nalgebra::{DMatrix, DVector};

use crate::{Error, Result, Tolerances};

const MAX_VARIABLES: usize = 5000;
const PIVOT_TOL: f64 = 1e-10;
const COST_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Maximize,
    Minimize,
}

/// `opt c·x  s.t.  A_eq x = b_eq,  A_le x ≤ b_le,  lo ≤ x ≤ hi`.
///
/// Constraint rows are stored sparsely as `(column, coefficient)` pairs.
#[derive(Debug, Clone)]
pub struct LinearProgram {
    pub sense: Sense,
    pub objective: Vec<f64>,
    pub eq_rows: Vec<Vec<(usize, f64)>>,
    pub eq_rhs: Vec<f64>,
    pub le_rows: Vec<Vec<(usize, f64)>>,
    pub le_rhs: Vec<f64>,
    pub bounds: Vec<(f64, f64)>,
}

impl LinearProgram {
    /// `n` variables bounded to `[0, ∞)` with a zero objective.
    pub fn new(n: usize, sense: Sense) -> Self {
        Self {
            sense,
            objective: vec![0.0; n],
            eq_rows: Vec::new(),
            eq_rhs: Vec::new(),
            le_rows: Vec::new(),
            le_rhs: Vec::new(),
            bounds: vec![(0.0, f64::INFINITY); n],
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn add_var(&mut self, cost: f64, lo: f64, hi: f64) -> usize {
        self.objective.push(cost);
        self.bounds.push((lo, hi));
        self.objective.len() - 1
    }

    pub fn add_eq(&mut self, row: Vec<(usize, f64)>, rhs: f64) {
        self.eq_rows.push(row);
        self.eq_rhs.push(rhs);
    }

    pub fn add_le(&mut self, row: Vec<(usize, f64)>, rhs: f64) {
        self.le_rows.push(row);
        self.le_rhs.push(rhs);
    }

    pub fn add_ge(&mut self, row: Vec<(usize, f64)>, rhs: f64) {
        self.add_le(row.into_iter().map(|(j, a)| (j, -a)).collect(), -rhs);
    }

    fn check(&self) -> Result<()> {
        let n = self.num_vars();
        if n > MAX_VARIABLES {
            return Err(Error::Lp(format!("{n} variables exceeds the {MAX_VARIABLES} limit")));
        }
        if self.bounds.len() != n {
            return Err(Error::Lp("bounds length differs from objective length".into()));
        }
        if self.eq_rows.len() != self.eq_rhs.len() || self.le_rows.len() != self.le_rhs.len() {
            return Err(Error::Lp("row count differs from rhs length".into()));
        }
        if self.objective.iter().any(|c| !c.is_finite()) {
            return Err(Error::Lp("non-finite objective coefficient".into()));
        }
        for row in self.eq_rows.iter().chain(&self.le_rows) {
            for &(j, a) in row {
                if j >= n || !a.is_finite() {
                    return Err(Error::Lp(format!("bad coefficient ({j}, {a})")));
                }
            }
        }
        if self.eq_rhs.iter().chain(&self.le_rhs).any(|b| !b.is_finite()) {
            return Err(Error::Lp("non-finite right-hand side".into()));
        }
        for (j, &(lo, hi)) in self.bounds.iter().enumerate() {
            if lo.is_nan() || hi.is_nan() || lo > hi || lo == f64::INFINITY || hi == f64::NEG_INFINITY {
                return Err(Error::Lp(format!("bad bounds [{lo}, {hi}] on variable {j}")));
            }
        }
        Ok(())
    }

    fn min_costs(&self) -> Vec<f64> {
        match self.sense {
            Sense::Minimize => self.objective.clone(),
            Sense::Maximize => self.objective.iter().map(|c| -c).collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

/// Evidence backing an [`LpStatus`].
///
/// Multipliers refer to the minimization form `min s·c·x` with `s = -1` for
/// maximization. For `Dual`, `le` entries are `≤ 0`. For `Farkas`, the
/// multipliers satisfy `y·A x ≤ 0` on every direction the bounds allow
/// while `y·b` exceeds the best achievable value, so no feasible point
/// exists. `Ray` is an improving direction of unbounded length.
#[derive(Debug, Clone, PartialEq)]
pub enum Certificate {
    Dual { eq: Vec<f64>, le: Vec<f64> },
    Farkas { eq: Vec<f64>, le: Vec<f64> },
    Ray(Vec<f64>),
}

#[derive(Debug, Clone)]
pub struct LpSolution {
    pub status: LpStatus,
    pub values: Vec<f64>,
    pub objective_value: f64,
    pub certificate: Certificate,
}

/// Residuals of an independent check of an [`LpSolution`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Verification {
    pub primal_residual: f64,
    pub dual_residual: f64,
    /// Primal objective minus the dual bound (minimization form).
    pub gap: f64,
}

impl Verification {
    pub fn passes(&self, tol: &Tolerances) -> bool {
        self.primal_residual <= tol.lp_feasibility
            && self.dual_residual <= tol.lp_optimality
            && self.gap.abs() <= tol.lp_optimality
    }
}

fn row_dot(row: &[(usize, f64)], x: &[f64]) -> f64 {
    row.iter().map(|&(j, a)| a * x[j]).sum()
}

impl LpSolution {
    /// Recomputes feasibility and the duality gap from `lp` alone.
    /// Only meaningful for optimal solutions.
    pub fn verify(&self, lp: &LinearProgram) -> Verification {
        let x = &self.values;
        let mut primal = 0.0f64;
        for (row, &b) in lp.eq_rows.iter().zip(&lp.eq_rhs) {
            primal = primal.max((row_dot(row, x) - b).abs());
        }
        for (row, &b) in lp.le_rows.iter().zip(&lp.le_rhs) {
            primal = primal.max(row_dot(row, x) - b);
        }
        for (&v, &(lo, hi)) in x.iter().zip(&lp.bounds) {
            primal = primal.max(lo - v).max(v - hi);
        }
        let Certificate::Dual { eq, le } = &self.certificate else {
            return Verification {
                primal_residual: primal,
                dual_residual: f64::INFINITY,
                gap: f64::INFINITY,
            };
        };
        let c = lp.min_costs();
        let mut reduced = c.clone();
        for (row, &y) in lp.eq_rows.iter().zip(eq) {
            for &(j, a) in row {
                reduced[j] -= a * y;
            }
        }
        let mut dual_res = 0.0f64;
        for (row, &y) in lp.le_rows.iter().zip(le) {
            dual_res = dual_res.max(y);
            for &(j, a) in row {
                reduced[j] -= a * y;
            }
        }
        let mut bound = 0.0;
        bound += lp.eq_rhs.iter().zip(eq).map(|(b, y)| b * y).sum::<f64>();
        bound += lp.le_rhs.iter().zip(le).map(|(b, y)| b * y).sum::<f64>();
        for (&r, &(lo, hi)) in reduced.iter().zip(&lp.bounds) {
            if r > 0.0 {
                if lo.is_finite() {
                    bound += r * lo;
                } else {
                    dual_res = dual_res.max(r);
                }
            } else if r < 0.0 {
                if hi.is_finite() {
                    bound += r * hi;
                } else {
                    dual_res = dual_res.max(-r);
                }
            }
        }
        let primal_obj: f64 = c.iter().zip(x).map(|(a, b)| a * b).sum();
        Verification {
            primal_residual: primal,
            dual_residual: dual_res,
            gap: primal_obj - bound,
        }
    }
}

/// How an internal nonnegative column maps back to an original variable.
#[derive(Clone, Copy)]
struct ColMap {
    var: usize,
    sign: f64,
}

struct Tableau {
    rows: usize,
    cols: usize,
    /// Row-major `rows × cols` matrix `B⁻¹A`.
    t: Vec<f64>,
    rhs: Vec<f64>,
    basis: Vec<usize>,
}

impl Tableau {
    fn at(&self, i: usize, j: usize) -> f64 {
        self.t[i * self.cols + j]
    }

    fn pivot(&mut self, r: usize, c: usize, cost: &mut [f64], obj: &mut f64) {
        let cols = self.cols;
        let p = self.t[r * cols + c];
        for j in 0..cols {
            self.t[r * cols + j] /= p;
        }
        self.rhs[r] /= p;
        let prow: Vec<f64> = self.t[r * cols..(r + 1) * cols].to_vec();
        let prhs = self.rhs[r];
        for i in 0..self.rows {
            if i == r {
                continue;
            }
            let f = self.t[i * cols + c];
            if f != 0.0 {
                let row = &mut self.t[i * cols..(i + 1) * cols];
                for (x, &pv) in row.iter_mut().zip(&prow) {
                    *x -= f * pv;
                }
                row[c] = 0.0;
                self.rhs[i] -= f * prhs;
            }
        }
        let f = cost[c];
        if f != 0.0 {
            for (x, &pv) in cost.iter_mut().zip(&prow) {
                *x -= f * pv;
            }
            cost[c] = 0.0;
            *obj += f * prhs;
        }
        self.basis[r] = c;
    }

    /// Bland's rule: lowest-index improving column, then the minimum ratio
    /// with ties broken by lowest basic index.
    fn run(
        &mut self,
        cost: &mut [f64],
        obj: &mut f64,
        allowed: usize,
        iterations: &mut usize,
        limit: usize,
    ) -> Result<Option<usize>> {
        loop {
            let Some(c) = (0..allowed).find(|&j| cost[j] < -COST_TOL) else {
                return Ok(None);
            };
            let mut best: Option<(usize, f64)> = None;
            for i in 0..self.rows {
                let a = self.at(i, c);
                if a > PIVOT_TOL {
                    let ratio = self.rhs[i].max(0.0) / a;
                    best = match best {
                        None => Some((i, ratio)),
                        Some((bi, br)) => {
                            let tie = (ratio - br).abs() <= 1e-12 * (1.0 + br.abs());
                            if ratio < br && !tie || tie && self.basis[i] < self.basis[bi] {
                                Some((i, ratio))
                            } else {
                                Some((bi, br))
                            }
                        }
                    };
                }
            }
            let Some((r, _)) = best else {
                return Ok(Some(c));
            };
            self.pivot(r, c, cost, obj);
            *iterations += 1;
            if *iterations > limit {
                return Err(Error::Lp(format!("iteration limit {limit} reached")));
            }
        }
    }
}

/// Solves `lp` exactly enough that the returned optimum passes
/// [`LpSolution::verify`]; any numeric failure is an error, never a
/// mislabelled optimum.
pub fn solve_lp(lp: &LinearProgram) -> Result<LpSolution> {
    lp.check()?;
    let tol = Tolerances::DEFAULT;
    let n = lp.num_vars();
    let cmin = lp.min_costs();

    // Nonnegative internal columns.
    let mut cols: Vec<ColMap> = Vec::new();
    let mut var_cols: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut offset = vec![0.0; n];
    let mut upper_rows: Vec<(usize, f64)> = Vec::new();
    for (j, &(lo, hi)) in lp.bounds.iter().enumerate() {
        if lo.is_finite() {
            offset[j] = lo;
            var_cols[j].push(cols.len());
            if hi.is_finite() {
                upper_rows.push((cols.len(), hi - lo));
            }
            cols.push(ColMap { var: j, sign: 1.0 });
        } else if hi.is_finite() {
            offset[j] = hi;
            var_cols[j].push(cols.len());
            cols.push(ColMap { var: j, sign: -1.0 });
        } else {
            var_cols[j].push(cols.len());
            cols.push(ColMap { var: j, sign: 1.0 });
            var_cols[j].push(cols.len());
            cols.push(ColMap { var: j, sign: -1.0 });
        }
    }
    let ns = cols.len();

    // Internal rows: (dense coefficients over structural columns, rhs, is_le).
    let mut rows: Vec<(Vec<f64>, f64, bool)> = Vec::new();
    let mut push_row = |row: &[(usize, f64)], b: f64, le: bool| {
        let mut dense = vec![0.0; ns];
        let mut shift = 0.0;
        for &(j, a) in row {
            shift += a * offset[j];
            for &k in &var_cols[j] {
                dense[k] += a * cols[k].sign;
            }
        }
        rows.push((dense, b - shift, le));
    };
    for (row, &b) in lp.eq_rows.iter().zip(&lp.eq_rhs) {
        push_row(row, b, false);
    }
    for (row, &b) in lp.le_rows.iter().zip(&lp.le_rhs) {
        push_row(row, b, true);
    }
    for &(k, ub) in &upper_rows {
        let mut dense = vec![0.0; ns];
        dense[k] = 1.0;
        rows.push((dense, ub, true));
    }
    let m = rows.len();
    let n_eq = lp.eq_rows.len();
    let n_le = lp.le_rows.len();

    // Column layout: structural | slacks (one per le row) | artificials (one per row).
    let le_rows: Vec<usize> = (0..m).filter(|&i| rows[i].2).collect();
    let slack_of: Vec<Option<usize>> = {
        let mut v = vec![None; m];
        for (k, &i) in le_rows.iter().enumerate() {
            v[i] = Some(ns + k);
        }
        v
    };
    let art0 = ns + le_rows.len();
    let ncols = art0 + m;
    let mut t = vec![0.0; m * ncols];
    let mut rhs = vec![0.0; m];
    let mut basis = vec![0; m];
    let mut sigma = vec![1.0; m];
    let mut identity_col = vec![0; m];
    for (i, (dense, b, _)) in rows.iter().enumerate() {
        let s = if *b < 0.0 { -1.0 } else { 1.0 };
        sigma[i] = s;
        for j in 0..ns {
            t[i * ncols + j] = s * dense[j];
        }
        if let Some(sc) = slack_of[i] {
            t[i * ncols + sc] = s;
        }
        t[i * ncols + art0 + i] = 1.0;
        rhs[i] = s * b;
        identity_col[i] = match slack_of[i] {
            Some(sc) if s > 0.0 => sc,
            _ => art0 + i,
        };
        basis[i] = identity_col[i];
    }
    let mut tab = Tableau { rows: m, cols: ncols, t, rhs, basis };
    let limit = 50_000 + 100 * (m + ncols);
    let mut iterations = 0;

    // Phase 1.
    let mut cost = vec![0.0; ncols];
    let mut obj = 0.0;
    for i in 0..m {
        if tab.basis[i] >= art0 {
            cost[tab.basis[i]] = 1.0;
        }
    }
    for i in 0..m {
        let bi = tab.basis[i];
        if cost[bi] != 0.0 {
            let f = cost[bi];
            for j in 0..ncols {
                cost[j] -= f * tab.at(i, j);
            }
            obj -= f * tab.rhs[i];
        }
    }
    // `obj` tracks −(phase-1 objective) under the update rule used in pivot.
    let phase1_cols = art0;
    tab.run(&mut cost, &mut obj, phase1_cols, &mut iterations, limit)?;
    let infeas: f64 = (0..m)
        .filter(|&i| tab.basis[i] >= art0)
        .map(|i| tab.rhs[i].max(0.0))
        .sum();
    if infeas > tol.lp_feasibility {
        // Phase-1 duals: y_i = c_B B⁻¹ e_i = c_art_i − d_art_i.
        let y_int: Vec<f64> = (0..m)
            .map(|i| if identity_col[i] >= art0 { 1.0 } else { 0.0 } - cost[art0 + i])
            .collect();
        let y: Vec<f64> = (0..m).map(|i| sigma[i] * y_int[i]).collect();
        return Ok(LpSolution {
            status: LpStatus::Infeasible,
            values: vec![f64::NAN; n],
            objective_value: f64::NAN,
            certificate: Certificate::Farkas {
                eq: y[..n_eq].to_vec(),
                le: y[n_eq..n_eq + n_le].to_vec(),
            },
        });
    }
    // Drive zero-level artificials out of the basis where possible.
    for i in 0..m {
        if tab.basis[i] >= art0 {
            if let Some(j) = (0..art0).find(|&j| tab.at(i, j).abs() > 1e-9) {
                let mut dummy_cost = vec![0.0; ncols];
                let mut dummy_obj = 0.0;
                tab.pivot(i, j, &mut dummy_cost, &mut dummy_obj);
            }
        }
    }

    // Phase 2.
    let mut cost = vec![0.0; ncols];
    for (k, cm) in cols.iter().enumerate() {
        cost[k] = cmin[cm.var] * cm.sign;
    }
    let mut obj = 0.0;
    for i in 0..m {
        let f = cost[tab.basis[i]];
        if f != 0.0 {
            for j in 0..ncols {
                cost[j] -= f * tab.at(i, j);
            }
            obj -= f * tab.rhs[i];
        }
    }
    if let Some(c) = tab.run(&mut cost, &mut obj, art0, &mut iterations, limit)? {
        let mut dir_int = vec![0.0; ncols];
        dir_int[c] = 1.0;
        for i in 0..m {
            dir_int[tab.basis[i]] -= tab.at(i, c);
        }
        let mut ray = vec![0.0; n];
        for (k, cm) in cols.iter().enumerate() {
            ray[cm.var] += cm.sign * dir_int[k];
        }
        return Ok(LpSolution {
            status: LpStatus::Unbounded,
            values: vec![f64::NAN; n],
            objective_value: match lp.sense {
                Sense::Maximize => f64::INFINITY,
                Sense::Minimize => f64::NEG_INFINITY,
            },
            certificate: Certificate::Ray(ray),
        });
    }

    // Re-solve the final basis against the original rows to shed the
    // rounding accumulated over pivots.
    let column = |j: usize, i: usize| -> f64 {
        if j < ns {
            sigma[i] * rows[i].0[j]
        } else if j < art0 {
            if slack_of[i] == Some(j) {
                sigma[i]
            } else {
                0.0
            }
        } else if j - art0 == i {
            1.0
        } else {
            0.0
        }
    };
    let bmat = DMatrix::from_fn(m, m, |i, k| column(tab.basis[k], i));
    let brhs = DVector::from_fn(m, |i, _| sigma[i] * rows[i].1);
    let lu = bmat.clone().lu();
    let xb = lu
        .solve(&brhs)
        .ok_or_else(|| Error::Lp("numeric breakdown: singular final basis".into()))?;
    let full_cost = |j: usize| if j < ns { cmin[cols[j].var] * cols[j].sign } else { 0.0 };
    let cb = DVector::from_fn(m, |k, _| full_cost(tab.basis[k]));
    let y_int = bmat
        .transpose()
        .lu()
        .solve(&cb)
        .ok_or_else(|| Error::Lp("numeric breakdown: singular dual system".into()))?;

    let mut internal = vec![0.0; ncols];
    for k in 0..m {
        internal[tab.basis[k]] = xb[k].max(0.0);
    }
    let mut values = offset.clone();
    for (k, cm) in cols.iter().enumerate() {
        values[cm.var] += cm.sign * internal[k];
    }
    let y: Vec<f64> = (0..m).map(|i| sigma[i] * y_int[i]).collect();
    let objective_value = lp.objective.iter().zip(&values).map(|(a, b)| a * b).sum();
    let sol = LpSolution {
        status: LpStatus::Optimal,
        values,
        objective_value,
        certificate: Certificate::Dual {
            eq: y[..n_eq].to_vec(),
            le: y[n_eq..n_eq + n_le].iter().map(|v| v.min(0.0)).collect(),
        },
    };
    let v = sol.verify(lp);
    let scale = 1.0 + objective_value.abs();
    if v.primal_residual > tol.lp_feasibility
        || v.dual_residual > tol.lp_optimality
        || v.gap.abs() > tol.lp_optimality * scale
    {
        return Err(Error::Lp(format!(
            "numeric breakdown: primal {:.3e}, dual {:.3e}, gap {:.3e}",
            v.primal_residual, v.dual_residual, v.gap
        )));
    }
    Ok(sol)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bounded_max() {
        let mut lp = LinearProgram::new(1, Sense::Maximize);
        lp.objective[0] = 1.0;
        lp.bounds[0] = (0.0, 10.0);
        lp.add_le(vec![(0, 1.0)], 3.0);
        let s = solve_lp(&lp).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.values[0] - 3.0).abs() < 1e-12);
        assert!(s.verify(&lp).passes(&Tolerances::DEFAULT));
    }

    #[test]
    fn equality_simplex() {
        let mut lp = LinearProgram::new(2, Sense::Maximize);
        lp.objective = vec![1.0, 1.0];
        lp.add_eq(vec![(0, 1.0), (1, 1.0)], 1.0);
        let s = solve_lp(&lp).unwrap();
        assert!((s.objective_value - 1.0).abs() < 1e-12);
        assert!(s.verify(&lp).passes(&Tolerances::DEFAULT));
    }

    #[test]
    fn infeasible_with_farkas() {
        let mut lp = LinearProgram::new(1, Sense::Minimize);
        lp.bounds[0] = (f64::NEG_INFINITY, f64::INFINITY);
        lp.add_ge(vec![(0, 1.0)], 2.0);
        lp.add_le(vec![(0, 1.0)], 1.0);
        let s = solve_lp(&lp).unwrap();
        assert_eq!(s.status, LpStatus::Infeasible);
        let Certificate::Farkas { le, .. } = &s.certificate else { panic!() };
        // y·A = 0 on the free variable and y·b < 0 proves x ≥ 2, x ≤ 1 inconsistent.
        let ya: f64 = -le[0] + le[1];
        let yb: f64 = -2.0 * le[0] + le[1];
        assert!(ya.abs() < 1e-12, "{le:?}");
        assert!(yb.abs() > 1e-9, "{le:?}");
    }

    #[test]
    fn unbounded_with_ray() {
        let mut lp = LinearProgram::new(2, Sense::Maximize);
        lp.objective = vec![1.0, 0.0];
        lp.add_le(vec![(0, 1.0), (1, -1.0)], 1.0);
        let s = solve_lp(&lp).unwrap();
        assert_eq!(s.status, LpStatus::Unbounded);
        let Certificate::Ray(r) = &s.certificate else { panic!() };
        assert!(r[0] > 0.0 && r[0] - r[1] <= 1e-12);
    }

    #[test]
    fn free_and_upper_bounded_variables() {
        // min x + y, x free, y ≤ 4, x − y = −3, x ≥ −10 via row.
        let mut lp = LinearProgram::new(2, Sense::Minimize);
        lp.objective = vec![1.0, 1.0];
        lp.bounds = vec![(f64::NEG_INFINITY, f64::INFINITY), (f64::NEG_INFINITY, 4.0)];
        lp.add_eq(vec![(0, 1.0), (1, -1.0)], -3.0);
        lp.add_ge(vec![(0, 1.0)], -10.0);
        let s = solve_lp(&lp).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.values[0] + 10.0).abs() < 1e-12 && (s.values[1] + 7.0).abs() < 1e-12);
        assert!(s.verify(&lp).passes(&Tolerances::DEFAULT));
    }

    #[test]
    fn redundant_equalities() {
        let mut lp = LinearProgram::new(3, Sense::Maximize);
        lp.objective = vec![1.0, 2.0, 0.0];
        lp.add_eq(vec![(0, 1.0), (1, 1.0), (2, 1.0)], 1.0);
        lp.add_eq(vec![(0, 2.0), (1, 2.0), (2, 2.0)], 2.0);
        lp.add_le(vec![(1, 1.0)], 0.25);
        let s = solve_lp(&lp).unwrap();
        assert!((s.objective_value - 1.25).abs() < 1e-12);
        assert!(s.verify(&lp).passes(&Tolerances::DEFAULT));
    }

    #[test]
    fn malformed_programs_rejected() {
        let mut lp = LinearProgram::new(1, Sense::Minimize);
        lp.add_eq(vec![(3, 1.0)], 1.0);
        assert!(solve_lp(&lp).is_err());
        let mut lp = LinearProgram::new(1, Sense::Minimize);
        lp.bounds[0] = (2.0, 1.0);
        assert!(solve_lp(&lp).is_err());
    }

    #[test]
    fn degenerate_cycling_example_terminates() {
        // Beale's example, which cycles under the textbook largest-coefficient rule.
        let mut lp = LinearProgram::new(4, Sense::Minimize);
        lp.objective = vec![-0.75, 150.0, -0.02, 6.0];
        lp.add_le(vec![(0, 0.25), (1, -60.0), (2, -0.04), (3, 9.0)], 0.0);
        lp.add_le(vec![(0, 0.5), (1, -90.0), (2, -0.02), (3, 3.0)], 0.0);
        lp.add_le(vec![(2, 1.0)], 1.0);
        let s = solve_lp(&lp).unwrap();
        assert!((s.objective_value + 0.05).abs() < 1e-12);
        assert!(s.verify(&lp).passes(&Tolerances::DEFAULT));
    }

    #[test]
    fn deterministic() {
        let mut lp = LinearProgram::new(3, Sense::Maximize);
        lp.objective = vec![1.0, 1.0, 1.0];
        lp.add_eq(vec![(0, 1.0), (1, 1.0), (2, 1.0)], 1.0);
        let a = solve_lp(&lp).unwrap();
        let b = solve_lp(&lp).unwrap();
        assert_eq!(a.values, b.values);
    }
}
