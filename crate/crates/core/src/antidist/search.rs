//! Numerical search for antidistinguishing POVMs.
//!
//! Work inside the span of the states. Outcome `k` gets an effect
//! `V_k C_k C_k^† V_k^†`, where the columns of `V_k` span the orthogonal
//! complement of state `k` within the span, so preclusion and positivity
//! hold by construction. Levenberg-Marquardt then drives the completeness
//! residual `Σ_k E_k - I` to zero.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::AntidistCertificate;
use crate::qcore::{linalg, CMatrix, Complex, Experiment, Outcome, PureState};
use crate::{Error, Result};

const RESTARTS: usize = 10;
const SPAN_TOL: f64 = 1e-10;
const RESIDUAL_TARGET: f64 = 1e-13;

type CVec = Vec<Complex>;

fn dot(a: &[Complex], b: &[Complex]) -> Complex {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm(a: &[Complex]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// Modified Gram-Schmidt; keeps vectors whose residual exceeds `SPAN_TOL`.
fn orthonormalize(vs: impl IntoIterator<Item = CVec>) -> Vec<CVec> {
    let mut out: Vec<CVec> = Vec::new();
    for mut v in vs {
        for q in &out {
            let c = dot(q, &v);
            v.iter_mut().zip(q).for_each(|(x, y)| *x -= c * y);
        }
        let n = norm(&v);
        if n > SPAN_TOL {
            v.iter_mut().for_each(|x| *x /= n);
            out.push(v);
        }
    }
    out
}

struct Problem {
    r: usize,
    rank: usize,
    /// Per state, `r - 1` orthonormal columns spanning its complement.
    comps: Vec<Vec<CVec>>,
}

impl Problem {
    fn m(&self) -> usize {
        self.r - 1
    }

    fn block(&self) -> usize {
        2 * self.m() * self.rank
    }

    fn nparams(&self) -> usize {
        self.comps.len() * self.block()
    }

    /// Column `b` of `U_k = V_k C_k` for every `k`.
    fn factors(&self, x: &[f64]) -> Vec<Vec<CVec>> {
        let (m, rank) = (self.m(), self.rank);
        self.comps
            .iter()
            .enumerate()
            .map(|(k, vk)| {
                let off = k * self.block();
                (0..rank)
                    .map(|b| {
                        let mut u = vec![Complex::new(0.0, 0.0); self.r];
                        for (a, va) in vk.iter().enumerate() {
                            let c = Complex::new(x[off + a * rank + b], x[off + m * rank + a * rank + b]);
                            u.iter_mut().zip(va).for_each(|(ui, vi)| *ui += c * vi);
                        }
                        u
                    })
                    .collect()
            })
            .collect()
    }

    fn residual(&self, x: &[f64]) -> Vec<f64> {
        let r = self.r;
        let mut s = vec![vec![Complex::new(0.0, 0.0); r]; r];
        for uk in self.factors(x) {
            for u in uk {
                for i in 0..r {
                    for j in i..r {
                        s[i][j] += u[i] * u[j].conj();
                    }
                }
            }
        }
        for (i, row) in s.iter_mut().enumerate() {
            row[i] -= 1.0;
        }
        pack(&s, r)
    }

    fn jacobian(&self, x: &[f64]) -> DMatrix<f64> {
        let (r, m, rank) = (self.r, self.m(), self.rank);
        let us = self.factors(x);
        let mut jac = DMatrix::zeros(r * r, self.nparams());
        let mut ds = vec![vec![Complex::new(0.0, 0.0); r]; r];
        for (k, vk) in self.comps.iter().enumerate() {
            let off = k * self.block();
            for (a, va) in vk.iter().enumerate() {
                for b in 0..rank {
                    let u = &us[k][b];
                    // d/dRe: v u^† + u v^†; d/dIm: i (v u^† - u v^†)
                    for (col, imag) in [(off + a * rank + b, false), (off + m * rank + a * rank + b, true)] {
                        for i in 0..r {
                            for j in i..r {
                                let p = va[i] * u[j].conj();
                                let q = u[i] * va[j].conj();
                                ds[i][j] = if imag {
                                    Complex::new(0.0, 1.0) * (p - q)
                                } else {
                                    p + q
                                };
                            }
                        }
                        for (row, v) in pack(&ds, r).into_iter().enumerate() {
                            jac[(row, col)] = v;
                        }
                    }
                }
            }
        }
        jac
    }

    fn solve(&self, x0: Vec<f64>, max_iters: usize) -> (Vec<f64>, f64) {
        let mut x = x0;
        let mut f = self.residual(&x);
        let mut fnorm = l2(&f);
        let mut lambda = 1e-3;
        for _ in 0..max_iters {
            if fnorm <= RESIDUAL_TARGET {
                break;
            }
            let jac = self.jacobian(&x);
            let jt = jac.transpose();
            let jtj = &jt * &jac;
            let g = &jt * nalgebra::DVector::from_vec(f.clone());
            let mut improved = false;
            while lambda < 1e10 {
                let mut a = jtj.clone();
                for i in 0..a.nrows() {
                    a[(i, i)] += lambda;
                }
                let Some(ch) = a.cholesky() else {
                    lambda *= 4.0;
                    continue;
                };
                let dx = ch.solve(&(-&g));
                let xn: Vec<f64> = x.iter().zip(dx.iter()).map(|(a, b)| a + b).collect();
                let fn_ = self.residual(&xn);
                let nn = l2(&fn_);
                if nn < fnorm {
                    x = xn;
                    f = fn_;
                    fnorm = nn;
                    lambda = (lambda / 3.0).max(1e-15);
                    improved = true;
                    break;
                }
                lambda *= 4.0;
            }
            if !improved {
                break;
            }
        }
        (x, fnorm)
    }
}

/// Real parts of the upper triangle then imaginary parts of the strict upper
/// triangle, `r^2` numbers in all.
fn pack(s: &[Vec<Complex>], r: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(r * r);
    for i in 0..r {
        for j in i..r {
            out.push(s[i][j].re);
        }
    }
    for i in 0..r {
        for j in i + 1..r {
            out.push(s[i][j].im);
        }
    }
    out
}

fn l2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Searches for a POVM with one outcome per state, outcome `k` precluding
/// state `k`.
///
/// Success is self-certifying: a returned certificate passes
/// [`super::verify_certificate`] at `tol`. `Ok(None)` makes no claim of
/// impossibility. A single state, or states spanning one ray, can never be
/// antidistinguished and yield `Ok(None)`.
pub fn search_antidist(
    states: &[PureState],
    max_iters: usize,
    tol: f64,
    seed: u64,
) -> Result<Option<AntidistCertificate>> {
    if states.is_empty() || states.len() > 8 {
        return Err(Error::Input(format!("{} states; expected 1 to 8", states.len())));
    }
    let dim = states[0].dim();
    if dim > 16 || states.iter().any(|s| s.dim() != dim) {
        return Err(Error::Input("states must share a dimension of at most 16".into()));
    }
    let span = orthonormalize(states.iter().map(|s| s.amplitudes().to_vec()));
    let r = span.len();
    if r < 2 {
        return Ok(None);
    }
    // Coordinates of each state in the span basis.
    let coords: Vec<CVec> = states
        .iter()
        .map(|s| span.iter().map(|w| dot(w, s.amplitudes())).collect())
        .collect();
    let comps: Vec<Vec<CVec>> = coords
        .iter()
        .map(|c| {
            let unit = (0..r).map(|i| {
                let mut e = vec![Complex::new(0.0, 0.0); r];
                e[i] = Complex::new(1.0, 0.0);
                e
            });
            let mut basis = orthonormalize(std::iter::once(c.clone()).chain(unit));
            basis.remove(0);
            basis
        })
        .collect();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut ranks = vec![1];
    if r > 2 {
        ranks.push(r - 1);
    }
    for rank in ranks {
        let problem = Problem {
            r,
            rank,
            comps: comps.clone(),
        };
        for _ in 0..RESTARTS {
            let x0: Vec<f64> = (0..problem.nparams()).map(|_| rng.random_range(-1.0..1.0)).collect();
            let (x, _) = problem.solve(x0, max_iters);
            if let Some(c) = assemble(states, &span, &problem, &x)? {
                if super::verify_certificate(&c, tol)?.0 {
                    return Ok(Some(c));
                }
            }
        }
    }
    Ok(None)
}

fn assemble(
    states: &[PureState],
    span: &[CVec],
    problem: &Problem,
    x: &[f64],
) -> Result<Option<AntidistCertificate>> {
    let dim = states[0].dim();
    let embed = |u: &CVec| -> CVec {
        let mut v = vec![Complex::new(0.0, 0.0); dim];
        for (c, w) in u.iter().zip(span) {
            v.iter_mut().zip(w).for_each(|(vi, wi)| *vi += c * wi);
        }
        v
    };
    let mut outside = linalg::identity(dim);
    for w in span {
        outside -= linalg::outer(w);
    }
    let outcomes = problem
        .factors(x)
        .iter()
        .enumerate()
        .map(|(k, uk)| {
            let mut e = CMatrix::zeros(dim, dim);
            for u in uk {
                e += linalg::outer(&embed(u));
            }
            if k == 0 {
                e += &outside;
            }
            Outcome {
                label: k.to_string(),
                effect: e,
            }
        })
        .collect();
    let Ok(experiment) = Experiment::new(outcomes) else {
        return Ok(None);
    };
    let assignment = (0..states.len()).map(|k| (k.to_string(), k)).collect();
    AntidistCertificate::new(states.to_vec(), experiment, assignment).map(Some)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::antidist::{pbr_states, triple_criterion, verify_certificate};
    use crate::qcore::inner_product;

    #[test]
    fn finds_pbr_measurement() {
        let c = search_antidist(&pbr_states(), 200, 1e-10, 1).unwrap().unwrap();
        assert!(verify_certificate(&c, 1e-10).unwrap().0);
    }

    #[test]
    fn single_state_not_found() {
        assert!(search_antidist(&[PureState::plus()], 100, 1e-10, 0).unwrap().is_none());
        let same = [PureState::plus(), PureState::plus()];
        assert!(search_antidist(&same, 100, 1e-10, 0).unwrap().is_none());
    }

    #[test]
    fn orthogonal_pair() {
        let c = search_antidist(&[PureState::zero(), PureState::one()], 100, 1e-12, 0)
            .unwrap()
            .unwrap();
        assert!(verify_certificate(&c, 1e-12).unwrap().0);
    }

    #[test]
    fn analytic_jacobian_matches_differences() {
        let s = [PureState::zero(), PureState::plus(), PureState::from_bloch([0.0, 1.0, 0.0]).unwrap()];
        let span = orthonormalize(s.iter().map(|x| x.amplitudes().to_vec()));
        let coords: Vec<CVec> =
            s.iter().map(|x| span.iter().map(|w| dot(w, x.amplitudes())).collect()).collect();
        let comps = coords
            .iter()
            .map(|c| {
                let mut b = orthonormalize([c.clone(), vec![1.0.into(), 0.0.into()], vec![0.0.into(), 1.0.into()]]);
                b.remove(0);
                b
            })
            .collect();
        let p = Problem { r: 2, rank: 1, comps };
        let x: Vec<f64> = (0..p.nparams()).map(|i| 0.3 + 0.1 * i as f64).collect();
        let jac = p.jacobian(&x);
        let f0 = p.residual(&x);
        for c in 0..x.len() {
            let mut xp = x.clone();
            xp[c] += 1e-7;
            let f1 = p.residual(&xp);
            for r in 0..f0.len() {
                assert!(((f1[r] - f0[r]) / 1e-7 - jac[(r, c)]).abs() < 1e-5);
            }
        }
    }

    #[test]
    fn qubit_triples_behave() {
        // Two non-orthogonal qubit states are never antidistinguishable.
        let pair = [PureState::zero(), PureState::plus()];
        assert!(search_antidist(&pair, 100, 1e-10, 3).unwrap().is_none());
        // The trine is.
        let trine: Vec<PureState> = (0..3)
            .map(|k| {
                let t = 2.0 * std::f64::consts::PI * k as f64 / 3.0;
                PureState::from_bloch([t.cos(), t.sin(), 0.0]).unwrap()
            })
            .collect();
        let a = inner_product(&trine[0], &trine[1]).unwrap().norm_sqr();
        assert!(triple_criterion(a, a, a));
        assert!(search_antidist(&trine, 200, 1e-10, 3).unwrap().is_some());
    }
}
