//! Dense complex matrix helpers for dimensions up to a few dozen.

use nalgebra::DMatrix;
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;

pub const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
pub const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

pub fn identity(dim: usize) -> CMatrix {
    CMatrix::identity(dim, dim)
}

/// `|v><v|`.
pub fn outer(v: &[Complex64]) -> CMatrix {
    let n = v.len();
    CMatrix::from_fn(n, n, |i, j| v[i] * v[j].conj())
}

/// `<v|m|v>`, real part.
pub fn expectation(m: &CMatrix, v: &[Complex64]) -> f64 {
    let n = v.len();
    let mut acc = ZERO;
    for i in 0..n {
        let mut row = ZERO;
        for j in 0..n {
            row += m[(i, j)] * v[j];
        }
        acc += v[i].conj() * row;
    }
    acc.re
}

pub fn matvec(m: &CMatrix, v: &[Complex64]) -> Vec<Complex64> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)] * v[j]).sum())
        .collect()
}

/// Largest entrywise deviation from Hermiticity.
pub fn hermitian_defect(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

pub fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()) * Complex64::new(0.5, 0.0)
}

/// Eigen-decomposition of the Hermitian part of `m`, eigenvalues ascending.
pub fn hermitian_eigen(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let eig = hermitian_part(m).symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let n = m.nrows();
    let vectors = CMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

pub fn min_eigenvalue(m: &CMatrix) -> f64 {
    hermitian_eigen(m).0.first().copied().unwrap_or(0.0)
}

/// `f(H)` for Hermitian `H` through its spectrum.
pub fn spectral_map(m: &CMatrix, f: impl Fn(f64) -> f64) -> CMatrix {
    let (values, vectors) = hermitian_eigen(m);
    let n = m.nrows();
    let mut out = CMatrix::zeros(n, n);
    for (k, &lam) in values.iter().enumerate() {
        let fk = f(lam);
        for i in 0..n {
            for j in 0..n {
                out[(i, j)] += vectors[(i, k)] * vectors[(j, k)].conj() * fk;
            }
        }
    }
    out
}

/// Largest entrywise modulus of `a - b`.
pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Kronecker product, left factor as the slow index.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let (ar, ac) = a.shape();
    let (br, bc) = b.shape();
    CMatrix::from_fn(ar * br, ac * bc, |i, j| {
        a[(i / br, j / bc)] * b[(i % br, j % bc)]
    })
}
