//! Cyclic Jacobi methods: two-sided for Hermitian eigenproblems, one-sided
//! (Hestenes) for singular values.

use num_complex::Complex64;

use super::{ComplexMatrix, ComplexVector, ZERO};
use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 100;

/// Eigenpairs of a Hermitian matrix, eigenvalues ascending.
#[derive(Clone, Debug)]
pub struct Eigendecomposition {
    pub values: Vec<f64>,
    pub vectors: Vec<ComplexVector>,
}

impl Eigendecomposition {
    /// `V diag(values) V^dagger`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let n = self.values.len();
        let mut data = vec![ZERO; n * n];
        for (lambda, v) in self.values.iter().zip(&self.vectors) {
            let e = v.entries();
            for i in 0..n {
                let a = e[i] * *lambda;
                for j in 0..n {
                    data[i * n + j] += a * e[j].conj();
                }
            }
        }
        ComplexMatrix { rows: n, cols: n, data }
    }
}

/// 2x2 unitary `G` (as `[g_pp, g_pq, g_qp, g_qq]`) that diagonalizes
/// `[[app, apq], [conj(apq), aqq]]` under `G^dagger A G`.
fn jacobi_rotation(app: f64, aqq: f64, apq: Complex64) -> [Complex64; 4] {
    let r = apq.norm();
    let phase = Complex64::from_polar(1.0, -apq.arg());
    let tau = (aqq - app) / (2.0 * r);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    [Complex64::new(c, 0.0), Complex64::new(s, 0.0), phase * (-s), phase * c]
}

/// Applies `X <- X G` on columns `p`, `q` of a row-major `n`-column buffer.
fn rotate_columns(data: &mut [Complex64], n: usize, p: usize, q: usize, g: &[Complex64; 4]) {
    for row in data.chunks_exact_mut(n) {
        let (xp, xq) = (row[p], row[q]);
        row[p] = xp * g[0] + xq * g[2];
        row[q] = xp * g[1] + xq * g[3];
    }
}

/// Applies `X <- G^dagger X` on rows `p`, `q`.
fn rotate_rows(data: &mut [Complex64], n: usize, p: usize, q: usize, g: &[Complex64; 4]) {
    for k in 0..n {
        let (xp, xq) = (data[p * n + k], data[q * n + k]);
        data[p * n + k] = g[0].conj() * xp + g[2].conj() * xq;
        data[q * n + k] = g[1].conj() * xp + g[3].conj() * xq;
    }
}

fn off_diagonal_sqr(data: &[Complex64], n: usize) -> f64 {
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                acc += data[i * n + j].norm_sqr();
            }
        }
    }
    acc
}

/// Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.
///
/// Fails if `h` is not square or if `||h - h^dagger||_F > tol_herm`. The
/// input is symmetrized before iterating so that tiny anti-Hermitian noise
/// does not leak into the eigenvalues.
pub fn hermitian_eigendecomposition(h: &ComplexMatrix, tol_herm: f64) -> Result<Eigendecomposition> {
    let n = h.require_square()?;
    let residual = h.hermiticity_residual()?;
    if residual > tol_herm {
        return Err(Error::NotHermitian {
            residual,
            tol: tol_herm,
        });
    }

    let mut a: Vec<Complex64> = (0..n * n)
        .map(|idx| {
            let (i, j) = (idx / n, idx % n);
            (h.get(i, j) + h.get(j, i).conj()) * 0.5
        })
        .collect();
    let mut v = ComplexMatrix::identity(n)?.data;

    let scale = h.frobenius_norm();
    let threshold = (f64::EPSILON * scale).powi(2);
    for _ in 0..MAX_SWEEPS {
        if off_diagonal_sqr(&a, n) <= threshold {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq.norm() <= f64::MIN_POSITIVE {
                    continue;
                }
                let g = jacobi_rotation(a[p * n + p].re, a[q * n + q].re, apq);
                rotate_columns(&mut a, n, p, q, &g);
                rotate_rows(&mut a, n, p, q, &g);
                a[p * n + q] = ZERO;
                a[q * n + p] = ZERO;
                a[p * n + p].im = 0.0;
                a[q * n + q].im = 0.0;
                rotate_columns(&mut v, n, p, q, &g);
            }
        }
    }
    if off_diagonal_sqr(&a, n) > threshold.max((1e-13 * scale).powi(2)) {
        return Err(Error::NumericContract("Jacobi eigensolver did not converge".into()));
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[i * n + i].re.total_cmp(&a[j * n + j].re));
    let values = order.iter().map(|&i| a[i * n + i].re).collect();
    let vectors = order
        .iter()
        .map(|&j| ComplexVector {
            entries: (0..n).map(|i| v[i * n + j]).collect(),
        })
        .collect();
    Ok(Eigendecomposition { values, vectors })
}

/// Singular values in descending order, via one-sided Jacobi.
///
/// Column orthogonalization keeps small singular values accurate to roughly
/// machine precision times the largest one, which is what the singularity
/// test in operator classification needs.
pub fn singular_values(m: &ComplexMatrix) -> Vec<f64> {
    let (rows, cols) = (m.rows(), m.cols());
    let mut columns: Vec<Vec<Complex64>> = (0..cols).map(|j| (0..rows).map(|i| m.get(i, j)).collect()).collect();
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..cols {
            for q in (p + 1)..cols {
                let alpha: f64 = columns[p].iter().map(|z| z.norm_sqr()).sum();
                let beta: f64 = columns[q].iter().map(|z| z.norm_sqr()).sum();
                let gamma = super::dot_conj(&columns[p], &columns[q]);
                if gamma.norm() <= f64::EPSILON * (alpha * beta).sqrt() || gamma.norm() == 0.0 {
                    continue;
                }
                rotated = true;
                let g = jacobi_rotation(alpha, beta, gamma);
                let (left, right) = columns.split_at_mut(q);
                for (xp, xq) in left[p].iter_mut().zip(right[0].iter_mut()) {
                    let (a, b) = (*xp, *xq);
                    *xp = a * g[0] + b * g[2];
                    *xq = a * g[1] + b * g[3];
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut sv: Vec<f64> = columns
        .iter()
        .map(|c| c.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
        .collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}
