//! Dense complex vectors and matrices.
//!
//! Everything here is small and dense: states of a few qubits, operators of a
//! few hundred rows at most. Storage is a flat row-major `Vec<Complex64>`.
//! All constructors reject NaN and infinity so that later stages never see
//! them.
//!
//! The inner product is conjugate-linear in its first argument, so
//! `inner_product(a, b)` is the bra-ket `<a|b>`.

mod classify;
mod eigen;

pub use classify::{classify_operator, polarization_reconstruct, OperatorClass, DEFAULT_CLASSIFY_TOL};
pub use eigen::{hermitian_eigendecomposition, singular_values, Eigendecomposition};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A complex scalar. JSON form is the two-element array `[re, im]`.
pub type ComplexScalar = Complex64;

pub(crate) const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub(crate) const ONE: Complex64 = Complex64::new(1.0, 0.0);

fn all_finite(entries: &[Complex64]) -> bool {
    entries.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "VectorRepr", into = "VectorRepr")]
pub struct ComplexVector {
    entries: Vec<Complex64>,
}

#[derive(Serialize, Deserialize)]
struct VectorRepr {
    dim: usize,
    entries: Vec<[f64; 2]>,
}

impl TryFrom<VectorRepr> for ComplexVector {
    type Error = Error;

    fn try_from(repr: VectorRepr) -> Result<Self> {
        if repr.entries.len() != repr.dim {
            return Err(Error::DimensionMismatch {
                expected: repr.dim,
                found: repr.entries.len(),
            });
        }
        Self::new(
            repr.entries
                .into_iter()
                .map(|[re, im]| Complex64::new(re, im))
                .collect(),
        )
    }
}

impl From<ComplexVector> for VectorRepr {
    fn from(v: ComplexVector) -> Self {
        VectorRepr {
            dim: v.dim(),
            entries: v.entries.iter().map(|z| [z.re, z.im]).collect(),
        }
    }
}

impl ComplexVector {
    pub fn new(entries: Vec<Complex64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::EmptyDimension);
        }
        if !all_finite(&entries) {
            return Err(Error::NonFinite("vector"));
        }
        Ok(Self { entries })
    }

    pub fn from_real(entries: &[f64]) -> Result<Self> {
        Self::new(entries.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    /// Builds a vector from arithmetic results, re-checking finiteness.
    pub(crate) fn from_computed(entries: Vec<Complex64>) -> Result<Self> {
        if !all_finite(&entries) {
            return Err(Error::NonFinite("computed vector"));
        }
        Ok(Self { entries })
    }

    pub fn zeros(dim: usize) -> Result<Self> {
        Self::new(vec![ZERO; dim])
    }

    /// The computational basis vector `|index>`.
    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        if index >= dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: index + 1,
            });
        }
        let mut entries = vec![ZERO; dim];
        entries[index] = ONE;
        Self::new(entries)
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<Complex64> {
        self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|z| z.re == 0.0 && z.im == 0.0)
    }

    pub fn scale(&self, z: Complex64) -> Result<Self> {
        Self::from_computed(self.entries.iter().map(|x| x * z).collect())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        check_dims(self.dim(), other.dim())?;
        Self::from_computed(self.entries.iter().zip(&other.entries).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        check_dims(self.dim(), other.dim())?;
        Self::from_computed(self.entries.iter().zip(&other.entries).map(|(a, b)| a - b).collect())
    }

    /// `a * self + b * other`.
    pub fn combine(&self, a: Complex64, other: &Self, b: Complex64) -> Result<Self> {
        check_dims(self.dim(), other.dim())?;
        Self::from_computed(
            self.entries
                .iter()
                .zip(&other.entries)
                .map(|(x, y)| a * x + b * y)
                .collect(),
        )
    }

    pub fn norm_sqr(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        check_dims(self.dim(), other.dim())?;
        Ok(self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }
}

pub(crate) fn check_dims(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

/// `<a|b>`, conjugate-linear in `a`.
pub fn inner_product(a: &ComplexVector, b: &ComplexVector) -> Result<Complex64> {
    check_dims(a.dim(), b.dim())?;
    Ok(dot_conj(&a.entries, &b.entries))
}

pub(crate) fn dot_conj(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Euclidean norm `sqrt(<v|v>)`.
pub fn norm(v: &ComplexVector) -> f64 {
    v.norm_sqr().sqrt()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MatrixRepr", into = "MatrixRepr")]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

#[derive(Serialize, Deserialize)]
pub(crate) struct MatrixRepr {
    rows: usize,
    cols: usize,
    entries: Vec<[f64; 2]>,
}

impl TryFrom<MatrixRepr> for ComplexMatrix {
    type Error = Error;

    fn try_from(repr: MatrixRepr) -> Result<Self> {
        Self::new(
            repr.rows,
            repr.cols,
            repr.entries
                .into_iter()
                .map(|[re, im]| Complex64::new(re, im))
                .collect(),
        )
    }
}

impl From<ComplexMatrix> for MatrixRepr {
    fn from(m: ComplexMatrix) -> Self {
        MatrixRepr {
            rows: m.rows,
            cols: m.cols,
            entries: m.data.iter().map(|z| [z.re, z.im]).collect(),
        }
    }
}

impl ComplexMatrix {
    /// Row-major constructor.
    pub fn new(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::EmptyDimension);
        }
        if data.len() != rows * cols {
            return Err(Error::ShapeMismatch {
                rows,
                cols,
                expected: rows * cols,
                found: data.len(),
            });
        }
        if !all_finite(&data) {
            return Err(Error::NonFinite("matrix"));
        }
        Ok(Self { rows, cols, data })
    }

    pub(crate) fn from_computed(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        debug_assert_eq!(data.len(), rows * cols);
        if !all_finite(&data) {
            return Err(Error::NonFinite("computed matrix"));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(n_rows * n_cols);
        for row in rows {
            check_dims(n_cols, row.len())?;
            data.extend_from_slice(row);
        }
        Self::new(n_rows, n_cols, data)
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let rows: Vec<Vec<Complex64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| Complex64::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(&rows)
    }

    pub fn identity(n: usize) -> Result<Self> {
        Self::diag(&vec![ONE; n])
    }

    pub fn diag(d: &[Complex64]) -> Result<Self> {
        let n = d.len();
        let mut data = vec![ZERO; n * n];
        for (i, &z) in d.iter().enumerate() {
            data[i * n + i] = z;
        }
        Self::new(n, n, data)
    }

    pub fn diag_real(d: &[f64]) -> Result<Self> {
        Self::diag(&d.iter().map(|&x| Complex64::new(x, 0.0)).collect::<Vec<_>>())
    }

    /// `|v><v|`, unnormalized.
    pub fn outer(v: &ComplexVector) -> Self {
        let n = v.dim();
        let e = v.entries();
        let mut data = Vec::with_capacity(n * n);
        for a in e {
            for b in e {
                data.push(a * b.conj());
            }
        }
        Self { rows: n, cols: n, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub(crate) fn require_square(&self) -> Result<usize> {
        if !self.is_square() {
            return Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        Ok(self.rows)
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> ComplexVector {
        ComplexVector {
            entries: (0..self.rows).map(|i| self.get(i, j)).collect(),
        }
    }

    pub fn adjoint(&self) -> Self {
        let mut data = Vec::with_capacity(self.data.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                data.push(self.get(i, j).conj());
            }
        }
        Self {
            rows: self.cols,
            cols: self.rows,
            data,
        }
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        check_dims(self.cols, other.rows)?;
        let (n, m) = (self.rows, other.cols);
        let mut data = vec![ZERO; n * m];
        for i in 0..n {
            let out = &mut data[i * m..(i + 1) * m];
            for (k, a) in self.row(i).iter().enumerate() {
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                for (o, b) in out.iter_mut().zip(other.row(k)) {
                    *o += a * b;
                }
            }
        }
        Self::from_computed(n, m, data)
    }

    pub fn apply(&self, v: &ComplexVector) -> Result<ComplexVector> {
        check_dims(self.cols, v.dim())?;
        ComplexVector::from_computed(
            (0..self.rows)
                .map(|i| self.row(i).iter().zip(v.entries()).map(|(a, b)| a * b).sum())
                .collect(),
        )
    }

    pub fn scale(&self, z: Complex64) -> Result<Self> {
        Self::from_computed(self.rows, self.cols, self.data.iter().map(|x| x * z).collect())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    fn zip_with(&self, other: &Self, f: impl Fn(Complex64, Complex64) -> Complex64) -> Result<Self> {
        check_dims(self.rows, other.rows)?;
        check_dims(self.cols, other.cols)?;
        Self::from_computed(
            self.rows,
            self.cols,
            self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect(),
        )
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn trace(&self) -> Result<Complex64> {
        let n = self.require_square()?;
        Ok((0..n).map(|i| self.get(i, i)).sum())
    }

    /// `||self - self^dagger||_F`.
    pub fn hermiticity_residual(&self) -> Result<f64> {
        let n = self.require_square()?;
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                acc += (self.get(i, j) - self.get(j, i).conj()).norm_sqr();
            }
        }
        Ok(acc.sqrt())
    }

    /// `||self - c * I||_F` for a square matrix.
    pub fn distance_to_scaled_identity(&self, c: Complex64) -> Result<f64> {
        let n = self.require_square()?;
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                let target = if i == j { c } else { ZERO };
                acc += (self.get(i, j) - target).norm_sqr();
            }
        }
        Ok(acc.sqrt())
    }

    /// Kronecker product; `self` is the most-significant factor.
    pub fn kron(&self, other: &Self) -> Self {
        let rows = self.rows * other.rows;
        let cols = self.cols * other.cols;
        let mut data = vec![ZERO; rows * cols];
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self.get(i, j);
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                for k in 0..other.rows {
                    let base = (i * other.rows + k) * cols + j * other.cols;
                    for (l, b) in other.row(k).iter().enumerate() {
                        data[base + l] = a * b;
                    }
                }
            }
        }
        Self { rows, cols, data }
    }

    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        check_dims(self.rows, other.rows)?;
        check_dims(self.cols, other.cols)?;
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }
}

/// `A B`.
pub fn matmul(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    a.matmul(b)
}

/// `M v`.
pub fn apply(m: &ComplexMatrix, v: &ComplexVector) -> Result<ComplexVector> {
    m.apply(v)
}

pub fn adjoint(m: &ComplexMatrix) -> ComplexMatrix {
    m.adjoint()
}
