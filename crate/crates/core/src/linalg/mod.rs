//! Dense complex linear algebra for small matrices (desk scale, d <= 16).
//!
//! Everything here is exact-tolerance plumbing: validated quantum states and
//! bases, a cyclic-Jacobi Hermitian eigensolver, mutually unbiased basis
//! construction and checks, and seeded random inputs for property suites.

mod basis;
mod density;
mod eigen;
mod random;

pub use basis::{fourier_basis, mub_check, mub_deviation, OrthonormalBasis, StateVector};
pub use density::{DensityMatrix, HermitianObservable};
pub use eigen::{hermitian_eigendecomposition, Eigendecomposition, DEFAULT_MERGE_TOL};
pub use random::{random_basis, random_state_and_bases, random_unitary};

use std::ops::{Index, IndexMut};

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{as_f64, Real};

/// Dense complex vector.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexVector<T> {
    data: Vec<Complex<T>>,
}

impl<T: Real> ComplexVector<T> {
    pub fn new(data: Vec<Complex<T>>) -> Self {
        Self { data }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            data: vec![Complex::new(T::zero(), T::zero()); dim],
        }
    }

    /// Computational basis vector |index> in the given dimension.
    pub fn basis_state(dim: usize, index: usize) -> Self {
        let mut v = Self::zeros(dim);
        v.data[index] = Complex::new(T::one(), T::zero());
        v
    }

    pub fn dim(&self) -> usize {
        self.data.len()
    }

    pub fn as_slice(&self) -> &[Complex<T>] {
        &self.data
    }

    /// Inner product <self|other> (conjugates `self`).
    pub fn inner(&self, other: &Self) -> Complex<T> {
        debug_assert_eq!(self.dim(), other.dim());
        self.data
            .iter()
            .zip(&other.data)
            .fold(Complex::new(T::zero(), T::zero()), |acc, (a, b)| acc + a.conj() * b)
    }

    pub fn norm_sqr(&self) -> T {
        self.data
            .iter()
            .fold(T::zero(), |acc, z| acc + z.norm_sqr())
    }

    pub fn norm(&self) -> T {
        self.norm_sqr().sqrt()
    }

    pub fn scale(&self, s: Complex<T>) -> Self {
        Self {
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    /// Outer product |self><other|.
    pub fn outer(&self, other: &Self) -> ComplexMatrix<T> {
        let mut m = ComplexMatrix::zeros(self.dim(), other.dim());
        for i in 0..self.dim() {
            for j in 0..other.dim() {
                m[(i, j)] = self.data[i] * other.data[j].conj();
            }
        }
        m
    }

    /// Tensor product |self> ⊗ |other>.
    pub fn kron(&self, other: &Self) -> Self {
        let mut data = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.data {
            for b in &other.data {
                data.push(a * b);
            }
        }
        Self { data }
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

impl<T> Index<usize> for ComplexVector<T> {
    type Output = Complex<T>;
    fn index(&self, i: usize) -> &Complex<T> {
        &self.data[i]
    }
}

impl<T> IndexMut<usize> for ComplexVector<T> {
    fn index_mut(&mut self, i: usize) -> &mut Complex<T> {
        &mut self.data[i]
    }
}

/// Dense complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<Complex<T>>,
}

impl<T: Real> ComplexMatrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex::new(T::zero(), T::zero()); rows * cols],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim, dim);
        for i in 0..dim {
            m[(i, i)] = Complex::new(T::one(), T::zero());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Complex<T>>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            if row.len() != c {
                return Err(Error::DimensionMismatch {
                    left: c,
                    right: row.len(),
                });
            }
            data.extend(row);
        }
        Ok(Self { rows: r, cols: c, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex<T>) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
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

    pub fn as_slice(&self) -> &[Complex<T>] {
        &self.data
    }

    /// Hermitian conjugate (conjugate transpose).
    pub fn dagger(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn mul(&self, other: &Self) -> Self {
        debug_assert_eq!(self.cols, other.rows);
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a.re.is_zero() && a.im.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] = out[(i, j)] + a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &ComplexVector<T>) -> ComplexVector<T> {
        debug_assert_eq!(self.cols, v.dim());
        let mut out = ComplexVector::zeros(self.rows);
        for i in 0..self.rows {
            let mut acc = Complex::new(T::zero(), T::zero());
            for j in 0..self.cols {
                acc = acc + self[(i, j)] * v[j];
            }
            out[i] = acc;
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        debug_assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&other.data) {
            *a = *a + *b;
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        debug_assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&other.data) {
            *a = *a - *b;
        }
        out
    }

    pub fn scale(&self, s: Complex<T>) -> Self {
        let mut out = self.clone();
        for a in out.data.iter_mut() {
            *a = *a * s;
        }
        out
    }

    pub fn trace(&self) -> Complex<T> {
        debug_assert!(self.is_square());
        (0..self.rows).fold(Complex::new(T::zero(), T::zero()), |acc, i| acc + self[(i, i)])
    }

    /// Max absolute entry, the norm used for validation residuals.
    pub fn max_abs(&self) -> T {
        self.data
            .iter()
            .fold(T::zero(), |acc, z| acc.max(z.norm()))
    }

    pub fn frobenius_norm(&self) -> T {
        self.data
            .iter()
            .fold(T::zero(), |acc, z| acc + z.norm_sqr())
            .sqrt()
    }

    /// Max |M_ij - conj(M_ji)| over all pairs.
    pub fn hermitian_residual(&self) -> T {
        debug_assert!(self.is_square());
        let mut worst = T::zero();
        for i in 0..self.rows {
            for j in 0..self.cols {
                let r = (self[(i, j)] - self[(j, i)].conj()).norm();
                worst = worst.max(r);
            }
        }
        worst
    }

    /// Tensor (Kronecker) product self ⊗ other.
    pub fn kron(&self, other: &Self) -> Self {
        let mut out = Self::zeros(self.rows * other.rows, self.cols * other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self[(i, j)];
                for k in 0..other.rows {
                    for l in 0..other.cols {
                        out[(i * other.rows + k, j * other.cols + l)] = a * other[(k, l)];
                    }
                }
            }
        }
        out
    }

    pub fn column(&self, j: usize) -> ComplexVector<T> {
        ComplexVector::new((0..self.rows).map(|i| self[(i, j)]).collect())
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub(crate) fn check_finite(&self) -> Result<()> {
        match self
            .data
            .iter()
            .position(|z| !(z.re.is_finite() && z.im.is_finite()))
        {
            Some(index) => Err(Error::NonFinite { index }),
            None => Ok(()),
        }
    }

    /// Max |U†U - I|; zero for a unitary matrix.
    pub fn unitarity_residual(&self) -> T {
        let gram = self.dagger().mul(self);
        gram.sub(&Self::identity(self.rows)).max_abs()
    }
}

impl<T> Index<(usize, usize)> for ComplexMatrix<T> {
    type Output = Complex<T>;
    fn index(&self, (i, j): (usize, usize)) -> &Complex<T> {
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for ComplexMatrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex<T> {
        &mut self.data[i * self.cols + j]
    }
}

/// Dense real matrix, row-major. Used for MHQ tables, TPM statistics and
/// Hankel matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct RealMatrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Real> RealMatrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        debug_assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .fold(T::zero(), |acc, (a, b)| acc.max((*a - *b).abs()))
    }

    /// LU determinant with partial pivoting.
    pub fn determinant(&self) -> T {
        debug_assert!(self.rows == self.cols);
        let n = self.rows;
        let mut a = self.data.clone();
        let mut det = T::one();
        for k in 0..n {
            let mut pivot = k;
            let mut best = a[k * n + k].abs();
            for r in (k + 1)..n {
                let v = a[r * n + k].abs();
                if v > best {
                    best = v;
                    pivot = r;
                }
            }
            if best.is_zero() {
                return T::zero();
            }
            if pivot != k {
                for c in 0..n {
                    a.swap(k * n + c, pivot * n + c);
                }
                det = -det;
            }
            let diag = a[k * n + k];
            det = det * diag;
            for r in (k + 1)..n {
                let factor = a[r * n + k] / diag;
                if factor.is_zero() {
                    continue;
                }
                for c in k..n {
                    let sub = factor * a[k * n + c];
                    a[r * n + c] = a[r * n + c] - sub;
                }
            }
        }
        det
    }

    /// Max row sum of absolute values (infinity norm).
    pub fn inf_norm(&self) -> T {
        (0..self.rows).fold(T::zero(), |acc, i| {
            let row = (0..self.cols).fold(T::zero(), |s, j| s + self[(i, j)].abs());
            acc.max(row)
        })
    }
}

impl<T> Index<(usize, usize)> for RealMatrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for RealMatrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

pub(crate) fn ensure_square<T: Real>(m: &ComplexMatrix<T>) -> Result<()> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    Ok(())
}

pub(crate) fn ensure_hermitian<T: Real>(m: &ComplexMatrix<T>, tol: T) -> Result<()> {
    let residual = m.hermitian_residual();
    if residual > tol {
        return Err(Error::NotHermitian {
            residual: as_f64(residual),
            tol: as_f64(tol),
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex;

    type C = Complex<f64>;

    fn c(re: f64, im: f64) -> C {
        C::new(re, im)
    }

    #[test]
    fn inner_product_conjugates_left() {
        let u = ComplexVector::new(vec![c(0.0, 1.0), c(1.0, 0.0)]);
        let v = ComplexVector::new(vec![c(1.0, 0.0), c(0.0, 0.0)]);
        assert_eq!(u.inner(&v), c(0.0, -1.0));
    }

    #[test]
    fn dagger_of_product() {
        let a = ComplexMatrix::from_rows(vec![
            vec![c(1.0, 2.0), c(0.5, -1.0)],
            vec![c(0.0, 0.0), c(2.0, 1.0)],
        ])
        .unwrap();
        let b = ComplexMatrix::from_rows(vec![
            vec![c(0.0, 1.0), c(1.0, 1.0)],
            vec![c(3.0, 0.0), c(0.0, -2.0)],
        ])
        .unwrap();
        let lhs = a.mul(&b).dagger();
        let rhs = b.dagger().mul(&a.dagger());
        assert!(lhs.sub(&rhs).max_abs() < 1e-14);
    }

    #[test]
    fn lu_determinant_matches_cofactor() {
        let m = RealMatrix::from_fn(3, 3, |i, j| ((i * 3 + j) as f64).sin() + if i == j { 2.0 } else { 0.0 });
        let a = |i: usize, j: usize| m[(i, j)];
        let cofactor = a(0, 0) * (a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1))
            - a(0, 1) * (a(1, 0) * a(2, 2) - a(1, 2) * a(2, 0))
            + a(0, 2) * (a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0));
        assert!((m.determinant() - cofactor).abs() < 1e-13);
    }

    #[test]
    fn singular_determinant_is_zero() {
        let m = RealMatrix::from_fn(3, 3, |i, j| (i + j) as f64);
        assert!(m.determinant().abs() < 1e-14);
    }

    #[test]
    fn kron_dimensions_and_values() {
        let a = ComplexMatrix::from_rows(vec![vec![c(1.0, 0.0), c(2.0, 0.0)]]).unwrap();
        let b = ComplexMatrix::from_rows(vec![vec![c(3.0, 0.0)], vec![c(0.0, 1.0)]]).unwrap();
        let k = a.kron(&b);
        assert_eq!((k.rows(), k.cols()), (2, 2));
        assert_eq!(k[(1, 1)], c(0.0, 2.0));
    }
}
