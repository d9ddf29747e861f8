//! Validated density matrices and Hermitian observables.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::linalg::{ensure_hermitian, ensure_square, ComplexMatrix};
use crate::scalar::{as_f64, Real};

use super::eigen::jacobi_hermitian;

/// d x d complex Hermitian PSD unit-trace operator.
///
/// Constructed only through [`DensityMatrix::new`], which checks all three
/// invariants (within the given tolerance) plus finiteness, so holders of a
/// value can rely on them.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix<T: Real> {
    matrix: ComplexMatrix<T>,
}

impl<T: Real> DensityMatrix<T> {
    /// Validate `entries` as a density matrix.
    ///
    /// Rejections name the violated invariant and the offending magnitude:
    /// `NotHermitian`, `TraceNotOne` or `NotPsd` (eigenvalue check via the
    /// Jacobi solver).
    pub fn new(entries: ComplexMatrix<T>, tol: T) -> Result<Self> {
        ensure_square(&entries)?;
        entries.check_finite()?;
        ensure_hermitian(&entries, tol)?;

        let trace = entries.trace();
        if (trace.re - T::one()).abs() > tol || trace.im.abs() > tol {
            return Err(Error::TraceNotOne {
                trace: as_f64(trace.re),
                tol: as_f64(tol),
            });
        }

        let (eigenvalues, _) = jacobi_hermitian(&entries)?;
        let min_eigenvalue = eigenvalues
            .first()
            .copied()
            .ok_or(Error::NotSquare { rows: 0, cols: 0 })?;
        if min_eigenvalue < -tol {
            return Err(Error::NotPsd {
                min_eigenvalue: as_f64(min_eigenvalue),
                tol: as_f64(tol),
            });
        }

        Ok(Self { matrix: entries })
    }

    /// Pure state |psi><psi| from a normalized vector.
    pub fn from_pure(psi: &super::StateVector<T>) -> Self {
        Self {
            matrix: psi.vector().outer(psi.vector()),
        }
    }

    /// Maximally mixed state I/d.
    pub fn maximally_mixed(dim: usize) -> Self {
        let inv = T::one() / T::from_usize(dim).expect("dim fits scalar");
        Self {
            matrix: ComplexMatrix::identity(dim).scale(Complex::new(inv, T::zero())),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix<T> {
        &self.matrix
    }

    /// <u|rho|v>.
    pub fn sandwich(
        &self,
        u: &super::ComplexVector<T>,
        v: &super::ComplexVector<T>,
    ) -> Complex<T> {
        u.inner(&self.matrix.mul_vec(v))
    }
}

/// d x d complex Hermitian operator (an observable).
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianObservable<T: Real> {
    matrix: ComplexMatrix<T>,
}

impl<T: Real> HermitianObservable<T> {
    pub fn new(entries: ComplexMatrix<T>, tol: T) -> Result<Self> {
        ensure_square(&entries)?;
        entries.check_finite()?;
        ensure_hermitian(&entries, tol)?;
        Ok(Self { matrix: entries })
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix<T> {
        &self.matrix
    }
}
