//! State vectors, orthonormal bases and mutually unbiased basis machinery.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, ComplexVector};
use crate::scalar::{as_f64, real, Real};

/// Normalized pure state: sum of |amplitude|^2 equals one within tolerance.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector<T: Real> {
    vector: ComplexVector<T>,
}

impl<T: Real> StateVector<T> {
    pub fn new(amplitudes: Vec<Complex<T>>, tol: T) -> Result<Self> {
        let vector = ComplexVector::new(amplitudes);
        if !vector.is_finite() {
            let index = vector
                .as_slice()
                .iter()
                .position(|z| !(z.re.is_finite() && z.im.is_finite()))
                .unwrap_or(0);
            return Err(Error::NonFinite { index });
        }
        let norm = vector.norm_sqr();
        if (norm - T::one()).abs() > tol {
            return Err(Error::NotNormalized {
                norm: as_f64(norm),
                tol: as_f64(tol),
            });
        }
        Ok(Self { vector })
    }

    /// Normalize an arbitrary nonzero vector.
    pub fn normalized(amplitudes: Vec<Complex<T>>) -> Result<Self> {
        let v = ComplexVector::new(amplitudes);
        let norm = v.norm();
        if norm.is_zero() || !norm.is_finite() {
            return Err(Error::NotNormalized {
                norm: as_f64(norm * norm),
                tol: 0.0,
            });
        }
        let inv = Complex::new(T::one() / norm, T::zero());
        Ok(Self { vector: v.scale(inv) })
    }

    pub fn dim(&self) -> usize {
        self.vector.dim()
    }

    pub fn vector(&self) -> &ComplexVector<T> {
        &self.vector
    }

    /// Tensor product of two states.
    pub fn kron(&self, other: &Self) -> Self {
        Self {
            vector: self.vector.kron(&other.vector),
        }
    }
}

/// Ordered set of `dim` orthonormal vectors, e.g. the eigenbasis of an
/// observable. The label travels into distribution metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct OrthonormalBasis<T: Real> {
    vectors: Vec<ComplexVector<T>>,
    label: String,
}

impl<T: Real> OrthonormalBasis<T> {
    pub fn new(vectors: Vec<ComplexVector<T>>, label: impl Into<String>, tol: T) -> Result<Self> {
        let dim = vectors.first().map_or(0, ComplexVector::dim);
        if vectors.len() != dim || dim == 0 {
            return Err(Error::IncompleteBasis {
                got: vectors.len(),
                dim,
            });
        }
        for (idx, v) in vectors.iter().enumerate() {
            if v.dim() != dim {
                return Err(Error::DimensionMismatch {
                    left: dim,
                    right: v.dim(),
                });
            }
            if !v.is_finite() {
                return Err(Error::NonFinite { index: idx });
            }
        }
        for i in 0..dim {
            for j in i..dim {
                let overlap = vectors[i].inner(&vectors[j]);
                let expected = if i == j { T::one() } else { T::zero() };
                let residual = (overlap - Complex::new(expected, T::zero())).norm();
                if residual > tol {
                    return Err(Error::NotOrthonormal {
                        i,
                        j,
                        residual: as_f64(residual),
                        tol: as_f64(tol),
                    });
                }
            }
        }
        Ok(Self {
            vectors,
            label: label.into(),
        })
    }

    pub fn from_states(states: Vec<StateVector<T>>, label: impl Into<String>, tol: T) -> Result<Self> {
        Self::new(states.into_iter().map(|s| s.vector).collect(), label, tol)
    }

    /// Computational basis {|0>, ..., |d-1>}.
    pub fn computational(dim: usize) -> Self {
        Self {
            vectors: (0..dim).map(|i| ComplexVector::basis_state(dim, i)).collect(),
            label: "computational".into(),
        }
    }

    pub fn dim(&self) -> usize {
        self.vectors.len()
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn vector(&self, i: usize) -> &ComplexVector<T> {
        &self.vectors[i]
    }

    pub fn vectors(&self) -> &[ComplexVector<T>] {
        &self.vectors
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// Gram matrix of overlaps G[i][j] = <self_i|other_j>.
    pub fn overlaps(&self, other: &Self) -> ComplexMatrix<T> {
        ComplexMatrix::from_fn(self.dim(), other.dim(), |i, j| {
            self.vectors[i].inner(&other.vectors[j])
        })
    }

    /// Apply a matrix to every basis vector (no re-validation; callers pass
    /// unitaries, which preserve orthonormality).
    pub(crate) fn map_vectors(&self, m: &ComplexMatrix<T>, label: impl Into<String>) -> Self {
        Self {
            vectors: self.vectors.iter().map(|v| m.mul_vec(v)).collect(),
            label: label.into(),
        }
    }
}

/// Largest deviation of | |<a_i|b_k>|^2 - 1/d | over all pairs.
pub fn mub_deviation<T: Real>(a: &OrthonormalBasis<T>, b: &OrthonormalBasis<T>) -> Result<T> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            left: a.dim(),
            right: b.dim(),
        });
    }
    let inv_d = T::one() / T::from_usize(a.dim()).expect("dim fits scalar");
    let mut worst = T::zero();
    for i in 0..a.dim() {
        for k in 0..b.dim() {
            let p = a.vector(i).inner(b.vector(k)).norm_sqr();
            worst = worst.max((p - inv_d).abs());
        }
    }
    Ok(worst)
}

/// True iff the two bases are mutually unbiased: |<a_i|b_k>|^2 = 1/d for all
/// pairs, within tolerance.
pub fn mub_check<T: Real>(a: &OrthonormalBasis<T>, b: &OrthonormalBasis<T>, tol: T) -> Result<bool> {
    Ok(mub_deviation(a, b)? <= tol)
}

/// Discrete-Fourier basis: vector k has amplitudes e^{2 pi i jk/d} / sqrt(d).
/// Mutually unbiased with the computational basis in every dimension.
pub fn fourier_basis<T: Real>(dim: usize) -> OrthonormalBasis<T> {
    let inv_sqrt = T::one() / T::from_usize(dim).expect("dim fits scalar").sqrt();
    let two_pi = real::<T>(std::f64::consts::TAU);
    let d = T::from_usize(dim).expect("dim fits scalar");
    let vectors = (0..dim)
        .map(|k| {
            ComplexVector::new(
                (0..dim)
                    .map(|j| {
                        let angle = two_pi * T::from_usize(j * k).expect("index fits scalar") / d;
                        Complex::new(angle.cos() * inv_sqrt, angle.sin() * inv_sqrt)
                    })
                    .collect(),
            )
        })
        .collect();
    OrthonormalBasis {
        vectors,
        label: "fourier".into(),
    }
}
