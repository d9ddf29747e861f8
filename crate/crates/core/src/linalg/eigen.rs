//! Hermitian eigendecomposition by cyclic Jacobi rotations.
//!
//! Matrices here are tiny (d <= 16), so a dependency-free Jacobi sweep is
//! both simple and accurate: off-diagonal mass decays quadratically and the
//! accumulated eigenvectors stay unitary to machine precision.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::linalg::{ensure_hermitian, ensure_square, ComplexMatrix, ComplexVector};
use crate::scalar::{as_f64, real, Real};

use super::density::HermitianObservable;

/// Relative spread below which eigenvalues are merged into one group.
pub const DEFAULT_MERGE_TOL: f64 = 1e-9;

const MAX_SWEEPS: usize = 64;

/// Spectrum of a Hermitian matrix with degenerate eigenvalues merged.
///
/// `eigenvalues[g]` and `projectors[g]` describe group `g` (ascending order);
/// a group's projector has rank `ranks[g]` and sums the outer products of the
/// eigenvectors in the group. The unmerged eigenpairs are kept for callers
/// that need an explicit eigenbasis.
#[derive(Debug, Clone)]
pub struct Eigendecomposition<T: Real> {
    eigenvalues: Vec<T>,
    projectors: Vec<ComplexMatrix<T>>,
    ranks: Vec<usize>,
    raw_eigenvalues: Vec<T>,
    raw_vectors: Vec<ComplexVector<T>>,
}

impl<T: Real> Eigendecomposition<T> {
    /// One eigenvalue per degenerate group, ascending.
    pub fn eigenvalues(&self) -> &[T] {
        &self.eigenvalues
    }

    /// One projector per group, aligned with `eigenvalues`.
    pub fn projectors(&self) -> &[ComplexMatrix<T>] {
        &self.projectors
    }

    /// Multiplicity of each group.
    pub fn ranks(&self) -> &[usize] {
        &self.ranks
    }

    pub fn is_nondegenerate(&self) -> bool {
        self.ranks.iter().all(|&r| r == 1)
    }

    /// All `dim` eigenvalues, ascending, without merging.
    pub fn raw_eigenvalues(&self) -> &[T] {
        &self.raw_eigenvalues
    }

    /// All `dim` eigenvectors, ascending eigenvalue order.
    pub fn raw_vectors(&self) -> &[ComplexVector<T>] {
        &self.raw_vectors
    }

    /// Σ E_g Π_g, which must reconstruct the input within tolerance.
    pub fn reconstruct(&self) -> ComplexMatrix<T> {
        let dim = self.raw_vectors[0].dim();
        let mut acc = ComplexMatrix::zeros(dim, dim);
        for (e, p) in self.eigenvalues.iter().zip(&self.projectors) {
            acc = acc.add(&p.scale(Complex::new(*e, T::zero())));
        }
        acc
    }
}

/// Eigendecomposition of a validated Hermitian observable.
///
/// Eigenvalues within `merge_tol * max(1, spectral radius)` of each other are
/// grouped and their projector summed over the degenerate subspace, so that
/// trace formulas over projectors stay valid for degenerate spectra.
pub fn hermitian_eigendecomposition<T: Real>(
    h: &HermitianObservable<T>,
    merge_tol: T,
) -> Result<Eigendecomposition<T>> {
    let (raw_eigenvalues, raw_vectors) = jacobi_hermitian(h.matrix())?;
    Ok(group_spectrum(raw_eigenvalues, raw_vectors, merge_tol))
}

pub(crate) fn group_spectrum<T: Real>(
    raw_eigenvalues: Vec<T>,
    raw_vectors: Vec<ComplexVector<T>>,
    merge_tol: T,
) -> Eigendecomposition<T> {
    let radius = raw_eigenvalues
        .iter()
        .fold(T::zero(), |acc, e| acc.max(e.abs()));
    let threshold = merge_tol * T::one().max(radius);

    let mut eigenvalues = Vec::new();
    let mut projectors = Vec::new();
    let mut ranks = Vec::new();

    let dim = raw_vectors.first().map_or(0, ComplexVector::dim);
    let mut g_start = 0;
    while g_start < raw_eigenvalues.len() {
        let mut g_end = g_start + 1;
        while g_end < raw_eigenvalues.len()
            && raw_eigenvalues[g_end] - raw_eigenvalues[g_end - 1] <= threshold
        {
            g_end += 1;
        }
        let mut projector = ComplexMatrix::zeros(dim, dim);
        let mut mean = T::zero();
        for k in g_start..g_end {
            projector = projector.add(&raw_vectors[k].outer(&raw_vectors[k]));
            mean = mean + raw_eigenvalues[k];
        }
        let count = real::<T>((g_end - g_start) as f64);
        eigenvalues.push(mean / count);
        projectors.push(projector);
        ranks.push(g_end - g_start);
        g_start = g_end;
    }

    Eigendecomposition {
        eigenvalues,
        projectors,
        ranks,
        raw_eigenvalues,
        raw_vectors,
    }
}

/// Cyclic Jacobi on a Hermitian matrix. Returns all eigenpairs ascending.
pub(crate) fn jacobi_hermitian<T: Real>(
    m: &ComplexMatrix<T>,
) -> Result<(Vec<T>, Vec<ComplexVector<T>>)> {
    ensure_square(m)?;
    let n = m.rows();
    let mut a = m.clone();
    let mut v = ComplexMatrix::identity(n);

    let scale = a.frobenius_norm().max(T::one());
    let stop = scale * T::epsilon() * real::<T>(n as f64);

    let mut sweeps = 0;
    loop {
        let off = off_diagonal_norm(&a);
        if off <= stop {
            break;
        }
        if sweeps >= MAX_SWEEPS {
            return Err(Error::ConvergenceFailure {
                sweeps,
                off: as_f64(off),
            });
        }
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
        sweeps += 1;
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<T> = (0..n).map(|i| a[(i, i)].re).collect();
    order.sort_by(|&x, &y| diag[x].partial_cmp(&diag[y]).expect("finite eigenvalues"));

    let eigenvalues = order.iter().map(|&i| diag[i]).collect();
    let vectors = order.iter().map(|&j| v.column(j)).collect();
    Ok((eigenvalues, vectors))
}

fn off_diagonal_norm<T: Real>(a: &ComplexMatrix<T>) -> T {
    let n = a.rows();
    let mut acc = T::zero();
    for p in 0..n {
        for q in (p + 1)..n {
            acc = acc + a[(p, q)].norm_sqr();
        }
    }
    (acc + acc).sqrt()
}

/// Zero the (p,q) entry with the unitary that mixes rows/columns p and q.
fn rotate<T: Real>(a: &mut ComplexMatrix<T>, v: &mut ComplexMatrix<T>, p: usize, q: usize) {
    let apq = a[(p, q)];
    let r = apq.norm();
    if r.is_zero() {
        return;
    }
    // phase of the pivot: apq = r e^{i phi}
    let phase = apq / Complex::new(r, T::zero());
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;

    let two = T::one() + T::one();
    let theta = (two * r).atan2(app - aqq) / two;
    let c = theta.cos();
    let s = theta.sin();

    // J = I except J_pp = c, J_pq = -s e^{i phi}, J_qp = s e^{-i phi}, J_qq = c.
    let jpq = -phase * Complex::new(s, T::zero());
    let jqp = phase.conj() * Complex::new(s, T::zero());
    let cc = Complex::new(c, T::zero());

    let n = a.rows();
    // Column update: A <- A J.
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * cc + akq * jqp;
        a[(k, q)] = akp * jpq + akq * cc;
    }
    // Row update: A <- J† A, with (J†)_pq = conj(J_qp), (J†)_qp = conj(J_pq).
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = apk * cc + aqk * jqp.conj();
        a[(q, k)] = apk * jpq.conj() + aqk * cc;
    }
    // Clean the pivot pair exactly; Hermiticity keeps the rest consistent.
    a[(p, q)] = Complex::new(T::zero(), T::zero());
    a[(q, p)] = Complex::new(T::zero(), T::zero());
    let d_pp = a[(p, p)].re;
    let d_qq = a[(q, q)].re;
    a[(p, p)] = Complex::new(d_pp, T::zero());
    a[(q, q)] = Complex::new(d_qq, T::zero());

    // Accumulate eigenvectors: V <- V J.
    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * cc + vkq * jqp;
        v[(k, q)] = vkp * jpq + vkq * cc;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::random_state_and_bases;
    use crate::scalar::default_tol;
    use num_complex::Complex;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    type C = Complex<f64>;

    fn random_hermitian(dim: usize, seed: u64) -> ComplexMatrix<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = ComplexMatrix::from_fn(dim, dim, |_, _| {
            C::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        });
        g.add(&g.dagger()).scale(C::new(0.5, 0.0))
    }

    #[test]
    fn diagonal_matrix_is_its_own_spectrum() {
        let m = ComplexMatrix::from_fn(3, 3, |i, j| {
            if i == j {
                C::new((i + 1) as f64, 0.0)
            } else {
                C::new(0.0, 0.0)
            }
        });
        let h = HermitianObservable::new(m, default_tol()).unwrap();
        let eig = hermitian_eigendecomposition(&h, 1e-9).unwrap();
        assert_eq!(eig.eigenvalues(), &[1.0, 2.0, 3.0]);
        for (k, p) in eig.projectors().iter().enumerate() {
            let mut expected = ComplexMatrix::zeros(3, 3);
            expected[(k, k)] = C::new(1.0, 0.0);
            assert!(p.sub(&expected).max_abs() < 1e-12);
        }
    }

    #[test]
    fn pauli_x_spectrum() {
        // (Omega/2) sigma_x -> eigenvalues ±Omega/2, projectors (I ± sigma_x)/2
        let omega = 1.7;
        let m = ComplexMatrix::from_rows(vec![
            vec![C::new(0.0, 0.0), C::new(omega / 2.0, 0.0)],
            vec![C::new(omega / 2.0, 0.0), C::new(0.0, 0.0)],
        ])
        .unwrap();
        let h = HermitianObservable::new(m, default_tol()).unwrap();
        let eig = hermitian_eigendecomposition(&h, 1e-9).unwrap();
        assert!((eig.eigenvalues()[0] + omega / 2.0).abs() < 1e-12);
        assert!((eig.eigenvalues()[1] - omega / 2.0).abs() < 1e-12);
        let half = C::new(0.5, 0.0);
        let minus = ComplexMatrix::from_rows(vec![
            vec![half, -half],
            vec![-half, half],
        ])
        .unwrap();
        assert!(eig.projectors()[0].sub(&minus).max_abs() < 1e-12);
    }

    #[test]
    fn spectral_reconstruction_random_hermitian() {
        for dim in 2..=8 {
            for seed in 0..20 {
                let m = random_hermitian(dim, seed + 100 * dim as u64);
                let h = HermitianObservable::new(m.clone(), default_tol()).unwrap();
                let eig = hermitian_eigendecomposition(&h, 1e-9).unwrap();
                assert!(
                    eig.reconstruct().sub(&m).max_abs() < 1e-10,
                    "reconstruction failed at dim {dim} seed {seed}"
                );
            }
        }
    }

    #[test]
    fn projector_algebra() {
        for dim in 2..=6 {
            let m = random_hermitian(dim, 7 + dim as u64);
            let h = HermitianObservable::new(m, default_tol()).unwrap();
            let eig = hermitian_eigendecomposition(&h, 1e-9).unwrap();
            let projs = eig.projectors();
            let mut sum = ComplexMatrix::zeros(dim, dim);
            for (g, p) in projs.iter().enumerate() {
                sum = sum.add(p);
                for (h_idx, q) in projs.iter().enumerate() {
                    let prod = p.mul(q);
                    let expected = if g == h_idx {
                        p.clone()
                    } else {
                        ComplexMatrix::zeros(dim, dim)
                    };
                    assert!(prod.sub(&expected).max_abs() < 1e-10);
                }
            }
            assert!(sum.sub(&ComplexMatrix::identity(dim)).max_abs() < 1e-10);
        }
    }

    #[test]
    fn degenerate_eigenvalues_merge_into_rank_g_projector() {
        // Two-fold degenerate subspace: diag(1, 1, 4) rotated by a random basis.
        let (_, basis, _) = random_state_and_bases::<f64>(3, 11).unwrap();
        let mut m = ComplexMatrix::zeros(3, 3);
        let energies = [1.0, 1.0, 4.0];
        for (k, e) in energies.iter().enumerate() {
            let v = basis.vector(k);
            m = m.add(&v.outer(v).scale(C::new(*e, 0.0)));
        }
        let h = HermitianObservable::new(m, default_tol()).unwrap();
        let eig = hermitian_eigendecomposition(&h, 1e-9).unwrap();
        assert_eq!(eig.ranks(), &[2, 1]);
        assert!((eig.eigenvalues()[0] - 1.0).abs() < 1e-10);
        let p = &eig.projectors()[0];
        assert!(p.mul(p).sub(p).max_abs() < 1e-10);
        assert!((p.trace().re - 2.0).abs() < 1e-10);
    }
}
