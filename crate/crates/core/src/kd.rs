//! Kirkwood-Dirac family quasiprobability distributions.
//!
//! A KD table over bases A and F has entries
//! `Q_ij = <f_j|a_i> <a_i|rho|f_j> = Tr(Pi^f_j Pi^a_i rho)`; entries sum to
//! one but may be negative or complex. The k-basis extension takes a chain of
//! bases with the first basis applied innermost:
//! `Q*(i_1,...,i_k) = Tr(Pi^(k)_{i_k} ... Pi^(1)_{i_1} rho)`. The MHQ table
//! keeps only real parts. Entries are computed by direct inner products, so
//! analytically-zero overlaps yield exactly zero entries.
//!
//! For a chain (A, B, A) the tensor entry at (i, k, j) equals
//! `<a_j|b_k><b_k|a_i><a_i|rho|a_j>`: chain order stores the first basis's
//! index first, which relabels axes relative to conventions that write the
//! middle basis last. Power sums are permutation invariant, so the moment
//! detectors are unaffected by the relabeling.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::linalg::{
    ComplexMatrix, ComplexVector, DensityMatrix, HermitianObservable, OrthonormalBasis, RealMatrix,
};
use crate::scalar::{as_f64, Real};

/// Two-basis Kirkwood-Dirac quasiprobability table.
///
/// Row index runs over basis A, column index over basis F. Row sums are the
/// Born probabilities of A, column sums those of F, and the total is one.
#[derive(Debug, Clone, PartialEq)]
pub struct KdDistribution<T: Real> {
    entries: ComplexMatrix<T>,
    basis_a_label: String,
    basis_f_label: String,
}

impl<T: Real> KdDistribution<T> {
    pub fn dims(&self) -> (usize, usize) {
        (self.entries.rows(), self.entries.cols())
    }

    pub fn entry(&self, i: usize, j: usize) -> Complex<T> {
        self.entries[(i, j)]
    }

    pub fn entries(&self) -> &ComplexMatrix<T> {
        &self.entries
    }

    pub fn basis_a_label(&self) -> &str {
        &self.basis_a_label
    }

    pub fn basis_f_label(&self) -> &str {
        &self.basis_f_label
    }

    pub fn total(&self) -> Complex<T> {
        self.entries
            .as_slice()
            .iter()
            .fold(Complex::new(T::zero(), T::zero()), |acc, z| acc + *z)
    }

    pub fn flat_entries(&self) -> &[Complex<T>] {
        self.entries.as_slice()
    }

    fn indexed_entries(&self) -> impl Iterator<Item = (Vec<usize>, Complex<T>)> + '_ {
        let cols = self.entries.cols();
        self.entries
            .as_slice()
            .iter()
            .enumerate()
            .map(move |(flat, z)| (vec![flat / cols, flat % cols], *z))
    }

    /// Entry-level classicality check; ground truth for the moment detectors.
    pub fn nonpositivity_oracle(&self, tol: T) -> OracleVerdict<T> {
        entry_nonpositivity_oracle(self.indexed_entries(), tol)
    }
}

/// k-basis extended KD table as a flat tensor (last chain index fastest).
#[derive(Debug, Clone, PartialEq)]
pub struct ExtendedKd<T: Real> {
    dim: usize,
    chain_len: usize,
    entries: Vec<Complex<T>>,
    labels: Vec<String>,
}

impl<T: Real> ExtendedKd<T> {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn chain_len(&self) -> usize {
        self.chain_len
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn flat_entries(&self) -> &[Complex<T>] {
        &self.entries
    }

    /// Entry by chain multi-index (index[r] selects the r-th basis vector).
    pub fn entry(&self, index: &[usize]) -> Complex<T> {
        debug_assert_eq!(index.len(), self.chain_len);
        self.entries[self.flat_index(index)]
    }

    fn flat_index(&self, index: &[usize]) -> usize {
        index.iter().fold(0, |acc, &i| acc * self.dim + i)
    }

    fn multi_index(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0; self.chain_len];
        for r in (0..self.chain_len).rev() {
            idx[r] = flat % self.dim;
            flat /= self.dim;
        }
        idx
    }

    pub fn total(&self) -> Complex<T> {
        self.entries
            .iter()
            .fold(Complex::new(T::zero(), T::zero()), |acc, z| acc + *z)
    }

    fn indexed_entries(&self) -> impl Iterator<Item = (Vec<usize>, Complex<T>)> + '_ {
        self.entries
            .iter()
            .enumerate()
            .map(move |(flat, z)| (self.multi_index(flat), *z))
    }

    pub fn nonpositivity_oracle(&self, tol: T) -> OracleVerdict<T> {
        entry_nonpositivity_oracle(self.indexed_entries(), tol)
    }

    /// Sum over the middle index of a 3-chain: for (A, B, A) this collapses
    /// to delta_{ij} <a_i|rho|a_i> by completeness of B.
    pub fn sum_over_middle(&self) -> Result<ComplexMatrix<T>> {
        if self.chain_len != 3 {
            return Err(Error::ChainTooShort { got: self.chain_len });
        }
        let d = self.dim;
        let mut out = ComplexMatrix::zeros(d, d);
        for i in 0..d {
            for j in 0..d {
                let mut acc = Complex::new(T::zero(), T::zero());
                for k in 0..d {
                    acc = acc + self.entry(&[i, k, j]);
                }
                out[(i, j)] = acc;
            }
        }
        Ok(out)
    }
}

/// Margenau-Hill table: the real parts of a KD table.
#[derive(Debug, Clone, PartialEq)]
pub struct MhqDistribution<T: Real> {
    entries: RealMatrix<T>,
    basis_a_label: String,
    basis_f_label: String,
}

impl<T: Real> MhqDistribution<T> {
    /// Directly wrap a real table (used by closed-form scenario paths).
    pub fn from_real(entries: RealMatrix<T>, basis_a_label: &str, basis_f_label: &str) -> Self {
        Self {
            entries,
            basis_a_label: basis_a_label.into(),
            basis_f_label: basis_f_label.into(),
        }
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.entries.rows(), self.entries.cols())
    }

    pub fn entry(&self, i: usize, j: usize) -> T {
        self.entries[(i, j)]
    }

    pub fn entries(&self) -> &RealMatrix<T> {
        &self.entries
    }

    pub fn basis_a_label(&self) -> &str {
        &self.basis_a_label
    }

    pub fn basis_f_label(&self) -> &str {
        &self.basis_f_label
    }

    pub fn total(&self) -> T {
        self.entries.as_slice().iter().fold(T::zero(), |a, x| a + *x)
    }

    pub fn flat_entries(&self) -> &[T] {
        self.entries.as_slice()
    }

    pub fn nonpositivity_oracle(&self, tol: T) -> OracleVerdict<T> {
        let cols = self.entries.cols();
        entry_nonpositivity_oracle(
            self.entries
                .as_slice()
                .iter()
                .enumerate()
                .map(move |(flat, x)| (vec![flat / cols, flat % cols], Complex::new(*x, T::zero()))),
            tol,
        )
    }
}

/// Build the KD table of `rho` over bases A (rows) and F (columns).
pub fn kd_distribution<T: Real>(
    rho: &DensityMatrix<T>,
    basis_a: &OrthonormalBasis<T>,
    basis_f: &OrthonormalBasis<T>,
) -> Result<KdDistribution<T>> {
    let d = rho.dim();
    if basis_a.dim() != d {
        return Err(Error::DimensionMismatch { left: d, right: basis_a.dim() });
    }
    if basis_f.dim() != d {
        return Err(Error::DimensionMismatch { left: d, right: basis_f.dim() });
    }

    // rho |f_j> once per column, then two inner products per cell.
    let rho_f: Vec<ComplexVector<T>> = (0..d)
        .map(|j| rho.matrix().mul_vec(basis_f.vector(j)))
        .collect();
    let entries = ComplexMatrix::from_fn(d, d, |i, j| {
        let overlap = basis_f.vector(j).inner(basis_a.vector(i));
        let sandwich = basis_a.vector(i).inner(&rho_f[j]);
        overlap * sandwich
    });

    Ok(KdDistribution {
        entries,
        basis_a_label: basis_a.label().into(),
        basis_f_label: basis_f.label().into(),
    })
}

/// Build the extended KD tensor over a chain of bases (first basis innermost).
///
/// Entry (i_1, ..., i_k) is
/// `<v1_{i_1}|rho|vk_{i_k}> * prod_r <v^{r+1}_{i_{r+1}}|v^r_{i_r}>`,
/// the trace of the projector chain in closed form.
pub fn extended_kd<T: Real>(
    rho: &DensityMatrix<T>,
    chain: &[&OrthonormalBasis<T>],
) -> Result<ExtendedKd<T>> {
    if chain.len() < 2 {
        return Err(Error::ChainTooShort { got: chain.len() });
    }
    let d = rho.dim();
    for basis in chain {
        if basis.dim() != d {
            return Err(Error::DimensionMismatch { left: d, right: basis.dim() });
        }
    }
    let k = chain.len();

    // Consecutive Gram matrices <v^{r+1}_m | v^r_n> and the closing factor
    // <v^1_m | rho | v^k_n>.
    let grams: Vec<ComplexMatrix<T>> = (0..k - 1)
        .map(|r| chain[r + 1].overlaps(chain[r]))
        .collect();
    let rho_vk: Vec<ComplexVector<T>> = (0..d)
        .map(|n| rho.matrix().mul_vec(chain[k - 1].vector(n)))
        .collect();
    let closing = ComplexMatrix::from_fn(d, d, |m, n| chain[0].vector(m).inner(&rho_vk[n]));

    let total = d.pow(k as u32);
    let mut entries = vec![Complex::new(T::zero(), T::zero()); total];
    let mut index = vec![0usize; k];
    for (flat, slot) in entries.iter_mut().enumerate() {
        let mut rem = flat;
        for r in (0..k).rev() {
            index[r] = rem % d;
            rem /= d;
        }
        let mut value = closing[(index[0], index[k - 1])];
        for (r, gram) in grams.iter().enumerate() {
            value = value * gram[(index[r + 1], index[r])];
        }
        *slot = value;
    }

    Ok(ExtendedKd {
        dim: d,
        chain_len: k,
        entries,
        labels: chain.iter().map(|b| b.label().to_string()).collect(),
    })
}

/// Real parts of a KD table.
pub fn mhq<T: Real>(kd: &KdDistribution<T>) -> MhqDistribution<T> {
    let (rows, cols) = kd.dims();
    MhqDistribution {
        entries: RealMatrix::from_fn(rows, cols, |i, j| kd.entry(i, j).re),
        basis_a_label: kd.basis_a_label.clone(),
        basis_f_label: kd.basis_f_label.clone(),
    }
}

/// Row and column marginals of a KD table (real within `tol` by construction;
/// a violation signals a construction bug and is reported, not masked).
pub fn marginals<T: Real>(kd: &KdDistribution<T>, tol: T) -> Result<(Vec<T>, Vec<T>)> {
    let (rows, cols) = kd.dims();
    let mut row = Vec::with_capacity(rows);
    for i in 0..rows {
        let mut acc = Complex::new(T::zero(), T::zero());
        for j in 0..cols {
            acc = acc + kd.entry(i, j);
        }
        if acc.im.abs() > tol {
            return Err(Error::MarginalNotReal {
                axis: "row",
                index: i,
                imag: as_f64(acc.im),
                tol: as_f64(tol),
            });
        }
        row.push(acc.re);
    }
    let mut col = Vec::with_capacity(cols);
    for j in 0..cols {
        let mut acc = Complex::new(T::zero(), T::zero());
        for i in 0..rows {
            acc = acc + kd.entry(i, j);
        }
        if acc.im.abs() > tol {
            return Err(Error::MarginalNotReal {
                axis: "column",
                index: j,
                imag: as_f64(acc.im),
                tol: as_f64(tol),
            });
        }
        col.push(acc.re);
    }
    Ok((row, col))
}

/// Default overlap floor below which weak values and reconstruction are
/// rejected: division by smaller overlaps amplifies noise past the stated
/// tolerances.
pub const DEFAULT_OVERLAP_FLOOR: f64 = 1e-8;

/// Invert the operator expansion: rho = sum_ij Q_ij |a_i><f_j| / <f_j|a_i>.
///
/// Requires every overlap above `overlap_floor`; the result is validated as a
/// density matrix at `validate_tol` (reconstruction noise scales with the
/// inverse overlaps, so this is looser than the construction default).
pub fn reconstruct_state<T: Real>(
    kd: &KdDistribution<T>,
    basis_a: &OrthonormalBasis<T>,
    basis_f: &OrthonormalBasis<T>,
    overlap_floor: T,
    validate_tol: T,
) -> Result<DensityMatrix<T>> {
    let d = basis_a.dim();
    let (rows, cols) = kd.dims();
    if rows != d || cols != basis_f.dim() || basis_f.dim() != d {
        return Err(Error::DimensionMismatch { left: rows, right: d });
    }
    let mut acc = ComplexMatrix::zeros(d, d);
    for i in 0..d {
        for j in 0..d {
            let overlap = basis_f.vector(j).inner(basis_a.vector(i));
            let magnitude = overlap.norm();
            if magnitude <= overlap_floor {
                return Err(Error::ZeroOverlap {
                    i,
                    j,
                    magnitude: as_f64(magnitude),
                    floor: as_f64(overlap_floor),
                });
            }
            let coeff = kd.entry(i, j) / overlap;
            acc = acc.add(&basis_a.vector(i).outer(basis_f.vector(j)).scale(coeff));
        }
    }
    DensityMatrix::new(acc, validate_tol)
}

/// Weak-value table O^w_ij = <f_j|O|a_i> / <f_j|a_i>.
pub fn weak_values<T: Real>(
    observable: &HermitianObservable<T>,
    basis_a: &OrthonormalBasis<T>,
    basis_f: &OrthonormalBasis<T>,
    overlap_floor: T,
) -> Result<ComplexMatrix<T>> {
    let d = observable.dim();
    if basis_a.dim() != d || basis_f.dim() != d {
        return Err(Error::DimensionMismatch { left: d, right: basis_a.dim() });
    }
    let o_a: Vec<ComplexVector<T>> = (0..d)
        .map(|i| observable.matrix().mul_vec(basis_a.vector(i)))
        .collect();
    let mut out = ComplexMatrix::zeros(d, d);
    for i in 0..d {
        for j in 0..d {
            let overlap = basis_f.vector(j).inner(basis_a.vector(i));
            let magnitude = overlap.norm();
            if magnitude <= overlap_floor {
                return Err(Error::ZeroOverlap {
                    i,
                    j,
                    magnitude: as_f64(magnitude),
                    floor: as_f64(overlap_floor),
                });
            }
            out[(i, j)] = basis_f.vector(j).inner(&o_a[i]) / overlap;
        }
    }
    Ok(out)
}

/// <O> = sum_ij Q_ij O^w_ij; equals Tr(O rho) when the weak values and the
/// table come from the same bases.
pub fn expectation_via_kd<T: Real>(
    kd: &KdDistribution<T>,
    weak_values: &ComplexMatrix<T>,
) -> Complex<T> {
    let (rows, cols) = kd.dims();
    let mut acc = Complex::new(T::zero(), T::zero());
    for i in 0..rows {
        for j in 0..cols {
            acc = acc + kd.entry(i, j) * weak_values[(i, j)];
        }
    }
    acc
}

/// An entry that breaks positivity, with its multi-index.
#[derive(Debug, Clone, PartialEq)]
pub struct Witness<T: Real> {
    pub index: Vec<usize>,
    pub value: Complex<T>,
}

/// Entry-level verdict on a quasiprobability table.
#[derive(Debug, Clone, PartialEq)]
pub enum OracleVerdict<T: Real> {
    /// Every entry has |Im| <= tol and Re >= -tol.
    Positive,
    /// All entries real within tol, but some are negative; witnesses listed.
    NegativeReal(Vec<Witness<T>>),
    /// Some entries have a non-real part beyond tol; witnesses listed.
    NonReal(Vec<Witness<T>>),
}

impl<T: Real> OracleVerdict<T> {
    pub fn is_positive(&self) -> bool {
        matches!(self, OracleVerdict::Positive)
    }

    pub fn label(&self) -> &'static str {
        match self {
            OracleVerdict::Positive => "positive",
            OracleVerdict::NegativeReal(_) => "negative-real",
            OracleVerdict::NonReal(_) => "non-real",
        }
    }
}

/// Scan indexed entries for negativity or non-reality.
pub fn entry_nonpositivity_oracle<T: Real>(
    entries: impl Iterator<Item = (Vec<usize>, Complex<T>)>,
    tol: T,
) -> OracleVerdict<T> {
    let mut non_real = Vec::new();
    let mut negative = Vec::new();
    for (index, value) in entries {
        if value.im.abs() > tol {
            non_real.push(Witness { index, value });
        } else if value.re < -tol {
            negative.push(Witness { index, value });
        }
    }
    if !non_real.is_empty() {
        OracleVerdict::NonReal(non_real)
    } else if !negative.is_empty() {
        OracleVerdict::NegativeReal(negative)
    } else {
        OracleVerdict::Positive
    }
}

/// Negativity of a real quasiprobability table: -1 + sum |entries|.
/// Zero for classical tables, positive iff some entry is negative.
pub fn negativity<T: Real>(mhq: &MhqDistribution<T>) -> T {
    mhq.flat_entries()
        .iter()
        .fold(-T::one(), |acc, x| acc + x.abs())
}

/// l1-norm of coherence of `rho` in basis A: sum of |<a_i|rho|a_j>| off the
/// diagonal.
pub fn l1_coherence<T: Real>(rho: &DensityMatrix<T>, basis_a: &OrthonormalBasis<T>) -> T {
    let d = basis_a.dim();
    let mut acc = T::zero();
    for i in 0..d {
        let rho_ai = rho.matrix().mul_vec(basis_a.vector(i));
        for j in 0..d {
            if i == j {
                continue;
            }
            acc = acc + basis_a.vector(j).inner(&rho_ai).norm();
        }
    }
    acc
}

/// Total nonpositivity of a table: sum of |entries| - 1. For an (A, B, A)
/// chain with B unbiased this equals the l1 coherence of rho in A.
pub fn total_nonpositivity<T: Real>(entries: &[Complex<T>]) -> T {
    entries.iter().fold(-T::one(), |acc, z| acc + z.norm())
}
