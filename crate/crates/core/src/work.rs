//! Two-point-measurement statistics and quasiprobability work distributions.
//!
//! A process is a state rho evolving under a unitary U between projective
//! energy measurements of H_initial (at t = 0) and H_final (at t = T). The
//! TPM joint statistics are genuine probabilities but lose the mean-energy
//! balance when rho carries coherence in the initial energy eigenbasis; the
//! KD work table `Q_ij = Tr[U† Pi_j(T) U Pi_i(0) rho]` keeps both marginals
//! and satisfies the mean-work identity exactly.
//!
//! Work sign convention: atoms sit at `W_ij = E_j(T) - E_i(0)` by default,
//! which makes the first moment of the work distribution equal
//! `Tr[H_final U rho U†] - Tr[H_initial rho]` as an algebraic identity. The
//! opposite convention is available behind [`WorkConvention`].

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::kd::{kd_distribution, KdDistribution, MhqDistribution};
use crate::linalg::{
    hermitian_eigendecomposition, ComplexMatrix, ComplexVector, DensityMatrix, Eigendecomposition,
    HermitianObservable, OrthonormalBasis, RealMatrix, DEFAULT_MERGE_TOL,
};
use crate::scalar::{as_f64, real, Real};

/// Sign convention for the work variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum WorkConvention {
    /// W = E_final - E_initial (mean-work identity holds exactly).
    #[default]
    FinalMinusInitial,
    /// W = E_initial - E_final.
    InitialMinusFinal,
}

impl WorkConvention {
    pub fn label(self) -> &'static str {
        match self {
            WorkConvention::FinalMinusInitial => "final-minus-initial",
            WorkConvention::InitialMinusFinal => "initial-minus-final",
        }
    }
}

/// Cached spectral data of one end of the process.
#[derive(Debug, Clone)]
pub struct SpectralData<T: Real> {
    energies: Vec<T>,
    projectors: Vec<ComplexMatrix<T>>,
    ranks: Vec<usize>,
    /// Eigenbasis ascending in energy; present only when every group has
    /// rank one.
    basis: Option<OrthonormalBasis<T>>,
}

impl<T: Real> SpectralData<T> {
    fn from_eigendecomposition(eig: &Eigendecomposition<T>, label: &str) -> Self {
        let basis = if eig.is_nondegenerate() {
            OrthonormalBasis::new(
                eig.raw_vectors().to_vec(),
                label,
                real::<T>(1e-8),
            )
            .ok()
        } else {
            None
        };
        Self {
            energies: eig.eigenvalues().to_vec(),
            projectors: eig.projectors().to_vec(),
            ranks: eig.ranks().to_vec(),
            basis,
        }
    }

    /// Explicit closed-form construction (scenario path).
    pub fn from_parts(
        energies: Vec<T>,
        projectors: Vec<ComplexMatrix<T>>,
        basis: Option<OrthonormalBasis<T>>,
    ) -> Self {
        let ranks = projectors
            .iter()
            .map(|p| p.trace().re.round().to_usize().unwrap_or(1).max(1))
            .collect();
        Self {
            energies,
            projectors,
            ranks,
            basis,
        }
    }

    pub fn energies(&self) -> &[T] {
        &self.energies
    }

    pub fn projectors(&self) -> &[ComplexMatrix<T>] {
        &self.projectors
    }

    pub fn ranks(&self) -> &[usize] {
        &self.ranks
    }

    pub fn basis(&self) -> Option<&OrthonormalBasis<T>> {
        self.basis.as_ref()
    }

    fn outcome_count(&self) -> usize {
        self.energies.len()
    }
}

/// State, Hamiltonians and evolution of a TPM experiment, with both spectral
/// decompositions cached at construction.
#[derive(Debug, Clone)]
pub struct WorkProcess<T: Real> {
    rho: DensityMatrix<T>,
    h_initial: HermitianObservable<T>,
    h_final: HermitianObservable<T>,
    unitary: ComplexMatrix<T>,
    initial: SpectralData<T>,
    terminal: SpectralData<T>,
}

impl<T: Real> WorkProcess<T> {
    /// General constructor: checks dimensions and unitarity, then
    /// diagonalizes both Hamiltonians (degenerate eigenvalues merged).
    pub fn new(
        rho: DensityMatrix<T>,
        h_initial: HermitianObservable<T>,
        h_final: HermitianObservable<T>,
        unitary: ComplexMatrix<T>,
        tol: T,
    ) -> Result<Self> {
        let d = rho.dim();
        for other in [h_initial.dim(), h_final.dim(), unitary.rows(), unitary.cols()] {
            if other != d {
                return Err(Error::DimensionMismatch { left: d, right: other });
            }
        }
        unitary.check_finite()?;
        let residual = unitary.unitarity_residual();
        if residual > tol {
            return Err(Error::NotUnitary {
                residual: as_f64(residual),
                tol: as_f64(tol),
            });
        }
        let merge = real::<T>(DEFAULT_MERGE_TOL);
        let initial = SpectralData::from_eigendecomposition(
            &hermitian_eigendecomposition(&h_initial, merge)?,
            "h-initial eigenbasis",
        );
        let terminal = SpectralData::from_eigendecomposition(
            &hermitian_eigendecomposition(&h_final, merge)?,
            "h-final eigenbasis",
        );
        Ok(Self {
            rho,
            h_initial,
            h_final,
            unitary,
            initial,
            terminal,
        })
    }

    /// Scenario constructor with precomputed closed-form spectra. The
    /// decompositions must reconstruct the Hamiltonians within `tol`.
    pub fn from_decompositions(
        rho: DensityMatrix<T>,
        h_initial: HermitianObservable<T>,
        h_final: HermitianObservable<T>,
        unitary: ComplexMatrix<T>,
        initial: SpectralData<T>,
        terminal: SpectralData<T>,
        tol: T,
    ) -> Result<Self> {
        let residual = unitary.unitarity_residual();
        if residual > tol {
            return Err(Error::NotUnitary {
                residual: as_f64(residual),
                tol: as_f64(tol),
            });
        }
        for (spectral, h) in [(&initial, &h_initial), (&terminal, &h_final)] {
            let mut acc = ComplexMatrix::zeros(h.dim(), h.dim());
            for (e, p) in spectral.energies.iter().zip(&spectral.projectors) {
                acc = acc.add(&p.scale(Complex::new(*e, T::zero())));
            }
            let gap = acc.sub(h.matrix()).max_abs();
            if gap > tol {
                return Err(Error::NotHermitian {
                    residual: as_f64(gap),
                    tol: as_f64(tol),
                });
            }
        }
        Ok(Self {
            rho,
            h_initial,
            h_final,
            unitary,
            initial,
            terminal,
        })
    }

    pub fn dim(&self) -> usize {
        self.rho.dim()
    }

    pub fn rho(&self) -> &DensityMatrix<T> {
        &self.rho
    }

    pub fn h_initial(&self) -> &HermitianObservable<T> {
        &self.h_initial
    }

    pub fn h_final(&self) -> &HermitianObservable<T> {
        &self.h_final
    }

    pub fn unitary(&self) -> &ComplexMatrix<T> {
        &self.unitary
    }

    pub fn initial(&self) -> &SpectralData<T> {
        &self.initial
    }

    pub fn terminal(&self) -> &SpectralData<T> {
        &self.terminal
    }

    fn evolved_rho(&self) -> ComplexMatrix<T> {
        self.unitary
            .mul(self.rho.matrix())
            .mul(&self.unitary.dagger())
    }

    /// Heisenberg-evolved final projector U† Pi_j(T) U.
    fn heisenberg_projector(&self, j: usize) -> ComplexMatrix<T> {
        self.unitary
            .dagger()
            .mul(&self.terminal.projectors[j])
            .mul(&self.unitary)
    }
}

/// TPM joint probabilities p_ij = Tr[U† Pi_j(T) U Pi_i(0) rho Pi_i(0)].
///
/// Genuine probabilities: nonnegative, total one, row sums Tr[Pi_i(0) rho].
/// Works for degenerate spectra (projectors of any rank).
pub fn tpm_joint<T: Real>(proc: &WorkProcess<T>) -> RealMatrix<T> {
    let ni = proc.initial.outcome_count();
    let nj = proc.terminal.outcome_count();
    let heisenberg: Vec<ComplexMatrix<T>> =
        (0..nj).map(|j| proc.heisenberg_projector(j)).collect();
    RealMatrix::from_fn(ni, nj, |i, j| {
        let pi = &proc.initial.projectors[i];
        let collapsed = pi.mul(proc.rho.matrix()).mul(pi);
        heisenberg[j].mul(&collapsed).trace().re
    })
}

/// KD work quasiprobability: the KD table of rho over the initial energy
/// eigenbasis and the Heisenberg-evolved final eigenbasis.
///
/// Rejects degenerate spectra: the table needs rank-one projectors.
pub fn work_quasiprob<T: Real>(proc: &WorkProcess<T>) -> Result<KdDistribution<T>> {
    for (which, spectral) in [("initial", &proc.initial), ("final", &proc.terminal)] {
        if let Some(index) = spectral.ranks.iter().position(|&r| r > 1) {
            let _ = which;
            return Err(Error::DegenerateSpectrum {
                index,
                rank: spectral.ranks[index],
            });
        }
    }
    let basis_a = proc
        .initial
        .basis
        .clone()
        .expect("nondegenerate spectrum has an eigenbasis");
    let terminal_basis = proc
        .terminal
        .basis
        .clone()
        .expect("nondegenerate spectrum has an eigenbasis");
    let basis_f = terminal_basis.map_vectors(&proc.unitary.dagger(), "heisenberg h-final eigenbasis");
    kd_distribution(&proc.rho, &basis_a, &basis_f)
}

/// A point mass of the work distribution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WorkAtom<T: Real> {
    pub work: T,
    pub weight: T,
}

/// Quasiprobability distribution of work: weighted atoms on the energy-gap
/// grid, weights summing to one (atoms at equal work merged).
#[derive(Debug, Clone, PartialEq)]
pub struct WorkDistribution<T: Real> {
    atoms: Vec<WorkAtom<T>>,
    convention: WorkConvention,
}

impl<T: Real> WorkDistribution<T> {
    pub fn atoms(&self) -> &[WorkAtom<T>] {
        &self.atoms
    }

    pub fn convention(&self) -> WorkConvention {
        self.convention
    }

    pub fn total_weight(&self) -> T {
        self.atoms.iter().fold(T::zero(), |acc, a| acc + a.weight)
    }

    pub fn first_moment(&self) -> T {
        self.atoms
            .iter()
            .fold(T::zero(), |acc, a| acc + a.work * a.weight)
    }
}

/// Assemble a work distribution from a real weight table and the two energy
/// lists. Atoms whose work values agree within 1e-9 relative to the energy
/// scale are merged.
pub fn work_distribution<T: Real>(
    weights: &RealMatrix<T>,
    e_initial: &[T],
    e_final: &[T],
    convention: WorkConvention,
) -> Result<WorkDistribution<T>> {
    if weights.rows() != e_initial.len() {
        return Err(Error::DimensionMismatch {
            left: weights.rows(),
            right: e_initial.len(),
        });
    }
    if weights.cols() != e_final.len() {
        return Err(Error::DimensionMismatch {
            left: weights.cols(),
            right: e_final.len(),
        });
    }
    let scale = e_initial
        .iter()
        .chain(e_final)
        .fold(T::one(), |acc, e| acc.max(e.abs()));
    let merge = real::<T>(1e-9) * scale;

    let mut atoms: Vec<WorkAtom<T>> = Vec::new();
    for i in 0..weights.rows() {
        for j in 0..weights.cols() {
            let work = match convention {
                WorkConvention::FinalMinusInitial => e_final[j] - e_initial[i],
                WorkConvention::InitialMinusFinal => e_initial[i] - e_final[j],
            };
            let weight = weights[(i, j)];
            match atoms.iter_mut().find(|a| (a.work - work).abs() <= merge) {
                Some(atom) => atom.weight = atom.weight + weight,
                None => atoms.push(WorkAtom { work, weight }),
            }
        }
    }
    atoms.sort_by(|a, b| a.work.partial_cmp(&b.work).expect("finite work values"));
    Ok(WorkDistribution { atoms, convention })
}

/// Work distribution of the process under the KD work quasiprobability
/// (real parts as weights).
pub fn kd_work_distribution<T: Real>(
    proc: &WorkProcess<T>,
    convention: WorkConvention,
) -> Result<WorkDistribution<T>> {
    let kd = work_quasiprob(proc)?;
    let (rows, cols) = kd.dims();
    let weights = RealMatrix::from_fn(rows, cols, |i, j| kd.entry(i, j).re);
    work_distribution(
        &weights,
        proc.initial.energies(),
        proc.terminal.energies(),
        convention,
    )
}

/// <W> = Tr[H_final U rho U†] - Tr[H_initial rho].
pub fn mean_work<T: Real>(proc: &WorkProcess<T>) -> T {
    let final_term = proc.h_final.matrix().mul(&proc.evolved_rho()).trace().re;
    let initial_term = proc.h_initial.matrix().mul(proc.rho.matrix()).trace().re;
    final_term - initial_term
}

/// Rotating-frame qubit scenario: effective field of magnitude Delta =
/// sqrt(omega^2 + rabi^2) precessing about z at rate omega, driven
/// transversally with amplitude rabi, evolved for time t under
/// U(t) = exp(-i omega sigma_z t / 2) exp(-i rabi sigma_x t / 2).
///
/// The initial state is given in the eigenbasis of the t = 0 Hamiltonian
/// (ground population `gamma`, real coherence `xi`); spectra and eigenbases
/// come from closed forms, not re-diagonalization, eliminating eigenvector
/// phase ambiguity. When `gamma = xi = 1/2` the closed-form MHQ table is
/// returned alongside the process.
pub fn rotating_qubit_scenario<T: Real>(
    omega: T,
    rabi: T,
    t: T,
    gamma: T,
    xi: T,
) -> Result<(WorkProcess<T>, Option<RealMatrix<T>>)> {
    let delta = omega.hypot(rabi);
    if delta.is_zero() {
        return Err(Error::ParameterOutOfRange {
            name: "omega, rabi",
            value: 0.0,
            constraint: "omega and rabi must not both be zero",
        });
    }
    if gamma < T::zero() || gamma > T::one() {
        return Err(Error::InvalidBlochParameters {
            gamma: as_f64(gamma),
            xi: as_f64(xi),
        });
    }
    let coherence_cap = (gamma * (T::one() - gamma)).sqrt();
    let slack = real::<T>(1e-12);
    if xi.abs() > coherence_cap + slack {
        return Err(Error::InvalidBlochParameters {
            gamma: as_f64(gamma),
            xi: as_f64(xi),
        });
    }

    let h_initial = rotating_hamiltonian(omega, rabi, T::zero());
    let h_final = rotating_hamiltonian(omega, rabi, t);
    let spectral_initial = rotating_spectral(omega, rabi, T::zero(), delta);
    let spectral_final = rotating_spectral(omega, rabi, t, delta);

    // rho in the initial energy eigenbasis: gamma on the ground state,
    // xi on the off-diagonal.
    let basis0 = spectral_initial
        .basis
        .as_ref()
        .expect("qubit spectrum is nondegenerate");
    let ground = basis0.vector(0);
    let excited = basis0.vector(1);
    let g = Complex::new(gamma, T::zero());
    let e = Complex::new(T::one() - gamma, T::zero());
    let x = Complex::new(xi, T::zero());
    let rho_matrix = ground
        .outer(ground)
        .scale(g)
        .add(&excited.outer(excited).scale(e))
        .add(&ground.outer(excited).scale(x))
        .add(&excited.outer(ground).scale(x));
    let rho = DensityMatrix::new(rho_matrix, real::<T>(1e-8))?;

    let unitary = rotating_unitary(omega, rabi, t);
    let proc = WorkProcess::from_decompositions(
        rho,
        HermitianObservable::new(h_initial, real::<T>(1e-10))?,
        HermitianObservable::new(h_final, real::<T>(1e-10))?,
        unitary,
        spectral_initial,
        spectral_final,
        real::<T>(1e-8),
    )?;

    let half = real::<T>(0.5);
    let closed_form = if gamma == half && xi == half {
        Some(closed_form_mhq(omega, rabi, t))
    } else {
        None
    };
    Ok((proc, closed_form))
}

/// H(t) = (rabi (cos(omega t) sx + sin(omega t) sy) + omega sz) / 2.
fn rotating_hamiltonian<T: Real>(omega: T, rabi: T, t: T) -> ComplexMatrix<T> {
    let half = real::<T>(0.5);
    let phase = omega * t;
    let nx = rabi * phase.cos() * half;
    let ny = rabi * phase.sin() * half;
    let nz = omega * half;
    bloch_matrix(nx, ny, nz)
}

/// nx sx + ny sy + nz sz as a matrix.
fn bloch_matrix<T: Real>(nx: T, ny: T, nz: T) -> ComplexMatrix<T> {
    let mut m = ComplexMatrix::zeros(2, 2);
    m[(0, 0)] = Complex::new(nz, T::zero());
    m[(0, 1)] = Complex::new(nx, -ny);
    m[(1, 0)] = Complex::new(nx, ny);
    m[(1, 1)] = Complex::new(-nz, T::zero());
    m
}

/// Closed-form spectrum of the rotating Hamiltonian at time t: energies
/// ±Delta/2 with Bloch axis (rabi cos(omega t), rabi sin(omega t), omega)/Delta.
fn rotating_spectral<T: Real>(omega: T, rabi: T, t: T, delta: T) -> SpectralData<T> {
    let phase = omega * t;
    let nx = rabi * phase.cos() / delta;
    let ny = rabi * phase.sin() / delta;
    let nz = omega / delta;

    let azimuth = ny.atan2(nx);
    let polar = nx.hypot(ny).atan2(nz);
    let half = real::<T>(0.5);
    let (c, s) = ((polar * half).cos(), (polar * half).sin());
    let phase_pos = Complex::new(azimuth.cos(), azimuth.sin());
    let phase_neg = Complex::new(azimuth.cos(), -azimuth.sin());

    let ground = ComplexVector::new(vec![
        -phase_neg * Complex::new(s, T::zero()),
        Complex::new(c, T::zero()),
    ]);
    let excited = ComplexVector::new(vec![
        Complex::new(c, T::zero()),
        phase_pos * Complex::new(s, T::zero()),
    ]);

    let two = T::one() + T::one();
    let energies = vec![-delta / two, delta / two];
    let projectors = vec![ground.outer(&ground), excited.outer(&excited)];
    let basis = OrthonormalBasis::new(
        vec![ground, excited],
        "field eigenbasis",
        real::<T>(1e-10),
    )
    .expect("closed-form eigenbasis is orthonormal");
    SpectralData::from_parts(energies, projectors, Some(basis))
}

/// U(t) = exp(-i omega sz t/2) exp(-i rabi sx t/2).
fn rotating_unitary<T: Real>(omega: T, rabi: T, t: T) -> ComplexMatrix<T> {
    let half = real::<T>(0.5);
    let az = omega * t * half;
    let ax = rabi * t * half;

    let mut rz = ComplexMatrix::zeros(2, 2);
    rz[(0, 0)] = Complex::new(az.cos(), -az.sin());
    rz[(1, 1)] = Complex::new(az.cos(), az.sin());

    let mut rx = ComplexMatrix::zeros(2, 2);
    rx[(0, 0)] = Complex::new(ax.cos(), T::zero());
    rx[(0, 1)] = Complex::new(T::zero(), -ax.sin());
    rx[(1, 0)] = Complex::new(T::zero(), -ax.sin());
    rx[(1, 1)] = Complex::new(ax.cos(), T::zero());

    rz.mul(&rx)
}

/// Closed-form MHQ table for the maximally coherent initial state
/// (gamma = xi = 1/2), indexed (initial, final) ascending in energy.
pub fn closed_form_mhq<T: Real>(omega: T, rabi: T, t: T) -> RealMatrix<T> {
    let two = T::one() + T::one();
    let four = two + two;
    let delta_sq = omega * omega + rabi * rabi;
    let denom = four * delta_sq;
    let c = (rabi * t).cos();
    let mut m = RealMatrix::zeros(2, 2);
    m[(0, 0)] = (omega * omega - omega * rabi + two * rabi * rabi + omega * (omega + rabi) * c) / denom;
    m[(0, 1)] = omega * (omega + rabi) * (T::one() - c) / denom;
    m[(1, 0)] = omega * (omega - rabi) * (T::one() - c) / denom;
    m[(1, 1)] = (omega * omega + omega * rabi + two * rabi * rabi + omega * (omega - rabi) * c) / denom;
    m
}

/// MHQ table of a process's work quasiprobability, with eigenbasis labels.
pub fn work_mhq<T: Real>(proc: &WorkProcess<T>) -> Result<MhqDistribution<T>> {
    Ok(crate::kd::mhq(&work_quasiprob(proc)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{random_basis, random_state_and_bases, random_unitary};
    use crate::scalar::default_tol;
    use num_complex::Complex;
    use std::f64::consts::{FRAC_PI_2, PI};

    type C = Complex<f64>;

    fn identity_process(seed: u64) -> WorkProcess<f64> {
        let (rho, basis, _) = random_state_and_bases::<f64>(2, seed).unwrap();
        let mut h = ComplexMatrix::zeros(2, 2);
        for (k, e) in [(0usize, -0.5), (1usize, 1.5)] {
            let v = basis.vector(k);
            h = h.add(&v.outer(v).scale(C::new(e, 0.0)));
        }
        let h = HermitianObservable::new(h, default_tol()).unwrap();
        WorkProcess::new(
            rho,
            h.clone(),
            h,
            ComplexMatrix::identity(2),
            default_tol(),
        )
        .unwrap()
    }

    fn random_process(dim: usize, seed: u64) -> WorkProcess<f64> {
        let (rho, basis_i, basis_f) = random_state_and_bases::<f64>(dim, seed).unwrap();
        let energies_i: Vec<f64> = (0..dim).map(|k| k as f64 - 0.7).collect();
        let energies_f: Vec<f64> = (0..dim).map(|k| 0.3 * k as f64 + 0.1).collect();
        let build = |basis: &OrthonormalBasis<f64>, energies: &[f64]| {
            let mut h = ComplexMatrix::zeros(dim, dim);
            for (k, e) in energies.iter().enumerate() {
                let v = basis.vector(k);
                h = h.add(&v.outer(v).scale(C::new(*e, 0.0)));
            }
            HermitianObservable::new(h, default_tol()).unwrap()
        };
        let u = random_unitary::<f64>(dim, seed + 999).unwrap();
        WorkProcess::new(rho, build(&basis_i, &energies_i), build(&basis_f, &energies_f), u, default_tol()).unwrap()
    }

    #[test]
    fn tpm_diagonal_for_commuting_trivial_process() {
        // U = I, H_initial = H_final, rho diagonal in the energy basis.
        let basis = random_basis::<f64>(2, 3, "energy").unwrap();
        let mut h = ComplexMatrix::zeros(2, 2);
        let mut rho = ComplexMatrix::zeros(2, 2);
        for (k, (e, p)) in [(1.0, 0.3), (2.0, 0.7)].iter().enumerate() {
            let v = basis.vector(k);
            h = h.add(&v.outer(v).scale(C::new(*e, 0.0)));
            rho = rho.add(&v.outer(v).scale(C::new(*p, 0.0)));
        }
        let proc = WorkProcess::new(
            DensityMatrix::new(rho, default_tol()).unwrap(),
            HermitianObservable::new(h.clone(), default_tol()).unwrap(),
            HermitianObservable::new(h, default_tol()).unwrap(),
            ComplexMatrix::identity(2),
            default_tol(),
        )
        .unwrap();
        let p = tpm_joint(&proc);
        assert!((p[(0, 0)] - 0.3).abs() < 1e-10);
        assert!((p[(1, 1)] - 0.7).abs() < 1e-10);
        assert!(p[(0, 1)].abs() < 1e-10 && p[(1, 0)].abs() < 1e-10);
    }

    #[test]
    fn tpm_is_normalized_and_nonnegative() {
        for seed in 0..20 {
            let proc = random_process(3, seed);
            let p = tpm_joint(&proc);
            let mut total = 0.0;
            for i in 0..3 {
                let mut row = 0.0;
                for j in 0..3 {
                    assert!(p[(i, j)] >= -1e-10);
                    row += p[(i, j)];
                    total += p[(i, j)];
                }
                let born = proc
                    .initial()
                    .projectors()[i]
                    .mul(proc.rho().matrix())
                    .trace()
                    .re;
                assert!((row - born).abs() < 1e-10);
            }
            assert!((total - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn tpm_columns_deviate_under_initial_coherence() {
        let (proc, _) = rotating_qubit_scenario(1.0, 2.0, 1.3, 0.5, 0.5).unwrap();
        let p = tpm_joint(&proc);
        let evolved = proc.unitary().mul(proc.rho().matrix()).mul(&proc.unitary().dagger());
        let mut worst: f64 = 0.0;
        for j in 0..2 {
            let col = p[(0, j)] + p[(1, j)];
            let expected = proc.terminal().projectors()[j].mul(&evolved).trace().re;
            worst = worst.max((col - expected).abs());
        }
        assert!(worst > 1e-3, "expected marginal deviation, got {worst:e}");
    }

    #[test]
    fn work_quasiprob_marginal_laws() {
        for dim in [2usize, 3] {
            for seed in 0..50 {
                let proc = random_process(dim, seed);
                let kd = work_quasiprob(&proc).unwrap();
                let evolved = proc.unitary().mul(proc.rho().matrix()).mul(&proc.unitary().dagger());
                for i in 0..dim {
                    let mut row = C::new(0.0, 0.0);
                    for j in 0..dim {
                        row += kd.entry(i, j);
                    }
                    let born = proc.initial().projectors()[i].mul(proc.rho().matrix()).trace().re;
                    assert!((row.re - born).abs() < 1e-10 && row.im.abs() < 1e-10);
                }
                for j in 0..dim {
                    let mut col = C::new(0.0, 0.0);
                    for i in 0..dim {
                        col += kd.entry(i, j);
                    }
                    let expected = proc.terminal().projectors()[j].mul(&evolved).trace().re;
                    assert!((col.re - expected).abs() < 1e-10 && col.im.abs() < 1e-10);
                }
                assert!((kd.total() - C::new(1.0, 0.0)).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn kd_coincides_with_tpm_for_commuting_state() {
        // rho diagonal in the initial energy basis: no measurement disturbance.
        for seed in 0..20 {
            let dim = 3;
            let basis_i = random_basis::<f64>(dim, seed, "i").unwrap();
            let basis_f = random_basis::<f64>(dim, seed + 500, "f").unwrap();
            let probs = [0.5, 0.3, 0.2];
            let mut h_i = ComplexMatrix::zeros(dim, dim);
            let mut rho = ComplexMatrix::zeros(dim, dim);
            let mut h_f = ComplexMatrix::zeros(dim, dim);
            for k in 0..dim {
                let v = basis_i.vector(k);
                h_i = h_i.add(&v.outer(v).scale(C::new(k as f64 + 0.5, 0.0)));
                rho = rho.add(&v.outer(v).scale(C::new(probs[k], 0.0)));
                let w = basis_f.vector(k);
                h_f = h_f.add(&w.outer(w).scale(C::new(1.3 * k as f64 - 0.2, 0.0)));
            }
            let proc = WorkProcess::new(
                DensityMatrix::new(rho, default_tol()).unwrap(),
                HermitianObservable::new(h_i, default_tol()).unwrap(),
                HermitianObservable::new(h_f, default_tol()).unwrap(),
                random_unitary::<f64>(dim, seed + 7070).unwrap(),
                default_tol(),
            )
            .unwrap();
            let p = tpm_joint(&proc);
            let kd = work_quasiprob(&proc).unwrap();
            for i in 0..dim {
                for j in 0..dim {
                    assert!((kd.entry(i, j).re - p[(i, j)]).abs() < 1e-10);
                    assert!(kd.entry(i, j).im.abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn degenerate_spectrum_rejected_for_kd() {
        let (rho, _, _) = random_state_and_bases::<f64>(2, 8).unwrap();
        let h_deg = HermitianObservable::new(ComplexMatrix::identity(2), default_tol()).unwrap();
        let h_ok = HermitianObservable::new(
            bloch_matrix(0.0, 0.0, 1.0),
            default_tol(),
        )
        .unwrap();
        let proc = WorkProcess::new(rho, h_ok, h_deg, ComplexMatrix::identity(2), default_tol()).unwrap();
        assert!(matches!(
            work_quasiprob(&proc),
            Err(Error::DegenerateSpectrum { rank: 2, .. })
        ));
        // TPM still fine with merged projectors.
        let p = tpm_joint(&proc);
        assert!((p[(0, 0)] + p[(1, 0)] - 1.0).abs() < 1e-10);
    }

    #[test]
    fn scenario_matches_closed_form_at_spot_value() {
        let (proc, closed) = rotating_qubit_scenario(1.0, 2.0, FRAC_PI_2, 0.5, 0.5).unwrap();
        let closed = closed.expect("maximally coherent input has closed form");
        let expect = [0.2, 0.3, -0.1, 0.6];
        for (k, e) in expect.iter().enumerate() {
            assert!((closed[(k / 2, k % 2)] - e).abs() < 1e-12);
        }
        let table = work_mhq(&proc).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert!((table.entry(i, j) - closed[(i, j)]).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn scenario_closed_form_agreement_random_parameters() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(20240601);
        for _ in 0..100 {
            let omega = rng.gen_range(0.0..5.0) + 1e-3;
            let rabi = rng.gen_range(0.0..5.0) + 1e-3;
            let t = rng.gen_range(0.0..5.0) + 1e-3;
            let (proc, closed) = rotating_qubit_scenario(omega, rabi, t, 0.5, 0.5).unwrap();
            let closed = closed.unwrap();
            let table = work_mhq(&proc).unwrap();
            for i in 0..2 {
                for j in 0..2 {
                    assert!(
                        (table.entry(i, j) - closed[(i, j)]).abs() < 1e-10,
                        "omega={omega} rabi={rabi} t={t} ({i},{j})"
                    );
                }
            }
        }
    }

    #[test]
    fn scenario_edge_cases() {
        // t = 0: classical diagonal table.
        let (_, closed) = rotating_qubit_scenario(1.3, 0.8, 0.0, 0.5, 0.5).unwrap();
        let closed = closed.unwrap();
        for (k, e) in [0.5, 0.0, 0.0, 0.5].iter().enumerate() {
            assert!((closed[(k / 2, k % 2)] - e).abs() < 1e-12);
        }
        // omega = 0: off-diagonals vanish for any t.
        let (_, closed) = rotating_qubit_scenario(0.0, 2.0, 1.1, 0.5, 0.5).unwrap();
        let closed = closed.unwrap();
        for (k, e) in [0.5, 0.0, 0.0, 0.5].iter().enumerate() {
            assert!((closed[(k / 2, k % 2)] - e).abs() < 1e-12);
        }
    }

    #[test]
    fn scenario_rejects_bad_parameters() {
        assert!(matches!(
            rotating_qubit_scenario::<f64>(0.0, 0.0, 1.0, 0.5, 0.5),
            Err(Error::ParameterOutOfRange { .. })
        ));
        assert!(matches!(
            rotating_qubit_scenario::<f64>(1.0, 1.0, 1.0, 1.2, 0.0),
            Err(Error::InvalidBlochParameters { .. })
        ));
        assert!(matches!(
            rotating_qubit_scenario::<f64>(1.0, 1.0, 1.0, 0.9, 0.5),
            Err(Error::InvalidBlochParameters { .. })
        ));
    }

    #[test]
    fn scenario_spectra_agree_with_generic_eigensolver() {
        // Cross-check of the closed-form production path.
        let (proc, _) = rotating_qubit_scenario(0.9, 1.7, 2.2, 0.5, 0.5).unwrap();
        for (h, spectral) in [
            (proc.h_initial(), proc.initial()),
            (proc.h_final(), proc.terminal()),
        ] {
            let eig = hermitian_eigendecomposition(h, real::<f64>(DEFAULT_MERGE_TOL)).unwrap();
            for (a, b) in eig.eigenvalues().iter().zip(spectral.energies()) {
                assert!((a - b).abs() < 1e-12);
            }
            for (p, q) in eig.projectors().iter().zip(spectral.projectors()) {
                assert!(p.sub(q).max_abs() < 1e-12);
            }
        }
    }

    #[test]
    fn work_atoms_and_merging() {
        let (proc, _) = rotating_qubit_scenario(1.0, 2.0, FRAC_PI_2, 0.5, 0.5).unwrap();
        let dist = kd_work_distribution(&proc, WorkConvention::FinalMinusInitial).unwrap();
        let delta = 5.0f64.sqrt();
        let atoms = dist.atoms();
        assert_eq!(atoms.len(), 3);
        assert!((atoms[0].work + delta).abs() < 1e-12 && (atoms[0].weight + 0.1).abs() < 1e-10);
        assert!(atoms[1].work.abs() < 1e-12 && (atoms[1].weight - 0.8).abs() < 1e-10);
        assert!((atoms[2].work - delta).abs() < 1e-12 && (atoms[2].weight - 0.3).abs() < 1e-10);
        assert!((dist.total_weight() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn trivial_process_has_single_zero_atom() {
        let proc = identity_process(5);
        let dist = kd_work_distribution(&proc, WorkConvention::default()).unwrap();
        assert_eq!(dist.atoms().len(), 1);
        assert!(dist.atoms()[0].work.abs() < 1e-12);
        assert!((dist.atoms()[0].weight - 1.0).abs() < 1e-10);
        assert!(mean_work(&proc).abs() < 1e-12);
    }

    #[test]
    fn mean_work_identity() {
        for seed in 0..50 {
            let proc = random_process(3, seed);
            let dist = kd_work_distribution(&proc, WorkConvention::FinalMinusInitial).unwrap();
            assert!((dist.first_moment() - mean_work(&proc)).abs() < 1e-12, "seed {seed}");
        }
        // And under the opposite convention the first moment flips sign.
        let proc = random_process(2, 3);
        let flipped = kd_work_distribution(&proc, WorkConvention::InitialMinusFinal).unwrap();
        assert!((flipped.first_moment() + mean_work(&proc)).abs() < 1e-12);
    }

    #[test]
    fn mean_work_bounded_by_spectral_range() {
        let (proc, _) = rotating_qubit_scenario(1.0, 2.0, PI, 1.0, 0.0).unwrap();
        let delta = 5.0f64.sqrt();
        assert!(mean_work(&proc).abs() <= delta + 1e-12);
    }

    #[test]
    fn non_unitary_rejected() {
        let (rho, _, _) = random_state_and_bases::<f64>(2, 1).unwrap();
        let h = HermitianObservable::new(bloch_matrix(0.3, 0.0, 1.0), default_tol()).unwrap();
        let u = ComplexMatrix::identity(2).scale(C::new(0.9, 0.0));
        assert!(matches!(
            WorkProcess::new(rho, h.clone(), h, u, default_tol()),
            Err(Error::NotUnitary { .. })
        ));
    }
}
