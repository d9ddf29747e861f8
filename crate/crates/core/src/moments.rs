//! Moment sequences, Hankel matrices and the nonpositivity detectors.
//!
//! The n-th moment of a table is the element-wise power sum of its entries.
//! For a positive (hence real, normalized) table the Hankel matrix
//! `[H_m]_{ij} = moment_{i+j+1}` is a classical moment matrix and therefore
//! positive semidefinite, so `det H_m < 0` at any level certifies
//! nonpositivity; rising m gives progressively stronger one-sided tests, with
//! level 1 reducing to `q_2^2 <= q_3`.
//!
//! Complex moments: power sums of a non-real table may be non-real, while a
//! positive table always has real moments. When any moment has |Im| above
//! `tol_im` the detector short-circuits with [`Verdict::NonRealMoments`] — a
//! certificate by contrapositive, not a heuristic. Hankel determinants are
//! otherwise taken on real parts, with the imaginary residue recorded per
//! level. "Not detected" never means "positive": the criteria are one-sided.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::kd::{
    kd_distribution, mhq, negativity, ExtendedKd, KdDistribution, MhqDistribution, OracleVerdict,
};
use crate::linalg::{mub_check, mub_deviation, DensityMatrix, OrthonormalBasis, RealMatrix};
use crate::scalar::{as_f64, real, Real};
use crate::kd::extended_kd;

/// Which table a moment vector was computed from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MomentSource {
    Kd,
    ExtendedKd,
    Mhq,
}

impl MomentSource {
    pub fn label(self) -> &'static str {
        match self {
            MomentSource::Kd => "kd",
            MomentSource::ExtendedKd => "extended-kd",
            MomentSource::Mhq => "mhq",
        }
    }
}

/// Moments 1..=N of a quasiprobability table; `value(1)` is the table total
/// and equals one for any normalized table.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentVector<T: Real> {
    values: Vec<Complex<T>>,
    source: MomentSource,
}

impl<T: Real> MomentVector<T> {
    /// Power sums of `entries` up to order `n_max`.
    pub fn from_entries(
        entries: impl Iterator<Item = Complex<T>> + Clone,
        n_max: usize,
        source: MomentSource,
    ) -> Self {
        let mut values = vec![Complex::new(T::zero(), T::zero()); n_max];
        for z in entries {
            let mut power = z;
            for slot in values.iter_mut() {
                *slot = *slot + power;
                power = power * z;
            }
        }
        Self { values, source }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Moment of order `n` (1-based).
    pub fn value(&self, n: usize) -> Complex<T> {
        self.values[n - 1]
    }

    pub fn values(&self) -> &[Complex<T>] {
        &self.values
    }

    pub fn source(&self) -> MomentSource {
        self.source
    }

    /// Largest |Im| over moments 1..=n (or all moments if n exceeds length).
    pub fn imaginary_residue(&self, n: usize) -> T {
        self.values
            .iter()
            .take(n)
            .fold(T::zero(), |acc, z| acc.max(z.im.abs()))
    }
}

/// KD moments q_n.
pub fn kd_moments<T: Real>(kd: &KdDistribution<T>, n_max: usize) -> MomentVector<T> {
    MomentVector::from_entries(kd.flat_entries().iter().copied(), n_max, MomentSource::Kd)
}

/// Extended KD moments r_n.
pub fn extended_kd_moments<T: Real>(ext: &ExtendedKd<T>, n_max: usize) -> MomentVector<T> {
    MomentVector::from_entries(
        ext.flat_entries().iter().copied(),
        n_max,
        MomentSource::ExtendedKd,
    )
}

/// MHQ moments s_n.
pub fn mhq_moments<T: Real>(table: &MhqDistribution<T>, n_max: usize) -> MomentVector<T> {
    MomentVector::from_entries(
        table
            .flat_entries()
            .iter()
            .map(|x| Complex::new(*x, T::zero())),
        n_max,
        MomentSource::Mhq,
    )
}

/// One level of the Hankel hierarchy.
#[derive(Debug, Clone, PartialEq)]
pub struct HankelReport<T: Real> {
    pub level: usize,
    /// (m+1) x (m+1) matrix of real parts, `matrix[i][j] = Re moment_{i+j+1}`.
    pub matrix: RealMatrix<T>,
    /// LU determinant with partial pivoting.
    pub determinant: T,
    /// Max |Im| over the moments entering this level.
    pub imaginary_residue: T,
    /// Scale-aware threshold this level was judged against.
    pub tol_det: T,
}

/// Hankel matrix and determinant at level m from moments 1..=2m+1.
pub fn hankel<T: Real>(moments: &MomentVector<T>, m: usize) -> Result<HankelReport<T>> {
    hankel_with_tol(moments, m, real(DEFAULT_TOL_DET_BASE))
}

fn hankel_with_tol<T: Real>(
    moments: &MomentVector<T>,
    m: usize,
    tol_det_base: T,
) -> Result<HankelReport<T>> {
    let needed = 2 * m + 1;
    if moments.len() < needed {
        return Err(Error::InsufficientMoments {
            level: m,
            needed,
            available: moments.len(),
        });
    }
    let matrix = RealMatrix::from_fn(m + 1, m + 1, |i, j| moments.value(i + j + 1).re);
    let determinant = matrix.determinant();
    let scale = matrix.inf_norm();
    let tol_det = tol_det_base * T::one().max(scale.powi(m as i32 + 1));
    Ok(HankelReport {
        level: m,
        matrix,
        determinant,
        imaginary_residue: moments.imaginary_residue(needed),
        tol_det,
    })
}

/// Detector outcome. `Detected(m)` means the level-m determinant fell below
/// its negative threshold and all lower levels did not.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Detected(usize),
    NotDetected,
    NonRealMoments,
}

impl Verdict {
    pub fn is_detection(self) -> bool {
        !matches!(self, Verdict::NotDetected)
    }

    pub fn level(self) -> Option<usize> {
        match self {
            Verdict::Detected(m) => Some(m),
            _ => None,
        }
    }
}

/// Detector tolerances. `tol_det_base` is scaled per level by
/// `max(1, ||H||_inf^{m+1})` to keep rounding from faking detections at
/// higher orders.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectorConfig<T: Real> {
    pub m_max: usize,
    pub tol_det_base: T,
    pub tol_im: T,
    /// Entry tolerance for the ground-truth oracle cross-check.
    pub entry_tol: T,
}

pub const DEFAULT_M_MAX: usize = 3;
pub const MAX_M_MAX: usize = 6;
pub const DEFAULT_TOL_DET_BASE: f64 = 1e-12;
pub const DEFAULT_TOL_IM: f64 = 1e-10;

impl<T: Real> Default for DetectorConfig<T> {
    fn default() -> Self {
        Self {
            m_max: DEFAULT_M_MAX,
            tol_det_base: real(DEFAULT_TOL_DET_BASE),
            tol_im: real(DEFAULT_TOL_IM),
            entry_tol: real(1e-10),
        }
    }
}

impl<T: Real> DetectorConfig<T> {
    pub fn with_m_max(mut self, m_max: usize) -> Self {
        self.m_max = m_max;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.m_max < 1 || self.m_max > MAX_M_MAX {
            return Err(Error::ParameterOutOfRange {
                name: "m_max",
                value: self.m_max as f64,
                constraint: "1 <= m_max <= 6",
            });
        }
        Ok(())
    }

    /// Moments needed for the full hierarchy.
    pub fn moments_needed(&self) -> usize {
        2 * self.m_max + 1
    }
}

/// Full detector output: verdict, every Hankel level, the moments used, the
/// entry-oracle cross-check and the effective tolerances.
#[derive(Debug, Clone)]
pub struct DetectionReport<T: Real> {
    pub verdict: Verdict,
    pub levels: Vec<HankelReport<T>>,
    pub moments: MomentVector<T>,
    pub oracle: Option<OracleVerdict<T>>,
    pub m_max: usize,
    pub tol_det_base: T,
    pub tol_im: T,
}

impl<T: Real> DetectionReport<T> {
    /// One-line human-readable summary.
    pub fn summary(&self) -> String {
        let oracle = self
            .oracle
            .as_ref()
            .map(|o| format!(", oracle: {}", o.label()))
            .unwrap_or_default();
        match self.verdict {
            Verdict::Detected(m) => {
                let det = self
                    .levels
                    .iter()
                    .find(|l| l.level == m)
                    .map(|l| as_f64(l.determinant))
                    .unwrap_or(f64::NAN);
                format!(
                    "detected at level {m} (det H_{m} = {det:.6e} < 0){oracle}"
                )
            }
            Verdict::NonRealMoments => format!(
                "non-real moments (max |Im| = {:.3e} > tol {:.3e}): nonpositivity certified{oracle}",
                as_f64(self.moments.imaginary_residue(self.moments.len())),
                as_f64(self.tol_im),
            ),
            Verdict::NotDetected => format!(
                "not detected up to level {} (one-sided criterion; not a positivity proof){oracle}",
                self.m_max
            ),
        }
    }
}

/// Run the hierarchy on a moment vector.
///
/// Order of business: any non-real moment certifies nonpositivity outright;
/// otherwise levels 1..=m_max are scanned and the first negative determinant
/// (below its scale-aware threshold) wins. All levels are reported.
pub fn hierarchy_detect<T: Real>(
    moments: &MomentVector<T>,
    config: &DetectorConfig<T>,
) -> Result<DetectionReport<T>> {
    config.validate()?;
    let needed = config.moments_needed();
    if moments.len() < needed {
        return Err(Error::InsufficientMoments {
            level: config.m_max,
            needed,
            available: moments.len(),
        });
    }

    let mut levels = Vec::with_capacity(config.m_max);
    for m in 1..=config.m_max {
        levels.push(hankel_with_tol(moments, m, config.tol_det_base)?);
    }

    let verdict = if moments.imaginary_residue(needed) > config.tol_im {
        Verdict::NonRealMoments
    } else {
        levels
            .iter()
            .find(|l| l.determinant < -l.tol_det)
            .map_or(Verdict::NotDetected, |l| Verdict::Detected(l.level))
    };

    Ok(DetectionReport {
        verdict,
        levels,
        moments: moments.clone(),
        oracle: None,
        m_max: config.m_max,
        tol_det_base: config.tol_det_base,
        tol_im: config.tol_im,
    })
}

/// End-to-end KD nonpositivity detector: build the table, take moments, run
/// the hierarchy, attach the entry-oracle verdict as ground truth.
///
/// Soundness contract: a `Detected`/`NonRealMoments` verdict implies the
/// oracle is not `Positive`.
pub fn detect_kd_nonpositivity<T: Real>(
    rho: &DensityMatrix<T>,
    basis_a: &OrthonormalBasis<T>,
    basis_f: &OrthonormalBasis<T>,
    config: &DetectorConfig<T>,
) -> Result<DetectionReport<T>> {
    config.validate()?;
    let kd = kd_distribution(rho, basis_a, basis_f)?;
    let moments = kd_moments(&kd, config.moments_needed());
    let mut report = hierarchy_detect(&moments, config)?;
    report.oracle = Some(kd.nonpositivity_oracle(config.entry_tol));
    Ok(report)
}

/// Coherence detector over the chain (A, B, A) with B mutually unbiased to A
/// (hard precondition). A detection implies nonzero l1 coherence of rho in A.
pub fn detect_coherence<T: Real>(
    rho: &DensityMatrix<T>,
    basis_a: &OrthonormalBasis<T>,
    basis_b: &OrthonormalBasis<T>,
    config: &DetectorConfig<T>,
    mub_tol: T,
) -> Result<DetectionReport<T>> {
    config.validate()?;
    if !mub_check(basis_a, basis_b, mub_tol)? {
        return Err(Error::NotMub {
            deviation: as_f64(mub_deviation(basis_a, basis_b)?),
            tol: as_f64(mub_tol),
        });
    }
    let ext = extended_kd(rho, &[basis_a, basis_b, basis_a])?;
    let moments = extended_kd_moments(&ext, config.moments_needed());
    let mut report = hierarchy_detect(&moments, config)?;
    report.oracle = Some(ext.nonpositivity_oracle(config.entry_tol));
    Ok(report)
}

/// Work-nonclassicality detector on an MHQ table. A detection implies the
/// table's negativity is strictly positive.
pub fn detect_work_nonclassicality<T: Real>(
    table: &MhqDistribution<T>,
    config: &DetectorConfig<T>,
) -> Result<DetectionReport<T>> {
    config.validate()?;
    let moments = mhq_moments(table, config.moments_needed());
    let mut report = hierarchy_detect(&moments, config)?;
    report.oracle = Some(table.nonpositivity_oracle(config.entry_tol));
    let _ = negativity(table); // negativity is reported by callers; oracle carries the verdict
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::random_state_and_bases;
    use num_complex::Complex;

    type C = Complex<f64>;

    fn c(re: f64, im: f64) -> C {
        C::new(re, im)
    }

    fn moment_vec(entries: &[f64], n: usize) -> MomentVector<f64> {
        MomentVector::from_entries(
            entries.iter().map(|x| c(*x, 0.0)),
            n,
            MomentSource::Mhq,
        )
    }

    #[test]
    fn moments_of_example2_table() {
        let m = moment_vec(&[0.3, 0.6, -0.1, 0.2], 5);
        let expect = [1.0, 0.5, 0.25, 0.1394, 0.0805];
        for (n, e) in expect.iter().enumerate() {
            assert!((m.value(n + 1).re - e).abs() < 1e-12, "q_{}", n + 1);
        }
    }

    #[test]
    fn moments_of_uniform_table() {
        let m = moment_vec(&[1.0 / 16.0; 16], 4);
        for n in 1..=4 {
            let expect = 16.0f64.powi(1 - n as i32);
            assert!((m.value(n).re - expect).abs() < 1e-14);
        }
    }

    #[test]
    fn hankel_level_one_is_theorem_one() {
        let m = moment_vec(&[0.3, 0.6, -0.1, 0.2], 7);
        let h1 = hankel(&m, 1).unwrap();
        let q2 = m.value(2).re;
        let q3 = m.value(3).re;
        assert!((h1.determinant - (q3 - q2 * q2)).abs() < 1e-12);
        assert!(h1.determinant.abs() < 1e-12); // this table sits exactly on the level-1 boundary
    }

    #[test]
    fn hankel_level_two_of_example2() {
        let m = moment_vec(&[0.3, 0.6, -0.1, 0.2], 5);
        let h2 = hankel(&m, 2).unwrap();
        assert!((h2.determinant + 2.0736e-4).abs() < 1e-12);
    }

    #[test]
    fn delta_table_hankel_is_singular() {
        let m = moment_vec(&[1.0], 7);
        for level in 1..=3 {
            let h = hankel(&m, level).unwrap();
            for i in 0..=level {
                for j in 0..=level {
                    assert_eq!(h.matrix[(i, j)], 1.0);
                }
            }
            assert!(h.determinant.abs() < 1e-12);
        }
    }

    #[test]
    fn insufficient_moments_rejected() {
        let m = moment_vec(&[0.5, 0.5], 4);
        assert!(matches!(
            hankel(&m, 2),
            Err(Error::InsufficientMoments { needed: 5, .. })
        ));
    }

    #[test]
    fn hierarchy_detects_at_level_two_with_silent_level_one() {
        let m = moment_vec(&[0.3, 0.6, -0.1, 0.2], 7);
        let report = hierarchy_detect(&m, &DetectorConfig::default()).unwrap();
        assert_eq!(report.verdict, Verdict::Detected(2));
        assert!(report.levels[0].determinant >= -report.levels[0].tol_det);
    }

    #[test]
    fn positive_table_not_detected() {
        let m = moment_vec(&[0.25, 0.25, 0.25, 0.25], 7);
        let report = hierarchy_detect(&m, &DetectorConfig::default()).unwrap();
        assert_eq!(report.verdict, Verdict::NotDetected);
    }

    #[test]
    fn non_real_moments_short_circuit() {
        let m = MomentVector::from_entries(
            vec![c(0.5, 0.4), c(0.5, -0.1)].into_iter(),
            7,
            MomentSource::Kd,
        );
        let report = hierarchy_detect(&m, &DetectorConfig::default()).unwrap();
        assert_eq!(report.verdict, Verdict::NonRealMoments);
    }

    #[test]
    fn moments_are_permutation_invariant() {
        let a = moment_vec(&[0.3, 0.6, -0.1, 0.2], 7);
        let b = moment_vec(&[-0.1, 0.2, 0.6, 0.3], 7);
        for n in 1..=7 {
            assert!((a.value(n) - b.value(n)).norm() < 1e-15);
        }
        let ra = hierarchy_detect(&a, &DetectorConfig::default()).unwrap();
        let rb = hierarchy_detect(&b, &DetectorConfig::default()).unwrap();
        assert_eq!(ra.verdict, rb.verdict);
    }

    #[test]
    fn theorem_consistency_det_h1_vs_moment_formula() {
        for seed in 0..50 {
            let (rho, a, f) = random_state_and_bases::<f64>(3, seed).unwrap();
            let kd = kd_distribution(&rho, &a, &f).unwrap();
            let m = kd_moments(&kd, 7);
            let h1 = hankel(&m, 1).unwrap();
            let direct = m.value(3).re - m.value(2).re * m.value(2).re;
            assert!((h1.determinant - direct).abs() < 1e-12);
            assert!((m.value(1) - c(1.0, 0.0)).norm() < 1e-10);
        }
    }

    #[test]
    fn detector_soundness_on_random_inputs() {
        let config = DetectorConfig::default();
        for d in 2..=4 {
            for seed in 0..100 {
                let (rho, a, f) = random_state_and_bases::<f64>(d, seed).unwrap();
                let report = detect_kd_nonpositivity(&rho, &a, &f, &config).unwrap();
                if report.verdict.is_detection() {
                    assert!(
                        !report.oracle.as_ref().unwrap().is_positive(),
                        "false positive at d={d} seed={seed}"
                    );
                }
            }
        }
    }

    #[test]
    fn same_basis_inputs_never_detect() {
        let config = DetectorConfig::default();
        for d in 2..=4 {
            for seed in 0..30 {
                let (rho, a, _) = random_state_and_bases::<f64>(d, seed).unwrap();
                let report = detect_kd_nonpositivity(&rho, &a, &a, &config).unwrap();
                assert_eq!(report.verdict, Verdict::NotDetected, "d={d} seed={seed}");
                for l in &report.levels {
                    assert!(l.determinant >= -1e-10);
                }
            }
        }
    }

    #[test]
    fn m_max_out_of_range_rejected() {
        let m = moment_vec(&[0.5, 0.5], 20);
        let config = DetectorConfig::default().with_m_max(7);
        assert!(matches!(
            hierarchy_detect(&m, &config),
            Err(Error::ParameterOutOfRange { .. })
        ));
    }

    #[test]
    fn coherence_detector_requires_mub() {
        let (rho, a, _) = random_state_and_bases::<f64>(2, 4).unwrap();
        let result = detect_coherence(&rho, &a, &a, &DetectorConfig::default(), 1e-10);
        assert!(matches!(result, Err(Error::NotMub { .. })));
    }
}
