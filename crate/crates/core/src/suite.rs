//! Seeded random property suite (f64).
//!
//! One deterministic pass over (dim, trial) cases checking table
//! normalization, Born-rule marginals, reconstruction round-trips, the
//! weak-value expectation identity and detector soundness against the entry
//! oracle, plus classical degeneration (A = F and diagonal-state inputs must
//! never trigger detections). Every violation carries the replayable seed.

use num_complex::Complex;

use crate::error::Result;
use crate::kd::{
    extended_kd, kd_distribution, marginals, mhq, reconstruct_state, total_nonpositivity,
    weak_values, expectation_via_kd,
};
use crate::linalg::{
    random_state_and_bases, ComplexMatrix, DensityMatrix, HermitianObservable, OrthonormalBasis,
};
use crate::moments::{detect_kd_nonpositivity, extended_kd_moments, DetectorConfig};
use crate::scalar::default_tol;

type C64 = Complex<f64>;

#[derive(Debug, Clone)]
pub struct SuiteConfig {
    pub seed: u64,
    pub dims: Vec<usize>,
    pub trials: usize,
    /// Trials for the classical-degeneration checks.
    pub classical_trials: usize,
    pub tol_norm: f64,
    pub tol_marginal: f64,
    pub tol_reconstruct: f64,
    /// Round-trips are only asserted when the smallest basis overlap
    /// exceeds this floor.
    pub overlap_min: f64,
    pub tol_weak: f64,
    pub detector: DetectorConfig<f64>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            seed: 1,
            dims: vec![2, 3, 4],
            trials: 1000,
            classical_trials: 100,
            tol_norm: 1e-10,
            tol_marginal: 1e-10,
            tol_reconstruct: 1e-8,
            overlap_min: 1e-4,
            tol_weak: 1e-10,
            detector: DetectorConfig::default(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Violation {
    pub check: &'static str,
    pub dim: usize,
    pub seed: u64,
    pub detail: String,
}

#[derive(Debug, Clone)]
pub struct CheckStats {
    pub name: &'static str,
    pub trials: usize,
    pub skipped: usize,
    /// Worst deviation observed across passing and failing cases.
    pub worst: f64,
    pub violations: usize,
}

#[derive(Debug, Clone)]
pub struct SuiteReport {
    pub checks: Vec<CheckStats>,
    /// First violations, capped; `total_violations` counts all.
    pub violations: Vec<Violation>,
    pub total_violations: usize,
}

impl SuiteReport {
    pub fn pass(&self) -> bool {
        self.total_violations == 0
    }

    /// Stable multi-line summary, one line per check.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            out.push_str(&format!(
                "{:<24} trials={:<6} skipped={:<5} worst={:.3e} violations={}\n",
                c.name, c.trials, c.skipped, c.worst, c.violations
            ));
        }
        for v in &self.violations {
            out.push_str(&format!(
                "VIOLATION {} dim={} seed={} {}\n",
                v.check, v.dim, v.seed, v.detail
            ));
        }
        out.push_str(&format!(
            "total violations: {}\n",
            self.total_violations
        ));
        out
    }
}

const MAX_LISTED_VIOLATIONS: usize = 20;

struct Recorder {
    stats: CheckStats,
    violations: Vec<Violation>,
}

impl Recorder {
    fn new(name: &'static str) -> Self {
        Self {
            stats: CheckStats {
                name,
                trials: 0,
                skipped: 0,
                worst: 0.0,
                violations: 0,
            },
            violations: Vec::new(),
        }
    }

    fn observe(&mut self, dim: usize, seed: u64, deviation: f64, tol: f64, detail: &str) {
        self.stats.trials += 1;
        if deviation.is_nan() || deviation > self.stats.worst {
            self.stats.worst = deviation;
        }
        if !(deviation <= tol) {
            self.stats.violations += 1;
            if self.violations.len() < MAX_LISTED_VIOLATIONS {
                self.violations.push(Violation {
                    check: self.stats.name,
                    dim,
                    seed,
                    detail: format!("{detail}: deviation {deviation:.3e} > tol {tol:.3e}"),
                });
            }
        }
    }

    fn fail(&mut self, dim: usize, seed: u64, detail: String) {
        self.stats.trials += 1;
        self.stats.violations += 1;
        if self.violations.len() < MAX_LISTED_VIOLATIONS {
            self.violations.push(Violation {
                check: self.stats.name,
                dim,
                seed,
                detail,
            });
        }
    }

    fn skip(&mut self) {
        self.stats.trials += 1;
        self.stats.skipped += 1;
    }
}

fn case_seed(base: u64, dim: usize, trial: usize) -> u64 {
    base.wrapping_add((dim as u64).wrapping_mul(1_000_003))
        .wrapping_add(trial as u64)
}

/// Run the full suite. Deterministic for a given config.
pub fn run_suite(config: &SuiteConfig) -> Result<SuiteReport> {
    let mut normalization = Recorder::new("normalization");
    let mut marginal = Recorder::new("marginals-born");
    let mut reconstruction = Recorder::new("reconstruction");
    let mut weak = Recorder::new("weak-value-identity");
    let mut soundness = Recorder::new("detector-soundness");
    let mut classical = Recorder::new("classical-degeneration");
    let mut positive_tables = Recorder::new("positive-table-dets");

    for &dim in &config.dims {
        for trial in 0..config.trials {
            let seed = case_seed(config.seed, dim, trial);
            let (rho, basis_a, basis_f) = random_state_and_bases::<f64>(dim, seed)?;
            let kd = kd_distribution(&rho, &basis_a, &basis_f)?;

            // Normalization of KD, a 3-chain, and the MHQ table.
            let kd_gap = (kd.total() - C64::new(1.0, 0.0)).norm();
            let ext = extended_kd(&rho, &[&basis_a, &basis_f, &basis_a])?;
            let ext_gap = (ext.total() - C64::new(1.0, 0.0)).norm();
            let mhq_gap = (mhq(&kd).total() - 1.0).abs();
            normalization.observe(
                dim,
                seed,
                kd_gap.max(ext_gap).max(mhq_gap),
                config.tol_norm,
                "sum of entries vs 1",
            );

            // Marginals against the Born rule.
            match marginals(&kd, config.tol_marginal) {
                Ok((row, col)) => {
                    let mut worst: f64 = 0.0;
                    for i in 0..dim {
                        let born = rho.sandwich(basis_a.vector(i), basis_a.vector(i)).re;
                        worst = worst.max((row[i] - born).abs());
                    }
                    for j in 0..dim {
                        let born = rho.sandwich(basis_f.vector(j), basis_f.vector(j)).re;
                        worst = worst.max((col[j] - born).abs());
                    }
                    marginal.observe(dim, seed, worst, config.tol_marginal, "marginal vs Born");
                }
                Err(e) => marginal.fail(dim, seed, format!("marginal not real: {e}")),
            }

            // Reconstruction round-trip, gated on the overlap floor.
            let min_overlap = (0..dim)
                .flat_map(|i| (0..dim).map(move |j| (i, j)))
                .map(|(i, j)| basis_f.vector(j).inner(basis_a.vector(i)).norm())
                .fold(f64::INFINITY, f64::min);
            if min_overlap > config.overlap_min {
                match reconstruct_state(&kd, &basis_a, &basis_f, 1e-8, 1e-4) {
                    Ok(rebuilt) => {
                        let gap = rebuilt.matrix().sub(rho.matrix()).max_abs();
                        reconstruction.observe(
                            dim,
                            seed,
                            gap,
                            config.tol_reconstruct,
                            "round-trip max entry gap",
                        );
                    }
                    Err(e) => reconstruction.fail(dim, seed, format!("reconstruction failed: {e}")),
                }
            } else {
                reconstruction.skip();
            }

            // Weak-value expectation identity with a deterministic
            // indefinite observable.
            let (probe, _, _) = random_state_and_bases::<f64>(dim, seed ^ 0x5eed_cafe)?;
            let mut obs_matrix = probe.matrix().scale(C64::new(3.0, 0.0));
            for k in 0..dim {
                obs_matrix[(k, k)] = obs_matrix[(k, k)] - C64::new(0.7, 0.0);
            }
            let observable = HermitianObservable::new(obs_matrix, default_tol())?;
            if min_overlap > 1e-8 {
                let wv = weak_values(&observable, &basis_a, &basis_f, 1e-8)?;
                let lhs = expectation_via_kd(&kd, &wv);
                let rhs = observable.matrix().mul(rho.matrix()).trace();
                weak.observe(
                    dim,
                    seed,
                    (lhs - rhs).norm(),
                    config.tol_weak,
                    "sum Q O^w vs trace",
                );
            } else {
                weak.skip();
            }

            // Detector soundness: a detection must be backed by the oracle.
            let report = detect_kd_nonpositivity(&rho, &basis_a, &basis_f, &config.detector)?;
            if report.verdict.is_detection() {
                let oracle_positive = report
                    .oracle
                    .as_ref()
                    .map(|o| o.is_positive())
                    .unwrap_or(true);
                if oracle_positive {
                    soundness.fail(
                        dim,
                        seed,
                        format!("verdict {:?} but oracle says positive", report.verdict),
                    );
                } else {
                    soundness.observe(dim, seed, 0.0, 1.0, "detection backed by oracle");
                }
            } else {
                soundness.observe(dim, seed, 0.0, 1.0, "no detection");
            }
        }

        // Classical degeneration: A = F and diagonal-in-A states.
        for trial in 0..config.classical_trials {
            let seed = case_seed(config.seed ^ 0xc1a5_51ca, dim, trial);
            let (rho, basis_a, basis_f) = random_state_and_bases::<f64>(dim, seed)?;
            let report = detect_kd_nonpositivity(&rho, &basis_a, &basis_a, &config.detector)?;
            if report.verdict.is_detection() {
                classical.fail(
                    dim,
                    seed,
                    format!("A = F input detected: {:?}", report.verdict),
                );
            } else {
                classical.observe(dim, seed, 0.0, 1.0, "A = F stays undetected");
            }

            // Dephased state: diagonal in A, arbitrary F; the table is a
            // genuine probability distribution, so all determinants must be
            // nonnegative up to tolerance.
            let mut diag = ComplexMatrix::zeros(dim, dim);
            for i in 0..dim {
                let p = rho.sandwich(basis_a.vector(i), basis_a.vector(i)).re;
                let v = basis_a.vector(i);
                diag = diag.add(&v.outer(v).scale(C64::new(p, 0.0)));
            }
            let dephased = DensityMatrix::new(diag, 1e-8)?;
            let report = detect_kd_nonpositivity(&dephased, &basis_a, &basis_f, &config.detector)?;
            let oracle_ok = report
                .oracle
                .as_ref()
                .map(|o| o.is_positive())
                .unwrap_or(false);
            let min_det = report
                .levels
                .iter()
                .map(|l| l.determinant)
                .fold(f64::INFINITY, f64::min);
            if !oracle_ok {
                positive_tables.fail(dim, seed, "dephased table not oracle-positive".into());
            } else {
                positive_tables.observe(
                    dim,
                    seed,
                    (-min_det).max(0.0),
                    1e-10,
                    "min Hankel det of a positive table",
                );
            }
        }
    }

    // Coherence-side sanity on a small grid: the chain total-nonpositivity
    // of an unbiased middle basis must match the l1 coherence (checked to
    // the marginal tolerance).
    let mut coherence_identity = Recorder::new("coherence-identity");
    for &dim in &config.dims {
        let trials = config.classical_trials.min(100);
        for trial in 0..trials {
            let seed = case_seed(config.seed ^ 0xc0_4e7e, dim, trial);
            let (rho, _, _) = random_state_and_bases::<f64>(dim, seed)?;
            let basis_a = OrthonormalBasis::computational(dim);
            let basis_b = crate::linalg::fourier_basis::<f64>(dim);
            let ext = extended_kd(&rho, &[&basis_a, &basis_b, &basis_a])?;
            let lhs = total_nonpositivity(ext.flat_entries());
            let rhs = crate::kd::l1_coherence(&rho, &basis_a);
            coherence_identity.observe(dim, seed, (lhs - rhs).abs(), config.tol_marginal, "sum|Q*|-1 vs l1");
            let _ = extended_kd_moments(&ext, 3);
        }
    }

    let recorders = vec![
        normalization,
        marginal,
        reconstruction,
        weak,
        soundness,
        classical,
        positive_tables,
        coherence_identity,
    ];
    let mut checks = Vec::new();
    let mut violations = Vec::new();
    let mut total = 0;
    for r in recorders {
        total += r.stats.violations;
        checks.push(r.stats);
        violations.extend(r.violations);
    }
    violations.truncate(MAX_LISTED_VIOLATIONS);
    Ok(SuiteReport {
        checks,
        violations,
        total_violations: total,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_suite_passes() {
        let config = SuiteConfig {
            trials: 25,
            classical_trials: 10,
            ..SuiteConfig::default()
        };
        let report = run_suite(&config).unwrap();
        assert!(report.pass(), "{}", report.render());
    }

    #[test]
    fn suite_is_deterministic() {
        let config = SuiteConfig {
            trials: 5,
            classical_trials: 3,
            ..SuiteConfig::default()
        };
        let a = run_suite(&config).unwrap().render();
        let b = run_suite(&config).unwrap().render();
        assert_eq!(a, b);
    }

    #[test]
    fn negative_tolerance_forces_violations() {
        // Harness self-test: impossible tolerances must be reported, not
        // swallowed.
        let config = SuiteConfig {
            trials: 3,
            classical_trials: 1,
            tol_norm: -1.0,
            ..SuiteConfig::default()
        };
        let report = run_suite(&config).unwrap();
        assert!(!report.pass());
        assert!(report.violations.iter().any(|v| v.check == "normalization"));
        assert!(report.render().contains("seed="));
    }
}
