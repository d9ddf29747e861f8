//! JSON and CSV serialization (f64 concrete).
//!
//! Wire formats: complex numbers are `[re, im]` pairs, matrices are row-major
//! arrays of rows, bases are arrays of vectors. Floats render with 17
//! significant digits (`{:.16e}`), '.' decimal separator and '\n' line
//! endings, so repeated runs are byte-identical.

use std::fmt;

use num_complex::Complex;
use serde_json::{json, Value};

use crate::kd::{ExtendedKd, KdDistribution, MhqDistribution, OracleVerdict};
use crate::linalg::{ComplexMatrix, ComplexVector};
use crate::moments::{DetectionReport, Verdict};
use crate::scenarios::CheckOutcome;
use crate::work::WorkDistribution;

pub const REPORT_SCHEMA_VERSION: u32 = 1;

/// Structural input problem, located by a JSON pointer.
#[derive(Debug, Clone)]
pub struct SchemaError {
    pub pointer: String,
    pub message: String,
}

impl SchemaError {
    fn new(pointer: &str, message: impl Into<String>) -> Self {
        Self {
            pointer: pointer.to_string(),
            message: message.into(),
        }
    }
}

impl fmt::Display for SchemaError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "schema error at {}: {}", self.pointer, self.message)
    }
}

impl std::error::Error for SchemaError {}

type C64 = Complex<f64>;

fn parse_number(v: &Value, pointer: &str) -> Result<f64, SchemaError> {
    let x = v
        .as_f64()
        .ok_or_else(|| SchemaError::new(pointer, "expected a number"))?;
    if !x.is_finite() {
        return Err(SchemaError::new(pointer, "number must be finite"));
    }
    Ok(x)
}

/// `[re, im]` pair.
pub fn parse_complex(v: &Value, pointer: &str) -> Result<C64, SchemaError> {
    let pair = v
        .as_array()
        .ok_or_else(|| SchemaError::new(pointer, "expected [re, im] pair"))?;
    if pair.len() != 2 {
        return Err(SchemaError::new(
            pointer,
            format!("expected 2 components, got {}", pair.len()),
        ));
    }
    let re = parse_number(&pair[0], &format!("{pointer}/0"))?;
    let im = parse_number(&pair[1], &format!("{pointer}/1"))?;
    Ok(C64::new(re, im))
}

/// Row-major matrix of `[re, im]` pairs. Must be square here; every consumer
/// of this schema takes square matrices.
pub fn parse_matrix(v: &Value, pointer: &str) -> Result<ComplexMatrix<f64>, SchemaError> {
    let rows = v
        .as_array()
        .ok_or_else(|| SchemaError::new(pointer, "expected an array of rows"))?;
    if rows.is_empty() {
        return Err(SchemaError::new(pointer, "matrix must be non-empty"));
    }
    let d = rows.len();
    let mut out = ComplexMatrix::zeros(d, d);
    for (i, row) in rows.iter().enumerate() {
        let row_ptr = format!("{pointer}/{i}");
        let cells = row
            .as_array()
            .ok_or_else(|| SchemaError::new(&row_ptr, "expected an array of [re, im] pairs"))?;
        if cells.len() != d {
            return Err(SchemaError::new(
                &row_ptr,
                format!("expected {d} columns, got {}", cells.len()),
            ));
        }
        for (j, cell) in cells.iter().enumerate() {
            out[(i, j)] = parse_complex(cell, &format!("{row_ptr}/{j}"))?;
        }
    }
    Ok(out)
}

/// Array of vectors, each an array of `[re, im]` pairs.
pub fn parse_vectors(v: &Value, pointer: &str) -> Result<Vec<ComplexVector<f64>>, SchemaError> {
    let vectors = v
        .as_array()
        .ok_or_else(|| SchemaError::new(pointer, "expected an array of vectors"))?;
    if vectors.is_empty() {
        return Err(SchemaError::new(pointer, "basis must be non-empty"));
    }
    let mut out = Vec::with_capacity(vectors.len());
    for (k, vec) in vectors.iter().enumerate() {
        let vec_ptr = format!("{pointer}/{k}");
        let cells = vec
            .as_array()
            .ok_or_else(|| SchemaError::new(&vec_ptr, "expected an array of [re, im] pairs"))?;
        let mut amplitudes = Vec::with_capacity(cells.len());
        for (j, cell) in cells.iter().enumerate() {
            amplitudes.push(parse_complex(cell, &format!("{vec_ptr}/{j}"))?);
        }
        out.push(ComplexVector::new(amplitudes));
    }
    Ok(out)
}

/// Required object field.
pub fn field<'a>(v: &'a Value, name: &str, pointer: &str) -> Result<&'a Value, SchemaError> {
    v.as_object()
        .ok_or_else(|| SchemaError::new(pointer, "expected an object"))?
        .get(name)
        .ok_or_else(|| SchemaError::new(&format!("{pointer}/{name}"), "missing required field"))
}

/// Raw detect-mode inputs (semantic validation happens in the caller, where
/// tolerance flags live).
#[derive(Debug, Clone)]
pub enum DetectInput {
    Kd {
        rho: ComplexMatrix<f64>,
        basis_a: Vec<ComplexVector<f64>>,
        basis_f: Vec<ComplexVector<f64>>,
    },
    Coherence {
        rho: ComplexMatrix<f64>,
        basis_a: Vec<ComplexVector<f64>>,
        basis_b: Vec<ComplexVector<f64>>,
    },
    Work {
        rho: ComplexMatrix<f64>,
        h_initial: ComplexMatrix<f64>,
        h_final: ComplexMatrix<f64>,
        unitary: ComplexMatrix<f64>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DetectMode {
    Kd,
    Coherence,
    Work,
}

impl DetectMode {
    pub fn label(self) -> &'static str {
        match self {
            DetectMode::Kd => "kd",
            DetectMode::Coherence => "coherence",
            DetectMode::Work => "work",
        }
    }
}

/// Parse a detect-mode input document.
pub fn parse_detect_input(text: &str, mode: DetectMode) -> Result<DetectInput, SchemaError> {
    let root: Value = serde_json::from_str(text)
        .map_err(|e| SchemaError::new("", format!("invalid JSON: {e}")))?;
    let rho = parse_matrix(field(&root, "rho", "")?, "/rho")?;
    match mode {
        DetectMode::Kd => Ok(DetectInput::Kd {
            rho,
            basis_a: parse_vectors(field(&root, "basis_a", "")?, "/basis_a")?,
            basis_f: parse_vectors(field(&root, "basis_f", "")?, "/basis_f")?,
        }),
        DetectMode::Coherence => Ok(DetectInput::Coherence {
            rho,
            basis_a: parse_vectors(field(&root, "basis_a", "")?, "/basis_a")?,
            basis_b: parse_vectors(field(&root, "basis_b", "")?, "/basis_b")?,
        }),
        DetectMode::Work => Ok(DetectInput::Work {
            rho,
            h_initial: parse_matrix(field(&root, "h_initial", "")?, "/h_initial")?,
            h_final: parse_matrix(field(&root, "h_final", "")?, "/h_final")?,
            unitary: parse_matrix(field(&root, "unitary", "")?, "/unitary")?,
        }),
    }
}

/// 17 significant digits, stable across runs.
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

fn complex_json(z: C64) -> Value {
    json!([z.re, z.im])
}

fn verdict_json(verdict: Verdict) -> Value {
    match verdict {
        Verdict::Detected(level) => json!({ "kind": "detected", "level": level }),
        Verdict::NotDetected => json!({ "kind": "not-detected" }),
        Verdict::NonRealMoments => json!({ "kind": "non-real-moments" }),
    }
}

fn oracle_json(oracle: &OracleVerdict<f64>) -> Value {
    let witnesses = |ws: &[crate::kd::Witness<f64>]| -> Value {
        Value::Array(
            ws.iter()
                .map(|w| json!({ "index": w.index, "value": complex_json(w.value) }))
                .collect(),
        )
    };
    match oracle {
        OracleVerdict::Positive => json!({ "verdict": "positive" }),
        OracleVerdict::NegativeReal(ws) => {
            json!({ "verdict": "negative-real", "witnesses": witnesses(ws) })
        }
        OracleVerdict::NonReal(ws) => {
            json!({ "verdict": "non-real", "witnesses": witnesses(ws) })
        }
    }
}

/// Detection report as schema-versioned JSON: verdict, per-level
/// determinants, moments, oracle cross-check and the effective tolerances.
pub fn detection_report_json(report: &DetectionReport<f64>) -> Value {
    let levels: Vec<Value> = report
        .levels
        .iter()
        .map(|l| {
            json!({
                "level": l.level,
                "determinant": l.determinant,
                "tol_det": l.tol_det,
                "imaginary_residue": l.imaginary_residue,
            })
        })
        .collect();
    let moments: Vec<Value> = report
        .moments
        .values()
        .iter()
        .map(|z| complex_json(*z))
        .collect();
    json!({
        "schema_version": REPORT_SCHEMA_VERSION,
        "verdict": verdict_json(report.verdict),
        "levels": levels,
        "moments": { "source": report.moments.source().label(), "values": moments },
        "oracle": report.oracle.as_ref().map(oracle_json),
        "tolerances": {
            "m_max": report.m_max,
            "tol_det_base": report.tol_det_base,
            "tol_im": report.tol_im,
        },
        "summary": report.summary(),
    })
}

/// Scenario reproduction report: parameters, per-quantity comparisons, and
/// whether everything landed within tolerance.
pub fn scenario_report_json(
    name: &str,
    parameters: &[(&str, f64)],
    outcomes: &[CheckOutcome],
    detection: Option<&DetectionReport<f64>>,
) -> Value {
    let params: Value = parameters
        .iter()
        .map(|(k, v)| ((*k).to_string(), json!(v)))
        .collect::<serde_json::Map<String, Value>>()
        .into();
    let checks: Vec<Value> = outcomes
        .iter()
        .map(|o| {
            json!({
                "quantity": o.quantity,
                "provenance": o.provenance.label(),
                "tolerance": o.tolerance,
                "deviation": o.deviation,
                "pass": o.pass,
                "expected": o.expected,
                "computed": o.computed,
            })
        })
        .collect();
    json!({
        "schema_version": REPORT_SCHEMA_VERSION,
        "scenario": name,
        "parameters": params,
        "checks": checks,
        "all_pass": outcomes.iter().all(|o| o.pass),
        "detection": detection.map(detection_report_json),
    })
}

/// KD table as JSON (complex entries as [re, im]).
pub fn kd_table_json(kd: &KdDistribution<f64>) -> Value {
    let (rows, cols) = kd.dims();
    let entries: Vec<Value> = (0..rows)
        .map(|i| Value::Array((0..cols).map(|j| complex_json(kd.entry(i, j))).collect()))
        .collect();
    json!({
        "basis_a": kd.basis_a_label(),
        "basis_f": kd.basis_f_label(),
        "entries": entries,
    })
}

/// KD table as CSV: i, j, re, im.
pub fn kd_table_csv(kd: &KdDistribution<f64>) -> String {
    let (rows, cols) = kd.dims();
    let mut out = String::from("i,j,re,im\n");
    for i in 0..rows {
        for j in 0..cols {
            let z = kd.entry(i, j);
            out.push_str(&format!(
                "{i},{j},{},{}\n",
                format_float(z.re),
                format_float(z.im)
            ));
        }
    }
    out
}

/// Extended table as CSV: one index column per chain slot, then re, im.
pub fn extended_table_csv(ext: &ExtendedKd<f64>) -> String {
    let k = ext.chain_len();
    let mut out = String::new();
    for r in 0..k {
        out.push_str(&format!("i{r},"));
    }
    out.push_str("re,im\n");
    let d = ext.dim();
    let total = ext.flat_entries().len();
    for flat in 0..total {
        let mut rem = flat;
        let mut idx = vec![0usize; k];
        for r in (0..k).rev() {
            idx[r] = rem % d;
            rem /= d;
        }
        for i in &idx {
            out.push_str(&format!("{i},"));
        }
        let z = ext.flat_entries()[flat];
        out.push_str(&format!("{},{}\n", format_float(z.re), format_float(z.im)));
    }
    out
}

/// MHQ table as CSV: i, j, value.
pub fn mhq_table_csv(table: &MhqDistribution<f64>) -> String {
    let (rows, cols) = table.dims();
    let mut out = String::from("i,j,value\n");
    for i in 0..rows {
        for j in 0..cols {
            out.push_str(&format!("{i},{j},{}\n", format_float(table.entry(i, j))));
        }
    }
    out
}

/// Work distribution as CSV: w, weight.
pub fn work_distribution_csv(dist: &WorkDistribution<f64>) -> String {
    let mut out = String::from("w,weight\n");
    for atom in dist.atoms() {
        out.push_str(&format!(
            "{},{}\n",
            format_float(atom.work),
            format_float(atom.weight)
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kd::kd_distribution;
    use crate::linalg::random_state_and_bases;
    use crate::moments::{detect_kd_nonpositivity, DetectorConfig};
    use crate::scalar::default_tol;
    use crate::linalg::{DensityMatrix, OrthonormalBasis};

    #[test]
    fn parse_complex_pair() {
        let v: Value = serde_json::from_str("[1.5, -0.25]").unwrap();
        assert_eq!(parse_complex(&v, "/x").unwrap(), C64::new(1.5, -0.25));
    }

    #[test]
    fn schema_errors_carry_pointers() {
        let v: Value = serde_json::from_str(r#"{"rho": [[[0.5, 0.0], [0.0]], [[0.0,0.0],[0.5,0.0]]]}"#).unwrap();
        let err = parse_matrix(field(&v, "rho", "").unwrap(), "/rho").unwrap_err();
        assert_eq!(err.pointer, "/rho/0/1");

        let err = parse_detect_input("{}", DetectMode::Kd).unwrap_err();
        assert_eq!(err.pointer, "/rho");

        let err = parse_detect_input("not json", DetectMode::Kd).unwrap_err();
        assert!(err.message.contains("invalid JSON"));
    }

    #[test]
    fn non_finite_rejected() {
        let v: Value = serde_json::from_str("[1.0, 2.0]").unwrap();
        assert!(parse_complex(&v, "/x").is_ok());
        // JSON has no literal NaN/inf; huge exponents become inf on parse.
        let v: Value = serde_json::from_str("[1.0e999, 0.0]").unwrap_or(Value::Null);
        if !v.is_null() {
            assert!(parse_complex(&v, "/x").is_err());
        }
    }

    #[test]
    fn float_format_is_17_significant_digits() {
        assert_eq!(format_float(0.25), "2.5000000000000000e-1");
        assert_eq!(format_float(-2.0736e-4), "-2.0736000000000000e-4");
    }

    #[test]
    fn report_json_round_trips_structurally() {
        let (rho, a, f) = random_state_and_bases::<f64>(2, 3).unwrap();
        let report = detect_kd_nonpositivity(&rho, &a, &f, &DetectorConfig::default()).unwrap();
        let v = detection_report_json(&report);
        assert_eq!(v["schema_version"], REPORT_SCHEMA_VERSION);
        assert_eq!(v["levels"].as_array().unwrap().len(), 3);
        assert!(v["oracle"].is_object());
    }

    #[test]
    fn csv_headers_and_rows() {
        let rho = DensityMatrix::maximally_mixed(2);
        let a = OrthonormalBasis::computational(2);
        let kd = kd_distribution(&rho, &a, &a).unwrap();
        let csv = kd_table_csv(&kd);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "i,j,re,im");
        assert_eq!(lines.len(), 5);

        let wire = kd_table_json(&kd);
        assert_eq!(wire["entries"][0][0][0], 0.5);
    }

    #[test]
    fn detect_input_kd_parses() {
        let text = r#"{
            "rho": [[[0.5,0.0],[0.0,0.0]],[[0.0,0.0],[0.5,0.0]]],
            "basis_a": [[[1.0,0.0],[0.0,0.0]],[[0.0,0.0],[1.0,0.0]]],
            "basis_f": [[[0.7071067811865476,0.0],[0.7071067811865476,0.0]],
                        [[0.7071067811865476,0.0],[-0.7071067811865476,0.0]]]
        }"#;
        let input = parse_detect_input(text, DetectMode::Kd).unwrap();
        match input {
            DetectInput::Kd { rho, basis_a, basis_f } => {
                assert_eq!(rho.rows(), 2);
                assert_eq!(basis_a.len(), 2);
                assert_eq!(basis_f.len(), 2);
            }
            _ => panic!("wrong variant"),
        }
        let _ = default_tol::<f64>();
    }
}
