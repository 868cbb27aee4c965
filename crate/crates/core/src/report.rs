//! JSON reports behind the `slfol` subcommands.
//!
//! Each builder returns an [`Outcome`] whose `passed` flag maps to exit code
//! 0 or 3, or a [`ReportError`] for unusable input (exit code 2).

use std::path::Path;

use serde_json::{json, Value};
use thiserror::Error;

use crate::algebra::{build_structure_table, dims, BasisIndex};
use crate::foliation::{check_equivariance, check_mc, consistency_deviation};
use crate::group::{
    chart_len, factor_split, iwasawa_sl2, iwasawa_sln, iwasawa_sln_right, GroupError,
};
use crate::io::{parse_matrix, CochainFile, IoError, SpecFile};
use crate::linalg::{FMatrix, Rational, Tolerances};
use crate::tischler::{
    check_submersion, fiber_census, generic_values, integrate_to_circle, pipeline_sln,
    rationalize_exact, PipelineConfig, RationalizeConfig, TischlerError,
};

#[derive(Debug, Error)]
pub enum ReportError {
    #[error(transparent)]
    Io(#[from] IoError),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error("{0}")]
    Input(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub report: Value,
    pub passed: bool,
}

impl Outcome {
    /// Pretty JSON with a trailing newline; the golden-file format.
    pub fn render(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.report).expect("JSON values serialize");
        s.push('\n');
        s
    }

    pub fn exit_code(&self) -> i32 {
        if self.passed {
            0
        } else {
            3
        }
    }
}

fn rationals(xs: &[Rational]) -> Vec<String> {
    xs.iter().map(ToString::to_string).collect()
}

fn matrix_json(m: &FMatrix) -> Value {
    json!(m.rows())
}

fn pair_labels(pairs: &[(BasisIndex, BasisIndex)]) -> Vec<String> {
    pairs
        .iter()
        .map(|(x, y)| format!("{}×{}", x.label(), y.label()))
        .collect()
}

/// Exact structure-table audit of sl(n).
pub fn verify_brackets(n: usize) -> Result<Outcome, ReportError> {
    let (h, off, total) = dims(n).map_err(|e| ReportError::Input(e.to_string()))?;
    let table = build_structure_table(n).map_err(|e| ReportError::Input(e.to_string()))?;
    let antisym = table.antisymmetry_violations();
    let jacobi = table.jacobi_violations();
    let (checked, offdiag) = table
        .offdiag_identity_violations()
        .map_err(|e| ReportError::Input(e.to_string()))?;
    let passed = antisym.is_empty() && jacobi.is_empty() && offdiag.is_empty();
    let jacobi_labels: Vec<String> = jacobi
        .iter()
        .take(20)
        .map(|(x, y, z)| format!("{},{},{}", x.label(), y.label(), z.label()))
        .collect();
    Ok(Outcome {
        report: json!({
            "n": n,
            "dims": {"cartan": h, "off_diagonal": off, "total": total},
            "chart_len": chart_len(n),
            "antisymmetry_violations": pair_labels(&antisym),
            "jacobi_triples": total * total * total,
            "jacobi_violations": jacobi.len(),
            "jacobi_examples": jacobi_labels,
            "offdiag_identities": {"checked": checked, "violations": pair_labels(&offdiag)},
            "passed": passed,
            "table": table.to_json(),
        }),
        passed,
    })
}

/// Iwasawa factors of a unimodular matrix, plus the GA x S^1 split for n = 2.
pub fn decompose(text: &str, tol: &Tolerances) -> Result<Outcome, ReportError> {
    let g = parse_matrix(text)?.to_float();
    let kan = iwasawa_sln(&g, tol)?;
    let kan_error = kan.recompose()?.max_abs_diff(&g);
    let ank = iwasawa_sln_right(&g, tol)?;
    let ank_error = ank.recompose()?.max_abs_diff(&g);
    let split = factor_split(g.dim())?;
    let g1: Vec<f64> = split.g1_coords.iter().map(|&i| ank.chart[i]).collect();
    let g2: Vec<f64> = split.g2_coords.iter().map(|&i| ank.chart[i]).collect();
    let passed = kan_error <= tol.residual_tol && ank_error <= tol.residual_tol;
    let mut report = json!({
        "n": g.dim(),
        "k": matrix_json(&kan.k),
        "chart": kan.chart,
        "recompose_error": kan_error,
        "right": {"k": matrix_json(&ank.k), "chart": ank.chart, "recompose_error": ank_error},
        "split": {"g1": g1, "g2": g2},
        "passed": passed,
    });
    if g.dim() == 2 {
        let (b, theta) = iwasawa_sl2(&g, tol)?;
        report["affine_circle"] = json!({"a": b.a(), "b": b.b(), "theta": theta.theta()});
    }
    Ok(Outcome { report, passed })
}

/// Flatness, surjectivity, equivariance and developing/cochain consistency.
pub fn check_foliation(text: &str, tol: &Tolerances) -> Result<Outcome, ReportError> {
    let file: SpecFile = serde_json::from_str(text).map_err(IoError::from)?;
    let spec = file.build_unchecked()?;
    let mc = check_mc(&spec, tol).map_err(IoError::from)?;
    let eq = check_equivariance(&spec).map_err(IoError::from)?;
    let consistency = consistency_deviation(&spec).map_err(IoError::from)?;
    let passed = mc.passed() && eq.passed(tol.residual_tol) && consistency <= tol.residual_tol;
    Ok(Outcome {
        report: json!({
            "group": spec.tag().to_string(),
            "maurer_cartan": mc,
            "equivariance": eq,
            "consistency_deviation": consistency,
            "passed": passed,
        }),
        passed,
    })
}

fn failure(stage: &str, error: &TischlerError) -> Result<Outcome, ReportError> {
    if let TischlerError::InvalidConfig(msg) = error {
        return Err(ReportError::Input(msg.clone()));
    }
    Ok(Outcome {
        report: json!({"passed": false, "stage": stage, "error": error.to_string()}),
        passed: false,
    })
}

/// Rationalize, integrate to the circle, check submersion and census fibers.
pub fn tischler(text: &str, epsilon: f64, tol: &Tolerances) -> Result<Outcome, ReportError> {
    let (complex, w) = CochainFile::parse(text)?;
    let cfg = RationalizeConfig {
        epsilon,
        ..RationalizeConfig::default()
    };
    let r = match rationalize_exact(&complex, &w, &cfg, tol) {
        Ok(r) => r,
        Err(e) => return failure("rationalize", &e),
    };
    let map = match integrate_to_circle(&complex, &r.cochain) {
        Ok(m) => m,
        Err(e) => return failure("integrate", &e),
    };
    let submersion = match check_submersion(&complex, &r.cochain, 0.0) {
        Ok(s) => s,
        Err(e) => return failure("submersion", &e),
    };
    let values = generic_values(&map, 10);
    let mut census = Vec::with_capacity(values.len());
    for v in &values {
        match fiber_census(&complex, &map, v) {
            Ok(c) => census.push(json!({"value": v.to_string(), "components": c.components})),
            Err(e) => return failure("census", &e),
        }
    }
    let constant = census
        .windows(2)
        .all(|w| w[0]["components"] == w[1]["components"]);
    let passed = submersion.passed() && constant;
    Ok(Outcome {
        report: json!({
            "epsilon": epsilon,
            "periods": rationals(&r.periods),
            "rational_periods": rationals(&r.rational_periods),
            "perturbation": r.perturbation,
            "q": map.q().to_string(),
            "pullback_periods": map.periods().iter().map(ToString::to_string).collect::<Vec<_>>(),
            "submersion": submersion,
            "census": census,
            "census_constant": constant,
            "passed": passed,
        }),
        passed,
    })
}

/// End-to-end SL(n) pipeline; a failed stage still yields its partial report.
pub fn pipeline(text: &str, epsilon: f64, tol: &Tolerances) -> Result<Outcome, ReportError> {
    let file: SpecFile = serde_json::from_str(text).map_err(IoError::from)?;
    let spec = file.build_unchecked()?;
    let mut cfg =
        PipelineConfig::with_epsilon(epsilon).map_err(|e| ReportError::Input(e.to_string()))?;
    cfg.tolerances = *tol;
    let (report, passed) = match pipeline_sln(&spec, &cfg) {
        Ok(out) => (out.report, true),
        Err(e) => (e.report, false),
    };
    Ok(Outcome {
        report: serde_json::to_value(&report).expect("report serializes"),
        passed,
    })
}

/// Result of comparing a rendered report with a stored one.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GoldenMatch {
    Identical,
    Differs,
}

/// Byte comparison against `path`; a missing file is an input error.
pub fn compare_golden(rendered: &str, path: &Path) -> Result<GoldenMatch, ReportError> {
    let stored =
        std::fs::read(path).map_err(|e| ReportError::Input(format!("{}: {e}", path.display())))?;
    Ok(if stored == rendered.as_bytes() {
        GoldenMatch::Identical
    } else {
        GoldenMatch::Differs
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn brackets_pass_for_small_n() {
        for n in 2..=4 {
            let out = verify_brackets(n).unwrap();
            assert!(out.passed, "n = {n}");
            assert_eq!(out.report["dims"]["total"], n * n - 1);
        }
        assert!(matches!(verify_brackets(1), Err(ReportError::Input(_))));
    }

    #[test]
    fn decompose_reports_split() {
        let out = decompose("[[2, 1], [0, 0.5]]", &Tolerances::default()).unwrap();
        assert!(out.passed);
        assert_eq!(out.report["split"]["g2"].as_array().unwrap().len(), 2);
        let a = out.report["affine_circle"]["a"].as_f64().unwrap();
        assert!((a - 4.0).abs() < 1e-12);
    }

    #[test]
    fn decompose_rejects_non_unimodular() {
        let err = decompose("[[2, 0], [0, 1]]", &Tolerances::default()).unwrap_err();
        assert!(matches!(
            err,
            ReportError::Group(GroupError::NonUnimodular(_))
        ));
    }

    #[test]
    fn malformed_json_is_input_error() {
        assert!(matches!(
            check_foliation("{", &Tolerances::default()),
            Err(ReportError::Io(IoError::Json(_)))
        ));
    }
}
