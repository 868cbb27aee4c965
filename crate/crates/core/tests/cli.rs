use std::path::Path;
use std::process::{Command, Output};
use std::sync::Arc;

use sl_foliation::complex::torus_complex;
use sl_foliation::foliation::{linear_abelian, product_foliation, suspension_ga};
use sl_foliation::group::{rotation, GAElement};
use sl_foliation::io::{CochainFile, CochainValues, ComplexFile, Number, SpecFile};
use sl_foliation::linalg::Tolerances;

fn slfol(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_slfol"))
        .args(args)
        .output()
        .unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

fn product_spec() -> String {
    let tol = Tolerances::default();
    let base = suspension_ga(6, GAElement::new(2.0, 1.0).unwrap(), &tol).unwrap();
    SpecFile::from_spec(
        &product_foliation(&base, rotation, 12, &tol).unwrap(),
        false,
    )
    .to_json()
}

fn sqrt2_cochain(m: usize) -> String {
    let t = torus_complex(2, m).unwrap();
    let h = t.homology().unwrap();
    let values = h.duals[0]
        .values()
        .iter()
        .zip(h.duals[1].values())
        .map(|(x, y)| {
            let (x, y): (f64, f64) = (
                num_traits::ToPrimitive::to_f64(x).unwrap(),
                num_traits::ToPrimitive::to_f64(y).unwrap(),
            );
            Number::Float(x + 2f64.sqrt() * y)
        })
        .collect();
    serde_json::to_string(&CochainFile {
        complex: ComplexFile::torus(&[m, m]),
        cochain: CochainValues::List(values),
    })
    .unwrap()
}

#[test]
fn verify_brackets_passes_and_rejects_small_n() {
    let out = slfol(&["verify-brackets", "--n", "3"]);
    assert_eq!(code(&out), 0);
    let r = json(&out);
    assert_eq!(r["jacobi_violations"], 0);
    assert_eq!(r["table"]["[1,2]×[2,1]"].as_array().unwrap().len(), 8);
    assert_eq!(code(&slfol(&["verify-brackets", "--n", "1"])), 2);
}

#[test]
fn decompose_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let good = write(
        dir.path(),
        "shear.json",
        r#"{"matrix": [["1", "1/2"], [0, 1]]}"#,
    );
    let out = slfol(&["decompose", &good]);
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out)["split"]["g2"], serde_json::json!([0.0, 0.5]));
    let bad = write(dir.path(), "scale.json", "[[2, 0], [0, 1]]");
    let out = slfol(&["decompose", &bad]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("unimodular"));
    let garbage = write(dir.path(), "garbage.json", "not json");
    assert_eq!(code(&slfol(&["decompose", &garbage])), 2);
    assert_eq!(code(&slfol(&["decompose", "/nonexistent/file.json"])), 2);
}

#[test]
fn check_foliation_flags_a_broken_holonomy() {
    let dir = tempfile::tempdir().unwrap();
    let good = write(dir.path(), "product.json", &product_spec());
    let out = slfol(&["check-foliation", &good]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stdout));

    let tol = Tolerances::default();
    let t = Arc::new(torus_complex(2, 4).unwrap());
    let spec = linear_abelian(t, vec![vec![1.0, 0.5], vec![0.0, 1.0]], &tol).unwrap();
    let mut file = SpecFile::from_spec(&spec, false);
    file.holonomy[0] = serde_json::from_str("[7.0, 0.0]").unwrap();
    let broken = write(dir.path(), "broken.json", &file.to_json());
    let out = slfol(&["check-foliation", &broken]);
    assert_eq!(code(&out), 3);
    assert_eq!(json(&out)["passed"], false);
}

#[test]
fn tischler_reports_and_budget_failure() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "sqrt2.json", &sqrt2_cochain(8));
    let out = slfol(&["tischler", &input, "--epsilon", "0.01"]);
    assert_eq!(code(&out), 0);
    let r = json(&out);
    assert_eq!(r["q"], "12");
    assert_eq!(r["pullback_periods"], serde_json::json!(["12", "17"]));
    assert_eq!(r["census_constant"], true);
    let out = slfol(&["tischler", &input, "--epsilon", "1e-13"]);
    assert_eq!(code(&out), 3);
    assert_eq!(json(&out)["stage"], "rationalize");
    assert_eq!(code(&slfol(&["tischler", &input, "--epsilon", "-1"])), 2);
}

#[test]
fn pipeline_golden_roundtrip_and_multiple_inputs() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(dir.path(), "product.json", &product_spec());
    let tol = Tolerances::default();
    let zero = linear_abelian(
        Arc::new(torus_complex(2, 3).unwrap()),
        vec![vec![0.0; 2]; 2],
        &tol,
    )
    .unwrap();
    let zero = write(
        dir.path(),
        "zero.json",
        &SpecFile::from_spec(&zero, false).to_json(),
    );

    let first = slfol(&["pipeline", &spec, "--epsilon", "0.01"]);
    assert_eq!(code(&first), 0);
    let golden = dir.path().join("golden");
    std::fs::create_dir(&golden).unwrap();
    std::fs::write(golden.join("product.pipeline.json"), &first.stdout).unwrap();
    let g = golden.to_string_lossy().into_owned();
    assert_eq!(code(&slfol(&["--golden", &g, "pipeline", &spec])), 0);

    std::fs::write(golden.join("product.pipeline.json"), b"{}\n").unwrap();
    assert_eq!(code(&slfol(&["--golden", &g, "pipeline", &spec])), 3);

    let both = slfol(&["pipeline", &spec, &zero]);
    assert_eq!(code(&both), 3);
    let text = String::from_utf8(both.stdout).unwrap();
    assert!(text.starts_with(std::str::from_utf8(&first.stdout).unwrap()));
    assert!(text.contains("no submersive combination"));
}
