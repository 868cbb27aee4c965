//! The end-to-end pipeline on the SL(2) product foliation and on a linear
//! R^2 foliation. Writes the spec files and reports to a directory so the
//! `slfol` binary can be run on them.
//!
//! cargo run --example sln_pipeline -- out/
//! cargo run --bin slfol -- pipeline out/product.json --epsilon 0.01

use std::path::PathBuf;
use std::sync::Arc;

use sl_foliation::complex::torus_complex;
use sl_foliation::foliation::{linear_abelian, product_foliation, suspension_ga};
use sl_foliation::group::{rotation, GAElement};
use sl_foliation::io::{CochainFile, CochainValues, ComplexFile, Number, SpecFile};
use sl_foliation::linalg::Tolerances;
use sl_foliation::tischler::{pipeline_sln, PipelineConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = PathBuf::from(
        std::env::args()
            .nth(1)
            .unwrap_or_else(|| "target/slfol-demo".into()),
    );
    std::fs::create_dir_all(&dir)?;
    let tol = Tolerances::default();
    let cfg = PipelineConfig::with_epsilon(0.01)?;

    let base = suspension_ga(6, GAElement::new(2.0, 1.0)?, &tol)?;
    let product = product_foliation(&base, rotation, 12, &tol)?;
    let linear = linear_abelian(
        Arc::new(torus_complex(2, 8)?),
        vec![vec![1.0, 0.0], vec![0.0, 2f64.sqrt()]],
        &tol,
    )?;

    for (name, spec) in [("product", &product), ("linear", &linear)] {
        let out = pipeline_sln(spec, &cfg).map_err(|e| e.error)?;
        println!(
            "{name}: {} stages, q = {}, periods {:?}",
            out.report.stages.len(),
            out.map.q(),
            out.map.periods()
        );
        std::fs::write(
            dir.join(format!("{name}.json")),
            SpecFile::from_spec(spec, false).to_json(),
        )?;
        std::fs::write(
            dir.join(format!("{name}.report.json")),
            out.report.to_json(),
        )?;
    }

    let t = torus_complex(2, 16)?;
    let h = t.homology().expect("torus family carries generators");
    let values = h.duals[0]
        .values()
        .iter()
        .zip(h.duals[1].values())
        .map(|(x, y)| {
            Number::Float(
                num_traits::ToPrimitive::to_f64(x).unwrap()
                    + 2f64.sqrt() * num_traits::ToPrimitive::to_f64(y).unwrap(),
            )
        })
        .collect();
    let file = CochainFile {
        complex: ComplexFile::torus(&[16, 16]),
        cochain: CochainValues::List(values),
    };
    std::fs::write(dir.join("sqrt2.json"), serde_json::to_string_pretty(&file)?)?;
    std::fs::write(dir.join("shear.json"), "[[1, 0.5], [0, 1]]")?;
    println!("inputs written to {}", dir.display());
    Ok(())
}
