//! The SL(2) foliation of T^2 obtained from a GA suspension and the rotation
//! section: equivariance, the chart cocycle, and its two projections.
//!
//! cargo run --example product_foliation

use sl_foliation::complex::torus_complex;
use sl_foliation::foliation::{
    check_cocycle, check_equivariance, consistency_deviation, linear_abelian, product_foliation,
    project_foliation, suspension_ga, Factor, FoliatedCocycle, ProductStructure,
};
use sl_foliation::group::{factor_split, rotation, GAElement};
use sl_foliation::linalg::Tolerances;
use std::sync::Arc;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let tol = Tolerances::default();

    let linear = linear_abelian(
        Arc::new(torus_complex(2, 8)?),
        vec![vec![1.0, 2f64.sqrt()]],
        &tol,
    )?;
    let eq = check_equivariance(&linear)?;
    println!(
        "linear R foliation, slope sqrt 2: equivariance {:e} over {} samples",
        eq.max_deviation, eq.samples_checked
    );

    let base = suspension_ga(6, GAElement::new(2.0, 1.0)?, &tol)?;
    let spec = product_foliation(&base, rotation, 12, &tol)?;
    let eq = check_equivariance(&spec)?;
    println!(
        "{} product: equivariance {:e} (per generator {:?}), consistency {:e}",
        spec.tag(),
        eq.max_deviation,
        eq.per_generator,
        consistency_deviation(&spec)?
    );

    let cocycle = FoliatedCocycle::from_spec(&spec)?;
    let report = check_cocycle(&cocycle, &tol)?;
    println!(
        "{} star charts: {} overlaps, {} triples, max violation {:e}",
        cocycle.charts().len(),
        report.overlaps_checked,
        report.triples_checked,
        report.max_violation
    );

    let ga = project_foliation(&spec, &ProductStructure::AffineCircle, Factor::First, &tol)?;
    println!(
        "projection to {}: {} holonomy images",
        ga.tag(),
        ga.holonomy().images.len()
    );
    let r2 = project_foliation(
        &spec,
        &ProductStructure::Iwasawa(factor_split(2)?),
        Factor::Second,
        &tol,
    )?;
    println!(
        "projection to {}: holonomy {:?}",
        r2.tag(),
        r2.holonomy().images
    );
    Ok(())
}
