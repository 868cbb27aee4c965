//! A closed cochain with an irrational period on T^2, its rational
//! perturbation and the resulting circle map with its fibers.
//!
//! cargo run --example tischler_torus -- 0.01

use num_traits::ToPrimitive;
use sl_foliation::complex::torus_complex;
use sl_foliation::linalg::Tolerances;
use sl_foliation::tischler::{
    check_submersion, fiber_census, generic_values, integrate_to_circle, rationalize,
    RationalizeConfig,
};

fn show<T: ToString>(v: &[T]) -> String {
    v.iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(", ")
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let epsilon: f64 = std::env::args()
        .nth(1)
        .map(|s| s.parse())
        .transpose()?
        .unwrap_or(0.01);
    let tol = Tolerances::default();
    let t = torus_complex(2, 16)?;
    let h = t.homology().expect("torus family carries generators");
    let dx = h.duals[0].map(|x| x.to_f64().unwrap());
    let dy = h.duals[1].map(|x| x.to_f64().unwrap());
    let w = dx.add(&dy.scale(&2f64.sqrt()));

    let r = rationalize(&t, &w, &RationalizeConfig::new(epsilon, 1_000_000)?, &tol)?;
    println!(
        "periods ({}) -> ({})",
        show(&r.periods),
        show(&r.rational_periods)
    );
    println!("sup |w - w'| = {:e}", r.perturbation);

    let f = integrate_to_circle(&t, &r.cochain)?;
    println!("q = {}, pullback periods ({})", f.q(), show(f.periods()));
    let sub = check_submersion(&t, &r.cochain, 0.0)?;
    println!(
        "submersion: {} of {} top simplices singular",
        sub.failing.len(),
        sub.checked
    );
    for v in generic_values(&f, 5) {
        let c = fiber_census(&t, &f, &v)?;
        println!(
            "fiber over {v}: {} component(s), {} crossings",
            c.components, c.crossing_points
        );
    }
    Ok(())
}
