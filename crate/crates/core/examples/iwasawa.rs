//! Iwasawa factorizations of a random SL(3) element, the GA x S^1 split of
//! SL(2) and the R^2 chart factor used by the pipeline.
//!
//! cargo run --example iwasawa

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sl_foliation::group::{
    factor_split, ga_embed, iwasawa_sl2, iwasawa_sln, iwasawa_sln_right, rotation, CircleAngle,
    GAElement,
};
use sl_foliation::linalg::{determinant, FMatrix, Tolerances};

fn random_sl(n: usize, rng: &mut impl Rng) -> FMatrix {
    loop {
        let m = FMatrix::from_fn(n, |_, _| rng.gen_range(-1.0..1.0)).expect("valid dimension");
        let det = determinant(&m);
        if det.abs() > 0.1 {
            // flip a row for a positive determinant, then rescale to det 1
            let sign = det.signum();
            let s = (det.abs()).powf(-1.0 / n as f64);
            return FMatrix::from_fn(n, |i, j| m.get(i, j) * s * if i == 0 { sign } else { 1.0 })
                .unwrap();
        }
    }
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let tol = Tolerances::default();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let g = random_sl(3, &mut rng);
    println!("g =\n{g}");

    let kan = iwasawa_sln(&g, &tol)?;
    println!(
        "K A N: chart {:?}, recompose error {:e}",
        kan.chart,
        kan.recompose()?.max_abs_diff(&g)
    );
    let ank = iwasawa_sln_right(&g, &tol)?;
    println!(
        "A N K: chart {:?}, recompose error {:e}",
        ank.chart,
        ank.recompose()?.max_abs_diff(&g)
    );
    let split = factor_split(3)?;
    println!(
        "R^2 factor coordinates: {:?}",
        split.abelian_project(&g, &tol)?
    );

    let b = GAElement::new(1.5, -0.25)?;
    let theta = CircleAngle::new(2.0);
    let h = &ga_embed(&b) * &rotation(theta);
    let (b2, theta2) = iwasawa_sl2(&h, &tol)?;
    println!(
        "SL(2): (a, b) = ({}, {}), theta = {} (recovered from {:?}, {})",
        b2.a(),
        b2.b(),
        theta2.theta(),
        b,
        theta.theta()
    );

    let bad = FMatrix::from_rows(vec![vec![2.0, 0.0], vec![0.0, 1.0]])?;
    println!("det 2 input: {}", iwasawa_sln(&bad, &tol).unwrap_err());
    Ok(())
}
