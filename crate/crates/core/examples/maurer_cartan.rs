//! Maurer–Cartan cochains read off an SL(2) developing map on the torus,
//! and what the checker reports after one edge is perturbed.
//!
//! cargo run --example maurer_cartan

use sl_foliation::algebra::{AlgebraElement, BasisIndex};
use sl_foliation::foliation::{check_mc, product_foliation, suspension_ga, MaurerCartan};
use sl_foliation::group::{CircleAngle, GAElement};
use sl_foliation::linalg::{matrix_exp, FMatrix, Tolerances};

/// A small loop in SL(2) through the identity direction `cos t H + sin t (E12 + E21)`.
fn wobble(angle: CircleAngle) -> FMatrix {
    let (s, c) = angle.theta().sin_cos();
    let x = FMatrix::from_rows(vec![vec![0.4 * c, 0.4 * s], vec![0.4 * s, -0.4 * c]]).unwrap();
    matrix_exp(&x)
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let tol = Tolerances::default();
    let base = suspension_ga(8, GAElement::new(2.0, 1.0)?, &tol)?;
    let spec = product_foliation(&base, wobble, 8, &tol)?;
    let report = check_mc(&spec, &tol)?;
    println!(
        "{} on {} triangles: flat {}, max holonomy residual {:e}, surjective {}",
        spec.tag(),
        spec.complex().triangles().len(),
        report.flat,
        report.max_holonomy_residual,
        report.surjective
    );

    let MaurerCartan::Lie(mut w) = spec.mc().clone() else {
        unreachable!("SL(2) cochains are Lie-valued")
    };
    let edge = 5;
    let bump = AlgebraElement::basis(BasisIndex::OffDiag(1, 2), 2)?.scale(&0.01);
    w.values_mut()[edge] = &w.values()[edge] + &bump;
    let [u, v] = spec.complex().edges()[edge];
    let perturbed = spec.with_mc(MaurerCartan::Lie(w))?;
    let report = check_mc(&perturbed, &tol)?;
    println!(
        "after perturbing edge {u}-{v}: flat {}, failing triangles {:?}, max residual {:e}",
        report.flat, report.failing_triangles, report.max_holonomy_residual
    );
    Ok(())
}
