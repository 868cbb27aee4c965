//! Exact structure constants of sl(n): a few brackets, the dimension audit
//! and the Jacobi/antisymmetry sweep.
//!
//! cargo run --example brackets -- 4

use sl_foliation::algebra::{bracket, build_structure_table, dims, AlgebraElement, BasisIndex};
use sl_foliation::group::chart_len;
use sl_foliation::linalg::Rational;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let n: usize = std::env::args()
        .nth(1)
        .map(|s| s.parse())
        .transpose()?
        .unwrap_or(3);

    let e = |i, j| AlgebraElement::<Rational>::basis(BasisIndex::OffDiag(i, j), n);
    println!("[E12, E21] = {}", bracket(&e(1, 2)?, &e(2, 1)?)?);
    println!("[E12, E23] = {}", bracket(&e(1, 2)?, &e(2, 3.min(n))?)?);
    println!("[E21, E12] = {}", bracket(&e(2, 1)?, &e(1, 2)?)?);

    for k in 2..=6 {
        let (h, off, total) = dims(k)?;
        println!(
            "sl({k}): cartan {h}, off-diagonal {off}, total {total}, chart {}",
            chart_len(k)
        );
    }

    let table = build_structure_table(n)?;
    let (checked, bad) = table.offdiag_identity_violations()?;
    println!(
        "sl({n}): {checked} off-diagonal pairs, {} identity violations, {} antisymmetry violations, {} Jacobi violations",
        bad.len(),
        table.antisymmetry_violations().len(),
        table.jacobi_violations().len()
    );
    Ok(())
}
