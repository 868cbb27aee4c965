use std::sync::Arc;

use super::{DevelopingMap, FoliationError, GroupElement, GroupTag, LieFoliationSpec};
use crate::complex::{circle_complex, SimplicialComplex};
use crate::group::{ga_embed, CircleAngle, GAElement};
use crate::linalg::{FMatrix, Tolerances};

/// Linear foliation of a torus by the closed form `ω_i = Σ_a P[i][a] dx_a`.
///
/// `periods[i][a]` is the period of component `i` along axis `a`, so the
/// developing map is `x ↦ P x` and the holonomy of `e_a` is column `a` of `P`.
pub fn linear_abelian(
    complex: Arc<SimplicialComplex>,
    periods: Vec<Vec<f64>>,
    tol: &Tolerances,
) -> Result<LieFoliationSpec, FoliationError> {
    let cov = complex.covering().ok_or(FoliationError::MissingCovering)?;
    let rank = cov.rank();
    if let Some(row) = periods.iter().find(|r| r.len() != rank) {
        return Err(FoliationError::HolonomyCount {
            expected: rank,
            got: row.len(),
        });
    }
    let dim = periods.len();
    let developing = DevelopingMap::sample(&complex, 1, |v, shift| {
        let x = cov
            .position(v, shift)
            .ok_or(FoliationError::MissingPositions)?;
        Ok(GroupElement::Vector(
            periods
                .iter()
                .map(|row| row.iter().zip(&x).map(|(p, xa)| p * xa).sum())
                .collect(),
        ))
    })?;
    let holonomy = (0..rank)
        .map(|a| GroupElement::Vector(periods.iter().map(|row| row[a]).collect()))
        .collect();
    LieFoliationSpec::from_developing(complex, GroupTag::Vector { dim }, holonomy, developing, tol)
}

/// Suspension of `h` in GA over a circle with `m` subdivisions: the
/// developing map on `R` is the one-parameter subgroup `t ↦ h^t`.
pub fn suspension_ga(
    m: usize,
    h: GAElement,
    tol: &Tolerances,
) -> Result<LieFoliationSpec, FoliationError> {
    let complex = Arc::new(circle_complex(m)?);
    let cov = complex.covering().ok_or(FoliationError::MissingCovering)?;
    let developing = DevelopingMap::sample(&complex, 1, |v, shift| {
        let t = cov
            .position(v, shift)
            .ok_or(FoliationError::MissingPositions)?[0];
        Ok(GroupElement::Affine(h.power(t)))
    })?;
    LieFoliationSpec::from_developing(
        Arc::clone(&complex),
        GroupTag::Affine,
        vec![GroupElement::Affine(h)],
        developing,
        tol,
    )
}

/// SL(2) foliation on `base × S^1` with developing map
/// `D(x, y) = ga_embed(D_0(x)) · σ(2πy)` and holonomy trivial on the new
/// circle factor.
///
/// The base must be a GA spec on a grid torus; `circle_subdivisions` is the
/// number of vertices on the added circle.
pub fn product_foliation(
    base: &LieFoliationSpec,
    section: impl Fn(CircleAngle) -> FMatrix,
    circle_subdivisions: usize,
    tol: &Tolerances,
) -> Result<LieFoliationSpec, FoliationError> {
    if base.tag() != GroupTag::Affine {
        return Err(FoliationError::GroupMismatch {
            expected: GroupTag::Affine,
            got: base.tag(),
        });
    }
    let base_complex = base.complex();
    let complex = Arc::new(base_complex.product_with_circle(circle_subdivisions)?);
    let base_rank = base_complex
        .covering()
        .ok_or(FoliationError::MissingCovering)?
        .rank();
    let m = circle_subdivisions as f64;
    let developing = DevelopingMap::sample(&complex, 1, |v, shift| {
        let coords = complex.grid_coords(v).expect("product is a grid");
        let (base_coords, c) = coords.split_at(base_rank);
        let bv = base_complex
            .grid_vertex(base_coords)
            .expect("base is a grid");
        let d0 = base.developing().require(bv, &shift[..base_rank])?;
        let GroupElement::Affine(d0) = d0 else {
            unreachable!("base tag checked")
        };
        let y = c[0] as f64 / m + shift[base_rank] as f64;
        let angle = CircleAngle::new(2.0 * std::f64::consts::PI * y);
        Ok(GroupElement::Special(&ga_embed(d0) * &section(angle)))
    })?;
    let mut holonomy: Vec<GroupElement> = base
        .holonomy()
        .images
        .iter()
        .map(|g| GroupElement::Special(g.as_matrix().expect("GA image")))
        .collect();
    holonomy.push(GroupElement::identity(GroupTag::Special { n: 2 })?);
    LieFoliationSpec::from_developing(
        complex,
        GroupTag::Special { n: 2 },
        holonomy,
        developing,
        tol,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::torus_complex;
    use crate::foliation::{check_equivariance, check_mc, consistency_deviation};
    use crate::group::{iwasawa_sl2, rotation};

    #[test]
    fn coordinate_foliation_is_flat_and_surjective() {
        let tol = Tolerances::default();
        let t = Arc::new(torus_complex(2, 4).unwrap());
        let spec = linear_abelian(t.clone(), vec![vec![1.0, 0.0], vec![0.0, 1.0]], &tol).unwrap();
        let r = check_mc(&spec, &tol).unwrap();
        assert!(r.flat && r.surjective, "{r:?}");
        assert_eq!(r.target_rank, 2);
        let degenerate = linear_abelian(t, vec![vec![1.0, 0.0], vec![0.0, 0.0]], &tol).unwrap();
        let r = check_mc(&degenerate, &tol).unwrap();
        assert!(r.flat);
        assert_eq!(r.rank_deficient_vertices.len(), 16);
    }

    #[test]
    fn suspension_is_equivariant() {
        let tol = Tolerances::default();
        let spec = suspension_ga(6, GAElement::new(2.0, 1.0).unwrap(), &tol).unwrap();
        let eq = check_equivariance(&spec).unwrap();
        assert!(eq.max_deviation < 1e-12, "{eq:?}");
        assert!(consistency_deviation(&spec).unwrap() == 0.0);
        // A circle cannot submerse onto the 2-dimensional group.
        let r = check_mc(&spec, &tol).unwrap();
        assert!(r.flat && !r.surjective);
        assert_eq!(r.rank_deficient_vertices.len(), 6);
    }

    #[test]
    fn degenerate_base_gives_section() {
        let tol = Tolerances::default();
        let base = suspension_ga(3, GAElement::identity(), &tol).unwrap();
        let spec = product_foliation(&base, rotation, 12, &tol).unwrap();
        for ((v, shift), g) in spec.developing().iter() {
            let y = spec.complex().grid_coords(*v).unwrap()[1] as f64 / 12.0 + shift[1] as f64;
            let expected = rotation(CircleAngle::new(2.0 * std::f64::consts::PI * y));
            assert!(g.distance(&GroupElement::Special(expected)).unwrap() < 1e-15);
        }
    }

    #[test]
    fn product_roundtrips_through_iwasawa() {
        let tol = Tolerances::default();
        let base = suspension_ga(5, GAElement::new(2.0, 0.0).unwrap(), &tol).unwrap();
        let spec = product_foliation(&base, rotation, 12, &tol).unwrap();
        assert!(check_equivariance(&spec).unwrap().max_deviation < 1e-9);
        assert!(check_mc(&spec, &tol).unwrap().flat);
        for ((v, shift), g) in spec.developing().iter() {
            let coords = spec.complex().grid_coords(*v).unwrap();
            let (ga, angle) = iwasawa_sl2(&g.as_matrix().unwrap(), &tol).unwrap();
            let GroupElement::Affine(d0) = base.developing().get(coords[0], &shift[..1]).unwrap()
            else {
                panic!()
            };
            assert!(ga.distance(d0) < tol.residual_tol);
            let y = coords[1] as f64 / 12.0 + shift[1] as f64;
            assert!(
                angle.distance(CircleAngle::new(2.0 * std::f64::consts::PI * y)) < tol.residual_tol
            );
        }
    }

    #[test]
    fn product_requires_affine_base() {
        let tol = Tolerances::default();
        let t = Arc::new(torus_complex(2, 3).unwrap());
        let spec = linear_abelian(t, vec![vec![1.0, 0.0]], &tol).unwrap();
        assert!(matches!(
            product_foliation(&spec, rotation, 4, &tol),
            Err(FoliationError::GroupMismatch { .. })
        ));
    }
}
