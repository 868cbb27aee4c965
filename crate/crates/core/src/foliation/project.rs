use super::checks::triangle_residuals;
use super::{
    flatness_failures, DevelopingMap, FoliationError, GroupElement, GroupTag, HolonomyRep,
    LieFoliationSpec, MaurerCartan,
};
use crate::group::{iwasawa_sl2, FactorSplit};
use crate::linalg::Tolerances;

/// A product decomposition `G = G_1 × G_2` of the transverse group.
#[derive(Debug, Clone, PartialEq)]
pub enum ProductStructure {
    /// `R^k = R^at × R^(k - at)`.
    VectorSplit { at: usize },
    /// `SL(n) = (SO(n) × R^(L-2)) × R^2` through the `A N K` chart; only the
    /// abelian second factor is a group target here.
    Iwasawa(FactorSplit),
    /// `SL(2) = GA × S^1`; only the GA factor is a group target here.
    AffineCircle,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Factor {
    First,
    Second,
}

/// Foliation induced by `p_i ∘ D` for the chosen factor.
///
/// The developing map is composed with the projection and the holonomy is
/// projected. For vector splits the cochain is restricted componentwise;
/// otherwise it is re-derived from the projected developing map. Flatness of
/// the result is verified and a failure is returned as
/// [`FoliationError::CheckFailed`] listing the offending triangles.
pub fn project_foliation(
    spec: &LieFoliationSpec,
    structure: &ProductStructure,
    which: Factor,
    tol: &Tolerances,
) -> Result<LieFoliationSpec, FoliationError> {
    let no_structure = || FoliationError::NoProductStructure(spec.tag());
    match (structure, spec.tag()) {
        (ProductStructure::VectorSplit { at }, GroupTag::Vector { dim }) => {
            if *at == 0 || *at >= dim {
                return Err(no_structure());
            }
            let range = match which {
                Factor::First => 0..*at,
                Factor::Second => *at..dim,
            };
            let tag = GroupTag::Vector { dim: range.len() };
            let project = |g: &GroupElement| match g {
                GroupElement::Vector(x) => GroupElement::Vector(x[range.clone()].to_vec()),
                _ => unreachable!("tag checked"),
            };
            let MaurerCartan::Abelian(ws) = spec.mc() else {
                unreachable!("vector specs carry abelian cochains")
            };
            let mc = MaurerCartan::Abelian(ws[range.clone()].to_vec());
            let holonomy = spec.holonomy().images.iter().map(project).collect();
            let mut developing = DevelopingMap::new();
            for ((v, s), g) in spec.developing().iter() {
                developing.insert(*v, s.clone(), project(g));
            }
            let out = LieFoliationSpec::from_parts(
                spec.complex_arc(),
                tag,
                mc,
                HolonomyRep { images: holonomy },
                developing,
            )?;
            verify_flat(out, tol)
        }
        (ProductStructure::Iwasawa(split), GroupTag::Special { n }) if split.n == n => {
            match which {
                Factor::First => Err(FoliationError::FactorNotAGroup(
                    "SO(n) x R^(L-2) chart block".into(),
                )),
                Factor::Second => {
                    let mut developing = DevelopingMap::new();
                    for ((v, s), g) in spec.developing().iter() {
                        let p =
                            split.abelian_project(&g.as_matrix().expect("matrix group"), tol)?;
                        developing.insert(*v, s.clone(), GroupElement::Vector(p.to_vec()));
                    }
                    let holonomy = induced_translations(spec, &developing)?;
                    derive_and_verify(spec, GroupTag::Vector { dim: 2 }, holonomy, developing, tol)
                }
            }
        }
        (ProductStructure::AffineCircle, GroupTag::Special { n: 2 }) => match which {
            Factor::Second => Err(FoliationError::FactorNotAGroup("S^1".into())),
            Factor::First => {
                let mut developing = DevelopingMap::new();
                for ((v, s), g) in spec.developing().iter() {
                    let (b, _) = iwasawa_sl2(&g.as_matrix().expect("matrix group"), tol)?;
                    developing.insert(*v, s.clone(), GroupElement::Affine(b));
                }
                let holonomy = spec
                    .holonomy()
                    .images
                    .iter()
                    .map(|h| {
                        let (b, angle) = iwasawa_sl2(&h.as_matrix().expect("matrix group"), tol)?;
                        let off = angle
                            .theta()
                            .min(2.0 * std::f64::consts::PI - angle.theta());
                        if off > tol.residual_tol {
                            return Err(FoliationError::HolonomyNotInFactor(off));
                        }
                        Ok(GroupElement::Affine(b))
                    })
                    .collect::<Result<_, _>>()?;
                derive_and_verify(spec, GroupTag::Affine, holonomy, developing, tol)
            }
        },
        _ => Err(no_structure()),
    }
}

/// Translation parts `D'(v_0, e_i) - D'(v_0, 0)` read off a projected
/// vector-valued developing map.
fn induced_translations(
    spec: &LieFoliationSpec,
    developing: &DevelopingMap,
) -> Result<Vec<GroupElement>, FoliationError> {
    let rank = spec.holonomy().images.len();
    let origin = vec![0i64; rank];
    let base = developing.require(0, &origin)?.inv()?;
    (0..rank)
        .map(|i| {
            let mut e = origin.clone();
            e[i] = 1;
            developing.require(0, &e)?.mul(&base)
        })
        .collect()
}

fn derive_and_verify(
    spec: &LieFoliationSpec,
    tag: GroupTag,
    holonomy: Vec<GroupElement>,
    developing: DevelopingMap,
    tol: &Tolerances,
) -> Result<LieFoliationSpec, FoliationError> {
    let mc = super::derive_mc(spec.complex(), tag, &developing)?;
    let out = LieFoliationSpec::from_parts(
        spec.complex_arc(),
        tag,
        mc,
        HolonomyRep { images: holonomy },
        developing,
    )?;
    verify_flat(out, tol)
}

fn verify_flat(
    spec: LieFoliationSpec,
    tol: &Tolerances,
) -> Result<LieFoliationSpec, FoliationError> {
    let failing = flatness_failures(&spec, tol)?;
    if failing.is_empty() {
        return Ok(spec);
    }
    let (res, _) = triangle_residuals(&spec)?;
    Err(FoliationError::CheckFailed {
        what: "closedness of the projected cochain".into(),
        max_residual: res.iter().copied().fold(0.0, f64::max),
        failing,
    })
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::algebra::{AlgebraElement, BasisIndex};
    use crate::complex::torus_complex;
    use crate::foliation::{check_mc, linear_abelian, product_foliation, suspension_ga};
    use crate::group::{factor_split, rotation, GAElement};
    use crate::linalg::{matrix_exp, FMatrix};

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn vector_split_keeps_components() {
        let t = Arc::new(torus_complex(2, 4).unwrap());
        let spec = linear_abelian(t, vec![vec![1.0, 0.0], vec![0.0, 1.0]], &tol()).unwrap();
        let p = project_foliation(
            &spec,
            &ProductStructure::VectorSplit { at: 1 },
            Factor::First,
            &tol(),
        )
        .unwrap();
        assert_eq!(p.tag(), GroupTag::Vector { dim: 1 });
        let MaurerCartan::Abelian(ws) = p.mc() else {
            panic!()
        };
        let MaurerCartan::Abelian(orig) = spec.mc() else {
            panic!()
        };
        assert_eq!(ws[0], orig[0]);
        let r = check_mc(&p, &tol()).unwrap();
        assert!(r.flat && r.surjective);
        assert!(matches!(
            project_foliation(
                &spec,
                &ProductStructure::VectorSplit { at: 2 },
                Factor::First,
                &tol()
            ),
            Err(FoliationError::NoProductStructure(_))
        ));
    }

    #[test]
    fn affine_factor_recovers_base() {
        let base = suspension_ga(5, GAElement::new(2.0, 0.5).unwrap(), &tol()).unwrap();
        let spec = product_foliation(&base, rotation, 12, &tol()).unwrap();
        let p = project_foliation(
            &spec,
            &ProductStructure::AffineCircle,
            Factor::First,
            &tol(),
        )
        .unwrap();
        assert_eq!(p.tag(), GroupTag::Affine);
        assert!(
            p.holonomy().images[0]
                .distance(&base.holonomy().images[0])
                .unwrap()
                < 1e-9
        );
        assert!(
            p.holonomy().images[1]
                .distance(&GroupElement::Affine(GAElement::identity()))
                .unwrap()
                < 1e-9
        );
        for ((v, s), g) in p.developing().iter() {
            let bv = spec.complex().grid_coords(*v).unwrap()[0];
            assert!(
                g.distance(base.developing().get(bv, &s[..1]).unwrap())
                    .unwrap()
                    < 1e-9
            );
        }
        assert!(matches!(
            project_foliation(
                &spec,
                &ProductStructure::AffineCircle,
                Factor::Second,
                &tol()
            ),
            Err(FoliationError::FactorNotAGroup(_))
        ));
    }

    #[test]
    fn abelian_chart_of_product_is_closed() {
        let base = suspension_ga(5, GAElement::new(2.0, 0.0).unwrap(), &tol()).unwrap();
        let spec = product_foliation(&base, rotation, 12, &tol()).unwrap();
        let split = factor_split(2).unwrap();
        let p = project_foliation(
            &spec,
            &ProductStructure::Iwasawa(split),
            Factor::Second,
            &tol(),
        )
        .unwrap();
        let MaurerCartan::Abelian(ws) = p.mc() else {
            panic!()
        };
        // First chart coordinate is log sqrt(a): (ln 2 / 2) dt along the base.
        let per_edge = 2f64.ln() / 2.0 / 5.0;
        assert!(ws[0]
            .values()
            .iter()
            .all(|x| x.abs() < 1e-12 || (x.abs() - per_edge).abs() < 1e-12));
        assert!(ws[1].sup_norm() < 1e-12);
    }

    #[test]
    fn sl3_vertex_map_projects_to_closed_chart() {
        // D(x, y) = exp(x H + y E13), H = diag(1, -2, 1): H and E13 commute.
        let t = Arc::new(torus_complex(2, 4).unwrap());
        let cov = t.covering().unwrap().clone();
        let hm =
            FMatrix::from_fn(3, |i, j| if i == j { [1.0, -2.0, 1.0][i] } else { 0.0 }).unwrap();
        let e13 = AlgebraElement::<f64>::basis(BasisIndex::OffDiag(1, 3), 3)
            .unwrap()
            .realize();
        let d = |x: f64, y: f64| matrix_exp(&(&hm.scale(&x) + &e13.scale(&y)));
        let developing = DevelopingMap::sample(&t, 1, |v, s| {
            let p = cov.position(v, s).unwrap();
            Ok(GroupElement::Special(d(p[0], p[1])))
        })
        .unwrap();
        let holonomy = vec![
            GroupElement::Special(d(1.0, 0.0)),
            GroupElement::Special(d(0.0, 1.0)),
        ];
        let spec = LieFoliationSpec::from_developing(
            t,
            GroupTag::Special { n: 3 },
            holonomy,
            developing,
            &tol(),
        )
        .unwrap();
        let split = factor_split(3).unwrap();
        let p = project_foliation(
            &spec,
            &ProductStructure::Iwasawa(split),
            Factor::Second,
            &tol(),
        )
        .unwrap();
        let MaurerCartan::Abelian(ws) = p.mc() else {
            panic!()
        };
        // g2 = (n13, n23) = (y, 0)
        assert!(ws[1].sup_norm() < 1e-12);
        assert!(ws[0]
            .values()
            .iter()
            .any(|x| (x.abs() - 0.25).abs() < 1e-12));
    }

    #[test]
    fn left_chart_is_not_translation_invariant() {
        use crate::group::iwasawa_sln;
        let base = suspension_ga(5, GAElement::new(2.0, 1.0).unwrap(), &tol()).unwrap();
        let spec = product_foliation(&base, rotation, 12, &tol()).unwrap();
        // Read the last two K A N chart coordinates instead.
        let mut developing = DevelopingMap::new();
        for ((v, s), g) in spec.developing().iter() {
            let c = iwasawa_sln(&g.as_matrix().unwrap(), &tol()).unwrap().chart;
            developing.insert(*v, s.clone(), GroupElement::Vector(c));
        }
        let holonomy = induced_translations(&spec, &developing).unwrap();
        let err = derive_and_verify(
            &spec,
            GroupTag::Vector { dim: 2 },
            holonomy,
            developing,
            &tol(),
        )
        .unwrap_err();
        assert!(
            matches!(err, FoliationError::CheckFailed { ref failing, .. } if !failing.is_empty())
        );
    }
}
