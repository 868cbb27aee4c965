//! Lie G-foliations on triangulated manifolds.
//!
//! A [`LieFoliationSpec`] bundles a complex with its `Z^d` covering, a
//! Maurer–Cartan cochain, the holonomy representation of the deck group and
//! a finite window of the developing map on the cover. Specs built by the
//! constructors in this module always pass their own flatness and
//! developing/cochain consistency checks.

mod checks;
mod construct;
mod project;

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{AlgebraElement, AlgebraError};
use crate::cochain::{LieCochain1, ScalarCochain1};
use crate::complex::{ComplexError, SimplicialComplex};
use crate::group::{ga_embed, ga_inv, ga_mul, GAElement, GroupError};
use crate::linalg::{inverse, matrix_log, FMatrix, LinalgError};

pub use checks::{
    check_cocycle, check_equivariance, check_mc, consistency_deviation, flatness_failures,
    CocycleReport, CocycleViolation, EquivarianceReport, FoliatedCocycle, McReport,
};
pub use construct::{linear_abelian, product_foliation, suspension_ga};
pub use project::{project_foliation, Factor, ProductStructure};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FoliationError {
    #[error("group mismatch: expected {expected}, got {got}")]
    GroupMismatch { expected: GroupTag, got: GroupTag },
    #[error("spec has no covering data")]
    MissingCovering,
    #[error("covering positions are required")]
    MissingPositions,
    #[error("developing map has no sample at vertex {vertex}, shift {shift:?}")]
    MissingSample { vertex: usize, shift: Vec<i64> },
    #[error("expected {expected} holonomy images, got {got}")]
    HolonomyCount { expected: usize, got: usize },
    #[error("group {0} has no product structure of this kind")]
    NoProductStructure(GroupTag),
    #[error("factor {0} is not a Lie group target supported here")]
    FactorNotAGroup(String),
    #[error("holonomy image does not lie in the projected factor (deviation {0:e})")]
    HolonomyNotInFactor(f64),
    #[error("charts must cover every vertex; vertex {0} is uncovered")]
    UncoveredVertex(usize),
    #[error("check failed: {what} (max residual {max_residual:e} on {} simplices)", failing.len())]
    CheckFailed {
        what: String,
        max_residual: f64,
        failing: Vec<usize>,
    },
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Transverse group of a foliation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum GroupTag {
    /// `R^dim` under addition.
    Vector { dim: usize },
    /// The affine group GA, realized inside SL(2).
    Affine,
    /// SL(n).
    Special { n: usize },
}

impl GroupTag {
    /// Dimension of the Lie algebra.
    pub fn algebra_dim(self) -> usize {
        match self {
            GroupTag::Vector { dim } => dim,
            GroupTag::Affine => 2,
            GroupTag::Special { n } => n * n - 1,
        }
    }

    /// Size of the matrix realization, for the non-abelian tags.
    pub fn matrix_dim(self) -> Option<usize> {
        match self {
            GroupTag::Vector { .. } => None,
            GroupTag::Affine => Some(2),
            GroupTag::Special { n } => Some(n),
        }
    }
}

impl fmt::Display for GroupTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupTag::Vector { dim } => write!(f, "R^{dim}"),
            GroupTag::Affine => write!(f, "GA"),
            GroupTag::Special { n } => write!(f, "SL({n})"),
        }
    }
}

/// Element of one of the supported transverse groups.
#[derive(Debug, Clone, PartialEq)]
pub enum GroupElement {
    Vector(Vec<f64>),
    Affine(GAElement),
    Special(FMatrix),
}

impl GroupElement {
    pub fn tag(&self) -> GroupTag {
        match self {
            GroupElement::Vector(v) => GroupTag::Vector { dim: v.len() },
            GroupElement::Affine(_) => GroupTag::Affine,
            GroupElement::Special(m) => GroupTag::Special { n: m.dim() },
        }
    }

    pub fn identity(tag: GroupTag) -> Result<Self, FoliationError> {
        Ok(match tag {
            GroupTag::Vector { dim } => GroupElement::Vector(vec![0.0; dim]),
            GroupTag::Affine => GroupElement::Affine(GAElement::identity()),
            GroupTag::Special { n } => GroupElement::Special(FMatrix::identity(n)?),
        })
    }

    fn expect_same(&self, other: &Self) -> Result<(), FoliationError> {
        if self.tag() == other.tag() {
            Ok(())
        } else {
            Err(FoliationError::GroupMismatch {
                expected: self.tag(),
                got: other.tag(),
            })
        }
    }

    /// Group product `self * other` (left translation of `other` by `self`).
    pub fn mul(&self, other: &Self) -> Result<Self, FoliationError> {
        self.expect_same(other)?;
        Ok(match (self, other) {
            (GroupElement::Vector(a), GroupElement::Vector(b)) => {
                GroupElement::Vector(a.iter().zip(b).map(|(x, y)| x + y).collect())
            }
            (GroupElement::Affine(a), GroupElement::Affine(b)) => {
                GroupElement::Affine(ga_mul(a, b))
            }
            (GroupElement::Special(a), GroupElement::Special(b)) => GroupElement::Special(a * b),
            _ => unreachable!("tags checked"),
        })
    }

    pub fn inv(&self) -> Result<Self, FoliationError> {
        Ok(match self {
            GroupElement::Vector(a) => GroupElement::Vector(a.iter().map(|x| -x).collect()),
            GroupElement::Affine(a) => GroupElement::Affine(ga_inv(a)),
            GroupElement::Special(a) => GroupElement::Special(inverse(a)?),
        })
    }

    /// Largest coordinate difference: vector entries, `(a, b)` pairs or
    /// matrix entries.
    pub fn distance(&self, other: &Self) -> Result<f64, FoliationError> {
        self.expect_same(other)?;
        Ok(match (self, other) {
            (GroupElement::Vector(a), GroupElement::Vector(b)) => a
                .iter()
                .zip(b)
                .map(|(x, y)| (x - y).abs())
                .fold(0.0, f64::max),
            (GroupElement::Affine(a), GroupElement::Affine(b)) => a.distance(b),
            (GroupElement::Special(a), GroupElement::Special(b)) => a.max_abs_diff(b),
            _ => unreachable!("tags checked"),
        })
    }

    /// Matrix realization (GA through its SL(2) embedding).
    pub fn as_matrix(&self) -> Option<FMatrix> {
        match self {
            GroupElement::Vector(_) => None,
            GroupElement::Affine(a) => Some(ga_embed(a)),
            GroupElement::Special(m) => Some(m.clone()),
        }
    }
}

/// The Maurer–Cartan form as a cochain: `dim` closed scalar cochains for an
/// abelian group, or one sl(n)-valued cochain otherwise (GA uses sl(2)).
#[derive(Debug, Clone, PartialEq)]
pub enum MaurerCartan {
    Abelian(Vec<ScalarCochain1<f64>>),
    Lie(LieCochain1<f64>),
}

/// Images of the `Z^d` deck generators.
#[derive(Debug, Clone, PartialEq)]
pub struct HolonomyRep {
    pub images: Vec<GroupElement>,
}

/// Samples of the developing map on a finite window of the cover, keyed by
/// `(base vertex, deck shift)`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct DevelopingMap {
    samples: BTreeMap<(usize, Vec<i64>), GroupElement>,
}

impl DevelopingMap {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, vertex: usize, shift: Vec<i64>, value: GroupElement) {
        self.samples.insert((vertex, shift), value);
    }

    pub fn get(&self, vertex: usize, shift: &[i64]) -> Option<&GroupElement> {
        self.samples.get(&(vertex, shift.to_vec()))
    }

    pub fn require(&self, vertex: usize, shift: &[i64]) -> Result<&GroupElement, FoliationError> {
        self.get(vertex, shift)
            .ok_or_else(|| FoliationError::MissingSample {
                vertex,
                shift: shift.to_vec(),
            })
    }

    pub fn iter(&self) -> impl Iterator<Item = (&(usize, Vec<i64>), &GroupElement)> {
        self.samples.iter()
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Samples `f` on every lift `(v, k)` with `|k_i| <= radius`.
    pub fn sample(
        complex: &SimplicialComplex,
        radius: i64,
        mut f: impl FnMut(usize, &[i64]) -> Result<GroupElement, FoliationError>,
    ) -> Result<Self, FoliationError> {
        let rank = complex
            .covering()
            .ok_or(FoliationError::MissingCovering)?
            .rank();
        let mut map = Self::new();
        for shift in window(rank, radius) {
            for v in 0..complex.n_vertices() {
                let value = f(v, &shift)?;
                map.insert(v, shift.clone(), value);
            }
        }
        Ok(map)
    }
}

/// All shifts in `{-radius..=radius}^rank`, lexicographic.
pub(crate) fn window(rank: usize, radius: i64) -> Vec<Vec<i64>> {
    let mut out = vec![Vec::new()];
    for _ in 0..rank {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (-radius..=radius).map(move |k| {
                    let mut p = prefix.clone();
                    p.push(k);
                    p
                })
            })
            .collect();
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct LieFoliationSpec {
    complex: Arc<SimplicialComplex>,
    tag: GroupTag,
    mc: MaurerCartan,
    holonomy: HolonomyRep,
    developing: DevelopingMap,
}

impl LieFoliationSpec {
    /// Assembles a spec without running any check; see [`check_mc`] and
    /// [`check_equivariance`].
    pub fn from_parts(
        complex: Arc<SimplicialComplex>,
        tag: GroupTag,
        mc: MaurerCartan,
        holonomy: HolonomyRep,
        developing: DevelopingMap,
    ) -> Result<Self, FoliationError> {
        let cov = complex.covering().ok_or(FoliationError::MissingCovering)?;
        if holonomy.images.len() != cov.rank() {
            return Err(FoliationError::HolonomyCount {
                expected: cov.rank(),
                got: holonomy.images.len(),
            });
        }
        for g in holonomy.images.iter().chain(developing.samples.values()) {
            if g.tag() != tag {
                return Err(FoliationError::GroupMismatch {
                    expected: tag,
                    got: g.tag(),
                });
            }
        }
        match (&mc, tag) {
            (MaurerCartan::Abelian(ws), GroupTag::Vector { dim }) => {
                if ws.len() != dim {
                    return Err(FoliationError::GroupMismatch {
                        expected: tag,
                        got: GroupTag::Vector { dim: ws.len() },
                    });
                }
                for w in ws {
                    ScalarCochain1::from_values(&complex, w.values().to_vec())?;
                }
            }
            (MaurerCartan::Lie(w), GroupTag::Affine | GroupTag::Special { .. }) => {
                let n = tag.matrix_dim().expect("matrix group");
                if w.dim() != n {
                    return Err(FoliationError::GroupMismatch {
                        expected: tag,
                        got: GroupTag::Special { n: w.dim() },
                    });
                }
                LieCochain1::from_values(&complex, n, w.values().to_vec())?;
            }
            _ => {
                return Err(FoliationError::GroupMismatch {
                    expected: tag,
                    got: match &mc {
                        MaurerCartan::Abelian(ws) => GroupTag::Vector { dim: ws.len() },
                        MaurerCartan::Lie(w) => GroupTag::Special { n: w.dim() },
                    },
                })
            }
        }
        Ok(Self {
            complex,
            tag,
            mc,
            holonomy,
            developing,
        })
    }

    /// Builds a spec from developing-map samples: the Maurer–Cartan cochain is
    /// read off the samples along lifted edges, then flatness is verified.
    pub fn from_developing(
        complex: Arc<SimplicialComplex>,
        tag: GroupTag,
        holonomy: Vec<GroupElement>,
        developing: DevelopingMap,
        tol: &crate::linalg::Tolerances,
    ) -> Result<Self, FoliationError> {
        let mc = derive_mc(&complex, tag, &developing)?;
        let spec = Self::from_parts(
            complex,
            tag,
            mc,
            HolonomyRep { images: holonomy },
            developing,
        )?;
        let failing = flatness_failures(&spec, tol)?;
        if !failing.is_empty() {
            let report = check_mc(&spec, tol)?;
            return Err(FoliationError::CheckFailed {
                what: "flatness of the derived Maurer–Cartan cochain".into(),
                max_residual: report.max_holonomy_residual,
                failing,
            });
        }
        Ok(spec)
    }

    pub fn complex(&self) -> &SimplicialComplex {
        &self.complex
    }

    pub fn complex_arc(&self) -> Arc<SimplicialComplex> {
        Arc::clone(&self.complex)
    }

    pub fn tag(&self) -> GroupTag {
        self.tag
    }

    pub fn mc(&self) -> &MaurerCartan {
        &self.mc
    }

    pub fn holonomy(&self) -> &HolonomyRep {
        &self.holonomy
    }

    pub fn developing(&self) -> &DevelopingMap {
        &self.developing
    }

    /// Replaces the holonomy images, keeping everything else.
    pub fn with_holonomy(mut self, images: Vec<GroupElement>) -> Result<Self, FoliationError> {
        if images.len() != self.holonomy.images.len() {
            return Err(FoliationError::HolonomyCount {
                expected: self.holonomy.images.len(),
                got: images.len(),
            });
        }
        self.holonomy = HolonomyRep { images };
        Ok(self)
    }

    /// Replaces the developing-map samples, keeping everything else.
    pub fn with_developing(mut self, developing: DevelopingMap) -> Self {
        self.developing = developing;
        self
    }

    /// Replaces the Maurer–Cartan cochain.
    pub fn with_mc(self, mc: MaurerCartan) -> Result<Self, FoliationError> {
        Self::from_parts(self.complex, self.tag, mc, self.holonomy, self.developing)
    }
}

/// Algebra-valued increment `log(a^-1 b)` (or `b - a` for vectors).
pub(crate) fn relative_value(
    a: &GroupElement,
    b: &GroupElement,
) -> Result<McValue, FoliationError> {
    a.expect_same(b)?;
    if let (GroupElement::Vector(x), GroupElement::Vector(y)) = (a, b) {
        return Ok(McValue::Abelian(
            y.iter().zip(x).map(|(p, q)| p - q).collect(),
        ));
    }
    let am = a.as_matrix().expect("matrix group");
    let bm = b.as_matrix().expect("matrix group");
    let rel = &inverse(&am)? * &bm;
    Ok(McValue::Lie(AlgebraElement::from_matrix(&matrix_log(
        &rel,
    )?)?))
}

pub(crate) enum McValue {
    Abelian(Vec<f64>),
    Lie(AlgebraElement<f64>),
}

/// Maurer–Cartan cochain read off the developing map along lifted edges:
/// `log(D(u, 0)^-1 D(v, s))` for the lift `(v, s)` adjacent to `(u, 0)`.
pub fn derive_mc(
    complex: &SimplicialComplex,
    tag: GroupTag,
    developing: &DevelopingMap,
) -> Result<MaurerCartan, FoliationError> {
    let origin = vec![
        0i64;
        complex
            .covering()
            .ok_or(FoliationError::MissingCovering)?
            .rank()
    ];
    let mut abelian: Vec<Vec<f64>> = Vec::new();
    let mut lie = Vec::new();
    for &[u, v] in complex.edges() {
        let shift = complex.lift_shift(u, v)?;
        let a = developing.require(u, &origin)?;
        let b = developing.require(v, &shift)?;
        match relative_value(a, b)? {
            McValue::Abelian(d) => abelian.push(d),
            McValue::Lie(x) => lie.push(x),
        }
    }
    Ok(match tag {
        GroupTag::Vector { dim } => MaurerCartan::Abelian(
            (0..dim)
                .map(|i| {
                    ScalarCochain1::from_values(complex, abelian.iter().map(|d| d[i]).collect())
                })
                .collect::<Result<_, _>>()?,
        ),
        _ => MaurerCartan::Lie(LieCochain1::from_values(
            complex,
            tag.matrix_dim().expect("matrix group"),
            lie,
        )?),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn window_sizes() {
        assert_eq!(window(2, 1).len(), 9);
        assert_eq!(window(3, 1).len(), 27);
        assert_eq!(window(0, 1), vec![Vec::<i64>::new()]);
    }

    #[test]
    fn group_element_arithmetic() {
        let a = GroupElement::Affine(GAElement::new(2.0, 1.0).unwrap());
        let id = GroupElement::identity(GroupTag::Affine).unwrap();
        assert_eq!(
            a.mul(&a.inv().unwrap()).unwrap().distance(&id).unwrap(),
            0.0
        );
        let v = GroupElement::Vector(vec![1.0, 2.0]);
        assert_eq!(v.mul(&v).unwrap(), GroupElement::Vector(vec![2.0, 4.0]));
        assert!(matches!(
            v.mul(&a),
            Err(FoliationError::GroupMismatch { .. })
        ));
    }
}
