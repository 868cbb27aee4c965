//! JSON file formats for matrices, complexes, cochains and foliation specs.
//!
//! Scalars are JSON numbers or strings `"p/q"` (exact rationals). A complex
//! is either `{"torus": {"dims": [..]}}`, expanded with [`grid_torus`], or an
//! explicit listing of vertices, edges, triangles, covering and homology.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::AlgebraElement;
use crate::cochain::{LieCochain1, ScalarCochain1};
use crate::complex::{grid_torus, ComplexError, Covering, Cycle, HomologyBasis, SimplicialComplex};
use crate::foliation::{
    DevelopingMap, FoliationError, GroupElement, GroupTag, HolonomyRep, LieFoliationSpec,
    MaurerCartan,
};
use crate::group::GAElement;
use crate::linalg::{
    rational_from_f64, FMatrix, LinalgError, RMatrix, Rational, Scalar, Tolerances,
};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("invalid value: {0}")]
    Invalid(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error(transparent)]
    Foliation(#[from] FoliationError),
}

/// A JSON number or an exact `"p/q"` string.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Number {
    Float(f64),
    Text(String),
}

impl Number {
    pub fn to_rational(&self) -> Result<Rational, IoError> {
        match self {
            Number::Float(x) => {
                rational_from_f64(*x).ok_or_else(|| IoError::Invalid(format!("non-finite {x}")))
            }
            Number::Text(s) => s
                .trim()
                .parse::<Rational>()
                .map_err(|_| IoError::Invalid(format!("not a rational: {s:?}"))),
        }
    }

    pub fn to_f64(&self) -> Result<f64, IoError> {
        match self {
            Number::Float(x) => Ok(*x),
            Number::Text(_) => Ok(Scalar::to_f64(&self.to_rational()?)),
        }
    }
}

impl From<f64> for Number {
    fn from(x: f64) -> Self {
        Number::Float(x)
    }
}

impl From<&Rational> for Number {
    fn from(x: &Rational) -> Self {
        Number::Text(x.to_string())
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum MatrixFile {
    Wrapped { matrix: Vec<Vec<Number>> },
    Bare(Vec<Vec<Number>>),
}

/// Reads `[[..], ..]` or `{"matrix": [[..], ..]}` exactly.
pub fn parse_matrix(text: &str) -> Result<RMatrix, IoError> {
    let rows = match serde_json::from_str::<MatrixFile>(text)? {
        MatrixFile::Wrapped { matrix } | MatrixFile::Bare(matrix) => matrix,
    };
    let rows = rows
        .iter()
        .map(|r| {
            r.iter()
                .map(Number::to_rational)
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(RMatrix::from_rows(rows)?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TorusFile {
    pub dims: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoveringFile {
    pub rank: usize,
    pub edge_shifts: Vec<Vec<i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub positions: Option<Vec<Vec<f64>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HomologyFile {
    /// Closed vertex paths, last vertex repeating the first.
    pub cycles: Vec<Vec<usize>>,
    /// One closed cochain per cycle, values per stored edge.
    pub duals: Vec<Vec<Number>>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ComplexFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub torus: Option<TorusFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vertices: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub edges: Option<Vec<[usize; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub triangles: Option<Vec<[usize; 3]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub top_simplices: Option<Vec<Vec<usize>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub covering: Option<CoveringFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub homology: Option<HomologyFile>,
}

impl ComplexFile {
    pub fn torus(dims: &[usize]) -> Self {
        Self {
            torus: Some(TorusFile {
                dims: dims.to_vec(),
            }),
            ..Self::default()
        }
    }

    /// Grid tori are written by their dimensions, anything else explicitly.
    pub fn from_complex(c: &SimplicialComplex) -> Self {
        if let Some(dims) = c.grid_dims() {
            return Self::torus(dims);
        }
        let top: Vec<Vec<usize>> = c.triangles().iter().map(|t| t.to_vec()).collect();
        Self {
            torus: None,
            vertices: Some(c.n_vertices()),
            edges: Some(c.edges().to_vec()),
            triangles: Some(c.triangles().to_vec()),
            top_simplices: (c.top_simplices() != top.as_slice() && !c.triangles().is_empty())
                .then(|| c.top_simplices().to_vec()),
            covering: c.covering().map(|cov| CoveringFile {
                rank: cov.rank(),
                edge_shifts: cov.edge_shifts().to_vec(),
                positions: cov.positions().map(<[Vec<f64>]>::to_vec),
            }),
            homology: c.homology().map(|h| HomologyFile {
                cycles: h.cycles.iter().map(|cy| cy.vertices().to_vec()).collect(),
                duals: h
                    .duals
                    .iter()
                    .map(|d| d.values().iter().map(Number::from).collect())
                    .collect(),
            }),
        }
    }

    pub fn build(&self) -> Result<SimplicialComplex, IoError> {
        if let Some(t) = &self.torus {
            return Ok(grid_torus(&t.dims)?);
        }
        let missing = |what: &str| IoError::Invalid(format!("complex needs `torus` or `{what}`"));
        let mut c = SimplicialComplex::new(
            self.vertices.ok_or_else(|| missing("vertices"))?,
            self.edges.clone().ok_or_else(|| missing("edges"))?,
            self.triangles.clone().unwrap_or_default(),
        )?;
        if let Some(top) = &self.top_simplices {
            c = c.with_top_simplices(top.clone())?;
        }
        if let Some(cov) = &self.covering {
            c = c.with_covering(Covering::new(
                cov.rank,
                cov.edge_shifts.clone(),
                cov.positions.clone(),
            ))?;
        }
        if let Some(h) = &self.homology {
            let cycles = h
                .cycles
                .iter()
                .map(|v| Cycle::new(v.clone()))
                .collect::<Result<Vec<_>, _>>()?;
            let duals = h
                .duals
                .iter()
                .map(|d| {
                    let values = d
                        .iter()
                        .map(Number::to_rational)
                        .collect::<Result<Vec<_>, _>>()?;
                    Ok(ScalarCochain1::from_values(&c, values)?)
                })
                .collect::<Result<Vec<_>, IoError>>()?;
            c = c.with_homology(HomologyBasis { cycles, duals })?;
        }
        Ok(c)
    }
}

/// Cochain values: a list in stored-edge order, or an object keyed by
/// `"u-v"` (a key `"v-u"` gives the negated value).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CochainValues {
    List(Vec<Number>),
    Keyed(std::collections::BTreeMap<String, Number>),
}

impl CochainValues {
    pub fn to_rational(
        &self,
        complex: &SimplicialComplex,
    ) -> Result<ScalarCochain1<Rational>, IoError> {
        match self {
            CochainValues::List(v) => Ok(ScalarCochain1::from_values(
                complex,
                v.iter()
                    .map(Number::to_rational)
                    .collect::<Result<_, _>>()?,
            )?),
            CochainValues::Keyed(map) => {
                let mut values: Vec<Option<Rational>> = vec![None; complex.edges().len()];
                for (key, x) in map {
                    let (u, v) = key
                        .split_once('-')
                        .and_then(|(a, b)| {
                            Some((
                                a.trim().parse::<usize>().ok()?,
                                b.trim().parse::<usize>().ok()?,
                            ))
                        })
                        .ok_or_else(|| {
                            IoError::Invalid(format!("edge key {key:?} is not \"u-v\""))
                        })?;
                    let (e, o) = complex.edge_between(u, v)?;
                    let x = x.to_rational()?;
                    values[e] = Some(match o {
                        crate::complex::Orientation::Forward => x,
                        crate::complex::Orientation::Backward => -x,
                    });
                }
                let values = values
                    .into_iter()
                    .enumerate()
                    .map(|(e, x)| {
                        x.ok_or_else(|| IoError::Invalid(format!("no value for edge {e}")))
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(ScalarCochain1::from_values(complex, values)?)
            }
        }
    }
}

/// Input of the circle-map construction: a complex with a closed cochain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CochainFile {
    pub complex: ComplexFile,
    pub cochain: CochainValues,
}

impl CochainFile {
    pub fn parse(text: &str) -> Result<(SimplicialComplex, ScalarCochain1<Rational>), IoError> {
        let file: CochainFile = serde_json::from_str(text)?;
        let complex = file.complex.build()?;
        let w = file.cochain.to_rational(&complex)?;
        Ok((complex, w))
    }
}

/// Group element: a number list for vectors, `{"a", "b"}` for GA, rows for
/// SL(n).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ElementFile {
    Affine { a: f64, b: f64 },
    Vector(Vec<f64>),
    Matrix(Vec<Vec<f64>>),
}

impl ElementFile {
    pub fn from_element(g: &GroupElement) -> Self {
        match g {
            GroupElement::Vector(v) => ElementFile::Vector(v.clone()),
            GroupElement::Affine(a) => ElementFile::Affine { a: a.a(), b: a.b() },
            GroupElement::Special(m) => ElementFile::Matrix(m.rows()),
        }
    }

    pub fn to_element(&self, tag: GroupTag) -> Result<GroupElement, IoError> {
        let bad = || IoError::Invalid(format!("element does not match group {tag}"));
        match (self, tag) {
            (ElementFile::Vector(v), GroupTag::Vector { dim }) if v.len() == dim => {
                Ok(GroupElement::Vector(v.clone()))
            }
            (ElementFile::Affine { a, b }, GroupTag::Affine) => Ok(GroupElement::Affine(
                GAElement::new(*a, *b).map_err(FoliationError::from)?,
            )),
            (ElementFile::Vector(v), GroupTag::Affine) if v.len() == 2 => Ok(GroupElement::Affine(
                GAElement::new(v[0], v[1]).map_err(FoliationError::from)?,
            )),
            (ElementFile::Matrix(rows), GroupTag::Special { n }) if rows.len() == n => {
                Ok(GroupElement::Special(FMatrix::from_rows(rows.clone())?))
            }
            _ => Err(bad()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleFile {
    pub vertex: usize,
    pub shift: Vec<i64>,
    pub value: ElementFile,
}

/// A Lie foliation on disk. Without `cochain` the Maurer–Cartan cochain is
/// read off the developing samples; with it, the stored values are used as
/// given (per edge: components for vector groups, sl(n) coefficients
/// otherwise).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpecFile {
    pub group: GroupTag,
    pub complex: ComplexFile,
    pub holonomy: Vec<ElementFile>,
    pub developing: Vec<SampleFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cochain: Option<Vec<Vec<f64>>>,
}

impl SpecFile {
    pub fn from_spec(spec: &LieFoliationSpec, include_cochain: bool) -> Self {
        let cochain = include_cochain.then(|| match spec.mc() {
            MaurerCartan::Abelian(ws) => (0..ws.first().map_or(0, ScalarCochain1::len))
                .map(|e| ws.iter().map(|w| w.values()[e]).collect())
                .collect(),
            MaurerCartan::Lie(w) => w.values().iter().map(|x| x.coeffs().to_vec()).collect(),
        });
        Self {
            group: spec.tag(),
            complex: ComplexFile::from_complex(spec.complex()),
            holonomy: spec
                .holonomy()
                .images
                .iter()
                .map(ElementFile::from_element)
                .collect(),
            developing: spec
                .developing()
                .iter()
                .map(|((v, s), g)| SampleFile {
                    vertex: *v,
                    shift: s.clone(),
                    value: ElementFile::from_element(g),
                })
                .collect(),
            cochain,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("spec serializes")
    }

    /// Builds the spec. A derived cochain is checked for flatness; a stored
    /// one is taken as is so that checks can report on it.
    pub fn build(&self, tol: &Tolerances) -> Result<LieFoliationSpec, IoError> {
        self.assemble(Some(tol))
    }

    /// Builds the spec without any flatness check.
    pub fn build_unchecked(&self) -> Result<LieFoliationSpec, IoError> {
        self.assemble(None)
    }

    fn assemble(&self, tol: Option<&Tolerances>) -> Result<LieFoliationSpec, IoError> {
        let complex = std::sync::Arc::new(self.complex.build()?);
        let tag = self.group;
        let holonomy = self
            .holonomy
            .iter()
            .map(|h| h.to_element(tag))
            .collect::<Result<Vec<_>, _>>()?;
        let mut developing = DevelopingMap::new();
        for s in &self.developing {
            if s.vertex >= complex.n_vertices() {
                return Err(IoError::Invalid(format!(
                    "sample vertex {} out of range",
                    s.vertex
                )));
            }
            developing.insert(s.vertex, s.shift.clone(), s.value.to_element(tag)?);
        }
        let Some(rows) = &self.cochain else {
            return Ok(match tol {
                Some(tol) => {
                    LieFoliationSpec::from_developing(complex, tag, holonomy, developing, tol)?
                }
                None => {
                    let mc = crate::foliation::derive_mc(&complex, tag, &developing)?;
                    LieFoliationSpec::from_parts(
                        complex,
                        tag,
                        mc,
                        HolonomyRep { images: holonomy },
                        developing,
                    )?
                }
            });
        };
        let mc = match tag {
            GroupTag::Vector { dim } => {
                if rows.iter().any(|r| r.len() != dim) {
                    return Err(IoError::Invalid(format!(
                        "cochain rows must have {dim} entries"
                    )));
                }
                MaurerCartan::Abelian(
                    (0..dim)
                        .map(|i| {
                            ScalarCochain1::from_values(
                                &complex,
                                rows.iter().map(|r| r[i]).collect(),
                            )
                        })
                        .collect::<Result<_, _>>()?,
                )
            }
            _ => {
                let n = tag.matrix_dim().expect("matrix group");
                let values = rows
                    .iter()
                    .map(|r| AlgebraElement::from_coeffs(n, r.clone()))
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(FoliationError::from)?;
                MaurerCartan::Lie(LieCochain1::from_values(&complex, n, values)?)
            }
        };
        Ok(LieFoliationSpec::from_parts(
            complex,
            tag,
            mc,
            HolonomyRep { images: holonomy },
            developing,
        )?)
    }
}
