use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use super::{derive_mc, FoliationError, GroupElement, GroupTag, LieFoliationSpec, MaurerCartan};
use crate::cochain::{coboundary, flatness_residual, holonomy_residual};
use crate::linalg::{numerical_rank, Tolerances};

/// Relative singular-value threshold of the discrete surjectivity test.
pub const RANK_THRESHOLD: f64 = 1e-8;

/// Charts `U_i` (vertex sets), local submersions `f_i` and transitions
/// `γ_ij` with `f_j = γ_ij · f_i` expected on `U_i ∩ U_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct FoliatedCocycle {
    tag: GroupTag,
    charts: Vec<BTreeSet<usize>>,
    submersions: Vec<BTreeMap<usize, GroupElement>>,
    transitions: BTreeMap<(usize, usize), GroupElement>,
}

impl FoliatedCocycle {
    /// Every vertex below `n_vertices` must lie in some chart, and each
    /// submersion must be sampled on exactly its chart.
    pub fn new(
        n_vertices: usize,
        tag: GroupTag,
        submersions: Vec<BTreeMap<usize, GroupElement>>,
        transitions: BTreeMap<(usize, usize), GroupElement>,
    ) -> Result<Self, FoliationError> {
        let charts: Vec<BTreeSet<usize>> = submersions
            .iter()
            .map(|f| f.keys().copied().collect())
            .collect();
        if let Some(v) = (0..n_vertices).find(|v| !charts.iter().any(|c| c.contains(v))) {
            return Err(FoliationError::UncoveredVertex(v));
        }
        for g in submersions
            .iter()
            .flat_map(|f| f.values())
            .chain(transitions.values())
        {
            if g.tag() != tag {
                return Err(FoliationError::GroupMismatch {
                    expected: tag,
                    got: g.tag(),
                });
            }
        }
        Ok(Self {
            tag,
            charts,
            submersions,
            transitions,
        })
    }

    /// Star charts of a spec: chart `i` is vertex `i` and its neighbours,
    /// with `f_i` the developing map on the lifts adjacent to `(i, 0)`.
    /// Transitions are holonomy images of the shift between overlapping lifts.
    pub fn from_spec(spec: &LieFoliationSpec) -> Result<Self, FoliationError> {
        let complex = spec.complex();
        let rank = complex
            .covering()
            .ok_or(FoliationError::MissingCovering)?
            .rank();
        let origin = vec![0i64; rank];
        let mut lifts: Vec<BTreeMap<usize, Vec<i64>>> = Vec::with_capacity(complex.n_vertices());
        let mut submersions = Vec::with_capacity(complex.n_vertices());
        for i in 0..complex.n_vertices() {
            let mut lift = BTreeMap::from([(i, origin.clone())]);
            for (_, w) in complex.incident_edges(i) {
                lift.insert(w, complex.lift_shift(i, w)?);
            }
            let mut f = BTreeMap::new();
            for (&w, s) in &lift {
                f.insert(w, spec.developing().require(w, s)?.clone());
            }
            lifts.push(lift);
            submersions.push(f);
        }
        let mut transitions = BTreeMap::new();
        for i in 0..lifts.len() {
            for j in 0..lifts.len() {
                let common = lifts[i]
                    .iter()
                    .find_map(|(w, si)| lifts[j].get(w).map(|sj| (si, sj)));
                if let Some((si, sj)) = common {
                    let k: Vec<i64> = sj.iter().zip(si).map(|(a, b)| a - b).collect();
                    transitions.insert((i, j), holonomy_of(spec, &k)?);
                }
            }
        }
        Self::new(complex.n_vertices(), spec.tag(), submersions, transitions)
    }

    pub fn tag(&self) -> GroupTag {
        self.tag
    }

    pub fn charts(&self) -> &[BTreeSet<usize>] {
        &self.charts
    }

    pub fn transitions(&self) -> &BTreeMap<(usize, usize), GroupElement> {
        &self.transitions
    }

    pub fn transitions_mut(&mut self) -> &mut BTreeMap<(usize, usize), GroupElement> {
        &mut self.transitions
    }
}

/// Image of the deck element `k` under the holonomy representation.
pub(crate) fn holonomy_of(
    spec: &LieFoliationSpec,
    k: &[i64],
) -> Result<GroupElement, FoliationError> {
    let mut g = GroupElement::identity(spec.tag())?;
    for (h, &ki) in spec.holonomy().images.iter().zip(k) {
        let step = if ki >= 0 { h.clone() } else { h.inv()? };
        for _ in 0..ki.unsigned_abs() {
            g = step.mul(&g)?;
        }
    }
    Ok(g)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CocycleViolation {
    Overlap {
        i: usize,
        j: usize,
        vertex: usize,
        deviation: f64,
    },
    Identity {
        i: usize,
        deviation: f64,
    },
    Triple {
        i: usize,
        j: usize,
        k: usize,
        deviation: f64,
    },
    MissingTransition {
        i: usize,
        j: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CocycleReport {
    pub max_violation: f64,
    pub overlaps_checked: usize,
    pub triples_checked: usize,
    pub violations: Vec<CocycleViolation>,
}

impl CocycleReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks `f_j = γ_ij · f_i` on overlaps, `γ_ii = id` and
/// `γ_jk · γ_ij = γ_ik` on nonempty triple overlaps. Entries above
/// `tol.eq_tol` are listed; a missing transition on an overlap is listed too.
pub fn check_cocycle(
    c: &FoliatedCocycle,
    tol: &Tolerances,
) -> Result<CocycleReport, FoliationError> {
    let mut report = CocycleReport {
        max_violation: 0.0,
        overlaps_checked: 0,
        triples_checked: 0,
        violations: Vec::new(),
    };
    let record = |report: &mut CocycleReport, dev: f64, v: CocycleViolation| {
        report.max_violation = report.max_violation.max(dev);
        if dev > tol.eq_tol {
            report.violations.push(v);
        }
    };
    let id = GroupElement::identity(c.tag)?;
    let k = c.charts.len();
    for i in 0..k {
        if let Some(g) = c.transitions.get(&(i, i)) {
            let deviation = g.distance(&id)?;
            record(
                &mut report,
                deviation,
                CocycleViolation::Identity { i, deviation },
            );
        }
        for j in 0..k {
            if i == j {
                continue;
            }
            let overlap: Vec<usize> = c.charts[i].intersection(&c.charts[j]).copied().collect();
            if overlap.is_empty() {
                continue;
            }
            let Some(g) = c.transitions.get(&(i, j)) else {
                report
                    .violations
                    .push(CocycleViolation::MissingTransition { i, j });
                continue;
            };
            for v in overlap {
                report.overlaps_checked += 1;
                let deviation = c.submersions[j][&v].distance(&g.mul(&c.submersions[i][&v])?)?;
                record(
                    &mut report,
                    deviation,
                    CocycleViolation::Overlap {
                        i,
                        j,
                        vertex: v,
                        deviation,
                    },
                );
            }
        }
    }
    for i in 0..k {
        for j in 0..k {
            for l in 0..k {
                if i == j || j == l || i == l {
                    continue;
                }
                let nonempty = c.charts[i]
                    .iter()
                    .any(|v| c.charts[j].contains(v) && c.charts[l].contains(v));
                if !nonempty {
                    continue;
                }
                let (Some(gij), Some(gjl), Some(gil)) = (
                    c.transitions.get(&(i, j)),
                    c.transitions.get(&(j, l)),
                    c.transitions.get(&(i, l)),
                ) else {
                    continue;
                };
                report.triples_checked += 1;
                let deviation = gjl.mul(gij)?.distance(gil)?;
                record(
                    &mut report,
                    deviation,
                    CocycleViolation::Triple {
                        i,
                        j,
                        k: l,
                        deviation,
                    },
                );
            }
        }
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct McReport {
    pub flat: bool,
    /// Largest entry of `exp·exp·exp - I` per triangle (`|dω|` for abelian
    /// groups).
    pub max_holonomy_residual: f64,
    /// Largest coefficient of `dω + ½[ω, ω]` (equal to the above for abelian
    /// groups).
    pub max_algebraic_residual: f64,
    pub failing_triangles: Vec<usize>,
    pub surjective: bool,
    pub target_rank: usize,
    pub rank_deficient_vertices: Vec<usize>,
}

impl McReport {
    pub fn passed(&self) -> bool {
        self.flat && self.surjective
    }
}

/// Per-triangle flatness residual: holonomy residual for matrix groups, the
/// largest coboundary component for vector groups.
pub(crate) fn triangle_residuals(
    spec: &LieFoliationSpec,
) -> Result<(Vec<f64>, Vec<f64>), FoliationError> {
    let complex = spec.complex();
    let nt = complex.triangles().len();
    match spec.mc() {
        MaurerCartan::Abelian(ws) => {
            let mut res = vec![0.0f64; nt];
            for w in ws {
                for (r, d) in res.iter_mut().zip(coboundary(complex, w)?) {
                    *r = r.max(d.abs());
                }
            }
            Ok((res.clone(), res))
        }
        MaurerCartan::Lie(w) => {
            let hol = holonomy_residual(complex, w)?
                .iter()
                .map(|m| m.max_abs())
                .collect();
            let alg = flatness_residual(complex, w)?
                .iter()
                .map(|x| x.max_abs())
                .collect();
            Ok((hol, alg))
        }
    }
}

/// Triangles whose flatness residual exceeds `tol.eq_tol`.
pub fn flatness_failures(
    spec: &LieFoliationSpec,
    tol: &Tolerances,
) -> Result<Vec<usize>, FoliationError> {
    let (hol, _) = triangle_residuals(spec)?;
    Ok(hol
        .iter()
        .enumerate()
        .filter(|(_, &r)| r.is_nan() || r > tol.eq_tol)
        .map(|(t, _)| t)
        .collect())
}

/// Flatness and discrete surjectivity of the Maurer–Cartan cochain.
///
/// Surjectivity at a vertex means the values on its incident edges span the
/// Lie algebra (singular values above 1e-8 times the largest).
pub fn check_mc(spec: &LieFoliationSpec, tol: &Tolerances) -> Result<McReport, FoliationError> {
    let complex = spec.complex();
    let (hol, alg) = triangle_residuals(spec)?;
    let failing_triangles: Vec<usize> = hol
        .iter()
        .enumerate()
        .filter(|(_, &r)| r.is_nan() || r > tol.eq_tol)
        .map(|(t, _)| t)
        .collect();
    let target_rank = spec.tag().algebra_dim();
    let rows_at = |v: usize| -> Vec<Vec<f64>> {
        complex
            .incident_edges(v)
            .into_iter()
            .map(|(e, _)| match spec.mc() {
                MaurerCartan::Abelian(ws) => ws.iter().map(|w| w.values()[e]).collect(),
                MaurerCartan::Lie(w) => w.values()[e].coeffs().to_vec(),
            })
            .collect()
    };
    let rank_deficient_vertices: Vec<usize> = (0..complex.n_vertices())
        .filter(|&v| numerical_rank(&rows_at(v), RANK_THRESHOLD) < target_rank)
        .collect();
    Ok(McReport {
        flat: failing_triangles.is_empty(),
        max_holonomy_residual: hol.iter().copied().fold(0.0, f64::max),
        max_algebraic_residual: alg.iter().copied().fold(0.0, f64::max),
        failing_triangles,
        surjective: rank_deficient_vertices.is_empty(),
        target_rank,
        rank_deficient_vertices,
    })
}

/// Largest difference between the stored cochain and the one read off the
/// developing map along lifted edges.
pub fn consistency_deviation(spec: &LieFoliationSpec) -> Result<f64, FoliationError> {
    let derived = derive_mc(spec.complex(), spec.tag(), spec.developing())?;
    Ok(match (spec.mc(), &derived) {
        (MaurerCartan::Abelian(a), MaurerCartan::Abelian(b)) => a
            .iter()
            .zip(b)
            .flat_map(|(x, y)| {
                x.values()
                    .iter()
                    .zip(y.values())
                    .map(|(p, q)| (p - q).abs())
            })
            .fold(0.0, f64::max),
        (MaurerCartan::Lie(a), MaurerCartan::Lie(b)) => a
            .values()
            .iter()
            .zip(b.values())
            .map(|(x, y)| (x - y).max_abs())
            .fold(0.0, f64::max),
        _ => unreachable!("derived cochain has the spec's shape"),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquivarianceReport {
    pub max_deviation: f64,
    /// Largest deviation of `D(v, k + e_i)` from `h(e_i) · D(v, k)`, per `i`.
    pub per_generator: Vec<f64>,
    /// Largest `|h_i h_j - h_j h_i|`.
    pub relation_defect: f64,
    pub samples_checked: usize,
    /// `(vertex, shift, generator)` attaining the maximum.
    pub worst: Option<(usize, Vec<i64>, usize)>,
}

impl EquivarianceReport {
    pub fn passed(&self, tol: f64) -> bool {
        self.max_deviation <= tol && self.relation_defect <= tol
    }
}

/// Checks `D(γ · x) = h(γ) · D(x)` for every deck generator on every sample
/// whose translate is also sampled.
pub fn check_equivariance(spec: &LieFoliationSpec) -> Result<EquivarianceReport, FoliationError> {
    let rank = spec
        .complex()
        .covering()
        .ok_or(FoliationError::MissingCovering)?
        .rank();
    let images = &spec.holonomy().images;
    let mut report = EquivarianceReport {
        max_deviation: 0.0,
        per_generator: vec![0.0; rank],
        relation_defect: 0.0,
        samples_checked: 0,
        worst: None,
    };
    for ((v, shift), value) in spec.developing().iter() {
        for (i, h) in images.iter().enumerate() {
            let mut next = shift.clone();
            next[i] += 1;
            let Some(target) = spec.developing().get(*v, &next) else {
                continue;
            };
            report.samples_checked += 1;
            let dev = target.distance(&h.mul(value)?)?;
            report.per_generator[i] = report.per_generator[i].max(dev);
            if dev > report.max_deviation || report.worst.is_none() {
                report.max_deviation = report.max_deviation.max(dev);
                report.worst = Some((*v, shift.clone(), i));
            }
        }
    }
    for (i, a) in images.iter().enumerate() {
        for b in &images[i + 1..] {
            let d = a.mul(b)?.distance(&b.mul(a)?)?;
            report.relation_defect = report.relation_defect.max(d);
        }
    }
    Ok(report)
}
