use std::fmt;

use num_integer::Integer;
use serde::Serialize;

use super::circle::{
    check_submersion, fiber_census, generic_values, integrate_to_circle, CircleMap,
};
use super::rationalize::{rationalize, RationalizeConfig};
use super::TischlerError;
use crate::cochain::{coboundary, ScalarCochain1};
use crate::foliation::{
    check_mc, project_foliation, Factor, FoliationError, GroupTag, LieFoliationSpec, MaurerCartan,
    ProductStructure,
};
use crate::group::factor_split;
use crate::linalg::Tolerances;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PipelineConfig {
    pub rationalize: RationalizeConfig,
    /// Number of generic values sampled by the fiber census.
    pub census_values: usize,
    /// Largest coefficient tried when combining two components.
    pub max_height: i64,
    pub tolerances: Tolerances,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            rationalize: RationalizeConfig::default(),
            census_values: 10,
            max_height: 8,
            tolerances: Tolerances::default(),
        }
    }
}

impl PipelineConfig {
    pub fn with_epsilon(epsilon: f64) -> Result<Self, TischlerError> {
        Ok(Self {
            rationalize: RationalizeConfig::new(
                epsilon,
                RationalizeConfig::default().max_denominator,
            )?,
            ..Self::default()
        })
    }
}

/// One pipeline stage, in execution order.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "stage", rename_all = "snake_case")]
pub enum StageRecord {
    MaurerCartan {
        flat: bool,
        surjective: bool,
        max_holonomy_residual: f64,
        rank_deficient_vertices: usize,
    },
    Split {
        structure: String,
        g1_coords: Vec<usize>,
        g2_coords: Vec<usize>,
    },
    Projection {
        components: usize,
    },
    Closedness {
        max_residual: Vec<f64>,
        failing_triangles: Vec<usize>,
    },
    Selection {
        coefficients: Vec<i64>,
        tried: usize,
    },
    Rationalize {
        periods: Vec<f64>,
        rational_periods: Vec<String>,
        perturbation: f64,
        epsilon: f64,
    },
    Integrate {
        q: String,
        periods: Vec<String>,
    },
    Submersion {
        checked: usize,
        failing: Vec<usize>,
    },
    Census {
        values: Vec<String>,
        components: Vec<usize>,
        constant: bool,
    },
    Failed {
        error: String,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PipelineReport {
    pub group: String,
    pub stages: Vec<StageRecord>,
    pub completed: bool,
}

impl PipelineReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// A completed run: the report and the circle map it certifies.
#[derive(Debug, Clone, PartialEq)]
pub struct PipelineOutput {
    pub report: PipelineReport,
    pub map: CircleMap,
    /// The closed cochain `w'` integrated into `map`, in floating point.
    pub cochain: ScalarCochain1<f64>,
}

/// A failed run, with the report up to and including the failing stage.
#[derive(Debug, Clone, PartialEq)]
pub struct PipelineError {
    pub error: TischlerError,
    pub report: PipelineReport,
}

impl fmt::Display for PipelineError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.error.fmt(f)
    }
}

impl std::error::Error for PipelineError {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        Some(&self.error)
    }
}

/// Coefficient vectors in the order they are tried: unit vectors, then
/// primitive integer pairs on the first two components by height.
fn candidates(k: usize, max_height: i64) -> Vec<Vec<i64>> {
    let mut out: Vec<Vec<i64>> = (0..k)
        .map(|i| (0..k).map(|j| i64::from(i == j)).collect())
        .collect();
    if k < 2 {
        return out;
    }
    for h in 1..=max_height {
        for c1 in 0..=h {
            for c2 in -h..=h {
                if c1.abs().max(c2.abs()) != h || c1.gcd(&c2) != 1 || (c1 == 0 && c2 < 0) {
                    continue;
                }
                let mut c = vec![0; k];
                c[0] = c1;
                c[1] = c2;
                if !out.contains(&c) {
                    out.push(c);
                }
            }
        }
    }
    out
}

struct Run {
    report: PipelineReport,
}

impl Run {
    fn fail(mut self, error: TischlerError) -> PipelineError {
        self.report.stages.push(StageRecord::Failed {
            error: error.to_string(),
        });
        PipelineError {
            error,
            report: self.report,
        }
    }
}

/// Projects an SL(n) foliation onto the `R^2` factor of its Iwasawa chart
/// and turns a nonsingular closed component into a circle map.
///
/// Vector-group specs skip the split and use their own components. The run
/// aborts if the cochain is not flat or a projected component is not closed;
/// surjectivity is recorded but does not stop the run.
#[allow(clippy::result_large_err)]
pub fn pipeline_sln(
    spec: &LieFoliationSpec,
    cfg: &PipelineConfig,
) -> Result<PipelineOutput, PipelineError> {
    let tol = &cfg.tolerances;
    let mut run = Run {
        report: PipelineReport {
            group: spec.tag().to_string(),
            stages: Vec::new(),
            completed: false,
        },
    };
    macro_rules! attempt {
        ($e:expr) => {
            match $e {
                Ok(v) => v,
                Err(e) => return Err(run.fail(e.into())),
            }
        };
    }

    let mc = attempt!(check_mc(spec, tol));
    run.report.stages.push(StageRecord::MaurerCartan {
        flat: mc.flat,
        surjective: mc.surjective,
        max_holonomy_residual: mc.max_holonomy_residual,
        rank_deficient_vertices: mc.rank_deficient_vertices.len(),
    });
    if !mc.flat {
        return Err(run.fail(
            FoliationError::CheckFailed {
                what: "flatness of the Maurer–Cartan cochain".into(),
                max_residual: mc.max_holonomy_residual,
                failing: mc.failing_triangles,
            }
            .into(),
        ));
    }

    let complex = spec.complex();
    let components: Vec<ScalarCochain1<f64>> = match spec.tag() {
        GroupTag::Vector { dim } => {
            run.report.stages.push(StageRecord::Split {
                structure: format!("R^{dim} (abelian, no split)"),
                g1_coords: Vec::new(),
                g2_coords: (0..dim).collect(),
            });
            let MaurerCartan::Abelian(ws) = spec.mc() else {
                unreachable!("vector specs carry abelian cochains")
            };
            ws.clone()
        }
        GroupTag::Special { n } => {
            let split = attempt!(factor_split(n).map_err(FoliationError::from));
            run.report.stages.push(StageRecord::Split {
                structure: format!("SL({n}) = SO({n}) x R^{} x R^2", split.g1_coords.len()),
                g1_coords: split.g1_coords.clone(),
                g2_coords: split.g2_coords.to_vec(),
            });
            match project_foliation(spec, &ProductStructure::Iwasawa(split), Factor::Second, tol) {
                Ok(p) => {
                    let MaurerCartan::Abelian(ws) = p.mc() else {
                        unreachable!("projection onto R^2 is abelian")
                    };
                    ws.clone()
                }
                Err(FoliationError::CheckFailed {
                    what,
                    max_residual,
                    failing,
                }) => {
                    run.report.stages.push(StageRecord::Closedness {
                        max_residual: vec![max_residual],
                        failing_triangles: failing.clone(),
                    });
                    return Err(run.fail(
                        FoliationError::CheckFailed {
                            what,
                            max_residual,
                            failing,
                        }
                        .into(),
                    ));
                }
                Err(e) => return Err(run.fail(e.into())),
            }
        }
        GroupTag::Affine => {
            return Err(run.fail(TischlerError::UnsupportedGroup(spec.tag().to_string())))
        }
    };
    run.report.stages.push(StageRecord::Projection {
        components: components.len(),
    });

    let mut max_residual = Vec::new();
    let mut failing_triangles = Vec::new();
    for w in &components {
        let d = attempt!(coboundary(complex, w));
        max_residual.push(d.iter().map(|x| x.abs()).fold(0.0, f64::max));
        for (t, x) in d.iter().enumerate() {
            if (x.is_nan() || x.abs() > tol.eq_tol) && !failing_triangles.contains(&t) {
                failing_triangles.push(t);
            }
        }
    }
    failing_triangles.sort_unstable();
    run.report.stages.push(StageRecord::Closedness {
        max_residual: max_residual.clone(),
        failing_triangles: failing_triangles.clone(),
    });
    if let Some(&triangle) = failing_triangles.first() {
        let worst = max_residual.iter().copied().fold(0.0, f64::max);
        return Err(run.fail(TischlerError::NotClosed {
            max_residual: worst,
            triangle,
        }));
    }

    let mut tried = Vec::new();
    let mut chosen = None;
    for c in candidates(components.len(), cfg.max_height) {
        let mut w = ScalarCochain1::<f64>::zeros(complex);
        for (ci, comp) in c.iter().zip(&components) {
            if *ci != 0 {
                w = w.add(&comp.scale(&(*ci as f64)));
            }
        }
        let ok = attempt!(check_submersion(complex, &w, tol.eq_tol)).passed();
        tried.push(c.clone());
        if ok {
            chosen = Some((c, w));
            break;
        }
    }
    let Some((coefficients, w)) = chosen else {
        return Err(run.fail(TischlerError::NoSubmersion { tried }));
    };
    run.report.stages.push(StageRecord::Selection {
        coefficients,
        tried: tried.len(),
    });

    let r = attempt!(rationalize(complex, &w, &cfg.rationalize, tol));
    run.report.stages.push(StageRecord::Rationalize {
        periods: r
            .periods
            .iter()
            .map(|p| num_traits::ToPrimitive::to_f64(p).unwrap_or(f64::NAN))
            .collect(),
        rational_periods: r.rational_periods.iter().map(ToString::to_string).collect(),
        perturbation: r.perturbation,
        epsilon: cfg.rationalize.epsilon,
    });

    let map = attempt!(integrate_to_circle(complex, &r.cochain));
    run.report.stages.push(StageRecord::Integrate {
        q: map.q().to_string(),
        periods: map.periods().iter().map(ToString::to_string).collect(),
    });

    let increments = attempt!(ScalarCochain1::from_values(
        complex,
        map.increments().to_vec()
    ));
    let sub = attempt!(check_submersion(complex, &increments, 0.0));
    run.report.stages.push(StageRecord::Submersion {
        checked: sub.checked,
        failing: sub.failing.clone(),
    });
    if !sub.passed() {
        return Err(run.fail(TischlerError::SingularMap(sub.failing)));
    }

    let values = generic_values(&map, cfg.census_values);
    let mut counts = Vec::with_capacity(values.len());
    for v in &values {
        counts.push(attempt!(fiber_census(complex, &map, v)).components);
    }
    run.report.stages.push(StageRecord::Census {
        values: values.iter().map(ToString::to_string).collect(),
        constant: counts.windows(2).all(|p| p[0] == p[1]),
        components: counts,
    });
    run.report.completed = true;
    Ok(PipelineOutput {
        report: run.report,
        map,
        cochain: r
            .cochain
            .map(|x| num_traits::ToPrimitive::to_f64(x).unwrap_or(f64::NAN)),
    })
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::complex::torus_complex;
    use crate::foliation::{linear_abelian, product_foliation, suspension_ga};
    use crate::group::{rotation, GAElement};

    #[test]
    fn candidate_order() {
        let c = candidates(2, 2);
        assert_eq!(&c[..2], &[vec![1, 0], vec![0, 1]]);
        assert_eq!(c[2], vec![1, -1]);
        assert!(c.contains(&vec![2, 1]) && !c.contains(&vec![2, 2]) && !c.contains(&vec![-1, 1]));
        assert_eq!(candidates(1, 8), vec![vec![1]]);
    }

    #[test]
    fn abelian_base_case() {
        let tol = Tolerances::default();
        let t = Arc::new(torus_complex(2, 6).unwrap());
        let spec = linear_abelian(t, vec![vec![1.0, 0.0], vec![0.0, 2f64.sqrt()]], &tol).unwrap();
        let out = pipeline_sln(&spec, &PipelineConfig::default()).unwrap();
        assert!(out.report.completed);
        assert_eq!(out.map.periods().len(), 2);
        assert!(matches!(
            out.report.stages[4],
            StageRecord::Selection { ref coefficients, .. } if coefficients == &vec![1, 0]
        ));
        let StageRecord::Census {
            ref components,
            constant,
            ..
        } = out.report.stages[8]
        else {
            panic!()
        };
        assert!(constant && components[0] == 1);
    }

    #[test]
    fn product_spec_completes_deterministically() {
        let tol = Tolerances::default();
        let base = suspension_ga(5, GAElement::new(2.0, 0.0).unwrap(), &tol).unwrap();
        let spec = product_foliation(&base, rotation, 12, &tol).unwrap();
        let cfg = PipelineConfig::default();
        let a = pipeline_sln(&spec, &cfg).unwrap();
        let b = pipeline_sln(&spec, &cfg).unwrap();
        assert_eq!(a.report.to_json(), b.report.to_json());
        let StageRecord::Rationalize { perturbation, .. } = a.report.stages[5] else {
            panic!()
        };
        assert!(perturbation <= cfg.rationalize.epsilon);
    }

    #[test]
    fn zero_cochain_reports_tried_set() {
        let tol = Tolerances::default();
        let t = Arc::new(torus_complex(2, 3).unwrap());
        let spec = linear_abelian(t, vec![vec![0.0, 0.0], vec![0.0, 0.0]], &tol).unwrap();
        let err = pipeline_sln(&spec, &PipelineConfig::default()).unwrap_err();
        let TischlerError::NoSubmersion { tried } = &err.error else {
            panic!("{err}")
        };
        assert_eq!(tried.len(), candidates(2, 8).len());
        assert!(matches!(
            err.report.stages.last(),
            Some(StageRecord::Failed { .. })
        ));
    }
}
