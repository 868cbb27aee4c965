use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::rationalize::potential_along;
use super::TischlerError;
use crate::cochain::{coboundary, period, ScalarCochain1};
use crate::complex::{Orientation, SimplicialComplex};
use crate::linalg::{Rational, Scalar};

/// Spanning tree used to integrate a cochain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TreeKind {
    Bfs,
    Dfs,
}

/// A map from the vertices into `R/Z` with its lifted edge increments.
#[derive(Debug, Clone, PartialEq)]
pub struct CircleMap {
    values: Vec<Rational>,
    increments: Vec<Rational>,
    periods: Vec<BigInt>,
    q: BigInt,
}

impl CircleMap {
    /// Vertex values in `[0, 1)`.
    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    /// `q·w'` on every stored edge; `values[v] - values[u]` agrees with it
    /// modulo 1.
    pub fn increments(&self) -> &[Rational] {
        &self.increments
    }

    /// Degrees of the map along the generator cycles.
    pub fn periods(&self) -> &[BigInt] {
        &self.periods
    }

    pub fn q(&self) -> &BigInt {
        &self.q
    }

    fn increment(
        &self,
        complex: &SimplicialComplex,
        u: usize,
        v: usize,
    ) -> Result<Rational, TischlerError> {
        let (e, o) = complex.edge_between(u, v)?;
        Ok(match o {
            Orientation::Forward => self.increments[e].clone(),
            Orientation::Backward => -self.increments[e].clone(),
        })
    }
}

fn frac(x: &Rational) -> Rational {
    x - x.floor()
}

/// [`integrate_to_circle_with`] along the breadth-first tree.
pub fn integrate_to_circle(
    complex: &SimplicialComplex,
    w: &ScalarCochain1<Rational>,
) -> Result<CircleMap, TischlerError> {
    integrate_to_circle_with(complex, w, TreeKind::Bfs)
}

/// Integrates `q·w` along a spanning tree from vertex 0 and reduces mod 1,
/// where `q` is the least common denominator of the periods of `w`.
///
/// `w` must be exactly closed. Every edge is then verified exactly: `f(v) - f(u) ≡ q·w(u, v) (mod 1)`.
pub fn integrate_to_circle_with(
    complex: &SimplicialComplex,
    w: &ScalarCochain1<Rational>,
    tree: TreeKind,
) -> Result<CircleMap, TischlerError> {
    if complex.n_vertices() == 0 || !complex.is_connected() {
        return Err(TischlerError::Disconnected);
    }
    let d = coboundary(complex, w)?;
    if let Some(triangle) = d.iter().position(|x| !x.is_zero()) {
        return Err(TischlerError::NotClosed {
            max_residual: d
                .iter()
                .map(|x| Scalar::to_f64(&x.abs()))
                .fold(0.0, f64::max),
            triangle,
        });
    }
    let basis = complex.homology().ok_or(TischlerError::MissingHomology)?;
    let periods = basis
        .cycles
        .iter()
        .map(|c| period(complex, w, c))
        .collect::<Result<Vec<_>, _>>()?;
    let q = periods
        .iter()
        .fold(BigInt::one(), |acc, p| acc.lcm(p.denom()));
    let scaled = w.scale(&Rational::from_integer(q.clone()));
    let parents = match tree {
        TreeKind::Bfs => complex.bfs_tree(0),
        TreeKind::Dfs => complex.dfs_tree(0),
    };
    let lifted = potential_along(complex, &scaled, &parents)?;
    let values: Vec<Rational> = lifted.iter().map(frac).collect();
    for (edge, &[u, v]) in complex.edges().iter().enumerate() {
        let gap = &values[v] - &values[u] - &scaled.values()[edge];
        if !gap.is_integer() {
            return Err(TischlerError::IncrementMismatch { edge });
        }
    }
    let periods = periods
        .iter()
        .map(|p| (p * Rational::from_integer(q.clone())).to_integer())
        .collect();
    Ok(CircleMap {
        values,
        increments: scaled.values().to_vec(),
        periods,
        q,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SubmersionReport {
    pub checked: usize,
    /// Top simplices on whose edges the cochain vanishes identically.
    pub failing: Vec<usize>,
}

impl SubmersionReport {
    pub fn passed(&self) -> bool {
        self.failing.is_empty()
    }
}

/// A top simplex fails when every one of its edges carries a value of
/// magnitude at most `zero_tol` (exact zero when `zero_tol` is 0).
pub fn check_submersion<T: Scalar>(
    complex: &SimplicialComplex,
    w: &ScalarCochain1<T>,
    zero_tol: f64,
) -> Result<SubmersionReport, TischlerError> {
    ScalarCochain1::from_values(complex, w.values().to_vec())?;
    let mut failing = Vec::new();
    for (s, simplex) in complex.top_simplices().iter().enumerate() {
        let mut singular = true;
        'pairs: for (i, &a) in simplex.iter().enumerate() {
            for &b in &simplex[i + 1..] {
                let x = w.value(complex, a, b)?;
                if !x.is_zero() && x.abs().to_f64() > zero_tol {
                    singular = false;
                    break 'pairs;
                }
            }
        }
        if singular {
            failing.push(s);
        }
    }
    Ok(SubmersionReport {
        checked: complex.top_simplices().len(),
        failing,
    })
}

/// Level set of a circle map at one value.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FiberCensus {
    pub components: usize,
    /// Crossing points per component, largest first.
    pub component_sizes: Vec<usize>,
    pub crossing_points: usize,
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn find(&mut self, x: usize) -> usize {
        let mut root = x;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        let mut cur = x;
        while self.parent[cur] != root {
            let next = self.parent[cur];
            self.parent[cur] = root;
            cur = next;
        }
        root
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Counts the connected components of `f^-1(value)`.
///
/// The level set meets edges in isolated points, identified by the edge and
/// the offset of the level from the edge's tail in lifted coordinates (an
/// edge with increment of size at least 1 can be crossed several times).
/// Points on the same top simplex and the same sheet are connected.
pub fn fiber_census(
    complex: &SimplicialComplex,
    f: &CircleMap,
    value: &Rational,
) -> Result<FiberCensus, TischlerError> {
    let value = frac(value);
    if f.values.iter().any(|x| x == &value) {
        return Err(TischlerError::NonGenericValue(value));
    }
    let mut ids: BTreeMap<(usize, Rational), usize> = BTreeMap::new();
    let mut links: Vec<(usize, usize)> = Vec::new();
    for (s, simplex) in complex.top_simplices().iter().enumerate() {
        let base = f.values[simplex[0]].clone();
        let mut lift = vec![base.clone()];
        for &v in &simplex[1..] {
            lift.push(&base + f.increment(complex, simplex[0], v)?);
        }
        for i in 0..simplex.len() {
            for j in i + 1..simplex.len() {
                if &lift[j] - &lift[i] != f.increment(complex, simplex[i], simplex[j])? {
                    return Err(TischlerError::InconsistentLift(s));
                }
            }
        }
        let lo = lift.iter().min().expect("nonempty simplex");
        let hi = lift.iter().max().expect("nonempty simplex");
        let k_lo = (lo - &value).ceil().to_integer();
        let k_hi = (hi - &value).floor().to_integer();
        let mut k = k_lo;
        while k <= k_hi {
            let level = &value + Rational::from_integer(k.clone());
            let mut first: Option<usize> = None;
            for i in 0..simplex.len() {
                for j in i + 1..simplex.len() {
                    let (a, b) = (&lift[i], &lift[j]);
                    if !((a < &level && &level < b) || (b < &level && &level < a)) {
                        continue;
                    }
                    let (e, o) = complex.edge_between(simplex[i], simplex[j])?;
                    let tail = match o {
                        Orientation::Forward => a,
                        Orientation::Backward => b,
                    };
                    let next = ids.len();
                    let id = *ids.entry((e, &level - tail)).or_insert(next);
                    match first {
                        Some(f0) => links.push((f0, id)),
                        None => first = Some(id),
                    }
                }
            }
            k += 1;
        }
    }
    let mut uf = UnionFind {
        parent: (0..ids.len()).collect(),
    };
    for (a, b) in links {
        uf.union(a, b);
    }
    let mut sizes: BTreeMap<usize, usize> = BTreeMap::new();
    for x in 0..ids.len() {
        *sizes.entry(uf.find(x)).or_default() += 1;
    }
    let mut component_sizes: Vec<usize> = sizes.into_values().collect();
    component_sizes.sort_unstable_by(|a, b| b.cmp(a));
    Ok(FiberCensus {
        components: component_sizes.len(),
        component_sizes,
        crossing_points: ids.len(),
    })
}

/// `count` deterministic values in `(0, 1)` avoiding every vertex image:
/// midpoints of `count` equal bins nudged by a small rational.
pub fn generic_values(f: &CircleMap, count: usize) -> Vec<Rational> {
    (0..count)
        .map(|i| {
            let mid = Rational::new(BigInt::from(2 * i + 1), BigInt::from(2 * count));
            (7919i64..)
                .map(|p| frac(&(&mid + Rational::new(BigInt::one(), BigInt::from(p)))))
                .find(|v| !f.values.contains(v))
                .expect("finitely many vertex images")
        })
        .collect()
}
