//! Small simplicial complexes standing in for compact manifolds: the
//! Freudenthal (Kuhn) triangulation of the flat torus `T^d`, its `Z^d`
//! universal cover, and generator cycles of `H_1`.

use std::collections::{BTreeSet, HashMap, VecDeque};

use num_traits::{One, Zero};
use thiserror::Error;

use crate::algebra::AlgebraError;
use crate::cochain::ScalarCochain1;
use crate::linalg::{rat, Rational};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ComplexError {
    #[error("vertex {0} out of range")]
    VertexOutOfRange(usize),
    #[error("degenerate or duplicate simplex {0:?}")]
    DegenerateSimplex(Vec<usize>),
    #[error("no edge between {0} and {1}")]
    MissingEdge(usize, usize),
    #[error("torus needs at least 3 subdivisions per axis, got {0}")]
    TooFewSubdivisions(usize),
    #[error("unsupported torus dimension {0}")]
    UnsupportedDimension(usize),
    #[error("cochain has {got} values, complex has {expected} edges")]
    CochainLength { expected: usize, got: usize },
    #[error("broken cycle: {0}")]
    BrokenCycle(String),
    #[error("covering data inconsistent: {0}")]
    Covering(String),
    #[error("complex is not a grid torus")]
    NotAGrid,
    #[error("homology basis: {0}")]
    Homology(String),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// Orientation of a vertex pair relative to the stored edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    Forward,
    Backward,
}

/// Deck data of a `Z^rank` covering: a lift of vertex `v` is `(v, shift)`
/// with `shift` in `Z^rank`, and the `i`-th deck generator adds `e_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct Covering {
    rank: usize,
    /// Per stored edge `(u, v)`: the lift of `v` adjacent to `(u, 0)` is
    /// `(v, edge_shifts[e])`.
    edge_shifts: Vec<Vec<i64>>,
    /// Fundamental-domain coordinates; deck generators translate by unit
    /// vectors.
    positions: Option<Vec<Vec<f64>>>,
}

impl Covering {
    pub fn new(rank: usize, edge_shifts: Vec<Vec<i64>>, positions: Option<Vec<Vec<f64>>>) -> Self {
        Self {
            rank,
            edge_shifts,
            positions,
        }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn edge_shifts(&self) -> &[Vec<i64>] {
        &self.edge_shifts
    }

    pub fn positions(&self) -> Option<&[Vec<f64>]> {
        self.positions.as_deref()
    }

    /// Coordinates of the lift `(v, shift)`, when positions are known.
    pub fn position(&self, v: usize, shift: &[i64]) -> Option<Vec<f64>> {
        let base = self.positions.as_ref()?.get(v)?;
        Some(base.iter().zip(shift).map(|(x, &k)| x + k as f64).collect())
    }
}

/// A closed edge path given by its vertices; the last vertex repeats the first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cycle {
    vertices: Vec<usize>,
}

impl Cycle {
    pub fn new(vertices: Vec<usize>) -> Result<Self, ComplexError> {
        if vertices.len() < 3 {
            return Err(ComplexError::BrokenCycle("fewer than two edges".into()));
        }
        if vertices.first() != vertices.last() {
            return Err(ComplexError::BrokenCycle("path is not closed".into()));
        }
        Ok(Self { vertices })
    }

    pub fn vertices(&self) -> &[usize] {
        &self.vertices
    }

    pub fn reversed(&self) -> Self {
        Self {
            vertices: self.vertices.iter().rev().copied().collect(),
        }
    }

    /// Consecutive vertex pairs.
    pub fn steps(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.vertices.windows(2).map(|w| (w[0], w[1]))
    }
}

/// Generator cycles of `H_1` with closed cochains dual to them.
#[derive(Debug, Clone, PartialEq)]
pub struct HomologyBasis {
    pub cycles: Vec<Cycle>,
    pub duals: Vec<ScalarCochain1<Rational>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimplicialComplex {
    n_vertices: usize,
    edges: Vec<[usize; 2]>,
    edge_index: HashMap<(usize, usize), usize>,
    triangles: Vec<[usize; 3]>,
    top: Vec<Vec<usize>>,
    covering: Option<Covering>,
    homology: Option<HomologyBasis>,
    grid: Option<Vec<usize>>,
}

impl SimplicialComplex {
    /// Validates that every triangle's boundary edges are present.
    pub fn new(
        n_vertices: usize,
        edges: Vec<[usize; 2]>,
        triangles: Vec<[usize; 3]>,
    ) -> Result<Self, ComplexError> {
        let mut edge_index = HashMap::with_capacity(edges.len());
        for (k, &[u, v]) in edges.iter().enumerate() {
            for w in [u, v] {
                if w >= n_vertices {
                    return Err(ComplexError::VertexOutOfRange(w));
                }
            }
            if u == v || edge_index.insert((u.min(v), u.max(v)), k).is_some() {
                return Err(ComplexError::DegenerateSimplex(vec![u, v]));
            }
        }
        let mut seen = BTreeSet::new();
        for t in &triangles {
            let mut key = *t;
            key.sort_unstable();
            if key[0] == key[1] || key[1] == key[2] || !seen.insert(key) {
                return Err(ComplexError::DegenerateSimplex(t.to_vec()));
            }
            for (a, b) in [(t[0], t[1]), (t[1], t[2]), (t[0], t[2])] {
                if !edge_index.contains_key(&(a.min(b), a.max(b))) {
                    return Err(ComplexError::MissingEdge(a, b));
                }
            }
        }
        let top = if triangles.is_empty() {
            edges.iter().map(|e| e.to_vec()).collect()
        } else {
            triangles.iter().map(|t| t.to_vec()).collect()
        };
        Ok(Self {
            n_vertices,
            edges,
            edge_index,
            triangles,
            top,
            covering: None,
            homology: None,
            grid: None,
        })
    }

    /// Replaces the top-dimensional simplices (e.g. tetrahedra of a 3D complex).
    pub fn with_top_simplices(mut self, top: Vec<Vec<usize>>) -> Result<Self, ComplexError> {
        for s in &top {
            for (i, &a) in s.iter().enumerate() {
                for &b in &s[i + 1..] {
                    self.edge_between(a, b)?;
                }
            }
        }
        self.top = top;
        Ok(self)
    }

    pub fn with_covering(mut self, covering: Covering) -> Result<Self, ComplexError> {
        if covering.edge_shifts.len() != self.edges.len() {
            return Err(ComplexError::Covering("one shift per edge required".into()));
        }
        if covering
            .edge_shifts
            .iter()
            .any(|s| s.len() != covering.rank)
        {
            return Err(ComplexError::Covering(
                "shift length differs from rank".into(),
            ));
        }
        if let Some(p) = &covering.positions {
            if p.len() != self.n_vertices {
                return Err(ComplexError::Covering(
                    "one position per vertex required".into(),
                ));
            }
        }
        self.covering = Some(covering);
        // every triangle must lift to a closed triangle
        for t in &self.triangles {
            let ab = self.lift_shift(t[0], t[1])?;
            let bc = self.lift_shift(t[1], t[2])?;
            let ac = self.lift_shift(t[0], t[2])?;
            if ab.iter().zip(&bc).zip(&ac).any(|((x, y), z)| x + y != *z) {
                return Err(ComplexError::Covering(format!(
                    "triangle {t:?} does not lift"
                )));
            }
        }
        Ok(self)
    }

    pub fn with_homology(mut self, basis: HomologyBasis) -> Result<Self, ComplexError> {
        if basis.cycles.len() != basis.duals.len() {
            return Err(ComplexError::Homology(
                "one dual cochain per cycle required".into(),
            ));
        }
        for c in &basis.cycles {
            for (u, v) in c.steps() {
                self.edge_between(u, v)?;
            }
        }
        for d in &basis.duals {
            if d.len() != self.edges.len() {
                return Err(ComplexError::CochainLength {
                    expected: self.edges.len(),
                    got: d.len(),
                });
            }
        }
        for (k, d) in basis.duals.iter().enumerate() {
            if crate::cochain::coboundary(&self, d)?
                .iter()
                .any(|x| !x.is_zero())
            {
                return Err(ComplexError::Homology(format!("dual {k} is not closed")));
            }
            for (j, c) in basis.cycles.iter().enumerate() {
                let expected = if j == k {
                    Rational::one()
                } else {
                    Rational::zero()
                };
                if crate::cochain::period(&self, d, c)? != expected {
                    return Err(ComplexError::Homology(format!(
                        "dual {k} has the wrong period on cycle {j}"
                    )));
                }
            }
        }
        self.homology = Some(basis);
        Ok(self)
    }

    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    pub fn edges(&self) -> &[[usize; 2]] {
        &self.edges
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn top_simplices(&self) -> &[Vec<usize>] {
        &self.top
    }

    pub fn covering(&self) -> Option<&Covering> {
        self.covering.as_ref()
    }

    pub fn homology(&self) -> Option<&HomologyBasis> {
        self.homology.as_ref()
    }

    /// Subdivisions per axis when built by [`grid_torus`].
    pub fn grid_dims(&self) -> Option<&[usize]> {
        self.grid.as_deref()
    }

    /// Stored edge joining `u` and `v`, with the orientation of `(u, v)`.
    pub fn edge_between(&self, u: usize, v: usize) -> Result<(usize, Orientation), ComplexError> {
        let k = *self
            .edge_index
            .get(&(u.min(v), u.max(v)))
            .ok_or(ComplexError::MissingEdge(u, v))?;
        let o = if self.edges[k][0] == u {
            Orientation::Forward
        } else {
            Orientation::Backward
        };
        Ok((k, o))
    }

    /// Deck shift of the lift of `v` adjacent to `(u, 0)`.
    pub fn lift_shift(&self, u: usize, v: usize) -> Result<Vec<i64>, ComplexError> {
        let cov = self
            .covering
            .as_ref()
            .ok_or_else(|| ComplexError::Covering("no covering data".into()))?;
        let (k, o) = self.edge_between(u, v)?;
        let s = &cov.edge_shifts[k];
        Ok(match o {
            Orientation::Forward => s.clone(),
            Orientation::Backward => s.iter().map(|x| -x).collect(),
        })
    }

    /// Edges incident to `v`, as `(edge id, other endpoint)`.
    pub fn incident_edges(&self, v: usize) -> Vec<(usize, usize)> {
        self.edges
            .iter()
            .enumerate()
            .filter_map(|(k, &[a, b])| {
                if a == v {
                    Some((k, b))
                } else if b == v {
                    Some((k, a))
                } else {
                    None
                }
            })
            .collect()
    }

    pub fn euler_characteristic(&self) -> i64 {
        let v = self.n_vertices as i64;
        let e = self.edges.len() as i64;
        let t = self.triangles.len() as i64;
        let solids = self.top.iter().filter(|s| s.len() == 4).count() as i64;
        v - e + t - solids
    }

    /// Every edge lies in at most two triangles.
    pub fn is_manifold_like(&self) -> bool {
        let mut count = vec![0usize; self.edges.len()];
        for t in &self.triangles {
            for (a, b) in [(t[0], t[1]), (t[1], t[2]), (t[0], t[2])] {
                if let Ok((k, _)) = self.edge_between(a, b) {
                    count[k] += 1;
                }
            }
        }
        count.iter().all(|&c| c <= 2)
    }

    /// Breadth-first spanning tree from `root`: `parent[v] = (parent, edge)`.
    pub fn bfs_tree(&self, root: usize) -> Vec<Option<(usize, usize)>> {
        let adj = self.adjacency();
        let mut parent = vec![None; self.n_vertices];
        let mut seen = vec![false; self.n_vertices];
        let mut queue = VecDeque::from([root]);
        seen[root] = true;
        while let Some(u) = queue.pop_front() {
            for &(k, w) in &adj[u] {
                if !seen[w] {
                    seen[w] = true;
                    parent[w] = Some((u, k));
                    queue.push_back(w);
                }
            }
        }
        parent
    }

    /// Depth-first spanning tree from `root`, same layout as [`Self::bfs_tree`].
    pub fn dfs_tree(&self, root: usize) -> Vec<Option<(usize, usize)>> {
        let adj = self.adjacency();
        let mut parent = vec![None; self.n_vertices];
        let mut seen = vec![false; self.n_vertices];
        let mut stack = vec![root];
        while let Some(u) = stack.pop() {
            if seen[u] {
                continue;
            }
            seen[u] = true;
            for &(k, w) in adj[u].iter().rev() {
                if !seen[w] {
                    parent[w] = Some((u, k));
                    stack.push(w);
                }
            }
        }
        parent
    }

    pub fn is_connected(&self) -> bool {
        if self.n_vertices == 0 {
            return true;
        }
        let tree = self.bfs_tree(0);
        (1..self.n_vertices).all(|v| tree[v].is_some())
    }

    fn adjacency(&self) -> Vec<Vec<(usize, usize)>> {
        let mut adj = vec![Vec::new(); self.n_vertices];
        for (k, &[a, b]) in self.edges.iter().enumerate() {
            adj[a].push((k, b));
            adj[b].push((k, a));
        }
        adj
    }

    /// `self x S^1` for a grid torus, as a grid torus with one more axis.
    pub fn product_with_circle(&self, subdivisions: usize) -> Result<Self, ComplexError> {
        let mut dims = self.grid.clone().ok_or(ComplexError::NotAGrid)?;
        dims.push(subdivisions);
        grid_torus(&dims)
    }

    /// Grid coordinates of a vertex of a grid torus.
    pub fn grid_coords(&self, v: usize) -> Option<Vec<usize>> {
        let dims = self.grid.as_ref()?;
        let mut rest = v;
        let mut coords = vec![0; dims.len()];
        for a in (0..dims.len()).rev() {
            coords[a] = rest % dims[a];
            rest /= dims[a];
        }
        Some(coords)
    }

    /// Vertex at the given grid coordinates (wrapped).
    pub fn grid_vertex(&self, coords: &[usize]) -> Option<usize> {
        let dims = self.grid.as_ref()?;
        Some(
            coords
                .iter()
                .zip(dims)
                .fold(0, |acc, (&c, &m)| acc * m + c % m),
        )
    }
}

/// Flat torus `R^d / Z^d`, `d` in 1..=3, with `dims[a]` subdivisions on axis
/// `a`. Each grid cell is cut into simplices along the `(1, .., 1)` diagonal.
///
/// The result carries covering data for `Z^d` acting on `R^d`, one generator
/// cycle per axis and the coordinate cochains `dx_a` as their duals.
pub fn grid_torus(dims: &[usize]) -> Result<SimplicialComplex, ComplexError> {
    let d = dims.len();
    if !(1..=3).contains(&d) {
        return Err(ComplexError::UnsupportedDimension(d));
    }
    if let Some(&m) = dims.iter().find(|&&m| m < 3) {
        return Err(ComplexError::TooFewSubdivisions(m));
    }
    let n_vertices: usize = dims.iter().product();
    let index = |c: &[usize]| c.iter().zip(dims).fold(0, |acc, (&x, &m)| acc * m + x % m);
    let coords_of = |mut v: usize| {
        let mut c = vec![0; d];
        for a in (0..d).rev() {
            c[a] = v % dims[a];
            v /= dims[a];
        }
        c
    };
    let step = |c: &[usize], mask: u32| -> (usize, Vec<i64>) {
        let mut next = c.to_vec();
        let mut shift = vec![0i64; d];
        for a in 0..d {
            if mask & (1 << a) != 0 {
                next[a] += 1;
                if next[a] == dims[a] {
                    next[a] = 0;
                    shift[a] = 1;
                }
            }
        }
        (index(&next), shift)
    };

    let full = (1u32 << d) - 1;
    let mut edges = Vec::new();
    let mut shifts = Vec::new();
    let mut duals: Vec<Vec<Rational>> = vec![Vec::new(); d];
    for v in 0..n_vertices {
        let c = coords_of(v);
        for mask in 1..=full {
            let (w, s) = step(&c, mask);
            edges.push([v, w]);
            shifts.push(s);
            for (a, dual) in duals.iter_mut().enumerate() {
                let inc = i64::from(mask & (1 << a) != 0);
                dual.push(rat(inc, dims[a] as i64));
            }
        }
    }

    // simplices are chains 0 ⊊ s1 ⊊ s2 ⊊ ... of axis subsets
    let mut triangles = Vec::new();
    let mut solids = Vec::new();
    for v in 0..n_vertices {
        let c = coords_of(v);
        for s2 in 1..=full {
            for s1 in 1..s2 {
                if s1 & s2 != s1 {
                    continue;
                }
                triangles.push([v, step(&c, s1).0, step(&c, s2).0]);
                if d == 3 && s2 != full {
                    solids.push(vec![v, step(&c, s1).0, step(&c, s2).0, step(&c, full).0]);
                }
            }
        }
    }

    let positions = (0..n_vertices)
        .map(|v| {
            coords_of(v)
                .iter()
                .zip(dims)
                .map(|(&x, &m)| x as f64 / m as f64)
                .collect()
        })
        .collect();
    let mut complex = SimplicialComplex::new(n_vertices, edges, triangles)?;
    if d == 3 {
        complex = complex.with_top_simplices(solids)?;
    }
    complex = complex.with_covering(Covering::new(d, shifts, Some(positions)))?;

    let cycles = (0..d)
        .map(|a| {
            let mut c = vec![0; d];
            let mut verts = Vec::with_capacity(dims[a] + 1);
            for t in 0..=dims[a] {
                c[a] = t % dims[a];
                verts.push(index(&c));
            }
            Cycle::new(verts)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let duals = duals.into_iter().map(ScalarCochain1::from_raw).collect();
    complex = complex.with_homology(HomologyBasis { cycles, duals })?;
    complex.grid = Some(dims.to_vec());
    Ok(complex)
}

/// Standard triangulated torus `T^d` (`d` = 2 or 3) with `m` subdivisions per axis.
pub fn torus_complex(d: usize, m: usize) -> Result<SimplicialComplex, ComplexError> {
    if !(2..=3).contains(&d) {
        return Err(ComplexError::UnsupportedDimension(d));
    }
    grid_torus(&vec![m; d])
}

/// Triangulated circle with `m` vertices.
pub fn circle_complex(m: usize) -> Result<SimplicialComplex, ComplexError> {
    grid_torus(&[m])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn torus_counts() {
        let t = torus_complex(2, 3).unwrap();
        assert_eq!(
            (t.n_vertices(), t.edges().len(), t.triangles().len()),
            (9, 27, 18)
        );
        assert_eq!(t.euler_characteristic(), 0);
        let t4 = torus_complex(2, 4).unwrap();
        assert_eq!(
            (t4.n_vertices(), t4.edges().len(), t4.triangles().len()),
            (16, 48, 32)
        );
        assert_eq!(t4.euler_characteristic(), 0);
        assert!(t4.is_manifold_like());
    }

    #[test]
    fn three_torus_counts() {
        let t = torus_complex(3, 3).unwrap();
        assert_eq!(t.n_vertices(), 27);
        assert_eq!(t.edges().len(), 7 * 27);
        assert_eq!(t.triangles().len(), 12 * 27);
        assert_eq!(t.top_simplices().len(), 6 * 27);
        assert_eq!(t.euler_characteristic(), 0);
    }

    #[test]
    fn generators_one_per_axis() {
        for d in 2..=3 {
            let t = torus_complex(d, 4).unwrap();
            let h = t.homology().unwrap();
            assert_eq!(h.cycles.len(), d);
            assert_eq!(h.duals.len(), d);
        }
    }

    #[test]
    fn rejects_small_or_odd_tori() {
        assert_eq!(
            torus_complex(2, 2),
            Err(ComplexError::TooFewSubdivisions(2))
        );
        assert_eq!(
            torus_complex(4, 3),
            Err(ComplexError::UnsupportedDimension(4))
        );
        assert_eq!(
            torus_complex(1, 3),
            Err(ComplexError::UnsupportedDimension(1))
        );
    }

    #[test]
    fn missing_boundary_edge_is_rejected() {
        let err = SimplicialComplex::new(3, vec![[0, 1], [1, 2]], vec![[0, 1, 2]]);
        assert_eq!(err, Err(ComplexError::MissingEdge(0, 2)));
        let dup = SimplicialComplex::new(2, vec![[0, 1], [1, 0]], vec![]);
        assert!(matches!(dup, Err(ComplexError::DegenerateSimplex(_))));
    }

    #[test]
    fn lifts_close_up() {
        let t = torus_complex(2, 3).unwrap();
        // walking the x generator ends one deck step over
        let c = &t.homology().unwrap().cycles[0];
        let mut total = vec![0i64; 2];
        for (u, v) in c.steps() {
            let s = t.lift_shift(u, v).unwrap();
            total[0] += s[0];
            total[1] += s[1];
        }
        assert_eq!(total, vec![1, 0]);
    }

    #[test]
    fn product_adds_an_axis() {
        let c = circle_complex(5).unwrap();
        assert_eq!(c.top_simplices().len(), 5);
        let p = c.product_with_circle(4).unwrap();
        assert_eq!(p.grid_dims(), Some(&[5, 4][..]));
        assert_eq!(p.triangles().len(), 40);
        let v = p.grid_vertex(&[2, 3]).unwrap();
        assert_eq!(p.grid_coords(v), Some(vec![2, 3]));
    }

    #[test]
    fn spanning_trees_reach_everything() {
        let t = torus_complex(2, 5).unwrap();
        assert!(t.is_connected());
        let b = t.bfs_tree(0);
        let d = t.dfs_tree(0);
        assert!(b[1..].iter().all(Option::is_some));
        assert!(d[1..].iter().all(Option::is_some));
        assert_ne!(b, d);
    }
}
