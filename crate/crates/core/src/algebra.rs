//! The Lie algebra sl(n) in the basis `{E_ij : i != j} ∪ {Y_i : 2 <= i <= n}`
//! with `Y_i = E_ii - E_11`.
//!
//! Brackets are computed as matrix commutators and re-expressed in the basis,
//! so the classical bracket identities among the `E_ij` are checked rather
//! than assumed.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_traits::Zero;
use serde_json::{Map, Value};
use thiserror::Error;

use crate::linalg::{LinalgError, Matrix, RMatrix, Rational, Scalar, MAX_DIM, MIN_DIM};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AlgebraError {
    #[error("basis index {index} is invalid for n = {n}")]
    InvalidIndex { index: BasisIndex, n: usize },
    #[error("unsupported dimension {0}")]
    InvalidDimension(usize),
    #[error("algebra elements of different dimensions: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("expected {expected} coefficients, got {got}")]
    CoefficientCount { expected: usize, got: usize },
    #[error("matrix is not traceless")]
    NotTraceless,
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Basis element of sl(n); indices are one-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BasisIndex {
    /// `E_ij`, the matrix unit with a 1 in row `i`, column `j` (`i != j`).
    OffDiag(usize, usize),
    /// `Y_i = E_ii - E_11` for `2 <= i <= n`.
    Diag(usize),
}

impl BasisIndex {
    pub fn is_valid(self, n: usize) -> bool {
        match self {
            BasisIndex::OffDiag(i, j) => i != j && (1..=n).contains(&i) && (1..=n).contains(&j),
            BasisIndex::Diag(i) => (2..=n).contains(&i),
        }
    }

    /// Bracket-table label: `[i,j]` for `E_ij`, `[i,i]` for `Y_i`.
    pub fn label(self) -> String {
        match self {
            BasisIndex::OffDiag(i, j) => format!("[{i},{j}]"),
            BasisIndex::Diag(i) => format!("[{i},{i}]"),
        }
    }

    /// Position in the coefficient vector: off-diagonal units in row-major
    /// order first, then `Y_2 .. Y_n`.
    pub fn position(self, n: usize) -> Result<usize, AlgebraError> {
        if !self.is_valid(n) {
            return Err(AlgebraError::InvalidIndex { index: self, n });
        }
        Ok(match self {
            BasisIndex::OffDiag(i, j) => (i - 1) * (n - 1) + if j < i { j - 1 } else { j - 2 },
            BasisIndex::Diag(i) => n * n - n + (i - 2),
        })
    }
}

impl fmt::Display for BasisIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BasisIndex::OffDiag(i, j) => write!(f, "E{i}{j}"),
            BasisIndex::Diag(i) => write!(f, "Y{i}"),
        }
    }
}

fn check_n(n: usize) -> Result<(), AlgebraError> {
    if (MIN_DIM..=MAX_DIM).contains(&n) {
        Ok(())
    } else {
        Err(AlgebraError::InvalidDimension(n))
    }
}

/// All basis indices of sl(n) in coefficient order.
pub fn basis(n: usize) -> Vec<BasisIndex> {
    let mut out = Vec::with_capacity(n * n - 1);
    for i in 1..=n {
        for j in 1..=n {
            if i != j {
                out.push(BasisIndex::OffDiag(i, j));
            }
        }
    }
    out.extend((2..=n).map(BasisIndex::Diag));
    out
}

/// `(dim h, dim offdiag, dim sl(n))` = `(n - 1, n^2 - n, n^2 - 1)`.
pub fn dims(n: usize) -> Result<(usize, usize, usize), AlgebraError> {
    if n < MIN_DIM {
        return Err(AlgebraError::InvalidDimension(n));
    }
    let (h, off, total) = (n - 1, n * n - n, n * n - 1);
    assert_eq!(h + off, total);
    Ok((h, off, total))
}

/// Matrix realization of a basis element.
pub fn basis_matrix(idx: BasisIndex, n: usize) -> Result<RMatrix, AlgebraError> {
    check_n(n)?;
    idx.position(n)?;
    Ok(AlgebraElement::<Rational>::basis(idx, n)?.realize())
}

/// Element of sl(n) as coefficients over [`basis`].
#[derive(Debug, Clone, PartialEq)]
pub struct AlgebraElement<T> {
    n: usize,
    coeffs: Vec<T>,
}

impl<T: Scalar> AlgebraElement<T> {
    pub fn zero(n: usize) -> Result<Self, AlgebraError> {
        check_n(n)?;
        Ok(Self {
            n,
            coeffs: vec![T::zero(); n * n - 1],
        })
    }

    pub fn basis(idx: BasisIndex, n: usize) -> Result<Self, AlgebraError> {
        let mut x = Self::zero(n)?;
        x.coeffs[idx.position(n)?] = T::one();
        Ok(x)
    }

    pub fn from_coeffs(n: usize, coeffs: Vec<T>) -> Result<Self, AlgebraError> {
        check_n(n)?;
        if coeffs.len() != n * n - 1 {
            return Err(AlgebraError::CoefficientCount {
                expected: n * n - 1,
                got: coeffs.len(),
            });
        }
        Ok(Self { n, coeffs })
    }

    /// Decomposes a traceless matrix. Exact input must have zero trace; float
    /// input may carry rounding relative to its largest entry.
    pub fn from_matrix(m: &Matrix<T>) -> Result<Self, AlgebraError> {
        let n = m.dim();
        if !m.trace().is_negligible(&m.max_abs()) {
            return Err(AlgebraError::NotTraceless);
        }
        let mut x = Self::zero(n)?;
        for i in 1..=n {
            for j in 1..=n {
                if i != j {
                    let p = BasisIndex::OffDiag(i, j).position(n)?;
                    x.coeffs[p] = m.get(i - 1, j - 1).clone();
                }
            }
        }
        // sum_{i>=2} d_i Y_i has diagonal (-sum d_i, d_2, ..., d_n)
        for i in 2..=n {
            let p = BasisIndex::Diag(i).position(n)?;
            x.coeffs[p] = m.get(i - 1, i - 1).clone();
        }
        Ok(x)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn coeff(&self, idx: BasisIndex) -> Result<&T, AlgebraError> {
        Ok(&self.coeffs[idx.position(self.n)?])
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn max_abs(&self) -> T {
        self.coeffs
            .iter()
            .map(num_traits::Signed::abs)
            .fold(T::zero(), |m, x| if x > m { x } else { m })
    }

    /// Nonzero `(position, coefficient)` pairs.
    pub fn support(&self) -> Vec<(usize, T)> {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| (k, c.clone()))
            .collect()
    }

    pub fn scale(&self, s: &T) -> Self {
        Self {
            n: self.n,
            coeffs: self.coeffs.iter().map(|c| c.clone() * s.clone()).collect(),
        }
    }

    /// The traceless matrix this element denotes.
    pub fn realize(&self) -> Matrix<T> {
        let n = self.n;
        let mut m = Matrix::<T>::zeros(n).expect("dimension checked at construction");
        let off = n * n - n;
        let mut first = T::zero();
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if k < off {
                let i = k / (n - 1);
                let r = k % (n - 1);
                let j = if r < i { r } else { r + 1 };
                m.set(i, j, c.clone());
            } else {
                let i = k - off + 1;
                m.set(i, i, c.clone());
                first = first - c.clone();
            }
        }
        m.set(0, 0, first);
        m
    }

    fn check_same(&self, other: &Self) -> Result<(), AlgebraError> {
        if self.n == other.n {
            Ok(())
        } else {
            Err(AlgebraError::DimensionMismatch(self.n, other.n))
        }
    }

    pub fn to_f64(&self) -> AlgebraElement<f64> {
        AlgebraElement {
            n: self.n,
            coeffs: self.coeffs.iter().map(Scalar::to_f64).collect(),
        }
    }
}

impl<T: Scalar> Add for &AlgebraElement<T> {
    type Output = AlgebraElement<T>;

    fn add(self, rhs: Self) -> AlgebraElement<T> {
        self.check_same(rhs).expect("algebra add");
        AlgebraElement {
            n: self.n,
            coeffs: self
                .coeffs
                .iter()
                .zip(&rhs.coeffs)
                .map(|(a, b)| a.clone() + b.clone())
                .collect(),
        }
    }
}

impl<T: Scalar> Sub for &AlgebraElement<T> {
    type Output = AlgebraElement<T>;

    fn sub(self, rhs: Self) -> AlgebraElement<T> {
        self.check_same(rhs).expect("algebra sub");
        AlgebraElement {
            n: self.n,
            coeffs: self
                .coeffs
                .iter()
                .zip(&rhs.coeffs)
                .map(|(a, b)| a.clone() - b.clone())
                .collect(),
        }
    }
}

impl<T: Scalar> Neg for &AlgebraElement<T> {
    type Output = AlgebraElement<T>;

    fn neg(self) -> AlgebraElement<T> {
        AlgebraElement {
            n: self.n,
            coeffs: self.coeffs.iter().map(|c| -c.clone()).collect(),
        }
    }
}

impl<T: Scalar> fmt::Display for AlgebraElement<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = basis(self.n)
            .into_iter()
            .zip(&self.coeffs)
            .filter(|(_, c)| !c.is_zero())
            .map(|(b, c)| format!("{c}*{b}"))
            .collect();
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", terms.join(" + "))
        }
    }
}

/// Lie bracket `xy - yx`, re-expressed in the basis.
pub fn bracket<T: Scalar>(
    x: &AlgebraElement<T>,
    y: &AlgebraElement<T>,
) -> Result<AlgebraElement<T>, AlgebraError> {
    x.check_same(y)?;
    let c = x.realize().commutator(&y.realize())?;
    AlgebraElement::from_matrix(&c)
}

/// Splits `x = h + offdiag` with `h` in the diagonal (Cartan) part.
pub fn cartan_split<T: Scalar>(x: &AlgebraElement<T>) -> (AlgebraElement<T>, AlgebraElement<T>) {
    let off = x.n * x.n - x.n;
    let mut h = x.clone();
    let mut o = x.clone();
    for (k, (hc, oc)) in h.coeffs.iter_mut().zip(o.coeffs.iter_mut()).enumerate() {
        if k < off {
            *hc = T::zero();
        } else {
            *oc = T::zero();
        }
    }
    (h, o)
}

/// Brackets of all basis pairs, exact.
#[derive(Debug, Clone)]
pub struct StructureTable {
    n: usize,
    basis: Vec<BasisIndex>,
    entries: Vec<AlgebraElement<Rational>>,
}

/// Builds the full structure table of sl(n).
pub fn build_structure_table(n: usize) -> Result<StructureTable, AlgebraError> {
    check_n(n)?;
    let basis = basis(n);
    let elems: Vec<AlgebraElement<Rational>> = basis
        .iter()
        .map(|&b| AlgebraElement::basis(b, n))
        .collect::<Result<_, _>>()?;
    let mut entries = Vec::with_capacity(elems.len() * elems.len());
    for x in &elems {
        for y in &elems {
            entries.push(bracket(x, y)?);
        }
    }
    Ok(StructureTable { n, basis, entries })
}

impl StructureTable {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn basis(&self) -> &[BasisIndex] {
        &self.basis
    }

    pub fn get(
        &self,
        x: BasisIndex,
        y: BasisIndex,
    ) -> Result<&AlgebraElement<Rational>, AlgebraError> {
        let d = self.basis.len();
        Ok(&self.entries[x.position(self.n)? * d + y.position(self.n)?])
    }

    fn at(&self, a: usize, b: usize) -> &AlgebraElement<Rational> {
        &self.entries[a * self.basis.len() + b]
    }

    /// Pairs `(x, y)` with `[x, y] != -[y, x]`.
    pub fn antisymmetry_violations(&self) -> Vec<(BasisIndex, BasisIndex)> {
        let d = self.basis.len();
        let mut bad = Vec::new();
        for a in 0..d {
            for b in a..d {
                if (self.at(a, b) + self.at(b, a)).is_zero() {
                    continue;
                }
                bad.push((self.basis[a], self.basis[b]));
            }
        }
        bad
    }

    /// Triples failing `[x,[y,z]] + [y,[z,x]] + [z,[x,y]] = 0`.
    pub fn jacobi_violations(&self) -> Vec<(BasisIndex, BasisIndex, BasisIndex)> {
        let d = self.basis.len();
        let sparse: Vec<Vec<(usize, Rational)>> =
            self.entries.iter().map(AlgebraElement::support).collect();
        // [x, sum_c t_c b_c] = sum_c t_c [x, b_c]
        let nested = |x: usize, y: usize, z: usize, acc: &mut BTreeMap<usize, Rational>| {
            for (c, t) in &sparse[y * d + z] {
                for (k, s) in &sparse[x * d + c] {
                    let e = acc.entry(*k).or_insert_with(Rational::zero);
                    *e += t * s;
                }
            }
        };
        let mut bad = Vec::new();
        for x in 0..d {
            for y in 0..d {
                for z in 0..d {
                    let mut acc = BTreeMap::new();
                    nested(x, y, z, &mut acc);
                    nested(y, z, x, &mut acc);
                    nested(z, x, y, &mut acc);
                    if acc.values().any(|v| !v.is_zero()) {
                        bad.push((self.basis[x], self.basis[y], self.basis[z]));
                    }
                }
            }
        }
        bad
    }

    /// Checks every `[E_ij, E_kl]` entry against the closed forms
    /// `E_ii - E_jj` (k = j, l = i), `E_il` (k = j, l != i), `-E_kj`
    /// (l = i, k != j) and `0` otherwise. Returns the number of pairs checked
    /// and the mismatching ones.
    pub fn offdiag_identity_violations(
        &self,
    ) -> Result<(usize, Vec<(BasisIndex, BasisIndex)>), AlgebraError> {
        let n = self.n;
        let elem =
            |i: usize, j: usize| AlgebraElement::<Rational>::basis(BasisIndex::OffDiag(i, j), n);
        let mut checked = 0;
        let mut bad = Vec::new();
        for &x in &self.basis {
            for &y in &self.basis {
                let (BasisIndex::OffDiag(i, j), BasisIndex::OffDiag(k, l)) = (x, y) else {
                    continue;
                };
                let expected = if k == j && l == i {
                    let mut m = RMatrix::zeros(n)?;
                    m.set(i - 1, i - 1, Rational::from_integer(1.into()));
                    m.set(j - 1, j - 1, Rational::from_integer((-1).into()));
                    AlgebraElement::from_matrix(&m)?
                } else if k == j {
                    elem(i, l)?
                } else if l == i {
                    -&elem(k, j)?
                } else {
                    AlgebraElement::zero(n)?
                };
                checked += 1;
                if self.get(x, y)? != &expected {
                    bad.push((x, y));
                }
            }
        }
        Ok((checked, bad))
    }

    /// JSON export: `"[i,j]×[k,l]"` mapped to the coefficient list of the
    /// bracket, each coefficient a `"p/q"` string.
    pub fn to_json(&self) -> Value {
        let d = self.basis.len();
        let mut map = Map::new();
        for a in 0..d {
            for b in 0..d {
                let key = format!("{}×{}", self.basis[a].label(), self.basis[b].label());
                let coeffs = self
                    .at(a, b)
                    .coeffs()
                    .iter()
                    .map(|c| Value::String(c.to_string()))
                    .collect();
                map.insert(key, Value::Array(coeffs));
            }
        }
        Value::Object(map)
    }
}
