//! Dense square matrices over exact rationals and `f64`.
//!
//! Both flavours share [`Matrix`]; the exact one ([`RMatrix`]) carries every
//! algebra-level computation, the float one ([`FMatrix`]) is used where square
//! roots, exponentials or orthogonalization force it.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, Signed, ToPrimitive, Zero};
use thiserror::Error;

/// Exact rational scalar.
pub type Rational = BigRational;

/// Largest supported matrix dimension.
pub const MAX_DIM: usize = 8;
/// Smallest supported matrix dimension.
pub const MIN_DIM: usize = 2;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("unsupported dimension {0} (expected {MIN_DIM}..={MAX_DIM})")]
    InvalidDimension(usize),
    #[error("matrix rows are ragged or not square")]
    NotSquare,
    #[error("matrix entry is not finite")]
    NonFinite,
    #[error("matrix is singular (|det| = {0:e})")]
    Singular(f64),
    #[error("matrix logarithm outside its domain: |a - I| = {0} >= 1")]
    LogDomain(f64),
    #[error("invalid tolerances: need 0 < eq_tol <= residual_tol < 1")]
    InvalidTolerance,
}

/// Field operations shared by the exact and floating matrix kernels.
pub trait Scalar:
    Clone + PartialEq + PartialOrd + fmt::Debug + fmt::Display + Num + Signed + Send + Sync + 'static
{
    fn is_finite_value(&self) -> bool;
    fn to_f64(&self) -> f64;
    fn from_i64(v: i64) -> Self;
    /// Whether `self` is zero relative to the magnitude `scale`.
    fn is_negligible(&self, scale: &Self) -> bool;
}

impl Scalar for f64 {
    fn is_finite_value(&self) -> bool {
        self.is_finite()
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn from_i64(v: i64) -> Self {
        v as f64
    }

    fn is_negligible(&self, scale: &Self) -> bool {
        self.abs() <= 1e-12 * scale.abs().max(1.0)
    }
}

impl Scalar for Rational {
    fn is_finite_value(&self) -> bool {
        true
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn from_i64(v: i64) -> Self {
        Rational::from_integer(BigInt::from(v))
    }

    fn is_negligible(&self, _scale: &Self) -> bool {
        self.is_zero()
    }
}

/// Exact conversion of a finite float to a rational.
pub fn rational_from_f64(x: f64) -> Option<Rational> {
    Rational::from_f64(x)
}

/// Comparison tolerances used by numerical checks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Absolute tolerance for equality tests.
    pub eq_tol: f64,
    /// Tolerance for reconstruction and roundtrip residuals.
    pub residual_tol: f64,
}

impl Tolerances {
    pub fn new(eq_tol: f64, residual_tol: f64) -> Result<Self, LinalgError> {
        if !(eq_tol > 0.0 && eq_tol <= residual_tol && residual_tol < 1.0) {
            return Err(LinalgError::InvalidTolerance);
        }
        Ok(Self {
            eq_tol,
            residual_tol,
        })
    }
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            eq_tol: 1e-10,
            residual_tol: 1e-9,
        }
    }
}

/// Square matrix stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<T> {
    n: usize,
    data: Vec<T>,
}

pub type RMatrix = Matrix<Rational>;
pub type FMatrix = Matrix<f64>;

fn check_dim(n: usize) -> Result<(), LinalgError> {
    if (MIN_DIM..=MAX_DIM).contains(&n) {
        Ok(())
    } else {
        Err(LinalgError::InvalidDimension(n))
    }
}

impl<T: Scalar> Matrix<T> {
    pub fn zeros(n: usize) -> Result<Self, LinalgError> {
        check_dim(n)?;
        Ok(Self {
            n,
            data: vec![T::zero(); n * n],
        })
    }

    pub fn identity(n: usize) -> Result<Self, LinalgError> {
        let mut m = Self::zeros(n)?;
        for i in 0..n {
            m.data[i * n + i] = T::one();
        }
        Ok(m)
    }

    /// Builds a matrix from `f(row, col)` with zero-based indices.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> T) -> Result<Self, LinalgError> {
        check_dim(n)?;
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        let m = Self { n, data };
        m.check_finite()?;
        Ok(m)
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self, LinalgError> {
        let n = rows.len();
        check_dim(n)?;
        if rows.iter().any(|r| r.len() != n) {
            return Err(LinalgError::NotSquare);
        }
        let m = Self {
            n,
            data: rows.into_iter().flatten().collect(),
        };
        m.check_finite()?;
        Ok(m)
    }

    fn check_finite(&self) -> Result<(), LinalgError> {
        if self.data.iter().all(Scalar::is_finite_value) {
            Ok(())
        } else {
            Err(LinalgError::NonFinite)
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Entry at zero-based `(row, col)`.
    pub fn get(&self, row: usize, col: usize) -> &T {
        &self.data[row * self.n + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: T) {
        self.data[row * self.n + col] = value;
    }

    pub fn rows(&self) -> Vec<Vec<T>> {
        self.data.chunks(self.n).map(<[T]>::to_vec).collect()
    }

    pub fn transpose(&self) -> Self {
        let n = self.n;
        Self {
            n,
            data: (0..n * n)
                .map(|k| self.data[(k % n) * n + k / n].clone())
                .collect(),
        }
    }

    pub fn trace(&self) -> T {
        (0..self.n).fold(T::zero(), |acc, i| acc + self.get(i, i).clone())
    }

    pub fn scale(&self, s: &T) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().map(|x| x.clone() * s.clone()).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> T {
        self.data
            .iter()
            .map(Signed::abs)
            .fold(T::zero(), |m, x| if x > m { x } else { m })
    }

    /// Induced infinity norm (largest absolute row sum).
    pub fn norm_inf(&self) -> T {
        self.data
            .chunks(self.n)
            .map(|row| row.iter().fold(T::zero(), |acc, x| acc + x.abs()))
            .fold(T::zero(), |m, x| if x > m { x } else { m })
    }

    /// `self * other - other * self`.
    pub fn commutator(&self, other: &Self) -> Result<Self, LinalgError> {
        Ok(&multiply(self, other)? - &multiply(other, self)?)
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> Matrix<U> {
        Matrix {
            n: self.n,
            data: self.data.iter().map(f).collect(),
        }
    }

    fn same_dim(&self, other: &Self) -> Result<(), LinalgError> {
        if self.n == other.n {
            Ok(())
        } else {
            Err(LinalgError::DimensionMismatch {
                left: self.n,
                right: other.n,
            })
        }
    }
}

impl FMatrix {
    /// Largest absolute entrywise difference.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.n, other.n, "dimension mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Distance to the identity in the induced infinity norm.
    pub fn distance_to_identity(&self) -> f64 {
        (0..self.n)
            .map(|i| {
                (0..self.n)
                    .map(|j| {
                        let id = if i == j { 1.0 } else { 0.0 };
                        (self.get(i, j) - id).abs()
                    })
                    .sum::<f64>()
            })
            .fold(0.0, f64::max)
    }
}

impl RMatrix {
    pub fn to_float(&self) -> FMatrix {
        self.map(Scalar::to_f64)
    }
}

impl<T: Scalar> Add for &Matrix<T> {
    type Output = Matrix<T>;

    fn add(self, rhs: Self) -> Matrix<T> {
        self.same_dim(rhs).expect("matrix add");
        Matrix {
            n: self.n,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a.clone() + b.clone())
                .collect(),
        }
    }
}

impl<T: Scalar> Sub for &Matrix<T> {
    type Output = Matrix<T>;

    fn sub(self, rhs: Self) -> Matrix<T> {
        self.same_dim(rhs).expect("matrix sub");
        Matrix {
            n: self.n,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a.clone() - b.clone())
                .collect(),
        }
    }
}

impl<T: Scalar> Neg for &Matrix<T> {
    type Output = Matrix<T>;

    fn neg(self) -> Matrix<T> {
        Matrix {
            n: self.n,
            data: self.data.iter().map(|x| -x.clone()).collect(),
        }
    }
}

/// Panics on dimension mismatch; use [`multiply`] for a checked product.
impl<T: Scalar> Mul for &Matrix<T> {
    type Output = Matrix<T>;

    fn mul(self, rhs: Self) -> Matrix<T> {
        multiply(self, rhs).expect("matrix multiply")
    }
}

/// Matrix product. Exact when both inputs are exact.
pub fn multiply<T: Scalar>(a: &Matrix<T>, b: &Matrix<T>) -> Result<Matrix<T>, LinalgError> {
    a.same_dim(b)?;
    let n = a.n;
    let mut data = vec![T::zero(); n * n];
    for i in 0..n {
        for k in 0..n {
            let aik = &a.data[i * n + k];
            // basis realizations are mostly zero
            if aik.is_zero() {
                continue;
            }
            for j in 0..n {
                let bkj = &b.data[k * n + j];
                if !bkj.is_zero() {
                    data[i * n + j] = data[i * n + j].clone() + aik.clone() * bkj.clone();
                }
            }
        }
    }
    Ok(Matrix { n, data })
}

/// Row at or below `start` with the largest nonzero entry in `col`.
fn pivot_index<T: Scalar>(rows: &[Vec<T>], col: usize, start: usize) -> Option<usize> {
    let mut best: Option<(usize, T)> = None;
    for (r, row) in rows.iter().enumerate().skip(start) {
        let v = row[col].abs();
        if v.is_zero() {
            continue;
        }
        match &best {
            Some((_, b)) if *b >= v => {}
            _ => best = Some((r, v)),
        }
    }
    best.map(|(r, _)| r)
}

/// Determinant by Gaussian elimination; exact for [`RMatrix`].
#[allow(clippy::needless_range_loop)]
pub fn determinant<T: Scalar>(a: &Matrix<T>) -> T {
    let n = a.n;
    let mut rows = a.rows();
    let mut det = T::one();
    for col in 0..n {
        let Some(p) = pivot_index(&rows, col, col) else {
            return T::zero();
        };
        if p != col {
            rows.swap(p, col);
            det = -det;
        }
        let pivot = rows[col][col].clone();
        det = det * pivot.clone();
        for r in col + 1..n {
            if rows[r][col].is_zero() {
                continue;
            }
            let factor = rows[r][col].clone() / pivot.clone();
            for c in col..n {
                let delta = factor.clone() * rows[col][c].clone();
                rows[r][c] = rows[r][c].clone() - delta;
            }
        }
    }
    det
}

/// Gauss–Jordan inverse.
pub fn inverse<T: Scalar>(a: &Matrix<T>) -> Result<Matrix<T>, LinalgError> {
    let n = a.n;
    let mut left = a.rows();
    let mut right = Matrix::<T>::identity(n)?.rows();
    for col in 0..n {
        let p = pivot_index(&left, col, col).ok_or(LinalgError::Singular(0.0))?;
        left.swap(p, col);
        right.swap(p, col);
        let pivot = left[col][col].clone();
        for c in 0..n {
            left[col][c] = left[col][c].clone() / pivot.clone();
            right[col][c] = right[col][c].clone() / pivot.clone();
        }
        for r in 0..n {
            if r == col || left[r][col].is_zero() {
                continue;
            }
            let factor = left[r][col].clone();
            for c in 0..n {
                let dl = factor.clone() * left[col][c].clone();
                left[r][c] = left[r][c].clone() - dl;
                let dr = factor.clone() * right[col][c].clone();
                right[r][c] = right[r][c].clone() - dr;
            }
        }
    }
    Matrix::from_rows(right)
}

/// Rank of a list of row vectors, exact over the rationals.
#[allow(clippy::needless_range_loop)]
pub fn exact_rank(rows: &[Vec<Rational>]) -> usize {
    let mut rows = rows.to_vec();
    let ncols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..ncols {
        let Some(p) = (rank..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(p, rank);
        let pivot = rows[rank][col].clone();
        for r in rank + 1..rows.len() {
            if rows[r][col].is_zero() {
                continue;
            }
            let factor = rows[r][col].clone() / pivot.clone();
            for c in col..ncols {
                let delta = factor.clone() * rows[rank][c].clone();
                rows[r][c] = rows[r][c].clone() - delta;
            }
        }
        rank += 1;
    }
    rank
}

/// Numerical rank: singular values above `rel_threshold` times the largest.
pub fn numerical_rank(rows: &[Vec<f64>], rel_threshold: f64) -> usize {
    let nrows = rows.len();
    let ncols = rows.first().map_or(0, Vec::len);
    if nrows == 0 || ncols == 0 {
        return 0;
    }
    let m = nalgebra::DMatrix::from_fn(nrows, ncols, |i, j| rows[i][j]);
    let sv = m.singular_values();
    let largest = sv.iter().copied().fold(0.0, f64::max);
    if largest == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > rel_threshold * largest).count()
}

/// QR factorization with `R` upper triangular and strictly positive diagonal.
///
/// Modified Gram–Schmidt with one reorthogonalization pass; the positive
/// diagonal makes the factorization unique.
#[allow(clippy::needless_range_loop)]
pub fn qr_positive(a: &FMatrix, tol: &Tolerances) -> Result<(FMatrix, FMatrix), LinalgError> {
    let det = determinant(a);
    if det.abs() <= tol.residual_tol {
        return Err(LinalgError::Singular(det.abs()));
    }
    let n = a.n;
    let mut q: Vec<Vec<f64>> = (0..n)
        .map(|j| (0..n).map(|i| *a.get(i, j)).collect())
        .collect();
    let mut r = FMatrix::zeros(n)?;
    for j in 0..n {
        for _pass in 0..2 {
            for k in 0..j {
                let dot: f64 = (0..n).map(|i| q[k][i] * q[j][i]).sum();
                for i in 0..n {
                    q[j][i] -= dot * q[k][i];
                }
                let prev = *r.get(k, j);
                r.set(k, j, prev + dot);
            }
        }
        let norm = q[j].iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(LinalgError::Singular(det.abs()));
        }
        for x in &mut q[j] {
            *x /= norm;
        }
        r.set(j, j, norm);
    }
    let q = FMatrix::from_fn(n, |i, j| q[j][i])?;
    Ok((q, r))
}

/// Matrix exponential by scaling and squaring of a truncated Taylor series.
pub fn matrix_exp(a: &FMatrix) -> FMatrix {
    let n = a.n;
    let norm = a.norm_inf();
    let squarings = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as i32
    } else {
        0
    };
    let scaled = a.scale(&0.5f64.powi(squarings));
    let mut result = FMatrix::identity(n).expect("valid dimension");
    let mut term = result.clone();
    for k in 1..=30 {
        term = (&term * &scaled).scale(&(1.0 / k as f64));
        result = &result + &term;
        if term.max_abs() < 1e-18 {
            break;
        }
    }
    for _ in 0..squarings {
        result = &result * &result;
    }
    result
}

/// Principal square root by the Denman–Beavers iteration.
fn matrix_sqrt(a: &FMatrix) -> Result<FMatrix, LinalgError> {
    let mut y = a.clone();
    let mut z = FMatrix::identity(a.n)?;
    for _ in 0..100 {
        let y_inv = inverse(&y)?;
        let z_inv = inverse(&z)?;
        let next_y = (&y + &z_inv).scale(&0.5);
        let next_z = (&z + &y_inv).scale(&0.5);
        let delta = next_y.max_abs_diff(&y);
        y = next_y;
        z = next_z;
        if delta < 1e-16 {
            break;
        }
    }
    Ok(y)
}

/// Principal matrix logarithm for `|a - I| < 1` (induced infinity norm).
///
/// Inverse scaling and squaring: square roots until `a` is close to the
/// identity, then the series `log a = 2 atanh((a - I)(a + I)^-1)`.
pub fn matrix_log(a: &FMatrix) -> Result<FMatrix, LinalgError> {
    let dist = a.distance_to_identity();
    if dist.is_nan() || dist >= 1.0 {
        return Err(LinalgError::LogDomain(dist));
    }
    let n = a.n;
    let id = FMatrix::identity(n)?;
    let mut x = a.clone();
    let mut roots = 0;
    while x.distance_to_identity() > 0.25 {
        x = matrix_sqrt(&x)?;
        roots += 1;
    }
    let z = &(&x - &id) * &inverse(&(&x + &id))?;
    let z2 = &z * &z;
    let mut power = z.clone();
    let mut sum = z;
    for k in (3..200).step_by(2) {
        power = &power * &z2;
        let term = power.scale(&(1.0 / k as f64));
        sum = &sum + &term;
        if term.max_abs() < 1e-20 {
            break;
        }
    }
    Ok(sum.scale(&(2.0 * f64::from(1u32 << roots))))
}

impl<T: Scalar> fmt::Display for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, row) in self.data.chunks(self.n).enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            let cells: Vec<String> = row.iter().map(ToString::to_string).collect();
            write!(f, "[{}]", cells.join(", "))?;
        }
        Ok(())
    }
}

pub(crate) fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}
