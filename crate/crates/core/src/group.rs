//! Group-level decompositions of SL(n).
//!
//! * the affine group `GA = {x -> ax + b, a > 0}` and its embedding in SL(2);
//! * the splitting `SL(2) = GA x S^1` as `g = ga_embed(b) * rotation(theta)`;
//! * the Iwasawa chart `SL(n) -> SO(n) x R^{n(n+1)/2 - 1}` from the
//!   positive-diagonal QR factorization, and the designation of the last two
//!   chart coordinates as an `R^2` factor.

use std::f64::consts::TAU;

use thiserror::Error;

use crate::linalg::{determinant, qr_positive, FMatrix, LinalgError, Tolerances, MIN_DIM};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GroupError {
    #[error("affine scale must be positive and finite, got {0}")]
    NonPositiveScale(f64),
    #[error("matrix is not unimodular (det = {0})")]
    NonUnimodular(f64),
    #[error("expected a {expected}x{expected} matrix, got {got}x{got}")]
    WrongDimension { expected: usize, got: usize },
    #[error("chart has length {got}, expected {expected}")]
    ChartLength { expected: usize, got: usize },
    #[error("n = {0} is too small for an R^2 factor")]
    SplitTooSmall(usize),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Affine map `x -> a x + b` with `a > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GAElement {
    a: f64,
    b: f64,
}

impl GAElement {
    pub fn new(a: f64, b: f64) -> Result<Self, GroupError> {
        if !(a > 0.0 && a.is_finite()) || !b.is_finite() {
            return Err(GroupError::NonPositiveScale(a));
        }
        Ok(Self { a, b })
    }

    pub fn identity() -> Self {
        Self { a: 1.0, b: 0.0 }
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn apply(&self, x: f64) -> f64 {
        self.a * x + self.b
    }

    /// Largest coordinate difference.
    pub fn distance(&self, other: &Self) -> f64 {
        (self.a - other.a).abs().max((self.b - other.b).abs())
    }

    /// One-parameter subgroup through `self`: `t -> exp(t log self)`.
    pub fn power(&self, t: f64) -> Self {
        if (self.a - 1.0).abs() < 1e-14 {
            Self {
                a: 1.0,
                b: t * self.b,
            }
        } else {
            let at = self.a.powf(t);
            Self {
                a: at,
                b: self.b * (at - 1.0) / (self.a - 1.0),
            }
        }
    }
}

/// Composition `g ∘ h`.
pub fn ga_mul(g: &GAElement, h: &GAElement) -> GAElement {
    GAElement {
        a: g.a * h.a,
        b: g.a * h.b + g.b,
    }
}

pub fn ga_inv(g: &GAElement) -> GAElement {
    GAElement {
        a: 1.0 / g.a,
        b: -g.b / g.a,
    }
}

/// `(1/sqrt a) [[a, b], [0, 1]]`.
pub fn ga_embed(g: &GAElement) -> FMatrix {
    let s = g.a.sqrt();
    FMatrix::from_rows(vec![vec![s, g.b / s], vec![0.0, 1.0 / s]]).expect("finite 2x2")
}

/// Angle with canonical representative in `[0, 2π)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct CircleAngle(f64);

impl CircleAngle {
    pub fn new(theta: f64) -> Self {
        let r = theta.rem_euclid(TAU);
        Self(if r >= TAU { 0.0 } else { r })
    }

    pub fn theta(self) -> f64 {
        self.0
    }

    /// Shortest distance on the circle.
    pub fn distance(self, other: Self) -> f64 {
        let d = (self.0 - other.0).abs();
        d.min(TAU - d)
    }
}

/// The section `σ(θ) = [[cos θ, -sin θ], [sin θ, cos θ]]`.
pub fn rotation(angle: CircleAngle) -> FMatrix {
    let (s, c) = angle.0.sin_cos();
    FMatrix::from_rows(vec![vec![c, -s], vec![s, c]]).expect("finite 2x2")
}

fn check_unimodular(g: &FMatrix, tol: &Tolerances) -> Result<(), GroupError> {
    let det = determinant(g);
    if (det - 1.0).abs() > tol.eq_tol {
        return Err(GroupError::NonUnimodular(det));
    }
    Ok(())
}

/// Factorization `g = B K` with `B` upper triangular with positive diagonal
/// and `K` orthogonal, obtained from the QR factorization of the
/// index-reversed transpose.
fn rq_positive(g: &FMatrix, tol: &Tolerances) -> Result<(FMatrix, FMatrix), GroupError> {
    let n = g.dim();
    let flip = |m: &FMatrix| FMatrix::from_fn(n, |i, j| *m.get(n - 1 - j, n - 1 - i));
    let (q, r) = qr_positive(&flip(g)?, tol)?;
    // g = flip(r) * flip(q)
    Ok((flip(&r)?, flip(&q)?))
}

/// `g = ga_embed(b) * rotation(angle)`, unique.
pub fn iwasawa_sl2(g: &FMatrix, tol: &Tolerances) -> Result<(GAElement, CircleAngle), GroupError> {
    if g.dim() != 2 {
        return Err(GroupError::WrongDimension {
            expected: 2,
            got: g.dim(),
        });
    }
    check_unimodular(g, tol)?;
    let (upper, k) = rq_positive(g, tol)?;
    let d = *upper.get(1, 1);
    let b = GAElement::new(1.0 / (d * d), upper.get(0, 1) / d)?;
    Ok((b, CircleAngle::new(k.get(1, 0).atan2(*k.get(0, 0)))))
}

/// The projection `p : SL(2) -> S^1` of the GA x S^1 splitting.
pub fn circle_projection(g: &FMatrix, tol: &Tolerances) -> Result<CircleAngle, GroupError> {
    Ok(iwasawa_sl2(g, tol)?.1)
}

/// Number of chart coordinates, `n(n+1)/2 - 1`.
pub fn chart_len(n: usize) -> usize {
    n * (n + 1) / 2 - 1
}

/// Which side the orthogonal factor sits on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CompactSide {
    /// `g = K A N` (positive-diagonal QR).
    Left,
    /// `g = A N K`, the ordering of the GA x S^1 splitting.
    Right,
}

/// `K` in SO(n) plus the chart of the `AN` part: `n - 1` log-diagonal
/// entries, then the strictly upper entries of `N` row by row.
#[derive(Debug, Clone, PartialEq)]
pub struct IwasawaFactors {
    pub k: FMatrix,
    pub chart: Vec<f64>,
    pub side: CompactSide,
}

fn chart_of_upper(upper: &FMatrix) -> Vec<f64> {
    let n = upper.dim();
    let mut chart: Vec<f64> = (0..n - 1).map(|i| upper.get(i, i).ln()).collect();
    for i in 0..n {
        for j in i + 1..n {
            chart.push(upper.get(i, j) / upper.get(i, i));
        }
    }
    chart
}

#[allow(clippy::needless_range_loop)]
fn upper_of_chart(n: usize, chart: &[f64]) -> Result<FMatrix, GroupError> {
    if chart.len() != chart_len(n) {
        return Err(GroupError::ChartLength {
            expected: chart_len(n),
            got: chart.len(),
        });
    }
    let mut diag: Vec<f64> = chart[..n - 1].iter().map(|x| x.exp()).collect();
    diag.push((-chart[..n - 1].iter().sum::<f64>()).exp());
    let mut upper = FMatrix::zeros(n)?;
    let mut k = n - 1;
    for i in 0..n {
        upper.set(i, i, diag[i]);
        for j in i + 1..n {
            upper.set(i, j, chart[k] * diag[i]);
            k += 1;
        }
    }
    Ok(upper)
}

impl IwasawaFactors {
    pub fn n(&self) -> usize {
        self.k.dim()
    }

    /// Rebuilds the group element from `K` and the chart.
    pub fn recompose(&self) -> Result<FMatrix, GroupError> {
        let upper = upper_of_chart(self.n(), &self.chart)?;
        Ok(match self.side {
            CompactSide::Left => &self.k * &upper,
            CompactSide::Right => &upper * &self.k,
        })
    }
}

/// `g = K A N` via positive-diagonal QR.
pub fn iwasawa_sln(g: &FMatrix, tol: &Tolerances) -> Result<IwasawaFactors, GroupError> {
    check_unimodular(g, tol)?;
    let (q, r) = qr_positive(g, tol)?;
    let det_q = determinant(&q);
    assert!(
        (det_q - 1.0).abs() < 1e-8,
        "orthogonal factor has det {det_q}"
    );
    Ok(IwasawaFactors {
        k: q,
        chart: chart_of_upper(&r),
        side: CompactSide::Left,
    })
}

/// `g = A N K`; left translations by upper-triangular elements act on the
/// chart without touching `K`.
pub fn iwasawa_sln_right(g: &FMatrix, tol: &Tolerances) -> Result<IwasawaFactors, GroupError> {
    check_unimodular(g, tol)?;
    let (upper, k) = rq_positive(g, tol)?;
    let det_k = determinant(&k);
    assert!(
        (det_k - 1.0).abs() < 1e-8,
        "orthogonal factor has det {det_k}"
    );
    Ok(IwasawaFactors {
        k,
        chart: chart_of_upper(&upper),
        side: CompactSide::Right,
    })
}

/// Chart coordinates of `SL(n) = SO(n) x R^{L-2} x R^2`, `L = n(n+1)/2 - 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactorSplit {
    pub n: usize,
    /// Zero-based chart positions grouped with SO(n).
    pub g1_coords: Vec<usize>,
    /// Zero-based chart positions of the `R^2` factor (the last two).
    pub g2_coords: [usize; 2],
}

pub fn factor_split(n: usize) -> Result<FactorSplit, GroupError> {
    if n < MIN_DIM || chart_len(n) < 2 {
        return Err(GroupError::SplitTooSmall(n));
    }
    let len = chart_len(n);
    Ok(FactorSplit {
        n,
        g1_coords: (0..len - 2).collect(),
        g2_coords: [len - 2, len - 1],
    })
}

impl FactorSplit {
    pub fn chart_len(&self) -> usize {
        self.g1_coords.len() + 2
    }

    /// The `R^2` coordinates of `g`, read from the `A N K` chart.
    pub fn abelian_project(&self, g: &FMatrix, tol: &Tolerances) -> Result<[f64; 2], GroupError> {
        if g.dim() != self.n {
            return Err(GroupError::WrongDimension {
                expected: self.n,
                got: g.dim(),
            });
        }
        let f = iwasawa_sln_right(g, tol)?;
        Ok([f.chart[self.g2_coords[0]], f.chart[self.g2_coords[1]]])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn m2(rows: [[f64; 2]; 2]) -> FMatrix {
        FMatrix::from_rows(rows.iter().map(|r| r.to_vec()).collect()).unwrap()
    }

    #[test]
    fn embed_examples() {
        let id = ga_embed(&GAElement::new(1.0, 0.0).unwrap());
        assert!(id.max_abs_diff(&FMatrix::identity(2).unwrap()) < 1e-15);
        let e = ga_embed(&GAElement::new(4.0, 2.0).unwrap());
        assert!(e.max_abs_diff(&m2([[2.0, 1.0], [0.0, 0.5]])) < 1e-15);
        let u = ga_embed(&GAElement::new(1.0, 3.0).unwrap());
        assert!(u.max_abs_diff(&m2([[1.0, 3.0], [0.0, 1.0]])) < 1e-15);
        assert!((determinant(&e) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_non_positive_scale() {
        assert!(GAElement::new(0.0, 1.0).is_err());
        assert!(GAElement::new(-1.0, 1.0).is_err());
        assert!(GAElement::new(f64::NAN, 1.0).is_err());
    }

    #[test]
    fn group_law() {
        let g = GAElement::new(2.0, 1.0).unwrap();
        let h = GAElement::new(3.0, 0.0).unwrap();
        assert_eq!(ga_mul(&g, &h), GAElement::new(6.0, 1.0).unwrap());
        assert_eq!(ga_inv(&g), GAElement::new(0.5, -0.5).unwrap());
        assert_eq!(ga_mul(&g, &ga_inv(&g)), GAElement::identity());
        // composition acts as x -> g(h(x))
        assert_eq!(ga_mul(&g, &h).apply(1.5), g.apply(h.apply(1.5)));
    }

    #[test]
    fn power_is_one_parameter_subgroup() {
        let g = GAElement::new(2.0, 0.5).unwrap();
        assert!(g.power(1.0).distance(&g) < 1e-14);
        assert!(g.power(0.0).distance(&GAElement::identity()) < 1e-14);
        let s = ga_mul(&g.power(0.3), &g.power(0.45));
        assert!(s.distance(&g.power(0.75)) < 1e-14);
        let t = GAElement::new(1.0, 2.0).unwrap();
        assert!(t.power(0.5).distance(&GAElement::new(1.0, 1.0).unwrap()) < 1e-15);
    }

    #[test]
    fn circle_angle_reduction() {
        let a = CircleAngle::new(-0.5);
        assert!((a.theta() - (TAU - 0.5)).abs() < 1e-15);
        assert_eq!(CircleAngle::new(a.theta()), a);
        assert_eq!(CircleAngle::new(TAU).theta(), 0.0);
        assert!(CircleAngle::new(-1e-300).theta() < TAU);
    }

    #[test]
    fn sl2_examples() {
        let theta = 1.1;
        let (b, angle) = iwasawa_sl2(&rotation(CircleAngle::new(theta)), &tol()).unwrap();
        assert!(b.distance(&GAElement::identity()) < 1e-14);
        assert!((angle.theta() - theta).abs() < 1e-14);

        let (b, angle) = iwasawa_sl2(&m2([[2.0, 1.0], [0.0, 0.5]]), &tol()).unwrap();
        assert!(b.distance(&GAElement::new(4.0, 2.0).unwrap()) < 1e-14);
        assert!(angle.distance(CircleAngle::new(0.0)) < 1e-14);
    }

    #[test]
    fn sl2_rejects_non_unimodular() {
        assert!(matches!(
            iwasawa_sl2(&m2([[2.0, 0.0], [0.0, 1.0]]), &tol()),
            Err(GroupError::NonUnimodular(_))
        ));
    }

    #[test]
    fn sln_identity_and_chart_length() {
        for n in 2..=6 {
            let f = iwasawa_sln(&FMatrix::identity(n).unwrap(), &tol()).unwrap();
            assert_eq!(f.chart.len(), chart_len(n));
            assert!(f.chart.iter().all(|&c| c == 0.0));
            assert!(f.k.max_abs_diff(&FMatrix::identity(n).unwrap()) < 1e-15);
        }
        assert_eq!(chart_len(3), 5);
    }

    #[test]
    fn sln_rejects_non_unimodular() {
        let g = FMatrix::from_fn(3, |i, j| if i == j { 2.0 } else { 0.0 }).unwrap();
        assert!(matches!(
            iwasawa_sln(&g, &tol()),
            Err(GroupError::NonUnimodular(_))
        ));
        assert!(matches!(
            iwasawa_sln_right(&g, &tol()),
            Err(GroupError::NonUnimodular(_))
        ));
    }

    #[test]
    fn chart_length_is_validated() {
        let f = IwasawaFactors {
            k: FMatrix::identity(3).unwrap(),
            chart: vec![0.0; 4],
            side: CompactSide::Left,
        };
        assert_eq!(
            f.recompose(),
            Err(GroupError::ChartLength {
                expected: 5,
                got: 4
            })
        );
    }

    #[test]
    fn split_sizes() {
        let s2 = factor_split(2).unwrap();
        assert!(s2.g1_coords.is_empty());
        assert_eq!(s2.g2_coords, [0, 1]);
        let s3 = factor_split(3).unwrap();
        assert_eq!(s3.g1_coords, vec![0, 1, 2]);
        // one-based {4, 5}
        assert_eq!(s3.g2_coords, [3, 4]);
        let s4 = factor_split(4).unwrap();
        assert_eq!((s4.g1_coords.len(), 2, s4.chart_len()), (7, 2, 9));
        assert!(factor_split(1).is_err());
    }

    #[test]
    fn right_chart_of_ga_embedding() {
        let g = GAElement::new(4.0, 2.0).unwrap();
        let m = &ga_embed(&g) * &rotation(CircleAngle::new(0.3));
        let f = iwasawa_sln_right(&m, &tol()).unwrap();
        // log sqrt(a), then b/a
        assert!((f.chart[0] - 2f64.ln()).abs() < 1e-14);
        assert!((f.chart[1] - 0.5).abs() < 1e-14);
        assert!(f.recompose().unwrap().max_abs_diff(&m) < 1e-14);
    }
}
