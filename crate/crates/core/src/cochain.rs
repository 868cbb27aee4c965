//! Scalar and sl(n)-valued 1-cochains, their coboundary, periods along
//! cycles and the two discrete flatness residuals.

use crate::algebra::{bracket, AlgebraElement};
use crate::complex::{ComplexError, Cycle, Orientation, SimplicialComplex};
use crate::linalg::{matrix_exp, FMatrix, Scalar};

/// Real-valued 1-cochain: one value per stored edge, negated under reversal.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarCochain1<T> {
    values: Vec<T>,
}

impl<T: Scalar> ScalarCochain1<T> {
    pub(crate) fn from_raw(values: Vec<T>) -> Self {
        Self { values }
    }

    pub fn zeros(complex: &SimplicialComplex) -> Self {
        Self {
            values: vec![T::zero(); complex.edges().len()],
        }
    }

    pub fn from_values(complex: &SimplicialComplex, values: Vec<T>) -> Result<Self, ComplexError> {
        if values.len() != complex.edges().len() {
            return Err(ComplexError::CochainLength {
                expected: complex.edges().len(),
                got: values.len(),
            });
        }
        Ok(Self { values })
    }

    /// Evaluates `f(u, v)` on every stored edge `(u, v)`.
    pub fn from_fn(complex: &SimplicialComplex, mut f: impl FnMut(usize, usize) -> T) -> Self {
        Self {
            values: complex.edges().iter().map(|&[u, v]| f(u, v)).collect(),
        }
    }

    /// The exact cochain `(u, v) -> f(v) - f(u)`.
    pub fn gradient(complex: &SimplicialComplex, f: &[T]) -> Self {
        Self::from_fn(complex, |u, v| f[v].clone() - f[u].clone())
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [T] {
        &mut self.values
    }

    /// Value on the oriented pair `(u, v)`.
    pub fn value(
        &self,
        complex: &SimplicialComplex,
        u: usize,
        v: usize,
    ) -> Result<T, ComplexError> {
        let (k, o) = complex.edge_between(u, v)?;
        Ok(orient(&self.values[k], o))
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> ScalarCochain1<U> {
        ScalarCochain1 {
            values: self.values.iter().map(f).collect(),
        }
    }

    pub fn scale(&self, s: &T) -> Self {
        self.map(|x| x.clone() * s.clone())
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.len(), other.len(), "cochains on different complexes");
        Self {
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a.clone() + b.clone())
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-T::one()))
    }

    /// Largest absolute edge value.
    pub fn sup_norm(&self) -> T {
        self.values
            .iter()
            .map(num_traits::Signed::abs)
            .fold(T::zero(), |m, x| if x > m { x } else { m })
    }
}

fn orient<T: Scalar>(x: &T, o: Orientation) -> T {
    match o {
        Orientation::Forward => x.clone(),
        Orientation::Backward => -x.clone(),
    }
}

/// `(dw)(u, v, w) = w(u, v) + w(v, w) - w(u, w)` on every triangle.
pub fn coboundary<T: Scalar>(
    complex: &SimplicialComplex,
    w: &ScalarCochain1<T>,
) -> Result<Vec<T>, ComplexError> {
    check_len(complex, w.len())?;
    complex
        .triangles()
        .iter()
        .map(|&[a, b, c]| {
            Ok(w.value(complex, a, b)? + w.value(complex, b, c)? - w.value(complex, a, c)?)
        })
        .collect()
}

/// Sum of `w` along the cycle.
pub fn period<T: Scalar>(
    complex: &SimplicialComplex,
    w: &ScalarCochain1<T>,
    cycle: &Cycle,
) -> Result<T, ComplexError> {
    check_len(complex, w.len())?;
    cycle.steps().try_fold(T::zero(), |acc, (u, v)| {
        let x = w
            .value(complex, u, v)
            .map_err(|_| ComplexError::BrokenCycle(format!("no edge {u}-{v}")))?;
        Ok(acc + x)
    })
}

fn check_len(complex: &SimplicialComplex, got: usize) -> Result<(), ComplexError> {
    if got == complex.edges().len() {
        Ok(())
    } else {
        Err(ComplexError::CochainLength {
            expected: complex.edges().len(),
            got,
        })
    }
}

/// sl(n)-valued 1-cochain.
#[derive(Debug, Clone, PartialEq)]
pub struct LieCochain1<T> {
    n: usize,
    values: Vec<AlgebraElement<T>>,
}

impl<T: Scalar> LieCochain1<T> {
    pub fn from_values(
        complex: &SimplicialComplex,
        n: usize,
        values: Vec<AlgebraElement<T>>,
    ) -> Result<Self, ComplexError> {
        check_len(complex, values.len())?;
        if let Some(x) = values.iter().find(|x| x.dim() != n) {
            return Err(crate::algebra::AlgebraError::DimensionMismatch(n, x.dim()).into());
        }
        Ok(Self { n, values })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[AlgebraElement<T>] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [AlgebraElement<T>] {
        &mut self.values
    }

    pub fn value(
        &self,
        complex: &SimplicialComplex,
        u: usize,
        v: usize,
    ) -> Result<AlgebraElement<T>, ComplexError> {
        let (k, o) = complex.edge_between(u, v)?;
        Ok(match o {
            Orientation::Forward => self.values[k].clone(),
            Orientation::Backward => -&self.values[k],
        })
    }

    /// Scalar cochain of one basis coefficient.
    pub fn component(&self, position: usize) -> ScalarCochain1<T> {
        ScalarCochain1::from_raw(
            self.values
                .iter()
                .map(|x| x.coeffs()[position].clone())
                .collect(),
        )
    }
}

/// Discrete Maurer–Cartan residual `dw + ½[w(uv), w(vw)]` per triangle.
///
/// For `w(u, v) = log(g(u)^-1 g(v))` the Baker–Campbell–Hausdorff formula
/// gives `(dw)(uvw) = -½[w(uv), w(vw)] + O(h^3)`, so the residual is third
/// order in the mesh size.
pub fn flatness_residual<T: Scalar>(
    complex: &SimplicialComplex,
    w: &LieCochain1<T>,
) -> Result<Vec<AlgebraElement<T>>, ComplexError> {
    check_len(complex, w.len())?;
    let half = T::one() / (T::one() + T::one());
    complex
        .triangles()
        .iter()
        .map(|&[a, b, c]| {
            let ab = w.value(complex, a, b)?;
            let bc = w.value(complex, b, c)?;
            let ac = w.value(complex, a, c)?;
            let d = &(&ab + &bc) - &ac;
            Ok(&d + &bracket(&ab, &bc)?.scale(&half))
        })
        .collect()
}

/// `exp(w(uv)) exp(w(vw)) exp(w(wu)) - I` per triangle.
pub fn holonomy_residual(
    complex: &SimplicialComplex,
    w: &LieCochain1<f64>,
) -> Result<Vec<FMatrix>, ComplexError> {
    check_len(complex, w.len())?;
    let id = FMatrix::identity(w.n).map_err(crate::algebra::AlgebraError::from)?;
    complex
        .triangles()
        .iter()
        .map(|&[a, b, c]| {
            let g = &(&matrix_exp(&w.value(complex, a, b)?.realize())
                * &matrix_exp(&w.value(complex, b, c)?.realize()))
                * &matrix_exp(&w.value(complex, c, a)?.realize());
            Ok(&g - &id)
        })
        .collect()
}
