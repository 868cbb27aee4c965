use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::TischlerError;
use crate::cochain::{coboundary, period, ScalarCochain1};
use crate::complex::SimplicialComplex;
use crate::linalg::{rational_from_f64, Rational, Tolerances};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RationalizeConfig {
    /// Sup-norm budget for `|w - w'|`, also the per-period approximation
    /// budget.
    pub epsilon: f64,
    /// Cap on the denominators of the convergents tried.
    pub max_denominator: u64,
}

impl RationalizeConfig {
    pub fn new(epsilon: f64, max_denominator: u64) -> Result<Self, TischlerError> {
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(TischlerError::InvalidConfig(format!(
                "epsilon must be positive, got {epsilon}"
            )));
        }
        if max_denominator == 0 {
            return Err(TischlerError::InvalidConfig(
                "max_denominator must be at least 1".into(),
            ));
        }
        Ok(Self {
            epsilon,
            max_denominator,
        })
    }
}

impl Default for RationalizeConfig {
    fn default() -> Self {
        Self {
            epsilon: 0.01,
            max_denominator: 1_000_000,
        }
    }
}

/// Continued-fraction convergents of `x`, in order; finite since `x` is
/// rational.
pub fn convergents(x: &Rational) -> Vec<Rational> {
    let (mut h0, mut h1) = (BigInt::zero(), BigInt::one());
    let (mut k0, mut k1) = (BigInt::one(), BigInt::zero());
    let mut rest = x.clone();
    let mut out = Vec::new();
    loop {
        let a = rest.floor().to_integer();
        let h = &a * &h1 + &h0;
        let k = &a * &k1 + &k0;
        out.push(Rational::new(h.clone(), k.clone()));
        (h0, h1) = (h1, h);
        (k0, k1) = (k1, k);
        let frac = &rest - Rational::from_integer(a);
        if frac.is_zero() {
            return out;
        }
        rest = frac.recip();
    }
}

/// First convergent within `epsilon` of `p` whose denominator respects the
/// cap, or the best capped convergent as the error.
fn approximate(
    index: usize,
    p: &Rational,
    cfg: &RationalizeConfig,
) -> Result<Rational, TischlerError> {
    let cap = BigInt::from(cfg.max_denominator);
    let mut best: Option<(Rational, f64)> = None;
    for r in convergents(p) {
        if r.denom() > &cap {
            break;
        }
        let err = (&r - p).abs().to_f64().unwrap_or(f64::INFINITY);
        if err <= cfg.epsilon {
            return Ok(r);
        }
        best = Some((r, err));
    }
    let (best, error) = best.expect("the integer part always fits the cap");
    Err(TischlerError::BudgetInfeasible {
        index,
        period: p.to_f64().unwrap_or(f64::NAN),
        best,
        error,
    })
}

/// Output of [`rationalize`].
#[derive(Debug, Clone, PartialEq)]
pub struct Rationalized {
    /// The closed cochain `w'` with rational periods.
    pub cochain: ScalarCochain1<Rational>,
    /// Periods of the input along the stored generator cycles.
    pub periods: Vec<Rational>,
    /// Periods of `w'`.
    pub rational_periods: Vec<Rational>,
    /// `max |w - w'|` over edges.
    pub perturbation: f64,
}

/// Floating-point entry point of [`rationalize_exact`]; values are converted
/// exactly.
pub fn rationalize(
    complex: &SimplicialComplex,
    w: &ScalarCochain1<f64>,
    cfg: &RationalizeConfig,
    tol: &Tolerances,
) -> Result<Rationalized, TischlerError> {
    let values = w
        .values()
        .iter()
        .map(|&x| {
            rational_from_f64(x)
                .ok_or_else(|| TischlerError::InvalidConfig(format!("non-finite value {x}")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    rationalize_exact(
        complex,
        &ScalarCochain1::from_values(complex, values)?,
        cfg,
        tol,
    )
}

/// Replaces each period `p_k` of the closed cochain `w` by its first
/// continued-fraction convergent `r_k` within `cfg.epsilon`.
///
/// `w` is split as `df + Σ p_k η_k` with `η_k` the stored duals of the
/// generator cycles, and the result is `w' = df + Σ r_k η_k`, closed exactly.
pub fn rationalize_exact(
    complex: &SimplicialComplex,
    w: &ScalarCochain1<Rational>,
    cfg: &RationalizeConfig,
    tol: &Tolerances,
) -> Result<Rationalized, TischlerError> {
    RationalizeConfig::new(cfg.epsilon, cfg.max_denominator)?;
    let closedness = coboundary(complex, w)?;
    if let Some((triangle, r)) = closedness
        .iter()
        .map(|x| x.abs().to_f64().unwrap_or(f64::INFINITY))
        .enumerate()
        .fold(None, |acc: Option<(usize, f64)>, (t, r)| match acc {
            Some((_, best)) if best >= r => acc,
            _ => Some((t, r)),
        })
    {
        if r > tol.eq_tol {
            return Err(TischlerError::NotClosed {
                max_residual: r,
                triangle,
            });
        }
    }
    let basis = complex.homology().ok_or(TischlerError::MissingHomology)?;
    let periods = basis
        .cycles
        .iter()
        .map(|c| period(complex, w, c))
        .collect::<Result<Vec<_>, _>>()?;
    let rational_periods = periods
        .iter()
        .enumerate()
        .map(|(k, p)| approximate(k, p, cfg))
        .collect::<Result<Vec<_>, _>>()?;

    let mut u = w.clone();
    for (p, eta) in periods.iter().zip(&basis.duals) {
        u = u.sub(&eta.scale(p));
    }
    let f = potential(complex, &u)?;
    let df = ScalarCochain1::gradient(complex, &f);
    let defect = u
        .sub(&df)
        .values()
        .iter()
        .map(|x| x.abs().to_f64().unwrap_or(f64::INFINITY))
        .fold(0.0, f64::max);
    let spanning_tol = tol
        .residual_tol
        .max(tol.eq_tol * complex.triangles().len() as f64);
    if defect > spanning_tol {
        return Err(TischlerError::CyclesDoNotSpan(defect));
    }

    let mut cochain = df;
    for (r, eta) in rational_periods.iter().zip(&basis.duals) {
        cochain = cochain.add(&eta.scale(r));
    }
    let perturbation = cochain
        .sub(w)
        .values()
        .iter()
        .map(|x| x.abs().to_f64().unwrap_or(f64::INFINITY))
        .fold(0.0, f64::max);
    if perturbation > cfg.epsilon {
        return Err(TischlerError::PerturbationTooLarge {
            achieved: perturbation,
            epsilon: cfg.epsilon,
        });
    }
    Ok(Rationalized {
        cochain,
        periods,
        rational_periods,
        perturbation,
    })
}

/// Integral of `u` along the breadth-first tree from vertex 0.
pub(crate) fn potential(
    complex: &SimplicialComplex,
    u: &ScalarCochain1<Rational>,
) -> Result<Vec<Rational>, TischlerError> {
    potential_along(complex, u, &complex.bfs_tree(0))
}

pub(crate) fn potential_along(
    complex: &SimplicialComplex,
    u: &ScalarCochain1<Rational>,
    tree: &[Option<(usize, usize)>],
) -> Result<Vec<Rational>, TischlerError> {
    let n = complex.n_vertices();
    let mut f: Vec<Option<Rational>> = vec![None; n];
    if n > 0 {
        f[0] = Some(Rational::zero());
    }
    for v in 0..n {
        let mut path = Vec::new();
        let mut cur = v;
        while f[cur].is_none() {
            let (p, _) = tree[cur].ok_or(TischlerError::Disconnected)?;
            path.push(cur);
            cur = p;
        }
        for &x in path.iter().rev() {
            let (p, _) = tree[x].expect("on tree path");
            let val = f[p].clone().expect("parent resolved") + u.value(complex, p, x)?;
            f[x] = Some(val);
        }
    }
    Ok(f.into_iter().map(|x| x.expect("all resolved")).collect())
}
