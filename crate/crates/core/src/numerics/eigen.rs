use crate::error::{Error, Result};
use crate::scalar::Real;

/// A factorization that can solve in place.
pub trait LinearSolve<T> {
    fn solve_in_place(&self, rhs: &mut [T]) -> Result<()>;
}

/// Real square operator that can be applied and factored with a diagonal
/// shift, `A - σI`.
pub trait EigenOperator<T: Real> {
    type Factor: LinearSolve<T>;

    fn dim(&self) -> usize;
    fn apply(&self, x: &[T]) -> Vec<T>;
    fn factor_shifted(&self, shift: T) -> Result<Self::Factor>;
    /// Upper bound for the real part of every eigenvalue.
    fn gershgorin_upper(&self) -> T;
    fn norm_inf(&self) -> T;
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenOptions<T> {
    /// Stop when `‖Au - λu‖∞ ≤ tol · (1 + |λ|)` with `max|u| = 1`, or when
    /// the residual reaches the rounding floor `64 ε ‖A‖∞`.
    pub tol: T,
    pub max_iter: usize,
    /// The shift is kept at `λ + offset · (1 + |λ|)`.
    pub offset: T,
    /// Initial shift; defaults to the Gershgorin bound.
    pub initial_shift: Option<T>,
    /// Fail with [`Error::NotPositive`] if the eigenvector changes sign.
    pub require_positive: bool,
}

impl<T: Real> Default for EigenOptions<T> {
    fn default() -> Self {
        Self {
            tol: T::tol(1e-13),
            max_iter: 200,
            offset: T::lit(1e-3),
            initial_shift: None,
            require_positive: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Eigenpair<T> {
    pub value: T,
    /// Normalized so the entry of largest magnitude is `+1`.
    pub vector: Vec<T>,
    pub residual: T,
    pub iterations: usize,
}

fn normalize<T: Real>(y: &mut [T]) -> Result<()> {
    let mut best = T::zero();
    let mut at = 0;
    for (i, v) in y.iter().enumerate() {
        if !v.is_finite() {
            return Err(Error::NonFinite("eigenvector"));
        }
        if v.abs() > best {
            best = v.abs();
            at = i;
        }
    }
    if best == T::zero() {
        return Err(Error::NonFinite("zero eigenvector iterate"));
    }
    let s = y[at];
    y.iter_mut().for_each(|v| *v = *v / s);
    Ok(())
}

/// Eigenpair for the eigenvalue with the largest real part, assuming it is
/// real and simple, by shifted inverse iteration with Rayleigh-type shift
/// updates from above.
pub fn principal_eigenpair<T: Real, A: EigenOperator<T>>(
    op: &A,
    guess: Option<&[T]>,
    opts: &EigenOptions<T>,
) -> Result<Eigenpair<T>> {
    let n = op.dim();
    if n == 0 {
        return Err(Error::Empty);
    }
    let mut u: Vec<T> = match guess {
        Some(g) if g.len() == n => g.to_vec(),
        Some(g) => return Err(Error::SizeMismatch { expected: n, got: g.len() }),
        None => vec![T::one(); n],
    };
    normalize(&mut u)?;
    let upper = op.gershgorin_upper();
    let floor = T::epsilon() * T::lit(64.0) * op.norm_inf();
    let mut shift = opts.initial_shift.unwrap_or(upper);
    let mut factor = op.factor_shifted(shift)?;
    let mut lambda;
    let mut residual = T::infinity();
    for it in 1..=opts.max_iter {
        let mut y = u.clone();
        factor.solve_in_place(&mut y)?;
        let uy: T = u.iter().zip(&y).map(|(a, b)| *a * *b).sum();
        let yy: T = y.iter().map(|b| *b * *b).sum();
        lambda = shift + uy / yy;
        normalize(&mut y)?;
        u = y;
        let au = op.apply(&u);
        residual = au.iter().zip(&u).fold(T::zero(), |m, (a, b)| m.max((*a - lambda * *b).abs()));
        let scale = T::one() + lambda.abs();
        if residual <= (opts.tol * scale).max(floor) {
            if opts.require_positive {
                let floor = -T::epsilon().sqrt();
                let count = u.iter().filter(|v| **v < floor).count();
                if count > 0 {
                    return Err(Error::NotPositive { count });
                }
            }
            return Ok(Eigenpair { value: lambda, vector: u, residual, iterations: it });
        }
        let target = lambda + opts.offset * scale;
        if target < shift && (shift - target) > opts.offset * scale * T::lit(0.5) {
            shift = target;
            factor = op.factor_shifted(shift)?;
        }
    }
    Err(Error::Stagnation { iterations: opts.max_iter, residual: residual.to_f64_lossy() })
}
