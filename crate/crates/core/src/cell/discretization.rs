use std::sync::Arc;

use crate::error::Result;
use crate::numerics::{
    first_derivative_matrix, second_derivative_matrix, BandedSystem, DenseMatrix, LinearSolve, TrigSeries,
};
use crate::scalar::Real;

/// Periodic differentiation used by the cell solvers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Discretization {
    /// Fourier collocation (dense matrices).
    #[default]
    Spectral,
    /// Second-order centred differences (banded plus border).
    FiniteDifference,
}

/// Differentiation operators on one grid.
#[derive(Debug, Clone)]
pub(crate) enum Operators<T: Real> {
    Spectral { d1: Arc<DenseMatrix<T>>, d2: Arc<DenseMatrix<T>> },
    FiniteDifference { m: usize },
}

impl<T: Real> Operators<T> {
    pub fn new(kind: Discretization, m: usize) -> Self {
        match kind {
            Discretization::Spectral => Self::Spectral {
                d1: Arc::new(first_derivative_matrix(m)),
                d2: Arc::new(second_derivative_matrix(m)),
            },
            Discretization::FiniteDifference => Self::FiniteDifference { m },
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Self::Spectral { d1, .. } => d1.dim(),
            Self::FiniteDifference { m } => *m,
        }
    }

    /// `(D1 v, D2 v)`.
    pub fn apply(&self, v: &[T]) -> (Vec<T>, Vec<T>) {
        match self {
            // FFT differentiation; same operators as the matrices, with
            // smaller rounding than a dense product.
            Self::Spectral { .. } => {
                let m = v.len();
                let s = TrigSeries::from_samples(v).expect("even grid");
                (s.derivative().sample(m), s.derivative_exact().derivative_exact().sample(m))
            }
            Self::FiniteDifference { m } => {
                let m = *m;
                let dx = T::one() / T::from_usize_lossy(m);
                let mut a = vec![T::zero(); m];
                let mut b = vec![T::zero(); m];
                for i in 0..m {
                    let l = v[(i + m - 1) % m];
                    let r = v[(i + 1) % m];
                    a[i] = (r - l) / (T::lit(2.0) * dx);
                    b[i] = (r - T::lit(2.0) * v[i] + l) / (dx * dx);
                }
                (a, b)
            }
        }
    }

    /// `(‖D1‖∞, ‖D2‖∞)`.
    pub fn norms(&self) -> (T, T) {
        match self {
            Self::Spectral { d1, d2 } => (d1.norm_inf(), d2.norm_inf()),
            Self::FiniteDifference { m } => {
                let mf = T::from_usize_lossy(*m);
                (mf, T::lit(4.0) * mf * mf)
            }
        }
    }

    /// Factors the bordered Jacobian
    /// `[diag(α) D2 + diag(β) D1 + diag(γ), -1; 1ᵀ/M, 0]`.
    pub fn bordered_factor(&self, alpha: T, beta: &[T]) -> Result<Box<dyn LinearSolve<T>>> {
        let m = self.size();
        let inv_m = T::one() / T::from_usize_lossy(m);
        match self {
            Self::Spectral { d1, d2 } => {
                let mut j = DenseMatrix::zeros(m + 1);
                for i in 0..m {
                    let (r1, r2) = (d1.row(i), d2.row(i));
                    let row = j.row_mut(i);
                    for k in 0..m {
                        row[k] = alpha * r2[k] + beta[i] * r1[k];
                    }
                    row[m] = -T::one();
                }
                for k in 0..m {
                    j[(m, k)] = inv_m;
                }
                Ok(Box::new(j.lu()?))
            }
            Self::FiniteDifference { .. } => {
                let dx = T::one() / T::from_usize_lossy(m);
                let two = T::lit(2.0);
                let mut s = BandedSystem::periodic(m, 1, 1, |i, off| match off {
                    0 => -two * alpha / (dx * dx),
                    -1 => alpha / (dx * dx) - beta[i] / (two * dx),
                    _ => alpha / (dx * dx) + beta[i] / (two * dx),
                })?;
                for i in 0..m {
                    s.set(i, m, -T::one())?;
                    s.set(m, i, inv_m)?;
                }
                Ok(Box::new(s.lu()?))
            }
        }
    }

    /// Dense matrix of `a·D2 + b·D1 + diag(c)`.
    pub fn dense_operator(&self, a: T, b: T, c: &[T]) -> DenseMatrix<T> {
        let m = self.size();
        match self {
            Self::Spectral { d1, d2 } => DenseMatrix::from_fn(m, |i, k| {
                let diag = if i == k { c[i] } else { T::zero() };
                a * d2[(i, k)] + b * d1[(i, k)] + diag
            }),
            Self::FiniteDifference { .. } => {
                let dx = T::one() / T::from_usize_lossy(m);
                let two = T::lit(2.0);
                DenseMatrix::from_fn(m, |i, k| {
                    let d = (k + m - i) % m;
                    match d {
                        0 => -two * a / (dx * dx) + c[i],
                        1 => a / (dx * dx) + b / (two * dx),
                        _ if d == m - 1 => a / (dx * dx) - b / (two * dx),
                        _ => T::zero(),
                    }
                })
            }
        }
    }
}
