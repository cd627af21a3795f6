//! Shared numerical kernels: periodic quadrature, FFT and trigonometric
//! series, dense and banded linear algebra, inverse power iteration, root
//! finding and convergence-order fits.
//!
//! The torus is always the unit interval `[-1/2, 1/2)` sampled at
//! `x_j = -1/2 + j/M`. Off-grid evaluation of grid functions goes through
//! [`TrigSeries`]; there is no linear interpolation anywhere in the solvers.

mod banded;
mod dense;
mod eigen;
mod fft;
mod fit;
mod grid;
mod quad;
mod roots;
mod spectral;

pub use banded::{BandedLu, BandedSystem};
pub use dense::{DenseLu, DenseMatrix};
pub use eigen::{principal_eigenpair, EigenOperator, EigenOptions, Eigenpair, LinearSolve};
pub use fft::{fft_coefficients, inverse_fft_coefficients, FourierPlan, TrigSeries};
pub use fit::{fit_order, OrderFit};
pub use grid::PeriodicGrid;
pub use quad::{gauss_legendre, integrate_interval, integrate_torus, quad_periodic};
pub use roots::{brent, find_root_monotone, Root};
pub use spectral::{first_derivative_matrix, second_derivative_matrix};
