use crate::scalar::Real;

use super::DenseMatrix;

/// Fourier first-derivative matrix on the `M`-point grid of the unit torus
/// (`M` even); the Nyquist mode is annihilated.
pub fn first_derivative_matrix<T: Real>(m: usize) -> DenseMatrix<T> {
    assert!(m.is_multiple_of(2) && m >= 2);
    let mf = T::from_usize_lossy(m);
    DenseMatrix::from_fn(m, |i, j| {
        if i == j {
            T::zero()
        } else {
            let d = i as isize - j as isize;
            let sign = if d.rem_euclid(2) == 0 { T::one() } else { -T::one() };
            let arg = T::PI() * T::lit(d as f64) / mf;
            sign * T::PI() / arg.tan()
        }
    })
}

/// Second derivative of the trigonometric interpolant on the `M`-point grid
/// of the unit torus (`M` even).
pub fn second_derivative_matrix<T: Real>(m: usize) -> DenseMatrix<T> {
    assert!(m.is_multiple_of(2) && m >= 2);
    let mf = T::from_usize_lossy(m);
    let four_pi2 = T::two_pi() * T::two_pi();
    let diag = -(mf * mf / T::lit(12.0) + T::lit(1.0 / 6.0)) * four_pi2;
    DenseMatrix::from_fn(m, |i, j| {
        if i == j {
            diag
        } else {
            let d = i as isize - j as isize;
            let sign = if d.rem_euclid(2) == 0 { T::one() } else { -T::one() };
            let s = (T::PI() * T::lit(d as f64) / mf).sin();
            -sign * four_pi2 / (T::lit(2.0) * s * s)
        }
    })
}
