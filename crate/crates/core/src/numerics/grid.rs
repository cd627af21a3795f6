use crate::error::{Error, Result};
use crate::scalar::Real;

/// Equispaced grid on the unit torus `[-1/2, 1/2)`.
///
/// Sizes are powers of two (at least 16) so that the half-point grid of size
/// `2M` used by the Wigner transform contains every `x ± y/2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PeriodicGrid {
    size: usize,
}

impl PeriodicGrid {
    pub const MIN_SIZE: usize = 16;

    pub fn new(size: usize) -> Result<Self> {
        if size < Self::MIN_SIZE || !size.is_power_of_two() {
            return Err(Error::InvalidGrid(size));
        }
        Ok(Self { size })
    }

    /// Smallest admissible grid with `M >= c / h` and `M >= min_size`.
    pub fn for_resolution(h: f64, c: f64, min_size: usize) -> Result<Self> {
        if !(h > 0.0) || !h.is_finite() {
            return Err(Error::InvalidParameter(format!("h must be positive, got {h}")));
        }
        let need = (c / h).ceil().max(min_size as f64).max(Self::MIN_SIZE as f64);
        if need > (1u64 << 24) as f64 {
            return Err(Error::InvalidParameter(format!("grid for h = {h} is too large")));
        }
        Self::new((need as usize).next_power_of_two())
    }

    #[inline]
    pub fn size(&self) -> usize {
        self.size
    }

    #[inline]
    pub fn spacing<T: Real>(&self) -> T {
        T::one() / T::from_usize_lossy(self.size)
    }

    #[inline]
    pub fn node<T: Real>(&self, j: usize) -> T {
        T::from_usize_lossy(j) / T::from_usize_lossy(self.size) - T::lit(0.5)
    }

    pub fn nodes<T: Real>(&self) -> Vec<T> {
        (0..self.size).map(|j| self.node(j)).collect()
    }

    pub fn sample<T: Real, F: Fn(T) -> T>(&self, f: F) -> Vec<T> {
        (0..self.size).map(|j| f(self.node(j))).collect()
    }

    /// The grid of size `2M`; node `2j` of the refinement is node `j` here.
    pub fn refined(&self) -> Self {
        Self { size: 2 * self.size }
    }

    /// Maps any real `x` to its representative in `[-1/2, 1/2)`.
    pub fn wrap<T: Real>(x: T) -> T {
        let half = T::lit(0.5);
        let r = x + half;
        r - r.floor() - half
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_sizes() {
        assert!(PeriodicGrid::new(8).is_err());
        assert!(PeriodicGrid::new(48).is_err());
        assert!(PeriodicGrid::new(64).is_ok());
    }

    #[test]
    fn nodes_are_equispaced() {
        let g = PeriodicGrid::new(16).unwrap();
        let x: Vec<f64> = g.nodes();
        assert_eq!(x[0], -0.5);
        for w in x.windows(2) {
            assert!((w[1] - w[0] - 1.0 / 16.0).abs() < 1e-15);
        }
        assert_eq!(g.refined().node::<f64>(2 * 5), x[5]);
    }

    #[test]
    fn resolution_rule() {
        let g = PeriodicGrid::for_resolution(0.05, 8.0, 16).unwrap();
        assert_eq!(g.size(), 256);
        let g = PeriodicGrid::for_resolution(0.02, 8.0, 512).unwrap();
        assert_eq!(g.size(), 512);
    }

    #[test]
    fn wrap_into_torus() {
        assert!((PeriodicGrid::wrap(0.75_f64) + 0.25).abs() < 1e-15);
        assert!((PeriodicGrid::wrap(-0.5_f64) + 0.5).abs() < 1e-15);
        assert!((PeriodicGrid::wrap(0.5_f64) + 0.5).abs() < 1e-15);
    }
}
