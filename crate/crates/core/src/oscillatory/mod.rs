//! Stationary phase for the `(x, y)` integrals behind the Wigner limit.
//!
//! For a lattice momentum `p̂` write `s = 2πp̂` and
//!
//! ```text
//! S(x, y) = Py + v₀(x + y/2) - v₀(x - y/2) - s·y,
//! ```
//!
//! with `v₀ = φ`, so `v₀' = p⁺ - P`. On the level (`p_min < s < p_max`) the
//! critical set is `(x_i, 0)` and `(0, 2x_i)` where `p⁺(x_i) = s`; off the
//! level it is empty.
//!
//! `S(x + 1/2, y + 1) = S(x, y) + P - s`, and `(P - s)/h ∈ 2πℤ` on the
//! lattice, so the integration cell `𝕋 × [-1/2, 1/2]` is a fundamental
//! domain of that shift. A point `(0, 2x_i)` with `|x_i| > 1/4` lies outside
//! the cell; its copy inside is `(-1/2, 2x_i ∓ 1)`.

mod direct;
mod stationary;

pub use direct::{
    degeneracy_ratio, direct_oscillatory_integral, lattice_integral, nonstationary_decay_check, DecayCheck,
    DirectIntegral, DirectOptions,
};
pub use stationary::{stationary_phase_estimate, PointContribution, StationaryPhase, XBar};

use crate::classical::{smooth_step, ClassicalLevel};
use crate::error::{Error, Result};
use crate::numerics::PeriodicGrid;
use crate::scalar::Real;

/// Phase `S_p̂` of one lattice momentum on a classical level.
#[derive(Debug, Clone)]
pub struct PhaseFamily<'a, T: Real> {
    pub level: &'a ClassicalLevel<T>,
    /// Phase-space momentum `s = 2πp̂`.
    pub s: T,
    /// `s` closer than this to `p_min` or `p_max` is degenerate.
    pub degeneracy_tol: T,
}

/// Symmetric `2 × 2` Hessian `[[xx, xy], [xy, yy]]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hessian<T> {
    pub xx: T,
    pub xy: T,
    pub yy: T,
}

impl<T: Real> Hessian<T> {
    pub fn det(&self) -> T {
        self.xx * self.yy - self.xy * self.xy
    }

    /// Number of positive minus number of negative eigenvalues.
    pub fn signature(&self) -> i32 {
        let det = self.det();
        let tr = self.xx + self.yy;
        if det < T::zero() {
            0
        } else if det > T::zero() {
            if tr > T::zero() {
                2
            } else {
                -2
            }
        } else if tr > T::zero() {
            1
        } else if tr < T::zero() {
            -1
        } else {
            0
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CriticalKind {
    /// `(x_i, 0)`.
    Diagonal,
    /// `(0, 2x_i)`.
    Antidiagonal,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticalPoint<T> {
    pub x: T,
    pub y: T,
    pub kind: CriticalKind,
    /// Branch point `x_i` the point is built from.
    pub branch: T,
    /// Hessian of `S` at the point.
    pub hessian: Hessian<T>,
    /// The alternative convention `diag(v₀''(2x_i), v₀''(2x_i))` at the
    /// antidiagonal points; equal to `hessian` on the diagonal ones.
    pub hessian_alt: Hessian<T>,
    pub gradient_norm: T,
    /// Copy of the point in `𝕋 × [-1/2, 1/2]`.
    pub representative: (T, T),
}

impl<'a, T: Real> PhaseFamily<'a, T> {
    pub fn new(level: &'a ClassicalLevel<T>, s: T) -> Self {
        Self { level, s, degeneracy_tol: T::lit(1e-8) * (T::one() + level.p_max()) }
    }

    /// Family of the lattice point `p̂ = hm + P/2π`.
    pub fn lattice(level: &'a ClassicalLevel<T>, h: T, m: i64) -> Self {
        Self::new(level, T::two_pi() * h * T::lit(m as f64) + level.p())
    }

    pub fn s(&self) -> T {
        self.s
    }

    pub fn phase(&self, x: T, y: T) -> T {
        let half = T::lit(0.5) * y;
        (self.level.p() - self.s) * y + self.level.phi(x + half) - self.level.phi(x - half)
    }

    /// `(∂S/∂x, ∂S/∂y)`.
    pub fn gradient(&self, x: T, y: T) -> (T, T) {
        let half = T::lit(0.5) * y;
        let (a, b) = (self.level.p_plus(x + half), self.level.p_plus(x - half));
        (a - b, T::lit(0.5) * (a + b) - self.s)
    }

    pub fn hessian(&self, x: T, y: T) -> Hessian<T> {
        let half = T::lit(0.5) * y;
        let (a, b) = (self.level.p_plus_d1(x + half), self.level.p_plus_d1(x - half));
        let q = T::lit(0.25);
        Hessian { xx: a - b, xy: T::lit(0.5) * (a + b), yy: q * (a - b) }
    }

    /// Whether `s` lies strictly inside the level, away from its ends.
    pub fn on_level(&self) -> bool {
        self.s > self.level.p_min() + self.degeneracy_tol && self.s < self.level.p_max() - self.degeneracy_tol
    }

    fn check_degenerate(&self) -> Result<()> {
        let d = (self.s - self.level.p_min()).abs().min((self.s - self.level.p_max()).abs());
        if d <= self.degeneracy_tol {
            return Err(Error::Degenerate { p: self.s.to_f64_lossy(), delta: d.to_f64_lossy() });
        }
        Ok(())
    }

    /// The four critical points, or none off the level.
    pub fn critical_points(&self) -> Result<Vec<CriticalPoint<T>>> {
        self.check_degenerate()?;
        if !self.on_level() {
            return Ok(Vec::new());
        }
        let b = self.level.branches(self.s)?;
        let mut out = Vec::with_capacity(4);
        for &xi in &[b.x1, b.x2] {
            let h = self.hessian(xi, T::zero());
            let (gx, gy) = self.gradient(xi, T::zero());
            out.push(CriticalPoint {
                x: xi,
                y: T::zero(),
                kind: CriticalKind::Diagonal,
                branch: xi,
                hessian: h,
                hessian_alt: h,
                gradient_norm: gx.hypot(gy),
                representative: (xi, T::zero()),
            });
        }
        for &xi in &[b.x1, b.x2] {
            let y = T::lit(2.0) * xi;
            let (gx, gy) = self.gradient(T::zero(), y);
            let c = self.level.p_plus_d1(y);
            out.push(CriticalPoint {
                x: T::zero(),
                y,
                kind: CriticalKind::Antidiagonal,
                branch: xi,
                hessian: self.hessian(T::zero(), y),
                hessian_alt: Hessian { xx: c, xy: T::zero(), yy: c },
                gradient_norm: gx.hypot(gy),
                representative: fundamental(T::zero(), y),
            });
        }
        Ok(out)
    }
}

/// Copy of `(x, y)` under `(x, y) ↦ (x ± 1/2, y ± 1)` with `|y| ≤ 1/2`.
pub fn fundamental<T: Real>(x: T, y: T) -> (T, T) {
    let half = T::lit(0.5);
    if y > half {
        (PeriodicGrid::wrap(x - half), y - T::one())
    } else if y < -half {
        (PeriodicGrid::wrap(x + half), y + T::one())
    } else {
        (x, y)
    }
}

/// C∞ cutoff in `y`: 1 on `|y| < ε/2`, 0 on `|y| > ε`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mollifier<T> {
    pub eps: T,
}

impl<T: Real> Mollifier<T> {
    pub fn new(eps: T) -> Result<Self> {
        if !(eps > T::zero()) {
            return Err(Error::InvalidParameter(format!("mollifier width must be positive, got {eps}")));
        }
        Ok(Self { eps })
    }

    pub fn eval(&self, y: T) -> T {
        smooth_step((self.eps - y.abs()) / (T::lit(0.5) * self.eps))
    }
}
