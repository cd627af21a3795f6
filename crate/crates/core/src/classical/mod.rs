//! Classical weak-KAM objects for `H(p, x) = ½(P + p)² + V(x)` in the
//! supercritical regime `P > P_crit`.
//!
//! On the level `H̄(P)` the momentum profile is `p⁺(x) = √(2(H̄ - V(x)))`,
//! fixed by `∫ p⁺ = P`. Differentiating that identity in `P` gives
//! `∂H̄/∂P · ∫ 1/p⁺ = 1`, so the rotation number is `Q = 1/∫(1/p⁺)` and
//! `b = Q/p⁺` is automatically a probability density.

mod limit;
mod symbol;

pub use limit::{mather_average, mather_limit_functional, mather_limit_functional_unchecked};
pub use symbol::{bump, smooth_step, Factor, TestSymbol};

use crate::error::{Error, Result};
use crate::jet::Jet;
use crate::numerics::{brent, integrate_interval, integrate_torus, TrigSeries};
use crate::potential::Potential;
use crate::scalar::Real;

/// `P_crit = ∫ √(2(V_max - V))`, the action of the separatrix.
///
/// The integrand vanishes linearly at the maximum, so the interval is split
/// there and each piece (smooth up to its endpoints) goes to composite
/// Gauss–Legendre.
pub fn p_crit<T: Real>(v: &Potential<T>) -> Result<T> {
    let vmax = v.v_max();
    let xm = v.argmax();
    let f = |x: T| (T::lit(2.0) * (vmax - v.value(x))).max(T::zero()).sqrt();
    let tol = T::tol(1e-14);
    let half = T::lit(0.5);
    if xm <= -half {
        integrate_interval(f, -half, half, tol)
    } else {
        Ok(integrate_interval(f, -half, xm, tol)? + integrate_interval(f, xm, -xm, tol)? + integrate_interval(f, -xm, half, tol)?)
    }
}

/// Default distance above `P_crit` required by [`hbar_of_p`], relative to
/// `P_crit`.
pub const CRITICAL_MARGIN: f64 = 1e-3;

/// The classical level `H̄(P)` with its momentum profile and derived
/// quantities.
#[derive(Debug, Clone)]
pub struct ClassicalLevel<T: Real> {
    potential: Potential<T>,
    p: T,
    hbar: T,
    p_crit: T,
    p_min: T,
    p_max: T,
    dhdp: T,
    /// Periodic viscosity solution `φ`.
    phi: TrigSeries<T>,
}

/// Solves `∫ p⁺ = P` for `H̄`. `tol` bounds `|∫p⁺ - P|`.
pub fn hbar_of_p<T: Real>(v: &Potential<T>, p: T, tol: T) -> Result<ClassicalLevel<T>> {
    let pc = p_crit(v)?;
    let margin = pc * T::lit(CRITICAL_MARGIN);
    if !(p > pc + margin) {
        return Err(Error::BelowCritical { p: p.to_f64_lossy(), p_crit: pc.to_f64_lossy(), margin: margin.to_f64_lossy() });
    }
    let vmax = v.v_max();
    let two = T::lit(2.0);
    let quad_tol = T::tol(1e-15);
    let hbar = if matches!(v, Potential::Zero) {
        p * p / two
    } else {
        let g = |h: T| -> T {
            if h <= vmax {
                return pc - p;
            }
            integrate_torus(|x| (two * (h - v.value(x))).sqrt(), quad_tol).map(|i| i - p).unwrap_or(T::nan())
        };
        let root = brent(g, vmax, vmax + p * p / two, tol.min(T::tol(1e-14)))?;
        root.x
    };
    ClassicalLevel::from_hbar(*v, p, hbar, pc, tol)
}

impl<T: Real> ClassicalLevel<T> {
    fn from_hbar(potential: Potential<T>, p: T, hbar: T, p_crit: T, tol: T) -> Result<Self> {
        let two = T::lit(2.0);
        let q = |x: T| (two * (hbar - potential.value(x))).sqrt();
        let quad_tol = T::tol(1e-15);
        let action = integrate_torus(q, quad_tol)?;
        if (action - p).abs() > tol.max(T::tol(1e-13)) * T::lit(10.0) {
            return Err(Error::Stagnation { iterations: 0, residual: (action - p).to_f64_lossy() });
        }
        let inv = integrate_torus(|x| T::one() / q(x), quad_tol)?;
        let p_min = q(potential.argmax());
        let p_max = q(T::zero());
        if !(p_min > T::zero()) || !hbar.is_finite() {
            return Err(Error::NonFinite("momentum profile"));
        }
        let mut phi = TrigSeries::fit(|x| q(x) - p, T::tol(1e-14), 64, 1 << 18)?.antiderivative();
        let c = phi.eval(-T::lit(0.5));
        phi.add_constant(-c);
        Ok(Self { potential, p, hbar, p_crit, p_min, p_max, dhdp: T::one() / inv, phi })
    }

    pub fn potential(&self) -> &Potential<T> {
        &self.potential
    }

    pub fn p(&self) -> T {
        self.p
    }

    pub fn hbar(&self) -> T {
        self.hbar
    }

    pub fn p_crit(&self) -> T {
        self.p_crit
    }

    /// `p⁺(-1/2)`, the minimum of the profile.
    pub fn p_min(&self) -> T {
        self.p_min
    }

    /// `p⁺(0)`, the maximum of the profile.
    pub fn p_max(&self) -> T {
        self.p_max
    }

    /// Rotation number `Q = ∂H̄/∂P = 1/∫(1/p⁺)`.
    pub fn dhdp(&self) -> T {
        self.dhdp
    }

    pub fn p_plus(&self, x: T) -> T {
        (T::lit(2.0) * (self.hbar - self.potential.value(x))).sqrt()
    }

    /// `(p⁺)' = -V'/p⁺`.
    pub fn p_plus_d1(&self, x: T) -> T {
        -self.potential.d1(x) / self.p_plus(x)
    }

    /// Taylor jet of `p⁺` at `x` with `len` coefficients.
    pub fn p_plus_jet(&self, x: T, len: usize) -> Jet<T> {
        let v = Jet::from_coefficients(self.potential.taylor(x, len));
        (-&v).add_scalar(self.hbar).scale(T::lit(2.0)).sqrt()
    }

    /// Projected Mather density `b = Q/p⁺`.
    pub fn mather_density(&self, x: T) -> T {
        self.dhdp / self.p_plus(x)
    }

    /// Viscosity solution `φ(x) = ∫_{-1/2}^x p⁺ - P(x + 1/2)`.
    pub fn phi(&self, x: T) -> T {
        self.phi.eval(x)
    }

    /// The forward viscosity solution; it coincides with `φ` here.
    pub fn phi_star(&self, x: T) -> T {
        self.phi(x)
    }

    /// `φ' = p⁺ - P`.
    pub fn phi_d1(&self, x: T) -> T {
        self.p_plus(x) - self.p
    }

    /// Trigonometric representation of `φ`.
    pub fn phi_series(&self) -> &TrigSeries<T> {
        &self.phi
    }

    /// `max_j |½(P + φ'(x_j))² + V(x_j) - H̄|` with `φ'` from spectral
    /// differentiation of the stored `φ`.
    pub fn classical_residual(&self, m: usize) -> T {
        let d = self.phi.derivative();
        let half = T::lit(0.5);
        (0..m)
            .map(|j| {
                let x = T::from_usize_lossy(j) / T::from_usize_lossy(m) - half;
                let pv = self.p + d.eval(x);
                (half * pv * pv + self.potential.value(x) - self.hbar).abs()
            })
            .fold(T::zero(), T::max)
    }

    /// Points `x₁ ∈ (-1/2, 0)`, `x₂ ∈ (0, 1/2)` with `p⁺(x_i) = s`.
    pub fn branches(&self, s: T) -> Result<Branches<T>> {
        let (lo, hi) = (self.p_min, self.p_max);
        if !(s > lo && s < hi) {
            return Err(Error::OutOfRange { p: s.to_f64_lossy(), lo: lo.to_f64_lossy(), hi: hi.to_f64_lossy() });
        }
        let half = T::lit(0.5);
        let tol = T::tol(1e-15);
        // Solve in V rather than p⁺, measured from whichever end of the level
        // is nearer, so the roots stay accurate next to the turning points.
        let v = &self.potential;
        let near_top = hi - s < s - lo;
        let g = |x: T| {
            if near_top {
                v.excess(x) - (hi - s) * (hi + s) * half
            } else {
                (s - lo) * (s + lo) * half - v.deficit(x)
            }
        };
        let x1 = brent(g, -half, T::zero(), tol)?.x;
        let x2 = brent(g, T::zero(), half, tol)?.x;
        Ok(Branches { x1, x2 })
    }
}

/// The two preimages of a momentum under `p⁺`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Branches<T> {
    pub x1: T,
    pub x2: T,
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn p_crit_anchors() {
        let pc = p_crit(&Potential::<f64>::pendulum(1.0)).unwrap();
        assert!((pc - 4.0 / PI).abs() < 1e-12);
        let pc4 = p_crit(&Potential::<f64>::pendulum(4.0)).unwrap();
        assert!((pc4 - 8.0 / PI).abs() < 1e-12);
        assert_eq!(p_crit(&Potential::<f64>::Zero).unwrap(), 0.0);
    }

    #[test]
    fn zero_potential_level() {
        let l = hbar_of_p(&Potential::<f64>::Zero, 1.3, 1e-13).unwrap();
        assert!((l.hbar() - 0.845).abs() < 1e-15);
        assert!((l.dhdp() - 1.3).abs() < 1e-14);
        assert!(l.phi(0.2).abs() < 1e-15);
        assert!((l.mather_density(0.1) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn below_critical_is_an_error() {
        let v = Potential::<f64>::pendulum(1.0);
        assert!(matches!(hbar_of_p(&v, 1.2, 1e-13), Err(Error::BelowCritical { .. })));
        assert!(matches!(hbar_of_p(&v, 4.0 / PI, 1e-13), Err(Error::BelowCritical { .. })));
    }

    #[test]
    fn pendulum_level_is_consistent() {
        let v = Potential::<f64>::pendulum(1.0);
        let l = hbar_of_p(&v, 1.6, 1e-13).unwrap();
        assert!(l.hbar() > v.v_max());
        assert!(l.phi(-0.5).abs() < 1e-13);
        assert!(l.phi(0.4999999).abs() < 1e-6);
        assert!(l.classical_residual(256) < 1e-9);
        let b = l.branches(0.5 * (l.p_min() + l.p_max())).unwrap();
        assert!((b.x1 + b.x2).abs() < 1e-13);
        assert!(l.branches(l.p_max()).is_err());
        assert!(l.branches(l.p_min()).is_err());
        let h2 = hbar_of_p(&v, 1.8, 1e-13).unwrap();
        assert!(h2.hbar() > l.hbar());
    }

    #[test]
    fn jet_matches_profile() {
        let l = hbar_of_p(&Potential::<f64>::pendulum(1.0), 1.6, 1e-13).unwrap();
        let j = l.p_plus_jet(0.17, 4);
        assert!((j.value() - l.p_plus(0.17)).abs() < 1e-14);
        assert!((j.derivative_value(1) - l.p_plus_d1(0.17)).abs() < 1e-13);
    }
}
