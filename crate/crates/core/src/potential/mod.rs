//! Smooth symmetric potentials on the torus with a non-degenerate minimum at
//! the origin.
//!
//! Built-ins carry closed-form derivatives of every order, so the
//! asymptotic expansion never differentiates numerically.

use std::fmt;

use crate::error::{Error, Result};
use crate::numerics::brent;
use crate::scalar::Real;

/// The built-in potentials.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Potential<T> {
    /// `κ(1 - cos 2πx)`.
    Pendulum { kappa: T },
    /// `κ(1 - cos 2πx) + β(1 - cos 4πx)`.
    TwoHarmonic { kappa: T, beta: T },
    /// `V ≡ 0`. Degenerate: the minimum is not isolated, so it fails
    /// [`Potential::validate`]. Useful only as an exactly solvable test case.
    Zero,
}

impl<T: Real> Potential<T> {
    pub fn pendulum(kappa: T) -> Self {
        Self::Pendulum { kappa }
    }

    /// Two-harmonic potential with the default `β = κ/10`.
    pub fn two_harmonic(kappa: T) -> Self {
        Self::TwoHarmonic { kappa, beta: kappa * T::lit(0.1) }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Pendulum { .. } => "pendulum",
            Self::TwoHarmonic { .. } => "two-harmonic",
            Self::Zero => "zero",
        }
    }

    /// `true` for [`Potential::Zero`], which violates the non-degenerate
    /// minimum hypothesis and is kept for exact tests only.
    pub fn is_test_only(&self) -> bool {
        matches!(self, Self::Zero)
    }

    pub fn value(&self, x: T) -> T {
        self.derivative(x, 0)
    }

    /// `V⁽ⁿ⁾(x)`.
    pub fn derivative(&self, x: T, n: usize) -> T {
        // d^n/dx^n (1 - cos ωx) = -ω^n cos(ωx + nπ/2) for n ≥ 1.
        let harmonic = |amp: T, k: f64| -> T {
            let w = T::two_pi() * T::lit(k);
            let t = w * x;
            if n == 0 {
                let s = (t * T::lit(0.5)).sin();
                amp * T::lit(2.0) * s * s
            } else {
                let phase = match n % 4 {
                    0 => t.cos(),
                    1 => -t.sin(),
                    2 => -t.cos(),
                    _ => t.sin(),
                };
                -amp * w.powi(n as i32) * phase
            }
        };
        match *self {
            Self::Pendulum { kappa } => harmonic(kappa, 1.0),
            Self::TwoHarmonic { kappa, beta } => harmonic(kappa, 1.0) + harmonic(beta, 2.0),
            Self::Zero => T::zero(),
        }
    }

    pub fn d1(&self, x: T) -> T {
        self.derivative(x, 1)
    }

    pub fn d2(&self, x: T) -> T {
        self.derivative(x, 2)
    }

    pub fn d3(&self, x: T) -> T {
        self.derivative(x, 3)
    }

    /// Normalized Taylor coefficients `V⁽ⁿ⁾(x)/n!`, `n < len`.
    pub fn taylor(&self, x: T, len: usize) -> Vec<T> {
        let mut fact = T::one();
        (0..len)
            .map(|n| {
                if n > 1 {
                    fact = fact * T::from_usize_lossy(n);
                }
                self.derivative(x, n) / fact
            })
            .collect()
    }

    pub fn v_min(&self) -> T {
        self.value(T::zero())
    }

    /// Location of the global maximum, as a representative in `[-1/2, 0]`.
    pub fn argmax(&self) -> T {
        match *self {
            Self::TwoHarmonic { kappa, beta } if T::lit(4.0) * beta > kappa => {
                // V' = 2π sin 2πx (κ + 4β cos 2πx); compare the interior
                // critical point with x = 1/2.
                let c = -kappa / (T::lit(4.0) * beta);
                let x = -c.acos() / T::two_pi();
                if self.value(x) > self.value(-T::lit(0.5)) {
                    x
                } else {
                    -T::lit(0.5)
                }
            }
            _ => -T::lit(0.5),
        }
    }

    pub fn v_max(&self) -> T {
        self.value(self.argmax())
    }

    /// `V(x) - V(0)`, without cancellation near the origin.
    pub fn excess(&self, x: T) -> T {
        self.value(x) - self.v_min()
    }

    /// `V_max - V(x)`, without cancellation near the maximum.
    pub fn deficit(&self, x: T) -> T {
        let c = (T::PI() * x).cos();
        match *self {
            Self::Pendulum { kappa } => T::lit(2.0) * kappa * c * c,
            // 2cos²(πx)(κ - 4β sin²(πx)) when the maximum sits at 1/2.
            Self::TwoHarmonic { kappa, beta } if T::lit(4.0) * beta <= kappa => {
                let s = (T::PI() * x).sin();
                T::lit(2.0) * c * c * (kappa - T::lit(4.0) * beta * s * s)
            }
            Self::Zero => T::zero(),
            _ => self.v_max() - self.value(x),
        }
    }

    /// Checks the standing hypotheses: symmetry, minimum at the origin,
    /// non-degenerate and unique. Never fails; violations are listed in the
    /// report.
    pub fn validate(&self, samples: usize) -> ValidationReport<T> {
        let n = samples.max(16);
        let nf = T::from_usize_lossy(n);
        // Midpoint nodes never coincide with 0 or ±1/2.
        let node = |k: usize| (T::from_usize_lossy(k) + T::lit(0.5)) / nf - T::lit(0.5);
        let mut symmetry_residual = T::zero();
        for k in 0..n {
            let x = node(k);
            symmetry_residual = symmetry_residual.max((self.value(x) - self.value(-x)).abs());
        }
        let mut minima = Vec::new();
        let mut maxima = Vec::new();
        let tol = T::tol(1e-14);
        for k in 0..n {
            let a = node(k);
            let b = if k + 1 == n { node(0) + T::one() } else { node(k + 1) };
            let (ga, gb) = (self.d1(a), self.d1(b));
            if ga < T::zero() && gb > T::zero() || ga > T::zero() && gb < T::zero() {
                let x = brent(|x| self.d1(x), a, b, tol).map(|r| r.x).unwrap_or((a + b) * T::lit(0.5));
                let x = crate::numerics::PeriodicGrid::wrap(x);
                if ga < T::zero() {
                    minima.push(x);
                } else {
                    maxima.push(x);
                }
            }
        }
        let v2_at_origin = self.d2(T::zero());
        let mut violations = Vec::new();
        if symmetry_residual > T::tol(1e-12) {
            violations.push(Hypothesis::Symmetric);
        }
        if v2_at_origin <= T::zero() {
            violations.push(Hypothesis::NonDegenerateMinimum);
        }
        let at_origin = minima.iter().any(|m| m.abs() <= T::tol(1e-9));
        if !at_origin {
            violations.push(Hypothesis::MinimumAtOrigin);
        }
        if minima.len() > 1 {
            violations.push(Hypothesis::UniqueMinimum);
        }
        ValidationReport {
            name: self.name(),
            symmetry_residual,
            v2_at_origin,
            v_min: self.v_min(),
            v_max: self.v_max(),
            minima,
            maxima,
            violations,
        }
    }
}

impl<T: Real> fmt::Display for Potential<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Pendulum { kappa } => write!(f, "pendulum(kappa={kappa})"),
            Self::TwoHarmonic { kappa, beta } => write!(f, "two-harmonic(kappa={kappa}, beta={beta})"),
            Self::Zero => write!(f, "zero"),
        }
    }
}

/// A standing hypothesis on `V`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Hypothesis {
    Symmetric,
    MinimumAtOrigin,
    NonDegenerateMinimum,
    UniqueMinimum,
}

impl fmt::Display for Hypothesis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Self::Symmetric => "V(x) = V(-x)",
            Self::MinimumAtOrigin => "minimum at the origin",
            Self::NonDegenerateMinimum => "V''(0) > 0",
            Self::UniqueMinimum => "unique interior minimum",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport<T> {
    pub name: &'static str,
    /// `max |V(x) - V(-x)|` over the samples.
    pub symmetry_residual: T,
    pub v2_at_origin: T,
    pub v_min: T,
    pub v_max: T,
    /// Local minima found by the sign-change scan of `V'`.
    pub minima: Vec<T>,
    pub maxima: Vec<T>,
    pub violations: Vec<Hypothesis>,
}

impl<T: Real> ValidationReport<T> {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    /// Converts a failed report into an error naming the hypotheses.
    pub fn into_result(self) -> Result<Self> {
        if self.passed() {
            return Ok(self);
        }
        let names: Vec<String> = self.violations.iter().map(|h| h.to_string()).collect();
        Err(Error::InvalidParameter(format!("potential {} violates: {}", self.name, names.join(", "))))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn pendulum_values() {
        let v = Potential::<f64>::pendulum(1.0);
        assert!((v.d2(0.0) - 4.0 * PI * PI).abs() < 1e-12);
        assert!((v.value(0.5) - 2.0).abs() < 1e-15);
        assert_eq!(v.argmax(), -0.5);
        assert!(v.validate(256).passed());
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let d = 1e-5;
        for v in [Potential::<f64>::pendulum(1.3), Potential::<f64>::two_harmonic(0.7)] {
            for &x in &[-0.41, -0.1, 0.03, 0.27] {
                for n in 0..4 {
                    let fd = (v.derivative(x + d, n) - v.derivative(x - d, n)) / (2.0 * d);
                    let scale = 1.0 + v.derivative(x, n + 1).abs();
                    assert!((fd - v.derivative(x, n + 1)).abs() < 1e-6 * scale, "{v} n={n} x={x}");
                }
            }
        }
    }

    #[test]
    fn excess_and_deficit() {
        for v in [Potential::<f64>::pendulum(1.3), Potential::<f64>::two_harmonic(0.7)] {
            for &x in &[-0.5, -0.37, 0.0, 0.21] {
                assert!((v.excess(x) - (v.value(x) - v.v_min())).abs() < 1e-14);
                assert!((v.deficit(x) - (v.v_max() - v.value(x))).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn strong_second_harmonic_fails() {
        let v = Potential::<f64>::TwoHarmonic { kappa: 1.0, beta: 0.6 };
        let r = v.validate(512);
        assert!(r.violations.contains(&Hypothesis::UniqueMinimum), "{r:?}");
        assert!(r.into_result().is_err());
    }

    #[test]
    fn zero_is_flagged() {
        let r = Potential::<f64>::Zero.validate(64);
        assert!(!r.passed());
        assert!(r.violations.contains(&Hypothesis::NonDegenerateMinimum));
    }

    #[test]
    fn taylor_coefficients() {
        let v = Potential::<f64>::pendulum(1.0);
        let t = v.taylor(0.0, 5);
        assert!(t[0].abs() < 1e-15 && t[1].abs() < 1e-15);
        assert!((t[2] - 2.0 * PI * PI).abs() < 1e-12);
        assert!((t[4] + (2.0 * PI).powi(4) / 24.0).abs() < 1e-9);
    }
}
