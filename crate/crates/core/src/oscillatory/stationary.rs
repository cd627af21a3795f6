use num_complex::Complex;

use crate::classical::{ClassicalLevel, TestSymbol};
use crate::error::{Error, Result};
use crate::scalar::Real;

use super::{CriticalKind, CriticalPoint, Mollifier, PhaseFamily};

/// Choice of `x̄` in `ζ(x, y) = p⁺(x̄)/√(p⁺(x + y/2) p⁺(x - y/2))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum XBar<T> {
    /// `p⁺(x̄) = ∂H̄/∂P`.
    Rotation,
    /// A measured point, e.g. `x_h` from a cell solve.
    Point(T),
}

impl<T: Real> XBar<T> {
    pub fn momentum(&self, level: &ClassicalLevel<T>) -> T {
        match *self {
            Self::Rotation => level.dhdp(),
            Self::Point(x) => level.p_plus(x),
        }
    }
}

/// `ζ` from the two half-point momenta.
pub(crate) fn zeta<T: Real>(q_bar: T, q_plus: T, q_minus: T) -> T {
    q_bar / (q_plus * q_minus).sqrt()
}

/// Leading-order contribution of one critical point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointContribution<T> {
    pub point: CriticalPoint<T>,
    /// `2πh/√|det D²S| · e^{iπ sgn/4} · e^{iS/h} · η f ζ`.
    pub value: Complex<T>,
    /// Same term with the alternative Hessian `diag(v₀''(2x_i), v₀''(2x_i))`
    /// and no signature factor.
    pub value_alt: Complex<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StationaryPhase<T> {
    pub points: Vec<PointContribution<T>>,
    /// Sum over the points `(x_i, 0)`; real.
    pub j1: T,
    /// Sum over the points `(0, 2x_i)`.
    pub j2: Complex<T>,
    pub j2_alt: Complex<T>,
}

impl<T: Real> StationaryPhase<T> {
    pub fn total(&self) -> Complex<T> {
        self.j2 + self.j1
    }
}

/// Leading stationary-phase value of
/// `∬ η(y) f(x, s) ζ(x, y) e^{iS(x,y)/h} dx dy` over `𝕋 × [-1/2, 1/2]`.
///
/// Each point is taken at its copy in the cell; the cutoff `η` is applied
/// there. Contributions of the `y = ±1/2` edges are not modelled.
pub fn stationary_phase_estimate<T: Real>(
    family: &PhaseFamily<'_, T>,
    f: &TestSymbol<T>,
    xbar: XBar<T>,
    h: T,
    mollifier: Option<Mollifier<T>>,
) -> Result<StationaryPhase<T>> {
    if let Some(m) = mollifier {
        if m.eps > T::lit(0.5) {
            return Err(Error::InvalidParameter(format!("mollifier width {} exceeds 1/2", m.eps)));
        }
    }
    let level = family.level;
    let q_bar = xbar.momentum(level);
    let two_pi_h = T::two_pi() * h;
    let fp = f.eval_p(family.s);
    let mut out = StationaryPhase {
        points: Vec::new(),
        j1: T::zero(),
        j2: Complex::new(T::zero(), T::zero()),
        j2_alt: Complex::new(T::zero(), T::zero()),
    };
    for point in family.critical_points()? {
        let half = T::lit(0.5) * point.y;
        let (qp, qm) = (level.p_plus(point.x + half), level.p_plus(point.x - half));
        let (rx, ry) = point.representative;
        let cut = mollifier.map_or(T::one(), |m| m.eval(ry));
        let amp = cut * fp * f.eval_x(rx) * zeta(q_bar, qp, qm);
        let phase = Complex::from_polar(T::one(), family.phase(rx, ry) / h);
        let maslov = Complex::from_polar(T::one(), T::PI() * T::lit(point.hessian.signature() as f64 / 4.0));
        let value = maslov * phase * (two_pi_h * amp / point.hessian.det().abs().sqrt());
        let value_alt = phase * (two_pi_h * amp / point.hessian_alt.det().abs().sqrt());
        match point.kind {
            CriticalKind::Diagonal => out.j1 = out.j1 + value.re,
            CriticalKind::Antidiagonal => {
                out.j2 = out.j2 + value;
                out.j2_alt = out.j2_alt + value_alt;
            }
        }
        out.points.push(PointContribution { point, value, value_alt });
    }
    Ok(out)
}
