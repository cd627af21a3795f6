use crate::numerics::PeriodicGrid;
use crate::scalar::Real;

/// `exp(1 - 1/(1 - t²))` on `|t| < 1`, zero outside; equals 1 at `t = 0`.
pub fn bump<T: Real>(t: T) -> T {
    let s = T::one() - t * t;
    if s <= T::zero() {
        T::zero()
    } else {
        (T::one() - T::one() / s).exp()
    }
}

/// C∞ step: 0 for `t ≤ 0`, 1 for `t ≥ 1`.
pub fn smooth_step<T: Real>(t: T) -> T {
    let psi = |u: T| if u <= T::zero() { T::zero() } else { (-T::one() / u).exp() };
    let a = psi(t);
    let b = psi(T::one() - t);
    if a + b == T::zero() {
        return if t > T::lit(0.5) { T::one() } else { T::zero() };
    }
    a / (a + b)
}

/// One factor of a separable test symbol.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Factor<T> {
    Constant(T),
    /// [`bump`] centred at `center` with support radius `half_width`.
    Bump { center: T, half_width: T },
    /// 1 on `[lo, hi]`, smooth ramps of width `ramp` on either side.
    Plateau { lo: T, hi: T, ramp: T },
}

impl<T: Real> Factor<T> {
    fn eval_with(&self, t: T, periodic: bool) -> T {
        match *self {
            Self::Constant(c) => c,
            Self::Bump { center, half_width } => {
                let d = if periodic { PeriodicGrid::wrap(t - center) } else { t - center };
                bump(d / half_width)
            }
            Self::Plateau { lo, hi, ramp } => {
                let (d_lo, d_hi) = if periodic {
                    let mid = (lo + hi) * T::lit(0.5);
                    let d = PeriodicGrid::wrap(t - mid);
                    (d + mid - lo, hi - mid - d)
                } else {
                    (t - lo, hi - t)
                };
                smooth_step(d_lo / ramp + T::one()) * smooth_step(d_hi / ramp + T::one())
            }
        }
    }

    /// Closed support, or `None` if unbounded.
    pub fn support(&self) -> Option<(T, T)> {
        match *self {
            Self::Constant(c) if c == T::zero() => Some((T::zero(), T::zero())),
            Self::Constant(_) => None,
            Self::Bump { center, half_width } => Some((center - half_width, center + half_width)),
            Self::Plateau { lo, hi, ramp } => Some((lo - ramp, hi + ramp)),
        }
    }
}

/// Separable smooth symbol `f(x, p) = g(x)·χ(p)` on torus × momentum, where
/// `p` is the phase-space momentum (the coordinate in which the level is the
/// graph `p = p⁺(x)`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TestSymbol<T> {
    pub x: Factor<T>,
    pub p: Factor<T>,
}

impl<T: Real> TestSymbol<T> {
    pub fn new(x: Factor<T>, p: Factor<T>) -> Self {
        Self { x, p }
    }

    pub fn constant(c: T) -> Self {
        Self { x: Factor::Constant(c), p: Factor::Constant(T::one()) }
    }

    /// Bump in `p` centred at `center`, constant in `x`.
    pub fn momentum_bump(center: T, half_width: T) -> Self {
        Self { x: Factor::Constant(T::one()), p: Factor::Bump { center, half_width } }
    }

    pub fn eval(&self, x: T, p: T) -> T {
        let g = self.x.eval_with(x, true);
        if g == T::zero() {
            return g;
        }
        g * self.p.eval_with(p, false)
    }

    pub fn eval_x(&self, x: T) -> T {
        self.x.eval_with(x, true)
    }

    pub fn eval_p(&self, p: T) -> T {
        self.p.eval_with(p, false)
    }

    /// Momentum support `[c, d]`, `None` if unbounded.
    pub fn p_support(&self) -> Option<(T, T)> {
        self.p.support()
    }

    /// Position support as an interval possibly extending past `±1/2`;
    /// `None` for the whole torus.
    pub fn x_support(&self) -> Option<(T, T)> {
        self.x.support()
    }

    /// Whether `f` vanishes identically.
    pub fn is_zero(&self) -> bool {
        matches!(self.x, Factor::Constant(c) if c == T::zero()) || matches!(self.p, Factor::Constant(c) if c == T::zero())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bump_shape() {
        assert_eq!(bump(0.0), 1.0);
        assert_eq!(bump(1.0), 0.0);
        assert_eq!(bump(-1.5), 0.0);
        assert!(bump(0.5f64) > 0.0 && bump(0.5f64) < 1.0);
    }

    #[test]
    fn step_and_plateau() {
        assert_eq!(smooth_step(-0.1), 0.0);
        assert_eq!(smooth_step(1.1), 1.0);
        assert!((smooth_step(0.5f64) - 0.5).abs() < 1e-15);
        let f = Factor::Plateau { lo: 1.0, hi: 2.0, ramp: 0.5 };
        assert_eq!(f.eval_with(1.5, false), 1.0);
        assert_eq!(f.eval_with(0.4, false), 0.0);
        assert!(f.eval_with(0.75, false) > 0.0);
        assert_eq!(f.support(), Some((0.5, 2.5)));
    }

    #[test]
    fn periodic_x_bump() {
        let s = TestSymbol::new(Factor::Bump { center: 0.45, half_width: 0.1 }, Factor::Constant(1.0));
        assert!(s.eval(-0.49, 0.0) > 0.0);
        assert_eq!(s.eval(0.0, 0.0), 0.0);
    }
}
