use crate::error::{Error, Result};
use crate::numerics::{integrate_interval, integrate_torus};
use crate::scalar::Real;

use super::{ClassicalLevel, TestSymbol};

fn check_support<T: Real>(level: &ClassicalLevel<T>, f: &TestSymbol<T>) -> Result<Option<(T, T)>> {
    let (lo, hi) = (level.p_min(), level.p_max());
    let err = |c: T, d: T| Error::SupportCrossesLevelBounds {
        lo: c.to_f64_lossy(),
        hi: d.to_f64_lossy(),
        p_min: lo.to_f64_lossy(),
        p_max: hi.to_f64_lossy(),
    };
    match f.p_support() {
        None => Err(err(T::neg_infinity(), T::infinity())),
        Some((c, d)) if (c <= lo && lo <= d) || (c <= hi && hi <= d) => Err(err(c, d)),
        Some((c, d)) if d < lo || c > hi => Ok(None),
        Some(cd) => Ok(Some(cd)),
    }
}

/// Semiclassical limit `Σ_i ∫ f(x_i(s), s) · Q / (|p⁺'(x_i(s))| · s) ds` over the
/// branches `p⁺(x_i(s)) = s`, `s` the phase-space momentum.
///
/// With `s = p_min + Δ(1 - cos t)/2` the inverse-square-root endpoint
/// behaviour of `1/|p⁺'|` is absorbed by `ds/dt`. Symbols whose momentum
/// support meets `p_min` or `p_max` are refused; see
/// [`mather_limit_functional_unchecked`] for the override.
pub fn mather_limit_functional<T: Real>(level: &ClassicalLevel<T>, f: &TestSymbol<T>) -> Result<T> {
    match check_support(level, f)? {
        None => Ok(T::zero()),
        Some((c, d)) => branch_integral(level, f, c, d),
    }
}

/// [`mather_limit_functional`] without the support check.
pub fn mather_limit_functional_unchecked<T: Real>(level: &ClassicalLevel<T>, f: &TestSymbol<T>) -> Result<T> {
    let (c, d) = f.p_support().unwrap_or((level.p_min(), level.p_max()));
    if d < level.p_min() || c > level.p_max() {
        return Ok(T::zero());
    }
    branch_integral(level, f, c, d)
}

fn branch_integral<T: Real>(level: &ClassicalLevel<T>, f: &TestSymbol<T>, c: T, d: T) -> Result<T> {
    let (lo, hi) = (level.p_min(), level.p_max());
    let delta = hi - lo;
    if delta <= T::epsilon() * hi {
        return Err(Error::Degenerate { p: lo.to_f64_lossy(), delta: delta.to_f64_lossy() });
    }
    let half = T::lit(0.5);
    let to_t = |s: T| {
        let u = (T::one() - T::lit(2.0) * (s - lo) / delta).max(-T::one()).min(T::one());
        u.acos()
    };
    let (ta, tb) = (to_t(c.max(lo)), to_t(d.min(hi)));
    let q = level.dhdp();
    let integrand = |t: T| -> T {
        let s = lo + delta * (T::one() - t.cos()) * half;
        let ds = delta * t.sin() * half;
        if !(s > lo && s < hi) || ds == T::zero() {
            return T::zero();
        }
        let Ok(br) = level.branches(s) else {
            return T::zero();
        };
        [br.x1, br.x2]
            .iter()
            .map(|&x| f.eval(x, s) * q / (level.p_plus_d1(x).abs() * s))
            .sum::<T>()
            * ds
    };
    integrate_interval(integrand, ta, tb, T::tol(1e-12))
}

/// `∫ f(x, p⁺(x)) b(x) dx`, the same limit written on the configuration
/// side.
pub fn mather_average<T: Real>(level: &ClassicalLevel<T>, f: &TestSymbol<T>) -> Result<T> {
    integrate_torus(|x| f.eval(x, level.p_plus(x)) * level.mather_density(x), T::tol(1e-14))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classical::{hbar_of_p, Factor};
    use crate::potential::Potential;

    #[test]
    fn two_sides_agree() {
        let l = hbar_of_p(&Potential::<f64>::pendulum(1.0), 1.6, 1e-13).unwrap();
        let mid = 0.5 * (l.p_min() + l.p_max());
        let w = 0.3 * (l.p_max() - l.p_min());
        let f = TestSymbol::new(Factor::Bump { center: 0.1, half_width: 0.3 }, Factor::Bump { center: mid, half_width: w });
        let a = mather_limit_functional(&l, &f).unwrap();
        let b = mather_average(&l, &f).unwrap();
        assert!((a - b).abs() < 1e-8, "{a} vs {b}");
        assert!(a > 0.0);
    }

    #[test]
    fn refuses_crossing_and_ignores_far_supports() {
        let l = hbar_of_p(&Potential::<f64>::pendulum(1.0), 1.6, 1e-13).unwrap();
        let f = TestSymbol::momentum_bump(l.p_max(), 0.1);
        assert!(matches!(mather_limit_functional(&l, &f), Err(Error::SupportCrossesLevelBounds { .. })));
        let g = TestSymbol::momentum_bump(l.p_max() + 1.0, 0.1);
        assert_eq!(mather_limit_functional(&l, &g).unwrap(), 0.0);
        assert!(mather_limit_functional_unchecked(&l, &f).unwrap() > 0.0);
    }
}
