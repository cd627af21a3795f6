use crate::error::{Error, Result};
use crate::scalar::Real;

/// Result of a bracketed root solve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Root<T> {
    pub x: T,
    pub value: T,
    /// Width of the final bracket.
    pub bracket: T,
    pub iterations: usize,
}

const MAX_ITER: usize = 200;

/// Root of a continuous monotone `g` on `[a, b]` with `g(a) g(b) <= 0`.
pub fn find_root_monotone<T: Real, F: FnMut(T) -> T>(g: F, a: T, b: T, tol: T) -> Result<T> {
    brent(g, a, b, tol).map(|r| r.x)
}

/// Brent's method (inverse quadratic interpolation safeguarded by
/// bisection), capped at 200 iterations.
pub fn brent<T: Real, F: FnMut(T) -> T>(mut g: F, a: T, b: T, tol: T) -> Result<Root<T>> {
    let two = T::lit(2.0);
    let half = T::lit(0.5);
    let three = T::lit(3.0);
    let (mut a, mut b) = (a, b);
    let mut fa = g(a);
    let mut fb = g(b);
    if !fa.is_finite() || !fb.is_finite() {
        return Err(Error::NonFinite("brent: bracket evaluation"));
    }
    if fa == T::zero() {
        return Ok(Root { x: a, value: fa, bracket: T::zero(), iterations: 0 });
    }
    if fb == T::zero() {
        return Ok(Root { x: b, value: fb, bracket: T::zero(), iterations: 0 });
    }
    if fa.signum() == fb.signum() {
        return Err(Error::NoSignChange { a: a.to_f64_lossy(), b: b.to_f64_lossy() });
    }
    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut e = d;
    for it in 0..MAX_ITER {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = two * T::epsilon() * b.abs() + half * tol;
        let xm = half * (c - b);
        if xm.abs() <= tol1 || fb == T::zero() {
            return Ok(Root { x: b, value: fb, bracket: (c - b).abs(), iterations: it });
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = two * xm * s;
                q = T::one() - s;
            } else {
                let qq = fa / fc;
                let r = fb / fc;
                p = s * (two * xm * qq * (qq - r) - (b - a) * (r - T::one()));
                q = (qq - T::one()) * (r - T::one()) * (s - T::one());
            }
            if p > T::zero() {
                q = -q;
            }
            p = p.abs();
            let min1 = three * xm * q - (tol1 * q).abs();
            let min2 = (e * q).abs();
            if two * p < min1.min(min2) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b = if d.abs() > tol1 { b + d } else { b + tol1.copysign(xm) };
        fb = g(b);
        if !fb.is_finite() {
            return Err(Error::NonFinite("brent: iterate evaluation"));
        }
    }
    Err(Error::Stagnation { iterations: MAX_ITER, residual: fb.to_f64_lossy() })
}
