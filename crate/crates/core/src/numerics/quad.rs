use crate::error::{Error, Result};
use crate::scalar::Real;

/// Periodic trapezoid rule: `(1/M) Σ samples`.
///
/// Exact for trigonometric polynomials of degree `< M` and spectrally
/// accurate for smooth periodic integrands.
pub fn quad_periodic<T: Real>(samples: &[T]) -> Result<T> {
    if samples.is_empty() {
        return Err(Error::Empty);
    }
    let s: T = samples.iter().copied().sum();
    Ok(s / T::from_usize_lossy(samples.len()))
}

/// Integral over the unit torus of a smooth periodic function, refining the
/// trapezoid rule by doubling until successive values agree to `tol`
/// (relative to `max(1, |I|)`).
pub fn integrate_torus<T: Real, F: Fn(T) -> T>(f: F, tol: T) -> Result<T> {
    let mut m = 32usize;
    let mut sum: T = (0..m)
        .map(|j| f(T::from_usize_lossy(j) / T::from_usize_lossy(m) - T::lit(0.5)))
        .sum();
    let mut prev = sum / T::from_usize_lossy(m);
    if !prev.is_finite() {
        return Err(Error::NonFinite("integrate_torus"));
    }
    while m < (1 << 22) {
        // Midpoints of the current grid are the odd nodes of the refined one.
        let mid: T = (0..m)
            .map(|j| {
                f((T::from_usize_lossy(2 * j + 1)) / T::from_usize_lossy(2 * m) - T::lit(0.5))
            })
            .sum();
        sum = sum + mid;
        m *= 2;
        let cur = sum / T::from_usize_lossy(m);
        if !cur.is_finite() {
            return Err(Error::NonFinite("integrate_torus"));
        }
        if (cur - prev).abs() <= tol * T::one().max(cur.abs()) && m >= 128 {
            return Ok(cur);
        }
        prev = cur;
    }
    Err(Error::Stagnation { iterations: m, residual: f64::NAN })
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre<T: Real>(n: usize) -> (Vec<T>, Vec<T>) {
    assert!(n >= 1);
    let mut nodes = vec![T::zero(); n];
    let mut weights = vec![T::zero(); n];
    let nf = T::from_usize_lossy(n);
    for i in 0..n.div_ceil(2) {
        // Tricomi initial guess, then Newton on P_n.
        let k = T::from_usize_lossy(i + 1);
        let mut x = (T::PI() * (k - T::lit(0.25)) / (nf + T::lit(0.5))).cos();
        let mut dp = T::one();
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = p / d;
            x = x - dx;
            if dx.abs() <= T::epsilon() * T::lit(4.0) {
                break;
            }
        }
        let (_, d) = legendre(n, x);
        dp = if d != T::zero() { d } else { dp };
        let w = T::lit(2.0) / ((T::one() - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre<T: Real>(n: usize, x: T) -> (T, T) {
    let mut p0 = T::one();
    let mut p1 = x;
    for k in 2..=n {
        let kf = T::from_usize_lossy(k);
        let p2 = ((T::lit(2.0) * kf - T::one()) * x * p1 - (kf - T::one()) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let p = if n == 0 { p0 } else { p1 };
    let nf = T::from_usize_lossy(n);
    let d = nf * (x * p1 - p0) / (x * x - T::one());
    (p, d)
}

/// Composite 20-point Gauss–Legendre on `[a, b]`, doubling the number of
/// panels until two successive estimates agree to `tol` (relative to
/// `max(1, |I|)`).
pub fn integrate_interval<T: Real, F: Fn(T) -> T>(f: F, a: T, b: T, tol: T) -> Result<T> {
    if a == b {
        return Ok(T::zero());
    }
    let (gx, gw) = gauss_legendre::<T>(20);
    let composite = |panels: usize| -> T {
        let width = (b - a) / T::from_usize_lossy(panels);
        let half = width * T::lit(0.5);
        let mut s = T::zero();
        for p in 0..panels {
            let mid = a + width * (T::from_usize_lossy(p) + T::lit(0.5));
            for (x, w) in gx.iter().zip(&gw) {
                s = s + *w * f(mid + half * *x);
            }
        }
        s * half
    };
    let mut panels = 1;
    let mut prev = composite(panels);
    while panels < 8192 {
        panels *= 2;
        let cur = composite(panels);
        if !cur.is_finite() {
            return Err(Error::NonFinite("integrate_interval"));
        }
        if (cur - prev).abs() <= tol * T::one().max(cur.abs()) {
            return Ok(cur);
        }
        prev = cur;
    }
    Err(Error::Stagnation { iterations: panels, residual: f64::NAN })
}
