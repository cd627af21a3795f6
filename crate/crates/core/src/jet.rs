//! Truncated Taylor series at a point, `f(x + t) = Σ c_n tⁿ`.
//!
//! Arithmetic truncates to the shorter operand, so derivatives of
//! expressions come out exactly (to rounding) from derivatives of `V`.

use std::ops::{Add, Mul, Neg, Sub};

use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq)]
pub struct Jet<T> {
    c: Vec<T>,
}

impl<T: Real> Jet<T> {
    pub fn from_coefficients(c: Vec<T>) -> Self {
        assert!(!c.is_empty(), "empty jet");
        Self { c }
    }

    pub fn constant(v: T, len: usize) -> Self {
        let mut c = vec![T::zero(); len.max(1)];
        c[0] = v;
        Self { c }
    }

    pub fn len(&self) -> usize {
        self.c.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn value(&self) -> T {
        self.c[0]
    }

    pub fn coefficients(&self) -> &[T] {
        &self.c
    }

    /// `f⁽ⁿ⁾(x)`, or zero beyond the stored order.
    pub fn derivative_value(&self, n: usize) -> T {
        if n >= self.c.len() {
            return T::zero();
        }
        let fact = (2..=n).fold(T::one(), |f, k| f * T::from_usize_lossy(k));
        self.c[n] * fact
    }

    /// Jet of `f'`; one order shorter.
    pub fn derivative(&self) -> Self {
        if self.c.len() == 1 {
            return Self::constant(T::zero(), 1);
        }
        let c = (1..self.c.len()).map(|n| self.c[n] * T::from_usize_lossy(n)).collect();
        Self { c }
    }

    pub fn truncate(&self, len: usize) -> Self {
        Self { c: self.c[..len.clamp(1, self.c.len())].to_vec() }
    }

    pub fn scale(&self, s: T) -> Self {
        Self { c: self.c.iter().map(|v| *v * s).collect() }
    }

    pub fn add_scalar(&self, s: T) -> Self {
        let mut c = self.c.clone();
        c[0] = c[0] + s;
        Self { c }
    }

    pub fn div(&self, b: &Self) -> Self {
        let n = self.len().min(b.len());
        let mut r = vec![T::zero(); n];
        for k in 0..n {
            let mut s = self.c[k];
            for j in 1..=k {
                s = s - b.c[j] * r[k - j];
            }
            r[k] = s / b.c[0];
        }
        Self { c: r }
    }

    pub fn sqrt(&self) -> Self {
        let n = self.len();
        let mut s = vec![T::zero(); n];
        s[0] = self.c[0].sqrt();
        for k in 1..n {
            let mut acc = self.c[k];
            for j in 1..k {
                acc = acc - s[j] * s[k - j];
            }
            s[k] = acc / (T::lit(2.0) * s[0]);
        }
        Self { c: s }
    }

    pub fn ln(&self) -> Self {
        let n = self.len();
        let mut l = vec![T::zero(); n];
        l[0] = self.c[0].ln();
        for k in 1..n {
            let mut acc = self.c[k];
            for j in 1..k {
                acc = acc - T::from_usize_lossy(j) / T::from_usize_lossy(k) * l[j] * self.c[k - j];
            }
            l[k] = acc / self.c[0];
        }
        Self { c: l }
    }
}

impl<T: Real> Add for &Jet<T> {
    type Output = Jet<T>;
    fn add(self, b: &Jet<T>) -> Jet<T> {
        let n = self.len().min(b.len());
        Jet { c: (0..n).map(|k| self.c[k] + b.c[k]).collect() }
    }
}

impl<T: Real> Sub for &Jet<T> {
    type Output = Jet<T>;
    fn sub(self, b: &Jet<T>) -> Jet<T> {
        let n = self.len().min(b.len());
        Jet { c: (0..n).map(|k| self.c[k] - b.c[k]).collect() }
    }
}

impl<T: Real> Mul for &Jet<T> {
    type Output = Jet<T>;
    fn mul(self, b: &Jet<T>) -> Jet<T> {
        let n = self.len().min(b.len());
        Jet { c: (0..n).map(|k| (0..=k).map(|j| self.c[j] * b.c[k - j]).sum()).collect() }
    }
}

impl<T: Real> Neg for &Jet<T> {
    type Output = Jet<T>;
    fn neg(self) -> Jet<T> {
        Jet { c: self.c.iter().map(|v| -*v).collect() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exp_jet(x: f64, n: usize) -> Jet<f64> {
        let mut f = 1.0;
        Jet::from_coefficients(
            (0..n)
                .map(|k| {
                    if k > 1 {
                        f *= k as f64;
                    }
                    x.exp() / f
                })
                .collect(),
        )
    }

    #[test]
    fn sqrt_and_ln_of_exp() {
        let e = exp_jet(0.3, 6);
        let s = e.sqrt();
        // sqrt(e^x) = e^{x/2}: n-th derivative (1/2)^n e^{x/2}.
        for n in 0..6 {
            assert!((s.derivative_value(n) - 0.5f64.powi(n as i32) * 0.15f64.exp()).abs() < 1e-13);
        }
        let l = e.ln();
        assert!((l.value() - 0.3).abs() < 1e-15);
        assert!((l.derivative_value(1) - 1.0).abs() < 1e-14);
        for n in 2..6 {
            assert!(l.derivative_value(n).abs() < 1e-12);
        }
    }

    #[test]
    fn division_inverts_product() {
        let a = Jet::from_coefficients(vec![1.0f64, 2.0, -1.0, 0.5]);
        let b = Jet::from_coefficients(vec![2.0, 0.3, 0.1, 0.7]);
        let q = (&a * &b).div(&b);
        for (x, y) in q.coefficients().iter().zip(a.coefficients()) {
            assert!((x - y).abs() < 1e-14);
        }
    }

    #[test]
    fn derivative_shortens() {
        let a = Jet::from_coefficients(vec![1.0f64, 2.0, 3.0]);
        let d = a.derivative();
        assert_eq!(d.coefficients(), &[2.0, 6.0]);
        assert_eq!(d.derivative_value(1), 6.0);
    }
}
