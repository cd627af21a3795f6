//! Formal expansion `v̂ = Σ hʲ vⱼ`, `Ĥ = Σ hʲ H̄ⱼ` of the viscous cell problem
//! `-(h/2)v'' + ½(P + v')² + V = H̄_h`.
//!
//! Writing `wⱼ = vⱼ'` and `q = p⁺`, the order-`k` equation is
//!
//! ```text
//! q·w_k + ½ Σ_{i+j=k, i,j≥1} wᵢwⱼ - ½ w'_{k-1} = H̄_k,
//! ```
//!
//! and periodicity of `v_k` (`∫ w_k = 0`) fixes `H̄_k` as an average against
//! the density `∝ 1/q`. At each point the recursion runs on Taylor jets
//! seeded by the analytic derivatives of `V`, so every `w_k` comes with
//! its exact derivatives. Only `v_k = ∫ w_k` for `k ≥ 2` needs a global
//! step (spectral antiderivative, mean zero).
//!
//! The backward problem `(h/2)v*'' + ½(P + v*')² + V = H̄_h` is the same
//! equation with `h ↦ -h`, so its series is `v*ⱼ = (-1)ʲ vⱼ` and all odd
//! `H̄ⱼ` vanish.

use crate::classical::ClassicalLevel;
use crate::error::{Error, Result};
use crate::jet::Jet;
use crate::numerics::TrigSeries;
use crate::scalar::Real;

/// Largest supported expansion order.
pub const MAX_ORDER: usize = 6;

#[derive(Debug, Clone)]
pub struct ExpansionSeries<T: Real> {
    level: ClassicalLevel<T>,
    order: usize,
    hbar: Vec<T>,
    /// `v_j` for `j ≥ 2`, mean zero.
    tails: Vec<TrigSeries<T>>,
    grid_size: usize,
}

/// Runs the recursion at one point given the constants `H̄_1..` already
/// known; when `hk` is short, stops after the last order that can be
/// completed and returns the unfinished numerator for the next order.
fn recurse<T: Real>(level: &ClassicalLevel<T>, order: usize, hk: &[T], x: T) -> (Jet<T>, Vec<Jet<T>>, Option<Jet<T>>) {
    let q = level.p_plus_jet(x, order + 2);
    let mut w = vec![q.add_scalar(-level.p())];
    let half = T::lit(0.5);
    for k in 1..=order {
        let mut a = w[k - 1].derivative().scale(half);
        for i in 1..k {
            a = &a - &(&w[i] * &w[k - i]).scale(half);
        }
        match hk.get(k) {
            Some(&h) => w.push(a.add_scalar(h).div(&q)),
            None => return (q, w, Some(a)),
        }
    }
    (q, w, None)
}

/// Builds the series up to order `n` (at most [`MAX_ORDER`]).
pub fn build_expansion<T: Real>(level: &ClassicalLevel<T>, n: usize) -> Result<ExpansionSeries<T>> {
    if n > MAX_ORDER {
        return Err(Error::InvalidParameter(format!("expansion order {n} exceeds {MAX_ORDER}")));
    }
    let mut m = 128usize;
    let mut prev: Option<Vec<T>> = None;
    loop {
        let hbar = constants(level, n, m);
        let settled = prev.as_ref().is_some_and(|p| {
            p.iter().zip(&hbar).all(|(a, b)| (*a - *b).abs() <= T::tol(1e-13) * T::one().max(b.abs()))
        });
        if settled || m >= 1 << 14 {
            if !settled {
                log::warn!("expansion constants not settled at grid {m}");
            }
            let tails = (2..=n)
                .map(|j| {
                    let samples: Vec<T> = (0..m)
                        .map(|i| {
                            let x = T::from_usize_lossy(i) / T::from_usize_lossy(m) - T::lit(0.5);
                            recurse(level, n, &hbar, x).1[j].value()
                        })
                        .collect();
                    TrigSeries::from_samples(&samples).map(|s| s.antiderivative())
                })
                .collect::<Result<Vec<_>>>()?;
            return Ok(ExpansionSeries { level: level.clone(), order: n, hbar, tails, grid_size: m });
        }
        prev = Some(hbar);
        m *= 2;
    }
}

fn constants<T: Real>(level: &ClassicalLevel<T>, n: usize, m: usize) -> Vec<T> {
    let xs: Vec<T> = (0..m).map(|i| T::from_usize_lossy(i) / T::from_usize_lossy(m) - T::lit(0.5)).collect();
    let inv_q: T = xs.iter().map(|&x| T::one() / level.p_plus(x)).sum();
    let mut hbar = vec![level.hbar()];
    for _ in 1..=n {
        // ∫ (H̄_k + A_k)/q = 0.
        let num: T = xs
            .iter()
            .map(|&x| {
                let (q, _, a) = recurse(level, n, &hbar, x);
                a.expect("numerator of the next order").value() / q.value()
            })
            .sum();
        hbar.push(-num / inv_q);
    }
    hbar
}

impl<T: Real> ExpansionSeries<T> {
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn level(&self) -> &ClassicalLevel<T> {
        &self.level
    }

    /// `H̄_0, ..., H̄_N`.
    pub fn hbar_coefficients(&self) -> &[T] {
        &self.hbar
    }

    pub fn hbar_coefficient(&self, k: usize) -> T {
        self.hbar[k]
    }

    /// Grid on which the constants and `v_j` (`j ≥ 2`) were resolved.
    pub fn grid_size(&self) -> usize {
        self.grid_size
    }

    /// Jets of `w_0, ..., w_N` at `x`; `w_k` carries `N + 2 - k` Taylor
    /// coefficients.
    pub fn derivative_jets(&self, x: T) -> Vec<Jet<T>> {
        recurse(&self.level, self.order, &self.hbar, x).1
    }

    /// `v_j(x)`: `v_0 = φ`, `v_1 = ½ ln p⁺`, `v_j` mean zero for `j ≥ 2`.
    pub fn v(&self, j: usize, x: T) -> T {
        match j {
            0 => self.level.phi(x),
            1 => T::lit(0.5) * self.level.p_plus(x).ln(),
            _ => self.tails[j - 2].eval(x),
        }
    }

    /// `v_j` on the grid `x_i = -1/2 + i/m`.
    pub fn sample_v(&self, j: usize, m: usize) -> Vec<T> {
        match j {
            0 => self.level.phi_series().sample(m),
            1 => (0..m)
                .map(|i| self.v(1, T::from_usize_lossy(i) / T::from_usize_lossy(m) - T::lit(0.5)))
                .collect(),
            _ => self.tails[j - 2].sample(m),
        }
    }

    pub fn dv(&self, j: usize, x: T) -> T {
        self.derivative_jets(x)[j].value()
    }

    pub fn d2v(&self, j: usize, x: T) -> T {
        self.derivative_jets(x)[j].derivative_value(1)
    }

    /// Truncated sums at step `h`; `star` selects the backward series.
    pub fn assemble(&self, h: T, star: bool) -> Assembled<'_, T> {
        let weights: Vec<T> = (0..=self.order)
            .map(|j| {
                let w = h.powi(j as i32);
                if star && j % 2 == 1 {
                    -w
                } else {
                    w
                }
            })
            .collect();
        let hbar = self.hbar.iter().zip(&weights).map(|(c, w)| *c * w.abs()).sum();
        Assembled { series: self, h, star, weights, hbar }
    }

    /// `max_i |∓(h/2)v̂'' + ½(P + v̂')² + V - Ĥ|` over the grid of size `m`;
    /// the upper sign for the forward problem, the lower for `star`.
    pub fn residual(&self, h: T, m: usize, star: bool) -> T {
        let a = self.assemble(h, star);
        (0..m)
            .map(|i| a.residual_at(T::from_usize_lossy(i) / T::from_usize_lossy(m) - T::lit(0.5)).abs())
            .fold(T::zero(), T::max)
    }
}

/// `v̂^N_h` (or the starred series) at a fixed `h`.
#[derive(Debug, Clone)]
pub struct Assembled<'a, T: Real> {
    series: &'a ExpansionSeries<T>,
    h: T,
    star: bool,
    weights: Vec<T>,
    hbar: T,
}

impl<T: Real> Assembled<'_, T> {
    pub fn h(&self) -> T {
        self.h
    }

    pub fn is_star(&self) -> bool {
        self.star
    }

    /// `Ĥ^N_h`, shared by both series.
    pub fn hbar(&self) -> T {
        self.hbar
    }

    pub fn value(&self, x: T) -> T {
        self.weights.iter().enumerate().map(|(j, w)| *w * self.series.v(j, x)).sum()
    }

    /// Values on the grid of size `m`.
    pub fn sample(&self, m: usize) -> Vec<T> {
        let mut out = vec![T::zero(); m];
        for (j, w) in self.weights.iter().enumerate() {
            for (o, v) in out.iter_mut().zip(self.series.sample_v(j, m)) {
                *o = *o + *w * v;
            }
        }
        out
    }

    /// `(v̂', v̂'')` at `x`.
    pub fn derivatives(&self, x: T) -> (T, T) {
        let jets = self.series.derivative_jets(x);
        jets.iter().zip(&self.weights).fold((T::zero(), T::zero()), |(d1, d2), (j, w)| {
            (d1 + *w * j.value(), d2 + *w * j.derivative_value(1))
        })
    }

    pub fn residual_at(&self, x: T) -> T {
        let (d1, d2) = self.derivatives(x);
        let half = T::lit(0.5);
        let s = if self.star { -T::one() } else { T::one() };
        let p = self.series.level.p() + d1;
        -s * half * self.h * d2 + half * p * p + self.series.level.potential().value(x) - self.hbar
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classical::hbar_of_p;
    use crate::potential::Potential;

    fn pendulum() -> ClassicalLevel<f64> {
        hbar_of_p(&Potential::pendulum(1.0), 1.6, 1e-13).unwrap()
    }

    #[test]
    fn first_correction_vanishes() {
        let s = build_expansion(&pendulum(), 3).unwrap();
        assert!(s.hbar_coefficient(1).abs() < 1e-11);
        assert!(s.hbar_coefficient(3).abs() < 1e-10);
        assert!(s.hbar_coefficient(2) != 0.0);
    }

    #[test]
    fn zero_potential_is_trivial() {
        let l = hbar_of_p(&Potential::Zero, 1.3, 1e-13).unwrap();
        let s = build_expansion(&l, 4).unwrap();
        for k in 1..=4 {
            assert_eq!(s.hbar_coefficient(k), 0.0);
        }
        assert!((s.v(1, 0.2) - 0.5 * 1.3f64.ln()).abs() < 1e-15);
        assert!(s.v(3, 0.1).abs() < 1e-15);
        assert!(s.residual(0.1, 64, false) < 1e-12);
    }

    #[test]
    fn v1_at_origin() {
        let l = pendulum();
        let s = build_expansion(&l, 2).unwrap();
        let want = 0.5 * (2.0 * l.hbar()).sqrt().ln();
        assert!((s.v(1, 0.0) - want).abs() < 1e-14);
    }

    #[test]
    fn residual_order_zero_is_classical() {
        let s = build_expansion(&pendulum(), 0).unwrap();
        for h in [0.1, 0.01] {
            // -(h/2)φ'' survives at order zero.
            let r = s.residual(h, 128, false);
            let phi2 = (0..128)
                .map(|i| s.level().p_plus_d1(i as f64 / 128.0 - 0.5).abs())
                .fold(0.0, f64::max);
            assert!((r - 0.5 * h * phi2).abs() < 1e-9);
        }
    }

    #[test]
    fn too_high_order_rejected() {
        assert!(build_expansion(&pendulum(), MAX_ORDER + 1).is_err());
    }
}
