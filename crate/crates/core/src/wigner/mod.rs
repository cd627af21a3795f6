//! Torus Wigner distribution of Evans' state.
//!
//! `ψ_h = a e^{i(Px + w)/h}` is quasi-periodic, so its Wigner distribution
//! lives on `𝕋 × (hℤ + P/2π)`. At `p_m = hm + P/2π` the plane-wave factors
//! cancel and
//!
//! ```text
//! W(x, p_m) = ∫_{-1/2}^{1/2} a(x + y/2) a(x - y/2) e^{i(w(x + y/2) - w(x - y/2))/h} e^{-2πimy} dy,
//! ```
//!
//! the `m`-th Fourier coefficient in `y` of `c_x(y)`. With `y_k = -1/2 + k/M`
//! both half-points `x ± y_k/2` fall on the `2M` refinement, so each row is
//! one length-`M` FFT. `c_x` is not periodic in `y`; `c_x(1/2)` is the
//! conjugate of `c_x(-1/2)`, and the `k = 0` sample is their average, which
//! makes every `W(x, p_m)` real.

mod sweep;

pub use sweep::{convergence_sweep, ConvergenceReport, SweepOptions, SweepRow};

use num_complex::Complex;
use rayon::prelude::*;

use crate::cell::EvansState;
use crate::classical::TestSymbol;
use crate::error::{Error, Result};
use crate::numerics::{FourierPlan, PeriodicGrid};
use crate::scalar::Real;

/// Lattice momenta `p_m = hm + P/2π` for `m ∈ [m_lo, m_hi]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentumLattice<T> {
    pub h: T,
    pub p: T,
    pub m_lo: i64,
    pub m_hi: i64,
}

impl<T: Real> MomentumLattice<T> {
    pub fn new(h: T, p: T, m_lo: i64, m_hi: i64) -> Result<Self> {
        if m_lo > 0 || m_hi < 0 {
            return Err(Error::InvalidParameter(format!("lattice window [{m_lo}, {m_hi}] must contain 0")));
        }
        Ok(Self { h, p, m_lo, m_hi })
    }

    /// Window `|2πp_m - P| ≤ width` (at least `m = -1..=1`).
    pub fn around_level(h: T, p: T, width: T) -> Self {
        let n = (width / (T::two_pi() * h)).ceil().to_f64_lossy().max(1.0) as i64;
        Self { h, p, m_lo: -n, m_hi: n }
    }

    pub fn len(&self) -> usize {
        (self.m_hi - self.m_lo + 1) as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, m: i64) -> bool {
        (self.m_lo..=self.m_hi).contains(&m)
    }

    /// `p_m = hm + P/2π`.
    pub fn point(&self, m: i64) -> T {
        self.h * T::lit(m as f64) + self.p / T::two_pi()
    }

    /// Phase-space momentum `2πp_m = 2πhm + P`.
    pub fn momentum(&self, m: i64) -> T {
        T::two_pi() * self.h * T::lit(m as f64) + self.p
    }

    pub fn indices(&self) -> std::ops::RangeInclusive<i64> {
        self.m_lo..=self.m_hi
    }

    /// Phase-space span `[2πp_{m_lo}, 2πp_{m_hi}]`.
    pub fn span(&self) -> (T, T) {
        (self.momentum(self.m_lo), self.momentum(self.m_hi))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WignerOptions<T> {
    /// Initial window half-width in phase-space momentum, as a multiple of
    /// `p_max - p_min`.
    pub window_factor: T,
    /// Largest tolerated mass outside the window.
    pub tail_tol: T,
}

impl<T: Real> Default for WignerOptions<T> {
    fn default() -> Self {
        Self { window_factor: T::lit(3.0), tail_tol: T::lit(1e-6) }
    }
}

/// Full table `W(x_j, p_m)` for `m ∈ [-M/2, M/2)` together with the
/// window used for symbol integrals.
#[derive(Debug, Clone)]
pub struct WignerTable<T: Real> {
    pub grid: PeriodicGrid,
    pub lattice: MomentumLattice<T>,
    /// Row-major `M × M`, row `j` holds `m = -M/2..M/2` in increasing order.
    values: Vec<Complex<T>>,
    /// `Σ_m W(x_j, p_m)` over all `m`.
    pub x_marginal: Vec<T>,
    /// `(1/M) Σ_j W(x_j, p_m)` over all `m`, increasing `m`.
    pub p_marginal: Vec<T>,
    /// Total mass of the full table.
    pub mass: T,
    /// `Σ |p-marginal|` outside the window.
    pub tail: T,
    pub max_imag: T,
}

impl<T: Real> WignerTable<T> {
    pub fn size(&self) -> usize {
        self.grid.size()
    }

    /// Lowest `m` stored.
    pub fn m_min(&self) -> i64 {
        -(self.size() as i64) / 2
    }

    pub fn m_max(&self) -> i64 {
        self.size() as i64 / 2 - 1
    }

    pub fn value(&self, j: usize, m: i64) -> Complex<T> {
        let n = self.size();
        let col = (m - self.m_min()) as usize;
        assert!(col < n, "m = {m} outside table");
        self.values[j * n + col]
    }

    pub fn row(&self, j: usize) -> &[Complex<T>] {
        let n = self.size();
        &self.values[j * n..(j + 1) * n]
    }

    /// `p`-marginal at lattice index `m`.
    pub fn p_marginal_at(&self, m: i64) -> T {
        self.p_marginal[(m - self.m_min()) as usize]
    }

    /// Mass inside the window.
    pub fn window_mass(&self) -> T {
        self.lattice.indices().map(|m| self.p_marginal_at(m)).sum()
    }
}

/// Wigner table of `state` with a window widened (doubling) until the
/// discarded mass is below `tail_tol`.
pub fn wigner_transform<T: Real>(
    state: &EvansState<T>,
    level_width: T,
    opts: &WignerOptions<T>,
) -> Result<WignerTable<T>> {
    let m = state.grid.size();
    let fine = state.a.len();
    if fine != 2 * m || state.w.len() != fine {
        return Err(Error::SizeMismatch { expected: 2 * m, got: fine });
    }
    let plan = FourierPlan::<T>::new(m);
    let inv_h = T::one() / state.h;
    let rows: Vec<Vec<Complex<T>>> = (0..m)
        .into_par_iter()
        .map(|j| {
            let mut buf: Vec<Complex<T>> = (0..m)
                .map(|k| {
                    let plus = (2 * j + k + 2 * m - m / 2) % fine;
                    let minus = (2 * j + m / 2 + 2 * m - k) % fine;
                    let amp = state.a[plus] * state.a[minus];
                    Complex::from_polar(amp, (state.w[plus] - state.w[minus]) * inv_h)
                })
                .collect();
            // c(1/2) = conj(c(-1/2)); trapezoid endpoint average.
            buf[0] = Complex::new(buf[0].re, T::zero());
            plan.coefficients_in_place(&mut buf);
            let mut out = Vec::with_capacity(m);
            out.extend_from_slice(&buf[m / 2..]);
            out.extend_from_slice(&buf[..m / 2]);
            out
        })
        .collect();
    let values: Vec<Complex<T>> = rows.into_iter().flatten().collect();
    let inv_m = T::one() / T::from_usize_lossy(m);
    let x_marginal: Vec<T> = (0..m).map(|j| values[j * m..(j + 1) * m].iter().map(|c| c.re).sum()).collect();
    let p_marginal: Vec<T> = (0..m).map(|c| (0..m).map(|j| values[j * m + c].re).sum::<T>() * inv_m).collect();
    let mass = x_marginal.iter().copied().sum::<T>() * inv_m;
    let max_imag = values.iter().fold(T::zero(), |a, c| a.max(c.im.abs()));

    let mut lattice = MomentumLattice::around_level(state.h, state.p, opts.window_factor * level_width);
    let cap = m as i64 / 2 - 1;
    loop {
        lattice.m_lo = lattice.m_lo.max(-cap - 1);
        lattice.m_hi = lattice.m_hi.min(cap);
        let tail = p_marginal
            .iter()
            .enumerate()
            .filter(|(c, _)| !lattice.contains(*c as i64 - m as i64 / 2))
            .map(|(_, v)| v.abs())
            .sum::<T>();
        if tail <= opts.tail_tol {
            return Ok(WignerTable { grid: state.grid, lattice, values, x_marginal, p_marginal, mass, tail, max_imag });
        }
        if lattice.m_hi >= cap && lattice.m_lo < -cap {
            return Err(Error::WindowTooSmall { tail: tail.to_f64_lossy(), tol: opts.tail_tol.to_f64_lossy() });
        }
        lattice.m_lo *= 2;
        lattice.m_hi *= 2;
    }
}

/// `|ψ̂(p_m)|²` for `m ∈ [-M/2, M/2)` by direct quadrature of
/// `∫ a e^{iw/h} e^{-2πimx} dx` on the refined grid.
pub fn momentum_density<T: Real>(state: &EvansState<T>) -> Vec<T> {
    let fine = state.a.len();
    let m = fine / 2;
    let inv_h = T::one() / state.h;
    let mut buf: Vec<Complex<T>> =
        state.a.iter().zip(&state.w).map(|(a, w)| Complex::from_polar(*a, *w * inv_h)).collect();
    FourierPlan::new(fine).coefficients_in_place(&mut buf);
    (0..m)
        .map(|c| {
            let mode = c as i64 - m as i64 / 2;
            buf[mode.rem_euclid(fine as i64) as usize].norm_sqr()
        })
        .collect()
}

/// Value of `Σ_m ∫ f(x, 2πp_m) W(x, p_m) dx` with its discarded imaginary part.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymbolIntegral<T> {
    pub value: T,
    pub imag: T,
}

/// Integrates a symbol against the table. Symbols bounded in `p` must lie
/// inside the window; symbols unbounded in `p` use the whole table.
pub fn integrate_symbol<T: Real>(table: &WignerTable<T>, f: &TestSymbol<T>) -> Result<SymbolIntegral<T>> {
    let zero = SymbolIntegral { value: T::zero(), imag: T::zero() };
    if f.is_zero() {
        return Ok(zero);
    }
    let lattice = table.lattice;
    let range = match f.p_support() {
        Some((lo, hi)) => {
            let (w_lo, w_hi) = lattice.span();
            if lo < w_lo || hi > w_hi {
                return Err(Error::SupportOutsideWindow {
                    lo: lo.to_f64_lossy(),
                    hi: hi.to_f64_lossy(),
                    w_lo: w_lo.to_f64_lossy(),
                    w_hi: w_hi.to_f64_lossy(),
                });
            }
            lattice.indices()
        }
        None => table.m_min()..=table.m_max(),
    };
    let n = table.size();
    let gx: Vec<T> = table.grid.nodes::<T>().iter().map(|x| f.eval_x(*x)).collect();
    let inv_m = T::one() / T::from_usize_lossy(n);
    let mut acc = Complex::new(T::zero(), T::zero());
    for m in range {
        let fp = f.eval_p(lattice.momentum(m));
        if fp == T::zero() {
            continue;
        }
        let col = (m - table.m_min()) as usize;
        let s: Complex<T> = (0..n).map(|j| table.values[j * n + col] * gx[j]).sum();
        acc = acc + s * (fp * inv_m);
    }
    if acc.im.abs() > T::tol(1e-10) {
        log::debug!("symbol integral imaginary residue {:e}", acc.im.to_f64_lossy());
    }
    Ok(SymbolIntegral { value: acc.re, imag: acc.im })
}

/// `∫ f(x) a(x)² dx` on the coarse grid, the x-marginal identity's
/// right-hand side.
pub fn position_average<T: Real>(state: &EvansState<T>, f: impl Fn(T) -> T) -> T {
    let m = state.grid.size();
    let nodes = state.grid.nodes::<T>();
    (0..m).map(|j| f(nodes[j]) * state.a[2 * j] * state.a[2 * j]).sum::<T>() / T::from_usize_lossy(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cell::{solve_cell, CellOptions};
    use crate::classical::Factor;
    use crate::potential::Potential;

    fn table(v: Potential<f64>, p: f64, h: f64, m: usize) -> (EvansState<f64>, WignerTable<f64>) {
        let g = PeriodicGrid::new(m).unwrap();
        let s = solve_cell(&v, p, h, g, &CellOptions::default()).unwrap();
        let e = s.evans_state().unwrap();
        let t = wigner_transform(&e, 0.5, &WignerOptions::default()).unwrap();
        (e, t)
    }

    #[test]
    fn plane_wave_is_a_delta() {
        let (_, t) = table(Potential::Zero, 1.3, 0.1, 128);
        for j in 0..128 {
            for m in t.m_min()..=t.m_max() {
                let want = if m == 0 { 1.0 } else { 0.0 };
                assert!((t.value(j, m).re - want).abs() < 1e-13);
            }
        }
        let f = TestSymbol::momentum_bump(1.3, 0.2);
        assert!((integrate_symbol(&t, &f).unwrap().value - 1.0).abs() < 1e-13);
    }

    #[test]
    fn pendulum_identities() {
        let (e, t) = table(Potential::pendulum(1.0), 1.6, 0.1, 128);
        assert!((t.mass - 1.0).abs() < 1e-12);
        assert!(t.max_imag < 1e-12);
        for (j, xm) in t.x_marginal.iter().enumerate() {
            assert!((xm - e.a[2 * j] * e.a[2 * j]).abs() < 1e-12);
        }
        let direct = momentum_density(&e);
        for (a, b) in t.p_marginal.iter().zip(&direct) {
            assert!((a - b).abs() < 1e-10, "{a} {b}");
        }
        let fx = TestSymbol::new(Factor::Bump { center: 0.1, half_width: 0.3 }, Factor::Constant(1.0));
        let got = integrate_symbol(&t, &fx).unwrap().value;
        let want = position_average(&e, |x| fx.eval_x(x));
        assert!((got - want).abs() < 1e-12);
        let wide = TestSymbol::momentum_bump(1.6, 100.0);
        assert!(matches!(integrate_symbol(&t, &wide), Err(Error::SupportOutsideWindow { .. })));
    }
}
