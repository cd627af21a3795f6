//! Viscous cell problems at finite `h`:
//!
//! ```text
//! (b1)  -(h/2)v''  + ½(P + v')²  + V = H̄_h
//! (b2)   (h/2)v*'' + ½(P + v*')² + V = H̄_h
//! ```
//!
//! solved by damped Newton on `(v, H̄)` with a mean-zero gauge, started
//! from the second-order expansion. The pair is then normalized so that
//! `∫ e^{(v* - v)/h} = 1`, which defines Evans' state
//! `ψ_h = a_h e^{i u_h/h}` with `a_h = e^{(v* - v)/(2h)}` and
//! `u_h = Px + (v* + v)/2`.
//!
//! The Cole–Hopf transform gives an independent linear eigenvalue route to
//! `H̄_h`; it is exposed as a cross-check because `e^{-v/h}` leaves the
//! floating-point range once `osc(v)/h` grows.

mod cole_hopf;
mod discretization;
mod metrics;
mod newton;
mod sigma;

pub use cole_hopf::ColeHopf;
pub use discretization::Discretization;
pub use metrics::{expansion_error, ExpansionError};
pub use newton::Branch;
pub use sigma::{sigma_invariant, sigma_invariant_with, SigmaDensity};

use crate::classical::{hbar_of_p, ClassicalLevel};
use crate::error::{Error, Result};
use crate::expansion::build_expansion;
use crate::numerics::{brent, quad_periodic, PeriodicGrid, TrigSeries};
use crate::potential::Potential;
use crate::scalar::Real;

use discretization::Operators;
use newton::CellProblem;

/// Largest supported `h`.
pub const H_MAX: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellOptions<T> {
    /// Newton stops at `‖F‖∞ ≤ max(tol, rounding floor)`.
    pub tol: T,
    pub max_iter: usize,
    pub discretization: Discretization,
    /// Grid rule `M ≥ grid_factor / h`.
    pub grid_factor: f64,
    /// March down from larger `h` when the expansion guess fails.
    pub continuation: bool,
}

impl<T: Real> Default for CellOptions<T> {
    fn default() -> Self {
        Self {
            tol: T::tol(1e-11),
            max_iter: 50,
            discretization: Discretization::Spectral,
            grid_factor: 8.0,
            continuation: true,
        }
    }
}

/// Normalized solution pair of (b1)/(b2) on a grid.
#[derive(Debug, Clone)]
pub struct CellSolution<T: Real> {
    pub potential: Potential<T>,
    pub p: T,
    pub h: T,
    pub grid: PeriodicGrid,
    /// `v_h` on the grid, mean zero.
    pub v: Vec<T>,
    /// `v*_h` on the grid, shifted by the normalization.
    pub v_star: Vec<T>,
    /// `H̄_h` from (b1).
    pub hbar: T,
    /// `H̄_h` from (b2); equals `hbar` up to the solver tolerance.
    pub hbar_star: T,
    /// Canonical normalization point in `[-1/2, 0]`.
    pub x_h: T,
    /// Every zero of `v* - v` in `[-1/2, 1/2)`.
    pub zeros: Vec<T>,
    pub residual_b1: T,
    pub residual_b2: T,
    pub iterations: (usize, usize),
    /// Shift applied to `v*` by [`normalize_pair`].
    pub shift: T,
}

fn check_inputs<T: Real>(p: T, h: T, grid: PeriodicGrid, opts: &CellOptions<T>) -> Result<()> {
    if !(h > T::zero()) || h > T::lit(H_MAX) {
        return Err(Error::InvalidParameter(format!("h = {h} outside (0, {H_MAX}]")));
    }
    let need = opts.grid_factor / h.to_f64_lossy();
    if (grid.size() as f64) < need {
        return Err(Error::InvalidParameter(format!(
            "grid {} too coarse for h = {h}: need M >= {need:.0}",
            grid.size()
        )));
    }
    if !p.is_finite() {
        return Err(Error::NonFinite("P"));
    }
    Ok(())
}

fn potential_on_grid<T: Real>(v: &Potential<T>, grid: PeriodicGrid) -> Vec<T> {
    grid.sample(|x| v.value(x))
}

/// Raw (unnormalized, mean-zero) solution of one branch.
pub fn solve_branch<T: Real>(
    level: &ClassicalLevel<T>,
    h: T,
    grid: PeriodicGrid,
    branch: Branch,
    opts: &CellOptions<T>,
) -> Result<(Vec<T>, T, usize, T)> {
    let ops = Operators::new(opts.discretization, grid.size());
    solve_with(level, h, grid, branch, opts, &ops)
}

fn solve_with<T: Real>(
    level: &ClassicalLevel<T>,
    h: T,
    grid: PeriodicGrid,
    branch: Branch,
    opts: &CellOptions<T>,
    ops: &Operators<T>,
) -> Result<(Vec<T>, T, usize, T)> {
    let pot = potential_on_grid(level.potential(), grid);
    let problem = CellProblem { ops, potential: &pot, p: level.p(), h, branch };
    let series = build_expansion(level, 2)?;
    let guess = |h: T| {
        let a = series.assemble(h, branch == Branch::Backward);
        let mut v = a.sample(grid.size());
        let mean = quad_periodic(&v).unwrap_or(T::zero());
        v.iter_mut().for_each(|x| *x = *x - mean);
        (v, a.hbar())
    };
    let (v0, h0) = guess(h);
    match problem.solve(&v0, h0, opts.tol, opts.max_iter) {
        Ok(o) => return Ok((o.v, o.hbar, o.iterations, o.residual)),
        Err(e) if !opts.continuation => return Err(e),
        Err(e) => log::info!("expansion guess failed at h = {h} ({e}); continuing from larger h"),
    }
    // Geometric continuation from h_start down to h.
    let mut hs = vec![h];
    while *hs.last().unwrap() * T::lit(2.0) <= T::lit(H_MAX) && hs.len() < 12 {
        let next = *hs.last().unwrap() * T::lit(2.0);
        hs.push(next);
    }
    hs.reverse();
    let (mut v, mut hb) = guess(hs[0]);
    let mut total = 0;
    let mut last = None;
    for &hk in &hs {
        let pk = CellProblem { ops, potential: &pot, p: level.p(), h: hk, branch };
        let o = pk.solve(&v, hb, opts.tol, opts.max_iter)?;
        total += o.iterations;
        v = o.v;
        hb = o.hbar;
        last = Some(o.residual);
    }
    Ok((v, hb, total, last.unwrap_or(T::nan())))
}

/// Solves (b1) and (b2), normalizes the pair and locates `x_h`.
pub fn solve_cell<T: Real>(
    potential: &Potential<T>,
    p: T,
    h: T,
    grid: PeriodicGrid,
    opts: &CellOptions<T>,
) -> Result<CellSolution<T>> {
    let level = hbar_of_p(potential, p, T::tol(1e-13))?;
    solve_cell_at_level(&level, h, grid, opts)
}

/// [`solve_cell`] for an already computed classical level.
pub fn solve_cell_at_level<T: Real>(
    level: &ClassicalLevel<T>,
    h: T,
    grid: PeriodicGrid,
    opts: &CellOptions<T>,
) -> Result<CellSolution<T>> {
    check_inputs(level.p(), h, grid, opts)?;
    let ops = Operators::new(opts.discretization, grid.size());
    let (v, hbar, it1, r1) = solve_with(level, h, grid, Branch::Forward, opts, &ops)?;
    let (v_star, hbar_star, it2, r2) = solve_with(level, h, grid, Branch::Backward, opts, &ops)?;
    let raw = CellSolution {
        potential: *level.potential(),
        p: level.p(),
        h,
        grid,
        v,
        v_star,
        hbar,
        hbar_star,
        x_h: -T::lit(0.5),
        zeros: Vec::new(),
        residual_b1: r1,
        residual_b2: r2,
        iterations: (it1, it2),
        shift: T::zero(),
    };
    let mut sol = normalize_pair(raw);
    let (x_h, zeros) = find_x_h(&sol)?;
    sol.x_h = x_h;
    sol.zeros = zeros;
    Ok(sol)
}

/// Cole–Hopf value of `H̄_h` for one branch on the given grid.
pub fn cole_hopf_hbar<T: Real>(
    potential: &Potential<T>,
    p: T,
    h: T,
    grid: PeriodicGrid,
    branch: Branch,
    discretization: Discretization,
) -> Result<ColeHopf<T>> {
    let ops = Operators::new(discretization, grid.size());
    cole_hopf::cole_hopf(&ops, potential, p, h, branch)
}

/// `h · ln ∫ e^{(v* - v)/h}` evaluated in log-sum-exp form.
fn log_mass<T: Real>(v: &[T], v_star: &[T], h: T) -> T {
    let d: Vec<T> = v_star.iter().zip(v).map(|(a, b)| (*a - *b) / h).collect();
    let max = d.iter().copied().fold(T::neg_infinity(), T::max);
    let s: T = d.iter().map(|x| (*x - max).exp()).sum();
    h * (max + (s / T::from_usize_lossy(d.len())).ln())
}

/// Shifts `v*` so that `∫ e^{(v* - v)/h} = 1`. Idempotent.
pub fn normalize_pair<T: Real>(mut sol: CellSolution<T>) -> CellSolution<T> {
    let shift = log_mass(&sol.v, &sol.v_star, sol.h);
    sol.v_star.iter_mut().for_each(|x| *x = *x - shift);
    sol.shift = sol.shift + shift;
    sol
}

/// Zeros of `v* - v`; the canonical one is the zero in `[-1/2, 0]` closest
/// to `-1/2`. Returns `-1/2` when `v* ≡ v`.
pub fn find_x_h<T: Real>(sol: &CellSolution<T>) -> Result<(T, Vec<T>)> {
    let d: Vec<T> = sol.v_star.iter().zip(&sol.v).map(|(a, b)| *a - *b).collect();
    let half = T::lit(0.5);
    let scale = sol.v.iter().chain(&sol.v_star).fold(T::zero(), |m, x| m.max(x.abs()));
    let dmax = d.iter().fold(T::zero(), |m, x| m.max(x.abs()));
    if dmax <= T::tol(1e-13) * (T::one() + scale) {
        return Ok((-half, vec![-half]));
    }
    let series = TrigSeries::from_samples(&d)?;
    let m = d.len();
    let node = |j: usize| sol.grid.node::<T>(j);
    let mut zeros = Vec::new();
    for j in 0..m {
        let k = (j + 1) % m;
        let (a, b) = (node(j), if k == 0 { half } else { node(k) });
        if d[j] == T::zero() {
            zeros.push(a);
        } else if d[j] * d[k] < T::zero() {
            let r = brent(|x| series.eval(x), a, b, T::tol(1e-15))?;
            zeros.push(PeriodicGrid::wrap(r.x));
        }
    }
    zeros.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    if zeros.is_empty() {
        return Err(Error::NoSignChange { a: -0.5, b: 0.5 });
    }
    let canonical = zeros
        .iter()
        .copied()
        .find(|z| *z <= T::zero())
        .unwrap_or(zeros[0]);
    Ok((canonical, zeros))
}

impl<T: Real> CellSolution<T> {
    /// `∫ e^{(v* - v)/h}` on the grid.
    pub fn mass(&self) -> T {
        log_mass(&self.v, &self.v_star, self.h).exp()
    }

    /// Residuals of (b1), (b2) after trigonometric interpolation to the
    /// grid of size `m` (typically `2M`).
    pub fn interpolated_residuals(&self, m: usize) -> Result<(T, T)> {
        let half = T::lit(0.5);
        let mut out = [T::zero(); 2];
        for (k, (v, hb, s)) in [(&self.v, self.hbar, T::one()), (&self.v_star, self.hbar_star, -T::one())]
            .into_iter()
            .enumerate()
        {
            let series = TrigSeries::from_samples(v)?;
            let d1 = series.derivative_exact();
            let d2 = d1.derivative_exact();
            let (a, b) = (d1.sample(m), d2.sample(m));
            let mut r = T::zero();
            for j in 0..m {
                let x = T::from_usize_lossy(j) / T::from_usize_lossy(m) - half;
                let g = self.p + a[j];
                let f = -s * half * self.h * b[j] + half * g * g + self.potential.value(x) - hb;
                r = r.max(f.abs());
            }
            out[k] = r;
        }
        Ok((out[0], out[1]))
    }

    /// `max_x |v*(x) + v(-x) - c|` for the best constant `c`, i.e. the
    /// failure of the reflection symmetry `v*(x) = -v(-x) + const`.
    pub fn reflection_defect(&self) -> T {
        let m = self.v.len();
        let e: Vec<T> = (0..m).map(|j| self.v_star[j] + self.v[(m - j) % m]).collect();
        let hi = e.iter().copied().fold(T::neg_infinity(), T::max);
        let lo = e.iter().copied().fold(T::infinity(), T::min);
        (hi - lo) * T::lit(0.5)
    }

    pub fn evans_state(&self) -> Result<EvansState<T>> {
        evans_state(self)
    }
}

/// Evans' state `ψ_h = a_h e^{i(Px + w_h)/h}` through its periodic parts,
/// sampled on the refined grid of size `2M`.
#[derive(Debug, Clone)]
pub struct EvansState<T: Real> {
    pub h: T,
    pub p: T,
    /// The grid of the cell solution; `a` and `w` live on its refinement.
    pub grid: PeriodicGrid,
    /// `a_h = e^{(v* - v)/(2h)}` on the `2M` grid.
    pub a: Vec<T>,
    /// `w_h = (v* + v)/2` on the `2M` grid.
    pub w: Vec<T>,
}

/// Builds the Evans state, refining `v`, `v*` to `2M` by trigonometric
/// interpolation.
pub fn evans_state<T: Real>(sol: &CellSolution<T>) -> Result<EvansState<T>> {
    let fine = sol.grid.refined().size();
    let v = TrigSeries::from_samples(&sol.v)?.sample(fine);
    let vs = TrigSeries::from_samples(&sol.v_star)?.sample(fine);
    let two = T::lit(2.0);
    let a = vs.iter().zip(&v).map(|(s, v)| ((*s - *v) / (two * sol.h)).exp()).collect();
    let w = vs.iter().zip(&v).map(|(s, v)| (*s + *v) / two).collect();
    Ok(EvansState { h: sol.h, p: sol.p, grid: sol.grid, a, w })
}

impl<T: Real> EvansState<T> {
    /// `∫ a²` on the refined grid.
    pub fn norm_squared(&self) -> T {
        self.a.iter().map(|x| *x * *x).sum::<T>() / T::from_usize_lossy(self.a.len())
    }

    /// `a_h²` on the coarse grid.
    pub fn density(&self) -> Vec<T> {
        self.a.iter().step_by(2).map(|x| *x * *x).collect()
    }

    /// Coarse-grid node `j` of the refined arrays.
    pub fn coarse_index(j: usize) -> usize {
        2 * j
    }
}
