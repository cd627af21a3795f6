use rayon::prelude::*;

use crate::cell::{solve_cell_at_level, CellOptions};
use crate::classical::{hbar_of_p, mather_limit_functional, mather_limit_functional_unchecked, TestSymbol};
use crate::error::{Error, Result};
use crate::numerics::{fit_order, OrderFit, PeriodicGrid};
use crate::potential::Potential;
use crate::scalar::Real;

use super::{integrate_symbol, wigner_transform, WignerOptions};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow<T> {
    pub h: T,
    pub grid_size: usize,
    pub value: T,
    pub limit: T,
    pub error: T,
    pub tail: T,
    pub max_imag: T,
}

#[derive(Debug, Clone)]
pub struct ConvergenceReport<T> {
    pub limit: T,
    /// The symbol's momentum support meets `p_min` or `p_max`; the limit
    /// is then the plain branch integral and carries no rate guarantee.
    pub straddles: bool,
    pub rows: Vec<SweepRow<T>>,
    /// Least-squares slope of `log|I_f(h) - limit|` against `log h`.
    pub fit: Option<OrderFit>,
}

#[derive(Debug, Clone, Copy)]
pub struct SweepOptions<T> {
    pub cell: CellOptions<T>,
    pub wigner: WignerOptions<T>,
    /// Grids are the smallest power of two with `M ≥ cell.grid_factor / h`
    /// and `M ≥ min_grid`.
    pub min_grid: usize,
}

impl<T: Real> Default for SweepOptions<T> {
    fn default() -> Self {
        Self { cell: CellOptions::default(), wigner: WignerOptions::default(), min_grid: 512 }
    }
}

/// `I_f(h)` against the Mather limit over a decreasing list of `h`.
pub fn convergence_sweep<T: Real>(
    potential: &Potential<T>,
    p: T,
    f: &TestSymbol<T>,
    hs: &[T],
    opts: &SweepOptions<T>,
) -> Result<ConvergenceReport<T>> {
    if hs.len() < 3 {
        return Err(Error::InvalidParameter("a sweep needs at least three values of h".into()));
    }
    if hs.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(Error::InvalidParameter("h values must be strictly decreasing".into()));
    }
    let level = hbar_of_p(potential, p, T::tol(1e-13))?;
    let (limit, straddles) = match mather_limit_functional(&level, f) {
        Ok(v) => (v, false),
        Err(Error::SupportCrossesLevelBounds { .. }) => (mather_limit_functional_unchecked(&level, f)?, true),
        Err(e) => return Err(e),
    };
    let width = level.p_max() - level.p_min();
    let rows: Vec<SweepRow<T>> = hs
        .par_iter()
        .map(|&h| {
            let grid = PeriodicGrid::for_resolution(h.to_f64_lossy(), opts.cell.grid_factor, opts.min_grid)?;
            let sol = solve_cell_at_level(&level, h, grid, &opts.cell)?;
            let table = wigner_transform(&sol.evans_state()?, width, &opts.wigner)?;
            let value = integrate_symbol(&table, f)?.value;
            Ok(SweepRow {
                h,
                grid_size: grid.size(),
                value,
                limit,
                error: (value - limit).abs(),
                tail: table.tail,
                max_imag: table.max_imag,
            })
        })
        .collect::<Result<_>>()?;
    let xs: Vec<f64> = rows.iter().map(|r| r.h.to_f64_lossy()).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.error.to_f64_lossy()).collect();
    Ok(ConvergenceReport { limit, straddles, fit: fit_order(&xs, &ys), rows })
}
