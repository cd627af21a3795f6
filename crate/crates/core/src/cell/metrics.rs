use crate::error::{Error, Result};
use crate::expansion::ExpansionSeries;
use crate::numerics::{quad_periodic, TrigSeries};
use crate::scalar::Real;

use super::CellSolution;

/// Gauge-invariant distance between a cell solution and the truncated
/// expansion at the same `h`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpansionError<T> {
    /// `sup_{x,y} |e(x) - e(y)|` with `e = v_h - v̂`.
    pub c0_seminorm: T,
    /// `‖v_h' - v̂'‖_{L²}`.
    pub l2_derivative: T,
    /// `|H̄_h - Ĥ_h|`.
    pub hbar: T,
    pub c0_seminorm_star: T,
    pub l2_derivative_star: T,
}

fn pair<T: Real>(v: &[T], v_hat: &[T]) -> Result<(T, T)> {
    let e: Vec<T> = v.iter().zip(v_hat).map(|(a, b)| *a - *b).collect();
    let hi = e.iter().copied().fold(T::neg_infinity(), T::max);
    let lo = e.iter().copied().fold(T::infinity(), T::min);
    let de = TrigSeries::from_samples(&e)?.derivative().sample(e.len());
    let l2 = quad_periodic(&de.iter().map(|x| *x * *x).collect::<Vec<_>>())?.sqrt();
    Ok((hi - lo, l2))
}

pub fn expansion_error<T: Real>(
    solution: &CellSolution<T>,
    series: &ExpansionSeries<T>,
    h: T,
) -> Result<ExpansionError<T>> {
    if (solution.h - h).abs() > T::tol(1e-14) * h {
        return Err(Error::InvalidParameter(format!("solution at h = {} compared at h = {h}", solution.h)));
    }
    if series.level().p() != solution.p {
        return Err(Error::InvalidParameter("series and solution at different P".into()));
    }
    let m = solution.grid.size();
    let fwd = series.assemble(h, false);
    let (c0, l2) = pair(&solution.v, &fwd.sample(m))?;
    let (c0s, l2s) = pair(&solution.v_star, &series.assemble(h, true).sample(m))?;
    Ok(ExpansionError {
        c0_seminorm: c0,
        l2_derivative: l2,
        hbar: (solution.hbar - fwd.hbar()).abs(),
        c0_seminorm_star: c0s,
        l2_derivative_star: l2s,
    })
}
