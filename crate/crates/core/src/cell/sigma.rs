//! Invariant density of the linearized forward problem.
//!
//! With `g = P + v̂'` and `G(x) = ∫₀^x g = Px + v̂(x) - v̂(0)`, the periodic
//! probability solution of `D σ' + g σ = c` is
//!
//! ```text
//! σ(x) = (c/D) [E(x) + E(1) e^{-G(x)/D} / (1 - e^{-P/D})],
//! E(x) = ∫₀^x e^{(G(s) - G(x))/D} ds,
//! ```
//!
//! equivalently `σ = (c ∫₀^x e^{G/D} + C) / (D e^{G(x)/D})` with
//! `C = c E(1)/(1 - e^{-P/D})`. `E` is accumulated cell by cell so every
//! exponent is non-positive while `g > 0`.

use crate::error::{Error, Result};
use crate::expansion::ExpansionSeries;
use crate::numerics::{gauss_legendre, quad_periodic, PeriodicGrid};
use crate::scalar::Real;

#[derive(Debug, Clone)]
pub struct SigmaDensity<T: Real> {
    pub h: T,
    /// Diffusion constant `D` of the stationary equation.
    pub diffusion: T,
    pub grid: PeriodicGrid,
    /// `σ` at the torus nodes `-1/2 + j/M`.
    pub values: Vec<T>,
    /// Flux constant `c`.
    pub c: T,
    /// Integration constant `C`.
    pub big_c: T,
    pub min: T,
    pub max: T,
}

/// Density for the truncated expansion at `h`, with diffusion `D = h`.
pub fn sigma_invariant<T: Real>(series: &ExpansionSeries<T>, h: T) -> Result<SigmaDensity<T>> {
    sigma_invariant_with(series, h, h, None)
}

/// As [`sigma_invariant`] with an explicit diffusion constant and grid.
/// The default grid resolves the boundary layer scale `D / max g`.
pub fn sigma_invariant_with<T: Real>(
    series: &ExpansionSeries<T>,
    h: T,
    diffusion: T,
    grid: Option<PeriodicGrid>,
) -> Result<SigmaDensity<T>> {
    if !(h > T::zero()) || !(diffusion > T::zero()) {
        return Err(Error::InvalidParameter("h and D must be positive".into()));
    }
    let level = series.level();
    let p = level.p();
    let assembled = series.assemble(h, false);
    let grid = match grid {
        Some(g) => g,
        None => {
            let scale = (level.p_max() + p.abs()).to_f64_lossy() / diffusion.to_f64_lossy();
            PeriodicGrid::for_resolution(1.0 / scale.max(1.0), 4.0, 256)?
        }
    };
    let m = grid.size();
    let dt = grid.spacing::<T>();
    let v0 = assembled.value(T::zero());
    let big_g = |t: T| p * t + assembled.value(t) - v0;
    let (nodes, weights) = gauss_legendre::<T>(12);
    let half = T::lit(0.5);

    // E and G at t_k = k/M, k = 0..=M.
    let mut e = vec![T::zero(); m + 1];
    let mut g = vec![T::zero(); m + 1];
    for k in 0..m {
        let a = T::from_usize_lossy(k) * dt;
        let b = a + dt;
        let gb = if k + 1 == m { p } else { big_g(b) };
        let mut cell = T::zero();
        for (s, w) in nodes.iter().zip(&weights) {
            let x = a + half * dt * (*s + T::one());
            cell = cell + *w * ((big_g(x) - gb) / diffusion).exp();
        }
        cell = cell * half * dt;
        e[k + 1] = ((g[k] - gb) / diffusion).exp() * e[k] + cell;
        g[k + 1] = gb;
    }
    let denom = -(-p / diffusion).exp_m1();
    if !(denom > T::zero()) {
        return Err(Error::InvalidParameter("density requires P > 0".into()));
    }
    let tail = e[m] / denom;
    let shape: Vec<T> = (0..m)
        .map(|j| {
            let k = (j + m / 2) % m;
            e[k] + tail * (-g[k] / diffusion).exp()
        })
        .collect();
    if shape.iter().any(|s| !s.is_finite()) {
        return Err(Error::NonFinite("invariant density"));
    }
    let mass = quad_periodic(&shape)? / diffusion;
    let c = T::one() / mass;
    let values: Vec<T> = shape.iter().map(|s| c * *s / diffusion).collect();
    let min = values.iter().copied().fold(T::infinity(), T::min);
    let max = values.iter().copied().fold(T::neg_infinity(), T::max);
    if !(min > T::zero()) {
        return Err(Error::NotPositive { count: values.iter().filter(|v| !(**v > T::zero())).count() });
    }
    Ok(SigmaDensity { h, diffusion, grid, values, c, big_c: c * tail, min, max })
}

impl<T: Real> SigmaDensity<T> {
    /// `sup |σ - Q/p⁺|` against the classical limit density.
    pub fn distance_to_limit(&self, series: &ExpansionSeries<T>) -> T {
        let level = series.level();
        self.grid
            .nodes::<T>()
            .iter()
            .zip(&self.values)
            .map(|(x, s)| (*s - level.mather_density(*x)).abs())
            .fold(T::zero(), T::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classical::hbar_of_p;
    use crate::expansion::build_expansion;
    use crate::potential::Potential;

    #[test]
    fn flat_potential_gives_uniform_density() {
        let level = hbar_of_p(&Potential::<f64>::Zero, 1.3, 1e-14).unwrap();
        let s = build_expansion(&level, 2).unwrap();
        let d = sigma_invariant(&s, 0.1).unwrap();
        assert!(d.values.iter().all(|x| (x - 1.0).abs() < 1e-12));
        assert!((d.c - 1.3).abs() < 1e-12);
        assert!((d.big_c - 0.1).abs() < 1e-12);
    }

    #[test]
    fn pendulum_density_tends_to_limit() {
        let level = hbar_of_p(&Potential::<f64>::pendulum(1.0), 1.6, 1e-14).unwrap();
        let s = build_expansion(&level, 2).unwrap();
        let a = sigma_invariant(&s, 0.05).unwrap().distance_to_limit(&s);
        let b = sigma_invariant(&s, 0.0125).unwrap().distance_to_limit(&s);
        assert!(b < a && b < 0.1, "{a} {b}");
    }
}
