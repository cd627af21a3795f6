use num_complex::Complex;
use rayon::prelude::*;

use crate::classical::{ClassicalLevel, TestSymbol};
use crate::error::{Error, Result};
use crate::numerics::{fit_order, OrderFit};
use crate::scalar::Real;

use super::stationary::zeta;
use super::{Mollifier, PhaseFamily, XBar};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DirectOptions<T> {
    /// Grid rule `M ≥ grid_factor · max|∇S| / h`.
    pub grid_factor: f64,
    pub min_grid: usize,
    pub max_grid: usize,
    /// Tolerance on the Richardson error estimate, relative to `|I| + h²`.
    pub tol: T,
}

impl<T: Real> Default for DirectOptions<T> {
    fn default() -> Self {
        Self { grid_factor: 16.0, min_grid: 64, max_grid: 1 << 13, tol: T::lit(1e-7) }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DirectIntegral<T> {
    pub value: Complex<T>,
    /// `|I_{2M} - I_M|`.
    pub error: T,
    /// The finer of the two grids.
    pub grid_size: usize,
}

/// `φ` and `p⁺` on the grid `-1/2 + k/N`.
struct HalfPointTables<T> {
    phi: Vec<T>,
    q: Vec<T>,
}

impl<T: Real> HalfPointTables<T> {
    fn new(level: &ClassicalLevel<T>, n: usize) -> Self {
        let phi = level.phi_series().sample(n);
        let nf = T::from_usize_lossy(n);
        let q = (0..n).map(|k| level.p_plus(T::from_usize_lossy(k) / nf - T::lit(0.5))).collect();
        Self { phi, q }
    }
}

/// Gregory end corrections `γ_r` for differences of order `r = 1..=5`.
const GREGORY: [f64; 5] = [1.0 / 12.0, 1.0 / 24.0, 19.0 / 720.0, 3.0 / 160.0, 863.0 / 60480.0];

/// Trapezoid sum of `vals` with Gregory end corrections (unit spacing).
fn gregory<T: Real>(vals: &[Complex<T>]) -> Complex<T> {
    let n = vals.len() - 1;
    let half = T::lit(0.5);
    let mut sum = (vals[0] + vals[n]) * half;
    for v in &vals[1..n] {
        sum = sum + *v;
    }
    let mut fwd: Vec<Complex<T>> = vals[..=GREGORY.len()].to_vec();
    let mut bwd: Vec<Complex<T>> = vals[n - GREGORY.len()..].iter().rev().copied().collect();
    for (r, g) in GREGORY.iter().enumerate() {
        for i in 0..fwd.len() - 1 - r {
            fwd[i] = fwd[i + 1] - fwd[i];
            bwd[i] = bwd[i] - bwd[i + 1];
        }
        // Odd orders: ∇ʳf_n - Δʳf_0; even orders: ∇ʳf_n + Δʳf_0.
        let c = if r % 2 == 0 { bwd[0] - fwd[0] } else { bwd[0] + fwd[0] };
        sum = sum - c * T::lit(*g);
    }
    sum
}

/// Tensor rule on `x_j = -1/2 + j/n` (trapezoid, periodic) and
/// `y_k = -1/2 + k/n`, `k = 0..=n` (trapezoid with Gregory end corrections).
/// `amp(x, y, q₊, q₋)`.
fn tensor_rule<T, A>(family: &PhaseFamily<'_, T>, tables: &HalfPointTables<T>, n: usize, h: T, amp: &A) -> Complex<T>
where
    T: Real,
    A: Fn(T, T, T, T) -> T + Sync,
{
    let big = tables.phi.len();
    let st = big / (2 * n);
    let nf = T::from_usize_lossy(n);
    let slope = family.level.p() - family.s;
    let inv_h = T::one() / h;
    let half = T::lit(0.5);
    let term = |j: usize, k: isize| -> Complex<T> {
        let x = T::from_usize_lossy(j) / nf - half;
        let off = k - n as isize / 2;
        let y = T::lit(off as f64) / nf;
        let base = (2 * j * st) as isize;
        let ip = (base + off * st as isize).rem_euclid(big as isize) as usize;
        let im = (base - off * st as isize).rem_euclid(big as isize) as usize;
        let a = amp(x, y, tables.q[ip], tables.q[im]);
        if a == T::zero() {
            return Complex::new(T::zero(), T::zero());
        }
        let s = slope * y + tables.phi[ip] - tables.phi[im];
        Complex::from_polar(a, s * inv_h)
    };
    let total: Complex<T> = (0..n)
        .into_par_iter()
        .map(|j| {
            let row: Vec<Complex<T>> = (0..=n as isize).map(|k| term(j, k)).collect();
            gregory(&row)
        })
        .sum();
    total / (nf * nf)
}

fn gradient_bound<T: Real>(family: &PhaseFamily<'_, T>) -> T {
    let l = family.level;
    let sy = (l.p_max() - family.s).abs().max((l.p_min() - family.s).abs());
    (l.p_max() - l.p_min()).hypot(sy)
}

fn integrate<T, A>(family: &PhaseFamily<'_, T>, h: T, opts: &DirectOptions<T>, amp: A) -> Result<DirectIntegral<T>>
where
    T: Real,
    A: Fn(T, T, T, T) -> T + Sync,
{
    if !(h > T::zero()) {
        return Err(Error::InvalidParameter(format!("h must be positive, got {h}")));
    }
    let need = opts.grid_factor * gradient_bound(family).to_f64_lossy() / h.to_f64_lossy();
    let mut n = (need.ceil() as usize).max(opts.min_grid).next_power_of_two();
    loop {
        let tables = HalfPointTables::new(family.level, 4 * n);
        let coarse = tensor_rule(family, &tables, n, h, &amp);
        let value = tensor_rule(family, &tables, 2 * n, h, &amp);
        let error = (value - coarse).norm();
        if error <= opts.tol * (value.norm() + h * h) {
            return Ok(DirectIntegral { value, error, grid_size: 2 * n });
        }
        if 2 * n >= opts.max_grid {
            return Err(Error::UnresolvedPhase { estimate: error.to_f64_lossy(), tol: opts.tol.to_f64_lossy() });
        }
        n *= 2;
    }
}

/// `∬ g(x, y) e^{iS(x,y)/h} dx dy` over `𝕋 × [-1/2, 1/2]`; the error is
/// estimated by comparing grids `M` and `2M`.
pub fn direct_oscillatory_integral<T, G>(
    family: &PhaseFamily<'_, T>,
    g: G,
    h: T,
    opts: &DirectOptions<T>,
) -> Result<DirectIntegral<T>>
where
    T: Real,
    G: Fn(T, T) -> T + Sync,
{
    integrate(family, h, opts, |x, y, _, _| g(x, y))
}

/// The lattice term `∬ η(y) f(x, s) ζ(x, y) e^{iS/h} dx dy`.
pub fn lattice_integral<T: Real>(
    family: &PhaseFamily<'_, T>,
    f: &TestSymbol<T>,
    xbar: XBar<T>,
    h: T,
    mollifier: Option<Mollifier<T>>,
    opts: &DirectOptions<T>,
) -> Result<DirectIntegral<T>> {
    let fp = f.eval_p(family.s);
    if fp == T::zero() || f.is_zero() {
        return Ok(DirectIntegral { value: Complex::new(T::zero(), T::zero()), error: T::zero(), grid_size: 0 });
    }
    let q_bar = xbar.momentum(family.level);
    integrate(family, h, opts, |x, y, qp, qm| {
        let cut = mollifier.map_or(T::one(), |m| m.eval(y));
        if cut == T::zero() {
            return T::zero();
        }
        cut * fp * f.eval_x(x) * zeta(q_bar, qp, qm)
    })
}

#[derive(Debug, Clone)]
pub struct DecayCheck<T> {
    /// `(h, |Σ_p̂ I(p̂)|, number of lattice points)`.
    pub rows: Vec<(T, T, usize)>,
    pub fit: Option<OrderFit>,
}

/// Aggregates the lattice integrals of a symbol supported off the level
/// and fits the decay order in `h`.
pub fn nonstationary_decay_check<T: Real>(
    level: &ClassicalLevel<T>,
    f: &TestSymbol<T>,
    hs: &[T],
    opts: &DirectOptions<T>,
) -> Result<DecayCheck<T>> {
    let mut rows = Vec::with_capacity(hs.len());
    if f.is_zero() {
        return Ok(DecayCheck { rows: hs.iter().map(|h| (*h, T::zero(), 0)).collect(), fit: None });
    }
    let (c, d) = f
        .p_support()
        .ok_or_else(|| Error::InvalidParameter("symbol must have bounded momentum support".into()))?;
    if d >= level.p_min() && c <= level.p_max() {
        return Err(Error::SupportCrossesLevelBounds {
            lo: c.to_f64_lossy(),
            hi: d.to_f64_lossy(),
            p_min: level.p_min().to_f64_lossy(),
            p_max: level.p_max().to_f64_lossy(),
        });
    }
    for &h in hs {
        let step = T::two_pi() * h;
        let lo = ((c - level.p()) / step).ceil().to_f64_lossy() as i64;
        let hi = ((d - level.p()) / step).floor().to_f64_lossy() as i64;
        let mut acc = Complex::new(T::zero(), T::zero());
        let mut count = 0;
        for m in lo..=hi {
            let fam = PhaseFamily::lattice(level, h, m);
            acc = acc + lattice_integral(&fam, f, XBar::Rotation, h, None, opts)?.value;
            count += 1;
        }
        rows.push((h, acc.norm(), count));
    }
    let xs: Vec<f64> = rows.iter().map(|r| r.0.to_f64_lossy()).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.1.to_f64_lossy()).collect();
    Ok(DecayCheck { fit: fit_order(&xs, &ys), rows })
}

/// `(|v₀''(2x_i)|, |v₀''(x_i)|) / √gap` at `2πp = p_max - gap`.
pub fn degeneracy_ratio<T: Real>(level: &ClassicalLevel<T>, gap: T) -> Result<(T, T)> {
    let b = level.branches(level.p_max() - gap)?;
    let root = gap.sqrt();
    let x = b.x2;
    Ok((level.p_plus_d1(T::lit(2.0) * x).abs() / root, level.p_plus_d1(x).abs() / root))
}
