use crate::error::{Error, Result};
use crate::scalar::Real;

use super::discretization::Operators;

/// Which cell problem: `-(h/2)v''` (forward) or `+(h/2)v*''` (backward).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Forward,
    Backward,
}

impl Branch {
    pub(crate) fn sign<T: Real>(self) -> T {
        match self {
            Self::Forward => T::one(),
            Self::Backward => -T::one(),
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct NewtonOutcome<T> {
    pub v: Vec<T>,
    pub hbar: T,
    pub iterations: usize,
    pub residual: T,
}

pub(crate) struct CellProblem<'a, T: Real> {
    pub ops: &'a Operators<T>,
    pub potential: &'a [T],
    pub p: T,
    pub h: T,
    pub branch: Branch,
}

impl<T: Real> CellProblem<'_, T> {
    /// Residual of the discrete equation at every node, plus the gauge row.
    pub fn residual(&self, v: &[T], hbar: T) -> (Vec<T>, Vec<T>) {
        let (d1, d2) = self.ops.apply(v);
        let half = T::lit(0.5);
        let a = -self.branch.sign::<T>() * half * self.h;
        let mut f: Vec<T> = (0..v.len())
            .map(|i| {
                let g = self.p + d1[i];
                a * d2[i] + half * g * g + self.potential[i] - hbar
            })
            .collect();
        let mean = v.iter().copied().sum::<T>() / T::from_usize_lossy(v.len());
        f.push(mean);
        (f, d1)
    }

    /// Rounding floor of the residual evaluation at `v`.
    pub fn noise_floor(&self, v: &[T], hbar: T) -> T {
        let (n1, n2) = self.ops.norms();
        let vmax = v.iter().fold(T::zero(), |m, x| m.max(x.abs()));
        let vpot = self.potential.iter().fold(T::zero(), |m, x| m.max(x.abs()));
        let grad = self.p.abs() + n1 * vmax;
        T::epsilon()
            * T::lit(4.0)
            * (T::lit(0.5) * self.h * n2 * vmax + grad * n1 * vmax + grad * grad + hbar.abs() + vpot)
    }

    /// Damped Newton on `(v, H̄)` from the given guess.
    pub fn solve(&self, v0: &[T], h0: T, tol: T, max_iter: usize) -> Result<NewtonOutcome<T>> {
        let m = v0.len();
        let mut v = v0.to_vec();
        let mut hbar = h0;
        let norm = |f: &[T]| f.iter().fold(T::zero(), |a, x| a.max(x.abs()));
        let (mut f, mut d1) = self.residual(&v, hbar);
        let mut r = norm(&f);
        let alpha = -self.branch.sign::<T>() * T::lit(0.5) * self.h;
        for it in 0..=max_iter {
            if !r.is_finite() {
                return Err(Error::NonFinite("cell residual"));
            }
            if r <= tol {
                return Ok(NewtonOutcome { v, hbar, iterations: it, residual: r });
            }
            if it == max_iter {
                break;
            }
            let beta: Vec<T> = d1.iter().map(|d| self.p + *d).collect();
            let lu = self.ops.bordered_factor(alpha, &beta)?;
            let mut step: Vec<T> = f.iter().map(|x| -*x).collect();
            lu.solve_in_place(&mut step)?;
            let mut lambda = T::one();
            loop {
                let vt: Vec<T> = (0..m).map(|i| v[i] + lambda * step[i]).collect();
                let ht = hbar + lambda * step[m];
                let (ft, dt) = self.residual(&vt, ht);
                let rt = norm(&ft);
                if rt.is_finite() && (rt <= (T::one() - T::lit(1e-4) * lambda) * r || rt <= tol) {
                    v = vt;
                    hbar = ht;
                    f = ft;
                    d1 = dt;
                    r = rt;
                    break;
                }
                lambda = lambda * T::lit(0.5);
                if lambda < T::lit(1e-10) {
                    // Stalled at the rounding level: accept.
                    if r <= tol.max(T::lit(16.0) * self.noise_floor(&v, hbar)) {
                        return Ok(NewtonOutcome { v, hbar, iterations: it + 1, residual: r });
                    }
                    return Err(Error::NewtonFailed { iterations: it + 1, residual: r.to_f64_lossy() });
                }
            }
            log::debug!("newton {:?} it={} residual={:e}", self.branch, it + 1, r);
        }
        Err(Error::NewtonFailed { iterations: max_iter, residual: r.to_f64_lossy() })
    }
}
