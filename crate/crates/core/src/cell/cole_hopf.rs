use crate::error::Result;
use crate::numerics::{principal_eigenpair, EigenOptions};
use crate::potential::Potential;
use crate::scalar::Real;

use super::discretization::Operators;
use super::newton::Branch;

/// Principal eigenpair of the Cole–Hopf image of a cell problem.
#[derive(Debug, Clone)]
pub struct ColeHopf<T> {
    pub hbar: T,
    /// `u = e^{∓v/h}` on the grid, maximum 1.
    pub u: Vec<T>,
    /// The cell solution recovered from `u`, mean zero.
    pub v: Vec<T>,
    pub residual: T,
    pub iterations: usize,
}

/// `u = e^{-v/h}` turns the forward problem into
/// `(h²/2)u'' - hPu' + (V + P²/2)u = H̄u`; `u = e^{v*/h}` turns the backward
/// one into the adjoint `(h²/2)u'' + hPu' + (V + P²/2)u = H̄u`. `H̄_h` is the
/// principal eigenvalue in both cases.
pub(crate) fn cole_hopf<T: Real>(
    ops: &Operators<T>,
    potential: &Potential<T>,
    p: T,
    h: T,
    branch: Branch,
) -> Result<ColeHopf<T>> {
    let m = ops.size();
    let half = T::lit(0.5);
    let diag: Vec<T> = (0..m)
        .map(|j| {
            let x = T::from_usize_lossy(j) / T::from_usize_lossy(m) - half;
            potential.value(x) + half * p * p
        })
        .collect();
    let drift = -branch.sign::<T>() * h * p;
    let l = ops.dense_operator(half * h * h, drift, &diag);
    // H̄_h ≤ max(V) + P²/2, so starting above that bound picks the
    // principal eigenvalue.
    let upper = potential.v_max() + half * p * p;
    let opts = EigenOptions {
        initial_shift: Some(upper + T::lit(1e-2) * (T::one() + upper.abs())),
        tol: T::tol(1e-13),
        ..EigenOptions::default()
    };
    let ep = principal_eigenpair(&l, None, &opts)?;
    let s = branch.sign::<T>();
    let mut v: Vec<T> = ep.vector.iter().map(|u| -s * h * u.ln()).collect();
    let mean = v.iter().copied().sum::<T>() / T::from_usize_lossy(m);
    v.iter_mut().for_each(|x| *x = *x - mean);
    Ok(ColeHopf { hbar: ep.value, u: ep.vector, v, residual: ep.residual, iterations: ep.iterations })
}
