use crate::error::{Error, Result};
use crate::scalar::Real;

use super::dense::{DenseLu, DenseMatrix};
use super::eigen::{EigenOperator, LinearSolve};

/// Square system whose leading `n_core` unknowns couple through a band of
/// lower/upper width at most 2, bordered by `border` dense rows and columns.
///
/// Periodic stencils fit this shape by moving the last `w` unknowns into
/// the border; an appended gauge constraint adds one more border row and
/// column.
#[derive(Debug, Clone, PartialEq)]
pub struct BandedSystem<T> {
    n_core: usize,
    kl: usize,
    ku: usize,
    border: usize,
    band: Vec<T>,
    /// `n_core × border`, row-major.
    b: Vec<T>,
    /// `border × n_core`, row-major.
    c: Vec<T>,
    /// `border × border`, row-major.
    d: Vec<T>,
}

impl<T: Real> BandedSystem<T> {
    pub const MAX_BANDWIDTH: usize = 2;

    pub fn new(n_core: usize, kl: usize, ku: usize, border: usize) -> Result<Self> {
        if kl > Self::MAX_BANDWIDTH || ku > Self::MAX_BANDWIDTH {
            return Err(Error::InvalidParameter(format!("bandwidth ({kl}, {ku}) exceeds 2")));
        }
        if n_core == 0 {
            return Err(Error::Empty);
        }
        let w = kl + ku + 1;
        Ok(Self {
            n_core,
            kl,
            ku,
            border,
            band: vec![T::zero(); n_core * w],
            b: vec![T::zero(); n_core * border],
            c: vec![T::zero(); border * n_core],
            d: vec![T::zero(); border * border],
        })
    }

    /// Periodic operator of size `m` with half-bandwidth `w` and row
    /// coefficients `coef(i, offset)` for `offset ∈ [-w, w]`, plus
    /// `extra_border` trailing border unknowns left for the caller to fill.
    pub fn periodic<F: Fn(usize, isize) -> T>(m: usize, w: usize, extra_border: usize, coef: F) -> Result<Self> {
        if m <= 2 * w + 1 {
            return Err(Error::InvalidParameter(format!("periodic size {m} too small for bandwidth {w}")));
        }
        let mut s = Self::new(m - w, w, w, w + extra_border)?;
        for i in 0..m {
            for off in -(w as isize)..=(w as isize) {
                let j = (i as isize + off).rem_euclid(m as isize) as usize;
                s.add(i, j, coef(i, off))?;
            }
        }
        Ok(s)
    }

    pub fn dim(&self) -> usize {
        self.n_core + self.border
    }

    pub fn bandwidths(&self) -> (usize, usize) {
        (self.kl, self.ku)
    }

    pub fn border(&self) -> usize {
        self.border
    }

    fn slot(&mut self, i: usize, j: usize) -> Result<&mut T> {
        let n = self.dim();
        if i >= n || j >= n {
            return Err(Error::SizeMismatch { expected: n, got: i.max(j) + 1 });
        }
        let nc = self.n_core;
        let k = self.border;
        match (i < nc, j < nc) {
            (true, true) => {
                let off = j as isize - i as isize;
                if off < -(self.kl as isize) || off > self.ku as isize {
                    return Err(Error::InvalidParameter(format!("entry ({i}, {j}) outside the band")));
                }
                let w = self.kl + self.ku + 1;
                Ok(&mut self.band[i * w + (off + self.kl as isize) as usize])
            }
            (true, false) => Ok(&mut self.b[i * k + (j - nc)]),
            (false, true) => Ok(&mut self.c[(i - nc) * nc + j]),
            (false, false) => Ok(&mut self.d[(i - nc) * k + (j - nc)]),
        }
    }

    pub fn set(&mut self, i: usize, j: usize, v: T) -> Result<()> {
        *self.slot(i, j)? = v;
        Ok(())
    }

    pub fn add(&mut self, i: usize, j: usize, v: T) -> Result<()> {
        let s = self.slot(i, j)?;
        *s = *s + v;
        Ok(())
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        let nc = self.n_core;
        let k = self.border;
        match (i < nc, j < nc) {
            (true, true) => {
                let off = j as isize - i as isize;
                if off < -(self.kl as isize) || off > self.ku as isize {
                    T::zero()
                } else {
                    self.band[i * (self.kl + self.ku + 1) + (off + self.kl as isize) as usize]
                }
            }
            (true, false) => self.b[i * k + (j - nc)],
            (false, true) => self.c[(i - nc) * nc + j],
            (false, false) => self.d[(i - nc) * k + (j - nc)],
        }
    }

    pub fn apply(&self, x: &[T]) -> Vec<T> {
        let n = self.dim();
        assert_eq!(x.len(), n);
        let nc = self.n_core;
        let k = self.border;
        let mut y = vec![T::zero(); n];
        for i in 0..nc {
            let lo = i.saturating_sub(self.kl);
            let hi = (i + self.ku).min(nc - 1);
            let mut s = T::zero();
            for j in lo..=hi {
                s = s + self.get(i, j) * x[j];
            }
            for q in 0..k {
                s = s + self.b[i * k + q] * x[nc + q];
            }
            y[i] = s;
        }
        for p in 0..k {
            let mut s = T::zero();
            for j in 0..nc {
                s = s + self.c[p * nc + j] * x[j];
            }
            for q in 0..k {
                s = s + self.d[p * k + q] * x[nc + q];
            }
            y[nc + p] = s;
        }
        y
    }

    pub fn norm_inf(&self) -> T {
        let n = self.dim();
        (0..n)
            .map(|i| (0..n).map(|j| self.get(i, j).abs()).sum::<T>())
            .fold(T::zero(), T::max)
    }

    pub fn lu(&self) -> Result<BandedLu<T>> {
        self.lu_shifted(T::zero())
    }

    fn lu_shifted(&self, shift: T) -> Result<BandedLu<T>> {
        let nc = self.n_core;
        let (kl, ku) = (self.kl, self.ku);
        let w = 2 * kl + ku + 1;
        let mut ab = vec![T::zero(); nc * w];
        for i in 0..nc {
            let lo = i.saturating_sub(kl);
            let hi = (i + ku).min(nc - 1);
            for j in lo..=hi {
                let mut v = self.get(i, j);
                if i == j {
                    v = v - shift;
                }
                ab[i * w + (j + kl - i)] = v;
            }
        }
        let scale = self.norm_inf().max(T::min_positive_value());
        let idx = |i: usize, j: usize| i * w + (j + kl - i);
        let mut ipiv = vec![0usize; nc];
        for k in 0..nc {
            let last = (k + kl).min(nc - 1);
            let mut p = k;
            let mut best = ab[idx(k, k)].abs();
            for i in k + 1..=last {
                let v = ab[idx(i, k)].abs();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if !best.is_finite() {
                return Err(Error::NonFinite("banded LU"));
            }
            if best <= scale * T::epsilon() * T::lit(1e-3) {
                return Err(Error::Singular { row: k, pivot: best.to_f64_lossy() });
            }
            ipiv[k] = p;
            let jmax = (k + kl + ku).min(nc - 1);
            if p != k {
                for j in k..=jmax {
                    ab.swap(idx(k, j), idx(p, j));
                }
            }
            let pivot = ab[idx(k, k)];
            for i in k + 1..=last {
                let l = ab[idx(i, k)] / pivot;
                ab[idx(i, k)] = l;
                if l != T::zero() {
                    for j in k + 1..=jmax {
                        let u = ab[idx(k, j)];
                        ab[idx(i, j)] = ab[idx(i, j)] - l * u;
                    }
                }
            }
        }
        let mut core = CoreLu { n: nc, kl, ku, ab, ipiv };
        let k = self.border;
        if k == 0 {
            return Ok(BandedLu { core, n_core: nc, border: 0, y: Vec::new(), c: Vec::new(), schur: None });
        }
        // Y = A11^{-1} B, one column at a time (stored column-major).
        let mut y = vec![T::zero(); nc * k];
        for q in 0..k {
            let col = &mut y[q * nc..(q + 1) * nc];
            for i in 0..nc {
                col[i] = self.b[i * k + q];
            }
            core.solve(col);
        }
        let mut s = DenseMatrix::zeros(k);
        for p in 0..k {
            for q in 0..k {
                let mut v = self.d[p * k + q];
                if p == q {
                    v = v - shift;
                }
                let cy: T = (0..nc).map(|j| self.c[p * nc + j] * y[q * nc + j]).sum();
                s[(p, q)] = v - cy;
            }
        }
        let schur = s.lu()?;
        core.ipiv.shrink_to_fit();
        Ok(BandedLu { core, n_core: nc, border: k, y, c: self.c.clone(), schur: Some(schur) })
    }

    pub fn solve(&self, rhs: &[T]) -> Result<Vec<T>> {
        let lu = self.lu()?;
        let mut x = rhs.to_vec();
        lu.solve_in_place(&mut x)?;
        Ok(x)
    }

    /// Lower estimate of the infinity-norm condition number from a few
    /// probe solves.
    pub fn condition_estimate(&self) -> Result<T> {
        let lu = self.lu()?;
        let n = self.dim();
        let probes: [Box<dyn Fn(usize) -> T>; 3] = [
            Box::new(|_| T::one()),
            Box::new(|i| if i % 2 == 0 { T::one() } else { -T::one() }),
            Box::new(move |i| T::from_usize_lossy((i * 7919) % 13) / T::lit(13.0) - T::lit(0.5)),
        ];
        let mut best = T::zero();
        for probe in &probes {
            let b: Vec<T> = (0..n).map(probe).collect();
            let bn = b.iter().fold(T::zero(), |m, v| m.max(v.abs()));
            let mut x = b.clone();
            lu.solve_in_place(&mut x)?;
            best = best.max(x.iter().fold(T::zero(), |m, v| m.max(v.abs())) / bn);
            // One inverse-power step sharpens the estimate.
            let mut z: Vec<T> = x.iter().map(|v| v.signum()).collect();
            lu.solve_in_place(&mut z)?;
            best = best.max(z.iter().fold(T::zero(), |m, v| m.max(v.abs())));
        }
        Ok(best * self.norm_inf())
    }
}

#[derive(Debug, Clone)]
struct CoreLu<T> {
    n: usize,
    kl: usize,
    ku: usize,
    ab: Vec<T>,
    ipiv: Vec<usize>,
}

impl<T: Real> CoreLu<T> {
    fn solve(&self, x: &mut [T]) {
        let (n, kl, ku) = (self.n, self.kl, self.ku);
        let w = 2 * kl + ku + 1;
        let idx = |i: usize, j: usize| i * w + (j + kl - i);
        for k in 0..n {
            let p = self.ipiv[k];
            if p != k {
                x.swap(k, p);
            }
            let xk = x[k];
            for i in k + 1..=(k + kl).min(n - 1) {
                x[i] = x[i] - self.ab[idx(i, k)] * xk;
            }
        }
        for k in (0..n).rev() {
            let mut s = x[k];
            for j in k + 1..=(k + kl + ku).min(n - 1) {
                s = s - self.ab[idx(k, j)] * x[j];
            }
            x[k] = s / self.ab[idx(k, k)];
        }
    }
}

/// Factorization of a [`BandedSystem`] (banded LU of the core plus a dense
/// Schur complement for the border).
#[derive(Debug, Clone)]
pub struct BandedLu<T> {
    core: CoreLu<T>,
    n_core: usize,
    border: usize,
    y: Vec<T>,
    c: Vec<T>,
    schur: Option<DenseLu<T>>,
}

impl<T: Real> LinearSolve<T> for BandedLu<T> {
    fn solve_in_place(&self, rhs: &mut [T]) -> Result<()> {
        let nc = self.n_core;
        let k = self.border;
        if rhs.len() != nc + k {
            return Err(Error::SizeMismatch { expected: nc + k, got: rhs.len() });
        }
        let (r1, r2) = rhs.split_at_mut(nc);
        self.core.solve(r1);
        if let Some(schur) = &self.schur {
            for p in 0..k {
                let cz: T = (0..nc).map(|j| self.c[p * nc + j] * r1[j]).sum();
                r2[p] = r2[p] - cz;
            }
            schur.solve_in_place(r2)?;
            for q in 0..k {
                let xq = r2[q];
                for (zi, yi) in r1.iter_mut().zip(&self.y[q * nc..(q + 1) * nc]) {
                    *zi = *zi - *yi * xq;
                }
            }
        }
        if rhs.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("banded solve"));
        }
        Ok(())
    }
}

impl<T: Real> EigenOperator<T> for BandedSystem<T> {
    type Factor = BandedLu<T>;

    fn dim(&self) -> usize {
        BandedSystem::dim(self)
    }

    fn apply(&self, x: &[T]) -> Vec<T> {
        BandedSystem::apply(self, x)
    }

    fn factor_shifted(&self, shift: T) -> Result<BandedLu<T>> {
        self.lu_shifted(shift)
    }

    fn gershgorin_upper(&self) -> T {
        let n = self.dim();
        (0..n)
            .map(|i| {
                let r: T = (0..n).filter(|&j| j != i).map(|j| self.get(i, j).abs()).sum();
                self.get(i, i) + r
            })
            .fold(T::neg_infinity(), T::max)
    }

    fn norm_inf(&self) -> T {
        Self::norm_inf(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dense_of(s: &BandedSystem<f64>) -> DenseMatrix<f64> {
        DenseMatrix::from_fn(s.dim(), |i, j| s.get(i, j))
    }

    #[test]
    fn tridiagonal_matches_dense() {
        let mut s = BandedSystem::new(6, 1, 1, 0).unwrap();
        for i in 0..6 {
            s.set(i, i, 4.0).unwrap();
            if i > 0 {
                s.set(i, i - 1, -1.0).unwrap();
            }
            if i < 5 {
                s.set(i, i + 1, -2.0).unwrap();
            }
        }
        let b = [1.0f64, 2.0, 3.0, 4.0, 5.0, 6.0];
        let x = s.solve(&b).unwrap();
        let r = s.apply(&x);
        for (a, b) in r.iter().zip(&b) {
            assert!((a - b).abs() < 1e-13);
        }
        let xd = dense_of(&s).lu().unwrap().solve(&b).unwrap();
        for (a, b) in x.iter().zip(&xd) {
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn rejects_out_of_band_entries() {
        let mut s = BandedSystem::<f64>::new(6, 1, 1, 0).unwrap();
        assert!(s.set(0, 3, 1.0).is_err());
        assert!(BandedSystem::<f64>::new(6, 3, 1, 0).is_err());
    }

    #[test]
    fn periodic_with_gauge_border() {
        // Periodic second difference plus a mean constraint and a constant
        // unknown: [L 1; 1^T/M 0].
        let m = 20;
        let mut s = BandedSystem::periodic(m, 1, 1, |_, off| if off == 0 { -2.0 } else { 1.0 }).unwrap();
        for i in 0..m {
            s.set(i, m, 1.0).unwrap();
            s.set(m, i, 1.0 / m as f64).unwrap();
        }
        let rhs: Vec<f64> = (0..=m).map(|i| ((i as f64) * 0.7).sin()).collect();
        let x = s.solve(&rhs).unwrap();
        let r = s.apply(&x);
        for (a, b) in r.iter().zip(&rhs) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!(s.condition_estimate().unwrap() > 1.0);
    }

    #[test]
    fn needs_pivoting_inside_band() {
        let mut s = BandedSystem::new(4, 1, 1, 0).unwrap();
        s.set(0, 0, 0.0).unwrap();
        s.set(0, 1, 1.0).unwrap();
        s.set(1, 0, 1.0).unwrap();
        s.set(1, 1, 0.0).unwrap();
        s.set(1, 2, 1.0).unwrap();
        s.set(2, 1, 1.0).unwrap();
        s.set(2, 2, 3.0).unwrap();
        s.set(2, 3, 1.0).unwrap();
        s.set(3, 2, 1.0).unwrap();
        s.set(3, 3, 2.0).unwrap();
        let b = [1.0f64, 2.0, 3.0, 4.0];
        let x = s.solve(&b).unwrap();
        let r = s.apply(&x);
        for (a, b) in r.iter().zip(&b) {
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn singular_reported() {
        let s = BandedSystem::<f64>::new(4, 1, 1, 0).unwrap();
        assert!(matches!(s.lu(), Err(Error::Singular { .. })));
    }
}
