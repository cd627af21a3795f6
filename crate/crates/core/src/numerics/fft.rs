use std::sync::Arc;

use num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Cached forward/inverse FFTs of one length.
#[derive(Clone)]
pub struct FourierPlan<T: Real> {
    len: usize,
    forward: Arc<dyn Fft<T>>,
    inverse: Arc<dyn Fft<T>>,
}

impl<T: Real> std::fmt::Debug for FourierPlan<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FourierPlan").field("len", &self.len).finish()
    }
}

impl<T: Real> FourierPlan<T> {
    pub fn new(len: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self { len, forward: planner.plan_fft_forward(len), inverse: planner.plan_fft_inverse(len) }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Unnormalized `X_k = Σ_j x_j e^{-2πi jk/n}` in place.
    pub fn forward(&self, buf: &mut [Complex<T>]) {
        self.forward.process(buf);
    }

    /// Unnormalized `x_j = Σ_k X_k e^{+2πi jk/n}` in place.
    pub fn inverse(&self, buf: &mut [Complex<T>]) {
        self.inverse.process(buf);
    }

    /// Fourier coefficients of samples on `y_j = -1/2 + j/M`, returned in
    /// place in FFT order (index `k` holds mode `m ≡ k mod M`):
    /// `c_m = (1/M) Σ_j f(y_j) e^{-2πi m y_j}`.
    pub fn coefficients_in_place(&self, buf: &mut [Complex<T>]) {
        self.forward.process(buf);
        let scale = T::one() / T::from_usize_lossy(self.len);
        for (k, c) in buf.iter_mut().enumerate() {
            // e^{-2πi m (-1/2)} = (-1)^m, and m ≡ k (mod 2) since M is even.
            let s = if k % 2 == 0 { scale } else { -scale };
            *c = *c * s;
        }
    }
}

fn check_even(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::Empty);
    }
    if !n.is_power_of_two() {
        return Err(Error::SizeMismatch { expected: n.next_power_of_two(), got: n });
    }
    Ok(())
}

/// Fourier coefficients `c_m`, `m ∈ [-M/2, M/2)`, of samples on the torus
/// grid `y_j = -1/2 + j/M`, ordered by increasing `m`:
/// `c_m = (1/M) Σ_j f(y_j) e^{-2πi m y_j}`.
pub fn fft_coefficients<T: Real>(samples: &[Complex<T>]) -> Result<Vec<Complex<T>>> {
    let m = samples.len();
    check_even(m)?;
    let plan = FourierPlan::new(m);
    let mut buf = samples.to_vec();
    plan.coefficients_in_place(&mut buf);
    // FFT order -> ascending m.
    let mut out = Vec::with_capacity(m);
    out.extend_from_slice(&buf[m / 2..]);
    out.extend_from_slice(&buf[..m / 2]);
    Ok(out)
}

/// Inverse of [`fft_coefficients`]: samples on `y_j` from ascending
/// coefficients `m ∈ [-M/2, M/2)`.
pub fn inverse_fft_coefficients<T: Real>(coeffs: &[Complex<T>]) -> Result<Vec<Complex<T>>> {
    let m = coeffs.len();
    check_even(m)?;
    let mut buf = Vec::with_capacity(m);
    buf.extend_from_slice(&coeffs[m / 2..]);
    buf.extend_from_slice(&coeffs[..m / 2]);
    for (k, c) in buf.iter_mut().enumerate() {
        if k % 2 == 1 {
            *c = -*c;
        }
    }
    let plan = FourierPlan::new(m);
    plan.inverse(&mut buf);
    Ok(buf)
}

/// Real periodic function on the torus stored by its Fourier coefficients
/// `c_n`, `n = -K..=K`, with `f(x) = Σ c_n e^{2πi n x}`.
///
/// The Nyquist mode of an even-length sample is split evenly between `±K`,
/// so the series interpolates its samples exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct TrigSeries<T: Real> {
    k: usize,
    coeffs: Vec<Complex<T>>,
}

impl<T: Real> TrigSeries<T> {
    /// Interpolant of samples taken on `x_j = -1/2 + j/M` (`M` even).
    pub fn from_samples(samples: &[T]) -> Result<Self> {
        let m = samples.len();
        if m == 0 || m % 2 == 1 {
            return Err(Error::SizeMismatch { expected: m + 1, got: m });
        }
        let plan = FourierPlan::new(m);
        let mut buf: Vec<Complex<T>> = samples.iter().map(|&v| Complex::new(v, T::zero())).collect();
        plan.coefficients_in_place(&mut buf);
        let k = m / 2;
        let mut coeffs = vec![Complex::new(T::zero(), T::zero()); 2 * k + 1];
        for n in 0..k {
            coeffs[k + n] = buf[n];
            if n > 0 {
                coeffs[k - n] = buf[m - n];
            }
        }
        let nyq = buf[k] * T::lit(0.5);
        coeffs[0] = nyq;
        coeffs[2 * k] = nyq;
        Ok(Self { k, coeffs })
    }

    pub fn from_fn<F: Fn(T) -> T>(f: F, m: usize) -> Result<Self> {
        let samples: Vec<T> = (0..m)
            .map(|j| f(T::from_usize_lossy(j) / T::from_usize_lossy(m) - T::lit(0.5)))
            .collect();
        Self::from_samples(&samples)
    }

    /// Samples `f` on doubling grids until the top quarter of the spectrum
    /// is below `tol` relative to the largest coefficient.
    pub fn fit<F: Fn(T) -> T>(f: F, tol: T, min_size: usize, max_size: usize) -> Result<Self> {
        let mut m = min_size.max(16).next_power_of_two();
        loop {
            let s = Self::from_fn(&f, m)?;
            if s.coeffs.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
                return Err(Error::NonFinite("TrigSeries::fit"));
            }
            if s.tail_ratio() <= tol {
                return Ok(s);
            }
            if m >= max_size {
                return Err(Error::Stagnation { iterations: m, residual: s.tail_ratio().to_f64_lossy() });
            }
            m *= 2;
        }
    }

    /// Largest `|c_n|` over `|n| > K/2` divided by the largest `|c_n|`.
    pub fn tail_ratio(&self) -> T {
        let max = self.coeffs.iter().map(|c| c.norm()).fold(T::zero(), T::max);
        if max == T::zero() {
            return T::zero();
        }
        let tail = (0..self.coeffs.len())
            .filter(|&i| (i as isize - self.k as isize).unsigned_abs() > self.k / 2)
            .map(|i| self.coeffs[i].norm())
            .fold(T::zero(), T::max);
        tail / max
    }

    /// Highest retained mode `K`.
    pub fn max_mode(&self) -> usize {
        self.k
    }

    pub fn coefficient(&self, n: isize) -> Complex<T> {
        let i = n + self.k as isize;
        if i < 0 || i as usize >= self.coeffs.len() {
            Complex::new(T::zero(), T::zero())
        } else {
            self.coeffs[i as usize]
        }
    }

    pub fn mean(&self) -> T {
        self.coeffs[self.k].re
    }

    pub fn eval(&self, x: T) -> T {
        let theta = T::two_pi() * x;
        let rot = Complex::new(theta.cos(), theta.sin());
        let mut z = rot;
        let mut s = self.coeffs[self.k].re;
        for n in 1..=self.k {
            if n % 64 == 0 {
                // Reseed the rotation to keep round-off from accumulating.
                let t = theta * T::from_usize_lossy(n);
                z = Complex::new(t.cos(), t.sin());
            }
            let a = self.coeffs[self.k + n];
            let b = self.coeffs[self.k - n];
            s = s + (a * z).re + (b * z.conj()).re;
            z = z * rot;
        }
        s
    }

    /// Derivative series (Nyquist pair dropped).
    pub fn derivative(&self) -> Self {
        let mut coeffs = self.coeffs.clone();
        for (i, c) in coeffs.iter_mut().enumerate() {
            let n = i as isize - self.k as isize;
            if n.unsigned_abs() == self.k {
                *c = Complex::new(T::zero(), T::zero());
            } else {
                let w = T::two_pi() * T::lit(n as f64);
                *c = *c * Complex::new(T::zero(), w);
            }
        }
        Self { k: self.k, coeffs }
    }

    /// Exact derivative of the series, Nyquist pair included. Differs from
    /// [`TrigSeries::derivative`] only off the original grid.
    pub fn derivative_exact(&self) -> Self {
        let mut coeffs = self.coeffs.clone();
        for (i, c) in coeffs.iter_mut().enumerate() {
            let n = i as isize - self.k as isize;
            *c = *c * Complex::new(T::zero(), T::two_pi() * T::lit(n as f64));
        }
        Self { k: self.k, coeffs }
    }

    /// Mean-zero antiderivative; the mean of `self` is discarded (it is the
    /// slope of the non-periodic part, returned by [`TrigSeries::mean`]).
    pub fn antiderivative(&self) -> Self {
        let mut coeffs = self.coeffs.clone();
        for (i, c) in coeffs.iter_mut().enumerate() {
            let n = i as isize - self.k as isize;
            if n == 0 || n.unsigned_abs() == self.k {
                *c = Complex::new(T::zero(), T::zero());
            } else {
                let w = T::two_pi() * T::lit(n as f64);
                *c = *c / Complex::new(T::zero(), w);
            }
        }
        Self { k: self.k, coeffs }
    }

    pub fn add_constant(&mut self, c: T) {
        self.coeffs[self.k].re = self.coeffs[self.k].re + c;
    }

    pub fn scale(&mut self, s: T) {
        for c in &mut self.coeffs {
            *c = *c * s;
        }
    }

    /// Values on the grid `x_j = -1/2 + j/M` (any even `M`; modes above the
    /// grid's Nyquist frequency are aliased, as sampling would).
    pub fn sample(&self, m: usize) -> Vec<T> {
        let plan = FourierPlan::new(m);
        let mut buf = vec![Complex::new(T::zero(), T::zero()); m];
        for (i, c) in self.coeffs.iter().enumerate() {
            let n = i as isize - self.k as isize;
            let idx = n.rem_euclid(m as isize) as usize;
            let sign = if n.rem_euclid(2) == 0 { T::one() } else { -T::one() };
            buf[idx] = buf[idx] + *c * sign;
        }
        plan.inverse(&mut buf);
        buf.into_iter().map(|c| c.re).collect()
    }
}
