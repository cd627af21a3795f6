use crate::error::{Error, Result};
use crate::scalar::Real;

use super::eigen::{EigenOperator, LinearSolve};

/// Row-major square matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix<T> {
    n: usize,
    data: Vec<T>,
}

impl<T: Real> DenseMatrix<T> {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![T::zero(); n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_fn<F: Fn(usize, usize) -> T>(n: usize, f: F) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        Self { n, data }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [T] {
        &mut self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn mul_vec(&self, x: &[T]) -> Vec<T> {
        assert_eq!(x.len(), self.n);
        (0..self.n).map(|i| self.row(i).iter().zip(x).map(|(a, b)| *a * *b).sum()).collect()
    }

    pub fn norm_inf(&self) -> T {
        (0..self.n).map(|i| self.row(i).iter().map(|a| a.abs()).sum::<T>()).fold(T::zero(), T::max)
    }

    /// LU factorization with partial pivoting.
    pub fn lu(&self) -> Result<DenseLu<T>> {
        let n = self.n;
        let mut a = self.data.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let scale = self.norm_inf().max(T::min_positive_value());
        for k in 0..n {
            let (mut p, mut best) = (k, a[k * n + k].abs());
            for i in k + 1..n {
                let v = a[i * n + k].abs();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if !best.is_finite() {
                return Err(Error::NonFinite("dense LU"));
            }
            if best <= scale * T::epsilon() * T::lit(1e-3) {
                return Err(Error::Singular { row: k, pivot: best.to_f64_lossy() });
            }
            if p != k {
                for j in 0..n {
                    a.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
            }
            let pivot = a[k * n + k];
            let (top, bottom) = a.split_at_mut((k + 1) * n);
            let pivot_row = &top[k * n + k + 1..k * n + n];
            for i in 0..n - k - 1 {
                let row = &mut bottom[i * n..(i + 1) * n];
                let l = row[k] / pivot;
                row[k] = l;
                if l != T::zero() {
                    for (r, u) in row[k + 1..].iter_mut().zip(pivot_row) {
                        *r = *r - l * *u;
                    }
                }
            }
        }
        Ok(DenseLu { n, lu: a, perm })
    }
}

impl<T> std::ops::Index<(usize, usize)> for DenseMatrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.n + j]
    }
}

impl<T> std::ops::IndexMut<(usize, usize)> for DenseMatrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.n + j]
    }
}

/// Packed `PA = LU` factors.
#[derive(Debug, Clone)]
pub struct DenseLu<T> {
    n: usize,
    lu: Vec<T>,
    perm: Vec<usize>,
}

impl<T: Real> DenseLu<T> {
    pub fn solve(&self, b: &[T]) -> Result<Vec<T>> {
        let mut x = b.to_vec();
        self.solve_in_place(&mut x)?;
        Ok(x)
    }
}

impl<T: Real> LinearSolve<T> for DenseLu<T> {
    fn solve_in_place(&self, b: &mut [T]) -> Result<()> {
        let n = self.n;
        if b.len() != n {
            return Err(Error::SizeMismatch { expected: n, got: b.len() });
        }
        let mut x: Vec<T> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let row = &self.lu[i * n..i * n + i];
            let s: T = row.iter().zip(&x[..i]).map(|(l, v)| *l * *v).sum();
            x[i] = x[i] - s;
        }
        for i in (0..n).rev() {
            let row = &self.lu[i * n + i + 1..(i + 1) * n];
            let s: T = row.iter().zip(&x[i + 1..]).map(|(u, v)| *u * *v).sum();
            x[i] = (x[i] - s) / self.lu[i * n + i];
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("dense solve"));
        }
        b.copy_from_slice(&x);
        Ok(())
    }
}

impl<T: Real> EigenOperator<T> for DenseMatrix<T> {
    type Factor = DenseLu<T>;

    fn dim(&self) -> usize {
        self.n
    }

    fn apply(&self, x: &[T]) -> Vec<T> {
        self.mul_vec(x)
    }

    fn factor_shifted(&self, shift: T) -> Result<DenseLu<T>> {
        let mut m = self.clone();
        for i in 0..self.n {
            m[(i, i)] = m[(i, i)] - shift;
        }
        m.lu()
    }

    fn gershgorin_upper(&self) -> T {
        (0..self.n)
            .map(|i| {
                let r: T = self.row(i).iter().enumerate().filter(|(j, _)| *j != i).map(|(_, a)| a.abs()).sum();
                self[(i, i)] + r
            })
            .fold(T::neg_infinity(), T::max)
    }

    fn norm_inf(&self) -> T {
        Self::norm_inf(self)
    }
}
