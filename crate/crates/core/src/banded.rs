//! Banded matrices with partial-pivoting LU and Cholesky factorizations.

use crate::error::{IfeError, Result};

/// Square matrix with `kl` sub- and `ku` superdiagonals.
///
/// Row `i` stores columns `i - kl ..= i + ku + kl`; the extra `kl`
/// superdiagonals hold fill-in from row interchanges during LU.
#[derive(Debug, Clone, PartialEq)]
pub struct BandedMatrix {
    n: usize,
    kl: usize,
    ku: usize,
    data: Vec<f64>,
}

impl BandedMatrix {
    pub fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        Self {
            n,
            kl,
            ku,
            data: vec![0.0; n * (2 * kl + ku + 1)],
        }
    }

    pub fn dimension(&self) -> usize {
        self.n
    }

    pub fn lower_bandwidth(&self) -> usize {
        self.kl
    }

    pub fn upper_bandwidth(&self) -> usize {
        self.ku
    }

    fn width(&self) -> usize {
        2 * self.kl + self.ku + 1
    }

    fn in_band(&self, i: usize, j: usize) -> bool {
        i < self.n && j < self.n && j + self.kl >= i && j <= i + self.ku
    }

    #[inline]
    fn slot(&self, i: usize, j: usize) -> usize {
        i * self.width() + (j + self.kl - i)
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        if self.in_band(i, j) {
            self.data[self.slot(i, j)]
        } else {
            0.0
        }
    }

    /// Adds `value` to entry `(i, j)`. Panics when `(i, j)` lies outside the
    /// band.
    pub fn add(&mut self, i: usize, j: usize, value: f64) {
        assert!(
            self.in_band(i, j),
            "entry ({i}, {j}) outside band kl={} ku={}",
            self.kl,
            self.ku
        );
        let s = self.slot(i, j);
        self.data[s] += value;
    }

    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        assert!(self.in_band(i, j), "entry ({i}, {j}) outside band");
        let s = self.slot(i, j);
        self.data[s] = value;
    }

    fn columns(&self, i: usize) -> std::ops::Range<usize> {
        i.saturating_sub(self.kl)..(i + self.ku + 1).min(self.n)
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| self.columns(i).map(|j| self.get(i, j) * x[j]).sum())
            .collect()
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        (0..self.n)
            .map(|i| self.columns(i).map(|j| self.get(i, j).abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        (0..self.n)
            .flat_map(|i| self.columns(i).map(move |j| (i, j)))
            .map(|(i, j)| self.get(i, j).abs())
            .fold(0.0, f64::max)
    }

    /// Largest in-band `|A_ij - A_ji|`.
    pub fn asymmetry(&self) -> f64 {
        (0..self.n)
            .flat_map(|i| self.columns(i).map(move |j| (i, j)))
            .map(|(i, j)| (self.get(i, j) - self.get(j, i)).abs())
            .fold(0.0, f64::max)
    }

    /// `|A_ij - A_ji| <= tol * max|A|` for all in-band pairs.
    pub fn is_symmetric(&self, tol: f64) -> bool {
        self.asymmetry() <= tol * self.max_abs()
    }

    /// LU factorization with row interchanges restricted to the band.
    pub fn lu(&self) -> Result<BandedLu> {
        let mut a = self.clone();
        let (n, kl, ku) = (self.n, self.kl, self.ku);
        let threshold = f64::EPSILON * self.norm_inf();
        let mut pivots = vec![0; n];
        for k in 0..n {
            let last_row = (k + kl).min(n - 1);
            let last_col = (k + ku + kl).min(n - 1);
            let mut piv = k;
            let mut best = a.data[a.slot(k, k)].abs();
            for i in k + 1..=last_row {
                let v = a.data[a.slot(i, k)].abs();
                if v > best {
                    best = v;
                    piv = i;
                }
            }
            pivots[k] = piv;
            if !(best > threshold) {
                return Err(IfeError::SingularSystem {
                    row: k,
                    pivot: a.data[a.slot(piv, k)],
                });
            }
            if piv != k {
                for j in k..=last_col {
                    let (s, t) = (a.slot(k, j), a.slot(piv, j));
                    a.data.swap(s, t);
                }
            }
            let diag = a.data[a.slot(k, k)];
            for i in k + 1..=last_row {
                let si = a.slot(i, k);
                let l = a.data[si] / diag;
                a.data[si] = l;
                if l != 0.0 {
                    for j in k + 1..=last_col {
                        let u = a.data[a.slot(k, j)];
                        let s = a.slot(i, j);
                        a.data[s] -= l * u;
                    }
                }
            }
        }
        Ok(BandedLu {
            factors: a,
            pivots,
        })
    }

    /// Cholesky factorization `A = L Lᵀ` of a symmetric band
    /// (`kl == ku`). Fails with the offending row when a pivot is not
    /// positive.
    pub fn cholesky(&self) -> Result<BandedCholesky> {
        if self.kl != self.ku {
            return Err(IfeError::InvalidArgument(format!(
                "Cholesky needs a symmetric band, got kl={} ku={}",
                self.kl, self.ku
            )));
        }
        let (n, k) = (self.n, self.kl);
        let mut l = Self::zeros(n, k, 0);
        for i in 0..n {
            let first = i.saturating_sub(k);
            for j in first..=i {
                let mut sum = self.get(i, j);
                for m in first.max(j.saturating_sub(k))..j {
                    sum -= l.get(i, m) * l.get(j, m);
                }
                if i == j {
                    if !(sum > 0.0) {
                        return Err(IfeError::NotPositiveDefinite(i));
                    }
                    l.set(i, i, sum.sqrt());
                } else {
                    let v = sum / l.get(j, j);
                    l.set(i, j, v);
                }
            }
        }
        Ok(BandedCholesky { l })
    }

    /// Solves `A x = b` by banded LU.
    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        self.lu()?.solve(b)
    }
}

/// Packed LU factors and row interchanges of a [`BandedMatrix`].
#[derive(Debug, Clone)]
pub struct BandedLu {
    factors: BandedMatrix,
    pivots: Vec<usize>,
}

impl BandedLu {
    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        let a = &self.factors;
        let n = a.n;
        if b.len() != n {
            return Err(IfeError::InvalidArgument(format!(
                "right-hand side has length {}, expected {n}",
                b.len()
            )));
        }
        let mut x = b.to_vec();
        for k in 0..n {
            x.swap(k, self.pivots[k]);
            let xk = x[k];
            for i in k + 1..=(k + a.kl).min(n.saturating_sub(1)) {
                x[i] -= a.data[a.slot(i, k)] * xk;
            }
        }
        for i in (0..n).rev() {
            let mut sum = x[i];
            for j in i + 1..=(i + a.ku + a.kl).min(n - 1) {
                sum -= a.data[a.slot(i, j)] * x[j];
            }
            x[i] = sum / a.data[a.slot(i, i)];
        }
        Ok(x)
    }
}

/// Lower-triangular band factor of a symmetric positive definite matrix.
#[derive(Debug, Clone)]
pub struct BandedCholesky {
    l: BandedMatrix,
}

impl BandedCholesky {
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let l = &self.l;
        let (n, k) = (l.n, l.kl);
        let mut y = b.to_vec();
        for i in 0..n {
            let mut sum = y[i];
            for j in i.saturating_sub(k)..i {
                sum -= l.get(i, j) * y[j];
            }
            y[i] = sum / l.get(i, i);
        }
        for i in (0..n).rev() {
            let mut sum = y[i];
            for j in i + 1..(i + k + 1).min(n) {
                sum -= l.get(j, i) * y[j];
            }
            y[i] = sum / l.get(i, i);
        }
        y
    }
}

/// `‖A x - b‖∞ <= tol (‖A‖∞ ‖x‖∞ + ‖b‖∞)`.
pub fn residual_within(a: &BandedMatrix, x: &[f64], b: &[f64], tol: f64) -> bool {
    let ax = a.mul_vec(x);
    let res = ax
        .iter()
        .zip(b)
        .map(|(u, v)| (u - v).abs())
        .fold(0.0, f64::max);
    let xn = x.iter().map(|v| v.abs()).fold(0.0, f64::max);
    let bn = b.iter().map(|v| v.abs()).fold(0.0, f64::max);
    res <= tol * (a.norm_inf() * xn + bn)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dense_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
        let n = b.len();
        for k in 0..n {
            let p = (k..n)
                .max_by(|&i, &j| a[i][k].abs().total_cmp(&a[j][k].abs()))
                .unwrap();
            a.swap(k, p);
            b.swap(k, p);
            for i in k + 1..n {
                let l = a[i][k] / a[k][k];
                for j in k..n {
                    a[i][j] -= l * a[k][j];
                }
                b[i] -= l * b[k];
            }
        }
        let mut x = vec![0.0; n];
        for i in (0..n).rev() {
            let s: f64 = (i + 1..n).map(|j| a[i][j] * x[j]).sum();
            x[i] = (b[i] - s) / a[i][i];
        }
        x
    }

    #[test]
    fn identity_returns_rhs() {
        let mut a = BandedMatrix::zeros(5, 1, 1);
        for i in 0..5 {
            a.set(i, i, 1.0);
        }
        let b = [1.0, -2.0, 3.0, 0.5, 7.0];
        assert_eq!(a.solve(&b).unwrap(), b.to_vec());
    }

    #[test]
    fn pivoting_matches_dense() {
        // zero leading diagonal forces an interchange
        let n = 6;
        let mut a = BandedMatrix::zeros(n, 2, 1);
        let mut dense = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in i.saturating_sub(2)..(i + 2).min(n) {
                let v = if i == j && i % 2 == 0 {
                    0.0
                } else {
                    1.0 + (3 * i + 7 * j) as f64 % 5.0
                };
                a.set(i, j, v);
                dense[i][j] = v;
            }
        }
        let b: Vec<f64> = (0..n).map(|i| i as f64 - 2.5).collect();
        let x = a.solve(&b).unwrap();
        let y = dense_solve(dense, b.clone());
        for (u, v) in x.iter().zip(&y) {
            assert!((u - v).abs() < 1e-12 * (1.0 + v.abs()));
        }
        assert!(residual_within(&a, &x, &b, 1e-12));
    }

    #[test]
    fn singular_detected() {
        let mut a = BandedMatrix::zeros(3, 1, 1);
        a.set(0, 0, 1.0);
        a.set(0, 1, 2.0);
        a.set(1, 0, 2.0);
        a.set(1, 1, 4.0);
        a.set(2, 2, 1.0);
        assert!(matches!(a.lu(), Err(IfeError::SingularSystem { row: 1, .. })));
    }

    #[test]
    fn cholesky_tridiagonal() {
        let n = 7;
        let mut a = BandedMatrix::zeros(n, 1, 1);
        for i in 0..n {
            a.set(i, i, 2.0);
            if i + 1 < n {
                a.set(i, i + 1, -1.0);
                a.set(i + 1, i, -1.0);
            }
        }
        assert!(a.is_symmetric(0.0));
        let b = vec![1.0; n];
        let x = a.cholesky().unwrap().solve(&b);
        let y = a.solve(&b).unwrap();
        for (u, v) in x.iter().zip(&y) {
            assert!((u - v).abs() < 1e-12);
        }
        a.set(3, 3, -5.0);
        assert_eq!(a.cholesky().unwrap_err(), IfeError::NotPositiveDefinite(3));
    }

    #[test]
    #[should_panic(expected = "outside band")]
    fn out_of_band_add_panics() {
        BandedMatrix::zeros(4, 1, 1).add(0, 3, 1.0);
    }
}
