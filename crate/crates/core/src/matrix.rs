//! Dense matrices and the primitive numerical operations built on them.
//!
//! Everything is plain row-major `Vec<f64>` storage; the design point is p in
//! the hundreds, where unblocked O(p^3) factorizations are perfectly adequate
//! and keep the solvers easy to audit. Symmetric matrices store the full
//! square but enforce exact (bitwise) symmetry through their constructors.

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};

/// Soft-threshold operator `sgn(x) * (|x| - t)_+`.
pub fn soft_threshold(x: f64, t: f64) -> f64 {
    debug_assert!(t >= 0.0);
    if x > t {
        x - t
    } else if x < -t {
        x + t
    } else {
        0.0
    }
}

/// Rectangular row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Mat {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch { expected: rows * cols, got: data.len() });
        }
        Ok(Mat { rows, cols, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn matmul(&self, other: &Mat) -> Mat {
        assert_eq!(self.cols, other.rows);
        let mut out = Mat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out.data[i * other.cols + j] += a * other.get(k, j);
                }
            }
        }
        out
    }

    pub fn transpose(&self) -> Mat {
        let mut out = Mat::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j));
            }
        }
        out
    }
}

/// Dense symmetric p x p matrix. Off-diagonal pairs are bitwise equal.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    p: usize,
    data: Vec<f64>,
}

impl SymMatrix {
    pub fn zeros(p: usize) -> Self {
        SymMatrix { p, data: vec![0.0; p * p] }
    }

    pub fn identity(p: usize) -> Self {
        let mut m = SymMatrix::zeros(p);
        for j in 0..p {
            m.data[j * p + j] = 1.0;
        }
        m
    }

    pub fn from_diag(diag: &[f64]) -> Self {
        let mut m = SymMatrix::zeros(diag.len());
        for (j, &d) in diag.iter().enumerate() {
            m.data[j * diag.len() + j] = d;
        }
        m
    }

    /// Builds from a full row-major buffer, verifying exact symmetry.
    pub fn from_flat(p: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != p * p {
            return Err(Error::DimensionMismatch { expected: p * p, got: data.len() });
        }
        for j in 0..p {
            for k in (j + 1)..p {
                if data[j * p + k] != data[k * p + j] {
                    return Err(Error::invalid("matrix is not symmetric"));
                }
            }
        }
        Ok(SymMatrix { p, data })
    }

    /// Builds from `f(j, k)` evaluated once per unordered pair (j <= k).
    pub fn from_fn(p: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = SymMatrix::zeros(p);
        for j in 0..p {
            for k in j..p {
                let v = f(j, k);
                m.data[j * p + k] = v;
                m.data[k * p + j] = v;
            }
        }
        m
    }

    pub fn p(&self) -> usize {
        self.p
    }

    #[inline]
    pub fn get(&self, j: usize, k: usize) -> f64 {
        self.data[j * self.p + k]
    }

    /// Sets entry (j,k) and its mirror.
    #[inline]
    pub fn set(&mut self, j: usize, k: usize, v: f64) {
        self.data[j * self.p + k] = v;
        self.data[k * self.p + j] = v;
    }

    #[inline]
    pub fn row(&self, j: usize) -> &[f64] {
        &self.data[j * self.p..(j + 1) * self.p]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn diag(&self) -> Vec<f64> {
        (0..self.p).map(|j| self.get(j, j)).collect()
    }

    pub fn add_to_diag(&mut self, d: f64) {
        for j in 0..self.p {
            self.data[j * self.p + j] += d;
        }
    }

    pub fn scale(&self, c: f64) -> SymMatrix {
        SymMatrix { p: self.p, data: self.data.iter().map(|v| c * v).collect() }
    }

    pub fn mean_abs_offdiag(&self) -> f64 {
        if self.p < 2 {
            return 0.0;
        }
        let mut s = 0.0;
        for j in 0..self.p {
            for k in 0..self.p {
                if j != k {
                    s += self.get(j, k).abs();
                }
            }
        }
        s / ((self.p * (self.p - 1)) as f64)
    }

    /// Sum of absolute values over all entries, diagonal included.
    pub fn one_norm(&self) -> f64 {
        self.data.iter().map(|v| v.abs()).sum()
    }

    /// Quadratic form d' M d (no positive-definiteness check).
    pub fn quad_form(&self, d: &[f64]) -> f64 {
        assert_eq!(d.len(), self.p);
        let mut total = 0.0;
        for j in 0..self.p {
            let row = self.row(j);
            let mut acc = 0.0;
            for k in 0..self.p {
                acc += row[k] * d[k];
            }
            total += d[j] * acc;
        }
        total
    }

    /// Matrix-vector product y = M x.
    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.p);
        (0..self.p)
            .map(|j| {
                let row = self.row(j);
                let mut acc = 0.0;
                for k in 0..self.p {
                    acc += row[k] * x[k];
                }
                acc
            })
            .collect()
    }

    pub fn trace_product(&self, other: &SymMatrix) -> f64 {
        assert_eq!(self.p, other.p);
        self.data.iter().zip(other.data.iter()).map(|(a, b)| a * b).sum()
    }

    pub fn cholesky(&self) -> Result<Cholesky> {
        Cholesky::factor(self)
    }

    /// Fails with the offending pivot unless the matrix is positive definite.
    pub fn require_pd(&self) -> Result<()> {
        self.cholesky().map(|_| ())
    }

    /// Eigenvalues by the cyclic Jacobi method, ascending.
    ///
    /// Plenty fast and accurate to near machine precision at the dense desk
    /// scales this crate targets.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let p = self.p;
        let mut a = self.data.clone();
        if p == 1 {
            return a;
        }
        let scale: f64 = self.data.iter().map(|v| v * v).sum::<f64>().sqrt().max(1.0);
        for _sweep in 0..64 {
            let mut off = 0.0;
            for j in 0..p {
                for k in (j + 1)..p {
                    off += a[j * p + k] * a[j * p + k];
                }
            }
            if off.sqrt() < 1e-14 * scale {
                break;
            }
            for j in 0..p {
                for k in (j + 1)..p {
                    let ajk = a[j * p + k];
                    if ajk == 0.0 {
                        continue;
                    }
                    let ajj = a[j * p + j];
                    let akk = a[k * p + k];
                    let theta = (akk - ajj) / (2.0 * ajk);
                    let t = if theta >= 0.0 {
                        1.0 / (theta + (1.0 + theta * theta).sqrt())
                    } else {
                        -1.0 / (-theta + (1.0 + theta * theta).sqrt())
                    };
                    let c = 1.0 / (1.0 + t * t).sqrt();
                    let s = t * c;
                    for i in 0..p {
                        let aij = a[i * p + j];
                        let aik = a[i * p + k];
                        a[i * p + j] = c * aij - s * aik;
                        a[i * p + k] = s * aij + c * aik;
                    }
                    for i in 0..p {
                        let aji = a[j * p + i];
                        let aki = a[k * p + i];
                        a[j * p + i] = c * aji - s * aki;
                        a[k * p + i] = s * aji + c * aki;
                    }
                }
            }
        }
        let mut eig: Vec<f64> = (0..p).map(|j| a[j * p + j]).collect();
        eig.sort_by(|x, y| x.partial_cmp(y).unwrap());
        eig
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues()[0]
    }
}

/// Mahalanobis distance (y - mu)' Theta (y - mu) for positive definite Theta.
pub fn mahalanobis(y: &[f64], mu: &[f64], theta: &SymMatrix) -> Result<f64> {
    if y.len() != theta.p() || mu.len() != theta.p() {
        return Err(Error::DimensionMismatch { expected: theta.p(), got: y.len() });
    }
    theta.require_pd()?;
    let d: Vec<f64> = y.iter().zip(mu).map(|(a, b)| a - b).collect();
    Ok(theta.quad_form(&d))
}

/// Lower-triangular Cholesky factor L with M = L L'.
#[derive(Debug, Clone)]
pub struct Cholesky {
    p: usize,
    l: Vec<f64>,
}

impl Cholesky {
    pub fn factor(m: &SymMatrix) -> Result<Self> {
        let p = m.p();
        let mut l = vec![0.0; p * p];
        for j in 0..p {
            for k in 0..=j {
                let mut s = m.get(j, k);
                for i in 0..k {
                    s -= l[j * p + i] * l[k * p + i];
                }
                if j == k {
                    if s <= 0.0 || !s.is_finite() {
                        return Err(Error::NotPositiveDefinite { pivot: j });
                    }
                    l[j * p + j] = s.sqrt();
                } else {
                    l[j * p + k] = s / l[k * p + k];
                }
            }
        }
        Ok(Cholesky { p, l })
    }

    pub fn p(&self) -> usize {
        self.p
    }

    #[inline]
    pub fn l(&self, j: usize, k: usize) -> f64 {
        self.l[j * self.p + k]
    }

    pub fn l_mat(&self) -> Mat {
        Mat { rows: self.p, cols: self.p, data: self.l.clone() }
    }

    pub fn logdet(&self) -> f64 {
        (0..self.p).map(|j| 2.0 * self.l[j * self.p + j].ln()).sum()
    }

    /// Solves L x = b.
    pub fn solve_l(&self, b: &[f64]) -> Vec<f64> {
        let p = self.p;
        let mut x = b.to_vec();
        for j in 0..p {
            for k in 0..j {
                x[j] -= self.l[j * p + k] * x[k];
            }
            x[j] /= self.l[j * p + j];
        }
        x
    }

    /// Solves L' x = b.
    pub fn solve_lt(&self, b: &[f64]) -> Vec<f64> {
        let p = self.p;
        let mut x = b.to_vec();
        for j in (0..p).rev() {
            for k in (j + 1)..p {
                x[j] -= self.l[k * p + j] * x[k];
            }
            x[j] /= self.l[j * p + j];
        }
        x
    }

    /// Solves (L L') x = b.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        self.solve_lt(&self.solve_l(b))
    }

    /// Inverse of the factored matrix, returned symmetric.
    pub fn inverse(&self) -> SymMatrix {
        let p = self.p;
        let mut inv = SymMatrix::zeros(p);
        for k in 0..p {
            let mut e = vec![0.0; p];
            e[k] = 1.0;
            let col = self.solve(&e);
            // Keeping only the lower part of each solve and mirroring makes
            // the result bitwise symmetric.
            for j in k..p {
                inv.set(j, k, col[j]);
            }
        }
        inv
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn max_abs_diff(a: &Mat, b: &SymMatrix) -> f64 {
        let mut m: f64 = 0.0;
        for j in 0..b.p() {
            for k in 0..b.p() {
                m = m.max((a.get(j, k) - b.get(j, k)).abs());
            }
        }
        m
    }

    #[test]
    fn soft_threshold_examples() {
        assert_eq!(soft_threshold(3.0, 1.0), 2.0);
        assert_eq!(soft_threshold(-0.5, 1.0), 0.0);
        assert_eq!(soft_threshold(-2.5, 1.0), -1.5);
    }

    #[test]
    fn mahalanobis_examples() {
        let theta = SymMatrix::identity(2);
        assert_eq!(mahalanobis(&[1.0, 3.0], &[1.0, 3.0], &theta).unwrap(), 0.0);
        assert_eq!(mahalanobis(&[1.0, 0.0], &[0.0, 0.0], &theta).unwrap(), 1.0);
        // Hand expansion: (1,1) [[2,-1],[-1,2]] (1,1)' = 2 - 1 - 1 + 2 = 2.
        let theta = SymMatrix::from_flat(2, vec![2.0, -1.0, -1.0, 2.0]).unwrap();
        assert_relative_eq!(
            mahalanobis(&[1.0, 1.0], &[0.0, 0.0], &theta).unwrap(),
            2.0,
            max_relative = 1e-14
        );
    }

    #[test]
    fn mahalanobis_rejects_indefinite() {
        let theta = SymMatrix::from_flat(2, vec![1.0, 2.0, 2.0, 1.0]).unwrap();
        match mahalanobis(&[1.0, 0.0], &[0.0, 0.0], &theta) {
            Err(Error::NotPositiveDefinite { pivot }) => assert_eq!(pivot, 1),
            other => panic!("expected PD violation, got {other:?}"),
        }
    }

    #[test]
    fn cholesky_identity_and_hand_factorization() {
        let c = SymMatrix::identity(3).cholesky().unwrap();
        for j in 0..3 {
            for k in 0..3 {
                assert_eq!(c.l(j, k), if j == k { 1.0 } else { 0.0 });
            }
        }
        // [[4,2],[2,5]] = [[2,0],[1,2]] [[2,1],[0,2]]
        let m = SymMatrix::from_flat(2, vec![4.0, 2.0, 2.0, 5.0]).unwrap();
        let c = m.cholesky().unwrap();
        assert_eq!(c.l(0, 0), 2.0);
        assert_eq!(c.l(1, 0), 1.0);
        assert_eq!(c.l(1, 1), 2.0);
        // Second pivot fails on an indefinite matrix.
        let bad = SymMatrix::from_flat(2, vec![1.0, 2.0, 2.0, 1.0]).unwrap();
        assert_eq!(bad.cholesky().unwrap_err(), Error::NotPositiveDefinite { pivot: 1 });
    }

    #[test]
    fn cholesky_reconstructs_well_conditioned_input() {
        let m = SymMatrix::from_fn(5, |j, k| if j == k { 2.0 + j as f64 } else { 0.3 / (1.0 + (j + k) as f64) });
        let c = m.cholesky().unwrap();
        let l = c.l_mat();
        let rec = l.matmul(&l.transpose());
        assert!(max_abs_diff(&rec, &m) < 1e-10);
    }

    #[test]
    fn solve_and_inverse_agree() {
        let m = SymMatrix::from_flat(3, vec![4.0, 1.0, 0.5, 1.0, 3.0, 0.2, 0.5, 0.2, 2.0]).unwrap();
        let c = m.cholesky().unwrap();
        let b = [1.0, -2.0, 0.5];
        let x = c.solve(&b);
        let back = m.mul_vec(&x);
        for (bi, bb) in back.iter().zip(b.iter()) {
            assert_relative_eq!(bi, bb, max_relative = 1e-12);
        }
        let inv = c.inverse();
        let prod = inv.mul_vec(&b);
        for (a, b) in prod.iter().zip(x.iter()) {
            assert_relative_eq!(a, b, max_relative = 1e-12);
        }
    }

    #[test]
    fn quad_form_matches_cholesky_route() {
        // Two routes: d' Theta d versus ||L' d||^2 with Theta = L L'.
        let theta =
            SymMatrix::from_flat(3, vec![2.0, -0.4, 0.1, -0.4, 1.5, -0.3, 0.1, -0.3, 1.0]).unwrap();
        let c = theta.cholesky().unwrap();
        let d = [0.7, -1.3, 2.1];
        let direct = theta.quad_form(&d);
        let mut lt_d = vec![0.0; 3];
        for j in 0..3 {
            for k in j..3 {
                lt_d[j] += c.l(k, j) * d[k];
            }
        }
        let via_chol: f64 = lt_d.iter().map(|v| v * v).sum();
        assert!((direct - via_chol).abs() < 1e-10);
    }

    #[test]
    fn jacobi_eigenvalues() {
        let m = SymMatrix::from_flat(2, vec![2.0, 1.0, 1.0, 2.0]).unwrap();
        let e = m.eigenvalues();
        assert_relative_eq!(e[0], 1.0, max_relative = 1e-12);
        assert_relative_eq!(e[1], 3.0, max_relative = 1e-12);
        // Trace and determinant checks on a random-ish 4x4.
        let m = SymMatrix::from_fn(4, |j, k| if j == k { 3.0 + j as f64 } else { 0.5 });
        let e = m.eigenvalues();
        let trace: f64 = m.diag().iter().sum();
        assert_relative_eq!(e.iter().sum::<f64>(), trace, max_relative = 1e-12);
        let logdet: f64 = e.iter().map(|v| v.ln()).sum();
        assert_relative_eq!(logdet, m.cholesky().unwrap().logdet(), max_relative = 1e-10);
    }
}
