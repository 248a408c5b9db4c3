//! Sparse least-squares plumbing for the grid solvers: a row-compressed
//! system, banded Cholesky on its normal equations, and CGLS.

use crate::error::{GeomError, Result};

/// Symmetric positive definite matrix stored as its lower band.
#[derive(Clone, Debug)]
pub struct BandedSpd {
    n: usize,
    bw: usize,
    data: Vec<f64>,
}

impl BandedSpd {
    pub fn zeros(n: usize, bw: usize) -> Self {
        BandedSpd { n, bw, data: vec![0.0; n * (bw + 1)] }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn bandwidth(&self) -> usize {
        self.bw
    }

    fn slot(&self, i: usize, j: usize) -> usize {
        let (i, j) = if i >= j { (i, j) } else { (j, i) };
        debug_assert!(i - j <= self.bw, "entry ({i}, {j}) outside band {}", self.bw);
        i * (self.bw + 1) + (i - j)
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (hi, lo) = if i >= j { (i, j) } else { (j, i) };
        if hi - lo > self.bw {
            return 0.0;
        }
        self.data[self.slot(i, j)]
    }

    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let s = self.slot(i, j);
        self.data[s] += v;
    }

    /// In-place Cholesky factorization `A = L L^T`.
    pub fn factor(mut self) -> Result<BandCholesky> {
        let (n, bw) = (self.n, self.bw);
        let mut max_diag = 0.0f64;
        for i in 0..n {
            max_diag = max_diag.max(self.get(i, i));
        }
        for i in 0..n {
            let lo = i.saturating_sub(bw);
            for j in lo..=i {
                let mut s = self.data[self.slot(i, j)];
                for k in lo.max(j.saturating_sub(bw))..j {
                    s -= self.data[self.slot(i, k)] * self.data[self.slot(j, k)];
                }
                let idx = self.slot(i, j);
                if i == j {
                    if !(s > 1e-14 * max_diag) {
                        return Err(GeomError::RankDeficient);
                    }
                    self.data[idx] = s.sqrt();
                } else {
                    self.data[idx] = s / self.data[self.slot(j, j)];
                }
            }
        }
        Ok(BandCholesky { l: self })
    }
}

/// Lower-triangular banded Cholesky factor.
#[derive(Clone, Debug)]
pub struct BandCholesky {
    l: BandedSpd,
}

impl BandCholesky {
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let (n, bw) = (self.l.n, self.l.bw);
        let l = |i: usize, j: usize| self.l.data[self.l.slot(i, j)];
        let mut y = b.to_vec();
        for i in 0..n {
            let mut s = y[i];
            for k in i.saturating_sub(bw)..i {
                s -= l(i, k) * y[k];
            }
            y[i] = s / l(i, i);
        }
        for i in (0..n).rev() {
            let mut s = y[i];
            for k in (i + 1)..(i + bw + 1).min(n) {
                s -= l(k, i) * y[k];
            }
            y[i] = s / l(i, i);
        }
        y
    }
}

/// Overdetermined sparse linear system `J x ~ b`, one row per equation.
#[derive(Clone, Debug, Default)]
pub struct SparseLsq {
    cols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    vals: Vec<f64>,
    rhs: Vec<f64>,
}

impl SparseLsq {
    pub fn new(cols: usize) -> Self {
        SparseLsq { cols, row_ptr: vec![0], ..Default::default() }
    }

    pub fn rows(&self) -> usize {
        self.rhs.len()
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn rhs(&self) -> &[f64] {
        &self.rhs
    }

    /// Appends one equation `sum(coef * x[col]) = rhs`. Repeated columns
    /// are summed and zero coefficients dropped.
    pub fn push_row<I: IntoIterator<Item = (usize, f64)>>(&mut self, entries: I, rhs: f64) {
        let mut merged: Vec<(usize, f64)> = entries.into_iter().collect();
        merged.sort_by_key(|&(c, _)| c);
        let mut k = 0;
        while k < merged.len() {
            let c = merged[k].0;
            debug_assert!(c < self.cols);
            let mut v = 0.0;
            while k < merged.len() && merged[k].0 == c {
                v += merged[k].1;
                k += 1;
            }
            if v != 0.0 {
                self.col_idx.push(c);
                self.vals.push(v);
            }
        }
        self.row_ptr.push(self.col_idx.len());
        self.rhs.push(rhs);
    }

    fn row(&self, r: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let span = self.row_ptr[r]..self.row_ptr[r + 1];
        self.col_idx[span.clone()].iter().copied().zip(self.vals[span].iter().copied())
    }

    pub fn mul(&self, x: &[f64]) -> Vec<f64> {
        (0..self.rows()).map(|r| self.row(r).map(|(c, v)| v * x[c]).sum()).collect()
    }

    pub fn mul_t(&self, y: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.cols];
        for (r, &yr) in y.iter().enumerate() {
            for (c, v) in self.row(r) {
                out[c] += v * yr;
            }
        }
        out
    }

    /// `b - J x`.
    pub fn residual(&self, x: &[f64]) -> Vec<f64> {
        self.mul(x).iter().zip(&self.rhs).map(|(jx, b)| b - jx).collect()
    }

    /// Half-bandwidth of `J^T J`.
    pub fn normal_bandwidth(&self) -> usize {
        (0..self.rows())
            .map(|r| {
                let mut lo = usize::MAX;
                let mut hi = 0;
                for (c, _) in self.row(r) {
                    lo = lo.min(c);
                    hi = hi.max(c);
                }
                if lo == usize::MAX {
                    0
                } else {
                    hi - lo
                }
            })
            .max()
            .unwrap_or(0)
    }

    /// `(J^T J, J^T b)` with `J^T J` in band storage.
    pub fn normal_equations(&self) -> (BandedSpd, Vec<f64>) {
        let mut ata = BandedSpd::zeros(self.cols, self.normal_bandwidth());
        for r in 0..self.rows() {
            let entries: Vec<(usize, f64)> = self.row(r).collect();
            for (a, &(ca, va)) in entries.iter().enumerate() {
                for &(cb, vb) in &entries[..=a] {
                    ata.add(ca, cb, va * vb);
                }
            }
        }
        (ata, self.mul_t(&self.rhs))
    }

    /// Least-squares solution through the banded normal equations.
    pub fn solve_normal(&self) -> Result<Vec<f64>> {
        let (ata, atb) = self.normal_equations();
        Ok(ata.factor()?.solve(&atb))
    }

    /// Least-squares solution by conjugate gradients on the normal
    /// equations (CGLS), stopping when `|J^T r| <= tol |J^T b|`.
    pub fn solve_cgls(&self, tol: f64, max_iter: usize) -> Result<Vec<f64>> {
        let mut x = vec![0.0; self.cols];
        let mut r = self.rhs.clone();
        let mut s = self.mul_t(&r);
        let s0 = norm(&s);
        if s0 == 0.0 {
            return Ok(x);
        }
        let mut p = s.clone();
        let mut gamma = dot(&s, &s);
        for _ in 0..max_iter {
            let q = self.mul(&p);
            let qq = dot(&q, &q);
            if qq == 0.0 {
                return Err(GeomError::RankDeficient);
            }
            let alpha = gamma / qq;
            axpy(alpha, &p, &mut x);
            axpy(-alpha, &q, &mut r);
            s = self.mul_t(&r);
            let gamma_new = dot(&s, &s);
            if gamma_new.sqrt() <= tol * s0 {
                return Ok(x);
            }
            let beta = gamma_new / gamma;
            gamma = gamma_new;
            for (pi, si) in p.iter_mut().zip(&s) {
                *pi = si + beta * *pi;
            }
        }
        Err(GeomError::NotConverged { iterations: max_iter, residual: gamma.sqrt() / s0 })
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}
