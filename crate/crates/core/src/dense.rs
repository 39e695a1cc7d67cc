//! Small dense linear algebra: column-major matrices, vector helpers,
//! Gaussian elimination and Householder QR.

use crate::error::{check_len, Error, Result};

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// `y += alpha * x`
pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

pub fn scale(alpha: f64, x: &mut [f64]) {
    for xi in x.iter_mut() {
        *xi *= alpha;
    }
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn add(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

/// `‖a − b‖₂ / ‖b‖₂`, or the absolute difference when `b` is zero.
pub fn rel_diff(a: &[f64], b: &[f64]) -> f64 {
    let d = norm2(&sub(a, b));
    let nb = norm2(b);
    if nb == 0.0 {
        d
    } else {
        d / nb
    }
}

pub fn all_finite(a: &[f64]) -> bool {
    a.iter().all(|v| v.is_finite())
}

/// Column-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    nrows: usize,
    ncols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        Self {
            nrows,
            ncols,
            data: vec![0.0; nrows * ncols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_column_major(nrows: usize, ncols: usize, data: Vec<f64>) -> Result<Self> {
        check_len("dense matrix data", nrows * ncols, data.len())?;
        Ok(Self { nrows, ncols, data })
    }

    pub fn from_fn(nrows: usize, ncols: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(nrows * ncols);
        for j in 0..ncols {
            for i in 0..nrows {
                data.push(f(i, j));
            }
        }
        Self { nrows, ncols, data }
    }

    pub fn from_columns(nrows: usize, columns: &[Vec<f64>]) -> Result<Self> {
        let mut data = Vec::with_capacity(nrows * columns.len());
        for c in columns {
            check_len("dense matrix column", nrows, c.len())?;
            data.extend_from_slice(c);
        }
        Ok(Self {
            nrows,
            ncols: columns.len(),
            data,
        })
    }

    pub fn from_diagonal(d: &[f64]) -> Self {
        let mut m = Self::zeros(d.len(), d.len());
        for (i, &v) in d.iter().enumerate() {
            m[(i, i)] = v;
        }
        m
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn col(&self, j: usize) -> &[f64] {
        &self.data[j * self.nrows..(j + 1) * self.nrows]
    }

    pub fn col_mut(&mut self, j: usize) -> &mut [f64] {
        &mut self.data[j * self.nrows..(j + 1) * self.nrows]
    }

    pub fn row(&self, i: usize) -> Vec<f64> {
        (0..self.ncols).map(|j| self[(i, j)]).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.ncols, self.nrows, |i, j| self[(j, i)])
    }

    /// Keeps the leading `k` columns.
    pub fn leading_columns(&self, k: usize) -> Self {
        Self {
            nrows: self.nrows,
            ncols: k,
            data: self.data[..k * self.nrows].to_vec(),
        }
    }

    pub fn matvec(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_len("dense matvec", self.ncols, x.len())?;
        let mut y = vec![0.0; self.nrows];
        for (j, &xj) in x.iter().enumerate() {
            if xj != 0.0 {
                axpy(xj, self.col(j), &mut y);
            }
        }
        Ok(y)
    }

    pub fn matvec_transpose(&self, y: &[f64]) -> Result<Vec<f64>> {
        check_len("dense transpose matvec", self.nrows, y.len())?;
        Ok((0..self.ncols).map(|j| dot(self.col(j), y)).collect())
    }

    pub fn matmul(&self, other: &DenseMatrix) -> Result<DenseMatrix> {
        check_len("dense matmul", self.ncols, other.nrows)?;
        let mut out = DenseMatrix::zeros(self.nrows, other.ncols);
        for j in 0..other.ncols {
            let oc = other.col(j);
            let dst = &mut out.data[j * self.nrows..(j + 1) * self.nrows];
            for (p, &w) in oc.iter().enumerate() {
                if w != 0.0 {
                    axpy(w, &self.data[p * self.nrows..(p + 1) * self.nrows], dst);
                }
            }
        }
        Ok(out)
    }

    /// `selfᵀ · other`
    pub fn tr_matmul(&self, other: &DenseMatrix) -> Result<DenseMatrix> {
        check_len("dense transposed matmul", self.nrows, other.nrows)?;
        Ok(DenseMatrix::from_fn(self.ncols, other.ncols, |i, j| {
            dot(self.col(i), other.col(j))
        }))
    }

    pub fn add(&self, other: &DenseMatrix) -> Result<DenseMatrix> {
        check_len("dense add rows", self.nrows, other.nrows)?;
        check_len("dense add cols", self.ncols, other.ncols)?;
        Ok(DenseMatrix {
            nrows: self.nrows,
            ncols: self.ncols,
            data: add(&self.data, &other.data),
        })
    }

    pub fn sub(&self, other: &DenseMatrix) -> Result<DenseMatrix> {
        check_len("dense sub rows", self.nrows, other.nrows)?;
        check_len("dense sub cols", self.ncols, other.ncols)?;
        Ok(DenseMatrix {
            nrows: self.nrows,
            ncols: self.ncols,
            data: sub(&self.data, &other.data),
        })
    }

    pub fn scaled(&self, alpha: f64) -> DenseMatrix {
        DenseMatrix {
            nrows: self.nrows,
            ncols: self.ncols,
            data: self.data.iter().map(|v| alpha * v).collect(),
        }
    }

    /// Multiplies column `j` by `d[j]`.
    pub fn scale_columns(&self, d: &[f64]) -> Result<DenseMatrix> {
        check_len("column scaling", self.ncols, d.len())?;
        let mut out = self.clone();
        for (j, &s) in d.iter().enumerate() {
            scale(s, out.col_mut(j));
        }
        Ok(out)
    }

    pub fn frobenius_norm(&self) -> f64 {
        norm2(&self.data)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `‖self − selfᵀ‖_max`; panics-free for non-square input by returning infinity.
    pub fn asymmetry(&self) -> f64 {
        if self.nrows != self.ncols {
            return f64::INFINITY;
        }
        let mut worst = 0.0f64;
        for j in 0..self.ncols {
            for i in 0..j {
                worst = worst.max((self[(i, j)] - self[(j, i)]).abs());
            }
        }
        worst
    }

    /// `(S + Sᵀ) / 2`
    pub fn symmetrized(&self) -> DenseMatrix {
        DenseMatrix::from_fn(self.nrows, self.ncols, |i, j| {
            0.5 * (self[(i, j)] + self[(j, i)])
        })
    }

    /// `‖selfᵀself − I‖_max`
    pub fn orthonormality_error(&self) -> f64 {
        let mut worst = 0.0f64;
        for j in 0..self.ncols {
            for i in 0..=j {
                let g = dot(self.col(i), self.col(j));
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((g - target).abs());
            }
        }
        worst
    }

    /// Solves `self · X = B` by Gaussian elimination with partial pivoting.
    pub fn solve_matrix(&self, rhs: &DenseMatrix) -> Result<DenseMatrix> {
        check_len("linear solve (square)", self.nrows, self.ncols)?;
        check_len("linear solve rhs", self.nrows, rhs.nrows)?;
        let n = self.nrows;
        let mut a = self.clone();
        let mut b = rhs.clone();
        let scale_ref = a.max_abs().max(f64::MIN_POSITIVE);
        for k in 0..n {
            let (p, pv) = (k..n)
                .map(|i| (i, a[(i, k)].abs()))
                .fold((k, -1.0), |acc, c| if c.1 > acc.1 { c } else { acc });
            if pv <= f64::EPSILON * scale_ref * n as f64 {
                return Err(Error::Singular { column: k, pivot: pv });
            }
            if p != k {
                a.swap_rows(p, k);
                b.swap_rows(p, k);
            }
            // Column-oriented elimination keeps every update contiguous.
            let piv = a[(k, k)];
            let mut l = a.col(k)[k + 1..].to_vec();
            for f in l.iter_mut() {
                *f /= piv;
            }
            a.col_mut(k)[k + 1..].fill(0.0);
            for j in k + 1..n {
                let v = a[(k, j)];
                if v != 0.0 {
                    axpy(-v, &l, &mut a.col_mut(j)[k + 1..]);
                }
            }
            for j in 0..b.ncols {
                let v = b[(k, j)];
                if v != 0.0 {
                    axpy(-v, &l, &mut b.col_mut(j)[k + 1..]);
                }
            }
        }
        for j in 0..b.ncols {
            let bj = b.col_mut(j);
            for p in (0..n).rev() {
                bj[p] /= a[(p, p)];
                let x = bj[p];
                if x != 0.0 {
                    axpy(-x, &a.col(p)[..p], &mut bj[..p]);
                }
            }
        }
        Ok(b)
    }

    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        let b = DenseMatrix::from_column_major(rhs.len(), 1, rhs.to_vec())?;
        Ok(self.solve_matrix(&b)?.data)
    }

    pub fn inverse(&self) -> Result<DenseMatrix> {
        self.solve_matrix(&DenseMatrix::identity(self.nrows))
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        for j in 0..self.ncols {
            self.data.swap(j * self.nrows + a, j * self.nrows + b);
        }
    }

    /// Thin Householder QR; returns `Q` (`nrows × ncols`, orthonormal columns).
    /// Requires `nrows ≥ ncols`.
    pub fn householder_q(&self) -> Result<DenseMatrix> {
        let (m, n) = (self.nrows, self.ncols);
        if m < n {
            return Err(Error::invalid("householder QR needs nrows >= ncols"));
        }
        let mut r = self.clone();
        let mut reflectors: Vec<Vec<f64>> = Vec::with_capacity(n);
        for k in 0..n {
            let x = &r.col(k)[k..];
            let alpha = -x[0].signum() * norm2(x);
            let mut v = x.to_vec();
            v[0] -= alpha;
            let vn = norm2(&v);
            if vn > 0.0 {
                scale(1.0 / vn, &mut v);
            }
            for j in k..n {
                let c = &mut r.col_mut(j)[k..];
                let s = 2.0 * dot(&v, c);
                axpy(-s, &v, c);
            }
            reflectors.push(v);
        }
        let mut q = DenseMatrix::zeros(m, n);
        for j in 0..n {
            q[(j, j)] = 1.0;
        }
        for k in (0..n).rev() {
            let v = &reflectors[k];
            for j in 0..n {
                let c = &mut q.col_mut(j)[k..];
                let s = 2.0 * dot(v, c);
                axpy(-s, v, c);
            }
        }
        Ok(q)
    }
}

impl std::ops::Index<(usize, usize)> for DenseMatrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[j * self.nrows + i]
    }
}

impl std::ops::IndexMut<(usize, usize)> for DenseMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[j * self.nrows + i]
    }
}
