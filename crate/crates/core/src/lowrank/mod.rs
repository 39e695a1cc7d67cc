//! Randomized rank-`k` SVD through the range of an operator.
//!
//! The pipeline samples `Y = A G`, orthonormalizes it into `Q`, forms the
//! small matrix `BBᵀ = Qᵀ A Aᵀ Q`, diagonalizes it and recovers
//! `U = Q Ũ`, `Σ = √D`, `vᵢ = Aᵀuᵢ / σᵢ`. Only `apply` and `apply_transpose`
//! of the operator are used, so raw, compressed and blocked operators all work.

mod io;

pub use io::{read_lowrank, write_lowrank, LRK_MAGIC};

use crate::dense::{axpy, dot, norm2, scale, DenseMatrix};
use crate::error::{check_len, Error, Result};
use crate::operator::LinearOperator;
use crate::par::{self, Execution};
use crate::rng;

/// Columns whose norm after projection drops below this fraction of the
/// original norm are treated as linearly dependent.
pub const RANK_TOLERANCE: f64 = 1e-12;

/// Below this `σ_k/σ₁` the eigenvalues of `BBᵀ` carry fewer than about eight
/// significant digits of `σ_k`.
pub const CONDITIONING_WARNING_RATIO: f64 = 1e-4;

/// Factors of `A_k = U_k Σ_k V_kᵀ`.
#[derive(Debug, Clone, PartialEq)]
pub struct LowRankSVD {
    u: DenseMatrix,
    sigma: Vec<f64>,
    v: DenseMatrix,
    seed: u64,
}

impl LowRankSVD {
    pub fn new(u: DenseMatrix, sigma: Vec<f64>, v: DenseMatrix, seed: u64) -> Result<Self> {
        let k = sigma.len();
        if k == 0 {
            return Err(Error::invalid("low-rank factors need at least one singular value"));
        }
        check_len("left factor columns", k, u.ncols())?;
        check_len("right factor columns", k, v.ncols())?;
        if sigma.iter().any(|s| !(s.is_finite() && *s > 0.0)) {
            return Err(Error::invalid("singular values must be finite and positive"));
        }
        if sigma.windows(2).any(|w| w[1] > w[0]) {
            return Err(Error::invalid("singular values must be sorted in descending order"));
        }
        if !crate::dense::all_finite(u.as_slice()) || !crate::dense::all_finite(v.as_slice()) {
            return Err(Error::NonFinite("low-rank factors"));
        }
        Ok(Self { u, sigma, v, seed })
    }

    pub fn k(&self) -> usize {
        self.sigma.len()
    }

    pub fn nrows(&self) -> usize {
        self.u.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.v.nrows()
    }

    pub fn u(&self) -> &DenseMatrix {
        &self.u
    }

    pub fn v(&self) -> &DenseMatrix {
        &self.v
    }

    pub fn sigma(&self) -> &[f64] {
        &self.sigma
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// The leading `k` triplets.
    pub fn truncate(&self, k: usize) -> Result<Self> {
        if k == 0 || k > self.k() {
            return Err(Error::invalid(format!(
                "cannot truncate rank {} factors to {k}",
                self.k()
            )));
        }
        Ok(Self {
            u: self.u.leading_columns(k),
            sigma: self.sigma[..k].to_vec(),
            v: self.v.leading_columns(k),
            seed: self.seed,
        })
    }

    /// `U (Σ (Vᵀ x))`
    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        let mut t = self.v.matvec_transpose(x)?;
        for (ti, s) in t.iter_mut().zip(&self.sigma) {
            *ti *= s;
        }
        self.u.matvec(&t)
    }

    /// `V (Σ (Uᵀ y))`
    pub fn apply_transpose(&self, y: &[f64]) -> Result<Vec<f64>> {
        let mut t = self.u.matvec_transpose(y)?;
        for (ti, s) in t.iter_mut().zip(&self.sigma) {
            *ti *= s;
        }
        self.v.matvec(&t)
    }

    /// `V (Σ² (Vᵀ x))`; `U` is not touched.
    pub fn apply_normal(&self, x: &[f64]) -> Result<Vec<f64>> {
        let mut t = self.v.matvec_transpose(x)?;
        for (ti, s) in t.iter_mut().zip(&self.sigma) {
            *ti *= s * s;
        }
        self.v.matvec(&t)
    }

    /// `max(‖UᵀU − I‖_max, ‖VᵀV − I‖_max)`
    pub fn orthonormality_error(&self) -> f64 {
        self.u
            .orthonormality_error()
            .max(self.v.orthonormality_error())
    }

    /// Dense `U Σ Vᵀ`, for small checks.
    pub fn to_dense(&self) -> DenseMatrix {
        let us = self.u.scale_columns(&self.sigma).expect("k columns");
        us.matmul(&self.v.transpose()).expect("conformal factors")
    }

    /// Warns when `σ_k/σ₁` is small enough that squaring it through `BBᵀ`
    /// destroys most of its significant digits.
    pub fn conditioning_warning(&self) -> Option<String> {
        let ratio = self.sigma[self.k() - 1] / self.sigma[0];
        (ratio < CONDITIONING_WARNING_RATIO).then(|| {
            format!(
                "sigma_k/sigma_1 = {ratio:.2e}; the eigenvalues of BB^T square this to {:.2e}, \
                 so the smallest singular values and their right vectors are inaccurate",
                ratio * ratio
            )
        })
    }
}

impl LinearOperator for LowRankSVD {
    fn nrows(&self) -> usize {
        LowRankSVD::nrows(self)
    }
    fn ncols(&self) -> usize {
        LowRankSVD::ncols(self)
    }
    fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        LowRankSVD::apply(self, x)
    }
    fn apply_transpose(&self, y: &[f64]) -> Result<Vec<f64>> {
        LowRankSVD::apply_transpose(self, y)
    }
    fn apply_normal(&self, x: &[f64]) -> Result<Vec<f64>> {
        LowRankSVD::apply_normal(self, x)
    }
}

/// Orthonormal basis of a sampled range.
#[derive(Debug, Clone, PartialEq)]
pub struct RangeBasis {
    pub q: DenseMatrix,
    pub seed: u64,
}

/// `nrows × ncols` standard normal matrix; column `j` is stream `j` of `seed`.
pub fn gaussian_matrix(nrows: usize, ncols: usize, seed: u64) -> DenseMatrix {
    let cols: Vec<Vec<f64>> = (0..ncols)
        .map(|j| rng::gaussian_vec(seed, j as u64, nrows))
        .collect();
    DenseMatrix::from_columns(nrows, &cols).expect("columns have nrows entries")
}

fn check_rank(op: &dyn LinearOperator, k: usize) -> Result<()> {
    let max = op.nrows().min(op.ncols());
    if k == 0 || k > max {
        return Err(Error::invalid(format!(
            "rank {k} is outside 1..={max} for a {}x{} operator",
            op.nrows(),
            op.ncols()
        )));
    }
    Ok(())
}

/// `Y = A G` with `G` from [`gaussian_matrix`].
pub fn sample_range(op: &dyn LinearOperator, k: usize, seed: u64) -> Result<DenseMatrix> {
    sample_range_with(op, k, seed, Execution::default())
}

pub fn sample_range_with(
    op: &dyn LinearOperator,
    k: usize,
    seed: u64,
    exec: Execution,
) -> Result<DenseMatrix> {
    check_rank(op, k)?;
    let n = op.ncols();
    let cols = par::map_range(exec, k, |j| op.apply(&rng::gaussian_vec(seed, j as u64, n)))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    DenseMatrix::from_columns(op.nrows(), &cols)
}

/// `passes` sweeps of modified Gram–Schmidt over the columns of `y`.
pub fn modified_gram_schmidt(y: &DenseMatrix, passes: usize) -> Result<DenseMatrix> {
    let mut q = y.clone();
    for _ in 0..passes {
        for j in 0..q.ncols() {
            let mut v = q.col(j).to_vec();
            let before = norm2(&v);
            for i in 0..j {
                let qi = q.col(i);
                let r = dot(qi, &v);
                axpy(-r, qi, &mut v);
            }
            let after = norm2(&v);
            if !(after > RANK_TOLERANCE * before) {
                return Err(Error::RankDeficient {
                    column: j,
                    relative_norm: if before > 0.0 { after / before } else { 0.0 },
                });
            }
            scale(1.0 / after, &mut v);
            q.col_mut(j).copy_from_slice(&v);
        }
    }
    Ok(q)
}

/// Two full modified Gram–Schmidt sweeps.
pub fn orthogonalize_twice(y: &DenseMatrix, seed: u64) -> Result<RangeBasis> {
    Ok(RangeBasis {
        q: modified_gram_schmidt(y, 2)?,
        seed,
    })
}

/// `Qᵀ A Aᵀ Q` assembled column by column, before symmetrization.
pub fn build_bbt_unsymmetrized(
    op: &dyn LinearOperator,
    basis: &RangeBasis,
    exec: Execution,
) -> Result<DenseMatrix> {
    let q = &basis.q;
    check_len("range basis rows", op.nrows(), q.nrows())?;
    let cols = par::map_range(exec, q.ncols(), |j| {
        let z = op.apply(&op.apply_transpose(q.col(j))?)?;
        q.matvec_transpose(&z)
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    DenseMatrix::from_columns(q.ncols(), &cols)
}

/// `BBᵀ = Qᵀ A Aᵀ Q`, symmetrized as `(S + Sᵀ)/2`.
pub fn build_bbt(op: &dyn LinearOperator, basis: &RangeBasis) -> Result<DenseMatrix> {
    Ok(build_bbt_unsymmetrized(op, basis, Execution::default())?.symmetrized())
}

/// Cyclic Jacobi eigendecomposition of a symmetric matrix. Eigenvalues are
/// returned in descending order with eigenvectors as matching columns.
pub fn symmetric_eig(s: &DenseMatrix) -> Result<(Vec<f64>, DenseMatrix)> {
    check_len("eigenproblem (square)", s.nrows(), s.ncols())?;
    if !crate::dense::all_finite(s.as_slice()) {
        return Err(Error::NonFinite("eigenproblem input"));
    }
    let asym = s.asymmetry();
    if asym > 1e-10 * s.max_abs().max(f64::MIN_POSITIVE) {
        return Err(Error::NotSymmetric { asymmetry: asym });
    }
    let n = s.nrows();
    let mut a = s.symmetrized();
    let mut v = DenseMatrix::identity(n);
    let target = 1e-12 * s.frobenius_norm();
    let off = |a: &DenseMatrix| {
        let mut t = 0.0;
        for j in 0..n {
            for i in 0..n {
                if i != j {
                    t += a[(i, j)] * a[(i, j)];
                }
            }
        }
        t.sqrt()
    };
    for _sweep in 0..100 {
        if off(&a) <= target {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let sn = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[(k, p)], a[(k, q)]);
                    a[(k, p)] = c * akp - sn * akq;
                    a[(k, q)] = sn * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[(p, k)], a[(q, k)]);
                    a[(p, k)] = c * apk - sn * aqk;
                    a[(q, k)] = sn * apk + c * aqk;
                }
                for k in 0..n {
                    let (vkp, vkq) = (v[(k, p)], v[(k, q)]);
                    v[(k, p)] = c * vkp - sn * vkq;
                    v[(k, q)] = sn * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].total_cmp(&a[(i, i)]));
    let values = order.iter().map(|&i| a[(i, i)]).collect();
    let cols: Vec<Vec<f64>> = order.iter().map(|&i| v.col(i).to_vec()).collect();
    Ok((values, DenseMatrix::from_columns(n, &cols)?))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SvdOptions {
    /// Extra samples beyond `k`; the extra triplets are discarded.
    pub oversample: usize,
    /// Singular values below `sigma_cutoff · σ₁` are dropped.
    pub sigma_cutoff: f64,
    pub exec: Execution,
}

impl Default for SvdOptions {
    fn default() -> Self {
        Self {
            oversample: 0,
            sigma_cutoff: 1e-8,
            exec: Execution::default(),
        }
    }
}

pub fn randomized_lowrank_svd(
    op: &dyn LinearOperator,
    k: usize,
    seed: u64,
    opts: &SvdOptions,
) -> Result<LowRankSVD> {
    check_rank(op, k)?;
    let l = k + opts.oversample;
    check_rank(op, l)?;
    if !(opts.sigma_cutoff.is_finite() && opts.sigma_cutoff >= 0.0) {
        return Err(Error::invalid("sigma cutoff must be finite and non-negative"));
    }
    let y = sample_range_with(op, l, seed, opts.exec)?;
    let basis = orthogonalize_twice(&y, seed)?;
    let bbt = build_bbt_unsymmetrized(op, &basis, opts.exec)?.symmetrized();
    let (lambda, ut) = symmetric_eig(&bbt)?;
    let top = lambda[0].max(0.0).sqrt();
    let keep = lambda[..k]
        .iter()
        .take_while(|&&l| l > 0.0 && l.sqrt() > opts.sigma_cutoff * top)
        .count();
    if keep == 0 {
        return Err(Error::NoSignificantSingularValues {
            cutoff: opts.sigma_cutoff,
        });
    }
    let sigma: Vec<f64> = lambda[..keep].iter().map(|l| l.sqrt()).collect();
    let u = basis.q.matmul(&ut.leading_columns(keep))?;
    let vcols = par::map_range(opts.exec, keep, |i| {
        let mut vi = op.apply_transpose(u.col(i))?;
        scale(1.0 / sigma[i], &mut vi);
        Ok(vi)
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let v = DenseMatrix::from_columns(op.ncols(), &vcols)?;
    LowRankSVD::new(u, sigma, v, seed)
}
