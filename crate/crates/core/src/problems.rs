//! Synthetic test problems.

use rand::Rng;

use crate::dense::{dot, norm2, DenseMatrix};
use crate::error::{Error, Result};
use crate::lowrank::gaussian_matrix;
use crate::operator::LinearOperator;
use crate::regularization::{solve_true, RegConfig};
use crate::rng;
use crate::sparse::SparseMatrix;

/// `U diag(ρ⁰, ρ¹, …) Vᵀ` with random orthonormal `U`, `V`.
pub fn decaying_spectrum_matrix(m: usize, n: usize, ratio: f64, seed: u64) -> DenseMatrix {
    let r = m.min(n);
    let sigma: Vec<f64> = (0..r).map(|i| ratio.powi(i as i32)).collect();
    with_spectrum(m, n, &sigma, seed)
}

/// `U diag(σ) Vᵀ` with random orthonormal `U` (`m × r`) and `V` (`n × r`).
pub fn with_spectrum(m: usize, n: usize, sigma: &[f64], seed: u64) -> DenseMatrix {
    let r = sigma.len();
    assert!(r <= m.min(n), "spectrum longer than min(m, n)");
    let u = gaussian_matrix(m, r, rng::derive_seed(seed, 1))
        .householder_q()
        .expect("gaussian matrix has full column rank");
    let v = gaussian_matrix(n, r, rng::derive_seed(seed, 2))
        .householder_q()
        .expect("gaussian matrix has full column rank");
    u.scale_columns(sigma)
        .and_then(|us| us.matmul(&v.transpose()))
        .expect("shapes agree")
}

/// Product of two Gaussian factors, rank `rank` almost surely.
pub fn exact_rank_matrix(m: usize, n: usize, rank: usize, seed: u64) -> DenseMatrix {
    let g1 = gaussian_matrix(m, rank, rng::derive_seed(seed, 3));
    let g2 = gaussian_matrix(n, rank, rng::derive_seed(seed, 4));
    g1.matmul(&g2.transpose())
        .expect("shapes agree")
        .scaled(1.0 / (rank as f64).sqrt())
}

/// Rows are sums of Gaussian bumps over a 2-D grid of unknowns, each bump
/// centred on a grid node. Entries below `sparsity_floor` are dropped.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticKernelConfig {
    pub nrows: usize,
    pub grid_rows: usize,
    pub grid_cols: usize,
    pub bumps_per_row: usize,
    /// Bump standard deviation range, in grid cells.
    pub width_range: (f64, f64),
    pub amplitude_range: (f64, f64),
    pub sparsity_floor: f64,
    /// Only grid rows in this half-open range carry sensitivity.
    pub active_rows: Option<(usize, usize)>,
    pub seed: u64,
}

impl Default for SyntheticKernelConfig {
    fn default() -> Self {
        Self {
            nrows: 500,
            grid_rows: 32,
            grid_cols: 32,
            bumps_per_row: 3,
            width_range: (4.0, 10.0),
            amplitude_range: (0.5, 1.5),
            sparsity_floor: 1e-14,
            active_rows: None,
            seed: 0,
        }
    }
}

impl SyntheticKernelConfig {
    pub fn ncols(&self) -> usize {
        self.grid_rows * self.grid_cols
    }

    fn validate(&self) -> Result<()> {
        if self.nrows == 0 || self.grid_rows == 0 || self.grid_cols == 0 || self.bumps_per_row == 0 {
            return Err(Error::invalid("kernel dimensions and bump count must be positive"));
        }
        let (w0, w1) = self.width_range;
        let (a0, a1) = self.amplitude_range;
        if !(w0 > 0.0 && w0 <= w1 && w1.is_finite()) {
            return Err(Error::invalid("bump widths must satisfy 0 < min <= max"));
        }
        if !(a0 > 0.0 && a0 <= a1 && a1.is_finite()) {
            return Err(Error::invalid("bump amplitudes must satisfy 0 < min <= max"));
        }
        if !(self.sparsity_floor.is_finite() && self.sparsity_floor >= 0.0) {
            return Err(Error::invalid("sparsity floor must be finite and non-negative"));
        }
        if let Some((lo, hi)) = self.active_rows {
            if lo >= hi || hi > self.grid_rows {
                return Err(Error::invalid("active grid rows must be a non-empty range inside the grid"));
            }
        }
        Ok(())
    }
}

fn uniform(r: &mut impl Rng, (lo, hi): (f64, f64)) -> f64 {
    if lo == hi {
        lo
    } else {
        r.random_range(lo..hi)
    }
}

/// Non-negative sensitivity kernel; every entry is at most
/// `bumps_per_row · max amplitude`.
pub fn gen_kernel_matrix(cfg: &SyntheticKernelConfig) -> Result<SparseMatrix> {
    cfg.validate()?;
    let (gr, gc) = (cfg.grid_rows, cfg.grid_cols);
    let (lo, hi) = cfg.active_rows.unwrap_or((0, gr));
    let rows = (0..cfg.nrows)
        .map(|i| {
            let mut r = rng::stream(cfg.seed, i as u64);
            let bumps: Vec<_> = (0..cfg.bumps_per_row)
                .map(|_| {
                    let cr = r.random_range(lo..hi) as f64;
                    let cc = r.random_range(0..gc) as f64;
                    let w = uniform(&mut r, cfg.width_range);
                    let a = uniform(&mut r, cfg.amplitude_range);
                    (cr, cc, 1.0 / (2.0 * w * w), a)
                })
                .collect();
            let mut row = Vec::new();
            for gy in lo..hi {
                for gx in 0..gc {
                    let v: f64 = bumps
                        .iter()
                        .map(|&(cr, cc, inv, a)| {
                            let d2 = (gy as f64 - cr).powi(2) + (gx as f64 - cc).powi(2);
                            a * (-d2 * inv).exp()
                        })
                        .sum();
                    if v > cfg.sparsity_floor && v > 0.0 {
                        row.push(((gy * gc + gx) as u32, v));
                    }
                }
            }
            row
        })
        .collect();
    SparseMatrix::from_rows(gr * gc, rows)
}

/// `b + level · (‖b‖/√m) · g` with standard normal `g`.
pub fn add_noise(b: &[f64], level: f64, seed: u64) -> Vec<f64> {
    let g = rng::gaussian_vec(seed, 0, b.len());
    let s = level * norm2(b) / (b.len().max(1) as f64).sqrt();
    b.iter().zip(g).map(|(v, e)| v + s * e).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckerboardConfig {
    pub grid_rows: usize,
    pub grid_cols: usize,
    pub cell: usize,
    pub amplitude: f64,
    /// Grid rows `[lo, hi)` carrying the pattern; zero elsewhere.
    pub band: (usize, usize),
}

impl CheckerboardConfig {
    fn in_band(&self, p: usize) -> bool {
        let r = p / self.grid_cols;
        r >= self.band.0 && r < self.band.1
    }
}

/// `±amplitude` cells inside the band, zero outside.
pub fn gen_checkerboard(cfg: &CheckerboardConfig) -> Result<Vec<f64>> {
    if cfg.grid_rows == 0 || cfg.grid_cols == 0 || cfg.cell == 0 {
        return Err(Error::invalid("checkerboard grid and cell size must be positive"));
    }
    if cfg.band.0 >= cfg.band.1 || cfg.band.1 > cfg.grid_rows {
        return Err(Error::invalid("checkerboard band must lie inside the grid"));
    }
    Ok((0..cfg.grid_rows * cfg.grid_cols)
        .map(|p| {
            let (r, c) = (p / cfg.grid_cols, p % cfg.grid_cols);
            if !cfg.in_band(p) {
                0.0
            } else if (r / cfg.cell + c / cfg.cell) % 2 == 0 {
                cfg.amplitude
            } else {
                -cfg.amplitude
            }
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckerboardResult {
    pub truth: Vec<f64>,
    pub recovered: Vec<f64>,
    /// Normalized correlation between truth and recovery inside the band.
    pub band_correlation: f64,
    /// `max |x| outside the band / max |x|`.
    pub leakage: f64,
}

/// Synthesizes `b = A x_chk`, solves the Tikhonov problem and scores the
/// recovery against the pattern.
pub fn checkerboard_experiment(
    a: &dyn LinearOperator,
    cfg: &CheckerboardConfig,
    reg: &RegConfig,
) -> Result<CheckerboardResult> {
    let truth = gen_checkerboard(cfg)?;
    crate::error::check_len("checkerboard size", a.ncols(), truth.len())?;
    let b = a.apply(&truth)?;
    let recovered = solve_true(a, &b, reg, None)?.solution;
    let (mut t_in, mut x_in) = (Vec::new(), Vec::new());
    let (mut out_max, mut all_max) = (0.0f64, 0.0f64);
    for (p, (&t, &x)) in truth.iter().zip(&recovered).enumerate() {
        all_max = all_max.max(x.abs());
        if cfg.in_band(p) {
            t_in.push(t);
            x_in.push(x);
        } else {
            out_max = out_max.max(x.abs());
        }
    }
    let denom = norm2(&t_in) * norm2(&x_in);
    Ok(CheckerboardResult {
        band_correlation: if denom > 0.0 { dot(&t_in, &x_in) / denom } else { 0.0 },
        leakage: if all_max > 0.0 { out_max / all_max } else { 0.0 },
        truth,
        recovered,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::dense_svd;

    #[test]
    fn decaying_spectrum_is_exact() {
        let a = decaying_spectrum_matrix(20, 14, 0.6, 1);
        let s = dense_svd(&a).unwrap().sigma;
        for (i, v) in s.iter().enumerate() {
            assert!((v - 0.6f64.powi(i as i32)).abs() < 1e-12);
        }
    }

    #[test]
    fn exact_rank_has_rank() {
        let s = dense_svd(&exact_rank_matrix(15, 20, 3, 2)).unwrap().sigma;
        assert!(s[2] > 1e-3 && s[3] < 1e-12 * s[0]);
    }

    #[test]
    fn kernel_is_reproducible_and_bounded() {
        let cfg = SyntheticKernelConfig {
            nrows: 20,
            grid_rows: 8,
            grid_cols: 8,
            seed: 3,
            ..Default::default()
        };
        let a = gen_kernel_matrix(&cfg).unwrap();
        assert_eq!(a, gen_kernel_matrix(&cfg).unwrap());
        assert_eq!((a.nrows(), a.ncols()), (20, 64));
        let cap = cfg.bumps_per_row as f64 * cfg.amplitude_range.1;
        for i in 0..20 {
            let (_, vals) = a.row(i);
            assert!(vals.iter().all(|&v| v > 0.0 && v <= cap));
        }
        let other = gen_kernel_matrix(&SyntheticKernelConfig { seed: 4, ..cfg }).unwrap();
        assert_ne!(a, other);
    }

    #[test]
    fn narrow_single_bump_is_one_entry() {
        let cfg = SyntheticKernelConfig {
            nrows: 30,
            grid_rows: 10,
            grid_cols: 12,
            bumps_per_row: 1,
            width_range: (1e-3, 1e-3),
            sparsity_floor: 1e-12,
            ..Default::default()
        };
        let a = gen_kernel_matrix(&cfg).unwrap();
        assert!(a.row_nnz().iter().all(|&c| c == 1));
    }

    #[test]
    fn kernel_respects_active_band() {
        let cfg = SyntheticKernelConfig {
            nrows: 10,
            grid_rows: 10,
            grid_cols: 6,
            active_rows: Some((3, 6)),
            ..Default::default()
        };
        let a = gen_kernel_matrix(&cfg).unwrap();
        for i in 0..10 {
            assert!(a.row(i).0.iter().all(|&c| (18..36).contains(&(c as usize))));
        }
        assert!(gen_kernel_matrix(&SyntheticKernelConfig {
            active_rows: Some((3, 11)),
            ..cfg
        })
        .is_err());
    }

    #[test]
    fn checkerboard_pattern() {
        let cfg = CheckerboardConfig {
            grid_rows: 6,
            grid_cols: 4,
            cell: 2,
            amplitude: 2.0,
            band: (2, 4),
        };
        let x = gen_checkerboard(&cfg).unwrap();
        assert_eq!(&x[8..12], &[-2.0, -2.0, 2.0, 2.0]);
        assert_eq!(&x[12..16], &[-2.0, -2.0, 2.0, 2.0]);
        assert!(x[..8].iter().chain(&x[16..]).all(|&v| v == 0.0));
    }

    #[test]
    fn noise_scales_with_level() {
        let b = vec![1.0; 100];
        assert_eq!(add_noise(&b, 0.0, 1), b);
        let n = add_noise(&b, 0.1, 1);
        let d: Vec<f64> = n.iter().map(|v| v - 1.0).collect();
        assert!((norm2(&d) / 10.0 - 0.1).abs() < 0.03);
    }
}
