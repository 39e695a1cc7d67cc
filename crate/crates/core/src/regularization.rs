//! Tikhonov and Laplacian-smoothed least squares.
//!
//! Every scheme reduces to conjugate gradients on
//! `(AᵀA + λ₁I + λ₂LᵀL) x = rhs` for some operator standing in for `A`,
//! except the `k × k` scheme, which is solved directly, and ISTA.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use crate::dense::{axpy, dot, norm2, scale, DenseMatrix};
use crate::error::{check_len, Error, Result};
use crate::lowrank::LowRankSVD;
use crate::operator::LinearOperator;
use crate::wavelet::soft_threshold;

/// Residual entries beyond this many standard errors are outliers.
pub const OUTLIER_SIGMAS: f64 = 3.0;

/// 5-point Laplacian on a `rows × cols` grid with zero-flux boundaries: each
/// node gets `−(number of neighbours)` on the diagonal and `+1` per
/// neighbour, so every row sums to zero. Grid node `(r, c)` is entry
/// `r · cols + c`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LaplacianOperator {
    rows: usize,
    cols: usize,
}

impl LaplacianOperator {
    pub fn new(rows: usize, cols: usize) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::invalid("laplacian grid must be non-empty"));
        }
        Ok(Self { rows, cols })
    }

    pub fn grid_shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn len(&self) -> usize {
        self.rows * self.cols
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn laplace(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_len("laplacian input", self.len(), x.len())?;
        let (nr, nc) = (self.rows, self.cols);
        let mut y = vec![0.0; x.len()];
        for r in 0..nr {
            for c in 0..nc {
                let p = r * nc + c;
                let mut acc = 0.0;
                if r > 0 {
                    acc += x[p - nc] - x[p];
                }
                if r + 1 < nr {
                    acc += x[p + nc] - x[p];
                }
                if c > 0 {
                    acc += x[p - 1] - x[p];
                }
                if c + 1 < nc {
                    acc += x[p + 1] - x[p];
                }
                y[p] = acc;
            }
        }
        Ok(y)
    }
}

impl LinearOperator for LaplacianOperator {
    fn nrows(&self) -> usize {
        self.len()
    }
    fn ncols(&self) -> usize {
        self.len()
    }
    fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.laplace(x)
    }
    fn apply_transpose(&self, y: &[f64]) -> Result<Vec<f64>> {
        self.laplace(y)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegConfig {
    pub lambda1: f64,
    pub lambda2: f64,
    /// Required when `lambda2 > 0`.
    pub laplacian: Option<LaplacianOperator>,
    pub max_iters: usize,
    /// Stop once `‖r‖ ≤ cg_tol · ‖rhs‖`.
    pub cg_tol: f64,
    /// Iterations after which the outlier mask is refreshed.
    pub outlier_checkpoints: Vec<usize>,
}

impl Default for RegConfig {
    fn default() -> Self {
        Self {
            lambda1: 0.0,
            lambda2: 0.0,
            laplacian: None,
            max_iters: 500,
            cg_tol: 1e-8,
            outlier_checkpoints: vec![5, 25],
        }
    }
}

impl RegConfig {
    pub fn tikhonov(lambda: f64) -> Self {
        Self {
            lambda1: lambda,
            ..Self::default()
        }
    }

    pub fn with_smoothing(mut self, lambda2: f64, laplacian: LaplacianOperator) -> Self {
        self.lambda2 = lambda2;
        self.laplacian = Some(laplacian);
        self
    }

    pub fn with_tolerance(mut self, cg_tol: f64, max_iters: usize) -> Self {
        self.cg_tol = cg_tol;
        self.max_iters = max_iters;
        self
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        for (name, v) in [("lambda1", self.lambda1), ("lambda2", self.lambda2)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::invalid(format!("{name} must be finite and non-negative, got {v}")));
            }
        }
        if !(self.cg_tol.is_finite() && self.cg_tol >= 0.0) {
            return Err(Error::invalid("cg tolerance must be finite and non-negative"));
        }
        if self.max_iters == 0 {
            return Err(Error::invalid("max_iters must be at least 1"));
        }
        if self.lambda2 > 0.0 {
            let l = self
                .laplacian
                .ok_or_else(|| Error::invalid("lambda2 > 0 needs a laplacian grid"))?;
            check_len("laplacian grid size", n, l.len())?;
        }
        Ok(())
    }

    /// `x ↦ N x + λ₁x + λ₂LᵀLx` for a given normal product `N x`.
    fn regularize(&self, x: &[f64], mut nx: Vec<f64>) -> Result<Vec<f64>> {
        if self.lambda1 != 0.0 {
            axpy(self.lambda1, x, &mut nx);
        }
        if self.lambda2 != 0.0 {
            let l = self.laplacian.expect("validated");
            axpy(self.lambda2, &l.laplace(&l.laplace(x)?)?, &mut nx);
        }
        Ok(nx)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    True,
    X1,
    X1Hat,
    X2,
    X3,
    Ista,
    Cg,
}

impl Scheme {
    pub fn name(self) -> &'static str {
        match self {
            Scheme::True => "true",
            Scheme::X1 => "x1",
            Scheme::X1Hat => "x1hat",
            Scheme::X2 => "x2",
            Scheme::X3 => "x3",
            Scheme::Ista => "ista",
            Scheme::Cg => "cg",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "true" => Scheme::True,
            "x1" => Scheme::X1,
            "x1hat" => Scheme::X1Hat,
            "x2" => Scheme::X2,
            "x3" => Scheme::X3,
            "ista" => Scheme::Ista,
            "cg" => Scheme::Cg,
            _ => return Err(Error::invalid(format!("unknown scheme {s:?}"))),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IterationRecord {
    pub iteration: usize,
    pub solution_norm: f64,
    pub chi2: Option<f64>,
    /// CG: `‖r‖/‖rhs‖`. ISTA: `‖xⁿ⁺¹ − xⁿ‖/‖xⁿ⁺¹‖`.
    pub residual: f64,
    /// ISTA only: nonzeros in the iterate.
    pub support: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutlierEvent {
    pub iteration: usize,
    pub newly_flagged: usize,
    pub p: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub scheme: Scheme,
    pub solution: Vec<f64>,
    pub iterations: Vec<IterationRecord>,
    /// One flag per data row; empty when no residual was tracked.
    pub outlier_mask: Vec<bool>,
    /// Data rows that are not outliers.
    pub p: usize,
    pub outlier_events: Vec<OutlierEvent>,
    pub converged: bool,
    pub lambda1: f64,
    pub lambda2: f64,
    pub max_iters: usize,
    pub tolerance: f64,
}

impl SolveReport {
    fn new(scheme: Scheme, solution: Vec<f64>, cfg: &RegConfig) -> Self {
        Self {
            scheme,
            solution,
            iterations: Vec::new(),
            outlier_mask: Vec::new(),
            p: 0,
            outlier_events: Vec::new(),
            converged: false,
            lambda1: cfg.lambda1,
            lambda2: cfg.lambda2,
            max_iters: cfg.max_iters,
            tolerance: cfg.cg_tol,
        }
    }

    /// `iteration,solution_norm,chi2,cg_residual,support`
    pub fn write_csv<W: Write>(&self, w: &mut W) -> Result<()> {
        writeln!(w, "iteration,solution_norm,chi2,cg_residual,support")?;
        for r in &self.iterations {
            let chi2 = r.chi2.map(|v| format!("{v:e}")).unwrap_or_default();
            let support = r.support.map(|v| v.to_string()).unwrap_or_default();
            writeln!(
                w,
                "{},{:e},{},{:e},{}",
                r.iteration, r.solution_norm, chi2, r.residual, support
            )?;
        }
        Ok(())
    }
}

/// Data-space residual tracking: `r = op·x − b` each iteration.
#[derive(Clone, Copy)]
pub struct ResidualMonitor<'a> {
    pub op: &'a dyn LinearOperator,
    pub b: &'a [f64],
}

/// Marks residual entries beyond three standard errors (unit errors assumed).
pub fn update_outliers(residual: &[f64]) -> Vec<bool> {
    residual.iter().map(|r| r.abs() > OUTLIER_SIGMAS).collect()
}

/// `(1/P) Σ_{k not outlier} r_k²`
pub fn chi_squared(residual: &[f64], outlier_mask: &[bool]) -> Result<f64> {
    check_len("outlier mask", residual.len(), outlier_mask.len())?;
    if !crate::dense::all_finite(residual) {
        return Err(Error::NonFinite("residual"));
    }
    let (sum, p) = residual
        .iter()
        .zip(outlier_mask)
        .filter(|(_, &o)| !o)
        .fold((0.0, 0usize), |(s, p), (r, _)| (s + r * r, p + 1));
    if p == 0 {
        return Err(Error::AllOutliers);
    }
    Ok(sum / p as f64)
}

struct Tracker<'a> {
    monitor: Option<ResidualMonitor<'a>>,
    checkpoints: &'a [usize],
    mask: Vec<bool>,
    events: Vec<OutlierEvent>,
}

impl<'a> Tracker<'a> {
    fn new(monitor: Option<ResidualMonitor<'a>>, checkpoints: &'a [usize], n: usize) -> Result<Self> {
        if let Some(m) = &monitor {
            check_len("monitor operator columns", n, m.op.ncols())?;
            check_len("monitor data", m.op.nrows(), m.b.len())?;
        }
        let rows = monitor.map_or(0, |m| m.b.len());
        Ok(Self {
            monitor,
            checkpoints,
            mask: vec![false; rows],
            events: Vec::new(),
        })
    }

    fn observe(&mut self, iteration: usize, x: &[f64]) -> Result<Option<f64>> {
        let Some(m) = self.monitor else {
            return Ok(None);
        };
        let mut r = m.op.apply(x)?;
        axpy(-1.0, m.b, &mut r);
        if self.checkpoints.contains(&iteration) {
            let fresh = update_outliers(&r);
            let mut newly = 0;
            for (old, new) in self.mask.iter_mut().zip(fresh) {
                if new && !*old {
                    *old = true;
                    newly += 1;
                }
            }
            self.events.push(OutlierEvent {
                iteration,
                newly_flagged: newly,
                p: self.p(),
            });
        }
        chi_squared(&r, &self.mask).map(Some)
    }

    fn p(&self) -> usize {
        self.mask.iter().filter(|&&o| !o).count()
    }

    fn finish(self, report: &mut SolveReport) {
        report.p = self.p();
        report.outlier_mask = self.mask;
        report.outlier_events = self.events;
    }
}

/// Conjugate gradients on `(AᵀA + λ₁I + λ₂LᵀL) x = rhs` where `AᵀA` is
/// `op.apply_normal`. Fails on non-positive curvature, which is how an
/// unregularized singular system shows up.
pub fn cg_normal_solve(
    op: &dyn LinearOperator,
    rhs: &[f64],
    cfg: &RegConfig,
    monitor: Option<ResidualMonitor<'_>>,
) -> Result<SolveReport> {
    cg_solve_scheme(Scheme::Cg, op, rhs, cfg, monitor)
}

fn cg_solve_scheme(
    scheme: Scheme,
    op: &dyn LinearOperator,
    rhs: &[f64],
    cfg: &RegConfig,
    monitor: Option<ResidualMonitor<'_>>,
) -> Result<SolveReport> {
    let n = op.ncols();
    check_len("normal equations rhs", n, rhs.len())?;
    cfg.validate(n)?;
    if !crate::dense::all_finite(rhs) {
        return Err(Error::NonFinite("right-hand side"));
    }
    let mut tracker = Tracker::new(monitor, &cfg.outlier_checkpoints, n)?;
    let mut x = vec![0.0; n];
    let mut report = SolveReport::new(scheme, Vec::new(), cfg);
    let bnorm = norm2(rhs);
    if bnorm == 0.0 {
        report.converged = true;
        tracker.finish(&mut report);
        report.solution = x;
        return Ok(report);
    }
    let mut r = rhs.to_vec();
    let mut p = r.clone();
    let mut rr = dot(&r, &r);
    for it in 1..=cfg.max_iters {
        let q = cfg.regularize(&p, op.apply_normal(&p)?)?;
        let curvature = dot(&p, &q);
        if !curvature.is_finite() {
            return Err(Error::NonFinite("conjugate gradient curvature"));
        }
        if curvature <= 0.0 {
            return Err(Error::Indefinite {
                iteration: it,
                curvature,
            });
        }
        let alpha = rr / curvature;
        axpy(alpha, &p, &mut x);
        axpy(-alpha, &q, &mut r);
        let rr_new = dot(&r, &r);
        if !rr_new.is_finite() || !crate::dense::all_finite(&x) {
            return Err(Error::NonFinite("conjugate gradient iterate"));
        }
        let rel = rr_new.sqrt() / bnorm;
        let chi2 = tracker.observe(it, &x)?;
        report.iterations.push(IterationRecord {
            iteration: it,
            solution_norm: norm2(&x),
            chi2,
            residual: rel,
            support: None,
        });
        if rel <= cfg.cg_tol || rr_new == 0.0 {
            report.converged = true;
            break;
        }
        let beta = rr_new / rr;
        rr = rr_new;
        for (pi, ri) in p.iter_mut().zip(&r) {
            *pi = ri + beta * *pi;
        }
    }
    tracker.finish(&mut report);
    report.solution = x;
    Ok(report)
}

/// `(AᵀA + λ₁I + λ₂LᵀL) x̄ = Aᵀb`
pub fn solve_true(
    a: &dyn LinearOperator,
    b: &[f64],
    cfg: &RegConfig,
    monitor: Option<ResidualMonitor<'_>>,
) -> Result<SolveReport> {
    check_len("data vector", a.nrows(), b.len())?;
    let rhs = a.apply_transpose(b)?;
    cg_solve_scheme(Scheme::True, a, &rhs, cfg, monitor)
}

/// `(V_kΣ²V_kᵀ + λ₁I + λ₂LᵀL) x̃₁ = V_kΣ_kU_kᵀ b`
pub fn solve_scheme_x1(
    f: &LowRankSVD,
    b: &[f64],
    cfg: &RegConfig,
    monitor: Option<ResidualMonitor<'_>>,
) -> Result<SolveReport> {
    let rhs = f.apply_transpose(b)?;
    cg_solve_scheme(Scheme::X1, f, &rhs, cfg, monitor)
}

/// As [`solve_scheme_x1`] with the right-hand side `Aᵀb` from `a`.
pub fn solve_scheme_x1hat(
    f: &LowRankSVD,
    a: &dyn LinearOperator,
    b: &[f64],
    cfg: &RegConfig,
    monitor: Option<ResidualMonitor<'_>>,
) -> Result<SolveReport> {
    check_len("operator columns", f.ncols(), a.ncols())?;
    let rhs = a.apply_transpose(b)?;
    cg_solve_scheme(Scheme::X1Hat, f, &rhs, cfg, monitor)
}

/// One block `S_j x = c_j` of a projected system, stored as `S_jᵀ`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectedBlock {
    rows_t: DenseMatrix,
    rhs: Vec<f64>,
}

impl ProjectedBlock {
    /// `Σ_kV_kᵀ x = U_kᵀ b_j`
    pub fn from_factors(f: &LowRankSVD, b: &[f64]) -> Result<Self> {
        check_len("block data", f.nrows(), b.len())?;
        Ok(Self {
            rows_t: f.v().scale_columns(f.sigma())?,
            rhs: f.u().matvec_transpose(b)?,
        })
    }

    /// `U_kᵀA_j x = U_kᵀ b_j`, with `U_kᵀA_j` formed by `k` transpose products.
    pub fn from_operator(a: &dyn LinearOperator, u: &DenseMatrix, b: &[f64]) -> Result<Self> {
        check_len("block basis rows", a.nrows(), u.nrows())?;
        check_len("block data", a.nrows(), b.len())?;
        let cols = (0..u.ncols())
            .map(|i| a.apply_transpose(u.col(i)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            rows_t: DenseMatrix::from_columns(a.ncols(), &cols)?,
            rhs: u.matvec_transpose(b)?,
        })
    }

    pub fn k(&self) -> usize {
        self.rhs.len()
    }
}

/// The stacked projected blocks as one operator.
struct ProjectedSystem<'a> {
    blocks: &'a [ProjectedBlock],
    n: usize,
}

impl LinearOperator for ProjectedSystem<'_> {
    fn nrows(&self) -> usize {
        self.blocks.iter().map(ProjectedBlock::k).sum()
    }
    fn ncols(&self) -> usize {
        self.n
    }
    fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        let mut out = Vec::with_capacity(self.nrows());
        for b in self.blocks {
            out.extend(b.rows_t.matvec_transpose(x)?);
        }
        Ok(out)
    }
    fn apply_transpose(&self, y: &[f64]) -> Result<Vec<f64>> {
        check_len("projected system data", self.nrows(), y.len())?;
        let mut out = vec![0.0; self.n];
        let mut at = 0;
        for b in self.blocks {
            let part = b.rows_t.matvec(&y[at..at + b.k()])?;
            at += b.k();
            axpy(1.0, &part, &mut out);
        }
        Ok(out)
    }
}

/// Tikhonov solution of the stacked projected system `S x = c`.
pub fn solve_scheme_x2(
    blocks: &[ProjectedBlock],
    cfg: &RegConfig,
    monitor: Option<ResidualMonitor<'_>>,
) -> Result<SolveReport> {
    let first = blocks
        .first()
        .ok_or_else(|| Error::invalid("projected system needs at least one block"))?;
    let n = first.rows_t.nrows();
    for b in blocks {
        check_len("projected block width", n, b.rows_t.nrows())?;
    }
    let sys = ProjectedSystem { blocks, n };
    let c: Vec<f64> = blocks.iter().flat_map(|b| b.rhs.iter().copied()).collect();
    let rhs = sys.apply_transpose(&c)?;
    cg_solve_scheme(Scheme::X2, &sys, &rhs, cfg, monitor)
}

/// The `k × k` system `(Σ² + λ₁I + λ₂V_kᵀLᵀLV_k) ỹ₃ = Σ_kU_kᵀ b`.
pub fn x3_reduced_system(f: &LowRankSVD, b: &[f64], cfg: &RegConfig) -> Result<(DenseMatrix, Vec<f64>)> {
    cfg.validate(f.ncols())?;
    let k = f.k();
    let mut m = DenseMatrix::zeros(k, k);
    if cfg.lambda2 != 0.0 {
        let l = cfg.laplacian.expect("validated");
        for j in 0..k {
            let col = f.v().matvec_transpose(&l.laplace(&l.laplace(f.v().col(j))?)?)?;
            for (i, v) in col.into_iter().enumerate() {
                m[(i, j)] = cfg.lambda2 * v;
            }
        }
        m = m.symmetrized();
    }
    for (i, s) in f.sigma().iter().enumerate() {
        m[(i, i)] += s * s + cfg.lambda1;
    }
    let mut rhs = f.u().matvec_transpose(b)?;
    for (r, s) in rhs.iter_mut().zip(f.sigma()) {
        *r *= s;
    }
    Ok((m, rhs))
}

/// `x̃₃ = V_k ỹ₃` from a direct solve of [`x3_reduced_system`].
pub fn solve_scheme_x3(
    f: &LowRankSVD,
    b: &[f64],
    cfg: &RegConfig,
    monitor: Option<ResidualMonitor<'_>>,
) -> Result<SolveReport> {
    let (m, rhs) = x3_reduced_system(f, b, cfg)?;
    let y = m.solve(&rhs)?;
    let x = f.v().matvec(&y)?;
    let mut tracker = Tracker::new(monitor, &cfg.outlier_checkpoints, f.ncols())?;
    let chi2 = tracker.observe(0, &x)?;
    let mut report = SolveReport::new(Scheme::X3, Vec::new(), cfg);
    report.iterations.push(IterationRecord {
        iteration: 1,
        solution_norm: norm2(&x),
        chi2,
        residual: 0.0,
        support: None,
    });
    report.converged = true;
    tracker.finish(&mut report);
    report.solution = x;
    Ok(report)
}

#[derive(Debug, Clone, PartialEq)]
pub struct IstaConfig {
    pub tau: f64,
    pub max_iters: usize,
    /// Stop once `‖xⁿ⁺¹ − xⁿ‖ ≤ tol · ‖xⁿ⁺¹‖`.
    pub tol: f64,
    pub outlier_checkpoints: Vec<usize>,
}

impl Default for IstaConfig {
    fn default() -> Self {
        Self {
            tau: 0.0,
            max_iters: 500,
            tol: 1e-10,
            outlier_checkpoints: vec![5, 25],
        }
    }
}

/// Window over which a doubling of the step length counts as divergence.
const DIVERGENCE_WINDOW: usize = 10;

/// `xⁿ⁺¹ = S_τ(xⁿ + Aᵀb − AᵀAxⁿ)` with unit step. The operator must be scaled
/// so that `‖A‖₂ ≤ 1`; steps of a nonexpansive iteration never grow, so a
/// step that doubles over ten iterations is reported as divergence.
pub fn ista_solve(
    a: &dyn LinearOperator,
    b: &[f64],
    cfg: &IstaConfig,
    monitor: Option<ResidualMonitor<'_>>,
) -> Result<SolveReport> {
    check_len("data vector", a.nrows(), b.len())?;
    if !(cfg.tau.is_finite() && cfg.tau >= 0.0) {
        return Err(Error::invalid("soft threshold must be finite and non-negative"));
    }
    if cfg.max_iters == 0 {
        return Err(Error::invalid("max_iters must be at least 1"));
    }
    let n = a.ncols();
    let atb = a.apply_transpose(b)?;
    let echo = RegConfig {
        max_iters: cfg.max_iters,
        cg_tol: cfg.tol,
        ..RegConfig::default()
    };
    let mut report = SolveReport::new(Scheme::Ista, Vec::new(), &echo);
    let mut tracker = Tracker::new(monitor, &cfg.outlier_checkpoints, n)?;
    let mut x = vec![0.0; n];
    let mut steps: Vec<f64> = Vec::new();
    for it in 1..=cfg.max_iters {
        let ata = a.apply_normal(&x)?;
        let mut g = x.clone();
        axpy(1.0, &atb, &mut g);
        axpy(-1.0, &ata, &mut g);
        let next = soft_threshold(cfg.tau, &g)?;
        if !crate::dense::all_finite(&next) {
            return Err(Error::Divergence { iteration: it });
        }
        let step = norm2(&crate::dense::sub(&next, &x));
        steps.push(step);
        if it > DIVERGENCE_WINDOW {
            let earlier = steps[it - 1 - DIVERGENCE_WINDOW];
            if earlier > 0.0 && step > 2.0 * earlier {
                return Err(Error::Divergence { iteration: it });
            }
        }
        x = next;
        let xn = norm2(&x);
        let chi2 = tracker.observe(it, &x)?;
        let rel = if xn > 0.0 { step / xn } else { step };
        report.iterations.push(IterationRecord {
            iteration: it,
            solution_norm: xn,
            chi2,
            residual: rel,
            support: Some(x.iter().filter(|&&v| v != 0.0).count()),
        });
        if step == 0.0 || rel <= cfg.tol {
            report.converged = true;
            break;
        }
    }
    tracker.finish(&mut report);
    report.solution = x;
    Ok(report)
}

/// Scales `b` in place so a residual is expressed in standard errors.
pub fn scale_to_unit_errors(b: &mut [f64], standard_error: f64) -> Result<()> {
    if !(standard_error.is_finite() && standard_error > 0.0) {
        return Err(Error::invalid("standard error must be positive"));
    }
    scale(1.0 / standard_error, b);
    Ok(())
}
