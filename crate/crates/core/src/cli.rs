//! Command-line driver. Every command writes its outputs plus one
//! `<output>.manifest`; all randomness derives from `--seed`.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::analysis::{matvec_error_report, validate_instance, ErrorReport, ValidationOptions};
use crate::compressed::{
    compress_rows_with, compress_stream, compression_report, read_compressed, write_compressed, CompressedMatrix,
    SPC_MAGIC,
};
use crate::error::{Error, Result};
use crate::io::{read_vector, write_vector, RunManifest};
use crate::lowrank::{randomized_lowrank_svd, read_lowrank, write_lowrank, LowRankSVD, SvdOptions, LRK_MAGIC};
use crate::operator::LinearOperator;
use crate::par::{set_thread_count, Execution};
use crate::problems::{
    add_noise, checkerboard_experiment, gen_checkerboard, gen_kernel_matrix, CheckerboardConfig, SyntheticKernelConfig,
};
use crate::regularization::{
    ista_solve, solve_scheme_x1, solve_scheme_x1hat, solve_scheme_x2, solve_scheme_x3, solve_true, IstaConfig,
    LaplacianOperator, ProjectedBlock, RegConfig, ResidualMonitor, Scheme, SolveReport,
};
use crate::rng;
use crate::sparse::{read_sparse, write_sparse, SparseMatrix, SprBlockReader, SPR_MAGIC};
use crate::wavelet::{ThresholdPolicy, WaveletFamily, WaveletSpec};

pub const EXIT_USAGE: i32 = 1;
pub const EXIT_FORMAT: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "regcompress", version, about = "Compressed operators and regularized least squares")]
pub struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a synthetic kernel matrix, and optionally a model and data.
    Gen(GenArgs),
    /// Wavelet-compress the rows of a .spr matrix.
    Compress(CompressArgs),
    /// Randomized rank-k factors of an operator.
    Svd(SvdArgs),
    /// Solve a regularized least-squares problem.
    Solve(SolveArgs),
    /// Check the solution identities and error bounds on one instance.
    Validate(ValidateArgs),
    /// Matvec error statistics of an approximate operator.
    Bench(BenchArgs),
}

#[derive(Args, Debug)]
struct GenArgs {
    #[arg(long, default_value_t = 500)]
    rows: usize,
    #[arg(long, default_value_t = 32)]
    grid_rows: usize,
    #[arg(long, default_value_t = 32)]
    grid_cols: usize,
    #[arg(long, default_value_t = 3)]
    bumps: usize,
    #[arg(long, default_value_t = 4.0)]
    width_min: f64,
    #[arg(long, default_value_t = 10.0)]
    width_max: f64,
    #[arg(long, default_value_t = 0.5)]
    amp_min: f64,
    #[arg(long, default_value_t = 1.5)]
    amp_max: f64,
    #[arg(long, default_value_t = 1e-14)]
    floor: f64,
    /// Restrict sensitivity to grid rows `lo..hi`.
    #[arg(long, num_args = 2, value_names = ["LO", "HI"])]
    band: Option<Vec<usize>>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output .spr matrix.
    #[arg(long)]
    matrix: PathBuf,
    /// Output model vector.
    #[arg(long)]
    model: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = ModelKind::Gaussian)]
    model_kind: ModelKind,
    #[arg(long, default_value_t = 4)]
    cell: usize,
    /// Output data vector `A x + noise`; requires --model.
    #[arg(long, requires = "model")]
    rhs: Option<PathBuf>,
    /// Noise level relative to the rms data value.
    #[arg(long, default_value_t = 0.0)]
    noise: f64,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum ModelKind {
    Gaussian,
    Checkerboard,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum FamilyArg {
    Haar,
    Cdf97,
}

#[derive(Args, Debug)]
struct CompressArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, value_enum, default_value_t = FamilyArg::Cdf97)]
    family: FamilyArg,
    #[arg(long, default_value_t = 5)]
    levels: u32,
    #[arg(long, conflicts_with = "threshold")]
    keep_fraction: Option<f64>,
    /// Absolute hard threshold instead of a keep fraction.
    #[arg(long)]
    threshold: Option<f64>,
    /// Compress while streaming this many rows at a time; skips the error report.
    #[arg(long)]
    block_rows: Option<usize>,
}

#[derive(Args, Debug)]
struct SvdArgs {
    /// Operator file (.spr, .spc or .lrk, detected by content).
    #[arg(long)]
    operator: PathBuf,
    #[arg(long)]
    k: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 0)]
    oversample: usize,
    #[arg(long, default_value_t = 1e-8)]
    cutoff: f64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum SchemeArg {
    True,
    X1,
    X1hat,
    X2,
    X3,
    Ista,
}

#[derive(Args, Debug)]
struct SolveArgs {
    #[arg(long, value_enum)]
    scheme: SchemeArg,
    #[arg(long)]
    operator: Option<PathBuf>,
    /// Low-rank factors; repeat once per row block for x2.
    #[arg(long)]
    factors: Vec<PathBuf>,
    #[arg(long)]
    rhs: PathBuf,
    #[arg(long, default_value_t = 0.0)]
    lambda1: f64,
    #[arg(long, default_value_t = 0.0)]
    lambda2: f64,
    /// Model grid for the smoothing term.
    #[arg(long, num_args = 2, value_names = ["ROWS", "COLS"])]
    grid: Option<Vec<usize>>,
    #[arg(long, default_value_t = 500)]
    iters: usize,
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    /// Multiplies lambda1 for the x1hat scheme.
    #[arg(long, default_value_t = 1.0)]
    lambda_scale: f64,
    /// Soft threshold for ista.
    #[arg(long, default_value_t = 0.0)]
    tau: f64,
    #[arg(long, value_delimiter = ',', default_values_t = [5usize, 25])]
    checkpoints: Vec<usize>,
    #[arg(long)]
    out: PathBuf,
    /// Per-iteration CSV (default: `<out>.csv`).
    #[arg(long)]
    log: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ValidateArgs {
    #[arg(long)]
    operator: PathBuf,
    #[arg(long)]
    rhs: PathBuf,
    #[arg(long, default_value_t = 10)]
    k: usize,
    #[arg(long, default_value_t = 0.1)]
    lambda: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1e-13)]
    tol: f64,
    #[arg(long, default_value_t = 5000)]
    iters: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct BenchArgs {
    #[arg(long)]
    exact: PathBuf,
    #[arg(long)]
    approx: PathBuf,
    #[arg(long, default_value_t = 50)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Checkerboard cell sizes to sweep on the exact operator.
    #[arg(long, value_delimiter = ',')]
    checker_cells: Vec<usize>,
    #[arg(long, num_args = 2, value_names = ["ROWS", "COLS"])]
    grid: Option<Vec<usize>>,
    #[arg(long, default_value_t = 1e-3)]
    lambda: f64,
    #[arg(long)]
    out: PathBuf,
}

/// Any operator file, recognised by its magic bytes.
pub enum AnyOperator {
    Sparse(SparseMatrix),
    Compressed(CompressedMatrix),
    LowRank(LowRankSVD),
}

impl AnyOperator {
    pub fn load(path: &Path) -> Result<Self> {
        let mut magic = [0u8; 4];
        let mut f = File::open(path)?;
        f.read_exact(&mut magic)
            .map_err(|_| Error::format(0, "file too short for a magic number"))?;
        match &magic {
            m if m == SPR_MAGIC => Ok(Self::Sparse(read_sparse(path)?)),
            m if m == SPC_MAGIC => Ok(Self::Compressed(read_compressed(path)?)),
            m if m == LRK_MAGIC => Ok(Self::LowRank(read_lowrank(path)?)),
            _ => Err(Error::format(0, format!("unrecognised operator magic {magic:?}"))),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Self::Sparse(_) => "sparse",
            Self::Compressed(_) => "compressed",
            Self::LowRank(_) => "lowrank",
        }
    }

    fn op(&self) -> &dyn LinearOperator {
        match self {
            Self::Sparse(m) => m,
            Self::Compressed(c) => c,
            Self::LowRank(f) => f,
        }
    }
}

impl LinearOperator for AnyOperator {
    fn nrows(&self) -> usize {
        self.op().nrows()
    }
    fn ncols(&self) -> usize {
        self.op().ncols()
    }
    fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.op().apply(x)
    }
    fn apply_transpose(&self, y: &[f64]) -> Result<Vec<f64>> {
        self.op().apply_transpose(y)
    }
    fn apply_normal(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.op().apply_normal(x)
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::InvalidInput(_) | Error::DimensionMismatch { .. } => EXIT_USAGE,
        Error::Format { .. } | Error::Io(_) => EXIT_FORMAT,
        _ => EXIT_NUMERIC,
    }
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    if let Some(t) = cli.threads {
        if t == 0 {
            eprintln!("error: --threads must be at least 1");
            return EXIT_USAGE;
        }
        set_thread_count(t);
    }
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn dispatch(cmd: Command) -> Result<i32> {
    let start = Instant::now();
    let (mut manifest, primary, code) = match cmd {
        Command::Gen(a) => cmd_gen(a)?,
        Command::Compress(a) => cmd_compress(a)?,
        Command::Svd(a) => cmd_svd(a)?,
        Command::Solve(a) => cmd_solve(a)?,
        Command::Validate(a) => cmd_validate(a)?,
        Command::Bench(a) => cmd_bench(a)?,
    };
    manifest.set("duration_ms", start.elapsed().as_millis());
    manifest.set("exit_code", code);
    manifest.write_beside(&primary)?;
    Ok(code)
}

type Outcome = (RunManifest, PathBuf, i32);

fn path_str(p: &Path) -> String {
    p.display().to_string()
}

fn cmd_gen(a: GenArgs) -> Result<Outcome> {
    let mut m = RunManifest::new("gen");
    let band = match a.band.as_deref() {
        Some([lo, hi]) => Some((*lo, *hi)),
        _ => None,
    };
    let cfg = SyntheticKernelConfig {
        nrows: a.rows,
        grid_rows: a.grid_rows,
        grid_cols: a.grid_cols,
        bumps_per_row: a.bumps,
        width_range: (a.width_min, a.width_max),
        amplitude_range: (a.amp_min, a.amp_max),
        sparsity_floor: a.floor,
        active_rows: band,
        seed: rng::derive_seed(a.seed, 0),
    };
    let mat = gen_kernel_matrix(&cfg)?;
    write_sparse(&mat, &a.matrix)?;
    for (k, v) in [
        ("rows", a.rows.to_string()),
        ("grid_rows", a.grid_rows.to_string()),
        ("grid_cols", a.grid_cols.to_string()),
        ("bumps", a.bumps.to_string()),
        ("width_range", format!("{},{}", a.width_min, a.width_max)),
        ("amplitude_range", format!("{},{}", a.amp_min, a.amp_max)),
        ("floor", a.floor.to_string()),
        ("band", band.map_or("none".into(), |(l, h)| format!("{l},{h}"))),
        ("seed", a.seed.to_string()),
        ("nnz", mat.nnz().to_string()),
        ("matrix", path_str(&a.matrix)),
    ] {
        m.set(k, v);
    }
    if let Some(model_path) = &a.model {
        let x = match a.model_kind {
            ModelKind::Gaussian => rng::gaussian_vec(a.seed, 1, mat.ncols()),
            ModelKind::Checkerboard => gen_checkerboard(&CheckerboardConfig {
                grid_rows: a.grid_rows,
                grid_cols: a.grid_cols,
                cell: a.cell,
                amplitude: 1.0,
                band: band.unwrap_or((0, a.grid_rows)),
            })?,
        };
        write_vector(&x, model_path)?;
        m.set("model", path_str(model_path));
        m.set("model_kind", format!("{:?}", a.model_kind).to_lowercase());
        m.set("cell", a.cell);
        if let Some(rhs_path) = &a.rhs {
            let b = add_noise(&mat.spmv(&x)?, a.noise, rng::derive_seed(a.seed, 2));
            write_vector(&b, rhs_path)?;
            m.set("rhs", path_str(rhs_path));
            m.set("noise", a.noise);
        }
    }
    println!("wrote {} x {} matrix with {} nonzeros", mat.nrows(), mat.ncols(), mat.nnz());
    Ok((m, a.matrix, 0))
}

fn cmd_compress(a: CompressArgs) -> Result<Outcome> {
    let mut m = RunManifest::new("compress");
    let family = match a.family {
        FamilyArg::Haar => WaveletFamily::HaarOrthogonal,
        FamilyArg::Cdf97 => WaveletFamily::Cdf97,
    };
    let spec = WaveletSpec::new(family, a.levels)?;
    let policy = match (a.keep_fraction, a.threshold) {
        (_, Some(t)) => ThresholdPolicy::Absolute(t),
        (Some(f), None) => ThresholdPolicy::KeepFraction(f),
        (None, None) => ThresholdPolicy::KeepFraction(0.3),
    };
    policy.validate()?;
    m.set("input", path_str(&a.input));
    m.set("output", path_str(&a.out));
    m.set("family", family.name());
    m.set("levels", a.levels);
    match policy {
        ThresholdPolicy::KeepFraction(f) => m.set("keep_fraction", f),
        ThresholdPolicy::Absolute(t) => m.set("threshold", t),
    }
    let c = if let Some(br) = a.block_rows {
        if br == 0 {
            return Err(Error::invalid("--block-rows must be positive"));
        }
        m.set("block_rows", br);
        let mut reader = SprBlockReader::open(&a.input)?;
        let c = compress_stream(&mut reader, spec, policy, br, Execution::default())?;
        println!("compressed nnz {}  bytes {}", c.nnz(), c.serialized_len());
        c
    } else {
        let src = read_sparse(&a.input)?;
        let c = compress_rows_with(&src, spec, policy, Execution::default())?;
        let r = compression_report(&src, &c)?;
        println!("source nnz        {}", r.source_nnz);
        println!("compressed nnz    {}", r.compressed_nnz);
        println!("nnz ratio         {:.3}", r.nnz_ratio);
        println!("byte ratio        {:.3}", r.byte_ratio);
        println!("mean row error    {:.3e}", r.mean_error);
        println!("max row error     {:.3e}", r.max_error);
        if r.incompressible {
            println!("warning: rows are poorly compressible at this setting");
        }
        m.set("byte_ratio", format!("{:.6}", r.byte_ratio));
        m.set("mean_row_error", format!("{:e}", r.mean_error));
        m.set("incompressible", r.incompressible);
        c
    };
    write_compressed(&c, &a.out)?;
    m.set("compressed_nnz", c.nnz());
    Ok((m, a.out, 0))
}

fn cmd_svd(a: SvdArgs) -> Result<Outcome> {
    let mut m = RunManifest::new("svd");
    let op = AnyOperator::load(&a.operator)?;
    let opts = SvdOptions {
        oversample: a.oversample,
        sigma_cutoff: a.cutoff,
        exec: Execution::default(),
    };
    let f = randomized_lowrank_svd(&op, a.k, a.seed, &opts)?;
    write_lowrank(&f, &a.out)?;
    if let Some(w) = f.conditioning_warning() {
        eprintln!("warning: {w}");
        m.set("warning", w);
    }
    println!("rank {} (requested {})", f.k(), a.k);
    for (i, s) in f.sigma().iter().enumerate() {
        println!("sigma[{i}] = {s:.12e}");
    }
    m.set("operator", path_str(&a.operator));
    m.set("operator_kind", op.kind());
    m.set("k", a.k);
    m.set("effective_k", f.k());
    m.set("seed", a.seed);
    m.set("oversample", a.oversample);
    m.set("cutoff", a.cutoff);
    m.set("output", path_str(&a.out));
    Ok((m, a.out, 0))
}

/// Tracks the residual against the full operator when one was given.
fn pick_monitor<'a>(
    op: Option<&'a AnyOperator>,
    fallback: &'a dyn LinearOperator,
    b: &'a [f64],
) -> Option<ResidualMonitor<'a>> {
    let target: &dyn LinearOperator = match op {
        Some(o) => o,
        None => fallback,
    };
    (target.nrows() == b.len()).then_some(ResidualMonitor { op: target, b })
}

fn cmd_solve(a: SolveArgs) -> Result<Outcome> {
    let mut m = RunManifest::new("solve");
    let b = read_vector(&a.rhs)?;
    let op = a.operator.as_deref().map(AnyOperator::load).transpose()?;
    let factors = a
        .factors
        .iter()
        .map(|p| read_lowrank(p))
        .collect::<Result<Vec<_>>>()?;
    let mut cfg = RegConfig {
        lambda1: a.lambda1,
        lambda2: a.lambda2,
        laplacian: None,
        max_iters: a.iters,
        cg_tol: a.tol,
        outlier_checkpoints: a.checkpoints.clone(),
    };
    if let Some([r, c]) = a.grid.as_deref() {
        cfg.laplacian = Some(LaplacianOperator::new(*r, *c)?);
        m.set("grid", format!("{r},{c}"));
    }
    let need_op = || op.as_ref().ok_or_else(|| Error::invalid("this scheme needs --operator"));
    let single = || match factors.as_slice() {
        [f] => Ok(f),
        _ => Err(Error::invalid("this scheme needs exactly one --factors file")),
    };
    let monitor = |fallback| pick_monitor(op.as_ref(), fallback, &b);
    let report: SolveReport = match a.scheme {
        SchemeArg::True => {
            let o = need_op()?;
            solve_true(o, &b, &cfg, monitor(o))?
        }
        SchemeArg::X1 => {
            let f = single()?;
            solve_scheme_x1(f, &b, &cfg, monitor(f))?
        }
        SchemeArg::X1hat => {
            let (f, o) = (single()?, need_op()?);
            let scaled = RegConfig {
                lambda1: cfg.lambda1 * a.lambda_scale,
                ..cfg.clone()
            };
            m.set("lambda_scale", a.lambda_scale);
            solve_scheme_x1hat(f, o, &b, &scaled, monitor(f))?
        }
        SchemeArg::X2 => {
            let blocks = if let (Some(o), [f]) = (&op, factors.as_slice()) {
                vec![ProjectedBlock::from_operator(o, f.u(), &b)?]
            } else {
                if factors.is_empty() {
                    return Err(Error::invalid("x2 needs at least one --factors file"));
                }
                let mut at = 0;
                let mut blocks = Vec::new();
                for f in &factors {
                    let end = at + f.nrows();
                    if end > b.len() {
                        return Err(Error::DimensionMismatch {
                            context: "x2 block rows",
                            expected: b.len(),
                            actual: end,
                        });
                    }
                    blocks.push(ProjectedBlock::from_factors(f, &b[at..end])?);
                    at = end;
                }
                crate::error::check_len("x2 block rows", b.len(), at)?;
                blocks
            };
            let mon = op.as_ref().map(|o| ResidualMonitor { op: o, b: &b });
            solve_scheme_x2(&blocks, &cfg, mon)?
        }
        SchemeArg::X3 => {
            let f = single()?;
            solve_scheme_x3(f, &b, &cfg, monitor(f))?
        }
        SchemeArg::Ista => {
            let o = need_op()?;
            let icfg = IstaConfig {
                tau: a.tau,
                max_iters: a.iters,
                tol: a.tol,
                outlier_checkpoints: a.checkpoints.clone(),
            };
            m.set("tau", a.tau);
            ista_solve(o, &b, &icfg, monitor(o))?
        }
    };
    write_vector(&report.solution, &a.out)?;
    let log = a.log.clone().unwrap_or_else(|| {
        let mut s = a.out.as_os_str().to_owned();
        s.push(".csv");
        PathBuf::from(s)
    });
    let mut w = BufWriter::new(File::create(&log)?);
    report.write_csv(&mut w)?;
    w.flush()?;

    let scheme: Scheme = report.scheme;
    println!(
        "{scheme}: {} iterations, converged {}, |x| = {:.6e}",
        report.iterations.len(),
        report.converged,
        crate::dense::norm2(&report.solution)
    );
    if !report.outlier_mask.is_empty() {
        println!("P = {} of {} rows", report.p, report.outlier_mask.len());
    }
    m.set("scheme", scheme);
    m.set("operator", a.operator.as_deref().map_or("none".into(), path_str));
    m.set(
        "factors",
        a.factors.iter().map(|p| path_str(p)).collect::<Vec<_>>().join(","),
    );
    m.set("rhs", path_str(&a.rhs));
    m.set("lambda1", a.lambda1);
    m.set("lambda2", a.lambda2);
    m.set("iters", a.iters);
    m.set("tol", a.tol);
    m.set(
        "checkpoints",
        a.checkpoints.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(","),
    );
    m.set("iterations", report.iterations.len());
    m.set("converged", report.converged);
    m.set("p", report.p);
    m.set("output", path_str(&a.out));
    m.set("log", path_str(&log));
    Ok((m, a.out, 0))
}

fn cmd_validate(a: ValidateArgs) -> Result<Outcome> {
    let mut m = RunManifest::new("validate");
    let op = AnyOperator::load(&a.operator)?;
    let b = read_vector(&a.rhs)?;
    let rep = validate_instance(
        &op,
        &b,
        &ValidationOptions {
            k: a.k,
            lambda: a.lambda,
            seed: a.seed,
            cg_tol: a.tol,
            max_iters: a.iters,
        },
    )?;
    let mut w = BufWriter::new(File::create(&a.out)?);
    rep.write_text(&mut w)?;
    w.flush()?;
    rep.write_text(&mut std::io::stdout())?;
    let code = if rep.passed() { 0 } else { EXIT_NUMERIC };
    m.set("operator", path_str(&a.operator));
    m.set("rhs", path_str(&a.rhs));
    m.set("k", a.k);
    m.set("lambda", a.lambda);
    m.set("seed", a.seed);
    m.set("tol", a.tol);
    m.set("iters", a.iters);
    m.set("passed", rep.passed());
    m.set("output", path_str(&a.out));
    Ok((m, a.out, code))
}

fn cmd_bench(a: BenchArgs) -> Result<Outcome> {
    let mut m = RunManifest::new("bench");
    let exact = AnyOperator::load(&a.exact)?;
    let approx = AnyOperator::load(&a.approx)?;
    let rep = matvec_error_report(&exact, &approx, a.trials, a.seed, Execution::default())?;
    let mut w = BufWriter::new(File::create(&a.out)?);
    rep.write_csv(&mut w)?;
    w.flush()?;

    println!("{:<8} {:>12} {:>12}", "product", "mean %", "max %");
    for (name, v) in [("Ax", &rep.ax), ("A^Ty", &rep.aty), ("A^TAx", &rep.atax)] {
        println!("{name:<8} {:>12.4e} {:>12.4e}", ErrorReport::mean(v), ErrorReport::max(v));
        m.set(&format!("mean_percent_{}", name.replace('^', "")), format!("{:e}", ErrorReport::mean(v)));
    }
    if rep.skipped > 0 {
        println!("skipped {} trials with a zero exact product", rep.skipped);
    }
    let x = rng::gaussian_vec(a.seed, u64::MAX, exact.ncols());
    let reps = a.trials.max(1);
    for (name, op) in [("exact", &exact), ("approx", &approx)] {
        let t = Instant::now();
        for _ in 0..reps {
            std::hint::black_box(op.apply(&x)?);
        }
        println!("{name:<8} apply {:>10.3} us", t.elapsed().as_secs_f64() * 1e6 / reps as f64);
    }

    if !a.checker_cells.is_empty() {
        let [gr, gc] = a
            .grid
            .as_deref()
            .and_then(|g| <[usize; 2]>::try_from(g).ok())
            .ok_or_else(|| Error::invalid("--checker-cells needs --grid ROWS COLS"))?;
        let reg = RegConfig::tikhonov(a.lambda).with_tolerance(1e-10, 2000);
        println!("{:<6} {:>12} {:>12}", "cell", "correlation", "leakage");
        for &cell in &a.checker_cells {
            let r = checkerboard_experiment(
                &exact,
                &CheckerboardConfig {
                    grid_rows: gr,
                    grid_cols: gc,
                    cell,
                    amplitude: 1.0,
                    band: (0, gr),
                },
                &reg,
            )?;
            println!("{cell:<6} {:>12.6} {:>12.3e}", r.band_correlation, r.leakage);
            m.set(&format!("checker_{cell}"), format!("{:.6}", r.band_correlation));
        }
    }
    m.set("exact", path_str(&a.exact));
    m.set("approx", path_str(&a.approx));
    m.set("trials", a.trials);
    m.set("seed", a.seed);
    m.set("output", path_str(&a.out));
    Ok((m, a.out, 0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_in(dir: &Path, args: &[&str]) -> i32 {
        let mut v = vec!["regcompress".to_string()];
        v.extend(args.iter().map(|a| a.replace("@", &dir.display().to_string())));
        run(v)
    }

    #[test]
    fn usage_errors_exit_one() {
        let d = tempfile::tempdir().unwrap();
        assert_eq!(run_in(d.path(), &["frobnicate"]), EXIT_USAGE);
        assert_eq!(run_in(d.path(), &["svd", "--bogus"]), EXIT_USAGE);
        assert_eq!(run_in(d.path(), &["gen", "--matrix", "@/a.spr", "--rows", "0"]), EXIT_USAGE);
    }

    #[test]
    fn malformed_files_exit_two() {
        let d = tempfile::tempdir().unwrap();
        std::fs::write(d.path().join("junk.spr"), b"SPR1\x01").unwrap();
        std::fs::write(d.path().join("bad"), b"ZZZZ").unwrap();
        assert_eq!(
            run_in(d.path(), &["svd", "--operator", "@/junk.spr", "--k", "2", "--out", "@/f.lrk"]),
            EXIT_FORMAT
        );
        assert_eq!(
            run_in(d.path(), &["svd", "--operator", "@/bad", "--k", "2", "--out", "@/f.lrk"]),
            EXIT_FORMAT
        );
        assert_eq!(
            run_in(d.path(), &["svd", "--operator", "@/missing", "--k", "2", "--out", "@/f.lrk"]),
            EXIT_FORMAT
        );
    }

    #[test]
    fn numeric_failure_exits_three() {
        let d = tempfile::tempdir().unwrap();
        write_sparse(&SparseMatrix::from_rows(3, vec![vec![], vec![]]).unwrap(), d.path().join("z.spr")).unwrap();
        assert_eq!(
            run_in(d.path(), &["svd", "--operator", "@/z.spr", "--k", "1", "--out", "@/f.lrk"]),
            EXIT_NUMERIC
        );
    }

    #[test]
    fn lossless_compress_then_bench() {
        let d = tempfile::tempdir().unwrap();
        let gen = [
            "gen", "--rows", "40", "--grid-rows", "8", "--grid-cols", "8", "--seed", "3", "--matrix", "@/a.spr",
        ];
        assert_eq!(run_in(d.path(), &gen), 0);
        let comp = [
            "compress", "--input", "@/a.spr", "--out", "@/a.spc", "--keep-fraction", "1.0", "--levels", "3",
        ];
        assert_eq!(run_in(d.path(), &comp), 0);
        let bench = [
            "bench", "--exact", "@/a.spr", "--approx", "@/a.spc", "--trials", "10", "--out", "@/err.csv",
        ];
        assert_eq!(run_in(d.path(), &bench), 0);
        let csv = std::fs::read_to_string(d.path().join("err.csv")).unwrap();
        for line in csv.lines().skip(1) {
            for v in line.split(',').skip(1) {
                assert!(v.parse::<f64>().unwrap() <= 1e-8, "{line}");
            }
        }
        let man = std::fs::read_to_string(d.path().join("err.csv.manifest")).unwrap();
        let man = RunManifest::parse(&man).unwrap();
        assert_eq!(man.get("command"), Some("bench"));
        assert_eq!(man.get("exit_code"), Some("0"));
        assert!(d.path().join("a.spc.manifest").exists() && d.path().join("a.spr.manifest").exists());
    }

    #[test]
    fn streaming_compress_matches_in_memory() {
        let d = tempfile::tempdir().unwrap();
        let gen = ["gen", "--rows", "30", "--grid-rows", "6", "--grid-cols", "10", "--matrix", "@/a.spr"];
        assert_eq!(run_in(d.path(), &gen), 0);
        assert_eq!(run_in(d.path(), &["compress", "--input", "@/a.spr", "--out", "@/m.spc"]), 0);
        let stream = ["compress", "--input", "@/a.spr", "--out", "@/s.spc", "--block-rows", "7"];
        assert_eq!(run_in(d.path(), &stream), 0);
        assert_eq!(
            std::fs::read(d.path().join("m.spc")).unwrap(),
            std::fs::read(d.path().join("s.spc")).unwrap()
        );
    }

    #[test]
    fn solve_needs_inputs() {
        let d = tempfile::tempdir().unwrap();
        let gen = [
            "gen", "--rows", "20", "--grid-rows", "4", "--grid-cols", "5", "--matrix", "@/a.spr", "--model",
            "@/x.vec", "--rhs", "@/b.vec",
        ];
        assert_eq!(run_in(d.path(), &gen), 0);
        let x1 = ["solve", "--scheme", "x1", "--rhs", "@/b.vec", "--lambda1", "1", "--out", "@/s.vec"];
        assert_eq!(run_in(d.path(), &x1), EXIT_USAGE);
        let t = [
            "solve", "--scheme", "true", "--operator", "@/a.spr", "--rhs", "@/b.vec", "--lambda1", "0.1", "--grid",
            "4", "5", "--lambda2", "0.5", "--out", "@/s.vec",
        ];
        assert_eq!(run_in(d.path(), &t), 0);
        let csv = std::fs::read_to_string(d.path().join("s.vec.csv")).unwrap();
        assert!(csv.starts_with("iteration,solution_norm,chi2,cg_residual"));
        let wrong_grid = [
            "solve", "--scheme", "true", "--operator", "@/a.spr", "--rhs", "@/b.vec", "--grid", "3", "5",
            "--lambda2", "0.5", "--out", "@/s.vec",
        ];
        assert_eq!(run_in(d.path(), &wrong_grid), EXIT_USAGE);
    }
}
