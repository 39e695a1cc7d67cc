//! End-to-end acceptance checks. Runs as a plain binary so every criterion
//! prints its own PASS/FAIL line; exits nonzero if any fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::Rng;
use regcompress::analysis::{
    dense_svd, evaluate_bounds, inverse_identity_check, matvec_error_report, woodbury_check, BoundInputs, ErrorReport,
};
use regcompress::compressed::{compress_rows, compression_report};
use regcompress::dense::{norm2, rel_diff, scale, sub, DenseMatrix};
use regcompress::lowrank::{gaussian_matrix, randomized_lowrank_svd, SvdOptions};
use regcompress::operator::Identity;
use regcompress::par::Execution;
use regcompress::problems::{
    add_noise, checkerboard_experiment, exact_rank_matrix, gen_kernel_matrix, with_spectrum, CheckerboardConfig,
    SyntheticKernelConfig,
};
use regcompress::regularization::{
    chi_squared, solve_scheme_x1, solve_scheme_x1hat, solve_scheme_x2, solve_scheme_x3, solve_true, update_outliers,
    ProjectedBlock, RegConfig, ResidualMonitor,
};
use regcompress::rng;
use regcompress::sparse::SparseMatrix;
use regcompress::wavelet::{ThresholdPolicy, WaveletSpec};

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(limit: Duration, took: Duration) -> Result<(), String> {
    ensure(took < limit, || format!("took {took:.2?}, limit {limit:.0?}"))
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn wavelet_round_trip() -> Outcome {
    let t = Instant::now();
    let (mut worst_rt, mut worst_adj) = (0.0f64, 0.0f64);
    for spec in [WaveletSpec::haar(3), WaveletSpec::cdf97(3), WaveletSpec::haar(6), WaveletSpec::cdf97(6)] {
        let spec = spec.map_err(|e| e.to_string())?;
        for len in [8usize, 64, 100, 1000] {
            let padded = spec.padded_len(len);
            for s in 0..100u64 {
                let x = rng::gaussian_vec(s, len as u64, len);
                let c = spec.forward(&x).unwrap();
                let back = spec.inverse(&c, len).unwrap();
                worst_rt = worst_rt.max(rel_diff(&back, &x));
                let y = rng::gaussian_vec(s, 10_000 + len as u64, padded);
                let lhs = dot(&spec.inverse_transpose(&x).unwrap(), &y);
                let rhs = dot(&x, &spec.inverse(&y, len).unwrap());
                let scale = norm2(&x) * norm2(&y);
                worst_adj = worst_adj.max((lhs - rhs).abs() / scale);
            }
        }
    }
    ensure(worst_rt <= 1e-10, || format!("round trip {worst_rt:e} > 1e-10"))?;
    ensure(worst_adj <= 1e-12, || format!("adjoint {worst_adj:e} > 1e-12"))?;
    within(Duration::from_secs(5), t.elapsed())?;
    Ok(format!("round trip {worst_rt:.1e}, adjoint {worst_adj:.1e}"))
}

fn random_sparse(nrows: usize, ncols: usize, density: f64, seed: u64) -> SparseMatrix {
    let mut r = rng::stream(seed, 0);
    let rows = (0..nrows)
        .map(|_| {
            (0..ncols as u32)
                .filter_map(|c| (r.random::<f64>() < density).then(|| (c, r.random::<f64>() * 2.0 - 1.0)))
                .collect()
        })
        .collect();
    SparseMatrix::from_rows(ncols, rows).unwrap()
}

fn lossless_equivalence() -> Outcome {
    let t = Instant::now();
    let mut worst = 0.0f64;
    for s in 0..20u64 {
        let a = random_sparse(100, 256, 0.1, s);
        let spec = if s % 2 == 0 { WaveletSpec::haar(4) } else { WaveletSpec::cdf97(4) }.unwrap();
        let c = compress_rows(&a, spec, ThresholdPolicy::KeepFraction(1.0)).unwrap();
        let x = rng::gaussian_vec(s, 1, 256);
        let y = rng::gaussian_vec(s, 2, 100);
        let ax = a.spmv(&x).unwrap();
        worst = worst.max(rel_diff(&c.apply(&x).unwrap(), &ax));
        worst = worst.max(rel_diff(&c.apply_transpose(&y).unwrap(), &a.spmv_transpose(&y).unwrap()));
        worst = worst.max(rel_diff(&c.apply_normal(&x).unwrap(), &a.spmv_transpose(&ax).unwrap()));
    }
    ensure(worst <= 1e-10, || format!("max relative difference {worst:e} > 1e-10"))?;
    within(Duration::from_secs(10), t.elapsed())?;
    Ok(format!("max relative difference {worst:.1e}"))
}

fn randomized_svd() -> Outcome {
    let t = Instant::now();
    let cases = [(40, 60, 1), (80, 50, 1), (100, 150, 5), (150, 120, 5), (120, 200, 20), (200, 300, 20)];
    let (mut worst_fro, mut worst_sigma, mut worst_tail) = (0.0f64, 0.0f64, 0.0f64);
    for (i, &(m, n, k)) in cases.iter().enumerate() {
        let a = exact_rank_matrix(m, n, k, 100 + i as u64);
        let f = randomized_lowrank_svd(&a, k, 7 + i as u64, &SvdOptions::default()).map_err(|e| e.to_string())?;
        ensure(f.k() == k, || format!("{m}x{n}: rank {} != {k}", f.k()))?;
        let fro = f.to_dense().sub(&a).unwrap().frobenius_norm() / a.frobenius_norm();
        worst_fro = worst_fro.max(fro);
        let oracle = dense_svd(&a).unwrap().sigma;
        for j in 0..k {
            if (oracle[j] - oracle[j + 1]) / oracle[j] >= 0.05 {
                worst_sigma = worst_sigma.max((f.sigma()[j] - oracle[j]).abs() / oracle[j]);
            }
        }
        let tol = oracle[k] + 1e-6 * oracle[0];
        for z in 0..20 {
            let z = rng::unit_vec(i as u64, z, n);
            let d = norm2(&sub(&a.matvec(&z).unwrap(), &f.apply(&z).unwrap()));
            worst_tail = worst_tail.max(d / tol);
        }
    }
    ensure(worst_fro <= 1e-8, || format!("Frobenius error {worst_fro:e} > 1e-8"))?;
    ensure(worst_sigma <= 0.05, || format!("sigma error {worst_sigma:e} > 5%"))?;
    ensure(worst_tail <= 1.0, || format!("tail bound exceeded by factor {worst_tail}"))?;
    within(Duration::from_secs(30), t.elapsed())?;
    Ok(format!(
        "Frobenius {worst_fro:.1e}, sigma {worst_sigma:.1e}, tail/bound {worst_tail:.1e}"
    ))
}

/// One solved instance of the shared scheme/identity/bound set.
struct Instance {
    label: String,
    a: DenseMatrix,
    b: Vec<f64>,
    k: usize,
    lambda: f64,
}

struct Solved {
    label: String,
    /// `σ²_{k+1}/λ`; the x̃₁ absolute bound is a theorem only when this is ≤ 1.
    tail_ratio: f64,
    /// `‖x̄ − x̃₁‖` against `max_{s>k} σ_s/(λ+σ_s²)·‖b‖`.
    x1_sup_ratio: f64,
    scheme_diff: f64,
    projection: f64,
    difference: f64,
    bound_ratios: [f64; 4],
}

fn instances() -> Vec<Instance> {
    (0..20u64)
        .map(|i| {
            let m = 60 + ((i * 53) % 241) as usize;
            let n = 50 + ((i * 97) % 251) as usize;
            let k = (5 + (i * 7) % 26) as usize;
            let k = k.min(m.min(n) - 1);
            let lambda = [0.1, 1.0, 10.0][(i % 3) as usize];
            let ratio = 0.80 + 0.015 * (i % 10) as f64;
            let r = m.min(n);
            let sigma: Vec<f64> = (0..r).map(|j| 10.0 * ratio.powi(j as i32)).collect();
            let a = with_spectrum(m, n, &sigma, 1000 + i);
            let x = rng::gaussian_vec(i, 5, n);
            let b = add_noise(&a.matvec(&x).unwrap(), 0.05, 2000 + i);
            Instance {
                label: format!("#{i} {m}x{n} k={k} lambda={lambda}"),
                a,
                b,
                k,
                lambda,
            }
        })
        .collect()
}

fn solve_instance(inst: &Instance) -> Result<Solved, String> {
    let e = |e: regcompress::Error| format!("{}: {e}", inst.label);
    let cfg = RegConfig::tikhonov(inst.lambda).with_tolerance(1e-14, 5000);
    let (a, b) = (&inst.a, &inst.b[..]);

    let fast = randomized_lowrank_svd(a, inst.k, 31, &SvdOptions::default()).map_err(e)?;
    let x1 = solve_scheme_x1(&fast, b, &cfg, None).map_err(e)?.solution;
    let block = ProjectedBlock::from_operator(a, fast.u(), b).map_err(e)?;
    let x2 = solve_scheme_x2(&[block], &cfg, None).map_err(e)?.solution;
    let x3 = solve_scheme_x3(&fast, b, &cfg, None).map_err(e)?.solution;
    let scheme_diff = rel_diff(&x1, &x2).max(rel_diff(&x1, &x3)).max(rel_diff(&x2, &x3));

    let svd = dense_svd(a).map_err(e)?;
    let exact = svd.truncate(inst.k).map_err(e)?;
    let xbar = solve_true(a, b, &cfg, None).map_err(e)?.solution;
    let ox1 = solve_scheme_x1(&exact, b, &cfg, None).map_err(e)?.solution;
    let ox1h = solve_scheme_x1hat(&exact, a, b, &cfg, None).map_err(e)?.solution;
    let proj = exact.v().matvec(&exact.v().matvec_transpose(&xbar).unwrap()).unwrap();
    let projection = norm2(&sub(&ox1, &proj)) / norm2(&xbar);
    let mut want = sub(&a.matvec_transpose(b).unwrap(), &exact.apply_transpose(b).unwrap());
    scale(1.0 / inst.lambda, &mut want);
    let difference = norm2(&sub(&sub(&ox1h, &ox1), &want)) / norm2(&ox1h);

    let checks = evaluate_bounds(
        &BoundInputs {
            sigma_tail: svd.sigma[inst.k],
            lambda: inst.lambda,
            b_norm: norm2(b),
            x_true: &xbar,
            x1: &ox1,
            x1hat: &ox1h,
        },
        0.0,
    )
    .map_err(e)?;
    let ratio = |name: &str| checks.iter().find(|c| c.name == name).unwrap().ratio;
    let sup = svd.sigma[inst.k..]
        .iter()
        .map(|s| s / (inst.lambda + s * s))
        .fold(0.0, f64::max);
    let x1_actual = checks[0].actual;
    Ok(Solved {
        label: inst.label.clone(),
        tail_ratio: svd.sigma[inst.k].powi(2) / inst.lambda,
        x1_sup_ratio: x1_actual / (sup * norm2(b)),
        scheme_diff,
        projection,
        difference,
        bound_ratios: [ratio("x1_abs"), ratio("x1hat_abs"), ratio("x1hat_rel"), ratio("norm_order")],
    })
}

fn scheme_equivalence(solved: &[Solved], took: Duration) -> Outcome {
    let worst = solved.iter().map(|s| s.scheme_diff).fold(0.0, f64::max);
    ensure(worst <= 1e-7, || format!("max pairwise difference {worst:e} > 1e-7"))?;
    within(Duration::from_secs(60), took)?;
    Ok(format!(
        "max pairwise difference {worst:.1e} over {} instances, shared solve {took:.2?}",
        solved.len()
    ))
}

fn projection_identities(solved: &[Solved]) -> Outcome {
    let p = solved.iter().map(|s| s.projection).fold(0.0, f64::max);
    let d = solved.iter().map(|s| s.difference).fold(0.0, f64::max);
    ensure(p <= 1e-7, || format!("projection identity {p:e} > 1e-7"))?;
    ensure(d <= 1e-7, || format!("difference identity {d:e} > 1e-7"))?;
    Ok(format!("projection {p:.1e}, difference {d:.1e}"))
}

fn error_bounds(solved: &[Solved]) -> Outcome {
    let names = ["x1 absolute", "x1hat absolute", "x1hat relative", "norm ordering"];
    let slack = 1.0 + 1e-6;
    let mut worst = [0.0f64; 4];
    for s in solved {
        for (w, r) in worst.iter_mut().zip(s.bound_ratios) {
            *w = w.max(r);
        }
    }
    let violators: Vec<String> = solved
        .iter()
        .filter(|s| s.bound_ratios[0] > slack)
        .map(|s| {
            format!(
                "{} (sigma_(k+1)^2/lambda {:.2}, ratio {:.4}, vs sup over tail {:.4})",
                s.label, s.tail_ratio, s.bound_ratios[0], s.x1_sup_ratio
            )
        })
        .collect();
    for (name, w) in names.iter().zip(worst) {
        ensure(w <= slack, || {
            let mut msg = format!("{name}: actual/bound {w} > {slack}");
            if !violators.is_empty() {
                msg += &format!("; x1 violations on {}", violators.join("; "));
            }
            msg
        })?;
    }
    Ok(format!(
        "max actual/bound: x1 {:.3}, x1hat {:.3}, relative {:.3}, norms {:.3}",
        worst[0], worst[1], worst[2], worst[3]
    ))
}

fn woodbury_inverse() -> Outcome {
    let t = Instant::now();
    let (mut wb, mut inv) = (0.0f64, 0.0f64);
    for i in 0..20u64 {
        let n = 10 + ((i * 13) % 51) as usize;
        let k = 1 + (i % 10) as usize;
        let p = gaussian_matrix(n, k, 3 * i);
        let r = gaussian_matrix(k, n, 3 * i + 1);
        let t = gaussian_matrix(k, k, 3 * i + 2).add(&DenseMatrix::identity(k).scaled(k as f64 + 1.0)).unwrap();
        let d = 0.5 + (i % 4) as f64;
        wb = wb.max(woodbury_check(d, &p, &t, &r).map_err(|e| e.to_string())?);

        let sigma: Vec<f64> = (0..k).map(|j| 3.0 * 0.7f64.powi(j as i32)).collect();
        let a = with_spectrum(n, n, &sigma, 500 + i);
        let f = randomized_lowrank_svd(&a, k, i, &SvdOptions::default()).map_err(|e| e.to_string())?;
        let lambda = [0.1, 1.0, 10.0][(i % 3) as usize];
        inv = inv.max(inverse_identity_check(&f, lambda).map_err(|e| e.to_string())?);
    }
    ensure(wb <= 1e-10, || format!("woodbury {wb:e} > 1e-10"))?;
    ensure(inv <= 1e-10, || format!("inverse identity {inv:e} > 1e-10"))?;
    within(Duration::from_secs(10), t.elapsed())?;
    Ok(format!("woodbury {wb:.1e}, inverse identity {inv:.1e}"))
}

fn compression_ratio() -> Outcome {
    let t = Instant::now();
    let a = gen_kernel_matrix(&SyntheticKernelConfig::default()).map_err(|e| e.to_string())?;
    ensure(a.nrows() == 500 && a.ncols() == 1024, || "kernel shape".into())?;
    let c = compress_rows(&a, WaveletSpec::cdf97(5).unwrap(), ThresholdPolicy::KeepFraction(0.3)).unwrap();
    let rep = compression_report(&a, &c).unwrap();
    let err = matvec_error_report(&a, &c, 50, 8, Execution::Parallel).unwrap();
    let (ax, aty, atax) = (ErrorReport::mean(&err.ax), ErrorReport::mean(&err.aty), ErrorReport::mean(&err.atax));
    ensure(err.skipped == 0, || format!("{} trials skipped", err.skipped))?;
    ensure(rep.byte_ratio >= 3.0, || format!("byte ratio {:.3} < 3", rep.byte_ratio))?;
    ensure(ax <= 15.0 && aty <= 15.0, || format!("Ax {ax:.2}% / Aty {aty:.2}% > 15%"))?;
    ensure(atax <= 25.0, || format!("AtAx {atax:.2}% > 25%"))?;
    within(Duration::from_secs(60), t.elapsed())?;
    Ok(format!(
        "byte ratio {:.2}, mean error Ax {ax:.2}%, Aty {aty:.2}%, AtAx {atax:.2}%",
        rep.byte_ratio
    ))
}

fn chi_squared_unit() -> Outcome {
    let r = [1.0, 2.0, 10.0];
    let mask = update_outliers(&r);
    ensure(mask == [false, false, true], || format!("mask {mask:?}"))?;
    let p = mask.iter().filter(|&&o| !o).count();
    ensure(p == 2, || format!("P = {p}"))?;
    let chi2 = chi_squared(&r, &mask).map_err(|e| e.to_string())?;
    ensure(chi2 == 2.5, || format!("chi2 = {chi2}"))?;

    let a = with_spectrum(120, 80, &(0..80).map(|j| 0.95f64.powi(j)).collect::<Vec<_>>(), 9);
    let mut b = a.matvec(&rng::gaussian_vec(9, 0, 80)).unwrap();
    for (i, e) in rng::gaussian_vec(9, 1, 120).into_iter().enumerate() {
        b[i] += if i % 15 == 0 { 30.0 } else { e };
    }
    let cfg = RegConfig::tikhonov(1e-3).with_tolerance(0.0, 40);
    let rep = solve_true(&a, &b, &cfg, Some(ResidualMonitor { op: &a, b: &b })).map_err(|e| e.to_string())?;
    let at: Vec<usize> = rep.outlier_events.iter().map(|e| e.iteration).collect();
    ensure(at == [5, 25], || format!("checkpoints fired at {at:?}"))?;
    let flagged = rep.outlier_mask.iter().filter(|&&o| o).count();
    ensure(rep.p == 120 - flagged, || "P inconsistent with mask".into())?;
    Ok(format!("chi2 {chi2}, P {p}; checkpoints {at:?}, {flagged} rows flagged"))
}

fn checkerboard() -> Outcome {
    let t = Instant::now();
    let cfg = CheckerboardConfig {
        grid_rows: 24,
        grid_cols: 32,
        cell: 4,
        amplitude: 1.0,
        band: (0, 24),
    };
    let id = checkerboard_experiment(&Identity(24 * 32), &cfg, &RegConfig::tikhonov(1e-6))
        .map_err(|e| e.to_string())?;
    ensure(id.band_correlation >= 0.999, || format!("identity correlation {}", id.band_correlation))?;

    let band = (8, 16);
    let kernel = gen_kernel_matrix(&SyntheticKernelConfig {
        nrows: 300,
        grid_rows: 24,
        grid_cols: 32,
        width_range: (1.5, 4.0),
        active_rows: Some(band),
        seed: 4,
        ..Default::default()
    })
    .map_err(|e| e.to_string())?;
    let res = checkerboard_experiment(
        &kernel,
        &CheckerboardConfig { band, ..cfg },
        &RegConfig::tikhonov(1e-4).with_tolerance(1e-10, 3000),
    )
    .map_err(|e| e.to_string())?;
    ensure(res.leakage <= 1e-8, || format!("leakage {:e} > 1e-8", res.leakage))?;
    within(Duration::from_secs(20), t.elapsed())?;
    Ok(format!(
        "identity correlation {:.6}, band leakage {:.1e} (band correlation {:.3})",
        id.band_correlation, res.leakage, res.band_correlation
    ))
}

fn cli(dir: &Path, args: &[&str]) -> Result<(), String> {
    let d = dir.display().to_string();
    let args: Vec<String> = args.iter().map(|a| a.replace('@', &d)).collect();
    let out = Command::new(env!("CARGO_BIN_EXE_regcompress"))
        .args(&args)
        .output()
        .map_err(|e| e.to_string())?;
    ensure(out.status.success(), || {
        format!(
            "`{}` exited {:?}: {}",
            args.join(" "),
            out.status.code(),
            String::from_utf8_lossy(&out.stderr).trim()
        )
    })
}

fn pipeline(dir: &Path, threads: &str) -> Result<(), String> {
    let gen = [
        "--threads", threads, "gen", "--rows", "200", "--grid-rows", "10", "--grid-cols", "30", "--width-min", "1.5",
        "--width-max", "4", "--seed", "11", "--matrix", "@/a.spr", "--model", "@/x.vec", "--rhs", "@/b.vec",
        "--noise", "0.01",
    ];
    cli(dir, &gen)?;
    cli(dir, &["--threads", threads, "compress", "--input", "@/a.spr", "--out", "@/a.spc", "--keep-fraction", "0.3"])?;
    cli(dir, &["--threads", threads, "svd", "--operator", "@/a.spc", "--k", "20", "--seed", "11", "--out", "@/f.lrk"])?;
    for s in ["x1", "x3"] {
        let out = format!("@/{s}.vec");
        cli(
            dir,
            &[
                "--threads", threads, "solve", "--scheme", s, "--factors", "@/f.lrk", "--operator", "@/a.spc",
                "--rhs", "@/b.vec", "--lambda1", "0.1", "--tol", "1e-13", "--iters", "2000", "--out", &out,
            ],
        )?;
    }
    cli(
        dir,
        &[
            "--threads", threads, "validate", "--operator", "@/a.spr", "--rhs", "@/b.vec", "--k", "10", "--lambda",
            "1", "--seed", "11", "--out", "@/validate.txt",
        ],
    )
}

fn cli_end_to_end() -> Outcome {
    let t = Instant::now();
    let one = tempfile::tempdir().map_err(|e| e.to_string())?;
    let two = tempfile::tempdir().map_err(|e| e.to_string())?;
    pipeline(one.path(), "4")?;
    let x1 = regcompress::io::read_vector(one.path().join("x1.vec")).map_err(|e| e.to_string())?;
    let x3 = regcompress::io::read_vector(one.path().join("x3.vec")).map_err(|e| e.to_string())?;
    let diff = rel_diff(&x1, &x3);
    ensure(diff <= 1e-7, || format!("x1 vs x3 {diff:e} > 1e-7"))?;
    pipeline(two.path(), "1")?;
    let files = [
        "a.spr", "x.vec", "b.vec", "a.spc", "f.lrk", "x1.vec", "x1.vec.csv", "x3.vec", "x3.vec.csv", "validate.txt",
    ];
    for f in files {
        let a = std::fs::read(one.path().join(f)).map_err(|e| e.to_string())?;
        let b = std::fs::read(two.path().join(f)).map_err(|e| e.to_string())?;
        ensure(a == b, || format!("{f} differs between identical runs"))?;
    }
    within(Duration::from_secs(120), t.elapsed())?;
    Ok(format!("pipeline exit 0, x1 vs x3 {diff:.1e}, {} outputs byte-identical", files.len()))
}

fn main() {
    let mut failed = 0;
    let mut report = |id: usize, name: &str, took: Duration, r: std::thread::Result<Outcome>| {
        let r = r.unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        match r {
            Ok(detail) => println!("PASS [{id:>2}] {name}: {detail} ({took:.2?})"),
            Err(why) => {
                failed += 1;
                println!("FAIL [{id:>2}] {name}: {why} ({took:.2?})");
            }
        }
    };
    let mut timed = |id: usize, name: &str, f: &dyn Fn() -> Outcome| {
        let t = Instant::now();
        let r = catch_unwind(AssertUnwindSafe(f));
        report(id, name, t.elapsed(), r);
    };
    timed(1, "wavelet round trip and adjoint", &wavelet_round_trip);
    timed(2, "lossless compression equivalence", &lossless_equivalence);
    timed(3, "randomized SVD on exact-rank matrices", &randomized_svd);

    let t = Instant::now();
    let insts = instances();
    let solved: Result<Vec<Solved>, String> = catch_unwind(|| insts.iter().map(solve_instance).collect())
        .unwrap_or_else(|_| Err("instance solve panicked".into()));
    let took = t.elapsed();
    match solved {
        Ok(s) => {
            timed(4, "scheme equivalence x1 = x2 = x3", &|| scheme_equivalence(&s, took));
            timed(5, "projection and difference identities", &|| projection_identities(&s));
            timed(6, "error bounds and norm ordering", &|| error_bounds(&s));
        }
        Err(e) => {
            for (id, name) in [(4, "scheme equivalence"), (5, "projection identities"), (6, "error bounds")] {
                timed(id, name, &|| Err(e.clone()));
            }
        }
    }
    timed(7, "Woodbury and inverse identities", &woodbury_inverse);
    timed(8, "compression ratio on the smooth kernel", &compression_ratio);
    timed(9, "chi-squared and outlier checkpoints", &chi_squared_unit);
    timed(10, "checkerboard recovery and band leakage", &checkerboard);
    timed(11, "CLI pipeline and reproducibility", &cli_end_to_end);
    drop(timed);

    println!("acceptance: {} of 11 criteria passed", 11 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
