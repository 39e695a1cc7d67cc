//! One-dimensional wavelet transforms and coefficient thresholding.
//!
//! Two families are provided: the orthonormal Haar transform and the
//! biorthogonal CDF 9/7 transform in lifting form with whole-sample
//! symmetric boundaries. A signal of length `n` is processed on a padded
//! length `N` (the next multiple of `2^levels`):
//!
//! * [`WaveletSpec::forward`] extends the signal symmetrically to `N` and
//!   returns `N` coefficients.
//! * [`WaveletSpec::inverse`] maps `N` coefficients back and truncates to `n`.
//! * [`WaveletSpec::inverse_transpose`] zero-extends to `N` and applies `W⁻ᵀ`.
//!
//! With `E` the zero extension and `P` the symmetric one, these are `W P`,
//! `Eᵀ W⁻¹` and `W⁻ᵀ E`, so `inverse ∘ forward` is the identity and
//! `inverse_transpose` is exactly the adjoint of `inverse`.

use crate::error::{Error, Result};

const CDF97_ALPHA: f64 = -1.586_134_342_059_924;
const CDF97_BETA: f64 = -0.052_980_118_572_961;
const CDF97_GAMMA: f64 = 0.882_911_075_530_934;
const CDF97_DELTA: f64 = 0.443_506_852_043_971;
const CDF97_ZETA: f64 = 1.149_604_398_860_241;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WaveletFamily {
    HaarOrthogonal,
    Cdf97,
}

impl WaveletFamily {
    pub fn name(self) -> &'static str {
        match self {
            WaveletFamily::HaarOrthogonal => "haar",
            WaveletFamily::Cdf97 => "cdf97",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Boundary {
    #[default]
    Symmetric,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WaveletSpec {
    family: WaveletFamily,
    levels: u32,
    boundary: Boundary,
}

#[derive(Clone, Copy)]
enum Parity {
    Even,
    Odd,
}

/// One lifting step: every sample of `target` parity gains
/// `coef · (left neighbour + right neighbour)`.
#[derive(Clone, Copy)]
struct Lift {
    target: Parity,
    coef: f64,
}

const CDF97_STEPS: [Lift; 4] = [
    Lift { target: Parity::Odd, coef: CDF97_ALPHA },
    Lift { target: Parity::Even, coef: CDF97_BETA },
    Lift { target: Parity::Odd, coef: CDF97_GAMMA },
    Lift { target: Parity::Even, coef: CDF97_DELTA },
];

/// Whole-sample symmetric reflection: `-1 → 1`, `n → n - 2`.
fn reflect(j: isize, n: usize) -> usize {
    let last = n as isize - 1;
    let r = if j < 0 {
        -j
    } else if j > last {
        2 * last - j
    } else {
        j
    };
    r as usize
}

fn first_index(p: Parity) -> usize {
    match p {
        Parity::Even => 0,
        Parity::Odd => 1,
    }
}

fn lift(x: &mut [f64], step: Lift, coef: f64) {
    let n = x.len();
    for i in (first_index(step.target)..n).step_by(2) {
        let l = x[reflect(i as isize - 1, n)];
        let r = x[reflect(i as isize + 1, n)];
        x[i] += coef * (l + r);
    }
}

fn lift_transpose(x: &mut [f64], step: Lift, coef: f64) {
    let n = x.len();
    for i in (first_index(step.target)..n).step_by(2) {
        let v = coef * x[i];
        x[reflect(i as isize - 1, n)] += v;
        x[reflect(i as isize + 1, n)] += v;
    }
}

fn scale_parities(x: &mut [f64], even: f64, odd: f64) {
    for (i, v) in x.iter_mut().enumerate() {
        *v *= if i % 2 == 0 { even } else { odd };
    }
}

/// Interleaved `[e0, o0, e1, o1, ..]` → packed `[e0, e1, .., o0, o1, ..]`.
fn deinterleave(x: &mut [f64], scratch: &mut Vec<f64>) {
    let half = x.len() / 2;
    scratch.clear();
    scratch.extend_from_slice(x);
    for i in 0..half {
        x[i] = scratch[2 * i];
        x[half + i] = scratch[2 * i + 1];
    }
}

fn interleave(x: &mut [f64], scratch: &mut Vec<f64>) {
    let half = x.len() / 2;
    scratch.clear();
    scratch.extend_from_slice(x);
    for i in 0..half {
        x[2 * i] = scratch[i];
        x[2 * i + 1] = scratch[half + i];
    }
}

fn haar_butterfly(x: &mut [f64]) {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    for pair in x.chunks_exact_mut(2) {
        let (a, b) = (pair[0], pair[1]);
        pair[0] = s * (a + b);
        pair[1] = s * (a - b);
    }
}

impl WaveletSpec {
    pub fn new(family: WaveletFamily, levels: u32) -> Result<Self> {
        if levels == 0 {
            return Err(Error::invalid("wavelet levels must be at least 1"));
        }
        if levels > 40 {
            return Err(Error::invalid(format!("{levels} wavelet levels is unreasonable")));
        }
        Ok(Self {
            family,
            levels,
            boundary: Boundary::Symmetric,
        })
    }

    pub fn haar(levels: u32) -> Result<Self> {
        Self::new(WaveletFamily::HaarOrthogonal, levels)
    }

    pub fn cdf97(levels: u32) -> Result<Self> {
        Self::new(WaveletFamily::Cdf97, levels)
    }

    pub fn family(&self) -> WaveletFamily {
        self.family
    }

    pub fn levels(&self) -> u32 {
        self.levels
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    /// Transform-domain length for a signal of length `n`.
    pub fn padded_len(&self, n: usize) -> usize {
        let block = 1usize << self.levels;
        n.div_ceil(block).max(1) * block
    }

    fn check_padded(&self, len: usize) -> Result<()> {
        if len == 0 || len % (1usize << self.levels) != 0 {
            return Err(Error::invalid(format!(
                "coefficient length {len} is not a positive multiple of 2^{}",
                self.levels
            )));
        }
        Ok(())
    }

    /// `W P x`: symmetric extension to the padded length, then the forward transform.
    pub fn forward(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.is_empty() {
            return Err(Error::invalid("cannot transform an empty signal"));
        }
        let n = x.len();
        let big_n = self.padded_len(n);
        let mut buf: Vec<f64> = (0..big_n)
            .map(|t| {
                let p = t % (2 * n);
                x[if p < n { p } else { 2 * n - 1 - p }]
            })
            .collect();
        self.forward_in_place(&mut buf)?;
        Ok(buf)
    }

    /// `Eᵀ W⁻¹ c`: inverse transform, truncated to `len` samples.
    pub fn inverse(&self, c: &[f64], len: usize) -> Result<Vec<f64>> {
        if len == 0 || self.padded_len(len) != c.len() {
            return Err(Error::DimensionMismatch {
                context: "inverse wavelet transform",
                expected: self.padded_len(len.max(1)),
                actual: c.len(),
            });
        }
        let mut buf = c.to_vec();
        self.inverse_in_place(&mut buf)?;
        buf.truncate(len);
        Ok(buf)
    }

    /// `W⁻ᵀ E x`: zero extension to the padded length, then the inverse transpose.
    pub fn inverse_transpose(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.is_empty() {
            return Err(Error::invalid("cannot transform an empty signal"));
        }
        let mut buf = x.to_vec();
        buf.resize(self.padded_len(x.len()), 0.0);
        self.inverse_transpose_in_place(&mut buf)?;
        Ok(buf)
    }

    /// Forward transform of an already padded buffer.
    pub fn forward_in_place(&self, x: &mut [f64]) -> Result<()> {
        self.check_padded(x.len())?;
        let mut scratch = Vec::with_capacity(x.len());
        let mut len = x.len();
        for _ in 0..self.levels {
            let s = &mut x[..len];
            match self.family {
                WaveletFamily::HaarOrthogonal => haar_butterfly(s),
                WaveletFamily::Cdf97 => {
                    for step in CDF97_STEPS {
                        lift(s, step, step.coef);
                    }
                    scale_parities(s, CDF97_ZETA, 1.0 / CDF97_ZETA);
                }
            }
            deinterleave(s, &mut scratch);
            len /= 2;
        }
        Ok(())
    }

    /// Inverse transform of a padded coefficient buffer.
    pub fn inverse_in_place(&self, x: &mut [f64]) -> Result<()> {
        self.check_padded(x.len())?;
        let mut scratch = Vec::with_capacity(x.len());
        let full = x.len();
        for level in (0..self.levels).rev() {
            let s = &mut x[..full >> level];
            interleave(s, &mut scratch);
            match self.family {
                WaveletFamily::HaarOrthogonal => haar_butterfly(s),
                WaveletFamily::Cdf97 => {
                    scale_parities(s, 1.0 / CDF97_ZETA, CDF97_ZETA);
                    for step in CDF97_STEPS.iter().rev() {
                        lift(s, *step, -step.coef);
                    }
                }
            }
        }
        Ok(())
    }

    /// `W⁻ᵀ` on a padded buffer: the forward sweep run with the transposed
    /// inverse lifting steps.
    pub fn inverse_transpose_in_place(&self, x: &mut [f64]) -> Result<()> {
        self.check_padded(x.len())?;
        let mut scratch = Vec::with_capacity(x.len());
        let mut len = x.len();
        for _ in 0..self.levels {
            let s = &mut x[..len];
            match self.family {
                WaveletFamily::HaarOrthogonal => haar_butterfly(s),
                WaveletFamily::Cdf97 => {
                    for step in CDF97_STEPS {
                        lift_transpose(s, step, -step.coef);
                    }
                    scale_parities(s, 1.0 / CDF97_ZETA, CDF97_ZETA);
                }
            }
            deinterleave(s, &mut scratch);
            len /= 2;
        }
        Ok(())
    }
}

/// How [`hard_threshold`] chooses which coefficients survive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ThresholdPolicy {
    /// Keep the largest `⌈fraction · nnz⌉` nonzero entries by magnitude;
    /// ties at the cutoff go to the lower index.
    KeepFraction(f64),
    /// Zero every entry with `|c| ≤ alpha`.
    Absolute(f64),
}

impl ThresholdPolicy {
    pub fn validate(&self) -> Result<()> {
        match *self {
            ThresholdPolicy::KeepFraction(f) if !(f > 0.0 && f <= 1.0) => Err(Error::invalid(
                format!("keep fraction must lie in (0, 1], got {f}"),
            )),
            ThresholdPolicy::Absolute(a) if !(a.is_finite() && a >= 0.0) => Err(Error::invalid(
                format!("absolute threshold must be finite and non-negative, got {a}"),
            )),
            _ => Ok(()),
        }
    }

    /// Number of entries kept out of `nnz` nonzeros under `KeepFraction`.
    pub fn keep_count(fraction: f64, nnz: usize) -> usize {
        // The small offset stops 0.3 * 10 = 3.0000000000000004 from rounding up.
        (((fraction * nnz as f64) - 1e-9).ceil().max(0.0) as usize).min(nnz)
    }
}

/// Hard thresholding; output has the input's length with a shrunken support.
pub fn hard_threshold(policy: ThresholdPolicy, c: &[f64]) -> Result<Vec<f64>> {
    policy.validate()?;
    let mut out = vec![0.0; c.len()];
    match policy {
        ThresholdPolicy::Absolute(alpha) => {
            for (o, &v) in out.iter_mut().zip(c) {
                if v.abs() > alpha {
                    *o = v;
                }
            }
        }
        ThresholdPolicy::KeepFraction(f) => {
            let mut nz: Vec<usize> = (0..c.len()).filter(|&i| c[i] != 0.0).collect();
            let keep = ThresholdPolicy::keep_count(f, nz.len());
            // Stable sort keeps ascending index order among equal magnitudes.
            nz.sort_by(|&a, &b| c[b].abs().total_cmp(&c[a].abs()));
            for &i in &nz[..keep] {
                out[i] = c[i];
            }
        }
    }
    Ok(out)
}

/// Componentwise `sgn(c) · max(0, |c| − τ)`.
pub fn soft_threshold(tau: f64, c: &[f64]) -> Result<Vec<f64>> {
    if !(tau.is_finite() && tau >= 0.0) {
        return Err(Error::invalid(format!("soft threshold must be non-negative, got {tau}")));
    }
    Ok(c.iter()
        .map(|&v| v.signum() * (v.abs() - tau).max(0.0))
        .map(|v| if v == 0.0 { 0.0 } else { v })
        .collect())
}
