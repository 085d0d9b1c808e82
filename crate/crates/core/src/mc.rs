//! Deterministic randomness and Monte Carlo accumulation.
//!
//! Every random draw comes from a ChaCha8 stream keyed by the experiment seed
//! plus a path of integer identifiers (sample index, letter id, purpose), so
//! a given draw never depends on evaluation order or thread count. Estimates
//! are accumulated over fixed sample blocks whose partial sums are reduced in
//! block order, which makes every reported digit identical no matter how the
//! blocks were scheduled.

use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

/// Stream purposes; combined with the seed path so different uses of
/// randomness inside one sample never overlap.
pub mod purpose {
    /// Entries of the base ensemble draw.
    pub const ENSEMBLE: u64 = 1;
    /// The independent unitary used for conjugation.
    pub const FRAME: u64 = 2;
    /// The extra unitary drawn by the invariance probe.
    pub const PROBE: u64 = 3;
}

/// 64-bit finalizer with full avalanche (the splitmix64 mixing function).
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derives a 256-bit ChaCha key from a seed and a path of identifiers.
/// Distinct paths give independent streams; the same path always gives the
/// same stream.
pub fn rng_stream(seed: u64, path: &[u64]) -> ChaCha8Rng {
    let mut acc = mix64(seed ^ 0x5bf0_3635_16f5_a1c4);
    for (depth, &id) in path.iter().enumerate() {
        acc = mix64(acc ^ mix64(id.wrapping_add(depth as u64 + 1)));
    }
    let mut key = [0u8; 32];
    for (i, chunk) in key.chunks_mut(8).enumerate() {
        chunk.copy_from_slice(&mix64(acc ^ (i as u64 + 1)).to_le_bytes());
    }
    ChaCha8Rng::from_seed(key)
}

/// Standard complex Gaussian: independent real and imaginary parts of
/// variance one half, so `E |z|^2 = 1`.
pub fn standard_complex(rng: &mut impl Rng) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im).scale(std::f64::consts::FRAC_1_SQRT_2)
}

/// Matrix with independent standard complex Gaussian entries.
pub fn ginibre_matrix(rng: &mut impl Rng, rows: usize, cols: usize) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            out.set(i, j, standard_complex(rng));
        }
    }
    out
}

/// Hermitian Gaussian matrix normalized so the expected normalized trace of
/// its square is one. Entries are drawn for the upper triangle only and
/// mirrored, keeping the draw order independent of how the matrix is used.
pub fn gaussian_hermitian(rng: &mut impl Rng, n: usize) -> ComplexMatrix {
    let scale = 1.0 / (n as f64).sqrt();
    let mut out = ComplexMatrix::zeros(n, n);
    for i in 0..n {
        let x: f64 = rng.sample(StandardNormal);
        out.set(i, i, Complex64::new(x * scale, 0.0));
        for j in i + 1..n {
            let z = standard_complex(rng).scale(scale);
            out.set(i, j, z);
            out.set(j, i, z.conj());
        }
    }
    out
}

/// Running sums for one complex-valued statistic.
#[derive(Clone, Copy, Debug, Default)]
pub struct ComplexStats {
    sum_re: f64,
    sum_im: f64,
    sum_sq_re: f64,
    sum_sq_im: f64,
    count: u64,
}

impl ComplexStats {
    pub fn push(&mut self, z: Complex64) {
        self.sum_re += z.re;
        self.sum_im += z.im;
        self.sum_sq_re += z.re * z.re;
        self.sum_sq_im += z.im * z.im;
        self.count += 1;
    }

    /// Adds another accumulator. Callers must merge in a fixed order for
    /// reproducible floating-point totals.
    pub fn merge(&mut self, other: &ComplexStats) {
        self.sum_re += other.sum_re;
        self.sum_im += other.sum_im;
        self.sum_sq_re += other.sum_sq_re;
        self.sum_sq_im += other.sum_sq_im;
        self.count += other.count;
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn estimate(&self) -> Result<MomentEstimate> {
        if self.count == 0 {
            return Err(Error::invalid("estimate over zero samples"));
        }
        let n = self.count as f64;
        let mean = Complex64::new(self.sum_re / n, self.sum_im / n);
        let se = |sum: f64, sum_sq: f64| {
            if self.count < 2 {
                return 0.0;
            }
            let var = ((sum_sq - sum * sum / n) / (n - 1.0)).max(0.0);
            (var / n).sqrt()
        };
        Ok(MomentEstimate {
            mean,
            se_re: se(self.sum_re, self.sum_sq_re),
            se_im: se(self.sum_im, self.sum_sq_im),
            samples: self.count,
        })
    }
}

/// Sample mean of a complex statistic with per-component standard errors.
#[derive(Clone, Copy, Debug)]
pub struct MomentEstimate {
    pub mean: Complex64,
    pub se_re: f64,
    pub se_im: f64,
    pub samples: u64,
}

impl MomentEstimate {
    /// The larger of the two component standard errors.
    pub fn se_max(&self) -> f64 {
        self.se_re.max(self.se_im)
    }
}

/// Number of consecutive samples accumulated by one block job.
pub const SAMPLE_BLOCK: usize = 64;

/// Evaluates `n_samples` samples, each contributing to `n_stats` parallel
/// statistics, with deterministic totals: samples are grouped into fixed
/// blocks, each block accumulates its members in index order, and block
/// partials are merged in block order. The schedule of blocks across threads
/// cannot affect any output bit.
pub fn blocked_stats<F>(n_samples: usize, n_stats: usize, eval: F) -> Result<Vec<ComplexStats>>
where
    F: Fn(usize, &mut [ComplexStats]) + Sync,
{
    if n_samples == 0 || n_stats == 0 {
        return Err(Error::invalid("sampling plan must be non-empty"));
    }
    let n_blocks = n_samples.div_ceil(SAMPLE_BLOCK);
    let partials: Vec<Vec<ComplexStats>> = (0..n_blocks)
        .into_par_iter()
        .map(|block| {
            let lo = block * SAMPLE_BLOCK;
            let hi = (lo + SAMPLE_BLOCK).min(n_samples);
            let mut acc = vec![ComplexStats::default(); n_stats];
            for sample in lo..hi {
                eval(sample, &mut acc);
            }
            acc
        })
        .collect();
    let mut totals = vec![ComplexStats::default(); n_stats];
    for block in &partials {
        for (total, part) in totals.iter_mut().zip(block) {
            total.merge(part);
        }
    }
    Ok(totals)
}

/// Classical sample cumulants of a real-valued sequence: order one is the
/// mean, order two the unbiased variance. Higher orders are out of scope.
pub fn sample_cumulant(samples: &[f64], order: usize) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::invalid("cumulant of an empty sample"));
    }
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    match order {
        1 => Ok(mean),
        2 => {
            if samples.len() < 2 {
                return Err(Error::invalid("variance needs at least two samples"));
            }
            Ok(samples.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0))
        }
        _ => Err(Error::Unsupported(format!(
            "sample cumulants of order {order} are not provided"
        ))),
    }
}
