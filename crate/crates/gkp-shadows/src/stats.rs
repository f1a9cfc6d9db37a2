//! Small statistics helpers shared by the Monte Carlo routines.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use statrs::distribution::{ChiSquared, ContinuousCDF};

/// Samples handled by one deterministic RNG stream in [`parallel_chunks`].
pub const CHUNK: usize = 4096;

/// Independent RNG stream `stream` derived from `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Runs `f(rng, count)` over `total` samples split into fixed-size chunks,
/// each with its own stream, and returns the chunk results in order.
///
/// Results do not depend on the number of worker threads.
pub fn parallel_chunks<T, F>(total: usize, seed: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut ChaCha8Rng, usize) -> T + Sync,
{
    let chunks = total.div_ceil(CHUNK);
    (0..chunks)
        .into_par_iter()
        .map(|c| {
            let count = CHUNK.min(total - c * CHUNK);
            let mut rng = stream_rng(seed, c as u64);
            f(&mut rng, count)
        })
        .collect()
}

/// Mean and standard error of the mean.
pub fn mean_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, f64::NAN);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Running sums for mean and variance.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Moments {
    /// Sample count.
    pub n: f64,
    /// Sum of values.
    pub sum: f64,
    /// Sum of squared values.
    pub sum_sq: f64,
}

impl Moments {
    /// Adds one value.
    pub fn push(&mut self, x: f64) {
        self.n += 1.0;
        self.sum += x;
        self.sum_sq += x * x;
    }

    /// Combines two accumulators.
    pub fn merge(self, o: Moments) -> Moments {
        Moments { n: self.n + o.n, sum: self.sum + o.sum, sum_sq: self.sum_sq + o.sum_sq }
    }

    /// Sample mean.
    pub fn mean(&self) -> f64 {
        self.sum / self.n
    }

    /// Unbiased sample variance.
    pub fn variance(&self) -> f64 {
        ((self.sum_sq - self.sum * self.sum / self.n) / (self.n - 1.0)).max(0.0)
    }

    /// Standard error of the mean.
    pub fn stderr(&self) -> f64 {
        (self.variance() / self.n).sqrt()
    }
}

/// Median of a slice (mean of the two central values for even length).
pub fn median(xs: &[f64]) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(|a, b| a.total_cmp(b));
    let k = v.len();
    if k == 0 {
        f64::NAN
    } else if k % 2 == 1 {
        v[k / 2]
    } else {
        0.5 * (v[k / 2 - 1] + v[k / 2])
    }
}

/// Median of `k` consecutive batch means; returns `(median, batch_means)`.
/// Trailing values that do not fill a batch are ignored.
pub fn median_of_means(xs: &[f64], k: usize) -> (f64, Vec<f64>) {
    let k = k.max(1);
    let b = (xs.len() / k).max(1);
    let means: Vec<f64> = xs
        .chunks(b)
        .take(k)
        .map(|c| c.iter().sum::<f64>() / c.len() as f64)
        .collect();
    (median(&means), means)
}

/// Least-squares slope and intercept of `y` against `x`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// Pearson chi-square statistic and upper-tail p-value for observed counts
/// against expected counts; bins with expectation below 5 are pooled.
pub fn chi_square(observed: &[f64], expected: &[f64]) -> (f64, f64, usize) {
    let (mut stat, mut bins) = (0.0, 0usize);
    let (mut po, mut pe) = (0.0, 0.0);
    for (o, e) in observed.iter().zip(expected) {
        if *e < 5.0 {
            po += o;
            pe += e;
            continue;
        }
        stat += (o - e).powi(2) / e;
        bins += 1;
    }
    if pe > 0.0 {
        stat += (po - pe).powi(2) / pe;
        bins += 1;
    }
    let dof = (bins.max(2) - 1) as f64;
    let p = 1.0 - ChiSquared::new(dof).expect("positive dof").cdf(stat);
    (stat, p, bins)
}
