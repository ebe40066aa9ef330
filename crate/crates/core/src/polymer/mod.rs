//! Monte Carlo for the log-Gamma polymer on `{1..n}²` and its zero-temperature
//! limit, last passage percolation with exponential weights.

pub mod rng;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
pub use rng::SiteRng;

pub const MAX_N: usize = 4096;
pub const MAX_SAMPLES: u64 = 100_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub n: usize,
    pub theta: f64,
    pub samples: u64,
    pub seed: u64,
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.n > MAX_N {
            return Err(Error::Config(format!("n must lie in [1, {MAX_N}], got {}", self.n)));
        }
        if !(self.theta > 0.0 && self.theta.is_finite()) {
            return Err(Error::Config(format!("theta must be positive, got {}", self.theta)));
        }
        if self.samples == 0 || self.samples > MAX_SAMPLES {
            return Err(Error::Config(format!(
                "samples must lie in [1, {MAX_SAMPLES}], got {}",
                self.samples
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimSummary {
    #[serde(rename = "mean_logZ")]
    pub mean_log_z: f64,
    #[serde(rename = "var_logZ")]
    pub var_log_z: f64,
    pub stderr_mean: f64,
    pub samples_used: u64,
}

/// Uniform on (0, 1].
#[inline]
fn open_uniform<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    1.0 - rng.random::<f64>()
}

/// `log G` for `G ~ Gamma(shape, 1)`: Marsaglia–Tsang, with the
/// `G_a = G_{a+1} U^{1/a}` boost for `shape < 1` applied in log space.
pub fn sample_log_gamma<R: Rng + ?Sized>(shape: f64, rng: &mut R) -> f64 {
    if shape < 1.0 {
        let boost = open_uniform(rng).ln() / shape;
        return sample_log_gamma(shape + 1.0, rng) + boost;
    }
    let d = shape - 1.0 / 3.0;
    let c = 1.0 / (9.0 * d).sqrt();
    loop {
        let x: f64 = StandardNormal.sample(rng);
        let t = 1.0 + c * x;
        if t <= 0.0 {
            continue;
        }
        let v = t * t * t;
        let u = open_uniform(rng);
        if u.ln() < 0.5 * x * x + d - d * v + d * v.ln() {
            return (d * v).ln();
        }
    }
}

/// `log d` for `d` inverse-Gamma with shape `2θ`.
pub fn sample_log_inverse_gamma<R: Rng + ?Sized>(theta: f64, rng: &mut R) -> f64 {
    -sample_log_gamma(2.0 * theta, rng)
}

/// `d = 1/G`, `G ~ Gamma(2θ, 1)`.
pub fn sample_inverse_gamma<R: Rng + ?Sized>(theta: f64, rng: &mut R) -> f64 {
    sample_log_inverse_gamma(theta, rng).exp()
}

/// `log(e^a + e^b)`; returns the max when the gap exceeds 40.
#[inline]
pub fn logaddexp(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    let gap = hi - lo;
    if gap > 40.0 || lo == f64::NEG_INFINITY {
        hi
    } else {
        hi + (-gap).exp().ln_1p()
    }
}

/// Generic corner-growth recursion `T(i,j) = w(i,j) ⊕ (T(i−1,j) ⊗ T(i,j−1))`
/// with `combine` as the path-merging operation.
fn corner_growth<W, C>(n: usize, mut weight: W, combine: C) -> f64
where
    W: FnMut(usize, usize) -> f64,
    C: Fn(f64, f64) -> f64,
{
    let mut row = vec![0.0f64; n];
    for i in 0..n {
        for j in 0..n {
            let w = weight(i, j);
            row[j] = match (i, j) {
                (0, 0) => w,
                (0, _) => w + row[j - 1],
                (_, 0) => w + row[j],
                _ => w + combine(row[j], row[j - 1]),
            };
        }
    }
    row[n - 1]
}

/// `log Z_n` for given site log-weights.
pub fn log_partition_with<W: FnMut(usize, usize) -> f64>(n: usize, log_weight: W) -> f64 {
    corner_growth(n, log_weight, logaddexp)
}

/// Last passage time for given site weights.
pub fn lpp_with<W: FnMut(usize, usize) -> f64>(n: usize, weight: W) -> f64 {
    corner_growth(n, weight, f64::max)
}

/// Log-weight of site `(i, j)` in sample `sample`.
pub fn site_log_weight(seed: u64, sample: u64, i: usize, j: usize, theta: f64) -> f64 {
    let mut rng = SiteRng::new(seed, sample, i as u64, j as u64);
    sample_log_inverse_gamma(theta, &mut rng)
}

/// Exponential weight of site `(i, j)` in sample `sample`.
pub fn site_exp_weight(seed: u64, sample: u64, i: usize, j: usize) -> f64 {
    let mut rng = SiteRng::new(seed, sample, i as u64, j as u64);
    -open_uniform(&mut rng).ln()
}

/// `log Z_n(θ)` for sample `sample` of the environment keyed by `seed`.
pub fn log_partition(n: usize, theta: f64, seed: u64, sample: u64) -> f64 {
    log_partition_with(n, |i, j| site_log_weight(seed, sample, i, j, theta))
}

/// Last passage time over `{1..n}²` with Exp(1) weights.
pub fn lpp_time(n: usize, seed: u64, sample: u64) -> f64 {
    lpp_with(n, |i, j| site_exp_weight(seed, sample, i, j))
}

/// Brute-force `log Σ_paths Π w` or `max_paths Σ w` over all up-right paths (small n).
pub fn enumerate_paths(n: usize, weights: &[f64], log_sum: bool) -> f64 {
    fn walk(n: usize, i: usize, j: usize, acc: f64, w: &[f64], out: &mut Vec<f64>) {
        let acc = acc + w[i * n + j];
        if i == n - 1 && j == n - 1 {
            out.push(acc);
            return;
        }
        if i + 1 < n {
            walk(n, i + 1, j, acc, w, out);
        }
        if j + 1 < n {
            walk(n, i, j + 1, acc, w, out);
        }
    }
    let mut totals = Vec::new();
    walk(n, 0, 0, 0.0, weights, &mut totals);
    if log_sum {
        let m = totals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        m + totals.iter().map(|t| (t - m).exp()).sum::<f64>().ln()
    } else {
        totals.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
    }
}

fn mean_var(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = if xs.len() > 1 {
        xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    (mean, var)
}

/// `log Z_n` for samples `0..samples`, in sample order.
pub fn log_partition_samples(cfg: &SimConfig) -> Result<Vec<f64>> {
    cfg.validate()?;
    Ok((0..cfg.samples)
        .into_par_iter()
        .map(|k| log_partition(cfg.n, cfg.theta, cfg.seed, k))
        .collect())
}

/// Mean and variance of `log Z_n`; independent of the thread count.
pub fn mc_summary(cfg: &SimConfig) -> Result<SimSummary> {
    let xs = log_partition_samples(cfg)?;
    let (mean, var) = mean_var(&xs);
    Ok(SimSummary {
        mean_log_z: mean,
        var_log_z: var,
        stderr_mean: (var / xs.len() as f64).sqrt(),
        samples_used: xs.len() as u64,
    })
}

/// Last passage times for samples `0..samples`.
pub fn lpp_samples(n: usize, samples: u64, seed: u64) -> Result<Vec<f64>> {
    SimConfig {
        n,
        theta: 1.0,
        samples,
        seed,
    }
    .validate()?;
    Ok((0..samples).into_par_iter().map(|k| lpp_time(n, seed, k)).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub estimate: f64,
    pub stderr: f64,
}

/// Monte Carlo estimate of `E exp(−u Z_n(θ))`.
pub fn mc_laplace(n: usize, theta: f64, u: f64, samples: u64, seed: u64) -> Result<McEstimate> {
    if !(u >= 0.0 && u.is_finite()) {
        return Err(Error::Domain(format!("u must be >= 0, got {u}")));
    }
    let cfg = SimConfig {
        n,
        theta,
        samples,
        seed,
    };
    cfg.validate()?;
    if u == 0.0 {
        return Ok(McEstimate {
            estimate: 1.0,
            stderr: 0.0,
        });
    }
    let ln_u = u.ln();
    let xs: Vec<f64> = (0..samples)
        .into_par_iter()
        .map(|k| (-(ln_u + log_partition(n, theta, seed, k)).exp()).exp())
        .collect();
    let (mean, var) = mean_var(&xs);
    Ok(McEstimate {
        estimate: mean,
        stderr: (var / xs.len() as f64).sqrt(),
    })
}

pub const SIM_CSV_HEADER: &str = "n,theta,samples,seed,mean_logZ,var_logZ,stderr";

pub fn sim_csv_row(cfg: &SimConfig, s: &SimSummary) -> String {
    format!(
        "{},{:.16e},{},{},{:.16e},{:.16e},{:.16e}",
        cfg.n, cfg.theta, cfg.samples, cfg.seed, s.mean_log_z, s.var_log_z, s.stderr_mean
    )
}

/// Least-squares slope of `ys` against `xs`.
pub fn ls_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let (mx, _) = mean_var(xs);
    let (my, _) = mean_var(ys);
    let num: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let den: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    num / den
}

/// Two-sample Kolmogorov–Smirnov distance.
pub fn ks_distance(a: &[f64], b: &[f64]) -> f64 {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (mut i, mut j, mut d) = (0usize, 0usize, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / a.len() as f64 - j as f64 / b.len() as f64).abs());
    }
    d
}
