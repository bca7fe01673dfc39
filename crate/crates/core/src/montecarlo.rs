//! Samplers for stable and tempered stable subordinators and for drifted and
//! reflected Brownian endpoints, with the estimators used to check them
//! against closed forms.
//!
//! Batches are drawn in fixed blocks of [`BLOCK_LEN`] samples. Block `b` owns
//! the ChaCha stream `(seed, b)`, so the output does not depend on how many
//! threads run the blocks.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp1, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::params::{DriftSpec, TemperParams};

/// Samples per independent RNG stream.
pub const BLOCK_LEN: usize = 1 << 15;

/// Rejection tempering is refused above this value of `t eta^alpha`.
pub const MAX_TEMPER_COST: f64 = 30.0;

fn normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample(StandardNormal)
}

/// One draw of the 1/2-stable subordinator at time `t`,
/// `E e^{-lambda S_t} = e^{-t sqrt(lambda)}`, via `S = t^2 / (2 N^2)`.
pub fn sample_stable_half<R: Rng + ?Sized>(t: f64, rng: &mut R) -> f64 {
    loop {
        let n = normal(rng);
        if n != 0.0 {
            return t * t / (2.0 * n * n);
        }
    }
}

/// One draw of the `alpha`-stable subordinator at time `t`,
/// `E e^{-lambda S_t} = e^{-t lambda^alpha}`, by Kanter's representation
/// `S_1 = (A(U) / E)^{(1-alpha)/alpha}` with `U ~ U(0, pi)`, `E ~ Exp(1)`.
pub fn sample_positive_stable<R: Rng + ?Sized>(alpha: f64, t: f64, rng: &mut R) -> f64 {
    if alpha == 0.5 {
        return sample_stable_half(t, rng);
    }
    loop {
        let u: f64 = PI * rng.random::<f64>();
        let e: f64 = rng.sample(Exp1);
        if u == 0.0 || e == 0.0 {
            continue;
        }
        let a = (alpha * u).sin().powf(alpha / (1.0 - alpha)) * ((1.0 - alpha) * u).sin()
            / u.sin().powf(1.0 / (1.0 - alpha));
        let s = (a / e).powf((1.0 - alpha) / alpha) * t.powf(1.0 / alpha);
        if s > 0.0 && s.is_finite() {
            return s;
        }
    }
}

fn check_temper_cost(p: &TemperParams, t: f64) -> Result<()> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(invalid(format!("t must be finite and > 0, got {t}")));
    }
    let cost = t * p.eta().powf(p.alpha());
    if cost > MAX_TEMPER_COST {
        return Err(Error::AcceptanceStarvation { exponent: cost });
    }
    Ok(())
}

/// Stable proposals until one is accepted with probability `e^{-eta S}`;
/// returns the draw and the number of proposals used.
fn tempered_draw<R: Rng + ?Sized>(p: &TemperParams, t: f64, rng: &mut R) -> (f64, u64) {
    let mut attempts = 0;
    loop {
        attempts += 1;
        let s = sample_positive_stable(p.alpha(), t, rng);
        if p.eta() == 0.0 || rng.random::<f64>() < (-p.eta() * s).exp() {
            return (s, attempts);
        }
    }
}

/// One draw of the tempered stable subordinator `H_t`,
/// `E e^{-lambda H_t} = e^{-t((eta+lambda)^alpha - eta^alpha)}`.
pub fn sample_tempered_subordinator<R: Rng + ?Sized>(p: &TemperParams, t: f64, rng: &mut R) -> Result<f64> {
    check_temper_cost(p, t)?;
    Ok(tempered_draw(p, t, rng).0)
}

/// `x0 + mu t + sqrt(2t) N`.
pub fn sample_drifted_endpoint<R: Rng + ?Sized>(d: &DriftSpec, t: f64, rng: &mut R) -> f64 {
    d.x0() + d.mu() * t + (2.0 * t).sqrt() * normal(rng)
}

/// `x0 + |sqrt(2t) N + mu t|`.
pub fn sample_reflected_endpoint<R: Rng + ?Sized>(d: &DriftSpec, t: f64, rng: &mut R) -> f64 {
    d.x0() + ((2.0 * t).sqrt() * normal(rng) + d.mu() * t).abs()
}

/// Inverse 1/2-stable subordinator at time `t`, equal in law to `|B(t)|`.
pub fn sample_inverse_stable_half<R: Rng + ?Sized>(t: f64, rng: &mut R) -> f64 {
    ((2.0 * t).sqrt() * normal(rng)).abs()
}

/// What a [`SampleBatch`] holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Process {
    Stable,
    TemperedSubordinator,
    Drifted,
    Reflected,
    InverseStableHalf,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BatchParams {
    Temper(TemperParams),
    Drift(DriftSpec),
    None,
}

/// Monte Carlo draws with the metadata that reproduces them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleBatch {
    pub process: Process,
    pub params: BatchParams,
    pub t: f64,
    pub seed: u64,
    pub samples: Vec<f64>,
    /// Proposals consumed; equals `samples.len()` except for rejection sampling.
    pub attempts: u64,
}

impl SampleBatch {
    /// A batch of given values with no provenance, mostly for tests.
    pub fn from_samples(process: Process, samples: Vec<f64>) -> Self {
        let attempts = samples.len() as u64;
        Self {
            process,
            params: BatchParams::None,
            t: 0.0,
            seed: 0,
            samples,
            attempts,
        }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Fraction of proposals accepted.
    pub fn acceptance_rate(&self) -> f64 {
        self.samples.len() as f64 / self.attempts as f64
    }
}

fn block_rng(seed: u64, block: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(block as u64);
    rng
}

/// Run `draw` for `n` samples split in fixed blocks; `draw` returns a sample
/// and the proposals it used.
fn draw_blocks<F>(n: usize, seed: u64, draw: F) -> (Vec<f64>, u64)
where
    F: Fn(&mut ChaCha8Rng) -> (f64, u64) + Sync,
{
    let blocks = n.div_ceil(BLOCK_LEN);
    let parts: Vec<(Vec<f64>, u64)> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let len = BLOCK_LEN.min(n - b * BLOCK_LEN);
            let mut rng = block_rng(seed, b);
            let mut out = Vec::with_capacity(len);
            let mut attempts = 0;
            for _ in 0..len {
                let (s, a) = draw(&mut rng);
                out.push(s);
                attempts += a;
            }
            (out, attempts)
        })
        .collect();
    let attempts = parts.iter().map(|(_, a)| a).sum();
    (parts.into_iter().flat_map(|(s, _)| s).collect(), attempts)
}

fn check_t(t: f64) -> Result<()> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(invalid(format!("t must be finite and > 0, got {t}")));
    }
    Ok(())
}

/// `n` draws of the `alpha`-stable subordinator (tempering ignored).
pub fn stable_batch(alpha: f64, t: f64, n: usize, seed: u64) -> Result<SampleBatch> {
    check_t(t)?;
    let p = TemperParams::new(alpha, 0.0)?;
    let (samples, attempts) = draw_blocks(n, seed, |rng| (sample_positive_stable(alpha, t, rng), 1));
    Ok(SampleBatch {
        process: Process::Stable,
        params: BatchParams::Temper(p),
        t,
        seed,
        samples,
        attempts,
    })
}

/// `n` accepted draws of the tempered stable subordinator.
pub fn tempered_batch(p: &TemperParams, t: f64, n: usize, seed: u64) -> Result<SampleBatch> {
    check_temper_cost(p, t)?;
    let (samples, attempts) = draw_blocks(n, seed, |rng| tempered_draw(p, t, rng));
    Ok(SampleBatch {
        process: Process::TemperedSubordinator,
        params: BatchParams::Temper(*p),
        t,
        seed,
        samples,
        attempts,
    })
}

pub fn drifted_batch(d: &DriftSpec, t: f64, n: usize, seed: u64) -> Result<SampleBatch> {
    check_t(t)?;
    let (samples, attempts) = draw_blocks(n, seed, |rng| (sample_drifted_endpoint(d, t, rng), 1));
    Ok(SampleBatch {
        process: Process::Drifted,
        params: BatchParams::Drift(*d),
        t,
        seed,
        samples,
        attempts,
    })
}

pub fn reflected_batch(d: &DriftSpec, t: f64, n: usize, seed: u64) -> Result<SampleBatch> {
    check_t(t)?;
    if d.x0() < 0.0 {
        return Err(invalid(format!("reflected process needs x0 >= 0, got {}", d.x0())));
    }
    let (samples, attempts) = draw_blocks(n, seed, |rng| (sample_reflected_endpoint(d, t, rng), 1));
    Ok(SampleBatch {
        process: Process::Reflected,
        params: BatchParams::Drift(*d),
        t,
        seed,
        samples,
        attempts,
    })
}

pub fn inverse_stable_batch(t: f64, n: usize, seed: u64) -> Result<SampleBatch> {
    check_t(t)?;
    let (samples, attempts) = draw_blocks(n, seed, |rng| (sample_inverse_stable_half(t, rng), 1));
    Ok(SampleBatch {
        process: Process::InverseStableHalf,
        params: BatchParams::None,
        t,
        seed,
        samples,
        attempts,
    })
}

/// Pairwise (tree) summation; the tree depends only on the length.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    const LEAF: usize = 32;
    if xs.len() <= LEAF {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

/// Sample mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimateWithError {
    pub value: f64,
    pub stderr: f64,
    pub n: usize,
}

impl EstimateWithError {
    /// Mean and standard error of `xs`, reduced pairwise.
    pub fn from_values(xs: &[f64]) -> Result<Self> {
        if xs.is_empty() {
            return Err(Error::EmptyBatch);
        }
        if xs.len() < 2 {
            return Err(invalid("a standard error needs at least 2 samples"));
        }
        let n = xs.len();
        let mean = pairwise_sum(xs) / n as f64;
        let dev: Vec<f64> = xs.iter().map(|x| (x - mean) * (x - mean)).collect();
        let var = pairwise_sum(&dev) / (n - 1) as f64;
        Ok(Self {
            value: mean,
            stderr: (var / n as f64).sqrt(),
            n,
        })
    }

    /// `|value - target| <= k * stderr`.
    pub fn within(&self, target: f64, k: f64) -> bool {
        (self.value - target).abs() <= k * self.stderr
    }
}

/// Estimate of `E e^{-lambda X}` from a batch.
pub fn empirical_laplace(batch: &SampleBatch, lambda: f64) -> Result<EstimateWithError> {
    if batch.is_empty() {
        return Err(Error::EmptyBatch);
    }
    if !(lambda >= 0.0) {
        return Err(invalid(format!("lambda must be >= 0, got {lambda}")));
    }
    let vals: Vec<f64> = batch.samples.iter().map(|s| (-lambda * s).exp()).collect();
    EstimateWithError::from_values(&vals)
}

/// Kolmogorov-Smirnov distance between the batch's empirical distribution
/// and `cdf`.
pub fn ks_statistic<F: Fn(f64) -> f64>(batch: &SampleBatch, cdf: F) -> Result<f64> {
    if batch.is_empty() {
        return Err(Error::EmptyBatch);
    }
    let mut xs = batch.samples.clone();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    let mut prev = f64::NEG_INFINITY;
    let mut d: f64 = 0.0;
    for (i, x) in xs.iter().enumerate() {
        let f = cdf(*x);
        if f < prev - 1e-12 || !(-1e-12..=1.0 + 1e-12).contains(&f) {
            return Err(Error::NonMonotoneCdf { at: *x });
        }
        prev = prev.max(f);
        let i = i as f64;
        d = d.max((i + 1.0) / n - f).max(f - i / n);
    }
    Ok(d)
}

/// Asymptotic 1% critical value of the one-sample KS statistic.
pub fn ks_critical_1pct(n: usize) -> f64 {
    1.628 / (n as f64).sqrt()
}
