//! Wall-clock latency of single-sample generation.

use std::hint::black_box;
use std::time::Instant;

use anyhow::{bail, Result};
use lerpgan_core::infer::InferenceSession;
use lerpgan_core::Rng;
use serde::{Deserialize, Serialize};

pub const MIN_ITERATIONS: usize = 100;
pub const WARMUP: usize = 10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub iterations: usize,
    pub mean_us: f64,
    pub p50_us: f64,
    pub p99_us: f64,
}

/// Nearest-rank percentile of ascending `sorted`.
pub fn percentile(sorted: &[f64], p: f64) -> f64 {
    let rank = (p / 100.0 * sorted.len() as f64).ceil() as usize;
    sorted[rank.clamp(1, sorted.len()) - 1]
}

impl BenchReport {
    pub fn from_samples(mut samples_us: Vec<f64>) -> Self {
        samples_us.sort_by(f64::total_cmp);
        Self {
            iterations: samples_us.len(),
            mean_us: samples_us.iter().sum::<f64>() / samples_us.len() as f64,
            p50_us: percentile(&samples_us, 50.0),
            p99_us: percentile(&samples_us, 99.0),
        }
    }
}

/// Times `iterations` generates, each on a fresh standard-normal latent drawn
/// outside the timed region, after [`WARMUP`] discarded calls.
pub fn bench(session: &mut InferenceSession, iterations: usize, seed: u64) -> Result<BenchReport> {
    if iterations < MIN_ITERATIONS {
        bail!("bench needs at least {MIN_ITERATIONS} iterations, got {iterations}");
    }
    let mut rng = Rng::new(seed);
    let mut z = vec![0.0f32; session.input_dim()];
    for _ in 0..WARMUP {
        rng.fill_normal(&mut z);
        black_box(session.generate(&z)?);
    }
    let mut samples = Vec::with_capacity(iterations);
    for _ in 0..iterations {
        rng.fill_normal(&mut z);
        let start = Instant::now();
        black_box(session.generate(black_box(&z))?);
        samples.push(start.elapsed().as_secs_f64() * 1e6);
    }
    Ok(BenchReport::from_samples(samples))
}
