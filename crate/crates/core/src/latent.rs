//! Latent vectors: straight-line interpolation, arithmetic and random walks.

use alloc::format;
use alloc::vec::Vec;

use crate::tensor::{Matrix, Rng};
use crate::{Error, Result};

/// A single point in the generator's input space (a `1×dim` matrix).
#[derive(Debug, Clone, PartialEq)]
pub struct LatentVector(Matrix);

impl LatentVector {
    pub fn new(values: Matrix) -> Result<Self> {
        if values.rows() != 1 {
            return Err(Error::shape("LatentVector", values.shape(), (1, values.cols())));
        }
        Ok(Self(values))
    }

    pub fn from_slice(values: &[f32]) -> Result<Self> {
        Self::new(Matrix::new(1, values.len(), values.to_vec())?)
    }

    pub fn zeros(dim: usize) -> Self {
        Self(Matrix::zeros(1, dim))
    }

    /// Standard normal draw.
    pub fn sample(rng: &mut Rng, dim: usize) -> Self {
        Self(Matrix::randn(rng, 1, dim))
    }

    /// The latent a seed names: the first draw of `Rng::new(seed)`.
    pub fn from_seed(seed: u64, dim: usize) -> Self {
        Self::sample(&mut Rng::new(seed), dim)
    }

    pub fn dim(&self) -> usize {
        self.0.cols()
    }

    pub fn as_slice(&self) -> &[f32] {
        self.0.as_slice()
    }

    pub fn as_matrix(&self) -> &Matrix {
        &self.0
    }

    pub fn into_matrix(self) -> Matrix {
        self.0
    }

    fn check_dim(&self, other: &Self, op: &'static str) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::shape(op, self.0.shape(), other.0.shape()));
        }
        Ok(())
    }
}

/// `(1 − t)·S + t·T` componentwise, for `0 ≤ t ≤ 1`.
///
/// The endpoints return `S` and `T` unchanged (bit for bit, signed zeros
/// included).
pub fn lerp(source: &LatentVector, target: &LatentVector, t: f64) -> Result<LatentVector> {
    source.check_dim(target, "lerp")?;
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::Range(format!("interpolation parameter {t} outside [0, 1]")));
    }
    if t == 0.0 {
        return Ok(source.clone());
    }
    if t == 1.0 {
        return Ok(target.clone());
    }
    let values = source
        .as_slice()
        .iter()
        .zip(target.as_slice())
        .map(|(&s, &e)| ((1.0 - t) * s as f64 + t * e as f64) as f32)
        .collect();
    Ok(LatentVector(Matrix::new(1, source.dim(), values)?))
}

/// Endpoints and resolution of a straight-line latent path.
#[derive(Debug, Clone, PartialEq)]
pub struct InterpolationPath {
    pub source: LatentVector,
    pub target: LatentVector,
    pub steps: usize,
}

impl InterpolationPath {
    pub fn new(source: LatentVector, target: LatentVector, steps: usize) -> Result<Self> {
        if steps < 2 {
            return Err(Error::Range(format!("path needs at least 2 steps, got {steps}")));
        }
        source.check_dim(&target, "InterpolationPath")?;
        Ok(Self { source, target, steps })
    }

    /// The grid value of step `i`: `i / (steps − 1)`.
    pub fn t(&self, i: usize) -> f64 {
        i as f64 / (self.steps - 1) as f64
    }

    /// `lerp` at every grid point, endpoints included.
    pub fn points(&self) -> Vec<LatentVector> {
        (0..self.steps)
            .map(|i| lerp(&self.source, &self.target, self.t(i)).expect("validated path"))
            .collect()
    }
}

/// `a − b + c` componentwise.
pub fn arithmetic(a: &LatentVector, b: &LatentVector, c: &LatentVector) -> Result<LatentVector> {
    a.check_dim(b, "arithmetic")?;
    a.check_dim(c, "arithmetic")?;
    let values = a
        .as_slice()
        .iter()
        .zip(b.as_slice())
        .zip(c.as_slice())
        .map(|((&x, &y), &z)| x - y + z)
        .collect();
    Ok(LatentVector(Matrix::new(1, a.dim(), values)?))
}

/// Chains `segments` straight paths between successive random anchors.
///
/// Adjacent segments share their junction anchor, which appears once, so the
/// walk has `segments · (segment_steps − 1) + 1` points.
pub fn explore_walk(rng: &mut Rng, dim: usize, segment_steps: usize, segments: usize) -> Result<Vec<LatentVector>> {
    if segment_steps < 2 || segments == 0 {
        return Err(Error::Range(format!(
            "explore walk needs segment_steps >= 2 and segments >= 1, got {segment_steps} and {segments}"
        )));
    }
    let mut walk = Vec::with_capacity(segments * (segment_steps - 1) + 1);
    let mut anchor = LatentVector::sample(rng, dim);
    walk.push(anchor.clone());
    for _ in 0..segments {
        let next = LatentVector::sample(rng, dim);
        let path = InterpolationPath::new(anchor, next.clone(), segment_steps)?;
        walk.extend(path.points().into_iter().skip(1));
        anchor = next;
    }
    Ok(walk)
}
