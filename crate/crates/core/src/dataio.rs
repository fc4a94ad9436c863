//! MNIST IDX parsing, pixel normalization and seeded batching.
//!
//! IDX files are big-endian: a 4-byte magic (`0x0000_08xx`, where the low
//! byte is the number of dimensions), one u32 per dimension, then the payload.

use alloc::format;
use alloc::vec::Vec;

use crate::tensor::{Matrix, Rng};
use crate::{Error, Result};

pub const IMAGE_MAGIC: u32 = 0x0000_0803;
pub const LABEL_MAGIC: u32 = 0x0000_0801;
pub const IMAGE_SIDE: usize = 28;
pub const PIXELS: usize = IMAGE_SIDE * IMAGE_SIDE;

fn read_u32_be(bytes: &[u8], offset: usize) -> Result<u32> {
    bytes
        .get(offset..offset + 4)
        .map(|b| u32::from_be_bytes([b[0], b[1], b[2], b[3]]))
        .ok_or(Error::Length {
            expected: offset + 4,
            actual: bytes.len(),
        })
}

fn check_magic(bytes: &[u8], want: u32) -> Result<()> {
    let magic = read_u32_be(bytes, 0)?;
    if magic != want {
        return Err(Error::Format(format!("IDX magic {magic:#010x}, expected {want:#010x}")));
    }
    Ok(())
}

fn check_payload(bytes: &[u8], header: usize, payload: usize) -> Result<()> {
    let expected = header + payload;
    if bytes.len() != expected {
        return Err(Error::Length {
            expected,
            actual: bytes.len(),
        });
    }
    Ok(())
}

/// Parses an IDX image file into an `n × 784` matrix of raw pixel values
/// (0..=255 as floats).
pub fn parse_idx_images(bytes: &[u8]) -> Result<Matrix> {
    check_magic(bytes, IMAGE_MAGIC)?;
    let n = read_u32_be(bytes, 4)? as usize;
    let rows = read_u32_be(bytes, 8)? as usize;
    let cols = read_u32_be(bytes, 12)? as usize;
    if rows != IMAGE_SIDE || cols != IMAGE_SIDE {
        return Err(Error::Format(format!("image dimensions {rows}x{cols}, expected 28x28")));
    }
    if n == 0 {
        return Err(Error::Format("image file declares zero images".into()));
    }
    let payload = n.checked_mul(PIXELS).ok_or(Error::Length {
        expected: usize::MAX,
        actual: bytes.len(),
    })?;
    check_payload(bytes, 16, payload)?;
    let data = bytes[16..].iter().map(|&b| b as f32).collect();
    Matrix::new(n, PIXELS, data)
}

/// Parses an IDX label file. Every label must be a digit.
pub fn parse_idx_labels(bytes: &[u8]) -> Result<Vec<u8>> {
    check_magic(bytes, LABEL_MAGIC)?;
    let n = read_u32_be(bytes, 4)? as usize;
    check_payload(bytes, 8, n)?;
    let labels = bytes[8..].to_vec();
    if let Some((i, &bad)) = labels.iter().enumerate().find(|(_, &l)| l > 9) {
        return Err(Error::Range(format!("label {bad} at index {i} is not a digit")));
    }
    Ok(labels)
}

/// Maps raw pixels from `[0, 255]` to `[-1, 1]` via `v / 127.5 - 1`.
pub fn normalize(raw: &Matrix) -> Result<Matrix> {
    if let Some(&bad) = raw.as_slice().iter().find(|v| !(0.0..=255.0).contains(*v)) {
        return Err(Error::Range(format!("pixel value {bad} outside [0, 255]")));
    }
    Ok(raw.map(|v| v / 127.5 - 1.0))
}

/// Inverse of [`normalize`]: `(v + 1) · 127.5`.
pub fn denormalize(values: &Matrix) -> Matrix {
    values.map(|v| (v + 1.0) * 127.5)
}

/// Gray level for a generator output in `[-1, 1]`: `round((v + 1) · 127.5)`,
/// clamped to `0..=255`.
pub fn to_gray(v: f32) -> u8 {
    let g = libm::roundf((v + 1.0) * 127.5);
    if g.is_nan() {
        0
    } else {
        g.clamp(0.0, 255.0) as u8
    }
}

/// Normalized MNIST images with their labels.
#[derive(Debug, Clone)]
pub struct MnistSet {
    images: Matrix,
    labels: Vec<u8>,
}

impl MnistSet {
    /// `images` must already be normalized to `[-1, 1]`.
    pub fn new(images: Matrix, labels: Vec<u8>) -> Result<Self> {
        if labels.len() != images.rows() {
            return Err(Error::shape("MnistSet", images.shape(), (labels.len(), 1)));
        }
        if images.cols() != PIXELS {
            return Err(Error::shape("MnistSet", images.shape(), (images.rows(), PIXELS)));
        }
        if let Some(&bad) = images.as_slice().iter().find(|v| !(-1.0..=1.0).contains(*v)) {
            return Err(Error::Range(format!("normalized pixel {bad} outside [-1, 1]")));
        }
        Ok(Self { images, labels })
    }

    /// Parses and normalizes a pair of IDX files.
    pub fn from_idx(image_bytes: &[u8], label_bytes: &[u8]) -> Result<Self> {
        let images = normalize(&parse_idx_images(image_bytes)?)?;
        let labels = parse_idx_labels(label_bytes)?;
        Self::new(images, labels)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn images(&self) -> &Matrix {
        &self.images
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    /// First `n` samples (or all of them if there are fewer).
    pub fn take(&self, n: usize) -> Result<Self> {
        let n = n.min(self.len());
        let idx: Vec<usize> = (0..n).collect();
        Ok(Self {
            images: self.images.select_rows(&idx)?,
            labels: self.labels[..n].to_vec(),
        })
    }

    /// Same labels, replaced images (used for PCA-reconstructed copies).
    pub fn with_images(&self, images: Matrix) -> Result<Self> {
        Self::new(images, self.labels.clone())
    }
}

/// Seeded epoch-wise shuffling over `0..n`, dropping the short final batch.
#[derive(Debug, Clone)]
pub struct BatchIterator {
    order: Vec<usize>,
    batch_size: usize,
    cursor: usize,
    epoch: usize,
    rng: Rng,
}

impl BatchIterator {
    pub fn new(n: usize, batch_size: usize, seed: u64) -> Result<Self> {
        Self::with_rng(n, batch_size, Rng::new(seed))
    }

    pub fn with_rng(n: usize, batch_size: usize, mut rng: Rng) -> Result<Self> {
        if batch_size == 0 || batch_size > n {
            return Err(Error::Config(format!("batch size {batch_size} must be in 1..={n}")));
        }
        let mut order: Vec<usize> = (0..n).collect();
        rng.shuffle(&mut order);
        Ok(Self {
            order,
            batch_size,
            cursor: 0,
            epoch: 0,
            rng,
        })
    }

    pub fn batch_size(&self) -> usize {
        self.batch_size
    }

    pub fn batches_per_epoch(&self) -> usize {
        self.order.len() / self.batch_size
    }

    /// Completed epochs so far.
    pub fn epoch(&self) -> usize {
        self.epoch
    }

    /// Indices of the next batch; reshuffles when the current epoch cannot
    /// fill another full batch.
    pub fn next_indices(&mut self) -> &[usize] {
        if self.cursor + self.batch_size > self.order.len() {
            self.rng.shuffle(&mut self.order);
            self.cursor = 0;
            self.epoch += 1;
        }
        let start = self.cursor;
        self.cursor += self.batch_size;
        &self.order[start..self.cursor]
    }

    pub fn next_batch(&mut self, set: &MnistSet) -> Result<Matrix> {
        if set.len() != self.order.len() {
            return Err(Error::Config(format!(
                "iterator built for {} samples, set has {}",
                self.order.len(),
                set.len()
            )));
        }
        let images = set.images();
        let idx = self.next_indices();
        images.select_rows(idx)
    }
}
