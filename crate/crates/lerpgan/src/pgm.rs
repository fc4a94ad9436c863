//! Binary PGM (P5) images and sample grids.

use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use lerpgan_core::dataio::{to_gray, IMAGE_SIDE, PIXELS};
use lerpgan_core::Matrix;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrayImage {
    pub width: usize,
    pub height: usize,
    pub pixels: Vec<u8>,
}

impl GrayImage {
    /// One 28×28 image from generator-range values in `[-1, 1]`.
    pub fn from_values(values: &[f32]) -> Result<Self> {
        if values.len() != PIXELS {
            bail!("expected {PIXELS} values, got {}", values.len());
        }
        Ok(Self {
            width: IMAGE_SIDE,
            height: IMAGE_SIDE,
            pixels: values.iter().map(|&v| to_gray(v)).collect(),
        })
    }

    /// Tiles the rows of `images` left to right, top to bottom, `cols` per
    /// row. Unused cells stay black.
    pub fn grid(images: &Matrix, cols: usize) -> Result<Self> {
        if images.cols() != PIXELS || cols == 0 {
            bail!("grid needs n×{PIXELS} images and at least one column");
        }
        let n = images.rows();
        let rows = n.div_ceil(cols);
        let (width, height) = (cols * IMAGE_SIDE, rows * IMAGE_SIDE);
        let mut pixels = vec![0u8; width * height];
        for i in 0..n {
            let (gy, gx) = (i / cols, i % cols);
            for (y, line) in images.row(i).chunks_exact(IMAGE_SIDE).enumerate() {
                let start = (gy * IMAGE_SIDE + y) * width + gx * IMAGE_SIDE;
                for (dst, &v) in pixels[start..start + IMAGE_SIDE].iter_mut().zip(line) {
                    *dst = to_gray(v);
                }
            }
        }
        Ok(Self { width, height, pixels })
    }

    pub fn encode(&self) -> Vec<u8> {
        let mut out = format!("P5\n{} {}\n255\n", self.width, self.height).into_bytes();
        out.extend_from_slice(&self.pixels);
        out
    }

    /// Parses the P5 files [`encode`](Self::encode) writes (maxval 255, no
    /// comments).
    pub fn decode(bytes: &[u8]) -> Result<Self> {
        let mut fields = Vec::with_capacity(4);
        let mut at = 0;
        while fields.len() < 4 {
            while at < bytes.len() && bytes[at].is_ascii_whitespace() {
                at += 1;
            }
            let start = at;
            while at < bytes.len() && !bytes[at].is_ascii_whitespace() {
                at += 1;
            }
            if start == at {
                bail!("truncated PGM header");
            }
            fields.push(std::str::from_utf8(&bytes[start..at])?.to_owned());
        }
        if fields[0] != "P5" || fields[3] != "255" {
            bail!("not an 8-bit P5 image");
        }
        let width: usize = fields[1].parse()?;
        let height: usize = fields[2].parse()?;
        let pixels = bytes.get(at + 1..).unwrap_or_default();
        if pixels.len() != width * height {
            bail!("PGM payload is {} bytes, header says {}", pixels.len(), width * height);
        }
        Ok(Self {
            width,
            height,
            pixels: pixels.to_vec(),
        })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.encode()).with_context(|| format!("writing {}", path.display()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::decode(&fs::read(path).with_context(|| format!("reading {}", path.display()))?)
    }
}
