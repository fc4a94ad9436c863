#![allow(dead_code)]

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use lerpgan_core::dataio::{IMAGE_MAGIC, LABEL_MAGIC, PIXELS};
use lerpgan_core::nn::{Activation, DenseLayer, Network, GENERATOR_DIMS};
use lerpgan_core::{Matrix, Rng};

pub fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_lerpgan"))
}

pub fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn lerpgan")
}

pub fn ok(args: &[&str]) -> String {
    let out = run(args);
    assert!(
        out.status.success(),
        "lerpgan {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

pub fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

pub fn idx_images(images: &[Vec<u8>]) -> Vec<u8> {
    let mut out = Vec::with_capacity(16 + images.len() * PIXELS);
    for v in [IMAGE_MAGIC, images.len() as u32, 28, 28] {
        out.extend_from_slice(&v.to_be_bytes());
    }
    for img in images {
        assert_eq!(img.len(), PIXELS);
        out.extend_from_slice(img);
    }
    out
}

pub fn idx_labels(labels: &[u8]) -> Vec<u8> {
    let mut out = Vec::with_capacity(8 + labels.len());
    out.extend_from_slice(&LABEL_MAGIC.to_be_bytes());
    out.extend_from_slice(&(labels.len() as u32).to_be_bytes());
    out.extend_from_slice(labels);
    out
}

/// `n` synthetic 28×28 images: a bright bar whose position and thickness
/// depend on the label, plus a little noise.
pub fn synthetic_images(n: usize, seed: u64) -> (Vec<Vec<u8>>, Vec<u8>) {
    let mut rng = Rng::new(seed);
    let mut images = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for i in 0..n {
        let label = (i % 10) as u8;
        let mut img = vec![0u8; PIXELS];
        let col = 4 + 2 * label as usize;
        for y in 4..24 {
            for x in col..col + 2 + (label as usize % 3) {
                img[y * 28 + x] = 200 + rng.below(56) as u8;
            }
        }
        for _ in 0..20 {
            img[rng.below(PIXELS)] = rng.below(256) as u8;
        }
        images.push(img);
        labels.push(label);
    }
    (images, labels)
}

/// Writes a training split of `n` synthetic images into `dir`.
pub fn synthetic_mnist_dir(dir: &Path, n: usize, seed: u64) {
    fs::create_dir_all(dir).unwrap();
    let (images, labels) = synthetic_images(n, seed);
    fs::write(dir.join("train-images-idx3-ubyte"), idx_images(&images)).unwrap();
    fs::write(dir.join("train-labels-idx1-ubyte"), idx_labels(&labels)).unwrap();
}

/// A generator-shaped network with weights large enough that different
/// latents give visibly different images.
pub fn lively_generator(seed: u64) -> Network {
    let mut rng = Rng::new(seed);
    let last = GENERATOR_DIMS.len() - 2;
    let layers = GENERATOR_DIMS
        .windows(2)
        .enumerate()
        .map(|(i, d)| {
            let act = if i == last {
                Activation::Tanh
            } else {
                Activation::LeakyRelu
            };
            let w = Matrix::randn(&mut rng, d[0], d[1]).scale(1.5 / (d[0] as f32).sqrt());
            DenseLayer::new(w, Matrix::zeros(1, d[1]), act).unwrap()
        })
        .collect();
    Network::new(layers).unwrap()
}

/// The real MNIST directory: `$LERPGAN_MNIST_DIR`, else `<workspace>/data/mnist`.
pub fn mnist_dir() -> PathBuf {
    lerpgan::data::env_data_dir().unwrap_or_else(|| Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/mnist"))
}
