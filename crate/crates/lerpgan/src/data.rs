//! Reading the four MNIST IDX files from a directory.

use std::fs;
use std::io::Read;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use flate2::read::GzDecoder;
use lerpgan_core::dataio::MnistSet;
use lerpgan_core::dataio::{IMAGE_MAGIC, LABEL_MAGIC};

/// One of the published MNIST files.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IdxFile {
    pub name: &'static str,
    pub magic: u32,
    /// Uncompressed size in bytes.
    pub size: u64,
}

pub const TRAIN_IMAGES: IdxFile = IdxFile {
    name: "train-images-idx3-ubyte",
    magic: IMAGE_MAGIC,
    size: 47_040_016,
};
pub const TRAIN_LABELS: IdxFile = IdxFile {
    name: "train-labels-idx1-ubyte",
    magic: LABEL_MAGIC,
    size: 60_008,
};
pub const TEST_IMAGES: IdxFile = IdxFile {
    name: "t10k-images-idx3-ubyte",
    magic: IMAGE_MAGIC,
    size: 7_840_016,
};
pub const TEST_LABELS: IdxFile = IdxFile {
    name: "t10k-labels-idx1-ubyte",
    magic: LABEL_MAGIC,
    size: 10_008,
};

pub const ALL_FILES: [IdxFile; 4] = [TRAIN_IMAGES, TRAIN_LABELS, TEST_IMAGES, TEST_LABELS];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Split {
    Train,
    Test,
}

impl Split {
    pub fn files(self) -> (IdxFile, IdxFile) {
        match self {
            Split::Train => (TRAIN_IMAGES, TRAIN_LABELS),
            Split::Test => (TEST_IMAGES, TEST_LABELS),
        }
    }
}

/// Reads `dir/name`, or `dir/name.gz` decompressed if only that exists.
pub fn read_idx(dir: &Path, name: &str) -> Result<Vec<u8>> {
    let plain = dir.join(name);
    if plain.is_file() {
        return fs::read(&plain).with_context(|| format!("reading {}", plain.display()));
    }
    let gz = dir.join(format!("{name}.gz"));
    if gz.is_file() {
        let mut out = Vec::new();
        GzDecoder::new(fs::File::open(&gz)?)
            .read_to_end(&mut out)
            .with_context(|| format!("decompressing {}", gz.display()))?;
        return Ok(out);
    }
    bail!(
        "{} not found (nor {name}.gz); run `lerpgan fetch --out {}` first",
        plain.display(),
        dir.display()
    )
}

/// Fails unless both files of `split` are present in `dir`.
pub fn check_dir(dir: &Path, split: Split) -> Result<()> {
    if !dir.is_dir() {
        bail!("data directory {} does not exist", dir.display());
    }
    let (images, labels) = split.files();
    for f in [images, labels] {
        if !dir.join(f.name).is_file() && !dir.join(format!("{}.gz", f.name)).is_file() {
            bail!("{} is missing from {}", f.name, dir.display());
        }
    }
    Ok(())
}

/// Loads and normalizes one split, keeping at most `limit` images.
pub fn load_split(dir: &Path, split: Split, limit: Option<usize>) -> Result<MnistSet> {
    check_dir(dir, split)?;
    let (images, labels) = split.files();
    let set = MnistSet::from_idx(&read_idx(dir, images.name)?, &read_idx(dir, labels.name)?)
        .with_context(|| format!("parsing MNIST files in {}", dir.display()))?;
    match limit {
        Some(n) if n < set.len() => Ok(set.take(n)?),
        _ => Ok(set),
    }
}

/// `$LERPGAN_MNIST_DIR` if set.
pub fn env_data_dir() -> Option<PathBuf> {
    std::env::var_os("LERPGAN_MNIST_DIR").map(PathBuf::from)
}
