//! Downloading or copying the MNIST files, with size and magic validation.

use std::fs;
use std::io::Read;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use flate2::read::GzDecoder;

use crate::data::{read_idx, IdxFile, ALL_FILES};

pub const DEFAULT_MIRROR: &str = "https://ossci-datasets.s3.amazonaws.com/mnist";

/// Largest compressed download accepted.
const DOWNLOAD_LIMIT: u64 = 64 << 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Origin {
    AlreadyPresent,
    Copied,
    Downloaded,
}

#[derive(Debug, Clone)]
pub struct Fetched {
    pub file: IdxFile,
    pub path: PathBuf,
    pub origin: Origin,
}

/// Checks the exact size and big-endian magic of an uncompressed IDX file.
pub fn validate_bytes(file: &IdxFile, bytes: &[u8]) -> Result<()> {
    if bytes.len() as u64 != file.size {
        bail!("{}: expected {} bytes, found {}", file.name, file.size, bytes.len());
    }
    let magic = u32::from_be_bytes([bytes[0], bytes[1], bytes[2], bytes[3]]);
    if magic != file.magic {
        bail!("{}: magic {magic:#010x}, expected {:#010x}", file.name, file.magic);
    }
    Ok(())
}

pub fn validate_file(file: &IdxFile, path: &Path) -> Result<()> {
    let len = fs::metadata(path)
        .with_context(|| format!("reading {}", path.display()))?
        .len();
    if len != file.size {
        bail!("{}: expected {} bytes, found {len}", path.display(), file.size);
    }
    let mut head = [0u8; 4];
    fs::File::open(path)?.read_exact(&mut head)?;
    let magic = u32::from_be_bytes(head);
    if magic != file.magic {
        bail!("{}: magic {magic:#010x}, expected {:#010x}", path.display(), file.magic);
    }
    Ok(())
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let tmp = path.with_extension("partial");
    fs::write(&tmp, bytes).with_context(|| format!("writing {}", tmp.display()))?;
    fs::rename(&tmp, path)?;
    Ok(())
}

fn download(url: &str) -> Result<Vec<u8>> {
    let response = ureq::get(url).call().with_context(|| format!("GET {url}"))?;
    let mut compressed = Vec::new();
    response
        .into_body()
        .into_with_config()
        .limit(DOWNLOAD_LIMIT)
        .reader()
        .read_to_end(&mut compressed)
        .with_context(|| format!("reading {url}"))?;
    let mut out = Vec::new();
    GzDecoder::new(compressed.as_slice())
        .read_to_end(&mut out)
        .with_context(|| format!("decompressing {url}"))?;
    Ok(out)
}

/// Ensures all four files are present and valid in `out`.
///
/// Valid files already in `out` are kept. Missing ones are copied from `from`
/// (plain or `.gz`) when given, otherwise downloaded from `mirror`. A file
/// present but invalid is an error, never silently replaced.
pub fn fetch(out: &Path, from: Option<&Path>, mirror: &str) -> Result<Vec<Fetched>> {
    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    let mut done = Vec::with_capacity(ALL_FILES.len());
    for file in ALL_FILES {
        let path = out.join(file.name);
        let origin = if path.exists() {
            validate_file(&file, &path)?;
            Origin::AlreadyPresent
        } else {
            let (bytes, origin) = match from {
                Some(dir) => (read_idx(dir, file.name)?, Origin::Copied),
                None => (download(&format!("{mirror}/{}.gz", file.name))?, Origin::Downloaded),
            };
            validate_bytes(&file, &bytes)?;
            write_atomic(&path, &bytes)?;
            origin
        };
        done.push(Fetched { file, path, origin });
    }
    Ok(done)
}
