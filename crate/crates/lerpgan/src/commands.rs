//! The work behind each subcommand. Every function validates its inputs
//! before doing anything expensive and returns the paths it wrote.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, ensure, Context, Result};
use lerpgan_core::dataio::PIXELS;
use lerpgan_core::gan::{self, LossVariant, TrainConfig, TrainOutcome};
use lerpgan_core::infer::InferenceSession;
use lerpgan_core::latent::{InterpolationPath, LatentVector};
use lerpgan_core::modelfmt;
use lerpgan_core::pca::PcaModel;
use lerpgan_core::{Matrix, Rng};
use serde::{Deserialize, Serialize};

use crate::bench::{self, BenchReport};
use crate::data::{self, Split};
use crate::metrics;
use crate::pgm::GrayImage;

/// Images per row of every sample grid.
pub const GRID_COLS: usize = 8;

fn ensure_out_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))
}

fn ensure_parent(file: &Path) -> Result<()> {
    match file.parent() {
        Some(p) if !p.as_os_str().is_empty() => ensure_out_dir(p),
        _ => Ok(()),
    }
}

pub fn load_session(model: &Path) -> Result<InferenceSession> {
    let bytes = fs::read(model).with_context(|| format!("reading {}", model.display()))?;
    InferenceSession::new(&bytes).with_context(|| format!("loading {}", model.display()))
}

#[derive(Debug, Clone)]
pub struct TrainArgs {
    pub data: PathBuf,
    pub out: PathBuf,
    pub epochs: usize,
    pub batch: usize,
    pub seed: u64,
    pub loss: LossVariant,
    pub pca_k: Option<usize>,
    pub limit: Option<usize>,
    pub snapshot_every: usize,
}

impl TrainArgs {
    pub fn config(&self) -> TrainConfig {
        TrainConfig {
            epochs: self.epochs,
            batch_size: self.batch,
            seed: self.seed,
            loss_variant: self.loss,
            snapshot_every: self.snapshot_every,
            ..TrainConfig::default()
        }
    }
}

/// `model.lwg1` → `model.metrics.csv`.
pub fn metrics_path(model: &Path) -> PathBuf {
    model.with_extension("metrics.csv")
}

/// `model.lwg1` → `model.snapshots/`.
pub fn snapshot_dir(model: &Path) -> PathBuf {
    model.with_extension("snapshots")
}

#[derive(Debug)]
pub struct TrainReport {
    pub artifact: PathBuf,
    pub metrics: PathBuf,
    pub grids: Vec<PathBuf>,
    pub outcome: TrainOutcome,
    /// Dominance diagnostic of the fitted PCA, when `--pca-k` was given.
    pub pca_dominance: Option<f64>,
}

pub fn train(args: &TrainArgs) -> Result<TrainReport> {
    let config = args.config();
    config.validate()?;
    if let Some(k) = args.pca_k {
        ensure!((1..=PIXELS).contains(&k), "--pca-k must be in 1..={PIXELS}, got {k}");
    }
    data::check_dir(&args.data, Split::Train)?;
    ensure_parent(&args.out)?;

    let set = data::load_split(&args.data, Split::Train, args.limit)?;
    ensure!(
        set.len() >= args.batch,
        "{} training images is fewer than one batch of {}",
        set.len(),
        args.batch
    );
    let (outcome, pca_dominance) = match args.pca_k {
        Some(k) => {
            let model = PcaModel::fit(set.images())?;
            let dominance = model.explained_variance_report().dominance;
            (gan::pca_ablation_train(&config, &set, &model, k)?, Some(dominance))
        }
        None => (gan::train(&config, &set)?, None),
    };

    fs::write(&args.out, modelfmt::save(&outcome.generator))
        .with_context(|| format!("writing {}", args.out.display()))?;
    let metrics_file = metrics_path(&args.out);
    let csv = fs::File::create(&metrics_file).with_context(|| format!("writing {}", metrics_file.display()))?;
    metrics::write_csv(std::io::BufWriter::new(csv), &outcome.metrics)?;

    let snaps = snapshot_dir(&args.out);
    ensure_out_dir(&snaps)?;
    let mut grids = Vec::new();
    for s in &outcome.snapshots {
        let stem = format!("epoch_{:04}", s.epoch);
        fs::write(snaps.join(format!("{stem}.lwg1")), &s.artifact)?;
        let grid = snaps.join(format!("{stem}.pgm"));
        GrayImage::grid(&s.samples, GRID_COLS)?.save(&grid)?;
        grids.push(grid);
    }
    Ok(TrainReport {
        artifact: args.out.clone(),
        metrics: metrics_file,
        grids,
        outcome,
        pca_dominance,
    })
}

/// Writes `count` images; latent `i` is the `i`-th standard-normal draw of
/// `Rng::new(seed)`.
pub fn generate(model: &Path, seed: u64, count: usize, out: &Path) -> Result<Vec<PathBuf>> {
    ensure!(count >= 1, "--count must be at least 1");
    let mut session = load_session(model)?;
    ensure!(
        session.output_dim() == PIXELS,
        "model does not produce {PIXELS}-pixel images"
    );
    ensure_out_dir(out)?;
    let mut rng = Rng::new(seed);
    let mut written = Vec::with_capacity(count);
    for i in 0..count {
        let z = LatentVector::sample(&mut rng, session.input_dim());
        let path = out.join(format!("sample_{i:04}.pgm"));
        GrayImage::from_values(session.generate_latent(&z)?)?.save(&path)?;
        written.push(path);
    }
    Ok(written)
}

/// Writes `steps` frames along the straight path between the latents named
/// by `seed_a` and `seed_b`.
pub fn interpolate(model: &Path, seed_a: u64, seed_b: u64, steps: usize, out: &Path) -> Result<Vec<PathBuf>> {
    ensure!(steps >= 2, "--steps must be at least 2, got {steps}");
    let mut session = load_session(model)?;
    ensure!(
        session.output_dim() == PIXELS,
        "model does not produce {PIXELS}-pixel images"
    );
    ensure_out_dir(out)?;
    let dim = session.input_dim();
    let path = InterpolationPath::new(
        LatentVector::from_seed(seed_a, dim),
        LatentVector::from_seed(seed_b, dim),
        steps,
    )?;
    let mut written = Vec::with_capacity(steps);
    for (i, z) in path.points().iter().enumerate() {
        let file = out.join(format!("frame_{i:04}.pgm"));
        GrayImage::from_values(session.generate_latent(z)?)?.save(&file)?;
        written.push(file);
    }
    Ok(written)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PcaSummary {
    pub images: usize,
    pub jacobi_sweeps: usize,
    pub top_count: usize,
    /// Mean eigenvalue of the top `top_count` components over the mean of
    /// the rest.
    pub dominance: f64,
    pub ks: Vec<usize>,
    pub mse: Vec<f64>,
}

/// Rows shown in every reconstruction grid.
pub const PCA_GRID_ROWS: usize = 64;

pub fn pca(data_dir: &Path, ks: &[usize], out: &Path, limit: Option<usize>) -> Result<PcaSummary> {
    ensure!(!ks.is_empty(), "--ks needs at least one value");
    if let Some(&bad) = ks.iter().find(|&&k| k == 0 || k > PIXELS) {
        bail!("every k must be in 1..={PIXELS}, got {bad}");
    }
    data::check_dir(data_dir, Split::Train)?;
    ensure_out_dir(out)?;

    let set = data::load_split(data_dir, Split::Train, limit)?;
    ensure!(set.len() >= 2, "PCA needs at least two images");
    let model = PcaModel::fit(set.images())?;
    let report = model.explained_variance_report();

    let mut csv = String::from("component,eigenvalue,ratio,cumulative\n");
    for i in 0..report.eigenvalues.len() {
        csv += &format!(
            "{},{},{},{}\n",
            i + 1,
            report.eigenvalues[i],
            report.ratios[i],
            report.cumulative[i]
        );
    }
    fs::write(out.join("variance.csv"), csv)?;

    let shown: Vec<usize> = (0..PCA_GRID_ROWS.min(set.len())).collect();
    let sample = set.images().select_rows(&shown)?;
    GrayImage::grid(&sample, GRID_COLS)?.save(&out.join("original.pgm"))?;

    let mut mse = Vec::with_capacity(ks.len());
    let mut csv = String::from("k,mse\n");
    for &k in ks {
        let e = model.reconstruction_mse(set.images(), k)?;
        csv += &format!("{k},{e}\n");
        mse.push(e);
        let recon = model.inverse_transform(&model.transform(&sample, k)?)?;
        GrayImage::grid(&recon, GRID_COLS)?.save(&out.join(format!("recon_k{k:03}.pgm")))?;
    }
    fs::write(out.join("reconstruction.csv"), csv)?;

    let summary = PcaSummary {
        images: set.len(),
        jacobi_sweeps: model.sweeps(),
        top_count: report.top_count,
        dominance: report.dominance,
        ks: ks.to_vec(),
        mse,
    };
    fs::write(out.join("summary.json"), serde_json::to_string_pretty(&summary)?)?;
    Ok(summary)
}

pub fn bench(model: &Path, iterations: usize, seed: u64) -> Result<BenchReport> {
    ensure!(
        iterations >= bench::MIN_ITERATIONS,
        "--iters must be at least {}, got {iterations}",
        bench::MIN_ITERATIONS
    );
    let mut session = load_session(model)?;
    bench::bench(&mut session, iterations, seed)
}

/// Images in `[-1, 1]` rendered as the grid `train` writes for snapshots.
pub fn sample_grid(samples: &Matrix) -> Result<GrayImage> {
    GrayImage::grid(samples, GRID_COLS)
}
