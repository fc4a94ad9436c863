use std::path::PathBuf;

use anyhow::Result;
use clap::{Parser, Subcommand, ValueEnum};
use lerpgan_core::gan::LossVariant;

use crate::commands::{self, TrainArgs};
use crate::fetch::{self, Origin, DEFAULT_MIRROR};

#[derive(Debug, Parser)]
#[command(
    name = "lerpgan",
    version,
    about = "Train, inspect and sample a fully connected MNIST GAN"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Loss {
    /// Generator minimizes log(1 - D(G(z))).
    Minimax,
    /// Generator minimizes -log D(G(z)).
    Nonsat,
}

impl From<Loss> for LossVariant {
    fn from(l: Loss) -> Self {
        match l {
            Loss::Minimax => LossVariant::Minimax,
            Loss::Nonsat => LossVariant::NonSaturating,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Train a generator and discriminator; writes the generator artifact,
    /// a metrics CSV and per-epoch snapshot grids.
    Train {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        epochs: usize,
        #[arg(long, default_value_t = 64)]
        batch: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Loss::Nonsat)]
        loss: Loss,
        /// Train on rank-k PCA reconstructions of the data.
        #[arg(long)]
        pca_k: Option<usize>,
        /// Use only the first N training images.
        #[arg(long)]
        limit: Option<usize>,
        /// Snapshot every N epochs (the final epoch is always snapshotted).
        #[arg(long, default_value_t = 1)]
        snapshot_every: usize,
    },
    /// Write COUNT images from consecutive latents of one seed.
    Generate {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        count: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write STEPS frames along the straight latent path from seed A to seed B.
    Interpolate {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        seed_a: u64,
        #[arg(long)]
        seed_b: u64,
        #[arg(long)]
        steps: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Fit PCA to the training images; write variance and reconstruction reports.
    Pca {
        #[arg(long)]
        data: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "1,5,10,50,200,784")]
        ks: Vec<usize>,
        #[arg(long)]
        out: PathBuf,
        /// Use only the first N training images.
        #[arg(long)]
        limit: Option<usize>,
    },
    /// Time single-sample generation and print a JSON report.
    Bench {
        #[arg(long)]
        model: PathBuf,
        #[arg(long, default_value_t = 10_000)]
        iters: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Download (or copy with --from) and validate the four MNIST files.
    Fetch {
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        from: Option<PathBuf>,
        #[arg(long, default_value = DEFAULT_MIRROR)]
        mirror: String,
    },
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Train {
            data,
            out,
            epochs,
            batch,
            seed,
            loss,
            pca_k,
            limit,
            snapshot_every,
        } => {
            let report = commands::train(&TrainArgs {
                data,
                out,
                epochs,
                batch,
                seed,
                loss: loss.into(),
                pca_k,
                limit,
                snapshot_every,
            })?;
            if let Some(d) = report.pca_dominance {
                eprintln!("pca dominance: {d:.1}");
            }
            let m = &report.outcome.metrics;
            if let Some(last) = m.steps.last() {
                eprintln!(
                    "{} steps; last d_loss {:.4} g_loss {:.4}",
                    m.steps.len(),
                    last.d_loss,
                    last.g_loss
                );
            }
            println!("{}", report.artifact.display());
        }
        Command::Generate {
            model,
            seed,
            count,
            out,
        } => {
            for p in commands::generate(&model, seed, count, &out)? {
                println!("{}", p.display());
            }
        }
        Command::Interpolate {
            model,
            seed_a,
            seed_b,
            steps,
            out,
        } => {
            for p in commands::interpolate(&model, seed_a, seed_b, steps, &out)? {
                println!("{}", p.display());
            }
        }
        Command::Pca { data, ks, out, limit } => {
            let s = commands::pca(&data, &ks, &out, limit)?;
            eprintln!(
                "{} images: mean eigenvalue of the top {} components is {:.1}x the mean of the rest",
                s.images, s.top_count, s.dominance
            );
            println!("{}", serde_json::to_string(&s)?);
        }
        Command::Bench { model, iters, seed } => {
            println!("{}", serde_json::to_string(&commands::bench(&model, iters, seed)?)?);
        }
        Command::Fetch { out, from, mirror } => {
            for f in fetch::fetch(&out, from.as_deref(), &mirror)? {
                let how = match f.origin {
                    Origin::AlreadyPresent => "ok",
                    Origin::Copied => "copied",
                    Origin::Downloaded => "downloaded",
                };
                println!("{how} {}", f.path.display());
            }
        }
    }
    Ok(())
}
