//! Alternating minimax training of a generator against a discriminator.
//!
//! The discriminator ascends `log D(x) + log(1 − D(G(z)))`, realized as binary
//! cross-entropy with target 1 for real and 0 for generated images. The
//! generator either descends `log(1 − D(G(z)))` literally ([`LossVariant::Minimax`])
//! or the non-saturating `−log D(G(z))`. One D step is followed by one G step,
//! each with its own fresh latent batch.
//!
//! Random streams are forked from the seed in a fixed order (initialization,
//! shuffling, noise, preview latents), so a run is reproducible bit for bit.

use alloc::format;
use alloc::vec::Vec;

use crate::dataio::{BatchIterator, MnistSet};
use crate::modelfmt;
use crate::nn::{bce_loss, Adam, AdamConfig, Network, LATENT_DIM};
use crate::pca::PcaModel;
use crate::tensor::{Matrix, Rng};
use crate::{Error, Result};

/// Number of generator samples kept per snapshot (an 8×8 grid).
pub const PREVIEW_SAMPLES: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LossVariant {
    Minimax,
    NonSaturating,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub epochs: usize,
    pub batch_size: usize,
    pub latent_dim: usize,
    pub seed: u64,
    pub g_lr: f64,
    pub d_lr: f64,
    pub loss_variant: LossVariant,
    /// Snapshot every this many epochs (0 disables periodic snapshots; the
    /// final epoch is always captured when `epochs > 0`).
    pub snapshot_every: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            epochs: 1,
            batch_size: 64,
            latent_dim: LATENT_DIM,
            seed: 0,
            g_lr: 2e-4,
            d_lr: 2e-4,
            loss_variant: LossVariant::NonSaturating,
            snapshot_every: 1,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.batch_size < 2 {
            return Err(Error::Config(format!("batch size {} < 2", self.batch_size)));
        }
        if self.latent_dim != LATENT_DIM {
            return Err(Error::Config(format!(
                "latent dimension {} does not match the generator input {LATENT_DIM}",
                self.latent_dim
            )));
        }
        if !(self.g_lr > 0.0 && self.d_lr > 0.0) {
            return Err(Error::Config("learning rates must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DStepMetrics {
    pub d_loss: f64,
    pub acc_real: f64,
    pub acc_fake: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepMetrics {
    pub step: usize,
    pub epoch: usize,
    pub d_loss: f64,
    pub g_loss: f64,
    pub d_acc_real: f64,
    pub d_acc_fake: f64,
}

impl StepMetrics {
    /// Mean of real and fake accuracy.
    pub fn d_accuracy(&self) -> f64 {
        0.5 * (self.d_acc_real + self.d_acc_fake)
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct TrainMetrics {
    pub steps: Vec<StepMetrics>,
}

impl TrainMetrics {
    pub fn epoch(&self, epoch: usize) -> impl Iterator<Item = &StepMetrics> {
        self.steps.iter().filter(move |s| s.epoch == epoch)
    }

    pub fn mean_d_accuracy(&self, epoch: usize) -> Option<f64> {
        mean(self.epoch(epoch).map(StepMetrics::d_accuracy))
    }

    pub fn mean_g_loss(&self, epoch: usize) -> Option<f64> {
        mean(self.epoch(epoch).map(|s| s.g_loss))
    }

    pub fn all_finite(&self) -> bool {
        self.steps.iter().all(|s| {
            s.d_loss.is_finite() && s.g_loss.is_finite() && s.d_acc_real.is_finite() && s.d_acc_fake.is_finite()
        })
    }
}

fn mean(it: impl Iterator<Item = f64>) -> Option<f64> {
    let (sum, n) = it.fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    (n > 0).then(|| sum / n as f64)
}

#[derive(Debug, Clone)]
pub struct Snapshot {
    /// 1-based epoch after which the snapshot was taken.
    pub epoch: usize,
    /// Generator encoded with [`modelfmt::save`].
    pub artifact: Vec<u8>,
    /// `PREVIEW_SAMPLES × 784` generator outputs for a fixed latent batch.
    pub samples: Matrix,
}

#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub generator: Network,
    pub discriminator: Network,
    pub metrics: TrainMetrics,
    pub snapshots: Vec<Snapshot>,
}

/// Independent random streams for one training run.
struct Streams {
    init: Rng,
    shuffle: Rng,
    noise: Rng,
    preview: Rng,
}

impl Streams {
    fn new(seed: u64) -> Self {
        let mut root = Rng::new(seed);
        Self {
            init: root.fork(),
            shuffle: root.fork(),
            noise: root.fork(),
            preview: root.fork(),
        }
    }
}

/// The generator and discriminator a run with `seed` starts from.
pub fn initial_networks(seed: u64) -> (Network, Network) {
    let mut init = Streams::new(seed).init;
    let g = Network::default_generator(&mut init);
    let d = Network::default_discriminator(&mut init);
    (g, d)
}

/// The fixed latent batch used for snapshot previews of a run with `seed`.
pub fn preview_latents(seed: u64) -> Matrix {
    Matrix::randn(&mut Streams::new(seed).preview, PREVIEW_SAMPLES, LATENT_DIM)
}

fn fraction(p: &Matrix, pred: impl Fn(f32) -> bool) -> f64 {
    p.as_slice().iter().filter(|&&v| pred(v)).count() as f64 / p.len() as f64
}

/// One discriminator update on a real batch and a fresh generated batch.
///
/// The generator is only borrowed immutably, so it cannot change.
pub fn d_step(
    generator: &Network,
    discriminator: &mut Network,
    real_batch: &Matrix,
    rng: &mut Rng,
    opt: &mut Adam,
) -> Result<DStepMetrics> {
    if real_batch.cols() != discriminator.input_dim() {
        return Err(Error::shape(
            "d_step",
            real_batch.shape(),
            (real_batch.rows(), discriminator.input_dim()),
        ));
    }
    let z = Matrix::randn(rng, real_batch.rows(), generator.input_dim());
    let fake = generator.predict(&z)?;

    let (p_real, tape_real) = discriminator.forward(real_batch)?;
    let (p_fake, tape_fake) = discriminator.forward(&fake)?;
    let (loss_real, grad_real) = bce_loss(&p_real, 1.0);
    let (loss_fake, grad_fake) = bce_loss(&p_fake, 0.0);

    let mut grads = discriminator.backward(&tape_real, &grad_real)?;
    let grads_fake = discriminator.backward(&tape_fake, &grad_fake)?;
    for (g, f) in grads.layers.iter_mut().zip(&grads_fake.layers) {
        g.weights = g.weights.add(&f.weights)?;
        g.bias = g.bias.add(&f.bias)?;
    }
    opt.step(discriminator, &grads)?;

    Ok(DStepMetrics {
        d_loss: loss_real + loss_fake,
        acc_real: fraction(&p_real, |p| p > 0.5),
        acc_fake: fraction(&p_fake, |p| p < 0.5),
    })
}

/// Generator loss and dL/dp for discriminator outputs on generated images.
pub fn generator_loss(p_fake: &Matrix, variant: LossVariant) -> (f64, Matrix) {
    match variant {
        LossVariant::NonSaturating => bce_loss(p_fake, 1.0),
        // log(1 − D) is exactly −BCE(p, 0)
        LossVariant::Minimax => {
            let (loss, grad) = bce_loss(p_fake, 0.0);
            (-loss, grad.scale(-1.0))
        }
    }
}

/// Gradients of the generator loss for the latent batch `z`, pushed through
/// the frozen discriminator.
pub fn generator_gradients(
    generator: &Network,
    discriminator: &Network,
    z: &Matrix,
    variant: LossVariant,
) -> Result<(f64, crate::nn::Gradients)> {
    let (fake, g_tape) = generator.forward(z)?;
    let (p_fake, d_tape) = discriminator.forward(&fake)?;
    let (loss, dldp) = generator_loss(&p_fake, variant);
    let dldx = discriminator.backward_input(&d_tape, &dldp)?;
    let grads = generator.backward(&g_tape, &dldx)?;
    Ok((loss, grads))
}

/// One generator update through the (immutably borrowed) discriminator.
pub fn g_step(
    generator: &mut Network,
    discriminator: &Network,
    batch_size: usize,
    rng: &mut Rng,
    opt: &mut Adam,
    variant: LossVariant,
) -> Result<f64> {
    let z = Matrix::randn(rng, batch_size, generator.input_dim());
    let (loss, grads) = generator_gradients(generator, discriminator, &z, variant)?;
    opt.step(generator, &grads)?;
    Ok(loss)
}

/// Trains from scratch on `data`.
pub fn train(config: &TrainConfig, data: &MnistSet) -> Result<TrainOutcome> {
    config.validate()?;
    if data.is_empty() {
        return Err(Error::Config("training set is empty".into()));
    }
    let Streams {
        mut init,
        shuffle,
        mut noise,
        preview,
    } = Streams::new(config.seed);
    let mut generator = Network::default_generator(&mut init);
    let mut discriminator = Network::default_discriminator(&mut init);
    let preview_z = Matrix::randn(&mut preview.clone(), PREVIEW_SAMPLES, config.latent_dim);

    let mut g_opt = Adam::new(AdamConfig::with_lr(config.g_lr), &generator)?;
    let mut d_opt = Adam::new(AdamConfig::with_lr(config.d_lr), &discriminator)?;
    let mut batches = BatchIterator::with_rng(data.len(), config.batch_size, shuffle)?;

    let mut metrics = TrainMetrics::default();
    let mut snapshots = Vec::new();
    let mut step = 0;
    for epoch in 0..config.epochs {
        for _ in 0..batches.batches_per_epoch() {
            let real = batches.next_batch(data)?;
            let d = d_step(&generator, &mut discriminator, &real, &mut noise, &mut d_opt)?;
            let g_loss = g_step(
                &mut generator,
                &discriminator,
                config.batch_size,
                &mut noise,
                &mut g_opt,
                config.loss_variant,
            )?;
            metrics.steps.push(StepMetrics {
                step,
                epoch,
                d_loss: d.d_loss,
                g_loss,
                d_acc_real: d.acc_real,
                d_acc_fake: d.acc_fake,
            });
            step += 1;
        }
        let done = epoch + 1;
        let periodic = config.snapshot_every > 0 && done % config.snapshot_every == 0;
        if periodic || done == config.epochs {
            snapshots.push(Snapshot {
                epoch: done,
                artifact: modelfmt::save(&generator),
                samples: generator.predict(&preview_z)?,
            });
        }
    }

    Ok(TrainOutcome {
        generator,
        discriminator,
        metrics,
        snapshots,
    })
}

/// Replaces every image with its rank-`k` PCA reconstruction, clamped back
/// into `[-1, 1]`.
pub fn pca_compress_set(data: &MnistSet, model: &PcaModel, k: usize) -> Result<MnistSet> {
    let coords = model.transform(data.images(), k)?;
    let recon = model.inverse_transform(&coords)?.map(|v| v.clamp(-1.0, 1.0));
    data.with_images(recon)
}

/// [`train`], but every real image the discriminator sees is first projected
/// onto the top `k` principal components and reconstructed.
pub fn pca_ablation_train(config: &TrainConfig, data: &MnistSet, model: &PcaModel, k: usize) -> Result<TrainOutcome> {
    let compressed = pca_compress_set(data, model, k)?;
    train(config, &compressed)
}
