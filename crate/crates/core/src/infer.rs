//! Forward-only generation with buffers allocated once per session.
//!
//! Each layer runs through the same dense kernel as [`Network::forward`], so a
//! session's outputs match the training-side forward pass bit for bit.

use alloc::vec;
use alloc::vec::Vec;

use crate::latent::LatentVector;
use crate::modelfmt;
use crate::nn::Network;
use crate::tensor::kernel;
use crate::{Error, Result};

#[derive(Debug, Clone)]
pub struct InferenceSession {
    model: Network,
    front: Vec<f32>,
    back: Vec<f32>,
    acc: Vec<f64>,
}

impl InferenceSession {
    /// Decodes an `LWG1` artifact and preallocates scratch buffers.
    pub fn new(artifact: &[u8]) -> Result<Self> {
        Ok(Self::from_network(modelfmt::load(artifact)?))
    }

    pub fn from_network(model: Network) -> Self {
        let width = model.max_width();
        Self {
            front: vec![0.0; width],
            back: vec![0.0; width],
            acc: vec![0.0; kernel::scratch_len(1, width)],
            model,
        }
    }

    pub fn model(&self) -> &Network {
        &self.model
    }

    pub fn input_dim(&self) -> usize {
        self.model.input_dim()
    }

    pub fn output_dim(&self) -> usize {
        self.model.output_dim()
    }

    /// Runs the model on one latent vector. The returned slice borrows the
    /// session's internal buffer; nothing is allocated.
    pub fn generate(&mut self, z: &[f32]) -> Result<&[f32]> {
        if z.len() != self.input_dim() {
            return Err(Error::shape("generate", (1, z.len()), (1, self.input_dim())));
        }
        let Self {
            model,
            front,
            back,
            acc,
        } = self;
        front[..z.len()].copy_from_slice(z);
        let mut width = z.len();
        for layer in model.layers() {
            let out_dim = layer.out_dim();
            kernel::affine(
                &front[..width],
                1,
                width,
                layer.weights.as_slice(),
                out_dim,
                Some(layer.bias.as_slice()),
                acc,
                &mut back[..out_dim],
            );
            let act = layer.activation;
            for v in &mut back[..out_dim] {
                *v = act.apply(*v);
            }
            core::mem::swap(front, back);
            width = out_dim;
        }
        Ok(&self.front[..width])
    }

    /// Like [`generate`](Self::generate), copying into `out`.
    pub fn generate_into(&mut self, z: &[f32], out: &mut [f32]) -> Result<()> {
        let dim = self.output_dim();
        if out.len() != dim {
            return Err(Error::shape("generate_into", (1, out.len()), (1, dim)));
        }
        out.copy_from_slice(self.generate(z)?);
        Ok(())
    }

    pub fn generate_latent(&mut self, z: &LatentVector) -> Result<&[f32]> {
        self.generate(z.as_slice())
    }

    /// One frame per latent, in order.
    pub fn generate_path(&mut self, path: &[LatentVector]) -> Result<Vec<Vec<f32>>> {
        path.iter()
            .map(|z| self.generate(z.as_slice()).map(<[f32]>::to_vec))
            .collect()
    }

    /// All frames of `path` concatenated into one flat buffer
    /// (`path.len() × output_dim`).
    pub fn generate_path_flat(&mut self, path: &[LatentVector]) -> Result<Vec<f32>> {
        let dim = self.output_dim();
        let mut out = vec![0.0f32; path.len() * dim];
        for (z, frame) in path.iter().zip(out.chunks_exact_mut(dim)) {
            self.generate_into(z.as_slice(), frame)?;
        }
        Ok(out)
    }
}
