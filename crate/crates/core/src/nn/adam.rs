use alloc::vec::Vec;

use super::{Gradients, Network};
use crate::tensor::Matrix;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdamConfig {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
}

impl Default for AdamConfig {
    fn default() -> Self {
        Self {
            lr: 2e-4,
            beta1: 0.5,
            beta2: 0.999,
            eps: 1e-8,
        }
    }
}

impl AdamConfig {
    pub fn with_lr(lr: f64) -> Self {
        Self { lr, ..Self::default() }
    }

    fn validate(&self) -> Result<()> {
        let ok =
            self.lr > 0.0 && (0.0..1.0).contains(&self.beta1) && (0.0..1.0).contains(&self.beta2) && self.eps > 0.0;
        if !ok {
            return Err(Error::Config(alloc::format!("invalid Adam settings {self:?}")));
        }
        Ok(())
    }
}

/// One bias-corrected Adam update over flat parameter storage.
///
/// `t` is the 1-based step number after incrementing. Arithmetic is done in
/// f64; parameters and moments are stored back as f32.
pub fn adam_update(params: &mut [f32], grads: &[f32], m: &mut [f32], v: &mut [f32], t: u64, config: &AdamConfig) {
    debug_assert!(params.len() == grads.len() && m.len() == grads.len() && v.len() == grads.len());
    let AdamConfig { lr, beta1, beta2, eps } = *config;
    let c1 = 1.0 - libm::pow(beta1, t as f64);
    let c2 = 1.0 - libm::pow(beta2, t as f64);
    for (((p, &g), mi), vi) in params.iter_mut().zip(grads).zip(m.iter_mut()).zip(v.iter_mut()) {
        let g = g as f64;
        let m_new = beta1 * *mi as f64 + (1.0 - beta1) * g;
        let v_new = beta2 * *vi as f64 + (1.0 - beta2) * g * g;
        *mi = m_new as f32;
        *vi = v_new as f32;
        let m_hat = m_new / c1;
        let v_hat = v_new / c2;
        *p = (*p as f64 - lr * m_hat / (libm::sqrt(v_hat) + eps)) as f32;
    }
}

#[derive(Debug, Clone)]
struct LayerMoments {
    m_w: Matrix,
    v_w: Matrix,
    m_b: Matrix,
    v_b: Matrix,
}

/// Adam optimizer state for one network.
#[derive(Debug, Clone)]
pub struct Adam {
    config: AdamConfig,
    t: u64,
    moments: Vec<LayerMoments>,
}

impl Adam {
    pub fn new(config: AdamConfig, net: &Network) -> Result<Self> {
        config.validate()?;
        let moments = net
            .layers()
            .iter()
            .map(|l| LayerMoments {
                m_w: Matrix::zeros(l.in_dim(), l.out_dim()),
                v_w: Matrix::zeros(l.in_dim(), l.out_dim()),
                m_b: Matrix::zeros(1, l.out_dim()),
                v_b: Matrix::zeros(1, l.out_dim()),
            })
            .collect();
        Ok(Self { config, t: 0, moments })
    }

    pub fn config(&self) -> &AdamConfig {
        &self.config
    }

    pub fn step_count(&self) -> u64 {
        self.t
    }

    pub fn step(&mut self, net: &mut Network, grads: &Gradients) -> Result<()> {
        let layers = net.layers_mut();
        if layers.len() != self.moments.len() || grads.layers.len() != layers.len() {
            return Err(Error::shape(
                "adam_step",
                (layers.len(), self.moments.len()),
                (grads.layers.len(), 1),
            ));
        }
        for ((layer, g), mom) in layers.iter().zip(&grads.layers).zip(&self.moments) {
            if g.weights.shape() != layer.weights.shape() || mom.m_w.shape() != layer.weights.shape() {
                return Err(Error::shape("adam_step", layer.weights.shape(), g.weights.shape()));
            }
            if g.bias.shape() != layer.bias.shape() {
                return Err(Error::shape("adam_step", layer.bias.shape(), g.bias.shape()));
            }
        }
        self.t += 1;
        for ((layer, g), mom) in layers.iter_mut().zip(&grads.layers).zip(&mut self.moments) {
            adam_update(
                layer.weights.as_mut_slice(),
                g.weights.as_slice(),
                mom.m_w.as_mut_slice(),
                mom.v_w.as_mut_slice(),
                self.t,
                &self.config,
            );
            adam_update(
                layer.bias.as_mut_slice(),
                g.bias.as_slice(),
                mom.m_b.as_mut_slice(),
                mom.v_b.as_mut_slice(),
                self.t,
                &self.config,
            );
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nn::{Activation, LayerGradients};
    use crate::tensor::Rng;
    use alloc::vec;

    /// Textbook scalar Adam in f64, independent of the slice implementation.
    fn reference_adam(mut w: f64, steps: u32, lr: f64, b1: f64, b2: f64, eps: f64) -> Vec<f64> {
        let (mut m, mut v) = (0.0, 0.0);
        let mut trace = Vec::new();
        for t in 1..=steps {
            let g = 2.0 * w;
            m = b1 * m + (1.0 - b1) * g;
            v = b2 * v + (1.0 - b2) * g * g;
            let mh = m / (1.0 - b1.powi(t as i32));
            let vh = v / (1.0 - b2.powi(t as i32));
            w -= lr * mh / (vh.sqrt() + eps);
            trace.push(w);
        }
        trace
    }

    #[test]
    fn zero_gradient_leaves_params() {
        let mut p = vec![0.3f32, -1.5];
        let before = p.clone();
        let (mut m, mut v) = (vec![0.0; 2], vec![0.0; 2]);
        adam_update(&mut p, &[0.0, 0.0], &mut m, &mut v, 1, &AdamConfig::default());
        assert_eq!(p, before);
    }

    #[test]
    fn first_step_is_lr_times_sign() {
        let cfg = AdamConfig::default();
        for g in [0.37f32, -2.5, 1e-2] {
            let mut p = vec![0.0f32];
            let (mut m, mut v) = (vec![0.0], vec![0.0]);
            adam_update(&mut p, &[g], &mut m, &mut v, 1, &cfg);
            let expected = -cfg.lr * (g as f64).signum();
            assert!((p[0] as f64 - expected).abs() <= cfg.lr * 1e-6, "g={g}: {}", p[0]);
        }
    }

    #[test]
    fn quadratic_matches_reference() {
        let cfg = AdamConfig {
            lr: 0.1,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
        };
        let reference = reference_adam(1.0, 5, cfg.lr, cfg.beta1, cfg.beta2, cfg.eps);
        let mut p = vec![1.0f32];
        let (mut m, mut v) = (vec![0.0], vec![0.0]);
        for (t, want) in (1..=5).zip(reference) {
            let g = 2.0 * p[0];
            adam_update(&mut p, &[g], &mut m, &mut v, t, &cfg);
            assert!((p[0] as f64 - want).abs() < 1e-6, "step {t}: {} vs {want}", p[0]);
        }
    }

    #[test]
    fn network_step_counts_and_moves() {
        let mut rng = Rng::new(1);
        let mut net = Network::ladder(&[3, 2], Activation::Identity, Activation::Identity, &mut rng).unwrap();
        let mut opt = Adam::new(AdamConfig::with_lr(0.01), &net).unwrap();
        let grads = Gradients {
            layers: vec![LayerGradients {
                weights: Matrix::ones(3, 2),
                bias: Matrix::ones(1, 2),
            }],
            input: Matrix::zeros(1, 3),
        };
        let before = net.clone();
        opt.step(&mut net, &grads).unwrap();
        assert_eq!(opt.step_count(), 1);
        let after = &net.layers()[0];
        for (a, b) in after
            .weights
            .as_slice()
            .iter()
            .zip(before.layers()[0].weights.as_slice())
        {
            assert!((b - a - 0.01).abs() < 1e-6);
        }
    }

    #[test]
    fn rejects_bad_config_and_shapes() {
        let mut rng = Rng::new(1);
        let mut net = Network::ladder(&[3, 2], Activation::Identity, Activation::Identity, &mut rng).unwrap();
        assert!(Adam::new(AdamConfig::with_lr(0.0), &net).is_err());
        let mut opt = Adam::new(AdamConfig::default(), &net).unwrap();
        let grads = Gradients {
            layers: vec![LayerGradients {
                weights: Matrix::ones(2, 2),
                bias: Matrix::ones(1, 2),
            }],
            input: Matrix::zeros(1, 3),
        };
        assert!(opt.step(&mut net, &grads).is_err());
        assert_eq!(opt.step_count(), 0);
    }
}
