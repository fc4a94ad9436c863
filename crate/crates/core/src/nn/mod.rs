//! Dense feed-forward networks with reverse-mode gradients.
//!
//! A forward pass records a [`Tape`] (each layer's input and pre-activation,
//! plus the final output). [`Network::backward`] walks the tape in reverse and
//! returns weight, bias and input gradients; the input gradient is what lets a
//! discriminator's loss flow back into the generator.

mod adam;
mod loss;

use alloc::vec::Vec;

pub use adam::{adam_update, Adam, AdamConfig};
pub use loss::{bce_loss, BCE_CLAMP};

use crate::tensor::{Matrix, Rng};
use crate::{Error, Result};

/// Negative-side slope of [`Activation::LeakyRelu`].
pub const LEAKY_SLOPE: f32 = 0.2;

/// Standard deviation of the Gaussian weight initialization.
pub const INIT_STD: f32 = 0.02;

pub const LATENT_DIM: usize = 100;
pub const GENERATOR_DIMS: [usize; 5] = [LATENT_DIM, 256, 512, 1024, 784];
pub const DISCRIMINATOR_DIMS: [usize; 4] = [784, 512, 256, 1];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(u8)]
pub enum Activation {
    Identity = 0,
    LeakyRelu = 1,
    Relu = 2,
    Tanh = 3,
    Sigmoid = 4,
}

impl Activation {
    pub const ALL: [Activation; 5] = [
        Activation::Identity,
        Activation::LeakyRelu,
        Activation::Relu,
        Activation::Tanh,
        Activation::Sigmoid,
    ];

    pub fn code(self) -> u8 {
        self as u8
    }

    pub fn from_code(code: u8) -> Option<Self> {
        Self::ALL.get(code as usize).copied()
    }

    #[inline]
    pub fn apply(self, x: f32) -> f32 {
        match self {
            Activation::Identity => x,
            Activation::LeakyRelu => {
                if x > 0.0 {
                    x
                } else {
                    LEAKY_SLOPE * x
                }
            }
            Activation::Relu => {
                if x > 0.0 {
                    x
                } else {
                    0.0
                }
            }
            Activation::Tanh => libm::tanhf(x),
            Activation::Sigmoid => 1.0 / (1.0 + libm::expf(-x)),
        }
    }

    /// Derivative at pre-activation `pre`, given `out = apply(pre)`.
    #[inline]
    pub fn derivative(self, pre: f32, out: f32) -> f32 {
        match self {
            Activation::Identity => 1.0,
            Activation::LeakyRelu => {
                if pre > 0.0 {
                    1.0
                } else {
                    LEAKY_SLOPE
                }
            }
            Activation::Relu => {
                if pre > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Activation::Tanh => 1.0 - out * out,
            Activation::Sigmoid => out * (1.0 - out),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DenseLayer {
    pub weights: Matrix,
    pub bias: Matrix,
    pub activation: Activation,
}

impl DenseLayer {
    pub fn new(weights: Matrix, bias: Matrix, activation: Activation) -> Result<Self> {
        if bias.rows() != 1 || bias.cols() != weights.cols() {
            return Err(Error::shape("DenseLayer", weights.shape(), bias.shape()));
        }
        Ok(Self {
            weights,
            bias,
            activation,
        })
    }

    /// Gaussian weights with std [`INIT_STD`], zero bias.
    pub fn init(in_dim: usize, out_dim: usize, activation: Activation, rng: &mut Rng) -> Self {
        let weights = Matrix::randn(rng, in_dim, out_dim).scale(INIT_STD);
        Self {
            weights,
            bias: Matrix::zeros(1, out_dim),
            activation,
        }
    }

    pub fn in_dim(&self) -> usize {
        self.weights.rows()
    }

    pub fn out_dim(&self) -> usize {
        self.weights.cols()
    }

    pub fn param_count(&self) -> usize {
        self.weights.len() + self.bias.len()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    layers: Vec<DenseLayer>,
}

/// Intermediates recorded by [`Network::forward`].
#[derive(Debug, Clone)]
pub struct Tape {
    inputs: Vec<Matrix>,
    pre: Vec<Matrix>,
    output: Matrix,
}

impl Tape {
    pub fn output(&self) -> &Matrix {
        &self.output
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LayerGradients {
    pub weights: Matrix,
    pub bias: Matrix,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub layers: Vec<LayerGradients>,
    /// Gradient with respect to the network input.
    pub input: Matrix,
}

impl Network {
    pub fn new(layers: Vec<DenseLayer>) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::Config("network needs at least one layer".into()));
        }
        for pair in layers.windows(2) {
            if pair[0].out_dim() != pair[1].in_dim() {
                return Err(Error::shape(
                    "Network",
                    pair[0].weights.shape(),
                    pair[1].weights.shape(),
                ));
            }
        }
        Ok(Self { layers })
    }

    /// A freshly initialized ladder `dims[0] → … → dims[n]`, with `hidden`
    /// on every layer but the last.
    pub fn ladder(dims: &[usize], hidden: Activation, output: Activation, rng: &mut Rng) -> Result<Self> {
        if dims.len() < 2 || dims.contains(&0) {
            return Err(Error::Config(alloc::format!("invalid layer widths {dims:?}")));
        }
        let last = dims.len() - 2;
        let layers = dims
            .windows(2)
            .enumerate()
            .map(|(i, w)| {
                let act = if i == last { output } else { hidden };
                DenseLayer::init(w[0], w[1], act, rng)
            })
            .collect();
        Self::new(layers)
    }

    /// 100 → 256 → 512 → 1024 → 784, leaky ReLU hidden, tanh output.
    pub fn default_generator(rng: &mut Rng) -> Self {
        Self::ladder(&GENERATOR_DIMS, Activation::LeakyRelu, Activation::Tanh, rng).expect("static dims")
    }

    /// 784 → 512 → 256 → 1, leaky ReLU hidden, sigmoid output.
    pub fn default_discriminator(rng: &mut Rng) -> Self {
        Self::ladder(&DISCRIMINATOR_DIMS, Activation::LeakyRelu, Activation::Sigmoid, rng).expect("static dims")
    }

    pub fn layers(&self) -> &[DenseLayer] {
        &self.layers
    }

    pub fn layers_mut(&mut self) -> &mut [DenseLayer] {
        &mut self.layers
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].in_dim()
    }

    pub fn output_dim(&self) -> usize {
        self.layers[self.layers.len() - 1].out_dim()
    }

    /// Widest activation vector, input included.
    pub fn max_width(&self) -> usize {
        self.layers
            .iter()
            .map(DenseLayer::out_dim)
            .fold(self.input_dim(), usize::max)
    }

    pub fn param_count(&self) -> usize {
        self.layers.iter().map(DenseLayer::param_count).sum()
    }

    fn check_input(&self, x: &Matrix) -> Result<()> {
        if x.cols() != self.input_dim() {
            return Err(Error::shape("forward", x.shape(), self.layers[0].weights.shape()));
        }
        Ok(())
    }

    /// Forward pass without recording a tape.
    pub fn predict(&self, x: &Matrix) -> Result<Matrix> {
        self.check_input(x)?;
        let mut h = x.clone();
        for layer in &self.layers {
            h = h.affine(&layer.weights, &layer.bias)?;
            let act = layer.activation;
            h.map_inplace(|v| act.apply(v));
        }
        Ok(h)
    }

    pub fn forward(&self, x: &Matrix) -> Result<(Matrix, Tape)> {
        self.check_input(x)?;
        let mut inputs = Vec::with_capacity(self.layers.len());
        let mut pre = Vec::with_capacity(self.layers.len());
        let mut h = x.clone();
        for layer in &self.layers {
            let z = h.affine(&layer.weights, &layer.bias)?;
            let act = layer.activation;
            let out = z.map(|v| act.apply(v));
            inputs.push(h);
            pre.push(z);
            h = out;
        }
        let tape = Tape {
            inputs,
            pre,
            output: h.clone(),
        };
        Ok((h, tape))
    }

    fn check_tape(&self, tape: &Tape, dldy: &Matrix) -> Result<()> {
        if tape.inputs.len() != self.layers.len() || tape.pre.len() != self.layers.len() {
            return Err(Error::TapeMismatch);
        }
        for ((layer, input), pre) in self.layers.iter().zip(&tape.inputs).zip(&tape.pre) {
            if input.cols() != layer.in_dim() || pre.cols() != layer.out_dim() || pre.rows() != input.rows() {
                return Err(Error::TapeMismatch);
            }
        }
        if dldy.shape() != tape.output.shape() {
            return Err(Error::shape("backward", tape.output.shape(), dldy.shape()));
        }
        Ok(())
    }

    /// Gradient through layer `i`'s activation.
    fn activation_grad(&self, tape: &Tape, i: usize, upstream: &Matrix) -> Matrix {
        let act = self.layers[i].activation;
        let pre = &tape.pre[i];
        let out = if i + 1 < self.layers.len() {
            &tape.inputs[i + 1]
        } else {
            &tape.output
        };
        let mut dz = upstream.clone();
        for ((g, &p), &o) in dz.as_mut_slice().iter_mut().zip(pre.as_slice()).zip(out.as_slice()) {
            *g *= act.derivative(p, o);
        }
        dz
    }

    /// Full reverse pass: gradients for every weight and bias, plus dL/dx.
    pub fn backward(&self, tape: &Tape, dldy: &Matrix) -> Result<Gradients> {
        self.check_tape(tape, dldy)?;
        let mut grads = Vec::with_capacity(self.layers.len());
        let mut upstream = dldy.clone();
        for i in (0..self.layers.len()).rev() {
            let dz = self.activation_grad(tape, i, &upstream);
            let weights = tape.inputs[i].transpose().matmul(&dz)?;
            let bias = dz.sum_rows();
            upstream = dz.matmul(&self.layers[i].weights.transpose())?;
            grads.push(LayerGradients { weights, bias });
        }
        grads.reverse();
        Ok(Gradients {
            layers: grads,
            input: upstream,
        })
    }

    /// Reverse pass that only produces dL/dx, skipping parameter gradients.
    pub fn backward_input(&self, tape: &Tape, dldy: &Matrix) -> Result<Matrix> {
        self.check_tape(tape, dldy)?;
        let mut upstream = dldy.clone();
        for i in (0..self.layers.len()).rev() {
            let dz = self.activation_grad(tape, i, &upstream);
            upstream = dz.matmul(&self.layers[i].weights.transpose())?;
        }
        Ok(upstream)
    }
}
