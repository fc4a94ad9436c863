//! Central finite differences of an independent f64 forward pass, compared
//! against `Network::backward`.

use lerpgan_core::nn::{Activation, DenseLayer, Gradients, Network};
use lerpgan_core::{Matrix, Rng};

pub const H: f64 = 1e-3;
pub const TOLERANCE: f64 = 1e-3;
// Below this magnitude a gradient is compared absolutely.
pub const FLOOR: f64 = 1e-4;

struct Layer64 {
    w: Vec<f64>,
    b: Vec<f64>,
    rows: usize,
    cols: usize,
    act: Activation,
}

fn act64(a: Activation, x: f64) -> f64 {
    match a {
        Activation::Identity => x,
        Activation::LeakyRelu => {
            if x > 0.0 {
                x
            } else {
                0.2 * x
            }
        }
        Activation::Relu => x.max(0.0),
        Activation::Tanh => x.tanh(),
        Activation::Sigmoid => 1.0 / (1.0 + (-x).exp()),
    }
}

fn has_kink(a: Activation) -> bool {
    matches!(a, Activation::LeakyRelu | Activation::Relu)
}

/// `Σ y ⊙ r` in f64, plus the signs of every pre-activation of kinked layers.
fn loss64(layers: &[Layer64], x: &[f64], batch: usize, r: &[f64]) -> (f64, Vec<bool>) {
    let mut h = x.to_vec();
    let mut signs = Vec::new();
    for l in layers {
        let mut out = vec![0.0; batch * l.cols];
        for n in 0..batch {
            for j in 0..l.cols {
                let mut z = l.b[j];
                for i in 0..l.rows {
                    z += h[n * l.rows + i] * l.w[i * l.cols + j];
                }
                if has_kink(l.act) {
                    signs.push(z > 0.0);
                }
                out[n * l.cols + j] = act64(l.act, z);
            }
        }
        h = out;
    }
    (h.iter().zip(r).map(|(a, b)| a * b).sum(), signs)
}

fn widen(m: &Matrix) -> Vec<f64> {
    m.as_slice().iter().map(|&v| v as f64).collect()
}

pub fn rel_err(a: f64, n: f64) -> f64 {
    (a - n).abs() / a.abs().max(n.abs()).max(FLOOR)
}

pub struct Report {
    pub checked: usize,
    pub skipped: usize,
    pub worst: f64,
}

/// Which tensor a perturbation targets.
enum Slot {
    W(usize),
    B(usize),
    X,
}

pub fn check(net: &Network, x: &Matrix, r: &Matrix) -> Report {
    let (_, tape) = net.forward(x).unwrap();
    check_against(net, x, r, &net.backward(&tape, r).unwrap())
}

pub fn check_against(net: &Network, x: &Matrix, r: &Matrix, grads: &Gradients) -> Report {
    let batch = x.rows();
    let mut layers: Vec<Layer64> = net
        .layers()
        .iter()
        .map(|l| Layer64 {
            w: widen(&l.weights),
            b: widen(&l.bias),
            rows: l.in_dim(),
            cols: l.out_dim(),
            act: l.activation,
        })
        .collect();
    let mut x64 = widen(x);
    let r64 = widen(r);
    let (_, base_signs) = loss64(&layers, &x64, batch, &r64);

    let mut targets = Vec::new();
    for (li, g) in grads.layers.iter().enumerate() {
        for k in 0..g.weights.len() {
            targets.push((Slot::W(li), k, g.weights.as_slice()[k] as f64));
        }
        for k in 0..g.bias.len() {
            targets.push((Slot::B(li), k, g.bias.as_slice()[k] as f64));
        }
    }
    for k in 0..grads.input.len() {
        targets.push((Slot::X, k, grads.input.as_slice()[k] as f64));
    }

    let mut report = Report {
        checked: 0,
        skipped: 0,
        worst: 0.0,
    };
    for (slot, k, analytic) in targets {
        let eval = |delta: f64, layers: &mut [Layer64], x64: &mut [f64]| {
            let cell = match slot {
                Slot::W(li) => &mut layers[li].w[k],
                Slot::B(li) => &mut layers[li].b[k],
                Slot::X => &mut x64[k],
            };
            let orig = *cell;
            *cell = orig + delta;
            let out = loss64(layers, x64, batch, &r64);
            match slot {
                Slot::W(li) => layers[li].w[k] = orig,
                Slot::B(li) => layers[li].b[k] = orig,
                Slot::X => x64[k] = orig,
            }
            out
        };
        let (plus, s_plus) = eval(H, &mut layers, &mut x64);
        let (minus, s_minus) = eval(-H, &mut layers, &mut x64);
        if s_plus != base_signs || s_minus != base_signs {
            report.skipped += 1;
            continue;
        }
        let numeric = (plus - minus) / (2.0 * H);
        report.worst = report.worst.max(rel_err(analytic, numeric));
        report.checked += 1;
    }
    report
}

/// A net whose weights are large enough that every layer matters.
pub fn random_net(dims: &[usize], acts: &[Activation], rng: &mut Rng) -> Network {
    let layers = dims
        .windows(2)
        .zip(acts)
        .map(|(w, &a)| {
            let scale = 1.0 / (w[0] as f32).sqrt();
            let weights = Matrix::randn(rng, w[0], w[1]).scale(scale);
            let bias = Matrix::randn(rng, 1, w[1]).scale(0.1);
            DenseLayer::new(weights, bias, a).unwrap()
        })
        .collect();
    Network::new(layers).unwrap()
}

/// One randomized case: depth 1..=3, widths 1..=10, batch 1..=4, and layer
/// activations cycling through every kind so that 5 consecutive seeds cover
/// each activation in each position.
pub fn random_case(seed: u64) -> (String, Vec<Activation>, Report) {
    let mut rng = Rng::new(seed);
    let depth = 1 + rng.below(3);
    let dims: Vec<usize> = (0..=depth).map(|_| 1 + rng.below(10)).collect();
    let acts: Vec<Activation> = (0..depth).map(|l| Activation::ALL[(seed as usize + l) % 5]).collect();
    let batch = 1 + rng.below(4);
    let net = random_net(&dims, &acts, &mut rng);
    let x = Matrix::randn(&mut rng, batch, dims[0]);
    let r = Matrix::randn(&mut rng, batch, dims[depth]);
    let label = format!("seed {seed} dims {dims:?} {acts:?}");
    (label, acts, check(&net, &x, &r))
}
