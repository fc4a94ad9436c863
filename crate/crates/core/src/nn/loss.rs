use crate::tensor::Matrix;

/// Probabilities are clamped to `[BCE_CLAMP, 1 - BCE_CLAMP]` before taking logs.
pub const BCE_CLAMP: f64 = 1e-7;

/// Mean binary cross-entropy of `p` against a constant target (0 or 1).
///
/// Returns the loss and dL/dp. The gradient is zero wherever the clamp is
/// active, matching the clamped loss.
pub fn bce_loss(p: &Matrix, target: f32) -> (f64, Matrix) {
    debug_assert!(target == 0.0 || target == 1.0);
    let y = target as f64;
    let n = p.len() as f64;
    let mut grad = Matrix::zeros(p.rows(), p.cols());
    let mut total = 0.0f64;
    for (g, &pi) in grad.as_mut_slice().iter_mut().zip(p.as_slice()) {
        let raw = pi as f64;
        let pc = raw.clamp(BCE_CLAMP, 1.0 - BCE_CLAMP);
        total -= y * libm::log(pc) + (1.0 - y) * libm::log(1.0 - pc);
        if raw > BCE_CLAMP && raw < 1.0 - BCE_CLAMP {
            *g = ((-y / pc + (1.0 - y) / (1.0 - pc)) / n) as f32;
        }
    }
    (total / n, grad)
}
