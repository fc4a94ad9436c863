//! Dense product kernel shared by training and inference.
//!
//! Every output element is accumulated in f64 starting from zero, with the
//! inner index ascending, and the bias (if any) is added last before rounding
//! to f32. Rust never contracts `a * b + c` into a fused multiply-add, so the
//! portable and AVX2 builds of this loop produce identical bits.

const ROW_BLOCK: usize = 4;

/// Scratch length (in f64s) needed by [`affine`] for a product with `rows`
/// rows and `cols` output columns.
pub fn scratch_len(rows: usize, cols: usize) -> usize {
    rows.min(ROW_BLOCK) * cols
}

/// `out = x · w (+ bias)` for row-major `x: rows×inner`, `w: inner×cols`.
#[allow(clippy::too_many_arguments)]
pub fn affine(
    x: &[f32],
    rows: usize,
    inner: usize,
    w: &[f32],
    cols: usize,
    bias: Option<&[f32]>,
    acc: &mut [f64],
    out: &mut [f32],
) {
    debug_assert_eq!(x.len(), rows * inner);
    debug_assert_eq!(w.len(), inner * cols);
    debug_assert!(out.len() >= rows * cols);
    debug_assert!(acc.len() >= scratch_len(rows, cols));
    debug_assert!(bias.map_or(true, |b| b.len() == cols));

    #[cfg(all(feature = "std", target_arch = "x86_64"))]
    {
        if std::is_x86_feature_detected!("avx2") {
            // SAFETY: the CPU supports AVX2, checked just above.
            unsafe { affine_avx2(x, rows, inner, w, cols, bias, acc, out) };
            return;
        }
    }
    affine_portable(x, rows, inner, w, cols, bias, acc, out);
}

#[cfg(all(feature = "std", target_arch = "x86_64"))]
#[target_feature(enable = "avx2")]
#[allow(clippy::too_many_arguments)]
unsafe fn affine_avx2(
    x: &[f32],
    rows: usize,
    inner: usize,
    w: &[f32],
    cols: usize,
    bias: Option<&[f32]>,
    acc: &mut [f64],
    out: &mut [f32],
) {
    affine_body(x, rows, inner, w, cols, bias, acc, out)
}

#[allow(clippy::too_many_arguments)]
pub(crate) fn affine_portable(
    x: &[f32],
    rows: usize,
    inner: usize,
    w: &[f32],
    cols: usize,
    bias: Option<&[f32]>,
    acc: &mut [f64],
    out: &mut [f32],
) {
    affine_body(x, rows, inner, w, cols, bias, acc, out)
}

#[inline(always)]
#[allow(clippy::too_many_arguments)]
fn affine_body(
    x: &[f32],
    rows: usize,
    inner: usize,
    w: &[f32],
    cols: usize,
    bias: Option<&[f32]>,
    acc: &mut [f64],
    out: &mut [f32],
) {
    let mut r = 0;
    while r + ROW_BLOCK <= rows {
        let block = &mut acc[..ROW_BLOCK * cols];
        block.fill(0.0);
        let (a0, rest) = block.split_at_mut(cols);
        let (a1, rest) = rest.split_at_mut(cols);
        let (a2, a3) = rest.split_at_mut(cols);
        let xs = &x[r * inner..(r + ROW_BLOCK) * inner];
        for (i, wi) in w.chunks_exact(cols).enumerate() {
            let x0 = xs[i] as f64;
            let x1 = xs[inner + i] as f64;
            let x2 = xs[2 * inner + i] as f64;
            let x3 = xs[3 * inner + i] as f64;
            for ((((&wv, o0), o1), o2), o3) in wi
                .iter()
                .zip(a0.iter_mut())
                .zip(a1.iter_mut())
                .zip(a2.iter_mut())
                .zip(a3.iter_mut())
            {
                let wv = wv as f64;
                *o0 += x0 * wv;
                *o1 += x1 * wv;
                *o2 += x2 * wv;
                *o3 += x3 * wv;
            }
        }
        for (k, a) in [&*a0, &*a1, &*a2, &*a3].into_iter().enumerate() {
            finish(a, bias, &mut out[(r + k) * cols..(r + k + 1) * cols]);
        }
        r += ROW_BLOCK;
    }
    while r < rows {
        let a = &mut acc[..cols];
        a.fill(0.0);
        let xr = &x[r * inner..(r + 1) * inner];
        // Two inner indices per pass halve the accumulator traffic; each
        // element still adds its terms in ascending order.
        let mut pairs = w.chunks_exact(2 * cols);
        for (xp, wp) in xr.chunks_exact(2).zip(&mut pairs) {
            let (x0, x1) = (xp[0] as f64, xp[1] as f64);
            let (w0, w1) = wp.split_at(cols);
            for ((o, &p), &q) in a.iter_mut().zip(w0).zip(w1) {
                *o = (*o + x0 * p as f64) + x1 * q as f64;
            }
        }
        if inner % 2 == 1 {
            let xi = xr[inner - 1] as f64;
            for (o, &wv) in a.iter_mut().zip(pairs.remainder()) {
                *o += xi * wv as f64;
            }
        }
        finish(a, bias, &mut out[r * cols..(r + 1) * cols]);
        r += 1;
    }
}

#[inline(always)]
fn finish(acc: &[f64], bias: Option<&[f32]>, out: &mut [f32]) {
    match bias {
        Some(b) => {
            for ((o, &a), &bv) in out.iter_mut().zip(acc).zip(b) {
                *o = (a + bv as f64) as f32;
            }
        }
        None => {
            for (o, &a) in out.iter_mut().zip(acc) {
                *o = a as f32;
            }
        }
    }
}
