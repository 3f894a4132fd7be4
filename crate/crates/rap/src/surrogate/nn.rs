use super::SurrogateError;
use crate::rng::CounterRng;
use num_traits::Float;

/// Scalar type the network runs in: `f32` for training/inference, `f64` for
/// the finite-difference gradient-check mode.
pub trait Real:
    Float + std::ops::AddAssign + std::ops::SubAssign + Default + Send + Sync + std::fmt::Debug
{
    fn from_f64(v: f64) -> Self;
    fn to_f64_(self) -> f64;
}

impl Real for f32 {
    fn from_f64(v: f64) -> Self {
        v as f32
    }
    fn to_f64_(self) -> f64 {
        self as f64
    }
}

impl Real for f64 {
    fn from_f64(v: f64) -> Self {
        v
    }
    fn to_f64_(self) -> f64 {
        self
    }
}

/// A dense row-major array with an explicit shape.
#[derive(Clone, Debug)]
pub struct Tensor {
    shape: Vec<usize>,
    data: Vec<f32>,
}

impl Tensor {
    pub fn new(shape: Vec<usize>, data: Vec<f32>) -> Result<Self, SurrogateError> {
        let count: usize = shape.iter().product();
        if count != data.len() {
            return Err(SurrogateError::ShapeMismatch(format!(
                "shape {shape:?} wants {count} values, got {}",
                data.len()
            )));
        }
        Ok(Self { shape, data })
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn data(&self) -> &[f32] {
        &self.data
    }
}

/// C = A (m x k) * B (k x n), accumulating into `c`.
pub fn matmul<T: Real>(a: &[T], b: &[T], c: &mut [T], m: usize, k: usize, n: usize) {
    debug_assert_eq!(a.len(), m * k);
    debug_assert_eq!(b.len(), k * n);
    debug_assert_eq!(c.len(), m * n);
    for i in 0..m {
        let crow = &mut c[i * n..(i + 1) * n];
        for p in 0..k {
            let av = a[i * k + p];
            if av == T::zero() {
                continue;
            }
            let brow = &b[p * n..(p + 1) * n];
            for (cv, bv) in crow.iter_mut().zip(brow.iter()) {
                *cv += av * *bv;
            }
        }
    }
}

/// C = A^T (k x m stored) * B (k x n): out (m x n), accumulating.
pub fn matmul_tn<T: Real>(a: &[T], b: &[T], c: &mut [T], k: usize, m: usize, n: usize) {
    debug_assert_eq!(a.len(), k * m);
    debug_assert_eq!(b.len(), k * n);
    debug_assert_eq!(c.len(), m * n);
    for p in 0..k {
        let arow = &a[p * m..(p + 1) * m];
        let brow = &b[p * n..(p + 1) * n];
        for i in 0..m {
            let av = arow[i];
            if av == T::zero() {
                continue;
            }
            let crow = &mut c[i * n..(i + 1) * n];
            for (cv, bv) in crow.iter_mut().zip(brow.iter()) {
                *cv += av * *bv;
            }
        }
    }
}

/// C = A (m x n) * B^T (k2 x n stored): out (m x k2), accumulating.
pub fn matmul_nt<T: Real>(a: &[T], b: &[T], c: &mut [T], m: usize, n: usize, k2: usize) {
    debug_assert_eq!(a.len(), m * n);
    debug_assert_eq!(b.len(), k2 * n);
    debug_assert_eq!(c.len(), m * k2);
    for i in 0..m {
        let arow = &a[i * n..(i + 1) * n];
        for q in 0..k2 {
            let brow = &b[q * n..(q + 1) * n];
            let mut acc = T::zero();
            for (av, bv) in arow.iter().zip(brow.iter()) {
                acc += *av * *bv;
            }
            c[i * k2 + q] += acc;
        }
    }
}

pub const KERNEL: usize = 4;
/// Asymmetric same-padding for the even 4x4 kernel: 1 before, 2 after.
pub const PAD_BEFORE: isize = 1;

/// Expands `input` [c, h, w] into the column matrix [c*16, h*w] for the 4x4
/// same-padded convolution.
pub fn im2col<T: Real>(input: &[T], c: usize, h: usize, w: usize, col: &mut [T]) {
    debug_assert_eq!(input.len(), c * h * w);
    debug_assert_eq!(col.len(), c * KERNEL * KERNEL * h * w);
    let hw = h * w;
    for ch in 0..c {
        let plane = &input[ch * hw..(ch + 1) * hw];
        for ky in 0..KERNEL {
            for kx in 0..KERNEL {
                let row = ch * KERNEL * KERNEL + ky * KERNEL + kx;
                let dst = &mut col[row * hw..(row + 1) * hw];
                for y in 0..h {
                    let sy = y as isize + ky as isize - PAD_BEFORE;
                    if sy < 0 || sy >= h as isize {
                        for v in &mut dst[y * w..(y + 1) * w] {
                            *v = T::zero();
                        }
                        continue;
                    }
                    let src_row = &plane[(sy as usize) * w..(sy as usize + 1) * w];
                    let drow = &mut dst[y * w..(y + 1) * w];
                    for x in 0..w {
                        let sx = x as isize + kx as isize - PAD_BEFORE;
                        drow[x] = if sx < 0 || sx >= w as isize {
                            T::zero()
                        } else {
                            src_row[sx as usize]
                        };
                    }
                }
            }
        }
    }
}

/// Scatters column-matrix gradients back to the input layout (adjoint of
/// `im2col`), accumulating into `dinput`.
pub fn col2im<T: Real>(dcol: &[T], c: usize, h: usize, w: usize, dinput: &mut [T]) {
    debug_assert_eq!(dinput.len(), c * h * w);
    let hw = h * w;
    for ch in 0..c {
        let dplane = &mut dinput[ch * hw..(ch + 1) * hw];
        for ky in 0..KERNEL {
            for kx in 0..KERNEL {
                let row = ch * KERNEL * KERNEL + ky * KERNEL + kx;
                let src = &dcol[row * hw..(row + 1) * hw];
                for y in 0..h {
                    let sy = y as isize + ky as isize - PAD_BEFORE;
                    if sy < 0 || sy >= h as isize {
                        continue;
                    }
                    for x in 0..w {
                        let sx = x as isize + kx as isize - PAD_BEFORE;
                        if sx < 0 || sx >= w as isize {
                            continue;
                        }
                        dplane[(sy as usize) * w + sx as usize] += src[y * w + x];
                    }
                }
            }
        }
    }
}

/// 2x2 max-pool, stride 2. Ties go to the first index in scan order.
/// Records the absolute input index of each maximum for the backward pass.
pub fn maxpool_forward<T: Real>(
    input: &[T],
    c: usize,
    h: usize,
    w: usize,
    out: &mut [T],
    argmax: &mut [u32],
) {
    let (oh, ow) = (h / 2, w / 2);
    debug_assert_eq!(out.len(), c * oh * ow);
    for ch in 0..c {
        let plane = &input[ch * h * w..(ch + 1) * h * w];
        for oy in 0..oh {
            for ox in 0..ow {
                let mut best_idx = (2 * oy) * w + 2 * ox;
                let mut best = plane[best_idx];
                for (dy, dx) in [(0usize, 1usize), (1, 0), (1, 1)] {
                    let idx = (2 * oy + dy) * w + 2 * ox + dx;
                    if plane[idx] > best {
                        best = plane[idx];
                        best_idx = idx;
                    }
                }
                out[ch * oh * ow + oy * ow + ox] = best;
                argmax[ch * oh * ow + oy * ow + ox] = (ch * h * w + best_idx) as u32;
            }
        }
    }
}

pub fn maxpool_backward<T: Real>(dout: &[T], argmax: &[u32], dinput: &mut [T]) {
    for (g, &idx) in dout.iter().zip(argmax.iter()) {
        dinput[idx as usize] += *g;
    }
}

pub fn relu_forward<T: Real>(x: &mut [T]) {
    for v in x {
        if *v < T::zero() {
            *v = T::zero();
        }
    }
}

/// Backward through ReLU given the *activations* (post-ReLU values).
pub fn relu_backward<T: Real>(grad: &mut [T], activ: &[T]) {
    for (g, a) in grad.iter_mut().zip(activ.iter()) {
        if *a <= T::zero() {
            *g = T::zero();
        }
    }
}

/// Inverted dropout: keeps with probability `1 - p`, scaling by `1/(1-p)`.
/// Returns the mask (scale or zero per activation). One RNG draw per value.
pub fn dropout_forward<T: Real>(x: &mut [T], p: f64, rng: &mut CounterRng, mask: &mut [T]) {
    let keep = 1.0 - p;
    let scale = T::from_f64(1.0 / keep);
    for (v, m) in x.iter_mut().zip(mask.iter_mut()) {
        if rng.next_f64() < keep {
            *m = scale;
            *v = *v * scale;
        } else {
            *m = T::zero();
            *v = T::zero();
        }
    }
}

pub fn dropout_backward<T: Real>(grad: &mut [T], mask: &[T]) {
    for (g, m) in grad.iter_mut().zip(mask.iter()) {
        *g = *g * *m;
    }
}

/// Numerically stable softmax over a small logit slice.
pub fn softmax<T: Real>(logits: &[T], out: &mut [T]) {
    let mut max = logits[0];
    for &v in &logits[1..] {
        if v > max {
            max = v;
        }
    }
    let mut sum = T::zero();
    for (o, &v) in out.iter_mut().zip(logits.iter()) {
        *o = (v - max).exp();
        sum += *o;
    }
    for o in out.iter_mut() {
        *o = *o / sum;
    }
}

/// Mean softmax cross-entropy over one sample; returns the loss and writes
/// `dlogits = softmax - onehot` (caller scales by 1/batch for the mean).
pub fn cross_entropy<T: Real>(logits: &[T], label: usize, dlogits: &mut [T]) -> T {
    softmax(logits, dlogits);
    let p = dlogits[label];
    let eps = T::from_f64(1e-30);
    let loss = -(p + eps).ln();
    dlogits[label] -= T::one();
    loss
}
