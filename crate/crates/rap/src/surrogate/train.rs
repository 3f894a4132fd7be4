use super::model::{CnnArch, CnnModel};
use super::nn::Real;
use super::{Label, SurrogateError};
use crate::rng::CounterRng;
use rayon::prelude::*;

/// Adam hyperparameters (defaults) plus the training schedule.
#[derive(Clone, Debug, serde::Serialize)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    pub batch_size: usize,
    pub epochs: usize,
    pub seed: u64,
    pub dropout: f64,
    /// Stop after any epoch whose training accuracy reaches this value.
    pub target_accuracy: Option<f64>,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            learning_rate: 1e-3,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
            batch_size: 32,
            epochs: 10,
            seed: 0,
            dropout: 0.5,
            target_accuracy: None,
        }
    }
}

/// One training example: a borrowed 2x64x64 image and its class.
#[derive(Clone, Copy)]
pub struct TrainExample<'a> {
    pub pixels: &'a [f32],
    pub label: Label,
}

#[derive(Clone, Copy, Debug)]
pub struct EpochStats {
    pub loss: f64,
    pub accuracy: f64,
}

/// One Adam update with bias correction; `t` starts at 1.
pub fn adam_step<T: Real>(
    params: &mut [T],
    grads: &[T],
    m: &mut [T],
    v: &mut [T],
    t: usize,
    cfg: &TrainConfig,
) {
    let b1 = T::from_f64(cfg.beta1);
    let b2 = T::from_f64(cfg.beta2);
    let one = T::one();
    let lr = T::from_f64(cfg.learning_rate);
    let eps = T::from_f64(cfg.eps);
    let bc1 = T::from_f64(1.0 - cfg.beta1.powi(t as i32));
    let bc2 = T::from_f64(1.0 - cfg.beta2.powi(t as i32));
    for i in 0..params.len() {
        let g = grads[i];
        m[i] = b1 * m[i] + (one - b1) * g;
        v[i] = b2 * v[i] + (one - b2) * g * g;
        let m_hat = m[i] / bc1;
        let v_hat = v[i] / bc2;
        params[i] = params[i] - lr * m_hat / (v_hat.sqrt() + eps);
    }
}

/// Gradient accumulation splits each batch into this many fixed groups so
/// parallel execution reduces in a machine-independent order.
const GRAD_GROUPS: usize = 4;

/// Trains a fresh Kaiming-initialized model with shuffled mini-batches,
/// dropout, and Adam. Deterministic given the seed: shuffling, dropout
/// streams, and the gradient reduction order are all derived, not raced.
pub fn train(
    arch: CnnArch,
    examples: &[TrainExample],
    cfg: &TrainConfig,
) -> Result<(CnnModel<f32>, Vec<EpochStats>), SurrogateError> {
    if examples.is_empty() {
        return Err(SurrogateError::SingleClassDataset);
    }
    let highs = examples.iter().filter(|e| e.label == Label::High).count();
    if highs == 0 || highs == examples.len() {
        return Err(SurrogateError::SingleClassDataset);
    }
    let mut model = CnnModel::<f32>::init_kaiming(arch, cfg.seed)?;
    let n_params = model.params.len();
    let mut m_buf = vec![0.0f32; n_params];
    let mut v_buf = vec![0.0f32; n_params];
    let mut grads = vec![0.0f32; n_params];
    let mut group_grads: Vec<Vec<f32>> = (0..GRAD_GROUPS).map(|_| vec![0.0f32; n_params]).collect();
    let mut history = Vec::with_capacity(cfg.epochs);
    let input_len = {
        let (c, h, w) = model.arch.input;
        c * h * w
    };
    let mut t = 0usize;
    for epoch in 0..cfg.epochs {
        let mut order: Vec<usize> = (0..examples.len()).collect();
        let mut shuffle_rng = CounterRng::from_parts(cfg.seed, &[0x5af, epoch as u64]);
        shuffle_rng.shuffle(&mut order);
        let mut epoch_loss = 0.0f64;
        let mut epoch_correct = 0usize;
        for batch_ids in order.chunks(cfg.batch_size) {
            let b = batch_ids.len();
            // Gather the batch contiguously (samples may come from anywhere
            // in the backing buffer).
            let mut batch = vec![0.0f32; b * input_len];
            let mut labels = vec![0usize; b];
            for (i, &id) in batch_ids.iter().enumerate() {
                batch[i * input_len..(i + 1) * input_len].copy_from_slice(examples[id].pixels);
                labels[i] = examples[id].label.index();
            }
            // Fixed-size groups, processed in parallel, reduced in order.
            let group_size = b.div_ceil(GRAD_GROUPS);
            let results: Vec<(f64, usize, usize)> = group_grads
                .par_iter_mut()
                .enumerate()
                .map(|(g, buf)| {
                    let lo = (g * group_size).min(b);
                    let hi = ((g + 1) * group_size).min(b);
                    if lo >= hi {
                        for v in buf.iter_mut() {
                            *v = 0.0;
                        }
                        return (0.0f64, 0usize, 0usize);
                    }
                    let ids = &batch_ids[lo..hi];
                    let (loss, correct) = model
                        .loss_and_gradients(
                            &batch[lo * input_len..hi * input_len],
                            hi - lo,
                            &labels[lo..hi],
                            true,
                            cfg.dropout,
                            |i| {
                                CounterRng::from_parts(
                                    cfg.seed,
                                    &[0xd0, epoch as u64, ids[i] as u64],
                                )
                            },
                            buf,
                        )
                        .expect("batch shapes are internally consistent");
                    (loss, correct, hi - lo)
                })
                .collect();
            for g in grads.iter_mut() {
                *g = 0.0;
            }
            let mut batch_loss = 0.0f64;
            for (gi, (loss, correct, count)) in results.iter().enumerate() {
                if *count == 0 {
                    continue;
                }
                let weight = *count as f32 / b as f32;
                for (acc, gv) in grads.iter_mut().zip(group_grads[gi].iter()) {
                    *acc += gv * weight;
                }
                batch_loss += *loss * *count as f64 / b as f64;
                epoch_correct += correct;
            }
            epoch_loss += batch_loss * b as f64;
            t += 1;
            adam_step(&mut model.params, &grads, &mut m_buf, &mut v_buf, t, cfg);
        }
        let stats = EpochStats {
            loss: epoch_loss / examples.len() as f64,
            accuracy: epoch_correct as f64 / examples.len() as f64,
        };
        history.push(stats);
        if let Some(target) = cfg.target_accuracy {
            if stats.accuracy >= target {
                break;
            }
        }
    }
    Ok((model, history))
}
