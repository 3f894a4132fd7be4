use super::nn::{
    col2im, cross_entropy, dropout_backward, dropout_forward, im2col, matmul, matmul_nt,
    matmul_tn, maxpool_backward, maxpool_forward, relu_backward, relu_forward, softmax, Real,
    Tensor, KERNEL,
};
use super::raster::{ImagePair, IMG_PIXELS};
use super::{Label, SurrogateError};
use crate::rng::CounterRng;
use std::io::{Read, Write};
use std::path::Path;

/// Network architecture: conv stages (each 4x4 kernel, ReLU, 2x2 max-pool)
/// followed by fully connected stages with ReLU + dropout and a final linear
/// classifier. Parametrized so gradient checks can run on tiny variants.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CnnArch {
    /// Input (channels, height, width).
    pub input: (usize, usize, usize),
    /// Conv stages as (in_channels, out_channels).
    pub convs: Vec<(usize, usize)>,
    /// Hidden FC stages as (in, out).
    pub fcs: Vec<(usize, usize)>,
    /// Final linear layer (in, classes).
    pub output: (usize, usize),
}

impl Default for CnnArch {
    fn default() -> Self {
        // 2x64x64 -> 16x32x32 -> 32x16x16 -> 64x8x8 -> 128x4x4 -> 2048
        // -> 512 -> 128 -> 32 -> 2.
        Self {
            input: (2, 64, 64),
            convs: vec![(2, 16), (16, 32), (32, 64), (64, 128)],
            fcs: vec![(2048, 512), (512, 128), (128, 32)],
            output: (32, 2),
        }
    }
}

impl CnnArch {
    /// Spatial size after each conv+pool stage; also validates consistency.
    pub fn validate(&self) -> Result<(), SurrogateError> {
        let (mut c, mut h, mut w) = self.input;
        for &(cin, cout) in &self.convs {
            if cin != c {
                return Err(SurrogateError::ShapeMismatch(format!(
                    "conv expects {cin} channels, pipeline has {c}"
                )));
            }
            if h % 2 != 0 || w % 2 != 0 {
                return Err(SurrogateError::ShapeMismatch(
                    "spatial size must stay divisible by 2 for pooling".into(),
                ));
            }
            c = cout;
            h /= 2;
            w /= 2;
        }
        let flat = c * h * w;
        let mut width = flat;
        for &(fin, fout) in &self.fcs {
            if fin != width {
                return Err(SurrogateError::ShapeMismatch(format!(
                    "fc expects {fin}, pipeline has {width}"
                )));
            }
            width = fout;
        }
        if self.output.0 != width {
            return Err(SurrogateError::ShapeMismatch(format!(
                "output expects {}, pipeline has {width}",
                self.output.0
            )));
        }
        Ok(())
    }

    pub fn param_count(&self) -> usize {
        let mut n = 0;
        for &(cin, cout) in &self.convs {
            n += cout * cin * KERNEL * KERNEL + cout;
        }
        for &(fin, fout) in &self.fcs {
            n += fout * fin + fout;
        }
        n += self.output.1 * self.output.0 + self.output.1;
        n
    }

    pub fn classes(&self) -> usize {
        self.output.1
    }
}

/// The classifier: an architecture plus one flat parameter vector (conv
/// kernels, then FC weights, then the output layer; weights before biases
/// within each stage). Metadata records which assemblies trained it.
#[derive(Clone, Debug)]
pub struct CnnModel<T: Real = f32> {
    pub arch: CnnArch,
    pub params: Vec<T>,
    /// Names of the assemblies whose records were in the training set.
    pub trained_on: Vec<String>,
}

/// Classifier output: the label and the softmax probability of `High`.
#[derive(Clone, Copy, Debug)]
pub struct Prediction {
    pub label: Label,
    pub confidence: f64,
}

impl<T: Real> CnnModel<T> {
    /// Zero-initialized model (useful for tests; real training starts from
    /// `init_kaiming`).
    pub fn zeroed(arch: CnnArch) -> Result<Self, SurrogateError> {
        arch.validate()?;
        let n = arch.param_count();
        Ok(Self {
            arch,
            params: vec![T::zero(); n],
            trained_on: Vec::new(),
        })
    }

    /// Kaiming-uniform fan-in initialization, zero biases, seeded.
    pub fn init_kaiming(arch: CnnArch, seed: u64) -> Result<Self, SurrogateError> {
        let mut model = Self::zeroed(arch)?;
        let mut rng = CounterRng::from_parts(seed, &[0x1217]);
        let mut off = 0;
        let arch = model.arch.clone();
        for &(cin, cout) in &arch.convs {
            let fan_in = cin * KERNEL * KERNEL;
            let bound = (6.0 / fan_in as f64).sqrt();
            for _ in 0..cout * fan_in {
                model.params[off] = T::from_f64(rng.uniform(-bound, bound));
                off += 1;
            }
            off += cout; // biases stay zero
        }
        for &(fin, fout) in arch.fcs.iter().chain(std::iter::once(&arch.output)) {
            let bound = (6.0 / fin as f64).sqrt();
            for _ in 0..fout * fin {
                model.params[off] = T::from_f64(rng.uniform(-bound, bound));
                off += 1;
            }
            off += fout;
        }
        debug_assert_eq!(off, model.params.len());
        Ok(model)
    }

    fn input_len(&self) -> usize {
        let (c, h, w) = self.arch.input;
        c * h * w
    }

    /// Forward pass for a batch laid out `[b, c, h, w]`. Dropout is active
    /// only in training mode, consuming the RNG stream. Returns logits
    /// `[b, classes]`.
    pub fn forward_batch(
        &self,
        batch: &[T],
        b: usize,
        training: bool,
        dropout_p: f64,
        rng: &mut CounterRng,
    ) -> Result<Vec<T>, SurrogateError> {
        let n = self.input_len();
        if batch.len() != b * n {
            return Err(SurrogateError::ShapeMismatch(format!(
                "batch of {b} inputs wants {} values, got {}",
                b * n,
                batch.len()
            )));
        }
        let classes = self.arch.classes();
        let mut logits = vec![T::zero(); b * classes];
        let mut ws = Workspace::default();
        for i in 0..b {
            let acts = self.forward_one(&batch[i * n..(i + 1) * n], training, dropout_p, rng, &mut ws);
            logits[i * classes..(i + 1) * classes].copy_from_slice(&acts.logits);
        }
        Ok(logits)
    }

    /// Tensor-typed wrapper used by the public API and tests.
    pub fn forward(
        &self,
        batch: &Tensor,
        training: bool,
        dropout_p: f64,
        rng: &mut CounterRng,
    ) -> Result<Tensor, SurrogateError>
    where
        T: Real,
    {
        let (c, h, w) = self.arch.input;
        let shape = batch.shape();
        if shape.len() != 4 || shape[1] != c || shape[2] != h || shape[3] != w {
            return Err(SurrogateError::ShapeMismatch(format!(
                "expected [b, {c}, {h}, {w}], got {shape:?}"
            )));
        }
        let b = shape[0];
        let data: Vec<T> = batch.data().iter().map(|&v| T::from_f64(v as f64)).collect();
        let logits = self.forward_batch(&data, b, training, dropout_p, rng)?;
        Tensor::new(
            vec![b, self.arch.classes()],
            logits.iter().map(|v| v.to_f64_() as f32).collect(),
        )
    }

    /// Full forward pass for one sample, keeping every intermediate needed
    /// by the backward pass.
    fn forward_one(
        &self,
        input: &[T],
        training: bool,
        dropout_p: f64,
        rng: &mut CounterRng,
        ws: &mut Workspace<T>,
    ) -> Activations<T> {
        let mut off = 0;
        let (mut c, mut h, mut w) = self.arch.input;
        let mut cur = input.to_vec();
        let mut conv_inputs = Vec::with_capacity(self.arch.convs.len());
        let mut conv_pre_pool = Vec::with_capacity(self.arch.convs.len());
        let mut pool_argmax = Vec::with_capacity(self.arch.convs.len());
        for &(cin, cout) in &self.arch.convs {
            let hw = h * w;
            let krows = cin * KERNEL * KERNEL;
            ws.col.clear();
            ws.col.resize(krows * hw, T::zero());
            im2col(&cur, cin, h, w, &mut ws.col);
            let wsize = cout * krows;
            let weights = &self.params[off..off + wsize];
            let biases = &self.params[off + wsize..off + wsize + cout];
            off += wsize + cout;
            let mut out = vec![T::zero(); cout * hw];
            for ch in 0..cout {
                let bias = biases[ch];
                for v in &mut out[ch * hw..(ch + 1) * hw] {
                    *v = bias;
                }
            }
            matmul(weights, &ws.col, &mut out, cout, krows, hw);
            relu_forward(&mut out);
            conv_inputs.push(cur);
            let (oh, ow) = (h / 2, w / 2);
            let mut pooled = vec![T::zero(); cout * oh * ow];
            let mut argmax = vec![0u32; cout * oh * ow];
            maxpool_forward(&out, cout, h, w, &mut pooled, &mut argmax);
            conv_pre_pool.push(out);
            pool_argmax.push(argmax);
            cur = pooled;
            c = cout;
            h = oh;
            w = ow;
        }
        let _ = c;
        let mut fc_inputs = Vec::with_capacity(self.arch.fcs.len());
        let mut fc_masks = Vec::with_capacity(self.arch.fcs.len());
        for &(fin, fout) in &self.arch.fcs {
            let wsize = fout * fin;
            let weights = &self.params[off..off + wsize];
            let biases = &self.params[off + wsize..off + wsize + fout];
            off += wsize + fout;
            let mut out = biases.to_vec();
            matmul(weights, &cur, &mut out, fout, fin, 1);
            relu_forward(&mut out);
            let mut mask = vec![T::one(); fout];
            if training && dropout_p > 0.0 {
                dropout_forward(&mut out, dropout_p, rng, &mut mask);
            }
            fc_inputs.push(cur);
            fc_masks.push(mask);
            cur = out;
        }
        let (fin, fout) = self.arch.output;
        let wsize = fout * fin;
        let weights = &self.params[off..off + wsize];
        let biases = &self.params[off + wsize..off + wsize + fout];
        let mut logits = biases.to_vec();
        matmul(weights, &cur, &mut logits, fout, fin, 1);
        Activations {
            conv_inputs,
            conv_pre_pool,
            pool_argmax,
            fc_inputs,
            fc_masks,
            out_input: cur,
            logits,
        }
    }

    /// Mean cross-entropy and parameter gradients over a batch, single
    /// sample at a time (the caller owns batching/parallelism). The scalar
    /// loss is tallied in f64 from the (model-precision) logits so the
    /// finite-difference oracle is not drowned by accumulation round-off.
    pub fn loss_and_gradients(
        &self,
        batch: &[T],
        b: usize,
        labels: &[usize],
        training: bool,
        dropout_p: f64,
        rng_per_sample: impl Fn(usize) -> CounterRng + Sync,
        grads: &mut [T],
    ) -> Result<(f64, usize), SurrogateError> {
        let n = self.input_len();
        if batch.len() != b * n || labels.len() != b {
            return Err(SurrogateError::ShapeMismatch(
                "batch/labels size mismatch".into(),
            ));
        }
        for g in grads.iter_mut() {
            *g = T::zero();
        }
        let mut total = 0.0f64;
        let mut correct = 0usize;
        let mut ws = Workspace::default();
        let scale = T::from_f64(1.0 / b as f64);
        for i in 0..b {
            let mut rng = rng_per_sample(i);
            let acts = self.forward_one(&batch[i * n..(i + 1) * n], training, dropout_p, &mut rng, &mut ws);
            let mut dlogits = vec![T::zero(); acts.logits.len()];
            cross_entropy(&acts.logits, labels[i], &mut dlogits);
            let logits64: Vec<f64> = acts.logits.iter().map(|v| v.to_f64_()).collect();
            let mut probs64 = vec![0.0f64; logits64.len()];
            softmax(&logits64, &mut probs64);
            total += -(probs64[labels[i]] + 1e-300).ln() / b as f64;
            let pred = argmax(&acts.logits);
            if pred == labels[i] {
                correct += 1;
            }
            for d in &mut dlogits {
                *d = *d * scale;
            }
            self.backward_one(&batch[i * n..(i + 1) * n], &acts, &dlogits, grads, &mut ws);
        }
        Ok((total, correct))
    }

    fn backward_one(
        &self,
        _input: &[T],
        acts: &Activations<T>,
        dlogits: &[T],
        grads: &mut [T],
        ws: &mut Workspace<T>,
    ) {
        // Offsets of each stage in the flat parameter vector.
        let mut offsets = Vec::new();
        let mut off = 0;
        for &(cin, cout) in &self.arch.convs {
            offsets.push(off);
            off += cout * cin * KERNEL * KERNEL + cout;
        }
        for &(fin, fout) in &self.arch.fcs {
            offsets.push(off);
            off += fout * fin + fout;
        }
        let out_off = off;

        // Output layer.
        let (fin, fout) = self.arch.output;
        let weights = &self.params[out_off..out_off + fout * fin];
        {
            let (dw, db) = grads[out_off..out_off + fout * fin + fout].split_at_mut(fout * fin);
            matmul_nt(dlogits, &acts.out_input, dw, fout, 1, fin);
            for (dbv, dl) in db.iter_mut().zip(dlogits.iter()) {
                *dbv += *dl;
            }
        }
        let mut dcur = vec![T::zero(); fin];
        matmul_tn(weights, dlogits, &mut dcur, fout, fin, 1);

        // FC stages, in reverse.
        for (stage, &(fin, fout)) in self.arch.fcs.iter().enumerate().rev() {
            let mask = &acts.fc_masks[stage];
            dropout_backward(&mut dcur, mask);
            // Recompute the post-ReLU activation sign from the stored input of
            // the NEXT stage: acts.fc_inputs[stage+1] is this stage's output
            // pre-dropout; for the last fc it is `out_input` / dropout mask...
            // Instead derive from the mask-scaled stored outputs: the stored
            // next input equals activation * mask, zero exactly where ReLU or
            // dropout zeroed it. ReLU backward only needs the zero pattern of
            // the pre-dropout activation, which the next input reveals except
            // where dropout masked a positive activation. Handle that by
            // using the dropout mask: positions with mask == 0 already have
            // zero gradient after dropout_backward.
            let next_input: &[T] = if stage + 1 < self.arch.fcs.len() {
                &acts.fc_inputs[stage + 1]
            } else {
                &acts.out_input
            };
            relu_backward(&mut dcur, next_input);
            let conv_stages = self.arch.convs.len();
            let off = offsets[conv_stages + stage];
            let input = &acts.fc_inputs[stage];
            {
                let (dw, db) = grads[off..off + fout * fin + fout].split_at_mut(fout * fin);
                matmul_nt(&dcur, input, dw, fout, 1, fin);
                for (dbv, d) in db.iter_mut().zip(dcur.iter()) {
                    *dbv += *d;
                }
            }
            let weights = &self.params[off..off + fout * fin];
            let mut dprev = vec![T::zero(); fin];
            matmul_tn(weights, &dcur, &mut dprev, fout, fin, 1);
            dcur = dprev;
        }

        // Conv stages, in reverse. Track spatial dims at each stage.
        let mut dims = Vec::new();
        {
            let (_, mut h, mut w) = self.arch.input;
            for _ in &self.arch.convs {
                dims.push((h, w));
                h /= 2;
                w /= 2;
            }
        }
        for (stage, &(cin, cout)) in self.arch.convs.iter().enumerate().rev() {
            let (h, w) = dims[stage];
            let hw = h * w;
            // Through the pool: dcur is [cout, h/2, w/2].
            let mut dpre = vec![T::zero(); cout * hw];
            maxpool_backward(&dcur, &acts.pool_argmax[stage], &mut dpre);
            relu_backward(&mut dpre, &acts.conv_pre_pool[stage]);
            let krows = cin * KERNEL * KERNEL;
            ws.col.clear();
            ws.col.resize(krows * hw, T::zero());
            im2col(&acts.conv_inputs[stage], cin, h, w, &mut ws.col);
            let off = offsets[stage];
            {
                let (dw, db) = grads[off..off + cout * krows + cout].split_at_mut(cout * krows);
                matmul_nt(&dpre, &ws.col, dw, cout, hw, krows);
                for ch in 0..cout {
                    let mut acc = T::zero();
                    for v in &dpre[ch * hw..(ch + 1) * hw] {
                        acc += *v;
                    }
                    db[ch] += acc;
                }
            }
            if stage > 0 {
                let weights = &self.params[off..off + cout * krows];
                let mut dcol = vec![T::zero(); krows * hw];
                matmul_tn(weights, &dpre, &mut dcol, cout, krows, hw);
                let mut dinput = vec![T::zero(); cin * hw];
                col2im(&dcol, cin, h, w, &mut dinput);
                dcur = {
                    // Pool output dims of the previous stage equal (h, w).
                    dinput
                };
            }
        }
    }

    /// Eval-mode prediction for one image pair.
    pub fn predict(&self, img: &ImagePair) -> Prediction {
        let data: Vec<T> = img.data.iter().map(|&v| T::from_f64(v as f64)).collect();
        let mut rng = CounterRng::new(0);
        let logits = self
            .forward_batch(&data, 1, false, 0.0, &mut rng)
            .expect("image pair has the right shape");
        let mut probs = vec![T::zero(); logits.len()];
        softmax(&logits, &mut probs);
        // Ties break to NotHigh so the planner falls back to the simulator.
        let label = if logits[1] > logits[0] {
            Label::High
        } else {
            Label::NotHigh
        };
        Prediction {
            label,
            confidence: probs[1].to_f64_(),
        }
    }
}

fn argmax<T: Real>(v: &[T]) -> usize {
    let mut best = 0;
    for i in 1..v.len() {
        if v[i] > v[best] {
            best = i;
        }
    }
    best
}

/// Per-sample intermediates kept for the backward pass.
struct Activations<T: Real> {
    conv_inputs: Vec<Vec<T>>,
    conv_pre_pool: Vec<Vec<T>>,
    pool_argmax: Vec<Vec<u32>>,
    fc_inputs: Vec<Vec<T>>,
    fc_masks: Vec<Vec<T>>,
    out_input: Vec<T>,
    logits: Vec<T>,
}

struct Workspace<T: Real> {
    col: Vec<T>,
}

impl<T: Real> Default for Workspace<T> {
    fn default() -> Self {
        Self { col: Vec::new() }
    }
}

const MAGIC: &[u8; 4] = b"RAPM";
const VERSION: u32 = 1;

/// Writes the model as little-endian binary with a versioned header.
pub fn save_model(model: &CnnModel<f32>, path: &Path) -> Result<(), SurrogateError> {
    let mut buf: Vec<u8> = Vec::new();
    buf.extend_from_slice(MAGIC);
    buf.extend_from_slice(&VERSION.to_le_bytes());
    let a = &model.arch;
    for v in [a.input.0, a.input.1, a.input.2] {
        buf.extend_from_slice(&(v as u32).to_le_bytes());
    }
    buf.extend_from_slice(&(a.convs.len() as u32).to_le_bytes());
    for &(cin, cout) in &a.convs {
        buf.extend_from_slice(&(cin as u32).to_le_bytes());
        buf.extend_from_slice(&(cout as u32).to_le_bytes());
    }
    buf.extend_from_slice(&(a.fcs.len() as u32).to_le_bytes());
    for &(fin, fout) in &a.fcs {
        buf.extend_from_slice(&(fin as u32).to_le_bytes());
        buf.extend_from_slice(&(fout as u32).to_le_bytes());
    }
    buf.extend_from_slice(&(a.output.0 as u32).to_le_bytes());
    buf.extend_from_slice(&(a.output.1 as u32).to_le_bytes());
    buf.extend_from_slice(&(model.trained_on.len() as u32).to_le_bytes());
    for name in &model.trained_on {
        let bytes = name.as_bytes();
        buf.extend_from_slice(&(bytes.len() as u32).to_le_bytes());
        buf.extend_from_slice(bytes);
    }
    buf.extend_from_slice(&(model.params.len() as u64).to_le_bytes());
    for p in &model.params {
        buf.extend_from_slice(&p.to_le_bytes());
    }
    std::fs::write(path, buf)?;
    Ok(())
}

/// Reads a model back; validates magic, version, header shape, and length.
pub fn load_model(path: &Path) -> Result<CnnModel<f32>, SurrogateError> {
    let data = std::fs::read(path)?;
    let mut cur = std::io::Cursor::new(&data);
    let mut magic = [0u8; 4];
    cur.read_exact(&mut magic)
        .map_err(|_| SurrogateError::CorruptFile("truncated header".into()))?;
    if &magic != MAGIC {
        return Err(SurrogateError::VersionMismatch);
    }
    let version = read_u32(&mut cur)?;
    if version != VERSION {
        return Err(SurrogateError::VersionMismatch);
    }
    let input = (
        read_u32(&mut cur)? as usize,
        read_u32(&mut cur)? as usize,
        read_u32(&mut cur)? as usize,
    );
    let n_convs = read_u32(&mut cur)? as usize;
    if n_convs > 64 {
        return Err(SurrogateError::CorruptFile("absurd conv count".into()));
    }
    let mut convs = Vec::with_capacity(n_convs);
    for _ in 0..n_convs {
        convs.push((read_u32(&mut cur)? as usize, read_u32(&mut cur)? as usize));
    }
    let n_fcs = read_u32(&mut cur)? as usize;
    if n_fcs > 64 {
        return Err(SurrogateError::CorruptFile("absurd fc count".into()));
    }
    let mut fcs = Vec::with_capacity(n_fcs);
    for _ in 0..n_fcs {
        fcs.push((read_u32(&mut cur)? as usize, read_u32(&mut cur)? as usize));
    }
    let output = (read_u32(&mut cur)? as usize, read_u32(&mut cur)? as usize);
    let arch = CnnArch {
        input,
        convs,
        fcs,
        output,
    };
    arch.validate()
        .map_err(|e| SurrogateError::CorruptFile(format!("inconsistent layer table: {e}")))?;
    let n_names = read_u32(&mut cur)? as usize;
    if n_names > 4096 {
        return Err(SurrogateError::CorruptFile("absurd name count".into()));
    }
    let mut trained_on = Vec::with_capacity(n_names);
    for _ in 0..n_names {
        let len = read_u32(&mut cur)? as usize;
        let mut bytes = vec![0u8; len];
        cur.read_exact(&mut bytes)
            .map_err(|_| SurrogateError::CorruptFile("truncated metadata".into()))?;
        trained_on.push(
            String::from_utf8(bytes)
                .map_err(|_| SurrogateError::CorruptFile("bad metadata string".into()))?,
        );
    }
    let mut count_bytes = [0u8; 8];
    cur.read_exact(&mut count_bytes)
        .map_err(|_| SurrogateError::CorruptFile("truncated parameter count".into()))?;
    let count = u64::from_le_bytes(count_bytes) as usize;
    if count != arch.param_count() {
        return Err(SurrogateError::CorruptFile(format!(
            "parameter count {count} does not match the layer table ({})",
            arch.param_count()
        )));
    }
    let mut params = Vec::with_capacity(count);
    let mut f = [0u8; 4];
    for _ in 0..count {
        cur.read_exact(&mut f)
            .map_err(|_| SurrogateError::CorruptFile("truncated parameters".into()))?;
        params.push(f32::from_le_bytes(f));
    }
    if cur.position() != data.len() as u64 {
        return Err(SurrogateError::CorruptFile("trailing bytes".into()));
    }
    Ok(CnnModel {
        arch,
        params,
        trained_on,
    })
}

fn read_u32(cur: &mut std::io::Cursor<&Vec<u8>>) -> Result<u32, SurrogateError> {
    let mut b = [0u8; 4];
    cur.read_exact(&mut b)
        .map_err(|_| SurrogateError::CorruptFile("truncated field".into()))?;
    Ok(u32::from_le_bytes(b))
}

/// Writes raw bytes (test helper for corrupt-file paths).
#[doc(hidden)]
pub fn write_raw(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let mut f = std::fs::File::create(path)?;
    f.write_all(bytes)
}
