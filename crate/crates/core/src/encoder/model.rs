//! Post-layer-norm transformer encoder with an explicit backward pass.

use ndarray::{s, Array1, Array2, ArrayViewD, ArrayViewMutD, Axis};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::vocab::TokenSequence;
use super::EncoderError;

const LAYER_NORM_EPS: f64 = 1e-12;
const INIT_STD: f64 = 0.02;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EncoderConfig {
    pub hidden_size: usize,
    pub layers: usize,
    pub heads: usize,
    pub ff_size: usize,
    pub max_len: usize,
    pub vocab_cap: usize,
    pub dropout: f64,
    pub seed: u64,
}

impl Default for EncoderConfig {
    fn default() -> Self {
        EncoderConfig {
            hidden_size: 64,
            layers: 2,
            heads: 2,
            ff_size: 256,
            max_len: 128,
            vocab_cap: 8000,
            dropout: 0.1,
            seed: 0,
        }
    }
}

impl EncoderConfig {
    pub fn validate(&self) -> Result<(), EncoderError> {
        let bad = |m: String| Err(EncoderError::InvalidConfig(m));
        if self.hidden_size == 0 || self.layers == 0 || self.heads == 0 || self.ff_size == 0 {
            return bad("all sizes must be positive".into());
        }
        if !self.hidden_size.is_multiple_of(self.heads) {
            return bad(format!(
                "hidden size {} is not divisible by {} heads",
                self.hidden_size, self.heads
            ));
        }
        if self.max_len < 2 {
            return bad("max_len must be at least 2".into());
        }
        if !(0.0..1.0).contains(&self.dropout) {
            return bad(format!("dropout {} outside [0, 1)", self.dropout));
        }
        Ok(())
    }

    pub fn head_dim(&self) -> usize {
        self.hidden_size / self.heads
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dense {
    pub weight: Array2<f64>,
    pub bias: Array1<f64>,
}

impl Dense {
    fn init(inputs: usize, outputs: usize, rng: &mut ChaCha8Rng) -> Self {
        Dense {
            weight: truncated_normal(inputs, outputs, rng),
            bias: Array1::zeros(outputs),
        }
    }

    fn zeros_like(&self) -> Self {
        Dense {
            weight: Array2::zeros(self.weight.raw_dim()),
            bias: Array1::zeros(self.bias.raw_dim()),
        }
    }

    fn forward(&self, x: &Array2<f64>) -> Array2<f64> {
        x.dot(&self.weight) + &self.bias
    }

    /// Accumulates parameter gradients into `grad`; returns d/dx.
    fn backward(&self, x: &Array2<f64>, dy: &Array2<f64>, grad: &mut Dense) -> Array2<f64> {
        grad.weight += &x.t().dot(dy);
        grad.bias += &dy.sum_axis(Axis(0));
        dy.dot(&self.weight.t())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LayerNorm {
    pub gain: Array1<f64>,
    pub bias: Array1<f64>,
}

struct LayerNormCache {
    normalized: Array2<f64>,
    inv_std: Array1<f64>,
}

impl LayerNorm {
    fn new(size: usize) -> Self {
        LayerNorm {
            gain: Array1::ones(size),
            bias: Array1::zeros(size),
        }
    }

    fn zeros_like(&self) -> Self {
        LayerNorm {
            gain: Array1::zeros(self.gain.raw_dim()),
            bias: Array1::zeros(self.bias.raw_dim()),
        }
    }

    fn forward(&self, x: &Array2<f64>) -> (Array2<f64>, LayerNormCache) {
        let h = x.ncols() as f64;
        let mean = x.sum_axis(Axis(1)) / h;
        let centered = x - &mean.view().insert_axis(Axis(1));
        let var = centered.mapv(|v| v * v).sum_axis(Axis(1)) / h;
        let inv_std = var.mapv(|v| 1.0 / (v + LAYER_NORM_EPS).sqrt());
        let normalized = centered * inv_std.view().insert_axis(Axis(1));
        let y = &normalized * &self.gain + &self.bias;
        (y, LayerNormCache { normalized, inv_std })
    }

    fn backward(&self, cache: &LayerNormCache, dy: &Array2<f64>, grad: &mut LayerNorm) -> Array2<f64> {
        let h = dy.ncols() as f64;
        grad.gain += &(dy * &cache.normalized).sum_axis(Axis(0));
        grad.bias += &dy.sum_axis(Axis(0));
        let dxhat = dy * &self.gain;
        let mean_d = (dxhat.sum_axis(Axis(1)) / h).insert_axis(Axis(1));
        let mean_dx = ((&dxhat * &cache.normalized).sum_axis(Axis(1)) / h).insert_axis(Axis(1));
        let dx = dxhat - &mean_d - &(&cache.normalized * &mean_dx);
        dx * cache.inv_std.view().insert_axis(Axis(1))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EncoderLayer {
    pub query: Dense,
    pub key: Dense,
    pub value: Dense,
    pub attn_out: Dense,
    pub attn_norm: LayerNorm,
    pub ff_in: Dense,
    pub ff_out: Dense,
    pub ff_norm: LayerNorm,
}

impl EncoderLayer {
    fn zeros_like(&self) -> Self {
        EncoderLayer {
            query: self.query.zeros_like(),
            key: self.key.zeros_like(),
            value: self.value.zeros_like(),
            attn_out: self.attn_out.zeros_like(),
            attn_norm: self.attn_norm.zeros_like(),
            ff_in: self.ff_in.zeros_like(),
            ff_out: self.ff_out.zeros_like(),
            ff_norm: self.ff_norm.zeros_like(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EncoderModel {
    pub config: EncoderConfig,
    pub token_embeddings: Array2<f64>,
    pub position_embeddings: Array2<f64>,
    pub layers: Vec<EncoderLayer>,
}

/// CLS hidden state (or a concatenation of several).
#[derive(Debug, Clone, PartialEq)]
pub struct SentenceVector(pub Array1<f64>);

impl SentenceVector {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        self.0.as_slice().expect("contiguous vector")
    }
}

fn truncated_normal(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> Array2<f64> {
    let normal = Normal::new(0.0, INIT_STD).expect("valid std");
    Array2::from_shape_simple_fn((rows, cols), || loop {
        let v: f64 = normal.sample(rng);
        if v.abs() <= 2.0 * INIT_STD {
            break v;
        }
    })
}

fn gelu(x: f64) -> f64 {
    const C: f64 = 0.797_884_560_802_865_4; // sqrt(2/pi)
    0.5 * x * (1.0 + (C * (x + 0.044715 * x * x * x)).tanh())
}

fn gelu_grad(x: f64) -> f64 {
    const C: f64 = 0.797_884_560_802_865_4;
    let t = (C * (x + 0.044715 * x * x * x)).tanh();
    0.5 * (1.0 + t) + 0.5 * x * (1.0 - t * t) * C * (1.0 + 3.0 * 0.044715 * x * x)
}

/// Intermediate values of one layer kept for the backward pass.
pub struct LayerTrace {
    input: Array2<f64>,
    q: Array2<f64>,
    k: Array2<f64>,
    v: Array2<f64>,
    /// Per head, `[query, key]` attention weights.
    pub attention: Vec<Array2<f64>>,
    context: Array2<f64>,
    attn_dropout: Option<Array2<f64>>,
    attn_norm_in: LayerNormCache,
    hidden: Array2<f64>,
    ff_pre: Array2<f64>,
    ff_act: Array2<f64>,
    ff_dropout: Option<Array2<f64>>,
    ff_norm_in: LayerNormCache,
    pub output: Array2<f64>,
}

/// Forward pass over a set of active positions.
pub struct ForwardTrace {
    ids: Vec<usize>,
    positions: Vec<usize>,
    pub layers: Vec<LayerTrace>,
}

impl ForwardTrace {
    pub fn output(&self) -> &Array2<f64> {
        &self.layers.last().expect("at least one layer").output
    }

    /// Hidden state of the first active position.
    pub fn cls(&self) -> SentenceVector {
        SentenceVector(self.output().row(0).to_owned())
    }
}

fn dropout_mask(rows: usize, cols: usize, rate: f64, rng: &mut ChaCha8Rng) -> Array2<f64> {
    let keep = 1.0 / (1.0 - rate);
    Array2::from_shape_simple_fn((rows, cols), || {
        if rng.gen::<f64>() < rate {
            0.0
        } else {
            keep
        }
    })
}

impl EncoderModel {
    /// Truncated-normal weights, zero biases, unit layer-norm gains, all drawn
    /// from `config.seed`.
    pub fn new(config: EncoderConfig, vocab_size: usize) -> Result<Self, EncoderError> {
        config.validate()?;
        if vocab_size == 0 {
            return Err(EncoderError::InvalidConfig("vocabulary is empty".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let h = config.hidden_size;
        let token_embeddings = truncated_normal(vocab_size, h, &mut rng);
        let position_embeddings = truncated_normal(config.max_len, h, &mut rng);
        let layers = (0..config.layers)
            .map(|_| EncoderLayer {
                query: Dense::init(h, h, &mut rng),
                key: Dense::init(h, h, &mut rng),
                value: Dense::init(h, h, &mut rng),
                attn_out: Dense::init(h, h, &mut rng),
                attn_norm: LayerNorm::new(h),
                ff_in: Dense::init(h, config.ff_size, &mut rng),
                ff_out: Dense::init(config.ff_size, h, &mut rng),
                ff_norm: LayerNorm::new(h),
            })
            .collect();
        Ok(EncoderModel {
            config,
            token_embeddings,
            position_embeddings,
            layers,
        })
    }

    pub fn vocab_size(&self) -> usize {
        self.token_embeddings.nrows()
    }

    pub fn hidden_size(&self) -> usize {
        self.config.hidden_size
    }

    /// Same shapes, all zeros. Used as a gradient accumulator.
    pub fn zeros_like(&self) -> Self {
        EncoderModel {
            config: self.config.clone(),
            token_embeddings: Array2::zeros(self.token_embeddings.raw_dim()),
            position_embeddings: Array2::zeros(self.position_embeddings.raw_dim()),
            layers: self.layers.iter().map(EncoderLayer::zeros_like).collect(),
        }
    }

    /// Every parameter tensor with a stable name, in a fixed order.
    pub fn named_tensors(&self) -> Vec<(String, ArrayViewD<'_, f64>)> {
        let mut out = vec![
            ("token_embeddings".to_string(), self.token_embeddings.view().into_dyn()),
            ("position_embeddings".to_string(), self.position_embeddings.view().into_dyn()),
        ];
        for (i, l) in self.layers.iter().enumerate() {
            let dense = [
                ("query", &l.query),
                ("key", &l.key),
                ("value", &l.value),
                ("attn_out", &l.attn_out),
                ("ff_in", &l.ff_in),
                ("ff_out", &l.ff_out),
            ];
            for (name, d) in dense {
                out.push((format!("layer{i}.{name}.weight"), d.weight.view().into_dyn()));
                out.push((format!("layer{i}.{name}.bias"), d.bias.view().into_dyn()));
            }
            for (name, n) in [("attn_norm", &l.attn_norm), ("ff_norm", &l.ff_norm)] {
                out.push((format!("layer{i}.{name}.gain"), n.gain.view().into_dyn()));
                out.push((format!("layer{i}.{name}.bias"), n.bias.view().into_dyn()));
            }
        }
        out
    }

    /// Mutable views in the same order as [`named_tensors`](Self::named_tensors).
    pub fn tensors_mut(&mut self) -> Vec<ArrayViewMutD<'_, f64>> {
        let mut out = vec![
            self.token_embeddings.view_mut().into_dyn(),
            self.position_embeddings.view_mut().into_dyn(),
        ];
        for l in &mut self.layers {
            for d in [
                &mut l.query,
                &mut l.key,
                &mut l.value,
                &mut l.attn_out,
                &mut l.ff_in,
                &mut l.ff_out,
            ] {
                out.push(d.weight.view_mut().into_dyn());
                out.push(d.bias.view_mut().into_dyn());
            }
            for n in [&mut l.attn_norm, &mut l.ff_norm] {
                out.push(n.gain.view_mut().into_dyn());
                out.push(n.bias.view_mut().into_dyn());
            }
        }
        out
    }

    pub fn parameter_count(&self) -> usize {
        self.named_tensors().iter().map(|(_, t)| t.len()).sum()
    }

    pub fn is_finite(&self) -> bool {
        self.named_tensors()
            .iter()
            .all(|(_, t)| t.iter().all(|v| v.is_finite()))
    }

    fn check_sequence(&self, seq: &TokenSequence) -> Result<(), EncoderError> {
        if seq.ids.len() != self.config.max_len || seq.mask.len() != self.config.max_len {
            return Err(EncoderError::LengthMismatch {
                expected: self.config.max_len,
                found: seq.ids.len(),
            });
        }
        if let Some(&id) = seq.ids.iter().find(|&&id| id >= self.vocab_size()) {
            return Err(EncoderError::IdOutOfRange {
                id,
                vocab_size: self.vocab_size(),
            });
        }
        if seq.mask.first() != Some(&1) {
            return Err(EncoderError::InvalidConfig(
                "first position must be a real token".into(),
            ));
        }
        Ok(())
    }

    /// Forward pass over the unmasked positions only. Masked positions can
    /// never influence real ones, so the result equals the full padded pass.
    /// With `dropout` set, dropout is applied after each sublayer.
    pub fn forward_trace(
        &self,
        seq: &TokenSequence,
        dropout: Option<&mut ChaCha8Rng>,
    ) -> Result<ForwardTrace, EncoderError> {
        self.check_sequence(seq)?;
        let positions: Vec<usize> = (0..seq.len()).filter(|&i| seq.mask[i] == 1).collect();
        let ids: Vec<usize> = positions.iter().map(|&i| seq.ids[i]).collect();
        let key_mask = vec![true; ids.len()];
        Ok(self.forward_positions(ids, positions, &key_mask, dropout))
    }

    /// Forward pass over every position including padding, with padded keys
    /// masked out. Exposes full `max_len × h` layer outputs and attention maps.
    pub fn forward_padded(&self, seq: &TokenSequence) -> Result<ForwardTrace, EncoderError> {
        self.check_sequence(seq)?;
        let key_mask: Vec<bool> = seq.mask.iter().map(|&m| m == 1).collect();
        Ok(self.forward_positions(seq.ids.clone(), (0..seq.len()).collect(), &key_mask, None))
    }

    fn forward_positions(
        &self,
        ids: Vec<usize>,
        positions: Vec<usize>,
        key_mask: &[bool],
        mut dropout: Option<&mut ChaCha8Rng>,
    ) -> ForwardTrace {
        let h = self.config.hidden_size;
        let heads = self.config.heads;
        let dk = self.config.head_dim();
        let scale = 1.0 / (dk as f64).sqrt();
        let rate = self.config.dropout;
        let t = ids.len();

        let mut x = Array2::zeros((t, h));
        for (row, (&id, &pos)) in ids.iter().zip(&positions).enumerate() {
            let mut r = x.row_mut(row);
            r += &self.token_embeddings.row(id);
            r += &self.position_embeddings.row(pos);
        }

        let mut layers = Vec::with_capacity(self.layers.len());
        for layer in &self.layers {
            let q = layer.query.forward(&x);
            let k = layer.key.forward(&x);
            let v = layer.value.forward(&x);
            let mut context = Array2::zeros((t, h));
            let mut attention = Vec::with_capacity(heads);
            for a in 0..heads {
                let cols = s![.., a * dk..(a + 1) * dk];
                let scores = q.slice(cols).dot(&k.slice(cols).t()) * scale;
                let weights = masked_softmax(&scores, key_mask);
                context.slice_mut(cols).assign(&weights.dot(&v.slice(cols)));
                attention.push(weights);
            }
            let mut attn = layer.attn_out.forward(&context);
            let attn_dropout = match dropout.as_deref_mut() {
                Some(rng) if rate > 0.0 => {
                    let m = dropout_mask(t, h, rate, rng);
                    attn *= &m;
                    Some(m)
                }
                _ => None,
            };
            let (hidden, attn_norm_in) = layer.attn_norm.forward(&(&x + &attn));
            let ff_pre = layer.ff_in.forward(&hidden);
            let ff_act = ff_pre.mapv(gelu);
            let mut ff = layer.ff_out.forward(&ff_act);
            let ff_dropout = match dropout.as_deref_mut() {
                Some(rng) if rate > 0.0 => {
                    let m = dropout_mask(t, h, rate, rng);
                    ff *= &m;
                    Some(m)
                }
                _ => None,
            };
            let (output, ff_norm_in) = layer.ff_norm.forward(&(&hidden + &ff));
            layers.push(LayerTrace {
                input: x,
                q,
                k,
                v,
                attention,
                context,
                attn_dropout,
                attn_norm_in,
                hidden,
                ff_pre,
                ff_act,
                ff_dropout,
                ff_norm_in,
                output: output.clone(),
            });
            x = output;
        }
        ForwardTrace {
            ids,
            positions,
            layers,
        }
    }

    /// Backpropagates a gradient on the CLS vector through the whole encoder,
    /// accumulating into `grads`.
    pub fn backward(&self, trace: &ForwardTrace, d_cls: &Array1<f64>, grads: &mut EncoderModel) {
        let h = self.config.hidden_size;
        let dk = self.config.head_dim();
        let scale = 1.0 / (dk as f64).sqrt();
        let t = trace.ids.len();

        let mut dx = Array2::zeros((t, h));
        dx.row_mut(0).assign(d_cls);
        for ((layer, lt), g) in self
            .layers
            .iter()
            .zip(&trace.layers)
            .zip(grads.layers.iter_mut())
            .rev()
        {
            // feed-forward sublayer
            let d_res2 = layer.ff_norm.backward(&lt.ff_norm_in, &dx, &mut g.ff_norm);
            let mut d_ff = d_res2.clone();
            if let Some(m) = &lt.ff_dropout {
                d_ff *= m;
            }
            let d_act = layer.ff_out.backward(&lt.ff_act, &d_ff, &mut g.ff_out);
            let d_pre = d_act * &lt.ff_pre.mapv(gelu_grad);
            let d_hidden = d_res2 + layer.ff_in.backward(&lt.hidden, &d_pre, &mut g.ff_in);

            // attention sublayer
            let d_res1 = layer.attn_norm.backward(&lt.attn_norm_in, &d_hidden, &mut g.attn_norm);
            let mut d_attn = d_res1.clone();
            if let Some(m) = &lt.attn_dropout {
                d_attn *= m;
            }
            let d_context = layer.attn_out.backward(&lt.context, &d_attn, &mut g.attn_out);
            let mut dq = Array2::zeros((t, h));
            let mut dkey = Array2::zeros((t, h));
            let mut dv = Array2::zeros((t, h));
            for (a, weights) in lt.attention.iter().enumerate() {
                let cols = s![.., a * dk..(a + 1) * dk];
                let dctx = d_context.slice(cols);
                dv.slice_mut(cols).assign(&weights.t().dot(&dctx));
                let dw = dctx.dot(&lt.v.slice(cols).t());
                let row_dot = (&dw * weights).sum_axis(Axis(1)).insert_axis(Axis(1));
                let dscores = (weights * &(dw - &row_dot)) * scale;
                dq.slice_mut(cols).assign(&dscores.dot(&lt.k.slice(cols)));
                dkey.slice_mut(cols).assign(&dscores.t().dot(&lt.q.slice(cols)));
            }
            dx = d_res1
                + layer.query.backward(&lt.input, &dq, &mut g.query)
                + layer.key.backward(&lt.input, &dkey, &mut g.key)
                + layer.value.backward(&lt.input, &dv, &mut g.value);
        }
        for (row, (&id, &pos)) in trace.ids.iter().zip(&trace.positions).enumerate() {
            let d = dx.row(row);
            let mut te = grads.token_embeddings.row_mut(id);
            te += &d;
            let mut pe = grads.position_embeddings.row_mut(pos);
            pe += &d;
        }
    }

    /// CLS sentence vector, inference mode.
    pub fn encode(&self, seq: &TokenSequence) -> Result<SentenceVector, EncoderError> {
        Ok(self.forward_trace(seq, None)?.cls())
    }

    /// Per layer, per head attention weights over the padded sequence.
    pub fn attention_weights(&self, seq: &TokenSequence) -> Result<Vec<Vec<Array2<f64>>>, EncoderError> {
        Ok(self
            .forward_padded(seq)?
            .layers
            .into_iter()
            .map(|l| l.attention)
            .collect())
    }
}

/// Row-wise softmax over the allowed keys; disallowed keys get exactly zero.
fn masked_softmax(scores: &Array2<f64>, key_mask: &[bool]) -> Array2<f64> {
    let mut out = Array2::zeros(scores.raw_dim());
    for (row, mut out_row) in scores.rows().into_iter().zip(out.rows_mut()) {
        let max = row
            .iter()
            .zip(key_mask)
            .filter(|(_, &m)| m)
            .map(|(&v, _)| v)
            .fold(f64::NEG_INFINITY, f64::max);
        let mut sum = 0.0;
        for ((o, &v), &m) in out_row.iter_mut().zip(row).zip(key_mask) {
            if m {
                *o = (v - max).exp();
                sum += *o;
            }
        }
        out_row /= sum;
    }
    out
}

/// Concatenation of the CLS vectors of two encoders sharing one tokenizer.
pub fn dual_encode(
    model_a: &EncoderModel,
    model_b: &EncoderModel,
    seq: &TokenSequence,
) -> Result<SentenceVector, EncoderError> {
    if model_a.config.max_len != model_b.config.max_len
        || model_a.vocab_size() != model_b.vocab_size()
    {
        return Err(EncoderError::ConfigMismatch);
    }
    let a = model_a.encode(seq)?;
    let b = model_b.encode(seq)?;
    Ok(SentenceVector(ndarray::concatenate![Axis(0), a.0, b.0]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encoder::vocab::{CLS_ID, PAD_ID, SEP_ID};

    fn tiny(seed: u64) -> EncoderModel {
        let config = EncoderConfig {
            hidden_size: 16,
            layers: 2,
            heads: 2,
            ff_size: 32,
            max_len: 12,
            seed,
            ..Default::default()
        };
        EncoderModel::new(config, 20).unwrap()
    }

    fn seq(tokens: &[usize], max_len: usize) -> TokenSequence {
        let mut ids = vec![CLS_ID];
        ids.extend_from_slice(tokens);
        ids.push(SEP_ID);
        let real = ids.len();
        ids.resize(max_len, PAD_ID);
        let mut mask = vec![1; real];
        mask.resize(max_len, 0);
        TokenSequence { ids, mask }
    }

    #[test]
    fn config_validation() {
        let bad = EncoderConfig {
            hidden_size: 10,
            heads: 3,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
        assert!(EncoderConfig::default().validate().is_ok());
    }

    #[test]
    fn output_has_hidden_size() {
        let m = tiny(1);
        assert_eq!(m.encode(&seq(&[5, 6, 7], 12)).unwrap().len(), 16);
    }

    #[test]
    fn padding_amount_does_not_change_cls() {
        let short = tiny(3);
        let mut long_cfg = short.config.clone();
        long_cfg.max_len = 20;
        let mut long = EncoderModel::new(long_cfg, 20).unwrap();
        // share every parameter; only the number of positional rows differs
        long.token_embeddings = short.token_embeddings.clone();
        long.layers = short.layers.clone();
        long.position_embeddings
            .slice_mut(s![..12, ..])
            .assign(&short.position_embeddings);
        let a = short.encode(&seq(&[5, 9, 11], 12)).unwrap();
        let b = long.encode(&seq(&[5, 9, 11], 20)).unwrap();
        for (x, y) in a.0.iter().zip(b.0.iter()) {
            assert!((x - y).abs() < 1e-6);
        }
        let padded = short.forward_padded(&seq(&[5, 9, 11], 12)).unwrap().cls();
        for (x, y) in a.0.iter().zip(padded.0.iter()) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn attention_rows_normalized_and_pad_ignored() {
        let m = tiny(4);
        let s = seq(&[5, 6], 12);
        for layer in m.attention_weights(&s).unwrap() {
            for head in layer {
                for row in head.rows() {
                    let real: f64 = row.iter().take(4).sum();
                    assert!((real - 1.0).abs() < 1e-6);
                    assert!(row.iter().skip(4).all(|&w| w.abs() < 1e-9));
                }
            }
        }
    }

    #[test]
    fn padded_layer_outputs_have_full_shape() {
        let m = tiny(5);
        let trace = m.forward_padded(&seq(&[5], 12)).unwrap();
        for l in &trace.layers {
            assert_eq!(l.output.dim(), (12, 16));
        }
    }

    #[test]
    fn deterministic_init_and_forward() {
        assert_eq!(tiny(9), tiny(9));
        assert_ne!(tiny(9), tiny(10));
        let s = seq(&[7, 8], 12);
        assert_eq!(tiny(9).encode(&s).unwrap(), tiny(9).encode(&s).unwrap());
    }

    #[test]
    fn init_is_truncated() {
        let m = tiny(2);
        assert!(m.token_embeddings.iter().all(|v| v.abs() <= 0.04));
        assert!(m.layers[0].attn_norm.gain.iter().all(|&g| g == 1.0));
        assert!(m.layers[0].query.bias.iter().all(|&b| b == 0.0));
    }

    #[test]
    fn rejects_bad_sequences() {
        let m = tiny(1);
        assert!(matches!(
            m.encode(&seq(&[25], 12)),
            Err(EncoderError::IdOutOfRange { id: 25, .. })
        ));
        assert!(matches!(
            m.encode(&seq(&[5], 10)),
            Err(EncoderError::LengthMismatch { .. })
        ));
    }

    #[test]
    fn dual_concatenates() {
        let (a, b) = (tiny(1), tiny(2));
        let s = seq(&[5, 6, 7], 12);
        let ab = dual_encode(&a, &b, &s).unwrap();
        assert_eq!(ab.len(), 32);
        let aa = dual_encode(&a, &a, &s).unwrap();
        assert_eq!(aa.0.slice(s![..16]), aa.0.slice(s![16..]));
        let ba = dual_encode(&b, &a, &s).unwrap();
        assert_eq!(ab.0.slice(s![..16]), ba.0.slice(s![16..]));
        assert!((ab.0.dot(&ab.0) - ba.0.dot(&ba.0)).abs() < 1e-12);
        let mut other = a.config.clone();
        other.max_len = 14;
        let c = EncoderModel::new(other, 20).unwrap();
        assert!(matches!(dual_encode(&a, &c, &s), Err(EncoderError::ConfigMismatch)));
    }

    #[test]
    fn gelu_derivative_matches_difference() {
        for &x in &[-3.0, -0.5, 0.0, 0.7, 2.5] {
            let fd = (gelu(x + 1e-6) - gelu(x - 1e-6)) / 2e-6;
            assert!((fd - gelu_grad(x)).abs() < 1e-8);
        }
    }
}
