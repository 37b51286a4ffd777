//! Supervised fine-tuning of encoders with a linear classification head.
//!
//! A [`Classifier`] is one or more encoders whose CLS vectors are
//! concatenated and fed to a two-way linear head. One encoder is the
//! single-encoder path; two is the dual-encoder path.

use ndarray::{s, Array1, Array2, ArrayViewD, ArrayViewMutD, Axis};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{Corpus, Label, Language};
use crate::encoder::{
    tokenize_encode, Checkpoint, EncoderError, EncoderModel, NamedTensor, SentenceVector,
    TokenSequence, Vocabulary,
};

/// Any batch with a mean loss above this is treated as divergence.
pub const DIVERGENCE_LOSS: f64 = 1e3;

#[derive(Debug, Error)]
pub enum TrainError {
    #[error("corpus is empty")]
    EmptyCorpus,
    #[error("invalid training config: {0}")]
    InvalidConfig(String),
    #[error("non-finite logits")]
    NonFiniteLogits,
    #[error("parameter/gradient shapes disagree: {0}")]
    ShapeMismatch(String),
    #[error("training diverged at epoch {epoch}, batch {batch}: loss {loss}")]
    Diverged { epoch: usize, batch: usize, loss: f64 },
    #[error(transparent)]
    Encoder(#[from] EncoderError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub seed: u64,
    pub language: Language,
    /// Train only the head; encoder parameters stay untouched.
    pub freeze_encoders: bool,
    /// Dual-encoder training updates both encoders along with the head.
    pub dual_joint: bool,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig::for_language(Language::En)
    }
}

impl TrainConfig {
    /// Per-language batch size and learning rate, four epochs.
    pub fn for_language(language: Language) -> Self {
        let (batch_size, learning_rate) = match language {
            Language::En => (8, 2e-5),
            Language::Da => (16, 1e-5),
            Language::Ar => (24, 3e-5),
            Language::El => (32, 2e-5),
            Language::Tr => (16, 2e-5),
        };
        TrainConfig {
            epochs: 4,
            batch_size,
            learning_rate,
            seed: 0,
            language,
            freeze_encoders: false,
            dual_joint: false,
        }
    }

    pub fn validate(&self) -> Result<(), TrainError> {
        if self.epochs == 0 {
            return Err(TrainError::InvalidConfig("epochs must be at least 1".into()));
        }
        if self.batch_size == 0 {
            return Err(TrainError::InvalidConfig("batch size must be at least 1".into()));
        }
        if !(self.learning_rate.is_finite() && self.learning_rate > 0.0) {
            return Err(TrainError::InvalidConfig(format!(
                "learning rate {} must be positive",
                self.learning_rate
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassifierHead {
    /// `input_dim × 2`; column 0 scores OFF, column 1 scores NOT.
    pub weight: Array2<f64>,
    pub bias: Array1<f64>,
}

impl ClassifierHead {
    pub fn new(input_dim: usize, rng: &mut ChaCha8Rng) -> Self {
        let normal = Normal::new(0.0, 0.02).expect("valid std");
        ClassifierHead {
            weight: Array2::from_shape_simple_fn((input_dim, 2), || loop {
                let v: f64 = normal.sample(rng);
                if v.abs() <= 0.04 {
                    break v;
                }
            }),
            bias: Array1::zeros(2),
        }
    }

    pub fn zeros(input_dim: usize) -> Self {
        ClassifierHead {
            weight: Array2::zeros((input_dim, 2)),
            bias: Array1::zeros(2),
        }
    }

    pub fn input_dim(&self) -> usize {
        self.weight.nrows()
    }

    pub fn logits(&self, features: &Array1<f64>) -> [f64; 2] {
        let z = features.dot(&self.weight) + &self.bias;
        [z[0], z[1]]
    }

    pub fn named_tensors(&self) -> Vec<(String, ArrayViewD<'_, f64>)> {
        vec![
            ("head.weight".into(), self.weight.view().into_dyn()),
            ("head.bias".into(), self.bias.view().into_dyn()),
        ]
    }

    pub fn tensors_mut(&mut self) -> Vec<ArrayViewMutD<'_, f64>> {
        vec![self.weight.view_mut().into_dyn(), self.bias.view_mut().into_dyn()]
    }
}

pub fn softmax2(logits: [f64; 2]) -> [f64; 2] {
    let m = logits[0].max(logits[1]);
    let e = [(logits[0] - m).exp(), (logits[1] - m).exp()];
    let z = e[0] + e[1];
    [e[0] / z, e[1] / z]
}

/// `-log softmax(logits)[label]` via log-sum-exp, and its gradient
/// `softmax(logits) - one_hot(label)`.
pub fn cross_entropy_loss(logits: [f64; 2], label: Label) -> Result<(f64, [f64; 2]), TrainError> {
    if !logits.iter().all(|v| v.is_finite()) {
        return Err(TrainError::NonFiniteLogits);
    }
    let y = label.index();
    let (hi, lo) = if logits[0] >= logits[1] { (0, 1) } else { (1, 0) };
    let log_sum_exp = logits[hi] + (logits[lo] - logits[hi]).exp().ln_1p();
    let loss = log_sum_exp - logits[y];
    let p = softmax2(logits);
    let mut grad = p;
    grad[y] -= 1.0;
    Ok((loss, grad))
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdamState {
    pub m: Vec<Vec<f64>>,
    pub v: Vec<Vec<f64>>,
    pub t: u64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
}

impl Default for AdamState {
    fn default() -> Self {
        AdamState {
            m: Vec::new(),
            v: Vec::new(),
            t: 0,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
        }
    }
}

/// One bias-corrected Adam update. Moment buffers are allocated on the
/// first call and must keep the same shapes afterwards.
pub fn adam_step(
    params: &mut [ArrayViewMutD<'_, f64>],
    grads: &[ArrayViewD<'_, f64>],
    state: &mut AdamState,
    lr: f64,
) -> Result<(), TrainError> {
    if params.len() != grads.len() {
        return Err(TrainError::ShapeMismatch(format!(
            "{} parameter tensors, {} gradients",
            params.len(),
            grads.len()
        )));
    }
    for (i, (p, g)) in params.iter().zip(grads).enumerate() {
        if p.shape() != g.shape() {
            return Err(TrainError::ShapeMismatch(format!("tensor {i}")));
        }
    }
    if state.m.is_empty() {
        state.m = params.iter().map(|p| vec![0.0; p.len()]).collect();
        state.v = state.m.clone();
    } else if state.m.len() != params.len()
        || state.m.iter().zip(params.iter()).any(|(m, p)| m.len() != p.len())
    {
        return Err(TrainError::ShapeMismatch("optimizer state".into()));
    }
    state.t += 1;
    let (b1, b2) = (state.beta1, state.beta2);
    let c1 = 1.0 - b1.powi(state.t as i32);
    let c2 = 1.0 - b2.powi(state.t as i32);
    for (((p, g), m), v) in params
        .iter_mut()
        .zip(grads)
        .zip(state.m.iter_mut())
        .zip(state.v.iter_mut())
    {
        for (((p, &g), m), v) in p.iter_mut().zip(g.iter()).zip(m.iter_mut()).zip(v.iter_mut()) {
            *m = b1 * *m + (1.0 - b1) * g;
            *v = b2 * *v + (1.0 - b2) * g * g;
            let m_hat = *m / c1;
            let v_hat = *v / c2;
            *p -= lr * m_hat / (v_hat.sqrt() + state.eps);
        }
    }
    Ok(())
}

/// Encoders sharing one vocabulary, concatenated into a linear head.
#[derive(Debug, Clone, PartialEq)]
pub struct Classifier {
    pub vocabulary: Vocabulary,
    pub encoders: Vec<EncoderModel>,
    pub head: ClassifierHead,
}

/// Gradients with the same layout as a [`Classifier`].
#[derive(Debug, Clone)]
pub struct ClassifierGrads {
    pub encoders: Vec<EncoderModel>,
    pub head: ClassifierHead,
}

impl Classifier {
    pub fn new(
        vocabulary: Vocabulary,
        encoders: Vec<EncoderModel>,
        rng: &mut ChaCha8Rng,
    ) -> Result<Self, TrainError> {
        let Some(first) = encoders.first() else {
            return Err(TrainError::InvalidConfig("no encoder".into()));
        };
        if encoders.iter().any(|e| {
            e.config.max_len != first.config.max_len || e.vocab_size() != vocabulary.len()
        }) {
            return Err(EncoderError::ConfigMismatch.into());
        }
        let dim = encoders.iter().map(EncoderModel::hidden_size).sum();
        Ok(Classifier {
            head: ClassifierHead::new(dim, rng),
            vocabulary,
            encoders,
        })
    }

    pub fn max_len(&self) -> usize {
        self.encoders[0].config.max_len
    }

    pub fn feature_dim(&self) -> usize {
        self.head.input_dim()
    }

    pub fn sequence(&self, text: &str) -> TokenSequence {
        tokenize_encode(text, &self.vocabulary, self.max_len())
    }

    pub fn features(&self, seq: &TokenSequence) -> Result<SentenceVector, TrainError> {
        let parts = self
            .encoders
            .iter()
            .map(|e| e.encode(seq).map(|v| v.0))
            .collect::<Result<Vec<_>, _>>()?;
        let views: Vec<_> = parts.iter().map(|p| p.view()).collect();
        Ok(SentenceVector(
            ndarray::concatenate(Axis(0), &views).expect("1-d vectors concatenate"),
        ))
    }

    /// `[P(OFF), P(NOT)]`.
    pub fn probabilities(&self, text: &str) -> Result<[f64; 2], TrainError> {
        let f = self.features(&self.sequence(text))?;
        Ok(softmax2(self.head.logits(&f.0)))
    }

    pub fn predict(&self, text: &str) -> Result<Label, TrainError> {
        let p = self.probabilities(text)?;
        // ties go to NOT
        Ok(if p[0] > p[1] { Label::Off } else { Label::Not })
    }

    pub fn predict_corpus(&self, corpus: &Corpus) -> Result<Vec<Label>, TrainError> {
        corpus.texts().map(|t| self.predict(t)).collect()
    }

    pub fn zero_grads(&self) -> ClassifierGrads {
        ClassifierGrads {
            encoders: self.encoders.iter().map(EncoderModel::zeros_like).collect(),
            head: ClassifierHead::zeros(self.head.input_dim()),
        }
    }

    /// Parameter views: every encoder in order, then the head.
    pub fn tensors_mut(&mut self) -> Vec<ArrayViewMutD<'_, f64>> {
        let mut out: Vec<_> = self.encoders.iter_mut().flat_map(|e| e.tensors_mut()).collect();
        out.extend(self.head.tensors_mut());
        out
    }

    pub fn to_checkpoint(&self) -> Checkpoint {
        let mut ck = Checkpoint::new(self.vocabulary.clone());
        for e in &self.encoders {
            ck.push_encoder(e);
        }
        for (name, view) in self.head.named_tensors() {
            ck.push_tensor(NamedTensor::from_view(name, view));
        }
        ck
    }

    pub fn from_checkpoint(ck: &Checkpoint) -> Result<Self, TrainError> {
        let encoders = (0..ck.encoders.len())
            .map(|i| ck.encoder(i))
            .collect::<Result<Vec<_>, _>>()?;
        let head = ClassifierHead {
            weight: ck.tensor("head.weight")?.to_matrix()?,
            bias: ck.tensor("head.bias")?.to_vector()?,
        };
        let dim: usize = encoders.iter().map(EncoderModel::hidden_size).sum();
        if head.weight.dim() != (dim, 2) || head.bias.len() != 2 {
            return Err(TrainError::ShapeMismatch("classifier head".into()));
        }
        Ok(Classifier {
            vocabulary: ck.vocabulary.clone(),
            encoders,
            head,
        })
    }
}

impl ClassifierGrads {
    pub fn tensors(&self) -> Vec<ArrayViewD<'_, f64>> {
        let mut out: Vec<_> = self
            .encoders
            .iter()
            .flat_map(|e| e.named_tensors().into_iter().map(|(_, t)| t))
            .collect();
        out.extend(self.head.named_tensors().into_iter().map(|(_, t)| t));
        out
    }
}

/// Adds optimizer state to a checkpoint under `adam.*` names.
pub fn push_adam_state(ck: &mut Checkpoint, state: &AdamState) {
    for (i, (m, v)) in state.m.iter().zip(&state.v).enumerate() {
        for (kind, data) in [("m", m), ("v", v)] {
            ck.push_tensor(NamedTensor {
                name: format!("adam.{kind}.{i}"),
                shape: vec![data.len()],
                data: data.clone(),
            });
        }
    }
    ck.metadata.insert("adam.t".into(), serde_json::json!(state.t));
}

pub fn read_adam_state(ck: &Checkpoint) -> Result<AdamState, TrainError> {
    let mut state = AdamState::default();
    let mut i = 0;
    while let Ok(m) = ck.tensor(&format!("adam.m.{i}")) {
        state.m.push(m.data.clone());
        state.v.push(ck.tensor(&format!("adam.v.{i}"))?.data.clone());
        i += 1;
    }
    state.t = ck
        .metadata
        .get("adam.t")
        .and_then(|v| v.as_u64())
        .unwrap_or(0);
    Ok(state)
}

/// Mean cross-entropy of a batch and its gradients with respect to every
/// parameter. With `dropout` set, encoders run in training mode.
pub fn batch_loss_and_grads(
    model: &Classifier,
    seqs: &[&TokenSequence],
    labels: &[Label],
    mut dropout: Option<&mut ChaCha8Rng>,
    train_encoders: bool,
) -> Result<(f64, ClassifierGrads), TrainError> {
    let mut grads = model.zero_grads();
    let scale = 1.0 / seqs.len() as f64;
    let mut total = 0.0;
    for (seq, &label) in seqs.iter().zip(labels) {
        let traces = model
            .encoders
            .iter()
            .map(|e| e.forward_trace(seq, dropout.as_deref_mut()))
            .collect::<Result<Vec<_>, _>>()?;
        let parts: Vec<SentenceVector> = traces.iter().map(|t| t.cls()).collect();
        let views: Vec<_> = parts.iter().map(|p| p.0.view()).collect();
        let features = ndarray::concatenate(Axis(0), &views).expect("1-d vectors concatenate");
        let (loss, dlogits) = cross_entropy_loss(model.head.logits(&features), label)?;
        total += loss * scale;
        let dlogits = Array1::from(vec![dlogits[0] * scale, dlogits[1] * scale]);
        grads.head.weight += &features
            .view()
            .insert_axis(Axis(1))
            .dot(&dlogits.view().insert_axis(Axis(0)));
        grads.head.bias += &dlogits;
        if train_encoders {
            let d_features = model.head.weight.dot(&dlogits);
            let mut offset = 0;
            for ((enc, trace), g) in model.encoders.iter().zip(&traces).zip(&mut grads.encoders) {
                let h = enc.hidden_size();
                let d_cls = d_features.slice(s![offset..offset + h]).to_owned();
                enc.backward(trace, &d_cls, g);
                offset += h;
            }
        }
    }
    Ok((total, grads))
}

pub fn batch_loss(model: &Classifier, seqs: &[&TokenSequence], labels: &[Label]) -> Result<f64, TrainError> {
    Ok(batch_loss_and_grads(model, seqs, labels, None, false)?.0)
}

#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub classifier: Classifier,
    /// Mean training loss per epoch.
    pub loss_trace: Vec<f64>,
    pub optimizer: AdamState,
}

impl TrainOutcome {
    pub fn loss_csv(&self) -> String {
        let mut out = String::from("epoch,mean_loss\n");
        for (i, l) in self.loss_trace.iter().enumerate() {
            out.push_str(&format!("{},{l}\n", i + 1));
        }
        out
    }
}

fn check_batch(loss: f64, epoch: usize, batch: usize) -> Result<(), TrainError> {
    if !loss.is_finite() || loss > DIVERGENCE_LOSS {
        return Err(TrainError::Diverged {
            epoch: epoch + 1,
            batch: batch + 1,
            loss,
        });
    }
    Ok(())
}

/// Mini-batch Adam over `epochs` seeded shuffles of the corpus. One seeded
/// stream initialises the head, then drives shuffling and dropout. The last
/// short batch of each epoch is kept.
pub fn fit(
    vocabulary: &Vocabulary,
    encoders: Vec<EncoderModel>,
    corpus: &Corpus,
    config: &TrainConfig,
    train_encoders: bool,
) -> Result<TrainOutcome, TrainError> {
    config.validate()?;
    if corpus.is_empty() {
        return Err(TrainError::EmptyCorpus);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut model = Classifier::new(vocabulary.clone(), encoders, &mut rng)?;
    let seqs: Vec<TokenSequence> = corpus.texts().map(|t| model.sequence(t)).collect();
    let labels = corpus.labels();
    let mut optimizer = AdamState::default();
    let mut loss_trace = Vec::with_capacity(config.epochs);
    let mut order: Vec<usize> = (0..seqs.len()).collect();

    // frozen encoders: features never change, compute them once
    let frozen: Option<Vec<Array1<f64>>> = if train_encoders {
        None
    } else {
        Some(
            seqs.iter()
                .map(|s| model.features(s).map(|f| f.0))
                .collect::<Result<_, _>>()?,
        )
    };

    for epoch in 0..config.epochs {
        order.shuffle(&mut rng);
        let mut epoch_loss = 0.0;
        for (b, batch) in order.chunks(config.batch_size).enumerate() {
            let batch_labels: Vec<Label> = batch.iter().map(|&i| labels[i]).collect();
            let (loss, grads) = match &frozen {
                Some(features) => head_loss_and_grads(&model.head, batch, features, &batch_labels)?,
                None => {
                    let batch_seqs: Vec<&TokenSequence> = batch.iter().map(|&i| &seqs[i]).collect();
                    let (loss, g) =
                        batch_loss_and_grads(&model, &batch_seqs, &batch_labels, Some(&mut rng), true)?;
                    (loss, g)
                }
            };
            check_batch(loss, epoch, b)?;
            epoch_loss += loss * batch.len() as f64;
            if frozen.is_some() {
                let mut params = model.head.tensors_mut();
                let g: Vec<_> = grads.head.named_tensors().into_iter().map(|(_, t)| t).collect();
                adam_step(&mut params, &g, &mut optimizer, config.learning_rate)?;
            } else {
                let g = grads.tensors();
                let mut params = model.tensors_mut();
                adam_step(&mut params, &g, &mut optimizer, config.learning_rate)?;
            }
        }
        loss_trace.push(epoch_loss / seqs.len() as f64);
    }
    Ok(TrainOutcome {
        classifier: model,
        loss_trace,
        optimizer,
    })
}

fn head_loss_and_grads(
    head: &ClassifierHead,
    batch: &[usize],
    features: &[Array1<f64>],
    labels: &[Label],
) -> Result<(f64, ClassifierGrads), TrainError> {
    let mut g = ClassifierHead::zeros(head.input_dim());
    let scale = 1.0 / batch.len() as f64;
    let mut total = 0.0;
    for (&i, &label) in batch.iter().zip(labels) {
        let f = &features[i];
        let (loss, d) = cross_entropy_loss(head.logits(f), label)?;
        total += loss * scale;
        for (row, &x) in g.weight.rows_mut().into_iter().zip(f.iter()) {
            let mut row = row;
            row[0] += x * d[0] * scale;
            row[1] += x * d[1] * scale;
        }
        g.bias[0] += d[0] * scale;
        g.bias[1] += d[1] * scale;
    }
    Ok((
        total,
        ClassifierGrads {
            encoders: Vec::new(),
            head: g,
        },
    ))
}

/// Fine-tunes one encoder with a fresh head (head only when
/// `config.freeze_encoders`).
pub fn train_single(
    corpus: &Corpus,
    encoder: &EncoderModel,
    vocabulary: &Vocabulary,
    config: &TrainConfig,
) -> Result<TrainOutcome, TrainError> {
    fit(vocabulary, vec![encoder.clone()], corpus, config, !config.freeze_encoders)
}

/// Trains a head on the concatenated CLS vectors of two encoders. Encoders
/// stay frozen unless `config.dual_joint` is set.
pub fn train_dual(
    head_corpus: &Corpus,
    encoder_a: &EncoderModel,
    encoder_b: &EncoderModel,
    vocabulary: &Vocabulary,
    config: &TrainConfig,
) -> Result<TrainOutcome, TrainError> {
    if encoder_a.config.max_len != encoder_b.config.max_len
        || encoder_a.vocab_size() != encoder_b.vocab_size()
    {
        return Err(EncoderError::ConfigMismatch.into());
    }
    fit(
        vocabulary,
        vec![encoder_a.clone(), encoder_b.clone()],
        head_corpus,
        config,
        config.dual_joint,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::arr1;

    #[test]
    fn loss_at_equal_logits_is_ln2() {
        let (loss, grad) = cross_entropy_loss([0.0, 0.0], Label::Off).unwrap();
        assert!((loss - std::f64::consts::LN_2).abs() < 1e-15);
        assert_eq!(grad, [-0.5, 0.5]);
    }

    #[test]
    fn saturated_loss_is_tiny() {
        let (loss, grad) = cross_entropy_loss([30.0, -30.0], Label::Off).unwrap();
        assert!((0.0..1e-12).contains(&loss));
        assert!((grad[0] + grad[1]).abs() < 1e-15);
        let (wrong, _) = cross_entropy_loss([30.0, -30.0], Label::Not).unwrap();
        assert!((wrong - 60.0).abs() < 1e-9);
    }

    #[test]
    fn gradient_sums_to_zero() {
        for logits in [[1.3, -0.2], [-5.0, 4.0], [100.0, 99.0]] {
            for label in Label::ALL {
                let (_, g) = cross_entropy_loss(logits, label).unwrap();
                assert!((g[0] + g[1]).abs() < 1e-15);
            }
        }
        assert!(cross_entropy_loss([f64::NAN, 0.0], Label::Off).is_err());
    }

    #[test]
    fn adam_first_step() {
        let mut p = arr1(&[0.0]).into_dyn();
        let g = arr1(&[1.0]).into_dyn();
        let mut state = AdamState::default();
        adam_step(&mut [p.view_mut()], &[g.view()], &mut state, 2e-5).unwrap();
        assert!((state.m[0][0] - 0.1).abs() < 1e-15);
        assert!((state.v[0][0] - 0.001).abs() < 1e-15);
        // bias-corrected step lr * 1 / (1 + eps)
        assert!((p[0] + 2e-5 / (1.0 + 1e-8)).abs() < 1e-18);
        assert_eq!(state.t, 1);
    }

    #[test]
    fn adam_zero_gradient_is_noop() {
        let mut p = arr1(&[0.5, -1.0]).into_dyn();
        let g = arr1(&[0.0, 0.0]).into_dyn();
        let mut state = AdamState::default();
        adam_step(&mut [p.view_mut()], &[g.view()], &mut state, 1e-3).unwrap();
        assert_eq!(p, arr1(&[0.5, -1.0]).into_dyn());
    }

    #[test]
    fn adam_momentum_keeps_moving() {
        let mut p = arr1(&[0.0]).into_dyn();
        let mut state = AdamState::default();
        let one = arr1(&[1.0]).into_dyn();
        let zero = arr1(&[0.0]).into_dyn();
        adam_step(&mut [p.view_mut()], &[one.view()], &mut state, 1e-3).unwrap();
        let mut prev_p = p[0];
        let mut prev_m = state.m[0][0];
        for _ in 0..2 {
            adam_step(&mut [p.view_mut()], &[zero.view()], &mut state, 1e-3).unwrap();
            assert!((state.m[0][0] - 0.9 * prev_m).abs() < 1e-15);
            assert!(p[0] < prev_p);
            prev_p = p[0];
            prev_m = state.m[0][0];
        }
    }

    #[test]
    fn adam_rejects_shape_mismatch() {
        let mut p = arr1(&[0.0, 1.0]).into_dyn();
        let g = arr1(&[1.0]).into_dyn();
        let mut state = AdamState::default();
        assert!(adam_step(&mut [p.view_mut()], &[g.view()], &mut state, 1e-3).is_err());
    }

    #[test]
    fn language_defaults() {
        let expect = [
            (Language::En, 8, 2e-5),
            (Language::Da, 16, 1e-5),
            (Language::Ar, 24, 3e-5),
            (Language::El, 32, 2e-5),
            (Language::Tr, 16, 2e-5),
        ];
        for (lang, batch, lr) in expect {
            let c = TrainConfig::for_language(lang);
            assert_eq!((c.epochs, c.batch_size, c.learning_rate), (4, batch, lr));
        }
        let zero = TrainConfig {
            epochs: 0,
            ..Default::default()
        };
        assert!(zero.validate().is_err());
    }
}
