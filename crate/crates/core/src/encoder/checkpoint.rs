//! Self-describing JSON checkpoint: config, vocabulary and named tensors.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use ndarray::{Array1, Array2, ArrayViewD};
use serde::{Deserialize, Serialize};

use super::model::{Dense, EncoderConfig, EncoderLayer, EncoderModel, LayerNorm};
use super::vocab::Vocabulary;
use super::EncoderError;

pub const CHECKPOINT_FORMAT: &str = "offlang-checkpoint";
pub const CHECKPOINT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamedTensor {
    pub name: String,
    pub shape: Vec<usize>,
    pub data: Vec<f64>,
}

impl NamedTensor {
    pub fn from_view(name: impl Into<String>, view: ArrayViewD<'_, f64>) -> Self {
        NamedTensor {
            name: name.into(),
            shape: view.shape().to_vec(),
            data: view.iter().copied().collect(),
        }
    }

    pub fn to_matrix(&self) -> Result<Array2<f64>, EncoderError> {
        match self.shape[..] {
            [r, c] => Array2::from_shape_vec((r, c), self.data.clone())
                .map_err(|e| EncoderError::Checkpoint(format!("{}: {e}", self.name))),
            _ => Err(EncoderError::Checkpoint(format!("{} is not a matrix", self.name))),
        }
    }

    pub fn to_vector(&self) -> Result<Array1<f64>, EncoderError> {
        match self.shape[..] {
            [n] if n == self.data.len() => Ok(Array1::from(self.data.clone())),
            _ => Err(EncoderError::Checkpoint(format!("{} is not a vector", self.name))),
        }
    }
}

/// One or more encoders plus any extra tensors (classifier head, optimizer
/// state) under prefixed names.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub format: String,
    pub version: u32,
    pub vocabulary: Vocabulary,
    pub encoders: Vec<EncoderConfig>,
    pub tensors: Vec<NamedTensor>,
    #[serde(default)]
    pub metadata: BTreeMap<String, serde_json::Value>,
}

impl Checkpoint {
    pub fn new(vocabulary: Vocabulary) -> Self {
        Checkpoint {
            format: CHECKPOINT_FORMAT.into(),
            version: CHECKPOINT_VERSION,
            vocabulary,
            encoders: Vec::new(),
            tensors: Vec::new(),
            metadata: BTreeMap::new(),
        }
    }

    /// Stores an encoder under `encoder{index}.` prefixed tensor names.
    pub fn push_encoder(&mut self, model: &EncoderModel) {
        let prefix = format!("encoder{}.", self.encoders.len());
        self.encoders.push(model.config.clone());
        for (name, view) in model.named_tensors() {
            self.tensors.push(NamedTensor::from_view(format!("{prefix}{name}"), view));
        }
    }

    pub fn push_tensor(&mut self, tensor: NamedTensor) {
        self.tensors.push(tensor);
    }

    pub fn tensor(&self, name: &str) -> Result<&NamedTensor, EncoderError> {
        self.tensors
            .iter()
            .find(|t| t.name == name)
            .ok_or_else(|| EncoderError::Checkpoint(format!("missing tensor {name}")))
    }

    pub fn encoder(&self, index: usize) -> Result<EncoderModel, EncoderError> {
        let config = self
            .encoders
            .get(index)
            .ok_or_else(|| EncoderError::Checkpoint(format!("no encoder #{index}")))?
            .clone();
        config.validate()?;
        let p = format!("encoder{index}.");
        let mat = |n: &str| self.tensor(&format!("{p}{n}"))?.to_matrix();
        let vec = |n: &str| self.tensor(&format!("{p}{n}"))?.to_vector();
        let dense = |l: usize, n: &str| -> Result<Dense, EncoderError> {
            Ok(Dense {
                weight: mat(&format!("layer{l}.{n}.weight"))?,
                bias: vec(&format!("layer{l}.{n}.bias"))?,
            })
        };
        let norm = |l: usize, n: &str| -> Result<LayerNorm, EncoderError> {
            Ok(LayerNorm {
                gain: vec(&format!("layer{l}.{n}.gain"))?,
                bias: vec(&format!("layer{l}.{n}.bias"))?,
            })
        };
        let layers = (0..config.layers)
            .map(|l| {
                Ok(EncoderLayer {
                    query: dense(l, "query")?,
                    key: dense(l, "key")?,
                    value: dense(l, "value")?,
                    attn_out: dense(l, "attn_out")?,
                    attn_norm: norm(l, "attn_norm")?,
                    ff_in: dense(l, "ff_in")?,
                    ff_out: dense(l, "ff_out")?,
                    ff_norm: norm(l, "ff_norm")?,
                })
            })
            .collect::<Result<Vec<_>, EncoderError>>()?;
        let model = EncoderModel {
            token_embeddings: mat("token_embeddings")?,
            position_embeddings: mat("position_embeddings")?,
            layers,
            config,
        };
        // shapes must match what the config would build
        let reference = EncoderModel::new(model.config.clone(), model.vocab_size())?;
        let same_shapes = reference
            .named_tensors()
            .iter()
            .zip(model.named_tensors())
            .all(|((_, a), (_, b))| a.shape() == b.shape());
        if !same_shapes || model.vocab_size() != self.vocabulary.len() {
            return Err(EncoderError::Checkpoint("tensor shapes do not match config".into()));
        }
        if !model.is_finite() {
            return Err(EncoderError::Checkpoint("non-finite parameters".into()));
        }
        Ok(model)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("checkpoint serializes")
    }

    pub fn from_json(json: &str) -> Result<Self, EncoderError> {
        let c: Checkpoint =
            serde_json::from_str(json).map_err(|e| EncoderError::Checkpoint(e.to_string()))?;
        if c.format != CHECKPOINT_FORMAT {
            return Err(EncoderError::Checkpoint(format!("unknown format {:?}", c.format)));
        }
        if c.version != CHECKPOINT_VERSION {
            return Err(EncoderError::Checkpoint(format!("unsupported version {}", c.version)));
        }
        Ok(c)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), EncoderError> {
        fs::write(path.as_ref(), self.to_json())
            .map_err(|e| EncoderError::Checkpoint(format!("{}: {e}", path.as_ref().display())))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, EncoderError> {
        let json = fs::read_to_string(path.as_ref())
            .map_err(|e| EncoderError::Checkpoint(format!("{}: {e}", path.as_ref().display())))?;
        Checkpoint::from_json(&json)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encoder::vocab::RESERVED_TOKENS;

    fn vocab(n: usize) -> Vocabulary {
        let mut tokens: Vec<String> = RESERVED_TOKENS.iter().map(|s| s.to_string()).collect();
        tokens.extend((tokens.len()..n).map(|i| format!("w{i}")));
        Vocabulary::from_tokens(tokens).unwrap()
    }

    #[test]
    fn encoder_round_trips_exactly() {
        let config = EncoderConfig {
            hidden_size: 8,
            layers: 2,
            heads: 2,
            ff_size: 16,
            max_len: 6,
            seed: 5,
            ..Default::default()
        };
        let model = EncoderModel::new(config, 12).unwrap();
        let mut ck = Checkpoint::new(vocab(12));
        ck.push_encoder(&model);
        ck.metadata.insert("note".into(), serde_json::json!("x"));
        let back = Checkpoint::from_json(&ck.to_json()).unwrap();
        assert_eq!(back, ck);
        assert_eq!(back.encoder(0).unwrap(), model);
        assert!(back.encoder(1).is_err());
    }

    #[test]
    fn rejects_wrong_version() {
        let mut ck = Checkpoint::new(vocab(6));
        ck.version = 99;
        assert!(Checkpoint::from_json(&ck.to_json()).is_err());
    }
}
