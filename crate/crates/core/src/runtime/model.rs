use alloc::string::String;
use alloc::vec::Vec;

use super::{AffineMap, PositionalComponent, RuntimeError};
use crate::logic::Alphabet;
use crate::numeric::{PrecisionMode, PrecisionPolicy, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Selector {
    /// Leftmost maximizer.
    Unique,
    /// Uniform average over all maximizers.
    Average,
}

impl Selector {
    pub fn as_str(self) -> &'static str {
        match self {
            Selector::Unique => "unique",
            Selector::Average => "average",
        }
    }
}

/// Standard encoder layer: scores `⟨A vᵢ, B vⱼ⟩`, attended value `aᵢ`,
/// output `C(vᵢ, aᵢ)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AttentionLayer {
    pub a: AffineMap,
    pub b: AffineMap,
    pub c: AffineMap,
    pub selector: Selector,
    /// Future positional masking: position `i` only sees `0..=i`.
    pub masked: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Layer {
    Attention(AttentionLayer),
    /// ReLU on one coordinate, 1-based.
    Relu { coord: usize },
}

impl Layer {
    /// Output width given an input of width `d`, or the reason the layer cannot take it.
    pub fn output_width(&self, d: usize) -> Result<usize, String> {
        match self {
            Layer::Attention(l) => {
                if l.a.cols() != d || l.a.rows() != d || l.b.cols() != d || l.b.rows() != d {
                    return Err(alloc::format!(
                        "attention maps A ({}x{}) and B ({}x{}) must be {d}x{d}",
                        l.a.rows(),
                        l.a.cols(),
                        l.b.rows(),
                        l.b.cols()
                    ));
                }
                if l.c.cols() != 2 * d {
                    return Err(alloc::format!("C takes {} inputs, expected {}", l.c.cols(), 2 * d));
                }
                Ok(l.c.rows())
            }
            Layer::Relu { coord } => {
                if *coord == 0 || *coord > d {
                    return Err(alloc::format!("relu coordinate {coord} outside 1..={d}"));
                }
                Ok(d)
            }
        }
    }
}

/// Which coordinate realizes which subformula, and from which layer on.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LedgerEntry {
    pub formula: String,
    /// 0-based coordinate.
    pub coord: usize,
    /// Number of layers after which the coordinate holds its final value.
    pub layer: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ModelMetadata {
    pub source: String,
    pub ledger: Vec<LedgerEntry>,
    /// Short tag per layer naming the gadget step that emitted it.
    pub layer_roles: Vec<String>,
}

/// A compiled (or hand-written) encoder together with its embedding,
/// positional encoding and acceptance vector. Immutable once built.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EncoderModel {
    alphabet: Alphabet,
    positional: Vec<PositionalComponent>,
    layers: Vec<Layer>,
    acceptance: Vec<Rational>,
    precision: PrecisionPolicy,
    metadata: ModelMetadata,
}

impl EncoderModel {
    pub fn new(
        alphabet: Alphabet,
        positional: Vec<PositionalComponent>,
        layers: Vec<Layer>,
        acceptance: Vec<Rational>,
        precision: PrecisionPolicy,
        metadata: ModelMetadata,
    ) -> Result<Self, RuntimeError> {
        if precision.mode == PrecisionMode::ExactRational && positional.iter().any(|p| p.is_trigonometric()) {
            return Err(RuntimeError::InvalidModel(
                "exact-rational mode cannot be used with cos_geo/sin_geo positional components".into(),
            ));
        }
        let mut width = alphabet.len() + positional.len();
        for (k, layer) in layers.iter().enumerate() {
            width = layer
                .output_width(width)
                .map_err(|m| RuntimeError::InvalidModel(alloc::format!("layer {k}: {m}")))?;
        }
        if acceptance.len() != width {
            return Err(RuntimeError::InvalidModel(alloc::format!(
                "acceptance vector has {} entries but the final width is {width}",
                acceptance.len()
            )));
        }
        Ok(EncoderModel { alphabet, positional, layers, acceptance, precision, metadata })
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn positional(&self) -> &[PositionalComponent] {
        &self.positional
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn acceptance(&self) -> &[Rational] {
        &self.acceptance
    }

    pub fn precision(&self) -> &PrecisionPolicy {
        &self.precision
    }

    pub fn metadata(&self) -> &ModelMetadata {
        &self.metadata
    }

    pub fn input_width(&self) -> usize {
        self.alphabet.len() + self.positional.len()
    }

    pub fn output_width(&self) -> usize {
        self.acceptance.len()
    }

    /// Copy with a different precision policy (validated again).
    pub fn with_precision(&self, precision: PrecisionPolicy) -> Result<Self, RuntimeError> {
        EncoderModel::new(
            self.alphabet.clone(),
            self.positional.clone(),
            self.layers.clone(),
            self.acceptance.clone(),
            precision,
            self.metadata.clone(),
        )
    }

    /// Copy with a different acceptance vector (validated again).
    pub fn with_acceptance(&self, acceptance: Vec<Rational>) -> Result<Self, RuntimeError> {
        EncoderModel::new(
            self.alphabet.clone(),
            self.positional.clone(),
            self.layers.clone(),
            acceptance,
            self.precision,
            self.metadata.clone(),
        )
    }

    pub fn ledger_coord(&self, formula: &str) -> Option<usize> {
        self.metadata.ledger.iter().find(|e| e.formula == formula).map(|e| e.coord)
    }
}
