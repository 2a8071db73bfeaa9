//! Interpreter for hard-attention encoder models.

mod affine;
mod exec;
mod model;
mod positional;
mod robust;

pub use affine::AffineMap;
pub use exec::{accept, acceptance_score, apply_layer, attention_select, embed, run, run_with, Decision, LayerTrace, RunTrace, Selection};
pub use model::{AttentionLayer, EncoderModel, Layer, LedgerEntry, ModelMetadata, Selector};
pub use positional::{geo_angle, PositionalComponent};
pub use robust::{robustness_check, LayerReport, RobustnessReport};

use alloc::string::String;

use crate::logic::PredicateError;
use crate::numeric::NumericError;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RuntimeError {
    #[error("input of width {found} where layer {layer} expects {expected}")]
    WidthMismatch { layer: usize, expected: usize, found: usize },
    #[error("symbol {0:?} is not in the model alphabet")]
    UnknownSymbol(char),
    #[error("words must be non-empty")]
    EmptyWord,
    #[error("position {i} out of range for a sequence of length {n}")]
    PositionOutOfRange { i: usize, n: usize },
    #[error("layer {layer}: {source}")]
    Numeric { layer: usize, source: NumericError },
    #[error(transparent)]
    Predicate(#[from] PredicateError),
    #[error("acceptance score is exactly zero; the model leaves this word undecided")]
    ZeroScore,
    #[error("invalid model: {0}")]
    InvalidModel(String),
}
