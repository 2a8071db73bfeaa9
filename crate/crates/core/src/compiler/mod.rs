//! Structural translation of formulas into encoder models.
//!
//! Every subformula gets its own coordinate holding its truth value at every
//! position. Gadgets only append coordinates, so the final sequence carries
//! the whole ledger.

mod plan;

use alloc::string::ToString;
use alloc::vec::Vec;

use crate::logic::{Alphabet, Formula, Fragment};
use crate::numeric::{PrecisionMode, PrecisionPolicy};
use crate::runtime::{EncoderModel, PositionalComponent, RuntimeError};

pub use plan::GadgetPlan;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CompileError {
    #[error("formula uses symbol {0:?} outside the alphabet")]
    UnknownSymbol(char),
    #[error("precision mode exact cannot represent the trigonometric encoding needed by X/U")]
    ExactWithTrig,
    #[error(transparent)]
    Model(#[from] RuntimeError),
}

/// Overrides for the precision law written into the model.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct CompileOptions {
    pub a: Option<u32>,
    pub b: Option<u32>,
    pub floor: Option<u32>,
    pub mode: Option<PrecisionMode>,
}

pub fn compile(phi: &Formula, alphabet: &Alphabet) -> Result<EncoderModel, CompileError> {
    compile_with(phi, alphabet, &CompileOptions::default())
}

pub fn compile_with(phi: &Formula, alphabet: &Alphabet, options: &CompileOptions) -> Result<EncoderModel, CompileError> {
    if let Some(c) = phi.postorder().into_iter().find_map(|f| match f {
        Formula::Atom(c) if !alphabet.contains(*c) => Some(*c),
        _ => None,
    }) {
        return Err(CompileError::UnknownSymbol(c));
    }
    let positional = required_components(phi);
    let trig = positional.iter().any(|p| p.is_trigonometric());
    let default_mode = if trig { PrecisionMode::BigFloat } else { PrecisionMode::ExactRational };
    let mode = options.mode.unwrap_or(default_mode);
    if trig && mode == PrecisionMode::ExactRational {
        return Err(CompileError::ExactWithTrig);
    }
    let base = PrecisionPolicy::default();
    let precision = PrecisionPolicy {
        a: options.a.unwrap_or(base.a),
        b: options.b.unwrap_or(base.b),
        floor: options.floor.unwrap_or(base.floor),
        mode,
    };
    let mut plan = GadgetPlan::new(alphabet, positional);
    let root = plan.formula(phi);
    plan.finish(root, phi.to_string(), precision).map_err(CompileError::from)
}

/// Union of the positional components any gadget of `phi` reads, in a fixed order.
pub fn required_components(phi: &Formula) -> Vec<PositionalComponent> {
    let temporal = phi.any(&|f| matches!(f, Formula::Next(_) | Formula::Until(..)));
    let counting = phi.classify() == Fragment::CPlus;
    let mut out = alloc::vec![PositionalComponent::Index];
    if counting {
        out.push(PositionalComponent::IndexSquared);
    }
    out.push(PositionalComponent::InvIndex);
    if temporal {
        out.extend([PositionalComponent::AltSign, PositionalComponent::CosGeo, PositionalComponent::SinGeo]);
    }
    let mut push = |c: PositionalComponent| {
        if !out.contains(&c) {
            out.push(c);
        }
    };
    for f in phi.postorder() {
        match f {
            Formula::Pred(p) => push(PositionalComponent::Pred(p.clone())),
            Formula::PredOfCount(p, ..) => {
                push(PositionalComponent::Pred(p.clone()));
                push(PositionalComponent::PredAtN(p.clone()));
            }
            _ => {}
        }
    }
    out
}

/// Layer role tags written into model metadata.
pub mod roles {
    pub const AFFINE: &str = "affine";
    pub const RELU: &str = "relu";
    pub const NEXT: &str = "next.attend";
    pub const UNTIL: &str = "until.attend";
    pub const BROADCAST: &str = "broadcast_last";
    pub const PREFIX_MEAN: &str = "prefix_mean";
    pub const COUNT: &str = "count.attend";
    pub const PRED_OF_COUNT: &str = "pred_of_count.attend";
}
