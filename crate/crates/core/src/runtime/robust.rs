use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::exec::{acceptance_score, decide, run_with, Decision, RunTrace};
use super::{EncoderModel, RuntimeError};
use crate::numeric::{PrecisionMode, Value};

#[derive(Clone, Debug, PartialEq)]
pub struct LayerReport {
    pub layer: usize,
    pub min_gap: Option<Value>,
    pub fragile: bool,
    /// Selections differ between the base and the doubled budget.
    pub changed: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RobustnessReport {
    pub bits: u32,
    pub doubled_bits: u32,
    pub decision: Option<Decision>,
    pub doubled_decision: Option<Decision>,
    /// `⟨t, v₀⟩` at the base budget.
    pub score: Option<Value>,
    pub layers: Vec<LayerReport>,
    /// Error text from either run, if one failed.
    pub failure: Option<String>,
    pub unchanged: bool,
}

impl RobustnessReport {
    pub fn fragile(&self) -> bool {
        self.layers.iter().any(|l| l.fragile)
    }
}

fn outcome(model: &EncoderModel, word: &str, doubled: bool) -> Result<(RunTrace, Decision), RuntimeError> {
    let policy = if doubled { model.precision().doubled() } else { *model.precision() };
    let trace = run_with(model, word, &policy)?;
    let d = decide(model, &trace, &policy)?;
    Ok((trace, d))
}

/// Re-runs `word` with the bit budget doubled and compares every selection
/// and the final decision. Word errors are returned; numeric trouble is reported.
pub fn robustness_check(model: &EncoderModel, word: &str) -> Result<RobustnessReport, RuntimeError> {
    let n = word.chars().count();
    if n == 0 {
        return Err(RuntimeError::EmptyWord);
    }
    let policy = model.precision();
    let mut report = RobustnessReport {
        bits: policy.bits(n),
        doubled_bits: policy.doubled().bits(n),
        decision: None,
        doubled_decision: None,
        score: None,
        layers: Vec::new(),
        failure: None,
        unchanged: false,
    };
    let word_error = |e: &RuntimeError| {
        matches!(e, RuntimeError::EmptyWord | RuntimeError::UnknownSymbol(_) | RuntimeError::Predicate(_))
    };
    let base = match outcome(model, word, false) {
        Ok(b) => b,
        Err(e) if word_error(&e) => return Err(e),
        Err(e) => {
            report.failure = Some(e.to_string());
            return Ok(report);
        }
    };
    report.decision = Some(base.1);
    report.score = Some(acceptance_score(model, &base.0.output));
    report.layers = base
        .0
        .layers
        .iter()
        .enumerate()
        .map(|(k, t)| LayerReport { layer: k, min_gap: t.min_gap.clone(), fragile: t.fragile, changed: false })
        .collect();
    if policy.mode == PrecisionMode::ExactRational {
        report.doubled_decision = report.decision;
        report.unchanged = true;
        return Ok(report);
    }
    match outcome(model, word, true) {
        Ok((trace, d)) => {
            report.doubled_decision = Some(d);
            for (l, t) in report.layers.iter_mut().zip(&trace.layers) {
                l.changed = base.0.layers[l.layer].selections != t.selections;
            }
            report.unchanged = d == base.1 && report.layers.iter().all(|l| !l.changed);
        }
        Err(e) => report.failure = Some(e.to_string()),
    }
    Ok(report)
}
