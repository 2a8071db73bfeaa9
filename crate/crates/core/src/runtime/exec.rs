use alloc::borrow::Cow;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use super::{AffineMap, EncoderModel, Layer, RuntimeError, Selector};
use crate::numeric::{Comparator, PrecisionPolicy, Rational, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Decision {
    Accept,
    Reject,
}

impl Decision {
    pub fn as_str(self) -> &'static str {
        match self {
            Decision::Accept => "accept",
            Decision::Reject => "reject",
        }
    }

    pub fn is_accept(self) -> bool {
        self == Decision::Accept
    }
}

/// Maximizer set chosen at one position.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Selection {
    pub positions: Vec<usize>,
    /// Best score minus the best strictly smaller score; `None` when every
    /// candidate ties.
    pub gap: Option<Value>,
    pub escalated: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LayerTrace {
    /// Per position, the positions attended to. Empty for ReLU layers.
    pub selections: Vec<Vec<usize>>,
    pub min_gap: Option<Value>,
    /// Some decision needed escalation or had a gap under `2^-bits(n)`.
    pub fragile: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunTrace {
    pub output: Vec<Vec<Value>>,
    pub layers: Vec<LayerTrace>,
}

/// One-hot symbol block followed by the positional components.
pub fn embed(model: &EncoderModel, word: &str) -> Result<Vec<Vec<Value>>, RuntimeError> {
    let symbols: Vec<char> = word.chars().collect();
    let n = symbols.len();
    if n == 0 {
        return Err(RuntimeError::EmptyWord);
    }
    let k = model.alphabet().len();
    symbols
        .iter()
        .enumerate()
        .map(|(i, &c)| {
            let idx = model.alphabet().index_of(c).ok_or(RuntimeError::UnknownSymbol(c))?;
            let mut v = vec![Value::zero(); k];
            v[idx] = Value::one();
            for p in model.positional() {
                v.push(p.eval(i, n)?);
            }
            Ok(v)
        })
        .collect()
}

fn dot(q: &[(usize, Value)], key: &[Value]) -> Value {
    q.iter().fold(Value::zero(), |acc, (r, x)| {
        if key[*r].is_zero() {
            acc
        } else {
            acc.add(&x.mul(&key[*r]))
        }
    })
}

fn select_from_scores(
    scores: impl Iterator<Item = (usize, Value)>,
    selector: Selector,
    cmp: &mut Comparator,
) -> Result<Selection, crate::numeric::NumericError> {
    let mut best: Option<Value> = None;
    let mut runner: Option<Value> = None;
    let mut set = Vec::new();
    let mut escalated = false;
    for (j, s) in scores {
        let Some(b) = &best else {
            best = Some(s);
            set.push(j);
            continue;
        };
        let c = cmp.compare(&s, b)?;
        escalated |= c.escalated;
        match c.ordering {
            Ordering::Greater => {
                runner = best.take();
                best = Some(s);
                set.clear();
                set.push(j);
            }
            Ordering::Equal => set.push(j),
            Ordering::Less => {
                let replace = match &runner {
                    None => true,
                    Some(r) => {
                        let c = cmp.compare(&s, r)?;
                        escalated |= c.escalated;
                        c.ordering == Ordering::Greater
                    }
                };
                if replace {
                    runner = Some(s);
                }
            }
        }
    }
    let gap = match (&best, &runner) {
        (Some(b), Some(r)) => Some(b.sub(r)),
        _ => None,
    };
    if selector == Selector::Unique {
        set.truncate(1);
    }
    Ok(Selection { positions: set, gap, escalated })
}

fn universe(n: usize, i: usize, masked: bool) -> core::ops::Range<usize> {
    if masked {
        0..i + 1
    } else {
        0..n
    }
}

/// Positions attended to from position `i`.
pub fn attention_select(
    a: &AffineMap,
    b: &AffineMap,
    seq: &[Vec<Value>],
    i: usize,
    selector: Selector,
    masked: bool,
    cmp: &mut Comparator,
) -> Result<Selection, RuntimeError> {
    let n = seq.len();
    if i >= n {
        return Err(RuntimeError::PositionOutOfRange { i, n });
    }
    let query = a.apply_sparse(&seq[i]);
    let scores = universe(n, i, masked).map(|j| (j, dot(&query, &b.apply(&seq[j]))));
    select_from_scores(scores, selector, cmp).map_err(|source| RuntimeError::Numeric { layer: 0, source })
}

fn mean<'a>(seq: &'a [Vec<Value>], set: &[usize]) -> Cow<'a, [Value]> {
    if let [j] = set {
        return Cow::Borrowed(&seq[*j]);
    }
    let d = seq[set[0]].len();
    let scale = Rational::new(1, set.len() as i64);
    Cow::Owned(
        (0..d)
            .map(|c| {
                let sum = set.iter().fold(Value::zero(), |acc, &j| acc.add(&seq[j][c]));
                sum.scale(&scale)
            })
            .collect(),
    )
}

/// Applies one layer to a whole sequence. `index` is only used in error reports.
pub fn apply_layer(
    layer: &Layer,
    mut seq: Vec<Vec<Value>>,
    index: usize,
    cmp: &mut Comparator,
) -> Result<(Vec<Vec<Value>>, LayerTrace), RuntimeError> {
    let n = seq.len();
    if n == 0 {
        return Err(RuntimeError::EmptyWord);
    }
    let d = seq[0].len();
    if let Some(bad) = seq.iter().find(|v| v.len() != d) {
        return Err(RuntimeError::WidthMismatch { layer: index, expected: d, found: bad.len() });
    }
    if layer.output_width(d).is_err() {
        let expected = match layer {
            Layer::Attention(l) => l.a.cols(),
            Layer::Relu { coord } => *coord,
        };
        return Err(RuntimeError::WidthMismatch { layer: index, expected, found: d });
    }
    match layer {
        Layer::Relu { coord } => {
            let k = coord - 1;
            let mut fragile = false;
            for v in &mut seq {
                let s = cmp.sign(&v[k]).map_err(|source| RuntimeError::Numeric { layer: index, source })?;
                fragile |= s.escalated;
                if s.ordering == Ordering::Less {
                    v[k] = Value::zero();
                }
            }
            Ok((seq, LayerTrace { selections: Vec::new(), min_gap: None, fragile }))
        }
        Layer::Attention(l) => {
            let numeric = |source| RuntimeError::Numeric { layer: index, source };
            let constant = l.a.is_zero() || l.b.is_zero();
            let (queries, keys) = if constant {
                (Vec::new(), Vec::new())
            } else {
                (
                    seq.iter().map(|v| l.a.apply_sparse(v)).collect::<Vec<_>>(),
                    seq.iter().map(|v| l.b.apply(v)).collect::<Vec<_>>(),
                )
            };
            let keep = l.c.identity_prefix().min(d);
            let mut trace = LayerTrace::default();
            let mut tails = Vec::with_capacity(n);
            for i in 0..n {
                let range = universe(n, i, l.masked);
                let sel = if constant {
                    let positions = match l.selector {
                        Selector::Unique => vec![0],
                        Selector::Average => range.collect(),
                    };
                    Selection { positions, gap: None, escalated: false }
                } else {
                    let scores = range.map(|j| (j, dot(&queries[i], &keys[j])));
                    select_from_scores(scores, l.selector, cmp).map_err(numeric)?
                };
                if let Some(g) = &sel.gap {
                    if cmp.below_resolution(g) {
                        trace.fragile = true;
                    }
                    let smaller = match &trace.min_gap {
                        None => true,
                        Some(m) => cmp.compare(g, m).map_err(numeric)?.ordering == Ordering::Less,
                    };
                    if smaller {
                        trace.min_gap = Some(g.clone());
                    }
                }
                trace.fragile |= sel.escalated;
                let attended = mean(&seq, &sel.positions);
                tails.push(l.c.apply_concat_from(&seq[i], &attended, keep));
                trace.selections.push(sel.positions);
            }
            for (v, tail) in seq.iter_mut().zip(tails) {
                v.truncate(keep);
                v.extend(tail);
            }
            Ok((seq, trace))
        }
    }
}

/// Runs every layer at the model's own precision policy.
pub fn run(model: &EncoderModel, word: &str) -> Result<RunTrace, RuntimeError> {
    run_with(model, word, model.precision())
}

/// Runs every layer under an explicit precision policy.
pub fn run_with(model: &EncoderModel, word: &str, policy: &PrecisionPolicy) -> Result<RunTrace, RuntimeError> {
    let mut seq = embed(model, word)?;
    let mut cmp = Comparator::new(policy, seq.len());
    let mut layers = Vec::with_capacity(model.layers().len());
    for (k, layer) in model.layers().iter().enumerate() {
        let (next, trace) = apply_layer(layer, seq, k, &mut cmp)?;
        seq = next;
        layers.push(trace);
    }
    Ok(RunTrace { output: seq, layers })
}

/// `⟨t, v₀⟩` on the final sequence of a run.
pub fn acceptance_score(model: &EncoderModel, output: &[Vec<Value>]) -> Value {
    model
        .acceptance()
        .iter()
        .zip(&output[0])
        .filter(|(t, _)| !t.is_zero())
        .fold(Value::zero(), |acc, (t, x)| acc.add(&x.scale(t)))
}

/// Sign of `⟨t, v₀⟩` on a finished run.
pub(crate) fn decide(model: &EncoderModel, trace: &RunTrace, policy: &PrecisionPolicy) -> Result<Decision, RuntimeError> {
    let score = acceptance_score(model, &trace.output);
    let mut cmp = Comparator::new(policy, trace.output.len());
    let s = cmp
        .sign(&score)
        .map_err(|source| RuntimeError::Numeric { layer: model.layers().len(), source })?;
    match s.ordering {
        Ordering::Greater => Ok(Decision::Accept),
        Ordering::Less => Ok(Decision::Reject),
        Ordering::Equal => Err(RuntimeError::ZeroScore),
    }
}

pub fn accept(model: &EncoderModel, word: &str) -> Result<Decision, RuntimeError> {
    let trace = run(model, word)?;
    decide(model, &trace, model.precision())
}
