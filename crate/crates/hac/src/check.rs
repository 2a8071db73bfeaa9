//! Exhaustive differential verification of a compiled model against the
//! direct semantics.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use hac_core::logic::{accepts, trace, Formula};
use hac_core::numeric::{Comparator, PrecisionPolicy, Rational, Value};
use hac_core::runtime::{acceptance_score, robustness_check, run, EncoderModel, RuntimeError};
use serde_json::{json, Value as Json};

#[derive(Clone, Debug)]
pub struct CheckOptions {
    pub min_len: usize,
    pub max_len: usize,
    pub workers: usize,
    /// Also re-run every word at doubled precision.
    pub robust: bool,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions { min_len: 1, max_len: 8, workers: 1, robust: false }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Finding {
    /// `position` is `None` for the accept decision itself.
    Mismatch { word: String, position: Option<usize>, subformula: String, oracle: bool, model: Value },
    Error { word: String, message: String },
    /// Selections or decision changed at doubled precision.
    Unstable { word: String, layers: Vec<usize> },
}

impl Finding {
    pub fn word(&self) -> &str {
        match self {
            Finding::Mismatch { word, .. } | Finding::Error { word, .. } | Finding::Unstable { word, .. } => word,
        }
    }

    pub fn to_json(&self) -> Json {
        match self {
            Finding::Mismatch { word, position, subformula, oracle, model } => json!({
                "kind": "mismatch",
                "word": word,
                "position": position,
                "subformula": subformula,
                "oracle": *oracle as u8,
                "model": bit_json(model),
            }),
            Finding::Error { word, message } => json!({ "kind": "error", "word": word, "message": message }),
            Finding::Unstable { word, layers } => json!({ "kind": "unstable", "word": word, "layers": layers }),
        }
    }
}

fn bit_json(v: &Value) -> Json {
    match v.as_rational().and_then(Rational::to_i64) {
        Some(k @ (0 | 1)) => json!(k),
        _ => json!(v.to_string()),
    }
}

#[derive(Clone, Debug)]
pub struct CheckReport {
    pub formula: String,
    pub alphabet: String,
    pub min_len: usize,
    pub max_len: usize,
    pub words: usize,
    pub findings: Vec<Finding>,
    /// Smallest attention score gap seen over all words and layers.
    pub min_gap: Option<Value>,
    pub precision: PrecisionPolicy,
    /// Words whose acceptance score was not exactly ±1.
    pub margin_violations: usize,
    pub fragile_words: usize,
}

impl CheckReport {
    pub fn mismatches(&self) -> usize {
        self.findings.iter().filter(|f| !matches!(f, Finding::Unstable { .. })).count()
    }

    pub fn unstable(&self) -> usize {
        self.findings.iter().filter(|f| matches!(f, Finding::Unstable { .. })).count()
    }

    pub fn equivalent(&self) -> bool {
        self.mismatches() == 0
    }

    pub fn summary_json(&self) -> Json {
        json!({
            "kind": "summary",
            "formula": self.formula,
            "alphabet": self.alphabet,
            "min_len": self.min_len,
            "max_len": self.max_len,
            "words": self.words,
            "mismatches": self.mismatches(),
            "unstable": self.unstable(),
            "margin_violations": self.margin_violations,
            "fragile_words": self.fragile_words,
            "min_gap": self.min_gap.as_ref().map(|g| g.to_string()),
            "min_gap_approx": self.min_gap.as_ref().map(|g| g.approx_f64()),
            "precision": {
                "a": self.precision.a,
                "b": self.precision.b,
                "floor": self.precision.floor,
                "mode": self.precision.mode.as_str(),
            },
            "verdict": if self.equivalent() { "equivalent" } else { "not-equivalent" },
        })
    }

    /// One line per finding, then the summary.
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for f in &self.findings {
            out.push_str(&f.to_json().to_string());
            out.push('\n');
        }
        out.push_str(&self.summary_json().to_string());
        out.push('\n');
        out
    }
}

#[derive(Default)]
struct WordOutcome {
    findings: Vec<Finding>,
    min_gap: Option<Value>,
    margin_violation: bool,
    fragile: bool,
}

fn smaller(a: Option<Value>, b: Option<Value>) -> Option<Value> {
    match (a, b) {
        (Some(x), Some(y)) => Some(if y.approx_f64() < x.approx_f64() { y } else { x }),
        (x, None) => x,
        (None, y) => y,
    }
}

fn check_word(model: &EncoderModel, phi: &Formula, subs: &[(&Formula, usize)], word: &str, robust: bool) -> WordOutcome {
    let mut out = WordOutcome::default();
    let error = |message: String| Finding::Error { word: word.to_string(), message };
    let run_trace = match run(model, word) {
        Ok(t) => t,
        Err(e) => {
            out.findings.push(error(e.to_string()));
            return out;
        }
    };
    for layer in &run_trace.layers {
        out.min_gap = smaller(out.min_gap.take(), layer.min_gap.clone());
        out.fragile |= layer.fragile;
    }
    let score = acceptance_score(model, &run_trace.output);
    out.margin_violation = score != Value::one() && score != Value::one().neg();
    let mut cmp = Comparator::new(model.precision(), run_trace.output.len());
    let decision = match cmp.sign(&score) {
        Ok(s) if s.ordering == std::cmp::Ordering::Greater => true,
        Ok(s) if s.ordering == std::cmp::Ordering::Less => false,
        Ok(_) => {
            out.findings.push(error(RuntimeError::ZeroScore.to_string()));
            return out;
        }
        Err(e) => {
            out.findings.push(error(e.to_string()));
            return out;
        }
    };
    match accepts(phi, word) {
        Ok(oracle) if oracle != decision => out.findings.push(Finding::Mismatch {
            word: word.to_string(),
            position: None,
            subformula: phi.to_string(),
            oracle,
            model: Value::from(decision as i64),
        }),
        Ok(_) => {}
        Err(e) => out.findings.push(error(e.to_string())),
    }
    for (f, coord) in subs {
        let bits = match trace(f, word) {
            Ok(b) => b,
            Err(e) => {
                out.findings.push(error(e.to_string()));
                continue;
            }
        };
        for (i, (&bit, v)) in bits.iter().zip(&run_trace.output).enumerate() {
            let got = &v[*coord];
            if *got != Value::from(bit as i64) {
                out.findings.push(Finding::Mismatch {
                    word: word.to_string(),
                    position: Some(i),
                    subformula: f.to_string(),
                    oracle: bit,
                    model: got.clone(),
                });
            }
        }
    }
    if robust {
        match robustness_check(model, word) {
            Ok(r) if !r.unchanged => out.findings.push(Finding::Unstable {
                word: word.to_string(),
                layers: r.layers.iter().filter(|l| l.changed).map(|l| l.layer).collect(),
            }),
            Ok(_) => {}
            Err(e) => out.findings.push(error(e.to_string())),
        }
    }
    out
}

/// Compares `model` with the semantics of `phi` on every word of length
/// `min_len..=max_len`, in length-lexicographic order. The result does not
/// depend on the number of workers.
pub fn check_model(model: &EncoderModel, phi: &Formula, opts: &CheckOptions) -> CheckReport {
    let alphabet = model.alphabet();
    let words: Vec<String> =
        alphabet.words_up_to(opts.max_len).filter(|w| w.chars().count() >= opts.min_len).collect();
    let subs: Vec<(&Formula, usize)> = phi
        .postorder()
        .into_iter()
        .filter_map(|f| model.ledger_coord(&f.to_string()).map(|c| (f, c)))
        .filter(|(_, c)| *c < model.output_width())
        .collect();

    const CHUNK: usize = 64;
    let chunks = words.len().div_ceil(CHUNK);
    let next = AtomicUsize::new(0);
    let results: Mutex<Vec<(usize, Vec<WordOutcome>)>> = Mutex::new(Vec::with_capacity(chunks));
    let worker = || loop {
        let k = next.fetch_add(1, Ordering::Relaxed);
        if k >= chunks {
            break;
        }
        let block = &words[k * CHUNK..((k + 1) * CHUNK).min(words.len())];
        let outcomes = block.iter().map(|w| check_word(model, phi, &subs, w, opts.robust)).collect();
        results.lock().expect("no worker panicked").push((k, outcomes));
    };
    let workers = opts.workers.max(1).min(chunks.max(1));
    if workers == 1 {
        worker();
    } else {
        std::thread::scope(|s| {
            for _ in 0..workers {
                s.spawn(worker);
            }
        });
    }
    let mut results = results.into_inner().expect("no worker panicked");
    results.sort_by_key(|(k, _)| *k);

    let mut report = CheckReport {
        formula: phi.to_string(),
        alphabet: alphabet.as_string(),
        min_len: opts.min_len,
        max_len: opts.max_len,
        words: words.len(),
        findings: Vec::new(),
        min_gap: None,
        precision: *model.precision(),
        margin_violations: 0,
        fragile_words: 0,
    };
    for outcome in results.into_iter().flat_map(|(_, o)| o) {
        report.findings.extend(outcome.findings);
        report.min_gap = smaller(report.min_gap.take(), outcome.min_gap);
        report.margin_violations += outcome.margin_violation as usize;
        report.fragile_words += outcome.fragile as usize;
    }
    report
}
