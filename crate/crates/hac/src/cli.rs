//! The `hac` command line.

use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use hac_core::compiler::{compile_with, CompileOptions};
use hac_core::logic::{self, parse_formula, Alphabet, Formula, ParseError};
use hac_core::parikh::{
    constraint_to_formula, equal_counts, linear_member, parikh_image, witness_language, CountingConstraint, LinearSet,
};
use hac_core::runtime::{accept, run, EncoderModel};
use serde_json::Value as Json;

use crate::check::{check_model, CheckOptions};
use crate::model_file::{mode_from_str, model_from_str, model_to_string};
use crate::parikh_doc::{constraint_from_json, linear_from_json};

/// Environment variable overriding the precision floor, in bits.
pub const PRECISION_ENV: &str = "HAC_PRECISION_BITS";

#[derive(Parser, Debug)]
#[command(name = "hac", version, about = "Compile temporal-logic formulas into hard-attention encoders and run them")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Compile a formula into a model document.
    Compile(CompileArgs),
    /// Run a model on one word.
    Run(RunArgs),
    /// Compare a compiled model with the formula on every word up to a length.
    Check(CheckArgs),
    /// Evaluate a formula directly.
    Oracle(OracleArgs),
    /// Parikh-image utilities.
    #[command(subcommand)]
    Parikh(ParikhCommand),
}

#[derive(Args, Debug, Clone)]
struct PrecisionArgs {
    #[arg(long = "precision-a")]
    precision_a: Option<u32>,
    #[arg(long = "precision-b")]
    precision_b: Option<u32>,
    /// exact | bigfloat
    #[arg(long)]
    mode: Option<String>,
}

#[derive(Args, Debug)]
struct CompileArgs {
    #[arg(short, long)]
    alphabet: String,
    #[arg(short, long)]
    formula: String,
    #[arg(short, long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    precision: PrecisionArgs,
}

#[derive(Args, Debug)]
struct RunArgs {
    #[arg(short, long)]
    model: PathBuf,
    word: String,
    /// Print every ledger column.
    #[arg(long)]
    trace: bool,
}

#[derive(Args, Debug)]
struct CheckArgs {
    #[arg(short, long)]
    alphabet: String,
    #[arg(short, long)]
    formula: String,
    /// Check this model file instead of compiling the formula.
    #[arg(short, long)]
    model: Option<PathBuf>,
    /// Defaults to 8 for alphabets of at most two letters, 6 otherwise.
    #[arg(long = "max-len")]
    max_len: Option<usize>,
    #[arg(long = "min-len", default_value_t = 1)]
    min_len: usize,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    /// Also re-run every word at doubled precision.
    #[arg(long)]
    robust: bool,
    #[arg(short, long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    precision: PrecisionArgs,
}

#[derive(Args, Debug)]
struct OracleArgs {
    #[arg(short, long)]
    formula: String,
    /// Defaults to the letters of the word and the formula.
    #[arg(short, long)]
    alphabet: Option<String>,
    word: String,
}

#[derive(Args, Debug)]
struct SetArgs {
    /// Linear set as JSON text or a path to a JSON file.
    #[arg(short, long, conflicts_with_all = ["base", "period"])]
    set: Option<String>,
    /// Comma-separated base vector.
    #[arg(long)]
    base: Option<String>,
    /// Comma-separated period vector; repeatable.
    #[arg(long)]
    period: Vec<String>,
    /// Letters for the coordinates; defaults to a, b, c, … printed as a1, a2, a3, ….
    #[arg(short, long)]
    alphabet: Option<String>,
}

#[derive(Subcommand, Debug)]
enum ParikhCommand {
    /// Print the witness pattern w0 (w1)* ... (wr)*.
    Witness(SetArgs),
    /// Print the count vectors of a language up to a total length.
    Image {
        #[command(flatten)]
        set: SetArgs,
        /// Use the language of this formula instead of a witness language.
        #[arg(short, long)]
        formula: Option<String>,
        #[arg(long = "max-total", default_value_t = 8)]
        max_total: usize,
    },
    /// Print the counting formula for a constraint.
    PermFormula {
        /// Constraint as JSON text or a path to a JSON file.
        #[arg(short, long, conflicts_with = "equal")]
        constraint: Option<String>,
        /// Letters whose counts must all be equal.
        #[arg(long)]
        equal: Option<String>,
        #[arg(short, long)]
        alphabet: Option<String>,
    },
    /// Verify that the witness language has exactly the set as Parikh image up to a box.
    CheckEquiv {
        #[command(flatten)]
        set: SetArgs,
        #[arg(long = "box", default_value_t = 10)]
        bound: usize,
    },
}

/// Failure carrying the exit code.
struct Failure(i32, String);

fn usage(msg: impl Into<String>) -> Failure {
    Failure(2, msg.into())
}

fn alphabet(s: &str) -> Result<Alphabet, Failure> {
    Alphabet::from_str(s).map_err(|e| usage(format!("alphabet: {e}")))
}

fn formula(text: &str, sigma: &Alphabet) -> Result<Formula, Failure> {
    parse_formula(text, sigma).map_err(|e| usage(format!("formula: {e}\n  {text}\n  {}^", " ".repeat(e.position()))))
}

fn env_floor() -> Result<Option<u32>, Failure> {
    match std::env::var(PRECISION_ENV) {
        Err(_) => Ok(None),
        Ok(v) => v.trim().parse().map(Some).map_err(|_| usage(format!("{PRECISION_ENV} must be a bit count, got {v:?}"))),
    }
}

fn compile_options(p: &PrecisionArgs) -> Result<CompileOptions, Failure> {
    let mode = p.mode.as_deref().map(mode_from_str).transpose().map_err(|e| usage(e.0))?;
    Ok(CompileOptions { a: p.precision_a, b: p.precision_b, floor: env_floor()?, mode })
}

fn read_text(path: &PathBuf) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn load_model(path: &PathBuf) -> Result<EncoderModel, Failure> {
    let model = model_from_str(&read_text(path)?).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    match env_floor()? {
        Some(floor) => {
            let policy = hac_core::numeric::PrecisionPolicy { floor, ..*model.precision() };
            model.with_precision(policy).map_err(|e| usage(e.to_string()))
        }
        None => Ok(model),
    }
}

fn write_out(path: Option<&PathBuf>, text: &str, stdout: &mut dyn Write) -> Result<(), Failure> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| usage(format!("{}: {e}", p.display()))),
        None => stdout.write_all(text.as_bytes()).map_err(|e| Failure(2, e.to_string())),
    }
}

fn bits(v: &[bool]) -> String {
    v.iter().map(|&b| if b { "1" } else { "0" }).collect::<Vec<_>>().join(" ")
}

fn cmd_compile(args: CompileArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32, Failure> {
    let sigma = alphabet(&args.alphabet)?;
    let phi = formula(&args.formula, &sigma)?;
    let model = compile_with(&phi, &sigma, &compile_options(&args.precision)?).map_err(|e| usage(e.to_string()))?;
    write_out(args.out.as_ref(), &model_to_string(&model), stdout)?;
    let _ = writeln!(
        stderr,
        "layers: {}, width: {}, fragment: {:?}, mode: {}",
        model.layers().len(),
        model.output_width(),
        phi.classify(),
        model.precision().mode.as_str()
    );
    Ok(0)
}

fn cmd_run(args: RunArgs, stdout: &mut dyn Write) -> Result<i32, Failure> {
    let model = load_model(&args.model)?;
    let decision = accept(&model, &args.word).map_err(|e| usage(e.to_string()))?;
    let mut text = String::new();
    writeln!(text, "{}", decision.as_str()).expect("string write");
    if args.trace {
        let trace = run(&model, &args.word).map_err(|e| usage(e.to_string()))?;
        for e in &model.metadata().ledger {
            let column: Vec<String> = trace.output.iter().map(|v| v[e.coord].to_string()).collect();
            writeln!(text, "{} [layer {}, coord {}]: {}", e.formula, e.layer, e.coord, column.join(" ")).expect("string write");
        }
    }
    write_out(None, &text, stdout)?;
    Ok(if decision.is_accept() { 0 } else { 1 })
}

fn cmd_check(args: CheckArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32, Failure> {
    let sigma = alphabet(&args.alphabet)?;
    let phi = formula(&args.formula, &sigma)?;
    let model = match &args.model {
        Some(p) => load_model(p)?,
        None => compile_with(&phi, &sigma, &compile_options(&args.precision)?).map_err(|e| usage(e.to_string()))?,
    };
    if model.alphabet() != &sigma {
        return Err(usage(format!("model alphabet {} differs from {}", model.alphabet().as_string(), sigma.as_string())));
    }
    let max_len = args.max_len.unwrap_or(if sigma.len() <= 2 { 8 } else { 6 });
    if max_len == 0 {
        return Err(usage("--max-len must be at least 1"));
    }
    let opts = CheckOptions { min_len: args.min_len.max(1), max_len, workers: args.workers, robust: args.robust };
    let report = check_model(&model, &phi, &opts);
    write_out(args.out.as_ref(), &report.to_jsonl(), stdout)?;
    let _ = writeln!(
        stderr,
        "{}: {} words, {} mismatches",
        if report.equivalent() { "equivalent" } else { "not equivalent" },
        report.words,
        report.mismatches()
    );
    Ok(if report.equivalent() { 0 } else { 1 })
}

/// Parses, adding every letter the formula mentions when no alphabet is given.
fn oracle_formula(text: &str, word: &str) -> Result<Formula, Failure> {
    let mut letters: Vec<char> = Vec::new();
    for c in word.chars() {
        if !letters.contains(&c) {
            letters.push(c);
        }
    }
    loop {
        let sigma = Alphabet::new(letters.iter().copied()).map_err(|e| usage(format!("alphabet: {e}")))?;
        match parse_formula(text, &sigma) {
            Err(ParseError::UnknownSymbol { symbol, .. }) if !letters.contains(&symbol) => letters.push(symbol),
            Ok(f) => return Ok(f),
            Err(_) => return formula(text, &sigma),
        }
    }
}

fn cmd_oracle(args: OracleArgs, stdout: &mut dyn Write) -> Result<i32, Failure> {
    if args.word.is_empty() {
        return Err(usage("words must be non-empty"));
    }
    let phi = match &args.alphabet {
        Some(a) => {
            let sigma = alphabet(a)?;
            if let Some(c) = args.word.chars().find(|c| !sigma.contains(*c)) {
                return Err(usage(format!("symbol {c:?} is not in the alphabet")));
            }
            formula(&args.formula, &sigma)?
        }
        None => oracle_formula(&args.formula, &args.word)?,
    };
    let column = logic::trace(&phi, &args.word).map_err(|e| usage(e.to_string()))?;
    let decision = column[0];
    let text = format!("{}\ntrace: {}\n", if decision { "accept" } else { "reject" }, bits(&column));
    write_out(None, &text, stdout)?;
    Ok(if decision { 0 } else { 1 })
}

fn json_arg(s: &str) -> Result<Json, Failure> {
    let text = if s.trim_start().starts_with('{') { s.to_string() } else { read_text(&PathBuf::from(s))? };
    serde_json::from_str(&text).map_err(|e| usage(format!("document: {e}")))
}

fn vector(s: &str) -> Result<Vec<u64>, Failure> {
    s.split(',').map(|x| x.trim().parse().map_err(|_| usage(format!("bad vector {s:?}")))).collect()
}

/// Letters used for coordinates, and display names when none were given.
fn coordinate_letters(d: usize, given: Option<&str>) -> Result<(Alphabet, Option<Vec<String>>), Failure> {
    match given {
        Some(a) => {
            let sigma = alphabet(a)?;
            if sigma.len() != d {
                return Err(usage(format!("alphabet has {} letters but the set has dimension {d}", sigma.len())));
            }
            Ok((sigma, None))
        }
        None => {
            let letters: Vec<char> = ('a'..='z').take(d).collect();
            if letters.len() < d {
                return Err(usage("give an alphabet for dimensions above 26"));
            }
            let sigma = Alphabet::new(letters).map_err(|e| usage(e.to_string()))?;
            Ok((sigma, Some((1..=d).map(|k| format!("a{k}")).collect())))
        }
    }
}

fn linear_set(args: &SetArgs) -> Result<LinearSet, Failure> {
    if let Some(s) = &args.set {
        return linear_from_json(&json_arg(s)?).map_err(|e| usage(e.0));
    }
    let base = vector(args.base.as_deref().ok_or_else(|| usage("give --set or --base"))?)?;
    let periods = args.period.iter().map(|p| vector(p)).collect::<Result<Vec<_>, _>>()?;
    LinearSet::new(base, periods).map_err(|e| usage(e.to_string()))
}

fn cmd_parikh(cmd: ParikhCommand, stdout: &mut dyn Write) -> Result<i32, Failure> {
    match cmd {
        ParikhCommand::Witness(args) => {
            let s = linear_set(&args)?;
            let (sigma, names) = coordinate_letters(s.dim(), args.alphabet.as_deref())?;
            let w = witness_language(&s, &sigma).map_err(|e| usage(e.to_string()))?;
            write_out(None, &format!("{}\n", w.pattern(names.as_deref())), stdout)?;
            Ok(0)
        }
        ParikhCommand::Image { set, formula: f, max_total } => {
            let image = match f {
                Some(text) => {
                    let sigma = alphabet(set.alphabet.as_deref().ok_or_else(|| usage("--formula needs --alphabet"))?)?;
                    let phi = formula(&text, &sigma)?;
                    parikh_image(&|w: &str| !w.is_empty() && logic::accepts(&phi, w).unwrap_or(false), &sigma, max_total)
                }
                None => {
                    let s = linear_set(&set)?;
                    let (sigma, _) = coordinate_letters(s.dim(), set.alphabet.as_deref())?;
                    let w = witness_language(&s, &sigma).map_err(|e| usage(e.to_string()))?;
                    parikh_image(&|x: &str| w.contains(x), &sigma, max_total)
                }
            };
            let mut text = String::new();
            for v in image {
                let parts: Vec<String> = v.iter().map(u64::to_string).collect();
                writeln!(text, "({})", parts.join(",")).expect("string write");
            }
            write_out(None, &text, stdout)?;
            Ok(0)
        }
        ParikhCommand::PermFormula { constraint, equal, alphabet: a } => {
            let c: CountingConstraint = match (constraint, equal) {
                (Some(doc), _) => constraint_from_json(&json_arg(&doc)?).map_err(|e| usage(e.0))?,
                (None, Some(letters)) => equal_counts(&letters.chars().collect::<Vec<_>>()),
                (None, None) => return Err(usage("give --constraint or --equal")),
            };
            let sigma = match a {
                Some(a) => alphabet(&a)?,
                None => {
                    let mut letters = Vec::new();
                    collect_letters(&c, &mut letters);
                    Alphabet::new(letters).map_err(|e| usage(e.to_string()))?
                }
            };
            let phi = constraint_to_formula(&c, &sigma).map_err(|e| usage(e.to_string()))?;
            write_out(None, &format!("{phi}\n"), stdout)?;
            Ok(0)
        }
        ParikhCommand::CheckEquiv { set, bound } => {
            let s = linear_set(&set)?;
            let (sigma, _) = coordinate_letters(s.dim(), set.alphabet.as_deref())?;
            let w = witness_language(&s, &sigma).map_err(|e| usage(e.to_string()))?;
            let image = parikh_image(&|x: &str| w.contains(x), &sigma, bound);
            let expected = boxed_members(&s, bound);
            let ok = image == expected;
            let text = format!(
                "{}: image {} vectors, set {} vectors within total {bound}\n",
                if ok { "pass" } else { "fail" },
                image.len(),
                expected.len()
            );
            write_out(None, &text, stdout)?;
            Ok(if ok { 0 } else { 1 })
        }
    }
}

fn collect_letters(c: &CountingConstraint, out: &mut Vec<char>) {
    let mut add = |x: char| {
        if !out.contains(&x) {
            out.push(x)
        }
    };
    match c {
        CountingConstraint::Ineq { coefs, .. } => coefs.iter().for_each(|(x, _)| add(*x)),
        CountingConstraint::Cong { letter, .. } => add(*letter),
        CountingConstraint::And(cs) | CountingConstraint::Or(cs) => cs.iter().for_each(|c| collect_letters(c, out)),
        CountingConstraint::Not(c) => collect_letters(c, out),
    }
}

/// Members of `s` with coordinate sum at most `bound`.
pub fn boxed_members(s: &LinearSet, bound: usize) -> std::collections::BTreeSet<Vec<u64>> {
    let mut out = std::collections::BTreeSet::new();
    let mut v = vec![0u64; s.dim()];
    fn rec(k: usize, left: u64, v: &mut Vec<u64>, s: &LinearSet, out: &mut std::collections::BTreeSet<Vec<u64>>) {
        if k == v.len() {
            if linear_member(v, s) {
                out.insert(v.clone());
            }
            return;
        }
        for x in 0..=left {
            v[k] = x;
            rec(k + 1, left - x, v, s, out);
        }
        v[k] = 0;
    }
    rec(0, bound as u64, &mut v, s, &mut out);
    out
}

/// Runs the CLI on `args` (program name first) and returns the exit code.
pub fn main_with(args: impl IntoIterator<Item = String>, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(stderr, "{e}");
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let result = match cli.command {
        Command::Compile(a) => cmd_compile(a, stdout, stderr),
        Command::Run(a) => cmd_run(a, stdout),
        Command::Check(a) => cmd_check(a, stdout, stderr),
        Command::Oracle(a) => cmd_oracle(a, stdout),
        Command::Parikh(c) => cmd_parikh(c, stdout),
    };
    match result {
        Ok(code) => code,
        Err(Failure(code, msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            code
        }
    }
}
