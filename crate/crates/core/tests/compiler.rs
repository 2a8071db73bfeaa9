mod common;

use hac_core::compiler::{compile, compile_with, required_components, roles, CompileError, CompileOptions};
use hac_core::logic::{count_left, count_right, parse_formula, trace, Alphabet, Formula, UnaryPredicate};
use hac_core::numeric::{PrecisionMode, Value};
use hac_core::runtime::{accept, run, EncoderModel, Layer, PositionalComponent, Selector};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn ab() -> Alphabet {
    Alphabet::from_str("ab").unwrap()
}

fn parse(s: &str) -> Formula {
    parse_formula(s, &ab()).unwrap()
}

fn bits(xs: &[i64]) -> Vec<Value> {
    xs.iter().map(|&x| Value::from(x)).collect()
}

fn column(model: &EncoderModel, f: &Formula, word: &str) -> Vec<Value> {
    let c = model.ledger_coord(&f.to_string()).unwrap_or_else(|| panic!("no ledger entry for {f}"));
    run(model, word).unwrap().output.iter().map(|v| v[c].clone()).collect()
}

fn role_layers(model: &EncoderModel, role: &str) -> Vec<usize> {
    model.metadata().layer_roles.iter().enumerate().filter(|(_, r)| *r == role).map(|(k, _)| k).collect()
}

/// Every ledger column equals the oracle trace of its subformula.
fn check_positionwise(phi: &Formula, sigma: &Alphabet, max_len: usize) {
    let model = compile(phi, sigma).unwrap();
    let subs: Vec<(&Formula, usize)> = phi
        .postorder()
        .into_iter()
        .map(|f| (f, model.ledger_coord(&f.to_string()).unwrap_or_else(|| panic!("no ledger entry for {f} in {phi}"))))
        .collect();
    for w in sigma.words_up_to(max_len) {
        let out = run(&model, &w).unwrap().output;
        for (f, c) in &subs {
            let want: Vec<Value> = trace(f, &w).unwrap().iter().map(|&b| Value::from(b as i64)).collect();
            let got: Vec<Value> = out.iter().map(|v| v[*c].clone()).collect();
            assert_eq!(got, want, "{f} on {w:?}");
        }
        assert_eq!(accept(&model, &w).unwrap().is_accept(), trace(phi, &w).unwrap()[0], "{phi} on {w:?}");
    }
}

#[test]
fn regression_pool_is_realized_position_wise() {
    let pool = [
        "a",
        "!a",
        "a | b",
        "a & !b",
        "X a",
        "X X a",
        "a U b",
        "(a U b) U a",
        "F (@even & a)",
        "G a",
        "@midpoint & X b",
        "@mod(2,0)(->#a)",
        "[2*->#a - 1*->#true - 1*<-#true >= 0]",
        "@even(<-#b) | X a",
        "@geq(2)(->#(a U b))",
        "[1*<-#a - 2*->#X b + 1*->#true >= 0] & !@even(<-#true)",
    ];
    for f in pool {
        check_positionwise(&parse(f), &ab(), 6);
    }
    let abc = Alphabet::from_str("abc").unwrap();
    check_positionwise(&parse_formula("(a | c) U (b & X c)", &abc).unwrap(), &abc, 5);
}

#[test]
fn temporal_examples() {
    let m = compile(&parse("X a"), &ab()).unwrap();
    assert_eq!(column(&m, &parse("X a"), "ba"), bits(&[1, 0]));
    assert_eq!(column(&m, &parse("X a"), "a"), bits(&[0]));

    let m = compile(&parse("a U b"), &ab()).unwrap();
    assert_eq!(column(&m, &parse("a U b"), "aab"), bits(&[1, 1, 1]));

    let phi = parse("(a | b) U b");
    let m = compile(&phi, &ab()).unwrap();
    assert_eq!(column(&m, &phi, "ba"), bits(&[1, 0]));
}

#[test]
fn atom_and_predicate_columns() {
    let m = compile(&parse("a & @even"), &ab()).unwrap();
    assert_eq!(column(&m, &parse("a"), "ab"), bits(&[1, 0]));
    assert_eq!(column(&m, &parse("@even"), "aaa"), bits(&[1, 0, 1]));
    let m = compile(&parse("@midpoint"), &ab()).unwrap();
    assert_eq!(column(&m, &parse("@midpoint"), "abab"), bits(&[0, 1, 0, 0]));
}

#[test]
fn boolean_truth_tables() {
    let m = compile(&parse("(a | b) & !(a & b)"), &ab()).unwrap();
    // x = a, y = b over the words a, b
    assert_eq!(column(&m, &parse("a | b"), "ab"), bits(&[1, 1]));
    assert_eq!(column(&m, &parse("a & b"), "ab"), bits(&[0, 0]));
    let m = compile(&parse("a | @geq(9)"), &ab()).unwrap();
    assert_eq!(column(&m, &parse("a | @geq(9)"), "ab"), bits(&[1, 0]));
}

#[test]
fn mon_models_use_only_unique_unmasked_attention() {
    for f in ["a U b", "X (a & !b)", "G a & F (@even & !X true)", "(a U b) U a"] {
        let m = compile(&parse(f), &ab()).unwrap();
        for layer in m.layers() {
            if let Layer::Attention(l) = layer {
                assert_eq!(l.selector, Selector::Unique, "{f}");
                assert!(!l.masked, "{f}");
            }
        }
    }
    let m = compile(&parse("@even(<-#a)"), &ab()).unwrap();
    assert!(m.layers().iter().any(|l| matches!(l, Layer::Attention(a) if a.selector == Selector::Average && a.masked)));
}

#[test]
fn precision_mode_follows_the_positional_encoding() {
    assert_eq!(compile(&parse("a & @even"), &ab()).unwrap().precision().mode, PrecisionMode::ExactRational);
    assert_eq!(compile(&parse("X a"), &ab()).unwrap().precision().mode, PrecisionMode::BigFloat);
    let exact = CompileOptions { mode: Some(PrecisionMode::ExactRational), ..Default::default() };
    assert_eq!(compile_with(&parse("a U b"), &ab(), &exact), Err(CompileError::ExactWithTrig));
    assert_eq!(compile(&Formula::Atom('z'), &ab()), Err(CompileError::UnknownSymbol('z')));
    let m = compile_with(&parse("X a"), &ab(), &CompileOptions { a: Some(9), b: Some(70), ..Default::default() }).unwrap();
    assert_eq!((m.precision().a, m.precision().b), (9, 70));
    let comps = required_components(&parse("@even(->#a)"));
    assert!(comps.contains(&PositionalComponent::IndexSquared));
    assert!(comps.contains(&PositionalComponent::PredAtN(UnaryPredicate::Even)));
    assert!(!comps.iter().any(|c| c.is_trigonometric()));
}

#[test]
fn zero_last_and_broadcast_select_the_last_position() {
    // X runs the zero-last step, which broadcasts the last index
    let m = compile(&parse("X a"), &ab()).unwrap();
    let k = role_layers(&m, roles::BROADCAST);
    assert!(!k.is_empty());
    for n in [1, 5, 32] {
        let t = run(&m, &"a".repeat(n)).unwrap();
        for &k in &k {
            assert!(t.layers[k].selections.iter().all(|s| *s == [n - 1]), "n = {n}");
        }
        let x_next = column(&m, &parse("X a"), &"a".repeat(n));
        assert_eq!(x_next[n - 1], Value::zero());
        assert!(x_next[..n - 1].iter().all(|v| *v == Value::one()));
    }
}

#[test]
fn counts_follow_the_prefix_mean_attention() {
    let m = compile(&parse("@mod(3,1)(<-#a)"), &ab()).unwrap();
    let k = role_layers(&m, roles::COUNT);
    assert_eq!(k.len(), 1);
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    let a = Formula::Atom('a');
    for _ in 0..100 {
        let w: String = (0..20).map(|_| if rng.gen_bool(0.5) { 'a' } else { 'b' }).collect();
        let t = run(&m, &w).unwrap();
        for i in 0..20 {
            let d = count_left(&a, &w, i).unwrap() - (w.as_bytes()[i] == b'a') as usize;
            assert_eq!(t.layers[k[0]].selections[i], [d], "{w} at {i}");
        }
    }
    let m = compile(&parse("@mod(3,1)(<-#a)"), &ab()).unwrap();
    let p = m.layers().iter().zip(&m.metadata().layer_roles).filter(|(_, r)| *r == roles::PREFIX_MEAN).count();
    assert_eq!(p, 1);
}

#[test]
fn right_counts_and_the_n_branch() {
    // φ = true to the right at position 0 is exactly n
    let phi = parse("@even(->#true)");
    let m = compile(&phi, &ab()).unwrap();
    for n in 1..=7 {
        let w = "b".repeat(n);
        let col = column(&m, &phi, &w);
        let want: Vec<Value> = (0..n).map(|i| Value::from(((n - i) % 2 == 0) as i64)).collect();
        assert_eq!(col, want, "n = {n}");
    }

    // counts 0..=n of `a` to the right; position 0 of the all-a word hits c = n
    let phi = parse("@even(->#a)");
    let m = compile(&phi, &ab()).unwrap();
    let k = role_layers(&m, roles::PRED_OF_COUNT);
    let a = Formula::Atom('a');
    for w in ["aaaaa", "babab", "bbbbb", "abbba"] {
        let t = run(&m, w).unwrap();
        for i in 0..5 {
            let c = count_right(&a, w, i).unwrap();
            assert_eq!(t.layers[k[0]].selections[i], [c.min(4)], "{w} at {i}");
        }
        let want: Vec<Value> = trace(&phi, w).unwrap().iter().map(|&b| Value::from(b as i64)).collect();
        assert_eq!(column(&m, &phi, w), want, "{w}");
    }
}

#[test]
fn linear_inequality_boundary() {
    let phi = parse("[1*->#a - 1*->#b >= 0]");
    let m = compile(&phi, &ab()).unwrap();
    assert_eq!(column(&m, &phi, "ab"), bits(&[1, 0]));
    assert_eq!(column(&m, &phi, "abb"), bits(&[0, 0, 0]));
    assert_eq!(column(&m, &phi, "ba"), bits(&[1, 1]));
}

#[test]
fn until_attends_to_the_first_firing_position() {
    let sigma = Alphabet::from_str("abc").unwrap();
    let m = compile(&parse_formula("a U b", &sigma).unwrap(), &sigma).unwrap();
    let k = role_layers(&m, roles::UNTIL);
    assert_eq!(k.len(), 1);
    let mut rng = ChaCha8Rng::seed_from_u64(24);
    for _ in 0..50 {
        let w: String = (0..24).map(|_| ['a', 'b', 'c'][rng.gen_range(0..3)]).collect();
        let t = run(&m, &w).unwrap();
        let s: Vec<char> = w.chars().collect();
        for i in 0..24 {
            // first j ≥ i where a fails or the word ends
            let j = (i..24).find(|&j| s[j] != 'a' || j == 23).unwrap();
            assert_eq!(t.layers[k[0]].selections[i], [j], "{w} at {i}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn size_is_linear_in_the_formula(phi in common::any_formula(&['a', 'b'])) {
        let m = compile(&phi, &ab()).unwrap();
        let s = phi.size();
        prop_assert!(m.layers().len() <= 16 * s + 4, "{} layers for size {}", m.layers().len(), s);
        prop_assert!(m.output_width() <= m.input_width() + 24 * s + 4);
        prop_assert_eq!(m.metadata().layer_roles.len(), m.layers().len());
        for f in phi.postorder() {
            prop_assert!(m.ledger_coord(&f.to_string()).is_some());
        }
    }

    #[test]
    fn random_formulas_match_the_oracle(phi in common::any_formula(&['a', 'b']), w in "[ab]{1,6}") {
        let m = compile(&phi, &ab()).unwrap();
        let out = run(&m, &w).unwrap().output;
        for f in phi.postorder() {
            let c = m.ledger_coord(&f.to_string()).unwrap();
            let want: Vec<Value> = trace(f, &w).unwrap().iter().map(|&b| Value::from(b as i64)).collect();
            let got: Vec<Value> = out.iter().map(|v| v[c].clone()).collect();
            prop_assert_eq!(got, want, "{} on {}", f, w);
        }
    }
}
