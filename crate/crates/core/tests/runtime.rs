use hac_core::compiler::{compile, roles};
use hac_core::logic::{parse_formula, Alphabet, UnaryPredicate};
use hac_core::numeric::{Comparator, PrecisionPolicy, Rational, Value};
use hac_core::runtime::{
    accept, apply_layer, attention_select, embed, robustness_check, run, AffineMap, AttentionLayer, Decision,
    EncoderModel, Layer, ModelMetadata, PositionalComponent, RuntimeError, Selector,
};
use proptest::prelude::*;

fn q(v: i64) -> Rational {
    Rational::from_int(v)
}

fn ab() -> Alphabet {
    Alphabet::from_str("ab").unwrap()
}

/// Model with no layers, used to reach the embedding.
fn bare(positional: Vec<PositionalComponent>, policy: PrecisionPolicy) -> EncoderModel {
    let d = 2 + positional.len();
    let mut t = vec![q(0); d];
    t[0] = q(1);
    t[1] = q(-1);
    EncoderModel::new(ab(), positional, vec![], t, policy, ModelMetadata::default()).unwrap()
}

fn values(xs: &[i64]) -> Vec<Value> {
    xs.iter().map(|&x| Value::from(x)).collect()
}

#[test]
fn embedding_is_one_hot_then_positional() {
    let m = bare(vec![PositionalComponent::Index], PrecisionPolicy::exact());
    assert_eq!(embed(&m, "ba").unwrap(), vec![values(&[0, 1, 0]), values(&[1, 0, 1])]);

    let m = bare(vec![PositionalComponent::InvIndex], PrecisionPolicy::exact());
    assert_eq!(embed(&m, "aaa").unwrap()[2][2], Value::from(Rational::new(1, 3)));

    let m = bare(vec![PositionalComponent::Pred(UnaryPredicate::Even)], PrecisionPolicy::exact());
    let e = embed(&m, "ab").unwrap();
    assert_eq!((e[0][2].clone(), e[1][2].clone()), (Value::one(), Value::zero()));

    assert!(matches!(embed(&m, ""), Err(RuntimeError::EmptyWord)));
    assert!(matches!(embed(&m, "ac"), Err(RuntimeError::UnknownSymbol('c'))));
}

#[test]
fn trigonometric_positions_lie_on_the_unit_circle() {
    for i in 0..40 {
        let c = PositionalComponent::CosGeo.eval(i, 40).unwrap();
        let s = PositionalComponent::SinGeo.eval(i, 40).unwrap();
        assert_eq!(c.mul(&c).add(&s.mul(&s)), Value::one(), "position {i}");
    }
}

fn next_maps() -> (AffineMap, AffineMap) {
    // coordinates: a, b, alt, cos, sin
    let a = AffineMap::from_entries(5, 5, [(3, 3, q(1)), (4, 4, q(1)), (2, 2, q(-10))], vec![q(0); 5]).unwrap();
    let b = AffineMap::from_entries(5, 5, [(3, 3, q(1)), (4, 4, q(1)), (2, 2, q(1))], vec![q(0); 5]).unwrap();
    (a, b)
}

#[test]
fn next_scores_select_the_successor() {
    let positional = vec![PositionalComponent::AltSign, PositionalComponent::CosGeo, PositionalComponent::SinGeo];
    let m = bare(positional, PrecisionPolicy::default());
    let (a, b) = next_maps();
    for n in [3, 8, 17] {
        let seq = embed(&m, &"ab".repeat(n)[..n]).unwrap();
        let mut cmp = Comparator::new(m.precision(), n);
        for i in 0..n - 1 {
            let sel = attention_select(&a, &b, &seq, i, Selector::Unique, false, &mut cmp).unwrap();
            assert_eq!(sel.positions, vec![i + 1], "n = {n}, i = {i}");
        }
    }
}

#[test]
fn ties_follow_the_selector() {
    let m = bare(vec![PositionalComponent::Index], PrecisionPolicy::exact());
    let seq = embed(&m, "abab").unwrap();
    let zero = AffineMap::zero(3, 3);
    let mut cmp = Comparator::new(m.precision(), 4);
    for i in 0..4 {
        let u = attention_select(&zero, &zero, &seq, i, Selector::Unique, false, &mut cmp).unwrap();
        assert_eq!(u.positions, vec![0]);
    }
    let avg = attention_select(&zero, &zero, &seq, 2, Selector::Average, true, &mut cmp).unwrap();
    assert_eq!(avg.positions, vec![0, 1, 2]);
    assert!(matches!(
        attention_select(&zero, &zero, &seq, 4, Selector::Unique, false, &mut cmp),
        Err(RuntimeError::PositionOutOfRange { i: 4, n: 4 })
    ));
}

#[test]
fn relu_clamps_one_coordinate() {
    let mut cmp = Comparator::new(&PrecisionPolicy::exact(), 1);
    let (out, _) = apply_layer(&Layer::Relu { coord: 1 }, vec![values(&[-2, 5])], 0, &mut cmp).unwrap();
    assert_eq!(out, vec![values(&[0, 5])]);
    assert!(matches!(
        apply_layer(&Layer::Relu { coord: 3 }, vec![values(&[-2, 5])], 7, &mut cmp),
        Err(RuntimeError::WidthMismatch { layer: 7, .. })
    ));
}

/// `C(v, a) = v ⊕ a` on width `d`.
fn keep_and_append(d: usize) -> AffineMap {
    AffineMap::from_entries(2 * d, 2 * d, (0..2 * d).map(|k| (k, k, q(1))), vec![q(0); 2 * d]).unwrap()
}

#[test]
fn average_is_the_exact_mean() {
    let layer = Layer::Attention(AttentionLayer {
        a: AffineMap::zero(1, 1),
        b: AffineMap::zero(1, 1),
        c: keep_and_append(1),
        selector: Selector::Average,
        masked: false,
    });
    let mut cmp = Comparator::new(&PrecisionPolicy::exact(), 2);
    let (out, trace) = apply_layer(&layer, vec![values(&[0]), values(&[1])], 0, &mut cmp).unwrap();
    assert_eq!(out[0][1], Value::from(Rational::new(1, 2)));
    assert_eq!(out[1][1], Value::from(Rational::new(1, 2)));
    assert_eq!(trace.selections, vec![vec![0, 1], vec![0, 1]]);
}

#[test]
fn unique_layer_moves_the_successor_payload() {
    let positional = vec![PositionalComponent::AltSign, PositionalComponent::CosGeo, PositionalComponent::SinGeo];
    let m = bare(positional, PrecisionPolicy::default());
    let (a, b) = next_maps();
    let layer = Layer::Attention(AttentionLayer { a, b, c: keep_and_append(5), selector: Selector::Unique, masked: false });
    let word = "aabba";
    let seq = embed(&m, word).unwrap();
    let mut cmp = Comparator::new(m.precision(), word.len());
    let (out, _) = apply_layer(&layer, seq.clone(), 0, &mut cmp).unwrap();
    for i in 0..word.len() - 1 {
        assert_eq!(out[i][5..], seq[i + 1][..], "position {i}");
    }
}

#[test]
fn compiled_atom_decides_first_letter() {
    let m = compile(&parse_formula("a", &ab()).unwrap(), &ab()).unwrap();
    assert_eq!(accept(&m, "a").unwrap(), Decision::Accept);
    assert_eq!(accept(&m, "b").unwrap(), Decision::Reject);
    assert_eq!(accept(&m, "ba").unwrap(), Decision::Reject);
}

#[test]
fn zero_acceptance_vector_is_an_error() {
    let m = compile(&parse_formula("a U b", &ab()).unwrap(), &ab()).unwrap();
    let zero = m.with_acceptance(vec![q(0); m.output_width()]).unwrap();
    for w in ["a", "ab", "bba"] {
        assert!(matches!(accept(&zero, w), Err(RuntimeError::ZeroScore)));
    }
}

#[test]
fn invalid_models_are_rejected() {
    let trig = vec![PositionalComponent::CosGeo];
    assert!(EncoderModel::new(ab(), trig, vec![], vec![q(0); 3], PrecisionPolicy::exact(), Default::default()).is_err());
    assert!(EncoderModel::new(ab(), vec![], vec![], vec![q(1)], PrecisionPolicy::exact(), Default::default()).is_err());
    let bad = vec![Layer::Relu { coord: 0 }];
    assert!(EncoderModel::new(ab(), vec![], bad, vec![q(1); 2], PrecisionPolicy::exact(), Default::default()).is_err());
}

#[test]
fn exact_models_are_trivially_robust() {
    let m = compile(&parse_formula("@mod(2,0)(->#a)", &ab()).unwrap(), &ab()).unwrap();
    for w in ab().words_up_to(5) {
        let r = robustness_check(&m, &w).unwrap();
        assert!(r.unchanged && !r.fragile(), "{w}");
    }
}

#[test]
fn compiled_mon_models_survive_doubled_precision() {
    let m = compile(&parse_formula("(a U b) U X a", &ab()).unwrap(), &ab()).unwrap();
    let mut rng_words = vec!["ab".repeat(16), "a".repeat(32), "b".repeat(31) + "a"];
    rng_words.extend(ab().words_up_to(4));
    for w in &rng_words {
        let r = robustness_check(&m, w).unwrap();
        assert!(r.unchanged, "{w}: {:?}", r.failure);
        assert!(r.doubled_bits == 2 * r.bits);
    }
}

#[test]
fn tiny_gaps_are_reported_as_fragile() {
    let m = bare(vec![PositionalComponent::Index], PrecisionPolicy::default());
    let n = 4;
    let bits = m.precision().bits(n);
    let eps = Rational::pow2_neg(bits + 1);
    // every query scores ε on `a` positions and 0 on `b` positions
    let a = AffineMap::from_entries(3, 3, [], vec![q(1), q(0), q(0)]).unwrap();
    let b = AffineMap::from_entries(3, 3, [(0, 0, eps)], vec![q(0); 3]).unwrap();
    let c = AffineMap::from_entries(3, 6, (0..3).map(|k| (k, k, q(1))), vec![q(0); 3]).unwrap();
    let layer = Layer::Attention(AttentionLayer { a, b, c, selector: Selector::Unique, masked: false });
    let t = vec![q(1), q(-1), q(0)];
    let model =
        EncoderModel::new(ab(), vec![PositionalComponent::Index], vec![layer], t, PrecisionPolicy::default(), Default::default())
            .unwrap();
    let r = robustness_check(&model, "baba").unwrap();
    assert!(r.fragile());
    assert!(r.layers[0].fragile);

    let trace = run(&model, "bbbb").unwrap();
    assert!(!trace.layers[0].fragile, "all-equal scores have no gap");
}

#[test]
fn compiled_next_attends_to_successor() {
    let m = compile(&parse_formula("X a", &ab()).unwrap(), &ab()).unwrap();
    let k = m.metadata().layer_roles.iter().position(|r| r == roles::NEXT).unwrap();
    let t = run(&m, "bab").unwrap();
    assert_eq!(t.layers[k].selections[..2], [vec![1], vec![2]]);
}

proptest! {
    #[test]
    fn relu_is_idempotent(xs in proptest::collection::vec(-50i64..50, 1..6), k in 0usize..6) {
        let k = k % xs.len();
        let layer = Layer::Relu { coord: k + 1 };
        let mut cmp = Comparator::new(&PrecisionPolicy::exact(), 1);
        let (once, _) = apply_layer(&layer, vec![values(&xs)], 0, &mut cmp).unwrap();
        let (twice, _) = apply_layer(&layer, once.clone(), 0, &mut cmp).unwrap();
        prop_assert_eq!(&once, &twice);
        prop_assert_eq!(once[0][k].clone(), Value::from(xs[k].max(0)));
    }

    #[test]
    fn unique_and_average_agree_on_a_single_maximizer(xs in proptest::collection::vec(-20i64..20, 1..8)) {
        // score(i, j) = x_j, so the argmax set is the positions holding the maximum
        let seq: Vec<Vec<Value>> = xs.iter().map(|&x| values(&[1, x])).collect();
        let a = AffineMap::from_entries(2, 2, [], vec![q(0), q(1)]).unwrap();
        let b = AffineMap::from_entries(2, 2, [(1, 1, q(1))], vec![q(0); 2]).unwrap();
        let mut cmp = Comparator::new(&PrecisionPolicy::exact(), xs.len());
        let u = attention_select(&a, &b, &seq, 0, Selector::Unique, false, &mut cmp).unwrap();
        let avg = attention_select(&a, &b, &seq, 0, Selector::Average, false, &mut cmp).unwrap();
        let max = *xs.iter().max().unwrap();
        let argmax: Vec<usize> = (0..xs.len()).filter(|&j| xs[j] == max).collect();
        prop_assert_eq!(&avg.positions, &argmax);
        prop_assert_eq!(u.positions, vec![argmax[0]]);
        if argmax.len() == 1 {
            prop_assert_eq!(avg.positions, vec![argmax[0]]);
        }
    }
}
