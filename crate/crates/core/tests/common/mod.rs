#![allow(dead_code)]

use hac_core::logic::{CountTerm, Direction, Formula, UnaryPredicate};
use proptest::prelude::*;

fn leaf(letters: &'static [char]) -> BoxedStrategy<Formula> {
    prop_oneof![
        4 => proptest::sample::select(letters).prop_map(Formula::Atom),
        1 => Just(Formula::True),
        1 => Just(Formula::Pred(UnaryPredicate::Even)),
    ]
    .boxed()
}

/// Random LTL(Mon) formulas over `letters`.
pub fn mon_formula(letters: &'static [char], depth: u32) -> BoxedStrategy<Formula> {
    leaf(letters)
        .prop_recursive(depth, 24, 2, |inner| {
            prop_oneof![
                inner.clone().prop_map(Formula::not),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| a.and(b)),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| a.or(b)),
                inner.clone().prop_map(Formula::next),
                (inner.clone(), inner).prop_map(|(a, b)| a.until(b)),
            ]
        })
        .boxed()
}

fn direction() -> impl Strategy<Value = Direction> {
    prop_oneof![Just(Direction::Left), Just(Direction::Right)]
}

/// Random LTL(C,+) formulas: Boolean and counting layers over Mon subformulas.
pub fn cplus_formula(letters: &'static [char], depth: u32) -> BoxedStrategy<Formula> {
    let base = mon_formula(letters, 1);
    let pred = prop_oneof![
        Just(UnaryPredicate::Even),
        (2u64..4).prop_flat_map(|m| (Just(m), 0..m)).prop_map(|(m, r)| UnaryPredicate::modulo(m, r).unwrap()),
        (0u64..4).prop_map(UnaryPredicate::Geq),
    ];
    let counting = prop_oneof![
        (pred, direction(), base.clone()).prop_map(|(p, d, f)| Formula::pred_of_count(p, d, f)),
        proptest::collection::vec((-3i64..=3, direction(), base.clone()), 1..4)
            .prop_map(|ts| Formula::LinIneq(ts.into_iter().map(|(c, d, f)| CountTerm::new(c, d, f)).collect())),
    ];
    counting
        .prop_recursive(depth, 16, 2, |inner| {
            prop_oneof![
                inner.clone().prop_map(Formula::not),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| a.and(b)),
                (inner.clone(), inner).prop_map(|(a, b)| a.or(b)),
            ]
        })
        .boxed()
}

pub fn any_formula(letters: &'static [char]) -> BoxedStrategy<Formula> {
    prop_oneof![mon_formula(letters, 3), cplus_formula(letters, 2)].boxed()
}
