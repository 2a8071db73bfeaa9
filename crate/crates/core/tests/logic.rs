mod common;

use hac_core::logic::{
    accepts, classify, count_left, count_right, eval_at, parse_formula, parse_formula_with, trace, Alphabet, CountTerm,
    Direction, Formula, Fragment, ParseError, PredicateRegistry, TablePredicate, UnaryPredicate,
};
use proptest::prelude::*;

fn ab() -> Alphabet {
    Alphabet::from_str("ab").unwrap()
}

fn parse(s: &str) -> Formula {
    parse_formula(s, &ab()).unwrap()
}

#[test]
fn grammar_examples() {
    let (a, b) = (Formula::Atom('a'), Formula::Atom('b'));
    assert_eq!(parse("a U b"), a.clone().until(b.clone()));
    assert_eq!(parse("X (a & !b)"), a.clone().and(b.clone().not()).next());
    assert_eq!(
        parse("[2*<-#a - 1*->#true >= 0]"),
        Formula::LinIneq(vec![
            CountTerm::new(2, Direction::Left, a.clone()),
            CountTerm::new(-1, Direction::Right, Formula::True)
        ])
    );
    assert_eq!(parse("F a"), a.clone().eventually());
    assert_eq!(parse("G a"), Formula::True.until(a.not()).not());
}

#[test]
fn parse_errors_carry_positions() {
    assert!(matches!(parse_formula("a & c", &ab()), Err(ParseError::UnknownSymbol { symbol: 'c', pos: 4 })));
    assert_eq!(parse_formula("a &", &ab()).unwrap_err().position(), 3);
    assert!(matches!(parse_formula("@nope", &ab()), Err(ParseError::UnknownPredicate { .. })));
    assert!(matches!(parse_formula("@mod(2,5)", &ab()), Err(ParseError::Predicate { .. })));
    assert!(parse_formula("[1*->#a >=", &ab()).is_err());
}

#[test]
fn table_predicates_come_from_a_registry() {
    let t = TablePredicate::new("ends", vec![vec![true, false], vec![false, true, false]]).unwrap();
    let mut reg = PredicateRegistry::new();
    reg.register_table(t);
    let phi = parse_formula_with("@table(ends) & a", &ab(), &reg).unwrap();
    assert_eq!(trace(&phi, "ab").unwrap(), [false, false]);
    assert_eq!(trace(&phi, "ba").unwrap(), [false, true]);
    assert!(trace(&phi, "aaa").is_err());
}

#[test]
fn semantics_examples() {
    assert!(eval_at(&parse("a U b"), "aab", 0).unwrap());
    assert!(!eval_at(&parse("X a"), "ba", 1).unwrap());
    assert!(eval_at(&parse("@even(->#a)"), "abab", 0).unwrap());
    assert_eq!(count_left(&parse("a"), "aba", 1).unwrap(), 1);
    assert_eq!(count_right(&parse("a"), "aba", 1).unwrap(), 1);
    for n in 1..6 {
        assert_eq!(count_left(&Formula::True, &"b".repeat(n), n - 1).unwrap(), n);
    }
    let maj = parse("[2*->#a - 1*->#true - 1*<-#true >= 0]");
    assert!(accepts(&maj, "aab").unwrap());
    assert!(!accepts(&maj, "abb").unwrap());
    assert_eq!(trace(&parse("X b"), "ab").unwrap(), [true, false]);
    assert_eq!(trace(&Formula::Pred(UnaryPredicate::Even), "bbb").unwrap(), [true, false, true]);
}

#[test]
fn fragments() {
    assert_eq!(classify(&parse("a U b")), Fragment::Mon);
    assert_eq!(classify(&parse("@even(->#a)")), Fragment::CPlus);
    assert_eq!(classify(&parse("@even & [1*<-#a >= 0]")), Fragment::CPlus);
}

fn brute_until(x: &[bool], y: &[bool], i: usize) -> bool {
    (i..x.len()).any(|j| y[j] && (i..j).all(|k| x[k]))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn printing_then_parsing_is_identity(phi in common::any_formula(&['a', 'b'])) {
        let text = phi.to_string();
        prop_assert_eq!(parse_formula(&text, &ab()).unwrap(), phi);
    }

    #[test]
    fn eventually_and_globally(phi in common::mon_formula(&['a', 'b'], 2), w in "[ab]{1,7}") {
        let col = trace(&phi, &w).unwrap();
        let f = trace(&phi.clone().eventually(), &w).unwrap();
        let g = trace(&phi.clone().globally(), &w).unwrap();
        for i in 0..w.len() {
            prop_assert_eq!(f[i], col[i..].iter().any(|&b| b));
            prop_assert_eq!(g[i], col[i..].iter().all(|&b| b));
        }
    }

    #[test]
    fn until_matches_its_definition(
        x in common::mon_formula(&['a', 'b'], 1),
        y in common::mon_formula(&['a', 'b'], 1),
        w in "[ab]{1,7}",
    ) {
        let (cx, cy) = (trace(&x, &w).unwrap(), trace(&y, &w).unwrap());
        let u = trace(&x.until(y), &w).unwrap();
        for (i, &got) in u.iter().enumerate() {
            prop_assert_eq!(got, brute_until(&cx, &cy, i));
        }
    }

    #[test]
    fn counts_are_complementary(phi in common::mon_formula(&['a', 'b'], 2), w in "[ab]{1,9}") {
        let col = trace(&phi, &w).unwrap();
        let total = col.iter().filter(|&&b| b).count();
        for (i, &here) in col.iter().enumerate() {
            let l = count_left(&phi, &w, i).unwrap();
            let r = count_right(&phi, &w, i).unwrap();
            prop_assert_eq!(l + r, total + here as usize);
        }
    }
}
