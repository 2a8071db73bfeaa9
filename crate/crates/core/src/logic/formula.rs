use alloc::boxed::Box;
use alloc::vec::Vec;
use core::fmt;

use super::UnaryPredicate;

/// Which side a counting term looks at: `<-#φ` counts positions `0..=i`,
/// `->#φ` counts positions `i..n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Direction {
    Left,
    Right,
}

impl Direction {
    pub fn arrow(self) -> &'static str {
        match self {
            Direction::Left => "<-",
            Direction::Right => "->",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CountTerm {
    pub coef: i64,
    pub direction: Direction,
    pub formula: Formula,
}

impl CountTerm {
    pub fn new(coef: i64, direction: Direction, formula: Formula) -> Self {
        CountTerm { coef, direction, formula }
    }
}

/// LTL(Mon) and LTL(C,+) formulas.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Formula {
    Atom(char),
    True,
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Next(Box<Formula>),
    Until(Box<Formula>, Box<Formula>),
    Pred(UnaryPredicate),
    /// `Θ(<-#φ)` or `Θ(->#φ)`.
    PredOfCount(UnaryPredicate, Direction, Box<Formula>),
    /// `Σ cⱼ·#φⱼ ≥ 0`; never empty.
    LinIneq(Vec<CountTerm>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Fragment {
    /// LTL(Mon): compiled to unique hard attention.
    Mon,
    /// LTL(C,+): needs average hard attention.
    CPlus,
}

impl Formula {
    pub fn atom(c: char) -> Self {
        Formula::Atom(c)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(self) -> Self {
        Formula::Not(Box::new(self))
    }

    pub fn and(self, o: Formula) -> Self {
        Formula::And(Box::new(self), Box::new(o))
    }

    pub fn or(self, o: Formula) -> Self {
        Formula::Or(Box::new(self), Box::new(o))
    }

    pub fn next(self) -> Self {
        Formula::Next(Box::new(self))
    }

    pub fn until(self, o: Formula) -> Self {
        Formula::Until(Box::new(self), Box::new(o))
    }

    /// `F φ := true U φ`.
    pub fn eventually(self) -> Self {
        Formula::True.until(self)
    }

    /// `G φ := ¬F¬φ`.
    pub fn globally(self) -> Self {
        self.not().eventually().not()
    }

    pub fn pred_of_count(p: UnaryPredicate, dir: Direction, phi: Formula) -> Self {
        Formula::PredOfCount(p, dir, Box::new(phi))
    }

    /// Direct children, left to right.
    pub fn children(&self) -> Vec<&Formula> {
        match self {
            Formula::Atom(_) | Formula::True | Formula::Pred(_) => Vec::new(),
            Formula::Not(a) | Formula::Next(a) | Formula::PredOfCount(_, _, a) => alloc::vec![&**a],
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Until(a, b) => alloc::vec![&**a, &**b],
            Formula::LinIneq(terms) => terms.iter().map(|t| &t.formula).collect(),
        }
    }

    /// Number of AST nodes (each inequality term counts as one node).
    pub fn size(&self) -> usize {
        1 + self.children().iter().map(|c| c.size()).sum::<usize>()
    }

    /// Every node, children before parents.
    pub fn postorder(&self) -> Vec<&Formula> {
        let mut out = Vec::new();
        fn walk<'a>(f: &'a Formula, out: &mut Vec<&'a Formula>) {
            for c in f.children() {
                walk(c, out);
            }
            out.push(f);
        }
        walk(self, &mut out);
        out
    }

    pub fn any(&self, pred: &dyn Fn(&Formula) -> bool) -> bool {
        pred(self) || self.children().iter().any(|c| c.any(pred))
    }

    pub fn classify(&self) -> Fragment {
        if self.any(&|f| matches!(f, Formula::PredOfCount(..) | Formula::LinIneq(_))) {
            Fragment::CPlus
        } else {
            Fragment::Mon
        }
    }

    fn is_binary(&self) -> bool {
        matches!(self, Formula::And(..) | Formula::Or(..) | Formula::Until(..))
    }
}

struct Operand<'a>(&'a Formula);

impl fmt::Display for Operand<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_binary() {
            write!(f, "({})", self.0)
        } else {
            write!(f, "{}", self.0)
        }
    }
}

/// Concrete syntax accepted by [`parse_formula`](super::parse_formula).
/// Binary operands are always parenthesized, so printing then parsing
/// reproduces the tree.
impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Atom(c) => write!(f, "{c}"),
            Formula::True => f.write_str("true"),
            Formula::Not(a) => write!(f, "!{}", Operand(a)),
            Formula::Next(a) => write!(f, "X {}", Operand(a)),
            Formula::And(a, b) => write!(f, "{} & {}", Operand(a), Operand(b)),
            Formula::Or(a, b) => write!(f, "{} | {}", Operand(a), Operand(b)),
            Formula::Until(a, b) => write!(f, "{} U {}", Operand(a), Operand(b)),
            Formula::Pred(p) => write!(f, "@{p}"),
            Formula::PredOfCount(p, d, a) => write!(f, "@{p}({}#{})", d.arrow(), Operand(a)),
            Formula::LinIneq(terms) => {
                f.write_str("[")?;
                for (k, t) in terms.iter().enumerate() {
                    let mag = t.coef.unsigned_abs();
                    match (k, t.coef < 0) {
                        (0, false) => write!(f, "{mag}")?,
                        (0, true) => write!(f, "-{mag}")?,
                        (_, false) => write!(f, " + {mag}")?,
                        (_, true) => write!(f, " - {mag}")?,
                    }
                    write!(f, "*{}#{}", t.direction.arrow(), Operand(&t.formula))?;
                }
                f.write_str(" >= 0]")
            }
        }
    }
}
