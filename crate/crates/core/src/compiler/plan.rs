use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use super::roles;
use crate::logic::{Alphabet, CountTerm, Direction, Formula, UnaryPredicate};
use crate::numeric::{PrecisionPolicy, Rational};
use crate::runtime::{
    AffineMap, AttentionLayer, EncoderModel, Layer, LedgerEntry, ModelMetadata, PositionalComponent, RuntimeError,
    Selector,
};

/// Affine expression over existing coordinates.
#[derive(Clone, Debug, Default)]
struct Expr {
    terms: Vec<(usize, Rational)>,
    constant: Rational,
}

impl Expr {
    fn var(c: usize) -> Self {
        Expr { terms: vec![(c, Rational::one())], constant: Rational::zero() }
    }

    fn lit(k: i64) -> Self {
        Expr { terms: Vec::new(), constant: Rational::from_int(k) }
    }

    fn scale(mut self, k: &Rational) -> Self {
        for t in &mut self.terms {
            t.1 = &t.1 * k;
        }
        self.constant = &self.constant * k;
        self
    }

    fn times(self, k: i64) -> Self {
        self.scale(&Rational::from_int(k))
    }

    fn plus(mut self, o: Expr) -> Self {
        self.terms.extend(o.terms);
        self.constant = &self.constant + &o.constant;
        self
    }

    fn minus(self, o: Expr) -> Self {
        self.plus(o.times(-1))
    }

    fn entries(&self, row: usize) -> impl Iterator<Item = (usize, usize, Rational)> + '_ {
        self.terms.iter().map(move |(c, v)| (row, *c, v.clone()))
    }
}

fn var(c: usize) -> Expr {
    Expr::var(c)
}

/// Compilation state: coordinate ledger, allocator and emitted layers.
#[derive(Debug)]
pub struct GadgetPlan {
    alphabet: Alphabet,
    positional: Vec<PositionalComponent>,
    width: usize,
    layers: Vec<Layer>,
    roles: Vec<String>,
    ledger: Vec<LedgerEntry>,
    by_text: BTreeMap<String, usize>,
    last_index: Option<usize>,
    left_counts: BTreeMap<String, (usize, usize)>,
    right_counts: BTreeMap<String, usize>,
}

impl GadgetPlan {
    pub fn new(alphabet: &Alphabet, positional: Vec<PositionalComponent>) -> Self {
        GadgetPlan {
            width: alphabet.len() + positional.len(),
            alphabet: alphabet.clone(),
            positional,
            layers: Vec::new(),
            roles: Vec::new(),
            ledger: Vec::new(),
            by_text: BTreeMap::new(),
            last_index: None,
            left_counts: BTreeMap::new(),
            right_counts: BTreeMap::new(),
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn layer_count(&self) -> usize {
        self.layers.len()
    }

    pub fn ledger(&self) -> &[LedgerEntry] {
        &self.ledger
    }

    fn pos(&self, c: &PositionalComponent) -> usize {
        let k = self
            .positional
            .iter()
            .position(|p| p == c)
            .unwrap_or_else(|| panic!("positional component {c} was not declared"));
        self.alphabet.len() + k
    }

    fn identity_entries(&self) -> impl Iterator<Item = (usize, usize, Rational)> {
        (0..self.width).map(|r| (r, r, Rational::one()))
    }

    fn push(&mut self, layer: Layer, role: &str, new_width: usize) {
        self.layers.push(layer);
        self.roles.push(role.to_string());
        self.width = new_width;
    }

    /// Pointwise affine layer: attention with constant scores whose output ignores the attended vector.
    fn stage(&mut self, exprs: Vec<Expr>) -> Vec<usize> {
        let d = self.width;
        let m = exprs.len();
        let mut triples: Vec<_> = self.identity_entries().collect();
        let mut bias = vec![Rational::zero(); d];
        for (k, e) in exprs.iter().enumerate() {
            triples.extend(e.entries(d + k));
            bias.push(e.constant.clone());
        }
        let c = AffineMap::from_entries(d + m, 2 * d, triples, bias).expect("stage map");
        let layer = AttentionLayer {
            a: AffineMap::zero(d, d),
            b: AffineMap::zero(d, d),
            c,
            selector: Selector::Unique,
            masked: false,
        };
        self.push(Layer::Attention(layer), roles::AFFINE, d + m);
        (d..d + m).collect()
    }

    fn stage1(&mut self, e: Expr) -> usize {
        self.stage(vec![e])[0]
    }

    fn relu(&mut self, coord: usize) {
        let w = self.width;
        self.push(Layer::Relu { coord: coord + 1 }, roles::RELU, w);
    }

    /// Attention layer with score `Σₖ qₖ(vᵢ)·kₖ(vⱼ)` appending the attended `pulls`.
    fn attend(
        &mut self,
        pairs: Vec<(Expr, Expr)>,
        pulls: &[usize],
        selector: Selector,
        masked: bool,
        role: &str,
    ) -> Vec<usize> {
        let d = self.width;
        assert!(pairs.len() <= d, "score needs {} rows but width is {d}", pairs.len());
        let mut qa = Vec::new();
        let mut qb = vec![Rational::zero(); d];
        let mut ka = Vec::new();
        let mut kb = vec![Rational::zero(); d];
        for (k, (q, key)) in pairs.iter().enumerate() {
            qa.extend(q.entries(k));
            qb[k] = q.constant.clone();
            ka.extend(key.entries(k));
            kb[k] = key.constant.clone();
        }
        let a = AffineMap::from_entries(d, d, qa, qb).expect("query map");
        let b = AffineMap::from_entries(d, d, ka, kb).expect("key map");
        let m = pulls.len();
        let mut triples: Vec<_> = self.identity_entries().collect();
        triples.extend(pulls.iter().enumerate().map(|(k, &p)| (d + k, d + p, Rational::one())));
        let c = AffineMap::from_entries(d + m, 2 * d, triples, vec![Rational::zero(); d + m]).expect("pull map");
        self.push(Layer::Attention(AttentionLayer { a, b, c, selector, masked }), role, d + m);
        (d..d + m).collect()
    }

    fn record(&mut self, text: String, coord: usize) {
        self.ledger.push(LedgerEntry { formula: text.clone(), coord, layer: self.layers.len() });
        self.by_text.insert(text, coord);
    }

    /// Coordinate holding the truth value of `phi`, emitting gadgets as needed.
    pub fn formula(&mut self, phi: &Formula) -> usize {
        let key = phi.to_string();
        if let Some(&c) = self.by_text.get(&key) {
            return c;
        }
        let coord = match phi {
            Formula::Atom(c) => self.alphabet.index_of(*c).expect("symbol checked before planning"),
            Formula::True => self.stage1(Expr::lit(1)),
            Formula::Pred(p) => self.pos(&PositionalComponent::Pred(p.clone())),
            Formula::Not(a) => {
                let x = self.formula(a);
                self.stage1(Expr::lit(1).minus(var(x)))
            }
            Formula::Or(a, b) => {
                let (x, y) = (self.formula(a), self.formula(b));
                self.or(var(x), var(y))
            }
            Formula::And(a, b) => {
                let (x, y) = (self.formula(a), self.formula(b));
                self.and(x, y)
            }
            Formula::Next(a) => {
                let x = self.formula(a);
                self.next(x)
            }
            Formula::Until(a, b) => {
                let (x, y) = (self.formula(a), self.formula(b));
                self.until(x, y)
            }
            Formula::PredOfCount(p, dir, a) => {
                let c = self.count(*dir, a);
                self.pred_of_count(p, c)
            }
            Formula::LinIneq(terms) => self.lin_ineq(terms),
        };
        self.record(key, coord);
        coord
    }

    /// `max(X, Y) = max(0, X − Y) + Y`.
    fn or(&mut self, x: Expr, y: Expr) -> usize {
        let s = self.stage1(x.times(2).minus(y.clone().times(2)));
        self.relu(s);
        self.stage1(var(s).scale(&Rational::new(1, 2)).plus(y))
    }

    /// `min(x, y) = y − max(0, y − x)`.
    fn and(&mut self, x: usize, y: usize) -> usize {
        let s = self.stage1(var(y).minus(var(x)));
        self.relu(s);
        self.stage1(var(y).minus(var(s)))
    }

    fn broadcast_last(&mut self, coords: &[usize]) -> Vec<usize> {
        let inv = self.pos(&PositionalComponent::InvIndex);
        self.attend(vec![(var(inv).times(-1), var(inv))], coords, Selector::Unique, false, roles::BROADCAST)
    }

    /// `n − 1` at every position.
    fn last_index(&mut self) -> usize {
        if let Some(c) = self.last_index {
            return c;
        }
        let index = self.pos(&PositionalComponent::Index);
        let c = self.broadcast_last(&[index])[0];
        self.last_index = Some(c);
        c
    }

    /// `xᵢ − max(0, xᵢ + i − (n − 1))`.
    fn zero_last(&mut self, x: usize) -> usize {
        let last = self.last_index();
        let index = self.pos(&PositionalComponent::Index);
        let s = self.stage1(var(x).plus(var(index)).minus(var(last)));
        self.relu(s);
        self.stage1(var(x).minus(var(s)))
    }

    fn next(&mut self, x: usize) -> usize {
        let cos = self.pos(&PositionalComponent::CosGeo);
        let sin = self.pos(&PositionalComponent::SinGeo);
        let alt = self.pos(&PositionalComponent::AltSign);
        let pairs = vec![(var(cos), var(cos)), (var(sin), var(sin)), (var(alt).times(-10), var(alt))];
        let pulled = self.attend(pairs, &[x], Selector::Unique, false, roles::NEXT)[0];
        self.zero_last(pulled)
    }

    fn until(&mut self, x: usize, y: usize) -> usize {
        let x_trunc = self.zero_last(x);
        let chi = self.or(Expr::lit(1).minus(var(x_trunc)), var(y));
        let cos = self.pos(&PositionalComponent::CosGeo);
        let sin = self.pos(&PositionalComponent::SinGeo);
        let pairs = vec![(var(cos), var(cos)), (var(sin), var(sin)), (Expr::lit(1), var(chi).times(10).minus(Expr::lit(10)))];
        self.attend(pairs, &[y], Selector::Unique, false, roles::UNTIL)[0]
    }

    fn prefix_mean(&mut self, x: usize) -> usize {
        self.attend(Vec::new(), &[x], Selector::Average, true, roles::PREFIX_MEAN)[0]
    }

    /// `(dᵢ, #←φ(w, i))` with `dᵢ = #←φ(w, i) − φᵢ`.
    fn count_left(&mut self, phi: &Formula) -> (usize, usize) {
        let key = phi.to_string();
        if let Some(&pair) = self.left_counts.get(&key) {
            return pair;
        }
        let x = self.formula(phi);
        let index = self.pos(&PositionalComponent::Index);
        let index_sq = self.pos(&PositionalComponent::IndexSquared);
        let inv = self.pos(&PositionalComponent::InvIndex);
        let y = self.prefix_mean(x);
        let s = self.stage1(var(x).minus(var(inv)));
        self.relu(s);
        let z = self.stage1(var(y).minus(var(x)).plus(var(s)));
        let pairs = vec![(var(z).times(2), var(index)), (var(inv).times(-1), var(index_sq))];
        let d = self.attend(pairs, &[index], Selector::Unique, false, roles::COUNT)[0];
        let cl = self.stage1(var(d).plus(var(x)));
        self.left_counts.insert(key, (d, cl));
        (d, cl)
    }

    fn count(&mut self, dir: Direction, phi: &Formula) -> usize {
        let index = self.pos(&PositionalComponent::Index);
        if *phi == Formula::True {
            self.formula(phi);
        }
        match (dir, phi) {
            (Direction::Left, Formula::True) => self.stage1(var(index).plus(Expr::lit(1))),
            (Direction::Right, Formula::True) => {
                let last = self.last_index();
                self.stage1(var(last).minus(var(index)).plus(Expr::lit(1)))
            }
            (Direction::Left, _) => self.count_left(phi).1,
            (Direction::Right, _) => {
                let key = phi.to_string();
                if let Some(&c) = self.right_counts.get(&key) {
                    return c;
                }
                let (d, cl) = self.count_left(phi);
                let total = self.broadcast_last(&[cl])[0];
                let c = self.stage1(var(total).minus(var(d)));
                self.right_counts.insert(key, c);
                c
            }
        }
    }

    /// `θₙ(c)` for a count `c ∈ {0..n}`.
    fn pred_of_count(&mut self, p: &UnaryPredicate, c: usize) -> usize {
        let index = self.pos(&PositionalComponent::Index);
        let index_sq = self.pos(&PositionalComponent::IndexSquared);
        let theta = self.pos(&PositionalComponent::Pred(p.clone()));
        let theta_n = self.pos(&PositionalComponent::PredAtN(p.clone()));
        let pairs = vec![(var(c).times(2), var(index)), (Expr::lit(-1), var(index_sq))];
        let pulled = self.attend(pairs, &[theta], Selector::Unique, false, roles::PRED_OF_COUNT)[0];
        let last = self.last_index();
        // u⁺ = 1 − 𝕀{c ≤ n − 1}
        let u = self.stage1(var(c).minus(var(last)));
        self.relu(u);
        let branches = self.stage(vec![var(pulled).minus(var(u)), var(theta_n).minus(Expr::lit(1)).plus(var(u))]);
        self.relu(branches[0]);
        self.relu(branches[1]);
        self.stage1(var(branches[0]).plus(var(branches[1])))
    }

    /// `max(min(0, l) + 1, 0)` for the integer `l = Σ cₖ·countₖ`.
    fn lin_ineq(&mut self, terms: &[CountTerm]) -> usize {
        let mut l = Expr::lit(0);
        for t in terms {
            let c = self.count(t.direction, &t.formula);
            l = l.plus(var(c).times(t.coef));
        }
        let lc = self.stage(vec![l.clone(), l]);
        self.relu(lc[1]);
        let t = self.stage1(var(lc[0]).minus(var(lc[1])).plus(Expr::lit(1)));
        self.relu(t);
        t
    }

    /// Appends `2·root − 1` and assembles the model accepting on its sign.
    pub fn finish(mut self, root: usize, source: String, precision: PrecisionPolicy) -> Result<EncoderModel, RuntimeError> {
        let acc = self.stage1(var(root).times(2).minus(Expr::lit(1)));
        let mut acceptance = vec![Rational::zero(); self.width];
        acceptance[acc] = Rational::one();
        let metadata = ModelMetadata { source, ledger: self.ledger, layer_roles: self.roles };
        EncoderModel::new(self.alphabet, self.positional, self.layers, acceptance, precision, metadata)
    }
}
