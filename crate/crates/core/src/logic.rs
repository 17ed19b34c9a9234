//! Formula representation for equality-free, function-free first-order logic.
//!
//! Formulas are plain trees over atoms, `⊤`, n-ary conjunction and
//! disjunction, negation and (multi-variable) quantifier blocks. Falsity is
//! encoded as `Not(Top)`; implication is surface sugar that the parser
//! expands to `¬(α ∧ ¬β)`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

/// A term: variables and constants only.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(String),
    Const(String),
}

impl Term {
    pub fn var(name: impl Into<String>) -> Self {
        Term::Var(name.into())
    }

    pub fn constant(name: impl Into<String>) -> Self {
        Term::Const(name.into())
    }

    pub fn name(&self) -> &str {
        match self {
            Term::Var(n) | Term::Const(n) => n,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Atom {
    pub relation: String,
    pub args: Vec<Term>,
}

impl Atom {
    pub fn new(relation: impl Into<String>, args: Vec<Term>) -> Self {
        Atom {
            relation: relation.into(),
            args,
        }
    }

    pub fn arity(&self) -> usize {
        self.args.len()
    }

    pub fn is_ground(&self) -> bool {
        self.args.iter().all(|t| matches!(t, Term::Const(_)))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    Atom(Atom),
    Top,
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Not(Box<Formula>),
    Exists(Vec<String>, Box<Formula>),
    Forall(Vec<String>, Box<Formula>),
}

/// Which relation symbols occur under an even/odd number of negations.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Polarity {
    Positive,
    Negative,
}

impl Polarity {
    fn flip(self) -> Self {
        match self {
            Polarity::Positive => Polarity::Negative,
            Polarity::Negative => Polarity::Positive,
        }
    }
}

/// Any non-logical symbol. Relations and constants live in separate
/// namespaces, so the variant is part of the identity.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Symbol {
    Relation(String),
    Constant(String),
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Symbol::Relation(r) => write!(f, "{r}"),
            Symbol::Constant(c) => write!(f, "{c}"),
        }
    }
}

/// Relation symbols with their arities plus constant symbols.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Signature {
    pub relations: BTreeMap<String, usize>,
    pub constants: BTreeSet<String>,
}

impl Signature {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_relation(mut self, name: impl Into<String>, arity: usize) -> Self {
        self.relations.insert(name.into(), arity);
        self
    }

    pub fn with_constant(mut self, name: impl Into<String>) -> Self {
        self.constants.insert(name.into());
        self
    }

    /// Merges `other` into `self`, failing on an arity clash.
    pub fn merge(&mut self, other: &Signature) -> Result<(), LogicError> {
        for (r, &a) in &other.relations {
            match self.relations.get(r) {
                Some(&b) if b != a => {
                    return Err(LogicError::ArityMismatch {
                        relation: r.clone(),
                        expected: b,
                        found: a,
                    })
                }
                _ => {
                    self.relations.insert(r.clone(), a);
                }
            }
        }
        self.constants.extend(other.constants.iter().cloned());
        Ok(())
    }

    pub fn symbols(&self) -> BTreeSet<Symbol> {
        self.relations
            .keys()
            .map(|r| Symbol::Relation(r.clone()))
            .chain(self.constants.iter().map(|c| Symbol::Constant(c.clone())))
            .collect()
    }

    pub fn contains(&self, sym: &Symbol) -> bool {
        match sym {
            Symbol::Relation(r) => self.relations.contains_key(r),
            Symbol::Constant(c) => self.constants.contains(c),
        }
    }
}

/// Everything `signature_of` reports about a formula.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SignatureReport {
    pub relations: BTreeSet<String>,
    pub arities: BTreeMap<String, usize>,
    pub constants: BTreeSet<String>,
    pub relsig_pos: BTreeSet<String>,
    pub relsig_neg: BTreeSet<String>,
    pub free_vars: BTreeSet<String>,
}

impl SignatureReport {
    pub fn signature(&self) -> Signature {
        Signature {
            relations: self.arities.clone(),
            constants: self.constants.clone(),
        }
    }

    pub fn symbols(&self) -> BTreeSet<Symbol> {
        self.signature().symbols()
    }
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum LogicError {
    #[error("relation {relation} used with arity {found}, expected {expected}")]
    ArityMismatch {
        relation: String,
        expected: usize,
        found: usize,
    },
    #[error("quantifier block binds no variables")]
    EmptyQuantifier,
    #[error("quantifier block binds {0} twice")]
    DuplicateBinder(String),
    #[error("{0} has fewer than two operands")]
    DegenerateConnective(&'static str),
    #[error("empty symbol name")]
    EmptyName,
    #[error("variable {0} already occurs in the formula")]
    VariableOccurs(String),
}

impl Formula {
    pub fn atom(relation: impl Into<String>, args: Vec<Term>) -> Self {
        Formula::Atom(Atom::new(relation, args))
    }

    pub fn bottom() -> Self {
        Formula::Not(Box::new(Formula::Top))
    }

    pub fn negate(f: Formula) -> Self {
        Formula::Not(Box::new(f))
    }

    /// Conjunction that collapses the zero- and one-operand cases.
    pub fn and(mut parts: Vec<Formula>) -> Self {
        match parts.len() {
            0 => Formula::Top,
            1 => parts.pop().unwrap(),
            _ => Formula::And(parts),
        }
    }

    /// Disjunction that collapses the zero- and one-operand cases.
    pub fn or(mut parts: Vec<Formula>) -> Self {
        match parts.len() {
            0 => Formula::bottom(),
            1 => parts.pop().unwrap(),
            _ => Formula::Or(parts),
        }
    }

    /// `α → β` as `¬(α ∧ ¬β)`.
    pub fn implies(a: Formula, b: Formula) -> Self {
        Formula::negate(Formula::And(vec![a, Formula::negate(b)]))
    }

    pub fn iff(a: Formula, b: Formula) -> Self {
        Formula::And(vec![
            Formula::implies(a.clone(), b.clone()),
            Formula::implies(b, a),
        ])
    }

    pub fn exists(vars: Vec<String>, body: Formula) -> Self {
        if vars.is_empty() {
            body
        } else {
            Formula::Exists(vars, Box::new(body))
        }
    }

    pub fn forall(vars: Vec<String>, body: Formula) -> Self {
        if vars.is_empty() {
            body
        } else {
            Formula::Forall(vars, Box::new(body))
        }
    }

    pub fn is_bottom(&self) -> bool {
        matches!(self, Formula::Not(b) if **b == Formula::Top)
    }

    /// Literal view: `(atom, positive?)`.
    pub fn as_literal(&self) -> Option<(&Atom, bool)> {
        match self {
            Formula::Atom(a) => Some((a, true)),
            Formula::Not(inner) => match inner.as_ref() {
                Formula::Atom(a) => Some((a, false)),
                _ => None,
            },
            _ => None,
        }
    }

    pub fn is_quantifier_free(&self) -> bool {
        match self {
            Formula::Atom(_) | Formula::Top => true,
            Formula::And(fs) | Formula::Or(fs) => fs.iter().all(Formula::is_quantifier_free),
            Formula::Not(f) => f.is_quantifier_free(),
            Formula::Exists(..) | Formula::Forall(..) => false,
        }
    }

    /// Checks the structural invariants: consistent arities, non-empty and
    /// duplicate-free binders, connectives with at least two operands.
    pub fn check_well_formed(&self) -> Result<(), LogicError> {
        let mut arities = BTreeMap::new();
        self.check_rec(&mut arities)
    }

    fn check_rec(&self, arities: &mut BTreeMap<String, usize>) -> Result<(), LogicError> {
        match self {
            Formula::Atom(a) => {
                if a.relation.is_empty() || a.args.iter().any(|t| t.name().is_empty()) {
                    return Err(LogicError::EmptyName);
                }
                match arities.get(&a.relation) {
                    Some(&n) if n != a.arity() => Err(LogicError::ArityMismatch {
                        relation: a.relation.clone(),
                        expected: n,
                        found: a.arity(),
                    }),
                    _ => {
                        arities.insert(a.relation.clone(), a.arity());
                        Ok(())
                    }
                }
            }
            Formula::Top => Ok(()),
            Formula::And(fs) | Formula::Or(fs) => {
                if fs.len() < 2 {
                    return Err(LogicError::DegenerateConnective(if matches!(
                        self,
                        Formula::And(_)
                    ) {
                        "conjunction"
                    } else {
                        "disjunction"
                    }));
                }
                fs.iter().try_for_each(|f| f.check_rec(arities))
            }
            Formula::Not(f) => f.check_rec(arities),
            Formula::Exists(vs, body) | Formula::Forall(vs, body) => {
                if vs.is_empty() {
                    return Err(LogicError::EmptyQuantifier);
                }
                let mut seen = BTreeSet::new();
                for v in vs {
                    if v.is_empty() {
                        return Err(LogicError::EmptyName);
                    }
                    if !seen.insert(v) {
                        return Err(LogicError::DuplicateBinder(v.clone()));
                    }
                }
                body.check_rec(arities)
            }
        }
    }

    /// Relation arities and constants, failing on inconsistent arities.
    pub fn signature(&self) -> Result<Signature, LogicError> {
        let mut arities = BTreeMap::new();
        self.check_rec(&mut arities).or_else(|e| match e {
            LogicError::ArityMismatch { .. } => Err(e),
            _ => Ok(()),
        })?;
        let mut constants = BTreeSet::new();
        self.visit_terms(&mut |t| {
            if let Term::Const(c) = t {
                constants.insert(c.clone());
            }
        });
        Ok(Signature {
            relations: arities,
            constants,
        })
    }

    pub fn relations(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit_atoms(&mut |a| {
            out.insert(a.relation.clone());
        });
        out
    }

    pub fn constants(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit_terms(&mut |t| {
            if let Term::Const(c) = t {
                out.insert(c.clone());
            }
        });
        out
    }

    pub fn symbols(&self) -> BTreeSet<Symbol> {
        self.relations()
            .into_iter()
            .map(Symbol::Relation)
            .chain(self.constants().into_iter().map(Symbol::Constant))
            .collect()
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        let mut bound = Vec::new();
        self.free_vars_rec(&mut bound, &mut out);
        out
    }

    fn free_vars_rec<'a>(&'a self, bound: &mut Vec<&'a str>, out: &mut BTreeSet<String>) {
        match self {
            Formula::Atom(a) => {
                for t in &a.args {
                    if let Term::Var(v) = t {
                        if !bound.contains(&v.as_str()) {
                            out.insert(v.clone());
                        }
                    }
                }
            }
            Formula::Top => {}
            Formula::And(fs) | Formula::Or(fs) => {
                for f in fs {
                    f.free_vars_rec(bound, out);
                }
            }
            Formula::Not(f) => f.free_vars_rec(bound, out),
            Formula::Exists(vs, body) | Formula::Forall(vs, body) => {
                let n = bound.len();
                bound.extend(vs.iter().map(String::as_str));
                body.free_vars_rec(bound, out);
                bound.truncate(n);
            }
        }
    }

    pub fn is_sentence(&self) -> bool {
        self.free_vars().is_empty()
    }

    /// Every variable name occurring anywhere, bound or free.
    pub fn all_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.all_vars_rec(&mut out);
        out
    }

    fn all_vars_rec(&self, out: &mut BTreeSet<String>) {
        match self {
            Formula::Atom(a) => {
                for t in &a.args {
                    if let Term::Var(v) = t {
                        out.insert(v.clone());
                    }
                }
            }
            Formula::Top => {}
            Formula::And(fs) | Formula::Or(fs) => fs.iter().for_each(|f| f.all_vars_rec(out)),
            Formula::Not(f) => f.all_vars_rec(out),
            Formula::Exists(vs, body) | Formula::Forall(vs, body) => {
                out.extend(vs.iter().cloned());
                body.all_vars_rec(out);
            }
        }
    }

    pub fn visit_atoms<'a>(&'a self, f: &mut impl FnMut(&'a Atom)) {
        match self {
            Formula::Atom(a) => f(a),
            Formula::Top => {}
            Formula::And(fs) | Formula::Or(fs) => fs.iter().for_each(|g| g.visit_atoms(f)),
            Formula::Not(g) => g.visit_atoms(f),
            Formula::Exists(_, g) | Formula::Forall(_, g) => g.visit_atoms(f),
        }
    }

    pub fn visit_terms<'a>(&'a self, f: &mut impl FnMut(&'a Term)) {
        self.visit_atoms(&mut |a| a.args.iter().for_each(&mut *f));
    }

    /// Renames relation symbols through `map`; unmapped names are kept.
    pub fn rename_relations(&self, map: &BTreeMap<String, String>) -> Formula {
        self.map_atoms(&mut |a| {
            let relation = map.get(&a.relation).cloned().unwrap_or_else(|| a.relation.clone());
            Formula::Atom(Atom {
                relation,
                args: a.args.clone(),
            })
        })
    }

    /// Rebuilds the formula with every atom replaced through `f`.
    pub fn map_atoms(&self, f: &mut impl FnMut(&Atom) -> Formula) -> Formula {
        match self {
            Formula::Atom(a) => f(a),
            Formula::Top => Formula::Top,
            Formula::And(fs) => Formula::And(fs.iter().map(|g| g.map_atoms(f)).collect()),
            Formula::Or(fs) => Formula::Or(fs.iter().map(|g| g.map_atoms(f)).collect()),
            Formula::Not(g) => Formula::Not(Box::new(g.map_atoms(f))),
            Formula::Exists(vs, g) => Formula::Exists(vs.clone(), Box::new(g.map_atoms(f))),
            Formula::Forall(vs, g) => Formula::Forall(vs.clone(), Box::new(g.map_atoms(f))),
        }
    }

    /// Number of nodes, counting n-ary connectives as n−1 binary ones and
    /// literals, `⊤` and `⊥` as one.
    pub fn size(&self) -> usize {
        match self {
            Formula::Atom(_) | Formula::Top => 1,
            f if f.is_bottom() => 1,
            Formula::Not(g) => match g.as_ref() {
                Formula::Atom(_) => 1,
                other => 1 + other.size(),
            },
            Formula::And(fs) | Formula::Or(fs) => {
                fs.iter().map(Formula::size).sum::<usize>() + fs.len().saturating_sub(1)
            }
            Formula::Exists(vs, g) | Formula::Forall(vs, g) => vs.len() + g.size(),
        }
    }

    pub fn quantifier_depth(&self) -> usize {
        match self {
            Formula::Atom(_) | Formula::Top => 0,
            Formula::And(fs) | Formula::Or(fs) => {
                fs.iter().map(Formula::quantifier_depth).max().unwrap_or(0)
            }
            Formula::Not(g) => g.quantifier_depth(),
            Formula::Exists(vs, g) | Formula::Forall(vs, g) => vs.len() + g.quantifier_depth(),
        }
    }
}

/// Computes symbols, polarity sets and free variables in one pass.
///
/// Polarity counts negation nodes on the path to an occurrence; quantifiers
/// of either kind leave it unchanged. `⊤` contributes nothing.
pub fn signature_of(phi: &Formula) -> SignatureReport {
    let mut rep = SignatureReport::default();
    polarity_rec(phi, Polarity::Positive, &mut rep);
    rep.free_vars = phi.free_vars();
    rep
}

fn polarity_rec(phi: &Formula, pol: Polarity, rep: &mut SignatureReport) {
    match phi {
        Formula::Atom(a) => {
            rep.relations.insert(a.relation.clone());
            rep.arities.entry(a.relation.clone()).or_insert(a.arity());
            match pol {
                Polarity::Positive => rep.relsig_pos.insert(a.relation.clone()),
                Polarity::Negative => rep.relsig_neg.insert(a.relation.clone()),
            };
            for t in &a.args {
                if let Term::Const(c) = t {
                    rep.constants.insert(c.clone());
                }
            }
        }
        Formula::Top => {}
        Formula::And(fs) | Formula::Or(fs) => fs.iter().for_each(|f| polarity_rec(f, pol, rep)),
        Formula::Not(f) => polarity_rec(f, pol.flip(), rep),
        Formula::Exists(_, f) | Formula::Forall(_, f) => polarity_rec(f, pol, rep),
    }
}

/// Negation normal form. Negations end up only on atoms and on `⊤`;
/// quantifier blocks keep their variable lists.
pub fn to_nnf(phi: &Formula) -> Formula {
    nnf(phi, false)
}

fn nnf(phi: &Formula, negated: bool) -> Formula {
    match (phi, negated) {
        (Formula::Atom(_), false) | (Formula::Top, false) => phi.clone(),
        (Formula::Atom(_), true) | (Formula::Top, true) => Formula::negate(phi.clone()),
        (Formula::Not(f), n) => nnf(f, !n),
        (Formula::And(fs), false) => Formula::And(fs.iter().map(|f| nnf(f, false)).collect()),
        (Formula::And(fs), true) => Formula::Or(fs.iter().map(|f| nnf(f, true)).collect()),
        (Formula::Or(fs), false) => Formula::Or(fs.iter().map(|f| nnf(f, false)).collect()),
        (Formula::Or(fs), true) => Formula::And(fs.iter().map(|f| nnf(f, true)).collect()),
        (Formula::Exists(vs, f), false) => Formula::Exists(vs.clone(), Box::new(nnf(f, false))),
        (Formula::Exists(vs, f), true) => Formula::Forall(vs.clone(), Box::new(nnf(f, true))),
        (Formula::Forall(vs, f), false) => Formula::Forall(vs.clone(), Box::new(nnf(f, false))),
        (Formula::Forall(vs, f), true) => Formula::Exists(vs.clone(), Box::new(nnf(f, true))),
    }
}

pub fn is_nnf(phi: &Formula) -> bool {
    match phi {
        Formula::Atom(_) | Formula::Top => true,
        Formula::Not(f) => matches!(f.as_ref(), Formula::Atom(_) | Formula::Top),
        Formula::And(fs) | Formula::Or(fs) => fs.iter().all(is_nnf),
        Formula::Exists(_, f) | Formula::Forall(_, f) => is_nnf(f),
    }
}

/// Replaces every free occurrence of variable `x` by constant `c`.
pub fn substitute_constant(phi: &Formula, x: &str, c: &str) -> Formula {
    match phi {
        Formula::Atom(a) => Formula::Atom(Atom {
            relation: a.relation.clone(),
            args: a
                .args
                .iter()
                .map(|t| match t {
                    Term::Var(v) if v == x => Term::Const(c.to_string()),
                    other => other.clone(),
                })
                .collect(),
        }),
        Formula::Top => Formula::Top,
        Formula::And(fs) => Formula::And(fs.iter().map(|f| substitute_constant(f, x, c)).collect()),
        Formula::Or(fs) => Formula::Or(fs.iter().map(|f| substitute_constant(f, x, c)).collect()),
        Formula::Not(f) => Formula::negate(substitute_constant(f, x, c)),
        Formula::Exists(vs, f) | Formula::Forall(vs, f) if vs.iter().any(|v| v == x) => {
            phi.clone()
        }
        Formula::Exists(vs, f) => Formula::Exists(vs.clone(), Box::new(substitute_constant(f, x, c))),
        Formula::Forall(vs, f) => Formula::Forall(vs.clone(), Box::new(substitute_constant(f, x, c))),
    }
}

/// Replaces every occurrence of constant `c` by variable `x`. `x` must not
/// already occur in `phi`, so no capture can happen.
pub fn abstract_constant(phi: &Formula, c: &str, x: &str) -> Result<Formula, LogicError> {
    if phi.all_vars().contains(x) {
        return Err(LogicError::VariableOccurs(x.to_string()));
    }
    Ok(phi.map_atoms(&mut |a| {
        Formula::Atom(Atom {
            relation: a.relation.clone(),
            args: a
                .args
                .iter()
                .map(|t| match t {
                    Term::Const(k) if k == c => Term::Var(x.to_string()),
                    other => other.clone(),
                })
                .collect(),
        })
    }))
}

/// Prefix of the reserved constant namespace `c<digits>`.
pub const FRESH_PREFIX: &str = "c";

pub fn is_reserved_name(name: &str) -> bool {
    name.len() > FRESH_PREFIX.len()
        && name.starts_with(FRESH_PREFIX)
        && name[FRESH_PREFIX.len()..].bytes().all(|b| b.is_ascii_digit())
}

/// Lowest-index constant `c<i>` not in `avoid`.
pub fn fresh_constant(avoid: &Signature) -> String {
    fresh_constant_avoiding(|c| avoid.constants.contains(c))
}

pub(crate) fn fresh_constant_avoiding(taken: impl Fn(&str) -> bool) -> String {
    (0..)
        .map(|i| format!("{FRESH_PREFIX}{i}"))
        .find(|c| !taken(c))
        .expect("unbounded series")
}

/// Hands out fresh constants in series order, never repeating one.
#[derive(Clone, Debug, Default)]
pub struct FreshSupply {
    used: BTreeSet<String>,
    next: usize,
}

impl FreshSupply {
    pub fn avoiding(names: impl IntoIterator<Item = String>) -> Self {
        FreshSupply {
            used: names.into_iter().collect(),
            next: 0,
        }
    }

    pub fn next_constant(&mut self) -> String {
        loop {
            let c = format!("{FRESH_PREFIX}{}", self.next);
            self.next += 1;
            if self.used.insert(c.clone()) {
                return c;
            }
        }
    }

    pub fn reserve(&mut self, name: &str) {
        self.used.insert(name.to_string());
    }
}

/// A variable name based on `base` that does not occur in `avoid`.
pub fn fresh_variable(base: &str, avoid: &BTreeSet<String>) -> String {
    if !avoid.contains(base) && !is_reserved_name(base) {
        return base.to_string();
    }
    (1..)
        .map(|i| format!("{base}{i}"))
        .find(|v| !avoid.contains(v) && !is_reserved_name(v))
        .expect("unbounded series")
}

/// Flattens nested conjunctions/disjunctions and drops `⊤`/`⊥` units.
/// Only used for optional output normalization.
pub fn simplify(phi: &Formula) -> Formula {
    match phi {
        Formula::Atom(_) | Formula::Top => phi.clone(),
        Formula::Not(f) => {
            let inner = simplify(f);
            match inner {
                Formula::Not(g) if *g != Formula::Top => *g,
                Formula::Not(g) => Formula::Not(g),
                other => Formula::negate(other),
            }
        }
        Formula::And(fs) => {
            let mut parts = Vec::new();
            for f in fs {
                match simplify(f) {
                    Formula::Top => {}
                    g if g.is_bottom() => return Formula::bottom(),
                    Formula::And(gs) => parts.extend(gs),
                    g => parts.push(g),
                }
            }
            Formula::and(parts)
        }
        Formula::Or(fs) => {
            let mut parts = Vec::new();
            for f in fs {
                match simplify(f) {
                    Formula::Top => return Formula::Top,
                    g if g.is_bottom() => {}
                    Formula::Or(gs) => parts.extend(gs),
                    g => parts.push(g),
                }
            }
            Formula::or(parts)
        }
        Formula::Exists(vs, f) => {
            let body = simplify(f);
            let used = body.free_vars();
            let vs: Vec<String> = vs.iter().filter(|v| used.contains(*v)).cloned().collect();
            Formula::exists(vs, body)
        }
        Formula::Forall(vs, f) => {
            let body = simplify(f);
            let used = body.free_vars();
            let vs: Vec<String> = vs.iter().filter(|v| used.contains(*v)).cloned().collect();
            Formula::forall(vs, body)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(rel: &str, args: &[Term]) -> Formula {
        Formula::atom(rel, args.to_vec())
    }
    fn v(n: &str) -> Term {
        Term::var(n)
    }
    fn k(n: &str) -> Term {
        Term::constant(n)
    }

    #[test]
    fn nnf_de_morgan() {
        let f = Formula::negate(Formula::And(vec![p("A", &[v("x")]), p("B", &[v("x")])]));
        let expected = Formula::Or(vec![
            Formula::negate(p("A", &[v("x")])),
            Formula::negate(p("B", &[v("x")])),
        ]);
        assert_eq!(to_nnf(&f), expected);
    }

    #[test]
    fn nnf_quantifier_duality() {
        let f = Formula::negate(Formula::exists(vec!["x".into()], p("P", &[v("x")])));
        let expected = Formula::forall(vec!["x".into()], Formula::negate(p("P", &[v("x")])));
        assert_eq!(to_nnf(&f), expected);
    }

    #[test]
    fn nnf_double_negation() {
        let f = Formula::negate(Formula::negate(p("P", &[k("c")])));
        assert_eq!(to_nnf(&f), p("P", &[k("c")]));
    }

    #[test]
    fn nnf_keeps_blocks_and_bottom() {
        let f = Formula::negate(Formula::forall(
            vec!["x".into(), "y".into()],
            Formula::Top,
        ));
        assert_eq!(
            to_nnf(&f),
            Formula::Exists(vec!["x".into(), "y".into()], Box::new(Formula::bottom()))
        );
        assert!(is_nnf(&to_nnf(&f)));
    }

    #[test]
    fn top_has_empty_signature() {
        let rep = signature_of(&Formula::Top);
        assert!(rep.relations.is_empty());
        assert!(rep.constants.is_empty());
        assert!(rep.relsig_pos.is_empty() && rep.relsig_neg.is_empty());
        assert!(rep.free_vars.is_empty());
    }

    #[test]
    fn substitution_respects_scoping() {
        let f = Formula::And(vec![
            p("P", &[v("x")]),
            Formula::exists(vec!["x".into()], p("Q", &[v("x")])),
        ]);
        let expected = Formula::And(vec![
            p("P", &[k("c")]),
            Formula::exists(vec!["x".into()], p("Q", &[v("x")])),
        ]);
        assert_eq!(substitute_constant(&f, "x", "c"), expected);
        assert_eq!(substitute_constant(&p("P", &[v("y")]), "x", "c"), p("P", &[v("y")]));
        let g = Formula::forall(vec!["y".into()], p("R", &[v("x"), v("y")]));
        assert_eq!(
            substitute_constant(&g, "x", "c"),
            Formula::forall(vec!["y".into()], p("R", &[k("c"), v("y")]))
        );
    }

    #[test]
    fn abstraction_replaces_uniformly() {
        let f = Formula::And(vec![p("A", &[k("c")]), Formula::negate(p("B", &[k("c")]))]);
        let expected = Formula::And(vec![p("A", &[v("x")]), Formula::negate(p("B", &[v("x")]))]);
        assert_eq!(abstract_constant(&f, "c", "x").unwrap(), expected);
        assert_eq!(abstract_constant(&p("P", &[k("d")]), "c", "x").unwrap(), p("P", &[k("d")]));
        let g = Formula::exists(vec!["y".into()], p("R", &[k("c"), v("y")]));
        assert_eq!(
            abstract_constant(&g, "c", "x").unwrap(),
            Formula::exists(vec!["y".into()], p("R", &[v("x"), v("y")]))
        );
    }

    #[test]
    fn abstraction_rejects_occurring_variable() {
        let g = Formula::exists(vec!["x".into()], p("R", &[k("c"), v("x")]));
        assert_eq!(
            abstract_constant(&g, "c", "x"),
            Err(LogicError::VariableOccurs("x".into()))
        );
    }

    #[test]
    fn fresh_constant_series() {
        assert_eq!(fresh_constant(&Signature::new()), "c0");
        assert_eq!(fresh_constant(&Signature::new().with_constant("c0")), "c1");
        let avoid = Signature::new().with_constant("c0").with_constant("c2");
        // exhaustive scan: the lowest index whose name is unused
        let expected = (0..).find(|i| !avoid.constants.contains(&format!("c{i}"))).unwrap();
        assert_eq!(fresh_constant(&avoid), format!("c{expected}"));
        assert_eq!(fresh_constant(&avoid), "c1");
    }

    #[test]
    fn reserved_namespace() {
        assert!(is_reserved_name("c0"));
        assert!(is_reserved_name("c17"));
        assert!(!is_reserved_name("c"));
        assert!(!is_reserved_name("cat"));
        assert!(!is_reserved_name("d0"));
    }

    #[test]
    fn ill_formed_formulas_are_rejected() {
        let f = Formula::And(vec![p("R", &[k("a")]), p("R", &[k("a"), k("b")])]);
        assert!(matches!(f.check_well_formed(), Err(LogicError::ArityMismatch { .. })));
        let g = Formula::Exists(vec!["x".into(), "x".into()], Box::new(Formula::Top));
        assert_eq!(g.check_well_formed(), Err(LogicError::DuplicateBinder("x".into())));
        let h = Formula::Exists(vec![], Box::new(Formula::Top));
        assert_eq!(h.check_well_formed(), Err(LogicError::EmptyQuantifier));
    }

    #[test]
    fn sizes() {
        let f = Formula::exists(
            vec!["x".into()],
            Formula::And(vec![p("Big", &[v("x")]), p("Cat", &[v("x")])]),
        );
        assert_eq!(f.size(), 4);
        assert_eq!(Formula::bottom().size(), 1);
        assert_eq!(Formula::negate(p("P", &[k("c")])).size(), 1);
    }
}
