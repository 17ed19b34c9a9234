//! Interpolants from closed labeled tableaux, plus an independent
//! brute-force search used as an oracle.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::rc::Rc;

use thiserror::Error;

use crate::logic::{
    abstract_constant, fresh_variable, signature_of, to_nnf, Atom, Formula, Signature, Term,
};
use crate::models::{count_structures, joint_signature, Layout, RawStructure, Structure};
use crate::tableau::{
    prove, side_constants, Clash, ClosedTableau, Label, LabeledSentence, Outcome, Rule,
    TableauError,
};

/// A closed tableau with one interpolant per node.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AnnotatedTableau {
    pub tableau: ClosedTableau,
    pub interpolants: Vec<Formula>,
}

impl AnnotatedTableau {
    pub fn root_interpolant(&self) -> &Formula {
        &self.interpolants[0]
    }

    /// The tableau trace with `[interpolant θ]` after every node.
    pub fn trace(&self) -> String {
        self.tableau
            .render(|id| Some(crate::syntax::print(&self.interpolants[id])))
    }
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum InterpolationError {
    #[error("tableau is not closed: {0}")]
    OpenTableau(String),
    #[error("no closed tableau found within the budget")]
    NotProvedWithinBudget,
    #[error("the implication is not valid; countermodel {}", .0.to_json())]
    NotValid(Structure),
    #[error("extracted interpolant failed verification: {0:?}")]
    VerificationFailed(Verdict),
    #[error(transparent)]
    Tableau(#[from] TableauError),
}

/// Result of checking a candidate interpolant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Verified,
    SignatureViolation(String),
    /// One of the two entailments has a countermodel.
    EntailmentFails(String),
    EntailmentUnknown,
}

/// Computes the interpolant of every node bottom-up.
pub fn propagate(t: &ClosedTableau) -> Result<AnnotatedTableau, InterpolationError> {
    t.check().map_err(InterpolationError::OpenTableau)?;
    let n = t.nodes.len();
    // Constants on each side at or above every node.
    let mut left: Vec<BTreeSet<String>> = vec![BTreeSet::new(); n];
    let mut right: Vec<BTreeSet<String>> = vec![BTreeSet::new(); n];
    for node in &t.nodes {
        let (mut l, mut r) = match node.parent {
            Some(p) => (left[p].clone(), right[p].clone()),
            None => (BTreeSet::new(), BTreeSet::new()),
        };
        l.extend(side_constants(node.introduced.iter(), Label::L));
        r.extend(side_constants(node.introduced.iter(), Label::R));
        left[node.id] = l;
        right[node.id] = r;
    }
    let mut theta: Vec<Option<Formula>> = vec![None; n];
    for id in (0..n).rev() {
        let node = &t.nodes[id];
        let value = if let Some(clash) = &node.clash {
            leaf_interpolant(clash)
        } else {
            match node.children.as_slice() {
                [] => return Err(InterpolationError::OpenTableau(format!("leaf {id} has no clash"))),
                [only] => lift(t, *only, &theta, &left[id], &right[id]),
                many => {
                    let parts: Vec<Formula> = many
                        .iter()
                        .map(|&c| theta[c].clone().expect("children first"))
                        .collect();
                    let label = t.nodes[many[0]]
                        .premise
                        .as_ref()
                        .map(|p| p.label)
                        .ok_or_else(|| InterpolationError::OpenTableau(format!("branching at {id} has no premise")))?;
                    match label {
                        Label::L => Formula::Or(parts),
                        Label::R => Formula::And(parts),
                    }
                }
            }
        };
        theta[id] = Some(value);
    }
    Ok(AnnotatedTableau {
        tableau: t.clone(),
        interpolants: theta.into_iter().map(|f| f.expect("all nodes visited")).collect(),
    })
}

fn leaf_interpolant(clash: &Clash) -> Formula {
    match clash {
        Clash::Bottom { label: Label::L } => Formula::bottom(),
        Clash::Bottom { label: Label::R } => Formula::Top,
        Clash::Complementary {
            atom,
            pos_label,
            neg_label,
        } => match (pos_label, neg_label) {
            (Label::L, Label::R) => Formula::Atom(atom.clone()),
            (Label::R, Label::L) => Formula::negate(Formula::Atom(atom.clone())),
            (Label::L, Label::L) => Formula::bottom(),
            (Label::R, Label::R) => Formula::Top,
        },
    }
}

/// Interpolant of a node with a single child.
fn lift(
    t: &ClosedTableau,
    child: usize,
    theta: &[Option<Formula>],
    left_above: &BTreeSet<String>,
    right_above: &BTreeSet<String>,
) -> Formula {
    let inner = theta[child].clone().expect("children first");
    let Rule::Forall(c) = &t.nodes[child].rule else {
        return inner;
    };
    let on_left = left_above.contains(c);
    let on_right = right_above.contains(c);
    if on_left == on_right || !inner.constants().contains(c) {
        return inner;
    }
    let mut avoid = inner.all_vars();
    avoid.extend(inner.constants());
    let x = fresh_variable("x", &avoid);
    let body = abstract_constant(&inner, c, &x).expect("variable chosen fresh");
    if !on_right {
        Formula::Exists(vec![x], Box::new(body))
    } else {
        Formula::Forall(vec![x], Box::new(body))
    }
}

/// Tableau input for `⊨ φ → ψ`: `nnf(φ)^L` and `nnf(¬ψ)^R`.
pub fn implication_input(phi: &Formula, psi: &Formula) -> Vec<LabeledSentence> {
    vec![
        LabeledSentence::left(to_nnf(phi)),
        LabeledSentence::right(to_nnf(&Formula::negate(psi.clone()))),
    ]
}

/// Entailment check `⊨ φ → ψ` by one prover call.
pub fn entails(phi: &Formula, psi: &Formula, budget: usize) -> Result<Outcome, TableauError> {
    prove(&implication_input(phi, psi), budget)
}

/// Craig interpolant of `⊨ φ → ψ` with its annotated proof.
pub fn craig_interpolant_with_proof(
    phi: &Formula,
    psi: &Formula,
    budget: usize,
) -> Result<(Formula, AnnotatedTableau), InterpolationError> {
    match entails(phi, psi, budget)? {
        Outcome::Closed(t) => {
            let annotated = propagate(&t)?;
            let theta = annotated.root_interpolant().clone();
            match verify_interpolant(phi, psi, &theta, budget) {
                Verdict::Verified => Ok((theta, annotated)),
                other => Err(InterpolationError::VerificationFailed(other)),
            }
        }
        Outcome::Satisfiable(m) => Err(InterpolationError::NotValid(m)),
        Outcome::Unknown { .. } => {
            let counter = [phi.clone(), Formula::negate(psi.clone())];
            match small_model(&counter, 3, 1 << 16) {
                Some(m) => Err(InterpolationError::NotValid(m)),
                None => Err(InterpolationError::NotProvedWithinBudget),
            }
        }
    }
}

pub fn craig_interpolant(phi: &Formula, psi: &Formula, budget: usize) -> Result<Formula, InterpolationError> {
    craig_interpolant_with_proof(phi, psi, budget).map(|(t, _)| t)
}

/// `find_model` restricted to searches of at most `cap` structures per size.
pub(crate) fn small_model(phis: &[Formula], max_size: usize, cap: u128) -> Option<Structure> {
    let sig = joint_signature(phis);
    let max = (1..=max_size)
        .take_while(|&n| count_structures(&sig, n).is_some_and(|c| c <= cap))
        .last()?;
    crate::models::find_model(phis, max)
}

/// Checks the interpolant conditions: symbols of θ shared, θ closed when
/// both sides are, and both entailments proved.
pub fn verify_interpolant(phi: &Formula, psi: &Formula, theta: &Formula, budget: usize) -> Verdict {
    if let Err(msg) = signature_violation(phi, psi, theta) {
        return Verdict::SignatureViolation(msg);
    }
    for (a, b, what) in [(phi, theta, "φ → θ"), (theta, psi, "θ → ψ")] {
        match entails(a, b, budget) {
            Ok(Outcome::Closed(_)) => {}
            Ok(Outcome::Satisfiable(m)) => {
                return Verdict::EntailmentFails(format!("{what} fails in {}", m.to_json()))
            }
            Ok(Outcome::Unknown { .. }) => return Verdict::EntailmentUnknown,
            Err(e) => return Verdict::EntailmentFails(format!("{what}: {e}")),
        }
    }
    Verdict::Verified
}

pub(crate) fn signature_violation(phi: &Formula, psi: &Formula, theta: &Formula) -> Result<(), String> {
    let (sp, sq, st) = (signature_of(phi), signature_of(psi), signature_of(theta));
    let mut bad = Vec::new();
    for r in &st.relations {
        if !(sp.relations.contains(r) && sq.relations.contains(r)) {
            bad.push(format!("relation {r}"));
        }
    }
    for c in &st.constants {
        if !(sp.constants.contains(c) && sq.constants.contains(c)) {
            bad.push(format!("constant {c}"));
        }
    }
    for v in &st.free_vars {
        if !(sp.free_vars.contains(v) && sq.free_vars.contains(v)) {
            bad.push(format!("free variable {v}"));
        }
    }
    if bad.is_empty() {
        Ok(())
    } else {
        Err(format!("not shared: {}", bad.join(", ")))
    }
}

/// Polarity conditions for a Lyndon interpolant (constants are exempt).
pub fn lyndon_check(phi: &Formula, psi: &Formula, theta: &Formula) -> bool {
    let (sp, sq, st) = (signature_of(phi), signature_of(psi), signature_of(theta));
    st.relsig_pos
        .iter()
        .all(|r| sp.relsig_pos.contains(r) && sq.relsig_pos.contains(r))
        && st
            .relsig_neg
            .iter()
            .all(|r| sp.relsig_neg.contains(r) && sq.relsig_neg.contains(r))
}

/// Deepest quantifier nesting considered by [`search_interpolant`].
pub const SEARCH_MAX_DEPTH: usize = 2;

/// Largest number of structures enumerated per domain size when screening.
const SCREEN_CAP: u128 = 1 << 18;

/// Enumerates NNF sentences over the shared signature by increasing size
/// and returns the first one that passes finite-model screening and
/// [`verify_interpolant`].
pub fn search_interpolant(phi: &Formula, psi: &Formula, max_size: usize, budget: usize) -> Option<Formula> {
    let shared = shared_signature(phi, psi);
    let screen = Screen::build(phi, psi, &shared)?;
    let mut gen = Enumerator::new(&shared);
    for size in 1..=max_size {
        for cand in gen.sentences(size).iter() {
            if !screen.passes(&cand) {
                continue;
            }
            if verify_interpolant(phi, psi, &cand, budget) == Verdict::Verified {
                return Some((**cand).clone());
            }
        }
    }
    None
}

pub(crate) fn shared_signature(phi: &Formula, psi: &Formula) -> Signature {
    let (a, b) = (signature_of(phi), signature_of(psi));
    Signature {
        relations: a
            .arities
            .iter()
            .filter(|(r, _)| b.arities.contains_key(*r))
            .map(|(r, &n)| (r.clone(), n))
            .collect(),
        constants: a.constants.intersection(&b.constants).cloned().collect(),
    }
}

/// Shared-signature reducts of small models of φ (θ must hold) and of ¬ψ
/// (θ must fail).
struct Screen {
    layout: Layout,
    positive: Vec<RawStructure>,
    negative: Vec<RawStructure>,
}

impl Screen {
    fn build(phi: &Formula, psi: &Formula, shared: &Signature) -> Option<Screen> {
        let layout = Layout::new(shared);
        let positive = reduct_models(phi, shared, &layout);
        let negative = reduct_models(&Formula::negate(psi.clone()), shared, &layout);
        let pos: HashSet<&RawStructure> = positive.iter().collect();
        if negative.iter().any(|n| pos.contains(n)) {
            // A model of φ and a model of ¬ψ agree on every shared symbol.
            return None;
        }
        Some(Screen {
            layout,
            positive,
            negative,
        })
    }

    fn passes(&self, theta: &Formula) -> bool {
        let Ok(c) = self.layout.compile(theta, &[]) else {
            return false;
        };
        let mut env = Vec::new();
        self.positive.iter().all(|s| s.eval(&c, &mut env)) && self.negative.iter().all(|s| !s.eval(&c, &mut env))
    }
}

fn reduct_models(f: &Formula, shared: &Signature, shared_layout: &Layout) -> Vec<RawStructure> {
    let sig = joint_signature(std::slice::from_ref(f));
    let layout = Layout::new(&sig);
    let Ok(compiled) = layout.compile(f, &[]) else {
        return Vec::new();
    };
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for n in 1..=3 {
        if !count_structures(&sig, n).is_some_and(|c| c <= SCREEN_CAP) {
            break;
        }
        let mut raw = RawStructure::first(&layout, n);
        loop {
            if raw.eval(&compiled, &mut Vec::new()) {
                let red = project(&raw, &layout, shared_layout);
                if seen.insert(red.clone()) {
                    out.push(red);
                }
            }
            if !raw.advance() {
                break;
            }
        }
    }
    let _ = shared;
    out
}

fn project(raw: &RawStructure, from: &Layout, to: &Layout) -> RawStructure {
    let mut out = RawStructure::first(to, raw.n);
    for (i, (name, _)) in to.relations.iter().enumerate() {
        let j = from
            .relations
            .iter()
            .position(|(r, _)| r == name)
            .expect("shared relation");
        out.bits[i] = raw.bits[j].clone();
    }
    for (i, name) in to.constants.iter().enumerate() {
        let j = from.constants.iter().position(|c| c == name).expect("shared constant");
        out.consts[i] = raw.consts[j];
    }
    out
}

/// Size-ordered enumeration of NNF formulas over a fixed signature.
///
/// Literals, `⊤` and `⊥` have size 1, binary connectives add 1 to the sizes
/// of their operands and quantifiers add 1 to their body. Quantified
/// variables are named by nesting depth; `⊤`/`⊥` never appear as operands
/// and quantifiers always bind a variable their body uses. Commuted
/// duplicates of `∧`/`∨` are skipped.
pub(crate) struct Enumerator {
    relations: Vec<(String, usize)>,
    constants: Vec<String>,
    vars: Vec<String>,
    memo: BTreeMap<(usize, usize), Rc<Vec<Rc<Formula>>>>,
}

impl Enumerator {
    pub(crate) fn new(sig: &Signature) -> Self {
        let mut avoid: BTreeSet<String> = sig.constants.clone();
        let mut vars = Vec::new();
        for base in ["x", "y", "z"].iter().take(SEARCH_MAX_DEPTH) {
            let v = fresh_variable(base, &avoid);
            avoid.insert(v.clone());
            vars.push(v);
        }
        Enumerator {
            relations: sig.relations.iter().map(|(r, &a)| (r.clone(), a)).collect(),
            constants: sig.constants.iter().cloned().collect(),
            vars,
            memo: BTreeMap::new(),
        }
    }

    pub(crate) fn sentences(&mut self, size: usize) -> Rc<Vec<Rc<Formula>>> {
        self.formulas(size, 0)
    }

    /// All formulas of exactly `size` whose free variables are among the
    /// first `depth` quantifier variables.
    fn formulas(&mut self, size: usize, depth: usize) -> Rc<Vec<Rc<Formula>>> {
        if let Some(v) = self.memo.get(&(size, depth)) {
            return v.clone();
        }
        let mut out: Vec<Rc<Formula>> = Vec::new();
        if size == 1 {
            out.push(Rc::new(Formula::Top));
            out.push(Rc::new(Formula::bottom()));
            let terms: Vec<Term> = self
                .constants
                .iter()
                .map(|c| Term::Const(c.clone()))
                .chain(self.vars[..depth].iter().map(|v| Term::Var(v.clone())))
                .collect();
            for (r, arity) in self.relations.clone() {
                for args in tuples(&terms, arity) {
                    let a = Formula::Atom(Atom::new(r.clone(), args));
                    out.push(Rc::new(a.clone()));
                    out.push(Rc::new(Formula::negate(a)));
                }
            }
        } else {
            for ls in 1..size - 1 {
                let rs = size - 1 - ls;
                if ls > rs {
                    break;
                }
                let left = self.formulas(ls, depth);
                let right = self.formulas(rs, depth);
                for (i, l) in left.iter().enumerate() {
                    if is_const(l) {
                        continue;
                    }
                    let start = if ls == rs { i } else { 0 };
                    for r in right[start..].iter() {
                        if is_const(r) {
                            continue;
                        }
                        out.push(Rc::new(Formula::And(vec![(**l).clone(), (**r).clone()])));
                        out.push(Rc::new(Formula::Or(vec![(**l).clone(), (**r).clone()])));
                    }
                }
            }
            if depth < self.vars.len() {
                let v = self.vars[depth].clone();
                let bodies = self.formulas(size - 1, depth + 1);
                for b in bodies.iter() {
                    if !b.free_vars().contains(&v) {
                        continue;
                    }
                    out.push(Rc::new(Formula::Exists(vec![v.clone()], Box::new((**b).clone()))));
                    out.push(Rc::new(Formula::Forall(vec![v.clone()], Box::new((**b).clone()))));
                }
            }
        }
        let out = Rc::new(out);
        self.memo.insert((size, depth), out.clone());
        out
    }
}

fn is_const(f: &Formula) -> bool {
    *f == Formula::Top || f.is_bottom()
}

fn tuples(terms: &[Term], arity: usize) -> Vec<Vec<Term>> {
    let mut out = vec![Vec::new()];
    for _ in 0..arity {
        out = out
            .into_iter()
            .flat_map(|t| {
                terms.iter().map(move |x| {
                    let mut t = t.clone();
                    t.push(x.clone());
                    t
                })
            })
            .collect();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse;

    fn p(s: &str) -> Formula {
        parse(s).unwrap()
    }

    #[test]
    fn single_clash_gives_atom() {
        let theta = craig_interpolant(&p("P(c)"), &p("P(c)"), 100).unwrap();
        assert_eq!(theta, p("P(c)"));
    }

    #[test]
    fn left_contradiction_gives_bottom() {
        let theta = craig_interpolant(&p("A(c) & !A(c)"), &p("B(d)"), 100).unwrap();
        assert_eq!(theta, Formula::bottom());
    }

    #[test]
    fn one_leaf_cases() {
        let input = vec![
            LabeledSentence::left(p("P(c)")),
            LabeledSentence::left(p("!P(c)")),
            LabeledSentence::right(p("Q(d)")),
        ];
        let Outcome::Closed(t) = prove(&input, 10).unwrap() else { panic!() };
        assert_eq!(propagate(&t).unwrap().root_interpolant(), &Formula::bottom());
    }

    #[test]
    fn two_branch_interpolant() {
        let phi = p("exists x. (A(x) & !B(x)) & C(x)");
        let psi = p("!forall y. (!A(y) & E(y)) | B(y)");
        let (theta, ann) = craig_interpolant_with_proof(&phi, &psi, 10_000).unwrap();
        assert_eq!(theta, p("exists x. A(x) & !B(x)"));
        assert!(ann.trace().contains("[interpolant A(c0)]"));
        assert!(ann.trace().contains("[interpolant !B(c0)]"));
        assert!(ann.trace().contains("[interpolant A(c0) & !B(c0)]"));
    }

    #[test]
    fn invalid_implication_reports_countermodel() {
        assert!(matches!(
            craig_interpolant(&p("P(c)"), &p("Q(d)"), 100),
            Err(InterpolationError::NotValid(_))
        ));
    }

    #[test]
    fn verification_verdicts() {
        let phi = p("(exists x. Cat(x)) & (forall x. Cat(x) -> Big(x) & Green(x))");
        let psi = p("exists x. Big(x) & (Cat(x) | Dog(x))");
        assert_eq!(
            verify_interpolant(&phi, &psi, &p("exists x. Big(x) & Cat(x)"), 1000),
            Verdict::Verified
        );
        assert!(matches!(
            verify_interpolant(&phi, &psi, &p("exists x. Green(x)"), 1000),
            Verdict::SignatureViolation(_)
        ));
        assert_eq!(
            verify_interpolant(&phi, &psi, &p("exists x. Big(x) & Cat(x)"), 1),
            Verdict::EntailmentUnknown
        );
    }

    #[test]
    fn lyndon_polarity() {
        let phi = p("(exists x. Cat(x)) & (forall x. Cat(x) -> Big(x) & Green(x))");
        let psi = p("exists x. Big(x) & (Cat(x) | Dog(x))");
        assert!(lyndon_check(&phi, &psi, &p("exists x. Big(x) & Cat(x)")));
        assert!(!lyndon_check(
            &phi,
            &psi,
            &p("(exists x. Cat(x)) & (forall x. Cat(x) -> Big(x))")
        ));
        assert!(lyndon_check(&phi, &psi, &Formula::Top));
    }

    #[test]
    fn brute_force_search() {
        assert_eq!(search_interpolant(&p("P(c)"), &p("Q(d)"), 3, 100), None);
        assert_eq!(
            search_interpolant(&p("A(c) & !A(c)"), &p("B(d)"), 3, 100),
            Some(Formula::bottom())
        );
        let phi = p("(exists x. Cat(x)) & (forall x. Cat(x) -> Big(x) & Green(x))");
        let psi = p("exists x. Big(x) & (Cat(x) | Dog(x))");
        let found = search_interpolant(&phi, &psi, 8, 1000).unwrap();
        assert_eq!(verify_interpolant(&phi, &psi, &found, 1000), Verdict::Verified);
    }

    #[test]
    fn enumeration_sizes_match_formula_size() {
        let sig = Signature::new().with_relation("P", 1).with_constant("a");
        let mut e = Enumerator::new(&sig);
        for size in 1..=5 {
            for f in e.sentences(size).iter() {
                assert_eq!(f.size(), size, "{f}");
                assert!(f.is_sentence());
            }
        }
    }
}
