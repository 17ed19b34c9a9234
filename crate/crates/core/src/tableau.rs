//! Ground semantic tableaux over L/R-labeled NNF sentences.
//!
//! Each branch keeps an agenda with these priorities:
//!
//! 1. conjunctions, expanded as soon as they appear;
//! 2. disjunctions with at most one disjunct not refuted by a branch literal
//!    (disjunctions with a disjunct already on the branch are dropped);
//! 3. universal instantiations with branch constants, round-robin, each
//!    formula taking the oldest constant it has not used yet;
//! 4. the oldest pending existential or disjunction (FIFO);
//! 5. a fresh constant for a universal when the branch has none.
//!
//! A branch with nothing left to do is saturated and yields a Herbrand
//! model. Disjunctions branch depth-first; each formula remembers the branch
//! points it depends on, so a closed child that never used its disjunct lets
//! the search skip the siblings and splice the unused steps out of the tree.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt::{self, Write as _};
use std::rc::Rc;

use thiserror::Error;

use crate::logic::{is_nnf, substitute_constant, Atom, Formula, Term, FRESH_PREFIX};
use crate::models::{satisfies, Structure};
use crate::syntax::print;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    L,
    R,
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Label::L => "L",
            Label::R => "R",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LabeledSentence {
    pub formula: Formula,
    pub label: Label,
}

impl LabeledSentence {
    pub fn new(formula: Formula, label: Label) -> Self {
        LabeledSentence { formula, label }
    }

    pub fn left(formula: Formula) -> Self {
        Self::new(formula, Label::L)
    }

    pub fn right(formula: Formula) -> Self {
        Self::new(formula, Label::R)
    }
}

impl fmt::Display for LabeledSentence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ^{}", print(&self.formula), self.label)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Rule {
    Root,
    Conj,
    Disj,
    Exists(Vec<String>),
    Forall(String),
    Closure,
}

/// Why a leaf is closed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Clash {
    Bottom { label: Label },
    Complementary { atom: Atom, pos_label: Label, neg_label: Label },
}

impl fmt::Display for Clash {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Clash::Bottom { label } => write!(f, "false ^{label}"),
            Clash::Complementary {
                atom,
                pos_label,
                neg_label,
            } => {
                let a = print(&Formula::Atom(atom.clone()));
                write!(f, "{a} ^{pos_label} vs !{a} ^{neg_label}")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TableauNode {
    pub id: usize,
    pub parent: Option<usize>,
    pub children: Vec<usize>,
    pub introduced: Vec<LabeledSentence>,
    pub rule: Rule,
    /// The formula the rule was applied to (absent for the root and leaves).
    pub premise: Option<LabeledSentence>,
    pub clash: Option<Clash>,
}

/// A closed tableau stored as an arena; node 0 is the root and children
/// always have larger ids than their parent.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClosedTableau {
    pub nodes: Vec<TableauNode>,
}

impl ClosedTableau {
    pub fn root(&self) -> &TableauNode {
        &self.nodes[0]
    }

    pub fn leaves(&self) -> impl Iterator<Item = &TableauNode> {
        self.nodes.iter().filter(|n| n.children.is_empty())
    }

    /// Number of branches, i.e. closure leaves.
    pub fn branch_count(&self) -> usize {
        self.leaves().count()
    }

    pub fn clashes(&self) -> Vec<&Clash> {
        self.leaves().filter_map(|n| n.clash.as_ref()).collect()
    }

    /// Ids from the root down to `id`.
    pub fn path_to(&self, id: usize) -> Vec<usize> {
        let mut path = vec![id];
        let mut cur = id;
        while let Some(p) = self.nodes[cur].parent {
            path.push(p);
            cur = p;
        }
        path.reverse();
        path
    }

    /// Labeled sentences at `id` or above it.
    pub fn branch_formulas(&self, id: usize) -> Vec<&LabeledSentence> {
        self.path_to(id)
            .into_iter()
            .flat_map(|n| self.nodes[n].introduced.iter())
            .collect()
    }

    /// Checks the structural invariants: every leaf carries evidence drawn
    /// from its branch, every premise appears at or above its node, and every
    /// rule introduces what it should.
    pub fn check(&self) -> Result<(), String> {
        let root = self.nodes.first().ok_or("empty tableau")?;
        if root.rule != Rule::Root {
            return Err("node 0 is not the root".into());
        }
        for n in &self.nodes {
            for &c in &n.children {
                if c <= n.id || self.nodes[c].parent != Some(n.id) {
                    return Err(format!("bad parent link at node {c}"));
                }
            }
            if n.children.is_empty() {
                let clash = n.clash.as_ref().ok_or(format!("open leaf {}", n.id))?;
                let branch = self.branch_formulas(n.id);
                let has = |f: &Formula, l: Label| branch.iter().any(|s| s.formula == *f && s.label == l);
                let ok = match clash {
                    Clash::Bottom { label } => has(&Formula::bottom(), *label),
                    Clash::Complementary {
                        atom,
                        pos_label,
                        neg_label,
                    } => {
                        let a = Formula::Atom(atom.clone());
                        has(&a, *pos_label) && has(&Formula::negate(a), *neg_label)
                    }
                };
                if !ok {
                    return Err(format!("clash at leaf {} is not on its branch", n.id));
                }
            }
            if let (Some(p), Some(premise)) = (n.parent, &n.premise) {
                let above = self.branch_formulas(p);
                if !above.iter().any(|s| *s == premise) {
                    return Err(format!("premise of node {} is not above it", n.id));
                }
                let expected = expected_children(&premise.formula);
                let intro: Vec<&Formula> = n.introduced.iter().map(|s| &s.formula).collect();
                let ok = n.introduced.iter().all(|s| s.label == premise.label)
                    && match (&n.rule, &premise.formula, expected) {
                        (Rule::Conj, _, Some(parts)) => parts.iter().collect::<Vec<_>>() == intro,
                        (Rule::Disj, Formula::Or(parts), _) => {
                            intro.len() == 1 && parts.contains(intro[0])
                        }
                        (Rule::Exists(cs), Formula::Exists(vs, body), _) => {
                            let mut inst = (**body).clone();
                            for (v, c) in vs.iter().zip(cs) {
                                inst = substitute_constant(&inst, v, c);
                            }
                            let fresh = cs.iter().all(|c| {
                                !above.iter().any(|s| s.formula.constants().contains(c))
                            });
                            cs.len() == vs.len() && fresh && intro == vec![&inst]
                        }
                        (Rule::Forall(c), Formula::Forall(..), _) => {
                            intro == vec![&forall_step(&premise.formula, c)]
                        }
                        _ => false,
                    };
                if !ok {
                    return Err(format!("node {} does not follow from its premise", n.id));
                }
            }
        }
        Ok(())
    }

    /// Indented text rendering: one line per node, each alternative of a
    /// branching marked with `+`.
    pub fn trace(&self) -> String {
        self.render(|_| None)
    }

    pub(crate) fn render(&self, annotate: impl Fn(usize) -> Option<String>) -> String {
        let mut out = String::new();
        self.render_from(0, 0, false, &annotate, &mut out);
        out
    }

    fn render_from(
        &self,
        id: usize,
        indent: usize,
        bullet: bool,
        annotate: &impl Fn(usize) -> Option<String>,
        out: &mut String,
    ) {
        let mut id = id;
        let mut first = true;
        loop {
            let n = &self.nodes[id];
            let pad = " ".repeat(indent);
            let mark = if first && bullet { "+ " } else if bullet { "  " } else { "" };
            let head = match &n.rule {
                Rule::Root => "[root]".to_string(),
                Rule::Conj => "[conj]".to_string(),
                Rule::Disj => "[disj]".to_string(),
                Rule::Exists(cs) => format!("[exists {}]", cs.join(" ")),
                Rule::Forall(c) => format!("[forall {c}]"),
                Rule::Closure => "[closed]".to_string(),
            };
            let body = match &n.clash {
                Some(c) => c.to_string(),
                None => n
                    .introduced
                    .iter()
                    .map(|s| s.to_string())
                    .collect::<Vec<_>>()
                    .join(", "),
            };
            let _ = write!(out, "{pad}{mark}{head}");
            if !body.is_empty() {
                let _ = write!(out, " {body}");
            }
            if let Some(a) = annotate(id) {
                let _ = write!(out, "  [interpolant {a}]");
            }
            out.push('\n');
            first = false;
            match n.children.as_slice() {
                [] => return,
                [only] => id = *only,
                many => {
                    let inner = indent + if bullet { 2 } else { 0 };
                    for &c in many {
                        self.render_from(c, inner + 2, true, annotate, out);
                    }
                    return;
                }
            }
        }
    }
}

fn expected_children(f: &Formula) -> Option<Vec<Formula>> {
    match f {
        Formula::And(parts) => Some(parts.clone()),
        _ => None,
    }
}

/// One step of a universal block: strips (and instantiates) the first
/// bound variable.
pub(crate) fn forall_step(f: &Formula, c: &str) -> Formula {
    match f {
        Formula::Forall(vs, body) => {
            let (first, rest) = vs.split_first().expect("non-empty block");
            let inner = Formula::forall(rest.to_vec(), (**body).clone());
            substitute_constant(&inner, first, c)
        }
        _ => panic!("forall_step on a non-universal formula"),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    Closed(ClosedTableau),
    Satisfiable(Structure),
    Unknown { budget_spent: usize },
}

impl Outcome {
    pub fn is_closed(&self) -> bool {
        matches!(self, Outcome::Closed(_))
    }
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum TableauError {
    #[error("input is not a sentence: {0}")]
    NotSentence(String),
    #[error("input is not in negation normal form: {0}")]
    NotNnf(String),
    #[error("input is ill-formed: {0}")]
    IllFormed(String),
    #[error("branch is not saturated: {0}")]
    NotSaturated(String),
    #[error("branch is closed")]
    BranchClosed,
}

/// Search statistics, mainly for tests.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ProveStats {
    pub rule_applications: usize,
    pub branch_points: usize,
    pub skipped_alternatives: usize,
    /// FIFO pops that were younger than an earlier pop on the same branch.
    pub agenda_order_violations: usize,
}

/// Runs the tableau on `input` with at most `budget` rule applications.
pub fn prove(input: &[LabeledSentence], budget: usize) -> Result<Outcome, TableauError> {
    prove_with_stats(input, budget).map(|(o, _)| o)
}

pub fn prove_with_stats(
    input: &[LabeledSentence],
    budget: usize,
) -> Result<(Outcome, ProveStats), TableauError> {
    for s in input {
        s.formula
            .check_well_formed()
            .map_err(|e| TableauError::IllFormed(format!("{}: {e}", print(&s.formula))))?;
        if !s.formula.is_sentence() {
            return Err(TableauError::NotSentence(print(&s.formula)));
        }
        if !is_nnf(&s.formula) {
            return Err(TableauError::NotNnf(print(&s.formula)));
        }
    }
    std::thread::scope(|scope| {
        std::thread::Builder::new()
            .stack_size(SEARCH_STACK)
            .spawn_scoped(scope, || search_closed(input, budget))
            .expect("spawn search thread")
            .join()
            .unwrap_or_else(|e| std::panic::resume_unwind(e))
    })
}

const SEARCH_STACK: usize = 1 << 30;

fn search_closed(input: &[LabeledSentence], budget: usize) -> Result<(Outcome, ProveStats), TableauError> {
    let mut search = Search {
        budget,
        spent: 0,
        next_branch_point: 0,
        stats: ProveStats::default(),
    };
    let mut branch = Branch::new(input);
    let root_intro: Vec<Item> = input
        .iter()
        .map(|s| Item {
            f: Rc::new(s.formula.clone()),
            label: s.label,
            deps: Deps::empty(),
        })
        .collect();
    let result = search.run(&mut branch, root_intro, Rule::Root, None, Deps::empty());
    let outcome = match result {
        Run::Closed { node, .. } => Outcome::Closed(flatten(node)),
        Run::Open(model) => {
            for s in input {
                assert_eq!(
                    satisfies(&model, &s.formula),
                    Ok(true),
                    "extracted model fails {}",
                    print(&s.formula)
                );
            }
            Outcome::Satisfiable(model)
        }
        Run::OutOfBudget => Outcome::Unknown {
            budget_spent: search.spent,
        },
    };
    search.stats.rule_applications = search.spent;
    Ok((outcome, search.stats))
}

/// Builds the Herbrand structure of a saturated open branch of ground NNF
/// sentences: one element per constant, atoms true exactly when they occur
/// positively.
pub fn saturated_branch_model(branch: &[Formula]) -> Result<Structure, TableauError> {
    let present: HashSet<&Formula> = branch.iter().collect();
    let mut constants: BTreeSet<String> = BTreeSet::new();
    for f in branch {
        if !f.is_sentence() {
            return Err(TableauError::NotSentence(print(f)));
        }
        if !is_nnf(f) {
            return Err(TableauError::NotNnf(print(f)));
        }
        constants.extend(f.constants());
    }
    for f in branch {
        if f.is_bottom() {
            return Err(TableauError::BranchClosed);
        }
        if let Some((a, true)) = f.as_literal() {
            if present.contains(&Formula::negate(Formula::Atom(a.clone()))) {
                return Err(TableauError::BranchClosed);
            }
        }
        let unsat = |why: &str| Err(TableauError::NotSaturated(format!("{why}: {}", print(f))));
        match f {
            Formula::And(parts) if !parts.iter().all(|p| present.contains(p)) => {
                return unsat("conjunct missing")
            }
            Formula::Or(parts) if !parts.iter().any(|p| present.contains(p)) => {
                return unsat("no disjunct chosen")
            }
            Formula::Exists(vs, body) => {
                let witnessed = instances(vs, body, &constants)
                    .iter()
                    .any(|inst| present.contains(inst));
                if !witnessed {
                    return unsat("no witness");
                }
            }
            Formula::Forall(..) => {
                for c in &constants {
                    if !present.contains(&forall_step(f, c)) {
                        return unsat(&format!("not instantiated with {c}"));
                    }
                }
                if constants.is_empty() {
                    return unsat("no constant to instantiate with");
                }
            }
            _ => {}
        }
    }
    let order: Vec<String> = constants.into_iter().collect();
    let mut rels: BTreeMap<String, usize> = BTreeMap::new();
    for f in branch {
        f.visit_atoms(&mut |a| {
            rels.entry(a.relation.clone()).or_insert(a.arity());
        });
    }
    let positives = branch.iter().filter_map(|f| match f.as_literal() {
        Some((a, true)) => Some(a.clone()),
        _ => None,
    });
    Ok(herbrand(&order, &rels, positives))
}

fn instances(vs: &[String], body: &Formula, constants: &BTreeSet<String>) -> Vec<Formula> {
    let mut out = vec![body.clone()];
    for v in vs {
        out = out
            .iter()
            .flat_map(|f| constants.iter().map(move |c| substitute_constant(f, v, c)))
            .collect();
    }
    out
}

fn herbrand(
    constants: &[String],
    relations: &BTreeMap<String, usize>,
    positives: impl Iterator<Item = Atom>,
) -> Structure {
    let index: HashMap<&str, usize> = constants
        .iter()
        .enumerate()
        .map(|(i, c)| (c.as_str(), i))
        .collect();
    let mut st = Structure {
        domain: constants.len().max(1),
        ..Structure::default()
    };
    for (r, &a) in relations {
        st.relations.insert(r.clone(), BTreeSet::new());
        st.arities.insert(r.clone(), a);
    }
    for a in positives {
        let tuple = a
            .args
            .iter()
            .map(|t| index[t.name()])
            .collect::<Vec<_>>();
        st.relations.entry(a.relation.clone()).or_default().insert(tuple);
    }
    for (i, c) in constants.iter().enumerate() {
        st.constants.insert(c.clone(), i);
    }
    st
}

/// Sorted set of branch-point ids.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Deps(Rc<Vec<u32>>);

impl Deps {
    fn empty() -> Self {
        Deps(Rc::new(Vec::new()))
    }

    fn contains(&self, b: u32) -> bool {
        self.0.binary_search(&b).is_ok()
    }

    fn union(&self, other: &Deps) -> Deps {
        if other.0.is_empty() || Rc::ptr_eq(&self.0, &other.0) {
            return self.clone();
        }
        if self.0.is_empty() {
            return other.clone();
        }
        let (a, b) = (&self.0, &other.0);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                std::cmp::Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    out.push(a[i]);
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Deps(Rc::new(out))
    }

    fn with(&self, b: u32) -> Deps {
        self.union(&Deps(Rc::new(vec![b])))
    }

    fn without(&self, b: u32) -> Deps {
        if !self.contains(b) {
            return self.clone();
        }
        Deps(Rc::new(self.0.iter().copied().filter(|&x| x != b).collect()))
    }
}

#[derive(Clone, Debug)]
struct Item {
    f: Rc<Formula>,
    label: Label,
    deps: Deps,
}

#[derive(Clone, Debug)]
struct LitSlot {
    pos: Option<(Label, Deps)>,
    neg: Option<(Label, Deps)>,
}

#[derive(Clone, Debug)]
struct Universal {
    item: Item,
    next: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum DisjStatus {
    Pending,
    Done,
}

#[derive(Clone, Debug)]
struct Disjunction {
    item: Item,
    status: DisjStatus,
}

#[derive(Clone, Debug)]
enum Fifo {
    Exists(Item),
    Disj(usize),
}

/// Persistent collections keep the clone at each branch point cheap.
#[derive(Clone, Debug)]
struct Branch {
    constants: im_rc::Vector<String>,
    const_set: im_rc::HashSet<String>,
    next_fresh: usize,
    seen: im_rc::HashSet<(Rc<Formula>, Label)>,
    lits: im_rc::HashMap<Atom, LitSlot>,
    alpha: im_rc::Vector<Item>,
    determined: im_rc::Vector<usize>,
    universals: im_rc::Vector<Universal>,
    forall_queue: im_rc::Vector<usize>,
    dormant: im_rc::Vector<usize>,
    fifo: im_rc::Vector<(u64, Fifo)>,
    age: u64,
    last_pop: Option<u64>,
    disjs: im_rc::Vector<Disjunction>,
    watchers: im_rc::HashMap<Atom, im_rc::Vector<usize>>,
    relations: Rc<BTreeMap<String, usize>>,
}

enum Step {
    Conj(Item),
    Disj(Item),
    Exists(Item),
    Forall(usize, String),
    FreshForall(usize),
    Saturated,
}

/// Literal value of a disjunct on the current branch.
enum Value {
    True,
    False,
    Open,
}

impl Branch {
    fn new(input: &[LabeledSentence]) -> Self {
        let mut constants = BTreeSet::new();
        let mut relations = BTreeMap::new();
        for s in input {
            constants.extend(s.formula.constants());
            s.formula.visit_atoms(&mut |a| {
                relations.entry(a.relation.clone()).or_insert(a.arity());
            });
        }
        Branch {
            const_set: constants.iter().cloned().collect(),
            constants: constants.into_iter().collect(),
            next_fresh: 0,
            seen: Default::default(),
            lits: Default::default(),
            alpha: Default::default(),
            determined: Default::default(),
            universals: Default::default(),
            forall_queue: Default::default(),
            dormant: Default::default(),
            fifo: Default::default(),
            age: 0,
            last_pop: None,
            disjs: Default::default(),
            watchers: Default::default(),
            relations: Rc::new(relations),
        }
    }

    fn add_constant(&mut self, c: &str) {
        if self.const_set.insert(c.to_string()).is_none() {
            self.constants.push_back(c.to_string());
            for u in std::mem::take(&mut self.dormant) {
                self.forall_queue.push_back(u);
            }
        }
    }

    fn fresh_constant(&mut self) -> String {
        loop {
            let c = format!("{FRESH_PREFIX}{}", self.next_fresh);
            self.next_fresh += 1;
            if !self.const_set.contains(&c) {
                return c;
            }
        }
    }

    /// Adds a formula to the branch; returns the closing clash if any.
    fn add(&mut self, item: Item) -> Option<(Clash, Deps)> {
        if item.f.is_bottom() {
            return Some((Clash::Bottom { label: item.label }, item.deps));
        }
        if let Some((atom, positive)) = item.f.as_literal() {
            let atom = atom.clone();
            let slot = self.lits.entry(atom.clone()).or_insert(LitSlot { pos: None, neg: None });
            let (mine, other) = if positive {
                (&mut slot.pos, &slot.neg)
            } else {
                (&mut slot.neg, &slot.pos)
            };
            if mine.is_some() {
                return None;
            }
            *mine = Some((item.label, item.deps.clone()));
            if let Some((ol, od)) = other.clone() {
                let (pos_label, neg_label) = if positive { (item.label, ol) } else { (ol, item.label) };
                return Some((
                    Clash::Complementary {
                        atom,
                        pos_label,
                        neg_label,
                    },
                    item.deps.union(&od),
                ));
            }
            self.wake(&atom);
            return None;
        }
        if self.seen.insert((item.f.clone(), item.label)).is_some() {
            return None;
        }
        match item.f.as_ref() {
            Formula::Top => {}
            Formula::And(_) => self.alpha.push_back(item),
            Formula::Or(_) => {
                let id = self.disjs.len();
                let mut atoms = Vec::new();
                if let Formula::Or(parts) = item.f.as_ref() {
                    for p in parts {
                        if let Some((a, _)) = p.as_literal() {
                            atoms.push(a.clone());
                        }
                    }
                }
                self.disjs.push_back(Disjunction {
                    item,
                    status: DisjStatus::Pending,
                });
                for a in atoms {
                    self.watchers.entry(a).or_default().push_back(id);
                }
                self.age += 1;
                self.fifo.push_back((self.age, Fifo::Disj(id)));
                self.classify(id);
            }
            Formula::Exists(..) => {
                self.age += 1;
                self.fifo.push_back((self.age, Fifo::Exists(item)));
            }
            Formula::Forall(..) => {
                let id = self.universals.len();
                self.universals.push_back(Universal { item, next: 0 });
                if self.constants.is_empty() {
                    self.dormant.push_back(id);
                } else {
                    self.forall_queue.push_back(id);
                }
            }
            _ => unreachable!("NNF literal handled above"),
        }
        None
    }

    fn value(&self, f: &Formula) -> Value {
        if *f == Formula::Top {
            return Value::True;
        }
        if f.is_bottom() {
            return Value::False;
        }
        match f.as_literal() {
            Some((a, positive)) => match self.lits.get(a) {
                Some(slot) => {
                    let (mine, other) = if positive { (&slot.pos, &slot.neg) } else { (&slot.neg, &slot.pos) };
                    if mine.is_some() {
                        Value::True
                    } else if other.is_some() {
                        Value::False
                    } else {
                        Value::Open
                    }
                }
                None => Value::Open,
            },
            None => Value::Open,
        }
    }

    /// Re-examines a pending disjunction after a literal changed.
    fn classify(&mut self, id: usize) {
        if self.disjs[id].status != DisjStatus::Pending {
            return;
        }
        let Formula::Or(parts) = self.disjs[id].item.f.as_ref() else {
            return;
        };
        let mut open = 0;
        for p in parts {
            match self.value(p) {
                Value::True => {
                    self.disjs[id].status = DisjStatus::Done;
                    return;
                }
                Value::Open => open += 1,
                Value::False => {}
            }
        }
        if open <= 1 {
            self.determined.push_back(id);
        }
    }

    fn wake(&mut self, atom: &Atom) {
        if let Some(ids) = self.watchers.get(atom).cloned() {
            for id in ids {
                self.classify(id);
            }
        }
    }

    fn next_step(&mut self, stats: &mut ProveStats) -> Step {
        if let Some(item) = self.alpha.pop_front() {
            return Step::Conj(item);
        }
        while let Some(id) = self.determined.pop_front() {
            if self.disjs[id].status == DisjStatus::Pending {
                self.disjs[id].status = DisjStatus::Done;
                return Step::Disj(self.disjs[id].item.clone());
            }
        }
        while let Some(u) = self.forall_queue.pop_front() {
            let k = self.universals[u].next;
            if k < self.constants.len() {
                self.universals[u].next += 1;
                if k + 1 < self.constants.len() {
                    self.forall_queue.push_back(u);
                } else {
                    self.dormant.push_back(u);
                }
                return Step::Forall(u, self.constants[k].clone());
            }
            self.dormant.push_back(u);
        }
        while let Some((age, entry)) = self.fifo.pop_front() {
            if let Some(last) = self.last_pop {
                if age <= last {
                    stats.agenda_order_violations += 1;
                }
            }
            self.last_pop = Some(age);
            match entry {
                Fifo::Exists(item) => return Step::Exists(item),
                Fifo::Disj(id) => {
                    if self.disjs[id].status == DisjStatus::Pending {
                        self.disjs[id].status = DisjStatus::Done;
                        return Step::Disj(self.disjs[id].item.clone());
                    }
                }
            }
        }
        if self.constants.is_empty() {
            if let Some(&u) = self.dormant.front() {
                return Step::FreshForall(u);
            }
        }
        Step::Saturated
    }

    fn model(&self) -> Structure {
        let positives = self
            .lits
            .iter()
            .filter(|(_, s)| s.pos.is_some())
            .map(|(a, _)| a.clone());
        let constants: Vec<String> = self.constants.iter().cloned().collect();
        herbrand(&constants, &self.relations, positives)
    }
}

/// Tree under construction: a run of single-child nodes followed by
/// the branching children.
#[derive(Debug)]
struct PNode {
    chain: Vec<Linear>,
    children: Vec<PNode>,
}

enum Run {
    Closed { node: PNode, deps: Deps },
    Open(Structure),
    OutOfBudget,
}

struct Search {
    budget: usize,
    spent: usize,
    next_branch_point: u32,
    stats: ProveStats,
}

#[derive(Debug)]
struct Linear {
    introduced: Vec<(Rc<Formula>, Label)>,
    rule: Rule,
    premise: Option<(Rc<Formula>, Label)>,
    deps: Deps,
    clash: Option<Clash>,
}

impl Search {
    /// Expands one branch starting with a node that introduces `intro`.
    fn run(
        &mut self,
        branch: &mut Branch,
        intro: Vec<Item>,
        rule: Rule,
        premise: Option<(Rc<Formula>, Label)>,
        deps: Deps,
    ) -> Run {
        let mut chain: Vec<Linear> = Vec::new();
        let mut pending = Some((intro, rule, premise, deps));
        loop {
            if let Some((intro, rule, premise, deps)) = pending.take() {
                let introduced = intro.iter().map(|i| (i.f.clone(), i.label)).collect();
                chain.push(Linear {
                    introduced,
                    rule,
                    premise,
                    deps,
                    clash: None,
                });
                for item in intro {
                    if let Some((clash, cdeps)) = branch.add(item) {
                        chain.push(Linear {
                            introduced: Vec::new(),
                            rule: Rule::Closure,
                            premise: None,
                            deps: cdeps.clone(),
                            clash: Some(clash),
                        });
                        return Run::Closed {
                            node: assemble(chain, Vec::new()),
                            deps: cdeps,
                        };
                    }
                }
            }
            let step = branch.next_step(&mut self.stats);
            if matches!(step, Step::Saturated) {
                return Run::Open(branch.model());
            }
            if self.spent >= self.budget {
                return Run::OutOfBudget;
            }
            self.spent += 1;
            match step {
                Step::Conj(item) => {
                    let Formula::And(parts) = item.f.as_ref() else { unreachable!() };
                    let intro = parts
                        .iter()
                        .map(|p| Item {
                            f: Rc::new(p.clone()),
                            label: item.label,
                            deps: item.deps.clone(),
                        })
                        .collect();
                    pending = Some((intro, Rule::Conj, Some((item.f.clone(), item.label)), item.deps));
                }
                Step::Exists(item) => {
                    let Formula::Exists(vs, body) = item.f.as_ref() else { unreachable!() };
                    let mut inst = (**body).clone();
                    let mut names = Vec::new();
                    for v in vs {
                        let c = branch.fresh_constant();
                        inst = substitute_constant(&inst, v, &c);
                        names.push(c);
                    }
                    for c in &names {
                        branch.add_constant(c);
                    }
                    let intro = vec![Item {
                        f: Rc::new(inst),
                        label: item.label,
                        deps: item.deps.clone(),
                    }];
                    pending = Some((intro, Rule::Exists(names), Some((item.f.clone(), item.label)), item.deps));
                }
                Step::Forall(u, c) => {
                    let item = branch.universals[u].item.clone();
                    let inst = forall_step(&item.f, &c);
                    let intro = vec![Item {
                        f: Rc::new(inst),
                        label: item.label,
                        deps: item.deps.clone(),
                    }];
                    pending = Some((intro, Rule::Forall(c), Some((item.f.clone(), item.label)), item.deps));
                }
                Step::FreshForall(u) => {
                    let c = branch.fresh_constant();
                    branch.add_constant(&c);
                    let uni = &mut branch.universals[u];
                    uni.next = 1;
                    let item = uni.item.clone();
                    branch.forall_queue.retain(|&x| x != u);
                    branch.dormant.retain(|&x| x != u);
                    branch.dormant.push_back(u);
                    let inst = forall_step(&item.f, &c);
                    let intro = vec![Item {
                        f: Rc::new(inst),
                        label: item.label,
                        deps: item.deps.clone(),
                    }];
                    pending = Some((intro, Rule::Forall(c), Some((item.f.clone(), item.label)), item.deps));
                }
                Step::Disj(item) => return self.branch_on(branch, chain, item),
                Step::Saturated => unreachable!(),
            }
        }
    }

    fn branch_on(&mut self, branch: &mut Branch, chain: Vec<Linear>, item: Item) -> Run {
        let Formula::Or(parts) = item.f.as_ref() else { unreachable!() };
        let b = self.next_branch_point;
        self.next_branch_point += 1;
        self.stats.branch_points += 1;
        let child_deps = item.deps.with(b);
        let mut children = Vec::new();
        let mut total = item.deps.clone();
        for (i, part) in parts.iter().enumerate() {
            let mut child = if i + 1 == parts.len() {
                std::mem::replace(branch, Branch::new(&[]))
            } else {
                branch.clone()
            };
            let intro = vec![Item {
                f: Rc::new(part.clone()),
                label: item.label,
                deps: child_deps.clone(),
            }];
            let run = self.run(
                &mut child,
                intro,
                Rule::Disj,
                Some((item.f.clone(), item.label)),
                child_deps.clone(),
            );
            match run {
                Run::Closed { node, deps } => {
                    if !deps.contains(b) {
                        self.stats.skipped_alternatives += parts.len() - i - 1 + children.len();
                        let kept = prune(node, b);
                        return Run::Closed {
                            node: assemble(chain, kept),
                            deps,
                        };
                    }
                    total = total.union(&deps.without(b));
                    children.push(node);
                }
                other => return other,
            }
        }
        Run::Closed {
            node: assemble(chain, children),
            deps: total,
        }
    }
}

/// Puts a linear chain of nodes above `children`.
fn assemble(mut chain: Vec<Linear>, mut children: Vec<PNode>) -> PNode {
    if children.len() == 1 {
        let only = children.pop().expect("one child");
        chain.extend(only.chain);
        children = only.children;
    }
    PNode { chain, children }
}

/// Removes the nodes that depend on branch point `b`, which the closure
/// below never used. Returns the replacement for `node`.
fn prune(node: PNode, b: u32) -> Vec<PNode> {
    let PNode { mut chain, children } = node;
    chain.retain(|l| l.clash.is_some() || !l.deps.contains(b));
    let children: Vec<PNode> = children.into_iter().flat_map(|c| prune(c, b)).collect();
    if chain.is_empty() {
        return children;
    }
    vec![assemble(chain, children)]
}

fn flatten(root: PNode) -> ClosedTableau {
    let mut nodes = Vec::new();
    push_node(root, None, &mut nodes);
    ClosedTableau { nodes }
}

fn push_node(n: PNode, mut parent: Option<usize>, nodes: &mut Vec<TableauNode>) -> usize {
    let to_sentence = |(f, l): (Rc<Formula>, Label)| LabeledSentence {
        formula: Rc::try_unwrap(f).unwrap_or_else(|rc| (*rc).clone()),
        label: l,
    };
    let mut top = None;
    for l in n.chain {
        let id = nodes.len();
        nodes.push(TableauNode {
            id,
            parent,
            children: Vec::new(),
            introduced: l.introduced.into_iter().map(to_sentence).collect(),
            rule: l.rule,
            premise: l.premise.map(to_sentence),
            clash: l.clash,
        });
        match (top, parent) {
            (Some(_), Some(p)) => nodes[p].children.push(id),
            _ => top = Some(id),
        }
        parent = Some(id);
    }
    let here = parent.expect("chain is never empty");
    for c in n.children {
        let cid = push_node(c, Some(here), nodes);
        nodes[here].children.push(cid);
    }
    top.expect("chain is never empty")
}

/// Convenience: all constants mentioned by labeled sentences with `label`.
pub(crate) fn side_constants<'a>(
    sentences: impl Iterator<Item = &'a LabeledSentence>,
    label: Label,
) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    for s in sentences.filter(|s| s.label == label) {
        s.formula.visit_terms(&mut |t| {
            if let Term::Const(c) = t {
                out.insert(c.clone());
            }
        });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::to_nnf;
    use crate::syntax::parse;

    fn nnf(s: &str) -> Formula {
        to_nnf(&parse(s).unwrap())
    }

    #[test]
    fn two_branch_refutation() {
        let input = vec![
            LabeledSentence::left(nnf("exists x. (A(x) & !B(x)) & C(x)")),
            LabeledSentence::right(nnf("forall y. (!A(y) & E(y)) | B(y)")),
        ];
        let Outcome::Closed(t) = prove(&input, 10_000).unwrap() else {
            panic!("expected a closed tableau")
        };
        t.check().unwrap();
        assert_eq!(t.branch_count(), 2);
        let clashes = t.clashes();
        let a = Atom::new("A", vec![Term::constant("c0")]);
        let b = Atom::new("B", vec![Term::constant("c0")]);
        assert_eq!(
            clashes[0],
            &Clash::Complementary {
                atom: a,
                pos_label: Label::L,
                neg_label: Label::R
            }
        );
        assert_eq!(
            clashes[1],
            &Clash::Complementary {
                atom: b,
                pos_label: Label::R,
                neg_label: Label::L
            }
        );
    }

    #[test]
    fn immediate_clash() {
        let input = vec![
            LabeledSentence::left(nnf("P(c)")),
            LabeledSentence::right(nnf("!P(c)")),
        ];
        let (out, stats) = prove_with_stats(&input, 10).unwrap();
        let Outcome::Closed(t) = out else { panic!() };
        assert_eq!(t.nodes.len(), 2);
        assert_eq!(stats.rule_applications, 0);
    }

    #[test]
    fn single_atom_is_satisfiable() {
        let input = vec![LabeledSentence::left(nnf("P(c)"))];
        match prove(&input, 10).unwrap() {
            Outcome::Satisfiable(m) => {
                assert_eq!(m.domain, 1);
                assert!(m.holds("P", &[0]));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn universal_without_constants_gets_one() {
        let input = vec![LabeledSentence::left(nnf("forall x. P(x)"))];
        let Outcome::Satisfiable(m) = prove(&input, 10).unwrap() else { panic!() };
        assert_eq!(m.domain, 1);
        assert!(m.holds("P", &[0]));
    }

    #[test]
    fn budget_exhaustion() {
        let input = vec![LabeledSentence::left(nnf(
            "exists x. P(x) & (forall y. P(y) -> exists z. R(y, z) & P(z))",
        ))];
        assert!(matches!(prove(&input, 50).unwrap(), Outcome::Unknown { budget_spent: 50 }));
    }

    #[test]
    fn rejects_bad_input() {
        let open = crate::syntax::parse_with_free_vars("P(x)", &["x"]).unwrap();
        assert!(matches!(
            prove(&[LabeledSentence::left(open)], 10),
            Err(TableauError::NotSentence(_))
        ));
        assert!(matches!(
            prove(&[LabeledSentence::left(parse("!(A & B)").unwrap())], 10),
            Err(TableauError::NotNnf(_))
        ));
    }

    #[test]
    fn herbrand_extraction() {
        let m = saturated_branch_model(&[nnf("P(c)")]).unwrap();
        assert_eq!(m.domain, 1);
        assert!(m.holds("P", &[0]));
        let m = saturated_branch_model(&[nnf("P(c)"), nnf("!Q(c)")]).unwrap();
        assert!(m.relations["Q"].is_empty());
        let branch = [nnf("forall x. P(x)"), nnf("P(c)")];
        let m = saturated_branch_model(&branch).unwrap();
        assert!(m.holds("P", &[0]));
        assert_eq!(satisfies(&m, &branch[0]), Ok(true));
        assert!(matches!(
            saturated_branch_model(&[nnf("forall x. P(x)"), nnf("Q(c)")]),
            Err(TableauError::NotSaturated(_))
        ));
    }

    #[test]
    fn backjumping_skips_irrelevant_alternatives() {
        let input = vec![
            LabeledSentence::left(nnf("A(a) | B(a)")),
            LabeledSentence::left(nnf("C(a) | D(a)")),
            LabeledSentence::left(nnf("P(a)")),
            LabeledSentence::right(nnf("!P(a) | Q(b)")),
            LabeledSentence::right(nnf("!Q(b)")),
        ];
        let (out, _) = prove_with_stats(&input, 1000).unwrap();
        let Outcome::Closed(t) = out else { panic!() };
        t.check().unwrap();
        assert_eq!(t.branch_count(), 2);
    }

    #[test]
    fn trace_shape() {
        let input = vec![
            LabeledSentence::left(nnf("exists x. (A(x) & !B(x)) & C(x)")),
            LabeledSentence::right(nnf("forall y. (!A(y) & E(y)) | B(y)")),
        ];
        let Outcome::Closed(t) = prove(&input, 10_000).unwrap() else { panic!() };
        let trace = t.trace();
        assert!(trace.starts_with("[root] exists x. (A(x) & !B(x)) & C(x) ^L, forall y. !A(y) & E(y) | B(y) ^R\n"));
        assert!(trace.contains("[exists c0] (A(c0) & !B(c0)) & C(c0) ^L"));
        assert!(trace.contains("[closed] A(c0) ^L vs !A(c0) ^R"));
        assert!(trace.contains("[closed] B(c0) ^R vs !B(c0) ^L"));
    }
}
