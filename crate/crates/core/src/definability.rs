//! Explicit definitions, Padoa counterexamples, separators between
//! inconsistent theories and polarity-respecting rewrites, all obtained
//! from interpolants.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use thiserror::Error;

use crate::interpolation::{craig_interpolant, entails, small_model, InterpolationError};
use crate::logic::{abstract_constant, fresh_variable, signature_of, simplify, Atom, Formula, FreshSupply, Signature, Term};
use crate::models::{count_structures, joint_signature, Layout, RawStructure, Structure};
use crate::tableau::Outcome;

/// A finite set of sentences.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Theory {
    pub name: String,
    pub sentences: Vec<Formula>,
}

impl Theory {
    pub fn new(name: impl Into<String>, sentences: Vec<Formula>) -> Self {
        Theory {
            name: name.into(),
            sentences,
        }
    }

    pub fn conjunction(&self) -> Formula {
        Formula::and(self.sentences.clone())
    }

    pub fn signature(&self) -> Signature {
        joint_signature(&self.sentences)
    }
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum DefinabilityError {
    #[error("no proof found within the budget")]
    NotProvedWithinBudget,
    #[error("not implicitly definable: models {} and {} agree on the base symbols", .0.to_json(), .1.to_json())]
    ImplicitDefinabilityRefuted(Structure, Structure),
    #[error("the theories are jointly consistent: {}", .0.to_json())]
    JointlyConsistent(Structure),
    #[error("relation {0} does not occur in the theory")]
    UnknownRelation(String),
    #[error("result fails its check: {0}")]
    CheckFailed(String),
    #[error(transparent)]
    Interpolation(InterpolationError),
}

impl From<InterpolationError> for DefinabilityError {
    fn from(e: InterpolationError) -> Self {
        match e {
            InterpolationError::NotProvedWithinBudget => DefinabilityError::NotProvedWithinBudget,
            other => DefinabilityError::Interpolation(other),
        }
    }
}

/// An explicit definition `φ(x₁..xₙ)` of a relation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Definition {
    pub vars: Vec<String>,
    pub formula: Formula,
}

impl Definition {
    /// `∀x⃗ (R(x⃗) ↔ φ(x⃗))`.
    pub fn biconditional(&self, relation: &str) -> Formula {
        let atom = Formula::Atom(Atom::new(
            relation,
            self.vars.iter().map(|v| Term::Var(v.clone())).collect(),
        ));
        Formula::forall(self.vars.clone(), Formula::iff(atom, self.formula.clone()))
    }
}

/// Largest structure count enumerated per domain size by the Padoa screen.
pub const PADOA_SCREEN_CAP: u128 = 1 << 18;

/// Name for a primed copy of `name` not already used.
fn primed(name: &str, taken: &BTreeSet<String>) -> String {
    let mut p = format!("{name}'");
    while taken.contains(&p) {
        p.push('\'');
    }
    p
}

fn all_relations(sigma: &Theory) -> BTreeMap<String, usize> {
    sigma.signature().relations
}

/// Synthesizes an explicit definition of `relation` in terms of `tau`
/// relative to `sigma`. A Padoa search over small domains runs first.
pub fn explicit_definition(
    sigma: &Theory,
    relation: &str,
    tau: &BTreeSet<String>,
    budget: usize,
) -> Result<Definition, DefinabilityError> {
    let rels = all_relations(sigma);
    let arity = *rels
        .get(relation)
        .ok_or_else(|| DefinabilityError::UnknownRelation(relation.to_string()))?;
    if let Some((a, b)) = padoa_search(sigma, relation, tau, 3, PADOA_SCREEN_CAP) {
        return Err(DefinabilityError::ImplicitDefinabilityRefuted(a, b));
    }
    let names: BTreeSet<String> = rels.keys().cloned().collect();
    let mut taken = names.clone();
    let mut prime = BTreeMap::new();
    for r in &names {
        let p = primed(r, &taken);
        taken.insert(p.clone());
        prime.insert(r.clone(), p);
    }
    let mut supply = FreshSupply::avoiding(sigma.signature().constants);
    let frozen: Vec<String> = (0..arity).map(|_| supply.next_constant()).collect();
    let frozen_terms: Vec<Term> = frozen.iter().map(|c| Term::Const(c.clone())).collect();

    let sigma_conj = sigma.conjunction();
    let sigma_primed = sigma_conj.rename_relations(&prime);
    let mut bridges = Vec::new();
    for s in tau {
        let Some(&n) = rels.get(s) else { continue };
        let vars: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
        let args: Vec<Term> = vars.iter().map(|v| Term::Var(v.clone())).collect();
        bridges.push(Formula::forall(
            vars.clone(),
            Formula::iff(
                Formula::Atom(Atom::new(s.clone(), args.clone())),
                Formula::Atom(Atom::new(prime[s].clone(), args)),
            ),
        ));
    }
    let lhs = Formula::and(vec![
        sigma_conj.clone(),
        Formula::Atom(Atom::new(relation, frozen_terms.clone())),
    ]);
    let mut premises = vec![sigma_primed];
    premises.extend(bridges);
    let rhs = Formula::implies(
        Formula::and(premises),
        Formula::Atom(Atom::new(prime[relation].clone(), frozen_terms)),
    );
    let theta = craig_interpolant(&lhs, &rhs, budget)?;

    let mut avoid = theta.all_vars();
    avoid.extend(theta.constants());
    let mut vars = Vec::new();
    let mut body = theta;
    for (i, c) in frozen.iter().enumerate() {
        let base = if arity == 1 { "x".to_string() } else { format!("x{}", i + 1) };
        let v = fresh_variable(&base, &avoid);
        avoid.insert(v.clone());
        body = abstract_constant(&body, c, &v).expect("fresh variable");
        vars.push(v);
    }
    let def = Definition {
        vars,
        formula: simplify(&body),
    };
    check_definition(sigma, relation, &def, budget)?;
    Ok(def)
}

/// Re-proves `Σ ⊨ ∀x⃗(R(x⃗) → φ)` and `Σ ⊨ ∀x⃗(φ → R(x⃗))`.
pub fn check_definition(
    sigma: &Theory,
    relation: &str,
    def: &Definition,
    budget: usize,
) -> Result<(), DefinabilityError> {
    let atom = Formula::Atom(Atom::new(
        relation,
        def.vars.iter().map(|v| Term::Var(v.clone())).collect(),
    ));
    let ax = sigma.conjunction();
    for goal in [
        Formula::implies(atom.clone(), def.formula.clone()),
        Formula::implies(def.formula.clone(), atom.clone()),
    ] {
        let goal = Formula::forall(def.vars.clone(), goal);
        match entails(&ax, &goal, budget).map_err(|e| DefinabilityError::CheckFailed(e.to_string()))? {
            Outcome::Closed(_) => {}
            Outcome::Satisfiable(m) => {
                return Err(DefinabilityError::CheckFailed(format!(
                    "definition fails in {}",
                    m.to_json()
                )))
            }
            Outcome::Unknown { .. } => return Err(DefinabilityError::NotProvedWithinBudget),
        }
    }
    if def.formula.relations().iter().any(|r| r.contains('\'') || r == relation) {
        return Err(DefinabilityError::CheckFailed("definition mentions the defined or a primed symbol".into()));
    }
    Ok(())
}

/// Two models of `sigma` on the same domain that agree on `tau` but differ
/// on `relation`, searching domains up to `max_size`.
pub fn padoa_counterexample(
    sigma: &Theory,
    relation: &str,
    tau: &BTreeSet<String>,
    max_size: usize,
) -> Option<(Structure, Structure)> {
    padoa_search(sigma, relation, tau, max_size, u128::MAX)
}

/// Padoa search that skips domain sizes with more than `cap` structures.
pub fn padoa_search(
    sigma: &Theory,
    relation: &str,
    tau: &BTreeSet<String>,
    max_size: usize,
    cap: u128,
) -> Option<(Structure, Structure)> {
    let mut sig = sigma.signature();
    if !sig.relations.contains_key(relation) {
        sig.relations.insert(relation.to_string(), 0);
    }
    let also: Vec<String> = tau.iter().filter(|s| !sig.relations.contains_key(*s)).cloned().collect();
    for s in also {
        sig.relations.insert(s, 1);
    }
    let layout = Layout::new(&sig);
    let compiled: Vec<_> = sigma
        .sentences
        .iter()
        .map(|f| layout.compile(f, &[]).expect("theory over its own signature"))
        .collect();
    let tau_idx: Vec<usize> = layout
        .relations
        .iter()
        .enumerate()
        .filter(|(_, (r, _))| tau.contains(r))
        .map(|(i, _)| i)
        .collect();
    let target = layout
        .relations
        .iter()
        .position(|(r, _)| r == relation)
        .expect("target relation in layout");
    for n in 1..=max_size {
        if !count_structures(&sig, n).is_some_and(|c| c <= cap) {
            continue;
        }
        let mut groups: HashMap<Vec<Vec<bool>>, RawStructure> = HashMap::new();
        let mut raw = RawStructure::first(&layout, n);
        loop {
            if compiled.iter().all(|c| raw.eval(c, &mut Vec::new())) {
                let key: Vec<Vec<bool>> = tau_idx.iter().map(|&i| raw.bits[i].clone()).collect();
                match groups.get(&key) {
                    Some(first) if first.bits[target] != raw.bits[target] => {
                        return Some((first.to_structure(&layout), raw.to_structure(&layout)));
                    }
                    Some(_) => {}
                    None => {
                        groups.insert(key, raw.clone());
                    }
                }
            }
            if !raw.advance() {
                break;
            }
        }
    }
    None
}

/// A sentence over the common symbols true in every model of `sigma1` and
/// false in every model of `sigma2`, for jointly inconsistent theories.
pub fn robinson_separator(sigma1: &Theory, sigma2: &Theory, budget: usize) -> Result<Formula, DefinabilityError> {
    let a = sigma1.conjunction();
    let b = sigma2.conjunction();
    let not_b = Formula::negate(b.clone());
    match craig_interpolant(&a, &not_b, budget) {
        Ok(theta) => Ok(theta),
        Err(InterpolationError::NotValid(m)) => Err(DefinabilityError::JointlyConsistent(m)),
        Err(InterpolationError::NotProvedWithinBudget) => match small_model(&[a, b], 3, 1 << 16) {
            Some(m) => Err(DefinabilityError::JointlyConsistent(m)),
            None => Err(DefinabilityError::NotProvedWithinBudget),
        },
        Err(e) => Err(e.into()),
    }
}

/// An equivalent of `phi` in which `relation` occurs only positively,
/// read off an interpolant for `φ → (∀x⃗(R x⃗ → R′x⃗) → φ[R/R′])`.
pub fn monotone_rewrite(phi: &Formula, relation: &str, budget: usize) -> Result<Formula, DefinabilityError> {
    let rep = signature_of(phi);
    let arity = rep.arities.get(relation).copied().unwrap_or(0);
    let taken: BTreeSet<String> = rep.relations.clone();
    let p = primed(relation, &taken);
    let vars: Vec<String> = (1..=arity).map(|i| format!("x{i}")).collect();
    let args: Vec<Term> = vars.iter().map(|v| Term::Var(v.clone())).collect();
    let up = Formula::forall(
        vars,
        Formula::implies(
            Formula::Atom(Atom::new(relation, args.clone())),
            Formula::Atom(Atom::new(p.clone(), args)),
        ),
    );
    let renamed = phi.rename_relations(&[(relation.to_string(), p)].into_iter().collect());
    let rhs = Formula::implies(up, renamed);
    let theta = craig_interpolant(phi, &rhs, budget)?;
    if signature_of(&theta).relsig_neg.contains(relation) {
        return Err(DefinabilityError::CheckFailed(format!(
            "{relation} occurs negatively in {theta}"
        )));
    }
    for (a, b) in [(phi, &theta), (&theta, phi)] {
        match entails(a, b, budget).map_err(|e| DefinabilityError::CheckFailed(e.to_string()))? {
            Outcome::Closed(_) => {}
            Outcome::Satisfiable(m) => {
                return Err(DefinabilityError::CheckFailed(format!(
                    "rewrite not equivalent, see {}",
                    m.to_json()
                )))
            }
            Outcome::Unknown { .. } => return Err(DefinabilityError::NotProvedWithinBudget),
        }
    }
    Ok(theta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse, parse_with_free_vars};

    fn theory(lines: &[&str]) -> Theory {
        Theory::new("t", lines.iter().map(|l| parse(l).unwrap()).collect())
    }

    fn set(xs: &[&str]) -> BTreeSet<String> {
        xs.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn definition_through_equivalence() {
        let sigma = theory(&["forall x. P(x) <-> Q(x)"]);
        let def = explicit_definition(&sigma, "P", &set(&["Q"]), 10_000).unwrap();
        assert_eq!(def.vars, vec!["x".to_string()]);
        assert!(def.formula.relations().iter().all(|r| r == "Q"));
        assert!(padoa_counterexample(&sigma, "P", &set(&["Q"]), 3).is_none());
    }

    #[test]
    fn padoa_finds_pair() {
        let sigma = theory(&["exists x. P(x) | Q(x)"]);
        let (a, b) = padoa_counterexample(&sigma, "P", &set(&["Q"]), 3).unwrap();
        assert_eq!(a.domain, b.domain);
        assert_eq!(a.relations["Q"], b.relations["Q"]);
        assert_ne!(a.relations["P"], b.relations["P"]);
    }

    #[test]
    fn separators() {
        let s1 = theory(&["A(c)"]);
        let s2 = theory(&["!A(c)"]);
        assert_eq!(robinson_separator(&s1, &s2, 100).unwrap(), parse("A(c)").unwrap());
        let s1 = theory(&["forall x. P(x)"]);
        let s2 = theory(&["exists x. !P(x)"]);
        assert_eq!(robinson_separator(&s1, &s2, 100).unwrap(), parse("forall x. P(x)").unwrap());
        let s1 = theory(&["A(c)"]);
        let s2 = theory(&["B(c)"]);
        match robinson_separator(&s1, &s2, 100) {
            Err(DefinabilityError::JointlyConsistent(m)) => assert_eq!(m.domain, 1),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn monotone_rewrites() {
        let theta = monotone_rewrite(&parse("exists x. R(x)").unwrap(), "R", 1000).unwrap();
        assert!(!signature_of(&theta).relsig_neg.contains("R"));
        assert_eq!(monotone_rewrite(&Formula::Top, "R", 100).unwrap(), Formula::Top);
        let neg = parse("!R(a) | R(a)").unwrap();
        let theta = monotone_rewrite(&neg, "R", 1000).unwrap();
        assert!(!signature_of(&theta).relsig_neg.contains("R"));
    }

    pub(crate) fn tallest_theory() -> Theory {
        theory(&[
            "forall x. !TallerThan(x, x)",
            "forall x y z. TallerThan(x, y) & TallerThan(y, z) -> TallerThan(x, z)",
            "forall x y. TallerThan(y, x) -> !Tallest(x)",
            "exists x. Tallest(x)",
            "forall x y. Tallest(x) & !Tallest(y) -> TallerThan(x, y)",
            "exists x y z. TallerThan(x, y) & TallerThan(y, z)",
        ])
    }

    #[test]
    fn tallest_definition() {
        let sigma = tallest_theory();
        let t = std::time::Instant::now();
        let def = explicit_definition(&sigma, "Tallest", &set(&["TallerThan"]), 100_000).unwrap();
        assert!(t.elapsed().as_secs() < 5);
        assert_eq!(def.formula.relations(), set(&["TallerThan"]));
        let expected = Definition {
            vars: vec!["x".into()],
            formula: parse_with_free_vars("!exists y. TallerThan(y, x)", &["x"]).unwrap(),
        };
        check_definition(&sigma, "Tallest", &expected, 100_000).unwrap();
    }

    #[test]
    fn tallest_padoa_pair() {
        let sigma = tallest_theory();
        let (a, b) = padoa_counterexample(&sigma, "TallerThan", &set(&["Tallest"]), 3).unwrap();
        assert_eq!(a.domain, 3);
        assert_eq!(a.relations["Tallest"], b.relations["Tallest"]);
        assert_ne!(a.relations["TallerThan"], b.relations["TallerThan"]);
    }

    #[test]
    fn path_definition() {
        let sigma = theory(&[
            "forall x y. V2(x, y) <-> exists z. R(x, z) & R(z, y)",
            "forall x y. V4(x, y) <-> exists z1 z2 z3. R(x, z1) & R(z1, z2) & R(z2, z3) & R(z3, y)",
        ]);
        let t = std::time::Instant::now();
        let def = explicit_definition(&sigma, "V4", &set(&["V2"]), 200_000).unwrap();
        assert!(t.elapsed().as_secs() < 20);
        let expected = Definition {
            vars: def.vars.clone(),
            formula: parse_with_free_vars(
                &format!("exists u. V2({a}, u) & V2(u, {b})", a = def.vars[0], b = def.vars[1]),
                &[&def.vars[0], &def.vars[1]],
            )
            .unwrap(),
        };
        check_definition(&sigma, "V4", &expected, 200_000).unwrap();
        assert_eq!(def.formula.relations(), set(&["V2"]));
    }
}
