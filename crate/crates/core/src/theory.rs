//! Interpolation under a finite background theory.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::definability::Theory;
use crate::interpolation::{craig_interpolant, entails, InterpolationError};
use crate::logic::{Formula, Symbol};
use crate::models::Structure;
use crate::tableau::Outcome;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum TheoryError {
    #[error("the theory cannot be split between the two signatures")]
    NotSplittable,
    #[error("no proof found within the budget")]
    NotProvedWithinBudget,
    #[error("the entailment fails: {}", .0.to_json())]
    NotEntailed(Structure),
    #[error("result fails its check: {0}")]
    CheckFailed(String),
    #[error(transparent)]
    Interpolation(InterpolationError),
}

impl From<InterpolationError> for TheoryError {
    fn from(e: InterpolationError) -> Self {
        match e {
            InterpolationError::NotProvedWithinBudget => TheoryError::NotProvedWithinBudget,
            InterpolationError::NotValid(m) => TheoryError::NotEntailed(m),
            other => TheoryError::Interpolation(other),
        }
    }
}

/// A decomposition `Σ = Σ₁ ∪ Σ₂`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplitResult {
    pub sigma1: Theory,
    pub sigma2: Theory,
}

fn symbols_of(sentences: &[Formula]) -> BTreeSet<Symbol> {
    sentences.iter().flat_map(|f| f.symbols()).collect()
}

impl SplitResult {
    /// Whether this is a valid split for `sigma_sig` and `tau_sig`.
    pub fn respects(&self, sigma_sig: &BTreeSet<Symbol>, tau_sig: &BTreeSet<Symbol>) -> bool {
        let mut left = symbols_of(&self.sigma1.sentences);
        left.extend(sigma_sig.iter().cloned());
        let mut right = symbols_of(&self.sigma2.sentences);
        right.extend(tau_sig.iter().cloned());
        left.intersection(&right)
            .all(|s| sigma_sig.contains(s) && tau_sig.contains(s))
    }
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, mut x: usize) -> usize {
        while self.0[x] != x {
            self.0[x] = self.0[self.0[x]];
            x = self.0[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Finds a split of `sigma` whose first part may use `sigma_sig` and whose
/// second part may use `tau_sig`, sharing only symbols in both.
pub fn split_theory(
    sigma: &Theory,
    sigma_sig: &BTreeSet<Symbol>,
    tau_sig: &BTreeSet<Symbol>,
) -> Option<SplitResult> {
    let n = sigma.sentences.len();
    let (left, right) = (n, n + 1);
    let mut uf = UnionFind((0..n + 2).collect());
    let mut owner: std::collections::BTreeMap<Symbol, usize> = Default::default();
    for (i, f) in sigma.sentences.iter().enumerate() {
        for s in f.symbols() {
            match (sigma_sig.contains(&s), tau_sig.contains(&s)) {
                (true, true) => {}
                (true, false) => uf.union(i, left),
                (false, true) => uf.union(i, right),
                (false, false) => {
                    let first = *owner.entry(s).or_insert(i);
                    uf.union(i, first);
                }
            }
        }
    }
    if uf.find(left) == uf.find(right) {
        return None;
    }
    let right_root = uf.find(right);
    let (mut s1, mut s2) = (Vec::new(), Vec::new());
    for (i, f) in sigma.sentences.iter().enumerate() {
        if uf.find(i) == right_root {
            s2.push(f.clone());
        } else {
            s1.push(f.clone());
        }
    }
    Some(SplitResult {
        sigma1: Theory::new(format!("{}_1", sigma.name), s1),
        sigma2: Theory::new(format!("{}_2", sigma.name), s2),
    })
}

/// Re-proves `Σ ⊨ φ → θ` and `Σ ⊨ θ → ψ`.
fn check_under(sigma: &Theory, phi: &Formula, theta: &Formula, psi: &Formula, budget: usize) -> Result<(), TheoryError> {
    let ax = sigma.conjunction();
    for (a, b) in [(phi, theta), (theta, psi)] {
        let lhs = Formula::and(vec![ax.clone(), a.clone()]);
        match entails(&lhs, b, budget).map_err(|e| TheoryError::CheckFailed(e.to_string()))? {
            Outcome::Closed(_) => {}
            Outcome::Satisfiable(m) => {
                return Err(TheoryError::CheckFailed(format!("entailment fails in {}", m.to_json())))
            }
            Outcome::Unknown { .. } => return Err(TheoryError::NotProvedWithinBudget),
        }
    }
    Ok(())
}

fn check_signature(theta: &Formula, allowed: &BTreeSet<Symbol>) -> Result<(), TheoryError> {
    let extra: Vec<String> = theta
        .symbols()
        .difference(allowed)
        .map(|s| s.to_string())
        .collect();
    if extra.is_empty() {
        Ok(())
    } else {
        Err(TheoryError::CheckFailed(format!("disallowed symbols {}", extra.join(", "))))
    }
}

fn check_free_vars(phi: &Formula, psi: &Formula, theta: &Formula) -> Result<(), TheoryError> {
    let shared: BTreeSet<String> = phi.free_vars().intersection(&psi.free_vars()).cloned().collect();
    if theta.free_vars().is_subset(&shared) {
        Ok(())
    } else {
        Err(TheoryError::CheckFailed("interpolant has unshared free variables".into()))
    }
}

/// Interpolant under `sigma` that may use the symbols of `sigma`.
pub fn weak_interpolant(sigma: &Theory, phi: &Formula, psi: &Formula, budget: usize) -> Result<Formula, TheoryError> {
    let lhs = Formula::and(vec![sigma.conjunction(), phi.clone()]);
    let theta = craig_interpolant(&lhs, psi, budget)?;
    let shared: BTreeSet<Symbol> = phi.symbols().intersection(&psi.symbols()).cloned().collect();
    let mut allowed = shared;
    allowed.extend(symbols_of(&sigma.sentences));
    check_signature(&theta, &allowed)?;
    check_free_vars(phi, psi, &theta)?;
    check_under(sigma, phi, &theta, psi, budget)?;
    Ok(theta)
}

/// Interpolant under `sigma` over the symbols shared by `phi` and `psi`.
pub fn strong_interpolant(sigma: &Theory, phi: &Formula, psi: &Formula, budget: usize) -> Result<Formula, TheoryError> {
    let (sp, sq) = (phi.symbols(), psi.symbols());
    let split = split_theory(sigma, &sp, &sq).ok_or(TheoryError::NotSplittable)?;
    let lhs = Formula::and(vec![split.sigma1.conjunction(), phi.clone()]);
    let rhs = Formula::implies(split.sigma2.conjunction(), psi.clone());
    let theta = craig_interpolant(&lhs, &rhs, budget)?;
    let shared: BTreeSet<Symbol> = sp.intersection(&sq).cloned().collect();
    check_signature(&theta, &shared)?;
    check_free_vars(phi, psi, &theta)?;
    check_under(sigma, phi, &theta, psi, budget)?;
    Ok(theta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse;

    fn theory(lines: &[&str]) -> Theory {
        Theory::new("s", lines.iter().map(|l| parse(l).unwrap()).collect())
    }

    fn rels(xs: &[&str]) -> BTreeSet<Symbol> {
        xs.iter().map(|s| Symbol::Relation(s.to_string())).collect()
    }

    #[test]
    fn weak_under_inclusion() {
        let sigma = theory(&["forall x. P(x) -> Q(x)"]);
        let phi = parse("P(c)").unwrap();
        let psi = parse("Q(c) | S(c)").unwrap();
        let theta = weak_interpolant(&sigma, &phi, &psi, 1000).unwrap();
        assert!(theta.relations().iter().all(|r| r == "P" || r == "Q"));
        assert!(strong_interpolant(&sigma, &phi, &psi, 1000) == Err(TheoryError::NotSplittable));
    }

    #[test]
    fn splits() {
        let sigma = theory(&["forall x. P(x) -> Q(x)"]);
        assert!(split_theory(&sigma, &rels(&["P"]), &rels(&["Q"])).is_none());
        let empty = Theory::new("e", vec![]);
        let s = split_theory(&empty, &rels(&["P"]), &rels(&["Q"])).unwrap();
        assert!(s.sigma1.sentences.is_empty() && s.sigma2.sentences.is_empty());
        let single = theory(&["exists x. P(x)", "forall x. Q(x)", "exists x. S(x)"]);
        let s = split_theory(&single, &rels(&["P"]), &rels(&["Q"])).unwrap();
        assert!(s.respects(&rels(&["P"]), &rels(&["Q"])));
        assert_eq!(s.sigma2.sentences, vec![parse("forall x. Q(x)").unwrap()]);
    }

    #[test]
    fn strong_over_shared_symbols() {
        let sigma = theory(&["exists x. P(x)", "exists x. Q(x)"]);
        let phi = parse("forall x. P(x) -> A(x)").unwrap();
        let psi = parse("exists x. A(x)").unwrap();
        let theta = strong_interpolant(&sigma, &phi, &psi, 1000).unwrap();
        assert_eq!(theta.relations(), ["A".to_string()].into_iter().collect());
    }

    #[test]
    fn empty_theory_matches_plain_interpolant() {
        let phi = parse("(exists x. Cat(x)) & (forall x. Cat(x) -> Big(x) & Green(x))").unwrap();
        let psi = parse("exists x. Big(x) & (Cat(x) | Dog(x))").unwrap();
        let empty = Theory::new("e", vec![]);
        let plain = craig_interpolant(&phi, &psi, 1000).unwrap();
        assert_eq!(strong_interpolant(&empty, &phi, &psi, 1000).unwrap(), plain);
    }
}
