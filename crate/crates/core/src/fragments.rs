//! Syntactic membership in decidable fragments and their interpolation
//! status.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::logic::{Atom, Formula, Term};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CipStatus {
    Has,
    Lacks,
    NotApplicable,
}

impl fmt::Display for CipStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CipStatus::Has => "has CIP",
            CipStatus::Lacks => "lacks CIP",
            CipStatus::NotApplicable => "-",
        })
    }
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum FragmentError {
    #[error("unknown fragment {0}; expected one of FO, FO2, C2, GFO, GNFO, UNFO, FF, FL, ML")]
    UnknownFragment(String),
}

/// Interpolation status of a named fragment.
pub fn cip_status(fragment: &str) -> Result<CipStatus, FragmentError> {
    let key: String = fragment
        .chars()
        .map(|c| match c {
            '²' | '₂' => '2',
            c => c.to_ascii_uppercase(),
        })
        .collect();
    match key.as_str() {
        "FO" | "GNFO" | "UNFO" | "ML" => Ok(CipStatus::Has),
        "FO2" | "C2" | "GFO" | "FF" | "FL" => Ok(CipStatus::Lacks),
        _ => Err(FragmentError::UnknownFragment(fragment.to_string())),
    }
}

/// Fragment flags of one formula.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FragmentReport {
    pub quantifier_free: bool,
    pub relativized: bool,
    pub relativizers: BTreeSet<String>,
    pub two_variable: bool,
    pub guarded: bool,
    pub unary_negation: bool,
    /// Computed for equality-free input without the self-guarded
    /// refinement, so it is a best-effort flag.
    pub guarded_negation: bool,
}

impl FragmentReport {
    /// `(fragment, member, status)` rows in display order.
    pub fn rows(&self) -> Vec<(String, bool, CipStatus)> {
        let rel: Vec<&str> = self.relativizers.iter().map(String::as_str).collect();
        vec![
            ("QF".to_string(), self.quantifier_free, CipStatus::NotApplicable),
            (format!("U-relativized U={{{}}}", rel.join(",")), self.relativized, CipStatus::NotApplicable),
            ("FO2".to_string(), self.two_variable, CipStatus::Lacks),
            ("GFO".to_string(), self.guarded, CipStatus::Lacks),
            ("UNFO".to_string(), self.unary_negation, CipStatus::Has),
            ("GNFO (best effort)".to_string(), self.guarded_negation, CipStatus::Has),
        ]
    }

    pub fn table(&self) -> String {
        let mut out = String::new();
        for (name, member, status) in self.rows() {
            out.push_str(&format!("{name:<24} {:<5} {status}\n", if member { "yes" } else { "no" }));
        }
        out
    }
}

pub fn classify(phi: &Formula, relativizers: &BTreeSet<String>) -> FragmentReport {
    let core = desugar(phi);
    FragmentReport {
        quantifier_free: phi.is_quantifier_free(),
        relativized: relativized(&core, relativizers),
        relativizers: relativizers.clone(),
        two_variable: variable_names(&minimal_renaming(phi)).len() <= 2,
        guarded: guarded(&core),
        unary_negation: unary_negation(&core),
        guarded_negation: guarded_negation(&core),
    }
}

/// Negation of `f` with one layer pushed inward where this is free.
fn flip(f: &Formula) -> Formula {
    match f {
        Formula::Not(inner) => (**inner).clone(),
        Formula::Or(parts) => Formula::And(parts.iter().map(flip).collect()),
        other => Formula::Not(Box::new(other.clone())),
    }
}

/// Rewrites every `∀x⃗ φ` to `¬∃x⃗ ¬φ`.
fn desugar(f: &Formula) -> Formula {
    match f {
        Formula::Atom(_) | Formula::Top => f.clone(),
        Formula::Not(g) => Formula::Not(Box::new(desugar(g))),
        Formula::And(ps) => Formula::And(ps.iter().map(desugar).collect()),
        Formula::Or(ps) => Formula::Or(ps.iter().map(desugar).collect()),
        Formula::Exists(vs, b) => Formula::Exists(vs.clone(), Box::new(desugar(b))),
        Formula::Forall(vs, b) => Formula::Not(Box::new(Formula::Exists(vs.clone(), Box::new(desugar(&flip(b)))))),
    }
}

/// Atoms among the conjuncts of `body`, looking through nested `∧`.
fn conjunct_atoms(body: &Formula) -> Vec<&Atom> {
    match body {
        Formula::Atom(a) => vec![a],
        Formula::And(ps) => ps.iter().flat_map(conjunct_atoms).collect(),
        _ => Vec::new(),
    }
}

fn atom_vars(a: &Atom) -> BTreeSet<String> {
    a.args
        .iter()
        .filter_map(|t| match t {
            Term::Var(v) => Some(v.clone()),
            Term::Const(_) => None,
        })
        .collect()
}

fn all_sub(f: &Formula, pred: &mut impl FnMut(&Formula) -> bool) -> bool {
    if !pred(f) {
        return false;
    }
    match f {
        Formula::Atom(_) | Formula::Top => true,
        Formula::Not(g) | Formula::Exists(_, g) | Formula::Forall(_, g) => all_sub(g, pred),
        Formula::And(ps) | Formula::Or(ps) => ps.iter().all(|p| all_sub(p, pred)),
    }
}

fn relativized(core: &Formula, us: &BTreeSet<String>) -> bool {
    all_sub(core, &mut |f| match f {
        Formula::Exists(vs, body) => {
            let guards = conjunct_atoms(body);
            vs.iter().all(|v| {
                guards
                    .iter()
                    .any(|a| us.contains(&a.relation) && a.args == [Term::Var(v.clone())])
            })
        }
        _ => true,
    })
}

fn guarded(core: &Formula) -> bool {
    all_sub(core, &mut |f| match f {
        Formula::Exists(vs, body) => {
            let mut scope = body.free_vars();
            scope.extend(vs.iter().cloned());
            conjunct_atoms(body).iter().any(|a| atom_vars(a).is_superset(&scope))
        }
        _ => true,
    })
}

fn unary_negation(core: &Formula) -> bool {
    all_sub(core, &mut |f| match f {
        Formula::Not(g) => g.free_vars().len() <= 1,
        _ => true,
    })
}

fn guarded_negation(f: &Formula) -> bool {
    match f {
        Formula::Atom(_) | Formula::Top => true,
        Formula::Not(g) => g.free_vars().len() <= 1 && guarded_negation(g),
        Formula::Exists(_, g) | Formula::Forall(_, g) => guarded_negation(g),
        Formula::Or(ps) => ps.iter().all(guarded_negation),
        Formula::And(ps) => {
            let guards = conjunct_atoms(f);
            ps.iter().all(|p| match p {
                Formula::Not(g) => {
                    let fv = g.free_vars();
                    (fv.len() <= 1 || guards.iter().any(|a| atom_vars(a).is_superset(&fv))) && guarded_negation(g)
                }
                other => guarded_negation(other),
            })
        }
    }
}

fn variable_names(f: &Formula) -> BTreeSet<String> {
    let mut out = f.free_vars();
    out.extend(f.all_vars());
    out
}

/// Renames bound variables so that each binder reuses the first name not
/// free in its scope. Free variables keep their names.
pub fn minimal_renaming(phi: &Formula) -> Formula {
    let free = phi.free_vars();
    let mut taken = free.clone();
    taken.extend(phi.constants());
    let pool: Vec<String> = ["x", "y", "z", "u", "v", "w"]
        .iter()
        .map(|s| s.to_string())
        .chain((1..).map(|i| format!("x{i}")))
        .filter(|n| !taken.contains(n))
        .take(phi.all_vars().len() + 1)
        .collect();
    let env: BTreeMap<String, String> = free.iter().map(|v| (v.clone(), v.clone())).collect();
    rename(phi, &env, &pool)
}

fn rename(f: &Formula, env: &BTreeMap<String, String>, pool: &[String]) -> Formula {
    match f {
        Formula::Top => Formula::Top,
        Formula::Atom(a) => Formula::Atom(Atom {
            relation: a.relation.clone(),
            args: a
                .args
                .iter()
                .map(|t| match t {
                    Term::Var(v) => Term::Var(env.get(v).cloned().unwrap_or_else(|| v.clone())),
                    c => c.clone(),
                })
                .collect(),
        }),
        Formula::Not(g) => Formula::Not(Box::new(rename(g, env, pool))),
        Formula::And(ps) => Formula::And(ps.iter().map(|p| rename(p, env, pool)).collect()),
        Formula::Or(ps) => Formula::Or(ps.iter().map(|p| rename(p, env, pool)).collect()),
        Formula::Exists(vs, b) | Formula::Forall(vs, b) => {
            let mut used: BTreeSet<String> = b
                .free_vars()
                .iter()
                .filter(|v| !vs.contains(v))
                .filter_map(|v| env.get(v).cloned())
                .collect();
            let mut inner = env.clone();
            let mut new_vs = Vec::new();
            for v in vs {
                let name = pool
                    .iter()
                    .find(|n| !used.contains(*n))
                    .expect("pool larger than any scope")
                    .clone();
                used.insert(name.clone());
                inner.insert(v.clone(), name.clone());
                new_vs.push(name);
            }
            let body = Box::new(rename(b, &inner, pool));
            match f {
                Formula::Exists(..) => Formula::Exists(new_vs, body),
                _ => Formula::Forall(new_vs, body),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse;

    fn us(xs: &[&str]) -> BTreeSet<String> {
        xs.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn symmetric_edge() {
        let r = classify(&parse("exists x y. R(x, y) & R(y, x)").unwrap(), &us(&[]));
        assert!(r.guarded && r.two_variable && r.unary_negation && r.guarded_negation);
        assert!(!r.quantifier_free && !r.relativized);
    }

    #[test]
    fn relativized_example() {
        let phi = parse("(exists x. P(x) & R(x, x)) & (forall x. P(x) -> Q(x))").unwrap();
        assert!(classify(&phi, &us(&["P", "Q", "T"])).relativized);
        assert!(!classify(&phi, &us(&["Q"])).relativized);
    }

    #[test]
    fn top_is_everywhere() {
        let r = classify(&Formula::Top, &us(&[]));
        assert!(r.rows().iter().all(|(_, m, _)| *m));
    }

    #[test]
    fn negation_and_guards() {
        let phi = parse("exists x y. R(x, y) & !S(x, y)").unwrap();
        let r = classify(&phi, &us(&[]));
        assert!(!r.unary_negation && r.guarded_negation && r.guarded);
        let phi = parse("exists x y z. R(x, y) & R(y, z)").unwrap();
        let r = classify(&phi, &us(&[]));
        assert!(!r.guarded && !r.two_variable && r.unary_negation);
    }

    #[test]
    fn renaming_reduces_names() {
        let phi = parse("exists x. P(x) & exists y. R(x, y) & exists z. R(y, z)").unwrap();
        let r = minimal_renaming(&phi);
        assert_eq!(variable_names(&r).len(), 2);
        assert!(classify(&phi, &us(&[])).two_variable);
    }

    #[test]
    fn status_table() {
        assert_eq!(cip_status("GNFO"), Ok(CipStatus::Has));
        assert_eq!(cip_status("GFO"), Ok(CipStatus::Lacks));
        assert_eq!(cip_status("FO²"), Ok(CipStatus::Lacks));
        assert!(cip_status("AF").is_err());
    }
}
