//! Access methods and binding patterns.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::logic::{Formula, Signature, Term};
use crate::models::{evaluate, Assignment, ModelError, Structure};

/// A relation together with the argument positions (1-based) that must be
/// supplied to look tuples up.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AccessMethod {
    pub relation: String,
    pub inputs: BTreeSet<usize>,
}

impl AccessMethod {
    pub fn new(relation: impl Into<String>, inputs: impl IntoIterator<Item = usize>) -> Self {
        AccessMethod {
            relation: relation.into(),
            inputs: inputs.into_iter().collect(),
        }
    }

    pub fn check(&self, sig: &Signature) -> Result<(), AccessError> {
        let arity = *sig
            .relations
            .get(&self.relation)
            .ok_or_else(|| AccessError::UnknownRelation(self.relation.clone()))?;
        match self.inputs.iter().find(|&&i| i == 0 || i > arity) {
            Some(&i) => Err(AccessError::PositionOutOfRange {
                relation: self.relation.clone(),
                position: i,
                arity,
            }),
            None => Ok(()),
        }
    }
}

impl fmt::Display for AccessMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.inputs.is_empty() {
            return write!(f, "{}:-", self.relation);
        }
        let xs: Vec<String> = self.inputs.iter().map(|i| i.to_string()).collect();
        write!(f, "{}:{}", self.relation, xs.join(","))
    }
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum AccessError {
    #[error("bad access method `{0}`, expected R:1,2 or R:-")]
    BadSyntax(String),
    #[error("unknown relation {0}")]
    UnknownRelation(String),
    #[error("position {position} out of range for {relation}/{arity}")]
    PositionOutOfRange {
        relation: String,
        position: usize,
        arity: usize,
    },
}

impl FromStr for AccessMethod {
    type Err = AccessError;

    /// `R:1,2`; `R:-` and `R:0` denote the empty input set.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || AccessError::BadSyntax(s.to_string());
        let (rel, rest) = s.split_once(':').ok_or_else(bad)?;
        let rel = rel.trim();
        if rel.is_empty() {
            return Err(bad());
        }
        let rest = rest.trim();
        if rest == "-" || rest == "0" || rest.is_empty() {
            return Ok(AccessMethod::new(rel, []));
        }
        let inputs = rest
            .split(',')
            .map(|p| p.trim().parse::<usize>().map_err(|_| bad()))
            .collect::<Result<BTreeSet<_>, _>>()?;
        if inputs.contains(&0) {
            return Err(bad());
        }
        Ok(AccessMethod {
            relation: rel.to_string(),
            inputs,
        })
    }
}

/// Parses a list of methods separated by `;` or whitespace.
pub fn parse_methods(s: &str) -> Result<BTreeSet<AccessMethod>, AccessError> {
    s.split(|c: char| c == ';' || c.is_whitespace())
        .filter(|p| !p.is_empty())
        .map(str::parse)
        .collect()
}

/// `a ⪯ b`: same relation and fewer inputs.
pub fn am_leq(a: &AccessMethod, b: &AccessMethod) -> bool {
    a.relation == b.relation && a.inputs.is_subset(&b.inputs)
}

/// All methods with at least the inputs of some member of `s`.
pub fn upward_closure(s: &BTreeSet<AccessMethod>, sig: &Signature) -> BTreeSet<AccessMethod> {
    let mut out = BTreeSet::new();
    for m in s {
        let Some(&arity) = sig.relations.get(&m.relation) else {
            out.insert(m.clone());
            continue;
        };
        let free: Vec<usize> = (1..=arity).filter(|i| !m.inputs.contains(i)).collect();
        for mask in 0u64..(1u64 << free.len()) {
            let mut inputs = m.inputs.clone();
            for (k, &i) in free.iter().enumerate() {
                if mask >> k & 1 == 1 {
                    inputs.insert(i);
                }
            }
            out.insert(AccessMethod {
                relation: m.relation.clone(),
                inputs,
            });
        }
    }
    out
}

/// Binding patterns of `phi`, read off its syntax tree; `None` when the
/// formula has no binding-pattern decomposition.
pub fn bind_patt(phi: &Formula) -> Option<BTreeSet<AccessMethod>> {
    let mut out = BTreeSet::new();
    collect(phi, &mut out).then_some(out)
}

fn full(atom: &crate::logic::Atom) -> AccessMethod {
    AccessMethod::new(atom.relation.clone(), 1..=atom.args.len())
}

fn collect(phi: &Formula, out: &mut BTreeSet<AccessMethod>) -> bool {
    match phi {
        Formula::Top => true,
        Formula::Atom(a) => {
            out.insert(full(a));
            true
        }
        Formula::Not(inner) => collect(inner, out),
        Formula::And(parts) | Formula::Or(parts) => parts.iter().all(|p| collect(p, out)),
        Formula::Forall(vs, body) => {
            let flipped = match body.as_ref() {
                Formula::Not(inner) => (**inner).clone(),
                other => Formula::Not(Box::new(other.clone())),
            };
            collect(&Formula::Exists(vs.clone(), Box::new(flipped)), out)
        }
        Formula::Exists(vs, body) => {
            let (binder, rest) = match body.as_ref() {
                Formula::Atom(a) => (a, None),
                Formula::And(parts) => match parts.first() {
                    Some(Formula::Atom(a)) => (a, Some(&parts[1..])),
                    _ => return false,
                },
                _ => return false,
            };
            let inputs = binder
                .args
                .iter()
                .enumerate()
                .filter(|(_, t)| !matches!(t, Term::Var(v) if vs.contains(v)))
                .map(|(i, _)| i + 1);
            out.insert(AccessMethod::new(binder.relation.clone(), inputs));
            match rest {
                None => true,
                Some(rest) => rest.iter().all(|p| collect(p, out)),
            }
        }
    }
}

/// Whether `bind_patt(phi)` is defined and inside the upward closure of `s`.
pub fn is_bounded(phi: &Formula, s: &BTreeSet<AccessMethod>) -> bool {
    match bind_patt(phi) {
        Some(needed) => needed.iter().all(|m| s.iter().any(|have| am_leq(have, m))),
        None => false,
    }
}

/// Least set containing `seed` (and the constants of `a`) and closed under
/// looking up tuples through the methods in `s`.
pub fn accessible_part(a: &Structure, s: &BTreeSet<AccessMethod>, seed: &[usize]) -> BTreeSet<usize> {
    let mut d: BTreeSet<usize> = seed.iter().copied().collect();
    d.extend(a.constants.values().copied());
    let mut pending: Vec<(&BTreeSet<usize>, &Vec<usize>)> = Vec::new();
    for m in s {
        if let Some(ts) = a.relations.get(&m.relation) {
            for t in ts {
                pending.push((&m.inputs, t));
            }
        }
    }
    loop {
        let before = pending.len();
        pending.retain(|(inputs, t)| {
            if inputs.iter().all(|&i| t.get(i - 1).is_some_and(|e| d.contains(e))) {
                d.extend(t.iter().copied());
                false
            } else {
                true
            }
        });
        if pending.len() == before {
            return d;
        }
    }
}

/// Compares the truth of `phi` at `tuple` in `a` and in the substructure
/// induced by the accessible part. Free variables are bound in sorted order.
pub fn check_access_determinacy(
    phi: &Formula,
    s: &BTreeSet<AccessMethod>,
    a: &Structure,
    tuple: &[usize],
) -> Result<bool, ModelError> {
    let vars: Vec<String> = phi.free_vars().into_iter().collect();
    if vars.len() != tuple.len() {
        return Err(ModelError::UnassignedVariable(format!(
            "{} free variables but {} elements",
            vars.len(),
            tuple.len()
        )));
    }
    if let Some(&e) = tuple.iter().find(|&&e| e >= a.domain) {
        return Err(ModelError::OutOfDomain { element: e, domain: a.domain });
    }
    let g: Assignment = vars.iter().cloned().zip(tuple.iter().copied()).collect();
    let d = accessible_part(a, s, tuple);
    let (sub, map) = a.induced(&d);
    let g_sub: Assignment = g.iter().map(|(v, e)| (v.clone(), map[e])).collect();
    Ok(evaluate(a, phi, &g)? == evaluate(&sub, phi, &g_sub)?)
}

/// Every method over the relations of `sig`.
pub fn all_methods(sig: &Signature) -> BTreeSet<AccessMethod> {
    let bottoms: BTreeSet<AccessMethod> = sig
        .relations
        .keys()
        .map(|r| AccessMethod::new(r.clone(), []))
        .collect();
    upward_closure(&bottoms, sig)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse;

    fn ms(s: &str) -> BTreeSet<AccessMethod> {
        parse_methods(s).unwrap()
    }

    fn binary_r() -> Signature {
        Signature::default().with_relation("R", 2)
    }

    #[test]
    fn ordering() {
        let m = |s: &str| s.parse::<AccessMethod>().unwrap();
        assert!(am_leq(&m("R:-"), &m("R:1")));
        assert!(!am_leq(&m("R:1"), &m("R:-")));
        assert!(!am_leq(&m("R:-"), &m("S:-")));
        assert_eq!(m("R:0"), m("R:-"));
        assert!("R".parse::<AccessMethod>().is_err());
        assert_eq!(m("S:1,2").to_string(), "S:1,2");
    }

    #[test]
    fn closures() {
        assert_eq!(upward_closure(&ms("R:-"), &binary_r()).len(), 4);
        assert_eq!(upward_closure(&ms("R:1,2"), &binary_r()), ms("R:1,2"));
        assert_eq!(upward_closure(&ms("R:1"), &binary_r()), ms("R:1 R:1,2"));
    }

    #[test]
    fn binding_patterns() {
        let phi = parse("forall x y. R(x, y) -> S(x, y)").unwrap();
        assert_eq!(bind_patt(&phi), Some(ms("R:- S:1,2")));
        assert_eq!(bind_patt(&Formula::Top), Some(BTreeSet::new()));
        assert_eq!(bind_patt(&parse("forall x. P(x)").unwrap()), None);
        assert_eq!(bind_patt(&parse("exists y. R(c, y)").unwrap()), Some(ms("R:1")));
        assert!(is_bounded(&phi, &ms("R:- S:1")));
        assert!(!is_bounded(&phi, &ms("R:1 S:1,2")));
        assert!(is_bounded(&Formula::Top, &BTreeSet::new()));
    }

    #[test]
    fn accessible_parts() {
        let mut a = Structure::empty(&binary_r(), 2);
        a.set_relation("R", 2, [vec![0, 1]]);
        assert_eq!(accessible_part(&a, &ms("R:1"), &[0]), [0, 1].into());
        assert_eq!(accessible_part(&a, &ms("R:1"), &[1]), [1].into());
        assert_eq!(accessible_part(&a, &BTreeSet::new(), &[1]), [1].into());
    }

    #[test]
    fn determinacy_spot_checks() {
        let sig = Signature::default().with_relation("P", 1);
        let mut a = Structure::empty(&sig, 2);
        a.set_relation("P", 1, [vec![0]]);
        let phi = parse("exists x. !P(x)").unwrap();
        assert!(!check_access_determinacy(&phi, &all_methods(&sig), &a, &[]).unwrap());
        assert!(check_access_determinacy(&Formula::Top, &BTreeSet::new(), &a, &[]).unwrap());
    }
}
