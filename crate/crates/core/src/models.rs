//! Finite structures, first-order evaluation and exhaustive enumeration.
//!
//! Enumeration order: symbols are laid out as all relations sorted by name
//! followed by all constants sorted by name; each relation contributes one
//! bit per tuple, tuples in lexicographic order. Structures are listed in
//! lexicographic order of this digit vector, so the all-empty structure with
//! every constant at element 0 comes first and the last constant varies
//! fastest.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use thiserror::Error;

use crate::logic::{Formula, Signature, Term};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum ModelError {
    #[error("relation {0} is not interpreted by the structure")]
    MissingRelation(String),
    #[error("constant {0} is not interpreted by the structure")]
    MissingConstant(String),
    #[error("variable {0} has no value in the assignment")]
    UnassignedVariable(String),
    #[error("relation {relation} has arity {expected} in the structure but is used with {found} arguments")]
    ArityMismatch {
        relation: String,
        expected: usize,
        found: usize,
    },
    #[error("element {element} is outside the domain of size {domain}")]
    OutOfDomain { element: usize, domain: usize },
    #[error("invalid structure JSON: {0}")]
    Json(String),
}

/// Variable assignment.
pub type Assignment = BTreeMap<String, usize>;

/// A finite structure over the domain `{0, …, domain-1}`.
///
/// `arities` records the arity of every interpreted relation so that empty
/// relations keep their type.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Structure {
    pub domain: usize,
    pub relations: BTreeMap<String, BTreeSet<Vec<usize>>>,
    pub arities: BTreeMap<String, usize>,
    pub constants: BTreeMap<String, usize>,
}

impl Structure {
    /// The structure over `sig` with every relation empty and every constant
    /// at element 0.
    pub fn empty(sig: &Signature, domain: usize) -> Self {
        Structure {
            domain,
            relations: sig.relations.keys().map(|r| (r.clone(), BTreeSet::new())).collect(),
            arities: sig.relations.clone(),
            constants: sig.constants.iter().map(|c| (c.clone(), 0)).collect(),
        }
    }

    pub fn signature(&self) -> Signature {
        Signature {
            relations: self.arities.clone(),
            constants: self.constants.keys().cloned().collect(),
        }
    }

    pub fn set_relation(&mut self, name: &str, arity: usize, tuples: impl IntoIterator<Item = Vec<usize>>) {
        self.arities.insert(name.to_string(), arity);
        self.relations
            .insert(name.to_string(), tuples.into_iter().collect());
    }

    pub fn holds(&self, relation: &str, tuple: &[usize]) -> bool {
        self.relations
            .get(relation)
            .is_some_and(|ts| ts.contains(tuple))
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        for (r, ts) in &self.relations {
            let arity = *self
                .arities
                .get(r)
                .ok_or_else(|| ModelError::MissingRelation(r.clone()))?;
            for t in ts {
                if t.len() != arity {
                    return Err(ModelError::ArityMismatch {
                        relation: r.clone(),
                        expected: arity,
                        found: t.len(),
                    });
                }
                if let Some(&e) = t.iter().find(|&&e| e >= self.domain) {
                    return Err(ModelError::OutOfDomain {
                        element: e,
                        domain: self.domain,
                    });
                }
            }
        }
        if let Some(&e) = self.constants.values().find(|&&e| e >= self.domain) {
            return Err(ModelError::OutOfDomain {
                element: e,
                domain: self.domain,
            });
        }
        Ok(())
    }

    /// Restriction to the symbols of `sig` (symbols missing here are skipped).
    pub fn reduct(&self, sig: &Signature) -> Structure {
        Structure {
            domain: self.domain,
            relations: self
                .relations
                .iter()
                .filter(|(r, _)| sig.relations.contains_key(*r))
                .map(|(r, t)| (r.clone(), t.clone()))
                .collect(),
            arities: self
                .arities
                .iter()
                .filter(|(r, _)| sig.relations.contains_key(*r))
                .map(|(r, a)| (r.clone(), *a))
                .collect(),
            constants: self
                .constants
                .iter()
                .filter(|(c, _)| sig.constants.contains(*c))
                .map(|(c, e)| (c.clone(), *e))
                .collect(),
        }
    }

    /// Substructure induced by `keep`, renumbered densely in increasing
    /// order. Returns the structure and the old→new element map. Constants
    /// whose denotation falls outside `keep` are dropped.
    pub fn induced(&self, keep: &BTreeSet<usize>) -> (Structure, BTreeMap<usize, usize>) {
        let map: BTreeMap<usize, usize> = keep
            .iter()
            .filter(|&&e| e < self.domain)
            .enumerate()
            .map(|(i, &e)| (e, i))
            .collect();
        let relations = self
            .relations
            .iter()
            .map(|(r, ts)| {
                let kept = ts
                    .iter()
                    .filter_map(|t| t.iter().map(|e| map.get(e).copied()).collect::<Option<Vec<_>>>())
                    .collect();
                (r.clone(), kept)
            })
            .collect();
        let constants = self
            .constants
            .iter()
            .filter_map(|(c, e)| map.get(e).map(|&n| (c.clone(), n)))
            .collect();
        (
            Structure {
                domain: map.len(),
                relations,
                arities: self.arities.clone(),
                constants,
            },
            map,
        )
    }

    /// Image under the element permutation `perm` (`perm[old] = new`).
    pub fn permuted(&self, perm: &[usize]) -> Structure {
        Structure {
            domain: self.domain,
            relations: self
                .relations
                .iter()
                .map(|(r, ts)| {
                    (
                        r.clone(),
                        ts.iter().map(|t| t.iter().map(|&e| perm[e]).collect()).collect(),
                    )
                })
                .collect(),
            arities: self.arities.clone(),
            constants: self.constants.iter().map(|(c, &e)| (c.clone(), perm[e])).collect(),
        }
    }

    /// Writes the structure as JSON in the fixed member layout
    /// `{"domain": n, "relations": {...}, "constants": {...}}`.
    pub fn to_json(&self) -> String {
        let mut s = String::new();
        let _ = write!(s, "{{\"domain\": {}, \"relations\": {{", self.domain);
        for (i, (r, ts)) in self.relations.iter().enumerate() {
            if i > 0 {
                s.push_str(", ");
            }
            let _ = write!(s, "{}: [", json_string(r));
            for (j, t) in ts.iter().enumerate() {
                if j > 0 {
                    s.push_str(", ");
                }
                s.push('[');
                for (k, e) in t.iter().enumerate() {
                    if k > 0 {
                        s.push(',');
                    }
                    let _ = write!(s, "{e}");
                }
                s.push(']');
            }
            s.push(']');
        }
        s.push_str("}, \"constants\": {");
        for (i, (c, e)) in self.constants.iter().enumerate() {
            if i > 0 {
                s.push_str(", ");
            }
            let _ = write!(s, "{}: {e}", json_string(c));
        }
        s.push_str("}}");
        s
    }

    /// Reads the JSON layout written by [`Structure::to_json`]. Relation
    /// arities come from the tuples; empty relations take their arity from
    /// `hint` when given, else 0.
    pub fn from_json(text: &str, hint: Option<&Signature>) -> Result<Structure, ModelError> {
        let bad = |m: &str| ModelError::Json(m.to_string());
        let v: serde_json::Value =
            serde_json::from_str(text).map_err(|e| ModelError::Json(e.to_string()))?;
        let obj = v.as_object().ok_or_else(|| bad("top level must be an object"))?;
        let domain = obj
            .get("domain")
            .and_then(serde_json::Value::as_u64)
            .ok_or_else(|| bad("`domain` must be a natural number"))? as usize;
        let mut st = Structure {
            domain,
            ..Structure::default()
        };
        if let Some(rels) = obj.get("relations") {
            let rels = rels.as_object().ok_or_else(|| bad("`relations` must be an object"))?;
            for (name, tuples) in rels {
                let tuples = tuples
                    .as_array()
                    .ok_or_else(|| bad("relation extensions must be arrays"))?;
                let mut set = BTreeSet::new();
                let mut arity = None;
                for t in tuples {
                    let t = t.as_array().ok_or_else(|| bad("tuples must be arrays"))?;
                    let tuple = t
                        .iter()
                        .map(|e| e.as_u64().map(|x| x as usize))
                        .collect::<Option<Vec<_>>>()
                        .ok_or_else(|| bad("tuple entries must be natural numbers"))?;
                    match arity {
                        None => arity = Some(tuple.len()),
                        Some(a) if a != tuple.len() => {
                            return Err(bad(&format!("relation {name} mixes tuple lengths")))
                        }
                        _ => {}
                    }
                    set.insert(tuple);
                }
                let arity = arity
                    .or_else(|| hint.and_then(|h| h.relations.get(name).copied()))
                    .unwrap_or(0);
                st.arities.insert(name.clone(), arity);
                st.relations.insert(name.clone(), set);
            }
        }
        if let Some(consts) = obj.get("constants") {
            let consts = consts.as_object().ok_or_else(|| bad("`constants` must be an object"))?;
            for (name, e) in consts {
                let e = e
                    .as_u64()
                    .ok_or_else(|| bad("constant denotations must be natural numbers"))?;
                st.constants.insert(name.clone(), e as usize);
            }
        }
        st.validate()?;
        Ok(st)
    }
}

fn json_string(s: &str) -> String {
    serde_json::to_string(s).expect("string serialization cannot fail")
}

/// Standard Tarskian truth of `phi` in `a` under `g`.
pub fn evaluate(a: &Structure, phi: &Formula, g: &Assignment) -> Result<bool, ModelError> {
    let mut env = g.clone();
    eval_rec(a, phi, &mut env)
}

pub fn satisfies(a: &Structure, phi: &Formula) -> Result<bool, ModelError> {
    evaluate(a, phi, &Assignment::new())
}

fn eval_term(a: &Structure, t: &Term, env: &Assignment) -> Result<usize, ModelError> {
    match t {
        Term::Var(v) => env
            .get(v)
            .copied()
            .ok_or_else(|| ModelError::UnassignedVariable(v.clone())),
        Term::Const(c) => a
            .constants
            .get(c)
            .copied()
            .ok_or_else(|| ModelError::MissingConstant(c.clone())),
    }
}

fn eval_rec(a: &Structure, phi: &Formula, env: &mut Assignment) -> Result<bool, ModelError> {
    match phi {
        Formula::Atom(at) => {
            let ext = a
                .relations
                .get(&at.relation)
                .ok_or_else(|| ModelError::MissingRelation(at.relation.clone()))?;
            if let Some(&n) = a.arities.get(&at.relation) {
                if n != at.arity() {
                    return Err(ModelError::ArityMismatch {
                        relation: at.relation.clone(),
                        expected: n,
                        found: at.arity(),
                    });
                }
            }
            let tuple = at
                .args
                .iter()
                .map(|t| eval_term(a, t, env))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(ext.contains(&tuple))
        }
        Formula::Top => Ok(true),
        Formula::And(fs) => {
            for f in fs {
                if !eval_rec(a, f, env)? {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        Formula::Or(fs) => {
            for f in fs {
                if eval_rec(a, f, env)? {
                    return Ok(true);
                }
            }
            Ok(false)
        }
        Formula::Not(f) => Ok(!eval_rec(a, f, env)?),
        Formula::Exists(vs, body) => quantify(a, vs, body, env, true),
        Formula::Forall(vs, body) => quantify(a, vs, body, env, false),
    }
}

fn quantify(
    a: &Structure,
    vs: &[String],
    body: &Formula,
    env: &mut Assignment,
    existential: bool,
) -> Result<bool, ModelError> {
    let Some((v, rest)) = vs.split_first() else {
        return eval_rec(a, body, env);
    };
    let saved = env.get(v).copied();
    let mut result = !existential;
    for e in 0..a.domain {
        env.insert(v.clone(), e);
        let r = quantify(a, rest, body, env, existential);
        let r = match r {
            Ok(r) => r,
            Err(err) => {
                restore(env, v, saved);
                return Err(err);
            }
        };
        if r == existential {
            result = existential;
            break;
        }
    }
    restore(env, v, saved);
    Ok(result)
}

fn restore(env: &mut Assignment, v: &str, saved: Option<usize>) {
    match saved {
        Some(e) => {
            env.insert(v.to_string(), e);
        }
        None => {
            env.remove(v);
        }
    }
}

/// Closed-form number of structures over `sig` with `n` elements, or `None`
/// on overflow.
pub fn count_structures(sig: &Signature, n: usize) -> Option<u128> {
    let mut total: u128 = 1;
    for &arity in sig.relations.values() {
        let tuples = (n as u128).checked_pow(arity as u32)?;
        if tuples >= 128 {
            return None;
        }
        total = total.checked_mul(1u128 << tuples)?;
    }
    for _ in &sig.constants {
        total = total.checked_mul(n as u128)?;
    }
    Some(total)
}

/// Every structure over `sig` with domain `{0..n-1}`, in the order
/// described in the module documentation.
pub fn enumerate_structures(sig: &Signature, n: usize) -> impl Iterator<Item = Structure> {
    let layout = Layout::new(sig);
    let mut raw = Some(RawStructure::first(&layout, n));
    std::iter::from_fn(move || {
        let cur = raw.as_mut()?;
        let out = cur.to_structure(&layout);
        if !cur.advance() {
            raw = None;
        }
        Some(out)
    })
}

/// Smallest-domain model of all `phis` with at most `max_size` elements.
pub fn find_model(phis: &[Formula], max_size: usize) -> Option<Structure> {
    let sig = joint_signature(phis);
    let layout = Layout::new(&sig);
    let compiled: Vec<Compiled> = phis
        .iter()
        .map(|f| layout.compile(f, &[]).expect("formula over its own signature"))
        .collect();
    (1..=max_size).find_map(|n| {
        let mut raw = RawStructure::first(&layout, n);
        loop {
            if compiled.iter().all(|c| raw.eval(c, &mut Vec::new())) {
                return Some(raw.to_structure(&layout));
            }
            if !raw.advance() {
                return None;
            }
        }
    })
}

/// Union of the signatures of `phis`; later arities lose on a clash.
pub fn joint_signature(phis: &[Formula]) -> Signature {
    let mut sig = Signature::new();
    for f in phis {
        if let Ok(s) = f.signature() {
            for (r, a) in s.relations {
                sig.relations.entry(r).or_insert(a);
            }
            sig.constants.extend(s.constants);
        }
    }
    sig
}

/// Finds an isomorphism `perm` with `a.permuted(perm) == b`, by brute force.
pub fn isomorphism(a: &Structure, b: &Structure) -> Option<Vec<usize>> {
    if a.domain != b.domain || a.arities != b.arities {
        return None;
    }
    let n = a.domain;
    let mut perm: Vec<usize> = (0..n).collect();
    loop {
        if a.permuted(&perm) == *b {
            return Some(perm);
        }
        if !next_permutation(&mut perm) {
            return None;
        }
    }
}

pub(crate) fn next_permutation(p: &mut [usize]) -> bool {
    if p.len() < 2 {
        return false;
    }
    let mut i = p.len() - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = p.len() - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// Fixed symbol layout shared by compiled formulas and raw structures.
#[derive(Clone, Debug)]
pub(crate) struct Layout {
    pub(crate) relations: Vec<(String, usize)>,
    pub(crate) constants: Vec<String>,
}

#[derive(Clone, Debug)]
pub(crate) enum CTerm {
    Const(usize),
    Var(usize),
}

/// Formula with symbols resolved to layout indices and variables to
/// environment slots.
#[derive(Clone, Debug)]
pub(crate) enum Compiled {
    Atom(usize, Vec<CTerm>),
    Const(bool),
    And(Vec<Compiled>),
    Or(Vec<Compiled>),
    Not(Box<Compiled>),
    Exists(usize, Box<Compiled>),
    Forall(usize, Box<Compiled>),
}

impl Layout {
    pub(crate) fn new(sig: &Signature) -> Self {
        Layout {
            relations: sig.relations.iter().map(|(r, &a)| (r.clone(), a)).collect(),
            constants: sig.constants.iter().cloned().collect(),
        }
    }

    fn relation_index(&self, name: &str) -> Option<usize> {
        self.relations
            .binary_search_by(|(r, _)| r.as_str().cmp(name))
            .ok()
    }

    fn constant_index(&self, name: &str) -> Option<usize> {
        self.constants.binary_search_by(|c| c.as_str().cmp(name)).ok()
    }

    /// Compiles `phi`; `free` lists the free variables in slot order.
    pub(crate) fn compile(&self, phi: &Formula, free: &[String]) -> Result<Compiled, ModelError> {
        let mut scope: Vec<String> = free.to_vec();
        self.compile_rec(phi, &mut scope)
    }

    fn compile_rec(&self, phi: &Formula, scope: &mut Vec<String>) -> Result<Compiled, ModelError> {
        Ok(match phi {
            Formula::Atom(a) => {
                let idx = self
                    .relation_index(&a.relation)
                    .ok_or_else(|| ModelError::MissingRelation(a.relation.clone()))?;
                let arity = self.relations[idx].1;
                if arity != a.arity() {
                    return Err(ModelError::ArityMismatch {
                        relation: a.relation.clone(),
                        expected: arity,
                        found: a.arity(),
                    });
                }
                let args = a
                    .args
                    .iter()
                    .map(|t| match t {
                        Term::Var(v) => scope
                            .iter()
                            .rposition(|s| s == v)
                            .map(CTerm::Var)
                            .ok_or_else(|| ModelError::UnassignedVariable(v.clone())),
                        Term::Const(c) => self
                            .constant_index(c)
                            .map(CTerm::Const)
                            .ok_or_else(|| ModelError::MissingConstant(c.clone())),
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                Compiled::Atom(idx, args)
            }
            Formula::Top => Compiled::Const(true),
            Formula::Not(f) if **f == Formula::Top => Compiled::Const(false),
            Formula::And(fs) => Compiled::And(
                fs.iter()
                    .map(|f| self.compile_rec(f, scope))
                    .collect::<Result<_, _>>()?,
            ),
            Formula::Or(fs) => Compiled::Or(
                fs.iter()
                    .map(|f| self.compile_rec(f, scope))
                    .collect::<Result<_, _>>()?,
            ),
            Formula::Not(f) => Compiled::Not(Box::new(self.compile_rec(f, scope)?)),
            Formula::Exists(vs, body) | Formula::Forall(vs, body) => {
                let depth = scope.len();
                scope.extend(vs.iter().cloned());
                let inner = self.compile_rec(body, scope);
                scope.truncate(depth);
                let inner = Box::new(inner?);
                if matches!(phi, Formula::Exists(..)) {
                    Compiled::Exists(vs.len(), inner)
                } else {
                    Compiled::Forall(vs.len(), inner)
                }
            }
        })
    }
}

/// Bit-level structure over a [`Layout`], used by the enumeration loops.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub(crate) struct RawStructure {
    pub(crate) n: usize,
    pub(crate) arities: Vec<usize>,
    pub(crate) bits: Vec<Vec<bool>>,
    pub(crate) consts: Vec<usize>,
}

impl RawStructure {
    pub(crate) fn first(layout: &Layout, n: usize) -> Self {
        RawStructure {
            n,
            arities: layout.relations.iter().map(|(_, a)| *a).collect(),
            bits: layout
                .relations
                .iter()
                .map(|(_, a)| vec![false; n.pow(*a as u32)])
                .collect(),
            consts: vec![0; layout.constants.len()],
        }
    }

    /// Steps to the next structure in enumeration order; false once the
    /// sequence wraps around.
    pub(crate) fn advance(&mut self) -> bool {
        if self.n == 0 {
            return false;
        }
        for c in self.consts.iter_mut().rev() {
            if *c + 1 < self.n {
                *c += 1;
                return true;
            }
            *c = 0;
        }
        for rel in self.bits.iter_mut().rev() {
            for b in rel.iter_mut().rev() {
                if !*b {
                    *b = true;
                    return true;
                }
                *b = false;
            }
        }
        false
    }

    pub(crate) fn tuple_index(&self, tuple: impl Iterator<Item = usize>) -> usize {
        tuple.fold(0, |acc, e| acc * self.n + e)
    }

    pub(crate) fn eval(&self, f: &Compiled, env: &mut Vec<usize>) -> bool {
        match f {
            Compiled::Atom(r, args) => {
                let idx = self.tuple_index(args.iter().map(|t| match t {
                    CTerm::Const(c) => self.consts[*c],
                    CTerm::Var(v) => env[*v],
                }));
                self.bits[*r][idx]
            }
            Compiled::Const(b) => *b,
            Compiled::And(fs) => fs.iter().all(|g| self.eval(g, env)),
            Compiled::Or(fs) => fs.iter().any(|g| self.eval(g, env)),
            Compiled::Not(g) => !self.eval(g, env),
            Compiled::Exists(k, body) => self.quantify(*k, body, env, true),
            Compiled::Forall(k, body) => self.quantify(*k, body, env, false),
        }
    }

    fn quantify(&self, k: usize, body: &Compiled, env: &mut Vec<usize>, existential: bool) -> bool {
        if k == 0 {
            return self.eval(body, env);
        }
        for e in 0..self.n {
            env.push(e);
            let r = self.quantify(k - 1, body, env, existential);
            env.pop();
            if r == existential {
                return existential;
            }
        }
        !existential
    }

    pub(crate) fn to_structure(&self, layout: &Layout) -> Structure {
        let mut st = Structure {
            domain: self.n,
            ..Structure::default()
        };
        for (i, (name, arity)) in layout.relations.iter().enumerate() {
            let mut set = BTreeSet::new();
            for (idx, &b) in self.bits[i].iter().enumerate() {
                if b {
                    set.insert(decode_tuple(idx, *arity, self.n));
                }
            }
            st.relations.insert(name.clone(), set);
            st.arities.insert(name.clone(), *arity);
        }
        for (i, c) in layout.constants.iter().enumerate() {
            st.constants.insert(c.clone(), self.consts[i]);
        }
        st
    }
}

pub(crate) fn decode_tuple(mut idx: usize, arity: usize, n: usize) -> Vec<usize> {
    let mut t = vec![0; arity];
    for slot in t.iter_mut().rev() {
        *slot = idx % n;
        idx /= n;
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse;

    fn tallest_a() -> Structure {
        let mut st = Structure::empty(&Signature::new(), 3);
        st.set_relation("TallerThan", 2, [vec![0, 1], vec![1, 2], vec![0, 2]]);
        st.set_relation("Tallest", 1, [vec![0]]);
        st
    }

    #[test]
    fn evaluates_small_order() {
        let f = parse("forall x y. TallerThan(y, x) -> !Tallest(x)").unwrap();
        assert_eq!(satisfies(&tallest_a(), &f), Ok(true));
        assert_eq!(satisfies(&tallest_a(), &Formula::Top), Ok(true));
    }

    #[test]
    fn empty_extension_falsifies_existential() {
        let sig = Signature::new().with_relation("P", 1);
        let st = Structure::empty(&sig, 2);
        assert_eq!(satisfies(&st, &parse("exists x. P(x)").unwrap()), Ok(false));
    }

    #[test]
    fn evaluation_errors() {
        let st = Structure::empty(&Signature::new(), 1);
        assert_eq!(
            satisfies(&st, &parse("P(a)").unwrap()),
            Err(ModelError::MissingRelation("P".into()))
        );
        let sig = Signature::new().with_relation("P", 1);
        let st = Structure::empty(&sig, 1);
        assert_eq!(
            satisfies(&st, &parse("P(a)").unwrap()),
            Err(ModelError::MissingConstant("a".into()))
        );
        let open = crate::syntax::parse_with_free_vars("P(x)", &["x"]).unwrap();
        assert_eq!(
            satisfies(&st, &open),
            Err(ModelError::UnassignedVariable("x".into()))
        );
    }

    #[test]
    fn enumeration_counts() {
        let p = Signature::new().with_relation("P", 1);
        assert_eq!(enumerate_structures(&p, 2).count(), 4);
        let r = Signature::new().with_relation("R", 2);
        assert_eq!(enumerate_structures(&r, 1).count(), 2);
        let pc = Signature::new().with_relation("P", 1).with_constant("c");
        let expected = count_structures(&pc, 2).unwrap();
        assert_eq!(expected, 8);
        assert_eq!(enumerate_structures(&pc, 2).count() as u128, expected);
    }

    #[test]
    fn enumeration_is_duplicate_free_and_ordered() {
        let sig = Signature::new()
            .with_relation("P", 1)
            .with_relation("Z", 0)
            .with_constant("a");
        let all: Vec<Structure> = enumerate_structures(&sig, 2).collect();
        let distinct: BTreeSet<_> = all.iter().cloned().collect();
        assert_eq!(distinct.len(), all.len());
        assert!(all[0].relations.values().all(BTreeSet::is_empty));
        assert_eq!(all[1].constants["a"], 1);
    }

    #[test]
    fn finds_smallest_models() {
        let m = find_model(&[parse("exists x. P(x)").unwrap()], 3).unwrap();
        assert_eq!(m.domain, 1);
        assert!(m.holds("P", &[0]));
        assert!(find_model(&[parse("P(c)").unwrap(), parse("!P(c)").unwrap()], 3).is_none());
        let f = parse("exists x. A(x) & !B(x) & C(x)").unwrap();
        let m = find_model(&[f.clone()], 3).unwrap();
        assert_eq!(m.domain, 1);
        assert_eq!(satisfies(&m, &f), Ok(true));
    }

    #[test]
    fn json_layout() {
        let mut st = Structure::empty(&Signature::new().with_constant("c"), 3);
        st.set_relation("R", 2, [vec![0, 1]]);
        let text = st.to_json();
        assert_eq!(
            text,
            r#"{"domain": 3, "relations": {"R": [[0,1]]}, "constants": {"c": 0}}"#
        );
        assert_eq!(Structure::from_json(&text, None).unwrap(), st);
    }

    #[test]
    fn json_rejects_out_of_domain() {
        assert!(Structure::from_json(r#"{"domain": 1, "relations": {"R": [[0,1]]}}"#, None).is_err());
    }

    #[test]
    fn induced_substructure() {
        let (sub, map) = tallest_a().induced(&[0, 2].into_iter().collect());
        assert_eq!(sub.domain, 2);
        assert_eq!(map[&2], 1);
        assert!(sub.holds("TallerThan", &[0, 1]));
        assert_eq!(sub.relations["TallerThan"].len(), 1);
    }

    #[test]
    fn isomorphism_search() {
        let a = tallest_a();
        let b = a.permuted(&[0, 2, 1]);
        assert!(isomorphism(&a, &b).is_some());
        let mut c = a.clone();
        c.set_relation("Tallest", 1, [vec![1]]);
        assert!(isomorphism(&a, &c).is_none());
    }
}
