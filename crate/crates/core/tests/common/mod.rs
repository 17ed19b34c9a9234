#![allow(dead_code)]

use proptest::prelude::*;

use tabinterp::logic::{Atom, Formula, Signature, Term};
use tabinterp::models::Structure;

pub const RELATIONS: [(&str, usize); 3] = [("P", 1), ("Q", 1), ("R", 2)];
pub const CONSTANTS: [&str; 2] = ["a", "b"];

#[derive(Clone, Debug)]
pub enum Shape {
    Top,
    Lit(usize, Vec<usize>, bool),
    And(Box<Shape>, Box<Shape>),
    Or(Box<Shape>, Box<Shape>),
    Not(Box<Shape>),
    Exists(Box<Shape>),
    Forall(Box<Shape>),
}

pub fn shape() -> impl Strategy<Value = Shape> {
    let leaf = prop_oneof![
        1 => Just(Shape::Top),
        8 => (0..RELATIONS.len(), prop::collection::vec(0usize..8, 2), any::<bool>())
            .prop_map(|(r, args, neg)| Shape::Lit(r, args, neg)),
    ];
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Shape::And(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Shape::Or(Box::new(a), Box::new(b))),
            inner.clone().prop_map(|a| Shape::Not(Box::new(a))),
            inner.clone().prop_map(|a| Shape::Exists(Box::new(a))),
            inner.prop_map(|a| Shape::Forall(Box::new(a))),
        ]
    })
}

/// Builds a sentence over `RELATIONS`, using constants only when `consts`.
pub fn build(s: &Shape, consts: bool) -> Formula {
    fn go(s: &Shape, consts: bool, scope: &mut Vec<String>) -> Formula {
        match s {
            Shape::Top => Formula::Top,
            Shape::Lit(r, args, neg) => {
                let mut terms: Vec<Term> = scope.iter().map(|v| Term::Var(v.clone())).collect();
                if consts || terms.is_empty() {
                    terms.extend(CONSTANTS.iter().map(|c| Term::Const(c.to_string())));
                }
                let (rel, n) = RELATIONS[*r];
                let atom = Formula::Atom(Atom::new(rel, (0..n).map(|i| terms[args[i] % terms.len()].clone()).collect()));
                if *neg {
                    Formula::Not(Box::new(atom))
                } else {
                    atom
                }
            }
            Shape::And(a, b) => Formula::And(vec![go(a, consts, scope), go(b, consts, scope)]),
            Shape::Or(a, b) => Formula::Or(vec![go(a, consts, scope), go(b, consts, scope)]),
            Shape::Not(a) => Formula::Not(Box::new(go(a, consts, scope))),
            Shape::Exists(a) | Shape::Forall(a) => {
                let v = format!("x{}", scope.len());
                scope.push(v.clone());
                let body = go(a, consts, scope);
                scope.pop();
                if matches!(s, Shape::Exists(_)) {
                    Formula::Exists(vec![v], Box::new(body))
                } else {
                    Formula::Forall(vec![v], Box::new(body))
                }
            }
        }
    }
    go(s, consts, &mut Vec::new())
}

pub fn sentence() -> impl Strategy<Value = Formula> {
    shape().prop_map(|s| build(&s, true))
}

pub fn signature() -> Signature {
    let mut sig = Signature::default();
    for (r, n) in RELATIONS {
        sig = sig.with_relation(r, n);
    }
    for c in CONSTANTS {
        sig = sig.with_constant(c);
    }
    sig
}

pub fn structure() -> impl Strategy<Value = Structure> {
    (1usize..=3)
        .prop_flat_map(|n| {
            (
                Just(n),
                prop::collection::vec(any::<bool>(), 2 * n + n * n),
                prop::collection::vec(0..n, CONSTANTS.len()),
            )
        })
        .prop_map(|(n, bits, consts)| {
            let mut a = Structure::empty(&signature(), n);
            let mut k = 0;
            for (r, arity) in RELATIONS {
                let tuples: Vec<Vec<usize>> = if arity == 1 {
                    (0..n).map(|i| vec![i]).collect()
                } else {
                    (0..n).flat_map(|i| (0..n).map(move |j| vec![i, j])).collect()
                };
                let mut keep = Vec::new();
                for t in tuples {
                    if bits[k] {
                        keep.push(t);
                    }
                    k += 1;
                }
                a.set_relation(r, arity, keep);
            }
            for (c, e) in CONSTANTS.iter().zip(consts) {
                a.constants.insert(c.to_string(), e);
            }
            a
        })
}
