//! Seeded generator of valid implications `α ∧ γ → α ∨ δ`.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::logic::{Atom, Formula, Term};
use crate::syntax::{print_problem, ProblemFile};

/// Symbols available to one part of an instance.
#[derive(Clone, Debug)]
pub struct Vocabulary {
    pub relations: Vec<(String, usize)>,
    pub constants: Vec<String>,
}

impl Vocabulary {
    fn new(relations: &[(&str, usize)], constants: &[&str]) -> Self {
        Vocabulary {
            relations: relations.iter().map(|(r, n)| (r.to_string(), *n)).collect(),
            constants: constants.iter().map(|c| c.to_string()).collect(),
        }
    }

    fn union(&self, other: &Vocabulary) -> Vocabulary {
        let mut v = self.clone();
        v.relations.extend(other.relations.iter().cloned());
        v.constants.extend(other.constants.iter().cloned());
        v
    }
}

/// Shape of generated instances.
#[derive(Clone, Debug)]
pub struct CorpusShape {
    pub shared: Vocabulary,
    pub left_only: Vocabulary,
    pub right_only: Vocabulary,
    pub max_depth: usize,
    pub max_quantifier_depth: usize,
}

impl CorpusShape {
    pub fn standard() -> Self {
        CorpusShape {
            shared: Vocabulary::new(&[("A", 1), ("B", 1), ("R", 2)], &["a"]),
            left_only: Vocabulary::new(&[("P", 1), ("E", 2)], &["b"]),
            right_only: Vocabulary::new(&[("Q", 1), ("F", 2)], &["d"]),
            max_depth: 3,
            max_quantifier_depth: 2,
        }
    }

    /// Instances small enough for brute-force interpolant search.
    pub fn small() -> Self {
        CorpusShape {
            shared: Vocabulary::new(&[("A", 1)], &[]),
            left_only: Vocabulary::new(&[("P", 1)], &[]),
            right_only: Vocabulary::new(&[("Q", 1)], &[]),
            max_depth: 2,
            max_quantifier_depth: 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CorpusInstance {
    pub alpha: Formula,
    pub gamma: Formula,
    pub delta: Formula,
    pub phi: Formula,
    pub psi: Formula,
}

impl CorpusInstance {
    pub fn problem_file(&self) -> ProblemFile {
        ProblemFile {
            left: vec![self.phi.clone()],
            right: vec![self.psi.clone()],
            ..Default::default()
        }
    }
}

pub struct CorpusGenerator {
    rng: ChaCha8Rng,
    shape: CorpusShape,
}

impl CorpusGenerator {
    pub fn new(seed: u64, shape: CorpusShape) -> Self {
        CorpusGenerator {
            rng: ChaCha8Rng::seed_from_u64(seed),
            shape,
        }
    }

    pub fn instance(&mut self) -> CorpusInstance {
        let shared = self.shape.shared.clone();
        let left = shared.union(&self.shape.left_only);
        let right = shared.union(&self.shape.right_only);
        let alpha = self.sentence(&shared);
        let gamma = self.sentence(&left);
        let delta = self.sentence(&right);
        CorpusInstance {
            phi: Formula::And(vec![alpha.clone(), gamma.clone()]),
            psi: Formula::Or(vec![alpha.clone(), delta.clone()]),
            alpha,
            gamma,
            delta,
        }
    }

    pub fn instances(&mut self, count: usize) -> Vec<CorpusInstance> {
        (0..count).map(|_| self.instance()).collect()
    }

    /// A sentence over `voc`; retries until every atom can be filled.
    pub fn sentence(&mut self, voc: &Vocabulary) -> Formula {
        let depth = self.shape.max_depth;
        let qd = self.shape.max_quantifier_depth;
        self.formula(voc, depth, qd, &mut Vec::new())
    }

    fn formula(&mut self, voc: &Vocabulary, depth: usize, qd: usize, scope: &mut Vec<String>) -> Formula {
        if scope.is_empty() && voc.constants.is_empty() && qd > 0 {
            return self.quantified(voc, depth.max(1), qd, scope);
        }
        if depth == 0 {
            return self.literal(voc, scope);
        }
        match self.rng.gen_range(0..10) {
            0 | 1 => self.literal(voc, scope),
            2 | 3 => Formula::And(vec![
                self.formula(voc, depth - 1, qd, scope),
                self.formula(voc, depth - 1, qd, scope),
            ]),
            4 | 5 => Formula::Or(vec![
                self.formula(voc, depth - 1, qd, scope),
                self.formula(voc, depth - 1, qd, scope),
            ]),
            6 => Formula::Not(Box::new(self.formula(voc, depth - 1, qd, scope))),
            _ if qd > 0 => self.quantified(voc, depth, qd, scope),
            _ => self.literal(voc, scope),
        }
    }

    fn quantified(&mut self, voc: &Vocabulary, depth: usize, qd: usize, scope: &mut Vec<String>) -> Formula {
        let v = ["x", "y", "z", "u"][scope.len() % 4].to_string();
        let v = if scope.contains(&v) { format!("{v}{}", scope.len()) } else { v };
        scope.push(v.clone());
        let body = self.formula(voc, depth - 1, qd - 1, scope);
        scope.pop();
        if self.rng.gen_bool(0.5) {
            Formula::Exists(vec![v], Box::new(body))
        } else {
            Formula::Forall(vec![v], Box::new(body))
        }
    }

    fn literal(&mut self, voc: &Vocabulary, scope: &[String]) -> Formula {
        let (rel, arity) = voc.relations.choose(&mut self.rng).expect("vocabulary has relations").clone();
        let mut terms: Vec<Term> = scope.iter().map(|v| Term::Var(v.clone())).collect();
        terms.extend(voc.constants.iter().map(|c| Term::Const(c.clone())));
        let args = (0..arity)
            .map(|_| terms.choose(&mut self.rng).expect("some term in scope").clone())
            .collect();
        let atom = Formula::Atom(Atom::new(rel, args));
        if self.rng.gen_bool(0.35) {
            Formula::Not(Box::new(atom))
        } else {
            atom
        }
    }
}

/// Problem files for `count` instances, separated by comment lines.
pub fn render_corpus(seed: u64, count: usize, shape: CorpusShape) -> String {
    let mut gen = CorpusGenerator::new(seed, shape);
    let mut out = String::new();
    for (i, inst) in gen.instances(count).into_iter().enumerate() {
        out.push_str(&format!("# instance {i}\n"));
        out.push_str(&print_problem(&inst.problem_file()));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interpolation::entails;

    #[test]
    fn deterministic() {
        let a = render_corpus(7, 20, CorpusShape::standard());
        let b = render_corpus(7, 20, CorpusShape::standard());
        assert_eq!(a, b);
        assert_ne!(a, render_corpus(8, 20, CorpusShape::standard()));
    }

    #[test]
    fn instances_are_valid_sentences() {
        let mut gen = CorpusGenerator::new(1, CorpusShape::standard());
        for inst in gen.instances(30) {
            assert!(inst.phi.is_sentence() && inst.psi.is_sentence());
            inst.phi.check_well_formed().unwrap();
            assert!(entails(&inst.phi, &inst.psi, 10_000).unwrap().is_closed());
        }
    }
}
