//! Text front-end: lexer, recursive-descent parser, pretty-printer and
//! problem-file reader.
//!
//! Grammar, loosest to tightest: `<->`, `->` (right-associative), `|`, `&`,
//! `!`. Quantifiers (`forall x y. φ`, `exists x. φ`) extend as far right as
//! possible. Capitalized identifiers name relations; lowercase identifiers
//! are variables when bound by an enclosing quantifier and constants
//! otherwise. The Unicode connectives `¬ ∧ ∨ → ↔ ∀ ∃ ⊤ ⊥` are accepted too.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use thiserror::Error;

use crate::logic::{is_reserved_name, Atom, Formula, Term};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("{line}:{col}: {message}")]
    Syntax {
        line: usize,
        col: usize,
        message: String,
    },
    #[error("{line}:{col}: relation {relation} used with arity {found}, expected {expected}")]
    Arity {
        line: usize,
        col: usize,
        relation: String,
        expected: usize,
        found: usize,
    },
    #[error("{line}:{col}: `{name}` is in the reserved constant namespace c<digits>")]
    Reserved { line: usize, col: usize, name: String },
    #[error("{line}:{col}: equality is not supported")]
    Equality { line: usize, col: usize },
    #[error("{line}:{col}: function symbol `{name}` is not supported")]
    FunctionSymbol { line: usize, col: usize, name: String },
    #[error("{line}: unknown section [{name}]")]
    UnknownSection { line: usize, name: String },
    #[error("{line}: malformed option line, expected `key = value`")]
    BadOption { line: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    LParen,
    RParen,
    Comma,
    Dot,
    And,
    Or,
    Not,
    Implies,
    Iff,
    Forall,
    Exists,
    True,
    False,
    Eq,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Dot => "`.`".into(),
            Tok::And => "`&`".into(),
            Tok::Or => "`|`".into(),
            Tok::Not => "`!`".into(),
            Tok::Implies => "`->`".into(),
            Tok::Iff => "`<->`".into(),
            Tok::Forall => "`forall`".into(),
            Tok::Exists => "`exists`".into(),
            Tok::True => "`true`".into(),
            Tok::False => "`false`".into(),
            Tok::Eq => "`=`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Clone, Debug)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

fn is_ident_start(c: char) -> bool {
    c.is_alphabetic() || c == '_'
}

fn is_ident_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '\''
}

fn lex(text: &str, first_line: usize) -> Result<Vec<Spanned>, ParseError> {
    let mut out = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let (mut i, mut line, mut col) = (0, first_line, 1);
    while i < chars.len() {
        let c = chars[i];
        let (tl, tc) = (line, col);
        if c == '\n' {
            line += 1;
            col = 1;
            i += 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        let mut push = |tok: Tok, len: usize, i: &mut usize, col: &mut usize| {
            out.push(Spanned { tok, line: tl, col: tc });
            *i += len;
            *col += len;
        };
        let rest = |k: usize| chars.get(i + k).copied();
        match c {
            '(' => push(Tok::LParen, 1, &mut i, &mut col),
            ')' => push(Tok::RParen, 1, &mut i, &mut col),
            ',' => push(Tok::Comma, 1, &mut i, &mut col),
            '.' => push(Tok::Dot, 1, &mut i, &mut col),
            '&' | '∧' => push(Tok::And, 1, &mut i, &mut col),
            '|' | '∨' => push(Tok::Or, 1, &mut i, &mut col),
            '!' | '~' | '¬' => push(Tok::Not, 1, &mut i, &mut col),
            '→' => push(Tok::Implies, 1, &mut i, &mut col),
            '↔' => push(Tok::Iff, 1, &mut i, &mut col),
            '∀' => push(Tok::Forall, 1, &mut i, &mut col),
            '∃' => push(Tok::Exists, 1, &mut i, &mut col),
            '⊤' => push(Tok::True, 1, &mut i, &mut col),
            '⊥' => push(Tok::False, 1, &mut i, &mut col),
            '=' => push(Tok::Eq, 1, &mut i, &mut col),
            '-' if rest(1) == Some('>') => push(Tok::Implies, 2, &mut i, &mut col),
            '<' if rest(1) == Some('-') && rest(2) == Some('>') => {
                push(Tok::Iff, 3, &mut i, &mut col)
            }
            c if is_ident_start(c) => {
                let start = i;
                while i < chars.len() && is_ident_char(chars[i]) {
                    i += 1;
                }
                let word: String = chars[start..i].iter().collect();
                col += i - start;
                let tok = match word.as_str() {
                    "forall" => Tok::Forall,
                    "exists" => Tok::Exists,
                    "true" => Tok::True,
                    "false" => Tok::False,
                    _ => Tok::Ident(word),
                };
                out.push(Spanned { tok, line: tl, col: tc });
            }
            other => {
                return Err(ParseError::Syntax {
                    line: tl,
                    col: tc,
                    message: format!("unexpected character `{other}`"),
                })
            }
        }
    }
    out.push(Spanned {
        tok: Tok::Eof,
        line,
        col,
    });
    Ok(out)
}

fn is_relation_name(name: &str) -> bool {
    name.chars().next().is_some_and(char::is_uppercase)
}

struct Parser<'a> {
    toks: Vec<Spanned>,
    pos: usize,
    bound: Vec<String>,
    arities: &'a mut BTreeMap<String, usize>,
}

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn here(&self) -> (usize, usize) {
        let t = &self.toks[self.pos];
        (t.line, t.col)
    }

    fn bump(&mut self) -> Spanned {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        let (line, col) = self.here();
        Err(ParseError::Syntax {
            line,
            col,
            message: message.into(),
        })
    }

    fn expect(&mut self, tok: Tok) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            self.error(format!(
                "expected {}, found {}",
                tok.describe(),
                self.peek().describe()
            ))
        }
    }

    fn formula(&mut self) -> Result<Formula, ParseError> {
        let mut left = self.implication()?;
        while *self.peek() == Tok::Iff {
            self.bump();
            let right = self.implication()?;
            left = Formula::iff(left, right);
        }
        Ok(left)
    }

    fn implication(&mut self) -> Result<Formula, ParseError> {
        let left = self.disjunction()?;
        if *self.peek() == Tok::Implies {
            self.bump();
            let right = self.implication()?;
            return Ok(Formula::implies(left, right));
        }
        Ok(left)
    }

    fn disjunction(&mut self) -> Result<Formula, ParseError> {
        let mut parts = vec![self.conjunction()?];
        while *self.peek() == Tok::Or {
            self.bump();
            parts.push(self.conjunction()?);
        }
        Ok(Formula::or(parts))
    }

    fn conjunction(&mut self) -> Result<Formula, ParseError> {
        let mut parts = vec![self.unary()?];
        while *self.peek() == Tok::And {
            self.bump();
            parts.push(self.unary()?);
        }
        Ok(Formula::and(parts))
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        match self.peek().clone() {
            Tok::Not => {
                self.bump();
                Ok(Formula::negate(self.unary()?))
            }
            Tok::Forall | Tok::Exists => self.quantifier(),
            Tok::True => {
                self.bump();
                self.reject_equality()?;
                Ok(Formula::Top)
            }
            Tok::False => {
                self.bump();
                self.reject_equality()?;
                Ok(Formula::bottom())
            }
            Tok::LParen => {
                self.bump();
                let f = self.formula()?;
                self.expect(Tok::RParen)?;
                self.reject_equality()?;
                Ok(f)
            }
            Tok::Ident(name) => self.atom_or_term(name),
            other => self.error(format!("expected a formula, found {}", other.describe())),
        }
    }

    fn reject_equality(&self) -> Result<(), ParseError> {
        if *self.peek() == Tok::Eq {
            let (line, col) = self.here();
            return Err(ParseError::Equality { line, col });
        }
        Ok(())
    }

    fn quantifier(&mut self) -> Result<Formula, ParseError> {
        let universal = *self.peek() == Tok::Forall;
        self.bump();
        let mut vars = Vec::new();
        loop {
            match self.peek().clone() {
                Tok::Ident(name) if !is_relation_name(&name) => {
                    let (line, col) = self.here();
                    if is_reserved_name(&name) {
                        return Err(ParseError::Reserved { line, col, name });
                    }
                    if vars.contains(&name) {
                        return Err(ParseError::Syntax {
                            line,
                            col,
                            message: format!("variable `{name}` bound twice in one block"),
                        });
                    }
                    self.bump();
                    vars.push(name);
                    if *self.peek() == Tok::Comma {
                        self.bump();
                    }
                }
                _ => break,
            }
        }
        if vars.is_empty() {
            return self.error("expected a variable after the quantifier");
        }
        if *self.peek() == Tok::Dot {
            self.bump();
        }
        let depth = self.bound.len();
        self.bound.extend(vars.iter().cloned());
        let body = self.formula();
        self.bound.truncate(depth);
        let body = body?;
        Ok(if universal {
            Formula::Forall(vars, Box::new(body))
        } else {
            Formula::Exists(vars, Box::new(body))
        })
    }

    fn atom_or_term(&mut self, name: String) -> Result<Formula, ParseError> {
        let (line, col) = self.here();
        self.bump();
        if !is_relation_name(&name) {
            if *self.peek() == Tok::LParen {
                return Err(ParseError::FunctionSymbol { line, col, name });
            }
            if *self.peek() == Tok::Eq {
                let (line, col) = self.here();
                return Err(ParseError::Equality { line, col });
            }
            return Err(ParseError::Syntax {
                line,
                col,
                message: format!("term `{name}` used as a formula"),
            });
        }
        let mut args = Vec::new();
        if *self.peek() == Tok::LParen {
            self.bump();
            if *self.peek() != Tok::RParen {
                loop {
                    args.push(self.term()?);
                    if *self.peek() == Tok::Comma {
                        self.bump();
                    } else {
                        break;
                    }
                }
            }
            self.expect(Tok::RParen)?;
        }
        self.reject_equality()?;
        match self.arities.get(&name) {
            Some(&n) if n != args.len() => {
                return Err(ParseError::Arity {
                    line,
                    col,
                    relation: name,
                    expected: n,
                    found: args.len(),
                })
            }
            _ => {
                self.arities.insert(name.clone(), args.len());
            }
        }
        Ok(Formula::Atom(Atom::new(name, args)))
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        let (line, col) = self.here();
        match self.peek().clone() {
            Tok::Ident(name) if !is_relation_name(&name) => {
                self.bump();
                if *self.peek() == Tok::LParen {
                    return Err(ParseError::FunctionSymbol { line, col, name });
                }
                if self.bound.contains(&name) {
                    Ok(Term::Var(name))
                } else if is_reserved_name(&name) {
                    Err(ParseError::Reserved { line, col, name })
                } else {
                    Ok(Term::Const(name))
                }
            }
            Tok::Ident(name) => self.error(format!("relation symbol `{name}` used as a term")),
            other => self.error(format!("expected a term, found {}", other.describe())),
        }
    }
}

fn parse_at(
    text: &str,
    first_line: usize,
    free: &[String],
    arities: &mut BTreeMap<String, usize>,
) -> Result<Formula, ParseError> {
    let toks = lex(text, first_line)?;
    let mut p = Parser {
        toks,
        pos: 0,
        bound: free.to_vec(),
        arities,
    };
    let f = p.formula()?;
    if *p.peek() == Tok::Eq {
        let (line, col) = p.here();
        return Err(ParseError::Equality { line, col });
    }
    if *p.peek() != Tok::Eof {
        return p.error(format!("unexpected {}", p.peek().describe()));
    }
    Ok(f)
}

/// Parses a sentence. Unbound lowercase identifiers become constants.
pub fn parse(text: &str) -> Result<Formula, ParseError> {
    parse_at(text, 1, &[], &mut BTreeMap::new())
}

/// Parses a formula in which the given names are free variables.
pub fn parse_with_free_vars(text: &str, vars: &[&str]) -> Result<Formula, ParseError> {
    let free: Vec<String> = vars.iter().map(|v| v.to_string()).collect();
    parse_at(text, 1, &free, &mut BTreeMap::new())
}

// Binding strength used by the printer.
const P_IFF: u8 = 1;
const P_IMP: u8 = 2;
const P_OR: u8 = 3;
const P_AND: u8 = 4;
const P_UNARY: u8 = 5;

enum Shape<'a> {
    Iff(&'a Formula, &'a Formula),
    Implies(&'a Formula, &'a Formula),
    Other,
}

fn implication_parts(f: &Formula) -> Option<(&Formula, &Formula)> {
    if let Formula::Not(inner) = f {
        if let Formula::And(parts) = inner.as_ref() {
            if let [a, Formula::Not(b)] = parts.as_slice() {
                return Some((a, b));
            }
        }
    }
    None
}

fn shape(f: &Formula) -> Shape<'_> {
    if let Formula::And(parts) = f {
        if let [l, r] = parts.as_slice() {
            if let (Some((a, b)), Some((b2, a2))) = (implication_parts(l), implication_parts(r)) {
                if a == a2 && b == b2 {
                    return Shape::Iff(a, b);
                }
            }
        }
    }
    match implication_parts(f) {
        Some((a, b)) => Shape::Implies(a, b),
        None => Shape::Other,
    }
}

fn level(f: &Formula) -> u8 {
    match shape(f) {
        Shape::Iff(..) => P_IFF,
        Shape::Implies(..) => P_IMP,
        Shape::Other => match f {
            Formula::Or(_) => P_OR,
            Formula::And(_) => P_AND,
            _ => P_UNARY,
        },
    }
}

fn is_quantifier(f: &Formula) -> bool {
    matches!(f, Formula::Exists(..) | Formula::Forall(..))
}

/// Whether `f` prints with a trailing open scope (a quantifier or negation
/// chain ending in one), so that anything printed after it would be
/// swallowed.
fn ends_open(f: &Formula) -> bool {
    match shape(f) {
        Shape::Iff(_, b) | Shape::Implies(_, b) => ends_open(b),
        Shape::Other => match f {
            Formula::Exists(..) | Formula::Forall(..) => true,
            Formula::Not(g) => !g.is_bottom() && **g != Formula::Top && ends_open(g),
            Formula::And(fs) | Formula::Or(fs) => fs.last().is_some_and(ends_open),
            _ => false,
        },
    }
}

struct Printer {
    out: String,
}

impl Printer {
    /// Prints `f` so that it parses back at binding strength `min`.
    /// `tail` is true when nothing follows `f` in its enclosing scope.
    /// `same` names a connective whose direct children must be wrapped to
    /// stop the parser from merging them into the parent's operand list.
    fn sub(&mut self, f: &Formula, min: u8, tail: bool, forbid_same: Option<u8>) {
        let lv = level(f);
        let wrap = lv < min
            || forbid_same == Some(lv)
            || (!tail && ends_open(f))
            || (is_quantifier(f) && !tail);
        if wrap {
            self.out.push('(');
            self.node(f, true);
            self.out.push(')');
        } else {
            self.node(f, tail);
        }
    }

    fn node(&mut self, f: &Formula, tail: bool) {
        match shape(f) {
            Shape::Iff(a, b) => {
                self.sub(a, P_IMP, false, None);
                self.out.push_str(" <-> ");
                self.sub(b, P_IMP, tail, None);
                return;
            }
            Shape::Implies(a, b) => {
                self.sub(a, P_OR, false, None);
                self.out.push_str(" -> ");
                self.sub(b, P_IMP, tail, None);
                return;
            }
            Shape::Other => {}
        }
        match f {
            Formula::Atom(a) => self.atom(a),
            Formula::Top => self.out.push_str("true"),
            Formula::Not(g) if **g == Formula::Top => self.out.push_str("false"),
            Formula::Not(g) => {
                self.out.push('!');
                self.sub(g, P_UNARY, tail, None);
            }
            Formula::And(fs) => self.list(fs, " & ", P_UNARY, tail, Some(P_AND)),
            Formula::Or(fs) => self.list(fs, " | ", P_AND, tail, Some(P_OR)),
            Formula::Exists(vs, body) | Formula::Forall(vs, body) => {
                self.out.push_str(if matches!(f, Formula::Exists(..)) {
                    "exists "
                } else {
                    "forall "
                });
                self.out.push_str(&vs.join(" "));
                self.out.push_str(". ");
                self.sub(body, 0, true, None);
            }
        }
    }

    fn list(&mut self, fs: &[Formula], sep: &str, min: u8, tail: bool, same: Option<u8>) {
        let n = fs.len();
        if n < 2 {
            // Not well-formed; print something that at least parses.
            match fs.first() {
                Some(f) => {
                    self.out.push('(');
                    self.node(f, true);
                    self.out.push(')');
                }
                None => self.out.push_str(if sep == " & " { "true" } else { "false" }),
            }
            return;
        }
        for (i, f) in fs.iter().enumerate() {
            if i > 0 {
                self.out.push_str(sep);
            }
            self.sub(f, min, tail && i + 1 == n, same);
        }
    }

    fn atom(&mut self, a: &Atom) {
        self.out.push_str(&a.relation);
        if a.args.is_empty() {
            return;
        }
        self.out.push('(');
        for (i, t) in a.args.iter().enumerate() {
            if i > 0 {
                self.out.push_str(", ");
            }
            self.out.push_str(t.name());
        }
        self.out.push(')');
    }
}

/// Renders a formula in the ASCII surface syntax accepted by [`parse`].
pub fn print(phi: &Formula) -> String {
    let mut p = Printer { out: String::new() };
    p.node(phi, true);
    p.out
}

impl std::fmt::Display for Formula {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&print(self))
    }
}

/// A labeled problem: L-side and R-side sentences, a background theory and
/// free-form options.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ProblemFile {
    pub left: Vec<Formula>,
    pub right: Vec<Formula>,
    pub theory: Vec<Formula>,
    pub options: BTreeMap<String, String>,
}

impl ProblemFile {
    pub fn option_usize(&self, key: &str) -> Option<Result<usize, String>> {
        self.options.get(key).map(|v| {
            v.parse::<usize>()
                .map_err(|_| format!("option {key} expects a natural number, got `{v}`"))
        })
    }

    pub fn all_sentences(&self) -> impl Iterator<Item = &Formula> {
        self.left.iter().chain(&self.right).chain(&self.theory)
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Section {
    Left,
    Right,
    Theory,
    Options,
}

/// Reads a problem file. Lines before the first header belong to `[left]`.
pub fn parse_problem(text: &str) -> Result<ProblemFile, ParseError> {
    let mut pf = ProblemFile::default();
    let mut section = Section::Left;
    let mut arities = BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let content = match raw.find('#') {
            Some(k) => &raw[..k],
            None => raw,
        };
        let trimmed = content.trim();
        if trimmed.is_empty() {
            continue;
        }
        if trimmed.starts_with('[') && trimmed.ends_with(']') {
            let name = trimmed[1..trimmed.len() - 1].trim();
            section = match name {
                "left" => Section::Left,
                "right" => Section::Right,
                "theory" => Section::Theory,
                "options" => Section::Options,
                other => {
                    return Err(ParseError::UnknownSection {
                        line: line_no,
                        name: other.to_string(),
                    })
                }
            };
            continue;
        }
        if section == Section::Options {
            let Some((k, v)) = trimmed.split_once('=') else {
                return Err(ParseError::BadOption { line: line_no });
            };
            let (k, v) = (k.trim(), v.trim());
            if k.is_empty() {
                return Err(ParseError::BadOption { line: line_no });
            }
            pf.options.insert(k.to_string(), v.to_string());
            continue;
        }
        let f = parse_at(content, line_no, &[], &mut arities)?;
        match section {
            Section::Left => pf.left.push(f),
            Section::Right => pf.right.push(f),
            Section::Theory => pf.theory.push(f),
            Section::Options => unreachable!(),
        }
    }
    Ok(pf)
}

/// Reads a plain list of sentences, one per line, sharing one arity table.
pub fn parse_sentences(text: &str) -> Result<Vec<Formula>, ParseError> {
    let pf = parse_problem(text)?;
    let mut out = pf.left;
    out.extend(pf.right);
    out.extend(pf.theory);
    Ok(out)
}

/// Renders a problem file in the format read by [`parse_problem`].
pub fn print_problem(pf: &ProblemFile) -> String {
    let mut s = String::new();
    for (name, list) in [("left", &pf.left), ("right", &pf.right), ("theory", &pf.theory)] {
        if list.is_empty() {
            continue;
        }
        let _ = writeln!(s, "[{name}]");
        for f in list {
            let _ = writeln!(s, "{}", print(f));
        }
    }
    if !pf.options.is_empty() {
        let _ = writeln!(s, "[options]");
        for (k, v) in &pf.options {
            let _ = writeln!(s, "{k} = {v}");
        }
    }
    s
}

/// Names of constants a formula uses that clash with a binder in scope;
/// such formulas cannot round-trip through text.
pub fn captured_constants(phi: &Formula) -> BTreeSet<String> {
    fn go(f: &Formula, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        match f {
            Formula::Atom(a) => {
                for t in &a.args {
                    if let Term::Const(c) = t {
                        if bound.contains(c) {
                            out.insert(c.clone());
                        }
                    }
                }
            }
            Formula::Top => {}
            Formula::And(fs) | Formula::Or(fs) => fs.iter().for_each(|g| go(g, bound, out)),
            Formula::Not(g) => go(g, bound, out),
            Formula::Exists(vs, g) | Formula::Forall(vs, g) => {
                let n = bound.len();
                bound.extend(vs.iter().cloned());
                go(g, bound, out);
                bound.truncate(n);
            }
        }
    }
    let mut out = BTreeSet::new();
    go(phi, &mut Vec::new(), &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_quantified_conjunction() {
        let f = parse("exists x. Cat(x) & Big(x)").unwrap();
        let x = || Term::var("x");
        assert_eq!(
            f,
            Formula::Exists(
                vec!["x".into()],
                Box::new(Formula::And(vec![
                    Formula::atom("Cat", vec![x()]),
                    Formula::atom("Big", vec![x()])
                ]))
            )
        );
    }

    #[test]
    fn unbound_lowercase_is_constant() {
        assert_eq!(parse("P(c)").unwrap(), Formula::atom("P", vec![Term::constant("c")]));
    }

    #[test]
    fn rejects_equality_and_functions() {
        assert!(matches!(parse("f(x) = y"), Err(ParseError::FunctionSymbol { .. })));
        assert!(matches!(parse("x = y"), Err(ParseError::Equality { .. })));
        assert!(matches!(parse("P(a) = Q(b)"), Err(ParseError::Equality { .. })));
        assert!(matches!(parse("P(f(a))"), Err(ParseError::FunctionSymbol { .. })));
    }

    #[test]
    fn rejects_reserved_constants() {
        assert!(matches!(parse("P(c0)"), Err(ParseError::Reserved { .. })));
        assert!(parse("P(c)").is_ok());
        assert!(parse("P(cat)").is_ok());
    }

    #[test]
    fn reports_position() {
        match parse("P(a) &\n  & Q(b)") {
            Err(ParseError::Syntax { line, col, .. }) => assert_eq!((line, col), (2, 3)),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn arity_mismatch() {
        assert!(matches!(parse("R(a) & R(a, b)"), Err(ParseError::Arity { .. })));
    }

    #[test]
    fn implication_desugars() {
        let f = parse("P(a) -> Q(a)").unwrap();
        let p = Formula::atom("P", vec![Term::constant("a")]);
        let q = Formula::atom("Q", vec![Term::constant("a")]);
        assert_eq!(f, Formula::implies(p, q));
    }

    #[test]
    fn implication_is_right_associative() {
        assert_eq!(parse("A -> B -> C").unwrap(), parse("A -> (B -> C)").unwrap());
        assert_ne!(parse("A -> B -> C").unwrap(), parse("(A -> B) -> C").unwrap());
    }

    #[test]
    fn precedence() {
        assert_eq!(parse("!A & B | C").unwrap(), parse("((!A) & B) | C").unwrap());
        assert_eq!(parse("A | B -> C").unwrap(), parse("(A | B) -> C").unwrap());
    }

    #[test]
    fn quantifier_scope_is_maximal() {
        assert_eq!(
            parse("exists x. P(x) & Q(x)").unwrap(),
            parse("exists x. (P(x) & Q(x))").unwrap()
        );
        assert_eq!(
            parse("A & forall x. P(x) | B").unwrap(),
            parse("A & (forall x. (P(x) | B))").unwrap()
        );
    }

    #[test]
    fn multi_variable_block() {
        match parse("forall x y. R(x, y)").unwrap() {
            Formula::Forall(vs, _) => assert_eq!(vs, vec!["x".to_string(), "y".to_string()]),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unicode_aliases() {
        assert_eq!(
            parse("∀x (Cat(x) → Big(x) ∧ ¬Green(x))").unwrap(),
            parse("forall x. Cat(x) -> Big(x) & !Green(x)").unwrap()
        );
        assert_eq!(parse("⊥").unwrap(), Formula::bottom());
    }

    #[test]
    fn zero_ary_relations() {
        assert_eq!(parse("Z & !Z").unwrap().relations().len(), 1);
        assert_eq!(parse("Z()").unwrap(), parse("Z").unwrap());
    }

    #[test]
    fn round_trips() {
        for src in [
            "exists x. Cat(x) & (forall x. Cat(x) -> Big(x) & Green(x))",
            "true",
            "false",
            "!true",
            "(A & B) & C",
            "A | (B | C)",
            "(exists x. P(x)) & Q",
            "!(exists x. P(x)) | Q",
            "A <-> B",
            "(A -> B) -> C",
            "!(A -> B)",
            "forall x y. R(x, y) -> S(x, y)",
            "!!P(a)",
        ] {
            let f = parse(src).unwrap();
            assert_eq!(parse(&print(&f)).unwrap(), f, "{src} printed as {}", print(&f));
        }
    }

    #[test]
    fn prints_compactly() {
        let f = parse("exists x. Cat(x) & (forall x. Cat(x) -> Big(x) & Green(x))").unwrap();
        assert_eq!(
            print(&f),
            "exists x. Cat(x) & forall x. Cat(x) -> Big(x) & Green(x)"
        );
        assert_eq!(print(&parse("!(A & B) | C").unwrap()), "!(A & B) | C");
    }

    #[test]
    fn problem_file_sections() {
        let text = "# comment\nP(a)\n[right]\nQ(a) # trailing\n[theory]\nforall x. P(x) -> Q(x)\n[options]\nbudget = 50\n";
        let pf = parse_problem(text).unwrap();
        assert_eq!(pf.left.len(), 1);
        assert_eq!(pf.right.len(), 1);
        assert_eq!(pf.theory.len(), 1);
        assert_eq!(pf.option_usize("budget"), Some(Ok(50)));
        assert_eq!(parse_problem(&print_problem(&pf)).unwrap(), pf);
    }

    #[test]
    fn problem_arity_is_global() {
        assert!(matches!(
            parse_problem("R(a)\n[right]\nR(a, b)\n"),
            Err(ParseError::Arity { line: 3, .. })
        ));
        assert!(matches!(
            parse_problem("[middle]\n"),
            Err(ParseError::UnknownSection { .. })
        ));
    }

    #[test]
    fn free_variable_parsing() {
        let f = parse_with_free_vars("!exists y. T(y, x)", &["x"]).unwrap();
        assert_eq!(f.free_vars().into_iter().collect::<Vec<_>>(), vec!["x".to_string()]);
    }
}
