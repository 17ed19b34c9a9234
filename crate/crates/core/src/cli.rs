//! Command-line front end.
//!
//! Exit codes: 0 success, 1 negative verdict, 2 unknown within the
//! budget, 3 usage or input error.

use std::collections::BTreeSet;
use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::access::{accessible_part, bind_patt, is_bounded, parse_methods};
use crate::corpus::{render_corpus, CorpusShape};
use crate::definability::{
    explicit_definition, monotone_rewrite, padoa_counterexample, robinson_separator, DefinabilityError, Theory,
};
use crate::fragments::{cip_status, classify};
use crate::interpolation::{
    craig_interpolant_with_proof, lyndon_check, search_interpolant, verify_interpolant, InterpolationError, Verdict,
};
use crate::logic::{simplify, to_nnf, Formula, Symbol};
use crate::models::{find_model, satisfies, Structure};
use crate::syntax::{parse, parse_problem, print, print_problem, ProblemFile};
use crate::tableau::{prove, LabeledSentence, Outcome};
use crate::theory::{split_theory, strong_interpolant, weak_interpolant, TheoryError};

pub const DEFAULT_BUDGET: usize = 100_000;

#[derive(Parser, Debug)]
#[command(name = "tabinterp", version, about = "Tableau prover with interpolant extraction")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Rule applications allowed per prover call
    #[arg(long)]
    budget: Option<usize>,
    /// Largest domain tried by finite model searches
    #[arg(long, default_value_t = 3)]
    max_model_size: usize,
    /// Simplify formulas before printing
    #[arg(long)]
    simplify: bool,
}

#[derive(Args, Debug, Clone)]
struct Input {
    /// Problem file with [left], [right], [theory] and [options] sections
    file: PathBuf,
    #[command(flatten)]
    common: Common,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Refute the labeled sentences of a problem file
    Prove {
        #[command(flatten)]
        input: Input,
    },
    /// Interpolant for left -> right
    Interpolate {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        trace: bool,
        /// Print the tableau with an interpolant at every node
        #[arg(long)]
        emit_annotated: bool,
    },
    /// Check a candidate interpolant for left -> right
    CheckInterpolant {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        theta: String,
    },
    /// Check the polarity condition on a candidate interpolant
    Lyndon {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        theta: String,
    },
    /// Explicit definition of a relation from the theory section
    Beth {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        relation: String,
        /// Comma-separated base relations
        #[arg(long, default_value = "")]
        tau: String,
    },
    /// Two models that agree on the base relations but not on the relation
    Padoa {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        relation: String,
        #[arg(long, default_value = "")]
        tau: String,
    },
    /// Separating sentence for inconsistent left and right theories
    Robinson {
        #[command(flatten)]
        input: Input,
    },
    /// Interpolant for left -> right under the theory section
    TheoryInterpolate {
        #[command(flatten)]
        input: Input,
        /// Restrict to symbols shared by left and right
        #[arg(long)]
        strong: bool,
    },
    /// Split the theory section between two signatures
    Split {
        #[command(flatten)]
        input: Input,
        /// Comma-separated symbols of the first side (default: symbols of left)
        #[arg(long)]
        sigma: Option<String>,
        /// Comma-separated symbols of the second side (default: symbols of right)
        #[arg(long)]
        tau: Option<String>,
    },
    /// Equivalent of left in which the relation occurs only positively
    MonotoneRewrite {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        relation: String,
    },
    /// Binding patterns of the first left sentence
    Bindpatt {
        #[command(flatten)]
        input: Input,
        /// Access methods such as "R:- S:1,2"; reports boundedness
        #[arg(long)]
        methods: Option<String>,
    },
    /// Accessible part of a structure
    Accpart {
        /// Structure JSON file
        structure: PathBuf,
        #[arg(long, default_value = "")]
        methods: String,
        /// Comma-separated starting elements
        #[arg(long, default_value = "")]
        tuple: String,
    },
    /// Fragment membership of the left sentences
    Classify {
        #[command(flatten)]
        input: Input,
        /// Comma-separated relativizing predicates
        #[arg(long, default_value = "")]
        relativizers: String,
    },
    /// Interpolation status of a named fragment
    Cip { fragment: String },
    /// Evaluate the sentences of a problem file in a structure
    Eval {
        structure: PathBuf,
        #[command(flatten)]
        input: Input,
    },
    /// Finite model of all sentences of a problem file
    FindModel {
        #[command(flatten)]
        input: Input,
    },
    /// Smallest interpolant by enumeration
    SearchInterpolant {
        #[command(flatten)]
        input: Input,
        /// Largest candidate size
        #[arg(long, default_value_t = 7)]
        max_size: usize,
    },
    /// Print seeded valid implications as problem files
    Corpus {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 10)]
        count: usize,
        /// Use the small vocabulary
        #[arg(long)]
        small: bool,
    },
}

/// Outcome of a subcommand: exit code plus stdout and stderr text.
struct Report {
    code: i32,
    out: String,
    err: String,
}

impl Report {
    fn ok(out: impl Into<String>) -> Self {
        Report {
            code: 0,
            out: out.into(),
            err: String::new(),
        }
    }

    fn negative(out: impl Into<String>, err: impl Into<String>) -> Self {
        Report {
            code: 1,
            out: out.into(),
            err: err.into(),
        }
    }

    fn unknown(err: impl Into<String>) -> Self {
        Report {
            code: 2,
            out: String::new(),
            err: err.into(),
        }
    }

    fn usage(err: impl Into<String>) -> Self {
        Report {
            code: 3,
            out: String::new(),
            err: err.into(),
        }
    }
}

pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let report = match Cli::try_parse_from(args) {
        Ok(cli) => dispatch(cli.command).unwrap_or_else(Report::usage),
        Err(e) => {
            let text = e.render().to_string();
            if e.use_stderr() {
                Report::usage(text)
            } else {
                Report::ok(text)
            }
        }
    };
    let _ = stdout.write_all(report.out.as_bytes());
    let _ = stderr.write_all(report.err.as_bytes());
    let _ = stdout.flush();
    report.code
}

struct Loaded {
    pf: ProblemFile,
    budget: usize,
    common: Common,
}

impl Loaded {
    fn left(&self) -> Formula {
        Formula::and(self.pf.left.clone())
    }

    fn right(&self) -> Formula {
        Formula::and(self.pf.right.clone())
    }

    fn theory(&self) -> Theory {
        Theory::new("theory", self.pf.theory.clone())
    }

    fn show(&self, f: &Formula) -> String {
        if self.common.simplify {
            print(&simplify(f))
        } else {
            print(f)
        }
    }
}

fn read(path: &Path) -> Result<String, String> {
    fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}\n", path.display()))
}

fn load(input: &Input) -> Result<Loaded, String> {
    let text = read(&input.file)?;
    let pf = parse_problem(&text).map_err(|e| format!("{}: {e}\n", input.file.display()))?;
    let budget = match (input.common.budget, pf.option_usize("budget")) {
        (Some(b), _) => b,
        (None, Some(Ok(b))) => b,
        (None, Some(Err(e))) => return Err(format!("{}: {e}\n", input.file.display())),
        (None, None) => DEFAULT_BUDGET,
    };
    if budget == 0 {
        return Err("budget must be positive\n".into());
    }
    Ok(Loaded {
        pf,
        budget,
        common: input.common.clone(),
    })
}

fn names(list: &str) -> BTreeSet<String> {
    list.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(str::to_string)
        .collect()
}

/// Relations start with an uppercase letter, constants do not.
fn symbols(list: &str) -> BTreeSet<Symbol> {
    names(list)
        .into_iter()
        .map(|s| {
            if s.chars().next().is_some_and(char::is_uppercase) {
                Symbol::Relation(s)
            } else {
                Symbol::Constant(s)
            }
        })
        .collect()
}

fn parse_theta(text: &str) -> Result<Formula, String> {
    parse(text).map_err(|e| format!("--theta: {e}\n"))
}

fn load_structure(path: &Path) -> Result<Structure, String> {
    let text = read(path)?;
    Structure::from_json(&text, None).map_err(|e| format!("{}: {e}\n", path.display()))
}

fn model_report(m: &Structure, what: &str) -> Report {
    Report::negative(format!("{}\n", m.to_json()), format!("{what}\n"))
}

fn interpolation_report(e: InterpolationError) -> Report {
    match e {
        InterpolationError::NotValid(m) => model_report(&m, "the implication is not valid"),
        InterpolationError::NotProvedWithinBudget => Report::unknown("no proof within the budget\n"),
        other => Report::usage(format!("{other}\n")),
    }
}

fn definability_report(e: DefinabilityError) -> Report {
    match e {
        DefinabilityError::NotProvedWithinBudget => Report::unknown("no proof within the budget\n"),
        DefinabilityError::ImplicitDefinabilityRefuted(a, b) => Report::negative(
            format!("{}\n{}\n", a.to_json(), b.to_json()),
            "not implicitly definable: the two models agree on the base relations\n",
        ),
        DefinabilityError::JointlyConsistent(m) => model_report(&m, "the theories are jointly consistent"),
        DefinabilityError::Interpolation(e) => interpolation_report(e),
        other => Report::usage(format!("{other}\n")),
    }
}

fn theory_report(e: TheoryError) -> Report {
    match e {
        TheoryError::NotSplittable => Report::negative("", "the theory is not splittable\n"),
        TheoryError::NotProvedWithinBudget => Report::unknown("no proof within the budget\n"),
        TheoryError::NotEntailed(m) => model_report(&m, "the entailment fails"),
        TheoryError::Interpolation(e) => interpolation_report(e),
        other => Report::usage(format!("{other}\n")),
    }
}

fn dispatch(cmd: Command) -> Result<Report, String> {
    Ok(match cmd {
        Command::Prove { input } => {
            let l = load(&input)?;
            let mut labeled: Vec<LabeledSentence> = l
                .pf
                .left
                .iter()
                .chain(&l.pf.theory)
                .map(|f| LabeledSentence::left(to_nnf(f)))
                .collect();
            labeled.extend(l.pf.right.iter().map(|f| LabeledSentence::right(to_nnf(f))));
            match prove(&labeled, l.budget).map_err(|e| format!("{e}\n"))? {
                Outcome::Closed(t) => {
                    Report::ok(format!("closed: {} branches\n{}", t.branch_count(), t.trace()))
                }
                Outcome::Satisfiable(m) => model_report(&m, "open saturated branch"),
                Outcome::Unknown { budget_spent } => {
                    Report::unknown(format!("unknown after {budget_spent} rule applications\n"))
                }
            }
        }
        Command::Interpolate {
            input,
            trace,
            emit_annotated,
        } => {
            let l = load(&input)?;
            match craig_interpolant_with_proof(&l.left(), &l.right(), l.budget) {
                Ok((theta, annotated)) => {
                    let mut out = format!("{}\n", l.show(&theta));
                    if emit_annotated {
                        out.push_str(&annotated.trace());
                    } else if trace {
                        out.push_str(&annotated.tableau.trace());
                    }
                    Report::ok(out)
                }
                Err(e) => interpolation_report(e),
            }
        }
        Command::CheckInterpolant { input, theta } => {
            let l = load(&input)?;
            let theta = parse_theta(&theta)?;
            match verify_interpolant(&l.left(), &l.right(), &theta, l.budget) {
                Verdict::Verified => Report::ok("verified\n"),
                Verdict::SignatureViolation(m) => Report::negative("signature violation\n", format!("{m}\n")),
                Verdict::EntailmentFails(m) => Report::negative("entailment fails\n", format!("{m}\n")),
                Verdict::EntailmentUnknown => Report::unknown("entailment unknown within the budget\n"),
            }
        }
        Command::Lyndon { input, theta } => {
            let l = load(&input)?;
            let theta = parse_theta(&theta)?;
            if lyndon_check(&l.left(), &l.right(), &theta) {
                Report::ok("lyndon: pass\n")
            } else {
                Report::negative("lyndon: fail\n", "")
            }
        }
        Command::Beth { input, relation, tau } => {
            let l = load(&input)?;
            match explicit_definition(&l.theory(), &relation, &names(&tau), l.budget) {
                Ok(def) => Report::ok(format!("{}\n", l.show(&def.biconditional(&relation)))),
                Err(e) => definability_report(e),
            }
        }
        Command::Padoa { input, relation, tau } => {
            let l = load(&input)?;
            match padoa_counterexample(&l.theory(), &relation, &names(&tau), l.common.max_model_size) {
                Some((a, b)) => Report::ok(format!("{}\n{}\n", a.to_json(), b.to_json())),
                None => Report::negative(
                    "",
                    format!("no counterexample up to size {}\n", l.common.max_model_size),
                ),
            }
        }
        Command::Robinson { input } => {
            let l = load(&input)?;
            let s1 = Theory::new("left", l.pf.left.clone());
            let s2 = Theory::new("right", l.pf.right.clone());
            match robinson_separator(&s1, &s2, l.budget) {
                Ok(f) => Report::ok(format!("{}\n", l.show(&f))),
                Err(e) => definability_report(e),
            }
        }
        Command::TheoryInterpolate { input, strong } => {
            let l = load(&input)?;
            let result = if strong {
                strong_interpolant(&l.theory(), &l.left(), &l.right(), l.budget)
            } else {
                weak_interpolant(&l.theory(), &l.left(), &l.right(), l.budget)
            };
            match result {
                Ok(f) => Report::ok(format!("{}\n", l.show(&f))),
                Err(e) => theory_report(e),
            }
        }
        Command::Split { input, sigma, tau } => {
            let l = load(&input)?;
            let sigma = sigma.map_or_else(|| l.left().symbols(), |s| symbols(&s));
            let tau = tau.map_or_else(|| l.right().symbols(), |s| symbols(&s));
            match split_theory(&l.theory(), &sigma, &tau) {
                Some(split) => {
                    let pf = ProblemFile {
                        left: split.sigma1.sentences,
                        right: split.sigma2.sentences,
                        ..Default::default()
                    };
                    Report::ok(print_problem(&pf))
                }
                None => Report::negative("", "the theory is not splittable\n"),
            }
        }
        Command::MonotoneRewrite { input, relation } => {
            let l = load(&input)?;
            match monotone_rewrite(&l.left(), &relation, l.budget) {
                Ok(f) => Report::ok(format!("{}\n", l.show(&f))),
                Err(e) => definability_report(e),
            }
        }
        Command::Bindpatt { input, methods } => {
            let l = load(&input)?;
            let phi = l.pf.left.first().cloned().unwrap_or(Formula::Top);
            match bind_patt(&phi) {
                None => Report::negative("undefined\n", ""),
                Some(ms) => {
                    let shown: Vec<String> = ms.iter().map(|m| m.to_string()).collect();
                    let mut out = format!("{}\n", if shown.is_empty() { "-".to_string() } else { shown.join(" ") });
                    match methods {
                        None => Report::ok(out),
                        Some(s) => {
                            let s = parse_methods(&s).map_err(|e| format!("{e}\n"))?;
                            if is_bounded(&phi, &s) {
                                out.push_str("bounded\n");
                                Report::ok(out)
                            } else {
                                out.push_str("not bounded\n");
                                Report::negative(out, "")
                            }
                        }
                    }
                }
            }
        }
        Command::Accpart {
            structure,
            methods,
            tuple,
        } => {
            let a = load_structure(&structure)?;
            let ms = parse_methods(&methods).map_err(|e| format!("{e}\n"))?;
            let sig = a.signature();
            for m in &ms {
                m.check(&sig).map_err(|e| format!("{e}\n"))?;
            }
            let seed = tuple
                .split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(|s| s.parse::<usize>().map_err(|_| format!("bad element {s}\n")))
                .collect::<Result<Vec<_>, _>>()?;
            if let Some(e) = seed.iter().find(|&&e| e >= a.domain) {
                return Err(format!("element {e} outside the domain\n"));
            }
            let d: Vec<String> = accessible_part(&a, &ms, &seed).iter().map(|e| e.to_string()).collect();
            Report::ok(format!("[{}]\n", d.join(", ")))
        }
        Command::Classify { input, relativizers } => {
            let l = load(&input)?;
            Report::ok(classify(&l.left(), &names(&relativizers)).table())
        }
        Command::Cip { fragment } => match cip_status(&fragment) {
            Ok(s) => Report::ok(format!("{fragment}: {s}\n")),
            Err(e) => return Err(format!("{e}\n")),
        },
        Command::Eval { structure, input } => {
            let a = load_structure(&structure)?;
            let l = load(&input)?;
            let mut out = String::new();
            let mut all = true;
            for f in l.pf.all_sentences() {
                let v = satisfies(&a, f).map_err(|e| format!("{e}\n"))?;
                all &= v;
                out.push_str(&format!("{v}\t{}\n", print(f)));
            }
            if all {
                Report::ok(out)
            } else {
                Report::negative(out, "")
            }
        }
        Command::FindModel { input } => {
            let l = load(&input)?;
            let all: Vec<Formula> = l.pf.all_sentences().cloned().collect();
            match find_model(&all, l.common.max_model_size) {
                Some(m) => Report::ok(format!("{}\n", m.to_json())),
                None => Report::negative("", format!("no model up to size {}\n", l.common.max_model_size)),
            }
        }
        Command::SearchInterpolant { input, max_size } => {
            let l = load(&input)?;
            match search_interpolant(&l.left(), &l.right(), max_size, l.budget) {
                Some(f) => Report::ok(format!("{}\n", l.show(&f))),
                None => Report::negative("", format!("no interpolant up to size {max_size}\n")),
            }
        }
        Command::Corpus { seed, count, small } => {
            let shape = if small { CorpusShape::small() } else { CorpusShape::standard() };
            Report::ok(render_corpus(seed, count, shape))
        }
    })
}
