use tabinterp::cli::run;

fn data(name: &str) -> String {
    format!("{}/tests/data/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn call(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let mut argv = vec!["tabinterp"];
    argv.extend_from_slice(args);
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

#[test]
fn prove_prints_closed_tableau() {
    let (code, out, _) = call(&["prove", &data("two_branch.prob")]);
    assert_eq!(code, 0);
    let expected = "\
closed: 2 branches
[root] exists x. (A(x) & !B(x)) & C(x) ^L, forall y. !A(y) & E(y) | B(y) ^R
[exists c0] (A(c0) & !B(c0)) & C(c0) ^L
[conj] A(c0) & !B(c0) ^L, C(c0) ^L
[conj] A(c0) ^L, !B(c0) ^L
[forall c0] !A(c0) & E(c0) | B(c0) ^R
  + [disj] !A(c0) & E(c0) ^R
    [conj] !A(c0) ^R, E(c0) ^R
    [closed] A(c0) ^L vs !A(c0) ^R
  + [disj] B(c0) ^R
    [closed] B(c0) ^R vs !B(c0) ^L
";
    assert_eq!(out, expected);
}

#[test]
fn prove_reports_models() {
    let (code, out, _) = call(&["prove", &data("sat.prob")]);
    assert_eq!(code, 1);
    assert!(out.starts_with(r#"{"domain": 1, "relations": {"P": [[0]]}, "constants": {"c": 0}}"#));
}

#[test]
fn interpolate() {
    let (code, out, _) = call(&["interpolate", &data("two_branch_implication.prob")]);
    assert_eq!((code, out.as_str()), (0, "exists x. A(x) & !B(x)\n"));
    let (code, out, _) = call(&["interpolate", &data("cats.prob"), "--simplify"]);
    assert_eq!((code, out.as_str()), (0, "exists x. Big(x) & Cat(x)\n"));
}

#[test]
fn lyndon_rejects_wrong_polarity() {
    let theta = "(exists x. Cat(x)) & (forall x. Cat(x) -> Big(x))";
    let (code, out, _) = call(&["lyndon", &data("cats.prob"), "--theta", theta]);
    assert_eq!(code, 1);
    assert!(out.contains("fail"));
    let (code, _, _) = call(&["check-interpolant", &data("cats.prob"), "--theta", theta]);
    assert_eq!(code, 0);
}

#[test]
fn beth_and_padoa() {
    let (code, out, _) = call(&["beth", &data("tallest.prob"), "--relation", "Tallest", "--tau", "TallerThan"]);
    assert_eq!(code, 0);
    assert_eq!(out, "forall x1. Tallest(x1) <-> forall x. !TallerThan(x, x1)\n");
    let (code, _, _) = call(&["beth", &data("tallest.prob"), "--relation", "TallerThan", "--tau", "Tallest"]);
    assert_eq!(code, 1);
    let (code, out, _) = call(&["padoa", &data("tallest.prob"), "--relation", "TallerThan", "--tau", "Tallest"]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().filter(|l| l.starts_with('{')).count(), 2);
}

#[test]
fn binding_patterns() {
    let (code, out, _) = call(&["bindpatt", &data("access.prob")]);
    assert_eq!((code, out.as_str()), (0, "R:- S:1,2\n"));
}

#[test]
fn fragments() {
    let (code, out, _) = call(&["cip", "GNFO"]);
    assert_eq!((code, out.as_str()), (0, "GNFO: has CIP\n"));
    let (code, _, err) = call(&["cip", "AF"]);
    assert_eq!(code, 3);
    assert!(err.contains("unknown fragment"));
}

#[test]
fn usage_errors() {
    assert_eq!(call(&["bogus"]).0, 3);
    assert_eq!(call(&["prove"]).0, 3);
    assert_eq!(call(&["prove", &data("missing.prob")]).0, 3);
}

#[test]
fn corpus_is_reproducible() {
    let a = call(&["corpus", "--seed", "5", "--count", "3"]);
    let b = call(&["corpus", "--seed", "5", "--count", "3"]);
    assert_eq!(a.0, 0);
    assert_eq!(a, b);
    assert_eq!(a.1.matches("[left]").count(), 3);
}
