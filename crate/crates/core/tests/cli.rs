use std::io::Write;
use std::process::Command;

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = coext::cli::run(std::iter::once("coext").chain(args.iter().copied()), &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn structure_file(text: &str) -> tempfile::NamedTempFile {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    f.write_all(text.as_bytes()).unwrap();
    f
}

#[test]
fn eval_set_on_doppelganger_container() {
    // 2 = {0} while 1 is a second empty node, so ext(2) is not a union of classes
    let f = structure_file("nodes 3\nmem 0 2\n");
    let p = f.path().to_str().unwrap();
    let (code, out, _) = run(&["eval", "-s", p, "-f", "set(x)", "-a", "x=2"]);
    assert_eq!((code, out.as_str()), (0, "false\n"));
    let (_, out, _) = run(&["eval", "-s", p, "-f", "set(x)", "-a", "x=1"]);
    assert_eq!(out, "true\n");
    let (_, out, _) = run(&["eval", "-s", p, "-f", "x =* y -> x = y", "--all"]);
    assert_eq!(out, "false\n");
}

#[test]
fn quotient_of_two_empty_nodes() {
    let f = structure_file("nodes 2\n");
    let (code, out, _) = run(&["quotient", "-s", f.path().to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().next(), Some("nodes 1"));
    assert_eq!(out.lines().count(), 1);
}

#[test]
fn translate_modes() {
    let (_, out, _) = run(&["translate", "all z. (z in x -> z in y)", "--mode", "zfa-starred"]);
    assert_eq!(out, "all z. (z in* x -> z in* y)\n");
    let (_, out, _) = run(&["translate", "all z. (z in x -> z in y)"]);
    assert!(!out.contains("in*") && !out.contains("=*") && !out.contains("set("), "{out}");
    let (_, out, _) = run(&["translate", "x =* y", "--mode", "expand"]);
    assert!(!out.contains("=*"), "{out}");
}

#[test]
fn parse_prints_canonical_form() {
    let (code, a, _) = run(&["parse", "--canonical", "ex u. u in x"]);
    let (_, b, _) = run(&["parse", "--canonical", "ex v. v in x"]);
    assert_eq!(code, 0);
    assert_eq!(a, b);
}

#[test]
fn pinned_random_fixture() {
    let (code, out, _) = run(&["gen", "--nodes", "8", "--density", "0.3", "--seed", "42"]);
    assert_eq!(code, 0);
    let want = "nodes 8\nmem 3 0\nmem 4 0\nmem 1 1\nmem 2 1\nmem 3 1\nmem 4 1\nmem 5 2\nmem 6 2\nmem 2 3\nmem 0 4\n\
                mem 2 4\nmem 7 4\nmem 0 5\nmem 4 5\nmem 6 6\nmem 1 7\nmem 2 7\nmem 3 7\nmem 6 7\n";
    assert_eq!(out, want);
}

#[test]
fn enumeration_counts() {
    // labelled: 2^(n²); unlabelled relations on 3 points: 104
    let (_, out, _) = run(&["gen", "--exhaustive", "--nodes", "3", "--count"]);
    assert_eq!(out, "512\n");
    let (_, out, _) = run(&["gen", "--exhaustive", "--nodes", "3", "--dedup", "--count"]);
    assert_eq!(out, "104\n");
    let (_, out, _) = run(&["gen", "--hf", "2"]);
    assert!(out.starts_with("nodes 4\n"));
}

#[test]
fn failing_check_replays() {
    let f = structure_file("nodes 3\nmem 0 2\n");
    let (code, records, _) =
        run(&["check", "-s", f.path().to_str().unwrap(), "--axiom", "extensionality", "--format", "records"]);
    assert_eq!(code, 1);
    assert!(records.contains("check extensionality"), "{records}");
    let r = structure_file(&records);
    let (code, out, _) = run(&["check", "--replay", r.path().to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(out.contains("reproduced"), "{out}");
}

#[test]
fn passing_checks() {
    let (code, out, _) = run(&["check", "--exhaustive", "2", "--schema", "lemma1", "--axiom", "weak-ext", "--prop", "quotient"]);
    assert_eq!(code, 0, "{out}");
    assert!(out.lines().all(|l| !l.starts_with("FAIL")), "{out}");
    let (code, out, _) = run(&["check", "--family", "--axiom", "pairing*", "--bounds", "rank:2"]);
    assert_eq!(code, 0, "{out}");
}

#[test]
fn usage_errors_exit_2() {
    let (code, _, err) = run(&["eval", "-s", "/definitely/missing", "-f", "x in x"]);
    assert_eq!(code, 2);
    assert!(err.starts_with("coext: "));
    assert_eq!(run(&["translate", "all . x"]).0, 2);
    assert_eq!(run(&["check", "--exhaustive", "2", "--bounds", "sideways"]).0, 2);
    assert_eq!(run(&["check", "--exhaustive", "2", "--schema", "lemma1", "--depth", "4"]).0, 2);
    assert_eq!(run(&["frobnicate"]).0, 2);
    assert_eq!(run(&["--help"]).0, 0);
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_coext");
    let ok = Command::new(bin).args(["translate", "x in y", "--mode", "zfa-starred"]).output().unwrap();
    assert_eq!(ok.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&ok.stdout), "x in* y\n");
    let bad = Command::new(bin).args(["parse", "(("]).output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn small_suite_run() {
    let (code, out, _) = run(&["suite", "--max-nodes", "2", "--jobs", "1"]);
    assert_eq!(code, 0, "{out}");
    assert_eq!(out.lines().filter(|l| l.starts_with("PASS criterion")).count(), 10, "{out}");
    assert!(out.contains("(expected to fail)"));
    assert_eq!(run(&["suite", "--max-nodes", "9"]).0, 2);
}
