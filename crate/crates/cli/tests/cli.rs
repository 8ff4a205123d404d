use std::path::PathBuf;
use std::process::Command;

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../data")
        .join(name)
}

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn forge(args: &[&str]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_forge"))
        .args(args)
        .output()
        .expect("forge runs");
    Run {
        code: out.status.code().expect("exit code"),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

fn path(name: &str) -> String {
    data(name).display().to_string()
}

fn field<'a>(text: &'a str, key: &str) -> Option<&'a str> {
    text.lines()
        .find_map(|l| l.strip_prefix(key).and_then(|r| r.strip_prefix(": ")))
}

fn assert_no_triviality_claim(text: &str) {
    let lower = text.to_lowercase();
    for banned in ["trivial", "no finite quotient", "profinite"] {
        assert!(!lower.contains(banned), "report mentions `{banned}`:\n{text}");
    }
}

#[test]
fn abel_reads_presentations() {
    let r = forge(&["abel", &path("z2.pres")]);
    assert_eq!(r.code, 0);
    assert_eq!(field(&r.stdout, "status"), Some("certified"));
    assert_eq!(field(&r.stdout, "torsion"), Some("2"));
    let r = forge(&["abel", &path("torus.pres")]);
    assert_eq!(field(&r.stdout, "betti"), Some("2"));
}

#[test]
fn parse_errors_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.pres");
    std::fs::write(&bad, "rel: a\n").unwrap();
    let r = forge(&["abel", bad.to_str().unwrap()]);
    assert_eq!(r.code, 1);
    assert_eq!(field(&r.stdout, "status"), Some("error"));
    assert!(r.stdout.contains("line 1"));
    let r = forge(&["abel", "/nonexistent/file"]);
    assert_eq!(r.code, 1);
    let r = forge(&["no-such-command"]);
    assert_eq!(r.code, 1);
}

#[test]
fn report_fields_come_in_a_fixed_order() {
    let r = forge(&["abel", &path("torus.pres")]);
    let keys: Vec<&str> = r
        .stdout
        .lines()
        .map(|l| l.split(": ").next().unwrap())
        .collect();
    assert_eq!(
        keys,
        ["command", "input presentation", "status", "betti", "torsion", "abelianization", "elapsed_ms"]
    );
}

#[test]
fn freepow_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("cube.pres");
    let r = forge(&["freepow", &path("z2.pres"), "3", "--out", out.to_str().unwrap()]);
    assert_eq!(r.code, 0);
    let text = std::fs::read_to_string(&out).unwrap();
    assert_eq!(text, "gens: a a_2 a_3\nrel: a a\nrel: a_2 a_2\nrel: a_3 a_3\n");
    let r = forge(&["abel", out.to_str().unwrap()]);
    assert_eq!(field(&r.stdout, "torsion"), Some("2 2 2"));
}

#[test]
fn artifacts_without_out_go_to_stdout() {
    let r = forge(&["freepow", &path("z2.pres"), "2"]);
    assert_eq!(r.code, 0);
    assert!(r.stdout.starts_with("gens: a a_2\n"));
    assert_eq!(field(&r.stderr, "status"), Some("certified"));
}

#[test]
fn fold_and_core() {
    let r = forge(&["fold", &path("wedge.graph")]);
    assert_eq!(r.code, 0);
    assert!(r.stdout.starts_with("graph\n"));
    assert_eq!(field(&r.stderr, "folds"), Some("1"));
    assert_eq!(field(&r.stderr, "component 0"), Some("vertices 2, edges 3, rank 2"));
    let r = forge(&["core", &path("a_squared.graph")]);
    assert_eq!(field(&r.stderr, "component 0"), Some("vertices 2, edges 2, rank 1"));
}

#[test]
fn fibre_of_coordinate_subgroups_is_a_point() {
    let r = forge(&["fibre", &path("a.graph"), &path("b.graph")]);
    assert_eq!(r.code, 0);
    assert_eq!(
        field(&r.stdout, "component 0"),
        Some("vertices 1, edges 0, rank 0, tree yes, diagonal no")
    );
    assert_eq!(field(&r.stdout, "components"), Some("1"));
}

#[test]
fn malnormal_exit_codes() {
    let r = forge(&["malnormal", &path("a.graph")]);
    assert_eq!((r.code, field(&r.stdout, "status")), (0, Some("certified")));
    let r = forge(&["malnormal", &path("a_squared.graph")]);
    assert_eq!((r.code, field(&r.stdout, "status")), (1, Some("refuted")));
    assert_eq!(field(&r.stdout, "witness conjugator"), Some("a"));
    let r = forge(&["malnormal", &path("a.graph"), "--rotations"]);
    assert_eq!((r.code, field(&r.stdout, "translates")), (0, Some("2")));
}

#[test]
fn quotient_search_statuses() {
    let r = forge(&["quotients", &path("torus.pres"), "--max-degree", "3"]);
    assert_eq!((r.code, field(&r.stdout, "status")), (0, Some("witness")));
    let r = forge(&["quotients", &path("trivial.pres"), "--max-degree", "4"]);
    assert_eq!((r.code, field(&r.stdout, "status")), (2, Some("inconclusive")));
    assert_no_triviality_claim(&r.stdout);
    let r = forge(&["quotients", &path("free2.pres"), "--max-degree", "5", "--orders", "1:2,3"]);
    assert_eq!(r.code, 0);
    assert_eq!(field(&r.stdout, "witness"), Some("a -> (1 2), b -> (1 2 3)"));
    let r = forge(&["quotients", &path("z2.pres"), "--max-degree", "3", "--word", "a"]);
    assert_eq!(field(&r.stdout, "witness"), Some("a -> (1 2)"));
    let r = forge(&["quotients", &path("z2.pres"), "--max-degree", "3", "--word", "b"]);
    assert_eq!(r.code, 1);
}

#[test]
fn encode_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let one = dir.path().join("one.json");
    let two = dir.path().join("two.json");
    for out in [&one, &two] {
        let r = forge(&["encode", &path("trivial.pres"), "--word", "a", "--out", out.to_str().unwrap()]);
        assert_eq!(r.code, 0, "{}", r.stdout);
        assert_eq!(field(&r.stdout, "certificate"), Some("valid"));
    }
    assert_eq!(std::fs::read(&one).unwrap(), std::fs::read(&two).unwrap());
    let r = forge(&["encode", &path("trivial.pres"), "--word", "a", "--N", "5"]);
    assert_eq!(r.code, 1);
    let r = forge(&["encode", &path("z2.pres"), "--word", "a", "--discrete"]);
    assert_eq!(r.code, 0);
    assert!(r.stdout.contains("\"variant\": \"discrete\""));
}

#[test]
fn square_complex_commands() {
    let r = forge(&["sqc", "check", &path("torus.sqc")]);
    assert_eq!((r.code, field(&r.stdout, "status")), (0, Some("certified")));
    let r = forge(&["sqc", "check", &path("folded.sqc")]);
    assert_eq!((r.code, field(&r.stdout, "status")), (1, Some("refuted")));
    assert!(field(&r.stdout, "violation").is_some());

    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s.sqc");
    let r = forge(&[
        "sqc",
        "build",
        "--pres",
        &path("torus.pres"),
        "--complex",
        &path("torus.sqc"),
        "--gamma",
        "a a",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(r.code, 0, "{}", r.stdout);
    assert_eq!(field(&r.stdout, "euler characteristic"), Some("-1"));
    assert_eq!(field(&r.stdout, "expected euler characteristic"), Some("-1"));
    assert_eq!(field(&r.stdout, "link condition"), Some("yes"));
    let r = forge(&["sqc", "check", out.to_str().unwrap()]);
    assert_eq!(r.code, 0);
    let r = forge(&["sqc", "pi1", out.to_str().unwrap()]);
    assert_eq!(field(&r.stderr, "abelianization"), Some("Z^3 + Z/2"));

    let r = forge(&["sqc", "pi1", &path("torus.sqc")]);
    assert_eq!(r.stdout, "gens: a b\nrel: a b a^-1 b^-1\n");

    let r = forge(&[
        "sqc", "build", "--pres", &path("torus.pres"), "--complex", &path("torus.sqc"), "--gamma", "a b",
    ]);
    assert_eq!(r.code, 1);
}

#[test]
fn probe_never_claims_triviality() {
    let r = forge(&["probe", &path("z2.pres"), "--word", "a", "--max-degree", "3"]);
    let status = field(&r.stdout, "status").unwrap();
    assert!(status == "witness" || status == "inconclusive");
    assert_eq!(r.code, if status == "witness" { 0 } else { 2 });
    assert_no_triviality_claim(&r.stdout);

    let r = forge(&["probe", &path("trivial.pres"), "--word", "a^", "--max-degree", "2"]);
    assert_eq!((r.code, field(&r.stdout, "status")), (1, Some("error")));
}

#[test]
fn jobs_flag_does_not_change_results() {
    let one = forge(&["--jobs", "1", "quotients", &path("torus.pres"), "--max-degree", "4", "--word", "a b"]);
    let many = forge(&["--jobs", "4", "quotients", &path("torus.pres"), "--max-degree", "4", "--word", "a b"]);
    assert_eq!(field(&one.stdout, "witness"), field(&many.stdout, "witness"));
    assert!(field(&one.stdout, "witness").is_some());
}
