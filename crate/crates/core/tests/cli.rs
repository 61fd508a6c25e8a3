use hamres::cli::{run, EXIT_INCONCLUSIVE, EXIT_NOT_RESOLVING, EXIT_RESOLVING, EXIT_RUNTIME, EXIT_USAGE};

fn call(args: &[&str]) -> (i32, String, String) {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run(std::iter::once("hamres").chain(args.iter().copied()), &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn set_file(dir: &tempfile::TempDir, name: &str, body: &str) -> String {
    let path = dir.path().join(name);
    std::fs::write(&path, body).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn verify_exit_codes_follow_the_verdict() {
    let dir = tempfile::tempdir().unwrap();
    let r0 = set_file(&dir, "r0.hrs", "k=2 a=3\n02\n11\n");
    let r1 = set_file(&dir, "r1.hrs", "k=2 a=3\n02\n11\n22\n");
    for method in ["auto", "brute", "groebner", "ilp"] {
        assert_eq!(call(&["verify", "--set", &r1, "--method", method]).0, EXIT_RESOLVING);
        assert_eq!(call(&["verify", "--set", &r0, "--method", method]).0, EXIT_NOT_RESOLVING);
    }
}

#[test]
fn json_verdict_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let r0 = set_file(&dir, "r0.hrs", "k=2 a=3\n02\n11\n");
    let (code, out, _) = call(&["verify", "--set", &r0, "--method", "groebner", "--json"]);
    assert_eq!(code, EXIT_NOT_RESOLVING);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["status"], "not-resolving");
    assert_eq!(v["method"], "groebner");
    assert_eq!(v["witness"].as_array().unwrap().len(), 2);
}

#[test]
fn usage_and_runtime_errors() {
    assert_eq!(call(&["verify"]).0, EXIT_USAGE);
    assert_eq!(call(&["frobnicate"]).0, EXIT_USAGE);
    assert_eq!(call(&["--help"]).0, 0);
    let (code, _, err) = call(&["verify", "--set", "/nonexistent/set.hrs"]);
    assert_eq!(code, EXIT_RUNTIME);
    assert!(err.starts_with("error:"), "{err}");
}

#[test]
fn mindim_and_embed() {
    let (code, out, _) = call(&["mindim", "--k", "2", "--a", "3"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("beta = 3"), "{out}");
    let (code, out, _) = call(&["embed", "aaaraaaa"]);
    assert_eq!(code, 0);
    assert!(out.lines().any(|l| l.starts_with("aaaraaaa,0,")), "{out}");
}

#[test]
fn shrink_writes_its_trace() {
    let dir = tempfile::tempdir().unwrap();
    let all: String = (0..9).map(|i| format!("{}{}\n", i / 3, i % 3)).collect();
    let full = set_file(&dir, "all.hrs", &format!("k=2 a=3\n{all}"));
    let out = dir.path().join("small.hrs");
    let trace = dir.path().join("trace.txt");
    let (code, _, _) = call(&[
        "shrink",
        "--set",
        &full,
        "--seed",
        "7",
        "--out",
        out.to_str().unwrap(),
        "--trace",
        trace.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let small = std::fs::read_to_string(&out).unwrap();
    assert_eq!(small.lines().filter(|l| !l.starts_with('#') && !l.starts_with("k=")).count(), 3, "{small}");
    assert!(std::fs::read_to_string(&trace).unwrap().contains("step L=1 U=9 s=5"));
}

#[test]
fn shipped_set_needs_opt_in_for_groebner() {
    let (code, _, err) = call(&["verify", "--set", "shipped-octapeptide-77", "--method", "groebner"]);
    assert_eq!(code, EXIT_RUNTIME);
    assert!(err.contains("--long-running"), "{err}");
    let (code, out, _) = call(&["verify", "--set", "shipped-octapeptide-77", "--method", "ilp", "--budget-nodes", "1000"]);
    assert_eq!(code, EXIT_INCONCLUSIVE, "{out}");
}
