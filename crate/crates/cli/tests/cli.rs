use std::path::PathBuf;
use std::process::{Command, Output};

fn spec(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../specs").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_companion"))
        .args(args)
        .env_remove("COMPANION_SEED")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn path(name: &str) -> String {
    spec(name).display().to_string()
}

fn scratch(name: &str, text: &str) -> String {
    let p = std::env::temp_dir().join(format!("companion-cli-{}-{name}", std::process::id()));
    std::fs::write(&p, text).unwrap();
    p.display().to_string()
}

#[test]
fn powers_of_two() {
    let o = run(&["eval", &path("powers.spec"), "p"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert_eq!(stdout(&o).trim(), "1 2 4 8 16 32 64 128");
    let o = run(&["eval", &path("powers.spec"), "p", "--gsos"]);
    assert_eq!(stdout(&o).trim(), "1 2 4 8 16 32 64 128");
}

#[test]
fn depth_zero_is_the_unit() {
    let o = run(&["eval", &path("powers.spec"), "p", "--depth", "0"]);
    assert_eq!(stdout(&o).trim(), "⋆");
}

#[test]
fn shuffle_equations_and_mutual_recursion() {
    let o = run(&["eval", &path("shuffle.spec"), "(z s t)"]);
    assert_eq!(stdout(&o).trim(), "0 1 4 12 32 80 192 448");
    let o = run(&["eval", &path("streams.spec"), "fib", "--depth", "10"]);
    assert_eq!(stdout(&o).trim(), "0 1 1 2 3 5 8 13 21 34");
}

#[test]
fn unregistered_and_refused_operations_exit_3() {
    let o = run(&["eval", &path("unregistered.spec"), "x"]);
    assert_eq!(code(&o), 3);
    assert!(stderr(&o).contains("`frob` is not registered"));
    let o = run(&["eval", &path("refused.spec"), "x"]);
    assert_eq!(code(&o), 3);
    assert!(stderr(&o).contains("refused registration"));
}

#[test]
fn language_and_maybe_systems() {
    let o = run(&["eval", &path("anbn.spec"), "S", "--depth", "5"]);
    assert_eq!(stdout(&o).trim(), "{ε, ab, aabb}");
    let o = run(&["eval", &path("maybe.spec"), "(succ two)"]);
    assert_eq!(stdout(&o).trim(), "3");
    let o = run(&["eval", &path("maybe.spec"), "(pred two)"]);
    assert_eq!(code(&o), 3);
}

#[test]
fn operations_between_signatures() {
    let o = run(&["eval", &path("even.spec"), "(even pairs)", "--depth", "4"]);
    assert_eq!(stdout(&o).trim(), "0 2 4 0");
    let o = run(&["eval", &path("double.spec"), "(double nat)", "--depth", "2"]);
    assert_eq!(stdout(&o).trim(), "(0,0) (1,1)");
    let o = run(&["eval", &path("double.spec"), "(first_zero countdown)"]);
    assert_eq!(stdout(&o).trim(), "3");
}

#[test]
fn causality_checks() {
    let o = run(&["check-causal", &path("powers.spec"), "plus", "--depth", "5", "--samples", "50"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let o = run(&["check-causal", &path("double.spec"), "even_stream", "--depth", "5", "--samples", "50"]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("not causal"));
}

#[test]
fn causality_output_is_reproducible() {
    let args = ["--json", "--seed", "11", "check-causal", &path("double.spec"), "even_stream", "--samples", "50"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["verdict"], "not-causal");
    assert_eq!(v["seed"], 11);
}

#[test]
fn environment_seed_overrides_flag() {
    let o = Command::new(env!("CARGO_BIN_EXE_companion"))
        .args(["--json", "--seed", "1", "check-causal", &path("powers.spec"), "plus", "--depth", "2", "--samples", "5"])
        .env("COMPANION_SEED", "99")
        .output()
        .unwrap();
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["seed"], 99);
}

#[test]
fn arden_is_proved_with_one_pair() {
    let o = run(&["prove", &path("arden.spec"), "arden"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(stdout(&o).contains("|R| = 1"));
}

#[test]
fn counterexample_is_the_empty_word() {
    let o = run(&["--json", "prove", &path("arden.spec"), "not_eps"]);
    assert_eq!(code(&o), 1);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["results"][0]["counterexample"]["word"], "ε");
    assert_eq!(v["results"][0]["counterexample"]["accepted_by"], "lhs");
}

#[test]
fn emitted_proofs_recheck() {
    let out = std::env::temp_dir().join(format!("companion-cli-{}-proof.json", std::process::id()));
    let o = run(&["prove", &path("arden.spec"), "sum_star", "--emit", &out.display().to_string()]);
    assert_eq!(code(&o), 0);
    let o = run(&["recheck", &out.display().to_string()]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(stdout(&o).starts_with("valid"));

    let mut cert: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    cert["relation"] = serde_json::json!([]);
    std::fs::write(&out, cert.to_string()).unwrap();
    let o = run(&["recheck", &out.display().to_string()]);
    assert_eq!(code(&o), 1);
}

#[test]
fn context_closure_needs_registered_operations() {
    let f = scratch("noconcat.spec", "signature detaut ab\nbuiltin union\ngoal g : a == a\n");
    let o = run(&["prove", &f]);
    assert_eq!(code(&o), 3);
    assert!(stderr(&o).contains("`concat` is not registered"));
}

#[test]
fn exhausted_bounds_exit_4() {
    let o = run(&["prove", &path("arden.spec"), "arden", "--max-pairs", "0"]);
    assert_eq!(code(&o), 4);
}

#[test]
fn stream_equality() {
    let o = run(&["stream-eq", &path("streams.spec"), "(shuffle ones ones)", "p"]);
    assert_eq!(code(&o), 0);
    let o = run(&["stream-eq", &path("streams.spec"), "(conv ones ones)", "nats"]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("position 0"));
}

#[test]
fn lattice_companion_and_upto() {
    let f = path("diamond.json");
    let o = run(&["--json", "lattice", &f]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["nu"], "a");
    assert_eq!(v["companion"]["b"], "1");
    assert_eq!(code(&run(&["lattice", &f, "--check", "meet_a"])), 0);
    assert_eq!(code(&run(&["lattice", &f, "--check", "top"])), 1);
    assert_eq!(code(&run(&["lattice", &f, "--upto", "id", "--x", "a"])), 0);
    assert_eq!(code(&run(&["lattice", &f, "--upto", "top", "--x", "a"])), 3);
    assert_eq!(code(&run(&["lattice", &f, "--upto", "id", "--x", "b"])), 1);
}

#[test]
fn kan_demo_levels() {
    let o = run(&["kan-demo", "--level", "2"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("16 of 16"));
    assert_eq!(code(&run(&["kan-demo", "--level", "0"])), 0);
    let o = run(&["kan-demo", "--level", "4"]);
    assert_eq!(code(&o), 3);
    assert!(stderr(&o).contains("level 4"));
}

#[test]
fn load_errors_have_locations() {
    let f = scratch("bad.spec", "signature stream\n\nvar x = (cons 1 (plus x y)\n");
    let o = run(&["eval", &f, "x"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains(":3:9: error[syntax]"), "{}", stderr(&o));
    let o = run(&["--json", "eval", &f, "x"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!((v["line"].as_u64(), v["col"].as_u64(), v["error"].as_str()), (Some(3), Some(9), Some("syntax")));
    assert_eq!(code(&run(&["eval", "/nonexistent/x.spec", "x"])), 2);
}

#[test]
fn json_systems_load() {
    let f = scratch(
        "sys.json",
        r#"{"signature":"stream","equations":{"p":{"tag":"cons","out":1,"kids":[{"op":"plus","args":[{"var":"p"},{"var":"p"}]}]}}}"#,
    );
    let o = run(&["eval", &f, "p", "--depth", "4"]);
    assert_eq!(stdout(&o).trim(), "1 2 4 8", "{}", stderr(&o));
}

#[test]
fn compositions_and_constants() {
    let f = scratch(
        "define.spec",
        "registry depth 4 samples 50\nsignature stream\nbuiltin plus shuffle\nconst two 2\n\
         define sq (x) (shuffle x x)\nvar q = (cons 1 (plus two q))\nvar s = (cons 1 (sq s))\n",
    );
    assert_eq!(stdout(&run(&["eval", &f, "q", "--depth", "4"])).trim(), "1 3 3 3");
    assert_eq!(stdout(&run(&["eval", &f, "s", "--depth", "6"])).trim(), "1 1 2 6 24 120");
}

#[test]
fn runtime_errors_point_at_the_use_site() {
    let o = run(&["eval", &path("unregistered.spec"), "x"]);
    assert!(stderr(&o).contains("unregistered.spec:2:18: error[refused]"), "{}", stderr(&o));
    let o = run(&["--json", "eval", &path("maybe.spec"), "(pred two)"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!((v["line"].as_u64(), v["error"].as_str()), (Some(4), Some("refused")));
    let f = path("diamond.json");
    let o = run(&["lattice", &f, "--upto", "top", "--x", "a"]);
    assert!(stderr(&o).starts_with(&format!("{f}: error[refused]: top")), "{}", stderr(&o));
}

#[test]
fn lattice_table_flag() {
    let f = path("diamond.json");
    let o = run(&["lattice", &f, "--table"]);
    assert_eq!(code(&o), 0);
    assert_eq!(o.stdout, run(&["lattice", &f]).stdout);
    assert_eq!(code(&run(&["lattice", &f, "--check", "id"])), 0);
    assert_eq!(code(&run(&["lattice", &f, "--table", "--check", "id"])), 2);
}
