//! End-to-end tests of the command-line interface against the shipped
//! fixture files.

use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> String {
    let mut p = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    p.pop();
    p.pop();
    p.push("fixtures");
    p.push(name);
    p.to_string_lossy().into_owned()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pathspace"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn validate_fixtures() {
    for name in ["e_pt.graph", "e_omega.graph", "e_ex.graph", "f_ex.graph", "f_omega.graph"] {
        let out = run(&["validate", &fixture(name)]);
        assert!(out.status.success(), "{name}: {}", stdout(&out));
        assert_eq!(stdout(&out).trim(), "valid");
    }
}

#[test]
fn validate_flags_violations_with_exit_1() {
    let dir = std::env::temp_dir().join("pathspace_cli_invalid");
    std::fs::create_dir_all(&dir).unwrap();
    let file = dir.join("bad.graph");
    std::fs::write(&file, "vertices:\n  v\nedges:\n  a u v\n").unwrap();
    let out = run(&["validate", file.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("invalid"));
}

#[test]
fn unparseable_input_exits_2_with_location() {
    let dir = std::env::temp_dir().join("pathspace_cli_parse");
    std::fs::create_dir_all(&dir).unwrap();
    let file = dir.join("broken.graph");
    std::fs::write(&file, "vertices:\n  v\nedges:\n  broken\n").unwrap();
    let out = run(&["paths", file.to_str().unwrap(), "--range", "v", "--len", "1"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 4"), "{err}");
}

#[test]
fn path_enumeration_matches_examples() {
    let out = run(&["paths", &fixture("e_ex.graph"), "--range", "v", "--len", "2"]);
    assert_eq!(stdout(&out).trim(), "nu1.g\nnu1.nu2");

    let out = run(&[
        "paths",
        &fixture("e_omega.graph"),
        "--range",
        "v",
        "--len",
        "1",
        "--limit",
        "3",
    ]);
    assert_eq!(stdout(&out).trim(), "e[1]\ne[2]\ne[3]\n(truncated)");

    let out = run(&[
        "paths",
        &fixture("e_ex.graph"),
        "--range",
        "v",
        "--len",
        "3",
        "--stopped",
    ]);
    assert_eq!(stdout(&out).trim(), "nu1.g.f\nnu1.nu2");
}

#[test]
fn boundary_enumeration_matches_examples() {
    let out = run(&[
        "boundary",
        &fixture("e_ex.graph"),
        "--range",
        "v",
        "--depth",
        "4",
    ]);
    assert_eq!(stdout(&out).trim(), "nu1.nu2\nv~(nu1.g.f)");
}

#[test]
fn collapse_then_iso_recovers_the_small_graph() {
    let dir = std::env::temp_dir().join("pathspace_cli_roundtrip");
    std::fs::create_dir_all(&dir).unwrap();
    let collapsed = dir.join("collapsed.graph");

    let out = run(&["check-collapsible", &fixture("f_ex.graph"), "--tail", "nu"]);
    assert!(out.status.success(), "{}", stdout(&out));

    let out = run(&[
        "collapse",
        &fixture("f_ex.graph"),
        "--tails",
        "nu",
        "-o",
        collapsed.to_str().unwrap(),
    ]);
    assert!(out.status.success());

    let out = run(&["iso", collapsed.to_str().unwrap(), &fixture("e_ex.graph")]);
    assert!(out.status.success(), "{}", stdout(&out));
    assert!(stdout(&out).starts_with("isomorphic"));
}

#[test]
fn non_collapsible_paths_are_rejected_with_the_condition() {
    let out = run(&[
        "check-collapsible",
        &fixture("f_ex.graph"),
        "--path",
        "v~(nu1.g.f)",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("C4: fail"), "{}", stdout(&out));

    let out = run(&[
        "check-collapsible",
        &fixture("f_ex.graph"),
        "--path",
        "nu1.nu2@nu",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let text = stdout(&out);
    assert!(text.contains("C4: pass"), "{text}");
    assert!(text.contains("C5: fail"), "{text}");
}

#[test]
fn desing_writes_graph_and_dot() {
    let dir = std::env::temp_dir().join("pathspace_cli_desing");
    std::fs::create_dir_all(&dir).unwrap();
    let graph_out = dir.join("f.graph");
    let dot_out = dir.join("f.dot");
    let out = run(&[
        "desing",
        &fixture("e_omega.graph"),
        "-o",
        graph_out.to_str().unwrap(),
        "--emit-dot",
        dot_out.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&graph_out).unwrap();
    assert!(text.contains("t_v v entries:"), "{text}");
    let dot = std::fs::read_to_string(&dot_out).unwrap();
    assert!(dot.contains("digraph"), "{dot}");

    // The output file is a valid graph and collapses back to the original.
    let out = run(&["validate", graph_out.to_str().unwrap()]);
    assert!(out.status.success(), "{}", stdout(&out));
    let collapsed = dir.join("back.graph");
    let out = run(&[
        "collapse",
        graph_out.to_str().unwrap(),
        "--tails",
        "t_v,t_w",
        "-o",
        collapsed.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let out = run(&["iso", collapsed.to_str().unwrap(), &fixture("e_omega.graph")]);
    assert!(out.status.success(), "{}", stdout(&out));
}

#[test]
fn cylinder_subcommands() {
    let out = run(&[
        "cyl",
        "member",
        &fixture("e_ex.graph"),
        "--point",
        "v~(nu1.g.f)",
        "--stem",
        "nu1.g",
    ]);
    assert_eq!(stdout(&out).trim(), "true");

    let out = run(&[
        "cyl",
        "intersect",
        &fixture("e_ex.graph"),
        "--stem1",
        "nu1.nu2",
        "--stem2",
        "nu1.g",
    ]);
    assert_eq!(stdout(&out).trim(), "empty");

    let out = run(&[
        "cyl",
        "refine",
        &fixture("e_ex.graph"),
        "--stem",
        "v",
        "--forbid-paths",
        "nu1.nu2",
        "--point",
        "nu1",
    ]);
    assert_eq!(stdout(&out).trim(), "Z(nu1 \\ {nu2})");
}

#[test]
fn path_map_subcommands() {
    let f = fixture("f_omega.graph");
    let out = run(&["phi", &f, "--tails", "tv,tw", "--path", "tv#1.e[1]"]);
    assert_eq!(stdout(&out).trim(), "e_tv[1]");

    let out = run(&["phi-inv", &f, "--tails", "tv,tw", "--path", "e_tv[3]"]);
    assert_eq!(stdout(&out).trim(), "tv#1.tv#2.tv#3.e[3]");

    let out = run(&["phi-inf", &f, "--tails", "tv,tw", "--path", "v@tv"]);
    assert_eq!(stdout(&out).trim(), "v");

    let out = run(&["phi-inf", &f, "--tails", "tv,tw", "--path", "e_tv[1]", "--invert"]);
    assert_eq!(stdout(&out).trim(), "tv#1.e[1]@tw");

    let out = run(&[
        "witness-image",
        &f,
        "--tails",
        "tv,tw",
        "--stem",
        "v",
        "--forbid",
        "e_tv[1]",
        "--point",
        "v@tv",
    ]);
    assert_eq!(stdout(&out).trim(), "tv#1.tv#2");

    let out = run(&[
        "witness-preimage",
        &f,
        "--tails",
        "tv,tw",
        "--stem",
        "tv#1.tv#2",
        "--point",
        "v",
    ]);
    assert_eq!(stdout(&out).trim(), "Z(v \\ {e_tv[1]})");
}

#[test]
fn diagonal_subcommands() {
    let e = fixture("e_ex.graph");
    let out = run(&["diag", "mul", &e, "--a", "1*P(nu1)", "--b", "1*P(nu1.g)"]);
    assert_eq!(stdout(&out).trim(), "(1)*P(nu1.g)");

    let out = run(&["diag", "norm", &e, "--a", "1*P(v) - 1*P(nu1.nu2)"]);
    let text = stdout(&out);
    assert!(text.contains("norm^2 = 1"), "{text}");
    assert!(text.contains("q-basis report"), "{text}");

    let out = run(&["diag", "norm", &e, "--a", "1*P(v) - 1*P(nu1)"]);
    assert!(stdout(&out).contains("norm^2 = 0"));

    let out = run(&["diag", "eval", &e, "--x", "nu1.nu2", "--a", "1*P(nu1)"]);
    assert_eq!(stdout(&out).trim(), "1");

    // Both continuations at u are blocked and u is not singular, so this
    // q-projection is the zero function even though its expansion is not
    // the empty sum.
    let out = run(&[
        "diag", "q", &e, "--set", "nu1;nu1.nu2;nu1.g", "--mu", "nu1",
    ]);
    let text = stdout(&out);
    assert!(text.contains("(-1)*P(nu1.g)"), "{text}");
    assert!(text.lines().last().unwrap().trim() == "vanishing", "{text}");

    // At an infinite receiver a q-projection never dies.
    let out = run(&[
        "diag", "q", &fixture("e_omega.graph"), "--set", "v;e[1]", "--mu", "v",
    ]);
    assert!(stdout(&out).lines().last().unwrap().trim() == "nonvanishing");

    let f = fixture("f_omega.graph");
    let out = run(&[
        "diag", "diagram", &f, "--tails", "tv,tw", "--x", "tv#1.e[1]@tw", "--mu", "e_tv[1]",
    ]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).trim(), "commutes");

    let out = run(&["diag", "pi", &f, "--tails", "tv,tw", "--reduce", "tv#1"]);
    assert_eq!(stdout(&out).trim(), "(1)*P(v)");

    let out = run(&["diag", "compress", &f, "--tails", "tv,tw", "--mu", "tv#1"]);
    assert_eq!(stdout(&out).trim(), "(1)*P(tv#1)");
}

#[test]
fn verify_all_passes_and_is_deterministic() {
    let args = ["verify-all", &fixture("e_ex.graph"), "--depth", "4", "--seed", "11"];
    let first = run(&args);
    assert!(first.status.success(), "{}", stdout(&first));
    assert!(stdout(&first).contains("all checks passed"));
    let second = run(&args);
    assert_eq!(stdout(&first), stdout(&second));
}

#[test]
fn emit_dot_renders_tails_with_ellipsis() {
    let out = run(&["emit-dot", &fixture("f_omega.graph"), "--tail-levels", "2"]);
    let text = stdout(&out);
    assert!(text.contains("\"tv[1]\""), "{text}");
    assert!(text.contains("⋯"), "{text}");
}

#[test]
fn fixture_files_match_the_builtin_fixtures() {
    for (name, builder) in pathspace::fixtures::all() {
        let text = std::fs::read_to_string(fixture(&format!("{name}.graph"))).unwrap();
        let parsed = pathspace::textio::parse_graph(&text).unwrap();
        assert_eq!(parsed, builder, "fixture file {name}.graph drifted");
    }
}

#[test]
fn depth_env_variable_sets_the_default() {
    let out = Command::new(env!("CARGO_BIN_EXE_pathspace"))
        .args(["boundary", &fixture("e_ex.graph"), "--range", "v"])
        .env("PATHSPACE_DEPTH", "2")
        .output()
        .unwrap();
    // Depth 2 is too shallow for the 3-cycle, so only the finite boundary
    // path shows up.
    assert_eq!(stdout(&out).trim(), "nu1.nu2");
}
