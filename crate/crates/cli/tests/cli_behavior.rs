//! End-to-end behavior of the binary: exit-code contract, the export /
//! re-import round trip, output destinations and human rendering.

use std::process::{Command, Output};

use serde_json::Value;

fn cmrep(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cmrep"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_of(output: &Output) -> String {
    String::from_utf8(output.stdout.clone()).expect("UTF-8")
}

fn assert_exit(args: &[&str], code: i32) -> Output {
    let output = cmrep(args);
    assert_eq!(
        output.status.code(),
        Some(code),
        "{args:?}\nstdout: {}\nstderr: {}",
        stdout_of(&output),
        String::from_utf8_lossy(&output.stderr)
    );
    output
}

#[test]
fn validation_failures_exit_2_with_a_diagnostic() {
    let cases: &[&[&str]] = &[
        // Unknown input name.
        &["polys", "--graph", "no_such_fixture"],
        // Fixture of the wrong kind for the flag.
        &["polys", "--ribbon", "bubble"],
        // Malformed rational.
        &["domain", "--graph", "bubble", "--D", "two"],
        // Empty window.
        &["poles", "--graph", "bubble", "--window", "5,3"],
        // Binding without a value.
        &["eval", "--graph", "bubble", "--D", "1", "--set", "s"],
        // Non-positive truncation.
        &["eval", "--graph", "bubble", "--D", "1", "--truncation", "-4"],
    ];
    for case in cases {
        let output = assert_exit(case, 2);
        let stderr = String::from_utf8_lossy(&output.stderr);
        assert!(
            stderr.starts_with("error:"),
            "{case:?}: stderr should carry a diagnostic, got {stderr:?}"
        );
    }
    // clap's own usage errors use the same lane.
    assert_exit(&["domain", "--graph", "bubble"], 2); // missing --D
    assert_exit(&["domain", "--D", "1"], 2); // missing input
    assert_exit(
        &["domain", "--graph", "bubble", "--ribbon", "gw_tadpole", "--D", "1"],
        2,
    ); // two inputs
}

#[test]
fn computation_failures_exit_3() {
    // The bubble admits no contour at D = 5; evaluation must fail, not
    // fabricate a number.
    let output = assert_exit(&["eval", "--graph", "bubble", "--D", "5"], 3);
    assert!(String::from_utf8_lossy(&output.stderr).starts_with("error:"));
    // Same failure through the direct parametric route.
    assert_exit(
        &["eval", "--graph", "bubble", "--D", "5", "--method", "parametric"],
        3,
    );
    // And for the scaling bound, whose domain is the same polytope.
    assert_exit(
        &["leading-power", "--graph", "bubble", "--D", "5", "--scale", "s=1"],
        3,
    );
}

#[test]
fn infeasibility_is_an_answer_for_the_domain_verb_not_an_error() {
    let output = assert_exit(
        &["domain", "--graph", "bubble", "--D", "5", "--format", "machine"],
        0,
    );
    let report: Value = serde_json::from_str(&stdout_of(&output)).expect("JSON");
    assert_eq!(report["feasible"], Value::Bool(false));
    assert!(report.get("witness").is_none());
}

#[test]
fn exported_representation_reimports_to_identical_reports() {
    let dir = tempfile::tempdir().expect("tempdir");
    let path = dir.path().join("bubble_rep.toml");
    let path_str = path.to_str().expect("UTF-8 path");

    let export = assert_exit(&["cm", "--graph", "bubble", "--out", path_str], 0);
    assert!(
        export.stdout.is_empty(),
        "--out must leave standard output empty"
    );

    // Identical domain / strip / poles reports modulo the input echo.
    let strip = |mut v: Value| {
        v.as_object_mut().expect("object").remove("input");
        v
    };
    for args in [
        vec!["domain", "--D", "1"],
        vec!["strip"],
        vec!["poles", "--window", "3,5"],
        vec!["poles", "--window", "-10,10", "--n-cutoff", "3"],
    ] {
        let from_graph: Value = serde_json::from_str(&stdout_of(&assert_exit(
            &[&args[..], &["--graph", "bubble", "--format", "machine"]].concat(),
            0,
        )))
        .expect("JSON");
        let from_file: Value = serde_json::from_str(&stdout_of(&assert_exit(
            &[&args[..], &["--cm", path_str, "--format", "machine"]].concat(),
            0,
        )))
        .expect("JSON");
        assert_eq!(
            strip(from_graph),
            strip(from_file),
            "{args:?}: round trip changed the report"
        );
    }

    // Re-exporting the imported representation reproduces the document.
    let reexport = assert_exit(&["cm", "--cm", path_str], 0);
    let original = std::fs::read(&path).expect("written file");
    assert_eq!(reexport.stdout, original);

    // The parametric route is honestly refused for a document that no
    // longer carries the integrand polynomials.
    assert_exit(&["eval", "--cm", path_str, "--D", "1", "--method", "parametric"], 2);
    // The contour route works from the document alone.
    assert_exit(&["eval", "--cm", path_str, "--D", "1"], 0);
}

#[test]
fn human_rendering_matches_the_documented_examples() {
    let polys = stdout_of(&assert_exit(&["polys", "--graph", "bubble"], 0));
    assert_eq!(
        polys,
        "input: bubble (commutative, 2 lines)\nU = a2 + a1\nV = s*a1*a2\n"
    );

    let strip = stdout_of(&assert_exit(&["strip", "--ribbon", "gw_nonplanar"], 0));
    assert_eq!(
        strip,
        "input: gw_nonplanar\nanalytic for D in (0, 2)\n"
    );

    let beta = stdout_of(&assert_exit(
        &["verify-appendix-b", "--phi", "2", "--D", "2", "--m2", "1"],
        0,
    ));
    assert!(
        beta.contains("beta_massive  = 0.1137056"),
        "expected the documented value 0.113706 in:\n{beta}"
    );
}

#[test]
fn eval_report_carries_the_effective_invariants_and_seed() {
    let output = assert_exit(
        &[
            "eval", "--graph", "bubble", "--D", "1", "--set", "s=3/2", "--seed", "5",
            "--format", "machine",
        ],
        0,
    );
    let report: Value = serde_json::from_str(&stdout_of(&output)).expect("JSON");
    assert_eq!(report["verb"], "eval");
    assert_eq!(report["assignments"][0], "s=3/2");
    assert_eq!(report["result"]["seed"], 5);
    assert_eq!(report["result"]["method"], "contour");
    assert!(report["result"]["value_re"].is_f64());
}

#[test]
fn out_flag_writes_the_report_file() {
    let dir = tempfile::tempdir().expect("tempdir");
    let path = dir.path().join("report.json");
    let path_str = path.to_str().expect("UTF-8 path");
    let output = assert_exit(
        &["strip", "--ribbon", "gw_planar", "--format", "machine", "--out", path_str],
        0,
    );
    assert!(output.stdout.is_empty());
    let written = std::fs::read_to_string(&path).expect("file written");
    let report: Value = serde_json::from_str(&written).expect("JSON");
    assert_eq!(report["verb"], "strip");
    assert_eq!(report["bounded"], Value::Bool(false));
}

#[test]
fn convergence_study_emits_delimited_rows() {
    let output = assert_exit(&["verify-appendix-a", "--truncation", "8"], 0);
    let text = stdout_of(&output);
    let rows: Vec<&str> = text
        .lines()
        .filter(|l| l.starts_with(|c: char| c.is_ascii_digit()))
        .collect();
    assert_eq!(rows.len(), 4, "four grid rows in:\n{text}");
    for row in rows {
        assert_eq!(row.split('\t').count(), 6, "T + four values + deviation");
    }
    assert!(text.contains("deviation monotone non-increasing: true"));
}
