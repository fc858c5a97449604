//! Golden-file tests: the machine-readable report schema is frozen for the
//! exact-arithmetic verbs, byte for byte. A failure here means the schema
//! changed and every downstream consumer breaks.

use std::process::Command;

fn run(args: &[&str]) -> String {
    let output = Command::new(env!("CARGO_BIN_EXE_cmrep"))
        .args(args)
        .output()
        .expect("binary runs");
    assert!(
        output.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&output.stderr)
    );
    String::from_utf8(output.stdout).expect("reports are UTF-8")
}

#[test]
fn polys_report_schema_is_frozen() {
    let got = run(&["polys", "--graph", "bubble", "--format", "machine"]);
    let want = r#"{
  "verb": "polys",
  "input": "bubble",
  "mode": "commutative",
  "num_lines": 2,
  "variables": [
    "a1",
    "a2"
  ],
  "polynomials": [
    {
      "name": "U",
      "rendered": "a2 + a1",
      "terms": [
        {
          "coeff": "1",
          "exponents": [
            0,
            1
          ]
        },
        {
          "coeff": "1",
          "exponents": [
            1,
            0
          ]
        }
      ]
    },
    {
      "name": "V",
      "rendered": "s*a1*a2",
      "terms": [
        {
          "coeff": "1",
          "exponents": [
            1,
            1
          ],
          "symbol": "s"
        }
      ]
    }
  ]
}
"#;
    assert_eq!(got, want);
}

#[test]
fn domain_report_schema_is_frozen() {
    let got = run(&["domain", "--graph", "bubble", "--D", "1", "--format", "machine"]);
    let want = r#"{
  "verb": "domain",
  "input": "bubble",
  "dim": "1",
  "feasible": true,
  "witness": {
    "coords": [
      "x0=-1/6",
      "x1=-1/6",
      "yR0=-1/6"
    ],
    "slack": "1/6"
  }
}
"#;
    assert_eq!(got, want);
}

#[test]
fn strip_report_schema_is_frozen_for_both_outcomes() {
    let got = run(&["strip", "--ribbon", "gw_nonplanar", "--format", "machine"]);
    let want = r#"{
  "verb": "strip",
  "input": "gw_nonplanar",
  "lower": "0",
  "bounded": true,
  "upper": "2"
}
"#;
    assert_eq!(got, want);

    let got = run(&["strip", "--ribbon", "gw_tadpole", "--format", "machine"]);
    let want = r#"{
  "verb": "strip",
  "input": "gw_tadpole",
  "lower": "0",
  "bounded": false
}
"#;
    assert_eq!(got, want);
}

#[test]
fn poles_report_schema_is_frozen() {
    let got = run(&[
        "poles", "--graph", "bubble", "--window", "3,5", "--format", "machine",
    ]);
    let want = r#"{
  "verb": "poles",
  "input": "bubble",
  "n_cutoff": 2,
  "window": [
    "3",
    "5"
  ],
  "candidates": [
    {
      "dim": "4",
      "origin": "pinch",
      "conditions": [
        "yR0 = 0",
        "phi_1 = 0",
        "phi_2 = 0"
      ],
      "point": [
        "x0=-1",
        "x1=-1",
        "yR0=0"
      ]
    }
  ],
  "strip_clear": true
}
"#;
    assert_eq!(got, want);
}

#[test]
fn exported_representation_document_is_frozen() {
    let got = run(&["cm", "--graph", "bubble"]);
    let want = r#"mode = "commutative"
num_lines = 2
prefactor = "1"
masses = ["1", "1"]

[[u_rows]]
coeff = "1"
exponents = [0, 1]

[[u_rows]]
coeff = "1"
exponents = [1, 0]

[[v_real_rows]]
coeff = "1"
exponents = [1, 1]
symbol = "s"
"#;
    assert_eq!(got, want);
}
