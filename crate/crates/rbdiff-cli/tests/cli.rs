//! End-to-end tests of the `rbdiff` binary: every documented example,
//! the JSON schema, and the exit-code contract (0 consistent, 1 mismatch
//! or disagreement, 2 syntax/usage error).

use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rbdiff")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_str(&stdout(o)).unwrap_or_else(|e| panic!("bad JSON: {e}\n{}", stdout(o)))
}

// ---------------------------------------------------------------- classify

#[test]
fn classify_unit_constant_is_flat_for_every_weight() {
    let o = run(&["classify", "x*y - 1"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(stdout(&o).contains("flat for every weight"), "{}", stdout(&o));
}

#[test]
fn classify_plain_product_is_flat_for_every_weight() {
    let o = run(&["classify", "x*y"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("flat for every weight (x*y)"), "{}", stdout(&o));
}

#[test]
fn classify_quadratic_psi_is_outside_at_weight_zero() {
    let o = run(&["classify", "x*y - (y + y*x^2)"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("not flat"), "{}", stdout(&o));
}

#[test]
fn classify_constant_phi_is_weight_zero_only() {
    let o = run(&["classify", "x*y - 3"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("flat at weight 0 only"), "{}", stdout(&o));
}

#[test]
fn classify_json_has_schema_fields() {
    let o = run(&["classify", "x*y - 1", "--lambda", "1/2", "--json"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["omega"]["phi"], serde_json::json!(["1"]));
    assert_eq!(v["omega"]["psi"], serde_json::json!([]));
    assert_eq!(v["omega"]["text"], "x*y - 1");
    assert_eq!(v["lambda"], "1/2");
    assert_eq!(v["verdict"], "in-Tk");
    assert_eq!(v["components_checked"], 0);
}

// ------------------------------------------------------------------- check

#[test]
fn check_commutator_passes_at_weight_one() {
    let o = run(&["check", "x*y - y*x", "--lambda", "1", "--fixtures", "1,2,3", "--depth", "4"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(stdout(&o).contains("flat for every weight"), "{}", stdout(&o));
    assert!(stdout(&o).contains("all zero defect"), "{}", stdout(&o));
}

#[test]
fn check_constant_two_at_weight_one_certifies_the_constant_case() {
    let o = run(&["check", "x*y - 2", "--lambda", "1", "--json"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let v = json(&o);
    assert_eq!(v["verdict"], "not-flat");
    assert_eq!(v["case_id"], "W-const");
    assert_eq!(v["lambda"], "1");
    assert_eq!(v["witness"]["fixture"], "I_1");
    assert_eq!(v["witness"]["n"], 1);
    assert_eq!(v["witness"]["f"], "unit");
    assert_eq!(v["witness"]["g"], "unit");
    assert_eq!(v["witness"]["source"], "branch");
    // The defect is 2·z0 in the closed-form orientation.
    assert_eq!(v["defect"]["basis"], serde_json::json!(["z0"]));
    assert_eq!(v["defect"]["coords"], serde_json::json!(["2"]));
    assert_eq!(v["orientation"], -1);
    assert!(v["formula"].as_str().is_some());
    assert_eq!(v["components_checked"], 2);
}

#[test]
fn check_linear_pair_at_weight_zero_certifies_case_vii() {
    let o = run(&["check", "x*y - (x + y)", "--json"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let v = json(&o);
    assert_eq!(v["verdict"], "not-flat");
    assert_eq!(v["case_id"], "LR-vii");
    // Defect z0 exactly.
    assert_eq!(v["defect"]["coords"], serde_json::json!(["1"]));
}

#[test]
fn check_scalars_are_exact_fraction_strings() {
    let o = run(&["check", "x*y - 1/2", "--lambda", "1", "--json"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let v = json(&o);
    assert_eq!(v["omega"]["phi"], serde_json::json!(["1/2"]));
    // λ·a0·(a0 − 1) = 1·(1/2)·(−1/2) = −1/4, reported in closed-form orientation.
    assert_eq!(v["case_id"], "W-const");
    assert_eq!(v["defect"]["coords"], serde_json::json!(["-1/4"]));
}

// ------------------------------------------------------------------- sweep

#[test]
fn sweep_every_weight_family_is_consistent() {
    let o = run(&["sweep", "--tk", "--lambda", "1", "--depth", "3"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.contains("rows: 3   disagreements: 0"), "{out}");
}

#[test]
fn sweep_small_grid_at_weight_zero_is_consistent() {
    let o = run(&[
        "sweep", "--max-deg", "1", "--coeffs", "0,1", "--depth", "3", "--json",
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let out = stdout(&o);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), 16, "4 φ-choices × 4 ψ-choices");
    for line in lines {
        let v: serde_json::Value = serde_json::from_str(line).expect("JSON line");
        assert_eq!(v["agreement"], true, "{line}");
        assert_eq!(v["lambda"], "0");
    }
}

#[test]
fn sweep_empty_alphabet_gives_empty_output() {
    let o = run(&["sweep", "--coeffs", ""]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).is_empty(), "{}", stdout(&o));
}

#[test]
fn sweep_surfaces_known_weight_one_disagreements() {
    // At weight 1 the grid over {−1, 0} contains the four resonant rows
    // (e.g. x*y + x and x*y + y) where the defect vanishes identically even
    // though the symbolic classifier places them outside the flat family.
    // The sweep must report the disagreement and exit 1.
    let o = run(&[
        "sweep", "--max-deg", "1", "--coeffs", "-1,0", "--lambda", "1", "--depth", "3",
    ]);
    assert_eq!(code(&o), 1, "{}", stdout(&o));
    let out = stdout(&o);
    assert!(out.contains("disagreements: 4"), "{out}");
    assert!(out.contains("agree=NO"), "{out}");
}

// ---------------------------------------------------------------- coextend

#[test]
fn coextend_shifts_a_delta_witness_by_one_component() {
    let o = run(&[
        "coextend", "x*y - 1", "--witness", "delta@2", "--fixture-depth", "3", "--depth", "4",
        "--json",
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let v = json(&o);
    assert_eq!(v["fixture"], "I_3");
    assert_eq!(v["basis"], serde_json::json!(["z0", "z1", "z2"]));
    let comps = v["components"].as_array().unwrap();
    assert_eq!(comps.len(), 5);
    for c in comps {
        let n = c["n"].as_u64().unwrap();
        let expect = if n == 3 {
            serde_json::json!(["1", "0", "0"])
        } else {
            serde_json::json!(["0", "0", "0"])
        };
        assert_eq!(c["coords"], expect, "component {n}");
    }
}

#[test]
fn coextend_unit_witness_starts_at_the_shifted_unit() {
    let o = run(&["coextend", "x*y - y*x", "--lambda", "1", "--fixture-depth", "2", "--json"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let v = json(&o);
    // lift_0(unit) = shift(1) = z1; the commutator tail contributes nothing
    // because ∂(unit) = 0.
    assert_eq!(v["components"][0]["coords"], serde_json::json!(["0", "1"]));
    assert_eq!(v["components"][1]["coords"], serde_json::json!(["0", "0"]));
}

// ------------------------------------------------------------------ extend

#[test]
fn extend_applies_the_derivation_to_a_single_letter() {
    let o = run(&["extend", "x*y", "--fixture-name", "t4", "--word", "t", "--json"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let v = json(&o);
    assert_eq!(v["fixture"], "t4");
    assert_eq!(v["word"], serde_json::json!(["t"]));
    assert_eq!(v["image"], serde_json::json!([{"word": ["t^2"], "coeff": "1"}]));
}

#[test]
fn extend_unit_constant_constraint_adds_the_flattened_term() {
    let o = run(&[
        "extend", "x*y - 1", "--fixture-name", "t3", "--word", "t,t", "--cap", "3", "--json",
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let v = json(&o);
    // For constant φ = 1 the extension sends t⊗t to δ(t)⊗t + t·[id](t),
    // i.e. t²⊗t + t². Exactly two terms.
    let image = v["image"].as_array().unwrap();
    assert_eq!(image.len(), 2, "{:?}", image);
    assert_eq!(image[0]["word"], serde_json::json!(["t^2"]));
    assert_eq!(image[0]["coeff"], "1");
    assert_eq!(image[1]["word"], serde_json::json!(["t^2", "t"]));
    assert_eq!(image[1]["coeff"], "1");
}

// ------------------------------------------------------- errors and plumbing

#[test]
fn parse_errors_exit_2_with_byte_position() {
    let o = run(&["classify", "x*y - (y^2)"]);
    assert_eq!(code(&o), 2);
    let err = stderr(&o);
    assert!(err.contains("parse error at byte 7"), "{err}");
    assert!(err.contains('^'), "caret line expected: {err}");
}

#[test]
fn rejected_shapes_name_the_constraint_family() {
    let o = run(&["classify", "x*y - (x*y)"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("c*y*x^k"), "{}", stderr(&o));
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        &["check", "x*y", "--lambda", "abc"][..],
        &["check", "x*y", "--depth", "0"][..],
        &["check", "x*y", "--cap", "1"][..],
        &["check", "x*y", "--fixtures", ""][..],
        &["extend", "x*y", "--fixture-name", "t9"][..],
        &["extend", "x*y", "--word", "nope"][..],
        &["coextend", "x*y", "--witness", "bogus"][..],
    ] {
        let o = run(args);
        assert_eq!(code(&o), 2, "args {args:?}: {}", stderr(&o));
    }
}

#[test]
fn unknown_flags_exit_2() {
    let o = run(&["classify", "x*y", "--frobnicate"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn out_flag_writes_the_payload_to_a_file() {
    let path = std::env::temp_dir().join(format!("rbdiff-out-{}.json", std::process::id()));
    let path_str = path.to_str().unwrap();
    let o = run(&["classify", "x*y - 1", "--json", "--out", path_str]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(stdout(&o).is_empty(), "payload goes to the file");
    let content = std::fs::read_to_string(&path).expect("file written");
    let v: serde_json::Value = serde_json::from_str(&content).unwrap();
    assert_eq!(v["verdict"], "in-Tk");
    std::fs::remove_file(&path).ok();
}

#[test]
fn whitespace_and_compact_forms_parse_alike() {
    let a = run(&["classify", "x*y-y*x", "--json"]);
    let b = run(&["classify", "  x * y  -  y * x ", "--json"]);
    assert_eq!(stdout(&a), stdout(&b));
    assert_eq!(code(&a), 0);
}
