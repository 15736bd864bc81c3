use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn corpus() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

fn c(rel: &str) -> String {
    corpus().join(rel).display().to_string()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_reqverify"))
        .args(args)
        .env_remove("FORMALIZER_URL")
        .env_remove("FORMALIZER_MODEL")
        .env_remove("FORMALIZER_API_KEY_ENV")
        .output()
        .unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn formalize_requirement_writes_ir() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r1.ir");
    let o = run(&["formalize", &c("requirements/r1.req"), "--engine", "rules", "-o", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let text = fs::read_to_string(&out).unwrap();
    assert!(text.contains("var seatbelt_chime : bool"));
    assert!(text.contains("(implies"));
}

#[test]
fn formalize_feature_gives_four_conjuncts() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("g3.ir");
    let o = run(&["formalize", &c("features/g3.feature"), "-o", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let text = fs::read_to_string(&out).unwrap();
    let body = text.split("\n\n").nth(1).unwrap();
    assert!(body.starts_with("(and"));
    assert_eq!(body.matches("(implies").count(), 4);
}

#[test]
fn formalize_default_output_next_to_input() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("door.req");
    fs::write(&input, "If the door is open then initiate lamp\n").unwrap();
    let o = run(&["formalize", input.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(dir.path().join("door.ir").exists());
}

#[test]
fn missing_input_is_io_error() {
    let o = run(&["formalize", "/nonexistent/r.req"]);
    assert_eq!(code(&o), 3);
    assert!(stderr(&o).contains("IO_ERROR"));
}

#[test]
fn out_of_grammar_requirement_is_parse_error() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("bad.req");
    fs::write(&input, "The chime should probably sound sometimes\n").unwrap();
    let o = run(&["formalize", input.to_str().unwrap()]);
    assert_eq!(code(&o), 4);
}

#[test]
fn unknown_extension_and_bad_flags_are_usage_errors() {
    assert_eq!(code(&run(&["formalize", &c("prompts/formalize.golden")])), 2);
    assert_eq!(code(&run(&["check", &c("golden/r1.ir")])), 2);
    assert_eq!(code(&run(&["formalize", &c("requirements/r1.req"), "--engine", "magic"])), 2);
    assert_eq!(code(&run(&["formalize", &c("requirements/seatbelt_set.req"), "-o", "/dev/null"])), 2);
    assert_eq!(code(&run(&["--help"])), 0);
}

#[test]
fn suggest_r1_r2_puts_speed_alias_first() {
    let o = run(&["suggest", &c("golden/r1.ir"), &c("golden/r2.ir")]);
    assert_eq!(code(&o), 0);
    let first = stdout(&o).lines().next().unwrap().to_string();
    assert!(first.starts_with("var vehicle_speed_average_driven = mean_vehicle_speed"), "{first}");
}

#[test]
fn suggest_identical_files_gives_unit_scores() {
    let o = run(&["suggest", &c("golden/g3.ir"), &c("golden/g3.ir")]);
    let out = stdout(&o);
    assert_eq!(out.lines().count(), 4);
    assert!(out.lines().all(|l| l.ends_with("# score 1.000")), "{out}");
}

#[test]
fn suggest_disjoint_vocabularies_warns() {
    let o = run(&["suggest", &c("golden/iff_pair.ir"), &c("golden/equality_constant.ir")]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o), "");
    assert!(stderr(&o).contains("warning:"));
}

#[test]
fn check_r1_r2_equivalent() {
    let o = run(&["check", &c("golden/r1.ir"), &c("golden/r2.ir"), "-g", &c("grounding/r1_r2.grounding")]);
    assert_eq!(code(&o), 0, "{}{}", stdout(&o), stderr(&o));
    assert!(stdout(&o).starts_with("verdict: EQUIVALENT"));
}

#[test]
fn check_r3_g3_not_equivalent_prints_witness() {
    let o = run(&["check", &c("golden/r3.ir"), &c("golden/g3.ir"), "-g", &c("grounding/r3_g3.grounding")]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("witness: "));
}

#[test]
fn check_without_map_reports_ungrounded() {
    let dir = tempfile::tempdir().unwrap();
    let rep = dir.path().join("rep.json");
    let o = run(&["check", &c("golden/r3.ir"), &c("golden/g3.ir"), "-r", rep.to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&rep).unwrap()).unwrap();
    let right: Vec<&str> = v["ungrounded"]["right"].as_array().unwrap().iter().map(|x| x.as_str().unwrap()).collect();
    assert!(right.contains(&"seat_occupancy"));
    assert!(right.contains(&"final_seatbelt_status"));
    assert!(v["warnings"].as_array().unwrap().len() >= 3);
}

#[test]
fn report_is_byte_stable_and_ordered() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for p in [&a, &b] {
        run(&["check", &c("golden/r3.ir"), &c("golden/g3.ir"), "-g", &c("grounding/r3_g3.grounding"), "-r", p.to_str().unwrap()]);
    }
    let ta = fs::read_to_string(&a).unwrap();
    assert_eq!(ta, fs::read_to_string(&b).unwrap());
    let keys = ["\"verdict\"", "\"directions\"", "\"witness\"", "\"ungrounded\"", "\"domain_plan\"", "\"version\""];
    let pos: Vec<usize> = keys.iter().map(|k| ta.find(k).unwrap()).collect();
    assert!(pos.windows(2).all(|w| w[0] < w[1]), "{ta}");
}

#[test]
fn sort_mismatch_is_grounding_error() {
    let o = run(&["check", &c("golden/r4_motion_bool.ir"), &c("golden/r4_motion_speed.ir"), "-g", &c("grounding/r4_motion_sort.grounding")]);
    assert_eq!(code(&o), 5);
    let e = stderr(&o);
    assert!(e.contains("SORT_MISMATCH") && e.contains("BOOL") && e.contains("NUMERIC"), "{e}");
}

#[test]
fn malformed_grounding_file_is_grounding_error() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("bad.grounding");
    fs::write(&g, "alias x y\n").unwrap();
    let o = run(&["check", &c("golden/r1.ir"), &c("golden/r2.ir"), "-g", g.to_str().unwrap()]);
    assert_eq!(code(&o), 5);
    assert!(stderr(&o).contains("MALFORMED_GROUNDING"));
}

#[test]
fn oversized_plan_aborts() {
    let dir = tempfile::tempdir().unwrap();
    let rep = dir.path().join("rep.json");
    let o = run(&["check", &c("golden/r1.ir"), &c("golden/r2.ir"), "--limit", "2", "-r", rep.to_str().unwrap()]);
    assert_eq!(code(&o), 6);
    assert!(stderr(&o).contains("PLAN_TOO_LARGE"));
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&rep).unwrap()).unwrap();
    assert_eq!(v["verdict"], "ABORTED");
}

#[test]
fn verify_pairs() {
    let o = run(&["verify", &c("requirements/r3.req"), &c("features/g3.feature"), "-g", &c("grounding/r3_g3.grounding")]);
    assert_eq!(code(&o), 1);
    let o = run(&["verify", &c("requirements/r3.req"), &c("features/r3_identity.feature")]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let o = run(&["verify", &c("requirements/r3.req"), &c("features/malformed.feature")]);
    assert_eq!(code(&o), 4);
    assert!(stderr(&o).contains("UNBOUND_PLACEHOLDER"));
    let o = run(&["verify", &c("requirements/r3.req"), &c("requirements/r4.req")]);
    assert_eq!(code(&o), 2);
}

#[test]
fn emit_lean_r1_r2_theorem() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("t.lean");
    let o = run(&["emit-lean", &c("golden/r1.ir"), &c("golden/r2.ir"), "-g", &c("grounding/r1_r2.grounding"), "-o", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let t = fs::read_to_string(&out).unwrap();
    assert!(t.starts_with("import Mathlib.Data.Real.Basic\n"));
    assert!(t.contains("theorem req1_eq_req2"));
    assert!(t.contains(") ↔\n("));
    assert!(t.contains("(h_vehicle_speed_average_driven : vehicle_speed_average_driven = mean_vehicle_speed)"));
}

#[test]
fn emit_lean_self_pair_is_reflexive() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("t.lean");
    let o = run(&["emit-lean", &c("golden/r3.ir"), &c("golden/r3.ir"), "-o", out.to_str().unwrap(), "--theorem-name", "refl"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let t = fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = t.lines().collect();
    let n = lines.len();
    let strip = |s: &str| s.split_once(' ').unwrap().1.to_string();
    assert_eq!(strip(lines[n - 3]).trim_end_matches(" ↔"), strip(lines[n - 2]).trim_end_matches(" := by").trim_end_matches(')').to_string() + ")");
}

#[test]
fn emit_lean_bad_ir_is_parse_error() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.ir");
    fs::write(&bad, "var x : bool\n\n(and x y)\n").unwrap();
    let o = run(&["emit-lean", bad.to_str().unwrap(), &c("golden/r1.ir"), "-o", dir.path().join("t.lean").to_str().unwrap()]);
    assert_eq!(code(&o), 4);
}

#[test]
fn llm_engine_from_fixtures() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r1.ir");
    let tr = dir.path().join("tr.json");
    let o = run(&[
        "formalize", &c("requirements/r1.req"), "--engine", "llm", "--fixtures", &c("fixtures"),
        "-o", out.to_str().unwrap(), "--transcript", tr.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(fs::read_to_string(&out).unwrap().contains("var seatbelt_inactive : bool"));
    let t: serde_json::Value = serde_json::from_str(&fs::read_to_string(&tr).unwrap()).unwrap();
    assert_eq!(t["messages"].as_array().unwrap().len(), 3);
}

#[test]
fn llm_engine_errors_exit_seven() {
    // No endpoint configured.
    let o = run(&["formalize", &c("requirements/r1.req"), "--engine", "llm", "-o", "/dev/null"]);
    assert_eq!(code(&o), 7);
    assert!(stderr(&o).contains("FORMALIZER_URL"));
    // A requirement with no recorded answer.
    let o = run(&["formalize", &c("requirements/boundary_ge.req"), "--engine", "llm", "--fixtures", &c("fixtures"), "-o", "/dev/null"]);
    assert_eq!(code(&o), 7);
}

#[test]
fn llm_engine_empty_requirement_is_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("empty.req");
    fs::write(&input, "\n").unwrap();
    let o = run(&["formalize", input.to_str().unwrap(), "--engine", "llm", "--fixtures", &c("fixtures")]);
    assert_eq!(code(&o), 2);
}

#[test]
fn also_prove_attaches_prover_answer() {
    let dir = tempfile::tempdir().unwrap();
    let rep = dir.path().join("rep.json");
    let o = run(&[
        "check", &c("golden/r1.ir"), &c("golden/r2.ir"), "-g", &c("grounding/r1_r2.grounding"),
        "--also-prove", "--fixtures", &c("fixtures"), "-r", rep.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&rep).unwrap()).unwrap();
    assert_eq!(v["prover"]["completed"], true);

    let o = run(&[
        "verify", &c("requirements/r3.req"), &c("features/g3.feature"), "-g", &c("grounding/r3_g3.grounding"),
        "--also-prove", "--fixtures", &c("fixtures"), "-r", rep.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 1);
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&rep).unwrap()).unwrap();
    assert_eq!(v["prover"]["completed"], false);
}

#[test]
fn lean_inputs_are_accepted() {
    let o = run(&["check", &c("lean/g3.lean"), &c("golden/g3.ir")]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
}

#[test]
fn r3_g3_differs_under_either_status_reading() {
    for map in ["grounding/r3_g3.grounding", "grounding/r3_g3_final.grounding"] {
        let o = run(&["verify", &c("requirements/r3.req"), &c("features/g3.feature"), "-g", &c(map)]);
        assert_eq!(code(&o), 1, "{map}");
    }
}
