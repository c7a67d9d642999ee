use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use invphase_cli::spec;

fn specs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("specs")
}

fn invphase(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_invphase")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("invphase-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn spec_path(name: &str) -> String {
    specs().join(name).display().to_string()
}

#[test]
fn halfturn_json_report() {
    let o = invphase(&["compute", "--spec", &spec_path("halfturn.spec"), "--emit", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["schema"], 1);
    assert_eq!(v["method"], "ahss");
    assert_eq!(v["graded"], serde_json::json!([]));
    assert_eq!(v["group_text"], "0");
    assert_eq!(v["extension_ambiguous"], false);
}

#[test]
fn torus_text_lists_graded_pieces() {
    let o = invphase(&["compute", "--spec", &spec_path("torus2.spec")]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("degree-0 graded: Z/2 at (0, 0), Z/2 + Z/2 at (1, -1), Z at (2, -2)"), "{text}");
    assert!(text.contains("undetermined (extension problem)"));
}

#[test]
fn json_is_byte_identical_across_runs() {
    for name in ["halfturn.spec", "torus2.spec"] {
        for method in ["ahss", "cohomology", "les"] {
            if name == "torus2.spec" && method != "ahss" {
                continue;
            }
            let a = invphase(&["compute", "--spec", &spec_path(name), "--method", method, "--emit", "json"]);
            let b = invphase(&["compute", "--spec", &spec_path(name), "--method", method, "--emit", "json"]);
            assert_eq!(a.status.code(), Some(0));
            assert_eq!(a.stdout, b.stdout, "{name} {method}");
        }
    }
}

#[test]
fn out_file_matches_stdout() {
    let dest = scratch("halfturn.json");
    let o = invphase(&["compute", "--spec", &spec_path("halfturn.spec"), "--emit", "json", "--out", dest.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let direct = invphase(&["compute", "--spec", &spec_path("halfturn.spec"), "--emit", "json"]);
    assert_eq!(std::fs::read(&dest).unwrap(), direct.stdout);
}

#[test]
fn compare_spec_agrees() {
    let o = invphase(&["compare", "--spec", &spec_path("halfturn.spec")]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert_eq!(text.lines().last(), Some("agree"));
    assert_eq!(text.lines().count(), 4);
}

#[test]
fn compare_reports_can_disagree() {
    let half = scratch("half.json");
    let torus = scratch("torus.json");
    let euclid = scratch("euclid.json");
    for (spec, dest, method) in [
        ("halfturn.spec", &half, "les"),
        ("torus2.spec", &torus, "ahss"),
        ("euclidean0.spec", &euclid, "ahss"),
    ] {
        let o = invphase(&["compute", "--spec", &spec_path(spec), "--method", method, "--emit", "json", "--out", dest.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0), "{spec}");
    }
    // Z/2 against 0
    let o = invphase(&["compare", euclid.to_str().unwrap(), half.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).ends_with("DISAGREE\n"));
    // an undetermined group never agrees
    let o = invphase(&["compare", torus.to_str().unwrap(), torus.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let o = invphase(&["compare", half.to_str().unwrap(), half.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn empty_spec_is_rejected_with_position() {
    let path = scratch("empty.spec");
    std::fs::write(&path, "").unwrap();
    let o = invphase(&["compute", "--spec", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("1:1"), "{err}");
}

#[test]
fn bad_inputs_exit_two() {
    assert_eq!(invphase(&["compute", "--spec", "/nonexistent/x.spec"]).status.code(), Some(2));
    assert_eq!(invphase(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(invphase(&["compare", "--spec", &spec_path("torus2.spec")]).status.code(), Some(2));
    assert_eq!(invphase(&["compute", "--spec", &spec_path("torus2.spec"), "--method", "les"]).status.code(), Some(2));
}

#[test]
fn coefficient_commands() {
    let o = invphase(&["coeff", "validate", "spin_z2"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("ok: spin_z2"));
    let shown = scratch("shown.coeff");
    let o = invphase(&["coeff", "show", "spin_z2"]);
    std::fs::write(&shown, &o.stdout).unwrap();
    let again = invphase(&["coeff", "show", shown.to_str().unwrap()]);
    assert_eq!(again.status.code(), Some(0));
    assert_eq!(o.stdout, again.stdout);
}

#[test]
fn presets_are_listed() {
    let o = invphase(&["presets", "list"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    for word in ["torus", "euclidean_sphere", "halfturn_e3", "spin_z2", "cofiber_2sigma"] {
        assert!(text.contains(word), "missing {word}");
    }
}

#[test]
fn shipped_specs_round_trip() {
    for entry in std::fs::read_dir(specs()).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_none_or(|e| e != "spec") {
            continue;
        }
        let text = std::fs::read_to_string(&path).unwrap();
        let parsed = spec::parse(&text).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        let printed = spec::print(&parsed);
        let reparsed = spec::parse(&printed).unwrap();
        assert_eq!(parsed, reparsed, "{}", path.display());
        assert_eq!(spec::print(&reparsed), printed);
    }
}

#[test]
fn inline_cells_match_the_preset() {
    let a = invphase_cli::compute_file(&specs().join("halfturn.spec"), None).unwrap();
    let b = invphase_cli::compute_file(&specs().join("halfturn_inline.spec"), None).unwrap();
    assert_eq!(a.graded, b.graded);
    assert_eq!(a.group, b.group);
    assert_eq!(a.details, b.details);
}

#[test]
fn run_cli_writes_to_the_given_sinks() {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = invphase_cli::run_cli(["invphase", "compute", "--spec", &spec_path("euclidean1.spec")], &mut out, &mut err);
    assert_eq!(code, 0);
    assert!(err.is_empty());
    assert!(String::from_utf8(out).unwrap().contains("group: "));
}

#[test]
fn problem_file_matches_the_builtin_sequence() {
    let from_file = invphase_cli::compute_file(&specs().join("halfturn_sequence.spec"), None).unwrap();
    let builtin = invphase_cli::compute_file(&specs().join("halfturn.spec"), Some(invphase_cli::spec::Method::Les)).unwrap();
    assert_eq!(from_file.group, builtin.group);
    assert_eq!(from_file.instances, builtin.instances);
    assert_eq!(from_file.details["verdicts"], builtin.details["verdicts"]);
}

#[test]
fn builtin_sequence_needs_subgroup_and_degree() {
    let path = scratch("nodegree.spec");
    std::fs::write(&path, "[problem]\nname = x\ncoefficients = spin_z2\nmethod = les\n[les] problem = cofiber_2sigma\n").unwrap();
    let o = invphase(&["compute", "--spec", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8(o.stderr).unwrap().contains("subgroup"));
}
