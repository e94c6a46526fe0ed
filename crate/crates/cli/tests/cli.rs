use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::Value;

fn kb(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/kb").join(name)
}

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
    report: Option<Value>,
}

fn deftally(args: &[&str]) -> Run {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("report.json");
    let out = Command::new(env!("CARGO_BIN_EXE_deftally"))
        .args(args)
        .arg("--report")
        .arg(&report)
        .output()
        .unwrap();
    Run {
        code: out.status.code().unwrap(),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
        report: std::fs::read_to_string(&report)
            .ok()
            .map(|s| serde_json::from_str(&s).unwrap()),
    }
}

fn path(name: &str) -> String {
    kb(name).display().to_string()
}

#[test]
fn generate_nested_red_birds() {
    let r = deftally(&["generate", &path("redbird_nested.kb"), "--target", "Fly"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let rep = r.report.unwrap();
    assert_eq!(rep["result"]["kept"], serde_json::json!(["Bird : Fly / Fly"]));
    let cands = &rep["result"]["targets"][0]["candidates"];
    assert_eq!(cands[1]["verdict"], "suppressed");
    assert_eq!(cands[0]["cases"], serde_json::json!(["2b"]));
}

#[test]
fn generate_conflicting_red_birds() {
    let r = deftally(&["generate", &path("redbird_conflict.kb"), "--target", "Fly"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let rep = r.report.unwrap();
    assert_eq!(rep["result"]["kept"], serde_json::json!(["Bird : Fly, !(Red & Bird) / Fly"]));
    let rejected = &rep["result"]["targets"][0]["candidates"][1];
    assert_eq!(rejected["rule"], "Red & Bird : Fly / Fly");
    assert_eq!(rejected["verdict"], "rejected");
    assert!(r.stdout.contains("lower bound 0.5 < 1 - delta = 0.85"));
}

#[test]
fn generate_without_statistics_fails() {
    let r = deftally(&["generate", &path("nostats.kb")]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("no statistical statements"));
    assert!(r.report.is_none());
    let r = deftally(&["generate", &path("nostats.kb"), "--target", "A"]);
    assert_eq!(r.code, 2);
}

#[test]
fn delta_flag_overrides_config() {
    let r = deftally(&["generate", &path("redbird_conflict.kb"), "--delta", "0.5"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let rep = r.report.unwrap();
    assert_eq!(rep["settings"]["delta"], "0.5");
    assert_eq!(rep["result"]["delta"]["exact"], "1/2");
    let kept = rep["result"]["kept"].as_array().unwrap();
    assert!(kept.iter().any(|k| k == "Red & Bird : Fly / Fly"));
}

#[test]
fn example_one_extensions() {
    let r = deftally(&["extend", &path("example1.kb")]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let exts = r.report.unwrap()["result"]["extensions"].clone();
    assert_eq!(exts.as_array().unwrap().len(), 2);
    assert_eq!(exts[0]["conclusions"], serde_json::json!(["T(a)"]));
    assert_eq!(exts[1]["conclusions"], serde_json::json!(["!T(a)"]));
    assert_eq!(exts[0]["proportion"]["exact"], "1/2");
}

#[test]
fn penguin_threshold_concludes_not_flying() {
    let r = deftally(&["extend", &path("penguin.kb"), "--mode", "threshold"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let t = &r.report.unwrap()["result"]["threshold"];
    assert_eq!(t["extension"]["conclusions"], serde_json::json!(["!Fly(a)"]));
    assert_eq!(t["halted_at_step"], 2);
}

#[test]
fn explicit_order_is_checked() {
    let r = deftally(&["extend", &path("penguin.kb"), "--mode", "threshold", "--order", "3"]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("rule 3 does not exist"));
    let r = deftally(&["extend", &path("penguin.kb"), "--mode", "threshold", "--order", "1"]);
    assert_eq!(r.code, 0);
    assert_eq!(r.report.unwrap()["result"]["threshold"]["extension"]["conclusions"], serde_json::json!([]));
}

#[test]
fn soundness_of_amended_rules() {
    let r = deftally(&["soundness", &path("penguin.kb")]);
    assert_eq!(r.code, 0, "{}", r.stdout);
    let rep = r.report.unwrap();
    assert_eq!(rep["result"]["violations"], 0);
    assert_eq!(rep["result"]["rules"][0]["worst_error"]["exact"], "15/106");
}

#[test]
fn soundness_flags_the_naive_bird_rule() {
    let r = deftally(&["soundness", &path("penguin_naive.kb")]);
    assert_eq!(r.code, 1, "{}", r.stdout);
    let rep = r.report.unwrap();
    assert_eq!(rep["status"], "violation");
    let naive = &rep["result"]["rules"][0];
    assert_eq!(naive["rule"], "Bird : Fly / Fly");
    assert_eq!(naive["valid"], false);
    assert_eq!(naive["worst_evidence"], serde_json::json!(["Penguin(a)"]));
    assert_eq!(rep["result"]["rules"][1]["valid"], true);
}

#[test]
fn soundness_with_no_rules_is_vacuous() {
    let r = deftally(&["soundness", &path("nostats.kb")]);
    assert_eq!(r.code, 0);
    assert!(r.stdout.contains("vacuously sound"));
}

#[test]
fn evidence_bound_refuses() {
    let r = deftally(&["soundness", &path("penguin.kb"), "--bound", "10"]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("over the bound"));
}

#[test]
fn lottery_halts_before_the_last_species() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("lottery.kb");
    let r = deftally(&[
        "lottery", "--n", "5", "--intervals", "0:3/10", "--epsilon-star", "3/10", "--domain", "10",
        "--order", "declared", "--kb-out", out.to_str().unwrap(),
    ]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let rep = r.report.unwrap();
    let t = &rep["result"]["threshold"];
    assert_eq!(t["halted_at_step"], 3);
    let ps: Vec<_> = t["extension"]["trace"]
        .as_array()
        .unwrap()
        .iter()
        .map(|s| s["proportion"]["exact"].as_str().unwrap().to_string())
        .collect();
    assert_eq!(ps, ["4/5", "3/4"]);
    assert_eq!(rep["result"]["reiter"].as_array().unwrap().len(), 5);
    assert_eq!(rep["result"]["threshold_exceeds_reiter"], true);
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.contains("axiom B <-> S1 or S2 or S3 or S4 or S5"));
    assert!(text.contains("config epsilon_star 0.3"));

    // the saved file reproduces the run through `extend`
    let again = deftally(&["extend", out.to_str().unwrap(), "--mode", "threshold", "--order", "declared"]);
    assert_eq!(again.code, 0, "{}", again.stderr);
    assert_eq!(again.report.unwrap()["result"]["threshold"]["extension"]["trace"], t["extension"]["trace"]);
}

#[test]
fn single_species_blocks_itself() {
    let r = deftally(&["lottery", "--n", "1", "--domain", "4"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let rep = r.report.unwrap();
    let reiter = rep["result"]["reiter"].as_array().unwrap();
    assert_eq!(reiter.len(), 1);
    assert_eq!(reiter[0]["extension"]["conclusions"], serde_json::json!([]));
}

#[test]
fn inconsistent_lottery_is_an_error() {
    let r = deftally(&["lottery", "--n", "3", "--intervals", "0:1/10"]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("inconsistent"));
}

#[test]
fn verify_oracle_on_files_and_random_states() {
    for name in ["example1.kb", "bird.kb", "penguin.kb"] {
        let r = deftally(&["verify-oracle", &path(name), "--space", "filtered", "--domain", "5"]);
        assert_eq!(r.code, 0, "{name}: {}", r.stdout);
        assert_eq!(r.report.unwrap()["result"]["mismatches"], 0);
    }
    let r = deftally(&["verify-oracle", &path("penguin.kb")]);
    assert_eq!(r.code, 2, "{}", r.stdout);
    assert!(r.stderr.contains("cap"), "{}", r.stderr);
    let r = deftally(&["verify-oracle", "--random", "200", "--seed", "5"]);
    assert_eq!(r.code, 0);
    assert_eq!(r.report.unwrap()["result"]["samples"], 200);
}

#[test]
fn bad_flags_are_errors() {
    assert_eq!(deftally(&["generate", &path("bird.kb"), "--delta", "2"]).code, 2);
    assert_eq!(deftally(&["generate", &path("bird.kb"), "--delta", "x"]).code, 2);
    assert_eq!(deftally(&["extend", &path("bird.kb"), "--domain", "0"]).code, 2);
    assert_eq!(deftally(&["verify-oracle"]).code, 2);
    assert_eq!(deftally(&["extend", "/nonexistent.kb"]).code, 2);
}

#[test]
fn reports_are_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("r.json");
    let run = || {
        let status = Command::new(env!("CARGO_BIN_EXE_deftally"))
            .args(["extend", &path("example1.kb"), "--report", report.to_str().unwrap()])
            .output()
            .unwrap();
        assert!(status.status.success());
        (status.stdout, std::fs::read(&report).unwrap())
    };
    assert_eq!(run(), run());
}
