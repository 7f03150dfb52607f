use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name).display().to_string()
}

fn serrelab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_serrelab")).args(args).env_remove("SERRELAB_SEED").output().unwrap()
}

fn lines(out: &Output) -> Vec<Value> {
    String::from_utf8_lossy(&out.stdout).lines().map(|l| serde_json::from_str(l).unwrap()).collect()
}

#[test]
fn conj_reports_a_verified_conjugator() {
    let out = serrelab(&["conj", "--left", "x y", "--right", "y x"]);
    assert_eq!(out.status.code(), Some(0));
    let r = &lines(&out)[0];
    assert_eq!(r["status"], "verified");
    assert_eq!(r["detail"]["conjugator"], "x");
    assert_eq!(r["detail"]["certificate_verified"], true);
}

#[test]
fn non_conjugate_words_are_refuted() {
    let out = serrelab(&["conj", "--left", "x y", "--right", "x^-1 y"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(lines(&out)[0]["status"], "refuted");
    let out = serrelab(&["conj", "--pm", "--left", "x y", "--right", "y^-1 x^-1"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(lines(&out)[0]["detail"]["inverse"], true);
}

#[test]
fn separation_on_the_centralizer_extension() {
    let out = serrelab(&["separate", &fixture("centralizer.gg"), "--task", "separate_T"]);
    assert_eq!(out.status.code(), Some(0));
    let r = &lines(&out)[0];
    assert_eq!(r["detail"]["minimal_n"], 1);
    assert_eq!(r["seed"], 7);
}

#[test]
fn bad_input_exits_with_two() {
    let missing = serrelab(&["check", &fixture("missing.gg")]);
    assert_eq!(missing.status.code(), Some(2));
    let dir = std::env::temp_dir().join(format!("serrelab-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("bad.gg");
    std::fs::write(&bad, "alphabet F { x, y }\nword w in F = x ^ y\n").unwrap();
    let out = serrelab(&["check", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let e = &lines(&out)[0]["detail"]["parse_error"];
    assert_eq!((e["line"].as_u64(), e["column"].as_u64()), (Some(2), Some(19)));
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn every_fixture_checks_and_round_trips() {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures");
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        let out = serrelab(&["check", path.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0), "{}", path.display());
        assert_eq!(lines(&out)[0]["detail"]["round_trip"], true, "{}", path.display());
    }
}

#[test]
fn reports_are_reproducible() {
    let args = ["--seed", "5", "report", &fixture("ice_height2.gg")];
    let a = serrelab(&args);
    let b = serrelab(&[&args[..], &["--jobs", "2"]].concat());
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn seed_comes_from_the_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_serrelab"))
        .args(["verify", "c-double", "--count", "5", "--pairs", "2"])
        .env("SERRELAB_SEED", "31")
        .output()
        .unwrap();
    assert_eq!(lines(&out)[0]["seed"], 31);
    let flag = serrelab(&["--seed", "31", "verify", "c-double", "--count", "5", "--pairs", "2"]);
    assert_eq!(out.stdout, flag.stdout);
}

#[test]
fn text_format_names_each_task() {
    let out = serrelab(&["--format", "text", "report", &fixture("centralizer.gg")]);
    let text = String::from_utf8(out.stdout).unwrap();
    for task in ["separate_T: verified", "gamma: verified", "discriminate_T: verified", "conj_T: verified"] {
        assert!(text.contains(task), "{task} missing from\n{text}");
    }
}

#[test]
fn exported_fixtures_parse() {
    for fixture in ["magnus-pair", "retraction-tower", "c-double"] {
        let out = serrelab(&["export", fixture]);
        assert_eq!(out.status.code(), Some(0));
        serrelab_core::dsl::parse(&String::from_utf8(out.stdout).unwrap()).unwrap();
    }
}
