use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};

use serde_json::Value;
use tempfile::TempDir;

const LCP: &str = r#"{"kind": "lcp", "M": [[-1, 0], [1, 1]],
  "query": {"x": [0, 0], "u": [0, 0], "X": "domain"}, "sampling": {"pairs_per_radius": 2000}}"#;

const ABS: &str = r#"{"kind": "pl_function",
  "cells": [{"C": {"A": [[-1]], "b": [0]}, "g": [1], "c": 0}, {"C": {"A": [[1]], "b": [0]}, "g": [-1], "c": 0}],
  "x": [0]}"#;

fn golden() -> f64 {
    ((3.0 + 5f64.sqrt()) / 2.0).sqrt()
}

struct Run {
    dir: TempDir,
}

impl Run {
    fn new() -> Self {
        Run { dir: tempfile::tempdir().unwrap() }
    }

    fn file(&self, name: &str, text: &str) -> PathBuf {
        let p = self.dir.path().join(name);
        fs::write(&p, text).unwrap();
        p
    }

    fn out(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    fn polylip(&self, args: &[&str], stdin: Option<&str>) -> Output {
        let mut child = Command::new(env!("CARGO_BIN_EXE_polylip"))
            .args(args)
            .env_remove("POLYLIP_TOL")
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::piped())
            .spawn()
            .unwrap();
        if let Some(s) = stdin {
            child.stdin.take().unwrap().write_all(s.as_bytes()).unwrap();
        }
        drop(child.stdin.take());
        child.wait_with_output().unwrap()
    }
}

fn report(dir: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(dir.join("report.json")).unwrap()).unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn criterion_on_the_lcp() {
    let r = Run::new();
    let input = r.file("lcp.json", LCP);
    let out = r.out("o");
    let o = r.polylip(&["criterion", "--in", s(&input), "--out", s(&out)], None);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let j = report(&out);
    assert_eq!(j["criterion"], Value::Bool(true));
    assert!((j["modulus"].as_f64().unwrap() - golden()).abs() <= 1e-9);
    assert_eq!(j["per_stratum"].as_array().unwrap().len(), 9);
    assert_eq!(j["checks"]["directional"]["passed"], Value::Bool(false));
    assert_eq!(j["checks"]["necessity"]["passed"], Value::Bool(true));
    assert!(fs::read_to_string(out.join("report.md")).unwrap().contains("criterion holds: **true**"));
    assert!(String::from_utf8_lossy(&o.stdout).contains("1.618033988749895"));
}

#[test]
fn classical_criterion_fails_on_the_whole_space() {
    let r = Run::new();
    let input = r.file("lcp.json", &LCP.replace(r#""X": "domain""#, r#""X": "full""#));
    let out = r.out("o");
    let o = r.polylip(&["criterion", "--in", s(&input), "--out", s(&out)], None);
    assert!(o.status.success());
    let j = report(&out);
    assert_eq!(j["criterion"], Value::Bool(false));
    assert_eq!(j["modulus"], Value::from("inf"));
    assert_eq!(j["kernel_witness"]["xstar"][1].as_f64(), Some(0.0));
}

#[test]
fn level_set_modulus_from_the_command_line() {
    let r = Run::new();
    let input = r.file("abs.json", ABS);
    for (v, want) in [("2", 1.0 / 3.0), ("-0.5", 2.0), ("0", 1.0)] {
        let out = r.out(&format!("o{v}"));
        let o = r.polylip(&["levelset", "--in", s(&input), "--v", v, "--out", s(&out)], None);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        let j = report(&out);
        assert!((j["lip_X"].as_f64().unwrap() - want).abs() <= 1e-12, "v̄ = {v}: {}", j["lip_X"]);
    }
    let j = report(&r.out("o0"));
    assert_eq!(j["classical_lip"], Value::from("inf"));
}

#[test]
fn estimates_do_not_depend_on_the_thread_count() {
    let r = Run::new();
    let input = r.file("lcp.json", LCP);
    let (a, b) = (r.out("a"), r.out("b"));
    assert!(r.polylip(&["estimate", "--in", s(&input), "--seed", "7", "--threads", "1", "--out", s(&a)], None).status.success());
    assert!(r.polylip(&["estimate", "--in", s(&input), "--seed", "7", "--threads", "3", "--out", s(&b)], None).status.success());
    assert_eq!(fs::read(a.join("report.json")).unwrap(), fs::read(b.join("report.json")).unwrap());
    assert_eq!(fs::read(a.join("witness.json")).unwrap(), fs::read(b.join("witness.json")).unwrap());
    let est = report(&a)["estimate"].as_f64().unwrap();
    assert!(est <= golden() * (1.0 + 1e-9) && est >= 0.95 * golden(), "{est}");
}

#[test]
fn witness_replays_to_the_same_ratio() {
    let r = Run::new();
    let input = r.file("lcp.json", LCP);
    let out = r.out("o");
    assert!(r.polylip(&["estimate", "--in", s(&input), "--kappa", "1", "--out", s(&out)], None).status.success());
    let est = report(&out);
    assert_eq!(est["verdict"]["falsifies"].as_f64(), Some(1.0));
    let w = out.join("witness.json");
    let back = r.out("replay");
    let o = r.polylip(&["estimate", "--in", s(&input), "--replay", s(&w), "--out", s(&back)], None);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let j = report(&back);
    assert_eq!(j["reproduces"], Value::Bool(true));
    assert_eq!(j["violates"], Value::Bool(true));
    assert_eq!(j["ratio"], est["witness"]["ratio"]);
}

#[test]
fn tampered_witness_does_not_reproduce() {
    let r = Run::new();
    let input = r.file("abs.json", ABS);
    let out = r.out("o");
    assert!(r.polylip(&["estimate", "--in", s(&input), "--pairs", "200", "--out", s(&out)], None).status.success());
    let mut w: Value = serde_json::from_str(&fs::read_to_string(out.join("witness.json")).unwrap()).unwrap();
    w["ratio"] = Value::from(0.5);
    let wp = r.file("w.json", &w.to_string());
    let o = r.polylip(&["estimate", "--in", s(&input), "--replay", s(&wp), "--out", s(&r.out("r"))], None);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn problem_from_standard_input() {
    let r = Run::new();
    let out = r.out("o");
    let o = r.polylip(&["modulus", "--in", "-", "--out", s(&out)], Some(LCP));
    assert!(o.status.success());
    assert!((report(&out)["modulus"].as_f64().unwrap() - golden()).abs() <= 1e-9);
}

#[test]
fn exit_codes() {
    let r = Run::new();
    let out = r.out("o");
    let unknown = r.polylip(&["criterion", "--in", "-", "--out", s(&out)], Some(r#"{"kind": "lcp", "M": [[1]], "extra": 1}"#));
    assert_eq!(unknown.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&unknown.stderr).contains("extra"));
    let bad_kind = r.polylip(&["criterion", "--in", "-", "--out", s(&out)], Some(r#"{"kind": "lpc"}"#));
    assert_eq!(bad_kind.status.code(), Some(2));
    let shape = r.polylip(&["criterion", "--in", "-", "--out", s(&out)], Some(r#"{"kind": "lcp", "M": [[1, 0]], "query": {"x": [0], "u": [0]}}"#));
    assert_eq!(shape.status.code(), Some(2));
    let off_graph = r.polylip(
        &["criterion", "--in", "-", "--out", s(&out)],
        Some(r#"{"kind": "lcp", "M": [[1, 0], [0, 1]], "query": {"x": [0, 0], "u": [1, 0]}}"#),
    );
    assert_eq!(off_graph.status.code(), Some(3));
    let wrong_command = r.polylip(&["levelset", "--in", "-", "--v", "1", "--out", s(&out)], Some(LCP));
    assert_eq!(wrong_command.status.code(), Some(2));
}

#[test]
fn flags_override_the_config_file() {
    let r = Run::new();
    let input = r.file("abs.json", ABS);
    let config = r.file("config.json", r#"{"seed": 3, "pairs": 100, "v": [2]}"#);
    let a = r.out("a");
    assert!(r.polylip(&["estimate", "--in", s(&input), "--config", s(&config), "--out", s(&a)], None).status.success());
    assert_eq!(report(&a)["sampling"]["seed"], Value::from(3));
    assert_eq!(report(&a)["sampling"]["pairs_per_radius"], Value::from(100));
    let b = r.out("b");
    assert!(r.polylip(&["estimate", "--in", s(&input), "--config", s(&config), "--seed", "5", "--out", s(&b)], None).status.success());
    assert_eq!(report(&b)["sampling"]["seed"], Value::from(5));
    let c = r.out("c");
    assert!(r.polylip(&["levelset", "--in", s(&input), "--config", s(&config), "--out", s(&c)], None).status.success());
    assert!((report(&c)["lip_X"].as_f64().unwrap() - 1.0 / 3.0).abs() <= 1e-12);
    let bad = r.file("bad.json", r#"{"sed": 3}"#);
    assert_eq!(r.polylip(&["estimate", "--in", s(&input), "--config", s(&bad), "--out", s(&c)], None).status.code(), Some(2));
}

#[test]
fn reproduce_subset_of_the_acceptance_suite() {
    let r = Run::new();
    let out = r.out("o");
    let o = r.polylip(&["reproduce-paper", "--criteria", "2,3,6", "--out", s(&out)], None);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stdout));
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert_eq!(stdout.lines().filter(|l| l.starts_with("PASS")).count(), 3);
    assert_eq!(report(&out)["passed"], Value::Bool(true));
    assert_eq!(r.polylip(&["reproduce-paper", "--criteria", "11", "--out", s(&out)], None).status.code(), Some(2));
}
