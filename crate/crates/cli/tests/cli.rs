use std::f64::consts::PI;
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use mildns::datagen::random_divfree;
use mildns::{cnsf, GridSpec, SpectralField};
use serde_json::Value;
use tempfile::TempDir;

fn mildns(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mildns")).args(args).output().expect("binary runs")
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn write_field(dir: &Path, name: &str, f: &SpectralField) -> String {
    let p = dir.join(name);
    cnsf::write(&p, f).unwrap();
    p.to_string_lossy().into_owned()
}

fn s(p: &Path) -> String {
    p.to_string_lossy().into_owned()
}

#[test]
fn zero_field_norms_are_zero() {
    let tmp = TempDir::new().unwrap();
    let f = write_field(tmp.path(), "z.cnsf", &SpectralField::zeros(GridSpec::new(8, 1.0).unwrap()));
    let out = tmp.path().join("out");
    let o = mildns(&["norms", &f, "--out", &s(&out), "--ppo", "2"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let r = &json(&out.join("norms.json"))["result"];
    for k in ["caloric_besov", "dyadic_besov", "carleson_bmo", "triebel_dyadic", "l2"] {
        assert_eq!(r[k].as_f64(), Some(0.0), "{k}");
    }
    assert_eq!(json(&out.join("norms.json"))["command"], "norms");
}

#[test]
fn corrupt_magic_is_an_input_error_with_offset() {
    let tmp = TempDir::new().unwrap();
    let f = write_field(tmp.path(), "a.cnsf", &SpectralField::zeros(GridSpec::new(8, 1.0).unwrap()));
    let mut bytes = fs::read(&f).unwrap();
    bytes[0] ^= 0xff;
    fs::write(&f, bytes).unwrap();
    let o = mildns(&["norms", &f, "--out", &s(&tmp.path().join("out"))]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("offset 0"));
}

#[test]
fn missing_file_and_bad_flags_are_input_errors() {
    assert_eq!(mildns(&["norms", "/nonexistent.cnsf"]).status.code(), Some(2));
    assert_eq!(mildns(&["norms"]).status.code(), Some(2));
    assert_eq!(mildns(&["kernel", "--set", "no.such.key=1"]).status.code(), Some(2));
}

#[test]
fn gen_example_writes_field_and_report() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("ex");
    let o = mildns(&["gen-example", "--grid", "64", "--ppo", "2", "--stride", "4", "--sweep", "4,8", "--out", &s(&out)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let a = cnsf::read(out.join("example.cnsf")).unwrap();
    let doc = json(&out.join("example.json"));
    let rep = &doc["result"]["report"];
    assert!(rep["checks"]["energy_matches"].as_bool().unwrap());
    assert!(rep["checks"]["besov_below_eps"].as_bool().unwrap());
    assert!(rep["checks"]["band_zero"].as_bool().unwrap());
    assert!((rep["energy"].as_f64().unwrap() - a.l2_sq()).abs() <= 1e-12 * a.l2_sq());
    let sweep = fs::read_to_string(out.join("sweep.csv")).unwrap();
    assert_eq!(sweep.lines().count(), 3);
    assert!(sweep.starts_with("spread,"));
}

#[test]
fn infeasible_energy_is_flagged_not_fatal() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("ex");
    let o = mildns(&["gen-example", "--E", "1e-300", "--spread", "4", "--out", &s(&out)]);
    assert!(o.status.success());
    let doc = json(&out.join("example.json"));
    assert_eq!(doc["result"]["params"]["feasible"], false);
    assert!(doc["result"]["field"].is_null());
    assert!(!out.join("example.cnsf").exists());
    assert!(String::from_utf8_lossy(&o.stderr).contains("violated"));
}

#[test]
fn solve_zero_data_takes_one_iteration() {
    let tmp = TempDir::new().unwrap();
    let f = write_field(tmp.path(), "z.cnsf", &SpectralField::zeros(GridSpec::new(8, 2.0 * PI).unwrap()));
    let out = tmp.path().join("o");
    let o = mildns(&["solve", &f, "--out", &s(&out)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let tr = &json(&out.join("trace.json"))["result"];
    assert_eq!(tr["iterations"].as_array().unwrap().len(), 1);
    assert_eq!(tr["verdict"], "converged");
}

#[test]
fn solve_large_data_reports_divergence() {
    let tmp = TempDir::new().unwrap();
    let g = GridSpec::new(16, 2.0 * PI).unwrap();
    let a = random_divfree(&g, [0, 1], 1).unwrap().scaled(100.0);
    let f = write_field(tmp.path(), "big.cnsf", &a);
    let out = tmp.path().join("o");
    let o = mildns(&["solve", &f, "--eps", "0.5", "--ppo", "2", "--out", &s(&out)]);
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(json(&out.join("trace.json"))["result"]["verdict"], "diverged");
    assert!(out.join("contraction.csv").exists());
}

#[test]
fn solve_etd_then_energy_ledger() {
    let tmp = TempDir::new().unwrap();
    let g = GridSpec::new(16, 2.0 * PI).unwrap();
    let a = random_divfree(&g, [0, 1], 2).unwrap();
    let f = write_field(tmp.path(), "a.cnsf", &a);
    let out = tmp.path().join("o");
    let o = mildns(&["solve", &f, "--mode", "etd", "--eps", "0.5", "--ppo", "2", "--out", &s(&out)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let out2 = tmp.path().join("e");
    let o = mildns(&["energy", &s(&out.join("trajectory")), "--out", &s(&out2)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let led = &json(&out2.join("energy.json"))["result"];
    assert!(led["max_relative_residual"].as_f64().unwrap() < 1e-2);
    let (x, y) = (fs::read_to_string(out.join("energy.csv")).unwrap(), fs::read_to_string(out2.join("energy.csv")).unwrap());
    for (l1, l2) in x.lines().zip(y.lines()) {
        assert_eq!(l1, l2);
    }
    assert_eq!(x.lines().count(), y.lines().count());
}

#[test]
fn probe_with_empty_corpus() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("p");
    let o = mildns(&["probe", "--set", "probe.count=0", "--out", &s(&out)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let r = &json(&out.join("probe.json"))["result"];
    assert!(r["reports"].as_array().unwrap().is_empty());
    assert!(r["summary"].as_array().unwrap().is_empty());
}

#[test]
fn runs_are_deterministic_apart_from_timestamp() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("k");
    let args = ["kernel", "--grid", "32", "--out", &s(&out)];
    let run = || {
        let o = mildns(&args);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        let mut v = json(&out.join("kernel.json"));
        assert!(v["generated_at_unix"].as_u64().is_some());
        v.as_object_mut().unwrap().remove("generated_at_unix");
        (v, fs::read_to_string(out.join("kernel.csv")).unwrap())
    };
    let first = run();
    assert_eq!(first, run());
}

#[test]
fn flags_override_config_file() {
    let tmp = TempDir::new().unwrap();
    let cfg = tmp.path().join("c.json");
    fs::write(&cfg, r#"{"grid.n": 16, "time.ppo": 3, "seed": 9}"#).unwrap();
    let out = tmp.path().join("k");
    let o = mildns(&["kernel", "--config", &s(&cfg), "--grid", "32", "--out", &s(&out)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let c = &json(&out.join("kernel.json"))["config"];
    assert_eq!(c["grid"]["n"], 32);
    assert_eq!(c["time"]["ppo"], 3);
    assert_eq!(c["seed"], 9);
}
