use std::fs;
use std::process::{Command, Output};

fn expsum(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_expsum"))
        .args(args)
        .env_remove("EXPSUM_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn field(text: &str, key: &str) -> f64 {
    text.lines()
        .find_map(|l| l.strip_prefix(key).map(|v| v.split_whitespace().next().unwrap().parse().unwrap()))
        .unwrap_or_else(|| panic!("no {key} in {text}"))
}

#[test]
fn bounds_mod7_half() {
    let o = expsum(&["bounds", "--modulus", "7", "--alpha", "1/2"]);
    assert!(o.status.success());
    assert_eq!(field(&stdout(&o), "character "), 13.0);
    assert_eq!(field(&stdout(&o), "geometric "), 1.0);
}

#[test]
fn bounds_undefined_when_m_alpha_integral() {
    let o = expsum(&["bounds", "--modulus", "4", "--alpha", "1/2"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("character undefined"));
}

#[test]
fn sum_stays_under_character_bound() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("traj.csv");
    let o = expsum(&["sum", "--char", "7.1", "--alpha", "1/2", "--limit", "1000000", "--out", csv.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(field(&stdout(&o), "runsup ") <= 13.0);
    let text = fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("x,re,im,abs,runsup\n"));
    assert!(text.lines().last().unwrap().starts_with("1000000,"));
    let meta: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("traj.json")).unwrap()).unwrap();
    assert_eq!(meta["X"], 1000000);
    assert_eq!(meta["alpha"], "1/2");
}

#[test]
fn csv_output_is_byte_identical() {
    let args = ["sum", "--char", "5.1", "--eta", "5=0,1", "--alpha", "sqrt2m1", "--t", "1.5", "--limit", "200000", "--schedule", "linear:1000"];
    let a = expsum(&args);
    let b = Command::new(env!("CARGO_BIN_EXE_expsum")).args(args).env("EXPSUM_THREADS", "1").output().unwrap();
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn gauss_all_mod5() {
    let o = expsum(&["gauss", "--modulus", "5", "--char", "1", "--all"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 7);
    assert!(field(&text, "max_deviation ") <= 1e-9);
}

#[test]
fn exit_codes() {
    assert_eq!(expsum(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(expsum(&["bounds", "--modulus", "7"]).status.code(), Some(1));
    assert_eq!(expsum(&["bounds", "--modulus", "7", "--alpha", "one/two"]).status.code(), Some(1));
    assert_eq!(expsum(&["--help"]).status.code(), Some(0));
    // m/m0 = 4 is not squarefree
    assert_eq!(expsum(&["gauss", "--modulus", "8", "--char", "0", "--all"]).status.code(), Some(2));
    // η equal to the primitive character's value at p
    assert_eq!(
        expsum(&["modified", "--char", "4.1", "--eta", "3=1,0", "--alpha", "1/3", "--ells", "1", "--x", "100"]).status.code(),
        Some(2)
    );
    assert_eq!(expsum(&["characters", "--modulus", "2000000", "--list"]).status.code(), Some(3));
    assert_eq!(expsum(&["sum", "--char", "3.1", "--alpha", "1/3", "--limit", "99999999999"]).status.code(), Some(3));
}

#[test]
fn characters_list_and_inspect() {
    let o = expsum(&["characters", "--modulus", "12", "--list"]);
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 5);
    assert!(text.contains("12.3,2,12,12.3,true,false"));
    let o = expsum(&["characters", "--modulus", "5", "--inspect", "5.1"]);
    let text = stdout(&o);
    assert!(text.contains("conductor 5\nprimitive 5.1\n"));
    assert_eq!(expsum(&["characters", "--modulus", "6", "--inspect", "5.1"]).status.code(), Some(1));
}

#[test]
fn construct_then_distance_and_correlate() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("e1.json");
    let spec = spec.to_str().unwrap();
    let o = expsum(&["construct", "--example", "1", "--k", "3", "--alpha", "1/3", "--out", spec]);
    assert!(o.status.success());
    assert!((field(&stdout(&o), "bound ") - 4.4641016151377553).abs() < 1e-12);
    let doc: serde_json::Value = serde_json::from_str(&fs::read_to_string(spec).unwrap()).unwrap();
    assert!(doc["certified_bound"].is_number());
    // f(p) = 1 at every prime, so it is at distance 0 from 1
    let o = expsum(&["distance", "--f", spec, "--twist", "1.0,0", "--x", "10000"]);
    assert_eq!(field(&stdout(&o), "distance "), 0.0);
    let o = expsum(&["correlate", "--spec", spec, "--alpha", "phi-1", "--h", "2", "--x", "5000"]);
    assert!(field(&stdout(&o), "deviation ") <= 1e-10);

    let e2 = dir.path().join("e2.json");
    let o = expsum(&["construct", "--example", "2", "--k", "4", "--out", e2.to_str().unwrap()]);
    assert!(stdout(&o).contains("primes [11, 17, 37, 67]"));
    assert_eq!(expsum(&["construct", "--example", "3", "--k", "1", "--out", spec]).status.code(), Some(1));
}

#[test]
fn modified_diagnostics() {
    let o = expsum(&["modified", "--char", "12.1", "--eta", "2=0,1", "--eta", "3=-1,0", "--alpha", "phi-1", "--ells", "2,1", "--x", "5000"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(field(&stdout(&o), "deviation ") <= 1e-8);
    let o = expsum(&["modified", "--char", "4.1", "--eta", "2=1,0", "--alpha", "sqrt2m1", "--Br", "5"]);
    let text = stdout(&o);
    assert!(text.starts_with("r,re,im,abs,sup\n"));
    assert_eq!(text.lines().filter(|l| l.starts_with(char::is_numeric)).count(), 5);
}

#[test]
fn config_supplies_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("defaults.conf");
    fs::write(&cfg, "# defaults\nlimit = 1000\nschedule = list:10,1000\n").unwrap();
    let o = expsum(&["--config", cfg.to_str().unwrap(), "sum", "--char", "3.1", "--alpha", "1/4"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert_eq!(text.lines().map(|l| l.split(',').next().unwrap()).collect::<Vec<_>>(), ["x", "10", "1000"]);
    let explicit = expsum(&["--config", cfg.to_str().unwrap(), "sum", "--char", "3.1", "--alpha", "1/4", "--limit", "20"]);
    assert!(stdout(&explicit).lines().last().unwrap().starts_with("20,"));
    fs::write(&cfg, "colour = blue\n").unwrap();
    assert_eq!(expsum(&["--config", cfg.to_str().unwrap(), "bounds", "--modulus", "3", "--alpha", "1/2"]).status.code(), Some(1));
}

#[test]
fn selftest_quick_suite() {
    let o = expsum(&["selftest", "--suite", "quick"]);
    let text = stdout(&o);
    assert_eq!(text.lines().filter(|l| l.starts_with("[PASS]")).count(), 8, "{text}");
    assert!(text.ends_with("8/8 passed\n"));
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(expsum(&["selftest", "--suite", "slow"]).status.code(), Some(1));
}
