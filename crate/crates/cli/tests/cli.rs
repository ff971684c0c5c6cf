use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn chowflop(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_chowflop"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn scratch(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("chowflop-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

fn json(o: &Output) -> Value {
    serde_json::from_str(&stdout(o)).unwrap()
}

/// The report with every `millis` field removed.
fn without_millis(mut v: Value) -> Value {
    for c in v["checks"].as_array_mut().unwrap() {
        c.as_object_mut().unwrap().remove("millis");
    }
    v
}

#[test]
fn documented_examples_pass() {
    for args in [
        &["verify", "flop", "--r", "2", "--mode", "formal"][..],
        &["verify", "binomial", "--r-max", "12"],
        &["verify", "blowup", "--case", "linear:4,1"],
    ] {
        let o = chowflop(args);
        let text = stdout(&o);
        assert_eq!(o.status.code(), Some(0), "{args:?}\n{text}");
        assert!(text.contains(", 0 failed"), "{text}");
        assert!(!text.contains("FAIL"));
    }
    let text = stdout(&chowflop(&["verify", "binomial", "--r-max", "12"]));
    assert_eq!(text.lines().filter(|l| l.starts_with("PASS binomial/r=")).count(), 12);
}

#[test]
fn json_schema() {
    let o = chowflop(&["verify", "flop", "--r", "1", "--format", "json", "--seed", "5"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["seed"], 5);
    let checks = v["checks"].as_array().unwrap();
    assert!(!checks.is_empty());
    let names: Vec<&str> = checks.iter().map(|c| c["name"].as_str().unwrap()).collect();
    let mut sorted = names.clone();
    sorted.sort();
    assert_eq!(names, sorted);
    for c in checks {
        let obj = c.as_object().unwrap();
        for key in ["name", "anchor", "status", "millis"] {
            assert!(obj.contains_key(key), "{key} missing in {c}");
        }
        assert_eq!(c["status"], "pass");
        assert!(c["millis"].is_u64());
        assert!(!obj.contains_key("witness"));
    }
}

#[test]
fn json_is_deterministic_up_to_timings() {
    let args = [
        "verify", "all", "--mode", "numeric", "--trials", "2", "--r-max", "2", "--seed", "42", "--format", "json",
    ];
    let a = without_millis(json(&chowflop(&args)));
    let b = without_millis(json(&chowflop(&args)));
    assert_eq!(a, b);
    let other = ["verify", "flop", "--mode", "numeric", "--trials", "1", "--r", "1", "--seed"];
    let x = chowflop(&[&other[..], &["1"]].concat());
    let y = chowflop(&[&other[..], &["2"]].concat());
    assert_eq!(passing_names(&x), passing_names(&y), "same check names for any seed");
}

fn passing_names(o: &Output) -> Vec<String> {
    stdout(o)
        .lines()
        .filter_map(|l| l.strip_prefix("PASS ").map(|r| r.split(' ').next().unwrap().to_string()))
        .collect()
}

#[test]
fn usage_errors_exit_with_two() {
    for args in [
        &["verify", "nope"][..],
        &["verify", "flop", "--r", "0"],
        &["verify", "flop", "--mode", "numeric", "--trials", "0"],
        &["verify", "flop", "--r", "two"],
        &["verify", "blowup", "--case", "linear:1,4"],
        &["verify", "flop", "--format", "yaml"],
        &["verify", "--bogus"],
        &["verify", "blowup", "--case", "/nonexistent/embedding.txt"],
    ] {
        let o = chowflop(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(!o.stderr.is_empty());
    }
}

#[test]
fn rejected_embedding_exits_with_one() {
    let text = "\
ambient: t:1
ambient_bound: 3
center: u:1
center_bound: 2
codim: 1
pull t: u
push 1: t
push u: t^2
push u^2: t^3
# c_1(N) should be u
normal: 2 * u
";
    let path = scratch("skewed.txt", text);
    let o = chowflop(&["verify", "blowup", "--case", path.to_str().unwrap()]);
    let out = stdout(&o);
    assert_eq!(o.status.code(), Some(1), "{out}");
    assert!(out.contains("FAIL blowup/"), "{out}");
    assert!(out.contains("self-intersection"), "{out}");

    let good = scratch("plane.txt", &text.replace("2 * u", "1 * u"));
    let o = chowflop(&["verify", "blowup", "--case", good.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));

    let broken = scratch("broken.txt", "ambient: t:1\ncenter u:1\n");
    let o = chowflop(&["verify", "blowup", "--case", broken.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));
}

#[test]
fn config_file_with_flag_override() {
    let cfg = scratch("run.conf", "# nightly\nsuite = flop\nr = 1\nseed = 9\nformat = json\n");
    let o = chowflop(&["verify", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["seed"], 9);
    assert!(v["checks"][0]["name"].as_str().unwrap().starts_with("flop/r=1/"));

    let o = chowflop(&["verify", "--config", cfg.to_str().unwrap(), "--seed", "3", "--r", "2"]);
    let v = json(&o);
    assert_eq!(v["seed"], 3);
    assert!(v["checks"][0]["name"].as_str().unwrap().starts_with("flop/r=2/"));

    let bad = scratch("bad.conf", "suite = flop\ncolour = red\n");
    let o = chowflop(&["verify", "--config", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn report_file_output() {
    let dir = std::env::temp_dir().join(format!("chowflop-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("report.json");
    let o = chowflop(&["verify", "binomial", "--r-max", "3", "--format", "json", "--out", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["checks"].as_array().unwrap().len(), 3);
}
