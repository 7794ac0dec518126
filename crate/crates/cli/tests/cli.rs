use std::path::Path;
use std::process::{Command, Output};

fn etdkit(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_etdkit"))
        .args(args)
        .current_dir(dir)
        .env_remove("ETDKIT_OUTPUT")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

/// CSV rows without the timing column.
fn csv_without_seconds(path: &Path) -> Vec<String> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .map(|l| {
            let mut f: Vec<&str> = l.split(',').collect();
            f.remove(4);
            f.join(",")
        })
        .collect()
}

#[test]
fn list_shows_both_registries() {
    let dir = tempfile::tempdir().unwrap();
    let o = etdkit(dir.path(), &["list"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("ETDRK4  ETD Runge–Kutta  4  4  1"), "{text}");
    assert!(text.contains("kdv  1D  third-order dispersive"), "{text}");
    let schemes = text.split("Problems").next().unwrap();
    let shipped = schemes.lines().skip(1).filter(|l| !l.is_empty() && !l.contains("not certified")).count();
    assert!(shipped >= 15, "{shipped}");
}

#[test]
fn run_ks_takes_ten_thousand_steps() {
    let dir = tempfile::tempdir().unwrap();
    let o = etdkit(dir.path(), &["run", "ks", "--scheme", "etdrk4", "--h", "1e-2", "--snapshots", "50"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.contains("steps 10000"), "{text}");
    assert!(text.contains("FFTs 80000"), "{text}");
    let out = dir.path().join("etdkit-out/ks-run");
    assert!(out.join("final.txt").is_file());
    assert!(out.join("snapshot_t50.txt").is_file());
    assert!(out.join("manifest.json").is_file());
}

#[test]
fn run_nls_against_breather() {
    let dir = tempfile::tempdir().unwrap();
    let o = etdkit(dir.path(), &["run", "nls", "--scheme", "etdrk4", "--h", "1e-4", "--compare-analytic"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    let line = text.lines().find(|l| l.contains("analytic breather")).expect("error line");
    let e: f64 = line.rsplit(' ').next().unwrap().parse().unwrap();
    assert!(e < 1e-8, "{line}");
}

#[test]
fn invalid_input_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let o = etdkit(dir.path(), &["run", "ks", "--scheme", "nosuchscheme"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("nosuchscheme"));

    let o = etdkit(dir.path(), &["run", "nosuchproblem"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("nosuchproblem"));

    let o = etdkit(dir.path(), &["run", "ks", "--compare-analytic"]);
    assert_eq!(o.status.code(), Some(2));

    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "problem = \"ks\"\nshemes = [\"etdrk4\"]\n").unwrap();
    let o = etdkit(dir.path(), &["bench", "--manifest", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("shemes"), "{}", stderr(&o));
}

#[test]
fn instability_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let o = etdkit(dir.path(), &["run", "ks", "--scheme", "abnorsett6", "--h", "5"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("t = "), "{}", stderr(&o));
}

#[test]
fn bench_writes_results() {
    let dir = tempfile::tempdir().unwrap();
    let o = etdkit(dir.path(), &["bench", "ac", "--desk", "--repetitions", "1"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = dir.path().join("etdkit-out/ac-bench");
    for f in ["results.csv", "results.svg", "manifest.json"] {
        assert!(out.join(f).is_file(), "{f}");
    }
}

#[test]
fn bench_ks_shows_adams_instability() {
    let dir = tempfile::tempdir().unwrap();
    let o = etdkit(
        dir.path(),
        &["bench", "ks", "--schemes", "abnorsett4,abnorsett5,abnorsett6,etdrk4", "--desk", "--repetitions", "1"],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = std::fs::read_to_string(dir.path().join("etdkit-out/ks-bench/results.csv")).unwrap();
    let rows: Vec<Vec<&str>> = csv.lines().skip(1).map(|l| l.split(',').collect()).collect();
    let largest = rows.iter().map(|r| r[1].parse::<f64>().unwrap()).fold(0.0, f64::max);
    let at_largest: Vec<&Vec<&str>> = rows.iter().filter(|r| r[1].parse::<f64>().unwrap() == largest).collect();
    assert!(at_largest.iter().any(|r| r[0].starts_with("ABN") && r[5] == "false"), "{csv}");
    assert!(at_largest.iter().any(|r| r[0] == "ETDRK4" && r[5] == "true"), "{csv}");
}

#[test]
fn echoed_manifest_reproduces_the_sweep() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("first");
    let o = etdkit(
        dir.path(),
        &[
            "bench", "gl2", "--n", "16", "--t-end", "0.5", "--schemes", "etdrk4,pecec433", "--count", "3",
            "--h-max", "0.1", "--h-min", "0.025", "--repetitions", "1", "--param", "B=1.2",
            "--output", out.to_str().unwrap(),
        ],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let first = csv_without_seconds(&out.join("results.csv"));
    assert_eq!(first.len(), 7);
    let saved = dir.path().join("manifest.json");
    std::fs::copy(out.join("manifest.json"), &saved).unwrap();
    std::fs::remove_dir_all(&out).unwrap();

    let o = etdkit(dir.path(), &["bench", "--manifest", saved.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(csv_without_seconds(&out.join("results.csv")), first);
    let echoed: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(echoed["params"]["B"], 1.2);
}

#[test]
fn output_root_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let root = dir.path().join("root");
    let o = Command::new(env!("CARGO_BIN_EXE_etdkit"))
        .args(["run", "ac", "--h", "0.1", "--t-end", "1"])
        .current_dir(dir.path())
        .env("ETDKIT_OUTPUT", &root)
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(root.join("ac-run/final.txt").is_file());
}

#[test]
fn order_command() {
    let dir = tempfile::tempdir().unwrap();
    let o = etdkit(dir.path(), &["order", "etdrk4", "etdrk2"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    let slope = |name: &str| -> f64 {
        let line = text.lines().find(|l| l.starts_with(name)).unwrap();
        line.rsplit(' ').next().unwrap().parse().unwrap()
    };
    assert!((slope("ETDRK4") - 4.0).abs() < 0.3);
    assert!((slope("ETDRK2") - 2.0).abs() < 0.3);
    assert_eq!(etdkit(dir.path(), &["order", "--probe", "cosine"]).status.code(), Some(2));
}

#[test]
fn selftest_passes() {
    let dir = tempfile::tempdir().unwrap();
    let o = etdkit(dir.path(), &["--jobs", "2", "selftest"]);
    assert!(o.status.success(), "{}", stdout(&o));
    assert!(stdout(&o).contains("0 failed"));
}

/// Every `etdkit` command in the README's shell blocks runs and exits 0.
#[test]
fn readme_examples_run() {
    let readme = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/../../README.md")).unwrap();
    let mut in_block = false;
    let mut commands = Vec::new();
    for line in readme.lines() {
        if line.starts_with("```") {
            in_block = line.trim() == "```sh";
            continue;
        }
        if in_block {
            if let Some(rest) = line.trim().strip_prefix("etdkit ") {
                commands.push(rest.to_string());
            }
        }
    }
    assert!(!commands.is_empty());
    let dir = tempfile::tempdir().unwrap();
    for c in commands {
        let args: Vec<&str> = c.split_whitespace().collect();
        let o = etdkit(dir.path(), &args);
        assert!(o.status.success(), "etdkit {c}: {}", stderr(&o));
    }
}
