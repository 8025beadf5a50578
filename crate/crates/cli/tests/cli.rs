use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn fbh(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fbh")).args(args).output().expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn csv_rows(text: &str) -> Vec<Vec<f64>> {
    text.lines().skip(1).map(|l| l.split(',').map(|v| v.parse().unwrap()).collect()).collect()
}

#[test]
fn zeros_at_half_order_are_multiples_of_pi() {
    let out = fbh(&["zeros", "--nu", "0.5", "--count", "5"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("n,lambda\n"));
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 5);
    for (i, r) in rows.iter().enumerate() {
        let n = (i + 1) as f64;
        assert_eq!(r[0], n);
        assert!((r[1] - n * std::f64::consts::PI).abs() < 1e-12);
    }
}

#[test]
fn sharp_poisson_estimate_report_has_finite_ratios() {
    let v = stdout_json(&fbh(&["estimates", "--lemma", "sharp-P", "--nu", "0", "--grid", "20"]));
    assert_eq!(v["lemma_id"], "sharp-P");
    let (lo, hi) = (v["min_ratio"].as_f64().unwrap(), v["max_ratio"].as_f64().unwrap());
    assert!(lo > 0.0 && lo <= hi && hi.is_finite());
}

#[test]
fn h1_report_for_lebesgue_family() {
    let v = stdout_json(&fbh(&["h1-report", "--function", "phi1", "--family", "L"]));
    assert_eq!(v["family"], "J");
    let m = v["maximal_norm"].as_f64().unwrap();
    let a = v["atomic_norm_upper"].as_f64().unwrap();
    let r = v["ratio"].as_f64().unwrap();
    assert!(m > 0.0 && a > 0.0 && (r - a / m).abs() < 1e-12 * r);
}

#[test]
fn every_command_succeeds_on_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let cases: [(&[&str], &[&str]); 11] = [
        (&["zeros"], &["zeros.csv"]),
        (&["kernel"], &["kernel.csv"]),
        (&["estimates"], &["estimates.json"]),
        (&["maximal"], &["maximal.csv", "maximal.json"]),
        (&["duhamel"], &["duhamel.json"]),
        (&["uchiyama"], &["uchiyama.json"]),
        (&["atoms", "validate"], &["atom.json"]),
        (&["atoms", "decompose"], &["decomposition.json"]),
        (&["atoms", "batch"], &["batch.json"]),
        (&["h1-report"], &["h1_report.json"]),
        (&["dirichlet"], &["dirichlet.csv"]),
    ];
    for (args, files) in cases {
        let mut full = args.to_vec();
        full.extend(["--out", dir.path().to_str().unwrap()]);
        let out = fbh(&full);
        assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
        assert!(out.stdout.is_empty());
        for f in files {
            assert!(dir.path().join(f).is_file(), "{args:?} left no {f}");
        }
    }
    let leftovers = std::fs::read_dir(dir.path()).unwrap().count();
    assert_eq!(leftovers, 12, "temporary files must be renamed away");
}

#[test]
fn same_seed_gives_identical_bytes() {
    let run = |seed: &str, dir: &Path| {
        let out = fbh(&["atoms", "batch", "--count", "40", "--seed", seed, "--out", dir.to_str().unwrap()]);
        assert!(out.status.success());
        std::fs::read(dir.join("batch.json")).unwrap()
    };
    let (a, b, c) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    assert_eq!(run("7", a.path()), run("7", b.path()));
    assert_ne!(run("7", a.path()), run("8", c.path()));
    let h1 = fbh(&["h1-report", "--function", "bump"]);
    assert_eq!(h1.stdout, fbh(&["h1-report", "--function", "bump"]).stdout);
}

#[test]
fn config_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.conf");
    std::fs::write(&bad, "nu 0.3\n").unwrap();
    let cases: [&[&str]; 7] = [
        &["zeros", "--nu", "-0.5"],
        &["zeros", "--set", "series_tolerance=0"],
        &["zeros", "--set", "no_such_key=1"],
        &["zeros", "--config", bad.to_str().unwrap()],
        &["estimates", "--lemma", "nope"],
        &["atoms", "decompose", "--family", "Q"],
        &["dirichlet", "--dim", "3", "--nu", "1"],
    ];
    for args in cases {
        let out = fbh(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(out.stdout.is_empty());
    }
}

#[test]
fn non_convergence_exits_with_one_and_names_the_operation() {
    let out = fbh(&["kernel", "--times", "1e-7", "--points", "2", "--set", "n_terms=10"]);
    assert_eq!(out.status.code(), Some(1));
    let v: Value = serde_json::from_slice(&out.stderr).expect("stderr is a JSON report");
    assert_eq!(v["operation"], "poisson_kernel_l");
    assert!(v["error"].as_str().unwrap().contains("converge"));
}

#[test]
fn flags_override_file_which_overrides_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("run.conf");
    std::fs::write(&conf, "# local\nnu = 1.0\nseed = 5\n").unwrap();
    let v = stdout_json(&fbh(&["--show-config", "--config", conf.to_str().unwrap(), "--nu", "2", "zeros"]));
    assert_eq!((v["nu"].as_f64(), v["seed"].as_u64()), (Some(2.0), Some(5)));
    assert_eq!(v["n_terms"].as_u64(), Some(4000));
}

#[test]
fn dirichlet_trace_matches_tabulated_input() {
    let dir = tempfile::tempdir().unwrap();
    let table = dir.path().join("f.csv");
    let mut text = String::from("x,value\n");
    for i in 0..=2000 {
        let x = i as f64 / 2000.0;
        text.push_str(&format!("{x},{}\n", x * (1.0 - x)));
    }
    std::fs::write(&table, text).unwrap();
    let out = fbh(&["dirichlet", "--dim", "3", "--input", table.to_str().unwrap(), "--times", "0,0.5"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("t,x,value\n"));
    let rows = csv_rows(&text);
    let (start, later): (Vec<_>, Vec<_>) = rows.iter().partition(|r| r[0] == 0.0);
    assert_eq!(start.len(), later.len());
    for r in &start {
        assert!((r[2] - r[1] * (1.0 - r[1])).abs() < 1e-6);
    }
    // the solution decays in t and keeps the sign of a non-negative datum
    let peak = |v: &[&Vec<f64>]| v.iter().fold(0.0f64, |m, r| m.max(r[2].abs()));
    assert!(peak(&later) < peak(&start));
    assert!(later.iter().all(|r| r[2] > -1e-9));
}
