use std::path::Path;
use std::process::{Command, Output};

fn locspec(cache: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_locspec"))
        .args(args)
        .env("LOCSPEC_CACHE", cache)
        .current_dir(cache)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

/// Data rows of a CSV report, split into cells.
fn rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines().filter(|l| !l.starts_with('#')).skip(1).map(|l| l.split(',').map(str::to_string).collect()).collect()
}

fn json(o: &Output) -> serde_json::Value {
    let v: serde_json::Value = serde_json::from_str(&stdout(o)).unwrap();
    assert_eq!(v["schema"], 1);
    v
}

#[test]
fn spectrum_rows_trace_and_cache() {
    let dir = tempfile::tempdir().unwrap();
    let first = locspec(dir.path(), &["spectrum", "prolate", "--c", "50"]);
    assert!(first.status.success(), "{}", stderr(&first));
    let text = stdout(&first);
    assert!(text.starts_with("# kind: prolate"));
    let r = rows(&text);
    assert_eq!(r.len(), 64);
    assert_eq!(r[0][0], "1");
    let sum: f64 = r.iter().map(|c| c[1].parse::<f64>().unwrap()).sum();
    assert!((sum - 50.0).abs() < 1e-6 * 50.0, "{sum}");
    // untrusted values carry the flag
    for c in &r {
        let d: f64 = c[2].parse().unwrap();
        assert_eq!(c[3] == "1", d >= 1e-12);
    }

    let second = locspec(dir.path(), &["spectrum", "prolate", "--c", "50"]);
    assert!(stderr(&second).contains("cache hit"));
    assert_eq!(first.stdout, second.stdout);
}

#[test]
fn corrupted_cache_is_recomputed() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["spectrum", "fock-disk", "--c", "20", "--format", "json"];
    let first = locspec(dir.path(), &args);
    assert!(first.status.success());
    let entry = std::fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().path())
        .find(|p| p.extension().is_some_and(|x| x == "json"))
        .expect("cache entry written");
    let text = std::fs::read_to_string(&entry).unwrap();
    std::fs::write(&entry, text.replacen("e-", "e-1", 1)).unwrap();
    let second = locspec(dir.path(), &args);
    assert!(stderr(&second).contains("invalid"), "{}", stderr(&second));
    assert_eq!(first.stdout, second.stdout);
    let v = json(&second);
    assert_eq!(v["kind"], "fock-disk");
    assert!((v["rows"][0]["eigenvalue"].as_f64().unwrap() - 1.0).abs() < 1e-6);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let low_m = locspec(dir.path(), &["spectrum", "prolate", "--c", "50", "--m", "100"]);
    assert_eq!(low_m.status.code(), Some(2));
    assert!(stderr(&low_m).contains("floor"));

    let unconverged = locspec(dir.path(), &["spectrum", "fock-disk", "--c", "60", "--N", "30"]);
    assert_eq!(unconverged.status.code(), Some(3));
    assert!(stderr(&unconverged).contains("tail test"));

    let bad_n = locspec(dir.path(), &["certify", "mu-lower", "--c", "100", "--n", "100"]);
    assert_eq!(bad_n.status.code(), Some(2));

    let no_grid = locspec(dir.path(), &["certify", "lambda-lower", "--c", "100", "--n", "1"]);
    assert_eq!(no_grid.status.code(), Some(4));
    assert!(stderr(&no_grid).contains("stage `grid`"));

    assert_eq!(locspec(dir.path(), &["report", "nope"]).status.code(), Some(2));
    assert_eq!(locspec(dir.path(), &["bounds", "nope", "--c", "1"]).status.code(), Some(2));
}

#[test]
fn bounds_rows() {
    let dir = tempfile::tempdir().unwrap();
    let k = locspec(dir.path(), &["bounds", "karnik", "--c", "100", "--eps", "0.01"]);
    let r = rows(&stdout(&k));
    assert_eq!(r.len(), 1);
    assert!((r[0][4].parse::<f64>().unwrap() - 17.75).abs() < 0.01);

    let lw = locspec(dir.path(), &["bounds", "landau-widom", "--c", "100", "--n", "100"]);
    assert!((rows(&stdout(&lw))[0][4].parse::<f64>().unwrap() - 0.5).abs() < 1e-12);

    let sweep = locspec(dir.path(), &["bounds", "landau-widom", "--c", "100", "--n", "80:120"]);
    let v: Vec<f64> = rows(&stdout(&sweep)).iter().map(|c| c[4].parse().unwrap()).collect();
    assert_eq!(v.len(), 41);
    assert!(v.windows(2).all(|w| w[1] <= w[0]));

    let missing = locspec(dir.path(), &["bounds", "fuchs", "--c", "6"]);
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn certify_reports() {
    let dir = tempfile::tempdir().unwrap();
    let mu = locspec(dir.path(), &["certify", "mu-lower", "--c", "100", "--n", "50", "--format", "json"]);
    assert!(mu.status.success(), "{}", stderr(&mu));
    let v = json(&mu);
    let cert = &v["certificate"];
    let b = cert["certified_bound"].as_f64().unwrap();
    assert!(b > 0.0 && b < 1.0);
    assert_eq!(cert["sound"], true);
    assert!(cert["metrics"]["packing_coverage"].as_f64().unwrap() > 0.8);

    let lam = locspec(dir.path(), &["certify", "lambda-lower", "--c", "100", "--n", "60", "--format", "json"]);
    assert!(lam.status.success());
    assert_eq!(json(&lam)["certificate"]["sound"], true);
}

#[test]
fn separation_and_plot() {
    let dir = tempfile::tempdir().unwrap();
    let o = locspec(dir.path(), &["report", "separation", "--c", "144", "--plot"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.contains("# holds: 1"));
    for r in rows(&text) {
        if r[4] == "1" {
            assert_eq!(r[5], "1", "row {r:?}");
        }
    }
    let svg = std::fs::read_to_string(dir.path().join("separation.svg")).unwrap();
    assert!(svg.starts_with("<?xml") && svg.contains("<svg") && svg.trim_end().ends_with("</svg>"));
    assert!(svg.contains(">1e-"));
}

#[test]
fn gadgets_all_pass() {
    let dir = tempfile::tempdir().unwrap();
    let o = locspec(dir.path(), &["report", "gadgets"]);
    assert!(o.status.success());
    let r = rows(&stdout(&o));
    assert!(r.len() >= 80);
    assert!(r.iter().all(|c| c.last().unwrap() == "PASS"));
    for g in ["tail-amplitude", "ftw-tail", "kolmogorov", "jensen", "poisson", "trace-bound", "counting-upper"] {
        assert!(r.iter().any(|c| c[0] == g), "{g}");
    }
}

#[test]
fn fit_time_json_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["report", "fit-time", "--c", "60,120,240", "--format", "json"];
    let a = locspec(dir.path(), &args);
    assert!(a.status.success());
    let v = json(&a);
    let spread = v["fit"]["spread"].as_f64().unwrap();
    assert!((1.0..=6.0).contains(&spread));
    assert!(!v["fit"]["samples"].as_array().unwrap().is_empty());
    let b = locspec(dir.path(), &args);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn output_file_is_written() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("p.csv");
    let o = locspec(dir.path(), &["report", "plunge", "--output", out.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    let r = rows(&std::fs::read_to_string(out).unwrap());
    assert_eq!(r.len(), 4);
    assert!(r.iter().all(|c| c[6] == "1"));
}
