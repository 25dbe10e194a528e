use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_oneshot-cqsw"));
    c.env_remove("ONESHOT_SEED");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn json(out: &Output) -> serde_json::Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn gen(dir: &Path, spec: &str, seed: &str) -> String {
    let p = dir.join(format!("{}-{seed}.json", spec.replace(':', "_")));
    let out = run(&["gen-state", "--spec", spec, "--seed", seed, "--out", p.to_str().unwrap()]);
    assert!(out.status.success());
    p.to_str().unwrap().to_string()
}

#[test]
fn entropy_of_a_perfectly_correlated_bit() {
    let dir = tempfile::tempdir().unwrap();
    let state = gen(dir.path(), "correlated:2", "0");
    let hmin = json(&run(&["entropy", "--state", &state, "--kind", "hmin", "--condition", "B"]));
    let hmax = json(&run(&["entropy", "--state", &state, "--kind", "hmax", "--condition", "B"]));
    // B holds a copy of X: both entropies are zero (up to solver accuracy)
    assert!(hmin["value"].as_f64().unwrap().abs() < 1e-6);
    assert!(hmax["value"].as_f64().unwrap().abs() < 1e-6);
}

#[test]
fn compress_writes_json_and_per_function_table() {
    let dir = tempfile::tempdir().unwrap();
    let state = gen(dir.path(), "random-cq:4:2", "3");
    let table = dir.path().join("errors.csv");
    let out = run(&[
        "compress", "--state", &state, "--epsilon1", "0.1", "--epsilon2", "0.1", "--m", "3",
        "--mode", "exhaustive", "--csv", table.to_str().unwrap(),
    ]);
    let res = json(&out);
    assert_eq!(res["m"], 3);
    let body = std::fs::read_to_string(&table).unwrap();
    let mut lines = body.lines();
    assert_eq!(lines.next(), Some("index,p_err"));
    let errs: Vec<f64> = lines.map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
    assert_eq!(errs.len() as u64, res["functions_evaluated"].as_u64().unwrap());
    let mean = errs.iter().sum::<f64>() / errs.len() as f64;
    assert!((mean - res["mean_p_err"].as_f64().unwrap()).abs() < 1e-12);
}

#[test]
fn pa_and_distill_report_within_budget() {
    let dir = tempfile::tempdir().unwrap();
    let xe = gen(dir.path(), "random-cq:8:2:uniform", "1");
    let pa = json(&run(&["pa", "--state", &xe, "--eps1", "0", "--eps2", "0.5", "--mode", "exhaustive"]));
    assert!(pa["mean_distance"].as_f64().unwrap() <= 0.5);

    let xbe = gen(dir.path(), "cqq-random:4:2:2", "2");
    let channels = dir.path().join("channels.json");
    std::fs::write(
        &channels,
        r#"[{"name":"flip","u_size":4,"v_size":1,"rows":[[0,1,0,0],[1,0,0,0],[0,0,0,1],[0,0,1,0]]}]"#,
    )
    .unwrap();
    let out = run(&[
        "distill", "--state", &xbe, "--eps1", "0.05", "--eps2", "0.1", "--epsp1", "0.05",
        "--channels", channels.to_str().unwrap(),
    ]);
    let reports = json(&out);
    let r = &reports.as_array().unwrap()[0];
    assert_eq!(r["channel"], "flip");
    assert!(r["measured_distance"].as_f64().unwrap() <= 0.3);
}

#[test]
fn verify_is_reproducible_and_seedable_from_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    let csv = dir.path().join("a.csv");
    let out = run(&[
        "verify", "--suite", "audenaert", "--instances", "4", "--seed", "9",
        "--json", a.to_str().unwrap(), "--csv", csv.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("audenaert: 16/16 checks passed"));
    let out = bin()
        .env("ONESHOT_SEED", "9")
        .args(["verify", "--suite", "audenaert", "--instances", "4", "--json", b.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(out.status.success());
    let records = |p: &Path| -> serde_json::Value {
        let v: serde_json::Value = serde_json::from_slice(&std::fs::read(p).unwrap()).unwrap();
        v["records"].clone()
    };
    // the embedded configs differ only in their output paths
    assert_eq!(records(&a), records(&b));
    let rows = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(rows.lines().count(), 17);

    // a config file replays the run
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"suite":"audenaert","seed":9,"instances":4}"#).unwrap();
    let c = dir.path().join("c.json");
    assert!(run(&["verify", "--config", cfg.to_str().unwrap(), "--json", c.to_str().unwrap()]).status.success());
    assert_eq!(records(&a), records(&c));
    let again = dir.path().join("again.json");
    let out = run(&["verify", "--config", cfg.to_str().unwrap(), "--json", again.to_str().unwrap()]);
    assert!(out.status.success());
    let strip = |p: &Path| std::fs::read_to_string(p).unwrap().replace(p.to_str().unwrap(), "");
    assert_eq!(strip(&c), strip(&again));
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(run(&["verify", "--suite", "nonsense"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "--suite", "chain-rules", "--spec", "correlated:2"]).status.code(), Some(2));
    assert_eq!(run(&["gen-state", "--spec", "random-cq:99:2"]).status.code(), Some(2));
    assert_eq!(run(&["entropy", "--state", "/nonexistent.json", "--kind", "hmin", "--condition", "B"]).status.code(), Some(2));
}
