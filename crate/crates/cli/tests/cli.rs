use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use stabcleanse::protocol::ResourceRow;
use stabcleanse_cli::format::{parse_resource_csv, resource_csv};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_stabcleanse"));
    c.env_remove("STABCLEANSE_SEED");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("stabcleanse-cli-{}-{name}", std::process::id()));
    let _ = std::fs::remove_dir_all(&d);
    std::fs::create_dir_all(&d).unwrap();
    d
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn json(o: &Output) -> Value {
    assert!(o.status.success(), "{}", stderr(o));
    serde_json::from_slice(&o.stdout).unwrap()
}

#[test]
fn half_f_density_is_a_usage_error() {
    let o = run(&["phase-curve", "--f-density", "0.5"]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
}

#[test]
fn malformed_circuit_reports_line() {
    let d = scratch("malformed");
    let p = d.join("bad.txt");
    std::fs::write(&p, "H 0\nCX 0 1\nFOO 1\n").unwrap();
    let o = run(&["purity-estimate", "--circuit", p.to_str().unwrap(), "--n", "2", "--n-f", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 3"), "{}", stderr(&o));
}

#[test]
fn missing_seed_is_a_usage_error() {
    let o = run(&["mc-se", "--n", "4", "--samples", "4"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("seed"), "{}", stderr(&o));
}

#[test]
fn seed_from_environment() {
    let o = bin()
        .args(["purity-estimate", "--n", "6", "--t", "1"])
        .env("STABCLEANSE_SEED", "4")
        .output()
        .unwrap();
    let with_flag = run(&["purity-estimate", "--n", "6", "--t", "1", "--seed", "4"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(o.stdout, with_flag.stdout);
}

#[test]
fn zero_workers_rejected() {
    let o = run(&["phase-curve", "--workers", "0"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn unknown_config_key_rejected() {
    let d = scratch("badcfg");
    let p = d.join("c.json");
    std::fs::write(&p, r#"{"nn": 3}"#).unwrap();
    let o = run(&["phase-curve", "--config", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn flags_override_config() {
    let d = scratch("config");
    let cfg = d.join("c.json");
    let out = d.join("curve.csv");
    std::fs::write(
        &cfg,
        format!(r#"{{"n": 30, "grid": [0.5, 1.0, 2.0], "output_path": {:?}}}"#, out.to_str().unwrap()),
    )
    .unwrap();
    let o = run(&["phase-curve", "--config", cfg.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = std::fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().count(), 4);
    assert!(text.starts_with("t_over_f,g_bits,g_ratio\n"));

    let out2 = d.join("override.csv");
    let o = run(&["phase-curve", "--config", cfg.to_str().unwrap(), "--grid", "1.5", "-o", out2.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = std::fs::read_to_string(&out2).unwrap();
    assert_eq!(text.lines().count(), 2, "{text}");
    assert!(text.lines().nth(1).unwrap().starts_with("1.5"));
    // n still comes from the file: g at t/f = 1.5 differs from the n = 60 default
    let default = run(&["phase-curve", "--grid", "1.5"]);
    assert_ne!(default.stdout, text.as_bytes());
}

#[test]
fn resource_csv_round_trips_bit_exactly() {
    let rows = vec![
        ResourceRow {
            method: "swap-test".into(),
            cost_metric: "shots".into(),
            cost_value: 65436.0,
            error: 0.1 * 0.039_062_500_000_000_62,
        },
        ResourceRow {
            method: "stabilizer-proxy".into(),
            cost_metric: "bit_ops".into(),
            cost_value: 21936.0,
            error: 0.0,
        },
        ResourceRow {
            method: "x".into(),
            cost_metric: "y".into(),
            cost_value: f64::MIN_POSITIVE,
            error: 1.0 / 3.0,
        },
    ];
    let text = resource_csv(&rows).unwrap();
    let back = parse_resource_csv(&text).unwrap();
    assert_eq!(back.len(), rows.len());
    for (a, b) in rows.iter().zip(&back) {
        assert_eq!(a.method, b.method);
        assert_eq!(a.cost_metric, b.cost_metric);
        assert_eq!(a.cost_value.to_bits(), b.cost_value.to_bits());
        assert_eq!(a.error.to_bits(), b.error.to_bits());
    }
    assert_eq!(resource_csv(&back).unwrap(), text);
}

#[test]
fn phase_curve_rerun_is_byte_identical() {
    let a = run(&["phase-curve"]);
    let b = run(&["phase-curve"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(String::from_utf8(a.stdout).unwrap().lines().count(), 62);
}

#[test]
fn clifford_only_bounds_are_tight() {
    let v = json(&run(&["purity-estimate", "--n", "10", "--t", "0", "--seed", "5"]));
    assert_eq!(v["upper_factor_log2"], 0);
    let le = v["lower_E"]["k"].as_i64().unwrap();
    let lf = v["lower_F"]["k"].as_i64().unwrap();
    assert_eq!(le, lf);
    let truth = v["true_purity"].as_f64().unwrap();
    assert!((truth - (le as f64).exp2()).abs() < 1e-12);
    assert_eq!(v["alpha_window"][0], v["alpha_window"][1]);
}

fn cleanse_into(d: &Path, n: &str, t: &str) -> Value {
    json(&run(&["cleanse", "--n", n, "--t", t, "--seed", "9", "--out-dir", d.to_str().unwrap()]))
}

#[test]
fn cleanse_output_feeds_purity_estimate() {
    let d = scratch("cleanse");
    let c = cleanse_into(&d, "8", "2");
    for f in ["circuit.txt", "circuit.json", "phi_bar.stab", "rho.stab"] {
        assert!(d.join(f).exists(), "{f}");
    }
    let circuit = d.join("circuit.txt");
    let v = json(&run(&["purity-estimate", "--circuit", circuit.to_str().unwrap()]));
    let direct = json(&run(&["purity-estimate", "--n", "8", "--t", "2", "--n-f", &c["n_F"].to_string(), "--seed", "9"]));
    assert_eq!(v, direct);
    assert_eq!(v["lower_E"], c["pur_rho_E"]);

    // a sidecar that no longer matches its circuit is refused
    let text = std::fs::read_to_string(&circuit).unwrap();
    std::fs::write(&circuit, text.replacen("H ", "S ", 1)).unwrap();
    let o = run(&["purity-estimate", "--circuit", circuit.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));

    // T gates without a sidecar cannot be decomposed
    std::fs::remove_file(d.join("circuit.json")).unwrap();
    std::fs::write(&circuit, text).unwrap();
    let o = run(&["purity-estimate", "--circuit", circuit.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn swap_bench_table() {
    let d = scratch("swap");
    let table = d.join("t.csv");
    let v = json(&run(&[
        "swap-bench", "--seed", "3", "--reps", "50", "--n-list", "4,6", "--table-path", table.to_str().unwrap(),
    ]));
    assert_eq!(v["comparison"]["entries"].as_array().unwrap().len(), 2);
    let text = std::fs::read_to_string(&table).unwrap();
    assert!(text.starts_with("n,method,cost_metric,cost_value,error\n"));
    assert_eq!(text.lines().count(), 5);
}
