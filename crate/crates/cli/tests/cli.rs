//! End-to-end checks of the binary: exit codes, output schemas, manifest
//! contents, round-tripping, and flag overrides.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_dirtail"))
}

fn workdir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("dirtail-cli-{tag}-{}", std::process::id()));
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn run_config(tag: &str, command: &str, config: &str, extra: &[&str]) -> (Output, PathBuf) {
    let dir = workdir(tag);
    let config_path = dir.join("config.json");
    fs::write(&config_path, config).unwrap();
    let output = bin()
        .arg(command)
        .arg("--config")
        .arg(&config_path)
        .args(extra)
        .output()
        .unwrap();
    (output, dir)
}

fn read_csv(path: &Path) -> Vec<Vec<String>> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn kinf_sweep_is_monotone_and_round_trips() {
    let (output, dir) = run_config(
        "kinf",
        "kinf",
        r#"{ "command": "kinf", "p": [0.5, 0.5], "f": [0.0, 1.0],
             "mu": [0.55, 0.65, 0.75], "out": "OUT" }"#
            .replace(
                "OUT",
                &workdir("kinf-out").join("k.csv").display().to_string(),
            )
            .as_str(),
        &[],
    );
    assert!(output.status.success());
    drop(dir);
}

#[test]
fn kinf_outputs_expected_rows() {
    let dir = workdir("kinf-rows");
    let out = dir.join("k.csv");
    let config = format!(
        r#"{{ "command": "kinf", "p": [0.5, 0.5], "f": [0.0, 1.0],
              "mu": [0.55, 0.65, 0.75], "out": "{}" }}"#,
        out.display()
    );
    let config_path = dir.join("config.json");
    fs::write(&config_path, config).unwrap();
    let status = bin()
        .arg("kinf")
        .arg("--config")
        .arg(&config_path)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));

    let rows = read_csv(&out);
    assert_eq!(
        rows[0],
        vec![
            "mu",
            "kinf",
            "lambda_star",
            "sigma_sq",
            "a_transform",
            "at_boundary"
        ]
    );
    assert_eq!(rows.len(), 4);
    let kinfs: Vec<f64> = rows[1..].iter().map(|r| r[1].parse().unwrap()).collect();
    assert!(
        kinfs.windows(2).all(|w| w[0] < w[1]),
        "kinf not increasing: {kinfs:?}"
    );
    let last: f64 = kinfs[2];
    assert!((last - 0.143841).abs() < 1e-6);
    // Manifest sits next to the output.
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.join("k.csv.manifest.json")).unwrap())
            .unwrap();
    assert_eq!(manifest["command"], "kinf");
    assert_eq!(manifest["seed"], 0);
    assert!(manifest["version"].is_string());
}

#[test]
fn kinf_at_mean_row_is_zero() {
    let dir = workdir("kinf-zero");
    let out = dir.join("k.csv");
    let config = format!(
        r#"{{ "command": "kinf", "p": [0.5, 0.5], "f": [0.0, 1.0], "mu": [0.5], "out": "{}" }}"#,
        out.display()
    );
    let config_path = dir.join("config.json");
    fs::write(&config_path, config).unwrap();
    assert!(bin()
        .arg("kinf")
        .arg("--config")
        .arg(&config_path)
        .status()
        .unwrap()
        .success());
    let rows = read_csv(&out);
    let kinf: f64 = rows[1][1].parse().unwrap();
    let lambda: f64 = rows[1][2].parse().unwrap();
    let a: f64 = rows[1][4].parse().unwrap();
    assert_eq!(kinf, 0.0);
    assert_eq!(lambda, 0.0);
    assert_eq!(a, 0.0);
}

#[test]
fn malformed_config_exits_2() {
    let (output, _dir) = run_config(
        "bad-field",
        "kinf",
        r#"{ "command": "kinf", "p": [0.5, 0.5], "f": [0.0, 1.0], "mu": [0.5], "bogus": true }"#,
        &[],
    );
    assert_eq!(output.status.code(), Some(2));

    let (output, _dir) = run_config("bad-json", "kinf", "{ not json", &[]);
    assert_eq!(output.status.code(), Some(2));

    let (output, _dir) = run_config(
        "bad-domain",
        "kinf",
        r#"{ "command": "kinf", "p": [0.5, 0.5], "f": [0.0, 1.0], "mu": [1.5], "out": "/tmp/x.csv" }"#,
        &[],
    );
    assert_eq!(output.status.code(), Some(2));

    let (output, _dir) = run_config(
        "wrong-command",
        "density",
        r#"{ "command": "kinf", "p": [0.5, 0.5], "f": [0.0, 1.0], "mu": [0.5] }"#,
        &[],
    );
    assert_eq!(output.status.code(), Some(2));

    let missing = bin()
        .arg("kinf")
        .arg("--config")
        .arg("/nonexistent/config.json")
        .output()
        .unwrap();
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn missing_out_is_a_config_error() {
    let (output, _dir) = run_config(
        "no-out",
        "kinf",
        r#"{ "command": "kinf", "p": [0.5, 0.5], "f": [0.0, 1.0], "mu": [0.5] }"#,
        &[],
    );
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn density_json_format_round_trips() {
    let dir = workdir("density");
    let out = dir.join("d.json");
    let config = format!(
        r#"{{ "command": "density", "alpha": [2.0, 3.0], "f": [0.0, 1.0],
              "u": [0.25, 0.5], "format": "json", "out": "{}" }}"#,
        out.display()
    );
    let config_path = dir.join("config.json");
    fs::write(&config_path, config).unwrap();
    assert!(bin()
        .arg("density")
        .arg("--config")
        .arg(&config_path)
        .status()
        .unwrap()
        .success());
    let rows: serde_json::Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    // Beta(3,2) pdf at 0.5 is 1.5.
    assert!((rows[1]["density"].as_f64().unwrap() - 1.5).abs() < 1e-7);
    assert_eq!(rows[1]["u"].as_f64().unwrap(), 0.5);
}

#[test]
fn tail_rows_carry_the_sandwich() {
    let dir = workdir("tail");
    let out = dir.join("t.csv");
    let config = format!(
        r#"{{ "command": "tail", "alpha": [1200.0, 1200.0], "f": [0.0, 1.0],
              "mu": [0.53], "epsilon": 0.5, "n_samples": 100000, "seed": 5, "out": "{}" }}"#,
        out.display()
    );
    let config_path = dir.join("config.json");
    fs::write(&config_path, config).unwrap();
    assert!(bin()
        .arg("tail")
        .arg("--config")
        .arg(&config_path)
        .status()
        .unwrap()
        .success());
    let rows = read_csv(&out);
    assert_eq!(
        rows[0],
        vec![
            "mu",
            "lower",
            "mc_estimate",
            "mc_stderr",
            "upper",
            "chernoff",
            "condition_met"
        ]
    );
    let lower: f64 = rows[1][1].parse().unwrap();
    let mc: f64 = rows[1][2].parse().unwrap();
    let upper: f64 = rows[1][4].parse().unwrap();
    assert!(
        lower <= mc && mc <= upper,
        "sandwich column violated: {lower} {mc} {upper}"
    );
    assert_eq!(rows[1][6], "true");
}

#[test]
fn dp_bound_kinds_and_errors() {
    let dir = workdir("dp");
    let out = dir.join("dp.csv");
    let config = format!(
        r#"{{ "command": "dp-bound", "kind": "hoeffding", "n": 1000, "gamma": 291.0,
              "epsilon": 1.0, "delta": [0.1, 0.05], "out": "{}" }}"#,
        out.display()
    );
    let config_path = dir.join("config.json");
    fs::write(&config_path, config).unwrap();
    assert!(bin()
        .arg("dp-bound")
        .arg("--config")
        .arg(&config_path)
        .status()
        .unwrap()
        .success());
    let rows = read_csv(&out);
    let t: f64 = rows[1][1].parse().unwrap();
    assert!((t - 0.2148).abs() < 1e-4);
    assert_eq!(rows[1][2], "true");

    // Bernstein without a variance is a config error.
    let (output, _dir) = run_config(
        "dp-bad",
        "dp-bound",
        r#"{ "command": "dp-bound", "kind": "bernstein", "n": 1000, "gamma": 291.0,
             "epsilon": 1.0, "delta": [0.1], "out": "/tmp/dp.csv" }"#,
        &[],
    );
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn bandit_outputs_traces_and_aggregate() {
    let dir = workdir("bandit");
    let prefix = dir.join("exp");
    let config = format!(
        r#"{{ "command": "bandit", "algorithm": "mts",
              "arms": [ {{"kind": "multinomial", "probs": [0.5, 0.5]}},
                        {{"kind": "multinomial", "probs": [0.6, 0.4]}} ],
              "horizon": 300, "replications": 2, "seed": 9, "out": "{}" }}"#,
        prefix.display()
    );
    let config_path = dir.join("config.json");
    fs::write(&config_path, config).unwrap();
    assert!(bin()
        .arg("bandit")
        .arg("--config")
        .arg(&config_path)
        .status()
        .unwrap()
        .success());

    let trace = read_csv(&PathBuf::from(format!(
        "{}.rep0000.trace.csv",
        prefix.display()
    )));
    assert_eq!(trace[0], vec!["t", "arm", "cum_regret"]);
    assert_eq!(trace.len(), 301);
    let aggregate = read_csv(&PathBuf::from(format!(
        "{}.aggregate.csv",
        prefix.display()
    )));
    assert_eq!(
        aggregate[0],
        vec!["t", "mean_regret", "std_error", "lower_line"]
    );
    let last = aggregate.last().unwrap();
    assert_eq!(last[0], "300");
    assert!(last[3].parse::<f64>().unwrap() > 0.0);
    assert!(PathBuf::from(format!("{}.manifest.json", prefix.display())).exists());
}

#[test]
fn bandit_single_arm_regret_is_zero() {
    let dir = workdir("bandit-solo");
    let prefix = dir.join("solo");
    let config = format!(
        r#"{{ "command": "bandit", "algorithm": "mts",
              "arms": [ {{"kind": "multinomial", "probs": [0.3, 0.7]}} ],
              "horizon": 200, "replications": 2, "seed": 1, "out": "{}" }}"#,
        prefix.display()
    );
    let config_path = dir.join("config.json");
    fs::write(&config_path, config).unwrap();
    assert!(bin()
        .arg("bandit")
        .arg("--config")
        .arg(&config_path)
        .status()
        .unwrap()
        .success());
    let aggregate = read_csv(&PathBuf::from(format!(
        "{}.aggregate.csv",
        prefix.display()
    )));
    for row in &aggregate[1..] {
        assert_eq!(row[1].parse::<f64>().unwrap(), 0.0);
    }
}

#[test]
fn seed_flag_overrides_config() {
    let dir = workdir("override");
    let out_a = dir.join("a.csv");
    let out_b = dir.join("b.csv");
    let out_c = dir.join("c.csv");
    let config = |out: &Path| {
        format!(
            r#"{{ "command": "tail", "alpha": [2.0, 3.0], "f": [0.0, 1.0], "mu": [0.6],
                  "epsilon": 0.5, "n_samples": 20000, "seed": 1, "out": "{}" }}"#,
            out.display()
        )
    };
    for (out, extra) in [
        (&out_a, vec![]),
        (&out_b, vec!["--seed", "2"]),
        (&out_c, vec!["--seed", "2"]),
    ] {
        let config_path = dir.join(format!(
            "{}.json",
            out.file_stem().unwrap().to_string_lossy()
        ));
        fs::write(&config_path, config(out)).unwrap();
        assert!(bin()
            .arg("tail")
            .arg("--config")
            .arg(&config_path)
            .args(&extra)
            .status()
            .unwrap()
            .success());
    }
    let a = fs::read_to_string(&out_a).unwrap();
    let b = fs::read_to_string(&out_b).unwrap();
    let c = fs::read_to_string(&out_c).unwrap();
    assert_ne!(a, b, "different seeds must change the MC column");
    assert_eq!(b, c, "same seed must reproduce");
    // The manifest records the effective seed.
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.join("b.csv.manifest.json")).unwrap())
            .unwrap();
    assert_eq!(manifest["seed"], 2);
    assert_eq!(manifest["config"]["seed"], 2);
}

#[test]
fn bandit_prior_selection() {
    let dir = workdir("prior");
    let prefix = dir.join("p");
    let config = format!(
        r#"{{ "command": "bandit", "algorithm": "mts", "prior": "concentrated",
              "arms": [ {{"kind": "multinomial", "probs": [0.4, 0.2, 0.4]}} ],
              "horizon": 100, "replications": 1, "seed": 2, "out": "{}" }}"#,
        prefix.display()
    );
    let config_path = dir.join("config.json");
    fs::write(&config_path, config).unwrap();
    assert!(bin().arg("bandit").arg("--config").arg(&config_path).status().unwrap().success());

    let (output, _dir) = run_config(
        "prior-bad",
        "bandit",
        r#"{ "command": "bandit", "algorithm": "mts", "prior": "bogus",
             "arms": [ {"kind": "multinomial", "probs": [0.5, 0.5]} ],
             "horizon": 10, "replications": 1, "out": "/tmp/p" }"#,
        &[],
    );
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn rmts_requires_grid_m() {
    let (output, _dir) = run_config(
        "rmts-bad",
        "bandit",
        r#"{ "command": "bandit", "algorithm": "rmts",
             "arms": [ {"kind": "beta", "alpha": 2.0, "beta": 2.0} ],
             "horizon": 100, "replications": 1, "out": "/tmp/r" }"#,
        &[],
    );
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn rmts_and_doubling_run() {
    let dir = workdir("rmts");
    let prefix = dir.join("r");
    let config = format!(
        r#"{{ "command": "bandit", "algorithm": "rmts",
              "arms": [ {{"kind": "beta", "alpha": 3.0, "beta": 2.0}},
                        {{"kind": "piecewise-uniform", "breaks": [0.0, 0.5, 1.0], "weights": [0.7, 0.3]}} ],
              "horizon": 300, "grid_m": 8, "replications": 2, "seed": 3, "out": "{}" }}"#,
        prefix.display()
    );
    let config_path = dir.join("config.json");
    fs::write(&config_path, config).unwrap();
    assert!(bin()
        .arg("bandit")
        .arg("--config")
        .arg(&config_path)
        .status()
        .unwrap()
        .success());

    let prefix2 = dir.join("d");
    let config = format!(
        r#"{{ "command": "bandit", "algorithm": "rmts-doubling",
              "arms": [ {{"kind": "discrete", "values": [0.0, 1.0], "probs": [0.5, 0.5]}},
                        {{"kind": "discrete", "values": [0.0, 1.0], "probs": [0.6, 0.4]}} ],
              "horizon": 256, "replications": 2, "seed": 4, "out": "{}" }}"#,
        prefix2.display()
    );
    let config_path = dir.join("config2.json");
    fs::write(&config_path, config).unwrap();
    assert!(bin()
        .arg("bandit")
        .arg("--config")
        .arg(&config_path)
        .status()
        .unwrap()
        .success());
    let aggregate = read_csv(&PathBuf::from(format!(
        "{}.aggregate.csv",
        prefix2.display()
    )));
    // Discrete two-point arms have a computable lower-bound line.
    assert!(aggregate.last().unwrap()[3].parse::<f64>().unwrap() > 0.0);
}
