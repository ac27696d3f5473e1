//! End-to-end tests of the `varest` binary: subcommand grammar, exit
//! codes, output formats and the round-trip guarantees.

mod common;

use common::{data_file, run_cli, run_cli_env};

#[test]
fn no_arguments_is_a_usage_error() {
    let out = run_cli(&[]);
    assert_eq!(out.code, 1);

    let out = run_cli(&["compare"]);
    assert_eq!(out.code, 1);
    assert!(
        out.stderr.to_lowercase().contains("usage")
            || out.stderr.to_lowercase().contains("required"),
        "usage text expected, got: {}",
        out.stderr
    );
}

#[test]
fn help_exits_zero() {
    let out = run_cli(&["--help"]);
    assert_eq!(out.code, 0);
    assert!(out.stdout.contains("compare"));
    assert!(out.stdout.contains("simulate"));
}

#[test]
fn params_json_output_round_trips_into_compare() {
    let tiny = data_file("tiny.csv");
    let dumped = run_cli(&["params", "--data", tiny.to_str().unwrap(), "--out", "json"]);
    assert_eq!(dumped.code, 0, "{}", dumped.stderr);

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("tiny.json");
    std::fs::write(&path, &dumped.stdout).unwrap();

    // the dump is accepted back as a parameter file
    let reread = run_cli(&["params", "--params", path.to_str().unwrap(), "--out", "json"]);
    assert_eq!(reread.code, 0, "{}", reread.stderr);
    let a: serde_json::Value = serde_json::from_str(&dumped.stdout).unwrap();
    let b: serde_json::Value = serde_json::from_str(&reread.stdout).unwrap();
    assert_eq!(a, b, "params dump must be a fixed point of load-then-dump");

    // and it feeds compare
    let cmp = run_cli(&[
        "compare",
        "--params",
        path.to_str().unwrap(),
        "--n",
        "2",
        "--specs",
        "usual;ratio",
        "--out",
        "json",
    ]);
    assert_eq!(cmp.code, 0, "{}", cmp.stderr);
    let rows: serde_json::Value = serde_json::from_str(&cmp.stdout).unwrap();
    assert_eq!(rows.as_array().unwrap().len(), 2);
}

#[test]
fn params_csv_lists_derived_fields() {
    let apple = data_file("apple.json");
    let out = run_cli(&["params", "--params", apple.to_str().unwrap(), "--out", "csv"]);
    assert_eq!(out.code, 0);
    assert!(out.stdout.starts_with("key,value\n"));
    assert!(out.stdout.contains("beta2_y_star,15.5230"));
    assert!(out.stdout.contains("rho_star,0.836758"));
}

#[test]
fn compare_uses_the_sample_size_of_the_file() {
    let apple = data_file("apple.json");
    // no --n: falls back to the file's n = 20
    let out = run_cli(&[
        "compare",
        "--params",
        apple.to_str().unwrap(),
        "--specs",
        "usual",
        "--out",
        "csv",
    ]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    assert_eq!(
        out.stdout.lines().next().unwrap(),
        "estimator,mse,rel_eff,variant,breakdown"
    );
    assert!(out.stdout.contains("usual,11627.1,1.00000,printed,false"));
}

#[test]
fn compare_without_any_sample_size_is_a_usage_error() {
    let tiny = data_file("tiny.csv");
    let out = run_cli(&["compare", "--data", tiny.to_str().unwrap(), "--specs", "usual"]);
    assert_eq!(out.code, 1);
    assert!(out.stderr.contains("--n"));
}

#[test]
fn compare_isolates_failed_rows_on_stderr() {
    let apple = data_file("apple.json");
    let out = run_cli(&[
        "compare",
        "--params",
        apple.to_str().unwrap(),
        "--n",
        "20",
        "--specs",
        "usual;t:m=1,w=1,c=2,d=1,opt",
        "--out",
        "csv",
    ]);
    assert_eq!(out.code, 0, "one good row keeps the table alive");
    assert!(out.stdout.contains("usual"));
    assert!(!out.stdout.contains("t:m=1"), "failed row stays off stdout");
    assert!(out.stderr.contains("singular"), "diagnostic expected: {}", out.stderr);

    // every row failing is a data error
    let out = run_cli(&[
        "compare",
        "--params",
        apple.to_str().unwrap(),
        "--n",
        "20",
        "--specs",
        "t:m=1,w=1,c=2,d=1,opt",
    ]);
    assert_eq!(out.code, 2);
}

#[test]
fn compare_t_flag_appends_power_class_rows() {
    let apple = data_file("apple.json");
    let out = run_cli(&[
        "compare",
        "--params",
        apple.to_str().unwrap(),
        "--n",
        "20",
        "--specs",
        "usual",
        "--t",
        "-1,1,2,1",
        "--variant",
        "rederived",
        "--out",
        "json",
    ]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let rows: serde_json::Value = serde_json::from_str(&out.stdout).unwrap();
    let rows = rows.as_array().unwrap();
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[1]["estimator"], "t:m=-1,w=1,c=2,d=1,opt");
    assert_eq!(rows[1]["variant"], "rederived");
}

#[test]
fn unknown_estimator_token_is_a_usage_error() {
    let apple = data_file("apple.json");
    let out = run_cli(&[
        "compare",
        "--params",
        apple.to_str().unwrap(),
        "--n",
        "20",
        "--specs",
        "nonsense",
    ]);
    assert_eq!(out.code, 1);
}

#[test]
fn missing_files_exit_two() {
    let out = run_cli(&["compare", "--params", "/no/such/file.json", "--n", "20"]);
    assert_eq!(out.code, 2);
    assert!(out.stderr.contains("file not found"));

    let out = run_cli(&["params", "--data", "/no/such/pop.csv"]);
    assert_eq!(out.code, 2);
}

#[test]
fn enumerate_reproduces_the_exact_oracle() {
    let tiny = data_file("tiny.csv");
    let out = run_cli(&[
        "enumerate",
        "--data",
        tiny.to_str().unwrap(),
        "--n",
        "2",
        "--specs",
        "usual",
        "--out",
        "csv",
    ]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    assert!(
        out.stdout.contains("usual,0.500000,3,0"),
        "exact MSE row missing: {}",
        out.stdout
    );
}

#[test]
fn enumeration_cap_env_var_is_honored() {
    let tiny = data_file("tiny.csv");
    let out = run_cli_env(
        &[
            "enumerate",
            "--data",
            tiny.to_str().unwrap(),
            "--n",
            "2",
            "--specs",
            "usual",
        ],
        &[("VAREST_ENUM_CAP", "2")],
    );
    assert_eq!(out.code, 2, "C(3,2) = 3 exceeds the cap of 2");
    assert!(out.stderr.contains("exceeds the enumeration cap"));

    let out = run_cli_env(
        &[
            "enumerate",
            "--data",
            tiny.to_str().unwrap(),
            "--n",
            "2",
            "--specs",
            "usual",
        ],
        &[("VAREST_ENUM_CAP", "not-a-number")],
    );
    assert_eq!(out.code, 1);
}

#[test]
fn simulate_requires_a_seed() {
    let tiny = data_file("tiny.csv");
    let out = run_cli(&[
        "simulate",
        "--data",
        tiny.to_str().unwrap(),
        "--n",
        "2",
        "--reps",
        "100",
        "--specs",
        "usual",
    ]);
    assert_eq!(out.code, 1, "randomized commands must demand --seed");
    assert!(out.stderr.contains("--seed"));
}

#[test]
fn simulate_flags_small_designs_and_joins_theory() {
    let tiny = data_file("tiny.csv");
    let out = run_cli(&[
        "simulate",
        "--data",
        tiny.to_str().unwrap(),
        "--n",
        "2",
        "--reps",
        "20000",
        "--seed",
        "11",
        "--specs",
        "usual",
        "--out",
        "json",
    ]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let rows: serde_json::Value = serde_json::from_str(&out.stdout).unwrap();
    let row = &rows[0];
    // theory 1/12 versus an exact MSE of 1/2: far outside the asymptotic
    // regime, so the ratio sits near 6
    let ratio = row["ratio"].as_f64().unwrap();
    assert!((ratio - 6.0).abs() < 0.5, "ratio = {ratio}");
    let theory = row["theoretical_mse"].as_f64().unwrap();
    assert!((theory - 1.0 / 12.0).abs() < 1e-12, "theory = {theory}");
}

#[test]
fn search_ranks_and_recovers() {
    let apple = data_file("apple.json");
    let out = run_cli(&[
        "search",
        "--params",
        apple.to_str().unwrap(),
        "--m",
        "0:1:0.5",
        "--w",
        "-1,1",
        "--cd",
        "2,1",
        "--top",
        "0",
        "--out",
        "json",
    ]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let rows: serde_json::Value = serde_json::from_str(&out.stdout).unwrap();
    let rows = rows.as_array().unwrap();
    assert!(!rows.is_empty());
    // ranked: valid rows first, ascending mse, breakdowns last
    let mut seen_breakdown = false;
    let mut last_valid = f64::NEG_INFINITY;
    for row in rows {
        let breakdown = row["breakdown"].as_bool().unwrap();
        if breakdown {
            seen_breakdown = true;
        } else {
            assert!(!seen_breakdown, "valid row after a breakdown row");
            let mse = row["mse"].as_f64().unwrap();
            assert!(mse >= last_valid);
            last_valid = mse;
        }
    }

    // recovery of a value the grid attains exactly: point the search at
    // the top row's own coordinates and value
    let top = &rows[0];
    let target = format!("{}", top["mse"].as_f64().unwrap());
    let m = format!("{}", top["m"].as_f64().unwrap());
    let w = format!("{}", top["w"].as_f64().unwrap());
    let out = run_cli(&[
        "search",
        "--params",
        apple.to_str().unwrap(),
        "--m",
        &m,
        "--w",
        &w,
        "--cd",
        "2,1",
        "--target",
        &target,
        "--tolerance",
        "1e-9",
        "--out",
        "json",
    ]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let hits: serde_json::Value = serde_json::from_str(&out.stdout).unwrap();
    assert!(!hits.as_array().unwrap().is_empty(), "{}", out.stdout);
}

#[test]
fn search_accepts_symbolic_cd_tokens_and_grid_files() {
    let apple = data_file("apple.json");
    let dir = tempfile::tempdir().unwrap();
    let grid = dir.path().join("grid.json");
    std::fs::write(&grid, r#"{"m": [0.0, -1.0], "w": [1.0], "cd": [[2.0, 1.0]]}"#).unwrap();
    let out = run_cli(&[
        "search",
        "--params",
        apple.to_str().unwrap(),
        "--grid",
        grid.to_str().unwrap(),
        "--cd",
        "b2x,cx",
        "--out",
        "csv",
    ]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    // the --cd flag overrides the grid file's pairs
    assert!(out.stdout.contains("17.5160,1.65300"), "{}", out.stdout);
}

#[test]
fn constrained_search_keeps_weights_on_the_simplex() {
    let apple = data_file("apple.json");
    let out = run_cli(&[
        "search",
        "--params",
        apple.to_str().unwrap(),
        "--m",
        "0",
        "--w",
        "-1",
        "--cd",
        "2,1",
        "--constrained",
        "--out",
        "json",
        "--full-precision",
    ]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let rows: serde_json::Value = serde_json::from_str(&out.stdout).unwrap();
    let on_simplex = rows.as_array().unwrap().iter().any(|r| {
        let w1 = r["w1"].as_f64().unwrap();
        let w2 = r["w2"].as_f64().unwrap();
        (w1 + w2 - 1.0).abs() < 1e-12
    });
    assert!(on_simplex, "{}", out.stdout);
}

#[test]
fn markdown_compare_carries_the_regression_footnote() {
    let apple = data_file("apple.json");
    let out = run_cli(&["compare", "--params", apple.to_str().unwrap(), "--n", "20"]);
    assert_eq!(out.code, 0);
    assert!(out.stdout.contains("| estimator"));
    assert!(
        out.stdout.contains("regression optimum"),
        "footnote missing: {}",
        out.stdout
    );
}
