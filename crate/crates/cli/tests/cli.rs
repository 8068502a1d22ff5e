use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_torus-transport"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn experiment_csv_is_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for out in [&a, &b] {
        let o = run(&[
            "experiment",
            "sandwich",
            "--count",
            "12",
            "--degree",
            "16",
            "--seed",
            "7",
            "--out",
            out.to_str().unwrap(),
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let (a, b) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(a, b);
    let text = String::from_utf8(a).unwrap();
    assert!(text.starts_with("# schema=1\n"));
    assert!(text.contains("seed=7"));
}

#[test]
fn experiment_json_and_describe() {
    let o = run(&[
        "experiment",
        "eigen",
        "--n",
        "1..8",
        "--p",
        "1",
        "--format",
        "json",
    ]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["schema"], 1);
    assert_eq!(v["table"]["rows"].as_array().unwrap().len(), 8);
    let slope = v["fits"][0]["fit"]["slope"].as_f64().unwrap();
    assert!((slope + 1.0).abs() < 0.01);

    let o = run(&["experiment", "--describe"]);
    assert!(o.status.success());
    let text = stdout(&o);
    for id in [
        "quadres",
        "kronecker",
        "uncertainty",
        "eigen",
        "heat",
        "littlewood",
        "sandwich",
        "twostep",
    ] {
        assert!(
            text.contains(&format!("{id}: ")),
            "{id} missing from manifest"
        );
    }
    let o = run(&["experiment", "quadres", "--describe", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v[0]["laws"][0]["slope_min"], -0.55);
}

#[test]
fn validation_failures_exit_with_code_two() {
    for args in [
        vec!["experiment", "nope"],
        vec!["experiment", "eigen", "--n", "5..2"],
        vec!["experiment", "quadres", "--primes", "91"],
        vec!["experiment", "eigen", "--set", "bogus=1"],
        vec!["experiment", "kronecker", "--format", "xml"],
        vec!["ot", "--mu", "/nonexistent.csv"],
    ] {
        let o = run(&args);
        assert_eq!(
            o.status.code(),
            Some(2),
            "{args:?}: {}",
            String::from_utf8_lossy(&o.stderr)
        );
        assert!(!o.stderr.is_empty());
    }
}

#[test]
fn ot_matches_oracle_and_writes_plan() {
    let dir = tempfile::tempdir().unwrap();
    let mu = write(dir.path(), "mu.csv", "location,weight\n0.1,0.5\n0.6,0.5\n");
    let nu = write(dir.path(), "nu.csv", "# target\n0.3,0.25\n0.9,0.75\n");
    let plan = dir.path().join("plan.csv");
    let o = run(&[
        "ot",
        "--mu",
        &mu,
        "--nu",
        &nu,
        "--p",
        "2",
        "--oracle",
        "--plan-out",
        plan.to_str().unwrap(),
        "--format",
        "json",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let (cost, oracle) = (
        v["cost"].as_f64().unwrap(),
        v["oracle_cost"].as_f64().unwrap(),
    );
    assert!((cost - oracle).abs() < 1e-9 * oracle);
    assert!(std::fs::read_to_string(&plan).unwrap().lines().count() >= 3);

    // a single atom against uniform on the circle costs 1/4 in W1
    let one = write(dir.path(), "one.csv", "0.5,1\n");
    let o = run(&["ot", "--mu", &one]);
    let text = stdout(&o);
    let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(row[0], "circle");
    assert!((row[2].parse::<f64>().unwrap() - 0.25).abs() < 1e-12);

    let o = run(&["ot", "--mu", &one, "--domain", "interval", "--p", "2"]);
    let row = stdout(&o).lines().nth(1).unwrap().to_string();
    let cost: f64 = row.split(',').nth(2).unwrap().parse().unwrap();
    assert!((cost - (1.0f64 / 12.0).sqrt()).abs() < 1e-12);
}

#[test]
fn bounds_and_fit_subcommands() {
    let dir = tempfile::tempdir().unwrap();
    let atoms = write(
        dir.path(),
        "atoms.csv",
        "0.0,0.25\n0.25,0.25\n0.5,0.25\n0.75,0.25\n",
    );
    let o = run(&["bounds", "--atoms", &atoms, "--n", "8", "--format", "json"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    // the 4-point lattice has |c_k| = 1 only at multiples of 4
    let et = v["entries"]["erdos_turan"].as_f64().unwrap();
    assert!((et - (1.0 / 8.0 + 1.0 / 4.0 + 1.0 / 8.0)).abs() < 1e-12);

    let samples: String = (0..64)
        .map(|j| {
            format!(
                "{}\n",
                1.0 + (std::f64::consts::TAU * j as f64 / 64.0).cos()
            )
        })
        .collect();
    let density = write(dir.path(), "density.csv", &samples);
    let o = run(&["bounds", "--density", &density, "--n", "4"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).starts_with("K,n,truncated,"));

    let report = dir.path().join("eigen.csv");
    assert!(run(&[
        "experiment",
        "eigen",
        "--n",
        "1..16",
        "--p",
        "2",
        "--out",
        report.to_str().unwrap()
    ])
    .status
    .success());
    let o = run(&[
        "fit",
        "--input",
        report.to_str().unwrap(),
        "--x",
        "n",
        "--y",
        "cost",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    let slope: f64 = text
        .lines()
        .nth(1)
        .unwrap()
        .split(',')
        .nth(4)
        .unwrap()
        .parse()
        .unwrap();
    assert!((slope + 1.0).abs() < 0.01);
    let o = run(&[
        "fit",
        "--input",
        report.to_str().unwrap(),
        "--x",
        "n",
        "--y",
        "missing",
    ]);
    assert_eq!(o.status.code(), Some(2));
}
