use nqac::encode;
use nqac_cli::{Cell, Table};
use std::path::PathBuf;
use std::process::{Command, Output};

fn nqac(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nqac"))
        .args(args)
        .env_remove("NQAC_JOBS")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("nqac-cli-test-{}-{name}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn critline_example_reaches_zero_temperature_limit() {
    let o = nqac(&[
        "critline", "--p", "2", "--q", "2", "--J", "1", "--lambda", "1.5", "--sweep", "T_over_C",
        "0.001", "3", "300",
    ]);
    assert!(o.status.success());
    let t = Table::from_csv(&stdout(&o)).unwrap();
    assert_eq!(t.rows.len(), 300);
    let g = t.numbers("gamma_c_over_C").unwrap();
    assert!((g[0].unwrap() - 5.0).abs() < 1e-6);
    assert!(t.header.iter().any(|h| h.starts_with("generated: ")));
    assert!(t.header.iter().any(|h| h.starts_with("resolved")));
}

#[test]
fn lambdac_example_single_row() {
    let o = nqac(&["lambdac", "--p", "4", "--q", "2", "--J", "1", "--T", "0"]);
    let t = Table::from_csv(&stdout(&o)).unwrap();
    assert_eq!(t.columns, vec!["lambda_c_over_C2"]);
    assert!((t.numbers("lambda_c_over_C2").unwrap()[0].unwrap() - 4.0).abs() < 0.05);
}

#[test]
fn fe_scan_example_has_two_equal_minima() {
    let o = nqac(&[
        "fe-scan",
        "--p",
        "4",
        "--q",
        "4",
        "--J",
        "1",
        "--lambda",
        "1",
        "--gamma_over_C3",
        "2.37",
        "--T_over_C4",
        "0.01",
        "--sweep",
        "m",
        "-1",
        "1",
        "2001",
    ]);
    let t = Table::from_csv(&stdout(&o)).unwrap();
    let m: Vec<f64> = t.numbers("m").unwrap().into_iter().flatten().collect();
    let f: Vec<f64> = t
        .numbers("F_normalized")
        .unwrap()
        .into_iter()
        .flatten()
        .collect();
    let minima: Vec<usize> = (1..f.len() - 1)
        .filter(|&i| f[i] < f[i - 1] && f[i] < f[i + 1])
        .collect();
    let ordered: Vec<&usize> = minima.iter().filter(|&&i| m[i] > 0.5).collect();
    let zero = minima.iter().find(|&&i| m[i].abs() < 1e-12).unwrap();
    assert_eq!(ordered.len(), 1);
    assert!((f[*ordered[0]] - f[*zero]).abs() < 1e-3);
}

#[test]
fn rows_are_lexicographic_with_first_sweep_outer() {
    let o = nqac(&[
        "gap-spinwave",
        "--lambda",
        "0.5",
        "--sweep",
        "C",
        "1",
        "2",
        "2",
        "--sweep",
        "gamma",
        "0",
        "1",
        "3",
    ]);
    let t = Table::from_csv(&stdout(&o)).unwrap();
    let c: Vec<f64> = t.numbers("C").unwrap().into_iter().flatten().collect();
    let g: Vec<f64> = t.numbers("gamma").unwrap().into_iter().flatten().collect();
    assert_eq!(c, vec![1.0, 1.0, 1.0, 2.0, 2.0, 2.0]);
    assert_eq!(g, vec![0.0, 0.5, 1.0, 0.0, 0.5, 1.0]);
}

#[test]
fn output_is_identical_across_worker_counts_and_runs() {
    let args = [
        "classify",
        "--p",
        "5",
        "--q",
        "2",
        "--sweep",
        "lambda_over_C3",
        "1.5",
        "3",
        "7",
    ];
    let bodies: Vec<String> = ["1", "3", "1"]
        .iter()
        .map(|j| {
            let mut a = args.to_vec();
            a.extend(["--jobs", j]);
            Table::without_timestamp(&stdout(&nqac(&a)))
        })
        .collect();
    assert_eq!(bodies[0], bodies[1]);
    assert_eq!(bodies[0], bodies[2]);
}

#[test]
fn every_command_round_trips_through_the_reader() {
    let dir = scratch("roundtrip");
    let cases: Vec<Vec<&str>> = vec![
        vec![
            "fe-scan", "--p", "3", "--lambda", "0.5", "--gamma", "1", "--m", "0.3",
        ],
        vec![
            "fe-scan", "--p", "4", "--lambda", "0.5", "--eta", "0.4", "--gamma", "1", "--m", "0.3",
        ],
        vec![
            "saddle",
            "--lambda",
            "1",
            "--gamma_over_C",
            "1",
            "--T_over_C",
            "0.1",
        ],
        vec!["saddle", "--lambda", "0.9", "--k_over_N", "0.09"],
        vec!["critline", "--lambda", "1", "--gamma_over_C", "2"],
        vec![
            "classify",
            "--p",
            "4",
            "--lambda_over_C2",
            "1",
            "--T_over_C4",
            "0.01",
        ],
        vec!["lambdac", "--p", "4", "--T_over_C4", "2"],
        vec!["barrier", "--p", "4", "--lambda", "1", "--gamma", "2.2"],
        vec!["gap-instanton", "--p", "4", "--lambda", "1", "--N", "10"],
        vec![
            "gap-instanton",
            "--p",
            "4",
            "--lambda",
            "1",
            "--gamma",
            "2",
            "--m0",
            "0",
            "--mc",
            "0.9",
        ],
        vec![
            "gap-spinwave",
            "--lambda",
            "0.5",
            "--gamma",
            "0.3",
            "--C",
            "2",
        ],
        vec![
            "meta-fm",
            "--lambda",
            "0.9",
            "--k_over_N",
            "0.3",
            "--N",
            "100",
        ],
        vec![
            "meta-fm",
            "--lambda",
            "0.9",
            "--k_over_N",
            "0.3",
            "--boundary",
            "gamma",
            "--hi",
            "3",
        ],
        vec!["meta-af", "--lambda", "0.5", "--N", "20", "--k", "2"],
        vec![
            "meta-af", "--lambda", "0.5", "--N", "20", "--k", "2", "--branch", "upper",
        ],
        vec![
            "occupancy",
            "--coupling",
            "antiferro",
            "--lambda",
            "1",
            "--T",
            "0.5",
            "--N",
            "10",
            "--C",
            "2",
        ],
        vec!["occupancy", "--lambda", "1", "--T", "0.5", "--N", "10"],
        vec!["hybrid-critline", "--p", "4", "--eta_over_C3", "0.5"],
        vec![
            "exact-spectrum",
            "--N",
            "3",
            "--C",
            "2",
            "--lambda",
            "1",
            "--form",
            "pairwise",
        ],
        vec![
            "exact-gap",
            "--N",
            "2",
            "--C",
            "3",
            "--lambda",
            "1",
            "--gamma",
            "0.5",
        ],
    ];
    for args in cases {
        let o = nqac(&args);
        assert!(
            o.status.success(),
            "{args:?}: {}",
            String::from_utf8_lossy(&o.stderr)
        );
        let text = stdout(&o);
        let t = Table::from_csv(&text).unwrap();
        assert!(!t.rows.is_empty(), "{args:?}");
        assert!(t.rows.iter().all(|r| r.len() == t.columns.len()));
        let path = dir.join("t.csv");
        std::fs::write(&path, &text).unwrap();
        let again = Table::from_csv(&std::fs::read_to_string(&path).unwrap()).unwrap();
        assert_eq!(again.to_csv().unwrap(), t.to_csv().unwrap());
    }
}

#[test]
fn exit_codes_and_messages() {
    let o = nqac(&["fe-scan", "--bogus", "1", "--m", "0"]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8(o.stderr).unwrap();
    for name in ["bogus", "lambda", "gamma", "k_over_N", "_over_C"] {
        assert!(err.contains(name), "{err}");
    }
    assert_eq!(
        nqac(&[
            "fe-scan",
            "--gamma",
            "1",
            "--gamma_over_C3",
            "1",
            "--m",
            "0"
        ])
        .status
        .code(),
        Some(2)
    );
    assert_eq!(
        nqac(&["fe-scan", "--J", "-1", "--m", "0"]).status.code(),
        Some(2)
    );
    assert_eq!(nqac(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(
        nqac(&["exact-spectrum", "--N", "5", "--C", "5"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(nqac(&["critline", "--p", "3"]).status.code(), Some(2));
    assert_eq!(
        nqac(&["critline", "--sweep", "T", "0", "1"]).status.code(),
        Some(2)
    );
    assert_eq!(
        nqac_cli::CliError::Core(nqac::Error::Numerical("x".into())).exit_code(),
        3
    );
}

#[test]
fn config_file_json_output_and_env_jobs() {
    let dir = scratch("config");
    let cfg = dir.join("run.conf");
    std::fs::write(
        &cfg,
        "# p=q=2 line\np = 2\nlambda = 1.5\nsweep = T_over_C 0.5 1.5 3\nformat = json\n",
    )
    .unwrap();
    let out = dir.join("out.json");
    let o = nqac(&[
        "critline",
        "--config",
        cfg.to_str().unwrap(),
        "--lambda",
        "0.5",
        "--output",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["rows"].as_array().unwrap().len(), 3);
    assert!(v["header"]
        .as_array()
        .unwrap()
        .iter()
        .any(|h| h == "input lambda = 0.5"));
    let with_env = Command::new(env!("CARGO_BIN_EXE_nqac"))
        .args(["critline", "--lambda", "1", "--T", "0.3"])
        .env("NQAC_JOBS", "2")
        .output()
        .unwrap();
    assert!(with_env.status.success());
    let bad_env = Command::new(env!("CARGO_BIN_EXE_nqac"))
        .args(["critline", "--lambda", "1", "--T", "0.3"])
        .env("NQAC_JOBS", "x")
        .output()
        .unwrap();
    assert_eq!(bad_env.status.code(), Some(2));
}

#[test]
fn exact_spectrum_from_instance_file() {
    let dir = scratch("instance");
    let logical_j = vec![
        vec![0.0, -1.0, 0.5],
        vec![-1.0, 0.0, 0.25],
        vec![0.5, 0.25, 0.0],
    ];
    let inst = encode(&[0.1, 0.0, -0.2], &logical_j, 2, 1.5).unwrap();
    let path = dir.join("inst.txt");
    std::fs::write(&path, inst.to_triplets()).unwrap();
    let o = nqac(&[
        "exact-spectrum",
        "--instance",
        path.to_str().unwrap(),
        "--form",
        "pairwise",
        "--subspace",
        "codewords",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let t = Table::from_csv(&stdout(&o)).unwrap();
    let total: f64 = t.numbers("degeneracy").unwrap().into_iter().flatten().sum();
    assert_eq!(total, 8.0);
    let e: Vec<f64> = t.numbers("energy").unwrap().into_iter().flatten().collect();
    assert!(e.windows(2).all(|w| w[0] < w[1]));
}

#[test]
fn antiferro_codeword_levels() {
    let o = nqac(&[
        "exact-spectrum",
        "--N",
        "4",
        "--C",
        "3",
        "--J",
        "1",
        "--lambda",
        "2",
        "--coupling",
        "antiferro",
        "--subspace",
        "codewords",
    ]);
    let t = Table::from_csv(&stdout(&o)).unwrap();
    let cells: Vec<Vec<Cell>> = t.rows.iter().map(|r| r[1..].to_vec()).collect();
    let expected = [(-72.0, 6.0), (-63.0, 8.0), (-36.0, 2.0)];
    assert_eq!(cells.len(), 3);
    for (row, (e, d)) in cells.iter().zip(expected) {
        assert_eq!(row[0].as_f64(), Some(e));
        assert_eq!(row[1].as_f64(), Some(d));
    }
}

#[test]
fn reproduce_writes_artifacts_and_manifest() {
    let dir = scratch("reproduce");
    let o = nqac(&[
        "reproduce",
        "fig7",
        "--output-dir",
        dir.to_str().unwrap(),
        "--jobs",
        "2",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("fig7_manifest.json")).unwrap())
            .unwrap();
    assert_eq!(manifest["figure"], "fig7");
    for f in manifest["artifacts"].as_array().unwrap() {
        let text = std::fs::read_to_string(dir.join(f.as_str().unwrap())).unwrap();
        assert!(!Table::from_csv(&text).unwrap().rows.is_empty());
    }
    assert!(manifest["landmarks"]
        .as_array()
        .unwrap()
        .iter()
        .all(|l| l["source"].is_string()));
    assert_eq!(
        nqac(&["reproduce", "fig99", "--output-dir", dir.to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );
}
