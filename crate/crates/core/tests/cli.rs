use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn qaxioms(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qaxioms")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

struct Fixtures {
    dir: tempfile::TempDir,
}

impl Fixtures {
    fn new() -> Self {
        Fixtures {
            dir: tempfile::tempdir().unwrap(),
        }
    }

    fn file(&self, name: &str, body: &str) -> String {
        let p = self.dir.path().join(name);
        fs::write(&p, body).unwrap();
        p.to_string_lossy().into_owned()
    }

    fn matrix(&self, name: &str, n: usize, real: &[f64]) -> String {
        let entries: Vec<String> = real.iter().map(|x| format!("[{x},0]")).collect();
        self.file(
            name,
            &format!(r#"{{"rows":{n},"cols":{n},"entries":[{}]}}"#, entries.join(",")),
        )
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }
}

const HADAMARD: &str = r#"{"rows":2,"cols":2,"entries":[[0.7071067811865476,0],[0.7071067811865476,0],[0.7071067811865476,0],[-0.7071067811865476,0]]}"#;

#[test]
fn classify_verdicts_and_exit_codes() {
    let fx = Fixtures::new();
    let cases = [
        (fx.matrix("id.json", 2, &[1.0, 0.0, 0.0, 1.0]), "UNITARY", 0),
        (
            fx.matrix("half.json", 2, &[1.0, 0.0, 0.0, 0.5]),
            "NON-UNITARY (B′ only)",
            0,
        ),
        (
            fx.matrix("two.json", 2, &[2.0, 0.0, 0.0, 2.0]),
            "PROPORTIONAL-UNITARY",
            0,
        ),
        (fx.matrix("sing.json", 2, &[1.0, 0.0, 0.0, 0.0]), "SINGULAR", 2),
    ];
    for (path, verdict, code) in &cases {
        let out = qaxioms(&["classify", path]);
        assert_eq!(out.status.code(), Some(*code), "{path}");
        let text = stdout(&out);
        assert!(text.lines().next().unwrap().starts_with(verdict), "{text}");
        assert!(text.contains("||U^dagger U - I||_F"));
    }
    let out = qaxioms(&["--format", "json", "classify", &cases[2].0]);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["class"]["tag"], "ProportionalUnitary");
    assert_eq!(v["class"]["scale"], serde_json::json!([2.0, 0.0]));
}

#[test]
fn invalid_input_exits_one() {
    let fx = Fixtures::new();
    let garbage = fx.file("garbage.json", "{not json");
    let ragged = fx.file("ragged.json", r#"{"rows":2,"cols":2,"entries":[[1,0]]}"#);
    let missing = fx.path("missing.json").to_string_lossy().into_owned();
    for args in [
        vec!["classify", garbage.as_str()],
        vec!["classify", ragged.as_str()],
        vec!["classify", missing.as_str()],
        vec!["bell-signal", "--epsilon", "0"],
        vec!["bell-signal", "--epsilon", "1"],
        vec!["bell-signal", "--bit", "2"],
        vec!["bell-signal", "--trials", "0"],
        vec!["sweep", "--epsilons", "0.1,1.5"],
        vec!["no-comm-check", "--unitaries", "0"],
        vec!["frobnicate"],
        vec![],
    ] {
        let out = qaxioms(&args);
        assert_eq!(out.status.code(), Some(1), "{args:?}");
        assert!(!out.stderr.is_empty(), "{args:?}");
    }
}

#[test]
fn non_unitary_operator_rejected_by_standard_engine() {
    let fx = Fixtures::new();
    let half = fx.matrix("half.json", 2, &[1.0, 0.0, 0.0, 0.5]);
    let state = fx.file("s.json", r#"{"representation":"unit","dim":2,"entries":[[1,0],[0,0]]}"#);
    let out = qaxioms(&["evolve", "--operator", &half, "--state", &state]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unitary"));
}

#[test]
fn unrepresentable_norm_is_a_numeric_contract_violation() {
    let fx = Fixtures::new();
    let z = fx.matrix("z.json", 2, &[1.0, 0.0, 0.0, -1.0]);
    let tiny = fx.file(
        "tiny.json",
        r#"{"representation":"raw","dim":2,"entries":[[1e-170,0],[1e-170,0]]}"#,
    );
    let out = qaxioms(&["measure", "--state", &tiny, "--observable", &z]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn evolve_engines() {
    let fx = Fixtures::new();
    let h = fx.file("h.json", HADAMARD);
    let gate = fx.matrix("gate.json", 2, &[1.0, 0.0, 0.0, 0.1]);
    let unit = fx.file("u.json", r#"{"representation":"unit","dim":2,"entries":[[1,0],[0,0]]}"#);
    let raw = fx.file("r.json", r#"{"representation":"raw","dim":2,"entries":[[1,0],[1,0]]}"#);

    let out = qaxioms(&["--format", "json", "evolve", "--operator", &h, "--state", &unit]);
    assert!(out.status.success());
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["state"]["representation"], "unit");
    let re = v["state"]["entries"][1][0].as_f64().unwrap();
    assert!((re - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);

    let out = qaxioms(&[
        "--format",
        "json",
        "evolve",
        "--operator",
        &gate,
        "--state",
        &raw,
        "--engine",
        "linear-b",
    ]);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["state"]["representation"], "raw");
    assert_eq!(v["state"]["entries"], serde_json::json!([[1.0, 0.0], [0.1, 0.0]]));

    let out = qaxioms(&[
        "--format",
        "json",
        "evolve",
        "--operator",
        &gate,
        "--state",
        &raw,
        "--engine",
        "manual-norm-a",
    ]);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    let e1 = v["state"]["entries"][1][0].as_f64().unwrap();
    assert!((e1 - 0.1 / 1.01f64.sqrt()).abs() < 1e-15);
}

#[test]
fn measure_prints_both_formulations() {
    let fx = Fixtures::new();
    let z = fx.matrix("z.json", 2, &[1.0, 0.0, 0.0, -1.0]);
    let s = fx.file("s.json", r#"{"representation":"raw","dim":2,"entries":[[3,0],[0,4]]}"#);
    let out = qaxioms(&["measure", "--state", &s, "--observable", &z, "--seed", "5"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("P_A") && text.contains("P_B"), "{text}");
    assert!(text.contains("sampled outcome"));

    let out = qaxioms(&["--format", "tsv", "measure", "--state", &s, "--observable", &z]);
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("eigenvalue\tp_a\tp_b"));
    let row: Vec<f64> = lines.next().unwrap().split('\t').map(|x| x.parse().unwrap()).collect();
    assert_eq!(row[0], -1.0);
    assert!((row[1] - 0.64).abs() < 1e-15 && (row[2] - 0.64).abs() < 1e-15);
}

#[test]
fn bell_signal_reports_and_is_deterministic() {
    let args = [
        "--format",
        "json",
        "bell-signal",
        "--epsilon",
        "0.1",
        "--bit",
        "0",
        "--trials",
        "1000000",
        "--seed",
        "42",
    ];
    let a = qaxioms(&args);
    let b = qaxioms(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let v: Value = serde_json::from_slice(&a.stdout).unwrap();
    let p0 = v["analytic_bob_distribution"]["outcomes"][0]["probability"]
        .as_f64()
        .unwrap();
    assert!((p0 - 1.0 / 1.01).abs() <= 1e-14);
    assert!(p0.to_string().starts_with("0.990099"));
    let counts = v["empirical_counts"].as_array().unwrap();
    assert_eq!(counts[0].as_u64().unwrap() + counts[1].as_u64().unwrap(), 1_000_000);

    let human = stdout(&qaxioms(&["bell-signal", "--trials", "1000"]));
    assert!(human.contains("P_B (raw)") && human.contains("P_A (manual norm)") && human.contains("count"));
    assert!(
        human.contains("diag(1, 0.010000000000000002)") || human.contains("diag(1, 0.01)"),
        "{human}"
    );
}

#[test]
fn out_flag_writes_file() {
    let fx = Fixtures::new();
    let target = fx.path("report.tsv");
    let out = qaxioms(&[
        "--format",
        "tsv",
        "--out",
        target.to_str().unwrap(),
        "no-comm-check",
        "--unitaries",
        "5",
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let text = fs::read_to_string(&target).unwrap();
    assert!(text.starts_with("key\tvalue\n"));
    assert!(text.contains("max_marginal_deviation"));
}

#[test]
fn theorem_check_verdicts() {
    let fx = Fixtures::new();
    let h = fx.file("h.json", HADAMARD);
    let half = fx.matrix("half.json", 2, &[1.0, 0.0, 0.0, 0.5]);
    let two = fx.matrix("two.json", 2, &[2.0, 0.0, 0.0, 2.0]);
    let sing = fx.matrix("sing.json", 2, &[1.0, 0.0, 0.0, 0.0]);

    let out = qaxioms(&["theorem-check", &h]);
    assert!(out.status.success());
    assert!(stdout(&out).starts_with("admissible under A′ and B′"));

    let out = qaxioms(&["theorem-check", &half, "--samples", "200", "--seed", "1"]);
    let text = stdout(&out);
    assert!(text.starts_with("admissible under B′ only"), "{text}");
    assert!(text.contains("witness: (0, 1)"), "{text}");

    let out = qaxioms(&["theorem-check", &two]);
    assert!(stdout(&out).starts_with("proportional-unitary: physically standard under manual normalization"));

    let out = qaxioms(&["theorem-check", &sing]);
    assert_eq!(out.status.code(), Some(2));

    let a = qaxioms(&["--format", "json", "theorem-check", &half, "--seed", "9"]);
    let b = qaxioms(&["--format", "json", "theorem-check", &half, "--seed", "9"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn sweep_emits_tsv() {
    let out = qaxioms(&[
        "--format",
        "tsv",
        "sweep",
        "--epsilons",
        "0.1,0.5",
        "--trials",
        "2000",
        "--seed",
        "3",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 3);
    let header: Vec<&str> = lines[0].split('\t').collect();
    assert_eq!(header[0], "epsilon");
    let second: Vec<&str> = lines[2].split('\t').collect();
    assert_eq!(second[0], "0.5");
    assert!(
        text == stdout(&qaxioms(&[
            "--format",
            "tsv",
            "sweep",
            "--epsilons",
            "0.1,0.5",
            "--trials",
            "2000",
            "--seed",
            "3"
        ]))
    );
}

#[test]
fn json_schemas_round_trip_through_library_types() {
    let out = qaxioms(&["--format", "json", "bell-signal", "--trials", "100"]);
    let report: qaxioms::signaling::SignalingReport = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report.config.n_trials, 100);
    assert!(!report.reduced_density_unnormalized.is_normalized());
}
