use std::process::{Command, Output};

fn condeng(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_condeng")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn kv(args: &[&str]) -> toml::Table {
    let o = condeng(args);
    assert!(o.status.success(), "{}", stderr(&o));
    toml::from_str(&stdout(&o)).unwrap()
}

fn f(t: &toml::Table, key: &str) -> f64 {
    t[key].as_float().unwrap()
}

fn assert_single_line_error(o: &Output, code: i32, kind: &str) {
    assert_eq!(o.status.code(), Some(code), "{}", stderr(o));
    let err = stderr(o);
    assert_eq!(err.lines().count(), 1, "{err}");
    assert!(err.starts_with(&format!("error: code={code} kind={kind} message=")), "{err}");
}

#[test]
fn output_is_deterministic() {
    let args = ["multiport-check", "--draws", "40", "--seed", "7", "--format", "csv"];
    let a = condeng(&args);
    let b = condeng(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);

    let dir = tempfile::tempdir().unwrap();
    let p1 = dir.path().join("a.csv");
    let p2 = dir.path().join("b.csv");
    for p in [&p1, &p2] {
        let o = condeng(&["qubit-sweep", "--qmin", "0.1", "--qmax", "10", "--steps", "9", "--out", p.to_str().unwrap()]);
        assert!(o.status.success());
    }
    assert_eq!(std::fs::read(&p1).unwrap(), std::fs::read(&p2).unwrap());
}

#[test]
fn presets_reproduce_trip_counts() {
    let a = kv(&["fock-run", "--preset", "fig4a"]);
    assert_eq!(a["trips"].as_integer(), Some(538));
    let d = kv(&["fock-run", "--preset", "fig4d"]);
    assert_eq!(d["trips"].as_integer(), Some(788));
    assert!((f(&d, "q") + 0.527).abs() < 0.01);
}

#[test]
fn fock_run_csv_file_with_summary() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("trace.csv");
    let o = condeng(&["fock-run", "--preset", "fig4b", "--format", "csv", "--out", path.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let summary: toml::Table = toml::from_str(&stdout(&o)).unwrap();
    assert_eq!(summary["trips"].as_integer(), Some(652));
    let trace = std::fs::read_to_string(&path).unwrap();
    assert!(trace.starts_with("trip,detected,mean,trace,probability\n"));
    assert_eq!(trace.lines().count(), 653);
}

#[test]
fn sweep_hits_unit_ratio() {
    let o = condeng(&["qubit-sweep", "--qmin", "0.01", "--qmax", "100", "--steps", "5"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let row: Vec<f64> = text.lines().nth(3).unwrap().split(',').map(|c| c.parse().unwrap()).collect();
    assert_eq!(row[0], 1.0);
    assert!((row[2] - (2f64.sqrt() - 1.0)).abs() < 1e-12);
    assert!((row[4] - 0.2737371).abs() < 1e-7);
}

#[test]
fn synthesize_targets() {
    let t = kv(&["synthesize", "--target", "fock:3", "--coupler", "gain:0.5"]);
    let r2: f64 = 0.5;
    let expected = 6.0 * r2.powi(3) / (1.0 + r2).powi(9);
    assert!((f(&t, "probability") - expected).abs() < 1e-14);
    for a in t["alphas"].as_array().unwrap() {
        assert_eq!(a[0].as_float(), Some(0.0));
        assert_eq!(a[1].as_float(), Some(0.0));
    }

    let gain = format!("gain:{}", 2f64.sqrt() - 1.0);
    let q = kv(&["synthesize", "--target", "amps:1,0;1,0", "--coupler", &gain]);
    assert!((f(&q, "probability") - 0.2737371).abs() < 1e-7);
    assert!(f(&q, "fidelity") > 1.0 - 1e-9);
}

#[test]
fn yop_cases() {
    let id = kv(&["yop", "--coupler", "trp:1,0,0,0,1,0", "--kind", "converter", "--f", "fock:0", "--g", "fock:0", "--cutoff", "8"]);
    assert!(f(&id, "residual") < 1e-12);

    let amp = kv(&[
        "yop", "--coupler", "angles:0.3,0.5,-0.2,0.1", "--kind", "amplifier", "--f", "coherent:0.7,0", "--g", "fock:2",
    ]);
    assert!(f(&amp, "residual") < 1e-7);

    let zero = kv(&["yop", "--coupler", "trp:1,0,0,0,1,0", "--kind", "amplifier", "--f", "fock:0", "--g", "fock:1"]);
    for row in zero["y_re"].as_array().unwrap().iter().chain(zero["y_im"].as_array().unwrap()) {
        assert!(row.as_array().unwrap().iter().all(|x| x.as_float() == Some(0.0)));
    }
}

#[test]
fn config_file_supplies_values() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(
        &cfg,
        "format = \"kv\"\n[yop]\ncoupler = \"trp:1,0,0,0,1,0\"\nkind = \"converter\"\nf = \"fock:0\"\ng = \"fock:0\"\n",
    )
    .unwrap();
    let t = kv(&["yop", "--config", cfg.to_str().unwrap(), "--cutoff", "4"]);
    assert_eq!(t["cutoff"].as_integer(), Some(4));
}

#[test]
fn error_classes() {
    assert_single_line_error(&condeng(&["qubit-sweep", "--qmin", "2", "--qmax", "1", "--steps", "3"]), 2, "config");
    assert_single_line_error(&condeng(&["fock-run", "--preset", "fig4z"]), 2, "config");
    assert_single_line_error(&condeng(&["bogus"]), 2, "config");
    assert_single_line_error(
        &condeng(&["fock-run", "--r2", "0.003", "--eta-d", "0", "--eta-f", "1", "--target-n", "4"]),
        2,
        "config",
    );
    assert_single_line_error(
        &condeng(&["synthesize", "--target", "fock:40", "--coupler", "gain:0.5", "--cutoff", "16"]),
        2,
        "config",
    );
    assert_single_line_error(
        &condeng(&["yop", "--coupler", "gain:0.5", "--f", "coherent:9,0", "--g", "fock:0", "--cutoff", "6"]),
        3,
        "numerical",
    );
    assert_single_line_error(&condeng(&["qubit-sweep", "--config", "/nonexistent/run.toml"]), 4, "io");
    assert_single_line_error(
        &condeng(&["qubit-sweep", "--qmin", "1", "--qmax", "2", "--steps", "2", "--out", "/nonexistent/dir/x.csv"]),
        4,
        "io",
    );

    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, "[qubit_sweep]\nqmin = 0.1\nqmx = 2\n").unwrap();
    let o = condeng(&["qubit-sweep", "--config", cfg.to_str().unwrap()]);
    assert_single_line_error(&o, 2, "config");
    assert!(stderr(&o).contains("qmx"));
}

#[test]
fn help_exits_cleanly() {
    let o = condeng(&["--help"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("fock-run"));
}

#[test]
fn golden_outputs() {
    let sweep = condeng(&["qubit-sweep", "--qmin", "0.1", "--qmax", "10", "--steps", "5"]);
    assert_eq!(stdout(&sweep), include_str!("golden/qubit_sweep.csv"));
    let run = condeng(&["fock-run", "--preset", "fig4d"]);
    assert_eq!(stdout(&run), include_str!("golden/fig4d.toml"));
}
