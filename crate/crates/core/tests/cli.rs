use std::fs;
use std::process::ExitCode;

use szasz_lab::cli::main_with_args;

fn run(args: &[&str]) -> (ExitCode, String) {
    let mut out = Vec::new();
    let code = main_with_args(std::iter::once("szasz-lab").chain(args.iter().copied()), &mut out);
    (code, String::from_utf8(out).unwrap())
}

#[test]
fn every_subcommand_runs() {
    let cases: &[&[&str]] = &[
        &["models"],
        &["eval", "--model", "fubini-study-cp1", "--f", "t^2", "--N", "4", "--x", "0.5"],
        &["norms", "--model", "bergman-ball-1", "--N", "2,4"],
        &["kernel", "--model", "bargmann-fock-1", "--N", "3", "--x", "0.7"],
        &["voronovskaya", "--model", "fubini-study-cp1", "--f", "t^2", "--x", "0.3"],
        &["corner", "--model", "bergman-ball-1", "--f", "cosine-window:1:2", "--x", "1"],
        &["wall"],
        &["poisson-limit", "--x", "1", "--N", "10,20,40,80"],
        &["prob-check", "--count", "20000"],
    ];
    for args in cases {
        let (code, out) = run(args);
        assert_eq!(code, ExitCode::SUCCESS, "{args:?}: {out}");
        assert!(!out.trim().is_empty(), "{args:?}");
    }
}

#[test]
fn outputs_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let path = |name: &str| dir.path().join(name).to_string_lossy().into_owned();
    let mut bodies = Vec::new();
    for tag in ["a", "b"] {
        let (json, csv) = (path(&format!("{tag}.json")), path(&format!("{tag}.csv")));
        let args = ["prob-check", "--count", "50000", "--seed", "7", "--json", &json, "--csv", &csv];
        assert_eq!(run(&args).0, ExitCode::SUCCESS);
        bodies.push((fs::read(&json).unwrap(), fs::read(&csv).unwrap()));
    }
    // the embedded config differs only in the output paths
    let strip = |b: &[u8]| {
        let mut v: serde_json::Value = serde_json::from_slice(b).unwrap();
        v["config"]["output"] = serde_json::Value::Null;
        v
    };
    assert_eq!(strip(&bodies[0].0), strip(&bodies[1].0));
    assert_eq!(bodies[0].1, bodies[1].1);
    let csv = String::from_utf8(bodies[0].1.clone()).unwrap();
    assert!(csv.starts_with("# szasz-lab "), "{csv}");
}

#[test]
fn poisson_table_has_spot_value() {
    let (code, out) = run(&["poisson-limit", "--x", "1", "--N", "10,20,40,80", "--k-max", "4"]);
    assert_eq!(code, ExitCode::SUCCESS);
    assert!(out.contains("0.0192010"), "{out}");
}

#[test]
fn config_file_matches_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("eval.json");
    let (code, dry) = run(&["eval", "--model", "bargmann-fock-1", "--f", "t^2", "--N", "10", "--x", "1", "--dry-run"]);
    assert_eq!(code, ExitCode::SUCCESS);
    fs::write(&cfg, dry).unwrap();
    let from_file = run(&["eval", "--config", cfg.to_str().unwrap()]).1;
    let from_flags = run(&["eval", "--model", "bargmann-fock-1", "--f", "t^2", "--N", "10", "--x", "1"]).1;
    assert_eq!(from_file, from_flags);
    let value: f64 = from_flags.lines().last().unwrap().split(',').nth(2).unwrap().parse().unwrap();
    assert!((value - 1.1).abs() < 1e-14, "{from_flags}");
}

#[test]
fn bad_input_exit_codes() {
    assert_eq!(run(&["eval", "--model", "no-such-model"]).0, ExitCode::from(2));
    assert_eq!(run(&["frobnicate"]).0, ExitCode::from(2));
    assert_eq!(
        run(&["eval", "--model", "fubini-study-cp1", "--f", "t", "--N", "4", "--x", "1.5"]).0,
        ExitCode::from(3)
    );
}
