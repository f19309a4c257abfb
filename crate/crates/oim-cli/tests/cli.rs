//! Black-box tests of the `oim` binary: file formats, exit codes, and
//! reproducibility of command outputs.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn oim(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_oim"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("failed to launch oim")
}

fn tempdir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("oim-cli-{tag}-{}", std::process::id()));
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn generate_star_writes_the_demo_graph() {
    let dir = tempdir("gen-star");
    let out = oim(&dir, &["generate", "star", "--out", "star.json"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = fs::read_to_string(dir.join("star.json")).unwrap();
    let parsed: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(parsed["n"], 4);
    assert_eq!(
        parsed["edges"],
        serde_json::json!([[0, 2, 1.0], [1, 2, 1.0], [2, 3, 1.0]])
    );
}

#[test]
fn generate_is_byte_reproducible() {
    let dir = tempdir("gen-repro");
    let a = oim(
        &dir,
        &[
            "generate", "gnp", "-n", "8", "-p", "0.5", "--seed", "7", "--out", "a.json",
        ],
    );
    let b = oim(
        &dir,
        &[
            "generate", "gnp", "-n", "8", "-p", "0.5", "--seed", "7", "--out", "b.json",
        ],
    );
    assert!(a.status.success() && b.status.success());
    assert_eq!(
        fs::read(dir.join("a.json")).unwrap(),
        fs::read(dir.join("b.json")).unwrap()
    );
    let c = oim(
        &dir,
        &[
            "generate",
            "complete-gaussian",
            "-n",
            "100",
            "--seed",
            "1",
            "--out",
            "c.json",
        ],
    );
    assert!(c.status.success());
    let parsed: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.join("c.json")).unwrap()).unwrap();
    assert_eq!(parsed["edges"].as_array().unwrap().len(), 4950);
}

#[test]
fn solve_reports_the_star_partition_and_trace() {
    let dir = tempdir("solve");
    oim(&dir, &["generate", "star", "--out", "star.json"]);
    let out = oim(
        &dir,
        &[
            "solve",
            "star.json",
            "--seed",
            "3",
            "--trace",
            "trace.csv",
            "--out",
            "sol.json",
        ],
    );
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("cut: 3"), "unexpected solve output:\n{text}");
    assert!(text.contains("machine_energy: -6"));
    assert!(text.contains("hamiltonian: 6"));

    let trace = fs::read_to_string(dir.join("trace.csv")).unwrap();
    let header = trace.lines().next().unwrap();
    assert_eq!(header, "t,phi_0,phi_1,phi_2,phi_3,E,metric,Kc,Ks,sigma");
    let last = trace.lines().last().unwrap();
    assert!(last.starts_with("20,"), "last sample at t_end: {last}");

    let sol: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.join("sol.json")).unwrap()).unwrap();
    assert_eq!(sol["seed"], 3);
    assert_eq!(sol["cut"], 3.0);
    assert_eq!(sol["settled"], true);
}

#[test]
fn solve_without_sync_warns_but_exits_zero() {
    let dir = tempdir("solve-nosync");
    oim(
        &dir,
        &[
            "generate", "gnp", "-n", "8", "-p", "0.5", "--seed", "42", "--out", "g.json",
        ],
    );
    let out = oim(&dir, &["solve", "g.json", "--ks", "0", "--out", "sol.json"]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(
        stderr(&out).contains("not settled"),
        "missing warning: {}",
        stderr(&out)
    );
    let sol: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.join("sol.json")).unwrap()).unwrap();
    assert_eq!(sol["settled"], false);
}

#[test]
fn oracle_brute_star() {
    let dir = tempdir("oracle");
    oim(&dir, &["generate", "star", "--out", "star.json"]);
    let out = oim(&dir, &["oracle", "star.json", "--method", "brute"]);
    assert!(out.status.success());
    let value: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(value["best_cut"], 3.0);
    assert_eq!(value["best_machine_energy"], -6.0);
    assert_eq!(value["best"], serde_json::json!([1, 1, -1, 1]));
    assert_eq!(value["method"], "brute");
}

#[test]
fn oracle_tabu_is_deterministic() {
    let dir = tempdir("oracle-tabu");
    oim(
        &dir,
        &[
            "generate", "gnp", "-n", "12", "-p", "0.5", "--seed", "2", "--out", "g.json",
        ],
    );
    let a = oim(
        &dir,
        &["oracle", "g.json", "--method", "tabu", "--seed", "9"],
    );
    let b = oim(
        &dir,
        &["oracle", "g.json", "--method", "tabu", "--seed", "9"],
    );
    assert!(a.status.success() && b.status.success());
    assert_eq!(stdout(&a), stdout(&b));
}

#[test]
fn oracle_brute_rejects_large_problems_with_exit_3() {
    let dir = tempdir("oracle-large");
    oim(
        &dir,
        &[
            "generate", "gnp", "-n", "25", "-p", "0.3", "--seed", "0", "--out", "g.json",
        ],
    );
    let out = oim(&dir, &["oracle", "g.json", "--method", "brute"]);
    assert_eq!(out.status.code(), Some(3), "{}", stderr(&out));
    assert!(stderr(&out).contains("exceeds"), "{}", stderr(&out));
}

#[test]
fn bench_writes_a_parsable_report() {
    let dir = tempdir("bench");
    oim(&dir, &["generate", "star", "--out", "star.json"]);
    let out = oim(
        &dir,
        &[
            "bench",
            "star.json",
            "--runs",
            "10",
            "--seed",
            "1",
            "--out",
            "report.json",
            "--trace-dir",
            "traces",
        ],
    );
    assert!(out.status.success(), "{}", stderr(&out));
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["runs"], 10);
    assert_eq!(report["base_seed"], 1);
    assert_eq!(report["per_run"].as_array().unwrap().len(), 10);
    // one trajectory per seed
    for seed in 1..11 {
        assert!(dir.join("traces").join(format!("run_{seed}.csv")).exists());
    }
}

#[test]
fn quantize_star_uses_the_full_board() {
    let dir = tempdir("quantize");
    oim(&dir, &["generate", "star", "--out", "star.json"]);
    let out = oim(
        &dir,
        &[
            "quantize",
            "star.json",
            "--out",
            "codes.csv",
            "--quantized-out",
            "q.json",
        ],
    );
    assert!(out.status.success(), "{}", stderr(&out));
    let csv = fs::read_to_string(dir.join("codes.csv")).unwrap();
    let rows: Vec<&str> = csv.lines().skip(1).collect();
    assert_eq!(rows.len(), 28);
    let disconnects = rows
        .iter()
        .filter(|row| row.split(',').nth(4) == Some("-1"))
        .count();
    assert_eq!(disconnects, 25);
    // the realized problem keeps the caller's node count
    let quant: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.join("q.json")).unwrap()).unwrap();
    assert_eq!(quant["n"], 4);
    assert_eq!(quant["edges"].as_array().unwrap().len(), 3);
}

#[test]
fn quantize_rejects_ferromagnetic_couplings_unless_signed() {
    let dir = tempdir("quantize-sign");
    // a negative weight makes J = -w positive
    fs::write(
        dir.join("neg.json"),
        r#"{"n": 3, "edges": [[0, 1, -0.0002], [1, 2, 0.0002]]}"#,
    )
    .unwrap();
    let out = oim(&dir, &["quantize", "neg.json", "--out", "codes.csv"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains("positive"), "{}", stderr(&out));
    let out = oim(
        &dir,
        &["quantize", "neg.json", "--signed", "--out", "codes.csv"],
    );
    assert!(out.status.success(), "{}", stderr(&out));
}

#[test]
fn digipot_beats_the_series_ladder_on_precision() {
    let dir = tempdir("quantize-compare");
    oim(
        &dir,
        &[
            "generate",
            "complete-gaussian",
            "-n",
            "8",
            "--seed",
            "3",
            "--out",
            "raw.json",
        ],
    );
    // scale weights into the representable band and drop signs
    let raw: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.join("raw.json")).unwrap()).unwrap();
    let edges: Vec<serde_json::Value> = raw["edges"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| {
            let (i, j, w) = (e[0].clone(), e[1].clone(), e[2].as_f64().unwrap());
            serde_json::json!([i, j, w.abs() * 2e-4 + 1e-4])
        })
        .collect();
    fs::write(
        dir.join("scaled.json"),
        serde_json::json!({"n": 8, "edges": edges}).to_string(),
    )
    .unwrap();

    let max_err = |model: &str| -> f64 {
        let out = oim(
            &dir,
            &[
                "quantize",
                "scaled.json",
                "--model",
                model,
                "--out",
                "c.csv",
            ],
        );
        assert!(out.status.success(), "{}", stderr(&out));
        stdout(&out)
            .lines()
            .find_map(|l| {
                l.strip_prefix("max relative coupling error: ")
                    .map(str::to_owned)
            })
            .unwrap()
            .parse()
            .unwrap()
    };
    let digipot = max_err("digipot8");
    let series = max_err("r2r-series");
    assert!(
        digipot <= series,
        "digipot error {digipot} should not exceed series-ladder error {series}"
    );
}

#[test]
fn missing_input_file_exits_2() {
    let dir = tempdir("missing");
    let out = oim(&dir, &["solve", "no-such-file.json"]);
    assert_eq!(out.status.code(), Some(2), "{}", stderr(&out));
}

#[test]
fn malformed_problem_file_exits_3_with_position() {
    let dir = tempdir("malformed");
    fs::write(dir.join("bad.json"), "{\"n\": 2,\n \"edges\": oops}").unwrap();
    let out = oim(&dir, &["solve", "bad.json"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains("line 2"), "{}", stderr(&out));

    fs::write(dir.join("loop.json"), r#"{"n": 4, "edges": [[3, 3, 1.0]]}"#).unwrap();
    let out = oim(&dir, &["solve", "loop.json"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains("self-loop"), "{}", stderr(&out));
}

#[test]
fn usage_errors_exit_1_and_help_exits_0() {
    let dir = tempdir("usage");
    let out = oim(&dir, &["solve", "--no-such-flag"]);
    assert_eq!(out.status.code(), Some(1));
    let out = oim(&dir, &["--help"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("generate"));
}

#[test]
fn schedule_file_round_trips_through_solve() {
    let dir = tempdir("schedule-file");
    oim(&dir, &["generate", "star", "--out", "star.json"]);
    fs::write(
        dir.join("sch.json"),
        r#"{"breakpoints": [[0.0, 0.0, 1.0, 0.5], [20.0, 3.0, 1.0, 0.0]]}"#,
    )
    .unwrap();
    let a = oim(
        &dir,
        &[
            "solve",
            "star.json",
            "--schedule",
            "sch.json",
            "--seed",
            "5",
        ],
    );
    let b = oim(&dir, &["solve", "star.json", "--seed", "5"]);
    assert!(a.status.success(), "{}", stderr(&a));
    // the file above is exactly the built-in ramp, so results agree
    let spins = |s: &str| {
        s.lines()
            .find(|l| l.starts_with("spins:"))
            .map(str::to_owned)
            .unwrap()
    };
    assert_eq!(spins(&stdout(&a)), spins(&stdout(&b)));
}
