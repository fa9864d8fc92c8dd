use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_diagdensity"))
        .args(args)
        .env_remove("DIAGDENSITY_THREADS")
        .output()
        .expect("spawn diagdensity")
}

fn stdout(args: &[&str]) -> String {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn json(args: &[&str]) -> Value {
    let mut v = args.to_vec();
    v.extend(["--format", "json"]);
    serde_json::from_str(&stdout(&v)).unwrap()
}

#[test]
fn local_row_for_sextic_mod_7() {
    let csv = stdout(&["local", "--coeffs", "1,1,1", "--k", "6", "--prime-limit", "7", "--format", "csv"]);
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "p,m,value_set_size,density,alpha,density_exact,alpha_capped,within_bound"
    );
    let last = csv.lines().last().unwrap();
    assert!(last.starts_with("7,1,4,0.571428571429,1.14285714286,4/7,"), "{last}");
}

#[test]
fn bound_exact_includes_the_p41_term() {
    let v = json(&["bound", "--coeffs", "1,1,1", "--k", "40", "--s", "3", "--prime-limit", "100"]);
    assert_eq!(v["summary"]["mode"], "exact");
    let term = v["rows"]
        .as_array()
        .unwrap()
        .iter()
        .find(|r| r["p"] == 41)
        .unwrap()["term"]
        .as_f64()
        .unwrap();
    assert!((term - (41.0f64 / 4.0).ln()).abs() < 1e-9);
    assert!((term - 2.327).abs() < 1e-3);
    let total = v["summary"]["log_inv_density_lower"].as_f64().unwrap();
    assert!(total >= term);
}

#[test]
fn bound_alpha_single_prime() {
    let v = json(&["bound", "--k", "40", "--s", "3", "--mode", "alpha"]);
    let total = v["summary"]["log_inv_density_lower"].as_f64().unwrap();
    assert!((total - (41.0f64 / 8.0).ln()).abs() < 1e-9);
    assert_eq!(v["rows"].as_array().unwrap().len(), 1);
}

#[test]
fn average_small_x() {
    let csv = stdout(&["average", "--s", "3", "--X", "13", "--prime-limit", "1000", "--format", "csv"]);
    let row: Vec<&str> = csv.lines().last().unwrap().split(',').collect();
    let avg: f64 = row[1].parse().unwrap();
    let reference: f64 = row[2].parse().unwrap();
    let expected = ((11.0f64 / 8.0).ln() + (13.0f64 / 8.0).ln()) / 13.0;
    assert!((avg - expected).abs() < 1e-10);
    assert!((reference - 13f64.sqrt() / 13f64.ln()).abs() < 1e-10);
}

#[test]
fn average_accepts_a_list_of_x() {
    let v = json(&["average", "--s", "3", "--X", "20,40"]);
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[1]["X"], 40);
}

#[test]
fn csv_and_json_agree() {
    let args = ["landau", "--X", "1000,5000"];
    let csv = stdout(&[&args[..], &["--format", "csv"]].concat());
    let v = json(&args);
    for (line, row) in csv.lines().skip(1).zip(v["rows"].as_array().unwrap()) {
        let cells: Vec<&str> = line.split(',').collect();
        assert_eq!(cells[1].parse::<f64>().unwrap(), row["partial_sum"].as_f64().unwrap());
        assert_eq!(cells[2].parse::<f64>().unwrap(), row["prediction"].as_f64().unwrap());
    }
    let c_l = csv
        .lines()
        .find_map(|l| l.strip_prefix("c_l,"))
        .unwrap()
        .parse::<f64>()
        .unwrap();
    assert_eq!(c_l, v["summary"]["c_l"].as_f64().unwrap());
}

#[test]
fn scan_reports_exact_ratios() {
    let v = json(&[
        "scan", "--coeffs", "1,1,1", "--k", "6", "--N", "91", "--B", "3", "--sieve-primes", "7,13",
    ]);
    assert_eq!(v["summary"]["sieve_upper_density_exact"], "28/91");
    assert_eq!(v["summary"]["consistent"], true);
    let v = json(&["scan", "--coeffs", "1,1,-1", "--k", "3", "--N", "5", "--B", "2"]);
    assert_eq!(v["summary"]["lower_density"].as_f64().unwrap(), 0.6);
    let ns: Vec<u64> = v["rows"].as_array().unwrap().iter().map(|r| r["n"].as_u64().unwrap()).collect();
    assert_eq!(ns, vec![1, 2, 3]);
}

#[test]
fn lemma3_row() {
    let v = json(&["lemma3", "--X", "10", "--Y", "2", "--s", "3"]);
    let row = &v["rows"][0];
    assert!((row["s1_bound"].as_f64().unwrap() - 0.0589).abs() < 1e-3);
    assert!((row["error_integral"].as_f64().unwrap() - 0.33669).abs() < 1e-4);
}

#[test]
fn out_flag_writes_file() {
    let dir = std::env::temp_dir().join(format!("diagdensity-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("local.csv");
    let out = run(&[
        "local", "--coeffs", "1,1,1", "--k", "6", "--prime-limit", "13", "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().count(), 7);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn threads_env_is_honoured_and_flag_wins() {
    let bad = Command::new(env!("CARGO_BIN_EXE_diagdensity"))
        .args(["landau", "--X", "10"])
        .env("DIAGDENSITY_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
    let ok = Command::new(env!("CARGO_BIN_EXE_diagdensity"))
        .args(["landau", "--X", "10", "--threads", "2"])
        .env("DIAGDENSITY_THREADS", "many")
        .output()
        .unwrap();
    assert!(ok.status.success());
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["nonsense"]).status.code(), Some(2));
    assert_eq!(run(&["local", "--k", "3"]).status.code(), Some(2));
    assert_eq!(run(&["lemma3", "--X", "100", "--Y", "20"]).status.code(), Some(2));
    let big = run(&["scan", "--coeffs", "1,1,1", "--k", "2", "--N", "10", "--B", "100000"]);
    assert_eq!(big.status.code(), Some(3));
    assert!(!big.stderr.is_empty());
    let overflow = run(&["scan", "--coeffs", "1,1", "--k", "60", "--N", "10", "--B", "5"]);
    assert_eq!(overflow.status.code(), Some(3));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn verify_passes() {
    let v = json(&["verify", "--seed", "3"]);
    assert_eq!(v["summary"]["failed"], 0);
}
