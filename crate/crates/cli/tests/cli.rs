//! Black-box tests for the crtool binary: exit codes, determinism, and
//! spot checks of the numeric output.

use std::io::Write;
use std::process::{Command, Output};

fn crtool(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_crtool"))
        .args(args)
        .output()
        .expect("failed to spawn crtool")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

#[test]
fn crsum_known_value() {
    let out = crtool(&["crsum", "--r", "2", "--s", "2", "--n", "4"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("2,2,4,3"), "{}", stdout(&out));
}

#[test]
fn crsum_zero_argument_is_jordan_totient() {
    // c_12^1(0) = J_1(12) = φ(12) = 4
    let out = crtool(&["crsum", "--r", "12", "--s", "1", "--n", "0"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("12,1,0,4"));
}

#[test]
fn crsum_oracle_columns_agree() {
    let out = crtool(&["crsum", "--r", "6", "--s", "2", "--n", "36", "--oracle"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let data = text.lines().last().unwrap();
    let cells: Vec<&str> = data.split(',').collect();
    assert_eq!(cells.len(), 7);
    let exact: f64 = cells[3].parse().unwrap();
    let real: f64 = cells[4].parse().unwrap();
    assert!((exact - real).abs() < 1e-6, "{data}");
}

#[test]
fn repeat_invocations_are_byte_identical() {
    let args = ["expand", "--family", "tau", "--s", "2", "--a", "12", "--R", "500"];
    let a = crtool(&args);
    let b = crtool(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn csv_and_json_carry_the_same_numeric_strings() {
    let base = ["crsum", "--r", "5", "--s", "2", "--n", "50", "--oracle"];
    let csv = crtool(&[&base[..], &["--format", "csv"]].concat());
    let json = crtool(&[&base[..], &["--format", "json"]].concat());
    assert!(csv.status.success() && json.status.success());
    let csv_text = stdout(&csv);
    let row = csv_text.lines().last().unwrap();
    let parsed: serde_json::Value = serde_json::from_str(&stdout(&json)).unwrap();
    let json_row = parsed["rows"][0].as_array().unwrap();
    for (i, cell) in row.split(',').enumerate() {
        assert_eq!(json_row[i].as_str().unwrap(), cell);
    }
}

#[test]
fn table_includes_identity_row() {
    let out = crtool(&["table", "--s", "2", "--r-max", "8", "--n-max", "5"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("identity_q=8,pass,pass,pass,pass,pass"), "{text}");
}

#[test]
fn expand_tau_converges() {
    let out = crtool(&["expand", "--family", "tau", "--s", "2", "--a", "4"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let last = text.lines().last().unwrap();
    let cells: Vec<&str> = last.split(',').collect();
    let value: f64 = cells[2].parse().unwrap();
    assert!((value - 2.0).abs() < 0.05, "{last}");
}

#[test]
fn expand_custom_file_round_trips_through_dual() {
    let mut tmp = tempfile_path("fam.json");
    writeln!(tmp.1, "{}", r#"{"1":"1/2","2":"-3","4":"5/7"}"#).unwrap();
    drop(tmp.1);
    let out = crtool(&[
        "dual", "--family", "custom-file", "--s", "2", "--file", &tmp.0,
        "--a-max", "8",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("# param,exact_everywhere,pass"), "{text}");
    std::fs::remove_file(&tmp.0).ok();
}

#[test]
fn additive_lists_prime_square_coefficients_as_zero() {
    let out = crtool(&["additive", "--s", "2", "--p-max", "23", "--r-max", "30"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("4,0,0"), "{text}"); // ghat(2^2) = 0
    assert!(text.contains("3,1/9,"), "{text}"); // ghat(3) = 1/9
}

#[test]
fn selftest_quick_exits_zero() {
    let out = crtool(&["selftest", "--quick"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("all 8 checks passed"));
}

#[test]
fn tau_s_one_is_rejected() {
    let out = crtool(&["expand", "--family", "tau", "--s", "1", "--a", "4"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("requires s > 1"));
}

#[test]
fn oracle_range_guard() {
    let out = crtool(&["crsum", "--r", "100000", "--s", "2", "--n", "1", "--oracle"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("oracle range exceeded"));
}

#[test]
fn bad_usage_exits_two() {
    let out = crtool(&["no-such-command"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn zero_modulus_is_rejected() {
    let out = crtool(&["crsum", "--r", "0", "--s", "1", "--n", "1"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("must be positive"));
}

fn tempfile_path(name: &str) -> (String, std::fs::File) {
    let dir = std::env::temp_dir().join(format!("crtool-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    let file = std::fs::File::create(&path).unwrap();
    (path.to_string_lossy().into_owned(), file)
}
