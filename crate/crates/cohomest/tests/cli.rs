use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cohomest"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn field(out: &str, key: &str) -> f64 {
    out.lines()
        .find_map(|l| {
            let mut it = l.split_whitespace();
            (it.next() == Some(key)).then(|| it.next().unwrap().parse().unwrap())
        })
        .unwrap_or_else(|| panic!("no {key} in {out}"))
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("cohomest-cli-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn norm_matches_closed_form() {
    let o = run(&["norm", "--rho", "0.7"]);
    assert!(o.status.success(), "{o:?}");
    let out = stdout(&o);
    assert!(out.contains("grid           256"));
    assert!((field(&out, "norm") / 1.7903995865e-01 - 1.0).abs() < 1e-10);
    assert!(field(&out, "rel_error") < 1e-25);
}

#[test]
fn domain_errors_exit_2() {
    let o = run(&["norm", "--rho", "1.5"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["breakdown", "--rho", "0.5", "--delta", "0.7"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["norm", "--rho", "abc"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn resource_cap_exits_3() {
    let o = run(&["norm", "--rho", "0.999", "--cap-grid", "1024"]);
    assert_eq!(o.status.code(), Some(3), "{o:?}");
}

#[test]
fn tables_with_skipped_rows_still_write_csv() {
    let path = scratch("t1.csv");
    let o = run(&["tables", "--table", "1", "--cap-grid", "4096", "--out", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    let text = fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().count(), 1 + 16 * 4);
    assert!(text.lines().filter(|l| l.ends_with(",pass")).count() >= 12 * 4);
    assert!(!text.contains(",fail"));
}

#[test]
fn sweep_output_is_deterministic() {
    let a = scratch("a.csv");
    let b = scratch("b.csv");
    for p in [&a, &b] {
        let o = run(&[
            "sweep-delta", "--rho", "0.5", "--family", "vs", "--s", "1", "--seed", "7", "--out", p.to_str().unwrap(),
        ]);
        assert!(o.status.success(), "{o:?}");
    }
    let (ta, tb) = (fs::read(&a).unwrap(), fs::read(&b).unwrap());
    assert_eq!(ta, tb);
    assert_eq!(String::from_utf8(ta).unwrap().lines().count(), 101);
}

#[test]
fn cr_prints_classic_and_adhoc() {
    let o = run(&["cr", "--delta", "0.1"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!((field(&out, "c_R0") - 0.0903780137978).abs() < 1e-12);
    assert!(field(&out, "c_R_upper") < field(&out, "c_R0"));
}

#[test]
fn unwritable_output_names_the_path() {
    let o = run(&["tables", "--table", "4", "--out", "/nonexistent-dir/t4.csv"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("/nonexistent-dir/t4.csv"));
}
