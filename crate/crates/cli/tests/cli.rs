use std::path::Path;
use std::process::{Command, Output};

fn charsum(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_charsum"))
        .args(args)
        .env_remove("CHARSUM_THREADS")
        .output()
        .expect("binary runs")
}

fn path(dir: &Path, name: &str) -> String {
    dir.join(name).to_str().unwrap().to_string()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

#[test]
fn tail_is_deterministic_and_replayable() {
    let dir = tempfile::tempdir().unwrap();
    let a = path(dir.path(), "a.csv");
    let b = path(dir.path(), "b.csv");
    let common = ["tail", "--p", "1009", "--orders", "2-4", "--kind", "arcmax", "--grid", "8"];
    let run = |out: &str, threads: &str| {
        let mut args = common.to_vec();
        args.extend(["--out", out, "--threads", threads]);
        let o = charsum(&args);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    };
    run(&a, "1");
    run(&b, "4");
    let first = std::fs::read(&a).unwrap();
    assert_eq!(first, std::fs::read(&b).unwrap());

    std::fs::write(&a, b"clobbered").unwrap();
    let o = charsum(&["replay", &format!("{a}.manifest.json")]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(std::fs::read(&a).unwrap(), first);

    let m: serde_json::Value = serde_json::from_slice(&std::fs::read(format!("{a}.manifest.json")).unwrap()).unwrap();
    assert_eq!(m["command"], "tail");
    assert_eq!(m["threads"], 1);
    assert_eq!(m["parameters"]["grid"], 8);
    assert!(m["wall_time_s"].as_f64().unwrap() >= 0.0);
}

#[test]
fn tail_at_p101_counts_exactly() {
    let o = charsum(&["tail", "--p", "101", "--orders", "2"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("V,phi,order,p,kind,shift"));
    let mut prev = f64::INFINITY;
    for line in lines {
        let cols: Vec<&str> = line.split(',').collect();
        assert_eq!(cols.len(), 6);
        let phi: f64 = cols[1].parse().unwrap();
        let n = phi * 101.0;
        assert!((n - n.round()).abs() < 1e-6, "{line}");
        assert!(phi <= prev);
        prev = phi;
        assert_eq!(&cols[2..], ["2", "101", "midpoint", "0"]);
    }
    assert!(!text.contains('\r'));

    let o = charsum(&["spectrum", "--p", "101", "--orders", "2"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    assert_eq!(text.lines().count(), 102);
    assert!(text.starts_with("K,value,order,p,kind,shift\n"));
}

#[test]
fn svg_is_written_with_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let csv = path(dir.path(), "t.csv");
    let svg = path(dir.path(), "t.svg");
    let o = charsum(&["tail", "--p", "1009", "--orders", "2,3,4", "--out", &csv, "--svg", &svg]);
    assert_eq!(code(&o), 0);
    let text = std::fs::read_to_string(&svg).unwrap();
    assert!(text.starts_with("<svg"));
    assert!(text.matches("<polyline").count() >= 3);
    assert!(text.contains("d = 3 odd_lower"));
    assert!(Path::new(&format!("{svg}.manifest.json")).exists());
}

#[test]
fn usage_errors_exit_2() {
    let o = charsum(&["tail", "--p", "101", "--orders", "3"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("does not divide"));
    assert_eq!(code(&charsum(&["tail", "--p", "100"])), 2);
    assert_eq!(code(&charsum(&["tail", "--orders", "x"])), 2);
    assert_eq!(code(&charsum(&["nonsense"])), 2);
    assert_eq!(code(&charsum(&["spectrum", "--p", "101", "--orders", "2,5"])), 2);
}

#[test]
fn constants_json_round_trips() {
    let o = charsum(&["constants", "--orders", "2-5"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    let records: Vec<charsum::TheoryConstants> = serde_json::from_str(&text).unwrap();
    assert_eq!(records.iter().map(|r| r.d).collect::<Vec<_>>(), [2, 3, 4, 5]);
    let mut again = serde_json::to_string_pretty(&records).unwrap();
    again.push('\n');
    assert_eq!(again, text);
    let d2: serde_json::Value = serde_json::from_str::<serde_json::Value>(&text).unwrap()[0].clone();
    assert!((d2["hat_c_d"].as_f64().unwrap() - 0.1029).abs() <= 5e-4);
    assert!(d2["c_d_upper_proof"].is_f64() && d2["c_d_upper_displayed"].is_f64());
}

#[test]
fn randmodel_records() {
    let args = ["randmodel", "--p", "1009", "--orders", "2,4,5", "--s", "0,1,400", "--samples", "2000", "--seed", "9"];
    let o = charsum(&args);
    assert_eq!(code(&o), 0);
    let again = charsum(&args);
    assert_eq!(o.stdout, again.stdout);
    assert!(String::from_utf8_lossy(&o.stderr).contains("warning"));
    let rows: Vec<serde_json::Value> = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(rows.len(), 9);
    for r in &rows {
        let s = r["s"].as_f64().unwrap();
        if s == 0.0 {
            assert_eq!(r["empirical"]["value"], 1.0);
            assert_eq!(r["theoretical"]["value"], 1.0);
            if let Some(a) = r["arithmetic"].as_object() {
                let excluded = a["excluded"].as_f64().unwrap();
                assert_eq!(a["value"].as_f64().unwrap(), (1009.0 - excluded) / 1009.0);
            }
        }
        if s == 400.0 {
            assert!(r["empirical"].is_null());
            assert!(r["empirical_error"].as_str().unwrap().contains("overflow"));
        }
        // 1008 = 2^4 · 3^2 · 7 admits 2 and 4 but not 5.
        assert_eq!(r["arithmetic"].is_null(), r["d"] == 5);
    }
}

#[test]
fn verify_quick_passes() {
    let o = charsum(&["verify"]);
    let text = String::from_utf8_lossy(&o.stdout);
    assert_eq!(code(&o), 0, "{text}");
    assert!(text.contains("0 failed"));
    assert!(text.lines().filter(|l| l.starts_with("PASS")).count() >= 10);
}

#[test]
fn verify_names_a_corrupted_fixture() {
    let dir = tempfile::tempdir().unwrap();
    let fixture = path(dir.path(), "constants.json");
    std::fs::write(&fixture, r#"{"tolerance": 1e-8, "records": [{"d": 2, "values": {"c_d": 0.5}}]}"#).unwrap();
    let o = charsum(&["verify", "--fixture", &fixture]);
    assert_eq!(code(&o), 1);
    let out = String::from_utf8_lossy(&o.stdout);
    assert!(out.lines().any(|l| l.starts_with("FAIL constants-fixture")), "{out}");
    assert!(String::from_utf8_lossy(&o.stderr).contains("constants-fixture"));

    std::fs::write(&fixture, "{ not json").unwrap();
    assert_eq!(code(&charsum(&["verify", "--fixture", &fixture])), 2);
    std::fs::write(&fixture, r#"{"tolerance": 1e-8, "records": [{"d": 2, "values": {"nope": 1.0}}]}"#).unwrap();
    assert_eq!(code(&charsum(&["verify", "--fixture", &fixture])), 2);
}

#[test]
fn thread_env_is_validated() {
    let o = Command::new(env!("CARGO_BIN_EXE_charsum"))
        .args(["constants", "--orders", "2"])
        .env("CHARSUM_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(code(&o), 2);
}
