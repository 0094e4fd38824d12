use std::process::{Command, Output};

use serde_json::Value;

fn pslab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pslab"))
        .args(args)
        .env_remove("PSLAB_THREADS")
        .output()
        .expect("running pslab")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn ps_count_csv_shape() {
    let o = pslab(&["ps-count", "--c", "3/2", "--X", "10000"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# object: "));
    assert_eq!(lines.next().unwrap(), "X,exact_count,main_term,ratio");
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.first().unwrap().split(',').next().unwrap(), "100");
    assert_eq!(rows.last().unwrap().split(',').next().unwrap(), "10000");
}

#[test]
fn oracle_columns_agree() {
    let o = pslab(&["ps-count", "--c", "4/3,3/2", "--X", "50000", "--oracle", "--format", "json"]);
    assert!(o.status.success());
    let doc: Value = serde_json::from_str(&stdout(&o)).unwrap();
    for row in doc["rows"].as_array().unwrap() {
        assert_eq!(row["exact_count"], row["oracle_count"]);
    }
}

#[test]
fn json_carries_metadata_and_numbers() {
    let o = pslab(&["iterated-count", "--c1", "4/3", "--c2", "5/4", "--X", "20000", "--format", "json"]);
    assert!(o.status.success());
    let doc: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(doc["meta"]["command"], "iterated-count");
    assert_eq!(doc["meta"]["params"]["c1"], "4/3");
    assert!(doc["meta"]["params"].get("format").is_none());
    let last = doc["rows"].as_array().unwrap().last().unwrap().clone();
    assert_eq!(last["X"], 20000);
    assert!(last["ratio"].is_f64());
}

#[test]
fn flags_override_config_file() {
    let dir = std::env::temp_dir().join(format!("pslab-cli-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("run.cfg");
    std::fs::write(&path, "# example\nX = 5000\nc = 3/2\n").unwrap();
    let cfg = path.to_str().unwrap();
    let from_file = stdout(&pslab(&["ps-count", "--config", cfg]));
    assert!(from_file.lines().last().unwrap().starts_with("5000,"));
    let overridden = stdout(&pslab(&["ps-count", "--config", cfg, "--X", "2000"]));
    assert!(overridden.lines().last().unwrap().starts_with("2000,"));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn output_does_not_depend_on_thread_count() {
    let a = pslab(&["expsum-report", "--count", "15", "--max-side", "48", "--threads", "1"]);
    let b = pslab(&["expsum-report", "--count", "15", "--max-side", "48", "--threads", "4"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn verify_passes_and_reports_every_check() {
    let o = pslab(&["verify", "--suite", "identities"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    assert!(text.contains("vaughan_exact"));
    assert!(text.contains("heath_brown_exact"));
}

#[test]
fn region_grid_has_resolution_squared_rows() {
    let o = pslab(&["region", "--resolution", "12"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).lines().count(), 2 + 144);
}

#[test]
fn bad_input_exits_with_two() {
    for args in [
        &["ps-count", "--c", "5/2"][..],
        &["ps-count", "--X", "1e12"],
        &["region", "--format", "xml"],
        &["verify", "--suite", "nothing"],
    ] {
        let o = pslab(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(String::from_utf8_lossy(&o.stderr).starts_with("error:"));
    }
}
