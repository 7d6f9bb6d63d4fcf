//! Exit codes, file formats, and output conventions of the binary.

mod common;
use common::{aplab, scratch_dir, stdout_json};

#[test]
fn exit_codes() {
    // domain error: 2
    let out = aplab(&["constants", "--q", "6"]);
    assert_eq!(out.status.code(), Some(2));
    // oracle size limit: 2
    let out = aplab(&["extremal", "--in", "interval:30", "--k", "3", "--mode", "oracle"]);
    assert_eq!(out.status.code(), Some(2));
    // budget exhaustion with incumbent: 3
    let out = aplab(&[
        "extremal", "--in", "interval:40", "--k", "3", "--mode", "exact", "--budget", "5",
    ]);
    assert_eq!(out.status.code(), Some(3));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["optimal"], serde_json::Value::Bool(false));
    assert!(v["size"].as_u64().unwrap() > 0);
    // success: 0
    let out = aplab(&["constants", "--q", "5"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn constants_csv_columns_frozen() {
    let out = aplab(&["constants", "--q", "3,5", "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("q,y_star,g_star,c_q,C_q,thm11_exponent"));
    assert_eq!(lines.count(), 2);
}

#[test]
fn constants_json_values() {
    let out = aplab(&["constants", "--q", "3,5,7,9", "--format", "json"]);
    let v = stdout_json(&out);
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 4);
    // c_q strictly decreasing across the row set
    let cs: Vec<f64> = rows.iter().map(|r| r["c_q"].as_f64().unwrap()).collect();
    assert!(cs.windows(2).all(|w| w[1] < w[0]));
}

#[test]
fn analyze_counts_examples() {
    let out = aplab(&["analyze", "--in", "interval:9", "--what", "counts"]);
    let v = stdout_json(&out);
    assert_eq!(v["k3"]["unordered"], 16);
    let out = aplab(&["analyze", "--in", "f3^2:full", "--what", "counts"]);
    let v = stdout_json(&out);
    assert_eq!(v["k3"]["unordered"], 12);
    assert_eq!(v["k4"], serde_json::Value::Null); // characteristic 3
}

#[test]
fn analyze_energy_example() {
    let dir = scratch_dir("energy");
    let gs = dir.join("two.gs");
    std::fs::write(&gs, "#ambient interval N=10\n1\n2\n").unwrap();
    let out = aplab(&["analyze", "--in", gs.to_str().unwrap(), "--what", "energy"]);
    let v = stdout_json(&out);
    assert_eq!(v["energy"], 6);
    assert_eq!(v["t_ordered"], 2);
}

#[test]
fn construct_writes_all_three_files() {
    let dir = scratch_dir("construct");
    let out_path = dir.join("a.gs");
    let out = aplab(&[
        "construct", "digits6", "--N", "1000",
        "--out", out_path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(out_path.exists());
    assert!(dir.join("a.gs.report.json").exists());
    assert!(dir.join("a.gs.manifest.json").exists());
    let gs = std::fs::read_to_string(&out_path).unwrap();
    assert!(gs.starts_with("#ambient interval N=1000\n"));
    // first members of the digit set
    assert!(gs.contains("\n1\n2\n6\n7\n8\n12\n"));
}

#[test]
fn malformed_groundset_file_is_a_usage_error() {
    let dir = scratch_dir("malformed");
    let bad = dir.join("bad.gs");
    std::fs::write(&bad, "#ambient interval N=5\n3\n2\n").unwrap();
    let out = aplab(&["analyze", "--in", bad.to_str().unwrap(), "--what", "counts"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("strictly increasing"), "stderr: {}", err);
}

#[test]
fn extremal_witness_file() {
    let dir = scratch_dir("witness");
    let wpath = dir.join("w.gs");
    let out = aplab(&[
        "extremal", "--in", "interval:9", "--k", "3", "--mode", "exact",
        "--witness-out", wpath.to_str().unwrap(),
    ]);
    let v = stdout_json(&out);
    assert_eq!(v["size"], 5);
    assert_eq!(v["optimal"], true);
    let text = std::fs::read_to_string(&wpath).unwrap();
    let count = text.lines().skip(1).filter(|l| !l.is_empty()).count();
    assert_eq!(count, 5);
}

#[test]
fn heuristic_is_seed_deterministic() {
    let a = aplab(&[
        "extremal", "--in", "interval:30", "--mode", "heuristic", "--iters", "50", "--seed", "9",
    ]);
    let b = aplab(&[
        "extremal", "--in", "interval:30", "--mode", "heuristic", "--iters", "50", "--seed", "9",
    ]);
    assert_eq!(a.stdout, b.stdout);
}
