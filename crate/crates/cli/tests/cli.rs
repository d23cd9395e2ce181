use std::process::{Command, Output};

fn nitdistill(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nitdistill"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn triple_point_n5() {
    let out = nitdistill(&["triple-point", "--n", "5", "--precision", "6"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let row = &csv_rows(&text)[0];
    assert_eq!(row[2], "0.333333");
    assert_eq!(row[3], "0.831918");
}

#[test]
fn triple_point_n2_matches_closed_form() {
    let out = nitdistill(&["triple-point", "--n", "2", "--format", "json"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["schema_version"], 1);
    let row = &v["rows"][0];
    assert!((row["beta0"].as_f64().unwrap() - 2.0 / 3.0).abs() < 1e-12);
    let eta0 = (2.0 + 3f64.sqrt()) / 4.0;
    assert!((row["eta0"].as_f64().unwrap() - eta0).abs() < 1e-11);
}

#[test]
fn invalid_dimension_is_usage_error() {
    let out = nitdistill(&["triple-point", "--n", "1"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(out.stdout.is_empty());
}

#[test]
fn missing_flag_is_usage_error() {
    assert_eq!(nitdistill(&["simulate", "--n", "3"]).status.code(), Some(1));
    assert_eq!(nitdistill(&["--help"]).status.code(), Some(0));
}

#[test]
fn curve_d_passes_near_crossing() {
    let dir = std::env::temp_dir().join(format!("nitdistill-curves-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("curves.csv");
    let out = nitdistill(&["curves", "--n", "5", "--grid", "200", "--output", path.to_str().unwrap()]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&path).unwrap();
    std::fs::remove_dir_all(&dir).unwrap();
    let rows = csv_rows(&text);
    let labels: std::collections::BTreeSet<&str> = rows.iter().map(|r| r[0].as_str()).collect();
    assert_eq!(labels.into_iter().collect::<Vec<_>>(), ["a", "b", "c", "d"]);
    let d: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r[0] == "d")
        .map(|r| (r[1].parse().unwrap(), r[2].parse().unwrap()))
        .collect();
    // distance from the sampled polyline to the point
    let (px, py) = (0.470, 0.708);
    let closest = d
        .windows(2)
        .map(|w| {
            let ((x0, y0), (x1, y1)) = (w[0], w[1]);
            let (dx, dy) = (x1 - x0, y1 - y0);
            let t = (((px - x0) * dx + (py - y0) * dy) / (dx * dx + dy * dy)).clamp(0.0, 1.0);
            ((x0 + t * dx - px).powi(2) + (y0 + t * dy - py).powi(2)).sqrt()
        })
        .fold(f64::INFINITY, f64::min);
    assert!(closest < 2e-3, "{closest}");
    for r in rows.iter().filter(|r| r[0] == "b") {
        assert_eq!(&r[2][..8], "0.333333");
    }
}

#[test]
fn grid_of_two_gives_endpoints() {
    let out = nitdistill(&["curves", "--n", "3", "--grid", "2"]);
    let rows = csv_rows(&stdout(&out));
    assert_eq!(rows.len(), 8);
    for pair in rows.chunks(2) {
        assert!((pair[0][1].parse::<f64>().unwrap() - 1.0 / 3.0).abs() < 1e-12);
        assert_eq!(pair[1][1], "1");
    }
}

#[test]
fn ad_table_first_row() {
    let out = nitdistill(&["ad-table", "--n", "3", "--beta0", "0.8", "--L-max", "5", "--format", "json"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 5);
    let eta0 = v["params"]["eta0"].as_f64().unwrap();
    assert!((rows[0]["b_l"].as_f64().unwrap() - 0.1).abs() < 1e-12);
    assert!((rows[0]["e_l"].as_f64().unwrap() - (1.0 - eta0) / 2.0).abs() < 1e-11);
    assert_eq!(rows[0]["accept_rate"], 1.0);
}

#[test]
fn ad_table_rejects_uncorrelated_bob() {
    assert_eq!(nitdistill(&["ad-table", "--n", "4", "--beta0", "0.25"]).status.code(), Some(1));
    assert_eq!(
        nitdistill(&["ad-table", "--n", "4", "--beta0", "0.9", "--L-max", "500"]).status.code(),
        Some(1)
    );
}

#[test]
fn simulate_is_reproducible() {
    let args = ["simulate", "--n", "2", "--beta0", "0.9", "--L", "3", "--blocks", "200000", "--seed", "42"];
    let a = nitdistill(&args);
    let b = nitdistill(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let rows = csv_rows(&stdout(&a));
    let bob = rows.iter().find(|r| r[0] == "bob_wrong").unwrap();
    assert_eq!(bob[7], "true");
}

#[test]
fn simulate_noiseless_bob() {
    let out = nitdistill(&["simulate", "--n", "3", "--beta0", "1", "--L", "2", "--blocks", "1000"]);
    assert!(out.status.success());
    let rows = csv_rows(&stdout(&out));
    let bob = rows.iter().find(|r| r[0] == "bob_wrong").unwrap();
    assert_eq!(bob[1], "0");
    assert_eq!(bob[7], "true");
}

#[test]
fn verify_levels() {
    let out = nitdistill(&["verify", "quick"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(csv_rows(&stdout(&out)).iter().all(|r| r[4] == "true"));
    assert_eq!(nitdistill(&["verify", "thorough"]).status.code(), Some(1));
}
