use std::fs;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_triplehyp")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn lines(o: &Output) -> Vec<Value> {
    stdout(o).lines().map(|l| serde_json::from_str(l).unwrap()).collect()
}

fn floats(v: &Value) -> Vec<f64> {
    v.as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect()
}

#[test]
fn eval_point_converges() {
    let o = run(&["eval", "--family", "HA", "--variant", "upper", "--z1", "0.1", "--z2", "0.1", "--z3", "0.1"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let recs = lines(&o);
    assert_eq!(recs.len(), 1);
    let r = &recs[0];
    assert_eq!(r["converged"], Value::Bool(true));
    assert_eq!(r["family"], "HA");
    assert!(r["error_estimate"].as_f64().unwrap() < 1e-10);
    assert!(r["terms_used"].as_u64().unwrap() > 1);
}

#[test]
fn zero_point_is_ratio_of_gammas() {
    // desk A = 1.5, x = 1: [A;x]_0 = Γ(1.5, 1) / Γ(1.5)
    let o = run(&["eval", "--family", "HB", "--z1", "0", "--z2", "0", "--z3", "0"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v = floats(&lines(&o)[0]["value"]["re"])[0];
    const ERFC_1: f64 = 0.157_299_207_050_285_13;
    let closed = ERFC_1 + 2.0 * (-1.0f64).exp() / std::f64::consts::PI.sqrt();
    assert!((v - closed).abs() < 1e-13, "{v} vs {closed}");
}

#[test]
fn non_commuting_parameters_exit_2() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("job.json");
    fs::write(
        &path,
        r#"{"family":"HC","x":0.5,
            "params":{"A":{"rows":2,"re":[1,1,0,1]},"B":{"rows":2,"re":[1,0,1,1]},
                      "Bp":{"rows":2,"re":[1,0,0,1]},"C":{"rows":2,"re":[2,0,0,2]}},
            "z":[0.1,0,0]}"#,
    )
    .unwrap();
    let o = run(&["eval", "--config", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("commute"), "{}", stderr(&o));
}

#[test]
fn bad_inputs_exit_2() {
    for args in [
        &["eval", "--family", "HD"][..],
        &["eval", "--variant", "middle"],
        &["eval", "--x", "-1"],
        &["eval", "--z1", "[1,2,3]"],
        &["grid", "--z1", "0:1:0"],
        &["verify", "--identity", "nonsense"],
        &["eval", "--config", "/nonexistent/job.json"],
        &["eval", "--format", "xml"],
    ] {
        let o = run(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", stderr(&o));
    }
}

#[test]
fn divergence_exits_3() {
    let o = run(&["eval", "--z1", "50", "--max-terms", "20"]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
    assert!(stderr(&o).contains("convergence"));
}

#[test]
fn record_round_trips_bit_exactly() {
    let dir = TempDir::new().unwrap();
    let first = run(&["eval", "--family", "HC", "--variant", "lower", "--x", "0.75", "--z1", "[0.1,0.05]", "--z2", "-0.08", "--z3", "0.12"]);
    assert_eq!(first.status.code(), Some(0), "{}", stderr(&first));
    let path = dir.path().join("record.json");
    fs::write(&path, stdout(&first).trim()).unwrap();
    let second = run(&["eval", "--config", path.to_str().unwrap()]);
    assert_eq!(second.status.code(), Some(0), "{}", stderr(&second));
    assert_eq!(stdout(&first), stdout(&second));
    let (a, b) = (&lines(&first)[0], &lines(&second)[0]);
    for part in ["re", "im"] {
        let bits = |v: &Value| floats(&v["value"][part]).iter().map(|x| x.to_bits()).collect::<Vec<_>>();
        assert_eq!(bits(a), bits(b));
    }
}

#[test]
fn matrix_config_and_out_file() {
    let dir = TempDir::new().unwrap();
    let job = dir.path().join("job.json");
    let out = dir.path().join("out.jsonl");
    fs::write(
        &job,
        r#"{"command":"eval","family":"HA","variant":"complete","x":1,
            "params":{"A":{"rows":2,"re":[1.5,0,0,2]},"B":{"rows":2,"re":[1,0,0,1.5]},
                      "Bp":{"rows":2,"re":[2,0,0,1]},"C":{"rows":2,"re":[2.5,0,0,3]},
                      "Cp":{"rows":2,"re":[3.5,0,0,3]}},
            "points":[[0.1,0.05,0.08],[[0.1,0.02],0,0]]}"#,
    )
    .unwrap();
    let o = run(&["eval", "--config", job.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).is_empty());
    let text = fs::read_to_string(&out).unwrap();
    let recs: Vec<Value> = text.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(recs.len(), 2);
    for r in &recs {
        assert_eq!(r["value"]["rows"], 2);
        let re = floats(&r["value"]["re"]);
        // diagonal parameters give a diagonal value
        assert_eq!(re[1], 0.0);
        assert_eq!(re[2], 0.0);
    }
    let wrong = run(&["grid", "--config", job.to_str().unwrap()]);
    assert_eq!(wrong.status.code(), Some(2));
}

#[test]
fn csv_matches_json() {
    let args = ["grid", "--family", "HB", "--variant", "lower", "--x", "2", "--z1", "0:0.1:2", "--z2", "[0.05,0.01]", "--z3", "-0.05:0.05:3"];
    let json = run(&args);
    let mut csv_args = args.to_vec();
    csv_args.extend(["--format", "csv"]);
    let csv = run(&csv_args);
    assert_eq!(json.status.code(), Some(0), "{}", stderr(&json));
    assert_eq!(csv.status.code(), Some(0), "{}", stderr(&csv));
    let recs = lines(&json);
    let text = stdout(&csv);
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let header = reader.headers().unwrap().clone();
    let col = |name: &str| header.iter().position(|h| h == name).unwrap();
    let rows: Vec<_> = reader.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), recs.len());
    for (row, rec) in rows.iter().zip(&recs) {
        let re: f64 = row[col("re_0_0")].parse().unwrap();
        let im: f64 = row[col("im_0_0")].parse().unwrap();
        assert_eq!(re.to_bits(), floats(&rec["value"]["re"])[0].to_bits());
        assert_eq!(im.to_bits(), floats(&rec["value"]["im"])[0].to_bits());
        let z3: f64 = row[col("z3_re")].parse().unwrap();
        assert_eq!(z3.to_bits(), floats(&rec["z"][2])[0].to_bits());
    }
}

#[test]
fn grid_order_and_count() {
    let o = run(&["grid", "--family", "HC", "--z1", "0:0.2:2", "--z2", "0.05", "--z3", "-0.1:0.1:3"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let recs = lines(&o);
    assert_eq!(recs.len(), 6);
    let z: Vec<(f64, f64, f64)> = recs
        .iter()
        .map(|r| (floats(&r["z"][0])[0], floats(&r["z"][1])[0], floats(&r["z"][2])[0]))
        .collect();
    let expected = [(0.0, -0.1), (0.0, 0.0), (0.0, 0.1), (0.2, -0.1), (0.2, 0.0), (0.2, 0.1)];
    for (got, want) in z.iter().zip(expected) {
        assert!((got.0 - want.0).abs() < 1e-15 && (got.2 - want.1).abs() < 1e-15, "{got:?}");
        assert_eq!(got.1, 0.05);
    }
}

#[test]
fn verify_filtered_group() {
    let o = run(&["verify", "--identity", "decomposition", "--family", "HC"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let recs = lines(&o);
    let (reports, summary) = recs.split_at(recs.len() - 1);
    assert_eq!(reports.len(), 3);
    assert!(reports.iter().all(|r| r["identity"] == "decomposition" && r["family"] == "HC"));
    assert_eq!(summary[0]["summary"]["total"], 3);
    assert_eq!(summary[0]["summary"]["failed"], 0);
}

#[test]
fn verify_impossible_tolerance_exits_1() {
    let o = run(&["verify", "--identity", "decomposition,reindexing", "--tol", "1e-18"]);
    assert_eq!(o.status.code(), Some(1), "{}", stderr(&o));
    let recs = lines(&o);
    let summary = &recs.last().unwrap()["summary"];
    assert!(summary["failed"].as_u64().unwrap() > 0);
    assert!(stderr(&o).contains("FAIL"));
}

#[test]
fn verify_csv_reports() {
    let o = run(&["verify", "--identity", "reindexing", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    assert!(reader.headers().unwrap().iter().any(|h| h == "relative_residual"));
    assert_eq!(reader.records().count(), 3);
}

#[test]
fn verify_all_passes() {
    let o = run(&["verify"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let recs = lines(&o);
    let summary = &recs.last().unwrap()["summary"];
    assert_eq!(summary["failed"], 0);
    assert_eq!(summary["total"].as_u64().unwrap() as usize, recs.len() - 1);
    assert!(recs.len() > 40);
}
