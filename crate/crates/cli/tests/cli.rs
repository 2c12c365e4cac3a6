use std::io::{BufRead, BufReader};
use std::path::Path;
use std::process::{Command, Output, Stdio};
use std::time::Duration;

use futures::{SinkExt, StreamExt};
use serde_json::Value;
use tokio_tungstenite::tungstenite::Message;

fn gazearm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gazearm")).args(args).env_remove("GAZEARM_SEED").env_remove("GAZEARM_PORT").output().unwrap()
}

fn ok(args: &[&str]) -> String {
    let out = gazearm(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn calibrate_train_predict() {
    let dir = tempfile::tempdir().unwrap();
    let rec = dir.path().join("pursuit.csv");
    let set = dir.path().join("set.csv");
    let model = dir.path().join("model.json");
    ok(&["synth-calibration", "--out", p(&rec), "--seed", "4"]);
    let text = ok(&["calibrate", "--replay", p(&rec), "--out", p(&set)]);
    assert!(text.contains("labelled examples"), "{text}");
    let text = ok(&["train", "--set", p(&set), "--out", p(&model), "--seed", "4"]);
    assert!(text.contains("converged true"), "{text}");
    // a viewer looking straight ahead from the default geometry sees the centre block
    let block = ok(&["predict", "--model", p(&model), "--gaze", "0.0524,0,-0.9986,-0.0524,0,-0.9986"]);
    assert_eq!(block.trim(), "4");
    let per_sample = ok(&["predict", "--model", p(&model), "--replay", p(&rec)]);
    assert!(per_sample.lines().count() > 500);
}

#[test]
fn calibrate_map_from_pairs() {
    let dir = tempfile::tempdir().unwrap();
    let pairs = dir.path().join("pairs.csv");
    let out = dir.path().join("map.json");
    let mut csv = String::from("dx_px,dy_px,rx_cm,ry_cm\n");
    for (x, y) in [(192.0, 108.0), (960.0, 108.0), (1728.0, 108.0), (192.0, 540.0), (960.0, 540.0), (1728.0, 540.0), (192.0, 972.0), (960.0, 972.0), (1728.0, 972.0)] {
        csv += &format!("{x},{y},{},{}\n", x / 96.0 - 10.0, 20.0 - y / 72.0);
    }
    std::fs::write(&pairs, csv).unwrap();
    let text = ok(&["calibrate-map", "--pairs", p(&pairs), "--out", p(&out)]);
    assert!(text.contains("R2 1.0000"), "{text}");
    let map: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert!((map["matrix"][0][0].as_f64().unwrap() - 1.0 / 96.0).abs() < 1e-9);
}

#[test]
fn pointing_and_metrics() {
    let dir = tempfile::tempdir().unwrap();
    let log = dir.path().join("pointing.jsonl");
    let text = ok(&["run-pointing", "--synthetic", "--seed", "2", "--trials", "10", "--latency-ms", "2000", "--log", p(&log)]);
    let summary: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(summary["response_ms"].as_array().unwrap().len(), 10);
    let again: Value = serde_json::from_str(&ok(&["metrics", "--log", p(&log)])).unwrap();
    assert_eq!(again, summary);
}

#[test]
fn pointing_through_the_gaze_pipeline() {
    let text = ok(&["run-pointing", "--synthetic", "--seed", "3", "--trials", "5"]);
    let summary: Value = serde_json::from_str(&text).unwrap();
    assert!(summary["response_median_ms"].as_f64().unwrap() > 1000.0);
}

#[test]
fn pointing_needs_a_source() {
    let out = gazearm(&["run-pointing"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("--synthetic"));
}

#[test]
fn reachability_reports_metrics() {
    let dir = tempfile::tempdir().unwrap();
    let log = dir.path().join("reach.jsonl");
    let text = ok(&["run-reachability", "--seed", "5", "--runs", "2", "--log", p(&log)]);
    assert_eq!(text.lines().count(), 2);
    assert!(text.lines().all(|l| l.contains("reached true")), "{text}");
    let m: Value = serde_json::from_str(&ok(&["metrics", "--log", p(&log)])).unwrap();
    assert_eq!(m["completion_ms"].as_array().unwrap().len(), 1);
}

#[test]
fn seed_from_environment() {
    let with_env = Command::new(env!("CARGO_BIN_EXE_gazearm"))
        .args(["run-pointing", "--synthetic", "--trials", "3", "--latency-ms", "1500"])
        .env("GAZEARM_SEED", "9")
        .output()
        .unwrap();
    let with_flag = ok(&["run-pointing", "--synthetic", "--trials", "3", "--latency-ms", "1500", "--seed", "9"]);
    assert_eq!(String::from_utf8(with_env.stdout).unwrap(), with_flag);
}

#[tokio::test]
async fn serve_websocket_loopback() {
    let mut child = Command::new(env!("CARGO_BIN_EXE_gazearm"))
        .args(["serve", "--duration-s", "20"])
        .env("GAZEARM_PORT", "0")
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    let mut line = String::new();
    BufReader::new(child.stdout.take().unwrap()).read_line(&mut line).unwrap();
    let url = line.trim().strip_prefix("listening on ").unwrap().to_string();
    let (mut ws, _) = tokio_tungstenite::connect_async(url).await.unwrap();

    ws.send(Message::Text("{\"type\":\"bogus\"}".into())).await.unwrap();
    ws.send(Message::Text("{\"type\":\"select\",\"region\":\"four-way\"}".into())).await.unwrap();
    let mut saw_error = false;
    let mut screen = None;
    let deadline = tokio::time::Instant::now() + Duration::from_secs(10);
    while screen.is_none() || !saw_error {
        let msg = tokio::time::timeout_at(deadline, ws.next()).await.expect("gateway replies").unwrap().unwrap();
        let Message::Text(text) = msg else { continue };
        let v: Value = serde_json::from_str(&text).unwrap();
        match v["type"].as_str() {
            Some("error") => saw_error = true,
            Some("state") if v["screen"] == "four-way" => {
                assert_eq!(v["regions"].as_array().unwrap().len(), 7);
                assert_eq!(v["tip"].as_array().unwrap().len(), 3);
                screen = Some(v["screen"].clone());
            }
            _ => {}
        }
    }
    ws.close(None).await.ok();
    child.kill().ok();
    child.wait().ok();
}
