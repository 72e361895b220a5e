use std::io::{BufRead, BufReader, Read, Write};
use std::net::TcpStream;
use std::path::{Path, PathBuf};
use std::process::{Child, Command, Output, Stdio};

use serde_json::{json, Value};

use knotmorph_core::io::{parse_stick_knot, read_obj};

fn corpus(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus").join(format!("{name}.knot"))
}

fn knotmorph(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_knotmorph"))
        .args(args)
        .env_remove("KNOTMORPH_SEED")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json_of(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", stdout(o)))
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn validate_exit_codes() {
    for name in ["unknot64", "fig8", "square_pyramid", "one_crossing"] {
        let o = knotmorph(&["validate", path(&corpus(name))]);
        assert_eq!(o.status.code(), Some(0), "{name}: {}", stdout(&o));
        assert!(stdout(&o).trim_end().ends_with("valid"));
    }
    let o = knotmorph(&["--json", "validate", path(&corpus("bad_collinear"))]);
    assert_eq!(o.status.code(), Some(1));
    let v = json_of(&o);
    assert_eq!(v["schema"], "knotmorph-cli/1");
    assert_eq!(v["valid"], false);
    assert_eq!(v["violations"][0]["kind"], "collinear_triple");

    assert_eq!(knotmorph(&["validate", "/no/such/file.knot"]).status.code(), Some(2));
    assert_eq!(knotmorph(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(knotmorph(&["sweep", path(&corpus("fig8")), "--dir", "1,2"]).status.code(), Some(1));
    assert_eq!(knotmorph(&["--help"]).status.code(), Some(0));
}

#[test]
fn malformed_knot_file_is_a_parse_failure() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("broken.knot");
    std::fs::write(&f, "0 0 0\n1 0 oops\n").unwrap();
    let o = knotmorph(&["validate", path(&f)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));
}

#[test]
fn refine_tabulates_and_writes_iterates() {
    let dir = tempfile::tempdir().unwrap();
    let o = knotmorph(&["--json", "--out", path(dir.path()), "refine", path(&corpus("fig8")), "--iters", "5"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json_of(&o);
    let d: Vec<f64> = v["iterates"].as_array().unwrap().iter().map(|r| r["distance"].as_f64().unwrap()).collect();
    assert_eq!(d.len(), 6);
    assert!(d.windows(2).all(|w| w[1] < w[0]), "{d:?}");
    assert!(d[5] / d[0] < 0.25);
    for j in 0..=5 {
        let text = std::fs::read_to_string(dir.path().join(format!("fig8.iter{j}.knot"))).unwrap();
        let record = parse_stick_knot(&text).unwrap();
        assert_eq!(record.polygon.len(), 7 << j);
    }
}

#[test]
fn documented_examples() {
    let o = knotmorph(&["sweep", path(&corpus("unknot64")), "--dir", "0,0,1", "--length", "auto"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().last(), Some("Certified"));

    let o = knotmorph(&["rule", path(&corpus("unknot64")), path(&corpus("fig8"))]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().last(), Some("Unknown (self-intersecting): 943 witness pairs"));

    let o = knotmorph(&["validate", path(&corpus("bad_collinear"))]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("violation: collinear triple starting at point 0"));
}

#[test]
fn numeric_flags_are_checked_before_reading_input() {
    // the knot file does not exist, so reaching it would exit 2
    let missing = "/no/such/file.knot";
    for args in [
        vec!["refine", missing, "--samples", "3"],
        vec!["sweep", missing, "--length", "-1"],
        vec!["rule", missing, missing, "--vsteps", "0"],
        vec!["morph", missing, missing, "--tol", "2"],
        vec!["iterate-morph", missing, "--from", "3", "--grid", "4"],
        vec!["replay", missing, "--morph", "m", "--s", "1.5"],
    ] {
        assert_eq!(knotmorph(&args).status.code(), Some(1), "{args:?}");
    }
}

#[test]
fn sweep_below_and_above_the_bound() {
    let fig8 = corpus("fig8");
    let o = knotmorph(&["--json", "sweep", path(&fig8)]);
    assert_eq!(o.status.code(), Some(0));
    let v = json_of(&o);
    assert_eq!(v["verdict"], "certified");
    let bound = v["safe_sweep_length"].as_f64().unwrap();
    assert!((v["length"].as_f64().unwrap() - 0.99 * bound).abs() < 1e-15);

    // well past the bound the sweep runs into a crossing strand
    let dir = v["direction"].as_array().unwrap().iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
    let far = (2.5 * bound).to_string();
    let o = knotmorph(&["sweep", path(&fig8), "--dir", &dir, "--length", &far, "--vsteps", "15"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("Unknown (self-intersecting)"), "{}", stdout(&o));
}

#[test]
fn output_is_deterministic_and_seed_env_overrides_flag() {
    let args = ["--json", "--seed", "5", "sweep", "--dir", "0,0,1"];
    let mut a: Vec<&str> = args.to_vec();
    let fig8 = corpus("fig8");
    a.push(path(&fig8));
    let first = knotmorph(&a);
    assert_eq!(first.stdout, knotmorph(&a).stdout);

    let env = Command::new(env!("CARGO_BIN_EXE_knotmorph"))
        .args(["--json", "--seed", "999", "sweep", "--dir", "0,0,1", path(&fig8)])
        .env("KNOTMORPH_SEED", "5")
        .output()
        .unwrap();
    assert_eq!(env.stdout, first.stdout);

    let dir = tempfile::tempdir().unwrap();
    let out = path(dir.path());
    let run = || knotmorph(&["--out", out, "sweep", path(&fig8)]);
    let files = || ["fig8_sweep.obj", "fig8_sweep.witness.obj"].map(|f| std::fs::read(dir.path().join(f)).unwrap());
    let a = run();
    let exported = files();
    let b = run();
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(exported, files());
}

#[test]
fn rule_unknot_to_fig8_reports_witnesses_and_exports() {
    let dir = tempfile::tempdir().unwrap();
    let o = knotmorph(&[
        "--json",
        "--out",
        path(dir.path()),
        "rule",
        path(&corpus("unknot64")),
        path(&corpus("fig8")),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v = json_of(&o);
    assert_eq!(v["verdict"], "unknown");
    assert_eq!(v["samples"], 512);
    // golden at 512 samples x 16 v_steps
    assert_eq!(v["witness_pairs"].as_array().unwrap().len(), 943);

    let mesh = read_obj(&std::fs::read_to_string(dir.path().join("unknot64_fig8_rule.obj")).unwrap()).unwrap();
    assert_eq!(mesh.vertices.len(), 512 * 17);
    assert_eq!(mesh.triangles.len(), 2 * 512 * 16);
    let witness = std::fs::read_to_string(dir.path().join("unknot64_fig8_rule.witness.obj")).unwrap();
    assert_eq!(witness.lines().filter(|l| l.starts_with("l ")).count(), 943);
}

#[test]
fn morph_between_unknots_stays_embedded() {
    let o = knotmorph(&[
        "--json",
        "morph",
        path(&corpus("unknot64")),
        path(&corpus("square_pyramid")),
        "--samples",
        "128",
        "--grid",
        "16",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v = json_of(&o);
    assert_eq!(v["transition"]["summary"]["bracket"], Value::Null);
    assert_eq!(v["transition"]["summary"]["already_intersecting"], false);
}

struct Server(Child);

impl Drop for Server {
    fn drop(&mut self) {
        let _ = self.0.kill();
        let _ = self.0.wait();
    }
}

fn http(addr: &str, method: &str, target: &str, body: Option<&Value>) -> (u16, Value) {
    let mut stream = TcpStream::connect(addr).unwrap();
    let payload = body.map(|b| b.to_string()).unwrap_or_default();
    write!(
        stream,
        "{method} {target} HTTP/1.1\r\nHost: {addr}\r\nConnection: close\r\nContent-Type: application/json\r\nContent-Length: {}\r\n\r\n{payload}",
        payload.len()
    )
    .unwrap();
    let mut raw = String::new();
    stream.read_to_string(&mut raw).unwrap();
    let (head, body) = raw.split_once("\r\n\r\n").unwrap();
    assert!(!head.to_ascii_lowercase().contains("chunked"));
    let status = head.split_whitespace().nth(1).unwrap().parse().unwrap();
    (status, serde_json::from_str(body).unwrap_or(Value::Null))
}

#[test]
fn iterate_morph_replays_like_the_service() {
    let dir = tempfile::tempdir().unwrap();
    let o = knotmorph(&[
        "--json",
        "--out",
        path(dir.path()),
        "iterate-morph",
        path(&corpus("fig8")),
        "--from",
        "3",
        "--seed",
        "41",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v = json_of(&o);
    let bracket = &v["transition"]["summary"]["bracket"];
    let (lo, hi) = (bracket[0].as_f64().unwrap(), bracket[1].as_f64().unwrap());
    // golden for the bundled figure-eight at 64 samples x 16 v_steps
    assert!(lo <= 0.5418458 && 0.5418458 <= hi, "[{lo}, {hi}]");
    assert!(hi - lo <= 1e-6);

    let session = dir.path().join("fig8_iter3-4.session.json");
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(&session).unwrap()).unwrap();
    assert_eq!(doc["results"][0]["kind"], "transition");

    let replay = |s: f64| {
        let o = knotmorph(&["--json", "replay", path(&session), "--morph", "fig8_iter3-4", "--s", &s.to_string()]);
        assert_eq!(o.status.code(), Some(0));
        json_of(&o)["mesh"].clone()
    };
    assert_eq!(replay(lo)["intersecting"], false);
    let at_hi = replay(hi);
    assert_eq!(at_hi["intersecting"], true);

    let mut child = Command::new(env!("CARGO_BIN_EXE_knotmorph"))
        .args(["serve", "--port", "0"])
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    let mut line = String::new();
    BufReader::new(child.stdout.take().unwrap()).read_line(&mut line).unwrap();
    let _server = Server(child);
    let addr = line.trim().trim_start_matches("listening on http://").to_string();

    let (status, created) = http(&addr, "POST", "/api/v1/sessions", Some(&json!({ "document": doc })));
    assert_eq!(status, 201, "{created}");
    let id = created["id"].as_u64().unwrap();
    let (status, served) = http(
        &addr,
        "GET",
        &format!("/api/v1/sessions/{id}/morphs/fig8_iter3-4/mesh?s={hi}&samples=64&v_steps=16"),
        None,
    );
    assert_eq!(status, 200, "{served}");
    assert_eq!(served["mesh"], at_hi);
}
