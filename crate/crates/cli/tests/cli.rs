use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use qgraph::ScatteringMatrix;
use serde_json::Value;

fn scenarios() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios")
}

fn qgraph(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qgraph"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

#[test]
fn missing_file_exits_2() {
    let out = qgraph(&["run", "/definitely/not/here.json"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).starts_with("error:"));
}

#[test]
fn malformed_scenarios_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        ("broken.json", "{ not json"),
        ("kind.json", r#"{"kind":"teleport"}"#),
        ("points.json", r#"{"kind":"barrier-sweep","params":{"eta":0.1,"epsilon":0.0},"grid":{"start":0.1,"stop":1.0,"points":1}}"#),
        ("eta.json", r#"{"kind":"barrier-sweep","params":{"eta":1.5,"epsilon":0.0}}"#),
        ("missing_ref.json", r#"{"kind":"star-demo","s1":"nope.json","s2":"nope.json"}"#),
    ];
    for (name, text) in cases {
        let p = write(dir.path(), name, text);
        for cmd in ["run", "verify"] {
            let out = qgraph(&[cmd, p.to_str().unwrap()]);
            assert_eq!(code(&out), 2, "{cmd} {name}: {}", stderr(&out));
            assert!(!stderr(&out).is_empty());
        }
    }
}

#[test]
fn structural_graph_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let mut graph: Value = serde_json::from_str(&fs::read_to_string(scenarios().join("three_vertex_graph.json")).unwrap()).unwrap();
    graph["edges"].as_array_mut().unwrap().pop();
    let scenario = serde_json::json!({"kind": "graph-contract", "graph": graph, "input_port": 1, "output_port": 2});
    let p = write(dir.path(), "g.json", &scenario.to_string());
    let out = qgraph(&["verify", p.to_str().unwrap()]);
    assert_eq!(code(&out), 2, "{}", stderr(&out));
    assert!(stderr(&out).contains("neither wired nor dangling"));
}

#[test]
fn corrupted_local_matrix_exits_3_without_output() {
    let dir = tempfile::tempdir().unwrap();
    let mut graph: Value = serde_json::from_str(&fs::read_to_string(scenarios().join("three_vertex_graph.json")).unwrap()).unwrap();
    let entry = &mut graph["vertices"][1]["smatrix"]["matrix"]["data"][0][1];
    *entry = Value::from(entry.as_f64().unwrap() + 0.25);
    write(dir.path(), "bad_graph.json", &graph.to_string());
    let p = write(
        dir.path(),
        "bad.json",
        r#"{"kind":"graph-contract","graph":"bad_graph.json","input_port":1,"output_port":2}"#,
    );

    let out = qgraph(&["verify", p.to_str().unwrap()]);
    assert_eq!(code(&out), 3, "{}", stderr(&out));
    assert!(stdout(&out).contains("FAIL"));

    let out_dir = dir.path().join("out");
    let out = qgraph(&["run", "--out", out_dir.to_str().unwrap(), p.to_str().unwrap()]);
    assert_eq!(code(&out), 3);
    assert!(!out_dir.exists());
}

#[test]
fn star_demo_prints_one_third() {
    let out = qgraph(&["verify", scenarios().join("star_demo.json").to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = stdout(&out);
    let line = text.lines().find(|l| l.starts_with("transmission[0,0]")).expect("transmission line");
    // "re+imi": the real part ends two digits after its exponent sign.
    let z = line.split('=').nth(1).unwrap().trim();
    let value: f64 = z[..z.find('e').unwrap() + 4].parse().unwrap();
    assert!((value - 1.0 / 3.0).abs() < 1e-12, "{line}");
}

#[test]
fn sweep_run_writes_csv_and_svg() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(
        dir.path(),
        "small.json",
        r#"{"kind":"barrier-sweep","name":"small","output":"results",
            "params":{"eta":0.1,"epsilon":0.1},"grid":{"start":0.01,"stop":1.0,"points":300}}"#,
    );
    let out = qgraph(&["run", p.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));

    let results = dir.path().join("results");
    let csv = fs::read_to_string(results.join("small.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "E_over_V0,p_up_single,p_dn_single,p_up_double,p_dn_double,q_low_single,q_up_single,q_low_double,q_up_double,superactivated"
    );
    assert_eq!(lines.clone().count(), 300);
    assert!(lines.next().unwrap().starts_with("1.000000000000e-02,"));
    for name in ["small_transmission.svg", "small_capacity.svg"] {
        let svg = fs::read_to_string(results.join(name)).unwrap();
        assert!(svg.contains("<svg") && svg.trim_end().ends_with("</svg>"));
    }
}

#[test]
fn sweep_map_is_written_when_epsilon_grid_given() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(
        dir.path(),
        "map.json",
        r#"{"kind":"barrier-sweep","name":"m","params":{"eta":0.1,"epsilon":0.0},
            "grid":{"start":0.01,"stop":1.0,"points":200},
            "epsilon_grid":{"start":0.0,"stop":0.2,"points":3},
            "map_grid":{"start":0.01,"stop":1.0,"points":50}}"#,
    );
    let out_dir = dir.path().join("o");
    let out = qgraph(&["run", "--out", out_dir.to_str().unwrap(), p.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let csv = fs::read_to_string(out_dir.join("m_map.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 150);
    assert!(out_dir.join("m_map.svg").exists());
}

#[test]
fn graph_scenario_writes_channel() {
    let dir = tempfile::tempdir().unwrap();
    let out = qgraph(&["run", "--out", dir.path().to_str().unwrap(), scenarios().join("graph_contract.json").to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let summary: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("three_vertex_channel.json")).unwrap()).unwrap();
    assert_eq!(summary["channel"]["d"], 2);
    let (lo, hi) = (summary["q_low"].as_f64().unwrap(), summary["q_up"].as_f64().unwrap());
    assert!(0.0 <= lo && lo <= hi && hi <= 1.0);
    let s_g: ScatteringMatrix = serde_json::from_str(&fs::read_to_string(dir.path().join("three_vertex_sg.json")).unwrap()).unwrap();
    assert!(s_g.unitarity_defect() < 1e-9);
}

#[test]
fn star_subcommand_composes_files() {
    let s = scenarios();
    let out = qgraph(&[
        "star",
        s.join("beamsplitter_s1.json").to_str().unwrap(),
        s.join("beamsplitter_s2.json").to_str().unwrap(),
        s.join("cascade_wiring.json").to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let composed: ScatteringMatrix = serde_json::from_str(&stdout(&out)).unwrap();
    let t = composed.matrix()[(1, 0)];
    assert!((t.re - 1.0 / 3.0).abs() < 1e-12 && t.im.abs() < 1e-12);

    let out = qgraph(&["star", s.join("beamsplitter_s1.json").to_str().unwrap(), "/nope.json", "/nope.json"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn zero_threads_rejected() {
    let out = qgraph(&["--threads", "0", "verify", scenarios().join("star_demo.json").to_str().unwrap()]);
    assert_eq!(code(&out), 2);
}
