use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn planefix(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_planefix")).args(args).output().expect("binary runs")
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("report is JSON")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("planefix-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn fmot_on_squaring() {
    let out = planefix(&["fmot", "--map", "poly:[0,0,1]", "--curve", "circle:0.9", "--x", "hull"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["result"]["index"], 1);
    assert_eq!(r["result"]["variation_sum"], 0);
    assert_eq!(r["status"], "holds");
    assert_eq!(r["tool"], "planefix");
    assert_eq!(r["config"]["common"]["tol_geom"], 1e-9);
}

#[test]
fn chebyshev_ray_lands_at_two() {
    let out = planefix(&["ray", "--map", "poly:[-2,0,1]", "--angle", "0", "--depth", "20"]);
    assert_eq!(out.status.code(), Some(0));
    let landing = &report(&out)["result"]["landing"];
    assert!((landing[0].as_f64().unwrap() - 2.0).abs() < 1e-9);
    assert!(landing[1].as_f64().unwrap().abs() < 1e-9);
}

#[test]
fn malformed_input_is_exit_two() {
    let bad = scratch("bad.json");
    std::fs::write(&bad, "{").unwrap();
    let bad = bad.to_string_lossy().into_owned();
    let out = planefix(&["variation", "--map", "poly:[0,2]", "--curve", &bad, "--x", "segment:-1,0,1,0"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
    assert_eq!(planefix(&["variation", "--curve", &bad]).status.code(), Some(2));
    assert_eq!(planefix(&["index", "--map", "poly:[]", "--curve", "circle:1"]).status.code(), Some(2));
}

#[test]
fn violated_hypothesis_is_exit_one() {
    let inst = scratch("pointdyn.json");
    std::fs::write(&inst, r#"{"x": {"point": [-1.0, 0.0]}, "case": "invariant"}"#).unwrap();
    let out = planefix(&["puzzle", "--map", "poly:[-2,0,1]", "--pointdyn", &inst.to_string_lossy()]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(report(&out)["result"]["verdict"]["verdict"], "hypothesis_violated");
}

#[test]
fn unresolved_impression_is_exit_three() {
    let out = planefix(&["ray", "--map", "poly:[0,0,1]", "--angle", "0", "--impression", "3"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn variation_figure_has_one_plus_marker_and_three_junction_styles() {
    let svg = scratch("variation.svg");
    let out = planefix(&[
        "variation",
        "--map",
        "poly:[0,2]",
        "--curve",
        "arc:0.5,0,180",
        "--x",
        "segment:-1,0,1,0",
        "--svg",
        &svg.to_string_lossy(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(report(&out)["result"]["variation"], 1);
    let text = std::fs::read_to_string(&svg).unwrap();
    assert_eq!(text.matches(">+1</text>").count(), 1);
    assert!(!text.contains(">-1</text>"));
    let dashes: std::collections::BTreeSet<&str> =
        text.match_indices("stroke-dasharray=\"").map(|(i, _)| text[i + 18..].split('"').next().unwrap()).collect();
    assert!(dashes.len() >= 3, "{dashes:?}");
}

#[test]
fn lamination_figures() {
    let svg = scratch("empty.svg");
    let empty = scratch("empty.json");
    std::fs::write(&empty, r#"{"degree": 2, "classes": []}"#).unwrap();
    let out = planefix(&["lamination", "--file", &empty.to_string_lossy(), "--svg", &svg.to_string_lossy()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(std::fs::read_to_string(&svg).unwrap().matches("<path").count(), 1);

    // seed leaf plus 1 + 2 + 4 pullbacks
    let svg = scratch("basilica.svg");
    let out = planefix(&["lamination", "--seed", "1/3,2/3", "--depth", "3", "--svg", &svg.to_string_lossy()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(std::fs::read_to_string(&svg).unwrap().matches("<path").count(), 1 + 8);
}

#[test]
fn render_reproduces_the_figure() {
    let (json, svg, again) = (scratch("tent.json"), scratch("tent.svg"), scratch("tent-again.svg"));
    let out =
        planefix(&["dendrite", "--preset", "tent", "--out", &json.to_string_lossy(), "--svg", &svg.to_string_lossy()]);
    assert_eq!(out.status.code(), Some(0));
    let out = planefix(&["render", "--report", &json.to_string_lossy(), "--svg", &again.to_string_lossy()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(std::fs::read(&svg).unwrap(), std::fs::read(&again).unwrap());
}
