use std::io::Write;
use std::process::{Command, Output};

use serde_json::Value;

fn example(name: &str) -> String {
    format!("{}/examples/{name}.json", env!("CARGO_MANIFEST_DIR"))
}

fn graded(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_graded")).args(args).output().expect("run graded")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("valid JSON")
}

#[test]
fn check_passes_on_every_example() {
    for name in ["flat_chart", "curved_chart", "curved_torus"] {
        let o = graded(&["check", "--manifest", &example(name)]);
        assert_eq!(o.status.code(), Some(0), "{name}: {}", stdout(&o));
        assert!(!stdout(&o).contains("FAIL"));
    }
}

#[test]
fn class_is_trivial() {
    let o = graded(&["class", "--manifest", &example("curved_chart")]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("modular class: trivial, certificate α = 0"));
    assert!(stdout(&o).contains("verified"));
}

#[test]
fn contraction_fields_are_divergence_free() {
    for m in ["flat_chart", "curved_torus"] {
        for d in ["i[1]", "i[2]"] {
            let o = graded(&["div", d, "--manifest", &example(m)]);
            assert_eq!(o.status.code(), Some(0));
            assert_eq!(stdout(&o), format!("div({d}) = 0\n"));
        }
    }
}

#[test]
fn rescaling_adds_the_logarithmic_derivative() {
    // log(1 + x e1 e2) = x e1 e2, and i_1 of that is x e2
    let o = graded(&["div", "i[1]", "--json", "--manifest", &example("curved_chart")]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["divergence"], "x1*e[2]");
    assert_eq!(v["canonical_relation"], true);
}

#[test]
fn hamiltonian_fields_are_divergence_free_when_flat() {
    let o = graded(&["div", "ham(h)", "--json", "--manifest", &example("flat_chart")]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&o)["divergence"], "0");
}

#[test]
fn modular_field_has_no_classical_part() {
    let o = graded(&["modular", "--json", "--manifest", &example("curved_torus")]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert!(v["classical_part"].as_array().unwrap().iter().all(|c| c == "0"));
}

#[test]
fn oracle_matches_every_case() {
    let o = graded(&["oracle", "--seed", "7", "--cases", "50", "--manifest", &example("curved_torus")]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("50/50 exact matches"), "{}", stdout(&o));
}

#[test]
fn bracket_of_coordinates_is_inverse_omega() {
    let o = graded(&["bracket", "x", "y", "--json", "--manifest", &example("flat_chart")]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["command"], "bracket");
    assert_eq!(v["passed"], true);
    assert_eq!(v["bracket"], "-1");
}

#[test]
fn integrate_top_component() {
    let o = graded(&["integrate", "top", "--manifest", &example("curved_torus")]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "integral = 3*(2pi)^2");
}

#[test]
fn continuity_detects_non_solutions() {
    let m = example("flat_chart");
    let ok = graded(&["continuity", "rho", "D", "--manifest", &m]);
    assert_eq!(ok.status.code(), Some(0));
    let bad = graded(&["continuity", "(x - t*y)*e[1]^e[2]", "nabla[1]", "--manifest", &m]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(stdout(&bad).contains("NOT satisfied"));
}

#[test]
fn every_command_emits_json() {
    let m = example("curved_torus");
    let runs: [&[&str]; 8] = [
        &["check"],
        &["theta"],
        &["bracket", "s", "h"],
        &["ham", "s"],
        &["div", "X"],
        &["modular"],
        &["class"],
        &["continuity", "rho", "X"],
    ];
    for args in runs {
        let mut full: Vec<&str> = args.to_vec();
        full.extend(["--json", "--manifest", &m]);
        let o = graded(&full);
        let v = json(&o);
        assert_eq!(v["command"], args[0]);
        assert_eq!(v["passed"], true, "{args:?}: {v}");
    }
}

fn write_temp(name: &str, body: &str) -> String {
    let path = std::env::temp_dir().join(format!("graded-cli-{}-{name}.json", std::process::id()));
    std::fs::File::create(&path).unwrap().write_all(body.as_bytes()).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn bad_input_exits_with_two() {
    let flat = std::fs::read_to_string(example("flat_chart")).unwrap();
    let not_antisymmetric = write_temp("omega", &flat.replace("[[0, 1], [-1, 0]]", "[[0, 1], [1, 0]]"));
    let o = graded(&["check", "--manifest", &not_antisymmetric]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("omega"));

    let broken = write_temp("syntax", "{ \"mode\": ");
    let o = graded(&["check", "--json", "--manifest", &broken]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(json(&o)["error"]["kind"], "input");

    let m = example("flat_chart");
    assert_eq!(graded(&["check", "--manifest", "/nonexistent/graded.json"]).status.code(), Some(2));
    assert_eq!(graded(&["theta"]).status.code(), Some(2));
    assert_eq!(graded(&["bracket", "x +", "y", "--manifest", &m]).status.code(), Some(2));
    assert_eq!(graded(&["div", "i[3]", "--manifest", &m]).status.code(), Some(2));
    assert_eq!(graded(&["integrate", "x", "--manifest", &m]).status.code(), Some(2));
    assert_eq!(graded(&["oracle", "--manifest", &m]).status.code(), Some(2));
    assert_eq!(graded(&["check", "--manifest", &example("curved_torus"), "--mode-override", "chart"]).status.code(), Some(2));
    assert_eq!(graded(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn props_run_on_the_default_instances() {
    let o = graded(&["props", "--seed", "3", "--cases", "4", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    let suites = v["suites"].as_array().unwrap();
    assert!(suites.len() >= 10);
    assert!(suites.iter().all(|s| s["passed"] == s["total"]));
}
