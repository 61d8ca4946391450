use std::path::PathBuf;
use std::process::{Command, Output};

use gqft::feynman::Potential;
use gqft::gaussian::relative_data;
use gqft::graph::{BoundaryMarking, Graph};
use gqft::nonpert::{z_nonpert, QuadratureScheme};
use serde_json::Value;

fn data(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "tests", "data", name]
        .iter()
        .collect();
    p.display().to_string()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gqft"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is json")
}

fn stderr_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stderr).expect("stderr is json")
}

fn matrix(v: &Value) -> Vec<Vec<f64>> {
    v.as_array()
        .unwrap()
        .iter()
        .map(|r| {
            r.as_array()
                .unwrap()
                .iter()
                .map(|x| x.as_f64().unwrap())
                .collect()
        })
        .collect()
}

#[test]
fn compute_line3_determinant() {
    let out = run(&["compute", "--graph", &data("line3.json"), "--m2", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert!((v["result"]["det"].as_f64().unwrap() - 8.0).abs() < 1e-12);
    assert_eq!(v["config"]["m2"].as_f64(), Some(1.0));
    let g = matrix(&v["result"]["propagator"]);
    assert!((g[0][0] - 5.0 / 8.0).abs() < 1e-14);
}

#[test]
fn missing_file_is_an_input_error() {
    let out = run(&["compute", "--graph", &data("absent.json"), "--m2", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stderr_json(&out)["error"]["kind"], "io");
    assert!(out.stdout.is_empty());
}

#[test]
fn usage_errors_are_json() {
    let out = run(&["compute", "--m2", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stderr_json(&out)["error"]["kind"], "usage");
    let out = run(&["compute", "--graph", &data("line3.json"), "--m2=-1"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stderr_json(&out)["error"]["kind"], "input");
}

#[test]
fn relative_dump_equals_library_call() {
    let out = run(&[
        "compute",
        "--graph",
        &data("circle5.json"),
        "--m2",
        "0.7",
        "--boundary",
        "1,3",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    let g = Graph::circle(5);
    let rd = relative_data(&g, &BoundaryMarking::induced(&g, ["1", "3"]).unwrap(), 0.7).unwrap();
    let dn = matrix(&v["result"]["dn"]);
    for (i, row) in dn.iter().enumerate() {
        for (j, x) in row.iter().enumerate() {
            assert_eq!(*x, rd.dn[(i, j)]);
        }
    }
    assert_eq!(v["result"]["det"].as_f64(), Some(rd.det));
    assert_eq!(v["result"]["bulk"], serde_json::json!(["2", "4", "5"]));
}

#[test]
fn glue_check_two_plus_two() {
    let out = run(&[
        "glue-check",
        "--left",
        &data("left2.json"),
        "--right",
        &data("right2.json"),
        "--identify",
        "2=1",
        "--m2",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let r = &stdout_json(&out)["result"]["report"];
    assert!(r["propagator"]["residual"].as_f64().unwrap() < 1e-10);
    assert!(r["determinant"]["residual"].as_f64().unwrap() < 1e-10);
    assert!((r["determinant"]["rhs"].as_f64().unwrap() - 8.0).abs() < 1e-12);
}

#[test]
fn glue_check_with_empty_interface() {
    let out = run(&[
        "glue-check",
        "--left",
        &data("line3.json"),
        "--right",
        &data("c3.json"),
        "--m2",
        "0.5",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out)["result"]["passed"], true);
}

#[test]
fn pathsum_circle3_table() {
    let out = run(&[
        "pathsum",
        "--graph",
        &data("c3.json"),
        "--m2",
        "1",
        "--max-len",
        "6",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("order,count,coefficient,partial"));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    let counts: Vec<&str> = rows.iter().map(|r| r[1]).collect();
    assert_eq!(counts, ["0", "1", "1", "3", "5", "11", "21"]);
    let mut partial = 0.0;
    for r in &rows {
        partial += r[2].parse::<f64>().unwrap();
        assert!((partial - r[3].parse::<f64>().unwrap()).abs() < 1e-15);
    }
    assert_eq!(stderr_json_line(&out.stderr)["config"]["to"], "2");
}

fn stderr_json_line(bytes: &[u8]) -> Value {
    serde_json::from_slice(bytes).expect("config block on stderr")
}

#[test]
fn feynman_lists_the_figure_eight() {
    let out = run(&["feynman", "--order", "1", "--potential", "p4=1"]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    let graphs = v["result"]["graphs"].as_array().unwrap();
    let eight = graphs.iter().find(|g| g["order"] == 1).unwrap();
    assert_eq!(eight["aut"], 8);
    assert_eq!(eight["aut_by_darts"], 8);
    assert_eq!(eight["vertices"], 1);
}

#[test]
fn nonpert_equals_library_call() {
    let out = run(&[
        "nonpert",
        "--graph",
        &data("line3.json"),
        "--m2",
        "1",
        "--potential",
        "p4=1",
        "--hbar",
        "0.5",
        "--quad-nodes",
        "32",
        "--seed",
        "3",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    let pot: Potential = "p4=1".parse().unwrap();
    let z = z_nonpert(
        &Graph::line(3),
        1.0,
        &pot,
        0.5,
        &QuadratureScheme::with_nodes(32).with_seed(3),
    )
    .unwrap();
    assert_eq!(v["result"]["value"].as_f64(), Some(z.value));
    assert_eq!(v["config"]["scheme"]["monte_carlo"]["seed"], 3);
}

#[test]
fn sweep_flags_the_single_vertex_lattice() {
    let out = run(&[
        "sweep-continuum",
        "--shape",
        "line",
        "--bc",
        "DD",
        "--epsilons",
        "1",
        "--format",
        "json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let rows = stdout_json(&out)["result"]["rows"]
        .as_array()
        .unwrap()
        .clone();
    assert!(!rows.is_empty());
    assert!(rows.iter().all(|r| r["degenerate"] == true));
    let out = run(&["sweep-continuum", "--shape", "torus"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn sweep_csv_header() {
    let out = run(&["sweep-continuum", "--shape", "circle", "--epsilons", "0.1"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("epsilon,vertices,quantity,value,target,relative_error,degenerate\n"));
}

#[test]
fn verify_all_exit_code_follows_the_verdict() {
    let out = run(&["verify-all", "--seed", "7"]);
    let v = stdout_json(&out);
    let passed = v["result"]["passed"].as_bool().unwrap();
    assert_eq!(out.status.code(), Some(if passed { 0 } else { 1 }));
    let criteria = v["result"]["criteria"].as_array().unwrap();
    assert_eq!(criteria.len(), 11);
    let subset = run(&["verify-all", "--criteria", "4,6"]);
    assert_eq!(subset.status.code(), Some(0));
    assert_eq!(stdout_json(&subset)["result"]["passed"], true);
    assert_eq!(
        run(&["verify-all", "--criteria", "12"]).status.code(),
        Some(2)
    );
}
