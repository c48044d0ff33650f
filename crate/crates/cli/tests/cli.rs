use std::fs;

use assert_cmd::Command;
use isoclust_core::{junction_angles, validate, DiscreteCluster, QuadratureParams};

fn isoclust() -> Command {
    let mut cmd = Command::cargo_bin("isoclust").unwrap();
    cmd.env_remove("ISOCLUST_SEED");
    cmd
}

fn stdout_of(cmd: &mut Command) -> String {
    let out = cmd.assert().success().get_output().stdout.clone();
    String::from_utf8(out).unwrap()
}

fn field(text: &str, key: &str) -> f64 {
    text.lines()
        .find_map(|l| l.strip_prefix(&format!("{key} ")))
        .unwrap_or_else(|| panic!("no {key} in {text}"))
        .split_whitespace()
        .next()
        .unwrap()
        .parse()
        .unwrap()
}

#[test]
fn lens_prints_the_constants() {
    let out = stdout_of(isoclust().arg("lens"));
    assert!((field(&out, "radius") - 0.9022677875844296).abs() < 1e-12);
    assert!((field(&out, "area") - 1.0).abs() < 1e-12);
    let r = field(&out, "radius");
    assert!((field(&out, "finite_perimeter") - 4.0 * std::f64::consts::PI * r / 3.0).abs() < 1e-12);
}

#[test]
fn lens_area_scales_with_radius_squared() {
    let one = field(&stdout_of(isoclust().args(["lens", "--radius", "1"])), "area");
    let two = field(&stdout_of(isoclust().args(["lens", "--radius", "2"])), "area");
    assert!((two - 4.0 * one).abs() < 1e-12);
}

#[test]
fn lens_json_revalidates_and_svg_has_one_path_per_interface() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("lens.json");
    let svg = dir.path().join("lens.svg");
    isoclust()
        .args(["lens", "--resolution", "128", "--json"])
        .arg(&json)
        .arg("--svg")
        .arg(&svg)
        .assert()
        .success();
    let c = DiscreteCluster::from_json(&fs::read_to_string(&json).unwrap()).unwrap();
    assert!(validate(&c, &QuadratureParams::default()).unwrap().passed());
    let figure = fs::read_to_string(&svg).unwrap();
    assert_eq!(figure.matches("<path").count(), c.interfaces.len() + 1);
}

#[test]
fn symmetric_double_bubble_has_flat_middle() {
    let out = stdout_of(isoclust().args(["double-bubble", "--area", "1"]));
    assert!(out.lines().any(|l| l == "r0 inf"));
    assert!((field(&out, "r1") - 0.6290169361645311).abs() < 1e-10);
}

#[test]
fn large_double_bubble_is_close_to_the_lens_angle() {
    let out = stdout_of(isoclust().args(["double-bubble", "--area", "10000"]));
    assert!((field(&out, "theta0") - std::f64::consts::FRAC_PI_3).abs() < 0.05);
}

#[test]
fn bad_input_is_a_usage_error() {
    isoclust().args(["double-bubble", "--area", "-1"]).assert().code(2);
    isoclust().args(["lens", "--no-such-flag"]).assert().code(2);
    isoclust().args(["sweep", "--areas", "100,10"]).assert().code(2);
}

#[test]
fn sweep_csv_header_and_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for path in [&a, &b] {
        isoclust().args(["sweep", "--areas", "100", "--resolution", "256", "--csv"]).arg(path).assert().success();
    }
    let text = fs::read_to_string(&a).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 2);
    assert_eq!(
        lines[0],
        "A,r0,r1,theta0,theta1,gap_r0,gap_r1,gap_theta0,gap_theta1,distance_B2,perimeter_B2"
    );
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
}

#[test]
fn flow_on_stationary_lens_barely_moves() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("lens.json");
    let report = dir.path().join("report.csv");
    let curvature = dir.path().join("curvature.csv");
    isoclust().args(["lens", "--resolution", "256", "--json"]).arg(&input).assert().success();
    let out = stdout_of(
        isoclust()
            .arg("flow")
            .arg("--input")
            .arg(&input)
            .arg("--report")
            .arg(&report)
            .arg("--curvature")
            .arg(&curvature),
    );
    assert!(field(&out, "steps_taken") <= 200.0);
    assert!(field(&out, "perimeter_change").abs() < 1e-4);
    let header = fs::read_to_string(&report).unwrap();
    assert!(header.starts_with("steps_taken,converged,final_perimeter,max_junction_angle_dev,max_area_drift\n"));
    assert!(fs::read_to_string(&curvature).unwrap().starts_with("id,mean,std,max_abs\n"));
}

#[test]
fn probe_seed_comes_from_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("probe.csv");
    isoclust()
        .env("ISOCLUST_SEED", "41")
        .args(["probe", "--trials", "2", "--resolution", "16", "--csv"])
        .arg(&csv)
        .assert()
        .success();
    let text = fs::read_to_string(&csv).unwrap();
    let seeds: Vec<&str> = text.lines().skip(1).map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(seeds, ["41", "42"]);
    assert!(text.starts_with("seed,perturbed_perimeter,final_perimeter,hausdorff,hausdorff_aligned,steps,converged\n"));
}

#[test]
fn explicit_seed_beats_the_environment() {
    let out = stdout_of(
        isoclust().env("ISOCLUST_SEED", "41").args(["probe", "--trials", "1", "--resolution", "16", "--seed", "3"]),
    );
    assert!(out.lines().nth(1).unwrap().starts_with("3 "));
}

#[test]
fn hopeless_perturbation_exits_5() {
    isoclust().args(["probe", "--trials", "1", "--resolution", "16", "--amplitude", "100"]).assert().code(5);
}

#[test]
fn chalk_conjecture_reaches_120_degree_junctions() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("chalk.json");
    let csv = dir.path().join("chalk.csv");
    isoclust()
        .args(["conjecture", "--shape", "chalk", "--resolution", "32", "--output"])
        .arg(&json)
        .arg("--csv")
        .arg(&csv)
        .assert()
        .success();
    let c = DiscreteCluster::from_json(&fs::read_to_string(&json).unwrap()).unwrap();
    let angles = junction_angles(&c).unwrap();
    assert_eq!(angles.len(), 3);
    for j in angles {
        assert!(j.max_deviation() < 1.0, "{j:?}");
    }
    let row = fs::read_to_string(&csv).unwrap();
    assert!(row.lines().next().unwrap().starts_with("shape,resolution,steps_taken,converged,final_perimeter"));
}
