use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use isoclust_core::measure::chamber_area;
use isoclust_core::{
    build_conjecture_seed, build_double_bubble, build_lens, build_standard_lens, cluster_distance,
    evolve, lens_from_radius, limit_gap, local_min_probe, relative_perimeter, solve_double_bubble,
    standard_lens_radius, stationarity, validate, ConjectureKind, DiscreteCluster, Error, FlowParams,
    QuadratureParams, Radius, Window,
};
use serde::Serialize;

use crate::output::{sig4, write_atomic, write_csv};
use crate::{svg, Command, FlowArgs, Shape};

pub fn run(command: Command) -> Result<()> {
    match command {
        Command::Lens { radius, resolution, window_r, svg, json } => {
            lens(radius, resolution, window_r, svg.as_deref(), json.as_deref())
        }
        Command::DoubleBubble { area, tol, resolution, window_r, svg, json } => {
            double_bubble(area, tol, resolution, window_r, svg.as_deref(), json.as_deref())
        }
        Command::Sweep { areas, window_r, resolution, csv } => sweep(&areas, window_r, resolution, csv.as_deref()),
        Command::Flow { input, params, output, report, curvature, svg } => flow(
            &input,
            params,
            output.as_deref(),
            report.as_deref(),
            curvature.as_deref(),
            svg.as_deref(),
        ),
        Command::Probe { input, trials, amplitude, seed, resolution, window_r, params, csv } => {
            probe(input, trials, amplitude, seed, resolution, window_r, params, csv.as_deref())
        }
        Command::Conjecture { shape, resolution, window_r, params, output, csv, svg } => {
            conjecture(shape, resolution, window_r, params, output.as_deref(), csv.as_deref(), svg.as_deref())
        }
    }
}

fn window(r: f64) -> Result<Window> {
    let w = Window::disk(r);
    if !w.is_valid() {
        return Err(Error::Domain(format!("window radius must be positive, got {r}")).into());
    }
    Ok(w)
}

fn emit(c: &DiscreteCluster, json: Option<&Path>, svg_path: Option<&Path>) -> Result<()> {
    if let Some(path) = json {
        write_atomic(path, c.to_json().as_bytes())?;
    }
    if let Some(path) = svg_path {
        write_atomic(path, svg::render(c).as_bytes())?;
    }
    Ok(())
}

fn lens(radius: Option<f64>, resolution: usize, window_r: f64, svg: Option<&Path>, json: Option<&Path>) -> Result<()> {
    let s = radius.unwrap_or_else(standard_lens_radius);
    let g = lens_from_radius(s)?;
    println!("radius {:.15}", g.radius);
    println!("area {:.15}", g.area);
    println!("finite_perimeter {:.15}", g.finite_perimeter);
    println!("junction_left {:.15} {:.15}", g.junction_left.x, g.junction_left.y);
    println!("junction_right {:.15} {:.15}", g.junction_right.x, g.junction_right.y);
    if svg.is_some() || json.is_some() {
        let w = window(window_r)?;
        let c = match radius {
            None => build_standard_lens(&w, resolution)?,
            Some(s) => build_lens(&w, s, resolution)?,
        };
        println!("discrete_area {:.15}", chamber_area(&c, "E1")?);
        println!("relative_perimeter {:.15}", relative_perimeter(&c, &w)?);
        emit(&c, json, svg)?;
    }
    Ok(())
}

fn radius_text(r: Radius) -> String {
    match r {
        Radius::Finite(v) => format!("{v:.15}"),
        Radius::Infinite => "inf".to_string(),
    }
}

fn double_bubble(
    area: f64,
    tol: f64,
    resolution: usize,
    window_r: f64,
    svg: Option<&Path>,
    json: Option<&Path>,
) -> Result<()> {
    let g = solve_double_bubble(area, tol)?;
    println!("A {area}");
    println!("r0 {}", radius_text(g.r0));
    println!("r1 {:.15}", g.r1);
    println!("r2 {:.15}", g.r2);
    println!("theta0 {:.15}", g.theta0);
    println!("theta1 {:.15}", g.theta1);
    println!("theta2 {:.15}", g.theta2);
    println!("junction_left {:.15} {:.15}", g.junctions[0].x, g.junctions[0].y);
    println!("junction_right {:.15} {:.15}", g.junctions[1].x, g.junctions[1].y);
    println!("residual_norm {:e}", g.residual_norm);
    if let Some(gap) = limit_gap(&g) {
        println!("gap_r0 {:e}", gap.dr0);
        println!("gap_r1 {:e}", gap.dr1);
        println!("gap_theta0 {:e}", gap.dtheta0);
        println!("gap_theta1 {:e}", gap.dtheta1);
    }
    if svg.is_some() || json.is_some() {
        let c = build_double_bubble(&g, &window(window_r)?, resolution)?;
        emit(&c, json, svg)?;
    }
    Ok(())
}

#[derive(Serialize)]
struct SweepRow {
    #[serde(rename = "A")]
    a: f64,
    r0: f64,
    r1: f64,
    theta0: f64,
    theta1: f64,
    gap_r0: Option<f64>,
    gap_r1: Option<f64>,
    gap_theta0: Option<f64>,
    gap_theta1: Option<f64>,
    #[serde(rename = "distance_B2")]
    distance_b2: f64,
    #[serde(rename = "perimeter_B2")]
    perimeter_b2: f64,
}

fn sweep(areas: &[f64], window_r: f64, resolution: usize, csv: Option<&Path>) -> Result<()> {
    if areas.is_empty() || areas.iter().any(|a| !(*a > 0.0)) || areas.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Domain(format!("areas must be positive and increasing, got {areas:?}")).into());
    }
    let w = window(window_r)?;
    let lens = build_standard_lens(&w, resolution)?;
    let pairing: Vec<(String, String)> =
        [("D1", "E1"), ("D2", "F1"), ("D3", "F2")].iter().map(|(a, b)| (a.to_string(), b.to_string())).collect();
    let q = QuadratureParams::default();
    let mut rows = Vec::with_capacity(areas.len());
    for &a in areas {
        let g = solve_double_bubble(a, 1e-12)?;
        let d = build_double_bubble(&g, &w, resolution)?;
        let gap = limit_gap(&g);
        rows.push(SweepRow {
            a,
            r0: g.r0.finite().unwrap_or(f64::INFINITY),
            r1: g.r1,
            theta0: g.theta0,
            theta1: g.theta1,
            gap_r0: gap.map(|x| x.dr0),
            gap_r1: gap.map(|x| x.dr1),
            gap_theta0: gap.map(|x| x.dtheta0),
            gap_theta1: gap.map(|x| x.dtheta1),
            distance_b2: cluster_distance(&d, &lens, &w, &q, &pairing)?.value,
            perimeter_b2: relative_perimeter(&d, &w)?,
        });
    }
    println!("lens perimeter in window {:.12}", relative_perimeter(&lens, &w)?);
    print!("{}", String::from_utf8(crate::output::csv_bytes(&rows)?)?);
    if let Some(path) = csv {
        write_csv(path, &rows)?;
    }
    Ok(())
}

fn flow_params(c: &DiscreteCluster, args: FlowArgs) -> FlowParams {
    let base = FlowParams::for_cluster(c);
    FlowParams {
        dt: args.dt.unwrap_or(base.dt),
        max_steps: args.max_steps.unwrap_or(base.max_steps),
        grad_tol: args.grad_tol.unwrap_or(base.grad_tol),
        resample_every: args.resample_every.unwrap_or(base.resample_every),
        target_spacing: args.target_spacing.unwrap_or(base.target_spacing),
        junction_weight: args.junction_weight.unwrap_or(base.junction_weight),
        area_tol: args.area_tol.unwrap_or(base.area_tol),
    }
}

fn load(path: &Path) -> Result<DiscreteCluster> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let c = DiscreteCluster::from_json(&text)?;
    let report = validate(&c, &QuadratureParams::default())?;
    if !report.passed() {
        let names: Vec<&str> = report.failures().iter().map(|f| f.name).collect();
        return Err(Error::Structural(format!("{} fails {names:?}", path.display())).into());
    }
    Ok(c)
}

#[derive(Serialize)]
struct FlowReportRow {
    steps_taken: usize,
    converged: bool,
    final_perimeter: f64,
    max_junction_angle_dev: f64,
    max_area_drift: f64,
}

#[derive(Serialize)]
struct CurvatureRow<'a> {
    id: &'a str,
    mean: f64,
    std: f64,
    max_abs: f64,
}

fn flow(
    input: &Path,
    args: FlowArgs,
    output: Option<&Path>,
    report_csv: Option<&Path>,
    curvature_csv: Option<&Path>,
    svg: Option<&Path>,
) -> Result<()> {
    let c = load(input)?;
    let p = flow_params(&c, args);
    let before = relative_perimeter(&c, &c.window)?;
    let (out, report) = evolve(&c, &p)?;
    println!("steps_taken {}", report.steps_taken);
    println!("converged {}", report.converged);
    println!("initial_perimeter {before:.12}");
    println!("final_perimeter {:.12}", report.final_perimeter);
    println!("perimeter_change {:e}", report.final_perimeter - before);
    println!("max_junction_angle_dev {:e}", report.max_junction_angle_dev);
    println!("max_area_drift {:e}", report.max_area_drift);
    if let Some(path) = report_csv {
        write_csv(
            path,
            &[FlowReportRow {
                steps_taken: report.steps_taken,
                converged: report.converged,
                final_perimeter: report.final_perimeter,
                max_junction_angle_dev: report.max_junction_angle_dev,
                max_area_drift: report.max_area_drift,
            }],
        )?;
    }
    if let Some(path) = curvature_csv {
        let rows: Vec<CurvatureRow> = report
            .curvature
            .iter()
            .map(|k| CurvatureRow { id: &k.id, mean: k.mean, std: k.std, max_abs: k.max_abs })
            .collect();
        write_csv(path, &rows)?;
    }
    emit(&out, output, svg)
}

/// Explicit flag, then `ISOCLUST_SEED`, then zero.
fn probe_seed(flag: Option<u64>) -> Result<u64> {
    if let Some(s) = flag {
        return Ok(s);
    }
    match std::env::var("ISOCLUST_SEED") {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Error::Domain(format!("ISOCLUST_SEED must be an unsigned integer, got {v:?}")).into()),
        Err(_) => Ok(0),
    }
}

#[allow(clippy::too_many_arguments)]
fn probe(
    input: Option<PathBuf>,
    trials: usize,
    amplitude: Option<f64>,
    seed: Option<u64>,
    resolution: usize,
    window_r: f64,
    args: FlowArgs,
    csv: Option<&Path>,
) -> Result<()> {
    let c = match input {
        Some(path) => load(&path)?,
        None => build_standard_lens(&window(window_r)?, resolution)?,
    };
    let seed = probe_seed(seed)?;
    let amplitude = amplitude.unwrap_or(0.1 * standard_lens_radius());
    let p = flow_params(&c, args);
    let report = local_min_probe(&c, trials, amplitude, &p, seed)?;
    println!("seed perturbed_perimeter final_perimeter hausdorff hausdorff_aligned steps converged");
    for t in &report.trials {
        println!(
            "{} {:.10} {:.10} {:.3e} {:.3e} {} {}",
            t.seed, t.perturbed_perimeter, t.final_perimeter, t.hausdorff, t.hausdorff_aligned, t.steps, t.converged
        );
    }
    println!("baseline {:.12}", report.baseline);
    match report.margin {
        Some(m) => println!("margin {m:e} ({:e} of baseline)", m / report.baseline),
        None => println!("margin undefined (no trials)"),
    }
    if report.violation() {
        println!("minimality violation: a trial beat the baseline by more than 1e-3 of it");
    }
    if let Some(path) = csv {
        write_csv(path, &report.trials)?;
    }
    Ok(())
}

#[derive(Serialize)]
struct ConjectureRow {
    shape: &'static str,
    resolution: usize,
    steps_taken: usize,
    converged: bool,
    final_perimeter: String,
    max_flat_curvature: f64,
    max_curvature_std: f64,
    max_mean_mismatch: f64,
    max_junction_angle_dev: f64,
    max_area_drift: f64,
}

fn conjecture(
    shape: Shape,
    resolution: usize,
    window_r: f64,
    args: FlowArgs,
    output: Option<&Path>,
    csv: Option<&Path>,
    svg: Option<&Path>,
) -> Result<()> {
    let (kind, name) = match shape {
        Shape::Peanut => (ConjectureKind::Peanut, "peanut"),
        Shape::Chalk => (ConjectureKind::Chalk, "chalk"),
    };
    let seed = build_conjecture_seed(kind, &window(window_r)?, resolution)?;
    let p = flow_params(&seed, args);
    let (out, report) = evolve(&seed, &p)?;
    let st = stationarity(&out)?;
    if !report.converged {
        eprintln!("warning: {name} did not converge in {} steps", report.steps_taken);
    }
    let row = ConjectureRow {
        shape: name,
        resolution,
        steps_taken: report.steps_taken,
        converged: report.converged,
        final_perimeter: sig4(report.final_perimeter),
        max_flat_curvature: st.max_flat_curvature,
        max_curvature_std: st.max_curvature_std,
        max_mean_mismatch: st.max_mean_mismatch,
        max_junction_angle_dev: st.max_junction_angle_dev,
        max_area_drift: report.max_area_drift,
    };
    for j in isoclust_core::junction_angles(&out)? {
        println!("junction {} {:.4} {:.4} {:.4}", j.id, j.angles[0], j.angles[1], j.angles[2]);
    }
    print!("{}", String::from_utf8(crate::output::csv_bytes(&[&row])?)?);
    if let Some(path) = csv {
        write_csv(path, &[row])?;
    }
    emit(&out, output, svg)
}
