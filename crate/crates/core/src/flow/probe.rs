//! Compactly supported perturbations and the local-minimality probe.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{apply, check_topology, evolve, project_areas, vertex_frame, Field, FlowParams, Topology};
use crate::cluster::{validate, DiscreteCluster};
use crate::error::{domain, Error, Result};
use crate::exact::standard_lens_radius;
use crate::geom::Point;
use crate::measure::{hausdorff_distance, polyline_hausdorff, relative_perimeter, QuadratureParams};

/// Probe bumps are supported in a disk of this many lens radii (scaled by
/// the square root of the largest target area).
pub const PROBE_SUPPORT_FACTOR: f64 = 0.75;
const RETRIES: usize = 5;

/// Smooth bump equal to 1 at the origin and vanishing for `t ≥ 1`.
fn bump(t: f64) -> f64 {
    if t >= 1.0 {
        0.0
    } else {
        (1.0 - 1.0 / (1.0 - t * t)).exp()
    }
}

/// Add a seeded smooth bump displacement near a random free vertex, restore
/// the proper areas and check the result. A rejected attempt is retried with
/// half the amplitude, up to five times.
pub fn perturb(c: &DiscreteCluster, amplitude: f64, support_radius: f64, seed: u64) -> Result<DiscreteCluster> {
    if !(amplitude >= 0.0) || !(support_radius > 0.0) {
        return Err(domain("perturbation needs amplitude ≥ 0 and a positive support radius"));
    }
    if amplitude == 0.0 {
        return Ok(c.clone());
    }
    let topo = Topology::new(c)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // free vertices whose whole support disk lies inside the window
    let mut candidates: Vec<Point> = Vec::new();
    for iface in &c.interfaces {
        let n = iface.points.len();
        candidates.extend(iface.points[1..n - 1].iter().copied());
    }
    for (node, &free) in c.nodes.iter().zip(&topo.junction) {
        if free {
            candidates.push(node.position);
        }
    }
    candidates.retain(|p| c.window.inset(*p) > support_radius);
    if candidates.is_empty() {
        return Err(domain(format!("no vertex is {support_radius} inside the window")));
    }
    let center = candidates[rng.gen_range(0..candidates.len())];
    let direction = Point::polar(1.0, rng.gen_range(0.0..std::f64::consts::TAU));

    let mut last_error = String::new();
    let mut amp = amplitude;
    for _ in 0..=RETRIES {
        match displaced(c, &topo, center, direction, amp, support_radius) {
            Ok(out) => return Ok(out),
            Err(e) => last_error = e.to_string(),
        }
        amp *= 0.5;
    }
    Err(Error::Perturbation(format!("rejected after {RETRIES} retries: {last_error}")))
}

fn displaced(
    c: &DiscreteCluster,
    topo: &Topology,
    center: Point,
    direction: Point,
    amplitude: f64,
    radius: f64,
) -> Result<DiscreteCluster> {
    let field_at = |p: Point| direction * (amplitude * bump(p.dist(center) / radius));
    let mut field = Field::zeros(c);
    for (i, iface) in c.interfaces.iter().enumerate() {
        for k in 1..iface.points.len() - 1 {
            let (normal, _, _) = vertex_frame(&iface.points, k)?;
            field.interior[i][k] = normal * field_at(iface.points[k]).dot(normal);
        }
    }
    for (n, node) in c.nodes.iter().enumerate() {
        if topo.junction[n] {
            field.nodes[n] = field_at(node.position);
        }
    }
    let mut out = c.clone();
    apply(&mut out, topo, &field, 1.0);
    project_areas(&mut out, topo)?;
    check_topology(&out)?;
    let report = validate(&out, &QuadratureParams::default())?;
    if !report.passed() {
        let names: Vec<&str> = report.failures().iter().map(|f| f.name).collect();
        return Err(Error::Topology(format!("perturbed cluster fails {names:?}")));
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct ProbeTrial {
    pub seed: u64,
    pub perturbed_perimeter: f64,
    pub final_perimeter: f64,
    /// Hausdorff distance between the evolved and the input interfaces.
    pub hausdorff: f64,
    /// Same, restricted to proper-chamber boundaries after removing the
    /// horizontal offset between the proper-chamber centroids.
    pub hausdorff_aligned: f64,
    pub steps: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProbeReport {
    pub baseline: f64,
    pub trials: Vec<ProbeTrial>,
    pub min_perimeter: Option<f64>,
    /// `min_perimeter − baseline`; undefined without trials.
    pub margin: Option<f64>,
}

impl ProbeReport {
    /// Whether some trial beat the baseline by more than `10⁻³·baseline`.
    pub fn violation(&self) -> bool {
        self.margin.is_some_and(|m| m < -1e-3 * self.baseline)
    }
}

/// Perturb `c` with seeds `seed, seed + 1, …`, evolve each perturbed copy
/// and compare the results with the unperturbed perimeter. Trials run in
/// parallel; the report lists them in seed order.
pub fn local_min_probe(
    c: &DiscreteCluster,
    n_trials: usize,
    amplitude: f64,
    p: &FlowParams,
    seed: u64,
) -> Result<ProbeReport> {
    p.check()?;
    let baseline = relative_perimeter(c, &c.window)?;
    let largest = c.chambers.iter().filter_map(|ch| ch.target_area).fold(1.0, f64::max);
    let support = PROBE_SUPPORT_FACTOR * standard_lens_radius() * largest.sqrt();
    let trials = (0..n_trials as u64)
        .into_par_iter()
        .map(|k| {
            let seed = seed.wrapping_add(k);
            let perturbed = perturb(c, amplitude, support, seed)?;
            let perturbed_perimeter = relative_perimeter(&perturbed, &perturbed.window)?;
            let (out, report) = evolve(&perturbed, p)?;
            Ok(ProbeTrial {
                seed,
                perturbed_perimeter,
                final_perimeter: report.final_perimeter,
                hausdorff: hausdorff_distance(&out, c),
                hausdorff_aligned: aligned_hausdorff(&out, c),
                steps: report.steps_taken,
                converged: report.converged,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let min_perimeter = trials.iter().map(|t| t.final_perimeter).reduce(f64::min);
    Ok(ProbeReport { baseline, trials, min_perimeter, margin: min_perimeter.map(|m| m - baseline) })
}

/// Area-weighted centroid of all proper chambers, from their interfaces.
fn proper_centroid(c: &DiscreteCluster) -> Option<Point> {
    let (mut area, mut moment) = (0.0, Point::ORIGIN);
    for iface in &c.interfaces {
        for label in [&iface.left, &iface.right] {
            if !c.chamber(label).is_some_and(|ch| ch.proper) {
                continue;
            }
            let s = iface.side_of(label);
            for w in iface.points.windows(2) {
                let cross = w[0].cross(w[1]) * s;
                area += 0.5 * cross;
                moment += (w[0] + w[1]) * (cross / 6.0);
            }
        }
    }
    (area > 0.0).then(|| moment * (1.0 / area))
}

/// Hausdorff distance between the proper-chamber boundaries of `a` and `b`
/// modulo a horizontal translation, which leaves the perimeter of an
/// axis-aligned cluster in a centered window unchanged.
fn aligned_hausdorff(a: &DiscreteCluster, b: &DiscreteCluster) -> f64 {
    let (Some(ca), Some(cb)) = (proper_centroid(a), proper_centroid(b)) else {
        return hausdorff_distance(a, b);
    };
    let shift = Point::new(cb.x - ca.x, 0.0);
    let boundary = |c: &DiscreteCluster, v: Point| -> Vec<Vec<Point>> {
        c.interfaces
            .iter()
            .filter(|i| c.chamber(&i.left).is_some_and(|ch| ch.proper) || c.chamber(&i.right).is_some_and(|ch| ch.proper))
            .map(|i| i.points.iter().map(|&p| p + v).collect())
            .collect()
    };
    let pa = boundary(a, shift);
    let pb = boundary(b, Point::ORIGIN);
    let ra: Vec<&[Point]> = pa.iter().map(|v| v.as_slice()).collect();
    let rb: Vec<&[Point]> = pb.iter().map(|v| v.as_slice()).collect();
    polyline_hausdorff(&ra, &rb)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cluster::{build_standard_lens, Window};
    use crate::measure::chamber_area;

    #[test]
    fn zero_amplitude_is_identity() {
        let c = build_standard_lens(&Window::disk(2.0), 32).unwrap();
        assert_eq!(perturb(&c, 0.0, 0.5, 7).unwrap(), c);
    }

    #[test]
    fn perturbation_is_deterministic_and_area_preserving() {
        let c = build_standard_lens(&Window::disk(2.0), 64).unwrap();
        let r = standard_lens_radius();
        let a = perturb(&c, 0.1 * r, 0.75 * r, 11).unwrap();
        let b = perturb(&c, 0.1 * r, 0.75 * r, 11).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert!((chamber_area(&a, "E1").unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn support_must_fit_in_the_window() {
        let c = build_standard_lens(&Window::disk(2.0), 32).unwrap();
        assert!(matches!(perturb(&c, 0.1, 3.0, 1), Err(Error::Domain(_))));
    }

    #[test]
    fn aligned_distance_ignores_horizontal_shift() {
        let c = build_standard_lens(&Window::disk(2.0), 32).unwrap();
        let mut shifted = c.clone();
        for iface in &mut shifted.interfaces {
            for p in &mut iface.points {
                p.x += 0.05;
            }
        }
        assert!(hausdorff_distance(&shifted, &c) > 0.049);
        assert!(aligned_hausdorff(&shifted, &c) < 1e-12);
    }

    #[test]
    fn no_trials_reports_baseline_only() {
        let c = build_standard_lens(&Window::disk(2.0), 32).unwrap();
        let report = local_min_probe(&c, 0, 0.1, &FlowParams::for_cluster(&c), 0).unwrap();
        assert!(report.trials.is_empty());
        assert_eq!(report.margin, None);
        assert!(!report.violation());
        assert!(report.baseline > 0.0);
    }
}
