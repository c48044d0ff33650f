//! Areas, relative perimeters and the cluster distance.

mod scan;

use std::collections::{BTreeMap, BTreeSet};

pub(crate) use scan::{coverage, crossings, Rows};

use crate::cluster::{trace_chambers, DiscreteCluster, Window};
use crate::error::{domain, Error, Result};
use crate::geom::{point_segment_distance, shoelace, Point};

/// Grid controls for the sampled symmetric-difference areas.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureParams {
    /// Samples per axis on the coarsest level, a power of two.
    pub initial_grid: usize,
    pub max_refinements: usize,
    /// Stop when two successive levels differ by less than this area.
    pub tolerance: f64,
}

impl Default for QuadratureParams {
    fn default() -> Self {
        QuadratureParams { initial_grid: 256, max_refinements: 5, tolerance: 1e-4 }
    }
}

impl QuadratureParams {
    pub fn check(&self) -> Result<()> {
        if self.initial_grid < 64 || !self.initial_grid.is_power_of_two() {
            return Err(domain(format!(
                "initial grid must be a power of two >= 64, got {}",
                self.initial_grid
            )));
        }
        if !(self.tolerance > 0.0) {
            return Err(domain(format!("quadrature tolerance must be positive, got {}", self.tolerance)));
        }
        Ok(())
    }
}

/// Shoelace area of a chamber, summed over its rings.
pub fn chamber_area(c: &DiscreteCluster, label: &str) -> Result<f64> {
    let traced = trace_chambers(c)?;
    let rings = traced
        .get(label)
        .ok_or_else(|| domain(format!("unknown chamber label {label:?}")))?;
    Ok(rings.rings.iter().map(|r| shoelace(r)).sum())
}

fn clipped_polyline(points: &[Point], sub: &Window) -> f64 {
    points.windows(2).map(|w| sub.clipped_length(w[0], w[1])).sum()
}

fn check_sub(c: &DiscreteCluster, sub: &Window) -> Result<()> {
    if !sub.is_valid() {
        return Err(domain(format!("invalid sub-window {sub:?}")));
    }
    if !c.window.contains_window(sub, 1e-12 * c.window.scale()) {
        return Err(domain(format!("sub-window {sub:?} exceeds the cluster window {:?}", c.window)));
    }
    Ok(())
}

/// Total interface length inside `sub`. Window-boundary arcs are not interfaces
/// and never count.
pub fn relative_perimeter(c: &DiscreteCluster, sub: &Window) -> Result<f64> {
    check_sub(c, sub)?;
    Ok(c.interfaces.iter().map(|i| clipped_polyline(&i.points, sub)).sum())
}

/// Perimeter of chamber `label` inside `sub`: the interfaces with that chamber
/// on exactly one side. An interface with the chamber on both sides is an
/// internal crack, not boundary.
pub fn chamber_perimeter(c: &DiscreteCluster, label: &str, sub: &Window) -> f64 {
    c.interfaces
        .iter()
        .filter(|i| (i.left == label) != (i.right == label))
        .map(|i| clipped_polyline(&i.points, sub))
        .sum()
}

/// `|P(X; sub) − ½ Σ_j P(X(j); sub)|`.
pub fn perimeter_halving_check(c: &DiscreteCluster, sub: &Window) -> f64 {
    let total: f64 = c.interfaces.iter().map(|i| clipped_polyline(&i.points, sub)).sum();
    let half_sum: f64 =
        0.5 * c.chambers.iter().map(|ch| chamber_perimeter(c, &ch.label, sub)).sum::<f64>();
    (total - half_sum).abs()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistanceEstimate {
    pub value: f64,
    /// Refinement level reached (0 is the initial grid).
    pub level: usize,
    pub samples_per_axis: usize,
}

/// Pairing of every chamber label with itself.
pub fn identity_pairing(c: &DiscreteCluster) -> Vec<(String, String)> {
    c.chambers.iter().map(|ch| (ch.label.clone(), ch.label.clone())).collect()
}

/// Σ over paired chambers of `|sub ∩ (a(j) Δ b(j))|`, by grid sampling with
/// refinement by doubling until successive levels agree within `q.tolerance`.
pub fn cluster_distance(
    a: &DiscreteCluster,
    b: &DiscreteCluster,
    sub: &Window,
    q: &QuadratureParams,
    pairing: &[(String, String)],
) -> Result<DistanceEstimate> {
    q.check()?;
    if !sub.is_valid() {
        return Err(domain(format!("invalid sub-window {sub:?}")));
    }
    let left: BTreeSet<&str> = pairing.iter().map(|p| p.0.as_str()).collect();
    let right: BTreeSet<&str> = pairing.iter().map(|p| p.1.as_str()).collect();
    let labels_a: BTreeSet<&str> = a.chambers.iter().map(|c| c.label.as_str()).collect();
    let labels_b: BTreeSet<&str> = b.chambers.iter().map(|c| c.label.as_str()).collect();
    if left.len() != pairing.len() || right.len() != pairing.len() || left != labels_a || right != labels_b {
        return Err(domain("pairing must be a bijection between the chamber labels of both clusters"));
    }
    let rings_a = trace_chambers(a)?;
    let rings_b = trace_chambers(b)?;
    let pairs: Vec<(&[Vec<Point>], &[Vec<Point>])> = pairing
        .iter()
        .map(|(la, lb)| (rings_a[la].rings.as_slice(), rings_b[lb].rings.as_slice()))
        .collect();

    let mut previous: Option<f64> = None;
    for level in 0..=q.max_refinements {
        let n = q.initial_grid << level;
        let value = sampled_symmetric_difference(&pairs, sub, n);
        if let Some(prev) = previous {
            if (value - prev).abs() < q.tolerance {
                return Ok(DistanceEstimate { value, level, samples_per_axis: n });
            }
            if level == q.max_refinements {
                return Err(Error::Convergence { last: value, previous: prev });
            }
        }
        previous = Some(value);
    }
    // max_refinements == 0: a single level, nothing to compare against
    let value = previous.expect("at least one level");
    Ok(DistanceEstimate { value, level: 0, samples_per_axis: q.initial_grid })
}

fn sampled_symmetric_difference(pairs: &[(&[Vec<Point>], &[Vec<Point>])], sub: &Window, n: usize) -> f64 {
    let (lo, hi) = sub.bbox();
    let dx = (hi.x - lo.x) / n as f64;
    let dy = (hi.y - lo.y) / n as f64;
    let rows = Rows { y0: lo.y, dy, n };
    let mut count: u64 = 0;
    for &(ra, rb) in pairs {
        let ca = crossings(ra, rows);
        let cb = crossings(rb, rows);
        for j in 0..n {
            let Some((sl, sr)) = sub.x_span(rows.y(j)) else { continue };
            let events = coverage(&[&ca[j], &cb[j]]);
            let mut depth = 0;
            let mut start = f64::NEG_INFINITY;
            for (x, delta) in events {
                if depth == 1 {
                    count += samples_in(start, x, sl, sr, lo.x, dx, n);
                }
                depth += delta;
                start = x;
            }
        }
    }
    count as f64 * dx * dy
}

/// Samples of the row inside `[a, b) ∩ [sl, sr)`.
fn samples_in(a: f64, b: f64, sl: f64, sr: f64, x0: f64, dx: f64, n: usize) -> u64 {
    let lo = a.max(sl);
    let hi = b.min(sr);
    if hi <= lo {
        return 0;
    }
    (scan::samples_below(hi, x0, dx, n) - scan::samples_below(lo, x0, dx, n)) as u64
}

/// Symmetric Hausdorff distance between the interface networks of two clusters.
pub fn hausdorff_distance(a: &DiscreteCluster, b: &DiscreteCluster) -> f64 {
    let pa: Vec<&[Point]> = a.polylines().collect();
    let pb: Vec<&[Point]> = b.polylines().collect();
    polyline_hausdorff(&pa, &pb)
}

/// Symmetric Hausdorff distance between two sets of polylines.
pub fn polyline_hausdorff(a: &[&[Point]], b: &[&[Point]]) -> f64 {
    directed_hausdorff(a, b).max(directed_hausdorff(b, a))
}

fn directed_hausdorff(a: &[&[Point]], b: &[&[Point]]) -> f64 {
    let segments: Vec<(Point, Point)> =
        b.iter().flat_map(|p| p.windows(2).map(|w| (w[0], w[1]))).collect();
    let mut worst: f64 = 0.0;
    for poly in a {
        for &p in poly.iter() {
            let mut best = f64::INFINITY;
            for &(s, t) in &segments {
                let d = point_segment_distance(p, s, t);
                if d < best {
                    best = d;
                    if best <= worst {
                        break;
                    }
                }
            }
            worst = worst.max(best);
        }
    }
    worst
}

/// Areas of all chambers, keyed by label.
pub fn chamber_areas(c: &DiscreteCluster) -> Result<BTreeMap<String, f64>> {
    let traced = trace_chambers(c)?;
    Ok(traced
        .into_iter()
        .map(|(label, r)| (label, r.rings.iter().map(|ring| shoelace(ring)).sum()))
        .collect())
}
