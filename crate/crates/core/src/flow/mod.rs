//! Area-constrained perimeter descent on discrete clusters.
//!
//! Interior vertices move along their bisector normal with the discrete
//! curvature plus one pressure term per adjacent proper chamber; junctions
//! move along the sum of their outgoing unit tangents; anchors never move.
//! The pressures are chosen so that no proper area changes to first order,
//! and the remaining second-order drift is removed by a uniform normal offset
//! of each proper chamber's boundary.

mod probe;

use std::collections::HashMap;

use rayon::prelude::*;

use crate::cluster::{DiscreteCluster, NodeKind};
use crate::error::{domain, structural, Error, Result};
use crate::geom::{resample_uniform, segments_intersect, turning_angle, Point};
use crate::measure::relative_perimeter;

pub use probe::{local_min_probe, perturb, ProbeReport, ProbeTrial, PROBE_SUPPORT_FACTOR};

/// Vertices per interface above which velocities are evaluated in parallel.
const PARALLEL_THRESHOLD: usize = 4096;
/// Target relative accuracy of the area projection.
const PROJECTION_TOL: f64 = 1e-13;
const PROJECTION_ITERATIONS: usize = 30;
/// Allowed perimeter increase per accepted step.
const ASCENT_SLACK: f64 = 1e-6;
const MAX_HALVINGS: usize = 12;
const HISTORY_LEN: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowParams {
    /// Requested time step; capped at `0.4 h²` for the shortest segment `h`.
    pub dt: f64,
    pub max_steps: usize,
    /// Convergence threshold on the largest vertex speed.
    pub grad_tol: f64,
    pub resample_every: usize,
    pub target_spacing: f64,
    /// Junction mobility relative to interior vertices, in `(0, 1]`.
    pub junction_weight: f64,
    /// Largest tolerated relative area error after projection.
    pub area_tol: f64,
}

impl Default for FlowParams {
    fn default() -> Self {
        FlowParams {
            dt: 1e-3,
            max_steps: 100_000,
            grad_tol: 1e-4,
            resample_every: 50,
            target_spacing: 0.02,
            junction_weight: 1.0,
            area_tol: 1e-9,
        }
    }
}

impl FlowParams {
    /// Defaults with `target_spacing` set to the median segment length of `c`.
    pub fn for_cluster(c: &DiscreteCluster) -> FlowParams {
        let mut lengths: Vec<f64> =
            c.polylines().flat_map(|p| p.windows(2).map(|w| w[0].dist(w[1]))).collect();
        let mut params = FlowParams::default();
        if !lengths.is_empty() {
            lengths.sort_by(f64::total_cmp);
            params.target_spacing = lengths[lengths.len() / 2];
        }
        params
    }

    pub fn check(&self) -> Result<()> {
        let ok = self.dt > 0.0
            && self.target_spacing > 0.0
            && self.grad_tol > 0.0
            && self.junction_weight > 0.0
            && self.junction_weight <= 1.0
            && self.area_tol > 0.0
            && self.resample_every > 0;
        if ok {
            Ok(())
        } else {
            Err(domain(format!("invalid flow parameters {self:?}")))
        }
    }
}

/// Curvature summary of one interface.
#[derive(Debug, Clone, PartialEq)]
pub struct InterfaceCurvature {
    pub id: String,
    /// Signed curvature per interior vertex, positive when turning left.
    pub values: Vec<f64>,
    pub mean: f64,
    pub std: f64,
    pub max_abs: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct JunctionAngles {
    pub id: String,
    /// Counterclockwise angles between consecutive outgoing tangents, in degrees.
    pub angles: [f64; 3],
}

impl JunctionAngles {
    pub fn max_deviation(&self) -> f64 {
        self.angles.iter().map(|a| (a - 120.0).abs()).fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlowReport {
    pub steps_taken: usize,
    pub converged: bool,
    pub final_perimeter: f64,
    pub max_junction_angle_dev: f64,
    pub curvature: Vec<InterfaceCurvature>,
    pub max_area_drift: f64,
    /// Perimeter after every `k`-th step, `k` chosen to keep about a thousand entries.
    pub perimeter_history: Vec<f64>,
}

/// Residuals of the discrete stationarity conditions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stationarity {
    /// Largest |curvature| on interfaces between two improper chambers.
    pub max_flat_curvature: f64,
    /// Largest curvature standard deviation on interfaces touching a proper chamber.
    pub max_curvature_std: f64,
    /// Largest disagreement between curvature means that must coincide: the
    /// arcs separating one proper chamber from improper ones share a mean,
    /// and an arc between two proper chambers carries the difference of theirs.
    pub max_mean_mismatch: f64,
    pub max_junction_angle_dev: f64,
}

impl Stationarity {
    pub fn holds(&self, curvature_tol: f64, mean_tol: f64, angle_tol_deg: f64) -> bool {
        self.max_flat_curvature < curvature_tol
            && self.max_curvature_std < curvature_tol
            && self.max_mean_mismatch < mean_tol
            && self.max_junction_angle_dev < angle_tol_deg
    }
}

/// Fixed combinatorics of a cluster, shared by every step.
struct Topology {
    /// Target area per proper chamber.
    targets: Vec<f64>,
    /// Proper chambers on each side of every interface, with orientation sign.
    sides: Vec<Vec<(usize, f64)>>,
    /// Interface endpoint node indices.
    ends: Vec<[usize; 2]>,
    junction: Vec<bool>,
}

impl Topology {
    fn new(c: &DiscreteCluster) -> Result<Topology> {
        let proper: HashMap<&str, usize> = c
            .chambers
            .iter()
            .filter(|ch| ch.proper)
            .enumerate()
            .map(|(k, ch)| (ch.label.as_str(), k))
            .collect();
        let targets = c
            .chambers
            .iter()
            .filter(|ch| ch.proper)
            .map(|ch| ch.target_area.ok_or_else(|| structural(format!("{} has no target", ch.label))))
            .collect::<Result<Vec<_>>>()?;
        let index = c.node_index();
        let mut sides = Vec::with_capacity(c.interfaces.len());
        let mut ends = Vec::with_capacity(c.interfaces.len());
        for iface in &c.interfaces {
            if iface.points.len() < 2 {
                return Err(structural(format!("interface {} has fewer than two points", iface.id)));
            }
            let mut s = Vec::new();
            if let Some(&k) = proper.get(iface.left.as_str()) {
                s.push((k, 1.0));
            }
            if let Some(&k) = proper.get(iface.right.as_str()) {
                s.push((k, -1.0));
            }
            sides.push(s);
            let lookup = |id: &str| {
                index.get(id).copied().ok_or_else(|| structural(format!("unknown node {id:?}")))
            };
            ends.push([lookup(&iface.nodes[0])?, lookup(&iface.nodes[1])?]);
        }
        let valence = c.valences();
        for (n, v) in c.nodes.iter().zip(&valence) {
            if n.kind == NodeKind::Junction && *v != 3 {
                return Err(structural(format!("junction {} has valence {v}", n.id)));
            }
        }
        let junction = c.nodes.iter().map(|n| n.kind == NodeKind::Junction).collect();
        Ok(Topology { targets, sides, ends, junction })
    }

    fn n_proper(&self) -> usize {
        self.targets.len()
    }
}

/// A vector per vertex: interior vertices per interface (endpoints unused)
/// and one per node (anchors unused).
#[derive(Clone)]
struct Field {
    interior: Vec<Vec<Point>>,
    nodes: Vec<Point>,
}

impl Field {
    fn zeros(c: &DiscreteCluster) -> Field {
        Field {
            interior: c.interfaces.iter().map(|i| vec![Point::ORIGIN; i.points.len()]).collect(),
            nodes: vec![Point::ORIGIN; c.nodes.len()],
        }
    }

    fn dot(&self, other: &Field) -> f64 {
        let mut acc = 0.0;
        for (a, b) in self.interior.iter().zip(&other.interior) {
            let n = a.len();
            for k in 1..n - 1 {
                acc += a[k].dot(b[k]);
            }
        }
        for (a, b) in self.nodes.iter().zip(&other.nodes) {
            acc += a.dot(*b);
        }
        acc
    }

    fn max_norm(&self) -> f64 {
        let interior = self
            .interior
            .iter()
            .flat_map(|v| v[1..v.len() - 1].iter())
            .map(|p| p.norm())
            .fold(0.0, f64::max);
        self.nodes.iter().map(|p| p.norm()).fold(interior, f64::max)
    }

    fn add_scaled(&mut self, other: &Field, k: f64) {
        for (a, b) in self.interior.iter_mut().zip(&other.interior) {
            for (p, q) in a.iter_mut().zip(b) {
                *p += *q * k;
            }
        }
        for (p, q) in self.nodes.iter_mut().zip(&other.nodes) {
            *p += *q * k;
        }
    }
}

fn j(d: Point) -> Point {
    Point::new(d.y, -d.x)
}

/// Bisector normal (left side) and dual length at interior vertex `k`.
fn vertex_frame(pts: &[Point], k: usize) -> Result<(Point, f64, f64)> {
    let e1 = pts[k] - pts[k - 1];
    let e2 = pts[k + 1] - pts[k];
    let (l1, l2) = (e1.norm(), e2.norm());
    if l1 == 0.0 || l2 == 0.0 {
        return Err(Error::Topology("zero-length segment".into()));
    }
    let bisector = e1 * (1.0 / l1) + e2 * (1.0 / l2);
    let b = bisector.norm();
    if b < 1e-12 {
        return Err(Error::Topology("polyline folds back on itself".into()));
    }
    let w = 0.5 * (l1 + l2);
    Ok((bisector.perp() * (1.0 / b), turning_angle(e1, e2) / w, w))
}

fn shortest_segment(c: &DiscreteCluster) -> f64 {
    c.polylines()
        .flat_map(|p| p.windows(2).map(|w| w[0].dist(w[1])))
        .fold(f64::INFINITY, f64::min)
}

/// Outgoing unit tangents and lengths of the first segments at every node.
fn node_tangents(c: &DiscreteCluster, topo: &Topology) -> (Vec<Point>, Vec<f64>) {
    let mut tangent_sum = vec![Point::ORIGIN; c.nodes.len()];
    let mut dual = vec![0.0; c.nodes.len()];
    for (iface, &[a, b]) in c.interfaces.iter().zip(&topo.ends) {
        let pts = &iface.points;
        let n = pts.len();
        let first = pts[1] - pts[0];
        let last = pts[n - 2] - pts[n - 1];
        tangent_sum[a] += first.normalized();
        tangent_sum[b] += last.normalized();
        dual[a] += 0.5 * first.norm();
        dual[b] += 0.5 * last.norm();
    }
    (tangent_sum, dual)
}

/// Gradient of one proper chamber's area with respect to every free vertex.
fn area_gradient(c: &DiscreteCluster, topo: &Topology, chamber: usize) -> Field {
    let mut g = Field::zeros(c);
    for (i, iface) in c.interfaces.iter().enumerate() {
        let Some(&(_, s)) = topo.sides[i].iter().find(|(k, _)| *k == chamber) else { continue };
        let pts = &iface.points;
        let n = pts.len();
        for k in 1..n - 1 {
            g.interior[i][k] = j(pts[k + 1] - pts[k - 1]) * (0.5 * s);
        }
        let [a, b] = topo.ends[i];
        g.nodes[a] += j(pts[1] - pts[0]) * (0.5 * s);
        g.nodes[b] += j(pts[n - 1] - pts[n - 2]) * (0.5 * s);
    }
    for (k, fixed) in topo.junction.iter().map(|j| !j).enumerate() {
        if fixed {
            g.nodes[k] = Point::ORIGIN;
        }
    }
    g
}

/// Signed area of each proper chamber from its interfaces alone. Proper
/// chambers never touch the window, so this equals the traced area.
fn proper_areas(c: &DiscreteCluster, topo: &Topology) -> Vec<f64> {
    let mut areas = vec![0.0; topo.n_proper()];
    for (i, iface) in c.interfaces.iter().enumerate() {
        if topo.sides[i].is_empty() {
            continue;
        }
        let twice: f64 = iface.points.windows(2).map(|w| w[0].cross(w[1])).sum();
        for &(k, s) in &topo.sides[i] {
            areas[k] += 0.5 * s * twice;
        }
    }
    areas
}

fn apply(c: &mut DiscreteCluster, topo: &Topology, field: &Field, k: f64) {
    for (n, node) in c.nodes.iter_mut().enumerate() {
        if topo.junction[n] {
            node.position += field.nodes[n] * k;
        }
    }
    for (i, iface) in c.interfaces.iter_mut().enumerate() {
        let n = iface.points.len();
        for q in 1..n - 1 {
            iface.points[q] += field.interior[i][q] * k;
        }
    }
    c.sync_endpoints();
}

fn max_relative_drift(areas: &[f64], targets: &[f64]) -> f64 {
    areas.iter().zip(targets).map(|(a, t)| ((a - t) / t).abs()).fold(0.0, f64::max)
}

/// Dense Gaussian elimination with partial pivoting.
fn solve_dense(mut m: Vec<Vec<f64>>, mut rhs: Vec<f64>) -> Result<Vec<f64>> {
    let n = rhs.len();
    let scale = m.iter().flatten().map(|v| v.abs()).fold(0.0, f64::max);
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&a, &b| m[a][col].abs().total_cmp(&m[b][col].abs()))
            .expect("non-empty range");
        if !(m[pivot][col].abs() > 1e-14 * scale) {
            return Err(Error::DegenerateConstraint(format!(
                "area constraint system is singular (pivot {:e})",
                m[pivot][col]
            )));
        }
        m.swap(col, pivot);
        rhs.swap(col, pivot);
        for row in col + 1..n {
            let f = m[row][col] / m[col][col];
            for k in col..n {
                m[row][k] -= f * m[col][k];
            }
            rhs[row] -= f * rhs[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let tail: f64 = (row + 1..n).map(|k| m[row][k] * x[k]).sum();
        x[row] = (rhs[row] - tail) / m[row][row];
    }
    Ok(x)
}

/// Restore every proper area to its target by offsetting each chamber's
/// boundary uniformly along its outward normal. Coupled Newton in the
/// offsets; returns the final relative drift.
fn project_areas(c: &mut DiscreteCluster, topo: &Topology) -> Result<f64> {
    let np = topo.n_proper();
    if np == 0 {
        return Ok(0.0);
    }
    let directions = offset_directions(c, topo)?;
    let mut drift = max_relative_drift(&proper_areas(c, topo), &topo.targets);
    for _ in 0..PROJECTION_ITERATIONS {
        if drift < PROJECTION_TOL {
            break;
        }
        let areas = proper_areas(c, topo);
        let grads: Vec<Field> = (0..np).map(|k| area_gradient(c, topo, k)).collect();
        let jac: Vec<Vec<f64>> =
            (0..np).map(|a| (0..np).map(|b| grads[a].dot(&directions[b])).collect()).collect();
        let rhs: Vec<f64> = (0..np).map(|k| topo.targets[k] - areas[k]).collect();
        let eps = solve_dense(jac, rhs)?;
        let mut field = Field::zeros(c);
        for (k, e) in eps.iter().enumerate() {
            field.add_scaled(&directions[k], *e);
        }
        apply(c, topo, &field, 1.0);
        let next = max_relative_drift(&proper_areas(c, topo), &topo.targets);
        if next >= drift && next < 1e3 * PROJECTION_TOL {
            drift = next;
            break;
        }
        drift = next;
    }
    Ok(drift)
}

/// Unit outward normals of each proper chamber's boundary vertices.
fn offset_directions(c: &DiscreteCluster, topo: &Topology) -> Result<Vec<Field>> {
    (0..topo.n_proper())
        .map(|k| {
            let mut g = area_gradient(c, topo, k);
            for (i, iface) in c.interfaces.iter().enumerate() {
                let Some(&(_, s)) = topo.sides[i].iter().find(|(p, _)| *p == k) else { continue };
                for q in 1..iface.points.len() - 1 {
                    let (normal, _, _) = vertex_frame(&iface.points, q)?;
                    g.interior[i][q] = normal * (-s);
                }
            }
            for p in &mut g.nodes {
                if p.norm() > 0.0 {
                    *p = p.normalized();
                }
            }
            Ok(g)
        })
        .collect()
}

/// Velocity field of the constrained flow.
fn velocity(c: &DiscreteCluster, topo: &Topology, p: &FlowParams) -> Result<Field> {
    let frame = |iface: &crate::cluster::Interface| -> Result<Vec<(Point, f64, f64)>> {
        let n = iface.points.len();
        let mut out = vec![(Point::ORIGIN, 0.0, 1.0); n];
        for k in 1..n - 1 {
            out[k] = vertex_frame(&iface.points, k)?;
        }
        Ok(out)
    };
    let total: usize = c.interfaces.iter().map(|i| i.points.len()).sum();
    let frames: Vec<Vec<(Point, f64, f64)>> = if total > PARALLEL_THRESHOLD {
        c.interfaces.par_iter().map(frame).collect::<Result<_>>()?
    } else {
        c.interfaces.iter().map(frame).collect::<Result<_>>()?
    };
    let (tangent_sum, dual) = node_tangents(c, topo);
    let mobility: Vec<f64> = dual
        .iter()
        .zip(&topo.junction)
        .map(|(&w, &jn)| if jn && w > 0.0 { p.junction_weight / w } else { 0.0 })
        .collect();

    // curvature force
    let mut force = Field::zeros(c);
    for (i, f) in frames.iter().enumerate() {
        for k in 1..f.len() - 1 {
            let (normal, kappa, _) = f[k];
            force.interior[i][k] = normal * kappa;
        }
    }
    for n in 0..c.nodes.len() {
        force.nodes[n] = tangent_sum[n] * mobility[n];
    }

    let np = topo.n_proper();
    if np == 0 {
        return Ok(force);
    }
    // pressure directions: area gradients pushed through the mobility
    let grads: Vec<Field> = (0..np).map(|k| area_gradient(c, topo, k)).collect();
    let pushed: Vec<Field> = grads
        .iter()
        .map(|g| {
            let mut u = g.clone();
            for (i, f) in frames.iter().enumerate() {
                for k in 1..f.len() - 1 {
                    let (normal, _, w) = f[k];
                    u.interior[i][k] = normal * (g.interior[i][k].dot(normal) / w);
                }
            }
            for n in 0..c.nodes.len() {
                u.nodes[n] = g.nodes[n] * mobility[n];
            }
            u
        })
        .collect();
    let gram: Vec<Vec<f64>> =
        (0..np).map(|a| (0..np).map(|b| grads[a].dot(&pushed[b])).collect()).collect();
    let rhs: Vec<f64> = grads.iter().map(|g| -g.dot(&force)).collect();
    let lambda = solve_dense(gram, rhs)?;
    for (k, l) in lambda.iter().enumerate() {
        force.add_scaled(&pushed[k], *l);
    }
    Ok(force)
}

/// Reject crossing segments and vertices that left the window.
fn check_topology(c: &DiscreteCluster) -> Result<()> {
    for iface in &c.interfaces {
        let n = iface.points.len();
        if let Some(p) = iface.points[1..n - 1].iter().find(|p| c.window.inset(**p) <= 0.0) {
            return Err(Error::Topology(format!("interface {} left the window at {p:?}", iface.id)));
        }
    }
    for node in c.nodes.iter().filter(|n| n.kind == NodeKind::Junction) {
        if c.window.inset(node.position) <= 0.0 {
            return Err(Error::Topology(format!("junction {} left the window", node.id)));
        }
    }
    let segments: Vec<(usize, Point, Point)> = c
        .interfaces
        .iter()
        .enumerate()
        .flat_map(|(i, f)| f.points.windows(2).map(move |w| (i, w[0], w[1])))
        .collect();
    let cell = segments.iter().map(|s| s.1.dist(s.2)).fold(0.0, f64::max).max(1e-12);
    let key = |v: f64| (v / cell).floor() as i64;
    let mut grid: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
    for (k, &(_, a, b)) in segments.iter().enumerate() {
        for gx in key(a.x.min(b.x))..=key(a.x.max(b.x)) {
            for gy in key(a.y.min(b.y))..=key(a.y.max(b.y)) {
                grid.entry((gx, gy)).or_default().push(k);
            }
        }
    }
    for bucket in grid.values() {
        for (x, &s) in bucket.iter().enumerate() {
            for &t in &bucket[x + 1..] {
                let (is, a, b) = segments[s];
                let (it, cc, d) = segments[t];
                // neighbours share an exact endpoint
                if a == cc || a == d || b == cc || b == d {
                    continue;
                }
                if segments_intersect(a, b, cc, d) {
                    let (fi, fj) = (&c.interfaces[is].id, &c.interfaces[it].id);
                    return Err(Error::Topology(format!("interfaces {fi} and {fj} intersect")));
                }
            }
        }
    }
    Ok(())
}

fn total_length(c: &DiscreteCluster) -> f64 {
    c.interfaces.iter().map(|i| i.length()).sum()
}

/// One explicit step of size `dt` followed by the area projection.
/// Returns the moved cluster, the largest speed and the post-projection drift.
fn advance(
    c: &DiscreteCluster,
    topo: &Topology,
    p: &FlowParams,
    dt: f64,
) -> Result<(DiscreteCluster, f64, f64)> {
    let v = velocity(c, topo, p)?;
    let speed = v.max_norm();
    let mut next = c.clone();
    apply(&mut next, topo, &v, dt);
    let drift = project_areas(&mut next, topo)?;
    if drift > p.area_tol {
        return Err(Error::DegenerateConstraint(format!("area projection stalled at {drift:e}")));
    }
    check_topology(&next)?;
    Ok((next, speed, drift))
}

fn stable_dt(c: &DiscreteCluster, p: &FlowParams) -> f64 {
    let h = shortest_segment(c);
    p.dt.min(0.4 * h * h)
}

/// One step of the constrained flow.
pub fn step(c: &DiscreteCluster, p: &FlowParams) -> Result<DiscreteCluster> {
    p.check()?;
    let topo = Topology::new(c)?;
    Ok(advance(c, &topo, p, stable_dt(c, p))?.0)
}

/// Largest speed of the flow at `c`, before any move.
pub fn max_speed(c: &DiscreteCluster, p: &FlowParams) -> Result<f64> {
    p.check()?;
    let topo = Topology::new(c)?;
    Ok(velocity(c, &topo, p)?.max_norm())
}

/// Resample interfaces whose spacing has become uneven or drifted far from
/// `target_spacing`. Uniformly spaced interfaces are left untouched.
fn resample(c: &mut DiscreteCluster, target: f64) -> bool {
    let mut changed = false;
    for iface in &mut c.interfaces {
        let lengths: Vec<f64> = iface.points.windows(2).map(|w| w[0].dist(w[1])).collect();
        let total: f64 = lengths.iter().sum();
        let longest = lengths.iter().copied().fold(0.0, f64::max);
        let shortest = lengths.iter().copied().fold(f64::INFINITY, f64::min);
        let wanted = ((total / target).round() as usize).max(2);
        let count = lengths.len();
        let uneven = longest > 2.0 * shortest;
        let off = (count as f64 - wanted as f64).abs() > 0.25 * wanted as f64;
        if uneven || off {
            iface.points = resample_uniform(&iface.points, wanted);
            changed = true;
        }
    }
    changed
}

/// Run the flow until the largest vertex speed drops below `grad_tol` or
/// `max_steps` is reached.
pub fn evolve(c: &DiscreteCluster, p: &FlowParams) -> Result<(DiscreteCluster, FlowReport)> {
    p.check()?;
    let topo = Topology::new(c)?;
    let mut cur = c.clone();
    let mut max_drift = project_areas(&mut cur, &topo)?;
    check_topology(&cur)?;
    let decimate = (p.max_steps / HISTORY_LEN).max(1);
    let mut history = vec![total_length(&cur)];
    let mut perimeter = history[0];
    let mut steps = 0;
    let mut converged = false;
    while steps < p.max_steps {
        if steps > 0 && steps % p.resample_every == 0 && resample(&mut cur, p.target_spacing) {
            max_drift = max_drift.max(project_areas(&mut cur, &topo)?);
            perimeter = total_length(&cur);
        }
        let mut dt = stable_dt(&cur, p);
        let mut halvings = 0;
        let (next, speed, drift) = loop {
            let (next, speed, drift) = advance(&cur, &topo, p, dt)?;
            if total_length(&next) <= perimeter + ASCENT_SLACK || halvings == MAX_HALVINGS {
                break (next, speed, drift);
            }
            dt *= 0.5;
            halvings += 1;
        };
        steps += 1;
        max_drift = max_drift.max(drift);
        if speed < p.grad_tol {
            // the move is below tolerance; keep the projected state
            cur = next;
            converged = true;
            break;
        }
        cur = next;
        perimeter = total_length(&cur);
        if steps % decimate == 0 {
            history.push(perimeter);
        }
    }
    let final_perimeter = relative_perimeter(&cur, &cur.window)?;
    if history.last() != Some(&final_perimeter) {
        history.push(final_perimeter);
    }
    let max_junction_angle_dev =
        junction_angles(&cur)?.iter().map(JunctionAngles::max_deviation).fold(0.0, f64::max);
    let curvature = cur
        .interfaces
        .iter()
        .filter(|i| i.points.len() >= 3)
        .map(|i| interface_curvature(&cur, &i.id))
        .collect::<Result<Vec<_>>>()?;
    let report = FlowReport {
        steps_taken: steps,
        converged,
        final_perimeter,
        max_junction_angle_dev,
        curvature,
        max_area_drift: max_drift,
        perimeter_history: history,
    };
    Ok((cur, report))
}

/// Outgoing tangent at `pts[0]`, from the quadratic through the first three
/// points parameterized by chord length. Falls back to the first chord on
/// two-point polylines.
fn end_tangent(pts: &[Point]) -> Point {
    let first = pts[1] - pts[0];
    if pts.len() < 3 {
        return first;
    }
    let s1 = first.norm();
    let s2 = s1 + pts[1].dist(pts[2]);
    if s1 == 0.0 || s2 == s1 {
        return first;
    }
    let c0 = -(s1 + s2) / (s1 * s2);
    let c1 = s2 / (s1 * (s2 - s1));
    let c2 = -s1 / (s2 * (s2 - s1));
    pts[0] * c0 + pts[1] * c1 + pts[2] * c2
}

/// Angles at every junction between consecutive outgoing tangents.
pub fn junction_angles(c: &DiscreteCluster) -> Result<Vec<JunctionAngles>> {
    let index = c.node_index();
    let mut directions: Vec<Vec<f64>> = vec![Vec::new(); c.nodes.len()];
    for iface in &c.interfaces {
        let n = iface.points.len();
        if n < 2 {
            return Err(structural(format!("interface {} has fewer than two points", iface.id)));
        }
        let reversed: Vec<Point> = iface.points[n.saturating_sub(3)..].iter().rev().copied().collect();
        let ends = [(0usize, end_tangent(&iface.points)), (1, end_tangent(&reversed))];
        for (e, d) in ends {
            let k = *index
                .get(iface.nodes[e].as_str())
                .ok_or_else(|| structural(format!("unknown node {:?}", iface.nodes[e])))?;
            directions[k].push(d.angle());
        }
    }
    let mut out = Vec::new();
    for (node, mut dirs) in c.nodes.iter().zip(directions) {
        if node.kind != NodeKind::Junction {
            continue;
        }
        if dirs.len() != 3 {
            return Err(structural(format!("junction {} has valence {}", node.id, dirs.len())));
        }
        dirs.sort_by(f64::total_cmp);
        let full = 360.0;
        let deg = |a: f64| a.to_degrees();
        let angles = [
            deg(dirs[1] - dirs[0]),
            deg(dirs[2] - dirs[1]),
            full - deg(dirs[2] - dirs[0]),
        ];
        out.push(JunctionAngles { id: node.id.clone(), angles });
    }
    Ok(out)
}

/// Discrete curvature (turning angle over dual length) at every interior
/// vertex of interface `id`.
pub fn interface_curvature(c: &DiscreteCluster, id: &str) -> Result<InterfaceCurvature> {
    let iface = c.interface(id).ok_or_else(|| domain(format!("no interface {id:?}")))?;
    let pts = &iface.points;
    if pts.len() < 3 {
        return Err(domain(format!("interface {id:?} needs three points for curvature")));
    }
    let values = (1..pts.len() - 1)
        .map(|k| {
            let (e1, e2) = (pts[k] - pts[k - 1], pts[k + 1] - pts[k]);
            turning_angle(e1, e2) / (0.5 * (e1.norm() + e2.norm()))
        })
        .collect::<Vec<f64>>();
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let std = (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n).sqrt();
    let max_abs = values.iter().map(|v| v.abs()).fold(0.0, f64::max);
    Ok(InterfaceCurvature { id: id.to_string(), values, mean, std, max_abs })
}

/// Measure the discrete stationarity conditions of `c`.
pub fn stationarity(c: &DiscreteCluster) -> Result<Stationarity> {
    let proper: Vec<&str> = c.proper_labels();
    let is_proper = |l: &str| proper.contains(&l);
    let mut flat: f64 = 0.0;
    let mut spread: f64 = 0.0;
    // oriented means of proper/improper arcs, per proper chamber
    let mut pressure: HashMap<&str, Vec<f64>> = HashMap::new();
    let mut shared: Vec<(&str, &str, f64)> = Vec::new();
    for iface in c.interfaces.iter().filter(|i| i.points.len() >= 3) {
        let k = interface_curvature(c, &iface.id)?;
        match (is_proper(&iface.left), is_proper(&iface.right)) {
            (false, false) => flat = flat.max(k.max_abs),
            (true, false) => {
                spread = spread.max(k.std);
                pressure.entry(iface.left.as_str()).or_default().push(k.mean);
            }
            (false, true) => {
                spread = spread.max(k.std);
                pressure.entry(iface.right.as_str()).or_default().push(-k.mean);
            }
            (true, true) => {
                spread = spread.max(k.std);
                shared.push((iface.left.as_str(), iface.right.as_str(), k.mean));
            }
        }
    }
    let mut mismatch: f64 = 0.0;
    let mut level: HashMap<&str, f64> = HashMap::new();
    for (label, means) in &pressure {
        let lo = means.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = means.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        mismatch = mismatch.max(hi - lo);
        level.insert(label, means.iter().sum::<f64>() / means.len() as f64);
    }
    for (left, right, mean) in shared {
        if let (Some(a), Some(b)) = (level.get(left), level.get(right)) {
            mismatch = mismatch.max((mean - (a - b)).abs());
        }
    }
    let max_junction_angle_dev =
        junction_angles(c)?.iter().map(JunctionAngles::max_deviation).fold(0.0, f64::max);
    Ok(Stationarity {
        max_flat_curvature: flat,
        max_curvature_std: spread,
        max_mean_mismatch: mismatch,
        max_junction_angle_dev,
    })
}
