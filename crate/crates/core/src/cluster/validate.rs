//! Axiom checks for discrete clusters.

use std::collections::HashSet;

use super::{trace_chambers, DiscreteCluster, NodeKind, GEOMETRIC_TOL};
use crate::error::{structural, Result};
use crate::geom::shoelace;
use crate::measure::{coverage, crossings, QuadratureParams, Rows};

#[derive(Debug, Clone, PartialEq)]
pub struct AxiomCheck {
    pub name: &'static str,
    pub passed: bool,
    /// Measured defect, in the unit natural to the check (area, length, count).
    pub defect: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ValidationReport {
    pub checks: Vec<AxiomCheck>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&AxiomCheck> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn failures(&self) -> Vec<&AxiomCheck> {
        self.checks.iter().filter(|c| !c.passed).collect()
    }

    fn push(&mut self, name: &'static str, defect: f64, passed: bool) {
        self.checks.push(AxiomCheck { name, passed, defect });
    }
}

/// Check a cluster against the cluster axioms.
///
/// Malformed input (duplicate or dangling ids, the same chamber on both sides
/// of an interface, chamber boundaries that cannot be closed) is an error.
/// Everything else is reported per check with its measured defect:
///
/// * `positive_area`: proper chambers with non-positive area,
/// * `null_overlap`: area covered by two or more chambers,
/// * `full_measure`: window area covered by no chamber,
/// * `junction_valence`: junctions without exactly three interface ends,
/// * `anchor_valence`: anchors without exactly one interface end,
/// * `anchor_placement`: largest anchor distance from the window boundary,
/// * `interface_endpoints`: largest gap between an interface end and its node,
/// * `degenerate_segments`: repeated consecutive points,
/// * `proper_bounded`: proper chambers reaching the window boundary,
/// * `improper_unbounded`: improper chambers not reaching it.
pub fn validate(c: &DiscreteCluster, q: &QuadratureParams) -> Result<ValidationReport> {
    q.check()?;
    check_structure(c)?;
    let traced = trace_chambers(c)?;
    let mut report = ValidationReport::default();
    let scale = c.window.scale();
    let geo_tol = GEOMETRIC_TOL * scale.max(1.0);

    let mut non_positive = 0usize;
    for ch in c.chambers.iter().filter(|ch| ch.proper) {
        let area: f64 = traced[&ch.label].rings.iter().map(|r| shoelace(r)).sum();
        if !(area > 0.0) {
            non_positive += 1;
        }
    }
    report.push("positive_area", non_positive as f64, non_positive == 0);

    let (overlap, uncovered) = coverage_defects(c, &traced, q);
    report.push("null_overlap", overlap, overlap < q.tolerance);
    report.push("full_measure", uncovered, uncovered < q.tolerance);

    let valence = c.valences();
    let mut junction_errors = 0usize;
    let mut anchor_errors = 0usize;
    let mut anchor_offset: f64 = 0.0;
    for (n, v) in c.nodes.iter().zip(&valence) {
        match n.kind {
            NodeKind::Junction => junction_errors += usize::from(*v != 3),
            NodeKind::Anchor => {
                anchor_errors += usize::from(*v != 1);
                anchor_offset = anchor_offset.max(c.window.inset(n.position).abs());
            }
        }
    }
    report.push("junction_valence", junction_errors as f64, junction_errors == 0);
    report.push("anchor_valence", anchor_errors as f64, anchor_errors == 0);
    report.push("anchor_placement", anchor_offset, anchor_offset < geo_tol);

    let index = c.node_index();
    let mut endpoint_gap: f64 = 0.0;
    let mut degenerate = 0usize;
    for iface in &c.interfaces {
        let first = iface.points[0];
        let last = iface.points[iface.points.len() - 1];
        endpoint_gap = endpoint_gap.max(first.dist(c.nodes[index[iface.nodes[0].as_str()]].position));
        endpoint_gap = endpoint_gap.max(last.dist(c.nodes[index[iface.nodes[1].as_str()]].position));
        degenerate += iface.points.windows(2).filter(|w| w[0] == w[1]).count();
    }
    report.push("interface_endpoints", endpoint_gap, endpoint_gap < geo_tol);
    report.push("degenerate_segments", degenerate as f64, degenerate == 0);

    let mut bounded_errors = 0usize;
    let mut unbounded_errors = 0usize;
    for ch in &c.chambers {
        let rings = &traced[&ch.label];
        if ch.proper {
            let near_boundary = rings.touches_window
                || rings.rings.iter().flatten().any(|&p| c.window.inset(p) < geo_tol);
            bounded_errors += usize::from(near_boundary);
        } else {
            unbounded_errors += usize::from(!rings.touches_window);
        }
    }
    report.push("proper_bounded", bounded_errors as f64, bounded_errors == 0);
    report.push("improper_unbounded", unbounded_errors as f64, unbounded_errors == 0);
    Ok(report)
}

fn check_structure(c: &DiscreteCluster) -> Result<()> {
    if !c.window.is_valid() {
        return Err(structural(format!("invalid window {:?}", c.window)));
    }
    let mut labels = HashSet::new();
    for ch in &c.chambers {
        if !labels.insert(ch.label.as_str()) {
            return Err(structural(format!("duplicate chamber label {:?}", ch.label)));
        }
        let consistent = match (ch.proper, ch.target_area) {
            (true, Some(a)) => a > 0.0 && a.is_finite(),
            (false, None) => true,
            _ => false,
        };
        if !consistent {
            return Err(structural(format!("chamber {:?} has an inconsistent target area", ch.label)));
        }
    }
    let mut ids = HashSet::new();
    for n in &c.nodes {
        if !ids.insert(n.id.as_str()) {
            return Err(structural(format!("duplicate node id {:?}", n.id)));
        }
        if !n.position.is_finite() {
            return Err(structural(format!("node {:?} has a non-finite position", n.id)));
        }
    }
    let mut iface_ids = HashSet::new();
    for iface in &c.interfaces {
        if !iface_ids.insert(iface.id.as_str()) {
            return Err(structural(format!("duplicate interface id {:?}", iface.id)));
        }
        for id in &iface.nodes {
            if !ids.contains(id.as_str()) {
                return Err(structural(format!("interface {:?} references unknown node {id:?}", iface.id)));
            }
        }
        for l in [&iface.left, &iface.right] {
            if !labels.contains(l.as_str()) {
                return Err(structural(format!("interface {:?} references unknown chamber {l:?}", iface.id)));
            }
        }
        if iface.left == iface.right {
            return Err(structural(format!(
                "interface {:?} has chamber {:?} on both sides",
                iface.id, iface.left
            )));
        }
        if iface.points.len() < 2 || iface.points.iter().any(|p| !p.is_finite()) {
            return Err(structural(format!("interface {:?} needs two or more finite points", iface.id)));
        }
    }
    for ch in &c.chambers {
        let referenced = c.interfaces.iter().any(|i| i.left == ch.label || i.right == ch.label);
        if !referenced && !c.interfaces.is_empty() {
            return Err(structural(format!("chamber {:?} is not adjacent to any interface", ch.label)));
        }
    }
    Ok(())
}

/// Overlap and uncovered area inside the discretized window, measured along
/// `4 × initial_grid` rows with exact interval lengths.
fn coverage_defects(
    c: &DiscreteCluster,
    traced: &std::collections::BTreeMap<String, super::ChamberRings>,
    q: &QuadratureParams,
) -> (f64, f64) {
    let (lo, hi) = c.window.bbox();
    let n = 4 * q.initial_grid;
    let rows = Rows { y0: lo.y, dy: (hi.y - lo.y) / n as f64, n };
    let window_rows = crossings(&[c.window.ring()], rows);
    let chamber_rows: Vec<Vec<Vec<f64>>> =
        c.chambers.iter().map(|ch| crossings(&traced[&ch.label].rings, rows)).collect();
    let mut overlap = 0.0;
    let mut uncovered = 0.0;
    for j in 0..n {
        let sets: Vec<&[f64]> = chamber_rows.iter().map(|r| r[j].as_slice()).collect();
        let events = coverage(&sets);
        let window_events = coverage(&[&window_rows[j]]);
        // merge the two event streams: window depth and chamber depth
        let mut all: Vec<(f64, i32, bool)> = events.iter().map(|&(x, d)| (x, d, false)).collect();
        all.extend(window_events.iter().map(|&(x, d)| (x, d, true)));
        all.sort_by(|a, b| a.0.total_cmp(&b.0));
        let (mut depth, mut inside, mut start) = (0i32, 0i32, f64::NEG_INFINITY);
        for (x, d, is_window) in all {
            let len = x - start;
            if len > 0.0 {
                if depth >= 2 {
                    overlap += len;
                }
                if inside > 0 && depth == 0 {
                    uncovered += len;
                }
            }
            if is_window {
                inside += d;
            } else {
                depth += d;
            }
            start = x;
        }
    }
    (overlap * rows.dy, uncovered * rows.dy)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cluster::{build_standard_lens, Window};
    use crate::error::Error;

    #[test]
    fn lens_passes_every_axiom() {
        let c = build_standard_lens(&Window::disk(2.0), 128).unwrap();
        let report = validate(&c, &QuadratureParams::default()).unwrap();
        assert!(report.passed(), "{:?}", report.failures());
        assert_eq!(report.check("null_overlap").unwrap().defect, 0.0);
    }

    #[test]
    fn same_label_on_both_sides_is_structural() {
        let mut c = build_standard_lens(&Window::disk(2.0), 16).unwrap();
        c.interfaces[0].right = "E1".into();
        assert!(matches!(validate(&c, &QuadratureParams::default()), Err(Error::Structural(_))));
    }

    #[test]
    fn dangling_node_is_structural() {
        let mut c = build_standard_lens(&Window::disk(2.0), 16).unwrap();
        c.interfaces[2].nodes[1] = "nowhere".into();
        assert!(matches!(validate(&c, &QuadratureParams::default()), Err(Error::Structural(_))));
    }

    #[test]
    fn misplaced_anchor_is_a_defect() {
        let mut c = build_standard_lens(&Window::disk(2.0), 16).unwrap();
        c.nodes[3].position.x = 1.9;
        let last = c.interfaces[2].points.len() - 1;
        c.interfaces[2].points[last].x = 1.9;
        let report = validate(&c, &QuadratureParams::default()).unwrap();
        let check = report.check("anchor_placement").unwrap();
        assert!(!check.passed);
        assert!((check.defect - 0.1).abs() < 1e-12);
    }
}
