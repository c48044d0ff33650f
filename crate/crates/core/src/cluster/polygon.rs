//! Assembly of chamber regions from interface sides and window arcs.

use std::collections::{BTreeMap, HashMap};
use std::f64::consts::TAU;

use super::{DiscreteCluster, NodeKind};
use crate::error::{structural, Result};
use crate::geom::Point;

/// Closed rings of one chamber. Outer boundaries run counterclockwise and
/// holes clockwise, so shoelace areas add up and even-odd membership works on
/// the whole set.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ChamberRings {
    pub rings: Vec<Vec<Point>>,
    /// Whether any part of the boundary runs along the window.
    pub touches_window: bool,
}

struct HalfEdge {
    face: usize,
    from: usize,
    to: usize,
    points: Vec<Point>,
}

/// The closed polygons making up chamber `label`.
pub fn chamber_polygon(c: &DiscreteCluster, label: &str) -> Result<Vec<Vec<Point>>> {
    let traced = trace_chambers(c)?;
    traced
        .get(label)
        .map(|r| r.rings.clone())
        .ok_or_else(|| crate::error::domain(format!("unknown chamber label {label:?}")))
}

pub(crate) fn trace_chambers(c: &DiscreteCluster) -> Result<BTreeMap<String, ChamberRings>> {
    let labels: HashMap<&str, usize> =
        c.chambers.iter().enumerate().map(|(i, ch)| (ch.label.as_str(), i)).collect();
    let nodes = c.node_index();
    let mut half_edges = Vec::with_capacity(2 * c.interfaces.len() + 8);

    for iface in &c.interfaces {
        let face = |l: &str| {
            labels.get(l).copied().ok_or_else(|| {
                structural(format!("interface {} references unknown chamber {l:?}", iface.id))
            })
        };
        let node = |id: &str| {
            nodes.get(id).copied().ok_or_else(|| {
                structural(format!("interface {} references unknown node {id:?}", iface.id))
            })
        };
        let (left, right) = (face(&iface.left)?, face(&iface.right)?);
        if left == right {
            return Err(structural(format!(
                "interface {} has chamber {:?} on both sides",
                iface.id, iface.left
            )));
        }
        if iface.points.len() < 2 {
            return Err(structural(format!("interface {} has fewer than two points", iface.id)));
        }
        let (start, end) = (node(&iface.nodes[0])?, node(&iface.nodes[1])?);
        half_edges.push(HalfEdge { face: left, from: start, to: end, points: iface.points.clone() });
        let mut rev = iface.points.clone();
        rev.reverse();
        half_edges.push(HalfEdge { face: right, from: end, to: start, points: rev });
    }

    // Window arcs between consecutive anchors. At an anchor the chamber on the
    // counterclockwise side is the left one of an interface arriving at the
    // boundary, the right one of an interface leaving it.
    let mut anchors = Vec::new();
    for (k, node) in c.nodes.iter().enumerate() {
        if node.kind != NodeKind::Anchor {
            continue;
        }
        let incident: Vec<_> = c
            .interfaces
            .iter()
            .filter(|i| i.nodes[0] == node.id || i.nodes[1] == node.id)
            .collect();
        if incident.is_empty() {
            continue;
        }
        if incident.len() != 1 {
            return Err(structural(format!(
                "anchor {} has {} incident interfaces",
                node.id,
                incident.len()
            )));
        }
        let iface = incident[0];
        let (ccw, cw) = if iface.nodes[1] == node.id {
            (&iface.left, &iface.right)
        } else {
            (&iface.right, &iface.left)
        };
        anchors.push((c.window.boundary_param(node.position), k, labels[ccw.as_str()], labels[cw.as_str()]));
    }
    anchors.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut window_faces = vec![false; c.chambers.len()];
    for i in 0..anchors.len() {
        let (t0, from, face, _) = anchors[i];
        let (t1, to, _, cw_next) = anchors[(i + 1) % anchors.len()];
        if face != cw_next {
            return Err(structural(format!(
                "window boundary between anchors {} and {} is claimed by {:?} and {:?}",
                c.nodes[from].id, c.nodes[to].id, c.chambers[face].label, c.chambers[cw_next].label
            )));
        }
        let mut points = vec![c.nodes[from].position];
        let t1 = if anchors.len() == 1 { t0 } else { t1 };
        points.extend(c.window.boundary_between(t0, t1));
        points.push(c.nodes[to].position);
        window_faces[face] = true;
        half_edges.push(HalfEdge { face, from, to, points });
    }

    let mut out: BTreeMap<String, ChamberRings> =
        c.chambers.iter().map(|ch| (ch.label.clone(), ChamberRings::default())).collect();

    if anchors.is_empty() {
        if let Some(face) = outer_face(c, &labels) {
            window_faces[face] = true;
            out.get_mut(&c.chambers[face].label).unwrap().rings.push(c.window.ring());
        }
    }

    let mut outgoing: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
    for (k, he) in half_edges.iter().enumerate() {
        outgoing.entry((he.from, he.face)).or_default().push(k);
    }

    let mut visited = vec![false; half_edges.len()];
    for start in 0..half_edges.len() {
        if visited[start] {
            continue;
        }
        let face = half_edges[start].face;
        let mut ring = Vec::new();
        let mut cur = start;
        let mut guard = 0;
        loop {
            visited[cur] = true;
            let he = &half_edges[cur];
            ring.extend_from_slice(&he.points[..he.points.len() - 1]);
            let candidates = outgoing.get(&(he.to, face)).map(Vec::as_slice).unwrap_or(&[]);
            let next = match candidates {
                [] => {
                    return Err(structural(format!(
                        "boundary of chamber {:?} is open at node {}",
                        c.chambers[face].label, c.nodes[he.to].id
                    )))
                }
                [only] => *only,
                many => pick_clockwise(he, many, &half_edges),
            };
            if next == start {
                break;
            }
            if visited[next] {
                return Err(structural(format!(
                    "boundary of chamber {:?} is not a manifold at node {}",
                    c.chambers[face].label, c.nodes[he.to].id
                )));
            }
            cur = next;
            guard += 1;
            if guard > half_edges.len() {
                return Err(structural("chamber boundary walk did not close"));
            }
        }
        out.get_mut(&c.chambers[face].label).unwrap().rings.push(ring);
    }

    for (face, touches) in window_faces.into_iter().enumerate() {
        out.get_mut(&c.chambers[face].label).unwrap().touches_window = touches;
    }
    Ok(out)
}

/// Among several outgoing half-edges, the first one met turning clockwise
/// from the reversed incoming direction keeps the face on the left.
fn pick_clockwise(incoming: &HalfEdge, candidates: &[usize], half_edges: &[HalfEdge]) -> usize {
    let n = incoming.points.len();
    let back = (incoming.points[n - 2] - incoming.points[n - 1]).angle();
    let mut best = candidates[0];
    let mut best_turn = f64::INFINITY;
    for &k in candidates {
        let p = &half_edges[k].points;
        let turn = (back - (p[1] - p[0]).angle()).rem_euclid(TAU);
        let turn = if turn == 0.0 { TAU } else { turn };
        if turn < best_turn {
            best_turn = turn;
            best = k;
        }
    }
    best
}

/// Without anchors, the window boundary belongs to the chamber on the outer
/// side of the segment farthest from the window center.
fn outer_face(c: &DiscreteCluster, labels: &HashMap<&str, usize>) -> Option<usize> {
    let center = c.window.center();
    let mut best: Option<(f64, usize)> = None;
    for iface in &c.interfaces {
        for w in iface.points.windows(2) {
            let mid = (w[0] + w[1]) * 0.5;
            let r = mid.dist(center);
            let outward_left = (w[1] - w[0]).perp().dot(mid - center) > 0.0;
            let label = if outward_left { &iface.left } else { &iface.right };
            if best.map_or(true, |(b, _)| r > b) {
                best = Some((r, labels[label.as_str()]));
            }
        }
    }
    best.map(|(_, f)| f)
}
