//! Discrete (N,M)-clusters: labeled polyline networks inside a finite window.
//!
//! A cluster is a set of chambers (proper ones carry a target area), a set of
//! nodes (triple junctions and window anchors) and a set of interfaces. Each
//! interface is a polyline between two nodes that records the chamber on its
//! left and on its right with respect to the point order. Improper chambers
//! are the ones that reach the window boundary; the window stands in for the
//! ball inside which competitors may differ.

mod build;
mod json;
mod polygon;
mod validate;
mod window;

use std::collections::HashMap;

pub use build::{
    build_conjecture_seed, build_double_bubble, build_lens, build_square_seed, build_standard_lens,
    double_bubble_is_clipped, ConjectureKind,
};
pub use polygon::chamber_polygon;
pub(crate) use polygon::{trace_chambers, ChamberRings};
pub use validate::{validate, AxiomCheck, ValidationReport};
pub use window::Window;

use crate::geom::Point;

/// Tolerance for "lies on" tests between nodes, endpoints and the window boundary.
pub const GEOMETRIC_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct ChamberSpec {
    pub label: String,
    pub proper: bool,
    pub target_area: Option<f64>,
}

impl ChamberSpec {
    pub fn proper(label: impl Into<String>, target_area: f64) -> Self {
        ChamberSpec { label: label.into(), proper: true, target_area: Some(target_area) }
    }

    pub fn improper(label: impl Into<String>) -> Self {
        ChamberSpec { label: label.into(), proper: false, target_area: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NodeKind {
    Junction,
    Anchor,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Node {
    pub id: String,
    pub position: Point,
    pub kind: NodeKind,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Interface {
    pub id: String,
    pub left: String,
    pub right: String,
    /// Start and end node ids.
    pub nodes: [String; 2],
    pub points: Vec<Point>,
}

impl Interface {
    /// +1 when `label` is on the left, -1 when on the right, 0 otherwise
    /// (and 0 for an interface with the same chamber on both sides).
    pub fn side_of(&self, label: &str) -> f64 {
        match (self.left == label, self.right == label) {
            (true, false) => 1.0,
            (false, true) => -1.0,
            _ => 0.0,
        }
    }

    pub fn length(&self) -> f64 {
        crate::geom::polyline_length(&self.points)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteCluster {
    pub window: Window,
    pub chambers: Vec<ChamberSpec>,
    pub interfaces: Vec<Interface>,
    pub nodes: Vec<Node>,
}

impl DiscreteCluster {
    pub fn chamber(&self, label: &str) -> Option<&ChamberSpec> {
        self.chambers.iter().find(|c| c.label == label)
    }

    pub fn node(&self, id: &str) -> Option<&Node> {
        self.nodes.iter().find(|n| n.id == id)
    }

    pub fn interface(&self, id: &str) -> Option<&Interface> {
        self.interfaces.iter().find(|i| i.id == id)
    }

    pub fn proper_labels(&self) -> Vec<&str> {
        self.chambers.iter().filter(|c| c.proper).map(|c| c.label.as_str()).collect()
    }

    pub(crate) fn node_index(&self) -> HashMap<&str, usize> {
        self.nodes.iter().enumerate().map(|(i, n)| (n.id.as_str(), i)).collect()
    }

    /// Number of interface ends incident to each node.
    pub fn valences(&self) -> Vec<usize> {
        let index = self.node_index();
        let mut valence = vec![0; self.nodes.len()];
        for iface in &self.interfaces {
            for id in &iface.nodes {
                if let Some(&k) = index.get(id.as_str()) {
                    valence[k] += 1;
                }
            }
        }
        valence
    }

    /// Rigid translation of everything, window included.
    pub fn translated(&self, v: Point) -> DiscreteCluster {
        let mut c = self.clone();
        c.window = c.window.translated(v);
        for n in &mut c.nodes {
            n.position += v;
        }
        for iface in &mut c.interfaces {
            for p in &mut iface.points {
                *p += v;
            }
        }
        c
    }

    /// Mirror image across the x-axis. Orientation flips, so every interface
    /// swaps its left and right labels.
    pub fn reflected_x(&self) -> DiscreteCluster {
        let mut c = self.clone();
        c.window = c.window.reflected_x();
        for n in &mut c.nodes {
            n.position.y = -n.position.y;
        }
        for iface in &mut c.interfaces {
            for p in &mut iface.points {
                p.y = -p.y;
            }
            std::mem::swap(&mut iface.left, &mut iface.right);
        }
        c
    }

    /// Interface polylines, in order.
    pub fn polylines(&self) -> impl Iterator<Item = &[Point]> {
        self.interfaces.iter().map(|i| i.points.as_slice())
    }

    /// Copy the node positions onto the interface endpoints they own.
    pub(crate) fn sync_endpoints(&mut self) {
        let positions: std::collections::HashMap<String, Point> =
            self.nodes.iter().map(|n| (n.id.clone(), n.position)).collect();
        for iface in &mut self.interfaces {
            if let Some(&p) = positions.get(&iface.nodes[0]) {
                iface.points[0] = p;
            }
            if let Some(&p) = positions.get(&iface.nodes[1]) {
                let last = iface.points.len() - 1;
                iface.points[last] = p;
            }
        }
    }
}
