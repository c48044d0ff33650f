//! Cluster JSON: fixed field names, coordinates written with 17 significant digits.

use std::fmt::Write;

use serde::Deserialize;

use super::{ChamberSpec, DiscreteCluster, Interface, Node, NodeKind, Window};
use crate::error::{Error, Result};
use crate::geom::Point;

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn quoted(s: &str) -> String {
    serde_json::to_string(s).expect("strings always serialize")
}

impl DiscreteCluster {
    pub fn to_json(&self) -> String {
        let mut out = String::new();
        out.push_str("{\n  \"window\": ");
        let center = self.window.center();
        let center_field = if center == Point::ORIGIN {
            String::new()
        } else {
            format!(", \"center\": [{}, {}]", num(center.x), num(center.y))
        };
        match self.window {
            Window::Disk { radius, .. } => {
                let _ = write!(out, "{{\"disk\": {{\"radius\": {}{center_field}}}}}", num(radius));
            }
            Window::Rect { hx, hy, .. } => {
                let _ = write!(out, "{{\"rect\": {{\"hx\": {}, \"hy\": {}{center_field}}}}}", num(hx), num(hy));
            }
        }
        out.push_str(",\n  \"chambers\": [");
        for (k, ch) in self.chambers.iter().enumerate() {
            out.push_str(if k == 0 { "\n    " } else { ",\n    " });
            let _ = write!(out, "{{\"label\": {}, \"proper\": {}", quoted(&ch.label), ch.proper);
            if let Some(a) = ch.target_area {
                let _ = write!(out, ", \"target_area\": {}", num(a));
            }
            out.push('}');
        }
        out.push_str("\n  ],\n  \"nodes\": [");
        for (k, n) in self.nodes.iter().enumerate() {
            out.push_str(if k == 0 { "\n    " } else { ",\n    " });
            let kind = match n.kind {
                NodeKind::Junction => "junction",
                NodeKind::Anchor => "anchor",
            };
            let _ = write!(
                out,
                "{{\"id\": {}, \"x\": {}, \"y\": {}, \"kind\": \"{kind}\"}}",
                quoted(&n.id),
                num(n.position.x),
                num(n.position.y)
            );
        }
        out.push_str("\n  ],\n  \"interfaces\": [");
        for (k, i) in self.interfaces.iter().enumerate() {
            out.push_str(if k == 0 { "\n    " } else { ",\n    " });
            let _ = write!(
                out,
                "{{\"id\": {}, \"left\": {}, \"right\": {}, \"nodes\": [{}, {}], \"points\": [",
                quoted(&i.id),
                quoted(&i.left),
                quoted(&i.right),
                quoted(&i.nodes[0]),
                quoted(&i.nodes[1])
            );
            for (j, p) in i.points.iter().enumerate() {
                if j > 0 {
                    out.push_str(", ");
                }
                let _ = write!(out, "[{}, {}]", num(p.x), num(p.y));
            }
            out.push_str("]}");
        }
        out.push_str("\n  ]\n}\n");
        out
    }

    pub fn from_json(text: &str) -> Result<DiscreteCluster> {
        let dto: ClusterDto = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        dto.try_into()
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ClusterDto {
    window: WindowDto,
    chambers: Vec<ChamberDto>,
    nodes: Vec<NodeDto>,
    interfaces: Vec<InterfaceDto>,
}

#[derive(Deserialize)]
#[serde(rename_all = "lowercase")]
enum WindowDto {
    Disk {
        radius: f64,
        #[serde(default)]
        center: Option<[f64; 2]>,
    },
    Rect {
        hx: f64,
        hy: f64,
        #[serde(default)]
        center: Option<[f64; 2]>,
    },
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ChamberDto {
    label: String,
    proper: bool,
    #[serde(default)]
    target_area: Option<f64>,
}

#[derive(Deserialize)]
#[serde(rename_all = "lowercase")]
enum KindDto {
    Junction,
    Anchor,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct NodeDto {
    id: String,
    x: f64,
    y: f64,
    kind: KindDto,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct InterfaceDto {
    id: String,
    left: String,
    right: String,
    nodes: [String; 2],
    points: Vec<[f64; 2]>,
}

impl TryFrom<ClusterDto> for DiscreteCluster {
    type Error = Error;

    fn try_from(dto: ClusterDto) -> Result<Self> {
        let to_point = |c: Option<[f64; 2]>| c.map_or(Point::ORIGIN, |[x, y]| Point::new(x, y));
        let window = match dto.window {
            WindowDto::Disk { radius, center } => Window::Disk { center: to_point(center), radius },
            WindowDto::Rect { hx, hy, center } => Window::Rect { center: to_point(center), hx, hy },
        };
        if !window.is_valid() {
            return Err(Error::Parse(format!("window extents must be positive: {window:?}")));
        }
        let chambers = dto
            .chambers
            .into_iter()
            .map(|c| {
                let valid = match (c.proper, c.target_area) {
                    (true, Some(a)) => a > 0.0 && a.is_finite(),
                    (false, None) => true,
                    _ => false,
                };
                if !valid {
                    return Err(Error::Parse(format!(
                        "chamber {:?}: a target area in (0, ∞) is required exactly for proper chambers",
                        c.label
                    )));
                }
                Ok(ChamberSpec { label: c.label, proper: c.proper, target_area: c.target_area })
            })
            .collect::<Result<Vec<_>>>()?;
        let nodes = dto
            .nodes
            .into_iter()
            .map(|n| Node {
                id: n.id,
                position: Point::new(n.x, n.y),
                kind: match n.kind {
                    KindDto::Junction => NodeKind::Junction,
                    KindDto::Anchor => NodeKind::Anchor,
                },
            })
            .collect();
        let interfaces = dto
            .interfaces
            .into_iter()
            .map(|i| Interface {
                id: i.id,
                left: i.left,
                right: i.right,
                nodes: i.nodes,
                points: i.points.into_iter().map(|[x, y]| Point::new(x, y)).collect(),
            })
            .collect();
        Ok(DiscreteCluster { window, chambers, interfaces, nodes })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cluster::build_standard_lens;

    #[test]
    fn round_trip_is_bit_exact() {
        let c = build_standard_lens(&Window::disk(2.0), 16).unwrap();
        let back = DiscreteCluster::from_json(&c.to_json()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn schema_field_names() {
        let c = build_standard_lens(&Window::disk(2.0), 8).unwrap();
        let v: serde_json::Value = serde_json::from_str(&c.to_json()).unwrap();
        assert!(v["window"]["disk"]["radius"].is_number());
        assert!(v["window"]["disk"].get("center").is_none());
        assert_eq!(v["chambers"][0]["label"], "E1");
        assert_eq!(v["chambers"][0]["proper"], true);
        assert!(v["chambers"][1].get("target_area").is_none());
        assert_eq!(v["nodes"][0]["kind"], "junction");
        assert_eq!(v["nodes"][2]["kind"], "anchor");
        assert_eq!(v["interfaces"][0]["nodes"][0], "q_right");
        assert!(v["interfaces"][0]["points"][0].as_array().unwrap().len() == 2);
    }

    #[test]
    fn rejects_inconsistent_chamber() {
        let text = r#"{"window": {"disk": {"radius": 1.0}}, "chambers": [{"label": "A", "proper": true}], "nodes": [], "interfaces": []}"#;
        assert!(matches!(DiscreteCluster::from_json(text), Err(Error::Parse(_))));
        let text = r#"{"window": {"rect": {"hx": 1.0, "hy": 2.0}}, "chambers": [{"label": "A", "proper": false}], "nodes": [], "interfaces": []}"#;
        let c = DiscreteCluster::from_json(text).unwrap();
        assert_eq!(c.window, Window::rect(1.0, 2.0));
    }
}
