//! SVG 1.1 figures: the window outline, shaded proper chambers and one path
//! per interface. Output is a pure function of the cluster.

use std::fmt::Write;

use isoclust_core::{chamber_polygon, DiscreteCluster, Point};

const SIZE: f64 = 480.0;

fn fmt_points(points: &[Point], map: impl Fn(Point) -> (f64, f64)) -> String {
    let mut d = String::new();
    for (k, &p) in points.iter().enumerate() {
        let (x, y) = map(p);
        let _ = write!(d, "{}{x:.4},{y:.4}", if k == 0 { "M" } else { " L" });
    }
    d
}

pub fn render(c: &DiscreteCluster) -> String {
    let (lo, hi) = c.window.bbox();
    let span = (hi.x - lo.x).max(hi.y - lo.y);
    let k = SIZE / span;
    // y up in the cluster, y down in SVG
    let map = |p: Point| ((p.x - lo.x) * k, (hi.y - p.y) * k);
    let width = (hi.x - lo.x) * k;
    let height = (hi.y - lo.y) * k;

    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width:.2}" height="{height:.2}" viewBox="0 0 {width:.2} {height:.2}">"#
    );
    for ch in c.chambers.iter().filter(|ch| ch.proper) {
        let Ok(rings) = chamber_polygon(c, &ch.label) else { continue };
        for ring in rings {
            let pts: Vec<String> = ring
                .iter()
                .map(|&p| {
                    let (x, y) = map(p);
                    format!("{x:.4},{y:.4}")
                })
                .collect();
            let _ = writeln!(
                s,
                r##"  <polygon class="chamber" data-label="{}" points="{}" fill="#f3d27a" stroke="none"/>"##,
                ch.label,
                pts.join(" ")
            );
        }
    }
    let _ = writeln!(
        s,
        r##"  <path class="window" d="{} Z" fill="none" stroke="#888888" stroke-width="1"/>"##,
        fmt_points(&c.window.ring(), map)
    );
    for iface in &c.interfaces {
        let _ = writeln!(
            s,
            r##"  <path class="interface" id="{}" d="{}" fill="none" stroke="#1f3a93" stroke-width="1.5"/>"##,
            iface.id,
            fmt_points(&iface.points, map)
        );
    }
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use isoclust_core::{build_standard_lens, Window};

    #[test]
    fn one_path_per_interface_plus_window() {
        let c = build_standard_lens(&Window::disk(2.0), 32).unwrap();
        let svg = render(&c);
        assert_eq!(svg.matches("<path").count(), c.interfaces.len() + 1);
        assert_eq!(svg, render(&c));
    }
}
