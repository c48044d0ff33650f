//! Builders for the named configurations.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_6, PI};

use super::{ChamberSpec, DiscreteCluster, Interface, Node, NodeKind, Window};
use crate::error::{domain, Result};
use crate::exact::{lens_from_radius, standard_lens_radius, DoubleBubbleGeometry, Radius};
use crate::geom::{shoelace, Point};

const MIN_RESOLUTION: usize = 8;

fn check_resolution(resolution: usize) -> Result<()> {
    if resolution < MIN_RESOLUTION {
        return Err(domain(format!("resolution must be at least {MIN_RESOLUTION}, got {resolution}")));
    }
    Ok(())
}

fn check_window(w: &Window) -> Result<()> {
    if !w.is_valid() {
        return Err(domain(format!("invalid window {w:?}")));
    }
    if w.center() != Point::ORIGIN {
        return Err(domain("builders expect a window centered at the origin"));
    }
    Ok(())
}

/// Points `center + radius·(cos a, sin a)` for `a` from `a0` to `a1` in `n` steps.
fn arc(center: Point, radius: f64, a0: f64, a1: f64, n: usize) -> Vec<Point> {
    (0..=n)
        .map(|k| center + Point::polar(radius, a0 + (a1 - a0) * k as f64 / n as f64))
        .collect()
}

fn segment_points(a: Point, b: Point, n: usize) -> Vec<Point> {
    let n = n.max(1);
    (0..=n).map(|k| a + (b - a) * (k as f64 / n as f64)).collect()
}

/// Straight piece from `a` to `b` sampled at roughly `spacing`.
fn ray_points(a: Point, b: Point, spacing: f64) -> Vec<Point> {
    segment_points(a, b, (a.dist(b) / spacing).ceil() as usize)
}

fn node(id: &str, position: Point, kind: NodeKind) -> Node {
    Node { id: id.to_string(), position, kind }
}

fn interface(id: &str, left: &str, right: &str, nodes: [&str; 2], points: Vec<Point>) -> Interface {
    Interface {
        id: id.to_string(),
        left: left.to_string(),
        right: right.to_string(),
        nodes: [nodes[0].to_string(), nodes[1].to_string()],
        points,
    }
}

/// Where the horizontal axis leaves the window, on the right and on the left.
fn axis_exits(w: &Window) -> (Point, Point) {
    match *w {
        Window::Disk { radius, .. } => (Point::new(radius, 0.0), Point::new(-radius, 0.0)),
        Window::Rect { hx, .. } => (Point::new(hx, 0.0), Point::new(-hx, 0.0)),
    }
}

/// The lens cluster of unit area: chamber `E1` between two arcs of radius R,
/// `F1` above and `F2` below the horizontal axis, joined by two rays that end
/// on the window boundary.
pub fn build_standard_lens(w: &Window, resolution: usize) -> Result<DiscreteCluster> {
    let mut c = build_lens(w, standard_lens_radius(), resolution)?;
    c.chambers[0].target_area = Some(1.0);
    Ok(c)
}

/// Lens cluster with arcs of radius `radius`; the proper chamber's target is
/// the exact lens area.
pub fn build_lens(w: &Window, radius: f64, resolution: usize) -> Result<DiscreteCluster> {
    check_resolution(resolution)?;
    check_window(w)?;
    let lens = lens_from_radius(radius)?;
    let s = lens.radius;
    if w.inset(lens.junction_right) <= 0.0 || w.inset(Point::new(0.0, 0.5 * s)) <= 0.0 {
        return Err(domain("window does not strictly contain the lens"));
    }
    let spacing = s * lens.arc_angle / resolution as f64;
    let (exit_right, exit_left) = axis_exits(w);
    let upper = arc(lens.center_lower, s, FRAC_PI_6, PI - FRAC_PI_6, resolution);
    let lower = arc(lens.center_upper, s, PI + FRAC_PI_6, 2.0 * PI - FRAC_PI_6, resolution);
    let mut upper = upper;
    let mut lower = lower;
    // pin the junctions to their closed-form positions
    upper[0] = lens.junction_right;
    upper[resolution] = lens.junction_left;
    lower[0] = lens.junction_left;
    lower[resolution] = lens.junction_right;
    Ok(DiscreteCluster {
        window: *w,
        chambers: vec![
            ChamberSpec::proper("E1", lens.area),
            ChamberSpec::improper("F1"),
            ChamberSpec::improper("F2"),
        ],
        nodes: vec![
            node("q_left", lens.junction_left, NodeKind::Junction),
            node("q_right", lens.junction_right, NodeKind::Junction),
            node("a_left", exit_left, NodeKind::Anchor),
            node("a_right", exit_right, NodeKind::Anchor),
        ],
        interfaces: vec![
            interface("upper", "E1", "F1", ["q_right", "q_left"], upper),
            interface("lower", "E1", "F2", ["q_left", "q_right"], lower),
            interface("ray_right", "F1", "F2", ["q_right", "a_right"], ray_points(lens.junction_right, exit_right, spacing)),
            interface("ray_left", "F2", "F1", ["q_left", "a_left"], ray_points(lens.junction_left, exit_left, spacing)),
        ],
    })
}

/// A diamond (square rotated by 45°) of unit area in place of the lens, with
/// the same rays. Perimeter descent should round it off into the lens.
pub fn build_square_seed(w: &Window, resolution: usize) -> Result<DiscreteCluster> {
    check_resolution(resolution)?;
    check_window(w)?;
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let (right, left, top, bottom) =
        (Point::new(h, 0.0), Point::new(-h, 0.0), Point::new(0.0, h), Point::new(0.0, -h));
    if w.inset(right) <= 0.0 || w.inset(top) <= 0.0 {
        return Err(domain("window does not strictly contain the square seed"));
    }
    let half = resolution / 2;
    let spacing = 2.0 * h / resolution as f64;
    let chain = |a: Point, b: Point, c: Point| {
        let mut pts = segment_points(a, b, half);
        pts.pop();
        pts.extend(segment_points(b, c, resolution - half));
        pts
    };
    let (exit_right, exit_left) = axis_exits(w);
    Ok(DiscreteCluster {
        window: *w,
        chambers: vec![
            ChamberSpec::proper("E1", 1.0),
            ChamberSpec::improper("F1"),
            ChamberSpec::improper("F2"),
        ],
        nodes: vec![
            node("q_left", left, NodeKind::Junction),
            node("q_right", right, NodeKind::Junction),
            node("a_left", exit_left, NodeKind::Anchor),
            node("a_right", exit_right, NodeKind::Anchor),
        ],
        interfaces: vec![
            interface("upper", "E1", "F1", ["q_right", "q_left"], chain(right, top, left)),
            interface("lower", "E1", "F2", ["q_left", "q_right"], chain(left, bottom, right)),
            interface("ray_right", "F1", "F2", ["q_right", "a_right"], ray_points(right, exit_right, spacing)),
            interface("ray_left", "F2", "F1", ["q_left", "a_left"], ray_points(left, exit_left, spacing)),
        ],
    })
}

/// Whether the second lobe of `g` reaches outside `w`.
pub fn double_bubble_is_clipped(g: &DoubleBubbleGeometry, w: &Window) -> bool {
    w.inset(Point::new(0.0, 2.0 * g.r2)) <= 0.0
}

fn on_c2(g: &DoubleBubbleGeometry, phi: f64) -> Point {
    g.center2 + Point::new(g.r2 * phi.sin(), g.r2 * phi.cos())
}

/// Discrete double bubble `D1` (area 1), `D2` (area A), `D3` (exterior).
///
/// When the second lobe does not fit in the window, the arc `C2` is cut where
/// it leaves the window, its two pieces end on anchors and `D2` is recorded as
/// improper: inside the window it carries no area constraint.
pub fn build_double_bubble(g: &DoubleBubbleGeometry, w: &Window, resolution: usize) -> Result<DiscreteCluster> {
    check_resolution(resolution)?;
    check_window(w)?;
    let [q_left, q_right] = g.junctions;
    let bottom = Point::new(0.0, g.center1.y - g.r1);
    if w.inset(q_right) <= 0.0 || w.inset(q_left) <= 0.0 || w.inset(bottom) <= 0.0 {
        return Err(domain("window must contain both junctions and the unit lobe"));
    }
    if let Some(r0) = g.r0.finite() {
        let apex = Point::new(0.0, g.chord_height() + r0 * (1.0 - g.theta0.cos()));
        if w.inset(apex) <= 0.0 {
            return Err(domain("window must contain the middle interface"));
        }
    }

    // C1 runs under the unit lobe from the left junction to the right one.
    let c1: Vec<Point> = (0..=resolution)
        .map(|k| {
            let phi = -g.theta1 + 2.0 * g.theta1 * k as f64 / resolution as f64;
            g.center1 + Point::new(g.r1 * phi.sin(), -g.r1 * phi.cos())
        })
        .collect();
    // C0 runs right to left, above the unit lobe.
    let c0: Vec<Point> = match g.r0 {
        Radius::Finite(r0) => {
            let center0 = g.center0.expect("finite r0 has a center");
            (0..=resolution)
                .map(|k| {
                    let phi = g.theta0 - 2.0 * g.theta0 * k as f64 / resolution as f64;
                    center0 + Point::new(r0 * phi.sin(), r0 * phi.cos())
                })
                .collect()
        }
        Radius::Infinite => segment_points(q_right, q_left, resolution),
    };
    let pin = |mut pts: Vec<Point>, a: Point, b: Point| {
        let n = pts.len() - 1;
        pts[0] = a;
        pts[n] = b;
        pts
    };
    let c1 = pin(c1, q_left, q_right);
    let c0 = pin(c0, q_right, q_left);

    let clipped = double_bubble_is_clipped(g, w);
    let mut nodes = vec![
        node("q_left", q_left, NodeKind::Junction),
        node("q_right", q_right, NodeKind::Junction),
    ];
    let mut interfaces = vec![
        interface("C1", "D1", "D3", ["q_left", "q_right"], c1),
        interface("C0", "D1", "D2", ["q_right", "q_left"], c0),
    ];
    let d2 = if clipped {
        // exit angle on C2, found by bisection between the junction (inside)
        // and the top of the circle (outside)
        let (mut inside, mut outside) = (g.theta2, 0.0);
        for _ in 0..200 {
            let mid = 0.5 * (inside + outside);
            if w.inset(on_c2(g, mid)) > 0.0 {
                inside = mid;
            } else {
                outside = mid;
            }
        }
        let exit = 0.5 * (inside + outside);
        let right_exit = snap_to_boundary(w, on_c2(g, exit));
        let left_exit = snap_to_boundary(w, on_c2(g, -exit));
        let piece = |from: f64, to: f64| -> Vec<Point> {
            (0..=resolution)
                .map(|k| on_c2(g, from + (to - from) * k as f64 / resolution as f64))
                .collect()
        };
        nodes.push(node("a_left", left_exit, NodeKind::Anchor));
        nodes.push(node("a_right", right_exit, NodeKind::Anchor));
        interfaces.push(interface(
            "C2_right",
            "D2",
            "D3",
            ["q_right", "a_right"],
            pin(piece(g.theta2, exit), q_right, right_exit),
        ));
        interfaces.push(interface(
            "C2_left",
            "D2",
            "D3",
            ["a_left", "q_left"],
            pin(piece(-exit, -g.theta2), left_exit, q_left),
        ));
        ChamberSpec::improper("D2")
    } else {
        let c2: Vec<Point> = (0..=resolution)
            .map(|k| on_c2(g, g.theta2 - 2.0 * g.theta2 * k as f64 / resolution as f64))
            .collect();
        interfaces.push(interface("C2", "D2", "D3", ["q_right", "q_left"], pin(c2, q_right, q_left)));
        ChamberSpec::proper("D2", g.area_a)
    };
    Ok(DiscreteCluster {
        window: *w,
        chambers: vec![ChamberSpec::proper("D1", 1.0), d2, ChamberSpec::improper("D3")],
        nodes,
        interfaces,
    })
}

fn snap_to_boundary(w: &Window, p: Point) -> Point {
    w.boundary_point(w.boundary_param(p))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConjectureKind {
    /// Area vector (1, 1, ∞, ∞).
    Peanut,
    /// Area vector (1, ∞, ∞, ∞).
    Chalk,
}

/// Starting configurations for the conjectured minimizers. They are flow
/// inputs with unit proper areas, not stationary states.
pub fn build_conjecture_seed(kind: ConjectureKind, w: &Window, resolution: usize) -> Result<DiscreteCluster> {
    check_resolution(resolution)?;
    check_window(w)?;
    match kind {
        ConjectureKind::Peanut => peanut_seed(w, resolution),
        ConjectureKind::Chalk => chalk_seed(w, resolution),
    }
}

/// Two unit-radius lenses centered at `(±offset, 0)`, cut along `x = 0`.
fn peanut_seed(w: &Window, resolution: usize) -> Result<DiscreteCluster> {
    let half_width = 0.5 * 3f64.sqrt();
    let offset = 0.8 * half_width;
    // lens of radius 1 around (-offset, 0): upper arc centered (-offset, -1/2)
    let top_y = (1.0 - offset * offset).sqrt() - 0.5;
    let upper_center = Point::new(-offset, -0.5);
    let lower_center = Point::new(-offset, 0.5);
    let a_top = (top_y + 0.5).atan2(offset);
    let a_bottom = (-top_y - 0.5).atan2(offset) + 2.0 * PI;
    let left_upper = arc(upper_center, 1.0, a_top, PI - FRAC_PI_6, resolution);
    let left_lower = arc(lower_center, 1.0, PI + FRAC_PI_6, a_bottom, resolution);
    let shared = segment_points(Point::new(0.0, -top_y), Point::new(0.0, top_y), resolution / 2);

    // chamber P1 = closed loop lower → shared → upper
    let mut ring: Vec<Point> = left_lower[..resolution].to_vec();
    ring.extend_from_slice(&shared[..shared.len() - 1]);
    ring.extend_from_slice(&left_upper[..resolution]);
    let scale = 1.0 / shoelace(&ring).sqrt();
    let sc = |pts: &[Point]| -> Vec<Point> { pts.iter().map(|&p| p * scale).collect() };
    let mirror = |pts: &[Point]| -> Vec<Point> {
        pts.iter().rev().map(|&p| Point::new(-p.x * scale, p.y * scale)).collect()
    };

    let left_upper_s = sc(&left_upper);
    let left_lower_s = sc(&left_lower);
    let junction_left = left_lower_s[0];
    let junction_right = Point::new(-junction_left.x, 0.0);
    let junction_left = Point::new(junction_left.x, 0.0);
    let top = Point::new(0.0, top_y * scale);
    let bottom = Point::new(0.0, -top_y * scale);
    if w.inset(junction_right) <= 0.0 || w.inset(top) <= 0.0 {
        return Err(domain("window too small for the peanut seed"));
    }
    let pin = |mut pts: Vec<Point>, a: Point, b: Point| {
        let n = pts.len() - 1;
        pts[0] = a;
        pts[n] = b;
        pts
    };
    let spacing = left_upper_s[0].dist(left_upper_s[1]);
    let (exit_right, exit_left) = axis_exits(w);
    Ok(DiscreteCluster {
        window: *w,
        chambers: vec![
            ChamberSpec::proper("P1", 1.0),
            ChamberSpec::proper("P2", 1.0),
            ChamberSpec::improper("F1"),
            ChamberSpec::improper("F2"),
        ],
        nodes: vec![
            node("q_left", junction_left, NodeKind::Junction),
            node("q_right", junction_right, NodeKind::Junction),
            node("q_top", top, NodeKind::Junction),
            node("q_bottom", bottom, NodeKind::Junction),
            node("a_left", exit_left, NodeKind::Anchor),
            node("a_right", exit_right, NodeKind::Anchor),
        ],
        interfaces: vec![
            interface("P1_lower", "P1", "F2", ["q_left", "q_bottom"], pin(left_lower_s, junction_left, bottom)),
            interface("shared", "P1", "P2", ["q_bottom", "q_top"], pin(sc(&shared), bottom, top)),
            interface("P1_upper", "P1", "F1", ["q_top", "q_left"], pin(left_upper_s, top, junction_left)),
            // mirror images: reversing the order keeps P2 on the left
            interface("P2_lower", "P2", "F2", ["q_bottom", "q_right"], pin(mirror(&left_lower), bottom, junction_right)),
            interface("P2_upper", "P2", "F1", ["q_right", "q_top"], pin(mirror(&left_upper), junction_right, top)),
            interface("ray_left", "F2", "F1", ["q_left", "a_left"], ray_points(junction_left, exit_left, spacing)),
            interface("ray_right", "F1", "F2", ["q_right", "a_right"], ray_points(junction_right, exit_right, spacing)),
        ],
    })
}

/// A rounded triangle whose three arcs bulge by half the amount of the
/// stationary (Reuleaux) shape, with three rays at 120°.
fn chalk_seed(w: &Window, resolution: usize) -> Result<DiscreteCluster> {
    let bulge = FRAC_PI_6 / 2.0;
    let directions = [FRAC_PI_2, FRAC_PI_2 + 2.0 * FRAC_PI_3, FRAC_PI_2 + 4.0 * FRAC_PI_3];
    let unit_junctions: Vec<Point> = directions.iter().map(|&a| Point::polar(1.0, a)).collect();
    let arcs_unit: Vec<Vec<Point>> = (0..3)
        .map(|k| {
            let (a, b) = (unit_junctions[k], unit_junctions[(k + 1) % 3]);
            let mid = (a + b) * 0.5;
            let half_chord = 0.5 * a.dist(b);
            let radius = half_chord / bulge.sin();
            let outward = mid.normalized();
            let center = mid - outward * (radius * bulge.cos());
            let a0 = (a - center).angle();
            let mut a1 = (b - center).angle();
            if a1 < a0 {
                a1 += 2.0 * PI;
            }
            let mut pts = arc(center, radius, a0, a1, resolution);
            pts[0] = a;
            pts[resolution] = b;
            pts
        })
        .collect();
    let ring: Vec<Point> = arcs_unit.iter().flat_map(|a| a[..a.len() - 1].iter().copied()).collect();
    let scale = 1.0 / shoelace(&ring).sqrt();
    let junctions: Vec<Point> = unit_junctions.iter().map(|&p| p * scale).collect();
    let spacing = scale * arcs_unit[0][0].dist(arcs_unit[0][1]);
    for &q in &junctions {
        if w.inset(q) <= 0.0 {
            return Err(domain("window too small for the chalk seed"));
        }
    }
    let exits: Vec<Point> = directions
        .iter()
        .map(|&a| {
            let dir = Point::polar(1.0, a);
            // walk out along the ray to the boundary
            let (mut lo, mut hi) = (0.0, 2.0 * w.scale() * std::f64::consts::SQRT_2);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if w.inset(dir * mid) > 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            snap_to_boundary(w, dir * (0.5 * (lo + hi)))
        })
        .collect();

    let ids = ["q0", "q1", "q2"];
    let anchors = ["a0", "a1", "a2"];
    let sectors = ["F1", "F2", "F3"];
    let mut nodes = Vec::new();
    let mut interfaces = Vec::new();
    for k in 0..3 {
        nodes.push(node(ids[k], junctions[k], NodeKind::Junction));
    }
    for k in 0..3 {
        nodes.push(node(anchors[k], exits[k], NodeKind::Anchor));
    }
    for k in 0..3 {
        let next = (k + 1) % 3;
        let pts: Vec<Point> = arcs_unit[k].iter().map(|&p| p * scale).collect();
        let n = pts.len() - 1;
        let mut pts = pts;
        pts[0] = junctions[k];
        pts[n] = junctions[next];
        interfaces.push(interface(&format!("arc{k}"), "E1", sectors[k], [ids[k], ids[next]], pts));
    }
    for k in 0..3 {
        let prev = (k + 2) % 3;
        interfaces.push(interface(
            &format!("ray{k}"),
            sectors[k],
            sectors[prev],
            [ids[k], anchors[k]],
            ray_points(junctions[k], exits[k], spacing),
        ));
    }
    let mut chambers = vec![ChamberSpec::proper("E1", 1.0)];
    chambers.extend(sectors.iter().map(|s| ChamberSpec::improper(*s)));
    Ok(DiscreteCluster { window: *w, chambers, nodes, interfaces })
}
