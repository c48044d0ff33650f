use std::f64::consts::{PI, TAU};

use crate::geom::Point;

/// Segments used to discretize a full disk boundary when closing improper chambers.
pub const DISK_BOUNDARY_SEGMENTS: usize = 8192;

/// Computational window, a disk or an axis-aligned rectangle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Window {
    Disk { center: Point, radius: f64 },
    Rect { center: Point, hx: f64, hy: f64 },
}

impl Window {
    pub fn disk(radius: f64) -> Self {
        Window::Disk { center: Point::ORIGIN, radius }
    }

    pub fn disk_at(center: Point, radius: f64) -> Self {
        Window::Disk { center, radius }
    }

    pub fn rect(hx: f64, hy: f64) -> Self {
        Window::Rect { center: Point::ORIGIN, hx, hy }
    }

    pub fn center(&self) -> Point {
        match *self {
            Window::Disk { center, .. } | Window::Rect { center, .. } => center,
        }
    }

    pub fn is_valid(&self) -> bool {
        match *self {
            Window::Disk { center, radius } => center.is_finite() && radius > 0.0 && radius.is_finite(),
            Window::Rect { center, hx, hy } => {
                center.is_finite() && hx > 0.0 && hy > 0.0 && hx.is_finite() && hy.is_finite()
            }
        }
    }

    /// Half the diameter of the bounding box, a length scale for tolerances.
    pub fn scale(&self) -> f64 {
        match *self {
            Window::Disk { radius, .. } => radius,
            Window::Rect { hx, hy, .. } => hx.max(hy),
        }
    }

    pub fn area(&self) -> f64 {
        match *self {
            Window::Disk { radius, .. } => PI * radius * radius,
            Window::Rect { hx, hy, .. } => 4.0 * hx * hy,
        }
    }

    /// Signed distance to the boundary, positive inside.
    pub fn inset(&self, p: Point) -> f64 {
        match *self {
            Window::Disk { center, radius } => radius - p.dist(center),
            Window::Rect { center, hx, hy } => {
                let d = p - center;
                (hx - d.x.abs()).min(hy - d.y.abs())
            }
        }
    }

    pub fn contains(&self, p: Point) -> bool {
        self.inset(p) >= 0.0
    }

    pub fn bbox(&self) -> (Point, Point) {
        let c = self.center();
        let (ex, ey) = match *self {
            Window::Disk { radius, .. } => (radius, radius),
            Window::Rect { hx, hy, .. } => (hx, hy),
        };
        (Point::new(c.x - ex, c.y - ey), Point::new(c.x + ex, c.y + ey))
    }

    /// Whether `other` lies inside `self`, up to `tol`.
    pub fn contains_window(&self, other: &Window, tol: f64) -> bool {
        match *other {
            Window::Disk { center, radius } => self.inset(center) + tol >= radius,
            Window::Rect { center, hx, hy } => [(-1.0, -1.0), (1.0, -1.0), (1.0, 1.0), (-1.0, 1.0)]
                .iter()
                .all(|&(sx, sy)| self.inset(center + Point::new(sx * hx, sy * hy)) >= -tol),
        }
    }

    pub fn translated(&self, v: Point) -> Window {
        match *self {
            Window::Disk { center, radius } => Window::Disk { center: center + v, radius },
            Window::Rect { center, hx, hy } => Window::Rect { center: center + v, hx, hy },
        }
    }

    pub fn reflected_x(&self) -> Window {
        let flip = |c: Point| Point::new(c.x, -c.y);
        match *self {
            Window::Disk { center, radius } => Window::Disk { center: flip(center), radius },
            Window::Rect { center, hx, hy } => Window::Rect { center: flip(center), hx, hy },
        }
    }

    /// Counterclockwise boundary parameter in `[0, 1)`, starting from the
    /// point straight right of the center.
    pub fn boundary_param(&self, p: Point) -> f64 {
        match *self {
            Window::Disk { center, .. } => (p - center).angle().rem_euclid(TAU) / TAU,
            Window::Rect { center, hx, hy } => {
                let d = p - center;
                let perimeter = 4.0 * (hx + hy);
                // pick the nearest edge
                let edges = [hx - d.x, hy - d.y, hx + d.x, hy + d.y];
                let edge = (0..4)
                    .min_by(|&a, &b| edges[a].abs().total_cmp(&edges[b].abs()))
                    .unwrap_or(0);
                let s = match edge {
                    0 => {
                        if d.y >= 0.0 {
                            d.y
                        } else {
                            perimeter + d.y
                        }
                    }
                    1 => hy + (hx - d.x),
                    2 => hy + 2.0 * hx + (hy - d.y),
                    _ => 3.0 * hy + 2.0 * hx + (d.x + hx),
                };
                (s / perimeter).rem_euclid(1.0)
            }
        }
    }

    pub fn boundary_point(&self, t: f64) -> Point {
        let t = t.rem_euclid(1.0);
        match *self {
            Window::Disk { center, radius } => center + Point::polar(radius, t * TAU),
            Window::Rect { center, hx, hy } => {
                let perimeter = 4.0 * (hx + hy);
                let s = t * perimeter;
                let d = if s < hy {
                    Point::new(hx, s)
                } else if s < hy + 2.0 * hx {
                    Point::new(hx - (s - hy), hy)
                } else if s < 3.0 * hy + 2.0 * hx {
                    Point::new(-hx, hy - (s - hy - 2.0 * hx))
                } else if s < 3.0 * hy + 4.0 * hx {
                    Point::new(-hx + (s - 3.0 * hy - 2.0 * hx), -hy)
                } else {
                    Point::new(hx, -hy + (s - 3.0 * hy - 4.0 * hx))
                };
                center + d
            }
        }
    }

    /// Parameters of the boundary vertices (corners or the fixed disk
    /// subdivision), increasing in `[0, 1)`.
    fn vertex_params(&self) -> Vec<f64> {
        match *self {
            Window::Disk { .. } => (0..DISK_BOUNDARY_SEGMENTS)
                .map(|k| k as f64 / DISK_BOUNDARY_SEGMENTS as f64)
                .collect(),
            Window::Rect { hx, hy, .. } => {
                let perimeter = 4.0 * (hx + hy);
                vec![
                    hy / perimeter,
                    (hy + 2.0 * hx) / perimeter,
                    (3.0 * hy + 2.0 * hx) / perimeter,
                    (3.0 * hy + 4.0 * hx) / perimeter,
                ]
            }
        }
    }

    /// Boundary vertices strictly between parameters `t0` and `t1`, walking
    /// counterclockwise (wrapping through 0 when `t1 <= t0`).
    pub fn boundary_between(&self, t0: f64, t1: f64) -> Vec<Point> {
        let span = if t1 > t0 { t1 - t0 } else { t1 + 1.0 - t0 };
        let mut params: Vec<f64> = self
            .vertex_params()
            .into_iter()
            .map(|t| (t - t0).rem_euclid(1.0))
            .filter(|&u| u > 1e-12 && u < span - 1e-12)
            .collect();
        params.sort_by(f64::total_cmp);
        params.into_iter().map(|u| self.boundary_point(t0 + u)).collect()
    }

    /// The whole boundary as a counterclockwise ring.
    pub fn ring(&self) -> Vec<Point> {
        self.vertex_params().into_iter().map(|t| self.boundary_point(t)).collect()
    }

    /// Exact x-extent of the window along the horizontal line at height `y`.
    pub fn x_span(&self, y: f64) -> Option<(f64, f64)> {
        match *self {
            Window::Disk { center, radius } => {
                let dy = y - center.y;
                let h = radius * radius - dy * dy;
                (h >= 0.0).then(|| {
                    let w = h.sqrt();
                    (center.x - w, center.x + w)
                })
            }
            Window::Rect { center, hx, hy } => {
                ((y - center.y).abs() <= hy).then_some((center.x - hx, center.x + hx))
            }
        }
    }

    /// Length of the part of segment `[a, b]` inside the window.
    pub fn clipped_length(&self, a: Point, b: Point) -> f64 {
        let d = b - a;
        let len = d.norm();
        if len == 0.0 {
            return 0.0;
        }
        let (t0, t1) = match *self {
            Window::Disk { center, radius } => {
                let f = a - center;
                let qa = d.norm_sq();
                let qb = 2.0 * f.dot(d);
                let qc = f.norm_sq() - radius * radius;
                let disc = qb * qb - 4.0 * qa * qc;
                if disc <= 0.0 {
                    return 0.0;
                }
                let sq = disc.sqrt();
                // stable roots
                let q = -0.5 * (qb + qb.signum() * sq);
                let (mut r0, mut r1) = if q != 0.0 { (q / qa, qc / q) } else { (-sq / (2.0 * qa), sq / (2.0 * qa)) };
                if r0 > r1 {
                    std::mem::swap(&mut r0, &mut r1);
                }
                (r0.max(0.0), r1.min(1.0))
            }
            Window::Rect { center, hx, hy } => {
                let mut t0: f64 = 0.0;
                let mut t1: f64 = 1.0;
                let f = a - center;
                for (p, q) in [(-d.x, f.x + hx), (d.x, hx - f.x), (-d.y, f.y + hy), (d.y, hy - f.y)] {
                    if p == 0.0 {
                        if q < 0.0 {
                            return 0.0;
                        }
                    } else {
                        let r = q / p;
                        if p < 0.0 {
                            t0 = t0.max(r);
                        } else {
                            t1 = t1.min(r);
                        }
                    }
                }
                (t0, t1)
            }
        };
        if t1 > t0 {
            (t1 - t0) * len
        } else {
            0.0
        }
    }
}
