//! Horizontal scanlines through ring sets.
//!
//! Rows sit at cell centers `y0 + (j + ½)·dy`. An edge crosses row `j` when
//! `min(ya, yb) <= y_j < max(ya, yb)`; two edges sharing a vertex agree on the
//! comparison, so even-odd parity along a row is never ambiguous.

use crate::geom::Point;

#[derive(Debug, Clone, Copy)]
pub(crate) struct Rows {
    pub y0: f64,
    pub dy: f64,
    pub n: usize,
}

impl Rows {
    pub fn y(&self, j: usize) -> f64 {
        self.y0 + (j as f64 + 0.5) * self.dy
    }

    /// First row index whose height is `>= y`.
    fn first_at_or_above(&self, y: f64) -> usize {
        let guess = ((y - self.y0) / self.dy - 0.5).ceil();
        let mut j = if guess <= 0.0 { 0 } else { (guess as usize).min(self.n) };
        while j > 0 && self.y(j - 1) >= y {
            j -= 1;
        }
        while j < self.n && self.y(j) < y {
            j += 1;
        }
        j
    }
}

/// Sorted crossing abscissae of every row with the given rings.
pub(crate) fn crossings(rings: &[Vec<Point>], rows: Rows) -> Vec<Vec<f64>> {
    let mut out = vec![Vec::new(); rows.n];
    for ring in rings {
        let m = ring.len();
        for i in 0..m {
            let (a, b) = (ring[i], ring[(i + 1) % m]);
            if a.y == b.y {
                continue;
            }
            let (lo, hi) = if a.y < b.y { (a, b) } else { (b, a) };
            let j0 = rows.first_at_or_above(lo.y);
            let j1 = rows.first_at_or_above(hi.y);
            for (j, row) in out.iter_mut().enumerate().take(j1).skip(j0) {
                let y = rows.y(j);
                let t = (y - lo.y) / (hi.y - lo.y);
                row.push(lo.x + t * (hi.x - lo.x));
            }
        }
    }
    for row in &mut out {
        row.sort_by(f64::total_cmp);
    }
    out
}

/// Even-odd intervals of one row.
pub(crate) fn intervals(row: &[f64]) -> impl Iterator<Item = (f64, f64)> + '_ {
    row.chunks_exact(2).map(|c| (c[0], c[1]))
}

/// Coverage profile of a row: sorted breakpoints with the number of
/// interval sets covering each gap. `sets[k]` are even-odd crossing rows.
pub(crate) fn coverage(sets: &[&[f64]]) -> Vec<(f64, i32)> {
    let mut events: Vec<(f64, i32)> = Vec::new();
    for row in sets {
        for (a, b) in intervals(row) {
            events.push((a, 1));
            events.push((b, -1));
        }
    }
    events.sort_by(|p, q| p.0.total_cmp(&q.0).then(p.1.cmp(&q.1)));
    events
}

/// Number of sample abscissae `x0 + (i + ½)·dx`, `0 <= i < n`, below `t`.
pub(crate) fn samples_below(t: f64, x0: f64, dx: f64, n: usize) -> usize {
    let k = ((t - x0) / dx - 0.5).ceil();
    if k <= 0.0 {
        0
    } else {
        (k as usize).min(n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_square_rows() {
        let sq = vec![vec![
            Point::new(0.0, 0.0),
            Point::new(1.0, 0.0),
            Point::new(1.0, 1.0),
            Point::new(0.0, 1.0),
        ]];
        let rows = Rows { y0: -0.5, dy: 0.25, n: 8 };
        let c = crossings(&sq, rows);
        let inside: Vec<usize> = (0..8).filter(|&j| !c[j].is_empty()).collect();
        assert_eq!(inside, vec![2, 3, 4, 5]);
        assert_eq!(c[3], vec![0.0, 1.0]);
    }

    #[test]
    fn vertex_on_row_keeps_parity() {
        // diamond with its left and right vertices exactly on a row
        let d = vec![vec![
            Point::new(0.0, -1.0),
            Point::new(1.0, 0.0),
            Point::new(0.0, 1.0),
            Point::new(-1.0, 0.0),
        ]];
        let rows = Rows { y0: -0.5, dy: 1.0, n: 1 };
        assert_eq!(rows.y(0), 0.0);
        let c = crossings(&d, rows);
        assert_eq!(c[0].len(), 2);
    }

    #[test]
    fn sample_counting() {
        // samples at 0.5, 1.5, 2.5, 3.5
        assert_eq!(samples_below(0.5, 0.0, 1.0, 4), 0);
        assert_eq!(samples_below(0.51, 0.0, 1.0, 4), 1);
        assert_eq!(samples_below(10.0, 0.0, 1.0, 4), 4);
        assert_eq!(samples_below(-3.0, 0.0, 1.0, 4), 0);
    }
}
