//! Closed-form lens constants and the asymmetric double-bubble solver.
//!
//! Everything here is a pure function of its arguments. The discrete modules
//! use these values as ground truth.

use std::f64::consts::{FRAC_PI_3, PI};

use crate::error::{domain, Error, Result};
use crate::geom::Point;

const TWO_PI_3: f64 = 2.0 * PI / 3.0;
const SQRT3: f64 = 1.732_050_807_568_877_2;

/// Area of a lens of unit radius: `2π/3 − √3/2`.
pub fn unit_lens_area() -> f64 {
    TWO_PI_3 - 0.5 * SQRT3
}

/// Radius of curvature of the unit-area lens, `1/√(2π/3 − √3/2)`.
pub fn standard_lens_radius() -> f64 {
    1.0 / unit_lens_area().sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LensGeometry {
    pub radius: f64,
    pub half_width: f64,
    /// Opening angle of each arc (`2π/3`).
    pub arc_angle: f64,
    pub center_lower: Point,
    pub center_upper: Point,
    pub junction_left: Point,
    pub junction_right: Point,
    pub area: f64,
    /// Length of the two arcs.
    pub finite_perimeter: f64,
}

pub fn lens_from_radius(s: f64) -> Result<LensGeometry> {
    if !(s > 0.0 && s.is_finite()) {
        return Err(domain(format!("lens radius must be positive and finite, got {s}")));
    }
    let half_width = 0.5 * SQRT3 * s;
    Ok(LensGeometry {
        radius: s,
        half_width,
        arc_angle: TWO_PI_3,
        center_lower: Point::new(0.0, -0.5 * s),
        center_upper: Point::new(0.0, 0.5 * s),
        junction_left: Point::new(-half_width, 0.0),
        junction_right: Point::new(half_width, 0.0),
        area: s * s * unit_lens_area(),
        finite_perimeter: 2.0 * TWO_PI_3 * s,
    })
}

/// Upper boundary `√(s² − x²) − s/2` of the lens of radius `s`.
pub fn lens_profile(x: f64, s: f64) -> Result<f64> {
    if !(s > 0.0) {
        return Err(domain(format!("lens radius must be positive, got {s}")));
    }
    let half_width = 0.5 * SQRT3 * s;
    if x.abs() > half_width * (1.0 + 4.0 * f64::EPSILON) {
        return Err(domain(format!("|x| = {} exceeds the lens half width {half_width}", x.abs())));
    }
    if x.abs() >= half_width {
        return Ok(0.0);
    }
    Ok(((s - x) * (s + x)).sqrt() - 0.5 * s)
}

/// Radius of the interface separating the two lobes. The symmetric double
/// bubble has a flat middle interface, which is kept as a tag rather than an
/// IEEE infinity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Radius {
    /// Signed radius: negative when the interface bulges into the unit chamber.
    Finite(f64),
    Infinite,
}

impl Radius {
    pub fn curvature(self) -> f64 {
        match self {
            Radius::Finite(r) => 1.0 / r,
            Radius::Infinite => 0.0,
        }
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            Radius::Finite(r) => Some(r),
            Radius::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Radius::Infinite)
    }
}

/// Double bubble with area vector `(1, A, ∞)`.
///
/// Arc `C1` (radius `r1`) bounds the unit chamber against the exterior, `C2`
/// (radius `r2`) bounds the chamber of area `A` against the exterior and `C0`
/// (radius `r0`) separates the two lobes. Each `theta` is the half angle the
/// arc subtends at its center; all three arcs share the chord through the two
/// junctions. Gauge: the circle carrying `C2` is tangent to the x-axis at the
/// origin with its center on the positive y-axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DoubleBubbleGeometry {
    pub area_a: f64,
    pub r0: Radius,
    pub r1: f64,
    pub r2: f64,
    pub theta0: f64,
    pub theta1: f64,
    pub theta2: f64,
    /// `None` when `C0` is flat.
    pub center0: Option<Point>,
    pub center1: Point,
    pub center2: Point,
    /// Left and right triple junctions.
    pub junctions: [Point; 2],
    pub residual_norm: f64,
}

impl DoubleBubbleGeometry {
    /// Half length of the common chord.
    pub fn half_chord(&self) -> f64 {
        self.junctions[1].x
    }

    /// Height of the common chord above the x-axis.
    pub fn chord_height(&self) -> f64 {
        self.junctions[1].y
    }
}

pub const DEFAULT_TOL: f64 = 1e-10;
pub const MAX_ITERATIONS: usize = 100;

/// `θ − sinθ·cosθ`, the area of a circular segment of unit radius and half angle θ.
fn segment(theta: f64) -> f64 {
    if theta.abs() < 0.05 {
        // alternating series; the closed form cancels catastrophically here
        let t2 = theta * theta;
        let mut term = 2.0 * theta * t2 / 3.0;
        let mut acc = term;
        for k in 2..8 {
            let k = k as f64;
            term *= -4.0 * t2 / ((2.0 * k) * (2.0 * k + 1.0));
            acc += term;
        }
        acc
    } else {
        theta - theta.sin() * theta.cos()
    }
}

/// Segment area per unit squared half chord: `(θ − sinθ·cosθ)/sin²θ`. Odd in θ.
fn chord_area(theta: f64) -> f64 {
    if theta == 0.0 {
        return 0.0;
    }
    let s = theta.sin();
    segment(theta) / (s * s)
}

fn chord_area_derivative(theta: f64) -> f64 {
    if theta.abs() < 1e-4 {
        return 2.0 / 3.0 + 0.4 * theta * theta * (2.0 / 3.0);
    }
    2.0 - 2.0 * theta.cos() / theta.sin() * chord_area(theta)
}

/// Area of the second lobe as a function of θ2 once the unit lobe is scaled to area 1.
fn area_for_theta2(theta2: f64) -> f64 {
    let theta0 = theta2 - TWO_PI_3;
    let theta1 = 2.0 * TWO_PI_3 - theta2;
    (chord_area(theta2) - chord_area(theta0)) / (chord_area(theta1) + chord_area(theta0))
}

fn log_area_derivative(theta2: f64) -> f64 {
    let theta0 = theta2 - TWO_PI_3;
    let theta1 = 2.0 * TWO_PI_3 - theta2;
    let (f0, f1, f2) = (chord_area(theta0), chord_area(theta1), chord_area(theta2));
    let (d0, d1, d2) = (
        chord_area_derivative(theta0),
        chord_area_derivative(theta1),
        chord_area_derivative(theta2),
    );
    (d2 - d0) / (f2 - f0) - (d0 - d1) / (f1 + f0)
}

fn symmetric_double_bubble() -> DoubleBubbleGeometry {
    let r = 1.0 / (TWO_PI_3 + 0.25 * SQRT3).sqrt();
    assemble(1.0, Radius::Infinite, r, r, 0.0, TWO_PI_3, TWO_PI_3)
}

fn assemble(
    area_a: f64,
    r0: Radius,
    r1: f64,
    r2: f64,
    theta0: f64,
    theta1: f64,
    theta2: f64,
) -> DoubleBubbleGeometry {
    let half_chord = r2 * theta2.sin();
    let chord_height = r2 * (1.0 + theta2.cos());
    let center2 = Point::new(0.0, r2);
    let center1 = Point::new(0.0, chord_height + r1 * theta1.cos());
    let center0 = r0.finite().map(|r| Point::new(0.0, chord_height - r * theta0.cos()));
    let mut g = DoubleBubbleGeometry {
        area_a,
        r0,
        r1,
        r2,
        theta0,
        theta1,
        theta2,
        center0,
        center1,
        center2,
        junctions: [
            Point::new(-half_chord, chord_height),
            Point::new(half_chord, chord_height),
        ],
        residual_norm: 0.0,
    };
    g.residual_norm = max_abs(&double_bubble_residual(&g));
    g
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Solve the six-equation double-bubble system for the area vector `(1, A, ∞)`.
///
/// The unknown is θ2 on `(π/3, π)`: `θ0 = θ2 − 2π/3`, `θ1 = 4π/3 − θ2`,
/// the shared half chord follows from the unit-area equation and every radius
/// from the chord. `A(θ2)` is increasing, so `ln A(θ2) = ln A` is inverted by
/// Newton's method inside a shrinking bisection bracket. For `A < 1` the
/// middle arc bulges into the unit chamber and θ0, r0 come out negative.
pub fn solve_double_bubble(a: f64, tol: f64) -> Result<DoubleBubbleGeometry> {
    if !(a > 0.0 && a.is_finite()) {
        return Err(domain(format!("second chamber area must be positive and finite, got {a}")));
    }
    if !(tol > 0.0) {
        return Err(domain(format!("tolerance must be positive, got {tol}")));
    }
    if (a - 1.0).abs() < 1e-9 {
        return Ok(symmetric_double_bubble());
    }

    let target = a.ln();
    let mut lo = FRAC_PI_3;
    let mut hi = PI;
    let mut theta2 = if a > 1.0 { 0.5 * (TWO_PI_3 + PI) } else { 0.5 * (FRAC_PI_3 + TWO_PI_3) };
    let mut last = f64::INFINITY;
    let mut converged = false;
    for _ in 0..MAX_ITERATIONS {
        let g = area_for_theta2(theta2).ln() - target;
        last = g;
        if g > 0.0 {
            hi = theta2;
        } else {
            lo = theta2;
        }
        if g.abs() < 1e-15 || hi - lo < 4.0 * f64::EPSILON {
            converged = true;
            break;
        }
        let slope = log_area_derivative(theta2);
        let newton = theta2 - g / slope;
        theta2 = if slope.is_finite() && slope > 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
    }
    if !converged && last.abs() > 1e-13 {
        return Err(Error::Solver {
            message: format!("θ2 iteration for A = {a} hit the cap of {MAX_ITERATIONS}"),
            residual: last.abs(),
        });
    }

    let theta0 = theta2 - TWO_PI_3;
    let theta1 = 2.0 * TWO_PI_3 - theta2;
    let half_chord = 1.0 / (chord_area(theta1) + chord_area(theta0)).sqrt();
    let r1 = half_chord / theta1.sin();
    let r0 = Radius::Finite(half_chord / theta0.sin());
    let mut r2 = half_chord / theta2.sin();
    // θ2 is quantized to one ulp; near θ2 = π that leaves a visible error in
    // the second area equation. Absorb it into r2, to which the other five
    // equations are nearly insensitive.
    let lobe0 = r0.finite().map_or(0.0, |r| r * r * segment(theta0));
    for _ in 0..3 {
        let lhs = r2 * r2 * segment(theta2) - lobe0;
        r2 += (a - lhs) / (2.0 * r2 * segment(theta2));
    }

    let g = assemble(a, r0, r1, r2, theta0, theta1, theta2);
    if g.residual_norm >= tol {
        return Err(Error::Solver {
            message: format!("residual of the six equations above tolerance {tol:e} for A = {a}"),
            residual: g.residual_norm,
        });
    }
    Ok(g)
}

/// Left-minus-right residuals of the six double-bubble equations, in order:
/// unit area, second area, the two chord relations, the curvature balance
/// and the cosine sum. The second area equation is divided by `max(A, 1)`:
/// in absolute terms one ulp of `A = 10⁶` is already above `10⁻¹⁰`.
pub fn double_bubble_residual(g: &DoubleBubbleGeometry) -> [f64; 6] {
    let lobe1 = g.r1 * g.r1 * segment(g.theta1);
    let lobe2 = g.r2 * g.r2 * segment(g.theta2);
    let (lobe0, chord0) = match g.r0 {
        Radius::Finite(r) => (r * r * segment(g.theta0), r * g.theta0.sin()),
        // flat interface: no lens on the chord, chord length taken from C1
        Radius::Infinite => (0.0, g.r1 * g.theta1.sin()),
    };
    [
        lobe1 + lobe0 - 1.0,
        (lobe2 - lobe0 - g.area_a) / g.area_a.max(1.0),
        g.r1 * g.theta1.sin() - chord0,
        g.r2 * g.theta2.sin() - chord0,
        1.0 / g.r1 - 1.0 / g.r2 - g.r0.curvature(),
        g.theta1.cos() + g.theta2.cos() + g.theta0.cos(),
    ]
}

/// Distance of a double bubble's small-lobe data from the lens limit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LimitGap {
    pub dr0: f64,
    pub dr1: f64,
    pub dtheta0: f64,
    pub dtheta1: f64,
}

impl LimitGap {
    pub fn max(&self) -> f64 {
        self.dr0.max(self.dr1).max(self.dtheta0).max(self.dtheta1)
    }
}

/// `None` when r0 is infinite, where the gaps are not applicable.
pub fn limit_gap(g: &DoubleBubbleGeometry) -> Option<LimitGap> {
    let r0 = g.r0.finite()?;
    let big_r = standard_lens_radius();
    Some(LimitGap {
        dr0: (r0 - big_r).abs(),
        dr1: (g.r1 - big_r).abs(),
        dtheta0: (g.theta0 - FRAC_PI_3).abs(),
        dtheta1: (g.theta1 - FRAC_PI_3).abs(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    // 40-digit evaluations of the closed forms (mpmath)
    const R_REF: f64 = 0.902_267_787_584_429_6;
    const R1_SYM_REF: f64 = 0.629_016_936_164_531_1;
    const UNIT_AREA_REF: f64 = 1.228_369_698_608_756_8;

    #[test]
    fn standard_radius_matches_extended_precision() {
        let r = standard_lens_radius();
        assert!((r - R_REF).abs() / R_REF < 1e-15);
        assert_eq!(format!("{r:.6}"), "0.902268");
    }

    #[test]
    fn lens_geometry_closed_forms() {
        let lens = lens_from_radius(standard_lens_radius()).unwrap();
        assert!((lens.area - 1.0).abs() < 1e-14);
        let two = lens_from_radius(2.0 * standard_lens_radius()).unwrap();
        assert!((two.area - 4.0).abs() < 1e-13);
        let unit = lens_from_radius(1.0).unwrap();
        assert!((unit.area - UNIT_AREA_REF).abs() < 1e-15);
        for lens in [lens, two, unit] {
            let s = lens.radius;
            for j in [lens.junction_left, lens.junction_right] {
                assert!((j.dist(lens.center_lower) - s).abs() < 1e-14 * s);
                assert!((j.dist(lens.center_upper) - s).abs() < 1e-14 * s);
            }
            assert!((lens.center_lower.dist(lens.center_upper) - s).abs() < 1e-15 * s);
            assert!((lens.finite_perimeter - 4.0 * PI * s / 3.0).abs() < 1e-14 * s);
        }
    }

    #[test]
    fn lens_area_matches_simpson_quadrature_of_profile() {
        let n = 1_000_000;
        let a = -0.5 * SQRT3;
        let h = -2.0 * a / n as f64;
        let mut acc = lens_profile(a, 1.0).unwrap() + lens_profile(-a, 1.0).unwrap();
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            acc += w * lens_profile(a + i as f64 * h, 1.0).unwrap();
        }
        let area = 2.0 * acc * h / 3.0;
        // the profile has square-root-free endpoints, Simpson converges fast
        assert!((area - lens_from_radius(1.0).unwrap().area).abs() < 1e-9);
    }

    #[test]
    fn lens_domain_errors() {
        assert!(matches!(lens_from_radius(0.0), Err(Error::Domain(_))));
        assert!(matches!(lens_from_radius(-1.0), Err(Error::Domain(_))));
        assert!(matches!(lens_profile(0.9, 1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn lens_profile_values() {
        let s = 1.7;
        assert!((lens_profile(0.0, s).unwrap() - 0.5 * s).abs() < 1e-15);
        assert_eq!(lens_profile(0.5 * SQRT3 * s, s).unwrap(), 0.0);
        assert_eq!(lens_profile(-0.5 * SQRT3 * s, s).unwrap(), 0.0);
        let expected = 0.366_025_403_784_438_65 * s;
        assert!((lens_profile(0.5 * s, s).unwrap() - expected).abs() < 1e-15);
    }

    #[test]
    fn segment_series_matches_closed_form_at_switch() {
        for t in [0.049, 0.0499, -0.049] {
            let closed = t - f64::sin(t) * f64::cos(t);
            assert!((segment(t) - closed).abs() < 1e-17);
        }
    }

    #[test]
    fn symmetric_case_is_analytic() {
        let g = solve_double_bubble(1.0, DEFAULT_TOL).unwrap();
        assert!(g.r0.is_infinite());
        assert!(g.center0.is_none());
        assert_eq!(g.theta0, 0.0);
        assert_eq!(g.theta1, TWO_PI_3);
        assert_eq!(g.theta2, TWO_PI_3);
        assert!((g.r1 - R1_SYM_REF).abs() < 1e-15);
        let res = double_bubble_residual(&g);
        assert!(max_abs(&res) < 1e-12, "{res:?}");
        assert!((res[0].abs() - res[1].abs()).abs() < 1e-15);
        assert!(limit_gap(&g).is_none());
    }

    // Reference solutions from mpmath.findroot on the full six-equation system
    // (40 digits), started from the lens values.
    #[test]
    fn matches_independent_six_equation_root() {
        let cases = [
            // A, r0, r1, r2, theta0
            (10.0, 1.262_309_455_342_354_9, 0.745_261_054_189_053_3, 1.819_462_304_308_192_8, 0.627_601_195_354_227_1),
            (0.1, -0.399_177_299_084_844_4, 0.575_364_499_843_228_0, 0.235_672_238_265_557_9, -0.627_601_195_354_227_1),
            (100.0, 0.984_668_455_543_044_7, 0.838_642_699_256_558_0, 5.655_064_095_742_840_1, 0.909_360_288_096_154_0),
            (1e4, 0.909_576_475_456_969_0, 0.895_145_457_006_924_6, 56.420_359_562_576_151, 1.033_348_515_123_339_9),
        ];
        for (a, r0, r1, r2, t0) in cases {
            let g = solve_double_bubble(a, DEFAULT_TOL).unwrap();
            assert!((g.r0.finite().unwrap() - r0).abs() < 1e-10, "{g:?}");
            assert!((g.r1 - r1).abs() < 1e-10);
            assert!((g.r2 - r2).abs() < 1e-10 * r2);
            assert!((g.theta0 - t0).abs() < 1e-10);
        }
    }

    #[test]
    fn perturbing_r1_shows_up_in_curvature_balance() {
        let g = solve_double_bubble(10.0, DEFAULT_TOL).unwrap();
        let mut p = g;
        p.r1 += 1e-3;
        let res = double_bubble_residual(&p);
        let expected = 1.0 / (g.r1 + 1e-3) - 1.0 / g.r1;
        assert!((res[4] - expected).abs() < 1e-12);
        assert!((res[4] + 1e-3 / (g.r1 * g.r1)).abs() < 1e-5);
    }

    #[test]
    fn domain_and_gauge() {
        assert!(matches!(solve_double_bubble(-1.0, 1e-10), Err(Error::Domain(_))));
        assert!(matches!(solve_double_bubble(0.0, 1e-10), Err(Error::Domain(_))));
        assert!(matches!(solve_double_bubble(2.0, 0.0), Err(Error::Domain(_))));
        let g = solve_double_bubble(50.0, DEFAULT_TOL).unwrap();
        // C2 passes through the origin, junctions lie on all three circles
        assert!((g.center2.norm() - g.r2).abs() < 1e-12);
        for q in g.junctions {
            assert!((q.dist(g.center2) - g.r2).abs() < 1e-10);
            assert!((q.dist(g.center1) - g.r1).abs() < 1e-10);
            assert!((q.dist(g.center0.unwrap()) - g.r0.finite().unwrap().abs()).abs() < 1e-10);
        }
    }

    #[test]
    fn gaps_vanish_for_exact_lens_values() {
        let big_r = standard_lens_radius();
        let mut g = solve_double_bubble(10.0, DEFAULT_TOL).unwrap();
        g.r0 = Radius::Finite(big_r);
        g.r1 = big_r;
        g.theta0 = FRAC_PI_3;
        g.theta1 = FRAC_PI_3;
        assert_eq!(limit_gap(&g).unwrap().max(), 0.0);
    }
}
