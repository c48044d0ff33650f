//! Planar isoperimetric clusters.
//!
//! * [`exact`]: closed-form lens constants and the double-bubble solver.
//! * [`cluster`]: discrete (N,M)-clusters inside a window, builders, JSON.
//! * [`measure`]: areas, relative perimeters and the cluster distance.
//! * [`flow`]: area-constrained perimeter descent and the local-minimality probe.

pub mod cluster;
pub mod error;
pub mod exact;
pub mod flow;
pub mod geom;
pub mod measure;

pub use cluster::{
    build_conjecture_seed, build_double_bubble, build_lens, build_square_seed, build_standard_lens,
    chamber_polygon, validate, ChamberSpec, ConjectureKind, DiscreteCluster, Interface, Node,
    NodeKind, ValidationReport, Window,
};
pub use error::{Error, Result};
pub use exact::{
    double_bubble_residual, lens_from_radius, lens_profile, limit_gap, solve_double_bubble,
    standard_lens_radius, DoubleBubbleGeometry, LensGeometry, LimitGap, Radius,
};
pub use flow::{
    evolve, interface_curvature, junction_angles, local_min_probe, max_speed, perturb,
    stationarity, step, FlowParams, FlowReport, InterfaceCurvature, JunctionAngles, ProbeReport,
    ProbeTrial, Stationarity,
};
pub use geom::Point;
pub use measure::{
    chamber_area, chamber_areas, cluster_distance, hausdorff_distance, identity_pairing,
    perimeter_halving_check, polyline_hausdorff, relative_perimeter, DistanceEstimate,
    QuadratureParams,
};
