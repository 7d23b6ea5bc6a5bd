//! Poncelet triangle families between concentric, axis-aligned ellipses:
//! construction, triangle-center loci, locus classification, planar
//! arrangements of loci and SVG rendering.

// `!(x > tol)` is used on purpose so NaN lands on the rejecting branch.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod api;
pub mod arrangement;
pub mod centers;
pub mod conic;
pub mod error;
pub mod family;
pub mod fit;
pub mod locus;
pub mod render;
pub mod segments;
pub mod session;
pub mod triangle;

pub use arrangement::{build_arrangement, face_containment, Arrangement, Face, HalfEdge};
pub use centers::{center_position, derived_triangle, side_lengths, CenterRegistry, DerivedKind, SideLengths};
pub use conic::{Ellipse, Line2, Point2};
pub use error::{Error, Result};
pub use family::{closure_defect, make_family, FamilyKind, FamilySpec};
pub use fit::{conic_fit, quartic_fit, ConicCoefficients, ConicFit};
pub use locus::{
    classify_locus, hausdorff_distance, self_intersections, sweep_locus, sweep_locus_refined, Classification, Locus,
    LocusKind, LocusRequest, LocusTarget,
};
pub use render::{export_frames, pastel_palette, render_scene, Scene, Style, StyleMode};
pub use session::{decode, encode, ExperimentState};
pub use triangle::Triangle;
