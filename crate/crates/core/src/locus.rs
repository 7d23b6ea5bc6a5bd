//! Sweeping a tracked point over a family and classifying the resulting curve.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::centers::{derived_triangle, CenterRegistry, DerivedKind};
use crate::conic::Point2;
use crate::error::{Error, Result};
use crate::family::FamilySpec;
use crate::fit::{conic_fit, line_fit_residual, quartic_fit, ConicCoefficients};
use crate::segments::{bbox_diagonal, candidate_pairs, intersect, Crossing, Segment, SegmentIndex};

pub const DEFAULT_SAMPLES: usize = 720;
pub const MIN_SAMPLES: usize = 16;
/// Locus bbox diagonal below this fraction of the family scale is a point.
pub const STATIONARY_TOL: f64 = 1e-7;
/// RMS distance to the best line, relative to the family scale.
pub const SEGMENT_TOL: f64 = 1e-9;
/// RMS algebraic conic residual in the normalized frame.
pub const ELLIPSE_TOL: f64 = 1e-7;
/// Relative coefficient tolerance for calling an ellipse a circle.
pub const CIRCLE_TOL: f64 = 1e-7;
/// Crossing deduplication distance relative to the locus bbox diagonal.
pub const CROSSING_DEDUP_TOL: f64 = 1e-9;
/// Turning angle above which refinement splits a segment.
pub const REFINE_TURN: f64 = 0.2;
/// Largest tolerated gap, relative to the family scale, between a fresh sample
/// and the Hermite curve through its neighbors.
pub const REFINE_DEFECT: f64 = 1e-8;
/// Refinement stops once the locus has this many times the requested samples.
pub const REFINE_BUDGET: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LocusTarget {
    /// Triangle center `X_k`.
    Center(u32),
    /// Vertex 1, 2 or 3.
    Vertex(u8),
}

impl LocusTarget {
    pub fn validate(&self) -> Result<()> {
        match *self {
            LocusTarget::Center(k) => CenterRegistry::global().get(k).map(|_| ()),
            LocusTarget::Vertex(i) if (1..=3).contains(&i) => Ok(()),
            LocusTarget::Vertex(i) => Err(Error::InvalidParameter(format!("vertex index {i} not in 1..=3"))),
        }
    }

    pub fn label(&self) -> String {
        match self {
            LocusTarget::Center(k) => format!("X{k}"),
            LocusTarget::Vertex(i) => format!("V{i}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LocusRequest {
    pub family: FamilySpec,
    pub target: LocusTarget,
    pub derived: DerivedKind,
    pub samples: usize,
}

impl LocusRequest {
    pub fn new(family: FamilySpec, target: LocusTarget) -> Self {
        LocusRequest { family, target, derived: DerivedKind::Reference, samples: DEFAULT_SAMPLES }
    }

    pub fn with_derived(mut self, derived: DerivedKind) -> Self {
        self.derived = derived;
        self
    }

    pub fn with_samples(mut self, samples: usize) -> Self {
        self.samples = samples;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.samples < MIN_SAMPLES {
            return Err(Error::InvalidParameter(format!(
                "samples must be at least {MIN_SAMPLES}, got {}",
                self.samples
            )));
        }
        self.target.validate()
    }

    /// Parameter range swept. Centers are symmetric in the vertices so one
    /// family period covers their locus exactly once; vertex loci need the
    /// full turn.
    pub fn span(&self) -> Result<f64> {
        match self.target {
            LocusTarget::Center(_) => self.family.period(),
            LocusTarget::Vertex(_) => Ok(2.0 * PI),
        }
    }

    /// The tracked point at family parameter `t`.
    pub fn point_at(&self, t: f64) -> Result<Point2> {
        let tri = derived_triangle(&self.family.triangle_at(t)?, self.derived)?;
        match self.target {
            LocusTarget::Center(k) => CenterRegistry::global().position(&tri, k),
            LocusTarget::Vertex(i) => Ok(tri.vertex(i as usize - 1)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LocusKind {
    Stationary,
    Segment,
    Circle,
    Ellipse,
    Nonconic,
}

impl LocusKind {
    pub fn name(&self) -> &'static str {
        match self {
            LocusKind::Stationary => "stationary",
            LocusKind::Segment => "segment",
            LocusKind::Circle => "circle",
            LocusKind::Ellipse => "ellipse",
            LocusKind::Nonconic => "nonconic",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub kind: LocusKind,
    pub conic_residual: f64,
    pub quartic_residual: f64,
    pub self_intersections: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub conic_coefficients: Option<ConicCoefficients>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Locus {
    pub points: Vec<Point2>,
    /// Family parameter of each point.
    pub params: Vec<f64>,
    pub classification: Classification,
    /// Bounding-box diagonal of the points.
    pub scale: f64,
    /// Samples skipped because the (derived) triangle or center degenerated.
    pub dropped: usize,
}

fn is_droppable(e: &Error) -> bool {
    matches!(e, Error::DegenerateTriangle | Error::DegenerateDerived | Error::CenterAtInfinity(_))
}

fn evaluate(req: &LocusRequest, params: &[f64]) -> Result<(Vec<f64>, Vec<Point2>, usize)> {
    let results: Vec<Result<Point2>> = params.par_iter().map(|&t| req.point_at(t)).collect();
    let mut kept_t = Vec::with_capacity(params.len());
    let mut kept_p = Vec::with_capacity(params.len());
    let mut dropped = 0;
    for (t, r) in params.iter().zip(results) {
        match r {
            Ok(p) => {
                kept_t.push(*t);
                kept_p.push(p);
            }
            Err(e) if is_droppable(&e) => dropped += 1,
            Err(e) => return Err(e),
        }
    }
    if kept_p.is_empty() {
        return Err(Error::AllSamplesDegenerate);
    }
    Ok((kept_t, kept_p, dropped))
}

fn assemble(req: &LocusRequest, params: Vec<f64>, points: Vec<Point2>, dropped: usize) -> Result<Locus> {
    let classification = classify_locus(&points, req.family.scale())?;
    Ok(Locus { scale: bbox_diagonal(&points), points, params, classification, dropped })
}

/// Samples `t_i = span·i/samples` and assembles the locus in `t` order.
pub fn sweep_locus(req: &LocusRequest) -> Result<Locus> {
    req.validate()?;
    let span = req.span()?;
    let params: Vec<f64> = (0..req.samples).map(|i| span * i as f64 / req.samples as f64).collect();
    let (params, points, dropped) = evaluate(req, &params)?;
    assemble(req, params, points, dropped)
}

fn turning_angle(a: Point2, b: Point2, c: Point2) -> f64 {
    let (u, v) = (b - a, c - b);
    if u.norm_sq() == 0.0 || v.norm_sq() == 0.0 {
        return 0.0;
    }
    u.cross(v).atan2(u.dot(v)).abs()
}

/// Uniform sweep followed by adaptive refinement. Each round samples the
/// parameter midpoint of every segment and keeps it when the segment has a
/// corner (turning angle above [`REFINE_TURN`]) or when the sample lies more
/// than [`REFINE_DEFECT`] from the Hermite curve through the neighbors. Stops
/// when nothing is kept or the budget is spent.
pub fn sweep_locus_refined(req: &LocusRequest) -> Result<Locus> {
    let base = sweep_locus(req)?;
    if base.classification.kind == LocusKind::Stationary {
        return Ok(base);
    }
    let span = req.span()?;
    let tol = REFINE_DEFECT * req.family.scale();
    let budget = REFINE_BUDGET * req.samples;
    let (mut params, mut points, mut dropped) = (base.params, base.points, base.dropped);
    while points.len() < budget {
        let n = points.len();
        let mids: Vec<f64> = (0..n).map(|i| 0.5 * (params[i] + if i + 1 < n { params[i + 1] } else { span })).collect();
        let fresh: Vec<Result<Point2>> = mids.par_iter().map(|&t| req.point_at(t)).collect();
        let mut added = Vec::new();
        for (i, (t, r)) in mids.iter().zip(fresh).enumerate() {
            let p = match r {
                Ok(p) => p,
                Err(e) if is_droppable(&e) => {
                    dropped += 1;
                    continue;
                }
                Err(e) => return Err(e),
            };
            let quad = [points[(i + n - 1) % n], points[i], points[(i + 1) % n], points[(i + 2) % n]];
            let keep = match hermite_span(quad, HERMITE_SUBDIVISIONS, REFINE_TURN) {
                None => quad[1] != quad[2],
                Some(inner) => {
                    let mut curve = vec![quad[1]];
                    curve.extend(inner);
                    curve.push(quad[2]);
                    let gap =
                        curve.windows(2).map(|w| Segment::new(w[0], w[1]).distance_to(p)).fold(f64::INFINITY, f64::min);
                    gap > tol
                }
            };
            if keep {
                added.push((*t, p));
            }
        }
        if added.is_empty() {
            break;
        }
        added.truncate(budget - n);
        let mut merged: Vec<(f64, Point2)> = params.into_iter().zip(points).chain(added).collect();
        merged.sort_by(|x, y| x.0.total_cmp(&y.0));
        (params, points) = merged.into_iter().unzip();
    }
    assemble(req, params, points, dropped)
}

/// Decision ladder: stationary, segment, circle/ellipse, nonconic.
/// `reference_scale` is the family size (`max(a, b)`).
pub fn classify_locus(points: &[Point2], reference_scale: f64) -> Result<Classification> {
    if points.len() < MIN_SAMPLES {
        return Err(Error::InsufficientPoints { needed: MIN_SAMPLES, got: points.len() });
    }
    if bbox_diagonal(points) < STATIONARY_TOL * reference_scale {
        return Ok(Classification {
            kind: LocusKind::Stationary,
            conic_residual: 0.0,
            quartic_residual: 0.0,
            self_intersections: 0,
            conic_coefficients: None,
        });
    }
    let conic = conic_fit(points)?;
    let quartic_residual = quartic_fit(points)?;
    if line_fit_residual(points) < SEGMENT_TOL * reference_scale {
        return Ok(Classification {
            kind: LocusKind::Segment,
            conic_residual: conic.residual,
            quartic_residual,
            self_intersections: 0,
            conic_coefficients: None,
        });
    }
    let crossings = self_intersections(points).len();
    let nc = conic.normalized_coefficients;
    let kind = if conic.residual < ELLIPSE_TOL && nc.discriminant() < 0.0 {
        let [a, b, c, ..] = nc.0;
        let tol = CIRCLE_TOL * nc.norm();
        if (a - c).abs() < tol && b.abs() < tol {
            LocusKind::Circle
        } else {
            LocusKind::Ellipse
        }
    } else {
        LocusKind::Nonconic
    };
    let conic_coefficients = matches!(kind, LocusKind::Circle | LocusKind::Ellipse).then_some(conic.coefficients);
    Ok(Classification {
        kind,
        conic_residual: conic.residual,
        quartic_residual,
        self_intersections: crossings,
        conic_coefficients,
    })
}

/// Segments of the closed polyline, skipping zero-length ones.
pub fn closed_segments(points: &[Point2]) -> Vec<Segment> {
    let n = points.len();
    (0..n).map(|i| Segment::new(points[i], points[(i + 1) % n])).filter(|s| s.length() > 0.0).collect()
}

/// Crossings between non-adjacent segments of the closed polyline, with the
/// indices of the two segments involved.
pub fn self_intersections(points: &[Point2]) -> Vec<(Point2, (usize, usize))> {
    let segs = closed_segments(points);
    let m = segs.len();
    if m < 4 {
        return Vec::new();
    }
    let dedup = CROSSING_DEDUP_TOL * bbox_diagonal(points);
    let mut found: Vec<(Point2, (usize, usize))> = Vec::new();
    for (i, j) in candidate_pairs(&segs) {
        if j == i + 1 || (i == 0 && j == m - 1) {
            continue;
        }
        if let Some(Crossing::Point { at, .. }) = intersect(&segs[i], &segs[j], 0.0) {
            if !found.iter().any(|(p, _)| p.distance(at) <= dedup) {
                found.push((at, (i, j)));
            }
        }
    }
    found.sort_by_key(|f| f.1);
    found
}

/// Segments whose endpoints turn by more than this are treated as corners by
/// [`smooth_densify`].
pub const HERMITE_MAX_TURN: f64 = 0.25;
/// Points inserted per smooth segment when measuring curve distances.
const HERMITE_SUBDIVISIONS: usize = 16;

/// Interior points of the cubic Hermite span from `p1` to `p2` of the quad
/// `[p0, p1, p2, p3]`, or `None` when either end turns by more than
/// `max_turn`. Tangents are second-order finite differences in chord length,
/// so smooth curves are reproduced to third order instead of the chord's
/// second order.
fn hermite_span([p0, p1, p2, p3]: [Point2; 4], subdivisions: usize, max_turn: f64) -> Option<Vec<Point2>> {
    let h = p1.distance(p2);
    if h == 0.0 || p0 == p1 || p2 == p3 || turning_angle(p0, p1, p2) > max_turn || turning_angle(p1, p2, p3) > max_turn
    {
        return None;
    }
    let tangent = |prev: Point2, at: Point2, next: Point2| {
        let (h0, h1) = (at.distance(prev), next.distance(at));
        (next - at) * (h0 / (h1 * (h0 + h1))) + (at - prev) * (h1 / (h0 * (h0 + h1)))
    };
    let (m1, m2) = (tangent(p0, p1, p2) * h, tangent(p1, p2, p3) * h);
    Some(
        (1..subdivisions)
            .map(|j| {
                let u = j as f64 / subdivisions as f64;
                let (u2, u3) = (u * u, u * u * u);
                p1 * (2.0 * u3 - 3.0 * u2 + 1.0)
                    + m1 * (u3 - 2.0 * u2 + u)
                    + p2 * (3.0 * u2 - 2.0 * u3)
                    + m2 * (u3 - u2)
            })
            .collect(),
    )
}

/// Densifies a closed polyline with Hermite points on every segment whose
/// endpoints turn by at most [`HERMITE_MAX_TURN`]; sharper spans stay straight.
pub fn smooth_densify(points: &[Point2], subdivisions: usize) -> Vec<Point2> {
    let n = points.len();
    if n < 4 || subdivisions < 2 {
        return points.to_vec();
    }
    let mut out = Vec::with_capacity(n * subdivisions);
    for i in 0..n {
        let quad = [points[(i + n - 1) % n], points[i], points[(i + 1) % n], points[(i + 2) % n]];
        out.push(quad[1]);
        if let Some(inner) = hermite_span(quad, subdivisions, HERMITE_MAX_TURN) {
            out.extend(inner);
        }
    }
    out
}

fn directed_hausdorff(from: &[Point2], to: &[Point2]) -> f64 {
    let segs = closed_segments(to);
    if segs.is_empty() {
        return from
            .iter()
            .map(|p| to.iter().map(|q| q.distance(*p)).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max);
    }
    let index = SegmentIndex::new(&segs);
    from.par_iter().map(|p| index.nearest_distance(*p)).reduce(|| 0.0, f64::max)
}

/// Symmetric Hausdorff distance between two closed sampled curves, measured
/// from the vertices of each to the segments of the other after both are
/// densified with [`smooth_densify`].
pub fn hausdorff_distance(a: &[Point2], b: &[Point2]) -> f64 {
    let da = smooth_densify(a, HERMITE_SUBDIVISIONS);
    let db = smooth_densify(b, HERMITE_SUBDIVISIONS);
    directed_hausdorff(&da, &db).max(directed_hausdorff(&db, &da))
}

/// Hausdorff distance between the raw polylines, no densification.
pub fn polyline_hausdorff_distance(a: &[Point2], b: &[Point2]) -> f64 {
    directed_hausdorff(a, b).max(directed_hausdorff(b, a))
}
