//! Segment intersection with a uniform-grid broad phase.

use std::collections::HashMap;

use crate::conic::Point2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub a: Point2,
    pub b: Point2,
}

impl Segment {
    pub fn new(a: Point2, b: Point2) -> Self {
        Segment { a, b }
    }

    pub fn length(&self) -> f64 {
        self.a.distance(self.b)
    }

    pub fn distance_to(&self, p: Point2) -> f64 {
        let d = self.b - self.a;
        let len2 = d.norm_sq();
        if len2 == 0.0 {
            return p.distance(self.a);
        }
        let s = ((p - self.a).dot(d) / len2).clamp(0.0, 1.0);
        p.distance(self.a + d * s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Crossing {
    /// Single intersection at parameters `s` on the first and `u` on the second.
    Point { s: f64, u: f64, at: Point2 },
    /// Collinear overlap.
    Overlap,
}

/// Intersection of two closed segments. `tol` is an absolute distance used to
/// classify near-parallel pairs as collinear.
pub fn intersect(p: &Segment, q: &Segment, tol: f64) -> Option<Crossing> {
    let d1 = p.b - p.a;
    let d2 = q.b - q.a;
    let den = d1.cross(d2);
    let w = q.a - p.a;
    let l1 = d1.norm();
    let l2 = d2.norm();
    if l1 == 0.0 || l2 == 0.0 {
        return None;
    }
    if den.abs() <= 1e-14 * l1 * l2 {
        // Parallel: collinear if q.a is on p's line.
        if (w.cross(d1) / l1).abs() <= tol {
            let s0 = w.dot(d1) / (l1 * l1);
            let s1 = (q.b - p.a).dot(d1) / (l1 * l1);
            let (lo, hi) = (s0.min(s1), s0.max(s1));
            if hi >= -tol / l1 && lo <= 1.0 + tol / l1 {
                return Some(Crossing::Overlap);
            }
        }
        return None;
    }
    let s = w.cross(d2) / den;
    let u = w.cross(d1) / den;
    let es = tol / l1;
    let eu = tol / l2;
    if s < -es || s > 1.0 + es || u < -eu || u > 1.0 + eu {
        return None;
    }
    let s = s.clamp(0.0, 1.0);
    let u = u.clamp(0.0, 1.0);
    Some(Crossing::Point { s, u, at: p.a + d1 * s })
}

/// Candidate pairs `(i, j)` with `i < j` whose bounding boxes share a grid cell.
pub fn candidate_pairs(segs: &[Segment]) -> Vec<(usize, usize)> {
    let n = segs.len();
    if n < 2 {
        return Vec::new();
    }
    let (mut lo, mut hi) =
        (Point2::new(f64::INFINITY, f64::INFINITY), Point2::new(f64::NEG_INFINITY, f64::NEG_INFINITY));
    for s in segs {
        for p in [s.a, s.b] {
            lo = Point2::new(lo.x.min(p.x), lo.y.min(p.y));
            hi = Point2::new(hi.x.max(p.x), hi.y.max(p.y));
        }
    }
    let side = ((n as f64).sqrt().ceil() as usize).clamp(1, 1024);
    let w = ((hi.x - lo.x) / side as f64).max(f64::MIN_POSITIVE);
    let h = ((hi.y - lo.y) / side as f64).max(f64::MIN_POSITIVE);
    let cell = |v: f64, origin: f64, size: f64| (((v - origin) / size).floor().max(0.0) as usize).min(side - 1);

    let mut grid: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
    for (i, s) in segs.iter().enumerate() {
        let (x0, x1) = (cell(s.a.x.min(s.b.x), lo.x, w), cell(s.a.x.max(s.b.x), lo.x, w));
        let (y0, y1) = (cell(s.a.y.min(s.b.y), lo.y, h), cell(s.a.y.max(s.b.y), lo.y, h));
        for cx in x0..=x1 {
            for cy in y0..=y1 {
                grid.entry((cx, cy)).or_default().push(i);
            }
        }
    }
    let mut pairs = Vec::new();
    for members in grid.values() {
        for (k, &i) in members.iter().enumerate() {
            for &j in &members[k + 1..] {
                pairs.push((i.min(j), i.max(j)));
            }
        }
    }
    pairs.sort_unstable();
    pairs.dedup();
    pairs
}

/// Uniform grid over segments for nearest-distance queries.
pub struct SegmentIndex<'a> {
    segs: &'a [Segment],
    lo: Point2,
    cell: f64,
    side: usize,
    cells: HashMap<(usize, usize), Vec<usize>>,
}

impl<'a> SegmentIndex<'a> {
    pub fn new(segs: &'a [Segment]) -> Self {
        let pts: Vec<Point2> = segs.iter().flat_map(|s| [s.a, s.b]).collect();
        let (lo, hi) = bbox(&pts).unwrap_or((Point2::ORIGIN, Point2::ORIGIN));
        let side = ((segs.len() as f64).sqrt().ceil() as usize).clamp(1, 1024);
        let cell = ((hi.x - lo.x).max(hi.y - lo.y) / side as f64).max(f64::MIN_POSITIVE);
        let mut index = SegmentIndex { segs, lo, cell, side, cells: HashMap::new() };
        for (i, s) in segs.iter().enumerate() {
            let (x0, y0) = index.cell_of(Point2::new(s.a.x.min(s.b.x), s.a.y.min(s.b.y)));
            let (x1, y1) = index.cell_of(Point2::new(s.a.x.max(s.b.x), s.a.y.max(s.b.y)));
            for cx in x0..=x1 {
                for cy in y0..=y1 {
                    index.cells.entry((cx, cy)).or_default().push(i);
                }
            }
        }
        index
    }

    fn cell_of(&self, p: Point2) -> (usize, usize) {
        let f = |v: f64, o: f64| (((v - o) / self.cell).floor().max(0.0) as usize).min(self.side - 1);
        (f(p.x, self.lo.x), f(p.y, self.lo.y))
    }

    /// Distance from `p` to the nearest segment (infinite when empty).
    pub fn nearest_distance(&self, p: Point2) -> f64 {
        if self.segs.is_empty() {
            return f64::INFINITY;
        }
        let (cx, cy) = self.cell_of(p);
        let mut best = f64::INFINITY;
        for r in 0..=self.side {
            let (x0, x1) = (cx.saturating_sub(r), (cx + r).min(self.side - 1));
            let (y0, y1) = (cy.saturating_sub(r), (cy + r).min(self.side - 1));
            for x in x0..=x1 {
                for y in y0..=y1 {
                    let on_ring = x.abs_diff(cx) == r || y.abs_diff(cy) == r;
                    if !on_ring {
                        continue;
                    }
                    if let Some(members) = self.cells.get(&(x, y)) {
                        for &i in members {
                            best = best.min(self.segs[i].distance_to(p));
                        }
                    }
                }
            }
            // Anything outside rings 0..=r is at least r cells away.
            if best <= r as f64 * self.cell {
                break;
            }
        }
        best
    }
}

/// Axis-aligned bounding box `(min, max)`.
pub fn bbox(points: &[Point2]) -> Option<(Point2, Point2)> {
    let first = *points.first()?;
    Some(points.iter().fold((first, first), |(lo, hi), p| {
        (Point2::new(lo.x.min(p.x), lo.y.min(p.y)), Point2::new(hi.x.max(p.x), hi.y.max(p.y)))
    }))
}

pub fn bbox_diagonal(points: &[Point2]) -> f64 {
    bbox(points).map_or(0.0, |(lo, hi)| lo.distance(hi))
}

/// Signed area of a closed loop (positive when CCW).
pub fn signed_area(loop_: &[Point2]) -> f64 {
    let n = loop_.len();
    (0..n).map(|i| loop_[i].cross(loop_[(i + 1) % n])).sum::<f64>() * 0.5
}

/// Even-odd point-in-polygon test.
pub fn contains(loop_: &[Point2], p: Point2) -> bool {
    let n = loop_.len();
    let mut inside = false;
    for i in 0..n {
        let a = loop_[i];
        let b = loop_[(i + 1) % n];
        if (a.y > p.y) != (b.y > p.y) {
            let x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
            if p.x < x {
                inside = !inside;
            }
        }
    }
    inside
}
