//! Planar subdivision of closed polylines.
//!
//! Every pair of segments is noded (crossings and collinear overlaps split
//! both sides), endpoints closer than `1e-9·scale` are merged, and a half-edge
//! structure is built by sorting the outgoing edges at each vertex by angle.
//! Following `next` keeps the face on the left, so bounded faces come out
//! counter-clockwise and the unbounded side of each connected component comes
//! out as one clockwise cycle. Those clockwise cycles become holes of the
//! smallest bounded face that contains them, or of the single outer face.

use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::conic::Point2;
use crate::segments::{bbox, bbox_diagonal, candidate_pairs, contains, intersect, signed_area, Crossing, Segment};

/// Vertex merge distance relative to the input bounding-box diagonal.
pub const SNAP_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct HalfEdge {
    pub origin: usize,
    pub twin: usize,
    pub next: usize,
    pub face: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Face {
    /// Vertex indices of the boundary, counter-clockwise. Empty for the outer face.
    pub boundary: Vec<usize>,
    /// Clockwise boundaries of components nested inside this face.
    pub holes: Vec<Vec<usize>>,
    pub is_outer: bool,
    /// Enclosed area net of holes; zero for the outer face.
    pub area: f64,
}

/// Face 0 is the unbounded face; bounded faces follow by decreasing area.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Arrangement {
    pub vertices: Vec<Point2>,
    pub half_edges: Vec<HalfEdge>,
    pub faces: Vec<Face>,
    /// Connected components of the edge graph.
    pub components: usize,
}

impl Arrangement {
    pub fn edge_count(&self) -> usize {
        self.half_edges.len() / 2
    }

    pub fn bounded_faces(&self) -> impl Iterator<Item = (usize, &Face)> {
        self.faces.iter().enumerate().filter(|(_, f)| !f.is_outer)
    }

    pub fn bounded_face_count(&self) -> usize {
        self.faces.iter().filter(|f| !f.is_outer).count()
    }

    pub fn loop_points(&self, ring: &[usize]) -> Vec<Point2> {
        ring.iter().map(|&v| self.vertices[v]).collect()
    }

    /// Boundary loops of all bounded faces as closed polylines.
    pub fn boundary_loops(&self) -> Vec<Vec<Point2>> {
        self.bounded_faces().map(|(_, f)| self.loop_points(&f.boundary)).collect()
    }

    /// `V − E + F − (1 + C)`, zero for a consistent planar embedding.
    pub fn euler_defect(&self) -> i64 {
        if self.vertices.is_empty() {
            return 0;
        }
        self.vertices.len() as i64 - self.edge_count() as i64 + self.faces.len() as i64 - 1 - self.components as i64
    }

    /// Structural invariants: twins pair up, `next` cycles partition the
    /// half-edges and agree with face labels, and the Euler formula holds.
    pub fn validate(&self) -> Result<(), String> {
        let n = self.half_edges.len();
        let mut seen = vec![false; n];
        for (i, h) in self.half_edges.iter().enumerate() {
            let t = &self.half_edges[h.twin];
            if t.twin != i || h.twin == i {
                return Err(format!("half-edge {i} has a bad twin"));
            }
            if self.half_edges[h.next].origin != t.origin {
                return Err(format!("half-edge {i}: next does not start where it ends"));
            }
            if h.face >= self.faces.len() {
                return Err(format!("half-edge {i} points at missing face {}", h.face));
            }
        }
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let face = self.half_edges[start].face;
            let mut h = start;
            loop {
                if seen[h] {
                    return Err(format!("next cycles overlap at half-edge {h}"));
                }
                seen[h] = true;
                if self.half_edges[h].face != face {
                    return Err(format!("cycle through {start} spans two faces"));
                }
                h = self.half_edges[h].next;
                if h == start {
                    break;
                }
            }
        }
        match self.euler_defect() {
            0 => Ok(()),
            d => Err(format!("Euler formula off by {d}")),
        }
    }

    /// A point strictly inside the face (inside the boundary, outside holes),
    /// found as the midpoint of the widest interior run along a few scanlines.
    pub fn interior_point(&self, face: usize) -> Option<Point2> {
        let f = &self.faces[face];
        if f.is_outer {
            return None;
        }
        let rings: Vec<Vec<Point2>> =
            std::iter::once(&f.boundary).chain(&f.holes).map(|r| self.loop_points(r)).collect();
        let (lo, hi) = bbox(&rings[0])?;
        let mut best: Option<(f64, Point2)> = None;
        for k in 0..16 {
            // Irrational offsets keep scanlines off vertex heights.
            let frac = ((k as f64 + 0.5) / 16.0 + 0.000_137_1 * std::f64::consts::SQRT_2).fract();
            let y = lo.y + (hi.y - lo.y) * frac;
            let mut xs = Vec::new();
            for ring in &rings {
                let n = ring.len();
                for i in 0..n {
                    let (a, b) = (ring[i], ring[(i + 1) % n]);
                    if (a.y > y) != (b.y > y) {
                        xs.push(a.x + (y - a.y) * (b.x - a.x) / (b.y - a.y));
                    }
                }
            }
            xs.sort_by(f64::total_cmp);
            for pair in xs.chunks_exact(2) {
                let w = pair[1] - pair[0];
                if best.is_none_or(|(bw, _)| w > bw) {
                    best = Some((w, Point2::new(0.5 * (pair[0] + pair[1]), y)));
                }
            }
        }
        best.map(|(_, p)| p)
    }
}

/// Builds the arrangement of closed polylines. Curves with fewer than three
/// points or non-finite coordinates are ignored.
pub fn build_arrangement(curves: &[Vec<Point2>]) -> Arrangement {
    let curves: Vec<&Vec<Point2>> = curves.iter().filter(|c| c.len() >= 3 && c.iter().all(|p| p.is_finite())).collect();
    let all: Vec<Point2> = curves.iter().flat_map(|c| c.iter().copied()).collect();
    let tol = SNAP_TOL * bbox_diagonal(&all);

    let mut segs = Vec::new();
    for c in &curves {
        let n = c.len();
        for i in 0..n {
            let s = Segment::new(c[i], c[(i + 1) % n]);
            if s.length() > tol {
                segs.push(s);
            }
        }
    }
    if segs.is_empty() {
        return Arrangement::default();
    }

    // Split parameters per segment.
    let mut splits: Vec<Vec<f64>> = vec![vec![0.0, 1.0]; segs.len()];
    for (i, j) in candidate_pairs(&segs) {
        match intersect(&segs[i], &segs[j], tol) {
            Some(Crossing::Point { s, u, .. }) => {
                splits[i].push(s);
                splits[j].push(u);
            }
            Some(Crossing::Overlap) => {
                for (p, q) in [(i, j), (j, i)] {
                    let d = segs[p].b - segs[p].a;
                    for e in [segs[q].a, segs[q].b] {
                        let s = (e - segs[p].a).dot(d) / d.norm_sq();
                        if (0.0..=1.0).contains(&s) {
                            splits[p].push(s);
                        }
                    }
                }
            }
            None => {}
        }
    }

    let mut snap = Snapper::new(tol);
    let mut edges: Vec<(usize, usize)> = Vec::new();
    let mut seen: HashSet<(usize, usize)> = HashSet::new();
    for (seg, params) in segs.iter().zip(&mut splits) {
        params.sort_by(f64::total_cmp);
        let ids: Vec<usize> = params.iter().map(|&s| snap.vertex(seg.a.lerp(seg.b, s))).collect();
        for w in ids.windows(2) {
            let (u, v) = (w[0], w[1]);
            if u != v && seen.insert((u.min(v), u.max(v))) {
                edges.push((u, v));
            }
        }
    }
    assemble(snap.points, &edges)
}

/// Hash-grid vertex merging.
struct Snapper {
    tol: f64,
    points: Vec<Point2>,
    grid: HashMap<(i64, i64), Vec<usize>>,
}

impl Snapper {
    fn new(tol: f64) -> Self {
        Snapper { tol, points: Vec::new(), grid: HashMap::new() }
    }

    fn key(&self, p: Point2) -> (i64, i64) {
        let cell = self.tol.max(f64::MIN_POSITIVE);
        ((p.x / cell).floor() as i64, (p.y / cell).floor() as i64)
    }

    fn vertex(&mut self, p: Point2) -> usize {
        let (kx, ky) = self.key(p);
        for dx in -1..=1 {
            for dy in -1..=1 {
                if let Some(ids) = self.grid.get(&(kx + dx, ky + dy)) {
                    if let Some(&id) = ids.iter().find(|&&id| self.points[id].distance(p) <= self.tol) {
                        return id;
                    }
                }
            }
        }
        let id = self.points.len();
        self.points.push(p);
        self.grid.entry((kx, ky)).or_default().push(id);
        id
    }
}

fn assemble(vertices: Vec<Point2>, edges: &[(usize, usize)]) -> Arrangement {
    const UNSET: usize = usize::MAX;
    let mut half_edges: Vec<HalfEdge> = Vec::with_capacity(2 * edges.len());
    for &(u, v) in edges {
        let k = half_edges.len();
        half_edges.push(HalfEdge { origin: u, twin: k + 1, next: UNSET, face: UNSET });
        half_edges.push(HalfEdge { origin: v, twin: k, next: UNSET, face: UNSET });
    }

    // Outgoing half-edges at each vertex, counter-clockwise by angle.
    let mut outgoing: Vec<Vec<usize>> = vec![Vec::new(); vertices.len()];
    for (h, e) in half_edges.iter().enumerate() {
        outgoing[e.origin].push(h);
    }
    let angle = |h: usize| {
        let d = vertices[half_edges[half_edges[h].twin].origin] - vertices[half_edges[h].origin];
        d.y.atan2(d.x)
    };
    let mut rank = vec![0usize; half_edges.len()];
    for list in &mut outgoing {
        list.sort_by(|&x, &y| angle(x).total_cmp(&angle(y)));
        for (r, &h) in list.iter().enumerate() {
            rank[h] = r;
        }
    }
    // next(h) is the edge just clockwise of twin(h) around h's head.
    for h in 0..half_edges.len() {
        let t = half_edges[h].twin;
        let list = &outgoing[half_edges[t].origin];
        half_edges[h].next = list[(rank[t] + list.len() - 1) % list.len()];
    }

    let mut parent: Vec<usize> = (0..vertices.len()).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for &(u, v) in edges {
        let (ru, rv) = (find(&mut parent, u), find(&mut parent, v));
        parent[ru] = rv;
    }
    let mut component_of: HashMap<usize, usize> = HashMap::new();
    let vertex_component: Vec<usize> = (0..vertices.len())
        .map(|v| {
            let r = find(&mut parent, v);
            let next_id = component_of.len();
            *component_of.entry(r).or_insert(next_id)
        })
        .collect();
    let components = component_of.len();

    struct Cycle {
        start: usize,
        ring: Vec<usize>,
        area: f64,
        component: usize,
    }
    let mut visited = vec![false; half_edges.len()];
    let mut cycles = Vec::new();
    for start in 0..half_edges.len() {
        if visited[start] {
            continue;
        }
        let mut ring = Vec::new();
        let mut h = start;
        while !visited[h] {
            visited[h] = true;
            ring.push(half_edges[h].origin);
            h = half_edges[h].next;
        }
        let pts: Vec<Point2> = ring.iter().map(|&v| vertices[v]).collect();
        cycles.push(Cycle { start, component: vertex_component[ring[0]], area: signed_area(&pts), ring });
    }

    // The most negative cycle of each component bounds its unbounded side.
    let mut hull_of = vec![usize::MAX; components];
    for (i, c) in cycles.iter().enumerate() {
        let slot = &mut hull_of[c.component];
        if *slot == usize::MAX || c.area < cycles[*slot].area {
            *slot = i;
        }
    }
    let is_hull: HashSet<usize> = hull_of.iter().copied().collect();

    let mut bounded: Vec<usize> = (0..cycles.len()).filter(|i| !is_hull.contains(i)).collect();
    bounded.sort_by(|&x, &y| {
        cycles[y]
            .area
            .total_cmp(&cycles[x].area)
            .then_with(|| cycles[x].ring.iter().min().cmp(&cycles[y].ring.iter().min()))
    });
    let mut face_of_cycle = vec![0usize; cycles.len()];
    let mut faces = vec![Face { boundary: Vec::new(), holes: Vec::new(), is_outer: true, area: 0.0 }];
    for &c in &bounded {
        face_of_cycle[c] = faces.len();
        faces.push(Face { boundary: cycles[c].ring.clone(), holes: Vec::new(), is_outer: false, area: cycles[c].area });
    }

    // Each hull becomes a hole of the smallest bounded face around it.
    let loops: Vec<Vec<Point2>> =
        bounded.iter().map(|&c| cycles[c].ring.iter().map(|&v| vertices[v]).collect()).collect();
    for &hull in &hull_of {
        let probe = vertices[cycles[hull].ring[0]];
        let comp = cycles[hull].component;
        let host = bounded
            .iter()
            .zip(&loops)
            .filter(|(&c, ring)| cycles[c].component != comp && contains(ring, probe))
            .min_by(|(&x, _), (&y, _)| cycles[x].area.total_cmp(&cycles[y].area))
            .map_or(0, |(&c, _)| face_of_cycle[c]);
        face_of_cycle[hull] = host;
        faces[host].holes.push(cycles[hull].ring.clone());
        if host != 0 {
            faces[host].area += cycles[hull].area;
        }
    }

    for (c, &face) in cycles.iter().zip(&face_of_cycle) {
        let mut h = c.start;
        loop {
            half_edges[h].face = face;
            h = half_edges[h].next;
            if h == c.start {
                break;
            }
        }
    }

    let arr = Arrangement { vertices, half_edges, faces, components };
    debug_assert_eq!(arr.euler_defect(), 0, "arrangement violates the Euler formula");
    arr
}

/// Parent of every face: the face immediately enclosing a representative
/// interior point, `Some(0)` for top-level faces, `None` for the outer face.
pub fn face_containment(arr: &Arrangement) -> Vec<Option<usize>> {
    let loops: Vec<Option<(Vec<Point2>, f64)>> = arr
        .faces
        .iter()
        .map(|f| {
            (!f.is_outer).then(|| {
                let pts = arr.loop_points(&f.boundary);
                let area = signed_area(&pts);
                (pts, area)
            })
        })
        .collect();
    (0..arr.faces.len())
        .map(|i| {
            let probe = arr.interior_point(i)?;
            let parent = loops
                .iter()
                .enumerate()
                .filter_map(|(j, l)| l.as_ref().map(|(pts, area)| (j, pts, *area)))
                .filter(|&(j, pts, _)| j != i && contains(pts, probe))
                .min_by(|x, y| x.2.total_cmp(&y.2))
                .map_or(0, |(j, _, _)| j);
            Some(parent)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn square(x0: f64, y0: f64, s: f64) -> Vec<Point2> {
        vec![Point2::new(x0, y0), Point2::new(x0 + s, y0), Point2::new(x0 + s, y0 + s), Point2::new(x0, y0 + s)]
    }

    fn circle(cx: f64, r: f64, n: usize) -> Vec<Point2> {
        (0..n)
            .map(|i| {
                let t = 2.0 * PI * i as f64 / n as f64;
                Point2::new(cx + r * t.cos(), r * t.sin())
            })
            .collect()
    }

    #[test]
    fn empty_input() {
        let arr = build_arrangement(&[]);
        assert!(arr.faces.is_empty() && arr.vertices.is_empty());
        assert!(arr.validate().is_ok());
    }

    #[test]
    fn convex_polygon() {
        let arr = build_arrangement(&[square(0.0, 0.0, 1.0)]);
        assert_eq!(arr.faces.len(), 2);
        assert!(arr.faces[0].is_outer);
        assert_eq!(arr.faces[1].area, 1.0);
        assert!(signed_area(&arr.loop_points(&arr.faces[1].boundary)) > 0.0);
        arr.validate().unwrap();
    }

    #[test]
    fn overlapping_squares() {
        let arr = build_arrangement(&[square(0.0, 0.0, 2.0), square(1.0, 1.0, 2.0)]);
        assert_eq!(arr.bounded_face_count(), 3);
        let total: f64 = arr.bounded_faces().map(|(_, f)| f.area).sum();
        assert!((total - 7.0).abs() < 1e-12);
        arr.validate().unwrap();
    }

    #[test]
    fn shared_edge_is_not_doubled() {
        let arr = build_arrangement(&[square(0.0, 0.0, 1.0), square(1.0, 0.0, 1.0)]);
        assert_eq!(arr.edge_count(), 7);
        assert_eq!(arr.bounded_face_count(), 2);
        arr.validate().unwrap();
    }

    #[test]
    fn collinear_partial_overlap_is_split() {
        let arr = build_arrangement(&[square(0.0, 0.0, 2.0), square(2.0, 0.5, 1.0)]);
        assert_eq!(arr.bounded_face_count(), 2);
        arr.validate().unwrap();
    }

    #[test]
    fn nested_circles_make_an_annulus() {
        let arr = build_arrangement(&[circle(0.0, 2.0, 400), circle(0.0, 1.0, 400)]);
        assert_eq!(arr.faces.len(), 3);
        assert_eq!(arr.components, 2);
        let annulus = &arr.faces[1];
        assert_eq!(annulus.holes.len(), 1);
        let disk = &arr.faces[2];
        // Polygon areas, not circle areas.
        let big = signed_area(&circle(0.0, 2.0, 400));
        let small = signed_area(&circle(0.0, 1.0, 400));
        assert!((annulus.area - (big - small)).abs() < 1e-12);
        assert!((disk.area - small).abs() < 1e-12);
        assert!((annulus.area + disk.area - big).abs() < 1e-12);
        arr.validate().unwrap();
        assert_eq!(face_containment(&arr), vec![None, Some(0), Some(1)]);
        // The annulus's interior point avoids the hole.
        let p = arr.interior_point(1).unwrap();
        assert!(p.norm() > 1.0 && p.norm() < 2.0);
    }

    #[test]
    fn disjoint_siblings() {
        let arr = build_arrangement(&[square(0.0, 0.0, 1.0), square(3.0, 0.0, 1.0)]);
        assert_eq!(face_containment(&arr), vec![None, Some(0), Some(0)]);
        assert_eq!(arr.faces[0].holes.len(), 2);
        arr.validate().unwrap();
    }

    #[test]
    fn near_coincident_vertices_merge() {
        let mut b = square(0.0, 0.0, 1.0);
        b[0] = Point2::new(1e-13, -1e-13);
        let arr = build_arrangement(&[square(0.0, 0.0, 1.0), b]);
        assert_eq!(arr.vertices.len(), 4);
        assert_eq!(arr.bounded_face_count(), 1);
    }

    #[test]
    fn rebuilding_from_face_loops_is_idempotent() {
        let arr = build_arrangement(&[square(0.0, 0.0, 2.0), square(1.0, 1.0, 2.0), circle(1.5, 0.7, 50)]);
        let again = build_arrangement(&arr.boundary_loops());
        assert_eq!(again.faces.len(), arr.faces.len());
        again.validate().unwrap();
    }
}
