//! Triangle centers from trilinear coordinate functions, and derived triangles.
//!
//! A center is described by its first trilinear coordinate `f(s1, s2, s3)`;
//! the full triple is `f(s1,s2,s3) : f(s2,s3,s1) : f(s3,s1,s2)` and the
//! Cartesian position is the side-length weighted vertex average.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};

use crate::conic::{Line2, Point2};
use crate::error::{Error, Result};
use crate::triangle::{Triangle, DEGENERATE_AREA_RATIO};

/// Sides whose spread is below this (relative) are treated as equilateral,
/// where every center coincides with the centroid.
pub const EQUILATERAL_TOL: f64 = 1e-10;

/// Side lengths; `s1` is opposite `v1` and so on.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SideLengths {
    pub s1: f64,
    pub s2: f64,
    pub s3: f64,
}

impl SideLengths {
    pub fn new(s1: f64, s2: f64, s3: f64) -> Result<Self> {
        let m = s1.max(s2).max(s3);
        let ok = [s1, s2, s3].iter().all(|s| s.is_finite() && *s > 0.0)
            && s1 + s2 - s3 > 1e-12 * m
            && s2 + s3 - s1 > 1e-12 * m
            && s3 + s1 - s2 > 1e-12 * m;
        if ok {
            Ok(SideLengths { s1, s2, s3 })
        } else {
            Err(Error::DegenerateTriangle)
        }
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.s1, self.s2, self.s3]
    }

    fn is_equilateral(&self) -> bool {
        let [a, b, c] = self.as_array();
        let hi = a.max(b).max(c);
        let lo = a.min(b).min(c);
        hi - lo <= EQUILATERAL_TOL * hi
    }
}

pub fn side_lengths(t: &Triangle) -> Result<SideLengths> {
    SideLengths::new(t.v2.distance(t.v3), t.v3.distance(t.v1), t.v1.distance(t.v2))
}

/// Area from side lengths (Kahan's stable form of Heron's formula).
fn area_from_sides(a: f64, b: f64, c: f64) -> f64 {
    let mut s = [a, b, c];
    s.sort_by(|x, y| y.total_cmp(x));
    let [a, b, c] = s;
    0.25 * ((a + (b + c)) * (c - (a - b)) * (c + (a - b)) * (a + (b - c))).max(0.0).sqrt()
}

/// Angle opposite `opp` in the triangle with sides `opp`, `adj1`, `adj2`.
fn angle(opp: f64, adj1: f64, adj2: f64) -> f64 {
    let cos = (adj1 * adj1 + adj2 * adj2 - opp * opp) / (2.0 * adj1 * adj2);
    let sin = 2.0 * area_from_sides(opp, adj1, adj2) / (adj1 * adj2);
    sin.atan2(cos)
}

fn cos_angle(opp: f64, adj1: f64, adj2: f64) -> f64 {
    (adj1 * adj1 + adj2 * adj2 - opp * opp) / (2.0 * adj1 * adj2)
}

/// `1 − cos(B − C)` written as `2·sin²((B − C)/2)` to keep precision near B = C.
fn one_minus_cos_b_minus_c(a: f64, b: f64, c: f64) -> f64 {
    let bb = angle(b, c, a);
    let cc = angle(c, a, b);
    2.0 * ((bb - cc) / 2.0).sin().powi(2)
}

pub type TrilinearFn = Arc<dyn Fn(f64, f64, f64) -> f64 + Send + Sync>;

#[derive(Clone)]
pub struct CenterFunction {
    pub index: u32,
    pub name: String,
    first_trilinear: TrilinearFn,
}

impl CenterFunction {
    pub fn new(index: u32, name: impl Into<String>, f: impl Fn(f64, f64, f64) -> f64 + Send + Sync + 'static) -> Self {
        CenterFunction { index, name: name.into(), first_trilinear: Arc::new(f) }
    }

    pub fn first_trilinear(&self, s1: f64, s2: f64, s3: f64) -> f64 {
        (self.first_trilinear)(s1, s2, s3)
    }

    /// The full trilinear triple by cyclic permutation.
    pub fn trilinears(&self, s: &SideLengths) -> [f64; 3] {
        let SideLengths { s1, s2, s3 } = *s;
        [self.first_trilinear(s1, s2, s3), self.first_trilinear(s2, s3, s1), self.first_trilinear(s3, s1, s2)]
    }
}

impl fmt::Debug for CenterFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CenterFunction").field("index", &self.index).field("name", &self.name).finish()
    }
}

/// Converts a trilinear triple to a Cartesian point.
pub fn trilinear_to_cartesian(t: &Triangle, sides: &SideLengths, tri: [f64; 3]) -> Option<Point2> {
    let w = [tri[0] * sides.s1, tri[1] * sides.s2, tri[2] * sides.s3];
    let sum = w[0] + w[1] + w[2];
    let mag = w[0].abs() + w[1].abs() + w[2].abs();
    if !sum.is_finite() || !(sum.abs() > 1e-14 * mag) {
        return None;
    }
    let p = (t.v1 * w[0] + t.v2 * w[1] + t.v3 * w[2]) * (1.0 / sum);
    p.is_finite().then_some(p)
}

/// Ordered collection of center functions keyed by index.
#[derive(Debug, Clone, Default)]
pub struct CenterRegistry {
    centers: BTreeMap<u32, CenterFunction>,
}

impl CenterRegistry {
    pub fn empty() -> Self {
        Self::default()
    }

    /// X1–X11 and X59.
    pub fn standard() -> Self {
        let mut r = CenterRegistry::empty();
        r.insert(CenterFunction::new(1, "Incenter", |_, _, _| 1.0));
        r.insert(CenterFunction::new(2, "Centroid", |a, _, _| 1.0 / a));
        r.insert(CenterFunction::new(3, "Circumcenter", cos_angle));
        // sec A, scaled by cos A cos B cos C so right triangles stay finite.
        r.insert(CenterFunction::new(4, "Orthocenter", |a, b, c| cos_angle(b, c, a) * cos_angle(c, a, b)));
        r.insert(CenterFunction::new(5, "Nine-point center", |a, b, c| {
            let bb = angle(b, c, a);
            let cc = angle(c, a, b);
            (bb - cc).cos()
        }));
        r.insert(CenterFunction::new(6, "Symmedian point", |a, _, _| a));
        r.insert(CenterFunction::new(7, "Gergonne point", |a, b, c| 1.0 / (a * (b + c - a))));
        r.insert(CenterFunction::new(8, "Nagel point", |a, b, c| (b + c - a) / a));
        r.insert(CenterFunction::new(9, "Mittenpunkt", |a, b, c| b + c - a));
        r.insert(CenterFunction::new(10, "Spieker center", |a, b, c| (b + c) / a));
        r.insert(CenterFunction::new(11, "Feuerbach point", one_minus_cos_b_minus_c));
        // 1/(1 − cos(B − C)), multiplied through by the product over all three
        // vertices so isosceles triangles do not divide by zero.
        r.insert(CenterFunction::new(59, "Isogonal conjugate of X11", |a, b, c| {
            one_minus_cos_b_minus_c(b, c, a) * one_minus_cos_b_minus_c(c, a, b)
        }));
        r
    }

    /// Shared instance of [`CenterRegistry::standard`].
    pub fn global() -> &'static CenterRegistry {
        static REGISTRY: OnceLock<CenterRegistry> = OnceLock::new();
        REGISTRY.get_or_init(CenterRegistry::standard)
    }

    pub fn insert(&mut self, f: CenterFunction) {
        self.centers.insert(f.index, f);
    }

    /// Registers a user-supplied first-trilinear function.
    pub fn with_center(
        mut self,
        index: u32,
        name: &str,
        f: impl Fn(f64, f64, f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        self.insert(CenterFunction::new(index, name, f));
        self
    }

    pub fn get(&self, index: u32) -> Result<&CenterFunction> {
        self.centers.get(&index).ok_or(Error::UnknownCenter(index))
    }

    pub fn contains(&self, index: u32) -> bool {
        self.centers.contains_key(&index)
    }

    pub fn indices(&self) -> impl Iterator<Item = u32> + '_ {
        self.centers.keys().copied()
    }

    /// `(index, name)` pairs in index order.
    pub fn listing(&self) -> Vec<(u32, String)> {
        self.centers.values().map(|c| (c.index, c.name.clone())).collect()
    }

    pub fn position(&self, t: &Triangle, k: u32) -> Result<Point2> {
        let f = self.get(k)?;
        let sides = side_lengths(t)?;
        if sides.is_equilateral() {
            return Ok(t.centroid());
        }
        trilinear_to_cartesian(t, &sides, f.trilinears(&sides)).ok_or(Error::CenterAtInfinity(k))
    }
}

/// Position of `X_k` using the standard registry.
pub fn center_position(t: &Triangle, k: u32) -> Result<Point2> {
    CenterRegistry::global().position(t, k)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DerivedKind {
    #[default]
    Reference,
    Medial,
    Orthic,
    Excentral,
    Intouch,
}

impl DerivedKind {
    pub const ALL: [DerivedKind; 5] = [
        DerivedKind::Reference,
        DerivedKind::Medial,
        DerivedKind::Orthic,
        DerivedKind::Excentral,
        DerivedKind::Intouch,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            DerivedKind::Reference => "reference",
            DerivedKind::Medial => "medial",
            DerivedKind::Orthic => "orthic",
            DerivedKind::Excentral => "excentral",
            DerivedKind::Intouch => "intouch",
        }
    }
}

impl std::str::FromStr for DerivedKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        DerivedKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown derived triangle '{s}'")))
    }
}

fn side_line(p: Point2, q: Point2) -> Result<Line2> {
    Line2::through(p, q).ok_or(Error::DegenerateTriangle)
}

/// Vertex `i` of the derived triangle is associated with vertex `i` of `t`
/// (the midpoint/foot/contact point on the opposite side, or the opposite
/// excenter). The result is reoriented CCW by swapping `v2`/`v3`.
pub fn derived_triangle(t: &Triangle, kind: DerivedKind) -> Result<Triangle> {
    let [a, b, c] = t.vertices();
    let out = match kind {
        DerivedKind::Reference => return Ok(*t),
        DerivedKind::Medial => Triangle::new_unchecked(b.midpoint(c), c.midpoint(a), a.midpoint(b)),
        DerivedKind::Orthic => Triangle::new_unchecked(
            side_line(b, c)?.project(a),
            side_line(c, a)?.project(b),
            side_line(a, b)?.project(c),
        ),
        DerivedKind::Excentral => {
            let s = side_lengths(t)?;
            let ex = |tri: [f64; 3]| trilinear_to_cartesian(t, &s, tri).ok_or(Error::DegenerateDerived);
            Triangle::new_unchecked(ex([-1.0, 1.0, 1.0])?, ex([1.0, -1.0, 1.0])?, ex([1.0, 1.0, -1.0])?)
        }
        DerivedKind::Intouch => {
            let s = side_lengths(t)?;
            let incenter = trilinear_to_cartesian(t, &s, [1.0, 1.0, 1.0]).ok_or(Error::DegenerateTriangle)?;
            Triangle::new_unchecked(
                side_line(b, c)?.project(incenter),
                side_line(c, a)?.project(incenter),
                side_line(a, b)?.project(incenter),
            )
        }
    };
    let out = out.to_ccw();
    let ext = out.bbox_extent();
    if !(out.signed_area().abs() > DEGENERATE_AREA_RATIO * ext * ext) {
        return Err(Error::DegenerateDerived);
    }
    Ok(out)
}
