//! Centered, axis-aligned ellipses and the handful of primitives the Poncelet
//! construction needs: parameterization, tangents from an exterior point and
//! line intersection.

use std::f64::consts::PI;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `boundary_residual` above this counts as strictly outside.
pub const TOLERANCE_INSIDE: f64 = 1e-12;
/// Relative discriminant below which a line is treated as tangent.
pub const DISCRIMINANT_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const ORIGIN: Point2 = Point2 { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Point2 { x, y }
    }

    pub fn dot(self, o: Point2) -> f64 {
        self.x * o.x + self.y * o.y
    }

    /// z-component of the 2D cross product.
    pub fn cross(self, o: Point2) -> f64 {
        self.x * o.y - self.y * o.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn norm_sq(self) -> f64 {
        self.dot(self)
    }

    pub fn distance(self, o: Point2) -> f64 {
        (self - o).norm()
    }

    pub fn lerp(self, o: Point2, s: f64) -> Point2 {
        self + (o - self) * s
    }

    pub fn midpoint(self, o: Point2) -> Point2 {
        Point2::new(0.5 * (self.x + o.x), 0.5 * (self.y + o.y))
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl Add for Point2 {
    type Output = Point2;
    fn add(self, o: Point2) -> Point2 {
        Point2::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Point2 {
    type Output = Point2;
    fn sub(self, o: Point2) -> Point2 {
        Point2::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Point2 {
    type Output = Point2;
    fn mul(self, s: f64) -> Point2 {
        Point2::new(self.x * s, self.y * s)
    }
}

impl Neg for Point2 {
    type Output = Point2;
    fn neg(self) -> Point2 {
        Point2::new(-self.x, -self.y)
    }
}

impl From<[f64; 2]> for Point2 {
    fn from([x, y]: [f64; 2]) -> Self {
        Point2::new(x, y)
    }
}

impl From<Point2> for [f64; 2] {
    fn from(p: Point2) -> Self {
        [p.x, p.y]
    }
}

/// Ellipse centered at the origin with axes along x and y.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Ellipse {
    pub semi_axis_x: f64,
    pub semi_axis_y: f64,
}

impl Ellipse {
    pub fn new(semi_axis_x: f64, semi_axis_y: f64) -> Result<Self> {
        if !(semi_axis_x > 0.0 && semi_axis_x.is_finite()) || !(semi_axis_y > 0.0 && semi_axis_y.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "ellipse semi-axes must be finite and positive, got ({semi_axis_x}, {semi_axis_y})"
            )));
        }
        Ok(Ellipse { semi_axis_x, semi_axis_y })
    }

    pub fn circle(radius: f64) -> Result<Self> {
        Ellipse::new(radius, radius)
    }

    pub fn a(&self) -> f64 {
        self.semi_axis_x
    }

    pub fn b(&self) -> f64 {
        self.semi_axis_y
    }

    pub fn max_semi_axis(&self) -> f64 {
        self.semi_axis_x.max(self.semi_axis_y)
    }

    pub fn point_at(&self, t: f64) -> Point2 {
        point_at(self, t)
    }

    /// Parameter angle of a point, i.e. the `t` with `point_at(t)` on the ray
    /// through the unscaled point. Range `[-π, π)`.
    pub fn parameter_of(&self, p: Point2) -> f64 {
        let t = (p.y / self.semi_axis_y).atan2(p.x / self.semi_axis_x);
        if t >= PI {
            -PI
        } else {
            t
        }
    }

    /// Parameter angle wrapped into `[0, 2π)`.
    pub fn parameter_of_positive(&self, p: Point2) -> f64 {
        let t = self.parameter_of(p);
        if t < 0.0 {
            t + 2.0 * PI
        } else {
            t
        }
    }

    /// Tangent line at a boundary point.
    pub fn tangent_at(&self, p: Point2) -> Line2 {
        let (a2, b2) = (self.semi_axis_x.powi(2), self.semi_axis_y.powi(2));
        Line2::new(p.x / a2, p.y / b2, -1.0)
    }

    /// Evenly spaced boundary samples, closed implicitly.
    pub fn sample(&self, n: usize) -> Vec<Point2> {
        (0..n).map(|i| self.point_at(2.0 * PI * i as f64 / n as f64)).collect()
    }
}

/// Line `l·x + m·y + n = 0`, stored with `l² + m² = 1` and the first nonzero
/// of `(l, m)` positive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Line2 {
    pub l: f64,
    pub m: f64,
    pub n: f64,
}

impl Line2 {
    /// Normalizes arbitrary homogeneous coefficients. Panics if `(l, m) = (0, 0)`.
    pub fn new(l: f64, m: f64, n: f64) -> Self {
        let h = l.hypot(m);
        assert!(h > 0.0, "line with (l, m) = (0, 0)");
        let sign = if l > 0.0 || (l == 0.0 && m > 0.0) { 1.0 } else { -1.0 };
        let s = sign / h;
        Line2 { l: l * s, m: m * s, n: n * s }
    }

    pub fn through(p: Point2, q: Point2) -> Option<Self> {
        let d = q - p;
        if d.norm_sq() == 0.0 {
            return None;
        }
        let (l, m) = (d.y, -d.x);
        Some(Line2::new(l, m, -(l * p.x + m * p.y)))
    }

    /// Signed distance of `p` from the line.
    pub fn eval(&self, p: Point2) -> f64 {
        self.l * p.x + self.m * p.y + self.n
    }

    pub fn direction(&self) -> Point2 {
        Point2::new(self.m, -self.l)
    }

    /// Foot of the perpendicular from the origin.
    pub fn closest_to_origin(&self) -> Point2 {
        Point2::new(-self.n * self.l, -self.n * self.m)
    }

    pub fn project(&self, p: Point2) -> Point2 {
        let d = self.eval(p);
        Point2::new(p.x - d * self.l, p.y - d * self.m)
    }
}

pub fn point_at(e: &Ellipse, t: f64) -> Point2 {
    Point2::new(e.semi_axis_x * t.cos(), e.semi_axis_y * t.sin())
}

/// `x²/a² + y²/b² − 1`: zero on the boundary, negative inside.
pub fn boundary_residual(e: &Ellipse, p: Point2) -> f64 {
    (p.x / e.semi_axis_x).powi(2) + (p.y / e.semi_axis_y).powi(2) - 1.0
}

/// `|a²l² + b²m² − n²|`, zero iff the line is tangent.
pub fn tangency_residual(e: &Ellipse, line: &Line2) -> f64 {
    let (a, b) = (e.semi_axis_x, e.semi_axis_y);
    (a * a * line.l * line.l + b * b * line.m * line.m - line.n * line.n).abs()
}

/// The pair of tangents from `p` to `e`, ordered by the parameter angle of
/// their tangency points in `[0, 2π)`. A point on the boundary yields its
/// single tangent twice.
pub fn tangents_from(e: &Ellipse, p: Point2) -> Result<[Line2; 2]> {
    let [(l1, _), (l2, _)] = tangents_with_contacts(e, p)?;
    Ok([l1, l2])
}

/// Like [`tangents_from`] but also returns the tangency points.
pub fn tangents_with_contacts(e: &Ellipse, p: Point2) -> Result<[(Line2, Point2); 2]> {
    let residual = boundary_residual(e, p);
    if residual.abs() <= TOLERANCE_INSIDE {
        let line = e.tangent_at(p);
        return Ok([(line, p), (line, p)]);
    }
    if residual < 0.0 {
        return Err(Error::PointInsideConic);
    }
    // In the frame scaled by (1/a, 1/b) the ellipse is the unit circle and the
    // tangency points sit at ±acos(1/r) around the polar angle of the point.
    let (a, b) = (e.semi_axis_x, e.semi_axis_y);
    let q = Point2::new(p.x / a, p.y / b);
    let r = q.norm();
    let phi = q.y.atan2(q.x);
    let half = (1.0 / r).acos();
    let mut contacts = [phi - half, phi + half].map(|t| {
        let t = t.rem_euclid(2.0 * PI);
        (t, point_at(e, t))
    });
    contacts.sort_by(|x, y| x.0.total_cmp(&y.0));
    Ok(contacts.map(|(_, c)| {
        // Circle tangent at angle t is cos(t)·x' + sin(t)·y' = 1; unscaled this is
        // the ellipse tangent at the contact point, which passes through p.
        (e.tangent_at(c), c)
    }))
}

/// Real intersections of a line with the ellipse, sorted by parameter angle
/// in `[-π, π)`. A tangent line reports its contact point once.
pub fn line_ellipse_intersections(e: &Ellipse, line: &Line2) -> Vec<Point2> {
    let (a2, b2) = (e.semi_axis_x.powi(2), e.semi_axis_y.powi(2));
    let p0 = line.closest_to_origin();
    let d = line.direction();
    let qa = d.x * d.x / a2 + d.y * d.y / b2;
    let qb = 2.0 * (p0.x * d.x / a2 + p0.y * d.y / b2);
    let qc = p0.x * p0.x / a2 + p0.y * p0.y / b2 - 1.0;
    let disc = qb * qb - 4.0 * qa * qc;
    let scale = qb * qb + (4.0 * qa * qc).abs();
    let mut out = if disc.abs() <= DISCRIMINANT_TOL * scale.max(f64::MIN_POSITIVE) {
        vec![p0 + d * (-qb / (2.0 * qa))]
    } else if disc < 0.0 {
        Vec::new()
    } else {
        // Stable quadratic roots.
        let sq = disc.sqrt();
        let q = -0.5 * (qb + qb.signum() * sq);
        let (s1, s2) = if q == 0.0 { (0.0, 0.0) } else { (q / qa, qc / q) };
        vec![p0 + d * s1, p0 + d * s2]
    };
    out.sort_by(|p, q| e.parameter_of(*p).total_cmp(&e.parameter_of(*q)));
    out
}

/// The second intersection of the line through `p` (on the boundary) with
/// direction `dir`. Uses the known root at `p` to avoid cancellation.
pub(crate) fn second_intersection(e: &Ellipse, p: Point2, dir: Point2) -> Point2 {
    let (a2, b2) = (e.semi_axis_x.powi(2), e.semi_axis_y.powi(2));
    let qa = dir.x * dir.x / a2 + dir.y * dir.y / b2;
    let qb = 2.0 * (p.x * dir.x / a2 + p.y * dir.y / b2);
    p + dir * (-qb / qa)
}
