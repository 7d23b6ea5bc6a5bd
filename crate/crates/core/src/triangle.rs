use serde::{Deserialize, Serialize};

use crate::conic::Point2;
use crate::error::{Error, Result};

/// Relative area threshold (against bbox²) below which a triangle is degenerate.
pub const DEGENERATE_AREA_RATIO: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Triangle {
    pub v1: Point2,
    pub v2: Point2,
    pub v3: Point2,
}

impl Triangle {
    /// Builds a triangle, swapping `v2`/`v3` if needed so the result is CCW.
    /// Fails when the area is negligible relative to the bounding box.
    pub fn new(v1: Point2, v2: Point2, v3: Point2) -> Result<Self> {
        let t = Triangle::new_unchecked(v1, v2, v3).to_ccw();
        if t.is_degenerate() {
            return Err(Error::DegenerateTriangle);
        }
        Ok(t)
    }

    pub const fn new_unchecked(v1: Point2, v2: Point2, v3: Point2) -> Self {
        Triangle { v1, v2, v3 }
    }

    pub fn vertices(&self) -> [Point2; 3] {
        [self.v1, self.v2, self.v3]
    }

    pub fn vertex(&self, i: usize) -> Point2 {
        self.vertices()[i]
    }

    pub fn signed_area(&self) -> f64 {
        0.5 * (self.v2 - self.v1).cross(self.v3 - self.v1)
    }

    pub fn bbox_extent(&self) -> f64 {
        let xs = [self.v1.x, self.v2.x, self.v3.x];
        let ys = [self.v1.y, self.v2.y, self.v3.y];
        let w = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - xs.iter().cloned().fold(f64::INFINITY, f64::min);
        let h = ys.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - ys.iter().cloned().fold(f64::INFINITY, f64::min);
        w.max(h)
    }

    pub fn is_degenerate(&self) -> bool {
        let ext = self.bbox_extent();
        !(self.signed_area().abs() > DEGENERATE_AREA_RATIO * ext * ext)
            || !self.vertices().iter().all(|v| v.is_finite())
    }

    /// Same vertex labels for `v1`, `v2` and `v3` swapped if clockwise.
    pub fn to_ccw(self) -> Self {
        if self.signed_area() < 0.0 {
            Triangle { v1: self.v1, v2: self.v3, v3: self.v2 }
        } else {
            self
        }
    }

    pub fn centroid(&self) -> Point2 {
        Point2::new((self.v1.x + self.v2.x + self.v3.x) / 3.0, (self.v1.y + self.v2.y + self.v3.y) / 3.0)
    }

    pub fn map(&self, f: impl Fn(Point2) -> Point2) -> Triangle {
        Triangle::new_unchecked(f(self.v1), f(self.v2), f(self.v3))
    }
}
