//! Algebraic least-squares fits used to classify loci.
//!
//! Points are first moved to zero mean and unit RMS radius. The fitted curve is
//! the right singular vector of the monomial design matrix with the smallest
//! singular value, and the reported residual is the RMS of the design matrix
//! applied to that unit vector.
//!
//! Each monomial `x^i y^(d-i)` is weighted by `sqrt(binomial(d, i))`, which makes
//! the coefficient norm (and therefore the residual) invariant under rotation.

use nalgebra::{DMatrix, Matrix2, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::conic::Point2;
use crate::error::{Error, Result};

/// `A x² + B xy + C y² + D x + E y + F = 0`, unit norm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConicCoefficients(pub [f64; 6]);

/// Center, semi-axes and orientation of an elliptic conic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EllipseGeometry {
    pub center: Point2,
    /// Semi-axes along `direction` and its perpendicular.
    pub semi_axes: (f64, f64),
    /// Angle of the first axis, in `(-π/2, π/2]`.
    pub angle: f64,
}

impl EllipseGeometry {
    /// Semi-axes projected onto the coordinate axes, `(along x, along y)`.
    /// Exact for axis-aligned ellipses.
    pub fn axis_aligned_semi_axes(&self) -> (f64, f64) {
        if self.angle.cos().abs() >= self.angle.sin().abs() {
            self.semi_axes
        } else {
            (self.semi_axes.1, self.semi_axes.0)
        }
    }
}

impl ConicCoefficients {
    pub fn discriminant(&self) -> f64 {
        let [a, b, c, ..] = self.0;
        b * b - 4.0 * a * c
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn eval(&self, p: Point2) -> f64 {
        let [a, b, c, d, e, f] = self.0;
        a * p.x * p.x + b * p.x * p.y + c * p.y * p.y + d * p.x + e * p.y + f
    }

    /// Unit norm with `A + C ≥ 0`.
    fn normalized(mut self) -> Self {
        let n = self.norm();
        let sign = if self.0[0] + self.0[2] < 0.0 { -1.0 } else { 1.0 };
        for v in &mut self.0 {
            *v *= sign / n;
        }
        self
    }

    /// Rewrites coefficients fitted in the frame `x' = (x − mx)/s` into the
    /// original frame.
    fn denormalized(&self, mean: Point2, s: f64) -> Self {
        let [a, b, c, d, e, f] = self.0;
        let (mx, my) = (mean.x, mean.y);
        ConicCoefficients([
            a,
            b,
            c,
            -2.0 * a * mx - b * my + d * s,
            -b * mx - 2.0 * c * my + e * s,
            a * mx * mx + b * mx * my + c * my * my - d * s * mx - e * s * my + f * s * s,
        ])
        .normalized()
    }

    pub fn ellipse_geometry(&self) -> Option<EllipseGeometry> {
        let [a, b, c, d, e, f] = self.0;
        if self.discriminant() >= 0.0 {
            return None;
        }
        let m = Matrix2::new(2.0 * a, b, b, 2.0 * c);
        let center = m.try_inverse()? * nalgebra::Vector2::new(-d, -e);
        let f0 = 0.5 * (d * center.x + e * center.y) + f;
        let eig = SymmetricEigen::new(Matrix2::new(a, b / 2.0, b / 2.0, c));
        let l1 = eig.eigenvalues[0];
        let l2 = eig.eigenvalues[1];
        let (r1, r2) = ((-f0 / l1), (-f0 / l2));
        if !(r1 > 0.0 && r2 > 0.0) {
            return None;
        }
        let v = eig.eigenvectors.column(0);
        let mut angle = v[1].atan2(v[0]);
        if angle <= -std::f64::consts::FRAC_PI_2 {
            angle += std::f64::consts::PI;
        } else if angle > std::f64::consts::FRAC_PI_2 {
            angle -= std::f64::consts::PI;
        }
        Some(EllipseGeometry { center: Point2::new(center.x, center.y), semi_axes: (r1.sqrt(), r2.sqrt()), angle })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConicFit {
    /// In the original frame.
    pub coefficients: ConicCoefficients,
    /// Same conic in the normalized frame.
    pub normalized_coefficients: ConicCoefficients,
    pub residual: f64,
}

/// Mean and RMS radius about the mean.
pub(crate) fn normalization(points: &[Point2]) -> (Point2, f64) {
    let n = points.len() as f64;
    let mean = points.iter().fold(Point2::ORIGIN, |acc, p| acc + *p) * (1.0 / n);
    let rms = (points.iter().map(|p| (*p - mean).norm_sq()).sum::<f64>() / n).sqrt();
    (mean, rms)
}

/// Smallest right singular vector and the RMS residual `σ_min / √n`.
fn smallest_singular(design: DMatrix<f64>) -> (Vec<f64>, f64) {
    let rows = design.nrows() as f64;
    // Thin QR first so the SVD runs on a small square factor.
    let r = design.qr().r();
    let svd = r.svd(false, true);
    let vt = svd.v_t.expect("requested V^T");
    let (idx, sigma) =
        svd.singular_values.iter().copied().enumerate().min_by(|x, y| x.1.total_cmp(&y.1)).expect("non-empty");
    (vt.row(idx).iter().copied().collect(), sigma / rows.sqrt())
}

fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Rotation-invariant weights, in the same order as [`monomials`].
fn monomial_weights(degree: u32) -> Vec<f64> {
    let mut out = Vec::new();
    for total in (0..=degree).rev() {
        for i in (0..=total).rev() {
            out.push(binomial(total, i).sqrt());
        }
    }
    out
}

/// `x^i y^(d-i)` for `d` descending from `degree`, `i` descending from `d`.
fn monomials(x: f64, y: f64, degree: u32) -> Vec<f64> {
    let mut out = Vec::new();
    for total in (0..=degree).rev() {
        for i in (0..=total).rev() {
            out.push(x.powi(i as i32) * y.powi((total - i) as i32));
        }
    }
    out
}

fn design_matrix(points: &[Point2], degree: u32) -> Result<DMatrix<f64>> {
    let (mean, rms) = normalization(points);
    if !(rms > 0.0) || !rms.is_finite() {
        return Err(Error::InvalidParameter("points have no spread".into()));
    }
    let cols = ((degree + 1) * (degree + 2) / 2) as usize;
    let weights = monomial_weights(degree);
    let mut data = Vec::with_capacity(points.len() * cols);
    for p in points {
        let q = (*p - mean) * (1.0 / rms);
        data.extend(monomials(q.x, q.y, degree).into_iter().zip(&weights).map(|(m, w)| m * w));
    }
    Ok(DMatrix::from_row_slice(points.len(), cols, &data))
}

/// Least-squares conic through the points.
pub fn conic_fit(points: &[Point2]) -> Result<ConicFit> {
    if points.len() < 6 {
        return Err(Error::InsufficientPoints { needed: 6, got: points.len() });
    }
    let (mean, rms) = normalization(points);
    let (v, residual) = smallest_singular(design_matrix(points, 2)?);
    let w = monomial_weights(2);
    let normalized = ConicCoefficients(std::array::from_fn(|i| v[i] * w[i])).normalized();
    Ok(ConicFit { coefficients: normalized.denormalized(mean, rms), normalized_coefficients: normalized, residual })
}

/// RMS residual of the best algebraic quartic through the points.
pub fn quartic_fit(points: &[Point2]) -> Result<f64> {
    if points.len() < 15 {
        return Err(Error::InsufficientPoints { needed: 15, got: points.len() });
    }
    Ok(smallest_singular(design_matrix(points, 4)?).1)
}

/// RMS perpendicular distance to the total-least-squares line.
pub fn line_fit_residual(points: &[Point2]) -> f64 {
    let (mean, _) = normalization(points);
    let n = points.len() as f64;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for p in points {
        let d = *p - mean;
        sxx += d.x * d.x;
        sxy += d.x * d.y;
        syy += d.y * d.y;
    }
    let eig = SymmetricEigen::new(Matrix2::new(sxx, sxy, sxy, syy));
    let min = eig.eigenvalues.min().max(0.0);
    (min / n).sqrt()
}
