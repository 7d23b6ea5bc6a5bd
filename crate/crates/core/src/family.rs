//! Poncelet triangle families interscribed between two concentric,
//! axis-aligned ellipses.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::centers::{derived_triangle, DerivedKind};
use crate::conic::{
    boundary_residual, point_at, second_intersection, tangency_residual, tangents_with_contacts, Ellipse, Line2, Point2,
};
use crate::error::{Error, Result};
use crate::fit::conic_fit;
use crate::triangle::Triangle;

/// Default caustic split for the circumcircle family.
pub const DEFAULT_CIRCUMCIRCLE_FREE: f64 = 0.6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyKind {
    Confocal,
    Incircle,
    Circumcircle,
    Homothetic,
    Dual,
    Excentral,
    Generic,
}

impl FamilyKind {
    pub const ALL: [FamilyKind; 7] = [
        FamilyKind::Confocal,
        FamilyKind::Incircle,
        FamilyKind::Circumcircle,
        FamilyKind::Homothetic,
        FamilyKind::Dual,
        FamilyKind::Excentral,
        FamilyKind::Generic,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            FamilyKind::Confocal => "confocal",
            FamilyKind::Incircle => "incircle",
            FamilyKind::Circumcircle => "circumcircle",
            FamilyKind::Homothetic => "homothetic",
            FamilyKind::Dual => "dual",
            FamilyKind::Excentral => "excentral",
            FamilyKind::Generic => "generic",
        }
    }

    /// The center that stays put at the origin over the whole family.
    pub fn expected_stationary_center(&self) -> Option<u32> {
        match self {
            FamilyKind::Confocal => Some(9),
            FamilyKind::Incircle => Some(1),
            FamilyKind::Circumcircle => Some(3),
            FamilyKind::Homothetic => Some(2),
            FamilyKind::Dual => Some(4),
            FamilyKind::Excentral => Some(6),
            FamilyKind::Generic => None,
        }
    }
}

impl fmt::Display for FamilyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FamilyKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        FamilyKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown family '{s}'")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FamilySpec {
    pub kind: FamilyKind,
    pub outer: Ellipse,
    pub caustic: Ellipse,
    /// The confocal family an excentral family is derived from.
    pub base: Option<Box<FamilySpec>>,
    /// Free parameter as supplied (circumcircle and generic only).
    pub free: Option<f64>,
}

/// `a_c/a + b_c/b − 1`, zero iff a 3-periodic family closes.
pub fn closure_defect(outer: &Ellipse, caustic: &Ellipse) -> f64 {
    caustic.semi_axis_x / outer.semi_axis_x + caustic.semi_axis_y / outer.semi_axis_y - 1.0
}

/// Caustic of the billiard (confocal) family. Written as `a³/(δ + b²)`,
/// `b³/(a² + δ)` which is equivalent to the textbook form but stays finite at
/// `a = b`, where it reduces to the half-radius circle.
fn confocal_caustic(a: f64, b: f64) -> (f64, f64) {
    let delta = (a.powi(4) - a * a * b * b + b.powi(4)).sqrt();
    (a.powi(3) / (delta + b * b), b.powi(3) / (a * a + delta))
}

pub fn make_family(kind: FamilyKind, a: f64, b: f64, free: Option<f64>) -> Result<FamilySpec> {
    let outer = Ellipse::new(a, b)?;
    let spec = |ac: f64, bc: f64, free: Option<f64>| -> Result<FamilySpec> {
        Ok(FamilySpec { kind, outer, caustic: Ellipse::new(ac, bc)?, base: None, free })
    };
    match kind {
        FamilyKind::Confocal => {
            let (ac, bc) = confocal_caustic(a, b);
            spec(ac, bc, None)
        }
        FamilyKind::Incircle => {
            let r = a * b / (a + b);
            spec(r, r, None)
        }
        FamilyKind::Circumcircle => {
            if (a - b).abs() > 1e-12 * a.max(b) {
                return Err(Error::InvalidAspect { a, b });
            }
            let f = free.unwrap_or(DEFAULT_CIRCUMCIRCLE_FREE);
            if !(f > 0.0 && f < 1.0) {
                return Err(Error::FreeParamOutOfRange { value: f, range: "(0, 1)" });
            }
            spec(f * a, (1.0 - f) * a, Some(f))
        }
        FamilyKind::Homothetic => spec(a / 2.0, b / 2.0, None),
        FamilyKind::Dual => {
            let d = a * a + b * b;
            spec(a * b * b / d, a * a * b / d, None)
        }
        FamilyKind::Generic => {
            let f = free.ok_or_else(|| Error::InvalidParameter("generic family requires a free parameter".into()))?;
            if !(f > 0.0 && f < a) {
                return Err(Error::FreeParamOutOfRange { value: f, range: "(0, a)" });
            }
            spec(f, b * (1.0 - f / a), Some(f))
        }
        FamilyKind::Excentral => {
            let base = make_family(FamilyKind::Confocal, a, b, None)?;
            let outer = excenter_ellipse(&base)?;
            // External bisectors of a billiard triangle are the tangents to the
            // billiard table at its vertices, so the base outer is the caustic.
            Ok(FamilySpec { kind, outer, caustic: base.outer, base: Some(Box::new(base)), free: None })
        }
    }
}

/// Fits the centered, axis-aligned ellipse traced by the excenters.
fn excenter_ellipse(base: &FamilySpec) -> Result<Ellipse> {
    let n = 64;
    let pts = (0..n)
        .map(|i| {
            let t = 2.0 * PI * i as f64 / n as f64;
            derived_triangle(&base.triangle_at(t)?, DerivedKind::Excentral).map(|e| e.v1)
        })
        .collect::<Result<Vec<_>>>()?;
    let fit = conic_fit(&pts)?;
    let geom = fit.coefficients.ellipse_geometry().ok_or(Error::DegenerateTriangle)?;
    let (ax, ay) = geom.axis_aligned_semi_axes();
    Ellipse::new(ax, ay)
}

impl FamilySpec {
    pub fn scale(&self) -> f64 {
        self.outer.max_semi_axis()
    }

    pub fn expected_stationary_center(&self) -> Option<u32> {
        self.kind.expected_stationary_center()
    }

    /// From `v`, the far end of the chord tangent to the caustic whose
    /// contact point lies counterclockwise of `v`.
    fn next_vertex(&self, v: Point2) -> Result<Point2> {
        let pairs = tangents_with_contacts(&self.caustic, v)?;
        let (_, contact) =
            pairs.into_iter().max_by(|(_, c1), (_, c2)| v.cross(*c1).total_cmp(&v.cross(*c2))).expect("two tangents");
        Ok(second_intersection(&self.outer, v, contact - v))
    }

    /// Triangle by repeated tangent chords, without shortcuts.
    pub fn chord_triangle_at(&self, t: f64) -> Result<Triangle> {
        let v1 = point_at(&self.outer, t);
        let v2 = self.next_vertex(v1)?;
        let v3 = self.next_vertex(v2)?;
        Triangle::new(v1, v2, v3)
    }

    /// The family triangle with its first vertex at parameter `t` on the outer ellipse.
    pub fn triangle_at(&self, t: f64) -> Result<Triangle> {
        match self.kind {
            FamilyKind::Excentral => {
                let base = self.base.as_deref().ok_or(Error::DegenerateTriangle)?;
                derived_triangle(&base.triangle_at(t)?, DerivedKind::Excentral).map_err(|_| Error::DegenerateTriangle)
            }
            FamilyKind::Homothetic => {
                let third = 2.0 * PI / 3.0;
                Triangle::new(
                    point_at(&self.outer, t),
                    point_at(&self.outer, t + third),
                    point_at(&self.outer, t + 2.0 * third),
                )
            }
            _ => self.chord_triangle_at(t),
        }
    }

    /// Parameter span after which the family repeats: the parameter of the
    /// second vertex when the first sits at `t = 0`. Every triangle of the
    /// family appears exactly once for `t` in `[0, period)`.
    pub fn period(&self) -> Result<f64> {
        match self.kind {
            FamilyKind::Excentral => self.base.as_deref().ok_or(Error::DegenerateTriangle)?.period(),
            FamilyKind::Homothetic => Ok(2.0 * PI / 3.0),
            _ => {
                let v2 = self.next_vertex(point_at(&self.outer, 0.0))?;
                let t = self.outer.parameter_of_positive(v2);
                if t > 0.0 {
                    Ok(t)
                } else {
                    Err(Error::DegenerateTriangle)
                }
            }
        }
    }

    /// Largest tangency residual of the three sides against the caustic.
    pub fn porism_residual(&self, t: f64) -> Result<f64> {
        porism_residual_of(&self.caustic, &self.triangle_at(t)?)
    }
}

pub fn porism_residual_of(caustic: &Ellipse, tri: &Triangle) -> Result<f64> {
    let [a, b, c] = tri.vertices();
    [(a, b), (b, c), (c, a)].into_iter().try_fold(0.0f64, |acc, (p, q)| {
        let line = Line2::through(p, q).ok_or(Error::DegenerateTriangle)?;
        Ok(acc.max(tangency_residual(caustic, &line)))
    })
}

pub fn triangle_at(f: &FamilySpec, t: f64) -> Result<Triangle> {
    f.triangle_at(t)
}

pub fn porism_residual(f: &FamilySpec, t: f64) -> Result<f64> {
    f.porism_residual(t)
}

/// Largest `|boundary_residual|` of the triangle's vertices on `outer`.
pub fn vertex_residual(outer: &Ellipse, tri: &Triangle) -> f64 {
    tri.vertices().iter().map(|v| boundary_residual(outer, *v).abs()).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::centers::center_position;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_ts(n: usize, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| rng.gen_range(0.0..2.0 * PI)).collect()
    }

    #[test]
    fn closure_defect_examples() {
        let outer = Ellipse::new(2.0, 1.0).unwrap();
        assert_eq!(closure_defect(&outer, &Ellipse::new(1.0, 0.5).unwrap()), 0.0);
        assert_abs_diff_eq!(closure_defect(&outer, &Ellipse::new(2.0 / 3.0, 2.0 / 3.0).unwrap()), 0.0, epsilon = 1e-15);
        assert_eq!(closure_defect(&outer, &Ellipse::new(1.0, 1.0).unwrap()), 0.5);
    }

    /// Tangency oracle for the closed-form closure condition: with the
    /// incircle r = ab/(a+b), every chord-built triangle closes.
    #[test]
    fn incircle_closure_by_tangency_oracle() {
        let f = FamilySpec {
            kind: FamilyKind::Generic,
            outer: Ellipse::new(2.0, 1.0).unwrap(),
            caustic: Ellipse::new(2.0 / 3.0, 2.0 / 3.0).unwrap(),
            base: None,
            free: None,
        };
        for t in random_ts(50, 1) {
            assert!(f.porism_residual(t).unwrap() < 1e-9);
        }
    }

    #[test]
    fn confocal_caustic_values() {
        let f = make_family(FamilyKind::Confocal, 2.0, 1.0, None).unwrap();
        let s13 = 13f64.sqrt();
        assert_abs_diff_eq!(f.caustic.a(), 2.0 * (s13 - 1.0) / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(f.caustic.b(), (4.0 - s13) / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(f.caustic.a(), 1.73703, epsilon = 1e-5);
        assert_abs_diff_eq!(f.caustic.b(), 0.13148, epsilon = 1e-5);
        // Confocality: same focal distance.
        let c2 = f.caustic.a().powi(2) - f.caustic.b().powi(2);
        assert_abs_diff_eq!(c2, 3.0, epsilon = 1e-14);
        assert_abs_diff_eq!(closure_defect(&f.outer, &f.caustic), 0.0, epsilon = 1e-15);
        for t in random_ts(50, 2) {
            assert!(f.porism_residual(t).unwrap() < 1e-9);
        }
    }

    #[test]
    fn confocal_circle_degenerates_to_half_radius() {
        let f = make_family(FamilyKind::Confocal, 1.5, 1.5, None).unwrap();
        assert_abs_diff_eq!(f.caustic.a(), 0.75, epsilon = 1e-15);
        assert_abs_diff_eq!(f.caustic.b(), 0.75, epsilon = 1e-15);
    }

    #[test]
    fn dual_and_homothetic_caustics() {
        let f = make_family(FamilyKind::Dual, 2.0, 1.0, None).unwrap();
        assert_abs_diff_eq!(f.caustic.a(), 0.4, epsilon = 1e-15);
        assert_abs_diff_eq!(f.caustic.b(), 0.8, epsilon = 1e-15);
        let f = make_family(FamilyKind::Homothetic, 2.0, 1.0, None).unwrap();
        assert_eq!((f.caustic.a(), f.caustic.b()), (1.0, 0.5));
    }

    #[test]
    fn family_errors() {
        assert_eq!(make_family(FamilyKind::Circumcircle, 2.0, 1.0, None), Err(Error::InvalidAspect { a: 2.0, b: 1.0 }));
        assert!(matches!(
            make_family(FamilyKind::Circumcircle, 1.0, 1.0, Some(1.0)),
            Err(Error::FreeParamOutOfRange { .. })
        ));
        assert!(matches!(
            make_family(FamilyKind::Generic, 2.0, 1.0, Some(2.5)),
            Err(Error::FreeParamOutOfRange { .. })
        ));
        assert!(matches!(make_family(FamilyKind::Generic, 2.0, 1.0, None), Err(Error::InvalidParameter(_))));
        assert!(matches!(make_family(FamilyKind::Confocal, -1.0, 1.0, None), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn homothetic_at_zero() {
        let f = make_family(FamilyKind::Homothetic, 2.0, 1.0, None).unwrap();
        let t = f.triangle_at(0.0).unwrap();
        let h = 3f64.sqrt() / 2.0;
        let want = [Point2::new(2.0, 0.0), Point2::new(-1.0, h), Point2::new(-1.0, -h)];
        for (v, w) in t.vertices().iter().zip(want) {
            assert_abs_diff_eq!(v.x, w.x, epsilon = 1e-15);
            assert_abs_diff_eq!(v.y, w.y, epsilon = 1e-15);
        }
        assert!(f.porism_residual(0.0).unwrap() < 1e-12);
    }

    #[test]
    fn homothetic_shortcut_matches_chords() {
        let f = make_family(FamilyKind::Homothetic, 2.0, 1.0, None).unwrap();
        for t in random_ts(64, 3) {
            let a = f.triangle_at(t).unwrap();
            let b = f.chord_triangle_at(t).unwrap();
            for (p, q) in a.vertices().iter().zip(b.vertices()) {
                assert!(p.distance(q) < 1e-9);
            }
        }
    }

    #[test]
    fn incircle_sides_are_at_inradius() {
        let f = make_family(FamilyKind::Incircle, 2.0, 1.0, None).unwrap();
        for t in random_ts(20, 4) {
            let tri = f.triangle_at(t).unwrap();
            let [a, b, c] = tri.vertices();
            for (p, q) in [(a, b), (b, c), (c, a)] {
                let d = Line2::through(p, q).unwrap().eval(Point2::ORIGIN).abs();
                assert_abs_diff_eq!(d, 2.0 / 3.0, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn corrupted_spec_fails_porism() {
        let f = FamilySpec {
            kind: FamilyKind::Generic,
            outer: Ellipse::new(2.0, 1.0).unwrap(),
            caustic: Ellipse::new(1.0, 1.0).unwrap(),
            base: None,
            free: None,
        };
        assert!(f.porism_residual(0.3).unwrap() > 1e-3);
    }

    #[test]
    fn family_periodicity() {
        for kind in [FamilyKind::Confocal, FamilyKind::Dual, FamilyKind::Incircle, FamilyKind::Excentral] {
            let f = make_family(kind, 1.7, 1.0, None).unwrap();
            for t in random_ts(10, 5) {
                let tri = f.triangle_at(t).unwrap();
                let base_outer = f.base.as_deref().map_or(f.outer, |b| b.outer);
                let base_tri = f.base.as_deref().map_or(Ok(tri), |b| b.triangle_at(t)).unwrap();
                let t2 = base_outer.parameter_of(base_tri.v2);
                let next = f.triangle_at(t2).unwrap();
                for v in tri.vertices() {
                    let closest = next.vertices().iter().map(|w| w.distance(v)).fold(f64::INFINITY, f64::min);
                    assert!(closest < 1e-9, "{kind:?}");
                }
            }
        }
    }

    #[test]
    fn period_splits_family_into_thirds() {
        let f = make_family(FamilyKind::Confocal, 2.0, 1.0, None).unwrap();
        let tau = f.period().unwrap();
        assert!(tau > 0.0 && tau < 2.0 * PI);
        let t0 = f.triangle_at(0.0).unwrap();
        let t1 = f.triangle_at(tau).unwrap();
        let c0 = center_position(&t0, 1).unwrap();
        let c1 = center_position(&t1, 1).unwrap();
        assert!(c0.distance(c1) < 1e-12);
    }

    #[test]
    fn excentral_family_is_poncelet_about_base_outer() {
        let f = make_family(FamilyKind::Excentral, 2.0, 1.0, None).unwrap();
        assert_eq!(f.caustic, Ellipse::new(2.0, 1.0).unwrap());
        assert!(f.outer.a() > 2.0 && f.outer.b() > 1.0);
        for t in random_ts(20, 6) {
            let tri = f.triangle_at(t).unwrap();
            assert!(f.porism_residual(t).unwrap() < 1e-9);
            assert!(vertex_residual(&f.outer, &tri) < 1e-8);
        }
        assert_abs_diff_eq!(closure_defect(&f.outer, &f.caustic), 0.0, epsilon = 1e-9);
    }

    #[test]
    fn stationary_centers() {
        let cases = [
            (FamilyKind::Confocal, 2.0, 1.0),
            (FamilyKind::Incircle, 2.0, 1.0),
            (FamilyKind::Circumcircle, 1.0, 1.0),
            (FamilyKind::Homothetic, 2.0, 1.0),
            (FamilyKind::Dual, 2.0, 1.0),
            (FamilyKind::Excentral, 2.0, 1.0),
        ];
        for (kind, a, b) in cases {
            let f = make_family(kind, a, b, None).unwrap();
            let k = f.expected_stationary_center().unwrap();
            for i in 0..64 {
                let t = 2.0 * PI * i as f64 / 64.0;
                let c = center_position(&f.triangle_at(t).unwrap(), k).unwrap();
                assert!(c.norm() < 1e-7 * a.max(b), "{kind:?} X{k} t={t}: {c:?}");
            }
        }
    }
}
