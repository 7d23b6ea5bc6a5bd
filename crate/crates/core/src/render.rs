//! Deterministic SVG output in three styles.
//!
//! Geometry is drawn in model coordinates inside a `scale(1,-1)` group so that
//! y points up. Every number is printed with six decimals, which keeps golden
//! files byte-stable.

use std::fmt::Write as _;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arrangement::{build_arrangement, Arrangement};
use crate::conic::{Ellipse, Point2};
use crate::error::{Error, Result};
use crate::locus::{sweep_locus, Locus, LocusKind, LocusRequest};
use crate::triangle::Triangle;

pub const DARK_BACKGROUND: &str = "#101018";
pub const LIGHT_BACKGROUND: &str = "#ffffff";
/// Fraction of the scene extent added on every side.
pub const MARGIN: f64 = 0.05;

const WIRE_LOCUS_COLORS: [&str; 6] = ["#d62728", "#1f77b4", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];
const DARK_LOCUS_COLORS: [&str; 6] = ["#ffd166", "#06d6a0", "#ef476f", "#4cc9f0", "#f72585", "#b5e48c"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StyleMode {
    Wireframe,
    DarkThick,
    RegionFill,
}

impl StyleMode {
    pub const ALL: [StyleMode; 3] = [StyleMode::Wireframe, StyleMode::DarkThick, StyleMode::RegionFill];

    pub fn name(&self) -> &'static str {
        match self {
            StyleMode::Wireframe => "wireframe",
            StyleMode::DarkThick => "dark_thick",
            StyleMode::RegionFill => "region_fill",
        }
    }
}

impl FromStr for StyleMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        StyleMode::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown style mode {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Style {
    pub mode: StyleMode,
    /// Locus stroke width in output pixels.
    pub stroke_width: f64,
    pub background: String,
    pub palette_seed: u64,
}

impl Style {
    pub fn new(mode: StyleMode) -> Self {
        let (stroke_width, background) = match mode {
            StyleMode::Wireframe => (1.5, LIGHT_BACKGROUND),
            StyleMode::DarkThick => (6.0, DARK_BACKGROUND),
            StyleMode::RegionFill => (1.5, DARK_BACKGROUND),
        };
        Style { mode, stroke_width, background: background.to_string(), palette_seed: 1 }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.palette_seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.stroke_width > 0.0 && self.stroke_width.is_finite()) {
            return Err(Error::InvalidParameter(format!("stroke width must be positive, got {}", self.stroke_width)));
        }
        Ok(())
    }
}

impl Default for Style {
    fn default() -> Self {
        Style::new(StyleMode::Wireframe)
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Scene {
    pub outer: Option<Ellipse>,
    pub caustic: Option<Ellipse>,
    pub triangle: Option<Triangle>,
    pub loci: Vec<Locus>,
    /// Faces for `region_fill`; built from the loci when absent.
    pub arrangement: Option<Arrangement>,
}

impl Scene {
    fn is_empty(&self) -> bool {
        self.outer.is_none()
            && self.caustic.is_none()
            && self.triangle.is_none()
            && self.loci.iter().all(|l| l.points.is_empty())
            && self.arrangement.as_ref().is_none_or(|a| a.vertices.is_empty())
    }

    fn points(&self) -> Vec<Point2> {
        let mut pts = Vec::new();
        for e in [self.outer, self.caustic].into_iter().flatten() {
            pts.extend([Point2::new(-e.a(), -e.b()), Point2::new(e.a(), e.b())]);
        }
        if let Some(t) = &self.triangle {
            pts.extend(t.vertices());
        }
        for l in &self.loci {
            pts.extend(&l.points);
        }
        if let Some(a) = &self.arrangement {
            pts.extend(&a.vertices);
        }
        pts
    }
}

/// Color in HSL; saturation and lightness in percent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Hsl {
    pub h: f64,
    pub s: f64,
    pub l: f64,
}

impl Hsl {
    pub fn to_rgb(&self) -> [u8; 3] {
        let (s, l) = (self.s / 100.0, self.l / 100.0);
        let c = (1.0 - (2.0 * l - 1.0).abs()) * s;
        let hp = self.h.rem_euclid(360.0) / 60.0;
        let x = c * (1.0 - (hp % 2.0 - 1.0).abs());
        let (r, g, b) = match hp as u32 {
            0 => (c, x, 0.0),
            1 => (x, c, 0.0),
            2 => (0.0, c, x),
            3 => (0.0, x, c),
            4 => (x, 0.0, c),
            _ => (c, 0.0, x),
        };
        let m = l - c / 2.0;
        [r, g, b].map(|v| ((v + m) * 255.0).round().clamp(0.0, 255.0) as u8)
    }

    pub fn to_hex(&self) -> String {
        let [r, g, b] = self.to_rgb();
        format!("#{r:02x}{g:02x}{b:02x}")
    }
}

/// `n` seeded pastel colors: hue uniform on [0, 360), saturation in
/// [35, 55] %, lightness in [70, 85] %.
pub fn pastel_palette(n: usize, seed: u64) -> Vec<Hsl> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| Hsl { h: rng.gen_range(0.0..360.0), s: rng.gen_range(35.0..=55.0), l: rng.gen_range(70.0..=85.0) })
        .collect()
}

fn num(v: f64) -> String {
    let s = format!("{v:.6}");
    if s == "-0.000000" {
        "0.000000".into()
    } else {
        s
    }
}

fn ring_path(out: &mut String, pts: &[Point2], close: bool) {
    for (i, p) in pts.iter().enumerate() {
        let _ = write!(out, "{}{} {}", if i == 0 { "M" } else { " L" }, num(p.x), num(p.y));
    }
    if close {
        out.push_str(" Z");
    }
}

struct Frame {
    min: Point2,
    width: f64,
    height: f64,
    /// Model units per output pixel.
    unit: f64,
}

fn fit_frame(pts: &[Point2], width: u32, height: u32) -> Frame {
    let (lo, hi) = crate::segments::bbox(pts).unwrap_or((Point2::ORIGIN, Point2::ORIGIN));
    let extent = (hi.x - lo.x).max(hi.y - lo.y);
    let pad = if extent > 0.0 { MARGIN * extent } else { 1.0 };
    let (mut w, mut h) = (hi.x - lo.x + 2.0 * pad, hi.y - lo.y + 2.0 * pad);
    let aspect = width as f64 / height as f64;
    if w / h < aspect {
        w = h * aspect;
    } else {
        h = w / aspect;
    }
    let center = lo.midpoint(hi);
    Frame { min: Point2::new(center.x - w / 2.0, center.y - h / 2.0), width: w, height: h, unit: w / width as f64 }
}

/// Renders a scene as an SVG 1.1 document of `width × height` pixels.
pub fn render_scene(scene: &Scene, style: &Style, width: u32, height: u32) -> Result<String> {
    style.validate()?;
    if width == 0 || height == 0 {
        return Err(Error::InvalidParameter(format!("image size must be positive, got {width}x{height}")));
    }
    if scene.is_empty() {
        return Err(Error::EmptyScene);
    }
    let frame = fit_frame(&scene.points(), width, height);
    let px = |w: f64| num(w * frame.unit);
    let dark = style.mode != StyleMode::Wireframe;
    let (conic_color, caustic_color, triangle_color) =
        if dark { ("#e0e0e0", "#8a8aa0", "#cccccc") } else { ("#000000", "#7f7f7f", "#555555") };
    let thin = if style.mode == StyleMode::Wireframe { style.stroke_width } else { 1.5 };

    let mut svg = String::new();
    let _ = writeln!(svg, r#"<?xml version="1.0" encoding="UTF-8" standalone="no"?>"#);
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" height="{height}" viewBox="{} {} {} {}" preserveAspectRatio="xMidYMid meet">"#,
        num(frame.min.x),
        num(-(frame.min.y + frame.height)),
        num(frame.width),
        num(frame.height)
    );
    let _ = writeln!(
        svg,
        r#"<rect class="background" x="{}" y="{}" width="{}" height="{}" fill="{}"/>"#,
        num(frame.min.x),
        num(-(frame.min.y + frame.height)),
        num(frame.width),
        num(frame.height),
        style.background
    );
    svg.push_str("<g transform=\"scale(1,-1)\" stroke-linejoin=\"round\" stroke-linecap=\"round\">\n");

    if style.mode == StyleMode::RegionFill {
        let built;
        let arr = match &scene.arrangement {
            Some(a) => a,
            None => {
                let curves: Vec<Vec<Point2>> = scene
                    .loci
                    .iter()
                    .filter(|l| l.classification.kind != LocusKind::Stationary)
                    .map(|l| l.points.clone())
                    .collect();
                built = build_arrangement(&curves);
                &built
            }
        };
        let palette = pastel_palette(arr.bounded_face_count().max(1), style.palette_seed);
        for ((_, face), color) in arr.bounded_faces().zip(&palette) {
            let mut d = String::new();
            ring_path(&mut d, &arr.loop_points(&face.boundary), true);
            for hole in &face.holes {
                d.push(' ');
                ring_path(&mut d, &arr.loop_points(hole), true);
            }
            let _ = writeln!(
                svg,
                r#"<path class="face" fill="{}" fill-rule="evenodd" stroke="none" d="{d}"/>"#,
                color.to_hex()
            );
        }
    }

    for (class, e, color) in [("outer", scene.outer, conic_color), ("caustic", scene.caustic, caustic_color)] {
        if let Some(e) = e {
            let _ = writeln!(
                svg,
                r#"<ellipse class="{class}" cx="0.000000" cy="0.000000" rx="{}" ry="{}" fill="none" stroke="{color}" stroke-width="{}"/>"#,
                num(e.a()),
                num(e.b()),
                px(thin)
            );
        }
    }

    let locus_colors = if dark { DARK_LOCUS_COLORS } else { WIRE_LOCUS_COLORS };
    for (i, l) in scene.loci.iter().enumerate() {
        if l.points.is_empty() {
            continue;
        }
        let color = if style.mode == StyleMode::RegionFill {
            style.background.as_str()
        } else {
            locus_colors[i % locus_colors.len()]
        };
        if l.classification.kind == LocusKind::Stationary {
            let p = l.points[0];
            let _ = writeln!(
                svg,
                r#"<circle class="locus-point" cx="{}" cy="{}" r="{}" fill="{}"/>"#,
                num(p.x),
                num(p.y),
                px(2.0 * style.stroke_width.max(1.5)),
                locus_colors[i % locus_colors.len()]
            );
            continue;
        }
        let mut d = String::new();
        ring_path(&mut d, &l.points, true);
        let _ = writeln!(
            svg,
            r#"<path class="locus" fill="none" stroke="{color}" stroke-width="{}" d="{d}"/>"#,
            px(style.stroke_width)
        );
    }

    if let Some(t) = &scene.triangle {
        let pts: Vec<String> = t.vertices().iter().map(|p| format!("{},{}", num(p.x), num(p.y))).collect();
        let _ = writeln!(
            svg,
            r#"<polygon class="triangle" points="{}" fill="none" stroke="{triangle_color}" stroke-width="{}"/>"#,
            pts.join(" "),
            px(thin)
        );
    }
    svg.push_str("</g>\n</svg>\n");
    Ok(svg)
}

/// `frames` documents showing the full locus of `req` with the family's
/// triangle at `t = 2πi/frames`.
pub fn export_frames(req: &LocusRequest, style: &Style, frames: usize, width: u32, height: u32) -> Result<Vec<String>> {
    if frames == 0 {
        return Err(Error::InvalidParameter("frames must be at least 1".into()));
    }
    let locus = sweep_locus(req)?;
    let arrangement = (style.mode == StyleMode::RegionFill && locus.classification.kind != LocusKind::Stationary)
        .then(|| build_arrangement(std::slice::from_ref(&locus.points)));
    (0..frames)
        .into_par_iter()
        .map(|i| {
            let t = 2.0 * std::f64::consts::PI * i as f64 / frames as f64;
            let scene = Scene {
                outer: Some(req.family.outer),
                caustic: Some(req.family.caustic),
                triangle: Some(req.family.triangle_at(t)?),
                loci: vec![locus.clone()],
                arrangement: arrangement.clone(),
            };
            render_scene(&scene, style, width, height)
        })
        .collect()
}
