//! Stateless JSON request handling shared by the HTTP server and tests.
//!
//! [`dispatch`] maps `(method, path, body)` to a complete response, so the
//! server layer only moves bytes.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::centers::{derived_triangle, CenterRegistry, DerivedKind};
use crate::error::Error;
use crate::family::{make_family, FamilyKind, FamilySpec, DEFAULT_CIRCUMCIRCLE_FREE};
use crate::locus::{sweep_locus, Classification, LocusKind, LocusRequest, LocusTarget, DEFAULT_SAMPLES};
use crate::render::{render_scene, Scene, Style, StyleMode};
use crate::session::{decode, MAX_SAMPLES};

pub const JSON: &str = "application/json";
pub const SVG: &str = "image/svg+xml";
pub const DEFAULT_WIDTH: u32 = 800;
pub const DEFAULT_HEIGHT: u32 = 600;

/// Every code an [`ApiError`] can carry.
pub const ERROR_CODES: [&str; 17] = [
    "PointInsideConic",
    "InvalidAspect",
    "FreeParamOutOfRange",
    "InvalidParameter",
    "DegenerateTriangle",
    "UnknownCenter",
    "CenterAtInfinity",
    "DegenerateDerived",
    "InsufficientPoints",
    "AllSamplesDegenerate",
    "EmptyScene",
    "CorruptBlob",
    "UnsupportedVersion",
    "OutOfRange",
    "InvalidRequest",
    "NotFound",
    "MethodNotAllowed",
];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ApiError {
    pub code: String,
    pub message: String,
    pub http_status: u16,
}

impl ApiError {
    fn new(code: &str, message: impl Into<String>, http_status: u16) -> Self {
        ApiError { code: code.into(), message: message.into(), http_status }
    }
}

impl From<Error> for ApiError {
    fn from(e: Error) -> Self {
        ApiError::new(e.code(), e.to_string(), e.http_status())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ApiResponse {
    pub status: u16,
    pub content_type: &'static str,
    pub body: String,
}

impl ApiResponse {
    fn json(value: &impl Serialize) -> Self {
        ApiResponse { status: 200, content_type: JSON, body: serde_json::to_string(value).expect("serializable") }
    }
}

impl From<ApiError> for ApiResponse {
    fn from(e: ApiError) -> Self {
        ApiResponse {
            status: e.http_status,
            content_type: JSON,
            body: serde_json::to_string(&e).expect("serializable"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyParams {
    pub kind: FamilyKind,
    pub a: f64,
    pub b: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub free: Option<f64>,
}

impl FamilyParams {
    pub fn build(&self) -> Result<FamilySpec, Error> {
        make_family(self.kind, self.a, self.b, self.free)
    }
}

fn default_samples() -> usize {
    DEFAULT_SAMPLES
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LocusParams {
    pub family: FamilyParams,
    pub target: LocusTarget,
    #[serde(default)]
    pub derived: DerivedKind,
    #[serde(default = "default_samples")]
    pub samples: usize,
}

impl LocusParams {
    pub fn request(&self) -> Result<LocusRequest, Error> {
        if self.samples > MAX_SAMPLES {
            return Err(Error::InvalidParameter(format!("samples {} exceeds {MAX_SAMPLES}", self.samples)));
        }
        let req =
            LocusRequest::new(self.family.build()?, self.target).with_derived(self.derived).with_samples(self.samples);
        req.validate()?;
        Ok(req)
    }
}

/// Classification as exposed by the service and the CLI.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationView {
    pub kind: LocusKind,
    pub conic_residual: f64,
    pub quartic_residual: f64,
    pub self_intersections: usize,
}

impl From<&Classification> for ClassificationView {
    fn from(c: &Classification) -> Self {
        ClassificationView {
            kind: c.kind,
            conic_residual: c.conic_residual,
            quartic_residual: c.quartic_residual,
            self_intersections: c.self_intersections,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocusResponse {
    pub points: Vec<[f64; 2]>,
    pub classification: ClassificationView,
    pub dropped_samples: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TriangleParams {
    pub family: FamilyParams,
    pub t: f64,
    #[serde(default)]
    pub derived: DerivedKind,
    #[serde(default)]
    pub centers: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TriangleResponse {
    pub vertices: [[f64; 2]; 3],
    pub porism_residual: f64,
    /// Keyed by center index; `null` when the center is at infinity.
    pub centers: BTreeMap<String, Option<[f64; 2]>>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StyleParams {
    pub mode: Option<StyleMode>,
    pub stroke_width: Option<f64>,
    pub background: Option<String>,
    pub palette_seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RenderParams {
    /// Encoded experiment state; alternative to `request`.
    pub state: Option<String>,
    pub request: Option<LocusParams>,
    pub style: Option<StyleParams>,
    pub width: Option<u32>,
    pub height: Option<u32>,
    /// Family parameter of the snapshot triangle.
    pub t: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FreeParamSchema {
    pub required: bool,
    /// Open interval `(lower, upper)`, scaled by `a` when `relative_to_a`.
    pub lower: f64,
    pub upper: f64,
    pub relative_to_a: bool,
    pub default: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamsSchema {
    pub a: String,
    pub b: String,
    pub requires_circle: bool,
    pub free: Option<FreeParamSchema>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyInfo {
    pub kind: FamilyKind,
    pub params_schema: ParamsSchema,
    pub expected_stationary_center: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CenterInfo {
    pub k: u32,
    pub name: String,
}

pub fn families() -> Vec<FamilyInfo> {
    FamilyKind::ALL
        .iter()
        .map(|&kind| {
            let free = match kind {
                FamilyKind::Circumcircle => Some(FreeParamSchema {
                    required: false,
                    lower: 0.0,
                    upper: 1.0,
                    relative_to_a: false,
                    default: Some(DEFAULT_CIRCUMCIRCLE_FREE),
                }),
                FamilyKind::Generic => {
                    Some(FreeParamSchema { required: true, lower: 0.0, upper: 1.0, relative_to_a: true, default: None })
                }
                _ => None,
            };
            FamilyInfo {
                kind,
                params_schema: ParamsSchema {
                    a: "number > 0".into(),
                    b: "number > 0".into(),
                    requires_circle: kind == FamilyKind::Circumcircle,
                    free,
                },
                expected_stationary_center: kind.expected_stationary_center(),
            }
        })
        .collect()
}

pub fn centers() -> Vec<CenterInfo> {
    CenterRegistry::global().listing().into_iter().map(|(k, name)| CenterInfo { k, name }).collect()
}

pub fn locus(params: &LocusParams) -> Result<LocusResponse, Error> {
    let l = sweep_locus(&params.request()?)?;
    Ok(LocusResponse {
        points: l.points.iter().map(|p| [p.x, p.y]).collect(),
        classification: (&l.classification).into(),
        dropped_samples: l.dropped,
    })
}

pub fn triangle(params: &TriangleParams) -> Result<TriangleResponse, Error> {
    if !params.t.is_finite() {
        return Err(Error::InvalidParameter(format!("t must be finite, got {}", params.t)));
    }
    let family = params.family.build()?;
    let reference = family.triangle_at(params.t)?;
    let porism_residual = family.porism_residual(params.t)?;
    let tri = derived_triangle(&reference, params.derived)?;
    let registry = CenterRegistry::global();
    let mut centers = BTreeMap::new();
    for &k in &params.centers {
        let pos = match registry.position(&tri, k) {
            Ok(p) => Some([p.x, p.y]),
            Err(Error::CenterAtInfinity(_)) => None,
            Err(e) => return Err(e),
        };
        centers.insert(k.to_string(), pos);
    }
    Ok(TriangleResponse { vertices: tri.vertices().map(|p| [p.x, p.y]), porism_residual, centers })
}

pub fn render(params: &RenderParams) -> Result<String, Error> {
    let (req, mut style) = match (&params.state, &params.request) {
        (Some(blob), None) => {
            let s = decode(blob)?;
            (s.locus_request()?, s.style())
        }
        (None, Some(r)) => (r.request()?, Style::default()),
        _ => return Err(Error::InvalidParameter("exactly one of state and request is required".into())),
    };
    if let Some(sp) = &params.style {
        if let Some(mode) = sp.mode {
            style = Style::new(mode).with_seed(style.palette_seed);
        }
        if let Some(w) = sp.stroke_width {
            style.stroke_width = w;
        }
        if let Some(bg) = &sp.background {
            if !is_color(bg) {
                return Err(Error::InvalidParameter(format!("background must be #rrggbb, got {bg:?}")));
            }
            style.background = bg.clone();
        }
        if let Some(seed) = sp.palette_seed {
            style.palette_seed = seed;
        }
    }
    let t = params.t.unwrap_or(0.0);
    if !t.is_finite() {
        return Err(Error::InvalidParameter(format!("t must be finite, got {t}")));
    }
    let locus = sweep_locus(&req)?;
    let scene = Scene {
        outer: Some(req.family.outer),
        caustic: Some(req.family.caustic),
        triangle: Some(req.family.triangle_at(t)?),
        loci: vec![locus],
        arrangement: None,
    };
    render_scene(&scene, &style, params.width.unwrap_or(DEFAULT_WIDTH), params.height.unwrap_or(DEFAULT_HEIGHT))
}

fn is_color(s: &str) -> bool {
    s.len() == 7 && s.starts_with('#') && s[1..].bytes().all(|c| c.is_ascii_hexdigit())
}

fn parse<'a, T: Deserialize<'a>>(body: &'a str) -> Result<T, ApiError> {
    serde_json::from_str(body).map_err(|e| ApiError::new("InvalidRequest", format!("malformed request body: {e}"), 400))
}

fn respond<T: Serialize>(r: Result<T, Error>) -> ApiResponse {
    match r {
        Ok(v) => ApiResponse::json(&v),
        Err(e) => ApiError::from(e).into(),
    }
}

/// Handles one request. Paths are matched exactly after stripping a query string.
pub fn dispatch(method: &str, path: &str, body: &str) -> ApiResponse {
    let path = path.split('?').next().unwrap_or(path);
    let method = method.to_ascii_uppercase();
    let allowed = match path {
        "/api/families" | "/api/centers" => "GET",
        "/api/locus" | "/api/triangle" | "/api/render" => "POST",
        p if p.starts_with("/api/state/") => "GET",
        _ => return ApiError::new("NotFound", format!("no route for {path}"), 404).into(),
    };
    if method != allowed {
        return ApiError::new("MethodNotAllowed", format!("{path} accepts {allowed} only"), 405).into();
    }
    match path {
        "/api/families" => ApiResponse::json(&families()),
        "/api/centers" => ApiResponse::json(&centers()),
        "/api/locus" => match parse::<LocusParams>(body) {
            Ok(p) => respond(locus(&p)),
            Err(e) => e.into(),
        },
        "/api/triangle" => match parse::<TriangleParams>(body) {
            Ok(p) => respond(triangle(&p)),
            Err(e) => e.into(),
        },
        "/api/render" => match parse::<RenderParams>(body).map(|p| render(&p)) {
            Ok(Ok(svg)) => ApiResponse { status: 200, content_type: SVG, body: svg },
            Ok(Err(e)) => ApiError::from(e).into(),
            Err(e) => e.into(),
        },
        _ => {
            let blob = &path["/api/state/".len()..];
            respond(decode(blob))
        }
    }
}

/// JSON value of an error, for callers that print rather than serve it.
pub fn error_json(e: &Error) -> serde_json::Value {
    json!(ApiError::from(e.clone()))
}
