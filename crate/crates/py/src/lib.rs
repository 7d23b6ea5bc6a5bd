//! Python bindings. Points cross the boundary as `(x, y)` tuples and
//! triangles as three of them.

use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use poncelet::render::{render_scene, Scene, Style, StyleMode};
use poncelet::session::ExperimentState;
use poncelet::{DerivedKind, FamilyKind, FamilySpec, LocusRequest, LocusTarget, Point2, Triangle};

create_exception!(poncelet, PonceletError, PyValueError, "Engine failure; args are (code, message).");

type Xy = (f64, f64);

fn err(e: poncelet::Error) -> PyErr {
    PonceletError::new_err((e.code(), e.to_string()))
}

fn xy(p: Point2) -> Xy {
    (p.x, p.y)
}

fn pt((x, y): Xy) -> Point2 {
    Point2::new(x, y)
}

fn triangle_from(v: [Xy; 3]) -> PyResult<Triangle> {
    Triangle::new(pt(v[0]), pt(v[1]), pt(v[2])).map_err(err)
}

fn triangle_xy(t: &Triangle) -> [Xy; 3] {
    t.vertices().map(xy)
}

fn parse<T: std::str::FromStr<Err = poncelet::Error>>(s: &str) -> PyResult<T> {
    s.parse().map_err(err)
}

/// A Poncelet triangle family between two concentric, axis-aligned ellipses.
#[pyclass(module = "poncelet", frozen)]
pub struct Family {
    spec: FamilySpec,
}

#[pymethods]
impl Family {
    #[new]
    #[pyo3(signature = (kind, a, b, free=None))]
    fn new(kind: &str, a: f64, b: f64, free: Option<f64>) -> PyResult<Self> {
        let spec = poncelet::make_family(parse::<FamilyKind>(kind)?, a, b, free).map_err(err)?;
        Ok(Family { spec })
    }

    #[getter]
    fn kind(&self) -> &'static str {
        self.spec.kind.name()
    }

    /// Semi-axes `(a, b)` of the outer ellipse.
    #[getter]
    fn outer(&self) -> Xy {
        (self.spec.outer.a(), self.spec.outer.b())
    }

    #[getter]
    fn caustic(&self) -> Xy {
        (self.spec.caustic.a(), self.spec.caustic.b())
    }

    /// Parameter span after which the triangle repeats up to relabeling.
    fn period(&self) -> PyResult<f64> {
        self.spec.period().map_err(err)
    }

    fn triangle(&self, t: f64) -> PyResult<[Xy; 3]> {
        self.spec.triangle_at(t).map(|tri| triangle_xy(&tri)).map_err(err)
    }

    fn porism_residual(&self, t: f64) -> PyResult<f64> {
        self.spec.porism_residual(t).map_err(err)
    }

    fn __repr__(&self) -> String {
        let (a, b) = self.outer();
        let (ac, bc) = self.caustic();
        format!("Family({}, outer=({a}, {b}), caustic=({ac}, {bc}))", self.kind())
    }
}

/// A swept locus with its classification.
#[pyclass(module = "poncelet", frozen, get_all)]
pub struct Locus {
    points: Vec<Xy>,
    params: Vec<f64>,
    kind: &'static str,
    conic_residual: f64,
    quartic_residual: f64,
    self_intersections: usize,
    dropped: usize,
    /// `[A, B, C, D, E, F]` of `Ax² + Bxy + Cy² + Dx + Ey + F = 0` for conic loci.
    conic_coefficients: Option<[f64; 6]>,
}

#[pymethods]
impl Locus {
    fn __len__(&self) -> usize {
        self.points.len()
    }

    fn __repr__(&self) -> String {
        format!("Locus({}, {} points, {} crossings)", self.kind, self.points.len(), self.self_intersections)
    }
}

impl From<poncelet::Locus> for Locus {
    fn from(l: poncelet::Locus) -> Self {
        let c = l.classification;
        Locus {
            points: l.points.into_iter().map(xy).collect(),
            params: l.params,
            kind: c.kind.name(),
            conic_residual: c.conic_residual,
            quartic_residual: c.quartic_residual,
            self_intersections: c.self_intersections,
            dropped: l.dropped,
            conic_coefficients: c.conic_coefficients.map(|k| k.0),
        }
    }
}

fn request(
    family: &Family,
    center: Option<u32>,
    vertex: Option<u8>,
    derived: &str,
    samples: usize,
) -> PyResult<LocusRequest> {
    let target = match (center, vertex) {
        (Some(k), None) => LocusTarget::Center(k),
        (None, Some(i)) => LocusTarget::Vertex(i),
        _ => return Err(PyValueError::new_err("pass exactly one of center and vertex")),
    };
    let req = LocusRequest::new(family.spec.clone(), target)
        .with_derived(parse::<DerivedKind>(derived)?)
        .with_samples(samples);
    req.validate().map_err(err)?;
    Ok(req)
}

/// Sweeps a center or vertex over the family. `refined` adds midpoints where
/// the curve bends sharply.
#[pyfunction]
#[pyo3(signature = (family, *, center=None, vertex=None, derived="reference", samples=720, refined=false))]
fn sweep(
    py: Python<'_>,
    family: &Family,
    center: Option<u32>,
    vertex: Option<u8>,
    derived: &str,
    samples: usize,
    refined: bool,
) -> PyResult<Locus> {
    let req = request(family, center, vertex, derived, samples)?;
    let locus = py.detach(|| if refined { poncelet::sweep_locus_refined(&req) } else { poncelet::sweep_locus(&req) });
    locus.map(Locus::from).map_err(err)
}

/// Classification of a closed point sequence; returns a dict.
#[pyfunction]
fn classify<'py>(py: Python<'py>, points: Vec<Xy>, scale: f64) -> PyResult<Bound<'py, PyAny>> {
    let pts: Vec<Point2> = points.into_iter().map(pt).collect();
    let c = poncelet::classify_locus(&pts, scale).map_err(err)?;
    json_to_py(py, &serde_json::to_string(&c).expect("serializable"))
}

/// Position of center X_k, or None when it lies at infinity.
#[pyfunction]
fn center(triangle: [Xy; 3], k: u32) -> PyResult<Option<Xy>> {
    match poncelet::center_position(&triangle_from(triangle)?, k) {
        Ok(p) => Ok(Some(xy(p))),
        Err(poncelet::Error::CenterAtInfinity(_)) => Ok(None),
        Err(e) => Err(err(e)),
    }
}

/// Indices and names of the registered centers.
#[pyfunction]
fn centers() -> Vec<(u32, String)> {
    poncelet::CenterRegistry::global().listing()
}

#[pyfunction]
fn derived_triangle(triangle: [Xy; 3], kind: &str) -> PyResult<[Xy; 3]> {
    let t = poncelet::derived_triangle(&triangle_from(triangle)?, parse(kind)?).map_err(err)?;
    Ok(triangle_xy(&t))
}

/// Symmetric Hausdorff distance between two closed curves.
#[pyfunction]
fn hausdorff(a: Vec<Xy>, b: Vec<Xy>) -> f64 {
    let a: Vec<Point2> = a.into_iter().map(pt).collect();
    let b: Vec<Point2> = b.into_iter().map(pt).collect();
    poncelet::hausdorff_distance(&a, &b)
}

/// Planar arrangement of closed curves, summarized as a dict.
#[pyfunction]
fn arrangement<'py>(py: Python<'py>, curves: Vec<Vec<Xy>>) -> PyResult<Bound<'py, PyAny>> {
    let curves: Vec<Vec<Point2>> = curves.into_iter().map(|c| c.into_iter().map(pt).collect()).collect();
    let arr = py.detach(|| poncelet::build_arrangement(&curves));
    let areas: Vec<f64> = arr.bounded_faces().map(|(_, f)| f.area).collect();
    let summary = serde_json::json!({
        "vertices": arr.vertices.len(),
        "edges": arr.edge_count(),
        "faces": arr.faces.len(),
        "components": arr.components,
        "bounded_areas": areas,
    });
    json_to_py(py, &summary.to_string())
}

/// SVG of the family, the locus and the triangle at `t`.
#[pyfunction]
#[pyo3(signature = (locus_family, *, center=None, vertex=None, derived="reference", samples=720, style="wireframe", seed=1, width=800, height=600, t=0.0))]
#[allow(clippy::too_many_arguments)]
fn render(
    py: Python<'_>,
    locus_family: &Family,
    center: Option<u32>,
    vertex: Option<u8>,
    derived: &str,
    samples: usize,
    style: &str,
    seed: u64,
    width: u32,
    height: u32,
    t: f64,
) -> PyResult<String> {
    let req = request(locus_family, center, vertex, derived, samples)?;
    let style = Style::new(parse::<StyleMode>(style)?).with_seed(seed);
    py.detach(|| {
        let scene = Scene {
            outer: Some(req.family.outer),
            caustic: Some(req.family.caustic),
            triangle: Some(req.family.triangle_at(t)?),
            loci: vec![poncelet::sweep_locus(&req)?],
            arrangement: None,
        };
        render_scene(&scene, &style, width, height)
    })
    .map_err(err)
}

fn json_to_py<'py>(py: Python<'py>, text: &str) -> PyResult<Bound<'py, PyAny>> {
    py.import("json")?.call_method1("loads", (text,))
}

/// Shareable blob for a state given as a dict.
#[pyfunction]
fn encode_state(py: Python<'_>, state: &Bound<'_, PyAny>) -> PyResult<String> {
    let text: String = py.import("json")?.call_method1("dumps", (state,))?.extract()?;
    let state: ExperimentState = serde_json::from_str(&text).map_err(|e| PyValueError::new_err(e.to_string()))?;
    state.validate().map_err(err)?;
    Ok(poncelet::encode(&state))
}

#[pyfunction]
fn decode_state<'py>(py: Python<'py>, blob: &str) -> PyResult<Bound<'py, PyAny>> {
    let state = poncelet::decode(blob).map_err(err)?;
    json_to_py(py, &serde_json::to_string(&state).expect("serializable"))
}

#[pyfunction]
fn default_state<'py>(py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
    json_to_py(py, &serde_json::to_string(&ExperimentState::default()).expect("serializable"))
}

/// Stateless HTTP handler: returns `(status, content_type, body)`.
#[pyfunction]
#[pyo3(signature = (method, path, body=""))]
fn dispatch(py: Python<'_>, method: &str, path: &str, body: &str) -> (u16, &'static str, String) {
    let res = py.detach(|| poncelet::api::dispatch(method, path, body));
    (res.status, res.content_type, res.body)
}

#[pymodule(name = "poncelet")]
pub fn poncelet_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("PonceletError", m.py().get_type::<PonceletError>())?;
    m.add_class::<Family>()?;
    m.add_class::<Locus>()?;
    m.add_function(wrap_pyfunction!(sweep, m)?)?;
    m.add_function(wrap_pyfunction!(classify, m)?)?;
    m.add_function(wrap_pyfunction!(center, m)?)?;
    m.add_function(wrap_pyfunction!(centers, m)?)?;
    m.add_function(wrap_pyfunction!(derived_triangle, m)?)?;
    m.add_function(wrap_pyfunction!(hausdorff, m)?)?;
    m.add_function(wrap_pyfunction!(arrangement, m)?)?;
    m.add_function(wrap_pyfunction!(render, m)?)?;
    m.add_function(wrap_pyfunction!(encode_state, m)?)?;
    m.add_function(wrap_pyfunction!(decode_state, m)?)?;
    m.add_function(wrap_pyfunction!(default_state, m)?)?;
    m.add_function(wrap_pyfunction!(dispatch, m)?)?;
    Ok(())
}
