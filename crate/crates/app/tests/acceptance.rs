//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any
//! failure. Oracles here are computed independently of the engine wherever
//! the engine's own answer would otherwise be checked against itself.

use std::f64::consts::PI;
use std::process::Command;

use poncelet::arrangement::build_arrangement;
use poncelet::centers::{center_position, CenterRegistry, DerivedKind};
use poncelet::conic::boundary_residual;
use poncelet::session::{decode, encode, ExperimentState, MAX_SAMPLES, SCHEMA_VERSION};
use poncelet::{
    classify_locus, hausdorff_distance, make_family, sweep_locus, sweep_locus_refined, FamilyKind, FamilySpec,
    LocusKind, LocusRequest, LocusTarget, Point2, StyleMode, Triangle,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn family(kind: FamilyKind, a: f64, b: f64, free: Option<f64>) -> FamilySpec {
    make_family(kind, a, b, free).unwrap_or_else(|e| panic!("{kind:?} ({a}, {b}): {e}"))
}

fn locus(f: &FamilySpec, target: LocusTarget, derived: DerivedKind, samples: usize) -> poncelet::Locus {
    sweep_locus(&LocusRequest::new(f.clone(), target).with_derived(derived).with_samples(samples)).unwrap()
}

fn porism_closure() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst_porism: f64 = 0.0;
    let mut worst_boundary: f64 = 0.0;
    let mut cases = Vec::new();
    for (a, b) in [(1.5, 1.0), (2.0, 1.0)] {
        cases.push(family(FamilyKind::Confocal, a, b, None));
        cases.push(family(FamilyKind::Incircle, a, b, None));
        cases.push(family(FamilyKind::Homothetic, a, b, None));
        cases.push(family(FamilyKind::Dual, a, b, None));
        cases.push(family(FamilyKind::Generic, a, b, Some(0.8 * a)));
    }
    cases.push(family(FamilyKind::Circumcircle, 1.0, 1.0, None));
    for f in &cases {
        let scale = f.scale();
        for _ in 0..100 {
            let t = rng.gen_range(0.0..2.0 * PI);
            worst_porism = worst_porism.max(f.porism_residual(t).unwrap() / scale);
            let tri = f.triangle_at(t).unwrap();
            for v in tri.vertices() {
                worst_boundary = worst_boundary.max(boundary_residual(&f.outer, v) / scale);
            }
        }
    }
    check(
        worst_porism < 1e-9 && worst_boundary < 1e-10,
        format!(
            "{} families, max porism residual {worst_porism:.2e}, max boundary residual {worst_boundary:.2e}",
            cases.len()
        ),
    )
}

fn stationary_centers() -> Outcome {
    let pairs = [
        (FamilyKind::Confocal, 9),
        (FamilyKind::Incircle, 1),
        (FamilyKind::Circumcircle, 3),
        (FamilyKind::Homothetic, 2),
        (FamilyKind::Dual, 4),
        (FamilyKind::Excentral, 6),
    ];
    let mut report = Vec::new();
    let mut ok = true;
    for (kind, k) in pairs {
        let shapes: &[(f64, f64)] =
            if kind == FamilyKind::Circumcircle { &[(1.0, 1.0)] } else { &[(1.5, 1.0), (2.0, 1.0)] };
        let mut worst: f64 = 0.0;
        for &(a, b) in shapes {
            let f = family(kind, a, b, None);
            for i in 0..64 {
                let t = 2.0 * PI * i as f64 / 64.0;
                let p = center_position(&f.triangle_at(t).unwrap(), k).unwrap();
                worst = worst.max(p.norm() / f.scale());
            }
        }
        ok &= worst < 1e-7;
        report.push(format!("{}/X{k} {worst:.1e}", kind.name()));
    }
    check(ok, report.join(", "))
}

fn four_elliptic_loci() -> Outcome {
    let f = family(FamilyKind::Confocal, 2.0, 1.0, None);
    let mut ok = true;
    let mut report = Vec::new();
    for k in 1..=4 {
        let c = locus(&f, LocusTarget::Center(k), DerivedKind::Reference, 720).classification;
        ok &= c.kind == LocusKind::Ellipse && c.conic_residual < 1e-7;
        report.push(format!("X{k} {} {:.1e}", c.kind.name(), c.conic_residual));
    }
    check(ok, report.join(", "))
}

fn feuerbach_is_caustic() -> Outcome {
    let f = family(FamilyKind::Confocal, 2.0, 1.0, None);
    let x11 = sweep_locus_refined(&LocusRequest::new(f.clone(), LocusTarget::Center(11)).with_samples(720)).unwrap();
    let caustic = f.caustic.sample(720);
    let d = hausdorff_distance(&x11.points, &caustic) / f.scale();
    check(d < 1e-6, format!("hausdorff {d:.2e}"))
}

fn symmedian_quartic() -> Outcome {
    let f = family(FamilyKind::Confocal, 2.0, 1.0, None);
    let c = locus(&f, LocusTarget::Center(6), DerivedKind::Reference, 720).classification;
    check(
        c.kind == LocusKind::Nonconic && c.conic_residual > 1e-4 && c.quartic_residual < 1e-8,
        format!("{} conic {:.2e} quartic {:.2e}", c.kind.name(), c.conic_residual, c.quartic_residual),
    )
}

fn x59_self_intersects() -> Outcome {
    let f = family(FamilyKind::Confocal, 2.0, 1.0, None);
    let c = locus(&f, LocusTarget::Center(59), DerivedKind::Reference, 720).classification;
    check(c.self_intersections >= 1, format!("{} crossings", c.self_intersections))
}

fn orthic_feuerbach_transitions() -> Outcome {
    let mut outcomes = Vec::new();
    for ratio in [1.1, 1.25, 1.5, 2.0] {
        let f = family(FamilyKind::Confocal, ratio, 1.0, None);
        let c = locus(&f, LocusTarget::Center(11), DerivedKind::Orthic, 720).classification;
        outcomes.push((ratio, c.kind, c.self_intersections));
    }
    let mut distinct: Vec<(LocusKind, usize)> = outcomes.iter().map(|o| (o.1, o.2)).collect();
    distinct.sort_by_key(|o| (o.0 as u8, o.1));
    distinct.dedup();
    let detail = outcomes.iter().map(|(r, k, s)| format!("a/b={r}: {} x{s}", k.name())).collect::<Vec<_>>().join(", ");
    check(distinct.len() >= 2, detail)
}

fn circle_incircle_is_stationary() -> Outcome {
    let f = family(FamilyKind::Incircle, 1.0, 1.0, None);
    let moving: Vec<String> = CenterRegistry::global()
        .indices()
        .filter(|&k| {
            locus(&f, LocusTarget::Center(k), DerivedKind::Reference, 720).classification.kind != LocusKind::Stationary
        })
        .map(|k| format!("X{k}"))
        .collect();
    let n = CenterRegistry::global().indices().count();
    check(
        moving.is_empty(),
        if moving.is_empty() { format!("{n} centers stationary") } else { format!("moving: {}", moving.join(" ")) },
    )
}

fn medial_vertex_ellipse() -> Outcome {
    let f = family(FamilyKind::Homothetic, 2.0, 1.0, None);
    let c = locus(&f, LocusTarget::Vertex(1), DerivedKind::Medial, 720).classification;
    let geom = c.conic_coefficients.and_then(|k| k.ellipse_geometry());
    match geom {
        Some(g) => {
            let (sx, sy) = g.axis_aligned_semi_axes();
            let err = ((sx - 1.0).abs()).max((sy - 0.5).abs()).max(g.center.norm()) / f.scale();
            check(c.kind == LocusKind::Ellipse && err < 1e-6, format!("{} semi-axes ({sx:.9}, {sy:.9})", c.kind.name()))
        }
        None => Err(format!("{} without elliptic coefficients", c.kind.name())),
    }
}

fn classifier_oracle() -> Outcome {
    let n = 360;
    let ring = |rx: f64, ry: f64| -> Vec<Point2> {
        (0..n)
            .map(|i| {
                let t = 2.0 * PI * i as f64 / n as f64;
                Point2::new(rx * t.cos(), ry * t.sin())
            })
            .collect()
    };
    let ellipse = classify_locus(&ring(2.0, 1.0), 2.0).unwrap();
    let circle = classify_locus(&ring(1.0, 1.0), 1.0).unwrap();
    let line: Vec<Point2> =
        (0..n).map(|i| Point2::new(0.3 + i as f64 / 100.0, -0.7 + 2.0 * i as f64 / 100.0)).collect();
    let segment = classify_locus(&line, 1.0).unwrap();
    let still = classify_locus(&vec![Point2::new(0.25, -1.5); n], 1.0).unwrap();
    check(
        ellipse.kind == LocusKind::Ellipse
            && ellipse.conic_residual < 1e-12
            && circle.kind == LocusKind::Circle
            && segment.kind == LocusKind::Segment
            && still.kind == LocusKind::Stationary,
        format!(
            "{} ({:.1e}), {}, {}, {}",
            ellipse.kind.name(),
            ellipse.conic_residual,
            circle.kind.name(),
            segment.kind.name(),
            still.kind.name()
        ),
    )
}

/// Crossing-number test, written out here rather than borrowed from the engine.
fn inside(poly: &[Point2], p: Point2) -> bool {
    let mut odd = false;
    let mut j = poly.len() - 1;
    for i in 0..poly.len() {
        let (u, v) = (poly[i], poly[j]);
        if (u.y > p.y) != (v.y > p.y) && p.x < u.x + (p.y - u.y) * (v.x - u.x) / (v.y - u.y) {
            odd = !odd;
        }
        j = i;
    }
    odd
}

fn arrangement_check(name: &str, curve: Vec<Point2>, seed: u64) -> (bool, String) {
    let arr = build_arrangement(std::slice::from_ref(&curve));
    let euler = arr.vertices.len() as i64 - arr.edge_count() as i64 + arr.faces.len() as i64;
    let euler_ok = euler == 1 + arr.components as i64;
    let area: f64 = arr.bounded_faces().map(|(_, f)| f.area).sum();
    let (lo, hi) =
        curve.iter().fold((Point2::new(f64::MAX, f64::MAX), Point2::new(f64::MIN, f64::MIN)), |(lo, hi), p| {
            (Point2::new(lo.x.min(p.x), lo.y.min(p.y)), Point2::new(hi.x.max(p.x), hi.y.max(p.y)))
        });
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let trials = 100_000;
    let hits = (0..trials)
        .filter(|_| inside(&curve, Point2::new(rng.gen_range(lo.x..hi.x), rng.gen_range(lo.y..hi.y))))
        .count();
    let mc = hits as f64 / trials as f64 * (hi.x - lo.x) * (hi.y - lo.y);
    let area_ok = (area - mc).abs() < 0.01 * mc;
    (
        euler_ok && area_ok,
        format!(
            "{name}: V-E+F={euler} C={} faces={} area {area:.5} vs MC {mc:.5}",
            arr.components,
            arr.bounded_face_count()
        ),
    )
}

fn arrangement_soundness() -> Outcome {
    let f = family(FamilyKind::Confocal, 2.0, 1.0, None);
    let x59 = locus(&f, LocusTarget::Center(59), DerivedKind::Reference, 720).points;
    let eight: Vec<Point2> = (0..500)
        .map(|i| {
            let t = 2.0 * PI * (i as f64 + 0.25) / 500.0;
            Point2::new(t.sin(), t.sin() * t.cos())
        })
        .collect();
    let (ok1, d1) = arrangement_check("X59", x59, 11);
    let (ok2, d2) = arrangement_check("figure-eight", eight, 12);
    check(ok1 && ok2, format!("{d1}; {d2}"))
}

fn render_once(out: &std::path::Path) -> Vec<u8> {
    let status = Command::new(env!("CARGO_BIN_EXE_poncelet"))
        .args(["render", "--family", "confocal", "-a", "2", "-b", "1", "--center", "59", "--style", "region_fill"])
        .args(["--seed", "42", "--t", "0.7", "-o"])
        .arg(out)
        .status()
        .expect("run poncelet");
    assert!(status.success(), "render exited with {status}");
    std::fs::read(out).unwrap()
}

fn random_state(rng: &mut ChaCha8Rng) -> ExperimentState {
    let family = FamilyKind::ALL[rng.gen_range(0..FamilyKind::ALL.len())];
    let mut a = rng.gen_range(1.0..4.0);
    let b = rng.gen_range(0.5..a);
    let free = match family {
        FamilyKind::Circumcircle => {
            a = b;
            Some(rng.gen_range(0.05..0.95))
        }
        FamilyKind::Generic => Some(rng.gen_range(0.05..0.95) * a),
        _ => None,
    };
    let indices: Vec<u32> = CenterRegistry::global().indices().collect();
    let target = if rng.gen_bool(0.7) {
        LocusTarget::Center(indices[rng.gen_range(0..indices.len())])
    } else {
        LocusTarget::Vertex(rng.gen_range(1..=3))
    };
    ExperimentState {
        schema_version: SCHEMA_VERSION,
        family,
        a,
        b,
        free,
        target,
        derived: DerivedKind::ALL[rng.gen_range(0..DerivedKind::ALL.len())],
        samples: rng.gen_range(16..=MAX_SAMPLES),
        style: StyleMode::ALL[rng.gen_range(0..StyleMode::ALL.len())],
        palette_seed: rng.gen(),
        speed: rng.gen_range(0.01..20.0),
    }
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let first = render_once(&dir.path().join("one.svg"));
    let second = render_once(&dir.path().join("two.svg"));
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut round_trips = 0;
    for _ in 0..1000 {
        let s = random_state(&mut rng);
        let blob = encode(&s);
        if decode(&blob).as_ref() == Ok(&s) && encode(&s) == blob {
            round_trips += 1;
        }
    }
    check(
        first == second && !first.is_empty() && round_trips == 1000,
        format!("svg {} bytes identical={}, {round_trips}/1000 states round-trip", first.len(), first == second),
    )
}

/// Circumradius, inradius and circumcenter from first principles.
struct Reference {
    circumcenter: Point2,
    incenter: Point2,
    circumradius: f64,
    inradius: f64,
}

fn reference(t: &Triangle) -> Reference {
    let [p, q, r] = t.vertices();
    let (a, b, c) = (q.distance(r), r.distance(p), p.distance(q));
    let d = 2.0 * (p.x * (q.y - r.y) + q.x * (r.y - p.y) + r.x * (p.y - q.y));
    let circumcenter = Point2::new(
        (p.norm_sq() * (q.y - r.y) + q.norm_sq() * (r.y - p.y) + r.norm_sq() * (p.y - q.y)) / d,
        (p.norm_sq() * (r.x - q.x) + q.norm_sq() * (p.x - r.x) + r.norm_sq() * (q.x - p.x)) / d,
    );
    let area = ((q - p).cross(r - p) / 2.0).abs();
    let s = a + b + c;
    Reference {
        circumcenter,
        incenter: (p * a + q * b + r * c) * (1.0 / s),
        circumradius: a * b * c / (4.0 * area),
        inradius: 2.0 * area / s,
    }
}

fn euler_and_feuerbach() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let mut worst: f64 = 0.0;
    let mut tested = 0;
    while tested < 100 {
        let v: [Point2; 3] = std::array::from_fn(|_| Point2::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        // Keep every angle above 5° and away from isosceles so X11 is well conditioned.
        let sides = [v[1].distance(v[2]), v[2].distance(v[0]), v[0].distance(v[1])];
        let area = ((v[1] - v[0]).cross(v[2] - v[0]) / 2.0).abs();
        let min_sin = (0..3).map(|i| 2.0 * area / (sides[(i + 1) % 3] * sides[(i + 2) % 3])).fold(f64::MAX, f64::min);
        let spread = (0..3).map(|i| (sides[i] - sides[(i + 1) % 3]).abs()).fold(f64::MAX, f64::min);
        if min_sin < (5.0f64).to_radians().sin() || spread < 0.05 {
            continue;
        }
        let t = Triangle::new(v[0], v[1], v[2]).unwrap();
        tested += 1;
        let scale = t.bbox_extent();
        let r = reference(&t);
        let x = |k| center_position(&t, k).unwrap();
        let (x1, x2, x3, x4, x5, x11) = (x(1), x(2), x(3), x(4), x(5), x(11));
        let centroid = (v[0] + v[1] + v[2]) * (1.0 / 3.0);
        let errors = [
            x1.distance(r.incenter),
            x2.distance(centroid),
            x3.distance(r.circumcenter),
            // Euler line: H = A + B + C − 2O, G = (2O + H)/3, N = (O + H)/2.
            x4.distance(v[0] + v[1] + v[2] - r.circumcenter * 2.0),
            x2.distance((x3 * 2.0 + x4) * (1.0 / 3.0)),
            x5.distance(x3.midpoint(x4)),
            // Feuerbach: the incircle touches the nine-point circle at X11.
            (x11.distance(x1) - r.inradius).abs(),
            (x11.distance(x5) - r.circumradius / 2.0).abs(),
            (x1.distance(x5) - (r.circumradius / 2.0 - r.inradius)).abs(),
        ];
        worst = worst.max(errors.iter().fold(0.0, |m: f64, e| m.max(*e)) / scale);
    }
    check(worst < 1e-10, format!("{tested} triangles, max relative error {worst:.2e}"))
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 13] = [
        ("porism closure", porism_closure),
        ("stationary-center table", stationary_centers),
        ("four elliptic loci", four_elliptic_loci),
        ("X11 locus equals the caustic", feuerbach_is_caustic),
        ("X6 quartic", symmedian_quartic),
        ("X59 self-intersection", x59_self_intersects),
        ("orthic X11 topology transitions", orthic_feuerbach_transitions),
        ("incircle a=b symmetry", circle_incircle_is_stationary),
        ("medial-vertex ellipse", medial_vertex_ellipse),
        ("classifier oracle", classifier_oracle),
        ("arrangement soundness", arrangement_soundness),
        ("determinism", determinism),
        ("Euler line and Feuerbach", euler_and_feuerbach),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|e| {
            let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {detail}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
