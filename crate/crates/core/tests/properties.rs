use std::f64::consts::PI;

use isophote::canal::{canal_surface, canal_unit_normal, envelope_residuals, Branch, CanalSpec, RadiusFunction};
use isophote::catalog;
use isophote::curve::{arc_length, classify_helix, reparametrize_arclength, HelixKind, SpaceCurve};
use isophote::io::{parse_scene, serialize_scene};
use isophote::isophote::{angle_between, mu_invariant, recover_axis, trace_isophote, TraceOptions};
use isophote::surface::{darboux_along, frame_identity_residuals, CurveOnSurface};
use isophote::tolerance::Stats;
use isophote::{Tolerances, Vec2, Vec3};
use proptest::prelude::*;

fn tol() -> Tolerances {
    Tolerances::default()
}

fn elliptic_helix(a: f64, b: f64, c: f64) -> SpaceCurve {
    SpaceCurve::from_fn(move |t| Vec3::new(a * t.cos(), b * t.sin(), c * t), (0.0, 3.0))
}

fn unit(x: f64, y: f64, z: f64) -> Vec3 {
    Vec3::new(x, y, z).normalize()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn arclength_reparametrization_is_idempotent(a in 0.5..2.0f64, b in 0.5..2.0f64, c in 0.1..1.0f64) {
        let t = tol();
        let curve = elliptic_helix(a, b, c);
        let once = reparametrize_arclength(&curve, 1e-12, &t).unwrap();
        let (s0, s1) = once.range();
        prop_assert!(s0.abs() < 1e-15);
        prop_assert!((s1 - arc_length(&curve, 1e-12)).abs() < 1e-9);
        let twice = reparametrize_arclength(&once, 1e-12, &t).unwrap();
        prop_assert!((twice.range().1 - s1).abs() < 1e-9);
        for k in 0..=16 {
            let s = s1 * k as f64 / 16.0;
            prop_assert!((once.speed(s) - 1.0).abs() < 1e-7);
            prop_assert!((once.point(s) - twice.point(s)).norm() < 1e-9);
        }
    }

    #[test]
    fn darboux_identities_on_torus_lines(u0 in -3.0..3.0f64, v0 in -3.0..3.0f64, ang in 0.1..1.4f64) {
        let t = tol();
        let c = CurveOnSurface::line(catalog::torus(2.0, 0.5), Vec2::new(u0, v0), Vec2::new(ang.cos(), ang.sin()), (0.0, 2.0))
            .arclength(1e-12, &t)
            .unwrap();
        for smp in darboux_along(&c, 24, &t).unwrap() {
            let r = frame_identity_residuals(&smp);
            prop_assert!(r.orthonormality < 1e-12);
            prop_assert!(r.pythagoras < 1e-9);
            // B = N x T
            prop_assert!((smp.tangent_normal - smp.normal.cross(&smp.tangent)).norm() < 1e-12);
        }
    }

    #[test]
    fn canal_envelope_identities(slope in -0.3..0.3f64, r0 in 0.05..0.3f64, s in 0.0..1.0f64, v in 0.0..(2.0 * PI), plus in any::<bool>()) {
        let t = tol();
        let spine = catalog::circular_helix(2.0, 1.0, 1.0);
        let (a, b) = spine.range();
        let branch = if plus { Branch::Plus } else { Branch::Minus };
        // r stays in [0.05, 0.3 + 0.3 * 0.1] over a short arc
        let arc = 0.1 * (b - a);
        let c0 = r0 + slope.abs() * arc;
        let spec = CanalSpec::new(spine.with_range((a, a + arc)), RadiusFunction::linear(slope, c0 - slope * a), branch, &t).unwrap();
        let x = a + s * arc;
        let [e1, e2] = envelope_residuals(&spec, x, v);
        prop_assert!(e1.abs() < 1e-12 && e2.abs() < 1e-12);
        let n = canal_surface(&spec).unit_normal(x, v, &t).unwrap();
        prop_assert!(angle_between(&n, &canal_unit_normal(&spec, x, v)) < 1e-7);
        let center = spec.spine.point(x);
        let r = spec.radius.value(x);
        prop_assert!(((spec.point(x, v) - center).norm() - r).abs() < 1e-12);
    }

    #[test]
    fn constancy_test_matches_its_definition(base in -10.0..10.0f64, spread in 0.0..1e-4f64) {
        let t = tol();
        let values: Vec<f64> = (0..32).map(|k| base + spread * (k as f64 / 31.0)).collect();
        let st = Stats::of(&values).unwrap();
        let bound = t.const_atol + t.const_rtol * st.median_abs.max(1.0);
        prop_assert_eq!(t.is_constant(&st), st.spread() <= bound);
        prop_assert!((st.spread() - spread).abs() <= 1e-12 * (1.0 + base.abs()));
    }

    #[test]
    fn circular_helices_are_both_kinds(a in 0.5..3.0f64, b in 0.2..2.0f64) {
        let v = classify_helix(&catalog::circular_helix(a, b, 1.0), 32, &tol()).unwrap();
        prop_assert_eq!(v.kind, HelixKind::Both);
        prop_assert!((v.tau_over_kappa.median - b / a).abs() < 1e-6);
    }

    #[test]
    fn slant_helices_are_not_general(a in 1.5..3.0f64, b in 0.5..1.0f64) {
        let v = classify_helix(&catalog::slant_helix(a, b), 64, &tol()).unwrap();
        prop_assert_eq!(v.kind, HelixKind::SlantHelix);
        prop_assert!((v.sigma.median - b / (a * a - b * b).sqrt()).abs() < 1e-6);
    }

    #[test]
    fn latitude_axis_is_recovered(v0 in 0.1..1.3f64, south in any::<bool>()) {
        let t = tol();
        let v0 = if south { -v0 } else { v0 };
        let c = v0.cos();
        let curve = CurveOnSurface::line(catalog::sphere(1.0), Vec2::new(-PI, v0), Vec2::new(1.0 / c, 0.0), (0.0, 2.0 * PI * c))
            .with_unit_speed(true);
        let s = darboux_along(&curve, 48, &t).unwrap();
        let p = mu_invariant(&s, &t).unwrap();
        prop_assert!(p.constant);
        prop_assert!((p.theta_estimate.cos() - v0.sin().abs()).abs() < 1e-9);
        let axis = recover_axis(&s, p.theta_estimate, &t).unwrap();
        let z = if south { -Vec3::z() } else { Vec3::z() };
        prop_assert!(axis.angle_to(&z) < 1e-8);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn traced_points_lie_on_the_level_set(x in -1.0..1.0f64, y in -1.0..1.0f64, theta in 0.4..1.5f64) {
        let t = tol();
        let d = unit(x, y, 1.0);
        let tr = trace_isophote(&catalog::torus(2.0, 0.5), d, theta, &TraceOptions::grid(48, 48), &t).unwrap();
        prop_assert!(tr.field_residual <= t.trace_tol);
        let surface = catalog::torus(2.0, 0.5);
        for p in &tr.polylines {
            for uv in &p.uv {
                let n = surface.unit_normal(uv.x, uv.y, &t).unwrap();
                prop_assert!((n.dot(&d) - theta.cos()).abs() <= t.trace_tol);
            }
        }
    }
}

fn scene_text(radius: f64, major: f64, minor: f64, d: [f64; 3], deg: f64, nu: usize, axis_tol: f64) -> String {
    format!(
        r#"
[tolerances]
axis_tol = {axis_tol:?}

[[surface]]
id = "ball"
kind = "sphere"
radius = {radius:?}

[[surface]]
id = "ring"
kind = "torus"
major = {major:?}
minor = {minor:?}

[[curve]]
id = "h"
kind = "circular_helix"
a = 2
b = 1

[[job]]
verb = "trace"
surface = "ring"
d = [{:?}, {:?}, {:?}]
theta = "{deg:?}deg"
grid = "{nu}x{nu}"

[[job]]
verb = "tube"
spine = "h"
r = 0.25
"#,
        d[0], d[1], d[2]
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn scene_round_trip(
        radius in 0.1..10.0f64,
        minor in 0.1..1.0f64,
        extra in 0.1..3.0f64,
        d in prop::array::uniform3(-1.0..1.0f64),
        deg in 1.0..179.0f64,
        nu in 8usize..300,
        axis_tol in 1e-9..1e-3f64,
    ) {
        let text = scene_text(radius, minor + extra, minor, d, deg, nu, axis_tol);
        let parsed = parse_scene(&text).unwrap();
        let canonical = serialize_scene(&parsed);
        let again = parse_scene(&canonical).unwrap();
        prop_assert_eq!(&parsed, &again);
        prop_assert_eq!(serialize_scene(&again), canonical);
    }
}
