use std::f64::consts::{FRAC_PI_2, PI};

use super::*;
use crate::catalog;
use crate::surface::{darboux_along, CurveOnSurface};
use crate::tolerance::Tolerances;
use crate::{Vec2, Vec3};

fn tol() -> Tolerances {
    Tolerances::default()
}

fn latitude(v0: f64) -> CurveOnSurface {
    let c = v0.cos();
    CurveOnSurface::line(
        catalog::sphere(1.0),
        Vec2::new(-PI, v0),
        Vec2::new(1.0 / c, 0.0),
        (0.0, 2.0 * PI * c),
    )
    .with_unit_speed(true)
}

fn cylinder_helix(a: f64, b: f64, len: f64) -> CurveOnSurface {
    let n = (a * a + b * b).sqrt();
    CurveOnSurface::line(
        catalog::cylinder(1.0, (-20.0, 20.0)),
        Vec2::new(0.0, 0.0),
        Vec2::new(a / n, b / n),
        (0.0, len),
    )
    .with_unit_speed(true)
}

#[test]
fn latitude_mu_axis_and_class() {
    let t = tol();
    let v0 = PI / 6.0;
    let s = darboux_along(&latitude(v0), 64, &t).unwrap();
    let p = mu_invariant(&s, &t).unwrap();
    assert!(p.constant);
    // oracle: <N, z> = sin v0 = cos theta
    assert!((p.theta_estimate - (FRAC_PI_2 - v0)).abs() < 1e-9);
    assert!((p.stats.unwrap().median - 1.0 / 3f64.sqrt()).abs() < 1e-9);
    let axis = recover_axis(&s, p.theta_estimate, &t).unwrap();
    assert!(axis.angle_to(&Vec3::z()) < 1e-8);
    assert!(axis.residual < 1e-8);
    assert!(axis_derivative_check(&s, &axis, &t).unwrap() < 1e-8);
    let c = classify_isophote(&s, &p, &t).unwrap();
    assert_eq!(c.kind, IsophoteKind::LineOfCurvaturePlanar);
    assert!(c.consistent, "{:?}", c.notes);
    let g = gauss_map_image(&s, &t).unwrap();
    assert!(g.plane_fit_residual < 1e-9);
    for k in &g.kbar_g {
        assert!((k - 1.0 / 3f64.sqrt()).abs() < 1e-8);
    }
    let tc = tan_theta_consistency(&s, p.theta_estimate, &t).unwrap();
    assert!(tc.selected_residual < 1e-5);
}

#[test]
fn tilted_theta_fails_axis_certification() {
    // the equator is a silhouette; pretending theta = pi/3 makes the axis field rotate
    let t = tol();
    let s = darboux_along(&latitude(0.0), 64, &t).unwrap();
    let fake = IsophoteAxis {
        d: Vec3::z(),
        theta: PI / 3.0,
        sign_branch: SignBranch::Plus,
        residual: 0.0,
        other_residual: 0.0,
    };
    assert!(axis_derivative_check(&s, &fake, &t).unwrap() > 1e-2);
    assert!(matches!(
        recover_axis(&s, PI / 3.0, &t),
        Err(crate::GeomError::NoConsistentAxis { .. })
    ));
}

#[test]
fn equator_silhouette_axis_is_b() {
    let t = tol();
    let s = darboux_along(&latitude(0.0), 32, &t).unwrap();
    let p = mu_invariant(&s, &t).unwrap();
    assert!((p.theta_estimate - FRAC_PI_2).abs() < 1e-10);
    let axis = recover_axis(&s, p.theta_estimate, &t).unwrap();
    for x in &s {
        assert!((x.tangent_normal.dot(&axis.d).abs() - 1.0).abs() < 1e-10);
    }
}

#[test]
fn cylinder_helix_is_geodesic_slant_helix() {
    let t = tol();
    let s = darboux_along(&cylinder_helix(1.0, 0.7, 6.0), 80, &t).unwrap();
    let p = mu_invariant(&s, &t).unwrap();
    assert!(p.constant);
    assert!((p.theta_estimate - FRAC_PI_2).abs() < 1e-8);
    let c = classify_isophote(&s, &p, &t).unwrap();
    assert_eq!(c.kind, IsophoteKind::GeodesicSlantHelix);
    assert!(c.consistent, "{:?}", c.notes);
    let axis = c.evidence.axis.unwrap();
    assert!((axis.d.z.abs() - 1.0).abs() < 1e-8);
    // the recovered axis lies in the rectifying plane
    assert!(c.evidence.max_abs_n_dot_d.unwrap() < 1e-8);
}

#[test]
fn example_curve_on_its_rectifying_developable() {
    let t = tol();
    let gamma = catalog::slant_helix(2.0, 1.0);
    let surf = catalog::rectifying_developable(&gamma, 0.5);
    let (a, b) = gamma.range();
    let curve = CurveOnSurface::line(surf, Vec2::new(0.0, a), Vec2::new(0.0, 1.0), (0.0, b - a)).with_unit_speed(true);
    let s = darboux_along(&curve, 100, &t).unwrap();
    let p = mu_invariant(&s, &t).unwrap();
    assert!(p.constant, "{:?}", p.stats);
    // oracle: sigma = b / sqrt(a^2 - b^2) and cot(theta) = sigma
    assert!((p.stats.unwrap().median.abs() - 1.0 / 3f64.sqrt()).abs() < 1e-6);
    assert!((p.theta_estimate - PI / 3.0).abs() < 1e-6);
    let c = classify_isophote(&s, &p, &t).unwrap();
    assert_eq!(c.kind, IsophoteKind::GeodesicSlantHelix);
    assert!(c.consistent, "{:?}", c.notes);
}

#[test]
fn ruling_is_a_straight_line_isophote() {
    let t = tol();
    let r = CurveOnSurface::line(
        catalog::cylinder(1.0, (-1.0, 1.0)),
        Vec2::new(PI / 3.0, -1.0),
        Vec2::new(0.0, 1.0),
        (0.0, 2.0),
    )
    .with_unit_speed(true);
    let s = darboux_along(&r, 16, &t).unwrap();
    assert!(matches!(
        mu_invariant(&s, &t),
        Err(crate::GeomError::DegenerateNormalData { .. })
    ));
    let p = MuProfile::for_constant_normal(&s, PI / 3.0, &t).unwrap();
    let c = classify_isophote(&s, &p, &t).unwrap();
    assert_eq!(c.kind, IsophoteKind::AsymptoticGeneralHelix);
    assert!(c.evidence.straight_line);
    let axis = recover_axis_constant_normal(&s, PI / 3.0, Vec3::x(), &t).unwrap();
    assert!(axis.angle_to(&Vec3::x()) < 1e-12);
}

#[test]
fn silhouette_ruling_axis_lies_in_tangent_plane() {
    let t = tol();
    let r = CurveOnSurface::line(
        catalog::cylinder(1.0, (-1.0, 1.0)),
        Vec2::new(FRAC_PI_2, -1.0),
        Vec2::new(0.0, 1.0),
        (0.0, 2.0),
    )
    .with_unit_speed(true);
    let s = darboux_along(&r, 8, &t).unwrap();
    let axis = recover_axis_constant_normal(&s, FRAC_PI_2, Vec3::new(1.0, 0.3, 0.2), &t).unwrap();
    for x in &s {
        assert!(x.normal.dot(&axis.d).abs() < 1e-14);
        let in_plane = x.tangent * x.tangent.dot(&axis.d) + x.tangent_normal * x.tangent_normal.dot(&axis.d);
        assert!((in_plane - axis.d).norm() < 1e-14);
    }
}

#[test]
fn non_isophote_gauss_image_is_not_planar() {
    let t = tol();
    let c = CurveOnSurface::line(
        catalog::torus(2.0, 0.5),
        Vec2::new(0.0, 0.0),
        Vec2::new(1.0, 2.0),
        (0.0, 3.0),
    )
    .arclength(1e-12, &t)
    .unwrap();
    let s = darboux_along(&c, 100, &t).unwrap();
    let p = mu_invariant(&s, &t).unwrap();
    assert!(!p.constant);
    assert!(matches!(
        classify_isophote(&s, &p, &t),
        Err(crate::GeomError::NotCertifiedIsophote { .. })
    ));
    let g = gauss_map_image(&s, &t).unwrap();
    assert!(g.plane_fit_residual > 1e-2);
    assert!(g.mu_agreement < 1e-5);
}

#[test]
fn traced_torus_isophote_round_trip() {
    let t = tol();
    let torus = catalog::torus(2.0, 0.5);
    let d = Vec3::new(0.3, -0.2, 1.0).normalize();
    let theta = 1.1;
    let tr = trace_isophote(&torus, d, theta, &TraceOptions::grid(96, 96), &t).unwrap();
    assert!(!tr.is_empty());
    let poly = tr
        .polylines
        .iter()
        .max_by(|a, b| a.length().total_cmp(&b.length()))
        .unwrap();
    let s = samples_along_polyline(&torus, d, theta, poly, 200, &t).unwrap();
    assert!(illumination_residual(&s, &d, theta) < 1e-12);
    let p = mu_invariant(&s, &t).unwrap();
    assert!(p.constant, "{:?}", p.stats);
    assert!((p.theta_estimate - theta).abs() < 1e-6);
    let axis = recover_axis(&s, p.theta_estimate, &t).unwrap();
    assert!(axis.angle_to(&d) < 1e-6);
    let g = gauss_map_image(&s, &t).unwrap();
    assert!(g.plane_fit_residual < 1e-6);
    assert!(g.mu_agreement < 1e-5);
}
