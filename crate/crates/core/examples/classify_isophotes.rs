//! Classifies isophotes: a sphere latitude, a cylinder helix, a developable's geodesic and
//! a cylinder ruling.

use std::f64::consts::PI;

use isophote::catalog;
use isophote::isophote::{classify_isophote, mu_invariant, MuProfile};
use isophote::surface::{darboux_along, CurveOnSurface};
use isophote::{Tolerances, Vec2};

fn main() -> isophote::Result<()> {
    let tol = Tolerances::default();
    let lat = PI / 6.0;
    let gamma = catalog::slant_helix(2.0, 1.0);
    let (a, b) = gamma.range();
    let curves = [
        (
            "sphere latitude",
            CurveOnSurface::line(
                catalog::sphere(1.0),
                Vec2::new(-PI, lat),
                Vec2::new(1.0 / lat.cos(), 0.0),
                (0.0, 2.0 * PI * lat.cos()),
            ),
        ),
        (
            "cylinder helix",
            CurveOnSurface::line(
                catalog::cylinder(1.0, (-5.0, 5.0)),
                Vec2::zeros(),
                Vec2::new(1.0, 0.7).normalize(),
                (0.0, 6.0),
            ),
        ),
        (
            "developable geodesic",
            CurveOnSurface::line(
                catalog::rectifying_developable(&gamma, 0.5),
                Vec2::new(0.0, a),
                Vec2::new(0.0, 1.0),
                (0.0, b - a),
            ),
        ),
    ];
    for (name, c) in curves {
        let s = darboux_along(&c.with_unit_speed(true), 100, &tol)?;
        let p = mu_invariant(&s, &tol)?;
        let cls = classify_isophote(&s, &p, &tol)?;
        println!(
            "{name:21} theta = {:7.3} deg  {:?}  consistent: {}",
            p.theta_estimate.to_degrees(),
            cls.kind,
            cls.consistent
        );
    }
    let ruling = CurveOnSurface::line(
        catalog::cylinder(1.0, (-1.0, 1.0)),
        Vec2::new(PI / 3.0, -1.0),
        Vec2::new(0.0, 1.0),
        (0.0, 2.0),
    )
    .with_unit_speed(true);
    let s = darboux_along(&ruling, 16, &tol)?;
    let p = MuProfile::for_constant_normal(&s, PI / 3.0, &tol)?;
    let cls = classify_isophote(&s, &p, &tol)?;
    println!(
        "{:21} {:?}, straight line: {}",
        "cylinder ruling", cls.kind, cls.evidence.straight_line
    );
    Ok(())
}
