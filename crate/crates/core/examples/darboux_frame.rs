//! Darboux frame of curves on surfaces: geodesic and normal curvature, geodesic torsion,
//! and the rotation into the Frenet frame.

use std::f64::consts::PI;

use isophote::catalog;
use isophote::surface::{
    darboux_along, darboux_grid_residuals, frame_identity_residuals, rotate_to_frenet, CurveOnSurface,
};
use isophote::{Tolerances, Vec2};

fn main() -> isophote::Result<()> {
    let tol = Tolerances::default();
    let lat = PI / 6.0;
    let latitude = CurveOnSurface::line(
        catalog::sphere(1.0),
        Vec2::new(-PI, lat),
        Vec2::new(1.0 / lat.cos(), 0.0),
        (0.0, 2.0 * PI * lat.cos()),
    )
    .with_unit_speed(true);
    let helix = CurveOnSurface::line(
        catalog::cylinder(1.0, (-5.0, 5.0)),
        Vec2::zeros(),
        Vec2::new(1.0, 0.5).normalize(),
        (0.0, 4.0),
    )
    .with_unit_speed(true);
    let torus_curve = CurveOnSurface::line(catalog::torus(2.0, 0.5), Vec2::zeros(), Vec2::new(1.0, 2.0), (0.0, 3.0))
        .arclength(1e-12, &tol)?;

    for (name, c) in [
        ("sphere latitude", latitude),
        ("cylinder helix", helix),
        ("torus diagonal", torus_curve),
    ] {
        let s = darboux_along(&c, 64, &tol)?;
        let x = &s[10];
        let id = frame_identity_residuals(x);
        println!(
            "{name:16} k_g = {:+.6}  k_n = {:+.6}  tau_g = {:+.6}  phi = {:?}",
            x.k_g, x.k_n, x.tau_g, x.phi
        );
        println!(
            "{:16} identities: orthonormality {:.1e}, pythagoras {:.1e}; grid Darboux residual {:.1e}",
            "",
            id.orthonormality,
            id.pythagoras,
            darboux_grid_residuals(&s)?
        );
        if let Ok((n, b)) = rotate_to_frenet(x) {
            println!("{:16} n = {:.4?}  b = {:.4?}", "", n.as_slice(), b.as_slice());
        }
    }
    Ok(())
}
