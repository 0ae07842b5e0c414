//! Recovers the light direction of a traced torus isophote from the curve alone, and checks
//! that its Gauss-map image is a circle.

use isophote::catalog;
use isophote::isophote::{
    axis_derivative_check, gauss_map_image, mu_invariant, recover_axis, samples_along_polyline, trace_isophote,
    TraceOptions,
};
use isophote::{Tolerances, Vec3};

fn main() -> isophote::Result<()> {
    let tol = Tolerances::default();
    let torus = catalog::torus(2.0, 0.5);
    let d = Vec3::new(0.3, -0.2, 1.0).normalize();
    let theta = 1.1;
    let tr = trace_isophote(&torus, d, theta, &TraceOptions::grid(128, 128), &tol)?;
    println!("traced {} polyline(s)", tr.polylines.len());
    for (k, poly) in tr.polylines.iter().enumerate() {
        let samples = samples_along_polyline(&torus, d, theta, poly, 200, &tol)?;
        let mu = mu_invariant(&samples, &tol)?;
        let axis = recover_axis(&samples, mu.theta_estimate, &tol)?;
        let gauss = gauss_map_image(&samples, &tol)?;
        println!(
            "curve {k}: theta {:.9} (true {theta}), axis error {:.2e} rad, drift {:.2e}, Gauss plane residual {:.2e}",
            mu.theta_estimate,
            axis.angle_to(&d),
            axis_derivative_check(&samples, &axis, &tol)?,
            gauss.plane_fit_residual
        );
    }
    Ok(())
}
