//! The slant helix with curvature `sqrt(3) cos t` and torsion `sqrt(3) sin t` is a geodesic
//! isophote of its rectifying developable at 60 degrees.

use isophote::catalog;
use isophote::curve::classify_helix;
use isophote::isophote::{classify_isophote, mu_invariant, recover_axis};
use isophote::surface::{darboux_along, CurveOnSurface};
use isophote::{Tolerances, Vec2};

fn main() -> isophote::Result<()> {
    let tol = Tolerances::default();
    let gamma = catalog::slant_helix(2.0, 1.0);
    let v = classify_helix(&gamma, 200, &tol)?;
    println!(
        "{:?}: sigma = {:.12} (spread {:.1e}), tau/kappa spread {:.3}",
        v.kind,
        v.sigma.median,
        v.sigma.spread(),
        v.tau_over_kappa.spread()
    );
    let (a, b) = gamma.range();
    let dev = catalog::rectifying_developable(&gamma, 0.5);
    let curve = CurveOnSurface::line(dev, Vec2::new(0.0, a), Vec2::new(0.0, 1.0), (0.0, b - a)).with_unit_speed(true);
    let s = darboux_along(&curve, 200, &tol)?;
    let mu = mu_invariant(&s, &tol)?;
    let axis = recover_axis(&s, mu.theta_estimate, &tol)?;
    let cls = classify_isophote(&s, &mu, &tol)?;
    println!(
        "mu = {:.12}, theta = {:.9} deg, axis {:.6?} (residual {:.1e}), {:?}",
        mu.stats.map(|x| x.median).unwrap_or(f64::NAN),
        mu.theta_estimate.to_degrees(),
        axis.d.as_slice(),
        axis.residual,
        cls.kind
    );
    Ok(())
}
