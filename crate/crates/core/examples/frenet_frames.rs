//! Frenet frames, curvature and torsion of catalog curves, with the Frenet-Serret residuals.

use isophote::catalog;
use isophote::curve::{classify_helix, frenet_at, frenet_serret_residuals, reparametrize_arclength, SpaceCurve};
use isophote::{Tolerances, Vec3};

fn main() -> isophote::Result<()> {
    let tol = Tolerances::default();
    let helix = catalog::circular_helix(2.0, 1.0, 1.0);
    for s in helix.sample_params(5) {
        let f = frenet_at(&helix, s, &tol)?;
        let r = frenet_serret_residuals(&helix, s, &tol)?;
        println!(
            "s = {s:7.4}  kappa = {:.6}  tau = {:.6}  residuals = {:.1e} {:.1e} {:.1e}",
            f.kappa, f.tau, r[0], r[1], r[2]
        );
    }

    // a twisted cubic, reparametrized by arc length first
    let cubic = SpaceCurve::from_fn(|t| Vec3::new(t, t * t, t * t * t), (0.0, 1.0));
    let unit = reparametrize_arclength(&cubic, 1e-12, &tol)?;
    println!("twisted cubic: length {:.12}", unit.range().1);
    let f = frenet_at(&unit, 0.5, &tol)?;
    println!("at s = 0.5: kappa = {:.6}, tau = {:.6}", f.kappa, f.tau);

    for (name, c) in [
        ("circular helix", helix),
        ("slant helix", catalog::slant_helix(2.0, 1.0)),
        ("twisted cubic", unit),
    ] {
        let v = classify_helix(&c, 64, &tol)?;
        println!(
            "{name:15} {:?}: tau/kappa spread {:.2e}, sigma spread {:.2e}",
            v.kind,
            v.tau_over_kappa.spread(),
            v.sigma.spread()
        );
    }
    Ok(())
}
