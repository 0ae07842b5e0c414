//! Tube parameter curves that are isophotes: helix axes for general-helix spines and
//! slant-helix axes for slant-helix spines.

use isophote::canal::{canal_unit_normal, tube_parameter_isophotes, Branch, CanalSpec};
use isophote::catalog;
use isophote::curve::classify_helix;
use isophote::tolerance::stdev;
use isophote::Tolerances;

fn main() -> isophote::Result<()> {
    let tol = Tolerances::default();
    for (name, spine, r) in [
        ("circular helix", catalog::circular_helix(2.0, 1.0, 1.0), 0.3),
        ("slant helix", catalog::slant_helix(2.0, 1.0), 0.2),
    ] {
        let verdict = classify_helix(&spine, 128, &tol)?;
        let spec = CanalSpec::tube(spine.clone(), r, Branch::Minus, &tol)?;
        println!("{name}: {:?}", verdict.kind);
        for x in tube_parameter_isophotes(&spine, &verdict, 128, &tol)? {
            let vals: Vec<f64> = spine
                .sample_params(200)
                .iter()
                .map(|&s| canal_unit_normal(&spec, s, x.v0).dot(&x.d))
                .collect();
            println!(
                "  v0 = {:.4} ({:?}): d = {:.4?}, <N,d> = {:.6}, stdev {:.1e}",
                x.v0,
                x.source,
                x.d.as_slice(),
                vals[0],
                stdev(&vals)
            );
        }
    }
    Ok(())
}
