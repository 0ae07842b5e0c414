//! Builds a canal surface with a linear radius from the integral radius law, checks the
//! envelope identities and exports an OBJ mesh. The radius stays below the spine's radius of
//! curvature, so the surface has no folds and both normals agree.

use std::f64::consts::PI;

use isophote::canal::{
    canal_surface, canal_unit_normal, envelope_residuals, radius_law_integral_cor3b, Branch, CanalSpec,
};
use isophote::catalog;
use isophote::io::{export_mesh, write_obj};
use isophote::isophote::angle_between;
use isophote::Tolerances;
use rand::{Rng, SeedableRng};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let tol = Tolerances::default();
    let law = radius_law_integral_cor3b(PI / 64.0, 0.3, 0.0)?;
    println!("slope {:.12}, residual {:.1e}", law.slope, law.residual);
    let spec = CanalSpec::new(
        catalog::circular_helix(2.0, 1.0, 1.0),
        law.radius(0.1),
        Branch::Minus,
        &tol,
    )?;
    let surface = canal_surface(&spec);
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
    let (mut env, mut ang) = (0.0f64, 0.0f64);
    for _ in 0..1000 {
        let s = rng.gen_range(spec.s_range.0..spec.s_range.1);
        let v = rng.gen_range(0.0..2.0 * PI);
        let [a, b] = envelope_residuals(&spec, s, v);
        env = env.max(a.abs()).max(b.abs());
        let n = surface.unit_normal(s, v, &tol)?;
        ang = ang.max(angle_between(&n, &canal_unit_normal(&spec, s, v)));
    }
    println!("max envelope residual {env:.2e}, max normal angle {ang:.2e}");
    let mesh = export_mesh(&surface, (96, 24), &tol)?;
    let path = std::env::temp_dir().join("isophote-canal.obj");
    write_obj(&path, &mesh, "canal")?;
    println!(
        "{} vertices, {} faces -> {}",
        mesh.vertices.len(),
        mesh.faces.len(),
        path.display()
    );
    Ok(())
}
