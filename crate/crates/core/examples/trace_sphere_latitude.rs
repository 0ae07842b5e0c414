//! Traces the isophote `<N, z> = cos 60deg` on the unit sphere and writes CSV and SVG files.

use std::f64::consts::PI;

use isophote::catalog;
use isophote::io::{rows_from_polyline, write_curve_csv, write_domain_svg};
use isophote::isophote::{trace_isophote, TraceOptions};
use isophote::{Tolerances, Vec3};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let tol = Tolerances::default();
    let sphere = catalog::sphere(1.0);
    let d = Vec3::z();
    let theta = PI / 3.0;
    let tr = trace_isophote(&sphere, d, theta, &TraceOptions::grid(256, 256), &tol)?;
    println!(
        "{} polyline(s), field residual {:.2e}",
        tr.polylines.len(),
        tr.field_residual
    );
    let poly = &tr.polylines[0];
    let dv = poly.uv.iter().map(|uv| (uv.y - PI / 6.0).abs()).fold(0.0, f64::max);
    println!(
        "closed: {}, points: {}, max |v - pi/6| = {dv:.2e}",
        poly.closed,
        poly.uv.len()
    );

    let dir = std::env::temp_dir().join("isophote-example-trace");
    std::fs::create_dir_all(&dir)?;
    write_curve_csv(&dir.join("latitude.csv"), &rows_from_polyline(poly))?;
    write_domain_svg(
        &dir.join("latitude.svg"),
        &sphere,
        &d,
        theta,
        &tr.polylines,
        "sphere theta=60deg",
        &tol,
    )?;
    println!("wrote {}", dir.display());
    Ok(())
}
