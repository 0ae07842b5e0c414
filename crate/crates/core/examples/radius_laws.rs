//! Radius laws for canal surfaces carrying isophotes, each validated against its defining
//! relation. Closed forms that fail their relation are reported with the true roots.

use std::f64::consts::PI;

use isophote::canal::{prop1_quadratic, radius_law_integral_cor3b, radius_law_linear_cor3a, radius_law_prop1};
use isophote::GeomError;

fn main() {
    match radius_law_linear_cor3a(PI / 3.0, -PI / 4.0, -1.0) {
        Ok(l) => println!(
            "linear law: lambda = {:.12}, residual {:.1e}, printed condition holds: {:?}",
            l.slope, l.residual, l.printed_condition_holds
        ),
        Err(e) => println!("linear law: {e}"),
    }
    let l = radius_law_integral_cor3b(PI / 4.0, 0.0, 0.0).expect("valid");
    println!("integral law: r' = {:.12}, residual {:.1e}", l.slope, l.residual);
    match radius_law_prop1(PI / 3.0, PI / 2.0) {
        Ok(l) => println!("omega = {}", l.slope),
        Err(GeomError::FormulaInconsistent {
            value, residual, roots, ..
        }) => {
            let (coef, _) = prop1_quadratic(PI / 3.0, PI / 2.0);
            println!("omega = {value:.12} misses its quadratic {coef:.4?} by {residual:.3}; roots {roots:.12?}");
        }
        Err(e) => println!("omega: {e}"),
    }
}
