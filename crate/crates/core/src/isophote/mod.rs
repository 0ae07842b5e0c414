//! Isophote detection and analysis: the `mu` invariant, axis recovery, classification,
//! the Gauss-map image, and level-set tracing on parametric surfaces.

mod axis;
mod classify;
mod flow;
mod gauss;
mod mu;
mod trace;

pub use axis::{
    angle_between, axis_at, axis_derivative_check, axis_field, illumination_residual, recover_axis,
    recover_axis_constant_normal, slant_helix_axis, IsophoteAxis,
};
pub use classify::{classify_isophote, ClassificationEvidence, IsophoteClassification, IsophoteKind};
pub use flow::IsophoteFlowPath;
pub use gauss::{fit_plane, gauss_map_image, GaussMapImage};
pub use mu::{invariant_rates, mu_at, mu_invariant, tan_theta_consistency, MuProfile, SignBranch, TanThetaConsistency};
pub use trace::{
    illumination_field, silhouette, trace_isophote, IsophoteTrace, Polyline, TraceDiagnostics, TraceOptions,
};

use crate::error::Result;
use crate::surface::{darboux_along, DarbouxSample, ParamSurface};
use crate::tolerance::Tolerances;
use crate::Vec3;

/// Darboux samples along the level curve through the first point of a traced polyline.
pub fn samples_along_polyline(
    surface: &ParamSurface,
    d: Vec3,
    theta: f64,
    poly: &Polyline,
    samples: usize,
    tol: &Tolerances,
) -> Result<Vec<DarbouxSample>> {
    let path = IsophoteFlowPath::from_polyline(surface, d, theta, poly, tol)?;
    let curve = path.into_curve();
    darboux_along(&curve, samples, tol)
}

#[cfg(test)]
mod tests;
