use nalgebra::{Matrix3, SymmetricEigen};
use serde::{Deserialize, Serialize};

use super::mu::{invariant_rates, mu_invariant};
use crate::error::{GeomError, Result};
use crate::surface::DarbouxSample;
use crate::tolerance::Tolerances;
use crate::Vec3;

/// The curve `s -> N(s)` on the unit sphere.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussMapImage {
    pub points: Vec<Vec3>,
    /// Frenet curvature of the image, `|N' x N''| / |N'|^3`.
    pub kappa: Vec<f64>,
    /// Geodesic curvature on the sphere, `sign <N, N' x N''> sqrt(kappa^2 - 1)`.
    pub kbar_g: Vec<f64>,
    /// Normal curvature of a unit-sphere curve.
    pub kbar_n: f64,
    /// `max |kbar_g - mu|`.
    pub mu_agreement: f64,
    pub plane_normal: Vec3,
    pub plane_offset: f64,
    /// Largest distance of the image points from the least-squares plane.
    pub plane_fit_residual: f64,
}

/// Least-squares plane through points: unit normal, offset `<n, x> = c`, max distance.
pub fn fit_plane(points: &[Vec3]) -> (Vec3, f64, f64) {
    let n = points.len() as f64;
    let c: Vec3 = points.iter().sum::<Vec3>() / n;
    let mut cov = Matrix3::zeros();
    for p in points {
        let q = p - c;
        cov += q * q.transpose();
    }
    let eig = SymmetricEigen::new(cov);
    let k = eig.eigenvalues.imin();
    let normal: Vec3 = eig.eigenvectors.column(k).into_owned().normalize();
    let offset = normal.dot(&c);
    let residual = points
        .iter()
        .map(|p| (normal.dot(p) - offset).abs())
        .fold(0.0, f64::max);
    (normal, offset, residual)
}

pub fn gauss_map_image(samples: &[DarbouxSample], tol: &Tolerances) -> Result<GaussMapImage> {
    if samples.len() < 3 {
        return Err(GeomError::TooFewSamples {
            required: 3,
            got: samples.len(),
        });
    }
    let profile = mu_invariant(samples, tol)?;
    let rates = invariant_rates(samples)?;
    let mut kappa = Vec::with_capacity(samples.len());
    let mut kbar_g = Vec::with_capacity(samples.len());
    let mut agreement = 0.0f64;
    for ((s, r), (_, mu)) in samples.iter().zip(&rates).zip(&profile.samples) {
        let (t, b, n) = (s.tangent, s.tangent_normal, s.normal);
        let w2 = s.gauss_speed_sq();
        let d1 = -t * s.k_n - b * s.tau_g;
        let d2 = t * (-r.dk_n + s.k_g * s.tau_g) - b * (s.k_n * s.k_g + r.dtau_g) - n * w2;
        let c = d1.cross(&d2);
        let k = c.norm() / d1.norm().powi(3);
        let g = (k * k - 1.0).max(0.0).sqrt().copysign(c.dot(&n));
        agreement = agreement.max((g - mu).abs());
        kappa.push(k);
        kbar_g.push(g);
    }
    let points: Vec<Vec3> = samples.iter().map(|s| s.normal).collect();
    let (plane_normal, plane_offset, plane_fit_residual) = fit_plane(&points);
    Ok(GaussMapImage {
        points,
        kappa,
        kbar_g,
        kbar_n: 1.0,
        mu_agreement: agreement,
        plane_normal,
        plane_offset,
        plane_fit_residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plane_fit_of_a_tilted_circle() {
        let n = Vec3::new(1.0, 2.0, 2.0) / 3.0;
        let e1 = n.cross(&Vec3::z()).normalize();
        let e2 = n.cross(&e1);
        let pts: Vec<Vec3> = (0..50)
            .map(|i| {
                let a = i as f64 * 0.3;
                n * 0.4 + (e1 * a.cos() + e2 * a.sin()) * 0.5
            })
            .collect();
        let (normal, offset, res) = fit_plane(&pts);
        assert!(res < 1e-14);
        assert!((normal.dot(&n).abs() - 1.0).abs() < 1e-14);
        assert!((offset.abs() - 0.4).abs() < 1e-14);
    }
}
