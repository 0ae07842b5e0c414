use serde::{Deserialize, Serialize};

use super::mu::SignBranch;
use crate::error::{GeomError, Result};
use crate::surface::DarbouxSample;
use crate::tolerance::Tolerances;
use crate::Vec3;

/// A fixed direction `d` with `<N, d> = cos(theta)` along a curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IsophoteAxis {
    pub d: Vec3,
    pub theta: f64,
    pub sign_branch: SignBranch,
    /// `max_s |d(s) - mean d|` for the selected branch.
    pub residual: f64,
    /// The same quantity for the rejected branch.
    pub other_residual: f64,
}

impl IsophoteAxis {
    pub fn certified(&self, tol: &Tolerances) -> bool {
        self.residual <= tol.axis_tol
    }

    /// Angle between `d` and another direction.
    pub fn angle_to(&self, other: &Vec3) -> f64 {
        angle_between(&self.d, other)
    }
}

pub fn angle_between(a: &Vec3, b: &Vec3) -> f64 {
    a.cross(b).norm().atan2(a.dot(b))
}

/// `d(s) = e (tau_g/w) sin(theta) T - e (k_n/w) sin(theta) B + cos(theta) N`,
/// `w = sqrt(k_n^2 + tau_g^2)`, `e` the branch sign.
pub fn axis_at(sample: &DarbouxSample, theta: f64, branch: SignBranch) -> Vec3 {
    let w = sample.gauss_speed_sq().sqrt();
    let e = branch.sign();
    let (st, ct) = theta.sin_cos();
    sample.tangent * (e * sample.tau_g / w * st) - sample.tangent_normal * (e * sample.k_n / w * st)
        + sample.normal * ct
}

pub fn axis_field(samples: &[DarbouxSample], theta: f64, branch: SignBranch, tol: &Tolerances) -> Result<Vec<Vec3>> {
    samples
        .iter()
        .map(|s| {
            let w2 = s.gauss_speed_sq();
            if !(w2 >= tol.eps_deg * tol.eps_deg) {
                return Err(GeomError::DegenerateNormalData { s: s.s, value: w2 });
            }
            Ok(axis_at(s, theta, branch))
        })
        .collect()
}

fn mean_direction(field: &[Vec3]) -> (Vec3, f64) {
    let sum: Vec3 = field.iter().sum();
    let d = sum.normalize();
    let residual = field.iter().map(|x| (x - d).norm()).fold(0.0, f64::max);
    (d, residual)
}

/// Builds the axis field for both branches, averages each, and keeps the branch whose
/// field stays closest to its mean.
pub fn recover_axis(samples: &[DarbouxSample], theta: f64, tol: &Tolerances) -> Result<IsophoteAxis> {
    if samples.is_empty() {
        return Err(GeomError::TooFewSamples { required: 1, got: 0 });
    }
    let (dp, rp) = mean_direction(&axis_field(samples, theta, SignBranch::Plus, tol)?);
    let (dm, rm) = mean_direction(&axis_field(samples, theta, SignBranch::Minus, tol)?);
    if rp > tol.axis_tol && rm > tol.axis_tol {
        return Err(GeomError::NoConsistentAxis {
            plus: rp,
            minus: rm,
            tol: tol.axis_tol,
        });
    }
    let (d, branch, residual, other) = if rp <= rm {
        (dp, SignBranch::Plus, rp, rm)
    } else {
        (dm, SignBranch::Minus, rm, rp)
    };
    Ok(IsophoteAxis {
        d,
        theta,
        sign_branch: branch,
        residual,
        other_residual: other,
    })
}

/// Axis for a curve along which the normal is constant: the data fix only `<N, d>`,
/// so the component of `hint` orthogonal to `N` supplies the rest.
pub fn recover_axis_constant_normal(
    samples: &[DarbouxSample],
    theta: f64,
    hint: Vec3,
    tol: &Tolerances,
) -> Result<IsophoteAxis> {
    let first = samples
        .first()
        .ok_or(GeomError::TooFewSamples { required: 1, got: 0 })?;
    let n = first.normal;
    let perp = hint - n * n.dot(&hint);
    if perp.norm() < tol.eps_deg {
        return Err(GeomError::InvalidInput("axis hint is parallel to the normal".into()));
    }
    let d = n * theta.cos() + perp.normalize() * theta.sin();
    let residual = samples
        .iter()
        .map(|s| (s.normal.dot(&d) - theta.cos()).abs())
        .fold(0.0, f64::max);
    Ok(IsophoteAxis {
        d,
        theta,
        sign_branch: SignBranch::Plus,
        residual,
        other_residual: residual,
    })
}

/// `max_i |d_{i+1} - d_i|` over the per-sample axis field of the selected branch, i.e. the
/// finite-difference `|d'| ds`.
pub fn axis_derivative_check(samples: &[DarbouxSample], axis: &IsophoteAxis, tol: &Tolerances) -> Result<f64> {
    let field = axis_field(samples, axis.theta, axis.sign_branch, tol)?;
    Ok(field.windows(2).map(|w| (w[1] - w[0]).norm()).fold(0.0, f64::max))
}

/// Largest deviation of `<N, d>` from `cos(theta)` along the samples.
pub fn illumination_residual(samples: &[DarbouxSample], d: &Vec3, theta: f64) -> f64 {
    samples
        .iter()
        .map(|s| (s.normal.dot(d) - theta.cos()).abs())
        .fold(0.0, f64::max)
}

/// Axis of a slant helix written in its Frenet frame:
/// `cos(theta) n + sin(theta) (tau T + kappa b) / sqrt(kappa^2 + tau^2)` with
/// `frame = [T, n, b]` and `(e_n, e_r)` the signs of the two parts.
pub fn slant_helix_axis(frame: [Vec3; 3], kappa: f64, tau: f64, theta: f64, (e_n, e_r): (f64, f64)) -> Vec3 {
    let [t, n, b] = frame;
    let w = (kappa * kappa + tau * tau).sqrt();
    n * (e_n * theta.cos()) + (t * tau + b * kappa) * (e_r * theta.sin() / w)
}
