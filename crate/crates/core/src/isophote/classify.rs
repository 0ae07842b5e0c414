use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use super::axis::{recover_axis, slant_helix_axis, IsophoteAxis};
use super::mu::MuProfile;
use crate::error::{GeomError, Result};
use crate::numeric::grid_derivative;
use crate::surface::DarbouxSample;
use crate::tolerance::{Stats, Tolerances};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum IsophoteKind {
    GeodesicSlantHelix,
    AsymptoticGeneralHelix,
    LineOfCurvaturePlanar,
    Silhouette,
    Generic,
}

/// Residuals behind a classification. Rule-specific entries are `None` when the rule
/// that needs them did not fire or the data to form them is missing.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ClassificationEvidence {
    pub theta: f64,
    pub max_abs_k_g: f64,
    pub max_abs_k_n: f64,
    pub max_abs_tau_g: f64,
    pub max_abs_kappa: f64,
    pub mu: Option<Stats>,
    pub axis: Option<IsophoteAxis>,
    /// The curve is a straight line (kappa below class_tol): the Frenet-based checks are skipped.
    pub straight_line: bool,
    /// `max |tau|` (line-of-curvature rule: the curve must be planar).
    pub max_abs_tau: Option<f64>,
    /// `min over signs of max |sin(theta +- phi)|` (line-of-curvature rule).
    pub phi_relation_residual: Option<f64>,
    /// `sigma` of the curve (geodesic rule).
    pub sigma: Option<Stats>,
    pub sigma_constant: Option<bool>,
    /// Distance of the recovered axis from the slant-helix closed form, best signs.
    pub slant_axis_residual: Option<f64>,
    pub slant_axis_signs: Option<(f64, f64)>,
    /// `tau / kappa` (asymptotic rule).
    pub tau_over_kappa: Option<Stats>,
    pub tau_over_kappa_constant: Option<bool>,
    /// `min over signs of max |sin(theta -+ atan(tau/kappa))|` (asymptotic rule).
    pub tan_theta_residual: Option<f64>,
    /// `max |<T, d>|`.
    pub max_abs_t_dot_d: Option<f64>,
    /// `max |<n, d>|` over samples with a principal normal.
    pub max_abs_n_dot_d: Option<f64>,
    /// `tau_g / k_n` where `k_n` stays away from zero.
    pub tau_g_over_k_n: Option<Stats>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IsophoteClassification {
    pub kind: IsophoteKind,
    pub evidence: ClassificationEvidence,
    /// Whether the side conditions of the fired rule hold.
    pub consistent: bool,
    pub notes: Vec<String>,
}

fn max_abs(samples: &[DarbouxSample], f: impl Fn(&DarbouxSample) -> f64) -> f64 {
    samples.iter().map(|s| f(s).abs()).fold(0.0, f64::max)
}

/// `sigma = kappa^2 (tau/kappa)' / (kappa^2 + tau^2)^(3/2) = (kappa tau' - kappa' tau) / (kappa^2 + tau^2)^(3/2)`,
/// from the pointwise Frenet rates or, failing those, differences over a uniform sample list.
fn sigma_stats(samples: &[DarbouxSample]) -> Option<Stats> {
    let pointwise: Option<Vec<f64>> = samples
        .iter()
        .map(|s| {
            let (tau, (dk, dt)) = (s.tau?, s.frenet_rates?);
            Some((s.kappa * dt - dk * tau) / (s.kappa * s.kappa + tau * tau).powf(1.5))
        })
        .collect();
    if let Some(sig) = pointwise {
        return Stats::of(&sig);
    }
    if samples.len() < 5 {
        return None;
    }
    let taus: Option<Vec<f64>> = samples.iter().map(|s| s.tau).collect();
    let taus = taus?;
    let ratio: Vec<f64> = samples.iter().zip(&taus).map(|(s, t)| t / s.kappa).collect();
    let ds = samples[1].s - samples[0].s;
    let dr = grid_derivative(&ratio, ds);
    let sig: Vec<f64> = samples
        .iter()
        .zip(&taus)
        .zip(&dr)
        .map(|((s, t), d)| s.kappa * s.kappa * d / (s.kappa * s.kappa + t * t).powf(1.5))
        .collect();
    Stats::of(&sig)
}

/// Priority-ordered rules: straight line, line of curvature, geodesic, asymptotic,
/// silhouette, generic. Only certified isophotes are classified.
pub fn classify_isophote(
    samples: &[DarbouxSample],
    profile: &MuProfile,
    tol: &Tolerances,
) -> Result<IsophoteClassification> {
    if !profile.constant {
        return Err(GeomError::NotCertifiedIsophote {
            spread: profile.stats.map(|s| s.spread()).unwrap_or(f64::NAN),
        });
    }
    if samples.is_empty() {
        return Err(GeomError::TooFewSamples { required: 1, got: 0 });
    }
    let theta = profile.theta_estimate;
    let ct = tol.class_tol;
    let mut ev = ClassificationEvidence {
        theta,
        max_abs_k_g: max_abs(samples, |s| s.k_g),
        max_abs_k_n: max_abs(samples, |s| s.k_n),
        max_abs_tau_g: max_abs(samples, |s| s.tau_g),
        max_abs_kappa: max_abs(samples, |s| s.kappa),
        mu: profile.stats,
        ..Default::default()
    };
    let mut notes = Vec::new();

    if !profile.constant_normal {
        match recover_axis(samples, theta, tol) {
            Ok(axis) => {
                ev.max_abs_t_dot_d = Some(max_abs(samples, |s| s.tangent.dot(&axis.d)));
                let nd: Vec<f64> = samples
                    .iter()
                    .filter_map(|s| s.principal_normal.map(|n| n.dot(&axis.d).abs()))
                    .collect();
                if !nd.is_empty() {
                    ev.max_abs_n_dot_d = Some(nd.iter().copied().fold(0.0, f64::max));
                }
                ev.axis = Some(axis);
            }
            Err(e) => notes.push(format!("axis not recovered: {e}")),
        }
    }
    if samples.iter().all(|s| s.k_n.abs() > ct) {
        let r: Vec<f64> = samples.iter().map(|s| s.tau_g / s.k_n).collect();
        ev.tau_g_over_k_n = Stats::of(&r);
    }

    let mut consistent = true;
    let kind = if ev.max_abs_kappa <= ct {
        ev.straight_line = true;
        notes.push("straight line: Frenet frame undefined, tau/kappa test skipped".into());
        IsophoteKind::AsymptoticGeneralHelix
    } else if ev.max_abs_tau_g <= ct {
        let taus: Vec<f64> = samples.iter().filter_map(|s| s.tau).collect();
        let max_tau = taus.iter().map(|t| t.abs()).fold(0.0, f64::max);
        ev.max_abs_tau = Some(max_tau);
        let phis: Vec<f64> = samples.iter().filter_map(|s| s.phi).collect();
        let rel = [1.0, -1.0]
            .iter()
            .map(|e| phis.iter().map(|p| (theta + e * p).sin().abs()).fold(0.0, f64::max))
            .fold(f64::INFINITY, f64::min);
        ev.phi_relation_residual = Some(rel);
        if max_tau > ct {
            consistent = false;
            notes.push(format!("line of curvature but max |tau| = {max_tau:e}"));
        }
        if rel > ct {
            consistent = false;
            notes.push(format!("theta/phi relation residual {rel:e}"));
        }
        IsophoteKind::LineOfCurvaturePlanar
    } else if ev.max_abs_k_g <= ct {
        ev.sigma = sigma_stats(samples);
        ev.sigma_constant = ev.sigma.map(|s| tol.is_constant(&s));
        if ev.sigma_constant != Some(true) {
            consistent = false;
            notes.push("geodesic isophote whose sigma is not certified constant".into());
        }
        if let Some(axis) = &ev.axis {
            let mut best: Option<(f64, (f64, f64))> = None;
            for signs in [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)] {
                let mut worst = 0.0f64;
                for s in samples {
                    let (Some(n), Some(b), Some(tau)) = (s.principal_normal, s.binormal, s.tau) else {
                        worst = f64::INFINITY;
                        break;
                    };
                    let d = slant_helix_axis([s.tangent, n, b], s.kappa, tau, theta, signs);
                    worst = worst.max((d - axis.d).norm());
                }
                if best.is_none_or(|(r, _)| worst < r) {
                    best = Some((worst, signs));
                }
            }
            if let Some((r, signs)) = best {
                ev.slant_axis_residual = Some(r);
                ev.slant_axis_signs = Some(signs);
                if r > tol.axis_tol {
                    consistent = false;
                    notes.push(format!("slant-helix axis form residual {r:e}"));
                }
            }
        }
        IsophoteKind::GeodesicSlantHelix
    } else if ev.max_abs_k_n <= ct {
        let pairs: Option<Vec<(f64, f64)>> = samples.iter().map(|s| s.tau.map(|t| (s.kappa, t))).collect();
        if let Some(pairs) = pairs {
            let ratio: Vec<f64> = pairs.iter().map(|(k, t)| t / k).collect();
            ev.tau_over_kappa = Stats::of(&ratio);
            ev.tau_over_kappa_constant = ev.tau_over_kappa.map(|s| tol.is_constant(&s));
            let r = [1.0, -1.0]
                .iter()
                .map(|e| {
                    pairs
                        .iter()
                        .map(|(k, t)| (theta - (e * t).atan2(*k)).sin().abs())
                        .fold(0.0, f64::max)
                })
                .fold(f64::INFINITY, f64::min);
            ev.tan_theta_residual = Some(r);
            if ev.tau_over_kappa_constant != Some(true) || r > ct {
                consistent = false;
                notes.push("asymptotic isophote fails the general-helix side conditions".into());
            }
        }
        IsophoteKind::AsymptoticGeneralHelix
    } else if (theta - FRAC_PI_2).abs() <= ct {
        IsophoteKind::Silhouette
    } else {
        IsophoteKind::Generic
    };
    Ok(IsophoteClassification {
        kind,
        evidence: ev,
        consistent,
        notes,
    })
}
