use serde::{Deserialize, Serialize};

use crate::error::{GeomError, Result};
use crate::numeric::grid_derivative;
use crate::surface::{DarbouxSample, InvariantRates};
use crate::tolerance::{Stats, Tolerances};

/// Which of the two signs carried by the axis formulas was selected.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SignBranch {
    Plus,
    Minus,
}

impl SignBranch {
    pub fn sign(self) -> f64 {
        match self {
            SignBranch::Plus => 1.0,
            SignBranch::Minus => -1.0,
        }
    }

    pub fn of(x: f64) -> Self {
        if x >= 0.0 {
            SignBranch::Plus
        } else {
            SignBranch::Minus
        }
    }

    pub fn flip(self) -> Self {
        match self {
            SignBranch::Plus => SignBranch::Minus,
            SignBranch::Minus => SignBranch::Plus,
        }
    }
}

/// Sampled `mu(s)`, the geodesic curvature of the Gauss-map image, with its constancy verdict.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MuProfile {
    /// `(s, mu(s))`, `mu` taken on the `+` branch.
    pub samples: Vec<(f64, f64)>,
    pub stats: Option<Stats>,
    pub constant: bool,
    /// `arccot |median mu|` in `[0, pi/2]`.
    pub theta_estimate: f64,
    /// Sign with `cot(theta) = sign * mu`.
    pub branch: SignBranch,
    /// Set when the surface normal is constant along the curve, so `mu` does not exist
    /// and every `theta` is compatible with the data.
    pub constant_normal: bool,
}

impl MuProfile {
    /// Profile of a curve along which `N` is constant (`k_n = tau_g = 0`). Such a curve
    /// is an isophote for every axis; `theta` is taken from the caller.
    pub fn for_constant_normal(samples: &[DarbouxSample], theta: f64, tol: &Tolerances) -> Result<MuProfile> {
        for s in samples {
            let w = s.gauss_speed_sq().sqrt();
            if w > tol.class_tol {
                return Err(GeomError::InvalidInput(format!(
                    "normal is not constant: |N'| = {w:e} at s = {}",
                    s.s
                )));
            }
        }
        Ok(MuProfile {
            samples: Vec::new(),
            stats: None,
            constant: true,
            theta_estimate: theta,
            branch: SignBranch::Plus,
            constant_normal: true,
        })
    }

    pub fn cot_theta(&self) -> f64 {
        self.stats.map(|s| s.median.abs()).unwrap_or(0.0)
    }
}

/// Arc-length rates of `(k_g, k_n, tau_g)` per sample: the pointwise values stored on the
/// samples when present, otherwise 5-point differences over the (uniform) sample grid.
pub fn invariant_rates(samples: &[DarbouxSample]) -> Result<Vec<InvariantRates>> {
    if samples.iter().all(|s| s.rates.is_some()) {
        return Ok(samples.iter().map(|s| s.rates.unwrap()).collect());
    }
    if samples.len() < 5 {
        return Err(GeomError::TooFewSamples {
            required: 5,
            got: samples.len(),
        });
    }
    let ds = samples[1].s - samples[0].s;
    let col = |f: fn(&DarbouxSample) -> f64| grid_derivative(&samples.iter().map(f).collect::<Vec<_>>(), ds);
    let dkg = col(|s| s.k_g);
    let dkn = col(|s| s.k_n);
    let dtg = col(|s| s.tau_g);
    Ok(samples
        .iter()
        .enumerate()
        .map(|(i, s)| {
            s.rates.unwrap_or(InvariantRates {
                dk_g: dkg[i],
                dk_n: dkn[i],
                dtau_g: dtg[i],
            })
        })
        .collect())
}

/// `mu = (k_n tau_g' - k_n' tau_g + k_g (k_n^2 + tau_g^2)) / (k_n^2 + tau_g^2)^(3/2)`,
/// which equals `k_n^2 (tau_g/k_n)' / w^3 + k_g / w` wherever `k_n != 0`.
pub fn mu_at(s: &DarbouxSample, r: &InvariantRates) -> f64 {
    let w2 = s.gauss_speed_sq();
    (s.k_n * r.dtau_g - r.dk_n * s.tau_g + s.k_g * w2) / (w2 * w2.sqrt())
}

fn check_nondegenerate(samples: &[DarbouxSample], tol: &Tolerances) -> Result<()> {
    for s in samples {
        let w2 = s.gauss_speed_sq();
        if !(w2 >= tol.eps_deg * tol.eps_deg) {
            return Err(GeomError::DegenerateNormalData { s: s.s, value: w2 });
        }
    }
    Ok(())
}

pub fn mu_invariant(samples: &[DarbouxSample], tol: &Tolerances) -> Result<MuProfile> {
    if samples.len() < 2 {
        return Err(GeomError::TooFewSamples {
            required: 2,
            got: samples.len(),
        });
    }
    check_nondegenerate(samples, tol)?;
    let rates = invariant_rates(samples)?;
    let values: Vec<(f64, f64)> = samples.iter().zip(&rates).map(|(s, r)| (s.s, mu_at(s, r))).collect();
    let mus: Vec<f64> = values.iter().map(|v| v.1).collect();
    let stats = Stats::of(&mus).ok_or_else(|| GeomError::InvalidInput("non-finite mu".into()))?;
    let theta_estimate = 1.0f64.atan2(stats.median.abs());
    Ok(MuProfile {
        samples: values,
        stats: Some(stats),
        constant: tol.is_constant(&stats),
        theta_estimate,
        branch: SignBranch::of(stats.median),
        constant_normal: false,
    })
}

/// Consistency of the `tan(theta)` form: for each pairing of the two signs in the
/// denominator `s1 k_g w^2 + s2 (k_n tau_g' - k_n' tau_g)`, the largest deviation of the
/// implied `cot(theta)` from `cot(theta)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TanThetaConsistency {
    /// Residuals for the sign pairs `(+,+)`, `(+,-)`, `(-,+)`, `(-,-)`.
    pub residuals: [f64; 4],
    pub selected: (SignBranch, SignBranch),
    pub selected_residual: f64,
}

pub fn tan_theta_consistency(samples: &[DarbouxSample], theta: f64, tol: &Tolerances) -> Result<TanThetaConsistency> {
    check_nondegenerate(samples, tol)?;
    let rates = invariant_rates(samples)?;
    let cot = theta.cos() / theta.sin();
    let pairs = [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)];
    let mut residuals = [0.0f64; 4];
    for (s, r) in samples.iter().zip(&rates) {
        let w2 = s.gauss_speed_sq();
        let w3 = w2 * w2.sqrt();
        let a = s.k_g * w2;
        let b = s.k_n * r.dtau_g - r.dk_n * s.tau_g;
        for (k, (s1, s2)) in pairs.iter().enumerate() {
            residuals[k] = residuals[k].max(((s1 * a + s2 * b) / w3 - cot).abs());
        }
    }
    let best = (0..4).min_by(|&i, &j| residuals[i].total_cmp(&residuals[j])).unwrap();
    let (s1, s2) = pairs[best];
    Ok(TanThetaConsistency {
        residuals,
        selected: (SignBranch::of(s1), SignBranch::of(s2)),
        selected_residual: residuals[best],
    })
}
