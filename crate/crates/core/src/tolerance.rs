//! Named tolerances and the constancy test used to certify "constant function" claims.

use serde::{Deserialize, Serialize};

/// Every certification in the crate cites one of these by name.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    /// Degeneracy threshold for speeds, curvatures and normal lengths.
    pub eps_deg: f64,
    /// Frame orthonormality and Frenet/Darboux residuals.
    pub frame_rtol: f64,
    /// Bisection tolerance on |<N,d> - cos theta| for traced points.
    pub trace_tol: f64,
    /// Axis certification residual.
    pub axis_tol: f64,
    /// Isophote classification thresholds on |k_g|, |k_n|, |tau_g|.
    pub class_tol: f64,
    pub const_atol: f64,
    pub const_rtol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            eps_deg: 1e-9,
            frame_rtol: 1e-6,
            trace_tol: 1e-9,
            axis_tol: 1e-6,
            class_tol: 1e-6,
            const_atol: 1e-6,
            const_rtol: 1e-6,
        }
    }
}

impl Tolerances {
    /// Looks a tolerance up by its field name.
    pub fn get(&self, name: &str) -> Option<f64> {
        Some(match name {
            "eps_deg" => self.eps_deg,
            "frame_rtol" => self.frame_rtol,
            "trace_tol" => self.trace_tol,
            "axis_tol" => self.axis_tol,
            "class_tol" => self.class_tol,
            "const_atol" => self.const_atol,
            "const_rtol" => self.const_rtol,
            _ => return None,
        })
    }

    pub fn set(&mut self, name: &str, value: f64) -> bool {
        let slot = match name {
            "eps_deg" => &mut self.eps_deg,
            "frame_rtol" => &mut self.frame_rtol,
            "trace_tol" => &mut self.trace_tol,
            "axis_tol" => &mut self.axis_tol,
            "class_tol" => &mut self.class_tol,
            "const_atol" => &mut self.const_atol,
            "const_rtol" => &mut self.const_rtol,
            _ => return false,
        };
        *slot = value;
        true
    }

    pub const NAMES: [&'static str; 7] = [
        "eps_deg",
        "frame_rtol",
        "trace_tol",
        "axis_tol",
        "class_tol",
        "const_atol",
        "const_rtol",
    ];

    /// `(max - min) <= atol + rtol * max(1, median |f|)`.
    pub fn is_constant(&self, stats: &Stats) -> bool {
        stats.spread() <= self.const_atol + self.const_rtol * stats.median_abs.max(1.0)
    }
}

/// Summary statistics of a sampled scalar function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Stats {
    pub min: f64,
    pub max: f64,
    pub median: f64,
    pub median_abs: f64,
}

impl Stats {
    /// Returns `None` for an empty slice or when any value is not finite.
    pub fn of(values: &[f64]) -> Option<Stats> {
        if values.is_empty() || values.iter().any(|x| !x.is_finite()) {
            return None;
        }
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        let mut abs: Vec<f64> = values.iter().map(|x| x.abs()).collect();
        abs.sort_by(f64::total_cmp);
        Some(Stats {
            min: sorted[0],
            max: sorted[sorted.len() - 1],
            median: median_sorted(&sorted),
            median_abs: median_sorted(&abs),
        })
    }

    pub fn spread(&self) -> f64 {
        self.max - self.min
    }
}

fn median_sorted(v: &[f64]) -> f64 {
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Population standard deviation.
pub fn stdev(values: &[f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    (values.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constancy_uses_relative_scale() {
        let tol = Tolerances::default();
        let flat = Stats::of(&[1000.0, 1000.0005, 999.9998]).unwrap();
        assert!(tol.is_constant(&flat));
        let wobbly = Stats::of(&[0.0, 3e-6]).unwrap();
        assert!(!tol.is_constant(&wobbly));
    }

    #[test]
    fn median_of_even_and_odd() {
        assert_eq!(Stats::of(&[3.0, 1.0, 2.0]).unwrap().median, 2.0);
        assert_eq!(Stats::of(&[4.0, 1.0, 2.0, 3.0]).unwrap().median, 2.5);
        assert!(Stats::of(&[]).is_none());
        assert!(Stats::of(&[f64::NAN]).is_none());
    }

    #[test]
    fn named_lookup_round_trips() {
        let mut tol = Tolerances::default();
        for name in Tolerances::NAMES {
            assert!(tol.set(name, 0.5));
            assert_eq!(tol.get(name), Some(0.5));
        }
        assert!(!tol.set("nope", 1.0));
    }
}
