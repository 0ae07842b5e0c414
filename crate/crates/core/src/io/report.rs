//! Verification reports. Every pass/fail record names the threshold it used and its value.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::scene::Value;
use crate::tolerance::Tolerances;

/// Check thresholds of the job verbs that are not core tolerances.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Limits {
    /// Distance of the Gauss-map image from its fitted plane.
    pub gauss_plane_tol: f64,
    /// `max |kbar_g - mu|`.
    pub gauss_mu_tol: f64,
    /// stdev of `<N, d>` along general-helix tube curves.
    pub prop2_stdev_tol: f64,
    /// stdev of `<N, d>` along slant-helix tube curves.
    pub prop3_stdev_tol: f64,
    /// Lower bound a negative control must exceed.
    pub control_min_stdev: f64,
    pub theorem4_tol: f64,
    pub theorem4_control_min: f64,
    /// Canal envelope residuals.
    pub envelope_tol: f64,
    /// Angle between closed-form and cross-product canal normals.
    pub normal_angle_tol: f64,
    /// Residual of the linear radius laws.
    pub law_tol: f64,
    /// Residual of the integral radius law.
    pub integral_law_tol: f64,
    /// Pointwise curvature and sigma checks of the worked example.
    pub example1_tol: f64,
    /// Degrees.
    pub theta_deg_tol: f64,
    /// Spread a quantity must exceed to count as not constant.
    pub nonconstant_min_spread: f64,
}

impl Default for Limits {
    fn default() -> Self {
        Self {
            gauss_plane_tol: 1e-6,
            gauss_mu_tol: 1e-5,
            prop2_stdev_tol: 1e-9,
            prop3_stdev_tol: 1e-8,
            control_min_stdev: 1e-3,
            theorem4_tol: 1e-8,
            theorem4_control_min: 1e-4,
            envelope_tol: 1e-8,
            normal_angle_tol: 1e-7,
            law_tol: 1e-10,
            integral_law_tol: 1e-12,
            example1_tol: 1e-6,
            theta_deg_tol: 0.01,
            nonconstant_min_spread: 0.1,
        }
    }
}

impl Limits {
    pub const NAMES: [&'static str; 14] = [
        "gauss_plane_tol",
        "gauss_mu_tol",
        "prop2_stdev_tol",
        "prop3_stdev_tol",
        "control_min_stdev",
        "theorem4_tol",
        "theorem4_control_min",
        "envelope_tol",
        "normal_angle_tol",
        "law_tol",
        "integral_law_tol",
        "example1_tol",
        "theta_deg_tol",
        "nonconstant_min_spread",
    ];

    fn slot(&mut self, name: &str) -> Option<&mut f64> {
        Some(match name {
            "gauss_plane_tol" => &mut self.gauss_plane_tol,
            "gauss_mu_tol" => &mut self.gauss_mu_tol,
            "prop2_stdev_tol" => &mut self.prop2_stdev_tol,
            "prop3_stdev_tol" => &mut self.prop3_stdev_tol,
            "control_min_stdev" => &mut self.control_min_stdev,
            "theorem4_tol" => &mut self.theorem4_tol,
            "theorem4_control_min" => &mut self.theorem4_control_min,
            "envelope_tol" => &mut self.envelope_tol,
            "normal_angle_tol" => &mut self.normal_angle_tol,
            "law_tol" => &mut self.law_tol,
            "integral_law_tol" => &mut self.integral_law_tol,
            "example1_tol" => &mut self.example1_tol,
            "theta_deg_tol" => &mut self.theta_deg_tol,
            "nonconstant_min_spread" => &mut self.nonconstant_min_spread,
            _ => return None,
        })
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        let mut copy = *self;
        copy.slot(name).map(|x| *x)
    }

    pub fn set(&mut self, name: &str, value: f64) -> bool {
        match self.slot(name) {
            Some(x) => {
                *x = value;
                true
            }
            None => false,
        }
    }
}

/// Tolerances and limits in effect for one job.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Thresholds {
    pub tol: Tolerances,
    pub limits: Limits,
}

impl Thresholds {
    pub fn get(&self, name: &str) -> f64 {
        self.tol
            .get(name)
            .or_else(|| self.limits.get(name))
            .unwrap_or_else(|| panic!("unknown threshold {name}"))
    }

    pub fn set(&mut self, name: &str, value: f64) -> bool {
        self.tol.set(name, value) || self.limits.set(name, value)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Comparison {
    /// `value <= limit`
    AtMost,
    /// `value > limit`
    Exceeds,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub comparison: Comparison,
    pub tolerance: String,
    pub limit: f64,
    pub pass: bool,
}

impl Check {
    pub fn at_most(name: impl Into<String>, value: f64, th: &Thresholds, tolerance: &str) -> Self {
        let limit = th.get(tolerance);
        Self {
            name: name.into(),
            value,
            comparison: Comparison::AtMost,
            tolerance: tolerance.into(),
            limit,
            pass: value <= limit,
        }
    }

    pub fn exceeds(name: impl Into<String>, value: f64, th: &Thresholds, tolerance: &str) -> Self {
        let limit = th.get(tolerance);
        Self {
            name: name.into(),
            value,
            comparison: Comparison::Exceeds,
            tolerance: tolerance.into(),
            limit,
            pass: value > limit,
        }
    }

    /// A comparison against a limit assembled from several thresholds, described by `tolerance`.
    pub fn custom(name: impl Into<String>, value: f64, tolerance: impl Into<String>, limit: f64) -> Self {
        Self {
            name: name.into(),
            value,
            comparison: Comparison::AtMost,
            tolerance: tolerance.into(),
            limit,
            pass: value <= limit,
        }
    }

    /// A boolean outcome whose underlying comparison already used `tolerance`.
    pub fn holds(name: impl Into<String>, ok: bool, th: &Thresholds, tolerance: &str) -> Self {
        Self {
            name: name.into(),
            value: if ok { 0.0 } else { 1.0 },
            comparison: Comparison::AtMost,
            tolerance: tolerance.into(),
            limit: th.get(tolerance),
            pass: ok,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Status {
    Pass,
    Fail,
    Error,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JobReport {
    pub index: usize,
    pub verb: String,
    pub args: BTreeMap<String, Value>,
    pub status: Status,
    pub checks: Vec<Check>,
    pub values: serde_json::Map<String, serde_json::Value>,
    pub artifacts: Vec<String>,
    pub notes: Vec<String>,
    pub error: Option<String>,
    pub thresholds: Thresholds,
}

impl JobReport {
    pub fn new(index: usize, verb: &str, args: BTreeMap<String, Value>, thresholds: Thresholds) -> Self {
        Self {
            index,
            verb: verb.to_string(),
            args,
            status: Status::Pass,
            checks: Vec::new(),
            values: serde_json::Map::new(),
            artifacts: Vec::new(),
            notes: Vec::new(),
            error: None,
            thresholds,
        }
    }

    pub fn check(&mut self, c: Check) {
        self.checks.push(c);
    }

    pub fn value(&mut self, key: &str, v: impl Serialize) {
        self.values.insert(
            key.to_string(),
            serde_json::to_value(v).unwrap_or(serde_json::Value::Null),
        );
    }

    pub fn finish(&mut self) {
        self.status = if self.error.is_some() {
            Status::Error
        } else if self.checks.iter().all(|c| c.pass) {
            Status::Pass
        } else {
            Status::Fail
        };
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub created: String,
    pub seed: u64,
    pub jobs: Vec<JobReport>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.jobs.iter().all(JobReport::passed)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "isophote verification report  {}  seed {}", self.created, self.seed);
        for j in &self.jobs {
            let _ = writeln!(s, "\n[{}] {}  {:?}", j.index, j.verb, j.status);
            for (k, v) in &j.args {
                let _ = writeln!(s, "    {k} = {}", value_text(v));
            }
            if let Some(e) = &j.error {
                let _ = writeln!(s, "  error: {e}");
            }
            for c in &j.checks {
                let op = match c.comparison {
                    Comparison::AtMost => "<=",
                    Comparison::Exceeds => ">",
                };
                let _ = writeln!(
                    s,
                    "  {} {:<40} {:>12.4e} {op} {} = {:e}",
                    if c.pass { "PASS" } else { "FAIL" },
                    c.name,
                    c.value,
                    c.tolerance,
                    c.limit
                );
            }
            for n in &j.notes {
                let _ = writeln!(s, "  note: {n}");
            }
            for a in &j.artifacts {
                let _ = writeln!(s, "  wrote {a}");
            }
        }
        let _ = writeln!(s, "\noverall: {}", if self.passed() { "PASS" } else { "FAIL" });
        s
    }
}

fn value_text(v: &Value) -> String {
    match v {
        Value::Number(x) => x.to_string(),
        Value::Angle(x) => format!("{x} rad ({} deg)", x.to_degrees()),
        Value::Vector(x) => format!("{x:?}"),
        Value::Text(t) => t.clone(),
        Value::Bool(b) => b.to_string(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub path: String,
    pub job: usize,
    pub verb: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub created: String,
    pub seed: u64,
    pub artifacts: Vec<ManifestEntry>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn thresholds_by_name() {
        let mut th = Thresholds::default();
        for n in Tolerances::NAMES.iter().chain(Limits::NAMES.iter()) {
            assert!(th.get(n) > 0.0);
            assert!(th.set(n, 0.5));
            assert_eq!(th.get(n), 0.5);
        }
        assert!(!th.set("nope", 1.0));
    }

    #[test]
    fn checks_cite_their_threshold() {
        let th = Thresholds::default();
        let c = Check::at_most("x", 1e-7, &th, "axis_tol");
        assert!(c.pass && c.limit == 1e-6 && c.tolerance == "axis_tol");
        assert!(!Check::at_most("nan", f64::NAN, &th, "axis_tol").pass);
        assert!(!Check::exceeds("y", 1e-5, &th, "control_min_stdev").pass);
    }
}
