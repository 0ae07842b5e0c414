//! Space curves, arc-length reparametrization, the Frenet apparatus and helix detection.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{GeomError, Result};
use crate::numeric::{diff1, diff_n, GaussLegendre, MonotoneCubic};
use crate::tolerance::{Stats, Tolerances};
use crate::Vec3;

/// A parametrized curve in R^3. Implementors supply whichever derivatives they know
/// in closed form; the rest fall back to Richardson-extrapolated central differences.
pub trait CurveSource: Send + Sync {
    fn point(&self, t: f64) -> Vec3;

    /// `k`-th derivative (1..=3) in closed form, if known.
    fn derivative(&self, _t: f64, _k: usize) -> Option<Vec3> {
        None
    }

    /// Position and first three derivatives computed together, if cheaper than one by one.
    fn jet(&self, _t: f64) -> Option<[Vec3; 4]> {
        None
    }
}

type Fn1 = Arc<dyn Fn(f64) -> Vec3 + Send + Sync>;

struct ClosureCurve {
    eval: Fn1,
    derivs: [Option<Fn1>; 3],
}

impl CurveSource for ClosureCurve {
    fn point(&self, t: f64) -> Vec3 {
        (self.eval)(t)
    }

    fn derivative(&self, t: f64, k: usize) -> Option<Vec3> {
        self.derivs[k - 1].as_ref().map(|f| f(t))
    }
}

/// A thrice-differentiable curve on a parameter interval.
#[derive(Clone)]
pub struct SpaceCurve {
    source: Arc<dyn CurveSource>,
    range: (f64, f64),
    unit_speed: bool,
    fd_scale: f64,
}

impl std::fmt::Debug for SpaceCurve {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SpaceCurve")
            .field("range", &self.range)
            .field("unit_speed", &self.unit_speed)
            .finish_non_exhaustive()
    }
}

impl SpaceCurve {
    pub fn from_fn(eval: impl Fn(f64) -> Vec3 + Send + Sync + 'static, range: (f64, f64)) -> Self {
        Self::from_source(
            ClosureCurve {
                eval: Arc::new(eval),
                derivs: [None, None, None],
            },
            range,
        )
    }

    /// Curve with closed-form first, second and third derivatives.
    pub fn from_fns(
        eval: impl Fn(f64) -> Vec3 + Send + Sync + 'static,
        d1: impl Fn(f64) -> Vec3 + Send + Sync + 'static,
        d2: impl Fn(f64) -> Vec3 + Send + Sync + 'static,
        d3: impl Fn(f64) -> Vec3 + Send + Sync + 'static,
        range: (f64, f64),
    ) -> Self {
        Self::from_source(
            ClosureCurve {
                eval: Arc::new(eval),
                derivs: [Some(Arc::new(d1)), Some(Arc::new(d2)), Some(Arc::new(d3))],
            },
            range,
        )
    }

    pub fn from_source(source: impl CurveSource + 'static, range: (f64, f64)) -> Self {
        Self {
            source: Arc::new(source),
            range,
            unit_speed: false,
            fd_scale: 1.0,
        }
    }

    pub fn with_unit_speed(mut self, unit_speed: bool) -> Self {
        self.unit_speed = unit_speed;
        self
    }

    /// Scales the finite-difference steps (parameter units per unit of default step).
    pub fn with_fd_scale(mut self, scale: f64) -> Self {
        self.fd_scale = scale;
        self
    }

    pub fn with_range(mut self, range: (f64, f64)) -> Self {
        self.range = range;
        self
    }

    pub fn range(&self) -> (f64, f64) {
        self.range
    }

    pub fn is_unit_speed(&self) -> bool {
        self.unit_speed
    }

    pub fn point(&self, t: f64) -> Vec3 {
        self.source.point(t)
    }

    /// `k`-th derivative, 0..=3.
    pub fn derivative(&self, t: f64, k: usize) -> Vec3 {
        if k == 0 {
            return self.source.point(t);
        }
        if let Some(d) = self.source.derivative(t, k) {
            return d;
        }
        // differentiate the highest-order closed form available
        for j in (1..k).rev() {
            if self.source.derivative(t, j).is_some() {
                let src = &self.source;
                return diff_n(|x| src.derivative(x, j).unwrap(), t, k - j, self.fd_scale);
            }
        }
        diff_n(|x| self.source.point(x), t, k, self.fd_scale)
    }

    /// Position and derivatives up to third order.
    pub fn jet(&self, t: f64) -> [Vec3; 4] {
        if let Some(j) = self.source.jet(t) {
            return j;
        }
        [
            self.point(t),
            self.derivative(t, 1),
            self.derivative(t, 2),
            self.derivative(t, 3),
        ]
    }

    pub fn speed(&self, t: f64) -> f64 {
        self.derivative(t, 1).norm()
    }

    /// `n` parameters spread uniformly over the range, endpoints included.
    pub fn sample_params(&self, n: usize) -> Vec<f64> {
        let (a, b) = self.range;
        if n == 1 {
            return vec![0.5 * (a + b)];
        }
        (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
    }

    /// True when both endpoints coincide within `tol`.
    pub fn is_closed(&self, tol: f64) -> bool {
        (self.point(self.range.0) - self.point(self.range.1)).norm() <= tol
    }
}

/// Cumulative arc length of a regular parametrization and its inverse.
pub(crate) struct ArcLengthMap {
    t: Vec<f64>,
    cum: Vec<f64>,
    inverse: MonotoneCubic,
    speed: Box<dyn Fn(f64) -> f64 + Send + Sync>,
    rule: GaussLegendre,
}

pub(crate) const ARC_NODES: usize = 256;

impl ArcLengthMap {
    pub(crate) fn build(
        speed: Box<dyn Fn(f64) -> f64 + Send + Sync>,
        range: (f64, f64),
        nodes: usize,
        quad_tol: f64,
        eps_deg: f64,
    ) -> Result<Self> {
        let (a, b) = range;
        if !(b > a) {
            return Err(GeomError::InvalidInput(format!("empty parameter range [{a}, {b}]")));
        }
        let rule = GaussLegendre::new(10);
        let t: Vec<f64> = (0..=nodes).map(|i| a + (b - a) * i as f64 / nodes as f64).collect();
        let mut cum = vec![0.0; nodes + 1];
        let panel_tol = quad_tol / nodes as f64;
        for i in 0..nodes {
            for x in rule.nodes_on(t[i], t[i + 1]).chain([t[i], t[i + 1]]) {
                let g = speed(x);
                if !(g >= eps_deg) {
                    return Err(GeomError::SingularSpeed { param: x, speed: g });
                }
            }
            cum[i + 1] = cum[i] + rule.integrate_adaptive(&*speed, t[i], t[i + 1], panel_tol);
        }
        let inverse = MonotoneCubic::new(cum.clone(), t.clone());
        Ok(Self {
            t,
            cum,
            inverse,
            speed,
            rule,
        })
    }

    pub(crate) fn length(&self) -> f64 {
        *self.cum.last().unwrap()
    }

    /// Arc length from the start of the range to `t` (extrapolates past either end).
    pub(crate) fn arc_length_at(&self, t: f64) -> f64 {
        let n = self.t.len();
        let i = self.t.partition_point(|&x| x <= t).clamp(1, n) - 1;
        self.cum[i] + self.rule.integrate(&*self.speed, self.t[i], t)
    }

    /// Parameter at arc length `s`: monotone-cubic guess polished by Newton on L(t) = s.
    pub(crate) fn param_at(&self, s: f64) -> f64 {
        let mut t = self.inverse.eval(s);
        let scale = self.length().max(1.0);
        for _ in 0..6 {
            let e = self.arc_length_at(t) - s;
            t -= e / (self.speed)(t);
            if e.abs() <= 1e-15 * scale {
                break;
            }
        }
        t
    }
}

/// Unit-speed view of a regular curve; derivatives by the chain rule through t(s).
struct ArcLengthCurve {
    base: SpaceCurve,
    map: ArcLengthMap,
}

impl ArcLengthCurve {
    fn jet_at(&self, s: f64) -> [Vec3; 4] {
        let t = self.map.param_at(s);
        let [p, c1, c2, c3] = self.base.jet(t);
        let g = c1.norm();
        let c12 = c1.dot(&c2);
        let g_t = c12 / g;
        let g_tt = (c2.norm_squared() + c1.dot(&c3)) / g - c12 * c12 / (g * g * g);
        let t1 = 1.0 / g;
        let t2 = -g_t / g.powi(3);
        let t3 = -g_tt / g.powi(4) + 3.0 * g_t * g_t / g.powi(5);
        [
            p,
            c1 * t1,
            c2 * (t1 * t1) + c1 * t2,
            c3 * t1.powi(3) + c2 * (3.0 * t1 * t2) + c1 * t3,
        ]
    }
}

impl CurveSource for ArcLengthCurve {
    fn point(&self, s: f64) -> Vec3 {
        self.base.point(self.map.param_at(s))
    }

    fn derivative(&self, s: f64, k: usize) -> Option<Vec3> {
        Some(self.jet_at(s)[k])
    }

    fn jet(&self, s: f64) -> Option<[Vec3; 4]> {
        Some(self.jet_at(s))
    }
}

/// Reparametrizes `curve` by arc length measured from the start of its range.
pub fn reparametrize_arclength(curve: &SpaceCurve, quad_tol: f64, tol: &Tolerances) -> Result<SpaceCurve> {
    let base = curve.clone();
    let speed_curve = curve.clone();
    let map = ArcLengthMap::build(
        Box::new(move |t| speed_curve.speed(t)),
        curve.range,
        ARC_NODES,
        quad_tol,
        tol.eps_deg,
    )?;
    let length = map.length();
    Ok(SpaceCurve::from_source(ArcLengthCurve { base, map }, (0.0, length))
        .with_unit_speed(true)
        .with_fd_scale(curve.fd_scale))
}

/// Total arc length over the curve's range.
pub fn arc_length(curve: &SpaceCurve, quad_tol: f64) -> f64 {
    let rule = GaussLegendre::new(10);
    let (a, b) = curve.range;
    let f = |t: f64| curve.speed(t);
    rule.integrate_adaptive(&f, a, b, quad_tol)
}

/// Frenet frame with curvature and torsion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrenetData {
    /// Curve parameter (arc length for unit-speed curves).
    pub s: f64,
    pub point: Vec3,
    pub tangent: Vec3,
    pub normal: Vec3,
    pub binormal: Vec3,
    pub kappa: f64,
    pub tau: f64,
}

/// Frenet apparatus at parameter `s`.
///
/// The formulas are parametrization-invariant (`kappa = |c' x c''| / |c'|^3`,
/// `tau = <c' x c'', c'''> / |c' x c''|^2`), so they reduce to `T = alpha'`,
/// `n = alpha'' / |alpha''|` and `tau = <alpha' x alpha'', alpha'''> / kappa^2`
/// on unit-speed curves.
pub fn frenet_at(curve: &SpaceCurve, s: f64, tol: &Tolerances) -> Result<FrenetData> {
    frenet_from_jet(s, &curve.jet(s), tol)
}

pub(crate) fn frenet_from_jet(s: f64, jet: &[Vec3; 4], tol: &Tolerances) -> Result<FrenetData> {
    let [p, c1, c2, c3] = *jet;
    let g = c1.norm();
    if !(g >= tol.eps_deg) {
        return Err(GeomError::SingularSpeed { param: s, speed: g });
    }
    let cross = c1.cross(&c2);
    let cn = cross.norm();
    let kappa = cn / (g * g * g);
    if !(kappa >= tol.eps_deg) {
        return Err(GeomError::VanishingCurvature { param: s, kappa });
    }
    let tangent = c1 / g;
    let binormal = cross / cn;
    let normal = binormal.cross(&tangent);
    let tau = cross.dot(&c3) / (cn * cn);
    Ok(FrenetData {
        s,
        point: p,
        tangent,
        normal,
        binormal,
        kappa,
        tau,
    })
}

/// Frenet-Serret residuals `(|T' - k n|, |n' + k T - t b|, |b' + t n|)` with frame
/// derivatives taken by finite differences with respect to arc length.
pub fn frenet_serret_residuals(curve: &SpaceCurve, s: f64, tol: &Tolerances) -> Result<[f64; 3]> {
    let f = frenet_at(curve, s, tol)?;
    let speed = curve.speed(s);
    let frame = |x: f64| {
        frenet_at(curve, x, tol)
            .map(|d| [d.tangent, d.normal, d.binormal])
            .unwrap_or([Vec3::zeros(); 3])
    };
    let h = 1e-3 * curve.fd_scale;
    let dt = diff1(|x| frame(x)[0], s, h) / speed;
    let dn = diff1(|x| frame(x)[1], s, h) / speed;
    let db = diff1(|x| frame(x)[2], s, h) / speed;
    Ok([
        (dt - f.normal * f.kappa).norm(),
        (dn + f.tangent * f.kappa - f.binormal * f.tau).norm(),
        (db + f.normal * f.tau).norm(),
    ])
}

/// `max |<e_i, e_j> - delta_ij|` together with `|b - T x n|`.
pub fn orthonormality_residual(f: &FrenetData) -> f64 {
    let e = [f.tangent, f.normal, f.binormal];
    let mut worst = (f.binormal - f.tangent.cross(&f.normal)).norm();
    for i in 0..3 {
        for j in 0..3 {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((e[i].dot(&e[j]) - target).abs());
        }
    }
    worst
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum HelixKind {
    GeneralHelix,
    SlantHelix,
    Both,
    Neither,
}

impl HelixKind {
    pub fn is_general(self) -> bool {
        matches!(self, HelixKind::GeneralHelix | HelixKind::Both)
    }

    pub fn is_slant(self) -> bool {
        matches!(self, HelixKind::SlantHelix | HelixKind::Both)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HelixVerdict {
    pub kind: HelixKind,
    pub tau_over_kappa: Stats,
    pub sigma: Stats,
    /// tau vanishes at every sample: a plane curve, reported as a (degenerate) general helix.
    pub planar: bool,
}

/// `tau / kappa` and `sigma = kappa^2 (tau/kappa)' / (kappa^2 + tau^2)^(3/2)` at parameter `t`,
/// the derivative taken with respect to arc length.
pub fn helix_invariants(curve: &SpaceCurve, t: f64, tol: &Tolerances) -> Result<(f64, f64)> {
    let f = frenet_at(curve, t, tol)?;
    let w2 = f.kappa * f.kappa + f.tau * f.tau;
    if !(w2 >= tol.eps_deg) {
        return Err(GeomError::VanishingCurvature {
            param: t,
            kappa: w2.sqrt(),
        });
    }
    let ratio = |x: f64| frenet_at(curve, x, tol).map(|d| d.tau / d.kappa).unwrap_or(f64::NAN);
    let d_ratio = diff1(ratio, t, 1e-3 * curve.fd_scale) / curve.speed(t);
    let sigma = f.kappa * f.kappa * d_ratio / w2.powf(1.5);
    Ok((f.tau / f.kappa, sigma))
}

/// Tests `tau/kappa` (general helix) and `sigma` (slant helix) for constancy over `samples`
/// uniformly spaced parameters.
pub fn classify_helix(curve: &SpaceCurve, samples: usize, tol: &Tolerances) -> Result<HelixVerdict> {
    if samples < 8 {
        return Err(GeomError::TooFewSamples {
            required: 8,
            got: samples,
        });
    }
    let mut ratios = Vec::with_capacity(samples);
    let mut sigmas = Vec::with_capacity(samples);
    let mut taus = Vec::with_capacity(samples);
    for t in curve.sample_params(samples) {
        let f = frenet_at(curve, t, tol)?;
        let (r, s) = helix_invariants(curve, t, tol)?;
        ratios.push(r);
        sigmas.push(s);
        taus.push(f.tau);
    }
    let bad = || GeomError::InvalidInput("non-finite curvature data".into());
    let tau_over_kappa = Stats::of(&ratios).ok_or_else(bad)?;
    let sigma = Stats::of(&sigmas).ok_or_else(bad)?;
    let planar = taus.iter().all(|t| t.abs() <= tol.const_atol);
    let general = tol.is_constant(&tau_over_kappa);
    let slant = tol.is_constant(&sigma);
    let kind = match (planar, general, slant) {
        (true, _, _) => HelixKind::GeneralHelix,
        (false, true, true) => HelixKind::Both,
        (false, true, false) => HelixKind::GeneralHelix,
        (false, false, true) => HelixKind::SlantHelix,
        (false, false, false) => HelixKind::Neither,
    };
    Ok(HelixVerdict {
        kind,
        tau_over_kappa,
        sigma,
        planar,
    })
}
