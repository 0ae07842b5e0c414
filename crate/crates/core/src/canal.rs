//! Canal and tube surfaces around a unit-speed spine, their envelope identities, radius
//! laws, and the parameter curves of tubes that are isophotes.

use std::f64::consts::{FRAC_PI_2, PI};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::curve::{frenet_at, FrenetData, HelixKind, HelixVerdict, SpaceCurve};
use crate::error::{GeomError, Result};
use crate::numeric::{diff1, diff2};
use crate::surface::{darboux_along, CurveOnSurface, DarbouxSample, Domain, ParamSurface, SurfaceSource};
use crate::tolerance::{Stats, Tolerances};
use crate::{Vec2, Vec3};

type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// `r(s)` with `r'(s)` and optionally `r''(s)` (differences otherwise).
#[derive(Clone)]
pub struct RadiusFunction {
    r: ScalarFn,
    dr: ScalarFn,
    ddr: Option<ScalarFn>,
    label: String,
}

impl std::fmt::Debug for RadiusFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("RadiusFunction").field("label", &self.label).finish()
    }
}

impl RadiusFunction {
    pub fn constant(r: f64) -> Self {
        Self {
            r: Arc::new(move |_| r),
            dr: Arc::new(|_| 0.0),
            ddr: Some(Arc::new(|_| 0.0)),
            label: format!("constant {r}"),
        }
    }

    /// `r(s) = slope s + c`.
    pub fn linear(slope: f64, c: f64) -> Self {
        Self {
            r: Arc::new(move |s| slope * s + c),
            dr: Arc::new(move |_| slope),
            ddr: Some(Arc::new(|_| 0.0)),
            label: format!("linear {slope} s + {c}"),
        }
    }

    pub fn from_fns(
        r: impl Fn(f64) -> f64 + Send + Sync + 'static,
        dr: impl Fn(f64) -> f64 + Send + Sync + 'static,
        label: impl Into<String>,
    ) -> Self {
        Self {
            r: Arc::new(r),
            dr: Arc::new(dr),
            ddr: None,
            label: label.into(),
        }
    }

    pub fn with_second(mut self, ddr: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        self.ddr = Some(Arc::new(ddr));
        self
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn value(&self, s: f64) -> f64 {
        (self.r)(s)
    }

    pub fn slope(&self, s: f64) -> f64 {
        (self.dr)(s)
    }

    pub fn second(&self, s: f64) -> f64 {
        match &self.ddr {
            Some(f) => f(s),
            None => diff1(|x| (self.dr)(x), s, 1e-3),
        }
    }
}

/// The `-+` of the canal parametrization: `Minus` takes the upper sign.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Branch {
    #[default]
    Minus,
    Plus,
}

impl Branch {
    pub fn sign(self) -> f64 {
        match self {
            Branch::Minus => -1.0,
            Branch::Plus => 1.0,
        }
    }

    pub const BOTH: [Branch; 2] = [Branch::Minus, Branch::Plus];
}

/// Spine, radius and branch of `K(s, v) = C - r r' T + e r sqrt(1 - r'^2) (cos v n + sin v b)`
/// with `e = -1` for [`Branch::Minus`].
#[derive(Debug, Clone)]
pub struct CanalSpec {
    pub spine: SpaceCurve,
    pub radius: RadiusFunction,
    pub branch: Branch,
    pub s_range: (f64, f64),
    pub v_range: (f64, f64),
    pub tol: Tolerances,
}

/// Points checked when validating a spec.
const VALIDATION_SAMPLES: usize = 257;

impl CanalSpec {
    /// Checks `r > 0`, `|r'| < 1` and `kappa > eps_deg` on a uniform sample of the spine's range.
    pub fn new(spine: SpaceCurve, radius: RadiusFunction, branch: Branch, tol: &Tolerances) -> Result<Self> {
        if !spine.is_unit_speed() {
            let (a, _) = spine.range();
            return Err(GeomError::NotUnitSpeed {
                s: a,
                speed: spine.speed(a),
            });
        }
        let s_range = spine.range();
        for s in spine.sample_params(VALIDATION_SAMPLES) {
            let r = radius.value(s);
            if !(r > 0.0) {
                return Err(GeomError::DomainViolation(format!(
                    "radius r({s}) = {r} is not positive"
                )));
            }
            let slope = radius.slope(s);
            if !(slope.abs() < 1.0) {
                return Err(GeomError::RadiusSlopeTooLarge { s, slope });
            }
            frenet_at(&spine, s, tol)?;
        }
        Ok(Self {
            spine,
            radius,
            branch,
            s_range,
            v_range: (0.0, 2.0 * PI),
            tol: *tol,
        })
    }

    pub fn tube(spine: SpaceCurve, r: f64, branch: Branch, tol: &Tolerances) -> Result<Self> {
        Self::new(spine, RadiusFunction::constant(r), branch, tol)
    }

    pub fn with_branch(mut self, branch: Branch) -> Self {
        self.branch = branch;
        self
    }

    pub fn is_tube(&self) -> bool {
        self.spine
            .sample_params(VALIDATION_SAMPLES)
            .iter()
            .all(|&s| self.radius.slope(s) == 0.0)
    }

    fn frenet(&self, s: f64) -> FrenetData {
        // validated at construction; points between samples share the same regularity
        frenet_at(&self.spine, s, &self.tol).unwrap_or_else(|_| {
            let mut f = frenet_at(&self.spine, s + 1e-9, &self.tol).expect("spine curvature vanishes");
            f.s = s;
            f
        })
    }

    /// `K(s, v)`.
    pub fn point(&self, s: f64, v: f64) -> Vec3 {
        let f = self.frenet(s);
        let (r, dr) = (self.radius.value(s), self.radius.slope(s));
        let q = r * (1.0 - dr * dr).sqrt();
        let e = f.normal * v.cos() + f.binormal * v.sin();
        f.point - f.tangent * (r * dr) + e * (self.branch.sign() * q)
    }
}

struct CanalSource {
    spec: CanalSpec,
}

impl CanalSource {
    fn ks(&self, s: f64, v: f64) -> Vec3 {
        let spec = &self.spec;
        let f = spec.frenet(s);
        let (r, dr, ddr) = (spec.radius.value(s), spec.radius.slope(s), spec.radius.second(s));
        let root = (1.0 - dr * dr).sqrt();
        let p = r * dr;
        let dp = dr * dr + r * ddr;
        let q = r * root;
        let dq = dr * root - r * dr * ddr / root;
        let (sv, cv) = v.sin_cos();
        let e = f.normal * cv + f.binormal * sv;
        let ev = -f.normal * sv + f.binormal * cv;
        let es = -f.tangent * (f.kappa * cv) + ev * f.tau;
        let sign = spec.branch.sign();
        f.tangent * (1.0 - dp) - f.normal * (p * f.kappa) + (e * dq + es * q) * sign
    }
}

impl SurfaceSource for CanalSource {
    fn point(&self, s: f64, v: f64) -> Vec3 {
        self.spec.point(s, v)
    }

    fn partials(&self, s: f64, v: f64) -> Option<[Vec3; 2]> {
        let spec = &self.spec;
        let f = spec.frenet(s);
        let (r, dr) = (spec.radius.value(s), spec.radius.slope(s));
        let q = r * (1.0 - dr * dr).sqrt();
        let ev = -f.normal * v.sin() + f.binormal * v.cos();
        Some([self.ks(s, v), ev * (spec.branch.sign() * q)])
    }

    fn second_partials(&self, s: f64, v: f64) -> Option<[Vec3; 3]> {
        let spec = &self.spec;
        let f = spec.frenet(s);
        let (r, dr, ddr) = (spec.radius.value(s), spec.radius.slope(s), spec.radius.second(s));
        let root = (1.0 - dr * dr).sqrt();
        let q = r * root;
        let dq = dr * root - r * dr * ddr / root;
        let (sv, cv) = v.sin_cos();
        let e = f.normal * cv + f.binormal * sv;
        let ev = -f.normal * sv + f.binormal * cv;
        let esv = f.tangent * (f.kappa * sv) - e * f.tau;
        let sign = spec.branch.sign();
        let kss = diff1(|x| self.ks(x, v), s, 1e-3);
        Some([kss, (ev * dq + esv * q) * sign, -e * (sign * q)])
    }
}

/// The canal surface as a [`ParamSurface`] on `s_range x [0, 2 pi)`, periodic in `v` and in
/// `s` when the spine closes up. Its normal is oriented as `(K - C) / r`.
pub fn canal_surface(spec: &CanalSpec) -> ParamSurface {
    let closed = spec.spine.is_closed(1e-8);
    let name = if spec.is_tube() { "tube" } else { "canal" };
    ParamSurface::from_source(
        CanalSource { spec: spec.clone() },
        Domain {
            u: spec.s_range,
            v: spec.v_range,
        },
        [closed, true],
    )
    .with_name(name)
    // S_s x S_v points towards the spine on both branches
    .with_flipped_normal(true)
}

/// `N = -r' T + e sqrt(1 - r'^2) (cos v n + sin v b)`.
pub fn canal_unit_normal(spec: &CanalSpec, s: f64, v: f64) -> Vec3 {
    let f = spec.frenet(s);
    let dr = spec.radius.slope(s);
    let e = f.normal * v.cos() + f.binormal * v.sin();
    -f.tangent * dr + e * (spec.branch.sign() * (1.0 - dr * dr).sqrt())
}

/// `(|K - C| - r, <K - C, C'> + r r')`.
pub fn envelope_residuals(spec: &CanalSpec, s: f64, v: f64) -> [f64; 2] {
    let f = spec.frenet(s);
    let k = spec.point(s, v) - f.point;
    let (r, dr) = (spec.radius.value(s), spec.radius.slope(s));
    [k.norm() - r, k.dot(&f.tangent) + r * dr]
}

/// Unit-speed parameter curve `s -> K(s, v0)` over the full spine range.
pub fn parameter_curve(spec: &CanalSpec, v0: f64, quad_tol: f64) -> Result<CurveOnSurface> {
    let surface = canal_surface(spec);
    let (a, b) = spec.s_range;
    CurveOnSurface::line(surface, Vec2::new(a, v0), Vec2::new(1.0, 0.0), (0.0, b - a)).arclength(quad_tol, &spec.tol)
}

/// A Darboux sample of a curve on a canal surface with its canal coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CanalSample {
    /// Spine parameter.
    pub s: f64,
    pub v: f64,
    pub darboux: DarbouxSample,
}

pub fn parameter_curve_samples(spec: &CanalSpec, v0: f64, samples: usize) -> Result<Vec<CanalSample>> {
    let curve = parameter_curve(spec, v0, 1e-12)?;
    let ds = darboux_along(&curve, samples, &spec.tol)?;
    Ok(ds
        .into_iter()
        .map(|d| CanalSample {
            s: d.uv.x,
            v: d.uv.y,
            darboux: d,
        })
        .collect())
}

/// Residuals of the identity
/// `-r' <T,d> -+ sqrt(1-r'^2) cos(v+phi) <B,d> + (sqrt(1-r'^2) sin(v+phi) - 1) <N,d> = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Theorem4Report {
    /// Darboux data of the curve itself, `[Minus, Plus]`.
    pub isophote_frame: [f64; 2],
    pub best: f64,
    pub best_branch: Branch,
    /// `<T,d>`, `<B,d>`, `<N,d>` replaced by their axis-formula values (with `sin(theta)`).
    pub substituted: f64,
    /// As `substituted` but `<B,d> = +- k_n / sqrt(k_n^2 + tau_g^2)` without `sin(theta)`.
    pub substituted_without_sin: f64,
    /// Spine tangent, canal normal `N`, `B = N x T_C` and the angle of `N` against the
    /// spine's `(n, b)`, `[Minus, Plus]`.
    pub spine_frame: [f64; 2],
}

fn lhs(dr: f64, v_phi: f64, e: f64, td: f64, bd: f64, nd: f64) -> f64 {
    let root = (1.0 - dr * dr).sqrt();
    -dr * td + e * root * v_phi.cos() * bd + (root * v_phi.sin() - 1.0) * nd
}

pub fn theorem4_residual(spec: &CanalSpec, samples: &[CanalSample], d: Vec3, theta: f64) -> Result<Theorem4Report> {
    if samples.is_empty() {
        return Err(GeomError::TooFewSamples { required: 1, got: 0 });
    }
    let mut iso = [0.0f64; 2];
    let mut sub = [0.0f64; 2];
    let mut sub_nosin = [0.0f64; 4];
    let mut spine = [0.0f64; 2];
    let (st, ct) = theta.sin_cos();
    for cs in samples {
        let x = &cs.darboux;
        let w2 = x.gauss_speed_sq();
        let phi = x
            .phi
            .ok_or(GeomError::DegenerateNormalData { s: x.s, value: x.kappa })?;
        if !(w2 >= spec.tol.eps_deg * spec.tol.eps_deg) {
            return Err(GeomError::DegenerateNormalData { s: x.s, value: w2 });
        }
        let w = w2.sqrt();
        let dr = spec.radius.slope(cs.s);
        let (td, bd, nd) = (x.tangent.dot(&d), x.tangent_normal.dot(&d), x.normal.dot(&d));
        let f = spec.frenet(cs.s);
        let n_c = canal_unit_normal(spec, cs.s, cs.v);
        let b_c = n_c.cross(&f.tangent);
        let phi_c = n_c.dot(&f.normal).atan2(n_c.dot(&f.binormal));
        for (k, br) in Branch::BOTH.iter().enumerate() {
            let e = br.sign();
            iso[k] = iso[k].max(lhs(dr, cs.v + phi, e, td, bd, nd).abs());
            // the axis branch is tied to the surface branch sign here; both are scanned below
            let t_sub = e * x.tau_g / w * st;
            let b_sub = -e * x.k_n / w * st;
            sub[k] = sub[k].max(lhs(dr, cs.v + phi, e, t_sub, b_sub, ct).abs());
            for (j, eb) in [1.0, -1.0].iter().enumerate() {
                let b_nosin = eb * x.k_n / w;
                sub_nosin[2 * k + j] = sub_nosin[2 * k + j].max(lhs(dr, cs.v + phi, e, td, b_nosin, ct).abs());
            }
            spine[k] = spine[k].max(lhs(dr, cs.v + phi_c, e, f.tangent.dot(&d), b_c.dot(&d), n_c.dot(&d)).abs());
        }
    }
    let (best, best_branch) = if iso[0] <= iso[1] {
        (iso[0], Branch::Minus)
    } else {
        (iso[1], Branch::Plus)
    };
    Ok(Theorem4Report {
        isophote_frame: iso,
        best,
        best_branch,
        substituted: sub[0].min(sub[1]),
        substituted_without_sin: sub_nosin.iter().copied().fold(f64::INFINITY, f64::min),
        spine_frame: spine,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RadiusLawKind {
    LinearCor3a,
    IntegralCor3b,
    LinearProp1,
    Constant,
}

/// A radius law whose slope has been checked against its defining relation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadiusLaw {
    pub kind: RadiusLawKind,
    pub theta: Option<f64>,
    pub v: Option<f64>,
    pub phi: Option<f64>,
    pub beta: Option<f64>,
    /// `+1` or `-1` for the `-+` choice where the law has one.
    pub sign: Option<f64>,
    /// `lambda`, `omega`, or the constant integrand.
    pub slope: f64,
    pub residual: f64,
    /// Whether the side condition printed with the law holds at these parameters.
    pub printed_condition_holds: Option<bool>,
    pub roots: Vec<f64>,
}

impl RadiusLaw {
    pub fn constant() -> Self {
        Self {
            kind: RadiusLawKind::Constant,
            theta: None,
            v: None,
            phi: None,
            beta: None,
            sign: None,
            slope: 0.0,
            residual: 0.0,
            printed_condition_holds: None,
            roots: vec![0.0],
        }
    }

    /// `r(s) = slope s + c`.
    pub fn radius(&self, c: f64) -> RadiusFunction {
        if self.slope == 0.0 {
            RadiusFunction::constant(c)
        } else {
            RadiusFunction::linear(self.slope, c)
        }
    }
}

/// Residual bound for the linear laws.
pub const LINEAR_LAW_TOL: f64 = 1e-10;
/// Residual bound for the integral law.
pub const INTEGRAL_LAW_TOL: f64 = 1e-12;

/// `lambda = sqrt(X^2 - 1) / X` with `X = tan(theta) cos(v+theta) -+ sin(v+theta)` (`sign` picks
/// the upper sign when negative), checked against
/// `1 - lambda^2 = 1 / (cos^2(v+theta) (tan(theta) -+ tan(v+theta))^2)`.
pub fn radius_law_linear_cor3a(theta: f64, v: f64, sign: f64) -> Result<RadiusLaw> {
    let e = if sign < 0.0 { -1.0 } else { 1.0 };
    let c = (v + theta).cos();
    if c.abs() < 1e-12 {
        return Err(GeomError::DomainViolation(format!("cos(v + theta) = {c:e}")));
    }
    let x = theta.tan() * c + e * (v + theta).sin();
    if !(x * x > 1.0) {
        return Err(GeomError::DomainViolation(format!(
            "(tan theta cos(v+theta) -+ sin(v+theta))^2 = {} <= 1",
            x * x
        )));
    }
    let lambda = (x * x - 1.0).sqrt() / x;
    let rhs = 1.0 / (c * c * (theta.tan() + e * (v + theta).tan()).powi(2));
    let residual = ((1.0 - lambda * lambda) - rhs).abs();
    let ct = theta.cos();
    let printed = if e < 0.0 {
        ct < v.sin() && v.sin() < -ct
    } else {
        (v + 2.0 * theta).sin().abs() > ct
    };
    let roots = vec![(1.0 - rhs).max(0.0).sqrt(), -(1.0 - rhs).max(0.0).sqrt()];
    if residual > LINEAR_LAW_TOL {
        return Err(GeomError::FormulaInconsistent {
            value: lambda,
            residual,
            tol: LINEAR_LAW_TOL,
            roots,
        });
    }
    Ok(RadiusLaw {
        kind: RadiusLawKind::LinearCor3a,
        theta: Some(theta),
        v: Some(v),
        phi: None,
        beta: None,
        sign: Some(e),
        slope: lambda,
        residual,
        printed_condition_holds: Some(printed),
        roots,
    })
}

/// Constant integrand `tan(beta) / sqrt(tan^2(beta) + cos^2(v+phi))`, checked against
/// `(tan^2(beta) + cos^2(v+phi)) r'^2 - tan^2(beta) = 0`.
pub fn radius_law_integral_cor3b(beta: f64, v: f64, phi: f64) -> Result<RadiusLaw> {
    if !(beta > 0.0 && beta < FRAC_PI_2) {
        return Err(GeomError::DomainViolation(format!("beta = {beta} outside (0, pi/2)")));
    }
    let t2 = beta.tan().powi(2);
    let c2 = (v + phi).cos().powi(2);
    let slope = beta.tan() / (t2 + c2).sqrt();
    let residual = ((t2 + c2) * slope * slope - t2).abs();
    let roots = vec![slope, -slope];
    if residual > INTEGRAL_LAW_TOL {
        return Err(GeomError::FormulaInconsistent {
            value: slope,
            residual,
            tol: INTEGRAL_LAW_TOL,
            roots,
        });
    }
    Ok(RadiusLaw {
        kind: RadiusLawKind::IntegralCor3b,
        theta: None,
        v: Some(v),
        phi: Some(phi),
        beta: Some(beta),
        sign: None,
        slope,
        residual,
        printed_condition_holds: None,
        roots,
    })
}

/// Roots of `(l1^2 + l2^2 sin^2 v) x^2 + 2 l1^2 x + l1^2 - l2^2 sin^2 v = 0`,
/// `l1 = cos(theta)`, `l2 = sin(theta)`.
pub fn prop1_quadratic(theta: f64, v: f64) -> ([f64; 3], Vec<f64>) {
    let (l1, l2) = (theta.cos(), theta.sin());
    let s2 = v.sin().powi(2);
    let a = l1 * l1 + l2 * l2 * s2;
    let b = 2.0 * l1 * l1;
    let c = l1 * l1 - l2 * l2 * s2;
    let disc = b * b - 4.0 * a * c;
    let roots = if disc >= 0.0 {
        let r = disc.sqrt();
        vec![(-b + r) / (2.0 * a), (-b - r) / (2.0 * a)]
    } else {
        Vec::new()
    };
    ([a, b, c], roots)
}

/// `omega = (-1 + sin^2(v) tan(theta)) / (1 + sin^2(v) tan^2(theta))`, checked as a root of
/// [`prop1_quadratic`].
pub fn radius_law_prop1(theta: f64, v: f64) -> Result<RadiusLaw> {
    let t = theta.tan();
    let s2 = v.sin().powi(2);
    if !(t > 1.0) {
        return Err(GeomError::DomainViolation(format!("tan theta = {t} must exceed 1")));
    }
    if !(-1.0 + s2 * t > 0.0) {
        return Err(GeomError::DomainViolation(format!(
            "-1 + sin^2 v tan theta = {} must be positive",
            -1.0 + s2 * t
        )));
    }
    let omega = (-1.0 + s2 * t) / (1.0 + s2 * t * t);
    let ([a, b, c], roots) = prop1_quadratic(theta, v);
    let residual = (a * omega * omega + b * omega + c).abs();
    if residual > LINEAR_LAW_TOL {
        return Err(GeomError::FormulaInconsistent {
            value: omega,
            residual,
            tol: LINEAR_LAW_TOL,
            roots,
        });
    }
    Ok(RadiusLaw {
        kind: RadiusLawKind::LinearProp1,
        theta: Some(theta),
        v: Some(v),
        phi: None,
        beta: None,
        sign: None,
        slope: omega,
        residual,
        printed_condition_holds: Some(true),
        roots,
    })
}

/// Which statement predicts a tube parameter curve to be an isophote.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TubeIsophoteSource {
    /// General-helix spine, `v0 = pi/2 + k pi`, axis of the helix.
    GeneralHelix,
    /// Slant-helix spine, `v0 = k pi`, axis of the slant helix.
    SlantHelix,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TubeIsophote {
    pub v0: f64,
    pub d: Vec3,
    pub source: TubeIsophoteSource,
    /// `max |d(s) - d|` of the per-sample axis estimates.
    pub axis_spread: f64,
}

/// Mean of per-sample directions and the largest deviation from it.
fn mean_axis(field: &[Vec3]) -> (Vec3, f64) {
    let d = field.iter().sum::<Vec3>().normalize();
    let spread = field.iter().map(|x| (x - d).norm()).fold(0.0, f64::max);
    (d, spread)
}

/// Parameter values `v0` whose tube curves `s -> K(s, v0)` are isophotes, with their axes:
/// the unit Darboux vector `(tau T + kappa b) / sqrt(kappa^2 + tau^2)` for general helices and
/// `cos(theta) n + sin(theta) (tau T + kappa b) / sqrt(kappa^2 + tau^2)`, `cot(theta) = sigma`,
/// for slant helices.
pub fn tube_parameter_isophotes(
    spine: &SpaceCurve,
    verdict: &HelixVerdict,
    samples: usize,
    tol: &Tolerances,
) -> Result<Vec<TubeIsophote>> {
    if verdict.kind == HelixKind::Neither {
        return Err(GeomError::NotAHelix);
    }
    let frames: Vec<FrenetData> = spine
        .sample_params(samples.max(2))
        .into_iter()
        .map(|s| frenet_at(spine, s, tol))
        .collect::<Result<_>>()?;
    let darboux: Vec<Vec3> = frames
        .iter()
        .map(|f| (f.tangent * f.tau + f.binormal * f.kappa).normalize())
        .collect();
    let mut out = Vec::new();
    if verdict.kind.is_general() {
        let (d, spread) = mean_axis(&darboux);
        for v0 in [FRAC_PI_2, 3.0 * FRAC_PI_2] {
            out.push(TubeIsophote {
                v0,
                d,
                source: TubeIsophoteSource::GeneralHelix,
                axis_spread: spread,
            });
        }
    }
    if verdict.kind.is_slant() {
        let theta = 1.0f64.atan2(verdict.sigma.median);
        let field: Vec<Vec3> = frames
            .iter()
            .zip(&darboux)
            .map(|(f, dv)| f.normal * theta.cos() + dv * theta.sin())
            .collect();
        let (d, spread) = mean_axis(&field);
        for v0 in [0.0, PI] {
            out.push(TubeIsophote {
                v0,
                d,
                source: TubeIsophoteSource::SlantHelix,
                axis_spread: spread,
            });
        }
    }
    out.sort_by(|a, b| a.v0.total_cmp(&b.v0));
    Ok(out)
}

/// Spread of `<N(s, v0), d>` along a tube parameter curve.
pub fn parameter_curve_illumination(spec: &CanalSpec, v0: f64, d: &Vec3, samples: usize) -> Option<Stats> {
    let values: Vec<f64> = spec
        .spine
        .sample_params(samples)
        .into_iter()
        .map(|s| canal_unit_normal(spec, s, v0).dot(d))
        .collect();
    Stats::of(&values)
}

/// Second-order spot check of the assembled partials (used by tests and the mesh exporter).
pub fn partials_consistency(surface: &ParamSurface, s: f64, v: f64) -> f64 {
    let [ps, pv] = surface.partials(s, v);
    let fs = diff1(|x| surface.point(x, v), s, 1e-3);
    let fv = diff1(|y| surface.point(s, y), v, 1e-3);
    let [_, _, pvv] = surface.second_partials(s, v);
    let fvv = diff2(|y| surface.point(s, y), v, 4e-3);
    (ps - fs).norm().max((pv - fv).norm()).max((pvv - fvv).norm())
}
