//! Parametric surfaces, curves lying on them, and the Darboux frame along such curves.

use std::f64::consts::PI;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::curve::{ArcLengthMap, CurveSource, SpaceCurve, ARC_NODES};
use crate::error::{GeomError, Result};
use crate::numeric::{diff1, diff2, diff_n, grid_derivative};
use crate::tolerance::Tolerances;
use crate::{Vec2, Vec3};

/// A map `(u, v) -> R^3`. Partial derivatives not supplied in closed form are
/// obtained by finite differences.
pub trait SurfaceSource: Send + Sync {
    fn point(&self, u: f64, v: f64) -> Vec3;

    /// `[S_u, S_v]`.
    fn partials(&self, _u: f64, _v: f64) -> Option<[Vec3; 2]> {
        None
    }

    /// `[S_uu, S_uv, S_vv]`.
    fn second_partials(&self, _u: f64, _v: f64) -> Option<[Vec3; 3]> {
        None
    }
}

type Fn2 = Arc<dyn Fn(f64, f64) -> Vec3 + Send + Sync>;

struct ClosureSurface {
    eval: Fn2,
}

impl SurfaceSource for ClosureSurface {
    fn point(&self, u: f64, v: f64) -> Vec3 {
        (self.eval)(u, v)
    }
}

/// Parameter rectangle `[u0, u1] x [v0, v1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Domain {
    pub u: (f64, f64),
    pub v: (f64, f64),
}

impl Domain {
    pub fn width(&self) -> f64 {
        self.u.1 - self.u.0
    }

    pub fn height(&self) -> f64 {
        self.v.1 - self.v.0
    }
}

/// A regular parametric surface with its domain and periodicity.
#[derive(Clone)]
pub struct ParamSurface {
    source: Arc<dyn SurfaceSource>,
    domain: Domain,
    periodic: [bool; 2],
    flip_normal: bool,
    name: String,
}

impl std::fmt::Debug for ParamSurface {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ParamSurface")
            .field("name", &self.name)
            .field("domain", &self.domain)
            .field("periodic", &self.periodic)
            .field("flip_normal", &self.flip_normal)
            .finish_non_exhaustive()
    }
}

/// Unit normal with its first partial derivatives, plus the surface partials used.
#[derive(Debug, Clone, Copy)]
pub struct NormalJet {
    pub normal: Vec3,
    pub normal_u: Vec3,
    pub normal_v: Vec3,
    pub su: Vec3,
    pub sv: Vec3,
    pub second: [Vec3; 3],
}

impl ParamSurface {
    pub fn from_fn(
        eval: impl Fn(f64, f64) -> Vec3 + Send + Sync + 'static,
        domain: Domain,
        periodic: [bool; 2],
    ) -> Self {
        Self::from_source(ClosureSurface { eval: Arc::new(eval) }, domain, periodic)
    }

    pub fn from_source(source: impl SurfaceSource + 'static, domain: Domain, periodic: [bool; 2]) -> Self {
        Self {
            source: Arc::new(source),
            domain,
            periodic,
            flip_normal: false,
            name: "surface".into(),
        }
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// Reverses the normal orientation (used where `S_u x S_v` points inward).
    pub fn with_flipped_normal(mut self, flip: bool) -> Self {
        self.flip_normal = flip;
        self
    }

    pub fn with_domain(mut self, domain: Domain) -> Self {
        self.domain = domain;
        self
    }

    pub fn with_periodic(mut self, periodic: [bool; 2]) -> Self {
        self.periodic = periodic;
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn periodic(&self) -> [bool; 2] {
        self.periodic
    }

    pub fn normal_flipped(&self) -> bool {
        self.flip_normal
    }

    pub fn point(&self, u: f64, v: f64) -> Vec3 {
        self.source.point(u, v)
    }

    pub fn point_uv(&self, uv: Vec2) -> Vec3 {
        self.source.point(uv.x, uv.y)
    }

    pub fn partials(&self, u: f64, v: f64) -> [Vec3; 2] {
        if let Some(p) = self.source.partials(u, v) {
            return p;
        }
        let s = &self.source;
        [
            diff_n(|x| s.point(x, v), u, 1, 1.0),
            diff_n(|y| s.point(u, y), v, 1, 1.0),
        ]
    }

    pub fn second_partials(&self, u: f64, v: f64) -> [Vec3; 3] {
        if let Some(p) = self.source.second_partials(u, v) {
            return p;
        }
        if self.source.partials(u, v).is_some() {
            let s = &self.source;
            let su = |x: f64, y: f64| s.partials(x, y).unwrap()[0];
            let sv = |x: f64, y: f64| s.partials(x, y).unwrap()[1];
            return [
                diff_n(|x| su(x, v), u, 1, 1.0),
                diff_n(|y| su(u, y), v, 1, 1.0),
                diff_n(|y| sv(u, y), v, 1, 1.0),
            ];
        }
        let s = &self.source;
        [
            diff_n(|x| s.point(x, v), u, 2, 1.0),
            diff_n(|y| diff_n(|x| s.point(x, y), u, 1, 1.0), v, 1, 1.0),
            diff_n(|y| s.point(u, y), v, 2, 1.0),
        ]
    }

    fn orientation(&self) -> f64 {
        if self.flip_normal {
            -1.0
        } else {
            1.0
        }
    }

    /// `(S_u x S_v) / |S_u x S_v|`, reversed for surfaces flagged with a flipped normal.
    pub fn unit_normal(&self, u: f64, v: f64, tol: &Tolerances) -> Result<Vec3> {
        let [su, sv] = self.partials(u, v);
        let n = su.cross(&sv);
        let norm = n.norm();
        if !(norm >= tol.eps_deg) {
            return Err(GeomError::SingularPoint { u, v, norm });
        }
        Ok(n * (self.orientation() / norm))
    }

    /// Unit normal and its partial derivatives.
    pub fn normal_jet(&self, u: f64, v: f64, tol: &Tolerances) -> Result<NormalJet> {
        let [su, sv] = self.partials(u, v);
        let second = self.second_partials(u, v);
        let [suu, suv, svv] = second;
        let raw = su.cross(&sv);
        let norm = raw.norm();
        if !(norm >= tol.eps_deg) {
            return Err(GeomError::SingularPoint { u, v, norm });
        }
        let n = raw / norm;
        let raw_u = suu.cross(&sv) + su.cross(&suv);
        let raw_v = suv.cross(&sv) + su.cross(&svv);
        let o = self.orientation();
        let project = |d: Vec3| (d - n * n.dot(&d)) * (o / norm);
        Ok(NormalJet {
            normal: n * o,
            normal_u: project(raw_u),
            normal_v: project(raw_v),
            su,
            sv,
            second,
        })
    }

    /// Maps periodic coordinates back into the domain.
    pub fn wrap(&self, uv: Vec2) -> Vec2 {
        let w = |x: f64, (a, b): (f64, f64), periodic: bool| {
            if !periodic {
                return x;
            }
            let p = b - a;
            a + (x - a).rem_euclid(p)
        };
        Vec2::new(
            w(uv.x, self.domain.u, self.periodic[0]),
            w(uv.y, self.domain.v, self.periodic[1]),
        )
    }
}

/// A curve in the parameter domain of a surface.
pub trait UvPath: Send + Sync {
    fn range(&self) -> (f64, f64);
    fn uv(&self, s: f64) -> Vec2;
    fn d1(&self, _s: f64) -> Option<Vec2> {
        None
    }
    fn d2(&self, _s: f64) -> Option<Vec2> {
        None
    }
}

/// Straight line `origin + s * direction` in the parameter domain.
#[derive(Debug, Clone, Copy)]
pub struct UvLine {
    pub origin: Vec2,
    pub direction: Vec2,
    pub range: (f64, f64),
}

impl UvPath for UvLine {
    fn range(&self) -> (f64, f64) {
        self.range
    }
    fn uv(&self, s: f64) -> Vec2 {
        self.origin + self.direction * s
    }
    fn d1(&self, _s: f64) -> Option<Vec2> {
        Some(self.direction)
    }
    fn d2(&self, _s: f64) -> Option<Vec2> {
        Some(Vec2::zeros())
    }
}

/// Parameter curve given by closures.
pub struct UvFn {
    pub uv: Box<dyn Fn(f64) -> Vec2 + Send + Sync>,
    pub range: (f64, f64),
}

impl UvPath for UvFn {
    fn range(&self) -> (f64, f64) {
        self.range
    }
    fn uv(&self, s: f64) -> Vec2 {
        (self.uv)(s)
    }
}

/// A curve `s -> S(uv(s))` on a surface.
#[derive(Clone)]
pub struct CurveOnSurface {
    surface: ParamSurface,
    path: Arc<dyn UvPath>,
    unit_speed: bool,
}

impl std::fmt::Debug for CurveOnSurface {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CurveOnSurface")
            .field("surface", &self.surface)
            .field("range", &self.path.range())
            .field("unit_speed", &self.unit_speed)
            .finish_non_exhaustive()
    }
}

/// Lifted position, velocity and acceleration.
#[derive(Debug, Clone, Copy)]
pub struct LiftedJet {
    pub uv: Vec2,
    pub duv: Vec2,
    pub dduv: Vec2,
    pub point: Vec3,
    pub velocity: Vec3,
    pub acceleration: Vec3,
}

impl CurveOnSurface {
    pub fn new(surface: ParamSurface, path: impl UvPath + 'static) -> Self {
        Self::from_arc(surface, Arc::new(path))
    }

    pub fn from_arc(surface: ParamSurface, path: Arc<dyn UvPath>) -> Self {
        Self {
            surface,
            path,
            unit_speed: false,
        }
    }

    /// Straight parameter line, e.g. a latitude `(s / cos v0, v0)` or a ruling `(u0, s)`.
    pub fn line(surface: ParamSurface, origin: Vec2, direction: Vec2, range: (f64, f64)) -> Self {
        Self::new(
            surface,
            UvLine {
                origin,
                direction,
                range,
            },
        )
    }

    pub fn with_unit_speed(mut self, unit_speed: bool) -> Self {
        self.unit_speed = unit_speed;
        self
    }

    pub fn surface(&self) -> &ParamSurface {
        &self.surface
    }

    pub fn range(&self) -> (f64, f64) {
        self.path.range()
    }

    pub fn is_unit_speed(&self) -> bool {
        self.unit_speed
    }

    pub fn uv(&self, s: f64) -> Vec2 {
        self.path.uv(s)
    }

    fn uv_d1(&self, s: f64) -> Vec2 {
        self.path
            .d1(s)
            .unwrap_or_else(|| diff_n(|x| self.path.uv(x), s, 1, 1.0))
    }

    fn uv_d2(&self, s: f64) -> Vec2 {
        if let Some(d) = self.path.d2(s) {
            return d;
        }
        if self.path.d1(s).is_some() {
            return diff_n(|x| self.path.d1(x).unwrap(), s, 1, 1.0);
        }
        diff_n(|x| self.path.uv(x), s, 2, 1.0)
    }

    pub fn lifted_jet(&self, s: f64) -> LiftedJet {
        let uv = self.path.uv(s);
        let duv = self.uv_d1(s);
        let dduv = self.uv_d2(s);
        let [su, sv] = self.surface.partials(uv.x, uv.y);
        let [suu, suv, svv] = self.surface.second_partials(uv.x, uv.y);
        let (du, dv) = (duv.x, duv.y);
        LiftedJet {
            uv,
            duv,
            dduv,
            point: self.surface.point(uv.x, uv.y),
            velocity: su * du + sv * dv,
            acceleration: suu * (du * du) + suv * (2.0 * du * dv) + svv * (dv * dv) + su * dduv.x + sv * dduv.y,
        }
    }

    pub fn point(&self, s: f64) -> Vec3 {
        self.surface.point_uv(self.path.uv(s))
    }

    /// The lifted space curve (third derivative by differences of the acceleration).
    pub fn as_space_curve(&self) -> SpaceCurve {
        SpaceCurve::from_source(LiftedCurve(self.clone()), self.range()).with_unit_speed(self.unit_speed)
    }

    /// Unit-speed reparametrization of the lifted curve, arc length from the range start.
    pub fn arclength(&self, quad_tol: f64, tol: &Tolerances) -> Result<CurveOnSurface> {
        let me = self.clone();
        let map = ArcLengthMap::build(
            Box::new(move |t| me.lifted_jet(t).velocity.norm()),
            self.range(),
            ARC_NODES,
            quad_tol,
            tol.eps_deg,
        )?;
        let length = map.length();
        Ok(CurveOnSurface::new(
            self.surface.clone(),
            ArcLengthPath {
                base: self.clone(),
                map,
                length,
            },
        )
        .with_unit_speed(true))
    }
}

struct LiftedCurve(CurveOnSurface);

impl CurveSource for LiftedCurve {
    fn point(&self, t: f64) -> Vec3 {
        self.0.point(t)
    }
    fn derivative(&self, t: f64, k: usize) -> Option<Vec3> {
        match k {
            1 => Some(self.0.lifted_jet(t).velocity),
            2 => Some(self.0.lifted_jet(t).acceleration),
            _ => None,
        }
    }
}

struct ArcLengthPath {
    base: CurveOnSurface,
    map: ArcLengthMap,
    length: f64,
}

impl ArcLengthPath {
    fn jet(&self, s: f64) -> (Vec2, Vec2, Vec2) {
        let t = self.map.param_at(s);
        let j = self.base.lifted_jet(t);
        let g = j.velocity.norm();
        let g_t = j.velocity.dot(&j.acceleration) / g;
        let t1 = 1.0 / g;
        let t2 = -g_t / (g * g * g);
        (j.uv, j.duv * t1, j.dduv * (t1 * t1) + j.duv * t2)
    }
}

impl UvPath for ArcLengthPath {
    fn range(&self) -> (f64, f64) {
        (0.0, self.length)
    }
    fn uv(&self, s: f64) -> Vec2 {
        self.base.uv(self.map.param_at(s))
    }
    fn d1(&self, s: f64) -> Option<Vec2> {
        Some(self.jet(s).1)
    }
    fn d2(&self, s: f64) -> Option<Vec2> {
        Some(self.jet(s).2)
    }
}

/// Darboux frame and invariants at one point, before any sequence-level processing.
#[derive(Debug, Clone, Copy)]
pub struct DarbouxLocal {
    pub s: f64,
    pub uv: Vec2,
    pub point: Vec3,
    pub speed: f64,
    pub tangent: Vec3,
    pub tangent_normal: Vec3,
    pub normal: Vec3,
    /// `T'` with respect to arc length.
    pub curvature_vector: Vec3,
    pub k_g: f64,
    pub k_n: f64,
    pub tau_g: f64,
}

/// Arc-length derivatives of `(k_g, k_n, tau_g)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InvariantRates {
    pub dk_g: f64,
    pub dk_n: f64,
    pub dtau_g: f64,
}

/// Darboux frame `{T, B = N x T, N}` with `(k_g, k_n, tau_g)` and the Frenet data that
/// exist only where the curvature does not vanish.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DarbouxSample {
    pub s: f64,
    pub uv: Vec2,
    pub point: Vec3,
    /// T
    pub tangent: Vec3,
    /// B = N x T
    pub tangent_normal: Vec3,
    /// N, the unit surface normal
    pub normal: Vec3,
    pub k_g: f64,
    pub k_n: f64,
    pub tau_g: f64,
    pub kappa: f64,
    pub rates: Option<InvariantRates>,
    pub tau: Option<f64>,
    /// Arc-length rates `(kappa', tau')` of the Frenet scalars.
    pub frenet_rates: Option<(f64, f64)>,
    /// Angle between N and the binormal, unwrapped along the sample list.
    pub phi: Option<f64>,
    pub principal_normal: Option<Vec3>,
    pub binormal: Option<Vec3>,
}

impl DarbouxSample {
    /// `N' = -k_n T - tau_g B`.
    pub fn normal_rate(&self) -> Vec3 {
        -self.tangent * self.k_n - self.tangent_normal * self.tau_g
    }

    /// `k_n^2 + tau_g^2`, the squared speed of the Gauss map.
    pub fn gauss_speed_sq(&self) -> f64 {
        self.k_n * self.k_n + self.tau_g * self.tau_g
    }
}

/// Step for arc-length derivatives of the invariants.
const RATE_STEP: f64 = 4e-3;

/// Frame and invariants at `s`. Works for any regular parametrization: the
/// velocity is normalized and derivatives are rescaled to arc length.
pub fn darboux_local(curve: &CurveOnSurface, s: f64, tol: &Tolerances) -> Result<DarbouxLocal> {
    let j = curve.lifted_jet(s);
    let g = j.velocity.norm();
    if !(g >= tol.eps_deg) {
        return Err(GeomError::SingularSpeed { param: s, speed: g });
    }
    let nj = curve.surface.normal_jet(j.uv.x, j.uv.y, tol)?;
    let t = j.velocity / g;
    let dt = (j.acceleration - t * t.dot(&j.acceleration)) / (g * g);
    let n = nj.normal;
    let dn = (nj.normal_u * j.duv.x + nj.normal_v * j.duv.y) / g;
    let b = n.cross(&t);
    Ok(DarbouxLocal {
        s,
        uv: j.uv,
        point: j.point,
        speed: g,
        tangent: t,
        tangent_normal: b,
        normal: n,
        curvature_vector: dt,
        k_g: dt.dot(&b),
        k_n: dt.dot(&n),
        tau_g: -dn.dot(&b),
    })
}

/// Darboux samples at `samples` uniformly spaced arc-length values over the curve's range.
pub fn darboux_along(curve: &CurveOnSurface, samples: usize, tol: &Tolerances) -> Result<Vec<DarbouxSample>> {
    let (a, b) = curve.range();
    if samples < 2 {
        return Err(GeomError::TooFewSamples {
            required: 2,
            got: samples,
        });
    }
    let params: Vec<f64> = (0..samples)
        .map(|i| a + (b - a) * i as f64 / (samples - 1) as f64)
        .collect();
    darboux_at_params(curve, &params, tol)
}

/// Darboux samples at the given arc-length values (in order).
pub fn darboux_at_params(curve: &CurveOnSurface, params: &[f64], tol: &Tolerances) -> Result<Vec<DarbouxSample>> {
    if !curve.is_unit_speed() {
        let s = params.first().copied().unwrap_or(0.0);
        return Err(GeomError::NotUnitSpeed {
            s,
            speed: curve.lifted_jet(s).velocity.norm(),
        });
    }
    let mut out: Vec<DarbouxSample> = params
        .par_iter()
        .map(|&s| darboux_sample(curve, s, tol))
        .collect::<Result<_>>()?;
    unwrap_phi(&mut out);
    Ok(out)
}

fn darboux_sample(curve: &CurveOnSurface, s: f64, tol: &Tolerances) -> Result<DarbouxSample> {
    let l = darboux_local(curve, s, tol)?;
    if (l.speed - 1.0).abs() > tol.frame_rtol {
        return Err(GeomError::NotUnitSpeed { s, speed: l.speed });
    }
    let inv = |x: f64| match darboux_local(curve, x, tol) {
        Ok(d) => Vec3::new(d.k_g, d.k_n, d.tau_g),
        Err(_) => Vec3::from_element(f64::NAN),
    };
    let r = diff1(inv, s, RATE_STEP);
    let rates = r.iter().all(|x| x.is_finite()).then_some(InvariantRates {
        dk_g: r.x,
        dk_n: r.y,
        dtau_g: r.z,
    });
    let kappa = l.curvature_vector.norm();
    let (tau, frenet_rates, phi, principal_normal, binormal) = if kappa >= tol.eps_deg {
        let n = l.curvature_vector / kappa;
        let bn = l.tangent.cross(&n);
        let accel = |x: f64| {
            darboux_local(curve, x, tol)
                .map(|d| d.curvature_vector)
                .unwrap_or_else(|_| Vec3::from_element(f64::NAN))
        };
        let ddt = diff1(accel, s, RATE_STEP);
        let dddt = diff2(accel, s, RATE_STEP);
        let txt = l.tangent.cross(&l.curvature_vector);
        let tau = txt.dot(&ddt) / (kappa * kappa);
        let dkappa = l.curvature_vector.dot(&ddt) / kappa;
        let dtau = txt.dot(&dddt) / (kappa * kappa) - 2.0 * tau * dkappa / kappa;
        (
            tau.is_finite().then_some(tau),
            (dkappa.is_finite() && dtau.is_finite()).then_some((dkappa, dtau)),
            Some(l.k_n.atan2(l.k_g)),
            Some(n),
            Some(bn),
        )
    } else {
        (None, None, None, None, None)
    };
    Ok(DarbouxSample {
        s,
        uv: l.uv,
        point: l.point,
        tangent: l.tangent,
        tangent_normal: l.tangent_normal,
        normal: l.normal,
        k_g: l.k_g,
        k_n: l.k_n,
        tau_g: l.tau_g,
        kappa,
        rates,
        tau,
        frenet_rates,
        phi,
        principal_normal,
        binormal,
    })
}

/// Nearest-branch continuation of phi along the list.
fn unwrap_phi(samples: &mut [DarbouxSample]) {
    let mut prev: Option<f64> = None;
    for smp in samples.iter_mut() {
        if let Some(p) = smp.phi.as_mut() {
            if let Some(q) = prev {
                *p += 2.0 * PI * ((q - *p) / (2.0 * PI)).round();
            }
            prev = Some(*p);
        }
    }
}

/// Frenet `(n, b)` from the Darboux frame rotated by phi about T:
/// `n = cos(phi) B + sin(phi) N`, `b = -sin(phi) B + cos(phi) N`.
pub fn rotate_to_frenet(sample: &DarbouxSample) -> Result<(Vec3, Vec3)> {
    let phi = sample.phi.ok_or(GeomError::VanishingCurvature {
        param: sample.s,
        kappa: sample.kappa,
    })?;
    let (sp, cp) = phi.sin_cos();
    Ok((
        sample.tangent_normal * cp + sample.normal * sp,
        -sample.tangent_normal * sp + sample.normal * cp,
    ))
}

/// Residuals of the frame identities at one sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrameIdentityResiduals {
    /// `|B - N x T|` and orthonormality of `{T, B, N}`.
    pub orthonormality: f64,
    /// `|kappa^2 - k_g^2 - k_n^2|`.
    pub pythagoras: f64,
    /// `max(|k_g - kappa cos phi|, |k_n - kappa sin phi|)`.
    pub phi_projection: Option<f64>,
    /// `|tau_g - (tau - phi')|` with `phi' = (k_g k_n' - k_n k_g') / kappa^2`.
    pub torsion_split: Option<f64>,
}

pub fn frame_identity_residuals(smp: &DarbouxSample) -> FrameIdentityResiduals {
    let e = [smp.tangent, smp.tangent_normal, smp.normal];
    let mut ortho = (smp.tangent_normal - smp.normal.cross(&smp.tangent)).norm();
    for i in 0..3 {
        for j in 0..3 {
            let target = if i == j { 1.0 } else { 0.0 };
            ortho = ortho.max((e[i].dot(&e[j]) - target).abs());
        }
    }
    let k2 = smp.kappa * smp.kappa;
    let phi_projection = smp.phi.map(|phi| {
        (smp.k_g - smp.kappa * phi.cos())
            .abs()
            .max((smp.k_n - smp.kappa * phi.sin()).abs())
    });
    let torsion_split = match (smp.tau, smp.rates) {
        (Some(tau), Some(r)) if k2 > 0.0 => {
            let dphi = (smp.k_g * r.dk_n - smp.k_n * r.dk_g) / k2;
            Some((smp.tau_g - (tau - dphi)).abs())
        }
        _ => None,
    };
    FrameIdentityResiduals {
        orthonormality: ortho,
        pythagoras: (k2 - smp.k_g * smp.k_g - smp.k_n * smp.k_n).abs(),
        phi_projection,
        torsion_split,
    }
}

/// Residuals of the Darboux equations `T' = k_g B + k_n N`, `B' = -k_g T + tau_g N`,
/// `N' = -k_n T - tau_g B`, with the frame derivatives taken by differences in `s`.
pub fn darboux_equation_residuals(curve: &CurveOnSurface, s: f64, tol: &Tolerances) -> Result<[f64; 3]> {
    let l = darboux_local(curve, s, tol)?;
    let frame = |x: f64| match darboux_local(curve, x, tol) {
        Ok(d) => [d.tangent, d.tangent_normal, d.normal],
        Err(_) => [Vec3::from_element(f64::NAN); 3],
    };
    let h = 1e-3;
    let dt = diff1(|x| frame(x)[0], s, h) / l.speed;
    let db = diff1(|x| frame(x)[1], s, h) / l.speed;
    let dn = diff1(|x| frame(x)[2], s, h) / l.speed;
    let (t, b, n) = (l.tangent, l.tangent_normal, l.normal);
    Ok([
        (dt - (b * l.k_g + n * l.k_n)).norm(),
        (db - (-t * l.k_g + n * l.tau_g)).norm(),
        (dn - (-t * l.k_n - b * l.tau_g)).norm(),
    ])
}

/// Same residuals estimated only from a uniformly spaced sample list (interior samples).
pub fn darboux_grid_residuals(samples: &[DarbouxSample]) -> Result<f64> {
    if samples.len() < 5 {
        return Err(GeomError::TooFewSamples {
            required: 5,
            got: samples.len(),
        });
    }
    let ds = samples[1].s - samples[0].s;
    let comp = |f: &dyn Fn(&DarbouxSample) -> Vec3| -> Vec<Vec3> {
        let cols: Vec<Vec<f64>> = (0..3)
            .map(|k| {
                let v: Vec<f64> = samples.iter().map(|x| f(x)[k]).collect();
                grid_derivative(&v, ds)
            })
            .collect();
        (0..samples.len())
            .map(|i| Vec3::new(cols[0][i], cols[1][i], cols[2][i]))
            .collect()
    };
    let dt = comp(&|x| x.tangent);
    let db = comp(&|x| x.tangent_normal);
    let dn = comp(&|x| x.normal);
    let mut worst = 0.0f64;
    for (i, x) in samples.iter().enumerate() {
        let (t, b, n) = (x.tangent, x.tangent_normal, x.normal);
        worst = worst
            .max((dt[i] - (b * x.k_g + n * x.k_n)).norm())
            .max((db[i] - (-t * x.k_g + n * x.tau_g)).norm())
            .max((dn[i] - (-t * x.k_n - b * x.tau_g)).norm());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::curve::frenet_at;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn sphere_and_cylinder_normals() {
        let t = tol();
        let n = catalog::sphere(1.0).unit_normal(0.0, 0.0, &t).unwrap();
        assert!((n - Vec3::x()).norm() < 1e-15);
        let n = catalog::cylinder(1.0, (-5.0, 5.0))
            .unit_normal(PI / 2.0, 3.0, &t)
            .unwrap();
        assert!((n - Vec3::y()).norm() < 1e-15);
        assert!(matches!(
            catalog::sphere(1.0).unit_normal(0.3, PI / 2.0, &t),
            Err(GeomError::SingularPoint { .. })
        ));
    }

    #[test]
    fn equator_is_a_geodesic_with_unit_normal_curvature() {
        let eq = CurveOnSurface::line(
            catalog::sphere(1.0),
            Vec2::new(-3.0, 0.0),
            Vec2::new(1.0, 0.0),
            (0.0, 6.0),
        )
        .with_unit_speed(true);
        for d in darboux_along(&eq, 13, &tol()).unwrap() {
            assert!(d.k_g.abs() < 1e-12);
            assert!((d.k_n + 1.0).abs() < 1e-12);
            assert!(d.tau_g.abs() < 1e-12);
        }
    }

    #[test]
    fn latitude_geodesic_curvature_matches_frenet_projection() {
        let v0: f64 = 0.4;
        let c = v0.cos();
        let lat = CurveOnSurface::line(
            catalog::sphere(1.0),
            Vec2::new(0.0, v0),
            Vec2::new(1.0 / c, 0.0),
            (0.0, 2.0),
        )
        .with_unit_speed(true);
        let samples = darboux_along(&lat, 9, &tol()).unwrap();
        // independent route: Frenet data of the lifted circle projected on the Darboux frame
        let space = lat.as_space_curve();
        for d in &samples {
            let f = frenet_at(&space, d.s, &tol()).unwrap();
            let kg = f.kappa * f.normal.dot(&d.tangent_normal);
            assert!((d.k_g - kg).abs() < 1e-9);
            assert!((d.k_g.abs() - v0.tan()).abs() < 1e-10);
            assert!((d.k_n + 1.0).abs() < 1e-10);
            assert!(d.tau_g.abs() < 1e-10);
        }
    }

    #[test]
    fn ruling_has_vanishing_invariants_and_no_frenet_frame() {
        let r = CurveOnSurface::line(
            catalog::cylinder(1.0, (-1.0, 1.0)),
            Vec2::new(0.5, -1.0),
            Vec2::new(0.0, 1.0),
            (0.0, 2.0),
        )
        .with_unit_speed(true);
        for d in darboux_along(&r, 5, &tol()).unwrap() {
            assert!(d.k_g.abs() < 1e-14 && d.k_n.abs() < 1e-14 && d.tau_g.abs() < 1e-14);
            assert!(d.phi.is_none() && d.tau.is_none());
            assert!(matches!(
                rotate_to_frenet(&d),
                Err(GeomError::VanishingCurvature { .. })
            ));
        }
    }

    #[test]
    fn non_unit_speed_is_rejected() {
        let lat = CurveOnSurface::line(
            catalog::sphere(1.0),
            Vec2::new(0.0, 0.5),
            Vec2::new(1.0, 0.0),
            (0.0, 2.0),
        );
        assert!(matches!(
            darboux_along(&lat, 5, &tol()),
            Err(GeomError::NotUnitSpeed { .. })
        ));
        let flagged = lat.clone().with_unit_speed(true);
        assert!(matches!(
            darboux_along(&flagged, 5, &tol()),
            Err(GeomError::NotUnitSpeed { .. })
        ));
        let fixed = lat.arclength(1e-12, &tol()).unwrap();
        assert!(darboux_along(&fixed, 5, &tol()).is_ok());
    }

    #[test]
    fn rotation_at_special_angles() {
        let eq = CurveOnSurface::line(
            catalog::sphere(1.0),
            Vec2::new(0.0, 0.0),
            Vec2::new(1.0, 0.0),
            (0.0, 1.0),
        )
        .with_unit_speed(true);
        // geodesic: k_g = 0, k_n = -1 gives phi = -pi/2 and n = -N
        let d = darboux_along(&eq, 3, &tol()).unwrap()[1];
        let (n, b) = rotate_to_frenet(&d).unwrap();
        assert!((n + d.normal).norm() < 1e-12);
        assert!((b - d.tangent_normal).norm() < 1e-12);

        let mut geo = d;
        geo.k_g = 0.0;
        geo.k_n = 2.0;
        geo.phi = Some(PI / 2.0);
        let (n, b) = rotate_to_frenet(&geo).unwrap();
        assert!((n - geo.normal).norm() < 1e-15 && (b + geo.tangent_normal).norm() < 1e-15);

        let mut asym = d;
        asym.phi = Some(0.0);
        let (n, b) = rotate_to_frenet(&asym).unwrap();
        assert!((n - asym.tangent_normal).norm() < 1e-15 && (b - asym.normal).norm() < 1e-15);
    }

    #[test]
    fn cylinder_helix_rotation_matches_frenet() {
        let (a, b) = (0.6f64, 0.8f64);
        let h = CurveOnSurface::line(
            catalog::cylinder(1.0, (-10.0, 10.0)),
            Vec2::new(0.0, 0.0),
            Vec2::new(a, b),
            (0.0, 5.0),
        )
        .with_unit_speed(true);
        let space = h.as_space_curve();
        for d in darboux_along(&h, 11, &tol()).unwrap() {
            let (n, bn) = rotate_to_frenet(&d).unwrap();
            let f = frenet_at(&space, d.s, &tol()).unwrap();
            assert!((n - f.normal).norm() < 1e-9);
            assert!((bn - f.binormal).norm() < 1e-9);
            assert!(d.k_g.abs() < 1e-12);
            let r = frame_identity_residuals(&d);
            assert!(r.torsion_split.unwrap() < 1e-8);
        }
    }
}
