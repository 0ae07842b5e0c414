//! Acceptance run: one PASS/FAIL line per criterion, followed by the measured values.
//! Exits non-zero when any criterion fails.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::process::ExitCode;

use isophote::canal::{
    canal_surface, canal_unit_normal, envelope_residuals, parameter_curve_samples, radius_law_integral_cor3b,
    radius_law_linear_cor3a, radius_law_prop1, theorem4_residual, Branch, CanalSpec, RadiusFunction, RadiusLaw,
};
use isophote::catalog;
use isophote::curve::{classify_helix, frenet_at, frenet_serret_residuals, HelixKind, SpaceCurve};
use isophote::isophote::{
    angle_between, axis_derivative_check, classify_isophote, gauss_map_image, mu_invariant, recover_axis,
    samples_along_polyline, slant_helix_axis, trace_isophote, IsophoteKind, TraceOptions,
};
use isophote::surface::{
    darboux_along, darboux_equation_residuals, frame_identity_residuals, CurveOnSurface, DarbouxSample, ParamSurface,
};
use isophote::tolerance::stdev;
use isophote::{GeomError, Tolerances, Vec2, Vec3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// One measured quantity of a criterion.
struct Item {
    what: String,
    value: f64,
    limit: f64,
    /// `value <= limit` when false, `value > limit` when true.
    above: bool,
}

impl Item {
    fn pass(&self) -> bool {
        if self.above {
            self.value > self.limit
        } else {
            self.value <= self.limit
        }
    }
}

#[derive(Default)]
struct Criterion {
    items: Vec<Item>,
    errors: Vec<String>,
}

impl Criterion {
    fn at_most(&mut self, what: impl Into<String>, value: f64, limit: f64) {
        self.items.push(Item {
            what: what.into(),
            value,
            limit,
            above: false,
        });
    }

    fn exceeds(&mut self, what: impl Into<String>, value: f64, limit: f64) {
        self.items.push(Item {
            what: what.into(),
            value,
            limit,
            above: true,
        });
    }

    fn holds(&mut self, what: impl Into<String>, ok: bool) {
        self.at_most(what, if ok { 0.0 } else { 1.0 }, 0.0);
    }

    fn error(&mut self, what: &str, e: GeomError) {
        self.errors.push(format!("{what}: {e}"));
    }

    fn pass(&self) -> bool {
        self.errors.is_empty() && self.items.iter().all(Item::pass)
    }
}

fn tol() -> Tolerances {
    Tolerances::default()
}

fn max_abs(samples: &[DarbouxSample], f: impl Fn(&DarbouxSample) -> f64) -> f64 {
    samples.iter().map(|s| f(s).abs()).fold(0.0, f64::max)
}

fn latitude(v0: f64) -> CurveOnSurface {
    let c = v0.cos();
    CurveOnSurface::line(
        catalog::sphere(1.0),
        Vec2::new(-PI, v0),
        Vec2::new(1.0 / c, 0.0),
        (0.0, 2.0 * PI * c),
    )
    .with_unit_speed(true)
}

/// Geodesic helix on the unit cylinder; an isophote of the axis with `theta = pi/2`.
fn cylinder_helix() -> CurveOnSurface {
    let (a, b) = (1.0f64, 0.7f64);
    let n = a.hypot(b);
    CurveOnSurface::line(
        catalog::cylinder(1.0, (-20.0, 20.0)),
        Vec2::zeros(),
        Vec2::new(a / n, b / n),
        (0.0, 6.0),
    )
    .with_unit_speed(true)
}

fn gamma() -> SpaceCurve {
    catalog::slant_helix(2.0, 1.0)
}

/// `gamma` as the `u = 0` curve of its rectifying developable.
fn gamma_on_developable() -> CurveOnSurface {
    let g = gamma();
    let (a, b) = g.range();
    CurveOnSurface::line(
        catalog::rectifying_developable(&g, 0.5),
        Vec2::new(0.0, a),
        Vec2::new(0.0, 1.0),
        (0.0, b - a),
    )
    .with_unit_speed(true)
}

fn helix_tube() -> CanalSpec {
    CanalSpec::tube(catalog::circular_helix(2.0, 1.0, 1.0), 0.3, Branch::Minus, &tol()).expect("helix tube")
}

fn slant_tube() -> CanalSpec {
    CanalSpec::tube(gamma(), 0.2, Branch::Minus, &tol()).expect("slant tube")
}

/// Closed-form axis of the slant helix `gamma` with `theta = pi/3`, evaluated at the start of the curve.
fn gamma_axis(signs: (f64, f64)) -> Vec3 {
    let g = gamma();
    let f = frenet_at(&g, g.range().0, &tol()).expect("frame");
    slant_helix_axis([f.tangent, f.normal, f.binormal], f.kappa, f.tau, PI / 3.0, signs)
}

const SIGNS: [(f64, f64); 4] = [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)];

/// Certified isophotes with their generating direction.
struct Suite {
    name: String,
    samples: Vec<DarbouxSample>,
    d: Vec3,
}

fn traced(
    surface: &ParamSurface,
    d: Vec3,
    theta: f64,
    grid: usize,
    name: &str,
    out: &mut Vec<Suite>,
) -> Result<(), GeomError> {
    let t = tol();
    let tr = trace_isophote(surface, d, theta, &TraceOptions::grid(grid, grid), &t)?;
    for (k, poly) in tr.polylines.iter().enumerate() {
        let samples = samples_along_polyline(surface, d, theta, poly, 200, &t)?;
        out.push(Suite {
            name: format!("{name} #{k}"),
            samples,
            d,
        });
    }
    Ok(())
}

/// Isophotes found by tracing catalog surfaces (cylinder rulings excluded: the normal is
/// constant along them, so they carry no axis information).
fn traced_suite() -> Result<Vec<Suite>, GeomError> {
    let mut out = Vec::new();
    traced(
        &catalog::sphere(1.0),
        Vec3::z(),
        PI / 3.0,
        128,
        "sphere latitude",
        &mut out,
    )?;
    traced(
        &catalog::torus(2.0, 0.5),
        Vec3::new(0.3, -0.2, 1.0).normalize(),
        1.1,
        96,
        "torus",
        &mut out,
    )?;
    traced(
        &catalog::graph(1.0, -1.0, 1.0),
        Vec3::z(),
        PI / 6.0,
        96,
        "saddle graph",
        &mut out,
    )?;
    Ok(out)
}

/// Traced isophotes plus the closed-form ones.
fn full_suite() -> Result<Vec<Suite>, GeomError> {
    let t = tol();
    let mut out = traced_suite()?;
    out.push(Suite {
        name: "sphere equator".into(),
        samples: darboux_along(&latitude(0.0), 128, &t)?,
        d: Vec3::z(),
    });
    out.push(Suite {
        name: "cylinder helix".into(),
        samples: darboux_along(&cylinder_helix(), 128, &t)?,
        d: Vec3::z(),
    });
    out.push(Suite {
        name: "gamma on its rectifying developable".into(),
        samples: darboux_along(&gamma_on_developable(), 200, &t)?,
        d: gamma_axis((1.0, 1.0)),
    });
    let ht = helix_tube();
    for v0 in [FRAC_PI_2, 3.0 * FRAC_PI_2] {
        out.push(Suite {
            name: format!("helix tube v0 = {v0:.4}"),
            samples: parameter_curve_samples(&ht, v0, 200)?
                .into_iter()
                .map(|c| c.darboux)
                .collect(),
            d: catalog::circular_helix_axis(),
        });
    }
    let st = slant_tube();
    for v0 in [0.0, PI] {
        out.push(Suite {
            name: format!("slant tube v0 = {v0:.4}"),
            samples: parameter_curve_samples(&st, v0, 200)?
                .into_iter()
                .map(|c| c.darboux)
                .collect(),
            d: gamma_axis((1.0, 1.0)),
        });
    }
    Ok(out)
}

fn criterion_1() -> Criterion {
    let mut c = Criterion::default();
    let t = tol();
    let g = gamma();
    let r3 = 3f64.sqrt();
    let (mut ek, mut et) = (0.0f64, 0.0f64);
    for s in g.sample_params(200) {
        match frenet_at(&g, s, &t) {
            Ok(f) => {
                ek = ek.max((f.kappa - r3 * s.cos()).abs());
                et = et.max((f.tau - r3 * s.sin()).abs());
            }
            Err(e) => c.error("frenet", e),
        }
    }
    c.at_most("max |kappa - sqrt3 cos|", ek, 1e-6);
    c.at_most("max |tau - sqrt3 sin|", et, 1e-6);
    match classify_helix(&g, 200, &t) {
        Ok(v) => {
            c.at_most("|median sigma - 1/sqrt3|", (v.sigma.median - 1.0 / r3).abs(), 1e-6);
            c.at_most("sigma spread", v.sigma.spread(), 1e-6);
            c.exceeds("tau/kappa spread", v.tau_over_kappa.spread(), 0.1);
            c.holds("slant helix, not a general helix", v.kind == HelixKind::SlantHelix);
        }
        Err(e) => c.error("classify_helix", e),
    }
    c
}

fn criterion_2() -> Criterion {
    let mut c = Criterion::default();
    let t = tol();
    let run = |c: &mut Criterion| -> Result<(), GeomError> {
        let s = darboux_along(&gamma_on_developable(), 200, &t)?;
        c.at_most("max |k_g|", max_abs(&s, |x| x.k_g), 1e-6);
        let p = mu_invariant(&s, &t)?;
        let dev = p
            .samples
            .iter()
            .map(|(_, m)| (m.abs() - 1.0 / 3f64.sqrt()).abs())
            .fold(0.0, f64::max);
        c.at_most("max ||mu| - 1/sqrt3|", dev, 1e-6);
        c.holds("mu constant", p.constant);
        c.at_most(
            "|theta_estimate - 60| (deg)",
            (p.theta_estimate.to_degrees() - 60.0).abs(),
            0.01,
        );
        let axis = recover_axis(&s, p.theta_estimate, &t)?;
        c.at_most("axis residual", axis.residual, 1e-6);
        c.holds("axis certified", axis.certified(&t));
        let g = gamma();
        let err = SIGNS
            .iter()
            .map(|&signs| {
                s.iter()
                    .map(|x| {
                        let f = frenet_at(&g, g.range().0 + x.s, &t).expect("frame");
                        let d = slant_helix_axis([f.tangent, f.normal, f.binormal], f.kappa, f.tau, PI / 3.0, signs);
                        angle_between(&axis.d, &d)
                    })
                    .fold(0.0, f64::max)
            })
            .fold(f64::INFINITY, f64::min);
        c.at_most("angle to closed-form axis, best signs (rad)", err, 1e-6);
        Ok(())
    };
    if let Err(e) = run(&mut c) {
        c.error("developable curve", e);
    }
    c
}

fn criterion_3(suite: &[Suite]) -> Criterion {
    let mut c = Criterion::default();
    let t = tol();
    for x in suite {
        match gauss_map_image(&x.samples, &t) {
            Ok(g) => {
                c.at_most(format!("{}: plane fit", x.name), g.plane_fit_residual, 1e-6);
                c.at_most(format!("{}: |kbar_g - mu|", x.name), g.mu_agreement, 1e-5);
            }
            Err(e) => c.error(&x.name, e),
        }
    }
    c
}

fn criterion_4() -> Criterion {
    let mut c = Criterion::default();
    let t = tol();
    let opts = TraceOptions::grid(256, 256);
    match trace_isophote(&catalog::sphere(1.0), Vec3::z(), PI / 3.0, &opts, &t) {
        Ok(tr) => {
            c.holds(
                "sphere: one closed polyline",
                tr.polylines.len() == 1 && tr.polylines[0].closed,
            );
            c.at_most("sphere: max |<N,d> - 1/2|", tr.field_residual, 1e-9);
            let dv = tr
                .polylines
                .iter()
                .flat_map(|p| p.uv.iter())
                .map(|uv| (uv.y - PI / 6.0).abs())
                .fold(0.0, f64::max);
            c.at_most("sphere: max |v - pi/6|", dv, 1e-4);
        }
        Err(e) => c.error("sphere trace", e),
    }
    match trace_isophote(&catalog::cylinder(1.0, (-1.0, 1.0)), Vec3::x(), PI / 3.0, &opts, &t) {
        Ok(tr) => {
            let mut found = [false, false];
            let mut du = 0.0f64;
            for p in &tr.polylines {
                let u = p.uv.iter().map(|x| x.x).sum::<f64>() / p.uv.len() as f64;
                let k = usize::from(u < 0.0);
                found[k] = true;
                let target = if k == 0 { PI / 3.0 } else { -PI / 3.0 };
                du = du.max(p.uv.iter().map(|x| (x.x - target).abs()).fold(0.0, f64::max));
            }
            c.holds("cylinder: rulings at u = pi/3 and u = -pi/3", found == [true, true]);
            c.at_most("cylinder: max |u -+ pi/3|", du, 1e-6);
        }
        Err(e) => c.error("cylinder trace", e),
    }
    c
}

fn criterion_5(traced: &[Suite]) -> Criterion {
    let mut c = Criterion::default();
    let t = tol();
    for x in traced {
        let run = |c: &mut Criterion| -> Result<(), GeomError> {
            let p = mu_invariant(&x.samples, &t)?;
            let axis = recover_axis(&x.samples, p.theta_estimate, &t)?;
            c.at_most(format!("{}: angle to d", x.name), axis.angle_to(&x.d), 1e-6);
            c.at_most(
                format!("{}: axis derivative", x.name),
                axis_derivative_check(&x.samples, &axis, &t)?,
                1e-6,
            );
            Ok(())
        };
        if let Err(e) = run(&mut c) {
            c.error(&x.name, e);
        }
    }
    // control: the sphere latitude with theta jittered by 0.05 rad
    let s = &traced[0].samples;
    let jittered = mu_invariant(s, &t).and_then(|p| recover_axis(s, p.theta_estimate + 0.05, &t));
    c.holds(
        "jittered control is refused",
        matches!(jittered, Err(GeomError::NoConsistentAxis { .. }))
            || jittered.map(|a| !a.certified(&t)).unwrap_or(false),
    );
    c
}

fn criterion_6(suite: &[Suite]) -> Criterion {
    let mut c = Criterion::default();
    for x in suite {
        let tg = max_abs(&x.samples, |s| s.tau_g);
        let td = max_abs(&x.samples, |s| s.tangent.dot(&x.d));
        if tg <= 1e-6 {
            c.at_most(format!("{}: max |<T,d>| (max |tau_g| = {tg:.1e})", x.name), td, 1e-6);
        } else {
            c.exceeds(format!("{}: max |tau_g|", x.name), tg, 1e-3);
            c.exceeds(format!("{}: max |<T,d>|", x.name), td, 1e-3);
        }
    }
    c
}

fn criterion_7() -> Criterion {
    let mut c = Criterion::default();
    let t = tol();
    let run = |c: &mut Criterion| -> Result<(), GeomError> {
        let s = darboux_along(&latitude(0.0), 128, &t)?;
        let p = mu_invariant(&s, &t)?;
        c.at_most("|theta - pi/2|", (p.theta_estimate - FRAC_PI_2).abs(), 1e-8);
        let cls = classify_isophote(&s, &p, &t)?;
        c.holds(
            "classified LineOfCurvaturePlanar",
            cls.kind == IsophoteKind::LineOfCurvaturePlanar && cls.consistent,
        );
        c.at_most("max |k_g|", cls.evidence.max_abs_k_g, 1e-8);
        c.at_most("max |tau|", cls.evidence.max_abs_tau.unwrap_or(f64::INFINITY), 1e-8);
        let axis = recover_axis(&s, p.theta_estimate, &t)?;
        let dev = s
            .iter()
            .map(|x| (x.tangent_normal.dot(&axis.d).abs() - 1.0).abs())
            .fold(0.0, f64::max);
        c.at_most("max | |<B, d>| - 1 |", dev, 1e-6);
        Ok(())
    };
    if let Err(e) = run(&mut c) {
        c.error("equator", e);
    }
    c
}

fn illumination_stdev(spec: &CanalSpec, v0: f64, d: &Vec3) -> f64 {
    let vals: Vec<f64> = spec
        .spine
        .sample_params(400)
        .iter()
        .map(|&s| canal_unit_normal(spec, s, v0).dot(d))
        .collect();
    stdev(&vals)
}

fn criterion_8() -> Criterion {
    let mut c = Criterion::default();
    let spec = helix_tube();
    let d = catalog::circular_helix_axis();
    for v0 in [FRAC_PI_2, 3.0 * FRAC_PI_2] {
        c.at_most(
            format!("stdev <N(s, {v0:.4}), d>"),
            illumination_stdev(&spec, v0, &d),
            1e-9,
        );
    }
    c.exceeds(
        "control: stdev <N(s, pi/4), d>",
        illumination_stdev(&spec, FRAC_PI_4, &d),
        1e-3,
    );
    c
}

fn criterion_9() -> Criterion {
    let mut c = Criterion::default();
    let spec = slant_tube();
    let d = gamma_axis((1.0, 1.0));
    for v0 in [0.0, PI] {
        c.at_most(
            format!("stdev <N(s, {v0:.4}), d>"),
            illumination_stdev(&spec, v0, &d),
            1e-8,
        );
    }
    c
}

fn criterion_10() -> Criterion {
    let mut c = Criterion::default();
    let cases = [
        (
            helix_tube(),
            [FRAC_PI_2, 3.0 * FRAC_PI_2],
            catalog::circular_helix_axis(),
            "helix tube",
        ),
        (slant_tube(), [0.0, PI], gamma_axis((1.0, 1.0)), "slant tube"),
    ];
    for (spec, vs, d, name) in &cases {
        for &v0 in vs {
            let run = |c: &mut Criterion| -> Result<(), GeomError> {
                let smp = parameter_curve_samples(spec, v0, 200)?;
                let cos = smp.iter().map(|x| x.darboux.normal.dot(d)).sum::<f64>() / smp.len() as f64;
                let theta = cos.clamp(-1.0, 1.0).acos();
                let r = theorem4_residual(spec, &smp, *d, theta)?;
                c.at_most(format!("{name} v0 = {v0:.4}: residual, best branch"), r.best, 1e-8);
                let ctrl = parameter_curve_samples(spec, v0 + 0.05, 200)?;
                let rc = theorem4_residual(spec, &ctrl, *d, theta)?;
                c.exceeds(format!("{name} v0 = {v0:.4}: jittered control"), rc.best, 1e-4);
                Ok(())
            };
            if let Err(e) = run(&mut c) {
                c.error(name, e);
            }
        }
    }
    c
}

/// Max envelope residual and max normal angle over `n` random points.
fn envelope_check(spec: &CanalSpec, n: usize, seed: u64) -> (f64, f64) {
    let surface = canal_surface(spec);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (a, b) = spec.s_range;
    let (mut env, mut ang) = (0.0f64, 0.0f64);
    for _ in 0..n {
        let s = rng.gen_range(a..=b);
        let v = rng.gen_range(0.0..2.0 * PI);
        let [e1, e2] = envelope_residuals(spec, s, v);
        env = env.max(e1.abs()).max(e2.abs());
        ang = match surface.unit_normal(s, v, &spec.tol) {
            Ok(nx) => ang.max(angle_between(&nx, &canal_unit_normal(spec, s, v))),
            Err(_) => f64::INFINITY,
        };
    }
    (env, ang)
}

/// A canal surface with the law's slope on a helix arc. The characteristic circles of a
/// linear-radius canal fold back once `r kappa > sqrt(1 - r'^2)`, so the radius is kept
/// between a quarter and a half of that bound.
fn law_canal(law: &RadiusLaw) -> Result<CanalSpec, GeomError> {
    let helix = catalog::circular_helix(2.0, 1.0, 1.0);
    let kappa = 2.0 / 5.0;
    let r_max = 0.5 * (1.0 - law.slope * law.slope).max(0.0).sqrt() / kappa;
    let len = (0.5 * r_max / law.slope.abs().max(1e-3)).min(1.0);
    let spine = helix.with_range((0.0, len));
    let c = if law.slope >= 0.0 { 0.5 * r_max } else { r_max };
    CanalSpec::new(spine, RadiusFunction::linear(law.slope, c), Branch::Minus, &tol())
}

fn criterion_11() -> Criterion {
    let mut c = Criterion::default();
    let t = tol();
    let mut specs: Vec<(String, Result<CanalSpec, GeomError>)> = vec![
        ("helix tube r = 0.3".into(), Ok(helix_tube())),
        ("slant tube r = 0.2".into(), Ok(slant_tube())),
        (
            "slant tube r = 0.2, plus branch".into(),
            Ok(slant_tube().with_branch(Branch::Plus)),
        ),
        (
            "circle tube r = 0.25".into(),
            CanalSpec::tube(catalog::circle(1.0), 0.25, Branch::Minus, &t),
        ),
    ];
    for (name, beta) in [("slope 0.05", None), ("cor3b beta = pi/64", Some(PI / 64.0))] {
        let slope = match beta {
            Some(b) => radius_law_integral_cor3b(b, 0.3, 0.0).map(|l| l.slope).unwrap_or(0.05),
            None => 0.05,
        };
        specs.push((
            format!("helix canal, {name}"),
            CanalSpec::new(
                catalog::circular_helix(2.0, 1.0, 1.0),
                RadiusFunction::linear(slope, 0.1),
                Branch::Minus,
                &t,
            ),
        ));
    }
    for (k, (name, spec)) in specs.iter().enumerate() {
        match spec {
            Ok(spec) => {
                let (env, ang) = envelope_check(spec, 1000, k as u64);
                c.at_most(format!("{name}: envelope"), env, 1e-8);
                c.at_most(format!("{name}: normal angle"), ang, 1e-7);
            }
            Err(e) => c.error(name, e.clone()),
        }
    }
    c
}

#[derive(Default)]
struct Tally {
    validated: usize,
    inconsistent: usize,
    /// Grid points where the law's precondition fails.
    outside: usize,
    other: Vec<String>,
    max_residual: f64,
    laws: Vec<RadiusLaw>,
}

impl Tally {
    fn add(&mut self, r: Result<RadiusLaw, GeomError>) {
        match r {
            Ok(l) => {
                self.validated += 1;
                self.max_residual = self.max_residual.max(l.residual);
                self.laws.push(l);
            }
            Err(GeomError::FormulaInconsistent { .. }) => self.inconsistent += 1,
            Err(GeomError::DomainViolation(_)) => self.outside += 1,
            Err(e) => self.other.push(e.to_string()),
        }
    }
}

fn criterion_12() -> Criterion {
    let mut c = Criterion::default();
    let n = 50;
    let mid = |i: usize, span: f64| (i as f64 + 0.5) / n as f64 * span;
    let mut integral = Tally::default();
    let mut linear = Tally::default();
    let mut prop1 = Tally::default();
    for i in 0..n {
        for j in 0..n {
            let (angle, v) = (mid(i, FRAC_PI_2), mid(j, 2.0 * PI));
            integral.add(radius_law_integral_cor3b(angle, v, 0.0));
            linear.add(radius_law_linear_cor3a(angle, v, -1.0));
            linear.add(radius_law_linear_cor3a(angle, v, 1.0));
            prop1.add(radius_law_prop1(angle, v));
        }
    }
    c.holds("integral law: every point validated", integral.validated == n * n);
    c.at_most("integral law: max residual", integral.max_residual, 1e-12);
    for (name, tally) in [("linear law", &linear), ("prop1 law", &prop1)] {
        c.holds(
            format!(
                "{name}: {} validated, {} inconsistent, {} outside domain, {} other",
                tally.validated,
                tally.inconsistent,
                tally.outside,
                tally.other.len()
            ),
            tally.other.is_empty(),
        );
        c.at_most(format!("{name}: max validated residual"), tally.max_residual, 1e-10);
    }
    let (mut env, mut ang) = (0.0f64, 0.0f64);
    let mut built = 0;
    for (k, law) in linear.laws.iter().chain(&prop1.laws).enumerate() {
        match law_canal(law) {
            Ok(spec) => {
                let (e, a) = envelope_check(&spec, 200, k as u64);
                env = env.max(e);
                ang = ang.max(a);
                built += 1;
            }
            Err(e) => c.error(&format!("canal for slope {}", law.slope), e),
        }
    }
    c.at_most(format!("{built} law canals: envelope"), env, 1e-8);
    c.at_most(format!("{built} law canals: normal angle"), ang, 1e-7);
    c
}

fn criterion_13() -> Criterion {
    let mut c = Criterion::default();
    let t = tol();
    let curves: Vec<(&str, SpaceCurve)> = vec![
        ("circle", catalog::circle(1.0)),
        ("circular helix", catalog::circular_helix(2.0, 1.0, 1.0)),
        ("slant helix", gamma()),
    ];
    for (name, curve) in &curves {
        let mut worst = 0.0f64;
        for s in curve.sample_params(64) {
            match frenet_serret_residuals(curve, s, &t) {
                Ok(r) => worst = worst.max(r.iter().cloned().fold(0.0, f64::max)),
                Err(e) => c.error(name, e),
            }
        }
        c.at_most(format!("{name}: Frenet-Serret residual"), worst, 1e-6);
    }
    let on_surface: Vec<(&str, Result<CurveOnSurface, GeomError>)> = vec![
        ("sphere latitude", Ok(latitude(PI / 6.0))),
        ("cylinder helix", Ok(cylinder_helix())),
        ("gamma on developable", Ok(gamma_on_developable())),
        (
            "torus line",
            CurveOnSurface::line(catalog::torus(2.0, 0.5), Vec2::zeros(), Vec2::new(1.0, 2.0), (0.0, 3.0))
                .arclength(1e-12, &t),
        ),
        (
            "graph line",
            CurveOnSurface::line(
                catalog::graph(1.0, -1.0, 1.0),
                Vec2::new(-0.6, -0.5),
                Vec2::new(1.0, 0.8),
                (0.0, 1.2),
            )
            .arclength(1e-12, &t),
        ),
    ];
    for (name, curve) in &on_surface {
        let curve = match curve {
            Ok(x) => x,
            Err(e) => {
                c.error(name, e.clone());
                continue;
            }
        };
        let (a, b) = curve.range();
        let mut worst = 0.0f64;
        for k in 1..32 {
            let s = a + (b - a) * k as f64 / 32.0;
            match darboux_equation_residuals(curve, s, &t) {
                Ok(r) => worst = worst.max(r.iter().cloned().fold(0.0, f64::max)),
                Err(e) => c.error(name, e),
            }
        }
        c.at_most(format!("{name}: Darboux equation residual"), worst, 1e-6);
        match darboux_along(curve, 100, &t) {
            Ok(samples) => {
                let (mut pyth, mut split) = (0.0f64, 0.0f64);
                for smp in &samples {
                    let r = frame_identity_residuals(smp);
                    pyth = pyth.max(r.pythagoras).max(r.orthonormality);
                    if let Some(x) = r.torsion_split {
                        split = split.max(x);
                    }
                }
                c.at_most(format!("{name}: kappa^2 = k_g^2 + k_n^2"), pyth, 1e-6);
                c.at_most(format!("{name}: tau_g = tau - phi'"), split, 1e-6);
            }
            Err(e) => c.error(name, e),
        }
    }
    c
}

fn main() -> ExitCode {
    let traced = traced_suite();
    let suite = full_suite();
    let with = |s: &Result<Vec<Suite>, GeomError>, f: fn(&[Suite]) -> Criterion| match s {
        Ok(x) => f(x),
        Err(e) => {
            let mut c = Criterion::default();
            c.error("suite", e.clone());
            c
        }
    };
    let results = [
        ("slant helix curvature, torsion and sigma", criterion_1()),
        ("slant helix on its rectifying developable", criterion_2()),
        ("Gauss-map circles", with(&suite, criterion_3)),
        ("tracing accuracy", criterion_4()),
        ("axis round trip", with(&traced, criterion_5)),
        ("<T,d> = 0 exactly when tau_g = 0", with(&suite, criterion_6)),
        ("equator silhouette", criterion_7()),
        ("general-helix tube isophotes", criterion_8()),
        ("slant-helix tube isophotes", criterion_9()),
        ("canal identity on tube isophotes", criterion_10()),
        ("canal envelope identities", criterion_11()),
        ("radius laws", criterion_12()),
        ("frame numerics", criterion_13()),
    ];
    let mut failed = 0;
    for (k, (name, c)) in results.iter().enumerate() {
        let pass = c.pass();
        if !pass {
            failed += 1;
        }
        println!("criterion {:>2} {}  {name}", k + 1, if pass { "PASS" } else { "FAIL" });
        for i in &c.items {
            let op = if i.above { ">" } else { "<=" };
            println!(
                "      {} {:<70} {:>11.3e} {op} {:.0e}",
                if i.pass() { "ok  " } else { "FAIL" },
                i.what,
                i.value,
                i.limit
            );
        }
        for e in &c.errors {
            println!("      ERR  {e}");
        }
    }
    println!("\n{} of {} criteria pass", results.len() - failed, results.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
