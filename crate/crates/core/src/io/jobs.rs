//! Job verbs: each runs one module operation, records checks against named thresholds and
//! writes its artifacts.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::fs;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::build::{branch_of, Scene};
use super::export::{
    export_mesh, read_obj, rows_from_polyline, rows_from_samples, write_curve_csv, write_domain_svg, write_obj,
    CurveRow,
};
use super::report::{Check, JobReport, Thresholds};
use super::scene::{Job, Value};
use crate::canal::{
    canal_unit_normal, envelope_residuals, parameter_curve_illumination, parameter_curve_samples,
    radius_law_integral_cor3b, radius_law_linear_cor3a, radius_law_prop1, theorem4_residual, tube_parameter_isophotes,
    CanalSpec, TubeIsophoteSource,
};
use crate::catalog;
use crate::curve::{classify_helix, frenet_at, HelixKind};
use crate::error::GeomError;
use crate::isophote::{
    angle_between, axis_derivative_check, classify_isophote, gauss_map_image, mu_invariant, recover_axis,
    recover_axis_constant_normal, samples_along_polyline, silhouette, trace_isophote, IsophoteKind, IsophoteTrace,
    MuProfile, TraceOptions,
};
use crate::surface::{darboux_along, CurveOnSurface, DarbouxSample, ParamSurface};
use crate::tolerance::{stdev, Stats};
use crate::{Vec2, Vec3};

use super::build::BuiltCurve;

/// Failure of a job that prevents it from producing a verdict.
#[derive(Debug, thiserror::Error)]
pub enum JobError {
    #[error(transparent)]
    Geom(#[from] GeomError),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

type JobResult = Result<(), JobError>;

/// Where a job writes and how it seeds its random sampling.
pub struct JobContext<'a> {
    pub out_dir: &'a Path,
    pub seed: u64,
    pub index: usize,
}

impl JobContext<'_> {
    fn path(&self, report: &mut JobReport, name: &str) -> PathBuf {
        let file = format!("job{:02}_{}_{name}", self.index, report.verb);
        report.artifacts.push(file.clone());
        self.out_dir.join(file)
    }

    fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed.wrapping_add(self.index as u64))
    }
}

/// Runs one job into `report`. Geometry and I/O failures are returned; verification
/// failures are recorded as failed checks.
pub fn run_job(scene: &mut Scene, job: &Job, th: &Thresholds, ctx: &JobContext, report: &mut JobReport) -> JobResult {
    match job.verb.as_str() {
        "trace" => trace_job(scene, job, th, ctx, report, false),
        "silhouette" => trace_job(scene, job, th, ctx, report, true),
        "axis" => axis_job(scene, job, th, ctx, report),
        "mu" => mu_job(scene, job, th, ctx, report),
        "classify" => classify_job(scene, job, th, ctx, report),
        "gauss-map" => gauss_job(scene, job, th, ctx, report),
        "canal" => canal_job(scene, job, th, ctx, report),
        "tube" => tube_job(scene, job, th, ctx, report),
        "radius-law" => radius_law_job(job, th, report),
        "verify-theorem4" => theorem4_job(scene, job, th, ctx, report),
        "verify-prop2" => prop_job(scene, job, th, ctx, report, HelixKind::GeneralHelix),
        "verify-prop3" => prop_job(scene, job, th, ctx, report, HelixKind::SlantHelix),
        "example1" => example1_job(job, th, ctx, report),
        v => Err(GeomError::InvalidInput(format!("unknown verb `{v}`")).into()),
    }
}

fn trace_opts(job: &Job) -> TraceOptions {
    let (nu, nv) = job.grid("grid");
    TraceOptions {
        grid: (nu, nv),
        newton_polish: job.flag("polish"),
    }
}

fn record_trace(
    tr: &IsophoteTrace,
    surface: &ParamSurface,
    th: &Thresholds,
    ctx: &JobContext,
    report: &mut JobReport,
) -> JobResult {
    report.value("polylines", tr.polylines.len());
    report.value(
        "polyline_lengths",
        tr.polylines.iter().map(|p| p.length()).collect::<Vec<_>>(),
    );
    report.value("closed", tr.polylines.iter().map(|p| p.closed).collect::<Vec<_>>());
    report.value("field_residual", tr.field_residual);
    report.value("diagnostics", &tr.diagnostics);
    if tr.is_empty() {
        report.notes.push(format!(
            "no level set: <N,d> - cos(theta) ranges over [{:e}, {:e}]",
            tr.diagnostics.f_min, tr.diagnostics.f_max
        ));
    } else {
        report.check(Check::at_most(
            "max |<N,d> - cos theta| on traced points",
            tr.field_residual,
            th,
            "trace_tol",
        ));
    }
    for (k, p) in tr.polylines.iter().enumerate() {
        let path = ctx.path(report, &format!("curve{k}.csv"));
        write_curve_csv(&path, &rows_from_polyline(p))?;
    }
    let path = ctx.path(report, "domain.svg");
    let title = format!(
        "{} d=({:.3},{:.3},{:.3}) theta={:.6}",
        surface.name(),
        tr.d.x,
        tr.d.y,
        tr.d.z,
        tr.theta
    );
    write_domain_svg(&path, surface, &tr.d, tr.theta, &tr.polylines, &title, &th.tol)?;
    Ok(())
}

fn trace_job(
    scene: &mut Scene,
    job: &Job,
    th: &Thresholds,
    ctx: &JobContext,
    report: &mut JobReport,
    sil: bool,
) -> JobResult {
    let surface = scene.surface(job.text("surface"))?.surface;
    let d = job.vec3("d").expect("validated").normalize();
    let opts = trace_opts(job);
    let tr = if sil {
        silhouette(&surface, d, &opts, &th.tol)?
    } else {
        trace_isophote(&surface, d, job.num("theta"), &opts, &th.tol)?
    };
    record_trace(&tr, &surface, th, ctx, report)
}

/// Darboux samples of the job's curve: a scene curve on a surface, or the longest traced
/// level curve of `(surface, d, theta)`. Also returns the generating `(d, theta)` when known.
/// `(d, theta)` supplied with a job.
type Given = (Vec3, f64);

fn job_samples(
    scene: &mut Scene,
    job: &Job,
    th: &Thresholds,
    ctx: &JobContext,
    report: &mut JobReport,
) -> Result<(Vec<DarbouxSample>, Option<Given>), JobError> {
    let n = job.count("samples");
    let given = match (job.vec3("d"), job.arg("theta")) {
        (Some(d), Some(t)) => Some((d.normalize(), t.as_f64().unwrap_or(f64::NAN))),
        _ => None,
    };
    let samples = if job.arg("curve").is_some() {
        let curve = match scene.curve(job.text("curve"))? {
            BuiltCurve::OnSurface(c) => c,
            BuiltCurve::Space(_) => {
                return Err(
                    GeomError::InvalidInput(format!("`{}` is not a curve on a surface", job.text("curve"))).into(),
                )
            }
        };
        darboux_along(&curve, n, &th.tol)?
    } else {
        let surface = scene.surface(job.text("surface"))?.surface;
        let (d, theta) = given.expect("validated");
        let tr = trace_isophote(&surface, d, theta, &trace_opts(job), &th.tol)?;
        let Some(poly) = tr.polylines.iter().max_by(|a, b| a.length().total_cmp(&b.length())) else {
            return Err(GeomError::InvalidInput(format!(
                "no isophote: <N,d> - cos(theta) ranges over [{:e}, {:e}]",
                tr.diagnostics.f_min, tr.diagnostics.f_max
            ))
            .into());
        };
        report.value("traced_polylines", tr.polylines.len());
        samples_along_polyline(&surface, d, theta, poly, n, &th.tol)?
    };
    let path = ctx.path(report, "curve.csv");
    write_curve_csv(&path, &rows_from_samples(&samples))?;
    Ok((samples, given))
}

/// `mu` profile, falling back to the constant-normal case when the data is degenerate.
fn profile(
    samples: &[DarbouxSample],
    given: Option<Given>,
    th: &Thresholds,
    report: &mut JobReport,
) -> Result<MuProfile, JobError> {
    match mu_invariant(samples, &th.tol) {
        Ok(p) => Ok(p),
        Err(GeomError::DegenerateNormalData { .. }) => {
            let theta = match given {
                Some((d, _)) => samples[0].normal.dot(&d).clamp(-1.0, 1.0).acos(),
                None => {
                    return Err(GeomError::InvalidInput(
                        "surface normal is constant along the curve; give `d` and `theta`".into(),
                    )
                    .into())
                }
            };
            report
                .notes
                .push("surface normal constant along the curve: every axis at that angle fits".into());
            Ok(MuProfile::for_constant_normal(samples, theta, &th.tol)?)
        }
        Err(e) => Err(e.into()),
    }
}

fn constancy_check(name: &str, stats: &Stats, th: &Thresholds) -> Check {
    let limit = th.tol.const_atol + th.tol.const_rtol * stats.median_abs.max(1.0);
    Check::custom(
        name,
        stats.spread(),
        format!(
            "const_atol + const_rtol*max(1, median|f|) = {:e} + {:e}*{:.6}",
            th.tol.const_atol,
            th.tol.const_rtol,
            stats.median_abs.max(1.0)
        ),
        limit,
    )
}

fn mu_checks(p: &MuProfile, th: &Thresholds, report: &mut JobReport) {
    report.value("mu_stats", p.stats);
    report.value("theta_estimate", p.theta_estimate);
    report.value("theta_estimate_deg", p.theta_estimate.to_degrees());
    report.value("sign_branch", p.branch);
    report.value("constant_normal", p.constant_normal);
    if let Some(s) = &p.stats {
        report.check(constancy_check("mu spread", s, th));
    }
}

fn mu_job(scene: &mut Scene, job: &Job, th: &Thresholds, ctx: &JobContext, report: &mut JobReport) -> JobResult {
    let (samples, given) = job_samples(scene, job, th, ctx, report)?;
    let p = profile(&samples, given, th, report)?;
    report.value("mu", p.samples.iter().map(|(s, m)| [*s, *m]).collect::<Vec<_>>());
    mu_checks(&p, th, report);
    Ok(())
}

fn axis_job(scene: &mut Scene, job: &Job, th: &Thresholds, ctx: &JobContext, report: &mut JobReport) -> JobResult {
    let (samples, given) = job_samples(scene, job, th, ctx, report)?;
    let p = profile(&samples, given, th, report)?;
    mu_checks(&p, th, report);
    let axis = if p.constant_normal {
        let hint = given.map(|g| g.0).unwrap_or_else(Vec3::z);
        recover_axis_constant_normal(&samples, p.theta_estimate, hint, &th.tol)?
    } else {
        recover_axis(&samples, p.theta_estimate, &th.tol)?
    };
    report.value("axis", axis);
    report.check(Check::at_most(
        "axis residual max |d_i - mean d|",
        axis.residual,
        th,
        "axis_tol",
    ));
    let drift = axis_derivative_check(&samples, &axis, &th.tol)?;
    report.check(Check::at_most("axis drift max |d_(i+1) - d_i|", drift, th, "axis_tol"));
    if let Some((d, _)) = given {
        report.check(Check::at_most(
            "angle to generating d (rad)",
            axis.angle_to(&d),
            th,
            "axis_tol",
        ));
    }
    Ok(())
}

fn classify_job(scene: &mut Scene, job: &Job, th: &Thresholds, ctx: &JobContext, report: &mut JobReport) -> JobResult {
    let (samples, given) = job_samples(scene, job, th, ctx, report)?;
    let p = profile(&samples, given, th, report)?;
    mu_checks(&p, th, report);
    let c = classify_isophote(&samples, &p, &th.tol)?;
    report.value("kind", c.kind);
    report.value("evidence", &c.evidence);
    report.notes.extend(c.notes.iter().cloned());
    report.check(Check::holds(
        "side conditions of the fired rule",
        c.consistent,
        th,
        "class_tol",
    ));
    Ok(())
}

fn gauss_job(scene: &mut Scene, job: &Job, th: &Thresholds, ctx: &JobContext, report: &mut JobReport) -> JobResult {
    let (samples, _) = job_samples(scene, job, th, ctx, report)?;
    let g = gauss_map_image(&samples, &th.tol)?;
    report.value("plane_normal", g.plane_normal);
    report.value("plane_offset", g.plane_offset);
    report.value("kbar_g_stats", Stats::of(&g.kbar_g));
    report.check(Check::at_most(
        "Gauss image distance from fitted plane",
        g.plane_fit_residual,
        th,
        "gauss_plane_tol",
    ));
    report.check(Check::at_most("max |kbar_g - mu|", g.mu_agreement, th, "gauss_mu_tol"));
    let rows: Vec<CurveRow> = samples
        .iter()
        .zip(&g.points)
        .map(|(s, n)| CurveRow {
            s: s.s,
            uv: s.uv,
            point: *n,
        })
        .collect();
    let path = ctx.path(report, "gauss_image.csv");
    write_curve_csv(&path, &rows)?;
    Ok(())
}

fn envelope_and_normal(
    spec: &CanalSpec,
    surface: &ParamSurface,
    n: usize,
    rng: &mut ChaCha8Rng,
    th: &Thresholds,
) -> (f64, f64) {
    let (a, b) = spec.s_range;
    let (mut env, mut ang) = (0.0f64, 0.0f64);
    for _ in 0..n {
        let s = rng.gen_range(a..=b);
        let v = rng.gen_range(0.0..2.0 * PI);
        let [e1, e2] = envelope_residuals(spec, s, v);
        env = env.max(e1.abs()).max(e2.abs());
        match surface.unit_normal(s, v, &th.tol) {
            Ok(nx) => ang = ang.max(angle_between(&nx, &canal_unit_normal(spec, s, v))),
            Err(_) => ang = f64::INFINITY,
        }
    }
    (env, ang)
}

fn write_mesh(
    surface: &ParamSurface,
    res: (usize, usize),
    name: &str,
    th: &Thresholds,
    ctx: &JobContext,
    report: &mut JobReport,
) -> Result<(super::export::Mesh, PathBuf), JobError> {
    let mesh = export_mesh(surface, res, &th.tol)?;
    let path = ctx.path(report, "mesh.obj");
    write_obj(&path, &mesh, name)?;
    report.value("mesh_vertices", mesh.vertices.len());
    report.value("mesh_faces", mesh.faces.len());
    report.value("mesh_periodic", mesh.periodic);
    report.value("degenerate_faces", &mesh.degenerate_faces);
    Ok((mesh, path))
}

fn canal_job(scene: &mut Scene, job: &Job, th: &Thresholds, ctx: &JobContext, report: &mut JobReport) -> JobResult {
    let built = scene.surface(job.text("surface"))?;
    let Some(spec) = built.canal else {
        return Err(
            GeomError::InvalidInput(format!("`{}` is not a tube or canal surface", job.text("surface"))).into(),
        );
    };
    let mut rng = ctx.rng();
    let (env, ang) = envelope_and_normal(&spec, &built.surface, job.count("samples"), &mut rng, th);
    report.check(Check::at_most(
        "envelope residuals at random (s, v)",
        env,
        th,
        "envelope_tol",
    ));
    report.check(Check::at_most(
        "normal angle closed form vs S_s x S_v",
        ang,
        th,
        "normal_angle_tol",
    ));
    let (mesh, path) = write_mesh(&built.surface, job.grid("mesh"), &built.entity.id, th, ctx, report)?;
    // re-evaluate the envelope identities on vertices read back from the file
    let (verts, _, _) = read_obj(&path)?;
    let mut worst = 0.0f64;
    for _ in 0..100.min(verts.len()) {
        let k = rng.gen_range(0..verts.len());
        let uv = mesh.params[k];
        let f = frenet_at(&spec.spine, uv.x, &th.tol)?;
        let p = verts[k] - f.point;
        let (r, dr) = (spec.radius.value(uv.x), spec.radius.slope(uv.x));
        worst = worst.max((p.norm() - r).abs()).max((p.dot(&f.tangent) + r * dr).abs());
    }
    report.check(Check::at_most(
        "envelope residuals on exported vertices",
        worst,
        th,
        "envelope_tol",
    ));
    Ok(())
}

fn spine_verdict(
    scene: &mut Scene,
    job: &Job,
    th: &Thresholds,
    report: &mut JobReport,
) -> Result<(crate::curve::SpaceCurve, crate::curve::HelixVerdict), JobError> {
    let spine = scene.space_curve(job.text("spine"))?;
    let verdict = classify_helix(&spine, job.count("samples").max(8), &th.tol)?;
    report.value("spine_kind", verdict.kind);
    report.value("spine_tau_over_kappa", verdict.tau_over_kappa);
    report.value("spine_sigma", verdict.sigma);
    Ok((spine, verdict))
}

fn write_parameter_curve(
    spec: &CanalSpec,
    v0: f64,
    n: usize,
    ctx: &JobContext,
    report: &mut JobReport,
    tag: &str,
) -> JobResult {
    let rows: Vec<CurveRow> = spec
        .spine
        .sample_params(n)
        .into_iter()
        .map(|s| CurveRow {
            s,
            uv: Vec2::new(s, v0),
            point: spec.point(s, v0),
        })
        .collect();
    let path = ctx.path(report, &format!("{tag}.csv"));
    write_curve_csv(&path, &rows)?;
    Ok(())
}

fn tube_job(scene: &mut Scene, job: &Job, th: &Thresholds, ctx: &JobContext, report: &mut JobReport) -> JobResult {
    let (spine, verdict) = spine_verdict(scene, job, th, report)?;
    let n = job.count("samples");
    let spec = CanalSpec::tube(spine.clone(), job.num("r"), branch_of(job.text("branch")), &th.tol)?;
    let list = tube_parameter_isophotes(&spine, &verdict, n, &th.tol)?;
    report.value("isophotes", &list);
    for (k, x) in list.iter().enumerate() {
        let st = parameter_curve_illumination(&spec, x.v0, &x.d, n).expect("samples");
        let vals: Vec<f64> = spec
            .spine
            .sample_params(n)
            .iter()
            .map(|&s| canal_unit_normal(&spec, s, x.v0).dot(&x.d))
            .collect();
        let name = match x.source {
            TubeIsophoteSource::GeneralHelix => "prop2_stdev_tol",
            TubeIsophoteSource::SlantHelix => "prop3_stdev_tol",
        };
        report.check(Check::at_most(
            format!("stdev <N(s, {:.6}), d>", x.v0),
            stdev(&vals),
            th,
            name,
        ));
        report.value(&format!("cos_theta_v{k}"), st.median);
        write_parameter_curve(&spec, x.v0, n, ctx, report, &format!("v{k}"))?;
    }
    let surface = crate::canal::canal_surface(&spec);
    write_mesh(&surface, job.grid("mesh"), "tube", th, ctx, report)?;
    Ok(())
}

fn illumination_stdev(spec: &CanalSpec, v0: f64, d: &Vec3, n: usize) -> f64 {
    let vals: Vec<f64> = spec
        .spine
        .sample_params(n)
        .iter()
        .map(|&s| canal_unit_normal(spec, s, v0).dot(d))
        .collect();
    stdev(&vals)
}

fn prop_job(
    scene: &mut Scene,
    job: &Job,
    th: &Thresholds,
    ctx: &JobContext,
    report: &mut JobReport,
    want: HelixKind,
) -> JobResult {
    let (spine, verdict) = spine_verdict(scene, job, th, report)?;
    let n = job.count("samples");
    let (tol_name, source, label) = match want {
        HelixKind::SlantHelix => ("prop3_stdev_tol", TubeIsophoteSource::SlantHelix, "slant helix"),
        _ => ("prop2_stdev_tol", TubeIsophoteSource::GeneralHelix, "general helix"),
    };
    let is_kind = match want {
        HelixKind::SlantHelix => verdict.kind.is_slant(),
        _ => verdict.kind.is_general(),
    };
    report.check(Check::holds(format!("spine is a {label}"), is_kind, th, "const_atol"));
    if !is_kind {
        return Ok(());
    }
    let spec = CanalSpec::tube(spine.clone(), job.num("r"), branch_of(job.text("branch")), &th.tol)?;
    let list: Vec<_> = tube_parameter_isophotes(&spine, &verdict, n, &th.tol)?
        .into_iter()
        .filter(|x| x.source == source)
        .collect();
    report.value("isophotes", &list);
    for (k, x) in list.iter().enumerate() {
        let sd = illumination_stdev(&spec, x.v0, &x.d, n);
        report.check(Check::at_most(
            format!("stdev <N(s, {:.6}), d>", x.v0),
            sd,
            th,
            tol_name,
        ));
        write_parameter_curve(&spec, x.v0, n, ctx, report, &format!("v{k}"))?;
    }
    if let Some(x) = list.first() {
        let sd = illumination_stdev(&spec, FRAC_PI_4, &x.d, n);
        report.check(Check::exceeds(
            "control: stdev <N(s, pi/4), d>",
            sd,
            th,
            "control_min_stdev",
        ));
        if sd <= th.limits.control_min_stdev {
            report.notes.push(format!(
                "control v0 = pi/4 is itself an isophote here: <n, d> = {:.3e} along the spine, so <N, d> is constant for every v0",
                max_abs_n_dot_d(&spec, &x.d, n)
            ));
        }
    }
    Ok(())
}

fn max_abs_n_dot_d(spec: &CanalSpec, d: &Vec3, n: usize) -> f64 {
    spec.spine
        .sample_params(n)
        .iter()
        .filter_map(|&s| frenet_at(&spec.spine, s, &spec.tol).ok())
        .map(|f| f.normal.dot(d).abs())
        .fold(0.0, f64::max)
}

fn theorem4_job(scene: &mut Scene, job: &Job, th: &Thresholds, ctx: &JobContext, report: &mut JobReport) -> JobResult {
    let (spine, verdict) = spine_verdict(scene, job, th, report)?;
    let n = job.count("samples");
    let spec = CanalSpec::tube(spine.clone(), job.num("r"), branch_of(job.text("branch")), &th.tol)?;
    let jitter = job.num("jitter");
    let mut reports = Vec::new();
    for x in tube_parameter_isophotes(&spine, &verdict, n, &th.tol)? {
        let smp = parameter_curve_samples(&spec, x.v0, n)?;
        let cos = smp.iter().map(|c| c.darboux.normal.dot(&x.d)).sum::<f64>() / smp.len() as f64;
        let theta = cos.clamp(-1.0, 1.0).acos();
        let r = theorem4_residual(&spec, &smp, x.d, theta)?;
        report.check(Check::at_most(
            format!("identity residual v0 = {:.6} (theta = {:.6}), best branch", x.v0, theta),
            r.best,
            th,
            "theorem4_tol",
        ));
        let ctrl = parameter_curve_samples(&spec, x.v0 + jitter, n)?;
        let rc = theorem4_residual(&spec, &ctrl, x.d, theta)?;
        report.check(Check::exceeds(
            format!("control v0 + {jitter:.3}: identity residual"),
            rc.best,
            th,
            "theorem4_control_min",
        ));
        reports.push(serde_json::json!({
            "v0": x.v0, "theta": theta, "report": r, "control": rc,
        }));
        let rows: Vec<CurveRow> = smp
            .iter()
            .map(|c| CurveRow {
                s: c.darboux.s,
                uv: Vec2::new(c.s, c.v),
                point: c.darboux.point,
            })
            .collect();
        let path = ctx.path(report, &format!("v0_{:.4}.csv", x.v0));
        write_curve_csv(&path, &rows)?;
    }
    report.value("variants", reports);
    Ok(())
}

/// Validity counts of a radius law over a parameter sweep.
#[derive(Debug, Default, serde::Serialize)]
struct Sweep {
    validated: usize,
    inconsistent: usize,
    domain: usize,
    max_validated_residual: f64,
}

impl Sweep {
    fn add(&mut self, r: crate::error::Result<crate::canal::RadiusLaw>) {
        match r {
            Ok(l) => {
                self.validated += 1;
                self.max_validated_residual = self.max_validated_residual.max(l.residual);
            }
            Err(GeomError::FormulaInconsistent { .. }) => self.inconsistent += 1,
            Err(_) => self.domain += 1,
        }
    }
}

fn radius_law_job(job: &Job, th: &Thresholds, report: &mut JobReport) -> JobResult {
    let law = job.text("law");
    let tol_name = if law == "cor3b" { "integral_law_tol" } else { "law_tol" };
    if job.arg("sweep").is_some() {
        let n = job.count("sweep");
        let mut sweep = Sweep::default();
        for i in 0..n {
            for j in 0..n {
                let a = (i as f64 + 0.5) / n as f64;
                let v = 2.0 * PI * j as f64 / n as f64;
                match law {
                    "cor3b" => sweep.add(radius_law_integral_cor3b(a * FRAC_PI_2, v, 0.0)),
                    "cor3a" => {
                        sweep.add(radius_law_linear_cor3a(a * FRAC_PI_2, v, -1.0));
                        sweep.add(radius_law_linear_cor3a(a * FRAC_PI_2, v, 1.0));
                    }
                    _ => sweep.add(radius_law_prop1(a * FRAC_PI_2, v)),
                }
            }
        }
        report.check(Check::at_most(
            "max residual over validated points",
            sweep.max_validated_residual,
            th,
            tol_name,
        ));
        report.value("sweep", &sweep);
        return Ok(());
    }
    let result = match law {
        "cor3a" => radius_law_linear_cor3a(job.num("theta"), job.num("v"), job.num("sign")),
        "cor3b" => radius_law_integral_cor3b(job.num("beta"), job.num("v"), job.num("phi")),
        _ => radius_law_prop1(job.num("theta"), job.num("v")),
    };
    match result {
        Ok(l) => {
            report.check(Check::at_most("defining relation residual", l.residual, th, tol_name));
            report.value("law", &l);
        }
        Err(GeomError::FormulaInconsistent {
            value, residual, roots, ..
        }) => {
            report.check(Check::at_most("defining relation residual", residual, th, tol_name));
            report.value("printed_value", value);
            report.value("roots", roots);
            report
                .notes
                .push("the closed form is not a root of its defining relation; the roots are listed".into());
        }
        Err(e) => return Err(e.into()),
    }
    Ok(())
}

fn example1_job(job: &Job, th: &Thresholds, ctx: &JobContext, report: &mut JobReport) -> JobResult {
    let (a, b) = (job.num("a"), job.num("b"));
    let n = job.count("samples");
    if !(a > b) {
        return Err(GeomError::DomainViolation(format!("need a > b, got a = {a}, b = {b}")).into());
    }
    let gamma = catalog::slant_helix(a, b);
    let c = (a * a - b * b).sqrt();
    let (mut ek, mut et) = (0.0f64, 0.0f64);
    for t in gamma.sample_params(n) {
        let f = frenet_at(&gamma, t, &th.tol)?;
        ek = ek.max((f.kappa - c * (b * t).cos()).abs());
        et = et.max((f.tau - c * (b * t).sin()).abs());
    }
    report.check(Check::at_most(
        "max |kappa - sqrt(a^2-b^2) cos(bt)|",
        ek,
        th,
        "example1_tol",
    ));
    report.check(Check::at_most(
        "max |tau - sqrt(a^2-b^2) sin(bt)|",
        et,
        th,
        "example1_tol",
    ));
    let verdict = classify_helix(&gamma, n, &th.tol)?;
    let sigma = b / c;
    report.value("helix_kind", verdict.kind);
    report.value("sigma", verdict.sigma);
    report.value("tau_over_kappa", verdict.tau_over_kappa);
    report.check(Check::at_most(
        "|median sigma - b/sqrt(a^2-b^2)|",
        (verdict.sigma.median - sigma).abs(),
        th,
        "example1_tol",
    ));
    report.check(Check::at_most(
        "sigma spread",
        verdict.sigma.spread(),
        th,
        "example1_tol",
    ));
    report.check(Check::exceeds(
        "tau/kappa spread",
        verdict.tau_over_kappa.spread(),
        th,
        "nonconstant_min_spread",
    ));
    report.check(Check::holds(
        "slant helix and not a general helix",
        verdict.kind == HelixKind::SlantHelix,
        th,
        "const_atol",
    ));
    let surface = catalog::rectifying_developable(&gamma, 0.5);
    let (t0, t1) = gamma.range();
    let curve = CurveOnSurface::line(surface.clone(), Vec2::new(0.0, t0), Vec2::new(0.0, 1.0), (0.0, t1 - t0))
        .with_unit_speed(true);
    let samples = darboux_along(&curve, n, &th.tol)?;
    let max_kg = samples.iter().map(|s| s.k_g.abs()).fold(0.0, f64::max);
    report.check(Check::at_most(
        "max |k_g| on the rectifying developable",
        max_kg,
        th,
        "class_tol",
    ));
    let p = mu_invariant(&samples, &th.tol)?;
    mu_checks(&p, th, report);
    let theta = 1f64.atan2(sigma);
    report.check(Check::at_most(
        "|theta_estimate - arccot(sigma)| (deg)",
        (p.theta_estimate - theta).abs().to_degrees(),
        th,
        "theta_deg_tol",
    ));
    let cls = classify_isophote(&samples, &p, &th.tol)?;
    report.value("isophote_kind", cls.kind);
    report.check(Check::holds(
        "classified a geodesic slant-helix isophote",
        cls.kind == IsophoteKind::GeodesicSlantHelix && cls.consistent,
        th,
        "class_tol",
    ));
    let axis = recover_axis(&samples, p.theta_estimate, &th.tol)?;
    report.value("axis", axis);
    report.check(Check::at_most("axis residual", axis.residual, th, "axis_tol"));
    let path = ctx.path(report, "gamma.csv");
    write_curve_csv(&path, &rows_from_samples(&samples))?;
    let (nu, nv) = (8, 64);
    let mesh = export_mesh(&surface, (nu, nv), &th.tol)?;
    let path = ctx.path(report, "developable.obj");
    write_obj(&path, &mesh, "rectifying_developable")?;
    let tube = CanalSpec::tube(gamma, 0.2, crate::canal::Branch::Minus, &th.tol)?;
    let mesh = export_mesh(&crate::canal::canal_surface(&tube), (64, 16), &th.tol)?;
    let path = ctx.path(report, "tube.obj");
    write_obj(&path, &mesh, "tube")?;
    Ok(())
}

/// Applies `[tolerances]` and per-job overrides to the defaults.
pub fn thresholds_for(scene_tol: &std::collections::BTreeMap<String, f64>, job: &Job) -> Thresholds {
    let mut th = Thresholds::default();
    for (k, v) in scene_tol {
        th.set(k, *v);
    }
    for (k, v) in &job.args {
        if let Value::Number(x) = v {
            th.set(k, *x);
        }
    }
    th
}

/// Creates `root/<timestamp>`, adding a counter if that exists already.
pub fn timestamped_dir(root: &Path, stamp: &str) -> std::io::Result<PathBuf> {
    fs::create_dir_all(root)?;
    for k in 0.. {
        let name = if k == 0 {
            stamp.to_string()
        } else {
            format!("{stamp}-{k}")
        };
        let dir = root.join(name);
        match fs::create_dir(&dir) {
            Ok(()) => return Ok(dir),
            Err(e) if e.kind() == std::io::ErrorKind::AlreadyExists => continue,
            Err(e) => return Err(e),
        }
    }
    unreachable!()
}
