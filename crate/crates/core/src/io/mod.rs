//! Scene files, job runner, exports and verification reports.

mod build;
mod export;
mod jobs;
mod report;
mod scene;

use std::fs;
use std::path::{Path, PathBuf};

pub use build::{BuiltCurve, BuiltSurface, Scene};
pub use export::{
    export_mesh, read_curve_csv, read_obj, rows_from_polyline, rows_from_samples, write_curve_csv, write_domain_svg,
    write_obj, CurveRow, Mesh, ObjData, CSV_HEADER,
};
pub use jobs::{run_job, JobContext, JobError};
pub use report::{
    Check, Comparison, JobReport, Limits, Manifest, ManifestEntry, Status, Thresholds, VerificationReport,
};
pub use scene::{
    parse_angle, parse_grid, parse_scene, scene_from_tokens, serialize_scene, Entity, Job, Location, SceneConfig,
    SceneError, SceneErrors, Value, CURVE_KINDS, SURFACE_KINDS, VERBS,
};

use crate::error::GeomError;

/// Environment variable overriding the output root.
pub const OUT_ENV: &str = "ISOPHOTE_OUT";
pub const DEFAULT_OUT: &str = "isophote-out";

/// Process exit codes.
pub mod exit {
    /// Every check passed.
    pub const PASS: i32 = 0;
    /// At least one check failed.
    pub const VERIFICATION_FAILED: i32 = 1;
    /// Bad command line or scene file.
    pub const USAGE: i32 = 2;
    /// A geometric operation was refused (degenerate input, domain violation).
    pub const GEOMETRY: i32 = 3;
    /// Reading or writing files failed.
    pub const IO: i32 = 4;
}

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("{0}")]
    Scene(#[from] SceneErrors),
    #[error("geometry: {0}")]
    Geom(#[from] GeomError),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Scene(_) => exit::USAGE,
            RunError::Geom(_) => exit::GEOMETRY,
            RunError::Io(_) => exit::IO,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Output root; `None` reads [`OUT_ENV`] and falls back to [`DEFAULT_OUT`].
    pub out_root: Option<PathBuf>,
    pub seed: u64,
}

pub struct RunOutcome {
    pub report: VerificationReport,
    pub out_dir: PathBuf,
    pub manifest: Manifest,
}

impl RunOutcome {
    pub fn exit_code(&self) -> i32 {
        if self.report.jobs.iter().any(|j| j.status == Status::Error) {
            exit::GEOMETRY
        } else if self.report.passed() {
            exit::PASS
        } else {
            exit::VERIFICATION_FAILED
        }
    }
}

pub fn out_root(opts: &RunOptions) -> PathBuf {
    opts.out_root
        .clone()
        .or_else(|| std::env::var_os(OUT_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT))
}

/// Runs every job in order into a fresh timestamped directory and writes
/// `report.json`, `report.txt` and `manifest.json` there.
pub fn run_scene(config: &SceneConfig, opts: &RunOptions) -> Result<RunOutcome, RunError> {
    let now = chrono::Local::now();
    let created = now.to_rfc3339();
    let out_dir = jobs::timestamped_dir(&out_root(opts), &now.format("%Y%m%dT%H%M%S%.3f").to_string())?;
    let mut base = Thresholds::default();
    for (k, v) in &config.tolerances {
        base.set(k, *v);
    }
    let mut scene = Scene::build(config, &base.tol)?;
    let mut report = VerificationReport {
        created: created.clone(),
        seed: opts.seed,
        jobs: Vec::new(),
    };
    for (index, job) in config.jobs.iter().enumerate() {
        let th = jobs::thresholds_for(&config.tolerances, job);
        scene.tol = th.tol;
        let mut jr = JobReport::new(index, &job.verb, job.args.clone(), th);
        let ctx = JobContext {
            out_dir: &out_dir,
            seed: opts.seed,
            index,
        };
        match run_job(&mut scene, job, &th, &ctx, &mut jr) {
            Ok(()) => {}
            Err(JobError::Geom(e)) => jr.error = Some(e.to_string()),
            Err(JobError::Io(e)) => return Err(RunError::Io(e)),
        }
        jr.finish();
        report.jobs.push(jr);
    }
    let mut manifest = Manifest {
        created,
        seed: opts.seed,
        artifacts: report
            .jobs
            .iter()
            .flat_map(|j| {
                j.artifacts.iter().map(move |a| ManifestEntry {
                    path: a.clone(),
                    job: j.index,
                    verb: j.verb.clone(),
                })
            })
            .collect(),
    };
    write(&out_dir.join("report.json"), &report.to_json())?;
    write(&out_dir.join("report.txt"), &report.to_text())?;
    for name in ["report.json", "report.txt", "manifest.json"] {
        manifest.artifacts.push(ManifestEntry {
            path: name.into(),
            job: usize::MAX,
            verb: "run".into(),
        });
    }
    write(
        &out_dir.join("manifest.json"),
        &serde_json::to_string_pretty(&manifest).expect("manifest serializes"),
    )?;
    Ok(RunOutcome {
        report,
        out_dir,
        manifest,
    })
}

fn write(path: &Path, text: &str) -> std::io::Result<()> {
    fs::write(path, text)
}
