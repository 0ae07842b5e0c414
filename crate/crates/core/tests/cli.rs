use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use isophote::catalog;
use isophote::io::{
    export_mesh, parse_scene, read_curve_csv, read_obj, run_scene, serialize_scene, write_curve_csv, write_obj,
    CurveRow, Manifest, RunOptions, VerificationReport,
};
use isophote::{Tolerances, Vec2, Vec3};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_isophote"))
}

fn scene(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/scenes").join(name)
}

fn run(args: &[&str], out: &Path) -> Output {
    bin()
        .args(args)
        .arg("--out")
        .arg(out)
        .env_remove("ISOPHOTE_OUT")
        .output()
        .expect("binary runs")
}

fn only_subdir(root: &Path) -> PathBuf {
    let dirs: Vec<PathBuf> = std::fs::read_dir(root).unwrap().map(|e| e.unwrap().path()).collect();
    assert_eq!(dirs.len(), 1, "{dirs:?}");
    dirs[0].clone()
}

#[test]
fn example_scene_passes_and_lists_its_artifacts() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run(&["run", scene("example1.toml").to_str().unwrap()], tmp.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let dir = only_subdir(tmp.path());
    let manifest: Manifest =
        serde_json::from_str(&std::fs::read_to_string(dir.join("manifest.json")).unwrap()).unwrap();
    assert!(!manifest.artifacts.is_empty());
    for a in &manifest.artifacts {
        assert!(dir.join(&a.path).is_file(), "missing {}", a.path);
    }
    let report: VerificationReport =
        serde_json::from_str(&std::fs::read_to_string(dir.join("report.json")).unwrap()).unwrap();
    assert!(report.passed());
    for c in report.jobs.iter().flat_map(|j| &j.checks) {
        assert!(!c.tolerance.is_empty() && c.limit.is_finite());
    }
}

#[test]
fn exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let p = tmp.path();
    // a closed form that is not a root of its own relation
    assert_eq!(
        run(&["radius-law", "prop1", "theta=60deg", "v=90deg"], p).status.code(),
        Some(1)
    );
    assert_eq!(run(&["trace", "sphere", "d=0,0"], p).status.code(), Some(2));
    assert_eq!(
        run(&["trace", "sphere", "d=0,0,1", "theta=120deg"], p).status.code(),
        Some(3)
    );
    assert_eq!(run(&["run", "/nonexistent/scene.toml"], p).status.code(), Some(4));
    let bad = p.join("bad.toml");
    std::fs::write(&bad, "[[surface]]\nid = \"s\"\nkind = \"sphere\"\nradius = -1\n").unwrap();
    let out = run(&["check", bad.to_str().unwrap()], p);
    assert_eq!(out.status.code(), Some(2));
    assert!(
        String::from_utf8_lossy(&out.stderr).contains("4:"),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn check_prints_the_canonical_form() {
    let tmp = tempfile::tempdir().unwrap();
    let path = scene("tracing.toml");
    let out = run(&["check", path.to_str().unwrap()], tmp.path());
    assert_eq!(out.status.code(), Some(0));
    let printed = String::from_utf8(out.stdout).unwrap();
    let original = parse_scene(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(parse_scene(&printed).unwrap(), original);
    assert_eq!(serialize_scene(&original), printed);
}

#[test]
fn output_root_comes_from_the_environment() {
    let tmp = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["-q", "radius-law", "cor3b", "beta=30deg", "v=20deg"])
        .env("ISOPHOTE_OUT", tmp.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(only_subdir(tmp.path()).join("report.json").is_file());
}

#[test]
fn run_scene_is_reproducible_for_a_seed() {
    let config = parse_scene(&std::fs::read_to_string(scene("example1.toml")).unwrap()).unwrap();
    let tmp = tempfile::tempdir().unwrap();
    let opts = RunOptions {
        out_root: Some(tmp.path().to_path_buf()),
        seed: 7,
    };
    let a = run_scene(&config, &opts).unwrap();
    let b = run_scene(&config, &opts).unwrap();
    assert_ne!(a.out_dir, b.out_dir);
    assert_eq!(a.exit_code(), 0);
    for (x, y) in a.report.jobs.iter().zip(&b.report.jobs) {
        assert_eq!(x.checks, y.checks);
    }
}

#[test]
fn csv_and_obj_round_trip() {
    let tmp = tempfile::tempdir().unwrap();
    let rows: Vec<CurveRow> = (0..50)
        .map(|k| {
            let s = k as f64 * 0.1234567890123;
            CurveRow {
                s,
                uv: Vec2::new(s.sin(), 1.0 / (1.0 + s)),
                point: Vec3::new(s.cos() * 1e3, -s.exp(), 1e-7 * s),
            }
        })
        .collect();
    let csv = tmp.path().join("c.csv");
    write_curve_csv(&csv, &rows).unwrap();
    let back = read_curve_csv(&csv).unwrap();
    assert_eq!(back.len(), rows.len());
    for (a, b) in rows.iter().zip(&back) {
        assert!((a.s - b.s).abs() <= 1e-12 * a.s.abs().max(1.0));
        assert!((a.uv - b.uv).norm() <= 1e-12);
        assert!((a.point - b.point).norm() <= 1e-12 * a.point.norm().max(1.0));
    }
    let mesh = export_mesh(&catalog::torus(2.0, 0.5), (24, 12), &Tolerances::default()).unwrap();
    let obj = tmp.path().join("t.obj");
    write_obj(&obj, &mesh, "torus").unwrap();
    let (v, vn, f) = read_obj(&obj).unwrap();
    assert_eq!(
        (v.len(), vn.len(), f.len()),
        (mesh.vertices.len(), mesh.normals.len(), mesh.faces.len())
    );
    for (a, b) in mesh.vertices.iter().zip(&v) {
        assert!((a - b).norm() <= 1e-12);
    }
    for (a, b) in mesh.normals.iter().zip(&vn) {
        assert!((a - b).norm() <= 1e-12);
    }
    assert_eq!(mesh.faces, f);
}
