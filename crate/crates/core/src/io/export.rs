//! CSV curve samples, OBJ surface meshes and SVG parameter-domain plots.

use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{GeomError, Result};
use crate::isophote::{illumination_field, Polyline};
use crate::surface::{DarbouxSample, ParamSurface};
use crate::tolerance::Tolerances;
use crate::{Vec2, Vec3};

pub const CSV_HEADER: &str = "s,u,v,x,y,z";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveRow {
    pub s: f64,
    pub uv: Vec2,
    pub point: Vec3,
}

pub fn rows_from_samples(samples: &[DarbouxSample]) -> Vec<CurveRow> {
    samples
        .iter()
        .map(|x| CurveRow {
            s: x.s,
            uv: x.uv,
            point: x.point,
        })
        .collect()
}

/// Rows of a traced polyline with `s` the cumulative chord length.
pub fn rows_from_polyline(poly: &Polyline) -> Vec<CurveRow> {
    let mut s = 0.0;
    let mut out = Vec::with_capacity(poly.xyz.len());
    for (i, (uv, p)) in poly.uv.iter().zip(&poly.xyz).enumerate() {
        if i > 0 {
            s += (p - poly.xyz[i - 1]).norm();
        }
        out.push(CurveRow { s, uv: *uv, point: *p });
    }
    out
}

/// One row per sample, 17 significant digits.
pub fn write_curve_csv(path: &Path, rows: &[CurveRow]) -> io::Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "{CSV_HEADER}")?;
    for r in rows {
        writeln!(
            w,
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
            r.s, r.uv.x, r.uv.y, r.point.x, r.point.y, r.point.z
        )?;
    }
    w.flush()
}

pub fn read_curve_csv(path: &Path) -> io::Result<Vec<CurveRow>> {
    let bad = |m: String| io::Error::new(io::ErrorKind::InvalidData, m);
    let mut lines = BufReader::new(File::open(path)?).lines();
    match lines.next() {
        Some(Ok(h)) if h.trim() == CSV_HEADER => {}
        _ => return Err(bad("missing CSV header".into())),
    }
    let mut out = Vec::new();
    for (i, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let f: std::result::Result<Vec<f64>, _> = line.split(',').map(|x| x.trim().parse::<f64>()).collect();
        let f = f.map_err(|e| bad(format!("row {}: {e}", i + 2)))?;
        if f.len() != 6 {
            return Err(bad(format!("row {}: expected 6 fields", i + 2)));
        }
        out.push(CurveRow {
            s: f[0],
            uv: Vec2::new(f[1], f[2]),
            point: Vec3::new(f[3], f[4], f[5]),
        });
    }
    Ok(out)
}

/// Triangulated surface grid. Vertices are row-major in `(u, v)`: index `i * nv_nodes + j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mesh {
    pub resolution: (usize, usize),
    pub nodes: (usize, usize),
    pub params: Vec<Vec2>,
    pub vertices: Vec<Vec3>,
    pub normals: Vec<Vec3>,
    pub faces: Vec<[usize; 3]>,
    /// Faces of (near) zero area or touching a singular vertex; they are still emitted.
    pub degenerate_faces: Vec<usize>,
    /// Vertices where the surface normal is undefined; their normal is borrowed from a
    /// neighbouring parameter.
    pub singular_vertices: Vec<usize>,
    pub periodic: [bool; 2],
}

/// Samples the surface on a `res.0 x res.1` cell grid. Periodic directions share the seam
/// vertices, so the mesh is watertight there. Faces wind counter-clockwise about the normal.
pub fn export_mesh(surface: &ParamSurface, res: (usize, usize), tol: &Tolerances) -> Result<Mesh> {
    if res.0 < 4 || res.1 < 4 {
        return Err(GeomError::InvalidInput(format!(
            "mesh resolution {}x{} below 4x4",
            res.0, res.1
        )));
    }
    let dom = surface.domain();
    let periodic = surface.periodic();
    let cu = if periodic[0] { res.0 } else { res.0 + 1 };
    let cv = if periodic[1] { res.1 } else { res.1 + 1 };
    let du = dom.width() / res.0 as f64;
    let dv = dom.height() / res.1 as f64;
    let mut params = Vec::with_capacity(cu * cv);
    let mut vertices = Vec::with_capacity(cu * cv);
    let mut normals = Vec::with_capacity(cu * cv);
    let mut singular = Vec::new();
    for i in 0..cu {
        for j in 0..cv {
            let uv = Vec2::new(dom.u.0 + i as f64 * du, dom.v.0 + j as f64 * dv);
            params.push(uv);
            vertices.push(surface.point_uv(uv));
            let n = match surface.unit_normal(uv.x, uv.y, tol) {
                Ok(n) => n,
                Err(_) => {
                    singular.push(params.len() - 1);
                    let c = Vec2::new(dom.u.0 + 0.5 * dom.width(), dom.v.0 + 0.5 * dom.height());
                    let nudged = uv + (c - uv) * 1e-6;
                    surface
                        .unit_normal(nudged.x, nudged.y, tol)
                        .unwrap_or_else(|_| Vec3::z())
                }
            };
            normals.push(n);
        }
    }
    let idx = |i: usize, j: usize| (i % cu) * cv + (j % cv);
    let scale = vertices.iter().map(|p| p.norm()).fold(1.0, f64::max);
    let mut faces = Vec::with_capacity(2 * res.0 * res.1);
    let mut degenerate = Vec::new();
    for i in 0..res.0 {
        for j in 0..res.1 {
            let (a, b, c, d) = (idx(i, j), idx(i + 1, j), idx(i + 1, j + 1), idx(i, j + 1));
            let tris = if surface.normal_flipped() {
                [[a, c, b], [a, d, c]]
            } else {
                [[a, b, c], [a, c, d]]
            };
            for t in tris {
                let area = (vertices[t[1]] - vertices[t[0]])
                    .cross(&(vertices[t[2]] - vertices[t[0]]))
                    .norm();
                if area <= tol.eps_deg * scale * scale || t.iter().any(|v| singular.contains(v)) {
                    degenerate.push(faces.len());
                }
                faces.push(t);
            }
        }
    }
    Ok(Mesh {
        resolution: res,
        nodes: (cu, cv),
        params,
        vertices,
        normals,
        faces,
        degenerate_faces: degenerate,
        singular_vertices: singular,
        periodic,
    })
}

pub fn write_obj(path: &Path, mesh: &Mesh, name: &str) -> io::Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "# {name} {}x{}", mesh.resolution.0, mesh.resolution.1)?;
    writeln!(w, "o {name}")?;
    for p in &mesh.vertices {
        writeln!(w, "v {:.16e} {:.16e} {:.16e}", p.x, p.y, p.z)?;
    }
    for n in &mesh.normals {
        writeln!(w, "vn {:.16e} {:.16e} {:.16e}", n.x, n.y, n.z)?;
    }
    for f in &mesh.faces {
        let [a, b, c] = f.map(|i| i + 1);
        writeln!(w, "f {a}//{a} {b}//{b} {c}//{c}")?;
    }
    w.flush()
}

/// Vertices, normals and zero-based faces.
pub type ObjData = (Vec<Vec3>, Vec<Vec3>, Vec<[usize; 3]>);

/// Reads an OBJ file written by [`write_obj`].
pub fn read_obj(path: &Path) -> io::Result<ObjData> {
    let bad = |m: String| io::Error::new(io::ErrorKind::InvalidData, m);
    let (mut v, mut vn, mut f) = (Vec::new(), Vec::new(), Vec::new());
    for line in BufReader::new(File::open(path)?).lines() {
        let line = line?;
        let mut it = line.split_whitespace();
        let tag = it.next();
        let rest: Vec<&str> = it.collect();
        let vec3 = |r: &[&str]| -> io::Result<Vec3> {
            let x: std::result::Result<Vec<f64>, _> = r.iter().map(|s| s.parse::<f64>()).collect();
            match x {
                Ok(x) if x.len() == 3 => Ok(Vec3::new(x[0], x[1], x[2])),
                _ => Err(bad(format!("bad record: {line}"))),
            }
        };
        match tag {
            Some("v") => v.push(vec3(&rest)?),
            Some("vn") => vn.push(vec3(&rest)?),
            Some("f") => {
                let ids: Option<Vec<usize>> = rest
                    .iter()
                    .map(|s| s.split('/').next()?.parse::<usize>().ok().map(|i| i - 1))
                    .collect();
                match ids {
                    Some(ids) if ids.len() == 3 => f.push([ids[0], ids[1], ids[2]]),
                    _ => return Err(bad(format!("bad face: {line}"))),
                }
            }
            _ => {}
        }
    }
    Ok((v, vn, f))
}

const SVG_SIZE: f64 = 640.0;
const HEAT_CELLS: usize = 96;

fn heat_colour(x: f64) -> String {
    // x in [-1, 1]: blue through white to red
    let t = x.clamp(-1.0, 1.0);
    let (r, g, b) = if t < 0.0 {
        (1.0 + t, 1.0 + t, 1.0)
    } else {
        (1.0, 1.0 - t, 1.0 - t)
    };
    format!(
        "#{:02x}{:02x}{:02x}",
        (r * 255.0).round() as u8,
        (g * 255.0).round() as u8,
        (b * 255.0).round() as u8
    )
}

/// Heat map of `<N, d> - cos(theta)` over the parameter domain, dashed level lines of the
/// field at a few offsets, and the traced polylines on top.
pub fn write_domain_svg(
    path: &Path,
    surface: &ParamSurface,
    d: &Vec3,
    theta: f64,
    polylines: &[Polyline],
    title: &str,
    tol: &Tolerances,
) -> io::Result<()> {
    let dom = surface.domain();
    let (w, h) = (dom.width(), dom.height());
    let to_px = |uv: &Vec2| {
        (
            (uv.x - dom.u.0) / w * SVG_SIZE,
            SVG_SIZE - (uv.y - dom.v.0) / h * SVG_SIZE,
        )
    };
    let n = HEAT_CELLS;
    let ct = theta.cos();
    let mut field = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            let uv = Vec2::new(
                dom.u.0 + (i as f64 + 0.5) * w / n as f64,
                dom.v.0 + (j as f64 + 0.5) * h / n as f64,
            );
            field[i * n + j] = illumination_field(surface, d, ct, uv, tol);
        }
    }
    let amp = field
        .iter()
        .filter(|x| x.is_finite())
        .map(|x| x.abs())
        .fold(1e-12, f64::max);
    let mut out = BufWriter::new(File::create(path)?);
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{s}" height="{t}" viewBox="0 0 {s} {t}">"#,
        s = SVG_SIZE,
        t = SVG_SIZE + 24.0
    )?;
    writeln!(out, "<title>{}</title>", xml_escape(title))?;
    let cell = SVG_SIZE / n as f64;
    for i in 0..n {
        for j in 0..n {
            let f = field[i * n + j];
            let fill = if f.is_finite() {
                heat_colour(f / amp)
            } else {
                "#888888".into()
            };
            writeln!(
                out,
                r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="{fill}"/>"#,
                i as f64 * cell,
                SVG_SIZE - (j + 1) as f64 * cell,
                cell + 0.05,
                cell + 0.05
            )?;
        }
    }
    // level lines of the heat field at +-amp/3 and +-2amp/3, cell by cell
    for level in [-2.0 / 3.0, -1.0 / 3.0, 1.0 / 3.0, 2.0 / 3.0].map(|x| x * amp) {
        for i in 0..n - 1 {
            for j in 0..n - 1 {
                let c = [
                    field[i * n + j],
                    field[(i + 1) * n + j],
                    field[(i + 1) * n + j + 1],
                    field[i * n + j + 1],
                ];
                let corners = [(i, j), (i + 1, j), (i + 1, j + 1), (i, j + 1)];
                let mut pts = Vec::new();
                for k in 0..4 {
                    let (a, b) = (c[k] - level, c[(k + 1) % 4] - level);
                    if a.is_finite() && b.is_finite() && (a < 0.0) != (b < 0.0) {
                        let t = a / (a - b);
                        let (p, q) = (corners[k], corners[(k + 1) % 4]);
                        let x = (p.0 as f64 + t * (q.0 as f64 - p.0 as f64) + 0.5) * cell;
                        let y = SVG_SIZE - (p.1 as f64 + t * (q.1 as f64 - p.1 as f64) + 0.5) * cell;
                        pts.push((x, y));
                    }
                }
                if pts.len() >= 2 {
                    writeln!(
                        out,
                        r##"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="#555" stroke-width="0.6" stroke-dasharray="2,2"/>"##,
                        pts[0].0, pts[0].1, pts[1].0, pts[1].1
                    )?;
                }
            }
        }
    }
    let periodic = surface.periodic();
    for poly in polylines {
        // split where the polyline wraps across a periodic seam
        let mut runs: Vec<Vec<(f64, f64)>> = vec![Vec::new()];
        let mut uvs = poly.uv.clone();
        if poly.closed {
            if let Some(first) = uvs.first().copied() {
                uvs.push(first);
            }
        }
        for (k, uv) in uvs.iter().enumerate() {
            if k > 0 {
                let prev = uvs[k - 1];
                let jump = (periodic[0] && (uv.x - prev.x).abs() > 0.5 * w)
                    || (periodic[1] && (uv.y - prev.y).abs() > 0.5 * h);
                if jump {
                    runs.push(Vec::new());
                }
            }
            runs.last_mut().expect("nonempty").push(to_px(uv));
        }
        for run in runs.iter().filter(|r| r.len() >= 2) {
            let pts: Vec<String> = run.iter().map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
            writeln!(
                out,
                r#"<polyline points="{}" fill="none" stroke="black" stroke-width="1.5"/>"#,
                pts.join(" ")
            )?;
        }
    }
    writeln!(
        out,
        r#"<text x="4" y="{:.0}" font-family="monospace" font-size="12">{} u:[{:.3},{:.3}] v:[{:.3},{:.3}]</text>"#,
        SVG_SIZE + 16.0,
        xml_escape(title),
        dom.u.0,
        dom.u.1,
        dom.v.0,
        dom.v.1
    )?;
    writeln!(out, "</svg>")?;
    out.flush()
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    #[test]
    fn sphere_mesh_counts_and_seam() {
        let t = Tolerances::default();
        let m = export_mesh(&catalog::sphere(1.0), (32, 32), &t).unwrap();
        assert_eq!(m.faces.len(), 2 * 1024);
        assert_eq!(m.nodes, (32, 33));
        // every edge of the u-seam is shared: faces reference column 0 from both sides
        let last_col = m
            .faces
            .iter()
            .filter(|f| f.iter().any(|&v| v / 33 == 31) && f.iter().any(|&v| v / 33 == 0));
        assert_eq!(last_col.count(), 64);
        // the poles make degenerate faces, listed rather than dropped
        assert!(!m.degenerate_faces.is_empty());
        for f in &m.faces {
            let [a, b, c] = f.map(|i| m.vertices[i]);
            let n = (b - a).cross(&(c - a));
            if n.norm() > 1e-12 {
                assert!(n.dot(&m.normals[f[0]]) > 0.0);
            }
        }
    }

    #[test]
    fn tiny_resolution_is_rejected() {
        assert!(export_mesh(&catalog::torus(2.0, 0.5), (3, 8), &Tolerances::default()).is_err());
    }

    #[test]
    fn files_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let t = Tolerances::default();
        let m = export_mesh(&catalog::torus(2.0, 0.5), (8, 6), &t).unwrap();
        let p = dir.path().join("t.obj");
        write_obj(&p, &m, "torus").unwrap();
        let (v, vn, f) = read_obj(&p).unwrap();
        assert_eq!(v, m.vertices);
        assert_eq!(vn, m.normals);
        assert_eq!(f, m.faces);
        let rows = vec![CurveRow {
            s: 0.1,
            uv: Vec2::new(1.0 / 3.0, -2.0),
            point: Vec3::new(std::f64::consts::PI, 1e-300, -7.5),
        }];
        let c = dir.path().join("c.csv");
        write_curve_csv(&c, &rows).unwrap();
        assert_eq!(read_curve_csv(&c).unwrap(), rows);
    }
}
