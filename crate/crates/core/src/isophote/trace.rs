use std::collections::HashMap;
use std::f64::consts::FRAC_PI_2;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{GeomError, Result};
use crate::surface::ParamSurface;
use crate::tolerance::Tolerances;
use crate::{Vec2, Vec3};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceOptions {
    /// Number of cells in u and v.
    pub grid: (usize, usize),
    /// Project every refined point onto the level set along the field gradient.
    pub newton_polish: bool,
}

impl Default for TraceOptions {
    fn default() -> Self {
        Self {
            grid: (128, 128),
            newton_polish: false,
        }
    }
}

impl TraceOptions {
    pub fn grid(nu: usize, nv: usize) -> Self {
        Self {
            grid: (nu, nv),
            ..Self::default()
        }
    }
}

/// One connected piece of a level set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Polyline {
    pub uv: Vec<Vec2>,
    pub xyz: Vec<Vec3>,
    pub closed: bool,
}

impl Polyline {
    /// Length of the lifted polyline (closing segment included when closed).
    pub fn length(&self) -> f64 {
        let mut l: f64 = self.xyz.windows(2).map(|w| (w[1] - w[0]).norm()).sum();
        if self.closed && self.xyz.len() > 1 {
            l += (self.xyz[0] - self.xyz[self.xyz.len() - 1]).norm();
        }
        l
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TraceDiagnostics {
    pub f_min: f64,
    pub f_max: f64,
    /// Cells skipped because a corner is a singular surface point.
    pub singular_cells: Vec<(usize, usize)>,
    pub saddle_cells: usize,
    /// No sign change anywhere on the grid.
    pub empty: bool,
}

/// Level set of `<N, d> - cos(theta)` on a surface.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IsophoteTrace {
    pub polylines: Vec<Polyline>,
    pub d: Vec3,
    pub theta: f64,
    /// `max |<N, d> - cos(theta)|` over all refined points.
    pub field_residual: f64,
    pub diagnostics: TraceDiagnostics,
}

impl IsophoteTrace {
    pub fn is_empty(&self) -> bool {
        self.polylines.is_empty()
    }

    pub fn point_count(&self) -> usize {
        self.polylines.iter().map(|p| p.uv.len()).sum()
    }
}

/// `f(u, v) = <N(u, v), d> - cos(theta)`; NaN at singular points.
pub fn illumination_field(surface: &ParamSurface, d: &Vec3, cos_theta: f64, uv: Vec2, tol: &Tolerances) -> f64 {
    match surface.unit_normal(uv.x, uv.y, tol) {
        Ok(n) => n.dot(d) - cos_theta,
        Err(_) => f64::NAN,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Edge {
    /// From node (i, j) to node (i + 1, j).
    H(usize, usize),
    /// From node (i, j) to node (i, j + 1).
    V(usize, usize),
}

struct Grid<'a> {
    surface: &'a ParamSurface,
    d: Vec3,
    cos_theta: f64,
    nu: usize,
    nv: usize,
    /// Node counts (a periodic direction does not repeat its last node).
    mu: usize,
    mv: usize,
    du: f64,
    dv: f64,
    u0: f64,
    v0: f64,
    values: Vec<f64>,
    tol: &'a Tolerances,
}

impl<'a> Grid<'a> {
    fn node_uv(&self, i: usize, j: usize) -> Vec2 {
        Vec2::new(self.u0 + i as f64 * self.du, self.v0 + j as f64 * self.dv)
    }

    fn value(&self, i: usize, j: usize) -> f64 {
        self.values[(i % self.mu) * self.mv + (j % self.mv)]
    }

    fn field(&self, uv: Vec2) -> f64 {
        illumination_field(self.surface, &self.d, self.cos_theta, uv, self.tol)
    }

    fn inside(x: f64) -> bool {
        x >= 0.0
    }

    fn endpoints(&self, e: Edge) -> ((Vec2, f64), (Vec2, f64)) {
        match e {
            Edge::H(i, j) => (
                (self.node_uv(i, j), self.value(i, j)),
                (self.node_uv(i + 1, j), self.value(i + 1, j)),
            ),
            Edge::V(i, j) => (
                (self.node_uv(i, j), self.value(i, j)),
                (self.node_uv(i, j + 1), self.value(i, j + 1)),
            ),
        }
    }

    fn crosses(&self, e: Edge) -> bool {
        let ((_, a), (_, b)) = self.endpoints(e);
        a.is_finite() && b.is_finite() && Self::inside(a) != Self::inside(b)
    }

    /// Bisection on the edge until `|f| <= trace_tol` (or the bracket collapses).
    fn refine(&self, e: Edge) -> (Vec2, f64) {
        let ((pa, fa), (pb, fb)) = self.endpoints(e);
        if fa.abs() <= self.tol.trace_tol {
            return (pa, fa);
        }
        if fb.abs() <= self.tol.trace_tol {
            return (pb, fb);
        }
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        let a_in = Self::inside(fa);
        let mut best = if fa.abs() < fb.abs() { (pa, fa) } else { (pb, fb) };
        for _ in 0..200 {
            let t = 0.5 * (lo + hi);
            let p = pa + (pb - pa) * t;
            let f = self.field(p);
            if !f.is_finite() {
                break;
            }
            if f.abs() < best.1.abs() {
                best = (p, f);
            }
            if f.abs() <= self.tol.trace_tol || hi - lo < 1e-16 {
                break;
            }
            if Self::inside(f) == a_in {
                lo = t;
            } else {
                hi = t;
            }
        }
        best
    }

    /// Segments of one cell as pairs of crossed edges.
    fn cell_segments(&self, i: usize, j: usize) -> CellResult {
        let corners = [
            self.value(i, j),
            self.value(i + 1, j),
            self.value(i + 1, j + 1),
            self.value(i, j + 1),
        ];
        if corners.iter().any(|x| !x.is_finite()) {
            return CellResult::Singular;
        }
        let bottom = Edge::H(i, j);
        let right = Edge::V(i + 1, j);
        let top = Edge::H(i, j + 1);
        let left = Edge::V(i, j);
        let crossed: Vec<Edge> = [bottom, right, top, left]
            .into_iter()
            .filter(|e| self.crosses(*e))
            .collect();
        match crossed.len() {
            0 => CellResult::Segments(Vec::new(), false),
            2 => CellResult::Segments(vec![(crossed[0], crossed[1])], false),
            4 => {
                let centre = self.node_uv(i, j) + Vec2::new(0.5 * self.du, 0.5 * self.dv);
                let fc = self.field(centre);
                let a_in = Self::inside(corners[0]);
                // centre agreeing with corners a and c joins them, cutting off b and d
                let segs = if Self::inside(fc) == a_in {
                    vec![(bottom, right), (top, left)]
                } else {
                    vec![(left, bottom), (right, top)]
                };
                CellResult::Segments(segs, true)
            }
            _ => CellResult::Segments(Vec::new(), false),
        }
    }

    fn canonical(&self, e: Edge) -> Edge {
        match e {
            Edge::H(i, j) => Edge::H(i % self.mu, j % self.mv),
            Edge::V(i, j) => Edge::V(i % self.mu, j % self.mv),
        }
    }
}

enum CellResult {
    Singular,
    Segments(Vec<(Edge, Edge)>, bool),
}

/// Marching squares on `<N, d> - cos(theta)`: edge crossings refined by bisection, saddles
/// split by the cell-centre value, crossings linked into polylines across periodic seams.
pub fn trace_isophote(
    surface: &ParamSurface,
    d: Vec3,
    theta: f64,
    opts: &TraceOptions,
    tol: &Tolerances,
) -> Result<IsophoteTrace> {
    let (nu, nv) = opts.grid;
    if nu < 8 || nv < 8 {
        return Err(GeomError::InvalidInput(format!("grid {nu}x{nv} is smaller than 8x8")));
    }
    if !(0.0..=FRAC_PI_2 + 1e-12).contains(&theta) {
        return Err(GeomError::DomainViolation(format!("theta = {theta} outside [0, pi/2]")));
    }
    let dn = d.norm();
    if !(dn > tol.eps_deg) {
        return Err(GeomError::InvalidInput("axis must be nonzero".into()));
    }
    let d = d / dn;
    let dom = surface.domain();
    let [pu, pv] = surface.periodic();
    let mu = if pu { nu } else { nu + 1 };
    let mv = if pv { nv } else { nv + 1 };
    let mut grid = Grid {
        surface,
        d,
        cos_theta: theta.cos(),
        nu,
        nv,
        mu,
        mv,
        du: dom.width() / nu as f64,
        dv: dom.height() / nv as f64,
        u0: dom.u.0,
        v0: dom.v.0,
        values: Vec::new(),
        tol,
    };
    grid.values = (0..mu * mv)
        .into_par_iter()
        .map(|k| grid.field(grid.node_uv(k / mv, k % mv)))
        .collect();

    let finite: Vec<f64> = grid.values.iter().copied().filter(|x| x.is_finite()).collect();
    let mut diag = TraceDiagnostics {
        f_min: finite.iter().copied().fold(f64::INFINITY, f64::min),
        f_max: finite.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        ..TraceDiagnostics::default()
    };

    let cells: Vec<(usize, usize, CellResult)> = (0..grid.nu * grid.nv)
        .into_par_iter()
        .map(|k| {
            let (i, j) = (k / grid.nv, k % grid.nv);
            (i, j, grid.cell_segments(i, j))
        })
        .collect();

    let mut segments: Vec<(Edge, Edge)> = Vec::new();
    for (i, j, c) in cells {
        match c {
            CellResult::Singular => diag.singular_cells.push((i, j)),
            CellResult::Segments(s, saddle) => {
                if saddle {
                    diag.saddle_cells += 1;
                }
                segments.extend(s.into_iter().map(|(a, b)| (grid.canonical(a), grid.canonical(b))));
            }
        }
    }

    let mut edges: Vec<Edge> = segments.iter().flat_map(|(a, b)| [*a, *b]).collect();
    edges.sort_by_key(|e| match e {
        Edge::H(i, j) => (0, *i, *j),
        Edge::V(i, j) => (1, *i, *j),
    });
    edges.dedup();
    let refined: HashMap<Edge, (Vec2, f64)> = edges.par_iter().map(|e| (*e, grid.refine(*e))).collect();

    let chains = link_segments(&segments);
    let mut field_residual = 0.0f64;
    let mut polylines = Vec::with_capacity(chains.len());
    for (chain, closed) in chains {
        let mut uv = Vec::with_capacity(chain.len());
        for e in chain {
            let (mut p, mut f) = refined[&e];
            if opts.newton_polish {
                (p, f) = polish(&grid, p, f);
            }
            field_residual = field_residual.max(f.abs());
            uv.push(surface.wrap(p));
        }
        let xyz = uv.iter().map(|p| surface.point_uv(*p)).collect();
        polylines.push(Polyline { uv, xyz, closed });
    }
    diag.empty = polylines.is_empty();
    Ok(IsophoteTrace {
        polylines,
        d,
        theta,
        field_residual,
        diagnostics: diag,
    })
}

/// Silhouette: the level set at `theta = pi/2`.
pub fn silhouette(surface: &ParamSurface, d: Vec3, opts: &TraceOptions, tol: &Tolerances) -> Result<IsophoteTrace> {
    trace_isophote(surface, d, FRAC_PI_2, opts, tol)
}

/// Newton steps along the field gradient (normal to the level curve in the parameter plane).
fn polish(grid: &Grid<'_>, mut p: Vec2, mut f: f64) -> (Vec2, f64) {
    for _ in 0..3 {
        let Ok(j) = grid.surface.normal_jet(p.x, p.y, grid.tol) else {
            break;
        };
        let g = Vec2::new(j.normal_u.dot(&grid.d), j.normal_v.dot(&grid.d));
        let g2 = g.norm_squared();
        if g2 < grid.tol.eps_deg {
            break;
        }
        let q = p - g * (f / g2);
        let fq = grid.field(q);
        if !(fq.abs() < f.abs()) {
            break;
        }
        p = q;
        f = fq;
    }
    (p, f)
}

/// Chains segments sharing an edge into open or closed sequences of edges.
fn link_segments(segments: &[(Edge, Edge)]) -> Vec<(Vec<Edge>, bool)> {
    let mut adj: HashMap<Edge, Vec<usize>> = HashMap::new();
    for (k, (a, b)) in segments.iter().enumerate() {
        adj.entry(*a).or_default().push(k);
        adj.entry(*b).or_default().push(k);
    }
    let mut used = vec![false; segments.len()];
    let mut out = Vec::new();
    let other = |k: usize, e: Edge| {
        let (a, b) = segments[k];
        if a == e {
            b
        } else {
            a
        }
    };
    let walk = |start_seg: usize, from: Edge, used: &mut Vec<bool>| -> Vec<Edge> {
        let mut chain = vec![from];
        let mut seg = start_seg;
        let mut at = from;
        loop {
            used[seg] = true;
            let next = other(seg, at);
            chain.push(next);
            at = next;
            match adj[&at].iter().find(|&&k| !used[k]) {
                Some(&k) => seg = k,
                None => break,
            }
        }
        chain
    };
    // open chains first: start at edges with a single segment
    let mut starts: Vec<&Edge> = adj.iter().filter(|(_, v)| v.len() == 1).map(|(e, _)| e).collect();
    starts.sort_by_key(|e| match e {
        Edge::H(i, j) => (0, *i, *j),
        Edge::V(i, j) => (1, *i, *j),
    });
    for e in starts {
        let k = adj[e][0];
        if !used[k] {
            out.push((walk(k, *e, &mut used), false));
        }
    }
    for k in 0..segments.len() {
        if !used[k] {
            let mut chain = walk(k, segments[k].0, &mut used);
            let closed = chain.len() > 2 && chain.first() == chain.last();
            if closed {
                chain.pop();
            }
            out.push((chain, closed));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use std::f64::consts::PI;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn sphere_latitude_is_one_closed_loop() {
        let t = trace_isophote(
            &catalog::sphere(1.0),
            Vec3::z(),
            PI / 3.0,
            &TraceOptions::grid(64, 64),
            &tol(),
        )
        .unwrap();
        assert_eq!(t.polylines.len(), 1);
        assert!(t.polylines[0].closed);
        assert!(t.field_residual <= 1e-9);
        for p in &t.polylines[0].uv {
            assert!((p.y - PI / 6.0).abs() < 1e-8);
        }
        // pole rows are singular and reported
        assert!(!t.diagnostics.singular_cells.is_empty());
    }

    #[test]
    fn cylinder_rulings() {
        let t = trace_isophote(
            &catalog::cylinder(1.0, (-1.0, 1.0)),
            Vec3::x(),
            PI / 3.0,
            &TraceOptions::grid(64, 16),
            &tol(),
        )
        .unwrap();
        assert_eq!(t.polylines.len(), 2);
        let mut us: Vec<f64> = t.polylines.iter().map(|p| p.uv[0].x).collect();
        us.sort_by(f64::total_cmp);
        assert!((us[0] + PI / 3.0).abs() < 1e-8 && (us[1] - PI / 3.0).abs() < 1e-8);
        for p in &t.polylines {
            assert!(!p.closed);
            assert!(p.uv.iter().all(|q| (q.x - p.uv[0].x).abs() < 1e-8));
        }
    }

    #[test]
    fn cylinder_axis_gives_empty_trace() {
        let t = trace_isophote(
            &catalog::cylinder(1.0, (-1.0, 1.0)),
            Vec3::z(),
            PI / 4.0,
            &TraceOptions::grid(16, 16),
            &tol(),
        )
        .unwrap();
        assert!(t.is_empty() && t.diagnostics.empty);
        assert!(t.diagnostics.f_max < 0.0);
    }

    #[test]
    fn torus_silhouette_has_two_circles() {
        let t = silhouette(
            &catalog::torus(2.0, 0.5),
            Vec3::z(),
            &TraceOptions::grid(64, 64),
            &tol(),
        )
        .unwrap();
        assert_eq!(t.polylines.len(), 2);
        for p in &t.polylines {
            assert!(p.closed);
            let v = p.uv[0].y;
            assert!(v.sin().abs() < 1e-9);
        }
    }

    #[test]
    fn saddle_cells_are_resolved() {
        // a graph saddle z = (x^2 - y^2)/2 traced near theta = 0 crosses saddle-like cells
        let t = trace_isophote(
            &catalog::graph(1.0, -1.0, 1.0),
            Vec3::new(1.0, 1.0, 3.0),
            0.2,
            &TraceOptions::grid(32, 32),
            &tol(),
        )
        .unwrap();
        assert!(t.field_residual <= 1e-9);
    }

    #[test]
    fn polish_keeps_points_on_the_level_set() {
        let mut o = TraceOptions::grid(32, 32);
        o.newton_polish = true;
        let t = trace_isophote(&catalog::torus(2.0, 0.5), Vec3::new(0.3, 0.0, 1.0), 1.0, &o, &tol()).unwrap();
        assert!(!t.is_empty());
        assert!(t.field_residual <= 1e-9);
    }
}
