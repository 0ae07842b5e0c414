use crate::error::{GeomError, Result};
use crate::numeric::diff1;
use crate::surface::{CurveOnSurface, ParamSurface, UvPath};
use crate::tolerance::Tolerances;
use crate::{Vec2, Vec3};

use super::trace::Polyline;

/// Unit-speed parametrization of a level curve of `<N, d> - cos(theta)`, obtained by
/// integrating the normalized Hamiltonian field `X = w / |S_u w_u + S_v w_v|`,
/// `w = o (-f_v, f_u)`, from a traced point. Positions come from a fixed-step RK4 table
/// followed by a Newton projection onto the level set; `uv'` is `X` itself and `uv''` is
/// `DX X` by differences.
#[derive(Clone)]
pub struct IsophoteFlowPath {
    surface: ParamSurface,
    d: Vec3,
    cos_theta: f64,
    orientation: f64,
    step: f64,
    table: Vec<Vec2>,
    length: f64,
    closed: bool,
    tol: Tolerances,
}

impl std::fmt::Debug for IsophoteFlowPath {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("IsophoteFlowPath")
            .field("surface", &self.surface.name())
            .field("length", &self.length)
            .field("closed", &self.closed)
            .finish_non_exhaustive()
    }
}

const SUBSTEPS: usize = 2;

impl IsophoteFlowPath {
    /// Follows the level curve through the first point of `poly`, oriented along the polyline.
    /// Closed polylines are followed once around; open ones for the polyline's length or
    /// until the curve leaves a non-periodic side of the domain.
    pub fn from_polyline(
        surface: &ParamSurface,
        d: Vec3,
        theta: f64,
        poly: &Polyline,
        tol: &Tolerances,
    ) -> Result<Self> {
        if poly.uv.len() < 2 {
            return Err(GeomError::TooFewSamples {
                required: 2,
                got: poly.uv.len(),
            });
        }
        let estimate = poly.length();
        let mut path = Self {
            surface: surface.clone(),
            d: d.normalize(),
            cos_theta: theta.cos(),
            orientation: 1.0,
            step: (estimate / 4000.0).clamp(1e-4, 5e-3),
            table: Vec::new(),
            length: estimate,
            closed: poly.closed,
            tol: *tol,
        };
        let start = path.project(poly.uv[0])?;
        let x0 = path.velocity(start)?;
        let mut ahead = poly.uv[1] - poly.uv[0];
        // undo a seam jump between the first two points
        let dom = surface.domain();
        let [pu, pv] = surface.periodic();
        if pu {
            ahead.x -= dom.width() * (ahead.x / dom.width()).round();
        }
        if pv {
            ahead.y -= dom.height() * (ahead.y / dom.height()).round();
        }
        if x0.dot(&ahead) < 0.0 {
            path.orientation = -1.0;
        }
        path.table.push(start);
        path.build(start, estimate)?;
        Ok(path)
    }

    /// Same, starting at an explicit parameter point with a chosen orientation and length.
    pub fn from_point(
        surface: &ParamSurface,
        d: Vec3,
        theta: f64,
        start: Vec2,
        orientation: f64,
        length: f64,
        tol: &Tolerances,
    ) -> Result<Self> {
        let mut path = Self {
            surface: surface.clone(),
            d: d.normalize(),
            cos_theta: theta.cos(),
            orientation: orientation.signum(),
            step: (length / 4000.0).clamp(1e-4, 5e-3),
            table: Vec::new(),
            length,
            closed: false,
            tol: *tol,
        };
        let start = path.project(start)?;
        path.table.push(start);
        path.build(start, length)?;
        Ok(path)
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    /// The unit-speed curve on the surface.
    pub fn into_curve(self) -> CurveOnSurface {
        let surface = self.surface.clone();
        CurveOnSurface::new(surface, self).with_unit_speed(true)
    }

    fn field(&self, uv: Vec2) -> Result<(f64, Vec2, Vec3, Vec3)> {
        let j = self.surface.normal_jet(uv.x, uv.y, &self.tol)?;
        let f = j.normal.dot(&self.d) - self.cos_theta;
        let g = Vec2::new(j.normal_u.dot(&self.d), j.normal_v.dot(&self.d));
        Ok((f, g, j.su, j.sv))
    }

    fn velocity(&self, uv: Vec2) -> Result<Vec2> {
        let (_, g, su, sv) = self.field(uv)?;
        let w = Vec2::new(-g.y, g.x) * self.orientation;
        let speed = (su * w.x + sv * w.y).norm();
        if !(speed > self.tol.eps_deg) {
            return Err(GeomError::DegenerateNormalData {
                s: f64::NAN,
                value: speed,
            });
        }
        Ok(w / speed)
    }

    fn project(&self, mut uv: Vec2) -> Result<Vec2> {
        for _ in 0..8 {
            let (f, g, _, _) = self.field(uv)?;
            if f.abs() <= 1e-15 {
                break;
            }
            let g2 = g.norm_squared();
            if !(g2 > self.tol.eps_deg * self.tol.eps_deg) {
                return Err(GeomError::DegenerateNormalData { s: f64::NAN, value: g2 });
            }
            uv -= g * (f / g2);
        }
        Ok(uv)
    }

    fn rk4(&self, uv: Vec2, h: f64) -> Result<Vec2> {
        let k1 = self.velocity(uv)?;
        let k2 = self.velocity(uv + k1 * (0.5 * h))?;
        let k3 = self.velocity(uv + k2 * (0.5 * h))?;
        let k4 = self.velocity(uv + k3 * h)?;
        Ok(uv + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0))
    }

    fn advance(&self, uv: Vec2, h: f64) -> Result<Vec2> {
        let n = ((h.abs() / self.step * SUBSTEPS as f64).ceil() as usize).max(1);
        let mut p = uv;
        for _ in 0..n {
            p = self.rk4(p, h / n as f64)?;
        }
        self.project(p)
    }

    fn inside(&self, uv: Vec2) -> bool {
        let dom = self.surface.domain();
        let [pu, pv] = self.surface.periodic();
        let slack_u = 1e-9 * dom.width();
        let slack_v = 1e-9 * dom.height();
        (pu || (uv.x >= dom.u.0 - slack_u && uv.x <= dom.u.1 + slack_u))
            && (pv || (uv.y >= dom.v.0 - slack_v && uv.y <= dom.v.1 + slack_v))
    }

    fn build(&mut self, start: Vec2, estimate: f64) -> Result<()> {
        let h = self.step;
        let p0 = self.surface.point_uv(start);
        let max_len = if self.closed {
            1.5 * estimate + 10.0 * h
        } else {
            estimate
        };
        let mut uv = start;
        let mut last_dist = f64::INFINITY;
        let mut approaching = false;
        while (self.table.len() as f64) * h < max_len + h {
            let next = self.advance(uv, h)?;
            if !self.inside(next) {
                if !self.closed {
                    self.length = (self.table.len() - 1) as f64 * h;
                }
                break;
            }
            self.table.push(next);
            uv = next;
            if self.closed {
                let s = (self.table.len() - 1) as f64 * h;
                let dist = (self.surface.point_uv(next) - p0).norm();
                if s > 0.5 * estimate {
                    if dist < last_dist {
                        approaching = true;
                    } else if approaching && dist < 10.0 * h {
                        // passed the start: refine the period and keep a few nodes beyond it
                        self.length = self.refine_period(s - h, p0)?;
                        for _ in 0..4 {
                            let n = self.advance(*self.table.last().unwrap(), h)?;
                            self.table.push(n);
                        }
                        return Ok(());
                    }
                    last_dist = dist;
                }
            }
        }
        if self.closed {
            return Err(GeomError::InvalidInput(
                "level curve did not return to its start".into(),
            ));
        }
        self.length = self.length.min((self.table.len() - 1) as f64 * h);
        Ok(())
    }

    /// Solves `<P(s) - P0, T(s)> = 0` near `s`.
    fn refine_period(&self, mut s: f64, p0: Vec3) -> Result<f64> {
        for _ in 0..20 {
            let uv = self.eval(s)?;
            let x = self.velocity(uv)?;
            let [su, sv] = self.surface.partials(uv.x, uv.y);
            let t = su * x.x + sv * x.y;
            let g = (self.surface.point_uv(uv) - p0).dot(&t);
            // d/ds <P - P0, T> = 1 + <P - P0, T'>, and P - P0 is small here
            let ds = g;
            s -= ds;
            if ds.abs() < 1e-14 {
                break;
            }
        }
        Ok(s)
    }

    fn eval(&self, s: f64) -> Result<Vec2> {
        let h = self.step;
        let k = ((s / h).round().max(0.0) as usize).min(self.table.len() - 1);
        let sk = k as f64 * h;
        if (s - sk).abs() < 1e-15 {
            return Ok(self.table[k]);
        }
        self.advance(self.table[k], s - sk)
    }
}

impl UvPath for IsophoteFlowPath {
    fn range(&self) -> (f64, f64) {
        (0.0, self.length)
    }

    fn uv(&self, s: f64) -> Vec2 {
        self.eval(s).unwrap_or_else(|_| Vec2::from_element(f64::NAN))
    }

    fn d1(&self, s: f64) -> Option<Vec2> {
        self.velocity(self.uv(s)).ok()
    }

    fn d2(&self, s: f64) -> Option<Vec2> {
        let uv = self.uv(s);
        let x = self.velocity(uv).ok()?;
        Some(diff1(
            |t| {
                self.velocity(uv + x * t)
                    .unwrap_or_else(|_| Vec2::from_element(f64::NAN))
            },
            0.0,
            1e-3,
        ))
    }
}
