//! Built-in curves and surfaces with closed-form derivatives.

use std::f64::consts::PI;

use crate::curve::{frenet_at, SpaceCurve};
use crate::numeric::{diff1, diff2};
use crate::surface::{Domain, ParamSurface, SurfaceSource};
use crate::tolerance::Tolerances;
use crate::Vec3;

/// Unit-speed circle of radius `r` in the xy-plane, starting at (r, 0, 0).
pub fn circle(r: f64) -> SpaceCurve {
    SpaceCurve::from_fns(
        move |s| Vec3::new(r * (s / r).cos(), r * (s / r).sin(), 0.0),
        move |s| Vec3::new(-(s / r).sin(), (s / r).cos(), 0.0),
        move |s| Vec3::new(-(s / r).cos(), -(s / r).sin(), 0.0) / r,
        move |s| Vec3::new((s / r).sin(), -(s / r).cos(), 0.0) / (r * r),
        (0.0, 2.0 * PI * r),
    )
    .with_unit_speed(true)
}

/// Unit-speed circular helix `(a cos t, a sin t, b t)` with `t = s / sqrt(a^2 + b^2)`,
/// covering `turns` full turns. Curvature `a / (a^2+b^2)`, torsion `b / (a^2+b^2)`.
pub fn circular_helix(a: f64, b: f64, turns: f64) -> SpaceCurve {
    let c = (a * a + b * b).sqrt();
    SpaceCurve::from_fns(
        move |s| {
            let t = s / c;
            Vec3::new(a * t.cos(), a * t.sin(), b * t)
        },
        move |s| {
            let t = s / c;
            Vec3::new(-a * t.sin(), a * t.cos(), b) / c
        },
        move |s| {
            let t = s / c;
            Vec3::new(-a * t.cos(), -a * t.sin(), 0.0) / (c * c)
        },
        move |s| {
            let t = s / c;
            Vec3::new(a * t.sin(), -a * t.cos(), 0.0) / (c * c * c)
        },
        (0.0, 2.0 * PI * c * turns),
    )
    .with_unit_speed(true)
}

/// Axis direction of [`circular_helix`].
pub fn circular_helix_axis() -> Vec3 {
    Vec3::z()
}

/// The slant helix
/// `gamma(t) = (-(a^2-b^2)/(2a) (cos((a+b)t)/(a+b)^2 + cos((a-b)t)/(a-b)^2),
///             -(a^2-b^2)/(2a) (sin((a+b)t)/(a+b)^2 + sin((a-b)t)/(a-b)^2),
///             -sqrt(a^2-b^2)/(ab) cos(bt))`, `a > b > 0`.
///
/// It is unit speed, with `kappa = sqrt(a^2-b^2) cos(bt)` and `tau = sqrt(a^2-b^2) sin(bt)`;
/// the range is restricted to `|bt| <= 1.2` where the curvature stays positive.
pub fn slant_helix(a: f64, b: f64) -> SpaceCurve {
    slant_helix_on(a, b, (-1.2 / b, 1.2 / b))
}

pub fn slant_helix_on(a: f64, b: f64, range: (f64, f64)) -> SpaceCurve {
    let amp = (a * a - b * b) / (2.0 * a);
    let p = a + b;
    let m = a - b;
    let k = (a * a - b * b).sqrt() / (a * b);
    SpaceCurve::from_fns(
        move |t| {
            Vec3::new(
                -amp * ((p * t).cos() / (p * p) + (m * t).cos() / (m * m)),
                -amp * ((p * t).sin() / (p * p) + (m * t).sin() / (m * m)),
                -k * (b * t).cos(),
            )
        },
        move |t| {
            Vec3::new(
                amp * ((p * t).sin() / p + (m * t).sin() / m),
                -amp * ((p * t).cos() / p + (m * t).cos() / m),
                k * b * (b * t).sin(),
            )
        },
        move |t| {
            Vec3::new(
                amp * ((p * t).cos() + (m * t).cos()),
                amp * ((p * t).sin() + (m * t).sin()),
                k * b * b * (b * t).cos(),
            )
        },
        move |t| {
            Vec3::new(
                -amp * (p * (p * t).sin() + m * (m * t).sin()),
                amp * (p * (p * t).cos() + m * (m * t).cos()),
                -k * b * b * b * (b * t).sin(),
            )
        },
        range,
    )
    .with_unit_speed(true)
}

struct Sphere {
    r: f64,
}

impl SurfaceSource for Sphere {
    fn point(&self, u: f64, v: f64) -> Vec3 {
        self.r * Vec3::new(u.cos() * v.cos(), u.sin() * v.cos(), v.sin())
    }
    fn partials(&self, u: f64, v: f64) -> Option<[Vec3; 2]> {
        let r = self.r;
        Some([
            r * Vec3::new(-u.sin() * v.cos(), u.cos() * v.cos(), 0.0),
            r * Vec3::new(-u.cos() * v.sin(), -u.sin() * v.sin(), v.cos()),
        ])
    }
    fn second_partials(&self, u: f64, v: f64) -> Option<[Vec3; 3]> {
        let r = self.r;
        Some([
            r * Vec3::new(-u.cos() * v.cos(), -u.sin() * v.cos(), 0.0),
            r * Vec3::new(u.sin() * v.sin(), -u.cos() * v.sin(), 0.0),
            r * Vec3::new(-u.cos() * v.cos(), -u.sin() * v.cos(), -v.sin()),
        ])
    }
}

/// Sphere `r (cos u cos v, sin u cos v, sin v)`, outward normal; u periodic on [-pi, pi].
pub fn sphere(r: f64) -> ParamSurface {
    ParamSurface::from_source(
        Sphere { r },
        Domain {
            u: (-PI, PI),
            v: (-PI / 2.0, PI / 2.0),
        },
        [true, false],
    )
    .with_name("sphere")
}

struct Cylinder {
    r: f64,
}

impl SurfaceSource for Cylinder {
    fn point(&self, u: f64, v: f64) -> Vec3 {
        Vec3::new(self.r * u.cos(), self.r * u.sin(), v)
    }
    fn partials(&self, u: f64, _v: f64) -> Option<[Vec3; 2]> {
        Some([Vec3::new(-self.r * u.sin(), self.r * u.cos(), 0.0), Vec3::z()])
    }
    fn second_partials(&self, u: f64, _v: f64) -> Option<[Vec3; 3]> {
        Some([
            Vec3::new(-self.r * u.cos(), -self.r * u.sin(), 0.0),
            Vec3::zeros(),
            Vec3::zeros(),
        ])
    }
}

/// Cylinder `(r cos u, r sin u, v)` for `v` in `height`, outward normal.
pub fn cylinder(r: f64, height: (f64, f64)) -> ParamSurface {
    ParamSurface::from_source(
        Cylinder { r },
        Domain {
            u: (-PI, PI),
            v: height,
        },
        [true, false],
    )
    .with_name("cylinder")
}

struct Torus {
    big: f64,
    small: f64,
}

impl SurfaceSource for Torus {
    fn point(&self, u: f64, v: f64) -> Vec3 {
        let w = self.big + self.small * v.cos();
        Vec3::new(w * u.cos(), w * u.sin(), self.small * v.sin())
    }
    fn partials(&self, u: f64, v: f64) -> Option<[Vec3; 2]> {
        let w = self.big + self.small * v.cos();
        let r = self.small;
        Some([
            Vec3::new(-w * u.sin(), w * u.cos(), 0.0),
            Vec3::new(-r * v.sin() * u.cos(), -r * v.sin() * u.sin(), r * v.cos()),
        ])
    }
    fn second_partials(&self, u: f64, v: f64) -> Option<[Vec3; 3]> {
        let w = self.big + self.small * v.cos();
        let r = self.small;
        Some([
            Vec3::new(-w * u.cos(), -w * u.sin(), 0.0),
            Vec3::new(r * v.sin() * u.sin(), -r * v.sin() * u.cos(), 0.0),
            Vec3::new(-r * v.cos() * u.cos(), -r * v.cos() * u.sin(), -r * v.sin()),
        ])
    }
}

/// Torus with major radius `big` and minor radius `small`; `v` is the minor angle, so
/// `<N, z> = sin v`. Both directions periodic on [-pi, pi].
pub fn torus(big: f64, small: f64) -> ParamSurface {
    ParamSurface::from_source(
        Torus { big, small },
        Domain {
            u: (-PI, PI),
            v: (-PI, PI),
        },
        [true, true],
    )
    .with_name("torus")
}

struct Graph {
    a: f64,
    b: f64,
}

impl SurfaceSource for Graph {
    fn point(&self, x: f64, y: f64) -> Vec3 {
        Vec3::new(x, y, 0.5 * (self.a * x * x + self.b * y * y))
    }
    fn partials(&self, x: f64, y: f64) -> Option<[Vec3; 2]> {
        Some([Vec3::new(1.0, 0.0, self.a * x), Vec3::new(0.0, 1.0, self.b * y)])
    }
    fn second_partials(&self, _x: f64, _y: f64) -> Option<[Vec3; 3]> {
        Some([Vec3::new(0.0, 0.0, self.a), Vec3::zeros(), Vec3::new(0.0, 0.0, self.b)])
    }
}

/// Quadric graph `z = (a x^2 + b y^2) / 2` over `[-half, half]^2`, upward normal.
pub fn graph(a: f64, b: f64, half: f64) -> ParamSurface {
    ParamSurface::from_source(
        Graph { a, b },
        Domain {
            u: (-half, half),
            v: (-half, half),
        },
        [false, false],
    )
    .with_name("graph")
}

struct RectifyingDevelopable {
    curve: SpaceCurve,
    tol: Tolerances,
}

impl RectifyingDevelopable {
    /// Unit modified Darboux direction `(tau T + kappa b) / sqrt(kappa^2 + tau^2)`.
    fn ruling(&self, t: f64) -> Vec3 {
        match frenet_at(&self.curve, t, &self.tol) {
            Ok(f) => (f.tangent * f.tau + f.binormal * f.kappa) / f.kappa.hypot(f.tau),
            Err(_) => Vec3::from_element(f64::NAN),
        }
    }
}

impl SurfaceSource for RectifyingDevelopable {
    fn point(&self, u: f64, v: f64) -> Vec3 {
        self.curve.point(v) + self.ruling(v) * u
    }
    fn partials(&self, u: f64, v: f64) -> Option<[Vec3; 2]> {
        let dr = diff1(|x| self.ruling(x), v, 1e-3);
        Some([self.ruling(v), self.curve.derivative(v, 1) + dr * u])
    }
    fn second_partials(&self, u: f64, v: f64) -> Option<[Vec3; 3]> {
        let dr = diff1(|x| self.ruling(x), v, 1e-3);
        let ddr = if u == 0.0 {
            Vec3::zeros()
        } else {
            diff2(|x| self.ruling(x), v, 4e-3)
        };
        Some([Vec3::zeros(), dr, self.curve.derivative(v, 2) + ddr * u])
    }
}

/// Rectifying developable `S(u, v) = c(v) + u D(v)` of a curve: `u` runs along the rulings
/// (in `[-width, width]`) and the `u = 0` curve is `c` itself, a geodesic with `N = n`.
pub fn rectifying_developable(curve: &SpaceCurve, width: f64) -> ParamSurface {
    let domain = Domain {
        u: (-width, width),
        v: curve.range(),
    };
    ParamSurface::from_source(
        RectifyingDevelopable {
            curve: curve.clone(),
            tol: Tolerances::default(),
        },
        domain,
        [false, false],
    )
    .with_name("rectifying_developable")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slant_helix_is_unit_speed_for_any_a_b() {
        for (a, b) in [(2.0, 1.0), (3.0, 0.5), (1.5, 1.2)] {
            let g = slant_helix(a, b);
            for t in g.sample_params(25) {
                assert!((g.speed(t) - 1.0).abs() < 1e-14, "a={a} b={b} t={t}");
            }
        }
    }

    #[test]
    fn closed_form_partials_match_differences() {
        let bare = |s: &ParamSurface| {
            let c = s.clone();
            ParamSurface::from_fn(move |u, v| c.point(u, v), s.domain(), s.periodic())
        };
        for s in [
            sphere(1.3),
            cylinder(0.7, (-1.0, 1.0)),
            torus(2.0, 0.5),
            graph(1.0, -2.0, 1.0),
        ] {
            let fd = bare(&s);
            for (u, v) in [(0.3, 0.2), (-1.0, 0.7), (2.0, -0.4)] {
                let [a_u, a_v] = s.partials(u, v);
                let [b_u, b_v] = fd.partials(u, v);
                assert!((a_u - b_u).norm() < 1e-10 && (a_v - b_v).norm() < 1e-10);
                let a2 = s.second_partials(u, v);
                let b2 = fd.second_partials(u, v);
                for i in 0..3 {
                    assert!((a2[i] - b2[i]).norm() < 1e-8, "{} {i}", s.name());
                }
            }
        }
    }
}
