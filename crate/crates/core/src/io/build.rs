//! Turns scene entities into surfaces and curves.

use std::collections::BTreeMap;

use super::scene::{default_entity, Entity, SceneConfig, Value};
use crate::canal::{
    canal_surface, radius_law_integral_cor3b, radius_law_linear_cor3a, radius_law_prop1, Branch, CanalSpec,
    RadiusFunction,
};
use crate::catalog;
use crate::curve::SpaceCurve;
use crate::error::{GeomError, Result};
use crate::surface::{CurveOnSurface, ParamSurface};
use crate::tolerance::Tolerances;
use crate::Vec2;

#[derive(Debug, Clone)]
pub struct BuiltSurface {
    pub entity: Entity,
    pub surface: ParamSurface,
    /// Present for tubes and canal surfaces.
    pub canal: Option<CanalSpec>,
}

#[derive(Debug, Clone)]
pub enum BuiltCurve {
    Space(SpaceCurve),
    /// A unit-speed curve on a surface.
    OnSurface(CurveOnSurface),
}

/// Resolved geometry of a scene. Names that are not scene ids resolve to catalog kinds
/// with default parameters.
pub struct Scene {
    config: SceneConfig,
    pub tol: Tolerances,
    surfaces: BTreeMap<String, BuiltSurface>,
    curves: BTreeMap<String, BuiltCurve>,
}

pub fn branch_of(text: &str) -> Branch {
    if text == "plus" {
        Branch::Plus
    } else {
        Branch::Minus
    }
}

impl Scene {
    pub fn build(config: &SceneConfig, tol: &Tolerances) -> Result<Self> {
        let mut scene = Self {
            config: config.clone(),
            tol: *tol,
            surfaces: BTreeMap::new(),
            curves: BTreeMap::new(),
        };
        for e in &config.surfaces {
            scene.surface(&e.id)?;
        }
        for e in &config.curves {
            scene.curve(&e.id)?;
        }
        Ok(scene)
    }

    fn entity(&self, name: &str, surface: bool) -> Result<Entity> {
        let list = if surface {
            &self.config.surfaces
        } else {
            &self.config.curves
        };
        list.iter()
            .find(|e| e.id == name)
            .cloned()
            .or_else(|| default_entity(name, surface))
            .ok_or_else(|| {
                GeomError::InvalidInput(format!(
                    "unknown {} `{name}`",
                    if surface { "surface" } else { "curve" }
                ))
            })
    }

    pub fn surface(&mut self, name: &str) -> Result<BuiltSurface> {
        if let Some(s) = self.surfaces.get(name) {
            return Ok(s.clone());
        }
        let e = self.entity(name, true)?;
        let built = self.make_surface(e)?;
        self.surfaces.insert(name.to_string(), built.clone());
        Ok(built)
    }

    /// A space curve: catalog curves directly, curves on surfaces through their lift.
    pub fn space_curve(&mut self, name: &str) -> Result<SpaceCurve> {
        Ok(match self.curve(name)? {
            BuiltCurve::Space(c) => c,
            BuiltCurve::OnSurface(c) => c.as_space_curve(),
        })
    }

    pub fn curve(&mut self, name: &str) -> Result<BuiltCurve> {
        if let Some(c) = self.curves.get(name) {
            return Ok(c.clone());
        }
        let e = self.entity(name, false)?;
        let built = match e.kind.as_str() {
            "circle" => BuiltCurve::Space(catalog::circle(e.num("radius"))),
            "circular_helix" => BuiltCurve::Space(catalog::circular_helix(e.num("a"), e.num("b"), e.num("turns"))),
            "slant_helix" => BuiltCurve::Space(catalog::slant_helix(e.num("a"), e.num("b"))),
            "uv_line" => {
                let surface = self.surface(e.text("surface"))?.surface;
                let v2 = |k: &str| match e.opt(k) {
                    Some(Value::Vector(v)) if v.len() == 2 => Vec2::new(v[0], v[1]),
                    _ => Vec2::zeros(),
                };
                let dir = v2("direction").normalize();
                let line = CurveOnSurface::line(surface, v2("origin"), dir, (0.0, e.num("length")));
                BuiltCurve::OnSurface(line.arclength(1e-12, &self.tol)?)
            }
            k => return Err(GeomError::InvalidInput(format!("unknown curve kind `{k}`"))),
        };
        self.curves.insert(name.to_string(), built.clone());
        Ok(built)
    }

    fn make_surface(&mut self, e: Entity) -> Result<BuiltSurface> {
        let (surface, canal) = match e.kind.as_str() {
            "sphere" => (catalog::sphere(e.num("radius")), None),
            "cylinder" => (
                catalog::cylinder(e.num("radius"), (e.num("z_min"), e.num("z_max"))),
                None,
            ),
            "torus" => (catalog::torus(e.num("major"), e.num("minor")), None),
            "graph" => (catalog::graph(e.num("a"), e.num("b"), e.num("half")), None),
            "rectifying_developable" => {
                let c = self.space_curve(e.text("curve"))?;
                (catalog::rectifying_developable(&c, e.num("width")), None)
            }
            "tube" => {
                let spine = self.space_curve(e.text("spine"))?;
                let spec = CanalSpec::tube(spine, e.num("radius"), branch_of(e.text("branch")), &self.tol)?;
                (canal_surface(&spec), Some(spec))
            }
            "canal" => {
                let spine = self.space_curve(e.text("spine"))?;
                let slope = match e.text("law") {
                    "cor3a" => radius_law_linear_cor3a(e.num("theta"), e.num("v"), e.num("sign"))?.slope,
                    "cor3b" => radius_law_integral_cor3b(e.num("beta"), e.num("v"), e.num("phi"))?.slope,
                    "prop1" => radius_law_prop1(e.num("theta"), e.num("v"))?.slope,
                    _ => e.num("slope"),
                };
                let s0 = spine.range().0;
                // r(s0) = r0
                let radius = RadiusFunction::linear(slope, e.num("r0") - slope * s0);
                let spec = CanalSpec::new(spine, radius, branch_of(e.text("branch")), &self.tol)?;
                (canal_surface(&spec), Some(spec))
            }
            k => return Err(GeomError::InvalidInput(format!("unknown surface kind `{k}`"))),
        };
        Ok(BuiltSurface {
            surface: surface.with_name(e.id.clone()),
            entity: e,
            canal,
        })
    }
}
