//! Catalog of immersed surfaces with closed-form embeddings and metrics.

use std::f64::consts::FRAC_PI_4;
use std::sync::Arc;

use nalgebra::DVector;
use serde::Serialize;

use super::{AmbientModel, EmbeddingFn, EmbeddingJet, Expectation, HintFn, ImmersedSurface};
use crate::chart::{AnalyticMetric, Domain, MetricJet, SurfacePatch};
use crate::clifford::{Epsilon, SignaturePair, C64};
use crate::error::{Error, Result};

/// Catalog entry summary.
#[derive(Debug, Clone, Serialize)]
pub struct PresetInfo {
    pub name: &'static str,
    pub ambient: &'static str,
    pub description: &'static str,
}

pub const CATALOG: [PresetInfo; 10] = [
    PresetInfo {
        name: "flat-plane-R3",
        ambient: "R^{3,0}",
        description: "coordinate plane, totally geodesic",
    },
    PresetInfo {
        name: "round-sphere-R3",
        ambient: "R^{3,0}",
        description: "unit sphere patch, outward normal",
    },
    PresetInfo {
        name: "hyperbolic-plane-R21",
        ambient: "R^{2,1}",
        description: "upper hyperboloid <x,x> = -1, timelike normal",
    },
    PresetInfo {
        name: "de-sitter-R21",
        ambient: "R^{2,1}",
        description: "one-sheeted hyperboloid <x,x> = 1, signature (1,1)",
    },
    PresetInfo {
        name: "de-sitter-R12",
        ambient: "R^{1,2}",
        description: "anti-isometric copy of de-sitter-R21, timelike normal",
    },
    PresetInfo {
        name: "hyperbolic-plane-R12",
        ambient: "R^{1,2}",
        description: "anti-isometric copy of hyperbolic-plane-R21, signature (0,2)",
    },
    PresetInfo {
        name: "round-sphere-R03",
        ambient: "R^{0,3}",
        description: "anti-isometric copy of round-sphere-R3, signature (0,2)",
    },
    PresetInfo {
        name: "sphere-patch-in-S3",
        ambient: "S^3 in R^{4,0}",
        description: "geodesic sphere of radius pi/4, kappa = 1",
    },
    PresetInfo {
        name: "surface-in-H3",
        ambient: "H^3 in R^{3,1}",
        description: "geodesic sphere of radius 1, kappa = -1",
    },
    PresetInfo {
        name: "de-sitter-in-S21",
        ambient: "S^{2,1} in R^{3,1}",
        description: "totally umbilic (1,1) surface, kappa = 1",
    },
];

pub fn preset_names() -> Vec<&'static str> {
    CATALOG.iter().map(|p| p.name).collect()
}

/// Jet of `(value, first, second)` derivatives of a function of `u`.
type Profile = fn(f64) -> [f64; 3];

fn sin_profile(u: f64) -> [f64; 3] {
    [u.sin(), u.cos(), -u.sin()]
}

fn sinh_profile(u: f64) -> [f64; 3] {
    [u.sinh(), u.cosh(), u.sinh()]
}

fn cosh_profile(u: f64) -> [f64; 3] {
    [u.cosh(), u.sinh(), u.cosh()]
}

fn one_profile(_: f64) -> [f64; 3] {
    [1.0, 0.0, 0.0]
}

/// `c (s1 du^2 + s2 f(u)^2 dv^2)`.
fn warped_metric(s1: f64, s2: f64, c: f64, f: Profile) -> AnalyticMetric {
    AnalyticMetric::new(move |u, _| {
        let [f0, f1, f2] = f(u);
        MetricJet::diagonal(
            [s1, 0.0, 0.0, 0.0, 0.0, 0.0],
            [
                s2 * f0 * f0,
                2.0 * s2 * f0 * f1,
                0.0,
                2.0 * s2 * (f1 * f1 + f0 * f2),
                0.0,
                0.0,
            ],
        )
        .scaled(c)
    })
}

fn v3(a: f64, b: f64, c: f64) -> DVector<f64> {
    DVector::from_vec(vec![a, b, c])
}

/// Round unit sphere in polar coordinates `(theta, phi)`.
fn sphere_jet(t: f64, p: f64) -> EmbeddingJet {
    let (st, ct) = t.sin_cos();
    let (sp, cp) = p.sin_cos();
    EmbeddingJet {
        x: v3(st * cp, st * sp, ct),
        xu: v3(ct * cp, ct * sp, -st),
        xv: v3(-st * sp, st * cp, 0.0),
        xuu: v3(-st * cp, -st * sp, -ct),
        xuv: v3(-ct * sp, ct * cp, 0.0),
        xvv: v3(-st * cp, -st * sp, 0.0),
    }
}

/// `(sinh u cos v, sinh u sin v, cosh u)`.
fn hyperboloid_jet(u: f64, v: f64) -> EmbeddingJet {
    let (sh, ch) = (u.sinh(), u.cosh());
    let (s, c) = v.sin_cos();
    EmbeddingJet {
        x: v3(sh * c, sh * s, ch),
        xu: v3(ch * c, ch * s, sh),
        xv: v3(-sh * s, sh * c, 0.0),
        xuu: v3(sh * c, sh * s, ch),
        xuv: v3(-ch * s, ch * c, 0.0),
        xvv: v3(-sh * c, -sh * s, 0.0),
    }
}

/// `(cosh u cos v, cosh u sin v, sinh u)`.
fn de_sitter_jet(u: f64, v: f64) -> EmbeddingJet {
    let (sh, ch) = (u.sinh(), u.cosh());
    let (s, c) = v.sin_cos();
    EmbeddingJet {
        x: v3(ch * c, ch * s, sh),
        xu: v3(sh * c, sh * s, ch),
        xv: v3(-ch * s, ch * c, 0.0),
        xuu: v3(ch * c, ch * s, sh),
        xuv: v3(-sh * s, sh * c, 0.0),
        xvv: v3(-ch * c, -ch * s, 0.0),
    }
}

fn plane_jet(u: f64, v: f64) -> EmbeddingJet {
    let z = v3(0.0, 0.0, 0.0);
    EmbeddingJet {
        x: v3(u, v, 0.0),
        xu: v3(1.0, 0.0, 0.0),
        xv: v3(0.0, 1.0, 0.0),
        xuu: z.clone(),
        xuv: z.clone(),
        xvv: z,
    }
}

/// `(a y, b)` in one dimension more, for a unit-quadric surface `y`.
fn lift(jet: EmbeddingJet, a: f64, b: f64) -> EmbeddingJet {
    let ext = |w: &DVector<f64>, last: f64| {
        let mut out = DVector::zeros(4);
        out.rows_mut(0, 3).copy_from(&(w * a));
        out[3] = last;
        out
    };
    EmbeddingJet {
        x: ext(&jet.x, b),
        xu: ext(&jet.xu, 0.0),
        xv: ext(&jet.xv, 0.0),
        xuu: ext(&jet.xuu, 0.0),
        xuv: ext(&jet.xuv, 0.0),
        xvv: ext(&jet.xvv, 0.0),
    }
}

/// Normal hint for a lifted quadric surface: `(c y, d)`.
fn lifted_hint(base: fn(f64, f64) -> EmbeddingJet, c: f64, d: f64) -> HintFn {
    Arc::new(move |u, v| {
        let y = base(u, v).x;
        DVector::from_vec(vec![c * y[0], c * y[1], c * y[2], d])
    })
}

fn position_hint(base: fn(f64, f64) -> EmbeddingJet) -> HintFn {
    Arc::new(move |u, v| base(u, v).x)
}

struct Recipe {
    signs: Vec<i8>,
    kappa: f64,
    lambda: C64,
    domain: Domain,
    metric: AnalyticMetric,
    p: usize,
    q: usize,
    embedding: EmbeddingFn,
    hint: HintFn,
    epsilon: Epsilon,
    shape_scale: f64,
}

const SPHERE_DOMAIN: Domain = Domain {
    u0: 0.6,
    u1: 1.6,
    v0: 0.0,
    v1: 1.0,
};
const HYPERBOLIC_DOMAIN: Domain = Domain {
    u0: 0.5,
    u1: 1.5,
    v0: 0.0,
    v1: 1.0,
};
const DE_SITTER_DOMAIN: Domain = Domain {
    u0: -0.5,
    u1: 0.5,
    v0: 0.0,
    v1: 1.0,
};

fn recipe_for(name: &str) -> Option<Recipe> {
    let real = |x: f64| C64::new(x, 0.0);
    let recipe = match name {
        "flat-plane-R3" => Recipe {
            signs: vec![1, 1, 1],
            kappa: 0.0,
            lambda: real(0.0),
            domain: Domain::new(0.0, 1.0, 0.0, 1.0),
            metric: warped_metric(1.0, 1.0, 1.0, one_profile),
            p: 2,
            q: 0,
            embedding: Arc::new(plane_jet),
            hint: Arc::new(|_, _| v3(0.0, 0.0, 1.0)),
            epsilon: Epsilon::Spacelike,
            shape_scale: 0.0,
        },
        "round-sphere-R3" => Recipe {
            signs: vec![1, 1, 1],
            kappa: 0.0,
            lambda: real(0.0),
            domain: SPHERE_DOMAIN,
            metric: warped_metric(1.0, 1.0, 1.0, sin_profile),
            p: 2,
            q: 0,
            embedding: Arc::new(sphere_jet),
            hint: position_hint(sphere_jet),
            epsilon: Epsilon::Spacelike,
            shape_scale: -1.0,
        },
        "hyperbolic-plane-R21" => Recipe {
            signs: vec![1, 1, -1],
            kappa: 0.0,
            lambda: real(0.0),
            domain: HYPERBOLIC_DOMAIN,
            metric: warped_metric(1.0, 1.0, 1.0, sinh_profile),
            p: 2,
            q: 0,
            embedding: Arc::new(hyperboloid_jet),
            hint: position_hint(hyperboloid_jet),
            epsilon: Epsilon::Timelike,
            shape_scale: -1.0,
        },
        "de-sitter-R21" => Recipe {
            signs: vec![1, 1, -1],
            kappa: 0.0,
            lambda: real(0.0),
            domain: DE_SITTER_DOMAIN,
            metric: warped_metric(-1.0, 1.0, 1.0, cosh_profile),
            p: 1,
            q: 1,
            embedding: Arc::new(de_sitter_jet),
            hint: position_hint(de_sitter_jet),
            epsilon: Epsilon::Spacelike,
            shape_scale: -1.0,
        },
        "de-sitter-R12" => Recipe {
            signs: vec![-1, -1, 1],
            kappa: 0.0,
            lambda: real(0.0),
            domain: DE_SITTER_DOMAIN,
            metric: warped_metric(1.0, -1.0, 1.0, cosh_profile),
            p: 1,
            q: 1,
            embedding: Arc::new(de_sitter_jet),
            hint: position_hint(de_sitter_jet),
            epsilon: Epsilon::Timelike,
            shape_scale: -1.0,
        },
        "hyperbolic-plane-R12" => Recipe {
            signs: vec![-1, -1, 1],
            kappa: 0.0,
            lambda: real(0.0),
            domain: HYPERBOLIC_DOMAIN,
            metric: warped_metric(-1.0, -1.0, 1.0, sinh_profile),
            p: 0,
            q: 2,
            embedding: Arc::new(hyperboloid_jet),
            hint: position_hint(hyperboloid_jet),
            epsilon: Epsilon::Spacelike,
            shape_scale: -1.0,
        },
        "round-sphere-R03" => Recipe {
            signs: vec![-1, -1, -1],
            kappa: 0.0,
            lambda: real(0.0),
            domain: SPHERE_DOMAIN,
            metric: warped_metric(-1.0, -1.0, 1.0, sin_profile),
            p: 0,
            q: 2,
            embedding: Arc::new(sphere_jet),
            hint: position_hint(sphere_jet),
            epsilon: Epsilon::Timelike,
            shape_scale: -1.0,
        },
        "sphere-patch-in-S3" => {
            let r = FRAC_PI_4;
            let (s, c) = r.sin_cos();
            Recipe {
                signs: vec![1, 1, 1, 1],
                kappa: 1.0,
                lambda: real(0.5),
                domain: SPHERE_DOMAIN,
                metric: warped_metric(1.0, 1.0, s * s, sin_profile),
                p: 2,
                q: 0,
                embedding: Arc::new(move |u, v| lift(sphere_jet(u, v), s, c)),
                hint: lifted_hint(sphere_jet, c, -s),
                epsilon: Epsilon::Spacelike,
                shape_scale: -c / s,
            }
        }
        "surface-in-H3" => {
            let r = 1.0f64;
            let (s, c) = (r.sinh(), r.cosh());
            Recipe {
                signs: vec![1, 1, 1, -1],
                kappa: -1.0,
                lambda: C64::new(0.0, 0.5),
                domain: SPHERE_DOMAIN,
                metric: warped_metric(1.0, 1.0, s * s, sin_profile),
                p: 2,
                q: 0,
                embedding: Arc::new(move |u, v| lift(sphere_jet(u, v), s, c)),
                hint: lifted_hint(sphere_jet, c, s),
                epsilon: Epsilon::Spacelike,
                shape_scale: -c / s,
            }
        }
        "de-sitter-in-S21" => {
            let r = FRAC_PI_4;
            let (s, c) = r.sin_cos();
            Recipe {
                signs: vec![1, 1, -1, 1],
                kappa: 1.0,
                lambda: real(0.5),
                domain: DE_SITTER_DOMAIN,
                metric: warped_metric(-1.0, 1.0, c * c, cosh_profile),
                p: 1,
                q: 1,
                embedding: Arc::new(move |u, v| lift(de_sitter_jet(u, v), c, s)),
                hint: lifted_hint(de_sitter_jet, s, -c),
                epsilon: Epsilon::Spacelike,
                shape_scale: -s / c,
            }
        }
        _ => return None,
    };
    Some(recipe)
}

/// Loads a catalog surface by name.
pub fn load_preset(name: &str) -> Result<ImmersedSurface> {
    let recipe = recipe_for(name).ok_or_else(|| Error::UnknownPreset(name.to_string()))?;
    let model = AmbientModel::new(&recipe.signs, recipe.kappa)?;
    let patch = SurfacePatch::new(
        recipe.domain,
        Arc::new(recipe.metric),
        SignaturePair::canonical(recipe.p, recipe.q)?,
    )?;
    let surface = ImmersedSurface::new(
        name,
        model,
        patch,
        recipe.embedding,
        recipe.hint,
        recipe.lambda,
        Expectation {
            p: recipe.p,
            q: recipe.q,
            epsilon: recipe.epsilon,
            shape_scale: recipe.shape_scale,
        },
    )?;
    if surface.context.epsilon != recipe.epsilon {
        return Err(Error::InvalidContext(format!(
            "preset {name}: normal type does not match the catalog"
        )));
    }
    Ok(surface)
}
