//! Obstacle geometry: random smooth shapes, signed-distance scenes and the
//! procedural generators used by the experiment families.

mod bspline;
mod hull;
mod indoor;
mod scene;
mod shape;

use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use bspline::{closed_cubic_bspline, BSPLINE_SAMPLES};
pub use hull::{convex_hull, minkowski_sum};
pub use indoor::{gen_indoor_scene, gen_indoor_scene_with, IndoorConfig};
pub use scene::{
    point_in_polygon, polygon_sdf, rasterize_l, segment_distance, Combine, Placed, Primitive, Scene, Side,
};
pub use shape::{random_smooth_shape, SmoothShape, DEFAULT_N_ANGLES};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("need at least {need} points, got {got}")]
    TooFewPoints { need: usize, got: usize },
    #[error("all points are collinear")]
    Collinear,
    #[error("invalid shape parameters: {0}")]
    InvalidParameters(String),
    #[error("degenerate hull after {0} attempts")]
    DegenerateHull(usize),
    #[error("scene has no primitives or starts with a subtraction")]
    EmptyScene,
    #[error("scene file: {0}")]
    Format(String),
}

/// A point or vector in the plane. Serialized as `[x, y]`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn dot(self, o: Vec2) -> f64 {
        self.x * o.x + self.y * o.y
    }

    /// z-component of the 3D cross product.
    pub fn cross(self, o: Vec2) -> f64 {
        self.x * o.y - self.y * o.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn rotate(self, angle: f64) -> Vec2 {
        let (s, c) = angle.sin_cos();
        Vec2::new(c * self.x - s * self.y, s * self.x + c * self.y)
    }

    pub fn polar(r: f64, angle: f64) -> Vec2 {
        Vec2::new(r * angle.cos(), r * angle.sin())
    }
}

impl From<[f64; 2]> for Vec2 {
    fn from(a: [f64; 2]) -> Self {
        Vec2::new(a[0], a[1])
    }
}

impl From<Vec2> for [f64; 2] {
    fn from(v: Vec2) -> Self {
        [v.x, v.y]
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    fn add(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x - o.x, self.y - o.y)
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    fn mul(self, s: f64) -> Vec2 {
        Vec2::new(self.x * s, self.y * s)
    }
}

/// Obstacle radius as a function of speed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VelocityRadiusLaw {
    pub kind: RadiusGrowth,
    pub r0: f64,
    pub a: f64,
    pub b: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RadiusGrowth {
    Exponential,
    Logarithmic,
}

impl VelocityRadiusLaw {
    /// `r0 + a(e^{bv} - 1)` or `r0 + a ln(1 + bv)`; non-decreasing for `v >= 0`.
    pub fn radius(&self, v: f64) -> f64 {
        match self.kind {
            RadiusGrowth::Exponential => self.r0 + self.a * (self.b * v).exp_m1(),
            RadiusGrowth::Logarithmic => self.r0 + self.a * (self.b * v).ln_1p(),
        }
    }
}

pub fn velocity_radius(law: &VelocityRadiusLaw, v: f64) -> f64 {
    law.radius(v)
}
