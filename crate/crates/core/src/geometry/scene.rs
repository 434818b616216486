use serde::{Deserialize, Serialize};

use super::{GeometryError, SmoothShape, Vec2};
use crate::grid::{Domain, GridError, ValueGrid};

/// How a primitive is merged into the scene built so far.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Combine {
    /// `min(acc, d)`
    Union,
    /// `max(acc, -d)`; only a lower bound on the true distance near carved corners.
    Subtract,
}

/// Wall of an axis-aligned room, used to place door gaps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Left,
    Right,
    Bottom,
    Top,
}

/// Obstacle primitive. All poses are in state units; rotations in radians.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Primitive {
    /// Smoothed convex shape; the boundary is regenerated from the control points.
    Smooth {
        center: Vec2,
        control_points: Vec<Vec2>,
        #[serde(default)]
        rotation: f64,
    },
    Disc {
        center: Vec2,
        radius: f64,
    },
    Box {
        center: Vec2,
        half_extents: Vec2,
        #[serde(default)]
        rotation: f64,
    },
    Ellipse {
        center: Vec2,
        semi_axes: Vec2,
        #[serde(default)]
        rotation: f64,
    },
    /// Hollow axis-aligned rectangle: a wall band of `thickness` centred on the
    /// rectangle's outline.
    RoomWalls {
        center: Vec2,
        half_extents: Vec2,
        thickness: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Placed {
    pub combine: Combine,
    #[serde(flatten)]
    pub primitive: Primitive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct SceneFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    primitives: Vec<Placed>,
}

/// Evaluation-ready form of a primitive.
#[derive(Debug, Clone, PartialEq)]
enum Compiled {
    Polygon { boundary: Vec<Vec2> },
    Disc { center: Vec2, radius: f64 },
    Box { center: Vec2, half: Vec2, rotation: f64 },
    Ellipse { center: Vec2, axes: Vec2, rotation: f64 },
    Walls { center: Vec2, half: Vec2, thickness: f64 },
}

/// A composition of obstacle primitives evaluated as a signed-distance-like
/// function: negative inside the unsafe set, positive outside.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SceneFile", into = "SceneFile")]
pub struct Scene {
    /// Generator seed, kept for provenance only.
    pub seed: Option<u64>,
    primitives: Vec<Placed>,
    compiled: Vec<Compiled>,
}

impl TryFrom<SceneFile> for Scene {
    type Error = GeometryError;
    fn try_from(f: SceneFile) -> Result<Self, Self::Error> {
        let mut s = Scene::new(f.primitives)?;
        s.seed = f.seed;
        Ok(s)
    }
}

impl From<Scene> for SceneFile {
    fn from(s: Scene) -> Self {
        SceneFile { seed: s.seed, primitives: s.primitives }
    }
}

impl Scene {
    pub fn new(primitives: Vec<Placed>) -> Result<Self, GeometryError> {
        if primitives.first().is_none_or(|p| p.combine != Combine::Union) {
            return Err(GeometryError::EmptyScene);
        }
        let compiled = primitives.iter().map(|p| compile(&p.primitive)).collect::<Result<_, _>>()?;
        Ok(Self { seed: None, primitives, compiled })
    }

    pub fn single(primitive: Primitive) -> Result<Self, GeometryError> {
        Self::new(vec![Placed { combine: Combine::Union, primitive }])
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    /// A smooth shape placed at `center`.
    pub fn smooth(shape: &SmoothShape, center: Vec2) -> Result<Self, GeometryError> {
        Self::single(Primitive::Smooth { center, control_points: shape.control_points.clone(), rotation: 0.0 })
    }

    pub fn primitives(&self) -> &[Placed] {
        &self.primitives
    }

    /// Appends a primitive.
    pub fn push(&mut self, combine: Combine, primitive: Primitive) -> Result<(), GeometryError> {
        self.compiled.push(compile(&primitive)?);
        self.primitives.push(Placed { combine, primitive });
        Ok(())
    }

    /// Union of two scenes (all primitives of `other` appended in order).
    pub fn union(&self, other: &Scene) -> Scene {
        let mut s = self.clone();
        s.primitives.extend(other.primitives.iter().cloned());
        s.compiled.extend(other.compiled.iter().cloned());
        s
    }

    pub fn sdf(&self, p: Vec2) -> f64 {
        let mut acc = f64::INFINITY;
        for (placed, c) in self.primitives.iter().zip(&self.compiled) {
            let d = c.sdf(p);
            acc = match placed.combine {
                Combine::Union => acc.min(d),
                Combine::Subtract => acc.max(-d),
            };
        }
        acc
    }

    pub fn to_toml(&self) -> Result<String, GeometryError> {
        toml::to_string_pretty(self).map_err(|e| GeometryError::Format(e.to_string()))
    }

    pub fn from_toml(s: &str) -> Result<Self, GeometryError> {
        toml::from_str(s).map_err(|e| GeometryError::Format(e.to_string()))
    }
}

fn compile(p: &Primitive) -> Result<Compiled, GeometryError> {
    let positive = |v: f64, what: &str| {
        if v > 0.0 && v.is_finite() {
            Ok(())
        } else {
            Err(GeometryError::InvalidParameters(format!("{what} must be positive, got {v}")))
        }
    };
    Ok(match *p {
        Primitive::Smooth { center, ref control_points, rotation } => {
            let shape = SmoothShape::from_control_points(control_points)?;
            let boundary: Vec<Vec2> = shape.boundary.iter().map(|q| q.rotate(rotation) + center).collect();
            Compiled::Polygon { boundary }
        }
        Primitive::Disc { center, radius } => {
            positive(radius, "radius")?;
            Compiled::Disc { center, radius }
        }
        Primitive::Box { center, half_extents, rotation } => {
            positive(half_extents.x, "half extent")?;
            positive(half_extents.y, "half extent")?;
            Compiled::Box { center, half: half_extents, rotation }
        }
        Primitive::Ellipse { center, semi_axes, rotation } => {
            positive(semi_axes.x, "semi-axis")?;
            positive(semi_axes.y, "semi-axis")?;
            Compiled::Ellipse { center, axes: semi_axes, rotation }
        }
        Primitive::RoomWalls { center, half_extents, thickness } => {
            positive(thickness, "wall thickness")?;
            positive(half_extents.x, "half extent")?;
            positive(half_extents.y, "half extent")?;
            Compiled::Walls { center, half: half_extents, thickness }
        }
    })
}

impl Compiled {
    fn sdf(&self, p: Vec2) -> f64 {
        match *self {
            Compiled::Polygon { ref boundary } => polygon_sdf(p, boundary),
            Compiled::Disc { center, radius } => (p - center).norm() - radius,
            Compiled::Box { center, half, rotation } => box_sdf((p - center).rotate(-rotation), half),
            Compiled::Ellipse { center, axes, rotation } => ellipse_sdf((p - center).rotate(-rotation), axes),
            Compiled::Walls { center, half, thickness } => box_sdf(p - center, half).abs() - 0.5 * thickness,
        }
    }
}

fn box_sdf(p: Vec2, half: Vec2) -> f64 {
    let q = Vec2::new(p.x.abs() - half.x, p.y.abs() - half.y);
    let outside = Vec2::new(q.x.max(0.0), q.y.max(0.0)).norm();
    outside + q.x.max(q.y).min(0.0)
}

/// Signed distance to an axis-aligned ellipse centred at the origin.
fn ellipse_sdf(p: Vec2, axes: Vec2) -> f64 {
    // work in the first quadrant with the major axis along x
    let (mut y0, mut y1) = (p.x.abs(), p.y.abs());
    let (mut e0, mut e1) = (axes.x, axes.y);
    if e0 < e1 {
        std::mem::swap(&mut e0, &mut e1);
        std::mem::swap(&mut y0, &mut y1);
    }
    let d = ellipse_distance(e0, e1, y0, y1);
    let inside = (y0 / e0).powi(2) + (y1 / e1).powi(2) < 1.0;
    if inside {
        -d
    } else {
        d
    }
}

/// Eberly's robust point-to-ellipse distance; requires `e0 >= e1 > 0`, `y0, y1 >= 0`.
fn ellipse_distance(e0: f64, e1: f64, y0: f64, y1: f64) -> f64 {
    if y1 > 0.0 {
        if y0 > 0.0 {
            let z0 = y0 / e0;
            let z1 = y1 / e1;
            let g = z0 * z0 + z1 * z1 - 1.0;
            if g != 0.0 {
                let r0 = (e0 / e1).powi(2);
                let sbar = ellipse_root(r0, z0, z1, g);
                let x0 = r0 * y0 / (sbar + r0);
                let x1 = y1 / (sbar + 1.0);
                (x0 - y0).hypot(x1 - y1)
            } else {
                0.0
            }
        } else {
            (y1 - e1).abs()
        }
    } else {
        let numer0 = e0 * y0;
        let denom0 = e0 * e0 - e1 * e1;
        if numer0 < denom0 {
            let xde0 = numer0 / denom0;
            let x0 = e0 * xde0;
            let x1 = e1 * (1.0 - xde0 * xde0).max(0.0).sqrt();
            (x0 - y0).hypot(x1)
        } else {
            (y0 - e0).abs()
        }
    }
}

fn ellipse_root(r0: f64, z0: f64, z1: f64, g: f64) -> f64 {
    let n0 = r0 * z0;
    let mut s0 = z1 - 1.0;
    let mut s1 = if g < 0.0 { 0.0 } else { n0.hypot(z1) - 1.0 };
    let mut s = 0.0;
    for _ in 0..200 {
        s = 0.5 * (s0 + s1);
        if s == s0 || s == s1 {
            break;
        }
        let ratio0 = n0 / (s + r0);
        let ratio1 = z1 / (s + 1.0);
        let g = ratio0 * ratio0 + ratio1 * ratio1 - 1.0;
        if g > 0.0 {
            s0 = s;
        } else if g < 0.0 {
            s1 = s;
        } else {
            break;
        }
    }
    s
}

/// Distance from `p` to the segment `[a, b]`.
pub fn segment_distance(p: Vec2, a: Vec2, b: Vec2) -> f64 {
    let ab = b - a;
    let len2 = ab.dot(ab);
    let t = if len2 > 0.0 { ((p - a).dot(ab) / len2).clamp(0.0, 1.0) } else { 0.0 };
    (p - (a + ab * t)).norm()
}

/// Even-odd rule containment for a closed polygon (last vertex joins the first).
pub fn point_in_polygon(p: Vec2, poly: &[Vec2]) -> bool {
    let mut inside = false;
    let n = poly.len();
    let mut j = n - 1;
    for i in 0..n {
        let (a, b) = (poly[i], poly[j]);
        if (a.y > p.y) != (b.y > p.y) && p.x < (b.x - a.x) * (p.y - a.y) / (b.y - a.y) + a.x {
            inside = !inside;
        }
        j = i;
    }
    inside
}

/// Distance to the nearest boundary segment, negative inside (even-odd rule).
pub fn polygon_sdf(p: Vec2, poly: &[Vec2]) -> f64 {
    let n = poly.len();
    let mut best = f64::INFINITY;
    let mut inside = false;
    let mut j = n - 1;
    for i in 0..n {
        let (a, b) = (poly[i], poly[j]);
        best = best.min(segment_distance(p, b, a));
        if (a.y > p.y) != (b.y > p.y) && p.x < (b.x - a.x) * (p.y - a.y) / (b.y - a.y) + a.x {
            inside = !inside;
        }
        j = i;
    }
    if inside {
        -best
    } else {
        best
    }
}

/// Proper or touching intersection of closed segments `[a, b]` and `[c, d]`.
#[cfg(test)]
pub(crate) fn segments_intersect(a: Vec2, b: Vec2, c: Vec2, d: Vec2) -> bool {
    let o1 = (b - a).cross(c - a);
    let o2 = (b - a).cross(d - a);
    let o3 = (d - c).cross(a - c);
    let o4 = (d - c).cross(b - c);
    if o1 * o2 < 0.0 && o3 * o4 < 0.0 {
        return true;
    }
    let on = |p: Vec2, q: Vec2, r: Vec2, o: f64| {
        o == 0.0 && r.x >= p.x.min(q.x) && r.x <= p.x.max(q.x) && r.y >= p.y.min(q.y) && r.y <= p.y.max(q.y)
    };
    on(a, b, c, o1) || on(a, b, d, o2) || on(c, d, a, o3) || on(c, d, b, o4)
}

/// Samples the scene SDF on a 2D grid: the operator input channel `l(x)`.
pub fn rasterize_l(scene: &Scene, domain: &Domain, shape: &[usize]) -> Result<ValueGrid, GridError> {
    if domain.ndim() != 2 {
        return Err(GridError::DimensionMismatch { expected: 2, got: domain.ndim() });
    }
    ValueGrid::from_fn(domain.clone(), shape.to_vec(), |x| scene.sdf(Vec2::new(x[0], x[1])))
}
