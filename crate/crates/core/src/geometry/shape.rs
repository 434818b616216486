use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{closed_cubic_bspline, convex_hull, GeometryError, Vec2, BSPLINE_SAMPLES};

pub const DEFAULT_N_ANGLES: usize = 12;
const MAX_ATTEMPTS: usize = 16;

/// A convex smooth obstacle: convex control polygon plus its densely sampled
/// closed cubic B-spline boundary (counter-clockwise, centred on the origin).
#[derive(Debug, Clone, PartialEq)]
pub struct SmoothShape {
    pub control_points: Vec<Vec2>,
    pub boundary: Vec<Vec2>,
}

impl SmoothShape {
    /// Hulls the control points and evaluates the spline.
    pub fn from_control_points(points: &[Vec2]) -> Result<Self, GeometryError> {
        let control_points = convex_hull(points)?;
        let boundary = closed_cubic_bspline(&control_points, BSPLINE_SAMPLES);
        Ok(Self { control_points, boundary })
    }

    /// Control points at radii `radii[k]` and angles `2πk/n`.
    pub fn from_radii(radii: &[f64]) -> Result<Self, GeometryError> {
        let n = radii.len();
        let pts: Vec<Vec2> =
            radii.iter().enumerate().map(|(k, &r)| Vec2::polar(r, TAU * k as f64 / n as f64)).collect();
        Self::from_control_points(&pts)
    }

    /// Largest distance from the origin to the boundary.
    pub fn max_radius(&self) -> f64 {
        self.boundary.iter().map(|p| p.norm()).fold(0.0, f64::max)
    }
}

/// Random radii at evenly spaced angles, convex hull, then a closed cubic
/// B-spline through the hull vertices as control points.
pub fn random_smooth_shape(
    rng_seed: u64,
    n_angles: usize,
    r_min: f64,
    r_max: f64,
) -> Result<SmoothShape, GeometryError> {
    if n_angles < 4 {
        return Err(GeometryError::InvalidParameters(format!("n_angles = {n_angles} < 4")));
    }
    if !(r_min > 0.0 && r_min < r_max) {
        return Err(GeometryError::InvalidParameters(format!("need 0 < r_min < r_max, got {r_min}, {r_max}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    for _ in 0..MAX_ATTEMPTS {
        let radii: Vec<f64> = (0..n_angles).map(|_| rng.gen_range(r_min..=r_max)).collect();
        match SmoothShape::from_radii(&radii) {
            Ok(s) => return Ok(s),
            Err(GeometryError::Collinear) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(GeometryError::DegenerateHull(MAX_ATTEMPTS))
}
