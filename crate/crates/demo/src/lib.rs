//! WebAssembly bindings for the browser demo in `www/`.
//!
//! Three operations: draw a generated obstacle field, solve the Dubins
//! avoid tube for it and browse `(v, θ)` slices, and solve the closed-form
//! translation tube of a disc under constant drift.

use reachop::data::{build_instance, ExperimentKind, ExperimentSpec, Instance};
use reachop::dynamics::{Dynamics, Translation};
use reachop::geometry::{rasterize_l, Primitive, Scene, Vec2};
use reachop::grid::{Domain, ValueGrid};
use reachop::hji::{solve, SolverConfig};
use reachop::render::marching_squares;
use wasm_bindgen::prelude::*;

const MAX_RESOLUTION: usize = 64;

/// A 2D slice ready for drawing. `values` is row-major with `x1` as the
/// slow axis; contours are flat `[x0, y0, x1, y1, ...]` segment lists in
/// world coordinates.
#[wasm_bindgen]
pub struct Field {
    n1: usize,
    n2: usize,
    bounds: Vec<f64>,
    values: Vec<f64>,
    contour: Vec<f64>,
    outline: Vec<f64>,
}

#[wasm_bindgen]
impl Field {
    #[wasm_bindgen(getter)]
    pub fn n1(&self) -> usize {
        self.n1
    }

    #[wasm_bindgen(getter)]
    pub fn n2(&self) -> usize {
        self.n2
    }

    /// `[x1_lo, x1_hi, x2_lo, x2_hi]`.
    #[wasm_bindgen(getter)]
    pub fn bounds(&self) -> Vec<f64> {
        self.bounds.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn values(&self) -> Vec<f64> {
        self.values.clone()
    }

    /// Zero level of `values`.
    #[wasm_bindgen(getter)]
    pub fn contour(&self) -> Vec<f64> {
        self.contour.clone()
    }

    /// Zero level of the obstacle function `l`; equal to `contour` for
    /// obstacle fields.
    #[wasm_bindgen(getter)]
    pub fn outline(&self) -> Vec<f64> {
        self.outline.clone()
    }
}

fn flat(grid: &ValueGrid) -> Vec<f64> {
    marching_squares(grid, 0.0).into_iter().flat_map(|(a, b)| [a.x, a.y, b.x, b.y]).collect()
}

fn field(values: &ValueGrid, l: &ValueGrid) -> Field {
    let d = &values.domain;
    Field {
        n1: values.shape[0],
        n2: values.shape[1],
        bounds: vec![d.lo[0], d.hi[0], d.lo[1], d.hi[1]],
        values: values.values.clone(),
        contour: flat(values),
        outline: flat(l),
    }
}

fn kind(name: &str) -> Result<ExperimentKind, String> {
    let k: ExperimentKind = name.parse()?;
    match k {
        ExperimentKind::Air3d | ExperimentKind::Parametric => Err(format!("{name} is not available in the demo")),
        _ => Ok(k),
    }
}

fn check_resolution(resolution: usize) -> Result<(), String> {
    if (8..=MAX_RESOLUTION).contains(&resolution) {
        Ok(())
    } else {
        Err(format!("resolution must be in 8..={MAX_RESOLUTION}, got {resolution}"))
    }
}

fn instance(experiment: &str, seed: u32, resolution: usize) -> Result<(ExperimentSpec, Instance), String> {
    check_resolution(resolution)?;
    let spec = ExperimentSpec { resolution, ..ExperimentSpec::desk(kind(experiment)?) };
    let inst = build_instance(&spec, seed as u64, &[], resolution).map_err(|e| e.to_string())?;
    Ok((spec, inst))
}

fn slice_at(grid: &ValueGrid, speed: usize, heading: usize) -> Result<ValueGrid, String> {
    grid.slice(&[(2, speed), (3, heading)]).map_err(|e| e.to_string())
}

fn obstacle_field(experiment: &str, seed: u32, resolution: usize, speed: usize) -> Result<Field, String> {
    let (_, inst) = instance(experiment, seed, resolution)?;
    let l = slice_at(&inst.l, speed, 0)?;
    Ok(field(&l, &l))
}

fn drift_field(vx: f64, vy: f64, radius: f64, resolution: usize) -> Result<Field, String> {
    check_resolution(resolution)?;
    if !(radius > 0.0 && radius < 3.0) || !vx.is_finite() || !vy.is_finite() {
        return Err(format!("need 0 < radius < 3 and finite drift, got r = {radius}, c = ({vx}, {vy})"));
    }
    let scene = Scene::single(Primitive::Disc { center: Vec2::new(0.0, 0.0), radius }).map_err(|e| e.to_string())?;
    let dom = Domain::boxed(&[-4.0, -4.0], &[4.0, 4.0]).map_err(|e| e.to_string())?;
    let l = rasterize_l(&scene, &dom, &[resolution, resolution]).map_err(|e| e.to_string())?;
    let dynamics = Dynamics::Translation(Translation::constant(vec![vx, vy]));
    let res = solve(&l, &dynamics, &SolverConfig::default()).map_err(|e| e.to_string())?;
    Ok(field(&res.v_inf, &l))
}

/// Obstacle function `l` of a generated instance, sliced at speed index
/// `speed` (only the velocity family depends on it).
#[wasm_bindgen]
pub fn obstacle(experiment: &str, seed: u32, resolution: usize, speed: usize) -> Result<Field, JsError> {
    obstacle_field(experiment, seed, resolution, speed).map_err(|e| JsError::new(&e))
}

/// Converged avoid tube of a disc of `radius` at the origin under drift
/// `(vx, vy)` on `[-4, 4]²`.
#[wasm_bindgen]
pub fn drift_tube(vx: f64, vy: f64, radius: f64, resolution: usize) -> Result<Field, JsError> {
    drift_field(vx, vy, radius, resolution).map_err(|e| JsError::new(&e))
}

/// A solved Dubins tube over `(x1, x2, v, θ)`.
#[wasm_bindgen]
pub struct Tube {
    l: ValueGrid,
    v: ValueGrid,
    iterations: usize,
    converged: bool,
}

impl Tube {
    fn solve(experiment: &str, seed: u32, resolution: usize) -> Result<Tube, String> {
        let (spec, inst) = instance(experiment, seed, resolution)?;
        let res = solve(&inst.l, &inst.dynamics, &spec.solver).map_err(|e| e.to_string())?;
        Ok(Tube { l: inst.l, v: res.v_inf, iterations: res.iterations, converged: res.converged })
    }

    fn slice_field(&self, speed: usize, heading: usize) -> Result<Field, String> {
        Ok(field(&slice_at(&self.v, speed, heading)?, &slice_at(&self.l, speed, heading)?))
    }
}

#[wasm_bindgen]
impl Tube {
    #[wasm_bindgen(constructor)]
    pub fn new(experiment: &str, seed: u32, resolution: usize) -> Result<Tube, JsError> {
        Tube::solve(experiment, seed, resolution).map_err(|e| JsError::new(&e))
    }

    #[wasm_bindgen(getter)]
    pub fn speeds(&self) -> usize {
        self.v.shape[2]
    }

    #[wasm_bindgen(getter)]
    pub fn headings(&self) -> usize {
        self.v.shape[3]
    }

    #[wasm_bindgen(getter)]
    pub fn iterations(&self) -> usize {
        self.iterations
    }

    #[wasm_bindgen(getter)]
    pub fn converged(&self) -> bool {
        self.converged
    }

    /// Speed in state units at index `i`.
    pub fn speed(&self, i: usize) -> f64 {
        self.v.axis_coords(2).get(i).copied().unwrap_or(f64::NAN)
    }

    /// Heading in radians at index `i`.
    pub fn heading(&self, i: usize) -> f64 {
        self.v.axis_coords(3).get(i).copied().unwrap_or(f64::NAN)
    }

    pub fn slice(&self, speed: usize, heading: usize) -> Result<Field, JsError> {
        self.slice_field(speed, heading).map_err(|e| JsError::new(&e))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn obstacle_outline_matches_contour() {
        let f = obstacle_field("single_obstacle", 3, 24, 0).unwrap();
        assert_eq!((f.n1, f.n2), (24, 24));
        assert_eq!(f.values.len(), 576);
        assert!(!f.contour.is_empty() && f.contour.len().is_multiple_of(4));
        assert_eq!(f.contour, f.outline);
        assert!(f.values.iter().any(|&v| v < 0.0) && f.values.iter().any(|&v| v > 0.0));
    }

    #[test]
    fn rejects_unsupported_requests() {
        assert!(obstacle_field("air3d", 0, 24, 0).is_err());
        assert!(obstacle_field("boats", 0, 24, 0).is_err());
        assert!(obstacle_field("indoor", 0, 4, 0).is_err());
        assert!(obstacle_field("single_obstacle", 0, 16, 99).is_err());
        assert!(drift_field(1.0, 0.0, -1.0, 32).is_err());
        assert!(drift_field(f64::NAN, 0.0, 1.0, 32).is_err());
    }

    #[test]
    fn drift_tube_grows_upstream() {
        let f = drift_field(1.0, 0.0, 1.0, 32).unwrap();
        let at = |x: f64, y: f64| {
            let h = 8.0 / 31.0;
            let (i, j) = (((x + 4.0) / h).round() as usize, ((y + 4.0) / h).round() as usize);
            f.values[i * 32 + j]
        };
        // drift carries (-2.5, 0) into the disc but (2.5, 0) away from it
        assert!(at(-2.5, 0.0) < 0.0);
        assert!(at(2.5, 0.0) > 0.0);
    }

    #[test]
    fn tube_slices_lie_below_obstacle() {
        let tube = Tube::solve("single_obstacle", 1, 16).unwrap();
        assert!(tube.converged);
        assert_eq!((tube.speeds(), tube.headings()), (7, 16));
        assert!((tube.speed(3) - 1.5).abs() < 1e-12);
        assert!(tube.speed(7).is_nan());
        for (s, h) in [(0, 0), (3, 5), (6, 15)] {
            let f = tube.slice_field(s, h).unwrap();
            let l = slice_at(&tube.l, s, h).unwrap();
            assert!(f.values.iter().zip(&l.values).all(|(v, l)| *v <= l + 1e-9));
        }
        // a moving car cannot stop, so the tube is strictly larger than the obstacle
        let fast = tube.slice_field(6, 0).unwrap();
        let l = slice_at(&tube.l, 6, 0).unwrap();
        let inside = |vals: &[f64]| vals.iter().filter(|&&v| v < 0.0).count();
        assert!(inside(&fast.values) > inside(&l.values));
    }
}
