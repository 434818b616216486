//! System models with closed-form Hamiltonians.
//!
//! Controls and disturbances enter every model affinely and are bounded by
//! boxes, so `max_u min_d p·f(x, u, d)` splits termwise into absolute values.
//! The control maximizes (avoids the unsafe set), the disturbance minimizes.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{convex_hull, minkowski_sum, polygon_sdf, GeometryError, Scene, SmoothShape, Vec2};
use crate::grid::{axis_coordinates, Domain, GridError, ValueGrid};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DynamicsError {
    #[error("{what} = {value} violates bound {bound}")]
    OutOfBounds { what: &'static str, value: f64, bound: f64 },
    #[error("{what}: expected length {expected}, got {got}")]
    Dimension { what: &'static str, expected: usize, got: usize },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Grid(#[from] GridError),
}

/// Pursuit-evasion in the evader's frame: `x = (x1, x2, x3)` with `x3` the
/// relative heading (periodic). Evader turn rate `u_a` is the control, the
/// pursuer's `u_b` the disturbance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Air3D {
    pub v_a: f64,
    pub v_b: f64,
    pub u_max_a: f64,
    pub u_max_b: f64,
}

impl Default for Air3D {
    /// Classical collision-avoidance benchmark constants.
    fn default() -> Self {
        Self { v_a: 5.0, v_b: 5.0, u_max_a: 1.0, u_max_b: 1.0 }
    }
}

impl Air3D {
    pub const CAPTURE_RADIUS: f64 = 5.0;

    pub fn default_domain(resolution: usize, heading_samples: usize) -> (Domain, Vec<usize>) {
        let d = Domain::new(vec![-6.0, -10.0, 0.0], vec![20.0, 10.0, std::f64::consts::TAU], vec![false, false, true])
            .expect("static domain");
        (d, vec![resolution, resolution, heading_samples])
    }
}

/// Dynamic Dubins car `x = (x1, x2, v, θ)` with acceleration and curvature
/// control and additive positional disturbance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Dubins4D {
    pub u1_max: f64,
    pub u2_max: f64,
    pub d1_max: f64,
    pub d2_max: f64,
    pub v_range: (f64, f64),
}

impl Default for Dubins4D {
    fn default() -> Self {
        Self { u1_max: 1.0, u2_max: 1.0, d1_max: 0.3, d2_max: 0.3, v_range: (0.0, 3.0) }
    }
}

impl Dubins4D {
    pub const SPATIAL_HALF_WIDTH: f64 = 5.0;

    /// `[-5, 5]^2 × v_range × [0, 2π)`.
    pub fn domain(&self) -> Domain {
        let w = Self::SPATIAL_HALF_WIDTH;
        Domain::new(
            vec![-w, -w, self.v_range.0, 0.0],
            vec![w, w, self.v_range.1, std::f64::consts::TAU],
            vec![false, false, false, true],
        )
        .expect("static domain")
    }

    fn v_abs_max(&self) -> f64 {
        self.v_range.0.abs().max(self.v_range.1.abs())
    }
}

/// `ẋ = c + u + d` with `|u_i| <= control_max`, `|d_i| <= disturbance_max`.
/// With both bounds zero this is pure constant-velocity translation, whose
/// value function has a closed-form trajectory oracle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Translation {
    pub velocity: Vec<f64>,
    #[serde(default)]
    pub control_max: f64,
    #[serde(default)]
    pub disturbance_max: f64,
}

impl Translation {
    pub fn constant(velocity: Vec<f64>) -> Self {
        Self { velocity, control_max: 0.0, disturbance_max: 0.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "system", rename_all = "snake_case")]
pub enum Dynamics {
    Air3D(Air3D),
    Dubins4D(Dubins4D),
    Translation(Translation),
}

fn check_len(what: &'static str, v: &[f64], n: usize) -> Result<(), DynamicsError> {
    if v.len() == n {
        Ok(())
    } else {
        Err(DynamicsError::Dimension { what, expected: n, got: v.len() })
    }
}

fn check_bound(what: &'static str, v: f64, bound: f64) -> Result<(), DynamicsError> {
    if v.abs() <= bound + 1e-12 {
        Ok(())
    } else {
        Err(DynamicsError::OutOfBounds { what, value: v, bound })
    }
}

impl Dynamics {
    pub fn state_dim(&self) -> usize {
        match self {
            Dynamics::Air3D(_) => 3,
            Dynamics::Dubins4D(_) => 4,
            Dynamics::Translation(t) => t.velocity.len(),
        }
    }

    pub fn control_dim(&self) -> usize {
        match self {
            Dynamics::Air3D(_) => 1,
            Dynamics::Dubins4D(_) => 2,
            Dynamics::Translation(t) => t.velocity.len(),
        }
    }

    pub fn disturbance_dim(&self) -> usize {
        match self {
            Dynamics::Air3D(_) => 1,
            Dynamics::Dubins4D(_) => 2,
            Dynamics::Translation(t) => t.velocity.len(),
        }
    }

    /// Per-component bounds of the control box.
    pub fn control_bounds(&self) -> Vec<f64> {
        match self {
            Dynamics::Air3D(s) => vec![s.u_max_a],
            Dynamics::Dubins4D(s) => vec![s.u1_max, s.u2_max],
            Dynamics::Translation(t) => vec![t.control_max; t.velocity.len()],
        }
    }

    pub fn disturbance_bounds(&self) -> Vec<f64> {
        match self {
            Dynamics::Air3D(s) => vec![s.u_max_b],
            Dynamics::Dubins4D(s) => vec![s.d1_max, s.d2_max],
            Dynamics::Translation(t) => vec![t.disturbance_max; t.velocity.len()],
        }
    }

    /// `ẋ = f(x, u, d)`.
    pub fn flow(&self, x: &[f64], u: &[f64], d: &[f64]) -> Result<Vec<f64>, DynamicsError> {
        check_len("state", x, self.state_dim())?;
        check_len("control", u, self.control_dim())?;
        check_len("disturbance", d, self.disturbance_dim())?;
        for (&ui, b) in u.iter().zip(self.control_bounds()) {
            check_bound("control", ui, b)?;
        }
        for (&di, b) in d.iter().zip(self.disturbance_bounds()) {
            check_bound("disturbance", di, b)?;
        }
        Ok(match self {
            Dynamics::Air3D(s) => {
                let (ua, ub) = (u[0], d[0]);
                vec![-s.v_a + s.v_b * x[2].cos() + ua * x[1], s.v_b * x[2].sin() - ua * x[0], ub - ua]
            }
            Dynamics::Dubins4D(_) => {
                let (v, th) = (x[2], x[3]);
                vec![v * th.cos() + d[0], v * th.sin() + d[1], u[0], v * u[1]]
            }
            Dynamics::Translation(t) => t.velocity.iter().zip(u).zip(d).map(|((c, u), d)| c + u + d).collect(),
        })
    }

    /// `H(x, p) = max_u min_d p·f(x, u, d)`.
    pub fn hamiltonian(&self, x: &[f64], p: &[f64]) -> f64 {
        match self {
            Dynamics::Air3D(s) => {
                let (sin3, cos3) = x[2].sin_cos();
                p[0] * (-s.v_a + s.v_b * cos3)
                    + p[1] * s.v_b * sin3
                    + s.u_max_a * (p[0] * x[1] - p[1] * x[0] - p[2]).abs()
                    - s.u_max_b * p[2].abs()
            }
            Dynamics::Dubins4D(s) => {
                let (v, th) = (x[2], x[3]);
                let (sin, cos) = th.sin_cos();
                dubins_hamiltonian(s, v, cos, sin, p)
            }
            Dynamics::Translation(t) => {
                let gain = t.control_max - t.disturbance_max;
                t.velocity.iter().zip(p).map(|(c, p)| c * p + gain * p.abs()).sum()
            }
        }
    }

    /// Lax-Friedrichs coefficients `α_i >= max |∂H/∂p_i|` over the domain.
    pub fn dissipation_bounds(&self, domain: &Domain) -> Vec<f64> {
        let amax = |a: usize| domain.lo[a].abs().max(domain.hi[a].abs());
        match self {
            Dynamics::Air3D(s) => {
                vec![s.v_a + s.v_b + s.u_max_a * amax(1), s.v_b + s.u_max_a * amax(0), s.u_max_a + s.u_max_b]
            }
            Dynamics::Dubins4D(s) => {
                let v = s.v_abs_max().max(amax(2));
                vec![v + s.d1_max, v + s.d2_max, s.u1_max, s.u2_max * v]
            }
            Dynamics::Translation(t) => {
                t.velocity.iter().map(|c| c.abs() + t.control_max + t.disturbance_max).collect()
            }
        }
    }
}

#[inline]
pub(crate) fn dubins_hamiltonian(s: &Dubins4D, v: f64, cos: f64, sin: f64, p: &[f64]) -> f64 {
    p[0] * v * cos + p[1] * v * sin + s.u1_max * p[2].abs() + s.u2_max * (v * p[3]).abs()
        - s.d1_max * p[0].abs()
        - s.d2_max * p[1].abs()
}

/// Minimum of `l` along the exact trajectory `x0 + cτ`, sampled every `dt` up
/// to `horizon` (the endpoint is always included).
pub fn rollout_min_l(spec: &Translation, scene: &Scene, x0: Vec2, horizon: f64, dt: f64) -> f64 {
    assert!(dt > 0.0 && horizon >= 0.0, "rollout needs dt > 0 and horizon >= 0");
    let c = Vec2::new(spec.velocity[0], spec.velocity[1]);
    let steps = (horizon / dt).ceil() as usize;
    (0..=steps).map(|k| scene.sdf(x0 + c * (k as f64 * dt).min(horizon))).fold(f64::INFINITY, f64::min)
}

/// Capture set of the Air3D game.
#[derive(Debug, Clone, PartialEq)]
pub enum Air3DCapture {
    /// Collision when the agents are within this distance.
    Radius(f64),
    /// Evader fixed at the origin with heading 0; pursuer rotated by `x3` and
    /// translated by `(x1, x2)`.
    Shapes { evader: SmoothShape, pursuer: SmoothShape },
}

impl Air3DCapture {
    /// Signed separation `l(x1, x2, x3)` sampled on a 3D grid.
    ///
    /// For convex shapes the separation of `A` and `R(x3)B + t` equals the
    /// signed distance from `t` to the Minkowski sum `A ⊕ (-R(x3)B)`: the
    /// minimum boundary distance when apart, minus the penetration depth when
    /// overlapping.
    pub fn field(&self, domain: &Domain, shape: &[usize]) -> Result<ValueGrid, DynamicsError> {
        match self {
            Air3DCapture::Radius(d) => {
                Ok(ValueGrid::from_fn(domain.clone(), shape.to_vec(), |x| x[0].hypot(x[1]) - d)?)
            }
            Air3DCapture::Shapes { evader, pursuer } => {
                let coords = axis_coordinates(domain, shape);
                let a = convex_hull(&evader.boundary)?;
                let (n0, n1, n2) = (shape[0], shape[1], shape[2]);
                let mut values = vec![0.0; n0 * n1 * n2];
                for (k, &theta) in coords[2].iter().enumerate() {
                    let reflected: Vec<Vec2> = pursuer.boundary.iter().map(|&p| -p.rotate(theta)).collect();
                    let m = minkowski_sum(&a, &convex_hull(&reflected)?)?;
                    for (i, &x1) in coords[0].iter().enumerate() {
                        for (j, &x2) in coords[1].iter().enumerate() {
                            values[(i * n1 + j) * n2 + k] = polygon_sdf(Vec2::new(x1, x2), &m);
                        }
                    }
                }
                Ok(ValueGrid::new(domain.clone(), shape.to_vec(), values)?)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{random_smooth_shape, segment_distance, Primitive};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{FRAC_PI_2, PI, TAU};

    fn dubins() -> Dynamics {
        Dynamics::Dubins4D(Dubins4D::default())
    }

    fn air() -> Dynamics {
        Dynamics::Air3D(Air3D::default())
    }

    fn random_state(rng: &mut ChaCha8Rng, dyn_: &Dynamics) -> Vec<f64> {
        match dyn_ {
            Dynamics::Air3D(_) => vec![rng.gen_range(-6.0..20.0), rng.gen_range(-10.0..10.0), rng.gen_range(0.0..TAU)],
            Dynamics::Dubins4D(_) => {
                vec![
                    rng.gen_range(-5.0..5.0),
                    rng.gen_range(-5.0..5.0),
                    rng.gen_range(0.0..3.0),
                    rng.gen_range(0.0..TAU),
                ]
            }
            Dynamics::Translation(t) => (0..t.velocity.len()).map(|_| rng.gen_range(-1.0..1.0)).collect(),
        }
    }

    fn random_in_box(rng: &mut ChaCha8Rng, b: &[f64]) -> Vec<f64> {
        b.iter().map(|&b| if b > 0.0 { rng.gen_range(-b..=b) } else { 0.0 }).collect()
    }

    #[test]
    fn flow_examples() {
        let f = air().flow(&[3.0, -2.0, 0.0], &[0.0], &[0.0]).unwrap();
        assert_eq!(f, vec![0.0, 0.0, 0.0]);
        let f = dubins().flow(&[1.0, 1.0, 2.0, FRAC_PI_2], &[0.0, 0.0], &[0.0, 0.0]).unwrap();
        assert!(f[0].abs() < 1e-15 && (f[1] - 2.0).abs() < 1e-15 && f[2] == 0.0 && f[3] == 0.0);
    }

    #[test]
    fn flow_term_by_term() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let s = Air3D { v_a: 4.0, v_b: 3.0, u_max_a: 1.5, u_max_b: 0.5 };
        for _ in 0..100 {
            let x: Vec<f64> = (0..3).map(|_| rng.gen_range(-5.0..5.0)).collect();
            let (ua, ub) = (rng.gen_range(-1.5..1.5), rng.gen_range(-0.5..0.5));
            let f = Dynamics::Air3D(s).flow(&x, &[ua], &[ub]).unwrap();
            let e0 = -4.0 + 3.0 * x[2].cos() + ua * x[1];
            let e1 = 3.0 * x[2].sin() - ua * x[0];
            assert!((f[0] - e0).abs() < 1e-12 && (f[1] - e1).abs() < 1e-12 && (f[2] - (ub - ua)).abs() < 1e-12);
        }
        let s = Dubins4D { u1_max: 2.0, u2_max: 0.5, d1_max: 0.1, d2_max: 0.2, v_range: (0.0, 4.0) };
        for _ in 0..100 {
            let x =
                [rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0), rng.gen_range(0.0..4.0), rng.gen_range(0.0..7.0)];
            let u = [rng.gen_range(-2.0..2.0), rng.gen_range(-0.5..0.5)];
            let d = [rng.gen_range(-0.1..0.1), rng.gen_range(-0.2..0.2)];
            let f = Dynamics::Dubins4D(s).flow(&x, &u, &d).unwrap();
            let e = [x[2] * x[3].cos() + d[0], x[2] * x[3].sin() + d[1], u[0], x[2] * u[1]];
            for i in 0..4 {
                assert!((f[i] - e[i]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn flow_rejects_out_of_bounds_inputs() {
        assert!(matches!(air().flow(&[0.0; 3], &[1.5], &[0.0]), Err(DynamicsError::OutOfBounds { .. })));
        assert!(matches!(dubins().flow(&[0.0; 4], &[0.0, 0.0], &[0.0, 0.5]), Err(DynamicsError::OutOfBounds { .. })));
        assert!(matches!(dubins().flow(&[0.0; 3], &[0.0, 0.0], &[0.0, 0.0]), Err(DynamicsError::Dimension { .. })));
    }

    #[test]
    fn hamiltonian_examples() {
        for d in [air(), dubins(), Dynamics::Translation(Translation::constant(vec![1.0, -2.0]))] {
            let x = vec![0.3; d.state_dim()];
            assert_eq!(d.hamiltonian(&x, &vec![0.0; d.state_dim()]), 0.0);
        }
        let x2 = 3.7;
        let h = air().hamiltonian(&[1.0, x2, 0.0], &[1.0, 0.0, 0.0]);
        assert!((h - x2.abs()).abs() < 1e-12);
    }

    /// Discretized max over the control box of the min over the disturbance box.
    fn brute_max_min(dyn_: &Dynamics, x: &[f64], p: &[f64], per_axis: usize) -> f64 {
        let grid = |b: &[f64]| -> Vec<Vec<f64>> {
            let axis = |bound: f64| -> Vec<f64> {
                (0..per_axis).map(|k| -bound + 2.0 * bound * k as f64 / (per_axis - 1) as f64).collect()
            };
            let mut out = vec![vec![]];
            for &bi in b {
                out = out
                    .into_iter()
                    .flat_map(|prefix| {
                        axis(bi).into_iter().map(move |v| {
                            let mut q = prefix.clone();
                            q.push(v);
                            q
                        })
                    })
                    .collect();
            }
            out
        };
        let us = grid(&dyn_.control_bounds());
        let ds = grid(&dyn_.disturbance_bounds());
        us.iter()
            .map(|u| {
                ds.iter()
                    .map(|d| {
                        let f = dyn_.flow(x, u, d).unwrap();
                        f.iter().zip(p).map(|(a, b)| a * b).sum::<f64>()
                    })
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(f64::NEG_INFINITY, f64::max)
    }

    #[test]
    fn hamiltonian_matches_discretized_max_min() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        // 201 x 201 for the scalar-input Air3D game; the two-input systems use a
        // 21 x 21 grid per box, which still contains every box vertex.
        for (d, per_axis) in [(air(), 201), (dubins(), 21)] {
            for _ in 0..30 {
                let x = random_state(&mut rng, &d);
                let p: Vec<f64> = (0..d.state_dim()).map(|_| rng.gen_range(-2.0..2.0)).collect();
                let h = d.hamiltonian(&x, &p);
                assert!((h - brute_max_min(&d, &x, &p, per_axis)).abs() < 1e-3);
            }
        }
        let t =
            Dynamics::Translation(Translation { velocity: vec![0.5, -1.0], control_max: 1.0, disturbance_max: 0.4 });
        for _ in 0..30 {
            let p = [rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)];
            assert!((t.hamiltonian(&[0.0, 0.0], &p) - brute_max_min(&t, &[0.0, 0.0], &p, 21)).abs() < 1e-9);
        }
    }

    #[test]
    fn hamiltonian_positively_homogeneous() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for d in [air(), dubins()] {
            for _ in 0..100 {
                let x = random_state(&mut rng, &d);
                let p: Vec<f64> = (0..d.state_dim()).map(|_| rng.gen_range(-2.0..2.0)).collect();
                let lam = rng.gen_range(0.0..5.0);
                let scaled: Vec<f64> = p.iter().map(|v| v * lam).collect();
                let (a, b) = (d.hamiltonian(&x, &scaled), lam * d.hamiltonian(&x, &p));
                assert!((a - b).abs() < 1e-9 * (1.0 + b.abs()));
            }
        }
    }

    #[test]
    fn saddle_inequalities() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for d in [air(), dubins()] {
            for _ in 0..200 {
                let x = random_state(&mut rng, &d);
                let p: Vec<f64> = (0..d.state_dim()).map(|_| rng.gen_range(-2.0..2.0)).collect();
                let h = d.hamiltonian(&x, &p);
                // the optimal control is bang-bang per component; find it by vertex search
                let ub = d.control_bounds();
                let db = d.disturbance_bounds();
                let verts = |b: &[f64]| -> Vec<Vec<f64>> {
                    (0..1 << b.len())
                        .map(|m| b.iter().enumerate().map(|(i, &v)| if m >> i & 1 == 1 { v } else { -v }).collect())
                        .collect()
                };
                let dot = |u: &[f64], dd: &[f64]| -> f64 {
                    d.flow(&x, u, dd).unwrap().iter().zip(&p).map(|(a, b)| a * b).sum()
                };
                let u_star = verts(&ub)
                    .into_iter()
                    .max_by(|a, b| {
                        let fa = verts(&db).iter().map(|dd| dot(a, dd)).fold(f64::INFINITY, f64::min);
                        let fb = verts(&db).iter().map(|dd| dot(b, dd)).fold(f64::INFINITY, f64::min);
                        fa.total_cmp(&fb)
                    })
                    .unwrap();
                let d_star = verts(&db)
                    .into_iter()
                    .min_by(|a, b| {
                        let fa = verts(&ub).iter().map(|u| dot(u, a)).fold(f64::NEG_INFINITY, f64::max);
                        let fb = verts(&ub).iter().map(|u| dot(u, b)).fold(f64::NEG_INFINITY, f64::max);
                        fa.total_cmp(&fb)
                    })
                    .unwrap();
                let any_d = random_in_box(&mut rng, &db);
                let any_u = random_in_box(&mut rng, &ub);
                assert!(dot(&u_star, &any_d) >= h - 1e-9);
                assert!(dot(&any_u, &d_star) <= h + 1e-9);
            }
        }
    }

    #[test]
    fn dissipation_examples() {
        let d = Domain::boxed(&[0.0, 0.0], &[1.0, 1.0]).unwrap();
        assert_eq!(
            Dynamics::Translation(Translation::constant(vec![1.0, -2.0])).dissipation_bounds(&d),
            vec![1.0, 2.0]
        );
        let d = Domain::new(vec![-10.0, -10.0, 0.0], vec![10.0, 10.0, 2.0 * PI], vec![false, false, true]).unwrap();
        assert_eq!(air().dissipation_bounds(&d), vec![20.0, 15.0, 2.0]);
    }

    #[test]
    fn dissipation_dominates_flow_samples() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let (adom, _) = Air3D::default_domain(8, 8);
        let specs = [
            (Dynamics::Air3D(Air3D { v_a: 3.0, v_b: 4.0, u_max_a: 0.7, u_max_b: 1.2 }), adom),
            (
                Dynamics::Dubins4D(Dubins4D {
                    u1_max: 1.3,
                    u2_max: 0.8,
                    d1_max: 0.2,
                    d2_max: 0.4,
                    v_range: (0.0, 2.5),
                }),
                Dubins4D::default().domain(),
            ),
        ];
        for (d, dom) in &specs {
            let dom = if let Dynamics::Dubins4D(s) = d { s.domain() } else { dom.clone() };
            let alpha = d.dissipation_bounds(&dom);
            for _ in 0..100_000 {
                let x: Vec<f64> = (0..dom.ndim()).map(|a| rng.gen_range(dom.lo[a]..=dom.hi[a])).collect();
                let u = random_in_box(&mut rng, &d.control_bounds());
                let w = random_in_box(&mut rng, &d.disturbance_bounds());
                let f = d.flow(&x, &u, &w).unwrap();
                for (fi, ai) in f.iter().zip(&alpha) {
                    assert!(fi.abs() <= ai + 1e-12);
                }
            }
            // finite differences of H in p
            for _ in 0..1000 {
                let x: Vec<f64> = (0..dom.ndim()).map(|a| rng.gen_range(dom.lo[a]..=dom.hi[a])).collect();
                let p: Vec<f64> = (0..dom.ndim()).map(|_| rng.gen_range(-1.0..1.0)).collect();
                for i in 0..dom.ndim() {
                    let mut q = p.clone();
                    q[i] += 1e-6;
                    let slope = (d.hamiltonian(&x, &q) - d.hamiltonian(&x, &p)) / 1e-6;
                    assert!(slope.abs() <= alpha[i] + 1e-4);
                }
            }
        }
    }

    #[test]
    fn rollout_examples() {
        let scene = Scene::single(Primitive::Disc { center: Vec2::new(3.0, 0.0), radius: 1.0 }).unwrap();
        let x0 = Vec2::new(-1.0, 0.5);
        let still = Translation::constant(vec![0.0, 0.0]);
        assert_eq!(rollout_min_l(&still, &scene, x0, 5.0, 0.1), scene.sdf(x0));
        let away = Translation::constant(vec![-1.0, 0.0]);
        assert_eq!(rollout_min_l(&away, &scene, x0, 5.0, 0.1), scene.sdf(x0));
        let toward = Translation::constant(vec![1.0, 0.0]);
        let v = rollout_min_l(&toward, &scene, Vec2::new(-1.0, 0.0), 10.0, 0.1);
        assert!((v + 1.0).abs() <= 0.1);
    }

    #[test]
    fn shaped_capture_matches_vertex_edge_oracle() {
        let e = random_smooth_shape(1, 8, 1.0, 2.0).unwrap();
        let p = random_smooth_shape(2, 8, 1.0, 2.0).unwrap();
        let (dom, _) = Air3D::default_domain(8, 8);
        let shape = [14, 11, 6];
        let field = Air3DCapture::Shapes { evader: e.clone(), pursuer: p.clone() }.field(&dom, &shape).unwrap();
        let mut checked = 0;
        for lin in 0..field.len() {
            let idx = field.multi_index(lin);
            let x = field.coordinates(&idx).unwrap();
            let t = Vec2::new(x[0], x[1]);
            let b: Vec<Vec2> = p.boundary.iter().map(|q| q.rotate(x[2]) + t).collect();
            let a = &e.boundary;
            let l = field.values[lin];
            if l > 0.05 {
                // separated: exact polygon distance from vertex-to-edge pairs
                let n = a.len();
                let m = b.len();
                let mut best = f64::INFINITY;
                for i in 0..n {
                    for j in 0..m {
                        best = best.min(segment_distance(a[i], b[j], b[(j + 1) % m]));
                        best = best.min(segment_distance(b[j], a[i], a[(i + 1) % n]));
                    }
                }
                assert!((l - best).abs() < 1e-6, "l = {l}, oracle = {best}");
                checked += 1;
            } else if l < -0.05 {
                // overlapping: some vertex of one shape lies inside the other
                let overlap = b.iter().any(|&q| crate::geometry::point_in_polygon(q, a))
                    || a.iter().any(|&q| crate::geometry::point_in_polygon(q, &b));
                assert!(overlap);
            }
        }
        assert!(checked > 100);
    }

    #[test]
    fn radius_capture_is_distance_minus_radius() {
        let (dom, shape) = Air3D::default_domain(9, 4);
        let f = Air3DCapture::Radius(5.0).field(&dom, &shape).unwrap();
        let idx = [3, 4, 1];
        let x = f.coordinates(&idx).unwrap();
        assert!((f.get(&idx).unwrap() - (x[0].hypot(x[1]) - 5.0)).abs() < 1e-12);
    }
}
