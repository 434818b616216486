//! Experiment generators and the dataset container.
//!
//! Every sample is a 2D slice `(x1, x2)` of a solved instance. Input channels
//! are `[l, x1, x2, h...]` where `h` holds the fixed values of the sliced-away
//! state axes (and, for the parametric family, the control bounds); the
//! target is the converged value function on the same slice.

mod format;

use std::f64::consts::TAU;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use format::{decode_dataset, encode_dataset, read_dataset, write_dataset, DATASET_VERSION};

use crate::dynamics::{Air3D, Air3DCapture, Dubins4D, Dynamics, DynamicsError};
use crate::geometry::{
    gen_indoor_scene_with, random_smooth_shape, rasterize_l, GeometryError, IndoorConfig, RadiusGrowth, Scene, Vec2,
    VelocityRadiusLaw,
};
use crate::grid::{axis_coordinates, Domain, GridError, ValueGrid};
use crate::hji::{solve_observed, HjiError, SolverConfig};
use crate::nn::{Real, Tensor};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DataError {
    #[error("dataset file: {msg} at byte {offset}")]
    Format { msg: String, offset: usize },
    #[error("invalid sample: {0}")]
    Invalid(String),
    #[error("invalid experiment spec: {0}")]
    Spec(String),
    #[error("solve for seed {seed} did not converge after {iterations} iterations")]
    NotConverged { seed: u64, iterations: usize },
    #[error("io: {0}")]
    Io(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
    #[error(transparent)]
    Hji(#[from] HjiError),
    #[error(transparent)]
    Grid(#[from] GridError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    Air3d,
    SingleObstacle,
    TwoObstacles,
    Indoor,
    Velocity,
    Parametric,
}

/// Experiment id written by `solve` for raw solver output.
pub const SOLVE_ID: u8 = 6;
/// Experiment id written by `infer` for model predictions.
pub const PREDICTION_ID: u8 = 7;

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 6] = [
        ExperimentKind::Air3d,
        ExperimentKind::SingleObstacle,
        ExperimentKind::TwoObstacles,
        ExperimentKind::Indoor,
        ExperimentKind::Velocity,
        ExperimentKind::Parametric,
    ];

    pub fn id(self) -> u8 {
        self as u8
    }

    pub fn from_id(id: u8) -> Option<Self> {
        Self::ALL.get(id as usize).copied()
    }

    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::Air3d => "air3d",
            ExperimentKind::SingleObstacle => "single_obstacle",
            ExperimentKind::TwoObstacles => "two_obstacles",
            ExperimentKind::Indoor => "indoor",
            ExperimentKind::Velocity => "velocity",
            ExperimentKind::Parametric => "parametric",
        }
    }

    /// Length of `h` for this family.
    pub fn h_len(self) -> usize {
        match self {
            ExperimentKind::Air3d => 1,
            ExperimentKind::Parametric => 4,
            _ => 2,
        }
    }
}

impl std::str::FromStr for ExperimentKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| format!("unknown experiment {s:?}; expected one of {:?}", Self::ALL.map(|k| k.name())))
    }
}

/// Per-family sampling ranges. Each `(lo, hi)` is sampled uniformly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Ranges {
    /// Control-point count of random smooth shapes.
    pub n_angles: usize,
    /// Control-point radius for single and parametric obstacles.
    pub obstacle_radius: (f64, f64),
    /// Obstacle centre offset from the origin, per axis.
    pub center_jitter: f64,
    /// Control-point radius for each of the two obstacles.
    pub pair_radius: (f64, f64),
    /// Distance between the two obstacle centres.
    pub separation: (f64, f64),
    pub indoor: IndoorConfig,
    /// Velocity family: `r0`, `a` and `b` of the radius law.
    pub radius_r0: (f64, f64),
    pub radius_a: (f64, f64),
    pub radius_b: (f64, f64),
    /// Parametric family: range of both `u1_max` and `u2_max`.
    pub control_bound: (f64, f64),
    /// Air3D agent control-point radius.
    pub agent_radius: (f64, f64),
    /// Relative headings emitted per Air3D pair, snapped to grid nodes.
    pub headings: Vec<f64>,
}

impl Default for Ranges {
    fn default() -> Self {
        Self {
            n_angles: crate::geometry::DEFAULT_N_ANGLES,
            obstacle_radius: (0.8, 1.8),
            center_jitter: 1.5,
            pair_radius: (0.6, 1.2),
            separation: (2.2, 3.6),
            indoor: IndoorConfig::default(),
            radius_r0: (0.4, 1.0),
            radius_a: (0.1, 0.5),
            radius_b: (0.2, 1.0),
            control_bound: (0.5, 2.0),
            agent_radius: (1.5, 3.0),
            headings: vec![0.0, TAU / 4.0, TAU / 2.0, 3.0 * TAU / 4.0],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub kind: ExperimentKind,
    /// Solved instances per split. Each instance yields one sample per slice.
    pub n_train: usize,
    pub n_test: usize,
    /// Nodes per spatial axis.
    pub resolution: usize,
    pub seed: u64,
    /// `(v, θ)` slices harvested per Dubins solve.
    #[serde(default = "one")]
    pub slices_per_solve: usize,
    /// Dubins speed nodes.
    #[serde(default = "default_speed_samples")]
    pub speed_samples: usize,
    /// Heading nodes (Dubins `θ`, Air3D `x3`).
    #[serde(default = "default_heading_samples")]
    pub heading_samples: usize,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub ranges: Ranges,
}

fn one() -> usize {
    1
}

fn default_speed_samples() -> usize {
    7
}

fn default_heading_samples() -> usize {
    16
}

impl ExperimentSpec {
    /// Desk-scale defaults: resolution 32, 60 train / 20 test instances (the
    /// parametric family uses its 10×10 grid and 20 diagonal points).
    pub fn desk(kind: ExperimentKind) -> Self {
        let (n_train, n_test) = match kind {
            ExperimentKind::Parametric => (100, 20),
            _ => (60, 20),
        };
        Self {
            kind,
            n_train,
            n_test,
            resolution: 32,
            seed: 0,
            slices_per_solve: 1,
            speed_samples: default_speed_samples(),
            heading_samples: default_heading_samples(),
            solver: SolverConfig::default(),
            ranges: Ranges::default(),
        }
    }

    pub fn validate(&self) -> Result<(), DataError> {
        let bad = |m: String| Err(DataError::Spec(m));
        if self.n_train == 0 || self.n_test == 0 {
            return bad("n_train and n_test must be at least 1".into());
        }
        if self.resolution < 16 {
            return bad(format!("resolution {} < 16", self.resolution));
        }
        if !(1..=4).contains(&self.slices_per_solve) {
            return bad(format!("slices_per_solve {} outside 1..=4", self.slices_per_solve));
        }
        if self.speed_samples < 2 || self.heading_samples < 4 {
            return bad("need at least 2 speed and 4 heading samples".into());
        }
        if self.kind == ExperimentKind::Air3d && self.ranges.headings.is_empty() {
            return bad("air3d needs at least one heading".into());
        }
        let r = &self.ranges;
        for (name, (lo, hi)) in [
            ("obstacle_radius", r.obstacle_radius),
            ("pair_radius", r.pair_radius),
            ("separation", r.separation),
            ("radius_r0", r.radius_r0),
            ("radius_a", r.radius_a),
            ("radius_b", r.radius_b),
            ("control_bound", r.control_bound),
            ("agent_radius", r.agent_radius),
        ] {
            if !(lo > 0.0 && lo <= hi && hi.is_finite()) {
                return bad(format!("{name} = ({lo}, {hi}) must satisfy 0 < lo <= hi"));
            }
        }
        self.solver.validate()?;
        Ok(())
    }

    fn dubins(&self) -> Dubins4D {
        Dubins4D::default()
    }
}

/// One dataset entry. Channels are stored channel-major, each in row-major
/// node order; `bounds` holds `(lo, hi)` per axis.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub dims: Vec<usize>,
    pub bounds: Vec<(f32, f32)>,
    pub c_in: usize,
    pub c_out: usize,
    pub h: Vec<f32>,
    pub experiment: u8,
    /// Instance seed; regenerating from it reproduces the sample.
    pub seed: u64,
    pub input: Vec<f32>,
    pub target: Vec<f32>,
}

impl Sample {
    /// Builds `[l, x1, x2, h...]` from grids over the same domain.
    pub fn from_grids(
        experiment: u8,
        seed: u64,
        l: &ValueGrid,
        target: &ValueGrid,
        h: &[f64],
    ) -> Result<Self, DataError> {
        if l.shape != target.shape || l.domain != target.domain {
            return Err(DataError::Invalid(format!("l {:?} and target {:?} differ", l.shape, target.shape)));
        }
        if l.ndim() < 2 {
            return Err(DataError::Invalid("need at least two axes for coordinate channels".into()));
        }
        let n = l.len();
        let mut input = Vec::with_capacity((3 + h.len()) * n);
        input.extend(l.values.iter().map(|&v| v as f32));
        let coords = axis_coordinates(&l.domain, &l.shape);
        let st = l.strides();
        for axis in 0..2 {
            input.extend((0..n).map(|i| coords[axis][(i / st[axis]) % l.shape[axis]] as f32));
        }
        for &c in h {
            input.extend(std::iter::repeat_n(c as f32, n));
        }
        let s = Sample {
            dims: l.shape.clone(),
            bounds: (0..l.ndim()).map(|a| (l.domain.lo[a] as f32, l.domain.hi[a] as f32)).collect(),
            c_in: 3 + h.len(),
            c_out: 1,
            h: h.iter().map(|&v| v as f32).collect(),
            experiment,
            seed,
            input,
            target: target.values.iter().map(|&v| v as f32).collect(),
        };
        s.validate().map_err(DataError::Invalid)?;
        Ok(s)
    }

    pub fn nodes(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.dims.is_empty() || self.dims.contains(&0) {
            return Err(format!("bad dims {:?}", self.dims));
        }
        if self.bounds.len() != self.dims.len() {
            return Err(format!("{} bounds for {} axes", self.bounds.len(), self.dims.len()));
        }
        if let Some((lo, hi)) = self.bounds.iter().find(|(lo, hi)| !(lo < hi) || !lo.is_finite() || !hi.is_finite()) {
            return Err(format!("bad bounds ({lo}, {hi})"));
        }
        if self.c_in != 3 + self.h.len() {
            return Err(format!("c_in = {} but 3 + len(h) = {}", self.c_in, 3 + self.h.len()));
        }
        if self.c_out == 0 {
            return Err("c_out = 0".into());
        }
        let n = self.nodes();
        if self.input.len() != self.c_in * n || self.target.len() != self.c_out * n {
            return Err(format!(
                "payloads {} / {} do not match {} nodes × ({}, {}) channels",
                self.input.len(),
                self.target.len(),
                n,
                self.c_in,
                self.c_out
            ));
        }
        Ok(())
    }

    pub fn kind(&self) -> Option<ExperimentKind> {
        ExperimentKind::from_id(self.experiment)
    }

    pub fn channel(&self, c: usize) -> &[f32] {
        let n = self.nodes();
        &self.input[c * n..(c + 1) * n]
    }

    /// The `l` channel.
    pub fn value_channel(&self) -> &[f32] {
        self.channel(0)
    }

    pub fn domain(&self) -> Result<Domain, DataError> {
        let lo = self.bounds.iter().map(|b| b.0 as f64).collect::<Vec<_>>();
        let hi = self.bounds.iter().map(|b| b.1 as f64).collect::<Vec<_>>();
        Ok(Domain::boxed(&lo, &hi)?)
    }

    fn grid(&self, values: &[f32]) -> Result<ValueGrid, DataError> {
        Ok(ValueGrid::new(self.domain()?, self.dims.clone(), values.iter().map(|&v| v as f64).collect())?)
    }

    pub fn input_grid(&self, c: usize) -> Result<ValueGrid, DataError> {
        if c >= self.c_in {
            return Err(DataError::Invalid(format!("channel {c} >= c_in {}", self.c_in)));
        }
        self.grid(self.channel(c))
    }

    pub fn target_grid(&self) -> Result<ValueGrid, DataError> {
        self.grid(&self.target[..self.nodes()])
    }

    /// Input as a channel-last tensor `[dims..., c_in]`.
    pub fn input_tensor<T: Real>(&self) -> Tensor<T> {
        channel_last(&self.input, &self.dims, self.c_in)
    }

    pub fn target_tensor<T: Real>(&self) -> Tensor<T> {
        channel_last(&self.target, &self.dims, self.c_out)
    }
}

fn channel_last<T: Real>(data: &[f32], dims: &[usize], c: usize) -> Tensor<T> {
    let n: usize = dims.iter().product();
    let mut out = vec![T::zero(); n * c];
    for ch in 0..c {
        for i in 0..n {
            out[i * c + ch] = T::of(data[ch * n + i] as f64);
        }
    }
    let mut shape = dims.to_vec();
    shape.push(c);
    Tensor { shape, data: out }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Split {
    Train = 0,
    Test = 1,
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Instance seed for `(split, index)`. Injective in `(split, index)` for a
/// fixed master seed, so the train and test streams never share a seed.
pub fn sample_seed(master: u64, split: Split, index: usize) -> u64 {
    splitmix(splitmix(master) ^ ((split as u64) << 48 | index as u64))
}

fn stream(seed: u64, tag: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(substream(seed, tag))
}

fn substream(seed: u64, tag: u64) -> u64 {
    splitmix(seed ^ splitmix(tag))
}

fn uniform(rng: &mut ChaCha8Rng, (lo, hi): (f64, f64)) -> f64 {
    if lo == hi {
        lo
    } else {
        rng.gen_range(lo..=hi)
    }
}

/// Obstacle scenes of a Dubins instance: one scene, or the two parts of a
/// two-obstacle instance. The velocity family has no static scene.
pub fn instance_scenes(spec: &ExperimentSpec, seed: u64) -> Result<Vec<Scene>, DataError> {
    let r = &spec.ranges;
    let jitter = |rng: &mut ChaCha8Rng| {
        let j = r.center_jitter;
        if j > 0.0 {
            Vec2::new(rng.gen_range(-j..=j), rng.gen_range(-j..=j))
        } else {
            Vec2::default()
        }
    };
    Ok(match spec.kind {
        ExperimentKind::SingleObstacle => {
            let shape = random_smooth_shape(substream(seed, 1), r.n_angles, r.obstacle_radius.0, r.obstacle_radius.1)?;
            let c = jitter(&mut stream(seed, 2));
            vec![Scene::smooth(&shape, c)?]
        }
        ExperimentKind::TwoObstacles => {
            let a = random_smooth_shape(substream(seed, 1), r.n_angles, r.pair_radius.0, r.pair_radius.1)?;
            let b = random_smooth_shape(substream(seed, 3), r.n_angles, r.pair_radius.0, r.pair_radius.1)?;
            let mut rng = stream(seed, 2);
            let dir = Vec2::polar(1.0, rng.gen_range(0.0..TAU));
            let half = 0.5 * uniform(&mut rng, r.separation);
            let mid = jitter(&mut rng) * 0.5;
            vec![Scene::smooth(&a, mid + dir * half)?, Scene::smooth(&b, mid - dir * half)?]
        }
        ExperimentKind::Indoor => vec![gen_indoor_scene_with(substream(seed, 1), &r.indoor)],
        ExperimentKind::Parametric => {
            // one obstacle shared by every parametric sample
            let shape =
                random_smooth_shape(substream(spec.seed, 7), r.n_angles, r.obstacle_radius.0, r.obstacle_radius.1)?;
            vec![Scene::smooth(&shape, Vec2::default())?]
        }
        ExperimentKind::Velocity | ExperimentKind::Air3d => vec![],
    })
}

/// Velocity family: disc centre and radius law.
pub fn velocity_obstacle(spec: &ExperimentSpec, seed: u64) -> (Vec2, VelocityRadiusLaw) {
    let r = &spec.ranges;
    let mut rng = stream(seed, 2);
    let j = r.center_jitter;
    let c = Vec2::new(rng.gen_range(-j..=j), rng.gen_range(-j..=j));
    let kind = if rng.gen_bool(0.5) { RadiusGrowth::Exponential } else { RadiusGrowth::Logarithmic };
    let law = VelocityRadiusLaw {
        kind,
        r0: uniform(&mut rng, r.radius_r0),
        a: uniform(&mut rng, r.radius_a),
        b: uniform(&mut rng, r.radius_b),
    };
    (c, law)
}

/// Repeats a 2D field along the trailing `(v, θ)` axes of a Dubins grid.
pub fn broadcast_l(l2: &ValueGrid, domain: &Domain, shape: &[usize]) -> Result<ValueGrid, DataError> {
    if l2.shape[..] != shape[..2] {
        return Err(DataError::Invalid(format!("2D field {:?} does not match grid {:?}", l2.shape, shape)));
    }
    let inner: usize = shape[2..].iter().product();
    let values = l2.values.iter().flat_map(|&v| std::iter::repeat_n(v, inner)).collect();
    Ok(ValueGrid::new(domain.clone(), shape.to_vec(), values)?)
}

/// A problem ready to solve plus the slices to harvest from it.
#[derive(Debug, Clone)]
pub struct Instance {
    pub kind: ExperimentKind,
    pub seed: u64,
    pub dynamics: Dynamics,
    pub l: ValueGrid,
    /// Appended to `h` after the slice coordinates.
    pub extra_h: Vec<f64>,
    /// Node indices of the trailing (non-spatial) axes, one entry per slice.
    pub slices: Vec<Vec<usize>>,
}

fn dubins_grid(spec: &ExperimentSpec, resolution: usize) -> (Domain, Vec<usize>) {
    (spec.dubins().domain(), vec![resolution, resolution, spec.speed_samples, spec.heading_samples])
}

/// Parametric `(u1_max, u2_max)` for a split index: a uniform training grid
/// and evenly spaced points on the test diagonal.
pub fn parametric_point(spec: &ExperimentSpec, split: Split, index: usize) -> (f64, f64) {
    let (lo, hi) = spec.ranges.control_bound;
    match split {
        Split::Train => {
            let g = (spec.n_train as f64).sqrt().ceil() as usize;
            let at = |k: usize| if g == 1 { 0.5 * (lo + hi) } else { lo + (hi - lo) * k as f64 / (g - 1) as f64 };
            (at(index / g), at(index % g))
        }
        Split::Test => {
            let t = lo + (hi - lo) * (index as f64 + 0.5) / spec.n_test as f64;
            (t, t)
        }
    }
}

/// Builds the instance for `seed` at `resolution`. `extra` carries the
/// parametric control bounds and is ignored by the other families.
pub fn build_instance(
    spec: &ExperimentSpec,
    seed: u64,
    extra: &[f64],
    resolution: usize,
) -> Result<Instance, DataError> {
    let kind = spec.kind;
    if kind == ExperimentKind::Air3d {
        let r = &spec.ranges;
        let evader = random_smooth_shape(substream(seed, 1), r.n_angles, r.agent_radius.0, r.agent_radius.1)?;
        let pursuer = random_smooth_shape(substream(seed, 3), r.n_angles, r.agent_radius.0, r.agent_radius.1)?;
        let (domain, shape) = Air3D::default_domain(resolution, spec.heading_samples);
        let l = Air3DCapture::Shapes { evader, pursuer }.field(&domain, &shape)?;
        let dth = TAU / spec.heading_samples as f64;
        let mut slices: Vec<Vec<usize>> = Vec::new();
        for &x3 in &r.headings {
            let k = ((x3.rem_euclid(TAU) / dth).round() as usize) % spec.heading_samples;
            if !slices.contains(&vec![k]) {
                slices.push(vec![k]);
            }
        }
        return Ok(Instance { kind, seed, dynamics: Dynamics::Air3D(Air3D::default()), l, extra_h: vec![], slices });
    }

    let mut dubins = spec.dubins();
    let mut extra_h = vec![];
    if kind == ExperimentKind::Parametric {
        if extra.len() != 2 {
            return Err(DataError::Spec(format!("parametric instance needs (u1_max, u2_max), got {extra:?}")));
        }
        dubins.u1_max = extra[0];
        dubins.u2_max = extra[1];
        extra_h = extra.to_vec();
    }
    let (domain, shape) = dubins_grid(spec, resolution);
    let l = if kind == ExperimentKind::Velocity {
        let (c, law) = velocity_obstacle(spec, seed);
        ValueGrid::from_fn(domain.clone(), shape.clone(), |x| (Vec2::new(x[0], x[1]) - c).norm() - law.radius(x[2]))?
    } else {
        let parts = instance_scenes(spec, seed)?;
        let scene = parts[1..].iter().fold(parts[0].clone(), |acc, s| acc.union(s));
        let l2 = rasterize_l(&scene, &domain.select(&[0, 1]), &shape[..2])?;
        broadcast_l(&l2, &domain, &shape)?
    };

    let (nv, nth) = (spec.speed_samples, spec.heading_samples);
    let mut rng = stream(seed, 4);
    let first = if kind == ExperimentKind::Velocity { vec![rng.gen_range(0..nv), 0] } else { vec![nv / 2, 0] };
    let mut slices = vec![first];
    let mut pool: Vec<Vec<usize>> = if kind == ExperimentKind::Velocity {
        (0..nv).map(|i| vec![i, 0]).collect()
    } else {
        (0..nv).flat_map(|i| (0..nth).map(move |k| vec![i, k])).collect()
    };
    pool.retain(|s| *s != slices[0]);
    pool.shuffle(&mut rng);
    slices.extend(pool.into_iter().take(spec.slices_per_solve - 1));
    Ok(Instance { kind, seed, dynamics: Dynamics::Dubins4D(dubins), l, extra_h, slices })
}

impl Instance {
    /// Slice sample from a solved value function over the same grid.
    pub fn sample(&self, v_inf: &ValueGrid, slice: &[usize]) -> Result<Sample, DataError> {
        let fixed: Vec<(usize, usize)> = slice.iter().enumerate().map(|(k, &i)| (k + 2, i)).collect();
        let l = self.l.slice(&fixed)?;
        let v = v_inf.slice(&fixed)?;
        let coords = axis_coordinates(&self.l.domain, &self.l.shape);
        let mut h: Vec<f64> = fixed.iter().map(|&(a, i)| coords[a][i]).collect();
        h.extend_from_slice(&self.extra_h);
        Sample::from_grids(self.kind.id(), self.seed, &l, &v, &h)
    }

    /// Node indices of the trailing axes nearest to the slice values in `h`.
    fn slice_from_h(&self, h: &[f32]) -> Result<Vec<usize>, DataError> {
        let coords = axis_coordinates(&self.l.domain, &self.l.shape);
        (2..self.l.ndim())
            .map(|a| {
                let target = *h.get(a - 2).ok_or_else(|| DataError::Invalid(format!("h too short: {h:?}")))? as f64;
                let d = &self.l.domain;
                let dist = |c: f64| {
                    let raw = (c - target).abs();
                    if d.periodic[a] {
                        raw.min(d.extent(a) - raw)
                    } else {
                        raw
                    }
                };
                Ok(coords[a]
                    .iter()
                    .enumerate()
                    .min_by(|x, y| dist(*x.1).total_cmp(&dist(*y.1)))
                    .map(|(i, _)| i)
                    .expect("non-empty axis"))
            })
            .collect()
    }
}

/// Outcome of one instance solve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveRecord {
    pub split: Split,
    pub index: usize,
    pub seed: u64,
    pub iterations: usize,
    pub converged: bool,
    pub wall_time: f64,
}

#[derive(Debug, Clone, Default)]
pub struct Generated {
    pub train: Vec<Sample>,
    pub test: Vec<Sample>,
    pub solves: Vec<SolveRecord>,
}

impl Generated {
    /// Instances dropped because their solve did not converge.
    pub fn excluded(&self) -> impl Iterator<Item = &SolveRecord> {
        self.solves.iter().filter(|r| !r.converged)
    }
}

pub fn generate(spec: &ExperimentSpec) -> Result<Generated, DataError> {
    generate_observed(spec, |_, _, _, _| {})
}

/// [`generate`] with a per-step callback `(instance seed, iteration, v, v_next)`.
pub fn generate_observed<F>(spec: &ExperimentSpec, mut observe: F) -> Result<Generated, DataError>
where
    F: FnMut(u64, usize, &[f64], &[f64]),
{
    spec.validate()?;
    let mut out = Generated::default();
    for (split, count) in [(Split::Train, spec.n_train), (Split::Test, spec.n_test)] {
        for index in 0..count {
            let seed = sample_seed(spec.seed, split, index);
            let extra = match spec.kind {
                ExperimentKind::Parametric => {
                    let (u1, u2) = parametric_point(spec, split, index);
                    vec![u1, u2]
                }
                _ => vec![],
            };
            let inst = build_instance(spec, seed, &extra, spec.resolution)?;
            let res = solve_observed(&inst.l, &inst.dynamics, &spec.solver, |it, v, n| observe(seed, it, v, n))?;
            out.solves.push(SolveRecord {
                split,
                index,
                seed,
                iterations: res.iterations,
                converged: res.converged,
                wall_time: res.wall_time,
            });
            if !res.converged {
                continue;
            }
            let dest = if split == Split::Train { &mut out.train } else { &mut out.test };
            for s in &inst.slices {
                dest.push(inst.sample(&res.v_inf, s)?);
            }
        }
    }
    Ok(out)
}

pub fn gen_air3d(spec: &ExperimentSpec) -> Result<Generated, DataError> {
    if spec.kind != ExperimentKind::Air3d {
        return Err(DataError::Spec(format!("gen_air3d called with {}", spec.kind.name())));
    }
    generate(spec)
}

pub fn gen_dubins_family(spec: &ExperimentSpec) -> Result<Generated, DataError> {
    if spec.kind == ExperimentKind::Air3d {
        return Err(DataError::Spec("gen_dubins_family called with air3d".into()));
    }
    generate(spec)
}

/// Re-solves the instance behind `sample` at another spatial resolution and
/// slices it at the same `h`.
pub fn regenerate(spec: &ExperimentSpec, sample: &Sample, resolution: usize) -> Result<Sample, DataError> {
    if sample.experiment != spec.kind.id() {
        return Err(DataError::Invalid(format!(
            "sample experiment id {} does not match {}",
            sample.experiment,
            spec.kind.name()
        )));
    }
    let extra: Vec<f64> = match spec.kind {
        ExperimentKind::Parametric => sample.h.get(2..4).unwrap_or(&[]).iter().map(|&v| v as f64).collect(),
        _ => vec![],
    };
    let inst = build_instance(spec, sample.seed, &extra, resolution)?;
    let slice = inst.slice_from_h(&sample.h)?;
    let res = solve_observed(&inst.l, &inst.dynamics, &spec.solver, |_, _, _| {})?;
    if !res.converged {
        return Err(DataError::NotConverged { seed: sample.seed, iterations: res.iterations });
    }
    inst.sample(&res.v_inf, &slice)
}
