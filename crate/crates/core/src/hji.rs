//! First-order upwind Lax-Friedrichs solver for the infinite-horizon
//! avoid problem `min{∂t V + H(x, ∇V), l - V} = 0`, marched backward in time
//! with a tube minimum until the value stops changing.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::clock::Stopwatch;
use crate::dynamics::{dubins_hamiltonian, Dynamics};
use crate::grid::{axis_coordinates, increment, GridError, ValueGrid};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HjiError {
    #[error("non-finite value at iteration {iteration}, node {node}")]
    NonFinite { iteration: usize, node: usize },
    #[error("system has {expected} state dimensions but the grid has {got}")]
    Dimension { expected: usize, got: usize },
    #[error("axis {axis} has {len} samples; the stencil needs at least 3")]
    TooFewSamples { axis: usize, len: usize },
    #[error("invalid solver config: {0}")]
    Config(String),
    #[error(transparent)]
    Grid(#[from] GridError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub cfl: f64,
    /// Threshold on `max |ΔV| / dt`.
    pub convergence_tol: f64,
    pub max_horizon: f64,
    /// Steps between convergence tests.
    pub check_interval: usize,
    /// Worker threads for each step; results do not depend on this.
    #[serde(default = "one")]
    pub threads: usize,
}

fn one() -> usize {
    1
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self { cfl: 0.8, convergence_tol: 1e-3, max_horizon: 40.0, check_interval: 10, threads: 1 }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<(), HjiError> {
        if !(self.cfl > 0.0 && self.cfl <= 1.0) {
            return Err(HjiError::Config(format!("cfl = {} outside (0, 1]", self.cfl)));
        }
        if !(self.convergence_tol > 0.0) {
            return Err(HjiError::Config(format!("convergence_tol = {} must be positive", self.convergence_tol)));
        }
        if !(self.max_horizon >= 0.0 && self.max_horizon.is_finite()) {
            return Err(HjiError::Config(format!(
                "max_horizon = {} must be finite and non-negative",
                self.max_horizon
            )));
        }
        if self.check_interval == 0 || self.threads == 0 {
            return Err(HjiError::Config("check_interval and threads must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    pub v_inf: ValueGrid,
    pub iterations: usize,
    pub converged: bool,
    /// Seconds.
    pub wall_time: f64,
    /// Backward time reached.
    pub horizon: f64,
}

/// One-sided differences per axis, each stored in the grid's row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct UpwindGradients {
    pub left: Vec<Vec<f64>>,
    pub right: Vec<Vec<f64>>,
}

fn check_stencil(v: &ValueGrid) -> Result<(), HjiError> {
    for (axis, &len) in v.shape.iter().enumerate() {
        if len < 3 {
            return Err(HjiError::TooFewSamples { axis, len });
        }
    }
    Ok(())
}

/// Backward and forward differences at node `lin` (multi-index component
/// `i` along `axis`). Non-periodic ends extrapolate linearly, which makes the
/// missing one-sided difference equal to the interior one.
#[inline]
fn one_sided(values: &[f64], lin: usize, i: usize, n: usize, stride: usize, periodic: bool, dx: f64) -> (f64, f64) {
    let c = values[lin];
    let (prev, next) = if periodic {
        let prev = if i == 0 { lin + (n - 1) * stride } else { lin - stride };
        let next = if i == n - 1 { lin - (n - 1) * stride } else { lin + stride };
        (values[prev], values[next])
    } else if i == 0 {
        let next = values[lin + stride];
        (2.0 * c - next, next)
    } else if i == n - 1 {
        let prev = values[lin - stride];
        (prev, 2.0 * c - prev)
    } else {
        (values[lin - stride], values[lin + stride])
    };
    ((c - prev) / dx, (next - c) / dx)
}

pub fn upwind_gradients(v: &ValueGrid) -> Result<UpwindGradients, HjiError> {
    check_stencil(v)?;
    let strides = v.strides();
    let nd = v.ndim();
    let mut left = vec![vec![0.0; v.len()]; nd];
    let mut right = vec![vec![0.0; v.len()]; nd];
    let mut idx = vec![0; nd];
    for lin in 0..v.len() {
        for a in 0..nd {
            let (l, r) = one_sided(&v.values, lin, idx[a], v.shape[a], strides[a], v.domain.periodic[a], v.spacing(a));
            left[a][lin] = l;
            right[a][lin] = r;
        }
        increment(&mut idx, &v.shape, |_, _| {});
    }
    Ok(UpwindGradients { left, right })
}

/// Forward-time Lax-Friedrichs numerical Hamiltonian
/// `H(x, (p⁻+p⁺)/2) - Σ α_i (p⁺_i - p⁻_i)/2`: non-decreasing in `p⁻`,
/// non-increasing in `p⁺`.
pub fn lf_hamiltonian(spec: &Dynamics, alpha: &[f64], x: &[f64], p_left: &[f64], p_right: &[f64]) -> f64 {
    let avg: Vec<f64> = p_left.iter().zip(p_right).map(|(a, b)| 0.5 * (a + b)).collect();
    spec.hamiltonian(x, &avg) - dissipation(alpha, p_left, p_right)
}

/// The numerical Hamiltonian used by [`step`]. Marching `V ← V + dt·Ĥ` in
/// backward time is a forward march of `-H`, so the dissipation changes sign
/// relative to [`lf_hamiltonian`]; with this sign the update is monotone.
pub fn backward_lf_hamiltonian(spec: &Dynamics, alpha: &[f64], x: &[f64], p_left: &[f64], p_right: &[f64]) -> f64 {
    let avg: Vec<f64> = p_left.iter().zip(p_right).map(|(a, b)| 0.5 * (a + b)).collect();
    spec.hamiltonian(x, &avg) + dissipation(alpha, p_left, p_right)
}

#[inline]
fn dissipation(alpha: &[f64], p_left: &[f64], p_right: &[f64]) -> f64 {
    alpha.iter().zip(p_left.iter().zip(p_right)).map(|(a, (l, r))| a * (r - l) * 0.5).sum()
}

/// Hamiltonian with per-axis trigonometric tables so that the inner loop
/// avoids transcendental calls.
enum Prepared<'a> {
    Air3D { s: crate::dynamics::Air3D, sin3: Vec<f64>, cos3: Vec<f64> },
    Dubins4D { s: crate::dynamics::Dubins4D, sin: Vec<f64>, cos: Vec<f64> },
    Other(&'a Dynamics),
}

impl<'a> Prepared<'a> {
    fn new(spec: &'a Dynamics, coords: &[Vec<f64>]) -> Self {
        match spec {
            Dynamics::Air3D(s) => Prepared::Air3D {
                s: *s,
                sin3: coords[2].iter().map(|t| t.sin()).collect(),
                cos3: coords[2].iter().map(|t| t.cos()).collect(),
            },
            Dynamics::Dubins4D(s) => Prepared::Dubins4D {
                s: *s,
                sin: coords[3].iter().map(|t| t.sin()).collect(),
                cos: coords[3].iter().map(|t| t.cos()).collect(),
            },
            other => Prepared::Other(other),
        }
    }

    #[inline]
    fn eval(&self, idx: &[usize], x: &[f64], p: &[f64]) -> f64 {
        match self {
            Prepared::Air3D { s, sin3, cos3 } => {
                let (sn, cs) = (sin3[idx[2]], cos3[idx[2]]);
                p[0] * (-s.v_a + s.v_b * cs) + p[1] * s.v_b * sn + s.u_max_a * (p[0] * x[1] - p[1] * x[0] - p[2]).abs()
                    - s.u_max_b * p[2].abs()
            }
            Prepared::Dubins4D { s, sin, cos } => dubins_hamiltonian(s, x[2], cos[idx[3]], sin[idx[3]], p),
            Prepared::Other(d) => d.hamiltonian(x, p),
        }
    }
}

/// Reusable per-grid state for repeated steps.
struct Stepper<'a> {
    spec: Prepared<'a>,
    alpha: Vec<f64>,
    coords: Vec<Vec<f64>>,
    strides: Vec<usize>,
    spacing: Vec<f64>,
    shape: Vec<usize>,
    periodic: Vec<bool>,
    dt: f64,
}

impl<'a> Stepper<'a> {
    fn new(v: &ValueGrid, spec: &'a Dynamics, config: &SolverConfig) -> Result<Self, HjiError> {
        config.validate()?;
        if spec.state_dim() != v.ndim() {
            return Err(HjiError::Dimension { expected: spec.state_dim(), got: v.ndim() });
        }
        check_stencil(v)?;
        let coords = axis_coordinates(&v.domain, &v.shape);
        let alpha = spec.dissipation_bounds(&v.domain);
        let spacing: Vec<f64> = (0..v.ndim()).map(|a| v.spacing(a)).collect();
        let rate: f64 = alpha.iter().zip(&spacing).map(|(a, dx)| a / dx).sum();
        // a system with no dynamics never changes; any finite step is exact
        let dt = if rate > 0.0 { config.cfl / rate } else { config.max_horizon };
        Ok(Self {
            spec: Prepared::new(spec, &coords),
            alpha,
            coords,
            strides: v.strides(),
            spacing,
            shape: v.shape.clone(),
            periodic: v.domain.periodic.clone(),
            dt,
        })
    }

    /// Writes the tube-min update of `values[start..start+out.len()]`.
    fn run(&self, values: &[f64], start: usize, out: &mut [f64]) -> Option<usize> {
        let nd = self.shape.len();
        let mut idx = vec![0; nd];
        let mut rem = start;
        for a in (0..nd).rev() {
            idx[a] = rem % self.shape[a];
            rem /= self.shape[a];
        }
        let mut x: Vec<f64> = (0..nd).map(|a| self.coords[a][idx[a]]).collect();
        let mut pl = vec![0.0; nd];
        let mut pr = vec![0.0; nd];
        let mut avg = vec![0.0; nd];
        let mut bad = None;
        for (k, slot) in out.iter_mut().enumerate() {
            let lin = start + k;
            let mut diss = 0.0;
            for a in 0..nd {
                let (l, r) =
                    one_sided(values, lin, idx[a], self.shape[a], self.strides[a], self.periodic[a], self.spacing[a]);
                pl[a] = l;
                pr[a] = r;
                avg[a] = 0.5 * (l + r);
                diss += self.alpha[a] * (r - l) * 0.5;
            }
            let h = self.spec.eval(&idx, &x, &avg) + diss;
            let v = values[lin];
            let cand = v + self.dt * h;
            if !cand.is_finite() && bad.is_none() {
                bad = Some(lin);
            }
            *slot = cand.min(v);
            increment(&mut idx, &self.shape, |a, i| x[a] = self.coords[a][i]);
        }
        bad
    }

    fn step_into(&self, values: &[f64], out: &mut [f64], threads: usize) -> Option<usize> {
        let n = values.len();
        if threads <= 1 || n < 4096 {
            return self.run(values, 0, out);
        }
        let chunk = n.div_ceil(threads);
        std::thread::scope(|scope| {
            let handles: Vec<_> = out
                .chunks_mut(chunk)
                .enumerate()
                .map(|(c, piece)| scope.spawn(move || self.run(values, c * chunk, piece)))
                .collect();
            handles.into_iter().filter_map(|h| h.join().expect("solver worker panicked")).min()
        })
    }
}

/// One backward-time Euler step with tube minimum. Returns the new values and
/// the step length.
pub fn step(v: &ValueGrid, spec: &Dynamics, config: &SolverConfig) -> Result<(ValueGrid, f64), HjiError> {
    if let Some(node) = v.values.iter().position(|x| !x.is_finite()) {
        return Err(HjiError::NonFinite { iteration: 0, node });
    }
    let stepper = Stepper::new(v, spec, config)?;
    let mut out = vec![0.0; v.len()];
    if let Some(node) = stepper.step_into(&v.values, &mut out, config.threads) {
        return Err(HjiError::NonFinite { iteration: 0, node });
    }
    Ok((ValueGrid { domain: v.domain.clone(), shape: v.shape.clone(), values: out }, stepper.dt))
}

pub fn solve(l: &ValueGrid, spec: &Dynamics, config: &SolverConfig) -> Result<SolveResult, HjiError> {
    solve_observed(l, spec, config, |_, _, _| {})
}

/// [`solve`] with a callback receiving `(iteration, v, v_next)` after every step.
pub fn solve_observed<F>(
    l: &ValueGrid,
    spec: &Dynamics,
    config: &SolverConfig,
    mut observe: F,
) -> Result<SolveResult, HjiError>
where
    F: FnMut(usize, &[f64], &[f64]),
{
    let start = Stopwatch::start();
    if let Some(node) = l.values.iter().position(|x| !x.is_finite()) {
        return Err(HjiError::NonFinite { iteration: 0, node });
    }
    let stepper = Stepper::new(l, spec, config)?;
    let mut cur = l.values.clone();
    let mut next = vec![0.0; cur.len()];
    let mut t = 0.0;
    let mut iterations = 0;
    let mut converged = false;
    while t < config.max_horizon {
        if let Some(node) = stepper.step_into(&cur, &mut next, config.threads) {
            return Err(HjiError::NonFinite { iteration: iterations + 1, node });
        }
        iterations += 1;
        t += stepper.dt;
        observe(iterations, &cur, &next);
        if iterations % config.check_interval == 0 {
            let change = cur.iter().zip(&next).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            if change / stepper.dt < config.convergence_tol {
                converged = true;
            }
        }
        std::mem::swap(&mut cur, &mut next);
        if converged {
            break;
        }
    }
    Ok(SolveResult {
        v_inf: ValueGrid { domain: l.domain.clone(), shape: l.shape.clone(), values: cur },
        iterations,
        converged,
        wall_time: start.seconds(),
        horizon: t,
    })
}
