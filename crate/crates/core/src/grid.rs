//! Uniformly sampled scalar fields over box domains.
//!
//! Values are stored row-major with axis 0 slowest. Periodic axes hold `n`
//! samples covering `[lo, hi)` (the seam node is not duplicated); non-periodic
//! axes hold `n` samples covering `[lo, hi]` including both endpoints.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GridError {
    #[error("invalid domain: {0}")]
    InvalidDomain(String),
    #[error("shape {shape:?} does not match {len} values")]
    ShapeMismatch { shape: Vec<usize>, len: usize },
    #[error("expected {expected} axes, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("index {index} out of range for axis {axis} of length {len}")]
    IndexOutOfRange { axis: usize, index: usize, len: usize },
    #[error("coordinate {coord} outside [{lo}, {hi}] on axis {axis}")]
    OutsideDomain { axis: usize, coord: f64, lo: f64, hi: f64 },
    #[error("non-finite value at linear index {0}")]
    NonFinite(usize),
    #[error("invalid slice: {0}")]
    InvalidSlice(String),
}

/// Axis-aligned box with per-axis periodicity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Domain {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    pub periodic: Vec<bool>,
}

impl Domain {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>, periodic: Vec<bool>) -> Result<Self, GridError> {
        if lo.is_empty() {
            return Err(GridError::InvalidDomain("at least one axis required".into()));
        }
        if lo.len() != hi.len() || lo.len() != periodic.len() {
            return Err(GridError::InvalidDomain(format!(
                "lo/hi/periodic lengths differ ({}, {}, {})",
                lo.len(),
                hi.len(),
                periodic.len()
            )));
        }
        for (axis, (&a, &b)) in lo.iter().zip(&hi).enumerate() {
            if !(a.is_finite() && b.is_finite() && a < b) {
                return Err(GridError::InvalidDomain(format!("axis {axis}: need finite lo < hi, got [{a}, {b}]")));
            }
        }
        Ok(Self { lo, hi, periodic })
    }

    /// Non-periodic box.
    pub fn boxed(lo: &[f64], hi: &[f64]) -> Result<Self, GridError> {
        Self::new(lo.to_vec(), hi.to_vec(), vec![false; lo.len()])
    }

    pub fn ndim(&self) -> usize {
        self.lo.len()
    }

    pub fn extent(&self, axis: usize) -> f64 {
        self.hi[axis] - self.lo[axis]
    }

    /// Length of the main diagonal.
    pub fn diagonal(&self) -> f64 {
        (0..self.ndim()).map(|a| self.extent(a).powi(2)).sum::<f64>().sqrt()
    }

    /// Grid spacing for `n` samples along `axis`.
    pub fn spacing(&self, axis: usize, n: usize) -> f64 {
        if self.periodic[axis] {
            self.extent(axis) / n as f64
        } else {
            self.extent(axis) / (n.max(2) - 1) as f64
        }
    }

    /// Sub-domain made of the listed axes, in order.
    pub fn select(&self, axes: &[usize]) -> Domain {
        Domain {
            lo: axes.iter().map(|&a| self.lo[a]).collect(),
            hi: axes.iter().map(|&a| self.hi[a]).collect(),
            periodic: axes.iter().map(|&a| self.periodic[a]).collect(),
        }
    }
}

/// Behaviour of [`ValueGrid::interpolate_with`] outside a non-periodic extent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutOfBounds {
    #[default]
    Error,
    Clamp,
}

/// Row-major strides for `shape` (axis 0 slowest).
pub fn strides(shape: &[usize]) -> Vec<usize> {
    let mut s = vec![1; shape.len()];
    for a in (0..shape.len().saturating_sub(1)).rev() {
        s[a] = s[a + 1] * shape[a + 1];
    }
    s
}

/// A scalar field sampled on a uniform grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ValueGrid {
    pub domain: Domain,
    pub shape: Vec<usize>,
    pub values: Vec<f64>,
}

impl ValueGrid {
    pub fn new(domain: Domain, shape: Vec<usize>, values: Vec<f64>) -> Result<Self, GridError> {
        check_shape(&domain, &shape)?;
        let len: usize = shape.iter().product();
        if len != values.len() {
            return Err(GridError::ShapeMismatch { shape, len: values.len() });
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(GridError::NonFinite(i));
        }
        Ok(Self { domain, shape, values })
    }

    pub fn zeros(domain: Domain, shape: Vec<usize>) -> Result<Self, GridError> {
        let len = shape.iter().product();
        Self::new(domain, shape, vec![0.0; len])
    }

    /// Samples `f` at every node.
    pub fn from_fn(domain: Domain, shape: Vec<usize>, mut f: impl FnMut(&[f64]) -> f64) -> Result<Self, GridError> {
        check_shape(&domain, &shape)?;
        let axes = axis_coordinates(&domain, &shape);
        let len: usize = shape.iter().product();
        let mut values = Vec::with_capacity(len);
        let mut idx = vec![0usize; shape.len()];
        let mut x: Vec<f64> = axes.iter().map(|c| c[0]).collect();
        for _ in 0..len {
            values.push(f(&x));
            increment(&mut idx, &shape, |axis, i| x[axis] = axes[axis][i]);
        }
        Self::new(domain, shape, values)
    }

    pub fn ndim(&self) -> usize {
        self.shape.len()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn spacing(&self, axis: usize) -> f64 {
        self.domain.spacing(axis, self.shape[axis])
    }

    pub fn strides(&self) -> Vec<usize> {
        strides(&self.shape)
    }

    /// Node coordinates along one axis.
    pub fn axis_coords(&self, axis: usize) -> Vec<f64> {
        let h = self.spacing(axis);
        (0..self.shape[axis]).map(|i| self.domain.lo[axis] + i as f64 * h).collect()
    }

    pub fn linear_index(&self, index: &[usize]) -> Result<usize, GridError> {
        if index.len() != self.ndim() {
            return Err(GridError::DimensionMismatch { expected: self.ndim(), got: index.len() });
        }
        let mut lin = 0;
        for (axis, (&i, &n)) in index.iter().zip(&self.shape).enumerate() {
            if i >= n {
                return Err(GridError::IndexOutOfRange { axis, index: i, len: n });
            }
            lin = lin * n + i;
        }
        Ok(lin)
    }

    pub fn multi_index(&self, mut linear: usize) -> Vec<usize> {
        let mut idx = vec![0; self.ndim()];
        for a in (0..self.ndim()).rev() {
            idx[a] = linear % self.shape[a];
            linear /= self.shape[a];
        }
        idx
    }

    pub fn get(&self, index: &[usize]) -> Result<f64, GridError> {
        Ok(self.values[self.linear_index(index)?])
    }

    /// State-space location of a node. Periodic axes never return `hi`.
    pub fn coordinates(&self, index: &[usize]) -> Result<Vec<f64>, GridError> {
        self.linear_index(index)?;
        Ok(index.iter().enumerate().map(|(a, &i)| self.domain.lo[a] + i as f64 * self.spacing(a)).collect())
    }

    pub fn interpolate(&self, point: &[f64]) -> Result<f64, GridError> {
        self.interpolate_with(point, OutOfBounds::Error)
    }

    /// Multilinear interpolation. Periodic axes wrap across the seam.
    pub fn interpolate_with(&self, point: &[f64], oob: OutOfBounds) -> Result<f64, GridError> {
        let nd = self.ndim();
        if point.len() != nd {
            return Err(GridError::DimensionMismatch { expected: nd, got: point.len() });
        }
        // (lower node, upper node, weight of upper) per axis
        let mut cell = Vec::with_capacity(nd);
        for (axis, &x) in point.iter().enumerate() {
            cell.push(self.bracket(axis, x, oob)?);
        }
        let st = self.strides();
        let mut acc = 0.0;
        for corner in 0..(1usize << nd) {
            let mut w = 1.0;
            let mut lin = 0;
            for (a, &(i0, i1, t)) in cell.iter().enumerate() {
                if corner >> a & 1 == 1 {
                    w *= t;
                    lin += i1 * st[a];
                } else {
                    w *= 1.0 - t;
                    lin += i0 * st[a];
                }
            }
            if w != 0.0 {
                acc += w * self.values[lin];
            }
        }
        Ok(acc)
    }

    fn bracket(&self, axis: usize, x: f64, oob: OutOfBounds) -> Result<(usize, usize, f64), GridError> {
        let n = self.shape[axis];
        let (lo, hi) = (self.domain.lo[axis], self.domain.hi[axis]);
        let h = self.spacing(axis);
        let mut s = (x - lo) / h;
        // snap near-node queries so nodes reproduce stored values exactly
        if (s - s.round()).abs() < 1e-9 {
            s = s.round();
        }
        if self.domain.periodic[axis] {
            let s = s.rem_euclid(n as f64);
            let i0 = (s.floor() as usize).min(n - 1);
            let t = s - i0 as f64;
            return Ok((i0, (i0 + 1) % n, t));
        }
        let max = (n - 1) as f64;
        if !(0.0..=max).contains(&s) {
            match oob {
                OutOfBounds::Error => {
                    return Err(GridError::OutsideDomain { axis, coord: x, lo, hi });
                }
                OutOfBounds::Clamp => s = s.clamp(0.0, max),
            }
        }
        let i0 = (s.floor() as usize).min(n - 2);
        Ok((i0, i0 + 1, s - i0 as f64))
    }

    /// Fixes the listed axes at node indices; the result spans the remaining axes.
    pub fn slice(&self, fixed_axes: &[(usize, usize)]) -> Result<ValueGrid, GridError> {
        let nd = self.ndim();
        let mut fixed = vec![None; nd];
        for &(axis, index) in fixed_axes {
            if axis >= nd {
                return Err(GridError::InvalidSlice(format!("axis {axis} >= ndim {nd}")));
            }
            if fixed[axis].is_some() {
                return Err(GridError::InvalidSlice(format!("axis {axis} fixed twice")));
            }
            if index >= self.shape[axis] {
                return Err(GridError::IndexOutOfRange { axis, index, len: self.shape[axis] });
            }
            fixed[axis] = Some(index);
        }
        let free: Vec<usize> = (0..nd).filter(|&a| fixed[a].is_none()).collect();
        if free.is_empty() {
            return Err(GridError::InvalidSlice("cannot fix every axis; read the node instead".into()));
        }
        let shape: Vec<usize> = free.iter().map(|&a| self.shape[a]).collect();
        let st = self.strides();
        let base: usize = (0..nd).filter_map(|a| fixed[a].map(|i| i * st[a])).sum();
        let len: usize = shape.iter().product();
        let mut values = Vec::with_capacity(len);
        let mut idx = vec![0usize; free.len()];
        for _ in 0..len {
            let lin = base + free.iter().zip(&idx).map(|(&a, &i)| i * st[a]).sum::<usize>();
            values.push(self.values[lin]);
            increment(&mut idx, &shape, |_, _| {});
        }
        Ok(ValueGrid { domain: self.domain.select(&free), shape, values })
    }

    /// Multilinear resampling onto a new uniform grid over the same domain.
    pub fn resample(&self, new_shape: &[usize]) -> Result<ValueGrid, GridError> {
        if new_shape.len() != self.ndim() {
            return Err(GridError::DimensionMismatch { expected: self.ndim(), got: new_shape.len() });
        }
        if new_shape == self.shape.as_slice() {
            return Ok(self.clone());
        }
        ValueGrid::from_fn(self.domain.clone(), new_shape.to_vec(), |x| {
            self.interpolate_with(x, OutOfBounds::Clamp).expect("resample nodes lie inside the domain")
        })
    }

    pub fn max_abs_diff(&self, other: &ValueGrid) -> f64 {
        self.values.iter().zip(&other.values).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

fn check_shape(domain: &Domain, shape: &[usize]) -> Result<(), GridError> {
    if shape.len() != domain.ndim() {
        return Err(GridError::DimensionMismatch { expected: domain.ndim(), got: shape.len() });
    }
    for (axis, &n) in shape.iter().enumerate() {
        let min = if domain.periodic[axis] { 1 } else { 2 };
        if n < min {
            return Err(GridError::InvalidDomain(format!("axis {axis} needs at least {min} samples, got {n}")));
        }
    }
    Ok(())
}

/// Node coordinates per axis.
pub fn axis_coordinates(domain: &Domain, shape: &[usize]) -> Vec<Vec<f64>> {
    (0..shape.len())
        .map(|a| {
            let h = domain.spacing(a, shape[a]);
            (0..shape[a]).map(|i| domain.lo[a] + i as f64 * h).collect()
        })
        .collect()
}

/// Advances a row-major multi-index, calling `on_change(axis, new_index)` for
/// every axis whose index changed.
pub(crate) fn increment(idx: &mut [usize], shape: &[usize], mut on_change: impl FnMut(usize, usize)) {
    for a in (0..idx.len()).rev() {
        idx[a] += 1;
        if idx[a] < shape[a] {
            on_change(a, idx[a]);
            return;
        }
        idx[a] = 0;
        on_change(a, 0);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn unit(n: usize) -> ValueGrid {
        ValueGrid::from_fn(Domain::boxed(&[0.0], &[1.0]).unwrap(), vec![n], |x| x[0]).unwrap()
    }

    #[test]
    fn coordinates_endpoint_and_periodic() {
        let g = unit(5);
        assert_eq!(g.coordinates(&[4]).unwrap(), vec![1.0]);

        let d = Domain::new(vec![0.0], vec![2.0 * PI], vec![true]).unwrap();
        let g = ValueGrid::zeros(d, vec![4]).unwrap();
        assert!((g.coordinates(&[3]).unwrap()[0] - 1.5 * PI).abs() < 1e-15);

        let d = Domain::boxed(&[-1.0, -1.0], &[1.0, 1.0]).unwrap();
        let g = ValueGrid::zeros(d, vec![3, 3]).unwrap();
        assert_eq!(g.coordinates(&[1, 1]).unwrap(), vec![0.0, 0.0]);
    }

    #[test]
    fn coordinates_out_of_range() {
        let g = unit(5);
        assert!(matches!(g.coordinates(&[5]), Err(GridError::IndexOutOfRange { .. })));
    }

    #[test]
    fn interpolate_linear_and_nodes() {
        let g = unit(7);
        for p in [0.0, 0.13, 0.5, 0.999, 1.0] {
            assert!((g.interpolate(&[p]).unwrap() - p).abs() < 1e-12);
        }
        let d = Domain::boxed(&[0.0, 0.0], &[1.0, 2.0]).unwrap();
        let g = ValueGrid::from_fn(d, vec![4, 5], |x| (x[0] * 7.0).sin() + x[1].powi(3)).unwrap();
        for lin in 0..g.len() {
            let idx = g.multi_index(lin);
            let x = g.coordinates(&idx).unwrap();
            assert_eq!(g.interpolate(&x).unwrap(), g.values[lin]);
        }
    }

    #[test]
    fn interpolate_out_of_domain() {
        let g = unit(5);
        assert!(matches!(g.interpolate(&[1.5]), Err(GridError::OutsideDomain { .. })));
        assert_eq!(g.interpolate_with(&[1.5], OutOfBounds::Clamp).unwrap(), 1.0);
        assert_eq!(g.interpolate_with(&[-0.5], OutOfBounds::Clamp).unwrap(), 0.0);
    }

    #[test]
    fn interpolate_periodic_seam() {
        let d = Domain::new(vec![0.0], vec![4.0], vec![true]).unwrap();
        let g = ValueGrid::new(d, vec![4], vec![0.0, 1.0, 2.0, 3.0]).unwrap();
        // halfway between the last node (3.0) and the wrapped first node (0.0)
        assert!((g.interpolate(&[3.5]).unwrap() - 1.5).abs() < 1e-12);
        assert!((g.interpolate(&[4.0 + 1.0]).unwrap() - 1.0).abs() < 1e-12);
        assert!((g.interpolate(&[-0.5]).unwrap() - 1.5).abs() < 1e-12);
    }

    #[test]
    fn slice_fixes_plane() {
        let d = Domain::boxed(&[0.0; 3], &[1.0; 3]).unwrap();
        let g = ValueGrid::from_fn(d, vec![3, 4, 5], |x| x[0] + 10.0 * x[1] + 100.0 * x[2]).unwrap();
        let s = g.slice(&[(2, 0)]).unwrap();
        assert_eq!(s.shape, vec![3, 4]);
        for i in 0..3 {
            for j in 0..4 {
                assert_eq!(s.get(&[i, j]).unwrap(), g.get(&[i, j, 0]).unwrap());
            }
        }
        let twice = g.slice(&[(2, 3)]).unwrap().slice(&[(0, 1)]).unwrap();
        let once = g.slice(&[(0, 1), (2, 3)]).unwrap();
        assert_eq!(twice, once);
        assert!(g.slice(&[(0, 0), (1, 0), (2, 0)]).is_err());
        assert!(g.slice(&[(0, 0), (0, 1)]).is_err());
    }

    #[test]
    fn resample_same_shape_is_identity() {
        let d = Domain::boxed(&[0.0, 0.0], &[1.0, 1.0]).unwrap();
        let g = ValueGrid::from_fn(d, vec![6, 6], |x| (x[0] * 3.0).cos() * x[1]).unwrap();
        assert_eq!(g.resample(&[6, 6]).unwrap(), g);
        let affine = ValueGrid::from_fn(g.domain.clone(), vec![6, 6], |x| 2.0 * x[0] - x[1] + 0.5).unwrap();
        let up = affine.resample(&[17, 9]).unwrap();
        let exact = ValueGrid::from_fn(g.domain.clone(), vec![17, 9], |x| 2.0 * x[0] - x[1] + 0.5).unwrap();
        assert!(up.max_abs_diff(&exact) < 1e-12);
    }

    #[test]
    fn rejects_bad_construction() {
        assert!(Domain::boxed(&[1.0], &[0.0]).is_err());
        let d = Domain::boxed(&[0.0], &[1.0]).unwrap();
        assert!(ValueGrid::new(d.clone(), vec![3], vec![0.0; 4]).is_err());
        assert!(ValueGrid::new(d.clone(), vec![2], vec![0.0, f64::NAN]).is_err());
        assert!(ValueGrid::new(d, vec![1], vec![0.0]).is_err());
    }

    fn boxed_grid(shape: Vec<usize>, lo: Vec<f64>, ext: Vec<f64>) -> ValueGrid {
        let hi: Vec<f64> = lo.iter().zip(&ext).map(|(a, e)| a + e).collect();
        ValueGrid::zeros(Domain::boxed(&lo, &hi).unwrap(), shape).unwrap()
    }

    fn grid_args() -> impl Strategy<Value = (Vec<usize>, Vec<f64>, Vec<f64>)> {
        (1usize..=4).prop_flat_map(|d| {
            (
                proptest::collection::vec(2usize..=6, d),
                proptest::collection::vec(-5.0f64..5.0, d),
                proptest::collection::vec(0.1f64..10.0, d),
            )
        })
    }

    proptest! {
        #[test]
        fn linearization_round_trips((shape, lo, ext) in grid_args()) {
            let g = boxed_grid(shape, lo, ext);
            for lin in 0..g.len() {
                prop_assert_eq!(g.linear_index(&g.multi_index(lin)).unwrap(), lin);
            }
        }

        #[test]
        fn interpolation_reproduces_affine_fields(
            (shape, lo, ext) in grid_args(),
            coef in proptest::collection::vec(-3.0f64..3.0, 5),
            ts in proptest::collection::vec(proptest::collection::vec(0.0f64..=1.0, 4), 20),
        ) {
            let f = |x: &[f64]| coef[4] + x.iter().zip(&coef).map(|(a, c)| a * c).sum::<f64>();
            let z = boxed_grid(shape, lo, ext);
            let g = ValueGrid::from_fn(z.domain.clone(), z.shape.clone(), f).unwrap();
            for t in &ts {
                let p: Vec<f64> = (0..g.ndim()).map(|a| g.domain.lo[a] + t[a] * g.domain.extent(a)).collect();
                prop_assert!((g.interpolate(&p).unwrap() - f(&p)).abs() < 1e-12 * (1.0 + f(&p).abs()));
            }
        }

        #[test]
        fn resample_is_idempotent(
            (shape, lo, ext) in grid_args(),
            seed in any::<u64>(),
        ) {
            let z = boxed_grid(shape, lo, ext);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let g = ValueGrid::from_fn(z.domain.clone(), z.shape.clone(), |_| rng.gen_range(-1.0..1.0)).unwrap();
            let once = g.resample(&g.shape).unwrap();
            prop_assert_eq!(&once, &g);
            prop_assert_eq!(once.resample(&g.shape).unwrap(), once);
        }
    }
}
