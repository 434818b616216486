//! Reverse-mode tape over a fixed op set.

use std::collections::HashMap;
use std::rc::Rc;

use rustfft::num_complex::Complex;

use super::fft::Fft2;
use super::spectral::{analyze, effective_weights, mix, synthesize, weight_gradient, ModeSet};
use super::tensor::gemm;
use super::{NnError, Real, Tensor};

/// Handle to a value recorded on a [`Tape`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Var(pub(crate) usize);

enum Op<T: Real> {
    Leaf,
    MatMul { a: usize, b: usize, ta: bool, tb: bool, m: usize, k: usize, n: usize },
    AddBias { x: usize, b: usize },
    Add { a: usize, b: usize },
    Scale { x: usize, s: T },
    Gelu { x: usize },
    LayerNorm { x: usize, gamma: usize, beta: usize, xhat: Vec<T>, rstd: Vec<T> },
    Spectral { x: usize, w: usize, modes: Rc<ModeSet>, plan: Rc<Fft2<T>>, xr: Vec<Complex<T>> },
    Mse { pred: usize, target: usize },
}

pub struct Tape<T: Real> {
    values: Vec<Tensor<T>>,
    ops: Vec<Op<T>>,
    plans: HashMap<(usize, usize), Rc<Fft2<T>>>,
    mode_sets: HashMap<[usize; 4], Rc<ModeSet>>,
    /// Largest imaginary part discarded by any spectral op.
    pub imag_residual: f64,
}

impl<T: Real> Default for Tape<T> {
    fn default() -> Self {
        Self::new()
    }
}

/// Per-variable gradients from [`Tape::backward`].
pub struct Gradients<T> {
    grads: Vec<Option<Tensor<T>>>,
}

impl<T: Real> Gradients<T> {
    pub fn get(&self, v: Var) -> Option<&Tensor<T>> {
        self.grads.get(v.0).and_then(|g| g.as_ref())
    }

    pub fn take(&mut self, v: Var) -> Option<Tensor<T>> {
        self.grads.get_mut(v.0).and_then(|g| g.take())
    }
}

const SQRT_2_OVER_PI: f64 = 0.797_884_560_802_865_4;
const GELU_C: f64 = 0.044_715;

fn gelu<T: Real>(x: T) -> T {
    let u = T::of(SQRT_2_OVER_PI) * (x + T::of(GELU_C) * x * x * x);
    T::of(0.5) * x * (T::one() + u.tanh())
}

fn gelu_grad<T: Real>(x: T) -> T {
    let u = T::of(SQRT_2_OVER_PI) * (x + T::of(GELU_C) * x * x * x);
    let t = u.tanh();
    let du = T::of(SQRT_2_OVER_PI) * (T::one() + T::of(3.0 * GELU_C) * x * x);
    T::of(0.5) * (T::one() + t) + T::of(0.5) * x * (T::one() - t * t) * du
}

const LN_EPS: f64 = 1e-5;

impl<T: Real> Tape<T> {
    pub fn new() -> Self {
        Self {
            values: Vec::new(),
            ops: Vec::new(),
            plans: HashMap::new(),
            mode_sets: HashMap::new(),
            imag_residual: 0.0,
        }
    }

    /// Drops recorded values, keeping FFT plans.
    pub fn reset(&mut self) {
        self.values.clear();
        self.ops.clear();
        self.imag_residual = 0.0;
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    fn push(&mut self, value: Tensor<T>, op: Op<T>) -> Var {
        self.values.push(value);
        self.ops.push(op);
        Var(self.values.len() - 1)
    }

    fn check(&self, v: Var) -> Result<usize, NnError> {
        if v.0 < self.values.len() {
            Ok(v.0)
        } else {
            Err(NnError::UnknownVar(v.0))
        }
    }

    pub fn value(&self, v: Var) -> &Tensor<T> {
        &self.values[v.0]
    }

    pub fn leaf(&mut self, t: Tensor<T>) -> Var {
        self.push(t, Op::Leaf)
    }

    pub fn matmul(&mut self, a: Var, b: Var) -> Result<Var, NnError> {
        self.matmul_t(a, false, b, false)
    }

    /// `op(a) · op(b)` with `op` the transpose when the flag is set. Leading
    /// axes of `a` are flattened into rows.
    pub fn matmul_t(&mut self, a: Var, ta: bool, b: Var, tb: bool) -> Result<Var, NnError> {
        let (ai, bi) = (self.check(a)?, self.check(b)?);
        let (av, bv) = (&self.values[ai], &self.values[bi]);
        let (m, k) = if ta { (av.cols(), av.rows()) } else { (av.rows(), av.cols()) };
        let (k2, n) = if tb { (bv.cols(), bv.rows()) } else { (bv.rows(), bv.cols()) };
        if k != k2 {
            return Err(NnError::Shape(format!("matmul {:?} x {:?} (ta={ta}, tb={tb})", av.shape, bv.shape)));
        }
        let mut out = vec![T::zero(); m * n];
        gemm(&av.data, ta, &bv.data, tb, m, k, n, &mut out, false);
        Ok(self.push(Tensor { shape: vec![m, n], data: out }, Op::MatMul { a: ai, b: bi, ta, tb, m, k, n }))
    }

    /// `x + b` with `b` broadcast over rows.
    pub fn add_bias(&mut self, x: Var, b: Var) -> Result<Var, NnError> {
        let (xi, bi) = (self.check(x)?, self.check(b)?);
        let (xv, bv) = (&self.values[xi], &self.values[bi]);
        if bv.len() != xv.cols() {
            return Err(NnError::Shape(format!("bias {:?} for input {:?}", bv.shape, xv.shape)));
        }
        let c = xv.cols();
        let data = xv.data.iter().enumerate().map(|(i, &v)| v + bv.data[i % c]).collect();
        let shape = xv.shape.clone();
        Ok(self.push(Tensor { shape, data }, Op::AddBias { x: xi, b: bi }))
    }

    pub fn add(&mut self, a: Var, b: Var) -> Result<Var, NnError> {
        let (ai, bi) = (self.check(a)?, self.check(b)?);
        let (av, bv) = (&self.values[ai], &self.values[bi]);
        if av.shape != bv.shape {
            return Err(NnError::Shape(format!("add {:?} + {:?}", av.shape, bv.shape)));
        }
        let data = av.data.iter().zip(&bv.data).map(|(x, y)| *x + *y).collect();
        let shape = av.shape.clone();
        Ok(self.push(Tensor { shape, data }, Op::Add { a: ai, b: bi }))
    }

    pub fn scale(&mut self, x: Var, s: f64) -> Result<Var, NnError> {
        let xi = self.check(x)?;
        let s = T::of(s);
        let xv = &self.values[xi];
        let t = Tensor { shape: xv.shape.clone(), data: xv.data.iter().map(|&v| v * s).collect() };
        Ok(self.push(t, Op::Scale { x: xi, s }))
    }

    /// Tanh approximation of GELU.
    pub fn gelu(&mut self, x: Var) -> Result<Var, NnError> {
        let xi = self.check(x)?;
        let xv = &self.values[xi];
        let t = Tensor { shape: xv.shape.clone(), data: xv.data.iter().map(|&v| gelu(v)).collect() };
        Ok(self.push(t, Op::Gelu { x: xi }))
    }

    /// Normalizes each row over the last axis, then applies `gamma`, `beta`.
    pub fn layer_norm(&mut self, x: Var, gamma: Var, beta: Var) -> Result<Var, NnError> {
        let (xi, gi, bi) = (self.check(x)?, self.check(gamma)?, self.check(beta)?);
        let xv = &self.values[xi];
        let d = xv.cols();
        if self.values[gi].len() != d || self.values[bi].len() != d {
            return Err(NnError::Shape(format!("layer_norm affine of size {d} expected")));
        }
        let (g, b) = (&self.values[gi].data, &self.values[bi].data);
        let rows = xv.rows();
        let mut xhat = vec![T::zero(); xv.len()];
        let mut rstd = vec![T::zero(); rows];
        let mut out = vec![T::zero(); xv.len()];
        let dn = T::of(d as f64);
        for r in 0..rows {
            let row = &xv.data[r * d..(r + 1) * d];
            let mean = row.iter().fold(T::zero(), |a, &v| a + v) / dn;
            let var = row.iter().fold(T::zero(), |a, &v| a + (v - mean) * (v - mean)) / dn;
            let s = T::one() / (var + T::of(LN_EPS)).sqrt();
            rstd[r] = s;
            for c in 0..d {
                let h = (row[c] - mean) * s;
                xhat[r * d + c] = h;
                out[r * d + c] = g[c] * h + b[c];
            }
        }
        let shape = xv.shape.clone();
        Ok(self.push(Tensor { shape, data: out }, Op::LayerNorm { x: xi, gamma: gi, beta: bi, xhat, rstd }))
    }

    /// Fourier layer on an `[n1·n2, c_in]` field laid out row-major over the grid.
    pub fn spectral_conv(&mut self, x: Var, w: Var, n1: usize, n2: usize) -> Result<Var, NnError> {
        let (xi, wi) = (self.check(x)?, self.check(w)?);
        let wshape = self.values[wi].shape.clone();
        let modes = ModeSet::from_weight_shape(n1, n2, &wshape)?;
        let (c_in, c_out) = (wshape[2], wshape[3]);
        if self.values[xi].rows() != n1 * n2 || self.values[xi].cols() != c_in {
            return Err(NnError::Shape(format!(
                "spectral input {:?} on a {n1}x{n2} grid with {c_in} channels",
                self.values[xi].shape
            )));
        }
        let modes = self.mode_sets.entry([n1, n2, modes.m1, modes.m2]).or_insert_with(|| Rc::new(modes)).clone();
        let plan = self.plans.entry((n1, n2)).or_insert_with(|| Rc::new(Fft2::new(n1, n2))).clone();
        let xr = analyze(&plan, &modes, &self.values[xi].data, c_in);
        let r = effective_weights(&modes, &self.values[wi].data, c_in, c_out);
        let y = mix(&xr, &r, modes.modes.len(), c_in, c_out, false);
        let (out, residual) = synthesize(&plan, &modes, &y, c_out);
        self.imag_residual = self.imag_residual.max(residual);
        Ok(self.push(Tensor { shape: vec![n1 * n2, c_out], data: out }, Op::Spectral { x: xi, w: wi, modes, plan, xr }))
    }

    /// Mean of squared differences, as a scalar.
    pub fn mse(&mut self, pred: Var, target: Var) -> Result<Var, NnError> {
        let (pi, ti) = (self.check(pred)?, self.check(target)?);
        let (pv, tv) = (&self.values[pi], &self.values[ti]);
        if pv.len() != tv.len() {
            return Err(NnError::Shape(format!("mse {:?} vs {:?}", pv.shape, tv.shape)));
        }
        let s = pv.data.iter().zip(&tv.data).fold(T::zero(), |a, (p, t)| a + (*p - *t) * (*p - *t));
        let v = s / T::of(pv.len() as f64);
        Ok(self.push(Tensor::scalar(v), Op::Mse { pred: pi, target: ti }))
    }

    pub fn backward(&self, root: Var) -> Result<Gradients<T>, NnError> {
        let ri = self.check(root)?;
        if !self.values[ri].shape.is_empty() {
            return Err(NnError::NonScalarRoot(self.values[ri].shape.clone()));
        }
        let mut grads: Vec<Option<Tensor<T>>> = (0..self.values.len()).map(|_| None).collect();
        grads[ri] = Some(Tensor::scalar(T::one()));
        for i in (0..=ri).rev() {
            let Some(g) = grads[i].take() else { continue };
            self.backprop(i, &g, &mut grads);
            grads[i] = Some(g);
        }
        Ok(Gradients { grads })
    }

    fn backprop(&self, i: usize, g: &Tensor<T>, grads: &mut [Option<Tensor<T>>]) {
        let acc = |grads: &mut [Option<Tensor<T>>], j: usize, data: Vec<T>| match &mut grads[j] {
            Some(t) => t.data.iter_mut().zip(data).for_each(|(a, b)| *a = *a + b),
            slot => *slot = Some(Tensor { shape: self.values[j].shape.clone(), data }),
        };
        match &self.ops[i] {
            Op::Leaf => {}
            &Op::MatMul { a, b, ta, tb, m, k, n } => {
                let (av, bv) = (&self.values[a].data, &self.values[b].data);
                let mut da = vec![T::zero(); m * k];
                if ta {
                    gemm(bv, tb, &g.data, true, k, n, m, &mut da, false);
                } else {
                    gemm(&g.data, false, bv, !tb, m, n, k, &mut da, false);
                }
                let mut db = vec![T::zero(); k * n];
                if tb {
                    gemm(&g.data, true, av, ta, n, m, k, &mut db, false);
                } else {
                    gemm(av, !ta, &g.data, false, k, m, n, &mut db, false);
                }
                acc(grads, a, da);
                acc(grads, b, db);
            }
            &Op::AddBias { x, b } => {
                let c = self.values[b].len();
                let mut db = vec![T::zero(); c];
                for (idx, &v) in g.data.iter().enumerate() {
                    db[idx % c] = db[idx % c] + v;
                }
                acc(grads, x, g.data.clone());
                acc(grads, b, db);
            }
            &Op::Add { a, b } => {
                acc(grads, a, g.data.clone());
                acc(grads, b, g.data.clone());
            }
            &Op::Scale { x, s } => acc(grads, x, g.data.iter().map(|&v| v * s).collect()),
            &Op::Gelu { x } => {
                let xv = &self.values[x].data;
                acc(grads, x, g.data.iter().zip(xv).map(|(&gv, &xv)| gv * gelu_grad(xv)).collect());
            }
            Op::LayerNorm { x, gamma, beta, xhat, rstd } => {
                let d = self.values[*x].cols();
                let gam = &self.values[*gamma].data;
                let dn = T::of(d as f64);
                let mut dx = vec![T::zero(); xhat.len()];
                let mut dg = vec![T::zero(); d];
                let mut dbeta = vec![T::zero(); d];
                for (r, &s) in rstd.iter().enumerate() {
                    let gy = &g.data[r * d..(r + 1) * d];
                    let xh = &xhat[r * d..(r + 1) * d];
                    let mut sum = T::zero();
                    let mut sum_x = T::zero();
                    for c in 0..d {
                        let dxh = gy[c] * gam[c];
                        sum = sum + dxh;
                        sum_x = sum_x + dxh * xh[c];
                        dg[c] = dg[c] + gy[c] * xh[c];
                        dbeta[c] = dbeta[c] + gy[c];
                    }
                    for c in 0..d {
                        let dxh = gy[c] * gam[c];
                        dx[r * d + c] = s / dn * (dn * dxh - sum - xh[c] * sum_x);
                    }
                }
                acc(grads, *x, dx);
                acc(grads, *gamma, dg);
                acc(grads, *beta, dbeta);
            }
            Op::Spectral { x, w, modes, plan, xr } => {
                let wshape = &self.values[*w].shape;
                let (c_in, c_out) = (wshape[2], wshape[3]);
                let gr = analyze(plan, modes, &g.data, c_out);
                let r = effective_weights(modes, &self.values[*w].data, c_in, c_out);
                let (dx, _) = synthesize(plan, modes, &mix(&gr, &r, modes.modes.len(), c_in, c_out, true), c_in);
                acc(grads, *x, dx);
                acc(grads, *w, weight_gradient(modes, xr, &gr, wshape));
            }
            &Op::Mse { pred, target } => {
                let (pv, tv) = (&self.values[pred].data, &self.values[target].data);
                let s = g.data[0] * T::of(2.0) / T::of(pv.len() as f64);
                let dp: Vec<T> = pv.iter().zip(tv).map(|(p, t)| (*p - *t) * s).collect();
                let dt = dp.iter().map(|&v| -v).collect();
                acc(grads, pred, dp);
                acc(grads, target, dt);
            }
        }
    }
}
