//! Fourier-layer kernels. Weights have shape `[2·m1+1, m2+1, c_in, c_out, 2]`
//! (signed first frequency, non-negative second frequency, interleaved
//! re/im). Interior columns are conjugate-filled at `-k`; the self-mirrored
//! columns `k2 = 0` and `k2 = n2/2` hold both `k` and `-k`, so their weights
//! are symmetrized to `(R_k + conj R_{-k}) / 2` to keep the output real.

use std::collections::HashMap;

use rustfft::num_complex::Complex;

use super::fft::Fft2;
use super::{NnError, Real, Tensor};

#[derive(Debug, Clone)]
pub(crate) struct Mode {
    /// Weight row `k1 + m1`.
    pub row: usize,
    pub k2: usize,
    /// Position in the `n1×n2` spectrum.
    pub idx: usize,
    /// Position of `-k` for interior columns.
    pub fill: Option<usize>,
    /// Index (into the mode list) of `-k` for self-mirrored columns.
    pub mirror: Option<usize>,
}

#[derive(Debug, Clone)]
pub(crate) struct ModeSet {
    pub n1: usize,
    pub n2: usize,
    pub m1: usize,
    pub m2: usize,
    pub modes: Vec<Mode>,
}

impl ModeSet {
    pub fn new(n1: usize, n2: usize, m1: usize, m2: usize) -> Result<Self, NnError> {
        if 2 * m1 > n1 || 2 * m2 > n2 {
            return Err(NnError::ModesExceedResolution { m1, m2, n1, n2 });
        }
        let (sn1, sm1) = (n1 as isize, m1 as isize);
        let mut modes = Vec::new();
        let mut pos = HashMap::new();
        for k1 in -sm1..=sm1 {
            // at m1 = n1/2 the frequencies ±m1 alias; keep +m1 only
            if 2 * m1 == n1 && k1 == -sm1 {
                continue;
            }
            for k2 in 0..=m2 {
                let r1 = k1.rem_euclid(sn1) as usize;
                let self_mirror = k2 == 0 || 2 * k2 == n2;
                let fill = (!self_mirror).then(|| (-k1).rem_euclid(sn1) as usize * n2 + (n2 - k2));
                pos.insert((k1, k2), modes.len());
                modes.push(Mode { row: (k1 + sm1) as usize, k2, idx: r1 * n2 + k2, fill, mirror: None });
            }
        }
        for j in 0..modes.len() {
            if modes[j].fill.is_none() {
                let k1 = modes[j].row as isize - sm1;
                let mut mk = (-k1).rem_euclid(sn1);
                if mk > sn1 / 2 || (2 * mk == sn1 && 2 * m1 != n1) {
                    mk -= sn1;
                }
                modes[j].mirror = Some(pos[&(mk, modes[j].k2)]);
            }
        }
        Ok(Self { n1, n2, m1, m2, modes })
    }

    pub fn from_weight_shape(n1: usize, n2: usize, shape: &[usize]) -> Result<Self, NnError> {
        if shape.len() != 5 || shape[4] != 2 || shape[0].is_multiple_of(2) {
            return Err(NnError::Shape(format!("spectral weights need [2m1+1, m2+1, c_in, c_out, 2], got {shape:?}")));
        }
        Self::new(n1, n2, (shape[0] - 1) / 2, shape[1] - 1)
    }
}

fn weight_at<T: Real>(
    w: &[T],
    m2: usize,
    c_in: usize,
    c_out: usize,
    row: usize,
    k2: usize,
    c: usize,
    o: usize,
) -> Complex<T> {
    let base = ((((row * (m2 + 1)) + k2) * c_in + c) * c_out + o) * 2;
    Complex::new(w[base], w[base + 1])
}

/// Symmetrized per-mode complex matrices `[modes, c_in, c_out]`.
pub(crate) fn effective_weights<T: Real>(ms: &ModeSet, w: &[T], c_in: usize, c_out: usize) -> Vec<Complex<T>> {
    let half = T::of(0.5);
    let mut out = Vec::with_capacity(ms.modes.len() * c_in * c_out);
    for mode in &ms.modes {
        for c in 0..c_in {
            for o in 0..c_out {
                let r = weight_at(w, ms.m2, c_in, c_out, mode.row, mode.k2, c, o);
                out.push(match mode.mirror {
                    None => r,
                    Some(mj) => {
                        let m = &ms.modes[mj];
                        (r + weight_at(w, ms.m2, c_in, c_out, m.row, m.k2, c, o).conj()) * half
                    }
                });
            }
        }
    }
    out
}

/// Retained spectrum `[modes, channels]` of a real `[N, channels]` field.
pub(crate) fn analyze<T: Real>(plan: &Fft2<T>, ms: &ModeSet, x: &[T], channels: usize) -> Vec<Complex<T>> {
    let n = ms.n1 * ms.n2;
    let mut out = vec![Complex::new(T::zero(), T::zero()); ms.modes.len() * channels];
    let mut buf = vec![Complex::new(T::zero(), T::zero()); n];
    for c in 0..channels {
        for (b, i) in buf.iter_mut().zip(0..n) {
            *b = Complex::new(x[i * channels + c], T::zero());
        }
        plan.forward(&mut buf);
        for (j, mode) in ms.modes.iter().enumerate() {
            out[j * channels + c] = buf[mode.idx];
        }
    }
    out
}

/// Real field `[N, channels]` whose spectrum is `y` on the retained modes,
/// conjugate-filled, zero elsewhere. Also returns the largest discarded
/// imaginary part.
pub(crate) fn synthesize<T: Real>(plan: &Fft2<T>, ms: &ModeSet, y: &[Complex<T>], channels: usize) -> (Vec<T>, f64) {
    let n = ms.n1 * ms.n2;
    let mut out = vec![T::zero(); n * channels];
    let mut buf = vec![Complex::new(T::zero(), T::zero()); n];
    let mut residual: f64 = 0.0;
    for o in 0..channels {
        buf.iter_mut().for_each(|b| *b = Complex::new(T::zero(), T::zero()));
        for (j, mode) in ms.modes.iter().enumerate() {
            let v = y[j * channels + o];
            buf[mode.idx] = v;
            if let Some(f) = mode.fill {
                buf[f] = v.conj();
            }
        }
        plan.inverse(&mut buf);
        for (i, b) in buf.iter().enumerate() {
            out[i * channels + o] = b.re;
            residual = residual.max(b.im.f64().abs());
        }
    }
    (out, residual)
}

/// `y[j, o] = Σ_c x[j, c] · op(R)[j, c, o]`, with `op` the conjugate
/// transpose when `adjoint` (then `x` has `c_out` channels).
pub(crate) fn mix<T: Real>(
    x: &[Complex<T>],
    r: &[Complex<T>],
    n_modes: usize,
    c_in: usize,
    c_out: usize,
    adjoint: bool,
) -> Vec<Complex<T>> {
    let zero = Complex::new(T::zero(), T::zero());
    let (src, dst) = if adjoint { (c_out, c_in) } else { (c_in, c_out) };
    let mut y = vec![zero; n_modes * dst];
    for j in 0..n_modes {
        let rj = &r[j * c_in * c_out..(j + 1) * c_in * c_out];
        let xj = &x[j * src..(j + 1) * src];
        let yj = &mut y[j * dst..(j + 1) * dst];
        if adjoint {
            for (c, yv) in yj.iter_mut().enumerate() {
                let row = &rj[c * c_out..(c + 1) * c_out];
                *yv = row.iter().zip(xj).fold(zero, |acc, (rv, xv)| acc + *xv * rv.conj());
            }
        } else {
            for (c, xv) in xj.iter().enumerate() {
                let row = &rj[c * c_out..(c + 1) * c_out];
                for (yv, rv) in yj.iter_mut().zip(row) {
                    *yv = *yv + *xv * *rv;
                }
            }
        }
    }
    y
}

/// Gradient of the loss with respect to the raw weights, given the retained
/// spectra of the input (`xr`) and of the output gradient (`gr`).
pub(crate) fn weight_gradient<T: Real>(ms: &ModeSet, xr: &[Complex<T>], gr: &[Complex<T>], shape: &[usize]) -> Vec<T> {
    let (c_in, c_out) = (shape[2], shape[3]);
    let n = T::of((ms.n1 * ms.n2) as f64);
    let half = T::of(0.5);
    let mut g = vec![T::zero(); shape.iter().product()];
    let mut add = |row: usize, k2: usize, c: usize, o: usize, v: Complex<T>| {
        let base = ((((row * (ms.m2 + 1)) + k2) * c_in + c) * c_out + o) * 2;
        g[base] = g[base] + v.re;
        g[base + 1] = g[base + 1] + v.im;
    };
    for (j, mode) in ms.modes.iter().enumerate() {
        let scale = if mode.fill.is_some() { T::of(2.0) / n } else { T::one() / n };
        for c in 0..c_in {
            let xc = xr[j * c_in + c].conj();
            for o in 0..c_out {
                let ge = gr[j * c_out + o] * xc * scale;
                match mode.mirror {
                    None => add(mode.row, mode.k2, c, o, ge),
                    Some(mj) => {
                        add(mode.row, mode.k2, c, o, ge * half);
                        let m = &ms.modes[mj];
                        add(m.row, m.k2, c, o, ge.conj() * half);
                    }
                }
            }
        }
    }
    g
}

/// Fourier layer on a `[n1, n2, c_in]` field.
pub fn spectral_conv<T: Real>(input: &Tensor<T>, weights: &Tensor<T>) -> Result<Tensor<T>, NnError> {
    if input.shape.len() != 3 {
        return Err(NnError::Shape(format!("spectral_conv input must be [n1, n2, c], got {:?}", input.shape)));
    }
    let (n1, n2, c_in) = (input.shape[0], input.shape[1], input.shape[2]);
    let ms = ModeSet::from_weight_shape(n1, n2, &weights.shape)?;
    if weights.shape[2] != c_in {
        return Err(NnError::Shape(format!("weights expect {} input channels, got {c_in}", weights.shape[2])));
    }
    let c_out = weights.shape[3];
    let plan = Fft2::new(n1, n2);
    let xr = analyze(&plan, &ms, &input.data, c_in);
    let r = effective_weights(&ms, &weights.data, c_in, c_out);
    let y = mix(&xr, &r, ms.modes.len(), c_in, c_out, false);
    let (out, _) = synthesize(&plan, &ms, &y, c_out);
    Tensor::new(vec![n1, n2, c_out], out)
}
