use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use super::Real;

/// Planned 2D transforms for one `n1×n2` row-major grid. The forward
/// transform is unnormalized; the inverse divides by `n1·n2`.
pub struct Fft2<T: Real> {
    pub n1: usize,
    pub n2: usize,
    row_fwd: Arc<dyn Fft<T>>,
    col_fwd: Arc<dyn Fft<T>>,
    row_inv: Arc<dyn Fft<T>>,
    col_inv: Arc<dyn Fft<T>>,
}

impl<T: Real> Fft2<T> {
    pub fn new(n1: usize, n2: usize) -> Self {
        let mut p = FftPlanner::new();
        Self {
            n1,
            n2,
            row_fwd: p.plan_fft_forward(n2),
            col_fwd: p.plan_fft_forward(n1),
            row_inv: p.plan_fft_inverse(n2),
            col_inv: p.plan_fft_inverse(n1),
        }
    }

    fn run(&self, buf: &mut [Complex<T>], row: &Arc<dyn Fft<T>>, col: &Arc<dyn Fft<T>>) {
        assert_eq!(buf.len(), self.n1 * self.n2, "buffer does not match the planned grid");
        row.process(buf);
        let mut t = super::tensor::transpose(buf, self.n1, self.n2);
        col.process(&mut t);
        let back = super::tensor::transpose(&t, self.n2, self.n1);
        buf.copy_from_slice(&back);
    }

    pub fn forward(&self, buf: &mut [Complex<T>]) {
        self.run(buf, &self.row_fwd, &self.col_fwd);
    }

    pub fn inverse(&self, buf: &mut [Complex<T>]) {
        self.run(buf, &self.row_inv, &self.col_inv);
        let s = T::one() / T::of((self.n1 * self.n2) as f64);
        buf.iter_mut().for_each(|v| *v = *v * s);
    }
}

pub fn fft2<T: Real>(field: &[Complex<T>], n1: usize, n2: usize) -> Vec<Complex<T>> {
    let mut buf = field.to_vec();
    Fft2::new(n1, n2).forward(&mut buf);
    buf
}

pub fn ifft2<T: Real>(spectrum: &[Complex<T>], n1: usize, n2: usize) -> Vec<Complex<T>> {
    let mut buf = spectrum.to_vec();
    Fft2::new(n1, n2).inverse(&mut buf);
    buf
}
