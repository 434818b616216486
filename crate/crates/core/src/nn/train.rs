use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{NnError, OperatorModel, Real, Tape, Tensor};
use crate::clock::Stopwatch;
use crate::grid::ValueGrid;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub epochs: usize,
    pub lr: f64,
    pub batch_size: usize,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self { epochs: 50, lr: 1e-3, batch_size: 10, seed: 0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochStats {
    pub epoch: usize,
    /// Mean per-sample loss over the epoch's updates.
    pub train_mse: f64,
    /// Mean per-sample relative L2 after the epoch.
    pub train_rel_l2: f64,
    pub seconds: f64,
}

pub struct Adam<T> {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    t: i32,
    m: Vec<Vec<T>>,
    v: Vec<Vec<T>>,
}

impl<T: Real> Adam<T> {
    pub fn new(model: &OperatorModel<T>, lr: f64) -> Self {
        let zeros = || model.params.iter().map(|p| vec![T::zero(); p.tensor.len()]).collect();
        Self { lr, beta1: 0.9, beta2: 0.999, eps: 1e-8, t: 0, m: zeros(), v: zeros() }
    }

    pub fn step(&mut self, model: &mut OperatorModel<T>, grads: &[Vec<T>]) {
        self.t += 1;
        let (b1, b2) = (T::of(self.beta1), T::of(self.beta2));
        let c1 = T::of(1.0 - self.beta1.powi(self.t));
        let c2 = T::of(1.0 - self.beta2.powi(self.t));
        let (lr, eps) = (T::of(self.lr), T::of(self.eps));
        for (pi, p) in model.params.iter_mut().enumerate() {
            let (m, v) = (&mut self.m[pi], &mut self.v[pi]);
            for (e, w) in p.tensor.data.iter_mut().enumerate() {
                let g = grads[pi][e];
                m[e] = b1 * m[e] + (T::one() - b1) * g;
                v[e] = b2 * v[e] + (T::one() - b2) * g * g;
                let mh = m[e] / c1;
                let vh = v[e] / c2;
                *w = *w - lr * mh / (vh.sqrt() + eps);
            }
        }
    }
}

/// `‖pred - truth‖ / ‖truth‖`.
pub fn rel_l2(pred: &[f64], truth: &[f64]) -> Result<f64, NnError> {
    if pred.len() != truth.len() {
        return Err(NnError::Shape(format!("rel_l2 lengths {} vs {}", pred.len(), truth.len())));
    }
    let den: f64 = truth.iter().map(|t| t * t).sum::<f64>().sqrt();
    if den == 0.0 {
        return Err(NnError::ZeroNorm);
    }
    let num: f64 = pred.iter().zip(truth).map(|(p, t)| (p - t) * (p - t)).sum::<f64>().sqrt();
    Ok(num / den)
}

pub fn rel_l2_grid(pred: &ValueGrid, truth: &ValueGrid) -> Result<f64, NnError> {
    if pred.shape != truth.shape {
        return Err(NnError::Shape(format!("grids {:?} vs {:?}", pred.shape, truth.shape)));
    }
    rel_l2(&pred.values, &truth.values)
}

/// Per-sample relative L2 of the model's predictions.
pub fn evaluate<T: Real>(model: &OperatorModel<T>, data: &[(Tensor<T>, Tensor<T>)]) -> Result<Vec<f64>, NnError> {
    let mut tape = Tape::new();
    data.iter()
        .map(|(x, y)| {
            let p = model.predict_with(&mut tape, x)?;
            rel_l2(&p.to_f64_vec(), &y.to_f64_vec())
        })
        .collect()
}

/// Adam on shuffled mini-batches of per-sample MSE. `on_epoch` sees each
/// epoch's statistics and the updated model.
pub fn train<T: Real>(
    model: &mut OperatorModel<T>,
    data: &[(Tensor<T>, Tensor<T>)],
    cfg: &TrainConfig,
    mut on_epoch: impl FnMut(&EpochStats, &OperatorModel<T>),
) -> Result<Vec<EpochStats>, NnError> {
    if data.is_empty() {
        return Err(NnError::EmptyDataset);
    }
    if cfg.batch_size == 0 {
        return Err(NnError::Shape("batch_size must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut adam = Adam::new(model, cfg.lr);
    let mut tape = Tape::new();
    let mut order: Vec<usize> = (0..data.len()).collect();
    let mut history = Vec::with_capacity(cfg.epochs);
    for epoch in 1..=cfg.epochs {
        let start = Stopwatch::start();
        order.shuffle(&mut rng);
        let mut loss_sum = 0.0;
        for (bi, batch) in order.chunks(cfg.batch_size).enumerate() {
            let mut acc: Vec<Vec<T>> = model.params.iter().map(|p| vec![T::zero(); p.tensor.len()]).collect();
            let w = T::of(1.0 / batch.len() as f64);
            for &i in batch {
                let (x, y) = &data[i];
                tape.reset();
                let (out, pv) = model.forward_on_tape(&mut tape, x)?;
                let t = tape.leaf(y.clone());
                let loss = tape.mse(out, t)?;
                let l = tape.value(loss).data[0].f64();
                if !l.is_finite() {
                    return Err(NnError::NonFiniteLoss { epoch, batch: bi, param_norm: model.param_norm() });
                }
                loss_sum += l;
                let grads = tape.backward(loss)?;
                for (a, v) in acc.iter_mut().zip(&pv) {
                    if let Some(g) = grads.get(*v) {
                        a.iter_mut().zip(&g.data).for_each(|(a, g)| *a = *a + *g * w);
                    }
                }
            }
            adam.step(model, &acc);
        }
        let mut rel = Vec::with_capacity(data.len());
        for (x, y) in data {
            let p = model.predict_with(&mut tape, x)?;
            match rel_l2(&p.to_f64_vec(), &y.to_f64_vec()) {
                Ok(r) => rel.push(r),
                Err(NnError::ZeroNorm) => {}
                Err(e) => return Err(e),
            }
        }
        let stats = EpochStats {
            epoch,
            train_mse: loss_sum / data.len() as f64,
            // NaN when every target is identically zero
            train_rel_l2: rel.iter().sum::<f64>() / rel.len() as f64,
            seconds: start.seconds(),
        };
        on_epoch(&stats, model);
        history.push(stats);
    }
    Ok(history)
}
