use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{NnError, Real, Tape, Tensor, Var};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Activation {
    /// Tanh approximation of GELU.
    #[default]
    Gelu,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FnoConfig {
    pub in_channels: usize,
    pub width: usize,
    pub out_channels: usize,
    pub modes: (usize, usize),
    pub n_blocks: usize,
    #[serde(default)]
    pub activation: Activation,
}

impl FnoConfig {
    /// Width 32, 12×12 modes, 4 blocks.
    pub fn desk(in_channels: usize) -> Self {
        Self { in_channels, width: 32, out_channels: 1, modes: (12, 12), n_blocks: 4, activation: Activation::Gelu }
    }

    /// Hidden width of the output projection.
    pub fn projection_hidden(&self) -> usize {
        4 * self.width
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TnoConfig {
    pub in_channels: usize,
    pub width: usize,
    pub out_channels: usize,
    pub n_blocks: usize,
    pub mlp_hidden: usize,
}

impl TnoConfig {
    /// Width 64, 4 blocks, MLP hidden width 128.
    pub fn desk(in_channels: usize) -> Self {
        Self { in_channels, width: 64, out_channels: 1, n_blocks: 4, mlp_hidden: 128 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "arch", rename_all = "snake_case")]
pub enum ArchConfig {
    Fno(FnoConfig),
    Tno(TnoConfig),
}

impl ArchConfig {
    pub fn in_channels(&self) -> usize {
        match self {
            ArchConfig::Fno(c) => c.in_channels,
            ArchConfig::Tno(c) => c.in_channels,
        }
    }

    pub fn out_channels(&self) -> usize {
        match self {
            ArchConfig::Fno(c) => c.out_channels,
            ArchConfig::Tno(c) => c.out_channels,
        }
    }

    /// Parameter names and shapes in storage order.
    pub fn layout(&self) -> Vec<(String, Vec<usize>)> {
        let mut out = Vec::new();
        let linear = |out: &mut Vec<(String, Vec<usize>)>, name: &str, i: usize, o: usize| {
            out.push((format!("{name}.weight"), vec![i, o]));
            out.push((format!("{name}.bias"), vec![o]));
        };
        match self {
            ArchConfig::Fno(c) => {
                let d = c.width;
                linear(&mut out, "p_in.0", c.in_channels, d);
                linear(&mut out, "p_in.1", d, d);
                for b in 0..c.n_blocks {
                    out.push((format!("block.{b}.spectral"), vec![2 * c.modes.0 + 1, c.modes.1 + 1, d, d, 2]));
                    linear(&mut out, &format!("block.{b}.w"), d, d);
                }
                linear(&mut out, "p_out.0", d, c.projection_hidden());
                linear(&mut out, "p_out.1", c.projection_hidden(), c.out_channels);
            }
            ArchConfig::Tno(c) => {
                let (d, h) = (c.width, c.mlp_hidden);
                linear(&mut out, "p_in.0", c.in_channels, d);
                linear(&mut out, "p_in.1", d, d);
                for b in 0..c.n_blocks {
                    for w in ["wq", "wk", "wv"] {
                        out.push((format!("block.{b}.attn.{w}"), vec![d, d]));
                    }
                    for ln in ["ln_k", "ln_v"] {
                        out.push((format!("block.{b}.attn.{ln}.gamma"), vec![d]));
                        out.push((format!("block.{b}.attn.{ln}.beta"), vec![d]));
                    }
                    linear(&mut out, &format!("block.{b}.mlp.0"), d, h);
                    linear(&mut out, &format!("block.{b}.mlp.1"), h, d);
                }
                linear(&mut out, "p_out.0", d, h);
                linear(&mut out, "p_out.1", h, c.out_channels);
            }
        }
        out
    }

    pub fn validate(&self) -> Result<(), NnError> {
        let ok = match self {
            ArchConfig::Fno(c) => c.in_channels > 0 && c.width > 0 && c.out_channels > 0 && c.n_blocks >= 1,
            ArchConfig::Tno(c) => {
                c.in_channels > 0 && c.width > 0 && c.out_channels > 0 && c.n_blocks >= 1 && c.mlp_hidden > 0
            }
        };
        if ok {
            Ok(())
        } else {
            Err(NnError::Shape(format!("invalid architecture {self:?}")))
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Param<T> {
    pub name: String,
    pub tensor: Tensor<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OperatorModel<T> {
    pub arch: ArchConfig,
    pub params: Vec<Param<T>>,
}

impl<T: Real> OperatorModel<T> {
    /// Uniform `±1/sqrt(fan_in)` for linear layers, `[0, 1/d²)` for spectral
    /// weights, unit layer-norm gains.
    pub fn init(arch: ArchConfig, seed: u64) -> Result<Self, NnError> {
        arch.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let params = arch
            .layout()
            .into_iter()
            .map(|(name, shape)| {
                let n: usize = shape.iter().product();
                let data: Vec<T> = if name.ends_with(".gamma") {
                    vec![T::one(); n]
                } else if name.ends_with(".beta") {
                    vec![T::zero(); n]
                } else if name.ends_with(".spectral") {
                    let s = 1.0 / (shape[2] * shape[3]) as f64;
                    (0..n).map(|_| T::of(s * rng.gen::<f64>())).collect()
                } else {
                    // bias fan-in is the matching weight's first axis
                    let fan_in = if shape.len() == 2 { shape[0] } else { fan_in_of(&arch, &name) };
                    let bound = 1.0 / (fan_in as f64).sqrt();
                    (0..n).map(|_| T::of(rng.gen_range(-bound..bound))).collect()
                };
                Param { name, tensor: Tensor { shape, data } }
            })
            .collect();
        Ok(Self { arch, params })
    }

    pub fn zeros(arch: ArchConfig) -> Result<Self, NnError> {
        arch.validate()?;
        let params =
            arch.layout().into_iter().map(|(name, shape)| Param { name, tensor: Tensor::zeros(shape) }).collect();
        Ok(Self { arch, params })
    }

    pub fn param_count(&self) -> usize {
        self.params.iter().map(|p| p.tensor.len()).sum()
    }

    pub fn param_norm(&self) -> f64 {
        self.params.iter().map(|p| p.tensor.norm_sq()).sum::<f64>().sqrt()
    }

    pub fn param_mut(&mut self, name: &str) -> Option<&mut Tensor<T>> {
        self.params.iter_mut().find(|p| p.name == name).map(|p| &mut p.tensor)
    }

    pub fn cast<U: Real>(&self) -> OperatorModel<U> {
        OperatorModel {
            arch: self.arch.clone(),
            params: self.params.iter().map(|p| Param { name: p.name.clone(), tensor: p.tensor.cast() }).collect(),
        }
    }

    /// Records the forward pass. Returns the `[rows, out_channels]` output
    /// and the parameter variables in storage order.
    pub fn forward_on_tape(&self, tape: &mut Tape<T>, input: &Tensor<T>) -> Result<(Var, Vec<Var>), NnError> {
        let pv: Vec<Var> = self.params.iter().map(|p| tape.leaf(p.tensor.clone())).collect();
        let mut next = pv.iter().copied();
        let mut take = || next.next().expect("parameter layout matches the forward pass");
        let lin = |tape: &mut Tape<T>, x: Var, w: Var, b: Var| -> Result<Var, NnError> {
            let y = tape.matmul(x, w)?;
            tape.add_bias(y, b)
        };
        let out = match &self.arch {
            ArchConfig::Fno(c) => {
                if input.shape.len() != 3 || input.shape[2] != c.in_channels {
                    return Err(NnError::Shape(format!(
                        "FNO expects [n1, n2, {}], got {:?}",
                        c.in_channels, input.shape
                    )));
                }
                let (n1, n2) = (input.shape[0], input.shape[1]);
                let x = tape.leaf(input.clone().reshape(vec![n1 * n2, c.in_channels])?);
                let (w, b) = (take(), take());
                let h = lin(tape, x, w, b)?;
                let h = tape.gelu(h)?;
                let (w, b) = (take(), take());
                let mut h = lin(tape, h, w, b)?;
                for _ in 0..c.n_blocks {
                    let r = take();
                    let k = tape.spectral_conv(h, r, n1, n2)?;
                    let (w, b) = (take(), take());
                    let wh = lin(tape, h, w, b)?;
                    let s = tape.add(wh, k)?;
                    h = tape.gelu(s)?;
                }
                let (w, b) = (take(), take());
                let o = lin(tape, h, w, b)?;
                let o = tape.gelu(o)?;
                let (w, b) = (take(), take());
                lin(tape, o, w, b)?
            }
            ArchConfig::Tno(c) => {
                if input.cols() != c.in_channels || input.shape.len() < 2 {
                    return Err(NnError::Shape(format!("TNO expects [n, {}], got {:?}", c.in_channels, input.shape)));
                }
                let n = input.rows();
                let x = tape.leaf(input.clone().reshape(vec![n, c.in_channels])?);
                let (w, b) = (take(), take());
                let h = lin(tape, x, w, b)?;
                let h = tape.gelu(h)?;
                let (w, b) = (take(), take());
                let mut f = lin(tape, h, w, b)?;
                for _ in 0..c.n_blocks {
                    let (wq, wk, wv) = (take(), take(), take());
                    let (gk, bk, gv, bv) = (take(), take(), take(), take());
                    let a = attention(tape, f, wq, wk, wv, (gk, bk), (gv, bv))?;
                    let g = tape.add(f, a)?;
                    let (w0, b0, w1, b1) = (take(), take(), take(), take());
                    let m = lin(tape, g, w0, b0)?;
                    let m = tape.gelu(m)?;
                    let m = lin(tape, m, w1, b1)?;
                    f = tape.add(g, m)?;
                }
                let (w, b) = (take(), take());
                let o = lin(tape, f, w, b)?;
                let o = tape.gelu(o)?;
                let (w, b) = (take(), take());
                lin(tape, o, w, b)?
            }
        };
        Ok((out, pv))
    }

    /// Output with the input's leading shape and `out_channels` last.
    pub fn predict(&self, input: &Tensor<T>) -> Result<Tensor<T>, NnError> {
        let mut tape = Tape::new();
        self.predict_with(&mut tape, input)
    }

    /// [`predict`](Self::predict) reusing a tape's FFT plans.
    pub fn predict_with(&self, tape: &mut Tape<T>, input: &Tensor<T>) -> Result<Tensor<T>, NnError> {
        tape.reset();
        let (out, _) = self.forward_on_tape(tape, input)?;
        let mut shape = input.shape.clone();
        *shape.last_mut().expect("validated input rank") = tape.value(out).cols();
        let t = tape.value(out).clone().reshape(shape)?;
        tape.reset();
        Ok(t)
    }
}

fn fan_in_of(arch: &ArchConfig, bias_name: &str) -> usize {
    let wname = bias_name.replace(".bias", ".weight");
    arch.layout().into_iter().find(|(n, _)| *n == wname).map(|(_, s)| s[0]).unwrap_or(1)
}

/// `Q (Kᵀ V) / n` with `Q = X W_Q`, `K = LN(X W_K)`, `V = LN(X W_V)`.
fn attention<T: Real>(
    tape: &mut Tape<T>,
    x: Var,
    wq: Var,
    wk: Var,
    wv: Var,
    ln_k: (Var, Var),
    ln_v: (Var, Var),
) -> Result<Var, NnError> {
    let n = tape.value(x).rows();
    let q = tape.matmul(x, wq)?;
    let k = tape.matmul(x, wk)?;
    let k = tape.layer_norm(k, ln_k.0, ln_k.1)?;
    let v = tape.matmul(x, wv)?;
    let v = tape.layer_norm(v, ln_v.0, ln_v.1)?;
    let kv = tape.matmul_t(k, true, v, false)?;
    let a = tape.matmul(q, kv)?;
    tape.scale(a, 1.0 / n as f64)
}

/// Galerkin-type linear attention with unit layer-norm gains.
pub fn galerkin_attention<T: Real>(
    x: &Tensor<T>,
    wq: &Tensor<T>,
    wk: &Tensor<T>,
    wv: &Tensor<T>,
) -> Result<Tensor<T>, NnError> {
    let d = wk.cols();
    let mut tape = Tape::new();
    let xv = tape.leaf(x.clone());
    let (q, k, v) = (tape.leaf(wq.clone()), tape.leaf(wk.clone()), tape.leaf(wv.clone()));
    let ones = |tape: &mut Tape<T>| tape.leaf(Tensor { shape: vec![d], data: vec![T::one(); d] });
    let zeros = |tape: &mut Tape<T>| tape.leaf(Tensor::zeros(vec![d]));
    let lk = (ones(&mut tape), zeros(&mut tape));
    let lv = (ones(&mut tape), zeros(&mut tape));
    let out = attention(&mut tape, xv, q, k, v, lk, lv)?;
    Ok(tape.value(out).clone())
}

pub fn fno_forward<T: Real>(model: &OperatorModel<T>, input: &Tensor<T>) -> Result<Tensor<T>, NnError> {
    if !matches!(model.arch, ArchConfig::Fno(_)) {
        return Err(NnError::Shape("fno_forward needs an FNO model".into()));
    }
    model.predict(input)
}

pub fn tno_forward<T: Real>(model: &OperatorModel<T>, input: &Tensor<T>) -> Result<Tensor<T>, NnError> {
    if !matches!(model.arch, ArchConfig::Tno(_)) {
        return Err(NnError::Shape("tno_forward needs a TNO model".into()));
    }
    model.predict(input)
}
