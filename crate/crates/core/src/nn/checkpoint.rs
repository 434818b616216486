//! Model checkpoint format, all little-endian:
//!
//! ```text
//! "HJRM" | version u32 | arch u8 (0 = FNO, 1 = TNO) | config u32[]
//! | param_count u32 | param_count × { name_len u32, name, ndim u32, dims u32[ndim], f32[] }
//! ```
//!
//! FNO config: in_channels, width, out_channels, modes1, modes2, n_blocks,
//! activation (0 = GELU). TNO config: in_channels, width, out_channels,
//! n_blocks, mlp_hidden. Spectral weights keep their trailing re/im axis, so
//! complex values are interleaved.

use std::path::Path;

use super::{Activation, ArchConfig, FnoConfig, NnError, OperatorModel, Param, Real, Tensor, TnoConfig};

pub const CHECKPOINT_VERSION: u32 = 1;
const MAGIC: &[u8; 4] = b"HJRM";

pub fn encode_checkpoint<T: Real>(model: &OperatorModel<T>) -> Vec<u8> {
    let mut out = Vec::new();
    let u32le = |out: &mut Vec<u8>, v: usize| out.extend_from_slice(&(v as u32).to_le_bytes());
    out.extend_from_slice(MAGIC);
    u32le(&mut out, CHECKPOINT_VERSION as usize);
    match &model.arch {
        ArchConfig::Fno(c) => {
            out.push(0);
            for v in [c.in_channels, c.width, c.out_channels, c.modes.0, c.modes.1, c.n_blocks, 0] {
                u32le(&mut out, v);
            }
        }
        ArchConfig::Tno(c) => {
            out.push(1);
            for v in [c.in_channels, c.width, c.out_channels, c.n_blocks, c.mlp_hidden] {
                u32le(&mut out, v);
            }
        }
    }
    u32le(&mut out, model.params.len());
    for p in &model.params {
        u32le(&mut out, p.name.len());
        out.extend_from_slice(p.name.as_bytes());
        u32le(&mut out, p.tensor.shape.len());
        for &d in &p.tensor.shape {
            u32le(&mut out, d);
        }
        for v in &p.tensor.data {
            out.extend_from_slice(&(v.f64() as f32).to_le_bytes());
        }
    }
    out
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Reader<'_> {
    fn err(&self, msg: impl Into<String>) -> NnError {
        NnError::Checkpoint { msg: msg.into(), offset: self.pos }
    }

    fn take(&mut self, n: usize, what: &str) -> Result<&[u8], NnError> {
        if self.bytes.len() - self.pos < n {
            return Err(self.err(format!("truncated while reading {what}")));
        }
        let s = &self.bytes[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    fn u32(&mut self, what: &str) -> Result<usize, NnError> {
        let b = self.take(4, what)?;
        Ok(u32::from_le_bytes([b[0], b[1], b[2], b[3]]) as usize)
    }
}

pub fn decode_checkpoint(bytes: &[u8]) -> Result<OperatorModel<f32>, NnError> {
    let mut r = Reader { bytes, pos: 0 };
    if r.take(4, "magic")? != MAGIC {
        r.pos = 0;
        return Err(r.err("bad magic"));
    }
    let version = r.u32("version")?;
    if version != CHECKPOINT_VERSION as usize {
        r.pos -= 4;
        return Err(r.err(format!("unsupported version {version}")));
    }
    let tag = r.take(1, "architecture tag")?[0];
    let arch = match tag {
        0 => {
            let mut v = [0usize; 7];
            for x in v.iter_mut() {
                *x = r.u32("FNO config")?;
            }
            if v[6] != 0 {
                r.pos -= 4;
                return Err(r.err(format!("unknown activation {}", v[6])));
            }
            ArchConfig::Fno(FnoConfig {
                in_channels: v[0],
                width: v[1],
                out_channels: v[2],
                modes: (v[3], v[4]),
                n_blocks: v[5],
                activation: Activation::Gelu,
            })
        }
        1 => {
            let mut v = [0usize; 5];
            for x in v.iter_mut() {
                *x = r.u32("TNO config")?;
            }
            ArchConfig::Tno(TnoConfig {
                in_channels: v[0],
                width: v[1],
                out_channels: v[2],
                n_blocks: v[3],
                mlp_hidden: v[4],
            })
        }
        t => {
            r.pos -= 1;
            return Err(r.err(format!("unknown architecture tag {t}")));
        }
    };
    arch.validate().map_err(|e| r.err(e.to_string()))?;
    let layout = arch.layout();
    let count = r.u32("parameter count")?;
    if count != layout.len() {
        return Err(r.err(format!("expected {} parameters, found {count}", layout.len())));
    }
    let mut params = Vec::with_capacity(count);
    for (name, shape) in layout {
        let start = r.pos;
        let len = r.u32("name length")?;
        let got = String::from_utf8(r.take(len, "name")?.to_vec()).map_err(|_| r.err("name is not UTF-8"))?;
        if got != name {
            r.pos = start;
            return Err(r.err(format!("expected parameter {name}, found {got}")));
        }
        let ndim = r.u32("ndim")?;
        let mut dims = Vec::with_capacity(ndim);
        for _ in 0..ndim {
            dims.push(r.u32("dims")?);
        }
        if dims != shape {
            return Err(r.err(format!("{name}: shape {dims:?} does not match {shape:?}")));
        }
        let n: usize = dims.iter().product();
        let raw = r.take(n * 4, "payload")?;
        let data = raw.chunks_exact(4).map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]])).collect();
        params.push(Param { name, tensor: Tensor { shape: dims, data } });
    }
    if r.pos != bytes.len() {
        return Err(r.err("trailing bytes"));
    }
    Ok(OperatorModel { arch, params })
}

pub fn write_checkpoint<T: Real>(path: &Path, model: &OperatorModel<T>) -> Result<(), NnError> {
    std::fs::write(path, encode_checkpoint(model)).map_err(|e| NnError::Io(format!("{}: {e}", path.display())))
}

pub fn read_checkpoint(path: &Path) -> Result<OperatorModel<f32>, NnError> {
    let bytes = std::fs::read(path).map_err(|e| NnError::Io(format!("{}: {e}", path.display())))?;
    decode_checkpoint(&bytes)
}
