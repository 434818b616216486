//! Dataset file format, all little-endian:
//!
//! ```text
//! "HJRD" | version u32 | sample_count u32
//! | sample_count × { ndim u32, dims u32[ndim], c_in u32, c_out u32,
//!                    bounds f32[2·ndim] (lo, hi per axis), h_len u32, h f32[h_len],
//!                    experiment_id u8, seed u64,
//!                    input f32[c_in·N] channel-major, target f32[c_out·N] }
//! ```
//!
//! `N` is the node count `∏ dims`; each channel is stored in row-major order.

use std::path::Path;

use super::{DataError, Sample};

pub const DATASET_VERSION: u32 = 1;
const MAGIC: &[u8; 4] = b"HJRD";

fn put_u32(out: &mut Vec<u8>, v: usize) {
    out.extend_from_slice(&(v as u32).to_le_bytes());
}

fn put_f32s(out: &mut Vec<u8>, v: &[f32]) {
    for x in v {
        out.extend_from_slice(&x.to_le_bytes());
    }
}

pub fn encode_dataset(samples: &[Sample]) -> Result<Vec<u8>, DataError> {
    let mut out = Vec::new();
    out.extend_from_slice(MAGIC);
    put_u32(&mut out, DATASET_VERSION as usize);
    put_u32(&mut out, samples.len());
    for (i, s) in samples.iter().enumerate() {
        s.validate().map_err(|e| DataError::Invalid(format!("sample {i}: {e}")))?;
        put_u32(&mut out, s.dims.len());
        for &d in &s.dims {
            put_u32(&mut out, d);
        }
        put_u32(&mut out, s.c_in);
        put_u32(&mut out, s.c_out);
        for &(lo, hi) in &s.bounds {
            put_f32s(&mut out, &[lo, hi]);
        }
        put_u32(&mut out, s.h.len());
        put_f32s(&mut out, &s.h);
        out.push(s.experiment);
        out.extend_from_slice(&s.seed.to_le_bytes());
        put_f32s(&mut out, &s.input);
        put_f32s(&mut out, &s.target);
    }
    Ok(out)
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Reader<'_> {
    fn err(&self, msg: impl Into<String>) -> DataError {
        DataError::Format { msg: msg.into(), offset: self.pos }
    }

    fn take(&mut self, n: usize, what: &str) -> Result<&[u8], DataError> {
        if self.bytes.len() - self.pos < n {
            return Err(self.err(format!("truncated while reading {what}")));
        }
        let s = &self.bytes[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    fn u32(&mut self, what: &str) -> Result<usize, DataError> {
        let b = self.take(4, what)?;
        Ok(u32::from_le_bytes([b[0], b[1], b[2], b[3]]) as usize)
    }

    fn f32s(&mut self, n: usize, what: &str) -> Result<Vec<f32>, DataError> {
        let len = n.checked_mul(4).ok_or_else(|| self.err(format!("{what} length overflows")))?;
        let raw = self.take(len, what)?;
        Ok(raw.chunks_exact(4).map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]])).collect())
    }
}

pub fn decode_dataset(bytes: &[u8]) -> Result<Vec<Sample>, DataError> {
    let mut r = Reader { bytes, pos: 0 };
    if r.take(4, "magic")? != MAGIC {
        r.pos = 0;
        return Err(r.err("bad magic"));
    }
    let version = r.u32("version")?;
    if version != DATASET_VERSION as usize {
        r.pos -= 4;
        return Err(r.err(format!("unsupported version {version}")));
    }
    let count = r.u32("sample count")?;
    let mut samples = Vec::with_capacity(count.min(1 << 16));
    for i in 0..count {
        let start = r.pos;
        let ndim = r.u32("ndim")?;
        if ndim == 0 || ndim > 8 {
            r.pos -= 4;
            return Err(r.err(format!("sample {i}: unsupported ndim {ndim}")));
        }
        let mut dims = Vec::with_capacity(ndim);
        for _ in 0..ndim {
            dims.push(r.u32("dims")?);
        }
        let c_in = r.u32("c_in")?;
        let c_out = r.u32("c_out")?;
        let b = r.f32s(2 * ndim, "bounds")?;
        let bounds = b.chunks(2).map(|c| (c[0], c[1])).collect();
        let h_len = r.u32("h_len")?;
        let h = r.f32s(h_len, "h")?;
        let experiment = r.take(1, "experiment id")?[0];
        let seed = u64::from_le_bytes(r.take(8, "seed")?.try_into().expect("8 bytes"));
        let n = dims.iter().try_fold(1usize, |a, &d| a.checked_mul(d)).ok_or_else(|| r.err("node count overflows"))?;
        let input = r.f32s(c_in.saturating_mul(n), "input payload")?;
        let target = r.f32s(c_out.saturating_mul(n), "target payload")?;
        let s = Sample { dims, bounds, c_in, c_out, h, experiment, seed, input, target };
        if let Err(e) = s.validate() {
            return Err(DataError::Format { msg: format!("sample {i}: {e}"), offset: start });
        }
        samples.push(s);
    }
    if r.pos != bytes.len() {
        return Err(r.err("trailing bytes"));
    }
    Ok(samples)
}

pub fn write_dataset(path: &Path, samples: &[Sample]) -> Result<(), DataError> {
    let bytes = encode_dataset(samples)?;
    std::fs::write(path, bytes).map_err(|e| DataError::Io(format!("{}: {e}", path.display())))
}

pub fn read_dataset(path: &Path) -> Result<Vec<Sample>, DataError> {
    let bytes = std::fs::read(path).map_err(|e| DataError::Io(format!("{}: {e}", path.display())))?;
    decode_dataset(&bytes)
}
