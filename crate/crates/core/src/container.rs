//! `TDLAB001` named-tensor container.
//!
//! Layout, all integers little-endian:
//!
//! ```text
//! magic        8 bytes  "TDLAB001"
//! count        u32      number of tensors
//! per tensor:
//!   name_len   u32      byte length of the UTF-8 name
//!   name       name_len bytes
//!   dtype      u8       element width in bytes: 4 (f32) or 8 (f64)
//!   rank       u32
//!   dims       rank × u64
//!   payload    product(dims) × width bytes, row-major, little-endian
//! ```
//!
//! Nothing may follow the last payload. `f32` payloads are widened to `f64` on
//! read and narrowed back (exactly) on write.

use std::path::Path;

use ndarray::{Array1, Array2};

use crate::embedding::EmbeddingParams;
use crate::encoder::{Encoder, EncoderConfig, EncoderParams, FeedForward, LayerNormParams, MapVariant};
use crate::{Error, Result};

pub const MAGIC: &[u8; 8] = b"TDLAB001";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DType {
    F32,
    F64,
}

impl DType {
    pub fn width(self) -> usize {
        match self {
            DType::F32 => 4,
            DType::F64 => 8,
        }
    }

    fn from_tag(tag: u8) -> Result<Self> {
        match tag {
            4 => Ok(DType::F32),
            8 => Ok(DType::F64),
            other => Err(Error::Format(format!("unknown element type tag {other}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Tensor {
    pub dtype: DType,
    pub dims: Vec<usize>,
    /// Values widened to `f64`.
    pub data: Vec<f64>,
}

impl Tensor {
    pub fn from_matrix(m: &Array2<f64>, dtype: DType) -> Self {
        Self {
            dtype,
            dims: m.shape().to_vec(),
            data: m.iter().copied().collect(),
        }
    }

    pub fn from_vector(v: &Array1<f64>, dtype: DType) -> Self {
        Self {
            dtype,
            dims: vec![v.len()],
            data: v.to_vec(),
        }
    }

    fn expect_dims(&self, name: &str, dims: &[usize]) -> Result<()> {
        if self.dims != dims {
            return Err(Error::Shape {
                name: name.into(),
                expected: dims.to_vec(),
                actual: self.dims.clone(),
            });
        }
        Ok(())
    }
}

/// Ordered, uniquely named tensors.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TensorContainer {
    tensors: Vec<(String, Tensor)>,
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self
            .pos
            .checked_add(n)
            .filter(|&e| e <= self.bytes.len())
            .ok_or_else(|| Error::Format(format!("unexpected end of data at byte {}", self.pos)))?;
        let out = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(out)
    }

    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
}

impl TensorContainer {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.tensors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tensors.is_empty()
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.tensors.iter().map(|(n, _)| n.as_str())
    }

    pub fn get(&self, name: &str) -> Option<&Tensor> {
        self.tensors.iter().find(|(n, _)| n == name).map(|(_, t)| t)
    }

    pub fn insert(&mut self, name: impl Into<String>, tensor: Tensor) -> Result<()> {
        let name = name.into();
        if self.get(&name).is_some() {
            return Err(Error::Format(format!("duplicate tensor name `{name}`")));
        }
        let expected: usize = tensor.dims.iter().product();
        if expected != tensor.data.len() {
            return Err(Error::Shape {
                name,
                expected: tensor.dims.clone(),
                actual: vec![tensor.data.len()],
            });
        }
        self.tensors.push((name, tensor));
        Ok(())
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&(self.tensors.len() as u32).to_le_bytes());
        for (name, t) in &self.tensors {
            out.extend_from_slice(&(name.len() as u32).to_le_bytes());
            out.extend_from_slice(name.as_bytes());
            out.push(t.dtype.width() as u8);
            out.extend_from_slice(&(t.dims.len() as u32).to_le_bytes());
            for &d in &t.dims {
                out.extend_from_slice(&(d as u64).to_le_bytes());
            }
            match t.dtype {
                DType::F32 => t
                    .data
                    .iter()
                    .for_each(|&v| out.extend_from_slice(&(v as f32).to_le_bytes())),
                DType::F64 => t.data.iter().for_each(|&v| out.extend_from_slice(&v.to_le_bytes())),
            }
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut r = Reader { bytes, pos: 0 };
        let magic = r.take(8).map_err(|_| Error::Format("file too short for header".into()))?;
        if magic != MAGIC {
            return Err(Error::Format(format!(
                "bad magic {:?}, expected {:?}",
                String::from_utf8_lossy(magic),
                std::str::from_utf8(MAGIC).unwrap()
            )));
        }
        let count = r.u32()?;
        let mut container = Self::new();
        for _ in 0..count {
            let name_len = r.u32()? as usize;
            let name = std::str::from_utf8(r.take(name_len)?)
                .map_err(|_| Error::Format("tensor name is not UTF-8".into()))?
                .to_string();
            let dtype = DType::from_tag(r.u8()?)?;
            let rank = r.u32()? as usize;
            let dims = (0..rank)
                .map(|_| r.u64().map(|d| d as usize))
                .collect::<Result<Vec<_>>>()?;
            let n = dims
                .iter()
                .try_fold(1usize, |a, &d| a.checked_mul(d))
                .ok_or_else(|| Error::Format(format!("tensor `{name}` is too large")))?;
            let payload = r.take(n.checked_mul(dtype.width()).ok_or_else(|| {
                Error::Format(format!("tensor `{name}` is too large"))
            })?)?;
            let data = match dtype {
                DType::F32 => payload
                    .chunks_exact(4)
                    .map(|c| f32::from_le_bytes(c.try_into().unwrap()) as f64)
                    .collect(),
                DType::F64 => payload
                    .chunks_exact(8)
                    .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
                    .collect(),
            };
            container.insert(name, Tensor { dtype, dims, data })?;
        }
        if r.pos != bytes.len() {
            return Err(Error::Format(format!(
                "{} trailing bytes after the last tensor",
                bytes.len() - r.pos
            )));
        }
        Ok(container)
    }

    pub fn read(path: &Path) -> Result<Self> {
        let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
        Self::from_bytes(&bytes)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_bytes()).map_err(|e| Error::io(path, e))
    }

    fn require(&self, name: &str) -> Result<&Tensor> {
        self.get(name).ok_or_else(|| Error::MissingTensor(name.into()))
    }

    fn matrix(&self, name: &str, dims: [usize; 2]) -> Result<Array2<f64>> {
        let t = self.require(name)?;
        t.expect_dims(name, &dims)?;
        Ok(Array2::from_shape_vec((dims[0], dims[1]), t.data.clone()).expect("dims checked"))
    }

    fn vector(&self, name: &str, len: usize) -> Result<Array1<f64>> {
        let t = self.require(name)?;
        t.expect_dims(name, &[len])?;
        Ok(Array1::from(t.data.clone()))
    }

    fn matrix_any(&self, name: &str) -> Result<Array2<f64>> {
        let t = self.require(name)?;
        match t.dims[..] {
            [r, c] => self.matrix(name, [r, c]),
            _ => Err(Error::Shape {
                name: name.into(),
                expected: vec![0, 0],
                actual: t.dims.clone(),
            }),
        }
    }
}

/// Tensor names of the weight manifest.
pub mod names {
    pub const TOKEN_TABLE: &str = "embedding.token_table";
    pub const PROJECTION: &str = "embedding.projection";
    pub const POSITIONAL: &str = "embedding.positional";
    pub const QUERY_W: &str = "encoder.attention.query.weight";
    pub const QUERY_B: &str = "encoder.attention.query.bias";
    pub const KEY_W: &str = "encoder.attention.key.weight";
    pub const KEY_B: &str = "encoder.attention.key.bias";
    pub const VALUE_W: &str = "encoder.attention.value.weight";
    pub const VALUE_B: &str = "encoder.attention.value.bias";
    pub const OUTPUT_W: &str = "encoder.attention.output.weight";
    pub const OUTPUT_B: &str = "encoder.attention.output.bias";
    pub const LN1_GAIN: &str = "encoder.attention_norm.gain";
    pub const LN1_BIAS: &str = "encoder.attention_norm.bias";
    pub const LN2_GAIN: &str = "encoder.output_norm.gain";
    pub const LN2_BIAS: &str = "encoder.output_norm.bias";
    pub const FFN_IN_W: &str = "encoder.ffn.in.weight";
    pub const FFN_IN_B: &str = "encoder.ffn.in.bias";
    pub const FFN_OUT_W: &str = "encoder.ffn.out.weight";
    pub const FFN_OUT_B: &str = "encoder.ffn.out.bias";
    pub const LITERAL_W1: &str = "encoder.literal.w1";
    pub const LITERAL_W2: &str = "encoder.literal.w2";

    /// Required for every container, whichever layer variant it holds.
    pub const COMMON: [&str; 15] = [
        TOKEN_TABLE, PROJECTION, POSITIONAL, QUERY_W, QUERY_B, KEY_W, KEY_B, VALUE_W, VALUE_B,
        OUTPUT_W, OUTPUT_B, LN1_GAIN, LN1_BIAS, LN2_GAIN, LN2_BIAS,
    ];
    pub const STANDARD_FFN: [&str; 4] = [FFN_IN_W, FFN_IN_B, FFN_OUT_W, FFN_OUT_B];
    pub const LITERAL: [&str; 2] = [LITERAL_W1, LITERAL_W2];
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImportOptions {
    /// Defaults to 64-wide heads (`hidden / 64`, at least 1).
    pub num_heads: Option<usize>,
    pub use_positional: bool,
    pub layernorm_epsilon: f64,
}

impl Default for ImportOptions {
    fn default() -> Self {
        Self {
            num_heads: None,
            use_positional: true,
            layernorm_epsilon: 1e-12,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ImportedModel {
    pub encoder: Encoder,
    pub embedding: EmbeddingParams,
}

/// Build encoder and embedding parameters from a container holding the full
/// manifest.
pub fn params_from_container(c: &TensorContainer, options: &ImportOptions) -> Result<ImportedModel> {
    use names::*;
    for name in COMMON {
        c.require(name)?;
    }
    let w_q = c.matrix_any(QUERY_W)?;
    let h = w_q.nrows();
    c.require(QUERY_W)?.expect_dims(QUERY_W, &[h, h])?;
    let variant = if c.get(FFN_IN_W).is_some() {
        MapVariant::StandardAlbert
    } else if c.get(LITERAL_W1).is_some() {
        MapVariant::PaperLiteral
    } else {
        return Err(Error::MissingTensor(FFN_IN_W.into()));
    };
    let ln = |g: &str, b: &str| -> Result<LayerNormParams> {
        Ok(LayerNormParams {
            gain: c.vector(g, h)?,
            bias: c.vector(b, h)?,
        })
    };
    let (ffn, intermediate) = match variant {
        MapVariant::StandardAlbert => {
            for name in STANDARD_FFN {
                c.require(name)?;
            }
            let w_in = c.matrix_any(FFN_IN_W)?;
            let i = w_in.ncols();
            c.require(FFN_IN_W)?.expect_dims(FFN_IN_W, &[h, i])?;
            (
                FeedForward::Standard {
                    w_in,
                    b_in: c.vector(FFN_IN_B, i)?,
                    w_out: c.matrix(FFN_OUT_W, [i, h])?,
                    b_out: c.vector(FFN_OUT_B, h)?,
                },
                i,
            )
        }
        MapVariant::PaperLiteral => {
            for name in LITERAL {
                c.require(name)?;
            }
            (
                FeedForward::Literal {
                    w1: c.matrix(LITERAL_W1, [h, h])?,
                    w2: c.matrix(LITERAL_W2, [h, h])?,
                },
                4 * h,
            )
        }
    };
    let params = EncoderParams {
        w_q,
        b_q: c.vector(QUERY_B, h)?,
        w_k: c.matrix(KEY_W, [h, h])?,
        b_k: c.vector(KEY_B, h)?,
        w_v: c.matrix(VALUE_W, [h, h])?,
        b_v: c.vector(VALUE_B, h)?,
        w_o: c.matrix(OUTPUT_W, [h, h])?,
        b_o: c.vector(OUTPUT_B, h)?,
        ln1: ln(LN1_GAIN, LN1_BIAS)?,
        ln2: ln(LN2_GAIN, LN2_BIAS)?,
        ffn,
    };
    let heads = options.num_heads.unwrap_or((h / 64).max(1));
    let mut config = EncoderConfig::new(h, heads)?.with_variant(variant);
    config.intermediate_dim = intermediate;
    config.layernorm_epsilon = options.layernorm_epsilon;
    let encoder = Encoder::new(config, params)?;

    let token_table = c.matrix_any(TOKEN_TABLE)?;
    let e = token_table.ncols();
    let projection = c.matrix(PROJECTION, [e, h])?;
    let positional = c.matrix_any(POSITIONAL)?;
    c.require(POSITIONAL)?.expect_dims(POSITIONAL, &[positional.nrows(), h])?;
    let embedding = EmbeddingParams::new(token_table, projection, positional, options.use_positional)?;
    Ok(ImportedModel { encoder, embedding })
}

pub fn import_weights(path: &Path, options: &ImportOptions) -> Result<ImportedModel> {
    params_from_container(&TensorContainer::read(path)?, options)
}

/// Pack parameters under the manifest names.
pub fn container_from_params(
    params: &EncoderParams,
    embedding: &EmbeddingParams,
    dtype: DType,
) -> TensorContainer {
    use names::*;
    let mut c = TensorContainer::new();
    let mut m = |name: &str, a: &Array2<f64>| c.insert(name, Tensor::from_matrix(a, dtype)).expect("unique manifest");
    m(TOKEN_TABLE, &embedding.token_table);
    m(PROJECTION, &embedding.projection);
    m(POSITIONAL, &embedding.positional);
    m(QUERY_W, &params.w_q);
    m(KEY_W, &params.w_k);
    m(VALUE_W, &params.w_v);
    m(OUTPUT_W, &params.w_o);
    match &params.ffn {
        FeedForward::Standard { w_in, w_out, .. } => {
            m(FFN_IN_W, w_in);
            m(FFN_OUT_W, w_out);
        }
        FeedForward::Literal { w1, w2 } => {
            m(LITERAL_W1, w1);
            m(LITERAL_W2, w2);
        }
    }
    let mut v = |name: &str, a: &Array1<f64>| c.insert(name, Tensor::from_vector(a, dtype)).expect("unique manifest");
    v(QUERY_B, &params.b_q);
    v(KEY_B, &params.b_k);
    v(VALUE_B, &params.b_v);
    v(OUTPUT_B, &params.b_o);
    v(LN1_GAIN, &params.ln1.gain);
    v(LN1_BIAS, &params.ln1.bias);
    v(LN2_GAIN, &params.ln2.gain);
    v(LN2_BIAS, &params.ln2.bias);
    if let FeedForward::Standard { b_in, b_out, .. } = &params.ffn {
        v(FFN_IN_B, b_in);
        v(FFN_OUT_B, b_out);
    }
    c
}

pub fn export_weights(
    path: &Path,
    params: &EncoderParams,
    embedding: &EmbeddingParams,
    dtype: DType,
) -> Result<()> {
    container_from_params(params, embedding, dtype).write(path)
}
