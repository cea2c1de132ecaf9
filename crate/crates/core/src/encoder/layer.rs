use ndarray::{s, Array1, Array2, ArrayView1, ArrayView2, Zip};

use super::config::EncoderConfig;
use super::params::{EncoderParams, FeedForward, LayerNormParams};
use super::state::StateMatrix;
use crate::{Error, Result};

/// `gain * (row - mean) / sqrt(var + epsilon) + bias` with the population variance.
pub fn layer_norm(
    row: ArrayView1<f64>,
    gain: ArrayView1<f64>,
    bias: ArrayView1<f64>,
    epsilon: f64,
) -> Array1<f64> {
    let n = row.len() as f64;
    let mean = row.sum() / n;
    let var = row.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    let inv = 1.0 / (var + epsilon).sqrt();
    let mut out = Array1::zeros(row.len());
    Zip::from(&mut out)
        .and(&row)
        .and(&gain)
        .and(&bias)
        .for_each(|o, &x, &g, &b| {
            let centered = x - mean;
            // epsilon = 0 on a constant row would give 0 * inf
            *o = if centered == 0.0 { b } else { g * centered * inv + b };
        });
    out
}

/// [`layer_norm`] applied to every row of `x`.
pub fn layer_norm_rows(x: ArrayView2<f64>, ln: &LayerNormParams, epsilon: f64) -> Array2<f64> {
    let mut out = Array2::zeros(x.raw_dim());
    for (mut o, r) in out.rows_mut().into_iter().zip(x.rows()) {
        o.assign(&layer_norm(r, ln.gain.view(), ln.bias.view(), epsilon));
    }
    out
}

pub fn gelu_scalar(x: f64) -> f64 {
    0.5 * x * (1.0 + libm::erf(x / std::f64::consts::SQRT_2))
}

/// Exact (erf) GELU, `x Φ(x)`, elementwise.
pub fn gelu(v: ArrayView1<f64>) -> Array1<f64> {
    v.mapv(gelu_scalar)
}

fn project(x: ArrayView2<f64>, w: &Array2<f64>, b: &Array1<f64>) -> Array2<f64> {
    x.dot(w) + b
}

fn softmax_rows_in_place(m: &mut Array2<f64>) {
    for mut row in m.rows_mut() {
        let max = row.fold(f64::NEG_INFINITY, |a, &b| a.max(b));
        row.mapv_inplace(|v| (v - max).exp());
        let sum = row.sum();
        row.mapv_inplace(|v| v / sum);
    }
}

fn head_probabilities(q: &Array2<f64>, k: &Array2<f64>, head: usize, head_dim: usize) -> Array2<f64> {
    let cols = s![.., head * head_dim..(head + 1) * head_dim];
    let scale = 1.0 / (head_dim as f64).sqrt();
    let mut logits = q.slice(cols).dot(&k.slice(cols).t()) * scale;
    softmax_rows_in_place(&mut logits);
    logits
}

/// Row-stochastic `N_w × N_w` attention matrix of one head.
pub fn attention_probabilities(
    x: &StateMatrix,
    params: &EncoderParams,
    config: &EncoderConfig,
    head: usize,
) -> Result<Array2<f64>> {
    if head >= config.num_heads {
        return Err(Error::Precondition(format!(
            "head {head} out of range for {} heads",
            config.num_heads
        )));
    }
    let q = project(x.view(), &params.w_q, &params.b_q);
    let k = project(x.view(), &params.w_k, &params.b_k);
    Ok(head_probabilities(&q, &k, head, config.head_dim))
}

/// Multi-head self-attention `A(x)`.
pub fn multi_head_attention(
    x: &StateMatrix,
    params: &EncoderParams,
    config: &EncoderConfig,
) -> Array2<f64> {
    let q = project(x.view(), &params.w_q, &params.b_q);
    let k = project(x.view(), &params.w_k, &params.b_k);
    let v = project(x.view(), &params.w_v, &params.b_v);
    let d = config.head_dim;
    let mut context = Array2::zeros(v.raw_dim());
    for head in 0..config.num_heads {
        let p = head_probabilities(&q, &k, head, d);
        let cols = s![.., head * d..(head + 1) * d];
        context.slice_mut(cols).assign(&p.dot(&v.slice(cols)));
    }
    project(context.view(), &params.w_o, &params.b_o)
}

/// One application of the encoder map `f`.
pub fn encoder_step(
    x: &StateMatrix,
    params: &EncoderParams,
    config: &EncoderConfig,
) -> Result<StateMatrix> {
    let eps = config.layernorm_epsilon;
    let attn = multi_head_attention(x, params, config);
    let out = match &params.ffn {
        FeedForward::Standard {
            w_in,
            b_in,
            w_out,
            b_out,
        } => {
            let h = layer_norm_rows((x.as_array() + &attn).view(), &params.ln1, eps);
            let mut inner = project(h.view(), w_in, b_in);
            inner.mapv_inplace(gelu_scalar);
            let ff = project(inner.view(), w_out, b_out);
            layer_norm_rows((h + ff).view(), &params.ln2, eps)
        }
        FeedForward::Literal { w1, w2 } => {
            let inner = layer_norm_rows((attn.dot(w1) + x.as_array()).view(), &params.ln1, eps);
            layer_norm_rows((x.dot(w2) + inner).view(), &params.ln2, eps)
        }
    };
    StateMatrix::new(out)
}

/// An encoder layer bundled with its configuration.
#[derive(Debug, Clone)]
pub struct Encoder {
    pub config: EncoderConfig,
    pub params: EncoderParams,
}

impl Encoder {
    pub fn new(config: EncoderConfig, params: EncoderParams) -> Result<Self> {
        config.validate()?;
        params.validate(&config)?;
        Ok(Self { config, params })
    }

    pub fn random(config: EncoderConfig, seed: u64) -> Result<Self> {
        let params = super::init_params(&config, seed)?;
        Ok(Self { config, params })
    }

    pub fn step(&self, x: &StateMatrix) -> Result<StateMatrix> {
        encoder_step(x, &self.params, &self.config)
    }

    /// Attention probabilities of every head at state `x`.
    pub fn attention(&self, x: &StateMatrix) -> Vec<Array2<f64>> {
        let q = project(x.view(), &self.params.w_q, &self.params.b_q);
        let k = project(x.view(), &self.params.w_k, &self.params.b_k);
        (0..self.config.num_heads)
            .map(|h| head_probabilities(&q, &k, h, self.config.head_dim))
            .collect()
    }
}
