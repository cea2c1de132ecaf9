use ndarray::{Array1, Array2};
use rand::Rng as _;
use rand_distr::StandardNormal;

use super::config::{EncoderConfig, MapVariant};
use crate::rng::{self, Rng};
use crate::{Error, Result};

/// Standard deviation of the initial weight distribution.
pub const INIT_STD: f64 = 0.02;

#[derive(Debug, Clone, PartialEq)]
pub struct LayerNormParams {
    pub gain: Array1<f64>,
    pub bias: Array1<f64>,
}

impl LayerNormParams {
    pub fn identity(dim: usize) -> Self {
        Self {
            gain: Array1::ones(dim),
            bias: Array1::zeros(dim),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum FeedForward {
    /// `h -> gelu(h W_in + b_in) W_out + b_out`.
    Standard {
        w_in: Array2<f64>,
        b_in: Array1<f64>,
        w_out: Array2<f64>,
        b_out: Array1<f64>,
    },
    /// The two bias-free `N_h × N_h` matrices of the literal map.
    Literal { w1: Array2<f64>, w2: Array2<f64> },
}

/// Every tensor of the shared encoder layer.
#[derive(Debug, Clone, PartialEq)]
pub struct EncoderParams {
    pub w_q: Array2<f64>,
    pub b_q: Array1<f64>,
    pub w_k: Array2<f64>,
    pub b_k: Array1<f64>,
    pub w_v: Array2<f64>,
    pub b_v: Array1<f64>,
    pub w_o: Array2<f64>,
    pub b_o: Array1<f64>,
    pub ln1: LayerNormParams,
    pub ln2: LayerNormParams,
    pub ffn: FeedForward,
}

/// Draws `n` values from `N(0, std^2)` and clips them to `[-2 std, 2 std]`.
pub fn truncated_normal(rng: &mut Rng, n: usize, std: f64) -> Vec<f64> {
    let bound = 2.0 * std;
    (0..n)
        .map(|_| {
            let z: f64 = rng.sample(StandardNormal);
            (z * std).clamp(-bound, bound)
        })
        .collect()
}

/// Row-major `rows × cols` matrix of [`truncated_normal`] draws at [`INIT_STD`].
pub fn truncated_normal_matrix(rng: &mut Rng, rows: usize, cols: usize) -> Array2<f64> {
    Array2::from_shape_vec((rows, cols), truncated_normal(rng, rows * cols, INIT_STD))
        .expect("shape matches sample count")
}

/// Random initial parameters: clipped-normal weights, zero biases, unit
/// layer-norm gains. The same seed always yields bit-identical parameters.
pub fn init_params(config: &EncoderConfig, seed: u64) -> Result<EncoderParams> {
    config.validate()?;
    let n = config.hidden_dim;
    let mut rng = rng::seeded(seed);
    let w_q = truncated_normal_matrix(&mut rng, n, n);
    let w_k = truncated_normal_matrix(&mut rng, n, n);
    let w_v = truncated_normal_matrix(&mut rng, n, n);
    let w_o = truncated_normal_matrix(&mut rng, n, n);
    let ffn = match config.variant {
        MapVariant::StandardAlbert => FeedForward::Standard {
            w_in: truncated_normal_matrix(&mut rng, n, config.intermediate_dim),
            b_in: Array1::zeros(config.intermediate_dim),
            w_out: truncated_normal_matrix(&mut rng, config.intermediate_dim, n),
            b_out: Array1::zeros(n),
        },
        MapVariant::PaperLiteral => FeedForward::Literal {
            w1: truncated_normal_matrix(&mut rng, n, n),
            w2: truncated_normal_matrix(&mut rng, n, n),
        },
    };
    Ok(EncoderParams {
        w_q,
        b_q: Array1::zeros(n),
        w_k,
        b_k: Array1::zeros(n),
        w_v,
        b_v: Array1::zeros(n),
        w_o,
        b_o: Array1::zeros(n),
        ln1: LayerNormParams::identity(n),
        ln2: LayerNormParams::identity(n),
        ffn,
    })
}

impl EncoderParams {
    pub fn variant(&self) -> MapVariant {
        match self.ffn {
            FeedForward::Standard { .. } => MapVariant::StandardAlbert,
            FeedForward::Literal { .. } => MapVariant::PaperLiteral,
        }
    }

    /// Check every tensor against `config` and that all entries are finite.
    pub fn validate(&self, config: &EncoderConfig) -> Result<()> {
        let n = config.hidden_dim;
        let mut mats: Vec<(&str, &Array2<f64>, [usize; 2])> = vec![
            ("w_q", &self.w_q, [n, n]),
            ("w_k", &self.w_k, [n, n]),
            ("w_v", &self.w_v, [n, n]),
            ("w_o", &self.w_o, [n, n]),
        ];
        let mut vecs: Vec<(&str, &Array1<f64>, usize)> = vec![
            ("b_q", &self.b_q, n),
            ("b_k", &self.b_k, n),
            ("b_v", &self.b_v, n),
            ("b_o", &self.b_o, n),
            ("ln1.gain", &self.ln1.gain, n),
            ("ln1.bias", &self.ln1.bias, n),
            ("ln2.gain", &self.ln2.gain, n),
            ("ln2.bias", &self.ln2.bias, n),
        ];
        match (&self.ffn, config.variant) {
            (
                FeedForward::Standard {
                    w_in,
                    b_in,
                    w_out,
                    b_out,
                },
                MapVariant::StandardAlbert,
            ) => {
                let i = config.intermediate_dim;
                mats.push(("ffn.w_in", w_in, [n, i]));
                mats.push(("ffn.w_out", w_out, [i, n]));
                vecs.push(("ffn.b_in", b_in, i));
                vecs.push(("ffn.b_out", b_out, n));
            }
            (FeedForward::Literal { w1, w2 }, MapVariant::PaperLiteral) => {
                mats.push(("w1", w1, [n, n]));
                mats.push(("w2", w2, [n, n]));
            }
            (_, variant) => {
                return Err(Error::Config(format!(
                    "parameters are for {:?} but config asks for {variant:?}",
                    self.variant()
                )))
            }
        }
        for (name, m, dims) in mats {
            if m.shape() != dims {
                return Err(Error::Shape {
                    name: name.into(),
                    expected: dims.to_vec(),
                    actual: m.shape().to_vec(),
                });
            }
            if m.iter().any(|v| !v.is_finite()) {
                return Err(Error::Config(format!("tensor {name} has non-finite entries")));
            }
        }
        for (name, v, len) in vecs {
            if v.len() != len {
                return Err(Error::Shape {
                    name: name.into(),
                    expected: vec![len],
                    actual: vec![v.len()],
                });
            }
            if v.iter().any(|x| !x.is_finite()) {
                return Err(Error::Config(format!("tensor {name} has non-finite entries")));
            }
        }
        Ok(())
    }
}
