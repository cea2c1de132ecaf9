use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum MapVariant {
    #[default]
    StandardAlbert,
    PaperLiteral,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EncoderConfig {
    pub hidden_dim: usize,
    pub num_heads: usize,
    pub head_dim: usize,
    pub intermediate_dim: usize,
    #[serde(default)]
    pub variant: MapVariant,
    #[serde(default = "default_epsilon")]
    pub layernorm_epsilon: f64,
}

fn default_epsilon() -> f64 {
    1e-12
}

impl EncoderConfig {
    /// Standard layer with `num_heads` heads of width `hidden_dim / num_heads`
    /// and a `4 * hidden_dim` feed-forward block.
    pub fn new(hidden_dim: usize, num_heads: usize) -> Result<Self> {
        if num_heads == 0 || hidden_dim % num_heads != 0 {
            return Err(Error::Config(format!(
                "hidden_dim {hidden_dim} is not divisible by num_heads {num_heads}"
            )));
        }
        let config = Self {
            hidden_dim,
            num_heads,
            head_dim: hidden_dim / num_heads,
            intermediate_dim: 4 * hidden_dim,
            variant: MapVariant::StandardAlbert,
            layernorm_epsilon: default_epsilon(),
        };
        config.validate()?;
        Ok(config)
    }

    /// Head count fixed by 64-wide heads (`N_a = N_h / 64`), falling back to a
    /// single head below 64.
    pub fn with_default_heads(hidden_dim: usize) -> Result<Self> {
        Self::new(hidden_dim, (hidden_dim / 64).max(1))
    }

    pub fn with_variant(mut self, variant: MapVariant) -> Self {
        self.variant = variant;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.hidden_dim == 0 || self.num_heads == 0 || self.head_dim == 0 {
            return Err(Error::Config("encoder dimensions must be positive".into()));
        }
        if self.num_heads * self.head_dim != self.hidden_dim {
            return Err(Error::Config(format!(
                "num_heads ({}) * head_dim ({}) != hidden_dim ({})",
                self.num_heads, self.head_dim, self.hidden_dim
            )));
        }
        if self.variant == MapVariant::StandardAlbert && self.intermediate_dim < self.hidden_dim {
            return Err(Error::Config(format!(
                "intermediate_dim ({}) must be at least hidden_dim ({})",
                self.intermediate_dim, self.hidden_dim
            )));
        }
        if !(self.layernorm_epsilon >= 0.0 && self.layernorm_epsilon.is_finite()) {
            return Err(Error::Config("layernorm_epsilon must be finite and >= 0".into()));
        }
        Ok(())
    }
}
