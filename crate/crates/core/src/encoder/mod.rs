//! The shared encoder layer `f` and its iteration as a map on `N_w × N_h`
//! state matrices.
//!
//! Two readings of the layer are available through [`MapVariant`]:
//!
//! - [`MapVariant::StandardAlbert`]: post-norm attention block followed by a
//!   GELU feed-forward block, both residual, as in a released ALBERT layer.
//! - [`MapVariant::PaperLiteral`]: `f(x) = LN2(x W2 + LN1(A(x) W1 + x))`, no
//!   biases and no activation.
//!
//! All arithmetic is `f64`. Matrices are stored input-row × output-column, so a
//! projection is always `x.dot(&w)`.

mod config;
mod layer;
mod params;
mod state;

pub use config::{EncoderConfig, MapVariant};
pub use layer::{
    attention_probabilities, encoder_step, gelu, gelu_scalar, layer_norm, layer_norm_rows,
    multi_head_attention, Encoder,
};
pub use params::{
    init_params, truncated_normal, truncated_normal_matrix, EncoderParams, FeedForward,
    LayerNormParams, INIT_STD,
};
pub use state::{iterate, StateMatrix, StateTrajectory};
