//! Distance between an encoder orbit and a copy kicked at `t = 0`.

use tdlab::dynamics::perturbation_response;
use tdlab::embedding::{embed, EmbeddingConfig, EmbeddingParams};
use tdlab::encoder::{Encoder, EncoderConfig};

fn main() -> tdlab::Result<()> {
    let encoder = Encoder::random(EncoderConfig::new(64, 1)?, 3)?;
    let embedding = EmbeddingParams::random(
        &EmbeddingConfig {
            vocab_size: 50,
            embedding_dim: 64,
            hidden_dim: 64,
            max_positions: 16,
            use_positional: true,
        },
        4,
    )?;
    let ids: Vec<u32> = (3..19).collect();
    let x0 = embed(&ids, &embedding)?;
    for eps in [1e-6, 1e-2, 1.0] {
        let r = perturbation_response(&encoder, &x0, eps, 2000, 9)?;
        let at = |t: usize| r.values[t];
        println!(
            "|eps|={eps:<6} d(0)={:.2e} d(10)={:.2e} d(100)={:.2e} d(1000)={:.2e} d(2000)={:.2e}",
            at(0),
            at(10),
            at(100),
            at(1000),
            at(2000)
        );
    }
    Ok(())
}
