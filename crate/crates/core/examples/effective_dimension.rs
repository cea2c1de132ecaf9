//! Effective dimension of an ensemble of sentence trajectories over time.

use tdlab::dynamics::{effective_dimension_over, participation_ratio};
use tdlab::embedding::{embed, EmbeddingConfig, EmbeddingParams};
use tdlab::encoder::{iterate, Encoder, EncoderConfig};
use tdlab::harness::synthetic_sentences;

fn main() -> tdlab::Result<()> {
    // normalised spectrum {0.5, 0.3, 0.2}: 1 / (0.25 + 0.09 + 0.04)
    let data = ndarray::array![
        [0.5f64.sqrt(), 0.0, 0.0],
        [-(0.5f64.sqrt()), 0.0, 0.0],
        [0.0, 0.3f64.sqrt(), 0.0],
        [0.0, -(0.3f64.sqrt()), 0.0],
        [0.0, 0.0, 0.2f64.sqrt()],
        [0.0, 0.0, -(0.2f64.sqrt())],
    ];
    println!("participation ratio of the fixture: {:.4}", participation_ratio(data.view())?);

    let (sentences, _) = synthetic_sentences(60, 12, 1);
    let vocab = tdlab::embedding::build_vocab(&sentences, 256)?;
    let config = EncoderConfig::new(64, 1)?;
    let encoder = Encoder::random(config.clone(), 2)?;
    let embedding = EmbeddingParams::random(
        &EmbeddingConfig {
            vocab_size: vocab.len(),
            embedding_dim: 64,
            hidden_dim: 64,
            max_positions: 12,
            use_positional: true,
        },
        3,
    )?;
    let trajs = sentences
        .iter()
        .map(|s| {
            let x0 = embed(&tdlab::embedding::tokenize(s, &vocab, 12)?, &embedding)?;
            iterate(&x0, &encoder.params, &config, 400, 20)
        })
        .collect::<tdlab::Result<Vec<_>>>()?;
    let n_eff = effective_dimension_over(&trajs)?;
    for (t, v) in n_eff.iter() {
        println!("t={t:>4}  N_eff={v:.3}");
    }
    Ok(())
}
