//! Iterate a randomly initialised toy encoder on one sentence and watch the
//! token vectors collapse onto each other.

use tdlab::dynamics::{deviation_series, sync_offset, DEFAULT_SYNC_THRESHOLD};
use tdlab::embedding::{build_vocab, embed, tokenize, EmbeddingConfig, EmbeddingParams};
use tdlab::encoder::{iterate, Encoder, EncoderConfig};

fn main() -> tdlab::Result<()> {
    let sentence = "the quiet river carried cold light past the sleeping town";
    let vocab = build_vocab(&[sentence], 64)?;
    let ids = tokenize(sentence, &vocab, 8)?;

    let config = EncoderConfig::new(64, 1)?;
    let encoder = Encoder::random(config.clone(), 7)?;
    let embedding = EmbeddingParams::random(
        &EmbeddingConfig {
            vocab_size: vocab.len(),
            embedding_dim: 32,
            hidden_dim: 64,
            max_positions: 8,
            use_positional: true,
        },
        8,
    )?;
    let x0 = embed(&ids, &embedding)?;
    let traj = iterate(&x0, &encoder.params, &config, 5000, 1)?;
    let d = deviation_series(&traj);
    for t in [0, 10, 100, 500, 1000, 2000, 5000] {
        println!("t={t:>5}  D={:.3e}", d.values[t]);
    }
    match sync_offset(&d, DEFAULT_SYNC_THRESHOLD) {
        Some(t) => println!("synchronised at t={t}"),
        None => println!("not synchronised within 5000 steps"),
    }
    let p = &encoder.attention(traj.last())[0];
    let spread = p.iter().fold(0.0f64, |m, v| m.max((v - 1.0 / 8.0).abs()));
    println!("final attention: max |p - 1/8| = {spread:.2e}");
    Ok(())
}
