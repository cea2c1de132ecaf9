//! Mask one token per sentence and score a softmax readout of the masked
//! position at several depths of the iterated encoder.

use rand::Rng;
use tdlab::embedding::{build_vocab, embed, tokenize, EmbeddingConfig, EmbeddingParams};
use tdlab::encoder::{iterate, Encoder, EncoderConfig};
use tdlab::readout::{layer_sweep, FeatureMap, SoftmaxParams, SweepTask};

// Each sentence's last word is fixed by its first, so it can be recovered from context.
const PAIRS: [(&str, &str); 6] = [
    ("rain", "umbrella"),
    ("snow", "boots"),
    ("sun", "hat"),
    ("wind", "coat"),
    ("night", "lamp"),
    ("sea", "boat"),
];
const FILLER: [&str; 8] = ["we", "took", "a", "the", "our", "then", "so", "brought"];

fn main() -> tdlab::Result<()> {
    let mut rng = tdlab::rng::seeded(4);
    let mut sentences = Vec::new();
    for _ in 0..240 {
        let (cue, answer) = PAIRS[rng.random_range(0..PAIRS.len())];
        let mut words = vec![cue];
        words.extend((0..4).map(|_| FILLER[rng.random_range(0..FILLER.len())]));
        words.push(answer);
        sentences.push(words.join(" "));
    }
    let vocab = build_vocab(&sentences, 64)?;
    let n_tokens = 6;
    let config = EncoderConfig::new(64, 1)?;
    let encoder = Encoder::random(config.clone(), 5)?;
    let embedding = EmbeddingParams::random(
        &EmbeddingConfig {
            vocab_size: vocab.len(),
            embedding_dim: 64,
            hidden_dim: 64,
            max_positions: n_tokens,
            use_positional: true,
        },
        6,
    )?;
    let mut labels = Vec::new();
    let mut trajs = Vec::new();
    for s in &sentences {
        let mut ids = tokenize(s, &vocab, n_tokens)?;
        labels.push(ids[n_tokens - 1]);
        ids[n_tokens - 1] = vocab.mask();
        trajs.push(iterate(&embed(&ids, &embedding)?, &encoder.params, &config, 16, 1)?);
    }
    let task = SweepTask::Classification {
        labels: &labels,
        params: SoftmaxParams { epochs: 400, step: 0.5, ..SoftmaxParams::new(vocab.len()) },
    };
    let rows = FeatureMap::TokenRow(vec![n_tokens - 1; sentences.len()]);
    let scores = layer_sweep(&trajs, &task, &[0, 1, 2, 4, 8, 16], &rows, 0.25, 7)?;
    print!("{}", scores.to_csv());
    println!("chance level is about {:.3}", 1.0 / PAIRS.len() as f64);
    Ok(())
}
