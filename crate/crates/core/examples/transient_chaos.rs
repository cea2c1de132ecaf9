//! Local Lyapunov exponents of encoder orbits and the length of their
//! chaotic transient.

use tdlab::dynamics::{local_lyapunov, transient_chaos_length, LleParams, LyapunovSeries, DEFAULT_CONSECUTIVE};
use tdlab::embedding::{embed, EmbeddingConfig, EmbeddingParams};
use tdlab::encoder::{Encoder, EncoderConfig};

fn main() -> tdlab::Result<()> {
    // a series that turns negative for good after three positive windows
    let fixture = LyapunovSeries::from_raw(vec![0.4, 0.2, 0.1, -0.1, -0.2, -0.3, -0.2, -0.4, -0.5], 10, 90);
    let tc = transient_chaos_length(&fixture, DEFAULT_CONSECUTIVE)?;
    println!("fixture: {} length {}", tc.class.as_str(), tc.length);

    let embedding = EmbeddingParams::random(
        &EmbeddingConfig {
            vocab_size: 40,
            embedding_dim: 64,
            hidden_dim: 64,
            max_positions: 16,
            use_positional: true,
        },
        1,
    )?;
    for seed in 0..5 {
        let encoder = Encoder::random(EncoderConfig::new(64, 1)?, 100 + seed)?;
        let ids: Vec<u32> = (0..16).map(|i| 3 + (i * 7 + seed as u32) % 37).collect();
        let x0 = embed(&ids, &embedding)?;
        let lle = local_lyapunov(&encoder, &x0, &LleParams { k: 1.0, tau: 10, horizon: 3000, seed })?;
        let tc = transient_chaos_length(&lle, DEFAULT_CONSECUTIVE)?;
        let first: Vec<String> = lle.per_step.values.iter().take(4).map(|v| format!("{v:+.4}")).collect();
        println!(
            "encoder {seed}: lambda[0..4] = [{}]  mean {:+.5}  -> {} (length {})",
            first.join(", "),
            lle.mean_per_step().unwrap_or(f64::NAN),
            tc.class.as_str(),
            tc.length
        );
    }
    Ok(())
}
