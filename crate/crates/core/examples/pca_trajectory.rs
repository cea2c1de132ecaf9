//! Project one encoder orbit onto its three leading principal axes and
//! write the coordinates as CSV to stdout.

use tdlab::dynamics::pca_project;
use tdlab::embedding::{embed, EmbeddingConfig, EmbeddingParams};
use tdlab::encoder::{iterate, Encoder, EncoderConfig};

fn main() -> tdlab::Result<()> {
    let config = EncoderConfig::new(64, 1)?;
    let encoder = Encoder::random(config.clone(), 21)?;
    let embedding = EmbeddingParams::random(
        &EmbeddingConfig {
            vocab_size: 30,
            embedding_dim: 64,
            hidden_dim: 64,
            max_positions: 16,
            use_positional: true,
        },
        22,
    )?;
    let ids: Vec<u32> = (0..16).map(|i| 3 + (i * 5) % 27).collect();
    let traj = iterate(&embed(&ids, &embedding)?, &encoder.params, &config, 2000, 10)?;
    let pca = pca_project(&traj, 3)?;
    eprintln!("explained variance ratio: {:?}", pca.explained_variance_ratio);
    println!("t,pc1,pc2,pc3");
    for (t, row) in pca.times.iter().zip(pca.coordinates.rows()) {
        println!("{t},{},{},{}", row[0], row[1], row[2]);
    }
    Ok(())
}
