//! Write encoder and embedding parameters to a `TDLAB001` container, read
//! them back, and list the manifest.

use tdlab::container::{export_weights, import_weights, DType, ImportOptions, TensorContainer};
use tdlab::embedding::{EmbeddingConfig, EmbeddingParams};
use tdlab::encoder::{init_params, EncoderConfig};

fn main() -> tdlab::Result<()> {
    let config = EncoderConfig::new(32, 2)?;
    let params = init_params(&config, 1)?;
    let embedding = EmbeddingParams::random(
        &EmbeddingConfig {
            vocab_size: 100,
            embedding_dim: 16,
            hidden_dim: 32,
            max_positions: 32,
            use_positional: true,
        },
        2,
    )?;
    let dir = std::env::temp_dir().join("tdlab-weights-example");
    std::fs::create_dir_all(&dir).map_err(|e| tdlab::Error::Io { path: dir.clone(), source: e })?;
    let path = dir.join("toy.tdlab");
    export_weights(&path, &params, &embedding, DType::F64)?;

    let container = TensorContainer::read(&path)?;
    for name in container.names() {
        println!("{name:<36} {:?}", container.get(name).unwrap().dims);
    }
    let imported = import_weights(&path, &ImportOptions { num_heads: Some(2), ..Default::default() })?;
    println!("round trip identical: {}", imported.encoder.params == params && imported.embedding == embedding);
    Ok(())
}
