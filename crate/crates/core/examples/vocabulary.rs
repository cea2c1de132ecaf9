//! Build a vocabulary from a small corpus, tokenise a sentence and embed it.

use tdlab::embedding::{build_vocab, embed, split_tokens, tokenize, EmbeddingConfig, EmbeddingParams};

fn main() -> tdlab::Result<()> {
    let corpus = [
        "The cat sat on the mat.",
        "A dog sat, the cat ran.",
        "The [MASK] sat down.",
    ];
    let vocab = build_vocab(&corpus, 16)?;
    print!("{}", vocab.to_tsv());
    println!("{:?}", split_tokens(corpus[2]));
    let ids = tokenize("the cat chased a mouse", &vocab, 8)?;
    println!("ids: {ids:?}");
    let embedding = EmbeddingParams::random(
        &EmbeddingConfig {
            vocab_size: vocab.len(),
            embedding_dim: 4,
            hidden_dim: 8,
            max_positions: 8,
            use_positional: false,
        },
        0,
    )?;
    let x0 = embed(&ids, &embedding)?;
    println!("x0 is {} x {}", x0.n_tokens(), x0.hidden_dim());
    Ok(())
}
