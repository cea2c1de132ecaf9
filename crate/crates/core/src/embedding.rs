//! Vocabulary, tokenisation and the embedding map `x_0 = u(s)`.
//!
//! The tokenizer is deliberately simple: text is lowercased and split on
//! whitespace, with every punctuation character emitted as its own token.
//! The literals `[UNK]`, `[MASK]` and `[SEP]` are recognised verbatim.

use std::collections::HashMap;
use std::path::Path;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::encoder::{truncated_normal_matrix, StateMatrix};
use crate::rng;
use crate::{Error, Result};

pub const UNK: &str = "[UNK]";
pub const MASK: &str = "[MASK]";
pub const SEP: &str = "[SEP]";
const RESERVED: [&str; 3] = [UNK, MASK, SEP];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocabulary {
    tokens: Vec<String>,
    ids: HashMap<String, u32>,
}

impl Vocabulary {
    fn from_tokens(tokens: Vec<String>) -> Result<Self> {
        let mut ids = HashMap::with_capacity(tokens.len());
        for (i, t) in tokens.iter().enumerate() {
            if ids.insert(t.clone(), i as u32).is_some() {
                return Err(Error::Config(format!("duplicate vocabulary entry `{t}`")));
            }
        }
        for r in RESERVED {
            if !ids.contains_key(r) {
                return Err(Error::Config(format!("vocabulary lacks reserved token {r}")));
            }
        }
        Ok(Self { tokens, ids })
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn id(&self, token: &str) -> Option<u32> {
        self.ids.get(token).copied()
    }

    pub fn token(&self, id: u32) -> Option<&str> {
        self.tokens.get(id as usize).map(String::as_str)
    }

    pub fn unk(&self) -> u32 {
        self.ids[UNK]
    }

    pub fn mask(&self) -> u32 {
        self.ids[MASK]
    }

    pub fn sep(&self) -> u32 {
        self.ids[SEP]
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    /// `token<TAB>id` lines in id order.
    pub fn to_tsv(&self) -> String {
        self.tokens
            .iter()
            .enumerate()
            .map(|(i, t)| format!("{t}\t{i}\n"))
            .collect()
    }

    pub fn from_tsv(text: &str) -> Result<Self> {
        let mut entries = Vec::new();
        for (n, line) in text.lines().enumerate().filter(|(_, l)| !l.is_empty()) {
            let (tok, id) = line
                .rsplit_once('\t')
                .ok_or_else(|| Error::Config(format!("vocab line {} lacks a tab", n + 1)))?;
            let id: usize = id
                .trim()
                .parse()
                .map_err(|_| Error::Config(format!("vocab line {} has a bad id", n + 1)))?;
            entries.push((id, tok.to_string()));
        }
        entries.sort();
        if entries.iter().enumerate().any(|(i, (id, _))| *id != i) {
            return Err(Error::Config("vocabulary ids are not contiguous from 0".into()));
        }
        Self::from_tokens(entries.into_iter().map(|(_, t)| t).collect())
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_tsv()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_tsv(&text)
    }
}

/// Split a line into lowercase word tokens and single-character punctuation
/// tokens.
pub fn split_tokens(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    for chunk in text.split_whitespace() {
        if RESERVED.contains(&chunk) {
            out.push(chunk.to_string());
            continue;
        }
        let mut word = String::new();
        for c in chunk.chars() {
            if c.is_alphanumeric() {
                word.extend(c.to_lowercase());
            } else {
                if !word.is_empty() {
                    out.push(std::mem::take(&mut word));
                }
                out.push(c.to_string());
            }
        }
        if !word.is_empty() {
            out.push(word);
        }
    }
    out
}

/// Frequency-ranked vocabulary of at most `max_size` entries, reserved tokens
/// first. Ties are broken lexicographically.
pub fn build_vocab<S: AsRef<str>>(corpus: &[S], max_size: usize) -> Result<Vocabulary> {
    if max_size <= RESERVED.len() {
        return Err(Error::Config(format!(
            "max_size must exceed the {} reserved tokens",
            RESERVED.len()
        )));
    }
    let mut counts: HashMap<String, usize> = HashMap::new();
    for line in corpus {
        for tok in split_tokens(line.as_ref()) {
            if !RESERVED.contains(&tok.as_str()) {
                *counts.entry(tok).or_default() += 1;
            }
        }
    }
    if counts.is_empty() {
        return Err(Error::Config("corpus contains no tokens".into()));
    }
    let mut ranked: Vec<(String, usize)> = counts.into_iter().collect();
    ranked.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    let tokens = RESERVED
        .iter()
        .map(|s| s.to_string())
        .chain(ranked.into_iter().map(|(t, _)| t))
        .take(max_size)
        .collect();
    Vocabulary::from_tokens(tokens)
}

/// Exactly `n_tokens` ids: truncated, or right-padded with `[UNK]`.
pub fn tokenize(text: &str, vocab: &Vocabulary, n_tokens: usize) -> Result<Vec<u32>> {
    if n_tokens == 0 {
        return Err(Error::Precondition("n_tokens must be at least 1".into()));
    }
    let toks = split_tokens(text);
    if toks.is_empty() {
        return Err(Error::Precondition("cannot tokenize empty text".into()));
    }
    let unk = vocab.unk();
    let mut ids: Vec<u32> = toks
        .iter()
        .take(n_tokens)
        .map(|t| vocab.id(t).unwrap_or(unk))
        .collect();
    ids.resize(n_tokens, unk);
    Ok(ids)
}

/// Parse pre-tokenized input: one sentence per line, space-separated ids.
pub fn parse_token_ids(text: &str) -> Result<Vec<Vec<u32>>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(n, line)| {
            line.split_whitespace()
                .map(|t| {
                    t.parse::<u32>().map_err(|_| {
                        Error::Config(format!("line {}: `{t}` is not a token id", n + 1))
                    })
                })
                .collect()
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmbeddingConfig {
    pub vocab_size: usize,
    pub embedding_dim: usize,
    pub hidden_dim: usize,
    pub max_positions: usize,
    pub use_positional: bool,
}

/// Factorised embedding: a `V × E` lookup followed by an `E × N_h`
/// projection, plus an optional `P_max × N_h` positional table.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingParams {
    pub token_table: Array2<f64>,
    pub projection: Array2<f64>,
    pub positional: Array2<f64>,
    pub use_positional: bool,
}

impl EmbeddingParams {
    pub fn new(
        token_table: Array2<f64>,
        projection: Array2<f64>,
        positional: Array2<f64>,
        use_positional: bool,
    ) -> Result<Self> {
        let p = Self {
            token_table,
            projection,
            positional,
            use_positional,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let e = self.token_table.ncols();
        let h = self.projection.ncols();
        if self.projection.nrows() != e {
            return Err(Error::Shape {
                name: "embedding.projection".into(),
                expected: vec![e, h],
                actual: self.projection.shape().to_vec(),
            });
        }
        if e > h {
            return Err(Error::Config(format!(
                "embedding_dim {e} exceeds hidden_dim {h}"
            )));
        }
        if self.positional.ncols() != h {
            return Err(Error::Shape {
                name: "embedding.positional".into(),
                expected: vec![self.positional.nrows(), h],
                actual: self.positional.shape().to_vec(),
            });
        }
        Ok(())
    }

    pub fn vocab_size(&self) -> usize {
        self.token_table.nrows()
    }

    pub fn embedding_dim(&self) -> usize {
        self.token_table.ncols()
    }

    pub fn hidden_dim(&self) -> usize {
        self.projection.ncols()
    }

    pub fn max_positions(&self) -> usize {
        self.positional.nrows()
    }

    /// Clipped-normal tables drawn the same way as encoder weights.
    pub fn random(config: &EmbeddingConfig, seed: u64) -> Result<Self> {
        if config.embedding_dim == 0 || config.vocab_size == 0 || config.max_positions == 0 {
            return Err(Error::Config("embedding dimensions must be positive".into()));
        }
        let mut rng = rng::seeded(seed);
        let token_table =
            truncated_normal_matrix(&mut rng, config.vocab_size, config.embedding_dim);
        let projection =
            truncated_normal_matrix(&mut rng, config.embedding_dim, config.hidden_dim);
        let positional =
            truncated_normal_matrix(&mut rng, config.max_positions, config.hidden_dim);
        Self::new(token_table, projection, positional, config.use_positional)
    }
}

/// `x_0[i] = token_table[id_i] · projection (+ positional[i])`.
pub fn embed(ids: &[u32], params: &EmbeddingParams) -> Result<StateMatrix> {
    if ids.is_empty() {
        return Err(Error::Precondition("cannot embed an empty id sequence".into()));
    }
    if ids.len() > params.max_positions() {
        return Err(Error::Precondition(format!(
            "{} tokens exceed the {} supported positions",
            ids.len(),
            params.max_positions()
        )));
    }
    let v = params.vocab_size();
    let rows: Vec<usize> = ids
        .iter()
        .map(|&id| {
            if (id as usize) < v {
                Ok(id as usize)
            } else {
                Err(Error::TokenOutOfRange { id, vocab_size: v })
            }
        })
        .collect::<Result<_>>()?;
    let lookup = params.token_table.select(ndarray::Axis(0), &rows);
    let mut x = lookup.dot(&params.projection);
    if params.use_positional {
        x += &params.positional.slice(ndarray::s![..ids.len(), ..]);
    }
    StateMatrix::new(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    fn vocab_ab() -> Vocabulary {
        build_vocab(&["a b a"], 10).unwrap()
    }

    #[test]
    fn frequency_order_and_reserved() {
        let v = vocab_ab();
        assert_eq!(v.len(), 5);
        assert_eq!((v.unk(), v.mask(), v.sep()), (0, 1, 2));
        assert!(v.id("a").unwrap() < v.id("b").unwrap());
        assert_eq!(build_vocab(&["a b a"], 10).unwrap(), v);
    }

    #[test]
    fn hand_tallied_fixture() {
        // the:4 cat:3 sat:2 ".":2, then ",", a, dog, mat, on once each; ties sort lexicographically
        let corpus = [
            "The cat sat on the mat.",
            "The cat, the dog",
            "A cat sat.",
        ];
        let v = build_vocab(&corpus, 100).unwrap();
        let expected = [
            "[UNK]", "[MASK]", "[SEP]", "the", "cat", ".", "sat", ",", "a", "dog", "mat", "on",
        ];
        assert_eq!(v.tokens(), expected);
        let small = build_vocab(&corpus, 6).unwrap();
        assert_eq!(small.tokens(), &expected[..6]);
    }

    #[test]
    fn vocab_errors() {
        assert!(matches!(build_vocab::<&str>(&[], 10), Err(Error::Config(_))));
        assert!(matches!(build_vocab(&["   "], 10), Err(Error::Config(_))));
        assert!(matches!(build_vocab(&["a"], 3), Err(Error::Config(_))));
    }

    #[test]
    fn tsv_round_trip() {
        let v = build_vocab(&["x y z x"], 10).unwrap();
        assert_eq!(Vocabulary::from_tsv(&v.to_tsv()).unwrap(), v);
        assert!(Vocabulary::from_tsv("a\t1\n").is_err());
    }

    #[test]
    fn tokenize_lookup_oov_and_padding() {
        let v = vocab_ab();
        let (a, b) = (v.id("a").unwrap(), v.id("b").unwrap());
        assert_eq!(tokenize("a b", &v, 2).unwrap(), vec![a, b]);
        assert_eq!(tokenize("a zq", &v, 2).unwrap(), vec![a, v.unk()]);
        assert_eq!(tokenize("b", &v, 3).unwrap(), vec![b, v.unk(), v.unk()]);
        assert_eq!(tokenize("a [SEP] b", &v, 3).unwrap(), vec![a, v.sep(), b]);
        assert!(tokenize("", &v, 2).is_err());
        assert!(tokenize("a", &v, 0).is_err());
    }

    #[test]
    fn tokenize_truncates_to_prefix() {
        let words: Vec<String> = (0..40).map(|i| format!("w{}", i % 13)).collect();
        let line = words.join(" ");
        let v = build_vocab(&[line.as_str()], 100).unwrap();
        let full = tokenize(&line, &v, 40).unwrap();
        assert_eq!(tokenize(&line, &v, 32).unwrap(), full[..32].to_vec());
    }

    #[test]
    fn parses_pretokenized() {
        assert_eq!(
            parse_token_ids("1 2 3\n\n4 5\n").unwrap(),
            vec![vec![1, 2, 3], vec![4, 5]]
        );
        assert!(parse_token_ids("1 x").is_err());
    }

    fn hand_params(use_positional: bool) -> EmbeddingParams {
        EmbeddingParams::new(
            array![[1.0, 0.0], [0.0, 1.0], [1.0, 2.0]],
            array![[1.0, 2.0, 0.0, -1.0], [0.0, 1.0, 3.0, 1.0]],
            array![[0.5, 0.0, 0.0, 0.0], [0.0, 0.5, 0.0, 0.0], [0.0, 0.0, 0.5, 0.0]],
            use_positional,
        )
        .unwrap()
    }

    #[test]
    fn embed_matches_hand_product() {
        let x = embed(&[2, 0, 1], &hand_params(false)).unwrap();
        // [1,2]·P = [1, 4, 6, 1]; [1,0]·P = [1,2,0,-1]; [0,1]·P = [0,1,3,1]
        assert_eq!(
            x.as_array(),
            &array![[1.0, 4.0, 6.0, 1.0], [1.0, 2.0, 0.0, -1.0], [0.0, 1.0, 3.0, 1.0]]
        );
        let xp = embed(&[2, 0, 1], &hand_params(true)).unwrap();
        assert_eq!(
            xp.as_array(),
            &array![[1.5, 4.0, 6.0, 1.0], [1.0, 2.5, 0.0, -1.0], [0.0, 1.0, 3.5, 1.0]]
        );
    }

    #[test]
    fn embed_edge_cases() {
        let mut p = hand_params(false);
        let x = embed(&[1, 0, 1], &p).unwrap();
        assert_eq!(x.row(0), x.row(2));
        assert!(matches!(
            embed(&[3], &p),
            Err(Error::TokenOutOfRange { id: 3, vocab_size: 3 })
        ));
        assert!(embed(&[0, 0, 0, 0], &p).is_err());
        assert!(embed(&[], &p).is_err());
        p.token_table.fill(0.0);
        assert!(embed(&[0, 1, 2], &p).unwrap().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn rejects_expanding_factorisation() {
        let r = EmbeddingParams::new(
            Array2::zeros((3, 5)),
            Array2::zeros((5, 4)),
            Array2::zeros((2, 4)),
            true,
        );
        assert!(r.is_err());
    }
}
