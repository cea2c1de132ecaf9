//! Sentence ingestion: text corpora, pre-tokenised id files, and two synthetic
//! topic populations for desk-scale runs.

use rand::seq::index::sample;
use rand::Rng as _;

use super::config::ExperimentConfig;
use crate::embedding::{build_vocab, parse_token_ids, tokenize, Vocabulary};
use crate::rng;
use crate::{Error, Result};

/// Word pools for the two synthetic sentence classes. No word occurs in both.
pub const TOPIC_POOLS: [&[&str]; 2] = [
    &[
        "river", "forest", "mountain", "valley", "meadow", "stone", "rain", "wind", "snow", "lake",
        "bird", "deer", "wolf", "fox", "tree", "leaf", "grass", "hill", "cloud", "sun", "moon",
        "field", "flower", "seed", "root", "branch", "shore", "wave", "sand", "frost", "bloom",
        "nest",
    ],
    &[
        "market", "price", "bank", "loan", "stock", "trade", "profit", "budget", "tax", "bond",
        "share", "fund", "credit", "debt", "rate", "cash", "deal", "firm", "wage", "cost", "asset",
        "index", "yield", "broker", "client", "invoice", "margin", "audit", "equity", "ledger",
        "merger", "payroll",
    ],
];

/// Token ids ready for embedding, with an optional class per sentence.
#[derive(Debug, Clone, PartialEq)]
pub struct Ensemble {
    pub ids: Vec<Vec<u32>>,
    pub labels: Option<Vec<usize>>,
    /// Present when sentences were tokenised from text.
    pub vocab: Option<Vocabulary>,
    /// Number of rows the token table must have.
    pub vocab_size: usize,
}

/// `n` sentences of `len` words; sentence `i` draws uniformly from pool `i % 2`.
pub fn synthetic_sentences(n: usize, len: usize, seed: u64) -> (Vec<String>, Vec<usize>) {
    let mut rng = rng::seeded(seed);
    (0..n)
        .map(|i| {
            let pool = TOPIC_POOLS[i % 2];
            let words: Vec<&str> = (0..len).map(|_| pool[rng.random_range(0..pool.len())]).collect();
            (words.join(" "), i % 2)
        })
        .unzip()
}

fn read(config: &ExperimentConfig, p: &std::path::Path) -> Result<String> {
    let path = config.resolve(p);
    std::fs::read_to_string(&path).map_err(|e| Error::io(path, e))
}

fn parse_labels(text: &str) -> Result<Vec<usize>> {
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .enumerate()
        .map(|(i, l)| {
            l.trim()
                .parse()
                .map_err(|_| Error::Config(format!("label line {}: `{}` is not a class index", i + 1, l.trim())))
        })
        .collect()
}

fn fit_length(mut ids: Vec<u32>, n: usize, pad: u32) -> Vec<u32> {
    ids.resize(n, pad);
    ids
}

/// Collect `n_sentences` token-id sequences of length `n_tokens`. Lines are
/// sampled without replacement from a corpus when one is configured.
pub fn load_ensemble(config: &ExperimentConfig, vocab_limit: Option<usize>) -> Result<Ensemble> {
    let n = config.n_sentences;
    let labels = config.corpus.labels.as_ref().map(|p| read(config, p).and_then(|t| parse_labels(&t))).transpose()?;
    let pick = |available: usize| -> Result<Vec<usize>> {
        if available < n {
            return Err(Error::Config(format!("corpus has {available} sentences, {n} requested")));
        }
        if let Some(l) = &labels {
            if l.len() != available {
                return Err(Error::Config(format!("{} labels for {available} corpus lines", l.len())));
            }
        }
        let mut idx = sample(&mut rng::stream(config.seed, 2), available, n).into_vec();
        idx.sort_unstable();
        Ok(idx)
    };
    let select = |idx: &[usize]| labels.as_ref().map(|l| idx.iter().map(|&i| l[i]).collect());

    if let Some(p) = &config.corpus.pretokenized {
        let all = parse_token_ids(&read(config, p)?)?;
        let idx = pick(all.len())?;
        let ids: Vec<Vec<u32>> = idx.iter().map(|&i| fit_length(all[i].clone(), config.n_tokens, 0)).collect();
        let max_id = ids.iter().flatten().copied().max().unwrap_or(0) as usize;
        return Ok(Ensemble {
            labels: select(&idx),
            vocab: None,
            vocab_size: vocab_limit.unwrap_or((max_id + 1).max(3)),
            ids,
        });
    }

    let (sentences, labels_out) = match &config.corpus.path {
        Some(p) => {
            let text = read(config, p)?;
            let lines: Vec<&str> = text.lines().filter(|l| !l.trim().is_empty()).collect();
            let idx = pick(lines.len())?;
            (idx.iter().map(|&i| lines[i].to_string()).collect::<Vec<_>>(), select(&idx))
        }
        None => {
            let (s, l) = synthetic_sentences(n, config.n_tokens, rng::derive_seed(config.seed, 2));
            (s, Some(l))
        }
    };
    let max_vocab = vocab_limit.or(config.corpus.max_vocab).unwrap_or(4096);
    let vocab = build_vocab(&sentences, max_vocab)?;
    let ids = sentences
        .iter()
        .map(|s| tokenize(s, &vocab, config.n_tokens))
        .collect::<Result<Vec<_>>>()?;
    Ok(Ensemble {
        ids,
        labels: labels_out,
        vocab_size: vocab_limit.unwrap_or(vocab.len()),
        vocab: Some(vocab),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::config::ExperimentKind;

    #[test]
    fn pools_are_disjoint() {
        for w in TOPIC_POOLS[0] {
            assert!(!TOPIC_POOLS[1].contains(w));
        }
    }

    #[test]
    fn synthetic_classes_use_their_pool() {
        let (s, l) = synthetic_sentences(6, 5, 1);
        assert_eq!(l, vec![0, 1, 0, 1, 0, 1]);
        for (sentence, class) in s.iter().zip(&l) {
            assert_eq!(sentence.split(' ').count(), 5);
            assert!(sentence.split(' ').all(|w| TOPIC_POOLS[*class].contains(&w)));
        }
        assert_eq!(synthetic_sentences(6, 5, 1), (s, l));
    }

    #[test]
    fn pretokenized_lines_are_padded() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("ids.txt"), "5 6 7\n4 4 4 4 4 4\n").unwrap();
        let mut c = ExperimentConfig::new(ExperimentKind::Sync);
        c.base_dir = dir.path().to_path_buf();
        c.corpus.pretokenized = Some("ids.txt".into());
        c.n_sentences = 2;
        c.n_tokens = 4;
        let e = load_ensemble(&c, None).unwrap();
        assert_eq!(e.ids, vec![vec![5, 6, 7, 0], vec![4, 4, 4, 4]]);
        assert_eq!(e.vocab_size, 8);
        c.n_sentences = 3;
        assert!(matches!(load_ensemble(&c, None), Err(Error::Config(_))));
    }
}
