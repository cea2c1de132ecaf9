use rand::seq::SliceRandom;

use crate::rng;
use crate::{Error, Result};

/// Disjoint train/eval item indices, each sorted ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Split {
    pub train: Vec<usize>,
    pub eval: Vec<usize>,
}

/// Shuffle each stratum with its own stream and hold out `eval_fraction` of
/// it (at least one item, and at least one kept for training).
pub fn stratified_split(strata: &[usize], eval_fraction: f64, seed: u64) -> Result<Split> {
    if !(eval_fraction > 0.0 && eval_fraction < 1.0) {
        return Err(Error::Precondition("eval_fraction must lie in (0, 1)".into()));
    }
    let n_strata = strata.iter().max().map_or(0, |m| m + 1);
    let mut train = Vec::new();
    let mut eval = Vec::new();
    for s in 0..n_strata {
        let mut members: Vec<usize> = (0..strata.len()).filter(|&i| strata[i] == s).collect();
        if members.is_empty() {
            continue;
        }
        if members.len() < 2 {
            return Err(Error::Precondition(format!(
                "stratum {s} has a single item and cannot be split"
            )));
        }
        members.shuffle(&mut rng::stream(seed, s as u64));
        let k = ((members.len() as f64 * eval_fraction).round() as usize).clamp(1, members.len() - 1);
        eval.extend_from_slice(&members[..k]);
        train.extend_from_slice(&members[k..]);
    }
    train.sort_unstable();
    eval.sort_unstable();
    Ok(Split { train, eval })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn disjoint_complete_deterministic() {
        let strata: Vec<usize> = (0..40).map(|i| i % 3).collect();
        let a = stratified_split(&strata, 0.25, 9).unwrap();
        assert_eq!(a, stratified_split(&strata, 0.25, 9).unwrap());
        assert!(a.train.iter().all(|i| !a.eval.contains(i)));
        assert_eq!(a.train.len() + a.eval.len(), 40);
        for s in 0..3 {
            assert!(a.eval.iter().any(|&i| strata[i] == s));
            assert!(a.train.iter().any(|&i| strata[i] == s));
        }
        assert!(stratified_split(&[0, 1, 1], 0.5, 0).is_err());
        assert!(stratified_split(&strata, 1.0, 0).is_err());
    }
}
