use std::path::Path;

use crate::{Error, Result};

/// A scalar diagnostic sampled at strictly increasing time stamps.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct AnalysisSeries {
    pub times: Vec<usize>,
    pub values: Vec<f64>,
    /// Set when the underlying trajectory overflowed before the horizon.
    pub truncated: bool,
}

impl AnalysisSeries {
    pub fn new(times: Vec<usize>, values: Vec<f64>) -> Result<Self> {
        if times.len() != values.len() {
            return Err(Error::Precondition(format!(
                "{} time stamps for {} values",
                times.len(),
                values.len()
            )));
        }
        if times.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Precondition("time stamps must strictly increase".into()));
        }
        Ok(Self {
            times,
            values,
            truncated: false,
        })
    }

    /// Series sampled at `0, 1, 2, ...`.
    pub fn from_values(values: Vec<f64>) -> Self {
        Self {
            times: (0..values.len()).collect(),
            values,
            truncated: false,
        }
    }

    pub(crate) fn push(&mut self, t: usize, value: f64) {
        debug_assert!(self.times.last().is_none_or(|&last| last < t));
        self.times.push(t);
        self.values.push(value);
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.times.iter().copied().zip(self.values.iter().copied())
    }

    pub fn mean(&self) -> Option<f64> {
        (!self.is_empty()).then(|| self.values.iter().sum::<f64>() / self.len() as f64)
    }

    /// `t,value` CSV with a header line.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,value\n");
        for (t, v) in self.iter() {
            out.push_str(&format!("{t},{v}\n"));
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        if lines.next() != Some("t,value") {
            return Err(Error::Format("series CSV must start with `t,value`".into()));
        }
        let mut times = Vec::new();
        let mut values = Vec::new();
        for (n, line) in lines.enumerate().filter(|(_, l)| !l.is_empty()) {
            let bad = || Error::Format(format!("series CSV line {} is malformed", n + 2));
            let (t, v) = line.split_once(',').ok_or_else(bad)?;
            times.push(t.parse().map_err(|_| bad())?);
            values.push(v.parse().map_err(|_| bad())?);
        }
        Self::new(times, values)
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv()).map_err(|e| Error::io(path, e))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trip_keeps_bits() {
        let s = AnalysisSeries::new(vec![0, 5, 10], vec![0.1, -1e-300, f64::NEG_INFINITY]).unwrap();
        let back = AnalysisSeries::from_csv(&s.to_csv()).unwrap();
        assert_eq!(back, s);
        assert!(s.to_csv().starts_with("t,value\n0,0.1\n"));
    }

    #[test]
    fn rejects_bad_stamps() {
        assert!(AnalysisSeries::new(vec![0, 0], vec![1.0, 2.0]).is_err());
        assert!(AnalysisSeries::new(vec![0], vec![1.0, 2.0]).is_err());
        assert!(AnalysisSeries::from_csv("x,y\n").is_err());
    }
}
