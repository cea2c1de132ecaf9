use std::ops::Deref;

use ndarray::{Array2, ArrayView1};

use super::config::EncoderConfig;
use super::layer::encoder_step;
use super::params::EncoderParams;
use crate::{Error, Result};

/// A sentence state `x_t`: one row per token vector.
#[derive(Debug, Clone, PartialEq)]
pub struct StateMatrix(Array2<f64>);

impl StateMatrix {
    pub fn new(entries: Array2<f64>) -> Result<Self> {
        if entries.nrows() == 0 || entries.ncols() == 0 {
            return Err(Error::Precondition("state matrix must be non-empty".into()));
        }
        if entries.iter().any(|v| !v.is_finite()) {
            return Err(Error::NumericalOverflow { step: None });
        }
        Ok(Self(entries))
    }

    /// Wrap without the finiteness check; used for perturbation arithmetic where
    /// overflow is detected separately.
    pub(crate) fn from_raw(entries: Array2<f64>) -> Self {
        Self(entries)
    }

    /// Every token row set to `row`.
    pub fn synchronized(row: ArrayView1<f64>, n_tokens: usize) -> Result<Self> {
        let mut m = Array2::zeros((n_tokens, row.len()));
        for mut r in m.rows_mut() {
            r.assign(&row);
        }
        Self::new(m)
    }

    pub fn n_tokens(&self) -> usize {
        self.0.nrows()
    }

    pub fn hidden_dim(&self) -> usize {
        self.0.ncols()
    }

    pub fn as_array(&self) -> &Array2<f64> {
        &self.0
    }

    pub fn into_inner(self) -> Array2<f64> {
        self.0
    }

    /// Row-major flattening, the layout used by readouts and ensemble statistics.
    pub fn flatten(&self) -> Vec<f64> {
        self.0.iter().copied().collect()
    }

    /// Reorder token rows: row `i` of the result is row `perm[i]` of `self`.
    pub fn permute_rows(&self, perm: &[usize]) -> Self {
        Self(self.0.select(ndarray::Axis(0), perm))
    }
}

impl Deref for StateMatrix {
    type Target = Array2<f64>;

    fn deref(&self) -> &Array2<f64> {
        &self.0
    }
}

/// Snapshots of an encoder orbit, recorded every `stride` steps plus the final
/// state.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct StateTrajectory {
    pub times: Vec<usize>,
    pub states: Vec<StateMatrix>,
}

impl StateTrajectory {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn last(&self) -> &StateMatrix {
        self.states.last().expect("trajectory always holds x_0")
    }

    /// The state recorded at time `t`, if any.
    pub fn at(&self, t: usize) -> Option<&StateMatrix> {
        self.times.binary_search(&t).ok().map(|i| &self.states[i])
    }
}

/// Apply `f` `steps` times, recording `x_0, x_stride, x_2stride, ...` and
/// always the final state `x_steps`.
pub fn iterate(
    x0: &StateMatrix,
    params: &EncoderParams,
    config: &EncoderConfig,
    steps: usize,
    stride: usize,
) -> Result<StateTrajectory> {
    if stride == 0 {
        return Err(Error::Precondition("stride must be at least 1".into()));
    }
    let mut times = vec![0];
    let mut states = vec![x0.clone()];
    let mut x = x0.clone();
    for t in 1..=steps {
        x = encoder_step(&x, params, config).map_err(|e| match e {
            Error::NumericalOverflow { .. } => Error::NumericalOverflow { step: Some(t) },
            other => other,
        })?;
        if t % stride == 0 || t == steps {
            times.push(t);
            states.push(x.clone());
        }
    }
    Ok(StateTrajectory { times, states })
}
