use nalgebra::DMatrix;
use ndarray::{Array2, ArrayView2, Axis};

use super::series::AnalysisSeries;
use crate::encoder::{StateMatrix, StateTrajectory};
use crate::{Error, Result};

/// Participation ratio `(Σ s̃_i²)⁻¹` of the covariance spectrum of `data`
/// (one sample per row).
///
/// The spectrum comes from the singular values of the centred data matrix, so
/// the `dim × dim` covariance is never formed. The result is clamped to its
/// exact bounds `[1, min(M − 1, dim)]` to absorb rounding.
pub fn participation_ratio(data: ArrayView2<f64>) -> Result<f64> {
    let (m, d) = data.dim();
    if m < 2 {
        return Err(Error::Precondition(format!("ensemble of {m} states, need at least 2")));
    }
    let mean = data.mean_axis(Axis(0)).expect("m >= 2");
    let centered = &data - &mean;
    let scale: f64 = data.iter().map(|v| v * v).sum();
    let total: f64 = centered.iter().map(|v| v * v).sum();
    // identical rows leave only rounding residue of order eps² · scale
    if scale == 0.0 || total <= 1e-26 * scale {
        return Err(Error::Degenerate("ensemble has zero total variance".into()));
    }
    let mat = DMatrix::from_row_iterator(m, d, centered.iter().copied());
    let sv = mat.singular_values();
    let energy: Vec<f64> = sv.iter().map(|s| s * s).collect();
    let sum: f64 = energy.iter().sum();
    let sum_sq: f64 = energy.iter().map(|e| (e / sum) * (e / sum)).sum();
    Ok((1.0 / sum_sq).clamp(1.0, (m - 1).min(d) as f64))
}

fn stack<'a, I>(ensemble: I) -> Result<Array2<f64>>
where
    I: IntoIterator<Item = &'a StateMatrix>,
{
    let states: Vec<&StateMatrix> = ensemble.into_iter().collect();
    let Some(first) = states.first() else {
        return Err(Error::Precondition("empty ensemble".into()));
    };
    let shape = first.shape().to_vec();
    let dim = first.len();
    let mut data = Array2::zeros((states.len(), dim));
    for (mut row, s) in data.rows_mut().into_iter().zip(&states) {
        if s.shape() != shape.as_slice() {
            return Err(Error::Precondition("ensemble states differ in shape".into()));
        }
        row.iter_mut().zip(s.iter()).for_each(|(r, v)| *r = *v);
    }
    Ok(data)
}

/// Effective dimension of an ensemble of states observed at one time.
pub fn effective_dimension<'a, I>(ensemble: I) -> Result<f64>
where
    I: IntoIterator<Item = &'a StateMatrix>,
{
    participation_ratio(stack(ensemble)?.view())
}

/// [`effective_dimension`] at each time in `times`, `ensembles[i]` observed at `times[i]`.
pub fn effective_dimension_series(
    times: &[usize],
    ensembles: &[Vec<StateMatrix>],
) -> Result<AnalysisSeries> {
    if times.len() != ensembles.len() {
        return Err(Error::Precondition("one ensemble per time stamp required".into()));
    }
    let values = ensembles
        .iter()
        .map(|e| effective_dimension(e))
        .collect::<Result<Vec<_>>>()?;
    AnalysisSeries::new(times.to_vec(), values)
}

/// Effective dimension across trajectories (one per sentence) at every time
/// recorded by all of them.
pub fn effective_dimension_over(trajectories: &[StateTrajectory]) -> Result<AnalysisSeries> {
    let Some(first) = trajectories.first() else {
        return Err(Error::Precondition("no trajectories".into()));
    };
    let mut out = AnalysisSeries::default();
    for &t in &first.times {
        let ensemble: Option<Vec<&StateMatrix>> = trajectories.iter().map(|tr| tr.at(t)).collect();
        if let Some(ensemble) = ensemble {
            out.push(t, effective_dimension(ensemble)?);
        }
    }
    Ok(out)
}
