use nalgebra::DMatrix;
use ndarray::{Array1, Array2, Axis};

use crate::encoder::StateTrajectory;
use crate::{Error, Result};

#[derive(Debug, Clone)]
pub struct PcaProjection {
    pub times: Vec<usize>,
    /// One row per recorded state, one column per component.
    pub coordinates: Array2<f64>,
    /// Unit principal axes, one per row, in decreasing variance order.
    pub axes: Array2<f64>,
    pub explained_variance_ratio: Vec<f64>,
    pub mean: Array1<f64>,
}

/// Project the time-centred, flattened states onto their leading principal
/// axes. Each axis is signed so its largest-magnitude loading is positive.
pub fn pca_project(traj: &StateTrajectory, components: usize) -> Result<PcaProjection> {
    if components == 0 {
        return Err(Error::Precondition("components must be at least 1".into()));
    }
    if traj.len() < components + 1 {
        return Err(Error::Precondition(format!(
            "trajectory of {} states is too short for {components} components",
            traj.len()
        )));
    }
    let rows = traj.len();
    let dim = traj.states[0].len();
    if components > dim {
        return Err(Error::Precondition(format!(
            "{components} components exceed the state dimension {dim}"
        )));
    }
    let mut data = Array2::zeros((rows, dim));
    for (mut r, s) in data.rows_mut().into_iter().zip(&traj.states) {
        r.iter_mut().zip(s.iter()).for_each(|(d, v)| *d = *v);
    }
    let mean = data.mean_axis(Axis(0)).expect("rows > 0");
    let centered = &data - &mean;
    let scale: f64 = data.iter().map(|v| v * v).sum();
    let total: f64 = centered.iter().map(|v| v * v).sum();
    if scale == 0.0 || total <= 1e-26 * scale {
        return Err(Error::Degenerate("trajectory is constant".into()));
    }

    let svd = DMatrix::from_row_iterator(rows, dim, centered.iter().copied()).svd(false, true);
    let v_t = svd.v_t.expect("requested right singular vectors");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));

    let mut axes = Array2::zeros((components, dim));
    let mut ratios = Vec::with_capacity(components);
    for (c, &i) in order.iter().take(components).enumerate() {
        let mut axis: Array1<f64> = v_t.row(i).iter().copied().collect();
        let pivot = axis.iter().copied().fold(0.0f64, |a, b| if b.abs() > a.abs() { b } else { a });
        if pivot < 0.0 {
            axis.mapv_inplace(|v| -v);
        }
        axes.row_mut(c).assign(&axis);
        let s = svd.singular_values[i];
        ratios.push(s * s / total);
    }
    let coordinates = centered.dot(&axes.t());
    Ok(PcaProjection {
        times: traj.times.clone(),
        coordinates,
        axes,
        explained_variance_ratio: ratios,
        mean,
    })
}
