use ndarray::Axis;

use super::series::AnalysisSeries;
use crate::encoder::{StateMatrix, StateTrajectory};

pub const DEFAULT_SYNC_THRESHOLD: f64 = 1e-5;

/// Token deviation `D = (1/N_w) Σ_i ‖x^i − x̄‖²`.
pub fn deviation(x: &StateMatrix) -> f64 {
    let mean = x.mean_axis(Axis(0)).expect("state has at least one row");
    let total: f64 = x
        .rows()
        .into_iter()
        .map(|r| r.iter().zip(mean.iter()).map(|(a, m)| (a - m) * (a - m)).sum::<f64>())
        .sum();
    total / x.n_tokens() as f64
}

pub fn deviation_series(traj: &StateTrajectory) -> AnalysisSeries {
    AnalysisSeries {
        times: traj.times.clone(),
        values: traj.states.iter().map(deviation).collect(),
        truncated: false,
    }
}

/// First recorded time with `D(t) < threshold`.
pub fn sync_offset(series: &AnalysisSeries, threshold: f64) -> Option<usize> {
    series.iter().find(|&(_, d)| d < threshold).map(|(t, _)| t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::{array, Array2};

    #[test]
    fn zero_for_identical_rows() {
        let x = StateMatrix::synchronized(array![0.3, -1.0, 2.0].view(), 5).unwrap();
        assert_eq!(deviation(&x), 0.0);
    }

    #[test]
    fn two_opposite_tokens() {
        let mut m = Array2::zeros((2, 6));
        m[[0, 0]] = 1.0;
        m[[1, 0]] = -1.0;
        assert_eq!(deviation(&StateMatrix::new(m).unwrap()), 1.0);
    }

    #[test]
    fn offset_is_first_crossing() {
        let s = AnalysisSeries::from_values(vec![1.0, 1e-3, 1e-6, 1e-7]);
        assert_eq!(sync_offset(&s, 1e-5), Some(2));
        let s = AnalysisSeries::from_values(vec![1e-6, 1.0]);
        assert_eq!(sync_offset(&s, 1e-5), Some(0));
        let s = AnalysisSeries::from_values(vec![1.0, 0.5]);
        assert_eq!(sync_offset(&s, 1e-5), None);
        let s = AnalysisSeries::new(vec![0, 10, 20], vec![1.0, 1e-9, 0.0]).unwrap();
        assert_eq!(sync_offset(&s, 1e-5), Some(10));
    }
}
