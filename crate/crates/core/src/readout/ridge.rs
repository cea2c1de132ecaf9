use nalgebra::{Cholesky, DMatrix};
use ndarray::{Array1, Array2, ArrayView2, Axis};

use crate::{Error, Result};

pub const DEFAULT_RIDGE: f64 = 1e-6;

/// Time window a readout was trained on: `t ∈ [t0, t0 + delta_t)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Window {
    pub t0: usize,
    pub delta_t: usize,
}

/// Affine map `y = x W + b` from flattened states to task outputs.
#[derive(Debug, Clone, PartialEq)]
pub struct ReadoutModel {
    /// `features × outputs`.
    pub weights: Array2<f64>,
    pub intercept: Array1<f64>,
    pub window: Option<Window>,
}

impl ReadoutModel {
    pub fn n_features(&self) -> usize {
        self.weights.nrows()
    }

    pub fn n_outputs(&self) -> usize {
        self.weights.ncols()
    }

    pub fn predict(&self, x: ArrayView2<f64>) -> Array2<f64> {
        x.dot(&self.weights) + &self.intercept
    }
}

fn to_na(a: &Array2<f64>) -> DMatrix<f64> {
    DMatrix::from_row_iterator(a.nrows(), a.ncols(), a.iter().copied())
}

fn from_na(m: &DMatrix<f64>) -> Array2<f64> {
    Array2::from_shape_fn((m.nrows(), m.ncols()), |(i, j)| m[(i, j)])
}

/// Solve `A Z = B` for symmetric positive (semi)definite `A`; with `ridge = 0`
/// a near-zero pivot is reported as singular instead of yielding garbage.
fn spd_solve(mut a: DMatrix<f64>, b: &DMatrix<f64>, ridge: f64) -> Result<DMatrix<f64>> {
    let n = a.nrows();
    let max_diag = (0..n).map(|i| a[(i, i)]).fold(0.0f64, f64::max);
    for i in 0..n {
        a[(i, i)] += ridge;
    }
    let singular = || {
        Error::Singular(format!(
            "normal equations are singular at ridge = {ridge}; use a ridge > 0"
        ))
    };
    let chol = Cholesky::new(a).ok_or_else(singular)?;
    if ridge == 0.0 {
        let l = chol.l_dirty();
        let min_pivot = (0..n).map(|i| l[(i, i)] * l[(i, i)]).fold(f64::INFINITY, f64::min);
        if min_pivot <= 1e-12 * max_diag.max(f64::MIN_POSITIVE) {
            return Err(singular());
        }
    }
    Ok(chol.solve(b))
}

/// Ridge regression with an unpenalised intercept.
///
/// Uses the primal normal equations when there are at least as many samples as
/// features and the dual (kernel) form otherwise; both give the same solution
/// for `ridge > 0`.
pub fn fit_ridge(states: ArrayView2<f64>, targets: ArrayView2<f64>, ridge: f64) -> Result<ReadoutModel> {
    let (n, p) = states.dim();
    if n == 0 || targets.nrows() != n {
        return Err(Error::Precondition(format!(
            "{n} state rows for {} target rows",
            targets.nrows()
        )));
    }
    if !(ridge >= 0.0 && ridge.is_finite()) {
        return Err(Error::Precondition("ridge must be finite and >= 0".into()));
    }
    let x_mean = states.mean_axis(Axis(0)).expect("n > 0");
    let y_mean = targets.mean_axis(Axis(0)).expect("n > 0");
    let xc = to_na(&(&states - &x_mean));
    let yc = to_na(&(&targets - &y_mean));
    let w = if p <= n {
        let gram = xc.tr_mul(&xc);
        spd_solve(gram, &xc.tr_mul(&yc), ridge)?
    } else {
        let kernel = &xc * xc.transpose();
        let alpha = spd_solve(kernel, &yc, ridge)?;
        xc.tr_mul(&alpha)
    };
    let weights = from_na(&w);
    let intercept = &y_mean - &x_mean.dot(&weights);
    Ok(ReadoutModel {
        weights,
        intercept,
        window: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    // X = [[0,0],[1,0],[0,1]], y = [1,3,4]. Centred normal matrix
    // [[2/3,-1/3],[-1/3,2/3]], right side [1/3, 4/3].
    fn fixture() -> (Array2<f64>, Array2<f64>) {
        (array![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]], array![[1.0], [3.0], [4.0]])
    }

    #[test]
    fn hand_solved_normal_equations() {
        let (x, y) = fixture();
        let m = fit_ridge(x.view(), y.view(), 0.0).unwrap();
        assert!((m.weights[[0, 0]] - 2.0).abs() < 1e-9);
        assert!((m.weights[[1, 0]] - 3.0).abs() < 1e-9);
        assert!((m.intercept[0] - 1.0).abs() < 1e-9);
        // ridge 1: [[5,-1],[-1,5]] w = [1,4] -> w = (9/24, 21/24), b = 8/3 - (30/24)/3
        let m = fit_ridge(x.view(), y.view(), 1.0).unwrap();
        assert!((m.weights[[0, 0]] - 0.375).abs() < 1e-9);
        assert!((m.weights[[1, 0]] - 0.875).abs() < 1e-9);
        assert!((m.intercept[0] - 2.25).abs() < 1e-9);
    }

    #[test]
    fn singular_without_ridge() {
        let x = array![[1.0, 2.0], [2.0, 4.0], [3.0, 6.0]];
        let y = array![[1.0], [2.0], [3.0]];
        assert!(matches!(fit_ridge(x.view(), y.view(), 0.0), Err(Error::Singular(_))));
        assert!(fit_ridge(x.view(), y.view(), 1e-3).is_ok());
        // more features than samples
        let wide = array![[1.0, 0.0, 2.0], [0.0, 1.0, 1.0]];
        let y2 = array![[1.0], [0.0]];
        assert!(fit_ridge(wide.view(), y2.view(), 0.0).is_err());
        assert!(fit_ridge(wide.view(), y2.view(), 1e-6).is_ok());
    }

    #[test]
    fn primal_and_dual_agree() {
        let x = array![[0.3, -1.0, 2.0], [1.0, 0.5, -0.2], [0.0, 0.1, 0.7]];
        let y = array![[1.0, 0.0], [0.5, 2.0], [-1.0, 1.0]];
        let primal = fit_ridge(x.view(), y.view(), 0.1).unwrap();
        // one extra identical-mean-free feature pushes it into the dual branch
        let mut wide = Array2::zeros((3, 4));
        wide.slice_mut(ndarray::s![.., ..3]).assign(&x);
        let dual = fit_ridge(wide.view(), y.view(), 0.1).unwrap();
        let a = primal.predict(x.view());
        let b = dual.predict(wide.view());
        assert!(a.iter().zip(b.iter()).all(|(u, v)| (u - v).abs() < 1e-10));
    }

    #[test]
    fn rejects_mismatched_rows() {
        let (x, _) = fixture();
        assert!(fit_ridge(x.view(), array![[1.0]].view(), 0.1).is_err());
        assert!(fit_ridge(x.view(), array![[1.0], [1.0], [1.0]].view(), -1.0).is_err());
    }
}
