use ndarray::{Array1, Array2, ArrayView2, Axis};

use super::ridge::ReadoutModel;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SoftmaxParams {
    pub classes: usize,
    pub l2: f64,
    pub epochs: usize,
    pub step: f64,
}

impl SoftmaxParams {
    pub fn new(classes: usize) -> Self {
        Self {
            classes,
            l2: 1e-4,
            epochs: 200,
            step: 0.1,
        }
    }
}

/// Row-wise class probabilities of `model` on `x`.
pub fn softmax_probabilities(model: &ReadoutModel, x: ArrayView2<f64>) -> Array2<f64> {
    let mut logits = model.predict(x);
    for mut row in logits.rows_mut() {
        let max = row.fold(f64::NEG_INFINITY, |a, &b| a.max(b));
        row.mapv_inplace(|v| (v - max).exp());
        let s = row.sum();
        row.mapv_inplace(|v| v / s);
    }
    logits
}

/// Mean cross-entropy plus `(l2 / 2) ‖W‖²`, and its gradient with respect to
/// the weights and the (unpenalised) intercept.
pub fn softmax_loss_and_gradient(
    model: &ReadoutModel,
    x: ArrayView2<f64>,
    labels: &[u32],
    l2: f64,
) -> (f64, Array2<f64>, Array1<f64>) {
    let n = x.nrows() as f64;
    let mut probs = softmax_probabilities(model, x);
    let mut loss = 0.0;
    for (i, &y) in labels.iter().enumerate() {
        loss -= probs[[i, y as usize]].max(f64::MIN_POSITIVE).ln();
        probs[[i, y as usize]] -= 1.0;
    }
    loss = loss / n + 0.5 * l2 * model.weights.iter().map(|w| w * w).sum::<f64>();
    let grad_w = x.t().dot(&probs) / n + &model.weights * l2;
    let grad_b = probs.sum_axis(Axis(0)) / n;
    (loss, grad_w, grad_b)
}

/// Multinomial logistic regression by full-batch gradient descent from zero
/// weights. Fails if the loss rises for 10 epochs in a row or stops being finite.
pub fn fit_softmax(states: ArrayView2<f64>, labels: &[u32], params: &SoftmaxParams) -> Result<ReadoutModel> {
    let (n, p) = states.dim();
    if n == 0 || labels.len() != n {
        return Err(Error::Precondition(format!("{n} states for {} labels", labels.len())));
    }
    if params.classes < 2 {
        return Err(Error::Precondition("need at least 2 classes".into()));
    }
    if let Some(&bad) = labels.iter().find(|&&l| l as usize >= params.classes) {
        return Err(Error::Precondition(format!(
            "label {bad} out of range for {} classes",
            params.classes
        )));
    }
    let mut model = ReadoutModel {
        weights: Array2::zeros((p, params.classes)),
        intercept: Array1::zeros(params.classes),
        window: None,
    };
    let mut previous = f64::INFINITY;
    let mut rising = 0;
    for epoch in 0..params.epochs {
        let (loss, gw, gb) = softmax_loss_and_gradient(&model, states, labels, params.l2);
        if !loss.is_finite() {
            return Err(Error::TrainingInstability { epoch, loss });
        }
        if loss > previous + 1e-12 * previous.abs().max(1.0) {
            rising += 1;
            if rising >= 10 {
                return Err(Error::TrainingInstability { epoch, loss });
            }
        } else {
            rising = 0;
        }
        previous = loss;
        model.weights.scaled_add(-params.step, &gw);
        model.intercept.scaled_add(-params.step, &gb);
    }
    Ok(model)
}

impl ReadoutModel {
    /// Arg-max class per row.
    pub fn classify(&self, x: ArrayView2<f64>) -> Vec<u32> {
        self.predict(x)
            .rows()
            .into_iter()
            .map(|r| {
                r.iter()
                    .enumerate()
                    .fold((0, f64::NEG_INFINITY), |best, (i, &v)| if v > best.1 { (i, v) } else { best })
                    .0 as u32
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn separable_clusters_fit_perfectly() {
        let x = array![[2.0, 0.1], [1.8, -0.2], [2.2, 0.0], [-2.0, 0.3], [-1.9, -0.1], [-2.1, 0.2]];
        let y = [0, 0, 0, 1, 1, 1];
        let m = fit_softmax(x.view(), &y, &SoftmaxParams::new(2)).unwrap();
        assert_eq!(m.classify(x.view()), y.to_vec());
    }

    #[test]
    fn loss_decreases_with_small_step() {
        let x = array![[1.0, 0.0], [0.0, 1.0], [1.0, 1.0], [0.5, -0.5]];
        let y = [0, 1, 2, 0];
        let mut losses = Vec::new();
        let mut params = SoftmaxParams::new(3);
        for epochs in 0..20 {
            params.epochs = epochs;
            let m = fit_softmax(x.view(), &y, &params).unwrap();
            losses.push(softmax_loss_and_gradient(&m, x.view(), &y, params.l2).0);
        }
        assert!(losses.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn huge_step_reports_instability() {
        // step * l2 > 2 makes the penalty term alone blow up geometrically
        let x = array![[1.0, -0.5], [-0.8, 0.6], [0.9, 0.7]];
        let y = [0, 1, 0];
        let params = SoftmaxParams { classes: 2, l2: 1.0, epochs: 500, step: 10.0 };
        assert!(matches!(
            fit_softmax(x.view(), &y, &params),
            Err(Error::TrainingInstability { .. })
        ));
    }

    #[test]
    fn label_range_checked() {
        let x = array![[1.0], [2.0]];
        assert!(fit_softmax(x.view(), &[0, 2], &SoftmaxParams::new(2)).is_err());
    }
}
