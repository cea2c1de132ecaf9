use ndarray::Array2;

use crate::{Error, Result};

/// Window-normalised squared error averaged over evaluation items:
/// `⟨ Σ_t ‖y(t) − d(t)‖² / Σ_t ‖d(t)‖² ⟩`.
pub fn nmse(outputs: &[Array2<f64>], targets: &[Array2<f64>]) -> Result<f64> {
    if outputs.len() != targets.len() || outputs.is_empty() {
        return Err(Error::Precondition(format!(
            "{} output windows for {} target windows",
            outputs.len(),
            targets.len()
        )));
    }
    let mut sum = 0.0;
    for (y, d) in outputs.iter().zip(targets) {
        if y.shape() != d.shape() {
            return Err(Error::Precondition("output and target windows differ in shape".into()));
        }
        let den: f64 = d.iter().map(|v| v * v).sum();
        if den == 0.0 {
            return Err(Error::Degenerate("target window has zero norm".into()));
        }
        let num: f64 = y.iter().zip(d.iter()).map(|(a, b)| (a - b) * (a - b)).sum();
        sum += num / den;
    }
    Ok(sum / outputs.len() as f64)
}

/// Pearson correlation; `None` when either series is constant.
pub fn pearson(a: &[f64], b: &[f64]) -> Option<f64> {
    if a.len() != b.len() || a.len() < 2 {
        return None;
    }
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        let (dx, dy) = (x - ma, y - mb);
        sab += dx * dy;
        saa += dx * dx;
        sbb += dy * dy;
    }
    if saa == 0.0 || sbb == 0.0 {
        return None;
    }
    Some((sab / (saa.sqrt() * sbb.sqrt())).clamp(-1.0, 1.0))
}

pub fn accuracy(predicted: &[u32], labels: &[u32]) -> f64 {
    let hits = predicted.iter().zip(labels).filter(|(p, l)| p == l).count();
    hits as f64 / labels.len().max(1) as f64
}
