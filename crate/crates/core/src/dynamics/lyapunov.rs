use super::map::{MapUnderStudy, Phase};
use super::series::AnalysisSeries;
use crate::rng;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct LleParams {
    /// Perturbation norm `k`.
    pub k: f64,
    /// Steps between renormalisations.
    pub tau: usize,
    /// Total horizon `T`.
    pub horizon: usize,
    pub seed: u64,
}

impl Default for LleParams {
    fn default() -> Self {
        Self {
            k: 1.0,
            tau: 10,
            horizon: 5_000,
            seed: 0,
        }
    }
}

impl LleParams {
    fn check(&self) -> Result<()> {
        if !(self.k > 0.0 && self.k.is_finite()) {
            return Err(Error::Precondition("perturbation norm k must be finite and > 0".into()));
        }
        if self.tau == 0 {
            return Err(Error::Precondition("tau must be at least 1".into()));
        }
        Ok(())
    }
}

/// Local Lyapunov exponents sampled at `t = 0, τ, 2τ, ...`.
#[derive(Debug, Clone, PartialEq)]
pub struct LyapunovSeries {
    pub tau: usize,
    pub horizon: usize,
    /// `ln(‖y_{t+τ} − x_{t+τ}‖ / ‖ε‖)`.
    pub raw: AnalysisSeries,
    /// `raw / τ`.
    pub per_step: AnalysisSeries,
}

impl LyapunovSeries {
    /// Wrap precomputed raw exponents sampled every `tau` steps from `t = 0`.
    pub fn from_raw(values: Vec<f64>, tau: usize, horizon: usize) -> Self {
        let times: Vec<usize> = (0..values.len()).map(|i| i * tau).collect();
        let per_step = values.iter().map(|v| v / tau as f64).collect();
        Self {
            tau,
            horizon,
            raw: AnalysisSeries {
                times: times.clone(),
                values,
                truncated: false,
            },
            per_step: AnalysisSeries {
                times,
                values: per_step,
                truncated: false,
            },
        }
    }

    pub fn truncated(&self) -> bool {
        self.raw.truncated
    }

    pub fn len(&self) -> usize {
        self.raw.len()
    }

    pub fn is_empty(&self) -> bool {
        self.raw.is_empty()
    }

    pub fn mean_per_step(&self) -> Option<f64> {
        self.per_step.mean()
    }

    fn mark_truncated(&mut self) {
        self.raw.truncated = true;
        self.per_step.truncated = true;
    }
}

/// Standard-normal direction shaped like `x0`, rescaled to norm `k`, drawn
/// from the stream of `seed`.
pub fn draw_perturbation<S: Phase>(x0: &S, k: f64, seed: u64) -> S {
    let mut rng = rng::seeded(seed);
    let eps = x0.standard_normal_like(&mut rng);
    let n = eps.norm();
    eps.scaled(k / n)
}

fn advance<M: MapUnderStudy>(map: &M, x: &M::State) -> Option<M::State> {
    match map.apply(x) {
        Ok(next) if next.is_finite() => Some(next),
        _ => None,
    }
}

/// Renormalised two-trajectory estimate of the leading local exponent.
///
/// A reference orbit `x_t` and a companion `y_t = x_t + ε` with `‖ε‖ = k` are
/// evolved for `τ` steps; the log growth of their separation is recorded, the
/// separation becomes the next `ε` (rescaled to `k`), and the cycle repeats
/// while `t < T`.
///
/// If either orbit overflows, the series stops at the last complete window and
/// is flagged truncated. A separation that collapses to exactly zero records
/// `-inf` and restarts from a fresh random direction.
pub fn local_lyapunov<M: MapUnderStudy>(
    map: &M,
    x0: &M::State,
    p: &LleParams,
) -> Result<LyapunovSeries> {
    p.check()?;
    let mut rng = rng::seeded(p.seed);
    let mut eps = x0.standard_normal_like(&mut rng);
    let mut out = LyapunovSeries {
        tau: p.tau,
        horizon: p.horizon,
        raw: AnalysisSeries::default(),
        per_step: AnalysisSeries::default(),
    };
    let mut x = x0.clone();
    let mut t = 0;
    while t < p.horizon {
        let mut n = eps.norm();
        if n == 0.0 || !n.is_finite() {
            eps = x.standard_normal_like(&mut rng);
            n = eps.norm();
        }
        eps = eps.scaled(p.k / n);
        let eps_norm = eps.norm();
        let mut y = x.add(&eps);
        let mut xs = x.clone();
        let mut ok = true;
        for _ in 0..p.tau {
            match (advance(map, &xs), advance(map, &y)) {
                (Some(a), Some(b)) => {
                    xs = a;
                    y = b;
                }
                _ => {
                    ok = false;
                    break;
                }
            }
        }
        if !ok {
            out.mark_truncated();
            break;
        }
        let diff = y.sub(&xs);
        let lambda = (diff.norm() / eps_norm).ln();
        out.raw.push(t, lambda);
        out.per_step.push(t, lambda / p.tau as f64);
        eps = diff;
        x = xs;
        t += p.tau;
    }
    Ok(out)
}

/// Distance `‖y_t − x_t‖` for `t = 0..=steps` after a single kick of norm
/// `epsilon_norm` at `t = 0`.
pub fn perturbation_response<M: MapUnderStudy>(
    map: &M,
    x0: &M::State,
    epsilon_norm: f64,
    steps: usize,
    seed: u64,
) -> Result<AnalysisSeries> {
    if !(epsilon_norm > 0.0 && epsilon_norm.is_finite()) {
        return Err(Error::Precondition("epsilon_norm must be finite and > 0".into()));
    }
    let eps = draw_perturbation(x0, epsilon_norm, seed);
    let mut x = x0.clone();
    let mut y = x0.add(&eps);
    let mut out = AnalysisSeries::default();
    out.push(0, y.sub(&x).norm());
    for t in 1..=steps {
        match (advance(map, &x), advance(map, &y)) {
            (Some(a), Some(b)) => {
                x = a;
                y = b;
            }
            _ => {
                out.truncated = true;
                break;
            }
        }
        out.push(t, y.sub(&x).norm());
    }
    Ok(out)
}
