use ndarray::Array2;
use rayon::prelude::*;

use super::letters::{accumulate, letter_targets, LetterPath};
use super::metrics::{accuracy, nmse, pearson};
use super::ridge::{fit_ridge, ReadoutModel, Window};
use super::softmax::{fit_softmax, SoftmaxParams};
use super::split::{stratified_split, Split};
use crate::encoder::StateTrajectory;
use crate::{Error, Result};

/// Grid and fit settings for the two-letter handwriting task.
#[derive(Debug, Clone)]
pub struct HandwritingSetup {
    /// Letter written for class 0 and class 1.
    pub letters: [LetterPath; 2],
    pub t0s: Vec<usize>,
    pub delta_ts: Vec<usize>,
    pub ridge: f64,
    pub eval_fraction: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum CellOutcome {
    Nmse(f64),
    /// Some trajectory does not cover `[t0, t0 + ΔT)`.
    InsufficientLength,
    Failed(String),
}

impl CellOutcome {
    pub fn nmse(&self) -> Option<f64> {
        match self {
            CellOutcome::Nmse(v) => Some(*v),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridCell {
    pub t0: usize,
    pub delta_t: usize,
    pub outcome: CellOutcome,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ErrorMap {
    pub cells: Vec<GridCell>,
    pub split: Split,
}

impl ErrorMap {
    /// Cell with the lowest evaluation NMSE.
    pub fn best(&self) -> Option<&GridCell> {
        self.cells
            .iter()
            .filter(|c| c.outcome.nmse().is_some())
            .min_by(|a, b| a.outcome.nmse().unwrap().total_cmp(&b.outcome.nmse().unwrap()))
    }

    pub fn worst(&self) -> Option<&GridCell> {
        self.cells
            .iter()
            .filter(|c| c.outcome.nmse().is_some())
            .max_by(|a, b| a.outcome.nmse().unwrap().total_cmp(&b.outcome.nmse().unwrap()))
    }

    /// `t0,delta_t,nmse` with an empty `nmse` field for cells without a value.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t0,delta_t,nmse\n");
        for c in &self.cells {
            let v = c.outcome.nmse().map(|v| v.to_string()).unwrap_or_default();
            out.push_str(&format!("{},{},{v}\n", c.t0, c.delta_t));
        }
        out
    }
}

fn window_rows(traj: &StateTrajectory, window: Window) -> Option<Vec<Vec<f64>>> {
    (window.t0..window.t0 + window.delta_t)
        .map(|t| traj.at(t).map(|s| s.flatten()))
        .collect()
}

fn check_labels(trajectories: &[StateTrajectory], labels: &[usize]) -> Result<()> {
    if trajectories.len() != labels.len() {
        return Err(Error::Precondition(format!(
            "{} trajectories for {} labels",
            trajectories.len(),
            labels.len()
        )));
    }
    if labels.iter().any(|&l| l > 1) {
        return Err(Error::Precondition("handwriting labels must be 0 or 1".into()));
    }
    if !(labels.contains(&0) && labels.contains(&1)) {
        return Err(Error::Precondition("both classes must be present".into()));
    }
    Ok(())
}

struct CellFit {
    model: ReadoutModel,
    targets: [Array2<f64>; 2],
    /// Eval item index with its window design matrix.
    eval: Vec<(usize, Array2<f64>)>,
}

fn fit_cell(
    trajectories: &[StateTrajectory],
    labels: &[usize],
    split: &Split,
    setup: &HandwritingSetup,
    window: Window,
) -> Result<Option<CellFit>> {
    let mut targets = Vec::with_capacity(2);
    for letter in &setup.letters {
        let t = letter_targets(letter, window.delta_t)?;
        targets.push(Array2::from_shape_fn((window.delta_t, 2), |(i, j)| t.directions[i][j]));
    }
    let targets: [Array2<f64>; 2] = targets.try_into().expect("two letters");

    let mut design: Vec<f64> = Vec::new();
    let mut out: Vec<f64> = Vec::new();
    let mut dim = 0;
    for &i in &split.train {
        let Some(rows) = window_rows(&trajectories[i], window) else {
            return Ok(None);
        };
        dim = rows[0].len();
        rows.iter().for_each(|r| design.extend_from_slice(r));
        out.extend(targets[labels[i]].iter());
    }
    let mut eval = Vec::with_capacity(split.eval.len());
    for &i in &split.eval {
        let Some(rows) = window_rows(&trajectories[i], window) else {
            return Ok(None);
        };
        let flat: Vec<f64> = rows.concat();
        eval.push((i, Array2::from_shape_vec((window.delta_t, dim), flat).expect("uniform rows")));
    }
    let n = split.train.len() * window.delta_t;
    let x = Array2::from_shape_vec((n, dim), design).expect("uniform rows");
    let y = Array2::from_shape_vec((n, 2), out).expect("two outputs");
    let mut model = fit_ridge(x.view(), y.view(), setup.ridge)?;
    model.window = Some(window);
    Ok(Some(CellFit { model, targets, eval }))
}

/// Train one shared ridge readout per `(t0, ΔT)` cell to emit the pen
/// directions of the letter matching each sentence's class, and score it by
/// evaluation NMSE. Cells are independent and evaluated in parallel.
pub fn handwriting_sweep(
    trajectories: &[StateTrajectory],
    labels: &[usize],
    setup: &HandwritingSetup,
) -> Result<ErrorMap> {
    check_labels(trajectories, labels)?;
    let split = stratified_split(labels, setup.eval_fraction, setup.seed)?;
    let grid: Vec<Window> = setup
        .t0s
        .iter()
        .flat_map(|&t0| setup.delta_ts.iter().map(move |&delta_t| Window { t0, delta_t }))
        .collect();
    let cells = grid
        .par_iter()
        .map(|&window| {
            let outcome = match fit_cell(trajectories, labels, &split, setup, window) {
                Ok(None) => CellOutcome::InsufficientLength,
                Ok(Some(fit)) => {
                    let (outputs, wanted): (Vec<_>, Vec<_>) = fit
                        .eval
                        .iter()
                        .map(|(i, x)| (fit.model.predict(x.view()), fit.targets[labels[*i]].clone()))
                        .unzip();
                    match nmse(&outputs, &wanted) {
                        Ok(v) => CellOutcome::Nmse(v),
                        Err(e) => CellOutcome::Failed(e.to_string()),
                    }
                }
                Err(e) => CellOutcome::Failed(e.to_string()),
            };
            GridCell {
                t0: window.t0,
                delta_t: window.delta_t,
                outcome,
            }
        })
        .collect();
    Ok(ErrorMap { cells, split })
}

/// A letter drawn by a readout: accumulated predicted pen positions.
#[derive(Debug, Clone, PartialEq)]
pub struct DrawnLetter {
    pub item: usize,
    pub class: usize,
    pub points: Vec<[f64; 2]>,
    pub nmse: f64,
}

/// Refit a single cell and return the fitted readout and the letters it draws
/// for every evaluation sentence.
pub fn draw_cell(
    trajectories: &[StateTrajectory],
    labels: &[usize],
    setup: &HandwritingSetup,
    window: Window,
) -> Result<(ReadoutModel, Vec<DrawnLetter>)> {
    check_labels(trajectories, labels)?;
    let split = stratified_split(labels, setup.eval_fraction, setup.seed)?;
    let fit = fit_cell(trajectories, labels, &split, setup, window)?.ok_or_else(|| {
        Error::Precondition(format!(
            "trajectories do not cover t in [{}, {})",
            window.t0,
            window.t0 + window.delta_t
        ))
    })?;
    let drawn = fit
        .eval
        .iter()
        .map(|(i, x)| {
            let y = fit.model.predict(x.view());
            let target = &fit.targets[labels[*i]];
            let err = nmse(std::slice::from_ref(&y), std::slice::from_ref(target))?;
            let dirs: Vec<[f64; 2]> = y.rows().into_iter().map(|r| [r[0], r[1]]).collect();
            Ok(DrawnLetter {
                item: *i,
                class: labels[*i],
                points: accumulate(&dirs),
                nmse: err,
            })
        })
        .collect::<Result<_>>()?;
    Ok((fit.model, drawn))
}

/// How a readout sees a state.
#[derive(Debug, Clone, PartialEq)]
pub enum FeatureMap {
    /// The whole flattened state.
    Flatten,
    /// One token row per item (e.g. the masked position).
    TokenRow(Vec<usize>),
}

impl FeatureMap {
    fn extract(&self, traj: &StateTrajectory, item: usize, t: usize) -> Option<Vec<f64>> {
        let state = traj.at(t)?;
        Some(match self {
            FeatureMap::Flatten => state.flatten(),
            FeatureMap::TokenRow(rows) => state.row(*rows.get(item)?).to_vec(),
        })
    }
}

#[derive(Debug, Clone)]
pub enum SweepTask<'a> {
    /// Accuracy of a softmax readout predicting `labels`.
    Classification {
        labels: &'a [u32],
        params: SoftmaxParams,
    },
    /// Pearson score of a ridge readout predicting scalar `targets`.
    Regression { targets: &'a [f64], ridge: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScoreSeries {
    pub times: Vec<usize>,
    /// `None` where the score is undefined (constant predictions).
    pub scores: Vec<Option<f64>>,
}

impl ScoreSeries {
    /// `t,value` with an empty value where the score is undefined.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,value\n");
        for (t, s) in self.times.iter().zip(&self.scores) {
            let v = s.map(|v| v.to_string()).unwrap_or_default();
            out.push_str(&format!("{t},{v}\n"));
        }
        out
    }
}

fn design(trajectories: &[StateTrajectory], items: &[usize], features: &FeatureMap, t: usize) -> Result<Array2<f64>> {
    let rows: Vec<Vec<f64>> = items
        .iter()
        .map(|&i| {
            features.extract(&trajectories[i], i, t).ok_or_else(|| {
                Error::Precondition(format!("trajectory {i} has no state at t = {t}"))
            })
        })
        .collect::<Result<_>>()?;
    let dim = rows.first().map_or(0, Vec::len);
    Ok(Array2::from_shape_vec((rows.len(), dim), rows.concat()).expect("uniform rows"))
}

/// Centre and scale every column by its training mean and standard deviation.
/// Columns constant over the training set are only centred.
fn standardize(train: &mut Array2<f64>, eval: &mut Array2<f64>) {
    let n = train.nrows() as f64;
    for c in 0..train.ncols() {
        let mean = train.column(c).sum() / n;
        let var = train.column(c).iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
        let scale = if var > 0.0 { 1.0 / var.sqrt() } else { 1.0 };
        train.column_mut(c).mapv_inplace(|v| (v - mean) * scale);
        eval.column_mut(c).mapv_inplace(|v| (v - mean) * scale);
    }
}

fn score_at(
    trajectories: &[StateTrajectory],
    task: &SweepTask,
    features: &FeatureMap,
    split: &Split,
    t: usize,
) -> Result<Option<f64>> {
    let mut xtr = design(trajectories, &split.train, features, t)?;
    let mut xev = design(trajectories, &split.eval, features, t)?;
    standardize(&mut xtr, &mut xev);
    match task {
        SweepTask::Classification { labels, params } => {
            let ytr: Vec<u32> = split.train.iter().map(|&i| labels[i]).collect();
            let yev: Vec<u32> = split.eval.iter().map(|&i| labels[i]).collect();
            let model = fit_softmax(xtr.view(), &ytr, params)?;
            Ok(Some(accuracy(&model.classify(xev.view()), &yev)))
        }
        SweepTask::Regression { targets, ridge } => {
            let ytr = Array2::from_shape_fn((split.train.len(), 1), |(r, _)| targets[split.train[r]]);
            let model = fit_ridge(xtr.view(), ytr.view(), *ridge)?;
            let pred = model.predict(xev.view());
            let yev: Vec<f64> = split.eval.iter().map(|&i| targets[i]).collect();
            Ok(pearson(&pred.column(0).to_vec(), &yev))
        }
    }
}

/// Fit an independent readout at every time in `times` and score it on a
/// held-out set of sentences. Features are standardised with training-set
/// statistics before each fit.
pub fn layer_sweep(
    trajectories: &[StateTrajectory],
    task: &SweepTask,
    times: &[usize],
    features: &FeatureMap,
    eval_fraction: f64,
    seed: u64,
) -> Result<ScoreSeries> {
    let n = trajectories.len();
    let n_labels = match task {
        SweepTask::Classification { labels, .. } => labels.len(),
        SweepTask::Regression { targets, .. } => targets.len(),
    };
    if n_labels != n {
        return Err(Error::Precondition(format!("{n} trajectories for {n_labels} labels")));
    }
    let split = stratified_split(&vec![0; n], eval_fraction, seed)?;
    let scores = times
        .par_iter()
        .map(|&t| score_at(trajectories, task, features, &split, t))
        .collect::<Result<Vec<_>>>()?;
    Ok(ScoreSeries {
        times: times.to_vec(),
        scores,
    })
}

