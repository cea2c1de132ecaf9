//! Readouts trained on a fixed encoder's trajectories.
//!
//! The encoder is never trained; only the linear (ridge) or softmax map from
//! states to task outputs is fitted.

mod letters;
mod metrics;
mod ridge;
mod softmax;
mod split;
mod sweep;

pub use letters::{letter_targets, HandwritingTargets, LetterPath};
pub use metrics::{accuracy, nmse, pearson};
pub use ridge::{fit_ridge, ReadoutModel, Window, DEFAULT_RIDGE};
pub use softmax::{
    fit_softmax, softmax_loss_and_gradient, softmax_probabilities, SoftmaxParams,
};
pub use split::{stratified_split, Split};
pub use sweep::{
    draw_cell, handwriting_sweep, layer_sweep, CellOutcome, DrawnLetter, ErrorMap, FeatureMap,
    GridCell, HandwritingSetup, ScoreSeries, SweepTask,
};
