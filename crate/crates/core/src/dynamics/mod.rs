//! Trajectory diagnostics.
//!
//! Everything that needs to evolve a state goes through [`MapUnderStudy`], so
//! the same Lyapunov and perturbation code runs on the encoder and on scalar
//! toy maps with known exponents.

mod deviation;
mod effdim;
mod lyapunov;
mod map;
mod pca;
mod series;
mod transient;

pub use deviation::{deviation, deviation_series, sync_offset, DEFAULT_SYNC_THRESHOLD};
pub use effdim::{
    effective_dimension, effective_dimension_over, effective_dimension_series,
    participation_ratio,
};
pub use lyapunov::{
    draw_perturbation, local_lyapunov, perturbation_response, LleParams, LyapunovSeries,
};
pub use map::{FnMap, MapUnderStudy, Phase};
pub use pca::{pca_project, PcaProjection};
pub use series::AnalysisSeries;
pub use transient::{
    transient_chaos_length, ChaosClass, TransientChaos, DEFAULT_CONSECUTIVE,
};
