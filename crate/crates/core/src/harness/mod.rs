//! Config-driven experiment orchestration.
//!
//! An [`ExperimentConfig`] (TOML) names the experiment, the ensemble and the
//! parameter source. [`run_experiment`] produces a [`RunReport`] whose CSV
//! artifacts depend only on the config and the input files, whatever the
//! worker count; [`export_report`] writes it to disk.

mod config;
mod corpus;
mod report;
mod run;

pub use config::{
    CorpusSection, EmbeddingSection, EncoderSection, ExperimentConfig, ExperimentKind,
    HandwritingSection, LleSection, MlmSection, ParamsSection, SyncSection, TransientSection,
};
pub use corpus::{load_ensemble, synthetic_sentences, Ensemble, TOPIC_POOLS};
pub use report::{export_report, quartiles, Artifact, RunReport, VERSION};
pub use run::{load_trajectory, run_experiment, trajectory_container, Model};
