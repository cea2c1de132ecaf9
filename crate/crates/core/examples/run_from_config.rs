//! Run any experiment config through the harness, as the `tdlab` binary does.
//!
//! ```text
//! cargo run --release --example run_from_config -- crates/core/configs/effdim.toml
//! ```

use std::path::PathBuf;

use tdlab::harness::{export_report, run_experiment, ExperimentConfig};

fn main() -> tdlab::Result<()> {
    let path: PathBuf = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(concat!(env!("CARGO_MANIFEST_DIR"), "/configs/effdim.toml")));
    let config = ExperimentConfig::load(&path)?;
    let report = run_experiment(&config, 1)?;
    export_report(&report, &config.output_path())?;
    print!("{}", report.summary_text());
    Ok(())
}
