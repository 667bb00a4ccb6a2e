//! Parameter sweeps, figure presets and tabular output for `harvest-core`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod checks;
pub mod output;
pub mod presets;
pub mod scenario;
pub mod sweep;

pub use output::{read_csv, read_json, write_csv, write_json, Row, Table};
pub use presets::{preset, Preset, Series, PRESET_NAMES};
pub use scenario::Scenario;
pub use sweep::{run_sweep, Observable, Spacing, SweepSpec, SweepVar};

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("unknown configuration key `{0}`")]
    UnknownKey(String),
    #[error("`{key}` = `{value}`: expected {expected}")]
    Value { key: String, value: String, expected: &'static str },
    #[error("{0}")]
    Parse(String),
    #[error("invalid sweep: {0}")]
    Sweep(String),
    #[error(transparent)]
    Harvest(#[from] harvest_core::HarvestError),
}
