//! Config-driven experiments: parsing, drivers and result files.

pub mod config;
pub mod io;
pub mod runner;

pub use config::{AlgorithmBlock, Behavior, ExperimentConfig, SweepBlock, SweepParameter};
pub use runner::{
    compare_hbf, reproduce, run_design, run_gain_map, run_sweep, Design, DesignOutput, Evaluated,
    ResultRecord, FIGURES,
};

use crate::error::JptaError;

/// Process exit status for an error: 2 for configuration problems, 3 for
/// numerical failures, 1 for I/O.
pub fn exit_code(err: &JptaError) -> i32 {
    match err {
        JptaError::Numerical(_) | JptaError::DegenerateTarget(_) | JptaError::NotUnitNorm { .. } => 3,
        JptaError::Io(_) => 1,
        _ => 2,
    }
}
