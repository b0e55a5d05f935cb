//! Joint phase–time array (JPTA) beamforming for wideband phased arrays.
//!
//! A JPTA front end drives each antenna through a phase shifter fed by one
//! of a few true-time-delay (TTD) lines, which makes the analog beam
//! frequency dependent. This crate designs TTD delays, phase shifts and
//! per-subcarrier digital weights that reproduce a target beam per OFDM
//! subcarrier, and compares the result with hybrid beamforming baselines.
//!
//! ```no_run
//! use jpta::{behavior1_target, design_jpta, jpta_fit, DesignOptions, SubcarrierGrid, SystemConfig, WeightScheme};
//! use std::f64::consts::PI;
//!
//! let cfg = SystemConfig::reference_preset().with_num_subcarriers(256).unwrap();
//! let grid = SubcarrierGrid::new(&cfg);
//! let target = behavior1_target(&cfg, &grid, PI / 6.0, PI / 4.0, WeightScheme::Uniform).unwrap();
//! let (bf, _trace) = design_jpta(&cfg, &grid, &target, &DesignOptions::default()).unwrap();
//! println!("fit = {:.4}", jpta_fit(&cfg, &grid, &target, &bf).unwrap());
//! ```

pub mod array_model;
pub mod design;
pub mod error;
pub mod experiment;
pub mod hbf;
pub mod heuristics;
pub mod metrics;
pub mod targets;

pub use array_model::{
    array_gain, array_response, default_theta_grid, effective_beamformer, effective_beams,
    gain_map, steering_vector, to_db, GainMap, SteeringAngle, SubcarrierGrid, SystemConfig,
    TtdMapping,
};
pub use design::{
    design_jpta, ConvergenceTrace, DesignOptions, JptaBeamformer, PhaseInit, TtdUpdate,
};
pub use error::{JptaError, Result};
pub use hbf::{
    design_hbf, hbf_fit, min_rf_chains, stack_target, HbfBeamformer, HbfOptions, HbfStructure,
    TargetMatrix,
};
pub use heuristics::{
    heuristic_behavior1, heuristic_behavior2, required_delay_budget, HeuristicDesign,
    HeuristicParams,
};
pub use metrics::{analog_objective, fit_objective, jpta_fit, objective_tilde, FitReport};
pub use targets::{
    behavior1_target, behavior2_target, custom_target, multi_angle_target, BeamTarget,
    WeightScheme,
};
