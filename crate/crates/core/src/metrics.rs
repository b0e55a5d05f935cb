//! Matching objectives and goodness-of-fit.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::array_model::{analog_beam, check_beamformer, inner, norm, SubcarrierGrid, SystemConfig};
use crate::design::JptaBeamformer;
use crate::error::{JptaError, Result};
use crate::targets::BeamTarget;

// Per-subcarrier terms are collected before summing so results do not
// depend on how the thread pool splits the work.
const UNIT_NORM_TOL: f64 = 1e-9;

/// Full matching objective, power term plus weighted beam mismatch:
/// `(1/K) sum_k [ (|b_k| - |alpha_k|)^2 + w_k |bbar_k - T P d_k e^{j angle(alpha_k)}|^2 ]`.
pub fn objective_tilde(
    config: &SystemConfig,
    grid: &SubcarrierGrid,
    target: &BeamTarget,
    bf: &JptaBeamformer,
) -> Result<f64> {
    target.check_against(config, grid)?;
    check_beamformer(config, bf)?;
    check_digital(grid, bf)?;
    let total: f64 = (0..grid.len())
        .into_par_iter()
        .map(|pos| {
            let power = (target.norm(pos) - bf.magnitudes()[pos]).powi(2);
            let w = analog_beam(config, grid, bf.delays(), bf.phases(), pos);
            let rot = Complex64::from_polar(1.0, bf.digital_phases()[pos]);
            let mismatch: f64 = target
                .direction(pos)
                .iter()
                .zip(&w)
                .map(|(b, w)| (b - w * rot).norm_sqr())
                .sum();
            power + target.weight(pos) * mismatch
        })
        .collect::<Vec<f64>>()
        .iter()
        .sum();
    Ok(total / grid.len() as f64)
}

fn check_digital(grid: &SubcarrierGrid, bf: &JptaBeamformer) -> Result<()> {
    if bf.magnitudes().len() != grid.len() {
        return Err(JptaError::DimensionMismatch {
            what: "digital weight count",
            expected: grid.len(),
            actual: bf.magnitudes().len(),
        });
    }
    Ok(())
}

/// Analog objective `sum_k w_k Re[ e^{j angle(alpha_k)} bbar_k^H T P d_k ]`.
pub fn analog_objective(
    config: &SystemConfig,
    grid: &SubcarrierGrid,
    target: &BeamTarget,
    bf: &JptaBeamformer,
) -> Result<f64> {
    target.check_against(config, grid)?;
    check_beamformer(config, bf)?;
    check_digital(grid, bf)?;
    Ok(analog_objective_raw(
        config,
        grid,
        target,
        bf.delays(),
        bf.phases(),
        bf.digital_phases(),
    ))
}

pub(crate) fn analog_objective_raw(
    config: &SystemConfig,
    grid: &SubcarrierGrid,
    target: &BeamTarget,
    delays: &[f64],
    phases: &[f64],
    digital_phases: &[f64],
) -> f64 {
    (0..grid.len())
        .into_par_iter()
        .map(|pos| {
            let wk = target.weight(pos);
            if wk == 0.0 {
                return 0.0;
            }
            let w = analog_beam(config, grid, delays, phases, pos);
            let c = inner(target.direction(pos), &w) * Complex64::from_polar(1.0, digital_phases[pos]);
            wk * c.re
        })
        .collect::<Vec<f64>>()
        .iter()
        .sum()
}

pub(crate) fn fit_from_raw(
    config: &SystemConfig,
    grid: &SubcarrierGrid,
    target: &BeamTarget,
    delays: &[f64],
    phases: &[f64],
) -> f64 {
    let num: f64 = (0..grid.len())
        .into_par_iter()
        .map(|pos| {
            let wk = target.weight(pos);
            if wk == 0.0 {
                return 0.0;
            }
            let w = analog_beam(config, grid, delays, phases, pos);
            wk * inner(target.direction(pos), &w).norm()
        })
        .collect::<Vec<f64>>()
        .iter()
        .sum();
    num / target.weights().iter().sum::<f64>()
}

/// `|bbar_k^H w_k|` for every subcarrier.
pub fn per_subcarrier_match(target: &BeamTarget, beams: &[Vec<Complex64>]) -> Result<Vec<f64>> {
    check_beam_set(target, beams)?;
    Ok(target
        .directions()
        .iter()
        .zip(beams)
        .map(|(b, w)| inner(b, w).norm())
        .collect())
}

fn check_beam_set(target: &BeamTarget, beams: &[Vec<Complex64>]) -> Result<()> {
    if beams.len() != target.num_subcarriers() {
        return Err(JptaError::DimensionMismatch {
            what: "beam set size",
            expected: target.num_subcarriers(),
            actual: beams.len(),
        });
    }
    for (i, w) in beams.iter().enumerate() {
        if w.len() != target.num_antennas() {
            return Err(JptaError::DimensionMismatch {
                what: "beamformer length",
                expected: target.num_antennas(),
                actual: w.len(),
            });
        }
        let n = norm(w);
        if (n - 1.0).abs() > UNIT_NORM_TOL {
            return Err(JptaError::NotUnitNorm { index: i, norm: n });
        }
    }
    Ok(())
}

/// Goodness of fit `sum_k w_k |bbar_k^H w_k| / sum_k w_k` for unit-norm beams.
pub fn fit_objective(target: &BeamTarget, beams: &[Vec<Complex64>]) -> Result<f64> {
    let matches = per_subcarrier_match(target, beams)?;
    let num: f64 = matches.iter().zip(target.weights()).map(|(m, w)| m * w).sum();
    Ok(num / target.weights().iter().sum::<f64>())
}

/// Goodness of fit of a JPTA design.
pub fn jpta_fit(
    config: &SystemConfig,
    grid: &SubcarrierGrid,
    target: &BeamTarget,
    bf: &JptaBeamformer,
) -> Result<f64> {
    target.check_against(config, grid)?;
    check_beamformer(config, bf)?;
    Ok(fit_from_raw(config, grid, target, bf.delays(), bf.phases()))
}

/// Summary of how well a beam set reproduces a target.
#[derive(Debug, Clone, PartialEq)]
pub struct FitReport {
    pub f_obj: f64,
    /// Full matching objective; only defined for JPTA designs.
    pub f_tilde_obj: Option<f64>,
    pub per_subcarrier_match: Vec<f64>,
    pub trace: Vec<f64>,
    pub metadata: BTreeMap<String, String>,
}

impl FitReport {
    pub fn for_jpta(
        config: &SystemConfig,
        grid: &SubcarrierGrid,
        target: &BeamTarget,
        bf: &JptaBeamformer,
        trace: Vec<f64>,
    ) -> Result<Self> {
        let beams = crate::array_model::effective_beams(config, grid, bf)?;
        let per_subcarrier_match = per_subcarrier_match(target, &beams)?;
        let f_obj = fit_objective(target, &beams)?;
        let f_tilde_obj = Some(objective_tilde(config, grid, target, bf)?);
        Ok(Self {
            f_obj,
            f_tilde_obj,
            per_subcarrier_match,
            trace,
            metadata: BTreeMap::new(),
        })
    }

    pub fn for_beams(target: &BeamTarget, beams: &[Vec<Complex64>]) -> Result<Self> {
        Ok(Self {
            f_obj: fit_objective(target, beams)?,
            f_tilde_obj: None,
            per_subcarrier_match: per_subcarrier_match(target, beams)?,
            trace: Vec::new(),
            metadata: BTreeMap::new(),
        })
    }

    pub fn with_meta(mut self, key: &str, value: impl ToString) -> Self {
        self.metadata.insert(key.to_string(), value.to_string());
        self
    }
}
