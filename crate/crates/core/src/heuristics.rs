//! Closed-form JPTA settings for the rainbow (behavior 1) and split-band
//! (behavior 2) targets, and the delay budget they need.
//!
//! The formulas index antennas from 1 (`m = 1..M`); internally antenna `i`
//! maps to `m = i + 1`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::array_model::{SteeringAngle, SubcarrierGrid, SystemConfig};
use crate::design::{shift_nonnegative, wrap_phase, JptaBeamformer};
use crate::error::Result;
use crate::targets::{behavior1_target, behavior2_target, BeamTarget, WeightScheme};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum HeuristicParams {
    /// Rainbow sweep over `[theta0 - delta/2, theta0 + delta/2]`.
    Behavior1 { theta0: f64, delta_theta: f64 },
    /// Lower half band to `theta1`, upper half band to `theta2`.
    ///
    /// `verbatim` builds the midpoint beam with `sin(theta2)` in both terms,
    /// as the closed-form recipe is commonly printed; by default the first
    /// term uses `theta1` so the beam is the sum of both responses.
    Behavior2 {
        theta1: f64,
        theta2: f64,
        verbatim: bool,
    },
}

impl HeuristicParams {
    pub fn behavior1(theta0: f64, delta_theta: f64) -> Self {
        Self::Behavior1 {
            theta0,
            delta_theta,
        }
    }

    pub fn behavior2(theta1: f64, theta2: f64) -> Self {
        Self::Behavior2 {
            theta1,
            theta2,
            verbatim: false,
        }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            Self::Behavior1 {
                theta0,
                delta_theta,
            } => {
                SteeringAngle::checked(theta0 - delta_theta / 2.0, "theta0 - delta_theta/2")?;
                SteeringAngle::checked(theta0 + delta_theta / 2.0, "theta0 + delta_theta/2")?;
            }
            Self::Behavior2 { theta1, theta2, .. } => {
                SteeringAngle::checked(theta1, "theta1")?;
                SteeringAngle::checked(theta2, "theta2")?;
            }
        }
        Ok(())
    }

    /// The ideal target this heuristic approximates (uniform weights).
    pub fn target(&self, config: &SystemConfig, grid: &SubcarrierGrid) -> Result<BeamTarget> {
        match *self {
            Self::Behavior1 {
                theta0,
                delta_theta,
            } => behavior1_target(config, grid, theta0, delta_theta, WeightScheme::Uniform),
            Self::Behavior2 { theta1, theta2, .. } => {
                behavior2_target(config, grid, theta1, theta2, WeightScheme::Uniform)
            }
        }
    }

    /// Midpoint beam of the split-band heuristic; `None` for behavior 1.
    pub fn midpoint_beam(&self, num_antennas: usize) -> Option<Vec<Complex64>> {
        match *self {
            Self::Behavior1 { .. } => None,
            Self::Behavior2 {
                theta1,
                theta2,
                verbatim,
            } => {
                let first = if verbatim { theta2 } else { theta1 };
                let scale = 1.0 / (2.0 * num_antennas as f64).sqrt();
                Some(
                    (1..=num_antennas)
                        .map(|m| {
                            let m = m as f64;
                            (Complex64::from_polar(1.0, PI * m * first.sin())
                                + Complex64::from_polar(1.0, PI * m * theta2.sin()))
                                * scale
                        })
                        .collect(),
                )
            }
        }
    }
}

/// Heuristic design together with diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct HeuristicDesign {
    pub beamformer: JptaBeamformer,
    /// Delays after mean removal, before clamping to the window.
    pub unclamped_delays: Vec<f64>,
    /// Antennas whose midpoint-beam entry vanished (phase set to 0).
    pub degenerate_antennas: Vec<usize>,
}

fn finish(
    config: &SystemConfig,
    grid: &SubcarrierGrid,
    target: &BeamTarget,
    raw_delays: Vec<f64>,
    phase_of: impl Fn(usize, f64) -> f64,
    nonnegative: bool,
) -> (JptaBeamformer, Vec<f64>) {
    let num_ttds = raw_delays.len();
    let mean = raw_delays.iter().sum::<f64>() / num_ttds as f64;
    let unclamped: Vec<f64> = raw_delays.iter().map(|t| t - mean).collect();
    let half = config.half_delay_range();
    let delays: Vec<f64> = unclamped.iter().map(|t| t.clamp(-half, half)).collect();
    let mapping = config.mapping();
    let phases: Vec<f64> = (0..config.num_antennas())
        .map(|i| wrap_phase(phase_of(i, delays[mapping.ttd_of(i)])))
        .collect();
    let magnitude = (config.total_power() / grid.len() as f64).sqrt();
    let digital: Vec<f64> = (0..grid.len())
        .map(|pos| {
            let w = crate::array_model::analog_beam(config, grid, &delays, &phases, pos);
            let s: Complex64 = w
                .iter()
                .zip(target.direction(pos))
                .map(|(w, b)| w.conj() * b)
                .sum();
            s.arg()
        })
        .collect();
    let bf = JptaBeamformer::from_parts(delays, phases, vec![magnitude; grid.len()], digital);
    let bf = if nonnegative {
        shift_nonnegative(&bf, grid)
    } else {
        bf
    };
    (bf, unclamped)
}

/// Rainbow heuristic: per-group mean of the per-antenna phase slopes across
/// the band, phases matched exactly at the center subcarrier.
pub fn heuristic_behavior1(
    config: &SystemConfig,
    grid: &SubcarrierGrid,
    theta0: f64,
    delta_theta: f64,
    nonnegative: bool,
) -> Result<HeuristicDesign> {
    let params = HeuristicParams::behavior1(theta0, delta_theta);
    params.validate()?;
    let target = params.target(config, grid)?;
    let (f_min, f_max) = (grid.f_min(), grid.f_max());
    let w = config.bandwidth();
    let f0 = config.carrier_freq();
    let slope = ((theta0 - delta_theta / 2.0).sin() * f_min
        - (theta0 + delta_theta / 2.0).sin() * f_max)
        / (2.0 * w * f0);
    let raw: Vec<f64> = config
        .mapping()
        .groups()
        .iter()
        .map(|group| {
            let m_sum: f64 = group.iter().map(|&i| (i + 1) as f64).sum();
            slope * m_sum / group.len() as f64
        })
        .collect();
    let sin0 = theta0.sin();
    let (beamformer, unclamped_delays) = finish(
        config,
        grid,
        &target,
        raw,
        |i, tau| PI * i as f64 * sin0 + 2.0 * PI * f0 * tau,
        nonnegative,
    );
    Ok(HeuristicDesign {
        beamformer,
        unclamped_delays,
        degenerate_antennas: Vec::new(),
    })
}

/// Split-band heuristic: TTD slopes fitted through the midpoint beam at
/// subcarrier `floor(K/3)`, phases aligned with the midpoint beam at the
/// center subcarrier.
pub fn heuristic_behavior2(
    config: &SystemConfig,
    grid: &SubcarrierGrid,
    theta1: f64,
    theta2: f64,
    verbatim: bool,
    nonnegative: bool,
) -> Result<HeuristicDesign> {
    let params = HeuristicParams::Behavior2 {
        theta1,
        theta2,
        verbatim,
    };
    params.validate()?;
    let target = params.target(config, grid)?;
    let m_count = config.num_antennas();
    let mid = params.midpoint_beam(m_count).expect("behavior 2 has a midpoint beam");
    let scale = 1.0 / (2.0 * m_count as f64).sqrt();
    let degenerate_antennas: Vec<usize> = mid
        .iter()
        .enumerate()
        .filter(|(_, z)| z.norm() < 1e-12 * scale)
        .map(|(i, _)| i)
        .collect();
    let f0 = config.carrier_freq();
    let w = config.bandwidth();
    let probe = grid.position(grid.len() as i64 / 3)?;
    let ratio = grid.ratio(probe);
    let sin2 = theta2.sin();
    let raw: Vec<f64> = config
        .mapping()
        .groups()
        .iter()
        .map(|group| {
            let s: Complex64 = group
                .iter()
                .map(|&i| {
                    let m = (i + 1) as f64;
                    mid[i].conj() * Complex64::from_polar(1.0, PI * m * sin2 * ratio)
                })
                .sum();
            -3.0 / (2.0 * PI * w) * s.arg()
        })
        .collect();
    let (beamformer, unclamped_delays) = finish(
        config,
        grid,
        &target,
        raw,
        |i, tau| {
            let base = if degenerate_antennas.contains(&i) {
                0.0
            } else {
                mid[i].arg()
            };
            base + 2.0 * PI * f0 * tau
        },
        nonnegative,
    );
    Ok(HeuristicDesign {
        beamformer,
        unclamped_delays,
        degenerate_antennas,
    })
}

/// Largest TTD delay (seconds) the heuristics need without clipping:
/// `M |sin(delta/2)| / W` for behavior 1 and `3 / W` for behavior 2.
pub fn required_delay_budget(params: &HeuristicParams, config: &SystemConfig) -> f64 {
    let w = config.bandwidth();
    match *params {
        HeuristicParams::Behavior1 { delta_theta, .. } => {
            config.num_antennas() as f64 * (delta_theta / 2.0).sin().abs() / w
        }
        HeuristicParams::Behavior2 { .. } => 3.0 / w,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::array_model::{effective_beamformer, inner};
    use crate::design::center_delays;
    use crate::metrics::jpta_fit;

    fn preset(k: usize) -> (SystemConfig, SubcarrierGrid) {
        let cfg = SystemConfig::reference_preset().with_num_subcarriers(k).unwrap();
        let grid = SubcarrierGrid::new(&cfg);
        (cfg, grid)
    }

    #[test]
    fn delay_budgets() {
        let cfg = SystemConfig::reference_preset();
        let b1 = required_delay_budget(&HeuristicParams::behavior1(PI / 6.0, PI / 4.0), &cfg);
        assert!((b1 - 64.0 * (PI / 8.0).sin() / 1e10).abs() < 1e-22);
        assert!((b1 - 2.449e-9).abs() < 1e-12);
        assert_eq!(required_delay_budget(&HeuristicParams::behavior1(0.3, 0.0), &cfg), 0.0);
        let b2 = required_delay_budget(&HeuristicParams::behavior2(-0.5, 0.5), &cfg);
        assert!((b2 - 0.3e-9).abs() < 1e-22);
    }

    #[test]
    fn behavior1_matches_center_subcarrier() {
        let (cfg, grid) = preset(256);
        let design = heuristic_behavior1(&cfg, &grid, PI / 6.0, PI / 4.0, true).unwrap();
        let target = HeuristicParams::behavior1(PI / 6.0, PI / 4.0).target(&cfg, &grid).unwrap();
        let w = effective_beamformer(&cfg, &grid, &design.beamformer, 0).unwrap();
        let pos = grid.position(0).unwrap();
        assert!((inner(target.direction(pos), &w).norm() - 1.0).abs() < 1e-9);
        let half = cfg.half_delay_range();
        assert!(design.unclamped_delays.iter().all(|t| t.abs() <= half));
    }

    #[test]
    fn behavior1_satisfies_beamformer_invariants() {
        let (cfg, grid) = preset(128);
        let cfg = cfg.with_delay_range(8.0).unwrap();
        let design = heuristic_behavior1(&cfg, &grid, 0.2, 0.8, true).unwrap();
        let bf = &design.beamformer;
        assert!(bf.delays().iter().all(|&t| (0.0..=cfg.max_delay() * (1.0 + 1e-12)).contains(&t)));
        assert!(bf.phases().iter().all(|p| (-PI..PI).contains(p)));
        assert!((bf.total_power() - cfg.total_power()).abs() < 1e-9);
    }

    #[test]
    fn behavior1_zero_sweep_gives_progressive_delays() {
        let (cfg, grid) = preset(64);
        let design = heuristic_behavior1(&cfg, &grid, 0.4, 0.0, false).unwrap();
        let d = design.unclamped_delays;
        let step = d[1] - d[0];
        let expected = 0.4f64.sin() * (grid.f_min() - grid.f_max()) / (2.0 * 10e9 * 100e9);
        assert!((step - expected).abs() < 1e-22);
        for pair in d.windows(2) {
            assert!((pair[1] - pair[0] - step).abs() < 1e-22);
        }
    }

    #[test]
    fn behavior2_spread_is_bounded() {
        let (cfg, grid) = preset(256);
        for &(t1, t2) in &[(-PI / 4.0, PI / 6.0), (0.1, 1.2), (-1.0, -0.2)] {
            let d = heuristic_behavior2(&cfg, &grid, t1, t2, false, true).unwrap();
            let lo = d.unclamped_delays.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = d.unclamped_delays.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            assert!(hi - lo <= 3.0 / cfg.bandwidth() + 1e-21);
        }
    }

    #[test]
    fn behavior2_equal_angles_is_fixed_beam() {
        let (cfg, grid) = preset(64);
        let d = heuristic_behavior2(&cfg, &grid, 0.3, 0.3, false, false).unwrap();
        let first = d.unclamped_delays[0];
        // all groups see the same steering phase at the probe subcarrier
        let lo = d.unclamped_delays.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = d.unclamped_delays.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        assert!(hi - lo < 3.0 / cfg.bandwidth());
        assert!(first.is_finite());
        let target = HeuristicParams::behavior2(0.3, 0.3).target(&cfg, &grid).unwrap();
        let fit = jpta_fit(&cfg, &grid, &target, &d.beamformer).unwrap();
        assert!(fit > 0.5, "fit {fit}");
    }

    #[test]
    fn midpoint_beam_variants() {
        let p = HeuristicParams::behavior2(-0.5, 0.5);
        let v = p.midpoint_beam(4).unwrap();
        let expected = (Complex64::from_polar(1.0, -PI * 0.5f64.sin())
            + Complex64::from_polar(1.0, PI * 0.5f64.sin()))
            / 8f64.sqrt();
        assert!((v[0] - expected).norm() < 1e-15);
        let verbatim = HeuristicParams::Behavior2 {
            theta1: -0.5,
            theta2: 0.5,
            verbatim: true,
        };
        let v = verbatim.midpoint_beam(4).unwrap();
        assert!((v[0] - Complex64::from_polar(2.0 / 8f64.sqrt(), PI * 0.5f64.sin())).norm() < 1e-15);
        assert!(HeuristicParams::behavior1(0.0, 0.1).midpoint_beam(4).is_none());
    }

    #[test]
    fn antipodal_angles_flag_degenerate_entries() {
        // sin(theta1) = -sin(theta2) = 0.5: entries with m*pi*0.5 = pi/2 mod pi cancel
        let cfg = SystemConfig::new(4, 4, 100e9, 10e9, 16, 4.0).unwrap();
        let grid = SubcarrierGrid::new(&cfg);
        let d = heuristic_behavior2(&cfg, &grid, -PI / 6.0, PI / 6.0, false, true).unwrap();
        assert_eq!(d.degenerate_antennas, vec![0, 2]);
    }

    #[test]
    fn rejects_out_of_range_angles() {
        let (cfg, grid) = preset(16);
        assert!(heuristic_behavior1(&cfg, &grid, 1.5, 0.4, true).is_err());
        assert!(heuristic_behavior2(&cfg, &grid, 0.0, 2.0, false, true).is_err());
    }

    #[test]
    fn centered_delays_helper_agrees() {
        // mean removal in the heuristics is the unconstrained case of centering
        let d = [1.0, 2.0, 6.0];
        let (c, off) = center_delays(&d, 100.0);
        assert_eq!(off, 3.0);
        assert_eq!(c, vec![-2.0, -1.0, 3.0]);
    }
}
