//! Randomized invariants over small systems.

use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;

use jpta::design::{phase_unwrap, shift_nonnegative, wrap_phase};
use jpta::{
    analog_objective, array_gain, design_hbf, design_jpta, effective_beams, fit_objective, jpta_fit,
    steering_vector, stack_target, BeamTarget, DesignOptions, HbfOptions, HbfStructure, JptaBeamformer,
    SteeringAngle, SubcarrierGrid, SystemConfig, WeightScheme,
};

/// (M, N, K, kappa) with N dividing M.
fn system() -> impl Strategy<Value = SystemConfig> {
    (1usize..=4, 0usize..3, 2usize..=12, 0.5f64..6.0).prop_map(|(groups, extra, k, kappa)| {
        let n = groups;
        let m = groups * (1 + extra);
        SystemConfig::new(m, n, 100e9, 10e9, k, kappa).unwrap()
    })
}

fn complex() -> impl Strategy<Value = Complex64> {
    (-1.0f64..1.0, -1.0f64..1.0).prop_map(|(re, im)| Complex64::new(re, im))
}

/// A system with a random target inside its power budget.
fn instance() -> impl Strategy<Value = (SystemConfig, BeamTarget)> {
    system().prop_flat_map(|cfg| {
        let (m, k) = (cfg.num_antennas(), cfg.num_subcarriers());
        (
            Just(cfg),
            prop::collection::vec(prop::collection::vec(complex(), m), k),
        )
            .prop_filter_map("nonzero target", |(cfg, raw)| {
                let total: f64 = raw.iter().flatten().map(|z| z.norm_sqr()).sum();
                if total < 1e-6 {
                    return None;
                }
                let s = (cfg.total_power() / total).sqrt() * 0.99;
                let vectors = raw.into_iter().map(|v| v.into_iter().map(|z| z * s).collect()).collect();
                let target = BeamTarget::new(vectors, WeightScheme::Uniform, cfg.total_power()).ok()?;
                Some((cfg, target))
            })
    })
}

fn settings(cfg: &SystemConfig) -> impl Strategy<Value = (Vec<f64>, Vec<f64>, Vec<f64>)> {
    (
        prop::collection::vec(0.0..=cfg.max_delay(), cfg.num_ttds()),
        prop::collection::vec(-PI..PI, cfg.num_antennas()),
        prop::collection::vec(-PI..PI, cfg.num_subcarriers()),
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn beams_have_unit_modulus_entries_and_unit_norm(
        (cfg, (delays, phases, digital)) in system().prop_flat_map(|c| (Just(c.clone()), settings(&c)))
    ) {
        let grid = SubcarrierGrid::new(&cfg);
        let k = cfg.num_subcarriers();
        let bf = JptaBeamformer::from_parts(delays, phases, vec![1.0; k], digital);
        let scale = 1.0 / (cfg.num_antennas() as f64).sqrt();
        for w in effective_beams(&cfg, &grid, &bf).unwrap() {
            for z in &w {
                prop_assert!((z.norm() - scale).abs() < 1e-12);
            }
            let n: f64 = w.iter().map(|z| z.norm_sqr()).sum();
            prop_assert!((n - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn gain_never_exceeds_array_size(
        (cfg, w, theta) in system().prop_flat_map(|c| {
            let m = c.num_antennas();
            (Just(c), prop::collection::vec(complex(), m), -1.5f64..1.5)
        })
    ) {
        let norm: f64 = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        prop_assume!(norm > 1e-6);
        let w: Vec<Complex64> = w.iter().map(|z| z / norm).collect();
        let grid = SubcarrierGrid::new(&cfg);
        for k in grid.indices() {
            let g = array_gain(&cfg, &grid, &w, k, SteeringAngle::new(theta).unwrap()).unwrap();
            prop_assert!(g <= cfg.num_antennas() as f64 * (1.0 + 1e-12));
        }
    }

    #[test]
    fn matched_steering_reaches_full_gain(m in 1usize..32, ratio in 0.9f64..1.1, theta in -1.5f64..1.5) {
        let a = steering_vector(m, ratio, theta);
        let g: Complex64 = a.iter().map(|z| z.conj() * z).sum();
        prop_assert!((g.norm() - m as f64).abs() < 1e-9);
    }

    #[test]
    fn common_delay_leaves_fit_unchanged(
        ((cfg, target), shift) in instance().prop_flat_map(|(c, t)| {
            let d = c.max_delay();
            (Just((c, t)), -d..d)
        })
    ) {
        let grid = SubcarrierGrid::new(&cfg);
        let delays: Vec<f64> = (0..cfg.num_ttds()).map(|n| n as f64 * 1e-11).collect();
        let phases = vec![0.3; cfg.num_antennas()];
        let mags = vec![1.0; cfg.num_subcarriers()];
        let digital = vec![0.0; cfg.num_subcarriers()];
        let a = JptaBeamformer::from_parts(delays.clone(), phases.clone(), mags.clone(), digital.clone());
        let b = JptaBeamformer::from_parts(delays.iter().map(|t| t + shift).collect(), phases, mags, digital);
        let fa = jpta_fit(&cfg, &grid, &target, &a).unwrap();
        let fb = jpta_fit(&cfg, &grid, &target, &b).unwrap();
        prop_assert!((fa - fb).abs() < 1e-10);
    }

    #[test]
    fn nonnegative_shift_keeps_both_objectives(
        (cfg, target, (delays, phases, digital)) in instance()
            .prop_flat_map(|(c, t)| (Just(c.clone()), Just(t), settings(&c)))
    ) {
        let grid = SubcarrierGrid::new(&cfg);
        let half = cfg.half_delay_range();
        let delays: Vec<f64> = delays.iter().map(|t| t - half).collect();
        let bf = JptaBeamformer::from_parts(delays, phases, target.norms().to_vec(), digital);
        let shifted = shift_nonnegative(&bf, &grid);
        prop_assert!(shifted.delays().iter().all(|&t| t >= 0.0));
        let a0 = analog_objective(&cfg, &grid, &target, &bf).unwrap();
        let a1 = analog_objective(&cfg, &grid, &target, &shifted).unwrap();
        prop_assert!((a0 - a1).abs() < 1e-10);
        let f0 = jpta_fit(&cfg, &grid, &target, &bf).unwrap();
        let f1 = jpta_fit(&cfg, &grid, &target, &shifted).unwrap();
        prop_assert!((f0 - f1).abs() < 1e-10);
    }

    #[test]
    fn fit_is_invariant_to_target_scaling_and_rotation(
        ((cfg, target), scale, rotations) in instance().prop_flat_map(|(c, t)| {
            let k = c.num_subcarriers();
            (Just((c, t)), 0.1f64..1.0, prop::collection::vec(-PI..PI, k))
        })
    ) {
        let grid = SubcarrierGrid::new(&cfg);
        let bf = JptaBeamformer::from_parts(
            vec![0.0; cfg.num_ttds()],
            vec![0.0; cfg.num_antennas()],
            vec![1.0; cfg.num_subcarriers()],
            vec![0.0; cfg.num_subcarriers()],
        );
        let beams = effective_beams(&cfg, &grid, &bf).unwrap();
        let moved: Vec<Vec<Complex64>> = target
            .vectors()
            .iter()
            .zip(&rotations)
            .map(|(v, &r)| v.iter().map(|z| z * Complex64::from_polar(scale, r)).collect())
            .collect();
        let moved = BeamTarget::new(moved, WeightScheme::Uniform, cfg.total_power()).unwrap();
        let a = fit_objective(&target, &beams).unwrap();
        let b = fit_objective(&moved, &beams).unwrap();
        prop_assert!((a - b).abs() < 1e-10);
        prop_assert!((0.0..=1.0 + 1e-12).contains(&a));
    }

    #[test]
    fn unwrap_adds_whole_turns_and_bounds_steps(seq in prop::collection::vec(-20.0f64..20.0, 1..40)) {
        let out = phase_unwrap(&seq);
        prop_assert_eq!(out[0], seq[0]);
        for (x, y) in seq.iter().zip(&out) {
            let turns = (y - x) / (2.0 * PI);
            prop_assert!((turns - turns.round()).abs() < 1e-9);
        }
        for pair in out.windows(2) {
            prop_assert!((pair[1] - pair[0]).abs() <= PI + 1e-9);
        }
    }

    #[test]
    fn wrap_phase_lands_in_half_open_interval(x in -100.0f64..100.0) {
        let w = wrap_phase(x);
        prop_assert!((-PI..PI).contains(&w));
        let turns = (x - w) / (2.0 * PI);
        prop_assert!((turns - turns.round()).abs() < 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn design_objective_never_decreases((cfg, target) in instance()) {
        let grid = SubcarrierGrid::new(&cfg);
        let opts = DesignOptions { max_iter: 8, grid_size: 512, ..DesignOptions::default() };
        let (bf, trace) = design_jpta(&cfg, &grid, &target, &opts).unwrap();
        for pair in trace.analog_objective.windows(2) {
            prop_assert!(pair[1] >= pair[0] - 1e-9, "{:?}", trace.analog_objective);
        }
        prop_assert!(bf.delays().iter().all(|&t| (0.0..=cfg.max_delay() * (1.0 + 1e-12)).contains(&t)));
        let fit = jpta_fit(&cfg, &grid, &target, &bf).unwrap();
        prop_assert!((fit - trace.fit[trace.fit.len() - 1]).abs() < 1e-9);
    }

    #[test]
    fn hbf_residual_never_increases((cfg, target) in instance(), seed in 0u64..1000) {
        let b = stack_target(&target);
        let m = cfg.num_antennas();
        let opts = HbfOptions { seed, restarts: 1, ..HbfOptions::default() };
        for structure in [HbfStructure::FullyConnected, HbfStructure::PartiallyConnected] {
            let n_rf = if m % 2 == 0 { m / 2 } else { 1 };
            let bf = design_hbf(&b, structure, n_rf, &opts).unwrap();
            for pair in bf.residual_trace().windows(2) {
                prop_assert!(pair[1] <= pair[0] + 1e-9);
            }
            prop_assert!(bf.total_power() <= target.power_budget() * (1.0 + 1e-9));
        }
    }
}
