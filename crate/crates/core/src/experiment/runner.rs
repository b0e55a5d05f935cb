//! Experiment drivers behind the command-line subcommands.

use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::time::Instant;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::array_model::{effective_beams, gain_map, GainMap, SubcarrierGrid, SystemConfig};
use crate::design::{design_jpta, ConvergenceTrace, JptaBeamformer};
use crate::error::{JptaError, Result};
use crate::hbf::{
    design_hbf, fc_warm_sweep, hbf_fit, hbf_per_subcarrier_match, stack_target, HbfBeamformer,
    HbfOptions, HbfStructure,
};
use crate::heuristics::{heuristic_behavior1, heuristic_behavior2};
use crate::metrics::FitReport;
use crate::targets::BeamTarget;

use super::config::{
    AlgorithmBlock, Behavior, ExperimentConfig, StructureName, SweepParameter, TargetBlock,
    Variant, WeightName,
};
use super::io;

/// One row of a sweep or comparison table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub experiment: String,
    pub parameter: String,
    pub value: f64,
    pub algorithm: String,
    pub f_obj: f64,
    pub f_tilde_obj: Option<f64>,
    pub iterations: usize,
    pub wall_time_s: Option<f64>,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Design {
    Jpta {
        beamformer: JptaBeamformer,
        trace: ConvergenceTrace,
    },
    Hbf(HbfBeamformer),
}

impl Design {
    /// Unit-norm effective beam per subcarrier (zero if an HBF column
    /// vanishes).
    pub fn beams(&self, config: &SystemConfig, grid: &SubcarrierGrid) -> Result<Vec<Vec<Complex64>>> {
        match self {
            Self::Jpta { beamformer, .. } => effective_beams(config, grid, beamformer),
            Self::Hbf(bf) => Ok(bf.normalized_beams()),
        }
    }

    pub fn iterations(&self) -> usize {
        match self {
            Self::Jpta { trace, .. } => trace.iterations(),
            Self::Hbf(bf) => bf.residual_trace().len().saturating_sub(1),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Evaluated {
    pub design: Design,
    pub report: FitReport,
    pub wall_time_s: f64,
}

fn config_error(msg: impl Into<String>) -> JptaError {
    JptaError::InvalidConfig(msg.into())
}

/// Designs with one algorithm and scores the result against `target`.
pub fn run_algorithm(
    experiment: &ExperimentConfig,
    config: &SystemConfig,
    grid: &SubcarrierGrid,
    target: &BeamTarget,
    algorithm: &AlgorithmBlock,
) -> Result<Evaluated> {
    let start = Instant::now();
    let design = match algorithm {
        AlgorithmBlock::Jpta { .. } => {
            let opts = algorithm.design_options()?.expect("JPTA block has options");
            let (beamformer, trace) = design_jpta(config, grid, target, &opts)?;
            Design::Jpta { beamformer, trace }
        }
        AlgorithmBlock::Heuristic { verbatim } => {
            let h = if let Some((t0, d)) = experiment.behavior1_angles() {
                heuristic_behavior1(config, grid, t0, d, true)?
            } else if let Some((t1, t2)) = experiment.behavior2_angles() {
                heuristic_behavior2(config, grid, t1, t2, *verbatim, true)?
            } else {
                return Err(config_error(
                    "algorithm.kind = heuristic needs target behavior one or two",
                ));
            };
            Design::Jpta {
                beamformer: h.beamformer,
                trace: ConvergenceTrace::default(),
            }
        }
        AlgorithmBlock::Hbf { .. } => {
            let (structure, n_rf, opts) = algorithm
                .hbf_options(experiment.seed)
                .expect("HBF block has options");
            Design::Hbf(design_hbf(&stack_target(target), structure, n_rf, &opts)?)
        }
    };
    let wall_time_s = start.elapsed().as_secs_f64();
    let report = evaluate(config, grid, target, &design)?
        .with_meta("algorithm", algorithm.label())
        .with_meta("seed", experiment.seed)
        .with_meta("m", config.num_antennas())
        .with_meta("n", config.num_ttds())
        .with_meta("k", config.num_subcarriers())
        .with_meta("kappa", config.delay_range());
    Ok(Evaluated {
        design,
        report,
        wall_time_s,
    })
}

fn check_finite(v: f64, what: &str) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(JptaError::Numerical(format!("{what} is not finite")))
    }
}

/// Fit report of a finished design.
pub fn evaluate(
    config: &SystemConfig,
    grid: &SubcarrierGrid,
    target: &BeamTarget,
    design: &Design,
) -> Result<FitReport> {
    let report = match design {
        Design::Jpta { beamformer, trace } => {
            FitReport::for_jpta(config, grid, target, beamformer, trace.analog_objective.clone())?
        }
        Design::Hbf(bf) => FitReport {
            f_obj: hbf_fit(target, bf)?,
            f_tilde_obj: None,
            per_subcarrier_match: hbf_per_subcarrier_match(target, bf)?,
            trace: bf.residual_trace().to_vec(),
            metadata: Default::default(),
        },
    };
    check_finite(report.f_obj, "F_obj")?;
    if let Some(t) = report.f_tilde_obj {
        check_finite(t, "matching objective")?;
    }
    Ok(report)
}

pub fn theta_grid(step_deg: f64) -> Vec<f64> {
    let n = (180.0 / step_deg).floor() as usize;
    (0..=n)
        .map(|i| (-90.0 + i as f64 * step_deg).to_radians())
        .collect()
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    Ok(BufWriter::new(File::create(path)?))
}

fn write_map(path: &Path, map: &GainMap, echo: &str) -> Result<PathBuf> {
    io::write_gain_map(map, echo, create(path)?)?;
    Ok(path.to_path_buf())
}

fn write_records(path: &Path, rows: &[ResultRecord], echo: &str) -> Result<PathBuf> {
    io::write_rows(rows, "results", echo, create(path)?)?;
    Ok(path.to_path_buf())
}

/// Files written by [`run_design`].
#[derive(Debug, Clone, PartialEq)]
pub struct DesignOutput {
    pub files: Vec<PathBuf>,
    pub evaluated: Evaluated,
}

/// Designs the configured algorithm and writes the beamformer, the fit
/// report and (optionally) the gain map into `out_dir`.
pub fn run_design(experiment: &ExperimentConfig, out_dir: &Path) -> Result<DesignOutput> {
    let config = experiment.system_config()?;
    let grid = SubcarrierGrid::new(&config);
    let target = experiment.build_target(&config, &grid)?;
    let evaluated = run_algorithm(experiment, &config, &grid, &target, &experiment.algorithm)?;
    let echo = experiment.echo();
    let mut files = Vec::new();
    match &evaluated.design {
        Design::Jpta { beamformer, .. } => {
            let p = out_dir.join("beamformer.txt");
            io::write_beamformer(beamformer, &echo, create(&p)?)?;
            files.push(p);
        }
        Design::Hbf(bf) => {
            let p = out_dir.join("hbf_beamformer.txt");
            io::write_hbf(bf, &echo, create(&p)?)?;
            files.push(p);
        }
    }
    let p = out_dir.join("fit_report.csv");
    let indices: Vec<i64> = grid.indices().collect();
    let mut report = evaluated.report.clone();
    if experiment.output.record_timing {
        report = report.with_meta("wall_time_s", evaluated.wall_time_s);
    }
    io::write_fit_report(&report, &indices, &echo, create(&p)?)?;
    files.push(p);
    if experiment.output.gain_map {
        let beams = evaluated.design.beams(&config, &grid)?;
        let map = gain_map(&config, &grid, &beams, &theta_grid(experiment.output.theta_step_deg))?;
        files.push(write_map(&out_dir.join("gain_map.csv"), &map, &echo)?);
    }
    Ok(DesignOutput { files, evaluated })
}

/// Gain maps of the ideal target and of the configured design.
pub fn run_gain_map(experiment: &ExperimentConfig, out_dir: &Path) -> Result<Vec<PathBuf>> {
    let config = experiment.system_config()?;
    let grid = SubcarrierGrid::new(&config);
    let target = experiment.build_target(&config, &grid)?;
    let thetas = theta_grid(experiment.output.theta_step_deg);
    let echo = experiment.echo();
    let ideal = gain_map(&config, &grid, target.directions(), &thetas)?;
    let evaluated = run_algorithm(experiment, &config, &grid, &target, &experiment.algorithm)?;
    let designed = gain_map(&config, &grid, &evaluated.design.beams(&config, &grid)?, &thetas)?;
    Ok(vec![
        write_map(&out_dir.join("gain_map_ideal.csv"), &ideal, &echo)?,
        write_map(&out_dir.join("gain_map_design.csv"), &designed, &echo)?,
    ])
}

fn as_count(value: f64, param: SweepParameter) -> Result<usize> {
    if value.fract() != 0.0 || value < 1.0 {
        return Err(config_error(format!(
            "sweep value {value} for `{}` must be a positive integer",
            param.name()
        )));
    }
    Ok(value as usize)
}

/// System and algorithm at one sweep point; `None` when the parameter does
/// not apply (an RF-chain count for a PC network that does not divide M).
fn sweep_point(
    base: &SystemConfig,
    algorithm: &AlgorithmBlock,
    param: SweepParameter,
    value: f64,
) -> Result<Option<(SystemConfig, AlgorithmBlock)>> {
    let mut alg = algorithm.clone();
    let config = match param {
        SweepParameter::N => base.clone().with_num_ttds(as_count(value, param)?)?,
        SweepParameter::Kappa => base.clone().with_delay_range(value)?,
        SweepParameter::K => base.clone().with_num_subcarriers(as_count(value, param)?)?,
        SweepParameter::MaxIter => {
            let v = as_count(value, param)?;
            match &mut alg {
                AlgorithmBlock::Jpta { max_iter, .. } => *max_iter = v,
                AlgorithmBlock::Hbf { iters, .. } => *iters = v,
                AlgorithmBlock::Heuristic { .. } => {}
            }
            base.clone()
        }
        SweepParameter::NRf => {
            let v = as_count(value, param)?;
            if let AlgorithmBlock::Hbf {
                n_rf, structure, ..
            } = &mut alg
            {
                if v > base.num_antennas()
                    || (*structure == StructureName::Pc && base.num_antennas() % v != 0)
                {
                    return Ok(None);
                }
                *n_rf = v;
            }
            base.clone()
        }
    };
    Ok(Some((config, alg)))
}

fn record(
    experiment: &ExperimentConfig,
    param: &str,
    value: f64,
    algorithm: &AlgorithmBlock,
    ev: &Evaluated,
) -> ResultRecord {
    ResultRecord {
        experiment: experiment.id.clone(),
        parameter: param.to_string(),
        value,
        algorithm: algorithm.label().to_string(),
        f_obj: ev.report.f_obj,
        f_tilde_obj: ev.report.f_tilde_obj,
        iterations: ev.design.iterations(),
        wall_time_s: experiment.output.record_timing.then_some(ev.wall_time_s),
        seed: experiment.seed,
    }
}

/// Evaluates every (value, algorithm) pair of the sweep block; rows are
/// sorted by value, then by the algorithm's position in the block.
pub fn sweep_records(experiment: &ExperimentConfig) -> Result<Vec<ResultRecord>> {
    let sweep = experiment
        .sweep
        .as_ref()
        .ok_or_else(|| config_error("sweep block missing"))?;
    let base = experiment.system_config()?;
    let algorithms = sweep
        .algorithms
        .clone()
        .unwrap_or_else(|| vec![experiment.algorithm.clone()]);
    let jobs: Vec<(usize, f64, usize)> = sweep
        .values
        .iter()
        .enumerate()
        .flat_map(|(vi, &v)| (0..algorithms.len()).map(move |ai| (vi, v, ai)))
        .collect();
    let mut rows: Vec<(f64, usize, ResultRecord)> = jobs
        .into_par_iter()
        .map(|(_, value, ai)| -> Result<Option<(f64, usize, ResultRecord)>> {
            let Some((config, alg)) = sweep_point(&base, &algorithms[ai], sweep.parameter, value)? else {
                return Ok(None);
            };
            let grid = SubcarrierGrid::new(&config);
            let target = experiment.build_target(&config, &grid)?;
            let ev = run_algorithm(experiment, &config, &grid, &target, &alg)?;
            Ok(Some((value, ai, record(experiment, sweep.parameter.name(), value, &alg, &ev))))
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    rows.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    Ok(rows.into_iter().map(|(_, _, r)| r).collect())
}

/// Runs the sweep and writes `sweep.csv`.
pub fn run_sweep(experiment: &ExperimentConfig, out_dir: &Path) -> Result<(PathBuf, Vec<ResultRecord>)> {
    let rows = sweep_records(experiment)?;
    let path = write_records(&out_dir.join("sweep.csv"), &rows, &experiment.echo())?;
    Ok((path, rows))
}

/// F_obj versus RF-chain count for both HBF networks next to a JPTA
/// reference (repeated on every row so it plots as a flat line). The FC
/// curve is warm-started from each smaller solution.
pub fn compare_hbf_records(experiment: &ExperimentConfig, n_rf_values: &[usize]) -> Result<Vec<ResultRecord>> {
    let config = experiment.system_config()?;
    let grid = SubcarrierGrid::new(&config);
    let target = experiment.build_target(&config, &grid)?;
    let reference_alg = match &experiment.algorithm {
        a @ AlgorithmBlock::Jpta { .. } => a.clone(),
        _ => AlgorithmBlock::jpta(Variant::LineSearch),
    };
    let reference = run_algorithm(experiment, &config, &grid, &target, &reference_alg)?;
    let mut values = n_rf_values.to_vec();
    values.sort_unstable();
    values.dedup();
    if values.is_empty() || values[0] == 0 || values[values.len() - 1] > config.num_antennas() {
        return Err(config_error(format!(
            "RF-chain counts must lie in 1..={}",
            config.num_antennas()
        )));
    }
    let b = stack_target(&target);
    let opts = HbfOptions {
        seed: experiment.seed,
        ..HbfOptions::default()
    };
    let fc = fc_warm_sweep(&b, &values, &opts)?;
    let pc: Vec<Option<HbfBeamformer>> = values
        .par_iter()
        .map(|&n| {
            if config.num_antennas() % n == 0 {
                design_hbf(&b, HbfStructure::PartiallyConnected, n, &opts).map(Some)
            } else {
                Ok(None)
            }
        })
        .collect::<Result<_>>()?;
    let mut rows = Vec::new();
    for (i, &n) in values.iter().enumerate() {
        let v = n as f64;
        rows.push(record(experiment, "n_rf", v, &reference_alg, &reference));
        for (bf, structure) in [
            (Some(&fc[i]), StructureName::Fc),
            (pc[i].as_ref(), StructureName::Pc),
        ] {
            if let Some(bf) = bf {
                let design = Design::Hbf(bf.clone());
                let report = evaluate(&config, &grid, &target, &design)?;
                let ev = Evaluated {
                    design,
                    report,
                    wall_time_s: 0.0,
                };
                rows.push(record(experiment, "n_rf", v, &AlgorithmBlock::hbf(structure, n), &ev));
            }
        }
    }
    Ok(rows)
}

pub fn compare_hbf(
    experiment: &ExperimentConfig,
    n_rf_values: &[usize],
    out_dir: &Path,
) -> Result<(PathBuf, Vec<ResultRecord>)> {
    let rows = compare_hbf_records(experiment, n_rf_values)?;
    let path = write_records(&out_dir.join("compare_hbf.csv"), &rows, &experiment.echo())?;
    Ok((path, rows))
}

/// Figure presets that [`reproduce`] knows about.
pub const FIGURES: [&str; 7] = ["fig4", "fig5", "fig6", "fig7", "fig8", "fig9", "fig11"];

/// Reference parameters: 64 antennas, 100 GHz carrier, 10 GHz bandwidth,
/// 2048 subcarriers (256 with `fast`), kappa = 64, uniform weights.
pub fn preset(behavior: Behavior, fast: bool, seed: u64) -> ExperimentConfig {
    let mut cfg = ExperimentConfig {
        id: "preset".into(),
        system: Default::default(),
        target: TargetBlock::new(behavior, WeightName::Uniform),
        algorithm: AlgorithmBlock::default(),
        sweep: None,
        output: Default::default(),
        seed,
    };
    if fast {
        cfg.system.k = 256;
    }
    cfg
}

pub fn rainbow() -> Behavior {
    Behavior::One {
        theta0_deg: 30.0,
        delta_theta_deg: 45.0,
    }
}

pub fn split() -> Behavior {
    Behavior::Two {
        theta1_deg: -45.0,
        theta2_deg: 30.0,
    }
}

pub fn three_band() -> Behavior {
    Behavior::Multi {
        angles_deg: vec![-40.0, 0.0, 40.0],
        band_starts: None,
    }
}

fn with_id(mut cfg: ExperimentConfig, id: &str) -> ExperimentConfig {
    cfg.id = id.to_string();
    cfg
}

fn echo_for(cfg: &ExperimentConfig, fast: bool) -> String {
    let mut echo = cfg.echo();
    if fast {
        echo.push_str("\nwarning: fast mode uses K=256 subcarriers instead of 2048");
    }
    echo
}

fn sweep_figure(
    id: &str,
    fast: bool,
    seed: u64,
    out_dir: &Path,
    parameter: SweepParameter,
    values: [&[f64]; 2],
    algorithms: &[AlgorithmBlock],
) -> Result<Vec<PathBuf>> {
    let mut files = Vec::new();
    for (tag, behavior, vals) in [("b1", rainbow(), values[0]), ("b2", split(), values[1])] {
        let mut cfg = with_id(preset(behavior, fast, seed), &format!("{id}_{tag}"));
        cfg.sweep = Some(super::config::SweepBlock {
            parameter,
            values: vals.to_vec(),
            algorithms: Some(algorithms.to_vec()),
        });
        let rows = sweep_records(&cfg)?;
        files.push(write_records(
            &out_dir.join(format!("{id}_{tag}.csv")),
            &rows,
            &echo_for(&cfg, fast),
        )?);
    }
    Ok(files)
}

fn gain_map_pair(
    cfg: &ExperimentConfig,
    fast: bool,
    out_dir: &Path,
    ideal_name: &str,
    design_name: &str,
) -> Result<(Vec<PathBuf>, FitReport)> {
    let config = cfg.system_config()?;
    let grid = SubcarrierGrid::new(&config);
    let target = cfg.build_target(&config, &grid)?;
    let thetas = theta_grid(cfg.output.theta_step_deg);
    let echo = echo_for(cfg, fast);
    let ideal = gain_map(&config, &grid, target.directions(), &thetas)?;
    let ev = run_algorithm(cfg, &config, &grid, &target, &cfg.algorithm)?;
    let designed = gain_map(&config, &grid, &ev.design.beams(&config, &grid)?, &thetas)?;
    let mut files = vec![write_map(&out_dir.join(design_name), &designed, &echo)?];
    if !ideal_name.is_empty() {
        files.insert(0, write_map(&out_dir.join(ideal_name), &ideal, &echo)?);
    }
    Ok((files, ev.report))
}

#[derive(Debug, Serialize)]
struct SummaryRow {
    figure: String,
    case: String,
    algorithm: String,
    f_obj: f64,
}

/// Runs a figure preset and writes plot-ready CSVs into `out_dir`.
pub fn reproduce(figure: &str, fast: bool, seed: u64, out_dir: &Path) -> Result<Vec<PathBuf>> {
    let n_values: &[f64] = &[1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0];
    let jpta_algs = [
        AlgorithmBlock::jpta(Variant::LineSearch),
        AlgorithmBlock::jpta(Variant::Wls),
    ];
    let with_heuristic = [
        jpta_algs[0].clone(),
        jpta_algs[1].clone(),
        AlgorithmBlock::Heuristic { verbatim: false },
    ];
    match figure {
        "fig4" | "fig9" | "fig11" => {
            let cases: Vec<(String, ExperimentConfig, String)> = match figure {
                "fig4" => vec![
                    ("b1".into(), preset(rainbow(), fast, seed), "jpta".into()),
                    ("b2".into(), preset(split(), fast, seed), "jpta".into()),
                ],
                "fig9" => {
                    let mut v = Vec::new();
                    for (tag, behavior, fc) in [("b1", rainbow(), 22), ("b2", split(), 2)] {
                        for (structure, n_rf) in [(StructureName::Fc, fc), (StructureName::Pc, 32)] {
                            let mut cfg = preset(behavior.clone(), fast, seed);
                            cfg.algorithm = AlgorithmBlock::hbf(structure, n_rf);
                            let name = format!("{}{n_rf}", if structure == StructureName::Fc { "fc" } else { "pc" });
                            v.push((tag.to_string(), cfg, name));
                        }
                    }
                    v
                }
                _ => vec![("b3".into(), preset(three_band(), fast, seed), "jpta".into())],
            };
            let mut files = Vec::new();
            let mut summary = Vec::new();
            for (tag, cfg, name) in cases {
                let cfg = with_id(cfg, &format!("{figure}_{tag}_{name}"));
                let ideal = if figure == "fig9" {
                    String::new()
                } else {
                    format!("{figure}_ideal_{tag}.csv")
                };
                let (f, report) =
                    gain_map_pair(&cfg, fast, out_dir, &ideal, &format!("{figure}_{name}_{tag}.csv"))?;
                files.extend(f);
                summary.push(SummaryRow {
                    figure: figure.into(),
                    case: tag,
                    algorithm: cfg.algorithm.label().into(),
                    f_obj: report.f_obj,
                });
            }
            let path = out_dir.join(format!("{figure}_summary.csv"));
            let echo = if fast {
                "warning: fast mode uses K=256 subcarriers instead of 2048"
            } else {
                ""
            };
            io::write_rows(&summary, "figure summary", echo, create(&path)?)?;
            files.push(path);
            Ok(files)
        }
        "fig5" => sweep_figure("fig5", fast, seed, out_dir, SweepParameter::N, [n_values, n_values], &with_heuristic),
        "fig6" => {
            let b1: Vec<f64> = (0..=16).map(|i| 4.0 * i as f64).collect();
            let b2: Vec<f64> = (0..=16).map(|i| 0.5 * i as f64).collect();
            sweep_figure("fig6", fast, seed, out_dir, SweepParameter::Kappa, [&b1, &b2], &with_heuristic)
        }
        "fig7" => {
            let iters: Vec<f64> = (1..=30).map(f64::from).collect();
            sweep_figure("fig7", fast, seed, out_dir, SweepParameter::MaxIter, [&iters, &iters], &jpta_algs)
        }
        "fig8" => {
            let n_rf = [1, 2, 3, 4, 6, 8, 12, 16, 20, 22, 24, 28, 32, 48, 64];
            let mut files = Vec::new();
            for (tag, behavior) in [("b1", rainbow()), ("b2", split())] {
                let cfg = with_id(preset(behavior, fast, seed), &format!("fig8_{tag}"));
                let rows = compare_hbf_records(&cfg, &n_rf)?;
                files.push(write_records(
                    &out_dir.join(format!("fig8_{tag}.csv")),
                    &rows,
                    &echo_for(&cfg, fast),
                )?);
            }
            Ok(files)
        }
        other => Err(config_error(format!(
            "unknown figure `{other}` (expected one of {})",
            FIGURES.join(", ")
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(behavior: Behavior) -> ExperimentConfig {
        let mut cfg = preset(behavior, true, 7);
        cfg.system.m = 8;
        cfg.system.n = 8;
        cfg.system.k = 32;
        cfg.system.kappa = 8.0;
        cfg.algorithm = AlgorithmBlock::Jpta {
            variant: Variant::LineSearch,
            max_iter: 3,
            grid: 256,
            discrete_set_file: None,
            nonnegative: true,
        };
        cfg.output.theta_step_deg = 5.0;
        cfg
    }

    #[test]
    fn theta_grid_spans_both_endfires() {
        let g = theta_grid(1.0);
        assert_eq!(g.len(), 181);
        assert!((g[0] + std::f64::consts::FRAC_PI_2).abs() < 1e-15);
        assert!((g[180] - std::f64::consts::FRAC_PI_2).abs() < 1e-15);
    }

    #[test]
    fn sweep_rows_sorted_and_pc_skips_non_divisors() {
        let mut cfg = small(rainbow());
        cfg.sweep = Some(super::super::config::SweepBlock {
            parameter: SweepParameter::NRf,
            values: vec![3.0, 1.0, 2.0],
            algorithms: Some(vec![
                AlgorithmBlock::hbf(StructureName::Fc, 1),
                AlgorithmBlock::hbf(StructureName::Pc, 1),
            ]),
        });
        let rows = sweep_records(&cfg).unwrap();
        let keys: Vec<(f64, &str)> = rows.iter().map(|r| (r.value, r.algorithm.as_str())).collect();
        assert_eq!(
            keys,
            vec![(1.0, "hbf_fc"), (1.0, "hbf_pc"), (2.0, "hbf_fc"), (2.0, "hbf_pc"), (3.0, "hbf_fc")]
        );
        assert!(rows.iter().all(|r| (0.0..=1.0 + 1e-12).contains(&r.f_obj)));
    }

    #[test]
    fn heuristic_needs_behavior_one_or_two() {
        let mut cfg = small(three_band());
        cfg.algorithm = AlgorithmBlock::Heuristic { verbatim: false };
        let sys = cfg.system_config().unwrap();
        let grid = SubcarrierGrid::new(&sys);
        let target = cfg.build_target(&sys, &grid).unwrap();
        let err = run_algorithm(&cfg, &sys, &grid, &target, &cfg.algorithm).unwrap_err();
        assert!(matches!(err, JptaError::InvalidConfig(_)));
    }

    #[test]
    fn unknown_figure_is_a_config_error() {
        let dir = std::env::temp_dir();
        assert!(matches!(
            reproduce("fig10", true, 0, &dir),
            Err(JptaError::InvalidConfig(_))
        ));
    }

    #[test]
    fn non_integer_counts_are_rejected() {
        let base = SystemConfig::new(8, 8, 100e9, 10e9, 8, 8.0).unwrap();
        assert!(sweep_point(&base, &AlgorithmBlock::default(), SweepParameter::N, 2.5).is_err());
        assert!(sweep_point(&base, &AlgorithmBlock::default(), SweepParameter::N, 4.0).unwrap().is_some());
    }

    #[test]
    fn hbf_design_scores_unit_norm_beams() {
        let mut cfg = small(split());
        cfg.algorithm = AlgorithmBlock::hbf(StructureName::Fc, 2);
        let sys = cfg.system_config().unwrap();
        let grid = SubcarrierGrid::new(&sys);
        let target = cfg.build_target(&sys, &grid).unwrap();
        let ev = run_algorithm(&cfg, &sys, &grid, &target, &cfg.algorithm).unwrap();
        assert!(ev.report.f_obj > 0.9, "{}", ev.report.f_obj);
        assert_eq!(ev.report.metadata["algorithm"], "hbf_fc");
    }
}
