//! JSON experiment configuration.
//!
//! Physical quantities use engineering units at this boundary (GHz, degrees)
//! and are converted to SI/radians when the library types are built.
//!
//! ```json
//! {
//!   "id": "rainbow",
//!   "system": { "m": 64, "n": 64, "f0_ghz": 100, "w_ghz": 10, "k": 256, "kappa": 64 },
//!   "target": { "behavior": "one", "theta0_deg": 30, "delta_theta_deg": 45 },
//!   "algorithm": { "kind": "jpta", "variant": "line_search", "max_iter": 10 },
//!   "output": { "directory": "out" }
//! }
//! ```

use std::fs;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::array_model::{SteeringAngle, SubcarrierGrid, SystemConfig};
use crate::design::{DesignOptions, TtdUpdate};
use crate::error::{JptaError, Result};
use crate::hbf::{HbfOptions, HbfStructure};
use crate::targets::{
    behavior1_target, behavior2_target, custom_target, equal_band_starts, multi_angle_target,
    BeamTarget, WeightScheme,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default = "default_id")]
    pub id: String,
    #[serde(default)]
    pub system: SystemBlock,
    pub target: TargetBlock,
    #[serde(default)]
    pub algorithm: AlgorithmBlock,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepBlock>,
    #[serde(default)]
    pub output: OutputBlock,
    #[serde(default)]
    pub seed: u64,
}

fn default_id() -> String {
    "experiment".into()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemBlock {
    pub m: usize,
    pub n: usize,
    pub f0_ghz: f64,
    pub w_ghz: f64,
    pub k: usize,
    pub kappa: f64,
    /// Total power budget; defaults to `K`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_sum: Option<f64>,
}

impl Default for SystemBlock {
    fn default() -> Self {
        Self {
            m: 64,
            n: 64,
            f0_ghz: 100.0,
            w_ghz: 10.0,
            k: 2048,
            kappa: 64.0,
            p_sum: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightName {
    #[default]
    Uniform,
    Power,
    Saturating,
}

impl From<WeightName> for WeightScheme {
    fn from(w: WeightName) -> Self {
        match w {
            WeightName::Uniform => WeightScheme::Uniform,
            WeightName::Power => WeightScheme::Power,
            WeightName::Saturating => WeightScheme::Saturating,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BehaviorId {
    One,
    Two,
    Multi,
    Custom,
}

/// Target block as written in the file: a behavior id plus the fields that
/// behavior needs. Kept flat so parse errors point at the exact field.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TargetBlock {
    pub behavior: BehaviorId,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta0_deg: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta_theta_deg: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta1_deg: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta2_deg: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub angles_deg: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub band_starts: Option<Vec<i64>>,
    /// Relative paths resolve against the config file's directory.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub file: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "is_false")]
    pub rescale: bool,
    #[serde(default)]
    pub weights: WeightName,
}

fn is_false(b: &bool) -> bool {
    !*b
}

/// Target behavior with its parameters (degrees).
#[derive(Debug, Clone, PartialEq)]
pub enum Behavior {
    /// Rainbow sweep across the band.
    One { theta0_deg: f64, delta_theta_deg: f64 },
    /// Lower half band to `theta1`, upper half to `theta2`.
    Two { theta1_deg: f64, theta2_deg: f64 },
    /// Piecewise-constant steering; equal bands unless `band_starts` is set.
    Multi {
        angles_deg: Vec<f64>,
        band_starts: Option<Vec<i64>>,
    },
    /// Beams read from a text file.
    Custom { file: PathBuf, rescale: bool },
}

impl TargetBlock {
    pub fn new(behavior: Behavior, weights: WeightName) -> Self {
        let mut t = Self {
            behavior: BehaviorId::One,
            theta0_deg: None,
            delta_theta_deg: None,
            theta1_deg: None,
            theta2_deg: None,
            angles_deg: None,
            band_starts: None,
            file: None,
            rescale: false,
            weights,
        };
        match behavior {
            Behavior::One {
                theta0_deg,
                delta_theta_deg,
            } => {
                t.theta0_deg = Some(theta0_deg);
                t.delta_theta_deg = Some(delta_theta_deg);
            }
            Behavior::Two {
                theta1_deg,
                theta2_deg,
            } => {
                t.behavior = BehaviorId::Two;
                t.theta1_deg = Some(theta1_deg);
                t.theta2_deg = Some(theta2_deg);
            }
            Behavior::Multi {
                angles_deg,
                band_starts,
            } => {
                t.behavior = BehaviorId::Multi;
                t.angles_deg = Some(angles_deg);
                t.band_starts = band_starts;
            }
            Behavior::Custom { file, rescale } => {
                t.behavior = BehaviorId::Custom;
                t.file = Some(file);
                t.rescale = rescale;
            }
        }
        t
    }

    /// Checks that exactly the fields of the chosen behavior are present.
    pub fn behavior(&self) -> Result<Behavior> {
        fn need<T: Clone>(v: &Option<T>, name: &str, id: BehaviorId) -> Result<T> {
            v.clone().ok_or_else(|| {
                config_error(format!("target.{name} is required for behavior {id:?}"))
            })
        }
        let id = self.behavior;
        let present = [
            ("theta0_deg", self.theta0_deg.is_some()),
            ("delta_theta_deg", self.delta_theta_deg.is_some()),
            ("theta1_deg", self.theta1_deg.is_some()),
            ("theta2_deg", self.theta2_deg.is_some()),
            ("angles_deg", self.angles_deg.is_some()),
            ("band_starts", self.band_starts.is_some()),
            ("file", self.file.is_some()),
            ("rescale", self.rescale),
        ];
        let allowed: &[&str] = match id {
            BehaviorId::One => &["theta0_deg", "delta_theta_deg"],
            BehaviorId::Two => &["theta1_deg", "theta2_deg"],
            BehaviorId::Multi => &["angles_deg", "band_starts"],
            BehaviorId::Custom => &["file", "rescale"],
        };
        if let Some((name, _)) = present.iter().find(|(n, p)| *p && !allowed.contains(n)) {
            return Err(config_error(format!(
                "target.{name} does not apply to behavior {id:?}"
            )));
        }
        Ok(match id {
            BehaviorId::One => Behavior::One {
                theta0_deg: need(&self.theta0_deg, "theta0_deg", id)?,
                delta_theta_deg: need(&self.delta_theta_deg, "delta_theta_deg", id)?,
            },
            BehaviorId::Two => Behavior::Two {
                theta1_deg: need(&self.theta1_deg, "theta1_deg", id)?,
                theta2_deg: need(&self.theta2_deg, "theta2_deg", id)?,
            },
            BehaviorId::Multi => Behavior::Multi {
                angles_deg: need(&self.angles_deg, "angles_deg", id)?,
                band_starts: self.band_starts.clone(),
            },
            BehaviorId::Custom => Behavior::Custom {
                file: need(&self.file, "file", id)?,
                rescale: self.rescale,
            },
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    #[default]
    LineSearch,
    Wls,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StructureName {
    #[default]
    Fc,
    Pc,
}

impl From<StructureName> for HbfStructure {
    fn from(s: StructureName) -> Self {
        match s {
            StructureName::Fc => HbfStructure::FullyConnected,
            StructureName::Pc => HbfStructure::PartiallyConnected,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum AlgorithmBlock {
    Jpta {
        #[serde(default)]
        variant: Variant,
        #[serde(default = "default_max_iter")]
        max_iter: usize,
        #[serde(default = "default_grid")]
        grid: usize,
        /// One delay per line, in nanoseconds.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        discrete_set_file: Option<PathBuf>,
        #[serde(default = "yes")]
        nonnegative: bool,
    },
    Heuristic {
        #[serde(default)]
        verbatim: bool,
    },
    Hbf {
        #[serde(default)]
        structure: StructureName,
        n_rf: usize,
        #[serde(default = "default_hbf_iters")]
        iters: usize,
        #[serde(default = "default_restarts")]
        restarts: usize,
        /// Overrides the experiment seed.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        seed: Option<u64>,
    },
}

fn default_max_iter() -> usize {
    10
}
fn default_grid() -> usize {
    4096
}
fn default_hbf_iters() -> usize {
    50
}
fn default_restarts() -> usize {
    5
}
fn yes() -> bool {
    true
}

impl Default for AlgorithmBlock {
    fn default() -> Self {
        Self::jpta(Variant::LineSearch)
    }
}

impl AlgorithmBlock {
    pub fn label(&self) -> &'static str {
        match self {
            Self::Jpta {
                variant: Variant::LineSearch,
                ..
            } => "jpta_line_search",
            Self::Jpta {
                variant: Variant::Wls,
                ..
            } => "jpta_wls",
            Self::Heuristic { .. } => "heuristic",
            Self::Hbf {
                structure: StructureName::Fc,
                ..
            } => "hbf_fc",
            Self::Hbf {
                structure: StructureName::Pc,
                ..
            } => "hbf_pc",
        }
    }

    pub fn hbf(structure: StructureName, n_rf: usize) -> Self {
        Self::Hbf {
            structure,
            n_rf,
            iters: default_hbf_iters(),
            restarts: default_restarts(),
            seed: None,
        }
    }

    pub fn jpta(variant: Variant) -> Self {
        Self::Jpta {
            variant,
            max_iter: default_max_iter(),
            grid: default_grid(),
            discrete_set_file: None,
            nonnegative: true,
        }
    }

    /// Design options for the JPTA variants; `None` for the other kinds.
    pub fn design_options(&self) -> Result<Option<DesignOptions>> {
        let Self::Jpta {
            variant,
            max_iter,
            grid,
            discrete_set_file,
            nonnegative,
        } = self
        else {
            return Ok(None);
        };
        let discrete_delays = match discrete_set_file {
            Some(path) => Some(read_delay_set(path)?),
            None => None,
        };
        Ok(Some(DesignOptions {
            ttd_update: match variant {
                Variant::LineSearch => TtdUpdate::LineSearch,
                Variant::Wls => TtdUpdate::Wls,
            },
            max_iter: *max_iter,
            grid_size: *grid,
            discrete_delays,
            enforce_nonnegative: *nonnegative,
            ..DesignOptions::default()
        }))
    }

    pub fn hbf_options(&self, experiment_seed: u64) -> Option<(HbfStructure, usize, HbfOptions)> {
        match *self {
            Self::Hbf {
                structure,
                n_rf,
                iters,
                restarts,
                seed,
            } => Some((
                structure.into(),
                n_rf,
                HbfOptions {
                    max_iter: iters,
                    restarts,
                    seed: seed.unwrap_or(experiment_seed),
                    ..HbfOptions::default()
                },
            )),
            _ => None,
        }
    }
}

/// Reads delays (ns), one per line, `#` comments allowed; returns seconds.
pub fn read_delay_set(path: &Path) -> Result<Vec<f64>> {
    let text = fs::read_to_string(path)?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let v: f64 = line.parse().map_err(|_| JptaError::Parse {
            line: i + 1,
            message: format!("`{line}` is not a delay in ns"),
        })?;
        out.push(v * 1e-9);
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParameter {
    /// Number of TTDs.
    N,
    Kappa,
    MaxIter,
    NRf,
    K,
}

impl SweepParameter {
    pub fn name(&self) -> &'static str {
        match self {
            Self::N => "n",
            Self::Kappa => "kappa",
            Self::MaxIter => "max_iter",
            Self::NRf => "n_rf",
            Self::K => "k",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepBlock {
    pub parameter: SweepParameter,
    pub values: Vec<f64>,
    /// Algorithms compared at every point; defaults to the run's algorithm.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub algorithms: Option<Vec<AlgorithmBlock>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputBlock {
    #[serde(default = "default_out_dir")]
    pub directory: PathBuf,
    #[serde(default = "yes")]
    pub gain_map: bool,
    #[serde(default = "default_theta_step")]
    pub theta_step_deg: f64,
    /// Wall-clock times make outputs non-reproducible, so they are off by
    /// default.
    #[serde(default)]
    pub record_timing: bool,
}

fn default_out_dir() -> PathBuf {
    PathBuf::from("out")
}
fn default_theta_step() -> f64 {
    1.0
}

impl Default for OutputBlock {
    fn default() -> Self {
        Self {
            directory: default_out_dir(),
            gain_map: true,
            theta_step_deg: default_theta_step(),
            record_timing: false,
        }
    }
}

fn resolve(base: &Path, p: &Path) -> PathBuf {
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}

fn config_error(msg: impl Into<String>) -> JptaError {
    JptaError::InvalidConfig(msg.into())
}

fn angle(deg: f64, field: &'static str) -> Result<f64> {
    if !deg.is_finite() {
        return Err(config_error(format!("{field}: angle must be finite")));
    }
    Ok(SteeringAngle::checked(deg.to_radians(), field)?.radians())
}

impl ExperimentConfig {
    /// Parses JSON text; errors name the offending field and its position.
    pub fn from_json_str(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let cfg: Self = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            config_error(format!("{path}: {}", e.inner()))
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Reads a config file; relative file references inside it are made
    /// absolute against the file's directory.
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| config_error(format!("cannot read {}: {e}", path.display())))?;
        let mut cfg = Self::from_json_str(&text)?;
        let base = path.parent().unwrap_or(Path::new("."));
        cfg.resolve_paths(base);
        Ok(cfg)
    }

    pub fn resolve_paths(&mut self, base: &Path) {
        if let Some(file) = &mut self.target.file {
            *file = resolve(base, file);
        }
        let fix = |alg: &mut AlgorithmBlock| {
            if let AlgorithmBlock::Jpta {
                discrete_set_file: Some(f),
                ..
            } = alg
            {
                *f = resolve(base, f);
            }
        };
        fix(&mut self.algorithm);
        if let Some(algs) = self.sweep.as_mut().and_then(|s| s.algorithms.as_mut()) {
            algs.iter_mut().for_each(fix);
        }
    }

    pub fn validate(&self) -> Result<()> {
        let s = &self.system;
        let positive = |v: f64, name: &str| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(config_error(format!("system.{name} must be positive, got {v}")))
            }
        };
        if s.m == 0 || s.n == 0 || s.k == 0 {
            return Err(config_error("system.m, system.n and system.k must be positive"));
        }
        positive(s.f0_ghz, "f0_ghz")?;
        positive(s.w_ghz, "w_ghz")?;
        if !(s.kappa.is_finite() && s.kappa >= 0.0) {
            return Err(config_error(format!("system.kappa must be nonnegative, got {}", s.kappa)));
        }
        if let Some(p) = s.p_sum {
            positive(p, "p_sum")?;
        }
        self.target_angles()?;
        self.system_config()?;
        if let Some(sweep) = &self.sweep {
            if sweep.values.is_empty() {
                return Err(config_error("sweep.values must not be empty"));
            }
            if sweep.values.iter().any(|v| !v.is_finite() || *v < 0.0) {
                return Err(config_error("sweep.values must be finite and nonnegative"));
            }
        }
        if !(self.output.theta_step_deg.is_finite() && self.output.theta_step_deg > 0.0) {
            return Err(config_error("output.theta_step_deg must be positive"));
        }
        Ok(())
    }

    fn target_angles(&self) -> Result<Vec<f64>> {
        match &self.target.behavior()? {
            Behavior::One {
                theta0_deg,
                delta_theta_deg,
            } => {
                let t0 = angle(*theta0_deg, "target.theta0_deg")?;
                let d = delta_theta_deg.to_radians();
                if !d.is_finite() || d < 0.0 {
                    return Err(config_error("target.delta_theta_deg must be nonnegative"));
                }
                SteeringAngle::checked(t0 - d / 2.0, "target.theta0_deg - delta_theta_deg/2")?;
                SteeringAngle::checked(t0 + d / 2.0, "target.theta0_deg + delta_theta_deg/2")?;
                Ok(vec![t0, d])
            }
            Behavior::Two {
                theta1_deg,
                theta2_deg,
            } => Ok(vec![
                angle(*theta1_deg, "target.theta1_deg")?,
                angle(*theta2_deg, "target.theta2_deg")?,
            ]),
            Behavior::Multi { angles_deg, .. } => {
                if angles_deg.is_empty() {
                    return Err(config_error("target.angles_deg must not be empty"));
                }
                angles_deg
                    .iter()
                    .map(|&a| angle(a, "target.angles_deg"))
                    .collect()
            }
            Behavior::Custom { .. } => Ok(Vec::new()),
        }
    }

    pub fn system_config(&self) -> Result<SystemConfig> {
        let s = &self.system;
        let cfg = SystemConfig::new(s.m, s.n, s.f0_ghz * 1e9, s.w_ghz * 1e9, s.k, s.kappa)?;
        match s.p_sum {
            Some(p) => cfg.with_total_power(p),
            None => Ok(cfg),
        }
    }

    /// Builds the target for an arbitrary (possibly swept) system.
    pub fn build_target(&self, config: &SystemConfig, grid: &SubcarrierGrid) -> Result<BeamTarget> {
        let scheme = self.target.weights.into();
        let a = self.target_angles()?;
        match self.target.behavior()? {
            Behavior::One { .. } => behavior1_target(config, grid, a[0], a[1], scheme),
            Behavior::Two { .. } => behavior2_target(config, grid, a[0], a[1], scheme),
            Behavior::Multi { band_starts, .. } => {
                let starts = band_starts
                    .unwrap_or_else(|| equal_band_starts(grid, a.len()));
                multi_angle_target(config, grid, &starts, &a, scheme)
            }
            Behavior::Custom { file, rescale } => {
                let f = fs::File::open(&file)
                    .map_err(|e| config_error(format!("cannot open {}: {e}", file.display())))?;
                custom_target(config, grid, BufReader::new(f), scheme, rescale)
            }
        }
    }

    /// Rainbow parameters `(theta0, delta_theta)` in radians, if behavior 1.
    pub fn behavior1_angles(&self) -> Option<(f64, f64)> {
        match self.target.behavior {
            BehaviorId::One => self.target_angles().ok().map(|a| (a[0], a[1])),
            _ => None,
        }
    }

    /// Split-band angles `(theta1, theta2)` in radians, if behavior 2.
    pub fn behavior2_angles(&self) -> Option<(f64, f64)> {
        match self.target.behavior {
            BehaviorId::Two => self.target_angles().ok().map(|a| (a[0], a[1])),
            _ => None,
        }
    }

    /// Single-line JSON of the resolved configuration, echoed into outputs.
    pub fn echo(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }
}
