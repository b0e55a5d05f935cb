//! Iterative JPTA design: alternating optimization of TTD delays,
//! phase-shifter phases and per-subcarrier digital phases.
//!
//! Each outer iteration
//!
//! 1. updates every TTD group independently given the digital phases, either
//!    by a grid line search on the exact group objective or by the
//!    closed-form weighted-least-squares fit of the unwrapped target phases,
//!    and sets the group's phase shifters to their conditional optimum;
//! 2. re-centers the delays in the allowed window, compensating the digital
//!    phases so the beams are unchanged;
//! 3. re-aligns each subcarrier's digital phase with its analog beam.
//!
//! The digital magnitudes are set once to the target norms, which is the
//! exact optimum of the power-matching term.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::array_model::{analog_beam, check_beamformer, SubcarrierGrid, SystemConfig};
use crate::error::{JptaError, Result};
use crate::metrics;
use crate::targets::BeamTarget;

/// Wraps an angle into `[-pi, pi)`.
pub fn wrap_phase(x: f64) -> f64 {
    let w = (x + PI).rem_euclid(2.0 * PI) - PI;
    // rem_euclid can round up to exactly 2*pi
    if w >= PI {
        w - 2.0 * PI
    } else {
        w
    }
}

/// Delays, phase-shifter phases and digital weights of one JPTA design.
///
/// Digital weights are kept in polar form so a zero-power subcarrier still
/// carries a well-defined phase.
#[derive(Debug, Clone, PartialEq)]
pub struct JptaBeamformer {
    delays: Vec<f64>,
    phases: Vec<f64>,
    magnitudes: Vec<f64>,
    digital_phases: Vec<f64>,
}

impl JptaBeamformer {
    pub fn new(delays: Vec<f64>, phases: Vec<f64>, alpha: Vec<Complex64>) -> Self {
        let magnitudes = alpha.iter().map(|a| a.norm()).collect();
        let digital_phases = alpha.iter().map(|a| a.arg()).collect();
        Self::from_parts(delays, phases, magnitudes, digital_phases)
    }

    pub fn from_parts(
        delays: Vec<f64>,
        phases: Vec<f64>,
        magnitudes: Vec<f64>,
        digital_phases: Vec<f64>,
    ) -> Self {
        Self {
            delays,
            phases: phases.into_iter().map(wrap_phase).collect(),
            magnitudes,
            digital_phases: digital_phases.into_iter().map(wrap_phase).collect(),
        }
    }

    /// TTD delays in seconds.
    pub fn delays(&self) -> &[f64] {
        &self.delays
    }

    /// Phase-shifter phases in `[-pi, pi)`.
    pub fn phases(&self) -> &[f64] {
        &self.phases
    }

    /// `|alpha_k|` in ascending subcarrier order.
    pub fn magnitudes(&self) -> &[f64] {
        &self.magnitudes
    }

    /// `angle(alpha_k)` in ascending subcarrier order.
    pub fn digital_phases(&self) -> &[f64] {
        &self.digital_phases
    }

    pub fn alpha(&self) -> Vec<Complex64> {
        self.magnitudes
            .iter()
            .zip(&self.digital_phases)
            .map(|(&r, &p)| Complex64::from_polar(r, p))
            .collect()
    }

    pub fn total_power(&self) -> f64 {
        self.magnitudes.iter().map(|r| r * r).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TtdUpdate {
    /// Grid search on the exact group objective with parabolic refinement.
    #[default]
    LineSearch,
    /// Closed-form weighted least squares on unwrapped phases.
    Wls,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PhaseInit {
    #[default]
    Zero,
    /// Digital phases drawn uniformly from `[-pi, pi)`.
    Random { seed: u64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct DesignOptions {
    pub ttd_update: TtdUpdate,
    pub max_iter: usize,
    /// Number of uniformly spaced delays probed by the line search.
    pub grid_size: usize,
    /// Realizable delays in seconds, sorted ascending, within `[0, kappa/W]`.
    pub discrete_delays: Option<Vec<f64>>,
    pub enforce_nonnegative: bool,
    /// Stop early once an iteration improves the analog objective by less.
    pub convergence_epsilon: Option<f64>,
    pub init: PhaseInit,
}

impl Default for DesignOptions {
    fn default() -> Self {
        Self {
            ttd_update: TtdUpdate::LineSearch,
            max_iter: 10,
            grid_size: 4096,
            discrete_delays: None,
            enforce_nonnegative: true,
            convergence_epsilon: None,
            init: PhaseInit::Zero,
        }
    }
}

impl DesignOptions {
    pub fn wls() -> Self {
        Self {
            ttd_update: TtdUpdate::Wls,
            ..Self::default()
        }
    }

    pub fn validate(&self, config: &SystemConfig) -> Result<()> {
        if self.max_iter == 0 {
            return Err(JptaError::InvalidOptions("max_iter must be positive".into()));
        }
        if self.grid_size < 3 {
            return Err(JptaError::InvalidOptions(format!(
                "line-search grid needs at least 3 points, got {}",
                self.grid_size
            )));
        }
        if let Some(set) = &self.discrete_delays {
            check_discrete_set(set, config)?;
        }
        Ok(())
    }
}

fn check_discrete_set(set: &[f64], config: &SystemConfig) -> Result<()> {
    if set.is_empty() {
        return Err(JptaError::InvalidOptions("discrete delay set is empty".into()));
    }
    if set.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(JptaError::InvalidOptions(
            "discrete delay set must be strictly increasing".into(),
        ));
    }
    let max = config.max_delay() * (1.0 + 1e-9);
    if set[0] < 0.0 || set[set.len() - 1] > max {
        return Err(JptaError::InvalidOptions(format!(
            "discrete delays must lie in [0, {:e}] s",
            config.max_delay()
        )));
    }
    Ok(())
}

/// Per-iteration record of the analog objective and the goodness of fit.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConvergenceTrace {
    pub analog_objective: Vec<f64>,
    pub fit: Vec<f64>,
}

impl ConvergenceTrace {
    pub fn iterations(&self) -> usize {
        self.analog_objective.len()
    }
}

/// Result of a closed-form phase update; `degenerate` marks an all-zero sum
/// whose angle is undefined (the phase is then 0).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseUpdate {
    pub phase: f64,
    pub degenerate: bool,
}

impl PhaseUpdate {
    fn from_sum(sum: Complex64, scale: f64) -> Self {
        if !(sum.norm() > 1e-13 * scale) {
            Self {
                phase: 0.0,
                degenerate: true,
            }
        } else {
            Self {
                phase: wrap_phase(sum.arg()),
                degenerate: false,
            }
        }
    }
}

/// Optimal digital magnitudes: `|alpha_k| = |b_k|`.
pub fn digital_power_allocation(target: &BeamTarget) -> Vec<f64> {
    target.norms().to_vec()
}

fn check_inputs(
    config: &SystemConfig,
    grid: &SubcarrierGrid,
    target: &BeamTarget,
    digital_phases: &[f64],
) -> Result<()> {
    target.check_against(config, grid)?;
    if digital_phases.len() != grid.len() {
        return Err(JptaError::DimensionMismatch {
            what: "digital phase count",
            expected: grid.len(),
            actual: digital_phases.len(),
        });
    }
    Ok(())
}

fn check_ttd(config: &SystemConfig, n: usize) -> Result<()> {
    if n >= config.num_ttds() {
        return Err(JptaError::DimensionMismatch {
            what: "TTD index bound",
            expected: config.num_ttds(),
            actual: n,
        });
    }
    Ok(())
}

/// Coefficients `w_k exp(j angle(alpha_k)) conj([bbar_k]_m)` for every
/// antenna of a group, laid out `[antenna][subcarrier]`.
fn group_coefficients(
    target: &BeamTarget,
    digital_phases: &[f64],
    group: &[usize],
) -> Vec<Vec<Complex64>> {
    let rot: Vec<Complex64> = digital_phases
        .iter()
        .zip(target.weights())
        .map(|(&p, &w)| Complex64::from_polar(w, p))
        .collect();
    group
        .iter()
        .map(|&m| {
            (0..rot.len())
                .map(|pos| rot[pos] * target.direction(pos)[m].conj())
                .collect()
        })
        .collect()
}

/// Group objective from precomputed coefficients. Only the baseband offsets
/// enter: the carrier term is a common phase that the magnitude removes.
fn coefficient_objective(coeffs: &[Vec<Complex64>], offsets: &[f64], tau: f64) -> f64 {
    let phasors: Vec<Complex64> = offsets
        .iter()
        .map(|&d| Complex64::from_polar(1.0, -2.0 * PI * d * tau))
        .collect();
    coeffs
        .iter()
        .map(|c| c.iter().zip(&phasors).map(|(c, p)| c * p).sum::<Complex64>().norm())
        .sum()
}

/// Objective of TTD `n` at delay `tau`:
/// `sum_{m in group n} | sum_k w_k e^{j angle(alpha_k)} conj([bbar_k]_m) e^{-j 2 pi f_k tau} |`.
pub fn ttd_objective(
    config: &SystemConfig,
    grid: &SubcarrierGrid,
    target: &BeamTarget,
    digital_phases: &[f64],
    n: usize,
    tau: f64,
) -> Result<f64> {
    check_inputs(config, grid, target, digital_phases)?;
    check_ttd(config, n)?;
    let coeffs = group_coefficients(target, digital_phases, config.mapping().group(n));
    Ok(coefficient_objective(&coeffs, grid.offsets(), tau))
}

/// The uniform line-search grid over `[-kappa/(2W), kappa/(2W)]`.
pub fn line_search_grid(config: &SystemConfig, grid_size: usize) -> Vec<f64> {
    let half = config.half_delay_range();
    let step = 2.0 * half / (grid_size - 1) as f64;
    (0..grid_size).map(|i| -half + i as f64 * step).collect()
}

/// Samples the group objective at every line-search grid point.
fn scan_grid(coeffs: &[Vec<Complex64>], offsets: &[f64], taus: &[f64]) -> Vec<f64> {
    // re-seed the phasor recurrence periodically to bound rounding drift
    const RESYNC: usize = 64;
    let step = if taus.len() > 1 { taus[1] - taus[0] } else { 0.0 };
    let steps: Vec<Complex64> = offsets
        .iter()
        .map(|&d| Complex64::from_polar(1.0, -2.0 * PI * d * step))
        .collect();
    let mut phasors = vec![Complex64::new(1.0, 0.0); offsets.len()];
    let mut values = Vec::with_capacity(taus.len());
    for (i, &tau) in taus.iter().enumerate() {
        if i % RESYNC == 0 {
            for (p, &d) in phasors.iter_mut().zip(offsets) {
                *p = Complex64::from_polar(1.0, -2.0 * PI * d * tau);
            }
        }
        let v: f64 = coeffs
            .iter()
            .map(|c| {
                c.iter()
                    .zip(&phasors)
                    .map(|(c, p)| c * p)
                    .sum::<Complex64>()
                    .norm()
            })
            .sum();
        values.push(v);
        for (p, s) in phasors.iter_mut().zip(&steps) {
            *p *= s;
        }
    }
    values
}

fn line_search_coefficients(
    coeffs: &[Vec<Complex64>],
    offsets: &[f64],
    taus: &[f64],
    incumbent: Option<f64>,
) -> f64 {
    const TIE: f64 = 1e-12;
    let values = scan_grid(coeffs, offsets, taus);
    let mut best = 0;
    for (i, &v) in values.iter().enumerate() {
        if v > values[best] + TIE {
            best = i;
        }
    }
    let mut tau = taus[best];
    let mut value = coefficient_objective(coeffs, offsets, tau);

    if best > 0 && best + 1 < taus.len() {
        let (y0, y1, y2) = (values[best - 1], values[best], values[best + 1]);
        let curvature = y0 - 2.0 * y1 + y2;
        if curvature < 0.0 {
            let h = taus[best + 1] - taus[best];
            let vertex = taus[best] + 0.5 * h * (y0 - y2) / curvature;
            let v = coefficient_objective(coeffs, offsets, vertex);
            if v > value + TIE {
                tau = vertex;
                value = v;
            }
        }
    }
    if let Some(t) = incumbent {
        let (lo, hi) = (taus[0], taus[taus.len() - 1]);
        if t >= lo && t <= hi {
            let v = coefficient_objective(coeffs, offsets, t);
            if v > value + TIE {
                tau = t;
            }
        }
    }
    tau
}

/// Line-search update of TTD `n` over `[-kappa/(2W), kappa/(2W)]`.
///
/// Returns the best grid point (smallest delay on ties), refined by a
/// parabola through it and its two neighbours when that improves the exact
/// objective. If `incumbent` lies in the window and is strictly better than
/// the refined grid optimum, it is kept instead.
pub fn ttd_update_line_search(
    config: &SystemConfig,
    grid: &SubcarrierGrid,
    target: &BeamTarget,
    digital_phases: &[f64],
    n: usize,
    grid_size: usize,
    incumbent: Option<f64>,
) -> Result<f64> {
    check_inputs(config, grid, target, digital_phases)?;
    check_ttd(config, n)?;
    if grid_size < 3 {
        return Err(JptaError::InvalidOptions("line-search grid needs at least 3 points".into()));
    }
    let coeffs = group_coefficients(target, digital_phases, config.mapping().group(n));
    let taus = line_search_grid(config, grid_size);
    Ok(line_search_coefficients(&coeffs, grid.offsets(), &taus, incumbent))
}

/// Adds multiples of `2 pi` so consecutive samples differ by at most `pi`.
/// The first sample is kept as is.
pub fn phase_unwrap(seq: &[f64]) -> Vec<f64> {
    let mut out: Vec<f64> = Vec::with_capacity(seq.len());
    let mut shift = 0.0f64;
    for (i, &x) in seq.iter().enumerate() {
        if i > 0 {
            let prev = out[i - 1];
            let mut y = x + shift;
            let d = y - prev;
            if d.abs() > PI {
                let turns = ((d + PI) / (2.0 * PI)).floor();
                shift -= turns * 2.0 * PI;
                y = x + shift;
                // boundary case |d| = pi after the shift, pull back inside
                if y - prev > PI {
                    shift -= 2.0 * PI;
                    y -= 2.0 * PI;
                } else if y - prev < -PI {
                    shift += 2.0 * PI;
                    y += 2.0 * PI;
                }
            }
            out.push(y);
        } else {
            out.push(x);
        }
    }
    out
}

/// Maps a delay onto the centered period `[-K/(2W), K/(2W))` and clamps it
/// to the search window `[-kappa/(2W), kappa/(2W)]`.
pub fn wrap_and_clamp_delay(config: &SystemConfig, tau: f64) -> f64 {
    let period = config.num_subcarriers() as f64 / config.bandwidth();
    let wrapped = (tau + period / 2.0).rem_euclid(period) - period / 2.0;
    let half = config.half_delay_range();
    wrapped.clamp(-half, half)
}

/// Closed-form weighted-least-squares update of TTD `n`.
///
/// For each antenna of the group the target phases, less the digital
/// phases, are unwrapped along the band. The fit
/// `min_{tau, phi} sum_m sum_k w_{mk} (2 pi f_k tau - phi_m + c_{mk})^2`
/// with `w_{mk} = w_k |[bbar_k]_m|` is solved by eliminating each `phi_m` as
/// a weighted mean and solving the remaining scalar normal equation for
/// `tau`, which is then wrapped and clamped.
pub fn ttd_update_wls(
    config: &SystemConfig,
    grid: &SubcarrierGrid,
    target: &BeamTarget,
    digital_phases: &[f64],
    n: usize,
) -> Result<f64> {
    check_inputs(config, grid, target, digital_phases)?;
    check_ttd(config, n)?;
    let tau = wls_delay(grid, target, digital_phases, config.mapping().group(n))
        .ok_or_else(|| JptaError::DegenerateTarget(format!("TTD group {n} has zero total weight")))?;
    Ok(wrap_and_clamp_delay(config, tau))
}

fn wls_delay(
    grid: &SubcarrierGrid,
    target: &BeamTarget,
    digital_phases: &[f64],
    group: &[usize],
) -> Option<f64> {
    let mut num = 0.0;
    let mut den = 0.0;
    let mut total_weight = 0.0;
    let mut freqs = Vec::new();
    let mut weights = Vec::new();
    let mut phases = Vec::new();
    for &m in group {
        freqs.clear();
        weights.clear();
        phases.clear();
        for pos in 0..grid.len() {
            let b = target.direction(pos)[m];
            let w = target.weight(pos) * b.norm();
            if w > 0.0 {
                freqs.push(grid.offset(pos));
                weights.push(w);
                phases.push(b.arg() - digital_phases[pos]);
            }
        }
        if weights.is_empty() {
            continue;
        }
        let unwrapped = phase_unwrap(&phases);
        let wsum: f64 = weights.iter().sum();
        total_weight += wsum;
        let f_mean = weights.iter().zip(&freqs).map(|(w, f)| w * f).sum::<f64>() / wsum;
        let c_mean = weights.iter().zip(&unwrapped).map(|(w, c)| w * c).sum::<f64>() / wsum;
        for ((w, f), c) in weights.iter().zip(&freqs).zip(&unwrapped) {
            let df = f - f_mean;
            num += w * df * (c - c_mean);
            den += w * df * df;
        }
    }
    if total_weight == 0.0 {
        return None;
    }
    if den == 0.0 {
        // a single usable subcarrier: every delay fits equally well
        return Some(0.0);
    }
    Some(-num / (2.0 * PI * den))
}

/// Optimal phase of antenna `m` given its group delay:
/// `angle( sum_k w_k e^{-j angle(alpha_k)} [bbar_k]_m e^{j 2 pi f_k tau} )`.
pub fn ps_update(
    config: &SystemConfig,
    grid: &SubcarrierGrid,
    target: &BeamTarget,
    digital_phases: &[f64],
    m: usize,
    tau: f64,
) -> Result<PhaseUpdate> {
    check_inputs(config, grid, target, digital_phases)?;
    if m >= config.num_antennas() {
        return Err(JptaError::DimensionMismatch {
            what: "antenna index bound",
            expected: config.num_antennas(),
            actual: m,
        });
    }
    Ok(phase_for_antenna(grid, target, digital_phases, m, tau))
}

fn phase_for_antenna(
    grid: &SubcarrierGrid,
    target: &BeamTarget,
    digital_phases: &[f64],
    m: usize,
    tau: f64,
) -> PhaseUpdate {
    let mut sum = Complex64::new(0.0, 0.0);
    let mut scale = 0.0;
    for pos in 0..grid.len() {
        let w = target.weight(pos);
        if w == 0.0 {
            continue;
        }
        let b = target.direction(pos)[m];
        scale += w * b.norm();
        let phase = grid.delay_phase(pos, tau) - digital_phases[pos];
        sum += w * b * Complex64::from_polar(1.0, phase);
    }
    PhaseUpdate::from_sum(sum, scale)
}

/// Optimal digital phase of subcarrier `k`:
/// `angle( sum_m [bbar_k]_m e^{-j phi_m} e^{j 2 pi f_k tau_{n(m)}} )`.
pub fn digital_phase_update(
    config: &SystemConfig,
    grid: &SubcarrierGrid,
    target: &BeamTarget,
    bf: &JptaBeamformer,
    k: i64,
) -> Result<PhaseUpdate> {
    target.check_against(config, grid)?;
    check_beamformer(config, bf)?;
    let pos = grid.position(k)?;
    Ok(digital_phase_at(config, grid, target, bf.delays(), bf.phases(), pos))
}

fn digital_phase_at(
    config: &SystemConfig,
    grid: &SubcarrierGrid,
    target: &BeamTarget,
    delays: &[f64],
    phases: &[f64],
    pos: usize,
) -> PhaseUpdate {
    let w = analog_beam(config, grid, delays, phases, pos);
    let b = target.direction(pos);
    let sum: Complex64 = w.iter().zip(b).map(|(w, b)| w.conj() * b).sum();
    let scale = b.iter().map(|z| z.norm()).sum::<f64>() / (config.num_antennas() as f64).sqrt();
    PhaseUpdate::from_sum(sum, scale)
}

/// Offset that moves the delays towards the middle of
/// `[-kappa/(2W), kappa/(2W)]`, and the shifted delays.
///
/// The offset is the mean delay, limited so that the shifted delays stay in
/// the window whenever their spread allows it. Callers must subtract
/// `2 pi f_k * offset` from every digital phase to keep the beams unchanged
/// (see [`compensate_delay_shift`]).
pub fn center_delays(delays: &[f64], half_range: f64) -> (Vec<f64>, f64) {
    if delays.is_empty() {
        return (Vec::new(), 0.0);
    }
    let min = delays.iter().copied().fold(f64::INFINITY, f64::min);
    let max = delays.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mean = delays.iter().sum::<f64>() / delays.len() as f64;
    let offset = mean.min(half_range + min).max(max - half_range);
    (delays.iter().map(|t| t - offset).collect(), offset)
}

/// `angle(alpha_k) <- angle(alpha_k) - 2 pi f_k * offset`.
pub fn compensate_delay_shift(digital_phases: &mut [f64], grid: &SubcarrierGrid, offset: f64) {
    for (pos, p) in digital_phases.iter_mut().enumerate() {
        *p = wrap_phase(*p - grid.delay_phase(pos, offset));
    }
}

/// Shifts all delays so the smallest is zero, compensating digital phases.
pub fn shift_nonnegative(bf: &JptaBeamformer, grid: &SubcarrierGrid) -> JptaBeamformer {
    let min = bf.delays.iter().copied().fold(f64::INFINITY, f64::min);
    if min == 0.0 || !min.is_finite() {
        return bf.clone();
    }
    let mut out = bf.clone();
    for t in &mut out.delays {
        *t -= min;
    }
    compensate_delay_shift(&mut out.digital_phases, grid, min);
    out
}

/// Index of the set element nearest to `tau`; the smaller one wins ties.
fn nearest(set: &[f64], tau: f64) -> f64 {
    let i = set.partition_point(|&s| s < tau);
    if i == 0 {
        return set[0];
    }
    if i == set.len() {
        return set[set.len() - 1];
    }
    let (lo, hi) = (set[i - 1], set[i]);
    if hi - tau < tau - lo {
        hi
    } else {
        lo
    }
}

/// Rounds every delay to the nearest realizable value, then re-optimizes
/// the phase shifters for the rounded delays and realigns the digital phases.
pub fn quantize_delays(
    config: &SystemConfig,
    grid: &SubcarrierGrid,
    target: &BeamTarget,
    bf: &JptaBeamformer,
    discrete_set: &[f64],
) -> Result<JptaBeamformer> {
    check_discrete_set(discrete_set, config)?;
    target.check_against(config, grid)?;
    check_beamformer(config, bf)?;
    let delays: Vec<f64> = bf.delays.iter().map(|&t| nearest(discrete_set, t)).collect();
    let mapping = config.mapping();
    let phases: Vec<f64> = (0..config.num_antennas())
        .map(|m| phase_for_antenna(grid, target, &bf.digital_phases, m, delays[mapping.ttd_of(m)]).phase)
        .collect();
    let digital_phases = (0..grid.len())
        .into_par_iter()
        .map(|pos| digital_phase_at(config, grid, target, &delays, &phases, pos).phase)
        .collect();
    Ok(JptaBeamformer::from_parts(
        delays,
        phases,
        bf.magnitudes.clone(),
        digital_phases,
    ))
}

/// Runs the alternating optimization and returns the design with its
/// per-iteration trace.
pub fn design_jpta(
    config: &SystemConfig,
    grid: &SubcarrierGrid,
    target: &BeamTarget,
    options: &DesignOptions,
) -> Result<(JptaBeamformer, ConvergenceTrace)> {
    options.validate(config)?;
    target.check_against(config, grid)?;

    let mapping = config.mapping();
    let num_ttds = config.num_ttds();
    let half = config.half_delay_range();
    let search_grid = line_search_grid(config, options.grid_size);

    let mut digital_phases: Vec<f64> = match options.init {
        PhaseInit::Zero => vec![0.0; grid.len()],
        PhaseInit::Random { seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..grid.len()).map(|_| rng.random_range(-PI..PI)).collect()
        }
    };
    let mut delays = vec![0.0; num_ttds];
    let mut phases = vec![0.0; config.num_antennas()];
    let mut trace = ConvergenceTrace::default();

    for iter in 0..options.max_iter {
        let updates: Vec<(f64, Vec<f64>)> = (0..num_ttds)
            .into_par_iter()
            .map(|n| {
                let group = mapping.group(n);
                let tau = match options.ttd_update {
                    TtdUpdate::LineSearch => {
                        let coeffs = group_coefficients(target, &digital_phases, group);
                        let incumbent = (iter > 0).then_some(delays[n]);
                        line_search_coefficients(&coeffs, grid.offsets(), &search_grid, incumbent)
                    }
                    TtdUpdate::Wls => {
                        let tau = wls_delay(grid, target, &digital_phases, group).ok_or_else(|| {
                            JptaError::DegenerateTarget(format!("TTD group {n} has zero total weight"))
                        })?;
                        wrap_and_clamp_delay(config, tau)
                    }
                };
                let group_phases = group
                    .iter()
                    .map(|&m| phase_for_antenna(grid, target, &digital_phases, m, tau).phase)
                    .collect();
                Ok((tau, group_phases))
            })
            .collect::<Result<_>>()?;
        for (n, (tau, group_phases)) in updates.into_iter().enumerate() {
            delays[n] = tau;
            for (&m, phi) in mapping.group(n).iter().zip(group_phases) {
                phases[m] = phi;
            }
        }

        let (centered, offset) = center_delays(&delays, half);
        delays = centered;
        compensate_delay_shift(&mut digital_phases, grid, offset);

        digital_phases = (0..grid.len())
            .into_par_iter()
            .map(|pos| digital_phase_at(config, grid, target, &delays, &phases, pos).phase)
            .collect();

        let objective =
            metrics::analog_objective_raw(config, grid, target, &delays, &phases, &digital_phases);
        let fit = metrics::fit_from_raw(config, grid, target, &delays, &phases);
        let improvement = trace
            .analog_objective
            .last()
            .map(|prev| objective - prev);
        trace.analog_objective.push(objective);
        trace.fit.push(fit);
        if let (Some(eps), Some(gain)) = (options.convergence_epsilon, improvement) {
            if gain < eps {
                break;
            }
        }
    }

    let mut bf = JptaBeamformer::from_parts(
        delays,
        phases,
        digital_power_allocation(target),
        digital_phases,
    );
    if options.enforce_nonnegative || options.discrete_delays.is_some() {
        bf = shift_nonnegative(&bf, grid);
    }
    if let Some(set) = &options.discrete_delays {
        bf = quantize_delays(config, grid, target, &bf, set)?;
    }
    Ok((bf, trace))
}
