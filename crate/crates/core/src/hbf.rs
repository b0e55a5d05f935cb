//! Conventional hybrid beamforming baselines: a fully-connected (FC) and a
//! partially-connected (PC) analog network followed by a per-subcarrier
//! digital precoder, both fitted to the stacked target `B ≈ F_RF F_BB`.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::array_model::{SubcarrierGrid, SystemConfig};
use crate::error::{JptaError, Result};
use crate::targets::BeamTarget;

type CMatrix = DMatrix<Complex64>;

const SVD_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum HbfStructure {
    FullyConnected,
    PartiallyConnected,
}

impl HbfStructure {
    pub fn name(&self) -> &'static str {
        match self {
            Self::FullyConnected => "fc",
            Self::PartiallyConnected => "pc",
        }
    }
}

/// Target beams stacked column-wise (ascending subcarrier index).
#[derive(Debug, Clone, PartialEq)]
pub struct TargetMatrix {
    b: CMatrix,
    power_budget: f64,
}

impl TargetMatrix {
    pub fn matrix(&self) -> &CMatrix {
        &self.b
    }

    pub fn power_budget(&self) -> f64 {
        self.power_budget
    }

    pub fn num_antennas(&self) -> usize {
        self.b.nrows()
    }

    pub fn num_subcarriers(&self) -> usize {
        self.b.ncols()
    }
}

pub fn stack_target(target: &BeamTarget) -> TargetMatrix {
    let m = target.num_antennas();
    let k = target.num_subcarriers();
    TargetMatrix {
        b: CMatrix::from_fn(m, k, |i, j| target.vector(j)[i]),
        power_budget: target.power_budget(),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HbfBeamformer {
    analog: CMatrix,
    digital: CMatrix,
    structure: HbfStructure,
    /// Residual `||B - F_RF F_BB||_F` per alternation, starting with the
    /// initial point.
    residual_trace: Vec<f64>,
    /// Residual of the returned (pre-normalization) factorization.
    residual: f64,
    seed: u64,
}

impl HbfBeamformer {
    /// Wraps stored factors; the structure mask and unit moduli are checked
    /// to `1e-9`.
    pub fn from_parts(analog: CMatrix, digital: CMatrix, structure: HbfStructure) -> Result<Self> {
        let (m, n_rf) = analog.shape();
        if digital.nrows() != n_rf {
            return Err(JptaError::DimensionMismatch {
                what: "digital rows",
                expected: n_rf,
                actual: digital.nrows(),
            });
        }
        if n_rf == 0 || (structure == HbfStructure::PartiallyConnected && m % n_rf != 0) {
            return Err(JptaError::InvalidRfChains(format!(
                "{n_rf} RF chains for {m} antennas"
            )));
        }
        let masked = project_mask(&analog, structure);
        if (&masked - &analog).norm() > 1e-9 * (m * n_rf) as f64 {
            return Err(JptaError::InvalidOptions(
                "analog matrix violates the structure's unit-modulus mask".into(),
            ));
        }
        let residual = f64::NAN;
        Ok(Self {
            analog,
            digital,
            structure,
            residual_trace: Vec::new(),
            residual,
            seed: 0,
        })
    }

    pub fn analog(&self) -> &CMatrix {
        &self.analog
    }

    pub fn digital(&self) -> &CMatrix {
        &self.digital
    }

    pub fn structure(&self) -> HbfStructure {
        self.structure
    }

    pub fn rf_chains(&self) -> usize {
        self.analog.ncols()
    }

    pub fn residual_trace(&self) -> &[f64] {
        &self.residual_trace
    }

    pub fn residual(&self) -> f64 {
        self.residual
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn product(&self) -> CMatrix {
        &self.analog * &self.digital
    }

    pub fn total_power(&self) -> f64 {
        self.product().norm_squared()
    }

    /// Per-subcarrier effective beams `F_RF f_BB,k`, scaled to unit norm.
    /// A vanishing column stays zero.
    pub fn normalized_beams(&self) -> Vec<Vec<Complex64>> {
        let p = self.product();
        p.column_iter()
            .map(|c| {
                let n = c.norm();
                if n > 0.0 {
                    c.iter().map(|z| z / n).collect()
                } else {
                    vec![Complex64::new(0.0, 0.0); c.len()]
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HbfOptions {
    pub max_iter: usize,
    /// Stop once the relative residual improvement falls below this.
    pub tolerance: f64,
    pub seed: u64,
    pub restarts: usize,
    /// Analog starting point for the first restart.
    pub init: Option<CMatrix>,
}

impl Default for HbfOptions {
    fn default() -> Self {
        Self {
            max_iter: 50,
            tolerance: 1e-8,
            seed: 0,
            restarts: 5,
            init: None,
        }
    }
}

fn block_range(m: usize, n_rf: usize, n: usize) -> std::ops::Range<usize> {
    let size = m / n_rf;
    n * size..(n + 1) * size
}

fn check_rf(b: &TargetMatrix, n_rf: usize, structure: HbfStructure) -> Result<()> {
    let m = b.num_antennas();
    if n_rf == 0 || n_rf > m {
        return Err(JptaError::InvalidRfChains(format!(
            "{n_rf} RF chains for {m} antennas"
        )));
    }
    if structure == HbfStructure::PartiallyConnected && m % n_rf != 0 {
        return Err(JptaError::InvalidRfChains(format!(
            "{n_rf} RF chains do not divide {m} antennas"
        )));
    }
    Ok(())
}

fn check_init(init: &CMatrix, m: usize, n_rf: usize) -> Result<()> {
    if init.nrows() != m || init.ncols() != n_rf {
        return Err(JptaError::DimensionMismatch {
            what: "initial analog matrix",
            expected: m * n_rf,
            actual: init.nrows() * init.ncols(),
        });
    }
    Ok(())
}

/// Uniform phases on `[-pi, pi)`, drawn column by column (antenna-major
/// within a column). For PC only the entries of each block are drawn, so
/// with one RF chain both structures consume the same sequence.
fn random_analog(m: usize, n_rf: usize, structure: HbfStructure, seed: u64) -> CMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut f = CMatrix::zeros(m, n_rf);
    for n in 0..n_rf {
        let rows = match structure {
            HbfStructure::FullyConnected => 0..m,
            HbfStructure::PartiallyConnected => block_range(m, n_rf, n),
        };
        for i in rows {
            f[(i, n)] = Complex64::from_polar(1.0, rng.random_range(-PI..PI));
        }
    }
    f
}

fn unit_phase(z: Complex64) -> Complex64 {
    if z.norm() == 0.0 {
        Complex64::new(1.0, 0.0)
    } else {
        z / z.norm()
    }
}

fn project_mask(f: &CMatrix, structure: HbfStructure) -> CMatrix {
    let (m, n_rf) = f.shape();
    CMatrix::from_fn(m, n_rf, |i, n| {
        let inside = match structure {
            HbfStructure::FullyConnected => true,
            HbfStructure::PartiallyConnected => block_range(m, n_rf, n).contains(&i),
        };
        if inside {
            unit_phase(f[(i, n)])
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

/// Unconstrained least-squares digital factor for a fixed analog matrix.
fn least_squares_digital(f: &CMatrix, b: &CMatrix) -> CMatrix {
    f.clone()
        .svd(true, true)
        .solve(b, SVD_EPS)
        .expect("SVD computed with both factors")
}

/// `x` scaled by the least-squares optimal `s = Re<F x, B> / |F x|^2`.
fn best_scale(f: &CMatrix, b: &CMatrix, x: CMatrix) -> CMatrix {
    let fx = f * &x;
    let energy = fx.norm_squared();
    if energy == 0.0 {
        return x * Complex64::new(0.0, 0.0);
    }
    let s = fx.dotc(b).re.max(0.0) / energy;
    x * Complex64::new(s, 0.0)
}

/// Semi-unitary digital factor `s X`, `X = U V^H` from `F^H B = U S V^H`.
///
/// The Procrustes step is only exact when `F^H F` is a multiple of the
/// identity, so the previous factor (rescaled) is kept when it fits better.
fn semi_unitary_digital(f: &CMatrix, b: &CMatrix, prev: Option<&CMatrix>) -> CMatrix {
    let fb = f.adjoint() * b;
    let svd = fb.svd(true, true);
    let x = svd.u.expect("u requested") * svd.v_t.expect("v_t requested");
    let candidate = best_scale(f, b, x);
    match prev {
        Some(p) => {
            let kept = best_scale(f, b, p.clone());
            if residual(b, f, &kept) < residual(b, f, &candidate) {
                kept
            } else {
                candidate
            }
        }
        None => candidate,
    }
}

/// Exact per-block digital factor for a PC analog matrix.
fn block_digital(f: &CMatrix, b: &CMatrix) -> CMatrix {
    let (m, n_rf) = f.shape();
    let k = b.ncols();
    let mut d = CMatrix::zeros(n_rf, k);
    for n in 0..n_rf {
        let rows = block_range(m, n_rf, n);
        let size = rows.len() as f64;
        for j in 0..k {
            let s: Complex64 = rows.clone().map(|i| f[(i, n)].conj() * b[(i, j)]).sum();
            d[(n, j)] = s / size;
        }
    }
    d
}

fn residual(b: &CMatrix, f: &CMatrix, d: &CMatrix) -> f64 {
    (b - f * d).norm()
}

struct Run {
    analog: CMatrix,
    digital: CMatrix,
    trace: Vec<f64>,
    residual: f64,
}

fn alternate(b: &CMatrix, mut f: CMatrix, structure: HbfStructure, opts: &HbfOptions) -> Run {
    let digital_step = |f: &CMatrix, prev: Option<&CMatrix>| match structure {
        HbfStructure::FullyConnected => semi_unitary_digital(f, b, prev),
        HbfStructure::PartiallyConnected => block_digital(f, b),
    };
    let final_digital = |f: &CMatrix| match structure {
        HbfStructure::FullyConnected => least_squares_digital(f, b),
        HbfStructure::PartiallyConnected => block_digital(f, b),
    };
    let mut d = digital_step(&f, None);
    let mut trace = vec![residual(b, &f, &d)];
    let mut best_f = f.clone();
    let mut best_d = final_digital(&f);
    let mut best = residual(b, &best_f, &best_d);
    for _ in 0..opts.max_iter {
        // phase of the matched cross-term, restricted to the mask; exact
        // unless D D^H is not a multiple of the identity (N_RF > K)
        let candidate = project_mask(&(b * d.adjoint()), structure);
        if residual(b, &candidate, &d) <= residual(b, &f, &d) {
            f = candidate;
        }
        d = digital_step(&f, Some(&d));
        let r = residual(b, &f, &d);
        let prev = *trace.last().expect("trace starts non-empty");
        trace.push(r);
        let ls = final_digital(&f);
        let r_ls = residual(b, &f, &ls);
        if r_ls < best {
            best = r_ls;
            best_f = f.clone();
            best_d = ls;
        }
        if prev == 0.0 || (prev - r) / prev < opts.tolerance {
            break;
        }
    }
    Run {
        analog: best_f,
        digital: best_d,
        trace,
        residual: best,
    }
}

fn normalize(mut d: CMatrix, f: &CMatrix, power: f64) -> CMatrix {
    let p = (f * &d).norm_squared();
    if p > 0.0 {
        d *= Complex64::new((power / p).sqrt(), 0.0);
    }
    d
}

fn single_run(
    b: &TargetMatrix,
    n_rf: usize,
    structure: HbfStructure,
    opts: &HbfOptions,
    seed: u64,
    init: Option<&CMatrix>,
) -> Result<HbfBeamformer> {
    check_rf(b, n_rf, structure)?;
    if opts.max_iter == 0 {
        return Err(JptaError::InvalidOptions("at least one iteration required".into()));
    }
    let m = b.num_antennas();
    let f0 = match init {
        Some(f) => {
            check_init(f, m, n_rf)?;
            project_mask(f, structure)
        }
        None => random_analog(m, n_rf, structure, seed),
    };
    let run = alternate(&b.b, f0, structure, opts);
    let digital = normalize(run.digital, &run.analog, b.power_budget);
    Ok(HbfBeamformer {
        analog: run.analog,
        digital,
        structure,
        residual_trace: run.trace,
        residual: run.residual,
        seed,
    })
}

/// One phase-extraction alternating-minimization run for the FC network:
/// the digital factor is a scaled semi-unitary matrix, the analog matrix the
/// phase of `B F_BB^H`. The returned digital factor is the unconstrained
/// least-squares fit for the best analog iterate.
pub fn pe_altmin_fc(
    b: &TargetMatrix,
    n_rf: usize,
    max_iter: usize,
    seed: u64,
    init: Option<&CMatrix>,
) -> Result<HbfBeamformer> {
    let opts = HbfOptions {
        max_iter,
        seed,
        restarts: 1,
        ..HbfOptions::default()
    };
    single_run(b, n_rf, HbfStructure::FullyConnected, &opts, seed, init)
}

/// One alternating-minimization run for the PC network, where each RF chain
/// drives a contiguous block of `M / N_RF` antennas.
pub fn altmin_pc(
    b: &TargetMatrix,
    n_rf: usize,
    max_iter: usize,
    seed: u64,
    init: Option<&CMatrix>,
) -> Result<HbfBeamformer> {
    let opts = HbfOptions {
        max_iter,
        seed,
        restarts: 1,
        ..HbfOptions::default()
    };
    single_run(b, n_rf, HbfStructure::PartiallyConnected, &opts, seed, init)
}

/// Best of `opts.restarts` runs with seeds `seed, seed + 1, ...`; the first
/// run starts from `opts.init` when given.
pub fn design_hbf(
    b: &TargetMatrix,
    structure: HbfStructure,
    n_rf: usize,
    opts: &HbfOptions,
) -> Result<HbfBeamformer> {
    check_rf(b, n_rf, structure)?;
    let restarts = opts.restarts.max(1);
    let runs: Vec<HbfBeamformer> = (0..restarts)
        .into_par_iter()
        .map(|r| {
            let init = if r == 0 { opts.init.as_ref() } else { None };
            single_run(b, n_rf, structure, opts, opts.seed + r as u64, init)
        })
        .collect::<Result<_>>()?;
    Ok(runs
        .into_iter()
        .reduce(|a, c| if c.residual < a.residual { c } else { a })
        .expect("at least one restart"))
}

/// Runs FC designs for increasing RF-chain counts, each warm-started from
/// the best lower-count analog matrix padded with one random column.
pub fn fc_warm_sweep(
    b: &TargetMatrix,
    n_rf_values: &[usize],
    opts: &HbfOptions,
) -> Result<Vec<HbfBeamformer>> {
    let mut sorted = n_rf_values.to_vec();
    sorted.sort_unstable();
    let m = b.num_antennas();
    let mut out: Vec<HbfBeamformer> = Vec::with_capacity(sorted.len());
    for &n_rf in &sorted {
        let init = out.last().map(|prev| {
            let prev_f = prev.analog();
            let extra = random_analog(m, n_rf, HbfStructure::FullyConnected, opts.seed ^ n_rf as u64);
            CMatrix::from_fn(m, n_rf, |i, n| {
                if n < prev_f.ncols() {
                    prev_f[(i, n)]
                } else {
                    extra[(i, n)]
                }
            })
        });
        let run_opts = HbfOptions {
            init,
            ..opts.clone()
        };
        out.push(design_hbf(b, HbfStructure::FullyConnected, n_rf, &run_opts)?);
    }
    Ok(out)
}

/// Weighted goodness of fit of the normalized HBF beams; vanishing beams
/// count as zero match.
pub fn hbf_fit(target: &BeamTarget, bf: &HbfBeamformer) -> Result<f64> {
    Ok(hbf_per_subcarrier_match(target, bf)?
        .iter()
        .zip(target.weights())
        .map(|(m, w)| m * w)
        .sum::<f64>()
        / target.weights().iter().sum::<f64>())
}

pub fn hbf_per_subcarrier_match(target: &BeamTarget, bf: &HbfBeamformer) -> Result<Vec<f64>> {
    if bf.analog.nrows() != target.num_antennas() || bf.digital.ncols() != target.num_subcarriers()
    {
        return Err(JptaError::DimensionMismatch {
            what: "HBF beamformer shape",
            expected: target.num_antennas() * target.num_subcarriers(),
            actual: bf.analog.nrows() * bf.digital.ncols(),
        });
    }
    Ok(bf
        .normalized_beams()
        .iter()
        .zip(target.directions())
        .map(|(w, b)| crate::array_model::inner(b, w).norm())
        .collect())
}

/// Minimum RF chains for the rainbow target: `(r_fc, r_pc)`, with `r_pc`
/// the next power of two.
pub fn min_rf_chains(
    config: &SystemConfig,
    grid: &SubcarrierGrid,
    theta0: f64,
    delta_theta: f64,
) -> (usize, usize) {
    let f0 = config.carrier_freq();
    let m = config.num_antennas() as f64;
    let spread = (theta0 + delta_theta / 2.0).sin() * grid.f_max() / f0
        - (theta0 - delta_theta / 2.0).sin() * grid.f_min() / f0;
    let r_fc = ((m / 2.0 * spread.abs()).ceil() as usize).max(1);
    (r_fc, r_fc.next_power_of_two())
}

/// Singular values above `1e-6 * sigma_max`.
pub fn numerical_rank(b: &TargetMatrix) -> usize {
    let sv = b.b.clone().singular_values();
    let max = sv.iter().copied().fold(0.0, f64::max);
    if max == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > 1e-6 * max).count()
}

/// Spatial frequency `Omega` of a steering-like column, from the phase step
/// between its first two entries; `None` for columns too short or zero.
pub fn spatial_frequency(column: &[Complex64]) -> Option<f64> {
    if column.len() < 2 {
        return None;
    }
    let z = column[1] * column[0].conj();
    if z.norm() == 0.0 {
        return None;
    }
    Some(z.arg() / PI)
}

/// `g(Omega)_m = exp(j pi m Omega)`.
pub fn g_vector(m: usize, omega: f64) -> Vec<Complex64> {
    (0..m)
        .map(|i| Complex64::from_polar(1.0, PI * i as f64 * omega))
        .collect()
}

/// Size of the largest mutually orthogonal family of `g(Omega)` vectors
/// spaced `2/M` apart that fits inside the span of the columns' spatial
/// frequencies. Every member is checked for orthogonality (`1e-8`, relative
/// to `M`) against all earlier members.
pub fn orthogonal_column_count(b: &TargetMatrix) -> usize {
    let m = b.num_antennas();
    let omegas: Vec<f64> = b
        .b
        .column_iter()
        .filter_map(|c| spatial_frequency(c.as_slice()))
        .collect();
    if omegas.is_empty() {
        return 0;
    }
    let lo = omegas.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = omegas.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let step = 2.0 / m as f64;
    let mut family: Vec<Vec<Complex64>> = Vec::new();
    let mut j = 0usize;
    loop {
        let omega = lo + j as f64 * step;
        if omega > hi + 1e-12 {
            break;
        }
        let g = g_vector(m, omega);
        let orthogonal = family.iter().all(|h| {
            let s: Complex64 = h.iter().zip(&g).map(|(a, b)| a.conj() * b).sum();
            s.norm() <= 1e-8 * m as f64
        });
        if !orthogonal {
            break;
        }
        family.push(g);
        j += 1;
    }
    family.len()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::targets::{behavior1_target, WeightScheme};

    fn random_target(m: usize, k: usize, seed: u64) -> TargetMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let b = CMatrix::from_fn(m, k, |_, _| {
            Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        });
        let power = b.norm_squared();
        TargetMatrix {
            b,
            power_budget: power,
        }
    }

    #[test]
    fn full_rf_chains_reproduce_target() {
        let b = random_target(8, 20, 1);
        let bf = pe_altmin_fc(&b, 8, 50, 3, None).unwrap();
        assert!(bf.residual() < 1e-6 * b.matrix().norm(), "{}", bf.residual());
    }

    #[test]
    fn rank_one_unit_modulus_is_recovered() {
        let m = 6;
        let v = g_vector(m, 0.37);
        let coeffs: Vec<Complex64> = (0..10)
            .map(|k| Complex64::from_polar(0.5 + 0.1 * k as f64, 0.3 * k as f64))
            .collect();
        let b = CMatrix::from_fn(m, 10, |i, k| v[i] * coeffs[k]);
        let power = b.norm_squared();
        let b = TargetMatrix {
            b,
            power_budget: power,
        };
        for structure in [HbfStructure::FullyConnected, HbfStructure::PartiallyConnected] {
            let bf = design_hbf(&b, structure, 1, &HbfOptions::default()).unwrap();
            assert!(bf.residual() < 1e-8, "{structure:?} {}", bf.residual());
        }
    }

    #[test]
    fn single_chain_structures_coincide() {
        let b = random_target(8, 12, 5);
        let fc = pe_altmin_fc(&b, 1, 30, 11, None).unwrap();
        let pc = altmin_pc(&b, 1, 30, 11, None).unwrap();
        assert_eq!(fc.residual_trace().len(), pc.residual_trace().len());
        for (a, c) in fc.residual_trace().iter().zip(pc.residual_trace()) {
            assert!((a - c).abs() < 1e-10);
        }
        assert!((fc.residual() - pc.residual()).abs() < 1e-10);
    }

    #[test]
    fn residuals_do_not_increase() {
        let b = random_target(16, 24, 9);
        for (structure, n_rf) in [
            (HbfStructure::FullyConnected, 3),
            (HbfStructure::FullyConnected, 7),
            (HbfStructure::PartiallyConnected, 4),
        ] {
            let opts = HbfOptions {
                restarts: 1,
                ..HbfOptions::default()
            };
            let bf = design_hbf(&b, structure, n_rf, &opts).unwrap();
            for pair in bf.residual_trace().windows(2) {
                assert!(pair[1] <= pair[0] + 1e-9, "{structure:?}: {pair:?}");
            }
        }
    }

    #[test]
    fn pc_mask_and_power_normalization() {
        let b = random_target(8, 6, 2);
        let bf = design_hbf(&b, HbfStructure::PartiallyConnected, 4, &HbfOptions::default()).unwrap();
        for i in 0..8 {
            for n in 0..4 {
                let z = bf.analog()[(i, n)];
                if i / 2 == n {
                    assert!((z.norm() - 1.0).abs() < 1e-12);
                } else {
                    assert_eq!(z, Complex64::new(0.0, 0.0));
                }
            }
        }
        assert!((bf.total_power() - b.power_budget()).abs() < 1e-10 * b.power_budget());
        let fc = design_hbf(&b, HbfStructure::FullyConnected, 3, &HbfOptions::default()).unwrap();
        assert!(fc.analog().iter().all(|z| (z.norm() - 1.0).abs() < 1e-12));
        assert!((fc.total_power() - b.power_budget()).abs() < 1e-10 * b.power_budget());
    }

    #[test]
    fn invalid_rf_chain_counts() {
        let b = random_target(8, 4, 0);
        assert!(pe_altmin_fc(&b, 9, 5, 0, None).is_err());
        assert!(pe_altmin_fc(&b, 0, 5, 0, None).is_err());
        assert!(altmin_pc(&b, 3, 5, 0, None).is_err());
    }

    #[test]
    fn deterministic_for_a_seed() {
        let b = random_target(8, 10, 4);
        let a = design_hbf(&b, HbfStructure::FullyConnected, 3, &HbfOptions::default()).unwrap();
        let c = design_hbf(&b, HbfStructure::FullyConnected, 3, &HbfOptions::default()).unwrap();
        assert_eq!(a, c);
    }

    #[test]
    fn stacked_columns_follow_the_target() {
        let cfg = SystemConfig::new(8, 8, 100e9, 10e9, 5, 8.0).unwrap();
        let grid = SubcarrierGrid::new(&cfg);
        let t = behavior1_target(&cfg, &grid, 0.3, 0.6, WeightScheme::Uniform).unwrap();
        let b = stack_target(&t);
        assert_eq!(b.matrix().shape(), (8, 5));
        for k in 0..5 {
            let col: Vec<_> = b.matrix().column(k).iter().copied().collect();
            assert_eq!(col, t.vector(k));
            assert!((b.matrix().column(k).norm() - (5.0f64 / 5.0).sqrt()).abs() < 1e-12);
        }
        let single = SystemConfig::new(4, 4, 100e9, 10e9, 1, 4.0).unwrap();
        let g1 = SubcarrierGrid::new(&single);
        let t1 = behavior1_target(&single, &g1, 0.1, 0.0, WeightScheme::Uniform).unwrap();
        assert_eq!(stack_target(&t1).matrix().ncols(), 1);
    }

    #[test]
    fn min_rf_chain_values() {
        let cfg = SystemConfig::reference_preset();
        let grid = SubcarrierGrid::new(&cfg);
        assert_eq!(min_rf_chains(&cfg, &grid, PI / 6.0, PI / 4.0), (23, 32));
        let narrow = SystemConfig::new(64, 64, 100e9, 1.0, 1, 1.0).unwrap();
        let ng = SubcarrierGrid::new(&narrow);
        assert_eq!(min_rf_chains(&narrow, &ng, 0.0, 0.0), (1, 1));
        // narrowband approximation
        let (r, _) = min_rf_chains(&narrow, &ng, 0.2, 0.5);
        let approx = (32.0 * ((0.45f64).sin() - (-0.05f64).sin()).abs()).ceil() as usize;
        assert_eq!(r, approx);
    }

    #[test]
    fn g_vectors_two_over_m_apart_are_orthogonal() {
        let m = 16;
        let a = g_vector(m, 0.123);
        let b = g_vector(m, 0.123 + 2.0 / m as f64);
        let s: Complex64 = a.iter().zip(&b).map(|(x, y)| x.conj() * y).sum();
        assert!(s.norm() < 1e-12);
    }

    #[test]
    fn orthogonal_count_degenerate_and_reference() {
        let narrow = SystemConfig::new(64, 64, 100e9, 1.0, 8, 1.0).unwrap();
        let ng = SubcarrierGrid::new(&narrow);
        let t = behavior1_target(&narrow, &ng, 0.3, 0.0, WeightScheme::Uniform).unwrap();
        assert_eq!(orthogonal_column_count(&stack_target(&t)), 1);

        let cfg = SystemConfig::reference_preset().with_num_subcarriers(256).unwrap();
        let grid = SubcarrierGrid::new(&cfg);
        let t = behavior1_target(&cfg, &grid, PI / 6.0, PI / 4.0, WeightScheme::Uniform).unwrap();
        let b = stack_target(&t);
        let (r_fc, _) = min_rf_chains(&cfg, &grid, PI / 6.0, PI / 4.0);
        assert!(orthogonal_column_count(&b) >= r_fc);
        assert!(numerical_rank(&b) >= r_fc);
    }

    #[test]
    fn normalized_beams_have_unit_norm() {
        let b = random_target(8, 6, 12);
        let bf = design_hbf(&b, HbfStructure::FullyConnected, 2, &HbfOptions::default()).unwrap();
        for w in bf.normalized_beams() {
            let n: f64 = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            assert!((n - 1.0).abs() < 1e-12);
        }
    }
}
