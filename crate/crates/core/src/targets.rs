//! Desired per-subcarrier beams and subcarrier weights.
//!
//! A [`BeamTarget`] stores one complex M-vector `b_k` per subcarrier (in
//! ascending index order) together with its unit-norm direction, its norm
//! and the weight the design objectives give it.

use std::io::{BufRead, Write};

use num_complex::Complex64;

use crate::array_model::{steering_vector, SteeringAngle, SubcarrierGrid, SystemConfig};
use crate::error::{JptaError, Result};

/// How subcarrier weights are derived from the target norms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum WeightScheme {
    /// `w_k = 1`.
    #[default]
    Uniform,
    /// `w_k = |b_k|^2`.
    Power,
    /// `w_k = |b_k|^2 / (1 + |b_k|^2)`.
    Saturating,
}

impl WeightScheme {
    pub fn weight(self, norm_sq: f64) -> f64 {
        match self {
            WeightScheme::Uniform => 1.0,
            WeightScheme::Power => norm_sq,
            WeightScheme::Saturating => norm_sq / (1.0 + norm_sq),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BeamTarget {
    vectors: Vec<Vec<Complex64>>,
    directions: Vec<Vec<Complex64>>,
    norms: Vec<f64>,
    weights: Vec<f64>,
    power_budget: f64,
}

impl BeamTarget {
    /// Builds a target from raw beams. Zero beams are allowed; they get a zero
    /// direction and zero weight.
    pub fn new(
        vectors: Vec<Vec<Complex64>>,
        scheme: WeightScheme,
        power_budget: f64,
    ) -> Result<Self> {
        let norms: Vec<f64> = vectors.iter().map(|v| crate::array_model::norm(v)).collect();
        let weights = norms
            .iter()
            .map(|&n| if n > 0.0 { scheme.weight(n * n) } else { 0.0 })
            .collect();
        Self::with_weights(vectors, weights, power_budget)
    }

    /// Builds a target with explicit subcarrier weights.
    pub fn with_weights(
        vectors: Vec<Vec<Complex64>>,
        mut weights: Vec<f64>,
        power_budget: f64,
    ) -> Result<Self> {
        if vectors.is_empty() {
            return Err(JptaError::InvalidTarget("no subcarriers".into()));
        }
        let m = vectors[0].len();
        if m == 0 {
            return Err(JptaError::InvalidTarget("empty beam vectors".into()));
        }
        if let Some(v) = vectors.iter().find(|v| v.len() != m) {
            return Err(JptaError::DimensionMismatch {
                what: "target vector length",
                expected: m,
                actual: v.len(),
            });
        }
        if weights.len() != vectors.len() {
            return Err(JptaError::DimensionMismatch {
                what: "weight count",
                expected: vectors.len(),
                actual: weights.len(),
            });
        }
        if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(JptaError::InvalidTarget("weights must be finite and nonnegative".into()));
        }
        let norms: Vec<f64> = vectors.iter().map(|v| crate::array_model::norm(v)).collect();
        let total: f64 = norms.iter().map(|n| n * n).sum();
        if total > power_budget * (1.0 + 1e-12) {
            return Err(JptaError::PowerBudgetExceeded {
                total,
                budget: power_budget,
            });
        }
        let directions = vectors
            .iter()
            .zip(&norms)
            .map(|(v, &n)| {
                if n > 0.0 {
                    v.iter().map(|z| z / n).collect()
                } else {
                    vec![Complex64::new(0.0, 0.0); m]
                }
            })
            .collect();
        for (w, &n) in weights.iter_mut().zip(&norms) {
            if n == 0.0 {
                *w = 0.0;
            }
        }
        if weights.iter().all(|&w| w == 0.0) {
            return Err(JptaError::InvalidTarget("all subcarrier weights are zero".into()));
        }
        Ok(Self {
            vectors,
            directions,
            norms,
            weights,
            power_budget,
        })
    }

    pub fn num_subcarriers(&self) -> usize {
        self.vectors.len()
    }

    pub fn num_antennas(&self) -> usize {
        self.vectors[0].len()
    }

    /// `b_k` at storage position `pos`.
    pub fn vector(&self, pos: usize) -> &[Complex64] {
        &self.vectors[pos]
    }

    pub fn vectors(&self) -> &[Vec<Complex64>] {
        &self.vectors
    }

    /// `b_k / |b_k|` (zero for zero beams).
    pub fn direction(&self, pos: usize) -> &[Complex64] {
        &self.directions[pos]
    }

    pub fn directions(&self) -> &[Vec<Complex64>] {
        &self.directions
    }

    pub fn norm(&self, pos: usize) -> f64 {
        self.norms[pos]
    }

    pub fn norms(&self) -> &[f64] {
        &self.norms
    }

    pub fn weight(&self, pos: usize) -> f64 {
        self.weights[pos]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn power_budget(&self) -> f64 {
        self.power_budget
    }

    pub fn total_power(&self) -> f64 {
        self.norms.iter().map(|n| n * n).sum()
    }

    /// Same beams with a different weighting.
    pub fn reweighted(&self, scheme: WeightScheme) -> Result<Self> {
        Self::new(self.vectors.clone(), scheme, self.power_budget)
    }

    pub(crate) fn check_against(&self, config: &SystemConfig, grid: &SubcarrierGrid) -> Result<()> {
        if self.num_subcarriers() != grid.len() {
            return Err(JptaError::DimensionMismatch {
                what: "target subcarrier count",
                expected: grid.len(),
                actual: self.num_subcarriers(),
            });
        }
        if self.num_antennas() != config.num_antennas() {
            return Err(JptaError::DimensionMismatch {
                what: "target antenna count",
                expected: config.num_antennas(),
                actual: self.num_antennas(),
            });
        }
        Ok(())
    }
}

fn scaled_steering(config: &SystemConfig, grid: &SubcarrierGrid, pos: usize, theta: f64) -> Vec<Complex64> {
    let m = config.num_antennas();
    let k = grid.len() as f64;
    let amp = (config.total_power() / (m as f64 * k)).sqrt();
    steering_vector(m, grid.ratio(pos), theta)
        .into_iter()
        .map(|z| z * amp)
        .collect()
}

/// Target whose steering angle at subcarrier `k` is `theta0 + k * delta / K`.
pub fn behavior1_target(
    config: &SystemConfig,
    grid: &SubcarrierGrid,
    theta0: f64,
    delta_theta: f64,
    scheme: WeightScheme,
) -> Result<BeamTarget> {
    SteeringAngle::checked(theta0 - delta_theta / 2.0, "theta0 - delta_theta/2")?;
    SteeringAngle::checked(theta0 + delta_theta / 2.0, "theta0 + delta_theta/2")?;
    let k_count = grid.len() as f64;
    let vectors = (0..grid.len())
        .map(|pos| {
            let theta = theta0 + grid.index(pos) as f64 * delta_theta / k_count;
            scaled_steering(config, grid, pos, theta)
        })
        .collect();
    BeamTarget::new(vectors, scheme, config.total_power())
}

/// Target steering to `theta1` below the center subcarrier and to `theta2`
/// from the center subcarrier upward.
pub fn behavior2_target(
    config: &SystemConfig,
    grid: &SubcarrierGrid,
    theta1: f64,
    theta2: f64,
    scheme: WeightScheme,
) -> Result<BeamTarget> {
    SteeringAngle::checked(theta1, "theta1")?;
    SteeringAngle::checked(theta2, "theta2")?;
    let vectors = (0..grid.len())
        .map(|pos| {
            let theta = if grid.index(pos) < 0 { theta1 } else { theta2 };
            scaled_steering(config, grid, pos, theta)
        })
        .collect();
    BeamTarget::new(vectors, scheme, config.total_power())
}

/// Piecewise-constant steering over contiguous bands.
///
/// `band_starts` holds the first subcarrier index of every band after the
/// first, strictly increasing; band `i` steers to `angles[i]`.
pub fn multi_angle_target(
    config: &SystemConfig,
    grid: &SubcarrierGrid,
    band_starts: &[i64],
    angles: &[f64],
    scheme: WeightScheme,
) -> Result<BeamTarget> {
    if angles.len() != band_starts.len() + 1 {
        return Err(JptaError::InvalidBands(format!(
            "{} band edges need {} angles, got {}",
            band_starts.len(),
            band_starts.len() + 1,
            angles.len()
        )));
    }
    for pair in band_starts.windows(2) {
        if pair[1] <= pair[0] {
            return Err(JptaError::InvalidBands(format!(
                "band edges must be strictly increasing ({} then {})",
                pair[0], pair[1]
            )));
        }
    }
    if let (Some(&lo), Some(&hi)) = (band_starts.first(), band_starts.last()) {
        if lo <= grid.first_index() || hi > grid.last_index() {
            return Err(JptaError::InvalidBands(format!(
                "band edges must lie in ({}, {}]",
                grid.first_index(),
                grid.last_index()
            )));
        }
    }
    for &a in angles {
        SteeringAngle::checked(a, "band angle")?;
    }
    let vectors = (0..grid.len())
        .map(|pos| {
            let k = grid.index(pos);
            let band = band_starts.partition_point(|&start| start <= k);
            scaled_steering(config, grid, pos, angles[band])
        })
        .collect();
    BeamTarget::new(vectors, scheme, config.total_power())
}

/// Band edges splitting the grid into `count` nearly equal bands.
pub fn equal_band_starts(grid: &SubcarrierGrid, count: usize) -> Vec<i64> {
    let k = grid.len();
    (1..count)
        .map(|i| grid.index(i * k / count))
        .collect()
}

/// Reads a target in the plain-text beam format: one subcarrier per line in
/// ascending index order, each line holding M whitespace-separated `re,im`
/// pairs. Blank lines and lines starting with `#` are skipped.
///
/// A target whose power exceeds the budget is rejected unless `rescale` is
/// set, in which case every beam is scaled down uniformly to meet it.
pub fn custom_target<R: BufRead>(
    config: &SystemConfig,
    grid: &SubcarrierGrid,
    reader: R,
    scheme: WeightScheme,
    rescale: bool,
) -> Result<BeamTarget> {
    let m = config.num_antennas();
    let mut vectors = Vec::with_capacity(grid.len());
    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let row = parse_beam_line(trimmed).map_err(|message| JptaError::Parse {
            line: lineno + 1,
            message,
        })?;
        if row.len() != m {
            return Err(JptaError::Parse {
                line: lineno + 1,
                message: format!("expected {m} entries, found {}", row.len()),
            });
        }
        if row.iter().all(|z| *z == Complex64::new(0.0, 0.0)) {
            return Err(JptaError::DegenerateTarget(format!(
                "line {} is an all-zero beam",
                lineno + 1
            )));
        }
        vectors.push(row);
    }
    if vectors.len() != grid.len() {
        return Err(JptaError::DimensionMismatch {
            what: "custom target subcarrier count",
            expected: grid.len(),
            actual: vectors.len(),
        });
    }
    let budget = config.total_power();
    let total: f64 = vectors
        .iter()
        .flat_map(|v| v.iter())
        .map(|z| z.norm_sqr())
        .sum();
    if total > budget * (1.0 + 1e-12) {
        if !rescale {
            return Err(JptaError::PowerBudgetExceeded { total, budget });
        }
        let s = (budget / total).sqrt();
        for z in vectors.iter_mut().flat_map(|v| v.iter_mut()) {
            *z *= s;
        }
    }
    BeamTarget::new(vectors, scheme, budget)
}

fn parse_beam_line(line: &str) -> std::result::Result<Vec<Complex64>, String> {
    line.split_whitespace()
        .map(|pair| {
            let (re, im) = pair
                .split_once(',')
                .ok_or_else(|| format!("entry `{pair}` is not a `re,im` pair"))?;
            let re: f64 = re.parse().map_err(|_| format!("bad real part `{re}`"))?;
            let im: f64 = im.parse().map_err(|_| format!("bad imaginary part `{im}`"))?;
            if !(re.is_finite() && im.is_finite()) {
                return Err(format!("non-finite entry `{pair}`"));
            }
            Ok(Complex64::new(re, im))
        })
        .collect()
}

/// Writes beams in the format read by [`custom_target`], using the shortest
/// representation that round-trips exactly.
pub fn write_target<W: Write>(target: &BeamTarget, mut out: W) -> std::io::Result<()> {
    for v in target.vectors() {
        let line: Vec<String> = v.iter().map(|z| format!("{:?},{:?}", z.re, z.im)).collect();
        writeln!(out, "{}", line.join(" "))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn reference_like(k: usize) -> (SystemConfig, SubcarrierGrid) {
        let cfg = SystemConfig::reference_preset().with_num_subcarriers(k).unwrap();
        let grid = SubcarrierGrid::new(&cfg);
        (cfg, grid)
    }

    #[test]
    fn weight_schemes() {
        assert_eq!(WeightScheme::Uniform.weight(4.0), 1.0);
        assert_eq!(WeightScheme::Power.weight(4.0), 4.0);
        assert_eq!(WeightScheme::Saturating.weight(4.0), 0.8);
    }

    #[test]
    fn behavior1_norms_and_center() {
        let (cfg, grid) = reference_like(256);
        let t = behavior1_target(&cfg, &grid, PI / 6.0, PI / 4.0, WeightScheme::Uniform).unwrap();
        let expected = (cfg.total_power() / 256.0).sqrt();
        for pos in 0..grid.len() {
            assert!((t.norm(pos) - expected).abs() < 1e-12);
            for z in t.direction(pos) {
                assert!((z.norm() - 1.0 / 8.0).abs() < 1e-14);
            }
        }
        let center = grid.position(0).unwrap();
        let a = steering_vector(64, 1.0, PI / 6.0);
        let amp = (cfg.total_power() / (64.0 * 256.0)).sqrt();
        for (z, a) in t.vector(center).iter().zip(&a) {
            assert!((z - a * amp).norm() < 1e-15);
        }
    }

    #[test]
    fn behavior1_reference_angles() {
        let (cfg, grid) = reference_like(2048);
        let t = behavior1_target(&cfg, &grid, PI / 6.0, PI / 4.0, WeightScheme::Uniform).unwrap();
        for &k in &[-1024i64, -1, 0, 511, 1023] {
            let pos = grid.position(k).unwrap();
            let theta = PI / 6.0 + k as f64 * PI / (4.0 * 2048.0);
            let a = steering_vector(64, grid.ratio(pos), theta);
            for (z, a) in t.direction(pos).iter().zip(&a) {
                assert!((z - a / 8.0).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn zero_sweep_matches_equal_angles() {
        let (cfg, grid) = reference_like(64);
        let a = behavior1_target(&cfg, &grid, 0.4, 0.0, WeightScheme::Uniform).unwrap();
        let b = behavior2_target(&cfg, &grid, 0.4, 0.4, WeightScheme::Uniform).unwrap();
        for pos in 0..grid.len() {
            for (x, y) in a.vector(pos).iter().zip(b.vector(pos)) {
                assert!((x - y).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn behavior2_splits_at_zero() {
        let (cfg, grid) = reference_like(4);
        let t = behavior2_target(&cfg, &grid, -PI / 4.0, PI / 6.0, WeightScheme::Uniform).unwrap();
        let steer = |pos: usize, theta: f64| steering_vector(64, grid.ratio(pos), theta);
        let close = |pos: usize, theta: f64| {
            t.direction(pos)
                .iter()
                .zip(steer(pos, theta))
                .all(|(z, a)| (z - a / 8.0).norm() < 1e-12)
        };
        let low: Vec<_> = (0..4).filter(|&p| close(p, -PI / 4.0)).collect();
        let high: Vec<_> = (0..4).filter(|&p| close(p, PI / 6.0)).collect();
        assert_eq!(low, vec![0, 1]);
        assert_eq!(high, vec![2, 3]);
    }

    #[test]
    fn angle_range_checked() {
        let (cfg, grid) = reference_like(16);
        assert!(behavior1_target(&cfg, &grid, 1.4, 0.5, WeightScheme::Uniform).is_err());
        assert!(behavior2_target(&cfg, &grid, -1.6, 0.0, WeightScheme::Uniform).is_err());
    }

    #[test]
    fn multi_angle_reductions() {
        let (cfg, grid) = reference_like(48);
        let single = multi_angle_target(&cfg, &grid, &[], &[0.3], WeightScheme::Uniform).unwrap();
        let fixed = behavior1_target(&cfg, &grid, 0.3, 0.0, WeightScheme::Uniform).unwrap();
        assert_eq!(single, fixed);

        let two = multi_angle_target(&cfg, &grid, &[0], &[-0.5, 0.2], WeightScheme::Uniform).unwrap();
        let b2 = behavior2_target(&cfg, &grid, -0.5, 0.2, WeightScheme::Uniform).unwrap();
        assert_eq!(two, b2);
    }

    #[test]
    fn three_equal_bands() {
        let (cfg, grid) = reference_like(48);
        let starts = equal_band_starts(&grid, 3);
        assert_eq!(starts, vec![-8, 8]);
        let angles = [-PI / 4.0, 0.0, PI / 6.0];
        let t = multi_angle_target(&cfg, &grid, &starts, &angles, WeightScheme::Uniform).unwrap();
        for pos in 0..grid.len() {
            let band = pos / 16;
            let a = steering_vector(64, grid.ratio(pos), angles[band]);
            for (z, a) in t.direction(pos).iter().zip(&a) {
                assert!((z - a / 8.0).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn bad_band_plans() {
        let (cfg, grid) = reference_like(16);
        let w = WeightScheme::Uniform;
        assert!(multi_angle_target(&cfg, &grid, &[2, 1], &[0.0, 0.1, 0.2], w).is_err());
        assert!(multi_angle_target(&cfg, &grid, &[1, 1], &[0.0, 0.1, 0.2], w).is_err());
        assert!(multi_angle_target(&cfg, &grid, &[0], &[0.0], w).is_err());
        assert!(multi_angle_target(&cfg, &grid, &[-8], &[0.0, 0.1], w).is_err());
    }

    #[test]
    fn custom_round_trip() {
        let (cfg, grid) = reference_like(8);
        let t = behavior1_target(&cfg, &grid, 0.2, 0.3, WeightScheme::Uniform).unwrap();
        let mut buf = Vec::new();
        write_target(&t, &mut buf).unwrap();
        let back = custom_target(&cfg, &grid, buf.as_slice(), WeightScheme::Uniform, false).unwrap();
        assert_eq!(back, t);
    }

    #[test]
    fn custom_rejects_zero_row_and_bad_shapes() {
        let cfg = SystemConfig::new(2, 2, 10.0, 2.0, 2, 1.0).unwrap();
        let grid = SubcarrierGrid::new(&cfg);
        let w = WeightScheme::Uniform;
        let zero = "0.5,0 0.5,0\n0,0 0,0\n";
        assert!(matches!(
            custom_target(&cfg, &grid, zero.as_bytes(), w, false),
            Err(JptaError::DegenerateTarget(_))
        ));
        let short = "0.5,0\n0.5,0 0.5,0\n";
        assert!(matches!(
            custom_target(&cfg, &grid, short.as_bytes(), w, false),
            Err(JptaError::Parse { line: 1, .. })
        ));
        let malformed = "0.5;0 0.5,0\n0.5,0 0.5,0\n";
        assert!(matches!(
            custom_target(&cfg, &grid, malformed.as_bytes(), w, false),
            Err(JptaError::Parse { line: 1, .. })
        ));
        let one_row = "0.5,0 0.5,0\n";
        assert!(custom_target(&cfg, &grid, one_row.as_bytes(), w, false).is_err());
    }

    #[test]
    fn custom_rescales_over_budget() {
        // budget is K = 2; these rows carry total power 4
        let cfg = SystemConfig::new(2, 2, 10.0, 2.0, 2, 1.0).unwrap();
        let grid = SubcarrierGrid::new(&cfg);
        let text = "1,0 0,1\n-1,0 1,0\n";
        let w = WeightScheme::Uniform;
        assert!(matches!(
            custom_target(&cfg, &grid, text.as_bytes(), w, false),
            Err(JptaError::PowerBudgetExceeded { .. })
        ));
        let t = custom_target(&cfg, &grid, text.as_bytes(), w, true).unwrap();
        let s = 1.0 / 2f64.sqrt();
        assert!((t.vector(0)[0] - Complex64::new(s, 0.0)).norm() < 1e-15);
        assert!((t.vector(1)[1] - Complex64::new(s, 0.0)).norm() < 1e-15);
        assert!((t.total_power() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn zero_beams_get_zero_weight() {
        let v = vec![
            vec![Complex64::new(1.0, 0.0)],
            vec![Complex64::new(0.0, 0.0)],
        ];
        let t = BeamTarget::new(v, WeightScheme::Uniform, 2.0).unwrap();
        assert_eq!(t.weights(), &[1.0, 0.0]);
        let all_zero = vec![vec![Complex64::new(0.0, 0.0)]];
        assert!(BeamTarget::new(all_zero, WeightScheme::Uniform, 1.0).is_err());
    }
}
