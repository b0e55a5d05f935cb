//! Physical description of the array: geometry, TTD network, OFDM band plan,
//! array response and array-gain evaluation.
//!
//! Units are SI throughout (Hz, seconds, radians, linear power). Antennas are
//! indexed from zero here, so antenna `m` carries the phase exponent `m` of a
//! half-wavelength uniform linear array, i.e. element `m` of the steering
//! vector at subcarrier frequency `f_k` is `exp(j*m*pi*sin(theta)*f_k/f0)`.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::design::JptaBeamformer;
use crate::error::{JptaError, Result};

/// Assignment of antennas to true-time-delay units.
///
/// Every antenna is driven by exactly one TTD; each TTD drives a nonempty,
/// ordered group of antennas.
#[derive(Debug, Clone, PartialEq)]
pub struct TtdMapping {
    groups: Vec<Vec<usize>>,
    owner: Vec<usize>,
}

impl TtdMapping {
    /// Contiguous blocks of `num_antennas / num_ttds` adjacent antennas.
    pub fn contiguous(num_antennas: usize, num_ttds: usize) -> Result<Self> {
        if num_ttds == 0 || num_antennas == 0 {
            return Err(JptaError::InvalidConfig(
                "antenna and TTD counts must be positive".into(),
            ));
        }
        if num_ttds > num_antennas {
            return Err(JptaError::InvalidConfig(format!(
                "{num_ttds} TTDs exceed {num_antennas} antennas"
            )));
        }
        if num_antennas % num_ttds != 0 {
            return Err(JptaError::InvalidConfig(format!(
                "contiguous mapping needs the TTD count ({num_ttds}) to divide the antenna count ({num_antennas})"
            )));
        }
        let per = num_antennas / num_ttds;
        let groups = (0..num_ttds)
            .map(|n| (n * per..(n + 1) * per).collect())
            .collect();
        Self::from_groups(num_antennas, groups)
    }

    /// Arbitrary partition of `0..num_antennas` (zero-based antenna indices).
    pub fn from_groups(num_antennas: usize, groups: Vec<Vec<usize>>) -> Result<Self> {
        if groups.is_empty() {
            return Err(JptaError::InvalidConfig("mapping has no TTD groups".into()));
        }
        if groups.len() > num_antennas {
            return Err(JptaError::InvalidConfig(format!(
                "{} TTDs exceed {num_antennas} antennas",
                groups.len()
            )));
        }
        let mut owner = vec![usize::MAX; num_antennas];
        for (n, group) in groups.iter().enumerate() {
            if group.is_empty() {
                return Err(JptaError::InvalidConfig(format!("TTD group {n} is empty")));
            }
            for &m in group {
                if m >= num_antennas {
                    return Err(JptaError::InvalidConfig(format!(
                        "antenna {m} in group {n} is out of range"
                    )));
                }
                if owner[m] != usize::MAX {
                    return Err(JptaError::InvalidConfig(format!(
                        "antenna {m} assigned to groups {} and {n}",
                        owner[m]
                    )));
                }
                owner[m] = n;
            }
        }
        if let Some(m) = owner.iter().position(|&o| o == usize::MAX) {
            return Err(JptaError::InvalidConfig(format!(
                "antenna {m} is not connected to any TTD"
            )));
        }
        Ok(Self { groups, owner })
    }

    pub fn num_ttds(&self) -> usize {
        self.groups.len()
    }

    pub fn num_antennas(&self) -> usize {
        self.owner.len()
    }

    /// Antennas driven by TTD `n`.
    pub fn group(&self, n: usize) -> &[usize] {
        &self.groups[n]
    }

    pub fn groups(&self) -> &[Vec<usize>] {
        &self.groups
    }

    /// TTD driving antenna `m`.
    pub fn ttd_of(&self, m: usize) -> usize {
        self.owner[m]
    }
}

/// Array geometry, TTD topology, band plan and delay budget.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemConfig {
    carrier_freq: f64,
    bandwidth: f64,
    num_subcarriers: usize,
    delay_range: f64,
    total_power: f64,
    mapping: TtdMapping,
}

impl SystemConfig {
    /// Builds a configuration with the contiguous TTD mapping and a power
    /// budget equal to the number of subcarriers.
    ///
    /// `delay_range` is the dimensionless kappa: delays live in `[0, kappa/W]`.
    pub fn new(
        num_antennas: usize,
        num_ttds: usize,
        carrier_freq: f64,
        bandwidth: f64,
        num_subcarriers: usize,
        delay_range: f64,
    ) -> Result<Self> {
        let mapping = TtdMapping::contiguous(num_antennas, num_ttds)?;
        let cfg = Self {
            carrier_freq,
            bandwidth,
            num_subcarriers,
            delay_range,
            total_power: num_subcarriers as f64,
            mapping,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// 64 antennas, 64 TTDs, 100 GHz carrier, 10 GHz bandwidth,
    /// 2048 subcarriers, kappa = 64.
    pub fn reference_preset() -> Self {
        Self::new(64, 64, 100e9, 10e9, 2048, 64.0).expect("preset is valid")
    }

    pub fn with_total_power(mut self, total_power: f64) -> Result<Self> {
        self.total_power = total_power;
        self.validate()?;
        Ok(self)
    }

    pub fn with_delay_range(mut self, delay_range: f64) -> Result<Self> {
        self.delay_range = delay_range;
        self.validate()?;
        Ok(self)
    }

    pub fn with_mapping(mut self, mapping: TtdMapping) -> Result<Self> {
        if mapping.num_antennas() != self.num_antennas() {
            return Err(JptaError::DimensionMismatch {
                what: "mapping antenna count",
                expected: self.num_antennas(),
                actual: mapping.num_antennas(),
            });
        }
        self.mapping = mapping;
        Ok(self)
    }

    /// Same system with `num_ttds` contiguous TTD groups.
    pub fn with_num_ttds(self, num_ttds: usize) -> Result<Self> {
        let mapping = TtdMapping::contiguous(self.num_antennas(), num_ttds)?;
        self.with_mapping(mapping)
    }

    /// Same system with a different subcarrier count; the power budget is
    /// rescaled so that the per-subcarrier budget is preserved.
    pub fn with_num_subcarriers(mut self, num_subcarriers: usize) -> Result<Self> {
        let per_subcarrier = self.total_power / self.num_subcarriers as f64;
        self.num_subcarriers = num_subcarriers;
        self.total_power = per_subcarrier * num_subcarriers as f64;
        self.validate()?;
        Ok(self)
    }

    fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(JptaError::InvalidConfig(msg));
        if self.num_subcarriers == 0 {
            return bad("number of subcarriers must be positive".into());
        }
        if !(self.bandwidth.is_finite() && self.bandwidth > 0.0) {
            return bad(format!("bandwidth must be positive, got {}", self.bandwidth));
        }
        if !(self.carrier_freq.is_finite() && self.carrier_freq > self.bandwidth / 2.0) {
            return bad(format!(
                "carrier frequency {} must exceed half the bandwidth",
                self.carrier_freq
            ));
        }
        if !(self.delay_range.is_finite() && self.delay_range >= 0.0) {
            return bad(format!("delay range must be nonnegative, got {}", self.delay_range));
        }
        if !(self.total_power.is_finite() && self.total_power > 0.0) {
            return bad(format!("total power must be positive, got {}", self.total_power));
        }
        Ok(())
    }

    pub fn num_antennas(&self) -> usize {
        self.mapping.num_antennas()
    }

    pub fn num_ttds(&self) -> usize {
        self.mapping.num_ttds()
    }

    pub fn carrier_freq(&self) -> f64 {
        self.carrier_freq
    }

    pub fn bandwidth(&self) -> f64 {
        self.bandwidth
    }

    pub fn num_subcarriers(&self) -> usize {
        self.num_subcarriers
    }

    /// Dimensionless kappa.
    pub fn delay_range(&self) -> f64 {
        self.delay_range
    }

    /// Largest realizable delay, `kappa / W` seconds.
    pub fn max_delay(&self) -> f64 {
        self.delay_range / self.bandwidth
    }

    /// Half-width of the centered delay search interval, `kappa / (2W)`.
    pub fn half_delay_range(&self) -> f64 {
        0.5 * self.max_delay()
    }

    pub fn total_power(&self) -> f64 {
        self.total_power
    }

    pub fn mapping(&self) -> &TtdMapping {
        &self.mapping
    }
}

/// OFDM subcarrier indices `floor((1-K)/2) ..= floor((K-1)/2)` and their
/// absolute frequencies `f_k = f0 + k W / K`.
#[derive(Debug, Clone, PartialEq)]
pub struct SubcarrierGrid {
    first: i64,
    carrier_freq: f64,
    offsets: Vec<f64>,
    freqs: Vec<f64>,
}

impl SubcarrierGrid {
    pub fn new(config: &SystemConfig) -> Self {
        let k = config.num_subcarriers() as i64;
        let first = (1 - k).div_euclid(2);
        let spacing = config.bandwidth() / k as f64;
        let f0 = config.carrier_freq();
        let offsets: Vec<f64> = (0..k).map(|p| (first + p) as f64 * spacing).collect();
        let freqs = offsets.iter().map(|o| f0 + o).collect();
        Self {
            first,
            carrier_freq: f0,
            offsets,
            freqs,
        }
    }

    pub fn len(&self) -> usize {
        self.freqs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.freqs.is_empty()
    }

    pub fn first_index(&self) -> i64 {
        self.first
    }

    pub fn last_index(&self) -> i64 {
        self.first + self.len() as i64 - 1
    }

    /// Subcarrier index at storage position `pos`.
    pub fn index(&self, pos: usize) -> i64 {
        self.first + pos as i64
    }

    pub fn indices(&self) -> impl Iterator<Item = i64> + '_ {
        (0..self.len()).map(move |p| self.index(p))
    }

    /// Storage position of subcarrier index `k`.
    pub fn position(&self, k: i64) -> Result<usize> {
        if k < self.first || k > self.last_index() {
            return Err(JptaError::SubcarrierOutOfRange(k));
        }
        Ok((k - self.first) as usize)
    }

    pub fn frequency(&self, pos: usize) -> f64 {
        self.freqs[pos]
    }

    /// `f_k - f0` at storage position `pos`.
    pub fn offset(&self, pos: usize) -> f64 {
        self.offsets[pos]
    }

    pub fn frequencies(&self) -> &[f64] {
        &self.freqs
    }

    pub fn offsets(&self) -> &[f64] {
        &self.offsets
    }

    pub fn carrier_freq(&self) -> f64 {
        self.carrier_freq
    }

    /// `f_k / f0` at storage position `pos`.
    pub fn ratio(&self, pos: usize) -> f64 {
        1.0 + self.offsets[pos] / self.carrier_freq
    }

    /// Frequency of the lowest subcarrier.
    pub fn f_min(&self) -> f64 {
        self.freqs[0]
    }

    /// Frequency of the highest subcarrier.
    pub fn f_max(&self) -> f64 {
        self.freqs[self.len() - 1]
    }

    /// Phase `2 pi f_k tau` of a delay `tau` at position `pos`, reduced
    /// before the carrier term is multiplied out to keep precision.
    pub fn delay_phase(&self, pos: usize, tau: f64) -> f64 {
        let carrier_cycles = (self.carrier_freq * tau).rem_euclid(1.0);
        2.0 * PI * (carrier_cycles + self.offsets[pos] * tau)
    }
}

/// Steering angle in radians, restricted to `[-pi/2, pi/2]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct SteeringAngle(f64);

impl SteeringAngle {
    pub fn new(theta: f64) -> Result<Self> {
        Self::checked(theta, "theta")
    }

    pub(crate) fn checked(theta: f64, field: &'static str) -> Result<Self> {
        // allow a few ulps of slack so that pi/2 built from sums still passes
        if !theta.is_finite() || theta.abs() > FRAC_PI_2 * (1.0 + 1e-12) {
            return Err(JptaError::AngleOutOfRange {
                field,
                value: theta,
            });
        }
        Ok(Self(theta.clamp(-FRAC_PI_2, FRAC_PI_2)))
    }

    pub fn from_degrees(deg: f64) -> Result<Self> {
        Self::new(deg.to_radians())
    }

    pub fn radians(self) -> f64 {
        self.0
    }

    pub fn degrees(self) -> f64 {
        self.0.to_degrees()
    }
}

/// Steering vector for `num_antennas` elements at frequency ratio `f/f0`.
pub fn steering_vector(num_antennas: usize, freq_ratio: f64, theta: f64) -> Vec<Complex64> {
    let step = PI * theta.sin() * freq_ratio;
    (0..num_antennas)
        .map(|m| Complex64::from_polar(1.0, m as f64 * step))
        .collect()
}

/// Array response `a_k(theta)` at subcarrier index `k`.
pub fn array_response(
    config: &SystemConfig,
    grid: &SubcarrierGrid,
    k: i64,
    theta: SteeringAngle,
) -> Result<Vec<Complex64>> {
    let pos = grid.position(k)?;
    Ok(steering_vector(
        config.num_antennas(),
        grid.ratio(pos),
        theta.radians(),
    ))
}

pub(crate) fn check_beamformer(config: &SystemConfig, bf: &JptaBeamformer) -> Result<()> {
    if bf.delays().len() != config.num_ttds() {
        return Err(JptaError::DimensionMismatch {
            what: "delays",
            expected: config.num_ttds(),
            actual: bf.delays().len(),
        });
    }
    if bf.phases().len() != config.num_antennas() {
        return Err(JptaError::DimensionMismatch {
            what: "phases",
            expected: config.num_antennas(),
            actual: bf.phases().len(),
        });
    }
    Ok(())
}

/// Unit-norm analog beam `T P d_k` at storage position `pos` for raw
/// delay/phase settings.
pub(crate) fn analog_beam(
    config: &SystemConfig,
    grid: &SubcarrierGrid,
    delays: &[f64],
    phases: &[f64],
    pos: usize,
) -> Vec<Complex64> {
    let scale = 1.0 / (config.num_antennas() as f64).sqrt();
    let ttd_phase: Vec<f64> = delays.iter().map(|&t| grid.delay_phase(pos, t)).collect();
    let mapping = config.mapping();
    phases
        .iter()
        .enumerate()
        .map(|(m, &phi)| Complex64::from_polar(scale, phi - ttd_phase[mapping.ttd_of(m)]))
        .collect()
}

/// Effective analog beamformer `T P d_k` of a JPTA design at subcarrier `k`.
pub fn effective_beamformer(
    config: &SystemConfig,
    grid: &SubcarrierGrid,
    bf: &JptaBeamformer,
    k: i64,
) -> Result<Vec<Complex64>> {
    check_beamformer(config, bf)?;
    let pos = grid.position(k)?;
    Ok(analog_beam(config, grid, bf.delays(), bf.phases(), pos))
}

/// Effective analog beams for every subcarrier, in ascending index order.
pub fn effective_beams(
    config: &SystemConfig,
    grid: &SubcarrierGrid,
    bf: &JptaBeamformer,
) -> Result<Vec<Vec<Complex64>>> {
    check_beamformer(config, bf)?;
    Ok((0..grid.len())
        .into_par_iter()
        .map(|pos| analog_beam(config, grid, bf.delays(), bf.phases(), pos))
        .collect())
}

/// `a^H w`.
pub fn inner(a: &[Complex64], w: &[Complex64]) -> Complex64 {
    a.iter().zip(w).map(|(a, w)| a.conj() * w).sum()
}

pub fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Array gain `|a_k(theta)^H w_k|^2`.
pub fn array_gain(
    config: &SystemConfig,
    grid: &SubcarrierGrid,
    w: &[Complex64],
    k: i64,
    theta: SteeringAngle,
) -> Result<f64> {
    if w.len() != config.num_antennas() {
        return Err(JptaError::DimensionMismatch {
            what: "beamformer length",
            expected: config.num_antennas(),
            actual: w.len(),
        });
    }
    let a = array_response(config, grid, k, theta)?;
    Ok(inner(&a, w).norm_sqr())
}

/// Angles from -90 to 90 degrees in 1 degree steps, in radians.
pub fn default_theta_grid() -> Vec<f64> {
    (-90..=90).map(|d| (d as f64).to_radians()).collect()
}

/// Array gain sampled on subcarriers x angles, stored row-major by subcarrier.
#[derive(Debug, Clone, PartialEq)]
pub struct GainMap {
    indices: Vec<i64>,
    freqs: Vec<f64>,
    thetas: Vec<f64>,
    gains: Vec<f64>,
}

impl GainMap {
    pub fn num_rows(&self) -> usize {
        self.indices.len()
    }

    pub fn num_cols(&self) -> usize {
        self.thetas.len()
    }

    pub fn indices(&self) -> &[i64] {
        &self.indices
    }

    pub fn frequencies(&self) -> &[f64] {
        &self.freqs
    }

    pub fn thetas(&self) -> &[f64] {
        &self.thetas
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.gains[row * self.num_cols() + col]
    }

    pub fn row(&self, row: usize) -> &[f64] {
        let c = self.num_cols();
        &self.gains[row * c..(row + 1) * c]
    }

    /// Column of the largest gain in `row`; the first one wins ties.
    pub fn row_argmax(&self, row: usize) -> usize {
        let mut best = 0;
        for (c, &g) in self.row(row).iter().enumerate() {
            if g > self.row(row)[best] {
                best = c;
            }
        }
        best
    }

    pub fn max_gain(&self) -> f64 {
        self.gains.iter().copied().fold(0.0, f64::max)
    }
}

/// Gain of each subcarrier's beam over a set of angles.
///
/// `beams` holds one length-M vector per subcarrier in ascending index order.
pub fn gain_map(
    config: &SystemConfig,
    grid: &SubcarrierGrid,
    beams: &[Vec<Complex64>],
    thetas: &[f64],
) -> Result<GainMap> {
    if thetas.is_empty() {
        return Err(JptaError::EmptyAngleGrid);
    }
    if beams.len() != grid.len() {
        return Err(JptaError::DimensionMismatch {
            what: "beam set size",
            expected: grid.len(),
            actual: beams.len(),
        });
    }
    let m = config.num_antennas();
    if let Some(bad) = beams.iter().find(|b| b.len() != m) {
        return Err(JptaError::DimensionMismatch {
            what: "beamformer length",
            expected: m,
            actual: bad.len(),
        });
    }
    for &t in thetas {
        SteeringAngle::new(t)?;
    }
    let gains: Vec<f64> = (0..grid.len())
        .into_par_iter()
        .flat_map_iter(|pos| {
            let ratio = grid.ratio(pos);
            let w = &beams[pos];
            thetas.iter().map(move |&t| {
                let a = steering_vector(m, ratio, t);
                inner(&a, w).norm_sqr()
            })
        })
        .collect();
    Ok(GainMap {
        indices: grid.indices().collect(),
        freqs: grid.frequencies().to_vec(),
        thetas: thetas.to_vec(),
        gains,
    })
}

/// Gain in dB with a floor of -100 dB.
pub fn to_db(gain: f64) -> f64 {
    if gain <= 1e-10 {
        -100.0
    } else {
        10.0 * gain.log10()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(m: usize, n: usize, k: usize) -> (SystemConfig, SubcarrierGrid) {
        let cfg = SystemConfig::new(m, n, 100e9, 10e9, k, m as f64).unwrap();
        let grid = SubcarrierGrid::new(&cfg);
        (cfg, grid)
    }

    #[test]
    fn reference_grid_edges() {
        let cfg = SystemConfig::reference_preset();
        let grid = SubcarrierGrid::new(&cfg);
        assert_eq!(grid.len(), 2048);
        assert_eq!(grid.first_index(), -1024);
        assert_eq!(grid.last_index(), 1023);
        assert!((grid.f_min() - 95e9).abs() < 1e-3);
        assert_eq!(grid.frequency(grid.position(0).unwrap()), 100e9);
        let expected_max = 100e9 + 10e9 * 1023.0 / 2048.0;
        assert!((grid.f_max() - expected_max).abs() < 1e-3);
        assert!((grid.f_max() - 104.9951e9).abs() < 1e5);
    }

    #[test]
    fn degenerate_and_tiny_grids() {
        let cfg = SystemConfig::new(1, 1, 7.0, 3.0, 1, 0.0).unwrap();
        let grid = SubcarrierGrid::new(&cfg);
        assert_eq!(grid.indices().collect::<Vec<_>>(), vec![0]);
        assert_eq!(grid.frequency(0), 7.0);

        let cfg = SystemConfig::new(1, 1, 10.0, 4.0, 4, 0.0).unwrap();
        let grid = SubcarrierGrid::new(&cfg);
        assert_eq!(grid.indices().collect::<Vec<_>>(), vec![-2, -1, 0, 1]);
        assert_eq!(grid.frequencies(), &[8.0, 9.0, 10.0, 11.0]);

        let cfg = SystemConfig::new(1, 1, 10.0, 3.0, 3, 0.0).unwrap();
        let grid = SubcarrierGrid::new(&cfg);
        assert_eq!(grid.indices().collect::<Vec<_>>(), vec![-1, 0, 1]);
    }

    #[test]
    fn config_validation() {
        assert!(SystemConfig::new(64, 3, 100e9, 10e9, 8, 1.0).is_err());
        assert!(SystemConfig::new(4, 8, 100e9, 10e9, 8, 1.0).is_err());
        assert!(SystemConfig::new(4, 2, 4e9, 10e9, 8, 1.0).is_err());
        assert!(SystemConfig::new(4, 2, 100e9, 0.0, 8, 1.0).is_err());
        assert!(SystemConfig::new(4, 2, 100e9, 10e9, 8, -1.0).is_err());
        assert!(SystemConfig::new(4, 2, 100e9, 10e9, 0, 1.0).is_err());
        let cfg = SystemConfig::new(4, 2, 100e9, 10e9, 8, 1.0).unwrap();
        assert_eq!(cfg.total_power(), 8.0);
    }

    #[test]
    fn mapping_validation() {
        assert!(TtdMapping::from_groups(4, vec![vec![0, 1], vec![1, 2, 3]]).is_err());
        assert!(TtdMapping::from_groups(4, vec![vec![0, 1], vec![2]]).is_err());
        assert!(TtdMapping::from_groups(4, vec![vec![0, 1, 2, 3], vec![]]).is_err());
        let mapping = TtdMapping::from_groups(4, vec![vec![3, 0], vec![1, 2]]).unwrap();
        assert_eq!(mapping.ttd_of(3), 0);
        assert_eq!(mapping.ttd_of(2), 1);
        let contiguous = TtdMapping::contiguous(8, 4).unwrap();
        assert_eq!(contiguous.group(2), &[4, 5]);
    }

    #[test]
    fn broadside_response_is_all_ones() {
        let (cfg, grid) = small(8, 8, 16);
        for k in grid.indices() {
            let a = array_response(&cfg, &grid, k, SteeringAngle::new(0.0).unwrap()).unwrap();
            assert!(a.iter().all(|z| (z - Complex64::new(1.0, 0.0)).norm() < 1e-15));
        }
    }

    #[test]
    fn endfire_two_element_response() {
        let (cfg, grid) = small(2, 2, 4);
        let a = array_response(&cfg, &grid, 0, SteeringAngle::new(FRAC_PI_2).unwrap()).unwrap();
        assert!((a[0] - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        assert!((a[1] - Complex64::new(-1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn response_phases_at_quarter_band() {
        let (cfg, grid) = small(4, 4, 8);
        let k = 2; // K/4
        let theta = PI / 6.0;
        let a = array_response(&cfg, &grid, k, SteeringAngle::new(theta).unwrap()).unwrap();
        let w_over_f0 = cfg.bandwidth() / cfg.carrier_freq();
        for (m, z) in a.iter().enumerate() {
            let expected = m as f64 * PI * 0.5 * (1.0 + w_over_f0 / 4.0);
            assert!((z - Complex64::from_polar(1.0, expected)).norm() < 1e-12);
        }
    }

    #[test]
    fn response_rejects_unknown_subcarrier() {
        let (cfg, grid) = small(4, 4, 8);
        let err = array_response(&cfg, &grid, 4, SteeringAngle::new(0.1).unwrap());
        assert!(matches!(err, Err(JptaError::SubcarrierOutOfRange(4))));
        assert!(SteeringAngle::new(1.6).is_err());
    }

    #[test]
    fn identity_settings_give_uniform_beam() {
        let (cfg, grid) = small(4, 2, 8);
        let bf = JptaBeamformer::new(vec![0.0; 2], vec![0.0; 4], vec![Complex64::new(1.0, 0.0); 8]);
        for k in grid.indices() {
            let w = effective_beamformer(&cfg, &grid, &bf, k).unwrap();
            for z in &w {
                assert!((z - Complex64::new(0.5, 0.0)).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn scalar_beamformer() {
        let (cfg, grid) = small(1, 1, 8);
        let (t, p) = (3.7e-11, 0.4);
        let bf = JptaBeamformer::new(vec![t], vec![p], vec![Complex64::new(1.0, 0.0); 8]);
        for k in grid.indices() {
            let pos = grid.position(k).unwrap();
            let w = effective_beamformer(&cfg, &grid, &bf, k).unwrap();
            let expected = Complex64::from_polar(1.0, p - 2.0 * PI * grid.frequency(pos) * t);
            assert!((w[0] - expected).norm() < 1e-9);
        }
    }

    #[test]
    fn matched_gain_equals_antenna_count() {
        let (cfg, grid) = small(64, 64, 16);
        let theta = SteeringAngle::new(0.3).unwrap();
        let a = array_response(&cfg, &grid, 3, theta).unwrap();
        let w: Vec<_> = a.iter().map(|z| z / 8.0).collect();
        let g = array_gain(&cfg, &grid, &w, 3, theta).unwrap();
        assert!((g - 64.0).abs() < 1e-10);
        assert!((to_db(g) - 18.0618).abs() < 1e-3);
    }

    #[test]
    fn orthogonal_beam_has_zero_gain() {
        let (cfg, grid) = small(2, 2, 4);
        let theta = SteeringAngle::new(0.0).unwrap();
        let w = vec![Complex64::new(0.5f64.sqrt(), 0.0), Complex64::new(-(0.5f64.sqrt()), 0.0)];
        assert!(array_gain(&cfg, &grid, &w, 0, theta).unwrap() < 1e-30);
    }

    #[test]
    fn gain_map_single_cell() {
        let cfg = SystemConfig::new(4, 4, 10.0, 2.0, 1, 1.0).unwrap();
        let grid = SubcarrierGrid::new(&cfg);
        let theta = SteeringAngle::new(0.2).unwrap();
        let w: Vec<_> = (0..4).map(|m| Complex64::from_polar(0.5, 0.3 * m as f64)).collect();
        let map = gain_map(&cfg, &grid, std::slice::from_ref(&w), &[0.2]).unwrap();
        assert_eq!((map.num_rows(), map.num_cols()), (1, 1));
        let direct = array_gain(&cfg, &grid, &w, 0, theta).unwrap();
        assert_eq!(map.get(0, 0), direct);
        assert!(matches!(
            gain_map(&cfg, &grid, &[w], &[]),
            Err(JptaError::EmptyAngleGrid)
        ));
    }

    #[test]
    fn matched_set_peaks_at_steering_angle() {
        let (cfg, grid) = small(64, 64, 32);
        let theta0 = 20f64.to_radians();
        let beams: Vec<_> = (0..grid.len())
            .map(|p| {
                steering_vector(64, grid.ratio(p), theta0)
                    .into_iter()
                    .map(|z| z / 8.0)
                    .collect()
            })
            .collect();
        let thetas = default_theta_grid();
        let map = gain_map(&cfg, &grid, &beams, &thetas).unwrap();
        for row in 0..map.num_rows() {
            assert_eq!(map.row_argmax(row), 110);
        }
    }

    #[test]
    fn flat_steering_squints_at_band_edges() {
        // phase-only steering fixed at the carrier frequency
        let (_, grid) = small(64, 64, 64);
        let theta0 = PI / 6.0;
        let w: Vec<_> = steering_vector(64, 1.0, theta0)
            .into_iter()
            .map(|z| z / 8.0)
            .collect();
        let gain_at = |pos: usize| {
            let a = steering_vector(64, grid.ratio(pos), theta0);
            inner(&a, &w).norm_sqr()
        };
        let center = gain_at(grid.position(0).unwrap());
        let low = gain_at(0);
        let high = gain_at(grid.len() - 1);
        assert!((center - 64.0).abs() < 1e-9);
        assert!(low < center && high < center);
        assert!(low < 0.5 * center);
    }
}
