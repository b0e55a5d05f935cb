//! Writes the designed rainbow beam's gain over frequency and angle as CSV
//! (k, f_hz, theta_deg, gain_linear, gain_db) to the path in the second
//! argument, or stdout.

use std::io::Write;

use jpta::{
    behavior1_target, design_jpta, effective_beams, experiment::io::write_gain_map, gain_map, DesignOptions,
    SubcarrierGrid, SystemConfig, WeightScheme,
};

fn main() -> jpta::Result<()> {
    let mut args = std::env::args().skip(1);
    let k: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(256);
    let cfg = SystemConfig::reference_preset().with_num_subcarriers(k)?;
    let grid = SubcarrierGrid::new(&cfg);
    let target = behavior1_target(&cfg, &grid, 30f64.to_radians(), 45f64.to_radians(), WeightScheme::Uniform)?;
    let (bf, _) = design_jpta(&cfg, &grid, &target, &DesignOptions::default())?;

    let thetas = jpta::default_theta_grid();
    let map = gain_map(&cfg, &grid, &effective_beams(&cfg, &grid, &bf)?, &thetas)?;
    let out: Box<dyn Write> = match args.next() {
        Some(path) => Box::new(std::fs::File::create(path)?),
        None => Box::new(std::io::stdout().lock()),
    };
    write_gain_map(&map, "rainbow beam, 30 +- 22.5 deg", out)?;
    eprintln!("peak gain {:.2} dB", jpta::to_db(map.max_gain()));
    Ok(())
}
