//! The two TTD update rules side by side: fit and wall time.

use std::time::Instant;

use jpta::{behavior1_target, design_jpta, jpta_fit, DesignOptions, SubcarrierGrid, SystemConfig, WeightScheme};

fn main() -> jpta::Result<()> {
    let k: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(256);
    let cfg = SystemConfig::reference_preset().with_num_subcarriers(k)?;
    let grid = SubcarrierGrid::new(&cfg);
    let target = behavior1_target(&cfg, &grid, 30f64.to_radians(), 45f64.to_radians(), WeightScheme::Uniform)?;

    for (name, opts) in [("line search", DesignOptions::default()), ("wLS", DesignOptions::wls())] {
        let start = Instant::now();
        let (bf, _) = design_jpta(&cfg, &grid, &target, &opts)?;
        let secs = start.elapsed().as_secs_f64();
        println!("{name:>11}: F_obj = {:.5} in {secs:.3} s", jpta_fit(&cfg, &grid, &target, &bf)?);
    }
    Ok(())
}
