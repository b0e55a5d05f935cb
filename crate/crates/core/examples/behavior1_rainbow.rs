//! Rainbow beam: steering sweeps linearly from 7.5 to 52.5 degrees across
//! the band. Pass a subcarrier count as the first argument (default 256).

use jpta::{behavior1_target, design_jpta, jpta_fit, DesignOptions, SubcarrierGrid, SystemConfig, WeightScheme};

fn main() -> jpta::Result<()> {
    let k: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(256);
    let cfg = SystemConfig::reference_preset().with_num_subcarriers(k)?;
    let grid = SubcarrierGrid::new(&cfg);
    let target = behavior1_target(&cfg, &grid, 30f64.to_radians(), 45f64.to_radians(), WeightScheme::Uniform)?;

    let (bf, trace) = design_jpta(&cfg, &grid, &target, &DesignOptions::default())?;
    for (i, f) in trace.fit.iter().enumerate() {
        println!("iteration {:2}: F_obj = {f:.5}", i + 1);
    }
    let span = bf.delays().iter().copied().fold(0.0, f64::max);
    println!("final F_obj = {:.5}", jpta_fit(&cfg, &grid, &target, &bf)?);
    println!("largest delay = {:.3} ns (budget {:.3} ns)", span * 1e9, cfg.max_delay() * 1e9);
    Ok(())
}
