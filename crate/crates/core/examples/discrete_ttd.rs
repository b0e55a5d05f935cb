//! Delays restricted to a coarse set of realizable values: design, round to
//! the set, re-optimize the phase shifters.

use jpta::{behavior1_target, design_jpta, jpta_fit, DesignOptions, SubcarrierGrid, SystemConfig, WeightScheme};

fn main() -> jpta::Result<()> {
    let k: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(256);
    let cfg = SystemConfig::reference_preset().with_num_subcarriers(k)?;
    let grid = SubcarrierGrid::new(&cfg);
    let target = behavior1_target(&cfg, &grid, 30f64.to_radians(), 45f64.to_radians(), WeightScheme::Uniform)?;

    let (ideal, _) = design_jpta(&cfg, &grid, &target, &DesignOptions::default())?;
    println!("continuous delays: F_obj = {:.5}", jpta_fit(&cfg, &grid, &target, &ideal)?);
    for levels in [257usize, 65, 17, 5] {
        let set: Vec<f64> = (0..levels)
            .map(|i| cfg.max_delay() * i as f64 / (levels - 1) as f64)
            .collect();
        let opts = DesignOptions {
            discrete_delays: Some(set),
            ..DesignOptions::default()
        };
        let (bf, _) = design_jpta(&cfg, &grid, &target, &opts)?;
        println!("{levels:>3} delay levels:  F_obj = {:.5}", jpta_fit(&cfg, &grid, &target, &bf)?);
    }
    Ok(())
}
