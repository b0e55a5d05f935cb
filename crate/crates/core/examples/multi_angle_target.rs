//! Three equal bands steered to -40, 0 and 40 degrees.

use jpta::{
    design_jpta, jpta_fit, multi_angle_target, targets::equal_band_starts, DesignOptions, SubcarrierGrid,
    SystemConfig, WeightScheme,
};

fn main() -> jpta::Result<()> {
    let k: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(256);
    let cfg = SystemConfig::reference_preset().with_num_subcarriers(k)?;
    let grid = SubcarrierGrid::new(&cfg);
    let starts = equal_band_starts(&grid, 3);
    let angles: Vec<f64> = [-40.0f64, 0.0, 40.0].iter().map(|d| d.to_radians()).collect();
    let target = multi_angle_target(&cfg, &grid, &starts, &angles, WeightScheme::Uniform)?;

    let (bf, _) = design_jpta(&cfg, &grid, &target, &DesignOptions::default())?;
    println!("band starts {starts:?}");
    println!("F_obj = {:.5}", jpta_fit(&cfg, &grid, &target, &bf)?);
    Ok(())
}
