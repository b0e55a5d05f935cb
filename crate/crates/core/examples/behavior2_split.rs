//! Split beam: lower half of the band to -45 degrees, upper half to 30.
//! Prints the pointing angle of a few subcarriers before and after the split.

use jpta::{
    array_model::gain_map, behavior2_target, design_jpta, effective_beams, jpta_fit, DesignOptions,
    SubcarrierGrid, SystemConfig, WeightScheme,
};

fn main() -> jpta::Result<()> {
    let k: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(256);
    let cfg = SystemConfig::reference_preset().with_num_subcarriers(k)?;
    let grid = SubcarrierGrid::new(&cfg);
    let target = behavior2_target(&cfg, &grid, (-45f64).to_radians(), 30f64.to_radians(), WeightScheme::Uniform)?;

    let (bf, _) = design_jpta(&cfg, &grid, &target, &DesignOptions::default())?;
    println!("F_obj = {:.5}", jpta_fit(&cfg, &grid, &target, &bf)?);

    let thetas: Vec<f64> = (-900..=900).map(|d| (d as f64 / 10.0).to_radians()).collect();
    let map = gain_map(&cfg, &grid, &effective_beams(&cfg, &grid, &bf)?, &thetas)?;
    let half = grid.len() / 2;
    for row in [0, half / 2, half - 1, half, half + half / 2, grid.len() - 1] {
        let col = map.row_argmax(row);
        println!(
            "k = {:5}: peak at {:6.1} deg, gain {:.1}",
            map.indices()[row],
            thetas[col].to_degrees(),
            map.get(row, col)
        );
    }
    Ok(())
}
