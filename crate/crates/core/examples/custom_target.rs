//! Arbitrary per-subcarrier beams read from the plain-text target format
//! (one subcarrier per line, `re,im` pairs). Here the file is generated: a
//! two-lobe beam whose lobes drift apart across the band.

use std::io::Cursor;

use jpta::{
    array_model::steering_vector, custom_target, design_jpta, jpta_fit, targets::write_target, BeamTarget,
    DesignOptions, SubcarrierGrid, SystemConfig, WeightScheme,
};
use num_complex::Complex64;

fn main() -> jpta::Result<()> {
    let k: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(256);
    let cfg = SystemConfig::new(16, 16, 100e9, 10e9, k, 16.0)?;
    let grid = SubcarrierGrid::new(&cfg);

    let beams: Vec<Vec<Complex64>> = (0..grid.len())
        .map(|pos| {
            let spread = 0.2 + 0.3 * pos as f64 / grid.len() as f64;
            let a = steering_vector(16, grid.ratio(pos), spread);
            let b = steering_vector(16, grid.ratio(pos), -spread);
            a.iter().zip(&b).map(|(x, y)| (x + y) * 0.1).collect()
        })
        .collect();
    let mut text = Vec::new();
    let budget = beams.iter().flatten().map(|z| z.norm_sqr()).sum::<f64>();
    write_target(&BeamTarget::new(beams, WeightScheme::Uniform, budget)?, &mut text)?;

    // rescale: the file ignores the system power budget
    let target = custom_target(&cfg, &grid, Cursor::new(text), WeightScheme::Power, true)?;
    let (bf, _) = design_jpta(&cfg, &grid, &target, &DesignOptions::default())?;
    println!("power-weighted F_obj = {:.5}", jpta_fit(&cfg, &grid, &target, &bf)?);
    Ok(())
}
