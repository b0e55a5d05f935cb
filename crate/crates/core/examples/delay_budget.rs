//! How much TTD range a rainbow beam needs: F_obj versus kappa next to the
//! two analytic budgets.

use jpta::{behavior1_target, design_jpta, jpta_fit, DesignOptions, SubcarrierGrid, SystemConfig, WeightScheme};

fn main() -> jpta::Result<()> {
    let k: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(256);
    let base = SystemConfig::reference_preset().with_num_subcarriers(k)?;
    let (t0, dt) = (30f64.to_radians(), 45f64.to_radians());
    let m = base.num_antennas() as f64;
    println!(
        "M|sin(dtheta/2)| = {:.1}, M sin(dtheta) = {:.1}",
        m * (dt / 2.0).sin(),
        m * dt.sin()
    );
    for kappa in [0.0, 8.0, 16.0, 24.0, 32.0, 40.0, 48.0, 64.0] {
        let cfg = base.clone().with_delay_range(kappa)?;
        let grid = SubcarrierGrid::new(&cfg);
        let target = behavior1_target(&cfg, &grid, t0, dt, WeightScheme::Uniform)?;
        let (bf, _) = design_jpta(&cfg, &grid, &target, &DesignOptions::default())?;
        println!("kappa = {kappa:4}: F_obj = {:.4}", jpta_fit(&cfg, &grid, &target, &bf)?);
    }
    Ok(())
}
