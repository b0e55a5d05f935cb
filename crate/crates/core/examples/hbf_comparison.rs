//! Conventional hybrid beamforming (fully and partially connected) against
//! a single-RF-chain JPTA design, versus the number of RF chains.

use jpta::{
    behavior1_target, design_hbf, design_jpta, hbf::fc_warm_sweep, hbf_fit, jpta_fit, min_rf_chains,
    stack_target, DesignOptions, HbfOptions, HbfStructure, SubcarrierGrid, SystemConfig, WeightScheme,
};

fn main() -> jpta::Result<()> {
    let k: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(256);
    let cfg = SystemConfig::reference_preset().with_num_subcarriers(k)?;
    let grid = SubcarrierGrid::new(&cfg);
    let (t0, dt) = (30f64.to_radians(), 45f64.to_radians());
    let target = behavior1_target(&cfg, &grid, t0, dt, WeightScheme::Uniform)?;

    let (jpta_bf, _) = design_jpta(&cfg, &grid, &target, &DesignOptions::default())?;
    let reference = jpta_fit(&cfg, &grid, &target, &jpta_bf)?;
    let (r_fc, r_pc) = min_rf_chains(&cfg, &grid, t0, dt);
    println!("JPTA (1 RF chain): F_obj = {reference:.4}; minimum RF chains FC {r_fc}, PC {r_pc}");

    let b = stack_target(&target);
    let n_rf = [1, 2, 4, 8, 16, 32];
    let opts = HbfOptions::default();
    let fc = fc_warm_sweep(&b, &n_rf, &opts)?;
    for (bf, &n) in fc.iter().zip(&n_rf) {
        let pc = design_hbf(&b, HbfStructure::PartiallyConnected, n, &opts)?;
        println!(
            "N_RF = {n:2}: FC {:.4}  PC {:.4}",
            hbf_fit(&target, bf)?,
            hbf_fit(&target, &pc)?
        );
    }
    Ok(())
}
