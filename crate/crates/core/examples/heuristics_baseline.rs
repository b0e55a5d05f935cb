//! Closed-form heuristic designs versus the alternating optimization, per
//! TTD count.

use jpta::{
    behavior1_target, behavior2_target, design_jpta, heuristic_behavior1, heuristic_behavior2, jpta_fit,
    required_delay_budget, DesignOptions, HeuristicParams, SubcarrierGrid, SystemConfig, WeightScheme,
};

fn main() -> jpta::Result<()> {
    let k: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(256);
    let base = SystemConfig::reference_preset().with_num_subcarriers(k)?;
    let (t0, dt) = (30f64.to_radians(), 45f64.to_radians());
    let (t1, t2) = ((-45f64).to_radians(), 30f64.to_radians());

    println!(
        "delay budgets: behavior 1 {:.3} ns, behavior 2 {:.3} ns",
        required_delay_budget(&HeuristicParams::behavior1(t0, dt), &base) * 1e9,
        required_delay_budget(&HeuristicParams::behavior2(t1, t2), &base) * 1e9
    );
    println!("{:>3}  {:>9} {:>9}  {:>9} {:>9}", "N", "b1 heur", "b1 alg", "b2 heur", "b2 alg");
    for n in [1, 4, 16, 64] {
        let cfg = base.clone().with_num_ttds(n)?;
        let grid = SubcarrierGrid::new(&cfg);
        let b1 = behavior1_target(&cfg, &grid, t0, dt, WeightScheme::Uniform)?;
        let b2 = behavior2_target(&cfg, &grid, t1, t2, WeightScheme::Uniform)?;
        let h1 = heuristic_behavior1(&cfg, &grid, t0, dt, true)?;
        let h2 = heuristic_behavior2(&cfg, &grid, t1, t2, false, true)?;
        let (a1, _) = design_jpta(&cfg, &grid, &b1, &DesignOptions::default())?;
        let (a2, _) = design_jpta(&cfg, &grid, &b2, &DesignOptions::default())?;
        println!(
            "{n:>3}  {:>9.4} {:>9.4}  {:>9.4} {:>9.4}",
            jpta_fit(&cfg, &grid, &b1, &h1.beamformer)?,
            jpta_fit(&cfg, &grid, &b1, &a1)?,
            jpta_fit(&cfg, &grid, &b2, &h2.beamformer)?,
            jpta_fit(&cfg, &grid, &b2, &a2)?
        );
    }
    Ok(())
}
