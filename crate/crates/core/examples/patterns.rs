//! Optimal verification patterns: k checkpoints per verification, or k
//! verifications per checkpoint.

use ckptopt::model::{PlatformParams, YEAR};
use ckptopt::patterns::{optimize_pattern, waste_grid, PatternMode, PatternModel, DEFAULT_K_MAX};

fn main() -> ckptopt::Result<()> {
    let mu = 10.0 * YEAR / 1e5;
    let cases = [
        (PatternMode::VerificationHeavy, 600.0, 20.0),
        (PatternMode::VerificationHeavy, 60.0, 2.0),
        (PatternMode::CheckpointHeavy, 6.0, 100.0),
        (PatternMode::CheckpointHeavy, 60.0, 300.0),
    ];
    for (mode, c, v) in cases {
        let p = PlatformParams::verified(c, c, 0.0, v, 1.0 / mu);
        let best = optimize_pattern(mode, &p, DEFAULT_K_MAX, PatternModel::default())?;
        println!(
            "{mode:?} C = {c} V = {v}: k_opt = {}, S = {:.0} s, waste = {:.4}",
            best.k_opt, best.s_opt, best.waste
        );
        for row in best.table.iter().take(5) {
            println!("  k = {}  S = {:>6.0}  waste = {:.4}", row.k, row.s_opt, row.waste);
        }
    }

    // waste as the verification gets cheaper
    let p = PlatformParams::verified(600.0, 600.0, 0.0, 20.0, 1.0 / mu);
    let grid = waste_grid(
        PatternMode::VerificationHeavy,
        &p,
        1..=8,
        &[5.0, 20.0, 40.0],
        PatternModel::default(),
    )?;
    for g in grid.iter().filter(|g| g.k % 2 == 0) {
        println!("V = {:>4}  k = {}  waste = {:.4}", g.verification_cost, g.k, g.waste);
    }
    Ok(())
}
