//! Checkpoint periods for a silent-error platform: Young's formula, the
//! first-order optimum with detection latency, and the waste around them.

use ckptopt::exact::period_young;
use ckptopt::firstorder::{period_firstorder, waste_general};
use ckptopt::model::{PlatformParams, MINUTE, YEAR};

fn main() -> ckptopt::Result<()> {
    // 100k components, 100 years each; latency 30x shorter than the MTBF
    let le = 1e5 / (100.0 * YEAR);
    for (name, c) in [("C = R = 10 min", 600.0), ("C = R = 1 min", 60.0)] {
        let p = PlatformParams::latency(c, c, 0.0, le, 30.0 * le);
        let young = period_young(&p)?;
        let t = period_firstorder(&p)?;
        println!(
            "{name}: mu_e = {:.0} s, young = {:.1} min, first-order = {:.1} min",
            p.mu_e(),
            young / MINUTE,
            t / MINUTE
        );

        for factor in [0.5, 1.0, 2.0] {
            let r = waste_general(t * factor, &p)?;
            println!(
                "  T = {:>7.0} s  ff = {:.4}  fail = {:.4}  total = {:.4}{}",
                r.period,
                r.breakdown.waste_ff,
                r.breakdown.waste_fail,
                r.breakdown.waste_total,
                if r.regime.period_small {
                    ""
                } else {
                    "  (outside first-order regime)"
                }
            );
        }
    }
    Ok(())
}
