//! Risk of an irrecoverable failure when only the last few checkpoints are
//! kept, and the shortest period that keeps it below a threshold.

use ckptopt::model::{PlatformParams, WorkloadSpec, DAY, YEAR};
use ckptopt::risk::{risk_report, solve_t_min, BoundedStoragePolicy};

fn main() -> ckptopt::Result<()> {
    let le = 1e5 / (100.0 * YEAR);
    let p = PlatformParams::latency(600.0, 600.0, 0.0, le, 30.0 * le);
    let wl = WorkloadSpec::new(10.0 * DAY)?;

    for keep in 1..=4 {
        let policy = BoundedStoragePolicy::new(keep, 1e-4)?;
        print!("keep = {keep}:");
        for t in [2000.0, 4000.0, 6000.0, 8000.0, 12_000.0] {
            let r = risk_report(t, &policy, &wl, &p)?;
            print!("  T={t:.0} p_risk={:.2e}", r.p_risk);
        }
        println!();
        match solve_t_min(&policy, &wl, &p) {
            Ok(s) => println!(
                "  t_min = {:.0} s, t_opt = {:.0} s, recommended = {:.0} s",
                s.t_min, s.t_opt, s.recommended
            ),
            Err(e) => println!("  {e}"),
        }
    }
    Ok(())
}
