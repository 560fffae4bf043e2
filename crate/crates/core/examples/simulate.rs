//! Monte Carlo runs of the bounded-storage protocol against the analytic
//! makespan and risk.

use ckptopt::exact::expected_makespan_total;
use ckptopt::model::{PlatformParams, WorkloadSpec, DAY};
use ckptopt::risk::{risk_report, BoundedStoragePolicy};
use ckptopt::sim::{simulate, Retention, SimConfig};

fn main() -> ckptopt::Result<()> {
    let p = PlatformParams::latency(60.0, 60.0, 10.0, 1.0 / 30_000.0, 1.0 / 1500.0);
    let wl = WorkloadSpec::new(DAY)?;
    // 50 equal chunks, so the exact model applies without a partial tail
    let n = 50;
    let period = wl.total_work / n as f64 + p.checkpoint_cost;

    // a second error during the latency can be detected first, so the
    // simulated mean sits slightly below the exact one when mu_d / mu_e is large
    let cfg = SimConfig::bounded(period, Retention::Unbounded, wl, p)?
        .with_trials(400_000)
        .with_seed(1);
    let r = simulate(&cfg)?;
    let exact = expected_makespan_total(wl.total_work, n, &p)?;
    println!(
        "unbounded: mean = {:.0} +- {:.0} s, exact = {exact:.0} s ({:+.2}%)",
        r.mean_makespan,
        r.makespan_stderr,
        100.0 * (r.mean_makespan / exact - 1.0)
    );

    for keep in [1, 2, 3] {
        let cfg = SimConfig::bounded(period, Retention::Last(keep), wl, p)?
            .with_trials(20_000)
            .with_seed(1);
        let r = simulate(&cfg)?;
        let bound = risk_report(period, &BoundedStoragePolicy::new(keep, 0.01)?, &wl, &p)?.p_risk;
        println!(
            "keep {keep}: waste = {:.4}, irrecoverable/attempt = {:.4} (+- {:.4}), bound = {bound:.4}",
            r.waste_mean,
            r.irrecoverable_per_attempt(),
            r.irrecoverable_stderr()
        );
    }
    Ok(())
}
