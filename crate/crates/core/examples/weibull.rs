//! Non-memoryless laws: the risk formulas evaluated through CDFs, and the
//! simulator driven by Weibull errors of the same mean.

use ckptopt::model::{DistributionSpec, LawRole, PlatformParams, WorkloadSpec, DAY};
use ckptopt::risk::{risk_report_with_laws, BoundedStoragePolicy};
use ckptopt::sim::{simulate, Retention, SimConfig};

fn main() -> ckptopt::Result<()> {
    let (mu_e, mu_d) = (20_000.0, 2000.0);
    let p = PlatformParams::latency(60.0, 60.0, 0.0, 1.0 / mu_e, 1.0 / mu_d);
    let wl = WorkloadSpec::new(DAY)?;
    let policy = BoundedStoragePolicy::new(2, 0.01)?;
    let period = 2400.0;

    for shape in [0.5, 0.7, 1.0, 1.5] {
        let err = DistributionSpec::weibull_with_mean(mu_e, shape, LawRole::ErrorArrival)?;
        let det = DistributionSpec::weibull_with_mean(mu_d, shape, LawRole::DetectionLatency)?;
        let risk = risk_report_with_laws(period, &policy, &wl, &p, &err, &det)?;

        let mut cfg = SimConfig::bounded(period, Retention::Last(policy.keep), wl, p)?
            .with_trials(5000)
            .with_seed(4);
        cfg.error_law = err;
        cfg.detection_law = Some(det);
        let r = simulate(&cfg)?;
        println!(
            "shape {shape}: p_risk = {:.4}, simulated irrecoverable = {:.4}, waste = {:.4}",
            risk.p_risk,
            r.irrecoverable_per_attempt(),
            r.waste_mean
        );
    }
    Ok(())
}
