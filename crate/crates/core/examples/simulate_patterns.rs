use ckptopt::model::{PlatformParams, WorkloadSpec, DAY};
use ckptopt::patterns::{optimize_pattern, pattern_waste, PatternMode, PatternModel, VerifiedFailureModel};
use ckptopt::sim::{simulate, SimConfig};

fn main() -> ckptopt::Result<()> {
    let p = PlatformParams::verified(60.0, 60.0, 0.0, 20.0, 1.0 / 50_000.0);
    let wl = WorkloadSpec::new(5.0 * DAY)?;
    let averaged = PatternModel {
        verified_failure: VerifiedFailureModel::SegmentAverage,
        ..PatternModel::default()
    };

    for mode in [PatternMode::CheckpointHeavy, PatternMode::VerificationHeavy] {
        let best = optimize_pattern(mode, &p, 20, PatternModel::default())?;
        let spec = best.spec();
        let r = simulate(&SimConfig::pattern(spec, wl, p)?.with_trials(4000).with_seed(3))?;
        println!(
            "{mode:?} k = {} S = {:.0}: simulated {:.4} +- {:.4}, published {:.4}, segment-average {:.4}",
            spec.k,
            spec.period,
            r.waste_mean,
            r.waste_stderr,
            pattern_waste(&spec, &p, PatternModel::default())?.waste_total,
            pattern_waste(&spec, &p, averaged)?.waste_total,
        );
    }
    Ok(())
}
