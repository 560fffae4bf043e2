//! Irrecoverable-failure risk when only the `k` most recent checkpoints are
//! retained, and the smallest period that keeps this risk under a threshold.
//!
//! A job of work `W` run with period `T` is treated as `n = W / (T - C)`
//! chunks; `n` is kept fractional.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::period_young;
use crate::firstorder::period_firstorder;
use crate::model::{validate_params, DistributionSpec, LawRole, ModelFamily, PlatformParams, WorkloadSpec};

/// Attached to reports computed from non-Exponential laws.
pub const NON_MEMORYLESS_NOTE: &str =
    "exact only for Exponential laws (memoryless); an approximation for other distributions";

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundedStoragePolicy {
    /// Number of checkpoints kept.
    pub keep: u32,
    /// Acceptable probability of an irrecoverable failure over the whole run.
    pub epsilon: f64,
}

impl BoundedStoragePolicy {
    pub fn new(keep: u32, epsilon: f64) -> Result<Self> {
        if keep == 0 {
            return Err(Error::Domain("at least one checkpoint must be kept".into()));
        }
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(Error::Domain(format!("epsilon must lie in (0, 1), got {epsilon}")));
        }
        Ok(BoundedStoragePolicy { keep, epsilon })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RiskReport {
    pub period: f64,
    pub p_fail: f64,
    /// Upper bound on the probability that detection comes too late.
    pub p_lat: f64,
    pub p_irrec: f64,
    pub p_risk: f64,
    pub expected_executions: f64,
    /// Fractional chunk count W / (T - C).
    pub chunks: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<&'static str>,
}

/// Probability that an error strikes within a period (Exponential errors).
pub fn p_fail(period: f64, params: &PlatformParams) -> f64 {
    if period <= 0.0 {
        return 0.0;
    }
    -(-params.error_rate * period).exp_m1()
}

/// Upper bound P(X_d >= (k-1) T) on late detection (Exponential latency).
pub fn p_lat(period: f64, keep: u32, params: &PlatformParams) -> Result<f64> {
    let rate = params.require_mu_d().map(|m| 1.0 / m)?;
    if keep == 0 {
        return Err(Error::Domain("at least one checkpoint must be kept".into()));
    }
    Ok((-rate * f64::from(keep - 1) * period).exp())
}

fn assemble(period: f64, chunks: f64, pf: f64, pl: f64, note: Option<&'static str>) -> RiskReport {
    let denom = 1.0 - pf * (1.0 - pl);
    let p_irrec = if denom > 0.0 {
        (pf * pl / denom).clamp(0.0, 1.0)
    } else {
        1.0
    };
    // 1 - (1 - p)^n without cancellation
    let p_risk = if p_irrec >= 1.0 {
        1.0
    } else {
        (-(chunks * (-p_irrec).ln_1p()).exp_m1()).clamp(0.0, 1.0)
    };
    RiskReport {
        period,
        p_fail: pf,
        p_lat: pl,
        p_irrec,
        p_risk,
        expected_executions: 1.0 / (1.0 - p_risk),
        chunks,
        note,
    }
}

fn chunk_count(period: f64, workload: &WorkloadSpec, params: &PlatformParams) -> Result<f64> {
    let c = params.checkpoint_cost;
    if !(period > c) {
        return Err(Error::Domain(format!(
            "period must exceed checkpoint cost (T = {period}, C = {c})"
        )));
    }
    Ok(workload.total_work / (period - c))
}

/// Full risk breakdown at period `period` (Exponential laws).
pub fn risk_report(
    period: f64,
    policy: &BoundedStoragePolicy,
    workload: &WorkloadSpec,
    params: &PlatformParams,
) -> Result<RiskReport> {
    validate_params(params, ModelFamily::LatencyDetection)?;
    let n = chunk_count(period, workload, params)?;
    let pf = p_fail(period, params);
    let pl = p_lat(period, policy.keep, params)?;
    Ok(assemble(period, n, pf, pl, None))
}

/// Risk breakdown using arbitrary error and latency laws through their CDF
/// and survival functions.
pub fn risk_report_with_laws(
    period: f64,
    policy: &BoundedStoragePolicy,
    workload: &WorkloadSpec,
    params: &PlatformParams,
    error_law: &DistributionSpec,
    detection_law: &DistributionSpec,
) -> Result<RiskReport> {
    if error_law.role != LawRole::ErrorArrival || detection_law.role != LawRole::DetectionLatency {
        return Err(Error::Domain("laws passed with mismatched roles".into()));
    }
    validate_params(params, ModelFamily::Any)?;
    let n = chunk_count(period, workload, params)?;
    let pf = error_law.cdf(period);
    let pl = detection_law.survival(f64::from(policy.keep.saturating_sub(1)) * period);
    let note = if error_law.is_exponential() && detection_law.is_exponential() {
        None
    } else {
        Some(NON_MEMORYLESS_NOTE)
    };
    Ok(assemble(period, n, pf, pl, note))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TMinSolution {
    /// Smallest searched period meeting the threshold, to 1 s resolution.
    pub t_min: f64,
    pub t_opt: f64,
    /// max(t_min, t_opt)
    pub recommended: f64,
    pub risk_at_t_min: f64,
}

/// Ceiling of the period search, in units of mu_e.
pub const SEARCH_CEILING_MTBF: f64 = 10.0;
const SCAN_GROWTH: f64 = 1.01;

/// Waste-optimal period used as the floor of the recommendation: the
/// first-order optimum when its regime holds, Young's formula otherwise.
pub fn reference_period(params: &PlatformParams) -> Result<f64> {
    match period_firstorder(params) {
        Ok(t) if t > params.checkpoint_cost => Ok(t),
        _ => period_young(params),
    }
}

/// Smallest period with p_risk <= epsilon.
///
/// Scans upward geometrically from max(C + 1, T_opt / 4), then bisects the
/// first bracketing interval down to one second. No monotonicity of p_risk
/// in T is assumed beyond that bracket.
pub fn solve_t_min(
    policy: &BoundedStoragePolicy,
    workload: &WorkloadSpec,
    params: &PlatformParams,
) -> Result<TMinSolution> {
    validate_params(params, ModelFamily::LatencyDetection)?;
    let t_opt = reference_period(params)?;
    let c = params.checkpoint_cost;
    let ceiling = SEARCH_CEILING_MTBF * params.mu_e();
    let risk = |t: f64| risk_report(t, policy, workload, params).map(|r| r.p_risk);

    let start = (c + 1.0).max(t_opt / 4.0);
    let mut best = (f64::INFINITY, start);
    let mut prev: Option<f64> = None;
    let mut t = start;
    let hit = loop {
        let p = risk(t)?;
        if p < best.0 {
            best = (p, t);
        }
        if p <= policy.epsilon {
            break Some(t);
        }
        if t >= ceiling {
            break None;
        }
        prev = Some(t);
        t = (t * SCAN_GROWTH).max(t + 1.0).min(ceiling);
    };
    let Some(upper) = hit else {
        return Err(Error::Infeasible {
            epsilon: policy.epsilon,
            ceiling,
            best_risk: best.0,
            best_period: best.1,
        });
    };

    let t_min = match prev {
        None => upper,
        Some(lo) => {
            // bisect over whole seconds; risk decreases with T on this bracket
            let (mut lo, mut hi) = (lo.floor(), upper.ceil());
            while hi - lo > 1.0 {
                let mid = (0.5 * (lo + hi)).floor();
                if risk(mid)? <= policy.epsilon {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            if risk(hi)? <= policy.epsilon {
                hi
            } else {
                upper
            }
        }
    };
    Ok(TMinSolution {
        t_min,
        t_opt,
        recommended: t_min.max(t_opt),
        risk_at_t_min: risk(t_min)?,
    })
}
