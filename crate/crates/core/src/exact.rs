//! Exact expected makespan under Exponential error and detection laws, and
//! the optimal split of a workload into equal checkpointed chunks.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lambert::lambert_w0;
use crate::model::{validate_params, ModelFamily, PlatformParams, WorkloadSpec};

/// Expected time spent before the first error, given that it strikes within
/// the next `w + C` seconds.
pub fn expected_tlost(w: f64, params: &PlatformParams) -> Result<f64> {
    validate_params(params, ModelFamily::Any)?;
    let span = w + params.checkpoint_cost;
    if !(span > 0.0) {
        return Err(Error::Domain(format!("w + C must be positive, got {span}")));
    }
    let x = params.error_rate * span;
    if x < 1e-8 {
        // series: span * (1/2 - x/12 + x^3/720)
        return Ok(span * (0.5 - x / 12.0 + x * x * x / 720.0));
    }
    if x > 700.0 {
        return Ok(params.mu_e());
    }
    Ok(params.mu_e() - span / x.exp_m1())
}

/// Expected duration of a recovery phase: downtime plus error-prone
/// recovery attempts until one completes.
pub fn expected_trec(params: &PlatformParams) -> Result<f64> {
    validate_params(params, ModelFamily::LatencyDetection)?;
    let mu_d = params.require_mu_d()?;
    let x = params.error_rate * params.recovery_cost;
    Ok(params.downtime * x.exp() + x.exp_m1() * (params.mu_e() + mu_d))
}

/// e^{lambda_e R} (D + mu_e + mu_d)
fn makespan_prefactor(params: &PlatformParams, mu_d: f64) -> f64 {
    (params.error_rate * params.recovery_cost).exp() * (params.downtime + params.mu_e() + mu_d)
}

/// Expected time to execute `w` seconds of work followed by its checkpoint.
pub fn expected_makespan_chunk(w: f64, params: &PlatformParams) -> Result<f64> {
    validate_params(params, ModelFamily::LatencyDetection)?;
    if !(w > 0.0) {
        return Err(Error::Domain(format!("chunk work must be positive, got {w}")));
    }
    let mu_d = params.require_mu_d()?;
    let k = makespan_prefactor(params, mu_d);
    Ok(k * (params.error_rate * (w + params.checkpoint_cost)).exp_m1())
}

/// Expected makespan of `total_work` split into `n` equal chunks.
pub fn expected_makespan_total(total_work: f64, n: u64, params: &PlatformParams) -> Result<f64> {
    if n == 0 {
        return Err(Error::Domain("chunk count must be at least 1".into()));
    }
    Ok(n as f64 * expected_makespan_chunk(total_work / n as f64, params)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Degeneracy {
    /// C = 0: every extra chunk is free, the unconstrained optimum diverges.
    FreeCheckpoints,
    /// lambda_e W is below double resolution; a single chunk is optimal.
    NegligibleWork,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChunkingSolution {
    /// Unconstrained optimum (may be infinite when degenerate).
    pub n_star_real: f64,
    pub n_opt: u64,
    /// W / n_opt + C
    pub period: f64,
    pub expected_makespan: f64,
    pub degenerate: Option<Degeneracy>,
}

/// Optimal number of equal chunks for the workload.
///
/// The stationarity condition reduces to y e^y = -e^{-lambda_e C - 1} with
/// y = lambda_e W / n - 1, solved on the principal branch. The two integer
/// neighbours of the real optimum are compared on the exact makespan; ties
/// within 1e-12 relative go to the smaller count.
pub fn optimal_chunks(workload: &WorkloadSpec, params: &PlatformParams) -> Result<ChunkingSolution> {
    validate_params(params, ModelFamily::LatencyDetection)?;
    let total = workload.total_work;
    if !(total > 0.0) {
        return Err(Error::Domain(format!("total_work must be positive, got {total}")));
    }
    let lambda = params.error_rate;
    let c = params.checkpoint_cost;

    let single = |degenerate| -> Result<ChunkingSolution> {
        Ok(ChunkingSolution {
            n_star_real: if degenerate == Degeneracy::FreeCheckpoints {
                f64::INFINITY
            } else {
                1.0
            },
            n_opt: 1,
            period: total + c,
            expected_makespan: expected_makespan_total(total, 1, params)?,
            degenerate: Some(degenerate),
        })
    };

    if c == 0.0 {
        return single(Degeneracy::FreeCheckpoints);
    }
    if lambda * total < f64::EPSILON {
        return single(Degeneracy::NegligibleWork);
    }

    let y = lambert_w0(-(-lambda * c - 1.0).exp())?.value;
    let z = y + 1.0;
    if !(z > 0.0) {
        return single(Degeneracy::FreeCheckpoints);
    }
    let n_star = lambda * total / z;

    let lo = n_star.floor().max(1.0);
    let hi = n_star.ceil().max(1.0);
    let eval = |n: f64| expected_makespan_total(total, n as u64, params);
    let m_lo = eval(lo)?;
    let (n_opt, makespan) = if hi == lo {
        (lo, m_lo)
    } else {
        let m_hi = eval(hi)?;
        if m_hi < m_lo && (m_lo - m_hi) > 1e-12 * m_lo.abs() {
            (hi, m_hi)
        } else {
            (lo, m_lo)
        }
    };
    Ok(ChunkingSolution {
        n_star_real: n_star,
        n_opt: n_opt as u64,
        period: total / n_opt + c,
        expected_makespan: makespan,
        degenerate: None,
    })
}

/// First-order optimal period: sqrt(2 C mu_e) + C.
pub fn period_young(params: &PlatformParams) -> Result<f64> {
    validate_params(params, ModelFamily::Any)?;
    let c = params.checkpoint_cost;
    Ok((2.0 * c * params.mu_e()).sqrt() + c)
}
