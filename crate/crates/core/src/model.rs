//! Shared domain types: platform costs and rates, workloads, sampling laws
//! and the waste decomposition every model reports.
//!
//! All durations are seconds and all rates are per second. Conversion from
//! other units happens once, at scenario ingestion.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, Violation};

pub const MINUTE: f64 = 60.0;
pub const HOUR: f64 = 3600.0;
pub const DAY: f64 = 86_400.0;
/// A 365-day year.
pub const YEAR: f64 = 365.0 * DAY;

/// Cost and rate parameters of a platform.
///
/// `verification_cost` and `detection_rate` are optional: the latency-detection
/// models need `detection_rate`, the verification-pattern models need
/// `verification_cost`. Absent is distinct from zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlatformParams {
    pub checkpoint_cost: f64,
    pub recovery_cost: f64,
    pub downtime: f64,
    pub verification_cost: Option<f64>,
    pub error_rate: f64,
    pub detection_rate: Option<f64>,
}

/// Which family of models the parameters are meant for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelFamily {
    /// Errors detected after a random latency; needs `detection_rate`.
    LatencyDetection,
    /// Errors detected by explicit verifications; needs `verification_cost`.
    Verification,
    /// Only the common fields are checked.
    Any,
}

impl PlatformParams {
    /// Parameters for the latency-detection models (no verification cost).
    pub fn latency(
        checkpoint_cost: f64,
        recovery_cost: f64,
        downtime: f64,
        error_rate: f64,
        detection_rate: f64,
    ) -> Self {
        PlatformParams {
            checkpoint_cost,
            recovery_cost,
            downtime,
            verification_cost: None,
            error_rate,
            detection_rate: Some(detection_rate),
        }
    }

    /// Parameters for the verification-pattern models (no detection latency).
    pub fn verified(
        checkpoint_cost: f64,
        recovery_cost: f64,
        downtime: f64,
        verification_cost: f64,
        error_rate: f64,
    ) -> Self {
        PlatformParams {
            checkpoint_cost,
            recovery_cost,
            downtime,
            verification_cost: Some(verification_cost),
            error_rate,
            detection_rate: None,
        }
    }

    pub fn with_verification(mut self, v: f64) -> Self {
        self.verification_cost = Some(v);
        self
    }

    pub fn with_detection_rate(mut self, rate: f64) -> Self {
        self.detection_rate = Some(rate);
        self
    }

    /// Mean time between errors.
    pub fn mu_e(&self) -> f64 {
        1.0 / self.error_rate
    }

    /// Mean detection latency, if a detection law is part of the model.
    pub fn mu_d(&self) -> Option<f64> {
        self.detection_rate.map(|r| 1.0 / r)
    }

    pub(crate) fn require_mu_d(&self) -> Result<f64> {
        self.mu_d().ok_or_else(|| {
            Error::InvalidParams(vec![Violation {
                field: "detection_rate",
                message: "missing (required by latency-detection models)".into(),
            }])
        })
    }

    pub(crate) fn require_v(&self) -> Result<f64> {
        self.verification_cost.ok_or_else(|| {
            Error::InvalidParams(vec![Violation {
                field: "verification_cost",
                message: "missing (required by verification-pattern models)".into(),
            }])
        })
    }
}

/// Checks every invariant of `params` and reports all violations at once.
pub fn validate_params(params: &PlatformParams, family: ModelFamily) -> Result<PlatformParams> {
    let mut bad = Vec::new();
    let mut cost = |field: &'static str, value: f64| {
        if !value.is_finite() {
            bad.push(Violation {
                field,
                message: "not finite".into(),
            });
        } else if value < 0.0 {
            bad.push(Violation {
                field,
                message: "negative".into(),
            });
        }
    };
    cost("checkpoint_cost", params.checkpoint_cost);
    cost("recovery_cost", params.recovery_cost);
    cost("downtime", params.downtime);
    if let Some(v) = params.verification_cost {
        cost("verification_cost", v);
    }

    let mut rate = |field: &'static str, value: f64| {
        if !(value > 0.0) {
            bad.push(Violation {
                field,
                message: "must be strictly positive".into(),
            });
        } else if !value.is_finite() || !(1.0 / value).is_finite() {
            bad.push(Violation {
                field,
                message: "reciprocal not finite".into(),
            });
        }
    };
    rate("error_rate", params.error_rate);
    if let Some(d) = params.detection_rate {
        rate("detection_rate", d);
    }

    match family {
        ModelFamily::LatencyDetection if params.detection_rate.is_none() => bad.push(Violation {
            field: "detection_rate",
            message: "missing (required by latency-detection models)".into(),
        }),
        ModelFamily::Verification if params.verification_cost.is_none() => bad.push(Violation {
            field: "verification_cost",
            message: "missing (required by verification-pattern models)".into(),
        }),
        _ => {}
    }

    if bad.is_empty() {
        Ok(*params)
    } else {
        Err(Error::InvalidParams(bad))
    }
}

/// Platform error rate for `component_count` identical components, each with
/// mean time between failures `component_mtbf`.
pub fn platform_mtbf(component_mtbf: f64, component_count: u64) -> Result<f64> {
    if !(component_mtbf > 0.0) || !component_mtbf.is_finite() {
        return Err(Error::Domain(format!(
            "component_mtbf must be positive and finite, got {component_mtbf}"
        )));
    }
    if component_count == 0 {
        return Err(Error::Domain("component_count must be at least 1".into()));
    }
    Ok(component_count as f64 / component_mtbf)
}

/// Total failure-free work, optionally split into equal chunks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WorkloadSpec {
    pub total_work: f64,
    pub chunk_count: Option<u64>,
}

impl WorkloadSpec {
    pub fn new(total_work: f64) -> Result<Self> {
        if !(total_work > 0.0) || !total_work.is_finite() {
            return Err(Error::Domain(format!("total_work must be positive, got {total_work}")));
        }
        Ok(WorkloadSpec {
            total_work,
            chunk_count: None,
        })
    }

    pub fn chunked(total_work: f64, chunk_count: u64) -> Result<Self> {
        if chunk_count == 0 {
            return Err(Error::Domain("chunk_count must be at least 1".into()));
        }
        let mut w = Self::new(total_work)?;
        w.chunk_count = Some(chunk_count);
        Ok(w)
    }

    pub fn chunk_work(&self) -> Option<f64> {
        self.chunk_count.map(|n| self.total_work / n as f64)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LawRole {
    ErrorArrival,
    DetectionLatency,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum LawFamily {
    Exponential { rate: f64 },
    Weibull { scale: f64, shape: f64 },
}

/// A sampling law for error inter-arrival times or detection latencies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistributionSpec {
    pub family: LawFamily,
    pub role: LawRole,
}

impl DistributionSpec {
    pub fn exponential(rate: f64, role: LawRole) -> Result<Self> {
        if !(rate > 0.0) || !rate.is_finite() {
            return Err(Error::Domain(format!("exponential rate must be positive, got {rate}")));
        }
        Ok(DistributionSpec {
            family: LawFamily::Exponential { rate },
            role,
        })
    }

    pub fn weibull(scale: f64, shape: f64, role: LawRole) -> Result<Self> {
        if !(scale > 0.0) || !scale.is_finite() || !(shape > 0.0) || !shape.is_finite() {
            return Err(Error::Domain(format!(
                "weibull scale and shape must be positive, got scale={scale} shape={shape}"
            )));
        }
        Ok(DistributionSpec {
            family: LawFamily::Weibull { scale, shape },
            role,
        })
    }

    /// Weibull law with the given shape whose mean equals `mean`.
    pub fn weibull_with_mean(mean: f64, shape: f64, role: LawRole) -> Result<Self> {
        if !(shape > 0.0) {
            return Err(Error::Domain(format!("weibull shape must be positive, got {shape}")));
        }
        let scale = mean / statrs::function::gamma::gamma(1.0 + 1.0 / shape);
        Self::weibull(scale, shape, role)
    }

    pub fn mean(&self) -> f64 {
        match self.family {
            LawFamily::Exponential { rate } => 1.0 / rate,
            LawFamily::Weibull { scale, shape } => scale * statrs::function::gamma::gamma(1.0 + 1.0 / shape),
        }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        match self.family {
            LawFamily::Exponential { rate } => -(-rate * x).exp_m1(),
            LawFamily::Weibull { scale, shape } => -(-(x / scale).powf(shape)).exp_m1(),
        }
    }

    /// P(X >= x).
    pub fn survival(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 1.0;
        }
        match self.family {
            LawFamily::Exponential { rate } => (-rate * x).exp(),
            LawFamily::Weibull { scale, shape } => (-(x / scale).powf(shape)).exp(),
        }
    }

    pub fn is_exponential(&self) -> bool {
        matches!(self.family, LawFamily::Exponential { .. })
    }
}

/// Decomposition of the waste into its fault-free and failure-induced parts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WasteBreakdown {
    pub waste_ff: f64,
    pub waste_fail: f64,
    pub waste_total: f64,
    /// Expected time lost per error.
    pub time_lost_per_error: f64,
}

impl WasteBreakdown {
    /// Builds a breakdown whose total is the product recombination of the parts.
    pub fn combined(waste_ff: f64, waste_fail: f64, time_lost_per_error: f64) -> Self {
        WasteBreakdown {
            waste_ff,
            waste_fail,
            waste_total: waste_fail + waste_ff - waste_fail * waste_ff,
            time_lost_per_error,
        }
    }

    /// Relative gap between `waste_total` and the recombined parts.
    pub fn recomposition_error(&self) -> f64 {
        let recombined = self.waste_fail + self.waste_ff - self.waste_fail * self.waste_ff;
        (self.waste_total - recombined).abs() / recombined.abs().max(f64::MIN_POSITIVE)
    }

    /// Makespan implied by the waste for a failure-free base time.
    pub fn makespan(&self, base_time: f64) -> f64 {
        base_time / (1.0 - self.waste_total)
    }
}
