//! Scenario documents (TOML).
//!
//! Every duration carries an explicit unit suffix: `s`, `min`, `h`, `d` or
//! `y` (365 days). Rates are given as tables:
//!
//! ```toml
//! error_rate = { component_mtbf = "100y", components = 100000 }
//! error_rate = { mtbf = "8.76h" }
//! error_rate = { per_second = 3.17e-5 }
//! detection_rate = { multiple_of_error_rate = 30 }
//! ```
//!
//! Unknown keys are rejected. The only defaulted physical quantity is the
//! downtime, which is 0 when absent.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{
    platform_mtbf, validate_params, DistributionSpec, LawRole, ModelFamily, PlatformParams, WorkloadSpec, DAY, HOUR,
    MINUTE, YEAR,
};
use crate::patterns::{PatternMode, PatternModel, RollbackSearch, VerifiedFailureModel, DEFAULT_K_MAX};
use crate::risk::BoundedStoragePolicy;

pub const DEFAULT_TRIALS: u64 = 10_000;

/// Bundled scenarios, by name.
pub const BUNDLED: &[(&str, &str)] = &[
    ("fig3", include_str!("../scenarios/fig3.toml")),
    ("fig4", include_str!("../scenarios/fig4.toml")),
    ("fig5", include_str!("../scenarios/fig5.toml")),
    ("fig6", include_str!("../scenarios/fig6.toml")),
    ("fig7", include_str!("../scenarios/fig7.toml")),
    ("fig8", include_str!("../scenarios/fig8.toml")),
    ("smoke", include_str!("../scenarios/smoke.toml")),
];

pub fn bundled(name: &str) -> Result<Scenario> {
    let (_, doc) = BUNDLED
        .iter()
        .find(|(n, _)| *n == name)
        .ok_or_else(|| Error::Scenario(format!("no bundled scenario named '{name}'")))?;
    load_scenario(doc)
}

/// Seconds in one unit of `suffix`.
fn unit(suffix: &str) -> Option<f64> {
    Some(match suffix {
        "s" => 1.0,
        "min" => MINUTE,
        "h" => HOUR,
        "d" => DAY,
        "y" => YEAR,
        _ => return None,
    })
}

/// Parses "600s", "8.76h", "10d", "100y" into seconds.
pub fn parse_duration(text: &str) -> std::result::Result<f64, String> {
    let t = text.trim();
    let split = t
        .char_indices()
        .rev()
        .take_while(|(_, c)| c.is_ascii_alphabetic())
        .last()
        .map(|(i, _)| i)
        .unwrap_or(t.len());
    let (num, suffix) = t.split_at(split);
    let scale = unit(suffix)
        .ok_or_else(|| format!("invalid duration '{text}': expected a number followed by s, min, h, d or y"))?;
    let value: f64 = num
        .trim()
        .parse()
        .map_err(|_| format!("invalid duration '{text}': '{num}' is not a number"))?;
    if !value.is_finite() || value < 0.0 {
        return Err(format!("invalid duration '{text}': must be finite and non-negative"));
    }
    Ok(value * scale)
}

/// Seconds, written back in the `s` unit with a round-trip float.
pub fn format_duration(seconds: f64) -> String {
    format!("{}s", crate::cli::fmt_f64(seconds))
}

fn duration(field: &str, text: &str) -> Result<f64> {
    parse_duration(text).map_err(|e| Error::Scenario(format!("{field}: {e}")))
}

fn opt_duration(field: &str, text: &Option<String>) -> Result<Option<f64>> {
    text.as_deref().map(|t| duration(field, t)).transpose()
}

// ---- document layer -------------------------------------------------------

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RateDoc {
    #[serde(skip_serializing_if = "Option::is_none")]
    mtbf: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    component_mtbf: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    components: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    multiple_of_error_rate: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    per_second: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PlatformDoc {
    checkpoint: String,
    recovery: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    downtime: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    verification: Option<String>,
    error_rate: RateDoc,
    #[serde(skip_serializing_if = "Option::is_none")]
    detection_rate: Option<RateDoc>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WorkloadDoc {
    total: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    chunks: Option<u64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PolicyDoc {
    keep: u32,
    epsilon: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PatternDoc {
    mode: PatternMode,
    #[serde(skip_serializing_if = "Option::is_none")]
    k: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    period: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    k_max: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    rollback: Option<RollbackSearch>,
    #[serde(skip_serializing_if = "Option::is_none")]
    kv_failure: Option<VerifiedFailureModel>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case", deny_unknown_fields)]
pub enum LawChoice {
    Exponential,
    /// Weibull with this shape, scaled to the mean implied by the rates.
    Weibull {
        shape: f64,
    },
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DistributionsDoc {
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<LawChoice>,
    #[serde(skip_serializing_if = "Option::is_none")]
    detection: Option<LawChoice>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SimKind {
    BoundedStorage,
    Pattern,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SimulationDoc {
    #[serde(skip_serializing_if = "Option::is_none")]
    trials: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    model: Option<SimKind>,
    #[serde(skip_serializing_if = "Option::is_none")]
    period: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    unbounded_storage: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    max_sim_time: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SweepVar {
    T,
    #[serde(rename = "k")]
    K,
    V,
    S,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SweepDoc {
    variable: SweepVar,
    from: String,
    to: String,
    points: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    log: Option<bool>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ValidateDoc {
    #[serde(skip_serializing_if = "Option::is_none")]
    waste_tolerance: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    makespan_tolerance: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    sigmas: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioDoc {
    name: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    note: Option<String>,
    platform: PlatformDoc,
    workload: WorkloadDoc,
    #[serde(skip_serializing_if = "Option::is_none")]
    policy: Option<PolicyDoc>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pattern: Option<PatternDoc>,
    #[serde(default, skip_serializing_if = "is_default_dist")]
    distributions: DistributionsDoc,
    #[serde(default)]
    simulation: SimulationDoc,
    #[serde(skip_serializing_if = "Option::is_none")]
    sweep: Option<SweepDoc>,
    #[serde(default)]
    validate: ValidateDoc,
}

fn is_default_dist(d: &DistributionsDoc) -> bool {
    d.error.is_none() && d.detection.is_none()
}

// ---- domain layer ---------------------------------------------------------

/// A pattern request: fixed (k, S) when both are given, searched otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PatternRequest {
    pub mode: PatternMode,
    pub k: Option<u32>,
    pub period: Option<f64>,
    pub k_max: u32,
    pub model: PatternModel,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Sweep {
    pub variable: SweepVar,
    pub from: f64,
    pub to: f64,
    pub points: u32,
    pub log: bool,
}

impl Sweep {
    pub fn new(variable: SweepVar, from: f64, to: f64, points: u32, log: bool) -> Result<Self> {
        if points == 0 {
            return Err(Error::Scenario("sweep needs at least one point".into()));
        }
        if !(from <= to) || !from.is_finite() || !to.is_finite() {
            return Err(Error::Scenario(format!(
                "sweep range {from}..{to} is empty or unordered"
            )));
        }
        if log && !(from > 0.0) {
            return Err(Error::Scenario("log sweep needs a positive lower bound".into()));
        }
        if points > 1 && from == to {
            return Err(Error::Scenario("sweep with several points needs from < to".into()));
        }
        Ok(Sweep {
            variable,
            from,
            to,
            points,
            log,
        })
    }

    pub fn values(&self) -> Vec<f64> {
        let n = self.points;
        if n == 1 {
            return vec![self.from];
        }
        (0..n)
            .map(|i| {
                let f = f64::from(i) / f64::from(n - 1);
                if self.log {
                    (self.from.ln() + f * (self.to.ln() - self.from.ln())).exp()
                } else {
                    self.from + f * (self.to - self.from)
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulationSettings {
    pub trials: Option<u64>,
    pub seed: u64,
    pub model: Option<SimKind>,
    pub period: Option<f64>,
    pub unbounded_storage: bool,
    pub max_sim_time: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tolerances {
    /// Absolute floor on waste deltas.
    pub waste: f64,
    /// Relative floor on makespan deltas.
    pub makespan: f64,
    /// Standard errors allowed on top of the floors.
    pub sigmas: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            waste: 0.005,
            makespan: 0.01,
            sigmas: 3.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Scenario {
    pub name: String,
    pub note: Option<String>,
    pub params: PlatformParams,
    pub workload: WorkloadSpec,
    pub policy: Option<BoundedStoragePolicy>,
    pub pattern: Option<PatternRequest>,
    pub error_law: LawChoice,
    pub detection_law: LawChoice,
    pub simulation: SimulationSettings,
    pub sweep: Option<Sweep>,
    pub tolerances: Tolerances,
}

impl Scenario {
    fn resolve(choice: LawChoice, rate: f64, role: LawRole) -> Result<DistributionSpec> {
        match choice {
            LawChoice::Exponential => DistributionSpec::exponential(rate, role),
            LawChoice::Weibull { shape } => DistributionSpec::weibull_with_mean(1.0 / rate, shape, role),
        }
    }

    pub fn error_distribution(&self) -> Result<DistributionSpec> {
        Self::resolve(self.error_law, self.params.error_rate, LawRole::ErrorArrival)
    }

    pub fn detection_distribution(&self) -> Result<Option<DistributionSpec>> {
        self.params
            .detection_rate
            .map(|r| Self::resolve(self.detection_law, r, LawRole::DetectionLatency))
            .transpose()
    }

    /// Trial count: explicit override, then the scenario, then the default.
    pub fn trials(&self, override_trials: Option<u64>) -> u64 {
        override_trials.or(self.simulation.trials).unwrap_or(DEFAULT_TRIALS)
    }
}

fn rate(field: &str, doc: &RateDoc, error_rate: Option<f64>) -> Result<f64> {
    let given = [
        doc.mtbf.is_some(),
        doc.component_mtbf.is_some() || doc.components.is_some(),
        doc.multiple_of_error_rate.is_some(),
        doc.per_second.is_some(),
    ];
    if given.iter().filter(|&&g| g).count() != 1 {
        return Err(Error::Scenario(format!(
            "{field}: give exactly one of mtbf, component_mtbf + components, multiple_of_error_rate, per_second"
        )));
    }
    if let Some(m) = &doc.mtbf {
        let m = duration(&format!("{field}.mtbf"), m)?;
        return Ok(1.0 / m);
    }
    if let Some(r) = doc.per_second {
        return Ok(r);
    }
    if let Some(f) = doc.multiple_of_error_rate {
        return error_rate.map(|e| f * e).ok_or_else(|| {
            Error::Scenario(format!(
                "{field}: multiple_of_error_rate only applies to detection_rate"
            ))
        });
    }
    let (Some(m), Some(n)) = (&doc.component_mtbf, doc.components) else {
        return Err(Error::Scenario(format!(
            "{field}: component_mtbf and components go together"
        )));
    };
    platform_mtbf(duration(&format!("{field}.component_mtbf"), m)?, n)
}

/// Parses a scenario document; all durations come back in seconds.
pub fn load_scenario(document: &str) -> Result<Scenario> {
    let doc: ScenarioDoc = toml::from_str(document).map_err(|e| Error::Scenario(e.to_string()))?;
    let pd = &doc.platform;
    let error_rate = rate("error_rate", &pd.error_rate, None)?;
    let detection_rate = pd
        .detection_rate
        .as_ref()
        .map(|d| rate("detection_rate", d, Some(error_rate)))
        .transpose()?;
    let params = PlatformParams {
        checkpoint_cost: duration("platform.checkpoint", &pd.checkpoint)?,
        recovery_cost: duration("platform.recovery", &pd.recovery)?,
        downtime: opt_duration("platform.downtime", &pd.downtime)?.unwrap_or(0.0),
        verification_cost: opt_duration("platform.verification", &pd.verification)?,
        error_rate,
        detection_rate,
    };
    let params = validate_params(&params, ModelFamily::Any)?;

    let total = duration("workload.total", &doc.workload.total)?;
    let workload = match doc.workload.chunks {
        Some(n) => WorkloadSpec::chunked(total, n)?,
        None => WorkloadSpec::new(total)?,
    };

    let policy = doc
        .policy
        .as_ref()
        .map(|p| BoundedStoragePolicy::new(p.keep, p.epsilon))
        .transpose()?;
    if policy.is_some() && params.detection_rate.is_none() {
        return Err(Error::Scenario("policy needs platform.detection_rate".into()));
    }

    let pattern = match &doc.pattern {
        None => None,
        Some(p) => {
            if params.verification_cost.is_none() {
                return Err(Error::Scenario("pattern needs platform.verification".into()));
            }
            if p.k == Some(0) || p.k_max == Some(0) {
                return Err(Error::Scenario("pattern k and k_max must be at least 1".into()));
            }
            Some(PatternRequest {
                mode: p.mode,
                k: p.k,
                period: opt_duration("pattern.period", &p.period)?,
                k_max: p.k_max.unwrap_or(DEFAULT_K_MAX),
                model: PatternModel {
                    rollback: p.rollback.unwrap_or_default(),
                    verified_failure: p.kv_failure.unwrap_or_default(),
                },
            })
        }
    };

    let sim = &doc.simulation;
    if sim.trials == Some(0) {
        return Err(Error::Scenario("simulation.trials must be at least 1".into()));
    }
    let simulation = SimulationSettings {
        trials: sim.trials,
        seed: sim.seed.unwrap_or(0),
        model: sim.model,
        period: opt_duration("simulation.period", &sim.period)?,
        unbounded_storage: sim.unbounded_storage.unwrap_or(false),
        max_sim_time: opt_duration("simulation.max_sim_time", &sim.max_sim_time)?,
    };

    let sweep = doc
        .sweep
        .as_ref()
        .map(|s| {
            let bound = |field: &str, text: &str| match s.variable {
                SweepVar::K => text
                    .trim()
                    .parse::<f64>()
                    .map_err(|_| Error::Scenario(format!("sweep.{field}: '{text}' is not a number"))),
                _ => duration(&format!("sweep.{field}"), text),
            };
            Sweep::new(
                s.variable,
                bound("from", &s.from)?,
                bound("to", &s.to)?,
                s.points,
                s.log.unwrap_or(false),
            )
        })
        .transpose()?;

    let d = Tolerances::default();
    let tolerances = Tolerances {
        waste: doc.validate.waste_tolerance.unwrap_or(d.waste),
        makespan: doc.validate.makespan_tolerance.unwrap_or(d.makespan),
        sigmas: doc.validate.sigmas.unwrap_or(d.sigmas),
    };

    Ok(Scenario {
        name: doc.name,
        note: doc.note,
        params,
        workload,
        policy,
        pattern,
        error_law: doc.distributions.error.unwrap_or(LawChoice::Exponential),
        detection_law: doc.distributions.detection.unwrap_or(LawChoice::Exponential),
        simulation,
        sweep,
        tolerances,
    })
}

fn per_second(r: f64) -> RateDoc {
    RateDoc {
        per_second: Some(r),
        ..RateDoc::default()
    }
}

/// Writes a scenario back as a document that loads to the same value.
/// Durations are emitted in seconds and rates per second.
pub fn emit(scenario: &Scenario) -> Result<String> {
    let p = &scenario.params;
    let k_str = |v: f64| crate::cli::fmt_f64(v);
    let doc = ScenarioDoc {
        name: scenario.name.clone(),
        note: scenario.note.clone(),
        platform: PlatformDoc {
            checkpoint: format_duration(p.checkpoint_cost),
            recovery: format_duration(p.recovery_cost),
            downtime: Some(format_duration(p.downtime)),
            verification: p.verification_cost.map(format_duration),
            error_rate: per_second(p.error_rate),
            detection_rate: p.detection_rate.map(per_second),
        },
        workload: WorkloadDoc {
            total: format_duration(scenario.workload.total_work),
            chunks: scenario.workload.chunk_count,
        },
        policy: scenario.policy.map(|p| PolicyDoc {
            keep: p.keep,
            epsilon: p.epsilon,
        }),
        pattern: scenario.pattern.map(|r| PatternDoc {
            mode: r.mode,
            k: r.k,
            period: r.period.map(format_duration),
            k_max: Some(r.k_max),
            rollback: Some(r.model.rollback),
            kv_failure: Some(r.model.verified_failure),
        }),
        distributions: DistributionsDoc {
            error: Some(scenario.error_law),
            detection: Some(scenario.detection_law),
        },
        simulation: SimulationDoc {
            trials: scenario.simulation.trials,
            seed: Some(scenario.simulation.seed),
            model: scenario.simulation.model,
            period: scenario.simulation.period.map(format_duration),
            unbounded_storage: Some(scenario.simulation.unbounded_storage),
            max_sim_time: scenario.simulation.max_sim_time.map(format_duration),
        },
        sweep: scenario.sweep.map(|s| SweepDoc {
            variable: s.variable,
            from: if s.variable == SweepVar::K {
                k_str(s.from)
            } else {
                format_duration(s.from)
            },
            to: if s.variable == SweepVar::K {
                k_str(s.to)
            } else {
                format_duration(s.to)
            },
            points: s.points,
            log: Some(s.log),
        }),
        validate: ValidateDoc {
            waste_tolerance: Some(scenario.tolerances.waste),
            makespan_tolerance: Some(scenario.tolerances.makespan),
            sigmas: Some(scenario.tolerances.sigmas),
        },
    };
    toml::to_string(&doc).map_err(|e| Error::Scenario(e.to_string()))
}
