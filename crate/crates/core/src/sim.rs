//! Monte Carlo replay of executions under sampled errors.
//!
//! Errors arrive as a renewal process in *exposed* time: work, checkpoint,
//! recovery and verification phases are exposed, downtime and the idle wait
//! at completion are not. Event times are continuous.
//!
//! Two execution models are supported.
//!
//! `BoundedStorage`: periods of `T - C` work followed by a checkpoint. Each
//! error carries a detection latency; detection rolls back to the latest
//! stored checkpoint completed before the earliest pending error. When that
//! checkpoint is no longer stored the failure is irrecoverable and the
//! workload restarts from scratch.
//!
//! `Pattern`: the periodic verification/checkpoint patterns of
//! [`crate::patterns`]. Errors only corrupt state; they are found by
//! verifications, and rollback never crosses the last verified checkpoint.
//!
//! Trial `i` draws from its own ChaCha8 stream, so results do not depend on
//! the thread count.

use std::collections::VecDeque;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, Weibull};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{validate_params, DistributionSpec, LawFamily, LawRole, ModelFamily, PlatformParams, WorkloadSpec};
use crate::patterns::{PatternMode, PatternSpec};

/// How many completed checkpoints are kept. The initial state counts as one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Retention {
    Unbounded,
    Last(u32),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SimModel {
    BoundedStorage { period: f64, retention: Retention },
    Pattern(PatternSpec),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub model: SimModel,
    pub workload: WorkloadSpec,
    pub params: PlatformParams,
    pub error_law: DistributionSpec,
    /// Required by `BoundedStorage`, unused by `Pattern`.
    pub detection_law: Option<DistributionSpec>,
    pub trials: u64,
    pub seed: u64,
    /// Runaway guard on the makespan of a single trial. Defaults to
    /// `DEFAULT_RUNAWAY_FACTOR` times the failure-free makespan.
    pub max_sim_time: Option<f64>,
    /// Keep per-trial records in the result.
    pub record_trials: bool,
}

pub const DEFAULT_RUNAWAY_FACTOR: f64 = 1000.0;
pub const MIN_RUNAWAY_FACTOR: f64 = 10.0;

impl SimConfig {
    /// Bounded storage with Exponential laws taken from the platform rates.
    pub fn bounded(period: f64, retention: Retention, workload: WorkloadSpec, params: PlatformParams) -> Result<Self> {
        let params = validate_params(&params, ModelFamily::LatencyDetection)?;
        Ok(SimConfig {
            model: SimModel::BoundedStorage { period, retention },
            workload,
            error_law: DistributionSpec::exponential(params.error_rate, LawRole::ErrorArrival)?,
            detection_law: Some(DistributionSpec::exponential(
                params.require_mu_d().map(|m| 1.0 / m)?,
                LawRole::DetectionLatency,
            )?),
            params,
            trials: 10_000,
            seed: 0,
            max_sim_time: None,
            record_trials: false,
        })
    }

    /// Pattern execution with Exponential error arrivals.
    pub fn pattern(spec: PatternSpec, workload: WorkloadSpec, params: PlatformParams) -> Result<Self> {
        let params = validate_params(&params, ModelFamily::Verification)?;
        Ok(SimConfig {
            model: SimModel::Pattern(spec),
            workload,
            error_law: DistributionSpec::exponential(params.error_rate, LawRole::ErrorArrival)?,
            detection_law: None,
            params,
            trials: 10_000,
            seed: 0,
            max_sim_time: None,
            record_trials: false,
        })
    }

    pub fn with_trials(mut self, trials: u64) -> Self {
        self.trials = trials;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn recording(mut self) -> Self {
        self.record_trials = true;
        self
    }

    /// Makespan of a run that sees no error.
    pub fn failure_free_makespan(&self) -> Result<f64> {
        let w = self.workload.total_work;
        match self.model {
            SimModel::BoundedStorage { period, .. } => {
                let per = period - self.params.checkpoint_cost;
                Ok(w + period_count(w, per) as f64 * self.params.checkpoint_cost)
            }
            SimModel::Pattern(spec) => {
                let seg = spec.segment_work(&self.params)?;
                let per = seg * f64::from(spec.k);
                Ok(w + period_count(w, per) as f64 * (spec.period - per))
            }
        }
    }

    fn validate(&self) -> Result<f64> {
        if self.trials == 0 {
            return Err(Error::Domain("trials must be at least 1".into()));
        }
        if self.error_law.role != LawRole::ErrorArrival {
            return Err(Error::Domain("error_law must have the error-arrival role".into()));
        }
        match self.model {
            SimModel::BoundedStorage { period, retention } => {
                validate_params(&self.params, ModelFamily::LatencyDetection)?;
                if !(period > self.params.checkpoint_cost) || !period.is_finite() {
                    return Err(Error::Domain(format!(
                        "period {period} must exceed the checkpoint cost {}",
                        self.params.checkpoint_cost
                    )));
                }
                if retention == Retention::Last(0) {
                    return Err(Error::Domain("retention must keep at least one checkpoint".into()));
                }
                match self.detection_law {
                    Some(d) if d.role == LawRole::DetectionLatency => {}
                    Some(_) => {
                        return Err(Error::Domain(
                            "detection_law must have the detection-latency role".into(),
                        ))
                    }
                    None => return Err(Error::Domain("bounded storage needs a detection_law".into())),
                }
            }
            SimModel::Pattern(spec) => {
                validate_params(&self.params, ModelFamily::Verification)?;
                spec.segment_work(&self.params)?;
            }
        }
        let base = self.failure_free_makespan()?;
        let limit = self.max_sim_time.unwrap_or(DEFAULT_RUNAWAY_FACTOR * base);
        if !(limit >= MIN_RUNAWAY_FACTOR * base) {
            return Err(Error::Domain(format!(
                "max_sim_time {limit} is below {MIN_RUNAWAY_FACTOR} x the failure-free makespan {base}"
            )));
        }
        Ok(limit)
    }
}

/// Number of periods of `per` work needed to cover `w`.
fn period_count(w: f64, per: f64) -> u64 {
    let mut n = (w / per).floor() as u64;
    if (n as f64) * per < w * (1.0 - 1e-12) {
        n += 1;
    }
    n.max(1)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: u64,
    pub makespan: f64,
    pub attempts: u64,
    pub irrecoverable: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimResult {
    pub trials: u64,
    pub seed: u64,
    pub mean_makespan: f64,
    pub makespan_stderr: f64,
    /// 1 - W / mean_makespan
    pub waste_mean: f64,
    pub waste_stderr: f64,
    pub irrecoverable_count: u64,
    pub attempts_total: u64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub per_trial: Option<Vec<TrialRecord>>,
}

impl SimResult {
    /// Fraction of attempts ending in an irrecoverable failure.
    pub fn irrecoverable_per_attempt(&self) -> f64 {
        self.irrecoverable_count as f64 / self.attempts_total as f64
    }

    /// Binomial standard error of [`Self::irrecoverable_per_attempt`].
    pub fn irrecoverable_stderr(&self) -> f64 {
        let p = self.irrecoverable_per_attempt();
        (p * (1.0 - p) / self.attempts_total as f64).sqrt()
    }
}

/// Independent, reproducible stream for one trial.
pub fn rng_stream(seed: u64, trial_index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial_index);
    rng
}

pub fn simulate(config: &SimConfig) -> Result<SimResult> {
    let limit = config.validate()?;
    let records: Vec<TrialRecord> = (0..config.trials)
        .into_par_iter()
        .map(|i| Trial::new(config, i, limit).run())
        .collect::<Result<_>>()?;
    Ok(aggregate(config, records))
}

fn aggregate(config: &SimConfig, records: Vec<TrialRecord>) -> SimResult {
    let n = records.len() as f64;
    let mean = records.iter().map(|r| r.makespan).sum::<f64>() / n;
    let var = if records.len() > 1 {
        records.iter().map(|r| (r.makespan - mean).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    let makespan_stderr = (var / n).sqrt();
    let w = config.workload.total_work;
    SimResult {
        trials: config.trials,
        seed: config.seed,
        mean_makespan: mean,
        makespan_stderr,
        waste_mean: 1.0 - w / mean,
        // delta method on 1 - W / M
        waste_stderr: w / (mean * mean) * makespan_stderr,
        irrecoverable_count: records.iter().map(|r| r.irrecoverable).sum(),
        attempts_total: records.iter().map(|r| r.attempts).sum(),
        per_trial: config.record_trials.then_some(records),
    }
}

enum Sampler {
    Exp(Exp<f64>),
    Weibull(Weibull<f64>),
}

impl Sampler {
    fn new(law: &DistributionSpec) -> Self {
        match law.family {
            LawFamily::Exponential { rate } => Sampler::Exp(Exp::new(rate).expect("validated rate")),
            LawFamily::Weibull { scale, shape } => {
                Sampler::Weibull(Weibull::new(scale, shape).expect("validated weibull"))
            }
        }
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> f64 {
        match self {
            Sampler::Exp(d) => d.sample(rng),
            Sampler::Weibull(d) => d.sample(rng),
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Outcome {
    Completed,
    Detected,
}

struct Trial<'a> {
    cfg: &'a SimConfig,
    index: u64,
    limit: f64,
    rng: ChaCha8Rng,
    errors: Sampler,
    latency: Option<Sampler>,
    now: f64,
    exposed: f64,
    /// Exposed-time instant of the next error.
    next_error: f64,
    /// Occurrence time of the earliest undetected error.
    pending_since: f64,
    detect_at: f64,
    /// Live state corrupted (pattern mode).
    corrupt: bool,
    attempts: u64,
    irrecoverable: u64,
}

impl<'a> Trial<'a> {
    fn new(cfg: &'a SimConfig, index: u64, limit: f64) -> Self {
        let mut rng = rng_stream(cfg.seed, index);
        let errors = Sampler::new(&cfg.error_law);
        let next_error = errors.sample(&mut rng);
        let latency = match cfg.model {
            SimModel::BoundedStorage { .. } => cfg.detection_law.as_ref().map(Sampler::new),
            SimModel::Pattern(_) => None,
        };
        Trial {
            cfg,
            index,
            limit,
            rng,
            errors,
            latency,
            now: 0.0,
            exposed: 0.0,
            next_error,
            pending_since: f64::INFINITY,
            detect_at: f64::INFINITY,
            corrupt: false,
            attempts: 1,
            irrecoverable: 0,
        }
    }

    fn run(mut self) -> Result<TrialRecord> {
        match self.cfg.model {
            SimModel::BoundedStorage { period, retention } => self.run_bounded(period, retention)?,
            SimModel::Pattern(spec) => self.run_pattern(spec)?,
        }
        Ok(TrialRecord {
            trial: self.index,
            makespan: self.now,
            attempts: self.attempts,
            irrecoverable: self.irrecoverable,
        })
    }

    /// Spends `dur` seconds, stopping early if a pending error is detected.
    fn advance(&mut self, dur: f64, exposed: bool) -> Result<Outcome> {
        let end = self.now + dur;
        loop {
            let stop = end.min(self.detect_at);
            if exposed {
                let error_at = self.now + (self.next_error - self.exposed);
                if error_at < stop {
                    self.now = error_at;
                    self.exposed = self.next_error;
                    self.next_error += self.errors.sample(&mut self.rng);
                    self.strike();
                    continue;
                }
                self.exposed += stop - self.now;
            }
            self.now = stop;
            if self.now > self.limit {
                return Err(Error::Runaway {
                    trial: self.index,
                    seed: self.cfg.seed,
                    limit: self.limit,
                });
            }
            return Ok(if self.detect_at <= end {
                Outcome::Detected
            } else {
                Outcome::Completed
            });
        }
    }

    fn strike(&mut self) {
        match &self.latency {
            Some(lat) => {
                let seen = self.now + lat.sample(&mut self.rng);
                self.pending_since = self.pending_since.min(self.now);
                self.detect_at = self.detect_at.min(seen);
            }
            None => self.corrupt = true,
        }
    }

    fn run_bounded(&mut self, period: f64, retention: Retention) -> Result<()> {
        let total = self.cfg.workload.total_work;
        let per = period - self.cfg.params.checkpoint_cost;
        let cap = match retention {
            Retention::Unbounded => usize::MAX,
            Retention::Last(k) => k as usize,
        };
        // (completion time, committed work)
        let mut ring: VecDeque<(f64, f64)> = VecDeque::from([(0.0, 0.0)]);
        let mut progress = 0.0;
        loop {
            if progress >= total {
                if self.pending_since.is_infinite() {
                    debug_assert_eq!(progress, total);
                    return Ok(());
                }
                // the result is only trusted once outstanding errors surface
                self.advance(f64::INFINITY, false)?;
                progress = self.rollback_bounded(&mut ring)?;
                continue;
            }
            let remaining = total - progress;
            let last = remaining <= per * (1.0 + 1e-12);
            let work = if last { remaining } else { per };
            if self.advance(work, true)? == Outcome::Detected
                || self.advance(self.cfg.params.checkpoint_cost, true)? == Outcome::Detected
            {
                progress = self.rollback_bounded(&mut ring)?;
                continue;
            }
            progress = if last { total } else { progress + per };
            ring.push_back((self.now, progress));
            if ring.len() > cap {
                ring.pop_front();
            }
        }
    }

    /// Restores the latest checkpoint that predates the earliest pending
    /// error; returns the committed work to resume from.
    fn rollback_bounded(&mut self, ring: &mut VecDeque<(f64, f64)>) -> Result<f64> {
        let p = self.cfg.params;
        loop {
            let since = self.pending_since;
            self.pending_since = f64::INFINITY;
            self.detect_at = f64::INFINITY;
            match ring.iter().rposition(|&(done, _)| done < since) {
                Some(i) => {
                    debug_assert!(ring[i].0 < since);
                    ring.truncate(i + 1);
                    self.advance(p.downtime, false)?;
                    if self.advance(p.recovery_cost, true)? == Outcome::Completed {
                        return Ok(ring[i].1);
                    }
                }
                None => {
                    self.irrecoverable += 1;
                    self.attempts += 1;
                    self.advance(p.downtime, false)?;
                    ring.clear();
                    ring.push_back((self.now, 0.0));
                    return Ok(0.0);
                }
            }
        }
    }

    fn run_pattern(&mut self, spec: PatternSpec) -> Result<()> {
        let total = self.cfg.workload.total_work;
        let seg = spec.segment_work(&self.cfg.params)?;
        let per = seg * f64::from(spec.k);
        let mut progress = 0.0;
        while progress < total {
            let remaining = total - progress;
            let last = remaining <= per * (1.0 + 1e-12);
            let w = if last { remaining / f64::from(spec.k) } else { seg };
            match spec.mode {
                PatternMode::CheckpointHeavy => self.checkpoint_heavy(spec.k, w)?,
                PatternMode::VerificationHeavy => self.verification_heavy(spec.k, w)?,
            }
            progress = if last { total } else { progress + per };
        }
        Ok(())
    }

    fn exposed(&mut self, dur: f64) -> Result<()> {
        self.advance(dur, true).map(|_| ())
    }

    /// Writes a checkpoint; the snapshot is the state when the write starts.
    fn checkpoint(&mut self) -> Result<bool> {
        let snapshot = self.corrupt;
        self.exposed(self.cfg.params.checkpoint_cost)?;
        Ok(snapshot)
    }

    fn verify(&mut self) -> Result<bool> {
        self.exposed(self.cfg.params.verification_cost.unwrap_or(0.0))?;
        Ok(!self.corrupt)
    }

    fn checkpoint_heavy(&mut self, k: u32, w: f64) -> Result<()> {
        let p = self.cfg.params;
        let k = k as usize;
        // bad[j]: checkpoint j of this pattern holds corrupted state
        let mut bad = vec![false; k];
        let mut resume = 0;
        loop {
            for s in resume + 1..=k {
                self.exposed(w)?;
                if s < k {
                    bad[s] = self.checkpoint()?;
                }
            }
            if self.verify()? {
                self.checkpoint()?;
                return Ok(());
            }
            self.advance(p.downtime, false)?;
            resume = 0;
            for j in (1..k).rev() {
                self.corrupt = bad[j];
                self.exposed(p.recovery_cost)?;
                if self.verify()? {
                    resume = j;
                    break;
                }
            }
            if resume == 0 {
                // the pattern-start checkpoint was verified before it was written
                self.corrupt = false;
                self.exposed(p.recovery_cost)?;
            }
        }
    }

    fn verification_heavy(&mut self, k: u32, w: f64) -> Result<()> {
        let p = self.cfg.params;
        'pattern: loop {
            for _ in 0..k {
                self.exposed(w)?;
                if !self.verify()? {
                    self.advance(p.downtime, false)?;
                    self.corrupt = false;
                    self.exposed(p.recovery_cost)?;
                    continue 'pattern;
                }
            }
            self.checkpoint()?;
            return Ok(());
        }
    }
}
