//! Command-line surface: `ckptopt <command> --scenario <path> [options]`.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 invalid scenario or arguments,
//! 3 model-regime error (including an unreachable risk threshold),
//! 4 simulation runaway, 5 validation failure.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, ValueEnum};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::{expected_makespan_chunk, optimal_chunks, period_young, ChunkingSolution, Degeneracy};
use crate::firstorder::{period_firstorder, waste_general};
use crate::model::WorkloadSpec;
use crate::patterns::{
    optimize_pattern, pattern_coefficients, pattern_waste, PatternModel, PatternOptimum, PatternSpec,
};
use crate::risk::{reference_period, risk_report_with_laws, solve_t_min, TMinSolution};
use crate::scenario::{bundled, load_scenario, parse_duration, PatternRequest, Scenario, SimKind, Sweep, SweepVar};
use crate::sim::{simulate, Retention, SimConfig, SimModel, SimResult};

pub const TRIALS_ENV: &str = "CKPTOPT_TRIALS";

pub const EXIT_OK: u8 = 0;
pub const EXIT_IO: u8 = 1;
pub const EXIT_INVALID: u8 = 2;
pub const EXIT_REGIME: u8 = 3;
pub const EXIT_RUNAWAY: u8 = 4;
pub const EXIT_VALIDATION: u8 = 5;

pub fn exit_code(e: &Error) -> u8 {
    match e {
        Error::InvalidParams(_) | Error::Domain(_) | Error::Scenario(_) => EXIT_INVALID,
        Error::Regime(_) | Error::Infeasible { .. } => EXIT_REGIME,
        Error::Runaway { .. } => EXIT_RUNAWAY,
        Error::Io(_) => EXIT_IO,
    }
}

/// Shortest round-trip decimal form; exponent notation for very small or
/// very large magnitudes.
pub fn fmt_f64(x: f64) -> String {
    let a = x.abs();
    if x != 0.0 && x.is_finite() && !(1e-5..1e16).contains(&a) {
        format!("{x:e}")
    } else {
        format!("{x}")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    Optimize,
    Risk,
    Pattern,
    Simulate,
    Validate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "ckptopt", version, about = "Checkpoint and verification period optimizer")]
pub struct Cli {
    pub command: Command,
    /// Scenario file, or `bundled:<name>` for a built-in scenario.
    #[arg(long)]
    pub scenario: String,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub trials: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// var=lo:hi:n[:log] with var one of T, k, V, S.
    #[arg(long, value_parser = parse_sweep)]
    pub sweep: Option<Sweep>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

/// Parses `T=1000s:20000s:50:log`. Bounds without a unit are seconds.
pub fn parse_sweep(text: &str) -> std::result::Result<Sweep, String> {
    let (var, rest) = text.split_once('=').ok_or("expected var=lo:hi:n[:log]")?;
    let variable = match var.trim() {
        "T" => SweepVar::T,
        "k" => SweepVar::K,
        "V" => SweepVar::V,
        "S" => SweepVar::S,
        other => return Err(format!("unknown sweep variable '{other}' (expected T, k, V or S)")),
    };
    let parts: Vec<&str> = rest.split(':').collect();
    let log = match parts.as_slice() {
        [_, _, _] => false,
        [_, _, _, "log"] => true,
        [_, _, _, "lin"] => false,
        _ => return Err("expected var=lo:hi:n[:log]".into()),
    };
    let bound = |s: &str| -> std::result::Result<f64, String> {
        match s.trim().parse::<f64>() {
            Ok(v) => Ok(v),
            Err(_) if variable != SweepVar::K => parse_duration(s),
            Err(_) => Err(format!("'{s}' is not a number")),
        }
    };
    let points: u32 = parts[2]
        .trim()
        .parse()
        .map_err(|_| format!("'{}' is not a point count", parts[2]))?;
    Sweep::new(variable, bound(parts[0])?, bound(parts[1])?, points, log).map_err(|e| e.to_string())
}

#[derive(Debug, Clone, Copy, Default)]
pub struct RunOptions {
    pub trials: Option<u64>,
    pub seed: Option<u64>,
    pub sweep: Option<Sweep>,
    pub format: Option<Format>,
}

/// Runs `command` and writes its output; returns the exit status.
pub fn run_command(command: Command, scenario: &Scenario, opts: &RunOptions, out: &mut dyn Write) -> Result<u8> {
    match command {
        Command::Optimize => optimize(scenario, opts, out),
        Command::Risk => risk(scenario, opts, out),
        Command::Pattern => pattern(scenario, opts, out),
        Command::Simulate => simulate_cmd(scenario, opts, out),
        Command::Validate => validate(scenario, opts, out),
    }
}

/// Entry point shared by the binary and the tests.
pub fn main_with_args<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(stderr, "{e}");
            return if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
        }
    };
    let trials = match cli.trials {
        Some(t) => Some(t),
        None => match std::env::var(TRIALS_ENV) {
            Ok(v) => match v.trim().parse::<u64>() {
                Ok(t) if t > 0 => Some(t),
                _ => {
                    let _ = writeln!(stderr, "error: {TRIALS_ENV}='{v}' is not a positive integer");
                    return EXIT_INVALID;
                }
            },
            Err(_) => None,
        },
    };
    let result = read_scenario(&cli.scenario).and_then(|s| {
        let opts = RunOptions {
            trials,
            seed: cli.seed,
            sweep: cli.sweep,
            format: cli.format,
        };
        let mut buf = Vec::new();
        let code = run_command(cli.command, &s, &opts, &mut buf)?;
        match &cli.out {
            Some(path) => std::fs::write(path, &buf)?,
            None => stdout.write_all(&buf)?,
        }
        Ok(code)
    });
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            exit_code(&e)
        }
    }
}

fn read_scenario(arg: &str) -> Result<Scenario> {
    match arg.strip_prefix("bundled:") {
        Some(name) => bundled(name),
        None => {
            let text = std::fs::read_to_string(arg)
                .map_err(|e| Error::Scenario(format!("cannot read scenario '{arg}': {e}")))?;
            load_scenario(&text)
        }
    }
}

fn json(out: &mut dyn Write, value: &impl Serialize) -> Result<()> {
    serde_json::to_writer_pretty(&mut *out, value).map_err(|e| Error::Io(e.into()))?;
    writeln!(out)?;
    Ok(())
}

fn csv_row(out: &mut dyn Write, cells: &[f64]) -> Result<()> {
    let row: Vec<String> = cells.iter().map(|&c| fmt_f64(c)).collect();
    writeln!(out, "{}", row.join(","))?;
    Ok(())
}

fn sweep_for(scenario: &Scenario, opts: &RunOptions) -> Option<Sweep> {
    opts.sweep.or(scenario.sweep)
}

fn unsupported(command: &str, sweep: &Sweep) -> Error {
    Error::Scenario(format!("{command} cannot sweep {:?}", sweep.variable))
}

// ---- optimize -------------------------------------------------------------

#[derive(Serialize)]
struct OptimizeReport<'a> {
    scenario: &'a str,
    period_young: f64,
    period_firstorder: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    firstorder_regime: Option<String>,
    optimal_chunks: Option<ChunkingSolution>,
    degenerate: Option<Degeneracy>,
    #[serde(skip_serializing_if = "Option::is_none")]
    risk: Option<TMinSolution>,
    #[serde(skip_serializing_if = "Option::is_none")]
    risk_infeasible: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pattern: Option<PatternOptimum>,
}

fn optimize(s: &Scenario, _opts: &RunOptions, out: &mut dyn Write) -> Result<u8> {
    let p = &s.params;
    let has_latency = p.detection_rate.is_some();
    let (period_firstorder, firstorder_regime) = if has_latency {
        match period_firstorder(p) {
            Ok(t) => (Some(t), None),
            Err(Error::Regime(m)) => (None, Some(m)),
            Err(e) => return Err(e),
        }
    } else {
        (None, None)
    };
    let chunks = if has_latency {
        Some(optimal_chunks(&s.workload, p)?)
    } else {
        None
    };
    let free = (p.checkpoint_cost == 0.0).then_some(Degeneracy::FreeCheckpoints);
    let (risk, risk_infeasible) = match s.policy {
        Some(pol) => match solve_t_min(&pol, &s.workload, p) {
            Ok(sol) => (Some(sol), None),
            Err(e @ Error::Infeasible { .. }) => (None, Some(e.to_string())),
            Err(e) => return Err(e),
        },
        None => (None, None),
    };
    let pattern = match s.pattern {
        Some(req) => Some(optimize_pattern(req.mode, p, req.k_max, req.model)?),
        None => None,
    };
    json(
        out,
        &OptimizeReport {
            scenario: &s.name,
            period_young: period_young(p)?,
            period_firstorder,
            firstorder_regime,
            degenerate: chunks.and_then(|c| c.degenerate).or(free),
            optimal_chunks: chunks,
            risk,
            risk_infeasible,
            pattern,
        },
    )?;
    Ok(EXIT_OK)
}

// ---- risk -----------------------------------------------------------------

#[derive(Serialize)]
struct RiskRow {
    #[serde(rename = "T")]
    t: f64,
    p_fail: f64,
    p_lat: f64,
    p_irrec: f64,
    p_risk: f64,
    waste_total: f64,
}

#[derive(Serialize)]
struct RiskDoc<'a> {
    scenario: &'a str,
    rows: Vec<RiskRow>,
    t_min: Option<f64>,
    t_opt: f64,
    recommended: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    note: Option<&'static str>,
}

fn risk(s: &Scenario, opts: &RunOptions, out: &mut dyn Write) -> Result<u8> {
    let policy = s
        .policy
        .ok_or_else(|| Error::Scenario("risk needs a [policy] section".into()))?;
    let p = &s.params;
    let t_ref = reference_period(p)?;
    let sweep = match sweep_for(s, opts) {
        Some(sw) if sw.variable == SweepVar::T => sw,
        Some(sw) => return Err(unsupported("risk", &sw)),
        None => Sweep::new(SweepVar::T, 1.5 * p.checkpoint_cost.max(1.0), 10.0 * t_ref, 100, true)?,
    };
    let error_law = s.error_distribution()?;
    let detection_law = s
        .detection_distribution()?
        .ok_or_else(|| Error::Scenario("risk needs platform.detection_rate".into()))?;
    let mut rows = Vec::new();
    let mut note = None;
    for t in sweep.values() {
        if t <= p.checkpoint_cost {
            continue;
        }
        let r = risk_report_with_laws(t, &policy, &s.workload, p, &error_law, &detection_law)?;
        note = note.or(r.note);
        rows.push(RiskRow {
            t,
            p_fail: r.p_fail,
            p_lat: r.p_lat,
            p_irrec: r.p_irrec,
            p_risk: r.p_risk,
            waste_total: waste_general(t, p)?.breakdown.waste_total,
        });
    }
    let solved = solve_t_min(&policy, &s.workload, p);
    let (t_min, recommended, code) = match &solved {
        Ok(sol) => (Some(sol.t_min), sol.recommended, EXIT_OK),
        Err(Error::Infeasible { .. }) => (None, t_ref, EXIT_REGIME),
        Err(_) => return solved.map(|_| EXIT_OK),
    };
    match opts.format.unwrap_or(Format::Csv) {
        Format::Json => json(
            out,
            &RiskDoc {
                scenario: &s.name,
                rows,
                t_min,
                t_opt: t_ref,
                recommended,
                note,
            },
        )?,
        Format::Csv => {
            writeln!(out, "T,p_fail,p_lat,p_irrec,p_risk,waste_total")?;
            for r in &rows {
                csv_row(out, &[r.t, r.p_fail, r.p_lat, r.p_irrec, r.p_risk, r.waste_total])?;
            }
            match t_min {
                Some(t) => writeln!(out, "# t_min={}", fmt_f64(t))?,
                None => writeln!(out, "# t_min=infeasible ({})", solved.unwrap_err())?,
            }
            writeln!(out, "# t_opt={}", fmt_f64(t_ref))?;
            writeln!(out, "# recommended={}", fmt_f64(recommended))?;
            if let Some(n) = note {
                writeln!(out, "# note={n}")?;
            }
        }
    }
    Ok(code)
}

// ---- pattern --------------------------------------------------------------

fn request(s: &Scenario) -> Result<PatternRequest> {
    s.pattern
        .ok_or_else(|| Error::Scenario("this command needs a [pattern] section".into()))
}

/// The pattern to execute: as given, or the optimum for the request.
fn resolve_pattern(s: &Scenario, req: &PatternRequest) -> Result<PatternSpec> {
    match (req.k, req.period) {
        (Some(k), Some(period)) => PatternSpec::new(req.mode, k, period),
        (Some(k), None) => {
            let co = pattern_coefficients(req.mode, k, &s.params, req.model)?;
            PatternSpec::new(req.mode, k, co.s_opt)
        }
        (None, _) => Ok(optimize_pattern(req.mode, &s.params, req.k_max, req.model)?.spec()),
    }
}

#[derive(Serialize)]
struct PatternRowDoc {
    k: u32,
    #[serde(rename = "V", skip_serializing_if = "Option::is_none")]
    v: Option<f64>,
    #[serde(rename = "S", skip_serializing_if = "Option::is_none")]
    s: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    s_opt: Option<f64>,
    waste: f64,
}

fn pattern(s: &Scenario, opts: &RunOptions, out: &mut dyn Write) -> Result<u8> {
    let req = request(s)?;
    let sweep = sweep_for(s, opts);
    let ks = |sw: Option<&Sweep>| -> Vec<u32> {
        match sw {
            Some(sw) if sw.variable == SweepVar::K => {
                let mut v: Vec<u32> = sw.values().iter().map(|x| x.round().max(1.0) as u32).collect();
                v.dedup();
                v
            }
            _ => (1..=req.k_max).collect(),
        }
    };
    let (header, rows): (&str, Vec<PatternRowDoc>) = match sweep {
        None
        | Some(Sweep {
            variable: SweepVar::K, ..
        }) => {
            let rows = ks(sweep.as_ref())
                .into_iter()
                .filter_map(|k| {
                    pattern_coefficients(req.mode, k, &s.params, req.model)
                        .ok()
                        .map(|co| (k, co))
                })
                .map(|(k, co)| PatternRowDoc {
                    k,
                    v: None,
                    s: None,
                    s_opt: Some(co.s_opt),
                    waste: co.waste_at(co.s_opt),
                })
                .collect();
            ("k,s_opt,waste", rows)
        }
        Some(sw) if sw.variable == SweepVar::V => {
            let mut rows = Vec::new();
            for v in sw.values() {
                let pv = s.params.with_verification(v);
                for k in 1..=req.k_max {
                    if let Ok(co) = pattern_coefficients(req.mode, k, &pv, req.model) {
                        rows.push(PatternRowDoc {
                            k,
                            v: Some(v),
                            s: None,
                            s_opt: Some(co.s_opt),
                            waste: co.waste_at(co.s_opt),
                        });
                    }
                }
            }
            ("k,V,s_opt,waste", rows)
        }
        Some(sw) if sw.variable == SweepVar::S => {
            let k = resolve_pattern(s, &req)?.k;
            let rows = sw
                .values()
                .into_iter()
                .filter_map(|len| {
                    let spec = PatternSpec::new(req.mode, k, len).ok()?;
                    let w = pattern_waste(&spec, &s.params, req.model).ok()?;
                    Some(PatternRowDoc {
                        k,
                        v: None,
                        s: Some(len),
                        s_opt: None,
                        waste: w.waste_total,
                    })
                })
                .collect();
            ("k,S,waste", rows)
        }
        Some(sw) => return Err(unsupported("pattern", &sw)),
    };
    let best = optimize_pattern(req.mode, &s.params, req.k_max, req.model)?;
    match opts.format.unwrap_or(Format::Csv) {
        Format::Json => {
            #[derive(Serialize)]
            struct Doc<'a> {
                scenario: &'a str,
                mode: crate::patterns::PatternMode,
                model: PatternModel,
                rows: Vec<PatternRowDoc>,
                k_opt: u32,
                s_opt: f64,
                waste: f64,
            }
            json(
                out,
                &Doc {
                    scenario: &s.name,
                    mode: req.mode,
                    model: req.model,
                    rows,
                    k_opt: best.k_opt,
                    s_opt: best.s_opt,
                    waste: best.waste,
                },
            )?;
        }
        Format::Csv => {
            writeln!(out, "{header}")?;
            for r in &rows {
                let mut cells = vec![f64::from(r.k)];
                cells.extend(r.v);
                cells.extend(r.s);
                cells.extend(r.s_opt);
                cells.push(r.waste);
                csv_row(out, &cells)?;
            }
            writeln!(out, "# k_opt={}", best.k_opt)?;
            writeln!(out, "# s_opt={}", fmt_f64(best.s_opt))?;
            writeln!(out, "# waste={}", fmt_f64(best.waste))?;
        }
    }
    Ok(EXIT_OK)
}

// ---- simulate -------------------------------------------------------------

fn sim_kind(s: &Scenario) -> Result<SimKind> {
    match (
        s.simulation.model,
        s.policy.is_some() || s.params.detection_rate.is_some(),
        s.pattern.is_some(),
    ) {
        (Some(k), _, _) => Ok(k),
        (None, true, _) => Ok(SimKind::BoundedStorage),
        (None, false, true) => Ok(SimKind::Pattern),
        _ => Err(Error::Scenario(
            "nothing to simulate: give a policy, a detection rate or a pattern".into(),
        )),
    }
}

/// Period for bounded-storage runs: as given, else max(T_min, T_opt).
fn storage_period(s: &Scenario) -> Result<f64> {
    if let Some(t) = s.simulation.period {
        return Ok(t);
    }
    match s.policy {
        Some(pol) => match solve_t_min(&pol, &s.workload, &s.params) {
            Ok(sol) => Ok(sol.recommended),
            Err(Error::Infeasible { .. }) => reference_period(&s.params),
            Err(e) => Err(e),
        },
        None => reference_period(&s.params),
    }
}

fn base_config(s: &Scenario, model: SimModel, workload: WorkloadSpec, opts: &RunOptions) -> Result<SimConfig> {
    let detection_law = match model {
        SimModel::BoundedStorage { .. } => Some(
            s.detection_distribution()?
                .ok_or_else(|| Error::Scenario("bounded-storage simulation needs platform.detection_rate".into()))?,
        ),
        SimModel::Pattern(_) => None,
    };
    Ok(SimConfig {
        model,
        workload,
        params: s.params,
        error_law: s.error_distribution()?,
        detection_law,
        trials: s.trials(opts.trials),
        seed: opts.seed.unwrap_or(s.simulation.seed),
        max_sim_time: s.simulation.max_sim_time,
        record_trials: false,
    })
}

fn sim_model(s: &Scenario) -> Result<SimModel> {
    Ok(match sim_kind(s)? {
        SimKind::BoundedStorage => {
            let retention = match (s.simulation.unbounded_storage, s.policy) {
                (false, Some(pol)) => Retention::Last(pol.keep),
                _ => Retention::Unbounded,
            };
            SimModel::BoundedStorage {
                period: storage_period(s)?,
                retention,
            }
        }
        SimKind::Pattern => SimModel::Pattern(resolve_pattern(s, &request(s)?)?),
    })
}

#[derive(Serialize)]
struct SimulateDoc<'a> {
    scenario: &'a str,
    model: SimModel,
    failure_free_makespan: f64,
    irrecoverable_per_attempt: f64,
    result: SimResult,
}

fn simulate_cmd(s: &Scenario, opts: &RunOptions, out: &mut dyn Write) -> Result<u8> {
    if let Some(sw) = opts.sweep {
        return Err(unsupported("simulate", &sw));
    }
    let format = opts.format.unwrap_or(Format::Json);
    let mut cfg = base_config(s, sim_model(s)?, s.workload, opts)?;
    cfg.record_trials = format == Format::Csv;
    let result = simulate(&cfg)?;
    match format {
        Format::Json => json(
            out,
            &SimulateDoc {
                scenario: &s.name,
                model: cfg.model,
                failure_free_makespan: cfg.failure_free_makespan()?,
                irrecoverable_per_attempt: result.irrecoverable_per_attempt(),
                result,
            },
        )?,
        Format::Csv => {
            writeln!(out, "trial,makespan,attempts,irrecoverable")?;
            for r in result.per_trial.iter().flatten() {
                writeln!(
                    out,
                    "{},{},{},{}",
                    r.trial,
                    fmt_f64(r.makespan),
                    r.attempts,
                    u8::from(r.irrecoverable > 0)
                )?;
            }
        }
    }
    Ok(EXIT_OK)
}

// ---- validate -------------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub analytic: f64,
    pub simulated: f64,
    pub delta: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Check {
    fn two_sided(name: &str, analytic: f64, simulated: f64, tolerance: f64) -> Self {
        let delta = simulated - analytic;
        Check {
            name: name.into(),
            analytic,
            simulated,
            delta,
            tolerance,
            pass: delta.abs() <= tolerance,
        }
    }
}

#[derive(Serialize)]
struct ValidateDoc<'a> {
    scenario: &'a str,
    trials: u64,
    seed: u64,
    checks: Vec<Check>,
    pass: bool,
}

fn validate(s: &Scenario, opts: &RunOptions, out: &mut dyn Write) -> Result<u8> {
    let tol = s.tolerances;
    let p = &s.params;
    let mut checks = Vec::new();

    if p.detection_rate.is_some() {
        let t = match s.simulation.period {
            Some(t) => t,
            None => reference_period(p)?,
        };
        let w = t - p.checkpoint_cost;
        let single = WorkloadSpec::new(w)?;
        let chunk = simulate(&base_config(
            s,
            SimModel::BoundedStorage {
                period: t,
                retention: Retention::Unbounded,
            },
            single,
            opts,
        )?)?;
        let analytic = expected_makespan_chunk(w, p)?;
        checks.push(Check::two_sided(
            "chunk_makespan",
            analytic,
            chunk.mean_makespan,
            (tol.makespan * analytic).max(tol.sigmas * chunk.makespan_stderr),
        ));

        let run = simulate(&base_config(
            s,
            SimModel::BoundedStorage {
                period: t,
                retention: Retention::Unbounded,
            },
            s.workload,
            opts,
        )?)?;
        checks.push(Check::two_sided(
            "waste_firstorder",
            waste_general(t, p)?.breakdown.waste_total,
            run.waste_mean,
            tol.waste.max(tol.sigmas * run.waste_stderr),
        ));

        if let Some(pol) = s.policy {
            let bounded = simulate(&base_config(
                s,
                SimModel::BoundedStorage {
                    period: t,
                    retention: Retention::Last(pol.keep),
                },
                s.workload,
                opts,
            )?)?;
            let analytic = risk_report_with_laws(
                t,
                &pol,
                &s.workload,
                p,
                &s.error_distribution()?,
                &s.detection_distribution()?.expect("checked above"),
            )?
            .p_risk;
            let simulated = bounded.irrecoverable_per_attempt();
            let tolerance = tol.sigmas * bounded.irrecoverable_stderr();
            let delta = simulated - analytic;
            // one-sided: the analytic risk is an upper bound
            checks.push(Check {
                name: "irrecoverable_bound".into(),
                analytic,
                simulated,
                delta,
                tolerance,
                pass: delta <= tolerance,
            });
        }
    }

    if let Some(req) = s.pattern {
        let spec = resolve_pattern(s, &req)?;
        let cfg = base_config(s, SimModel::Pattern(spec), s.workload, opts)?;
        let run = simulate(&cfg)?;
        checks.push(Check::two_sided(
            "pattern_waste",
            pattern_waste(&spec, p, req.model)?.waste_total,
            run.waste_mean,
            (2.0 * tol.waste).max(tol.sigmas * run.waste_stderr),
        ));
    }

    if checks.is_empty() {
        return Err(Error::Scenario(
            "nothing to validate: give a detection rate or a pattern".into(),
        ));
    }
    let pass = checks.iter().all(|c| c.pass);
    match opts.format.unwrap_or(Format::Json) {
        Format::Json => json(
            out,
            &ValidateDoc {
                scenario: &s.name,
                trials: s.trials(opts.trials),
                seed: opts.seed.unwrap_or(s.simulation.seed),
                checks,
                pass,
            },
        )?,
        Format::Csv => {
            writeln!(out, "name,analytic,simulated,delta,tolerance,pass")?;
            for c in &checks {
                writeln!(
                    out,
                    "{},{},{},{},{},{}",
                    c.name,
                    fmt_f64(c.analytic),
                    fmt_f64(c.simulated),
                    fmt_f64(c.delta),
                    fmt_f64(c.tolerance),
                    c.pass
                )?;
            }
        }
    }
    Ok(if pass { EXIT_OK } else { EXIT_VALIDATION })
}
