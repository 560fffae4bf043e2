//! Periodic verification/checkpoint patterns.
//!
//! Two shapes are modelled. `CheckpointHeavy` runs `k` segments of work each
//! followed by a checkpoint, with a single verification placed just before
//! the last checkpoint. `VerificationHeavy` runs `k` segments each followed
//! by a verification, with a single checkpoint after the last one. In both
//! cases the pattern ends with a verified checkpoint, so a rollback never
//! goes further back than the end of the previous pattern.
//!
//! The failure waste is affine in the pattern length `S`, so the total waste
//! has the form `a S + b + c / S`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{validate_params, ModelFamily, PlatformParams, WasteBreakdown};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PatternMode {
    /// k checkpoints, 1 verification
    CheckpointHeavy,
    /// k verifications, 1 checkpoint
    VerificationHeavy,
}

/// How a CheckpointHeavy rollback locates the last valid checkpoint.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RollbackSearch {
    /// Walk back one checkpoint at a time, verifying each.
    #[default]
    Linear,
    /// Bisect over the pattern's checkpoints. Uses the natural log.
    Binary,
}

/// Which failure-waste expression to use for VerificationHeavy patterns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VerifiedFailureModel {
    /// The closed form with its 1/(2 mu_e) prefactor.
    #[default]
    Published,
    /// Direct average of the per-segment losses, with a 1/mu_e prefactor.
    SegmentAverage,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct PatternModel {
    pub rollback: RollbackSearch,
    pub verified_failure: VerifiedFailureModel,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PatternSpec {
    pub mode: PatternMode,
    pub k: u32,
    /// Pattern length S in seconds.
    pub period: f64,
}

/// Fixed (non-work) cost of one pattern: kC + V or kV + C.
pub fn fixed_cost(mode: PatternMode, k: u32, params: &PlatformParams) -> Result<f64> {
    let v = params.require_v()?;
    let k = f64::from(k);
    Ok(match mode {
        PatternMode::CheckpointHeavy => k * params.checkpoint_cost + v,
        PatternMode::VerificationHeavy => k * v + params.checkpoint_cost,
    })
}

impl PatternSpec {
    pub fn new(mode: PatternMode, k: u32, period: f64) -> Result<Self> {
        if k == 0 {
            return Err(Error::Domain("pattern needs k >= 1".into()));
        }
        if !(period > 0.0) || !period.is_finite() {
            return Err(Error::Domain(format!("pattern period must be positive, got {period}")));
        }
        Ok(PatternSpec { mode, k, period })
    }

    /// Work per segment; errors when the period does not cover the fixed costs.
    pub fn segment_work(&self, params: &PlatformParams) -> Result<f64> {
        let fixed = fixed_cost(self.mode, self.k, params)?;
        if !(self.period > fixed) {
            return Err(Error::Domain(format!(
                "pattern period {} does not exceed its fixed cost {fixed}",
                self.period
            )));
        }
        Ok((self.period - fixed) / f64::from(self.k))
    }
}

fn check_mode(spec: &PatternSpec, mode: PatternMode) -> Result<()> {
    if spec.mode != mode {
        return Err(Error::Domain(format!(
            "expected a {mode:?} pattern, got {:?}",
            spec.mode
        )));
    }
    Ok(())
}

/// Time lost when an error in segment `i` (1-based) of a CheckpointHeavy
/// pattern is caught by its verification, walking back linearly.
pub fn tlost_kc1v(i: u32, spec: &PatternSpec, params: &PlatformParams) -> Result<f64> {
    check_mode(spec, PatternMode::CheckpointHeavy)?;
    let k = spec.k;
    if i == 0 || i > k {
        return Err(Error::Domain(format!("segment index {i} outside 1..={k}")));
    }
    let w = spec.segment_work(params)?;
    let (r, c, v) = (params.recovery_cost, params.checkpoint_cost, params.require_v()?);
    let kf = f64::from(k);
    Ok(if i == 1 {
        // first segment: the pattern-start checkpoint is already verified
        kf * (r + w) + (kf - 1.0) * (c + v) + v
    } else if i == k {
        r + v + w + v
    } else {
        let back = f64::from(k - i + 1);
        back * (r + v + w) + (back - 1.0) * c + v
    })
}

/// Time lost when an error in segment `i` of a VerificationHeavy pattern is
/// caught by verification `i`.
pub fn tlost_kv1c(i: u32, spec: &PatternSpec, params: &PlatformParams) -> Result<f64> {
    check_mode(spec, PatternMode::VerificationHeavy)?;
    if i == 0 || i > spec.k {
        return Err(Error::Domain(format!("segment index {i} outside 1..={}", spec.k)));
    }
    let w = spec.segment_work(params)?;
    Ok(params.recovery_cost + f64::from(i) * (params.require_v()? + w))
}

/// Failure waste of a CheckpointHeavy pattern with linear walk-back.
pub fn waste_fail_kc1v(spec: &PatternSpec, params: &PlatformParams) -> Result<f64> {
    check_mode(spec, PatternMode::CheckpointHeavy)?;
    spec.segment_work(params)?;
    let (alpha, beta) = kc1v_affine(spec.k, params, RollbackSearch::Linear)?;
    Ok(alpha + beta * spec.period)
}

/// Failure waste of a CheckpointHeavy pattern with bisecting rollback.
/// At k = 1 there is nothing to search and the linear value is returned.
pub fn waste_fail_kc1v_bsearch(spec: &PatternSpec, params: &PlatformParams) -> Result<f64> {
    check_mode(spec, PatternMode::CheckpointHeavy)?;
    spec.segment_work(params)?;
    let (alpha, beta) = kc1v_affine(spec.k, params, RollbackSearch::Binary)?;
    Ok(alpha + beta * spec.period)
}

/// Failure waste of a VerificationHeavy pattern.
pub fn waste_fail_kv1c(spec: &PatternSpec, params: &PlatformParams, model: VerifiedFailureModel) -> Result<f64> {
    check_mode(spec, PatternMode::VerificationHeavy)?;
    spec.segment_work(params)?;
    let (alpha, beta) = kv1c_affine(spec.k, params, model)?;
    Ok(alpha + beta * spec.period)
}

/// (alpha, beta) with waste_fail = alpha + beta S for CheckpointHeavy.
fn kc1v_affine(k: u32, params: &PlatformParams, search: RollbackSearch) -> Result<(f64, f64)> {
    let v = params.require_v()?;
    let (r, c, d) = (params.recovery_cost, params.checkpoint_cost, params.downtime);
    let kf = f64::from(k);
    let rollback = match search {
        RollbackSearch::Binary if k > 1 => (r + v) * 2.0 * kf * kf.ln(),
        _ => (r + v) * kf * kf,
    };
    let scale = 1.0 / (2.0 * kf * params.mu_e());
    let alpha = (rollback + (2.0 * d + r + 2.0 * v - 2.0 * c) * kf - 3.0 * v) * scale;
    let beta = (kf + 1.0) * scale;
    Ok((alpha, beta))
}

/// (alpha, beta) with waste_fail = alpha + beta S for VerificationHeavy.
fn kv1c_affine(k: u32, params: &PlatformParams, model: VerifiedFailureModel) -> Result<(f64, f64)> {
    params.require_v()?;
    let kf = f64::from(k);
    let prefactor = match model {
        VerifiedFailureModel::Published => 1.0 / (2.0 * params.mu_e()),
        VerifiedFailureModel::SegmentAverage => 1.0 / params.mu_e(),
    };
    let ratio = (kf + 1.0) / (2.0 * kf);
    let alpha = prefactor * (params.downtime + params.recovery_cost - ratio * params.checkpoint_cost);
    let beta = prefactor * ratio;
    Ok((alpha, beta))
}

fn affine(mode: PatternMode, k: u32, params: &PlatformParams, model: PatternModel) -> Result<(f64, f64)> {
    match mode {
        PatternMode::CheckpointHeavy => kc1v_affine(k, params, model.rollback),
        PatternMode::VerificationHeavy => kv1c_affine(k, params, model.verified_failure),
    }
}

/// Failure waste of any pattern under the selected model variants.
pub fn waste_fail(spec: &PatternSpec, params: &PlatformParams, model: PatternModel) -> Result<f64> {
    spec.segment_work(params)?;
    let (alpha, beta) = affine(spec.mode, spec.k, params, model)?;
    Ok(alpha + beta * spec.period)
}

/// Waste breakdown of a pattern, assembled from its two components.
pub fn pattern_waste(spec: &PatternSpec, params: &PlatformParams, model: PatternModel) -> Result<WasteBreakdown> {
    validate_params(params, ModelFamily::Verification)?;
    let fail = waste_fail(spec, params, model)?;
    let ff = fixed_cost(spec.mode, spec.k, params)? / spec.period;
    Ok(WasteBreakdown::combined(ff, fail, fail * params.mu_e()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PatternCoefficients {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    /// sqrt(c / a), raised to the fixed cost when below it.
    pub s_opt: f64,
    pub clamped: bool,
    /// Fixed cost of the pattern (kC + V or kV + C).
    pub floor: f64,
}

impl PatternCoefficients {
    pub fn waste_at(&self, s: f64) -> f64 {
        self.a * s + self.b + self.c / s
    }
}

/// Coefficients of waste_total(S) = a S + b + c / S.
///
/// With waste_fail = alpha + beta S and waste_ff = F / S, the product term of
/// the recombination only feeds the constant and 1/S terms:
/// a = beta, b = alpha - beta F, c = F (1 - alpha).
pub fn pattern_coefficients(
    mode: PatternMode,
    k: u32,
    params: &PlatformParams,
    model: PatternModel,
) -> Result<PatternCoefficients> {
    validate_params(params, ModelFamily::Verification)?;
    if k == 0 {
        return Err(Error::Domain("pattern needs k >= 1".into()));
    }
    let (alpha, beta) = affine(mode, k, params, model)?;
    let floor = fixed_cost(mode, k, params)?;
    let (a, b, c) = (beta, alpha - beta * floor, floor * (1.0 - alpha));
    if !(a > 0.0) || !(c > 0.0) {
        return Err(Error::Regime(format!(
            "waste coefficients a = {a}, c = {c} leave no interior optimum (k = {k}); mu_e is too small for the first-order model"
        )));
    }
    let unclamped = (c / a).sqrt();
    let clamped = unclamped < floor;
    Ok(PatternCoefficients {
        a,
        b,
        c,
        s_opt: if clamped { floor } else { unclamped },
        clamped,
        floor,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PatternRow {
    pub k: u32,
    pub s_opt: f64,
    pub waste: f64,
    pub clamped: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PatternOptimum {
    pub mode: PatternMode,
    pub k_opt: u32,
    pub s_opt: f64,
    pub waste: f64,
    pub table: Vec<PatternRow>,
}

impl PatternOptimum {
    pub fn spec(&self) -> PatternSpec {
        PatternSpec {
            mode: self.mode,
            k: self.k_opt,
            period: self.s_opt,
        }
    }
}

pub const DEFAULT_K_MAX: u32 = 50;

/// Scans k = 1..=k_max, optimising S for each k; ties go to the smaller k.
/// Values of k without an interior optimum are left out of the table.
pub fn optimize_pattern(
    mode: PatternMode,
    params: &PlatformParams,
    k_max: u32,
    model: PatternModel,
) -> Result<PatternOptimum> {
    if k_max == 0 {
        return Err(Error::Domain("k_max must be at least 1".into()));
    }
    validate_params(params, ModelFamily::Verification)?;
    let table: Vec<PatternRow> = (1..=k_max)
        .filter_map(|k| pattern_coefficients(mode, k, params, model).ok().map(|co| (k, co)))
        .map(|(k, co)| PatternRow {
            k,
            s_opt: co.s_opt,
            waste: co.waste_at(co.s_opt),
            clamped: co.clamped,
        })
        .collect();
    let best = table
        .iter()
        .copied()
        .reduce(|best, row| if row.waste < best.waste { row } else { best })
        .ok_or_else(|| Error::Regime(format!("no k in 1..={k_max} admits a feasible pattern")))?;
    Ok(PatternOptimum {
        mode,
        k_opt: best.k,
        s_opt: best.s_opt,
        waste: best.waste,
        table,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridPoint {
    pub k: u32,
    pub verification_cost: f64,
    pub s_opt: f64,
    pub waste: f64,
}

/// Optimised waste over a (k, V) grid.
pub fn waste_grid(
    mode: PatternMode,
    params: &PlatformParams,
    ks: impl IntoIterator<Item = u32> + Clone,
    vs: &[f64],
    model: PatternModel,
) -> Result<Vec<GridPoint>> {
    let mut out = Vec::new();
    for &v in vs {
        let p = params.with_verification(v);
        for k in ks.clone() {
            let co = pattern_coefficients(mode, k, &p, model)?;
            out.push(GridPoint {
                k,
                verification_cost: v,
                s_opt: co.s_opt,
                waste: co.waste_at(co.s_opt),
            });
        }
    }
    Ok(out)
}
