//! First-order waste model, valid for arbitrary error and detection laws as
//! long as the period and the per-error losses are small against the MTBF.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{validate_params, ModelFamily, PlatformParams, WasteBreakdown};

/// Factor used to decide whether a "much smaller than" condition holds.
pub const REGIME_FACTOR: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RegimeFlags {
    /// mu_d + D + R <= mu_e / 10
    pub losses_small: bool,
    /// T <= mu_e / 10
    pub period_small: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FirstOrderReport {
    pub period: f64,
    pub breakdown: WasteBreakdown,
    /// Waste-optimal period, when the first-order regime admits one.
    pub t_opt: Option<f64>,
    pub regime: RegimeFlags,
}

/// Waste for period `period`, including the fault-free/failure cross term.
pub fn waste_general(period: f64, params: &PlatformParams) -> Result<FirstOrderReport> {
    validate_params(params, ModelFamily::LatencyDetection)?;
    let mu_d = params.require_mu_d()?;
    let c = params.checkpoint_cost;
    if !(period > c) {
        return Err(Error::Domain(format!(
            "period must exceed checkpoint cost (T = {period}, C = {c})"
        )));
    }
    let mu_e = params.mu_e();
    let losses = params.downtime + params.recovery_cost + mu_d;

    let waste_ff = c / period;
    let lost = period / 2.0 + losses;
    let waste_fail = lost / mu_e;
    let waste_total = period / (2.0 * mu_e) + c * (1.0 - losses / mu_e) / period + (losses - c / 2.0) / mu_e;

    Ok(FirstOrderReport {
        period,
        breakdown: WasteBreakdown {
            waste_ff,
            waste_fail,
            waste_total,
            time_lost_per_error: lost,
        },
        t_opt: period_firstorder(params).ok(),
        regime: RegimeFlags {
            losses_small: losses <= mu_e / REGIME_FACTOR,
            period_small: period <= mu_e / REGIME_FACTOR,
        },
    })
}

/// Waste-minimising period sqrt(2 C (mu_e - D - R - mu_d)).
pub fn period_firstorder(params: &PlatformParams) -> Result<f64> {
    validate_params(params, ModelFamily::LatencyDetection)?;
    let mu_d = params.require_mu_d()?;
    let radicand = params.mu_e() - params.downtime - params.recovery_cost - mu_d;
    if !(radicand > 0.0) {
        return Err(Error::Regime(format!(
            "mu_e - D - R - mu_d = {radicand} is not positive; use the exact Exponential model"
        )));
    }
    Ok((2.0 * params.checkpoint_cost * radicand).sqrt())
}

/// waste_fail + waste_ff - waste_fail * waste_ff
pub fn combine_waste(waste_ff: f64, waste_fail: f64) -> Result<f64> {
    for (name, v) in [("waste_ff", waste_ff), ("waste_fail", waste_fail)] {
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::Domain(format!("{name} = {v} is outside [0, 1]")));
        }
    }
    Ok(waste_fail + waste_ff - waste_fail * waste_ff)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::YEAR;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn scenario(c: f64) -> PlatformParams {
        let le = 1e5 / (100.0 * YEAR);
        PlatformParams::latency(c, c, 0.0, le, 30.0 * le)
    }

    /// Term-by-term evaluation of the loss model, as an oracle on the polynomial.
    fn waste_by_terms(t: f64, c: f64, losses: f64, mu_e: f64) -> f64 {
        let ff = c / t;
        let fail = (t / 2.0 + losses) / mu_e;
        1.0 - (1.0 - ff) * (1.0 - fail)
    }

    #[test]
    fn reference_periods() {
        let t = period_firstorder(&scenario(600.0)).unwrap();
        assert!((t - 5988.46892).abs() < 1e-4);
        assert!((t / 60.0 - 100.0).abs() < 1.0);
        let t = period_firstorder(&scenario(60.0)).unwrap();
        assert!((t - 1910.75273).abs() < 1e-4);
        assert!(t < 35.0 * 60.0);
    }

    #[test]
    fn reduces_to_young_leading_term() {
        let p = PlatformParams::latency(600.0, 0.0, 0.0, 1.0 / 31_536.0, 1e300);
        let t = period_firstorder(&p).unwrap();
        assert!((t - (2.0 * 600.0 * 31_536.0f64).sqrt()).abs() < 1e-9);
    }

    #[test]
    fn regime_error_when_losses_exceed_mtbf() {
        let p = PlatformParams::latency(60.0, 10.0, 0.0, 1.0 / 1000.0, 1.0 / 2000.0);
        assert!(matches!(period_firstorder(&p), Err(Error::Regime(_))));
    }

    #[test]
    fn waste_reference_value() {
        let p = scenario(600.0);
        let r = waste_general(5988.0, &p).unwrap();
        let oracle = waste_by_terms(5988.0, 600.0, 600.0 + 1051.2, 31_536.0);
        assert!((r.breakdown.waste_total - oracle).abs() < 1e-12);
        assert!((r.breakdown.waste_total - 0.2327).abs() < 1e-3);
        assert!(r.breakdown.recomposition_error() < 1e-12);
        assert!(r.regime.losses_small && !r.regime.period_small);
    }

    #[test]
    fn waste_special_cases() {
        let (c, mu) = (600.0, 31_536.0);
        let p = PlatformParams::latency(c, 0.0, 0.0, 1.0 / mu, 1e300);
        let t = (2.0 * c * mu).sqrt();
        let r = waste_general(t, &p).unwrap();
        let expect = (2.0 * c / mu).sqrt() - c / (2.0 * mu);
        assert!((r.breakdown.waste_total - expect).abs() < 1e-12);

        let p = PlatformParams::latency(0.0, 100.0, 30.0, 1.0 / mu, 1.0 / 500.0);
        let r = waste_general(4000.0, &p).unwrap();
        let expect = 4000.0 / (2.0 * mu) + 630.0 / mu;
        assert!((r.breakdown.waste_total - expect).abs() < 1e-12);
    }

    #[test]
    fn period_must_exceed_checkpoint() {
        let e = waste_general(600.0, &scenario(600.0)).unwrap_err();
        assert!(e.to_string().contains("period must exceed checkpoint cost"));
    }

    #[test]
    fn combine_examples() {
        assert_eq!(combine_waste(0.0, 0.37).unwrap(), 0.37);
        assert_eq!(combine_waste(1.0, 0.37).unwrap(), 1.0);
        assert!((combine_waste(0.1, 0.2).unwrap() - 0.28).abs() < 1e-15);
        assert!(combine_waste(-0.1, 0.2).is_err());
        assert!(combine_waste(0.1, 1.2).is_err());
    }

    fn golden_min(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
        let g = (5f64.sqrt() - 1.0) / 2.0;
        while (hi - lo) > 1e-9 * hi {
            let a = hi - g * (hi - lo);
            let b = lo + g * (hi - lo);
            if f(a) < f(b) {
                hi = b;
            } else {
                lo = a;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn numeric_argmin_matches_closed_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..100 {
            let mu = 10f64.powf(rng.random_range(3.5..6.0));
            let c = mu * 10f64.powf(rng.random_range(-5.0..-2.5));
            let r = mu * 10f64.powf(rng.random_range(-5.0..-2.0));
            let d = mu * 10f64.powf(rng.random_range(-5.0..-2.0));
            let mu_d = mu * 10f64.powf(rng.random_range(-4.0..-1.5));
            let p = PlatformParams::latency(c, r, d, 1.0 / mu, 1.0 / mu_d);
            let f = |t: f64| waste_general(t, &p).unwrap().breakdown.waste_total;
            let t_num = golden_min(f, c * (1.0 + 1e-9), mu);
            let t_opt = period_firstorder(&p).unwrap();
            assert!((t_num - t_opt).abs() <= 1e-4 * t_opt, "{t_num} vs {t_opt}");
            // convex on a grid
            let grid: Vec<f64> = (1..200).map(|i| c + (mu - c) * i as f64 / 200.0).collect();
            for w in grid.windows(3) {
                assert!(f(w[0]) - 2.0 * f(w[1]) + f(w[2]) >= -1e-12);
            }
        }
    }
}
