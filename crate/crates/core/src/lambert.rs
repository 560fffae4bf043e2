//! Principal branch of the Lambert W function on [-1/e, inf).
//!
//! Halley iteration, seeded from the branch-point series when the argument
//! is close to -1/e and from Winitzki's logarithmic approximation elsewhere.

use std::f64::consts::E;

use serde::Serialize;

use crate::error::{Error, Result};

const INV_E: f64 = 1.0 / E;
const MAX_ITERATIONS: u32 = 50;
/// Arguments this far below -1/e are still accepted as the branch point.
const BRANCH_SLACK: f64 = 1e-15;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LambertResult {
    pub value: f64,
    pub iterations: u32,
    /// |value * exp(value) - x|
    pub residual: f64,
}

fn residual_tolerance(x: f64) -> f64 {
    1e-12 * x.abs().max(1.0)
}

/// W0(x): the solution w >= -1 of w * exp(w) = x.
pub fn lambert_w0(x: f64) -> Result<LambertResult> {
    if x.is_nan() {
        return Err(Error::Domain("lambert_w0 of NaN".into()));
    }
    if x < -INV_E - BRANCH_SLACK {
        return Err(Error::Domain(format!(
            "lambert_w0 argument {x} is below the branch point -1/e"
        )));
    }
    if x == f64::INFINITY {
        return Ok(LambertResult {
            value: f64::INFINITY,
            iterations: 0,
            residual: 0.0,
        });
    }
    if x == 0.0 {
        return Ok(LambertResult {
            value: 0.0,
            iterations: 0,
            residual: 0.0,
        });
    }
    // distance from the branch point, scaled: 1 + e*x
    let offset = E * x + 1.0;
    if offset <= 0.0 {
        return Ok(LambertResult {
            value: -1.0,
            iterations: 0,
            residual: (x + INV_E).abs(),
        });
    }

    let mut w = initial_guess(x, offset);
    let mut iterations = 0;
    while iterations < MAX_ITERATIONS {
        iterations += 1;
        let ew = w.exp();
        let f = w * ew - x;
        let wp1 = w + 1.0;
        if wp1 == 0.0 {
            break;
        }
        let denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1);
        if denom == 0.0 || !denom.is_finite() {
            break;
        }
        let step = f / denom;
        let next = (w - step).max(-1.0);
        let done = (next - w).abs() <= 4.0 * f64::EPSILON * next.abs().max(1e-300);
        w = next;
        if done {
            break;
        }
    }

    let residual = (w * w.exp() - x).abs();
    if residual > residual_tolerance(x) || !w.is_finite() {
        return Err(Error::Domain(format!(
            "lambert_w0({x}) did not converge: w={w}, residual={residual:e} after {iterations} iterations"
        )));
    }
    Ok(LambertResult {
        value: w,
        iterations,
        residual,
    })
}

fn initial_guess(x: f64, offset: f64) -> f64 {
    if offset < 0.25 {
        // series in p = sqrt(2(1 + e x)) around the branch point
        let p = (2.0 * offset).sqrt();
        -1.0 + p * (1.0 + p * (-1.0 / 3.0 + p * (11.0 / 72.0 + p * (-43.0 / 540.0))))
    } else {
        let l = x.ln_1p();
        l * (1.0 - (1.0 + l).ln() / (2.0 + l))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent oracle: bisection of w e^w = x on [lo, hi].
    fn bisect(x: f64, mut lo: f64, mut hi: f64) -> f64 {
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid * mid.exp() > x {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn identity_and_branch_point() {
        assert_eq!(lambert_w0(0.0).unwrap().value, 0.0);
        let b = lambert_w0(-INV_E).unwrap();
        assert!((b.value + 1.0).abs() < 1e-7, "{b:?}");
        // slack below the branch point still maps to -1
        assert!((lambert_w0(-INV_E - 5e-16).unwrap().value + 1.0).abs() < 1e-7);
    }

    #[test]
    fn negative_argument_matches_bisection() {
        let oracle = bisect(-0.2, -1.0, 0.0);
        assert!((oracle + 0.25917).abs() < 1e-5);
        let w = lambert_w0(-0.2).unwrap();
        assert!((w.value - oracle).abs() < 1e-13, "{} vs {oracle}", w.value);
        assert!(w.value > -1.0 && w.value < 0.0);
    }

    #[test]
    fn positive_arguments_match_bisection() {
        for x in [1e-10, 0.5, 1.0, E, 10.0, 1e3, 1e8] {
            let oracle = bisect(x, 0.0, x.max(1.0));
            let w = lambert_w0(x).unwrap();
            assert!((w.value - oracle).abs() <= 1e-12 * oracle.abs().max(1.0), "x={x}");
        }
        assert!((lambert_w0(1.0).unwrap().value - 0.567_143_290_409_783_8).abs() < 1e-15);
    }

    #[test]
    fn rejects_below_branch_point() {
        let e = lambert_w0(-0.5).unwrap_err();
        assert!(e.to_string().contains("branch point"));
        assert!(lambert_w0(f64::NAN).is_err());
    }

    #[test]
    fn near_branch_point_residual() {
        for d in [1e-14, 1e-10, 1e-6, 1e-3] {
            let x = -INV_E + d;
            let r = lambert_w0(x).unwrap();
            assert!(r.residual <= residual_tolerance(x));
            assert!(r.value > -1.0 && r.value < 0.0);
        }
    }

    #[test]
    fn strictly_increasing_on_grid() {
        let mut prev = f64::NEG_INFINITY;
        let mut x = -INV_E + 1e-9;
        while x < 50.0 {
            let w = lambert_w0(x).unwrap().value;
            assert!(w > prev, "not increasing at {x}");
            prev = w;
            x += 0.013;
        }
    }
}
