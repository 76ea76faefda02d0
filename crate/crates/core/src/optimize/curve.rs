//! The low-dimensional similarity curve `w = (1 + a d^{2b})⁻¹` and the
//! least-squares fit of `(a, b)` to a target profile set by `min_dist`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Shape parameters of the low-dimensional weight curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurveParams {
    pub a: f64,
    pub b: f64,
}

impl CurveParams {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a > 0.0 && a.is_finite() && b > 0.0 && b.is_finite()) {
            return Err(Error::usage(format!(
                "curve parameters must be positive and finite (a = {a}, b = {b})"
            )));
        }
        Ok(Self { a, b })
    }
}

/// `(1 + a · dist_sq^b)⁻¹`.
#[inline]
pub fn low_dim_weight(dist_sq: f64, curve: CurveParams) -> f64 {
    1.0 / (1.0 + curve.a * dist_sq.powf(curve.b))
}

/// Number of evenly spaced samples on `(0, 3]` used by the fit.
pub const FIT_SAMPLES: usize = 300;
/// Largest accepted RMS residual of the fit.
pub const FIT_MAX_RMS: f64 = 0.05;

/// Fitted parameters with the achieved RMS residual.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveFit {
    pub params: CurveParams,
    pub rms_residual: f64,
}

/// Target profile: flat at 1 up to `min_dist`, then `exp(-(d - min_dist))`.
pub fn target_profile(d: f64, min_dist: f64) -> f64 {
    if d <= min_dist {
        1.0
    } else {
        (-(d - min_dist)).exp()
    }
}

/// Fits `(a, b)` for `min_dist ∈ (0, 1]`.
pub fn fit_curve(min_dist: f64) -> Result<CurveParams> {
    fit_curve_report(min_dist).map(|f| f.params)
}

/// Levenberg–Marquardt least squares of `(1 + a d^{2b})⁻¹` against
/// [`target_profile`] on `d = 3i / 300, i = 1..=300`.
pub fn fit_curve_report(min_dist: f64) -> Result<CurveFit> {
    if !(min_dist > 0.0 && min_dist <= 1.0) {
        return Err(Error::usage(format!("min_dist must lie in (0, 1], got {min_dist}")));
    }
    let xs: Vec<f64> = (1..=FIT_SAMPLES).map(|i| 3.0 * i as f64 / FIT_SAMPLES as f64).collect();
    let ys: Vec<f64> = xs.iter().map(|&d| target_profile(d, min_dist)).collect();

    let sse = |a: f64, b: f64| -> f64 {
        xs.iter()
            .zip(&ys)
            .map(|(&d, &t)| {
                let r = 1.0 / (1.0 + a * d.powf(2.0 * b)) - t;
                r * r
            })
            .sum()
    };

    let (mut a, mut b) = (1.0, 1.0);
    let mut cost = sse(a, b);
    let mut lambda = 1e-3;
    for _ in 0..500 {
        // normal equations J^T J and J^T r
        let (mut jaa, mut jab, mut jbb, mut ga, mut gb) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for (&d, &t) in xs.iter().zip(&ys) {
            let p = d.powf(2.0 * b);
            let f = 1.0 / (1.0 + a * p);
            let r = f - t;
            let da = -p * f * f;
            let db = -2.0 * a * p * d.ln() * f * f;
            jaa += da * da;
            jab += da * db;
            jbb += db * db;
            ga += da * r;
            gb += db * r;
        }
        let mut improved = false;
        while lambda < 1e12 {
            let (maa, mbb) = (jaa * (1.0 + lambda), jbb * (1.0 + lambda));
            let det = maa * mbb - jab * jab;
            if det.abs() < f64::MIN_POSITIVE {
                lambda *= 10.0;
                continue;
            }
            let step_a = -(mbb * ga - jab * gb) / det;
            let step_b = -(maa * gb - jab * ga) / det;
            let (na, nb) = (a + step_a, b + step_b);
            if na > 0.0 && nb > 0.0 {
                let new_cost = sse(na, nb);
                if new_cost < cost {
                    let rel = (cost - new_cost) / cost.max(f64::MIN_POSITIVE);
                    a = na;
                    b = nb;
                    cost = new_cost;
                    lambda = (lambda / 10.0).max(1e-12);
                    improved = rel > 1e-15;
                    break;
                }
            }
            lambda *= 10.0;
        }
        if !improved {
            break;
        }
    }

    let rms_residual = (cost / FIT_SAMPLES as f64).sqrt();
    let params = CurveParams::new(a, b).map_err(|_| {
        Error::usage(format!(
            "curve fit for min_dist {min_dist} degenerated (a = {a}, b = {b})"
        ))
    })?;
    if !(rms_residual <= FIT_MAX_RMS) {
        return Err(Error::usage(format!(
            "curve fit for min_dist {min_dist} has RMS residual {rms_residual:.4} > {FIT_MAX_RMS}"
        )));
    }
    Ok(CurveFit { params, rms_residual })
}

#[cfg(test)]
mod tests {
    use super::*;

    const REFERENCE_CURVE: CurveParams = CurveParams { a: 1.93, b: 0.79 };

    #[test]
    fn weight_examples() {
        assert_eq!(low_dim_weight(0.0, REFERENCE_CURVE), 1.0);
        let near = low_dim_weight(0.001f64.powi(2), REFERENCE_CURVE);
        assert!((near - 0.99997).abs() < 1e-5, "{near}");
        assert!((low_dim_weight(1.0, REFERENCE_CURVE) - 1.0 / 2.93).abs() < 1e-15);
        assert!((1.0f64 / 2.93 - 0.3412969).abs() < 1e-7);
    }

    #[test]
    fn weight_is_strictly_decreasing() {
        let mut prev = low_dim_weight(0.0, REFERENCE_CURVE);
        for i in 1..=10_000 {
            let s = 1e6 * (i as f64 / 10_000.0).powi(3);
            let w = low_dim_weight(s, REFERENCE_CURVE);
            assert!(w < prev && w > 0.0, "not decreasing at {s}");
            prev = w;
        }
    }

    #[test]
    fn fit_reproduces_reported_constants() {
        let fit = fit_curve_report(0.001).unwrap();
        let CurveParams { a, b } = fit.params;
        assert!((a - 1.93).abs() <= 0.05, "a = {a}");
        assert!((b - 0.79).abs() <= 0.05, "b = {b}");
        assert!(fit.rms_residual < FIT_MAX_RMS);
        assert!(low_dim_weight(9.0, fit.params) <= 0.1);
    }

    #[test]
    fn fit_is_a_local_minimum_of_the_objective() {
        let fit = fit_curve_report(0.001).unwrap();
        let sse = |a: f64, b: f64| -> f64 {
            (1..=FIT_SAMPLES)
                .map(|i| {
                    let d = 3.0 * i as f64 / FIT_SAMPLES as f64;
                    (1.0 / (1.0 + a * d.powf(2.0 * b)) - target_profile(d, 0.001)).powi(2)
                })
                .sum()
        };
        let (a, b) = (fit.params.a, fit.params.b);
        let best = sse(a, b);
        for (da, db) in [
            (1e-3, 0.0),
            (-1e-3, 0.0),
            (0.0, 1e-3),
            (0.0, -1e-3),
            (1e-3, 1e-3),
            (-1e-3, -1e-3),
        ] {
            assert!(sse(a + da, b + db) >= best);
        }
    }

    #[test]
    fn fit_is_deterministic_and_validates_input() {
        assert_eq!(fit_curve(0.1).unwrap(), fit_curve(0.1).unwrap());
        assert!(fit_curve(0.0).is_err());
        assert!(fit_curve(1.5).is_err());
        assert_eq!(target_profile(0.001, 0.001), 1.0);
    }
}
