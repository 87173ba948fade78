//! One-dimensional Weibull-regime asymptotics. For a bounded model with
//! supremum M and survival 1 - F(M - u) regularly varying of index alpha,
//! as theta -> infinity:
//!
//! - Karamata growth: E[e^{theta X}] / (e^{theta M} (1 - F(M - 1/theta)))
//!   -> Gamma(1 + alpha);
//! - M_theta growth: (1 - F(M - 1/theta)) M_theta -> 2^{-alpha}/Gamma(1+alpha);
//! - tilted tail mass: E[e^{theta X} 1{X > M - C/theta}] / E[e^{theta X}]
//!   -> P(alpha, C), the regularized lower incomplete gamma;
//! - the scaling limit theta (M - X_theta) -> Gamma(alpha, 1).
//!
//! All expectations are computed in the variable u = M - x so the factor
//! e^{theta M} cancels and nothing overflows. "theta -> infinity" is
//! operationalized as a geometric grid with a monotone-error convergence
//! flag.

use serde::Serialize;

use crate::dist::Model;
use crate::error::{Error, Result};
use crate::limits::LimitTarget;
use crate::numerics::quad::{geometric_seeds, quad_points};
use crate::numerics::{ln_gamma, reg_lower_gamma};
use crate::tilt::{m_theta_analytic, TiltSpec};

/// A limit statement evaluated along a theta grid.
#[derive(Debug, Clone, Serialize)]
pub struct AsymptoteCheck {
    pub theta_grid: Vec<f64>,
    pub ratio_values: Vec<f64>,
    pub limit_value: f64,
    /// Absolute errors non-increasing along the grid and the final relative
    /// error within the tolerance the check was built with.
    pub converged: bool,
}

/// One grid row in the emitted JSON report.
#[derive(Debug, Clone, Serialize)]
pub struct AsymptoteRow {
    pub theta: f64,
    pub ratio: f64,
    pub target: f64,
    pub abs_error: f64,
}

impl AsymptoteCheck {
    /// Evaluate `f` along the grid against `limit`; converged means the
    /// absolute error never grows (1e-12 slack for exact families whose
    /// error sits at rounding level) and ends within `rel_tol` of the limit.
    pub fn evaluate<F>(theta_grid: Vec<f64>, f: F, limit: f64, rel_tol: f64) -> Result<Self>
    where
        F: Fn(f64) -> Result<f64>,
    {
        if theta_grid.is_empty() {
            return Err(Error::invalid("theta_grid", "must be nonempty"));
        }
        let mut ratio_values = Vec::with_capacity(theta_grid.len());
        let mut monotone = true;
        let mut last_err = f64::INFINITY;
        for theta in &theta_grid {
            let r = f(*theta)?;
            if !r.is_finite() {
                return Err(Error::AssumptionViolated {
                    op: "asymptote_check",
                    reason: format!("non-finite ratio at theta = {theta}"),
                });
            }
            let err = (r - limit).abs();
            if err > last_err + 1e-12 {
                monotone = false;
            }
            last_err = err;
            ratio_values.push(r);
        }
        let converged = monotone && last_err <= rel_tol * limit.abs();
        Ok(AsymptoteCheck { theta_grid, ratio_values, limit_value: limit, converged })
    }

    pub fn rows(&self) -> Vec<AsymptoteRow> {
        self.theta_grid
            .iter()
            .zip(&self.ratio_values)
            .map(|(t, r)| AsymptoteRow {
                theta: *t,
                ratio: *r,
                target: self.limit_value,
                abs_error: (r - self.limit_value).abs(),
            })
            .collect()
    }
}

fn require_weibull(model: &Model) -> Result<f64> {
    model.validate()?;
    model.weibull_index().ok_or_else(|| Error::UnsupportedModel {
        op: "asym1d",
        reason: "model carries no Weibull tail index".into(),
    })
}

/// E[e^{theta(X - M)} 1{X >= M - cap}] = int_0^cap e^{-theta u} f(M - u) du.
fn shifted_mgf_integral(model: &Model, theta: f64, cap: f64) -> Result<f64> {
    let m = model.upper()[0];
    // Fail fast if the model has no density (pre-checks the closure below).
    model.pdf1(m - 0.5 * cap.min(1.0))?;
    let f = |u: f64| (-theta * u).exp() * model.pdf1(m - u).expect("pre-checked");
    quad_points(f, &geometric_seeds(0.0, cap), 1e-9)
}

/// Integration cap: the whole support when bounded below, else far past the
/// exponential decay scale of the tilt.
fn integration_cap(model: &Model, theta: f64) -> f64 {
    let span = model.upper()[0] - model.lower()[0];
    if span.is_finite() {
        span
    } else {
        60.0 / theta
    }
}

/// E[e^{theta X}] / (e^{theta M} (1 - F(M - 1/theta))) -> Gamma(1 + alpha).
pub fn karamata_ratio(model: &Model, theta: f64) -> Result<f64> {
    require_weibull(model)?;
    if !(theta > 0.0) {
        return Err(Error::invalid("theta", "must be positive"));
    }
    let tail = model.weibull_tail(1.0 / theta)?;
    let mgf = shifted_mgf_integral(model, theta, integration_cap(model, theta))?;
    Ok(mgf / tail)
}

/// (1 - F(M - 1/theta)) * M_theta -> 2^{-alpha} / Gamma(1 + alpha).
pub fn m_theta_asymptote_1d(model: &Model, theta: f64) -> Result<f64> {
    require_weibull(model)?;
    if !(theta > 0.0) {
        return Err(Error::invalid("theta", "must be positive"));
    }
    let tail = model.weibull_tail(1.0 / theta)?;
    let m_theta = m_theta_analytic(model, &TiltSpec::identity1(theta))?;
    Ok(tail * m_theta)
}

/// E[e^{theta X} 1{X > M - C/theta}] / E[e^{theta X}] -> P(alpha, C).
pub fn tail_fraction(model: &Model, theta: f64, c: f64) -> Result<f64> {
    require_weibull(model)?;
    if !(theta > 0.0) {
        return Err(Error::invalid("theta", "must be positive"));
    }
    if !(c > 0.0) {
        return Err(Error::invalid("C", "must be positive"));
    }
    let cap = integration_cap(model, theta);
    if c / theta > cap {
        return Err(Error::invalid("C", "C/theta reaches past the support"));
    }
    let near = shifted_mgf_integral(model, theta, c / theta)?;
    let whole = shifted_mgf_integral(model, theta, cap)?;
    Ok(near / whole)
}

/// The cited Karamata limit constant Gamma(1 + alpha).
pub fn karamata_limit(alpha: f64) -> f64 {
    ln_gamma(1.0 + alpha).exp()
}

/// The cited M_theta limit constant 2^{-alpha} / Gamma(1 + alpha).
pub fn m_theta_limit(alpha: f64) -> f64 {
    (-alpha * std::f64::consts::LN_2 - ln_gamma(1.0 + alpha)).exp()
}

/// The cited tail-mass limit P(alpha, C).
pub fn tail_fraction_limit(alpha: f64, c: f64) -> Result<f64> {
    reg_lower_gamma(alpha, c)
}

/// Gamma(alpha, 1): the scaling limit of theta_n (M - X_{theta_n}) in the
/// accurate regime.
pub fn gamma_limit_target(alpha: f64) -> Result<LimitTarget> {
    if !(alpha > 0.0) {
        return Err(Error::invalid("alpha", "must be positive"));
    }
    Ok(LimitTarget::Gamma { shape: alpha, rate: 1.0 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::run_rng;

    const THETA_GRID: [f64; 3] = [1e2, 1e3, 1e4];

    #[test]
    fn uniform_karamata_ratio() {
        // E[e^{theta X}] = (e^theta - 1)/theta and the tail is exactly
        // 1/theta, so the ratio is 1 - e^{-theta}: indistinguishable from
        // the limit Gamma(2) = 1 at theta = 1e3.
        let r = karamata_ratio(&Model::Uniform01, 1e3).unwrap();
        assert!((r - 1.0).abs() < 1e-8, "{r}");
        let check = AsymptoteCheck::evaluate(
            THETA_GRID.to_vec(),
            |t| karamata_ratio(&Model::Uniform01, t),
            karamata_limit(1.0),
            0.01,
        )
        .unwrap();
        assert!(check.converged);
        let rows = check.rows();
        assert_eq!(rows.len(), 3);
        assert!(rows[2].abs_error < 1e-8);
    }

    #[test]
    fn beta_karamata_ratio_matches_oracle() {
        // High-precision reference values for Beta(2,5), limit Gamma(6) = 120.
        let beta = Model::Beta { a: 2.0, b: 5.0 };
        let r1e3 = karamata_ratio(&beta, 1e3).unwrap();
        assert!((r1e3 / 119.49958298582152 - 1.0).abs() < 1e-7, "{r1e3}");
        assert!((r1e3 / 120.0 - 1.0).abs() < 0.03);
        let r2e3 = karamata_ratio(&beta, 2e3).unwrap();
        assert!((r2e3 / 119.74989578991246 - 1.0).abs() < 1e-7, "{r2e3}");
        // Error strictly shrinks along the grid on this family.
        let e1 = (r1e3 - 120.0).abs();
        let e2 = (r2e3 - 120.0).abs();
        assert!(e2 < e1);
        assert!((karamata_limit(5.0) - 120.0).abs() < 1e-9);
    }

    #[test]
    fn uniform_m_theta_asymptote_is_half() {
        // Equivalent statement M_theta / theta -> 1/2, exact at theta = 1e3.
        let v = m_theta_asymptote_1d(&Model::Uniform01, 1e3).unwrap();
        assert!((v - 0.5).abs() < 1e-9, "{v}");
        assert!((m_theta_limit(1.0) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn beta_m_theta_asymptote_matches_oracle() {
        let beta = Model::Beta { a: 2.0, b: 5.0 };
        let v1e3 = m_theta_asymptote_1d(&beta, 1e3).unwrap();
        assert!((v1e3 / 0.00026216424195937813 - 1.0).abs() < 1e-7, "{v1e3}");
        let v2e3 = m_theta_asymptote_1d(&beta, 2e3).unwrap();
        let limit = m_theta_limit(5.0);
        assert!((limit - 1.0 / 3840.0).abs() < 1e-15);
        assert!((v2e3 / limit - 1.0).abs() < 0.05, "{v2e3} vs {limit}");
        assert!((v2e3 - limit).abs() < (v1e3 - limit).abs());
    }

    #[test]
    fn uniform_tail_fraction() {
        let v = tail_fraction(&Model::Uniform01, 1e3, std::f64::consts::LN_2).unwrap();
        assert!((v - 0.5).abs() < 0.005, "{v}");
        // C = 50 is the whole support mass to within quad tolerance.
        let v = tail_fraction(&Model::Uniform01, 1e3, 50.0).unwrap();
        assert!((v - 1.0).abs() < 1e-6);
        assert!((tail_fraction_limit(1.0, std::f64::consts::LN_2).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn beta_tail_fraction_matches_oracle() {
        let beta = Model::Beta { a: 2.0, b: 5.0 };
        let v = tail_fraction(&beta, 1e3, 5.0).unwrap();
        assert!((v / 0.56038846051151046 - 1.0).abs() < 1e-7, "{v}");
        let p55 = tail_fraction_limit(5.0, 5.0).unwrap();
        assert!((p55 - 0.55950671493478759).abs() < 1e-12);
        assert!((v / p55 - 1.0).abs() < 0.03);
    }

    #[test]
    fn three_ratio_convergence_casebook() {
        // Karamata, M_theta growth, and the tail fraction all converge with
        // non-increasing error along the grid, per family.
        for model in [Model::Uniform01, Model::Beta { a: 2.0, b: 5.0 }] {
            let alpha = model.weibull_index().unwrap();
            let checks = [
                AsymptoteCheck::evaluate(
                    THETA_GRID.to_vec(),
                    |t| karamata_ratio(&model, t),
                    karamata_limit(alpha),
                    0.03,
                )
                .unwrap(),
                AsymptoteCheck::evaluate(
                    THETA_GRID.to_vec(),
                    |t| m_theta_asymptote_1d(&model, t),
                    m_theta_limit(alpha),
                    0.05,
                )
                .unwrap(),
                AsymptoteCheck::evaluate(
                    THETA_GRID.to_vec(),
                    |t| tail_fraction(&model, t, 2.0),
                    tail_fraction_limit(alpha, 2.0).unwrap(),
                    0.03,
                )
                .unwrap(),
            ];
            for (i, c) in checks.iter().enumerate() {
                assert!(c.converged, "{model:?} check {i}: {:?}", c.ratio_values);
            }
        }
    }

    #[test]
    fn gamma_limit_target_basics() {
        let t = gamma_limit_target(1.0).unwrap();
        assert!((t.cdf1(std::f64::consts::LN_2).unwrap() - 0.5).abs() < 1e-12);
        let t5 = gamma_limit_target(5.0).unwrap();
        let draws = t5.sample(1_000_000, &mut run_rng(4)).unwrap();
        let mean: f64 = draws.as_slice().iter().sum::<f64>() / 1e6;
        assert!((mean - 5.0).abs() < 0.01);
        assert!(gamma_limit_target(0.0).is_err());
    }

    #[test]
    fn preconditions_rejected() {
        let exp = Model::Exponential { lambda: 1.0 };
        assert!(karamata_ratio(&exp, 10.0).is_err());
        assert!(m_theta_asymptote_1d(&Model::Uniform01, 0.0).is_err());
        // theta so small that 1/theta reaches past the support.
        assert!(karamata_ratio(&Model::Uniform01, 0.5).is_err());
        assert!(tail_fraction(&Model::Uniform01, 1e3, -1.0).is_err());
        assert!(tail_fraction(&Model::Uniform01, 10.0, 100.0).is_err());
    }
}
