//! Light-tailed unbounded asymptotics.
//!
//! For a density with f(x)/e^{-K||x||^alpha} -> L (alpha > 1), the tilted
//! moment E[e^{c theta^T x}] localizes at the maximizer of
//! Phi_c(x) = c theta^T x - K||x||^alpha and is governed by the Laplace
//! method: m_c = (c/(alpha K))^{1/(alpha-1)} theta, with negated Hessian
//! K alpha ||m_c||^{alpha-2} (I + (alpha-2) theta theta^T) whose determinant
//! carries the simple eigenvalue alpha-1. The normalizer implemented here is
//! L (2 pi)^{d/2} e^{Phi_c(m_c)} / sqrt(det): on the standard normal family
//! it reproduces the exact MGF e^{c^2/2}, which fixes the (2 pi)^{d/2}
//! convention (the constant without that factor fails the Gaussian oracle).
//!
//! Consequently M_c grows like q e^{p c^{alpha/(alpha-1)}} c^{d(alpha-2)/(2
//! alpha-2)}: the c-power enters with a positive sign — that is what both the
//! Laplace algebra below and 50-digit quadrature of the alpha = 4 synthetic
//! family give — and q is normalized so the Gaussian family has p = q = 1.

use crate::error::{Error, Result};
use crate::numerics::ln_gamma;
use crate::points::Points;
use nalgebra::{DMatrix, DVector};
use serde_json::json;

const TAU: f64 = 2.0 * std::f64::consts::PI;

/// Tail shape of an unbounded light-tailed density:
/// f(x)/e^{-K||x||^alpha} -> L in d dimensions.
#[derive(Debug, Clone, Copy)]
pub struct TailProfile {
    alpha: f64,
    k: f64,
    l: f64,
    d: usize,
}

impl TailProfile {
    /// alpha must exceed 1 (the maximizer formula divides by alpha - 1);
    /// matrix work is small dense linear algebra, capped at d = 8.
    pub fn new(alpha: f64, k: f64, l: f64, d: usize) -> Result<Self> {
        if !alpha.is_finite() || alpha <= 1.0 {
            return Err(Error::invalid("alpha", "tail exponent must be finite and > 1"));
        }
        if !(k > 0.0) || !k.is_finite() {
            return Err(Error::invalid("K", "tail scale must be positive and finite"));
        }
        if !(l > 0.0) || !l.is_finite() {
            return Err(Error::invalid("L", "tail constant must be positive and finite"));
        }
        if d == 0 || d > 8 {
            return Err(Error::invalid("d", "dimension must be in 1..=8"));
        }
        Ok(TailProfile { alpha, k, l, d })
    }

    /// N(0, I_d): alpha = 2, K = 1/2, L = (2 pi)^{-d/2}.
    pub fn std_normal(d: usize) -> Result<Self> {
        TailProfile::new(2.0, 0.5, TAU.powf(-(d as f64) / 2.0), d)
    }

    /// The 1-d synthetic family f(x) = L e^{-K|x|^alpha} with exact
    /// normalizer 1/L = 2 Gamma(1 + 1/alpha) K^{-1/alpha}; gives quadrature
    /// oracles for alpha != 2.
    pub fn synthetic_1d(alpha: f64, k: f64) -> Result<Self> {
        if !alpha.is_finite() || alpha <= 1.0 {
            return Err(Error::invalid("alpha", "tail exponent must be finite and > 1"));
        }
        if !(k > 0.0) || !k.is_finite() {
            return Err(Error::invalid("K", "tail scale must be positive and finite"));
        }
        let z = 2.0 * ln_gamma(1.0 + 1.0 / alpha).exp() * k.powf(-1.0 / alpha);
        TailProfile::new(alpha, k, 1.0 / z, 1)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn l(&self) -> f64 {
        self.l
    }

    pub fn d(&self) -> usize {
        self.d
    }
}

/// Phi_c(x) = c theta^T x - K ||x||^alpha.
pub fn phi(profile: &TailProfile, c: f64, theta: &[f64], x: &[f64]) -> Result<f64> {
    if theta.len() != profile.d || x.len() != profile.d {
        return Err(Error::DimensionMismatch {
            expected: profile.d,
            got: theta.len().min(x.len()),
        });
    }
    let dot: f64 = theta.iter().zip(x).map(|(t, v)| t * v).sum();
    let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    Ok(c * dot - profile.k * norm.powf(profile.alpha))
}

/// Maximizer data for the Laplace method at level c.
#[derive(Debug, Clone)]
pub struct LaplaceGeometry {
    c: f64,
    m_c: Vec<f64>,
    phi_max: f64,
    neg_hessian: DMatrix<f64>,
    neg_hessian_sqrt: DMatrix<f64>,
    det_neg_hessian: f64,
}

impl LaplaceGeometry {
    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn m_c(&self) -> &[f64] {
        &self.m_c
    }

    pub fn phi_max(&self) -> f64 {
        self.phi_max
    }

    pub fn neg_hessian(&self) -> &DMatrix<f64> {
        &self.neg_hessian
    }

    pub fn neg_hessian_sqrt(&self) -> &DMatrix<f64> {
        &self.neg_hessian_sqrt
    }

    pub fn det_neg_hessian(&self) -> f64 {
        self.det_neg_hessian
    }

    /// Harness dump: {c, m_c, phi_max, det}.
    pub fn summary_json(&self) -> serde_json::Value {
        json!({
            "c": self.c,
            "m_c": self.m_c,
            "phi_max": self.phi_max,
            "det": self.det_neg_hessian,
        })
    }
}

/// Closed-form maximizer, maximum, and (root of the) negated Hessian of
/// Phi_c for a unit direction theta.
pub fn laplace_geometry(profile: &TailProfile, c: f64, theta: &[f64]) -> Result<LaplaceGeometry> {
    if theta.len() != profile.d {
        return Err(Error::DimensionMismatch { expected: profile.d, got: theta.len() });
    }
    if !(c > 0.0) || !c.is_finite() {
        return Err(Error::invalid("c", "tilt level must be positive and finite"));
    }
    let norm = theta.iter().map(|v| v * v).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > 1e-12 {
        return Err(Error::invalid("theta", format!("must be a unit vector, got norm {norm}")));
    }
    let (alpha, k, d) = (profile.alpha, profile.k, profile.d);
    let radius = (c / (alpha * k)).powf(1.0 / (alpha - 1.0));
    let m_c: Vec<f64> = theta.iter().map(|t| radius * t).collect();
    let phi_max = (alpha - 1.0)
        * alpha.powf(-alpha / (alpha - 1.0))
        * c.powf(alpha / (alpha - 1.0))
        * k.powf(-1.0 / (alpha - 1.0));
    // -Hessian = s (I + (alpha-2) theta theta^T), s = K alpha r^{alpha-2};
    // eigenvalues s (multiplicity d-1) and s (alpha-1) along theta.
    let s = k * alpha * radius.powf(alpha - 2.0);
    let t = DVector::from_column_slice(theta);
    let outer = &t * t.transpose();
    let eye = DMatrix::identity(d, d);
    let neg_hessian = (&eye + (alpha - 2.0) * &outer) * s;
    let neg_hessian_sqrt = (&eye + ((alpha - 1.0).sqrt() - 1.0) * &outer) * s.sqrt();
    let det_neg_hessian = s.powi(d as i32) * (alpha - 1.0);
    Ok(LaplaceGeometry { c, m_c, phi_max, neg_hessian, neg_hessian_sqrt, det_neg_hessian })
}

/// log of the Laplace approximation to E[e^{c theta^T X}]:
/// log L + (d/2) log(2 pi) + Phi_c(m_c) - (1/2) log det.
pub fn log_laplace_normalizer(profile: &TailProfile, c: f64, theta: &[f64]) -> Result<f64> {
    let geom = laplace_geometry(profile, c, theta)?;
    Ok(profile.l.ln() + profile.d as f64 / 2.0 * TAU.ln() + geom.phi_max
        - 0.5 * geom.det_neg_hessian.ln())
}

/// The Laplace normalizer itself; exact (e^{c^2/2}) on the standard normal
/// family. Overflows to +inf once Phi_c(m_c) exceeds ~709.
pub fn laplace_normalizer(profile: &TailProfile, c: f64, theta: &[f64]) -> Result<f64> {
    Ok(log_laplace_normalizer(profile, c, theta)?.exp())
}

/// The exponent p and constant q_corrected of the growth law
/// M_c ~ q e^{p c^{alpha/(alpha-1)}} c^{d(alpha-2)/(2 alpha - 2)}.
/// q_corrected carries the (2 pi)^{d/2} normalization the Gaussian oracle
/// forces, so the standard normal family has p = q = 1.
pub fn m_growth_constants(profile: &TailProfile) -> (f64, f64) {
    let (alpha, k, l, d) = (profile.alpha, profile.k, profile.l, profile.d as f64);
    let gamma = alpha / (alpha - 1.0);
    let p = (alpha - 1.0) * alpha.powf(-gamma) * k.powf(-1.0 / (alpha - 1.0))
        * (2f64.powf(gamma) - 2.0);
    let q = (alpha - 1.0).sqrt() * (alpha * k).powf(d / (2.0 * alpha - 2.0))
        * 2f64.powf(-growth_power(profile))
        / (l * TAU.powf(d / 2.0));
    (p, q)
}

/// The c-power d(alpha-2)/(2 alpha - 2) in the growth law.
pub fn growth_power(profile: &TailProfile) -> f64 {
    profile.d as f64 * (profile.alpha - 2.0) / (2.0 * profile.alpha - 2.0)
}

/// log M_c - p c^{alpha/(alpha-1)} - power * log c - log q; tends to 0 when
/// the supplied log M_c obeys the growth law.
pub fn growth_log_residual(profile: &TailProfile, c: f64, log_m_c: f64) -> f64 {
    let (p, q) = m_growth_constants(profile);
    let gamma = profile.alpha / (profile.alpha - 1.0);
    log_m_c - p * c.powf(gamma) - growth_power(profile) * c.ln() - q.ln()
}

/// Laplace-method log M_c: log E[e^{2c.}] - 2 log E[e^{c.}]. Satisfies the
/// growth law identically; the true M_c approaches it as c grows.
pub fn log_m_theta_laplace(profile: &TailProfile, c: f64, theta: &[f64]) -> Result<f64> {
    Ok(log_laplace_normalizer(profile, 2.0 * c, theta)?
        - 2.0 * log_laplace_normalizer(profile, c, theta)?)
}

/// The scaling-limit transform: y = neg_hessian_sqrt (x - m_c) per sample;
/// exactly standard normal for tilted standard normal input.
pub fn gaussian_limit_transform(samples: &Points, geometry: &LaplaceGeometry) -> Result<Points> {
    let d = geometry.m_c.len();
    if samples.dim() != d {
        return Err(Error::DimensionMismatch { expected: d, got: samples.dim() });
    }
    let mut out = Points::with_capacity(samples.len(), d);
    let mut shifted = DVector::zeros(d);
    for row in samples.rows() {
        for j in 0..d {
            shifted[j] = row[j] - geometry.m_c[j];
        }
        let y = &geometry.neg_hessian_sqrt * &shifted;
        out.push_row(y.as_slice())?;
    }
    Ok(out)
}
