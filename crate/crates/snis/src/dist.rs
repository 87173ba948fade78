//! Distribution families with exact CDFs/quantiles, samplers, and tail
//! metadata.
//!
//! Bounded families carry a Weibull index alpha: the survival probability at
//! distance u below the supremum M is regularly varying, 1 - F(M - u) ~
//! K u^alpha as u -> 0. Uniform01 and the truncated families have alpha = 1,
//! Beta(a, b) has alpha = b; a discrete atom at the maximum has no index.
//! StdNormalVec is the unbounded light-tailed case with density decay
//! L e^{-K ||x||^alpha}, alpha = 2, K = 1/2, L = (2 pi)^{-d/2}.

use rand::Rng;
use rand_distr::{Beta as BetaSampler, Distribution, Exp as ExpSampler, StandardNormal};
use serde::{Deserialize, Serialize};
use statrs::distribution::{Continuous, ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::numerics::ln_gamma;
use crate::points::Points;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", content = "params", rename_all = "snake_case")]
pub enum Model {
    Uniform01,
    Beta { a: f64, b: f64 },
    TruncNormal { mu: f64, sigma: f64, upper: f64 },
    TruncExp { lambda: f64, upper: f64 },
    Exponential { lambda: f64 },
    DiscreteUniform { values: Vec<f64> },
    StdNormalVec { dim: usize },
    ProductVec { components: Vec<Model> },
    TwoDExample,
}

impl Model {
    pub fn validate(&self) -> Result<()> {
        match self {
            Model::Uniform01 | Model::TwoDExample => Ok(()),
            Model::Beta { a, b } => {
                if *a > 0.0 && *b > 0.0 && a.is_finite() && b.is_finite() {
                    Ok(())
                } else {
                    Err(Error::invalid("beta", "shape parameters must be positive and finite"))
                }
            }
            Model::TruncNormal { sigma, upper, mu } => {
                if *sigma > 0.0 && sigma.is_finite() && upper.is_finite() && mu.is_finite() {
                    Ok(())
                } else {
                    Err(Error::invalid("trunc_normal", "need sigma > 0 and finite mu, upper"))
                }
            }
            Model::TruncExp { lambda, upper } => {
                if *lambda > 0.0 && lambda.is_finite() && *upper > 0.0 && upper.is_finite() {
                    Ok(())
                } else {
                    Err(Error::invalid("trunc_exp", "need lambda > 0 and finite upper > 0"))
                }
            }
            Model::Exponential { lambda } => {
                if *lambda > 0.0 && lambda.is_finite() {
                    Ok(())
                } else {
                    Err(Error::invalid("exponential", "rate must be positive and finite"))
                }
            }
            Model::DiscreteUniform { values } => {
                if values.is_empty() {
                    Err(Error::invalid("discrete_uniform", "support must be nonempty"))
                } else if values.iter().any(|v| !v.is_finite()) {
                    Err(Error::invalid("discrete_uniform", "support values must be finite"))
                } else {
                    Ok(())
                }
            }
            Model::StdNormalVec { dim } => {
                if *dim >= 1 {
                    Ok(())
                } else {
                    Err(Error::invalid("std_normal_vec", "dimension must be at least 1"))
                }
            }
            Model::ProductVec { components } => {
                if components.is_empty() {
                    return Err(Error::invalid("product_vec", "need at least one component"));
                }
                for c in components {
                    c.validate()?;
                    if c.dim() != 1 {
                        return Err(Error::invalid("product_vec", "components must be 1-d"));
                    }
                }
                Ok(())
            }
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Model::StdNormalVec { dim } => *dim,
            Model::ProductVec { components } => components.len(),
            Model::TwoDExample => 2,
            _ => 1,
        }
    }

    /// Per-coordinate essential supremum; +inf for unbounded coordinates.
    pub fn upper(&self) -> Vec<f64> {
        match self {
            Model::Uniform01 | Model::Beta { .. } => vec![1.0],
            Model::TruncNormal { upper, .. } | Model::TruncExp { upper, .. } => vec![*upper],
            Model::Exponential { .. } => vec![f64::INFINITY],
            Model::DiscreteUniform { values } => {
                vec![values.iter().copied().fold(f64::NEG_INFINITY, f64::max)]
            }
            Model::StdNormalVec { dim } => vec![f64::INFINITY; *dim],
            Model::ProductVec { components } => {
                components.iter().flat_map(|c| c.upper()).collect()
            }
            Model::TwoDExample => vec![1.0, 1.0],
        }
    }

    /// Per-coordinate essential infimum; -inf for coordinates unbounded below.
    pub fn lower(&self) -> Vec<f64> {
        match self {
            Model::Uniform01 | Model::Beta { .. } | Model::Exponential { .. } => vec![0.0],
            Model::TruncNormal { .. } => vec![f64::NEG_INFINITY],
            Model::TruncExp { .. } => vec![0.0],
            Model::DiscreteUniform { values } => {
                vec![values.iter().copied().fold(f64::INFINITY, f64::min)]
            }
            Model::StdNormalVec { dim } => vec![f64::NEG_INFINITY; *dim],
            Model::ProductVec { components } => {
                components.iter().flat_map(|c| c.lower()).collect()
            }
            Model::TwoDExample => vec![0.0, 0.0],
        }
    }

    pub fn is_bounded(&self) -> bool {
        self.upper().iter().all(|m| m.is_finite())
    }

    /// Weibull tail index alpha of 1 - F(M - u) ~ K u^alpha, if the family
    /// has one. A discrete atom at the maximum does not.
    pub fn weibull_index(&self) -> Option<f64> {
        match self {
            Model::Uniform01 | Model::TruncNormal { .. } | Model::TruncExp { .. } => Some(1.0),
            Model::Beta { b, .. } => Some(*b),
            _ => None,
        }
    }

    /// Leading tail constant K in 1 - F(M - u) ~ K u^alpha.
    pub fn weibull_tail_constant(&self) -> Option<f64> {
        match self {
            Model::Uniform01 => Some(1.0),
            // 1 - F(1-u) = int_{1-u}^1 x^{a-1}(1-x)^{b-1}/B(a,b) dx ~ u^b / (b B(a,b)).
            Model::Beta { a, b } => {
                let ln_beta = ln_gamma(*a) + ln_gamma(*b) - ln_gamma(a + b);
                Some((-ln_beta - b.ln()).exp())
            }
            // f(M) u / Z with the truncated density at the endpoint.
            Model::TruncNormal { mu, sigma, upper } => {
                let z = (upper - mu) / sigma;
                let n = Normal::new(0.0, 1.0).expect("unit normal");
                Some(n.pdf(z) / (sigma * n.cdf(z)))
            }
            Model::TruncExp { lambda, upper } => {
                Some(lambda * (-lambda * upper).exp() / (-(-lambda * upper).exp_m1()))
            }
            _ => None,
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Result<Points> {
        self.validate()?;
        if n == 0 {
            return Err(Error::invalid("n", "need at least one draw"));
        }
        let dim = self.dim();
        let mut data = Vec::with_capacity(n * dim);
        match self {
            Model::Uniform01 => {
                for _ in 0..n {
                    data.push(rng.random::<f64>());
                }
            }
            Model::Beta { a, b } => {
                let dist = BetaSampler::new(*a, *b)
                    .map_err(|e| Error::invalid("beta", e.to_string()))?;
                for _ in 0..n {
                    data.push(dist.sample(rng));
                }
            }
            Model::TruncNormal { mu, sigma, upper } => {
                // Inverse-CDF so draws agree exactly with cdf1/quantile1.
                let norm = Normal::new(0.0, 1.0).expect("unit normal");
                let z = norm.cdf((upper - mu) / sigma);
                for _ in 0..n {
                    let u = rng.random::<f64>();
                    data.push(mu + sigma * norm.inverse_cdf(u * z));
                }
            }
            Model::TruncExp { lambda, upper } => {
                let mass = -(-lambda * upper).exp_m1();
                for _ in 0..n {
                    let u = rng.random::<f64>();
                    data.push(-(-u * mass).ln_1p() / lambda);
                }
            }
            Model::Exponential { lambda } => {
                let dist = ExpSampler::new(*lambda)
                    .map_err(|e| Error::invalid("exponential", e.to_string()))?;
                for _ in 0..n {
                    data.push(dist.sample(rng));
                }
            }
            Model::DiscreteUniform { values } => {
                for _ in 0..n {
                    data.push(values[rng.random_range(0..values.len())]);
                }
            }
            Model::StdNormalVec { dim } => {
                for _ in 0..n * dim {
                    data.push(rng.sample(StandardNormal));
                }
            }
            Model::ProductVec { components } => {
                // Row-major: draw each row across components.
                for _ in 0..n {
                    for c in components {
                        let p = c.sample(1, rng)?;
                        data.push(p.as_slice()[0]);
                    }
                }
            }
            Model::TwoDExample => {
                // (U, V^2) with U, V independent Uniform01.
                for _ in 0..n {
                    data.push(rng.random::<f64>());
                    let v = rng.random::<f64>();
                    data.push(v * v);
                }
            }
        }
        Points::new(data, dim)
    }

    /// CDF of a 1-d model.
    pub fn cdf1(&self, x: f64) -> Result<f64> {
        self.validate()?;
        match self {
            Model::Uniform01 => Ok(x.clamp(0.0, 1.0)),
            Model::Beta { a, b } => {
                if x <= 0.0 {
                    Ok(0.0)
                } else if x >= 1.0 {
                    Ok(1.0)
                } else {
                    crate::numerics::reg_inc_beta(*a, *b, x)
                }
            }
            Model::TruncNormal { mu, sigma, upper } => {
                if x >= *upper {
                    return Ok(1.0);
                }
                let norm = Normal::new(0.0, 1.0).expect("unit normal");
                Ok(norm.cdf((x - mu) / sigma) / norm.cdf((upper - mu) / sigma))
            }
            Model::TruncExp { lambda, upper } => {
                if x <= 0.0 {
                    Ok(0.0)
                } else if x >= *upper {
                    Ok(1.0)
                } else {
                    Ok((-lambda * x).exp_m1() / (-lambda * upper).exp_m1())
                }
            }
            Model::Exponential { lambda } => {
                Ok(if x <= 0.0 { 0.0 } else { -(-lambda * x).exp_m1() })
            }
            Model::DiscreteUniform { values } => {
                let hits = values.iter().filter(|v| **v <= x).count();
                Ok(hits as f64 / values.len() as f64)
            }
            Model::StdNormalVec { dim: 1 } => {
                Ok(Normal::new(0.0, 1.0).expect("unit normal").cdf(x))
            }
            _ => Err(Error::UnsupportedModel {
                op: "cdf1",
                reason: format!("model has dimension {}", self.dim()),
            }),
        }
    }

    /// Density of a continuous 1-d model.
    pub fn pdf1(&self, x: f64) -> Result<f64> {
        self.validate()?;
        match self {
            Model::Uniform01 => Ok(if (0.0..=1.0).contains(&x) { 1.0 } else { 0.0 }),
            Model::Beta { a, b } => {
                if !(0.0..=1.0).contains(&x) {
                    return Ok(0.0);
                }
                let ln_b = ln_gamma(a + b) - ln_gamma(*a) - ln_gamma(*b);
                // Zero exponents skip the log so endpoints stay NaN-free.
                let t1 = if *a == 1.0 { 0.0 } else { (a - 1.0) * safe_ln(x) };
                let t2 = if *b == 1.0 { 0.0 } else { (b - 1.0) * safe_ln(1.0 - x) };
                Ok((t1 + t2 + ln_b).exp())
            }
            Model::TruncNormal { mu, sigma, upper } => {
                if x > *upper {
                    return Ok(0.0);
                }
                let norm = Normal::new(0.0, 1.0).expect("unit normal");
                Ok(norm.pdf((x - mu) / sigma) / (sigma * norm.cdf((upper - mu) / sigma)))
            }
            Model::TruncExp { lambda, upper } => {
                if !(0.0..=*upper).contains(&x) {
                    return Ok(0.0);
                }
                Ok(lambda * (-lambda * x).exp() / -(-lambda * upper).exp_m1())
            }
            Model::Exponential { lambda } => {
                Ok(if x < 0.0 { 0.0 } else { lambda * (-lambda * x).exp() })
            }
            Model::StdNormalVec { dim: 1 } => {
                Ok(Normal::new(0.0, 1.0).expect("unit normal").pdf(x))
            }
            _ => Err(Error::UnsupportedModel {
                op: "pdf1",
                reason: "density only defined for continuous 1-d families".into(),
            }),
        }
    }

    /// Survival function 1 - F(x), computed without cancellation: the Beta
    /// upper tail at x = 1 - u is of order u^b and vanishes from 1 - cdf1(x)
    /// in f64 long before it stops mattering.
    pub fn sf1(&self, x: f64) -> Result<f64> {
        self.validate()?;
        match self {
            Model::Uniform01 => Ok((1.0 - x).clamp(0.0, 1.0)),
            Model::Beta { a, b } => {
                if x <= 0.0 {
                    Ok(1.0)
                } else if x >= 1.0 {
                    Ok(0.0)
                } else {
                    crate::numerics::reg_inc_beta(*b, *a, 1.0 - x)
                }
            }
            Model::TruncExp { lambda, upper } => {
                if x <= 0.0 {
                    Ok(1.0)
                } else if x >= *upper {
                    Ok(0.0)
                } else {
                    // (e^{-lambda x} - e^{-lambda M}) / (1 - e^{-lambda M}).
                    let em = (-lambda * upper).exp();
                    Ok(((-lambda * x).exp() - em) / (1.0 - em))
                }
            }
            Model::Exponential { lambda } => {
                Ok(if x <= 0.0 { 1.0 } else { (-lambda * x).exp() })
            }
            _ => Ok(1.0 - self.cdf1(x)?),
        }
    }

    /// Quantile (generalized inverse for discrete families), p in (0, 1).
    pub fn quantile1(&self, p: f64) -> Result<f64> {
        self.validate()?;
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::invalid("p", format!("{p} outside (0, 1)")));
        }
        match self {
            Model::Uniform01 => Ok(p),
            Model::Beta { .. } => {
                // Bisection on the monotone CDF.
                let (mut lo, mut hi) = (0.0f64, 1.0f64);
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if self.cdf1(mid)? < p {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                    if hi - lo < 1e-16 {
                        break;
                    }
                }
                Ok(0.5 * (lo + hi))
            }
            Model::TruncNormal { mu, sigma, upper } => {
                let norm = Normal::new(0.0, 1.0).expect("unit normal");
                let z = norm.cdf((upper - mu) / sigma);
                Ok(mu + sigma * norm.inverse_cdf(p * z))
            }
            Model::TruncExp { lambda, upper } => {
                let mass = -(-lambda * upper).exp_m1();
                Ok(-(-p * mass).ln_1p() / lambda)
            }
            Model::Exponential { lambda } => Ok(-(-p).ln_1p() / lambda),
            Model::DiscreteUniform { values } => {
                let mut sorted = values.clone();
                sorted.sort_by(f64::total_cmp);
                let k = (p * sorted.len() as f64).ceil() as usize;
                Ok(sorted[k.clamp(1, sorted.len()) - 1])
            }
            Model::StdNormalVec { dim: 1 } => {
                Ok(Normal::new(0.0, 1.0).expect("unit normal").inverse_cdf(p))
            }
            _ => Err(Error::UnsupportedModel {
                op: "quantile1",
                reason: format!("model has dimension {}", self.dim()),
            }),
        }
    }

    /// 1 - F(M - u): survival mass within u of the supremum, for bounded
    /// families carrying a Weibull index.
    pub fn weibull_tail(&self, u: f64) -> Result<f64> {
        if self.weibull_index().is_none() {
            return Err(Error::UnsupportedModel {
                op: "weibull_tail",
                reason: "model carries no Weibull tail index".into(),
            });
        }
        let m = self.upper()[0];
        let span = m - self.lower()[0];
        if !(u > 0.0 && u <= span) {
            return Err(Error::invalid("u", format!("{u} outside (0, M - inf support]")));
        }
        self.sf1(m - u)
    }
}

/// ln x that maps 0 to 0 when multiplied by a zero exponent upstream; only
/// called with a nonnegative argument.
fn safe_ln(x: f64) -> f64 {
    if x == 0.0 {
        f64::NEG_INFINITY
    } else {
        x.ln()
    }
}
