//! Reference limit laws that the scaling theorems converge to: Gamma(alpha,
//! rate), the Weibull extreme-value law on the positive half-line (survival
//! e^{-t^alpha}), the standard normal, and products of independent Gammas
//! for the multivariate limits.

use rand::Rng;
use rand_distr::{Distribution, Gamma as GammaSampler, StandardNormal};
use statrs::distribution::{Continuous, ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::numerics::{ln_gamma, reg_lower_gamma};
use crate::points::Points;

#[derive(Debug, Clone, PartialEq)]
pub enum LimitTarget {
    Gamma { shape: f64, rate: f64 },
    /// Law of the normalized gap below the supremum: survival e^{-t^alpha}
    /// on t > 0.
    Weibull { alpha: f64 },
    StdNormal,
    /// Independent coordinates, coordinate i distributed Gamma(shape_i, rate_i).
    ProductGamma { shapes: Vec<f64>, rates: Vec<f64> },
}

impl LimitTarget {
    pub fn validate(&self) -> Result<()> {
        match self {
            LimitTarget::Gamma { shape, rate } => {
                if *shape > 0.0 && *rate > 0.0 {
                    Ok(())
                } else {
                    Err(Error::invalid("gamma", "shape and rate must be positive"))
                }
            }
            LimitTarget::Weibull { alpha } => {
                if *alpha > 0.0 {
                    Ok(())
                } else {
                    Err(Error::invalid("alpha", "Weibull index must be positive"))
                }
            }
            LimitTarget::StdNormal => Ok(()),
            LimitTarget::ProductGamma { shapes, rates } => {
                if shapes.is_empty() || shapes.len() != rates.len() {
                    return Err(Error::invalid("product_gamma", "shapes/rates length mismatch"));
                }
                if shapes.iter().chain(rates).any(|v| !(*v > 0.0)) {
                    return Err(Error::invalid("product_gamma", "parameters must be positive"));
                }
                Ok(())
            }
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            LimitTarget::ProductGamma { shapes, .. } => shapes.len(),
            _ => 1,
        }
    }

    pub fn cdf1(&self, x: f64) -> Result<f64> {
        match self {
            LimitTarget::Gamma { shape, rate } => {
                if x <= 0.0 {
                    Ok(0.0)
                } else {
                    reg_lower_gamma(*shape, rate * x)
                }
            }
            LimitTarget::Weibull { alpha } => {
                Ok(if x <= 0.0 { 0.0 } else { -(-x.powf(*alpha)).exp_m1() })
            }
            LimitTarget::StdNormal => Ok(Normal::new(0.0, 1.0).expect("unit normal").cdf(x)),
            LimitTarget::ProductGamma { .. } => Err(Error::UnsupportedModel {
                op: "cdf1",
                reason: "product law needs rect_cdf".into(),
            }),
        }
    }

    pub fn survival1(&self, x: f64) -> Result<f64> {
        match self {
            LimitTarget::Weibull { alpha } => {
                Ok(if x <= 0.0 { 1.0 } else { (-x.powf(*alpha)).exp() })
            }
            _ => Ok(1.0 - self.cdf1(x)?),
        }
    }

    pub fn pdf1(&self, x: f64) -> Result<f64> {
        match self {
            LimitTarget::Gamma { shape, rate } => {
                if x <= 0.0 {
                    return Ok(0.0);
                }
                Ok((shape * rate.ln() + (shape - 1.0) * x.ln() - rate * x - ln_gamma(*shape))
                    .exp())
            }
            LimitTarget::Weibull { alpha } => {
                if x <= 0.0 {
                    return Ok(0.0);
                }
                Ok(alpha * x.powf(alpha - 1.0) * (-x.powf(*alpha)).exp())
            }
            LimitTarget::StdNormal => Ok(Normal::new(0.0, 1.0).expect("unit normal").pdf(x)),
            LimitTarget::ProductGamma { .. } => Err(Error::UnsupportedModel {
                op: "pdf1",
                reason: "product law is multivariate".into(),
            }),
        }
    }

    /// Lower-left orthant mass at x (product over coordinates).
    pub fn rect_cdf(&self, x: &[f64]) -> Result<f64> {
        match self {
            LimitTarget::ProductGamma { shapes, rates } => {
                if x.len() != shapes.len() {
                    return Err(Error::DimensionMismatch { expected: shapes.len(), got: x.len() });
                }
                let mut mass = 1.0;
                for ((s, r), xi) in shapes.iter().zip(rates).zip(x) {
                    mass *= if *xi <= 0.0 { 0.0 } else { reg_lower_gamma(*s, r * xi)? };
                }
                Ok(mass)
            }
            _ => {
                if x.len() != 1 {
                    return Err(Error::DimensionMismatch { expected: 1, got: x.len() });
                }
                self.cdf1(x[0])
            }
        }
    }

    /// Marginal law of coordinate j.
    pub fn marginal(&self, j: usize) -> Result<LimitTarget> {
        match self {
            LimitTarget::ProductGamma { shapes, rates } => {
                if j >= shapes.len() {
                    return Err(Error::invalid("j", "coordinate out of range"));
                }
                Ok(LimitTarget::Gamma { shape: shapes[j], rate: rates[j] })
            }
            _ if j == 0 => Ok(self.clone()),
            _ => Err(Error::invalid("j", "coordinate out of range")),
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Result<Points> {
        self.validate()?;
        if n == 0 {
            return Err(Error::invalid("n", "need at least one draw"));
        }
        match self {
            LimitTarget::Gamma { shape, rate } => {
                let dist = GammaSampler::new(*shape, 1.0 / rate)
                    .map_err(|e| Error::invalid("gamma", e.to_string()))?;
                Ok(Points::from_scalars((0..n).map(|_| dist.sample(rng)).collect()))
            }
            LimitTarget::Weibull { alpha } => Ok(Points::from_scalars(
                (0..n)
                    .map(|_| (-(-rng.random::<f64>()).ln_1p()).powf(1.0 / alpha))
                    .collect(),
            )),
            LimitTarget::StdNormal => Ok(Points::from_scalars(
                (0..n).map(|_| rng.sample(StandardNormal)).collect(),
            )),
            LimitTarget::ProductGamma { shapes, rates } => {
                let dists: Vec<GammaSampler<f64>> = shapes
                    .iter()
                    .zip(rates)
                    .map(|(s, r)| {
                        GammaSampler::new(*s, 1.0 / r)
                            .map_err(|e| Error::invalid("gamma", e.to_string()))
                    })
                    .collect::<Result<_>>()?;
                let mut data = Vec::with_capacity(n * dists.len());
                for _ in 0..n {
                    for d in &dists {
                        data.push(d.sample(rng));
                    }
                }
                Points::new(data, dists.len())
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::quad::quad;
    use crate::rng::run_rng;

    #[test]
    fn gamma_cdf_spot_values() {
        // Gamma(5,1): high-precision reference values.
        let g = LimitTarget::Gamma { shape: 5.0, rate: 1.0 };
        for (x, want) in [
            (2.0, 0.052653017343711157),
            (5.0, 0.55950671493478759),
            (9.0, 0.94503635850489510),
        ] {
            assert!((g.cdf1(x).unwrap() - want).abs() < 1e-12);
        }
        let g = LimitTarget::Gamma { shape: 2.5, rate: 1.0 };
        assert!((g.cdf1(0.8).unwrap() - 0.098750655498726364).abs() < 1e-12);
        assert!((g.cdf1(3.1).unwrap() - 0.71275831657443891).abs() < 1e-12);
    }

    #[test]
    fn gamma_cdf_integrates_density() {
        let g = LimitTarget::Gamma { shape: 2.5, rate: 1.3 };
        for j in 1..=20 {
            let x = j as f64 / 4.0;
            let num = quad(|t| g.pdf1(t).unwrap(), 0.0, x, 1e-11).unwrap();
            assert!((g.cdf1(x).unwrap() - num).abs() < 1e-8, "x={x}");
        }
    }

    #[test]
    fn weibull_survival() {
        let w = LimitTarget::Weibull { alpha: 1.0 };
        assert_eq!(w.survival1(0.0).unwrap(), 1.0);
        assert!((w.survival1(1.0).unwrap() - (-1.0f64).exp()).abs() < 1e-15);
        // alpha = 1 coincides with Exp(1).
        let e = LimitTarget::Gamma { shape: 1.0, rate: 1.0 };
        for x in [0.1, 0.7, 2.5] {
            assert!((w.cdf1(x).unwrap() - e.cdf1(x).unwrap()).abs() < 1e-14);
        }
        // Survival decreasing to 0.
        let w3 = LimitTarget::Weibull { alpha: 3.0 };
        let mut last = 1.0;
        for x in [0.5, 1.0, 2.0, 4.0] {
            let s = w3.survival1(x).unwrap();
            assert!(s < last);
            last = s;
        }
        assert!(last < 1e-27);
    }

    #[test]
    fn samplers_hit_means() {
        let g = LimitTarget::Gamma { shape: 5.0, rate: 1.0 };
        let draws = g.sample(1_000_000, &mut run_rng(2)).unwrap();
        let mean: f64 = draws.as_slice().iter().sum::<f64>() / 1e6;
        assert!((mean - 5.0).abs() < 0.01, "gamma mean {mean}");

        let pg = LimitTarget::ProductGamma { shapes: vec![1.0, 2.0], rates: vec![1.0, 4.0] };
        let draws = pg.sample(200_000, &mut run_rng(3)).unwrap();
        let m0: f64 = draws.rows().map(|r| r[0]).sum::<f64>() / 2e5;
        let m1: f64 = draws.rows().map(|r| r[1]).sum::<f64>() / 2e5;
        assert!((m0 - 1.0).abs() < 0.01);
        assert!((m1 - 0.5).abs() < 0.01);
    }

    #[test]
    fn product_gamma_rect_cdf() {
        let pg = LimitTarget::ProductGamma { shapes: vec![1.0, 1.0], rates: vec![1.0, 1.0] };
        let got = pg.rect_cdf(&[1.0, 2.0]).unwrap();
        let want = (1.0 - (-1.0f64).exp()) * (1.0 - (-2.0f64).exp());
        assert!((got - want).abs() < 1e-12);
        assert!((pg.rect_cdf(&[1e9, 1e9]).unwrap() - 1.0).abs() < 1e-12);
        assert!(pg.rect_cdf(&[1.0]).is_err());
        let m = pg.marginal(1).unwrap();
        assert_eq!(m, LimitTarget::Gamma { shape: 1.0, rate: 1.0 });
    }

    #[test]
    fn invalid_parameters_rejected() {
        assert!(LimitTarget::Gamma { shape: 0.0, rate: 1.0 }.validate().is_err());
        assert!(LimitTarget::Weibull { alpha: -1.0 }.validate().is_err());
        assert!(LimitTarget::ProductGamma { shapes: vec![1.0], rates: vec![] }
            .validate()
            .is_err());
    }
}
