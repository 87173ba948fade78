//! Multivariate regular variation (MVRV) at the tilt maximizer x_theta.
//!
//! For product-type bounded vectors, the scaled exceedance law converges
//! vaguely: P((x_theta - X)/t in A) / U(t) -> nu(A) with U(t) = t^alpha. The
//! limit measure nu is a product: coordinate i contributes mass
//! K_i (b^{rho_i} - a^{rho_i}) on [a, b], with total index alpha = sum rho_i.
//! Exponential tilting of nu then yields the scaling-limit law with density
//! proportional to e^{-theta^T y} nu(dy): independent Gamma(rho_i, theta_i)
//! coordinates. A power map g(x)_i = x_i^{a_i} preserves the structure with
//! per-coordinate scale a_i x_{theta,i}^{a_i - 1} absorbed into K_i.
//!
//! The worked two-dimensional example (U, V^2) with U, V independent
//! Uniform01 has nu([0,x1] x [0,x2]) = x1 x2 / 2: both indices are 1 and the
//! squared coordinate contributes K = 1/2.

use crate::dist::Model;
use crate::error::{Error, Result};
use crate::limits::LimitTarget;
use crate::numerics::ln_gamma;
use crate::points::Points;
use crate::tilt::{m_theta_analytic, TiltMap, TiltSpec};
use rand::Rng;

/// argmax theta^T x over the support: the box corner selected by the signs
/// of theta. A zero component leaves a whole face of maximizers and is
/// rejected; an unbounded coordinate in the ascent direction has none.
pub fn maximizer(model: &Model, theta: &[f64]) -> Result<Vec<f64>> {
    model.validate()?;
    if theta.len() != model.dim() {
        return Err(Error::DimensionMismatch { expected: model.dim(), got: theta.len() });
    }
    let upper = model.upper();
    let lower = model.lower();
    theta
        .iter()
        .enumerate()
        .map(|(i, t)| {
            let corner = if *t > 0.0 {
                upper[i]
            } else if *t < 0.0 {
                lower[i]
            } else {
                return Err(Error::AssumptionViolated {
                    op: "maximizer",
                    reason: format!("theta[{i}] = 0: maximizer not unique on a box face"),
                });
            };
            if corner.is_finite() {
                Ok(corner)
            } else {
                Err(Error::AssumptionViolated {
                    op: "maximizer",
                    reason: format!("support unbounded in the ascent direction of coordinate {i}"),
                })
            }
        })
        .collect()
}

/// One coordinate of the vector after the accumulated power map: the law of
/// `model`^a, with tail data at its supremum m.
#[derive(Debug, Clone)]
struct CoordTail {
    model: Model,
    a: f64,
    rho: f64,
    k: f64,
    m: f64,
}

impl CoordTail {
    fn new(model: Model, a: f64) -> Result<Self> {
        let rho0 = model.weibull_index().ok_or_else(|| Error::UnsupportedModel {
            op: "mvrv",
            reason: "coordinate carries no Weibull tail index".into(),
        })?;
        let k0 = model.weibull_tail_constant().expect("indexed families carry a constant");
        let m0 = model.upper()[0];
        if a == 1.0 {
            return Ok(CoordTail { model, a, rho: rho0, k: k0, m: m0 });
        }
        if !(a > 0.0) {
            return Err(Error::invalid("exponent", "power exponents must be positive"));
        }
        if m0 == 0.0 {
            // The proof's caveat: the linearization scale a m0^{a-1} degenerates.
            return Err(Error::AssumptionViolated {
                op: "g_pushforward",
                reason: "zero maximizer coordinate with a non-identity power".into(),
            });
        }
        if model.lower()[0] < 0.0 {
            return Err(Error::UnsupportedModel {
                op: "mvrv",
                reason: "power maps need nonnegative support".into(),
            });
        }
        let scale = a * m0.powf(a - 1.0);
        Ok(CoordTail { model, a, rho: rho0, k: k0 / scale.powf(rho0), m: m0.powf(a) })
    }

    /// Survival of the mapped coordinate: P(X^a > y).
    fn sf(&self, y: f64) -> Result<f64> {
        let x = if self.a == 1.0 { y } else { y.max(0.0).powf(1.0 / self.a) };
        self.model.sf1(x)
    }

    /// Essential infimum of the mapped coordinate.
    fn lower(&self) -> f64 {
        let lo = self.model.lower()[0];
        if self.a == 1.0 {
            lo
        } else {
            lo.powf(self.a)
        }
    }
}

/// A product-type model that is regularly varying at the maximizer, carrying
/// the limit measure nu and its scaling function U(t) = t^alpha.
#[derive(Debug, Clone)]
pub struct MvrvModel {
    base: Model,
    /// Power exponents relative to the base coordinates (identity = 1.0).
    model_exponents: Vec<f64>,
    theta: Vec<f64>,
    coords: Vec<CoordTail>,
    alpha: f64,
}

impl MvrvModel {
    /// `theta` must have strictly positive components: that pins the unique
    /// maximizer at the upper corner and makes e^{-theta^T y} nu-integrable
    /// (the failure mode of rotationally symmetric supports is out of scope
    /// by construction, since only products are representable).
    pub fn new(base: &Model, theta: &[f64]) -> Result<Self> {
        base.validate()?;
        if theta.len() != base.dim() {
            return Err(Error::DimensionMismatch { expected: base.dim(), got: theta.len() });
        }
        if theta.iter().any(|t| !(*t > 0.0) || !t.is_finite()) {
            return Err(Error::AssumptionViolated {
                op: "mvrv",
                reason: "theta components must be positive and finite".into(),
            });
        }
        let primitives: Vec<(Model, f64)> = match base {
            Model::ProductVec { components } => {
                components.iter().map(|c| (c.clone(), 1.0)).collect()
            }
            // (U, V^2): the squared coordinate is Uniform01 under a power map.
            Model::TwoDExample => vec![(Model::Uniform01, 1.0), (Model::Uniform01, 2.0)],
            m if m.dim() == 1 => vec![(m.clone(), 1.0)],
            _ => {
                return Err(Error::UnsupportedModel {
                    op: "mvrv",
                    reason: "need a product-type or 1-d bounded model".into(),
                })
            }
        };
        let coords: Vec<CoordTail> = primitives
            .into_iter()
            .map(|(m, a)| CoordTail::new(m, a))
            .collect::<Result<_>>()?;
        let alpha = coords.iter().map(|c| c.rho).sum();
        Ok(MvrvModel {
            base: base.clone(),
            model_exponents: vec![1.0; theta.len()],
            theta: theta.to_vec(),
            coords,
            alpha,
        })
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    /// Maximizer of theta^T g(x): per-coordinate suprema after the power map.
    pub fn x_theta(&self) -> Vec<f64> {
        self.coords.iter().map(|c| c.m).collect()
    }

    pub fn rhos(&self) -> Vec<f64> {
        self.coords.iter().map(|c| c.rho).collect()
    }

    pub fn tail_constants(&self) -> Vec<f64> {
        self.coords.iter().map(|c| c.k).collect()
    }

    /// The regularly varying scaling function U(t) = t^alpha.
    pub fn scaling_u(&self, t: f64) -> f64 {
        t.powf(self.alpha)
    }

    /// nu([lo, hi]) = prod_i K_i (hi_i^{rho_i} - lo_i^{rho_i}); empty or
    /// degenerate rectangles have mass 0.
    pub fn nu_rect(&self, lo: &[f64], hi: &[f64]) -> Result<f64> {
        self.check_rect(lo, hi)?;
        let mut mass = 1.0;
        for (c, (a, b)) in self.coords.iter().zip(lo.iter().zip(hi)) {
            if b <= a {
                return Ok(0.0);
            }
            mass *= c.k * (b.powf(c.rho) - a.powf(c.rho));
        }
        Ok(mass)
    }

    fn check_rect(&self, lo: &[f64], hi: &[f64]) -> Result<()> {
        if lo.len() != self.dim() || hi.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: lo.len().max(hi.len()),
            });
        }
        if lo.iter().chain(hi).any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::invalid("rect", "corners must be finite and nonnegative"));
        }
        Ok(())
    }

    /// (1/U(t)) P((x_theta - g(X))/t in [lo, hi]), evaluated in closed form
    /// from the per-coordinate survival functions.
    pub fn mvrv_ratio(&self, t: f64, lo: &[f64], hi: &[f64]) -> Result<f64> {
        self.check_rect(lo, hi)?;
        if !(t > 0.0) {
            return Err(Error::invalid("t", "scale must be positive"));
        }
        let mut prob = 1.0;
        for (c, (a, b)) in self.coords.iter().zip(lo.iter().zip(hi)) {
            if b <= a {
                return Ok(0.0);
            }
            if c.m - t * b < c.lower() {
                return Err(Error::invalid("t", "t * rect reaches past the support"));
            }
            // P(a <= (m - Y)/t <= b) = P(Y > m - t b) - P(Y > m - t a).
            prob *= c.sf(c.m - t * b)? - c.sf(c.m - t * a)?;
        }
        Ok(prob / self.scaling_u(t))
    }

    /// Monte Carlo estimate of the same ratio with its binomial standard
    /// error; cross-checks the closed form. At most 1e7 draws.
    pub fn mvrv_ratio_mc<R: Rng + ?Sized>(
        &self,
        t: f64,
        lo: &[f64],
        hi: &[f64],
        draws: u64,
        rng: &mut R,
    ) -> Result<(f64, f64)> {
        self.check_rect(lo, hi)?;
        if !(t > 0.0) {
            return Err(Error::invalid("t", "scale must be positive"));
        }
        const BUDGET: u64 = 10_000_000;
        if draws == 0 || draws > BUDGET {
            return Err(Error::BudgetExceeded { needed: draws, limit: BUDGET });
        }
        let mut hits = 0u64;
        for _ in 0..draws {
            let mut inside = true;
            for (c, (a, b)) in self.coords.iter().zip(lo.iter().zip(hi)) {
                let x = c.model.sample(1, rng)?.as_slice()[0];
                let y = if c.a == 1.0 { x } else { x.powf(c.a) };
                let z = (c.m - y) / t;
                if !(*a <= z && z <= *b) {
                    inside = false;
                    // Keep drawing the remaining coordinates so the stream
                    // position does not depend on the data.
                }
            }
            if inside {
                hits += 1;
            }
        }
        let p = hits as f64 / draws as f64;
        let se = (p * (1.0 - p) / draws as f64).sqrt();
        let u = self.scaling_u(t);
        Ok((p / u, se / u))
    }

    /// The scaling limit: density proportional to e^{-theta^T y} nu(dy),
    /// i.e. independent Gamma(rho_i, theta_i) coordinates.
    pub fn z_limit_target(&self) -> Result<LimitTarget> {
        let target =
            LimitTarget::ProductGamma { shapes: self.rhos(), rates: self.theta.clone() };
        target.validate()?;
        Ok(target)
    }

    /// U(1/c) M_{c theta} -> 2^{-alpha} / int e^{-theta^T y} nu(dy).
    pub fn m_theta_asymptote_hd(&self, c: f64) -> Result<f64> {
        if !(c > 0.0) {
            return Err(Error::invalid("c", "scale must be positive"));
        }
        let theta: Vec<f64> = self.theta.iter().map(|t| c * t).collect();
        let g = if self.model_exponents.iter().all(|a| *a == 1.0) {
            TiltMap::Identity
        } else {
            TiltMap::PowerPerCoordinate(self.model_exponents.clone())
        };
        let m = m_theta_analytic(&self.base, &TiltSpec::new(theta, g)?)?;
        Ok(self.scaling_u(1.0 / c) * m)
    }

    /// The cited limit of `m_theta_asymptote_hd`: the tilt integral is
    /// prod_i K_i Gamma(rho_i + 1) / theta_i^{rho_i}.
    pub fn m_theta_hd_limit(&self) -> f64 {
        let mut integral = 1.0;
        for (c, t) in self.coords.iter().zip(&self.theta) {
            integral *= c.k * ln_gamma(c.rho + 1.0).exp() / t.powf(c.rho);
        }
        2f64.powf(-self.alpha) / integral
    }

    /// Pushforward under g(x)_i = x_i^{a_i}: same indices rho_i, tail
    /// constants rescaled by the linearization a_i x_{theta,i}^{a_i - 1}.
    pub fn g_pushforward(&self, exponents: &[f64]) -> Result<MvrvModel> {
        if exponents.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: exponents.len() });
        }
        let coords: Vec<CoordTail> = self
            .coords
            .iter()
            .zip(exponents)
            .map(|(c, e)| CoordTail::new(c.model.clone(), c.a * e))
            .collect::<Result<_>>()?;
        let model_exponents: Vec<f64> =
            self.model_exponents.iter().zip(exponents).map(|(a, e)| a * e).collect();
        let alpha = coords.iter().map(|c| c.rho).sum();
        Ok(MvrvModel {
            base: self.base.clone(),
            model_exponents,
            theta: self.theta.clone(),
            coords,
            alpha,
        })
    }

    /// n draws of g(X) (used by the Monte Carlo harnesses).
    pub fn sample_g<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Result<Points> {
        let base_draws = self.base.sample(n, rng)?;
        if self.model_exponents.iter().all(|a| *a == 1.0) {
            return Ok(base_draws);
        }
        let mut out = Points::with_capacity(n, self.dim());
        let mut row = vec![0.0; self.dim()];
        for r in base_draws.rows() {
            for (j, x) in r.iter().enumerate() {
                row[j] = x.powf(self.model_exponents[j]);
            }
            out.push_row(&row)?;
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::run_rng;

    fn two_d() -> MvrvModel {
        MvrvModel::new(&Model::TwoDExample, &[1.0, 1.0]).unwrap()
    }

    #[test]
    fn maximizer_corners() {
        let got = maximizer(&Model::TwoDExample, &[1.0, 1.0]).unwrap();
        assert_eq!(got, vec![1.0, 1.0]);
        let pv = Model::ProductVec { components: vec![Model::Uniform01, Model::Uniform01] };
        assert_eq!(maximizer(&pv, &[2.0, 3.0]).unwrap(), vec![1.0, 1.0]);
        assert_eq!(maximizer(&pv, &[1.0, -1.0]).unwrap(), vec![1.0, 0.0]);
        assert!(matches!(
            maximizer(&pv, &[1.0, 0.0]),
            Err(Error::AssumptionViolated { .. })
        ));
        // Unbounded below in the descent direction.
        let tn = Model::TruncNormal { mu: 0.0, sigma: 1.0, upper: 1.0 };
        assert!(maximizer(&tn, &[-1.0]).is_err());
    }

    #[test]
    fn nu_rect_worked_example() {
        let m = two_d();
        assert!((m.nu_rect(&[0.0, 0.0], &[1.0, 2.0]).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(m.nu_rect(&[0.5, 0.5], &[0.5, 2.0]).unwrap(), 0.0);
        assert_eq!(m.alpha(), 2.0);
        assert_eq!(m.x_theta(), vec![1.0, 1.0]);
    }

    #[test]
    fn nu_rect_scaling_homogeneity() {
        let models = [
            two_d(),
            MvrvModel::new(
                &Model::ProductVec {
                    components: vec![Model::Beta { a: 2.0, b: 5.0 }, Model::Uniform01],
                },
                &[1.0, 2.0],
            )
            .unwrap(),
        ];
        let mut rng = run_rng(17);
        for m in &models {
            for c in [2.0, 3.0, 0.5] {
                for _ in 0..20 {
                    let lo: Vec<f64> = (0..m.dim()).map(|_| rng.random::<f64>()).collect();
                    let hi: Vec<f64> =
                        lo.iter().map(|a| a + rng.random::<f64>() + 0.01).collect();
                    let clo: Vec<f64> = lo.iter().map(|v| c * v).collect();
                    let chi: Vec<f64> = hi.iter().map(|v| c * v).collect();
                    let direct = m.nu_rect(&clo, &chi).unwrap();
                    let scaled = c.powf(m.alpha()) * m.nu_rect(&lo, &hi).unwrap();
                    assert!(
                        (direct - scaled).abs() <= 1e-10 * direct.abs().max(1.0),
                        "c={c}: {direct} vs {scaled}"
                    );
                }
            }
        }
    }

    #[test]
    fn mvrv_ratio_two_d_worked_example() {
        let m = two_d();
        let r = m.mvrv_ratio(1e-3, &[0.0, 0.0], &[1.0, 1.0]).unwrap();
        assert!((r - 0.5).abs() < 0.005, "{r}");
        // Error shrinks as t halves.
        let mut last = f64::INFINITY;
        for t in [1e-2, 5e-3, 2.5e-3] {
            let err = (m.mvrv_ratio(t, &[0.0, 0.0], &[1.0, 1.0]).unwrap() - 0.5).abs();
            assert!(err < last, "t={t}");
            last = err;
        }
    }

    #[test]
    fn mvrv_ratio_uniform_is_exact() {
        let m = MvrvModel::new(&Model::Uniform01, &[5.0]).unwrap();
        for t in [1e-1, 1e-2, 1e-3] {
            let r = m.mvrv_ratio(t, &[0.0], &[3.0]).unwrap();
            assert!((r - 3.0).abs() < 1e-10, "t={t}: {r}");
        }
        assert!(m.mvrv_ratio(1.0, &[0.0], &[3.0]).is_err());
    }

    #[test]
    fn mvrv_ratio_monte_carlo_agrees() {
        let m = two_d();
        let (est, se) = m
            .mvrv_ratio_mc(0.05, &[0.0, 0.0], &[1.0, 1.0], 1_000_000, &mut run_rng(23))
            .unwrap();
        let exact = m.mvrv_ratio(0.05, &[0.0, 0.0], &[1.0, 1.0]).unwrap();
        assert!((est - exact).abs() < 3.0 * se + 1e-12, "{est} vs {exact} (se {se})");
        assert!(m
            .mvrv_ratio_mc(0.05, &[0.0, 0.0], &[1.0, 1.0], 100_000_000, &mut run_rng(1))
            .is_err());
    }

    #[test]
    fn z_limit_is_product_exponential_for_two_d() {
        let m = two_d();
        let z = m.z_limit_target().unwrap();
        assert_eq!(
            z,
            LimitTarget::ProductGamma { shapes: vec![1.0, 1.0], rates: vec![1.0, 1.0] }
        );
        // Coordinate independence of the sampler.
        let draws = z.sample(1_000_000, &mut run_rng(29)).unwrap();
        let n = draws.len() as f64;
        let (mut s0, mut s1, mut s01, mut q0, mut q1) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for r in draws.rows() {
            s0 += r[0];
            s1 += r[1];
            s01 += r[0] * r[1];
            q0 += r[0] * r[0];
            q1 += r[1] * r[1];
        }
        let cov = s01 / n - (s0 / n) * (s1 / n);
        let corr = cov / ((q0 / n - (s0 / n).powi(2)) * (q1 / n - (s1 / n).powi(2))).sqrt();
        assert!(corr.abs() < 0.01, "corr {corr}");
    }

    #[test]
    fn m_theta_asymptote_hd_matches_oracle() {
        // High-precision reference: M_{c theta}/c^2 at c = 100, 200 for the
        // worked example; the limit is 1/2.
        let m = two_d();
        let a100 = m.m_theta_asymptote_hd(100.0).unwrap();
        assert!((a100 / 0.49620826147468254 - 1.0).abs() < 1e-8, "{a100}");
        let a200 = m.m_theta_asymptote_hd(200.0).unwrap();
        assert!((a200 / 0.49811470732902878 - 1.0).abs() < 1e-8, "{a200}");
        let limit = m.m_theta_hd_limit();
        assert!((limit - 0.5).abs() < 1e-12, "{limit}");
        assert!((a200 / limit - 1.0).abs() < 0.02);
        assert!((a200 - limit).abs() < (a100 - limit).abs());

        // Product of two Uniform01 at theta = (1,1): limit 1/4.
        let pv = MvrvModel::new(
            &Model::ProductVec { components: vec![Model::Uniform01, Model::Uniform01] },
            &[1.0, 1.0],
        )
        .unwrap();
        assert!((pv.m_theta_hd_limit() - 0.25).abs() < 1e-12);
        let a = pv.m_theta_asymptote_hd(400.0).unwrap();
        assert!((a - 0.25).abs() < 0.002, "{a}");
    }

    #[test]
    fn pushforward_rescales_tail_constants() {
        // Identity leaves everything unchanged.
        let m = two_d();
        let same = m.g_pushforward(&[1.0, 1.0]).unwrap();
        assert_eq!(same.rhos(), m.rhos());
        assert_eq!(same.tail_constants(), m.tail_constants());

        // Uniform01 under x^2: nu([0, y]) = y/2 and the ratio still
        // converges to it (the squared coordinate of the worked example).
        let u = MvrvModel::new(&Model::Uniform01, &[1.0]).unwrap();
        let sq = u.g_pushforward(&[2.0]).unwrap();
        assert!((sq.nu_rect(&[0.0], &[1.0]).unwrap() - 0.5).abs() < 1e-15);
        let r = sq.mvrv_ratio(1e-4, &[0.0], &[1.0]).unwrap();
        assert!((r - 0.5).abs() < 0.01, "{r}");
        // Homogeneity is preserved.
        let direct = sq.nu_rect(&[0.0], &[2.0]).unwrap();
        assert!((direct - 2.0 * 0.5).abs() < 1e-12);
        // M_theta through the pushforward matches the worked example's
        // squared coordinate.
        let a = sq.m_theta_asymptote_hd(100.0).unwrap();
        let want = 99.241652294936509 / 100.0;
        assert!((a / want - 1.0).abs() < 1e-8, "{a}");
    }

    #[test]
    fn construction_rejects_bad_inputs() {
        assert!(MvrvModel::new(&Model::TwoDExample, &[1.0, 0.0]).is_err());
        assert!(MvrvModel::new(&Model::TwoDExample, &[1.0, -2.0]).is_err());
        let die = Model::DiscreteUniform { values: vec![1.0, 2.0] };
        assert!(MvrvModel::new(&die, &[1.0]).is_err());
        let pv = Model::ProductVec { components: vec![Model::Uniform01, die] };
        assert!(MvrvModel::new(&pv, &[1.0, 1.0]).is_err());
        // Zero maximizer coordinate under a non-identity power.
        let tn = Model::TruncNormal { mu: 0.0, sigma: 1.0, upper: 0.0 };
        let m = MvrvModel::new(&tn, &[1.0]).unwrap();
        assert!(m.g_pushforward(&[2.0]).is_err());
    }
}
