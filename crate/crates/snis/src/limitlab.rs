//! Reference limit laws and their simulators.
//!
//! Three pieces back the fixed-theta CLT: the covariance of the limiting
//! Gaussian field G_theta (computed by quadrature from prefix moments of
//! Y = e^{theta X}), draws of sup |G_theta| over a grid via a symmetric
//! eigenfactorization, and the concentration band
//! P(|Z - E Z| > u) <= e^{-u^2 / M_theta}.
//!
//! The moving-theta regimes need Poisson random measures: atoms on [0, T]
//! with intensity alpha y^{alpha-1} dy, truncated where the neglected weight
//! integral_T^infty e^{-c1 y} alpha y^{alpha-1} dy drops below tail_tol. The
//! critical-regime limit Z_{c1,PRM} selects one atom y with probability
//! proportional to e^{-c1 y} and emits c1 y; the undersampled regime is
//! covered by the Weibull target and the max-weight statistic.

use crate::dist::Model;
use crate::error::{Error, Result};
use crate::limits::LimitTarget;
use crate::numerics::quad::quad_points;
use crate::numerics::{kahan_sum, ln_gamma, reg_upper_gamma};
use crate::rng::{replicate_rng, run_rng};
use crate::tilt::WeightedEmpirical;
use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::Rng;
use rand_distr::{Distribution, Poisson, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

/// Evaluation spec for the limiting Gaussian field of a fixed-theta tilt:
/// a 1-d bounded continuous model, the tilt, and a sorted grid.
#[derive(Debug, Clone)]
pub struct GaussCovSpec {
    model: Model,
    theta: f64,
    grid: Vec<f64>,
}

impl GaussCovSpec {
    pub fn new(model: Model, theta: f64, grid: Vec<f64>) -> Result<Self> {
        model.validate()?;
        if model.dim() != 1 {
            return Err(Error::DimensionMismatch { expected: 1, got: model.dim() });
        }
        if !model.is_bounded() {
            return Err(Error::UnsupportedModel {
                op: "gauss_cov",
                reason: "prefix moments need a bounded support".into(),
            });
        }
        let lo = model.lower()[0];
        let hi = model.upper()[0];
        // Probe: the model must be continuous (have a density).
        model.pdf1(0.5 * (lo + hi))?;
        if !theta.is_finite() {
            return Err(Error::invalid("theta", "must be finite"));
        }
        if grid.is_empty() {
            return Err(Error::invalid("grid", "must be nonempty"));
        }
        if grid.iter().any(|x| x.is_nan()) || grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid("grid", "must be strictly increasing"));
        }
        Ok(GaussCovSpec { model, theta, grid })
    }

    /// k grid points spanning the model quantiles 1e-4 and 1 - 1e-4.
    pub fn with_default_grid(model: Model, theta: f64, k: usize) -> Result<Self> {
        if k < 2 {
            return Err(Error::invalid("k", "need at least two grid points"));
        }
        let lo = model.quantile1(1e-4)?;
        let hi = model.quantile1(1.0 - 1e-4)?;
        let grid = (0..k)
            .map(|i| lo + (hi - lo) * i as f64 / (k - 1) as f64)
            .collect();
        GaussCovSpec::new(model, theta, grid)
    }

    pub fn model(&self) -> &Model {
        &self.model
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    /// Prefix moments at the supplied points plus the full-span pair:
    /// m1(x) = E[e^{theta(X-M)} 1{X<=x}], m2 likewise with 2 theta. The
    /// covariance formula is scale-free, so the e^{theta M} shift cancels.
    fn prefix_moments(&self, points: &[f64]) -> Result<(Vec<(f64, f64)>, f64, f64)> {
        let lo = self.model.lower()[0];
        let hi = self.model.upper()[0];
        let m = hi;
        let f1 = |x: f64| (self.theta * (x - m)).exp() * self.model.pdf1(x).unwrap_or(f64::NAN);
        let f2 =
            |x: f64| (2.0 * self.theta * (x - m)).exp() * self.model.pdf1(x).unwrap_or(f64::NAN);
        // Cumulative segment integrals over the clamped, sorted break set.
        let mut breaks: Vec<f64> = points.iter().map(|x| x.clamp(lo, hi)).collect();
        breaks.push(hi);
        let mut order: Vec<usize> = (0..breaks.len()).collect();
        order.sort_by(|&a, &b| breaks[a].partial_cmp(&breaks[b]).expect("finite"));
        let mut cum = vec![(0.0, 0.0); breaks.len()];
        let mut prev = lo;
        let mut acc1 = 0.0;
        let mut acc2 = 0.0;
        for &idx in &order {
            let x = breaks[idx];
            if x > prev {
                acc1 += quad_points(f1, &[prev, x], 1e-10)?;
                acc2 += quad_points(f2, &[prev, x], 1e-10)?;
                prev = x;
            }
            cum[idx] = (acc1, acc2);
        }
        let (y3, full2) = cum[breaks.len() - 1];
        Ok((cum[..points.len()].to_vec(), y3, full2))
    }
}

/// Covariance bracket: all moments already shifted by e^{-theta M}.
fn cov_from_moments(
    (m1_a, m2_a): (f64, f64),
    (m1_b, m2_b): (f64, f64),
    y3: f64,
    full2: f64,
) -> f64 {
    // v_ij = m2(min(x_i, x_j)) - y_i y_j; the min is whichever argument has
    // the smaller prefix (m2 is nondecreasing).
    let v12 = if m2_a <= m2_b { m2_a } else { m2_b } - m1_a * m1_b;
    let v13 = m2_a - m1_a * y3;
    let v23 = m2_b - m1_b * y3;
    let v33 = full2 - y3 * y3;
    (v12 - v23 * m1_a / y3 - v13 * m1_b / y3 + v33 * m1_a * m1_b / (y3 * y3)) / (y3 * y3)
}

/// Covariance of the limiting field of sqrt(n)(F_{n,theta} - F_theta) at
/// (x1, x2); symmetric, nonnegative on the diagonal, vanishing at both ends
/// of the support.
pub fn gauss_cov(spec: &GaussCovSpec, x1: f64, x2: f64) -> Result<f64> {
    if x1.is_nan() || x2.is_nan() {
        return Err(Error::invalid("x", "evaluation points must not be NaN"));
    }
    let (moments, y3, full2) = spec.prefix_moments(&[x1, x2])?;
    Ok(cov_from_moments(moments[0], moments[1], y3, full2))
}

/// The full grid covariance matrix of the spec (shared prefix moments, so
/// this is O(k) quadratures, not O(k^2)).
pub fn covariance_matrix(spec: &GaussCovSpec) -> Result<DMatrix<f64>> {
    let k = spec.grid.len();
    let (moments, y3, full2) = spec.prefix_moments(&spec.grid)?;
    let mut sigma = DMatrix::zeros(k, k);
    for i in 0..k {
        for j in i..k {
            let c = cov_from_moments(moments[i], moments[j], y3, full2);
            sigma[(i, j)] = c;
            sigma[(j, i)] = c;
        }
    }
    Ok(sigma)
}

/// i.i.d. draws of sup over the grid of |G_theta| via a symmetric
/// eigenfactorization of the grid covariance (eigenvalues clamped at zero
/// after a -1e-8 tolerance check, plus 1e-10 jitter). Replicate i derives
/// its randomness from (seed, i), so the result is independent of thread
/// count.
pub fn simulate_sup_gauss(spec: &GaussCovSpec, reps: usize, seed: u64) -> Result<Vec<f64>> {
    let sigma = covariance_matrix(spec)?;
    let k = sigma.nrows();
    let eigen = SymmetricEigen::new(sigma);
    let min_eig = eigen.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    if min_eig < -1e-8 {
        return Err(Error::FactorizationFailure { min_eigenvalue: min_eig });
    }
    let scales = DVector::from_iterator(
        k,
        eigen.eigenvalues.iter().map(|l| (l.max(0.0) + 1e-10).sqrt()),
    );
    let root = eigen.eigenvectors * DMatrix::from_diagonal(&scales);
    Ok((0..reps)
        .into_par_iter()
        .map(|i| {
            let mut rng = replicate_rng(seed, i as u64);
            let z = DVector::from_iterator(
                k,
                (0..k).map(|_| StandardNormal.sample(&mut rng)),
            );
            let field = &root * z;
            field.iter().fold(0.0f64, |acc, g| acc.max(g.abs()))
        })
        .collect())
}

#[derive(Debug, Clone, Serialize)]
pub struct BandRow {
    pub u: f64,
    pub bound: f64,
    pub empirical: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct BandReport {
    pub pass: bool,
    pub m_theta: f64,
    pub n_draws: usize,
    pub rows: Vec<BandRow>,
}

/// Concentration check: at every u on a 20-point grid up to the largest
/// centered deviation, the empirical exceedance frequency must not exceed
/// e^{-u^2/M_theta} plus three binomial standard errors.
pub fn borell_band_check(sup_draws: &[f64], m_theta: f64) -> Result<BandReport> {
    if sup_draws.len() < 1000 {
        return Err(Error::invalid("sup_draws", "need at least 1000 draws"));
    }
    if sup_draws.iter().any(|z| !z.is_finite()) {
        return Err(Error::invalid("sup_draws", "draws must be finite"));
    }
    if !(m_theta >= 1.0) {
        return Err(Error::invalid("m_theta", "must be a finite value >= 1"));
    }
    let n = sup_draws.len() as f64;
    let mean = kahan_sum(sup_draws.iter().copied()) / n;
    let u_max = sup_draws.iter().map(|z| (z - mean).abs()).fold(0.0f64, f64::max);
    let rows: Vec<BandRow> = (1..=20)
        .map(|j| {
            let u = u_max * j as f64 / 20.0;
            let empirical =
                sup_draws.iter().filter(|z| (**z - mean).abs() > u).count() as f64 / n;
            let bound = (-u * u / m_theta).exp();
            let se = (empirical * (1.0 - empirical) / n).sqrt();
            BandRow { u, bound, empirical, pass: empirical <= bound + 3.0 * se }
        })
        .collect();
    Ok(BandReport {
        pass: rows.iter().all(|r| r.pass),
        m_theta,
        n_draws: sup_draws.len(),
        rows,
    })
}

/// Extreme-value target for bounded power tails on the positive half-line:
/// survival e^{-t^alpha} (alpha = 1 is Exp(1), the Uniform01 case).
pub fn weibull_limit_target(alpha: f64) -> Result<LimitTarget> {
    let target = LimitTarget::Weibull { alpha };
    target.validate()?;
    Ok(target)
}

/// Poisson random measure on [0, T] with intensity alpha y^{alpha-1} dy,
/// truncated so the neglected selection weight beyond T is below tail_tol.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct PRMConfig {
    alpha: f64,
    truncation_t: f64,
    c1: f64,
    tail_tol: f64,
}

/// integral_t^infty e^{-c1 y} alpha y^{alpha-1} dy
///   = c1^{-alpha} Gamma(alpha+1) Q(alpha, c1 t).
pub fn neglected_weight(alpha: f64, c1: f64, t: f64) -> Result<f64> {
    if !(alpha > 0.0) || !(c1 > 0.0) || !(t >= 0.0) {
        return Err(Error::invalid("prm", "need alpha > 0, c1 > 0, t >= 0"));
    }
    Ok(c1.powf(-alpha) * ln_gamma(alpha + 1.0).exp() * reg_upper_gamma(alpha, c1 * t)?)
}

impl PRMConfig {
    pub const DEFAULT_TAIL_TOL: f64 = 1e-8;

    /// Explicit truncation; the neglected-weight invariant is checked.
    pub fn with_truncation(alpha: f64, truncation_t: f64, c1: f64, tail_tol: f64) -> Result<Self> {
        if !(alpha > 0.0) || !alpha.is_finite() {
            return Err(Error::invalid("alpha", "must be positive and finite"));
        }
        if !(truncation_t > 0.0) || !truncation_t.is_finite() {
            return Err(Error::invalid("truncation_t", "must be positive and finite"));
        }
        if !(c1 > 0.0) || !c1.is_finite() {
            return Err(Error::invalid("c1", "must be positive and finite"));
        }
        if !(tail_tol > 0.0) || tail_tol >= 1.0 {
            return Err(Error::invalid("tail_tol", "must lie in (0, 1)"));
        }
        let neglected = neglected_weight(alpha, c1, truncation_t)?;
        if neglected >= tail_tol {
            return Err(Error::AssumptionViolated {
                op: "prm_config",
                reason: format!("neglected weight {neglected} >= tail_tol {tail_tol}"),
            });
        }
        Ok(PRMConfig { alpha, truncation_t, c1, tail_tol })
    }

    /// Smallest truncation satisfying the invariant, by bisection on the
    /// closed-form tail integral.
    pub fn solve(alpha: f64, c1: f64, tail_tol: f64) -> Result<Self> {
        if !(alpha > 0.0) || !alpha.is_finite() || !(c1 > 0.0) || !c1.is_finite() {
            return Err(Error::invalid("prm", "need positive finite alpha and c1"));
        }
        if !(tail_tol > 0.0) || tail_tol >= 1.0 {
            return Err(Error::invalid("tail_tol", "must lie in (0, 1)"));
        }
        let mut hi = 1.0;
        while neglected_weight(alpha, c1, hi)? >= tail_tol {
            hi *= 2.0;
            if hi > 1e12 {
                return Err(Error::invalid("tail_tol", "no reachable truncation"));
            }
        }
        let mut lo = 0.0;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if neglected_weight(alpha, c1, mid)? >= tail_tol {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        PRMConfig::with_truncation(alpha, hi, c1, tail_tol)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn truncation_t(&self) -> f64 {
        self.truncation_t
    }

    pub fn c1(&self) -> f64 {
        self.c1
    }

    pub fn tail_tol(&self) -> f64 {
        self.tail_tol
    }

    pub fn neglected(&self) -> f64 {
        neglected_weight(self.alpha, self.c1, self.truncation_t).expect("validated")
    }
}

/// One PRM realization: atom count ~ Poisson(T^alpha), locations i.i.d.
/// T U^{1/alpha} (density alpha y^{alpha-1} / T^alpha on [0, T]).
pub(crate) fn prm_atoms<R: Rng + ?Sized>(config: &PRMConfig, rng: &mut R) -> Vec<f64> {
    let intensity = config.truncation_t.powf(config.alpha);
    let count: f64 = Poisson::new(intensity).expect("validated intensity").sample(rng);
    (0..count as usize)
        .map(|_| config.truncation_t * rng.random::<f64>().powf(1.0 / config.alpha))
        .collect()
}

/// Atom list of one simulated PRM.
pub fn simulate_prm_1d(config: &PRMConfig, seed: u64) -> Vec<f64> {
    prm_atoms(config, &mut run_rng(seed))
}

/// Deterministic selection for Z_{c1,PRM} given the uniform draw u: pick
/// atom y with probability proportional to e^{-c1 y} (computed relative to
/// the minimum atom so nothing underflows), emit c1 y.
pub(crate) fn select_z(atoms: &[f64], c1: f64, u: f64) -> f64 {
    let y_min = atoms.iter().copied().fold(f64::INFINITY, f64::min);
    let weights: Vec<f64> = atoms.iter().map(|y| (-c1 * (y - y_min)).exp()).collect();
    let total = kahan_sum(weights.iter().copied());
    let mut threshold = u * total;
    for (y, w) in atoms.iter().zip(&weights) {
        threshold -= w;
        if threshold <= 0.0 {
            return c1 * y;
        }
    }
    c1 * atoms.last().expect("nonempty atom list")
}

#[derive(Debug, Clone)]
pub struct ZCprmSample {
    pub draws: Vec<f64>,
    /// Reps whose PRM had no atom below T and were re-drawn (probability
    /// e^{-T^alpha} each).
    pub redraws: u64,
}

/// reps draws of the critical-regime limit Z_{c1,PRM}; randomness covers
/// both the PRM and the atom selection, split by replicate index.
pub fn sample_z_cprm(config: &PRMConfig, reps: usize, seed: u64) -> Result<ZCprmSample> {
    if config.tail_tol > 1e-6 {
        return Err(Error::invalid("tail_tol", "z_cprm sampling requires tail_tol <= 1e-6"));
    }
    let per_rep: Vec<(f64, u64)> = (0..reps)
        .into_par_iter()
        .map(|i| {
            let mut rng = replicate_rng(seed, i as u64);
            let mut redraws = 0u64;
            loop {
                let atoms = prm_atoms(config, &mut rng);
                if atoms.is_empty() {
                    redraws += 1;
                    continue;
                }
                let u = rng.random::<f64>();
                return (select_z(&atoms, config.c1, u), redraws);
            }
        })
        .collect();
    let redraws = per_rep.iter().map(|(_, r)| r).sum();
    Ok(ZCprmSample { draws: per_rep.into_iter().map(|(z, _)| z).collect(), redraws })
}

/// The undersampled-regime statistic: the largest normalized weight.
pub fn max_weight_stat(we: &WeightedEmpirical) -> f64 {
    we.max_weight()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagnostics::{ks_1d, ks_two_sample};
    use crate::numerics::reg_lower_gamma;
    use crate::tilt::{m_theta_analytic, snis_weights, TiltSpec};

    fn uniform_spec(theta: f64, k: usize) -> GaussCovSpec {
        GaussCovSpec::with_default_grid(Model::Uniform01, theta, k).unwrap()
    }

    #[test]
    fn gauss_cov_matches_oracle() {
        // Reference values computed by 50-digit arbitrary-precision
        // arithmetic before this module was written (Uniform01, theta = 1).
        let spec = GaussCovSpec::new(Model::Uniform01, 1.0, vec![0.5]).unwrap();
        let cases = [
            (0.3, 0.7, 0.081711729652079593),
            (0.5, 0.5, 0.22549014520378778),
            (0.9, 0.9, 0.18305319820877145),
        ];
        for (x1, x2, want) in cases {
            let got = gauss_cov(&spec, x1, x2).unwrap();
            assert!((got / want - 1.0).abs() < 1e-9, "cov({x1},{x2}) = {got}");
        }
        // Symmetry and edge decay.
        let a = gauss_cov(&spec, 0.3, 0.7).unwrap();
        let b = gauss_cov(&spec, 0.7, 0.3).unwrap();
        assert_eq!(a, b);
        assert!(gauss_cov(&spec, f64::INFINITY, f64::INFINITY).unwrap().abs() < 1e-12);
        assert!(gauss_cov(&spec, -1.0, 0.5).unwrap().abs() < 1e-12);
        assert!(gauss_cov(&spec, 0.5, 0.5).unwrap() >= 0.0);
    }

    #[test]
    fn covariance_matrix_is_psd() {
        for (model, theta) in [
            (Model::Uniform01, 2.0),
            (Model::Beta { a: 2.0, b: 5.0 }, 1.5),
        ] {
            let spec = GaussCovSpec::with_default_grid(model, theta, 64).unwrap();
            let sigma = covariance_matrix(&spec).unwrap();
            assert_eq!(sigma, sigma.transpose());
            let eigen = SymmetricEigen::new(sigma);
            let min = eigen.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
            assert!(min >= -1e-8, "min eigenvalue {min}");
        }
    }

    #[test]
    fn sup_gauss_zero_covariance_grid() {
        // Grid below the support: every prefix moment vanishes, all draws 0
        // (up to the 1e-10 jitter).
        let spec = GaussCovSpec::new(Model::Uniform01, 1.0, vec![-5.0, -4.0]).unwrap();
        let draws = simulate_sup_gauss(&spec, 100, 3).unwrap();
        assert!(draws.iter().all(|z| z.abs() < 1e-3), "{draws:?}");
    }

    #[test]
    fn sup_gauss_mean_scales_with_sqrt_m_theta() {
        for theta in [0.5, 1.0, 2.0, 4.0] {
            let spec = uniform_spec(theta, 128);
            let draws = simulate_sup_gauss(&spec, 400, 17).unwrap();
            let mean = draws.iter().sum::<f64>() / draws.len() as f64;
            let m = m_theta_analytic(&Model::Uniform01, &TiltSpec::identity1(theta)).unwrap();
            let ratio = mean / m.sqrt();
            assert!((0.2..=3.0).contains(&ratio), "theta={theta}: ratio {ratio}");
        }
    }

    #[test]
    fn sup_gauss_grid_refinement_grows_in_expectation() {
        let coarse = simulate_sup_gauss(&uniform_spec(1.0, 64), 1500, 29).unwrap();
        let fine = simulate_sup_gauss(&uniform_spec(1.0, 256), 1500, 29).unwrap();
        let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
        assert!(mean(&fine) >= mean(&coarse) - 0.01, "{} vs {}", mean(&fine), mean(&coarse));
    }

    #[test]
    fn sup_gauss_is_deterministic_per_seed() {
        let a = simulate_sup_gauss(&uniform_spec(1.0, 32), 50, 7).unwrap();
        let b = simulate_sup_gauss(&uniform_spec(1.0, 32), 50, 7).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn borell_band_on_uniform_suite() {
        let spec = uniform_spec(1.0, 128);
        let draws = simulate_sup_gauss(&spec, 2000, 31).unwrap();
        let m = m_theta_analytic(&Model::Uniform01, &TiltSpec::identity1(1.0)).unwrap();
        let report = borell_band_check(&draws, m).unwrap();
        assert!(report.pass, "{report:?}");
        assert_eq!(report.n_draws, 2000);
        let json = serde_json::to_value(&report).unwrap();
        let row = &json["rows"][0];
        for key in ["u", "bound", "empirical", "pass"] {
            assert!(row.get(key).is_some(), "missing {key}");
        }

        // Constant draws: zero exceedance everywhere.
        let constant = vec![1.0; 1000];
        assert!(borell_band_check(&constant, 2.0).unwrap().pass);

        // Adversarial synthetic tail must trip the band.
        let mut bad = vec![0.0; 900];
        bad.extend(vec![10.0; 100]);
        assert!(!borell_band_check(&bad, 1.0).unwrap().pass);

        assert!(borell_band_check(&draws[..900], m).is_err());
    }

    #[test]
    fn weibull_target_matches_classical_evt() {
        // max of n uniforms has CDF x^n, so the max itself can be drawn as
        // U^{1/n}; n(1 - max) must then match Exp(1).
        let target = weibull_limit_target(1.0).unwrap();
        let n = 1e5;
        let mut rng = run_rng(37);
        let draws: Vec<f64> = (0..10_000)
            .map(|_| n * (1.0 - rng.random::<f64>().powf(1.0 / n)))
            .collect();
        let k = draws.len();
        let we = WeightedEmpirical::new(
            crate::points::Points::from_scalars(draws),
            vec![1.0 / k as f64; k],
            0.0,
        )
        .unwrap();
        let ks = ks_1d(&we, |x| target.cdf1(x).unwrap()).unwrap();
        assert!(ks < 0.02, "{ks}");
        assert!(weibull_limit_target(0.0).is_err());
    }

    #[test]
    fn prm_count_law() {
        // T = 3, alpha = 1: counts are Poisson(3); restricted to [0,1] they
        // are Poisson(1), compared against the high-precision pmf by
        // chi-square.
        let config = PRMConfig::with_truncation(1.0, 3.0, 20.0, 1e-8).unwrap();
        let sims = 100_000;
        let mut total = 0usize;
        let mut unit_counts = vec![0u64; 6];
        let mut c01 = Vec::with_capacity(sims);
        let mut c12 = Vec::with_capacity(sims);
        for i in 0..sims {
            let atoms = simulate_prm_1d(&config, 1000 + i as u64);
            total += atoms.len();
            let in_unit = atoms.iter().filter(|y| **y <= 1.0).count();
            unit_counts[in_unit.min(5)] += 1;
            c01.push(in_unit as f64);
            c12.push(atoms.iter().filter(|y| **y > 1.0 && **y <= 2.0).count() as f64);
        }
        let mean = total as f64 / sims as f64;
        assert!((mean - 3.0).abs() < 0.03, "mean count {mean}");

        // chi-square vs Poisson(1) pmf. Reference values computed by
        // 50-digit arbitrary-precision arithmetic before this module was
        // written.
        let pmf = [
            0.36787944117144232,
            0.36787944117144232,
            0.18393972058572116,
            0.061313240195240387,
            0.015328310048810097,
        ];
        let mut expected: Vec<f64> = pmf.iter().map(|p| p * sims as f64).collect();
        expected.push((1.0 - pmf.iter().sum::<f64>()) * sims as f64);
        let chi2: f64 = unit_counts
            .iter()
            .zip(&expected)
            .map(|(o, e)| (*o as f64 - e).powi(2) / e)
            .sum();
        let critical = chi2_critical_99(5.0);
        assert!(chi2 < critical, "chi2 {chi2} >= {critical}");

        // Disjoint cells are independent: correlation of counts near zero.
        let mean01 = c01.iter().sum::<f64>() / sims as f64;
        let mean12 = c12.iter().sum::<f64>() / sims as f64;
        let cov: f64 = c01
            .iter()
            .zip(&c12)
            .map(|(a, b)| (a - mean01) * (b - mean12))
            .sum::<f64>()
            / sims as f64;
        let var01 = c01.iter().map(|a| (a - mean01).powi(2)).sum::<f64>() / sims as f64;
        let var12 = c12.iter().map(|a| (a - mean12).powi(2)).sum::<f64>() / sims as f64;
        let corr = cov / (var01 * var12).sqrt();
        assert!(corr.abs() < 0.01, "corr {corr}");
    }

    /// 99th percentile of chi-square with df degrees of freedom, by
    /// bisection on the regularized lower gamma.
    fn chi2_critical_99(df: f64) -> f64 {
        let mut lo = 0.0;
        let mut hi = 200.0;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if reg_lower_gamma(df / 2.0, mid / 2.0).unwrap() < 0.99 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        hi
    }

    #[test]
    fn prm_restriction_property() {
        // Restricting a T = 3 PRM to [0, 1.5] must reproduce the T = 1.5
        // count law; two-sample homogeneity chi-square over count bins.
        let big = PRMConfig::with_truncation(1.0, 3.0, 20.0, 1e-8).unwrap();
        let small = PRMConfig::with_truncation(1.0, 1.5, 20.0, 1e-8).unwrap();
        let sims = 100_000;
        let bins = 8usize;
        let mut from_big = vec![0f64; bins];
        let mut direct = vec![0f64; bins];
        for i in 0..sims {
            let restricted = simulate_prm_1d(&big, 5_000_000 + i as u64)
                .iter()
                .filter(|y| **y <= 1.5)
                .count();
            from_big[restricted.min(bins - 1)] += 1.0;
            let own = simulate_prm_1d(&small, 9_000_000 + i as u64).len();
            direct[own.min(bins - 1)] += 1.0;
        }
        let mut chi2 = 0.0;
        for b in 0..bins {
            let pooled = (from_big[b] + direct[b]) / 2.0;
            if pooled > 0.0 {
                chi2 += (from_big[b] - pooled).powi(2) / pooled
                    + (direct[b] - pooled).powi(2) / pooled;
            }
        }
        let critical = chi2_critical_99((bins - 1) as f64);
        assert!(chi2 < critical, "chi2 {chi2} >= {critical}");
    }

    #[test]
    fn z_cprm_large_c1_concentrates_on_minimum() {
        // With c1 = 50 the selection all but surely picks the smallest atom;
        // c1 * min has survival e^{-(t/c1)^alpha}.
        let config = PRMConfig::with_truncation(1.0, 40.0, 50.0, 1e-8).unwrap();
        let sample = sample_z_cprm(&config, 3000, 43).unwrap();
        assert!(sample.draws.iter().all(|z| *z > 0.0));
        let k = sample.draws.len();
        let we = WeightedEmpirical::new(
            crate::points::Points::from_scalars(sample.draws.clone()),
            vec![1.0 / k as f64; k],
            0.0,
        )
        .unwrap();
        let ks = ks_1d(&we, |t| {
            if t <= 0.0 {
                0.0
            } else {
                1.0 - (-(t / 50.0)).exp()
            }
        })
        .unwrap();
        assert!(ks < 0.05, "{ks}");
    }

    #[test]
    fn z_cprm_truncation_doubling_is_invisible() {
        // Couple T = 40 and T = 80 realizations atom-for-atom: the selected
        // atom never lands beyond 40, so the empirical CDFs coincide and the
        // sup-norm gap is far below 2 * tail_tol.
        let double = PRMConfig::with_truncation(1.0, 80.0, 2.0, 1e-8).unwrap();
        let mut mismatches = 0;
        for i in 0..3000u64 {
            let mut rng = replicate_rng(53, i);
            let atoms = prm_atoms(&double, &mut rng);
            let u = rng.random::<f64>();
            let z_big = select_z(&atoms, 2.0, u);
            let restricted: Vec<f64> =
                atoms.iter().copied().filter(|y| *y <= 40.0).collect();
            if restricted.is_empty() {
                continue;
            }
            let z_small = select_z(&restricted, 2.0, u);
            if z_big != z_small {
                mismatches += 1;
            }
        }
        assert_eq!(mismatches, 0);
    }

    #[test]
    fn z_cprm_rejects_loose_tolerance() {
        let config = PRMConfig::with_truncation(1.0, 40.0, 2.0, 1e-4).unwrap();
        assert!(sample_z_cprm(&config, 10, 1).is_err());
    }

    #[test]
    fn prm_config_solver() {
        let config = PRMConfig::solve(1.0, 2.0, 1e-8).unwrap();
        assert!(config.neglected() < 1e-8);
        // Slightly smaller T violates the invariant: the solve is tight.
        assert!(
            PRMConfig::with_truncation(1.0, config.truncation_t() * 0.99, 2.0, 1e-8).is_err()
        );
        assert!(PRMConfig::with_truncation(1.0, 3.0, 1.0, 1e-8).is_err());
        assert!(PRMConfig::solve(0.0, 2.0, 1e-8).is_err());
    }

    #[test]
    fn trichotomy_accurate_resample_is_gamma() {
        // theta = sqrt(n): resampled theta (1 - R) matches Gamma(1,1).
        let n = 1_000_000;
        let theta = 1000.0;
        let mut rng = run_rng(5);
        let draws = Model::Uniform01.sample(n, &mut rng).unwrap();
        let we = snis_weights(&draws, &TiltSpec::identity1(theta)).unwrap();
        let resampled = we.resample(10_000, &mut rng).unwrap();
        let stats: Vec<f64> =
            resampled.scalars().unwrap().iter().map(|r| theta * (1.0 - r)).collect();
        let k = stats.len();
        let we2 = WeightedEmpirical::new(
            crate::points::Points::from_scalars(stats),
            vec![1.0 / k as f64; k],
            0.0,
        )
        .unwrap();
        let gamma = LimitTarget::Gamma { shape: 1.0, rate: 1.0 };
        let ks = ks_1d(&we2, |x| gamma.cdf1(x).unwrap()).unwrap();
        assert!(ks < 0.03, "{ks}");
    }

    #[test]
    fn trichotomy_critical_matches_z_cprm_not_gamma() {
        // theta = 2n at n = 200: theta (1 - R) for one resampled draw per
        // replicate matches Z_{2,PRM} but not Gamma(1,1).
        let n = 200;
        let theta = 2.0 * n as f64;
        let tilt = TiltSpec::identity1(theta);
        let stats: Vec<f64> = (0..3000u64)
            .map(|i| {
                let mut rng = replicate_rng(61, i);
                let draws = Model::Uniform01.sample(n, &mut rng).unwrap();
                let we = snis_weights(&draws, &tilt).unwrap();
                let r = we.resample(1, &mut rng).unwrap().scalars().unwrap()[0];
                theta * (1.0 - r)
            })
            .collect();
        let config = PRMConfig::with_truncation(1.0, 40.0, 2.0, 1e-8).unwrap();
        let z = sample_z_cprm(&config, 3000, 67).unwrap();
        let ks = ks_two_sample(&stats, &z.draws).unwrap();
        assert!(ks < 0.05, "{ks}");

        let k = stats.len();
        let we = WeightedEmpirical::new(
            crate::points::Points::from_scalars(stats),
            vec![1.0 / k as f64; k],
            0.0,
        )
        .unwrap();
        let gamma = LimitTarget::Gamma { shape: 1.0, rate: 1.0 };
        let ks_gamma = ks_1d(&we, |x| gamma.cdf1(x).unwrap()).unwrap();
        assert!(ks_gamma > 0.1, "{ks_gamma}");
    }

    #[test]
    fn trichotomy_undersampled_max_weight_and_weibull() {
        // theta = n^3 at n = 50: the max weight saturates and n(1 - R)
        // matches Exp(1).
        let n = 50;
        let theta = (n as f64).powi(3);
        let tilt = TiltSpec::identity1(theta);
        let mut saturated = 0;
        let mut stats = Vec::with_capacity(500);
        for i in 0..500u64 {
            let mut rng = replicate_rng(71, i);
            let draws = Model::Uniform01.sample(n, &mut rng).unwrap();
            let we = snis_weights(&draws, &tilt).unwrap();
            if max_weight_stat(&we) >= 0.99 {
                saturated += 1;
            }
            let r = we.resample(1, &mut rng).unwrap().scalars().unwrap()[0];
            stats.push(n as f64 * (1.0 - r));
        }
        assert!(saturated >= 475, "{saturated}/500");
        let k = stats.len();
        let we = WeightedEmpirical::new(
            crate::points::Points::from_scalars(stats),
            vec![1.0 / k as f64; k],
            0.0,
        )
        .unwrap();
        let target = weibull_limit_target(1.0).unwrap();
        let ks = ks_1d(&we, |x| target.cdf1(x).unwrap()).unwrap();
        assert!(ks < 0.05, "{ks}");
    }

    #[test]
    fn spec_validation_rejects_bad_inputs() {
        assert!(GaussCovSpec::new(Model::Uniform01, 1.0, vec![]).is_err());
        assert!(GaussCovSpec::new(Model::Uniform01, 1.0, vec![0.5, 0.5]).is_err());
        assert!(GaussCovSpec::new(Model::Uniform01, f64::NAN, vec![0.5]).is_err());
        let die = Model::DiscreteUniform { values: vec![1.0, 2.0] };
        assert!(GaussCovSpec::new(die, 1.0, vec![1.5]).is_err());
        assert!(GaussCovSpec::new(Model::Exponential { lambda: 1.0 }, 0.2, vec![0.5]).is_err());
        assert!(GaussCovSpec::new(Model::TwoDExample, 1.0, vec![0.5]).is_err());
    }
}
