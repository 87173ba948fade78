//! Distances and decision surfaces for SNIS output.
//!
//! The one-dimensional Kolmogorov-Smirnov distance against a weighted
//! empirical law has an exact value: sort the atoms, accumulate weights, and
//! compare the reference CDF against both one-sided limits at every atom. In
//! d > 1 the sup is taken over lower-left orthant corners of a grid inside a
//! compact box (uniform convergence over compacts is what the theory
//! provides there). `regime_classify` turns a measured (n, M_theta) schedule
//! into the accurate / critical / undersampled trichotomy plus the largest
//! admissible blocking rate s_n = n^a with s_n^2 M_{theta_n}/n -> 0.

use crate::error::{Error, Result};
use crate::tilt::WeightedEmpirical;
use serde::Serialize;

/// Exact weighted one-sample KS distance sup_x |F_we(x) - F(x)| for d = 1.
pub fn ks_1d<F: Fn(f64) -> f64>(we: &WeightedEmpirical, cdf: F) -> Result<f64> {
    if we.points().dim() != 1 {
        return Err(Error::DimensionMismatch { expected: 1, got: we.points().dim() });
    }
    let mut atoms: Vec<(f64, f64)> = we
        .points()
        .scalars()?
        .iter()
        .copied()
        .zip(we.weights().iter().copied())
        .collect();
    if atoms.iter().any(|(x, _)| x.is_nan()) {
        return Err(Error::invalid("atoms", "NaN atom in weighted empirical"));
    }
    atoms.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("NaN filtered"));
    let mut sup: f64 = 0.0;
    let mut cum = 0.0;
    let mut i = 0;
    while i < atoms.len() {
        let x = atoms[i].0;
        let before = cum;
        // Merge ties so the jump at x is treated as a single step.
        while i < atoms.len() && atoms[i].0 == x {
            cum += atoms[i].1;
            i += 1;
        }
        let f = cdf(x);
        if f.is_nan() {
            return Err(Error::invalid("cdf", format!("reference CDF is NaN at {x}")));
        }
        sup = sup.max((cum - f).abs()).max((before - f).abs());
    }
    Ok(sup.min(1.0))
}

/// Classical two-sample KS statistic; symmetric in its arguments.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptySample);
    }
    if a.iter().chain(b).any(|x| x.is_nan()) {
        return Err(Error::invalid("draws", "NaN draw in two-sample KS"));
    }
    let mut sa = a.to_vec();
    let mut sb = b.to_vec();
    sa.sort_by(|x, y| x.partial_cmp(y).expect("NaN filtered"));
    sb.sort_by(|x, y| x.partial_cmp(y).expect("NaN filtered"));
    let (na, nb) = (sa.len() as f64, sb.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut sup: f64 = 0.0;
    while i < sa.len() && j < sb.len() {
        let t = sa[i].min(sb[j]);
        // Advance both past every atom at t before comparing CDFs.
        while i < sa.len() && sa[i] == t {
            i += 1;
        }
        while j < sb.len() && sb[j] == t {
            j += 1;
        }
        sup = sup.max((i as f64 / na - j as f64 / nb).abs());
    }
    Ok(sup.min(1.0))
}

/// Orthant-sup distance over a grid inside a compact box, with the grid
/// resolution it was computed at.
#[derive(Debug, Clone, Serialize)]
pub struct KsRectReport {
    pub statistic: f64,
    pub grid_k: usize,
    /// Per-axis grid spacing inside the box.
    pub spacing: Vec<f64>,
}

/// Sup over the grid_k^d lower-left orthant corners c in the box of
/// |sum_i w_i 1{x_i <= c} - reference(c)|. The reference handle returns the
/// orthant mass P(Y <= c).
pub fn ks_rect_hd<F: Fn(&[f64]) -> Result<f64>>(
    we: &WeightedEmpirical,
    reference: F,
    box_lo: &[f64],
    box_hi: &[f64],
    grid_k: usize,
) -> Result<KsRectReport> {
    let d = we.points().dim();
    if d < 2 {
        return Err(Error::DimensionMismatch { expected: 2, got: d });
    }
    if box_lo.len() != d || box_hi.len() != d {
        return Err(Error::DimensionMismatch { expected: d, got: box_lo.len().min(box_hi.len()) });
    }
    if grid_k < 2 {
        return Err(Error::invalid("grid_k", "need at least two grid points per axis"));
    }
    if box_lo
        .iter()
        .zip(box_hi)
        .any(|(a, b)| !a.is_finite() || !b.is_finite() || b <= a)
    {
        return Err(Error::invalid("box", "compact box needs finite lo < hi per axis"));
    }
    const BUDGET: u64 = 10_000_000;
    let corners = (grid_k as u64).checked_pow(d as u32).unwrap_or(u64::MAX);
    if corners > BUDGET {
        return Err(Error::BudgetExceeded { needed: corners, limit: BUDGET });
    }

    // Per-axis grid lines at lo + (i+1)(hi-lo)/grid_k, so doubling grid_k
    // refines to a superset lattice. Bin every sample once: bucket j holds
    // the weight of points with grid[j-1] < x <= grid[j] (bucket 0: x <=
    // grid[0], bucket grid_k: beyond the box). Orthant masses are prefix
    // sums.
    let spacing: Vec<f64> =
        (0..d).map(|ax| (box_hi[ax] - box_lo[ax]) / grid_k as f64).collect();
    let grids: Vec<Vec<f64>> = (0..d)
        .map(|ax| (0..grid_k).map(|i| box_lo[ax] + spacing[ax] * (i + 1) as f64).collect())
        .collect();
    let side = grid_k + 1;
    let mut hist = vec![0.0f64; side.pow(d as u32)];
    for (row, w) in we.points().rows().zip(we.weights()) {
        let mut flat = 0usize;
        for (ax, x) in row.iter().enumerate() {
            if x.is_nan() {
                return Err(Error::invalid("atoms", "NaN atom in weighted empirical"));
            }
            let bucket = grids[ax].partition_point(|g| g < x);
            flat = flat * side + bucket;
        }
        hist[flat] += w;
    }
    // In-place prefix sums along each axis turn cell weights into masses of
    // lower orthants ending at each bucket boundary.
    for ax in 0..d {
        let stride = side.pow((d - 1 - ax) as u32);
        for idx in 0..hist.len() {
            if (idx / stride) % side > 0 {
                hist[idx] += hist[idx - stride];
            }
        }
    }

    let mut sup: f64 = 0.0;
    let mut corner = vec![0usize; d];
    let mut point = vec![0.0f64; d];
    loop {
        let mut flat = 0usize;
        for ax in 0..d {
            point[ax] = grids[ax][corner[ax]];
            flat = flat * side + corner[ax];
        }
        let reference_mass = reference(&point)?;
        if reference_mass.is_nan() {
            return Err(Error::invalid("cdf", "reference orthant mass is NaN"));
        }
        sup = sup.max((hist[flat] - reference_mass).abs());
        // Odometer increment over the corner lattice.
        let mut ax = d;
        loop {
            if ax == 0 {
                return Ok(KsRectReport { statistic: sup.min(1.0), grid_k, spacing });
            }
            ax -= 1;
            corner[ax] += 1;
            if corner[ax] < grid_k {
                break;
            }
            corner[ax] = 0;
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    Accurate,
    Critical,
    Undersampled,
}

#[derive(Debug, Clone, Serialize)]
pub struct EvidenceRow {
    pub n: f64,
    pub m_theta: f64,
    pub ratio: f64,
}

/// Classification of an (n, M_theta) schedule with the largest admissible
/// blocking-rate exponent a: s_n = n^a keeps s_n^2 M_{theta_n}/n -> 0.
#[derive(Debug, Clone, Serialize)]
pub struct RegimeReport {
    pub m_theta: f64,
    pub n: f64,
    pub ratio: f64,
    pub regime: Regime,
    pub admissible_rate_exponent: f64,
    pub evidence: Vec<EvidenceRow>,
}

/// Fit log(M/n) against log n by least squares and threshold: final ratio
/// below 0.1 with a negative slope is accurate; otherwise a near-flat slope
/// (|slope| < 0.1) is critical; everything else is undersampled. The
/// admissible exponent is -slope/2 clamped to [0, 1/2].
pub fn regime_classify(schedule: &[(f64, f64)]) -> Result<RegimeReport> {
    if schedule.len() < 3 {
        return Err(Error::invalid("schedule", "need at least three (n, M) rows"));
    }
    for w in schedule.windows(2) {
        if !(w[1].0 > w[0].0) {
            return Err(Error::invalid("schedule", "sample sizes must be strictly increasing"));
        }
    }
    if schedule.iter().any(|(n, m)| !(*n > 0.0) || !(*m > 0.0) || !n.is_finite() || !m.is_finite())
    {
        return Err(Error::invalid("schedule", "rows must have positive finite n and M"));
    }
    let evidence: Vec<EvidenceRow> = schedule
        .iter()
        .map(|(n, m)| EvidenceRow { n: *n, m_theta: *m, ratio: m / n })
        .collect();
    let xs: Vec<f64> = evidence.iter().map(|r| r.n.ln()).collect();
    let ys: Vec<f64> = evidence.iter().map(|r| r.ratio.ln()).collect();
    let k = xs.len() as f64;
    let xbar = xs.iter().sum::<f64>() / k;
    let ybar = ys.iter().sum::<f64>() / k;
    let sxx: f64 = xs.iter().map(|x| (x - xbar).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - xbar) * (y - ybar)).sum();
    let slope = sxy / sxx;

    let last = evidence.last().expect("len >= 3");
    let regime = if last.ratio < 0.1 && slope < 0.0 {
        Regime::Accurate
    } else if slope.abs() < 0.1 {
        Regime::Critical
    } else {
        Regime::Undersampled
    };
    // `+ 0.0` maps the slope = +0.0 case to +0.0 rather than -0.0 (IEEE
    // guarantees -0.0 + 0.0 = +0.0), keeping serialized reports sign-clean.
    let admissible_rate_exponent = (-slope / 2.0).clamp(0.0, 0.5) + 0.0;
    Ok(RegimeReport {
        m_theta: last.m_theta,
        n: last.n,
        ratio: last.ratio,
        regime,
        admissible_rate_exponent,
        evidence,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::Model;
    use crate::limits::LimitTarget;
    use crate::points::Points;
    use crate::rng::{replicate_rng, run_rng};
    use crate::tilt::{snis_weights, TiltSpec, TiltedLaw1D};
    use rand::Rng;

    fn we_from(atoms: &[f64], weights: &[f64]) -> WeightedEmpirical {
        WeightedEmpirical::new(Points::from_scalars(atoms.to_vec()), weights.to_vec(), 0.0).unwrap()
    }

    #[test]
    fn ks_1d_hand_cases() {
        let single = we_from(&[0.0], &[1.0]);
        assert_eq!(ks_1d(&single, |x| x.clamp(0.0, 1.0)).unwrap(), 1.0);
        let pair = we_from(&[0.0, 1.0], &[0.5, 0.5]);
        assert!((ks_1d(&pair, |x| x.clamp(0.0, 1.0)).unwrap() - 0.5).abs() < 1e-15);
        // Ties merge into a single jump.
        let tied = we_from(&[0.5, 0.5], &[0.5, 0.5]);
        assert!((ks_1d(&tied, |x| x.clamp(0.0, 1.0)).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn ks_1d_brackets_fine_grid_scan() {
        let mut rng = run_rng(3);
        let atoms: Vec<f64> = (0..257).map(|_| rng.random::<f64>()).collect();
        let raw: Vec<f64> = (0..257).map(|_| rng.random::<f64>() + 0.1).collect();
        let total: f64 = raw.iter().sum();
        let weights: Vec<f64> = raw.iter().map(|w| w / total).collect();
        let we = we_from(&atoms, &weights);
        let exact = ks_1d(&we, |x| x.clamp(0.0, 1.0)).unwrap();

        let mut sorted: Vec<(f64, f64)> = atoms.iter().copied().zip(weights).collect();
        sorted.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        let grid_n = 1_000_000;
        let mut grid_sup: f64 = 0.0;
        let mut cum = 0.0;
        let mut k = 0;
        for i in 0..grid_n {
            let x = i as f64 / grid_n as f64;
            while k < sorted.len() && sorted[k].0 <= x {
                cum += sorted[k].1;
                k += 1;
            }
            grid_sup = grid_sup.max((cum - x).abs());
        }
        assert!(grid_sup <= exact + 1e-12, "{grid_sup} vs {exact}");
        assert!(exact <= grid_sup + 2e-6, "{exact} vs {grid_sup}");
    }

    #[test]
    fn ks_1d_invariant_under_increasing_relabeling() {
        let mut rng = run_rng(11);
        let atoms: Vec<f64> = (0..100).map(|_| rng.random::<f64>()).collect();
        let weights = vec![0.01; 100];
        let we = we_from(&atoms, &weights);
        let d0 = ks_1d(&we, |x| x.clamp(0.0, 1.0)).unwrap();
        // y = 2x + 1 is exact in floating point and exactly invertible.
        let relabeled: Vec<f64> = atoms.iter().map(|x| 2.0 * x + 1.0).collect();
        let we2 = we_from(&relabeled, &weights);
        let d1 = ks_1d(&we2, |y| ((y - 1.0) / 2.0).clamp(0.0, 1.0)).unwrap();
        assert_eq!(d0, d1);
    }

    #[test]
    fn ks_1d_rate_on_accurate_schedule() {
        // Fixed theta: the distance to the exact tilted law decays at the
        // root-n rate; the fitted log-log slope sits in [-0.65, -0.35].
        let model = Model::Uniform01;
        let tilt = TiltSpec::identity1(1.0);
        let law = TiltedLaw1D::new(&model, 1.0).unwrap();
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for (i, e) in (10..=18).enumerate() {
            let n = 1usize << e;
            let draws = model.sample(n, &mut replicate_rng(7, i as u64)).unwrap();
            let we = snis_weights(&draws, &tilt).unwrap();
            let d = ks_1d(&we, |x| law.cdf(x)).unwrap();
            xs.push((n as f64).ln());
            ys.push(d.ln());
        }
        let k = xs.len() as f64;
        let xbar = xs.iter().sum::<f64>() / k;
        let ybar = ys.iter().sum::<f64>() / k;
        let sxx: f64 = xs.iter().map(|x| (x - xbar).powi(2)).sum();
        let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - xbar) * (y - ybar)).sum();
        let slope = sxy / sxx;
        assert!((-0.65..=-0.35).contains(&slope), "slope {slope}");
    }

    #[test]
    fn ks_two_sample_basics() {
        let a = [0.1, 0.2, 0.7];
        assert_eq!(ks_two_sample(&a, &a).unwrap(), 0.0);
        let b = [1.1, 1.5];
        assert_eq!(ks_two_sample(&a, &b).unwrap(), 1.0);
        assert_eq!(
            ks_two_sample(&a, &b).unwrap(),
            ks_two_sample(&b, &a).unwrap()
        );
        assert!(ks_two_sample(&[], &a).is_err());
    }

    #[test]
    fn ks_two_sample_critical_value_band() {
        // Two Uniform01 samples of 1e4: the statistic stays below 1.5x the
        // 5% critical value 1.36 sqrt(2/n) in at least 95% of 200 reps.
        let bound = 1.36 * (2.0 / 1e4f64).sqrt() * 1.5;
        let mut pass = 0;
        for rep in 0..200 {
            let mut rng = replicate_rng(13, rep);
            let a: Vec<f64> = (0..10_000).map(|_| rng.random::<f64>()).collect();
            let b: Vec<f64> = (0..10_000).map(|_| rng.random::<f64>()).collect();
            if ks_two_sample(&a, &b).unwrap() < bound {
                pass += 1;
            }
        }
        assert!(pass >= 190, "{pass}/200");
    }

    #[test]
    fn ks_rect_hd_product_law() {
        // Exact draws from Exp(1) x Exp(1) against its orthant CDF.
        let target = LimitTarget::ProductGamma { shapes: vec![1.0, 1.0], rates: vec![1.0, 1.0] };
        let draws = target.sample(1_000_000, &mut run_rng(5)).unwrap();
        let n = draws.len();
        let we = WeightedEmpirical::new(draws, vec![1.0 / n as f64; n], 0.0).unwrap();
        let report = ks_rect_hd(
            &we,
            |c| target.rect_cdf(c),
            &[0.0, 0.0],
            &[8.0, 8.0],
            32,
        )
        .unwrap();
        assert!(report.statistic < 0.01, "{}", report.statistic);
        assert_eq!(report.grid_k, 32);

        // Point mass at the box corner vs the continuous reference.
        let corner = WeightedEmpirical::new(
            Points::new(vec![8.0, 8.0], 2).unwrap(),
            vec![1.0],
            0.0,
        )
        .unwrap();
        let gap = ks_rect_hd(
            &corner,
            |c| target.rect_cdf(c),
            &[0.0, 0.0],
            &[8.0, 8.0],
            8,
        )
        .unwrap();
        assert!(gap.statistic >= 1.0 - target.rect_cdf(&[8.0, 8.0]).unwrap() - 1e-12);
    }

    #[test]
    fn ks_rect_hd_refinement_monotone_and_budget() {
        let target = LimitTarget::ProductGamma { shapes: vec![1.0, 1.0], rates: vec![1.0, 1.0] };
        let draws = target.sample(20_000, &mut run_rng(9)).unwrap();
        let n = draws.len();
        let we = WeightedEmpirical::new(draws, vec![1.0 / n as f64; n], 0.0).unwrap();
        let orthant = |c: &[f64]| target.rect_cdf(c);
        let coarse = ks_rect_hd(&we, orthant, &[0.0, 0.0], &[8.0, 8.0], 8).unwrap();
        let fine = ks_rect_hd(&we, orthant, &[0.0, 0.0], &[8.0, 8.0], 16).unwrap();
        // The 8-line grid is nested in the 16-line grid (both span the box
        // uniformly), so the sup can only grow.
        assert!(fine.statistic >= coarse.statistic - 1e-15);
        assert!(matches!(
            ks_rect_hd(&we, orthant, &[0.0, 0.0], &[8.0, 8.0], 4000),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn regime_exponential_schedule_is_accurate() {
        // Exp(1) with theta_n = 1/2 - 1/sqrt(n): M = (sqrt(n)+2)^2/(8 sqrt n),
        // so M/n decays like n^{-1/2} and the admissible exponent is 1/4.
        let schedule: Vec<(f64, f64)> = (2..=7)
            .map(|e| {
                let n = 10f64.powi(e);
                let s = n.sqrt();
                (n, (s + 2.0).powi(2) / (8.0 * s))
            })
            .collect();
        let report = regime_classify(&schedule).unwrap();
        assert_eq!(report.regime, Regime::Accurate);
        assert!(
            (report.admissible_rate_exponent - 0.25).abs() < 0.02,
            "{}",
            report.admissible_rate_exponent
        );
        assert_eq!(report.evidence.len(), 6);
    }

    #[test]
    fn regime_dice_log_schedule_rate() {
        // Six-sided die with theta_n = C log n, C = 1/12: the governing
        // moment grows like (1/6) sum_i n^{C i}, so M/n ~ n^{6C-1} and the
        // admissible exponent approaches (1 - 6C)/2 = 1/4.
        let c = 1.0 / 12.0;
        let schedule: Vec<(f64, f64)> = (4..=9)
            .map(|e| {
                let n = 10f64.powi(e);
                let m = (1..=6).map(|i| n.powf(c * i as f64)).sum::<f64>() / 6.0;
                (n, m)
            })
            .collect();
        let report = regime_classify(&schedule).unwrap();
        assert_eq!(report.regime, Regime::Accurate);
        assert!(
            (report.admissible_rate_exponent - 0.25).abs() < 0.05,
            "{}",
            report.admissible_rate_exponent
        );
    }

    #[test]
    fn regime_constant_ratio_is_critical_and_growth_is_undersampled() {
        let critical: Vec<(f64, f64)> = (1..=5).map(|i| {
            let n = 10f64.powi(i);
            (n, 2.0 * n)
        })
        .collect();
        let report = regime_classify(&critical).unwrap();
        assert_eq!(report.regime, Regime::Critical);
        assert!(report.admissible_rate_exponent < 1e-12);

        let under: Vec<(f64, f64)> = (1..=5).map(|i| {
            let n = 10f64.powi(i);
            (n, n * n)
        })
        .collect();
        assert_eq!(regime_classify(&under).unwrap().regime, Regime::Undersampled);

        assert!(regime_classify(&critical[..2]).is_err());
        let bad = vec![(10.0, 1.0), (10.0, 2.0), (100.0, 3.0)];
        assert!(regime_classify(&bad).is_err());
    }

    #[test]
    fn regime_report_serializes() {
        let schedule = vec![(10.0, 1.0), (100.0, 1.5), (1000.0, 2.0)];
        let report = regime_classify(&schedule).unwrap();
        let json = serde_json::to_value(&report).unwrap();
        assert_eq!(json["regime"], "accurate");
        assert!(json["evidence"].as_array().unwrap().len() == 3);
    }
}
