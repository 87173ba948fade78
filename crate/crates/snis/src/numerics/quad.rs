//! Adaptive Gauss-Kronrod quadrature (G7/K15) on finite intervals.
//!
//! The interval is split greedily at the segment with the largest K15-G7
//! error estimate until the summed error meets the relative tolerance.

use crate::error::{Error, Result};

// K15 abscissae on [0, 1] side of [-1, 1]; even indices are the G7 nodes.
const XK: [f64; 8] = [
    0.000_000_000_000_000,
    0.207_784_955_007_898_5,
    0.405_845_151_377_397_2,
    0.586_087_235_467_691_1,
    0.741_531_185_599_394_4,
    0.864_864_423_359_769_1,
    0.949_107_912_342_758_5,
    0.991_455_371_120_812_6,
];
const WK: [f64; 8] = [
    0.209_482_141_084_727_8,
    0.204_432_940_075_298_9,
    0.190_350_578_064_785_4,
    0.169_004_726_639_267_9,
    0.140_653_259_715_525_2,
    0.104_790_010_322_250_2,
    0.063_092_092_629_978_56,
    0.022_935_322_010_529_22,
];
const WG: [f64; 4] = [
    0.417_959_183_673_469_4,
    0.381_830_050_505_118_9,
    0.279_705_391_489_276_7,
    0.129_484_966_168_869_7,
];

const MAX_SEGMENTS: usize = 2048;

#[derive(Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    integral: f64,
    error: f64,
}

fn kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Segment {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let fc = f(mid);
    let mut ik = WK[0] * fc;
    let mut ig = WG[0] * fc;
    for j in 1..8 {
        let dx = half * XK[j];
        let fsum = f(mid - dx) + f(mid + dx);
        ik += WK[j] * fsum;
        if j % 2 == 0 {
            ig += WG[j / 2] * fsum;
        }
    }
    let integral = ik * half;
    let coarse = ig * half;
    Segment { a, b, integral, error: (integral - coarse).abs() }
}

/// Integrate `f` over `[a, b]` to relative tolerance `rel_tol`.
pub fn quad<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, rel_tol: f64) -> Result<f64> {
    quad_points(f, &[a, b], rel_tol)
}

/// Integrate over `[pts[0], pts.last()]`, seeding the subdivision at the
/// interior points (used to pin sharp peaks before adaptation starts).
pub fn quad_points<F: Fn(f64) -> f64>(f: F, pts: &[f64], rel_tol: f64) -> Result<f64> {
    if pts.len() < 2 || pts.windows(2).any(|w| !(w[0] < w[1])) || pts.iter().any(|p| !p.is_finite()) {
        return Err(Error::invalid("pts", "need finite, strictly increasing break points"));
    }
    let mut segs: Vec<Segment> =
        pts.windows(2).map(|w| kronrod(&f, w[0], w[1])).collect();
    loop {
        let total: f64 = segs.iter().map(|s| s.integral).sum();
        let err: f64 = segs.iter().map(|s| s.error).sum();
        if err <= rel_tol * total.abs().max(f64::MIN_POSITIVE) || err == 0.0 {
            return Ok(total);
        }
        if segs.len() >= MAX_SEGMENTS {
            return Err(Error::QuadratureFailure {
                rel_tol,
                reached: err / total.abs().max(f64::MIN_POSITIVE),
            });
        }
        let (worst, _) = segs
            .iter()
            .enumerate()
            .max_by(|(_, s), (_, t)| s.error.total_cmp(&t.error))
            .expect("segs is nonempty");
        let s = segs.swap_remove(worst);
        let mid = 0.5 * (s.a + s.b);
        if !(s.a < mid && mid < s.b) {
            // Interval is at floating-point resolution; keep its estimate.
            segs.push(s);
            let total: f64 = segs.iter().map(|t| t.integral).sum();
            return Ok(total);
        }
        segs.push(kronrod(&f, s.a, mid));
        segs.push(kronrod(&f, mid, s.b));
    }
}

/// Break points [lo, lo + span*1e-12, lo + span*1e-11, ..., hi] so that the
/// adaptive pass starts with resolution at the lo end, where the tilted
/// integrands of this crate concentrate.
pub(crate) fn geometric_seeds(lo: f64, hi: f64) -> Vec<f64> {
    if !(hi > lo) {
        return vec![lo, hi];
    }
    let span = hi - lo;
    let mut pts = vec![lo];
    let mut step = span * 1e-12;
    while step < span {
        let p = lo + step;
        if p > *pts.last().expect("nonempty") && p < hi {
            pts.push(p);
        }
        step *= 10.0;
    }
    pts.push(hi);
    pts
}
