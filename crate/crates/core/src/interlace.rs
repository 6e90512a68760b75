//! Turning-point scalings of zero sets, the complex interlacing check, and
//! the band/shift metrics that quantify how scaled zeros collapse onto the
//! arch.

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::fits::{fit_power_law, fit_power_law_window, FitError, PowerLawFit};

#[derive(Debug, Error)]
pub enum InterlaceError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error(transparent)]
    Fit(#[from] FitError),
}

/// Affine maps that pin the turning points of the three studied problems.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScalingMap {
    /// `z = (x E^(-1/N) + i) N / pi`: sends the monomial turning points to
    /// `+-1` up to `O(1/N)`.
    LargeN { n: u32, e: f64 },
    /// `z = x / r` with `r` the turning-point magnitude.
    TurningMagnitude { r: f64 },
    /// `z = x E^(-1/3)`, the cubic special case of the magnitude scaling.
    CubicScale { e: f64 },
    /// Leave zeros in the x-plane.
    Identity,
}

impl ScalingMap {
    pub fn apply(&self, x: Complex64) -> Complex64 {
        match *self {
            ScalingMap::LargeN { n, e } => {
                let n = f64::from(n);
                (x * e.powf(-1.0 / n) + Complex64::i()) * n / std::f64::consts::PI
            }
            ScalingMap::TurningMagnitude { r } => x / r,
            ScalingMap::CubicScale { e } => x * e.powf(-1.0 / 3.0),
            ScalingMap::Identity => x,
        }
    }

    pub fn validate(&self) -> Result<(), InterlaceError> {
        let ok = match *self {
            ScalingMap::LargeN { n, e } => n >= 2 && e > 0.0,
            ScalingMap::TurningMagnitude { r } => r > 0.0,
            ScalingMap::CubicScale { e } => e > 0.0,
            ScalingMap::Identity => true,
        };
        ok.then_some(())
            .ok_or_else(|| InterlaceError::InvalidInput(format!("bad scaling {self:?}")))
    }
}

/// Elementwise scaling; input order is preserved.
pub fn apply_scaling(map: &ScalingMap, zeros: &[Complex64]) -> Vec<Complex64> {
    zeros.iter().map(|&z| map.apply(z)).collect()
}

/// Verdict for one consecutive pair of zero sets.
#[derive(Debug, Clone, Serialize)]
pub struct InterlaceReport {
    /// Indices `(k, k+1)` of the two eigenfunctions.
    pub pair: (u32, u32),
    /// Zeros of set `k` strictly between consecutive zeros of set `k+1`,
    /// ordered by real part.
    pub gap_counts: Vec<usize>,
    /// Every interior gap holds exactly one zero.
    pub pass: bool,
    /// `mean Im(zeros_k) - mean Im(zeros_{k+1})`.
    pub shift: f64,
    /// Zeros of set `k` outside the outermost zeros of set `k+1`
    /// (left, right); reported but not failing.
    pub outside: (usize, usize),
    /// Cardinalities did not satisfy `|zeros_{k+1}| = |zeros_k| + 1`.
    pub count_mismatch: bool,
}

/// Checks the complex interlacing property along the real-part ordering.
///
/// Ordering by `Re(z)` (ties by `Im`) is the arch parametrization for all
/// three studied problems. Only interior gaps count toward the verdict;
/// strays outside the outermost pair are tallied separately.
pub fn check_interlacing(
    pair: (u32, u32),
    zeros_k: &[Complex64],
    zeros_k1: &[Complex64],
) -> InterlaceReport {
    let mut a: Vec<Complex64> = zeros_k.to_vec();
    let mut b: Vec<Complex64> = zeros_k1.to_vec();
    let by_re = |p: &Complex64, q: &Complex64| {
        (p.re, p.im)
            .partial_cmp(&(q.re, q.im))
            .unwrap()
    };
    a.sort_by(by_re);
    b.sort_by(by_re);
    let count_mismatch = b.len() != a.len() + 1;

    let mut gap_counts = Vec::new();
    for w in b.windows(2) {
        let (lo, hi) = (w[0].re, w[1].re);
        gap_counts.push(a.iter().filter(|z| z.re > lo && z.re < hi).count());
    }
    let outside = if b.is_empty() {
        (0, a.len())
    } else {
        (
            a.iter().filter(|z| z.re <= b[0].re).count(),
            a.iter().filter(|z| z.re >= b[b.len() - 1].re).count(),
        )
    };
    let mean_im = |s: &[Complex64]| {
        if s.is_empty() {
            0.0
        } else {
            s.iter().map(|z| z.im).sum::<f64>() / s.len() as f64
        }
    };
    let pass = !gap_counts.is_empty() && gap_counts.iter().all(|&g| g == 1);
    InterlaceReport {
        pair,
        gap_counts,
        pass,
        shift: mean_im(&a) - mean_im(&b),
        outside,
        count_mismatch,
    }
}

/// Mean imaginary part per zero set, with the monotone-descent verdict used
/// for unscaled sequences.
#[derive(Debug, Clone, Serialize)]
pub struct ShiftMetric {
    pub mean_im: Vec<f64>,
    pub strictly_decreasing: bool,
}

pub fn shift_metric(zero_sets: &[Vec<Complex64>]) -> Result<ShiftMetric, InterlaceError> {
    if zero_sets.len() < 2 {
        return Err(InterlaceError::InvalidInput(
            "shift metric needs at least two zero sets".into(),
        ));
    }
    let mean_im: Vec<f64> = zero_sets
        .iter()
        .map(|s| {
            if s.is_empty() {
                f64::NAN
            } else {
                s.iter().map(|z| z.im).sum::<f64>() / s.len() as f64
            }
        })
        .collect();
    let strictly_decreasing = mean_im
        .windows(2)
        .all(|w| w[0].is_finite() && w[1].is_finite() && w[1] < w[0]);
    Ok(ShiftMetric {
        mean_im,
        strictly_decreasing,
    })
}

/// Quadratic arch fit `Im(z) = alpha + beta Re(z) + gamma Re(z)^2` over a
/// pooled zero cloud, with vertical-deviation statistics.
#[derive(Debug, Clone, Serialize)]
pub struct BandMetric {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub rms_deviation: f64,
    pub max_deviation: f64,
    /// Spread `max - min` of the signed vertical deviations.
    pub band_width: f64,
}

pub fn band_metric(pooled: &[Complex64]) -> Result<BandMetric, InterlaceError> {
    if pooled.len() < 10 {
        return Err(InterlaceError::InvalidInput(format!(
            "band metric needs >= 10 zeros, got {}",
            pooled.len()
        )));
    }
    let (alpha, beta, gamma) = quadratic_fit(pooled)?;
    let mut ss = 0.0;
    let mut max_dev = 0.0f64;
    let mut dev_min = f64::INFINITY;
    let mut dev_max = f64::NEG_INFINITY;
    for z in pooled {
        let d = z.im - (alpha + beta * z.re + gamma * z.re * z.re);
        ss += d * d;
        max_dev = max_dev.max(d.abs());
        dev_min = dev_min.min(d);
        dev_max = dev_max.max(d);
    }
    Ok(BandMetric {
        alpha,
        beta,
        gamma,
        rms_deviation: (ss / pooled.len() as f64).sqrt(),
        max_deviation: max_dev,
        band_width: dev_max - dev_min,
    })
}

/// Least-squares quadratic through `(Re, Im)` pairs; also used for the
/// arch-intercept measurement, which tolerates tiny sets.
pub fn quadratic_fit(points: &[Complex64]) -> Result<(f64, f64, f64), InterlaceError> {
    // Degenerate-in-Re inputs (all Re equal) cannot pin the curvature.
    let distinct_re = {
        let mut res: Vec<f64> = points.iter().map(|z| z.re).collect();
        res.sort_by(|a, b| a.partial_cmp(b).unwrap());
        res.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
        res.len()
    };
    if points.len() < 3 || distinct_re < 3 {
        return Err(InterlaceError::InvalidInput(
            "quadratic fit needs >= 3 points with >= 3 distinct Re".into(),
        ));
    }
    // Normal equations for [1, x, x^2], centered for conditioning.
    let n = points.len() as f64;
    let mx = points.iter().map(|z| z.re).sum::<f64>() / n;
    let mut s = [0.0f64; 5];
    let mut t = [0.0f64; 3];
    for z in points {
        let x = z.re - mx;
        let mut xp = 1.0;
        for (i, si) in s.iter_mut().enumerate() {
            *si += xp;
            if i < 3 {
                t[i] += xp * z.im;
            }
            xp *= x;
        }
    }
    let m = nalgebra::Matrix3::new(
        s[0], s[1], s[2], //
        s[1], s[2], s[3], //
        s[2], s[3], s[4],
    );
    let rhs = nalgebra::Vector3::new(t[0], t[1], t[2]);
    let sol = m
        .lu()
        .solve(&rhs)
        .ok_or_else(|| InterlaceError::InvalidInput("degenerate quadratic fit".into()))?;
    // Undo the centering: im = c0 + c1 (x - mx) + c2 (x - mx)^2.
    let (c0, c1, c2) = (sol[0], sol[1], sol[2]);
    Ok((c0 - c1 * mx + c2 * mx * mx, c1 - 2.0 * c2 * mx, c2))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum DivergenceVerdict {
    /// Gap exponent above -1 and growing cumulative sums: the unscaled zero
    /// curves drift apart without bound.
    DivergentTrend,
    Convergent,
}

/// Divergence diagnostics for the gaps between consecutive zero curves.
#[derive(Debug, Clone, Serialize)]
pub struct DivergenceReport {
    pub gap_fit: PowerLawFit,
    /// Exponent of the cumulative sums. Measured on doubling differences
    /// `cum(2m) - cum(m)` when the sequence is long enough (the additive
    /// constant of the cumulative sum cancels there), otherwise on the tail
    /// of the cumulative sums directly.
    pub cumulative_exponent: f64,
    pub cumulative_fit: PowerLawFit,
    pub verdict: DivergenceVerdict,
}

pub fn divergence_check(gaps: &[f64]) -> Result<DivergenceReport, InterlaceError> {
    if gaps.iter().any(|&g| !(g > 0.0)) {
        return Err(InterlaceError::InvalidInput(
            "gaps must be positive".into(),
        ));
    }
    let pts: Vec<(f64, f64)> = gaps
        .iter()
        .enumerate()
        .map(|(i, &g)| ((i + 1) as f64, g))
        .collect();
    let gap_fit = fit_power_law(&pts)?;

    let mut cum = Vec::with_capacity(gaps.len());
    let mut acc = 0.0;
    for &g in gaps {
        acc += g;
        cum.push(acc);
    }
    let n = cum.len();
    let cumulative_fit = if n >= 20 {
        let doubling: Vec<(f64, f64)> = (1..=n / 2)
            .map(|m| (m as f64, cum[2 * m - 1] - cum[m - 1]))
            .collect();
        fit_power_law_window(&doubling, doubling.len() / 4..doubling.len())?
    } else {
        let cum_pts: Vec<(f64, f64)> = cum
            .iter()
            .enumerate()
            .map(|(i, &c)| ((i + 1) as f64, c))
            .collect();
        fit_power_law(&cum_pts)?
    };
    let verdict = if gap_fit.exponent > -1.0 && cumulative_fit.exponent > 0.0 {
        DivergenceVerdict::DivergentTrend
    } else {
        DivergenceVerdict::Convergent
    };
    Ok(DivergenceReport {
        gap_fit,
        cumulative_exponent: cumulative_fit.exponent,
        cumulative_fit,
        verdict,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn large_n_scaling_of_harmonic_turning_point() {
        // x_plus = 1 at N = 2, E = 1 maps to 2(1 + i)/pi.
        let map = ScalingMap::LargeN { n: 2, e: 1.0 };
        let z = map.apply(c(1.0, 0.0));
        let expect = 2.0 / std::f64::consts::PI;
        assert_relative_eq!(z.re, expect, epsilon = 1e-12);
        assert_relative_eq!(z.im, expect, epsilon = 1e-12);
    }

    #[test]
    fn large_n_limit_pins_turning_points_at_unity() {
        for n in [16u32, 64, 256] {
            let e = 3.7;
            let pot = crate::potentials::Potential::monomial(n).unwrap();
            let tp = pot.turning_points(e).unwrap();
            let map = ScalingMap::LargeN { n, e };
            let z_plus = map.apply(tp.plus);
            let z_minus = map.apply(tp.minus);
            let bound = 1.2 * std::f64::consts::PI / (2.0 * f64::from(n));
            assert!((z_plus - c(1.0, 0.0)).norm() <= bound, "N={n}: {z_plus}");
            assert!((z_minus - c(-1.0, 0.0)).norm() <= bound, "N={n}: {z_minus}");
        }
    }

    #[test]
    fn cubic_scale_equals_turning_magnitude() {
        let e = 5.5f64;
        let cubic = ScalingMap::CubicScale { e };
        let mag = ScalingMap::TurningMagnitude { r: e.powf(1.0 / 3.0) };
        for z in [c(0.3, -0.8), c(-1.7, 0.2)] {
            assert!((cubic.apply(z) - mag.apply(z)).norm() < 1e-15);
        }
        // And it puts the turning points on the unit circle exactly.
        let pot = crate::potentials::Potential::monomial(3).unwrap();
        let tp = pot.turning_points(e).unwrap();
        assert_relative_eq!(cubic.apply(tp.plus).norm(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn interlacing_simple_pass_and_fail() {
        let pass = check_interlacing(
            (1, 2),
            &[c(-0.5, 0.0), c(0.5, 0.0)],
            &[c(-0.8, 0.0), c(0.0, 0.0), c(0.8, 0.0)],
        );
        assert_eq!(pass.gap_counts, vec![1, 1]);
        assert!(pass.pass);
        assert!(!pass.count_mismatch);

        let fail = check_interlacing(
            (1, 2),
            &[c(-0.5, 0.0), c(-0.4, 0.0)],
            &[c(-0.8, 0.0), c(0.0, 0.0), c(0.8, 0.0)],
        );
        assert_eq!(fail.gap_counts, vec![2, 0]);
        assert!(!fail.pass);
    }

    #[test]
    fn outside_zeros_reported_not_failing() {
        let rep = check_interlacing(
            (3, 4),
            &[c(-2.0, 0.0), c(-0.1, 0.0), c(0.4, 0.0), c(2.0, 0.0)],
            &[c(-0.8, 0.0), c(0.0, 0.0), c(0.8, 0.0)],
        );
        assert_eq!(rep.outside, (1, 1));
        assert!(rep.count_mismatch);
        assert_eq!(rep.gap_counts, vec![1, 1]);
        assert!(rep.pass);
    }

    #[test]
    fn interlace_verdict_is_scaling_invariant() {
        let zeros_k = vec![c(-0.9, -0.9), c(0.03, -1.3), c(0.9, -0.9)];
        let zeros_k1 = vec![c(-1.2, -0.8), c(-0.4, -1.2), c(0.4, -1.2), c(1.2, -0.8)];
        let base = check_interlacing((3, 4), &zeros_k, &zeros_k1);
        for map in [
            ScalingMap::LargeN { n: 20, e: 2.4 },
            ScalingMap::TurningMagnitude { r: 3.1 },
            ScalingMap::CubicScale { e: 8.9 },
        ] {
            let rep = check_interlacing(
                (3, 4),
                &apply_scaling(&map, &zeros_k),
                &apply_scaling(&map, &zeros_k1),
            );
            assert_eq!(rep.pass, base.pass, "verdict changed under {map:?}");
            assert_eq!(rep.gap_counts, base.gap_counts);
        }
    }

    #[test]
    fn shift_metric_detects_descent() {
        let sets = vec![
            vec![c(0.0, -1.0)],
            vec![c(-0.5, -1.4), c(0.5, -1.4)],
            vec![c(-0.8, -1.7), c(0.0, -2.0), c(0.8, -1.7)],
        ];
        let m = shift_metric(&sets).unwrap();
        assert!(m.strictly_decreasing);
        assert_relative_eq!(m.mean_im[0], -1.0);
        // Two identical sets: shift between them is zero, not decreasing.
        let same = shift_metric(&vec![sets[1].clone(), sets[1].clone()]).unwrap();
        assert!(!same.strictly_decreasing);
        assert_relative_eq!(same.mean_im[0], same.mean_im[1]);
    }

    #[test]
    fn band_metric_exact_parabola_has_zero_width() {
        let pts: Vec<Complex64> = (0..20)
            .map(|i| {
                let x = -1.0 + 0.1 * i as f64;
                c(x, -1.0 + x * x)
            })
            .collect();
        let m = band_metric(&pts).unwrap();
        assert!(m.rms_deviation < 1e-12);
        assert!(m.band_width < 1e-11);
        assert_relative_eq!(m.alpha, -1.0, epsilon = 1e-10);
        assert_relative_eq!(m.gamma, 1.0, epsilon = 1e-10);
    }

    #[test]
    fn band_metric_rejects_degenerate_input() {
        let col: Vec<Complex64> = (0..12).map(|i| c(0.5, i as f64 * 0.1)).collect();
        assert!(band_metric(&col).is_err());
    }

    #[test]
    fn divergence_of_inverse_power_gaps() {
        // Gaps k^(-3/5): cumulative grows like (5/2) k^(2/5).
        let gaps: Vec<f64> = (1..=200).map(|k| (k as f64).powf(-0.6)).collect();
        let rep = divergence_check(&gaps).unwrap();
        assert_relative_eq!(rep.gap_fit.exponent, -0.6, epsilon = 1e-10);
        assert!(
            (rep.cumulative_exponent - 0.4).abs() <= 0.01,
            "cumulative exponent {}",
            rep.cumulative_exponent
        );
        assert_eq!(rep.verdict, DivergenceVerdict::DivergentTrend);
    }

    #[test]
    fn convergent_gaps_flagged() {
        let gaps: Vec<f64> = (1..=100).map(|k| (k as f64).powf(-2.0)).collect();
        let rep = divergence_check(&gaps).unwrap();
        assert_eq!(rep.verdict, DivergenceVerdict::Convergent);
    }
}
