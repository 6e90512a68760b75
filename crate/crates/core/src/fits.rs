//! Power-law fits in log space and Richardson sequence acceleration.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum FitError {
    #[error("fit needs at least {need} points, got {got}")]
    TooShort { need: usize, got: usize },
    #[error("degenerate fit: {0}")]
    DegenerateFit(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

/// Result of fitting `y = C k^p` by least squares on `(ln k, ln y)`.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct PowerLawFit {
    pub amplitude: f64,
    pub exponent: f64,
    /// RMS residual in log space.
    pub rms_residual: f64,
    /// Index range of the input slice that was fitted.
    pub window: (usize, usize),
}

/// Fits `y = C k^p` over all supplied points. Requires `k >= 1`, `y > 0`,
/// and at least 5 points.
pub fn fit_power_law(points: &[(f64, f64)]) -> Result<PowerLawFit, FitError> {
    fit_power_law_window(points, 0..points.len())
}

/// Fits over `points[window]` only; the window is recorded in the result.
pub fn fit_power_law_window(
    points: &[(f64, f64)],
    window: std::ops::Range<usize>,
) -> Result<PowerLawFit, FitError> {
    let slice = points
        .get(window.clone())
        .ok_or_else(|| FitError::InvalidInput("window out of range".into()))?;
    if slice.len() < 5 {
        return Err(FitError::TooShort {
            need: 5,
            got: slice.len(),
        });
    }
    for &(k, y) in slice {
        if !(k >= 1.0) || !(y > 0.0) {
            return Err(FitError::InvalidInput(format!(
                "power-law fit needs k >= 1 and y > 0, got ({k}, {y})"
            )));
        }
    }
    let logs: Vec<(f64, f64)> = slice.iter().map(|&(k, y)| (k.ln(), y.ln())).collect();
    let n = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(FitError::DegenerateFit("all k equal".into()));
    }
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss: f64 = logs
        .iter()
        .map(|p| (p.1 - intercept - slope * p.0).powi(2))
        .sum();
    Ok(PowerLawFit {
        amplitude: intercept.exp(),
        exponent: slope,
        rms_residual: (ss / n).sqrt(),
        window: (window.start, window.end),
    })
}

/// Richardson acceleration table for sequences with a `1/k` error model.
#[derive(Debug, Clone, serde::Serialize)]
pub struct RichardsonResult {
    /// `table[0]` is the input; each deeper level is one entry shorter.
    pub table: Vec<Vec<f64>>,
    /// Deepest stable entry.
    pub value: f64,
    /// Change of the leading entry across the level the value was taken from.
    pub stability: f64,
    /// Set when the leading-entry changes grew between the last two levels.
    pub unstable: bool,
}

/// Accelerates `a_k ~ L + c1/k + c2/k^2 + ...` sampled at `k = 1..=n`:
/// `R[j][i] = (k_{i+j} R[j-1][i+1] - k_i R[j-1][i]) / (k_{i+j} - k_i)`.
pub fn richardson_extrapolate(seq: &[f64]) -> Result<RichardsonResult, FitError> {
    let n = seq.len();
    if n < 3 {
        return Err(FitError::TooShort { need: 3, got: n });
    }
    let k = |i: usize| (i + 1) as f64;
    let mut table = vec![seq.to_vec()];
    for j in 1..n {
        let prev = &table[j - 1];
        let mut level = Vec::with_capacity(n - j);
        for i in 0..n - j {
            let (ki, kij) = (k(i), k(i + j));
            level.push((kij * prev[i + 1] - ki * prev[i]) / (kij - ki));
        }
        table.push(level);
    }

    // Leading-entry change per level; the deepest level whose change still
    // shrinks supplies the extrapolated value.
    let diffs: Vec<f64> = (1..n)
        .map(|j| (table[j][0] - table[j - 1][0]).abs())
        .collect();
    let last = diffs.len() - 1;
    let unstable = diffs.len() >= 2 && diffs[last] > diffs[last - 1];
    let (value, stability) = if unstable {
        (table[n - 2][0], diffs[last - 1])
    } else {
        (table[n - 1][0], diffs[last])
    };
    Ok(RichardsonResult {
        table,
        value,
        stability,
        unstable,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn exact_power_law_recovered_exactly() {
        let pts: Vec<(f64, f64)> = (1..=30)
            .map(|k| (k as f64, 5.0 * (k as f64).powf(1.2)))
            .collect();
        let fit = fit_power_law(&pts).unwrap();
        assert_relative_eq!(fit.amplitude, 5.0, epsilon = 1e-12);
        assert_relative_eq!(fit.exponent, 1.2, epsilon = 1e-12);
        assert!(fit.rms_residual < 1e-13);
    }

    #[test]
    fn constant_data_has_zero_exponent() {
        let pts: Vec<(f64, f64)> = (1..=10).map(|k| (k as f64, 3.0)).collect();
        let fit = fit_power_law(&pts).unwrap();
        assert_relative_eq!(fit.exponent, 0.0, epsilon = 1e-14);
        assert_relative_eq!(fit.amplitude, 3.0, epsilon = 1e-12);
    }

    #[test]
    fn perturbed_decay_exponent_within_band() {
        // y = k^-0.6 (1 + 0.1/k) over k = 20..=60.
        let pts: Vec<(f64, f64)> = (20..=60)
            .map(|k| {
                let k = k as f64;
                (k, k.powf(-0.6) * (1.0 + 0.1 / k))
            })
            .collect();
        let fit = fit_power_law(&pts).unwrap();
        assert!(
            (fit.exponent + 0.6).abs() < 0.005,
            "exponent {}",
            fit.exponent
        );
    }

    #[test]
    fn degenerate_inputs_rejected() {
        let same_k: Vec<(f64, f64)> = (0..6).map(|i| (2.0, 1.0 + i as f64)).collect();
        assert!(matches!(
            fit_power_law(&same_k),
            Err(FitError::DegenerateFit(_))
        ));
        let few: Vec<(f64, f64)> = (1..=3).map(|k| (k as f64, k as f64)).collect();
        assert!(matches!(fit_power_law(&few), Err(FitError::TooShort { .. })));
        assert!(
            fit_power_law(&[(1.0, 1.0), (2.0, -1.0), (3.0, 1.0), (4.0, 1.0), (5.0, 1.0)]).is_err()
        );
    }

    #[test]
    fn richardson_removes_inverse_k_error() {
        let seq: Vec<f64> = (1..=8).map(|k| 1.0 + 1.0 / k as f64).collect();
        let r = richardson_extrapolate(&seq).unwrap();
        assert!(!r.unstable);
        assert_relative_eq!(r.value, 1.0, epsilon = 1e-10);
    }

    #[test]
    fn richardson_fixes_constants() {
        let r = richardson_extrapolate(&[2.0; 6]).unwrap();
        assert_eq!(r.value, 2.0);
        assert!(!r.unstable);
    }

    #[test]
    fn richardson_recovers_decay_exponent_from_log_ratios() {
        // The exponent pipeline used on measured zero gaps: from
        // s_k = k^(-3/5) (1 + 1/k) form a_k = ln(s_k/s_{k+1}) / ln(k/(k+1)).
        // The ratio converges to -3/5 (the fitted-power-law sign convention).
        let s = |k: f64| k.powf(-0.6) * (1.0 + 1.0 / k);
        let seq: Vec<f64> = (1..=10)
            .map(|k| {
                let k = k as f64;
                (s(k) / s(k + 1.0)).ln() / (k / (k + 1.0)).ln()
            })
            .collect();
        let r = richardson_extrapolate(&seq).unwrap();
        assert!(
            (r.value + 0.6).abs() <= 1e-3,
            "extrapolated {} (stability {})",
            r.value,
            r.stability
        );
    }
}
