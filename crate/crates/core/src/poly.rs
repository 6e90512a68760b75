//! Complex polynomial roots via balanced companion-matrix eigenvalues.

use nalgebra::DMatrix;
use num_complex::Complex64;

/// Evaluates `p(x)` for coefficients in ascending powers (Horner).
pub fn eval(coeffs: &[Complex64], x: Complex64) -> Complex64 {
    coeffs
        .iter()
        .rev()
        .fold(Complex64::ZERO, |acc, &c| acc * x + c)
}

/// Evaluates `p(x)` and `p'(x)` in one pass.
pub fn eval_with_derivative(coeffs: &[Complex64], x: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::ZERO;
    let mut dp = Complex64::ZERO;
    for &c in coeffs.iter().rev() {
        dp = dp * x + p;
        p = p * x + c;
    }
    (p, dp)
}

/// All roots of the polynomial with the given ascending coefficients.
///
/// Only exactly-zero leading coefficients are trimmed: a tiny but genuine
/// leading coefficient encodes far-out roots that must not be discarded
/// (the balanced companion matrix recovers them fine). Zero roots from a
/// vanishing constant term are split off exactly. Panics if the polynomial
/// is constant.
pub fn roots(coeffs: &[Complex64]) -> Vec<Complex64> {
    let max_mag = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    assert!(max_mag > 0.0, "zero polynomial has no well-defined roots");
    let mut hi = coeffs.len();
    while hi > 1 && coeffs[hi - 1].norm() == 0.0 {
        hi -= 1;
    }
    let mut lo = 0;
    while lo + 1 < hi && coeffs[lo].norm() == 0.0 {
        lo += 1;
    }
    let degree = hi - 1 - lo;
    let mut out = vec![Complex64::ZERO; lo];
    if degree == 0 {
        assert!(!out.is_empty(), "constant polynomial has no roots");
        return out;
    }
    if degree == 1 {
        out.push(-coeffs[lo] / coeffs[lo + 1]);
        return out;
    }

    // Monic companion matrix for coeffs[lo..hi].
    let lead = coeffs[hi - 1];
    let n = degree;
    let mut m = DMatrix::<Complex64>::zeros(n, n);
    for i in 1..n {
        m[(i, i - 1)] = Complex64::ONE;
    }
    for i in 0..n {
        m[(i, n - 1)] = -coeffs[lo + i] / lead;
    }
    balance(&mut m);
    let eig = m
        .eigenvalues()
        .expect("companion-matrix eigenvalue iteration failed");
    out.extend(eig.iter().copied());
    out
}

/// One or more Newton steps `x <- x - p(x)/p'(x)`; stops early if the
/// derivative collapses.
pub fn newton_polish(coeffs: &[Complex64], mut x: Complex64, steps: usize) -> Complex64 {
    for _ in 0..steps {
        let (p, dp) = eval_with_derivative(coeffs, x);
        if dp.norm() < 1e-300 {
            break;
        }
        let dx = p / dp;
        x -= dx;
        if dx.norm() <= 1e-16 * (1.0 + x.norm()) {
            break;
        }
    }
    x
}

/// Parlett-Reinsch balancing: diagonal similarity scaling by powers of two
/// until row and column norms roughly agree.
fn balance(m: &mut DMatrix<Complex64>) {
    let n = m.nrows();
    let radix: f64 = 2.0;
    for _ in 0..32 {
        let mut converged = true;
        for i in 0..n {
            let mut c: f64 = 0.0;
            let mut r: f64 = 0.0;
            for k in 0..n {
                if k != i {
                    c += m[(k, i)].norm();
                    r += m[(i, k)].norm();
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let mut f = 1.0;
            let mut cc = c;
            let s = c + r;
            while cc < r / radix {
                f *= radix;
                cc *= radix * radix;
            }
            while cc > r * radix {
                f /= radix;
                cc /= radix * radix;
            }
            if (c * f + r / f) < 0.95 * s {
                converged = false;
                for k in 0..n {
                    let v = m[(i, k)] / f;
                    m[(i, k)] = v;
                }
                for k in 0..n {
                    let v = m[(k, i)] * f;
                    m[(k, i)] = v;
                }
            }
        }
        if converged {
            break;
        }
    }
}
