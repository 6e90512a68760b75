//! Gauss-Legendre quadrature nodes and weights on [-1, 1].

/// Nodes and weights of the `n`-point Gauss-Legendre rule, computed by
/// Newton iteration on the Legendre polynomial from the Chebyshev initial
/// guess. Nodes come out in ascending order.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Tricomi-style initial guess.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        let (_, d) = legendre_with_derivative(n, 0.0);
        nodes[n / 2] = 0.0;
        weights[n / 2] = 2.0 / (d * d);
    }
    (nodes, weights)
}

/// Legendre polynomial `P_n(x)` and its derivative by the three-term
/// recurrence.
fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn five_point_rule_matches_reference() {
        let (x, w) = gauss_legendre(5);
        assert_relative_eq!(x[0], -0.9061798459386640, epsilon = 1e-14);
        assert_relative_eq!(x[1], -0.5384693101056831, epsilon = 1e-14);
        assert_relative_eq!(x[2], 0.0, epsilon = 1e-15);
        assert_relative_eq!(w[0], 0.2369268850561891, epsilon = 1e-14);
        assert_relative_eq!(w[1], 0.4786286704993665, epsilon = 1e-14);
        assert_relative_eq!(w[2], 0.5688888888888889, epsilon = 1e-14);
    }

    #[test]
    fn integrates_polynomials_exactly() {
        // n-point rule is exact through degree 2n-1.
        for n in [2usize, 8, 33, 64] {
            let (x, w) = gauss_legendre(n);
            assert_relative_eq!(w.iter().sum::<f64>(), 2.0, epsilon = 1e-13);
            let deg = 2 * n - 1;
            let val: f64 = x
                .iter()
                .zip(&w)
                .map(|(&xi, &wi)| wi * xi.powi(deg as i32))
                .sum();
            // Odd power integrates to zero.
            assert!(val.abs() < 1e-12, "n={n}: {val}");
            let deg = 2 * n - 2;
            let val: f64 = x
                .iter()
                .zip(&w)
                .map(|(&xi, &wi)| wi * xi.powi(deg as i32))
                .sum();
            let exact = 2.0 / (deg as f64 + 1.0);
            assert_relative_eq!(val, exact, epsilon = 1e-11);
        }
    }
}
