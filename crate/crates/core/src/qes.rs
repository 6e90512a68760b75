//! Algebraic sector of the quasi-exactly-solvable quartic potential.
//!
//! For `V(x) = -x^4 + 2iax^3 + (a^2-2b)x^2 + 2i(ab-J)x` a `J`-dimensional
//! family of eigenfunctions has the closed form `psi = P(x) exp(phi(x))`
//! with `phi = -ix^3/3 - ax^2/2 - ibx` and `P` a polynomial of degree
//! `J - 1`. Substituting the ansatz turns the Schroedinger equation into a
//! finite recursion for the coefficients of `P`, i.e. an eigenproblem for a
//! small banded complex matrix. Two independent residual oracles (the
//! recursion rows and the full ODE at random points) guard the derivation.

use nalgebra::DMatrix;
use num_complex::Complex64;
use thiserror::Error;

use crate::poly;
use crate::potentials::Potential;

#[derive(Debug, Error)]
pub enum QesError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("eigenvalue iteration failed for the QES matrix (J = {j})")]
    EigenFailure { j: u32 },
}

/// The banded matrix whose spectrum is the QES sector.
#[derive(Debug, Clone)]
pub struct QesMatrix {
    pub j: u32,
    pub entries: DMatrix<Complex64>,
}

/// Builds the recursion matrix: row `m` states
/// `(m+2)(m+1) c_{m+2} - 2ib(m+1) c_{m+1} + (E - a - b^2 - 2am) c_m
///  + 2i(J-m) c_{m-1} = 0`.
pub fn build_qes_matrix(a: f64, b: f64, j: u32) -> Result<QesMatrix, QesError> {
    if j < 1 {
        return Err(QesError::InvalidInput("need J >= 1".into()));
    }
    let n = j as usize;
    let mut m = DMatrix::<Complex64>::zeros(n, n);
    for row in 0..n {
        let mf = row as f64;
        m[(row, row)] = Complex64::new(a + b * b + 2.0 * a * mf, 0.0);
        if row + 1 < n {
            m[(row, row + 1)] = Complex64::new(0.0, 2.0 * b * (mf + 1.0));
        }
        if row + 2 < n {
            m[(row, row + 2)] = Complex64::new(-(mf + 2.0) * (mf + 1.0), 0.0);
        }
        if row >= 1 {
            m[(row, row - 1)] = Complex64::new(0.0, -2.0 * (f64::from(j) - mf));
        }
    }
    Ok(QesMatrix { j, entries: m })
}

/// One member of the algebraic sector.
#[derive(Debug, Clone)]
pub struct QesEigenfunction {
    pub e: f64,
    /// Coefficients `c_0 ... c_{J-1}` of `P`, scaled to unit sup norm with
    /// the largest coefficient rotated to the positive real axis.
    pub coeffs: Vec<Complex64>,
    pub a: f64,
    pub b: f64,
    pub j: u32,
    /// `a^2 + 4b`; the sector is expected to be fully real when this
    /// exceeds the (J-dependent, unspecified) critical value.
    pub k_criterion: f64,
}

impl QesEigenfunction {
    /// `phi(x) = -ix^3/3 - ax^2/2 - ibx`.
    pub fn phi(&self, x: Complex64) -> Complex64 {
        let i = Complex64::i();
        -i * x * x * x / 3.0 - 0.5 * self.a * x * x - i * self.b * x
    }

    /// `psi(x) = P(x) exp(phi(x))`.
    pub fn psi(&self, x: Complex64) -> Complex64 {
        poly::eval(&self.coeffs, x) * self.phi(x).exp()
    }

    /// Relative residual of the full Schroedinger equation at `x`,
    /// independent of the recursion that produced the coefficients. The
    /// common factor `exp(phi)` cancels, so this is well-conditioned
    /// anywhere in the plane.
    pub fn ode_residual(&self, x: Complex64) -> f64 {
        let pot = Potential::QesQuartic {
            a: self.a,
            b: self.b,
            j: self.j,
        };
        let (p, dp) = poly::eval_with_derivative(&self.coeffs, x);
        let ddp = second_derivative(&self.coeffs, x);
        let i = Complex64::i();
        let dphi = -i * x * x - self.a * x - i * self.b;
        let ddphi = -2.0 * i * x - self.a;
        let curvature = ddp + 2.0 * dp * dphi + p * (ddphi + dphi * dphi);
        let potential_term = (pot.eval(x) - self.e) * p;
        let residual = (-curvature + potential_term).norm();
        let scale = ddp.norm()
            + 2.0 * (dp * dphi).norm()
            + (p * (ddphi + dphi * dphi)).norm()
            + potential_term.norm()
            + f64::MIN_POSITIVE;
        residual / scale
    }

    /// Maximum normalized recursion-row residual for these coefficients.
    pub fn recursion_residual(&self) -> f64 {
        max_row_residual(
            self.a,
            self.b,
            self.j,
            Complex64::new(self.e, 0.0),
            &self.coeffs,
        )
    }
}

/// The computed sector, sorted by ascending real energy.
#[derive(Debug, Clone)]
pub struct QesSpectrum {
    pub states: Vec<QesEigenfunction>,
    /// Energies that came out genuinely complex (conjugate pairs), present
    /// when `a^2 + 4b` is below the critical value. Not an error.
    pub complex_energies: Vec<Complex64>,
}

/// Solves the QES sector. `J <= 64` keeps the dense solve trivial.
pub fn qes_spectrum(a: f64, b: f64, j: u32) -> Result<QesSpectrum, QesError> {
    if j > 64 {
        return Err(QesError::InvalidInput(format!(
            "dense QES solve is limited to J <= 64, got {j}"
        )));
    }
    let matrix = build_qes_matrix(a, b, j)?;
    let n = j as usize;
    let eigenvalues: Vec<Complex64> = if n == 1 {
        vec![matrix.entries[(0, 0)]]
    } else {
        matrix
            .entries
            .clone()
            .eigenvalues()
            .ok_or(QesError::EigenFailure { j })?
            .iter()
            .copied()
            .collect()
    };

    let mut states = Vec::new();
    let mut complex_energies = Vec::new();
    for &lambda in &eigenvalues {
        // The dense solve leaves the ill-conditioned upper states with too
        // little accuracy for the recursion; polish on the characteristic
        // residual first.
        let lambda = newton_polish_energy(a, b, j, lambda);
        // Reality threshold scaled to the matrix size.
        if lambda.im.abs() > 1e-8 * (1.0 + lambda.re.abs()) {
            complex_energies.push(lambda);
            continue;
        }
        // Re-polish constrained to the real axis so that dropping the
        // residual imaginary part costs no recursion accuracy.
        let mut e_re = lambda.re;
        for _ in 0..8 {
            let (f, df) = characteristic_row0(a, b, j, Complex64::new(e_re, 0.0));
            if df.norm() == 0.0 {
                break;
            }
            let step = (f / df).re;
            e_re -= step;
            if step.abs() <= 1e-16 * (1.0 + e_re.abs()) {
                break;
            }
        }
        let lambda = Complex64::new(e_re, 0.0);
        let coeffs = eigenvector(a, b, j, lambda);
        states.push(QesEigenfunction {
            e: lambda.re,
            coeffs,
            a,
            b,
            j,
            k_criterion: a * a + 4.0 * b,
        });
    }
    states.sort_by(|p, q| p.e.partial_cmp(&q.e).unwrap());
    complex_energies.sort_by(|p, q| {
        (p.re, p.im)
            .partial_cmp(&(q.re, q.im))
            .unwrap()
    });
    Ok(QesSpectrum {
        states,
        complex_energies,
    })
}

/// Leftover row-0 residual of the back-substituted recursion and its
/// energy derivative. This is (up to scale) the characteristic function of
/// the unreduced Hessenberg matrix: its zeros are exactly the QES energies.
fn characteristic_row0(a: f64, b: f64, j: u32, e: Complex64) -> (Complex64, Complex64) {
    let n = j as usize;
    let i = Complex64::i();
    // c and dc/dE, filled downward from c_{J-1} = 1.
    let mut c = vec![Complex64::ZERO; n + 2];
    let mut dc = vec![Complex64::ZERO; n + 2];
    c[n - 1] = Complex64::ONE;
    for m in (1..n).rev() {
        let mf = m as f64;
        let diag = e - a - b * b - 2.0 * a * mf;
        let num = (mf + 2.0) * (mf + 1.0) * c[m + 2] - 2.0 * i * b * (mf + 1.0) * c[m + 1]
            + diag * c[m];
        let dnum = (mf + 2.0) * (mf + 1.0) * dc[m + 2] - 2.0 * i * b * (mf + 1.0) * dc[m + 1]
            + diag * dc[m]
            + c[m];
        let denom = -2.0 * i * (f64::from(j) - mf);
        c[m - 1] = num / denom;
        dc[m - 1] = dnum / denom;
    }
    let diag0 = e - a - b * b;
    let f = 2.0 * c[2] - 2.0 * i * b * c[1] + diag0 * c[0];
    let df = 2.0 * dc[2] - 2.0 * i * b * dc[1] + diag0 * dc[0] + c[0];
    (f, df)
}

/// Newton polish of one eigenvalue on the characteristic residual.
fn newton_polish_energy(a: f64, b: f64, j: u32, mut e: Complex64) -> Complex64 {
    for _ in 0..50 {
        let (f, df) = characteristic_row0(a, b, j, e);
        if df.norm() == 0.0 {
            break;
        }
        let step = f / df;
        if !step.is_finite() {
            break;
        }
        e -= step;
        if step.norm() <= 1e-15 * (1.0 + e.norm()) {
            break;
        }
    }
    e
}

/// Eigenvector via the recursion, run in whichever direction is stable.
///
/// The matrix is unreduced upper Hessenberg (the subdiagonal entries
/// `-2i(J-m)` never vanish), so the recursion can be anchored at either
/// end. Each direction is exact on every row it substitutes through but
/// dumps its error into the one row it skips; which direction is benign
/// depends on where the eigenvector's large coefficients sit (low `m` for
/// high states, high `m` for low states). Both are built and the one with
/// the smaller worst row residual wins.
fn eigenvector(a: f64, b: f64, j: u32, e: Complex64) -> Vec<Complex64> {
    let down = normalize(eigenvector_downward(a, b, j, e));
    let fwd = normalize(eigenvector_forward(a, b, j, e));
    let rd = max_row_residual(a, b, j, e, &down);
    let rf = max_row_residual(a, b, j, e, &fwd);
    if rd <= rf {
        down
    } else {
        fwd
    }
}

/// Anchors `c_{J-1} = 1` and walks row `m = J-1, ..., 1` downward:
/// `c_{m-1} = -[ (m+2)(m+1) c_{m+2} - 2ib(m+1) c_{m+1}
///              + (E - a - b^2 - 2am) c_m ] / (2i(J-m))`.
/// Row 0 is left over.
fn eigenvector_downward(a: f64, b: f64, j: u32, e: Complex64) -> Vec<Complex64> {
    let n = j as usize;
    let mut c = vec![Complex64::ZERO; n];
    c[n - 1] = Complex64::ONE;
    let i = Complex64::i();
    for m in (1..n).rev() {
        let mf = m as f64;
        let c2 = if m + 2 < n { c[m + 2] } else { Complex64::ZERO };
        let c1 = if m + 1 < n { c[m + 1] } else { Complex64::ZERO };
        let num = (mf + 2.0) * (mf + 1.0) * c2 - 2.0 * i * b * (mf + 1.0) * c1
            + (e - a - b * b - 2.0 * a * mf) * c[m];
        c[m - 1] = -num / (2.0 * i * (f64::from(j) - mf));
    }
    c
}

/// Anchors `c_0 = 1`, treats `c_1` as a shooting parameter (the recursion
/// is affine in it), and fixes it by imposing row `J-2` with `c_J = 0`.
/// Row `J-1` is left over.
fn eigenvector_forward(a: f64, b: f64, j: u32, e: Complex64) -> Vec<Complex64> {
    let n = j as usize;
    if n == 1 {
        return vec![Complex64::ONE];
    }
    let run = |c1: Complex64, c0: Complex64| -> Vec<Complex64> {
        let i = Complex64::i();
        let mut c = vec![Complex64::ZERO; n];
        c[0] = c0;
        c[1] = c1;
        for m in 0..n.saturating_sub(2) {
            let mf = m as f64;
            let prev = if m >= 1 { c[m - 1] } else { Complex64::ZERO };
            c[m + 2] = (2.0 * i * b * (mf + 1.0) * c[m + 1]
                - (e - a - b * b - 2.0 * a * mf) * c[m]
                - 2.0 * i * (f64::from(j) - mf) * prev)
                / ((mf + 2.0) * (mf + 1.0));
        }
        c
    };
    let base = run(Complex64::ZERO, Complex64::ONE);
    let slope = run(Complex64::ONE, Complex64::ZERO);
    if n == 2 {
        // Row 0 fixes c_1 directly: -2ib c_1 + (E - a - b^2) c_0 = 0.
        if b == 0.0 {
            return base;
        }
        let i = Complex64::i();
        let c1 = (e - a - b * b) / (2.0 * i * b);
        return vec![Complex64::ONE, c1];
    }
    let i = Complex64::i();
    let mf = (n - 2) as f64;
    let row_j2 = |c: &[Complex64]| -> Complex64 {
        -2.0 * i * b * (mf + 1.0) * c[n - 1]
            + (e - a - b * b - 2.0 * a * mf) * c[n - 2]
            + 2.0 * i * (f64::from(j) - mf) * c[n - 3]
    };
    let (g0, g1) = (row_j2(&base), row_j2(&slope));
    if g1.norm() == 0.0 {
        return base;
    }
    let c1 = -g0 / g1;
    base.iter().zip(&slope).map(|(p, q)| p + q * c1).collect()
}

/// Unit sup norm with the dominant entry rotated onto the positive real
/// axis; deterministic.
fn normalize(mut c: Vec<Complex64>) -> Vec<Complex64> {
    let dominant = c
        .iter()
        .copied()
        .max_by(|p, q| p.norm().partial_cmp(&q.norm()).unwrap())
        .unwrap();
    for v in &mut c {
        *v /= dominant;
    }
    c
}

/// Worst normalized recursion-row residual of a coefficient vector.
fn max_row_residual(a: f64, b: f64, j: u32, e: Complex64, coeffs: &[Complex64]) -> f64 {
    let get = |idx: i64| -> Complex64 {
        if idx < 0 || idx >= coeffs.len() as i64 {
            Complex64::ZERO
        } else {
            coeffs[idx as usize]
        }
    };
    let i = Complex64::i();
    let mut worst = 0.0f64;
    for m in 0..coeffs.len() as i64 {
        let mf = m as f64;
        let t1 = (mf + 2.0) * (mf + 1.0) * get(m + 2);
        let t2 = -2.0 * i * b * (mf + 1.0) * get(m + 1);
        let t3 = (e - a - b * b - 2.0 * a * mf) * get(m);
        let t4 = 2.0 * i * (f64::from(j) - mf) * get(m - 1);
        let row = t1 + t2 + t3 + t4;
        let scale = t1.norm() + t2.norm() + t3.norm() + t4.norm() + f64::MIN_POSITIVE;
        worst = worst.max(row.norm() / scale.max(1.0));
    }
    worst
}

fn second_derivative(coeffs: &[Complex64], x: Complex64) -> Complex64 {
    let mut acc = Complex64::ZERO;
    for (n, &c) in coeffs.iter().enumerate().skip(2) {
        let nf = n as f64;
        acc = acc + c * nf * (nf - 1.0) * x.powu(n as u32 - 2);
    }
    acc
}

/// Zeros of the polynomial factor with residual bookkeeping.
#[derive(Debug, Clone)]
pub struct PolynomialZeros {
    pub zeros: Vec<Complex64>,
    pub residuals: Vec<f64>,
    /// Indices whose refined residual exceeded the conditioning bound.
    pub ill_conditioned: Vec<usize>,
}

/// All roots of `P` via the balanced companion matrix, each polished by one
/// Newton step. Roots whose residual `|P(r)|` exceeds
/// `1e-9 max|c| max(1, |r|)^(deg)` are flagged, not dropped.
pub fn polynomial_zeros(coeffs: &[Complex64]) -> Result<PolynomialZeros, QesError> {
    let degree = coeffs.len().saturating_sub(1);
    if degree < 1 {
        return Err(QesError::InvalidInput(
            "polynomial must have degree >= 1".into(),
        ));
    }
    let mut zeros = poly::roots(coeffs);
    let max_c = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let mut residuals = Vec::with_capacity(zeros.len());
    let mut ill = Vec::new();
    for (i, z) in zeros.iter_mut().enumerate() {
        *z = poly::newton_polish(coeffs, *z, 1);
        let r = poly::eval(coeffs, *z).norm();
        let bound = 1e-9 * max_c * z.norm().max(1.0).powi(degree as i32);
        if r > bound {
            ill.push(i);
        }
        residuals.push(r);
    }
    // Deterministic order: by real part, then imaginary part.
    let mut order: Vec<usize> = (0..zeros.len()).collect();
    order.sort_by(|&p, &q| {
        (zeros[p].re, zeros[p].im)
            .partial_cmp(&(zeros[q].re, zeros[q].im))
            .unwrap()
    });
    let zeros: Vec<Complex64> = order.iter().map(|&i| zeros[i]).collect();
    let residuals: Vec<f64> = order.iter().map(|&i| residuals[i]).collect();
    let ill_conditioned = ill
        .into_iter()
        .map(|old| order.iter().position(|&i| i == old).unwrap())
        .collect();
    Ok(PolynomialZeros {
        zeros,
        residuals,
        ill_conditioned,
    })
}

/// Zeros split into branch-cut ("irrelevant") and arch ("relevant") sets.
#[derive(Debug, Clone)]
pub struct ZeroClassification {
    pub relevant: Vec<Complex64>,
    /// On the positive imaginary axis, within `axis_tol` of `Re = 0`.
    pub irrelevant: Vec<Complex64>,
}

/// Default axis tolerance relative to the spread of the zero set.
pub fn default_axis_tol(zeros: &[Complex64]) -> f64 {
    let scale = zeros.iter().map(|z| z.norm()).fold(0.0, f64::max);
    1e-6 * scale.max(1e-12)
}

/// A zero is irrelevant iff it hugs the positive imaginary axis.
pub fn classify_zeros(zeros: &[Complex64], axis_tol: f64) -> ZeroClassification {
    let mut relevant = Vec::new();
    let mut irrelevant = Vec::new();
    for &z in zeros {
        if z.re.abs() < axis_tol && z.im > 0.0 {
            irrelevant.push(z);
        } else {
            relevant.push(z);
        }
    }
    ZeroClassification {
        relevant,
        irrelevant,
    }
}
