//! Complex PT-symmetric potential families and their classical turning points.
//!
//! Two families are supported: the monomial `V(x) = -(ix)^N` for integer
//! `N >= 2`, and the quasi-exactly-solvable quartic
//! `V(x) = -x^4 + 2iax^3 + (a^2 - 2b)x^2 + 2i(ab - J)x`.
//! Both satisfy the PT condition `V(-conj(x)) = conj(V(x))`, which is what
//! makes real spectra and PT-paired zero sets possible.

use num_complex::Complex64;
use thiserror::Error;

use crate::poly;

/// Residual bound factor for accepting a turning-point root.
pub const ROOT_RESIDUAL_TOL: f64 = 1e-10;
/// Relative tolerance for matching a PT-mirror pair `x_minus = -conj(x_plus)`.
pub const PT_MIRROR_TOL: f64 = 1e-8;

#[derive(Debug, Error)]
pub enum PotentialError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("no PT-mirror turning-point pair with Re(x_plus) > 0 at E = {energy} (roots: {roots:?})")]
    DegeneratePair { energy: f64, roots: Vec<Complex64> },
    #[error("turning-point root {root} has residual {residual:e}, exceeding bound {bound:e}")]
    ResidualBound {
        root: Complex64,
        residual: f64,
        bound: f64,
    },
}

/// Which PT-mirror pair of a quartic potential anchors scalings and wedges.
///
/// The outermost pair bounds the oscillatory Stokes region, so it is the
/// default; the alternative is kept as a diagnostic knob.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PairSelection {
    /// Pair with the largest |Re| (default).
    #[default]
    Outermost,
    /// Pair whose members have the smallest |Im|.
    ClosestToRealAxis,
}

/// A complex potential family with fixed parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Potential {
    /// `V(x) = -(ix)^N`, `N >= 2`. Entire for integer `N`.
    Monomial { n: u32 },
    /// `V(x) = -x^4 + 2iax^3 + (a^2-2b)x^2 + 2i(ab-J)x` with `a > 0`, `J >= 1`.
    QesQuartic { a: f64, b: f64, j: u32 },
}

impl Potential {
    pub fn monomial(n: u32) -> Result<Self, PotentialError> {
        if n < 2 {
            return Err(PotentialError::InvalidParameter(format!(
                "monomial power must be >= 2, got {n}"
            )));
        }
        Ok(Potential::Monomial { n })
    }

    pub fn qes_quartic(a: f64, b: f64, j: u32) -> Result<Self, PotentialError> {
        if !(a > 0.0) || !b.is_finite() {
            return Err(PotentialError::InvalidParameter(format!(
                "quartic requires a > 0 and finite b, got a = {a}, b = {b}"
            )));
        }
        if j < 1 {
            return Err(PotentialError::InvalidParameter(
                "quartic requires J >= 1".into(),
            ));
        }
        Ok(Potential::QesQuartic { a, b, j })
    }

    /// Evaluates `V(x)`. Both families are entire, so this never fails.
    pub fn eval(&self, x: Complex64) -> Complex64 {
        match *self {
            Potential::Monomial { n } => -(Complex64::i() * x).powi(n as i32),
            Potential::QesQuartic { a, b, j } => {
                let j = f64::from(j);
                // Horner form of -x^4 + 2iax^3 + (a^2-2b)x^2 + 2i(ab-J)x.
                let c3 = Complex64::new(0.0, 2.0 * a);
                let c2 = Complex64::new(a * a - 2.0 * b, 0.0);
                let c1 = Complex64::new(0.0, 2.0 * (a * b - j));
                (((-x + c3) * x + c2) * x + c1) * x
            }
        }
    }

    /// Evaluates `V'(x)`.
    pub fn eval_derivative(&self, x: Complex64) -> Complex64 {
        match *self {
            Potential::Monomial { n } => {
                -f64::from(n) * Complex64::i() * (Complex64::i() * x).powi(n as i32 - 1)
            }
            Potential::QesQuartic { a, b, j } => {
                let j = f64::from(j);
                let c3 = Complex64::new(0.0, 6.0 * a);
                let c2 = Complex64::new(2.0 * (a * a - 2.0 * b), 0.0);
                let c1 = Complex64::new(0.0, 2.0 * (a * b - j));
                ((-4.0 * x + c3) * x + c2) * x + c1
            }
        }
    }

    /// Coefficients of `V(x) - E` in ascending powers; used for root solving.
    fn shifted_coefficients(&self, e: f64) -> Vec<Complex64> {
        match *self {
            Potential::Monomial { n } => {
                let mut c = vec![Complex64::ZERO; n as usize + 1];
                c[0] = Complex64::new(-e, 0.0);
                // -(ix)^N = -(i^N) x^N
                c[n as usize] = -Complex64::i().powi(n as i32);
                c
            }
            Potential::QesQuartic { a, b, j } => {
                let j = f64::from(j);
                vec![
                    Complex64::new(-e, 0.0),
                    Complex64::new(0.0, 2.0 * (a * b - j)),
                    Complex64::new(a * a - 2.0 * b, 0.0),
                    Complex64::new(0.0, 2.0 * a),
                    Complex64::new(-1.0, 0.0),
                ]
            }
        }
    }

    /// Classical turning points: the roots of `V(x) = E`.
    pub fn turning_points(&self, e: f64) -> Result<TurningPoints, PotentialError> {
        self.turning_points_with(e, PairSelection::default())
    }

    pub fn turning_points_with(
        &self,
        e: f64,
        selection: PairSelection,
    ) -> Result<TurningPoints, PotentialError> {
        let all = match *self {
            Potential::Monomial { n } => {
                if !(e > 0.0) {
                    return Err(PotentialError::InvalidParameter(format!(
                        "monomial turning points need E > 0, got {e}"
                    )));
                }
                let r = e.powf(1.0 / f64::from(n));
                (0..n)
                    .map(|k| {
                        let theta = std::f64::consts::PI
                            * (f64::from(2 * k + 1) / f64::from(n) - 0.5);
                        Complex64::from_polar(r, theta)
                    })
                    .collect::<Vec<_>>()
            }
            Potential::QesQuartic { .. } => {
                let mut roots = poly::roots(&self.shifted_coefficients(e));
                for r in &mut roots {
                    *r = poly::newton_polish(&self.shifted_coefficients(e), *r, 2);
                }
                roots
            }
        };

        let bound = ROOT_RESIDUAL_TOL * (1.0 + e.abs());
        for &r in &all {
            let residual = (self.eval(r) - e).norm();
            if residual > bound {
                return Err(PotentialError::ResidualBound {
                    root: r,
                    residual,
                    bound,
                });
            }
        }

        let (plus, minus, inner) = match *self {
            // The monomial pair is fixed by the closed form: the two roots
            // flanking the negative imaginary axis at angles -pi/2 +- pi/N.
            Potential::Monomial { n } => {
                let plus = all[0];
                let minus = all[n as usize - 1];
                (plus, minus, Vec::new())
            }
            Potential::QesQuartic { .. } => select_pt_pair(&all, e, selection)?,
        };
        Ok(TurningPoints {
            energy: e,
            all,
            plus,
            minus,
            inner,
        })
    }
}

/// Turning points of `V(x) = E` with the PT-mirror pair singled out.
#[derive(Debug, Clone)]
pub struct TurningPoints {
    pub energy: f64,
    /// All roots of `V(x) = E`.
    pub all: Vec<Complex64>,
    /// Member of the selected PT pair with `Re > 0`.
    pub plus: Complex64,
    /// `-conj(plus)` up to root-solver precision.
    pub minus: Complex64,
    /// Remaining PT-mirror pairs (quartic only), exposed for diagnostics.
    pub inner: Vec<(Complex64, Complex64)>,
}

impl TurningPoints {
    /// Magnitude of the selected pair, `|x_plus|`.
    pub fn radius(&self) -> f64 {
        self.plus.norm()
    }
}

/// Groups roots into PT-mirror pairs and picks the anchor pair.
fn select_pt_pair(
    roots: &[Complex64],
    energy: f64,
    selection: PairSelection,
) -> Result<(Complex64, Complex64, Vec<(Complex64, Complex64)>), PotentialError> {
    let scale = roots.iter().map(|r| r.norm()).fold(0.0, f64::max).max(1e-300);
    let tol = PT_MIRROR_TOL * scale;

    let mut pairs: Vec<(Complex64, Complex64)> = Vec::new();
    let mut used = vec![false; roots.len()];
    for i in 0..roots.len() {
        if used[i] || roots[i].re <= tol {
            continue;
        }
        // Find the closest PT mirror of roots[i] among unused roots.
        let mirror = Complex64::new(-roots[i].re, roots[i].im);
        let mut best: Option<(usize, f64)> = None;
        for (k, &r) in roots.iter().enumerate() {
            if k == i || used[k] {
                continue;
            }
            let d = (r - mirror).norm();
            if best.map_or(true, |(_, bd)| d < bd) {
                best = Some((k, d));
            }
        }
        if let Some((k, d)) = best {
            if d <= tol {
                used[i] = true;
                used[k] = true;
                pairs.push((roots[i], roots[k]));
            }
        }
    }

    if pairs.is_empty() {
        return Err(PotentialError::DegeneratePair {
            energy,
            roots: roots.to_vec(),
        });
    }

    let idx = match selection {
        PairSelection::Outermost => (0..pairs.len())
            .max_by(|&a, &b| {
                pairs[a]
                    .0
                    .re
                    .abs()
                    .partial_cmp(&pairs[b].0.re.abs())
                    .unwrap()
            })
            .unwrap(),
        PairSelection::ClosestToRealAxis => (0..pairs.len())
            .min_by(|&a, &b| {
                pairs[a]
                    .0
                    .im
                    .abs()
                    .partial_cmp(&pairs[b].0.im.abs())
                    .unwrap()
            })
            .unwrap(),
    };
    let (plus, minus) = pairs.remove(idx);
    Ok((plus, minus, pairs))
}
