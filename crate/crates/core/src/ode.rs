//! Adaptive integration of `psi''(x) = (V(x) - E) psi(x)` along oriented
//! piecewise-linear contours in the complex x-plane.
//!
//! The stepper is the Dormand-Prince 5(4) embedded pair with PI step-size
//! control. Within one call the step size carries across contour segments,
//! so polylines with many anchors (grid rows) do not pay a restart penalty.

use num_complex::Complex64;
use thiserror::Error;

use crate::potentials::Potential;

/// Hard ceiling on `max(|psi|, |psi'|)`; beyond this the integration is in a
/// growing region it should not be in, and continuing silently would only
/// produce noise.
pub const OVERFLOW_CEILING: f64 = 1e150;
/// Threshold at which the rescaling driver renormalizes the state.
const RESCALE_THRESHOLD: f64 = 1e100;

#[derive(Debug, Error)]
pub enum OdeError {
    #[error("invalid contour: {0}")]
    InvalidContour(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("|psi| exceeded {ceiling:e} at x = {at} (integrating into a growing region)")]
    Overflow { at: Complex64, ceiling: f64 },
    #[error("required step {step:e} below minimum {min:e} at x = {at}")]
    StepUnderflow { at: Complex64, step: f64, min: f64 },
    #[error("non-finite state at x = {at}")]
    NonFinite { at: Complex64 },
    #[error("WKB branch ambiguous at x0 = {x0}: Re(sqrt(Q)*d) vanishes (anti-Stokes direction)")]
    BranchAmbiguity { x0: Complex64 },
}

/// Oriented piecewise-linear path in the complex plane.
#[derive(Debug, Clone, PartialEq)]
pub struct Contour {
    anchors: Vec<Complex64>,
}

impl Contour {
    pub fn new(anchors: Vec<Complex64>) -> Result<Self, OdeError> {
        if anchors.len() < 2 {
            return Err(OdeError::InvalidContour(
                "need at least two anchors".into(),
            ));
        }
        for w in anchors.windows(2) {
            if (w[1] - w[0]).norm() == 0.0 {
                return Err(OdeError::InvalidContour(format!(
                    "consecutive anchors coincide at {}",
                    w[0]
                )));
            }
            if !w[0].is_finite() || !w[1].is_finite() {
                return Err(OdeError::InvalidContour("non-finite anchor".into()));
            }
        }
        Ok(Contour { anchors })
    }

    pub fn line(from: Complex64, to: Complex64) -> Self {
        Contour::new(vec![from, to]).expect("degenerate segment")
    }

    pub fn anchors(&self) -> &[Complex64] {
        &self.anchors
    }

    pub fn start(&self) -> Complex64 {
        self.anchors[0]
    }

    pub fn end(&self) -> Complex64 {
        *self.anchors.last().unwrap()
    }

    pub fn length(&self) -> f64 {
        self.anchors.windows(2).map(|w| (w[1] - w[0]).norm()).sum()
    }
}

/// Wave function state at a point of the contour. `dpsi` is the derivative
/// with respect to the underlying complex variable x, not the path parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeState {
    pub x: Complex64,
    pub psi: Complex64,
    pub dpsi: Complex64,
}

impl OdeState {
    pub fn new(x: Complex64, psi: Complex64, dpsi: Complex64) -> Self {
        OdeState { x, psi, dpsi }
    }
}

/// Step-size and error control knobs.
///
/// Setting `max_step == min_step` switches the driver to fixed-step mode
/// (no rejections), which is what the order-verification tests use.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub rel: f64,
    pub abs: f64,
    pub max_step: f64,
    pub min_step: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            rel: 1e-12,
            abs: 1e-14,
            max_step: 0.5,
            min_step: 1e-13,
        }
    }
}

impl Tolerances {
    pub fn with_rel(rel: f64) -> Self {
        Tolerances {
            rel,
            abs: rel * 1e-2,
            ..Tolerances::default()
        }
    }

    fn validate(&self) -> Result<(), OdeError> {
        if !(self.rel > 0.0 && self.abs > 0.0) {
            return Err(OdeError::InvalidInput("tolerances must be positive".into()));
        }
        if !(self.min_step > 0.0 && self.min_step <= self.max_step) {
            return Err(OdeError::InvalidInput(
                "need 0 < min_step <= max_step".into(),
            ));
        }
        Ok(())
    }

    fn fixed_step(&self) -> bool {
        self.max_step == self.min_step
    }
}

/// Dense output of one integration: every accepted step, with the positions
/// of the contour anchors recorded for exact-location lookups.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub states: Vec<OdeState>,
    /// `states[anchor_indices[i]]` sits exactly on `contour.anchors()[i]`.
    pub anchor_indices: Vec<usize>,
}

impl Trajectory {
    pub fn last(&self) -> &OdeState {
        self.states.last().unwrap()
    }

    pub fn anchor_states(&self) -> impl Iterator<Item = &OdeState> {
        self.anchor_indices.iter().map(|&i| &self.states[i])
    }
}

#[derive(Clone, Copy)]
struct Y {
    psi: Complex64,
    dpsi: Complex64,
}

impl Y {
    #[inline]
    fn max_norm(&self) -> f64 {
        self.psi.norm().max(self.dpsi.norm())
    }
}

/// Right-hand side in path parameter t on a segment with direction `dir`:
/// d(psi)/dt = dir * dpsi, d(dpsi)/dt = dir * (V(x) - E) * psi.
#[inline]
fn rhs(pot: &Potential, e: f64, x: Complex64, dir: Complex64, y: Y) -> Y {
    Y {
        psi: dir * y.dpsi,
        dpsi: dir * (pot.eval(x) - e) * y.psi,
    }
}

const SAFE: f64 = 0.9;
const BETA: f64 = 0.04;
const EXPO1: f64 = 0.2 - BETA * 0.75;
const FAC_GROW: f64 = 5.0;
const FAC_SHRINK: f64 = 0.1;

/// Core driver. Calls `emit(state, is_anchor)` for the initial state and for
/// every accepted step; returns the final state and the accumulated log of
/// rescale factors (zero unless `rescale` is set).
fn drive<F: FnMut(&OdeState, bool)>(
    pot: &Potential,
    e: f64,
    anchors: &[Complex64],
    init: Y,
    tol: &Tolerances,
    rescale: bool,
    mut emit: F,
) -> Result<(OdeState, f64), OdeError> {
    tol.validate()?;
    let mut y = init;
    let mut log_scale = 0.0f64;
    let mut h_x = 0.0f64; // carried step length in x-plane units
    let mut facold = 1e-4f64;

    emit(
        &OdeState::new(anchors[0], y.psi, y.dpsi),
        true,
    );

    for seg in anchors.windows(2) {
        let (a, b) = (seg[0], seg[1]);
        let dir = b - a;
        let seg_len = dir.norm();
        let h_max = (tol.max_step / seg_len).min(1.0);

        let mut t = 0.0f64;
        let mut k1 = rhs(pot, e, a, dir, y);
        let mut h = if tol.fixed_step() {
            h_max
        } else if h_x > 0.0 {
            (h_x / seg_len).min(h_max)
        } else {
            initial_step(pot, e, a, dir, y, k1, tol).min(h_max)
        };

        while t < 1.0 {
            let mut clamped = false;
            if t + h >= 1.0 {
                h = 1.0 - t;
                clamped = true;
            }
            if !clamped && h * seg_len < tol.min_step && !tol.fixed_step() {
                return Err(OdeError::StepUnderflow {
                    at: a + dir * t,
                    step: h * seg_len,
                    min: tol.min_step,
                });
            }

            let (y5, k7, err) = dopri5_step(pot, e, a, dir, t, h, y, k1, tol);
            if !y5.psi.is_finite() || !y5.dpsi.is_finite() {
                return Err(OdeError::NonFinite { at: a + dir * t });
            }

            if err <= 1.0 || tol.fixed_step() {
                t += h;
                y = y5;
                k1 = k7;
                let at_anchor = clamped;
                let x = if at_anchor { b } else { a + dir * t };
                let m = y.max_norm();
                if rescale {
                    if m > RESCALE_THRESHOLD {
                        let inv = 1.0 / m;
                        y.psi *= inv;
                        y.dpsi *= inv;
                        k1.psi *= inv; // RHS is linear in y, FSAL stays valid
                        k1.dpsi *= inv;
                        log_scale += m.ln();
                    }
                } else if m > OVERFLOW_CEILING {
                    return Err(OdeError::Overflow {
                        at: x,
                        ceiling: OVERFLOW_CEILING,
                    });
                }
                emit(&OdeState::new(x, y.psi, y.dpsi), at_anchor);

                if !tol.fixed_step() {
                    let fac11 = err.powf(EXPO1);
                    let fac = (fac11 / facold.powf(BETA) / SAFE)
                        .max(1.0 / FAC_GROW)
                        .min(1.0 / FAC_SHRINK);
                    facold = err.max(1e-4);
                    h = (h / fac).min(h_max);
                }
            } else {
                let fac11 = err.powf(EXPO1);
                h /= (fac11 / SAFE).min(1.0 / FAC_SHRINK);
            }
        }
        h_x = h * seg_len;
    }

    let last = OdeState::new(*anchors.last().unwrap(), y.psi, y.dpsi);
    Ok((last, log_scale))
}

/// One Dormand-Prince 5(4) step from `t` with size `h`; returns the 5th-order
/// solution, the FSAL stage, and the scaled error norm.
#[allow(clippy::too_many_arguments)]
fn dopri5_step(
    pot: &Potential,
    e: f64,
    a: Complex64,
    dir: Complex64,
    t: f64,
    h: f64,
    y: Y,
    k1: Y,
    tol: &Tolerances,
) -> (Y, Y, f64) {
    #[inline]
    fn lc(y: Y, h: f64, terms: &[(f64, Y)]) -> Y {
        let mut psi = Complex64::ZERO;
        let mut dpsi = Complex64::ZERO;
        for &(c, k) in terms {
            psi += c * k.psi;
            dpsi += c * k.dpsi;
        }
        Y {
            psi: y.psi + h * psi,
            dpsi: y.dpsi + h * dpsi,
        }
    }
    let x_at = |c: f64| a + dir * (t + c * h);

    let k2 = rhs(pot, e, x_at(0.2), dir, lc(y, h, &[(0.2, k1)]));
    let k3 = rhs(
        pot,
        e,
        x_at(0.3),
        dir,
        lc(y, h, &[(3.0 / 40.0, k1), (9.0 / 40.0, k2)]),
    );
    let k4 = rhs(
        pot,
        e,
        x_at(0.8),
        dir,
        lc(
            y,
            h,
            &[(44.0 / 45.0, k1), (-56.0 / 15.0, k2), (32.0 / 9.0, k3)],
        ),
    );
    let k5 = rhs(
        pot,
        e,
        x_at(8.0 / 9.0),
        dir,
        lc(
            y,
            h,
            &[
                (19372.0 / 6561.0, k1),
                (-25360.0 / 2187.0, k2),
                (64448.0 / 6561.0, k3),
                (-212.0 / 729.0, k4),
            ],
        ),
    );
    let k6 = rhs(
        pot,
        e,
        x_at(1.0),
        dir,
        lc(
            y,
            h,
            &[
                (9017.0 / 3168.0, k1),
                (-355.0 / 33.0, k2),
                (46732.0 / 5247.0, k3),
                (49.0 / 176.0, k4),
                (-5103.0 / 18656.0, k5),
            ],
        ),
    );
    let y5 = lc(
        y,
        h,
        &[
            (35.0 / 384.0, k1),
            (500.0 / 1113.0, k3),
            (125.0 / 192.0, k4),
            (-2187.0 / 6784.0, k5),
            (11.0 / 84.0, k6),
        ],
    );
    let k7 = rhs(pot, e, x_at(1.0), dir, y5);

    let err = lc(
        Y {
            psi: Complex64::ZERO,
            dpsi: Complex64::ZERO,
        },
        h,
        &[
            (71.0 / 57600.0, k1),
            (-71.0 / 16695.0, k3),
            (71.0 / 1920.0, k4),
            (-17253.0 / 339200.0, k5),
            (22.0 / 525.0, k6),
            (-1.0 / 40.0, k7),
        ],
    );
    let sc_psi = tol.abs + tol.rel * y.psi.norm().max(y5.psi.norm());
    let sc_dpsi = tol.abs + tol.rel * y.dpsi.norm().max(y5.dpsi.norm());
    let e_psi = err.psi.norm() / sc_psi;
    let e_dpsi = err.dpsi.norm() / sc_dpsi;
    let err_norm = (0.5 * (e_psi * e_psi + e_dpsi * e_dpsi)).sqrt();
    (y5, k7, err_norm)
}

/// Cheap version of the classical starting-step heuristic.
fn initial_step(
    pot: &Potential,
    e: f64,
    a: Complex64,
    dir: Complex64,
    y: Y,
    k1: Y,
    tol: &Tolerances,
) -> f64 {
    let sc_psi = tol.abs + tol.rel * y.psi.norm();
    let sc_dpsi = tol.abs + tol.rel * y.dpsi.norm();
    let d0 = ((y.psi.norm() / sc_psi).powi(2) + (y.dpsi.norm() / sc_dpsi).powi(2)).sqrt();
    let d1 = ((k1.psi.norm() / sc_psi).powi(2) + (k1.dpsi.norm() / sc_dpsi).powi(2)).sqrt();
    let h0 = if d0 < 1e-10 || d1 < 1e-10 {
        1e-6
    } else {
        0.01 * d0 / d1
    };
    // One Euler probe to estimate the second derivative scale.
    let y1 = Y {
        psi: y.psi + h0 * k1.psi,
        dpsi: y.dpsi + h0 * k1.dpsi,
    };
    let f1 = rhs(pot, e, a + dir * h0, dir, y1);
    let d2 = (((f1.psi - k1.psi).norm() / sc_psi).powi(2)
        + ((f1.dpsi - k1.dpsi).norm() / sc_dpsi).powi(2))
    .sqrt()
        / h0;
    let dm = d1.max(d2);
    let h1 = if dm <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / dm).powf(0.2)
    };
    (100.0 * h0).min(h1)
}

/// Integrates along the contour recording every accepted step.
///
/// `init.x` must coincide with the contour start. Fails loudly on overflow
/// past [`OVERFLOW_CEILING`] instead of producing NaN samples.
pub fn integrate_schrodinger(
    pot: &Potential,
    e: f64,
    contour: &Contour,
    init: OdeState,
    tol: &Tolerances,
) -> Result<Trajectory, OdeError> {
    check_init(contour, &init)?;
    let mut traj = Trajectory {
        states: Vec::new(),
        anchor_indices: Vec::new(),
    };
    let y0 = Y {
        psi: init.psi,
        dpsi: init.dpsi,
    };
    drive(pot, e, contour.anchors(), y0, tol, false, |s, at_anchor| {
        traj.states.push(*s);
        if at_anchor {
            traj.anchor_indices.push(traj.states.len() - 1);
        }
    })?;
    Ok(traj)
}

/// Endpoint-only integration (no recording).
pub fn integrate_to_end(
    pot: &Potential,
    e: f64,
    contour: &Contour,
    init: OdeState,
    tol: &Tolerances,
) -> Result<OdeState, OdeError> {
    check_init(contour, &init)?;
    let y0 = Y {
        psi: init.psi,
        dpsi: init.dpsi,
    };
    let (last, _) = drive(pot, e, contour.anchors(), y0, tol, false, |_, _| {})?;
    Ok(last)
}

/// Endpoint-only integration with on-the-fly renormalization, for paths that
/// cross many decades of exponential growth. Returns the final state scaled
/// down by `exp(log_scale)`; the true solution is `psi * exp(log_scale)`.
pub fn integrate_rescaled(
    pot: &Potential,
    e: f64,
    contour: &Contour,
    init: OdeState,
    tol: &Tolerances,
) -> Result<(OdeState, f64), OdeError> {
    check_init(contour, &init)?;
    let y0 = Y {
        psi: init.psi,
        dpsi: init.dpsi,
    };
    drive(pot, e, contour.anchors(), y0, tol, true, |_, _| {})
}

fn check_init(contour: &Contour, init: &OdeState) -> Result<(), OdeError> {
    let scale = 1.0 + contour.start().norm();
    if (init.x - contour.start()).norm() > 1e-9 * scale {
        return Err(OdeError::InvalidInput(format!(
            "initial state at {} but contour starts at {}",
            init.x,
            contour.start()
        )));
    }
    if !init.psi.is_finite() || !init.dpsi.is_finite() {
        return Err(OdeError::InvalidInput("non-finite initial state".into()));
    }
    Ok(())
}

/// Decaying WKB state at `x0`: `psi = Q^(-1/4)`, `psi' = -sqrt(Q) Q^(-1/4)`
/// with `Q = V(x0) - E`. The branch of `sqrt(Q)` is fixed by requiring
/// `Re(sqrt(Q) * d) > 0` for the unit vector `d` pointing into the Stokes
/// wedge (the decay direction), so the state decays toward infinity inside
/// the wedge.
pub fn wkb_seed(
    pot: &Potential,
    e: f64,
    x0: Complex64,
    wedge_direction: Complex64,
) -> Result<OdeState, OdeError> {
    let q = pot.eval(x0) - e;
    if q.norm() == 0.0 {
        return Err(OdeError::InvalidInput(format!(
            "x0 = {x0} is a turning point (Q = 0)"
        )));
    }
    let d = wedge_direction / wedge_direction.norm();
    let mut sq = q.sqrt();
    let proj = (sq * d).re;
    if proj.abs() < 1e-8 * sq.norm() {
        return Err(OdeError::BranchAmbiguity { x0 });
    }
    if proj < 0.0 {
        sq = -sq;
    }
    let psi = q.powf(-0.25);
    Ok(OdeState::new(x0, psi, -sq * psi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn gaussian_init() -> OdeState {
        OdeState::new(c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0))
    }

    #[test]
    fn gaussian_ground_state_on_real_axis() {
        // V = x^2, E = 1: psi = exp(-x^2/2), psi(1) = exp(-1/2).
        let pot = Potential::monomial(2).unwrap();
        let tol = Tolerances::default();
        let contour = Contour::line(c(0.0, 0.0), c(1.0, 0.0));
        let end = integrate_to_end(&pot, 1.0, &contour, gaussian_init(), &tol).unwrap();
        assert_relative_eq!(end.psi.re, (-0.5f64).exp(), epsilon = 1e-10);
        assert!(end.psi.im.abs() < 1e-12);
        assert_relative_eq!(end.dpsi.re, -(-0.5f64).exp(), epsilon = 1e-9);
    }

    #[test]
    fn analytic_continuation_up_the_imaginary_axis() {
        // exp(-x^2/2) at x = i is exp(+1/2).
        let pot = Potential::monomial(2).unwrap();
        let tol = Tolerances::default();
        let contour = Contour::line(c(0.0, 0.0), c(0.0, 1.0));
        let end = integrate_to_end(&pot, 1.0, &contour, gaussian_init(), &tol).unwrap();
        assert_relative_eq!(end.psi.re, 0.5f64.exp(), epsilon = 1e-10);
        assert!(end.psi.im.abs() < 1e-11);
    }

    #[test]
    fn path_independence_for_entire_potentials() {
        let pot = Potential::monomial(3).unwrap();
        let tol = Tolerances::default();
        let init = gaussian_init();
        let direct = integrate_to_end(&pot, 1.3, &Contour::line(c(0.0, 0.0), c(1.0, 0.0)), init, &tol)
            .unwrap();
        let dog_leg = Contour::new(vec![c(0.0, 0.0), c(0.0, 0.5), c(1.0, 0.0)]).unwrap();
        let indirect = integrate_to_end(&pot, 1.3, &dog_leg, init, &tol).unwrap();
        let err = (direct.psi - indirect.psi).norm();
        assert!(
            err < 10.0 * tol.rel * direct.psi.norm().max(1.0),
            "path dependence {err:e}"
        );
    }

    #[test]
    fn fixed_step_order_is_five() {
        // Endpoint error on the Gaussian test should drop ~2^5 per halving.
        let pot = Potential::monomial(2).unwrap();
        let exact = (-0.5f64).exp();
        let contour = Contour::line(c(0.0, 0.0), c(1.0, 0.0));
        let mut errs = Vec::new();
        for h in [1.0 / 16.0, 1.0 / 32.0, 1.0 / 64.0] {
            let tol = Tolerances {
                rel: 1.0,
                abs: 1.0,
                max_step: h,
                min_step: h,
            };
            let end = integrate_to_end(&pot, 1.0, &contour, gaussian_init(), &tol).unwrap();
            errs.push((end.psi.re - exact).abs());
        }
        let s1 = (errs[0] / errs[1]).log2();
        let s2 = (errs[1] / errs[2]).log2();
        assert!(
            (4.5..=5.6).contains(&s1) && (4.5..=5.6).contains(&s2),
            "observed orders {s1:.2}, {s2:.2} (errors {errs:?})"
        );
    }

    #[test]
    fn adaptive_error_tracks_tolerance() {
        let pot = Potential::monomial(2).unwrap();
        let exact = (-0.5f64).exp();
        let contour = Contour::line(c(0.0, 0.0), c(1.0, 0.0));
        let mut errs = Vec::new();
        for rel in [1e-6, 1e-8, 1e-10] {
            let tol = Tolerances {
                rel,
                abs: rel * 1e-2,
                ..Tolerances::default()
            };
            let end = integrate_to_end(&pot, 1.0, &contour, gaussian_init(), &tol).unwrap();
            errs.push((end.psi.re - exact).abs().max(1e-16));
        }
        let slope = (errs[0] / errs[2]).log10() / 4.0;
        assert!(
            (0.5..=1.3).contains(&slope),
            "tolerance slope {slope:.2} (errors {errs:?})"
        );
        assert!(errs[2] < 1e-9);
    }

    #[test]
    fn wronskian_is_conserved() {
        let pot = Potential::monomial(3).unwrap();
        let tol = Tolerances::default();
        let contour = Contour::new(vec![c(-1.0, 0.0), c(0.3, -0.7), c(1.5, 0.2)]).unwrap();
        let a = integrate_schrodinger(
            &pot,
            2.0,
            &contour,
            OdeState::new(c(-1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)),
            &tol,
        )
        .unwrap();
        let b = integrate_schrodinger(
            &pot,
            2.0,
            &contour,
            OdeState::new(c(-1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)),
            &tol,
        )
        .unwrap();
        // Compare at shared anchor locations.
        let wr = |sa: &OdeState, sb: &OdeState| sa.psi * sb.dpsi - sa.dpsi * sb.psi;
        let w0 = wr(&a.states[0], &b.states[0]);
        for (sa, sb) in a.anchor_states().zip(b.anchor_states()) {
            let w = wr(sa, sb);
            assert!(
                (w - w0).norm() <= 10.0 * tol.rel * (1.0 + w0.norm()),
                "Wronskian drifted: {w} vs {w0}"
            );
        }
    }

    #[test]
    fn overflow_fails_loudly() {
        // Grow as exp(+x^2/2) along the real axis; must hit the ceiling.
        let pot = Potential::monomial(2).unwrap();
        let tol = Tolerances::default();
        let init = OdeState::new(c(3.0, 0.0), c(1.0, 0.0), c(3.0, 0.0));
        let contour = Contour::line(c(3.0, 0.0), c(40.0, 0.0));
        match integrate_to_end(&pot, 1.0, &contour, init, &tol) {
            Err(OdeError::Overflow { .. }) => {}
            other => panic!("expected overflow, got {other:?}"),
        }
    }

    #[test]
    fn rescaled_integration_crosses_many_decades() {
        // psi = exp(x^2/2) solves psi'' = (x^2 + 1) psi, i.e. E = -1; the
        // rescaled driver must carry its ~346 decades in log_scale.
        let pot = Potential::monomial(2).unwrap();
        let tol = Tolerances::default();
        let init = OdeState::new(c(3.0, 0.0), c(1.0, 0.0), c(3.0, 0.0));
        let contour = Contour::line(c(3.0, 0.0), c(40.0, 0.0));
        let (end, log_scale) = integrate_rescaled(&pot, -1.0, &contour, init, &tol).unwrap();
        // exp(x^2/2 - 9/2) at 40 has log = 800 - 4.5.
        let log_psi = end.psi.norm().ln() + log_scale;
        assert_relative_eq!(log_psi, 800.0 - 4.5, epsilon = 1e-6 * 800.0);
        assert!(end.psi.norm() <= 1e100);
    }

    #[test]
    fn step_underflow_reported() {
        let pot = Potential::monomial(2).unwrap();
        let tol = Tolerances {
            rel: 1e-13,
            abs: 1e-15,
            max_step: 0.5,
            min_step: 0.4,
        };
        let contour = Contour::line(c(0.0, 0.0), c(3.0, 0.0));
        match integrate_to_end(&pot, 1.0, &contour, gaussian_init(), &tol) {
            Err(OdeError::StepUnderflow { .. }) => {}
            other => panic!("expected step underflow, got {other:?}"),
        }
    }

    #[test]
    fn anchors_are_hit_exactly() {
        let pot = Potential::monomial(2).unwrap();
        let tol = Tolerances::default();
        let pts = vec![c(0.0, 0.0), c(0.25, 0.1), c(0.8, -0.3), c(1.0, 0.0)];
        let contour = Contour::new(pts.clone()).unwrap();
        let traj =
            integrate_schrodinger(&pot, 1.0, &contour, gaussian_init(), &tol).unwrap();
        assert_eq!(traj.anchor_indices.len(), pts.len());
        for (s, p) in traj.anchor_states().zip(&pts) {
            assert_eq!(s.x, *p);
        }
    }

    #[test]
    fn wkb_seed_matches_decaying_gaussian() {
        // V = x^2, E = 1 at x0 = 5: Q = 24, decaying branch gives
        // psi'/psi = -sqrt(24).
        let pot = Potential::monomial(2).unwrap();
        let seed = wkb_seed(&pot, 1.0, c(5.0, 0.0), c(1.0, 0.0)).unwrap();
        let log_deriv = seed.dpsi / seed.psi;
        assert_relative_eq!(log_deriv.re, -24f64.sqrt(), epsilon = 1e-12);
        assert!(log_deriv.im.abs() < 1e-12);
    }

    #[test]
    fn wkb_seed_branch_in_right_wedge() {
        // Cubic right wedge center: the chosen branch satisfies
        // Re(sqrt(Q) * d) > 0 for d along the wedge direction.
        let pot = Potential::monomial(3).unwrap();
        let x0 = Complex64::from_polar(6.0, -std::f64::consts::PI / 10.0);
        let d = x0 / x0.norm();
        let seed = wkb_seed(&pot, 1.0, x0, d).unwrap();
        let sq = -seed.dpsi / seed.psi;
        assert!((sq * d).re > 0.0);
        // The state decays outward: a short outward continuation shrinks it.
        let tol = Tolerances::default();
        let contour = Contour::line(x0, x0 * 1.05);
        let end = integrate_to_end(&pot, 1.0, &contour, seed, &tol).unwrap();
        assert!(end.psi.norm() < seed.psi.norm());
    }

    #[test]
    fn wkb_seed_branch_flips_with_direction() {
        let pot = Potential::monomial(2).unwrap();
        let fwd = wkb_seed(&pot, 1.0, c(5.0, 0.0), c(1.0, 0.0)).unwrap();
        let bwd = wkb_seed(&pot, 1.0, c(5.0, 0.0), c(-1.0, 0.0)).unwrap();
        assert_relative_eq!(fwd.dpsi.re, -bwd.dpsi.re, epsilon = 1e-12);
        // Perpendicular direction: Re(sqrt(Q) d) = 0 exactly.
        match wkb_seed(&pot, 1.0, c(5.0, 0.0), c(0.0, 1.0)) {
            Err(OdeError::BranchAmbiguity { .. }) => {}
            other => panic!("expected branch ambiguity, got {other:?}"),
        }
    }
}
