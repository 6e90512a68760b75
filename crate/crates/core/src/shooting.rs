//! Two-sided shooting for monomial potentials.
//!
//! A decaying WKB state is seeded deep inside the right Stokes wedge, its
//! PT-conjugate partner inside the left wedge, and both are integrated to a
//! matching point on the negative imaginary axis. The PT-fixed matching
//! point makes the Wronskian `W = psi_L psi_R' - psi_L' psi_R` purely real
//! at real energy, turning complex eigenvalue search into ordinary real
//! bracketing on `W(E)`; the residual imaginary part is kept as an accuracy
//! diagnostic.

use num_complex::Complex64;
use std::f64::consts::PI;
use thiserror::Error;

use crate::ode::{
    integrate_rescaled, integrate_schrodinger, wkb_seed, Contour, OdeError, OdeState, Tolerances,
    Trajectory,
};
use crate::potentials::{Potential, PotentialError};
use crate::quad::gauss_legendre;
use crate::wkb::{action_integral, WkbError};

/// Relative bound on `|Im W| / |W|` before a PT violation is reported.
pub const PT_REALNESS_TOL: f64 = 1e-6;
/// Target WKB damping exponent from the turning-point radius to the seed.
const DAMPING_TARGET: f64 = 35.0;
/// Maximum damping exponent the raw integrator is allowed to traverse
/// (exp(250) stays well below the overflow ceiling).
const DAMPING_MAX: f64 = 250.0;

#[derive(Debug, Error)]
pub enum ShootingError {
    #[error(transparent)]
    Ode(#[from] OdeError),
    #[error(transparent)]
    Wkb(#[from] WkbError),
    #[error(transparent)]
    Potential(#[from] PotentialError),
    #[error("PT realness violated at E = {e}: W = {w:e}, |Im W| = {im_w:e}")]
    PtViolation { e: f64, w: f64, im_w: f64 },
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

/// The pair of Stokes wedges in which the boundary conditions live, plus the
/// seeding radius. Wedge centers sit at `-pi/2 +- 2pi/(N+2)` with opening
/// `2pi/(N+2)`; for `N = 2` this reduces to the real axis.
#[derive(Debug, Clone, Copy)]
pub struct WedgePair {
    pub n: u32,
    pub theta_right: f64,
    pub theta_left: f64,
    pub opening: f64,
    pub start_radius: f64,
    /// Depth (per unit `E^(1/N)`) at which the oscillatory Stokes line
    /// crosses the negative imaginary axis; anchors the matching point.
    pub arch_depth: f64,
}

impl WedgePair {
    pub fn new(n: u32, start_radius: f64) -> Result<Self, ShootingError> {
        if n < 2 {
            return Err(ShootingError::InvalidInput("need N >= 2".into()));
        }
        if !(start_radius > 0.0) {
            return Err(ShootingError::InvalidInput(
                "start radius must be positive".into(),
            ));
        }
        let opening = 2.0 * PI / f64::from(n + 2);
        Ok(WedgePair {
            n,
            theta_right: -0.5 * PI + opening,
            theta_left: -0.5 * PI - opening,
            opening,
            start_radius,
            arch_depth: arch_axis_depth(n)?,
        })
    }

    /// Chooses the seeding radius for energies up to `e_max`.
    ///
    /// The radius targets a fixed WKB damping exponent between the turning
    /// point and the seed: enough that the seed's truncation error is
    /// squashed to well below eigenvalue tolerances, but capped so the
    /// amplitude range stays inside double precision. The conventional
    /// `2 E^(1/N)` is used whenever it lies between those two bounds; for
    /// large `N` it would cost thousands of e-foldings and is cut back.
    pub fn for_energy_range(n: u32, e_max: f64) -> Result<Self, ShootingError> {
        if !(e_max > 0.0) {
            return Err(ShootingError::InvalidInput("need E_max > 0".into()));
        }
        let r_tp = e_max.powf(1.0 / f64::from(n));
        let r_lo = radius_for_damping(n, e_max, DAMPING_TARGET);
        let r_hi = radius_for_damping(n, e_max, DAMPING_MAX);
        let radius = (2.0 * r_tp).clamp(r_lo, r_hi.max(r_lo));
        WedgePair::new(n, radius)
    }

    /// Seed location in the right wedge.
    pub fn seed_right(&self) -> Complex64 {
        Complex64::from_polar(self.start_radius, self.theta_right)
    }

    /// PT mirror of the right seed.
    pub fn seed_left(&self) -> Complex64 {
        let r = self.seed_right();
        Complex64::new(-r.re, r.im)
    }

    /// Matching point: on the negative imaginary axis (PT-fixed, so the
    /// Wronskian is real), one local wavelength below the point where the
    /// oscillatory Stokes line crosses the axis.
    ///
    /// Matching at the turning-point radius `-i E^(1/N)` instead would sit
    /// so far below the oscillatory line that the two shot solutions share
    /// one dominant growing component and the Wronskian's E-dependence is
    /// suppressed by `exp(-2 Im S)` (1e-8 already for N = 2, E = 9); near
    /// the arch both solutions stay comparably oscillatory. The offset off
    /// the arch itself keeps the matching point away from eigenfunction
    /// zeros, which cluster along the arch.
    pub fn matching_point(&self, e: f64) -> Complex64 {
        self.matching_point_offset(e, 1.0)
    }

    /// Matching point pushed `extra / kappa` further down, used when the
    /// default lands near an eigenfunction zero.
    pub fn matching_point_offset(&self, e: f64, extra: f64) -> Complex64 {
        let r = e.powf(1.0 / f64::from(self.n));
        let y0 = self.arch_depth * r;
        // |V(-iy) - E| = y^N + E for the monomial family.
        let kappa = (y0.powi(self.n as i32) + e).sqrt();
        Complex64::new(0.0, -(y0 + extra / kappa))
    }
}

/// Negative-imaginary-axis crossing depth of the Stokes line joining the
/// turning points, per unit turning-point radius. Zero for `N = 2` (the
/// line is the real segment); traced once otherwise.
fn arch_axis_depth(n: u32) -> Result<f64, ShootingError> {
    if n == 2 {
        return Ok(0.0);
    }
    let pot = Potential::Monomial { n };
    let path = crate::wkb::trace_stokes_line(&pot, 1.0, 2e-3)?;
    let mut best: Option<f64> = None;
    for w in path.samples.windows(2) {
        let (a, b) = (w[0], w[1]);
        if a.re == 0.0 {
            best = Some(a.im);
            break;
        }
        if a.re * b.re < 0.0 {
            let t = a.re / (a.re - b.re);
            best = Some(a.im + t * (b.im - a.im));
            break;
        }
    }
    let crossing = best.ok_or_else(|| {
        ShootingError::InvalidInput(format!("Stokes line for N = {n} does not cross the axis"))
    })?;
    Ok(-crossing)
}

/// WKB damping exponent accumulated from the turning-point radius out to
/// `r` along the wedge center, approximated by the radial integral of
/// `sqrt(t^N - E)`.
fn damping_exponent(n: u32, e: f64, r: f64) -> f64 {
    let r_tp = e.powf(1.0 / f64::from(n));
    if r <= r_tp {
        return 0.0;
    }
    // Substitution t = r_tp + (r - r_tp) u^2 removes the sqrt endpoint.
    let (nodes, weights) = gauss_legendre(64);
    let span = r - r_tp;
    let mut s = 0.0;
    for (&x, &w) in nodes.iter().zip(&weights) {
        let u = 0.5 * (x + 1.0);
        let t = r_tp + span * u * u;
        let q = t.powi(n as i32) - e;
        s += w * 0.5 * q.max(0.0).sqrt() * 2.0 * span * u;
    }
    s
}

fn radius_for_damping(n: u32, e: f64, target: f64) -> f64 {
    let r_tp = e.powf(1.0 / f64::from(n));
    let mut lo = r_tp * 1.0001;
    let mut hi = r_tp * 1.5 + 1.0;
    while damping_exponent(n, e, hi) < target {
        hi *= 1.5;
        if hi > 1e6 {
            break;
        }
    }
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if damping_exponent(n, e, mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Normalized shooting mismatch at one energy.
#[derive(Debug, Clone, Copy)]
pub struct Mismatch {
    /// `Re W`, with `W` scaled by the state magnitudes on both sides; zeros
    /// of this function are eigenvalues.
    pub w: f64,
    /// `|Im W|` under the same scaling; a PT / integration diagnostic.
    pub im_w: f64,
}

/// Integrates both wedge seeds to the matching point and forms the
/// magnitude-normalized Wronskian.
pub fn mismatch(
    pot: &Potential,
    e: f64,
    wedges: &WedgePair,
    tol: &Tolerances,
) -> Result<Mismatch, ShootingError> {
    match pot {
        Potential::Monomial { n } if *n == wedges.n => {}
        Potential::Monomial { .. } => {
            return Err(ShootingError::InvalidInput(
                "wedge pair built for a different N".into(),
            ))
        }
        _ => {
            return Err(ShootingError::InvalidInput(
                "shooting spectra are implemented for monomial potentials".into(),
            ))
        }
    }
    if !(e > 0.0) {
        return Err(ShootingError::InvalidInput(format!(
            "mismatch needs E > 0, got {e}"
        )));
    }

    let x_r = wedges.seed_right();
    let x_l = wedges.seed_left();
    let x_m = wedges.matching_point(e);

    let seed_r = wkb_seed(pot, e, x_r, x_r / x_r.norm())?;
    // PT conjugation psi(x) -> conj(psi(-conj(x))) maps the decaying right
    // solution onto the decaying left solution and flips the sign of the
    // derivative.
    let seed_l = OdeState::new(x_l, seed_r.psi.conj(), -seed_r.dpsi.conj());

    let (right, _) = integrate_rescaled(pot, e, &Contour::line(x_r, x_m), seed_r, tol)?;
    let (left, _) = integrate_rescaled(pot, e, &Contour::line(x_l, x_m), seed_l, tol)?;

    // Local wavenumber scale at the matching point.
    let kappa_sq = 1.0 + (pot.eval(x_m) - e).norm();
    let weight = |s: &OdeState| (s.psi.norm_sqr() + s.dpsi.norm_sqr() / kappa_sq).sqrt();
    let w = (left.psi * right.dpsi - left.dpsi * right.psi) / (weight(&left) * weight(&right));

    let im_w = w.im.abs();
    if im_w > PT_REALNESS_TOL * w.re.abs() + 1e-12 {
        return Err(ShootingError::PtViolation { e, w: w.re, im_w });
    }
    Ok(Mismatch { w: w.re, im_w })
}

/// One computed level.
#[derive(Debug, Clone)]
pub struct Eigenpair {
    /// Index by energy order (equals the interior zero count, which the
    /// zero-location pipeline cross-checks).
    pub k: u32,
    pub e: f64,
    /// `|W|` at the root under the mismatch normalization.
    pub residual: f64,
    /// States along the reference contour (right seed to matching point),
    /// normalized so `psi(x_m) = 1`.
    pub samples: Vec<OdeState>,
}

/// Spectrum below a cutoff, with a consistency warning when the level count
/// disagrees with the WKB prediction.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub levels: Vec<Eigenpair>,
    pub missed_level_warning: Option<String>,
}

/// Scans `W(E)` on a quantization-index grid, brackets its sign changes, and
/// refines each root by bisection accelerated with secant steps.
pub fn find_eigenvalues(
    pot: &Potential,
    e_max: f64,
    wedges: &WedgePair,
    tol: &Tolerances,
) -> Result<Spectrum, ShootingError> {
    let n = match pot {
        Potential::Monomial { n } => *n,
        _ => {
            return Err(ShootingError::InvalidInput(
                "shooting spectra are implemented for monomial potentials".into(),
            ))
        }
    };
    if !(e_max > 0.0) {
        return Err(ShootingError::InvalidInput("need E_max > 0".into()));
    }

    // Quantization grid: four scan points per expected level.
    let unit_action = action_integral(pot, 1.0)?.value;
    let growth = 2.0 * f64::from(n) / f64::from(n + 2);
    let energy_at = |q: f64| ((q + 0.5) * PI / unit_action).powf(growth);

    let mut scan: Vec<(f64, f64)> = Vec::new();
    let mut q = -0.45;
    loop {
        let e = energy_at(q);
        let m = mismatch(pot, e, wedges, tol)?;
        scan.push((e, m.w));
        if e > e_max * 1.02 {
            break;
        }
        q += 0.25;
        if q > 10_000.0 {
            break;
        }
    }

    // Refinement runs a decade tighter than the scan so the root location
    // is not limited by accumulated integrator error along the long seeding
    // contours.
    let refine_tol = Tolerances {
        rel: (tol.rel * 0.1).max(4e-14),
        abs: (tol.abs * 0.1).max(4e-16),
        ..*tol
    };
    let mut levels: Vec<Eigenpair> = Vec::new();
    for win in scan.windows(2) {
        let ((e0, w0), (e1, w1)) = (win[0], win[1]);
        if w0 == 0.0 || w0 * w1 >= 0.0 {
            continue;
        }
        let m0 = mismatch(pot, e0, wedges, &refine_tol)?;
        let m1 = mismatch(pot, e1, wedges, &refine_tol)?;
        if m0.w * m1.w >= 0.0 {
            continue;
        }
        let (root, residual) = refine_root(pot, wedges, &refine_tol, e0, m0.w, e1, m1.w)?;
        if root > e_max {
            continue;
        }
        if levels
            .iter()
            .all(|l| (l.e - root).abs() > 1e-8 * (1.0 + root))
        {
            levels.push(Eigenpair {
                k: 0,
                e: root,
                residual,
                samples: Vec::new(),
            });
        }
    }
    levels.sort_by(|a, b| a.e.partial_cmp(&b.e).unwrap());
    for (k, level) in levels.iter_mut().enumerate() {
        level.k = k as u32;
        level.samples = reference_samples(pot, level.e, wedges, tol)?;
    }

    // WKB count check: number of quantization actions below action(E_max).
    let expected = ((e_max.powf(1.0 / growth) * unit_action / PI) - 0.5).floor() + 1.0;
    let missed_level_warning = if (expected - levels.len() as f64).abs() > 1.0 {
        Some(format!(
            "found {} levels below E = {e_max} but WKB predicts about {expected}",
            levels.len()
        ))
    } else {
        None
    };
    Ok(Spectrum {
        levels,
        missed_level_warning,
    })
}

fn refine_root(
    pot: &Potential,
    wedges: &WedgePair,
    tol: &Tolerances,
    mut a: f64,
    mut fa: f64,
    mut b: f64,
    mut fb: f64,
) -> Result<(f64, f64), ShootingError> {
    let mut last_w = fb.abs();
    // Secant steps accelerate, but plain false position stagnates on one
    // endpoint for convex W; forcing a bisection whenever two successive
    // trials land on the same side keeps the bracket width contracting.
    let mut prev_side = 0i8;
    let mut use_secant = true;
    for _ in 0..200 {
        if (b - a).abs() <= 1e-13 * (1.0 + b.abs()) {
            break;
        }
        let secant = b - fb * (b - a) / (fb - fa);
        let mid = 0.5 * (a + b);
        let trial = if use_secant
            && secant.is_finite()
            && secant > a + 1e-3 * (b - a).abs()
            && secant < b - 1e-3 * (b - a).abs()
        {
            secant
        } else {
            mid
        };
        let m = mismatch(pot, trial, wedges, tol)?;
        last_w = m.w.abs();
        if m.w == 0.0 {
            return Ok((trial, 0.0));
        }
        let side = if fa * m.w < 0.0 {
            b = trial;
            fb = m.w;
            -1
        } else {
            a = trial;
            fa = m.w;
            1
        };
        use_secant = side != prev_side;
        prev_side = side;
    }
    Ok((0.5 * (a + b), last_w))
}

/// Right-wedge trajectory at an eigenvalue, normalized to `psi(x_m) = 1`.
fn reference_samples(
    pot: &Potential,
    e: f64,
    wedges: &WedgePair,
    tol: &Tolerances,
) -> Result<Vec<OdeState>, ShootingError> {
    let traj = eigen_trajectory(pot, e, wedges, tol)?;
    Ok(traj.states)
}

fn eigen_trajectory(
    pot: &Potential,
    e: f64,
    wedges: &WedgePair,
    tol: &Tolerances,
) -> Result<Trajectory, ShootingError> {
    let x_r = wedges.seed_right();
    let x_m = wedges.matching_point(e);
    let seed = wkb_seed(pot, e, x_r, x_r / x_r.norm())?;
    let mut traj = integrate_schrodinger(pot, e, &Contour::line(x_r, x_m), seed, tol)?;
    let norm = traj.last().psi;
    for s in &mut traj.states {
        s.psi /= norm;
        s.dpsi /= norm;
    }
    Ok(traj)
}

/// State of the eigenfunction at the matching point, normalized to
/// `psi(x_m) = 1`; the starting point for spreading the eigenfunction over
/// other contours or grids.
pub fn matching_state(
    pot: &Potential,
    pair: &Eigenpair,
    wedges: &WedgePair,
    tol: &Tolerances,
) -> Result<OdeState, ShootingError> {
    let x_r = wedges.seed_right();
    let seed = wkb_seed(pot, pair.e, x_r, x_r / x_r.norm())?;
    // If the default matching point happens to sit near a zero of this
    // eigenfunction, step down the axis until the value carries weight.
    let mut fallback = None;
    for extra in [1.0, 2.5, 4.0, 6.0] {
        let x_m = wedges.matching_point_offset(pair.e, extra);
        let (end, _) = integrate_rescaled(pot, pair.e, &Contour::line(x_r, x_m), seed, tol)?;
        let kappa_sq = 1.0 + (pot.eval(x_m) - pair.e).norm();
        let weight = (end.psi.norm_sqr() + end.dpsi.norm_sqr() / kappa_sq).sqrt();
        if end.psi.norm() > 1e-2 * weight {
            return Ok(OdeState::new(x_m, Complex64::ONE, end.dpsi / end.psi));
        }
        if fallback.is_none() && end.psi.norm() > 0.0 {
            fallback = Some(OdeState::new(x_m, Complex64::ONE, end.dpsi / end.psi));
        }
    }
    fallback.ok_or_else(|| {
        ShootingError::InvalidInput(format!(
            "eigenfunction vanishes along the matching axis at E = {}",
            pair.e
        ))
    })
}

/// Re-integrates the eigenfunction along a requested contour.
///
/// The normalized matching state is carried from `x_m` to the contour start
/// and then along the contour; the returned states sit exactly on the
/// contour anchors.
pub fn eigenfunction_samples(
    pot: &Potential,
    pair: &Eigenpair,
    wedges: &WedgePair,
    contour: &Contour,
    tol: &Tolerances,
) -> Result<Vec<OdeState>, ShootingError> {
    let at_m = matching_state(pot, pair, wedges, tol)?;
    let x_m = at_m.x;
    let mut anchors: Vec<Complex64> = Vec::with_capacity(contour.anchors().len() + 1);
    let skip_connector = (contour.start() - x_m).norm() <= 1e-12 * (1.0 + x_m.norm());
    if !skip_connector {
        anchors.push(x_m);
    }
    anchors.extend_from_slice(contour.anchors());
    let full = Contour::new(anchors)?;
    let traj = integrate_schrodinger(pot, pair.e, &full, at_m, tol)?;
    let mut states: Vec<OdeState> = traj.anchor_states().copied().collect();
    if !skip_connector {
        states.remove(0);
    }
    Ok(states)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn harmonic() -> (Potential, WedgePair) {
        let pot = Potential::monomial(2).unwrap();
        let wedges = WedgePair::for_energy_range(2, 10.0).unwrap();
        (pot, wedges)
    }

    #[test]
    fn wedge_angles_for_harmonic_lie_on_real_axis() {
        let w = WedgePair::new(2, 6.0).unwrap();
        assert_relative_eq!(w.theta_right, 0.0, epsilon = 1e-15);
        assert_relative_eq!(w.theta_left, -PI, epsilon = 1e-15);
        assert_relative_eq!(w.opening, PI / 2.0, epsilon = 1e-15);
        // PT mirror relation between the wedge centers.
        assert_relative_eq!(w.theta_left, -PI - w.theta_right, epsilon = 1e-15);
    }

    #[test]
    fn harmonic_mismatch_vanishes_at_eigenvalues_only() {
        let (pot, wedges) = harmonic();
        let tol = Tolerances::default();
        let at_1 = mismatch(&pot, 1.0, &wedges, &tol).unwrap();
        let at_2 = mismatch(&pot, 2.0, &wedges, &tol).unwrap();
        let at_3 = mismatch(&pot, 3.0, &wedges, &tol).unwrap();
        assert!(at_1.w.abs() < 1e-9, "W(1) = {:e}", at_1.w);
        assert!(at_3.w.abs() < 1e-9, "W(3) = {:e}", at_3.w);
        assert!(at_2.w.abs() > 1e-3, "W(2) = {:e}", at_2.w);
    }

    #[test]
    fn wronskian_is_real_for_real_energy() {
        let (pot, wedges) = harmonic();
        let tol = Tolerances::default();
        for e in [0.4, 1.7, 2.9, 6.3, 9.8] {
            let m = mismatch(&pot, e, &wedges, &tol).unwrap();
            assert!(
                m.im_w < 1e-6 * (m.w.abs() + 1.0),
                "Im W = {:e} at E = {e}",
                m.im_w
            );
        }
    }

    #[test]
    fn harmonic_spectrum_is_odd_integers() {
        let (pot, wedges) = harmonic();
        let tol = Tolerances::default();
        let spec = find_eigenvalues(&pot, 10.0, &wedges, &tol).unwrap();
        assert_eq!(spec.levels.len(), 5);
        assert!(spec.missed_level_warning.is_none());
        for (k, pair) in spec.levels.iter().enumerate() {
            assert_eq!(pair.k as usize, k);
            assert_relative_eq!(pair.e, (2 * k + 1) as f64, epsilon = 1e-8);
        }
    }

    #[test]
    fn cubic_mismatch_has_one_sign_change_in_window() {
        // Exactly one level (the ground state near 1.156) inside [0.5, 2].
        let pot = Potential::monomial(3).unwrap();
        let wedges = WedgePair::for_energy_range(3, 2.0).unwrap();
        let tol = Tolerances::default();
        let mut signs = Vec::new();
        let mut e = 0.5;
        while e <= 2.0 {
            signs.push(mismatch(&pot, e, &wedges, &tol).unwrap().w.signum());
            e += 0.125;
        }
        let changes = signs.windows(2).filter(|w| w[0] != w[1]).count();
        assert_eq!(changes, 1, "signs {signs:?}");
    }

    #[test]
    fn ground_state_samples_match_gaussian() {
        let (pot, wedges) = harmonic();
        let tol = Tolerances::default();
        let spec = find_eigenvalues(&pot, 2.0, &wedges, &tol).unwrap();
        let ground = &spec.levels[0];
        assert_relative_eq!(ground.e, 1.0, epsilon = 1e-9);

        // Sample on [-3, 3]: psi should be proportional to exp(-x^2/2).
        let anchors: Vec<Complex64> = (0..=60)
            .map(|i| Complex64::new(-3.0 + 0.1 * i as f64, 0.0))
            .collect();
        let contour = Contour::new(anchors).unwrap();
        let states = eigenfunction_samples(&pot, ground, &wedges, &contour, &tol).unwrap();
        assert_eq!(states.len(), 61);
        let ratio0 = states[0].psi / (-states[0].x * states[0].x / 2.0).exp();
        for s in &states {
            let ratio = s.psi / (-s.x * s.x / 2.0).exp();
            assert!(
                (ratio - ratio0).norm() < 1e-6 * ratio0.norm(),
                "not Gaussian at {}: {ratio} vs {ratio0}",
                s.x
            );
        }
    }

    #[test]
    fn second_excited_state_changes_sign_twice() {
        let (pot, wedges) = harmonic();
        let tol = Tolerances::default();
        let spec = find_eigenvalues(&pot, 6.0, &wedges, &tol).unwrap();
        let second = &spec.levels[2];
        assert_relative_eq!(second.e, 5.0, epsilon = 1e-8);
        let anchors: Vec<Complex64> = (0..=120)
            .map(|i| Complex64::new(-3.0 + 0.05 * i as f64, 0.0))
            .collect();
        let contour = Contour::new(anchors).unwrap();
        let states = eigenfunction_samples(&pot, second, &wedges, &contour, &tol).unwrap();
        // Strip the common phase; on the real axis the normalized
        // eigenfunction is real up to one overall factor.
        let phase = states
            .iter()
            .max_by(|a, b| a.psi.norm().partial_cmp(&b.psi.norm()).unwrap())
            .map(|s| s.psi / s.psi.norm())
            .unwrap();
        let vals: Vec<f64> = states.iter().map(|s| (s.psi / phase).re).collect();
        let changes = vals
            .windows(2)
            .filter(|w| w[0].signum() != w[1].signum() && w[0].abs() > 1e-9)
            .count();
        assert_eq!(changes, 2, "sign changes along [-3, 3]");
    }

    #[test]
    fn results_insensitive_to_seed_radius_and_wedge_rotation() {
        // Boundary-condition robustness at a level where the seed sits deep
        // in the asymptotic regime for every radius in [2, 4] E^(1/3).
        let pot = Potential::monomial(3).unwrap();
        let tol = Tolerances::default();
        let e_probe = 12.0f64; // window that contains the third excited state
        let r_tp = e_probe.powf(1.0 / 3.0);
        let mut roots = Vec::new();
        for factor in [2.0, 3.0, 4.0] {
            let wedges = WedgePair::new(3, factor * r_tp).unwrap();
            let spec = find_eigenvalues(&pot, e_probe, &wedges, &tol).unwrap();
            roots.push(spec.levels.last().unwrap().e);
        }
        for r in &roots[1..] {
            assert!(
                (r - roots[0]).abs() <= 10.0 * tol.rel * (1.0 + roots[0]),
                "radius sensitivity: {roots:?}"
            );
        }
        // Perturb the wedge angle by opening/8 on both sides.
        let base = WedgePair::new(3, 3.0 * r_tp).unwrap();
        for sign in [-1.0, 1.0] {
            let mut w = base;
            w.theta_right += sign * w.opening / 8.0;
            w.theta_left = -PI - w.theta_right;
            let spec = find_eigenvalues(&pot, e_probe, &w, &tol).unwrap();
            let e = spec.levels.last().unwrap().e;
            assert!(
                (e - roots[1]).abs() <= 10.0 * tol.rel * (1.0 + roots[1]),
                "wedge-rotation sensitivity: {e} vs {}",
                roots[1]
            );
        }
    }
}
