//! Zero location for numerically integrated eigenfunctions: evaluate on a
//! grid, detect cells where the level curves `Re psi = 0` and `Im psi = 0`
//! both cross, and polish each candidate with a complex Newton iteration
//! backed by short re-integrations.

use num_complex::Complex64;
use thiserror::Error;

use crate::ode::{
    integrate_schrodinger, integrate_to_end, Contour, OdeError, OdeState, Tolerances,
};
use crate::potentials::Potential;
use crate::shooting::{matching_state, Eigenpair, ShootingError, WedgePair};

#[derive(Debug, Error)]
pub enum ZeroError {
    #[error(transparent)]
    Ode(#[from] OdeError),
    #[error(transparent)]
    Shooting(#[from] ShootingError),
    #[error("invalid region: {0}")]
    InvalidRegion(String),
    #[error("Newton iteration did not converge after {after} steps (last at {at})")]
    NoConvergence { after: usize, at: Complex64 },
    #[error("derivative vanished at {at}; multiple zero suspected")]
    DerivativeVanishes { at: Complex64 },
}

/// Rectangular sampling window in the complex plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridRegion {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
    pub nx: usize,
    pub ny: usize,
}

impl GridRegion {
    pub fn new(
        re_min: f64,
        re_max: f64,
        im_min: f64,
        im_max: f64,
        nx: usize,
        ny: usize,
    ) -> Result<Self, ZeroError> {
        if !(re_min < re_max && im_min < im_max) {
            return Err(ZeroError::InvalidRegion(format!(
                "empty region [{re_min}, {re_max}] x [{im_min}, {im_max}]"
            )));
        }
        if nx < 8 || ny < 8 {
            return Err(ZeroError::InvalidRegion(format!(
                "grid too coarse: {nx} x {ny}"
            )));
        }
        Ok(GridRegion {
            re_min,
            re_max,
            im_min,
            im_max,
            nx,
            ny,
        })
    }

    /// Bounding box of a point cloud, padded by `pad` times its extent on
    /// each side.
    pub fn from_points(
        points: &[Complex64],
        pad: f64,
        nx: usize,
        ny: usize,
    ) -> Result<Self, ZeroError> {
        if points.is_empty() {
            return Err(ZeroError::InvalidRegion("no points".into()));
        }
        let (mut re_min, mut re_max) = (f64::INFINITY, f64::NEG_INFINITY);
        let (mut im_min, mut im_max) = (f64::INFINITY, f64::NEG_INFINITY);
        for p in points {
            re_min = re_min.min(p.re);
            re_max = re_max.max(p.re);
            im_min = im_min.min(p.im);
            im_max = im_max.max(p.im);
        }
        let scale = ((re_max - re_min).max(im_max - im_min)).max(1e-6);
        let dx = pad * (re_max - re_min).max(0.1 * scale);
        let dy = pad * (im_max - im_min).max(0.1 * scale);
        GridRegion::new(re_min - dx, re_max + dx, im_min - dy, im_max + dy, nx, ny)
    }

    pub fn xs(&self) -> Vec<f64> {
        linspace(self.re_min, self.re_max, self.nx)
    }

    pub fn ys(&self) -> Vec<f64> {
        linspace(self.im_min, self.im_max, self.ny)
    }

    /// Diagonal of one grid cell.
    pub fn cell_diagonal(&self) -> f64 {
        let dx = (self.re_max - self.re_min) / (self.nx - 1) as f64;
        let dy = (self.im_max - self.im_min) / (self.ny - 1) as f64;
        dx.hypot(dy)
    }
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| a + (b - a) * i as f64 / (n - 1) as f64)
        .collect()
}

/// Wave-function values on a [`GridRegion`]; `psi[row][col]` with rows
/// indexed by imaginary part.
#[derive(Debug, Clone)]
pub struct FieldSample {
    pub region: GridRegion,
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    pub psi: Vec<Vec<Complex64>>,
    pub dpsi: Vec<Vec<Complex64>>,
    /// Rows whose sweep overflowed; their values are zeroed and no cell
    /// touching them is searched.
    pub masked_rows: Vec<usize>,
}

impl FieldSample {
    /// Samples an explicit analytic function (used by tests and the demo).
    pub fn from_fn<F>(region: GridRegion, mut f: F) -> FieldSample
    where
        F: FnMut(Complex64) -> (Complex64, Complex64),
    {
        let xs = region.xs();
        let ys = region.ys();
        let mut psi = Vec::with_capacity(ys.len());
        let mut dpsi = Vec::with_capacity(ys.len());
        for &y in &ys {
            let mut row_psi = Vec::with_capacity(xs.len());
            let mut row_dpsi = Vec::with_capacity(xs.len());
            for &x in &xs {
                let (p, dp) = f(Complex64::new(x, y));
                row_psi.push(p);
                row_dpsi.push(dp);
            }
            psi.push(row_psi);
            dpsi.push(row_dpsi);
        }
        FieldSample {
            region,
            xs,
            ys,
            psi,
            dpsi,
            masked_rows: Vec::new(),
        }
    }
}

/// Evaluates the eigenfunction (normalized to `psi = 1` at the matching
/// point) on the grid.
///
/// Integration proceeds up a vertical spine through the matching point and
/// then outward along each row, so the oscillatory region is crossed before
/// any growing one. Rows that overflow are masked rather than failing the
/// whole grid.
pub fn evaluate_on_grid(
    pot: &Potential,
    pair: &Eigenpair,
    wedges: &WedgePair,
    region: &GridRegion,
    tol: &Tolerances,
) -> Result<FieldSample, ZeroError> {
    let anchor = matching_state(pot, pair, wedges, tol)?;
    evaluate_on_grid_from(pot, pair.e, anchor, region, tol)
}

/// Grid evaluation seeded from an explicit state (any solution works; it is
/// an eigenfunction only when `e` is an eigenvalue).
pub fn evaluate_on_grid_from(
    pot: &Potential,
    e: f64,
    anchor: OdeState,
    region: &GridRegion,
    tol: &Tolerances,
) -> Result<FieldSample, ZeroError> {
    let xs = region.xs();
    let ys = region.ys();
    let sx = anchor.x.re;
    let eps = 1e-12 * (1.0 + anchor.x.norm());

    // Spine states at every row height, split into the part above and below
    // the anchor.
    let mut spine: Vec<Option<OdeState>> = vec![None; ys.len()];
    let up: Vec<usize> = (0..ys.len()).filter(|&j| ys[j] >= anchor.x.im).collect();
    let down: Vec<usize> = (0..ys.len())
        .filter(|&j| ys[j] < anchor.x.im)
        .rev()
        .collect();
    for list in [up, down] {
        if list.is_empty() {
            continue;
        }
        let mut anchors = vec![anchor.x];
        for &j in &list {
            let p = Complex64::new(sx, ys[j]);
            if (p - *anchors.last().unwrap()).norm() > eps {
                anchors.push(p);
            }
        }
        if anchors.len() < 2 {
            // Anchor already sits on the single requested row.
            spine[list[0]] = Some(anchor);
            continue;
        }
        let contour = Contour::new(anchors.clone()).map_err(ZeroError::Ode)?;
        let traj = integrate_schrodinger(pot, e, &contour, anchor, tol)?;
        let mut states = traj.anchor_states();
        states.next(); // skip the anchor itself
        let mut idx = 0usize;
        for s in states {
            // Anchors may have been deduplicated; advance over the rows.
            while idx < list.len() {
                let j = list[idx];
                idx += 1;
                if (ys[j] - s.x.im).abs() <= 1e-9 * (1.0 + s.x.norm()) {
                    spine[j] = Some(*s);
                    break;
                }
                spine[j] = Some(anchor);
            }
        }
    }

    let zero_row = vec![Complex64::ZERO; xs.len()];
    let mut psi = vec![zero_row.clone(); ys.len()];
    let mut dpsi = vec![zero_row; ys.len()];
    let mut masked_rows = Vec::new();

    for (j, &y) in ys.iter().enumerate() {
        let start = match spine[j] {
            Some(s) => s,
            None => {
                masked_rows.push(j);
                continue;
            }
        };
        let mut row_failed = false;
        for sweep_right in [true, false] {
            let cols: Vec<usize> = if sweep_right {
                (0..xs.len()).filter(|&i| xs[i] > sx + eps).collect()
            } else {
                (0..xs.len()).filter(|&i| xs[i] < sx - eps).rev().collect()
            };
            if cols.is_empty() {
                continue;
            }
            let mut anchors = vec![start.x];
            anchors.extend(cols.iter().map(|&i| Complex64::new(xs[i], y)));
            let contour = Contour::new(anchors).map_err(ZeroError::Ode)?;
            match integrate_schrodinger(pot, e, &contour, start, tol) {
                Ok(traj) => {
                    for (s, &i) in traj.anchor_states().skip(1).zip(&cols) {
                        psi[j][i] = s.psi;
                        dpsi[j][i] = s.dpsi;
                    }
                }
                Err(OdeError::Overflow { .. }) => {
                    row_failed = true;
                    break;
                }
                Err(e) => return Err(ZeroError::Ode(e)),
            }
        }
        if row_failed {
            psi[j].fill(Complex64::ZERO);
            dpsi[j].fill(Complex64::ZERO);
            masked_rows.push(j);
            continue;
        }
        // Column exactly on the spine, if any.
        for (i, &x) in xs.iter().enumerate() {
            if (x - sx).abs() <= eps {
                psi[j][i] = start.psi;
                dpsi[j][i] = start.dpsi;
            }
        }
    }
    masked_rows.sort_unstable();
    masked_rows.dedup();

    Ok(FieldSample {
        region: *region,
        xs,
        ys,
        psi,
        dpsi,
        masked_rows,
    })
}

/// One candidate per grid cell in which both `Re psi` and `Im psi` change
/// sign: the intersection of the two bilinear zero chords. A zero sitting
/// exactly on a grid line fires in every adjacent cell, so candidates are
/// clustered at half a cell diagonal before being returned.
pub fn locate_zeros(field: &FieldSample) -> Vec<Complex64> {
    let mut candidates = Vec::new();
    let masked = |j: usize| field.masked_rows.binary_search(&j).is_ok();
    for j in 0..field.ys.len().saturating_sub(1) {
        if masked(j) || masked(j + 1) {
            continue;
        }
        for i in 0..field.xs.len() - 1 {
            let corners = [
                (
                    Complex64::new(field.xs[i], field.ys[j]),
                    field.psi[j][i],
                ),
                (
                    Complex64::new(field.xs[i + 1], field.ys[j]),
                    field.psi[j][i + 1],
                ),
                (
                    Complex64::new(field.xs[i + 1], field.ys[j + 1]),
                    field.psi[j + 1][i + 1],
                ),
                (
                    Complex64::new(field.xs[i], field.ys[j + 1]),
                    field.psi[j + 1][i],
                ),
            ];
            if let Some(z) = cell_candidate(&corners) {
                candidates.push(z);
            }
        }
    }
    cluster(candidates, 0.5 * field.region.cell_diagonal())
}

/// Greedy clustering: candidates closer than `radius` collapse onto the
/// centroid of their group.
fn cluster(mut points: Vec<Complex64>, radius: f64) -> Vec<Complex64> {
    points.sort_by(|a, b| (a.re, a.im).partial_cmp(&(b.re, b.im)).unwrap());
    let mut out: Vec<(Complex64, usize)> = Vec::new();
    'next: for p in points {
        for (rep, count) in out.iter_mut() {
            if (*rep - p).norm() <= radius {
                let n = *count as f64;
                *rep = (*rep * n + p) / (n + 1.0);
                *count += 1;
                continue 'next;
            }
        }
        out.push((p, 1));
    }
    out.into_iter().map(|(rep, _)| rep).collect()
}

/// Zero chords of the real and imaginary parts across one cell, and their
/// intersection. Returns None unless both parts change sign.
fn cell_candidate(corners: &[(Complex64, Complex64); 4]) -> Option<Complex64> {
    let re_cross = edge_crossings(corners, |v| v.re)?;
    let im_cross = edge_crossings(corners, |v| v.im)?;
    let (p1, p2) = re_cross;
    let (q1, q2) = im_cross;
    let u = p2 - p1;
    let v = q2 - q1;
    let det = u.re * (-v.im) - (-v.re) * u.im;
    let cell_w = (corners[1].0.re - corners[0].0.re).abs();
    let cell_h = (corners[2].0.im - corners[1].0.im).abs();
    let z = if det.abs() < 1e-14 * (u.norm() * v.norm()).max(1e-300) {
        // Chords nearly parallel; fall back to their midpoint cluster.
        0.25 * (p1 + p2 + q1 + q2)
    } else {
        let rhs = q1 - p1;
        let s = (rhs.re * (-v.im) - (-v.re) * rhs.im) / det;
        p1 + u * s
    };
    // Keep candidates that stay within (a slightly padded) cell.
    let x0 = corners[0].0.re - 0.35 * cell_w;
    let x1 = corners[1].0.re + 0.35 * cell_w;
    let y0 = corners[0].0.im - 0.35 * cell_h;
    let y1 = corners[2].0.im + 0.35 * cell_h;
    (z.re >= x0 && z.re <= x1 && z.im >= y0 && z.im <= y1).then_some(z)
}

/// First two sign-change points of `part(psi)` along the cell boundary.
fn edge_crossings(
    corners: &[(Complex64, Complex64); 4],
    part: impl Fn(Complex64) -> f64,
) -> Option<(Complex64, Complex64)> {
    let mut found: Vec<Complex64> = Vec::new();
    for i in 0..4 {
        let (pa, va) = corners[i];
        let (pb, vb) = corners[(i + 1) % 4];
        let (ga, gb) = (part(va), part(vb));
        if ga == 0.0 {
            found.push(pa);
        } else if ga * gb < 0.0 {
            let t = ga / (ga - gb);
            found.push(pa + (pb - pa) * t);
        }
        if found.len() == 2 {
            break;
        }
    }
    (found.len() == 2 && (found[0] - found[1]).norm() > 0.0).then(|| (found[0], found[1]))
}

/// Complex Newton iteration on a user-supplied `(psi, psi')` evaluator.
pub fn refine_zero_with<F>(
    mut f: F,
    x0: Complex64,
    max_iter: usize,
) -> Result<(Complex64, f64), ZeroError>
where
    F: FnMut(Complex64) -> Result<(Complex64, Complex64), ZeroError>,
{
    let mut z = x0;
    for _ in 0..max_iter {
        let (p, dp) = f(z)?;
        if dp.norm() < 1e-14 {
            return Err(ZeroError::DerivativeVanishes { at: z });
        }
        let step = p / dp;
        z -= step;
        if step.norm() <= 1e-13 * (1.0 + z.norm()) {
            let (p, _) = f(z)?;
            return Ok((z, p.norm()));
        }
    }
    Err(ZeroError::NoConvergence {
        after: max_iter,
        at: z,
    })
}

/// Newton refinement with `psi, psi'` obtained by re-integrating from the
/// matching-point state to the current iterate.
pub fn refine_zero(
    pot: &Potential,
    e: f64,
    anchor: &OdeState,
    x0: Complex64,
    tol: &Tolerances,
) -> Result<(Complex64, f64), ZeroError> {
    let anchor = *anchor;
    refine_zero_with(
        move |z| {
            if (z - anchor.x).norm() <= 1e-12 * (1.0 + z.norm()) {
                return Ok((anchor.psi, anchor.dpsi));
            }
            let end = integrate_to_end(pot, e, &Contour::line(anchor.x, z), anchor, tol)?;
            Ok((end.psi, end.dpsi))
        },
        x0,
        30,
    )
}

/// The refined zeros of one eigenfunction.
#[derive(Debug, Clone)]
pub struct ZeroSet {
    pub k: u32,
    pub zeros: Vec<Complex64>,
    pub newton_residuals: Vec<f64>,
}

/// Full zero pipeline for one monomial eigenfunction: grid, cell candidates,
/// Newton polish, then deduplication at a quarter cell.
pub fn locate_eigenfunction_zeros(
    pot: &Potential,
    pair: &Eigenpair,
    wedges: &WedgePair,
    region: &GridRegion,
    tol: &Tolerances,
) -> Result<ZeroSet, ZeroError> {
    let anchor = matching_state(pot, pair, wedges, tol)?;
    let field = evaluate_on_grid_from(pot, pair.e, anchor, region, tol)?;
    let candidates = locate_zeros(&field);
    let min_sep = field.region.cell_diagonal() / 4.0;

    let mut zeros: Vec<Complex64> = Vec::new();
    let mut residuals: Vec<f64> = Vec::new();
    for cand in candidates {
        let (z, r) = match refine_zero(pot, pair.e, &anchor, cand, tol) {
            Ok(ok) => ok,
            // A candidate straddling a cell whose true zero lies just
            // outside the basin can stall; drop it, its own cell's twin
            // candidate will cover the zero.
            Err(ZeroError::NoConvergence { .. }) => continue,
            Err(e) => return Err(e),
        };
        if zeros.iter().all(|w| (w - z).norm() > min_sep) {
            zeros.push(z);
            residuals.push(r);
        }
    }
    let mut order: Vec<usize> = (0..zeros.len()).collect();
    order.sort_by(|&a, &b| {
        (zeros[a].re, zeros[a].im)
            .partial_cmp(&(zeros[b].re, zeros[b].im))
            .unwrap()
    });
    Ok(ZeroSet {
        k: pair.k,
        zeros: order.iter().map(|&i| zeros[i]).collect(),
        newton_residuals: order.iter().map(|&i| residuals[i]).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn region_validation() {
        assert!(GridRegion::new(0.0, 1.0, 0.0, 1.0, 8, 8).is_ok());
        assert!(GridRegion::new(1.0, 0.0, 0.0, 1.0, 8, 8).is_err());
        assert!(GridRegion::new(0.0, 1.0, 0.0, 1.0, 4, 8).is_err());
    }

    #[test]
    fn sine_zeros_found_on_grid() {
        // sin(pi z) has zeros at the integers.
        let region = GridRegion::new(-2.5, 2.5, -0.4, 0.4, 61, 17).unwrap();
        let pi = std::f64::consts::PI;
        let field = FieldSample::from_fn(region, |z| {
            ((pi * z).sin(), pi * (pi * z).cos())
        });
        let mut cands = locate_zeros(&field);
        cands.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap());
        assert_eq!(cands.len(), 5, "candidates {cands:?}");
        for (cand, expect) in cands.iter().zip([-2.0, -1.0, 0.0, 1.0, 2.0]) {
            assert!(
                (cand - c(expect, 0.0)).norm() < 0.1,
                "candidate {cand} for zero {expect}"
            );
        }
    }

    #[test]
    fn quadratic_zeros_found_on_grid() {
        // z^2 + 1 has zeros at +-i.
        let region = GridRegion::new(-1.5, 1.5, -1.5, 1.5, 41, 41).unwrap();
        let field = FieldSample::from_fn(region, |z| (z * z + 1.0, 2.0 * z));
        let cands = locate_zeros(&field);
        assert_eq!(cands.len(), 2, "candidates {cands:?}");
        for cand in &cands {
            let d = (cand - c(0.0, 1.0)).norm().min((cand - c(0.0, -1.0)).norm());
            assert!(d < 0.1, "candidate {cand}");
        }
    }

    #[test]
    fn newton_refines_sine_zero() {
        let pi = std::f64::consts::PI;
        let (z, r) = refine_zero_with(
            |z| Ok(((pi * z).sin(), pi * (pi * z).cos())),
            c(0.9, 0.1),
            30,
        )
        .unwrap();
        assert!((z - c(1.0, 0.0)).norm() < 1e-12, "{z}");
        assert!(r < 1e-12);
    }

    #[test]
    fn newton_refines_quadratic_zero() {
        let (z, r) = refine_zero_with(|z| Ok((z * z + 1.0, 2.0 * z)), c(0.1, 0.9), 30).unwrap();
        assert!((z - c(0.0, 1.0)).norm() < 1e-12, "{z}");
        assert!(r < 1e-12);
    }

    #[test]
    fn vanishing_derivative_is_reported() {
        match refine_zero_with(|_| Ok((Complex64::ONE, Complex64::ZERO)), c(0.0, 0.0), 30) {
            Err(ZeroError::DerivativeVanishes { .. }) => {}
            other => panic!("expected derivative error, got {other:?}"),
        }
    }

    #[test]
    fn double_zero_does_not_converge() {
        // z^2 at z = 0: Newton only halves the iterate, which trips the
        // iteration cap long before the step tolerance.
        match refine_zero_with(|z| Ok((z * z, 2.0 * z)), c(1.0, 0.0), 30) {
            Err(ZeroError::NoConvergence { .. }) => {}
            other => panic!("expected no convergence, got {other:?}"),
        }
    }

    #[test]
    fn from_points_padding() {
        let pts = [c(-1.0, -0.5), c(1.0, -0.5), c(0.0, -1.0)];
        let region = GridRegion::from_points(&pts, 0.2, 21, 11).unwrap();
        assert!(region.re_min < -1.0 && region.re_max > 1.0);
        assert!(region.im_min < -1.0 && region.im_max > -0.5);
    }
}
