//! Complex Sturm-Liouville eigenproblems for PT-symmetric potentials.
//!
//! The library computes real spectra of the non-Hermitian Hamiltonians
//! `p^2 - (ix)^N` and a quasi-exactly-solvable quartic family by shooting
//! along contours in the complex plane, locates the complex zeros of the
//! eigenfunctions, and quantifies how the zero sets interlace and collapse
//! onto an arch-shaped band once turning-point scalings are applied.
//!
//! Modules follow the processing pipeline:
//!
//! * [`potentials`] — potential families, PT symmetry, classical turning points
//! * [`ode`] — adaptive Runge-Kutta integration of `psi'' = (V - E) psi`
//!   along piecewise-linear complex contours
//! * [`shooting`] — two-sided shooting from Stokes wedges, real spectra
//! * [`qes`] — the algebraic sector of the quartic family: exact energies,
//!   polynomial factors, and their zeros
//! * [`zeros`] — grid + level-curve + Newton location of eigenfunction zeros
//! * [`wkb`] — action integrals, quantization, Stokes-line tracing,
//!   turning-point drift
//! * [`fits`] — power-law fits and Richardson extrapolation
//! * [`interlace`] — scaling maps, interlacing verdicts, band/shift metrics
//! * [`report`] — run configuration, pipeline orchestration, CSV/JSON/SVG
//!   emission

pub mod fits;
pub mod interlace;
pub mod ode;
pub mod poly;
pub mod potentials;
pub mod qes;
pub mod quad;
pub mod report;
pub mod shooting;
pub mod wkb;
pub mod zeros;

pub use num_complex::Complex64;
