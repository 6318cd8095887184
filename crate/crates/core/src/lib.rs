//! Numerical variational toolkit for the planar gauged Schrodinger system in
//! the zero-mass regime.
//!
//! The system couples a real scalar field u on R^2 to Chern-Simons gauge
//! components (A0, A1, A2) determined from u by first-order constraints. The
//! natural energy space carries the norm sqrt(|grad u|_2^2 + |u|_p^2) with
//! 1 < p < 2, and ground states minimize the energy functional over the
//! Nehari manifold.
//!
//! What lives where:
//!
//! * [`fields`] - 2D grids, quadrature, norms, field I/O
//! * [`radial`] - radial grids and trapezoid machinery for 1D reductions
//! * [`gauge`] - gauge components by zero-padded FFT convolution, constraint
//!   residuals, radial closed forms
//! * [`nonlinearity`] - critical-growth families, the Young function,
//!   hypothesis checkers
//! * [`functional`] - energy breakdown, Frechet gradient, Nehari residual
//! * [`solver`] - Nehari projection, ground-state descent, potential
//!   comparison
//! * [`moser`] - log-profile probes for the Trudinger-Moser functional
//! * [`config`] / [`report`] - run configuration and deterministic reports

pub mod config;
pub mod error;
pub mod fields;
pub mod functional;
pub mod gauge;
pub mod moser;
pub mod nonlinearity;
pub mod radial;
pub mod report;
pub mod solver;

pub use error::{Error, Result};
pub use fields::{Field2D, Grid2D, NormPack};
pub use functional::{EnergyBreakdown, PotentialSpec};
pub use gauge::{GaugeFields, RadialGauge};
pub use moser::{MoserProbe, TmTable};
pub use nonlinearity::{NonlinearitySpec, YoungParams};
pub use radial::{RadialField, RadialGrid};
pub use solver::{CompareReport, NehariResult, SolveConfig, SolveReport};
