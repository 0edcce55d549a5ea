//! Eigenvalues of `y'''' + (p y')' + q y = λ y` on [0, 1] with
//! `y'(0) = y'''(0) + p(0) y'(0) = y(1) = y''(1) = 0` and 1-periodic `p`, `q`.
//!
//! ```no_run
//! use quartic_core::coefficients::PeriodicCoefficient;
//! use quartic_core::spectrum::{solve_range, SearchPlan};
//!
//! let p = PeriodicCoefficient::sine(1, 1.0);
//! let q = PeriodicCoefficient::cosine(1, 1.0);
//! let plan = SearchPlan::new(0, 10);
//! for rec in solve_range(&p, &q, &plan).unwrap() {
//!     println!("{} {:.12}", rec.index, rec.mu);
//! }
//! ```
#![allow(clippy::needless_range_loop)]

pub mod asymptotics;
pub mod birkhoff;
pub mod characteristic;
pub mod coefficients;
mod integrator;
pub mod ode;
pub mod par;
pub mod quadrature;
pub mod scalar;
pub mod spectrum;

pub use characteristic::{char_det, char_det_unperturbed, z_of_lambda, CharValue};
pub use coefficients::{FourierRecord, Harmonic, PeriodicCoefficient};
pub use integrator::{IntegrationFailure, IntegrationStats};
pub use ode::{integrate_fundamental, wronskian_drift, OdeError, OdeOptions, ScaledTransferMatrix};
pub use par::Execution;
pub use scalar::Precision;
pub use spectrum::{EigenvalueRecord, SearchPlan, SpectrumError};
