//! Pseudospectral simulation and verification kernels for the third-order
//! nonlinear acoustics model of Jordan-Moore-Gibson-Thompson type.
//!
//! The crate provides, on a periodic box:
//!
//! * spectral transforms, Fourier multipliers, smooth frequency cutoffs and
//!   norm quadrature ([`grid`], [`field`], [`spectral`]);
//! * the first-order evolution system and its quadratic nonlinearity
//!   ([`dynamics`]);
//! * exact per-mode linear propagation and an IMEX scheme ([`stepping`]);
//! * the energy / dissipation functional ladder with negative-order
//!   variants and the nonlinear-estimate integrals ([`energy`]);
//! * per-frequency linear theory: characteristic roots, stability maps,
//!   decay envelopes, Lyapunov certification, radial quadrature ([`modes`]);
//! * scripted decay / boundedness / bootstrap experiments ([`experiments`]);
//! * empirical interpolation-inequality checks ([`inequality`]);
//! * a deterministic binary field format ([`fieldio`]).

// `!(x > 0.0)` guards are deliberate (NaN must fail validation) and the
// index loops couple several same-shaped arrays by axis position
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![allow(clippy::needless_range_loop)]

pub mod dynamics;
pub mod energy;
pub mod error;
pub mod experiments;
pub mod field;
pub mod fieldio;
pub mod grid;
pub mod inequality;
pub mod linalg;
pub mod modes;
pub mod spectral;
pub mod stepping;

pub use dynamics::{Params, SpectralState, StateVector, VVector};
pub use error::{Error, Result};
pub use field::{forward_transform, inverse_transform, RealField, SpectralField};
pub use grid::{GridSpec, WavenumberLattice};
pub use spectral::{CutoffSpec, LpExponent, ZeroMode};
