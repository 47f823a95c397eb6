//! Piecewise-linear machinery for α-dissipative Hunter–Saxton dynamics.
//!
//! The crate follows the projection → Lagrangian-evolution → recovery pipeline:
//!
//! * [`eulerian`] — wave profiles, energy measures and admissibility checks,
//! * [`projection`] — the energy-preserving piecewise-linear projection onto
//!   a uniform mesh,
//! * [`lagrangian`] — the transform to characteristic coordinates and back,
//! * [`evolution`] — exact-in-time evolution of the characteristic grid with
//!   position-dependent energy dissipation,
//! * [`analysis`] — the rescaling pair aligning exact and projected
//!   characteristics, with per-cell singular-mass bookkeeping,
//! * [`exact`] — closed-form reference solutions and built-in example data,
//! * [`convergence`] — relative errors, experimental convergence orders and
//!   log-log least-squares fits.
//!
//! The crate is `no_std`-compatible (with `alloc`); disable the default
//! `std` feature for embedded or wasm use. All floating-point transcendentals
//! go through `libm`, so results do not depend on the platform's libm.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod analysis;
pub mod convergence;
pub mod error;
pub mod eulerian;
pub mod evolution;
pub mod exact;
pub mod lagrangian;
mod math;
pub mod projection;
pub mod pwl;

pub use error::{Error, Result};
pub use eulerian::{AlphaFunction, EnergyMeasure, InitialData, WaveProfile};
pub use evolution::Trajectory;
pub use lagrangian::{EulerianSolution, LagrangianGrid};
pub use projection::ProjectedData;
pub use pwl::PiecewiseLinearFn;
