//! Particle (DEM) and continuum simulation of drifting sea-ice floes.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod contact;
pub mod diagnostics;
pub mod distributions;
pub mod error;
pub mod hydro;
pub mod integrator;
pub mod model;
pub mod neighbor;
pub mod ocean;
pub mod output;
pub mod runner;
pub mod scenario;

pub use error::{FloeError, Result};
pub use model::{Domain, Ensemble, Floe, PhysParams, Vec2};
