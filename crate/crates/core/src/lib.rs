//! Numerical laboratory for breather solutions of the relativistic
//! wave/action system.
//!
//! The crate constructs closed-form solutions — plane waves, oscillating and
//! spinning breathers, boosted breathers, periodic breather trains, toroidal
//! duct modes, and slowly-varying-field asymptotics — and verifies their
//! claimed properties with independent grid-based numerics: wave-operator and
//! action-form residual convergence, leapfrog time evolution, localization
//! tracking, quantization scans, and characteristic transport.
//!
//! All numerics run in internal natural units (`hbar = m = c = 1`); a
//! [`units::UnitSystem`] converts physical quantities at the boundary. Core
//! math is generic over the scalar type via [`scalar::Real`] (`f32` or
//! `f64`); the concrete `f64` aliases below are what the command-line tools
//! use.

pub mod action;
pub mod advect;
pub mod analytic;
pub mod error;
pub mod evolve;
pub mod grid;
pub mod io;
pub mod potential;
pub mod quantization;
pub mod residual;
pub mod scalar;
pub mod semiclassical;
pub mod special;
pub mod units;
pub mod vec3;

pub use action::{action_from_psi, ActionValue};
pub use error::{Error, Result};
pub use grid::{eval_on_grid, Axis, ComplexField, Grid, SampledAxis, SpacetimePoint};
pub use scalar::{Cx, Real};

/// Double-precision complex sample.
pub type C64 = Cx<f64>;
/// Double-precision spacetime event.
pub type Point64 = SpacetimePoint<f64>;
/// Double-precision grid.
pub type Grid64 = Grid<f64>;
/// Double-precision field.
pub type Field64 = ComplexField<f64>;
/// Double-precision action sample.
pub type Action64 = ActionValue<f64>;
/// Double-precision unit system.
pub type Units64 = units::UnitSystem<f64>;
