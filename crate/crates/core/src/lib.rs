//! Casimir energies and forces along three mutually checking routes.
//!
//! * [`modesum`] -- regularized vacuum mode summation for ideal-mirror
//!   cavities, with explicit bookkeeping of the divergent pieces.
//! * [`lifshitz`] -- Lifshitz theory for planar dielectric half-spaces at
//!   zero and finite temperature, built on the dielectric response models in
//!   [`dielectric`].
//! * [`polariton`] -- an exactly solvable coupled field-matter lattice whose
//!   ground-state energy differences reproduce Casimir-like attraction.
//!
//! All numerics are generic over the scalar type through [`real::Real`]
//! (`f32` or `f64`); the `*64`/`*32` aliases at the crate root pin the common
//! concrete choices. SI units are used at every public boundary (see
//! [`units`]).

pub mod dielectric;
pub mod fit;
pub mod lifshitz;
pub mod modesum;
pub mod polariton;
pub mod quad;
pub mod real;
pub mod units;

pub use dielectric::{DielectricError, DielectricModel, TabulatedData, TailModel};
pub use lifshitz::{
    LifshitzError, LifshitzResult, PlanarCavity, Polarization, StressConvention,
};
pub use modesum::{Geometry, ModeSumError, ModeSumResult, Regulator};
pub use polariton::{
    Boundary, CouplingForm, Defect, LatticeModel, PolaritonError, SeparationFamily,
    SpectrumResult,
};
pub use real::Real;
pub use units::{convert_units, PhysicalConstants, Quantity, UnitSystem, UnitsError};

/// Double-precision aliases for the common entry types.
pub type DielectricModel64 = DielectricModel<f64>;
pub type PlanarCavity64 = PlanarCavity<f64>;
pub type LifshitzResult64 = LifshitzResult<f64>;
pub type Regulator64 = Regulator<f64>;
pub type ModeSumResult64 = ModeSumResult<f64>;
pub type LatticeModel64 = LatticeModel<f64>;
pub type SeparationFamily64 = SeparationFamily<f64>;

/// Single-precision aliases (mostly useful for quick surveys; the default
/// tolerances assume `f64`).
pub type DielectricModel32 = DielectricModel<f32>;
pub type PlanarCavity32 = PlanarCavity<f32>;
pub type Regulator32 = Regulator<f32>;
pub type LatticeModel32 = LatticeModel<f32>;
