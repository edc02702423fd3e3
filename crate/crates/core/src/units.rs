//! Physical constants (CODATA 2018) and unit-system conversion.
//!
//! All internal computations run in natural units (ħ = c = 1, lengths in
//! units of the relevant gap); SI appears only at API boundaries. The
//! conversion factors here are the single source of truth for that boundary.

use thiserror::Error;

use crate::real::Real;

/// Reduced Planck constant (J·s).
pub const HBAR: f64 = 1.054_571_817e-34;
/// Speed of light in vacuum (m/s).
pub const C: f64 = 299_792_458.0;
/// Boltzmann constant (J/K).
pub const KB: f64 = 1.380_649e-23;
/// ħc (J·m).
pub const HBAR_C: f64 = HBAR * C;

/// Immutable bundle of the constants used by the physics modules.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants<R> {
    pub hbar: R,
    pub c: R,
    pub kb: R,
}

impl<R: Real> PhysicalConstants<R> {
    /// CODATA values in SI.
    pub fn codata() -> Self {
        Self {
            hbar: R::lit(HBAR),
            c: R::lit(C),
            kb: R::lit(KB),
        }
    }

    #[inline]
    pub fn hbar_c(&self) -> R {
        self.hbar * self.c
    }
}

impl<R: Real> Default for PhysicalConstants<R> {
    fn default() -> Self {
        Self::codata()
    }
}

/// Dimension tag for [`convert_units`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quantity {
    Length,
    Frequency,
    Energy,
    EnergyPerArea,
    Pressure,
    Temperature,
}

/// A unit system: SI, or natural units (ħ = c = 1) anchored to a length scale.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum UnitSystem<R> {
    Si,
    Natural { length_scale: R },
}

#[derive(Debug, Error, PartialEq)]
pub enum UnitsError {
    #[error("natural-unit length scale must be positive, got {0}")]
    NonpositiveLengthScale(f64),
}

/// SI value of one natural unit of `quantity` at the given length scale.
fn natural_unit_in_si<R: Real>(quantity: Quantity, length_scale: R) -> R {
    let hbar_c = R::lit(HBAR_C);
    let l = length_scale;
    match quantity {
        Quantity::Length => l,
        Quantity::Frequency => R::lit(C) / l,
        Quantity::Energy => hbar_c / l,
        Quantity::EnergyPerArea => hbar_c / (l * l * l),
        Quantity::Pressure => hbar_c / (l * l * l * l),
        Quantity::Temperature => hbar_c / (R::lit(KB) * l),
    }
}

fn si_factor<R: Real>(quantity: Quantity, system: &UnitSystem<R>) -> Result<R, UnitsError> {
    match system {
        UnitSystem::Si => Ok(R::one()),
        UnitSystem::Natural { length_scale } => {
            if *length_scale <= R::zero() || !length_scale.is_finite() {
                return Err(UnitsError::NonpositiveLengthScale(
                    length_scale.to_f64().unwrap_or(f64::NAN),
                ));
            }
            Ok(natural_unit_in_si(quantity, *length_scale))
        }
    }
}

/// Convert `value` of dimension `quantity` between unit systems.
///
/// Round trips are identity to machine precision; zero maps to zero.
pub fn convert_units<R: Real>(
    value: R,
    quantity: Quantity,
    from: &UnitSystem<R>,
    to: &UnitSystem<R>,
) -> Result<R, UnitsError> {
    let f = si_factor(quantity, from)?;
    let t = si_factor(quantity, to)?;
    Ok(value * f / t)
}
