//! Physical constants and unit conversions.
//!
//! Everything inside the crate works in Hartree atomic units
//! (ħ = mₑ = e = 4πε₀ = 1). Conversions happen only at the edges:
//! configuration parsing, report writing and the examples.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// 1 hartree in cm⁻¹.
pub const HARTREE_CM: f64 = 219_474.631_370_5;
/// 1 hartree in eV.
pub const HARTREE_EV: f64 = 27.211_386_245_988;
/// 1 hartree in J.
pub const HARTREE_J: f64 = 4.359_744_722_207_1e-18;
/// 1 bohr in m.
pub const BOHR_M: f64 = 5.291_772_109_03e-11;
/// Atomic unit of time in s.
pub const AU_TIME_S: f64 = 2.418_884_326_5e-17;
/// Boltzmann constant in cm⁻¹/K.
pub const K_B_CM_PER_K: f64 = 0.695_034_76;
/// Speed of light in atomic units.
pub const C_AU: f64 = 137.035_999_084;
/// Vacuum permittivity in atomic units.
pub const EPSILON0_AU: f64 = 1.0 / (4.0 * std::f64::consts::PI);
/// Unified atomic mass unit in electron masses.
pub const AMU_ME: f64 = 1_822.888_486;
/// Mass of ¹³³Cs in u.
pub const CS133_AMU: f64 = 132.905_451_933;
/// Reduced mass of the Cs₂ pair in electron masses (≈ 121135.9).
pub const MU_CS2: f64 = CS133_AMU * AMU_ME / 2.0;

/// ħ in cm⁻¹·s, derived from the table above (≈ 5.30884e-12).
pub const HBAR_CM_S: f64 = AU_TIME_S * HARTREE_CM;

const PS_PER_AU: f64 = AU_TIME_S * 1e12;
/// Atomic unit of energy flux (hartree per a.u. time per bohr²) in W/cm².
const AU_FLUX_W_CM2: f64 = HARTREE_J / AU_TIME_S / (BOHR_M * 100.0 * BOHR_M * 100.0);

#[inline]
pub fn cm_to_hartree(e_cm: f64) -> f64 {
    e_cm / HARTREE_CM
}

#[inline]
pub fn hartree_to_cm(e_h: f64) -> f64 {
    e_h * HARTREE_CM
}

#[inline]
pub fn ps_to_au(t_ps: f64) -> f64 {
    t_ps / PS_PER_AU
}

#[inline]
pub fn au_to_ps(t_au: f64) -> f64 {
    t_au * PS_PER_AU
}

/// k_B·T in hartree.
#[inline]
pub fn thermal_energy(temperature_k: f64) -> f64 {
    cm_to_hartree(K_B_CM_PER_K * temperature_k)
}

/// ħ²k²/2μ in hartree for k in a.u.
#[inline]
pub fn kinetic_energy(k: f64, mass: f64) -> f64 {
    k * k / (2.0 * mass)
}

/// Inverse of [`kinetic_energy`]; returns |k| for a non-negative energy.
#[inline]
pub fn momentum_for_energy(energy: f64, mass: f64) -> f64 {
    (2.0 * mass * energy.max(0.0)).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Dimension {
    Energy,
    Length,
    Time,
    Temperature,
    Intensity,
    Momentum,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Unit {
    Hartree,
    Wavenumber,
    ElectronVolt,
    Joule,
    Bohr,
    Meter,
    AuTime,
    Picosecond,
    Second,
    Kelvin,
    Millikelvin,
    WattPerCm2,
    MegawattPerCm2,
    AuMomentum,
}

impl Unit {
    pub fn dimension(self) -> Dimension {
        use Unit::*;
        match self {
            Hartree | Wavenumber | ElectronVolt | Joule => Dimension::Energy,
            Bohr | Meter => Dimension::Length,
            AuTime | Picosecond | Second => Dimension::Time,
            Kelvin | Millikelvin => Dimension::Temperature,
            WattPerCm2 | MegawattPerCm2 => Dimension::Intensity,
            AuMomentum => Dimension::Momentum,
        }
    }

    /// Multiplier taking a value in this unit to the dimension's base unit
    /// (atomic units, kelvin for temperature).
    fn to_base(self) -> f64 {
        use Unit::*;
        match self {
            Hartree | Bohr | AuTime | Kelvin | AuMomentum => 1.0,
            Wavenumber => 1.0 / HARTREE_CM,
            ElectronVolt => 1.0 / HARTREE_EV,
            Joule => 1.0 / HARTREE_J,
            Meter => 1.0 / BOHR_M,
            Picosecond => 1.0 / PS_PER_AU,
            Second => 1.0 / AU_TIME_S,
            Millikelvin => 1e-3,
            WattPerCm2 => 1.0 / AU_FLUX_W_CM2,
            MegawattPerCm2 => 1e6 / AU_FLUX_W_CM2,
        }
    }

    pub fn symbol(self) -> &'static str {
        use Unit::*;
        match self {
            Hartree => "Eh",
            Wavenumber => "cm^-1",
            ElectronVolt => "eV",
            Joule => "J",
            Bohr => "a0",
            Meter => "m",
            AuTime => "au_t",
            Picosecond => "ps",
            Second => "s",
            Kelvin => "K",
            Millikelvin => "mK",
            WattPerCm2 => "W/cm^2",
            MegawattPerCm2 => "MW/cm^2",
            AuMomentum => "au_p",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Quantity {
    pub value: f64,
    pub unit: Unit,
}

impl Quantity {
    pub const fn new(value: f64, unit: Unit) -> Self {
        Quantity { value, unit }
    }

    pub fn dimension(&self) -> Dimension {
        self.unit.dimension()
    }

    /// Value expressed in the base unit of its dimension.
    pub fn base_value(&self) -> f64 {
        self.value * self.unit.to_base()
    }

    pub fn to(&self, target: Unit) -> Result<Quantity> {
        convert(*self, target)
    }
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.value, self.unit.symbol())
    }
}

pub fn convert(q: Quantity, target: Unit) -> Result<Quantity> {
    let (from, to) = (q.unit.dimension(), target.dimension());
    if from != to {
        return Err(Error::DimensionMismatch { from, to });
    }
    if q.unit == target {
        return Ok(q);
    }
    Ok(Quantity::new(q.base_value() / target.to_base(), target))
}

/// Field amplitude ℰ₀ = √(2I/cε₀) in atomic units.
pub fn field_amplitude(intensity: Quantity) -> Result<f64> {
    if intensity.dimension() != Dimension::Intensity {
        return Err(Error::DimensionMismatch { from: intensity.dimension(), to: Dimension::Intensity });
    }
    let i_au = intensity.base_value();
    if !(i_au > 0.0) {
        return Err(Error::Domain(format!("intensity must be positive, got {intensity}")));
    }
    Ok((2.0 * i_au / (C_AU * EPSILON0_AU)).sqrt())
}

/// Coupling |W_L| = ℰ₀·D/2 for a laser of the given intensity and a
/// transition dipole `dipole_au` (a.u.). Returned in cm⁻¹.
pub fn coupling_from_intensity(intensity: Quantity, dipole_au: f64) -> Result<Quantity> {
    if !(dipole_au > 0.0) {
        return Err(Error::Domain(format!("transition dipole must be positive, got {dipole_au}")));
    }
    let field = field_amplitude(intensity)?;
    Quantity::new(0.5 * field * dipole_au, Unit::Hartree).to(Unit::Wavenumber)
}
