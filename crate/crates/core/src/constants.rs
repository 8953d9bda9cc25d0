//! Physical constants (CODATA 2018 exact and recommended values, SI units).

use std::f64::consts::PI;

/// Set of physical constants used throughout the crate.
///
/// All values are SI. The defaults are CODATA 2018; [`PhysicalConstants::hamaker`]
/// is a material property and defaults to the generic `1e-19 J`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    /// Reduced Planck constant, J s.
    pub hbar: f64,
    /// Newtonian constant of gravitation, m³ kg⁻¹ s⁻².
    pub g: f64,
    /// Boltzmann constant, J K⁻¹.
    pub k_b: f64,
    /// Speed of light in vacuum, m s⁻¹.
    pub c: f64,
    /// Atomic mass constant, kg. Also used as the nucleon mass.
    pub amu: f64,
    /// Electron mass, kg.
    pub m_electron: f64,
    /// Planck mass `sqrt(hbar c / G)`, kg.
    pub m_planck: f64,
    /// Hamaker constant, J.
    pub hamaker: f64,
}

impl PhysicalConstants {
    pub const CODATA_2018: PhysicalConstants = PhysicalConstants {
        hbar: 1.054_571_817e-34,
        g: 6.674_30e-11,
        k_b: 1.380_649e-23,
        c: 299_792_458.0,
        amu: 1.660_539_066_60e-27,
        m_electron: 9.109_383_701_5e-31,
        m_planck: 2.176_434e-8,
        hamaker: 1e-19,
    };

    /// Planck constant `h = 2π ħ`.
    pub fn h(&self) -> f64 {
        2.0 * PI * self.hbar
    }

    /// Reduced Planck mass `sqrt(ħ c / 8π G)`.
    pub fn reduced_planck_mass(&self) -> f64 {
        (self.hbar * self.c / (8.0 * PI * self.g)).sqrt()
    }
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self::CODATA_2018
    }
}

/// The constants the engine runs with.
pub const SI: PhysicalConstants = PhysicalConstants::CODATA_2018;

/// Standard atmosphere, Pa.
pub const ATMOSPHERE: f64 = 101_325.0;

/// Reference temperature for "atmospheric" number density, K.
pub const ROOM_TEMPERATURE: f64 = 293.15;

/// Mean molecular mass of air in atomic mass units.
pub const AIR_MOLECULE_AMU: f64 = 28.97;
