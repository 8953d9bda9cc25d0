//! Nanosphere and environment specifications, and the Gaussian
//! centre-of-mass wavefunction
//!
//! ```text
//! psi(x) = exp(-A r² + B·x + C)
//! ```
//!
//! with complex `A` (m⁻²), complex 3-vector `B` (m⁻¹) and complex `C`.
//!
//! The spread of a state is the full three-dimensional second moment about
//! the state's own centre, `spread² = <|x - centre|²> = 3 / (4 Re A)`. Every
//! formula in the crate that mentions `<r²>` or a "spread" uses this
//! convention; per-axis variances are `1 / (4 Re A)`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::constants::{AIR_MOLECULE_AMU, ATMOSPHERE, ROOM_TEMPERATURE, SI};
use crate::error::{Error, Result};

pub type Vec3 = [f64; 3];
pub type CVec3 = [Complex64; 3];

pub(crate) fn dot(a: &Vec3, b: &Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub(crate) fn norm(a: &Vec3) -> f64 {
    dot(a, a).sqrt()
}

/// A homogeneous solid sphere.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NanosphereSpec {
    /// Radius, m.
    pub radius: f64,
    /// Mass density, kg m⁻³.
    pub density: f64,
    /// Internal (bulk) temperature, K.
    pub internal_temperature: f64,
}

impl NanosphereSpec {
    /// Silicate-like density used for the reference tables, kg m⁻³.
    pub const SILICATE_DENSITY: f64 = 2600.0;
    /// Density of gold as used in the gold scenarios, kg m⁻³.
    pub const GOLD_DENSITY: f64 = 20000.0;
    /// Default internal temperature, K.
    pub const DEFAULT_INTERNAL_TEMPERATURE: f64 = 2000.0;

    pub fn new(radius: f64, density: f64) -> Result<Self> {
        let s = NanosphereSpec {
            radius,
            density,
            internal_temperature: Self::DEFAULT_INTERNAL_TEMPERATURE,
        };
        s.validate()?;
        Ok(s)
    }

    /// Sphere of the given radius whose density is chosen to produce `mass`.
    pub fn from_mass(radius: f64, mass: f64) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(Error::domain(format!("radius must be positive, got {radius}")));
        }
        Self::new(radius, mass / (4.0 / 3.0 * PI * radius.powi(3)))
    }

    pub fn with_internal_temperature(mut self, t: f64) -> Result<Self> {
        self.internal_temperature = t;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.radius > 0.0 && self.radius.is_finite()) {
            return Err(Error::domain(format!("radius must be positive, got {}", self.radius)));
        }
        if !(self.density > 0.0 && self.density.is_finite()) {
            return Err(Error::domain(format!("density must be positive, got {}", self.density)));
        }
        if !(self.internal_temperature >= 0.0) {
            return Err(Error::domain(format!(
                "internal_temperature must be non-negative, got {}",
                self.internal_temperature
            )));
        }
        Ok(())
    }

    /// `M = (4/3) π R³ ρ`.
    pub fn mass(&self) -> f64 {
        4.0 / 3.0 * PI * self.radius.powi(3) * self.density
    }

    /// Number of nucleons `N = M / u`.
    pub fn nucleon_count(&self) -> f64 {
        self.mass() / SI.amu
    }
}

/// Residual gas and thermal radiation surrounding the sphere.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnvironmentSpec {
    /// Gas temperature, K.
    pub gas_temperature: f64,
    /// Gas pressure, Pa.
    pub gas_pressure: f64,
    /// Mass of one gas molecule, kg.
    pub gas_molecule_mass: f64,
    /// Temperature of the thermal radiation bath, K.
    pub environment_temperature: f64,
}

impl EnvironmentSpec {
    /// Gas number density of the default ultra-high vacuum: 1e-17 of the
    /// atmospheric density at room temperature (a few hundred molecules per cm³).
    pub fn low_density() -> f64 {
        1e-17 * ATMOSPHERE / (SI.k_b * ROOM_TEMPERATURE)
    }

    /// Cryogenic ultra-high vacuum at temperature `t`: air at
    /// [`EnvironmentSpec::low_density`], radiation bath at the same temperature.
    pub fn cryogenic(t: f64) -> Self {
        EnvironmentSpec {
            gas_temperature: t,
            gas_pressure: Self::low_density() * SI.k_b * t,
            gas_molecule_mass: AIR_MOLECULE_AMU * SI.amu,
            environment_temperature: t,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("gas_temperature", self.gas_temperature),
            ("gas_pressure", self.gas_pressure),
            ("gas_molecule_mass", self.gas_molecule_mass),
            ("environment_temperature", self.environment_temperature),
        ];
        for (name, v) in fields {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::domain(format!("{name} must be non-negative, got {v}")));
            }
        }
        if self.gas_pressure > 0.0 && !(self.gas_temperature > 0.0) {
            return Err(Error::domain("gas_temperature must be positive when gas_pressure > 0"));
        }
        Ok(())
    }

    /// Mean molecular speed `sqrt(8 k_B T / (π m_a))`.
    pub fn mean_gas_speed(&self) -> f64 {
        (8.0 * SI.k_b * self.gas_temperature / (PI * self.gas_molecule_mass)).sqrt()
    }
}

impl Default for EnvironmentSpec {
    /// The 16 K deep-space setting.
    fn default() -> Self {
        Self::cryogenic(16.0)
    }
}

/// Complex Gaussian centre-of-mass wavefunction `exp(-A r² + B·x + C)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianState {
    a: Complex64,
    b: CVec3,
    c: Complex64,
    valid_norm: bool,
}

impl GaussianState {
    /// Builds a state from raw parameters. `C` is taken as given; call
    /// [`GaussianState::normalized`] to fix its real part.
    pub fn from_raw(a: Complex64, b: CVec3, c: Complex64) -> Result<Self> {
        check_a(a)?;
        if !b.iter().chain([&c]).all(|z| z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::domain("non-finite B or C"));
        }
        let mut s = GaussianState {
            a,
            b,
            c,
            valid_norm: false,
        };
        s.valid_norm = (s.c.re - s.normalizing_re_c()).abs() <= 1e-12 * (1.0 + s.c.re.abs());
        Ok(s)
    }

    /// Normalized state with the given `A`, centre (m), momentum (kg m s⁻¹) and
    /// global phase.
    pub fn from_moments(a: Complex64, centre: Vec3, momentum: Vec3, phase: f64) -> Result<Self> {
        check_a(a)?;
        let b = std::array::from_fn(|i| 2.0 * a * centre[i] + Complex64::i() * (momentum[i] / SI.hbar));
        let s = GaussianState {
            a,
            b,
            c: Complex64::new(0.0, phase),
            valid_norm: false,
        };
        Ok(s.normalized())
    }

    pub fn a(&self) -> Complex64 {
        self.a
    }

    pub fn b(&self) -> CVec3 {
        self.b
    }

    pub fn c(&self) -> Complex64 {
        self.c
    }

    /// Whether `Re C` currently normalizes the state.
    pub fn valid_norm(&self) -> bool {
        self.valid_norm
    }

    fn normalizing_re_c(&self) -> f64 {
        let ra = self.a.re;
        let sum_b2: f64 = self.b.iter().map(|b| b.re * b.re).sum();
        -0.75 * (PI / (2.0 * ra)).ln() - sum_b2 / (4.0 * ra)
    }

    /// Same state with `Re C` set so that `∫|psi|² = 1`. Leaves every
    /// observable unchanged.
    pub fn normalized(mut self) -> Self {
        self.c.re = self.normalizing_re_c();
        self.valid_norm = true;
        self
    }

    /// `<|x - centre|²> = 3 / (4 Re A)`, m².
    pub fn spread_squared(&self) -> f64 {
        0.75 / self.a.re
    }

    /// Root-mean-square extent about the centre, m.
    pub fn spread(&self) -> f64 {
        self.spread_squared().sqrt()
    }

    /// Per-axis position variance `1 / (4 Re A)`, m².
    pub fn axis_variance(&self) -> f64 {
        0.25 / self.a.re
    }

    /// `<x>_i = Re B_i / (2 Re A)`, m.
    pub fn centre(&self) -> Vec3 {
        std::array::from_fn(|i| self.b[i].re / (2.0 * self.a.re))
    }

    /// `<p>_i = ħ Im(B_i - 2 A <x>_i)`, kg m s⁻¹.
    pub fn momentum(&self) -> Vec3 {
        let mu = self.centre();
        std::array::from_fn(|i| SI.hbar * (self.b[i] - 2.0 * self.a * mu[i]).im)
    }

    /// Mean velocity `<p> / M`, m s⁻¹.
    pub fn mean_velocity(&self, sphere: &NanosphereSpec) -> Vec3 {
        let m = sphere.mass();
        self.momentum().map(|p| p / m)
    }

    /// Wavefunction value at `x` (only meaningful for moderate exponents).
    pub fn psi(&self, x: Vec3) -> Complex64 {
        let r2 = dot(&x, &x);
        let bx: Complex64 = (0..3).map(|i| self.b[i] * x[i]).sum();
        (-self.a * r2 + bx + self.c).exp()
    }
}

fn check_a(a: Complex64) -> Result<()> {
    if !(a.re > 0.0 && a.re.is_finite() && a.im.is_finite()) {
        return Err(Error::domain(format!("Re A must be positive and finite, got {a}")));
    }
    Ok(())
}

/// Real-`A` Gaussian with the requested spread (m), centre (m) and mean
/// velocity (m s⁻¹), normalized.
pub fn make_gaussian(spread: f64, centre: Vec3, velocity: Vec3, sphere: &NanosphereSpec) -> Result<GaussianState> {
    if !(spread > 0.0 && spread.is_finite()) {
        return Err(Error::domain(format!("spread must be positive, got {spread}")));
    }
    let a = Complex64::new(0.75 / (spread * spread), 0.0);
    let m = sphere.mass();
    GaussianState::from_moments(a, centre, velocity.map(|v| m * v), 0.0)
}
