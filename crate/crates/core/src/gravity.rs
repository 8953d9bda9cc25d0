//! Self-gravity of a homogeneous sphere: the effective pair potential, the
//! spread-dependent spring constant of the Gaussian scheme, bound states and
//! the nucleus-scale structural correction.
//!
//! Internally everything is written in units of the radius `R` and of
//! `G M² / R` (energies) or `G M² / R³` (spring constants). The single
//! dimensionless coupling that survives is
//!
//! ```text
//! g = G M³ R / ħ²
//! ```
//!
//! which is the ratio of the self-gravitational energy to the kinetic energy
//! of a packet of size `R`.

use serde::{Deserialize, Serialize};

use crate::constants::SI;
use crate::error::{Error, Result};
use crate::state::{GaussianState, NanosphereSpec};

/// `G M³ R / ħ²` for the given sphere.
pub fn coupling(sphere: &NanosphereSpec) -> f64 {
    let m = sphere.mass();
    SI.g * m * m * m * sphere.radius / (SI.hbar * SI.hbar)
}

/// Short-distance potential in units of `G M² / R`, `x = d / R ≤ 2`.
fn v_short(x: f64) -> f64 {
    let x2 = x * x;
    -1.2 + 0.5 * x2 - 3.0 / 16.0 * x2 * x + x2 * x2 * x / 160.0
}

/// Short-distance spring constant in units of `G M² / R³`, `x ≤ 2`.
fn kappa_short(x: f64) -> f64 {
    1.0 - 9.0 / 16.0 * x + x * x * x / 32.0
}

/// Mutual gravitational energy of two copies of the sphere whose centres are
/// `d` apart, J.
pub fn v_eff(d: f64, sphere: &NanosphereSpec) -> Result<f64> {
    if !(d >= 0.0) {
        return Err(Error::domain(format!("separation must be non-negative, got {d}")));
    }
    let m = sphere.mass();
    let e = SI.g * m * m / sphere.radius;
    let x = d / sphere.radius;
    Ok(if x <= 2.0 { e * v_short(x) } else { -e / x })
}

/// Spring-constant law `k(<r²>)` with an optional structural amplification
/// of the short-distance branch.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpringModel {
    pub sphere: NanosphereSpec,
    /// Factor multiplying the `√<r²> ≤ 2R` branch; 1 means none.
    pub amplification: f64,
}

impl SpringModel {
    pub fn new(sphere: NanosphereSpec) -> Self {
        SpringModel {
            sphere,
            amplification: 1.0,
        }
    }

    pub fn with_amplification(sphere: NanosphereSpec, amplification: f64) -> Result<Self> {
        if !(amplification >= 1.0 && amplification.is_finite()) {
            return Err(Error::domain(format!(
                "amplification must be >= 1, got {amplification}"
            )));
        }
        Ok(SpringModel { sphere, amplification })
    }

    /// Separation at which the two branches meet, `2R`.
    pub fn crossover(&self) -> f64 {
        2.0 * self.sphere.radius
    }

    /// Spring constant in units of `G M² / R³` as a function of `√<r²> / R`.
    pub fn kappa(&self, x: f64) -> f64 {
        if x <= 2.0 {
            self.amplification * kappa_short(x)
        } else {
            1.0 / (x * x * x)
        }
    }

    /// Conserved potential in units of `G M² / R` as a function of `√<r²> / R`.
    pub fn v_cons_scaled(&self, x: f64) -> f64 {
        if x <= 2.0 {
            self.amplification * (v_short(x) - v_short(2.0)) - 0.5
        } else {
            -1.0 / x
        }
    }

    /// `k(<r²>)` in N m⁻¹ without input checks.
    pub fn k(&self, r2: f64) -> f64 {
        let m = self.sphere.mass();
        let r = self.sphere.radius;
        SI.g * m * m / (r * r * r) * self.kappa(r2.sqrt() / r)
    }
}

/// Spring constant of the harmonic approximation to self-gravity at second
/// moment `r2`, N m⁻¹.
pub fn spring_k(r2: f64, model: &SpringModel) -> Result<f64> {
    if !(r2 >= 0.0) {
        return Err(Error::domain(format!("<r²> must be non-negative, got {r2}")));
    }
    Ok(model.k(r2))
}

/// Potential whose `<r²>`-derivative is `k / 2`, J. Without amplification it
/// coincides with `v_eff(√r2)`; with amplification the constant is fixed by
/// continuity at the crossover and the Coulomb tail.
pub fn v_cons(r2: f64, model: &SpringModel) -> Result<f64> {
    if !(r2 >= 0.0) {
        return Err(Error::domain(format!("<r²> must be non-negative, got {r2}")));
    }
    let m = model.sphere.mass();
    let r = model.sphere.radius;
    Ok(SI.g * m * m / r * model.v_cons_scaled(r2.sqrt() / r))
}

/// Kinetic energy of the packet about its own centre plus the conserved
/// self-gravitational potential, J. Depends on `A` only.
pub fn conserved_energy(state: &GaussianState, model: &SpringModel) -> f64 {
    let a = state.a();
    let m = model.sphere.mass();
    let kinetic = 1.5 * SI.hbar * SI.hbar / m * a.norm_sqr() / a.re;
    let r = model.sphere.radius;
    let x = state.spread() / r;
    kinetic + SI.g * m * m / r * model.v_cons_scaled(x)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GravityRegime {
    /// Spread well inside the sphere.
    Macroscopic,
    Mesoscopic,
    /// Spread beyond `2R`: the sphere behaves like a point mass.
    SingleParticle,
}

impl GravityRegime {
    /// Classifies a spread relative to the crossover `2R`; "macroscopic" means
    /// at least ten times smaller.
    pub fn classify(spread: f64, radius: f64) -> Self {
        if spread >= 2.0 * radius {
            GravityRegime::SingleParticle
        } else if spread <= 0.2 * radius {
            GravityRegime::Macroscopic
        } else {
            GravityRegime::Mesoscopic
        }
    }
}

/// Stationary Gaussian of the self-gravitating scheme.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundState {
    /// m
    pub spread: f64,
    /// Real `A`, m⁻².
    pub a_static: f64,
    /// J
    pub energy: f64,
    pub regime: GravityRegime,
}

impl BoundState {
    /// The bound state as a normalized wavefunction at rest at the origin.
    pub fn state(&self) -> GaussianState {
        GaussianState::from_moments(num_complex::Complex64::new(self.a_static, 0.0), [0.0; 3], [0.0; 3], 0.0)
            .expect("bound state has positive A")
    }
}

/// Residual of the fixed-point condition in scaled form,
/// `a - sqrt(g κ(√(3/(4a)))) / 2` with `a = A R²`.
fn fixed_point_residual(model: &SpringModel, g: f64, a: f64) -> f64 {
    let x = (0.75 / a).sqrt();
    a - 0.5 * (g * model.kappa(x)).sqrt()
}

/// Bisection on `ln a` over `[lo, hi]` where the residual changes sign.
fn bisect_log(model: &SpringModel, g: f64, mut lo: f64, mut hi: f64) -> Result<f64> {
    let mut f_lo = fixed_point_residual(model, g, lo);
    let f_hi = fixed_point_residual(model, g, hi);
    if f_lo.signum() == f_hi.signum() {
        return Err(Error::numeric(
            0.0,
            format!("bound state not bracketed: residual {f_lo:e} at a={lo:e}, {f_hi:e} at a={hi:e}"),
        ));
    }
    for _ in 0..400 {
        let mid = (lo * hi).sqrt();
        if hi / lo - 1.0 < 1e-14 {
            return Ok(mid);
        }
        let f = fixed_point_residual(model, g, mid);
        if f == 0.0 {
            return Ok(mid);
        }
        if f.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f;
        } else {
            hi = mid;
        }
    }
    Err(Error::numeric(
        0.0,
        format!("bound-state bisection stalled in [{lo:e}, {hi:e}]"),
    ))
}

fn bound_state_from_scaled(model: &SpringModel, a: f64) -> BoundState {
    let r = model.sphere.radius;
    let a_static = a / (r * r);
    let spread = (0.75 / a_static).sqrt();
    let state = GaussianState::from_moments(num_complex::Complex64::new(a_static, 0.0), [0.0; 3], [0.0; 3], 0.0)
        .expect("positive A");
    BoundState {
        spread,
        a_static,
        energy: conserved_energy(&state, model),
        regime: GravityRegime::classify(spread, r),
    }
}

/// Self-consistent stationary state `A = sqrt(k(3/(4A)) M) / (2ħ)`.
pub fn bound_state(model: &SpringModel) -> Result<BoundState> {
    let g = coupling(&model.sphere);
    // closed-form roots of the two asymptotic branches bracket the solution
    let a_single = 4.0 / 27.0 * g * g;
    let a_macro = 0.5 * (g * model.amplification).sqrt();
    let lo = a_single.min(a_macro) * 1e-2;
    let hi = a_single.max(a_macro) * 1e2;
    let a = bisect_log(model, g, lo, hi)?;
    Ok(bound_state_from_scaled(model, a))
}

/// Bound state restricted to spreads at or below the crossover, if one exists.
fn bound_state_short_branch(model: &SpringModel) -> Result<Option<BoundState>> {
    let g = coupling(&model.sphere);
    let a_cross = 3.0 / 16.0;
    if fixed_point_residual(model, g, a_cross) > 0.0 {
        return Ok(None);
    }
    let hi = (0.5 * (g * model.amplification).sqrt()).max(a_cross) * 1e2;
    bisect_log(model, g, a_cross, hi).map(|a| Some(bound_state_from_scaled(model, a)))
}

/// Critical decoherence strength and the two closed-form estimates for it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalLambda {
    /// `k(<r²_BS>) / (2ħ)` at the solved bound state, m⁻² s⁻¹.
    pub solved: f64,
    /// `G⁴ M¹¹ / ħ⁷`.
    pub single_particle_estimate: f64,
    /// `G M² / (R³ ħ)`.
    pub macroscopic_estimate: f64,
    pub regime: GravityRegime,
}

impl CriticalLambda {
    /// Closed-form estimate appropriate to the bound-state regime
    /// (the single-particle law for single-particle bound states, the
    /// short-distance law otherwise).
    pub fn estimate(&self) -> f64 {
        match self.regime {
            GravityRegime::SingleParticle => self.single_particle_estimate,
            _ => self.macroscopic_estimate,
        }
    }
}

pub fn critical_lambda(model: &SpringModel) -> Result<CriticalLambda> {
    let bs = bound_state(model)?;
    let m = model.sphere.mass();
    let r = model.sphere.radius;
    let (g, hbar) = (SI.g, SI.hbar);
    Ok(CriticalLambda {
        solved: model.k(bs.spread * bs.spread) / (2.0 * hbar),
        single_particle_estimate: g.powi(4) * m.powi(11) / hbar.powi(7),
        macroscopic_estimate: g * m * m / (r * r * r * hbar),
        regime: bs.regime,
    })
}

/// Point-like concentration of mass inside the sphere (an atomic nucleus
/// smeared over its zero-point motion).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NucleusSpec {
    /// kg
    pub mass: f64,
    /// m
    pub radius: f64,
}

impl NucleusSpec {
    pub const DEFAULT_RADIUS: f64 = 5e-12;

    pub fn new(mass: f64, radius: f64) -> Result<Self> {
        if !(mass > 0.0 && radius > 0.0) {
            return Err(Error::domain(format!(
                "nucleus mass and radius must be positive, got {mass}, {radius}"
            )));
        }
        Ok(NucleusSpec { mass, radius })
    }
}

impl Default for NucleusSpec {
    /// Radius 5e-12 m with a mass giving a density 8000 times that of a
    /// 2600 kg m⁻³ solid.
    fn default() -> Self {
        let r = Self::DEFAULT_RADIUS;
        NucleusSpec {
            mass: 8000.0 * 2600.0 * 4.0 / 3.0 * std::f64::consts::PI * r * r * r,
            radius: r,
        }
    }
}

/// Ratio of the nuclear to the bulk mass density, `(m/r³) / (M/R³)`.
pub fn structural_amplification(sphere: &NanosphereSpec, nucleus: &NucleusSpec) -> f64 {
    (nucleus.mass / nucleus.radius.powi(3)) / (sphere.mass() / sphere.radius.powi(3))
}

/// Bound states with and without structural amplification.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetastablePair {
    /// Amplified bound state on the short-distance branch; `None` when the
    /// amplified law has no solution there.
    pub inner: Option<BoundState>,
    /// Unamplified bound state.
    pub outer: BoundState,
    pub amplification: f64,
}

impl MetastablePair {
    pub fn is_single(&self) -> bool {
        self.inner.is_none()
    }

    /// `outer.spread / inner.spread`.
    pub fn spread_ratio(&self) -> Option<f64> {
        self.inner.map(|i| self.outer.spread / i.spread)
    }
}

pub fn metastable_pair(sphere: &NanosphereSpec, nucleus: &NucleusSpec) -> Result<MetastablePair> {
    let amplification = structural_amplification(sphere, nucleus).max(1.0);
    let outer = bound_state(&SpringModel::new(*sphere))?;
    let amplified = SpringModel::with_amplification(*sphere, amplification)?;
    Ok(MetastablePair {
        inner: bound_state_short_branch(&amplified)?,
        outer,
        amplification,
    })
}

/// Thermal over quantum velocity scale, `sqrt(2 k_B T / M) / (h / (M δr))`.
pub fn velocity_ratio(sphere: &NanosphereSpec, temperature: f64, bound: &BoundState) -> Result<f64> {
    if !(temperature >= 0.0) {
        return Err(Error::domain(format!(
            "temperature must be non-negative, got {temperature}"
        )));
    }
    let m = sphere.mass();
    Ok((2.0 * SI.k_b * temperature / m).sqrt() / (SI.h() / (m * bound.spread)))
}
