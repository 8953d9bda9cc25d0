//! Deterministic evolution of the Gaussian state between localization events.
//!
//! The self-gravitational term acts as a harmonic potential
//! `(k/2)|x - <x>|²` centred on the packet, so only `A` feels it. The
//! continuous-collapse term adds the real constant `Λ` to `dA/dt` and is
//! centred in the same way. Consequently the centre moves uniformly and the
//! mean momentum is conserved in every mode, and the whole problem reduces to
//! one complex ODE for `A`.
//!
//! That ODE is integrated for `w = 1/a`, with `a = A R²` and time in units of
//! `M R² / ħ`:
//!
//! ```text
//! dw/dτ = 2i - (i g κ(<r²>) / 2 + λ) w²
//! ```
//!
//! where `g = G M³ R / ħ²`, `κ = k R³ / (G M²)` and `λ = Λ M R⁴ / ħ`. Free
//! motion is exactly linear in `w`.
//!
//! The global phase `Im C` is not propagated; nothing observable depends on it.

pub mod dopri5;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::constants::SI;
use crate::error::{Error, Result};
use crate::gravity::{coupling, critical_lambda, SpringModel};
use crate::state::{CVec3, GaussianState, NanosphereSpec, Vec3};
use dopri5::{Dopri5, StepError, Tolerances};

/// Which terms drive `A` between jumps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvolutionMode {
    pub gravity: bool,
    /// Continuous-collapse strength, m⁻² s⁻¹ (0 = off).
    pub qmupl_lambda: f64,
    pub spring: SpringModel,
}

impl EvolutionMode {
    pub fn free(sphere: NanosphereSpec) -> Self {
        EvolutionMode {
            gravity: false,
            qmupl_lambda: 0.0,
            spring: SpringModel::new(sphere),
        }
    }

    pub fn gravitating(sphere: NanosphereSpec) -> Self {
        EvolutionMode {
            gravity: true,
            ..Self::free(sphere)
        }
    }

    pub fn with_qmupl(mut self, lambda: f64) -> Result<Self> {
        self.qmupl_lambda = lambda;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.qmupl_lambda >= 0.0 && self.qmupl_lambda.is_finite()) {
            return Err(Error::domain(format!(
                "qmupl_lambda must be non-negative, got {}",
                self.qmupl_lambda
            )));
        }
        self.spring.sphere.validate()
    }

    pub fn sphere(&self) -> &NanosphereSpec {
        &self.spring.sphere
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IntegratorConfig {
    pub rel_tol: f64,
    /// Absolute tolerance relative to `|1/A|`.
    pub abs_tol: f64,
    /// Largest step, s.
    pub max_step: Option<f64>,
    /// Interpolate sample times inside steps instead of stopping at them.
    pub dense_output: bool,
    /// Step budget per call.
    pub max_steps: u64,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        IntegratorConfig {
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            max_step: None,
            dense_output: true,
            max_steps: 50_000_000,
        }
    }
}

impl IntegratorConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.abs_tol > 0.0) {
            return Err(Error::domain("integrator tolerances must be positive"));
        }
        if let Some(h) = self.max_step {
            if !(h > 0.0) {
                return Err(Error::domain(format!("max_step must be positive, got {h}")));
            }
        }
        Ok(())
    }
}

/// Time derivatives of the Gaussian parameters, SI.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Derivative {
    pub a: Complex64,
    pub b: CVec3,
    pub c: Complex64,
}

/// Right-hand side of the closed Gaussian system.
///
/// With `μ` the centre, `k = k(3 / (4 Re A))` (0 without gravity) and `Λ` the
/// continuous-collapse strength:
///
/// ```text
/// dA/dt = -2iħA²/M + ik/(2ħ) + Λ
/// dB/dt = -2iħAB/M + ikμ/ħ + 2Λμ
/// dC/dt = iħ(B·B - 6A)/(2M) - ik|μ|²/(2ħ) - Λ|μ|² + Λ<r²>
/// ```
///
/// The last term keeps the state normalized under the collapse term.
pub fn derivative(state: &GaussianState, mode: &EvolutionMode) -> Derivative {
    let m = mode.sphere().mass();
    let hbar = SI.hbar;
    let i = Complex64::i();
    let a = state.a();
    let b = state.b();
    let mu = state.centre();
    let r2 = state.spread_squared();
    let k = if mode.gravity { mode.spring.k(r2) } else { 0.0 };
    let lam = mode.qmupl_lambda;
    let mu2: f64 = mu.iter().map(|v| v * v).sum();
    let bb: Complex64 = b.iter().map(|v| v * v).sum();

    Derivative {
        a: -2.0 * i * hbar * a * a / m + i * k / (2.0 * hbar) + lam,
        b: std::array::from_fn(|n| -2.0 * i * hbar * a * b[n] / m + i * k * mu[n] / hbar + 2.0 * lam * mu[n]),
        c: i * hbar * (bb - 6.0 * a) / (2.0 * m) - i * k * mu2 / (2.0 * hbar) - lam * mu2 + lam * r2,
    }
}

type Rhs = Box<dyn FnMut(f64, &[f64; 2]) -> [f64; 2] + Send>;

/// Stateful integrator for one trajectory: advances in time, reports samples,
/// and accepts discontinuous replacements of the state (jumps).
pub struct Propagator {
    solver: Dopri5<Rhs, 2>,
    mass: f64,
    radius: f64,
    time_unit: f64,
    t0: f64,
    centre_ref: Vec3,
    t_ref: f64,
    momentum: Vec3,
    phase: f64,
}

fn to_w(a: Complex64, radius: f64) -> [f64; 2] {
    let w = 1.0 / (a * radius * radius);
    [w.re, w.im]
}

impl Propagator {
    pub fn new(state: GaussianState, t0: f64, mode: &EvolutionMode, config: &IntegratorConfig) -> Result<Self> {
        mode.validate()?;
        config.validate()?;
        let sphere = *mode.sphere();
        let mass = sphere.mass();
        let radius = sphere.radius;
        let time_unit = mass * radius * radius / SI.hbar;
        let g = if mode.gravity { coupling(&sphere) } else { 0.0 };
        let lam = mode.qmupl_lambda * mass * radius.powi(4) / SI.hbar;
        let spring = mode.spring;
        let gravity = mode.gravity;
        let rhs: Rhs = Box::new(move |_tau, y: &[f64; 2]| {
            let w = Complex64::new(y[0], y[1]);
            let coeff = if gravity {
                let re_a = y[0] / w.norm_sqr();
                let x = (0.75 / re_a).sqrt();
                Complex64::new(lam, 0.5 * g * spring.kappa(x))
            } else {
                Complex64::new(lam, 0.0)
            };
            let dw = Complex64::new(0.0, 2.0) - coeff * w * w;
            [dw.re, dw.im]
        });
        let tol = Tolerances {
            rel: config.rel_tol,
            abs: config.abs_tol,
            max_step: config.max_step.map_or(f64::INFINITY, |h| h / time_unit),
            max_steps: config.max_steps,
        };
        Ok(Propagator {
            solver: Dopri5::new(rhs, 0.0, to_w(state.a(), radius), tol),
            mass,
            radius,
            time_unit,
            t0,
            centre_ref: state.centre(),
            t_ref: t0,
            momentum: state.momentum(),
            phase: state.c().im,
        })
    }

    /// Current time, s.
    pub fn time(&self) -> f64 {
        self.t0 + self.solver.t() * self.time_unit
    }

    fn assemble(&self, y: [f64; 2], t: f64) -> Result<GaussianState> {
        let w = Complex64::new(y[0], y[1]);
        let a = 1.0 / (w * self.radius * self.radius);
        if !(a.re > 0.0) || !a.re.is_finite() {
            return Err(Error::numeric(t, format!("Re A left the positive axis ({a})")));
        }
        let dt = t - self.t_ref;
        let centre = std::array::from_fn(|i| self.centre_ref[i] + self.momentum[i] * dt / self.mass);
        GaussianState::from_moments(a, centre, self.momentum, self.phase).map_err(|e| Error::numeric(t, e.to_string()))
    }

    pub fn state(&self) -> Result<GaussianState> {
        self.assemble(self.solver.y(), self.time())
    }

    /// Integrates to `t_end` (s), calling `on_sample(index, state)` for every
    /// `samples[index] <= t_end` not yet passed. Pass only samples after the
    /// previous call; any at or before the current time see the current state.
    pub fn advance_to(
        &mut self,
        t_end: f64,
        samples: &[f64],
        mut on_sample: impl FnMut(usize, GaussianState),
    ) -> Result<()> {
        let scaled: Vec<f64> = samples.iter().map(|s| (s - self.t0) / self.time_unit).collect();
        let tau_end = (t_end - self.t0) / self.time_unit;
        let mut failure = None;
        let mut pending = Vec::new();
        // samples that rounding places at or before the solver's clock see
        // the current state instead of being skipped
        let behind = scaled.partition_point(|&s| s <= self.solver.t());
        let here = self.solver.y();
        pending.extend((0..behind).map(|i| (i, here)));
        let res = self.solver.advance(tau_end, &scaled, |i, y| pending.push((i, y)));
        for (i, y) in pending {
            match self.assemble(y, samples[i]) {
                Ok(s) => on_sample(i, s),
                Err(e) => {
                    failure.get_or_insert(e);
                }
            }
        }
        if let Err(e) = res {
            let (StepError::Underflow { t } | StepError::StepLimit { t }) = e;
            let what = match e {
                StepError::Underflow { .. } => "step size underflow",
                StepError::StepLimit { .. } => "step budget exhausted",
            };
            return Err(Error::numeric(self.t0 + t * self.time_unit, what));
        }
        if let Some(e) = failure {
            return Err(e);
        }
        self.state().map(|_| ())
    }

    /// Replaces the state at the current time (after a jump).
    pub fn replace(&mut self, state: GaussianState) {
        self.solver.reset(to_w(state.a(), self.radius));
        self.centre_ref = state.centre();
        self.t_ref = self.time();
        self.momentum = state.momentum();
        self.phase = state.c().im;
    }

    /// Accepted and rejected step counts.
    pub fn step_stats(&self) -> (u64, u64) {
        self.solver.stats()
    }
}

/// Evolves `state` for `duration` seconds.
pub fn evolve(
    state: &GaussianState,
    duration: f64,
    mode: &EvolutionMode,
    config: &IntegratorConfig,
) -> Result<GaussianState> {
    if !(duration >= 0.0) {
        return Err(Error::domain(format!("duration must be non-negative, got {duration}")));
    }
    if duration == 0.0 {
        return Ok(*state);
    }
    let mut p = Propagator::new(*state, 0.0, mode, config)?;
    p.advance_to(duration, &[], |_, _| {})?;
    p.state()
}

/// Evolves `state` from time 0 and returns it at each of the ascending
/// `times` (s).
pub fn evolve_sampled(
    state: &GaussianState,
    times: &[f64],
    mode: &EvolutionMode,
    config: &IntegratorConfig,
) -> Result<Vec<GaussianState>> {
    if times.windows(2).any(|w| w[1] < w[0]) || times.first().is_some_and(|&t| t < 0.0) {
        return Err(Error::domain("sample times must be ascending and non-negative"));
    }
    let mut out = vec![*state; times.len()];
    let Some(&end) = times.last() else {
        return Ok(out);
    };
    let mut p = Propagator::new(*state, 0.0, mode, config)?;
    if config.dense_output {
        p.advance_to(end, times, |i, s| out[i] = s)?;
    } else {
        for (i, &t) in times.iter().enumerate() {
            if t > p.time() {
                p.advance_to(t, &[], |_, _| {})?;
                out[i] = p.state()?;
            }
        }
    }
    Ok(out)
}

/// Exact free evolution: `A(t) = A₀ / (1 + 2iħA₀t/M)`, uniform motion of the
/// centre.
pub fn free_closed_form(state: &GaussianState, t: f64, sphere: &NanosphereSpec) -> Result<GaussianState> {
    if !(t >= 0.0) {
        return Err(Error::domain(format!("time must be non-negative, got {t}")));
    }
    if t == 0.0 {
        return Ok(*state);
    }
    let m = sphere.mass();
    let a0 = state.a();
    let a = a0 / (1.0 + Complex64::new(0.0, 2.0 * SI.hbar * t / m) * a0);
    let p = state.momentum();
    let mu = state.centre();
    let centre = std::array::from_fn(|i| mu[i] + p[i] * t / m);
    GaussianState::from_moments(a, centre, p, state.c().im)
}

/// Relative mismatch `|Λ - k(<r²_BS>)/(2ħ)| / Λ` between the configured
/// continuous-collapse strength and the critical value.
pub fn qmupl_equilibrium_check(mode: &EvolutionMode) -> Result<f64> {
    if !mode.gravity || !(mode.qmupl_lambda > 0.0) {
        return Err(Error::domain("equilibrium check needs gravity on and qmupl_lambda > 0"));
    }
    let crit = critical_lambda(&mode.spring)?.solved;
    Ok((mode.qmupl_lambda - crit).abs() / mode.qmupl_lambda)
}
