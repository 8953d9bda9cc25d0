//! GRW-type localization: Poisson jump times, jump locations and the
//! Gaussian update of the state.
//!
//! A jump centred at `x0` multiplies the wavefunction by
//! `exp(-(α/2)|x - x0|²)` and renormalizes it, so `A → A + α/2` and
//! `B → B + α x0`. The probability density of `x0` is the overlap of the
//! squared jump factor with `|ψ|²`, which for a Gaussian state is again a
//! Gaussian with per-axis variance `1/(4 Re A) + 1/(2α)` around the centre.

use rand::Rng;
use rand_distr::{Distribution, Exp, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::state::{GaussianState, Vec3};

/// One localization mechanism.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JumpChannel {
    pub label: String,
    /// Jump rate, s⁻¹.
    pub gamma: f64,
    /// Inverse squared localization length, m⁻².
    pub alpha: f64,
}

impl JumpChannel {
    pub fn new(label: impl Into<String>, gamma: f64, alpha: f64) -> Result<Self> {
        let c = JumpChannel {
            label: label.into(),
            gamma,
            alpha,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gamma >= 0.0 && self.gamma.is_finite()) {
            return Err(Error::domain(format!("channel `{}`: gamma must be >= 0", self.label)));
        }
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return Err(Error::domain(format!("channel `{}`: alpha must be > 0", self.label)));
        }
        Ok(())
    }

    /// `Λ = γ α`, m⁻² s⁻¹.
    pub fn lambda(&self) -> f64 {
        self.gamma * self.alpha
    }
}

/// A jump that happened.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JumpEvent {
    /// s
    pub time: f64,
    /// m
    pub location: Vec3,
    /// Index into the scenario's channel list.
    pub channel: usize,
    /// m
    pub pre_spread: f64,
    /// m
    pub post_spread: f64,
}

/// Jump times in `[0, horizon)` from independent Poisson processes, one per
/// channel, merged in time order. Each entry is `(time, channel index)`.
pub fn sample_jump_times<R: Rng + ?Sized>(channels: &[JumpChannel], horizon: f64, rng: &mut R) -> Vec<(f64, usize)> {
    let mut out = Vec::new();
    for (i, ch) in channels.iter().enumerate() {
        if !(ch.gamma > 0.0) || !(horizon > 0.0) {
            continue;
        }
        let gaps = Exp::new(ch.gamma).expect("positive rate");
        let mut t = 0.0;
        loop {
            t += gaps.sample(rng);
            if t >= horizon {
                break;
            }
            out.push((t, i));
        }
    }
    out.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    out
}

/// Per-axis variance of the jump location, `1/(4 Re A) + 1/(2α)`.
pub fn jump_location_variance(state: &GaussianState, alpha: f64) -> f64 {
    state.axis_variance() + 0.5 / alpha
}

/// Draws a jump centre from its exact distribution.
pub fn sample_jump_location<R: Rng + ?Sized>(state: &GaussianState, alpha: f64, rng: &mut R) -> Vec3 {
    let sd = jump_location_variance(state, alpha).sqrt();
    let mu = state.centre();
    std::array::from_fn(|i| {
        let z: f64 = StandardNormal.sample(rng);
        mu[i] + sd * z
    })
}

/// Multiplies the state by the jump factor centred at `x0` and renormalizes.
pub fn apply_jump(state: &GaussianState, x0: Vec3, alpha: f64) -> Result<GaussianState> {
    if !(alpha > 0.0) {
        return Err(Error::domain(format!("alpha must be positive, got {alpha}")));
    }
    let b = state.b();
    let nb = std::array::from_fn(|i| b[i] + alpha * x0[i]);
    Ok(GaussianState::from_raw(state.a() + alpha / 2.0, nb, state.c())?.normalized())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::{make_gaussian, NanosphereSpec};
    use approx::assert_relative_eq;
    use num_complex::Complex64;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn gold() -> NanosphereSpec {
        NanosphereSpec::new(1e-7, 20000.0).unwrap()
    }

    fn count_stats(channels: &[JumpChannel], horizon: f64, runs: u64) -> (f64, f64) {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let counts: Vec<f64> = (0..runs)
            .map(|_| sample_jump_times(channels, horizon, &mut rng).len() as f64)
            .collect();
        let n = counts.len() as f64;
        let mean = counts.iter().sum::<f64>() / n;
        let var = counts.iter().map(|c| (c - mean).powi(2)).sum::<f64>() / (n - 1.0);
        (mean, var)
    }

    #[test]
    fn poisson_moments() {
        let ch = [JumpChannel::new("x", 1.0, 1e13).unwrap()];
        let (mean, var) = count_stats(&ch, 300.0, 4000);
        // standard error of the mean is sqrt(300/4000) ≈ 0.27
        assert!((mean - 300.0).abs() < 4.0 * (300.0f64 / 4000.0).sqrt());
        assert!((var / 300.0 - 1.0).abs() < 0.1);

        let ch = [JumpChannel::new("photons", 1e3, 1e16).unwrap()];
        let (mean, _) = count_stats(&ch, 0.01, 20000);
        assert!((mean - 10.0).abs() < 4.0 * (10.0f64 / 20000.0).sqrt());
    }

    #[test]
    fn zero_rate_is_silent() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let ch = [JumpChannel::new("off", 0.0, 1e13).unwrap()];
        assert!(sample_jump_times(&ch, 1e6, &mut rng).is_empty());
        assert!(JumpChannel::new("bad", -1.0, 1e13).is_err());
        assert!(JumpChannel::new("bad", 1.0, 0.0).is_err());
    }

    #[test]
    fn merged_times_are_sorted_and_labelled() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let ch = [
            JumpChannel::new("a", 2.0, 1e13).unwrap(),
            JumpChannel::new("b", 5.0, 1e14).unwrap(),
        ];
        let jumps = sample_jump_times(&ch, 100.0, &mut rng);
        assert!(jumps.windows(2).all(|w| w[0].0 <= w[1].0));
        assert!(jumps.iter().any(|j| j.1 == 0) && jumps.iter().any(|j| j.1 == 1));
        assert!(jumps.iter().all(|j| j.0 >= 0.0 && j.0 < 100.0));
    }

    #[test]
    fn superposition_of_channels() {
        let split = [
            JumpChannel::new("a", 0.3, 1e13).unwrap(),
            JumpChannel::new("b", 0.7, 1e13).unwrap(),
        ];
        let merged = [JumpChannel::new("ab", 1.0, 1e13).unwrap()];
        let (m1, v1) = count_stats(&split, 50.0, 8000);
        let (m2, v2) = count_stats(&merged, 50.0, 8000);
        let se = (v1 / 8000.0 + v2 / 8000.0).sqrt();
        assert!((m1 - m2).abs() < 4.0 * se);
        assert!((v1 / v2 - 1.0).abs() < 0.1);
    }

    /// Mean and variance of the jump-centre density
    /// `ρ(x0) ∝ ∫ exp(-α (x - x0)²) |ψ(x)|² dx`, by 2-D quadrature on one axis.
    pub(crate) fn location_moments_by_quadrature(state: &GaussianState, alpha: f64) -> (f64, f64) {
        let mu = state.centre()[0];
        let s_psi = state.axis_variance().sqrt();
        let s_j = (0.5 / alpha).sqrt();
        let width = 10.0 * (s_psi + s_j);
        let n = 1200;
        let h = 2.0 * width / n as f64;
        let (mut z, mut m1, mut m2) = (0.0, 0.0, 0.0);
        for i in 0..=n {
            let x0 = mu - width + i as f64 * h;
            let mut rho = 0.0;
            for j in 0..=n {
                let x = mu - width + j as f64 * h;
                let dens = (-2.0 * state.a().re * (x - mu).powi(2)).exp();
                rho += (-alpha * (x - x0).powi(2)).exp() * dens;
            }
            z += rho;
            m1 += rho * x0;
            m2 += rho * x0 * x0;
        }
        let mean = m1 / z;
        (mean, m2 / z - mean * mean)
    }

    #[test]
    fn location_variance_matches_quadrature() {
        let s = gold();
        let st = make_gaussian(1e-9, [0.0; 3], [0.0; 3], &s).unwrap();
        let v = jump_location_variance(&st, 1e16);
        assert_relative_eq!(v, 5.0333e-17, max_relative = 1e-4);
        let (_, var) = location_moments_by_quadrature(&st, 1e16);
        assert_relative_eq!(v, var, max_relative = 1e-6);
        // limits
        assert_relative_eq!(
            jump_location_variance(&st, 1e40),
            st.axis_variance(),
            max_relative = 1e-12
        );
        let point = make_gaussian(1e-15, [0.0; 3], [0.0; 3], &s).unwrap();
        assert_relative_eq!(jump_location_variance(&point, 1e13), 0.5e-13, max_relative = 1e-8);
    }

    #[test]
    fn empirical_locations_match_quadrature() {
        let s = gold();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for (spread, alpha) in [(1e-9, 1e13), (1e-9, 1e18), (1e-7, 1e16)] {
            let st = make_gaussian(spread, [2e-9, 0.0, 0.0], [0.0; 3], &s).unwrap();
            let (mean, var) = location_moments_by_quadrature(&st, alpha);
            let n = 20000;
            let xs: Vec<f64> = (0..n).map(|_| sample_jump_location(&st, alpha, &mut rng)[0]).collect();
            let m = xs.iter().sum::<f64>() / n as f64;
            let v = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1) as f64;
            assert!((m - mean).abs() < 4.0 * (var / n as f64).sqrt());
            assert!((v - var).abs() < 4.0 * var * (2.0 / (n - 1) as f64).sqrt());
        }
    }

    #[test]
    fn jump_at_centre_keeps_centre() {
        let zero = Complex64::new(0.0, 0.0);
        let st = GaussianState::from_raw(Complex64::new(7.5e17, 0.0), [zero; 3], zero).unwrap();
        let out = apply_jump(&st, [0.0; 3], 1e16).unwrap();
        assert_eq!(out.a(), Complex64::new(7.55e17, 0.0));
        assert_eq!(out.b(), [zero; 3]);
        assert!(out.valid_norm());
    }

    #[test]
    fn off_centre_jump_moves_centre_by_weights() {
        let zero = Complex64::new(0.0, 0.0);
        let st = GaussianState::from_raw(Complex64::new(5e15, 0.0), [zero; 3], zero).unwrap();
        let out = apply_jump(&st, [1e-8, 0.0, 0.0], 1e16).unwrap();
        assert_relative_eq!(out.centre()[0], 5e-9, max_relative = 1e-14);
    }

    /// Pointwise product of the 1-D densities on a grid, renormalized, against
    /// the updated parameters.
    #[test]
    fn jump_matches_grid_multiplication() {
        let s = gold();
        let st = make_gaussian(3e-8, [1e-8, 0.0, 0.0], [3e-7, 0.0, 0.0], &s).unwrap();
        let st = crate::dynamics::free_closed_form(&st, 1e4, &s).unwrap();
        let sd = st.axis_variance().sqrt();
        let (alpha, x0) = (5e14, st.centre()[0] + 0.7 * sd);
        let out = apply_jump(&st, [x0, 0.0, 0.0], alpha).unwrap();
        let n = 4000;
        let lo = st.centre()[0] - 10.0 * sd;
        let h = 20.0 * sd / n as f64;
        // log|ψ|² along x, shifted by its value at the centre to stay in range
        let log_dens = |x: f64| 2.0 * (-st.a() * x * x + st.b()[0] * x).re;
        let shift = log_dens(st.centre()[0]);
        let (mut z, mut m1, mut m2) = (0.0, 0.0, 0.0);
        for k in 0..=n {
            let x = lo + k as f64 * h;
            let d = (log_dens(x) - shift - alpha * (x - x0).powi(2)).exp();
            z += d;
            m1 += d * x;
            m2 += d * x * x;
        }
        let mean = m1 / z;
        assert_relative_eq!(mean, out.centre()[0], max_relative = 1e-9);
        assert_relative_eq!(m2 / z - mean * mean, out.axis_variance(), max_relative = 1e-8);
    }

    #[test]
    fn short_wavelength_jump_forgets_the_pre_state() {
        let s = gold();
        for spread in [1e-6, 1e-7] {
            let st = make_gaussian(spread, [0.0; 3], [0.0; 3], &s).unwrap();
            let out = apply_jump(&st, [0.0; 3], 1e22).unwrap();
            assert_relative_eq!(out.spread(), 1.5f64.sqrt() * 1e-11, max_relative = 1e-4);
        }
    }

    proptest! {
        #[test]
        fn jump_algebra(
            spread in 1e-10f64..1e-6,
            log_alpha in 10.0f64..22.0,
            x0 in prop::array::uniform3(-1e-7f64..1e-7),
            c in prop::array::uniform3(-1e-7f64..1e-7),
        ) {
            let s = gold();
            let alpha = 10f64.powf(log_alpha);
            let st = make_gaussian(spread, c, [0.0; 3], &s).unwrap();
            let out = apply_jump(&st, x0, alpha).unwrap();
            prop_assert!((out.a().re - st.a().re - alpha / 2.0).abs() <= 1e-12 * out.a().re);
            prop_assert!(out.spread() < st.spread());
            let lhs = 1.0 / out.spread_squared();
            let rhs = 1.0 / st.spread_squared() + 2.0 / 3.0 * alpha;
            prop_assert!((lhs / rhs - 1.0).abs() < 1e-12);
            let w = 2.0 * st.a().re;
            for i in 0..3 {
                let expect = (w * c[i] + alpha * x0[i]) / (w + alpha);
                prop_assert!((out.centre()[i] - expect).abs() <= 1e-9 * (c[i].abs() + x0[i].abs()) + 1e-25);
            }
        }
    }
}
