//! Monte-Carlo ensembles of jump trajectories and their spread statistics.
//!
//! Each trajectory owns a ChaCha8 stream selected by its index under the
//! scenario's master seed, so a trajectory's outcome does not depend on
//! which worker runs it. Trajectories are generated in parallel in fixed
//! chunks and folded into the statistics strictly in index order, which makes
//! the result bit-identical for any worker count.
//!
//! The spread of the ensemble (the density matrix) splits into the mean
//! squared spread of the individual packets and the dispersion of their
//! centres:
//!
//! ```text
//! total² = <spread²> + <|centre - <centre>|²>
//! ```

use std::io::{BufRead, Write};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::collapse::{apply_jump, sample_jump_location, sample_jump_times, JumpChannel, JumpEvent};
use crate::constants::SI;
use crate::dynamics::{EvolutionMode, IntegratorConfig, Propagator};
use crate::error::{Error, Result};
use crate::gravity::SpringModel;
use crate::state::{make_gaussian, CVec3, EnvironmentSpec, GaussianState, NanosphereSpec, Vec3};

/// Initial packet: spread (m), centre (m), mean velocity (m s⁻¹).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialState {
    pub spread: f64,
    #[serde(default)]
    pub centre: Vec3,
    #[serde(default)]
    pub velocity: Vec3,
}

/// Everything that defines an ensemble run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub sphere: NanosphereSpec,
    pub environment: EnvironmentSpec,
    pub initial: InitialState,
    pub gravity: bool,
    pub channels: Vec<JumpChannel>,
    /// m⁻² s⁻¹
    pub qmupl_lambda: f64,
    /// s
    pub duration: f64,
    /// Ascending, within `[0, duration]`, s.
    pub sample_times: Vec<f64>,
    pub trajectory_count: u64,
    pub master_seed: u64,
    #[serde(default)]
    pub integrator: IntegratorConfig,
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<()> {
        self.sphere.validate()?;
        self.environment.validate()?;
        if !(self.initial.spread > 0.0) {
            return Err(Error::domain(format!(
                "initial spread must be positive, got {}",
                self.initial.spread
            )));
        }
        if !(self.duration >= 0.0 && self.duration.is_finite()) {
            return Err(Error::domain(format!(
                "duration must be non-negative, got {}",
                self.duration
            )));
        }
        if self.sample_times.windows(2).any(|w| !(w[0] <= w[1])) {
            return Err(Error::domain("sample_times must be sorted"));
        }
        if self.sample_times.iter().any(|&t| !(t >= 0.0 && t <= self.duration)) {
            return Err(Error::domain("sample_times must lie within [0, duration]"));
        }
        if self.trajectory_count == 0 {
            return Err(Error::domain("trajectory_count must be at least 1"));
        }
        for c in &self.channels {
            c.validate()?;
        }
        self.mode()?;
        self.integrator.validate()
    }

    pub fn mode(&self) -> Result<EvolutionMode> {
        EvolutionMode {
            gravity: self.gravity,
            qmupl_lambda: 0.0,
            spring: SpringModel::new(self.sphere),
        }
        .with_qmupl(self.qmupl_lambda)
    }

    pub fn initial_state(&self) -> Result<GaussianState> {
        make_gaussian(
            self.initial.spread,
            self.initial.centre,
            self.initial.velocity,
            &self.sphere,
        )
    }

    /// Sum of `γ α` over the jump channels.
    pub fn channel_lambda(&self) -> f64 {
        self.channels.iter().map(JumpChannel::lambda).sum()
    }

    /// `n` evenly spaced sample times over `[0, duration]`.
    pub fn even_samples(duration: f64, n: usize) -> Vec<f64> {
        if n < 2 {
            return vec![duration];
        }
        (0..n).map(|k| duration * k as f64 / (n - 1) as f64).collect()
    }
}

/// State of one trajectory at one sample time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    pub time: f64,
    pub a: num_complex::Complex64,
    pub b: CVec3,
    pub spread: f64,
    pub centre: Vec3,
    pub velocity: Vec3,
}

impl Snapshot {
    fn of(time: f64, s: &GaussianState, sphere: &NanosphereSpec) -> Self {
        Snapshot {
            time,
            a: s.a(),
            b: s.b(),
            spread: s.spread(),
            centre: s.centre(),
            velocity: s.mean_velocity(sphere),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRecord {
    pub index: u64,
    /// One per configured sample time, in order.
    pub snapshots: Vec<Snapshot>,
    pub jumps: Vec<JumpEvent>,
}

/// Random stream of trajectory `index`.
pub fn trajectory_rng(master_seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(index);
    rng
}

/// Runs one stochastic realization: jump schedule from all channels, exact
/// stops at jump times, snapshots at the sample times (a sample coinciding
/// with a jump sees the pre-jump state).
pub fn run_trajectory(config: &ScenarioConfig, index: u64) -> Result<TrajectoryRecord> {
    let mode = config.mode()?;
    let state0 = config.initial_state()?;
    let mut rng = trajectory_rng(config.master_seed, index);
    let schedule = sample_jump_times(&config.channels, config.duration, &mut rng);

    let samples = &config.sample_times;
    let sphere = config.sphere;
    let mut snaps: Vec<Option<Snapshot>> = vec![None; samples.len()];
    let first = samples.partition_point(|&t| t <= 0.0);
    for (i, slot) in snaps.iter_mut().enumerate().take(first) {
        *slot = Some(Snapshot::of(samples[i], &state0, &sphere));
    }

    let mut prop = Propagator::new(state0, 0.0, &mode, &config.integrator)?;
    let mut jumps = Vec::with_capacity(schedule.len());
    let mut next = first;
    let run_to = |prop: &mut Propagator, t: f64, next: &mut usize, snaps: &mut Vec<Option<Snapshot>>| {
        let end = samples.partition_point(|&s| s <= t);
        let window = &samples[*next..end.max(*next)];
        let base = *next;
        prop.advance_to(t, window, |i, s| {
            snaps[base + i] = Some(Snapshot::of(window[i], &s, &sphere))
        })?;
        *next = end.max(*next);
        Ok::<_, Error>(())
    };
    for &(t, ch) in &schedule {
        run_to(&mut prop, t, &mut next, &mut snaps)?;
        let before = prop.state()?;
        let alpha = config.channels[ch].alpha;
        let x0 = sample_jump_location(&before, alpha, &mut rng);
        let after = apply_jump(&before, x0, alpha)?;
        jumps.push(JumpEvent {
            time: t,
            location: x0,
            channel: ch,
            pre_spread: before.spread(),
            post_spread: after.spread(),
        });
        prop.replace(after);
    }
    run_to(&mut prop, config.duration, &mut next, &mut snaps)?;

    let snapshots = snaps
        .into_iter()
        .enumerate()
        .map(|(i, s)| s.ok_or_else(|| Error::numeric(samples[i], "sample time was not reached")))
        .collect::<Result<Vec<_>>>()?;
    Ok(TrajectoryRecord {
        index,
        snapshots,
        jumps,
    })
}

/// One row of ensemble statistics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StatsRow {
    /// s
    pub t: f64,
    /// `<spread²>`, m².
    pub mean_individual_variance: f64,
    /// `<|centre - <centre>|²>`, m².
    pub centre_variance: f64,
    /// `sqrt(mean_individual_variance + centre_variance)`, m.
    pub total_spread: f64,
    /// Delta-method standard error of `total_spread`, m.
    pub standard_error: f64,
    /// Closed-form ensemble spread for the same `Λ`, m.
    pub analytic: f64,
}

impl StatsRow {
    pub fn individual_rms(&self) -> f64 {
        self.mean_individual_variance.sqrt()
    }

    pub fn centre_rms(&self) -> f64 {
        self.centre_variance.sqrt()
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct EnsembleStats {
    pub rows: Vec<StatsRow>,
    /// Trajectories that entered the statistics.
    pub trajectory_count: u64,
    /// Trajectories removed by post-selection.
    pub dropped: u64,
}

pub const CSV_HEADER: &str = "t,total_spread,individual_rms,centre_rms,stderr,analytic";

impl EnsembleStats {
    pub fn row_at(&self, t: f64) -> Option<&StatsRow> {
        self.rows.iter().find(|r| r.t == t)
    }

    /// CSV with a fixed column order, 17 significant digits and LF endings.
    pub fn write_csv(&self, mut w: impl Write) -> Result<()> {
        writeln!(w, "{CSV_HEADER}")?;
        for r in &self.rows {
            writeln!(
                w,
                "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                r.t,
                r.total_spread,
                r.individual_rms(),
                r.centre_rms(),
                r.standard_error,
                r.analytic
            )?;
        }
        Ok(())
    }

    /// Reads the columns written by [`EnsembleStats::write_csv`] back as
    /// `[t, total_spread, individual_rms, centre_rms, stderr, analytic]`.
    pub fn read_csv(r: impl BufRead) -> Result<Vec<[f64; 6]>> {
        let mut out = Vec::new();
        for (n, line) in r.lines().enumerate() {
            let line = line?;
            if n == 0 {
                if line != CSV_HEADER {
                    return Err(Error::domain(format!("unexpected CSV header `{line}`")));
                }
                continue;
            }
            let mut row = [0.0; 6];
            let mut fields = line.split(',');
            for v in row.iter_mut() {
                *v = fields
                    .next()
                    .and_then(|f| f.parse().ok())
                    .ok_or_else(|| Error::domain(format!("bad CSV line {}: `{line}`", n + 1)))?;
            }
            out.push(row);
        }
        Ok(out)
    }
}

/// Closed-form ensemble spread for free motion with localization strength
/// `Λ` and a real initial `A`:
/// `sqrt(r0² (1 + 9ħ²t²/(4M²r0⁴) + Λħ²t³/(2M²r0²)))` with `r0² = initial_r2`.
pub fn analytic_grw_spread(t: f64, initial_r2: f64, mass: f64, lambda: f64) -> f64 {
    let h2 = SI.hbar * SI.hbar;
    let m2 = mass * mass;
    (initial_r2
        * (1.0
            + 9.0 * h2 * t * t / (4.0 * m2 * initial_r2 * initial_r2)
            + lambda * h2 * t.powi(3) / (2.0 * m2 * initial_r2)))
        .sqrt()
}

/// Long-time individual spread under localization, `(ħ / (M Λ))^{1/4}`.
pub fn equilibrium_spread(mass: f64, lambda: f64) -> Result<f64> {
    if !(mass > 0.0 && lambda > 0.0) {
        return Err(Error::domain("mass and lambda must be positive"));
    }
    Ok((SI.hbar / (mass * lambda)).powf(0.25))
}

/// Streaming moments of `z = (q, d)` with `q = spread² + |d|²` and
/// `d = centre - reference`, accumulated in a fixed order.
#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    n: f64,
    mean: [f64; 4],
    comoment: [[f64; 4]; 4],
    mean_spread2: f64,
}

impl Moments {
    fn push(&mut self, spread2: f64, d: Vec3) {
        let q = spread2 + d[0] * d[0] + d[1] * d[1] + d[2] * d[2];
        let z = [q, d[0], d[1], d[2]];
        self.n += 1.0;
        let delta: [f64; 4] = std::array::from_fn(|i| z[i] - self.mean[i]);
        for i in 0..4 {
            self.mean[i] += delta[i] / self.n;
        }
        for i in 0..4 {
            for j in 0..4 {
                self.comoment[i][j] += delta[i] * (z[j] - self.mean[j]);
            }
        }
        self.mean_spread2 += (spread2 - self.mean_spread2) / self.n;
    }

    fn row(&self, t: f64, analytic: f64) -> StatsRow {
        let dm = [self.mean[1], self.mean[2], self.mean[3]];
        let total2 = self.mean[0] - (dm[0] * dm[0] + dm[1] * dm[1] + dm[2] * dm[2]);
        let centre_variance = (total2 - self.mean_spread2).max(0.0);
        let total_spread = (self.mean_spread2 + centre_variance).sqrt();
        let se = if self.n > 1.0 {
            // gradient of total² with respect to the means of (q, d)
            let g = [1.0, -2.0 * dm[0], -2.0 * dm[1], -2.0 * dm[2]];
            let mut var = 0.0;
            for i in 0..4 {
                for j in 0..4 {
                    var += g[i] * g[j] * self.comoment[i][j] / (self.n - 1.0);
                }
            }
            (var.max(0.0) / self.n).sqrt() / (2.0 * total_spread)
        } else {
            0.0
        };
        StatsRow {
            t,
            mean_individual_variance: self.mean_spread2,
            centre_variance,
            total_spread,
            standard_error: se,
            analytic,
        }
    }
}

/// Execution options that do not change the physics.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleOptions {
    /// Worker threads; 0 means one per available core.
    pub workers: usize,
    /// Drop trajectories in which a channel with this label fired.
    pub post_select_without: Option<String>,
    /// Keep full trajectory records (snapshots and jump logs).
    pub keep_records: bool,
    /// Keep every trajectory's mean velocity at every sample time.
    pub keep_velocities: bool,
}

impl Default for EnsembleOptions {
    fn default() -> Self {
        EnsembleOptions {
            workers: 1,
            post_select_without: None,
            keep_records: false,
            keep_velocities: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct EnsembleOutcome {
    pub stats: EnsembleStats,
    /// Kept trajectories, when requested.
    pub records: Vec<TrajectoryRecord>,
    /// `velocities[trajectory][sample]` for kept trajectories, when requested.
    pub velocities: Vec<Vec<Vec3>>,
}

const CHUNK: u64 = 256;

/// Runs `trajectory_count` trajectories and reduces them to statistics.
pub fn run_ensemble(config: &ScenarioConfig, options: &EnsembleOptions) -> Result<EnsembleOutcome> {
    config.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(options.workers)
        .build()
        .map_err(|e| Error::domain(format!("cannot start worker pool: {e}")))?;
    let reference = config.initial.centre;
    let mass = config.sphere.mass();
    let lambda = config.channel_lambda();
    let r2 = config.initial.spread.powi(2);
    let excluded: Vec<usize> = match &options.post_select_without {
        Some(label) => config
            .channels
            .iter()
            .enumerate()
            .filter(|(_, c)| &c.label == label)
            .map(|(i, _)| i)
            .collect(),
        None => Vec::new(),
    };

    let mut moments = vec![Moments::default(); config.sample_times.len()];
    let mut outcome = EnsembleOutcome::default();
    let mut start = 0;
    while start < config.trajectory_count {
        let end = (start + CHUNK).min(config.trajectory_count);
        let chunk: Vec<Result<TrajectoryRecord>> = pool.install(|| {
            (start..end)
                .into_par_iter()
                .map(|i| run_trajectory(config, i))
                .collect()
        });
        let failures = chunk.iter().filter(|r| r.is_err()).count();
        for (offset, rec) in chunk.into_iter().enumerate() {
            let rec = rec.map_err(|e| {
                let index = start + offset as u64;
                let e = if failures > 1 {
                    Error::numeric(
                        match &e {
                            Error::Numeric { time, .. } => *time,
                            _ => f64::NAN,
                        },
                        format!(
                            "{e} (and {} more failures in trajectories {start}..{end})",
                            failures - 1
                        ),
                    )
                } else {
                    e
                };
                Error::Trajectory {
                    index,
                    source: Box::new(e),
                }
            })?;
            if rec.jumps.iter().any(|j| excluded.contains(&j.channel)) {
                outcome.stats.dropped += 1;
                continue;
            }
            for (m, s) in moments.iter_mut().zip(&rec.snapshots) {
                let d = std::array::from_fn(|i| s.centre[i] - reference[i]);
                m.push(s.spread * s.spread, d);
            }
            outcome.stats.trajectory_count += 1;
            if options.keep_velocities {
                outcome
                    .velocities
                    .push(rec.snapshots.iter().map(|s| s.velocity).collect());
            }
            if options.keep_records {
                outcome.records.push(rec);
            }
        }
        start = end;
    }
    if outcome.stats.trajectory_count > 0 {
        outcome.stats.rows = config
            .sample_times
            .iter()
            .zip(&moments)
            .map(|(&t, m)| m.row(t, analytic_grw_spread(t, r2, mass, lambda)))
            .collect();
    }
    Ok(outcome)
}

/// Equal-width histogram.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    /// `counts.len() + 1` ascending bin edges.
    pub edges: Vec<f64>,
    pub counts: Vec<u64>,
}

impl Histogram {
    pub fn new(values: &[f64], lo: f64, hi: f64, bins: usize) -> Self {
        let bins = bins.max(1);
        let width = (hi - lo) / bins as f64;
        let edges = (0..=bins).map(|k| lo + width * k as f64).collect();
        let mut counts = vec![0; bins];
        for &v in values {
            let k = if width > 0.0 {
                ((v - lo) / width).floor() as isize
            } else {
                0
            };
            counts[k.clamp(0, bins as isize - 1) as usize] += 1;
        }
        Histogram { edges, counts }
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Centre of the fullest bin.
    pub fn peak(&self) -> f64 {
        let k = self
            .counts
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(&a.0)))
            .map_or(0, |(k, _)| k);
        0.5 * (self.edges[k] + self.edges[k + 1])
    }
}

/// Distribution of mean velocities at one sample time: the modulus and each
/// Cartesian component.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VelocityHistogram {
    pub time: f64,
    pub modulus: Histogram,
    pub axes: [Histogram; 3],
}

pub fn velocity_histogram_of(time: f64, velocities: &[Vec3], bins: usize) -> VelocityHistogram {
    let moduli: Vec<f64> = velocities.iter().map(crate::state::norm).collect();
    let vmax = moduli.iter().copied().fold(0.0, f64::max);
    let axes = std::array::from_fn(|i| {
        let comp: Vec<f64> = velocities.iter().map(|v| v[i]).collect();
        Histogram::new(&comp, -vmax, vmax, bins)
    });
    VelocityHistogram {
        time,
        modulus: Histogram::new(&moduli, 0.0, vmax, bins),
        axes,
    }
}

/// Histogram of the trajectories' mean velocities at sample time `time`.
pub fn velocity_histogram(records: &[TrajectoryRecord], time: f64, bins: usize) -> Result<VelocityHistogram> {
    let mut velocities = Vec::with_capacity(records.len());
    for r in records {
        let s = r
            .snapshots
            .iter()
            .find(|s| s.time == time)
            .ok_or_else(|| Error::domain(format!("time {time} s was not sampled")))?;
        velocities.push(s.velocity);
    }
    Ok(velocity_histogram_of(time, &velocities, bins))
}

#[cfg(test)]
mod tests;
