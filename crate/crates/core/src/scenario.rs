//! Run descriptions, the built-in presets and the curve-family runner.
//!
//! A run is described by a flat JSON document ([`RunConfig`]). Every key is
//! in SI units; unknown keys are rejected and absent keys take the defaults
//! listed on the fields. A run expands into up to four ensembles per initial
//! spread:
//!
//! | curve                 | gravity | localization |
//! |-----------------------|---------|--------------|
//! | `free`                | off     | off          |
//! | `gravity`             | on      | off          |
//! | `decoherence`         | off     | on           |
//! | `decoherence_gravity` | on      | on           |
//!
//! The closed-form ensemble law is carried in the `analytic` column of
//! every curve.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::collapse::JumpChannel;
use crate::decoherence::{self, Catalog, ModelId, ReferenceCheck, ALPHA0_GRW, GAMMA0_GRW};
use crate::dynamics::IntegratorConfig;
use crate::ensemble::{
    run_ensemble, velocity_histogram_of, EnsembleOptions, EnsembleStats, InitialState, ScenarioConfig,
    VelocityHistogram,
};
use crate::error::{Error, Result};
use crate::gravity::{bound_state, SpringModel};
use crate::state::{EnvironmentSpec, NanosphereSpec, Vec3};

/// An initial spread in metres, or `"bound"` for the self-gravitating
/// bound state of the sphere.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SpreadValue {
    Metres(f64),
    Keyword(SpreadKeyword),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpreadKeyword {
    Bound,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum InitialSpread {
    One(SpreadValue),
    Many(Vec<SpreadValue>),
}

impl InitialSpread {
    pub fn values(&self) -> Vec<SpreadValue> {
        match self {
            InitialSpread::One(v) => vec![*v],
            InitialSpread::Many(v) => v.clone(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CurveKind {
    Free,
    Gravity,
    Decoherence,
    DecoherenceGravity,
}

impl CurveKind {
    pub const ALL: [CurveKind; 4] = [
        CurveKind::Free,
        CurveKind::Gravity,
        CurveKind::Decoherence,
        CurveKind::DecoherenceGravity,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CurveKind::Free => "free",
            CurveKind::Gravity => "gravity",
            CurveKind::Decoherence => "decoherence",
            CurveKind::DecoherenceGravity => "decoherence_gravity",
        }
    }

    pub fn gravity(self) -> bool {
        matches!(self, CurveKind::Gravity | CurveKind::DecoherenceGravity)
    }

    pub fn localized(self) -> bool {
        matches!(self, CurveKind::Decoherence | CurveKind::DecoherenceGravity)
    }
}

fn default_name() -> String {
    "custom".into()
}
fn default_internal_temperature() -> f64 {
    NanosphereSpec::DEFAULT_INTERNAL_TEMPERATURE
}
fn default_sample_count() -> usize {
    200
}
fn default_curves() -> Vec<CurveKind> {
    CurveKind::ALL.to_vec()
}
fn default_trajectories() -> u64 {
    10_000
}
fn default_bins() -> usize {
    50
}

/// The JSON run document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "default_name")]
    pub name: String,
    /// m
    pub radius: f64,
    /// kg m⁻³
    pub density: f64,
    /// K, default 2000.
    #[serde(default = "default_internal_temperature")]
    pub internal_temperature: f64,
    /// Default: the 16 K cryogenic setting.
    #[serde(default)]
    pub environment: EnvironmentSpec,
    pub initial_spread: InitialSpread,
    /// m s⁻¹, default at rest.
    #[serde(default)]
    pub initial_velocity: Vec3,
    /// Explicit localization channels.
    #[serde(default)]
    pub channels: Vec<JumpChannel>,
    /// Catalog mechanisms added as further channels.
    #[serde(default)]
    pub models: Vec<ModelId>,
    /// Continuous localization, m⁻² s⁻¹.
    #[serde(default)]
    pub qmupl_lambda: f64,
    /// s
    pub duration: f64,
    /// Evenly spaced samples over `[0, duration]`, default 200.
    #[serde(default = "default_sample_count")]
    pub sample_count: usize,
    /// Further sample times, s.
    #[serde(default)]
    pub extra_sample_times: Vec<f64>,
    #[serde(default = "default_curves")]
    pub curves: Vec<CurveKind>,
    /// Default 10000.
    #[serde(default = "default_trajectories")]
    pub trajectories: u64,
    #[serde(default)]
    pub seed: u64,
    /// Drop trajectories in which a channel labelled `gas` fired.
    #[serde(default)]
    pub filter_gas_collisions: bool,
    /// Sample times at which to histogram the mean velocities.
    #[serde(default)]
    pub histogram_times: Vec<f64>,
    #[serde(default = "default_bins")]
    pub histogram_bins: usize,
    #[serde(default)]
    pub integrator: IntegratorConfig,
}

fn config_err(path: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Config {
        path: path.into(),
        message: message.into(),
    }
}

fn positive(path: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(config_err(path, format!("must be positive and finite, got {v}")))
    }
}

fn non_negative(path: &str, v: f64) -> Result<()> {
    if v >= 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(config_err(path, format!("must be non-negative and finite, got {v}")))
    }
}

impl RunConfig {
    /// Minimal run with every default applied.
    pub fn new(radius: f64, density: f64, initial_spread: f64, duration: f64) -> Self {
        RunConfig {
            name: default_name(),
            radius,
            density,
            internal_temperature: default_internal_temperature(),
            environment: EnvironmentSpec::default(),
            initial_spread: InitialSpread::One(SpreadValue::Metres(initial_spread)),
            initial_velocity: [0.0; 3],
            channels: Vec::new(),
            models: Vec::new(),
            qmupl_lambda: 0.0,
            duration,
            sample_count: default_sample_count(),
            extra_sample_times: Vec::new(),
            curves: default_curves(),
            trajectories: default_trajectories(),
            seed: 0,
            filter_gas_collisions: false,
            histogram_times: Vec::new(),
            histogram_bins: default_bins(),
            integrator: IntegratorConfig::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        positive("radius", self.radius)?;
        positive("density", self.density)?;
        positive("internal_temperature", self.internal_temperature)?;
        let env = &self.environment;
        non_negative("environment.gas_temperature", env.gas_temperature)?;
        non_negative("environment.gas_pressure", env.gas_pressure)?;
        positive("environment.gas_molecule_mass", env.gas_molecule_mass)?;
        non_negative("environment.environment_temperature", env.environment_temperature)?;
        let spreads = self.initial_spread.values();
        if spreads.is_empty() {
            return Err(config_err("initial_spread", "needs at least one value"));
        }
        for (i, v) in spreads.iter().enumerate() {
            if let SpreadValue::Metres(s) = v {
                let path = match self.initial_spread {
                    InitialSpread::One(_) => "initial_spread".to_string(),
                    InitialSpread::Many(_) => format!("initial_spread[{i}]"),
                };
                positive(&path, *s)?;
            }
        }
        for (i, v) in self.initial_velocity.iter().enumerate() {
            if !v.is_finite() {
                return Err(config_err(format!("initial_velocity[{i}]"), "must be finite"));
            }
        }
        for (i, c) in self.channels.iter().enumerate() {
            positive(&format!("channels[{i}].gamma"), c.gamma)?;
            positive(&format!("channels[{i}].alpha"), c.alpha)?;
        }
        non_negative("qmupl_lambda", self.qmupl_lambda)?;
        non_negative("duration", self.duration)?;
        if self.sample_count == 0 {
            return Err(config_err("sample_count", "must be at least 1"));
        }
        for (i, &t) in self.extra_sample_times.iter().enumerate() {
            if !(t >= 0.0 && t <= self.duration) {
                return Err(config_err(
                    format!("extra_sample_times[{i}]"),
                    format!("{t} is outside [0, duration]"),
                ));
            }
        }
        if self.curves.is_empty() {
            return Err(config_err("curves", "needs at least one curve"));
        }
        if self.trajectories == 0 {
            return Err(config_err("trajectories", "must be at least 1"));
        }
        let samples = self.sample_times();
        for (i, t) in self.histogram_times.iter().enumerate() {
            if !samples.contains(t) {
                return Err(config_err(
                    format!("histogram_times[{i}]"),
                    format!("{t} is not a sample time"),
                ));
            }
        }
        if self.histogram_bins == 0 {
            return Err(config_err("histogram_bins", "must be at least 1"));
        }
        self.integrator
            .validate()
            .map_err(|e| config_err("integrator", e.to_string()))
    }

    pub fn sphere(&self) -> Result<NanosphereSpec> {
        Ok(NanosphereSpec::new(self.radius, self.density)?.with_internal_temperature(self.internal_temperature)?)
    }

    /// Even samples plus the extra times, sorted and deduplicated.
    pub fn sample_times(&self) -> Vec<f64> {
        let mut t = ScenarioConfig::even_samples(self.duration, self.sample_count);
        t.extend(&self.extra_sample_times);
        t.sort_by(f64::total_cmp);
        t.dedup();
        t
    }

    /// Initial spreads in metres, with `"bound"` resolved.
    pub fn resolved_spreads(&self) -> Result<Vec<f64>> {
        let sphere = self.sphere()?;
        self.initial_spread
            .values()
            .into_iter()
            .map(|v| match v {
                SpreadValue::Metres(s) => Ok(s),
                SpreadValue::Keyword(SpreadKeyword::Bound) => Ok(bound_state(&SpringModel::new(sphere))?.spread),
            })
            .collect()
    }

    /// Explicit channels followed by the catalog ones.
    pub fn resolved_channels(&self) -> Result<Vec<JumpChannel>> {
        let mut out = self.channels.clone();
        if !self.models.is_empty() {
            let cat = decoherence::catalog(&self.sphere()?, &self.environment, GAMMA0_GRW, ALPHA0_GRW)?;
            for id in &self.models {
                let p = cat
                    .models
                    .iter()
                    .find(|p| p.model == *id)
                    .expect("catalog covers all models");
                out.push(p.channel());
            }
        }
        Ok(out)
    }

    /// Whether localized curves differ from the unlocalized ones.
    pub fn has_localization(&self) -> bool {
        !self.channels.is_empty() || !self.models.is_empty() || self.qmupl_lambda > 0.0
    }

    /// The ensemble behind one curve.
    pub fn scenario(&self, kind: CurveKind, initial_spread: f64) -> Result<ScenarioConfig> {
        let localized = kind.localized();
        Ok(ScenarioConfig {
            sphere: self.sphere()?,
            environment: self.environment,
            initial: InitialState {
                spread: initial_spread,
                centre: [0.0; 3],
                velocity: self.initial_velocity,
            },
            gravity: kind.gravity(),
            channels: if localized {
                self.resolved_channels()?
            } else {
                Vec::new()
            },
            qmupl_lambda: if localized { self.qmupl_lambda } else { 0.0 },
            duration: self.duration,
            sample_times: self.sample_times(),
            // without jumps every trajectory is the same
            trajectory_count: if localized { self.trajectories } else { 1 },
            master_seed: self.seed,
            integrator: self.integrator.clone(),
        })
    }
}

/// Reads a run document, naming the offending key path on failure.
pub fn parse_config_str(text: &str) -> Result<RunConfig> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let cfg: RunConfig = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        config_err(path, e.into_inner().to_string())
    })?;
    cfg.validate()?;
    Ok(cfg)
}

pub fn parse_config(path: &Path) -> Result<RunConfig> {
    parse_config_str(&std::fs::read_to_string(path)?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Curve {
    /// File stem: the curve name, suffixed with the initial-condition index
    /// when there are several.
    pub label: String,
    pub kind: CurveKind,
    /// m
    pub initial_spread: f64,
    pub stats: EnsembleStats,
}

/// Difference `to - from` of the total spreads at one time. `to = None`
/// compares against the closed-form column of `from`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Gap {
    pub initial_spread: f64,
    pub t: f64,
    pub from: CurveKind,
    pub to: Option<CurveKind>,
    /// m
    pub value: f64,
    /// m
    pub standard_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunOutput {
    pub config: RunConfig,
    pub curves: Vec<Curve>,
    /// Gaps at the final time.
    pub gaps: Vec<Gap>,
    pub histograms: Vec<VelocityHistogram>,
}

const GAP_PAIRS: [(CurveKind, Option<CurveKind>); 6] = [
    (CurveKind::Free, Some(CurveKind::Gravity)),
    (CurveKind::Free, Some(CurveKind::DecoherenceGravity)),
    (CurveKind::Gravity, Some(CurveKind::DecoherenceGravity)),
    (CurveKind::Free, Some(CurveKind::Decoherence)),
    (CurveKind::Decoherence, Some(CurveKind::DecoherenceGravity)),
    (CurveKind::Decoherence, None),
];

impl RunOutput {
    pub fn curve(&self, kind: CurveKind, spread_index: usize) -> Option<&Curve> {
        self.curves.iter().filter(|c| c.kind == kind).nth(spread_index)
    }

    /// Gap between two curves of the same initial condition at sample `t`.
    pub fn gap(&self, from: CurveKind, to: Option<CurveKind>, t: f64, spread_index: usize) -> Option<Gap> {
        let a = self.curve(from, spread_index)?;
        let ra = a.stats.row_at(t)?;
        let (value, se) = match to {
            Some(k) => {
                let rb = self.curve(k, spread_index)?.stats.row_at(t)?;
                (
                    rb.total_spread - ra.total_spread,
                    ra.standard_error.hypot(rb.standard_error),
                )
            }
            None => (ra.analytic - ra.total_spread, ra.standard_error),
        };
        Some(Gap {
            initial_spread: a.initial_spread,
            t,
            from,
            to,
            value,
            standard_error: se,
        })
    }
}

/// Runs every requested curve for every initial spread.
pub fn run(config: &RunConfig, workers: usize) -> Result<RunOutput> {
    config.validate()?;
    let spreads = config.resolved_spreads()?;
    let options = EnsembleOptions {
        workers,
        post_select_without: config.filter_gas_collisions.then(|| ModelId::Gas.name().to_string()),
        keep_records: false,
        keep_velocities: false,
    };
    let mut curves = Vec::new();
    let mut histograms = Vec::new();
    for (i, &spread) in spreads.iter().enumerate() {
        for &kind in &config.curves {
            if kind.localized() && !config.has_localization() {
                continue;
            }
            let scenario = config.scenario(kind, spread)?;
            let histogram_source = i == 0
                && !config.histogram_times.is_empty()
                && histograms.is_empty()
                && (kind.localized() || !config.has_localization());
            let opts = EnsembleOptions {
                keep_velocities: histogram_source,
                ..options.clone()
            };
            let out = run_ensemble(&scenario, &opts)?;
            if histogram_source {
                for &t in &config.histogram_times {
                    let k = scenario
                        .sample_times
                        .iter()
                        .position(|&s| s == t)
                        .expect("validated sample time");
                    let v: Vec<Vec3> = out.velocities.iter().map(|row| row[k]).collect();
                    histograms.push(velocity_histogram_of(t, &v, config.histogram_bins));
                }
            }
            let label = if spreads.len() > 1 {
                format!("{}_{i}", kind.name())
            } else {
                kind.name().to_string()
            };
            curves.push(Curve {
                label,
                kind,
                initial_spread: spread,
                stats: out.stats,
            });
        }
    }
    let mut output = RunOutput {
        config: config.clone(),
        curves,
        gaps: Vec::new(),
        histograms,
    };
    for i in 0..spreads.len() {
        for (from, to) in GAP_PAIRS {
            if let Some(g) = output.gap(from, to, config.duration, i) {
                output.gaps.push(g);
            }
        }
    }
    Ok(output)
}

/// Dump of the decoherence tables at the reference radii.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TablesReport {
    pub catalogs: Vec<Catalog>,
    pub checks: Vec<ReferenceCheck>,
    /// `(radius, computed, reference)` for the critical strength, using the
    /// regime-appropriate estimate.
    pub critical: Vec<(f64, f64, f64)>,
}

pub fn tables() -> Result<TablesReport> {
    let env = EnvironmentSpec::default();
    let mut catalogs = Vec::new();
    let mut critical = Vec::new();
    for &(radius, reference) in decoherence::REFERENCE_CRITICAL {
        let sphere = NanosphereSpec::new(radius, NanosphereSpec::SILICATE_DENSITY)?;
        let cat = decoherence::catalog(&sphere, &env, GAMMA0_GRW, ALPHA0_GRW)?;
        critical.push((radius, cat.critical_lambda.estimate(), reference));
        catalogs.push(cat);
    }
    Ok(TablesReport {
        catalogs,
        checks: decoherence::reference_checks()?,
        critical,
    })
}

/// A named, built-in run.
#[derive(Debug, Clone, PartialEq)]
pub enum Preset {
    Run(Box<RunConfig>),
    Tables,
}

pub const PRESET_NAMES: [&str; 8] = [
    "fig1",
    "fig2_gold_strong",
    "fig3_silicate_dp",
    "fig4_gold_dp",
    "fig5_gold_strong_long",
    "fig6_gold_weak_wide",
    "tailoring",
    "tables",
];

fn localized(name: &str, density: f64, spread: f64, alpha: f64, duration: f64, extra: &[f64]) -> RunConfig {
    let mut c = RunConfig::new(1e-7, density, spread, duration);
    c.name = name.into();
    c.channels = vec![JumpChannel {
        label: "localization".into(),
        gamma: 1.0,
        alpha,
    }];
    c.extra_sample_times = extra.to_vec();
    c
}

pub fn preset(name: &str) -> Option<Preset> {
    let gold = NanosphereSpec::GOLD_DENSITY;
    let silicate = NanosphereSpec::SILICATE_DENSITY;
    let cfg = match name {
        "fig1" => {
            let mut c = RunConfig::new(1e-7, 2650.0, 1e-9, 86_400.0);
            c.name = name.into();
            c.initial_spread = InitialSpread::Many(vec![
                SpreadValue::Metres(1e-9),
                SpreadValue::Metres(1e-8),
                SpreadValue::Metres(1e-7),
                SpreadValue::Keyword(SpreadKeyword::Bound),
                SpreadValue::Metres(4e-7),
            ]);
            c.curves = vec![CurveKind::Free, CurveKind::Gravity];
            c
        }
        "fig2_gold_strong" => localized(name, gold, 1e-9, 1e18, 300.0, &[270.0]),
        "fig3_silicate_dp" => localized(name, silicate, 1e-7, 1e13, 300.0, &[200.0, 270.0]),
        "fig4_gold_dp" => localized(name, gold, 1e-9, 1e13, 1000.0, &[900.0]),
        "fig5_gold_strong_long" => localized(name, gold, 1e-9, 1e16, 1000.0, &[900.0]),
        "fig6_gold_weak_wide" => localized(name, gold, 1e-7, 1e11, 1000.0, &[200.0]),
        "tailoring" => {
            let mut c = RunConfig::new(1e-7, gold, 1e-11, 1.0);
            c.name = name.into();
            c.channels = vec![JumpChannel {
                label: "photons".into(),
                gamma: 1e3,
                alpha: 1e16,
            }];
            c.curves = vec![CurveKind::Free, CurveKind::Decoherence];
            c.extra_sample_times = vec![0.01, 0.02, 0.1, 0.2];
            c.histogram_times = vec![0.01, 0.2];
            c
        }
        "tables" => return Some(Preset::Tables),
        _ => return None,
    };
    Some(Preset::Run(Box::new(cfg)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_document_takes_defaults() {
        let cfg =
            parse_config_str(r#"{"radius": 1e-7, "density": 2600, "initial_spread": 1e-8, "duration": 10}"#).unwrap();
        assert_eq!(cfg, RunConfig::new(1e-7, 2600.0, 1e-8, 10.0));
        assert_eq!(cfg.sample_times().len(), 200);
        assert_eq!(cfg.trajectories, 10_000);
    }

    #[test]
    fn errors_name_the_key() {
        let e =
            parse_config_str(r#"{"radius": -1, "density": 2600, "initial_spread": 1e-8, "duration": 10}"#).unwrap_err();
        assert!(matches!(&e, Error::Config { path, .. } if path == "radius"), "{e}");
        let e = parse_config_str(
            r#"{"radius": 1e-7, "density": 2600, "initial_spread": 1e-8, "duration": 10, "colour": 1}"#,
        )
        .unwrap_err();
        assert!(e.to_string().contains("colour"), "{e}");
        let e = parse_config_str(
            r#"{"radius": 1e-7, "density": 2600, "initial_spread": 1e-8, "duration": 10,
                "channels": [{"label": "x", "gamma": "fast", "alpha": 1}]}"#,
        )
        .unwrap_err();
        assert!(
            matches!(&e, Error::Config { path, .. } if path == "channels[0].gamma"),
            "{e}"
        );
        let e = parse_config_str(r#"{"radius": 1e-7, "density": 2600, "duration": 10}"#).unwrap_err();
        assert!(e.to_string().contains("initial_spread"), "{e}");
        let e = parse_config_str(r#"{"radius": 1e-7, "density": 2600, "initial_spread": [1e-8, -2], "duration": 10}"#)
            .unwrap_err();
        assert!(
            matches!(&e, Error::Config { path, .. } if path == "initial_spread[1]"),
            "{e}"
        );
    }

    #[test]
    fn presets_round_trip_through_json() {
        for name in PRESET_NAMES {
            if let Some(Preset::Run(cfg)) = preset(name) {
                let text = serde_json::to_string_pretty(&cfg).unwrap();
                assert_eq!(parse_config_str(&text).unwrap(), *cfg, "{name}");
            }
        }
        assert!(preset("fig7").is_none());
    }

    #[test]
    fn bound_keyword_resolves() {
        let Some(Preset::Run(cfg)) = preset("fig1") else {
            panic!()
        };
        let s = cfg.resolved_spreads().unwrap();
        let bound = bound_state(&SpringModel::new(cfg.sphere().unwrap())).unwrap().spread;
        assert_eq!(s[3], bound);
        assert_eq!(s.len(), 5);
    }

    #[test]
    fn catalog_models_become_channels() {
        let mut cfg = RunConfig::new(1e-7, 2600.0, 1e-8, 1.0);
        cfg.models = vec![ModelId::Gas, ModelId::Grw];
        let ch = cfg.resolved_channels().unwrap();
        assert_eq!(ch.iter().map(|c| c.label.as_str()).collect::<Vec<_>>(), ["gas", "grw"]);
        assert!(cfg.has_localization());
    }

    #[test]
    fn run_builds_curves_and_gaps() {
        let mut cfg = RunConfig::new(1e-7, 2600.0, 1e-8, 5.0);
        cfg.channels = vec![JumpChannel::new("grw", 1.0, 1e16).unwrap()];
        cfg.sample_count = 6;
        cfg.trajectories = 50;
        let out = run(&cfg, 1).unwrap();
        let labels: Vec<_> = out.curves.iter().map(|c| c.label.as_str()).collect();
        assert_eq!(labels, ["free", "gravity", "decoherence", "decoherence_gravity"]);
        assert_eq!(out.gaps.len(), 6);
        assert_eq!(out.curve(CurveKind::Free, 0).unwrap().stats.trajectory_count, 1);
        assert_eq!(out.curve(CurveKind::Decoherence, 0).unwrap().stats.trajectory_count, 50);
        let g = out.gap(CurveKind::Free, Some(CurveKind::Decoherence), 5.0, 0).unwrap();
        assert!(g.value > 0.0);
    }

    #[test]
    fn tables_cover_reference_radii() {
        let t = tables().unwrap();
        assert_eq!(t.catalogs.len(), 4);
        assert_eq!(t.checks.len(), 2 * decoherence::REFERENCE_VALUES.len());
        assert_eq!(t.critical.len(), 4);
    }
}
