use approx::assert_relative_eq;
use proptest::prelude::*;

use super::*;
use crate::dynamics::free_closed_form;

fn base(channels: Vec<JumpChannel>, n: u64) -> ScenarioConfig {
    ScenarioConfig {
        sphere: NanosphereSpec::new(1e-7, NanosphereSpec::SILICATE_DENSITY).unwrap(),
        environment: EnvironmentSpec::default(),
        initial: InitialState {
            spread: 1e-8,
            centre: [0.0; 3],
            velocity: [0.0; 3],
        },
        gravity: false,
        channels,
        qmupl_lambda: 0.0,
        duration: 10.0,
        sample_times: ScenarioConfig::even_samples(10.0, 11),
        trajectory_count: n,
        master_seed: 7,
        integrator: IntegratorConfig::default(),
    }
}

fn grw() -> JumpChannel {
    JumpChannel::new("grw", 1.0, 1e16).unwrap()
}

#[test]
fn deterministic_ensemble_has_no_centre_spread() {
    let cfg = base(vec![], 3);
    let out = run_ensemble(&cfg, &EnsembleOptions::default()).unwrap();
    let s0 = cfg.initial_state().unwrap();
    for row in &out.stats.rows {
        let exact = free_closed_form(&s0, row.t, &cfg.sphere).unwrap().spread();
        assert_relative_eq!(row.total_spread, exact, max_relative = 1e-9);
        assert_eq!(row.centre_variance, 0.0);
        assert_relative_eq!(row.analytic, exact, max_relative = 1e-12);
    }
}

#[test]
fn analytic_reference_values() {
    let m = 1e-17;
    let r2 = 1e-16;
    let h = SI.hbar;
    assert_eq!(analytic_grw_spread(0.0, r2, m, 1e20), 1e-8);
    let t = 3.0;
    let expected = (r2 + 9.0 * h * h * t * t / (4.0 * m * m * r2) + 1e16 * h * h * t * t * t / (2.0 * m * m)).sqrt();
    assert_relative_eq!(analytic_grw_spread(t, r2, m, 1e16), expected, max_relative = 1e-14);
    assert_relative_eq!(
        equilibrium_spread(1e-17, 1e16).unwrap(),
        (h / 1e-1).powf(0.25),
        max_relative = 1e-14
    );
    assert!(equilibrium_spread(0.0, 1.0).is_err());
}

#[test]
fn grw_ensemble_follows_closed_form() {
    let cfg = base(vec![grw()], 2000);
    let out = run_ensemble(&cfg, &EnsembleOptions::default()).unwrap();
    assert_eq!(out.stats.trajectory_count, 2000);
    for row in &out.stats.rows[1..] {
        let z = (row.total_spread - row.analytic) / row.standard_error;
        assert!(
            z.abs() < 4.0,
            "t={} total={} analytic={} se={}",
            row.t,
            row.total_spread,
            row.analytic,
            row.standard_error
        );
    }
}

#[test]
fn worker_count_does_not_change_results() {
    let mut cfg = base(vec![grw()], 600);
    cfg.gravity = true;
    let one = run_ensemble(&cfg, &EnsembleOptions::default()).unwrap();
    let three = run_ensemble(
        &cfg,
        &EnsembleOptions {
            workers: 3,
            ..Default::default()
        },
    )
    .unwrap();
    assert_eq!(one.stats, three.stats);
}

#[test]
fn trajectories_are_reproducible_and_sampled_once_each() {
    let mut cfg = base(vec![grw()], 1);
    cfg.sample_times = vec![0.0, 0.0, 2.5, 5.0, 10.0];
    let a = run_trajectory(&cfg, 11).unwrap();
    let b = run_trajectory(&cfg, 11).unwrap();
    let c = run_trajectory(&cfg, 12).unwrap();
    assert_eq!(a, b);
    assert_ne!(a.jumps, c.jumps);
    assert_eq!(a.snapshots.len(), 5);
    assert_eq!(a.snapshots[0].spread, 1e-8);
    for (s, t) in a.snapshots.iter().zip(&cfg.sample_times) {
        assert_eq!(s.time, *t);
    }
    for j in &a.jumps {
        assert!(j.post_spread < j.pre_spread);
    }
}

#[test]
fn sample_at_jump_time_sees_pre_jump_state() {
    let cfg0 = base(vec![grw()], 1);
    let rec = run_trajectory(&cfg0, 3).unwrap();
    let jump = rec.jumps[0];
    let mut cfg = cfg0.clone();
    cfg.sample_times = vec![jump.time];
    let rec = run_trajectory(&cfg, 3).unwrap();
    assert_relative_eq!(rec.snapshots[0].spread, jump.pre_spread, max_relative = 1e-9);
}

#[test]
fn post_selection_drops_trajectories_with_gas_events() {
    let gas = JumpChannel::new("gas", 0.1, 1e16).unwrap();
    let cfg = base(vec![grw(), gas], 200);
    let all = run_ensemble(
        &cfg,
        &EnsembleOptions {
            keep_records: true,
            ..Default::default()
        },
    )
    .unwrap();
    let hit = all
        .records
        .iter()
        .filter(|r| r.jumps.iter().any(|j| j.channel == 1))
        .count() as u64;
    assert!(hit > 100 && hit < 200);
    let kept = run_ensemble(
        &cfg,
        &EnsembleOptions {
            keep_records: true,
            post_select_without: Some("gas".into()),
            ..Default::default()
        },
    )
    .unwrap();
    assert_eq!(kept.stats.dropped, hit);
    assert_eq!(kept.stats.trajectory_count, 200 - hit);
    assert!(kept.records.iter().all(|r| r.jumps.iter().all(|j| j.channel == 0)));
}

#[test]
fn failing_trajectory_reports_its_index() {
    let mut cfg = base(vec![grw()], 2);
    cfg.integrator.max_steps = 1;
    cfg.gravity = true;
    match run_ensemble(&cfg, &EnsembleOptions::default()) {
        Err(Error::Trajectory { index, .. }) => assert_eq!(index, 0),
        other => panic!("expected a trajectory error, got {other:?}"),
    }
}

#[test]
fn config_validation() {
    let mut cfg = base(vec![], 1);
    cfg.sample_times = vec![1.0, 0.5];
    assert!(cfg.validate().is_err());
    let mut cfg = base(vec![], 1);
    cfg.sample_times = vec![11.0];
    assert!(cfg.validate().is_err());
    let mut cfg = base(vec![], 0);
    assert!(cfg.validate().is_err());
    cfg.trajectory_count = 1;
    cfg.initial.spread = -1.0;
    assert!(cfg.validate().is_err());
}

#[test]
fn csv_round_trip_and_empty_output() {
    let cfg = base(vec![grw()], 20);
    let stats = run_ensemble(&cfg, &EnsembleOptions::default()).unwrap().stats;
    let mut buf = Vec::new();
    stats.write_csv(&mut buf).unwrap();
    let text = String::from_utf8(buf.clone()).unwrap();
    assert!(!text.contains('\r'));
    let rows = EnsembleStats::read_csv(buf.as_slice()).unwrap();
    assert_eq!(rows.len(), stats.rows.len());
    for (a, b) in rows.iter().zip(&stats.rows) {
        assert_eq!(a[0], b.t);
        assert_eq!(a[1], b.total_spread);
        assert_eq!(a[2], b.individual_rms());
        assert_eq!(a[3], b.centre_rms());
        assert_eq!(a[4], b.standard_error);
        assert_eq!(a[5], b.analytic);
    }
    let mut buf = Vec::new();
    EnsembleStats::default().write_csv(&mut buf).unwrap();
    assert_eq!(String::from_utf8(buf).unwrap(), format!("{CSV_HEADER}\n"));
}

#[test]
fn stats_json_round_trip() {
    let cfg = base(vec![grw()], 10);
    let stats = run_ensemble(&cfg, &EnsembleOptions::default()).unwrap().stats;
    let back: EnsembleStats = serde_json::from_str(&serde_json::to_string(&stats).unwrap()).unwrap();
    assert_eq!(back, stats);
}

#[test]
fn histogram_of_resting_ensemble_is_a_spike_at_zero() {
    let cfg = base(vec![], 5);
    let out = run_ensemble(
        &cfg,
        &EnsembleOptions {
            keep_records: true,
            ..Default::default()
        },
    )
    .unwrap();
    let h = velocity_histogram(&out.records, 10.0, 20).unwrap();
    assert_eq!(h.modulus.counts[0], 5);
    assert_eq!(h.modulus.total(), 5);
    assert_eq!(h.modulus.peak(), 0.0);
    assert!(velocity_histogram(&out.records, 3.3, 20).is_err());
}

#[test]
fn histogram_binning() {
    let h = Histogram::new(&[0.05, 0.15, 0.15, 0.95, 1.0], 0.0, 1.0, 10);
    assert_eq!(h.counts, vec![1, 2, 0, 0, 0, 0, 0, 0, 0, 2]);
    assert_relative_eq!(h.peak(), 0.15, max_relative = 1e-12);
    let v = velocity_histogram_of(0.0, &[[3.0, 4.0, 0.0], [0.0, 0.0, -1.0]], 5);
    assert_eq!(v.modulus.edges.last(), Some(&5.0));
    assert_eq!(v.axes[2].counts, vec![0, 0, 2, 0, 0]);
    assert_eq!(v.axes[0].counts, vec![0, 0, 1, 0, 1]);
}

#[test]
fn kept_velocities_match_records() {
    let cfg = base(vec![grw()], 8);
    let out = run_ensemble(
        &cfg,
        &EnsembleOptions {
            keep_records: true,
            keep_velocities: true,
            ..Default::default()
        },
    )
    .unwrap();
    for (r, v) in out.records.iter().zip(&out.velocities) {
        let from_record: Vec<Vec3> = r.snapshots.iter().map(|s| s.velocity).collect();
        assert_eq!(&from_record, v);
    }
}

proptest! {
    #[test]
    fn moments_decompose_total_spread(
        samples in proptest::collection::vec((1e-9f64..1e-7, -1e-7f64..1e-7, -1e-7f64..1e-7), 2..40)
    ) {
        let mut m = Moments::default();
        for &(s, x, y) in &samples {
            m.push(s * s, [x, y, 0.0]);
        }
        let row = m.row(1.0, 0.0);
        let n = samples.len() as f64;
        let mean_s2 = samples.iter().map(|p| p.0 * p.0).sum::<f64>() / n;
        let mx = samples.iter().map(|p| p.1).sum::<f64>() / n;
        let my = samples.iter().map(|p| p.2).sum::<f64>() / n;
        let cv = samples.iter().map(|p| (p.1 - mx).powi(2) + (p.2 - my).powi(2)).sum::<f64>() / n;
        prop_assert!((row.mean_individual_variance - mean_s2).abs() <= 1e-10 * mean_s2);
        prop_assert!((row.centre_variance - cv).abs() <= 1e-9 * (cv + mean_s2));
        prop_assert!((row.total_spread.powi(2) - (mean_s2 + cv)).abs() <= 1e-9 * (mean_s2 + cv));
        prop_assert!(row.standard_error >= 0.0);
    }
}
