//! Sliding-window θ trajectories on seeded fixtures.

mod common;

use std::fs;

use ndarray::Array2;
use transient_scatter::cli::{cmd_monitor, cmd_synth, SynthKind, SynthParams};
use transient_scatter::detection::{plan_windows, theta_trajectory};
use transient_scatter::{Pipeline, PipelineConfig, Signal};

fn row_l1(t: &Array2<f64>, a: usize, b: usize) -> f64 {
    t.row(a).iter().zip(t.row(b).iter()).map(|(p, q)| (p - q).abs()).sum()
}

fn monitor_fixture(params: &SynthParams, window_len: usize, hop: usize) -> (Vec<usize>, Array2<f64>) {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("in.csv");
    cmd_synth(params, &input).unwrap();
    let cfg = PipelineConfig {
        window_len,
        hop,
        ..PipelineConfig::default()
    };
    let (_, mut results) = cmd_monitor(&input, &cfg, &dir.path().join("out")).unwrap();
    let (ch, plan, traj) = results.remove(0);
    let csv = fs::read_to_string(dir.path().join("out").join(&ch.dir).join("theta_trajectory.csv")).unwrap();
    assert_eq!(csv.lines().count(), plan.count() + 1);
    assert!(csv.starts_with("lambda2_2.0000,"));
    (plan.starts, traj)
}

#[test]
fn regime_change_stands_out() {
    // Three minutes at 1 kHz with spikes switched on after two minutes.
    let params = SynthParams {
        kind: SynthKind::Regime,
        n: 180_000,
        switch_at: 120_000,
        seed: 0,
        ..SynthParams::default()
    };
    let (window, hop) = (10_000, 5_000);
    let (starts, traj) = monitor_fixture(&params, window, hop);
    let mean_change = |w: usize| row_l1(&traj, w, w + 1) / traj.ncols() as f64;
    let one_regime = |s: usize| s + window <= params.switch_at || s >= params.switch_at;
    let (mut within, mut across) = (Vec::new(), Vec::new());
    for w in 0..starts.len() - 1 {
        let same_side = (starts[w] + window <= params.switch_at) == (starts[w + 1] + window <= params.switch_at);
        if one_regime(starts[w]) && one_regime(starts[w + 1]) && same_side {
            within.push(mean_change(w));
        } else {
            across.push(mean_change(w));
        }
    }
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let ratio = mean(&across) / mean(&within);
    assert!(
        ratio >= 3.0,
        "across {:.4} within {:.4} ratio {ratio:.2}",
        mean(&across),
        mean(&within)
    );
}

#[test]
fn white_noise_rows_are_stable() {
    let params = SynthParams {
        kind: SynthKind::Noise,
        alpha: 0.0,
        n: 66_000,
        seed: 0,
        ..SynthParams::default()
    };
    let (starts, traj) = monitor_fixture(&params, 60_000, 2_000);
    assert_eq!(starts.len(), 4);
    let worst = (0..starts.len() - 1)
        .map(|w| row_l1(&traj, w, w + 1))
        .fold(0.0, f64::max);
    assert!(worst <= 0.3, "max row-to-row L1 {worst}");
}

#[test]
fn burst_in_one_window_raises_its_theta() {
    let window = 4096;
    let mut r = common::rng(11);
    let mut x: Vec<f64> = common::uniform_signal(&mut r, 4 * window)
        .iter()
        .map(|v| 0.1 * v)
        .collect();
    let center = 2 * window + window / 2;
    for (t, v) in x.iter_mut().enumerate() {
        let o = t as f64 - center as f64;
        *v += 3.0 * (-0.5 * (o / 3.0).powi(2)).exp() * (1.1 * o).cos();
    }
    let pipeline = Pipeline::new(PipelineConfig::default()).unwrap();
    let plan = plan_windows(x.len(), window, window).unwrap();
    let traj = theta_trajectory(&Signal::from_samples(x).unwrap(), &plan, &pipeline).unwrap();
    let row_max = |w: usize| traj.row(w).iter().copied().fold(0.0, f64::max);
    let quiet = [0, 1, 3].map(row_max).into_iter().fold(0.0, f64::max);
    assert!(row_max(2) > quiet, "burst row {} vs quiet {quiet}", row_max(2));
}

#[test]
fn constant_signal_gives_zero_rows() {
    let pipeline = Pipeline::new(PipelineConfig::default()).unwrap();
    let plan = plan_windows(5000, 1000, 500).unwrap();
    let traj = theta_trajectory(&Signal::from_samples(vec![2.5; 5000]).unwrap(), &plan, &pipeline).unwrap();
    assert_eq!(traj.dim(), (9, 20));
    assert!(traj.iter().all(|v| *v == 0.0));
}

#[test]
fn non_overlapping_windows_give_one_row_each() {
    let params = SynthParams {
        kind: SynthKind::Chirp,
        n: 10_000,
        ..SynthParams::default()
    };
    let (starts, traj) = monitor_fixture(&params, 2_000, 2_000);
    assert_eq!(starts, vec![0, 2000, 4000, 6000, 8000]);
    assert_eq!(traj.nrows(), plan_windows(10_000, 2_000, 2_000).unwrap().count());
    assert!(traj.iter().all(|v| (0.0..=1.0).contains(v)));
}
