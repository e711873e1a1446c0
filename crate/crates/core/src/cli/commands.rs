use std::path::{Path, PathBuf};

use ndarray::{s, Array2, ArrayView2};
use serde::Serialize;

use super::io::{
    channel_dir_name, f64_le_bytes, matrix_csv, scale_header, table_csv, write_atomic, BinarySidecar, SignalFile,
};
use super::manifest::{Manifest, OutputDir};
use super::synth::{synthesize, GroundTruth, SynthParams};
use crate::config::PipelineConfig;
use crate::detection::{
    detect_from_analysis, feature_dimension, plan_windows, theta_trajectory, DetectionResult, WindowPlan,
};
use crate::error::{Error, Result};
use crate::pipeline::Pipeline;
use crate::representation::select_representatives;
use crate::signal::Signal;

/// What `analyze` writes besides the CSV/JSON defaults.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct AnalyzeOptions {
    /// Also dump `u1`, `s1`, `u2`, `s2` and `rx` as raw little-endian `f64`.
    pub binary: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ChannelSummary {
    pub name: String,
    pub dir: String,
    pub n: usize,
}

#[derive(Clone, Debug, Serialize)]
struct IntervalRecord {
    start: usize,
    end: usize,
    cluster: usize,
}

#[derive(Clone, Debug, Serialize)]
struct DetectionJson<'a> {
    k: usize,
    labels_path: &'a str,
    intervals: Vec<IntervalRecord>,
    config_echo: &'a PipelineConfig,
    frame_len: usize,
    n_samples: usize,
    sample_rate_hz: f64,
    intervals_seconds: Vec<[f64; 2]>,
    silhouettes: Vec<(usize, f64)>,
}

#[derive(Clone, Debug, Serialize)]
struct AnalysisSummary<'a> {
    channel: &'a str,
    n_samples: usize,
    reducer: String,
    p: f64,
    scales1: &'a [f64],
    scales2: &'a [f64],
    representatives: Option<Vec<usize>>,
}

fn load_channels(input: &Path) -> Result<(SignalFile, Vec<String>)> {
    let file = SignalFile::read(input)?;
    let mut dirs: Vec<String> = Vec::with_capacity(file.names.len());
    for (i, name) in file.names.iter().enumerate() {
        let dir = channel_dir_name(name, i, &dirs);
        dirs.push(dir);
    }
    Ok((file, dirs))
}

fn signal_for(file: &SignalFile, channel: usize, cfg: &PipelineConfig) -> Result<Signal> {
    Signal::new(file.channels[channel].clone(), cfg.sample_rate_hz)
}

fn feature_dim(cfg: &PipelineConfig) -> usize {
    feature_dimension(cfg.j1, cfg.q1, cfg.j2, cfg.q2, cfg.reducer)
}

fn dump(out: &mut OutputDir, name: &str, values: &[f64], shape: &[usize], axes: &[&str]) -> Result<()> {
    out.write(&format!("{name}.bin"), &f64_le_bytes(values.iter().copied()))?;
    out.write_json(
        &format!("{name}.json"),
        &BinarySidecar {
            dtype: "f64le".into(),
            shape: shape.to_vec(),
            axes: axes.iter().map(|a| a.to_string()).collect(),
        },
    )
}

/// Scattering coefficients and the transient representation for every
/// channel of `input`.
pub fn cmd_analyze(
    input: &Path,
    config: &PipelineConfig,
    out_dir: &Path,
    options: AnalyzeOptions,
) -> Result<(Manifest, Vec<ChannelSummary>)> {
    let pipeline = Pipeline::new(config.clone())?;
    let (file, dirs) = load_channels(input)?;
    let mut out = OutputDir::create(out_dir)?;
    let mut summaries = Vec::new();
    let header1 = scale_header("lambda1", pipeline.scales1().scales());
    let header2 = scale_header("lambda2", pipeline.scales2().scales());

    for (ch, dir) in dirs.iter().enumerate() {
        let signal = signal_for(&file, ch, config)?;
        let a = pipeline.analyze(signal.samples())?;
        let n = signal.len();
        let (c, r) = (&a.coeffs, &a.rep);

        out.write(&format!("{dir}/lx.csv"), &matrix_csv(&header2, r.lx.view())?)?;
        out.write_json(&format!("{dir}/theta.json"), &r.theta)?;
        out.write(&format!("{dir}/m.csv"), &table_csv(&header2, r.m.view())?)?;
        let s0 = ArrayView2::from_shape((1, n), &c.s0).expect("1 x n view");
        out.write(&format!("{dir}/s0.csv"), &matrix_csv(&["s0".to_string()], s0)?)?;
        out.write(&format!("{dir}/s1.csv"), &matrix_csv(&header1, c.s1.view())?)?;
        for k in 0..pipeline.scales2().len() {
            out.write(
                &format!("{dir}/s2_{k}.csv"),
                &matrix_csv(&header1, c.s2.slice(s![.., k, ..]))?,
            )?;
        }
        out.write_json(
            &format!("{dir}/summary.json"),
            &AnalysisSummary {
                channel: &file.names[ch],
                n_samples: n,
                reducer: r.reducer.to_string(),
                p: r.p,
                scales1: pipeline.scales1().scales(),
                scales2: pipeline.scales2().scales(),
                representatives: r.theta.as_deref().map(select_representatives),
            },
        )?;
        if options.binary {
            let (l1, l2) = (pipeline.scales1().len(), pipeline.scales2().len());
            let to_vec = |a: ndarray::ArrayViewD<f64>| a.iter().copied().collect::<Vec<_>>();
            dump(
                &mut out,
                &format!("{dir}/u1"),
                &to_vec(c.u1.view().into_dyn()),
                &[l1, n],
                &["lambda1", "t"],
            )?;
            dump(
                &mut out,
                &format!("{dir}/s1"),
                &to_vec(c.s1.view().into_dyn()),
                &[l1, n],
                &["lambda1", "t"],
            )?;
            let axes3 = ["lambda1", "lambda2", "t"];
            dump(
                &mut out,
                &format!("{dir}/u2"),
                &to_vec(c.u2.view().into_dyn()),
                &[l1, l2, n],
                &axes3,
            )?;
            dump(
                &mut out,
                &format!("{dir}/s2"),
                &to_vec(c.s2.view().into_dyn()),
                &[l1, l2, n],
                &axes3,
            )?;
            dump(
                &mut out,
                &format!("{dir}/rx"),
                &to_vec(r.rx.view().into_dyn()),
                &[l1, l2, n],
                &axes3,
            )?;
        }
        summaries.push(ChannelSummary {
            name: file.names[ch].clone(),
            dir: dir.clone(),
            n,
        });
    }
    let manifest = out.finish("analyze", Some(input), config, feature_dim(config))?;
    Ok((manifest, summaries))
}

/// Frame clustering and transient intervals for every channel.
pub fn cmd_detect(
    input: &Path,
    config: &PipelineConfig,
    out_dir: &Path,
) -> Result<(Manifest, Vec<(ChannelSummary, DetectionResult)>)> {
    let pipeline = Pipeline::new(config.clone())?;
    let (file, dirs) = load_channels(input)?;
    let mut out = OutputDir::create(out_dir)?;
    let mut results = Vec::new();

    for (ch, dir) in dirs.iter().enumerate() {
        let signal = signal_for(&file, ch, config)?;
        let analysis = pipeline.analyze(signal.samples())?;
        let result = detect_from_analysis(&analysis, &pipeline)?;
        let n = signal.len();

        let labels = Array2::from_shape_fn((result.labels.len(), 2), |(f, c)| {
            if c == 0 {
                f as f64
            } else {
                result.labels[f] as f64
            }
        });
        out.write(
            &format!("{dir}/labels.csv"),
            &table_csv(&["frame".into(), "label".into()], labels.view())?,
        )?;
        let spans = Array2::from_shape_fn((result.intervals.len(), 2), |(i, c)| {
            let iv = &result.intervals[i];
            (if c == 0 { iv.start } else { iv.end }) as f64
        });
        out.write(
            &format!("{dir}/intervals.csv"),
            &table_csv(&["start_sample".into(), "end_sample".into()], spans.view())?,
        )?;
        let rate = config.sample_rate_hz;
        out.write_json(
            &format!("{dir}/detection.json"),
            &DetectionJson {
                k: result.k,
                labels_path: "labels.csv",
                intervals: result
                    .intervals
                    .iter()
                    .map(|iv| IntervalRecord {
                        start: iv.start,
                        end: iv.end,
                        cluster: iv.cluster,
                    })
                    .collect(),
                config_echo: config,
                frame_len: result.frame_len,
                n_samples: n,
                sample_rate_hz: rate,
                intervals_seconds: result
                    .intervals
                    .iter()
                    .map(|iv| [iv.start as f64 / rate, (iv.end + 1) as f64 / rate])
                    .collect(),
                silhouettes: result.silhouettes.clone(),
            },
        )?;
        results.push((
            ChannelSummary {
                name: file.names[ch].clone(),
                dir: dir.clone(),
                n,
            },
            result,
        ));
    }
    let manifest = out.finish("detect", Some(input), config, feature_dim(config))?;
    Ok((manifest, results))
}

/// One channel's window plan and `θ` trajectory.
pub type MonitorChannel = (ChannelSummary, WindowPlan, Array2<f64>);

/// Sliding-window `θ` trajectory (windows × `|Λ₂|`) for every channel.
pub fn cmd_monitor(input: &Path, config: &PipelineConfig, out_dir: &Path) -> Result<(Manifest, Vec<MonitorChannel>)> {
    let pipeline = Pipeline::new(config.clone())?;
    let (file, dirs) = load_channels(input)?;
    let plan = plan_windows(file.len(), config.window_len, config.hop)?;
    let mut out = OutputDir::create(out_dir)?;
    let header2 = scale_header("lambda2", pipeline.scales2().scales());
    let mut results = Vec::new();

    for (ch, dir) in dirs.iter().enumerate() {
        let signal = signal_for(&file, ch, config)?;
        let trajectory = theta_trajectory(&signal, &plan, &pipeline)?;
        out.write(
            &format!("{dir}/theta_trajectory.csv"),
            &table_csv(&header2, trajectory.view())?,
        )?;
        out.write_json(&format!("{dir}/windows.json"), &plan)?;
        results.push((
            ChannelSummary {
                name: file.names[ch].clone(),
                dir: dir.clone(),
                n: signal.len(),
            },
            plan.clone(),
            trajectory,
        ));
    }
    let manifest = out.finish("monitor", Some(input), config, feature_dim(config))?;
    Ok((manifest, results))
}

/// Path of the ground-truth sidecar written next to a synthesized signal.
pub fn truth_path(signal_path: &Path) -> PathBuf {
    signal_path.with_extension("truth.json")
}

/// Writes a one-channel signal file and its ground-truth sidecar.
pub fn cmd_synth(params: &SynthParams, out_path: &Path) -> Result<GroundTruth> {
    let synth = synthesize(params)?;
    if let Some(parent) = out_path.parent().filter(|p| !p.as_os_str().is_empty()) {
        super::io::create_dir(parent)?;
    }
    let file = SignalFile::single(params.kind.to_string(), synth.samples);
    write_atomic(out_path, &file.to_csv_bytes()?)?;
    let mut truth = serde_json::to_string_pretty(&synth.truth).map_err(|e| Error::Pipeline(e.to_string()))?;
    truth.push('\n');
    write_atomic(&truth_path(out_path), truth.as_bytes())?;
    Ok(synth.truth)
}
