use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use transient_scatter::cli::{
    cmd_analyze, cmd_detect, cmd_monitor, cmd_synth, run_selfcheck, truth_path, AnalyzeOptions, SynthKind, SynthParams,
};
use transient_scatter::{Error, PipelineConfig, Reducer, Result};

/// Scattering-based transient representation and detection.
#[derive(Parser, Debug)]
#[command(name = "tscatter", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Flat key=value configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (synth: output file).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Overrides the configured reducer.
    #[arg(long, global = true, value_parser = ["pca", "maxpool"])]
    reducer: Option<String>,
    /// Overrides the configured seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Print nothing on success.
    #[arg(long, global = true)]
    quiet: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Scattering coefficients, Rx/Lx and theta per channel.
    Analyze {
        input: PathBuf,
        /// Also write u1, s1, u2, s2, rx as raw little-endian f64.
        #[arg(long)]
        binary: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Frame clustering and transient intervals per channel.
    Detect {
        input: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Sliding-window theta trajectory per channel.
    Monitor {
        input: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Seeded test signal plus a ground-truth sidecar.
    Synth {
        /// noise, burst, chirp or regime.
        #[arg(long, default_value = "burst")]
        kind: String,
        #[arg(long, default_value_t = 1 << 17)]
        n: usize,
        /// Spectral exponent of the background noise.
        #[arg(long, default_value_t = 1.0)]
        alpha: f64,
        #[arg(long, default_value_t = 5)]
        count: usize,
        /// Burst peak in units of the background MAD.
        #[arg(long, default_value_t = 5.0)]
        amplitude: f64,
        /// Burst envelope standard deviation in samples.
        #[arg(long, default_value_t = 4.0)]
        width: f64,
        #[arg(long, default_value_t = 0.01)]
        f0: f64,
        #[arg(long, default_value_t = 0.2)]
        f1: f64,
        #[arg(long, default_value_t = 120_000)]
        switch_at: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Runs the built-in oracle checks and prints a pass/fail table.
    Selfcheck {
        #[command(flatten)]
        common: Common,
    },
}

fn load_config(common: &Common) -> Result<PipelineConfig> {
    let mut cfg = match &common.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| Error::Input {
                path: path.clone(),
                message: format!("cannot read config: {e}"),
            })?;
            PipelineConfig::parse(&text).map_err(|e| Error::Input {
                path: path.clone(),
                message: e.to_string(),
            })?
        }
        None => PipelineConfig::default(),
    };
    if let Some(r) = &common.reducer {
        cfg.reducer = r.parse::<Reducer>()?;
    }
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    Ok(cfg)
}

fn out_dir(common: &Common) -> PathBuf {
    common.out.clone().unwrap_or_else(|| PathBuf::from("out"))
}

fn say(common: &Common, text: impl AsRef<str>) {
    if !common.quiet {
        println!("{}", text.as_ref());
    }
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Analyze { input, binary, common } => {
            let cfg = load_config(&common)?;
            let out = out_dir(&common);
            let (manifest, channels) = cmd_analyze(&input, &cfg, &out, AnalyzeOptions { binary })?;
            for ch in &channels {
                say(
                    &common,
                    format!("{}: {} samples -> {}", ch.name, ch.n, out.join(&ch.dir).display()),
                );
            }
            say(
                &common,
                format!(
                    "feature dimension {}, {} files hashed",
                    manifest.feature_dim,
                    manifest.files.len()
                ),
            );
        }
        Command::Detect { input, common } => {
            let cfg = load_config(&common)?;
            let out = out_dir(&common);
            let (_, results) = cmd_detect(&input, &cfg, &out)?;
            for (ch, r) in &results {
                say(
                    &common,
                    format!("{}: k={} intervals={}", ch.name, r.k, r.intervals.len()),
                );
                for iv in &r.intervals {
                    say(&common, format!("  {}..={} (cluster {})", iv.start, iv.end, iv.cluster));
                }
            }
        }
        Command::Monitor { input, common } => {
            let cfg = load_config(&common)?;
            let out = out_dir(&common);
            let (_, results) = cmd_monitor(&input, &cfg, &out)?;
            for (ch, plan, _) in &results {
                say(
                    &common,
                    format!(
                        "{}: {} windows -> {}",
                        ch.name,
                        plan.count(),
                        out.join(&ch.dir).display()
                    ),
                );
            }
        }
        Command::Synth {
            kind,
            n,
            alpha,
            count,
            amplitude,
            width,
            f0,
            f1,
            switch_at,
            common,
        } => {
            let params = SynthParams {
                kind: kind.parse::<SynthKind>()?,
                n,
                seed: common.seed.unwrap_or(0),
                alpha,
                count,
                amplitude,
                burst_width: width,
                f0,
                f1,
                switch_at,
            };
            let out = common
                .out
                .clone()
                .unwrap_or_else(|| PathBuf::from(format!("{kind}.csv")));
            let truth = cmd_synth(&params, &out)?;
            say(
                &common,
                format!(
                    "{} samples -> {} ({} events, truth in {})",
                    n,
                    out.display(),
                    truth.events.len(),
                    truth_path(&out).display()
                ),
            );
        }
        Command::Selfcheck { common } => {
            let results = run_selfcheck(common.seed.unwrap_or(0));
            for r in &results {
                say(&common, r.to_string());
            }
            return Ok(results.iter().all(|r| r.passed));
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_input_error() { 2 } else { 1 })
        }
    }
}
