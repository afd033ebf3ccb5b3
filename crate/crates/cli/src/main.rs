//! Operator entry point: capture generation, dynamic-parameter analysis,
//! accelerator simulation and host-vs-accelerator benchmarking.
//!
//! Machine-readable results go to stdout (or `--output`); progress and
//! summaries go to stderr. Exit code is nonzero exactly when a command
//! fails.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use adcal_core::analysis::{self, AnalysisOptions, WindowKind};
use adcal_core::fft::fft;
use adcal_core::io::{self, BenchReport, CsvReport};
use adcal_core::pipeline::{
    simulate_stream, simulate_transaction, Calibration, PipelineConfig,
};
use adcal_core::signal::{synthesize, CaptureSpec, ToneSpec};
use num_complex::Complex64;

#[derive(Parser)]
#[command(
    name = "adcal",
    version,
    about = "ADC dynamic-performance analysis and accelerator stream simulation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Synthesize a test capture and write it to disk.
    Generate(GenerateArgs),
    /// Compute SNR, SINAD, ENOB, THD and SFDR from a capture file.
    Analyze(AnalyzeArgs),
    /// Run the accelerator timing model.
    Simulate(SimulateArgs),
    /// Time the host FFT path against the simulated accelerator.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum CaptureFormat {
    Bin,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum ReportFormat {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum WindowArg {
    /// Rectangular; assumes coherent sampling.
    #[value(alias = "rectangular")]
    Rect,
    Hann,
    /// 4-term Blackman-Harris.
    #[value(alias = "blackman-harris4")]
    Bh4,
}

impl From<WindowArg> for WindowKind {
    fn from(w: WindowArg) -> Self {
        match w {
            WindowArg::Rect => WindowKind::Rectangular,
            WindowArg::Hann => WindowKind::Hann,
            WindowArg::Bh4 => WindowKind::BlackmanHarris4,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum CalibrationName {
    /// Reproduces the reference design's published per-group figures
    /// (4258-clock first-group latency, 18 us round trip).
    Paper,
}

#[derive(Args)]
struct GenerateArgs {
    /// Use the built-in two-tone reference capture:
    /// 0.7 cos(2 pi 50 MHz t) + sin(2 pi 12 MHz t) + 0.1 randn(),
    /// 1024 points at 1.024 GHz.
    #[arg(long, conflicts_with = "tones")]
    paper_signal: bool,

    /// Comma-separated tone list, each AMP:FREQ_HZ[:PHASE_RAD].
    /// An empty string means no tones.
    #[arg(long, value_name = "LIST")]
    tones: Option<String>,

    /// Standard deviation of additive Gaussian noise
    /// [default: 0, or 0.1 with --paper-signal].
    #[arg(long)]
    sigma: Option<f64>,

    /// Record length, a power of two [default: 1024].
    #[arg(short = 'n', long = "points")]
    points: Option<usize>,

    /// Sample rate in Hz [default: 1.024e9].
    #[arg(long)]
    sample_rate: Option<f64>,

    /// Noise generator seed.
    #[arg(long, default_value_t = 1)]
    seed: u64,

    /// Pass the signal through an ideal B-bit mid-tread quantizer.
    #[arg(long, value_name = "B")]
    bits: Option<u32>,

    /// Quantizer full-scale amplitude.
    #[arg(long, default_value_t = 1.0)]
    full_scale: f64,

    #[arg(long, value_enum, default_value_t = CaptureFormat::Bin)]
    format: CaptureFormat,

    /// Output path. Defaults to capture.bin/capture.csv in $ADCAL_OUT_DIR
    /// (or the working directory).
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Capture to analyze; *.csv is read as t,value rows, anything else as
    /// the binary capture format.
    input: PathBuf,

    #[arg(long, value_enum, default_value_t = WindowArg::Rect)]
    window: WindowArg,

    /// Highest harmonic order included in THD.
    #[arg(long, default_value_t = 6)]
    harmonics: u32,

    /// Full-scale amplitude assumed for CSV captures (binary captures carry
    /// their own).
    #[arg(long, default_value_t = 1.0)]
    full_scale: f64,

    /// Also write the single-sided power spectrum as bin_hz,power_db rows.
    #[arg(long, value_name = "PATH")]
    spectrum_csv: Option<PathBuf>,

    #[arg(long, value_enum, default_value_t = ReportFormat::Json)]
    format: ReportFormat,

    /// Report path; stdout when omitted.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum SimMode {
    Stream,
    Transaction,
}

/// Pipeline-model selection shared by `simulate` and `bench`: a named
/// calibration or a TOML config file, plus individual field overrides.
#[derive(Args)]
struct PipelineArgs {
    /// TOML file with pipeline-model keys (n_points, point_bytes, clock_hz,
    /// bus_bits, stage_latency, fill_overhead, n_fft_modules,
    /// host_overhead_s).
    #[arg(long, conflicts_with = "calibration")]
    config: Option<PathBuf>,

    /// Named calibration preset.
    #[arg(long, value_enum)]
    calibration: Option<CalibrationName>,

    #[arg(long)]
    n_points: Option<usize>,

    #[arg(long)]
    point_bytes: Option<u64>,

    #[arg(long)]
    clock_hz: Option<f64>,

    #[arg(long)]
    bus_bits: Option<u64>,

    #[arg(long)]
    stage_latency: Option<u64>,

    #[arg(long)]
    fill_overhead: Option<u64>,

    #[arg(long)]
    modules: Option<u64>,

    /// Host driver overhead per transaction round trip, in seconds.
    #[arg(long)]
    host_overhead: Option<f64>,
}

#[derive(Deserialize)]
struct SimConfigFile {
    #[serde(default)]
    host_overhead_s: Option<f64>,
    #[serde(flatten)]
    pipeline: PipelineConfig,
}

impl PipelineArgs {
    fn resolve(&self) -> anyhow::Result<(PipelineConfig, f64)> {
        let (mut cfg, mut host_overhead) = if let Some(name) = self.calibration {
            match name {
                CalibrationName::Paper => {
                    let cal = Calibration::reference();
                    (cal.config, cal.host_overhead_s)
                }
            }
        } else if let Some(path) = &self.config {
            let text = fs::read_to_string(path)
                .with_context(|| format!("reading config {}", path.display()))?;
            let file: SimConfigFile = toml::from_str(&text)
                .with_context(|| format!("parsing config {}", path.display()))?;
            (file.pipeline, file.host_overhead_s.unwrap_or(0.0))
        } else {
            (PipelineConfig::default(), 0.0)
        };

        if let Some(v) = self.n_points {
            cfg.n_points = v;
        }
        if let Some(v) = self.point_bytes {
            cfg.point_bytes = v;
        }
        if let Some(v) = self.clock_hz {
            cfg.clock_hz = v;
        }
        if let Some(v) = self.bus_bits {
            cfg.bus_bits = v;
        }
        if let Some(v) = self.stage_latency {
            cfg.stage_latency = v;
        }
        if let Some(v) = self.fill_overhead {
            cfg.fill_overhead = v;
        }
        if let Some(v) = self.modules {
            cfg.n_fft_modules = v;
        }
        if let Some(v) = self.host_overhead {
            host_overhead = v;
        }
        cfg.validate()?;
        Ok((cfg, host_overhead))
    }
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long, value_enum, default_value_t = SimMode::Stream)]
    mode: SimMode,

    /// Groups to stream (stream mode).
    #[arg(long, default_value_t = 1)]
    groups: u64,

    #[command(flatten)]
    pipeline: PipelineArgs,

    #[arg(long, value_enum, default_value_t = ReportFormat::Json)]
    format: ReportFormat,

    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    /// Timed repeats of the host FFT (median is reported).
    #[arg(long, default_value_t = 1000, value_parser = clap::value_parser!(u64).range(1..))]
    repeat: u64,

    /// Untimed warmup runs before measuring.
    #[arg(long, default_value_t = 10)]
    warmup: u64,

    /// Seed for the benchmark input group.
    #[arg(long, default_value_t = 1)]
    seed: u64,

    #[command(flatten)]
    pipeline: PipelineArgs,

    #[arg(long, value_enum, default_value_t = ReportFormat::Json)]
    format: ReportFormat,

    #[arg(short, long)]
    output: Option<PathBuf>,
}

fn main() -> anyhow::Result<()> {
    match Cli::parse().command {
        Command::Generate(args) => cmd_generate(args),
        Command::Analyze(args) => cmd_analyze(args),
        Command::Simulate(args) => cmd_simulate(args),
        Command::Bench(args) => cmd_bench(args),
    }
}

fn parse_tones(list: &str) -> anyhow::Result<Vec<ToneSpec>> {
    let mut tones = Vec::new();
    for entry in list.split(',') {
        let entry = entry.trim();
        if entry.is_empty() {
            continue;
        }
        let parts: Vec<&str> = entry.split(':').collect();
        if parts.len() < 2 || parts.len() > 3 {
            bail!("tone '{entry}' is not AMP:FREQ_HZ[:PHASE_RAD]");
        }
        let amplitude: f64 = parts[0]
            .parse()
            .with_context(|| format!("bad amplitude in tone '{entry}'"))?;
        let frequency: f64 = parts[1]
            .parse()
            .with_context(|| format!("bad frequency in tone '{entry}'"))?;
        let phase: f64 = match parts.get(2) {
            Some(p) => p
                .parse()
                .with_context(|| format!("bad phase in tone '{entry}'"))?,
            None => 0.0,
        };
        tones.push(ToneSpec {
            amplitude,
            frequency,
            phase,
        });
    }
    Ok(tones)
}

fn default_output_path(file_name: &str) -> PathBuf {
    let dir = std::env::var_os("ADCAL_OUT_DIR")
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("."));
    dir.join(file_name)
}

fn write_report(text: &str, output: Option<&Path>) -> anyhow::Result<()> {
    match output {
        Some(path) => fs::write(path, text)
            .with_context(|| format!("writing {}", path.display()))?,
        None => {
            print!("{text}");
            if !text.ends_with('\n') {
                println!();
            }
        }
    }
    Ok(())
}

fn render<T: serde::Serialize + CsvReport>(value: &T, format: ReportFormat) -> anyhow::Result<String> {
    Ok(match format {
        ReportFormat::Json => io::emit_json(value)?,
        ReportFormat::Csv => io::emit_csv(value),
    })
}

fn cmd_generate(args: GenerateArgs) -> anyhow::Result<()> {
    let mut spec = if args.paper_signal {
        CaptureSpec::reference_two_tone(args.seed)
    } else {
        CaptureSpec {
            tones: parse_tones(args.tones.as_deref().unwrap_or(""))?,
            noise_sigma: 0.0,
            sample_rate: 1.024e9,
            n_points: 1024,
            seed: args.seed,
            quantizer_bits: None,
            full_scale: args.full_scale,
        }
    };
    if let Some(sigma) = args.sigma {
        spec.noise_sigma = sigma;
    }
    if let Some(points) = args.points {
        spec.n_points = points;
    }
    if let Some(rate) = args.sample_rate {
        spec.sample_rate = rate;
    }
    spec.quantizer_bits = args.bits;
    spec.full_scale = args.full_scale;

    let block = synthesize(&spec)?;
    let path = args.output.unwrap_or_else(|| {
        default_output_path(match args.format {
            CaptureFormat::Bin => "capture.bin",
            CaptureFormat::Csv => "capture.csv",
        })
    });
    match args.format {
        CaptureFormat::Bin => io::write_capture(&block, &path)?,
        CaptureFormat::Csv => {
            let mut buf = Vec::new();
            io::write_capture_csv(&block, &mut buf)?;
            fs::write(&path, buf)?;
        }
    }
    eprintln!(
        "wrote {} samples (fs = {} Hz, {} tones, sigma = {}, seed = {}) to {}",
        block.len(),
        block.sample_rate(),
        spec.tones.len(),
        spec.noise_sigma,
        spec.seed,
        path.display()
    );
    Ok(())
}

fn cmd_analyze(args: AnalyzeArgs) -> anyhow::Result<()> {
    let is_csv = args
        .input
        .extension()
        .is_some_and(|ext| ext.eq_ignore_ascii_case("csv"));
    let block = if is_csv {
        io::read_capture_csv(&args.input, args.full_scale)
    } else {
        io::read_capture(&args.input)
    }
    .with_context(|| format!("reading capture {}", args.input.display()))?;

    let opts = AnalysisOptions {
        window: args.window.into(),
        max_harmonic: args.harmonics,
    };
    let report = analysis::analyze(&block, &opts)?;

    if let Some(path) = &args.spectrum_csv {
        let spectrum = analysis::power_spectrum(&block, opts.window)?;
        let mut buf = Vec::new();
        io::write_spectrum_csv(&spectrum, &mut buf)?;
        fs::write(path, buf).with_context(|| format!("writing {}", path.display()))?;
    }

    eprintln!(
        "fundamental {} Hz (bin {}), SINAD {:.2} dB, ENOB {:.2} bits [{} window]",
        report.fundamental_hz,
        report.fundamental_bin,
        report.sinad_db,
        report.enob_bits,
        opts.window.label()
    );
    write_report(&render(&report, args.format)?, args.output.as_deref())
}

fn cmd_simulate(args: SimulateArgs) -> anyhow::Result<()> {
    let (cfg, host_overhead) = args.pipeline.resolve()?;
    let text = match args.mode {
        SimMode::Stream => {
            let stats = simulate_stream(&cfg, args.groups)?;
            eprintln!(
                "streamed {} groups in {} cycles ({:.3} ms simulated), {:.3} GB/s",
                stats.groups_processed,
                stats.total_cycles,
                stats.simulated_seconds * 1e3,
                stats.throughput_bytes_per_sec / 1e9
            );
            render(&stats, args.format)?
        }
        SimMode::Transaction => {
            let stats = simulate_transaction(&cfg, host_overhead)?;
            eprintln!(
                "one-group round trip: {} clocks + {} s host = {:.3} us, {:.1} MB/s",
                stats.clocks,
                stats.host_overhead_s,
                stats.wall_seconds * 1e6,
                stats.throughput_bytes_per_sec / 1e6
            );
            render(&stats, args.format)?
        }
    };
    write_report(&text, args.output.as_deref())
}

fn cmd_bench(args: BenchArgs) -> anyhow::Result<()> {
    let (cfg, host_overhead) = args.pipeline.resolve()?;

    // Deterministic pseudo-random input group for the host FFT path.
    let noise = synthesize(&CaptureSpec {
        tones: vec![],
        noise_sigma: 1.0,
        sample_rate: 1e9,
        n_points: cfg.n_points,
        seed: args.seed,
        quantizer_bits: None,
        full_scale: 1.0,
    })?;
    let group: Vec<Complex64> = noise
        .samples()
        .iter()
        .map(|&v| Complex64::new(v, 0.0))
        .collect();

    for _ in 0..args.warmup {
        std::hint::black_box(fft(std::hint::black_box(&group))?);
    }
    let mut times = Vec::with_capacity(args.repeat as usize);
    for _ in 0..args.repeat {
        let start = Instant::now();
        std::hint::black_box(fft(std::hint::black_box(&group))?);
        times.push(start.elapsed().as_secs_f64());
    }
    let baseline = median(&mut times);
    let mut deviations: Vec<f64> = times.iter().map(|t| (t - baseline).abs()).collect();
    let mad = median(&mut deviations);

    let txn = simulate_transaction(&cfg, host_overhead)?;
    let report = BenchReport::new(
        baseline,
        mad,
        txn.wall_seconds,
        args.repeat,
        args.warmup,
        cfg,
    );
    eprintln!(
        "host fft median {:.3} us (mad {:.3} us, {} repeats), simulated accel {:.3} us/group: speedup {:.2}x",
        report.baseline_seconds * 1e6,
        report.baseline_mad_seconds * 1e6,
        report.repeats,
        report.accel_seconds * 1e6,
        report.speedup
    );
    write_report(&render(&report, args.format)?, args.output.as_deref())
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        (values[n / 2 - 1] + values[n / 2]) / 2.0
    }
}
