//! `graspscene` — scene-context grasp detection pipeline and evaluation
//! harness.
//!
//! Subcommands: `detect` (JSON-lines records over depth-frame files),
//! `experiment` (seeded evaluation reports), `bench` (latency of the
//! per-frame pipeline), `gen` (write a standard scene's files to disk).
//!
//! Exit codes: 0 success, 1 usage error, 2 I/O error, 3 internal invariant
//! violation (panic).

use std::fmt;
use std::io::Write as _;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use graspscene_core::camera::{load_frame, store_frame};
use graspscene_core::orientation::{load_imu, store_imu};
use graspscene_sim::scenes::SceneKind;
use graspscene_sim::{apply_noise, render_depth, standard_camera, standard_scene, store_scene, synth_imu};

use graspscene_cli::config::{ConfigError, HarnessConfig};
use graspscene_cli::experiments::{self, ExperimentName};
use graspscene_cli::pipeline::process_frame;
use graspscene_cli::record::DetectionRecord;
use graspscene_cli::bench;

#[derive(Parser)]
#[command(
    name = "graspscene",
    version,
    about = "Scene-context grasp detection pipeline and evaluation harness"
)]
struct Cli {
    /// Key-value config file overriding pipeline defaults.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run detection over depth-frame files; one JSON record per line, in
    /// input order.
    Detect {
        /// Accelerometer sample file shared by every frame.
        #[arg(long, value_name = "PATH")]
        imu: PathBuf,
        /// Depth-frame files to process.
        #[arg(value_name = "FRAME")]
        frames: Vec<PathBuf>,
        /// Write records here instead of standard output.
        #[arg(long, value_name = "PATH")]
        output: Option<PathBuf>,
    },
    /// Run a named evaluation experiment and emit a JSON report.
    Experiment {
        /// One of: mode-accuracy, grasp-accuracy, plane-separability,
        /// occlusion, throughput.
        name: String,
        /// Base seed for scene generation.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Trials per condition (>= 1).
        #[arg(long, default_value_t = 100)]
        trials: usize,
        /// Write the report here instead of standard output.
        #[arg(long, value_name = "PATH")]
        output: Option<PathBuf>,
    },
    /// Time the per-frame pipeline on a fixed cluttered tabletop scene.
    Bench {
        /// Timed repetitions (clamped up to 10).
        #[arg(long, default_value_t = 300)]
        trials: usize,
        /// Write the report here instead of standard output.
        #[arg(long, value_name = "PATH")]
        output: Option<PathBuf>,
    },
    /// Generate one standard scene's files: scene description, noisy depth
    /// frame, and accelerometer samples.
    Gen {
        /// One of: tabletop, doorknob, pot-handle.
        kind: String,
        /// Scene seed.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Directory receiving the files (default: current directory).
        #[arg(long, value_name = "DIR")]
        output: Option<PathBuf>,
    },
}

/// A failure with the exit code it maps to.
#[derive(Debug)]
enum Failure {
    Usage(String),
    Io(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Io(_) => 2,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Usage(msg) | Failure::Io(msg) => f.write_str(msg),
        }
    }
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        match e {
            ConfigError::Invalid(msg) => Failure::Usage(msg),
            ConfigError::Io(msg) => Failure::Io(msg),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };

    match catch_unwind(AssertUnwindSafe(|| run(cli))) {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(failure)) => {
            eprintln!("error: {failure}");
            ExitCode::from(failure.code())
        }
        Err(_) => {
            eprintln!("error: internal invariant violated");
            ExitCode::from(3)
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let cfg = HarnessConfig::load(cli.config.as_deref())?;
    match cli.command {
        Command::Detect { imu, frames, output } => cmd_detect(&cfg, &imu, &frames, output.as_deref()),
        Command::Experiment { name, seed, trials, output } => {
            cmd_experiment(&cfg, &name, seed, trials, output.as_deref())
        }
        Command::Bench { trials, output } => cmd_bench(&cfg, trials, output.as_deref()),
        Command::Gen { kind, seed, output } => cmd_gen(&cfg, &kind, seed, output.as_deref()),
    }
}

/// Writes `text` to `path` when given, standard output otherwise.
fn emit(text: &str, path: Option<&Path>) -> Result<(), Failure> {
    match path {
        Some(p) => std::fs::write(p, text)
            .map_err(|e| Failure::Io(format!("cannot write {}: {e}", p.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| Failure::Io(format!("cannot write to standard output: {e}")))
        }
    }
}

fn cmd_detect(
    cfg: &HarnessConfig,
    imu_path: &Path,
    frames: &[PathBuf],
    output: Option<&Path>,
) -> Result<(), Failure> {
    let imu = load_imu(imu_path).map_err(|e| Failure::Io(e.to_string()))?;
    let mut lines = String::new();
    let mut failures = 0usize;
    for path in frames {
        let id = path.display().to_string();
        let record = match load_frame(path, cfg.intrinsics.min_range, cfg.intrinsics.max_range) {
            Ok(frame) => process_frame(&frame, &imu, cfg, &id).0,
            Err(e) => DetectionRecord::failed(&id, &e.to_string()),
        };
        failures += record.error.is_some() as usize;
        lines.push_str(&record.to_json_line());
        lines.push('\n');
    }
    emit(&lines, output)?;
    if failures > 0 {
        return Err(Failure::Io(format!(
            "{failures} of {} frame(s) failed; see error records",
            frames.len()
        )));
    }
    Ok(())
}

fn cmd_experiment(
    cfg: &HarnessConfig,
    name: &str,
    seed: u64,
    trials: usize,
    output: Option<&Path>,
) -> Result<(), Failure> {
    let name: ExperimentName = name.parse().map_err(Failure::Usage)?;
    if trials == 0 {
        return Err(Failure::Usage("trials must be at least 1".into()));
    }
    let report = experiments::run(name, cfg, seed, trials);
    let mut text =
        serde_json::to_string_pretty(&report).expect("experiment report serializes");
    text.push('\n');
    emit(&text, output)
}

fn cmd_bench(cfg: &HarnessConfig, trials: usize, output: Option<&Path>) -> Result<(), Failure> {
    let report = bench::run(cfg, trials);
    let mut text = serde_json::to_string_pretty(&report).expect("bench report serializes");
    text.push('\n');
    emit(&text, output)
}

fn cmd_gen(
    cfg: &HarnessConfig,
    kind: &str,
    seed: u64,
    output: Option<&Path>,
) -> Result<(), Failure> {
    let kind: SceneKind = kind.parse().map_err(Failure::Usage)?;
    let dir = output.unwrap_or(Path::new("."));
    std::fs::create_dir_all(dir)
        .map_err(|e| Failure::Io(format!("cannot create {}: {e}", dir.display())))?;

    let scene = standard_scene(kind, seed);
    let pose = standard_camera(kind, &scene, seed);
    let rendered = render_depth(&scene, &pose, &cfg.intrinsics);
    let mut model = cfg.noise;
    model.seed = cfg.noise.seed.wrapping_add(seed.wrapping_mul(0x9e37_79b9_7f4a_7c15));
    let noisy = apply_noise(&rendered, &model);
    let imu = synth_imu(&pose, &scene.gravity, &cfg.imu_to_camera, 8);

    let stem = format!("{}-{seed}", kind.as_str());
    let scene_path = dir.join(format!("{stem}.scene.txt"));
    let frame_path = dir.join(format!("{stem}.frame.txt"));
    let imu_path = dir.join(format!("{stem}.imu.txt"));
    store_scene(&scene, &scene_path).map_err(|e| Failure::Io(e.to_string()))?;
    store_frame(&noisy, &frame_path).map_err(|e| Failure::Io(e.to_string()))?;
    store_imu(&imu, &imu_path).map_err(|e| Failure::Io(e.to_string()))?;

    let manifest = serde_json::json!({
        "kind": kind.as_str(),
        "seed": seed,
        "scene": scene_path.display().to_string(),
        "frame": frame_path.display().to_string(),
        "imu": imu_path.display().to_string(),
    });
    emit(&format!("{manifest}\n"), None)
}
