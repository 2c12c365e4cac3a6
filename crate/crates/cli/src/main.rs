//! `gazearm`: calibration, training, experiment harnesses and the live gateway.

mod serve;

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use gazearm_core::classifier::{collect_calibration, make_marker_path, predict, train, BlockModel, CalibrationSet, TrainConfig};
use gazearm_core::gaze::synthetic::{StreamConfig, SyntheticGaze, ViewingGeometry};
use gazearm_core::gaze::{replay, GazeVector};
use gazearm_core::hri::{
    run_pointing, run_reachability, session_metrics, GazeSelector, LatencySelector, PointingRunConfig, PointingTask, ReachabilityConfig,
    ReplaySelector, SessionLog, Selector,
};
use gazearm_core::mapping::{fit_mapping, read_pairs_csv};
use gazearm_core::ScreenGrid;

#[derive(Parser, Debug)]
#[command(name = "gazearm", version, about = "Gaze teleoperation of a 4-DoF desk arm")]
struct Cli {
    /// Display width in pixels
    #[arg(long, global = true, default_value_t = 1920.0)]
    width: f64,
    /// Display height in pixels
    #[arg(long, global = true, default_value_t = 1080.0)]
    height: f64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Backend {
    Sim,
    Serial,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write a synthetic gaze recording of a viewer following the calibration marker
    SynthCalibration {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, env = "GAZEARM_SEED", default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 2000.0)]
        dwell_ms: f64,
        #[arg(long, default_value_t = 500.0)]
        transition_ms: f64,
    },
    /// Label a smooth-pursuit recording into a calibration set
    Calibrate {
        #[arg(long)]
        replay: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 2000.0)]
        dwell_ms: f64,
        #[arg(long, default_value_t = 500.0)]
        transition_ms: f64,
        #[arg(long, default_value_t = gazearm_core::classifier::DEFAULT_SETTLE_MS)]
        settle_ms: f64,
        #[arg(long, env = "GAZEARM_SEED", default_value_t = 0)]
        seed: u64,
    },
    /// Train the block classifier on a calibration set
    Train {
        #[arg(long)]
        set: PathBuf,
        /// Where to write the model (defaults to model.json next to the set)
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, env = "GAZEARM_SEED", default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 200)]
        epochs: usize,
    },
    /// Classify gaze vectors into screen blocks
    Predict {
        #[arg(long)]
        model: PathBuf,
        /// Six comma-separated components, left eye then right eye
        #[arg(long, conflicts_with = "replay")]
        gaze: Option<String>,
        /// Classify every valid sample of a recording
        #[arg(long)]
        replay: Option<PathBuf>,
    },
    /// Fit the display-to-workspace map from correspondence pairs
    CalibrateMap {
        #[arg(long)]
        pairs: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Summarise a session log
    Metrics {
        #[arg(long)]
        log: PathBuf,
    },
    /// Run the nine-block pointing task
    RunPointing {
        /// Drive the task from a recorded gaze stream
        #[arg(long, conflicts_with = "synthetic")]
        replay: Option<PathBuf>,
        /// Drive the task with a simulated user
        #[arg(long)]
        synthetic: bool,
        #[arg(long, env = "GAZEARM_SEED", default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        /// Scripted selector latency; without it the synthetic user looks through the gaze pipeline
        #[arg(long)]
        latency_ms: Option<f64>,
        #[arg(long, default_value_t = 600.0)]
        reaction_ms: f64,
        #[arg(long)]
        log: Option<PathBuf>,
    },
    /// Run closed-loop reachability trials with a scripted four-way user
    RunReachability {
        #[arg(long, env = "GAZEARM_SEED", default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        runs: u64,
        /// Session log of the first run
        #[arg(long)]
        log: Option<PathBuf>,
    },
    /// Serve the JSON gateway over websocket at /ws
    Serve {
        #[arg(long, env = "GAZEARM_PORT", default_value_t = 8080)]
        port: u16,
        #[arg(long, value_enum, default_value_t = Backend::Sim)]
        backend: Backend,
        /// Serial device for the serial backend
        #[arg(long, required_if_eq("backend", "serial"))]
        device: Option<PathBuf>,
        /// Arm geometry JSON
        #[arg(long)]
        geometry: Option<PathBuf>,
        /// Display-to-workspace map JSON from calibrate-map
        #[arg(long)]
        map: Option<PathBuf>,
        /// Block classifier for inbound gaze vectors
        #[arg(long)]
        model: Option<PathBuf>,
        /// Stop after this many seconds
        #[arg(long)]
        duration_s: Option<f64>,
    },
}

fn open(path: &Path) -> Result<BufReader<File>> {
    Ok(BufReader::new(File::open(path).with_context(|| format!("opening {}", path.display()))?))
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path).with_context(|| format!("creating {}", path.display()))?))
}

fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn load_model(path: &Path) -> Result<BlockModel> {
    BlockModel::from_json(&read_text(path)?).with_context(|| format!("loading model {}", path.display()))
}

fn write_log(path: &Path, log: &SessionLog) -> Result<()> {
    let mut w = create(path)?;
    log.write_jsonl(&mut w)?;
    w.flush()?;
    Ok(())
}

fn parse_gaze(text: &str) -> Result<GazeVector> {
    let v: Vec<f64> = text.split(',').map(|s| s.trim().parse::<f64>()).collect::<Result<_, _>>().context("gaze components must be numbers")?;
    let arr: [f64; 6] = v.try_into().map_err(|v: Vec<f64>| anyhow::anyhow!("expected 6 gaze components, got {}", v.len()))?;
    Ok(GazeVector(arr))
}

fn main() -> Result<()> {
    tracing_subscriber::fmt().with_writer(std::io::stderr).with_env_filter(tracing_subscriber::EnvFilter::from_default_env()).init();
    let cli = Cli::parse();
    let grid = ScreenGrid::new(cli.width, cli.height);
    match cli.command {
        Command::SynthCalibration { out, seed, dwell_ms, transition_ms } => {
            let path = make_marker_path(grid, dwell_ms, transition_ms);
            let view = ViewingGeometry { display_px: (cli.width, cli.height), ..Default::default() };
            let mut gen = SyntheticGaze::new(view, StreamConfig::default(), seed);
            let samples = gen.follow(path.duration_ms(), |t| path.position_at(t));
            let mut w = create(&out)?;
            replay::write(&mut w, &samples)?;
            w.flush()?;
            println!("wrote {} samples ({:.1} s) to {}", samples.len(), path.duration_ms() / 1000.0, out.display());
        }
        Command::Calibrate { replay: input, out, dwell_ms, transition_ms, settle_ms, seed } => {
            let samples = replay::read(open(&input)?).with_context(|| format!("reading {}", input.display()))?;
            let path = make_marker_path(grid, dwell_ms, transition_ms);
            let set = collect_calibration(&samples, &path, settle_ms, seed)?;
            set.write_csv(create(&out)?)?;
            println!("{} labelled examples from {} samples -> {}", set.len(), samples.len(), out.display());
        }
        Command::Train { set, out, seed, epochs } => {
            let data = CalibrationSet::read_csv(open(&set)?).with_context(|| format!("reading {}", set.display()))?;
            let cfg = TrainConfig { seed, epoch_cap: epochs, ..Default::default() };
            let outcome = train(&data, &cfg)?;
            for e in &outcome.history {
                tracing::debug!(epoch = e.epoch, train_loss = e.train_loss, val_loss = e.val_loss, test_acc = e.test_accuracy);
            }
            let m = &outcome.model.metrics;
            let out = out.unwrap_or_else(|| set.with_file_name("model.json"));
            std::fs::write(&out, outcome.model.to_json()).with_context(|| format!("writing {}", out.display()))?;
            println!(
                "epochs {} test accuracy {:.3} val accuracy {:.3} converged {} -> {}",
                m.epochs_run,
                m.test_accuracy,
                m.val_accuracy,
                m.converged,
                out.display()
            );
            if !m.converged {
                eprintln!("warning: test accuracy stayed below {:.2}", cfg.target_accuracy);
            }
        }
        Command::Predict { model, gaze, replay: input } => {
            let model = load_model(&model)?;
            match (gaze, input) {
                (Some(g), None) => println!("{}", predict(&model, &parse_gaze(&g)?)?),
                (None, Some(p)) => {
                    let samples = replay::read(open(&p)?)?;
                    for s in samples.iter().filter(|s| s.valid) {
                        if let Some(g) = s.gaze_vec {
                            println!("{},{}", s.t_ms, predict(&model, &g)?);
                        }
                    }
                }
                _ => bail!("give either --gaze or --replay"),
            }
        }
        Command::CalibrateMap { pairs, out } => {
            let pairs = read_pairs_csv(open(&pairs)?)?;
            let map = fit_mapping(&pairs)?;
            std::fs::write(&out, map.to_json()).with_context(|| format!("writing {}", out.display()))?;
            println!("{} pairs, R2 {:.4}, RMSE {:.3} cm -> {}", pairs.len(), map.r_squared, map.rmse_cm, out.display());
        }
        Command::Metrics { log } => {
            let log = SessionLog::read_jsonl(open(&log)?)?;
            println!("{}", serde_json::to_string_pretty(&session_metrics(&log))?);
        }
        Command::RunPointing { replay: input, synthetic, seed, trials, latency_ms, reaction_ms, log } => {
            let task = PointingTask::new(grid, seed, 0.0);
            let mut cfg = PointingRunConfig { trials, ..Default::default() };
            let mut selector: Box<dyn Selector> = match (input, synthetic) {
                (Some(p), false) => {
                    let samples = replay::read(open(&p)?)?;
                    let sel = ReplaySelector::new(grid, samples);
                    cfg.max_ms = sel.end_ms().unwrap_or(0.0);
                    cfg.trials = usize::MAX;
                    Box::new(sel)
                }
                (None, true) => match latency_ms {
                    Some(l) => Box::new(LatencySelector { latency_ms: l }),
                    None => {
                        let view = ViewingGeometry { display_px: (cli.width, cli.height), ..Default::default() };
                        Box::new(GazeSelector::new(grid, SyntheticGaze::new(view, StreamConfig::default(), seed), reaction_ms))
                    }
                },
                _ => bail!("give either --replay <file> or --synthetic"),
            };
            let run = run_pointing(task, selector.as_mut(), &cfg)?;
            if let Some(p) = log {
                write_log(&p, &run.log)?;
            }
            println!("{}", serde_json::to_string_pretty(&session_metrics(&run.log))?);
        }
        Command::RunReachability { seed, runs, log } => {
            for i in 0..runs.max(1) {
                let run = run_reachability(&ReachabilityConfig { seed: seed + i, ..Default::default() })?;
                let m = session_metrics(&run.log);
                println!(
                    "seed {} target ({:.2}, {:.2}) reached {} completion {} s jogs {} direction changes {}",
                    seed + i,
                    run.task.target.x,
                    run.task.target.y,
                    run.reached,
                    run.completion_ms.map_or("-".into(), |t| format!("{:.2}", t / 1000.0)),
                    m.jog_count,
                    m.direction_changes
                );
                if let (0, Some(p)) = (i, &log) {
                    write_log(p, &run.log)?;
                }
            }
        }
        Command::Serve { port, backend, device, geometry, map, model, duration_s } => {
            let opts = serve::ServeOptions {
                port,
                device: if backend == Backend::Serial { device } else { None },
                geometry: geometry.map(|p| read_text(&p)).transpose()?,
                map: map.map(|p| read_text(&p)).transpose()?,
                model: model.map(|p| load_model(&p)).transpose()?,
                display: (cli.width, cli.height),
                duration_s,
            };
            tokio::runtime::Runtime::new()?.block_on(serve::run(opts))?;
        }
    }
    Ok(())
}
