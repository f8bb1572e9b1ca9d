use std::fs;
use std::io::{self, Write};
use std::net::{Ipv4Addr, SocketAddr};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use riskhud::{Ending, Server};
use riskhud_core::scenario::{parse_scenario, ScenarioSpec};
use riskhud_core::session::live::LiveSession;
use riskhud_core::session::{
    compute_metrics, offline_quiz, run_headless, run_with_inputs, Condition, Mode, SessionConfig, SessionLog,
};
use riskhud_core::stats::questionnaire::{read_responses, summarize, write_report, ItemOrientation};

#[derive(Parser)]
#[command(
    name = "riskhud",
    version,
    about = "Risk-field HUD and haptic assist driving simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum CondArg {
    Hud,
    Nohud,
}

impl From<CondArg> for Condition {
    fn from(c: CondArg) -> Self {
        match c {
            CondArg::Hud => Condition::HudOn,
            CondArg::Nohud => Condition::HudOff,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ServeMode {
    Live,
    Quiz,
    Replay,
}

#[derive(Subcommand)]
enum Command {
    /// Run a headless session with the synthetic driver and write telemetry.
    Simulate {
        #[arg(long, required_unless_present = "replay")]
        scenario: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "hud")]
        condition: CondArg,
        /// Seconds.
        #[arg(long, default_value_t = 150.0)]
        duration: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Telemetry CSV to write.
        #[arg(long)]
        out: PathBuf,
        /// Turn the haptic assist off.
        #[arg(long)]
        no_assist: bool,
        /// Re-run the inputs of an earlier telemetry file under its own config.
        #[arg(long, conflicts_with_all = ["scenario", "no_assist"])]
        replay: Option<PathBuf>,
    },
    /// Serve one cockpit client over WebSocket.
    Serve {
        #[arg(long, required_unless_present = "replay")]
        scenario: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "hud")]
        condition: CondArg,
        /// 0 picks a free port.
        #[arg(long, default_value_t = 8765)]
        port: u16,
        #[arg(long, value_enum, default_value = "live")]
        mode: ServeMode,
        #[arg(long, default_value_t = 150.0)]
        duration: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        no_assist: bool,
        /// Telemetry whose config and input trace drive a replay session.
        #[arg(long, conflicts_with_all = ["scenario", "no_assist"])]
        replay: Option<PathBuf>,
        /// Where to write the session telemetry.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Where to write quiz answers as JSON.
        #[arg(long)]
        answers: Option<PathBuf>,
    },
    /// Print anticipation questions for a seeded headless run as JSON.
    Quiz {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 4)]
        count: usize,
        #[arg(long, default_value_t = 150.0)]
        duration: f64,
    },
    /// Summarize a telemetry CSV.
    Metrics { telemetry: PathBuf },
    /// Paired acceptance-scale tests from questionnaire responses.
    Stats {
        #[arg(long)]
        responses: PathBuf,
        /// JSON object of item_N -> reverse-scored flag.
        #[arg(long)]
        items: PathBuf,
    },
    /// Check a scenario file.
    Validate { scenario: PathBuf },
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn load_scenario(path: &Path) -> Result<ScenarioSpec> {
    parse_scenario(&read(path)?).with_context(|| format!("scenario {}", path.display()))
}

fn load_log(path: &Path) -> Result<SessionLog> {
    SessionLog::from_csv(&read(path)?).with_context(|| format!("telemetry {}", path.display()))
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn headless_config(scenario: &Path, condition: CondArg, seed: u64, no_assist: bool) -> Result<SessionConfig> {
    let mut cfg = SessionConfig::headless(load_scenario(scenario)?, condition.into());
    cfg.seed = seed;
    if let Some(d) = cfg.driver.as_mut() {
        d.seed = seed;
    }
    cfg.assist = !no_assist;
    Ok(cfg)
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Simulate {
            scenario,
            condition,
            duration,
            seed,
            out,
            no_assist,
            replay,
        } => {
            let log = match (replay, scenario) {
                (Some(trace), _) => {
                    let original = load_log(&trace)?;
                    run_with_inputs(&original.config, &original.inputs())?
                }
                (None, Some(scenario)) => {
                    run_headless(&headless_config(&scenario, condition, seed, no_assist)?, duration)?
                }
                (None, None) => unreachable!("clap requires one of them"),
            };
            write(&out, &log.to_csv())?;
            println!("wrote {} records to {}", log.records.len(), out.display());
        }
        Command::Serve {
            scenario,
            condition,
            port,
            mode,
            duration,
            seed,
            no_assist,
            replay,
            out,
            answers,
        } => {
            let trace = replay.as_deref().map(load_log).transpose()?;
            let mut cfg = match (&trace, scenario) {
                (Some(log), _) => log.config.clone(),
                (None, Some(scenario)) => headless_config(&scenario, condition, seed, no_assist)?,
                (None, None) => unreachable!("clap requires one of them"),
            };
            cfg.driver = None;
            cfg.mode = match mode {
                ServeMode::Live if trace.is_some() => Mode::Replay,
                ServeMode::Live => Mode::Live,
                ServeMode::Quiz => Mode::Quiz,
                ServeMode::Replay => Mode::Replay,
            };
            if matches!(mode, ServeMode::Replay) && trace.is_none() {
                bail!("--mode replay needs --replay <telemetry.csv>");
            }
            let session = LiveSession::new(&cfg, duration, trace.map(|l| l.inputs()))?;
            let report = tokio::runtime::Runtime::new()?.block_on(async {
                let server = Server::bind(SocketAddr::from((Ipv4Addr::LOCALHOST, port))).await?;
                println!("listening on ws://{}", server.local_addr()?);
                io::stdout().flush()?;
                anyhow::Ok(server.run(session).await?)
            })?;
            if let Some(path) = out {
                write(&path, &report.log.to_csv())?;
            }
            if let Some(path) = answers {
                write(&path, &serde_json::to_string_pretty(&report.answers)?)?;
            }
            match report.ending {
                Ending::Completed => println!(
                    "session with {} complete: {} ticks",
                    report.peer,
                    report.log.records.len()
                ),
                Ending::Aborted(reason) => bail!("session with {} aborted: {reason}", report.peer),
            }
        }
        Command::Quiz {
            scenario,
            seed,
            count,
            duration,
        } => {
            let mut cfg = headless_config(&scenario, CondArg::Hud, seed, false)?;
            cfg.questions = count;
            let questions = offline_quiz(&cfg, duration)?;
            println!("{}", serde_json::to_string_pretty(&questions)?);
        }
        Command::Metrics { telemetry } => {
            let log = load_log(&telemetry)?;
            let m = compute_metrics(&log.records, log.dt())?;
            println!("{}", serde_json::to_string_pretty(&m)?);
        }
        Command::Stats { responses, items } => {
            let orientation = ItemOrientation::from_json(&read(&items)?)?;
            let file = fs::File::open(&responses).with_context(|| format!("reading {}", responses.display()))?;
            let summaries = summarize(&read_responses(file, &orientation)?)?;
            write_report(io::stdout().lock(), &summaries)?;
        }
        Command::Validate { scenario } => {
            let spec = load_scenario(&scenario)?;
            println!(
                "{}: ok ({} m, {} lanes, {} obstacles)",
                scenario.display(),
                spec.road_length,
                spec.num_lanes,
                spec.obstacles.len()
            );
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
