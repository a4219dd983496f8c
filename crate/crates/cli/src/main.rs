use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand, ValueEnum};

use fluidity_core::agents::AgentKind;
use fluidity_core::report::{render_report, render_series, Format};
use fluidity_core::{replay, run_episode, RunLog, ScenarioConfig};

/// Runs closed-loop prediction episodes and scores their logs.
#[derive(Parser)]
#[command(name = "fluidity", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one episode from a scenario file (JSON, or TOML by extension).
    ///
    /// Exits 0 on a complete run, 1 if the episode was truncated, 2 on a
    /// configuration error.
    Run {
        #[arg(long)]
        scenario: PathBuf,
        /// Overrides the scenario's seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Where to write the run log; stdout if omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Verify run logs by replay, then print a ranked report and per-run series.
    ///
    /// Exits 3 if any log fails to parse or replay.
    Score {
        #[arg(required = true)]
        logs: Vec<PathBuf>,
        #[arg(long, value_enum, default_value_t = OutputFormat::Table)]
        format: OutputFormat,
        /// Also write each run's series to `<DIR>/<log stem>.series.csv`.
        #[arg(long)]
        series_dir: Option<PathBuf>,
    },
    /// List agent kinds and their parameters.
    Agents,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutputFormat {
    Table,
    Csv,
    Json,
}

impl From<OutputFormat> for Format {
    fn from(f: OutputFormat) -> Self {
        match f {
            OutputFormat::Table => Format::Table,
            OutputFormat::Csv => Format::Csv,
            OutputFormat::Json => Format::Json,
        }
    }
}

const TRUNCATED: u8 = 1;
const CONFIG_ERROR: u8 = 2;
const INTEGRITY_ERROR: u8 = 3;

struct Failure {
    code: u8,
    error: anyhow::Error,
}

fn fail(code: u8) -> impl FnOnce(anyhow::Error) -> Failure {
    move |error| Failure { code, error }
}

fn load_scenario(path: &Path) -> anyhow::Result<ScenarioConfig> {
    let text =
        fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    let config = if path.extension().is_some_and(|e| e == "toml") {
        toml::from_str(&text).map_err(anyhow::Error::from)
    } else {
        ScenarioConfig::from_json(&text).map_err(anyhow::Error::from)
    };
    config.with_context(|| format!("cannot parse scenario {}", path.display()))
}

fn write_output(out: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match out {
        Some(path) => {
            fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
            Ok(())
        }
    }
}

fn cmd_run(scenario: &Path, seed: Option<u64>, out: Option<&Path>) -> Result<u8, Failure> {
    let mut config = load_scenario(scenario).map_err(fail(CONFIG_ERROR))?;
    if let Some(seed) = seed {
        config.seed = seed;
    }
    let log = run_episode(&config)
        .with_context(|| format!("cannot run {}", scenario.display()))
        .map_err(fail(CONFIG_ERROR))?;
    write_output(out, &log.to_json()).map_err(fail(CONFIG_ERROR))?;

    eprintln!(
        "{}: fi {} responsiveness {} nc {} order {} regime {}",
        log.agent_name,
        log.summary.fi_value,
        log.summary.mean_responsiveness,
        log.summary.nc,
        log.order,
        log.regime
    );
    Ok(match &log.truncation {
        Some(t) => {
            eprintln!("truncated at transition {}: {}", t.at_transition, t.detail);
            TRUNCATED
        }
        None => 0,
    })
}

fn verified(path: &Path) -> anyhow::Result<RunLog> {
    let text =
        fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    let log =
        RunLog::from_json(&text).with_context(|| format!("{}: not a run log", path.display()))?;
    replay(&log).with_context(|| format!("{}: replay failed", path.display()))?;
    Ok(log)
}

fn cmd_score(logs: &[PathBuf], format: Format, series_dir: Option<&Path>) -> Result<u8, Failure> {
    let runs = logs
        .iter()
        .map(|p| verified(p).map(|log| (p.display().to_string(), log)))
        .collect::<anyhow::Result<Vec<_>>>()
        .map_err(fail(INTEGRITY_ERROR))?;

    if let Some(dir) = series_dir {
        fs::create_dir_all(dir)
            .with_context(|| format!("cannot create {}", dir.display()))
            .map_err(fail(CONFIG_ERROR))?;
        for (path, (_, log)) in logs.iter().zip(&runs) {
            let stem = path
                .file_stem()
                .ok_or_else(|| anyhow!("{} has no file name", path.display()))
                .map_err(fail(CONFIG_ERROR))?;
            let target = dir.join(format!("{}.series.csv", stem.to_string_lossy()));
            write_output(Some(&target), &render_series(log)).map_err(fail(CONFIG_ERROR))?;
        }
    }
    write_output(None, &render_report(&runs, format)).map_err(fail(CONFIG_ERROR))?;
    Ok(0)
}

fn cmd_agents() -> String {
    let mut out = String::new();
    for kind in AgentKind::ALL {
        let (summary, params) = kind.describe();
        out.push_str(&format!("{:<14}{summary}\n", kind.as_str()));
        for p in params {
            out.push_str(&format!("{:<16}{p}\n", ""));
        }
    }
    out.push_str("\nall kinds: name, initial_prediction, token_cost (default 1)\n");
    out
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run {
            scenario,
            seed,
            out,
        } => cmd_run(scenario, *seed, out.as_deref()),
        Command::Score {
            logs,
            format,
            series_dir,
        } => cmd_score(logs, (*format).into(), series_dir.as_deref()),
        Command::Agents => write_output(None, &cmd_agents())
            .map(|_| 0)
            .map_err(fail(CONFIG_ERROR)),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(Failure { code, error }) => {
            eprintln!("error: {error:#}");
            ExitCode::from(code)
        }
    }
}
