//! Command-line driver: `simulate`, `analyze` and `compare`.
//!
//! Exit status 1 means the input (config, CSV, arguments) was rejected;
//! 2 means an engine or analysis step failed.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::{BufReader, Write};
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use serde::Serialize;

use crate::analysis::{report, report_interferogram, sinusoid_component, VisibilityReport};
use crate::config::{EngineChoice, OutputFormat, RunConfig};
use crate::error::Error;
use crate::interferometer::{
    scan_engine, ClosedForm, Interferogram, InterferometerKind, RateEngine,
};
use crate::io::{read_csv, records, write_csv, ResultRecord};
use crate::oracle::ModeOracle;
use crate::state::TwoPhotonState;

#[derive(Debug, Parser)]
#[command(
    name = "biphoton",
    version,
    about = "Biphoton interference in MZI and flipped-arm MZI"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Scan the delay and write one record per sample.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_enum)]
        engine: Option<EngineChoice>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Visibilities, periods and dip width of a simulate CSV.
    Analyze {
        #[arg(long = "in")]
        input: PathBuf,
        /// Visibility window in fs, `start:stop`.
        #[arg(long, allow_hyphen_values = true)]
        window: Option<String>,
    },
    /// Run MZI and MZIM on the same state and compare.
    Compare {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_enum)]
        engine: Option<EngineChoice>,
    },
}

/// Failure with its exit status.
#[derive(Debug)]
pub enum CliError {
    Input(String),
    Engine(Error),
}

impl CliError {
    pub fn code(&self) -> i32 {
        match self {
            CliError::Input(_) => 1,
            CliError::Engine(_) => 2,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Input(m) => write!(f, "{m}"),
            CliError::Engine(e) => write!(f, "{e}"),
        }
    }
}

fn input(e: impl std::fmt::Display) -> CliError {
    CliError::Input(e.to_string())
}

fn engine(e: Error) -> CliError {
    CliError::Engine(e)
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Parses `args` and runs the command; returns the exit status.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(stderr, "{e}");
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
        }
    };
    configure_threads();
    let result = match cli.command {
        Command::Simulate {
            config,
            engine,
            out,
        } => simulate(&config, engine, out, stdout, stderr),
        Command::Analyze { input, window } => analyze(&input, window.as_deref(), stdout),
        Command::Compare { config, engine } => compare(&config, engine, stdout),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.code()
        }
    }
}

/// Sizes the rayon pool from `BIPHOTON_THREADS` (0 or unset: automatic).
fn configure_threads() {
    let n = std::env::var("BIPHOTON_THREADS")
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .unwrap_or(0);
    if n > 0 {
        // Only the first call in a process can size the global pool.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
}

fn load(path: &PathBuf) -> CliResult<(RunConfig, TwoPhotonState)> {
    let cfg = RunConfig::load(path).map_err(|e| input(format!("{}: {e}", path.display())))?;
    let state = cfg
        .state()
        .map_err(|e| input(format!("{}: {e}", path.display())))?;
    Ok((cfg, state))
}

fn run_scan(
    cfg: &RunConfig,
    state: &TwoPhotonState,
    kind: InterferometerKind,
    use_oracle: bool,
) -> CliResult<Interferogram> {
    let ic = cfg.interferometer(kind).map_err(input)?;
    let taus = cfg.taus().map_err(input)?;
    let e: Box<dyn RateEngine> = if use_oracle {
        Box::new(ModeOracle::new(state, ic).map_err(engine)?)
    } else {
        Box::new(ClosedForm::new(state, ic).map_err(engine)?)
    };
    scan_engine(e.as_ref(), &taus, "config").map_err(engine)
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

fn simulate(
    path: &PathBuf,
    choice: Option<EngineChoice>,
    out: Option<PathBuf>,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> CliResult<()> {
    let (cfg, state) = load(path)?;
    let choice = choice.unwrap_or(cfg.engine);
    let kind = cfg.interferometer.kind;
    let mut rows: Vec<ResultRecord> = Vec::new();
    let mut summary = None;
    match choice {
        EngineChoice::Closed => rows = records(&run_scan(&cfg, &state, kind, false)?),
        EngineChoice::Oracle => rows = records(&run_scan(&cfg, &state, kind, true)?),
        EngineChoice::Both => {
            let c = run_scan(&cfg, &state, kind, false)?;
            let o = run_scan(&cfg, &state, kind, true)?;
            for (a, b) in records(&c).into_iter().zip(records(&o)) {
                rows.push(a);
                rows.push(b);
            }
            summary = Some(format!(
                "max |delta| closed vs oracle: singles_port1 {:.3e}, singles_port2 {:.3e}, coincidence {:.3e}",
                max_abs_diff(&c.singles, &o.singles),
                max_abs_diff(&c.singles_port2, &o.singles_port2),
                max_abs_diff(&c.coincidences, &o.coincidences),
            ));
        }
    }
    let mut buf = Vec::new();
    match cfg.output.format {
        OutputFormat::Csv => write_csv(&mut buf, &rows).map_err(engine)?,
        OutputFormat::Json => {
            serde_json::to_writer_pretty(&mut buf, &rows)
                .map_err(|e| engine(Error::Parse(e.to_string())))?;
            buf.push(b'\n');
        }
    }
    let target = out.or(cfg.output.path.clone());
    let io = |e: std::io::Error| engine(Error::Io(e));
    match &target {
        Some(p) => std::fs::write(p, &buf).map_err(io)?,
        None => stdout.write_all(&buf).map_err(io)?,
    }
    if let Some(s) = summary {
        // Keep stdout clean when it carries the records.
        let sink: &mut dyn Write = if target.is_some() { stdout } else { stderr };
        writeln!(sink, "{s}").map_err(io)?;
    }
    Ok(())
}

fn parse_window(w: &str) -> CliResult<(f64, f64)> {
    let bad = || input(format!("--window expects `start:stop` in fs, got `{w}`"));
    let (a, b) = w.split_once(':').ok_or_else(bad)?;
    let a: f64 = a.trim().parse().map_err(|_| bad())?;
    let b: f64 = b.trim().parse().map_err(|_| bad())?;
    if !(a < b) {
        return Err(bad());
    }
    Ok((a * 1e-15, b * 1e-15))
}

fn analyze(path: &PathBuf, window: Option<&str>, stdout: &mut dyn Write) -> CliResult<()> {
    let window = window.map(parse_window).transpose()?;
    let file = std::fs::File::open(path).map_err(|e| input(format!("{}: {e}", path.display())))?;
    let rows =
        read_csv(BufReader::new(file)).map_err(|e| input(format!("{}: {e}", path.display())))?;
    let mut groups: Vec<(String, Vec<&ResultRecord>)> = Vec::new();
    for r in &rows {
        match groups.iter_mut().find(|(e, _)| *e == r.engine) {
            Some((_, g)) => g.push(r),
            None => groups.push((r.engine.clone(), vec![r])),
        }
    }
    let mut reports = BTreeMap::new();
    for (name, g) in &groups {
        let tau: Vec<f64> = g.iter().map(|r| r.tau_fs * 1e-15).collect();
        let s: Vec<f64> = g.iter().map(|r| r.singles_port1).collect();
        let c: Vec<f64> = g.iter().map(|r| r.coincidence).collect();
        reports.insert(
            name.clone(),
            report((&tau, &s), (&tau, &c), window).map_err(engine)?,
        );
    }
    let text = if reports.len() == 1 {
        serde_json::to_string_pretty(reports.values().next().expect("one report"))
    } else {
        serde_json::to_string_pretty(&reports)
    }
    .map_err(|e| engine(Error::Parse(e.to_string())))?;
    writeln!(stdout, "{text}").map_err(|e| engine(Error::Io(e)))
}

#[derive(Debug, Serialize)]
struct Sinusoid {
    amplitude: f64,
    phase: f64,
}

#[derive(Debug, Serialize)]
struct FringeComparison {
    mzi: Sinusoid,
    mzim: Sinusoid,
    /// MZIM phase minus MZI phase, wrapped to (-π, π].
    phase_difference: f64,
    amplitude_ratio: f64,
}

#[derive(Debug, Serialize)]
struct Comparison {
    engine: &'static str,
    max_coincidence_difference: f64,
    coincidence_identical: bool,
    mzi: VisibilityReport,
    mzim: VisibilityReport,
    coincidence_fringe: FringeComparison,
}

fn wrap_phase(p: f64) -> f64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    let w = p.rem_euclid(two_pi);
    if w > std::f64::consts::PI {
        w - two_pi
    } else {
        w
    }
}

fn compare(path: &PathBuf, choice: Option<EngineChoice>, stdout: &mut dyn Write) -> CliResult<()> {
    let (cfg, state) = load(path)?;
    let use_oracle = !matches!(choice.unwrap_or(cfg.engine), EngineChoice::Closed);
    let a = run_scan(&cfg, &state, InterferometerKind::Mzi, use_oracle)?;
    let b = run_scan(&cfg, &state, InterferometerKind::Mzim, use_oracle)?;
    let diff = max_abs_diff(&a.coincidences, &b.coincidences);
    let wp = cfg.pump_frequency();
    let (am, pm) = sinusoid_component(&a.tau, &a.coincidences, wp).map_err(engine)?;
    let (bm, pb) = sinusoid_component(&b.tau, &b.coincidences, wp).map_err(engine)?;
    let cmp = Comparison {
        engine: if use_oracle { "oracle" } else { "closed" },
        max_coincidence_difference: diff,
        coincidence_identical: diff <= 1e-6,
        mzi: report_interferogram(&a, None).map_err(engine)?,
        mzim: report_interferogram(&b, None).map_err(engine)?,
        coincidence_fringe: FringeComparison {
            mzi: Sinusoid {
                amplitude: am,
                phase: pm,
            },
            mzim: Sinusoid {
                amplitude: bm,
                phase: pb,
            },
            phase_difference: wrap_phase(pb - pm),
            amplitude_ratio: bm / am,
        },
    };
    let text =
        serde_json::to_string_pretty(&cmp).map_err(|e| engine(Error::Parse(e.to_string())))?;
    writeln!(stdout, "{text}").map_err(|e| engine(Error::Io(e)))
}
