//! Command-line front end: JSON run configs, flag overrides, report files.

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::chemistry::{InputAssignment, InputLabel};
use crate::error::{CliError, SimError};
use crate::experiments::{
    mst_length, run_compound_scenario, run_spanning, run_trial_observed, run_truth_table,
    ArenaSpec, TrialConfig, TruthTableOptions,
};
use crate::frames::FrameWriter;
use crate::geometry::{ArenaKind, ZoneId};

/// Seed used when neither the command line nor the config sets one.
pub const SEED_ENV: &str = "PHYSARUM_SEED";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    #[default]
    Trial,
    TruthTable,
    Compound,
    Spanning,
}

/// Everything a batch run needs. Trial parameters sit at the top level of
/// the JSON next to the run-level keys.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    pub experiment: ExperimentKind,
    pub trials: usize,
    pub nn_trials: Option<usize>,
    pub combos: Option<Vec<String>>,
    pub out: PathBuf,
    /// Frame cadence in steps; 0 disables frames.
    pub frames_every: usize,
    pub jobs: Option<usize>,
    #[serde(flatten)]
    pub trial: TrialConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            experiment: ExperimentKind::Trial,
            trials: 50,
            nn_trials: None,
            combos: None,
            out: PathBuf::from("results"),
            frames_every: 0,
            jobs: None,
            trial: TrialConfig::default(),
        }
    }
}

impl RunConfig {
    /// Defaults for `kind`: the arena and inputs an experiment of that kind
    /// uses when the config does not name them.
    pub fn for_kind(kind: ExperimentKind) -> RunConfig {
        let mut c = RunConfig {
            experiment: kind,
            ..RunConfig::default()
        };
        c.apply_kind_defaults(false, false);
        c
    }

    fn apply_kind_defaults(&mut self, has_arena: bool, has_inputs: bool) {
        match self.experiment {
            ExperimentKind::Compound if !has_arena => self.trial.arena = ArenaSpec::compound(),
            ExperimentKind::Spanning if !has_arena => {
                self.trial.arena = ArenaSpec::dish(&ZoneId::COMPASS);
            }
            _ => {}
        }
        if self.experiment == ExperimentKind::Spanning && !has_inputs {
            if let ArenaSpec::Dish { pads, .. } = &self.trial.arena {
                self.trial.inputs = pads.iter().fold(InputAssignment::default(), |a, z| {
                    a.with(*z, InputLabel::Activator)
                });
            }
        }
    }

    pub fn jobs(&self) -> usize {
        self.jobs.unwrap_or_else(default_jobs).max(1)
    }

    /// Checks the whole config, including the chemistry stability bound,
    /// before anything runs.
    pub fn validate(&self) -> Result<(), CliError> {
        if self.trials == 0 || self.nn_trials == Some(0) {
            return Err(CliError::Validation("trials must be at least 1".into()));
        }
        if self.jobs == Some(0) {
            return Err(CliError::Validation("jobs must be at least 1".into()));
        }
        let arena = self.trial.validate()?;
        let want = match self.experiment {
            ExperimentKind::Trial => None,
            ExperimentKind::TruthTable => Some((ArenaKind::TJunction, "t-junction")),
            ExperimentKind::Compound => Some((ArenaKind::CompoundT, "compound")),
            ExperimentKind::Spanning => Some((ArenaKind::OpenDish, "dish")),
        };
        if let Some((kind, name)) = want {
            if arena.kind() != kind {
                return Err(CliError::Validation(format!(
                    "this experiment needs a `{name}` arena"
                )));
            }
        }
        if self.experiment == ExperimentKind::TruthTable {
            for combo in self.combos.iter().flatten() {
                InputAssignment::from_combo(combo).map_err(SimError::from)?;
            }
        }
        Ok(())
    }
}

fn default_jobs() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

fn known_keys() -> Vec<String> {
    let mut keys: Vec<String> = [
        "experiment",
        "trials",
        "nn_trials",
        "combos",
        "out",
        "frames_every",
        "jobs",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    if let Ok(Value::Object(m)) = serde_json::to_value(TrialConfig::default()) {
        keys.extend(m.keys().cloned());
    }
    keys
}

fn seed_from_env() -> Result<Option<u64>, CliError> {
    match std::env::var(SEED_ENV) {
        Ok(v) => v.trim().parse().map(Some).map_err(|_| {
            CliError::Validation(format!("{SEED_ENV} must be an unsigned integer, got `{v}`"))
        }),
        Err(_) => Ok(None),
    }
}

/// Reads and validates a JSON run config, filling in defaults.
pub fn parse_config(path: &Path) -> Result<RunConfig, CliError> {
    parse_config_as(path, None)
}

/// Like [`parse_config`], with the experiment kind forced by the caller.
pub fn parse_config_as(path: &Path, kind: Option<ExperimentKind>) -> Result<RunConfig, CliError> {
    let text = fs::read_to_string(path).map_err(|e| {
        if e.kind() == io::ErrorKind::NotFound {
            CliError::Validation(format!("config file {} does not exist", path.display()))
        } else {
            CliError::io(format!("reading {}", path.display()), e)
        }
    })?;
    let config = config_from_str(&text, &path.display().to_string(), kind)?;
    config.validate()?;
    Ok(config)
}

fn parse_error(path: &str, e: &serde_json::Error) -> CliError {
    let full = e.to_string();
    let suffix = format!(" at line {} column {}", e.line(), e.column());
    CliError::Parse {
        path: path.to_string(),
        line: e.line(),
        column: e.column(),
        message: full.strip_suffix(&suffix).unwrap_or(&full).to_string(),
    }
}

fn config_from_str(
    text: &str,
    path: &str,
    kind: Option<ExperimentKind>,
) -> Result<RunConfig, CliError> {
    let value: Value = serde_json::from_str(text).map_err(|e| parse_error(path, &e))?;
    let Value::Object(map) = &value else {
        return Err(CliError::Validation(format!(
            "{path}: top level must be a JSON object"
        )));
    };
    let known = known_keys();
    if let Some(k) = map.keys().find(|k| !known.contains(k)) {
        return Err(CliError::Validation(format!("{path}: unknown key `{k}`")));
    }
    let mut config: RunConfig = serde_json::from_str(text).map_err(|e| parse_error(path, &e))?;
    if let Some(kind) = kind {
        config.experiment = kind;
    }
    config.apply_kind_defaults(map.contains_key("arena"), map.contains_key("inputs"));
    if !map.contains_key("seed") {
        if let Some(seed) = seed_from_env()? {
            config.trial.seed = seed;
        }
    }
    Ok(config)
}

#[derive(Debug, Parser)]
#[command(name = "physarum", version, about = "Seeded slime-mould routing simulator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Runs the experiment named in the config (a single trial by default).
    Run(RunArgs),
    /// All nine input combinations on the simple T.
    TruthTable(RunArgs),
    /// One input assignment on the compound junction.
    Compound(RunArgs),
    /// Activator pads on the open dish.
    Spanning(RunArgs),
    /// Prints the Euclidean minimum spanning tree length of `x,y` points.
    Mst {
        #[arg(required = true, num_args = 2.., allow_hyphen_values = true)]
        points: Vec<String>,
    },
}

#[derive(Debug, Clone, Default, Args)]
pub struct RunArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub frames_every: Option<usize>,
    #[arg(long)]
    pub jobs: Option<usize>,
}

impl RunArgs {
    /// Loads the config (or defaults) and applies flag overrides.
    pub fn resolve(&self, kind: Option<ExperimentKind>) -> Result<RunConfig, CliError> {
        let mut config = match &self.config {
            Some(path) => parse_config_as(path, kind)?,
            None => {
                let mut c = RunConfig::for_kind(kind.unwrap_or_default());
                if let Some(seed) = seed_from_env()? {
                    c.trial.seed = seed;
                }
                c
            }
        };
        if let Some(seed) = self.seed {
            config.trial.seed = seed;
        }
        if let Some(trials) = self.trials {
            config.trials = trials;
        }
        if let Some(out) = &self.out {
            config.out = out.clone();
        }
        if let Some(every) = self.frames_every {
            config.frames_every = every;
        }
        if let Some(jobs) = self.jobs {
            config.jobs = Some(jobs);
        }
        config.validate()?;
        Ok(config)
    }
}

/// Parses `x,y`.
pub fn parse_point(s: &str) -> Result<(f64, f64), CliError> {
    let bad = || CliError::Validation(format!("expected a point as `x,y`, got `{s}`"));
    let (x, y) = s.split_once(',').ok_or_else(bad)?;
    let x: f64 = x.trim().parse().map_err(|_| bad())?;
    let y: f64 = y.trim().parse().map_err(|_| bad())?;
    if !(x.is_finite() && y.is_finite()) {
        return Err(bad());
    }
    Ok((x, y))
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(format!("creating {}", dir.display()), e))?;
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|e| CliError::io(format!("writing {}", path.display()), e))
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("reports serialize");
    s.push('\n');
    s
}

fn io_out(e: io::Error) -> CliError {
    CliError::io("writing output", e)
}

fn run_single(config: &RunConfig, out: &mut dyn Write) -> Result<(), CliError> {
    let every = config.frames_every;
    let mut frames = (every > 0).then(|| FrameWriter::new(config.out.join("frames")));
    let mut frame_error = None;
    let result = run_trial_observed(&config.trial, |snap| {
        let Some(writer) = frames.as_mut() else {
            return;
        };
        if frame_error.is_some() || snap.step % every != 0 {
            return;
        }
        if let Err(e) = writer.write_snapshot(
            snap.step,
            snap.arena.width(),
            snap.arena.height(),
            snap.fields,
            snap.swarm,
            snap.theta_occ,
        ) {
            frame_error = Some(e);
        }
    })?;
    if let Some(e) = frame_error {
        return Err(CliError::io("writing frames", e));
    }
    write_file(&config.out, "trial.json", &to_json(&result))?;
    writeln!(out, "seed {} steps {}", result.seed, result.steps).map_err(io_out)?;
    writeln!(out, "outcome {}", result.outcome).map_err(io_out)?;
    writeln!(out, "pads {}", result.bits.describe()).map_err(io_out)?;
    if let Some(adv) = result.advancement_mm {
        writeln!(out, "advancement {adv:.1} mm").map_err(io_out)?;
    }
    if let Some(rep) = &result.spanning {
        writeln!(
            out,
            "connected {} ratio {}",
            rep.all_connected,
            rep.ratio.map_or("-".to_string(), |r| format!("{r:.3}"))
        )
        .map_err(io_out)?;
    }
    Ok(())
}

fn run_table(config: &RunConfig, out: &mut dyn Write) -> Result<(), CliError> {
    let mut opts = TruthTableOptions {
        trials: config.trials,
        nn_trials: config.nn_trials,
        jobs: config.jobs(),
        ..TruthTableOptions::default()
    };
    if let Some(combos) = &config.combos {
        opts.combos = combos.clone();
    }
    let report = run_truth_table(&config.trial, &opts)?;
    write_file(&config.out, "table1.csv", &report.to_csv())?;
    write_file(&config.out, "summary.json", &to_json(&report))?;
    write!(out, "{}", report.summary_table()).map_err(io_out)?;
    if let Some(lf) = report.row("NN").and_then(|r| r.left_fraction) {
        writeln!(out, "NN left fraction {lf:.2}").map_err(io_out)?;
    }
    Ok(())
}

fn run_compound(config: &RunConfig, out: &mut dyn Write) -> Result<(), CliError> {
    let report = run_compound_scenario(
        &config.trial,
        &config.trial.inputs,
        config.trials,
        config.jobs(),
    )?;
    write_file(&config.out, "compound.csv", &report.to_csv())?;
    write_file(&config.out, "compound.json", &to_json(&report))?;
    let assignment: Vec<String> = report
        .assignment
        .iter()
        .map(|(z, l)| format!("{z}={l}"))
        .collect();
    writeln!(out, "inputs {}", assignment.join(" ")).map_err(io_out)?;
    match (&report.expected, report.success_fraction) {
        (Some(e), Some(f)) => {
            writeln!(out, "expected {}  success {:.0}%", e.describe(), 100.0 * f).map_err(io_out)?
        }
        _ => writeln!(out, "no activator: raw outcomes only").map_err(io_out)?,
    }
    for (k, v) in &report.central_histogram {
        writeln!(out, "central {k:<6} {v}").map_err(io_out)?;
    }
    for (k, v) in &report.pattern_histogram {
        writeln!(out, "{v:>4}  {k}").map_err(io_out)?;
    }
    Ok(())
}

fn run_dish(config: &RunConfig, out: &mut dyn Write) -> Result<(), CliError> {
    let summary = run_spanning(&config.trial, config.trials, config.jobs())?;
    write_file(&config.out, "spanning.csv", &summary.to_csv())?;
    write_file(&config.out, "spanning.json", &to_json(&summary))?;
    let pads: Vec<&str> = summary.activator_pads.iter().map(|z| z.name()).collect();
    writeln!(
        out,
        "activator pads {}",
        if pads.is_empty() { "none".to_string() } else { pads.join("+") }
    )
    .map_err(io_out)?;
    writeln!(
        out,
        "connected {:.0}%  ratio<=2 {}  rim {:.0}%",
        100.0 * summary.connected_fraction,
        summary
            .ratio_ok_fraction
            .map_or("-".to_string(), |f| format!("{:.0}%", 100.0 * f)),
        100.0 * summary.rim_fraction
    )
    .map_err(io_out)?;
    Ok(())
}

/// Executes a parsed command line.
pub fn execute(cli: &Cli, out: &mut dyn Write) -> Result<(), CliError> {
    let (args, kind) = match &cli.command {
        Command::Mst { points } => {
            let pts = points
                .iter()
                .map(|p| parse_point(p))
                .collect::<Result<Vec<_>, _>>()?;
            let len = mst_length(&pts)?;
            writeln!(out, "{len}").map_err(io_out)?;
            return Ok(());
        }
        Command::Run(a) => (a, None),
        Command::TruthTable(a) => (a, Some(ExperimentKind::TruthTable)),
        Command::Compound(a) => (a, Some(ExperimentKind::Compound)),
        Command::Spanning(a) => (a, Some(ExperimentKind::Spanning)),
    };
    let config = args.resolve(kind)?;
    match config.experiment {
        ExperimentKind::Trial => run_single(&config, out),
        ExperimentKind::TruthTable => run_table(&config, out),
        ExperimentKind::Compound => run_compound(&config, out),
        ExperimentKind::Spanning => run_dish(&config, out),
    }
}

/// Full entry point: parses `args`, runs, reports errors on stderr and
/// returns the process exit code.
pub fn main_with_args<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = if e.use_stderr() {
                write!(err, "{e}")
            } else {
                write!(out, "{e}")
            };
            return code;
        }
    };
    match execute(&cli, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}
