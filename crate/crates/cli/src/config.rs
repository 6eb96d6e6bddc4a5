//! Command-line flags, the optional TOML file, and the merged, validated
//! run configuration.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use coopsig::agents::{ModelRegistry, MAX_RECEIVER_LEVEL, MAX_SIGNALER_LEVEL};
use coopsig::experiments::stats::{DEFAULT_PERMUTATIONS, DEFAULT_RESAMPLES};
use coopsig::experiments::{CountMode, GroupKey};
use coopsig::grid::{BarrierCondition, MAX_ITEMS, MIN_ITEMS};
use serde::{Deserialize, Serialize};

/// A configuration problem; reported with exit status 2.
#[derive(Debug, Clone, PartialEq)]
pub struct UsageError(pub String);

impl UsageError {
    fn key(key: &str, msg: impl std::fmt::Display) -> Self {
        UsageError(format!("invalid `{key}`: {msg}"))
    }
}

#[derive(Parser, Debug)]
#[command(name = "coopsig", version, about = "Cooperative overloaded-signaling simulations")]
pub struct Cli {
    #[command(subcommand)]
    pub command: CommandArgs,
}

#[derive(Subcommand, Debug)]
pub enum CommandArgs {
    /// Generate communication-optimal trials and write them as JSON.
    GenTrials(Flags),
    /// Play models on a trial file (or freshly generated trials).
    Run(Flags),
    /// Simulation 1: all models across 2-9 items on the receiver-barrier grid.
    Sim1(Flags),
    /// Simulation 2: IW and aRSA over level pairs and both barrier positions.
    Sim2(Flags),
    /// Summarize an existing records file.
    Report(ReportFlags),
}

#[derive(Args, Debug, Default, Clone)]
pub struct Flags {
    /// Master seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Soft-max rationality (default 4).
    #[arg(long, allow_negative_numbers = true)]
    pub beta: Option<f64>,
    /// Trials per condition.
    #[arg(long, allow_negative_numbers = true)]
    pub n: Option<i64>,
    /// Item count, range (`2-9`) or list (`3,6`).
    #[arg(long = "n-items")]
    pub n_items: Option<String>,
    #[arg(long, value_enum)]
    pub barrier: Option<BarrierArg>,
    /// Comma-separated model names (iw, arsa, ju, self, cc).
    #[arg(long)]
    pub models: Option<String>,
    #[arg(long = "s-level")]
    pub s_level: Option<u8>,
    #[arg(long = "r-level")]
    pub r_level: Option<u8>,
    /// Trial JSON file to play instead of generating trials.
    #[arg(long)]
    pub trials: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub workers: Option<usize>,
    /// Read N as kept (filtered) trials or as generated candidates.
    #[arg(long = "count-mode", value_enum)]
    pub count_mode: Option<CountModeArg>,
    /// TOML file with defaults; flags win.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct ReportFlags {
    /// Records CSV to summarize.
    pub records: PathBuf,
    /// Comma-separated grouping columns.
    #[arg(long = "group-by", default_value = "n_items,model")]
    pub group_by: String,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum BarrierArg {
    Rb,
    Sb,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum CountModeArg {
    Filtered,
    Generated,
}

/// `n_items` in a config file: a number or a range/list string.
#[derive(Deserialize, Debug, Clone, PartialEq)]
#[serde(untagged)]
pub enum ItemSpec {
    One(i64),
    Text(String),
}

#[derive(Deserialize, Debug, Default, Clone, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub seed: Option<u64>,
    pub beta: Option<f64>,
    pub n: Option<i64>,
    pub n_items: Option<ItemSpec>,
    pub barrier: Option<String>,
    pub models: Option<Vec<String>>,
    pub s_level: Option<u8>,
    pub r_level: Option<u8>,
    pub trials: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub workers: Option<usize>,
    pub count_mode: Option<CountMode>,
}

impl FileConfig {
    pub fn parse(text: &str) -> Result<Self, UsageError> {
        toml::from_str(text).map_err(|e| UsageError(format!("config file: {}", e.message())))
    }

    pub fn load(path: &Path) -> Result<Self, UsageError> {
        let text =
            fs::read_to_string(path).map_err(|e| UsageError::key("config", format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }
}

#[derive(Serialize, Debug, Clone, Copy, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    GenTrials,
    Run,
    Sim1,
    Sim2,
    Report,
}

/// Fully resolved configuration; echoed into the manifest.
#[derive(Serialize, Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub seed: u64,
    pub beta: f64,
    pub n: usize,
    pub n_items: Vec<usize>,
    pub barriers: Vec<BarrierCondition>,
    pub models: Vec<String>,
    pub s_levels: Vec<u8>,
    pub r_levels: Vec<u8>,
    pub trials: Option<PathBuf>,
    pub records: Option<PathBuf>,
    pub group_by: Vec<GroupKey>,
    pub out: PathBuf,
    pub workers: usize,
    pub count_mode: CountMode,
    pub resamples: usize,
    pub permutations: usize,
}

pub fn parse_item_spec(key: &str, text: &str) -> Result<Vec<usize>, UsageError> {
    let bad = || UsageError::key(key, format!("expected a count, range or list, got `{text}`"));
    let num = |s: &str| s.trim().parse::<usize>().map_err(|_| bad());
    let out: Vec<usize> = if let Some((a, b)) = text.split_once('-') {
        let (a, b) = (num(a)?, num(b)?);
        if a > b {
            return Err(bad());
        }
        (a..=b).collect()
    } else {
        text.split(',').map(num).collect::<Result<_, _>>()?
    };
    if out.is_empty() {
        return Err(bad());
    }
    if let Some(n) = out.iter().find(|n| !(MIN_ITEMS..=MAX_ITEMS).contains(*n)) {
        return Err(UsageError::key(
            key,
            format!("{n} items is outside {MIN_ITEMS}-{MAX_ITEMS}"),
        ));
    }
    Ok(out)
}

fn parse_barrier(text: &str) -> Result<BarrierCondition, UsageError> {
    match text.to_ascii_lowercase().as_str() {
        "rb" => Ok(BarrierCondition::RB),
        "sb" => Ok(BarrierCondition::SB),
        _ => Err(UsageError::key("barrier", format!("expected rb or sb, got `{text}`"))),
    }
}

fn check_out_dir(path: &Path) -> Result<(), UsageError> {
    if path.exists() && !path.is_dir() {
        return Err(UsageError::key("out", format!("{} is not a directory", path.display())));
    }
    fs::create_dir_all(path).map_err(|e| UsageError::key("out", format!("{}: {e}", path.display())))?;
    tempfile::NamedTempFile::new_in(path)
        .map(drop)
        .map_err(|e| UsageError::key("out", format!("{} is not writable: {e}", path.display())))
}

fn default_workers() -> usize {
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
}

/// Merges flags over the file over per-command defaults and validates.
pub fn resolve(command: Command, flags: &Flags, file: &FileConfig) -> Result<RunConfig, UsageError> {
    let seed = flags.seed.or(file.seed).unwrap_or(0);

    let beta = flags.beta.or(file.beta).unwrap_or(4.0);
    if !beta.is_finite() || beta < 0.0 {
        return Err(UsageError::key("beta", format!("must be finite and >= 0, got {beta}")));
    }

    let n_default = match command {
        Command::Sim1 => 2000,
        Command::Sim2 => 500,
        _ => 100,
    };
    let n = flags.n.or(file.n).unwrap_or(n_default);
    if n < 1 {
        return Err(UsageError::key("n", format!("trial count must be >= 1, got {n}")));
    }

    let n_items = match (&flags.n_items, &file.n_items) {
        (Some(text), _) | (None, Some(ItemSpec::Text(text))) => parse_item_spec("n-items", text)?,
        (None, Some(ItemSpec::One(k))) => parse_item_spec("n-items", &k.to_string())?,
        (None, None) => match command {
            Command::Sim1 => (MIN_ITEMS..=MAX_ITEMS).collect(),
            _ => vec![6],
        },
    };

    if command == Command::Sim2 && n_items.len() != 1 {
        return Err(UsageError::key("n-items", "sim2 runs at a single item count"));
    }

    let barrier = match (flags.barrier, &file.barrier) {
        (Some(BarrierArg::Rb), _) => Some(BarrierCondition::RB),
        (Some(BarrierArg::Sb), _) => Some(BarrierCondition::SB),
        (None, Some(text)) => Some(parse_barrier(text)?),
        (None, None) => None,
    };
    let barriers = match (barrier, command) {
        (Some(b), _) => vec![b],
        (None, Command::Sim2) => vec![BarrierCondition::RB, BarrierCondition::SB],
        (None, _) => vec![BarrierCondition::RB],
    };

    let models: Vec<String> = match (&flags.models, &file.models) {
        (Some(text), _) => text
            .split(',')
            .map(|s| s.trim().to_string())
            .filter(|s| !s.is_empty())
            .collect(),
        (None, Some(list)) => list.clone(),
        (None, None) => match command {
            Command::Sim2 => vec!["iw".into(), "arsa".into()],
            _ => vec!["iw".into(), "arsa".into(), "ju".into(), "self".into()],
        },
    };
    if models.is_empty() {
        return Err(UsageError::key("models", "no models given"));
    }
    let registry = ModelRegistry::builtin();
    let models = models
        .iter()
        .map(|m| registry.get(m).map(|model| model.name().to_string()))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| UsageError::key("models", format!("{e}; known: {}", registry.names().join(", "))))?;

    let s_level = flags.s_level.or(file.s_level);
    let r_level = flags.r_level.or(file.r_level);
    if let Some(s) = s_level {
        if !(1..=MAX_SIGNALER_LEVEL).contains(&s) {
            return Err(UsageError::key("s-level", format!("must be 1 or 2, got {s}")));
        }
    }
    if let Some(r) = r_level {
        if r > MAX_RECEIVER_LEVEL {
            return Err(UsageError::key("r-level", format!("must be 0, 1 or 2, got {r}")));
        }
    }
    let (s_levels, r_levels) = match command {
        Command::Sim2 => (
            s_level.map_or_else(|| (1..=MAX_SIGNALER_LEVEL).collect(), |s| vec![s]),
            r_level.map_or_else(|| (0..=MAX_RECEIVER_LEVEL).collect(), |r| vec![r]),
        ),
        _ => (vec![s_level.unwrap_or(1)], vec![r_level.unwrap_or(1)]),
    };

    let trials = flags.trials.clone().or_else(|| file.trials.clone());
    if let Some(path) = &trials {
        if command != Command::Run {
            return Err(UsageError::key("trials", "only the run command reads a trial file"));
        }
        if !path.is_file() {
            return Err(UsageError::key(
                "trials",
                format!("{} is not a readable file", path.display()),
            ));
        }
    }

    let workers = flags.workers.or(file.workers).unwrap_or_else(default_workers);
    if workers == 0 {
        return Err(UsageError::key("workers", "must be >= 1"));
    }

    let out = flags
        .out
        .clone()
        .or_else(|| file.out.clone())
        .unwrap_or_else(|| PathBuf::from("out"));
    check_out_dir(&out)?;

    let count_mode = match flags.count_mode {
        Some(CountModeArg::Filtered) => CountMode::Filtered,
        Some(CountModeArg::Generated) => CountMode::Generated,
        None => file.count_mode.unwrap_or_default(),
    };

    Ok(RunConfig {
        command,
        seed,
        beta,
        n: n as usize,
        n_items,
        barriers,
        models,
        s_levels,
        r_levels,
        trials,
        records: None,
        group_by: default_grouping(command),
        out,
        workers,
        count_mode,
        resamples: DEFAULT_RESAMPLES,
        permutations: DEFAULT_PERMUTATIONS,
    })
}

pub fn default_grouping(command: Command) -> Vec<GroupKey> {
    match command {
        Command::Sim2 => vec![GroupKey::Barrier, GroupKey::Model, GroupKey::SLevel, GroupKey::RLevel],
        Command::GenTrials => vec![],
        _ => vec![GroupKey::NItems, GroupKey::Model],
    }
}

pub fn resolve_report(flags: &ReportFlags) -> Result<RunConfig, UsageError> {
    if !flags.records.is_file() {
        return Err(UsageError::key(
            "records",
            format!("{} is not a readable file", flags.records.display()),
        ));
    }
    let group_by = flags
        .group_by
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| s.parse::<GroupKey>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| UsageError::key("group-by", e))?;
    let out = flags.out.clone().unwrap_or_else(|| PathBuf::from("out"));
    check_out_dir(&out)?;
    Ok(RunConfig {
        command: Command::Report,
        seed: flags.seed.unwrap_or(0),
        beta: 4.0,
        n: 1,
        n_items: vec![],
        barriers: vec![],
        models: vec![],
        s_levels: vec![],
        r_levels: vec![],
        trials: None,
        records: Some(flags.records.clone()),
        group_by,
        out,
        workers: 1,
        count_mode: CountMode::default(),
        resamples: DEFAULT_RESAMPLES,
        permutations: DEFAULT_PERMUTATIONS,
    })
}
