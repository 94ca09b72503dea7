//! Command-line front end: argument parsing, table generation and CSV/JSON
//! emission.
//!
//! Exit codes: 0 success, 2 invalid arguments, 3 library (domain) failure,
//! 4 I/O failure. Failures also print a one-line JSON error record on stderr.

use std::ffi::OsString;
use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::counting::{self, BigCount, OccupationMap};
use crate::distributions::{self, ExponentSeries};
use crate::error::Error;
use crate::maxent::{self, MomentConstraints};
use crate::tsallis::{self, QParams};

/// Relative `--output` paths are resolved against this directory when set.
pub const OUTPUT_DIR_ENV: &str = "COHERENT_OUTPUT_DIR";

pub const DEFAULT_STEPS: usize = 50;

#[derive(Debug, Parser)]
#[command(
    name = "coherent",
    version,
    about = "Coherent-access microstate counting, corrected Bose-Einstein/Boltzmann curves, \
             moment MaxEnt solves and q-exponential comparisons"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output format.
    #[arg(long, value_enum, default_value_t = OutputFormat::Csv, global = true)]
    format: OutputFormat,

    /// Write the table here instead of stdout (relative paths honour $COHERENT_OUTPUT_DIR).
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,

    /// Recorded in JSON metadata; every subcommand is deterministic.
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Subcommand, Serialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Command {
    /// Coherent-access count of one level: G = sum_k C(g,k) = 2^g - 1 and
    /// w* = (G + n - 1)! / ((G - 1)! n!)
    Count {
        /// Sublevels g of the level (dimensionless, >= 1).
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        g: u32,
        /// Particles N* in the level.
        #[arg(long)]
        n: u64,
    },

    /// Total microstates Omega = sum over macrostates of prod_j (G_j + N*_j - 1)! / ((G_j - 1)! N*_j!)
    Omega {
        /// Comma-separated sublevel counts g_j, one per level (each >= 1).
        #[arg(long, value_delimiter = ',', required = true, num_args = 1..)]
        levels: Vec<u32>,
        /// Total particle number N*.
        #[arg(long)]
        n: u64,
    },

    /// List every coherent occupation of g sublevels by n particles, counted by
    /// w* = (G + n - 1)! / ((G - 1)! n!) with G = 2^g - 1
    Enumerate {
        /// Sublevels g (1..=20).
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..=20))]
        g: u32,
        /// Particles n.
        #[arg(long)]
        n: u32,
    },

    /// Occupation per state N*/G = 1/(exp(eps*) - 1) with
    /// eps* = beta E + alpha_1 (beta E)^2 + ..., against the equilibrium 1/(exp(beta E) - 1)
    BeCurve(CurveArgs),

    /// Weight exp(-beta E - alpha_1 (beta E)^2 - ...) against the Boltzmann factor exp(-beta E),
    /// plus both normalized over the grid (P = weight / Z)
    BoltzmannCurve(CurveArgs),

    /// Solve p_j proportional to exp(-sum_n beta_n E_j^n) subject to <E^n> = target_n
    Maxent {
        /// Comma-separated energy grid E_j [energy].
        #[arg(long, value_delimiter = ',', required = true, num_args = 1, allow_hyphen_values = true)]
        grid: Vec<f64>,
        /// Comma-separated raw moment targets <E^1>, <E^2>, ... [energy^n].
        #[arg(long, value_delimiter = ',', required = true, num_args = 1, allow_hyphen_values = true)]
        moments: Vec<f64>,
        /// Max-norm tolerance on the moment residual.
        #[arg(long, default_value_t = maxent::DEFAULT_TOLERANCE)]
        tol: f64,
        /// Newton iteration cap.
        #[arg(long, default_value_t = maxent::DEFAULT_MAX_ITER)]
        max_iter: usize,
    },

    /// Compare [1 - (1-q) beta E]^(1/(1-q)) with its truncated exponent series
    /// exp(-sum_n (1-q)^(n-1) (beta E)^n / n)
    QCompare {
        /// Entropic index q (dimensionless).
        #[arg(long, allow_negative_numbers = true)]
        q: f64,
        /// Inverse temperature beta = 1/kT [1/energy].
        #[arg(long, default_value_t = 1.0)]
        beta: f64,
        /// Largest beta E on the grid (dimensionless); needs |(1-q) beta E| < 1.
        #[arg(long)]
        beta_e_max: f64,
        /// Highest power of beta E kept in the series.
        #[arg(long, default_value_t = 10)]
        order: u32,
        /// Grid points from 0 to beta-e-max.
        #[arg(long, default_value_t = DEFAULT_STEPS)]
        steps: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Args, Serialize)]
pub struct CurveArgs {
    /// Inverse temperature beta = 1/kT [1/energy].
    #[arg(long, default_value_t = 1.0)]
    pub beta: f64,
    /// First-order coefficient alpha_1 of (beta E)^2 (dimensionless).
    #[arg(long, allow_negative_numbers = true, conflicts_with = "alphas")]
    pub alpha1: Option<f64>,
    /// Comma-separated alpha_1, alpha_2, ... for (beta E)^2, (beta E)^3, ... (dimensionless).
    #[arg(long, value_delimiter = ',', num_args = 1, allow_hyphen_values = true)]
    pub alphas: Option<Vec<f64>>,
    /// Largest energy on the grid [energy].
    #[arg(long, default_value_t = 5.0)]
    pub e_max: f64,
    /// Number of grid points.
    #[arg(long, default_value_t = DEFAULT_STEPS)]
    pub steps: usize,
}

impl CurveArgs {
    pub fn series(&self) -> Result<ExponentSeries, Error> {
        let alphas = match (&self.alphas, self.alpha1) {
            (Some(a), _) => a.clone(),
            (None, Some(a1)) => vec![a1],
            (None, None) => Vec::new(),
        };
        ExponentSeries::new(self.beta, alphas)
    }
}

/// Validated invocation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    #[serde(flatten)]
    pub command: Command,
    pub format: OutputFormat,
    pub output: Option<PathBuf>,
    pub seed: Option<u64>,
}

#[derive(Debug)]
pub enum CliError {
    /// Bad or missing flags, or values outside an operation's preconditions.
    Usage(String),
    /// `--help` / `--version` output; not a failure.
    Info(String),
    Library(Error),
    Io(std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Info(_) => 0,
            CliError::Usage(_) => 2,
            CliError::Library(Error::InvalidArgument(_)) => 2,
            CliError::Library(_) => 3,
            CliError::Io(_) => 4,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Info(_) => "info",
            CliError::Usage(_) => "usage",
            CliError::Library(e) => e.kind(),
            CliError::Io(_) => "io",
        }
    }

    /// One-line JSON error record.
    pub fn record(&self) -> String {
        json!({
            "error": {
                "kind": self.kind(),
                "exit_code": self.exit_code(),
                "message": self.to_string(),
            }
        })
        .to_string()
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) | CliError::Info(msg) => f.write_str(msg.trim_end()),
            CliError::Library(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Library(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

/// Parses `argv` (including the program name) and checks every numeric value
/// against the preconditions of the operation it feeds.
pub fn parse_args<I, T>(argv: I) -> Result<RunConfig, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(argv).map_err(|e| {
        use clap::error::ErrorKind;
        let text = e.render().to_string();
        match e.kind() {
            ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => CliError::Info(text),
            _ => CliError::Usage(text),
        }
    })?;
    validate(&cli.command)?;
    Ok(RunConfig {
        command: cli.command,
        format: cli.format,
        output: cli.output,
        seed: cli.seed,
    })
}

fn validate(command: &Command) -> Result<(), CliError> {
    match command {
        Command::Count { .. } | Command::Enumerate { .. } => {}
        Command::Omega { levels, .. } => {
            if levels.contains(&0) {
                return Err(usage("every level needs g >= 1"));
            }
        }
        Command::BeCurve(args) | Command::BoltzmannCurve(args) => {
            args.series().map_err(|e| usage(e.to_string()))?;
            if !(args.e_max.is_finite() && args.e_max > 0.0) {
                return Err(usage(format!("--e-max must be positive, got {}", args.e_max)));
            }
            if args.steps == 0 {
                return Err(usage("--steps must be at least 1"));
            }
        }
        Command::Maxent { grid, moments, tol, max_iter } => {
            MomentConstraints::new(grid.clone(), moments.clone()).map_err(|e| usage(e.to_string()))?;
            if !(tol.is_finite() && *tol > 0.0) {
                return Err(usage(format!("--tol must be positive, got {tol}")));
            }
            if *max_iter == 0 {
                return Err(usage("--max-iter must be at least 1"));
            }
        }
        Command::QCompare { q, beta, beta_e_max, order, steps } => {
            QParams::with_unit_k(*q, *beta).map_err(|e| usage(e.to_string()))?;
            if !(beta_e_max.is_finite() && *beta_e_max >= 0.0) {
                return Err(usage(format!("--beta-e-max must be nonnegative, got {beta_e_max}")));
            }
            if ((1.0 - q) * beta_e_max).abs() >= 1.0 {
                return Err(usage(format!(
                    "|(1-q) beta E| must stay below 1 on the grid; got {}",
                    ((1.0 - q) * beta_e_max).abs()
                )));
            }
            if *order == 0 {
                return Err(usage("--order must be at least 1"));
            }
            if *steps == 0 {
                return Err(usage("--steps must be at least 1"));
            }
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Count(BigCount),
    Int(u64),
    Float(f64),
    Text(String),
}

impl Cell {
    /// CSV text. Floats carry 17 significant digits.
    pub fn to_csv(&self) -> String {
        match self {
            Cell::Count(c) => c.to_string(),
            Cell::Int(i) => i.to_string(),
            Cell::Float(x) => format!("{x:.16e}"),
            Cell::Text(s) => s.clone(),
        }
    }

    fn to_json(&self) -> Value {
        match self {
            Cell::Count(c) => Value::String(c.to_string()),
            Cell::Int(i) => json!(i),
            Cell::Float(x) => json!(x),
            Cell::Text(s) => Value::String(s.clone()),
        }
    }
}

/// Output of one run: a header and rows, plus warnings for stderr.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    pub warnings: Vec<String>,
}

impl Table {
    fn new(columns: &[&str]) -> Self {
        Table {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            ..Table::default()
        }
    }

    pub fn to_csv(&self) -> Result<String, CliError> {
        let mut writer = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        let io = |e: csv::Error| CliError::Io(std::io::Error::other(e));
        writer.write_record(&self.columns).map_err(io)?;
        for row in &self.rows {
            writer.write_record(row.iter().map(Cell::to_csv)).map_err(io)?;
        }
        let bytes = writer.into_inner().map_err(|e| CliError::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    pub fn to_json(&self, config: &RunConfig) -> String {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let obj: Map<String, Value> = self
                    .columns
                    .iter()
                    .cloned()
                    .zip(row.iter().map(Cell::to_json))
                    .collect();
                Value::Object(obj)
            })
            .collect();
        let doc = json!({ "meta": config, "rows": rows });
        let mut text = serde_json::to_string_pretty(&doc).expect("table serializes");
        text.push('\n');
        text
    }
}

/// Computes the table for a validated configuration.
pub fn execute(config: &RunConfig) -> Result<Table, Error> {
    match &config.command {
        Command::Count { g, n } => count_table(*g, *n),
        Command::Omega { levels, n } => omega_table(levels, *n),
        Command::Enumerate { g, n } => enumerate_table(*g, *n),
        Command::BeCurve(args) => be_curve(args),
        Command::BoltzmannCurve(args) => boltzmann_curve(args),
        Command::Maxent { grid, moments, tol, max_iter } => maxent_table(grid, moments, *tol, *max_iter),
        Command::QCompare { q, beta, beta_e_max, order, steps } => {
            q_compare(*q, *beta, *beta_e_max, *order, *steps)
        }
    }
}

/// Runs the command and writes its artifact to the configured destination.
/// Returns the table so callers can inspect warnings.
pub fn run(config: &RunConfig) -> Result<Table, CliError> {
    let table = execute(config)?;
    let text = match config.format {
        OutputFormat::Csv => table.to_csv()?,
        OutputFormat::Json => table.to_json(config),
    };
    match &config.output {
        Some(path) => std::fs::write(resolve_output(path), text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(table)
}

fn resolve_output(path: &Path) -> PathBuf {
    match std::env::var_os(OUTPUT_DIR_ENV) {
        Some(dir) if path.is_relative() && !dir.is_empty() => Path::new(&dir).join(path),
        _ => path.to_path_buf(),
    }
}

fn count_table(g: u32, n: u64) -> Result<Table, Error> {
    let level = counting::LevelSpec::new(g, n)?;
    let states = level.coherent_degeneracy();
    let mut table = Table::new(&["g", "G", "L", "n", "w", "w_equilibrium", "w_distinguishable"]);
    table.rows.push(vec![
        Cell::Int(u64::from(g)),
        Cell::Count(states.clone()),
        Cell::Count(level.excess()),
        Cell::Int(n),
        Cell::Count(counting::microstate_count(&states, n)?),
        Cell::Count(counting::microstate_count(&u64::from(g).into(), n)?),
        Cell::Count(counting::distinguishable_count(&states, n)?),
    ]);
    Ok(table)
}

fn omega_table(levels: &[u32], n: u64) -> Result<Table, Error> {
    let omega = counting::total_omega(levels, n)?;
    let coherent_states: BigCount = levels
        .iter()
        .map(|&g| counting::coherent_degeneracy(g))
        .sum::<Result<BigCount, Error>>()?;
    let plain_states: u64 = levels.iter().map(|&g| u64::from(g)).sum();
    let equilibrium = counting::microstate_count(&plain_states.into(), n)?;
    let label = levels.iter().map(u32::to_string).collect::<Vec<_>>().join(" ");

    let mut table = Table::new(&[
        "levels",
        "n",
        "omega",
        "omega_closed_form",
        "omega_equilibrium",
        "ln_omega",
        "ln_omega_equilibrium",
    ]);
    table.rows.push(vec![
        Cell::Text(label),
        Cell::Int(n),
        Cell::Count(omega.clone()),
        Cell::Count(counting::microstate_count(&coherent_states, n)?),
        Cell::Count(equilibrium.clone()),
        Cell::Float(omega.ln()),
        Cell::Float(equilibrium.ln()),
    ]);
    Ok(table)
}

fn enumerate_table(g: u32, n: u32) -> Result<Table, Error> {
    let maps = counting::enumerate_coherent_sequences(g, n)?;
    let subsets = counting::canonical_subsets(g);
    let mut columns = vec!["index".to_string(), "sequence".to_string()];
    columns.extend(subsets.iter().map(|s| format!("s{}", s.label().replace(',', "_"))));
    let mut table = Table {
        columns,
        ..Table::default()
    };
    for (i, map) in maps.iter().enumerate() {
        let mut row = vec![Cell::Int(i as u64), Cell::Text(map.notation())];
        row.extend(subsets.iter().map(|&s| Cell::Int(u64::from(map.count(s)))));
        table.rows.push(row);
    }
    debug_assert!(maps.iter().all(|m: &OccupationMap| m.particles() == u64::from(n)));
    Ok(table)
}

fn be_curve(args: &CurveArgs) -> Result<Table, Error> {
    let series = args.series()?;
    let mut table = Table::new(&["beta_E", "occupation_equilibrium", "occupation_modified"]);
    let mut flagged = false;
    for i in 1..=args.steps {
        let energy = args.e_max * i as f64 / args.steps as f64;
        let x = series.beta() * energy;
        if series.alphas().len() == 1 && !flagged && !distributions::first_order_is_monotone(x, series.alphas()[0]) {
            flagged = true;
            table.warnings.push(format!(
                "1 + 2 alpha_1 beta E <= 0 from beta E = {x}: corrected exponent is no longer increasing"
            ));
        }
        table.rows.push(vec![
            Cell::Float(x),
            Cell::Float(distributions::modified_bose_einstein(x)?),
            Cell::Float(distributions::modified_bose_einstein(distributions::epsilon_star(x, &series))?),
        ]);
    }
    Ok(table)
}

fn boltzmann_curve(args: &CurveArgs) -> Result<Table, Error> {
    let series = args.series()?;
    let equilibrium = ExponentSeries::equilibrium(series.beta())?;
    let energies = linspace(0.0, args.e_max, args.steps);
    let p_eq = distributions::normalize(&energies, &equilibrium)?;
    let p_mod = distributions::normalize(&energies, &series)?;
    let mut table = Table::new(&["beta_E", "weight_equilibrium", "weight_modified", "p_equilibrium", "p_modified"]);
    for (i, &e) in energies.iter().enumerate() {
        table.rows.push(vec![
            Cell::Float(series.beta() * e),
            Cell::Float(distributions::modified_boltzmann_weight(e, &equilibrium)?),
            Cell::Float(distributions::modified_boltzmann_weight(e, &series)?),
            Cell::Float(p_eq.probabilities()[i]),
            Cell::Float(p_mod.probabilities()[i]),
        ]);
    }
    Ok(table)
}

fn maxent_table(grid: &[f64], targets: &[f64], tol: f64, max_iter: usize) -> Result<Table, Error> {
    let constraints = MomentConstraints::new(grid.to_vec(), targets.to_vec())?;
    let sol = maxent::solve_multipliers(&constraints, tol, max_iter)?;
    let achieved = maxent::moments(&sol.distribution, targets.len());
    let mut table = Table::new(&["n", "beta_n", "target_moment", "achieved_moment", "residual", "iterations"]);
    for (i, beta) in sol.betas.iter().enumerate() {
        table.rows.push(vec![
            Cell::Int(i as u64 + 1),
            Cell::Float(*beta),
            Cell::Float(targets[i]),
            Cell::Float(achieved[i]),
            Cell::Float(sol.residual),
            Cell::Int(sol.iterations as u64),
        ]);
    }
    Ok(table)
}

fn q_compare(q: f64, beta: f64, beta_e_max: f64, order: u32, steps: usize) -> Result<Table, Error> {
    let p = QParams::with_unit_k(q, beta)?;
    let series = tsallis::q_exponent_series(&p, order)?;
    let mut table = Table::new(&["beta_E", "q_exponential", "series", "residual"]);
    for x in linspace(0.0, beta_e_max, steps) {
        let energy = x / beta;
        table.rows.push(vec![
            Cell::Float(x),
            Cell::Float(tsallis::q_exponential_weight(energy, &p)?),
            Cell::Float(distributions::modified_boltzmann_weight(energy, &series)?),
            Cell::Float(tsallis::series_vs_q_residual(energy, &p, order)?),
        ]);
    }
    Ok(table)
}

/// `steps` evenly spaced points from `start` to `end` inclusive.
fn linspace(start: f64, end: f64, steps: usize) -> Vec<f64> {
    if steps == 1 {
        return vec![start];
    }
    let span = end - start;
    (0..steps)
        .map(|i| start + span * i as f64 / (steps - 1) as f64)
        .collect()
}
