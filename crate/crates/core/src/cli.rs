//! Command-line front end.
//!
//! Every command resolves to a [`RunConfig`] and then to a short sequence of
//! library calls in [`run`]. A `--config FILE` of `key = value` lines is
//! expanded into flags placed before the explicit ones, so flags given on the
//! command line win.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use crate::bench::{
    run_bootstrap, run_simulation, run_timing, BootstrapPlan, IbossDesign, RunSummary, SimulationPlan, TimingPlan,
    REFERENCE_NOTE,
};
use crate::datagen::{generate, CovariateCase, ScenarioConfig};
use crate::error::{Result, SubdataError};
use crate::io::{read_csv, write_dataset_csv, write_results, write_selection, write_timing_table, ColumnSpec};
use crate::selectors::SelectorSpec;

/// A comma-separated flag value. Unlike a repeated flag, a later occurrence
/// replaces an earlier one.
#[derive(Clone, Debug, PartialEq)]
pub struct CommaList<T>(pub Vec<T>);

impl<T: FromStr> FromStr for CommaList<T>
where
    T::Err: std::fmt::Display,
{
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        s.split(',')
            .map(|v| v.trim().parse::<T>().map_err(|e| format!("{v:?}: {e}")))
            .collect::<std::result::Result<_, _>>()
            .map(CommaList)
    }
}

#[derive(Debug, Parser)]
#[command(name = "subdata", version, about = "Informative subdata selection for linear regression")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Select rows of a CSV dataset
    #[command(args_override_self = true)]
    Select(SelectArgs),
    /// Repeated simulation with MSE aggregation
    #[command(args_override_self = true)]
    Simulate(SimulateArgs),
    /// Selection wall-clock times over a grid of n
    #[command(args_override_self = true)]
    Timing(TimingArgs),
    /// Bootstrap evaluation on a CSV dataset
    #[command(args_override_self = true)]
    Bootstrap(BootstrapArgs),
    /// Write a generated scenario to CSV
    #[command(args_override_self = true)]
    GenData(GenDataArgs),
}

#[derive(Debug, Args)]
pub struct ColumnArgs {
    /// Response column header
    #[arg(long)]
    pub response: Option<String>,
    /// Comma-separated covariate headers; default is every other column
    #[arg(long)]
    pub covariates: Option<CommaList<String>>,
    /// Use the natural log of the response
    #[arg(long)]
    pub log_response: bool,
}

#[derive(Debug, Args)]
pub struct SelectArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub output: PathBuf,
    #[arg(long)]
    pub method: String,
    #[arg(long)]
    pub k: usize,
    /// LEVSS condition-number threshold; omit for no stopping criterion
    #[arg(long)]
    pub threshold: Option<String>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub columns: ColumnArgs,
}

#[derive(Debug, Args)]
pub struct SelectorListArgs {
    /// Comma-separated methods out of levss, iboss, oss, uniform
    #[arg(long)]
    pub method: Option<CommaList<String>>,
    /// Comma-separated LEVSS thresholds; `none` adds the variant without one
    #[arg(long)]
    pub threshold: Option<CommaList<String>>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub output: PathBuf,
    #[arg(long, default_value = "mvnormal")]
    pub case: String,
    #[arg(long, default_value_t = 10_000)]
    pub n: usize,
    #[arg(long, default_value_t = 10)]
    pub p: usize,
    #[arg(long, default_value_t = 200)]
    pub k: usize,
    #[arg(long, default_value_t = 100)]
    pub reps: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 9.0)]
    pub sigma2: f64,
    /// True intercept
    #[arg(long, default_value_t = 1.0)]
    pub beta0: f64,
    /// Common value of all true slopes
    #[arg(long, default_value_t = 1.0)]
    pub beta: f64,
    /// Add all pairwise products to the model
    #[arg(long)]
    pub interaction: bool,
    /// Covariates IBOSS selects on in the interaction model
    #[arg(long, default_value = "main")]
    pub iboss_design: String,
    #[command(flatten)]
    pub selectors: SelectorListArgs,
}

#[derive(Debug, Args)]
pub struct TimingArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub output: PathBuf,
    /// Comma-separated full-data sizes
    #[arg(long, default_value = "5000,50000,500000")]
    pub n: CommaList<usize>,
    #[arg(long, default_value_t = 50)]
    pub p: usize,
    #[arg(long, default_value_t = 1000)]
    pub k: usize,
    #[arg(long, default_value = "mvnormal")]
    pub case: String,
    #[arg(long, default_value_t = 5)]
    pub reps: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub selectors: SelectorListArgs,
}

#[derive(Debug, Args)]
pub struct BootstrapArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub output: PathBuf,
    /// Subdata sizes as multiples of p
    #[arg(long)]
    pub k_multiples: Option<CommaList<usize>>,
    /// Explicit subdata sizes
    #[arg(long)]
    pub k: Option<CommaList<usize>>,
    #[arg(long, default_value_t = 100)]
    pub boot: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub columns: ColumnArgs,
    #[command(flatten)]
    pub selectors: SelectorListArgs,
}

#[derive(Debug, Args)]
pub struct GenDataArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub output: PathBuf,
    #[arg(long, default_value = "mvnormal")]
    pub case: String,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub p: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 9.0)]
    pub sigma2: f64,
    #[arg(long, default_value_t = 1.0)]
    pub beta0: f64,
    #[arg(long, default_value_t = 1.0)]
    pub beta: f64,
    #[arg(long)]
    pub interaction: bool,
}

/// The k grid of a bootstrap run; multiples need the column count of the
/// data, which is only known after reading it.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum KGrid {
    Multiples(Vec<usize>),
    Explicit(Vec<usize>),
}

impl KGrid {
    pub fn resolve(&self, p: usize) -> Vec<usize> {
        match self {
            KGrid::Multiples(m) => m.iter().map(|m| m * p).collect(),
            KGrid::Explicit(k) => k.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum RunConfig {
    Select {
        input: PathBuf,
        output: PathBuf,
        columns: ColumnSpec,
        selector: SelectorSpec,
        k: usize,
        seed: u64,
    },
    Simulate {
        plan: SimulationPlan,
        output: PathBuf,
    },
    Timing {
        plan: TimingPlan,
        output: PathBuf,
    },
    Bootstrap {
        input: PathBuf,
        output: PathBuf,
        columns: ColumnSpec,
        k_grid: KGrid,
        n_boot: usize,
        selectors: Vec<SelectorSpec>,
        seed: u64,
    },
    GenData {
        scenario: ScenarioConfig,
        output: PathBuf,
    },
}

fn usage(msg: impl Into<String>) -> SubdataError {
    SubdataError::Usage(msg.into())
}

fn parse_case(s: &str) -> Result<CovariateCase> {
    CovariateCase::from_str(s).map_err(|_| usage(format!("--case: unknown value {s:?}; expected uniform01, mvnormal or truncated-mvnormal")))
}

fn parse_threshold(s: &str) -> Result<Option<f64>> {
    let s = s.trim();
    if s.eq_ignore_ascii_case("none") {
        return Ok(None);
    }
    match s.parse::<f64>() {
        Ok(t) if t >= 1.0 => Ok(Some(t)),
        _ => Err(usage(format!("--threshold: expected a number >= 1 or `none`, got {s:?}"))),
    }
}

fn single_method(name: &str, threshold: Option<f64>) -> Result<SelectorSpec> {
    match name.trim() {
        "levss" => Ok(SelectorSpec::Levss { threshold }),
        other => {
            if threshold.is_some() {
                return Err(usage(format!("--threshold only applies to levss, not {other}")));
            }
            match other {
                "iboss" => Ok(SelectorSpec::Iboss),
                "oss" => Ok(SelectorSpec::Oss),
                "uniform" => Ok(SelectorSpec::Uniform),
                _ => Err(usage(format!("--method: unknown method {other:?}; expected levss, iboss, oss or uniform"))),
            }
        }
    }
}

impl SelectorListArgs {
    /// Each listed threshold adds one LEVSS variant, in the order given.
    fn resolve(&self, default_methods: &[&str], default_thresholds: &[&str]) -> Result<Vec<SelectorSpec>> {
        let methods: Vec<String> = match &self.method {
            Some(m) => m.0.clone(),
            None => default_methods.iter().map(|s| s.to_string()).collect(),
        };
        let explicit_thresholds = self.threshold.is_some();
        let thresholds: Vec<Option<f64>> = match &self.threshold {
            Some(t) => t.0.iter().map(|s| parse_threshold(s)).collect::<Result<_>>()?,
            None => default_thresholds.iter().map(|s| parse_threshold(s)).collect::<Result<_>>()?,
        };
        if explicit_thresholds && !methods.iter().any(|m| m.trim() == "levss") {
            return Err(usage("--threshold given but levss is not among the methods"));
        }
        let mut out = Vec::new();
        for m in &methods {
            if m.trim() == "levss" {
                out.extend(thresholds.iter().map(|&threshold| SelectorSpec::Levss { threshold }));
            } else {
                out.push(single_method(m, None)?);
            }
        }
        if out.is_empty() {
            return Err(usage("--method: no methods given"));
        }
        Ok(out)
    }
}

impl ColumnArgs {
    fn spec(&self) -> ColumnSpec {
        ColumnSpec {
            covariates: self.covariates.as_ref().map(|c| c.0.clone()),
            response: self.response.clone(),
            log_response: self.log_response,
        }
    }
}

fn scenario(case: &str, n: usize, p: usize, k: usize, seed: u64, sigma2: f64, beta0: f64, beta: f64, interaction: bool) -> Result<ScenarioConfig> {
    let mut s = ScenarioConfig::with_unit_coefficients(parse_case(case)?, n, p, k, interaction, seed);
    s.sigma2 = sigma2;
    s.beta0 = beta0;
    s.beta_slopes.iter_mut().for_each(|b| *b = beta);
    Ok(s)
}

impl Cli {
    /// Checks everything that can be checked before touching data.
    pub fn into_run_config(self) -> Result<RunConfig> {
        match self.command {
            Command::Select(a) => {
                let threshold = a.threshold.as_deref().map(parse_threshold).transpose()?.flatten();
                let selector = single_method(&a.method, threshold)?;
                Ok(RunConfig::Select {
                    input: a.input,
                    output: a.output,
                    columns: a.columns.spec(),
                    selector,
                    k: a.k,
                    seed: a.seed,
                })
            }
            Command::Simulate(a) => {
                let s = scenario(&a.case, a.n, a.p, a.k, a.seed, a.sigma2, a.beta0, a.beta, a.interaction)?;
                s.validate().map_err(|e| usage(e.to_string()))?;
                let iboss_design = match a.iboss_design.as_str() {
                    "main" => IbossDesign::Main,
                    "expanded" => IbossDesign::Expanded,
                    other => return Err(usage(format!("--iboss-design: expected main or expanded, got {other:?}"))),
                };
                if a.reps == 0 {
                    return Err(usage("--reps must be at least 1"));
                }
                let selectors = a.selectors.resolve(&["levss", "iboss", "oss", "uniform"], &["none"])?;
                let mut plan = SimulationPlan::new(s, selectors, a.reps);
                plan.iboss_design = iboss_design;
                Ok(RunConfig::Simulate { plan, output: a.output })
            }
            Command::Timing(a) => {
                if a.reps < 5 {
                    return Err(usage("--reps must be at least 5 for timing"));
                }
                let plan = TimingPlan {
                    ns: a.n.0,
                    p: a.p,
                    k: a.k,
                    case: parse_case(&a.case)?,
                    selectors: a.selectors.resolve(&["levss", "iboss", "oss"], &["none"])?,
                    reps: a.reps,
                    seed: a.seed,
                };
                Ok(RunConfig::Timing { plan, output: a.output })
            }
            Command::Bootstrap(a) => {
                let k_grid = match (a.k_multiples, a.k) {
                    (Some(_), Some(_)) => return Err(usage("--k and --k-multiples are mutually exclusive")),
                    (Some(m), None) => KGrid::Multiples(m.0),
                    (None, Some(k)) => KGrid::Explicit(k.0),
                    (None, None) => KGrid::Multiples(vec![5, 10, 20, 30]),
                };
                if a.columns.response.is_none() {
                    return Err(usage("--response is required for bootstrap"));
                }
                if a.boot == 0 {
                    return Err(usage("--boot must be at least 1"));
                }
                Ok(RunConfig::Bootstrap {
                    input: a.input,
                    output: a.output,
                    columns: a.columns.spec(),
                    k_grid,
                    n_boot: a.boot,
                    selectors: a.selectors.resolve(&["levss", "iboss", "oss"], &["25", "20", "15", "none"])?,
                    seed: a.seed,
                })
            }
            Command::GenData(a) => {
                let s = scenario(&a.case, a.n, a.p, a.p + 1, a.seed, a.sigma2, a.beta0, a.beta, a.interaction)?;
                if a.n == 0 || a.p == 0 {
                    return Err(usage("--n and --p must be at least 1"));
                }
                if !(a.sigma2 > 0.0) {
                    return Err(usage("--sigma2 must be positive"));
                }
                Ok(RunConfig::GenData { scenario: s, output: a.output })
            }
        }
    }
}

/// `key = value` lines as flag tokens. `true` and `false` toggle switches.
pub fn config_tokens(text: &str) -> Result<Vec<String>> {
    let mut out = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| usage(format!("config line {}: expected `key = value`, got {raw:?}", lineno + 1)))?;
        let key = key.trim().replace('_', "-");
        let value = value.trim().trim_matches('"');
        if key.is_empty() || key == "config" {
            return Err(usage(format!("config line {}: invalid key {key:?}", lineno + 1)));
        }
        match value {
            "true" => out.push(format!("--{key}")),
            "false" => {}
            v => {
                out.push(format!("--{key}"));
                out.push(v.to_string());
            }
        }
    }
    Ok(out)
}

/// Splices the contents of any `--config FILE` in right after the
/// subcommand name.
pub fn expand_config(argv: Vec<String>) -> Result<Vec<String>> {
    let mut config = None;
    for (i, a) in argv.iter().enumerate() {
        if a == "--config" {
            config = argv.get(i + 1).cloned();
        } else if let Some(v) = a.strip_prefix("--config=") {
            config = Some(v.to_string());
        }
    }
    let Some(path) = config else {
        return Ok(argv);
    };
    if argv.len() < 2 {
        return Ok(argv);
    }
    let text = std::fs::read_to_string(&path).map_err(|e| SubdataError::io(&path, e))?;
    let tokens = config_tokens(&text)?;
    let mut out = argv[..2].to_vec();
    out.extend(tokens);
    out.extend_from_slice(&argv[2..]);
    Ok(out)
}

/// `argv` includes the program name.
pub fn parse_cli<I, S>(argv: I) -> Result<RunConfig>
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let argv = expand_config(argv.into_iter().map(Into::into).collect())?;
    let cli = Cli::try_parse_from(argv).map_err(|e| usage(e.render().to_string()))?;
    cli.into_run_config()
}

/// What a completed run produced.
#[derive(Clone, Debug, PartialEq)]
pub struct RunReport {
    pub written: Vec<PathBuf>,
    pub records: usize,
    pub failures: usize,
}

fn to_json<T: Serialize>(v: &T) -> serde_json::Value {
    serde_json::to_value(v).unwrap_or(serde_json::Value::Null)
}

fn columns_json(c: &ColumnSpec) -> serde_json::Value {
    json!({
        "covariates": c.covariates,
        "response": c.response,
        "log_response": c.log_response,
        "log_base": "e",
    })
}

fn path_str(p: &Path) -> String {
    p.display().to_string()
}

pub fn run(cfg: &RunConfig) -> Result<RunReport> {
    match cfg {
        RunConfig::Select {
            input,
            output,
            columns,
            selector,
            k,
            seed,
        } => {
            let data = read_csv(input, columns)?;
            let result = selector.select(&data, *k, *seed)?;
            let echo = json!({
                "input": path_str(input),
                "columns": columns_json(columns),
                "selector": to_json(selector),
                "k": k,
                "seed": seed,
            });
            let paths = write_selection(&result, &selector.label(), &echo, output)?;
            Ok(RunReport {
                written: vec![paths.records, paths.summary],
                records: result.len(),
                failures: 0,
            })
        }
        RunConfig::Simulate { plan, output } => {
            let out = run_simulation(plan)?;
            let summary = RunSummary::build("simulate", to_json(plan), &out);
            let paths = write_results(&out, &summary, output)?;
            Ok(RunReport {
                written: vec![paths.records, paths.timings, paths.summary],
                records: out.records.len(),
                failures: out.failures.len(),
            })
        }
        RunConfig::Timing { plan, output } => {
            let rows = run_timing(plan)?;
            write_timing_table(&rows, output)?;
            Ok(RunReport {
                written: vec![output.clone()],
                records: rows.len(),
                failures: 0,
            })
        }
        RunConfig::Bootstrap {
            input,
            output,
            columns,
            k_grid,
            n_boot,
            selectors,
            seed,
        } => {
            let data = read_csv(input, columns)?;
            let plan = BootstrapPlan {
                n_boot: *n_boot,
                k_values: k_grid.resolve(data.ncols()),
                selectors: selectors.clone(),
                seed: *seed,
                resample: true,
            };
            let out = run_bootstrap(&data, &plan)?;
            let echo = json!({
                "input": path_str(input),
                "columns": columns_json(columns),
                "k_grid": to_json(k_grid),
                "plan": to_json(&plan),
            });
            let mut summary = RunSummary::build("bootstrap", echo, &out);
            summary.notes.push(REFERENCE_NOTE.to_string());
            let paths = write_results(&out, &summary, output)?;
            Ok(RunReport {
                written: vec![paths.records, paths.timings, paths.summary],
                records: out.records.len(),
                failures: out.failures.len(),
            })
        }
        RunConfig::GenData { scenario, output } => {
            let data = generate(scenario)?;
            write_dataset_csv(output, &data)?;
            Ok(RunReport {
                written: vec![output.clone()],
                records: data.nrows(),
                failures: 0,
            })
        }
    }
}
