//! The `varest` command line: parameter derivation, theoretical MSE
//! comparison, replicated simulation, exact enumeration, and search over
//! the power-class generator constants.
//!
//! Exit codes: 0 success, 1 usage error, 2 data or numerical error,
//! 3 breakdown flag present under `--strict`.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use varest_core::estimators::default_roster;
use varest_core::montecarlo::{SimulationConfig, TheoryComparison};
use varest_core::mse::{self, CompareRow, WeightsUsed};
use varest_core::sampling::{self, DEFAULT_ENUM_CAP};
use varest_core::tuning::{self, SearchGrid};
use varest_core::{
    theta, EstimatorSpec, MseFormulaVariant, MseReport, PopulationParams,
    SpecRequest,
};

use crate::io;
use crate::parallel;
use crate::report::{Cell, NumberFormat, Table, TableFormat};
use crate::{Error, Result};

#[derive(Parser)]
#[command(
    name = "varest",
    version,
    about = "Finite-population variance estimation with auxiliary information",
    subcommand_required = true,
    arg_required_else_help = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Derive population parameters from data, or dump a parameter file
    Params(ParamsArgs),
    /// Theoretical MSE comparison table for a roster of estimators
    Compare(CompareArgs),
    /// Replicated SRSWOR simulation, joined with the first-order theory
    Simulate(SimulateArgs),
    /// Exact design MSE of estimators by exhaustive enumeration
    Enumerate(EnumerateArgs),
    /// Search the power-class generator constants for minimum MSE
    Search(SearchArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum VariantArg {
    /// Coefficient set as published
    Printed,
    /// Coefficient set from the standard series expansion
    Rederived,
}

impl From<VariantArg> for MseFormulaVariant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::Printed => MseFormulaVariant::AsPrinted,
            VariantArg::Rederived => MseFormulaVariant::Rederived,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum DataFormat {
    Json,
    Csv,
}

#[derive(Args)]
struct ParamsArgs {
    /// Population CSV with header `y,x`
    #[arg(long, value_name = "FILE.csv")]
    data: Option<PathBuf>,
    /// JSON parameter file
    #[arg(long, value_name = "FILE.json")]
    params: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = DataFormat::Json)]
    out: DataFormat,
    /// Print shortest-round-trip decimals instead of 6 significant digits
    #[arg(long)]
    full_precision: bool,
}

#[derive(Args)]
struct CompareArgs {
    /// JSON parameter file
    #[arg(long, value_name = "FILE.json")]
    params: Option<PathBuf>,
    /// Population CSV (parameters are derived from it)
    #[arg(long, value_name = "FILE.csv")]
    data: Option<PathBuf>,
    /// Sample size; defaults to the `n` of the parameter file
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, value_enum, default_value_t = VariantArg::Printed)]
    variant: VariantArg,
    /// Estimator list (space- or semicolon-separated tokens, e.g.
    /// "usual;ratio;kc:1;t:m=-1,w=1,c=2,d=1,opt"); repeatable.
    /// Defaults to the full comparison roster.
    #[arg(long, action = clap::ArgAction::Append)]
    specs: Vec<String>,
    /// Add a power-class row at these generator constants with optimal
    /// weights, e.g. --t -1,1,2,1; repeatable
    #[arg(long = "t", value_name = "m,w,c,d", action = clap::ArgAction::Append,
          allow_hyphen_values = true)]
    t_rows: Vec<String>,
    #[arg(long, value_enum, default_value_t = TableFormat::Md)]
    out: TableFormat,
    /// Exit 3 when any row carries the breakdown flag
    #[arg(long)]
    strict: bool,
    #[arg(long)]
    full_precision: bool,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long, value_name = "FILE.csv", required = true)]
    data: PathBuf,
    #[arg(long, required = true)]
    n: usize,
    /// Number of replicated samples
    #[arg(long, required = true)]
    reps: u64,
    /// Seed of the replicate streams (results are a pure function of it)
    #[arg(long, required = true)]
    seed: u64,
    /// Estimator list (space- or semicolon-separated tokens); repeatable
    #[arg(long, required = true, action = clap::ArgAction::Append)]
    specs: Vec<String>,
    /// Count replicates where an estimator is undefined instead of aborting
    #[arg(long)]
    allow_partial: bool,
    #[arg(long, value_enum, default_value_t = VariantArg::Printed)]
    variant: VariantArg,
    /// Worker threads (default: one per CPU); the results do not depend
    /// on this
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long, value_enum, default_value_t = TableFormat::Md)]
    out: TableFormat,
    #[arg(long)]
    strict: bool,
    #[arg(long)]
    full_precision: bool,
}

#[derive(Args)]
struct EnumerateArgs {
    #[arg(long, value_name = "FILE.csv", required = true)]
    data: PathBuf,
    #[arg(long, required = true)]
    n: usize,
    /// Estimator list (space- or semicolon-separated tokens); repeatable
    #[arg(long, required = true, action = clap::ArgAction::Append)]
    specs: Vec<String>,
    /// Skip-and-count samples on which an estimator is undefined
    #[arg(long)]
    allow_partial: bool,
    #[arg(long, value_enum, default_value_t = TableFormat::Md)]
    out: TableFormat,
    #[arg(long)]
    full_precision: bool,
}

#[derive(Args)]
struct SearchArgs {
    #[arg(long, value_name = "FILE.json")]
    params: Option<PathBuf>,
    #[arg(long, value_name = "FILE.csv")]
    data: Option<PathBuf>,
    /// Sample size; defaults to the `n` of the parameter file
    #[arg(long)]
    n: Option<usize>,
    /// Recover grid points whose minimum MSE is near this target instead
    /// of ranking everything
    #[arg(long, allow_hyphen_values = true)]
    target: Option<f64>,
    /// Relative tolerance for --target matching
    #[arg(long, default_value_t = 1e-3)]
    tolerance: f64,
    /// Grid for m: `lo:hi:step` or a comma list, e.g. -2:2:0.5
    #[arg(long, value_name = "RANGE", allow_hyphen_values = true)]
    m: Option<String>,
    /// Grid for w: `lo:hi:step` or a comma list
    #[arg(long, value_name = "RANGE", allow_hyphen_values = true)]
    w: Option<String>,
    /// A (c,d) pair; numbers or the tokens `b2x`/`cx`, e.g. --cd b2x,cx;
    /// repeatable
    #[arg(long, value_name = "C,D", action = clap::ArgAction::Append)]
    cd: Vec<String>,
    /// JSON grid file: {"m": [...], "w": [...], "cd": [[c, d], ...]}
    #[arg(long, value_name = "FILE.json")]
    grid: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = VariantArg::Printed)]
    variant: VariantArg,
    /// Also evaluate the w1 + w2 = 1 restricted optimum at every point
    #[arg(long)]
    constrained: bool,
    /// Show only the top K rows (0 = all)
    #[arg(long, default_value_t = 10)]
    top: usize,
    #[arg(long, value_enum, default_value_t = TableFormat::Md)]
    out: TableFormat,
    #[arg(long)]
    strict: bool,
    #[arg(long)]
    full_precision: bool,
}

/// Entry point of the binary.
pub fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            eprint!("{e}");
            return ExitCode::from(1);
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Params(args) => cmd_params(args),
        Command::Compare(args) => cmd_compare(args),
        Command::Simulate(args) => cmd_simulate(args),
        Command::Enumerate(args) => cmd_enumerate(args),
        Command::Search(args) => cmd_search(args),
    }
}

/// Loads parameters from `--params` or derives them from `--data`.
fn load_source(
    params: Option<&Path>,
    data: Option<&Path>,
) -> Result<(PopulationParams, Option<usize>)> {
    match (params, data) {
        (Some(p), None) => {
            let loaded = io::load_params(p)?;
            Ok((loaded.params, loaded.n))
        }
        (None, Some(d)) => {
            let pop = io::load_csv(d)?;
            Ok((pop.derive_params()?, None))
        }
        (Some(_), Some(_)) => Err(Error::Usage(
            "--params and --data are mutually exclusive".into(),
        )),
        (None, None) => Err(Error::Usage("one of --params or --data is required".into())),
    }
}

fn required_n(flag: Option<usize>, from_file: Option<usize>) -> Result<usize> {
    flag.or(from_file).ok_or_else(|| {
        Error::Usage("--n is required (the input carries no sample size)".into())
    })
}

fn parse_specs(raw: &[String]) -> Result<Vec<SpecRequest>> {
    let mut out = Vec::new();
    for chunk in raw {
        for token in chunk.split([';', ' ']).map(str::trim).filter(|t| !t.is_empty()) {
            out.push(
                SpecRequest::parse(token)
                    .map_err(|e| Error::Usage(format!("--specs: {e}")))?,
            );
        }
    }
    if out.is_empty() {
        return Err(Error::Usage("--specs must name at least one estimator".into()));
    }
    Ok(out)
}

fn parse_t_row(raw: &str) -> Result<SpecRequest> {
    let parts: Vec<f64> = raw
        .split(',')
        .map(|t| t.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| Error::Usage(format!("--t expects four numbers m,w,c,d, got `{raw}`")))?;
    let [m, w, c, d] = parts[..] else {
        return Err(Error::Usage(format!(
            "--t expects four numbers m,w,c,d, got `{raw}`"
        )));
    };
    if c == d {
        return Err(Error::Usage("--t: c and d must differ".into()));
    }
    Ok(SpecRequest::TClassOpt { m, w, c, d })
}

fn weights_note(weights: &WeightsUsed, fmt: NumberFormat) -> String {
    match weights {
        WeightsUsed::Regression { b } => format!("b={}", fmt.fmt(*b)),
        WeightsUsed::KcCombined { alpha1 } => format!("alpha1={}", fmt.fmt(*alpha1)),
        WeightsUsed::GuptaShabbir { d1, d2 } => {
            format!("d1={},d2={}", fmt.fmt(*d1), fmt.fmt(*d2))
        }
        WeightsUsed::TClass { w1, w2 } => format!("w1={},w2={}", fmt.fmt(*w1), fmt.fmt(*w2)),
    }
}

fn cmd_params(args: ParamsArgs) -> Result<()> {
    let (params, n) = load_source(args.params.as_deref(), args.data.as_deref())?;
    match args.out {
        DataFormat::Json => {
            let value = io::params_json(&params, n);
            println!("{}", serde_json::to_string_pretty(&value).expect("json"));
        }
        DataFormat::Csv => print!("{}", io::params_csv(&params, n, args.full_precision)),
    }
    Ok(())
}

fn cmd_compare(args: CompareArgs) -> Result<()> {
    let (params, file_n) = load_source(args.params.as_deref(), args.data.as_deref())?;
    let n = required_n(args.n, file_n)?;
    let th = theta(n, params.population_size)?;
    let variant = args.variant.into();

    let mut requests = if args.specs.is_empty() {
        default_roster()
    } else {
        parse_specs(&args.specs)?
    };
    for raw in &args.t_rows {
        requests.push(parse_t_row(raw)?);
    }

    let rows = mse::compare_table(&params, th, &requests, variant);
    // per-row failures go to the diagnostic stream; the table keeps only
    // well-formed report rows
    for row in &rows {
        if let Err(e) = &row.outcome {
            eprintln!("warning: {}: {e}", row.label);
        }
    }
    if let Some(first_err) = all_failed(rows.iter().map(|r| &r.outcome)) {
        return Err(Error::Core(first_err));
    }

    let fmt = NumberFormat {
        full_precision: args.full_precision,
    };
    let table = compare_view(&rows, args.out, fmt);
    print!("{}", table.render(args.out, fmt));

    let any_flagged = rows
        .iter()
        .any(|r| r.outcome.as_ref().map_or(true, |rep| rep.breakdown));
    if args.strict && any_flagged {
        return Err(Error::StrictBreakdown);
    }
    Ok(())
}

/// The first error, if every outcome failed (an empty iterator is fine).
fn all_failed<'a, T: 'a>(
    outcomes: impl Iterator<Item = &'a varest_core::Result<T>>,
) -> Option<varest_core::Error> {
    let mut first = None;
    for outcome in outcomes {
        match outcome {
            Ok(_) => return None,
            Err(e) => first.get_or_insert(e.clone()),
        };
    }
    first
}

fn compare_view(rows: &[CompareRow], format: TableFormat, fmt: NumberFormat) -> Table {
    // markdown is the human format and carries the resolved weights; the
    // machine formats serialize the report fields exactly
    let human = format == TableFormat::Md;
    let mut columns = vec!["estimator", "mse", "rel_eff", "variant", "breakdown"];
    if human {
        columns.push("weights");
    }
    let mut table = Table::new(columns);
    for row in rows {
        let Ok(rep) = &row.outcome else { continue };
        let mut cells = vec![
            Cell::Text(row.label.clone()),
            Cell::Num(rep.mse),
            Cell::Num(rep.relative_efficiency),
            Cell::Text(rep.variant.to_string()),
            Cell::Bool(rep.breakdown),
        ];
        if human {
            cells.push(match &rep.weights_used {
                Some(w) => Cell::Text(weights_note(w, fmt)),
                None => Cell::Empty,
            });
        }
        table.push(cells);
    }
    if rows.iter().any(|r| r.label == "reg:opt") {
        table.notes.push(
            "reg:opt is the first-order regression optimum var(usual) * (1 - rho_star^2); \
             it generally differs from the ratio-family rows even where published \
             comparison tables list them as equal."
                .into(),
        );
    }
    if rows
        .iter()
        .any(|r| r.outcome.as_ref().is_ok_and(|rep| rep.breakdown))
    {
        table.notes.push(
            "breakdown = true: the quadratic model returned a non-positive or \
             non-positive-definite minimum; the raw value is shown but is not a \
             trustworthy minimum."
                .into(),
        );
    }
    table
}

fn cmd_simulate(args: SimulateArgs) -> Result<()> {
    let pop = io::load_csv(&args.data)?;
    let params = pop.derive_params()?;
    let th = theta(args.n, pop.size())?;
    let variant: MseFormulaVariant = args.variant.into();

    let specs: Vec<EstimatorSpec> = parse_specs(&args.specs)?
        .iter()
        .map(|r| r.resolve(&params, th, variant))
        .collect::<varest_core::Result<_>>()?;
    let cfg = SimulationConfig {
        replicates: args.reps,
        n: args.n,
        seed: args.seed,
        specs,
        allow_partial: args.allow_partial,
    };
    let comparisons =
        parallel::validate_theory_parallel(&pop, &params, &cfg, variant, args.workers)?;

    let fmt = NumberFormat {
        full_precision: args.full_precision,
    };
    let table = simulate_view(&comparisons, variant);
    print!("{}", table.render(args.out, fmt));

    if args.strict && comparisons.iter().any(|c| c.theory_breakdown) {
        return Err(Error::StrictBreakdown);
    }
    Ok(())
}

fn simulate_view(comparisons: &[TheoryComparison], variant: MseFormulaVariant) -> Table {
    let mut table = Table::new(vec![
        "estimator",
        "used",
        "rejected",
        "empirical_mse",
        "bias",
        "mc_stderr",
        "theoretical_mse",
        "ratio",
        "variant",
        "breakdown",
    ]);
    let mut warned = false;
    for c in comparisons {
        warned |= c.small_sample_warning;
        table.push(vec![
            Cell::Text(c.result.spec.canonical()),
            Cell::Int(c.result.replicates_used),
            Cell::Int(c.result.rejected_samples),
            Cell::Num(c.result.empirical_mse),
            Cell::Num(c.result.empirical_bias),
            Cell::Num(c.result.mc_stderr),
            Cell::Num(c.theoretical),
            Cell::Num(c.ratio),
            Cell::Text(variant.to_string()),
            Cell::Bool(c.theory_breakdown),
        ]);
    }
    if warned {
        table.notes.push(
            "approximation regime warning: theta * max(beta2y_star, beta2x_star) > 0.5 \
             or theta > 0.1; the first-order theory is unreliable on this design and \
             the ratio column should not be read as a theory check."
                .into(),
        );
    }
    table
}

fn cmd_enumerate(args: EnumerateArgs) -> Result<()> {
    let pop = io::load_csv(&args.data)?;
    let params = pop.derive_params()?;
    let th = theta(args.n, pop.size())?;
    let cap = enum_cap_from_env()?;
    let requests = parse_specs(&args.specs)?;

    let outcomes: Vec<(String, varest_core::Result<sampling::ExactMse>)> = requests
        .iter()
        .map(|req| {
            let outcome = req
                .resolve(&params, th, MseFormulaVariant::AsPrinted)
                .and_then(|spec| {
                    sampling::exact_mse_capped(&pop, args.n, &spec, args.allow_partial, cap)
                });
            (req.canonical(), outcome)
        })
        .collect();
    for (label, outcome) in &outcomes {
        if let Err(e) = outcome {
            eprintln!("warning: {label}: {e}");
        }
    }
    if let Some(first_err) = all_failed(outcomes.iter().map(|(_, o)| o)) {
        return Err(Error::Core(first_err));
    }

    let mut table = Table::new(vec!["estimator", "exact_mse", "samples", "rejected"]);
    for (label, outcome) in &outcomes {
        let Ok(r) = outcome else { continue };
        table.push(vec![
            Cell::Text(label.clone()),
            Cell::Num(r.mse),
            Cell::Int(r.samples_used),
            Cell::Int(r.rejected),
        ]);
    }
    let fmt = NumberFormat {
        full_precision: args.full_precision,
    };
    print!("{}", table.render(args.out, fmt));
    Ok(())
}

fn enum_cap_from_env() -> Result<u64> {
    match std::env::var("VAREST_ENUM_CAP") {
        Ok(raw) => raw.trim().parse::<u64>().map_err(|_| {
            Error::Usage(format!("VAREST_ENUM_CAP must be an integer, got `{raw}`"))
        }),
        Err(_) => Ok(DEFAULT_ENUM_CAP),
    }
}

#[derive(serde::Deserialize)]
struct GridFile {
    m: Option<Vec<f64>>,
    w: Option<Vec<f64>>,
    cd: Option<Vec<(f64, f64)>>,
}

fn parse_axis(raw: &str) -> Result<Vec<f64>> {
    let bad = || Error::Usage(format!("bad range `{raw}`: use lo:hi:step or a comma list"));
    if raw.contains(':') {
        let parts: Vec<&str> = raw.split(':').collect();
        let [lo, hi, step] = parts[..] else { return Err(bad()) };
        let lo: f64 = lo.trim().parse().map_err(|_| bad())?;
        let hi: f64 = hi.trim().parse().map_err(|_| bad())?;
        let step: f64 = step.trim().parse().map_err(|_| bad())?;
        if step <= 0.0 || step.is_nan() || hi < lo {
            return Err(bad());
        }
        let mut out = Vec::new();
        let mut k = 0u32;
        loop {
            let v = lo + step * k as f64;
            if v > hi + step * 1e-9 {
                break;
            }
            out.push(v);
            k += 1;
        }
        Ok(out)
    } else {
        raw.split(',')
            .map(|t| t.trim().parse::<f64>().map_err(|_| bad()))
            .collect()
    }
}

fn parse_cd(raw: &str, params: &PopulationParams) -> Result<(f64, f64)> {
    let token = |t: &str| -> Result<f64> {
        match t.trim() {
            "b2x" | "beta2x" => Ok(params.beta2x),
            "cx" => Ok(params.cx),
            other => other.parse::<f64>().map_err(|_| {
                Error::Usage(format!(
                    "--cd token `{other}` is neither a number nor b2x/cx"
                ))
            }),
        }
    };
    let parts: Vec<&str> = raw.split(',').collect();
    let [c, d] = parts[..] else {
        return Err(Error::Usage(format!("--cd expects `C,D`, got `{raw}`")));
    };
    Ok((token(c)?, token(d)?))
}

fn cmd_search(args: SearchArgs) -> Result<()> {
    let (params, file_n) = load_source(args.params.as_deref(), args.data.as_deref())?;
    let n = required_n(args.n, file_n)?;
    let th = theta(n, params.population_size)?;
    let variant: MseFormulaVariant = args.variant.into();

    let mut grid = SearchGrid::default_for(&params);
    if let Some(path) = &args.grid {
        let text = std::fs::read_to_string(path).map_err(|e| {
            if e.kind() == std::io::ErrorKind::NotFound {
                Error::MissingFile(path.clone())
            } else {
                Error::Io {
                    path: path.clone(),
                    source: e,
                }
            }
        })?;
        let file: GridFile = serde_json::from_str(&text).map_err(|e| Error::Json {
            path: path.clone(),
            source: e,
        })?;
        if let Some(m) = file.m {
            grid.m = m;
        }
        if let Some(w) = file.w {
            grid.w = w;
        }
        if let Some(cd) = file.cd {
            grid.cd = cd;
        }
    }
    if let Some(raw) = &args.m {
        grid.m = parse_axis(raw)?;
    }
    if let Some(raw) = &args.w {
        grid.w = parse_axis(raw)?;
    }
    if !args.cd.is_empty() {
        grid.cd = args
            .cd
            .iter()
            .map(|raw| parse_cd(raw, &params))
            .collect::<Result<_>>()?;
    }

    let ranked = match args.target {
        Some(target) => tuning::recover(&params, th, target, &grid, variant, args.tolerance)?,
        None => tuning::minimize_t(&params, th, &grid, variant, args.constrained)?,
    };
    let shown: &[MseReport] = if args.top == 0 || args.top >= ranked.len() {
        &ranked
    } else {
        &ranked[..args.top]
    };

    let mut table = Table::new(vec![
        "m", "w", "c", "d", "w1", "w2", "mse", "rel_eff", "variant", "breakdown",
    ]);
    for rep in shown {
        let EstimatorSpec::TClass(t) = &rep.spec else {
            continue;
        };
        table.push(vec![
            Cell::Num(t.m),
            Cell::Num(t.w),
            Cell::Num(t.c),
            Cell::Num(t.d),
            Cell::Num(t.w1),
            Cell::Num(t.w2),
            Cell::Num(rep.mse),
            Cell::Num(rep.relative_efficiency),
            Cell::Text(rep.variant.to_string()),
            Cell::Bool(rep.breakdown),
        ]);
    }
    if args.target.is_some() {
        table.notes.push(format!(
            "{} of {} evaluated grid points match the target within the tolerance.",
            shown.len(),
            ranked.len().max(shown.len())
        ));
    }
    let fmt = NumberFormat {
        full_precision: args.full_precision,
    };
    print!("{}", table.render(args.out, fmt));

    if args.strict && shown.iter().any(|r| r.breakdown) {
        return Err(Error::StrictBreakdown);
    }
    Ok(())
}
