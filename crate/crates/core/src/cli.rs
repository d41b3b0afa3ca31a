//! Command-line front end: `approx`, `compare`, `sweep` and `fde`.
//!
//! Exit codes: 0 success, 2 flag or validation errors, 3 domain errors,
//! 4 a truncation bound violated by the measured error, 5 a non-finite
//! value during evaluation or integration.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::Error;
use crate::expansion::{approximate_series, ExpansionConfig};
use crate::fde::{solve_fde, FdeProblem, DEFAULT_START_OFFSET, DEFAULT_STEPS};
use crate::function::FunctionSpec;
use crate::operator::{validate_orders, Interval, Kind, OperatorSpec, Side};
use crate::quadrature::QuadratureConfig;
use crate::reference::{closed_form, dist_metric, hadamard_derivative_quad, hadamard_integral_quad, ClosedForm};
use crate::table::{format_number, SeriesTable};

/// Slack allowed between the measured error and the bound.
pub const BOUND_SLACK: f64 = 1e-7;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(e) => match e {
                Error::Domain(_) | Error::SingularDenominator(_) => 3,
                Error::BoundViolation { .. } => 4,
                Error::NonFinite(_) => 5,
                _ => 2,
            },
            CliError::Io(_) | CliError::Csv(_) => 2,
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(name = "hadamard", version, about = "Hadamard fractional operators by integer-order expansion")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Expansion value and truncation bound on a grid.
    Approx(OperatorArgs),
    /// Expansion against a reference with the L² distance.
    Compare {
        #[command(flatten)]
        op: OperatorArgs,
        #[arg(long, value_enum)]
        reference: Option<ReferenceChoice>,
    },
    /// Distance to the reference for every (n, N) pair.
    Sweep {
        #[command(flatten)]
        op: OperatorArgs,
        #[arg(long, value_enum)]
        reference: Option<ReferenceChoice>,
        /// Comma-separated expansion depths; defaults to `--n`.
        #[arg(long = "n-list")]
        n_list: Option<String>,
        /// Comma-separated truncation orders; defaults to `--N`.
        #[arg(long = "N-list")]
        big_n_list: Option<String>,
    },
    /// Solves the logarithmic benchmark equation with the replaced operator.
    Fde(FdeArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ReferenceChoice {
    /// Closed form (α = 0.5, a = 1, left operators).
    Closed,
    /// Direct quadrature of the defining integral.
    Quad,
    /// The expansion itself; the distance is zero by construction.
    #[value(name = "self")]
    SelfCompare,
}

#[derive(Debug, Clone, Args)]
pub struct OperatorArgs {
    #[arg(long)]
    pub kind: Kind,
    #[arg(long, default_value = "left")]
    pub side: Side,
    #[arg(long, default_value_t = 0.5, allow_negative_numbers = true)]
    pub alpha: f64,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub a: f64,
    #[arg(long, default_value_t = 10.0, allow_negative_numbers = true)]
    pub b: f64,
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    #[arg(long = "N", default_value_t = 3)]
    pub big_n: usize,
    /// Builtin function: one, ln, pow4 or pow9.
    #[arg(long = "fn", conflicts_with = "table")]
    pub function: Option<String>,
    /// Two-column CSV of samples `t,x` with strictly increasing `t`.
    #[arg(long)]
    pub table: Option<PathBuf>,
    #[arg(long, default_value_t = 100)]
    pub points: usize,
    /// Quadrature panels for moments and references.
    #[arg(long, default_value_t = 64)]
    pub panels: usize,
    /// Prefix the CSV with `# key=value` metadata lines.
    #[arg(long)]
    pub meta: bool,
    /// Write the CSV here instead of standard output.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct FdeArgs {
    #[arg(long = "N", default_value_t = 2)]
    pub big_n: usize,
    #[arg(long, default_value_t = 0.5, allow_negative_numbers = true)]
    pub alpha: f64,
    #[arg(long, default_value_t = DEFAULT_STEPS)]
    pub steps: usize,
    /// Start offset: integration begins at `a(1 + delta)`.
    #[arg(long, default_value_t = DEFAULT_START_OFFSET, allow_negative_numbers = true)]
    pub delta: f64,
    #[arg(long = "t-end", default_value_t = 3.0, allow_negative_numbers = true)]
    pub t_end: f64,
    /// Append the moment states `V_2..V_N` as columns.
    #[arg(long = "dump-states")]
    pub dump_states: bool,
    #[arg(long)]
    pub meta: bool,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            let sink: &mut dyn Write = if code == 0 { out } else { err };
            let _ = sink.write_all(text.as_bytes());
            return code;
        }
    };
    match execute(&cli.command, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

pub fn execute(command: &Command, out: &mut dyn Write) -> CliResult<()> {
    match command {
        Command::Approx(op) => cmd_approx(op, out),
        Command::Compare { op, reference } => cmd_compare(op, *reference, out),
        Command::Sweep { op, reference, n_list, big_n_list } => {
            let ns = match n_list {
                Some(s) => parse_list(s, "--n-list")?,
                None => vec![op.n],
            };
            let big_ns = match big_n_list {
                Some(s) => parse_list(s, "--N-list")?,
                None => vec![op.big_n],
            };
            cmd_sweep(op, *reference, &ns, &big_ns, out)
        }
        Command::Fde(args) => cmd_fde(args, out),
    }
}

struct Setup {
    spec: OperatorSpec,
    function: FunctionSpec,
    grid: Vec<f64>,
    quad: QuadratureConfig,
}

fn setup(op: &OperatorArgs) -> CliResult<Setup> {
    let interval = Interval::new(op.a, op.b)?;
    let spec = OperatorSpec::new(op.kind, op.side, op.alpha, interval)?;
    let function = load_function(op, interval)?;
    let quad = QuadratureConfig::default().with_panels(op.panels);
    quad.validate()?;
    let grid = grid(interval, op.side, op.points)?;
    Ok(Setup { spec, function, grid, quad })
}

/// Left grids are `a + (b−a)i/m` for `i = 1..m`, right grids the same for
/// `i = 0..m−1`, so the anchor is never sampled.
pub fn grid(interval: Interval, side: Side, points: usize) -> crate::Result<Vec<f64>> {
    if points == 0 {
        return Err(Error::InvalidParameter("points must be at least 1".into()));
    }
    let width = interval.b - interval.a;
    let m = points as f64;
    Ok(match side {
        Side::Left => {
            (1..=points).map(|i| if i == points { interval.b } else { interval.a + width * i as f64 / m }).collect()
        }
        Side::Right => (0..points).map(|i| interval.a + width * i as f64 / m).collect(),
    })
}

fn load_function(op: &OperatorArgs, interval: Interval) -> CliResult<FunctionSpec> {
    match (&op.function, &op.table) {
        (Some(id), None) => match id.as_str() {
            "one" | "ln" | "pow4" | "pow9" => Ok(FunctionSpec::by_id(id)?),
            other => Err(Error::InvalidParameter(format!(
                "unknown function '{other}' (expected one, ln, pow4, pow9 or --table)"
            ))
            .into()),
        },
        (None, Some(path)) => {
            let (t, x) = read_samples(path)?;
            let (lo, hi) = (t[0], t[t.len() - 1]);
            if lo > interval.a || hi < interval.b {
                return Err(Error::Domain(format!(
                    "table covers [{lo}, {hi}] but the interval is [{}, {}]",
                    interval.a, interval.b
                ))
                .into());
            }
            Ok(FunctionSpec::from_samples("table", t, x)?)
        }
        _ => Err(Error::InvalidParameter("exactly one of --fn or --table is required".into()).into()),
    }
}

/// Reads `t,x` rows; a non-numeric first row is taken as a header and
/// lines starting with `#` are skipped.
pub fn read_samples(path: &Path) -> CliResult<(Vec<f64>, Vec<f64>)> {
    let mut reader =
        csv::ReaderBuilder::new().has_headers(false).comment(Some(b'#')).trim(csv::Trim::All).from_path(path)?;
    let (mut t, mut x) = (Vec::new(), Vec::new());
    for (row, record) in reader.records().enumerate() {
        let record = record?;
        if record.len() != 2 {
            return Err(Error::Input(format!("table row {} has {} fields, expected 2", row + 1, record.len())).into());
        }
        let parsed = (record[0].parse::<f64>(), record[1].parse::<f64>());
        match parsed {
            (Ok(tv), Ok(xv)) if tv.is_finite() && xv.is_finite() => {
                t.push(tv);
                x.push(xv);
            }
            _ if row == 0 => continue,
            _ => return Err(Error::Input(format!("table row {} is not a pair of finite numbers", row + 1)).into()),
        }
    }
    if t.len() < 4 {
        return Err(Error::Input(format!("table needs at least 4 samples, got {}", t.len())).into());
    }
    Ok((t, x))
}

fn parse_list(text: &str, flag: &str) -> CliResult<Vec<usize>> {
    let values = text
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<usize>().map_err(|_| Error::InvalidParameter(format!("{flag}: '{s}' is not a count"))))
        .collect::<crate::Result<Vec<_>>>()?;
    if values.is_empty() {
        return Err(Error::InvalidParameter(format!("{flag} is an empty sweep list")).into());
    }
    Ok(values)
}

fn emit(text: &str, output: Option<&Path>, out: &mut dyn Write) -> CliResult<()> {
    match output {
        Some(path) => fs::write(path, text)?,
        None => out.write_all(text.as_bytes())?,
    }
    Ok(())
}

fn ensure_finite(t: &[f64], values: &[f64]) -> crate::Result<()> {
    match values.iter().position(|v| !v.is_finite()) {
        Some(i) => Err(Error::NonFinite(t[i])),
        None => Ok(()),
    }
}

fn expansion_series(s: &Setup, n: usize, big_n: usize) -> CliResult<SeriesTable> {
    validate_orders(s.spec.kind, n, big_n)?;
    let cfg = ExpansionConfig { quad: s.quad, ..ExpansionConfig::new(n, big_n) };
    let table = approximate_series(&s.function, &s.spec, &cfg, &s.grid)?;
    for name in ["approx", "bound"] {
        ensure_finite(table.t(), table.column(name).expect("expansion columns"))?;
    }
    Ok(table)
}

pub fn cmd_approx(op: &OperatorArgs, out: &mut dyn Write) -> CliResult<()> {
    validate_orders(op.kind, op.n, op.big_n)?;
    let s = setup(op)?;
    let table = expansion_series(&s, op.n, op.big_n)?;
    emit(&table.to_csv(op.meta), op.output.as_deref(), out)
}

/// Reference values on the grid and the label of their source.
fn reference_values(s: &Setup, choice: Option<ReferenceChoice>) -> CliResult<(Vec<f64>, &'static str)> {
    let spec = &s.spec;
    let closed = ClosedForm::lookup(spec.kind, spec.side, spec.alpha, spec.interval, &s.function);
    let use_closed = match (choice, closed) {
        (Some(ReferenceChoice::Closed), None) => {
            return Err(Error::InvalidParameter(format!(
                "no closed form for {} {} of '{}' with alpha = {} on [{}, {}]",
                spec.side,
                spec.kind,
                s.function.id(),
                spec.alpha,
                spec.interval.a,
                spec.interval.b
            ))
            .into())
        }
        (Some(ReferenceChoice::Closed), Some(id)) | (None, Some(id)) => Some(id),
        _ => None,
    };
    let values = match use_closed {
        Some(id) => (s.grid.iter().map(|&t| closed_form(id, t)).collect::<crate::Result<Vec<_>>>()?, "closed"),
        None => {
            let f = match spec.kind {
                Kind::Integral => hadamard_integral_quad,
                Kind::Derivative => hadamard_derivative_quad,
            };
            let v = s
                .grid
                .iter()
                .map(|&t| f(&s.function, spec.alpha, spec.side, spec.interval, t, &s.quad))
                .collect::<crate::Result<Vec<_>>>()?;
            (v, "quad")
        }
    };
    ensure_finite(&s.grid, &values.0)?;
    Ok(values)
}

fn dist_of(s: &Setup, exact: &[f64], approx: &[f64]) -> CliResult<f64> {
    if s.grid.len() < 2 {
        return Err(Error::InvalidParameter("dist needs at least 2 points".into()).into());
    }
    Ok(dist_metric(&s.grid, exact, approx)?)
}

pub fn cmd_compare(op: &OperatorArgs, choice: Option<ReferenceChoice>, out: &mut dyn Write) -> CliResult<()> {
    validate_orders(op.kind, op.n, op.big_n)?;
    let s = setup(op)?;
    let expansion = expansion_series(&s, op.n, op.big_n)?;
    let approx = expansion.column("approx").expect("expansion columns").to_vec();
    let bound = expansion.column("bound").expect("expansion columns").to_vec();
    let (exact, source) = match choice {
        Some(ReferenceChoice::SelfCompare) => (approx.clone(), "self"),
        _ => reference_values(&s, choice)?,
    };
    let abs_err: Vec<f64> = exact.iter().zip(&approx).map(|(e, a)| (e - a).abs()).collect();
    let dist = dist_of(&s, &exact, &approx)?;

    let mut table = SeriesTable::new(s.grid.clone())?;
    table.push_column("exact", exact)?;
    table.push_column("approx", approx)?;
    table.push_column("abs_err", abs_err.clone())?;
    table.push_column("bound", bound.clone())?;
    for (k, v) in expansion.metadata() {
        table.set_meta(k, v.clone());
    }
    table.set_meta("reference", source.to_string());
    emit(&table.to_csv(op.meta), op.output.as_deref(), out)?;
    writeln!(out, "dist={}", format_number(dist))?;

    let violation = s.grid.iter().zip(abs_err.iter().zip(&bound)).find(|(_, (e, b))| **e > **b + BOUND_SLACK);
    if let Some((&t, (&error, &bound))) = violation {
        return Err(Error::BoundViolation { t, error, bound }.into());
    }
    Ok(())
}

pub fn cmd_sweep(
    op: &OperatorArgs,
    choice: Option<ReferenceChoice>,
    ns: &[usize],
    big_ns: &[usize],
    out: &mut dyn Write,
) -> CliResult<()> {
    if ns.is_empty() || big_ns.is_empty() {
        return Err(Error::InvalidParameter("empty sweep list".into()).into());
    }
    for &n in ns {
        for &big_n in big_ns {
            validate_orders(op.kind, n, big_n)?;
        }
    }
    let s = setup(op)?;
    let reference = match choice {
        Some(ReferenceChoice::SelfCompare) => None,
        _ => Some(reference_values(&s, choice)?.0),
    };
    let mut writer = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    writer.write_record(["n", "N", "dist"])?;
    for &n in ns {
        for &big_n in big_ns {
            let approx = expansion_series(&s, n, big_n)?.column("approx").expect("expansion columns").to_vec();
            let exact = reference.as_deref().unwrap_or(&approx);
            let dist = dist_of(&s, exact, &approx)?;
            writer.write_record([n.to_string(), big_n.to_string(), format_number(dist)])?;
        }
    }
    let bytes = writer.into_inner().map_err(|e| CliError::Io(e.into_error()))?;
    let mut text = String::new();
    if op.meta {
        text.push_str(&format!(
            "# kind={}\n# side={}\n# alpha={}\n# a={}\n# b={}\n# function={}\n",
            op.kind,
            op.side,
            op.alpha,
            op.a,
            op.b,
            s.function.id()
        ));
    }
    text.push_str(std::str::from_utf8(&bytes).expect("csv output is utf-8"));
    emit(&text, op.output.as_deref(), out)
}

pub fn cmd_fde(args: &FdeArgs, out: &mut dyn Write) -> CliResult<()> {
    let problem = FdeProblem::log_benchmark(args.alpha, args.big_n, args.t_end)?;
    let states = solve_fde(&problem, args.steps, args.delta)?;
    let t: Vec<f64> = states.iter().map(|s| s.t).collect();
    let numeric: Vec<f64> = states.iter().map(|s| s.x).collect();
    let exact: Vec<f64> = t.iter().map(|t| t.ln()).collect();
    let abs_err: Vec<f64> = numeric.iter().zip(&exact).map(|(n, e)| (n - e).abs()).collect();
    let dist = dist_metric(&t, &numeric, &exact)?;

    let mut table = SeriesTable::new(t)?;
    table.push_column("x_numeric", numeric)?;
    table.push_column("x_exact", exact)?;
    table.push_column("abs_err", abs_err)?;
    if args.dump_states {
        for p in 2..=args.big_n {
            table.push_column(&format!("V_{p}"), states.iter().map(|s| s.moment(p)).collect())?;
        }
    }
    table.set_meta("alpha", args.alpha.to_string());
    table.set_meta("N", args.big_n.to_string());
    table.set_meta("steps", args.steps.to_string());
    table.set_meta("delta", args.delta.to_string());
    table.set_meta("t_end", args.t_end.to_string());
    emit(&table.to_csv(args.meta), args.output.as_deref(), out)?;
    writeln!(out, "dist={}", format_number(dist))?;
    Ok(())
}
