//! `nctorus`: run invariant suites, apply operators to stored elements and
//! sample extended toroidal symbols.

mod descriptor;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use nctorus::algebra::ElementJson;
use nctorus::psido::{spectrum_csv, spectrum_truncated};
use nctorus::symbols::Symbol;
use nctorus::toroidal::{build_kernel, extend, InterpolationKernel, ToroidalSymbol, DEFAULT_MARGIN};
use nctorus::verify::{run_suite, Suite, VerifyConfig};
use nctorus::{AlgebraElement, Error, ThetaMatrix};

#[derive(Parser)]
#[command(name = "nctorus", version, about = "Pseudodifferential calculus on noncommutative tori")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct TorusArgs {
    /// Torus dimension.
    #[arg(long, default_value_t = 2)]
    n: usize,
    /// Upper triangle of θ, row by row, comma separated. Defaults to 0.25 for
    /// n = 2 and to zero otherwise.
    #[arg(long, allow_hyphen_values = true)]
    theta: Option<String>,
}

impl TorusArgs {
    fn theta(&self) -> Result<Arc<ThetaMatrix>, Failure> {
        let upper = match &self.theta {
            Some(s) => s
                .split(',')
                .map(|x| x.trim().parse::<f64>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| Failure::Usage(format!("--theta: {e}")))?,
            None if self.n == 2 => vec![0.25],
            None => vec![0.0; self.n * self.n.saturating_sub(1) / 2],
        };
        ThetaMatrix::new(self.n, upper)
            .map(Arc::new)
            .map_err(|e| Failure::Usage(format!("--theta: {e}")))
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run an invariant suite and write its JSON report.
    Verify {
        /// algebra, symbols, toroidal, oscint, psido or all.
        suite: String,
        #[command(flatten)]
        torus: TorusArgs,
        /// Support radius of the random elements.
        #[arg(long, default_value_t = 3)]
        radius: i64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Replace every tolerance.
        #[arg(long)]
        tol: Option<f64>,
        /// Quadrature point budget.
        #[arg(long = "quad-points")]
        quad_points: Option<usize>,
        /// Report file; printed to stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Apply an operator to a stored element; writes the result and a decay
    /// CSV next to it.
    Apply {
        /// Operator descriptor JSON.
        #[arg(long)]
        op: PathBuf,
        /// Element JSON.
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Eigenvalues of an operator truncated to `|k|_∞ ≤ radius`, as CSV.
    Spectrum {
        #[arg(long)]
        op: PathBuf,
        #[command(flatten)]
        torus: TorusArgs,
        #[arg(long, default_value_t = 4)]
        radius: i64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Evaluate the kernel extension of a toroidal table at sample points.
    Extend {
        /// Toroidal table JSON.
        #[arg(long)]
        table: PathBuf,
        /// JSON array of points.
        #[arg(long)]
        points: PathBuf,
        #[command(flatten)]
        torus: TorusArgs,
        /// Saved kernel JSON; built from `--kernel-order` when absent.
        #[arg(long)]
        kernel: Option<PathBuf>,
        #[arg(long = "kernel-order", default_value_t = 32)]
        kernel_order: usize,
        /// Lattice rows kept away from the table edge.
        #[arg(long, default_value_t = DEFAULT_MARGIN)]
        margin: i64,
        #[arg(long)]
        out: PathBuf,
    },
}

enum Failure {
    /// Exit 1.
    Failed(String),
    /// Exit 2.
    Usage(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse(_) | Error::InvalidArgument(_) => Failure::Usage(e.to_string()),
            other => Failure::Failed(other.to_string()),
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure::Failed(format!("{}: {e}", path.display())))
}

/// Parses JSON, reporting the line and column of syntax errors.
fn parse_json<T: serde::de::DeserializeOwned>(path: &Path, text: &str) -> Result<T, Failure> {
    serde_json::from_str(text)
        .map_err(|e| Failure::Usage(format!("{}: line {}, column {}: {e}", path.display(), e.line(), e.column())))
}

fn with_path(path: &Path) -> impl Fn(Error) -> Failure + '_ {
    move |e| match Failure::from(e) {
        Failure::Usage(m) => Failure::Usage(format!("{}: {m}", path.display())),
        Failure::Failed(m) => Failure::Failed(format!("{}: {m}", path.display())),
    }
}

/// `result.json` → `result.decay.csv`.
fn decay_path(out: &Path) -> PathBuf {
    out.with_extension("decay.csv")
}

fn verify(
    suite: &str,
    torus: &TorusArgs,
    radius: i64,
    seed: u64,
    tol: Option<f64>,
    quad_points: Option<usize>,
    out: Option<&Path>,
) -> Result<(), Failure> {
    let suite: Suite = suite.parse().map_err(|e: Error| Failure::Usage(e.to_string()))?;
    if radius < 0 {
        return Err(Failure::Usage("--radius must be nonnegative".into()));
    }
    let cfg = VerifyConfig {
        theta: torus.theta()?,
        radius,
        seed,
        tol,
        quad_budget: quad_points,
    };
    let report = run_suite(suite, &cfg);
    for row in &report.rows {
        let status = if row.pass { "pass" } else { "FAIL" };
        let value = match (row.max_discrepancy, &row.error) {
            (Some(d), _) => format!("{d:.3e}"),
            (None, Some(e)) => format!("error: {e}"),
            (None, None) => "-".into(),
        };
        eprintln!("{status} [{}] {}: {value} (tol {:.1e})", row.suite, row.identity, row.tolerance);
    }
    let json = report.to_json();
    match out {
        Some(p) => write(p, &json)?,
        None => println!("{json}"),
    }
    if report.all_pass() {
        Ok(())
    } else {
        let failed = report.rows.iter().filter(|r| !r.pass).count();
        Err(Failure::Failed(format!("{failed} of {} checks failed", report.rows.len())))
    }
}

fn apply(op: &Path, input: &Path, out: &Path) -> Result<(), Failure> {
    let element_json: ElementJson = parse_json(input, &read(input)?)?;
    let u = AlgebraElement::from_json_value(element_json).map_err(with_path(input))?;
    let desc: descriptor::Descriptor = parse_json(op, &read(op)?)?;
    let operator = desc.resolve(u.theta()).map_err(with_path(op))?;
    let v = operator.apply(&u)?;
    write(out, &v.to_json())?;
    write(&decay_path(out), &v.decay_report().to_csv())?;
    Ok(())
}

fn spectrum(op: &Path, torus: &TorusArgs, radius: i64, out: &Path) -> Result<(), Failure> {
    let theta = torus.theta()?;
    let desc: descriptor::Descriptor = parse_json(op, &read(op)?)?;
    let operator = desc.resolve(&theta).map_err(with_path(op))?;
    let eig = spectrum_truncated(&theta, radius, &|u| operator.apply(u))?;
    write(out, &spectrum_csv(&eig))
}

#[derive(Serialize)]
struct Sample {
    xi: Vec<f64>,
    element: ElementJson,
}

#[allow(clippy::too_many_arguments)]
fn extend_cmd(
    table: &Path,
    points: &Path,
    torus: &TorusArgs,
    kernel: Option<&Path>,
    kernel_order: usize,
    margin: i64,
    out: &Path,
) -> Result<(), Failure> {
    let theta = torus.theta()?;
    let tab = ToroidalSymbol::from_json(&read(table)?, &theta).map_err(with_path(table))?;
    let pts: Vec<Vec<f64>> = parse_json(points, &read(points)?)?;
    if let Some(bad) = pts.iter().position(|p| p.len() != theta.dim()) {
        return Err(Failure::Usage(format!(
            "{}: point {bad} has {} coordinates, expected {}",
            points.display(),
            pts[bad].len(),
            theta.dim()
        )));
    }
    let kernel = match kernel {
        Some(p) => InterpolationKernel::from_json(&read(p)?).map_err(with_path(p))?,
        None => build_kernel(kernel_order)?,
    };
    let ext = extend(tab, Arc::new(kernel)).with_margin(margin);
    let offenders: Vec<String> = pts
        .iter()
        .enumerate()
        .filter(|(_, p)| !ext.in_window(p))
        .map(|(i, p)| format!("  #{i}: {p:?}"))
        .collect();
    if !offenders.is_empty() {
        return Err(Failure::Failed(format!(
            "{} sample points lie outside the trusted window |ξ|_∞ ≤ {}:\n{}",
            offenders.len(),
            ext.trusted_extent(),
            offenders.join("\n")
        )));
    }
    let samples = pts
        .into_iter()
        .map(|xi| {
            let element = ext.eval(&xi)?.to_json_value();
            Ok(Sample { xi, element })
        })
        .collect::<Result<Vec<_>, Error>>()?;
    write(out, &serde_json::to_string(&samples).expect("samples serialize"))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Verify {
            suite,
            torus,
            radius,
            seed,
            tol,
            quad_points,
            out,
        } => verify(suite, torus, *radius, *seed, *tol, *quad_points, out.as_deref()),
        Command::Apply { op, input, out } => apply(op, input, out),
        Command::Spectrum { op, torus, radius, out } => spectrum(op, torus, *radius, out),
        Command::Extend {
            table,
            points,
            torus,
            kernel,
            kernel_order,
            margin,
            out,
        } => extend_cmd(table, points, torus, kernel.as_deref(), *kernel_order, *margin, out),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Failed(m)) => {
            eprintln!("nctorus: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(m)) => {
            eprintln!("nctorus: {m}");
            ExitCode::from(2)
        }
    }
}
