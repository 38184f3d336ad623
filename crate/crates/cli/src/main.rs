use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use thiserror::Error;

use lcentropy::applications::{
    alpha_star, capacity_bounds, epi_constants, reverse_epi_check, ApplicationError,
    DEFAULT_RESOLUTION,
};
use lcentropy::io::{load_density_spec, DensitySpec, SpecError};
use lcentropy::rearrangement::{Rearrange, RearrangementError};
use lcentropy::series::families::{certify_all, certify_family, Family, FamilyCertificate};
use lcentropy::two_piece::{
    identity_check, minimize_gap, seed_from_env, sweep, sweep_samples, Region, TwoPieceError,
};
use lcentropy::{Density, DensityStats, LogConcavity, ScalarStats};

/// Tolerance for the theorem sweep and identity checks.
const SWEEP_TOLERANCE: f64 = 1e-9;

#[derive(Parser)]
#[command(name = "lcentropy", version, about = "Entropy and variance of log-concave densities")]
struct Cli {
    #[command(flatten)]
    output: OutputArgs,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct OutputArgs {
    /// Emit JSON (the default for every report except `constants`).
    #[arg(long, global = true, conflicts_with = "csv")]
    json: bool,

    /// Emit CSV.
    #[arg(long, global = true)]
    csv: bool,

    /// Write the output to a file instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,

    /// Rescale input densities to unit mass.
    #[arg(long, global = true)]
    normalize: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Mass, moments, entropy and the entropy–variance gap of a density.
    Stats { density: String },
    /// Decreasing rearrangement of a density, with statistics before and after.
    Rearrange { density: String },
    /// Sweep the two-piece family and check the identity behind the bound.
    VerifyTheorem {
        /// Grid counts along a, x and y.
        #[arg(long, value_name = "A,X,Y", value_parser = parse_grid, default_value = "60,60,60")]
        grid: [usize; 3],
        /// Evaluation budget for the local minimizer.
        #[arg(long, value_name = "N", default_value_t = 2000)]
        refine: usize,
        /// Random points for the identity check.
        #[arg(long, default_value_t = 1000)]
        identity_points: usize,
        #[arg(long, value_name = "N")]
        threads: Option<usize>,
    },
    /// Exact certification of the coefficient families.
    Certify {
        /// P0..P4 or `all`.
        #[arg(long, default_value = "all")]
        family: String,
        /// Write the full certificate (with every witness) here.
        #[arg(long, value_name = "PATH")]
        report: Option<PathBuf>,
        #[arg(long, value_name = "N")]
        threads: Option<usize>,
    },
    /// Rényi entropy power constants C-(α), C+(α).
    Constants {
        #[arg(long, value_delimiter = ',', required = true)]
        alpha: Vec<f64>,
    },
    /// Capacity bounds for additive noise with the given density.
    Capacity {
        noise: String,
        #[arg(long)]
        power: f64,
    },
    /// Both sides of the entropy power inequality for X + Y.
    Epi {
        first: String,
        second: String,
        #[arg(long, default_value_t = DEFAULT_RESOLUTION)]
        resolution: usize,
    },
    /// The order α* where ln α/(α-1) = ½ ln 6.
    AlphaStar,
}

fn parse_grid(s: &str) -> Result<[usize; 3], String> {
    let parts: Vec<usize> = s
        .split(',')
        .map(|p| p.trim().parse::<usize>().map_err(|e| format!("'{p}': {e}")))
        .collect::<Result<_, _>>()?;
    match parts.as_slice() {
        [a, x, y] if *a > 0 && *x > 0 && *y > 0 => Ok([*a, *x, *y]),
        _ => Err("expected three positive counts A,X,Y".into()),
    }
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("cannot write {path}: {source}")]
    Write { path: String, source: std::io::Error },
}

macro_rules! input_error {
    ($($t:ty),*) => {
        $(impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                CliError::Input(e.to_string())
            }
        })*
    };
}

input_error!(
    SpecError,
    RearrangementError,
    TwoPieceError,
    ApplicationError,
    lcentropy::DensityError,
    lcentropy::series::SeriesError,
    csv::Error,
    rayon::ThreadPoolBuildError
);

/// A rendered report and whether the checks it describes passed.
struct Report {
    body: String,
    passed: bool,
}

#[derive(Clone, Copy, PartialEq)]
enum Format {
    Json,
    Csv,
}

fn json(value: &impl Serialize) -> String {
    serde_json::to_string_pretty(value).expect("reports always serialize") + "\n"
}

fn csv_rows<T: Serialize>(rows: &[T]) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Input(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn render<T: Serialize>(format: Format, value: &T, rows: impl FnOnce() -> Vec<T>) -> Result<String, CliError> {
    match format {
        Format::Json => Ok(json(value)),
        Format::Csv => csv_rows(&rows()),
    }
}

fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T, CliError> {
    match threads {
        None => Ok(f()),
        Some(n) => Ok(rayon::ThreadPoolBuilder::new().num_threads(n).build()?.install(f)),
    }
}

#[derive(Serialize)]
struct StatsReport {
    #[serde(flatten)]
    stats: ScalarStats,
    h: f64,
    var: f64,
    gap: f64,
    log_concavity: LogConcavity,
}

fn stats_report(d: &Density) -> Result<StatsReport, CliError> {
    let stats = d.stats()?;
    Ok(StatsReport {
        h: stats.shannon_entropy,
        var: stats.variance,
        gap: d.entropy_variance_gap()?,
        log_concavity: d.log_concavity(),
        stats,
    })
}

#[derive(Serialize)]
struct RearrangeReport {
    rearranged: DensitySpec,
    before: StatsReport,
    after: StatsReport,
}

#[derive(Serialize)]
struct TheoremReport {
    grid: [usize; 3],
    points: usize,
    min_gap: f64,
    argmin: [f64; 3],
    #[serde(rename = "min_G")]
    min_g: f64,
    #[serde(rename = "argmin_G")]
    argmin_g: [f64; 3],
    #[serde(rename = "L_range")]
    l_range: (f64, f64),
    refined_gap: f64,
    refined_argmin: [f64; 3],
    identity_points: usize,
    identity_seed: u64,
    identity_max_err: f64,
    identity_min_margin: f64,
    passed: bool,
}

#[derive(Serialize)]
struct CertifySummary {
    family: Family,
    status: lcentropy::series::CertificateStatus,
    tail_start: u64,
    checkpoints_passed: bool,
}

#[derive(Serialize)]
struct ConstantsRow {
    alpha: f64,
    c_minus: f64,
    c_plus: f64,
    ratio: f64,
}

fn run(cli: &Cli) -> Result<Report, CliError> {
    let load = |arg: &str| load_density_spec(arg, cli.output.normalize);
    let format = if cli.output.csv { Format::Csv } else { Format::Json };
    match &cli.command {
        Command::Stats { density } => {
            let report = stats_report(&load(density)?)?;
            let body = match format {
                Format::Json => json(&report),
                Format::Csv => csv_rows(&[report.stats])?,
            };
            Ok(Report { body, passed: true })
        }
        Command::Rearrange { density } => {
            let d = load(density)?;
            let r = d.decreasing_rearrangement()?;
            let report = RearrangeReport {
                rearranged: DensitySpec::from(&r),
                before: stats_report(&d)?,
                after: stats_report(&r)?,
            };
            let body = match format {
                Format::Json => json(&report),
                Format::Csv => csv_rows(&[report.before.stats, report.after.stats])?,
            };
            Ok(Report { body, passed: true })
        }
        Command::VerifyTheorem { grid, refine, identity_points, threads } => {
            let region = Region::standard();
            if format == Format::Csv {
                let samples = with_threads(*threads, || sweep_samples(&region, *grid))??;
                return Ok(Report { body: csv_rows(&samples)?, passed: true });
            }
            let seed = seed_from_env();
            let (s, refined, identity) = with_threads(*threads, || {
                Ok::<_, TwoPieceError>((
                    sweep(&region, *grid)?,
                    minimize_gap(&region, *refine)?,
                    identity_check(*identity_points, seed)?,
                ))
            })??;
            let triple = |p: &lcentropy::two_piece::TwoPieceParams| [p.a(), p.x(), p.y()];
            let passed = s.min_gap >= -SWEEP_TOLERANCE
                && s.min_g >= -SWEEP_TOLERANCE
                && identity.max_rel_err <= SWEEP_TOLERANCE
                && identity.min_rel_margin >= -1e-12;
            let report = TheoremReport {
                grid: *grid,
                points: s.points,
                min_gap: s.min_gap,
                argmin: triple(&s.argmin),
                min_g: s.min_g,
                argmin_g: triple(&s.argmin_g),
                l_range: s.l_range,
                refined_gap: refined.gap,
                refined_argmin: triple(&refined.params),
                identity_points: identity.points,
                identity_seed: seed,
                identity_max_err: identity.max_rel_err,
                identity_min_margin: identity.min_rel_margin,
                passed,
            };
            Ok(Report { body: json(&report), passed })
        }
        Command::Certify { family, report, threads } => {
            let certs: Vec<FamilyCertificate> = if family.eq_ignore_ascii_case("all") {
                with_threads(*threads, certify_all)?
            } else {
                let f: Family = family.parse()?;
                vec![with_threads(*threads, || certify_family(f))?]
            };
            if let Some(path) = report {
                write_file(path, &json(&certs))?;
            }
            let summary: Vec<CertifySummary> = certs
                .iter()
                .map(|c| CertifySummary {
                    family: c.family,
                    status: c.status,
                    tail_start: c.tail_start,
                    checkpoints_passed: c.checkpoints_pass(),
                })
                .collect();
            let passed = certs.iter().all(|c| c.is_proven() && c.checkpoints_pass());
            let body = match format {
                Format::Json => json(&summary),
                Format::Csv => csv_rows(&summary)?,
            };
            Ok(Report { body, passed })
        }
        Command::Constants { alpha } => {
            let rows = alpha
                .iter()
                .map(|a| {
                    let c = epi_constants(*a)?;
                    Ok(ConstantsRow { alpha: c.alpha, c_minus: c.c_minus, c_plus: c.c_plus, ratio: c.ratio })
                })
                .collect::<Result<Vec<_>, CliError>>()?;
            // CSV unless JSON is asked for explicitly.
            let body = if cli.output.json { json(&rows) } else { csv_rows(&rows)? };
            Ok(Report { body, passed: true })
        }
        Command::Capacity { noise, power } => {
            let b = capacity_bounds(&load(noise)?, *power)?;
            let passed = !b.log_concave || b.within_log_concave_bound;
            Ok(Report { body: render(format, &b, || vec![b])?, passed })
        }
        Command::Epi { first, second, resolution } => {
            let check = reverse_epi_check(&load(first)?, &load(second)?, *resolution)?;
            let passed = check.shannon_stam_holds && (!check.log_concave_inputs || check.reverse_holds);
            Ok(Report { body: render(format, &check, || vec![check])?, passed })
        }
        Command::AlphaStar => {
            #[derive(Serialize)]
            struct AlphaStar {
                alpha_star: f64,
            }
            let a = AlphaStar { alpha_star: alpha_star() };
            Ok(Report { body: render(format, &a, || vec![AlphaStar { alpha_star: a.alpha_star }])?, passed: true })
        }
    }
}

fn write_file(path: &PathBuf, body: &str) -> Result<(), CliError> {
    fs::write(path, body).map_err(|source| CliError::Write { path: path.display().to_string(), source })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        // help and version exit 0, usage errors 2
        Err(e) => e.exit(),
    };
    let report = match run(&cli) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let written = match &cli.output.out {
        Some(path) => write_file(path, &report.body),
        None => std::io::stdout()
            .write_all(report.body.as_bytes())
            .map_err(|source| CliError::Write { path: "stdout".into(), source }),
    };
    if let Err(e) = written {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    if report.passed {
        ExitCode::SUCCESS
    } else {
        eprintln!("verification failed");
        ExitCode::from(1)
    }
}
