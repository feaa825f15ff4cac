use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use psibound::montecarlo::DistributionSpec;
use psibound::CoordinateTransform;
use psibound_cli::commands::{
    cmd_analyze, cmd_apps_covgeo, cmd_apps_median, cmd_apps_portfolio, cmd_apps_regress,
    cmd_bound, cmd_compare, cmd_simulate, cmd_transport, parse_transform, AnalyzeOpts, BoundOpts,
    CovGeoOpts, MedianOpts, PortfolioOpts, RegressOpts, SimulateOpts, TransportOpts,
};
use psibound_cli::report::{OutputFormat, ReportDocument};
use psibound_cli::{CliError, EXIT_DOMINATION_FAILURE};

/// Concentration bounds in transformed coordinates: analyze data, compute
/// and compare closed-form bounds, verify them by simulation, and run the
/// applied estimators.
#[derive(Parser)]
#[command(name = "psibound", version, about)]
struct Cli {
    /// Master seed for every stochastic step
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,

    /// Monte Carlo replications for simulate
    #[arg(long, global = true, default_value_t = 100_000)]
    reps: usize,

    /// Also write the rendered report to this file
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Output format: table or json
    #[arg(long, global = true, default_value = "table")]
    format: String,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Select the best concentration coordinates for a CSV column
    Analyze {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        column: String,
        /// Estimator: mgf or range
        #[arg(long, default_value = "mgf")]
        estimator: String,
    },
    /// Closed-form tail bounds for a declared support interval
    Bound {
        /// identity | log | logit | arctan | boxcox:<lambda>
        #[arg(long, value_parser = parse_transform)]
        transform: CoordinateTransform,
        #[arg(long)]
        a: f64,
        #[arg(long)]
        b: f64,
        #[arg(long, default_value_t = 1)]
        n_vars: usize,
        /// sum | product | max
        #[arg(long, default_value = "sum")]
        statistic: String,
        /// Deviations t (comma separated); defaults to a grid scaled by sigma
        #[arg(long, value_delimiter = ',')]
        t: Vec<f64>,
    },
    /// Identity vs logarithmic constants and the improvement factor
    Compare { a: f64, b: f64 },
    /// Monte Carlo verification of a tail bound
    Simulate {
        /// uniform | twopoint | lognormal | gamma | pareto | beta
        #[arg(long)]
        family: String,
        #[command(flatten)]
        params: FamilyParams,
        #[arg(long, default_value_t = 50)]
        n_vars: usize,
        /// sum | product | max
        #[arg(long, default_value = "sum")]
        statistic: String,
        #[arg(long, value_parser = parse_transform, default_value = "identity")]
        transform: CoordinateTransform,
        /// Deviations t (comma separated); defaults to a grid scaled by sigma
        #[arg(long, value_delimiter = ',')]
        t: Vec<f64>,
    },
    /// Wasserstein distance between two data files in transformed coordinates
    Transport {
        #[arg(long)]
        file_a: PathBuf,
        #[arg(long)]
        file_b: PathBuf,
        #[arg(long)]
        column_a: Option<String>,
        #[arg(long)]
        column_b: Option<String>,
        #[arg(long, value_parser = parse_transform, default_value = "identity")]
        transform: CoordinateTransform,
        #[arg(long, default_value_t = 2.0)]
        p: f64,
    },
    /// Applied estimators
    Apps {
        #[command(subcommand)]
        sub: AppsCommand,
    },
}

#[derive(Args)]
struct FamilyParams {
    #[arg(long)]
    a: Option<f64>,
    #[arg(long)]
    b: Option<f64>,
    /// TwoPoint: probability of the lower point
    #[arg(long)]
    w: Option<f64>,
    #[arg(long)]
    mu: Option<f64>,
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long)]
    shape: Option<f64>,
    #[arg(long)]
    scale: Option<f64>,
    /// Pareto tail index / Beta first shape
    #[arg(long)]
    alpha: Option<f64>,
    /// Beta second shape
    #[arg(long)]
    beta: Option<f64>,
}

#[derive(Subcommand)]
enum AppsCommand {
    /// Least squares of log(response) on the predictors
    Regress {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        response: String,
        /// Comma separated predictor column names
        #[arg(long, value_delimiter = ',')]
        predictors: Vec<String>,
        /// Drop the automatic intercept column
        #[arg(long)]
        no_intercept: bool,
        #[arg(long, value_delimiter = ',', default_values_t = [0.05, 0.1, 0.2])]
        t: Vec<f64>,
    },
    /// Cumulative log-return bound for returns in [1-delta, 1+delta]
    Portfolio {
        #[arg(long)]
        delta: f64,
        #[arg(long, default_value_t = 1)]
        n: usize,
        #[arg(long, value_delimiter = ',', default_values_t = [0.0, 0.5, 1.0, 2.0])]
        t: Vec<f64>,
        #[arg(long)]
        sigma_log_sq: Option<f64>,
    },
    /// Geometric mean of SPD matrices from a JSON file
    Covgeo {
        #[arg(long)]
        input: PathBuf,
        /// n, a, b, t for the deviation bound (all four together)
        #[arg(long)]
        bound_n: Option<usize>,
        #[arg(long)]
        bound_a: Option<f64>,
        #[arg(long)]
        bound_b: Option<f64>,
        #[arg(long)]
        bound_t: Option<f64>,
    },
    /// Transformed median of a CSV column
    Median {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        column: String,
        #[arg(long, value_parser = parse_transform, default_value = "log")]
        transform: CoordinateTransform,
    },
}

fn need(v: Option<f64>, flag: &str, family: &str) -> Result<f64, CliError> {
    v.ok_or_else(|| CliError::Usage(format!("family '{family}' needs --{flag}")))
}

fn build_spec(family: &str, p: &FamilyParams) -> Result<DistributionSpec, CliError> {
    let f = family.to_ascii_lowercase();
    let spec = match f.as_str() {
        "uniform" => DistributionSpec::Uniform {
            a: need(p.a, "a", &f)?,
            b: need(p.b, "b", &f)?,
        },
        "twopoint" => DistributionSpec::TwoPoint {
            a: need(p.a, "a", &f)?,
            b: need(p.b, "b", &f)?,
            w: p.w.unwrap_or(0.5),
        },
        "lognormal" => DistributionSpec::LogNormal {
            mu: p.mu.unwrap_or(0.0),
            sigma: p.sigma.unwrap_or(1.0),
        },
        "gamma" => DistributionSpec::Gamma {
            shape: need(p.shape, "shape", &f)?,
            scale: p.scale.unwrap_or(1.0),
        },
        "pareto" => DistributionSpec::ParetoTruncated {
            alpha: need(p.alpha, "alpha", &f)?,
            a: need(p.a, "a", &f)?,
            b: need(p.b, "b", &f)?,
        },
        "beta" => DistributionSpec::Beta {
            alpha: need(p.alpha, "alpha", &f)?,
            beta: need(p.beta, "beta", &f)?,
        },
        other => return Err(CliError::Usage(format!("unknown family '{other}'"))),
    };
    spec.validate()?;
    Ok(spec)
}

fn execute(cli: &Cli) -> Result<(ReportDocument, i32), CliError> {
    let seed = cli.seed;
    match &cli.command {
        Command::Analyze { input, column, estimator } => {
            let doc = cmd_analyze(&AnalyzeOpts { input, column, estimator, seed })?;
            Ok((doc, 0))
        }
        Command::Bound { transform, a, b, n_vars, statistic, t } => {
            let doc = cmd_bound(&BoundOpts {
                transform: transform.clone(),
                a: *a,
                b: *b,
                n_vars: *n_vars,
                statistic,
                t_grid: t.clone(),
                seed,
            })?;
            Ok((doc, 0))
        }
        Command::Compare { a, b } => Ok((cmd_compare(*a, *b, seed)?, 0)),
        Command::Simulate { family, params, n_vars, statistic, transform, t } => {
            let spec = build_spec(family, params)?;
            let (doc, pass) = cmd_simulate(&SimulateOpts {
                spec,
                n_vars: *n_vars,
                statistic,
                transform: transform.clone(),
                t_grid: t.clone(),
                n_reps: cli.reps,
                seed,
            })?;
            Ok((doc, if pass { 0 } else { EXIT_DOMINATION_FAILURE }))
        }
        Command::Transport { file_a, file_b, column_a, column_b, transform, p } => {
            let doc = cmd_transport(&TransportOpts {
                file_a,
                file_b,
                column_a: column_a.as_deref(),
                column_b: column_b.as_deref(),
                transform: transform.clone(),
                p: *p,
                seed,
            })?;
            Ok((doc, 0))
        }
        Command::Apps { sub } => match sub {
            AppsCommand::Regress { input, response, predictors, no_intercept, t } => {
                let doc = cmd_apps_regress(&RegressOpts {
                    input,
                    response,
                    predictors: predictors.iter().map(|s| s.as_str()).collect(),
                    intercept: !no_intercept,
                    t_grid: t.clone(),
                    seed,
                })?;
                Ok((doc, 0))
            }
            AppsCommand::Portfolio { delta, n, t, sigma_log_sq } => {
                let doc = cmd_apps_portfolio(&PortfolioOpts {
                    delta: *delta,
                    n: *n,
                    t_grid: t.clone(),
                    sigma_log_sq: *sigma_log_sq,
                    seed,
                })?;
                Ok((doc, 0))
            }
            AppsCommand::Covgeo { input, bound_n, bound_a, bound_b, bound_t } => {
                let bound_params = match (bound_n, bound_a, bound_b, bound_t) {
                    (Some(n), Some(a), Some(b), Some(t)) => Some((*n, *a, *b, *t)),
                    (None, None, None, None) => None,
                    _ => {
                        return Err(CliError::Usage(
                            "pass all of --bound-n, --bound-a, --bound-b, --bound-t or none".into(),
                        ))
                    }
                };
                let doc = cmd_apps_covgeo(&CovGeoOpts { input, bound_params, seed })?;
                Ok((doc, 0))
            }
            AppsCommand::Median { input, column, transform } => {
                let doc = cmd_apps_median(&MedianOpts {
                    input,
                    column,
                    transform: transform.clone(),
                    seed,
                })?;
                Ok((doc, 0))
            }
        },
    }
}

fn main() {
    let cli = Cli::parse();
    let format = match cli.format.to_ascii_lowercase().as_str() {
        "table" => OutputFormat::Table,
        "json" => OutputFormat::Json,
        other => {
            eprintln!("error: unknown format '{other}' (expected table or json)");
            std::process::exit(1);
        }
    };
    match execute(&cli) {
        Ok((doc, exit)) => {
            let text = doc.render(format);
            print!("{text}");
            if let Some(path) = &cli.out {
                if let Err(e) = std::fs::write(path, &text) {
                    eprintln!("error: cannot write {}: {e}", path.display());
                    std::process::exit(1);
                }
            }
            std::process::exit(exit);
        }
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(e.exit_code());
        }
    }
}
