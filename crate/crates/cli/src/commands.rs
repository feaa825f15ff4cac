//! Command implementations. Each takes plain typed options and returns a
//! [`ReportDocument`]; the binary layer only parses flags, prints, and maps
//! errors to exit codes.

use std::path::Path;

use serde_json::{json, Value};

use psibound::apps::{
    covariance_deviation_bound, geometric_mean_covariance, log_linear_fit, portfolio_bound,
    psi_median, regression_deviation_bound, DesignMatrix, SpdMatrix,
};
use psibound::bounds::{
    hoeffding_constant, published_improvement_claims, recommend_coordinate, TailBoundReport,
};
use psibound::montecarlo::{default_t_grid, sample, verify_bound, DistributionSpec, Statistic};
use psibound::optimize::{
    concentration_functional, select_optimal_transform, Estimator, TransformGrid,
};
use psibound::transport::psi_wasserstein;
use psibound::{CoordinateTransform, EmpiricalMeasure, SupportInterval};

use crate::csvio::{header_names, read_column};
use crate::report::ReportDocument;
use crate::CliError;

/// Parse a transform flag: identity | log | logit | arctan | boxcox:<lambda>.
pub fn parse_transform(s: &str) -> Result<CoordinateTransform, String> {
    let s = s.trim().to_ascii_lowercase();
    match s.as_str() {
        "identity" | "id" => Ok(CoordinateTransform::Identity),
        "log" => Ok(CoordinateTransform::Log),
        "logit" => Ok(CoordinateTransform::Logit),
        "arctan" => Ok(CoordinateTransform::Arctan),
        other => {
            if let Some(rest) = other.strip_prefix("boxcox:").or_else(|| other.strip_prefix("boxcox=")) {
                let lambda: f64 = rest
                    .parse()
                    .map_err(|_| format!("bad Box-Cox lambda '{rest}'"))?;
                CoordinateTransform::box_cox(lambda).map_err(|e| e.to_string())
            } else {
                Err(format!(
                    "unknown transform '{other}' (expected identity, log, logit, arctan, or boxcox:<lambda>)"
                ))
            }
        }
    }
}

fn parse_statistic(s: &str) -> Result<Statistic, CliError> {
    match s.to_ascii_lowercase().as_str() {
        "sum" => Ok(Statistic::Sum),
        "product" => Ok(Statistic::Product),
        "max" => Ok(Statistic::Max),
        other => Err(CliError::Usage(format!("unknown statistic '{other}'"))),
    }
}

// ---------------------------------------------------------------- analyze

pub struct AnalyzeOpts<'a> {
    pub input: &'a Path,
    pub column: &'a str,
    /// "mgf" (default) or "range"
    pub estimator: &'a str,
    pub seed: u64,
}

/// Pick the best concentration coordinates for one CSV column.
pub fn cmd_analyze(opts: &AnalyzeOpts) -> Result<ReportDocument, CliError> {
    let estimator = match opts.estimator.to_ascii_lowercase().as_str() {
        "mgf" => Estimator::MgfGrid,
        "range" => Estimator::RangeBased,
        other => return Err(CliError::Usage(format!("unknown estimator '{other}'"))),
    };
    let values = read_column(opts.input, opts.column)?;
    if values.len() < 10 {
        return Err(psibound::Error::InsufficientData { needed: 10, got: values.len() }.into());
    }
    let measure = EmpiricalMeasure::from_samples(values)?;
    let domain = SupportInterval::new(measure.min(), measure.max())?;
    let grid = TransformGrid::default_for(domain);
    let selection = select_optimal_transform(
        std::slice::from_ref(&measure),
        &grid,
        estimator,
    )?;

    let mut doc = ReportDocument::new("analyze", opts.seed);
    doc.input("input", opts.input.display());
    doc.input("column", opts.column);
    doc.input("estimator", opts.estimator);
    doc.input("n", measure.len());
    doc.result_str("best_transform", selection.best.name());
    if let CoordinateTransform::BoxCox(l) = selection.best {
        doc.result_num("lambda_hat", l);
    }
    doc.result_num("normalized_value", selection.value);
    doc.result_num(
        "functional_range_based",
        concentration_functional(&measure, &selection.best, Estimator::RangeBased)?,
    );
    doc.result_num(
        "functional_mgf_grid",
        concentration_functional(&measure, &selection.best, Estimator::MgfGrid)?,
    );
    let table: Vec<Value> = selection
        .table
        .iter()
        .map(|(t, v)| json!({ "transform": t.name(), "value": v }))
        .collect();
    doc.result_value("candidates", Value::Array(table));

    if domain.a > 0.0 && domain.a < domain.b {
        let rec = recommend_coordinate(&domain)?;
        doc.result_str("recommended_coordinate", rec.choice.name());
        doc.result_num("identity_vs_log_ratio", rec.ratio);
        doc.result_num("support_ratio", rec.r);
        doc.result_num("log_threshold_ratio", rec.threshold_r);
    } else if domain.a <= 0.0 {
        doc.warn("support includes non-positive values; identity/log ratio not defined");
    } else {
        doc.warn("constant column; identity/log ratio not defined");
    }
    Ok(doc)
}

// ------------------------------------------------------------------ bound

pub struct BoundOpts<'a> {
    pub transform: CoordinateTransform,
    pub a: f64,
    pub b: f64,
    pub n_vars: usize,
    pub statistic: &'a str,
    /// explicit deviations; empty means the default grid
    pub t_grid: Vec<f64>,
    pub seed: u64,
}

/// Closed-form bound calculator for a declared support interval.
pub fn cmd_bound(opts: &BoundOpts) -> Result<ReportDocument, CliError> {
    let statistic = parse_statistic(opts.statistic)?;
    let iv = SupportInterval::new(opts.a, opts.b)?;
    let hc = hoeffding_constant(&opts.transform, &iv)?;
    let n = opts.n_vars.max(1);

    let report = match statistic {
        Statistic::Sum => TailBoundReport::new(
            "sum",
            n as f64 * hc,
            2.0,
            opts.transform.clone(),
            vec![
                format!("n = {n} independent variables"),
                format!("each psi(X_i) in [psi({}), psi({})]", iv.a, iv.b),
                "P(|sum psi(X_i) - mean| >= t) <= 2 exp(-2 t^2 / (n (psi(b)-psi(a))^2))".into(),
            ],
        )?,
        Statistic::Product => {
            let lr = iv.ratio()?.ln();
            TailBoundReport::new(
                "product",
                n as f64 * lr * lr / 4.0,
                2.0,
                CoordinateTransform::Log,
                vec![
                    format!("n = {n} independent positive variables in [{}, {}]", iv.a, iv.b),
                    "P(|log prod X_i - mean| >= t) <= 2 exp(-2 t^2 / (n log^2(b/a)))".into(),
                ],
            )?
        }
        Statistic::Max => {
            let sigma_sq = match opts.transform {
                CoordinateTransform::Log => {
                    let lr = iv.ratio()?.ln();
                    lr * lr / (4.0 * n as f64)
                }
                _ => iv.width() * iv.width() / (4.0 * n as f64),
            };
            TailBoundReport::new(
                "max",
                sigma_sq,
                1.0,
                opts.transform.clone(),
                vec![
                    format!("n = {n} i.i.d. variables, centered at the median"),
                    "P(max >= med + t) <= exp(-2 n t^2 / range^2)".into(),
                ],
            )?
        }
    };

    let t_grid = if opts.t_grid.is_empty() {
        default_t_grid(report.sigma_sq)
    } else {
        opts.t_grid.clone()
    };

    let mut doc = ReportDocument::new("bound", opts.seed);
    doc.input("transform", opts.transform.name());
    doc.input("a", opts.a);
    doc.input("b", opts.b);
    doc.input("n_vars", n);
    doc.input("statistic", statistic.name());
    doc.result_num("hoeffding_constant", hc);
    doc.result_num("sigma_sq", report.sigma_sq);
    doc.result_num("prefactor", report.prefactor);
    doc.result_str("assumptions", report.assumptions.join("; "));
    let rows: Vec<Value> = t_grid
        .iter()
        .map(|&t| json!({ "t": t, "bound": report.bound_at(t) }))
        .collect();
    doc.result_value("bounds", Value::Array(rows));
    Ok(doc)
}

// ----------------------------------------------------------------- compare

/// Identity vs logarithmic Hoeffding constants for support [a, b], with
/// flags where the published improvement-factor figures disagree with the
/// formula.
pub fn cmd_compare(a: f64, b: f64, seed: u64) -> Result<ReportDocument, CliError> {
    let iv = SupportInterval::new(a, b)?;
    let rec = recommend_coordinate(&iv)?;
    let rho = psibound::bounds::improvement_factor(&iv)?;

    let mut doc = ReportDocument::new("compare", seed);
    doc.input("a", a);
    doc.input("b", b);
    doc.result_num("support_ratio", rec.r);
    doc.result_num("identity_constant", rec.identity_constant);
    doc.result_num("log_constant", rec.log_constant);
    doc.result_num("improvement_factor", rho);
    doc.result_num("normalized_ratio", rec.ratio);
    doc.result_str("recommended_coordinate", rec.choice.name());
    doc.result_num("log_threshold_ratio", rec.threshold_r);
    doc.result_str("formula", "rho(a, b) = (b - a)^2 / log(b/a)^2");

    for (r_star, claimed) in published_improvement_claims() {
        if (rec.r - r_star).abs() <= 1e-3 * r_star {
            let formula_at_one = (r_star - 1.0) * (r_star - 1.0) / (r_star.ln() * r_star.ln());
            doc.warn(format!(
                "improvement factor at r = {r_star:.4}: published value \u{2248} {claimed}; \
                 the formula with a = 1 gives {formula_at_one:.1}"
            ));
        }
    }
    Ok(doc)
}

// ---------------------------------------------------------------- simulate

pub struct SimulateOpts<'a> {
    pub spec: DistributionSpec,
    pub n_vars: usize,
    pub statistic: &'a str,
    pub transform: CoordinateTransform,
    /// explicit deviations; empty means the default grid
    pub t_grid: Vec<f64>,
    pub n_reps: usize,
    pub seed: u64,
}

/// Monte Carlo domination check; the returned bool is the PASS flag.
pub fn cmd_simulate(opts: &SimulateOpts) -> Result<(ReportDocument, bool), CliError> {
    let statistic = parse_statistic(opts.statistic)?;
    let support = opts
        .spec
        .bounded_support()
        .ok_or_else(|| CliError::Usage("simulate requires a bounded-support family".into()))?;

    let t_grid = if opts.t_grid.is_empty() {
        let sigma_sq = match statistic {
            Statistic::Sum => opts.n_vars as f64 * hoeffding_constant(&opts.transform, &support)?,
            Statistic::Product => {
                let lr = support.ratio()?.ln();
                opts.n_vars as f64 * lr * lr / 4.0
            }
            Statistic::Max => match opts.transform {
                CoordinateTransform::Log => {
                    let lr = support.ratio()?.ln();
                    lr * lr / (4.0 * opts.n_vars as f64)
                }
                _ => support.width() * support.width() / (4.0 * opts.n_vars as f64),
            },
        };
        default_t_grid(sigma_sq)
    } else {
        opts.t_grid.clone()
    };

    let result = verify_bound(
        &opts.spec,
        opts.n_vars,
        statistic,
        &opts.transform,
        &t_grid,
        opts.n_reps,
        opts.seed,
    )?;

    let mut doc = ReportDocument::new("simulate", opts.seed);
    doc.input("family", opts.spec.name());
    doc.input("n_vars", opts.n_vars);
    doc.input("statistic", statistic.name());
    doc.input("transform", opts.transform.name());
    doc.input("n_reps", opts.n_reps);
    doc.result_str("statistic_label", result.statistic.clone());
    doc.result_num("center", result.center);
    doc.result_num("center_stderr", result.center_stderr);
    let rows: Vec<Value> = (0..result.t_grid.len())
        .map(|i| {
            json!({
                "t": result.t_grid[i],
                "empirical_tail": result.empirical_tail[i],
                "bound": result.bound[i],
                "stderr": result.stderr[i],
                "dominated": result.dominated[i],
            })
        })
        .collect();
    doc.result_value("rows", Value::Array(rows));
    doc.result_str("domination", if result.pass { "PASS" } else { "FAIL" });
    if !result.pass {
        doc.warn("empirical tail exceeded the bound plus 3 standard errors at some grid point");
    }
    Ok((doc, result.pass))
}

// --------------------------------------------------------------- transport

pub struct TransportOpts<'a> {
    pub file_a: &'a Path,
    pub file_b: &'a Path,
    pub column_a: Option<&'a str>,
    pub column_b: Option<&'a str>,
    pub transform: CoordinateTransform,
    pub p: f64,
    pub seed: u64,
}

fn resolve_column(path: &Path, given: Option<&str>) -> Result<String, CliError> {
    if let Some(c) = given {
        return Ok(c.to_string());
    }
    let headers = header_names(path)?;
    if headers.len() == 1 {
        Ok(headers[0].clone())
    } else {
        Err(CliError::Usage(format!(
            "{} has {} columns; pass --column-a/--column-b",
            path.display(),
            headers.len()
        )))
    }
}

/// Wasserstein distance between two CSV columns in transformed coordinates,
/// with the pushforward-identity self-check.
pub fn cmd_transport(opts: &TransportOpts) -> Result<ReportDocument, CliError> {
    let col_a = resolve_column(opts.file_a, opts.column_a)?;
    let col_b = resolve_column(opts.file_b, opts.column_b)?;
    let mu = EmpiricalMeasure::from_samples(read_column(opts.file_a, &col_a)?)?;
    let nu = EmpiricalMeasure::from_samples(read_column(opts.file_b, &col_b)?)?;

    let distance = psi_wasserstein(&mu, &nu, &opts.transform, opts.p)?;
    // same distance computed on the pushforwards in identity coordinates
    let check = psi_wasserstein(
        &mu.push(&opts.transform)?,
        &nu.push(&opts.transform)?,
        &CoordinateTransform::Identity,
        opts.p,
    )?;

    let mut doc = ReportDocument::new("transport", opts.seed);
    doc.input("file_a", opts.file_a.display());
    doc.input("file_b", opts.file_b.display());
    doc.input("column_a", &col_a);
    doc.input("column_b", &col_b);
    doc.input("transform", opts.transform.name());
    doc.input("p", opts.p);
    doc.result_num("distance", distance);
    doc.result_num("pushforward_check", check);
    doc.result_num("pushforward_gap", (distance - check).abs());
    doc.result_str(
        "formula",
        "W_p(mu, nu) = (int_0^1 |psi(Q_mu(u)) - psi(Q_nu(u))|^p du)^(1/p)",
    );
    Ok(doc)
}

// -------------------------------------------------------------------- apps

pub struct RegressOpts<'a> {
    pub input: &'a Path,
    pub response: &'a str,
    pub predictors: Vec<&'a str>,
    pub intercept: bool,
    pub t_grid: Vec<f64>,
    pub seed: u64,
}

/// Multiplicative regression: least squares of log y on the predictors.
pub fn cmd_apps_regress(opts: &RegressOpts) -> Result<ReportDocument, CliError> {
    let y = read_column(opts.input, opts.response)?;
    let n = y.len();
    let mut columns: Vec<(String, Vec<f64>)> = Vec::new();
    if opts.intercept {
        columns.push(("intercept".into(), vec![1.0; n]));
    }
    for name in &opts.predictors {
        let col = read_column(opts.input, name)?;
        if col.len() != n {
            return Err(CliError::Usage(format!(
                "column '{name}' has {} rows, response has {n}",
                col.len()
            )));
        }
        columns.push(((*name).to_string(), col));
    }
    if columns.is_empty() {
        return Err(CliError::Usage("need at least one predictor or an intercept".into()));
    }
    let labels: Vec<String> = columns.iter().map(|(l, _)| l.clone()).collect();
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|i| columns.iter().map(|(_, c)| c[i]).collect())
        .collect();
    let design = DesignMatrix::new(rows, Some(labels.clone()))?;
    let fit = log_linear_fit(&design, &y)?;

    let mut doc = ReportDocument::new("apps regress", opts.seed);
    doc.input("input", opts.input.display());
    doc.input("response", opts.response);
    doc.input("predictors", opts.predictors.join(","));
    doc.input("intercept", opts.intercept);
    doc.input("n", n);
    for (label, beta) in labels.iter().zip(&fit.beta_hat) {
        doc.result_num(format!("beta.{label}"), *beta);
    }
    doc.result_num("sigma_sq_hat", fit.sigma_sq_hat);
    doc.result_num("lambda_min", fit.lambda_min);
    doc.result_str(
        "formula",
        "P(|beta_hat - beta| >= t) <= 2p exp(-n t^2 lambda_min / (2 sigma^2))",
    );
    // exp/ln round trips leave ~1e-30 of residual noise on noiseless data;
    // below this floor the fit is an interpolation and the bound has no
    // variance to price
    if fit.sigma_sq_hat > 1e-14 {
        let p = labels.len();
        let rows: Vec<Value> = opts
            .t_grid
            .iter()
            .map(|&t| {
                regression_deviation_bound(p, n, fit.lambda_min, fit.sigma_sq_hat, t)
                    .map(|b| json!({ "t": t, "bound": b }))
            })
            .collect::<Result<_, _>>()?;
        doc.result_value("deviation_bounds", Value::Array(rows));
    } else if !opts.t_grid.is_empty() {
        doc.warn("residual variance is zero; deviation bound undefined");
    }
    Ok(doc)
}

pub struct PortfolioOpts {
    pub delta: f64,
    pub n: usize,
    pub t_grid: Vec<f64>,
    pub sigma_log_sq: Option<f64>,
    pub seed: u64,
}

/// Cumulative log-return concentration for returns within [1-delta, 1+delta].
pub fn cmd_apps_portfolio(opts: &PortfolioOpts) -> Result<ReportDocument, CliError> {
    let mut doc = ReportDocument::new("apps portfolio", opts.seed);
    doc.input("delta", opts.delta);
    doc.input("n", opts.n);
    if let Some(s) = opts.sigma_log_sq {
        doc.input("sigma_log_sq", s);
    }
    let first = portfolio_bound(opts.delta, opts.n, 0.0, opts.sigma_log_sq)?;
    doc.result_num("sigma_cap", first.sigma_cap);
    doc.result_num("sigma_used", first.sigma_used);
    doc.result_str(
        "formula",
        "P(log W_n - n E[log R] >= t sqrt(n)) <= exp(-t^2 / (2 sigma_log^2)), sigma_log^2 <= delta^2/(1-delta)^2",
    );
    let rows: Vec<Value> = opts
        .t_grid
        .iter()
        .map(|&t| {
            portfolio_bound(opts.delta, opts.n, t, opts.sigma_log_sq)
                .map(|b| json!({ "t": t, "bound": b.bound }))
        })
        .collect::<Result<_, _>>()?;
    doc.result_value("bounds", Value::Array(rows));
    Ok(doc)
}

pub struct CovGeoOpts<'a> {
    pub input: &'a Path,
    /// optional (n, a, b, t) for the deviation bound
    pub bound_params: Option<(usize, f64, f64, f64)>,
    pub seed: u64,
}

/// Geometric mean of SPD matrices read from a JSON file
/// (an array of matrices, each an array of rows).
pub fn cmd_apps_covgeo(opts: &CovGeoOpts) -> Result<ReportDocument, CliError> {
    let text = std::fs::read_to_string(opts.input)?;
    let raw: Vec<Vec<Vec<f64>>> = serde_json::from_str(&text)
        .map_err(|e| CliError::Parse { line: 1, message: format!("bad matrix JSON: {e}") })?;
    let mut mats = Vec::with_capacity(raw.len());
    for m in &raw {
        let d = m.len();
        let mut flat = Vec::with_capacity(d * d);
        for row in m {
            if row.len() != d {
                return Err(CliError::Usage("matrices must be square".into()));
            }
            flat.extend_from_slice(row);
        }
        mats.push(SpdMatrix::new(d, flat)?);
    }
    let mean = geometric_mean_covariance(&mats)?;
    let d = mean.dim();

    let mut doc = ReportDocument::new("apps covgeo", opts.seed);
    doc.input("input", opts.input.display());
    doc.input("count", mats.len());
    doc.input("dim", d);
    let rows: Vec<Value> = (0..d)
        .map(|i| Value::Array((0..d).map(|j| json!(mean.get(i, j))).collect()))
        .collect();
    doc.result_value("geometric_mean", Value::Array(rows));
    doc.result_str("formula", "exp((1/n) sum_i log Sigma_i)");
    if let Some((n, a, b, t)) = opts.bound_params {
        let bound = covariance_deviation_bound(n, d, a, b, t)?;
        doc.result_num("deviation_bound", bound);
        doc.result_str(
            "bound_formula",
            "P(||log mean - E|| >= t) <= 2 d^2 exp(-n t^2 / (2 d log^2(b/a)))",
        );
    }
    Ok(doc)
}

pub struct MedianOpts<'a> {
    pub input: &'a Path,
    pub column: &'a str,
    pub transform: CoordinateTransform,
    pub seed: u64,
}

/// Transformed median of one CSV column.
pub fn cmd_apps_median(opts: &MedianOpts) -> Result<ReportDocument, CliError> {
    let values = read_column(opts.input, opts.column)?;
    let measure = EmpiricalMeasure::from_samples(values)?;
    let med = psi_median(&measure, &opts.transform)?;
    let plain = psi_median(&measure, &CoordinateTransform::Identity)?;

    let mut doc = ReportDocument::new("apps median", opts.seed);
    doc.input("input", opts.input.display());
    doc.input("column", opts.column);
    doc.input("transform", opts.transform.name());
    doc.input("n", measure.len());
    doc.result_num("psi_median", med);
    doc.result_num("plain_median", plain);
    doc.result_str("formula", "psi^-1(median(psi(X_1), ..., psi(X_n)))");
    Ok(doc)
}

/// Seeded convenience used by tests: draw from a spec and write a CSV file.
pub fn write_sample_csv(
    path: &Path,
    column: &str,
    spec: &DistributionSpec,
    n: usize,
    seed: u64,
) -> Result<(), CliError> {
    let m = sample(spec, n, seed)?;
    let mut out = String::with_capacity(n * 12);
    out.push_str(column);
    out.push('\n');
    for x in m.points() {
        out.push_str(&format!("{x}\n"));
    }
    std::fs::write(path, out)?;
    Ok(())
}
