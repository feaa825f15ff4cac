//! Applied estimators built on log coordinates: multiplicative regression,
//! portfolio log-return bounds, geometric-mean covariance, and the
//! transformed median.

use crate::diffeo::CoordinateTransform;
use crate::error::{Error, Result};
use crate::linalg::{cholesky_solve, SpdLog};
use crate::measure::EmpiricalMeasure;

pub use crate::linalg::SpdMatrix;

/// An n x p design with labeled columns, n >= p >= 1.
#[derive(Debug, Clone)]
pub struct DesignMatrix {
    n: usize,
    p: usize,
    data: Vec<f64>, // row major
    labels: Vec<String>,
}

impl DesignMatrix {
    pub fn new(rows: Vec<Vec<f64>>, labels: Option<Vec<String>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::EmptySample);
        }
        let p = rows[0].len();
        if p == 0 || n < p {
            return Err(Error::InvalidArgument(format!(
                "design must satisfy n >= p >= 1, got n = {n}, p = {p}"
            )));
        }
        let mut data = Vec::with_capacity(n * p);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != p {
                return Err(Error::DimensionMismatch(format!(
                    "row {i} has {} entries, expected {p}",
                    row.len()
                )));
            }
            if row.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidArgument(format!("row {i} contains a non-finite value")));
            }
            data.extend_from_slice(row);
        }
        let labels = match labels {
            Some(l) => {
                if l.len() != p {
                    return Err(Error::DimensionMismatch(format!(
                        "{} labels for {p} columns",
                        l.len()
                    )));
                }
                l
            }
            None => (0..p).map(|j| format!("x{j}")).collect(),
        };
        Ok(Self { n, p, data, labels })
    }

    pub fn n_rows(&self) -> usize {
        self.n
    }

    pub fn n_cols(&self) -> usize {
        self.p
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.p + j]
    }
}

/// Fitted multiplicative (log-linear) regression.
#[derive(Debug, Clone)]
pub struct LogLinearFit {
    pub beta_hat: Vec<f64>,
    /// unbiased residual variance of the log residuals (divisor n - p)
    pub sigma_sq_hat: f64,
    /// smallest eigenvalue of (1/n) X^T X
    pub lambda_min: f64,
}

/// Least squares of log y on X: solves X^T X beta = X^T log y by Cholesky.
///
/// Errors with `NonPositiveResponse` on the first y_i <= 0 and with
/// `RankDeficient` when the smallest eigenvalue of (1/n) X^T X is at or
/// below 1e-10.
pub fn log_linear_fit(x: &DesignMatrix, y: &[f64]) -> Result<LogLinearFit> {
    let (n, p) = (x.n, x.p);
    if y.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "{} responses for {n} rows",
            y.len()
        )));
    }
    for (i, &v) in y.iter().enumerate() {
        if !(v > 0.0) || !v.is_finite() {
            return Err(Error::NonPositiveResponse { index: i, value: v });
        }
    }
    let log_y: Vec<f64> = y.iter().map(|v| v.ln()).collect();

    // normal equations
    let mut gram = vec![0.0; p * p];
    let mut rhs = vec![0.0; p];
    for i in 0..n {
        for j in 0..p {
            let xij = x.get(i, j);
            rhs[j] += xij * log_y[i];
            for k in j..p {
                gram[j * p + k] += xij * x.get(i, k);
            }
        }
    }
    for j in 0..p {
        for k in 0..j {
            gram[j * p + k] = gram[k * p + j];
        }
    }

    let scaled: Vec<f64> = gram.iter().map(|g| g / n as f64).collect();
    let lambda_min = SpdMatrix::new(p, scaled)?.min_eigenvalue()?;
    if lambda_min <= 1e-10 {
        return Err(Error::RankDeficient(lambda_min));
    }

    let beta_hat = cholesky_solve(p, &gram, &rhs)?;

    let mut rss = 0.0;
    for i in 0..n {
        let fitted: f64 = (0..p).map(|j| x.get(i, j) * beta_hat[j]).sum();
        let r = log_y[i] - fitted;
        rss += r * r;
    }
    let sigma_sq_hat = if n > p { rss / (n - p) as f64 } else { 0.0 };

    Ok(LogLinearFit { beta_hat, sigma_sq_hat, lambda_min })
}

/// Deviation bound for the log-linear estimator:
/// min(1, 2p exp(-n t^2 lambda_min / (2 sigma^2))).
pub fn regression_deviation_bound(
    p: usize,
    n: usize,
    lambda_min: f64,
    sigma_sq: f64,
    t: f64,
) -> Result<f64> {
    if p == 0 || n == 0 || !(lambda_min > 0.0) || !(sigma_sq > 0.0) || !(t >= 0.0) {
        return Err(Error::InvalidArgument(
            "need p, n >= 1, lambda_min > 0, sigma_sq > 0, t >= 0".into(),
        ));
    }
    let v = 2.0 * p as f64 * (-(n as f64) * t * t * lambda_min / (2.0 * sigma_sq)).exp();
    Ok(v.min(1.0))
}

/// Portfolio log-return bound.
#[derive(Debug, Clone, Copy)]
pub struct PortfolioBound {
    /// min(1, exp(-t^2 / (2 sigma_used)))
    pub bound: f64,
    /// worst-case log-return variance delta^2/(1-delta)^2
    pub sigma_cap: f64,
    /// the variance actually used (supplied value or the cap)
    pub sigma_used: f64,
}

/// Concentration of the cumulative log return of n returns in
/// [1 - delta, 1 + delta], at sqrt(n)-normalized deviation t.
///
/// A supplied log-return variance must not exceed the cap (within 1e-12).
pub fn portfolio_bound(
    delta: f64,
    n: usize,
    t: f64,
    sigma_log_sq: Option<f64>,
) -> Result<PortfolioBound> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidArgument(format!("delta must be in (0,1), got {delta}")));
    }
    if n == 0 || !(t >= 0.0) {
        return Err(Error::InvalidArgument("need n >= 1 and t >= 0".into()));
    }
    let sigma_cap = delta * delta / ((1.0 - delta) * (1.0 - delta));
    let sigma_used = match sigma_log_sq {
        Some(s) => {
            if !(s > 0.0) {
                return Err(Error::InvalidArgument(format!("sigma_log_sq must be > 0, got {s}")));
            }
            if s > sigma_cap + 1e-12 {
                return Err(Error::InvalidArgument(format!(
                    "sigma_log_sq = {s} exceeds the cap {sigma_cap}"
                )));
            }
            s
        }
        None => sigma_cap,
    };
    let bound = (-t * t / (2.0 * sigma_used)).exp().min(1.0);
    Ok(PortfolioBound { bound, sigma_cap, sigma_used })
}

/// exp of the average matrix logarithm of SPD matrices (their geometric
/// mean). Dimension is capped at 64; all matrices must share it.
pub fn geometric_mean_covariance(mats: &[SpdMatrix]) -> Result<SpdMatrix> {
    if mats.is_empty() {
        return Err(Error::EmptySample);
    }
    let d = mats[0].dim();
    if d > 64 {
        return Err(Error::InvalidArgument(format!("dimension {d} exceeds the supported 64")));
    }
    let mut avg = SpdLog::zeros(d);
    let weight = 1.0 / mats.len() as f64;
    for (i, m) in mats.iter().enumerate() {
        if m.dim() != d {
            return Err(Error::DimensionMismatch(format!(
                "matrix {i} is {}x{} but the first is {d}x{d}",
                m.dim(),
                m.dim()
            )));
        }
        avg.add_scaled(&m.log()?, weight);
    }
    avg.exp()
}

/// Tail bound for the geometric-mean covariance in log-Frobenius distance:
/// min(1, 2 d^2 exp(-n t^2 / (2 d log^2(b/a)))).
pub fn covariance_deviation_bound(n: usize, d: usize, a: f64, b: f64, t: f64) -> Result<f64> {
    if n == 0 || d == 0 {
        return Err(Error::InvalidArgument("need n, d >= 1".into()));
    }
    if !(a > 0.0 && a < b) || !b.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "eigenvalue range requires 0 < a < b, got [{a}, {b}]"
        )));
    }
    if !(t >= 0.0) {
        return Err(Error::InvalidArgument(format!("deviation t must be >= 0, got {t}")));
    }
    let lr = (b / a).ln();
    let d_f = d as f64;
    let v = 2.0 * d_f * d_f * (-(n as f64) * t * t / (2.0 * d_f * lr * lr)).exp();
    Ok(v.min(1.0))
}

/// psi^-1 of the weighted median of psi(X_1), ..., psi(X_n).
///
/// Monotone equivariance makes this the plain sample median whenever one
/// point carries the median mass: that point is returned exactly, with no
/// round trip through psi. When the cumulative weight hits one half exactly
/// (even-size uniform samples), the two middle transformed values are
/// averaged in psi-space and mapped back.
pub fn psi_median(samples: &EmpiricalMeasure, t: &CoordinateTransform) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::EmptySample);
    }
    // validate the whole sample is inside the domain
    for &x in samples.points() {
        if !t.contains(x) {
            return Err(Error::Domain(format!("{} is not defined at x = {x}", t.name())));
        }
    }
    let n = samples.len();
    // indices in psi-ascending order
    let order: Vec<usize> = if t.is_increasing() {
        (0..n).collect()
    } else {
        (0..n).rev().collect()
    };
    let mut cum = 0.0;
    for (pos, &idx) in order.iter().enumerate() {
        cum += samples.weights()[idx];
        if cum >= 0.5 - 1e-12 {
            if cum > 0.5 + 1e-12 || pos + 1 == n {
                return Ok(samples.points()[idx]);
            }
            // exactly half the mass below: midpoint in psi coordinates
            let lo = t.forward(samples.points()[idx])?;
            let hi = t.forward(samples.points()[order[pos + 1]])?;
            return t.inverse(0.5 * (lo + hi));
        }
    }
    Ok(samples.points()[*order.last().unwrap()])
}
