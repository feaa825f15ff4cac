//! Seeded samplers for the distribution catalog, empirical tail estimation
//! against the closed-form bounds, and the transported-isoperimetry
//! enlargement check.
//!
//! Everything here is deterministic given its `(spec, seed)` arguments:
//! sampling is inverse-CDF on ChaCha12 substreams, and parallel replications
//! use one substream per replication index, so any worker count produces
//! bit-identical results.

use rayon::prelude::*;

use crate::bounds::{master_tail_bound, max_tail_bound, product_tail_bound, MaxBoundMode};
use crate::diffeo::{gaussianize, CoordinateTransform, SupportInterval};
use crate::error::{Error, Result};
use crate::measure::EmpiricalMeasure;
use crate::rng::{stream_rng, unit_open};
use crate::special::{invert_monotone_cdf, normal_cdf, normal_quantile, reg_gamma_lower, reg_inc_beta};

/// A parametric sampler with declared support.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DistributionSpec {
    Uniform { a: f64, b: f64 },
    /// P(X = a) = w, P(X = b) = 1 - w
    TwoPoint { a: f64, b: f64, w: f64 },
    LogNormal { mu: f64, sigma: f64 },
    Gamma { shape: f64, scale: f64 },
    /// Pareto with tail index alpha, truncated to [a, b]
    ParetoTruncated { alpha: f64, a: f64, b: f64 },
    Beta { alpha: f64, beta: f64 },
}

use DistributionSpec::*;

impl DistributionSpec {
    /// Validate parameter ranges.
    pub fn validate(&self) -> Result<()> {
        let ok = match self {
            Uniform { a, b } => a.is_finite() && b.is_finite() && a < b,
            TwoPoint { a, b, w } => a.is_finite() && b.is_finite() && a < b && (0.0..=1.0).contains(w),
            LogNormal { mu, sigma } => mu.is_finite() && *sigma > 0.0 && sigma.is_finite(),
            Gamma { shape, scale } => *shape > 0.0 && *scale > 0.0,
            ParetoTruncated { alpha, a, b } => *alpha > 0.0 && *a > 0.0 && a < b && b.is_finite(),
            Beta { alpha, beta } => *alpha > 0.0 && *beta > 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParameters(format!("{self:?}")))
        }
    }

    pub fn name(&self) -> String {
        match self {
            Uniform { a, b } => format!("uniform({a},{b})"),
            TwoPoint { a, b, w } => format!("twopoint({a},{b};w={w})"),
            LogNormal { mu, sigma } => format!("lognormal({mu},{sigma})"),
            Gamma { shape, scale } => format!("gamma({shape},{scale})"),
            ParetoTruncated { alpha, a, b } => format!("pareto({alpha})|[{a},{b}]"),
            Beta { alpha, beta } => format!("beta({alpha},{beta})"),
        }
    }

    /// Declared support, closed where bounded ([a, b] or the open cone/unit
    /// interval markers (0, inf) / (0, 1)).
    pub fn support(&self) -> (f64, f64) {
        match self {
            Uniform { a, b } | TwoPoint { a, b, .. } | ParetoTruncated { a, b, .. } => (*a, *b),
            LogNormal { .. } | Gamma { .. } => (0.0, f64::INFINITY),
            Beta { .. } => (0.0, 1.0),
        }
    }

    /// Bounded declared support as an interval, when it exists.
    pub fn bounded_support(&self) -> Option<SupportInterval> {
        let (a, b) = self.support();
        if b.is_finite() {
            SupportInterval::new(a, b).ok()
        } else {
            None
        }
    }

    /// Inverse CDF at u in (0, 1). Beta and Gamma invert their regularized
    /// incomplete special functions numerically (tolerance 1e-10).
    pub fn quantile(&self, u: f64) -> f64 {
        debug_assert!(u > 0.0 && u < 1.0);
        match self {
            Uniform { a, b } => a + (b - a) * u,
            TwoPoint { a, b, w } => {
                if u < *w {
                    *a
                } else {
                    *b
                }
            }
            LogNormal { mu, sigma } => (mu + sigma * normal_quantile(u)).exp(),
            Gamma { shape, scale } => {
                // bracket then bisect P(shape, x) = u in the unit-scale variable
                let mut hi = shape + 10.0 * shape.sqrt() + 10.0;
                while reg_gamma_lower(*shape, hi) < u {
                    hi *= 2.0;
                }
                scale * invert_monotone_cdf(|x| reg_gamma_lower(*shape, x), u, 0.0, hi, 1e-12)
            }
            ParetoTruncated { alpha, a, b } => {
                let c = 1.0 - (a / b).powf(*alpha);
                a * (1.0 - u * c).powf(-1.0 / alpha)
            }
            Beta { alpha, beta } => {
                invert_monotone_cdf(|x| reg_inc_beta(*alpha, *beta, x), u, 0.0, 1.0, 1e-10)
            }
        }
    }
}

/// Draw n points by inverse-CDF sampling on substream 0 of `seed`.
pub fn sample(spec: &DistributionSpec, n: usize, seed: u64) -> Result<EmpiricalMeasure> {
    spec.validate()?;
    if n == 0 {
        return Err(Error::InvalidArgument("need n >= 1 samples".into()));
    }
    let mut rng = stream_rng(seed, 0);
    let points: Vec<f64> = (0..n).map(|_| spec.quantile(unit_open(&mut rng))).collect();
    EmpiricalMeasure::from_samples(points)
}

/// The statistic whose concentration is verified.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Statistic {
    /// sum of psi(X_i); bound 2 exp(-2t^2 / (n (psi(b)-psi(a))^2))
    Sum,
    /// log of the product, i.e. sum of log X_i; requires the log transform
    Product,
    /// max of psi(X_i) around its median; one-sided max bound
    Max,
}

impl Statistic {
    pub fn name(&self) -> &'static str {
        match self {
            Statistic::Sum => "sum",
            Statistic::Product => "product",
            Statistic::Max => "max",
        }
    }
}

/// Empirical tails, matching closed-form bounds, and domination flags.
#[derive(Debug, Clone, PartialEq)]
pub struct SimResult {
    pub statistic: String,
    pub t_grid: Vec<f64>,
    pub empirical_tail: Vec<f64>,
    pub bound: Vec<f64>,
    pub stderr: Vec<f64>,
    pub n_reps: usize,
    pub seed: u64,
    /// mean of the replicated statistic (median for Max)
    pub center: f64,
    /// Monte Carlo error of the center (asymptotic 1.2533 sd/sqrt(n) for
    /// the median)
    pub center_stderr: f64,
    /// per grid point: empirical <= bound + 3 stderr
    pub dominated: Vec<bool>,
    /// all grid points dominated
    pub pass: bool,
}

/// Estimate the two-sided tail P(|T - center| >= t) of the chosen statistic
/// over `n_reps` independent replications of `n_vars` draws, and compare
/// against the matching closed-form bound at every grid point.
///
/// Center is the replication mean for Sum/Product and the replication median
/// for Max. Domination at t means empirical <= bound + 3 stderr with
/// stderr = sqrt(p(1-p)/n_reps).
pub fn verify_bound(
    spec: &DistributionSpec,
    n_vars: usize,
    statistic: Statistic,
    transform: &CoordinateTransform,
    t_grid: &[f64],
    n_reps: usize,
    seed: u64,
) -> Result<SimResult> {
    spec.validate()?;
    if n_vars == 0 || n_reps == 0 {
        return Err(Error::InvalidArgument("need n_vars >= 1 and n_reps >= 1".into()));
    }
    if t_grid.is_empty() || t_grid.iter().any(|t| !t.is_finite() || *t < 0.0) {
        return Err(Error::InvalidArgument("t grid must be nonempty with t >= 0".into()));
    }
    let support = spec.bounded_support().ok_or_else(|| {
        Error::InvalidArgument(format!(
            "bound verification requires bounded declared support, {} is unbounded",
            spec.name()
        ))
    })?;

    // statistic/transform compatibility and the matching bound column
    let bound_fn: Box<dyn Fn(f64) -> Result<f64>> = match statistic {
        Statistic::Sum => {
            let ya = transform.forward(support.a)?;
            let yb = transform.forward(support.b)?;
            let (lo, hi) = if ya <= yb { (ya, yb) } else { (yb, ya) };
            let psi_range = SupportInterval::new(lo, hi)?;
            let ranges = vec![psi_range; n_vars];
            Box::new(move |t| Ok((2.0 * master_tail_bound(1.0, &ranges, t)?).min(1.0)))
        }
        Statistic::Product => {
            if *transform != CoordinateTransform::Log {
                return Err(Error::InvalidArgument(
                    "product statistic is monitored in log coordinates; pass the log transform".into(),
                ));
            }
            if support.a <= 0.0 {
                return Err(Error::Domain("product statistic requires positive support".into()));
            }
            let ivs = vec![support; n_vars];
            Box::new(move |t| Ok(product_tail_bound(&ivs, t)?.0))
        }
        Statistic::Max => {
            let mode = match transform {
                CoordinateTransform::Identity => MaxBoundMode::Identity,
                CoordinateTransform::Log => MaxBoundMode::Log,
                other => {
                    return Err(Error::InvalidArgument(format!(
                        "max statistic supports identity or log coordinates, got {}",
                        other.name()
                    )));
                }
            };
            if mode == MaxBoundMode::Log && support.a <= 0.0 {
                return Err(Error::Domain("log mode requires positive support".into()));
            }
            Box::new(move |t| max_tail_bound(n_vars, &support, t, mode))
        }
    };

    // one ChaCha substream per replication: bit-identical for any worker count
    let stats: Vec<f64> = (0..n_reps as u64)
        .into_par_iter()
        .map(|rep| -> Result<f64> {
            let mut rng = stream_rng(seed, rep);
            let mut acc = match statistic {
                Statistic::Max => f64::NEG_INFINITY,
                _ => 0.0,
            };
            for _ in 0..n_vars {
                let x = spec.quantile(unit_open(&mut rng));
                let y = transform.forward(x)?;
                match statistic {
                    Statistic::Sum | Statistic::Product => acc += y,
                    Statistic::Max => acc = acc.max(y),
                }
            }
            Ok(acc)
        })
        .collect::<Result<Vec<f64>>>()?;

    let mean = stats.iter().sum::<f64>() / n_reps as f64;
    let sd = (stats.iter().map(|s| (s - mean) * (s - mean)).sum::<f64>()
        / (n_reps as f64 - 1.0).max(1.0))
    .sqrt();
    let (center, center_stderr) = match statistic {
        Statistic::Sum | Statistic::Product => (mean, sd / (n_reps as f64).sqrt()),
        Statistic::Max => {
            let mut sorted = stats.clone();
            sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let med = if n_reps % 2 == 1 {
                sorted[n_reps / 2]
            } else {
                0.5 * (sorted[n_reps / 2 - 1] + sorted[n_reps / 2])
            };
            // asymptotic normal-theory error of a sample median
            (med, 1.2533 * sd / (n_reps as f64).sqrt())
        }
    };

    let mut empirical_tail = Vec::with_capacity(t_grid.len());
    let mut bound = Vec::with_capacity(t_grid.len());
    let mut stderr = Vec::with_capacity(t_grid.len());
    let mut dominated = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        let hits = stats.iter().filter(|&&s| (s - center).abs() >= t).count();
        let p_hat = hits as f64 / n_reps as f64;
        let b = bound_fn(t)?;
        let se = (p_hat * (1.0 - p_hat) / n_reps as f64).sqrt();
        empirical_tail.push(p_hat);
        bound.push(b);
        stderr.push(se);
        dominated.push(p_hat <= b + 3.0 * se);
    }
    let pass = dominated.iter().all(|&d| d);

    Ok(SimResult {
        statistic: format!("{}[{}]", statistic.name(), transform.name()),
        t_grid: t_grid.to_vec(),
        empirical_tail,
        bound,
        stderr,
        n_reps,
        seed,
        center,
        center_stderr,
        dominated,
        pass,
    })
}

/// Default deviation grid for `verify_bound`: multiples
/// {0, 0.5, 1, 1.5, 2, 3} of the bound's own sigma.
pub fn default_t_grid(sigma_sq_bound: f64) -> Vec<f64> {
    let s = sigma_sq_bound.sqrt();
    [0.0, 0.5, 1.0, 1.5, 2.0, 3.0].iter().map(|k| k * s).collect()
}

/// One row of the enlargement check.
#[derive(Debug, Clone, PartialEq)]
pub struct EnlargementRow {
    pub eps: f64,
    /// holdout fraction with psi_hat(x) < eps
    pub measured: f64,
    /// Gaussian floor Phi(eps)
    pub floor: f64,
    /// measured - floor
    pub gap: f64,
    /// binomial standard error of `measured`
    pub stderr: f64,
}

/// Check the transported isoperimetric floor mu(A_eps) >= Phi(eps) for the
/// half-space A = {x : psi_hat(x) <= 0} under the fitted Gaussianizer.
///
/// The holdout is a seeded bootstrap resample of `samples` (`n_holdout`
/// inverse-CDF draws from the empirical distribution); `measured` is its
/// fraction with psi_hat below eps.
pub fn enlargement_check(
    samples: &EmpiricalMeasure,
    eps_grid: &[f64],
    n_holdout: usize,
    seed: u64,
) -> Result<Vec<EnlargementRow>> {
    if eps_grid.is_empty() || eps_grid.iter().any(|e| !e.is_finite() || *e < 0.0) {
        return Err(Error::InvalidArgument("eps grid must be nonempty with eps >= 0".into()));
    }
    if n_holdout == 0 {
        return Err(Error::InvalidArgument("need n_holdout >= 1".into()));
    }
    let psi_hat = gaussianize(samples)?;

    let table = samples.quantile_table();
    let mut rng = stream_rng(seed, 0);
    let mut z_holdout = Vec::with_capacity(n_holdout);
    for _ in 0..n_holdout {
        let x = table.quantile(unit_open(&mut rng));
        z_holdout.push(psi_hat.forward(x)?);
    }

    let mut rows = Vec::with_capacity(eps_grid.len());
    for &eps in eps_grid {
        let hits = z_holdout.iter().filter(|&&z| z < eps).count();
        let measured = hits as f64 / n_holdout as f64;
        let floor = normal_cdf(eps);
        let stderr = (measured * (1.0 - measured) / n_holdout as f64).sqrt();
        rows.push(EnlargementRow { eps, measured, floor, gap: measured - floor, stderr });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diffeo::CoordinateTransform::{Identity, Log};
    use crate::optimize::{concentration_functional, Estimator};

    #[test]
    fn two_point_sample_mean_matches_clt() {
        let spec = TwoPoint { a: 0.0, b: 1.0, w: 0.5 };
        let m = sample(&spec, 1_000_000, 42).unwrap();
        assert!((m.mean() - 0.5).abs() < 0.002, "mean {}", m.mean());
    }

    #[test]
    fn sampling_is_deterministic() {
        let spec = Uniform { a: 1.0, b: 2.0 };
        let m1 = sample(&spec, 1000, 7).unwrap();
        let m2 = sample(&spec, 1000, 7).unwrap();
        assert_eq!(m1.points(), m2.points());
        let m3 = sample(&spec, 1000, 8).unwrap();
        assert_ne!(m1.points(), m3.points());
    }

    #[test]
    fn invalid_parameters_are_rejected() {
        assert!(matches!(
            sample(&Gamma { shape: -1.0, scale: 1.0 }, 10, 0),
            Err(Error::InvalidParameters(_))
        ));
        assert!(matches!(
            sample(&TwoPoint { a: 0.0, b: 1.0, w: 1.5 }, 10, 0),
            Err(Error::InvalidParameters(_))
        ));
        assert!(matches!(
            sample(&Beta { alpha: 0.0, beta: 1.0 }, 10, 0),
            Err(Error::InvalidParameters(_))
        ));
    }

    #[test]
    fn samples_respect_declared_support() {
        let cases: Vec<DistributionSpec> = vec![
            Uniform { a: 1.0, b: 2.0 },
            TwoPoint { a: 1.0, b: 5.0, w: 0.25 },
            LogNormal { mu: 0.0, sigma: 1.0 },
            Gamma { shape: 2.0, scale: 0.5 },
            ParetoTruncated { alpha: 1.0, a: 1.0, b: 100.0 },
            Beta { alpha: 2.0, beta: 3.0 },
        ];
        for spec in cases {
            let m = sample(&spec, 500, 3).unwrap();
            let (lo, hi) = spec.support();
            assert!(m.min() >= lo && m.max() <= hi, "{} support violated", spec.name());
        }
    }

    #[test]
    fn gamma_and_beta_quantiles_invert_their_cdfs() {
        for u in [0.01, 0.2, 0.5, 0.9, 0.999] {
            let x = Gamma { shape: 2.5, scale: 2.0 }.quantile(u);
            assert!((reg_gamma_lower(2.5, x / 2.0) - u).abs() < 1e-9, "gamma at u={u}");
            let x = Beta { alpha: 2.0, beta: 3.0 }.quantile(u);
            assert!((reg_inc_beta(2.0, 3.0, x) - u).abs() < 1e-8, "beta at u={u}");
        }
    }

    #[test]
    fn verify_bound_trivial_at_zero() {
        let spec = Uniform { a: 1.0, b: 2.0 };
        let r = verify_bound(&spec, 5, Statistic::Sum, &Identity, &[0.0], 200, 1).unwrap();
        assert_eq!(r.empirical_tail[0], 1.0);
        assert_eq!(r.bound[0], 1.0);
        assert!(r.pass);
    }

    #[test]
    fn verify_bound_dominates_for_uniform_product() {
        let spec = Uniform { a: 1.0, b: 1000.0 };
        let sigma_sq = 50.0 * 1000.0f64.ln().powi(2) / 4.0;
        let grid = default_t_grid(sigma_sq);
        let r = verify_bound(&spec, 50, Statistic::Product, &Log, &grid, 2000, 11).unwrap();
        assert!(r.pass, "domination failed: {:?}", r);
    }

    #[test]
    fn verify_bound_results_do_not_depend_on_worker_count() {
        let spec = ParetoTruncated { alpha: 1.0, a: 1.0, b: 1000.0 };
        let grid = [0.0, 5.0, 20.0];
        let run = |threads: usize| {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
            pool.install(|| verify_bound(&spec, 10, Statistic::Sum, &Identity, &grid, 500, 5).unwrap())
        };
        let single = run(1);
        let multi = run(4);
        assert_eq!(single, multi);
    }

    #[test]
    fn verify_bound_max_statistic_centers_at_median() {
        let spec = Uniform { a: 1.0, b: 1000.0 };
        let lr = 1000.0f64.ln();
        let grid = default_t_grid(lr * lr / (4.0 * 20.0));
        let r = verify_bound(&spec, 20, Statistic::Max, &Log, &grid, 4000, 6).unwrap();
        assert!(r.pass, "{:?}", r);
        // the center is the median of max(log X_i), below log(b)
        assert!(r.center < lr && r.center > lr - 0.5, "center {}", r.center);
    }

    #[test]
    fn verify_bound_rejects_incompatible_pairs() {
        let spec = Uniform { a: 1.0, b: 2.0 };
        assert!(verify_bound(&spec, 5, Statistic::Product, &Identity, &[0.0], 10, 0).is_err());
        let lognormal = LogNormal { mu: 0.0, sigma: 1.0 };
        assert!(verify_bound(&lognormal, 5, Statistic::Sum, &Identity, &[0.0], 10, 0).is_err());
        let beta = Beta { alpha: 1.0, beta: 1.0 };
        assert!(verify_bound(&beta, 5, Statistic::Max, &Log, &[0.0], 10, 0).is_err());
    }

    #[test]
    fn rademacher_mgf_estimate_matches_extremal_constant() {
        // the two-point distribution attains the range-based constant
        let spec = TwoPoint { a: 0.0, b: 1.0, w: 0.5 };
        let m = sample(&spec, 100_000, 9).unwrap();
        let est = concentration_functional(&m, &Identity, Estimator::MgfGrid).unwrap();
        assert!((est - 0.25).abs() / 0.25 < 0.05, "estimate {est}");
    }

    #[test]
    fn enlargement_floor_on_lognormal_data() {
        let spec = LogNormal { mu: 0.0, sigma: 1.0 };
        let m = sample(&spec, 20_000, 13).unwrap();
        let rows = enlargement_check(&m, &[0.0, 0.5, 1.0, 2.0, 6.0], 20_000, 14).unwrap();
        for row in &rows {
            assert!(
                row.measured >= row.floor - 3.0 * row.stderr - 1e-12,
                "floor violated at eps={}: measured {} < floor {}",
                row.eps,
                row.measured,
                row.floor
            );
        }
        // eps = 0 sits at the median set, eps = 6 saturates
        assert!((rows[0].measured - 0.5).abs() < 3.0 * (0.25f64 / 20_000.0).sqrt() + 0.01);
        assert!(rows[4].measured > 0.999);
        assert!(rows[4].floor > 0.999999);
    }

    #[test]
    fn enlargement_requires_enough_data() {
        let m = EmpiricalMeasure::from_samples(vec![1.0, 2.0, 3.0]).unwrap();
        assert!(matches!(
            enlargement_check(&m, &[0.5], 100, 0),
            Err(Error::InsufficientData { .. })
        ));
    }

    #[test]
    fn enlargement_is_deterministic() {
        let spec = LogNormal { mu: 0.0, sigma: 1.0 };
        let m = sample(&spec, 500, 2).unwrap();
        let r1 = enlargement_check(&m, &[0.5, 1.0], 1000, 3).unwrap();
        let r2 = enlargement_check(&m, &[0.5, 1.0], 1000, 3).unwrap();
        assert_eq!(r1, r2);
    }
}
