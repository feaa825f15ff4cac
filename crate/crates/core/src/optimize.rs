//! The concentration functional and data-driven coordinate selection over a
//! transform grid, plus the closed-form optimal catalog and the
//! exponential-family coordinate maps.

use crate::diffeo::{CoordinateTransform, SupportInterval};
use crate::error::{Error, Result};
use crate::measure::EmpiricalMeasure;

/// How the sub-Gaussian parameter of a transformed sample is estimated.
///
/// `RangeBased` is the extremal (worst-case over distributions with the same
/// support) constant; `MgfGrid` reads the centered empirical MGF on a fixed
/// logarithmic grid of both signs and never exceeds the range-based value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Estimator {
    RangeBased,
    MgfGrid,
}

// lambda grid for MgfGrid: +-logspace(1e-2, 1e2, 41)
fn mgf_lambda_grid() -> Vec<f64> {
    let mut grid = Vec::with_capacity(82);
    for k in 0..41 {
        let l = 10f64.powf(-2.0 + 4.0 * k as f64 / 40.0);
        grid.push(l);
        grid.push(-l);
    }
    grid
}

/// Sub-Gaussian parameter estimate of the pushforward of `m` through `t`.
///
/// RangeBased: (max psi(x) - min psi(x))^2 / 4 over the support (weights > 0).
/// MgfGrid: max over the lambda grid of 2 log M(lambda) / lambda^2, where M
/// is the empirical MGF centered at the weighted mean and the grid is
/// expressed in units of the sample standard deviation (lambda_j / sd), so
/// the estimate obeys the exact affine scaling law F[alpha Y] =
/// alpha^2 F[Y]. Computed in log-sum-exp form so large transformed values
/// cannot overflow.
pub fn concentration_functional(
    m: &EmpiricalMeasure,
    t: &CoordinateTransform,
    estimator: Estimator,
) -> Result<f64> {
    let mut values = Vec::with_capacity(m.len());
    let mut weights = Vec::with_capacity(m.len());
    for (&x, &w) in m.points().iter().zip(m.weights()) {
        if w == 0.0 {
            continue;
        }
        values.push(t.forward(x)?);
        weights.push(w);
    }
    if values.is_empty() {
        return Err(Error::EmptySample);
    }
    let lo = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if lo == hi {
        // point mass concentrates perfectly under either estimator
        return Ok(0.0);
    }
    match estimator {
        Estimator::RangeBased => Ok((hi - lo) * (hi - lo) / 4.0),
        Estimator::MgfGrid => {
            let total_w: f64 = weights.iter().sum();
            let mean: f64 =
                values.iter().zip(&weights).map(|(v, w)| v * w).sum::<f64>() / total_w;
            let centered: Vec<f64> = values.iter().map(|v| v - mean).collect();
            let var: f64 = centered
                .iter()
                .zip(&weights)
                .map(|(c, w)| w * c * c)
                .sum::<f64>()
                / total_w;
            let sd = var.sqrt();
            if sd == 0.0 {
                return Ok(0.0);
            }
            let log_w: Vec<f64> = weights.iter().map(|w| w.ln()).collect();
            let mut best = 0.0f64;
            for lambda in mgf_lambda_grid() {
                let lambda = lambda / sd;
                // log M(lambda) via log-sum-exp over log(w_i) + lambda*c_i
                let mut peak = f64::NEG_INFINITY;
                for (c, lw) in centered.iter().zip(&log_w) {
                    let e = lambda * c + lw;
                    if e > peak {
                        peak = e;
                    }
                }
                let sum: f64 = centered
                    .iter()
                    .zip(&log_w)
                    .map(|(c, lw)| (lambda * c + lw - peak).exp())
                    .sum();
                let log_mgf = peak + sum.ln() - total_w.ln();
                best = best.max(2.0 * log_mgf / (lambda * lambda));
            }
            Ok(best.max(0.0))
        }
    }
}

/// A finite list of candidate transforms, all valid on `domain_filter`.
#[derive(Debug, Clone)]
pub struct TransformGrid {
    pub candidates: Vec<CoordinateTransform>,
    pub domain_filter: SupportInterval,
}

impl TransformGrid {
    pub fn new(candidates: Vec<CoordinateTransform>, domain_filter: SupportInterval) -> Result<Self> {
        for c in &candidates {
            if !c.contains(domain_filter.a) || !c.contains(domain_filter.b) {
                return Err(Error::Domain(format!(
                    "candidate {} is not valid on [{}, {}]",
                    c.name(),
                    domain_filter.a,
                    domain_filter.b
                )));
            }
        }
        Ok(Self { candidates, domain_filter })
    }

    /// Default candidate set for data supported on `domain`:
    /// identity always; log and the Box-Cox ladder
    /// lambda in {-1, -0.5, 0, 0.5, 1, 2} when the support is positive
    /// (lambda >= 1 also tolerates a = 0); logit when the support sits
    /// inside (0, 1).
    pub fn default_for(domain: SupportInterval) -> Self {
        let mut candidates = vec![CoordinateTransform::Identity];
        if domain.a > 0.0 {
            candidates.push(CoordinateTransform::Log);
        }
        if domain.a > 0.0 && domain.b < 1.0 {
            candidates.push(CoordinateTransform::Logit);
        }
        for lambda in [-1.0, -0.5, 0.0, 0.5, 1.0, 2.0] {
            let ok = if lambda < 1.0 { domain.a > 0.0 } else { domain.a >= 0.0 };
            if ok {
                candidates.push(CoordinateTransform::BoxCox(lambda));
            }
        }
        Self { candidates, domain_filter: domain }
    }
}

/// Result of the grid search.
#[derive(Debug, Clone)]
pub struct Selection {
    pub best: CoordinateTransform,
    /// scale-normalized sup-value of the winner
    pub value: f64,
    /// every evaluated candidate with its sup-value, in evaluation order
    pub table: Vec<(CoordinateTransform, f64)>,
}

// Scale-normalized ranking value: the functional divided by the weighted
// variance of the transformed sample. Raw sub-Gaussian parameters are not
// comparable across transforms (wrapping any candidate in a small affine
// scale would shrink its raw value at will), so candidates are ranked by
// shape: 1.0 marks a two-point extremal sample, larger means heavier
// transformed tails. A point mass scores 0 under every transform.
fn ranked_value(m: &EmpiricalMeasure, t: &CoordinateTransform, est: Estimator) -> Result<f64> {
    let f = concentration_functional(m, t, est)?;
    let var = m.push(t)?.variance();
    if var == 0.0 {
        return Ok(0.0);
    }
    Ok(f / var)
}

fn sup_over_measures(
    ms: &[EmpiricalMeasure],
    t: &CoordinateTransform,
    est: Estimator,
) -> Result<f64> {
    let mut sup = f64::NEG_INFINITY;
    for m in ms {
        sup = sup.max(ranked_value(m, t, est)?);
    }
    Ok(sup)
}

// tie-break preference: identity, then log, then the Box-Cox with the
// smallest |lambda|, then anything else in evaluation order
fn preference_rank(t: &CoordinateTransform) -> (u8, f64) {
    match t {
        CoordinateTransform::Identity => (0, 0.0),
        CoordinateTransform::Log => (1, 0.0),
        CoordinateTransform::BoxCox(l) if *l == 0.0 => (1, 0.0),
        CoordinateTransform::BoxCox(l) => (2, l.abs()),
        _ => (3, 0.0),
    }
}

const GOLDEN_ITERS: usize = 20;

/// Pick the transform minimizing the sup over `ms` of the scale-normalized
/// concentration functional.
///
/// After the fixed grid is evaluated, the Box-Cox exponent is refined by 20
/// golden-section iterations inside the grid cell bracketing the best
/// Box-Cox candidate, and the refined candidate joins the table. Ties within
/// 1e-12 break toward identity, then log, then the smallest |lambda|.
pub fn select_optimal_transform(
    ms: &[EmpiricalMeasure],
    grid: &TransformGrid,
    estimator: Estimator,
) -> Result<Selection> {
    if grid.candidates.is_empty() {
        return Err(Error::EmptyGrid);
    }
    if ms.is_empty() {
        return Err(Error::EmptySample);
    }
    for m in ms {
        if m.min() < grid.domain_filter.a || m.max() > grid.domain_filter.b {
            return Err(Error::Domain(format!(
                "measure support [{}, {}] outside grid domain [{}, {}]",
                m.min(),
                m.max(),
                grid.domain_filter.a,
                grid.domain_filter.b
            )));
        }
    }

    let mut table: Vec<(CoordinateTransform, f64)> = Vec::new();
    for c in &grid.candidates {
        table.push((c.clone(), sup_over_measures(ms, c, estimator)?));
    }

    // golden-section refinement of the Box-Cox exponent
    let mut bc: Vec<(f64, f64)> = table
        .iter()
        .filter_map(|(t, v)| match t {
            CoordinateTransform::BoxCox(l) => Some((*l, *v)),
            _ => None,
        })
        .collect();
    bc.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    if bc.len() >= 2 {
        let best_idx = bc
            .iter()
            .enumerate()
            .min_by(|a, b| a.1 .1.partial_cmp(&b.1 .1).unwrap())
            .map(|(i, _)| i)
            .unwrap();
        let lo = bc[best_idx.saturating_sub(1)].0;
        let hi = bc[(best_idx + 1).min(bc.len() - 1)].0;
        if hi > lo {
            let eval = |l: f64| sup_over_measures(ms, &CoordinateTransform::BoxCox(l), estimator);
            let lambda_hat = golden_section(lo, hi, GOLDEN_ITERS, &eval)?;
            let refined = CoordinateTransform::BoxCox(lambda_hat);
            let v = sup_over_measures(ms, &refined, estimator)?;
            table.push((refined, v));
        }
    }

    // argmin with deterministic tie-break
    let vmin = table.iter().map(|(_, v)| *v).fold(f64::INFINITY, f64::min);
    let tol = 1e-12 * vmin.abs().max(1.0);
    let (best, value) = table
        .iter()
        .filter(|(_, v)| *v <= vmin + tol)
        .min_by(|a, b| {
            preference_rank(&a.0)
                .partial_cmp(&preference_rank(&b.0))
                .unwrap()
        })
        .map(|(t, v)| (t.clone(), *v))
        .unwrap();
    Ok(Selection { best, value, table })
}

// minimize f on [lo, hi]; returns the midpoint of the final bracket
fn golden_section(
    mut lo: f64,
    mut hi: f64,
    iters: usize,
    f: &impl Fn(f64) -> Result<f64>,
) -> Result<f64> {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    for _ in 0..iters {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1)?;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2)?;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Closed-form optimal coordinate for the named parametric family.
///
/// gaussian -> identity; lognormal -> log; gamma -> Box-Cox 1/2 for shape
/// above 1, log otherwise; pareto -> log; beta -> logit; bounded_positive ->
/// log when the support ratio exceeds e^2, identity otherwise.
pub fn catalog_optimal(
    family: &str,
    shape: Option<f64>,
    ratio: Option<f64>,
) -> Result<CoordinateTransform> {
    match family {
        "gaussian" => Ok(CoordinateTransform::Identity),
        "lognormal" => Ok(CoordinateTransform::Log),
        "gamma" => {
            let shape = shape.ok_or_else(|| {
                Error::InvalidArgument("gamma needs a shape parameter".into())
            })?;
            if shape <= 0.0 {
                return Err(Error::InvalidParameters(format!("gamma shape {shape} <= 0")));
            }
            Ok(if shape > 1.0 {
                CoordinateTransform::BoxCox(0.5)
            } else {
                CoordinateTransform::Log
            })
        }
        "pareto" => Ok(CoordinateTransform::Log),
        "beta" => Ok(CoordinateTransform::Logit),
        "bounded_positive" => {
            let r = ratio.ok_or_else(|| {
                Error::InvalidArgument("bounded_positive needs the support ratio r".into())
            })?;
            if r <= 1.0 {
                return Err(Error::InvalidParameters(format!("support ratio {r} <= 1")));
            }
            let e2 = std::f64::consts::E * std::f64::consts::E;
            Ok(if r > e2 {
                CoordinateTransform::Log
            } else {
                CoordinateTransform::Identity
            })
        }
        other => Err(Error::UnknownFamily(other.into())),
    }
}

/// One-parameter exponential families with known log-partition gradient.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExpFamily {
    /// success probability p in (0, 1); theta = logit(p)
    Bernoulli { p: f64 },
    /// rate > 0; theta = log(rate)
    Poisson { rate: f64 },
    /// rate > 0; theta = -rate (natural domain theta < 0)
    Exponential { rate: f64 },
    /// unit variance; theta = mean
    Gaussian { mean: f64 },
}

/// A family together with the connection parameter alpha in {-1, 0, 1}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpFamilySpec {
    pub family: ExpFamily,
    pub alpha: f64,
}

impl ExpFamilySpec {
    pub fn new(family: ExpFamily, alpha: f64) -> Result<Self> {
        if alpha != -1.0 && alpha != 0.0 && alpha != 1.0 {
            return Err(Error::InvalidArgument(format!(
                "alpha must be -1, 0, or 1, got {alpha}"
            )));
        }
        match family {
            ExpFamily::Bernoulli { p } if !(p > 0.0 && p < 1.0) => {
                return Err(Error::InvalidParameters(format!("Bernoulli p = {p}")));
            }
            ExpFamily::Poisson { rate } | ExpFamily::Exponential { rate } if !(rate > 0.0) => {
                return Err(Error::InvalidParameters(format!("rate = {rate}")));
            }
            ExpFamily::Gaussian { mean } if !mean.is_finite() => {
                return Err(Error::InvalidParameters(format!("mean = {mean}")));
            }
            _ => {}
        }
        Ok(Self { family, alpha })
    }

    /// Natural parameter of the family at its stored parameter value.
    pub fn natural_parameter(&self) -> f64 {
        match self.family {
            ExpFamily::Bernoulli { p } => (p / (1.0 - p)).ln(),
            ExpFamily::Poisson { rate } => rate.ln(),
            ExpFamily::Exponential { rate } => -rate,
            ExpFamily::Gaussian { mean } => mean,
        }
    }

    fn theta_in_domain(&self, theta: f64) -> bool {
        match self.family {
            ExpFamily::Exponential { .. } => theta < 0.0,
            _ => theta.is_finite(),
        }
    }

    // gradient of the log-partition function (the mean parameter map)
    fn grad_log_partition(&self, theta: f64) -> f64 {
        match self.family {
            ExpFamily::Bernoulli { .. } => {
                let e = theta.exp();
                e / (1.0 + e)
            }
            ExpFamily::Poisson { .. } => theta.exp(),
            ExpFamily::Exponential { .. } => -1.0 / theta,
            ExpFamily::Gaussian { .. } => theta,
        }
    }
}

/// The alpha-indexed coordinate map evaluated at natural parameter `theta`:
/// theta itself for alpha = 1, the mean parameter for alpha = -1, and their
/// midpoint for alpha = 0.
pub fn exp_family_coordinate(spec: &ExpFamilySpec, theta: f64) -> Result<f64> {
    if !theta.is_finite() || !spec.theta_in_domain(theta) {
        return Err(Error::Domain(format!(
            "theta = {theta} outside the natural-parameter domain"
        )));
    }
    Ok(match spec.alpha {
        1.0 => theta,
        -1.0 => spec.grad_log_partition(theta),
        _ => 0.5 * (theta + spec.grad_log_partition(theta)),
    })
}
