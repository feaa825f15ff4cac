//! Closed-form concentration constants and tail bounds in arbitrary
//! coordinates, improvement factors, and coordinate recommendations.
//!
//! Conventions:
//! - every reported value is a probability, so two-sided "2 exp" expressions
//!   are capped at 1;
//! - a degenerate interval (a = b) is a point mass: its bound is 1 at t = 0
//!   and 0 for t > 0, the limit of the formulas.

use crate::diffeo::{CoordinateTransform, SupportInterval};
use crate::error::{Error, Result};

/// Extremal sub-Gaussian parameter over distributions supported on [a, b]
/// in psi-coordinates: (psi(b) - psi(a))^2 / 4.
pub fn hoeffding_constant(t: &CoordinateTransform, iv: &SupportInterval) -> Result<f64> {
    let ya = t.forward(iv.a)?;
    let yb = t.forward(iv.b)?;
    Ok((yb - ya) * (yb - ya) / 4.0)
}

/// One-sided tail bound for a psi-Lipschitz function of independent
/// variables: exp(-2 t^2 / (L^2 sum_i (b_i - a_i)^2)).
///
/// `ranges` are the value ranges in psi-coordinates. When every range is
/// degenerate the bound is 1 at t = 0 and 0 for t > 0.
pub fn master_tail_bound(lipschitz: f64, ranges: &[SupportInterval], t: f64) -> Result<f64> {
    if !(lipschitz > 0.0) || !lipschitz.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "Lipschitz constant must be positive and finite, got {lipschitz}"
        )));
    }
    if !(t >= 0.0) {
        return Err(Error::InvalidArgument(format!("deviation t must be >= 0, got {t}")));
    }
    if ranges.is_empty() {
        return Err(Error::InvalidArgument("need at least one range".into()));
    }
    let denom: f64 = lipschitz * lipschitz * ranges.iter().map(|r| r.width() * r.width()).sum::<f64>();
    Ok(capped_exp_bound(1.0, 2.0 * t * t, denom, t))
}

// prefactor * exp(-num/denom) capped at 1, with the point-mass limit at
// denom = 0.
fn capped_exp_bound(prefactor: f64, num: f64, denom: f64, t: f64) -> f64 {
    if denom == 0.0 {
        return if t == 0.0 { 1.0 } else { 0.0 };
    }
    (prefactor * (-num / denom).exp()).min(1.0)
}

/// Improvement factor rho(a, b) = (b - a)^2 / log^2(b/a), the ratio of the
/// identity-coordinate Hoeffding constant to the logarithmic one.
pub fn improvement_factor(iv: &SupportInterval) -> Result<f64> {
    if iv.a <= 0.0 {
        return Err(Error::Domain(format!(
            "improvement factor requires a > 0, got a = {}",
            iv.a
        )));
    }
    if !(iv.a < iv.b) {
        return Err(Error::InvalidArgument(format!(
            "improvement factor requires a < b, got [{}, {}]",
            iv.a, iv.b
        )));
    }
    let w = iv.width();
    let lr = (iv.b / iv.a).ln();
    Ok(w * w / (lr * lr))
}

/// Reference claims for the improvement factor at specific ratios r = b/a,
/// as published alongside the formula. The formula value disagrees with the
/// first two; reports flag the discrepancy rather than silently adopting
/// either normalization.
pub fn published_improvement_claims() -> [(f64, f64); 3] {
    let e2 = std::f64::consts::E * std::f64::consts::E;
    [(e2, 1.0), (100.0, 144.0), (1000.0, 21_000.0)]
}

/// Outcome of the identity-vs-log coordinate comparison for a bounded
/// positive variable.
#[derive(Debug, Clone)]
pub struct CoordinateRecommendation {
    /// `Identity` or `Log`
    pub choice: CoordinateTransform,
    /// ((r - 1) / log r)^2, the a = 1 normalized constant ratio
    pub ratio: f64,
    /// r = b/a
    pub r: f64,
    /// published switching threshold on r (e^2)
    pub threshold_r: f64,
    /// raw Hoeffding constant in identity coordinates, (b - a)^2/4
    pub identity_constant: f64,
    /// raw Hoeffding constant in log coordinates, log^2(b/a)/4
    pub log_constant: f64,
}

/// Recommend identity or logarithmic coordinates for support [a, b].
///
/// The choice follows the published threshold r > e^2; the normalized ratio
/// ((r-1)/log r)^2 and both raw constants are reported so callers can see
/// that the ratio alone exceeds 1 for every r > 1.
pub fn recommend_coordinate(iv: &SupportInterval) -> Result<CoordinateRecommendation> {
    if iv.a <= 0.0 {
        return Err(Error::Domain(format!(
            "coordinate recommendation requires a > 0, got a = {}",
            iv.a
        )));
    }
    if !(iv.a < iv.b) {
        return Err(Error::InvalidArgument(format!(
            "coordinate recommendation requires a < b, got [{}, {}]",
            iv.a, iv.b
        )));
    }
    let r = iv.b / iv.a;
    let lr = r.ln();
    let ratio = ((r - 1.0) / lr) * ((r - 1.0) / lr);
    let threshold_r = std::f64::consts::E * std::f64::consts::E;
    let choice = if r > threshold_r {
        CoordinateTransform::Log
    } else {
        CoordinateTransform::Identity
    };
    Ok(CoordinateRecommendation {
        choice,
        ratio,
        r,
        threshold_r,
        identity_constant: iv.width() * iv.width() / 4.0,
        log_constant: lr * lr / 4.0,
    })
}

/// Two-sided tail bounds for log P_n around its mean: the logarithmic bound
/// 2 exp(-2t^2 / sum log^2(b_i/a_i)) and the classical comparison
/// 2 exp(-2t^2 / sum ((b_i - a_i)/a_i)^2). The logarithmic bound dominates
/// (is at most the classical one) since log r <= r - 1 for r >= 1.
pub fn product_tail_bound(ivs: &[SupportInterval], t: f64) -> Result<(f64, f64)> {
    if ivs.is_empty() {
        return Err(Error::InvalidArgument("need at least one interval".into()));
    }
    if !(t >= 0.0) {
        return Err(Error::InvalidArgument(format!("deviation t must be >= 0, got {t}")));
    }
    let mut d_log = 0.0;
    let mut d_classical = 0.0;
    for iv in ivs {
        if iv.a <= 0.0 {
            return Err(Error::Domain(format!(
                "product bound requires a_i > 0, got a = {}",
                iv.a
            )));
        }
        let lr = (iv.b / iv.a).ln();
        let rel = iv.width() / iv.a;
        d_log += lr * lr;
        d_classical += rel * rel;
    }
    Ok((
        capped_exp_bound(2.0, 2.0 * t * t, d_log, t),
        capped_exp_bound(2.0, 2.0 * t * t, d_classical, t),
    ))
}

/// Coordinate mode for the maximum bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MaxBoundMode {
    Identity,
    Log,
}

/// One-sided bound for the maximum of n i.i.d. variables around its median:
/// exp(-2 n t^2 / (b - a)^2) in identity coordinates, or
/// exp(-2 n t^2 / log^2(b/a)) for the maximum of the logs.
pub fn max_tail_bound(n: usize, iv: &SupportInterval, t: f64, mode: MaxBoundMode) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidArgument("need n >= 1 variables".into()));
    }
    if !(t >= 0.0) {
        return Err(Error::InvalidArgument(format!("deviation t must be >= 0, got {t}")));
    }
    let denom = match mode {
        MaxBoundMode::Identity => iv.width() * iv.width(),
        MaxBoundMode::Log => {
            if iv.a <= 0.0 {
                return Err(Error::Domain(format!(
                    "log mode requires a > 0, got a = {}",
                    iv.a
                )));
            }
            let lr = (iv.b / iv.a).ln();
            lr * lr
        }
    };
    Ok(capped_exp_bound(1.0, 2.0 * n as f64 * t * t, denom, t))
}

/// A named tail bound: P(|T - center| >= t) <= min(1, prefactor *
/// exp(-t^2 / (2 sigma_sq))).
#[derive(Debug, Clone)]
pub struct TailBoundReport {
    pub name: String,
    /// sub-Gaussian parameter of the statistic
    pub sigma_sq: f64,
    /// 1 for one-sided bounds, 2 for two-sided, 2p / 2d^2 for union bounds
    pub prefactor: f64,
    pub transform: CoordinateTransform,
    pub assumptions: Vec<String>,
}

impl TailBoundReport {
    pub fn new(
        name: impl Into<String>,
        sigma_sq: f64,
        prefactor: f64,
        transform: CoordinateTransform,
        assumptions: Vec<String>,
    ) -> Result<Self> {
        if !(sigma_sq >= 0.0) || !(prefactor >= 1.0) {
            return Err(Error::InvalidArgument(
                "tail bound requires sigma_sq >= 0 and prefactor >= 1".into(),
            ));
        }
        Ok(Self { name: name.into(), sigma_sq, prefactor, transform, assumptions })
    }

    /// Bound value at deviation t >= 0, capped at 1.
    pub fn bound_at(&self, t: f64) -> f64 {
        debug_assert!(t >= 0.0);
        capped_exp_bound(self.prefactor, t * t, 2.0 * self.sigma_sq, t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diffeo::CoordinateTransform::*;

    fn iv(a: f64, b: f64) -> SupportInterval {
        SupportInterval::new(a, b).unwrap()
    }

    #[test]
    fn hoeffding_constant_examples() {
        assert_eq!(hoeffding_constant(&Identity, &iv(0.0, 1.0)).unwrap(), 0.25);
        let e2 = std::f64::consts::E * std::f64::consts::E;
        let c = hoeffding_constant(&Log, &iv(1.0, e2)).unwrap();
        assert!((c - 1.0).abs() < 1e-12);
        let c = hoeffding_constant(&Log, &iv(1.0, 1000.0)).unwrap();
        let direct = (1000.0f64.ln()).powi(2) / 4.0;
        assert_eq!(c, direct);
        assert!((c - 11.929).abs() < 1e-3);
    }

    #[test]
    fn covariance_identity_exact_over_grid() {
        // hoeffding_constant(psi, [a,b]) == hoeffding_constant(id, [psi a, psi b])
        let transforms: Vec<CoordinateTransform> = vec![
            Log,
            BoxCox(0.5),
            BoxCox(2.0),
            BoxCox(-1.0),
            Arctan,
            CoordinateTransform::affine(2.0, -3.0, Log).unwrap(),
        ];
        let intervals = [iv(0.5, 1.5), iv(1.0, 4.0), iv(0.25, 9.0), iv(2.0, 2.5)];
        for t in &transforms {
            for r in &intervals {
                let lhs = hoeffding_constant(t, r).unwrap();
                let pa = t.forward(r.a).unwrap();
                let pb = t.forward(r.b).unwrap();
                let push = if pa <= pb { iv(pa, pb) } else { iv(pb, pa) };
                let rhs = hoeffding_constant(&Identity, &push).unwrap();
                assert_eq!(lhs, rhs, "{} on [{}, {}]", t.name(), r.a, r.b);
            }
        }
    }

    #[test]
    fn affine_law_scales_by_alpha_squared() {
        let cases = [(2.0, 1.0), (-3.0, 0.5), (0.25, -7.0)];
        let r = iv(0.5, 4.0);
        for (alpha, beta) in cases {
            let wrapped = CoordinateTransform::affine(alpha, beta, Log).unwrap();
            let lhs = hoeffding_constant(&wrapped, &r).unwrap();
            let rhs = alpha * alpha * hoeffding_constant(&Log, &r).unwrap();
            assert!(
                (lhs - rhs).abs() <= 1e-12 * rhs.abs().max(1.0),
                "alpha={alpha} beta={beta}: {lhs} vs {rhs}"
            );
        }
    }

    #[test]
    fn master_bound_examples() {
        let one = [iv(0.0, 1.0)];
        assert_eq!(master_tail_bound(1.0, &one, 0.0).unwrap(), 1.0);
        let b = master_tail_bound(1.0, &one, 0.5).unwrap();
        assert!((b - (-0.5f64).exp()).abs() < 1e-15);
        let four = [iv(0.0, 1.0); 4];
        let b = master_tail_bound(2.0, &four, 2.0).unwrap();
        assert!((b - (-0.5f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn master_bound_degenerate_and_errors() {
        let degenerate = [iv(1.0, 1.0)];
        assert_eq!(master_tail_bound(1.0, &degenerate, 0.0).unwrap(), 1.0);
        assert_eq!(master_tail_bound(1.0, &degenerate, 0.5).unwrap(), 0.0);
        assert!(master_tail_bound(0.0, &degenerate, 0.5).is_err());
        assert!(master_tail_bound(-1.0, &degenerate, 0.5).is_err());
        assert!(master_tail_bound(1.0, &degenerate, -0.1).is_err());
        assert!(master_tail_bound(1.0, &[], 0.0).is_err());
    }

    #[test]
    fn improvement_factor_values() {
        let rho = improvement_factor(&iv(1.0, 1000.0)).unwrap();
        assert!((rho - 20_915.0).abs() / 20_915.0 < 1e-2, "rho = {rho}");
        let e2 = std::f64::consts::E * std::f64::consts::E;
        let rho = improvement_factor(&iv(1.0, e2)).unwrap();
        assert!((rho - (e2 - 1.0) * (e2 - 1.0) / 4.0).abs() < 1e-9);
        assert!((rho - 10.21).abs() < 0.01);
        // scaling: at fixed ratio, rho scales with a^2
        let rho1 = improvement_factor(&iv(1.0, 1000.0)).unwrap();
        let rho2 = improvement_factor(&iv(2.0, 2000.0)).unwrap();
        assert!((rho2 - 4.0 * rho1).abs() < 1e-9 * rho2);
        assert!(matches!(improvement_factor(&iv(0.0, 1.0)), Err(Error::Domain(_))));
    }

    #[test]
    fn recommendation_follows_published_threshold() {
        let rec = recommend_coordinate(&iv(1.0, 1000.0)).unwrap();
        assert_eq!(rec.choice, Log);
        assert!((rec.ratio - 999.0 * 999.0 / 1000f64.ln().powi(2)).abs() < 1e-6);

        let rec = recommend_coordinate(&iv(1.0, 1.0001)).unwrap();
        assert_eq!(rec.choice, Identity);
        assert!((rec.ratio - 1.0001).abs() < 1e-4, "ratio = {}", rec.ratio);

        let rec = recommend_coordinate(&iv(1.0, 100.0)).unwrap();
        assert_eq!(rec.choice, Log);
        assert!((rec.ratio - 462.2).abs() < 0.1, "ratio = {}", rec.ratio);

        // scale invariance of the ratio
        let rec2 = recommend_coordinate(&iv(3.0, 300.0)).unwrap();
        assert!((rec2.ratio - rec.ratio).abs() < 1e-9);
        assert!(recommend_coordinate(&iv(-1.0, 1.0)).is_err());
    }

    #[test]
    fn product_bound_examples_and_domination() {
        let e = std::f64::consts::E;
        let four = [iv(1.0, e); 4];
        let (lb, _) = product_tail_bound(&four, 1.0).unwrap();
        assert_eq!(lb, 1.0); // 2 e^{-0.5} caps at 1
        let (lb, _) = product_tail_bound(&four, 2.0).unwrap();
        assert!((lb - 2.0 * (-2.0f64).exp()).abs() < 1e-15);
        let (lb, cb) = product_tail_bound(&four, 0.0).unwrap();
        assert_eq!((lb, cb), (1.0, 1.0));

        // log bound never exceeds the classical bound
        let mixed = [iv(1.0, 3.0), iv(0.5, 4.0), iv(2.0, 2.0), iv(10.0, 1000.0)];
        for k in 0..30 {
            let t = k as f64 * 0.37;
            let (lb, cb) = product_tail_bound(&mixed, t).unwrap();
            assert!(lb <= cb + 1e-15, "t={t}: {lb} > {cb}");
        }
        assert!(matches!(product_tail_bound(&[iv(0.0, 1.0)], 1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn max_bound_examples() {
        let e = std::f64::consts::E;
        let b = max_tail_bound(100, &iv(1.0, e), 0.5, MaxBoundMode::Log).unwrap();
        assert!((b - (-50.0f64).exp()).abs() < 1e-60);
        assert_eq!(max_tail_bound(5, &iv(1.0, e), 0.0, MaxBoundMode::Log).unwrap(), 1.0);
        let b = max_tail_bound(1, &iv(0.0, 1.0), 1.0, MaxBoundMode::Identity).unwrap();
        assert!((b - (-2.0f64).exp()).abs() < 1e-15);
        assert!(max_tail_bound(0, &iv(0.0, 1.0), 1.0, MaxBoundMode::Identity).is_err());
        assert!(max_tail_bound(1, &iv(0.0, 1.0), 1.0, MaxBoundMode::Log).is_err());
    }

    #[test]
    fn tail_report_caps_and_decreases() {
        let rep = TailBoundReport::new("sum", 0.25, 2.0, Identity, vec![]).unwrap();
        assert_eq!(rep.bound_at(0.0), 1.0);
        let mut prev = 1.0;
        for k in 0..50 {
            let t = k as f64 * 0.1;
            let b = rep.bound_at(t);
            assert!(b <= prev + 1e-15 && b <= 1.0);
            prev = b;
        }
        // degenerate sigma: point mass
        let rep = TailBoundReport::new("point", 0.0, 1.0, Identity, vec![]).unwrap();
        assert_eq!(rep.bound_at(0.0), 1.0);
        assert_eq!(rep.bound_at(0.1), 0.0);
    }
}
