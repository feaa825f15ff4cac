//! Wasserstein distances between 1-D empirical measures in transformed
//! coordinates, computed exactly by the monotone quantile coupling.
//!
//! A measure satisfying the transport-entropy inequality
//! W2(nu, mu) <= sqrt(2c D(nu||mu)) in psi-coordinates gives every
//! psi-Lipschitz function the tail bound exp(-t^2/(c L^2)) with no
//! dependence on dimension; `t2_check` verifies the inequality (with c = 1)
//! on the Gaussian shift pair, where both sides are |shift| exactly.

use crate::diffeo::{gaussianize, CoordinateTransform};
use crate::error::{Error, Result};
use crate::measure::EmpiricalMeasure;
use crate::rng::{stream_rng, unit_open};
use crate::special::normal_quantile;

/// The monotone (quantile) coupling of two 1-D measures: point pairs with
/// the mass moved between them, ordered by quantile level. In one dimension
/// this plan attains the optimal transport cost for every convex ground
/// cost, so distances reduce to a finite sum over its segments.
#[derive(Debug, Clone)]
pub struct Coupling1D {
    segments: Vec<(f64, f64, f64)>, // (mass, left point, right point)
}

impl Coupling1D {
    /// Pair the quantile functions over their merged breakpoint partition.
    pub fn monotone(mu: &EmpiricalMeasure, nu: &EmpiricalMeasure) -> Self {
        let (xp, xw) = (mu.points(), mu.weights());
        let (yp, yw) = (nu.points(), nu.weights());
        let mut segments = Vec::with_capacity(xp.len() + yp.len());
        let mut i = 0;
        let mut j = 0;
        let mut cum_x = xw[0];
        let mut cum_y = yw[0];
        let mut level = 0.0f64;
        loop {
            let next = cum_x.min(cum_y).min(1.0);
            let seg = next - level;
            if seg > 0.0 {
                segments.push((seg, xp[i], yp[j]));
            }
            level = next;
            if level >= 1.0 && i + 1 >= xp.len() && j + 1 >= yp.len() {
                break;
            }
            let advance_x = cum_x <= cum_y;
            let advance_y = cum_y <= cum_x;
            if advance_x && i + 1 < xp.len() {
                i += 1;
                cum_x += xw[i];
            } else if advance_x {
                cum_x = f64::INFINITY;
            }
            if advance_y && j + 1 < yp.len() {
                j += 1;
                cum_y += yw[j];
            } else if advance_y {
                cum_y = f64::INFINITY;
            }
            if cum_x == f64::INFINITY && cum_y == f64::INFINITY {
                // both walks exhausted; close the last segment to level 1
                let seg = 1.0 - level;
                if seg > 0.0 {
                    segments.push((seg, xp[xp.len() - 1], yp[yp.len() - 1]));
                }
                break;
            }
        }
        Self { segments }
    }

    /// (mass, left point, right point) triples in quantile order.
    pub fn segments(&self) -> &[(f64, f64, f64)] {
        &self.segments
    }

    /// sum of mass * |x - y|^p over the plan.
    pub fn cost(&self, p: f64) -> f64 {
        self.segments
            .iter()
            .map(|(m, x, y)| m * (x - y).abs().powf(p))
            .sum()
    }
}

/// W_p distance between the pushforwards of `mu` and `nu` through `t`.
///
/// The quantile functions of weighted empirical measures are
/// right-continuous step functions, so the coupling integral
/// (int_0^1 |psi(Q_mu(u)) - psi(Q_nu(u))|^p du)^(1/p)
/// is a finite sum over the merged breakpoint partition; no sampling error.
pub fn psi_wasserstein(
    mu: &EmpiricalMeasure,
    nu: &EmpiricalMeasure,
    t: &CoordinateTransform,
    p: f64,
) -> Result<f64> {
    if !(p >= 1.0) || !p.is_finite() {
        return Err(Error::InvalidArgument(format!("order p must be >= 1, got {p}")));
    }
    let mu_t = mu.push(t)?;
    let nu_t = nu.push(t)?;
    Ok(Coupling1D::monotone(&mu_t, &nu_t).cost(p).powf(1.0 / p))
}

/// Outcome of the transport-entropy comparison on the Gaussian shift pair.
#[derive(Debug, Clone)]
pub struct T2Report {
    /// exact W2 between N(0,1) and N(shift,1): |shift|
    pub lhs: f64,
    /// sqrt(2 KL(N(shift,1) || N(0,1))) = |shift|
    pub rhs: f64,
    /// lhs <= rhs + 1e-12
    pub holds: bool,
    /// Monte Carlo W2 through a fitted Gaussianizer, when requested
    pub empirical_w2: Option<f64>,
    /// |empirical_w2 - lhs|
    pub mc_gap: Option<f64>,
}

// fixed seed for the Monte Carlo side; the closed-form side is exact either way
const T2_SEED: u64 = 0x7f4a_9c13;

/// Check the transport-entropy inequality W2 <= sqrt(2 KL) on the pair
/// nu = N(shift,1), mu = N(0,1), where both sides are |shift| in closed form
/// (the inequality is tight here).
///
/// With `n_report` >= 10 the check also draws that many samples per side,
/// fits the Gaussianizer to the mu sample, evaluates the empirical
/// psi-Wasserstein distance, and reports the Monte Carlo gap.
pub fn t2_check(shift: f64, n_report: usize) -> Result<T2Report> {
    let lhs = shift.abs();
    let kl = shift * shift / 2.0;
    let rhs = (2.0 * kl).sqrt();
    let holds = lhs <= rhs + 1e-12;

    let (empirical_w2, mc_gap) = if n_report >= 10 {
        let mut rng_mu = stream_rng(T2_SEED, 0);
        let mut rng_nu = stream_rng(T2_SEED, 1);
        let mu_pts: Vec<f64> = (0..n_report)
            .map(|_| normal_quantile(unit_open(&mut rng_mu)))
            .collect();
        let nu_pts: Vec<f64> = (0..n_report)
            .map(|_| shift + normal_quantile(unit_open(&mut rng_nu)))
            .collect();
        let mu = EmpiricalMeasure::from_samples(mu_pts)?;
        let nu = EmpiricalMeasure::from_samples(nu_pts)?;
        let psi_hat = gaussianize(&mu)?;
        let w2 = psi_wasserstein(&mu, &nu, &psi_hat, 2.0)?;
        (Some(w2), Some((w2 - lhs).abs()))
    } else {
        (None, None)
    };

    Ok(T2Report { lhs, rhs, holds, empirical_w2, mc_gap })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diffeo::CoordinateTransform::*;
    use rand_chacha::rand_core::RngCore;

    fn uniform(points: Vec<f64>) -> EmpiricalMeasure {
        EmpiricalMeasure::from_samples(points).unwrap()
    }

    // brute-force minimum over all n! permutation couplings of equal-weight
    // measures; the independent oracle for the quantile solver
    fn brute_force_wp(xs: &[f64], ys: &[f64], t: &CoordinateTransform, p: f64) -> f64 {
        fn permutations(n: usize) -> Vec<Vec<usize>> {
            if n == 1 {
                return vec![vec![0]];
            }
            let mut out = Vec::new();
            for perm in permutations(n - 1) {
                for pos in 0..n {
                    let mut v = perm.clone();
                    v.insert(pos, n - 1);
                    out.push(v);
                }
            }
            out
        }
        let n = xs.len();
        let tx: Vec<f64> = xs.iter().map(|&x| t.forward(x).unwrap()).collect();
        let ty: Vec<f64> = ys.iter().map(|&y| t.forward(y).unwrap()).collect();
        let mut best = f64::INFINITY;
        for perm in permutations(n) {
            let cost: f64 = (0..n)
                .map(|i| (tx[i] - ty[perm[i]]).abs().powf(p) / n as f64)
                .sum();
            best = best.min(cost);
        }
        best.powf(1.0 / p)
    }

    #[test]
    fn identical_measures_have_zero_distance() {
        let m = uniform(vec![0.5, 1.0, 2.0, 7.0]);
        for p in [1.0, 2.0, 3.5] {
            assert_eq!(psi_wasserstein(&m, &m, &Log, p).unwrap(), 0.0);
            assert_eq!(psi_wasserstein(&m, &m, &Identity, p).unwrap(), 0.0);
        }
    }

    #[test]
    fn point_masses_reduce_to_transformed_distance() {
        let x = uniform(vec![2.0]);
        let y = uniform(vec![8.0]);
        let d = psi_wasserstein(&x, &y, &Log, 2.0).unwrap();
        assert!((d - (8.0f64.ln() - 2.0f64.ln())).abs() < 1e-15);
    }

    #[test]
    fn shifted_uniform_pair_quantile_shift() {
        let mu = uniform(vec![0.0, 1.0]);
        let nu = uniform(vec![1.0, 2.0]);
        let d = psi_wasserstein(&mu, &nu, &Identity, 1.0).unwrap();
        assert!((d - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_p_below_one() {
        let m = uniform(vec![1.0, 2.0]);
        assert!(psi_wasserstein(&m, &m, &Identity, 0.5).is_err());
    }

    #[test]
    fn quantile_value_matches_permutation_oracle() {
        let mut rng = stream_rng(31, 0);
        for case in 0..60 {
            let n = 1 + (rng.next_u64() % 6) as usize;
            let xs: Vec<f64> = (0..n).map(|_| unit_open(&mut rng) * 4.0 + 0.5).collect();
            let ys: Vec<f64> = (0..n).map(|_| unit_open(&mut rng) * 4.0 + 0.5).collect();
            let t = match case % 3 {
                0 => Identity,
                1 => Log,
                _ => BoxCox(0.5),
            };
            let p = [1.0, 2.0, 3.0][case % 3];
            let mu = uniform(xs.clone());
            let nu = uniform(ys.clone());
            let fast = psi_wasserstein(&mu, &nu, &t, p).unwrap();
            let slow = brute_force_wp(&xs, &ys, &t, p);
            assert!(
                (fast - slow).abs() <= 1e-12 * slow.max(1.0),
                "case {case}: quantile {fast} vs brute force {slow}"
            );
        }
    }

    #[test]
    fn monotone_coupling_preserves_marginals_and_order() {
        let mut rng = stream_rng(30, 0);
        for _ in 0..20 {
            let na = 1 + (rng.next_u64() % 8) as usize;
            let nb = 1 + (rng.next_u64() % 8) as usize;
            let mu = uniform((0..na).map(|_| unit_open(&mut rng) * 5.0).collect());
            let nu = uniform((0..nb).map(|_| unit_open(&mut rng) * 5.0).collect());
            let plan = Coupling1D::monotone(&mu, &nu);
            // marginal mass per left point matches its weight
            for (k, &x) in mu.points().iter().enumerate() {
                let mass: f64 = plan
                    .segments()
                    .iter()
                    .filter(|(_, l, _)| *l == x)
                    .map(|(m, _, _)| m)
                    .sum();
                // ties collapse onto one point; compare cumulative weight then
                let expected: f64 = mu
                    .points()
                    .iter()
                    .zip(mu.weights())
                    .filter(|(px, _)| **px == x)
                    .map(|(_, pw)| pw)
                    .sum();
                assert!((mass - expected).abs() < 1e-12, "point {k}");
            }
            // both coordinates are nondecreasing along the plan
            for w in plan.segments().windows(2) {
                assert!(w[0].1 <= w[1].1 && w[0].2 <= w[1].2);
            }
            let total: f64 = plan.segments().iter().map(|(m, _, _)| m).sum();
            assert!((total - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn weighted_measures_merge_partitions_correctly() {
        // mu = 0.75 at 0, 0.25 at 1; nu = 0.25 at 0, 0.75 at 1
        let mu = EmpiricalMeasure::new(vec![0.0, 1.0], vec![0.75, 0.25]).unwrap();
        let nu = EmpiricalMeasure::new(vec![0.0, 1.0], vec![0.25, 0.75]).unwrap();
        // quantiles differ exactly on (0.25, 0.75]
        let d1 = psi_wasserstein(&mu, &nu, &Identity, 1.0).unwrap();
        assert!((d1 - 0.5).abs() < 1e-15);
    }

    #[test]
    fn pushforward_identity_is_exact() {
        let mut rng = stream_rng(32, 0);
        for t in [Log, BoxCox(0.5), Arctan] {
            let xs: Vec<f64> = (0..25).map(|_| unit_open(&mut rng) * 5.0 + 0.1).collect();
            let ys: Vec<f64> = (0..40).map(|_| unit_open(&mut rng) * 5.0 + 0.1).collect();
            let mu = uniform(xs);
            let nu = uniform(ys);
            for p in [1.0, 2.0] {
                let lhs = psi_wasserstein(&mu, &nu, &t, p).unwrap();
                let rhs = psi_wasserstein(
                    &mu.push(&t).unwrap(),
                    &nu.push(&t).unwrap(),
                    &Identity,
                    p,
                )
                .unwrap();
                assert_eq!(lhs, rhs, "pushforward identity for {}", t.name());
            }
        }
    }

    #[test]
    fn affine_wrap_scales_distance_by_abs_alpha() {
        let mut rng = stream_rng(33, 0);
        let mu = uniform((0..15).map(|_| unit_open(&mut rng) * 3.0 + 0.2).collect());
        let nu = uniform((0..9).map(|_| unit_open(&mut rng) * 3.0 + 0.2).collect());
        for (alpha, beta) in [(2.0, 0.0), (-1.5, 4.0), (0.1, -2.0)] {
            let wrapped = CoordinateTransform::affine(alpha, beta, Log).unwrap();
            let lhs = psi_wasserstein(&mu, &nu, &wrapped, 2.0).unwrap();
            let rhs = alpha.abs() * psi_wasserstein(&mu, &nu, &Log, 2.0).unwrap();
            assert!(
                (lhs - rhs).abs() <= 1e-12 * rhs.max(1.0),
                "alpha={alpha}: {lhs} vs {rhs}"
            );
        }
    }

    #[test]
    fn metric_axioms_on_random_triples() {
        let mut rng = stream_rng(34, 0);
        for _ in 0..200 {
            let len = |rng: &mut rand_chacha::ChaCha12Rng| 1 + (rng.next_u64() % 20) as usize;
            let draw = |rng: &mut rand_chacha::ChaCha12Rng, n: usize| -> Vec<f64> {
                (0..n).map(|_| unit_open(rng) * 6.0 + 0.1).collect()
            };
            let (na, nb, nc) = (len(&mut rng), len(&mut rng), len(&mut rng));
            let a = uniform(draw(&mut rng, na));
            let b = uniform(draw(&mut rng, nb));
            let c = uniform(draw(&mut rng, nc));
            let dab = psi_wasserstein(&a, &b, &Log, 2.0).unwrap();
            let dba = psi_wasserstein(&b, &a, &Log, 2.0).unwrap();
            assert_eq!(dab, dba, "symmetry");
            let dac = psi_wasserstein(&a, &c, &Log, 2.0).unwrap();
            let dcb = psi_wasserstein(&c, &b, &Log, 2.0).unwrap();
            assert!(dab <= dac + dcb + 1e-10, "triangle: {dab} > {dac} + {dcb}");
        }
    }

    #[test]
    fn t2_closed_form_is_tight() {
        for shift in [0.0, 0.5, -0.5, 1.0, -1.0, 2.0, -2.0] {
            let rep = t2_check(shift, 0).unwrap();
            assert!((rep.lhs - shift.abs()).abs() <= 1e-12);
            assert!((rep.rhs - shift.abs()).abs() <= 1e-12);
            assert!(rep.holds);
            assert!(rep.empirical_w2.is_none());
        }
    }

    #[test]
    fn t2_empirical_gap_is_small() {
        let rep = t2_check(1.0, 4000).unwrap();
        let gap = rep.mc_gap.unwrap();
        assert!(gap < 0.1, "Monte Carlo gap {gap}");
        assert!(rep.holds);
    }
}
