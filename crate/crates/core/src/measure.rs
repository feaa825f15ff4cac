//! Weighted empirical measures on the real line.

use crate::diffeo::CoordinateTransform;
use crate::error::{Error, Result};

/// A finite weighted sample: points sorted ascending, nonnegative weights
/// summing to one. The concrete stand-in for a probability measure.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalMeasure {
    points: Vec<f64>,
    weights: Vec<f64>,
}

impl EmpiricalMeasure {
    /// Equal-weight measure from raw samples (sorted internally).
    pub fn from_samples(mut samples: Vec<f64>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::EmptySample);
        }
        if samples.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidArgument("sample contains a non-finite value".into()));
        }
        samples.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let w = 1.0 / samples.len() as f64;
        let weights = vec![w; samples.len()];
        Ok(Self { points: samples, weights })
    }

    /// Weighted measure; points and weights are sorted together by point.
    pub fn new(points: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::EmptySample);
        }
        if points.len() != weights.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} points vs {} weights",
                points.len(),
                weights.len()
            )));
        }
        if points.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidArgument("point is not finite".into()));
        }
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::InvalidArgument("weights must be finite and >= 0".into()));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidArgument(format!(
                "weights sum to {total}, expected 1 within 1e-12"
            )));
        }
        let mut pairs: Vec<(f64, f64)> = points.into_iter().zip(weights).collect();
        pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        let (points, weights) = pairs.into_iter().unzip();
        Ok(Self { points, weights })
    }

    // Internal constructor that preserves the exact values handed in.
    // Callers guarantee sortedness; used where bit-exact arithmetic paths
    // matter (pushforward identities).
    pub(crate) fn from_sorted_unchecked(points: Vec<f64>, weights: Vec<f64>) -> Self {
        debug_assert!(points.windows(2).all(|w| w[0] <= w[1]));
        Self { points, weights }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// True when every weight equals every other bit-for-bit.
    pub fn has_uniform_weights(&self) -> bool {
        self.weights.windows(2).all(|w| w[0] == w[1])
    }

    pub fn min(&self) -> f64 {
        self.points[0]
    }

    pub fn max(&self) -> f64 {
        *self.points.last().unwrap()
    }

    pub fn mean(&self) -> f64 {
        self.points
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| x * w)
            .sum()
    }

    /// Weighted variance around the weighted mean.
    pub fn variance(&self) -> f64 {
        let m = self.mean();
        self.points
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| w * (x - m) * (x - m))
            .sum()
    }

    /// Right-continuous quantile: smallest point whose cumulative weight
    /// reaches `u` (u in (0, 1]).
    pub fn quantile(&self, u: f64) -> f64 {
        debug_assert!(u > 0.0 && u <= 1.0);
        let mut acc = 0.0;
        for (x, w) in self.points.iter().zip(&self.weights) {
            acc += w;
            if acc >= u {
                return *x;
            }
        }
        self.max()
    }

    /// Precomputed cumulative weights for repeated quantile lookups.
    pub fn quantile_table(&self) -> QuantileTable<'_> {
        let mut cum = Vec::with_capacity(self.len());
        let mut acc = 0.0;
        for &w in &self.weights {
            acc += w;
            cum.push(acc);
        }
        QuantileTable { measure: self, cum }
    }

    /// Pushforward through a transform: maps every point, keeps weights.
    ///
    /// The weight vector is carried over untouched so that distances and
    /// functionals computed on the pushforward follow the exact same
    /// arithmetic path as the transformed originals.
    pub fn push(&self, t: &CoordinateTransform) -> Result<Self> {
        let mut mapped = Vec::with_capacity(self.len());
        for &x in &self.points {
            mapped.push(t.forward(x)?);
        }
        let mut weights = self.weights.clone();
        if !t.is_increasing() {
            mapped.reverse();
            weights.reverse();
        }
        Ok(Self::from_sorted_unchecked(mapped, weights))
    }
}

/// Binary-search quantile lookups against a fixed measure.
pub struct QuantileTable<'a> {
    measure: &'a EmpiricalMeasure,
    cum: Vec<f64>,
}

impl QuantileTable<'_> {
    /// Same right-continuous quantile as [`EmpiricalMeasure::quantile`],
    /// in O(log n).
    pub fn quantile(&self, u: f64) -> f64 {
        debug_assert!(u > 0.0 && u <= 1.0);
        let i = self.cum.partition_point(|&c| c < u);
        self.measure.points()[i.min(self.measure.len() - 1)]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn from_samples_sorts_and_normalizes() {
        let m = EmpiricalMeasure::from_samples(vec![3.0, 1.0, 2.0]).unwrap();
        assert_eq!(m.points(), &[1.0, 2.0, 3.0]);
        assert!((m.weights().iter().sum::<f64>() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_weights() {
        assert!(EmpiricalMeasure::new(vec![1.0, 2.0], vec![0.6, 0.6]).is_err());
        assert!(EmpiricalMeasure::new(vec![1.0, 2.0], vec![-0.5, 1.5]).is_err());
        assert!(EmpiricalMeasure::new(vec![], vec![]).is_err());
    }

    #[test]
    fn quantile_is_right_continuous_step() {
        let m = EmpiricalMeasure::new(vec![1.0, 2.0, 3.0], vec![0.25, 0.5, 0.25]).unwrap();
        assert_eq!(m.quantile(0.1), 1.0);
        assert_eq!(m.quantile(0.25), 1.0);
        assert_eq!(m.quantile(0.26), 2.0);
        assert_eq!(m.quantile(0.75), 2.0);
        assert_eq!(m.quantile(1.0), 3.0);
    }

    #[test]
    fn push_through_log_reindexes_points() {
        let m = EmpiricalMeasure::from_samples(vec![1.0, std::f64::consts::E]).unwrap();
        let p = m.push(&CoordinateTransform::Log).unwrap();
        assert_eq!(p.points()[0], 0.0);
        assert!((p.points()[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn mean_and_variance_weighted() {
        let m = EmpiricalMeasure::new(vec![0.0, 1.0], vec![0.5, 0.5]).unwrap();
        assert!((m.mean() - 0.5).abs() < 1e-15);
        assert!((m.variance() - 0.25).abs() < 1e-15);
    }
}
