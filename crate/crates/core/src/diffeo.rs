//! Strictly monotone coordinate transforms on intervals of the real line.
//!
//! Every bound in this crate is parametrized by one of these maps. The family
//! is closed under affine wrapping and composition, and contains a
//! data-driven member (the empirical Gaussianizer) built by `gaussianize`.

use crate::error::{Error, Result};
use crate::measure::EmpiricalMeasure;
use crate::special::normal_quantile;

/// A strictly monotone smooth map with forward, inverse, and derivative.
///
/// `BoxCox(0)` evaluates as `Log` exactly (dispatch on `lambda == 0`, not a
/// numeric threshold), so a lambda grid search that lands on zero is
/// reproducible.
#[derive(Debug, Clone, PartialEq)]
pub enum CoordinateTransform {
    Identity,
    /// ln x on (0, inf)
    Log,
    /// (x^lambda - 1)/lambda on (0, inf); lambda = 0 is ln x
    BoxCox(f64),
    /// ln(x/(1-x)) on (0, 1)
    Logit,
    /// arctan x on the whole line
    Arctan,
    /// scale * inner(x) + shift, scale != 0
    Affine {
        scale: f64,
        shift: f64,
        inner: Box<CoordinateTransform>,
    },
    /// Monotone piecewise-linear interpolation of knots (x_i, z_i), linear
    /// extrapolation beyond the end knots. Knots strictly increasing in both
    /// coordinates.
    EmpiricalGaussianizer { knots: Vec<(f64, f64)> },
    /// outer(inner(x)); produced by `compose`
    Composed(Box<CoordinateTransform>, Box<CoordinateTransform>),
}

use CoordinateTransform::*;

impl CoordinateTransform {
    pub fn box_cox(lambda: f64) -> Result<Self> {
        if !lambda.is_finite() {
            return Err(Error::InvalidArgument("Box-Cox lambda must be finite".into()));
        }
        Ok(BoxCox(lambda))
    }

    pub fn affine(scale: f64, shift: f64, inner: CoordinateTransform) -> Result<Self> {
        if scale == 0.0 || !scale.is_finite() || !shift.is_finite() {
            return Err(Error::InvalidArgument(
                "affine scale must be finite and nonzero, shift finite".into(),
            ));
        }
        Ok(Affine { scale, shift, inner: Box::new(inner) })
    }

    pub fn gaussianizer(knots: Vec<(f64, f64)>) -> Result<Self> {
        if knots.len() < 2 {
            return Err(Error::InvalidArgument("gaussianizer needs at least 2 knots".into()));
        }
        for w in knots.windows(2) {
            if !(w[0].0 < w[1].0 && w[0].1 < w[1].1) {
                return Err(Error::InvalidArgument(
                    "gaussianizer knots must be strictly increasing in both coordinates".into(),
                ));
            }
        }
        Ok(EmpiricalGaussianizer { knots })
    }

    /// Short display name, e.g. "log" or "boxcox(0.5)".
    pub fn name(&self) -> String {
        match self {
            Identity => "identity".into(),
            Log => "log".into(),
            BoxCox(l) => format!("boxcox({l})"),
            Logit => "logit".into(),
            Arctan => "arctan".into(),
            Affine { scale, shift, inner } => format!("{scale}*{}+{shift}", inner.name()),
            EmpiricalGaussianizer { knots } => format!("gaussianizer[{} knots]", knots.len()),
            Composed(o, i) => format!("{}.{}", o.name(), i.name()),
        }
    }

    /// Whether x is inside the domain of validity.
    pub fn contains(&self, x: f64) -> bool {
        if !x.is_finite() {
            return false;
        }
        match self {
            Identity | Arctan => true,
            Log | Logit if x <= 0.0 => false,
            Log => true,
            Logit => x < 1.0,
            BoxCox(l) => {
                if *l >= 1.0 {
                    x >= 0.0
                } else {
                    x > 0.0
                }
            }
            Affine { inner, .. } => inner.contains(x),
            EmpiricalGaussianizer { .. } => true,
            Composed(outer, inner) => {
                inner.contains(x) && inner.forward(x).map(|y| outer.contains(y)).unwrap_or(false)
            }
        }
    }

    /// Open-interval hull of the domain (endpoints may be +-inf).
    pub fn domain_interval(&self) -> (f64, f64) {
        match self {
            Identity | Arctan | EmpiricalGaussianizer { .. } => (f64::NEG_INFINITY, f64::INFINITY),
            Log | BoxCox(_) => (0.0, f64::INFINITY),
            Logit => (0.0, 1.0),
            Affine { inner, .. } => inner.domain_interval(),
            Composed(_, inner) => inner.domain_interval(),
        }
    }

    /// Open-interval hull of the image (endpoints may be +-inf).
    pub fn image_interval(&self) -> (f64, f64) {
        match self {
            Identity | Log | Logit | EmpiricalGaussianizer { .. } => {
                (f64::NEG_INFINITY, f64::INFINITY)
            }
            Arctan => (-std::f64::consts::FRAC_PI_2, std::f64::consts::FRAC_PI_2),
            BoxCox(l) => {
                if *l == 0.0 {
                    (f64::NEG_INFINITY, f64::INFINITY)
                } else if *l > 0.0 {
                    (-1.0 / l, f64::INFINITY)
                } else {
                    (f64::NEG_INFINITY, -1.0 / l)
                }
            }
            Affine { scale, shift, inner } => {
                let (lo, hi) = inner.image_interval();
                let a = scale * lo + shift;
                let b = scale * hi + shift;
                if a <= b {
                    (a, b)
                } else {
                    (b, a)
                }
            }
            Composed(outer, inner) => {
                // image of outer restricted to inner's image
                let (ilo, ihi) = inner.image_interval();
                let (dlo, dhi) = outer.domain_interval();
                let lo = ilo.max(dlo);
                let hi = ihi.min(dhi);
                let a = outer.forward_unchecked(lo);
                let b = outer.forward_unchecked(hi);
                if outer.is_increasing() {
                    (a, b)
                } else {
                    (b, a)
                }
            }
        }
    }

    // Forward evaluation without the domain check; infinite endpoints map to
    // limit values. Used only for interval bookkeeping.
    fn forward_unchecked(&self, x: f64) -> f64 {
        match self {
            Identity => x,
            Log => x.ln(),
            BoxCox(l) => {
                if *l == 0.0 {
                    x.ln()
                } else {
                    (x.powf(*l) - 1.0) / l
                }
            }
            Logit => (x / (1.0 - x)).ln(),
            Arctan => x.atan(),
            Affine { scale, shift, inner } => scale * inner.forward_unchecked(x) + shift,
            EmpiricalGaussianizer { knots } => gaussianizer_forward(knots, x),
            Composed(outer, inner) => outer.forward_unchecked(inner.forward_unchecked(x)),
        }
    }

    /// Evaluate the transform at x.
    pub fn forward(&self, x: f64) -> Result<f64> {
        if !self.contains(x) {
            return Err(Error::Domain(format!(
                "{} is not defined at x = {x}",
                self.name()
            )));
        }
        Ok(self.forward_unchecked(x))
    }

    /// Invert the transform at y; `Range` error when y is outside the image.
    pub fn inverse(&self, y: f64) -> Result<f64> {
        if !y.is_finite() {
            return Err(Error::Range(format!("inverse of {} needs a finite value", self.name())));
        }
        match self {
            Identity => Ok(y),
            Log => Ok(y.exp()),
            BoxCox(l) => {
                if *l == 0.0 {
                    return Ok(y.exp());
                }
                let base = l * y + 1.0;
                let ok = if *l >= 1.0 { base >= 0.0 } else { base > 0.0 };
                if !ok {
                    return Err(Error::Range(format!(
                        "boxcox({l}) image requires {} y = {}",
                        if *l > 0.0 { "y >" } else { "y <" },
                        -1.0 / l
                    )));
                }
                Ok(base.powf(1.0 / l))
            }
            Logit => Ok(1.0 / (1.0 + (-y).exp())),
            Arctan => {
                if y.abs() >= std::f64::consts::FRAC_PI_2 {
                    return Err(Error::Range("arctan image is (-pi/2, pi/2)".into()));
                }
                Ok(y.tan())
            }
            Affine { scale, shift, inner } => inner.inverse((y - shift) / scale),
            EmpiricalGaussianizer { knots } => Ok(gaussianizer_inverse(knots, y)),
            Composed(outer, inner) => inner.inverse(outer.inverse(y)?),
        }
    }

    /// First derivative at x.
    pub fn derivative(&self, x: f64) -> Result<f64> {
        if !self.contains(x) {
            return Err(Error::Domain(format!(
                "{} is not defined at x = {x}",
                self.name()
            )));
        }
        Ok(match self {
            Identity => 1.0,
            Log => 1.0 / x,
            BoxCox(l) => {
                if *l == 0.0 {
                    1.0 / x
                } else {
                    x.powf(l - 1.0)
                }
            }
            Logit => 1.0 / (x * (1.0 - x)),
            Arctan => 1.0 / (1.0 + x * x),
            Affine { scale, inner, .. } => scale * inner.derivative(x)?,
            EmpiricalGaussianizer { knots } => gaussianizer_slope(knots, x),
            Composed(outer, inner) => {
                let y = inner.forward(x)?;
                outer.derivative(y)? * inner.derivative(x)?
            }
        })
    }

    /// Whether the map is strictly increasing (false means strictly
    /// decreasing; an affine wrap with negative scale flips direction).
    pub fn is_increasing(&self) -> bool {
        match self {
            Identity | Log | BoxCox(_) | Logit | Arctan | EmpiricalGaussianizer { .. } => true,
            Affine { scale, inner, .. } => (*scale > 0.0) == inner.is_increasing(),
            Composed(outer, inner) => outer.is_increasing() == inner.is_increasing(),
        }
    }

    /// self after `inner`: x -> self(inner(x)).
    ///
    /// Errors when the image of `inner` misses the domain of `self`
    /// entirely. The result evaluates the two maps in sequence, so the
    /// composition law for derived quantities holds with exact arithmetic.
    pub fn compose(&self, inner: &CoordinateTransform) -> Result<CoordinateTransform> {
        let (ilo, ihi) = inner.image_interval();
        let (dlo, dhi) = self.domain_interval();
        if ihi <= dlo || ilo >= dhi {
            return Err(Error::Domain(format!(
                "image of {} does not meet domain of {}",
                inner.name(),
                self.name()
            )));
        }
        Ok(match (self, inner) {
            (outer, Identity) => outer.clone(),
            (Identity, inner) => inner.clone(),
            (Affine { scale, shift, inner: mid }, inner) => Affine {
                scale: *scale,
                shift: *shift,
                inner: Box::new(mid.compose(inner)?),
            },
            (outer, inner) => Composed(Box::new(outer.clone()), Box::new(inner.clone())),
        })
    }
}

fn gaussianizer_forward(knots: &[(f64, f64)], x: f64) -> f64 {
    let n = knots.len();
    // segment index: knots[i] <= x < knots[i+1], clamped to end segments
    let i = match knots.partition_point(|k| k.0 <= x) {
        0 => 0,
        p if p >= n => n - 2,
        p => p - 1,
    };
    let (x0, z0) = knots[i];
    let (x1, z1) = knots[i + 1];
    z0 + (x - x0) * (z1 - z0) / (x1 - x0)
}

fn gaussianizer_inverse(knots: &[(f64, f64)], z: f64) -> f64 {
    let n = knots.len();
    let i = match knots.partition_point(|k| k.1 <= z) {
        0 => 0,
        p if p >= n => n - 2,
        p => p - 1,
    };
    let (x0, z0) = knots[i];
    let (x1, z1) = knots[i + 1];
    x0 + (z - z0) * (x1 - x0) / (z1 - z0)
}

fn gaussianizer_slope(knots: &[(f64, f64)], x: f64) -> f64 {
    let n = knots.len();
    let i = match knots.partition_point(|k| k.0 <= x) {
        0 => 0,
        p if p >= n => n - 2,
        p => p - 1,
    };
    let (x0, z0) = knots[i];
    let (x1, z1) = knots[i + 1];
    (z1 - z0) / (x1 - x0)
}

/// A closed interval [a, b]; the support declared for a bounded variable.
///
/// Degenerate intervals (a = b) are allowed so that bound formulas can take
/// their point-mass limit; operations that require a < b check it themselves.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SupportInterval {
    pub a: f64,
    pub b: f64,
}

impl SupportInterval {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !a.is_finite() || !b.is_finite() {
            return Err(Error::InvalidArgument("interval endpoints must be finite".into()));
        }
        if a > b {
            return Err(Error::InvalidArgument(format!("interval requires a <= b, got [{a}, {b}]")));
        }
        Ok(Self { a, b })
    }

    pub fn width(&self) -> f64 {
        self.b - self.a
    }

    pub fn is_degenerate(&self) -> bool {
        self.a == self.b
    }

    /// r = b/a; requires a > 0.
    pub fn ratio(&self) -> Result<f64> {
        if self.a <= 0.0 {
            return Err(Error::Domain(format!("ratio b/a requires a > 0, got a = {}", self.a)));
        }
        Ok(self.b / self.a)
    }
}

/// Build the empirical Gaussianizer from a sample.
///
/// Knots are (x_(i), Phi^-1((i - 0.5)/n)) over the sorted sample; duplicate
/// values collapse to one knot at the mean of their Phi^-1 ranks, which keeps
/// the knot sequence strictly increasing. With offset ranks the end knots are
/// finite, and linear extrapolation with the end-segment slopes keeps the
/// transform a bijection of the line.
///
/// For weighted input, ranks are cumulative-weight midpoints, which reduces
/// to (i - 0.5)/n for uniform weights.
pub fn gaussianize(samples: &EmpiricalMeasure) -> Result<CoordinateTransform> {
    let n = samples.len();
    if n < 10 {
        return Err(Error::InsufficientData { needed: 10, got: n });
    }

    // rank of each point: (W_{i-1} + w_i/2), exact (i-0.5)/n when uniform
    let uniform = samples.has_uniform_weights();
    let nf = n as f64;
    let mut ranks = Vec::with_capacity(n);
    if uniform {
        for i in 0..n {
            ranks.push((i as f64 + 0.5) / nf);
        }
    } else {
        let mut acc = 0.0;
        for &w in samples.weights() {
            ranks.push(acc + 0.5 * w);
            acc += w;
        }
    }

    // collapse ties: one knot per distinct value at the mean of the
    // Phi^-1 ranks of its occurrences (weighted mean when weighted)
    let pts = samples.points();
    let wts = samples.weights();
    let mut knots: Vec<(f64, f64)> = Vec::new();
    let mut i = 0;
    while i < n {
        let mut j = i;
        let mut zsum = 0.0;
        let mut wsum = 0.0;
        while j < n && pts[j] == pts[i] {
            let w = if uniform { 1.0 } else { wts[j] };
            zsum += w * normal_quantile(ranks[j]);
            wsum += w;
            j += 1;
        }
        if wsum > 0.0 {
            knots.push((pts[i], zsum / wsum));
        }
        i = j;
    }

    if knots.len() < 10 {
        return Err(Error::DegenerateData(format!(
            "need at least 10 distinct values, got {}",
            knots.len()
        )));
    }
    CoordinateTransform::gaussianizer(knots)
}
