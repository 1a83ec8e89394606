//! Weights on the Gauss space and their exact heat-semigroup averages.

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use statrs::function::erf::erfc;
use std::f64::consts::SQRT_2;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Largest `|a|` accepted by Gauss–Hermite inner products against `e^{ax}`.
pub const MAX_QUADRATURE_SLOPE: f64 = 2.0;

/// Symbolic weight `ω > 0`.
///
/// String grammar: `const:c=<v>`, `exp:a=<v>` (the weight `e^{ax}`) and
/// `trunc:n=<k>:<inner>` (the inner weight clamped to `[1/k, k]`).
#[derive(Debug, Clone, PartialEq)]
pub enum WeightSpec {
    Constant(f64),
    ExpLinear(f64),
    Truncated { base: Box<WeightSpec>, n: u32 },
}

impl WeightSpec {
    pub fn constant(c: f64) -> Result<Self> {
        let w = WeightSpec::Constant(c);
        w.validate()?;
        Ok(w)
    }

    pub fn exp_linear(a: f64) -> Result<Self> {
        let w = WeightSpec::ExpLinear(a);
        w.validate()?;
        Ok(w)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            WeightSpec::Constant(c) if !(c.is_finite() && *c > 0.0) => {
                Err(Error::InvalidParameter(format!("constant weight must be finite and > 0, got {c}")))
            }
            WeightSpec::ExpLinear(a) if !a.is_finite() => {
                Err(Error::InvalidParameter(format!("exponential slope must be finite, got {a}")))
            }
            WeightSpec::Truncated { n: 0, .. } => Err(Error::InvalidParameter("truncation level must be >= 1".into())),
            WeightSpec::Truncated { base, .. } => base.validate(),
            _ => Ok(()),
        }
    }

    /// Pointwise value `ω(x)`.
    pub fn eval(&self, x: f64) -> f64 {
        self.profile().eval(x)
    }

    /// `ω⁻¹`; truncation commutes with inversion at the same level.
    pub fn inverse(&self) -> WeightSpec {
        match self {
            WeightSpec::Constant(c) => WeightSpec::Constant(1.0 / c),
            WeightSpec::ExpLinear(a) => WeightSpec::ExpLinear(-a),
            WeightSpec::Truncated { base, n } => WeightSpec::Truncated { base: Box::new(base.inverse()), n: *n },
        }
    }

    /// Slope `a` of the underlying exponential (zero for constants).
    pub fn slope(&self) -> f64 {
        self.profile().slope
    }

    /// Gauss–Hermite order used by default for inner products against this weight.
    pub fn default_quad_order(&self) -> usize {
        if self.slope() == 0.0 {
            80
        } else {
            160
        }
    }

    /// Every weight of the grammar is `clamp(c e^{ax}, lo, hi)`.
    pub fn profile(&self) -> ClampedExp {
        match self {
            WeightSpec::Constant(c) => ClampedExp { scale: *c, slope: 0.0, lo: 0.0, hi: f64::INFINITY },
            WeightSpec::ExpLinear(a) => ClampedExp { scale: 1.0, slope: *a, lo: 0.0, hi: f64::INFINITY },
            WeightSpec::Truncated { base, n } => {
                let inner = base.profile();
                let n = f64::from(*n);
                ClampedExp { lo: inner.lo.max(1.0 / n), hi: inner.hi.min(n), ..inner }
            }
        }
    }

    /// `e^{sL} ω (x)`, computed exactly from the Mehler average
    /// `∫ ω(x e^{−s} + √(1 − e^{−2s}) y) dγ(y)`.
    pub fn heat_mean(&self, x: f64, s: f64) -> f64 {
        self.profile().heat_mean(x, s)
    }

    /// `∫ ω dγ`.
    pub fn mean(&self) -> f64 {
        self.profile().gaussian_mean(0.0, 1.0)
    }
}

/// Two-sided truncation `ω_n`.
pub fn truncate_weight(w: &WeightSpec, n: u32) -> Result<WeightSpec> {
    let t = WeightSpec::Truncated { base: Box::new(w.clone()), n };
    t.validate()?;
    Ok(t)
}

/// `x ↦ clamp(scale · e^{slope·x}, lo, hi)` with `0 ≤ lo ≤ 1 ≤ hi ≤ ∞`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClampedExp {
    pub scale: f64,
    pub slope: f64,
    pub lo: f64,
    pub hi: f64,
}

fn norm_cdf(z: f64) -> f64 {
    0.5 * erfc(-z / SQRT_2)
}

fn norm_sf(z: f64) -> f64 {
    0.5 * erfc(z / SQRT_2)
}

/// `P(a < Y < b)` for `Y ~ N(0, 1)`, accurate in both tails.
fn normal_interval(a: f64, b: f64) -> f64 {
    if a >= b {
        0.0
    } else if a >= 0.0 {
        norm_sf(a) - norm_sf(b)
    } else if b <= 0.0 {
        norm_cdf(b) - norm_cdf(a)
    } else {
        1.0 - norm_cdf(a) - norm_sf(b)
    }
}

impl ClampedExp {
    pub fn eval(&self, x: f64) -> f64 {
        (self.scale * (self.slope * x).exp()).clamp(self.lo, self.hi)
    }

    /// `E[clamp(scale · e^{slope (mu + sigma Y)}, lo, hi)]`, `Y ~ N(0, 1)`.
    pub fn gaussian_mean(&self, mu: f64, sigma: f64) -> f64 {
        let m = self.scale.ln() + self.slope * mu;
        let v = self.slope.abs() * sigma;
        if v == 0.0 {
            return m.exp().clamp(self.lo, self.hi);
        }
        let alpha = if self.lo > 0.0 { (self.lo.ln() - m) / v } else { f64::NEG_INFINITY };
        let beta = if self.hi.is_finite() { (self.hi.ln() - m) / v } else { f64::INFINITY };
        let mut total = (m + 0.5 * v * v).exp() * normal_interval(alpha - v, beta - v);
        if self.lo > 0.0 {
            total += self.lo * norm_cdf(alpha);
        }
        if self.hi.is_finite() {
            total += self.hi * norm_sf(beta);
        }
        total
    }

    pub fn heat_mean(&self, x: f64, s: f64) -> f64 {
        if s <= 0.0 {
            return self.eval(x);
        }
        let sigma = (-(-2.0 * s).exp_m1()).sqrt();
        self.gaussian_mean(x * (-s).exp(), sigma)
    }
}

impl fmt::Display for WeightSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WeightSpec::Constant(c) => write!(f, "const:c={c}"),
            WeightSpec::ExpLinear(a) => write!(f, "exp:a={a}"),
            WeightSpec::Truncated { base, n } => write!(f, "trunc:n={n}:{base}"),
        }
    }
}

fn parse_err(input: &str, reason: impl Into<String>) -> Error {
    Error::Parse { input: input.to_string(), reason: reason.into() }
}

impl FromStr for WeightSpec {
    type Err = Error;

    fn from_str(input: &str) -> Result<Self> {
        let s = input.trim();
        let spec = if let Some(rest) = s.strip_prefix("const:c=") {
            WeightSpec::Constant(rest.parse().map_err(|_| parse_err(input, "bad constant value"))?)
        } else if let Some(rest) = s.strip_prefix("exp:a=") {
            WeightSpec::ExpLinear(rest.parse().map_err(|_| parse_err(input, "bad exponential slope"))?)
        } else if let Some(rest) = s.strip_prefix("trunc:n=") {
            let (level, inner) =
                rest.split_once(':').ok_or_else(|| parse_err(input, "expected trunc:n=<k>:<inner>"))?;
            let n: u32 = level.parse().map_err(|_| parse_err(input, "bad truncation level"))?;
            WeightSpec::Truncated { base: Box::new(inner.parse()?), n }
        } else {
            return Err(parse_err(input, "expected const:c=<v>, exp:a=<v> or trunc:n=<k>:<inner>"));
        };
        spec.validate().map_err(|e| parse_err(input, e.to_string()))?;
        Ok(spec)
    }
}

impl Serialize for WeightSpec {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for WeightSpec {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::GaussHermite;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn truncation_examples() {
        let w = truncate_weight(&WeightSpec::ExpLinear(1.0), 2).unwrap();
        assert_eq!(w.eval(5.0), 2.0);
        assert_eq!(w.eval(0.0), 1.0);
        assert_eq!(w.eval(-5.0), 0.5);
        let c = truncate_weight(&WeightSpec::Constant(1.0), 7).unwrap();
        for x in [-3.0, 0.0, 9.0] {
            assert_eq!(c.eval(x), 1.0);
        }
        assert!(truncate_weight(&WeightSpec::Constant(1.0), 0).is_err());
    }

    #[test]
    fn inverse_of_truncation_is_truncation_of_inverse() {
        let w = truncate_weight(&WeightSpec::ExpLinear(1.3), 3).unwrap();
        let inv = w.inverse();
        for x in [-4.0, -1.0, 0.2, 0.9, 5.0] {
            assert_relative_eq!(inv.eval(x), 1.0 / w.eval(x), max_relative = 1e-15);
        }
    }

    #[test]
    fn grammar() {
        for s in ["const:c=2.5", "exp:a=-1", "trunc:n=4:exp:a=1", "trunc:n=2:trunc:n=8:const:c=3"] {
            let w: WeightSpec = s.parse().unwrap();
            let again: WeightSpec = w.to_string().parse().unwrap();
            assert_eq!(w, again);
        }
        for bad in ["const:c=0", "const:c=-1", "exp:a=x", "trunc:n=0:exp:a=1", "trunc:exp:a=1", "gauss:a=1"] {
            assert!(bad.parse::<WeightSpec>().is_err(), "{bad} should be rejected");
        }
        let json = serde_json::to_string(&WeightSpec::ExpLinear(0.5)).unwrap();
        assert_eq!(json, "\"exp:a=0.5\"");
    }

    #[test]
    fn heat_mean_exp_closed_form() {
        let w = WeightSpec::ExpLinear(0.7);
        for (x, s) in [(0.0, 0.3), (1.5, 1.0), (-2.0, 4.0)] {
            let expected = (0.7 * x * f64::exp(-s) + 0.49 * (1.0 - f64::exp(-2.0 * s)) / 2.0).exp();
            assert_relative_eq!(w.heat_mean(x, s), expected, max_relative = 1e-14);
        }
        assert_relative_eq!(WeightSpec::ExpLinear(1.0).mean(), 0.5f64.exp(), max_relative = 1e-15);
        assert_relative_eq!(WeightSpec::Constant(3.0).heat_mean(1.0, 2.0), 3.0, max_relative = 1e-15);
    }

    #[test]
    fn heat_mean_matches_fine_quadrature_for_truncations() {
        // Independent route: brute-force Riemann sum of the clamped integrand.
        let w = truncate_weight(&WeightSpec::ExpLinear(1.0), 4).unwrap();
        let gh = GaussHermite::new(40).unwrap();
        for (x, s) in [(0.0, 0.5), (2.0, 0.1), (-1.0, 2.0)] {
            let sig = (1.0 - f64::exp(-2.0 * s)).sqrt();
            let mu = x * f64::exp(-s);
            let dy = 1e-4;
            let riemann: f64 = (-120_000..=120_000)
                .map(|i| {
                    let y = i as f64 * dy;
                    w.eval(mu + sig * y) * (-0.5 * y * y).exp() * dy
                })
                .sum::<f64>()
                / (2.0 * std::f64::consts::PI).sqrt();
            assert_relative_eq!(w.heat_mean(x, s), riemann, max_relative = 1e-8);
            // Gauss-Hermite with a kink is only roughly right.
            let gh_val = gh.integrate(|y| w.eval(mu + sig * y));
            assert_relative_eq!(w.heat_mean(x, s), gh_val, max_relative = 1e-2);
        }
    }

    proptest! {
        #[test]
        fn heat_mean_is_positive_and_jensen(a in -2.0f64..2.0, n in 1u32..40, x in -8.0f64..8.0, s in 0.0f64..10.0) {
            let w = truncate_weight(&WeightSpec::ExpLinear(a), n).unwrap();
            let m = w.heat_mean(x, s);
            let mi = w.inverse().heat_mean(x, s);
            prop_assert!(m > 0.0 && mi > 0.0);
            prop_assert!(m >= 1.0 / f64::from(n) * (1.0 - 1e-12) && m <= f64::from(n) * (1.0 + 1e-12));
            prop_assert!(m * mi >= 1.0 - 1e-12);
        }
    }
}
