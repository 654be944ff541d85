//! Labels over conceptual spaces.
//!
//! A label pairs a prototype point with a distance metric and an uncertain
//! threshold. The appropriateness of the label for a point `x` is the
//! probability that the threshold is at least the distance from `x` to the
//! prototype, i.e. the survival function of the threshold distribution
//! evaluated at that distance.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Distribution of a label's uncertain threshold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ThresholdDistribution {
    /// Uniform on `[0, upper]`.
    Uniform { upper: f64 },
}

impl ThresholdDistribution {
    pub fn uniform(upper: f64) -> Result<Self> {
        let dist = ThresholdDistribution::Uniform { upper };
        dist.validate()?;
        Ok(dist)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            ThresholdDistribution::Uniform { upper } => {
                if !(upper.is_finite() && upper > 0.0) {
                    return Err(Error::invalid(format!(
                        "uniform threshold bound must be positive and finite, got {upper}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// `P(threshold >= d)`.
    pub fn tail(&self, d: f64) -> f64 {
        match *self {
            ThresholdDistribution::Uniform { upper } => {
                if d <= 0.0 {
                    1.0
                } else if d >= upper {
                    0.0
                } else {
                    1.0 - d / upper
                }
            }
        }
    }

    /// Probability density at `e`.
    pub fn density(&self, e: f64) -> f64 {
        match *self {
            ThresholdDistribution::Uniform { upper } => {
                if (0.0..=upper).contains(&e) {
                    1.0 / upper
                } else {
                    0.0
                }
            }
        }
    }

    /// Largest value the threshold can take.
    pub fn support_max(&self) -> f64 {
        match *self {
            ThresholdDistribution::Uniform { upper } => upper,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    #[default]
    Euclidean,
}

impl Metric {
    pub fn distance(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        if x.len() != y.len() {
            return Err(Error::DimensionMismatch {
                expected: y.len(),
                actual: x.len(),
            });
        }
        match self {
            Metric::Euclidean => Ok(x
                .iter()
                .zip(y)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Label {
    pub prototype: Vec<f64>,
    #[serde(default)]
    pub metric: Metric,
    pub threshold: ThresholdDistribution,
}

impl Label {
    pub fn new(prototype: Vec<f64>, metric: Metric, threshold: ThresholdDistribution) -> Result<Self> {
        let label = Label {
            prototype,
            metric,
            threshold,
        };
        label.validate()?;
        Ok(label)
    }

    /// A one-dimensional Euclidean label with a uniform threshold on `[0, upper]`.
    pub fn scalar(prototype: f64, upper: f64) -> Result<Self> {
        Label::new(
            vec![prototype],
            Metric::Euclidean,
            ThresholdDistribution::uniform(upper)?,
        )
    }

    pub fn validate(&self) -> Result<()> {
        if self.prototype.is_empty() {
            return Err(Error::invalid("label prototype must have at least one dimension"));
        }
        if self.prototype.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("label prototype must be finite"));
        }
        self.threshold.validate()
    }

    pub fn dimension(&self) -> usize {
        self.prototype.len()
    }

    /// Appropriateness of this label for describing `x`.
    pub fn appropriateness(&self, x: &[f64]) -> Result<f64> {
        let d = self.metric.distance(x, &self.prototype)?;
        Ok(self.threshold.tail(d))
    }
}

/// Free-function form of [`Label::appropriateness`].
pub fn appropriateness(label: &Label, x: &[f64]) -> Result<f64> {
    label.appropriateness(x)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sign {
    Positive,
    Negative,
}

impl Sign {
    /// Applies this polarity to a positive-sign membership.
    #[inline]
    pub fn apply(self, membership: f64) -> f64 {
        match self {
            Sign::Positive => membership,
            Sign::Negative => 1.0 - membership,
        }
    }

    pub fn is_positive(self) -> bool {
        matches!(self, Sign::Positive)
    }

    /// Bit of the binary-space prototype this polarity maps to.
    pub fn bit(self) -> u8 {
        match self {
            Sign::Positive => 1,
            Sign::Negative => 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SignedLabel {
    pub label: Label,
    pub sign: Sign,
}

impl SignedLabel {
    pub fn positive(label: Label) -> Self {
        SignedLabel {
            label,
            sign: Sign::Positive,
        }
    }

    pub fn negative(label: Label) -> Self {
        SignedLabel {
            label,
            sign: Sign::Negative,
        }
    }

    pub fn membership(&self, x: &[f64]) -> Result<f64> {
        Ok(self.sign.apply(self.label.appropriateness(x)?))
    }
}

pub fn signed_membership(sl: &SignedLabel, x: &[f64]) -> Result<f64> {
    sl.membership(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Composite trapezoid integration of the threshold density over `[d, b]`.
    fn integrate_density(dist: &ThresholdDistribution, d: f64) -> f64 {
        let b = dist.support_max();
        if d >= b {
            return 0.0;
        }
        let lo = d.max(0.0);
        let steps = 100_000;
        let dx = (b - lo) / steps as f64;
        // sample strictly inside the support so the endpoints do not double count
        (0..steps)
            .map(|k| dist.density(lo + (k as f64 + 0.5) * dx) * dx)
            .sum()
    }

    fn unit_label() -> Label {
        Label::scalar(1.0, 1.0).unwrap()
    }

    #[test]
    fn prototype_is_fully_appropriate() {
        assert_eq!(unit_label().appropriateness(&[1.0]).unwrap(), 1.0);
    }

    #[test]
    fn appropriateness_matches_integral() {
        let l = unit_label();
        let mu = l.appropriateness(&[0.3]).unwrap();
        assert!((mu - 0.3).abs() < 1e-12);
        let oracle = integrate_density(&l.threshold, 0.7);
        assert!((mu - oracle).abs() < 1e-9, "{mu} vs {oracle}");
    }

    #[test]
    fn beyond_max_threshold_is_zero() {
        let l = Label::scalar(1.0, 0.5).unwrap();
        assert_eq!(l.appropriateness(&[0.3]).unwrap(), 0.0);
    }

    #[test]
    fn dimension_mismatch() {
        let err = unit_label().appropriateness(&[0.1, 0.2]).unwrap_err();
        assert_eq!(
            err,
            Error::DimensionMismatch {
                expected: 1,
                actual: 2
            }
        );
    }

    #[test]
    fn rejects_bad_threshold() {
        assert!(ThresholdDistribution::uniform(0.0).is_err());
        assert!(ThresholdDistribution::uniform(-1.0).is_err());
        assert!(ThresholdDistribution::uniform(f64::NAN).is_err());
    }

    #[test]
    fn tail_endpoints() {
        let t = ThresholdDistribution::uniform(2.0).unwrap();
        assert_eq!(t.tail(0.0), 1.0);
        assert_eq!(t.tail(2.0), 0.0);
        assert_eq!(t.tail(5.0), 0.0);
        assert_eq!(t.tail(0.5), 0.75);
    }

    #[test]
    fn signed_examples() {
        let pos = SignedLabel::positive(unit_label());
        let neg = SignedLabel::negative(unit_label());
        assert_eq!(pos.membership(&[1.0]).unwrap(), 1.0);
        assert_eq!(neg.membership(&[1.0]).unwrap(), 0.0);
        assert!((neg.membership(&[0.3]).unwrap() - 0.7).abs() < 1e-15);
    }

    #[test]
    fn euclidean_in_two_dims() {
        let l = Label::new(
            vec![0.0, 0.0],
            Metric::Euclidean,
            ThresholdDistribution::uniform(10.0).unwrap(),
        )
        .unwrap();
        assert!((l.appropriateness(&[3.0, 4.0]).unwrap() - 0.5).abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn appropriateness_in_unit_interval(
            p in -5.0f64..5.0, x in -5.0f64..5.0, b in 0.01f64..10.0
        ) {
            let l = Label::scalar(p, b).unwrap();
            let mu = l.appropriateness(&[x]).unwrap();
            prop_assert!((0.0..=1.0).contains(&mu));
        }

        #[test]
        fn nonincreasing_in_distance(
            mut xs in proptest::collection::vec(0.0f64..3.0, 2..30), b in 0.1f64..4.0
        ) {
            let l = Label::scalar(0.0, b).unwrap();
            xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let mus: Vec<f64> = xs.iter().map(|&x| l.appropriateness(&[x]).unwrap()).collect();
            for w in mus.windows(2) {
                prop_assert!(w[1] <= w[0]);
            }
        }

        #[test]
        fn signed_memberships_are_complementary(x in -2.0f64..3.0, b in 0.1f64..4.0) {
            let l = Label::scalar(1.0, b).unwrap();
            let pos = SignedLabel::positive(l.clone()).membership(&[x]).unwrap();
            let neg = SignedLabel::negative(l).membership(&[x]).unwrap();
            prop_assert_eq!(pos + neg, 1.0);
        }
    }
}
