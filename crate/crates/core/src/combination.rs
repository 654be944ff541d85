//! Concept combination in weighted binary spaces.
//!
//! A composite concept is a signed conjunction of labels `±L_1 ∧ … ∧ ±L_n`.
//! It maps to a prototype bit vector (1 for a positive label, 0 for a negated
//! one) in `{0,1}^n`, which carries a weighted Hamming metric and a threshold
//! `ε ~ U(0, λ_T)`. Treating each bit as an independent Bernoulli variable
//! whose success probability is the label's appropriateness, membership in the
//! composite collapses to a weighted sum of the per-label signed memberships.
//!
//! Two composites can themselves be combined in a 2-bit space with prototype
//! `(1, 1)`, giving a compound concept whose membership is again a weighted
//! sum over the underlying labels when both parents share their labels and
//! polarities.
//!
//! [`binary_oracle`] evaluates the binary-space definition by brute-force
//! enumeration and is kept independent of the closed forms.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::semantics::{Sign, SignedLabel};

/// Default largest `n` the enumeration oracle accepts (`2^20` terms).
pub const DEFAULT_ENUMERATION_CAP: usize = 20;

/// Strictly positive per-dimension weights with their cached sum.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector {
    weights: Vec<f64>,
    total: f64,
}

impl WeightVector {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::invalid("weight vector must be nonempty"));
        }
        if let Some((i, w)) = weights
            .iter()
            .enumerate()
            .find(|(_, w)| !(w.is_finite() && **w > 0.0))
        {
            return Err(Error::invalid(format!(
                "weight {i} must be positive and finite, got {w}"
            )));
        }
        let total = weights.iter().sum();
        Ok(WeightVector { weights, total })
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.total
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.weights
    }

    /// `λ_i / λ_T` for each dimension.
    pub fn normalized(&self) -> impl Iterator<Item = f64> + '_ {
        self.weights.iter().map(move |w| w / self.total)
    }
}

impl Serialize for WeightVector {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        self.weights.serialize(ser)
    }
}

impl<'de> Deserialize<'de> for WeightVector {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let weights = Vec::<f64>::deserialize(de)?;
        WeightVector::new(weights).map_err(serde::de::Error::custom)
    }
}

/// `Σ λ_i |x_i − x'_i|` over bit vectors.
pub fn weighted_hamming(weights: &WeightVector, x: &[bool], y: &[bool]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            actual: y.len(),
        });
    }
    if x.len() != weights.len() {
        return Err(Error::DimensionMismatch {
            expected: weights.len(),
            actual: x.len(),
        });
    }
    Ok(weights
        .as_slice()
        .iter()
        .zip(x.iter().zip(y))
        .filter(|(_, (a, b))| a != b)
        .map(|(w, _)| w)
        .sum())
}

fn check_memberships(ms: &[f64]) -> Result<()> {
    match ms
        .iter()
        .enumerate()
        .find(|(_, m)| !(0.0..=1.0).contains(*m))
    {
        Some((i, m)) => Err(Error::invalid(format!(
            "membership {i} must lie in [0, 1], got {m}"
        ))),
        None => Ok(()),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompositeConcept {
    labels: Vec<SignedLabel>,
    weights: WeightVector,
}

impl CompositeConcept {
    pub fn new(labels: Vec<SignedLabel>, weights: WeightVector) -> Result<Self> {
        let c = CompositeConcept { labels, weights };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if self.labels.len() != self.weights.len() {
            return Err(Error::DimensionMismatch {
                expected: self.weights.len(),
                actual: self.labels.len(),
            });
        }
        self.labels.iter().try_for_each(|l| l.label.validate())
    }

    pub fn labels(&self) -> &[SignedLabel] {
        &self.labels
    }

    pub fn weights(&self) -> &WeightVector {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn signs(&self) -> impl Iterator<Item = Sign> + '_ {
        self.labels.iter().map(|l| l.sign)
    }

    /// Binary-space prototype: bit `i` is set for a positive label.
    pub fn prototype_bits(&self) -> Vec<bool> {
        self.signs().map(Sign::is_positive).collect()
    }

    /// Membership given the positive-sign appropriateness of each label.
    pub fn membership(&self, positive_memberships: &[f64]) -> Result<f64> {
        if positive_memberships.len() != self.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                actual: positive_memberships.len(),
            });
        }
        check_memberships(positive_memberships)?;
        let total = self.weights.total();
        let sum: f64 = self
            .weights
            .as_slice()
            .iter()
            .zip(self.signs())
            .zip(positive_memberships)
            .map(|((w, s), &m)| w * s.apply(m))
            .sum();
        Ok((sum / total).clamp(0.0, 1.0))
    }

    /// Positive-sign appropriateness of each label at its own point `ys[i]`.
    pub fn label_memberships(&self, ys: &[Vec<f64>]) -> Result<Vec<f64>> {
        if ys.len() != self.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                actual: ys.len(),
            });
        }
        self.labels
            .iter()
            .zip(ys)
            .map(|(l, y)| l.label.appropriateness(y))
            .collect()
    }

    /// Membership of the point tuple `ys`, one point per label's space.
    pub fn membership_at(&self, ys: &[Vec<f64>]) -> Result<f64> {
        self.membership(&self.label_memberships(ys)?)
    }
}

pub fn composite_membership(c: &CompositeConcept, positive_memberships: &[f64]) -> Result<f64> {
    c.membership(positive_memberships)
}

/// Membership in a binary-space concept by exhaustive enumeration of
/// `{0,1}^n`, with a caller-supplied cap on `n`.
///
/// Each bit is an independent Bernoulli variable with success probability
/// `bit_probs[i]`; every outcome contributes `P(x) · P(H_λ(x, prototype) ≤ ε)`
/// with `ε ~ U(0, λ_T)`.
pub fn binary_oracle_capped(
    prototype_bits: &[bool],
    weights: &WeightVector,
    bit_probs: &[f64],
    cap: usize,
) -> Result<f64> {
    let n = prototype_bits.len();
    if weights.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: weights.len(),
        });
    }
    if bit_probs.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: bit_probs.len(),
        });
    }
    if n > cap || n >= usize::BITS as usize {
        return Err(Error::EnumerationTooLarge { n, cap });
    }
    check_memberships(bit_probs)?;

    let lambda = weights.as_slice();
    let total = weights.total();
    let proto: usize = prototype_bits
        .iter()
        .enumerate()
        .filter(|(_, &b)| b)
        .map(|(i, _)| 1usize << i)
        .sum();

    let mut acc = 0.0;
    for outcome in 0..(1usize << n) {
        let mut p = 1.0;
        let mut h = 0.0;
        for i in 0..n {
            let bit = outcome >> i & 1 == 1;
            p *= if bit { bit_probs[i] } else { 1.0 - bit_probs[i] };
            if bit != (proto >> i & 1 == 1) {
                h += lambda[i];
            }
        }
        if p == 0.0 {
            continue;
        }
        acc += p * (1.0 - h / total).max(0.0);
    }
    Ok(acc)
}

pub fn binary_oracle(prototype_bits: &[bool], weights: &WeightVector, bit_probs: &[f64]) -> Result<f64> {
    binary_oracle_capped(prototype_bits, weights, bit_probs, DEFAULT_ENUMERATION_CAP)
}

/// Two composites combined in a 2-bit space with prototype `(1, 1)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompoundConcept {
    left: CompositeConcept,
    right: CompositeConcept,
    pair_weights: (f64, f64),
}

impl CompoundConcept {
    pub fn new(left: CompositeConcept, right: CompositeConcept, pair_weights: (f64, f64)) -> Result<Self> {
        let cc = CompoundConcept {
            left,
            right,
            pair_weights,
        };
        cc.validate()?;
        Ok(cc)
    }

    pub fn validate(&self) -> Result<()> {
        let (w1, w2) = self.pair_weights;
        if !(w1.is_finite() && w1 > 0.0 && w2.is_finite() && w2 > 0.0) {
            return Err(Error::invalid(format!(
                "pair weights must be positive and finite, got ({w1}, {w2})"
            )));
        }
        self.left.validate()?;
        self.right.validate()
    }

    pub fn left(&self) -> &CompositeConcept {
        &self.left
    }

    pub fn right(&self) -> &CompositeConcept {
        &self.right
    }

    pub fn pair_weights(&self) -> (f64, f64) {
        self.pair_weights
    }

    pub fn pair_total(&self) -> f64 {
        self.pair_weights.0 + self.pair_weights.1
    }

    /// Membership from the memberships of the two parent composites.
    pub fn membership(&self, left: f64, right: f64) -> Result<f64> {
        check_memberships(&[left, right])?;
        let (w1, w2) = self.pair_weights;
        Ok(((w1 * left + w2 * right) / self.pair_total()).clamp(0.0, 1.0))
    }

    /// Two-level evaluation: each parent at its own per-label memberships.
    pub fn membership_two_level(&self, left_ms: &[f64], right_ms: &[f64]) -> Result<f64> {
        self.membership(self.left.membership(left_ms)?, self.right.membership(right_ms)?)
    }

    /// Per-label coefficients of the single-level weighted sum equivalent to
    /// this compound. Both parents must share labels and polarities.
    pub fn flatten(&self) -> Result<Vec<f64>> {
        let (theta, phi) = (&self.left, &self.right);
        if theta.len() != phi.len() {
            return Err(Error::UnsupportedStructure(format!(
                "parents have {} and {} labels",
                theta.len(),
                phi.len()
            )));
        }
        for (i, (a, b)) in theta.labels.iter().zip(&phi.labels).enumerate() {
            if a.sign != b.sign {
                return Err(Error::UnsupportedStructure(format!(
                    "parents disagree on the polarity of label {i}"
                )));
            }
            if a.label != b.label {
                return Err(Error::UnsupportedStructure(format!(
                    "parents use different labels at position {i}"
                )));
            }
        }
        let (w1, w2) = self.pair_weights;
        let wt = self.pair_total();
        let (tt, pt) = (theta.weights.total(), phi.weights.total());
        let denom = wt * tt * pt;
        Ok(theta
            .weights
            .as_slice()
            .iter()
            .zip(phi.weights.as_slice())
            .map(|(lt, lp)| (w1 * pt * lt + w2 * tt * lp) / denom)
            .collect())
    }

    /// Single-level evaluation through [`CompoundConcept::flatten`]; the
    /// memberships are the positive-sign appropriateness of the shared labels.
    pub fn membership_flattened(&self, positive_memberships: &[f64]) -> Result<f64> {
        let coeffs = self.flatten()?;
        if positive_memberships.len() != coeffs.len() {
            return Err(Error::DimensionMismatch {
                expected: coeffs.len(),
                actual: positive_memberships.len(),
            });
        }
        check_memberships(positive_memberships)?;
        Ok(coeffs
            .iter()
            .zip(self.left.signs())
            .zip(positive_memberships)
            .map(|((c, s), &m)| c * s.apply(m))
            .sum::<f64>()
            .clamp(0.0, 1.0))
    }
}

pub fn compound_membership(cc: &CompoundConcept, left: f64, right: f64) -> Result<f64> {
    cc.membership(left, right)
}

pub fn flatten_compound(cc: &CompoundConcept) -> Result<Vec<f64>> {
    cc.flatten()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semantics::Label;

    fn wv(w: &[f64]) -> WeightVector {
        WeightVector::new(w.to_vec()).unwrap()
    }

    fn composite(signs: &[Sign], w: &[f64]) -> CompositeConcept {
        let label = Label::scalar(1.0, 1.0).unwrap();
        let labels = signs
            .iter()
            .map(|&sign| SignedLabel {
                label: label.clone(),
                sign,
            })
            .collect();
        CompositeConcept::new(labels, wv(w)).unwrap()
    }

    #[test]
    fn hamming_examples() {
        let l = wv(&[1.0, 2.0, 3.0]);
        let d = weighted_hamming(&l, &[true, false, true], &[false, false, true]).unwrap();
        // per-coordinate: 1·1 + 2·0 + 3·0
        let by_coord: f64 = [1.0 * 1.0, 2.0 * 0.0, 3.0 * 0.0].iter().sum();
        assert_eq!(d, 1.0);
        assert_eq!(d, by_coord);
        assert_eq!(weighted_hamming(&l, &[true, false, true], &[true, false, true]).unwrap(), 0.0);
        assert_eq!(weighted_hamming(&wv(&[1.0, 1.0]), &[true, true], &[false, false]).unwrap(), 2.0);
    }

    #[test]
    fn hamming_length_mismatch() {
        let l = wv(&[1.0, 2.0]);
        assert!(matches!(
            weighted_hamming(&l, &[true, false], &[true]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn weight_vector_rejects_nonpositive() {
        assert!(WeightVector::new(vec![1.0, 0.0]).is_err());
        assert!(WeightVector::new(vec![-1.0]).is_err());
        assert!(WeightVector::new(vec![]).is_err());
        assert_eq!(wv(&[0.5, 1.5, 2.0]).total(), 4.0);
    }

    #[test]
    fn composite_examples() {
        let c = composite(&[Sign::Positive, Sign::Positive], &[0.6, 0.4]);
        let mu = c.membership(&[0.5, 1.0]).unwrap();
        assert!((mu - 0.7).abs() < 1e-12);
        let oracle = binary_oracle(&c.prototype_bits(), c.weights(), &[0.5, 1.0]).unwrap();
        assert!((oracle - 0.7).abs() < 1e-12);

        assert_eq!(c.membership(&[1.0, 1.0]).unwrap(), 1.0);

        let single = composite(&[Sign::Negative], &[3.0]);
        assert!((single.membership(&[0.3]).unwrap() - 0.7).abs() < 1e-15);
    }

    #[test]
    fn composite_rejects_out_of_range() {
        let c = composite(&[Sign::Positive, Sign::Negative], &[1.0, 1.0]);
        assert!(matches!(c.membership(&[0.5, 1.5]), Err(Error::InvalidInput(_))));
        assert!(matches!(c.membership(&[0.5, f64::NAN]), Err(Error::InvalidInput(_))));
        assert!(matches!(c.membership(&[0.5]), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn composite_from_points() {
        let c = composite(&[Sign::Positive, Sign::Negative], &[1.0, 3.0]);
        // μ = (1·0.8 + 3·(1 − 0.4)) / 4
        let mu = c.membership_at(&[vec![0.8], vec![0.4]]).unwrap();
        assert!((mu - 0.65).abs() < 1e-12);
    }

    #[test]
    fn oracle_examples() {
        assert_eq!(binary_oracle(&[true], &wv(&[1.0]), &[1.0]).unwrap(), 1.0);
        let v = binary_oracle(&[true, true], &wv(&[1.0, 1.0]), &[0.5, 0.5]).unwrap();
        assert!((v - 0.5).abs() < 1e-15);
    }

    #[test]
    fn oracle_cap() {
        let n = 21;
        let err = binary_oracle(&vec![true; n], &wv(&vec![1.0; n]), &vec![0.5; n]).unwrap_err();
        assert_eq!(err, Error::EnumerationTooLarge { n: 21, cap: 20 });
        assert!(binary_oracle_capped(&[true; 3], &wv(&[1.0; 3]), &[0.5; 3], 2).is_err());
    }

    fn compound(lt: &[f64], lp: &[f64], w: (f64, f64)) -> CompoundConcept {
        let signs = vec![Sign::Positive; lt.len()];
        CompoundConcept::new(composite(&signs, lt), composite(&signs, lp), w).unwrap()
    }

    #[test]
    fn compound_examples() {
        let cc = compound(&[1.0], &[1.0], (1.0, 1.0));
        assert!((cc.membership(0.37, 0.37).unwrap() - 0.37).abs() < 1e-15);
        assert_eq!(cc.membership(1.0, 1.0).unwrap(), 1.0);

        let cc = compound(&[1.0], &[1.0], (1.0, 3.0));
        assert_eq!(cc.membership(1.0, 0.0).unwrap(), 0.25);
        let two_bit = binary_oracle(&[true, true], &wv(&[1.0, 3.0]), &[1.0, 0.0]).unwrap();
        assert!((two_bit - 0.25).abs() < 1e-15);
    }

    #[test]
    fn compound_rejects_zero_weight() {
        let c = composite(&[Sign::Positive], &[1.0]);
        assert!(CompoundConcept::new(c.clone(), c, (1.0, 0.0)).is_err());
    }

    #[test]
    fn flatten_examples() {
        let cc = compound(&[2.0, 1.0, 1.0], &[2.0, 1.0, 1.0], (0.7, 0.7));
        let c = cc.flatten().unwrap();
        for (got, want) in c.iter().zip([0.5, 0.25, 0.25]) {
            assert!((got - want).abs() < 1e-15);
        }

        let cc = compound(&[1.0, 1.0], &[3.0, 1.0], (1.0, 1.0));
        let c = cc.flatten().unwrap();
        assert!((c[0] - 0.625).abs() < 1e-15);
        assert!((c[1] - 0.375).abs() < 1e-15);
        // compose the two levels numerically at a couple of membership points
        for ms in [[0.2, 0.9], [1.0, 0.0], [0.5, 0.5]] {
            let two_level = cc.membership_two_level(&ms, &ms).unwrap();
            let flat = cc.membership_flattened(&ms).unwrap();
            assert!((two_level - flat).abs() < 1e-12);
        }
    }

    #[test]
    fn flatten_rejects_sign_disagreement() {
        let a = composite(&[Sign::Positive, Sign::Negative], &[1.0, 1.0]);
        let b = composite(&[Sign::Positive, Sign::Positive], &[1.0, 1.0]);
        let cc = CompoundConcept::new(a.clone(), b, (1.0, 1.0)).unwrap();
        assert!(matches!(cc.flatten(), Err(Error::UnsupportedStructure(_))));
        // two-level evaluation still works
        assert!(cc.membership_two_level(&[0.3, 0.3], &[0.3, 0.3]).is_ok());

        let short = composite(&[Sign::Positive], &[1.0]);
        let cc = CompoundConcept::new(a, short, (1.0, 1.0)).unwrap();
        assert!(matches!(cc.flatten(), Err(Error::UnsupportedStructure(_))));
    }

    #[test]
    fn composite_json_round_trip() {
        let c = composite(&[Sign::Positive, Sign::Negative], &[1.0, 2.0]);
        let json = serde_json::to_string(&c).unwrap();
        let back: CompositeConcept = serde_json::from_str(&json).unwrap();
        assert_eq!(back, c);
        assert_eq!(back.weights().total(), 3.0);
    }
}
