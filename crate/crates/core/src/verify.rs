//! Randomized equivalence suites between the closed forms and their
//! independent oracles. Used by the `verify` subcommand.

use std::fmt;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::combination::{binary_oracle, CompositeConcept, CompoundConcept, WeightVector};
use crate::error::Result;
use crate::game::{
    positive_region_probability, predicted_fixed_point, update_target, Assertion, ElementDistribution, GameLabels,
};
use crate::semantics::{Label, Sign, SignedLabel};

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteReport {
    pub name: &'static str,
    pub cases: usize,
    /// Largest observed discrepancy (or count of violations for counting suites).
    pub max_error: f64,
    pub tolerance: f64,
    pub elapsed: Duration,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.max_error <= self.tolerance
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}] {}: {} cases, max error {:.3e} (tol {:.1e}), {:.2?}",
            if self.passed() { "PASS" } else { "FAIL" },
            self.name,
            self.cases,
            self.max_error,
            self.tolerance,
            self.elapsed
        )
    }
}

fn random_sign<R: Rng>(rng: &mut R) -> Sign {
    if rng.random::<bool>() {
        Sign::Positive
    } else {
        Sign::Negative
    }
}

fn random_weights<R: Rng>(rng: &mut R, n: usize) -> WeightVector {
    WeightVector::new((0..n).map(|_| rng.random_range(0.01..5.0)).collect()).expect("positive weights")
}

fn composite_with<R: Rng>(rng: &mut R, signs: &[Sign]) -> CompositeConcept {
    let label = Label::scalar(1.0, 1.0).expect("unit label");
    let labels = signs
        .iter()
        .map(|&sign| SignedLabel {
            label: label.clone(),
            sign,
        })
        .collect();
    CompositeConcept::new(labels, random_weights(rng, signs.len())).expect("lengths agree")
}

/// Weighted-sum composite membership against exhaustive enumeration of the
/// binary space, for random `n ∈ 1..=10`.
pub fn composite_vs_enumeration(instances: usize, seed: u64) -> Result<SuiteReport> {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..instances {
        let n = rng.random_range(1..=10);
        let signs: Vec<Sign> = (0..n).map(|_| random_sign(&mut rng)).collect();
        let c = composite_with(&mut rng, &signs);
        let ms: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
        let closed = c.membership(&ms)?;
        // a bit is 1 with the positive-label probability regardless of polarity
        let oracle = binary_oracle(&c.prototype_bits(), c.weights(), &ms)?;
        worst = worst.max((closed - oracle).abs());
    }
    Ok(SuiteReport {
        name: "composite membership vs binary enumeration",
        cases: instances,
        max_error: worst,
        tolerance: 1e-9,
        elapsed: start.elapsed(),
    })
}

/// Flattened compound coefficients against two-level evaluation, and the
/// normalization of the coefficients. Returns `(equivalence, normalization)`.
pub fn compound_vs_two_level(instances: usize, seed: u64) -> Result<(SuiteReport, SuiteReport)> {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    let mut worst_sum = 0.0f64;
    for _ in 0..instances {
        let n = rng.random_range(1..=10);
        let signs: Vec<Sign> = (0..n).map(|_| random_sign(&mut rng)).collect();
        let theta = composite_with(&mut rng, &signs);
        let phi = composite_with(&mut rng, &signs);
        let pair = (rng.random_range(0.01..5.0), rng.random_range(0.01..5.0));
        let cc = CompoundConcept::new(theta, phi, pair)?;
        let ms: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
        let coeffs = cc.flatten()?;
        worst_sum = worst_sum.max((coeffs.iter().sum::<f64>() - 1.0).abs());
        let flat = cc.membership_flattened(&ms)?;
        let two_level = cc.membership_two_level(&ms, &ms)?;
        worst = worst.max((flat - two_level).abs());
    }
    let elapsed = start.elapsed();
    Ok((
        SuiteReport {
            name: "flattened compound vs two-level evaluation",
            cases: instances,
            max_error: worst,
            tolerance: 1e-9,
            elapsed,
        },
        SuiteReport {
            name: "flattened coefficients sum to one",
            cases: instances,
            max_error: worst_sum,
            tolerance: 1e-12,
            elapsed,
        },
    ))
}

/// Counts update events with `w = 1` whose clamped target is not exactly 0 or 1.
pub fn clamp_dichotomy(events: usize, seed: u64) -> SuiteReport {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let labels = GameLabels::default();
    let dist = ElementDistribution::unit();
    let mut violations = 0usize;
    let mut seen = 0usize;
    while seen < events {
        let m = labels.memberships(dist.sample(&mut rng));
        let a = Assertion::best(m);
        let Some(t) = update_target(a, m, 1.0) else { continue };
        seen += 1;
        if t.clamped != 0.0 && t.clamped != 1.0 {
            violations += 1;
        }
    }
    SuiteReport {
        name: "w = 1 update target is 0 or 1",
        cases: events,
        max_error: violations as f64,
        tolerance: 0.0,
        elapsed: start.elapsed(),
    }
}

/// Closed-form `p⁺` against the Monte Carlo positive-region estimate at `w = 1`.
pub fn fixed_point_agreement(dist: &ElementDistribution, samples: usize, seed: u64) -> Result<SuiteReport> {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let exact = predicted_fixed_point(dist)?;
    let mc = positive_region_probability(dist, 0.5, 1.0, samples, &mut rng)?;
    Ok(SuiteReport {
        name: "closed-form p+ vs Monte Carlo estimate",
        cases: samples,
        max_error: (exact - mc).abs(),
        tolerance: 0.005,
        elapsed: start.elapsed(),
    })
}

/// All suites with their default sizes.
pub fn run_all(seed: u64) -> Result<Vec<SuiteReport>> {
    let mut reports = vec![composite_vs_enumeration(1000, seed)?];
    let (eq, norm) = compound_vs_two_level(1000, seed.wrapping_add(1))?;
    reports.push(eq);
    reports.push(norm);
    reports.push(clamp_dichotomy(1_000_000, seed.wrapping_add(2)));
    for (i, bounds) in [[(0.0, 1.0), (0.0, 0.5)], [(0.25, 0.75), (0.0, 0.5)]].into_iter().enumerate() {
        let dist = ElementDistribution { bounds };
        reports.push(fixed_point_agreement(&dist, 1_000_000, seed.wrapping_add(3 + i as u64))?);
    }
    Ok(reports)
}
