//! Acceptance suite. Each test checks one criterion at its pinned tolerance
//! and prints a single `[PASS]`/`[FAIL]` line; run with `--nocapture` to see
//! them.

use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use labelgame::combination::{binary_oracle, CompositeConcept, CompoundConcept, WeightVector};
use labelgame::experiment::{run_sweep, summarize, ExperimentConfig, Summary};
use labelgame::game::{
    positive_region_probability, predicted_fixed_point, update_target, Assertion, ElementDistribution, GameLabels,
};
use labelgame::semantics::{Label, Sign, SignedLabel};

const MASTER_SEED: u64 = 2013;

fn report(id: u32, name: &str, pass: bool, detail: String) {
    println!("[{}] criterion {id}: {name}: {detail}", if pass { "PASS" } else { "FAIL" });
}

fn random_signs(rng: &mut ChaCha8Rng, n: usize) -> Vec<Sign> {
    (0..n)
        .map(|_| if rng.random::<bool>() { Sign::Positive } else { Sign::Negative })
        .collect()
}

fn composite(rng: &mut ChaCha8Rng, signs: &[Sign]) -> CompositeConcept {
    let label = Label::scalar(1.0, 1.0).unwrap();
    let labels = signs
        .iter()
        .map(|&sign| SignedLabel {
            label: label.clone(),
            sign,
        })
        .collect();
    let weights = WeightVector::new((0..signs.len()).map(|_| rng.random_range(0.01..5.0)).collect()).unwrap();
    CompositeConcept::new(labels, weights).unwrap()
}

fn summary_for(summaries: &[Summary], w: f64) -> Summary {
    *summaries.iter().find(|s| s.w == w).expect("reliability present")
}

#[test]
fn criterion_1_composite_matches_enumeration() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let n = rng.random_range(1..=10);
        let signs = random_signs(&mut rng, n);
        let c = composite(&mut rng, &signs);
        let ms: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
        let closed = c.membership(&ms).unwrap();
        let oracle = binary_oracle(&c.prototype_bits(), c.weights(), &ms).unwrap();
        worst = worst.max((closed - oracle).abs());
    }
    let elapsed = start.elapsed();
    let pass = worst <= 1e-9 && elapsed < Duration::from_secs(10);
    report(
        1,
        "composite membership equals binary-space enumeration",
        pass,
        format!("1000 instances, max |diff| {worst:.2e} (tol 1e-9), {elapsed:.2?} (limit 10s)"),
    );
    assert!(pass);
}

#[test]
fn criterion_2_compound_flattening() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let (mut worst, mut worst_sum) = (0.0f64, 0.0f64);
    for _ in 0..1000 {
        let n = rng.random_range(1..=10);
        let signs = random_signs(&mut rng, n);
        let theta = composite(&mut rng, &signs);
        let phi = composite(&mut rng, &signs);
        let pair = (rng.random_range(0.01..5.0), rng.random_range(0.01..5.0));
        let cc = CompoundConcept::new(theta.clone(), phi.clone(), pair).unwrap();
        let ms: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();

        let coeffs = cc.flatten().unwrap();
        worst_sum = worst_sum.max((coeffs.iter().sum::<f64>() - 1.0).abs());
        let flat: f64 = coeffs
            .iter()
            .zip(&signs)
            .zip(&ms)
            .map(|((c, s), &m)| c * s.apply(m))
            .sum();
        let two_level = cc
            .membership(theta.membership(&ms).unwrap(), phi.membership(&ms).unwrap())
            .unwrap();
        worst = worst.max((flat - two_level).abs());
    }
    let elapsed = start.elapsed();
    let pass = worst <= 1e-9 && worst_sum <= 1e-12 && elapsed < Duration::from_secs(5);
    report(
        2,
        "flattened compound equals two-level evaluation",
        pass,
        format!(
            "1000 instances, max |diff| {worst:.2e} (tol 1e-9), max |Σc − 1| {worst_sum:.2e} (tol 1e-12), {elapsed:.2?} (limit 5s)"
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_3_fig2a_convergence() {
    let start = Instant::now();
    let cfg = ExperimentConfig {
        master_seed: MASTER_SEED,
        ..ExperimentConfig::fig2a(vec![0.6, 0.75, 0.9, 1.0])
    };
    assert_eq!((cfg.population_size, cfg.replicates, cfg.timesteps), (10, 25, 2000));
    let summaries = summarize(&run_sweep(&cfg, 100).unwrap()).unwrap();
    let elapsed = start.elapsed();
    let mut pass = elapsed < Duration::from_secs(60);
    let mut detail = Vec::new();
    for s in &summaries {
        let ok = (s.mean_lambda - 0.5).abs() <= 0.07 && s.mean_sd < 0.10;
        pass &= ok;
        detail.push(format!("w={} λ={:.4} sd={:.4}", s.w, s.mean_lambda, s.mean_sd));
    }
    report(
        3,
        "x1~U[0,1], x2~U[0,0.5]: λ → 0.5 (±0.07) with SD < 0.10 for w > 0.5 at t=2000",
        pass,
        format!("{}; {elapsed:.2?} (limit 60s)", detail.join(", ")),
    );
    assert_eq!(summaries.len(), 4);
    assert!(pass);
}

#[test]
fn criterion_4_no_convergence_at_low_reliability() {
    let cfg = ExperimentConfig {
        master_seed: MASTER_SEED,
        ..ExperimentConfig::fig2a(vec![0.3, 0.4, 0.5, 0.9])
    };
    let summaries = summarize(&run_sweep(&cfg, 100).unwrap()).unwrap();
    let reference = summary_for(&summaries, 0.9).mean_sd;
    let mut pass = true;
    let mut detail = Vec::new();
    for w in [0.3, 0.4, 0.5] {
        let sd = summary_for(&summaries, w).mean_sd;
        pass &= sd > 2.0 * reference;
        detail.push(format!("w={w} sd={sd:.4}"));
    }
    report(
        4,
        "w ≤ 0.5: final SD exceeds twice the w=0.9 SD",
        pass,
        format!("{} vs 2×{reference:.4}", detail.join(", ")),
    );
    assert!(pass);
}

#[test]
fn criterion_5_full_reliability_fixed_point() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut pass = true;
    let mut detail = Vec::new();
    for (name, cfg, expected) in [
        ("x1~U[0.25,0.75]", ExperimentConfig::fig2b(vec![1.0]), 0.25),
        ("x1~U[0,1]", ExperimentConfig::fig2a(vec![1.0]), 0.5),
    ] {
        let dist = cfg.element_distribution;
        let analytic = predicted_fixed_point(&dist).unwrap();
        let mc = positive_region_probability(&dist, 0.5, 1.0, 1_000_000, &mut rng).unwrap();
        let cfg = ExperimentConfig {
            timesteps: 10_000,
            master_seed: MASTER_SEED,
            ..cfg
        };
        let s = summarize(&run_sweep(&cfg, 1000).unwrap()).unwrap()[0];
        let ok = (analytic - expected).abs() <= 1e-12
            && (mc - analytic).abs() <= 0.005
            && (s.mean_lambda - analytic).abs() <= 0.05;
        pass &= ok;
        detail.push(format!(
            "{name}: p+ {analytic:.4} (MC {mc:.4}), final λ {:.4}",
            s.mean_lambda
        ));
    }
    report(
        5,
        "w=1: mean λ within 0.05 of p+ at t=10000, MC agrees within 0.005",
        pass,
        detail.join("; "),
    );
    assert!(pass);
}

#[test]
fn criterion_6_clamping_dichotomy() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let labels = GameLabels::default();
    let dist = ElementDistribution::unit();
    let (mut events, mut violations) = (0usize, 0usize);
    while events < 1_000_000 {
        let m = labels.memberships(dist.sample(&mut rng));
        let a = Assertion::ALL[rng.random_range(0..4)];
        let Some(t) = update_target(a, m, 1.0) else { continue };
        events += 1;
        if t.clamped != 0.0 && t.clamped != 1.0 {
            violations += 1;
        }
    }
    let pass = violations == 0;
    report(
        6,
        "w=1: clamped update target is exactly 0 or 1",
        pass,
        format!("{events} events, {violations} violations"),
    );
    assert!(pass);
}

#[test]
fn criterion_7_simulate_is_byte_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("fig2a.json");
    std::fs::write(
        &cfg_path,
        r#"{
  "population_size": 10,
  "timesteps": 300,
  "replicates": 4,
  "reliability_values": [0.6, 0.9, 1.0],
  "element_distribution": [[0.0, 1.0], [0.0, 0.5]],
  "learning_rate": 0.001,
  "master_seed": 1
}"#,
    )
    .unwrap();
    let run = |name: &str| {
        let out = dir.path().join(name);
        let status = Command::new(env!("CARGO_BIN_EXE_labelgame"))
            .args(["simulate", "--config"])
            .arg(&cfg_path)
            .args(["--seed", "7", "--out"])
            .arg(&out)
            .status()
            .unwrap();
        assert!(status.success());
        std::fs::read(out).unwrap()
    };
    let (a, b) = (run("a.csv"), run("b.csv"));
    let pass = !a.is_empty() && a == b;
    report(
        7,
        "simulate with fixed config and seed gives byte-identical CSV",
        pass,
        format!("{} bytes per run", a.len()),
    );
    assert!(pass);
}
