//! Seeded sweeps of the language game over reliability values.
//!
//! Each `(reliability, replicate)` pair runs in its own [`GameWorld`] whose
//! seed is derived from the master seed, the reliability index and the
//! replicate index with a splitmix64 mix:
//!
//! ```text
//! s = splitmix64(master_seed)
//! s = splitmix64(s ^ (w_index + 1) * 0x9E3779B97F4A7C15)
//! s = splitmix64(s ^ (replicate + 1) * 0xD1B54A32D192ED03)
//! ```
//!
//! Runs are independent, so they execute in parallel; records are merged
//! back in `(w_index, replicate, timestep)` order before anything is written.

use std::collections::BTreeMap;
use std::io::{self, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{ElementDistribution, GameParams, GameWorld, Schedule, DEFAULT_LEARNING_RATE};

pub const CSV_HEADER: &str = "w,replicate,timestep,mean_lambda,sd_lambda";
pub const DEFAULT_THIN: usize = 10;

fn default_population() -> usize {
    10
}
fn default_timesteps() -> usize {
    2000
}
fn default_replicates() -> usize {
    25
}
fn default_learning_rate() -> f64 {
    DEFAULT_LEARNING_RATE
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default = "default_population")]
    pub population_size: usize,
    #[serde(default = "default_timesteps")]
    pub timesteps: usize,
    #[serde(default = "default_replicates")]
    pub replicates: usize,
    pub reliability_values: Vec<f64>,
    pub element_distribution: ElementDistribution,
    #[serde(default = "default_learning_rate")]
    pub learning_rate: f64,
    #[serde(default)]
    pub master_seed: u64,
    #[serde(default)]
    pub schedule: Schedule,
}

impl ExperimentConfig {
    /// `x1 ~ U[0,1]`, `x2 ~ U[0,0.5]`.
    pub fn fig2a(reliability_values: Vec<f64>) -> Self {
        ExperimentConfig {
            population_size: default_population(),
            timesteps: default_timesteps(),
            replicates: default_replicates(),
            reliability_values,
            element_distribution: ElementDistribution {
                bounds: [(0.0, 1.0), (0.0, 0.5)],
            },
            learning_rate: DEFAULT_LEARNING_RATE,
            master_seed: 0,
            schedule: Schedule::default(),
        }
    }

    /// `x1 ~ U[0.25,0.75]`, `x2 ~ U[0,0.5]`.
    pub fn fig2b(reliability_values: Vec<f64>) -> Self {
        ExperimentConfig {
            element_distribution: ElementDistribution {
                bounds: [(0.25, 0.75), (0.0, 0.5)],
            },
            ..Self::fig2a(reliability_values)
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig =
            serde_json::from_str(text).map_err(|e| Error::config("<json>", e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.population_size < 2 {
            return Err(Error::config("population_size", "must be at least 2"));
        }
        if self.replicates < 1 {
            return Err(Error::config("replicates", "must be at least 1"));
        }
        if self.reliability_values.is_empty() {
            return Err(Error::config("reliability_values", "must not be empty"));
        }
        if let Some(w) = self
            .reliability_values
            .iter()
            .find(|w| !(0.0..=1.0).contains(*w))
        {
            return Err(Error::config(
                "reliability_values",
                format!("{w} is outside [0, 1]"),
            ));
        }
        if !(self.learning_rate.is_finite() && (0.0..=1.0).contains(&self.learning_rate)) {
            return Err(Error::config("learning_rate", "must lie in [0, 1]"));
        }
        self.element_distribution
            .validate()
            .map_err(|e| Error::config("element_distribution", e.to_string()))
    }

    fn game_params(&self, w: f64) -> GameParams {
        GameParams {
            population_size: self.population_size,
            schedule: self.schedule,
            reliability: w,
            learning_rate: self.learning_rate,
            distribution: self.element_distribution,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub w: f64,
    pub replicate: usize,
    pub timestep: usize,
    pub mean_lambda: f64,
    pub sd_lambda: f64,
}

#[inline]
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn child_seed(master_seed: u64, w_index: usize, replicate: usize) -> u64 {
    let mut s = splitmix64(master_seed);
    s = splitmix64(s ^ (w_index as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    splitmix64(s ^ (replicate as u64 + 1).wrapping_mul(0xD1B5_4A32_D192_ED03))
}

/// Runs one replicate, recording timestep 0, every `thin`-th timestep, and
/// the final timestep.
pub fn run_replicate(cfg: &ExperimentConfig, w_index: usize, replicate: usize, thin: usize) -> Result<Vec<RunRecord>> {
    let w = cfg.reliability_values[w_index];
    let mut world = GameWorld::new(
        cfg.game_params(w),
        child_seed(cfg.master_seed, w_index, replicate),
    )?;
    let thin = thin.max(1);
    let record = |world: &GameWorld| {
        let s = world.stats();
        RunRecord {
            w,
            replicate,
            timestep: world.timestep(),
            mean_lambda: s.mean,
            sd_lambda: s.sd,
        }
    };
    let mut out = Vec::with_capacity(cfg.timesteps / thin + 2);
    out.push(record(&world));
    for t in 1..=cfg.timesteps {
        world.step();
        if t % thin == 0 || t == cfg.timesteps {
            out.push(record(&world));
        }
    }
    Ok(out)
}

pub fn run_sweep(cfg: &ExperimentConfig, thin: usize) -> Result<Vec<RunRecord>> {
    cfg.validate()?;
    let jobs: Vec<(usize, usize)> = (0..cfg.reliability_values.len())
        .flat_map(|wi| (0..cfg.replicates).map(move |r| (wi, r)))
        .collect();
    let runs = jobs
        .par_iter()
        .map(|&(wi, r)| run_replicate(cfg, wi, r, thin))
        .collect::<Result<Vec<_>>>()?;
    Ok(runs.into_iter().flatten().collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub w: f64,
    pub replicates: usize,
    /// Mean over replicates of the final population mean of λ.
    pub mean_lambda: f64,
    /// Mean over replicates of the final population SD of λ.
    pub mean_sd: f64,
}

/// Aggregates the final row of every replicate, per reliability value.
/// Independent of the order of `records`.
pub fn summarize(records: &[RunRecord]) -> Result<Vec<Summary>> {
    if records.is_empty() {
        return Err(Error::invalid("no records to summarize"));
    }
    // w (as ordered bits of a nonnegative float) -> replicate -> final row
    let mut finals: BTreeMap<u64, BTreeMap<usize, RunRecord>> = BTreeMap::new();
    for r in records {
        let key = (r.w + 0.0).to_bits();
        let slot = finals.entry(key).or_default().entry(r.replicate).or_insert(*r);
        if r.timestep > slot.timestep {
            *slot = *r;
        }
    }
    Ok(finals
        .into_values()
        .map(|reps| {
            let n = reps.len();
            let w = reps.values().next().map(|r| r.w).unwrap_or_default();
            let mean_lambda = reps.values().map(|r| r.mean_lambda).sum::<f64>() / n as f64;
            let mean_sd = reps.values().map(|r| r.sd_lambda).sum::<f64>() / n as f64;
            Summary {
                w,
                replicates: n,
                mean_lambda,
                mean_sd,
            }
        })
        .collect())
}

/// 17 significant digits, enough to round-trip any `f64`.
pub fn format_float(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_csv<W: Write>(mut out: W, records: &[RunRecord]) -> io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in records {
        writeln!(
            out,
            "{},{},{},{},{}",
            format_float(r.w),
            r.replicate,
            r.timestep,
            format_float(r.mean_lambda),
            format_float(r.sd_lambda)
        )?;
    }
    out.flush()
}
