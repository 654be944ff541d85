//! The two-dimensional language game.
//!
//! Every agent describes the unit square with the same two labels
//! `L1 = L2 = <1, euclidean, U[0,1]>`, one per dimension, and weighs the
//! first dimension by its own `λ` (the second by `1 − λ`). In a dialogue a
//! speaker asserts the conjunction `±L1 ∧ ±L2` that best describes a sampled
//! element. The listener evaluates that assertion with its own weight; if the
//! value does not exceed the speaker's reliability `w` it moves `λ` a step of
//! size `h` towards the weight `A` at which the assertion would be exactly `w`
//! appropriate, clamped to `[0, 1]`.
//!
//! For `w = 1` the clamped target is always 0 or 1, so the expected weight
//! contracts towards the probability `p⁺` that an element lands in the
//! positive region; [`predicted_fixed_point`] computes that probability in
//! closed form.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::semantics::{Label, Sign};

pub const DEFAULT_LEARNING_RATE: f64 = 1e-3;

/// A point of the conceptual space `[0,1] × [0,1]`.
pub type Element = [f64; 2];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Agent {
    /// Weight of dimension 1; dimension 2 gets `1 − lambda`.
    pub lambda: f64,
    /// Reliability this agent is credited with when it speaks.
    pub reliability: f64,
    pub learning_rate: f64,
}

impl Agent {
    pub fn new(lambda: f64, reliability: f64) -> Self {
        Agent {
            lambda,
            reliability,
            learning_rate: DEFAULT_LEARNING_RATE,
        }
    }

    pub fn with_learning_rate(mut self, h: f64) -> Self {
        self.learning_rate = h;
        self
    }
}

/// A conjunction `±L1 ∧ ±L2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Assertion {
    pub first: Sign,
    pub second: Sign,
}

impl Assertion {
    pub const ALL: [Assertion; 4] = [
        Assertion::new(Sign::Positive, Sign::Positive),
        Assertion::new(Sign::Positive, Sign::Negative),
        Assertion::new(Sign::Negative, Sign::Positive),
        Assertion::new(Sign::Negative, Sign::Negative),
    ];

    pub const fn new(first: Sign, second: Sign) -> Self {
        Assertion { first, second }
    }

    /// Signed memberships `(s1, s2)` under this assertion's polarities.
    #[inline]
    pub fn signed(&self, memberships: [f64; 2]) -> [f64; 2] {
        [
            self.first.apply(memberships[0]),
            self.second.apply(memberships[1]),
        ]
    }

    /// `λ·s1 + (1 − λ)·s2`.
    #[inline]
    pub fn value(&self, lambda: f64, memberships: [f64; 2]) -> f64 {
        let [s1, s2] = self.signed(memberships);
        lambda * s1 + (1.0 - lambda) * s2
    }

    /// Best assertion for the given memberships. The value is separable, so
    /// each polarity is chosen on its own; ties go to the positive sign.
    #[inline]
    pub fn best(memberships: [f64; 2]) -> Self {
        let pick = |m: f64| {
            if m >= 1.0 - m {
                Sign::Positive
            } else {
                Sign::Negative
            }
        };
        Assertion::new(pick(memberships[0]), pick(memberships[1]))
    }
}

impl std::fmt::Display for Assertion {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let sym = |s: Sign| if s.is_positive() { "" } else { "¬" };
        write!(f, "{}L1 ∧ {}L2", sym(self.first), sym(self.second))
    }
}

/// The label pair shared by every agent.
#[derive(Debug, Clone, PartialEq)]
pub struct GameLabels {
    pub first: Label,
    pub second: Label,
}

impl Default for GameLabels {
    fn default() -> Self {
        let l = Label::scalar(1.0, 1.0).expect("unit label is valid");
        GameLabels {
            first: l.clone(),
            second: l,
        }
    }
}

impl GameLabels {
    /// Positive-sign appropriateness of each label at its coordinate.
    pub fn memberships(&self, x: Element) -> [f64; 2] {
        // both labels are one-dimensional, so appropriateness cannot fail
        let mu = |l: &Label, v: f64| l.threshold.tail((v - l.prototype[0]).abs());
        [mu(&self.first, x[0]), mu(&self.second, x[1])]
    }
}

/// Independent uniform sampling of each coordinate on `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ElementDistribution {
    pub bounds: [(f64, f64); 2],
}

impl ElementDistribution {
    pub fn new(first: (f64, f64), second: (f64, f64)) -> Result<Self> {
        let d = ElementDistribution {
            bounds: [first, second],
        };
        d.validate()?;
        Ok(d)
    }

    pub fn unit() -> Self {
        ElementDistribution {
            bounds: [(0.0, 1.0), (0.0, 1.0)],
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (i, &(a, b)) in self.bounds.iter().enumerate() {
            if !(0.0 <= a && a < b && b <= 1.0) {
                return Err(Error::invalid(format!(
                    "interval {} must satisfy 0 <= a < b <= 1, got [{a}, {b}]",
                    i + 1
                )));
            }
        }
        Ok(())
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Element {
        let draw = |rng: &mut R, (a, b): (f64, f64)| a + (b - a) * rng.random::<f64>();
        let x1 = draw(rng, self.bounds[0]);
        let x2 = draw(rng, self.bounds[1]);
        [x1, x2]
    }
}

/// Weight `A` at which an assertion is exactly `w` appropriate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UpdateTarget {
    pub unclamped: f64,
    pub clamped: f64,
}

/// `A = (w − s2) / (s1 − s2)` and its clamp to `[0, 1]`; `None` when
/// `s1 = s2`, where no weight satisfies the constraint uniquely.
#[inline]
pub fn update_target(assertion: Assertion, memberships: [f64; 2], w: f64) -> Option<UpdateTarget> {
    let [s1, s2] = assertion.signed(memberships);
    let denom = s1 - s2;
    if denom == 0.0 {
        return None;
    }
    let unclamped = (w - s2) / denom;
    // + 0.0 folds a negative zero into positive zero
    let clamped = unclamped.clamp(0.0, 1.0) + 0.0;
    Some(UpdateTarget { unclamped, clamped })
}

/// New weight of `lambda` after hearing `assertion` about an element with
/// the given label memberships from a speaker of reliability `w`.
#[inline]
pub fn updated_lambda(lambda: f64, h: f64, assertion: Assertion, memberships: [f64; 2], w: f64) -> f64 {
    if assertion.value(lambda, memberships) > w {
        return lambda;
    }
    match update_target(assertion, memberships, w) {
        Some(t) => lambda + h * (t.clamped - lambda),
        None => lambda,
    }
}

pub fn assertion_value(agent: &Agent, assertion: Assertion, x: Element) -> f64 {
    assertion.value(agent.lambda, GameLabels::default().memberships(x))
}

pub fn best_assertion(_agent: &Agent, x: Element) -> Assertion {
    Assertion::best(GameLabels::default().memberships(x))
}

/// The listener's weight after the dialogue.
pub fn listener_update(listener: &Agent, assertion: Assertion, x: Element, speaker_w: f64) -> f64 {
    updated_lambda(
        listener.lambda,
        listener.learning_rate,
        assertion,
        GameLabels::default().memberships(x),
        speaker_w,
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PopulationStats {
    pub mean: f64,
    /// Population (divide-by-N) standard deviation.
    pub sd: f64,
}

pub fn population_stats(lambdas: impl IntoIterator<Item = f64> + Clone) -> PopulationStats {
    let (n, sum) = lambdas
        .clone()
        .into_iter()
        .fold((0usize, 0.0), |(n, s), v| (n + 1, s + v));
    if n == 0 {
        return PopulationStats { mean: f64::NAN, sd: f64::NAN };
    }
    let mean = sum / n as f64;
    let var = lambdas
        .into_iter()
        .map(|v| (v - mean) * (v - mean))
        .sum::<f64>()
        / n as f64;
    PopulationStats { mean, sd: var.sqrt() }
}

/// How dialogues are scheduled within one timestep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Schedule {
    /// Every ordered (speaker, listener) pair holds one dialogue, in a
    /// shuffled order: `N(N − 1)` dialogues per timestep.
    #[default]
    AllPairs,
    /// Every agent listens once, in a shuffled order, to a uniformly chosen
    /// other agent: `N` dialogues per timestep.
    RandomSpeaker,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GameParams {
    pub population_size: usize,
    pub schedule: Schedule,
    pub reliability: f64,
    pub learning_rate: f64,
    pub distribution: ElementDistribution,
}

impl GameParams {
    pub fn validate(&self) -> Result<()> {
        if self.population_size < 2 {
            return Err(Error::invalid("population needs at least two agents"));
        }
        if !(0.0..=1.0).contains(&self.reliability) {
            return Err(Error::invalid(format!(
                "reliability must lie in [0, 1], got {}",
                self.reliability
            )));
        }
        if !(self.learning_rate.is_finite() && (0.0..=1.0).contains(&self.learning_rate)) {
            return Err(Error::invalid(format!(
                "learning rate must lie in [0, 1], got {}",
                self.learning_rate
            )));
        }
        self.distribution.validate()
    }
}

/// A population playing the game, with its own random stream.
#[derive(Debug, Clone)]
pub struct GameWorld {
    agents: Vec<Agent>,
    labels: GameLabels,
    distribution: ElementDistribution,
    schedule: Schedule,
    rng: ChaCha8Rng,
    order: Vec<(usize, usize)>,
    timestep: usize,
}

impl GameWorld {
    /// Agents start with independent `U[0,1]` weights drawn from the seeded stream.
    pub fn new(params: GameParams, seed: u64) -> Result<Self> {
        params.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let agents = (0..params.population_size)
            .map(|_| {
                Agent::new(rng.random::<f64>(), params.reliability)
                    .with_learning_rate(params.learning_rate)
            })
            .collect();
        Self::with_agents(agents, params.distribution, params.schedule, rng)
    }

    pub fn with_agents(
        agents: Vec<Agent>,
        distribution: ElementDistribution,
        schedule: Schedule,
        rng: ChaCha8Rng,
    ) -> Result<Self> {
        let n = agents.len();
        if n < 2 {
            return Err(Error::invalid("population needs at least two agents"));
        }
        distribution.validate()?;
        // (listener, speaker); the speaker slot is redrawn for RandomSpeaker
        let order = match schedule {
            Schedule::AllPairs => (0..n)
                .flat_map(|l| (0..n).filter(move |&s| s != l).map(move |s| (l, s)))
                .collect(),
            Schedule::RandomSpeaker => (0..n).map(|l| (l, l)).collect(),
        };
        Ok(GameWorld {
            agents,
            labels: GameLabels::default(),
            distribution,
            schedule,
            rng,
            order,
            timestep: 0,
        })
    }

    pub fn agents(&self) -> &[Agent] {
        &self.agents
    }

    pub fn timestep(&self) -> usize {
        self.timestep
    }

    pub fn lambdas(&self) -> impl Iterator<Item = f64> + Clone + '_ {
        self.agents.iter().map(|a| a.lambda)
    }

    pub fn stats(&self) -> PopulationStats {
        population_stats(self.lambdas())
    }

    /// One dialogue with `listener` hearing from `speaker` about `x`.
    fn dialogue(&mut self, listener: usize, speaker: usize, x: Element) {
        let m = self.labels.memberships(x);
        let assertion = Assertion::best(m);
        let w = self.agents[speaker].reliability;
        let agent = &mut self.agents[listener];
        agent.lambda = updated_lambda(agent.lambda, agent.learning_rate, assertion, m, w);
    }

    pub fn schedule(&self) -> Schedule {
        self.schedule
    }

    /// One timestep of dialogues according to the schedule; every dialogue
    /// is about a freshly sampled element.
    pub fn step(&mut self) {
        let n = self.agents.len();
        let mut order = std::mem::take(&mut self.order);
        order.shuffle(&mut self.rng);
        for &(listener, speaker) in &order {
            let x = self.distribution.sample(&mut self.rng);
            let speaker = match self.schedule {
                Schedule::AllPairs => speaker,
                Schedule::RandomSpeaker => {
                    let s = self.rng.random_range(0..n - 1);
                    if s >= listener {
                        s + 1
                    } else {
                        s
                    }
                }
            };
            self.dialogue(listener, speaker, x);
        }
        self.order = order;
        self.timestep += 1;
    }

    pub fn run(&mut self, timesteps: usize) {
        for _ in 0..timesteps {
            self.step();
        }
    }
}

/// Monte Carlo estimate of `P(A − λ ≥ 0)` for elements drawn from `dist`,
/// where `A` is the clamped target for the best assertion. Elements with
/// `s1 = s2` have no target and count as outside the region.
pub fn positive_region_probability<R: Rng + ?Sized>(
    dist: &ElementDistribution,
    lambda: f64,
    w: f64,
    samples: usize,
    rng: &mut R,
) -> Result<f64> {
    if samples == 0 {
        return Err(Error::invalid("need at least one sample"));
    }
    dist.validate()?;
    let labels = GameLabels::default();
    let hits = (0..samples)
        .filter(|_| {
            let m = labels.memberships(dist.sample(rng));
            update_target(Assertion::best(m), m, w).is_some_and(|t| t.clamped - lambda >= 0.0)
        })
        .count();
    Ok(hits as f64 / samples as f64)
}

/// Folded coordinate `max(x, 1 − x)` for `x ~ U[a, b]`: CDF at `t ≥ 1/2`.
fn folded_cdf((a, b): (f64, f64), t: f64) -> f64 {
    let overlap = (b.min(t) - a.max(1.0 - t)).max(0.0);
    overlap / (b - a)
}

/// `p⁺` for fully reliable speakers, in closed form.
///
/// With `w = 1` the element is in the positive region exactly when the best
/// signed membership on dimension 1 is at least that on dimension 2. For
/// these labels the best signed membership is `max(x, 1 − x)`, so
/// `p⁺ = P(T1 ≥ T2)` with `T_i` the folded coordinates. `T1` is a mixture of
/// at most two uniform pieces and the CDF of `T2` is piecewise linear, so the
/// expectation is integrated exactly segment by segment.
pub fn predicted_fixed_point(dist: &ElementDistribution) -> Result<f64> {
    dist.validate()?;
    let (a1, b1) = dist.bounds[0];
    let (a2, b2) = dist.bounds[1];
    let width = b1 - a1;

    // T1 pieces: the part of [a1, b1] above 1/2 maps to itself, the part
    // below is mirrored.
    let mut pieces = Vec::with_capacity(2);
    if b1 > 0.5 {
        pieces.push((a1.max(0.5), b1));
    }
    if a1 < 0.5 {
        pieces.push((1.0 - b1.min(0.5), 1.0 - a1));
    }

    let breaks = [0.5, a2, b2, 1.0 - a2, 1.0 - b2];
    let mut p = 0.0;
    for (lo, hi) in pieces {
        let len = hi - lo;
        if len <= 0.0 {
            continue;
        }
        let mut knots: Vec<f64> = breaks.iter().copied().filter(|&k| k > lo && k < hi).collect();
        knots.push(lo);
        knots.push(hi);
        knots.sort_by(f64::total_cmp);
        let integral: f64 = knots
            .windows(2)
            .map(|s| 0.5 * (s[1] - s[0]) * (folded_cdf((a2, b2), s[0]) + folded_cdf((a2, b2), s[1])))
            .sum();
        // piece mass is len / width; mean of the CDF over it is integral / len
        p += integral / width;
    }
    Ok(p.clamp(0.0, 1.0))
}
