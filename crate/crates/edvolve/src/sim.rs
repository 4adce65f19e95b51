//! Event-driven Monte-Carlo simulation of one article's review process.
//!
//! One simulation run follows a single manuscript from the first invitations
//! until the required number of reviews has arrived, or until the strategy
//! makes an invalid decision. Time advances from finish day to finish day;
//! nothing observable happens between thread completions.

use rayon::prelude::*;
use serde::Serialize;

use crate::empirical::{OutcomeModel, SampledThread};
use crate::rng::{derive_rng, SimRng, STREAM_SIMULATION};
use crate::strategy::{Strategy, StrategyState, Validity};

/// Iteration guard: no valid run on a sane model needs this many events.
const MAX_ITERATIONS: u32 = 1_000_000;

/// Source of sampled thread outcomes. [`OutcomeModel`] is the canonical
/// implementation; tests substitute degenerate models.
pub trait ThreadModel: Send + Sync {
    fn sample_thread(&self, rng: &mut SimRng) -> SampledThread;
}

impl ThreadModel for OutcomeModel {
    fn sample_thread(&self, rng: &mut SimRng) -> SampledThread {
        self.sample(rng)
    }
}

/// One running invitation: started at `offset`, resolves after `duration`
/// days, yielding a review or not.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ReviewThread {
    pub offset: u32,
    pub duration: u32,
    pub has_review: bool,
}

impl ReviewThread {
    pub fn finish_day(&self) -> u32 {
        self.offset + self.duration
    }
}

/// How the first invitations of a run are chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialBatchMode {
    /// A full batch goes out on day 0.
    #[default]
    Full,
    /// The strategy is consulted on day 0 with no threads active, and its
    /// (validated) answer sets the initial invitation count.
    Strategy,
}

/// Parameters shared by every run of a simulation campaign.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SimulationConfig {
    pub required_reviews: u32,
    pub runs_per_batch: u32,
    pub initial_batch_mode: InitialBatchMode,
    pub master_seed: u64,
}

impl Default for SimulationConfig {
    fn default() -> Self {
        Self {
            required_reviews: 2,
            runs_per_batch: 10_000,
            initial_batch_mode: InitialBatchMode::Full,
            master_seed: 0,
        }
    }
}

/// Outcome of one simulation run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SimulationResult {
    /// Days from first invitation to the arrival of the last required review.
    pub elapsed_days: u32,
    /// Total invitations issued.
    pub effective_reviewers: u32,
    /// True when the strategy made an invalid decision; the other fields then
    /// hold the values at the moment of the violation.
    pub critical_error: bool,
}

/// Mean review time and mean invitation count for one batch size.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EfficiencyPoint {
    pub batch_size: u32,
    pub mean_effective_reviewers: f64,
    pub mean_review_time: f64,
}

/// Efficiency points for every batch size that completed without a critical
/// error, plus the batch sizes that did not.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EfficiencyCurve {
    pub points: Vec<EfficiencyPoint>,
    pub invalid_batches: Vec<u32>,
}

impl EfficiencyCurve {
    /// CSV rendering: one row per completed batch size, six decimals.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("batch_size,effective_reviewers,review_time_days\n");
        for p in &self.points {
            out.push_str(&format!(
                "{},{:.6},{:.6}\n",
                p.batch_size, p.mean_effective_reviewers, p.mean_review_time
            ));
        }
        out
    }
}

/// RNG stream for one (batch size, run index) cell. Public so that external
/// reimplementations can replay the exact same draws.
pub fn run_rng(master_seed: u64, batch_size: u32, run_index: u32) -> SimRng {
    derive_rng(
        master_seed,
        &[STREAM_SIMULATION, u64::from(batch_size), u64::from(run_index)],
    )
}

/// Simulate one article's review process under `strategy`.
///
/// Thread outcomes are sampled at invitation time, in invitation order, so
/// the rng draw sequence is a pure function of the decisions taken.
pub fn simulate_article<M, S>(
    batch_size: u32,
    strategy: &S,
    model: &M,
    cfg: &SimulationConfig,
    rng: &mut SimRng,
) -> SimulationResult
where
    M: ThreadModel + ?Sized,
    S: Strategy + ?Sized,
{
    let mut threads: Vec<ReviewThread> = Vec::with_capacity(batch_size as usize);
    let mut elapsed: u32 = 0;
    let mut received: u32 = 0;
    let mut effective: u32 = 0;

    // Day 0: the initial invitations.
    let initial = match cfg.initial_batch_mode {
        InitialBatchMode::Full => i64::from(batch_size),
        InitialBatchMode::Strategy => {
            let state = StrategyState {
                required_reviews: cfg.required_reviews,
                received_reviews: 0,
                active_threads: 0,
                batch_size,
            };
            let decision = strategy.decide(state);
            if let Validity::Invalid(_) = decision.validate(state) {
                return SimulationResult {
                    elapsed_days: 0,
                    effective_reviewers: 0,
                    critical_error: true,
                };
            }
            decision.new_threads
        }
    };
    for _ in 0..initial {
        let sample = model.sample_thread(rng);
        threads.push(ReviewThread {
            offset: 0,
            duration: sample.duration,
            has_review: sample.has_review,
        });
    }
    effective += initial as u32;

    let mut iterations = 0u32;
    while received < cfg.required_reviews {
        iterations += 1;
        assert!(
            iterations <= MAX_ITERATIONS,
            "simulation exceeded {MAX_ITERATIONS} events"
        );

        // Advance to the earliest finish day and retire everything that
        // finishes on it; a day's retirements all precede the consultation.
        let next = threads
            .iter()
            .map(ReviewThread::finish_day)
            .min()
            .expect("validity constraints keep at least one thread active");
        elapsed = next;
        threads.retain(|t| {
            if t.finish_day() == next {
                if t.has_review {
                    received += 1;
                }
                false
            } else {
                true
            }
        });
        if received >= cfg.required_reviews {
            break;
        }

        let state = StrategyState {
            required_reviews: cfg.required_reviews,
            received_reviews: received,
            active_threads: threads.len() as u32,
            batch_size,
        };
        let decision = strategy.decide(state);
        if let Validity::Invalid(_) = decision.validate(state) {
            return SimulationResult {
                elapsed_days: elapsed,
                effective_reviewers: effective,
                critical_error: true,
            };
        }
        for _ in 0..decision.new_threads {
            let sample = model.sample_thread(rng);
            threads.push(ReviewThread {
                offset: elapsed,
                duration: sample.duration,
                has_review: sample.has_review,
            });
        }
        effective += decision.new_threads as u32;
        assert!(threads.len() as u32 <= batch_size, "batch cap violated");
    }

    SimulationResult {
        elapsed_days: elapsed,
        effective_reviewers: effective,
        critical_error: false,
    }
}

/// Run `cfg.runs_per_batch` independent simulations of one batch size.
///
/// Runs execute in parallel; each derives its own rng stream from
/// (master_seed, batch_size, run_index), so results are independent of
/// scheduling and thread count, and are returned in run order.
pub fn simulate_batch<M, S>(
    batch_size: u32,
    strategy: &S,
    model: &M,
    cfg: &SimulationConfig,
) -> Vec<SimulationResult>
where
    M: ThreadModel + ?Sized,
    S: Strategy + ?Sized,
{
    (0..cfg.runs_per_batch)
        .into_par_iter()
        .map(|run| {
            let mut rng = run_rng(cfg.master_seed, batch_size, run);
            simulate_article(batch_size, strategy, model, cfg, &mut rng)
        })
        .collect()
}

/// Build the efficiency curve over `min_batch..=max_batch`.
///
/// A batch size whose runs hit any critical error contributes no point and is
/// listed in `invalid_batches` instead. Means are computed from exact integer
/// sums, so they are bit-identical regardless of parallelism.
pub fn efficiency_curve<M, S>(
    strategy: &S,
    model: &M,
    cfg: &SimulationConfig,
    min_batch: u32,
    max_batch: u32,
) -> EfficiencyCurve
where
    M: ThreadModel + ?Sized,
    S: Strategy + ?Sized,
{
    assert!(
        2 <= min_batch && min_batch <= max_batch,
        "batch range must satisfy 2 <= min <= max"
    );
    let mut points = Vec::new();
    let mut invalid_batches = Vec::new();
    for batch_size in min_batch..=max_batch {
        let results = simulate_batch(batch_size, strategy, model, cfg);
        if results.iter().any(|r| r.critical_error) {
            invalid_batches.push(batch_size);
            continue;
        }
        let runs = results.len() as f64;
        let time_sum: u64 = results.iter().map(|r| u64::from(r.elapsed_days)).sum();
        let effective_sum: u64 = results
            .iter()
            .map(|r| u64::from(r.effective_reviewers))
            .sum();
        points.push(EfficiencyPoint {
            batch_size,
            mean_effective_reviewers: effective_sum as f64 / runs,
            mean_review_time: time_sum as f64 / runs,
        });
    }
    EfficiencyCurve {
        points,
        invalid_batches,
    }
}
