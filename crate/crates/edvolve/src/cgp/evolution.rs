//! The 4+1 evolutionary algorithm over CGP genomes.
//!
//! One parent, four mutated offspring per generation; an offspring at least
//! as fit as the parent replaces it, so genotypes keep drifting through
//! fitness-neutral mutations of inactive genes while fitness never worsens.

use std::io::{self, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cgp::genome::{CompiledGenome, Genome};
use crate::fitness::{self, FitnessConfig, FitnessValue};
use crate::rng::{derive_rng, derive_seed, STREAM_EVOLUTION};
use crate::sim::{SimulationConfig, ThreadModel};
use crate::strategy::StrategyState;

/// Offspring per generation.
const LAMBDA: usize = 4;
/// Random genomes drawn to seed a fresh run.
const INITIAL_POOL: usize = 5;
/// Per-state mismatch charge during simplification; dominates any active
/// count, so equivalence is never traded away for size.
const MISMATCH_PENALTY: f64 = 1.0e6;
/// Domain tag for per-generation evaluation seeds.
const EVAL_DOMAIN: u64 = 0x4556_414c;

/// How evaluation seeds evolve across generations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeedPolicy {
    /// Common random numbers: one evaluation seed for the whole run. Fitness
    /// is then a deterministic function of the genome and parent fitness is
    /// monotone.
    #[default]
    Common,
    /// A fresh evaluation seed every generation; robust against overfitting
    /// one seed, at the cost of monotonicity.
    FreshPerGeneration,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolutionConfig {
    pub p_mut: f64,
    pub columns: usize,
    pub max_generations: u64,
    /// Stop once parent fitness drops strictly below this value.
    pub target_fitness: Option<f64>,
    /// Stop after this many consecutive generations without a strict fitness
    /// improvement.
    pub stagnation_window: Option<u64>,
    pub master_seed: u64,
    pub seed_policy: SeedPolicy,
}

impl Default for EvolutionConfig {
    fn default() -> Self {
        Self {
            p_mut: 0.03,
            columns: 2000,
            max_generations: 10_000,
            target_fitness: None,
            stagnation_window: None,
            master_seed: 0,
            seed_policy: SeedPolicy::Common,
        }
    }
}

/// One line of the evolution log.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GenerationRecord {
    pub generation: u64,
    /// Parent fitness after this generation's selection.
    pub parent_fitness: f64,
    /// Whether an offspring took over this generation.
    pub replaced: bool,
}

/// Snapshot taken whenever parent fitness strictly improves.
#[derive(Debug, Clone, PartialEq)]
pub struct Improvement {
    pub generation: u64,
    pub fitness: f64,
    pub genome: Genome,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    MaxGenerations,
    TargetReached,
    Stagnated,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvolutionLog {
    /// Record 0 describes the initial parent; one record per generation after.
    pub generations: Vec<GenerationRecord>,
    pub improvements: Vec<Improvement>,
    pub stop_reason: StopReason,
}

impl EvolutionLog {
    pub fn final_fitness(&self) -> f64 {
        self.generations
            .last()
            .expect("log always holds the initial record")
            .parent_fitness
    }

    /// JSON-lines rendering: one generation record per line.
    pub fn write_jsonl(&self, mut out: impl Write) -> io::Result<()> {
        for record in &self.generations {
            serde_json::to_writer(&mut out, record)?;
            out.write_all(b"\n")?;
        }
        Ok(())
    }
}

fn eval_seed(cfg: &EvolutionConfig, generation: u64) -> u64 {
    match cfg.seed_policy {
        SeedPolicy::Common => cfg.master_seed,
        SeedPolicy::FreshPerGeneration => {
            derive_seed(cfg.master_seed, &[STREAM_EVOLUTION, EVAL_DOMAIN, generation])
        }
    }
}

/// Run the 4+1 algorithm from five random genomes; the best seeds the parent.
///
/// `oracle(genome, eval_seed)` must be deterministic in its arguments; the
/// per-generation seed is controlled by [`SeedPolicy`]. Offspring are
/// evaluated in parallel, which cannot perturb results.
pub fn evolve<F>(oracle: F, cfg: &EvolutionConfig) -> (Genome, EvolutionLog)
where
    F: Fn(&Genome, u64) -> FitnessValue + Sync,
{
    let mut rng = derive_rng(cfg.master_seed, &[STREAM_EVOLUTION]);
    let pool: Vec<Genome> = (0..INITIAL_POOL)
        .map(|_| Genome::random(cfg.columns, &mut rng))
        .collect();
    let seed0 = eval_seed(cfg, 0);
    let fits: Vec<FitnessValue> = pool.par_iter().map(|g| oracle(g, seed0)).collect();
    let best = argmin(&fits);
    let parent = pool.into_iter().nth(best).expect("pool has five genomes");
    run(parent, fits[best], rng, oracle, cfg)
}

/// Run the 4+1 algorithm from an explicit seed genome.
pub fn evolve_from<F>(parent: Genome, oracle: F, cfg: &EvolutionConfig) -> (Genome, EvolutionLog)
where
    F: Fn(&Genome, u64) -> FitnessValue + Sync,
{
    let rng = derive_rng(cfg.master_seed, &[STREAM_EVOLUTION]);
    let parent_fit = oracle(&parent, eval_seed(cfg, 0));
    run(parent, parent_fit, rng, oracle, cfg)
}

fn run<F>(
    mut parent: Genome,
    mut parent_fit: FitnessValue,
    mut rng: crate::rng::SimRng,
    oracle: F,
    cfg: &EvolutionConfig,
) -> (Genome, EvolutionLog)
where
    F: Fn(&Genome, u64) -> FitnessValue + Sync,
{
    let mut log = EvolutionLog {
        generations: vec![GenerationRecord {
            generation: 0,
            parent_fitness: parent_fit.value,
            replaced: false,
        }],
        improvements: vec![Improvement {
            generation: 0,
            fitness: parent_fit.value,
            genome: parent.clone(),
        }],
        stop_reason: StopReason::MaxGenerations,
    };

    let mut generation = 0u64;
    let mut stagnant = 0u64;
    loop {
        if cfg
            .target_fitness
            .is_some_and(|target| parent_fit.value < target)
        {
            log.stop_reason = StopReason::TargetReached;
            break;
        }
        if cfg.stagnation_window.is_some_and(|window| stagnant >= window) {
            log.stop_reason = StopReason::Stagnated;
            break;
        }
        if generation >= cfg.max_generations {
            log.stop_reason = StopReason::MaxGenerations;
            break;
        }
        generation += 1;

        // Mutations are drawn sequentially from the single evolution stream;
        // only the fitness evaluations run in parallel.
        let offspring: Vec<Genome> = (0..LAMBDA).map(|_| parent.mutate(cfg.p_mut, &mut rng)).collect();
        let seed = eval_seed(cfg, generation);
        let fits: Vec<FitnessValue> = offspring.par_iter().map(|g| oracle(g, seed)).collect();
        let best = argmin(&fits);

        let replaced = fits[best].value <= parent_fit.value;
        if replaced {
            let improved = fits[best].value < parent_fit.value;
            parent = offspring.into_iter().nth(best).expect("four offspring");
            parent_fit = fits[best];
            if improved {
                log.improvements.push(Improvement {
                    generation,
                    fitness: parent_fit.value,
                    genome: parent.clone(),
                });
                stagnant = 0;
            } else {
                stagnant += 1;
            }
        } else {
            stagnant += 1;
        }
        log.generations.push(GenerationRecord {
            generation,
            parent_fitness: parent_fit.value,
            replaced,
        });
    }

    (parent, log)
}

/// Index of the smallest fitness; ties go to the lowest index.
fn argmin(fits: &[FitnessValue]) -> usize {
    let mut best = 0;
    for (i, fit) in fits.iter().enumerate().skip(1) {
        if fit.value < fits[best].value {
            best = i;
        }
    }
    best
}

/// The standard fitness oracle: compile the genome, simulate, score.
///
/// The oracle's second argument replaces the simulation master seed, which is
/// how [`SeedPolicy::FreshPerGeneration`] re-randomizes evaluations.
pub fn review_fitness_oracle<M>(
    model: &M,
    fitness_cfg: FitnessConfig,
    sim_cfg: SimulationConfig,
) -> impl Fn(&Genome, u64) -> FitnessValue + Sync + '_
where
    M: ThreadModel,
{
    move |genome, seed| {
        let compiled = CompiledGenome::compile(genome);
        let run_cfg = SimulationConfig {
            master_seed: seed,
            ..sim_cfg
        };
        fitness::evaluate(&compiled, model, &fitness_cfg, &run_cfg)
    }
}

/// Count of domain states where two compiled genomes disagree.
pub fn mismatches(a: &CompiledGenome, b: &CompiledGenome, domain: &[StrategyState]) -> usize {
    domain
        .iter()
        .filter(|&&state| a.eval(state) != b.eval(state))
        .count()
}

/// Shrink a genome's active-node count without changing its behavior.
///
/// A second 4+1 run starts from `genome` itself with fitness = mismatches
/// against the original over `domain` (weighted prohibitively) plus the
/// active-node count. The seed genome scores zero mismatches, so the result
/// is guaranteed to agree with `genome` on every domain state and to use at
/// most as many active nodes.
pub fn simplify(genome: &Genome, cfg: &EvolutionConfig, domain: &[StrategyState]) -> Genome {
    let original = CompiledGenome::compile(genome);
    let reference: Vec<i64> = domain.iter().map(|&s| original.eval(s)).collect();
    let oracle = |candidate: &Genome, _seed: u64| {
        let compiled = CompiledGenome::compile(candidate);
        let wrong = domain
            .iter()
            .zip(&reference)
            .filter(|&(&state, &want)| compiled.eval(state) != want)
            .count();
        FitnessValue {
            value: wrong as f64 * MISMATCH_PENALTY + compiled.steps_len() as f64,
            penalized: false,
            invalid_batch_count: 0,
        }
    };
    let (best, _log) = evolve_from(genome.clone(), oracle, cfg);
    assert_eq!(
        mismatches(&CompiledGenome::compile(&best), &original, domain),
        0,
        "simplification must preserve the phenotype"
    );
    best
}

/// The domain simplification preserves by default: every state a strategy
/// can be consulted in across the standard batch range.
pub fn default_simplify_domain() -> Vec<StrategyState> {
    StrategyState::enumerate(2, 2..=20)
}
