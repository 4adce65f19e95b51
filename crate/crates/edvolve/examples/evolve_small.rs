//! Evolve an editorial strategy at toy scale and inspect the winner.
//!
//! A few hundred generations at 200 runs per batch already finds programs
//! that outrank both hand-coded editors. Run with
//! `cargo run --release --example evolve_small`.

use edvolve::cgp::{evolve, review_fitness_oracle, CompiledGenome, EvolutionConfig};
use edvolve::empirical::OutcomeModel;
use edvolve::fitness::{evaluate, FitnessConfig};
use edvolve::sim::SimulationConfig;
use edvolve::strategy::{EditorA, EditorB, Strategy, StrategyState};

fn main() {
    let model = OutcomeModel::jscs();
    let fit = FitnessConfig {
        runs_per_batch: 200,
        ..FitnessConfig::default()
    };
    let sim = SimulationConfig {
        master_seed: 7,
        ..SimulationConfig::default()
    };
    let evo = EvolutionConfig {
        columns: 100,
        max_generations: 1500,
        master_seed: 7,
        ..EvolutionConfig::default()
    };

    let oracle = review_fitness_oracle(&model, fit, sim);
    let (best, log) = evolve(oracle, &evo);

    println!("improvements:");
    for step in &log.improvements {
        println!(
            "  generation {:>4}: fitness {:>10.3}, {} active nodes",
            step.generation,
            step.fitness,
            step.genome.active_count()
        );
    }
    println!("stopped by {:?} at fitness {:.3}", log.stop_reason, log.final_fitness());

    let a = evaluate(&EditorA, &model, &fit, &sim).value;
    let b = evaluate(&EditorB, &model, &fit, &sim).value;
    println!("editor A = {a:.3}, editor B = {b:.3}");

    // How the winner behaves at batch size four.
    let compiled = CompiledGenome::compile(&best);
    println!("decision table, batch size 4 (received reviews, active threads -> invitations):");
    for state in StrategyState::enumerate(2, [4]) {
        println!(
            "  ({}, {}) -> {}",
            state.received_reviews,
            state.active_threads,
            compiled.decide(state).new_threads
        );
    }
}
