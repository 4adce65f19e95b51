//! Shrink an evolved genome without changing any decision it makes.
//!
//! Neutral drift leaves evolved genomes with more active nodes than their
//! behavior needs. `simplify` keeps mutating while accepting only changes
//! that reduce the active count and leave the output identical on every
//! reachable strategy state. Run with
//! `cargo run --release --example simplify_genome`.

use edvolve::cgp::{
    default_simplify_domain, evolve, mismatches, review_fitness_oracle, simplify,
    CompiledGenome, EvolutionConfig, Genome, N_INPUTS,
};
use edvolve::empirical::OutcomeModel;
use edvolve::fitness::FitnessConfig;
use edvolve::sim::SimulationConfig;

fn phenotype(genome: &Genome) {
    let names = ["required", "received", "active", "batch"];
    let operand = |i: usize| {
        if i < N_INPUTS {
            names[i].to_string()
        } else {
            format!("n{i}")
        }
    };
    for &index in &genome.active_nodes() {
        let node = genome.nodes()[index - N_INPUTS];
        println!(
            "  n{index} = {:?}({}, {})",
            node.function,
            operand(node.in1),
            operand(node.in2)
        );
    }
    println!("  output = {}", operand(genome.output_gene()));
}

fn main() {
    let model = OutcomeModel::jscs();
    let fit = FitnessConfig {
        runs_per_batch: 150,
        ..FitnessConfig::default()
    };
    let evo = EvolutionConfig {
        columns: 80,
        max_generations: 250,
        master_seed: 7,
        ..EvolutionConfig::default()
    };
    let oracle = review_fitness_oracle(&model, fit, SimulationConfig::default());
    let (best, _) = evolve(oracle, &evo);

    let domain = default_simplify_domain();
    let lean = simplify(&best, &evo, &domain);
    let differences = mismatches(
        &CompiledGenome::compile(&lean),
        &CompiledGenome::compile(&best),
        &domain,
    );

    println!(
        "active nodes {} -> {}, {} decision mismatches on {} states",
        best.active_count(),
        lean.active_count(),
        differences,
        domain.len()
    );
    assert_eq!(differences, 0);
    println!("simplified phenotype:");
    phenotype(&lean);
}
