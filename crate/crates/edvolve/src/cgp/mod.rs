//! Cartesian genetic programming: genome model and the 4+1 evolution engine.

mod evolution;
mod genome;

pub use evolution::{
    default_simplify_domain, evolve, evolve_from, mismatches, review_fitness_oracle, simplify,
    EvolutionConfig, EvolutionLog, GenerationRecord, Improvement, SeedPolicy, StopReason,
};
pub use genome::{
    apply_function, CompiledGenome, FunctionId, Genome, GenomeError, Node, FUNCTIONS, N_INPUTS,
};
