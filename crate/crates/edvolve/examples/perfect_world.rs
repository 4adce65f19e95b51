//! The perfect-world counterfactual: what if every invited reviewer replied
//! immediately, even when declining?
//!
//! Silence is what hurts a waiting strategy; it reinforces only after
//! learning that earlier invitations fizzled. Zeroing the failure durations
//! removes exactly that waiting, so the reference strategy speeds up at
//! every batch size while spending the same invitations. Run with
//! `cargo run --release --example perfect_world`.

use edvolve::empirical::{OutcomeModel, SamplingMode};
use edvolve::sim::{simulate_batch, InitialBatchMode, SimulationConfig, SimulationResult};
use edvolve::strategy::EvolvedReference;

fn mean_days(results: &[SimulationResult]) -> f64 {
    let sum: u64 = results.iter().map(|r| u64::from(r.elapsed_days)).sum();
    sum as f64 / results.len() as f64
}

fn main() {
    let realistic = OutcomeModel::jscs();
    let perfect = OutcomeModel::jscs().with_mode(SamplingMode::PerfectWorld);
    // Strategy mode: the policy controls invitations from day zero, so the
    // counterfactual acts on every wave it sends.
    let sim = SimulationConfig {
        initial_batch_mode: InitialBatchMode::Strategy,
        runs_per_batch: 2000,
        ..SimulationConfig::default()
    };

    println!("batch | realistic | perfect world | days saved");
    for batch in (2..=20).step_by(2) {
        let tr = mean_days(&simulate_batch(batch, &EvolvedReference, &realistic, &sim));
        let tp = mean_days(&simulate_batch(batch, &EvolvedReference, &perfect, &sim));
        println!("{batch:>5} | {tr:>9.2} | {tp:>13.2} | {:>10.2}", tr - tp);
    }
}
