//! Reproduce the baseline comparison: editor B collects reviews faster than
//! editor A at every batch size, but spends more reviewers doing it, and the
//! area under the efficiency curve ranks editor A ahead overall.
//!
//! Run with `cargo run --release --example compare_editors`.

use edvolve::empirical::OutcomeModel;
use edvolve::fitness::{evaluate, FitnessConfig};
use edvolve::sim::{simulate_batch, SimulationConfig, SimulationResult};
use edvolve::strategy::{EditorA, EditorB};

fn means(results: &[SimulationResult]) -> (f64, f64) {
    let runs = results.len() as f64;
    let time: u64 = results.iter().map(|r| u64::from(r.elapsed_days)).sum();
    let reviewers: u64 = results
        .iter()
        .map(|r| u64::from(r.effective_reviewers))
        .sum();
    (time as f64 / runs, reviewers as f64 / runs)
}

fn main() {
    let model = OutcomeModel::jscs();
    let sim = SimulationConfig {
        runs_per_batch: 2000,
        ..SimulationConfig::default()
    };

    println!("batch | editor A time  reviewers | editor B time  reviewers");
    for batch in 3..=10 {
        let (ta, xa) = means(&simulate_batch(batch, &EditorA, &model, &sim));
        let (tb, xb) = means(&simulate_batch(batch, &EditorB, &model, &sim));
        println!("{batch:>5} | {ta:>13.2} {xa:>10.2} | {tb:>13.2} {xb:>10.2}");
    }

    let fit = FitnessConfig {
        runs_per_batch: 2000,
        ..FitnessConfig::default()
    };
    let a = evaluate(&EditorA, &model, &fit, &sim);
    let b = evaluate(&EditorB, &model, &fit, &sim);
    println!("\nAUC fitness (lower is better):");
    println!("  editor A = {:.3}", a.value);
    println!("  editor B = {:.3}", b.value);
    assert!(a.value < b.value, "editor A holds the better curve");
}
