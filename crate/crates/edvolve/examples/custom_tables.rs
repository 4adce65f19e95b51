//! Drive the simulator with custom duration tables instead of the bundled
//! dataset.
//!
//! Tables use the `days,freq` CSV format, so any journal's own numbers drop
//! in. Run with `cargo run --example custom_tables`.

use edvolve::empirical::{DurationTable, OutcomeModel, SamplingMode};
use edvolve::sim::{simulate_batch, SimulationConfig, SimulationResult};
use edvolve::strategy::EditorA;

fn mean_days(results: &[SimulationResult]) -> f64 {
    let sum: u64 = results.iter().map(|r| u64::from(r.elapsed_days)).sum();
    sum as f64 / results.len() as f64
}

fn main() {
    // A fictional journal: reviews land within three weeks, silence
    // resolves faster but twice as often.
    let with_review = DurationTable::parse_csv(
        "days,freq\n\
         7,2\n\
         14,5\n\
         21,3\n",
    )
    .expect("valid table");
    let without_review = DurationTable::new(&[(3, 8), (10, 12)]).expect("valid table");
    let model = OutcomeModel::new(with_review, without_review, SamplingMode::Realistic);

    println!(
        "custom model: success probability {:.3}, review mean {:.1} d, silence mean {:.1} d",
        model.success_probability(),
        model.with_review().mean_days(),
        model.without_review().mean_days()
    );

    let sim = SimulationConfig {
        runs_per_batch: 2000,
        ..SimulationConfig::default()
    };
    for batch in [2, 4, 8] {
        let results = simulate_batch(batch, &EditorA, &model, &sim);
        println!(
            "editor A, batch {batch}: mean time to two reviews {:.2} d",
            mean_days(&results)
        );
    }

    // Malformed input is rejected with the offending line.
    let err = DurationTable::parse_csv("days,freq\n7,0\n").unwrap_err();
    println!("rejected table: {err}");
}
