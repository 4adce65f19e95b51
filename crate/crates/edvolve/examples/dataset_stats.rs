//! Inspect the bundled JSCS duration tables and sample a few threads.
//!
//! Run with `cargo run --example dataset_stats`.

use edvolve::empirical::{DurationTable, OutcomeModel, SamplingMode};
use edvolve::rng::derive_rng;

fn describe(name: &str, table: &DurationTable) {
    println!(
        "{name:>14}: {} day values, total frequency {}, mean {:.2} days",
        table.entries().len(),
        table.total_frequency(),
        table.mean_days(),
    );
}

fn main() {
    let model = OutcomeModel::jscs();
    describe("with review", model.with_review());
    describe("no review", model.without_review());
    println!(
        "invitation success probability: {:.4}",
        model.success_probability()
    );

    for mode in [SamplingMode::Realistic, SamplingMode::PerfectWorld] {
        let model = OutcomeModel::jscs().with_mode(mode);
        let mut rng = derive_rng(42, &[0]);
        print!("{mode} samples:");
        for _ in 0..10 {
            let thread = model.sample(&mut rng);
            let marker = if thread.has_review { "R" } else { "-" };
            print!(" {}{marker}", thread.duration);
        }
        println!();
    }
}
