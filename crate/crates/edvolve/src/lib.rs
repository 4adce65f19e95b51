//! Evolving journal editorial strategies with Cartesian genetic programming.
//!
//! An editorial strategy decides, at each point of a manuscript's review
//! process, how many new reviewer invitations to send. This crate models the
//! review process as a Monte-Carlo simulation over empirical duration
//! distributions, scores strategies by the area under their review-time vs
//! effective-reviewers efficiency curve, and searches for better strategies
//! by evolving small integer programs with CGP.
//!
//! The pieces compose bottom-up:
//!
//! - [`empirical`]: duration tables and thread-outcome sampling, including
//!   the bundled JSCS dataset and the perfect-world counterfactual.
//! - [`strategy`]: the strategy interface, validity rules, and the editor A,
//!   editor B, and evolved-reference baselines.
//! - [`sim`]: event-driven simulation of one manuscript and efficiency
//!   curves over batch sizes.
//! - [`fitness`]: area under the efficiency curve with penalties for invalid
//!   strategies.
//! - [`cgp`]: genomes, protected integer functions, the 4+1 evolutionary
//!   algorithm, and phenotype-preserving simplification.
//! - [`rng`]: deterministic seed derivation; every result in this crate is a
//!   pure function of configuration plus one master seed.
//!
//! ```
//! use edvolve::empirical::OutcomeModel;
//! use edvolve::fitness::{evaluate, FitnessConfig};
//! use edvolve::sim::SimulationConfig;
//! use edvolve::strategy::{EditorA, EditorB};
//!
//! let model = OutcomeModel::jscs();
//! let cfg = FitnessConfig { runs_per_batch: 200, ..FitnessConfig::default() };
//! let sim = SimulationConfig::default();
//! let a = evaluate(&EditorA, &model, &cfg, &sim);
//! let b = evaluate(&EditorB, &model, &cfg, &sim);
//! assert!(a.value < b.value);
//! ```

pub mod cgp;
pub mod cli;
pub mod empirical;
pub mod fitness;
pub mod rng;
pub mod sim;
pub mod strategy;
