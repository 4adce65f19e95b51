//! Command-line front end.
//!
//! Every command reads one JSON run configuration (all keys optional, see
//! [`RunConfig`]) plus a few flags, and emits deterministic output: given the
//! same configuration and master seed, stdout payloads and written files are
//! byte-identical across runs and across `--jobs` settings. Timing notes go
//! to stderr only.
//!
//! Exit codes: 0 success, 2 usage or configuration error, 3 I/O error.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};
use std::time::Instant;

use clap::{Parser, Subcommand};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cgp::{
    evolve, review_fitness_oracle, simplify, CompiledGenome, EvolutionConfig, Genome, SeedPolicy,
    StopReason,
};
use crate::empirical::{DurationTable, OutcomeModel, SamplingMode};
use crate::fitness::{evaluate_with_curve, FitnessConfig, FitnessValue};
use crate::sim::{simulate_batch, EfficiencyPoint, InitialBatchMode, SimulationConfig};
use crate::strategy::{EditorA, EditorB, EvolvedReference, Strategy, StrategyState};

/// One flat configuration uniting the simulation, fitness, and evolution
/// parameters plus the model source. Serialized as JSON; every key falls
/// back to its default when omitted, and unknown keys are rejected.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub required_reviews: u32,
    pub runs_per_batch: u32,
    pub initial_batch_mode: InitialBatchMode,
    /// Sole entropy source: every random decision in a run derives from it.
    pub master_seed: u64,
    pub min_batch: u32,
    pub max_batch: u32,
    pub min_effective: f64,
    pub max_effective: f64,
    pub critical_fitness: f64,
    pub p_mut: f64,
    pub columns: usize,
    pub max_generations: u64,
    pub target_fitness: Option<f64>,
    pub stagnation_window: Option<u64>,
    pub seed_policy: SeedPolicy,
    pub model: ModelSource,
    pub perfect_world: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        let sim = SimulationConfig::default();
        let fit = FitnessConfig::default();
        let evo = EvolutionConfig::default();
        Self {
            required_reviews: sim.required_reviews,
            runs_per_batch: sim.runs_per_batch,
            initial_batch_mode: sim.initial_batch_mode,
            master_seed: sim.master_seed,
            min_batch: fit.min_batch,
            max_batch: fit.max_batch,
            min_effective: fit.min_effective,
            max_effective: fit.max_effective,
            critical_fitness: fit.critical_fitness,
            p_mut: evo.p_mut,
            columns: evo.columns,
            max_generations: evo.max_generations,
            target_fitness: evo.target_fitness,
            stagnation_window: evo.stagnation_window,
            seed_policy: evo.seed_policy,
            model: ModelSource::Builtin,
            perfect_world: false,
        }
    }
}

/// Where the duration tables come from.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelSource {
    /// The bundled JSCS tables.
    Builtin,
    /// Custom tables in the `days,freq` CSV format.
    Csv {
        with_review: PathBuf,
        without_review: PathBuf,
    },
}

impl RunConfig {
    fn validate(&self) -> Result<(), CliError> {
        let fail = |msg: &str| Err(CliError::Config(msg.to_string()));
        if self.required_reviews < 1 {
            return fail("required_reviews must be at least 1");
        }
        if self.runs_per_batch < 1 {
            return fail("runs_per_batch must be at least 1");
        }
        if self.min_batch < 2 {
            return fail("min_batch must be at least 2");
        }
        if self.min_batch > self.max_batch {
            return fail("min_batch must not exceed max_batch");
        }
        if !(self.min_effective < self.max_effective) {
            return fail("min_effective must be below max_effective");
        }
        if !(self.p_mut > 0.0 && self.p_mut <= 1.0) {
            return fail("p_mut must lie in (0, 1]");
        }
        if self.columns < 1 {
            return fail("columns must be at least 1");
        }
        Ok(())
    }

    fn sim_config(&self) -> SimulationConfig {
        SimulationConfig {
            required_reviews: self.required_reviews,
            runs_per_batch: self.runs_per_batch,
            initial_batch_mode: self.initial_batch_mode,
            master_seed: self.master_seed,
        }
    }

    fn fitness_config(&self) -> FitnessConfig {
        FitnessConfig {
            min_batch: self.min_batch,
            max_batch: self.max_batch,
            min_effective: self.min_effective,
            max_effective: self.max_effective,
            runs_per_batch: self.runs_per_batch,
            critical_fitness: self.critical_fitness,
        }
    }

    fn evolution_config(&self) -> EvolutionConfig {
        EvolutionConfig {
            p_mut: self.p_mut,
            columns: self.columns,
            max_generations: self.max_generations,
            target_fitness: self.target_fitness,
            stagnation_window: self.stagnation_window,
            master_seed: self.master_seed,
            seed_policy: self.seed_policy,
        }
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
}

impl CliError {
    fn io(path: &Path, source: io::Error) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Io { .. } => 3,
        }
    }
}

#[derive(Parser)]
#[command(
    name = "edvolve",
    version,
    about = "Simulate, score, and evolve journal editorial strategies"
)]
struct Cli {
    /// JSON run configuration; defaults apply when omitted.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Shrink runs_per_batch to 1000 for quick desk-scale runs.
    #[arg(long, global = true)]
    desk_scale: bool,
    /// Counterfactual sampling: unsuccessful threads take zero days.
    #[arg(long, global = true)]
    perfect_world: bool,
    /// Cap the simulation worker threads (results do not depend on it).
    #[arg(long, global = true, value_name = "N")]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evolve a strategy and write the best genome, log, and curve.
    Evolve {
        /// Directory for best_genome.json, evolution_log.jsonl, curve.csv.
        #[arg(long, default_value = "evolve-out", value_name = "DIR")]
        out_dir: PathBuf,
    },
    /// Score a strategy and print its fitness and curve points as JSON.
    Evaluate {
        /// editor-a | editor-b | evolved-ref | genome:<path>
        strategy: String,
    },
    /// Compute the efficiency curve as CSV.
    Curve {
        /// editor-a | editor-b | evolved-ref | genome:<path>
        strategy: String,
        /// Write the CSV here instead of stdout.
        #[arg(long, value_name = "PATH")]
        output: Option<PathBuf>,
    },
    /// Simulate one batch size and print summary statistics.
    Simulate {
        /// editor-a | editor-b | evolved-ref | genome:<path>
        strategy: String,
        #[arg(long, value_name = "B")]
        batch_size: u32,
        /// Override runs_per_batch for this command.
        #[arg(long, value_name = "N")]
        runs: Option<u32>,
        /// Write per-run results as CSV.
        #[arg(long, value_name = "PATH")]
        dump: Option<PathBuf>,
    },
    /// Shrink a genome's active-node count without changing its behavior.
    Simplify {
        genome: PathBuf,
        #[arg(long, value_name = "PATH")]
        output: PathBuf,
    },
    /// Print statistics of the duration tables.
    Stats {
        /// Write the tables as CSV files into this directory.
        #[arg(long, value_name = "DIR")]
        dump: Option<PathBuf>,
    },
}

/// Parse arguments, run, and map the outcome to an exit code.
pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // --help and --version arrive here too; they exit cleanly.
            let _ = err.print();
            return if err.use_stderr() { 2 } else { 0 };
        }
    };
    match dispatch(cli) {
        Ok(()) => 0,
        Err(err) => {
            eprintln!("error: {err}");
            err.exit_code()
        }
    }
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            return Err(CliError::Config("--jobs must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
    }

    let mut cfg = load_config(cli.config.as_deref())?;
    if cli.desk_scale {
        cfg.runs_per_batch = 1000;
    }
    if cli.perfect_world {
        cfg.perfect_world = true;
    }
    cfg.validate()?;
    let model = build_model(&cfg)?;

    match cli.command {
        Command::Evolve { out_dir } => cmd_evolve(&cfg, &model, &out_dir),
        Command::Evaluate { strategy } => cmd_evaluate(&cfg, &model, &strategy),
        Command::Curve { strategy, output } => cmd_curve(&cfg, &model, &strategy, output.as_deref()),
        Command::Simulate {
            strategy,
            batch_size,
            runs,
            dump,
        } => cmd_simulate(&cfg, &model, &strategy, batch_size, runs, dump.as_deref()),
        Command::Simplify { genome, output } => cmd_simplify(&cfg, &genome, &output),
        Command::Stats { dump } => cmd_stats(&model, dump.as_deref()),
    }
}

fn load_config(path: Option<&Path>) -> Result<RunConfig, CliError> {
    match path {
        None => Ok(RunConfig::default()),
        Some(path) => {
            let text = read_file(path)?;
            serde_json::from_str(&text)
                .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
        }
    }
}

fn build_model(cfg: &RunConfig) -> Result<OutcomeModel, CliError> {
    let mode = if cfg.perfect_world {
        SamplingMode::PerfectWorld
    } else {
        SamplingMode::Realistic
    };
    match &cfg.model {
        ModelSource::Builtin => Ok(OutcomeModel::jscs().with_mode(mode)),
        ModelSource::Csv {
            with_review,
            without_review,
        } => {
            let load = |path: &Path| -> Result<DurationTable, CliError> {
                let text = read_file(path)?;
                DurationTable::parse_csv(&text)
                    .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
            };
            Ok(OutcomeModel::new(
                load(with_review)?,
                load(without_review)?,
                mode,
            ))
        }
    }
}

fn resolve_strategy(spec: &str) -> Result<Box<dyn Strategy>, CliError> {
    match spec {
        "editor-a" => Ok(Box::new(EditorA)),
        "editor-b" => Ok(Box::new(EditorB)),
        "evolved-ref" => Ok(Box::new(EvolvedReference)),
        _ => {
            if let Some(path) = spec.strip_prefix("genome:") {
                let genome = load_genome(Path::new(path))?;
                Ok(Box::new(CompiledGenome::compile(&genome)))
            } else {
                Err(CliError::Config(format!(
                    "unknown strategy `{spec}` (expected editor-a, editor-b, evolved-ref, or genome:<path>)"
                )))
            }
        }
    }
}

fn load_genome(path: &Path) -> Result<Genome, CliError> {
    let text = read_file(path)?;
    serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

fn read_file(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|e| CliError::io(path, e))
}

fn print_json(value: &impl Serialize) {
    println!(
        "{}",
        serde_json::to_string(value).expect("reports serialize infallibly")
    );
}

#[derive(Serialize)]
struct EvolveReport {
    generations: u64,
    stop_reason: StopReason,
    final_fitness: f64,
    penalized: bool,
    active_nodes: usize,
    improvements: usize,
    best_genome: String,
    evolution_log: String,
    curve: String,
}

fn cmd_evolve(cfg: &RunConfig, model: &OutcomeModel, out_dir: &Path) -> Result<(), CliError> {
    let fitness_cfg = cfg.fitness_config();
    let sim_cfg = cfg.sim_config();
    let oracle = review_fitness_oracle(model, fitness_cfg, sim_cfg);
    let evaluations = AtomicU64::new(0);
    let counted = |genome: &Genome, seed: u64| {
        let value = oracle(genome, seed);
        let n = evaluations.fetch_add(1, Ordering::Relaxed) + 1;
        if n % 2000 == 0 {
            eprintln!("{n} fitness evaluations");
        }
        value
    };

    let started = Instant::now();
    let (best, log) = evolve(counted, &cfg.evolution_config());
    eprintln!(
        "evolution finished after {:.1?} ({} generations)",
        started.elapsed(),
        log.generations.len() - 1
    );

    fs::create_dir_all(out_dir).map_err(|e| CliError::io(out_dir, e))?;
    let genome_path = out_dir.join("best_genome.json");
    let log_path = out_dir.join("evolution_log.jsonl");
    let curve_path = out_dir.join("curve.csv");

    let mut genome_json =
        serde_json::to_string_pretty(&best).expect("genomes serialize infallibly");
    genome_json.push('\n');
    write_file(&genome_path, &genome_json)?;

    let mut log_bytes = Vec::new();
    log.write_jsonl(&mut log_bytes)
        .map_err(|e| CliError::io(&log_path, e))?;
    write_file(&log_path, &String::from_utf8(log_bytes).expect("log is UTF-8"))?;

    let compiled = CompiledGenome::compile(&best);
    let (fitness, curve) = evaluate_with_curve(&compiled, model, &fitness_cfg, &sim_cfg);
    write_file(&curve_path, &curve.to_csv())?;

    print_json(&EvolveReport {
        generations: log.generations.len() as u64 - 1,
        stop_reason: log.stop_reason,
        final_fitness: log.final_fitness(),
        penalized: fitness.penalized,
        active_nodes: best.active_count(),
        improvements: log.improvements.len(),
        best_genome: genome_path.display().to_string(),
        evolution_log: log_path.display().to_string(),
        curve: curve_path.display().to_string(),
    });
    Ok(())
}

#[derive(Serialize)]
struct EvaluateReport<'a> {
    strategy: &'a str,
    #[serde(flatten)]
    fitness: FitnessValue,
    points: Vec<EfficiencyPoint>,
    invalid_batches: Vec<u32>,
}

fn cmd_evaluate(cfg: &RunConfig, model: &OutcomeModel, spec: &str) -> Result<(), CliError> {
    let strategy = resolve_strategy(spec)?;
    let (fitness, curve) =
        evaluate_with_curve(&strategy, model, &cfg.fitness_config(), &cfg.sim_config());
    print_json(&EvaluateReport {
        strategy: spec,
        fitness,
        points: curve.points,
        invalid_batches: curve.invalid_batches,
    });
    Ok(())
}

#[derive(Serialize)]
struct CurveReport {
    output: String,
    points: usize,
    invalid_batches: Vec<u32>,
}

fn cmd_curve(
    cfg: &RunConfig,
    model: &OutcomeModel,
    spec: &str,
    output: Option<&Path>,
) -> Result<(), CliError> {
    let strategy = resolve_strategy(spec)?;
    let curve = crate::sim::efficiency_curve(
        &strategy,
        model,
        &cfg.sim_config(),
        cfg.min_batch,
        cfg.max_batch,
    );
    match output {
        None => print!("{}", curve.to_csv()),
        Some(path) => {
            write_file(path, &curve.to_csv())?;
            print_json(&CurveReport {
                output: path.display().to_string(),
                points: curve.points.len(),
                invalid_batches: curve.invalid_batches,
            });
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct SimulateReport<'a> {
    strategy: &'a str,
    batch_size: u32,
    runs: u32,
    critical_errors: usize,
    /// Means over error-free runs; absent when every run errored.
    mean_review_time: Option<f64>,
    mean_effective_reviewers: Option<f64>,
}

fn cmd_simulate(
    cfg: &RunConfig,
    model: &OutcomeModel,
    spec: &str,
    batch_size: u32,
    runs: Option<u32>,
    dump: Option<&Path>,
) -> Result<(), CliError> {
    if batch_size < 2 {
        return Err(CliError::Config("--batch-size must be at least 2".into()));
    }
    let strategy = resolve_strategy(spec)?;
    let mut sim_cfg = cfg.sim_config();
    if let Some(runs) = runs {
        if runs < 1 {
            return Err(CliError::Config("--runs must be at least 1".into()));
        }
        sim_cfg.runs_per_batch = runs;
    }
    let results = simulate_batch(batch_size, &strategy, model, &sim_cfg);

    if let Some(path) = dump {
        let mut csv = String::from("run,elapsed_days,effective_reviewers,critical_error\n");
        for (run, r) in results.iter().enumerate() {
            csv.push_str(&format!(
                "{run},{},{},{}\n",
                r.elapsed_days, r.effective_reviewers, r.critical_error
            ));
        }
        write_file(path, &csv)?;
    }

    let ok: Vec<_> = results.iter().filter(|r| !r.critical_error).collect();
    let mean = |f: fn(&crate::sim::SimulationResult) -> u32| -> Option<f64> {
        if ok.is_empty() {
            None
        } else {
            let sum: u64 = ok.iter().map(|r| u64::from(f(r))).sum();
            Some(sum as f64 / ok.len() as f64)
        }
    };
    print_json(&SimulateReport {
        strategy: spec,
        batch_size,
        runs: sim_cfg.runs_per_batch,
        critical_errors: results.len() - ok.len(),
        mean_review_time: mean(|r| r.elapsed_days),
        mean_effective_reviewers: mean(|r| r.effective_reviewers),
    });
    Ok(())
}

#[derive(Serialize)]
struct SimplifyReport {
    input: String,
    output: String,
    domain_states: usize,
    active_before: usize,
    active_after: usize,
    mismatches: usize,
    generations: u64,
}

fn cmd_simplify(cfg: &RunConfig, genome_path: &Path, output: &Path) -> Result<(), CliError> {
    let genome = load_genome(genome_path)?;
    let domain = StrategyState::enumerate(cfg.required_reviews, cfg.min_batch..=cfg.max_batch);
    let evo_cfg = cfg.evolution_config();
    let simplified = simplify(&genome, &evo_cfg, &domain);

    let mismatches = crate::cgp::mismatches(
        &CompiledGenome::compile(&simplified),
        &CompiledGenome::compile(&genome),
        &domain,
    );
    let mut json = serde_json::to_string_pretty(&simplified).expect("genomes serialize infallibly");
    json.push('\n');
    write_file(output, &json)?;

    print_json(&SimplifyReport {
        input: genome_path.display().to_string(),
        output: output.display().to_string(),
        domain_states: domain.len(),
        active_before: genome.active_count(),
        active_after: simplified.active_count(),
        mismatches,
        generations: evo_cfg.max_generations,
    });
    Ok(())
}

#[derive(Serialize)]
struct TableReport {
    rows: usize,
    total_frequency: u64,
    mean_days: f64,
}

#[derive(Serialize)]
struct StatsReport {
    success_probability: f64,
    with_review: TableReport,
    without_review: TableReport,
}

fn cmd_stats(model: &OutcomeModel, dump: Option<&Path>) -> Result<(), CliError> {
    if let Some(dir) = dump {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        write_file(&dir.join("with_review.csv"), &model.with_review().to_csv())?;
        write_file(
            &dir.join("without_review.csv"),
            &model.without_review().to_csv(),
        )?;
    }
    let table = |t: &DurationTable| TableReport {
        rows: t.entries().len(),
        total_frequency: t.total_frequency(),
        mean_days: t.mean_days(),
    };
    print_json(&StatsReport {
        success_probability: model.success_probability(),
        with_review: table(model.with_review()),
        without_review: table(model.without_review()),
    });
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_config_round_trips() {
        let cfg = RunConfig::default();
        let json = serde_json::to_string(&cfg).unwrap();
        let back: RunConfig = serde_json::from_str(&json).unwrap();
        assert_eq!(serde_json::to_string(&back).unwrap(), json);
    }

    #[test]
    fn empty_config_uses_defaults() {
        let cfg: RunConfig = serde_json::from_str("{}").unwrap();
        assert_eq!(cfg.runs_per_batch, 10_000);
        assert_eq!(cfg.max_batch, 20);
        assert_eq!(cfg.p_mut, 0.03);
        assert!(matches!(cfg.model, ModelSource::Builtin));
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(serde_json::from_str::<RunConfig>(r#"{"master_sneed": 3}"#).is_err());
    }

    #[test]
    fn model_source_accepts_csv_paths() {
        let cfg: RunConfig = serde_json::from_str(
            r#"{"model": {"csv": {"with_review": "a.csv", "without_review": "b.csv"}}}"#,
        )
        .unwrap();
        assert!(matches!(cfg.model, ModelSource::Csv { .. }));
    }

    #[test]
    fn validation_catches_bad_windows() {
        let mut cfg = RunConfig::default();
        cfg.min_effective = 15.0;
        cfg.max_effective = 7.0;
        assert!(cfg.validate().is_err());
        let mut cfg = RunConfig::default();
        cfg.min_batch = 1;
        assert!(cfg.validate().is_err());
        let mut cfg = RunConfig::default();
        cfg.p_mut = 0.0;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn strategy_names_resolve() {
        assert!(resolve_strategy("editor-a").is_ok());
        assert!(resolve_strategy("editor-b").is_ok());
        assert!(resolve_strategy("evolved-ref").is_ok());
        let err = resolve_strategy("editor-c").err().expect("unknown name");
        assert_eq!(err.exit_code(), 2);
        let err = resolve_strategy("genome:/no/such/file.json")
            .err()
            .expect("missing file");
        assert_eq!(err.exit_code(), 3);
    }
}
