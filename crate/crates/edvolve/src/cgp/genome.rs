//! CGP genome: a single-row grid of integer function nodes.
//!
//! Absolute indices 0..3 name the four strategy inputs; the node in column k
//! has absolute index 4 + k. Connections point strictly backward, so a
//! genome is a feed-forward program. The output gene names the index whose
//! value becomes the strategy's decision.
//!
//! Only nodes on a backward path from the output are active; the rest ride
//! along in the genotype and give mutation room for neutral drift.

use std::cell::RefCell;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rng::{Rng, SimRng};
use crate::strategy::{Decision, Strategy, StrategyState};

/// Strategy inputs, bound to absolute indices 0..3 in this order.
pub const N_INPUTS: usize = 4;

/// The protected integer function set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum FunctionId {
    Add,
    Sub,
    Mul,
    Div,
    Mod,
}

pub const FUNCTIONS: [FunctionId; 5] = [
    FunctionId::Add,
    FunctionId::Sub,
    FunctionId::Mul,
    FunctionId::Div,
    FunctionId::Mod,
];

/// Apply one protected function. Total over all of i64: a zero divisor makes
/// DIV and MOD return 1, and results outside the 64-bit range saturate.
pub fn apply_function(f: FunctionId, a: i64, b: i64) -> i64 {
    match f {
        FunctionId::Add => a.saturating_add(b),
        FunctionId::Sub => a.saturating_sub(b),
        FunctionId::Mul => a.saturating_mul(b),
        FunctionId::Div => {
            if b == 0 {
                1
            } else {
                // i64::MIN / -1 is the one remaining overflow; saturate.
                a.checked_div(b).unwrap_or(i64::MAX)
            }
        }
        FunctionId::Mod => {
            if b == 0 {
                1
            } else {
                // i64::MIN % -1 is mathematically zero.
                a.checked_rem(b).unwrap_or(0)
            }
        }
    }
}

/// One grid node: a function and the absolute indices of its two operands.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Node {
    #[serde(rename = "f")]
    pub function: FunctionId,
    pub in1: usize,
    pub in2: usize,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GenomeError {
    #[error("expected {N_INPUTS} inputs, genome declares {0}")]
    UnsupportedInputCount(usize),
    #[error("genome declares {columns} columns but carries {nodes} nodes")]
    ColumnCountMismatch { columns: usize, nodes: usize },
    #[error("node {node} input {input} does not point strictly backward")]
    ForwardConnection { node: usize, input: usize },
    #[error("output gene {output} out of range (limit {limit})")]
    OutputOutOfRange { output: usize, limit: usize },
}

/// A complete CGP program.
///
/// Fields are private so every reachable `Genome` satisfies the grid
/// invariants: backward-only connections and an in-range output gene.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "GenomeRepr", into = "GenomeRepr")]
pub struct Genome {
    nodes: Vec<Node>,
    output_gene: usize,
}

/// Wire format: `{"n_inputs": 4, "columns": N, "nodes": [...], "output": k}`.
#[derive(Serialize, Deserialize)]
struct GenomeRepr {
    n_inputs: usize,
    columns: usize,
    nodes: Vec<Node>,
    output: usize,
}

impl TryFrom<GenomeRepr> for Genome {
    type Error = GenomeError;

    fn try_from(repr: GenomeRepr) -> Result<Self, Self::Error> {
        if repr.n_inputs != N_INPUTS {
            return Err(GenomeError::UnsupportedInputCount(repr.n_inputs));
        }
        if repr.columns != repr.nodes.len() {
            return Err(GenomeError::ColumnCountMismatch {
                columns: repr.columns,
                nodes: repr.nodes.len(),
            });
        }
        Genome::new(repr.nodes, repr.output)
    }
}

impl From<Genome> for GenomeRepr {
    fn from(g: Genome) -> Self {
        GenomeRepr {
            n_inputs: N_INPUTS,
            columns: g.nodes.len(),
            nodes: g.nodes,
            output: g.output_gene,
        }
    }
}

impl Genome {
    /// Build a genome, validating the grid invariants.
    pub fn new(nodes: Vec<Node>, output_gene: usize) -> Result<Self, GenomeError> {
        let g = Genome { nodes, output_gene };
        g.validate()?;
        Ok(g)
    }

    fn validate(&self) -> Result<(), GenomeError> {
        for (k, node) in self.nodes.iter().enumerate() {
            let absolute = N_INPUTS + k;
            if node.in1 >= absolute {
                return Err(GenomeError::ForwardConnection { node: k, input: 1 });
            }
            if node.in2 >= absolute {
                return Err(GenomeError::ForwardConnection { node: k, input: 2 });
            }
        }
        let limit = N_INPUTS + self.nodes.len();
        if self.output_gene >= limit {
            return Err(GenomeError::OutputOutOfRange {
                output: self.output_gene,
                limit,
            });
        }
        Ok(())
    }

    /// Uniformly random genome: function uniform over the five, connections
    /// uniform over all strictly earlier indices, output uniform over all.
    pub fn random(columns: usize, rng: &mut SimRng) -> Self {
        let nodes = (0..columns)
            .map(|k| {
                let absolute = N_INPUTS + k;
                Node {
                    function: FUNCTIONS[rng.random_range(0..FUNCTIONS.len())],
                    in1: rng.random_range(0..absolute),
                    in2: rng.random_range(0..absolute),
                }
            })
            .collect();
        let output_gene = rng.random_range(0..N_INPUTS + columns);
        Genome { nodes, output_gene }
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn columns(&self) -> usize {
        self.nodes.len()
    }

    pub fn output_gene(&self) -> usize {
        self.output_gene
    }

    /// Absolute indices of the active nodes (inputs excluded), ascending.
    pub fn active_nodes(&self) -> Vec<usize> {
        let mut reachable = vec![false; self.nodes.len()];
        let mut stack: Vec<usize> = Vec::new();
        if self.output_gene >= N_INPUTS {
            stack.push(self.output_gene);
        }
        while let Some(index) = stack.pop() {
            let pos = index - N_INPUTS;
            if reachable[pos] {
                continue;
            }
            reachable[pos] = true;
            for operand in [self.nodes[pos].in1, self.nodes[pos].in2] {
                if operand >= N_INPUTS {
                    stack.push(operand);
                }
            }
        }
        reachable
            .iter()
            .enumerate()
            .filter(|&(_, &r)| r)
            .map(|(pos, _)| pos + N_INPUTS)
            .collect()
    }

    pub fn active_count(&self) -> usize {
        self.active_nodes().len()
    }

    /// Evaluate by computing every node in index order.
    pub fn eval(&self, state: StrategyState) -> i64 {
        let mut values = Vec::with_capacity(N_INPUTS + self.nodes.len());
        values.extend_from_slice(&input_values(state));
        for node in &self.nodes {
            values.push(apply_function(
                node.function,
                values[node.in1],
                values[node.in2],
            ));
        }
        values[self.output_gene]
    }

    /// Point mutation: every function gene, connection gene, and the output
    /// gene is independently resampled with probability `p_mut`, uniformly
    /// over its legal range (possibly to its current value).
    pub fn mutate(&self, p_mut: f64, rng: &mut SimRng) -> Self {
        self.mutate_counting(p_mut, rng).0
    }

    /// Mutation plus the number of resampling events, for rate tests.
    pub(crate) fn mutate_counting(&self, p_mut: f64, rng: &mut SimRng) -> (Self, u64) {
        let mut attempts = 0u64;
        let nodes = self
            .nodes
            .iter()
            .enumerate()
            .map(|(k, node)| {
                let absolute = N_INPUTS + k;
                let mut node = *node;
                if rng.random_bool(p_mut) {
                    attempts += 1;
                    node.function = FUNCTIONS[rng.random_range(0..FUNCTIONS.len())];
                }
                if rng.random_bool(p_mut) {
                    attempts += 1;
                    node.in1 = rng.random_range(0..absolute);
                }
                if rng.random_bool(p_mut) {
                    attempts += 1;
                    node.in2 = rng.random_range(0..absolute);
                }
                node
            })
            .collect();
        let mut output_gene = self.output_gene;
        if rng.random_bool(p_mut) {
            attempts += 1;
            output_gene = rng.random_range(0..N_INPUTS + self.nodes.len());
        }
        (Genome { nodes, output_gene }, attempts)
    }
}

impl Strategy for Genome {
    fn decide(&self, state: StrategyState) -> Decision {
        Decision {
            new_threads: self.eval(state),
        }
    }
}

fn input_values(state: StrategyState) -> [i64; N_INPUTS] {
    [
        i64::from(state.required_reviews),
        i64::from(state.received_reviews),
        i64::from(state.active_threads),
        i64::from(state.batch_size),
    ]
}

/// Operand source inside a compiled program.
#[derive(Debug, Clone, Copy)]
enum Slot {
    Input(u8),
    Step(u32),
}

#[derive(Debug, Clone, Copy)]
struct CompiledStep {
    function: FunctionId,
    in1: Slot,
    in2: Slot,
}

/// Active-nodes-only evaluator.
///
/// Compilation walks the active set once; evaluation then touches only those
/// steps, which is what makes large mostly-inactive genomes cheap to run as
/// simulation strategies. Behaviorally identical to [`Genome::eval`].
#[derive(Debug, Clone)]
pub struct CompiledGenome {
    steps: Vec<CompiledStep>,
    output: Slot,
}

impl CompiledGenome {
    pub fn compile(genome: &Genome) -> Self {
        let active = genome.active_nodes();
        let slot_of = |index: usize| -> Slot {
            if index < N_INPUTS {
                Slot::Input(index as u8)
            } else {
                let step = active
                    .binary_search(&index)
                    .expect("operand of an active node is active");
                Slot::Step(step as u32)
            }
        };
        // Ascending absolute order is a valid evaluation order because all
        // connections point backward.
        let steps = active
            .iter()
            .map(|&index| {
                let node = genome.nodes[index - N_INPUTS];
                CompiledStep {
                    function: node.function,
                    in1: slot_of(node.in1),
                    in2: slot_of(node.in2),
                }
            })
            .collect();
        CompiledGenome {
            steps,
            output: slot_of(genome.output_gene),
        }
    }

    pub fn steps_len(&self) -> usize {
        self.steps.len()
    }

    pub fn eval(&self, state: StrategyState) -> i64 {
        thread_local! {
            static VALUES: RefCell<Vec<i64>> = const { RefCell::new(Vec::new()) };
        }
        let inputs = input_values(state);
        VALUES.with(|cell| {
            let mut values = cell.borrow_mut();
            values.clear();
            let fetch = |values: &[i64], slot: Slot| -> i64 {
                match slot {
                    Slot::Input(i) => inputs[usize::from(i)],
                    Slot::Step(s) => values[s as usize],
                }
            };
            for step in &self.steps {
                let a = fetch(&values, step.in1);
                let b = fetch(&values, step.in2);
                values.push(apply_function(step.function, a, b));
            }
            fetch(&values, self.output)
        })
    }
}

impl Strategy for CompiledGenome {
    fn decide(&self, state: StrategyState) -> Decision {
        Decision {
            new_threads: self.eval(state),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{derive_rng, STREAM_EVOLUTION};

    fn rng(seed: u64) -> SimRng {
        derive_rng(seed, &[STREAM_EVOLUTION])
    }

    fn state(required: u32, received: u32, active: u32, batch: u32) -> StrategyState {
        StrategyState {
            required_reviews: required,
            received_reviews: received,
            active_threads: active,
            batch_size: batch,
        }
    }

    fn editor_b_genome() -> Genome {
        Genome::new(
            vec![Node {
                function: FunctionId::Sub,
                in1: 3,
                in2: 2,
            }],
            4,
        )
        .unwrap()
    }

    #[test]
    fn protected_div_and_mod() {
        assert_eq!(apply_function(FunctionId::Div, 5, 0), 1);
        assert_eq!(apply_function(FunctionId::Mod, 7, 0), 1);
        assert_eq!(apply_function(FunctionId::Div, 7, 2), 3);
        assert_eq!(apply_function(FunctionId::Div, -7, 2), -3);
        assert_eq!(apply_function(FunctionId::Mod, 7, 3), 1);
        assert_eq!(apply_function(FunctionId::Mod, -7, 3), -1);
        assert_eq!(apply_function(FunctionId::Add, 3, 4), 7);
    }

    #[test]
    fn saturation_at_the_boundary() {
        assert_eq!(
            apply_function(FunctionId::Add, i64::MAX, 1),
            i64::MAX
        );
        assert_eq!(
            apply_function(FunctionId::Sub, i64::MIN, 1),
            i64::MIN
        );
        assert_eq!(
            apply_function(FunctionId::Mul, i64::MAX, 2),
            i64::MAX
        );
        assert_eq!(
            apply_function(FunctionId::Div, i64::MIN, -1),
            i64::MAX
        );
        assert_eq!(apply_function(FunctionId::Mod, i64::MIN, -1), 0);
    }

    #[test]
    fn single_column_random_connects_to_inputs() {
        for seed in 0..20 {
            let g = Genome::random(1, &mut rng(seed));
            assert!(g.nodes()[0].in1 < N_INPUTS);
            assert!(g.nodes()[0].in2 < N_INPUTS);
            assert!(g.output_gene() < N_INPUTS + 1);
        }
    }

    #[test]
    fn random_is_deterministic() {
        let a = Genome::random(2000, &mut rng(8));
        let b = Genome::random(2000, &mut rng(8));
        assert_eq!(a, b);
    }

    #[test]
    fn random_active_fraction_is_small() {
        let mut total = 0usize;
        let seeds = 100u64;
        for seed in 0..seeds {
            total += Genome::random(2000, &mut rng(seed)).active_count();
        }
        let fraction = total as f64 / (2000.0 * seeds as f64);
        assert!(fraction < 0.10, "mean active fraction {fraction}");
    }

    #[test]
    fn active_nodes_examples() {
        let g = Genome::new(
            vec![Node {
                function: FunctionId::Add,
                in1: 0,
                in2: 1,
            }],
            2,
        )
        .unwrap();
        assert!(g.active_nodes().is_empty());

        let g = Genome::new(
            vec![Node {
                function: FunctionId::Add,
                in1: 0,
                in2: 1,
            }],
            4,
        )
        .unwrap();
        assert_eq!(g.active_nodes(), vec![4]);
    }

    #[test]
    fn active_nodes_matches_fixpoint_oracle() {
        // Independent reachability check: sweep to a fixpoint instead of
        // traversing.
        fn oracle(g: &Genome) -> Vec<usize> {
            let n = g.nodes().len();
            let mut marked = vec![false; N_INPUTS + n];
            if g.output_gene() >= N_INPUTS {
                marked[g.output_gene()] = true;
            }
            loop {
                let mut changed = false;
                for (k, node) in g.nodes().iter().enumerate().rev() {
                    if marked[N_INPUTS + k] {
                        for op in [node.in1, node.in2] {
                            if op >= N_INPUTS && !marked[op] {
                                marked[op] = true;
                                changed = true;
                            }
                        }
                    }
                }
                if !changed {
                    break;
                }
            }
            (N_INPUTS..N_INPUTS + n).filter(|&i| marked[i]).collect()
        }

        for seed in 0..25 {
            let g = Genome::random(2000, &mut rng(seed));
            assert_eq!(g.active_nodes(), oracle(&g));
        }
    }

    #[test]
    fn output_wired_to_input_passes_through() {
        let g = Genome::new(
            vec![Node {
                function: FunctionId::Mul,
                in1: 0,
                in2: 0,
            }],
            3,
        )
        .unwrap();
        for batch in [2, 7, 20] {
            assert_eq!(g.eval(state(2, 1, 3, batch)), i64::from(batch));
        }
    }

    #[test]
    fn editor_b_equivalence_by_construction() {
        use crate::strategy::EditorB;
        let g = editor_b_genome();
        for s in StrategyState::enumerate(2, 2..=20) {
            assert_eq!(g.decide(s), EditorB.decide(s));
        }
    }

    #[test]
    fn compiled_agrees_with_full_eval() {
        let mut r = rng(42);
        for _ in 0..200 {
            let columns = r.random_range(1..200);
            let g = Genome::random(columns, &mut r);
            let compiled = CompiledGenome::compile(&g);
            for _ in 0..50 {
                let s = state(
                    2,
                    r.random_range(0..2),
                    r.random_range(0..30),
                    r.random_range(2..30),
                );
                assert_eq!(compiled.eval(s), g.eval(s));
            }
        }
    }

    #[test]
    fn mutate_zero_probability_is_identity() {
        let g = Genome::random(500, &mut rng(1));
        let m = g.mutate(0.0, &mut rng(2));
        assert_eq!(g, m);
    }

    #[test]
    fn mutate_preserves_invariants() {
        let mut r = rng(3);
        let mut g = Genome::random(50, &mut r);
        for _ in 0..10_000 {
            g = g.mutate(0.05, &mut r);
            assert!(g.validate().is_ok());
        }
    }

    #[test]
    fn mutation_rate_matches_p_mut() {
        // 17 repeats over 6001 genes each: Binomial(102017, 0.03),
        // mean 3060.5, sigma 54.5; assert within 3 sigma for a frozen seed.
        let mut r = rng(7);
        let g = Genome::random(2000, &mut r);
        let mut genes = 0u64;
        let mut attempts = 0u64;
        let mut current = g;
        for _ in 0..17 {
            let (next, a) = current.mutate_counting(0.03, &mut r);
            genes += 3 * 2000 + 1;
            attempts += a;
            current = next;
        }
        let expected = genes as f64 * 0.03;
        let sigma = (genes as f64 * 0.03 * 0.97).sqrt();
        let delta = (attempts as f64 - expected).abs();
        assert!(delta < 3.0 * sigma, "attempts {attempts}, expected {expected}");
    }

    #[test]
    fn inactive_mutations_keep_phenotype() {
        let domain = StrategyState::enumerate(2, 2..=20);
        let mut r = rng(11);
        for _ in 0..20 {
            let g = Genome::random(200, &mut r);
            let active = g.active_nodes();
            let mut nodes = g.nodes().to_vec();
            for (k, node) in nodes.iter_mut().enumerate() {
                let absolute = N_INPUTS + k;
                if !active.contains(&absolute) {
                    node.function = FUNCTIONS[r.random_range(0..FUNCTIONS.len())];
                    node.in1 = r.random_range(0..absolute);
                    node.in2 = r.random_range(0..absolute);
                }
            }
            let mutated = Genome::new(nodes, g.output_gene()).unwrap();
            for &s in &domain {
                assert_eq!(mutated.eval(s), g.eval(s));
            }
        }
    }

    #[test]
    fn json_round_trip_identity() {
        let g = Genome::random(300, &mut rng(5));
        let json = serde_json::to_string(&g).unwrap();
        let back: Genome = serde_json::from_str(&json).unwrap();
        assert_eq!(g, back);
    }

    #[test]
    fn json_wire_format() {
        let g = editor_b_genome();
        assert_eq!(
            serde_json::to_string(&g).unwrap(),
            r#"{"n_inputs":4,"columns":1,"nodes":[{"f":"SUB","in1":3,"in2":2}],"output":4}"#
        );
    }

    #[test]
    fn json_rejects_invalid_genomes() {
        // Forward connection.
        let forward = r#"{"n_inputs":4,"columns":1,"nodes":[{"f":"ADD","in1":4,"in2":0}],"output":4}"#;
        assert!(serde_json::from_str::<Genome>(forward).is_err());
        // Output out of range.
        let dangling = r#"{"n_inputs":4,"columns":1,"nodes":[{"f":"ADD","in1":0,"in2":0}],"output":9}"#;
        assert!(serde_json::from_str::<Genome>(dangling).is_err());
        // Column count mismatch.
        let short = r#"{"n_inputs":4,"columns":2,"nodes":[{"f":"ADD","in1":0,"in2":0}],"output":0}"#;
        assert!(serde_json::from_str::<Genome>(short).is_err());
        // Unsupported input count.
        let inputs = r#"{"n_inputs":3,"columns":1,"nodes":[{"f":"ADD","in1":0,"in2":0}],"output":0}"#;
        assert!(serde_json::from_str::<Genome>(inputs).is_err());
    }
}
