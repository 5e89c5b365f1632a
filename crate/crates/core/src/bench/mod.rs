//! Seeded experiment matrix: sizes × instances × optimizers.
//!
//! Seeds are derived from the master seed with [`derive_seed`]:
//!
//! * instance seed = `derive_seed(master, [n, instance])`, values drawn
//!   uniformly from the plan's value range;
//! * run seed = `derive_seed(master, [n, instance, 1 + optimizer code])`,
//!   where the code is the optimizer's position in [`OptimizerKind::ALL`].
//!
//! Every QAOA optimizer in a cell sees the same model and the same
//! evaluation cap. A failing run becomes an error row; it never aborts the
//! matrix. Cells may run concurrently but records always come back sorted
//! by `(n, instance, optimizer)`.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use crate::anneal::{simulated_anneal, AnnealConfig};
use crate::optim::{Algorithm, OptimizerConfig};
use crate::parallel::{map_ordered, with_workers};
use crate::qaoa::{solve, QaoaCircuit, DEFAULT_LAYERS};
use crate::qubo::{build_qubo, exact_best, generate_instance, NppInstance, PartitionSolution, QuboModel};
use crate::seed::{derive_seed, rng_from_seed};
use crate::{Error, Result};

mod plot;
mod report;

pub use plot::{emit_plot, render_svg, Metric};
pub use report::{
    format_float, mean_by_optimizer, read_records, read_summary, summarize, write_records,
    write_summary, SummaryRow, RECORD_HEADER, SUMMARY_HEADER,
};

/// Master seed of the shipped reference run.
pub const DEFAULT_MASTER_SEED: u64 = 1;

/// A row label in the output: one of the QAOA optimizers or the annealer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum OptimizerKind {
    Qaoa(Algorithm),
    SaBaseline,
}

impl OptimizerKind {
    pub const ALL: [OptimizerKind; 6] = [
        OptimizerKind::Qaoa(Algorithm::Simplex),
        OptimizerKind::Qaoa(Algorithm::Ga),
        OptimizerKind::Qaoa(Algorithm::De),
        OptimizerKind::Qaoa(Algorithm::Pso),
        OptimizerKind::Qaoa(Algorithm::Aco),
        OptimizerKind::SaBaseline,
    ];

    pub fn name(self) -> &'static str {
        match self {
            OptimizerKind::Qaoa(a) => a.name(),
            OptimizerKind::SaBaseline => "sa-baseline",
        }
    }

    /// Position in [`OptimizerKind::ALL`]; part of the seed derivation.
    pub fn code(self) -> u64 {
        OptimizerKind::ALL
            .iter()
            .position(|&k| k == self)
            .expect("every kind is listed") as u64
    }

    /// Parses a comma-separated list; `all` expands to every optimizer.
    pub fn parse_list(s: &str) -> Result<Vec<OptimizerKind>> {
        if s.trim() == "all" {
            return Ok(OptimizerKind::ALL.to_vec());
        }
        let mut kinds = s
            .split(',')
            .map(|t| t.trim().parse())
            .collect::<Result<Vec<OptimizerKind>>>()?;
        kinds.sort_by_key(|k| k.code());
        kinds.dedup();
        Ok(kinds)
    }
}

impl fmt::Display for OptimizerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for OptimizerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        OptimizerKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::arg(format!("unknown optimizer {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchPlan {
    pub sizes: Vec<usize>,
    pub instances: usize,
    pub optimizers: Vec<OptimizerKind>,
    pub layers: usize,
    pub population: usize,
    pub iterations: usize,
    pub master_seed: u64,
    /// Inclusive range instance values are drawn from.
    pub value_range: (u64, u64),
    /// Reads and schedule for `sa-baseline`; the seed field is ignored.
    pub anneal: AnnealConfig,
    /// Concurrent worker threads for the matrix.
    pub workers: usize,
}

impl Default for BenchPlan {
    fn default() -> Self {
        BenchPlan {
            sizes: vec![4, 8, 12],
            instances: 5,
            optimizers: OptimizerKind::ALL.to_vec(),
            layers: DEFAULT_LAYERS,
            population: 10,
            iterations: 50,
            master_seed: DEFAULT_MASTER_SEED,
            value_range: (1, 100),
            anneal: AnnealConfig::default(),
            workers: 1,
        }
    }
}

impl BenchPlan {
    fn validate(&self) -> Result<()> {
        if self.sizes.is_empty() || self.sizes.contains(&0) {
            return Err(Error::arg("plan needs at least one size, all >= 1"));
        }
        if self.optimizers.is_empty() {
            return Err(Error::arg("plan needs at least one optimizer"));
        }
        if self.instances == 0 {
            return Err(Error::arg("plan needs at least one instance per size"));
        }
        Ok(())
    }

    pub fn instance_seed(&self, n: usize, instance: usize) -> u64 {
        derive_seed(self.master_seed, &[n as u64, instance as u64])
    }

    pub fn run_seed(&self, n: usize, instance: usize, kind: OptimizerKind) -> u64 {
        derive_seed(self.master_seed, &[n as u64, instance as u64, 1 + kind.code()])
    }

    pub fn optimizer_config(&self, run_seed: u64) -> OptimizerConfig {
        OptimizerConfig::with_budget(self.population, self.iterations, run_seed)
    }
}

/// Measured outcome of one successful run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunMetrics {
    pub best_energy: u128,
    pub ratio: f64,
    pub r_minus_1: f64,
    /// `best_energy` minus the exact optimum energy.
    pub opt_gap: u128,
    pub evals: u64,
    pub samples: u64,
    pub wall_time_s: f64,
}

impl RunMetrics {
    fn new(
        best: &PartitionSolution,
        exact: &PartitionSolution,
        total: u64,
        evals: u64,
        samples: u64,
        wall: f64,
    ) -> Self {
        RunMetrics {
            best_energy: best.energy,
            ratio: best.ratio,
            // R - 1 = d / c, a single rounding of exact integers.
            r_minus_1: best.diff as f64 / total as f64,
            opt_gap: best.energy - exact.energy,
            evals,
            samples,
            wall_time_s: wall.max(1e-9),
        }
    }
}

/// One output row.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchRecord {
    pub optimizer: String,
    pub n: usize,
    pub instance_seed: Option<u64>,
    pub run_seed: u64,
    /// `Err` holds the failure message of an error row.
    pub outcome: std::result::Result<RunMetrics, String>,
}

impl BenchRecord {
    pub fn metrics(&self) -> Option<&RunMetrics> {
        self.outcome.as_ref().ok()
    }

    pub fn is_error(&self) -> bool {
        self.outcome.is_err()
    }
}

/// Everything shared by the optimizers of one `(n, instance)` cell.
struct Cell {
    n: usize,
    index: usize,
    instance: std::result::Result<Prepared, String>,
    instance_seed: u64,
}

struct Prepared {
    instance: NppInstance,
    model: QuboModel,
    exact: PartitionSolution,
    circuit: Option<std::result::Result<QaoaCircuit, String>>,
}

fn prepare(plan: &BenchPlan, n: usize, seed: u64, needs_circuit: bool) -> Result<Prepared> {
    let (lo, hi) = plan.value_range;
    let instance = generate_instance(n, seed, lo, hi)?;
    let model = build_qubo(&instance)?;
    let exact = exact_best(&instance)?;
    let circuit = needs_circuit.then(|| QaoaCircuit::new(&model).map_err(|e| e.to_string()));
    Ok(Prepared {
        instance,
        model,
        exact,
        circuit,
    })
}

/// Runs one optimizer on one instance, outside any matrix.
pub fn run_one(
    plan: &BenchPlan,
    instance: &NppInstance,
    kind: OptimizerKind,
    run_seed: u64,
) -> Result<RunMetrics> {
    let model = build_qubo(instance)?;
    let exact = exact_best(instance)?;
    let circuit = match kind {
        OptimizerKind::Qaoa(_) => Some(QaoaCircuit::new(&model)?),
        OptimizerKind::SaBaseline => None,
    };
    execute(plan, &model, &exact, circuit.as_ref(), kind, run_seed)
}

/// [`run_one`] packaged as an output row; failures become an error row.
pub fn run_single(
    plan: &BenchPlan,
    instance: &NppInstance,
    kind: OptimizerKind,
    run_seed: u64,
) -> BenchRecord {
    BenchRecord {
        optimizer: kind.name().to_string(),
        n: instance.len(),
        instance_seed: instance.seed(),
        run_seed,
        outcome: run_one(plan, instance, kind, run_seed).map_err(|e| e.to_string()),
    }
}

fn execute(
    plan: &BenchPlan,
    model: &QuboModel,
    exact: &PartitionSolution,
    circuit: Option<&QaoaCircuit>,
    kind: OptimizerKind,
    run_seed: u64,
) -> Result<RunMetrics> {
    match kind {
        OptimizerKind::Qaoa(algorithm) => {
            let circuit = circuit.expect("QAOA runs need a circuit");
            let cfg = plan.optimizer_config(run_seed);
            let mut rng = rng_from_seed(run_seed);
            let out = solve(circuit, plan.layers, algorithm, &cfg, &mut rng)?;
            Ok(RunMetrics::new(
                &out.best,
                exact,
                model.instance().total(),
                out.evaluations as u64,
                out.samples_taken as u64,
                out.wall_time,
            ))
        }
        OptimizerKind::SaBaseline => {
            let cfg = AnnealConfig {
                seed: run_seed,
                ..plan.anneal.clone()
            };
            let start = Instant::now();
            let out = simulated_anneal(model, &cfg)?;
            let wall = start.elapsed().as_secs_f64();
            Ok(RunMetrics::new(
                &out.best,
                exact,
                model.instance().total(),
                out.proposals,
                cfg.reads as u64,
                wall,
            ))
        }
    }
}

/// Runs the full matrix. Only an invalid plan is an error; individual run
/// failures come back as error rows.
pub fn run_benchmark(plan: &BenchPlan) -> Result<Vec<BenchRecord>> {
    plan.validate()?;
    with_workers(plan.workers, || run_matrix(plan))
}

fn run_matrix(plan: &BenchPlan) -> Result<Vec<BenchRecord>> {
    let needs_circuit = plan
        .optimizers
        .iter()
        .any(|k| matches!(k, OptimizerKind::Qaoa(_)));
    let coords: Vec<(usize, usize)> = plan
        .sizes
        .iter()
        .flat_map(|&n| (0..plan.instances).map(move |i| (n, i)))
        .collect();
    let cells: Vec<Cell> = map_ordered(&coords, |&(n, index)| {
        let instance_seed = plan.instance_seed(n, index);
        Cell {
            n,
            index,
            instance: prepare(plan, n, instance_seed, needs_circuit).map_err(|e| e.to_string()),
            instance_seed,
        }
    });

    let mut optimizers = plan.optimizers.clone();
    optimizers.sort_by_key(|k| k.code());
    optimizers.dedup();
    let tasks: Vec<(&Cell, OptimizerKind)> = cells
        .iter()
        .flat_map(|c| optimizers.iter().map(move |&k| (c, k)))
        .collect();

    let mut records = map_ordered(&tasks, |&(cell, kind)| {
        let run_seed = plan.run_seed(cell.n, cell.index, kind);
        let outcome = match &cell.instance {
            Err(msg) => Err(msg.clone()),
            Ok(p) => {
                let circuit = match (&p.circuit, kind) {
                    (Some(Err(msg)), OptimizerKind::Qaoa(_)) => {
                        return record(cell, kind, run_seed, Err(msg.clone()))
                    }
                    (Some(Ok(c)), _) => Some(c),
                    _ => None,
                };
                execute(plan, &p.model, &p.exact, circuit, kind, run_seed).map_err(|e| e.to_string())
            }
        };
        record(cell, kind, run_seed, outcome)
    });

    records.sort_by(|a, b| {
        (a.0, a.1, a.2.code()).cmp(&(b.0, b.1, b.2.code()))
    });
    Ok(records.into_iter().map(|(_, _, _, r)| r).collect())
}

type Keyed = (usize, usize, OptimizerKind, BenchRecord);

fn record(
    cell: &Cell,
    kind: OptimizerKind,
    run_seed: u64,
    outcome: std::result::Result<RunMetrics, String>,
) -> Keyed {
    let instance_seed = match &cell.instance {
        Ok(p) => p.instance.seed(),
        Err(_) => Some(cell.instance_seed),
    };
    (
        cell.n,
        cell.index,
        kind,
        BenchRecord {
            optimizer: kind.name().to_string(),
            n: cell.n,
            instance_seed,
            run_seed,
            outcome,
        },
    )
}
