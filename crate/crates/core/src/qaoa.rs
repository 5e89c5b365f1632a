//! The p-layer QAOA ansatz for a [`QuboModel`].
//!
//! Each layer applies a cost block and a mixer block to the uniform
//! superposition:
//!
//! * `RZ(θ1_i)` on every qubit, with `θ1_i = ½(c_i + Σ_{j≠i} Q_ij)·γ`
//! * `RZZ(θ2_ij)` on every pair `i < j`, with `θ2_ij = ¼·Q_ij·γ`
//! * `RX(2β)` on every qubit
//!
//! Gates within a block run in ascending qubit (or lexicographic pair)
//! order. The variational objective is the exact expectation of the QUBO
//! energy over the final state; no shot noise is involved.

use std::f64::consts::PI;
use std::time::Instant;

use rand::Rng;

use crate::qubo::{qubo_value, Bitstring, PartitionSolution, QuboModel};
use crate::statevector::StateVector;
use crate::Result;

/// Layer count used by the benchmark unless overridden.
pub const DEFAULT_LAYERS: usize = 2;

/// Per-layer angles `γ_k` and `β_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct QaoaParams {
    pub gammas: Vec<f64>,
    pub betas: Vec<f64>,
}

impl QaoaParams {
    pub fn new(gammas: Vec<f64>, betas: Vec<f64>) -> Self {
        assert_eq!(gammas.len(), betas.len(), "one gamma and one beta per layer");
        QaoaParams { gammas, betas }
    }

    pub fn zeros(p: usize) -> Self {
        QaoaParams::new(vec![0.0; p], vec![0.0; p])
    }

    /// Angles drawn uniformly from `(-π, π)`.
    pub fn random<R: Rng + ?Sized>(p: usize, rng: &mut R) -> Self {
        let mut draw = || -PI + 2.0 * PI * rng.gen::<f64>();
        let gammas = (0..p).map(|_| draw()).collect();
        let betas = (0..p).map(|_| draw()).collect();
        QaoaParams { gammas, betas }
    }

    pub fn layers(&self) -> usize {
        self.gammas.len()
    }

    /// Splits a flat optimizer vector laid out as `[γ_1..γ_p, β_1..β_p]`.
    pub fn from_flat(x: &[f64]) -> Self {
        assert!(x.len().is_multiple_of(2), "flat parameter vector must have even length");
        let p = x.len() / 2;
        QaoaParams::new(x[..p].to_vec(), x[p..].to_vec())
    }

    pub fn to_flat(&self) -> Vec<f64> {
        self.gammas.iter().chain(&self.betas).copied().collect()
    }
}

/// RZ and RZZ angles of one cost block.
#[derive(Debug, Clone, PartialEq)]
pub struct CostAngles {
    pub single: Vec<f64>,
    pub pairs: Vec<((usize, usize), f64)>,
}

pub fn cost_layer_angles(model: &QuboModel, gamma: f64) -> CostAngles {
    let single = (0..model.n())
        .map(|i| 0.5 * (model.linear()[i] + model.coupling_row_sum(i)) as f64 * gamma)
        .collect();
    let pairs = model
        .quad()
        .iter()
        .map(|(&ij, &q)| (ij, 0.25 * q as f64 * gamma))
        .collect();
    CostAngles { single, pairs }
}

pub fn mixer_angle(beta: f64) -> f64 {
    2.0 * beta
}

/// Number of measurement shots used for the final readout,
/// `⌊log10(2^n)⌋`, never less than one.
pub fn sample_count(n: usize) -> usize {
    let s = if n < 128 {
        // digits(2^n) - 1 computed exactly
        let mut v = 1u128 << n;
        let mut digits = 0usize;
        while v >= 10 {
            v /= 10;
            digits += 1;
        }
        digits
    } else {
        (n as f64 * std::f64::consts::LOG10_2).floor() as usize
    };
    s.max(1)
}

/// A model prepared for repeated ansatz evaluation: angle coefficients and
/// the diagonal energy table are computed once.
#[derive(Debug, Clone)]
pub struct QaoaCircuit {
    model: QuboModel,
    field: Vec<f64>,
    couplings: Vec<((usize, usize), f64)>,
    energies: Vec<f64>,
}

impl QaoaCircuit {
    pub fn new(model: &QuboModel) -> Result<Self> {
        let n = model.n();
        // Probe the width bound before allocating the energy table.
        StateVector::uniform(n)?;
        let unit = cost_layer_angles(model, 1.0);
        let energies = (0..1usize << n)
            .map(|k| qubo_value(model, &Bitstring::from_index(k, n)).map(|e| e as f64))
            .collect::<Result<Vec<_>>>()?;
        Ok(QaoaCircuit {
            model: model.clone(),
            field: unit.single,
            couplings: unit.pairs,
            energies,
        })
    }

    pub fn model(&self) -> &QuboModel {
        &self.model
    }

    pub fn n_qubits(&self) -> usize {
        self.model.n()
    }

    /// QUBO energy of every basis state, indexed big-endian.
    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn run(&self, params: &QaoaParams) -> Result<StateVector> {
        let mut state = StateVector::uniform(self.n_qubits())?;
        for (&gamma, &beta) in params.gammas.iter().zip(&params.betas) {
            for (q, &h) in self.field.iter().enumerate() {
                state.apply_rz(q, h * gamma)?;
            }
            for &((i, j), w) in &self.couplings {
                state.apply_rzz(i, j, w * gamma)?;
            }
            let theta = mixer_angle(beta);
            for q in 0..self.n_qubits() {
                state.apply_rx(q, theta)?;
            }
        }
        Ok(state)
    }

    /// Exact expected energy of the ansatz state.
    pub fn objective(&self, params: &QaoaParams) -> Result<f64> {
        self.run(params)?.expectation_diag(&self.energies)
    }

    /// Objective on the flat `[γ.., β..]` layout used by the optimizers.
    /// Simulator errors cannot occur once the circuit is built.
    pub fn objective_flat(&self, x: &[f64]) -> f64 {
        self.objective(&QaoaParams::from_flat(x))
            .expect("circuit width validated at construction")
    }

    /// Shot-based estimate of the objective: the mean energy of `shots`
    /// measurement outcomes. Not used by the benchmark.
    pub fn sampled_objective<R: Rng + ?Sized>(
        &self,
        params: &QaoaParams,
        shots: usize,
        rng: &mut R,
    ) -> Result<f64> {
        let state = self.run(params)?;
        let draws = state.sample(shots.max(1), rng);
        let total: f64 = draws.iter().map(|z| self.energies[z.to_index()]).sum();
        Ok(total / draws.len() as f64)
    }

    /// Measures the final state `sample_count(n)` times and keeps the
    /// lowest-energy outcome (ties go to the smallest bitstring).
    ///
    /// `evaluations` is left at zero and `wall_time` covers only the readout;
    /// [`solve`] fills both for a full optimize-and-read run.
    pub fn finalize<R: Rng + ?Sized>(&self, params: &QaoaParams, rng: &mut R) -> Result<QaoaOutcome> {
        let start = Instant::now();
        let state = self.run(params)?;
        let mut outcome = self.readout(&state, params, rng)?;
        outcome.wall_time = start.elapsed().as_secs_f64();
        Ok(outcome)
    }

    /// The measurement half of [`QaoaCircuit::finalize`] on an already
    /// prepared state.
    pub fn readout<R: Rng + ?Sized>(
        &self,
        state: &StateVector,
        params: &QaoaParams,
        rng: &mut R,
    ) -> Result<QaoaOutcome> {
        let objective_value = state.expectation_diag(&self.energies)?;
        let s = sample_count(self.n_qubits());
        let samples = state.sample(s, rng);
        let best_z = samples
            .iter()
            .min_by(|a, b| {
                let ea = self.energies[a.to_index()];
                let eb = self.energies[b.to_index()];
                ea.total_cmp(&eb).then_with(|| a.cmp(b))
            })
            .expect("at least one sample")
            .clone();
        let best = PartitionSolution::evaluate(self.model.instance(), best_z)?;
        Ok(QaoaOutcome {
            best,
            params: params.clone(),
            objective_value,
            evaluations: 0,
            samples_taken: s,
            samples,
            wall_time: 0.0,
        })
    }
}

/// Result of a tuned-and-measured QAOA run.
#[derive(Debug, Clone, PartialEq)]
pub struct QaoaOutcome {
    pub best: PartitionSolution,
    pub params: QaoaParams,
    /// Expected energy at `params`.
    pub objective_value: f64,
    /// Objective calls spent by the optimizer.
    pub evaluations: usize,
    pub samples_taken: usize,
    /// The measured bitstrings, in draw order.
    pub samples: Vec<Bitstring>,
    pub wall_time: f64,
}

/// Builds the ansatz state for `params` on a fresh circuit.
pub fn run_ansatz(model: &QuboModel, params: &QaoaParams) -> Result<StateVector> {
    QaoaCircuit::new(model)?.run(params)
}

pub fn objective(model: &QuboModel, params: &QaoaParams) -> Result<f64> {
    QaoaCircuit::new(model)?.objective(params)
}

/// Tunes the `2p` angles with `algorithm` (starting from random angles in
/// `(-π, π)`), then measures the result. The wall time covers both phases.
pub fn solve<R: Rng + ?Sized>(
    circuit: &QaoaCircuit,
    layers: usize,
    algorithm: crate::optim::Algorithm,
    cfg: &crate::optim::OptimizerConfig,
    rng: &mut R,
) -> Result<QaoaOutcome> {
    let start = Instant::now();
    let spec = crate::optim::ObjectiveSpec::with_default_bounds(2 * layers, |x: &[f64]| {
        circuit.objective_flat(x)
    });
    let trace = algorithm.minimize_with(&spec, cfg, rng)?;
    let params = QaoaParams::from_flat(&trace.best_point);
    let mut outcome = circuit.finalize(&params, rng)?;
    outcome.evaluations = trace.evaluations;
    outcome.objective_value = trace.best_cost;
    outcome.wall_time = start.elapsed().as_secs_f64();
    Ok(outcome)
}
