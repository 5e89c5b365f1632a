//! Ant colony search over a per-dimension bin grid.
//!
//! Dimension `d` is split into `K` equal bins whose centers are the only
//! values an ant can pick. An ant chooses bin `k` of dimension `d` with
//! probability proportional to `τ[d][k]^α · η[d][k]^β`, where the
//! desirability `η` is `1 / (1 + best cost seen with that bin)`. Bins no ant
//! has visited yet borrow the highest desirability of their dimension (or 1
//! before any visit), so unexplored bins are never starved.
//!
//! After each wave of `N` ants the table evaporates, `τ ← (1 - ρ)·τ`, and
//! every ant deposits `1 / (1 + cost)` on each bin it used. The first wave
//! runs on the initial table `τ0` and plays the role of a random
//! initialization, so a run makes `iterations + 1` waves.

use rand::Rng;

use super::{
    check_population, cost_to_fitness, ObjectiveSpec, OptimizerConfig, OptimizerTrace,
    TraceRecorder,
};
use crate::{Error, Result};

/// Upper bound on `K·D` pheromone cells.
pub const MAX_PHEROMONE_CELLS: usize = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AcoParams {
    /// Pheromone exponent `α`.
    pub alpha: f64,
    /// Desirability exponent `β`.
    pub beta: f64,
    /// Evaporation rate `ρ ∈ (0, 1]`.
    pub evaporation: f64,
    /// Initial pheromone `τ0 > 0`.
    pub initial_pheromone: f64,
    /// Bins per dimension `K`.
    pub bins: usize,
}

impl Default for AcoParams {
    fn default() -> Self {
        AcoParams {
            alpha: 1.0,
            beta: 2.0,
            evaporation: 0.1,
            initial_pheromone: 1.0,
            bins: 32,
        }
    }
}

impl AcoParams {
    fn validate(&self, dim: usize) -> Result<()> {
        if !(self.alpha >= 0.0 && self.alpha.is_finite() && self.beta >= 0.0 && self.beta.is_finite()) {
            return Err(Error::config("ACO exponents must be finite and >= 0"));
        }
        if !(self.evaporation > 0.0 && self.evaporation <= 1.0) {
            return Err(Error::config(format!(
                "ACO evaporation {} outside (0, 1]",
                self.evaporation
            )));
        }
        if !(self.initial_pheromone > 0.0 && self.initial_pheromone.is_finite()) {
            return Err(Error::config("ACO initial pheromone must be > 0"));
        }
        if self.bins == 0 {
            return Err(Error::config("ACO needs at least one bin per dimension"));
        }
        if self.bins.saturating_mul(dim) > MAX_PHEROMONE_CELLS {
            return Err(Error::capability(format!(
                "pheromone table of {} x {dim} exceeds {MAX_PHEROMONE_CELLS} cells",
                self.bins
            )));
        }
        Ok(())
    }
}

pub fn optimize_aco<F, R>(
    obj: &ObjectiveSpec<F>,
    cfg: &OptimizerConfig,
    rng: &mut R,
) -> Result<OptimizerTrace>
where
    F: Fn(&[f64]) -> f64 + Sync,
    R: Rng + ?Sized,
{
    run_aco(obj, cfg, rng, |_, _| {})
}

/// `observe` receives the pheromone table and the per-dimension choice
/// probabilities used for each wave, before the wave's ants are sampled.
pub(crate) fn run_aco<F, R>(
    obj: &ObjectiveSpec<F>,
    cfg: &OptimizerConfig,
    rng: &mut R,
    mut observe: impl FnMut(&[Vec<f64>], &[Vec<f64>]),
) -> Result<OptimizerTrace>
where
    F: Fn(&[f64]) -> f64 + Sync,
    R: Rng + ?Sized,
{
    check_population(cfg, 1, "ant colony")?;
    let dim = obj.dim();
    cfg.aco.validate(dim)?;
    let p = cfg.aco;
    let k = p.bins;

    let centers: Vec<Vec<f64>> = obj
        .bounds()
        .iter()
        .map(|&(lo, hi)| {
            let width = (hi - lo) / k as f64;
            (0..k).map(|b| lo + (b as f64 + 0.5) * width).collect()
        })
        .collect();

    let mut tau = vec![vec![p.initial_pheromone; k]; dim];
    let mut bin_best = vec![vec![f64::INFINITY; k]; dim];
    let mut floor = 0.0f64;
    let mut rec = TraceRecorder::new(dim);

    for _ in 0..=cfg.iterations {
        let probs: Vec<Vec<f64>> = (0..dim)
            .map(|d| {
                let eta = desirability(&bin_best[d], floor);
                bin_probabilities(&tau[d], &eta, p.alpha, p.beta)
            })
            .collect();
        observe(&tau, &probs);

        let choices: Vec<Vec<usize>> = (0..cfg.population)
            .map(|_| probs.iter().map(|pd| sample_index(pd, rng)).collect())
            .collect();
        let points: Vec<Vec<f64>> = choices
            .iter()
            .map(|c| c.iter().enumerate().map(|(d, &b)| centers[d][b]).collect())
            .collect();
        let costs = obj.evaluate_batch(&points);
        rec.observe(&points, &costs);

        floor = costs.iter().copied().fold(floor, f64::min);
        for (c, &cost) in choices.iter().zip(&costs) {
            for (d, &b) in c.iter().enumerate() {
                if cost < bin_best[d][b] {
                    bin_best[d][b] = cost;
                }
            }
        }
        for row in &mut tau {
            for t in row.iter_mut() {
                *t *= 1.0 - p.evaporation;
            }
        }
        for (c, &cost) in choices.iter().zip(&costs) {
            let deposit = cost_to_fitness(cost, floor);
            for (d, &b) in c.iter().enumerate() {
                tau[d][b] += deposit;
            }
        }
        // Keeps τ strictly positive when ρ = 1 and every deposit vanished.
        for row in &mut tau {
            for t in row.iter_mut() {
                if *t < f64::MIN_POSITIVE {
                    *t = f64::MIN_POSITIVE;
                }
            }
        }
        rec.end_iteration();
    }
    Ok(rec.finish())
}

fn desirability(bin_best: &[f64], floor: f64) -> Vec<f64> {
    let seen: Vec<Option<f64>> = bin_best
        .iter()
        .map(|&c| c.is_finite().then(|| cost_to_fitness(c, floor)))
        .collect();
    let fallback = seen
        .iter()
        .flatten()
        .copied()
        .fold(None, |m: Option<f64>, v| Some(m.map_or(v, |m| m.max(v))))
        .unwrap_or(1.0);
    seen.into_iter().map(|e| e.unwrap_or(fallback)).collect()
}

/// Normalised `τ^α · η^β`, or uniform if every weight underflows.
pub(crate) fn bin_probabilities(tau: &[f64], eta: &[f64], alpha: f64, beta: f64) -> Vec<f64> {
    let weights: Vec<f64> = tau
        .iter()
        .zip(eta)
        .map(|(&t, &e)| t.powf(alpha) * e.powf(beta))
        .collect();
    let total: f64 = weights.iter().sum();
    if total > 0.0 && total.is_finite() {
        weights.iter().map(|w| w / total).collect()
    } else {
        vec![1.0 / tau.len() as f64; tau.len()]
    }
}

fn sample_index<R: Rng + ?Sized>(probs: &[f64], rng: &mut R) -> usize {
    let u = rng.gen::<f64>();
    let mut acc = 0.0;
    for (i, &p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return i;
        }
    }
    probs.iter().rposition(|&p| p > 0.0).unwrap_or(probs.len() - 1)
}
