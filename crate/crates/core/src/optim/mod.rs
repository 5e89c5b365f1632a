//! Black-box minimizers over a box-bounded real domain.
//!
//! Every optimizer draws its random numbers from one stream in a fixed
//! order, builds a whole generation of candidate points, and only then
//! evaluates them (in parallel under the `parallel` feature). The resulting
//! [`OptimizerTrace`] is therefore identical for a given seed no matter how
//! evaluations are scheduled.
//!
//! Population methods spend exactly `N·(iterations + 1)` evaluations: one
//! initial generation plus one per iteration. The simplex baseline is capped
//! at `N·iterations`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::parallel::map_ordered;
use crate::seed::rng_from_seed;
use crate::{Error, Result};

pub mod aco;
pub mod de;
pub mod ga;
pub mod pso;
pub mod simplex;

pub use aco::{optimize_aco, AcoParams};
pub use de::{optimize_de, DeParams};
pub use ga::{optimize_ga, GaParams};
pub use pso::{optimize_pso, PsoParams};
pub use simplex::{optimize_simplex, optimize_simplex_from};

/// A deterministic cost function on a box.
pub struct ObjectiveSpec<F> {
    bounds: Vec<(f64, f64)>,
    func: F,
}

impl<F> ObjectiveSpec<F>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    pub fn new(bounds: Vec<(f64, f64)>, func: F) -> Result<Self> {
        if bounds.is_empty() {
            return Err(Error::arg("objective needs at least one dimension"));
        }
        for (d, &(lo, hi)) in bounds.iter().enumerate() {
            if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
                return Err(Error::arg(format!("bad bounds ({lo}, {hi}) in dimension {d}")));
            }
        }
        Ok(ObjectiveSpec { bounds, func })
    }

    /// `dim` dimensions, each bounded by `(-π, π)`.
    pub fn with_default_bounds(dim: usize, func: F) -> Self {
        ObjectiveSpec {
            bounds: vec![(-PI, PI); dim.max(1)],
            func,
        }
    }

    pub fn dim(&self) -> usize {
        self.bounds.len()
    }

    pub fn bounds(&self) -> &[(f64, f64)] {
        &self.bounds
    }

    /// Evaluates one point. NaN costs are reported as `+∞`.
    pub fn evaluate(&self, x: &[f64]) -> f64 {
        let v = (self.func)(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    }

    pub(crate) fn evaluate_batch(&self, points: &[Vec<f64>]) -> Vec<f64> {
        map_ordered(points, |x| self.evaluate(x))
    }

    pub(crate) fn clamp(&self, x: &mut [f64]) {
        for (v, &(lo, hi)) in x.iter_mut().zip(&self.bounds) {
            *v = v.clamp(lo, hi);
        }
    }

    pub(crate) fn random_point<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        self.bounds
            .iter()
            .map(|&(lo, hi)| uniform(rng, lo, hi))
            .collect()
    }
}

/// `lo + (hi - lo)·u` with `u ∈ [0, 1)`; works for a degenerate interval.
pub(crate) fn uniform<R: Rng + ?Sized>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * rng.gen::<f64>()
}

/// Settings shared by every optimizer plus each one's own knobs.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerConfig {
    /// Population size `N` (ants, particles, individuals).
    pub population: usize,
    pub iterations: usize,
    pub seed: u64,
    pub de: DeParams,
    pub ga: GaParams,
    pub pso: PsoParams,
    pub aco: AcoParams,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            population: 10,
            iterations: 50,
            seed: 0,
            de: DeParams::default(),
            ga: GaParams::default(),
            pso: PsoParams::default(),
            aco: AcoParams::default(),
        }
    }
}

impl OptimizerConfig {
    pub fn with_budget(population: usize, iterations: usize, seed: u64) -> Self {
        OptimizerConfig {
            population,
            iterations,
            seed,
            ..Default::default()
        }
    }

    /// Upper bound on evaluations for population methods.
    pub fn population_budget(&self) -> usize {
        self.population * (self.iterations + 1)
    }

    /// Evaluation cap for the simplex baseline.
    pub fn simplex_budget(&self) -> usize {
        self.population * self.iterations
    }
}

/// Best-so-far history of a run.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerTrace {
    /// Best cost after initialization and after every iteration.
    pub best_so_far: Vec<f64>,
    pub evaluations: usize,
    pub best_point: Vec<f64>,
    pub best_cost: f64,
}

/// Incremental bookkeeping for [`OptimizerTrace`].
#[derive(Debug)]
pub(crate) struct TraceRecorder {
    best_point: Vec<f64>,
    best_cost: f64,
    history: Vec<f64>,
    evaluations: usize,
}

impl TraceRecorder {
    pub(crate) fn new(dim: usize) -> Self {
        TraceRecorder {
            best_point: vec![f64::NAN; dim],
            best_cost: f64::INFINITY,
            history: Vec::new(),
            evaluations: 0,
        }
    }

    /// Records a batch of evaluated points. The first strictly better point
    /// in batch order wins.
    pub(crate) fn observe(&mut self, points: &[Vec<f64>], costs: &[f64]) {
        self.evaluations += costs.len();
        for (x, &c) in points.iter().zip(costs) {
            if c < self.best_cost || self.best_point.iter().any(|v| v.is_nan()) {
                self.best_cost = c;
                self.best_point.clone_from(x);
            }
        }
    }

    pub(crate) fn end_iteration(&mut self) {
        self.history.push(self.best_cost);
    }

    pub(crate) fn evaluations(&self) -> usize {
        self.evaluations
    }

    pub(crate) fn finish(self) -> OptimizerTrace {
        OptimizerTrace {
            best_so_far: self.history,
            evaluations: self.evaluations,
            best_point: self.best_point,
            best_cost: self.best_cost,
        }
    }
}

/// Fitness used wherever a cost has to become a positive weight:
/// `1 / (1 + cost - floor)`, where `floor` is `min(0, lowest cost)` so the
/// weight stays in `(0, 1]` even for negative costs.
pub(crate) fn cost_to_fitness(cost: f64, floor: f64) -> f64 {
    if cost.is_finite() {
        1.0 / (1.0 + (cost - floor))
    } else {
        0.0
    }
}

/// Index drawn with probability proportional to `weights`, falling back to
/// uniform when the weights are degenerate (all equal, non-positive total,
/// or not finite).
pub(crate) fn roulette<R: Rng + ?Sized>(weights: &[f64], rng: &mut R) -> usize {
    let total: f64 = weights.iter().sum();
    let all_equal = weights.windows(2).all(|w| w[0] == w[1]);
    if all_equal || !(total > 0.0 && total.is_finite()) {
        return rng.gen_range(0..weights.len());
    }
    let u = rng.gen::<f64>() * total;
    let mut acc = 0.0;
    for (i, &w) in weights.iter().enumerate() {
        acc += w;
        if u < acc {
            return i;
        }
    }
    // Rounding can leave u just above the final partial sum.
    weights.iter().rposition(|&w| w > 0.0).unwrap_or(weights.len() - 1)
}

/// The five parameter optimizers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Algorithm {
    /// Nelder–Mead simplex, the non-population baseline.
    Simplex,
    Ga,
    De,
    Pso,
    Aco,
}

impl Algorithm {
    pub const ALL: [Algorithm; 5] = [
        Algorithm::Simplex,
        Algorithm::Ga,
        Algorithm::De,
        Algorithm::Pso,
        Algorithm::Aco,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Simplex => "baseline",
            Algorithm::Ga => "ga",
            Algorithm::De => "de",
            Algorithm::Pso => "pso",
            Algorithm::Aco => "aco",
        }
    }

    pub fn is_population(self) -> bool {
        !matches!(self, Algorithm::Simplex)
    }

    pub fn minimize_with<F, R>(
        self,
        obj: &ObjectiveSpec<F>,
        cfg: &OptimizerConfig,
        rng: &mut R,
    ) -> Result<OptimizerTrace>
    where
        F: Fn(&[f64]) -> f64 + Sync,
        R: Rng + ?Sized,
    {
        match self {
            Algorithm::Simplex => optimize_simplex(obj, cfg, rng),
            Algorithm::Ga => optimize_ga(obj, cfg, rng),
            Algorithm::De => optimize_de(obj, cfg, rng),
            Algorithm::Pso => optimize_pso(obj, cfg, rng),
            Algorithm::Aco => optimize_aco(obj, cfg, rng),
        }
    }

    /// Runs with an RNG seeded from `cfg.seed`.
    pub fn minimize<F>(self, obj: &ObjectiveSpec<F>, cfg: &OptimizerConfig) -> Result<OptimizerTrace>
    where
        F: Fn(&[f64]) -> f64 + Sync,
    {
        self.minimize_with(obj, cfg, &mut rng_from_seed(cfg.seed))
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| Error::arg(format!("unknown optimizer {s:?}")))
    }
}

pub(crate) fn check_population(cfg: &OptimizerConfig, min: usize, who: &str) -> Result<()> {
    if cfg.population < min {
        return Err(Error::config(format!(
            "{who} needs a population of at least {min}, got {}",
            cfg.population
        )));
    }
    Ok(())
}

#[cfg(test)]
pub(crate) mod test_functions {
    pub fn sphere(x: &[f64]) -> f64 {
        x.iter().map(|v| v * v).sum()
    }

    pub fn rastrigin(x: &[f64]) -> f64 {
        10.0 * x.len() as f64
            + x.iter()
                .map(|v| v * v - 10.0 * (2.0 * std::f64::consts::PI * v).cos())
                .sum::<f64>()
    }
}
