//! Differential evolution, rand/1/bin.
//!
//! Each generation builds one trial per target from the current population,
//! evaluates all trials, then keeps a trial whenever its cost is no worse
//! than its target's.

use rand::Rng;

use super::{check_population, ObjectiveSpec, OptimizerConfig, OptimizerTrace, TraceRecorder};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeParams {
    /// Differential weight `F`.
    pub scale: f64,
    /// Crossover probability `CR`.
    pub crossover: f64,
}

impl Default for DeParams {
    fn default() -> Self {
        DeParams {
            scale: 0.8,
            crossover: 0.9,
        }
    }
}

impl DeParams {
    fn validate(&self) -> Result<()> {
        if !(0.0..2.0).contains(&self.scale) {
            return Err(Error::config(format!("DE scale {} outside [0, 2)", self.scale)));
        }
        if !(0.0..=1.0).contains(&self.crossover) {
            return Err(Error::config(format!(
                "DE crossover {} outside [0, 1]",
                self.crossover
            )));
        }
        Ok(())
    }
}

pub fn optimize_de<F, R>(
    obj: &ObjectiveSpec<F>,
    cfg: &OptimizerConfig,
    rng: &mut R,
) -> Result<OptimizerTrace>
where
    F: Fn(&[f64]) -> f64 + Sync,
    R: Rng + ?Sized,
{
    run_de(obj, cfg, rng, |_, _| {})
}

/// `observe` sees the population and its costs after initialization and
/// after every generation.
pub(crate) fn run_de<F, R>(
    obj: &ObjectiveSpec<F>,
    cfg: &OptimizerConfig,
    rng: &mut R,
    mut observe: impl FnMut(&[Vec<f64>], &[f64]),
) -> Result<OptimizerTrace>
where
    F: Fn(&[f64]) -> f64 + Sync,
    R: Rng + ?Sized,
{
    check_population(cfg, 4, "differential evolution")?;
    cfg.de.validate()?;
    let n = cfg.population;
    let dim = obj.dim();
    let DeParams { scale, crossover } = cfg.de;

    let mut rec = TraceRecorder::new(dim);
    let mut pop: Vec<Vec<f64>> = (0..n).map(|_| obj.random_point(rng)).collect();
    let mut costs = obj.evaluate_batch(&pop);
    rec.observe(&pop, &costs);
    rec.end_iteration();
    observe(&pop, &costs);

    for _ in 0..cfg.iterations {
        let trials: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                let [r1, r2, r3] = distinct_partners(n, i, rng);
                let mut mutant: Vec<f64> = (0..dim)
                    .map(|d| pop[r1][d] + scale * (pop[r2][d] - pop[r3][d]))
                    .collect();
                obj.clamp(&mut mutant);
                let forced = rng.gen_range(0..dim);
                (0..dim)
                    .map(|d| {
                        if rng.gen::<f64>() < crossover || d == forced {
                            mutant[d]
                        } else {
                            pop[i][d]
                        }
                    })
                    .collect()
            })
            .collect();

        let trial_costs = obj.evaluate_batch(&trials);
        rec.observe(&trials, &trial_costs);
        for (i, (trial, cost)) in trials.into_iter().zip(trial_costs).enumerate() {
            if cost <= costs[i] {
                pop[i] = trial;
                costs[i] = cost;
            }
        }
        rec.end_iteration();
        observe(&pop, &costs);
    }
    Ok(rec.finish())
}

/// Three mutually distinct indices, all different from `target`.
fn distinct_partners<R: Rng + ?Sized>(n: usize, target: usize, rng: &mut R) -> [usize; 3] {
    let mut picked = [usize::MAX; 3];
    for k in 0..3 {
        picked[k] = loop {
            let r = rng.gen_range(0..n);
            if r != target && !picked[..k].contains(&r) {
                break r;
            }
        };
    }
    picked
}
