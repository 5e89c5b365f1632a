//! Inertia-weight particle swarm.

use rand::Rng;

use super::{
    check_population, uniform, ObjectiveSpec, OptimizerConfig, OptimizerTrace, TraceRecorder,
};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PsoParams {
    pub inertia: f64,
    pub cognitive: f64,
    pub social: f64,
}

impl Default for PsoParams {
    /// Clerc–Kennedy constriction values.
    fn default() -> Self {
        PsoParams {
            inertia: 0.729,
            cognitive: 1.49445,
            social: 1.49445,
        }
    }
}

impl PsoParams {
    fn validate(&self) -> Result<()> {
        let ok = [self.inertia, self.cognitive, self.social]
            .iter()
            .all(|v| v.is_finite() && *v >= 0.0);
        if !ok {
            return Err(Error::config(format!("PSO coefficients must be finite and >= 0: {self:?}")));
        }
        Ok(())
    }
}

pub fn optimize_pso<F, R>(
    obj: &ObjectiveSpec<F>,
    cfg: &OptimizerConfig,
    rng: &mut R,
) -> Result<OptimizerTrace>
where
    F: Fn(&[f64]) -> f64 + Sync,
    R: Rng + ?Sized,
{
    run_pso(obj, cfg, rng, None, |_| {})
}

/// What [`run_pso`] exposes to its observer after every swarm update.
#[cfg_attr(not(test), allow(dead_code))]
pub(crate) struct SwarmView<'a> {
    pub costs: &'a [f64],
    pub pbest_costs: &'a [f64],
    pub gbest_cost: f64,
}

pub(crate) fn run_pso<F, R>(
    obj: &ObjectiveSpec<F>,
    cfg: &OptimizerConfig,
    rng: &mut R,
    initial: Option<Vec<Vec<f64>>>,
    mut observe: impl FnMut(SwarmView<'_>),
) -> Result<OptimizerTrace>
where
    F: Fn(&[f64]) -> f64 + Sync,
    R: Rng + ?Sized,
{
    check_population(cfg, 1, "particle swarm")?;
    cfg.pso.validate()?;
    let n = cfg.population;
    let dim = obj.dim();
    let PsoParams {
        inertia,
        cognitive,
        social,
    } = cfg.pso;
    let vmax: Vec<f64> = obj.bounds().iter().map(|&(lo, hi)| hi - lo).collect();

    let mut pos: Vec<Vec<f64>> = match initial {
        Some(p) => {
            if p.len() != n || p.iter().any(|x| x.len() != dim) {
                return Err(Error::arg("initial swarm has the wrong shape"));
            }
            p
        }
        None => (0..n).map(|_| obj.random_point(rng)).collect(),
    };
    let mut vel: Vec<Vec<f64>> = (0..n)
        .map(|_| vmax.iter().map(|&v| uniform(rng, -v, v)).collect())
        .collect();

    let mut rec = TraceRecorder::new(dim);
    let costs = obj.evaluate_batch(&pos);
    rec.observe(&pos, &costs);
    rec.end_iteration();
    let mut pbest = pos.clone();
    let mut pbest_costs = costs.clone();
    let mut gbest_idx = 0;
    for i in 1..n {
        if pbest_costs[i] <= pbest_costs[gbest_idx] {
            gbest_idx = i;
        }
    }
    let mut gbest = pbest[gbest_idx].clone();
    let mut gbest_cost = pbest_costs[gbest_idx];
    observe(SwarmView {
        costs: &costs,
        pbest_costs: &pbest_costs,
        gbest_cost,
    });

    for _ in 0..cfg.iterations {
        for i in 0..n {
            for d in 0..dim {
                let r1 = rng.gen::<f64>();
                let r2 = rng.gen::<f64>();
                let v = inertia * vel[i][d]
                    + cognitive * r1 * (pbest[i][d] - pos[i][d])
                    + social * r2 * (gbest[d] - pos[i][d]);
                vel[i][d] = v.clamp(-vmax[d], vmax[d]);
                pos[i][d] += vel[i][d];
            }
            obj.clamp(&mut pos[i]);
        }

        let costs = obj.evaluate_batch(&pos);
        rec.observe(&pos, &costs);
        for i in 0..n {
            if costs[i] <= pbest_costs[i] {
                pbest[i].clone_from(&pos[i]);
                pbest_costs[i] = costs[i];
            }
            if pbest_costs[i] <= gbest_cost {
                gbest.clone_from(&pbest[i]);
                gbest_cost = pbest_costs[i];
            }
        }
        rec.end_iteration();
        observe(SwarmView {
            costs: &costs,
            pbest_costs: &pbest_costs,
            gbest_cost,
        });
    }
    Ok(rec.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::optim::test_functions::{rastrigin, sphere};
    use crate::seed::rng_from_seed;

    #[test]
    fn frozen_swarm() {
        let obj = ObjectiveSpec::with_default_bounds(3, sphere);
        let mut cfg = OptimizerConfig::with_budget(5, 10, 0);
        cfg.pso = PsoParams {
            inertia: 0.0,
            cognitive: 0.0,
            social: 0.0,
        };
        let mut first: Option<Vec<f64>> = None;
        let t = run_pso(&obj, &cfg, &mut rng_from_seed(6), None, |v| {
            let f = first.get_or_insert_with(|| v.costs.to_vec());
            assert_eq!(v.costs, f.as_slice());
        })
        .unwrap();
        let init_best = first.unwrap().into_iter().fold(f64::INFINITY, f64::min);
        assert_eq!(t.best_cost, init_best);
    }

    #[test]
    fn particle_at_optimum_stays() {
        let obj = ObjectiveSpec::with_default_bounds(4, sphere);
        let cfg = OptimizerConfig::with_budget(1, 30, 0);
        let t = run_pso(&obj, &cfg, &mut rng_from_seed(2), Some(vec![vec![0.0; 4]]), |v| {
            assert_eq!(v.gbest_cost, 0.0);
        })
        .unwrap();
        assert!(t.best_so_far.iter().all(|&c| c == 0.0));
    }

    #[test]
    fn sphere_converges() {
        let obj = ObjectiveSpec::with_default_bounds(4, sphere);
        let cfg = OptimizerConfig::with_budget(10, 50, 1);
        let t = optimize_pso(&obj, &cfg, &mut rng_from_seed(1)).unwrap();
        assert!(t.best_cost < 1e-2, "{}", t.best_cost);
        assert_eq!(t.evaluations, 510);
    }

    #[test]
    fn best_dominance() {
        let obj = ObjectiveSpec::with_default_bounds(4, rastrigin);
        let cfg = OptimizerConfig::with_budget(8, 40, 0);
        for seed in 0..5 {
            let mut seen: Vec<f64> = vec![f64::INFINITY; 8];
            run_pso(&obj, &cfg, &mut rng_from_seed(seed), None, |v| {
                for i in 0..8 {
                    seen[i] = seen[i].min(v.costs[i]);
                    assert!(v.gbest_cost <= v.pbest_costs[i]);
                    assert_eq!(v.pbest_costs[i], seen[i]);
                    assert!(v.pbest_costs[i] <= v.costs[i]);
                }
            })
            .unwrap();
        }
    }
}
