//! Binary-encoded genetic algorithm.
//!
//! A chromosome is `D·B` bits; gene `d` is the `B`-bit big-endian integer
//! `v` mapped linearly onto `[lo_d, hi_d]` as `lo + (hi - lo)·v / (2^B - 1)`.
//! Each generation draws `N` children, each from two roulette-selected
//! parents (fitness `1 / (1 + cost)`), uniform crossover and per-bit
//! mutation. If no child beats the previous generation's best member, that
//! member replaces the worst child.

use rand::Rng;

use super::{
    check_population, cost_to_fitness, roulette, ObjectiveSpec, OptimizerConfig, OptimizerTrace,
    TraceRecorder,
};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaParams {
    /// Bits per real-valued gene.
    pub bits_per_gene: u32,
    /// Per-bit flip probability; `None` means `1 / chromosome length`.
    pub mutation_rate: Option<f64>,
}

impl Default for GaParams {
    fn default() -> Self {
        GaParams {
            bits_per_gene: 16,
            mutation_rate: None,
        }
    }
}

impl GaParams {
    fn validate(&self) -> Result<()> {
        if !(1..=52).contains(&self.bits_per_gene) {
            return Err(Error::config(format!(
                "GA bits per gene {} outside 1..=52",
                self.bits_per_gene
            )));
        }
        if let Some(p) = self.mutation_rate {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::config(format!("GA mutation rate {p} outside [0, 1]")));
            }
        }
        Ok(())
    }
}

type Chromosome = Vec<bool>;

pub fn optimize_ga<F, R>(
    obj: &ObjectiveSpec<F>,
    cfg: &OptimizerConfig,
    rng: &mut R,
) -> Result<OptimizerTrace>
where
    F: Fn(&[f64]) -> f64 + Sync,
    R: Rng + ?Sized,
{
    run_ga(obj, cfg, rng, None)
}

/// `initial` replaces the random first generation when given.
pub(crate) fn run_ga<F, R>(
    obj: &ObjectiveSpec<F>,
    cfg: &OptimizerConfig,
    rng: &mut R,
    initial: Option<Vec<Chromosome>>,
) -> Result<OptimizerTrace>
where
    F: Fn(&[f64]) -> f64 + Sync,
    R: Rng + ?Sized,
{
    check_population(cfg, 2, "genetic algorithm")?;
    cfg.ga.validate()?;
    let n = cfg.population;
    let bits = cfg.ga.bits_per_gene as usize;
    let length = obj.dim() * bits;
    let mutation = cfg.ga.mutation_rate.unwrap_or(1.0 / length as f64);
    let decode = |c: &Chromosome| decode(c, bits, obj.bounds());

    let mut pop: Vec<Chromosome> = match initial {
        Some(p) => {
            if p.len() != n || p.iter().any(|c| c.len() != length) {
                return Err(Error::arg("initial GA population has the wrong shape"));
            }
            p
        }
        None => (0..n)
            .map(|_| (0..length).map(|_| rng.gen::<bool>()).collect())
            .collect(),
    };

    let mut rec = TraceRecorder::new(obj.dim());
    let mut points: Vec<Vec<f64>> = pop.iter().map(decode).collect();
    let mut costs = obj.evaluate_batch(&points);
    rec.observe(&points, &costs);
    rec.end_iteration();

    for _ in 0..cfg.iterations {
        let floor = costs.iter().copied().fold(0.0, f64::min);
        let fitness: Vec<f64> = costs.iter().map(|&c| cost_to_fitness(c, floor)).collect();

        let mut children: Vec<Chromosome> = (0..n)
            .map(|_| {
                let a = &pop[roulette(&fitness, rng)];
                let b = &pop[roulette(&fitness, rng)];
                a.iter()
                    .zip(b)
                    .map(|(&x, &y)| {
                        let bit = if rng.gen::<f64>() <= 0.5 { x } else { y };
                        if mutation > 0.0 && rng.gen::<f64>() < mutation {
                            !bit
                        } else {
                            bit
                        }
                    })
                    .collect()
            })
            .collect();

        let mut child_points: Vec<Vec<f64>> = children.iter().map(decode).collect();
        let mut child_costs = obj.evaluate_batch(&child_points);
        rec.observe(&child_points, &child_costs);

        let (elite, elite_cost) = argmin(&costs);
        let (_, best_child) = argmin(&child_costs);
        if best_child > elite_cost {
            let worst = argmax(&child_costs);
            children[worst] = pop[elite].clone();
            child_points[worst] = points[elite].clone();
            child_costs[worst] = elite_cost;
        }
        pop = children;
        points = child_points;
        costs = child_costs;
        rec.end_iteration();
    }
    Ok(rec.finish())
}

pub(crate) fn decode(chromosome: &[bool], bits: usize, bounds: &[(f64, f64)]) -> Vec<f64> {
    let max = ((1u64 << bits) - 1) as f64;
    chromosome
        .chunks_exact(bits)
        .zip(bounds)
        .map(|(gene, &(lo, hi))| {
            let v = gene.iter().fold(0u64, |acc, &b| (acc << 1) | b as u64);
            lo + (hi - lo) * (v as f64 / max)
        })
        .collect()
}

fn argmin(xs: &[f64]) -> (usize, f64) {
    xs.iter()
        .enumerate()
        .fold((0, f64::INFINITY), |(bi, bv), (i, &v)| if v < bv { (i, v) } else { (bi, bv) })
}

fn argmax(xs: &[f64]) -> usize {
    xs.iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |(bi, bv), (i, &v)| if v > bv { (i, v) } else { (bi, bv) })
        .0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::optim::test_functions::sphere;
    use crate::seed::rng_from_seed;

    #[test]
    fn decode_maps_endpoints() {
        let b = [(-1.0, 3.0)];
        assert_eq!(decode(&[false, false, false, false], 4, &b), vec![-1.0]);
        assert_eq!(decode(&[true, true, true, true], 4, &b), vec![3.0]);
        assert_eq!(decode(&[false, true, false, true], 4, &b), vec![-1.0 + 4.0 * 5.0 / 15.0]);
        let two = decode(&[true, false, false, true], 2, &[(0.0, 3.0), (0.0, 3.0)]);
        assert_eq!(two, vec![2.0, 1.0]);
    }

    #[test]
    fn identical_population_without_mutation_is_frozen() {
        let obj = ObjectiveSpec::with_default_bounds(2, sphere);
        let mut cfg = OptimizerConfig::with_budget(6, 20, 0);
        cfg.ga.mutation_rate = Some(0.0);
        cfg.ga.bits_per_gene = 8;
        let mut rng = rng_from_seed(3);
        let chrom: Vec<bool> = (0..16).map(|_| rng.gen()).collect();
        let t = run_ga(&obj, &cfg, &mut rng, Some(vec![chrom.clone(); 6])).unwrap();
        let first = t.best_so_far[0];
        assert!(t.best_so_far.iter().all(|&c| c == first));
        assert_eq!(t.best_point, decode(&chrom, 8, obj.bounds()));
    }

    #[test]
    fn one_bit_search_space() {
        let obj = ObjectiveSpec::new(vec![(0.0, 1.0)], |x: &[f64]| (x[0] - 0.9).powi(2)).unwrap();
        let mut cfg = OptimizerConfig::with_budget(4, 1, 0);
        cfg.ga.bits_per_gene = 1;
        for seed in 0..20 {
            let t = optimize_ga(&obj, &cfg, &mut rng_from_seed(seed)).unwrap();
            // With four random one-bit individuals plus four children the
            // point 1.0 is all but certain; the answer must be one of {0, 1}.
            assert!(t.best_point == vec![1.0] || t.best_point == vec![0.0]);
            if t.best_point == vec![0.0] {
                assert_eq!(t.best_cost, 0.81);
            }
        }
        let hits = (0..20)
            .filter(|&s| optimize_ga(&obj, &cfg, &mut rng_from_seed(s)).unwrap().best_point == vec![1.0])
            .count();
        assert!(hits >= 19);
    }

    #[test]
    fn sphere_improves_monotonically() {
        let obj = ObjectiveSpec::with_default_bounds(4, sphere);
        let cfg = OptimizerConfig::with_budget(10, 50, 1);
        let t = optimize_ga(&obj, &cfg, &mut rng_from_seed(1)).unwrap();
        assert!(t.best_so_far.windows(2).all(|w| w[1] <= w[0]));
        assert!(t.best_cost < t.best_so_far[0]);
        assert_eq!(t.evaluations, 510);
    }

    #[test]
    fn rejects_bad_config() {
        let obj = ObjectiveSpec::with_default_bounds(1, sphere);
        let cfg = OptimizerConfig::with_budget(1, 3, 0);
        assert!(matches!(optimize_ga(&obj, &cfg, &mut rng_from_seed(0)), Err(Error::Config(_))));
        let mut cfg = OptimizerConfig::with_budget(4, 3, 0);
        cfg.ga.bits_per_gene = 0;
        assert!(optimize_ga(&obj, &cfg, &mut rng_from_seed(0)).is_err());
        cfg.ga.bits_per_gene = 8;
        cfg.ga.mutation_rate = Some(1.5);
        assert!(optimize_ga(&obj, &cfg, &mut rng_from_seed(0)).is_err());
    }
}
