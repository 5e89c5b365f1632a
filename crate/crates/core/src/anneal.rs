//! Simulated annealing over QUBO bitstrings.
//!
//! Each read starts from a random assignment and performs `sweeps` rounds of
//! `n` single-bit Metropolis proposals (site chosen uniformly at random)
//! under a geometric schedule from `T_hi` down to `T_lo`. The result is the
//! lowest energy seen across all reads. Read `r` draws from its own stream
//! seeded with `derive_seed(seed, [r])`, so reads can run in any order.
//!
//! This is a classical stand-in used as a comparison point; output rows are
//! labelled `sa-baseline`.

use rand::Rng;

use crate::parallel::map_ordered;
use crate::qubo::{Bitstring, PartitionSolution, QuboModel};
use crate::seed::{derive_seed, rng_from_seed};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct AnnealConfig {
    pub reads: usize,
    pub sweeps: usize,
    /// Starting temperature; `None` picks `10 · max |ΔE|` from the model.
    pub t_hi: Option<f64>,
    pub t_lo: f64,
    pub seed: u64,
}

impl Default for AnnealConfig {
    fn default() -> Self {
        AnnealConfig {
            reads: 1000,
            sweeps: 1000,
            t_hi: None,
            t_lo: 0.1,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnnealOutcome {
    pub best: PartitionSolution,
    /// Lowest energy reached by each read, in read order.
    pub per_read: Vec<i128>,
    /// Metropolis proposals made across all reads.
    pub proposals: u64,
}

/// Upper estimate of a single flip's energy change:
/// `max_i |c_i| + Σ_j Q_ij`.
pub fn max_flip_delta(model: &QuboModel) -> f64 {
    (0..model.n())
        .map(|i| model.linear()[i].unsigned_abs() as f64 + model.coupling_row_sum(i) as f64)
        .fold(0.0, f64::max)
}

pub fn simulated_anneal(model: &QuboModel, cfg: &AnnealConfig) -> Result<AnnealOutcome> {
    if cfg.reads == 0 {
        return Err(Error::arg("annealing needs at least one read"));
    }
    // A model whose flips never change the energy gets a unit scale.
    let t_hi = cfg.t_hi.unwrap_or_else(|| 10.0 * max_flip_delta(model).max(1.0));
    if !(t_hi > cfg.t_lo && cfg.t_lo > 0.0 && t_hi.is_finite()) {
        return Err(Error::arg(format!(
            "temperatures must satisfy T_hi > T_lo > 0, got {t_hi} and {}",
            cfg.t_lo
        )));
    }
    let schedule = geometric_schedule(t_hi, cfg.t_lo, cfg.sweeps);
    let couplings = model.dense_couplings();

    let reads: Vec<usize> = (0..cfg.reads).collect();
    let results = map_ordered(&reads, |&r| {
        let mut rng = rng_from_seed(derive_seed(cfg.seed, &[r as u64]));
        anneal_read(model, &couplings, &schedule, &mut rng, |_| {})
    });

    let per_read: Vec<i128> = results.iter().map(|(_, e)| *e).collect();
    let (best_z, _) = results
        .into_iter()
        .min_by_key(|(_, e)| *e)
        .expect("at least one read");
    Ok(AnnealOutcome {
        best: PartitionSolution::evaluate(model.instance(), best_z)?,
        per_read,
        proposals: (cfg.reads * cfg.sweeps * model.n()) as u64,
    })
}

fn geometric_schedule(t_hi: f64, t_lo: f64, sweeps: usize) -> Vec<f64> {
    match sweeps {
        0 => Vec::new(),
        1 => vec![t_hi],
        _ => {
            let ratio = (t_lo / t_hi).powf(1.0 / (sweeps - 1) as f64);
            (0..sweeps).map(|s| t_hi * ratio.powi(s as i32)).collect()
        }
    }
}

/// One read. Returns the best assignment visited and its energy; `visit`
/// sees the assignment after every proposal.
fn anneal_read<R: Rng + ?Sized>(
    model: &QuboModel,
    couplings: &[Vec<i64>],
    schedule: &[f64],
    rng: &mut R,
    mut visit: impl FnMut(&[bool]),
) -> (Bitstring, i128) {
    let n = model.n();
    let mut z: Vec<bool> = (0..n).map(|_| rng.gen()).collect();
    // field[i] = c_i + Σ_j Q_ij z_j: the energy change of setting z_i = 1.
    let mut field: Vec<i128> = (0..n)
        .map(|i| {
            model.linear()[i] as i128
                + (0..n).filter(|&j| z[j]).map(|j| couplings[i][j] as i128).sum::<i128>()
        })
        .collect();
    let mut e: i128 = model.constant() as i128
        + (0..n)
            .filter(|&i| z[i])
            .map(|i| model.linear()[i] as i128)
            .sum::<i128>()
        + model
            .quad()
            .iter()
            .filter(|((i, j), _)| z[*i] && z[*j])
            .map(|(_, &q)| q as i128)
            .sum::<i128>();
    let mut best_e = e;
    let mut best_z = z.clone();

    for &t in schedule {
        for _ in 0..n {
            let i = rng.gen_range(0..n);
            let delta = if z[i] { -field[i] } else { field[i] };
            let accept = delta <= 0 || rng.gen::<f64>() < (-(delta as f64) / t).exp();
            if accept {
                let sign: i128 = if z[i] { -1 } else { 1 };
                z[i] = !z[i];
                e += delta;
                for (j, f) in field.iter_mut().enumerate() {
                    if j != i {
                        *f += sign * couplings[i][j] as i128;
                    }
                }
                if e < best_e {
                    best_e = e;
                    best_z.clone_from(&z);
                }
            }
            visit(&z);
        }
    }
    (Bitstring::new(best_z), best_e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qubo::{brute_force_best, build_qubo, energy, generate_instance, NppInstance};

    fn model(v: &[u64]) -> QuboModel {
        build_qubo(&NppInstance::new(v.to_vec()).unwrap()).unwrap()
    }

    #[test]
    fn small_instance_seed_panel() {
        let m = model(&[4, 5, 6, 7, 8]);
        let hits = (0..10)
            .filter(|&seed| {
                let cfg = AnnealConfig {
                    seed,
                    ..Default::default()
                };
                simulated_anneal(&m, &cfg).unwrap().best.energy == 0
            })
            .count();
        assert!(hits >= 9, "{hits}/10");
    }

    #[test]
    fn no_sweeps_returns_random_start() {
        let m = model(&[3, 9, 4, 1, 7]);
        let cfg = AnnealConfig {
            reads: 1,
            sweeps: 0,
            seed: 12,
            ..Default::default()
        };
        let out = simulated_anneal(&m, &cfg).unwrap();
        let mut rng = rng_from_seed(derive_seed(12, &[0]));
        let start: Vec<bool> = (0..5).map(|_| rng.gen()).collect();
        assert_eq!(out.best.bitstring, Bitstring::new(start));
        assert_eq!(out.per_read[0], out.best.energy as i128);
        assert_eq!(out.proposals, 0);
    }

    #[test]
    fn oracle_dominance_and_best_of_reads() {
        for seed in 0..5 {
            let inst = generate_instance(7, seed, 1, 100).unwrap();
            let m = build_qubo(&inst).unwrap();
            let cfg = AnnealConfig {
                reads: 20,
                sweeps: 50,
                seed,
                ..Default::default()
            };
            let out = simulated_anneal(&m, &cfg).unwrap();
            let exact = brute_force_best(&inst).unwrap();
            assert!(out.best.energy >= exact.energy);
            assert_eq!(out.best.energy as i128, *out.per_read.iter().min().unwrap());
            assert_eq!(out.best.energy, energy(&inst, &out.best.bitstring).unwrap());
            assert_eq!(out, simulated_anneal(&m, &cfg).unwrap());
        }
    }

    #[test]
    fn infinite_temperature_walk_is_uniform() {
        let m = model(&[1, 2, 3]);
        let couplings = m.dense_couplings();
        let schedule = vec![1e300; 100_000];
        let mut counts = [0usize; 8];
        let mut rng = rng_from_seed(77);
        anneal_read(&m, &couplings, &schedule, &mut rng, |z| {
            counts[Bitstring::new(z.to_vec()).to_index()] += 1;
        });
        let total: usize = counts.iter().sum();
        for c in counts {
            let f = c as f64 / total as f64;
            assert!((f - 0.125).abs() <= 0.03 * 0.125, "frequency {f}");
        }
    }

    #[test]
    fn running_energy_matches_direct() {
        let inst = generate_instance(6, 5, 1, 50).unwrap();
        let m = build_qubo(&inst).unwrap();
        let couplings = m.dense_couplings();
        let schedule = geometric_schedule(1000.0, 0.1, 30);
        let mut rng = rng_from_seed(1);
        let (z, e) = anneal_read(&m, &couplings, &schedule, &mut rng, |_| {});
        assert_eq!(e, energy(&inst, &z).unwrap() as i128);
    }

    #[test]
    fn schedule_shape() {
        let s = geometric_schedule(100.0, 1.0, 3);
        assert!((s[0] - 100.0).abs() < 1e-12 && (s[1] - 10.0).abs() < 1e-9 && (s[2] - 1.0).abs() < 1e-9);
        assert!(geometric_schedule(5.0, 1.0, 0).is_empty());
    }

    #[test]
    fn bad_temperatures() {
        let m = model(&[1, 2]);
        let cfg = AnnealConfig {
            t_hi: Some(0.1),
            t_lo: 0.5,
            ..Default::default()
        };
        assert!(simulated_anneal(&m, &cfg).is_err());
        let cfg = AnnealConfig {
            reads: 0,
            ..Default::default()
        };
        assert!(simulated_anneal(&m, &cfg).is_err());
    }
}
