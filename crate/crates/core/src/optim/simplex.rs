//! Nelder–Mead simplex, the derivative-free baseline.
//!
//! Coefficients: reflection 1, expansion 2, contraction ½, shrink ½. Every
//! trial point is clamped into the box. The run stops when the evaluation
//! budget is spent or every vertex lies within `1e-8` (max-norm) of the best.

use rand::Rng;

use super::{ObjectiveSpec, OptimizerConfig, OptimizerTrace, TraceRecorder};
use crate::Result;

const DIAMETER_TOL: f64 = 1e-8;
/// Initial edge length as a fraction of each dimension's width.
const INITIAL_STEP: f64 = 0.1;

/// Starts from a uniformly random point of the box and spends at most
/// `N·iterations` evaluations.
pub fn optimize_simplex<F, R>(
    obj: &ObjectiveSpec<F>,
    cfg: &OptimizerConfig,
    rng: &mut R,
) -> Result<OptimizerTrace>
where
    F: Fn(&[f64]) -> f64 + Sync,
    R: Rng + ?Sized,
{
    let start = obj.random_point(rng);
    Ok(optimize_simplex_from(obj, start, cfg.simplex_budget()))
}

/// Runs from `start` with an explicit evaluation budget. The start point is
/// always evaluated, so a zero budget still costs one evaluation.
pub fn optimize_simplex_from<F>(obj: &ObjectiveSpec<F>, start: Vec<f64>, budget: usize) -> OptimizerTrace
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let dim = obj.dim();
    let mut rec = TraceRecorder::new(dim);
    let mut x0 = start;
    obj.clamp(&mut x0);

    let eval = |rec: &mut TraceRecorder, x: &[f64]| -> f64 {
        let c = obj.evaluate(x);
        rec.observe(std::slice::from_ref(&x.to_vec()), &[c]);
        c
    };

    let f0 = eval(&mut rec, &x0);
    let mut simplex: Vec<(Vec<f64>, f64)> = vec![(x0.clone(), f0)];
    for d in 0..dim {
        if rec.evaluations() >= budget {
            rec.end_iteration();
            return rec.finish();
        }
        let (lo, hi) = obj.bounds()[d];
        let step = INITIAL_STEP * (hi - lo);
        let mut v = x0.clone();
        v[d] = if v[d] + step <= hi { v[d] + step } else { v[d] - step };
        let f = eval(&mut rec, &v);
        simplex.push((v, f));
    }
    rec.end_iteration();

    let combine = |a: &[f64], b: &[f64], t: f64| -> Vec<f64> {
        // a + t·(b - a), clamped
        let mut p: Vec<f64> = a.iter().zip(b).map(|(x, y)| x + t * (y - x)).collect();
        obj.clamp(&mut p);
        p
    };

    while rec.evaluations() < budget {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let best = &simplex[0].0;
        let diameter = simplex[1..]
            .iter()
            .flat_map(|(v, _)| v.iter().zip(best).map(|(a, b)| (a - b).abs()))
            .fold(0.0, f64::max);
        if diameter < DIAMETER_TOL {
            break;
        }

        let worst = dim;
        let f_best = simplex[0].1;
        let f_second = simplex[worst - 1].1;
        let f_worst = simplex[worst].1;
        let centroid: Vec<f64> = (0..dim)
            .map(|d| simplex[..worst].iter().map(|(v, _)| v[d]).sum::<f64>() / dim as f64)
            .collect();

        let xr = combine(&centroid, &simplex[worst].0, -1.0);
        let fr = eval(&mut rec, &xr);

        if fr < f_best {
            if rec.evaluations() < budget {
                let xe = combine(&centroid, &simplex[worst].0, -2.0);
                let fe = eval(&mut rec, &xe);
                simplex[worst] = if fe < fr { (xe, fe) } else { (xr, fr) };
            } else {
                simplex[worst] = (xr, fr);
            }
        } else if fr < f_second {
            simplex[worst] = (xr, fr);
        } else {
            if rec.evaluations() >= budget {
                rec.end_iteration();
                break;
            }
            let outside = fr < f_worst;
            let xc = if outside {
                combine(&centroid, &xr, 0.5)
            } else {
                combine(&centroid, &simplex[worst].0, 0.5)
            };
            let fc = eval(&mut rec, &xc);
            let accept = if outside { fc <= fr } else { fc < f_worst };
            if accept {
                simplex[worst] = (xc, fc);
            } else {
                let anchor = simplex[0].0.clone();
                for vertex in simplex.iter_mut().skip(1) {
                    if rec.evaluations() >= budget {
                        break;
                    }
                    let p = combine(&anchor, &vertex.0, 0.5);
                    let f = eval(&mut rec, &p);
                    *vertex = (p, f);
                }
            }
        }
        rec.end_iteration();
    }
    rec.finish()
}
