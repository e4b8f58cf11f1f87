//! Derivative-free maximization over small parameter vectors.
//!
//! Random-direction hill climbing with an adaptive step: a Gaussian direction
//! is tried forwards and backwards, successful moves grow the step, and a run
//! of failures halves it. Restarts are independent and run in parallel; the
//! merge is deterministic (highest value, lowest restart index on ties).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::gates::{unitary_from, UnitaryParam};
use crate::numkit::ComplexMatrix;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchConfig {
    pub restarts: usize,
    pub seed: u64,
    /// Objective evaluations allowed per restart.
    pub max_evals: usize,
    pub initial_step: f64,
    /// A restart stops once its step falls below this.
    pub min_step: f64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            restarts: 16,
            seed: 0,
            max_evals: 3000,
            initial_step: 0.5,
            min_step: 1e-7,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchOutcome {
    pub value: f64,
    pub params: Vec<f64>,
    pub evaluations: usize,
}

/// A single restart: the best value after every accepted move is recorded in
/// `history`, which is therefore non-decreasing.
#[derive(Debug, Clone)]
pub struct ClimbTrace {
    pub value: f64,
    pub params: Vec<f64>,
    pub evaluations: usize,
    pub history: Vec<f64>,
}

pub fn hill_climb<F, R>(objective: &F, start: Vec<f64>, rng: &mut R, cfg: &SearchConfig) -> ClimbTrace
where
    F: Fn(&[f64]) -> f64 + ?Sized,
    R: Rng + ?Sized,
{
    let n = start.len();
    let mut x = start;
    let mut best = objective(&x);
    let mut evaluations = 1;
    let mut history = vec![best];
    if n == 0 {
        return ClimbTrace {
            value: best,
            params: x,
            evaluations,
            history,
        };
    }
    let mut step = cfg.initial_step;
    let mut failures = 0;
    let patience = n.clamp(4, 16);
    let mut trial = vec![0.0; n];

    'outer: while evaluations < cfg.max_evals && step > cfg.min_step {
        let mut dir: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        let norm = dir.iter().map(|d| d * d).sum::<f64>().sqrt();
        if norm == 0.0 {
            continue;
        }
        dir.iter_mut().for_each(|d| *d /= norm);
        for sign in [1.0, -1.0] {
            for k in 0..n {
                trial[k] = x[k] + sign * step * dir[k];
            }
            let value = objective(&trial);
            evaluations += 1;
            if value > best {
                best = value;
                x.copy_from_slice(&trial);
                history.push(best);
                step = (step * 1.5).min(4.0);
                failures = 0;
                continue 'outer;
            }
            if evaluations >= cfg.max_evals {
                break 'outer;
            }
        }
        failures += 1;
        if failures >= patience {
            step *= 0.5;
            failures = 0;
        }
    }
    ClimbTrace {
        value: best,
        params: x,
        evaluations,
        history,
    }
}

/// Maximizes `objective` over `R^n`.
///
/// Restart `r` starts from `starts[r]` when given, otherwise from a uniform
/// point in `[-π, π]^n`. At least `cfg.restarts` restarts run, more when
/// extra starting points are supplied.
pub fn maximize<F>(objective: &F, n: usize, starts: &[Vec<f64>], cfg: &SearchConfig) -> SearchOutcome
where
    F: Fn(&[f64]) -> f64 + Sync + ?Sized,
{
    let total = cfg.restarts.max(starts.len()).max(1);
    let runs: Vec<ClimbTrace> = (0..total)
        .into_par_iter()
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(r as u64 + 1);
            let start = match starts.get(r) {
                Some(s) => {
                    assert_eq!(s.len(), n, "starting point has the wrong length");
                    s.clone()
                }
                None => (0..n)
                    .map(|_| rng.random_range(-std::f64::consts::PI..std::f64::consts::PI))
                    .collect(),
            };
            hill_climb(objective, start, &mut rng, cfg)
        })
        .collect();
    let evaluations = runs.iter().map(|r| r.evaluations).sum();
    let best = runs
        .into_iter()
        .reduce(|a, b| if b.value > a.value { b } else { a })
        .expect("at least one restart");
    SearchOutcome {
        value: best.value,
        params: best.params,
        evaluations,
    }
}

/// Maximizes a function of a `dim × dim` unitary over U(dim).
///
/// The first restart starts at the identity.
pub fn optimize_unitary<F>(objective: F, dim: usize, restarts: usize, seed: u64) -> (f64, UnitaryParam)
where
    F: Fn(&ComplexMatrix) -> f64 + Sync,
{
    let cfg = SearchConfig {
        restarts,
        seed,
        ..SearchConfig::default()
    };
    let f = |p: &[f64]| objective(&unitary_from(dim, p));
    let out = maximize(&f, dim * dim, &[vec![0.0; dim * dim]], &cfg);
    (out.value, UnitaryParam::new(dim, out.params).expect("chart length"))
}
