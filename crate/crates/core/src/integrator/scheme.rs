use rayon::prelude::*;

use crate::error::{MtemError, Result};
use crate::integrator::{BrownianSource, PathRecord, SimulationGrid};
use crate::linalg::{all_finite, guarded_floor, norm};
use crate::model::{DelayFunction, SddeProblem};
use crate::truncation::{TruncatedCoefficients, TruncationPolicy};

/// States above this norm count as an explosion.
pub const OVERFLOW_THRESHOLD: f64 = 1e150;
const LAG_GUARD: f64 = 1e-9;

/// `⌊δ(kΔ)/Δ⌋`, clamped so the delayed index `k - lag` never precedes `-m`.
pub fn delay_lag(k: usize, grid: &SimulationGrid, delay: &DelayFunction) -> Result<i64> {
    let value = delay.eval(grid.time(k as i64));
    if !(value >= 0.0) {
        return Err(MtemError::NegativeDelay { k, value });
    }
    let lag = guarded_floor(value / grid.dt, LAG_GUARD);
    Ok(lag.min(k as i64 + grid.m as i64))
}

/// One step `X_{k+1} = X_k + f_Δ(X_k, X_{k-lag}, t_k) Δ + g_Δ(X_k, X_{k-lag}, t_k) ΔB_k`.
/// `step` only labels the overflow error.
pub fn mtem_step(
    step: usize,
    x_k: &[f64],
    x_delayed: &[f64],
    t_k: f64,
    dt: f64,
    tc: &TruncatedCoefficients,
    dw: &[f64],
) -> Result<Vec<f64>> {
    let (f, g) = tc.evaluate(x_k, x_delayed, t_k)?;
    let mut next: Vec<f64> = x_k.iter().zip(&f).map(|(x, fx)| x + fx * dt).collect();
    g.mul_vec_add(dw, &mut next);
    if !all_finite(&next) || norm(&next) > OVERFLOW_THRESHOLD {
        return Err(MtemError::StateOverflow { step });
    }
    Ok(next)
}

fn check_inputs(
    problem: &SddeProblem,
    policy: &TruncationPolicy,
    grid: &SimulationGrid,
) -> Result<TruncatedCoefficients> {
    let tau = problem.tau();
    if (grid.tau() - tau).abs() > 1e-9 * tau.max(grid.dt) {
        return Err(MtemError::InvalidArgument(format!(
            "grid history m * dt = {} does not match tau = {tau}",
            grid.tau()
        )));
    }
    policy.truncate(problem.coefficients(), grid.dt)
}

/// Simulates one MTEM trajectory with increments from `(source, path_index)`.
pub fn simulate_path(
    problem: &SddeProblem,
    policy: &TruncationPolicy,
    grid: &SimulationGrid,
    source: &BrownianSource,
    path_index: u64,
) -> Result<PathRecord> {
    let tc = check_inputs(problem, policy, grid)?;
    if source.dim() != problem.coefficients().noise_dim() {
        return Err(MtemError::InvalidArgument(format!(
            "brownian dimension {} does not match noise dimension {}",
            source.dim(),
            problem.coefficients().noise_dim()
        )));
    }
    run_path(problem, &tc, grid, source, path_index)
}

fn run_path(
    problem: &SddeProblem,
    tc: &TruncatedCoefficients,
    grid: &SimulationGrid,
    source: &BrownianSource,
    path_index: u64,
) -> Result<PathRecord> {
    let n = problem.coefficients().dim();
    let m = grid.m;
    let mut states = Vec::with_capacity(grid.len() * n);
    for j in 0..=m {
        let k = j as i64 - m as i64;
        let xi = problem.history().eval(grid.time(k));
        if xi.len() != n || !all_finite(&xi) {
            return Err(MtemError::NonFiniteState);
        }
        states.extend_from_slice(&xi);
    }

    let mut stream = source.stream(path_index, grid.dt);
    let mut dw = vec![0.0; source.dim()];
    for k in 0..grid.n_steps {
        let lag = delay_lag(k, grid, problem.delay())?;
        let cur = (k + m) * n;
        let del = (k as i64 - lag + m as i64) as usize * n;
        stream.fill(&mut dw);
        let next = mtem_step(
            k + 1,
            &states[cur..cur + n],
            &states[del..del + n],
            grid.time(k as i64),
            grid.dt,
            tc,
            &dw,
        )?;
        states.extend_from_slice(&next);
    }
    Ok(PathRecord::new(
        *grid,
        n,
        source.master_seed(),
        path_index,
        tc.level(),
        states,
    ))
}

/// Paths `0..n_paths` on the global rayon pool.
pub fn simulate_ensemble(
    problem: &SddeProblem,
    policy: &TruncationPolicy,
    grid: &SimulationGrid,
    master_seed: u64,
    n_paths: usize,
) -> Result<Vec<PathRecord>> {
    ensemble_inner(problem, policy, grid, master_seed, n_paths)
}

/// Same as [`simulate_ensemble`] on a dedicated pool of `workers` threads.
/// The output does not depend on `workers`.
pub fn simulate_ensemble_with_workers(
    problem: &SddeProblem,
    policy: &TruncationPolicy,
    grid: &SimulationGrid,
    master_seed: u64,
    n_paths: usize,
    workers: usize,
) -> Result<Vec<PathRecord>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| MtemError::InvalidArgument(format!("thread pool: {e}")))?;
    pool.install(|| ensemble_inner(problem, policy, grid, master_seed, n_paths))
}

fn ensemble_inner(
    problem: &SddeProblem,
    policy: &TruncationPolicy,
    grid: &SimulationGrid,
    master_seed: u64,
    n_paths: usize,
) -> Result<Vec<PathRecord>> {
    if n_paths == 0 {
        return Err(MtemError::InvalidArgument("n_paths must be >= 1".into()));
    }
    let tc = check_inputs(problem, policy, grid)?;
    let source = BrownianSource::new(master_seed, problem.coefficients().noise_dim());
    let results: Vec<Result<PathRecord>> = (0..n_paths as u64)
        .into_par_iter()
        .map(|i| run_path(problem, &tc, grid, &source, i))
        .collect();

    let mut paths = Vec::with_capacity(n_paths);
    let mut failures = Vec::new();
    for (i, r) in results.into_iter().enumerate() {
        match r {
            Ok(p) => paths.push(p),
            Err(MtemError::StateOverflow { step }) => failures.push((i as u64, step)),
            Err(e) => return Err(e),
        }
    }
    if failures.is_empty() {
        Ok(paths)
    } else {
        Err(MtemError::EnsembleOverflow { failures })
    }
}
