//! Parallel evaluation of sweep grids.

use rayon::prelude::*;
use refrig_imc_core::{SweepGrid, SweepProblem, SweepSurface};

use crate::error::{CliError, CliResult};

/// Caps the number of sweep worker threads when set to a positive integer.
pub const THREADS_ENV: &str = "REFRIG_IMC_THREADS";

/// Worker cap from the environment; unset means one per core.
pub fn thread_cap() -> CliResult<Option<usize>> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(CliError::Invalid(format!(
                "{THREADS_ENV} must be a positive integer, got {v:?}"
            ))),
        },
    }
}

/// Evaluates every grid point on a pool of `threads` workers (all cores when
/// `None`). Results come back in grid order, so the surface does not depend
/// on the worker count.
pub fn run_sweep_parallel(
    problem: &SweepProblem,
    grid: &SweepGrid,
    threads: Option<usize>,
) -> CliResult<SweepSurface> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| CliError::Invalid(format!("thread pool: {e}")))?;
    let coords: Vec<(f64, f64)> = grid.points().collect();
    let points = pool.install(|| {
        coords
            .par_iter()
            .map(|&(a, b)| problem.evaluate(a, b))
            .collect::<Result<Vec<_>, _>>()
    })?;
    Ok(SweepSurface::assemble(grid.clone(), points)?)
}
