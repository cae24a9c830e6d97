//! Multi-threaded counterexample search.
//!
//! Work units come from the core crate (line-sweep prefixes, random trial
//! indices) and are searched with rayon's `find_map_first`, so the reported
//! violation is the one a sequential scan would find first.

use rayon::prelude::*;

use rankineq_core::expr::{LineSearch, RandomSearch, RankExpression, SearchStrategy, Violation};
use rankineq_core::{Error as CoreError, PrimeField};

use crate::{Error, Result};

/// Environment variable overriding the worker count.
pub const WORKERS_ENV: &str = "RANKINEQ_WORKERS";

/// Worker count from [`WORKERS_ENV`], or `None` for rayon's default (the
/// available parallelism).
pub fn configured_workers() -> Result<Option<usize>> {
    match std::env::var(WORKERS_ENV) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(Error::Usage(format!(
                "{WORKERS_ENV} must be a positive integer, got `{v}`"
            ))),
        },
        Err(_) => Ok(None),
    }
}

fn pool(workers: Option<usize>) -> Result<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = workers {
        builder = builder.num_threads(n);
    }
    builder
        .build()
        .map_err(|e| Error::Usage(format!("cannot start worker pool: {e}")))
}

/// Parallel counterpart of [`rankineq_core::expr::search_violation`]; returns
/// the same violation.
pub fn search_violation(
    expr: &RankExpression,
    field: PrimeField,
    ambient_dim: usize,
    strategy: SearchStrategy,
    workers: Option<usize>,
) -> Result<Option<Violation>> {
    let pool = pool(workers)?;
    let found = match strategy {
        SearchStrategy::ExhaustiveLines => {
            let search = LineSearch::new(expr, field, ambient_dim)?;
            // Deeper splits than the sequential default keep all workers busy.
            let depth = (search.default_split_depth() + 1).min(search.variable_count());
            let prefixes = search.prefixes(depth);
            pool.install(|| {
                prefixes
                    .par_iter()
                    .find_map_first(|p| search.search_from(p).transpose())
            })
        }
        SearchStrategy::Random { seed, trials, max_dim } => {
            let search = RandomSearch::new(expr, field, ambient_dim, seed, max_dim)?;
            if trials == 0 {
                return Err(CoreError::Budget("random search needs at least one trial".to_string()).into());
            }
            pool.install(|| {
                (0..trials)
                    .into_par_iter()
                    .find_map_first(|i| search.trial(i).transpose())
            })
        }
    };
    Ok(found.transpose()?)
}
