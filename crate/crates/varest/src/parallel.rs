//! Replicate-parallel simulation driver. Each replicate's estimates are
//! a pure function of `(seed, replicate index)` and the reduction runs in
//! replicate order, so the results are bit-identical to the sequential
//! runner for any worker count.

use rayon::prelude::*;

use varest_core::montecarlo::{self, SimulationConfig, SimulationResult, TheoryComparison};
use varest_core::{theta, BivariatePopulation, MseFormulaVariant, PopulationParams};

use crate::{Error, Result};

/// Runs the simulation across `workers` threads (the global pool when
/// `None`).
pub fn run_parallel(
    pop: &BivariatePopulation,
    params: &PopulationParams,
    cfg: &SimulationConfig,
    workers: Option<usize>,
) -> Result<Vec<SimulationResult>> {
    for spec in &cfg.specs {
        spec.validate().map_err(Error::Core)?;
    }
    theta(cfg.n, pop.size()).map_err(Error::Core)?;

    let body = || -> Result<Vec<SimulationResult>> {
        let rows: Vec<Vec<varest_core::Result<f64>>> = (0..cfg.replicates)
            .into_par_iter()
            .map(|r| {
                montecarlo::replicate_estimates(pop, params, &cfg.specs, cfg.n, cfg.seed, r)
            })
            .collect::<varest_core::Result<_>>()
            .map_err(Error::Core)?;
        montecarlo::reduce(&cfg.specs, params, &rows, cfg.allow_partial).map_err(Error::Core)
    };

    match workers {
        Some(w) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(w)
                .build()
                .map_err(|e| Error::Usage(format!("cannot build a {w}-thread pool: {e}")))?;
            pool.install(body)
        }
        None => body(),
    }
}

/// [`run_parallel`] joined with the first-order theory for each spec.
pub fn validate_theory_parallel(
    pop: &BivariatePopulation,
    params: &PopulationParams,
    cfg: &SimulationConfig,
    variant: MseFormulaVariant,
    workers: Option<usize>,
) -> Result<Vec<TheoryComparison>> {
    let th = theta(cfg.n, pop.size()).map_err(Error::Core)?;
    let results = run_parallel(pop, params, cfg, workers)?;
    montecarlo::join_theory(results, params, th, variant).map_err(Error::Core)
}
