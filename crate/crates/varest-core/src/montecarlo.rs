//! Replicated SRSWOR simulation with deterministic, order-independent
//! seeding: the generator for replicate `r` is a pure function of
//! `(seed, r)`, and all reductions run in replicate order with pairwise
//! summation, so results are bit-identical no matter how the replicate
//! loop is scheduled. The `varest` companion crate drives
//! [`replicate_estimates`] from a thread pool and feeds the rows back
//! through [`reduce`].

use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::estimators::{evaluate, EstimatorSpec};
use crate::math::{pairwise_sum, sqrt};
use crate::mse::{self, MseFormulaVariant};
use crate::population::{theta, BivariatePopulation, PopulationParams};
use crate::sampling::{draw_srswor_with_rng, sample_stats};

/// Configuration of one simulation run.
#[derive(Debug, Clone)]
pub struct SimulationConfig {
    pub replicates: u64,
    pub n: usize,
    pub seed: u64,
    pub specs: Vec<EstimatorSpec>,
    /// Skip-and-count replicates on which an estimator is undefined
    /// instead of aborting the run.
    pub allow_partial: bool,
}

/// Empirical moments of one estimator over the used replicates.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulationResult {
    pub spec: EstimatorSpec,
    /// `(1/R') Σ (estimate_r − S_y²)²`.
    pub empirical_mse: f64,
    /// `(1/R') Σ (estimate_r − S_y²)`.
    pub empirical_bias: f64,
    /// Standard error of the MSE estimate, from the sample variance of
    /// the replicate-level squared errors.
    pub mc_stderr: f64,
    pub rejected_samples: u64,
    pub replicates_used: u64,
}

/// The generator for one replicate: same seed for every replicate, one
/// ChaCha stream per replicate index.
pub fn replicate_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Draws the sample for replicate `index` and evaluates every spec on
/// it. Pure in `(pop, params, specs, seed, index)`.
pub fn replicate_estimates(
    pop: &BivariatePopulation,
    params: &PopulationParams,
    specs: &[EstimatorSpec],
    n: usize,
    seed: u64,
    index: u64,
) -> Result<Vec<Result<f64>>> {
    let mut rng = replicate_rng(seed, index);
    let sample = draw_srswor_with_rng(pop, n, &mut rng)?;
    let stats = sample_stats(&sample, Some(params));
    Ok(specs
        .iter()
        .map(|spec| evaluate(spec, &stats, params))
        .collect())
}

/// Folds per-replicate estimate rows (in replicate order) into one
/// [`SimulationResult`] per spec. Estimator failures caused by the drawn
/// sample are counted when `allow_partial` is set and abort the run
/// otherwise; failures caused by the spec itself always abort.
pub fn reduce(
    specs: &[EstimatorSpec],
    params: &PopulationParams,
    rows: &[Vec<Result<f64>>],
    allow_partial: bool,
) -> Result<Vec<SimulationResult>> {
    let target = params.sy2;
    let mut out = Vec::with_capacity(specs.len());
    for (j, spec) in specs.iter().enumerate() {
        let mut errors: Vec<f64> = Vec::with_capacity(rows.len());
        let mut rejected: u64 = 0;
        for row in rows {
            match &row[j] {
                Ok(est) => errors.push(est - target),
                Err(e) if allow_partial && e.is_sample_driven() => rejected += 1,
                Err(e) => return Err(e.clone()),
            }
        }
        if errors.is_empty() {
            return Err(Error::DegenerateSample(
                "estimator undefined on every replicate",
            ));
        }
        let used = errors.len() as u64;
        let sq: Vec<f64> = errors.iter().map(|e| e * e).collect();
        let mse = pairwise_sum(&sq) / used as f64;
        let bias = pairwise_sum(&errors) / used as f64;
        let stderr = if used > 1 {
            let dev: Vec<f64> = sq.iter().map(|&s| (s - mse) * (s - mse)).collect();
            sqrt(pairwise_sum(&dev) / (used as f64 * (used as f64 - 1.0)))
        } else {
            0.0
        };
        out.push(SimulationResult {
            spec: spec.clone(),
            empirical_mse: mse,
            empirical_bias: bias,
            mc_stderr: stderr,
            rejected_samples: rejected,
            replicates_used: used,
        });
    }
    Ok(out)
}

/// Runs the simulation on the current thread. The parallel driver in the
/// companion crate produces bit-identical results.
pub fn run(
    pop: &BivariatePopulation,
    params: &PopulationParams,
    cfg: &SimulationConfig,
) -> Result<Vec<SimulationResult>> {
    for spec in &cfg.specs {
        spec.validate()?;
    }
    theta(cfg.n, pop.size())?; // validates the design
    let rows: Vec<Vec<Result<f64>>> = (0..cfg.replicates)
        .map(|r| replicate_estimates(pop, params, &cfg.specs, cfg.n, cfg.seed, r))
        .collect::<Result<_>>()?;
    reduce(&cfg.specs, params, &rows, cfg.allow_partial)
}

/// Empirical MSE joined with its first-order theoretical value.
#[derive(Debug, Clone, PartialEq)]
pub struct TheoryComparison {
    pub result: SimulationResult,
    pub theoretical: f64,
    /// `empirical_mse / theoretical`; near 1 in the asymptotic regime.
    pub ratio: f64,
    /// The first-order value itself was negative.
    pub theory_breakdown: bool,
    /// The design sits outside the regime where the first-order
    /// approximation can be trusted; see [`small_sample_warning`].
    pub small_sample_warning: bool,
}

/// Flags designs where first-order theory is not trustworthy: either the
/// moment scale `θ·max(β*₂y, β*₂x)` exceeds 1/2, or the design factor
/// itself is large (`θ > 0.1`, i.e. effective sample sizes below ten),
/// where the dropped higher-order terms are sizable regardless of the
/// moments.
pub fn small_sample_warning(params: &PopulationParams, theta: f64) -> bool {
    theta * params.beta2y_star().max(params.beta2x_star()) > 0.5 || theta > 0.1
}

/// Pairs already-computed simulation results with the first-order
/// theoretical MSE of each spec.
pub fn join_theory(
    results: Vec<SimulationResult>,
    params: &PopulationParams,
    theta: f64,
    variant: MseFormulaVariant,
) -> Result<Vec<TheoryComparison>> {
    let warn = small_sample_warning(params, theta);
    results
        .into_iter()
        .map(|result| {
            let t = mse::theoretical(&result.spec, params, theta, variant)?;
            Ok(TheoryComparison {
                ratio: result.empirical_mse / t.mse,
                result,
                theoretical: t.mse,
                theory_breakdown: t.breakdown,
                small_sample_warning: warn,
            })
        })
        .collect()
}

/// Runs the simulation and pairs each empirical MSE with the first-order
/// theoretical MSE of its spec.
pub fn validate_theory(
    pop: &BivariatePopulation,
    params: &PopulationParams,
    cfg: &SimulationConfig,
    variant: MseFormulaVariant,
) -> Result<Vec<TheoryComparison>> {
    let th = theta(cfg.n, pop.size())?;
    let results = run(pop, params, cfg)?;
    join_theory(results, params, th, variant)
}
