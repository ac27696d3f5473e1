//! Simple random sampling without replacement: seeded draws, per-sample
//! statistics, exhaustive enumeration of all `C(N, n)` subsets, and the
//! exact design-based MSE oracle built on that enumeration.

use alloc::vec::Vec;

use itertools::Itertools;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::estimators::{evaluate, EstimatorSpec};
use crate::math::{binomial, PairwiseAccumulator};
use crate::population::{BivariatePopulation, PopulationParams};

/// Default cap on `C(N, n)` for exhaustive enumeration; keeps the exact
/// oracle desk-scale. Override with the `_capped` entry points.
pub const DEFAULT_ENUM_CAP: u64 = 10_000_000;

fn check_design(n: usize, population_size: usize) -> Result<()> {
    if n < 2 || n > population_size {
        return Err(Error::InvalidDesign { n, population_size });
    }
    Ok(())
}

/// An SRSWOR sample: the selected unit indices (strictly increasing, so a
/// subset has one canonical representation) together with the selected
/// `(y, x)` pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    indices: Vec<usize>,
    y: Vec<f64>,
    x: Vec<f64>,
}

impl Sample {
    /// Builds a sample from explicit unit indices. Indices are sorted;
    /// duplicates and out-of-range indices are rejected.
    pub fn from_indices(pop: &BivariatePopulation, mut indices: Vec<usize>) -> Result<Self> {
        check_design(indices.len(), pop.size())?;
        indices.sort_unstable();
        if indices.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidSpec("duplicate sample index".into()));
        }
        if *indices.last().expect("n >= 2") >= pop.size() {
            return Err(Error::InvalidSpec("sample index out of range".into()));
        }
        let y = indices.iter().map(|&i| pop.y()[i]).collect();
        let x = indices.iter().map(|&i| pop.x()[i]).collect();
        Ok(Sample { indices, y, x })
    }

    pub fn n(&self) -> usize {
        self.indices.len()
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn stats(&self, params: Option<&PopulationParams>) -> SampleStats {
        sample_stats(self, params)
    }
}

/// Per-sample summary statistics. The sample variances use divisor
/// `n − 1`; the relative errors `e0 = s_y²/S_y² − 1`, `e1 = s_x²/S_x² − 1`
/// are filled in only when population parameters are supplied.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleStats {
    pub n: usize,
    pub ybar: f64,
    pub xbar: f64,
    pub sy2: f64,
    pub sx2: f64,
    pub e0: Option<f64>,
    pub e1: Option<f64>,
}

/// Computes sample means and variances (two passes), plus the relative
/// errors when `params` is given.
pub fn sample_stats(sample: &Sample, params: Option<&PopulationParams>) -> SampleStats {
    let n = sample.n() as f64;
    let ybar = sample.y.iter().sum::<f64>() / n;
    let xbar = sample.x.iter().sum::<f64>() / n;
    let sy2 = sample
        .y
        .iter()
        .map(|&v| (v - ybar) * (v - ybar))
        .sum::<f64>()
        / (n - 1.0);
    let sx2 = sample
        .x
        .iter()
        .map(|&v| (v - xbar) * (v - xbar))
        .sum::<f64>()
        / (n - 1.0);
    SampleStats {
        n: sample.n(),
        ybar,
        xbar,
        sy2,
        sx2,
        e0: params.map(|p| sy2 / p.sy2 - 1.0),
        e1: params.map(|p| sx2 / p.sx2 - 1.0),
    }
}

/// Draws one SRSWOR sample of size `n` from a seeded stream. Identical
/// `(pop, n, seed)` produce identical samples on every platform.
pub fn draw_srswor(pop: &BivariatePopulation, n: usize, seed: u64) -> Result<Sample> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    draw_srswor_with_rng(pop, n, &mut rng)
}

/// Draws one SRSWOR sample using a caller-supplied generator (the
/// replicated-simulation path derives one stream per replicate).
///
/// Selection is a partial Fisher–Yates pass over the index space, so each
/// of the `C(N, n)` subsets is equally likely; indices are sorted
/// afterwards to make the `Sample` canonical.
pub fn draw_srswor_with_rng<R: Rng + ?Sized>(
    pop: &BivariatePopulation,
    n: usize,
    rng: &mut R,
) -> Result<Sample> {
    check_design(n, pop.size())?;
    let size = pop.size();
    let mut idx: Vec<usize> = (0..size).collect();
    for i in 0..n {
        let j = rng.random_range(i..size);
        idx.swap(i, j);
    }
    idx.truncate(n);
    idx.sort_unstable();
    let y = idx.iter().map(|&i| pop.y()[i]).collect();
    let x = idx.iter().map(|&i| pop.x()[i]).collect();
    Ok(Sample { indices: idx, y, x })
}

/// Number of distinct samples of size `n`, saturating at `u128::MAX`.
pub fn subset_count(population_size: usize, n: usize) -> u128 {
    binomial(population_size, n)
}

/// Enumerates every `n`-subset exactly once, in lexicographic index
/// order, under the default cap.
pub fn enumerate_samples<'a>(
    pop: &'a BivariatePopulation,
    n: usize,
) -> Result<impl Iterator<Item = Sample> + 'a> {
    enumerate_samples_capped(pop, n, DEFAULT_ENUM_CAP)
}

/// Enumerates every `n`-subset under an explicit cap on `C(N, n)`.
pub fn enumerate_samples_capped<'a>(
    pop: &'a BivariatePopulation,
    n: usize,
    cap: u64,
) -> Result<impl Iterator<Item = Sample> + 'a> {
    check_design(n, pop.size())?;
    let combinations = subset_count(pop.size(), n);
    if combinations > cap as u128 {
        return Err(Error::TooManyCombinations {
            population_size: pop.size(),
            n,
            combinations,
            cap,
        });
    }
    Ok((0..pop.size()).combinations(n).map(move |indices| {
        let y = indices.iter().map(|&i| pop.y()[i]).collect();
        let x = indices.iter().map(|&i| pop.x()[i]).collect();
        Sample { indices, y, x }
    }))
}

/// Exact design-based MSE of an estimator over the full enumeration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExactMse {
    /// `(1/C') Σ (estimate − S_y²)²` over the `C'` evaluable samples.
    pub mse: f64,
    pub samples_used: u64,
    /// Samples on which the estimator was undefined. Nonzero only when
    /// the caller opted into `allow_partial`.
    pub rejected: u64,
}

/// Computes the exact MSE of `spec` against `S_y²` by total enumeration,
/// under the default cap. Samples on which the estimator is undefined
/// abort the computation unless `allow_partial` is set, in which case
/// they are counted and excluded.
pub fn exact_mse(
    pop: &BivariatePopulation,
    n: usize,
    spec: &EstimatorSpec,
    allow_partial: bool,
) -> Result<ExactMse> {
    exact_mse_capped(pop, n, spec, allow_partial, DEFAULT_ENUM_CAP)
}

/// [`exact_mse`] with an explicit enumeration cap.
pub fn exact_mse_capped(
    pop: &BivariatePopulation,
    n: usize,
    spec: &EstimatorSpec,
    allow_partial: bool,
    cap: u64,
) -> Result<ExactMse> {
    spec.validate()?;
    let params = pop.derive_params()?;
    let target = params.sy2;
    let mut acc = PairwiseAccumulator::new();
    let mut used: u64 = 0;
    let mut rejected: u64 = 0;
    for sample in enumerate_samples_capped(pop, n, cap)? {
        let stats = sample_stats(&sample, Some(&params));
        match evaluate(spec, &stats, &params) {
            Ok(est) => {
                let err = est - target;
                acc.push(err * err);
                used += 1;
            }
            Err(e) if allow_partial && e.is_sample_driven() => rejected += 1,
            Err(e) => return Err(e),
        }
    }
    if used == 0 {
        return Err(Error::DegenerateSample(
            "estimator undefined on every sample",
        ));
    }
    Ok(ExactMse {
        mse: acc.sum() / used as f64,
        samples_used: used,
        rejected,
    })
}
