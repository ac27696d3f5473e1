//! Finite bivariate populations and their moment parameters.
//!
//! Two variance conventions coexist, matching standard survey-sampling
//! usage: the population variances `S_y²`, `S_x²` use divisor `N − 1`,
//! while the central product-moments `μ_pq` use divisor `N`. The kurtosis
//! ratios and the standardized cross-moment are built from the `μ_pq`:
//!
//! - `β₂y = μ₄₀ / μ₂₀²`, `β₂x = μ₀₄ / μ₀₂²`
//! - `λ₂₂ = μ₂₂ / (μ₂₀ · μ₀₂)`
//!
//! and the MSE theory works with their excess forms `β* = β₂ − 1`,
//! `λ* = λ₂₂ − 1`.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math::{pairwise_sum, powu, sqrt, PairwiseAccumulator};

/// The design factor `θ = 1/n − 1/N` scaling every first-order variance.
pub fn theta(n: usize, population_size: usize) -> Result<f64> {
    if n < 2 || n > population_size {
        return Err(Error::InvalidDesign { n, population_size });
    }
    Ok(1.0 / n as f64 - 1.0 / population_size as f64)
}

/// A finite population of paired `(y, x)` observations: `y` is the study
/// variable whose variance is the estimation target, `x` the auxiliary
/// variable whose population parameters are assumed known.
#[derive(Debug, Clone, PartialEq)]
pub struct BivariatePopulation {
    y: Vec<f64>,
    x: Vec<f64>,
}

impl BivariatePopulation {
    /// Builds a population, rejecting anything the estimators cannot work
    /// with: fewer than two units, non-finite values, or zero variance in
    /// either variable.
    pub fn new(y: Vec<f64>, x: Vec<f64>) -> Result<Self> {
        if y.len() != x.len() {
            return Err(Error::DegeneratePopulation(
                "y and x must have the same length",
            ));
        }
        if y.len() < 2 {
            return Err(Error::DegeneratePopulation("fewer than two units"));
        }
        if y.iter().chain(x.iter()).any(|v| !v.is_finite()) {
            return Err(Error::DegeneratePopulation("non-finite value"));
        }
        let pop = BivariatePopulation { y, x };
        if pop.central_moment(2, 0) <= 0.0 {
            return Err(Error::DegeneratePopulation("zero variance in y"));
        }
        if pop.central_moment(0, 2) <= 0.0 {
            return Err(Error::DegeneratePopulation("zero variance in x"));
        }
        Ok(pop)
    }

    pub fn size(&self) -> usize {
        self.y.len()
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn ybar(&self) -> f64 {
        pairwise_sum(&self.y) / self.size() as f64
    }

    pub fn xbar(&self) -> f64 {
        pairwise_sum(&self.x) / self.size() as f64
    }

    /// Central product-moment `μ_pq = (1/N) Σ (y_i − Ȳ)^p (x_i − X̄)^q`,
    /// computed in two passes (mean first, then centered powers) so that
    /// large-magnitude data does not cancel catastrophically.
    pub fn central_moment(&self, p: u32, q: u32) -> f64 {
        let ybar = self.ybar();
        let xbar = self.xbar();
        let mut acc = PairwiseAccumulator::new();
        for (&yi, &xi) in self.y.iter().zip(&self.x) {
            acc.push(powu(yi - ybar, p) * powu(xi - xbar, q));
        }
        acc.sum() / self.size() as f64
    }

    /// Computes every population parameter used by the MSE theory from
    /// the moment definitions.
    pub fn derive_params(&self) -> Result<PopulationParams> {
        let n = self.size() as f64;
        let ybar = self.ybar();
        let xbar = self.xbar();

        let mut accs: [PairwiseAccumulator; 6] = [
            PairwiseAccumulator::new(), // mu20
            PairwiseAccumulator::new(), // mu02
            PairwiseAccumulator::new(), // mu11
            PairwiseAccumulator::new(), // mu40
            PairwiseAccumulator::new(), // mu04
            PairwiseAccumulator::new(), // mu22
        ];
        for (&yi, &xi) in self.y.iter().zip(&self.x) {
            let dy = yi - ybar;
            let dx = xi - xbar;
            let dy2 = dy * dy;
            let dx2 = dx * dx;
            accs[0].push(dy2);
            accs[1].push(dx2);
            accs[2].push(dy * dx);
            accs[3].push(dy2 * dy2);
            accs[4].push(dx2 * dx2);
            accs[5].push(dy2 * dx2);
        }
        let [mu20, mu02, mu11, mu40, mu04, mu22] =
            accs.map(|a| a.sum() / n);

        if mu20 <= 0.0 {
            return Err(Error::DegeneratePopulation("zero variance in y"));
        }
        if mu02 <= 0.0 {
            return Err(Error::DegeneratePopulation("zero variance in x"));
        }
        if ybar <= 0.0 || xbar <= 0.0 {
            return Err(Error::InvariantViolation(format!(
                "coefficients of variation require positive means, got ybar={ybar}, xbar={xbar}"
            )));
        }

        let sy2 = mu20 * n / (n - 1.0);
        let sx2 = mu02 * n / (n - 1.0);
        let rho_yx = mu11 / sqrt(mu20 * mu02);
        let cy = sqrt(sy2) / ybar;
        let cx = sqrt(sx2) / xbar;

        PopulationParams {
            population_size: self.size(),
            ybar,
            xbar,
            sy2,
            sx2,
            cy,
            cx,
            rho_yx,
            cyx: rho_yx * cy * cx,
            beta2y: mu40 / (mu20 * mu20),
            beta2x: mu04 / (mu02 * mu02),
            lambda22: mu22 / (mu20 * mu02),
        }
        .checked()
    }
}

/// Population-level moments and constants consumed by the estimators and
/// the MSE formulas. Construct via [`BivariatePopulation::derive_params`]
/// or fill the fields and call [`PopulationParams::checked`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PopulationParams {
    pub population_size: usize,
    pub ybar: f64,
    pub xbar: f64,
    /// Population variance of `y`, divisor `N − 1`.
    pub sy2: f64,
    /// Population variance of `x`, divisor `N − 1`.
    pub sx2: f64,
    /// Coefficient of variation `S_y / Ȳ`.
    pub cy: f64,
    /// Coefficient of variation `S_x / X̄`.
    pub cx: f64,
    /// Correlation between `y` and `x`.
    pub rho_yx: f64,
    /// Cross coefficient `ρ_yx · C_y · C_x`.
    pub cyx: f64,
    /// Kurtosis ratio `μ₄₀ / μ₂₀²` of `y` (≥ 1).
    pub beta2y: f64,
    /// Kurtosis ratio `μ₀₄ / μ₀₂²` of `x` (≥ 1).
    pub beta2x: f64,
    /// Standardized cross-moment `μ₂₂ / (μ₂₀ μ₀₂)`.
    pub lambda22: f64,
}

/// Relative tolerance for the supplied-vs-derived `C_yx` identity.
/// Published parameter sets are printed to a few decimals, so the check
/// only guards against gross inconsistency.
const CYX_CONSISTENCY_RTOL: f64 = 1e-3;
/// Slack on the moment inequalities to absorb rounding of exact-equality
/// cases (proportional populations sit exactly on the boundary).
const CS_SLACK: f64 = 1e-9;

impl PopulationParams {
    pub fn beta2y_star(&self) -> f64 {
        self.beta2y - 1.0
    }

    pub fn beta2x_star(&self) -> f64 {
        self.beta2x - 1.0
    }

    pub fn lambda22_star(&self) -> f64 {
        self.lambda22 - 1.0
    }

    /// Correlation between `s_y²` and `s_x²` implied by the excess
    /// moments, `λ*₂₂ / √(β*₂y β*₂x)`; zero when either excess kurtosis
    /// vanishes.
    pub fn rho_star(&self) -> f64 {
        let denom = self.beta2y_star() * self.beta2x_star();
        if denom <= 0.0 {
            return 0.0;
        }
        self.lambda22_star() / sqrt(denom)
    }

    pub fn sy4(&self) -> f64 {
        self.sy2 * self.sy2
    }

    pub fn sx4(&self) -> f64 {
        self.sx2 * self.sx2
    }

    /// Validates every field-level invariant and returns the value.
    pub fn checked(self) -> Result<Self> {
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: alloc::string::String| Err(Error::InvariantViolation(msg));

        if self.population_size < 2 {
            return Err(Error::DegeneratePopulation("fewer than two units"));
        }
        for (name, v) in [
            ("ybar", self.ybar),
            ("xbar", self.xbar),
            ("sy2", self.sy2),
            ("sx2", self.sx2),
            ("cy", self.cy),
            ("cx", self.cx),
            ("rho_yx", self.rho_yx),
            ("cyx", self.cyx),
            ("beta2y", self.beta2y),
            ("beta2x", self.beta2x),
            ("lambda22", self.lambda22),
        ] {
            if !v.is_finite() {
                return fail(format!("{name} is not finite"));
            }
        }
        if self.sy2 <= 0.0 || self.sx2 <= 0.0 {
            return Err(Error::DegeneratePopulation("zero variance"));
        }
        if self.cy <= 0.0 || self.cx <= 0.0 {
            return fail(format!(
                "coefficients of variation must be positive, got cy={}, cx={}",
                self.cy, self.cx
            ));
        }
        if self.rho_yx.abs() > 1.0 + 1e-12 {
            return fail(format!("rho_yx = {} outside [-1, 1]", self.rho_yx));
        }
        // mu40 >= mu20^2 (Cauchy-Schwarz), so a kurtosis ratio below one
        // cannot come from any real population.
        if self.beta2y < 1.0 - 1e-12 {
            return fail(format!("beta2y = {} below 1", self.beta2y));
        }
        if self.beta2x < 1.0 - 1e-12 {
            return fail(format!("beta2x = {} below 1", self.beta2x));
        }
        let cs = self.beta2y * self.beta2x;
        if self.lambda22 * self.lambda22 > cs * (1.0 + CS_SLACK) + 1e-12 {
            return fail(format!(
                "lambda22^2 = {} exceeds beta2y*beta2x = {cs}",
                self.lambda22 * self.lambda22
            ));
        }
        let cs_star = self.beta2y_star() * self.beta2x_star();
        let l_star = self.lambda22_star();
        if l_star * l_star > cs_star * (1.0 + CS_SLACK) + 1e-12 {
            return fail(format!(
                "lambda22_star^2 = {} exceeds beta2y_star*beta2x_star = {cs_star}",
                l_star * l_star
            ));
        }
        let implied = self.rho_yx * self.cy * self.cx;
        let scale = self.cyx.abs().max(implied.abs()).max(1e-12);
        if (self.cyx - implied).abs() > CYX_CONSISTENCY_RTOL * scale {
            return fail(format!(
                "cyx = {} disagrees with rho_yx*cy*cx = {implied}",
                self.cyx
            ));
        }
        Ok(())
    }
}
