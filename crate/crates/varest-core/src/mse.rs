//! First-order (Taylor) mean squared errors of every estimator family,
//! the family-specific constants, and closed-form optimal weights.
//!
//! All formulas take the design factor `θ = 1/n − 1/N` as an explicit
//! argument so parameter sets with and without a sample size both work.
//! Every MSE is expressed through the excess moments `β*₂y`, `β*₂x`,
//! `λ*₂₂` of the squared deviations, which satisfy
//!
//! - `E(e0²) = θ β*₂y`, `E(e1²) = θ β*₂x`, `E(e0·e1) = θ λ*₂₂`
//!
//! for the relative errors `e0 = s_y²/S_y² − 1`, `e1 = s_x²/S_x² − 1`.
//!
//! For the two-weight power class, the literature prints a coefficient
//! set whose quadratic `e1` term carries a sign inconsistent with the
//! binomial expansion `(1 − A·e1)^m = 1 − mA·e1 + (m(m−1)/2)A²e1² + …`.
//! Both readings are first-class here ([`MseFormulaVariant`]); they
//! coincide for `m ∈ {0, 1}` and at the single-component weights
//! `(w1, w2) = (1, 0)`, and differ in the cross coefficient and hence in
//! the optimal weights.

use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::estimators::{EstimatorSpec, SpecRequest, TClassSpec};
use crate::population::PopulationParams;

/// Which coefficient set the power-class MSE uses: the set as published
/// (`AsPrinted`) or the set rederived from the standard series expansion
/// (`Rederived`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MseFormulaVariant {
    AsPrinted,
    Rederived,
}

impl core::fmt::Display for MseFormulaVariant {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            MseFormulaVariant::AsPrinted => f.write_str("printed"),
            MseFormulaVariant::Rederived => f.write_str("rederived"),
        }
    }
}

/// Weights a closed-form optimum filled in, recorded for provenance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WeightsUsed {
    Regression { b: f64 },
    KcCombined { alpha1: f64 },
    GuptaShabbir { d1: f64, d2: f64 },
    TClass { w1: f64, w2: f64 },
}

/// A theoretical MSE record for one estimator.
#[derive(Debug, Clone, PartialEq)]
pub struct MseReport {
    pub spec: EstimatorSpec,
    /// First-order MSE. Reported raw even when the quadratic model broke
    /// down (then `breakdown` is set; the value is never clamped).
    pub mse: f64,
    pub variant: MseFormulaVariant,
    /// Optimal weights used, when the spec came from an `opt` request.
    pub weights_used: Option<WeightsUsed>,
    /// `var(usual) / mse`; > 1 means the estimator beats `s_y²`.
    pub relative_efficiency: f64,
    /// Set when the quadratic model returned a non-positive minimum or a
    /// non-positive-definite coefficient matrix; the reported value is
    /// then not a trustworthy minimum.
    pub breakdown: bool,
}

fn report(
    spec: EstimatorSpec,
    mse: f64,
    variant: MseFormulaVariant,
    weights_used: Option<WeightsUsed>,
    breakdown: bool,
    params: &PopulationParams,
    theta: f64,
) -> MseReport {
    let vu = var_usual(params, theta);
    MseReport {
        spec,
        mse,
        variant,
        weights_used,
        relative_efficiency: if mse > 0.0 { vu / mse } else { f64::NAN },
        breakdown,
    }
}

/// Variance of the usual unbiased estimator: `θ S_y⁴ β*₂y`.
pub fn var_usual(params: &PopulationParams, theta: f64) -> f64 {
    theta * params.sy4() * params.beta2y_star()
}

/// MSE of the ratio estimator: `θ S_y⁴ (β*₂y + β*₂x − 2λ*₂₂)`.
pub fn mse_ratio(params: &PopulationParams, theta: f64) -> f64 {
    theta
        * params.sy4()
        * (params.beta2y_star() + params.beta2x_star() - 2.0 * params.lambda22_star())
}

/// MSE of the regression estimator at its optimal slope:
/// `θ S_y⁴ (β*₂y − λ*₂₂²/β*₂x)`, i.e. `var_usual · (1 − ρ*²)`.
pub fn mse_regression(params: &PopulationParams, theta: f64) -> Result<f64> {
    let bxs = params.beta2x_star();
    if bxs <= 0.0 {
        return Err(Error::DegenerateAuxiliary("beta2x_star = 0"));
    }
    let ls = params.lambda22_star();
    Ok(theta * params.sy4() * (params.beta2y_star() - ls * ls / bxs))
}

/// The slope attaining [`mse_regression`]: `λ*₂₂ S_y² / (β*₂x S_x²)`.
pub fn regression_b_opt(params: &PopulationParams) -> Result<f64> {
    let bxs = params.beta2x_star();
    if bxs <= 0.0 {
        return Err(Error::DegenerateAuxiliary("beta2x_star = 0"));
    }
    Ok(params.lambda22_star() * params.sy2 / (bxs * params.sx2))
}

/// First-order MSE of the regression estimator at an arbitrary slope:
/// `θ (S_y⁴ β*₂y + b² S_x⁴ β*₂x − 2 b S_y² S_x² λ*₂₂)`.
pub fn regression_mse_at(params: &PopulationParams, theta: f64, b: f64) -> f64 {
    theta
        * (params.sy4() * params.beta2y_star() + b * b * params.sx4() * params.beta2x_star()
            - 2.0 * b * params.sy2 * params.sx2 * params.lambda22_star())
}

/// The shifted-ratio constants `p_i ∈ (0, 1]`:
/// `p₁ = S_x²/(S_x²+C_x)`, `p₂ = S_x²/(S_x²+β₂x)`,
/// `p₃ = S_x²β₂x/(S_x²β₂x+C_x)`, `p₄ = S_x²C_x/(S_x²C_x+β₂x)`.
pub fn p_constant(params: &PopulationParams, i: u8) -> Result<f64> {
    let sx2 = params.sx2;
    Ok(match i {
        1 => sx2 / (sx2 + params.cx),
        2 => sx2 / (sx2 + params.beta2x),
        3 => sx2 * params.beta2x / (sx2 * params.beta2x + params.cx),
        4 => sx2 * params.cx / (sx2 * params.cx + params.beta2x),
        _ => {
            return Err(Error::InvalidSpec(alloc::format!(
                "kc index {i} outside 1..=4"
            )))
        }
    })
}

/// Shifted-ratio MSE at an explicit shrink factor `p`:
/// `θ S_y⁴ (β*₂y + p² β*₂x − 2 p λ*₂₂)`. At `p = 1` this is exactly
/// [`mse_ratio`].
pub fn mse_kc_at_p(params: &PopulationParams, theta: f64, p: f64) -> f64 {
    theta
        * params.sy4()
        * (params.beta2y_star() + p * p * params.beta2x_star()
            - 2.0 * p * params.lambda22_star())
}

/// MSE of the `i`-th Kadilar–Cingi estimator, using the excess kurtosis
/// `β*₂x` in the quadratic term (the reading that reproduces the
/// published benchmark values).
pub fn mse_kc(params: &PopulationParams, theta: f64, i: u8) -> Result<f64> {
    Ok(mse_kc_at_p(params, theta, p_constant(params, i)?))
}

/// Variant of [`mse_kc`] with the raw kurtosis ratio `β₂x` in the
/// quadratic term. Retained for cross-checking published coefficient
/// sets; it does not reproduce the benchmark values.
pub fn mse_kc_unstarred(params: &PopulationParams, theta: f64, i: u8) -> Result<f64> {
    let p = p_constant(params, i)?;
    Ok(theta
        * params.sy4()
        * (params.beta2y_star() + p * p * params.beta2x - 2.0 * p * params.lambda22_star()))
}

/// The exponent constant of the weighted combination:
/// `τ = (1 + θ C_yx) / (1 + θ C_x²)`.
pub fn tau(params: &PopulationParams, theta: f64) -> f64 {
    (1.0 + theta * params.cyx) / (1.0 + theta * params.cx * params.cx)
}

/// Optimal weights `(α₁*, α₂*)` of the weighted combination, with
/// `α₁* + α₂* = 1`:
///
/// `α₁* = [β*₂y(τ−1) + β*₂x τ + (1−2τ)λ*₂₂] /
///        [β*₂y (1−τ)²/τ + 2λ*₂₂(1−τ) + β*₂x τ]`
pub fn kc_alpha_opt(params: &PopulationParams, theta: f64) -> Result<(f64, f64)> {
    let t = tau(params, theta);
    let bys = params.beta2y_star();
    let bxs = params.beta2x_star();
    let ls = params.lambda22_star();
    let num = bys * (t - 1.0) + bxs * t + (1.0 - 2.0 * t) * ls;
    let den = bys * ((1.0 - t) * (1.0 - t) / t) + 2.0 * ls * (1.0 - t) + bxs * t;
    if den == 0.0 || !den.is_finite() {
        return Err(Error::SingularOptimum(
            "weighted-combination normal equation has zero curvature",
        ));
    }
    let alpha1 = num / den;
    Ok((alpha1, 1.0 - alpha1))
}

/// First-order MSE of the weighted combination at arbitrary `(α₁, τ)`:
/// `θ S_y⁴ [z² β*₂y + α₂² τ² β*₂x − 2 τ z α₂ λ*₂₂]` with
/// `α₂ = 1 − α₁`, `z = α₁ + α₂ τ`.
pub fn kc_combined_mse_at(
    params: &PopulationParams,
    theta: f64,
    alpha1: f64,
    tau: f64,
) -> f64 {
    let alpha2 = 1.0 - alpha1;
    let z = alpha1 + alpha2 * tau;
    theta
        * params.sy4()
        * (z * z * params.beta2y_star()
            + alpha2 * alpha2 * tau * tau * params.beta2x_star()
            - 2.0 * tau * z * alpha2 * params.lambda22_star())
}

/// The weighted combination evaluated at its optimal weights.
pub fn mse_kc_combined(params: &PopulationParams, theta: f64) -> Result<MseReport> {
    let t = tau(params, theta);
    let (alpha1, _alpha2) = kc_alpha_opt(params, theta)?;
    let mse = kc_combined_mse_at(params, theta, alpha1, t);
    Ok(report(
        EstimatorSpec::KcCombined { alpha1, tau: t },
        mse,
        MseFormulaVariant::AsPrinted,
        Some(WeightsUsed::KcCombined { alpha1 }),
        mse < 0.0,
        params,
        theta,
    ))
}

/// The five Gupta–Shabbir quadratic coefficients:
///
/// - `A₁ = 1 + θ(β*₂y + α β*₂x − 4α λ*₂₂)`
/// - `A₂ = θ β*₂x`
/// - `A₃ = θ(2α β*₂x − λ*₂₂)`
/// - `A₄ = 1 − αθ(λ*₂₂ + ((α−1)/2) β*₂x)`
/// - `A₅ = αθ β*₂x`
pub fn gs_coefficients(params: &PopulationParams, theta: f64, alpha: f64) -> [f64; 5] {
    let bys = params.beta2y_star();
    let bxs = params.beta2x_star();
    let ls = params.lambda22_star();
    [
        1.0 + theta * (bys + alpha * bxs - 4.0 * alpha * ls),
        theta * bxs,
        theta * (2.0 * alpha * bxs - ls),
        1.0 - alpha * theta * (ls + (alpha - 1.0) / 2.0 * bxs),
        alpha * theta * bxs,
    ]
}

/// The Gupta–Shabbir quadratic at arbitrary weights:
/// `S_y⁴ + d₁²S_y⁴A₁ + d₂²S_x⁴A₂ + 2d₁d₂S_y²S_x²A₃ − 2d₁S_y⁴A₄ − 2d₂S_y²S_x²A₅`.
pub fn gs_mse_at(
    params: &PopulationParams,
    theta: f64,
    alpha: f64,
    d1: f64,
    d2: f64,
) -> f64 {
    let [a1, a2, a3, a4, a5] = gs_coefficients(params, theta, alpha);
    let sy4 = params.sy4();
    let sx4 = params.sx4();
    let cross = params.sy2 * params.sx2;
    sy4 + d1 * d1 * sy4 * a1 + d2 * d2 * sx4 * a2 + 2.0 * d1 * d2 * cross * a3
        - 2.0 * d1 * sy4 * a4
        - 2.0 * d2 * cross * a5
}

/// Minimizer of the Gupta–Shabbir quadratic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GsOptimum {
    pub d1: f64,
    /// The weight on `(S_x² − s_x²)` in natural units.
    pub d2: f64,
    /// The scale-free weight `g = d₂ S_x² / S_y²` the closed form solves
    /// for.
    pub d2_scaled: f64,
    pub min_mse: f64,
    /// Set when the stationary value is non-positive or the coefficient
    /// matrix is not positive definite (the stationary point is then a
    /// saddle, not a minimum).
    pub breakdown: bool,
}

/// Closed-form stationary point of the Gupta–Shabbir quadratic:
/// with `g = d₂S_x²/S_y²`, `d₁ = (A₂A₄−A₃A₅)/(A₁A₂−A₃²)`,
/// `g = (A₁A₅−A₃A₄)/(A₁A₂−A₃²)`, and
/// `min = S_y⁴[1 − (A₂A₄² − 2A₃A₄A₅ + A₁A₅²)/(A₁A₂−A₃²)]`.
pub fn gs_optimal(params: &PopulationParams, theta: f64, alpha: f64) -> Result<GsOptimum> {
    let [a1, a2, a3, a4, a5] = gs_coefficients(params, theta, alpha);
    let det = a1 * a2 - a3 * a3;
    if det == 0.0 || !det.is_finite() {
        return Err(Error::SingularOptimum(
            "Gupta-Shabbir coefficient matrix is singular",
        ));
    }
    let d1 = (a2 * a4 - a3 * a5) / det;
    let g = (a1 * a5 - a3 * a4) / det;
    let min_mse =
        params.sy4() * (1.0 - (a2 * a4 * a4 - 2.0 * a3 * a4 * a5 + a1 * a5 * a5) / det);
    let positive_definite = a1 > 0.0 && det > 0.0;
    Ok(GsOptimum {
        d1,
        d2: g * params.sy2 / params.sx2,
        d2_scaled: g,
        min_mse,
        breakdown: min_mse <= 0.0 || !positive_definite,
    })
}

/// The five power-class quadratic coefficients for shift `a = d/(c−d)`.
///
/// `AsPrinted` evaluates the published set; `Rederived` the set obtained
/// from the standard binomial expansion. They differ only in the terms
/// carrying the factor `m(m−1)` (`B₁`, `B₃`, `B₄`), so they coincide
/// identically for `m ∈ {0, 1}`.
pub fn t_coefficients(
    params: &PopulationParams,
    theta: f64,
    m: f64,
    w: f64,
    a: f64,
    variant: MseFormulaVariant,
) -> [f64; 5] {
    let bys = params.beta2y_star();
    let bxs = params.beta2x_star();
    let ls = params.lambda22_star();
    let mm = m * (m - 1.0) / 2.0;
    let ww = w * (w - 1.0) / 2.0;

    let b2 = 1.0 + theta * (bys + w * bxs - 4.0 * w * ls);
    let b5 = 1.0 - theta * (bxs * ww + w * ls);

    match variant {
        MseFormulaVariant::AsPrinted => [
            1.0 + theta * (bys + m * a * a * bxs - 4.0 * m * a * ls),
            b2,
            1.0 + theta * (bxs * (m * w * a - ww - mm) + bys - 2.0 * w * ls - 2.0 * m * a * ls),
            1.0 - theta * (bxs * a * a * mm + m * a * ls),
            b5,
        ],
        MseFormulaVariant::Rederived => [
            1.0 + theta * (bys + m * (2.0 * m - 1.0) * a * a * bxs - 4.0 * m * a * ls),
            b2,
            1.0 + theta
                * (bys + bxs * (m * w * a - ww + mm * a * a) - 2.0 * (w + m * a) * ls),
            1.0 + theta * (mm * a * a * bxs - m * a * ls),
            b5,
        ],
    }
}

/// The power-class quadratic at arbitrary weights:
/// `S_y⁴ (1 + w₁²B₁ + w₂²B₂ + 2w₁w₂B₃ − 2w₁B₄ − 2w₂B₅)`.
#[allow(clippy::too_many_arguments)]
pub fn t_mse_at(
    params: &PopulationParams,
    theta: f64,
    m: f64,
    w: f64,
    a: f64,
    w1: f64,
    w2: f64,
    variant: MseFormulaVariant,
) -> f64 {
    let [b1, b2, b3, b4, b5] = t_coefficients(params, theta, m, w, a, variant);
    params.sy4()
        * (1.0 + w1 * w1 * b1 + w2 * w2 * b2 + 2.0 * w1 * w2 * b3 - 2.0 * w1 * b4
            - 2.0 * w2 * b5)
}

fn t_shift(c: f64, d: f64) -> Result<f64> {
    if c == d {
        return Err(Error::InvalidSpec(
            "t-class requires c != d (the shift d/(c-d) must be finite)".into(),
        ));
    }
    let a = d / (c - d);
    if !a.is_finite() {
        return Err(Error::InvalidSpec("t-class shift is not finite".into()));
    }
    Ok(a)
}

/// Unconstrained optimal weights of the power class:
/// `w₁ = (B₂B₄−B₃B₅)/(B₁B₂−B₃²)`, `w₂ = (B₁B₅−B₃B₄)/(B₁B₂−B₃²)`,
/// `min = S_y⁴[1 − (B₂B₄²−2B₃B₄B₅+B₁B₅²)/(B₁B₂−B₃²)]`.
///
/// When the quadratic is not positive definite (`B₁ ≤ 0` or
/// `B₁B₂−B₃² ≤ 0`) or the stationary value is non-positive, the report
/// carries `breakdown = true` and the raw value — the first-order model
/// is then untrustworthy and is flagged rather than clamped.
pub fn t_optimal(
    params: &PopulationParams,
    theta: f64,
    m: f64,
    w: f64,
    c: f64,
    d: f64,
    variant: MseFormulaVariant,
) -> Result<MseReport> {
    let a = t_shift(c, d)?;
    let [b1, b2, b3, b4, b5] = t_coefficients(params, theta, m, w, a, variant);
    let det = b1 * b2 - b3 * b3;
    if det == 0.0 || !det.is_finite() {
        return Err(Error::SingularOptimum(
            "power-class coefficient matrix is singular",
        ));
    }
    let w1 = (b2 * b4 - b3 * b5) / det;
    let w2 = (b1 * b5 - b3 * b4) / det;
    let min_mse =
        params.sy4() * (1.0 - (b2 * b4 * b4 - 2.0 * b3 * b4 * b5 + b1 * b5 * b5) / det);
    let breakdown = min_mse <= 0.0 || b1 <= 0.0 || det <= 0.0;
    Ok(report(
        EstimatorSpec::TClass(TClassSpec { m, w, c, d, w1, w2 }),
        min_mse,
        variant,
        Some(WeightsUsed::TClass { w1, w2 }),
        breakdown,
        params,
        theta,
    ))
}

/// Optimal weights of the power class under the restriction
/// `w₁ + w₂ = 1`: the one-dimensional quadratic gives
/// `w₁ = (B₂ − B₃ + B₄ − B₅)/(B₁ + B₂ − 2B₃)`.
pub fn t_optimal_constrained(
    params: &PopulationParams,
    theta: f64,
    m: f64,
    w: f64,
    c: f64,
    d: f64,
    variant: MseFormulaVariant,
) -> Result<MseReport> {
    let a = t_shift(c, d)?;
    let [b1, b2, b3, b4, b5] = t_coefficients(params, theta, m, w, a, variant);
    let curvature = b1 + b2 - 2.0 * b3;
    if curvature == 0.0 || !curvature.is_finite() {
        return Err(Error::SingularOptimum(
            "constrained power-class quadratic has zero curvature",
        ));
    }
    let w1 = (b2 - b3 + b4 - b5) / curvature;
    let w2 = 1.0 - w1;
    let min_mse = t_mse_at(params, theta, m, w, a, w1, w2, variant);
    let breakdown = min_mse <= 0.0 || curvature <= 0.0;
    Ok(report(
        EstimatorSpec::TClass(TClassSpec { m, w, c, d, w1, w2 }),
        min_mse,
        variant,
        Some(WeightsUsed::TClass { w1, w2 }),
        breakdown,
        params,
        theta,
    ))
}

/// A theoretical MSE value plus a value-level breakdown marker.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TheoreticalMse {
    pub mse: f64,
    pub breakdown: bool,
}

/// First-order theoretical MSE of a concrete spec, used to pair theory
/// with simulation.
pub fn theoretical(
    spec: &EstimatorSpec,
    params: &PopulationParams,
    theta: f64,
    variant: MseFormulaVariant,
) -> Result<TheoreticalMse> {
    spec.validate()?;
    let mse = match spec {
        EstimatorSpec::Usual => var_usual(params, theta),
        EstimatorSpec::IsakiRatio => mse_ratio(params, theta),
        EstimatorSpec::Regression { b } => regression_mse_at(params, theta, *b),
        EstimatorSpec::KadilarCingi { i } => mse_kc(params, theta, *i)?,
        EstimatorSpec::KcCombined { alpha1, tau } => {
            kc_combined_mse_at(params, theta, *alpha1, *tau)
        }
        EstimatorSpec::GuptaShabbir { alpha, d1, d2 } => {
            gs_mse_at(params, theta, *alpha, *d1, *d2)
        }
        EstimatorSpec::TClass(t) => t_mse_at(
            params,
            theta,
            t.m,
            t.w,
            t.shift(),
            t.w1,
            t.w2,
            variant,
        ),
    };
    Ok(TheoreticalMse {
        mse,
        breakdown: mse < 0.0,
    })
}

/// One row of a comparison table; failed rows keep their label and error
/// without aborting the rest of the table.
#[derive(Debug, Clone)]
pub struct CompareRow {
    /// Text form of the request that produced the row.
    pub label: String,
    pub outcome: Result<MseReport>,
}

/// Builds an MSE comparison table over a roster of requests, resolving
/// optimal weights where asked. Rows are emitted in roster order;
/// per-row failures are carried in the row.
pub fn compare_table(
    params: &PopulationParams,
    theta: f64,
    requests: &[SpecRequest],
    variant: MseFormulaVariant,
) -> Vec<CompareRow> {
    requests
        .iter()
        .map(|req| CompareRow {
            label: req.canonical(),
            outcome: compare_row(params, theta, req, variant),
        })
        .collect()
}

fn compare_row(
    params: &PopulationParams,
    theta: f64,
    request: &SpecRequest,
    variant: MseFormulaVariant,
) -> Result<MseReport> {
    match request {
        SpecRequest::Concrete(spec) => {
            let t = theoretical(spec, params, theta, variant)?;
            Ok(report(
                spec.clone(),
                t.mse,
                variant,
                None,
                t.breakdown,
                params,
                theta,
            ))
        }
        SpecRequest::RegressionOpt => {
            let b = regression_b_opt(params)?;
            let mse = mse_regression(params, theta)?;
            Ok(report(
                EstimatorSpec::Regression { b },
                mse,
                variant,
                Some(WeightsUsed::Regression { b }),
                false,
                params,
                theta,
            ))
        }
        SpecRequest::KcCombinedOpt => mse_kc_combined(params, theta),
        SpecRequest::KcCombinedAt { alpha1 } => {
            let t = tau(params, theta);
            let mse = kc_combined_mse_at(params, theta, *alpha1, t);
            Ok(report(
                EstimatorSpec::KcCombined { alpha1: *alpha1, tau: t },
                mse,
                variant,
                None,
                mse < 0.0,
                params,
                theta,
            ))
        }
        SpecRequest::GuptaShabbirOpt { alpha } => {
            let opt = gs_optimal(params, theta, *alpha)?;
            Ok(report(
                EstimatorSpec::GuptaShabbir {
                    alpha: *alpha,
                    d1: opt.d1,
                    d2: opt.d2,
                },
                opt.min_mse,
                variant,
                Some(WeightsUsed::GuptaShabbir {
                    d1: opt.d1,
                    d2: opt.d2,
                }),
                opt.breakdown,
                params,
                theta,
            ))
        }
        SpecRequest::TClassOpt { m, w, c, d } => {
            t_optimal(params, theta, *m, *w, *c, *d, variant)
        }
    }
}
