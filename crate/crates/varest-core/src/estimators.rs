//! Point estimators of the population variance `S_y²` evaluated on a
//! sample plus known auxiliary parameters.
//!
//! Every family reduces to the plain sample variance `s_y²` when the
//! auxiliary sample variance hits its population value (`s_x² = S_x²`)
//! and the free weights sum appropriately; the unit tests pin those
//! reductions down.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math::{is_integer, powf};
use crate::mse::{self, MseFormulaVariant};
use crate::population::PopulationParams;
use crate::sampling::SampleStats;

/// Free constants of the generalized two-weight power class
/// `w1·s_y²·{(c·S_x² − d·s_x²)/((c−d)·S_x²)}^m + w2·s_y²·{2 − (s_x²/S_x²)^w}`.
///
/// `m` and `w` generate members of the class; `c` and `d` are constants or
/// known auxiliary parameters (the shift `A = d/(c−d)` must be finite, so
/// `c ≠ d`); `w1`, `w2` are the mixing weights.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TClassSpec {
    pub m: f64,
    pub w: f64,
    pub c: f64,
    pub d: f64,
    pub w1: f64,
    pub w2: f64,
}

impl TClassSpec {
    /// The shift constant `A = d/(c−d)` of the first component.
    pub fn shift(&self) -> f64 {
        self.d / (self.c - self.d)
    }
}

/// Selects an estimator family together with its free parameters.
/// All parameters are concrete numbers; use [`SpecRequest`] to ask for
/// optimal weights computed from population parameters.
#[derive(Debug, Clone, PartialEq)]
pub enum EstimatorSpec {
    /// The usual unbiased estimator `s_y²`.
    Usual,
    /// Isaki's ratio estimator `s_y² · S_x²/s_x²`.
    IsakiRatio,
    /// Isaki's regression estimator `s_y² + b·(S_x² − s_x²)`.
    Regression { b: f64 },
    /// Kadilar–Cingi shifted-ratio estimators, `i` in 1..=4.
    KadilarCingi { i: u8 },
    /// Kadilar–Cingi weighted combination
    /// `alpha1·s_y² + (1 − alpha1)·s_y²·(S_x²/s_x²)^tau`.
    KcCombined { alpha1: f64, tau: f64 },
    /// Gupta–Shabbir hybrid class
    /// `(d1·s_y² + d2·(S_x² − s_x²)) · (2 − (s_x²/S_x²)^alpha)`.
    GuptaShabbir { alpha: f64, d1: f64, d2: f64 },
    /// Generalized two-weight power class.
    TClass(TClassSpec),
}

impl EstimatorSpec {
    /// Checks the structural constraints of the spec itself (not of any
    /// particular sample).
    pub fn validate(&self) -> Result<()> {
        match self {
            EstimatorSpec::KadilarCingi { i } if !(1..=4).contains(i) => Err(
                Error::InvalidSpec(format!("kc index {i} outside 1..=4")),
            ),
            EstimatorSpec::TClass(t) if t.c == t.d => Err(Error::InvalidSpec(
                "t-class requires c != d (the shift d/(c-d) must be finite)".into(),
            )),
            EstimatorSpec::TClass(t) if !(t.c - t.d).is_finite() || !t.shift().is_finite() => {
                Err(Error::InvalidSpec("t-class shift is not finite".into()))
            }
            _ => Ok(()),
        }
    }

    /// Canonical text form, re-parsable by [`SpecRequest::parse`].
    pub fn canonical(&self) -> String {
        match self {
            EstimatorSpec::Usual => "usual".into(),
            EstimatorSpec::IsakiRatio => "ratio".into(),
            EstimatorSpec::Regression { b } => format!("reg:b={b}"),
            EstimatorSpec::KadilarCingi { i } => format!("kc:{i}"),
            EstimatorSpec::KcCombined { alpha1, tau } => {
                format!("kcc:alpha1={alpha1},tau={tau}")
            }
            EstimatorSpec::GuptaShabbir { alpha, d1, d2 } => {
                format!("gs:alpha={alpha},d1={d1},d2={d2}")
            }
            EstimatorSpec::TClass(t) => format!(
                "t:m={},w={},c={},d={},w1={},w2={}",
                t.m, t.w, t.c, t.d, t.w1, t.w2
            ),
        }
    }
}

impl core::fmt::Display for EstimatorSpec {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(&self.canonical())
    }
}

/// `s_y²` itself.
pub fn usual(stats: &SampleStats) -> f64 {
    stats.sy2
}

/// `s_y² · S_x² / s_x²`.
pub fn isaki_ratio(stats: &SampleStats, params: &PopulationParams) -> Result<f64> {
    if stats.sx2 <= 0.0 {
        return Err(Error::DegenerateSample("sx2 = 0 under a ratio estimator"));
    }
    Ok(stats.sy2 * params.sx2 / stats.sx2)
}

/// `s_y² + b·(S_x² − s_x²)` with an explicit slope `b`; see
/// [`mse::regression_b_opt`] for the population-optimal slope.
pub fn regression(stats: &SampleStats, params: &PopulationParams, b: f64) -> f64 {
    stats.sy2 + b * (params.sx2 - stats.sx2)
}

/// The four shifted-ratio estimators. The shift constants come from the
/// auxiliary parameters; the denominator uses the sample variance
/// (`s_x²`), which is what makes the estimators non-constant and reduces
/// each of them to `s_y²` at `s_x² = S_x²`.
pub fn kadilar_cingi(stats: &SampleStats, params: &PopulationParams, i: u8) -> Result<f64> {
    let (num, den) = match i {
        1 => (params.sx2 + params.cx, stats.sx2 + params.cx),
        2 => (params.sx2 + params.beta2x, stats.sx2 + params.beta2x),
        3 => (
            params.sx2 * params.beta2x + params.cx,
            stats.sx2 * params.beta2x + params.cx,
        ),
        4 => (
            params.sx2 * params.cx + params.beta2x,
            stats.sx2 * params.cx + params.beta2x,
        ),
        _ => {
            return Err(Error::InvalidSpec(format!("kc index {i} outside 1..=4")));
        }
    };
    if den == 0.0 {
        return Err(Error::DegenerateSample(
            "zero shifted denominator under a Kadilar-Cingi estimator",
        ));
    }
    Ok(stats.sy2 * num / den)
}

/// `alpha1·s_y² + (1 − alpha1)·s_y²·(S_x²/s_x²)^tau`. The exponent `tau`
/// is a design-level constant; [`mse::tau`] supplies the canonical value.
pub fn kc_combined(
    stats: &SampleStats,
    params: &PopulationParams,
    alpha1: f64,
    tau: f64,
) -> Result<f64> {
    if stats.sx2 <= 0.0 {
        return Err(Error::DegenerateSample("sx2 = 0 under a ratio estimator"));
    }
    let ratio = params.sx2 / stats.sx2;
    Ok(alpha1 * stats.sy2 + (1.0 - alpha1) * stats.sy2 * powf(ratio, tau))
}

/// `(d1·s_y² + d2·(S_x² − s_x²)) · (2 − (s_x²/S_x²)^alpha)`.
pub fn gupta_shabbir(
    stats: &SampleStats,
    params: &PopulationParams,
    alpha: f64,
    d1: f64,
    d2: f64,
) -> Result<f64> {
    if stats.sx2 == 0.0 && (!is_integer(alpha) || alpha < 0.0) {
        return Err(Error::DegenerateSample(
            "sx2 = 0 with a non-positive-integer exponent",
        ));
    }
    let bracket = 2.0 - powf(stats.sx2 / params.sx2, alpha);
    let est = (d1 * stats.sy2 + d2 * (params.sx2 - stats.sx2)) * bracket;
    if !est.is_finite() {
        return Err(Error::NumericalDomain("non-finite estimate"));
    }
    Ok(est)
}

/// The generalized two-weight power class; see [`TClassSpec`] for the
/// estimator form.
pub fn t_class(stats: &SampleStats, params: &PopulationParams, spec: &TClassSpec) -> Result<f64> {
    if spec.c == spec.d {
        return Err(Error::InvalidSpec(
            "t-class requires c != d (the shift d/(c-d) must be finite)".into(),
        ));
    }
    let base = (spec.c * params.sx2 - spec.d * stats.sx2) / ((spec.c - spec.d) * params.sx2);
    let first = checked_pow(base, spec.m)?;
    let second = 2.0 - checked_pow(stats.sx2 / params.sx2, spec.w)?;
    let est = spec.w1 * stats.sy2 * first + spec.w2 * stats.sy2 * second;
    if !est.is_finite() {
        return Err(Error::NumericalDomain("non-finite estimate"));
    }
    Ok(est)
}

/// Real power that refuses to leave the reals: a negative base with a
/// fractional exponent (or a pole at zero) is an error, never a NaN.
fn checked_pow(base: f64, exp: f64) -> Result<f64> {
    if base < 0.0 && !is_integer(exp) {
        return Err(Error::NumericalDomain(
            "negative base with fractional exponent",
        ));
    }
    if base == 0.0 && exp < 0.0 {
        return Err(Error::NumericalDomain("zero base with negative exponent"));
    }
    let v = powf(base, exp);
    if !v.is_finite() {
        return Err(Error::NumericalDomain("power overflow"));
    }
    Ok(v)
}

/// Evaluates any spec on a sample. Pure: identical inputs give
/// bit-identical outputs.
pub fn evaluate(
    spec: &EstimatorSpec,
    stats: &SampleStats,
    params: &PopulationParams,
) -> Result<f64> {
    match spec {
        EstimatorSpec::Usual => Ok(usual(stats)),
        EstimatorSpec::IsakiRatio => isaki_ratio(stats, params),
        EstimatorSpec::Regression { b } => Ok(regression(stats, params, *b)),
        EstimatorSpec::KadilarCingi { i } => kadilar_cingi(stats, params, *i),
        EstimatorSpec::KcCombined { alpha1, tau } => kc_combined(stats, params, *alpha1, *tau),
        EstimatorSpec::GuptaShabbir { alpha, d1, d2 } => {
            gupta_shabbir(stats, params, *alpha, *d1, *d2)
        }
        EstimatorSpec::TClass(t) => t_class(stats, params, t),
    }
}

/// A parsed estimator request: either a fully concrete spec, or a family
/// whose free weights are to be filled in with the closed-form optimum
/// for a given parameter set and design (the `opt` token of the text
/// form).
#[derive(Debug, Clone, PartialEq)]
pub enum SpecRequest {
    Concrete(EstimatorSpec),
    /// `reg:opt` — regression with the population-optimal slope.
    RegressionOpt,
    /// `kcc:opt` — the weighted combination at its optimal `alpha1`.
    KcCombinedOpt,
    /// `kcc:alpha1=V` — given weight, canonical `tau` from the design.
    KcCombinedAt { alpha1: f64 },
    /// `gs:alpha=V,opt` — Gupta–Shabbir at the optimal `(d1, d2)`.
    GuptaShabbirOpt { alpha: f64 },
    /// `t:m=..,w=..,c=..,d=..,opt` — the power class at its optimal
    /// `(w1, w2)` for the requested formula variant.
    TClassOpt { m: f64, w: f64, c: f64, d: f64 },
}

impl SpecRequest {
    /// Parses the canonical text form:
    ///
    /// ```text
    /// usual | ratio
    /// reg:b=0.25 | reg:opt
    /// kc:1 .. kc:4
    /// kcc:opt | kcc:alpha1=0.7[,tau=0.99]
    /// gs:alpha=0,opt | gs:alpha=0,d1=1,d2=0.5
    /// t:m=-1,w=1,c=2,d=1,opt | t:m=-1,w=1,c=2,d=1,w1=1,w2=0
    /// ```
    pub fn parse(text: &str) -> Result<Self> {
        let text = text.trim();
        let (family, rest) = match text.split_once(':') {
            Some((f, r)) => (f, r),
            None => (text, ""),
        };
        let bad = |msg: &str| Error::InvalidSpec(format!("`{text}`: {msg}"));

        let mut opt = false;
        let mut kv: Vec<(&str, f64)> = Vec::new();
        let mut bare: Option<&str> = None;
        for token in rest.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            if token == "opt" {
                opt = true;
            } else if let Some((k, v)) = token.split_once('=') {
                let value: f64 = v
                    .trim()
                    .parse()
                    .map_err(|_| bad(&format!("`{v}` is not a number")))?;
                kv.push((k.trim(), value));
            } else {
                if bare.is_some() {
                    return Err(bad("more than one bare token"));
                }
                bare = Some(token);
            }
        }
        let get = |key: &str| kv.iter().find(|(k, _)| *k == key).map(|(_, v)| *v);
        let require = |key: &str| get(key).ok_or_else(|| bad(&format!("missing `{key}=`")));
        let known = |allowed: &[&str]| -> Result<()> {
            for (k, _) in &kv {
                if !allowed.contains(k) {
                    return Err(bad(&format!("unknown key `{k}`")));
                }
            }
            Ok(())
        };

        let request = match family {
            "usual" => SpecRequest::Concrete(EstimatorSpec::Usual),
            "ratio" => SpecRequest::Concrete(EstimatorSpec::IsakiRatio),
            "reg" => {
                known(&["b"])?;
                if opt {
                    SpecRequest::RegressionOpt
                } else {
                    SpecRequest::Concrete(EstimatorSpec::Regression { b: require("b")? })
                }
            }
            "kc" => {
                let i = bare
                    .ok_or_else(|| bad("expected an index, e.g. kc:1"))?
                    .parse::<u8>()
                    .map_err(|_| bad("expected an index, e.g. kc:1"))?;
                let spec = EstimatorSpec::KadilarCingi { i };
                spec.validate()?;
                SpecRequest::Concrete(spec)
            }
            "kcc" => {
                known(&["alpha1", "tau"])?;
                if opt {
                    SpecRequest::KcCombinedOpt
                } else {
                    let alpha1 = require("alpha1")?;
                    match get("tau") {
                        Some(tau) => {
                            SpecRequest::Concrete(EstimatorSpec::KcCombined { alpha1, tau })
                        }
                        None => SpecRequest::KcCombinedAt { alpha1 },
                    }
                }
            }
            "gs" => {
                known(&["alpha", "d1", "d2"])?;
                let alpha = require("alpha")?;
                if opt {
                    SpecRequest::GuptaShabbirOpt { alpha }
                } else {
                    SpecRequest::Concrete(EstimatorSpec::GuptaShabbir {
                        alpha,
                        d1: require("d1")?,
                        d2: require("d2")?,
                    })
                }
            }
            "t" => {
                known(&["m", "w", "c", "d", "w1", "w2"])?;
                let (m, w, c, d) = (require("m")?, require("w")?, require("c")?, require("d")?);
                if c == d {
                    return Err(bad("c and d must differ"));
                }
                if opt {
                    SpecRequest::TClassOpt { m, w, c, d }
                } else {
                    let spec = EstimatorSpec::TClass(TClassSpec {
                        m,
                        w,
                        c,
                        d,
                        w1: require("w1")?,
                        w2: require("w2")?,
                    });
                    spec.validate()?;
                    SpecRequest::Concrete(spec)
                }
            }
            other => return Err(bad(&format!("unknown estimator family `{other}`"))),
        };
        if bare.is_some() && family != "kc" {
            return Err(bad("unexpected bare token"));
        }
        Ok(request)
    }

    /// Text form of the request itself (before any optimal weights have
    /// been filled in).
    pub fn canonical(&self) -> String {
        match self {
            SpecRequest::Concrete(spec) => spec.canonical(),
            SpecRequest::RegressionOpt => "reg:opt".into(),
            SpecRequest::KcCombinedOpt => "kcc:opt".into(),
            SpecRequest::KcCombinedAt { alpha1 } => format!("kcc:alpha1={alpha1}"),
            SpecRequest::GuptaShabbirOpt { alpha } => format!("gs:alpha={alpha},opt"),
            SpecRequest::TClassOpt { m, w, c, d } => {
                format!("t:m={m},w={w},c={c},d={d},opt")
            }
        }
    }

    /// Fills in any requested optimal weights from the closed-form
    /// minimizers for `(params, theta)`, returning a concrete spec.
    /// `variant` selects the coefficient set used for the power-class
    /// optimum.
    pub fn resolve(
        &self,
        params: &PopulationParams,
        theta: f64,
        variant: MseFormulaVariant,
    ) -> Result<EstimatorSpec> {
        match self {
            SpecRequest::Concrete(spec) => {
                spec.validate()?;
                Ok(spec.clone())
            }
            SpecRequest::RegressionOpt => Ok(EstimatorSpec::Regression {
                b: mse::regression_b_opt(params)?,
            }),
            SpecRequest::KcCombinedOpt => {
                let (alpha1, _) = mse::kc_alpha_opt(params, theta)?;
                Ok(EstimatorSpec::KcCombined {
                    alpha1,
                    tau: mse::tau(params, theta),
                })
            }
            SpecRequest::KcCombinedAt { alpha1 } => Ok(EstimatorSpec::KcCombined {
                alpha1: *alpha1,
                tau: mse::tau(params, theta),
            }),
            SpecRequest::GuptaShabbirOpt { alpha } => {
                let opt = mse::gs_optimal(params, theta, *alpha)?;
                Ok(EstimatorSpec::GuptaShabbir {
                    alpha: *alpha,
                    d1: opt.d1,
                    d2: opt.d2,
                })
            }
            SpecRequest::TClassOpt { m, w, c, d } => {
                let report = mse::t_optimal(params, theta, *m, *w, *c, *d, variant)?;
                Ok(report.spec)
            }
        }
    }
}

impl core::str::FromStr for SpecRequest {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SpecRequest::parse(s)
    }
}

impl core::fmt::Display for SpecRequest {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(&self.canonical())
    }
}

/// The default comparison roster: the usual estimator, the ratio
/// estimator, the four shifted-ratio forms, the optimal weighted
/// combination, the optimal regression, the Gupta–Shabbir class at
/// `alpha` in {0, 1, −1}, and the power class at `m` in {−1, 0, 1} with
/// `(c, d, w) = (2, 1, 1)`.
pub fn default_roster() -> Vec<SpecRequest> {
    let mut roster = alloc::vec![
        SpecRequest::Concrete(EstimatorSpec::Usual),
        SpecRequest::Concrete(EstimatorSpec::IsakiRatio),
    ];
    for i in 1..=4 {
        roster.push(SpecRequest::Concrete(EstimatorSpec::KadilarCingi { i }));
    }
    roster.push(SpecRequest::KcCombinedOpt);
    roster.push(SpecRequest::RegressionOpt);
    for alpha in [0.0, 1.0, -1.0] {
        roster.push(SpecRequest::GuptaShabbirOpt { alpha });
    }
    for m in [-1.0, 0.0, 1.0] {
        roster.push(SpecRequest::TClassOpt {
            m,
            w: 1.0,
            c: 2.0,
            d: 1.0,
        });
    }
    roster
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::Sample;
    use crate::testutil::{apple, tiny};
    use alloc::vec;
    use approx::assert_relative_eq;

    fn tiny_pair_stats() -> (SampleStats, PopulationParams) {
        let pop = tiny();
        let params = pop.derive_params().unwrap();
        let sample = Sample::from_indices(&pop, vec![0, 1]).unwrap();
        (sample.stats(Some(&params)), params)
    }

    #[test]
    fn usual_returns_sample_variance() {
        let (stats, params) = tiny_pair_stats();
        assert_eq!(usual(&stats), 0.5);
        assert_eq!(
            evaluate(&EstimatorSpec::Usual, &stats, &params).unwrap(),
            stats.sy2
        );
    }

    #[test]
    fn ratio_estimator_values() {
        let (stats, params) = tiny_pair_stats();
        // proportional data: 0.5 * 4 / 2 = 1, the true S_y^2
        assert_relative_eq!(
            isaki_ratio(&stats, &params).unwrap(),
            1.0,
            max_relative = 1e-15
        );

        // sx2 = Sx2 reduces to the usual estimator
        let at_pop = SampleStats { sx2: params.sx2, ..stats };
        assert_eq!(isaki_ratio(&at_pop, &params).unwrap(), at_pop.sy2);

        let degenerate = SampleStats { sx2: 0.0, ..stats };
        assert!(matches!(
            isaki_ratio(&degenerate, &params),
            Err(Error::DegenerateSample(_))
        ));
    }

    #[test]
    fn regression_estimator_values() {
        let (stats, params) = tiny_pair_stats();
        assert_relative_eq!(
            regression(&stats, &params, 0.25),
            1.0,
            max_relative = 1e-15
        );
        assert_eq!(regression(&stats, &params, 0.0), stats.sy2);
        let at_pop = SampleStats { sx2: params.sx2, ..stats };
        assert_eq!(regression(&at_pop, &params, 123.0), at_pop.sy2);
    }

    #[test]
    fn kadilar_cingi_reduces_to_usual_at_population_value() {
        let (stats, params) = tiny_pair_stats();
        let at_pop = SampleStats { sx2: params.sx2, ..stats };
        for i in 1..=4 {
            assert_relative_eq!(
                kadilar_cingi(&at_pop, &params, i).unwrap(),
                at_pop.sy2,
                max_relative = 1e-15
            );
        }
    }

    #[test]
    fn kadilar_cingi_shift_is_negligible_for_large_aux_variance() {
        let params = apple();
        let stats = SampleStats {
            n: 20,
            ybar: 0.0,
            xbar: 0.0,
            sy2: 130.0,
            sx2: 0.9 * params.sx2,
            e0: None,
            e1: None,
        };
        let est = kadilar_cingi(&stats, &params, 1).unwrap();
        assert_relative_eq!(est, 144.444444, max_relative = 1e-6);
    }

    #[test]
    fn kadilar_cingi_index_out_of_range_rejected() {
        let (stats, params) = tiny_pair_stats();
        assert!(matches!(
            kadilar_cingi(&stats, &params, 5),
            Err(Error::InvalidSpec(_))
        ));
        assert!(EstimatorSpec::KadilarCingi { i: 5 }.validate().is_err());
        assert!(SpecRequest::parse("kc:5").is_err());
    }

    #[test]
    fn kc_combined_values() {
        let (stats, params) = tiny_pair_stats();
        assert_eq!(kc_combined(&stats, &params, 1.0, 0.7).unwrap(), stats.sy2);
        assert_relative_eq!(
            kc_combined(&stats, &params, 0.0, 1.0).unwrap(),
            isaki_ratio(&stats, &params).unwrap(),
            max_relative = 1e-15
        );
        assert_relative_eq!(
            kc_combined(&stats, &params, 0.5, 1.0).unwrap(),
            0.75,
            max_relative = 1e-15
        );
    }

    #[test]
    fn gupta_shabbir_values() {
        let (stats, params) = tiny_pair_stats();
        // alpha = 0 and pure d1 leaves the bracket at 1
        assert_eq!(
            gupta_shabbir(&stats, &params, 0.0, 1.0, 0.0).unwrap(),
            stats.sy2
        );
        // both factors collapse at sx2 = Sx2
        let at_pop = SampleStats { sx2: params.sx2, ..stats };
        assert_relative_eq!(
            gupta_shabbir(&at_pop, &params, 1.0, 1.0, 7.0).unwrap(),
            at_pop.sy2,
            max_relative = 1e-15
        );
        assert_relative_eq!(
            gupta_shabbir(&stats, &params, 1.0, 1.0, 0.25).unwrap(),
            1.5,
            max_relative = 1e-15
        );
        let degenerate = SampleStats { sx2: 0.0, ..stats };
        assert!(matches!(
            gupta_shabbir(&degenerate, &params, 0.5, 1.0, 0.0),
            Err(Error::DegenerateSample(_))
        ));
    }

    #[test]
    fn t_class_values() {
        let (stats, params) = tiny_pair_stats();
        let mut spec = TClassSpec {
            m: 0.0,
            w: 1.0,
            c: 2.0,
            d: 1.0,
            w1: 1.0,
            w2: 0.0,
        };
        // m = 0 makes the first bracket 1
        assert_eq!(t_class(&stats, &params, &spec).unwrap(), stats.sy2);

        spec.w1 = 0.0;
        spec.w2 = 1.0;
        assert_relative_eq!(
            t_class(&stats, &params, &spec).unwrap(),
            0.75,
            max_relative = 1e-15
        );

        // both brackets are 1 at sx2 = Sx2, for any m, w, c, d
        let at_pop = SampleStats { sx2: params.sx2, ..stats };
        let spec = TClassSpec {
            m: -1.5,
            w: 2.5,
            c: 3.0,
            d: 1.0,
            w1: 0.3,
            w2: 0.9,
        };
        assert_relative_eq!(
            t_class(&at_pop, &params, &spec).unwrap(),
            (0.3 + 0.9) * at_pop.sy2,
            max_relative = 1e-12
        );
    }

    #[test]
    fn t_class_domain_errors() {
        let (stats, params) = tiny_pair_stats();
        let equal_cd = TClassSpec {
            m: 1.0,
            w: 1.0,
            c: 2.0,
            d: 2.0,
            w1: 1.0,
            w2: 0.0,
        };
        assert!(matches!(
            t_class(&stats, &params, &equal_cd),
            Err(Error::InvalidSpec(_))
        ));

        // sx2 far above Sx2 drives the first base negative; a fractional
        // exponent must be a domain error, not a NaN
        let fractional = TClassSpec {
            m: 0.5,
            w: 1.0,
            c: 2.0,
            d: 1.0,
            w1: 1.0,
            w2: 0.0,
        };
        let extreme = SampleStats { sx2: 3.0 * params.sx2, ..stats };
        assert!(matches!(
            t_class(&extreme, &params, &fractional),
            Err(Error::NumericalDomain(_))
        ));
    }

    #[test]
    fn nested_reduction_through_dispatcher() {
        let (stats, params) = tiny_pair_stats();
        let t_as_usual = EstimatorSpec::TClass(TClassSpec {
            m: 0.0,
            w: 1.0,
            c: 2.0,
            d: 1.0,
            w1: 1.0,
            w2: 0.0,
        });
        assert_eq!(
            evaluate(&t_as_usual, &stats, &params).unwrap(),
            usual(&stats)
        );
        assert_relative_eq!(
            evaluate(&EstimatorSpec::IsakiRatio, &stats, &params).unwrap(),
            1.0,
            max_relative = 1e-15
        );
    }

    #[test]
    fn text_form_round_trips() {
        let cases = [
            "usual",
            "ratio",
            "reg:b=0.25",
            "kc:3",
            "kcc:alpha1=0.7,tau=0.99",
            "gs:alpha=-1,d1=0.5,d2=0.25",
            "t:m=-1,w=1,c=2,d=1,w1=1,w2=0",
        ];
        for text in cases {
            let req = SpecRequest::parse(text).unwrap();
            let spec = match &req {
                SpecRequest::Concrete(s) => s.clone(),
                other => panic!("expected concrete spec, got {other:?}"),
            };
            let reparsed = SpecRequest::parse(&spec.canonical()).unwrap();
            assert_eq!(reparsed, SpecRequest::Concrete(spec));
        }
    }

    #[test]
    fn opt_requests_parse() {
        assert_eq!(SpecRequest::parse("reg:opt").unwrap(), SpecRequest::RegressionOpt);
        assert_eq!(SpecRequest::parse("kcc:opt").unwrap(), SpecRequest::KcCombinedOpt);
        assert_eq!(
            SpecRequest::parse("gs:alpha=0,opt").unwrap(),
            SpecRequest::GuptaShabbirOpt { alpha: 0.0 }
        );
        assert_eq!(
            SpecRequest::parse("t:m=-1,w=1,c=2,d=1,opt").unwrap(),
            SpecRequest::TClassOpt { m: -1.0, w: 1.0, c: 2.0, d: 1.0 }
        );
        assert!(SpecRequest::parse("t:m=1,w=1,c=2,d=2,opt").is_err());
        assert!(SpecRequest::parse("nonsense").is_err());
        assert!(SpecRequest::parse("reg:b=abc").is_err());
        assert!(SpecRequest::parse("gs:alpha=0,bogus=1").is_err());
    }

    #[test]
    fn resolve_fills_optimal_weights() {
        let pop = tiny();
        let params = pop.derive_params().unwrap();
        let th = crate::population::theta(2, 3).unwrap();
        let spec = SpecRequest::RegressionOpt
            .resolve(&params, th, MseFormulaVariant::AsPrinted)
            .unwrap();
        match spec {
            EstimatorSpec::Regression { b } => {
                assert_relative_eq!(b, 0.25, max_relative = 1e-12)
            }
            other => panic!("unexpected spec {other:?}"),
        }
    }
}
