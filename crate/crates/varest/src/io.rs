//! Loading populations from CSV and parameter sets from JSON, plus the
//! round-trippable JSON dump of a parameter set.
//!
//! CSV input: UTF-8, LF or CRLF line endings, header `y,x`, plain
//! decimal-point numbers, no thousands separators.
//!
//! Parameter file: a JSON object with keys `N`, `S_y` (or `S_y2`), `S_x`
//! (or `S_x2`), `C_y`, `C_x`, `rho_yx`, `beta2_y`, `beta2_x`, `lambda22`,
//! and optionally `C_yx` and `n`. When `C_yx` is absent it is computed as
//! `rho_yx * C_y * C_x`; when a standard deviation and a variance are
//! both given they must agree to 1e-9 relative.

use std::fs;
use std::path::Path;

use serde::Deserialize;
use serde_json::json;

use varest_core::{BivariatePopulation, PopulationParams};

use crate::{Error, Result};

fn read_file(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| {
        if e.kind() == std::io::ErrorKind::NotFound {
            Error::MissingFile(path.to_path_buf())
        } else {
            Error::Io {
                path: path.to_path_buf(),
                source: e,
            }
        }
    })
}

/// Loads a `y,x` CSV file into a population. Row numbers in errors are
/// 1-based file lines (the header is line 1).
pub fn load_csv(path: &Path) -> Result<BivariatePopulation> {
    let text = read_file(path)?;
    let malformed = |line: usize| Error::MalformedRow {
        path: path.to_path_buf(),
        line,
    };

    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header.trim_start_matches('\u{feff}').trim() == "y,x" => {}
        _ => return Err(malformed(1)),
    }

    let mut y = Vec::new();
    let mut x = Vec::new();
    for (idx, line) in lines {
        let line_no = idx + 1;
        let mut fields = line.trim().split(',');
        let (Some(ys), Some(xs), None) = (fields.next(), fields.next(), fields.next()) else {
            return Err(malformed(line_no));
        };
        y.push(ys.trim().parse::<f64>().map_err(|_| malformed(line_no))?);
        x.push(xs.trim().parse::<f64>().map_err(|_| malformed(line_no))?);
    }
    Ok(BivariatePopulation::new(y, x)?)
}

/// A parameter file: the population parameters plus the sample size the
/// file carries, when it carries one.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadedParams {
    pub params: PopulationParams,
    pub n: Option<usize>,
}

#[derive(Deserialize)]
struct RawParams {
    #[serde(rename = "N")]
    population_size: Option<usize>,
    n: Option<usize>,
    #[serde(rename = "S_y")]
    s_y: Option<f64>,
    #[serde(rename = "S_y2")]
    s_y2: Option<f64>,
    #[serde(rename = "S_x")]
    s_x: Option<f64>,
    #[serde(rename = "S_x2")]
    s_x2: Option<f64>,
    #[serde(rename = "C_y")]
    c_y: Option<f64>,
    #[serde(rename = "C_x")]
    c_x: Option<f64>,
    rho_yx: Option<f64>,
    #[serde(rename = "C_yx")]
    c_yx: Option<f64>,
    beta2_y: Option<f64>,
    beta2_x: Option<f64>,
    lambda22: Option<f64>,
}

/// Picks the variance out of an optional standard deviation and an
/// optional variance, enforcing agreement when both are present.
fn variance_of(
    sd: Option<f64>,
    var: Option<f64>,
    sd_key: &'static str,
    path: &Path,
) -> Result<f64> {
    match (sd, var) {
        (Some(s), Some(v)) => {
            if (s * s - v).abs() > 1e-9 * v.abs() {
                Err(Error::Core(varest_core::Error::InvariantViolation(
                    format!("{sd_key} = {s} disagrees with its squared counterpart {v}"),
                )))
            } else {
                Ok(v)
            }
        }
        (Some(s), None) => Ok(s * s),
        (None, Some(v)) => Ok(v),
        (None, None) => Err(Error::MissingKey {
            path: path.to_path_buf(),
            key: sd_key,
        }),
    }
}

/// Loads a JSON parameter file, deriving whatever the file leaves
/// implicit (`C_yx`, the means behind the coefficients of variation).
pub fn load_params(path: &Path) -> Result<LoadedParams> {
    let text = read_file(path)?;
    let raw: RawParams = serde_json::from_str(&text).map_err(|e| Error::Json {
        path: path.to_path_buf(),
        source: e,
    })?;
    let missing = |key: &'static str| Error::MissingKey {
        path: path.to_path_buf(),
        key,
    };

    let population_size = raw.population_size.ok_or_else(|| missing("N"))?;
    let sy2 = variance_of(raw.s_y, raw.s_y2, "S_y", path)?;
    let sx2 = variance_of(raw.s_x, raw.s_x2, "S_x", path)?;
    let cy = raw.c_y.ok_or_else(|| missing("C_y"))?;
    let cx = raw.c_x.ok_or_else(|| missing("C_x"))?;
    let rho_yx = raw.rho_yx.ok_or_else(|| missing("rho_yx"))?;
    let beta2y = raw.beta2_y.ok_or_else(|| missing("beta2_y"))?;
    let beta2x = raw.beta2_x.ok_or_else(|| missing("beta2_x"))?;
    let lambda22 = raw.lambda22.ok_or_else(|| missing("lambda22"))?;
    let cyx = raw.c_yx.unwrap_or(rho_yx * cy * cx);

    let params = PopulationParams {
        population_size,
        ybar: sy2.sqrt() / cy,
        xbar: sx2.sqrt() / cx,
        sy2,
        sx2,
        cy,
        cx,
        rho_yx,
        cyx,
        beta2y,
        beta2x,
        lambda22,
    }
    .checked()?;
    Ok(LoadedParams {
        params,
        n: raw.n,
    })
}

/// JSON dump of a parameter set in the same schema [`load_params`]
/// accepts, at full double precision.
pub fn params_json(params: &PopulationParams, n: Option<usize>) -> serde_json::Value {
    let mut value = json!({
        "N": params.population_size,
        "S_y": params.sy2.sqrt(),
        "S_y2": params.sy2,
        "S_x": params.sx2.sqrt(),
        "S_x2": params.sx2,
        "C_y": params.cy,
        "C_x": params.cx,
        "rho_yx": params.rho_yx,
        "C_yx": params.cyx,
        "beta2_y": params.beta2y,
        "beta2_x": params.beta2x,
        "lambda22": params.lambda22,
    });
    if let Some(n) = n {
        value["n"] = json!(n);
    }
    value
}

/// `key,value` CSV dump of a parameter set, including the derived
/// excess-moment fields.
pub fn params_csv(params: &PopulationParams, n: Option<usize>, full_precision: bool) -> String {
    let fmt = crate::report::NumberFormat { full_precision };
    let mut out = String::from("key,value\n");
    out.push_str(&format!("N,{}\n", params.population_size));
    if let Some(n) = n {
        out.push_str(&format!("n,{n}\n"));
    }
    for (key, value) in [
        ("S_y", params.sy2.sqrt()),
        ("S_y2", params.sy2),
        ("S_x", params.sx2.sqrt()),
        ("S_x2", params.sx2),
        ("C_y", params.cy),
        ("C_x", params.cx),
        ("rho_yx", params.rho_yx),
        ("C_yx", params.cyx),
        ("beta2_y", params.beta2y),
        ("beta2_x", params.beta2x),
        ("lambda22", params.lambda22),
        ("beta2_y_star", params.beta2y_star()),
        ("beta2_x_star", params.beta2x_star()),
        ("lambda22_star", params.lambda22_star()),
        ("rho_star", params.rho_star()),
    ] {
        out.push_str(&format!("{key},{}\n", fmt.fmt(value)));
    }
    out
}
