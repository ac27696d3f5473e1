//! Grid search over the power-class generator constants `(m, w, c, d)`
//! for minimum theoretical MSE, plus forensic recovery of parameter
//! choices behind a target MSE value.
//!
//! Grid search (rather than gradient descent) keeps every run exactly
//! reproducible and the objective is closed-form per point; a refinement
//! stage halves the step sizes around the best points.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::mse::{t_optimal, t_optimal_constrained, MseFormulaVariant, MseReport};
use crate::population::PopulationParams;

/// Number of top-ranked points refined per pass, and number of passes.
const REFINE_TOP_K: usize = 5;
const REFINE_PASSES: u32 = 2;

/// Ranges of generator constants to search. `cd` pairs with `c = d` are
/// filtered out pointwise.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchGrid {
    pub m: Vec<f64>,
    pub w: Vec<f64>,
    pub cd: Vec<(f64, f64)>,
}

impl SearchGrid {
    /// The default grid: `m, w ∈ {−2, −1, −0.5, 0, 0.5, 1, 2}` and the
    /// `(c, d)` pairs built from the auxiliary parameter shifts,
    /// `{(2,1), (β₂x, C_x), (C_x, β₂x), (1, β₂x), (1, C_x)}`.
    pub fn default_for(params: &PopulationParams) -> Self {
        let axis = alloc::vec![-2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0];
        SearchGrid {
            m: axis.clone(),
            w: axis,
            cd: alloc::vec![
                (2.0, 1.0),
                (params.beta2x, params.cx),
                (params.cx, params.beta2x),
                (1.0, params.beta2x),
                (1.0, params.cx),
            ],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Point {
    m: f64,
    w: f64,
    c: f64,
    d: f64,
}

impl Point {
    fn key(&self) -> (u64, u64, u64, u64) {
        (
            self.m.to_bits(),
            self.w.to_bits(),
            self.c.to_bits(),
            self.d.to_bits(),
        )
    }
}

fn grid_points(grid: &SearchGrid) -> Vec<Point> {
    let mut points = Vec::new();
    for &m in &grid.m {
        for &w in &grid.w {
            for &(c, d) in &grid.cd {
                if c != d {
                    points.push(Point { m, w, c, d });
                }
            }
        }
    }
    points
}

/// Smallest positive gap between sorted distinct axis values; `None` for
/// axes with fewer than two distinct values (nothing to refine).
fn axis_step(values: &[f64]) -> Option<f64> {
    let mut sorted: Vec<f64> = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    sorted.dedup();
    sorted
        .windows(2)
        .map(|w| w[1] - w[0])
        .filter(|&g| g > 0.0)
        .min_by(f64::total_cmp)
}

fn evaluate_points(
    params: &PopulationParams,
    theta: f64,
    points: &[Point],
    variant: MseFormulaVariant,
    constrained: bool,
) -> Vec<(Point, MseReport)> {
    let mut out = Vec::new();
    for &p in points {
        // singular points (e.g. theta = 0) carry no ranking information
        if let Ok(rep) = t_optimal(params, theta, p.m, p.w, p.c, p.d, variant) {
            out.push((p, rep));
        }
        if constrained {
            if let Ok(rep) =
                t_optimal_constrained(params, theta, p.m, p.w, p.c, p.d, variant)
            {
                out.push((p, rep));
            }
        }
    }
    out
}

fn rank(reports: &mut [(Point, MseReport)]) {
    reports.sort_by(|(_, a), (_, b)| {
        a.breakdown
            .cmp(&b.breakdown)
            .then(a.mse.total_cmp(&b.mse))
            .then_with(|| a.spec.canonical().cmp(&b.spec.canonical()))
    });
}

/// Searches the grid for the power-class parameterization with minimum
/// theoretical MSE. With `constrained` set, the `w₁ + w₂ = 1` restricted
/// optimum is evaluated alongside the unconstrained one at every point.
/// Returns all evaluated points ranked by MSE, breakdown-flagged points
/// strictly last.
pub fn minimize_t(
    params: &PopulationParams,
    theta: f64,
    grid: &SearchGrid,
    variant: MseFormulaVariant,
    constrained: bool,
) -> Result<Vec<MseReport>> {
    let points = grid_points(grid);
    if points.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let mut seen: BTreeSet<(u64, u64, u64, u64)> =
        points.iter().map(Point::key).collect();
    let mut evaluated = evaluate_points(params, theta, &points, variant, constrained);

    let m_step = axis_step(&grid.m);
    let w_step = axis_step(&grid.w);
    if m_step.is_some() || w_step.is_some() {
        for pass in 1..=REFINE_PASSES {
            rank(&mut evaluated);
            let scale = libm::pow(2.0, pass as f64);
            let mut fresh: Vec<Point> = Vec::new();
            for (seed, _) in evaluated.iter().take(REFINE_TOP_K) {
                let m_offsets = offsets(seed.m, m_step.map(|s| s / scale));
                let w_offsets = offsets(seed.w, w_step.map(|s| s / scale));
                for &m in &m_offsets {
                    for &w in &w_offsets {
                        let p = Point { m, w, c: seed.c, d: seed.d };
                        if seen.insert(p.key()) {
                            fresh.push(p);
                        }
                    }
                }
            }
            evaluated.extend(evaluate_points(params, theta, &fresh, variant, constrained));
        }
    }

    rank(&mut evaluated);
    Ok(evaluated.into_iter().map(|(_, rep)| rep).collect())
}

fn offsets(center: f64, step: Option<f64>) -> Vec<f64> {
    match step {
        Some(s) => alloc::vec![center - s, center, center + s],
        None => alloc::vec![center],
    }
}

/// Searches the grid (no refinement) for parameterizations whose
/// non-breakdown minimum MSE lies within `tolerance` (relative) of
/// `target_mse`. An empty list is a legitimate outcome.
pub fn recover(
    params: &PopulationParams,
    theta: f64,
    target_mse: f64,
    grid: &SearchGrid,
    variant: MseFormulaVariant,
    tolerance: f64,
) -> Result<Vec<MseReport>> {
    if target_mse <= 0.0 || !target_mse.is_finite() {
        return Err(Error::InvariantViolation(
            "recovery target must be a positive MSE".into(),
        ));
    }
    let points = grid_points(grid);
    if points.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let mut matches: Vec<(Point, MseReport)> =
        evaluate_points(params, theta, &points, variant, false)
            .into_iter()
            .filter(|(_, rep)| {
                !rep.breakdown && (rep.mse - target_mse).abs() <= tolerance * target_mse
            })
            .collect();
    matches.sort_by(|(_, a), (_, b)| {
        (a.mse - target_mse)
            .abs()
            .total_cmp(&(b.mse - target_mse).abs())
            .then_with(|| a.spec.canonical().cmp(&b.spec.canonical()))
    });
    Ok(matches.into_iter().map(|(_, rep)| rep).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimators::EstimatorSpec;
    use crate::mse::var_usual;
    use crate::testutil::{apple, apple_theta};
    use alloc::vec;

    #[test]
    fn grid_with_m_zero_contains_a_point_at_or_below_var_usual() {
        let params = apple();
        let th = apple_theta();
        let grid = SearchGrid {
            m: vec![0.0],
            w: vec![-1.0, 1.0],
            cd: vec![(2.0, 1.0)],
        };
        let ranked =
            minimize_t(&params, th, &grid, MseFormulaVariant::AsPrinted, false).unwrap();
        let best = ranked.iter().find(|r| !r.breakdown).expect("a valid point");
        assert!(best.mse <= var_usual(&params, th));
    }

    #[test]
    fn breakdown_points_rank_strictly_last() {
        let params = apple();
        let th = apple_theta();
        let grid = SearchGrid {
            m: vec![-1.0, 0.0, 1.0],
            w: vec![1.0],
            cd: vec![(2.0, 1.0)],
        };
        let ranked =
            minimize_t(&params, th, &grid, MseFormulaVariant::AsPrinted, false).unwrap();
        // the m = -1 point is the known negative-minimum breakdown
        assert!(ranked.iter().any(|r| r.breakdown));
        let first_breakdown = ranked.iter().position(|r| r.breakdown).unwrap();
        assert!(ranked[first_breakdown..].iter().all(|r| r.breakdown));
        assert!(ranked[..first_breakdown].iter().all(|r| !r.breakdown));
        let m_of = |rep: &MseReport| match &rep.spec {
            EstimatorSpec::TClass(t) => t.m,
            other => panic!("unexpected spec {other}"),
        };
        assert!(ranked[first_breakdown..].iter().any(|r| m_of(r) == -1.0));
    }

    #[test]
    fn degenerate_grid_is_empty() {
        let params = apple();
        let grid = SearchGrid {
            m: vec![0.0, 1.0],
            w: vec![1.0],
            cd: vec![(1.0, 1.0), (3.5, 3.5)],
        };
        assert!(matches!(
            minimize_t(&params, apple_theta(), &grid, MseFormulaVariant::AsPrinted, false),
            Err(Error::EmptyGrid)
        ));
    }

    #[test]
    fn refinement_never_worsens_the_best_valid_point() {
        let params = apple();
        let th = apple_theta();
        let grid = SearchGrid::default_for(&params);
        let coarse_best = {
            let points = grid_points(&grid);
            let mut evaluated = evaluate_points(
                &params,
                th,
                &points,
                MseFormulaVariant::AsPrinted,
                false,
            );
            rank(&mut evaluated);
            evaluated
                .iter()
                .find(|(_, r)| !r.breakdown)
                .map(|(_, r)| r.mse)
                .unwrap()
        };
        let refined =
            minimize_t(&params, th, &grid, MseFormulaVariant::AsPrinted, false).unwrap();
        let refined_best = refined.iter().find(|r| !r.breakdown).unwrap().mse;
        assert!(refined_best <= coarse_best);
    }

    #[test]
    fn constrained_rows_keep_weights_on_the_simplex() {
        let params = apple();
        let th = apple_theta();
        let grid = SearchGrid {
            m: vec![0.0],
            w: vec![-1.0],
            cd: vec![(2.0, 1.0)],
        };
        let ranked =
            minimize_t(&params, th, &grid, MseFormulaVariant::AsPrinted, true).unwrap();
        assert!(ranked.len() >= 2, "constrained search adds restricted rows");
        let on_simplex = ranked.iter().any(|r| match &r.spec {
            EstimatorSpec::TClass(t) => (t.w1 + t.w2 - 1.0).abs() < 1e-12,
            _ => false,
        });
        assert!(on_simplex);
    }

    #[test]
    fn recover_finds_exact_reduction_and_respects_tolerance() {
        let params = apple();
        let th = apple_theta();
        let grid = SearchGrid {
            m: vec![0.0],
            w: vec![-1.0, 1.0],
            cd: vec![(2.0, 1.0)],
        };
        // search for the optimum value of a point the grid contains
        // exactly (recover scans the raw grid, without refinement)
        let target =
            crate::mse::t_optimal(&params, th, 0.0, -1.0, 2.0, 1.0, MseFormulaVariant::AsPrinted)
                .unwrap()
                .mse;
        let hits = recover(&params, th, target, &grid, MseFormulaVariant::AsPrinted, 1e-9)
            .unwrap();
        assert!(!hits.is_empty());

        // zero tolerance with an off-grid irrational target finds nothing
        let none = recover(
            &params,
            th,
            core::f64::consts::PI,
            &grid,
            MseFormulaVariant::AsPrinted,
            0.0,
        )
        .unwrap();
        assert!(none.is_empty());

        assert!(recover(&params, th, -1.0, &grid, MseFormulaVariant::AsPrinted, 0.1).is_err());
        let empty = SearchGrid { m: vec![], w: vec![1.0], cd: vec![(2.0, 1.0)] };
        assert!(matches!(
            recover(&params, th, 100.0, &empty, MseFormulaVariant::AsPrinted, 0.1),
            Err(Error::EmptyGrid)
        ));
    }
}
