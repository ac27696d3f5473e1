//! Shared fixtures for unit tests.

use alloc::vec;

use crate::population::{BivariatePopulation, PopulationParams};

/// Three-point population with exactly proportional variables (x = 2y).
pub(crate) fn tiny() -> BivariatePopulation {
    BivariatePopulation::new(vec![1.0, 2.0, 3.0], vec![2.0, 4.0, 6.0]).unwrap()
}

/// Parameters of the 104-village apple-orchard population (level of apple
/// production vs. number of apple trees), a standard benchmark data set in
/// the variance-estimation literature. Only summary parameters are
/// published, not the raw data.
pub(crate) fn apple() -> PopulationParams {
    let s_y = 11.669964_f64;
    let s_x = 23029.072_f64;
    PopulationParams {
        population_size: 104,
        ybar: s_y / 1.866,
        xbar: s_x / 1.653,
        sy2: s_y * s_y,
        sx2: s_x * s_x,
        cy: 1.866,
        cx: 1.653,
        rho_yx: 0.865,
        cyx: 2.668,
        beta2y: 16.523,
        beta2x: 17.516,
        lambda22: 14.398,
    }
    .checked()
    .unwrap()
}

/// Design factor for the benchmark design n = 20 out of N = 104.
pub(crate) fn apple_theta() -> f64 {
    crate::population::theta(20, 104).unwrap()
}
