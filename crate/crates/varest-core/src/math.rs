//! Small numeric helpers shared across the crate. All transcendental
//! functions go through `libm` so results do not depend on the host's
//! `std` math library.

use alloc::vec::Vec;

pub(crate) fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

pub(crate) fn powf(base: f64, exp: f64) -> f64 {
    libm::pow(base, exp)
}

/// Integer power by binary exponentiation (exact operation count,
/// deterministic across platforms).
pub(crate) fn powu(x: f64, mut n: u32) -> f64 {
    let mut base = x;
    let mut acc = 1.0;
    while n > 0 {
        if n & 1 == 1 {
            acc *= base;
        }
        base *= base;
        n >>= 1;
    }
    acc
}

pub(crate) fn is_integer(x: f64) -> bool {
    x.is_finite() && x == libm::trunc(x)
}

/// Pairwise (cascade) summation over a slice: O(log n) rounding depth and
/// a fixed association order, so sums are reproducible for a given input
/// order regardless of how the input was produced.
pub(crate) fn pairwise_sum(xs: &[f64]) -> f64 {
    const BASE: usize = 32;
    if xs.len() <= BASE {
        let mut s = 0.0;
        for &x in xs {
            s += x;
        }
        return s;
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

/// Streaming pairwise accumulator for sums too long to buffer whole.
/// Values are folded into fixed-size blocks; block sums are combined
/// pairwise at the end. The reduction tree depends only on the number of
/// pushes, never on timing or thread count.
pub(crate) struct PairwiseAccumulator {
    block: [f64; Self::BLOCK],
    fill: usize,
    block_sums: Vec<f64>,
}

impl PairwiseAccumulator {
    const BLOCK: usize = 1024;

    pub(crate) fn new() -> Self {
        PairwiseAccumulator {
            block: [0.0; Self::BLOCK],
            fill: 0,
            block_sums: Vec::new(),
        }
    }

    pub(crate) fn push(&mut self, x: f64) {
        self.block[self.fill] = x;
        self.fill += 1;
        if self.fill == Self::BLOCK {
            let s = pairwise_sum(&self.block);
            self.block_sums.push(s);
            self.fill = 0;
        }
    }

    pub(crate) fn sum(&self) -> f64 {
        pairwise_sum(&self.block_sums) + pairwise_sum(&self.block[..self.fill])
    }
}

/// C(n, k), saturating at `u128::MAX` on overflow. Each intermediate
/// `c * (n-k+i) / i` is itself a binomial coefficient, so the division is
/// exact.
pub(crate) fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut c: u128 = 1;
    for i in 1..=k {
        let factor = (n - k + i) as u128;
        c = match c.checked_mul(factor) {
            Some(v) => v / i as u128,
            None => return u128::MAX,
        };
    }
    c
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomial_values() {
        assert_eq!(binomial(3, 2), 3);
        assert_eq!(binomial(3, 3), 1);
        assert_eq!(binomial(30, 15), 155_117_520);
        assert_eq!(binomial(5, 9), 0);
        assert_eq!(binomial(200, 100), u128::MAX); // saturates
    }

    #[test]
    fn pairwise_matches_naive_on_small_input() {
        let xs: Vec<f64> = (0..1000).map(|i| 1.0 / (i as f64 + 1.0)).collect();
        let naive: f64 = xs.iter().sum();
        assert!((pairwise_sum(&xs) - naive).abs() < 1e-12);

        let mut acc = PairwiseAccumulator::new();
        for &x in &xs {
            acc.push(x);
        }
        assert!((acc.sum() - naive).abs() < 1e-12);
    }

    #[test]
    fn accumulator_crosses_block_boundary() {
        let mut acc = PairwiseAccumulator::new();
        for _ in 0..(3 * 1024 + 17) {
            acc.push(0.5);
        }
        assert_eq!(acc.sum(), 0.5 * (3.0 * 1024.0 + 17.0));
    }

    #[test]
    fn integer_powers() {
        assert_eq!(powu(2.0, 10), 1024.0);
        assert_eq!(powu(-1.5, 2), 2.25);
        assert_eq!(powu(7.0, 0), 1.0);
        assert!(is_integer(-3.0));
        assert!(!is_integer(0.5));
    }
}
