//! Shared fixtures for the integration and acceptance tests.
#![allow(dead_code)] // not every test target uses every helper

use std::path::PathBuf;
use std::process::Command;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use varest_core::BivariatePopulation;

pub fn data_file(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

/// The synthetic validation population: N = 10000, heavy-tailed study
/// variable (lognormal, kurtosis ratio near 4.8), light-tailed auxiliary
/// variable on a Gaussian copula, correlation near 0.8.
pub fn synth_population(seed: u64) -> BivariatePopulation {
    const SIZE: usize = 10_000;
    const SIGMA_Y: f64 = 0.3;
    const RHO: f64 = 0.85;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut y = Vec::with_capacity(SIZE);
    let mut x = Vec::with_capacity(SIZE);
    for _ in 0..SIZE {
        let z1: f64 = rng.sample(StandardNormal);
        let z2: f64 = rng.sample(StandardNormal);
        y.push(f64::exp(SIGMA_Y * z1));
        let w = RHO * z1 + (1.0 - RHO * RHO).sqrt() * z2;
        x.push(1.0 + normal_cdf(w));
    }
    BivariatePopulation::new(y, x).expect("synthetic population is valid")
}

fn normal_cdf(w: f64) -> f64 {
    0.5 * (1.0 + libm::erf(w / core::f64::consts::SQRT_2))
}

/// Small positive-valued population with correlated, strictly continuous
/// values (no sample can have a zero variance).
pub fn random_small_population(rng: &mut ChaCha8Rng, size: usize) -> BivariatePopulation {
    loop {
        let mut y = Vec::with_capacity(size);
        let mut x = Vec::with_capacity(size);
        let slope: f64 = rng.random_range(0.5..3.0);
        for _ in 0..size {
            let u: f64 = rng.random::<f64>();
            let yi = 1.0 + 9.0 * u * u;
            let noise: f64 = rng.random_range(0.25..2.5);
            y.push(yi);
            x.push(slope * yi + noise);
        }
        if let Ok(pop) = BivariatePopulation::new(y, x) {
            return pop;
        }
    }
}

pub fn write_population_csv(pop: &BivariatePopulation, path: &std::path::Path) {
    let mut out = String::from("y,x\n");
    for (yi, xi) in pop.y().iter().zip(pop.x()) {
        out.push_str(&format!("{yi},{xi}\n"));
    }
    std::fs::write(path, out).expect("fixture CSV written");
}

pub struct CliOutput {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn run_cli(args: &[&str]) -> CliOutput {
    run_cli_env(args, &[])
}

pub fn run_cli_env(args: &[&str], envs: &[(&str, &str)]) -> CliOutput {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_varest"));
    cmd.args(args);
    for (k, v) in envs {
        cmd.env(k, v);
    }
    let out = cmd.output().expect("varest binary runs");
    CliOutput {
        code: out.status.code().unwrap_or(-1),
        stdout: String::from_utf8(out.stdout).expect("utf8 stdout"),
        stderr: String::from_utf8(out.stderr).expect("utf8 stderr"),
    }
}
