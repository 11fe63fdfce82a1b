#![allow(dead_code)]

use num_complex::Complex64;
use qsc_core::coefficients::{CoefficientFamily, DampingConstant};
use qsc_core::dyson::StepFunction;
use qsc_core::linalg::{self, CMatrix};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub use rand::SeedableRng;
pub type TestRng = ChaCha8Rng;

pub fn rng(seed: u64) -> TestRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn complex(rng: &mut TestRng, scale: f64) -> Complex64 {
    Complex64::new(rng.gen_range(-scale..scale), rng.gen_range(-scale..scale))
}

pub fn matrix(rng: &mut TestRng, d: usize, scale: f64) -> CMatrix {
    CMatrix::from_fn(d, d, |_, _| complex(rng, scale))
}

pub fn hermitian(rng: &mut TestRng, d: usize, scale: f64) -> CMatrix {
    let m = matrix(rng, d, scale);
    (&m + linalg::dagger(&m)) * Complex64::new(0.5, 0.0)
}

/// Random Hermitian family with `||kappa E11|| < max_scattering`.
pub fn family(rng: &mut TestRng, d: usize, max_scattering: f64) -> (CoefficientFamily, DampingConstant) {
    let kappa = Complex64::new(rng.gen_range(0.05..1.0), rng.gen_range(-1.0..1.0));
    let k = DampingConstant::new(kappa).unwrap();
    let e00 = hermitian(rng, d, 1.0);
    let e01 = matrix(rng, d, 0.7);
    let e10 = linalg::dagger(&e01);
    let mut e11 = hermitian(rng, d, 1.0);
    let target = rng.gen_range(0.0..max_scattering);
    let norm = linalg::spectral_norm(&e11) * kappa.norm();
    if norm > 0.0 {
        e11 *= Complex64::new(target / norm, 0.0);
    }
    (CoefficientFamily::new(e00, e01, e10, e11).unwrap(), k)
}

/// Step function on `[0, t]` with `pieces` equal pieces.
pub fn step_function(rng: &mut TestRng, t: f64, pieces: usize, scale: f64) -> StepFunction {
    let breakpoints = (0..=pieces).map(|k| t * k as f64 / pieces as f64).collect();
    let values = (0..pieces).map(|_| complex(rng, scale)).collect();
    StepFunction::new(breakpoints, values).unwrap()
}
