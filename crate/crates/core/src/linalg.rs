//! Small dense complex matrix helpers shared by the coefficient and evolution
//! modules. Matrices here are at most a few dozen rows, so everything is
//! delegated to `nalgebra` dense routines.

use nalgebra::DMatrix;
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;

pub const I: Complex64 = Complex64::new(0.0, 1.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);

pub fn identity(d: usize) -> CMatrix {
    CMatrix::identity(d, d)
}

pub fn zeros(d: usize) -> CMatrix {
    CMatrix::zeros(d, d)
}

pub fn dagger(m: &CMatrix) -> CMatrix {
    m.adjoint()
}

/// Largest singular value.
pub fn spectral_norm(m: &CMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.singular_values().max()
}

/// Smallest singular value.
pub fn smallest_singular_value(m: &CMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.singular_values().min()
}

/// Largest entry modulus.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Matrix exponential by scaling and squaring with a Padé approximant.
pub fn expm(m: &CMatrix) -> CMatrix {
    m.clone().exp()
}

/// Exponential of `i t H` for Hermitian `H`, through its eigendecomposition.
pub fn expm_hermitian(h: &CMatrix, t: f64) -> CMatrix {
    let eig = h.clone().symmetric_eigen();
    let u = &eig.eigenvectors;
    let phases = CMatrix::from_diagonal(&eig.eigenvalues.map(|ev| (I * t * ev).exp()));
    u * phases * u.adjoint()
}

/// Deviation from Hermiticity, `max |m - m^dagger|`.
pub fn hermitian_residual(m: &CMatrix) -> f64 {
    max_abs(&(m - m.adjoint()))
}

/// Rounds to twelve significant digits; all reported floats go through here.
pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

/// Twelve-significant-digit text form used by every table and report.
pub fn fmt_sig(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    let r = round_sig(x);
    let a = r.abs();
    if r == 0.0 || (1e-5..1e12).contains(&a) {
        format!("{r}")
    } else {
        format!("{r:e}")
    }
}
