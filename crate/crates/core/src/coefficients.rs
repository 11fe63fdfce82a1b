//! Interaction coefficients `E_{ab}`, their Itô (normal-ordered) counterparts
//! `L_{ab}`, and the quantum Itô multiplication table.
//!
//! Indices `a, b` range over `{0, 1}`: `0` is the time (identity) leg and `1`
//! the field leg, so `E_{10}` is the emission coefficient, `E_{01}` the
//! absorption coefficient and `E_{11}` the scattering coefficient.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, I};

/// Tolerance on the Hermitian-family condition `E_{ab}^dagger = E_{ba}`.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Smallest admissible singular value of `1 + i kappa E11`.
pub const INVERTIBILITY_TOL: f64 = 1e-12;

type Quad = [[CMatrix; 2]; 2];

fn check_dims(d: usize, mats: &[&CMatrix]) -> Result<()> {
    for m in mats {
        if m.nrows() != d || m.ncols() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: if m.nrows() != d { m.nrows() } else { m.ncols() },
            });
        }
    }
    Ok(())
}

/// Interaction coefficients of `sum_{ab} E_{ab} (a^dagger)^a a^b`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientFamily {
    d: usize,
    e: Quad,
}

impl CoefficientFamily {
    pub fn new(e00: CMatrix, e01: CMatrix, e10: CMatrix, e11: CMatrix) -> Result<Self> {
        let d = e00.nrows();
        check_dims(d, &[&e00, &e01, &e10, &e11])?;
        let checks = [
            ("E00 = E00^dagger", linalg::hermitian_residual(&e00)),
            ("E11 = E11^dagger", linalg::hermitian_residual(&e11)),
            ("E01^dagger = E10", linalg::max_abs(&(e01.adjoint() - &e10))),
        ];
        for (identity, residual) in checks {
            if residual > HERMITIAN_TOL {
                return Err(Error::NonHermitian {
                    identity: identity.to_string(),
                    residual,
                });
            }
        }
        Ok(Self {
            d,
            e: [[e00, e01], [e10, e11]],
        })
    }

    /// Hamiltonian-only family: `E00 = h`, everything else zero.
    pub fn hamiltonian(h: CMatrix) -> Result<Self> {
        let d = h.nrows();
        Self::new(h, linalg::zeros(d), linalg::zeros(d), linalg::zeros(d))
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn e(&self, a: usize, b: usize) -> &CMatrix {
        &self.e[a][b]
    }

    /// `||kappa E11||` in the spectral norm.
    pub fn scattering_norm(&self, kappa: &DampingConstant) -> f64 {
        kappa.kappa.norm() * linalg::spectral_norm(&self.e[1][1])
    }

    /// `max_{ab} ||E_{ab}||`.
    pub fn max_norm(&self) -> f64 {
        self.e
            .iter()
            .flatten()
            .map(linalg::spectral_norm)
            .fold(0.0, f64::max)
    }
}

/// Complex damping constant `kappa` with `gamma = 2 Re kappa > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DampingConstant {
    kappa: Complex64,
}

impl DampingConstant {
    pub fn new(kappa: Complex64) -> Result<Self> {
        let gamma = 2.0 * kappa.re;
        if !(gamma > 0.0) || !kappa.im.is_finite() {
            return Err(Error::NonPositiveDamping { gamma });
        }
        Ok(Self { kappa })
    }

    pub fn kappa(&self) -> Complex64 {
        self.kappa
    }

    pub fn gamma(&self) -> f64 {
        2.0 * self.kappa.re
    }
}

/// Itô coefficients `L_{ab}` of `dU = L_{ab} U dLambda^{ab}`.
#[derive(Debug, Clone, PartialEq)]
pub struct ItoCoefficients {
    d: usize,
    l: Quad,
}

impl ItoCoefficients {
    pub fn new(l00: CMatrix, l01: CMatrix, l10: CMatrix, l11: CMatrix) -> Result<Self> {
        let d = l00.nrows();
        check_dims(d, &[&l00, &l01, &l10, &l11])?;
        Ok(Self {
            d,
            l: [[l00, l01], [l10, l11]],
        })
    }

    pub fn zero(d: usize) -> Self {
        Self {
            d,
            l: [
                [linalg::zeros(d), linalg::zeros(d)],
                [linalg::zeros(d), linalg::zeros(d)],
            ],
        }
    }

    /// `L00 = -i h`, other coefficients zero.
    pub fn hamiltonian(h: &CMatrix) -> Self {
        let mut out = Self::zero(h.nrows());
        out.l[0][0] = h * (-I);
        out
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn l(&self, a: usize, b: usize) -> &CMatrix {
        &self.l[a][b]
    }

    /// The family `L'_{ab} = L_{ba}^dagger`.
    pub fn adjoint_family(&self) -> Self {
        let l = &self.l;
        Self {
            d: self.d,
            l: [
                [l[0][0].adjoint(), l[1][0].adjoint()],
                [l[0][1].adjoint(), l[1][1].adjoint()],
            ],
        }
    }

    /// Generator `sum_{ab} (f^*)^a L_{ab} g^b` seen by coherent states with
    /// local amplitudes `f`, `g`.
    pub fn coherent_generator(&self, f: Complex64, g: Complex64) -> CMatrix {
        let fc = f.conj();
        &self.l[0][0] + &self.l[0][1] * g + &self.l[1][0] * fc + &self.l[1][1] * (fc * g)
    }

    pub fn max_abs_difference(&self, other: &Self) -> f64 {
        (0..2)
            .flat_map(|a| (0..2).map(move |b| (a, b)))
            .map(|(a, b)| linalg::max_abs(&(&self.l[a][b] - &other.l[a][b])))
            .fold(0.0, f64::max)
    }
}

/// `L_{ab} = -i E_{ab} - kappa E_{a1} (1 + i kappa E11)^{-1} E_{1b}`.
pub fn ito_coefficients(e: &CoefficientFamily, k: &DampingConstant) -> Result<ItoCoefficients> {
    let d = e.d;
    let kappa = k.kappa();
    let resolvent_arg = linalg::identity(d) + &e.e[1][1] * (I * kappa);
    let smallest = linalg::smallest_singular_value(&resolvent_arg);
    if d > 0 && smallest < INVERTIBILITY_TOL {
        return Err(Error::SingularScattering { smallest });
    }
    let inv = resolvent_arg
        .lu()
        .try_inverse()
        .ok_or(Error::SingularScattering { smallest })?;
    let l = [0, 1].map(|a| {
        [0, 1].map(|b| &e.e[a][b] * (-I) - (&e.e[a][1] * &inv * &e.e[1][b]) * kappa)
    });
    Ok(ItoCoefficients { d, l })
}

/// Geometric expansion of [`ito_coefficients`] truncated after `r_max`
/// scattering terms: `-i E_{ab} - kappa E_{a1} sum_{r<r_max} (-i kappa E11)^r E_{1b}`.
pub fn ito_coefficients_series(
    e: &CoefficientFamily,
    k: &DampingConstant,
    r_max: usize,
) -> Result<ItoCoefficients> {
    let norm = e.scattering_norm(k);
    if norm >= 1.0 {
        return Err(Error::SeriesDivergence { norm });
    }
    if r_max == 0 {
        return Err(Error::InvalidParameter("r_max must be positive".into()));
    }
    let d = e.d;
    let kappa = k.kappa();
    let step = &e.e[1][1] * (-I * kappa);
    let mut power = linalg::identity(d);
    let mut geometric = linalg::zeros(d);
    for _ in 0..r_max {
        geometric += &power;
        power = &power * &step;
    }
    let l = [0, 1].map(|a| {
        [0, 1].map(|b| &e.e[a][b] * (-I) - (&e.e[a][1] * &geometric * &e.e[1][b]) * kappa)
    });
    Ok(ItoCoefficients { d, l })
}

/// Constant `c` with `||L_series(r_max) - L|| <= c ||kappa E11||^{r_max}`.
pub fn series_error_constant(e: &CoefficientFamily, k: &DampingConstant) -> Result<f64> {
    let norm = e.scattering_norm(k);
    if norm >= 1.0 {
        return Err(Error::SeriesDivergence { norm });
    }
    let n01 = linalg::spectral_norm(&e.e[0][1]);
    let n11 = linalg::spectral_norm(&e.e[1][1]);
    let n10 = linalg::spectral_norm(&e.e[1][0]);
    let worst = [n01 * n10, n01 * n11, n11 * n10, n11 * n11]
        .into_iter()
        .fold(0.0, f64::max);
    Ok(k.kappa().norm() * worst / (1.0 - norm))
}

/// `max_{ab} || L_{ab} + L_{ba}^dagger + gamma L_{1a}^dagger L_{1b} ||`.
pub fn unitarity_residual(l: &ItoCoefficients, gamma: f64) -> f64 {
    let mut worst: f64 = 0.0;
    for a in 0..2 {
        for b in 0..2 {
            let r = &l.l[a][b] + l.l[b][a].adjoint() + (l.l[1][a].adjoint() * &l.l[1][b]) * Complex64::new(gamma, 0.0);
            worst = worst.max(linalg::spectral_norm(&r));
        }
    }
    worst
}

/// `X + x_{ab} dLambda^{ab}`: a process value together with its differential,
/// which is exactly what the quantum Itô product rule multiplies.
#[derive(Debug, Clone, PartialEq)]
pub struct ItoSymbol {
    pub constant: CMatrix,
    pub diff: [[CMatrix; 2]; 2],
}

impl ItoSymbol {
    pub fn zero(d: usize) -> Self {
        Self {
            constant: linalg::zeros(d),
            diff: [
                [linalg::zeros(d), linalg::zeros(d)],
                [linalg::zeros(d), linalg::zeros(d)],
            ],
        }
    }

    /// `m dLambda^{ab}`
    pub fn differential(a: usize, b: usize, m: CMatrix) -> Self {
        let mut s = Self::zero(m.nrows());
        s.diff[a][b] = m;
        s
    }

    pub fn dim(&self) -> usize {
        self.constant.nrows()
    }

    /// Conjugation: `(dLambda^{ab})^dagger = dLambda^{ba}`.
    pub fn adjoint(&self) -> Self {
        let x = &self.diff;
        Self {
            constant: self.constant.adjoint(),
            diff: [
                [x[0][0].adjoint(), x[1][0].adjoint()],
                [x[0][1].adjoint(), x[1][1].adjoint()],
            ],
        }
    }

    pub fn is_zero(&self) -> bool {
        self.max_abs_difference(&Self::zero(self.dim())) == 0.0
    }

    pub fn max_abs_difference(&self, other: &Self) -> f64 {
        let mut worst = linalg::max_abs(&(&self.constant - &other.constant));
        for a in 0..2 {
            for b in 0..2 {
                worst = worst.max(linalg::max_abs(&(&self.diff[a][b] - &other.diff[a][b])));
            }
        }
        worst
    }
}

/// Itô correction coefficients `x_{a1} y_{1b}`.
pub fn ito_correction(x: &ItoSymbol, y: &ItoSymbol) -> Result<[[CMatrix; 2]; 2]> {
    if x.dim() != y.dim() {
        return Err(Error::DimensionMismatch {
            expected: x.dim(),
            found: y.dim(),
        });
    }
    Ok([0, 1].map(|a| [0, 1].map(|b| &x.diff[a][1] * &y.diff[1][b])))
}

/// Product in the algebra generated by the identity and the four
/// differentials, with `dLambda^{a1} dLambda^{1b} = dLambda^{ab}` and every
/// other product of differentials zero. Coefficients multiply as `x` then `y`.
pub fn ito_multiply(x: &ItoSymbol, y: &ItoSymbol) -> Result<ItoSymbol> {
    let correction = ito_correction(x, y)?;
    let constant = &x.constant * &y.constant;
    let diff = [0, 1].map(|a| {
        [0, 1].map(|b| {
            &x.constant * &y.diff[a][b] + &x.diff[a][b] * &y.constant + &correction[a][b]
        })
    });
    Ok(ItoSymbol { constant, diff })
}

/// Row-major complex matrix in JSON form: `[[[re, im], ...], ...]`.
pub type JsonMatrix = Vec<Vec<[f64; 2]>>;

pub fn matrix_to_json(m: &CMatrix) -> JsonMatrix {
    (0..m.nrows())
        .map(|r| {
            (0..m.ncols())
                .map(|c| [linalg::round_sig(m[(r, c)].re), linalg::round_sig(m[(r, c)].im)])
                .collect()
        })
        .collect()
}

pub fn matrix_from_json(rows: &JsonMatrix, d: usize, name: &str) -> Result<CMatrix> {
    if rows.len() != d || rows.iter().any(|r| r.len() != d) {
        return Err(Error::InvalidParameter(format!(
            "matrix {name} must be {d}x{d}"
        )));
    }
    if rows.iter().flatten().flatten().any(|x| !x.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "matrix {name} has non-finite entries"
        )));
    }
    Ok(CMatrix::from_fn(d, d, |r, c| {
        Complex64::new(rows[r][c][0], rows[r][c][1])
    }))
}

/// JSON document describing a coefficient family and its damping constant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyDocument {
    pub d: usize,
    pub kappa: [f64; 2],
    #[serde(rename = "E00")]
    pub e00: JsonMatrix,
    #[serde(rename = "E01")]
    pub e01: JsonMatrix,
    #[serde(rename = "E10")]
    pub e10: JsonMatrix,
    #[serde(rename = "E11")]
    pub e11: JsonMatrix,
}

impl FamilyDocument {
    pub fn from_family(e: &CoefficientFamily, k: &DampingConstant) -> Self {
        Self {
            d: e.d,
            kappa: [linalg::round_sig(k.kappa.re), linalg::round_sig(k.kappa.im)],
            e00: matrix_to_json(&e.e[0][0]),
            e01: matrix_to_json(&e.e[0][1]),
            e10: matrix_to_json(&e.e[1][0]),
            e11: matrix_to_json(&e.e[1][1]),
        }
    }

    pub fn to_family(&self) -> Result<(CoefficientFamily, DampingConstant)> {
        let d = self.d;
        if d == 0 {
            return Err(Error::InvalidParameter("dimension d must be positive".into()));
        }
        let family = CoefficientFamily::new(
            matrix_from_json(&self.e00, d, "E00")?,
            matrix_from_json(&self.e01, d, "E01")?,
            matrix_from_json(&self.e10, d, "E10")?,
            matrix_from_json(&self.e11, d, "E11")?,
        )?;
        let kappa = DampingConstant::new(Complex64::new(self.kappa[0], self.kappa[1]))?;
        Ok((family, kappa))
    }
}

/// Output document: the input family, its Itô coefficients and diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ItoDocument {
    #[serde(flatten)]
    pub family: FamilyDocument,
    #[serde(rename = "L00")]
    pub l00: JsonMatrix,
    #[serde(rename = "L01")]
    pub l01: JsonMatrix,
    #[serde(rename = "L10")]
    pub l10: JsonMatrix,
    #[serde(rename = "L11")]
    pub l11: JsonMatrix,
    pub unitarity_residual: f64,
    #[serde(rename = "norm_kappa_E11")]
    pub norm_kappa_e11: f64,
    /// Set when `||kappa E11|| >= 1`; the closed form still evaluates but the
    /// scattering series behind it diverges.
    pub norm_condition_violated: bool,
}

impl ItoDocument {
    pub fn build(e: &CoefficientFamily, k: &DampingConstant) -> Result<Self> {
        let l = ito_coefficients(e, k)?;
        let norm = e.scattering_norm(k);
        Ok(Self {
            family: FamilyDocument::from_family(e, k),
            l00: matrix_to_json(&l.l[0][0]),
            l01: matrix_to_json(&l.l[0][1]),
            l10: matrix_to_json(&l.l[1][0]),
            l11: matrix_to_json(&l.l[1][1]),
            unitarity_residual: linalg::round_sig(unitarity_residual(&l, k.gamma())),
            norm_kappa_e11: linalg::round_sig(norm),
            norm_condition_violated: norm >= 1.0,
        })
    }

    pub fn coefficients(&self) -> Result<ItoCoefficients> {
        let d = self.family.d;
        ItoCoefficients::new(
            matrix_from_json(&self.l00, d, "L00")?,
            matrix_from_json(&self.l01, d, "L01")?,
            matrix_from_json(&self.l10, d, "L10")?,
            matrix_from_json(&self.l11, d, "L11")?,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn scalar(x: Complex64) -> CMatrix {
        CMatrix::from_element(1, 1, x)
    }

    fn random_matrix(rng: &mut ChaCha8Rng, d: usize) -> CMatrix {
        CMatrix::from_fn(d, d, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
    }

    fn random_hermitian(rng: &mut ChaCha8Rng, d: usize) -> CMatrix {
        let m = random_matrix(rng, d);
        (&m + m.adjoint()) * c(0.5, 0.0)
    }

    fn random_family(rng: &mut ChaCha8Rng, d: usize, kappa: Complex64, target: f64) -> CoefficientFamily {
        let e01 = random_matrix(rng, d);
        let mut e11 = random_hermitian(rng, d);
        let scale = target / (kappa.norm() * linalg::spectral_norm(&e11));
        e11 *= c(scale, 0.0);
        CoefficientFamily::new(random_hermitian(rng, d), e01.clone(), e01.adjoint(), e11).unwrap()
    }

    fn example_family() -> (CoefficientFamily, DampingConstant) {
        let one = scalar(c(1.0, 0.0));
        let zero = scalar(c(0.0, 0.0));
        (
            CoefficientFamily::new(zero.clone(), one.clone(), one, zero).unwrap(),
            DampingConstant::new(c(0.5, 0.0)).unwrap(),
        )
    }

    #[test]
    fn scalar_example_by_hand() {
        let (e, k) = example_family();
        let l = ito_coefficients(&e, &k).unwrap();
        assert!((l.l(0, 0)[(0, 0)] - c(-0.5, 0.0)).norm() < 1e-15);
        assert!((l.l(0, 1)[(0, 0)] - c(0.0, -1.0)).norm() < 1e-15);
        assert!((l.l(1, 0)[(0, 0)] - c(0.0, -1.0)).norm() < 1e-15);
        assert!(l.l(1, 1)[(0, 0)].norm() < 1e-15);
        assert!(unitarity_residual(&l, k.gamma()) < 1e-15);
    }

    #[test]
    fn no_scattering_collapses_inverse() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let e01 = random_matrix(&mut rng, 3);
        let e = CoefficientFamily::new(random_hermitian(&mut rng, 3), e01.clone(), e01.adjoint(), linalg::zeros(3)).unwrap();
        let k = DampingConstant::new(c(0.4, 0.3)).unwrap();
        let l = ito_coefficients(&e, &k).unwrap();
        for a in 0..2 {
            for b in 0..2 {
                let expected = e.e(a, b) * (-I) - (e.e(a, 1) * e.e(1, b)) * k.kappa();
                assert!(linalg::max_abs(&(l.l(a, b) - expected)) < 1e-14);
            }
        }
    }

    #[test]
    fn random_families_are_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let d = rng.gen_range(1..=4);
            let k = DampingConstant::new(c(rng.gen_range(0.05..1.5), rng.gen_range(-1.0..1.0))).unwrap();
            let target = rng.gen_range(0.0..0.9);
            let e = random_family(&mut rng, d, k.kappa(), target);
            let l = ito_coefficients(&e, &k).unwrap();
            assert!(unitarity_residual(&l, k.gamma()) < 1e-10);
        }
    }

    #[test]
    fn rejects_non_hermitian_and_bad_damping() {
        let a = scalar(c(1.0, 0.5));
        let z = scalar(c(0.0, 0.0));
        let err = CoefficientFamily::new(a, z.clone(), z.clone(), z.clone()).unwrap_err();
        assert!(matches!(err, Error::NonHermitian { ref identity, .. } if identity == "E00 = E00^dagger"));
        let err = CoefficientFamily::new(z.clone(), scalar(c(1.0, 0.0)), scalar(c(2.0, 0.0)), z.clone()).unwrap_err();
        assert!(matches!(err, Error::NonHermitian { ref identity, .. } if identity == "E01^dagger = E10"));
        assert!(DampingConstant::new(c(0.0, 1.0)).is_err());
        assert!(DampingConstant::new(c(-0.1, 0.0)).is_err());
        assert!(matches!(
            CoefficientFamily::new(z.clone(), z.clone(), z, linalg::zeros(2)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn singular_scattering_is_rejected() {
        // 1 + i kappa e = 0 with kappa = i, e = 1
        let z = scalar(c(0.0, 0.0));
        let e = CoefficientFamily::new(z.clone(), z.clone(), z, scalar(c(1.0, 0.0))).unwrap();
        let k = DampingConstant { kappa: c(1e-16, 1.0) };
        assert!(matches!(ito_coefficients(&e, &k), Err(Error::SingularScattering { .. })));
    }

    #[test]
    fn series_first_term_and_divergence() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let k = DampingConstant::new(c(0.5, 0.2)).unwrap();
        let e = random_family(&mut rng, 2, k.kappa(), 0.5);
        let l1 = ito_coefficients_series(&e, &k, 1).unwrap();
        for a in 0..2 {
            for b in 0..2 {
                let expected = e.e(a, b) * (-I) - (e.e(a, 1) * e.e(1, b)) * k.kappa();
                assert!(linalg::max_abs(&(l1.l(a, b) - expected)) < 1e-14);
            }
        }
        let closed = ito_coefficients(&e, &k).unwrap();
        let l40 = ito_coefficients_series(&e, &k, 40).unwrap();
        assert!(l40.max_abs_difference(&closed) < 1e-10);

        let big = random_family(&mut rng, 2, k.kappa(), 1.2);
        assert!(matches!(ito_coefficients_series(&big, &k, 5), Err(Error::SeriesDivergence { .. })));
        // closed form still evaluates past the series radius
        assert!(ito_coefficients(&big, &k).is_ok());
    }

    #[test]
    fn series_error_decays_geometrically() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let k = DampingConstant::new(c(0.7, -0.3)).unwrap();
        let e = random_family(&mut rng, 2, k.kappa(), 0.5);
        let closed = ito_coefficients(&e, &k).unwrap();
        let err = |r| ito_coefficients_series(&e, &k, r).unwrap().max_abs_difference(&closed);
        let ratio = err(12) / err(11);
        let norm = e.scattering_norm(&k);
        assert!(ratio <= norm * 1.05, "ratio {ratio} vs {norm}");
    }

    #[test]
    fn residual_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let h = random_hermitian(&mut rng, 3);
        let l = ItoCoefficients::hamiltonian(&h);
        assert!(unitarity_residual(&l, 0.7) < 1e-15);

        let (e, k) = example_family();
        let mut l = ito_coefficients(&e, &k).unwrap();
        l.l[0][1] += scalar(c(0.1, 0.0));
        assert!(unitarity_residual(&l, k.gamma()) >= 0.05);
    }

    #[test]
    fn ito_table_basics() {
        let one = linalg::identity(1);
        let m = |a, b| ItoSymbol::differential(a, b, one.clone());
        let p = ito_multiply(&m(0, 1), &m(1, 0)).unwrap();
        assert_eq!(p, m(0, 0));
        assert!(ito_multiply(&m(1, 0), &m(0, 1)).unwrap().is_zero());

        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a = random_matrix(&mut rng, 2);
        let b = random_matrix(&mut rng, 2);
        let p = ito_multiply(
            &ItoSymbol::differential(1, 1, a.clone()),
            &ItoSymbol::differential(1, 1, b.clone()),
        )
        .unwrap();
        assert!(p.max_abs_difference(&ItoSymbol::differential(1, 1, &a * &b)) < 1e-15);
    }

    #[test]
    fn corrections() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let x = ItoSymbol::differential(0, 0, random_matrix(&mut rng, 2));
        let y = ItoSymbol::differential(1, 1, random_matrix(&mut rng, 2));
        for row in ito_correction(&x, &y).unwrap() {
            for m in row {
                assert_eq!(linalg::max_abs(&m), 0.0);
            }
        }
        let x = ItoSymbol::differential(0, 1, linalg::identity(2));
        let y = ItoSymbol::differential(1, 0, linalg::identity(2));
        let corr = ito_correction(&x, &y).unwrap();
        assert_eq!(corr[0][0], linalg::identity(2));
        assert_eq!(linalg::max_abs(&corr[1][1]), 0.0);
        assert!(ito_correction(&x, &ItoSymbol::zero(3)).is_err());
        assert!(ito_multiply(&x, &ItoSymbol::zero(3)).is_err());
    }

    #[test]
    fn document_roundtrip() {
        let (e, k) = example_family();
        let doc = ItoDocument::build(&e, &k).unwrap();
        let text = serde_json::to_string(&doc).unwrap();
        let back: ItoDocument = serde_json::from_str(&text).unwrap();
        assert_eq!(back, doc);
        assert_eq!(back.l00, vec![vec![[-0.5, 0.0]]]);
        let l = back.coefficients().unwrap();
        assert!((l.l(0, 1)[(0, 0)] - c(0.0, -1.0)).norm() < 1e-15);
        let family_text = serde_json::to_string(&doc.family).unwrap();
        let fam: FamilyDocument = serde_json::from_str(&family_text).unwrap();
        assert!(fam.to_family().is_ok());
        assert!(serde_json::from_str::<FamilyDocument>(&family_text.replace("\"d\"", "\"dim\"")).is_err());
    }
}
