//! Single-mode oscillator vacuum statistics.
//!
//! `q = z a^dagger + z^* a` is Gaussian in the vacuum and `N = (a + z)^dagger (a + z)`
//! is Poissonian. Moments are computed two ways: as exact polynomials in
//! `|z|^2` from closed forms, and as weighted sums over the diagrams produced
//! by [`crate::partitions`]. A truncated Fock-space matrix model provides a
//! third, purely numerical route.

use num_bigint::BigUint;
use num_complex::Complex64;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};
use crate::partitions::{self, enumerate_pair_partitions, enumerate_set_partitions};

/// Complex amplitude `z` of the displaced observables.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Amplitude(pub Complex64);

impl Amplitude {
    pub fn new(re: f64, im: f64) -> Self {
        Self(Complex64::new(re, im))
    }

    pub fn real(x: f64) -> Self {
        Self(Complex64::new(x, 0.0))
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0.norm_sqr()
    }
}

/// Polynomial in `|z|^2` with non-negative integer coefficients;
/// `coeffs[m]` multiplies `|z|^{2m}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MomentPolynomial {
    pub coeffs: Vec<BigUint>,
}

impl MomentPolynomial {
    fn with_degree(degree: usize) -> Self {
        Self {
            coeffs: vec![BigUint::zero(); degree + 1],
        }
    }

    pub fn evaluate(&self, z: Amplitude) -> f64 {
        let x = z.norm_sqr();
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * x + c.to_f64().unwrap_or(f64::INFINITY))
    }
}

/// Largest moment order for `q`.
pub const MAX_Q_ORDER: usize = 16;
/// Largest moment order for `N`.
pub const MAX_N_ORDER: usize = 14;

fn double_factorial_odd(m: usize) -> BigUint {
    // (2m)! / (2^m m!) = (2m - 1)!!
    partitions::pair_partition_count(2 * m)
}

/// `<q^n>` as a polynomial, from the closed form.
pub fn moment_q_closed_form(n: usize) -> MomentPolynomial {
    let mut p = MomentPolynomial::with_degree(n / 2);
    if n % 2 == 0 {
        p.coeffs[n / 2] = double_factorial_odd(n / 2);
    }
    p
}

/// `<q^n>` as a polynomial, by summing `|z|^2` per contraction pair over all
/// pair diagrams.
pub fn moment_q_diagram_sum(n: usize) -> Result<MomentPolynomial> {
    if n > MAX_Q_ORDER {
        return Err(Error::EnumerationBound {
            n,
            max: MAX_Q_ORDER,
        });
    }
    let mut p = MomentPolynomial::with_degree(n / 2);
    for d in enumerate_pair_partitions(n)? {
        p.coeffs[d.edges().len()] += 1u32;
    }
    Ok(p)
}

/// Vacuum moment `<q^n>` evaluated at `z`.
pub fn moment_q(n: usize, z: Amplitude) -> Result<f64> {
    Ok(moment_q_diagram_sum(n)?.evaluate(z))
}

/// `<N^n>` from the Stirling closed form.
pub fn moment_n_closed_form(n: usize) -> MomentPolynomial {
    MomentPolynomial {
        coeffs: partitions::stirling2_row(n),
    }
}

/// `<N^n>` by summing `|z|^2` per connected block over all set partitions.
pub fn moment_n_diagram_sum(n: usize) -> Result<MomentPolynomial> {
    if n > MAX_N_ORDER {
        return Err(Error::EnumerationBound {
            n,
            max: MAX_N_ORDER,
        });
    }
    let mut p = MomentPolynomial::with_degree(n);
    for part in enumerate_set_partitions(n)? {
        p.coeffs[part.num_blocks()] += 1u32;
    }
    Ok(p)
}

/// Vacuum moment `<N^n>` evaluated at `z`.
pub fn moment_n(n: usize, z: Amplitude) -> Result<f64> {
    if n > MAX_N_ORDER {
        return Err(Error::EnumerationBound {
            n,
            max: MAX_N_ORDER,
        });
    }
    Ok(moment_n_closed_form(n).evaluate(z))
}

/// `<exp(itq)> = exp(-t^2 |z|^2 / 2)`.
pub fn char_q(t: f64, z: Amplitude) -> Complex64 {
    Complex64::new((-0.5 * t * t * z.norm_sqr()).exp(), 0.0)
}

/// `<exp(itN)> = exp(|z|^2 (e^{it} - 1))`.
pub fn char_n(t: f64, z: Amplitude) -> Complex64 {
    (z.norm_sqr() * (Complex64::new(0.0, t).exp() - 1.0)).exp()
}

/// `exp(sum_{k=1}^{order} (it)^k |z|^2 / k!)`: every cumulant of `N` is `|z|^2`.
pub fn char_n_cumulant_series(t: f64, z: Amplitude, order: usize) -> Complex64 {
    let it = Complex64::new(0.0, t);
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = Complex64::zero();
    for k in 1..=order {
        term = term * it / k as f64;
        sum += term;
    }
    (sum * z.norm_sqr()).exp()
}

/// Moments from cumulants through the set-partition sum: the moment of order
/// `n` is the sum over partitions of the product of block cumulants.
/// `cumulants[k - 1]` holds the cumulant of order `k`.
pub fn moment_from_cumulants(n: usize, cumulants: &[f64]) -> Result<f64> {
    let mut total = 0.0;
    for p in enumerate_set_partitions(n)? {
        total += p
            .blocks()
            .iter()
            .map(|b| cumulants.get(b.len() - 1).copied().unwrap_or(0.0))
            .product::<f64>();
    }
    Ok(total)
}

/// Ladder operators on the first `dim` Fock levels.
#[derive(Debug, Clone)]
pub struct TruncatedOscillator {
    dim: usize,
    lowering: CMatrix,
    raising: CMatrix,
}

impl TruncatedOscillator {
    pub fn new(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter(
                "truncation dimension must be positive".into(),
            ));
        }
        let mut lowering = linalg::zeros(dim);
        for k in 1..dim {
            lowering[(k - 1, k)] = Complex64::new((k as f64).sqrt(), 0.0);
        }
        let raising = lowering.adjoint();
        Ok(Self {
            dim,
            lowering,
            raising,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn lowering(&self) -> &CMatrix {
        &self.lowering
    }

    pub fn raising(&self) -> &CMatrix {
        &self.raising
    }

    /// `z a^dagger + z^* a`
    pub fn observable_q(&self, z: Amplitude) -> CMatrix {
        &self.raising * z.0 + &self.lowering * z.0.conj()
    }

    /// `(a + z)^dagger (a + z)`
    pub fn observable_n(&self, z: Amplitude) -> CMatrix {
        let shifted = &self.lowering + linalg::identity(self.dim) * z.0;
        shifted.adjoint() * shifted
    }

    /// `<Omega| m |Omega>`
    pub fn vacuum_element(m: &CMatrix) -> Complex64 {
        m[(0, 0)]
    }

    /// `<Omega| m^n |Omega>`, computed by applying `m` to the vacuum column.
    pub fn vacuum_power(&self, m: &CMatrix, n: usize) -> Complex64 {
        let mut v = nalgebra::DVector::<Complex64>::zeros(self.dim);
        v[0] = linalg::ONE;
        for _ in 0..n {
            v = m * v;
        }
        v[0]
    }

    /// `<Omega| exp(i t h) |Omega>` for Hermitian `h`.
    pub fn vacuum_exp(&self, h: &CMatrix, t: f64) -> Complex64 {
        linalg::expm_hermitian(h, t)[(0, 0)]
    }
}

/// Letters of an operator word; `Z` and `ZConj` are the scalars `z`, `z^*`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OpSymbol {
    Lower,
    Raise,
    Z,
    ZConj,
}

impl OpSymbol {
    fn is_ladder(self) -> bool {
        matches!(self, OpSymbol::Lower | OpSymbol::Raise)
    }
}

/// Most ladder letters accepted by [`vacuum_moment_numeric`]; scalar letters
/// are free.
pub const MAX_WORD_LEN: usize = 20;

/// Vacuum expectation of an operator word (leftmost letter acts last) on the
/// truncated oscillator. `dim` must exceed the number of ladder letters by at
/// least two, which makes the truncation exact for vacuum elements.
pub fn vacuum_moment_numeric(word: &[OpSymbol], z: Amplitude, dim: usize) -> Result<Complex64> {
    let ladder_ops = word.iter().filter(|s| s.is_ladder()).count();
    if ladder_ops > MAX_WORD_LEN {
        return Err(Error::WordTooLong {
            len: ladder_ops,
            max: MAX_WORD_LEN,
        });
    }
    let required = ladder_ops + 2;
    if dim < required {
        return Err(Error::TruncationTooSmall {
            dim,
            ladder_ops,
            required,
        });
    }
    let osc = TruncatedOscillator::new(dim)?;
    let mut v = nalgebra::DVector::<Complex64>::zeros(dim);
    v[0] = linalg::ONE;
    for sym in word.iter().rev() {
        v = match sym {
            OpSymbol::Lower => osc.lowering() * v,
            OpSymbol::Raise => osc.raising() * v,
            OpSymbol::Z => v * z.0,
            OpSymbol::ZConj => v * z.0.conj(),
        };
    }
    Ok(v[0])
}

/// The `2^n` words whose sum is `q^n`, each factor written as `z a^dagger` or
/// `z^* a`.
pub fn expand_q_power(n: usize) -> Vec<Vec<OpSymbol>> {
    (0..1usize << n)
        .map(|mask| {
            (0..n)
                .flat_map(|k| {
                    if mask >> k & 1 == 1 {
                        [OpSymbol::Z, OpSymbol::Raise]
                    } else {
                        [OpSymbol::ZConj, OpSymbol::Lower]
                    }
                })
                .collect()
        })
        .collect()
}

/// The `4^n` words whose sum is `N^n`, with
/// `N = a^dagger a + z a^dagger + z^* a + z z^*`.
pub fn expand_n_power(n: usize) -> Vec<Vec<OpSymbol>> {
    const TERMS: [[OpSymbol; 2]; 4] = [
        [OpSymbol::Raise, OpSymbol::Lower],
        [OpSymbol::Z, OpSymbol::Raise],
        [OpSymbol::ZConj, OpSymbol::Lower],
        [OpSymbol::Z, OpSymbol::ZConj],
    ];
    (0..1usize << (2 * n))
        .map(|code| {
            (0..n)
                .flat_map(|k| TERMS[code >> (2 * k) & 3])
                .collect()
        })
        .collect()
}
