//! Time-ordered evolution of coherent matrix elements and the scaled-kernel
//! diagram integrals behind the white-noise (Markov) limit.
//!
//! Two independent evaluations of `<e(f)| U_t e(g)>` (up to the scalar
//! `exp(int f^* g)`) are provided: the truncated iterated-integral series,
//! summed exactly over the pieces of the step functions, and the ordered
//! product of per-piece matrix exponentials.
//!
//! Diagram integrals use the two-sided exponential kernel family
//! `G(u) = c e^{-|u|/tau} e^{i omega u}` whenever possible, because every
//! simplicial integral of a product of such kernels has an exact nested
//! antiderivative. Tabulated kernels fall back to iterated adaptive
//! quadrature.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};
use crate::partitions::{enumerate_pair_partitions, is_time_consecutive, GoldstoneDiagram};
use crate::quadrature;
use crate::coefficients::ItoCoefficients;

/// Piecewise-constant complex function on `[0, end]`.
#[derive(Debug, Clone, PartialEq)]
pub struct StepFunction {
    breakpoints: Vec<f64>,
    values: Vec<Complex64>,
}

impl StepFunction {
    /// `breakpoints` runs from `0` to the end of the domain; `values[k]` holds
    /// on `[breakpoints[k], breakpoints[k + 1])`.
    pub fn new(breakpoints: Vec<f64>, values: Vec<Complex64>) -> Result<Self> {
        if values.is_empty() || breakpoints.len() != values.len() + 1 {
            return Err(Error::InvalidStepFunction(format!(
                "{} breakpoints for {} values",
                breakpoints.len(),
                values.len()
            )));
        }
        if breakpoints[0] != 0.0 {
            return Err(Error::InvalidStepFunction("domain must start at 0".into()));
        }
        if breakpoints.windows(2).any(|w| !(w[1] > w[0])) || breakpoints.iter().any(|b| !b.is_finite()) {
            return Err(Error::InvalidStepFunction(
                "breakpoints must be finite and strictly increasing".into(),
            ));
        }
        if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::InvalidStepFunction("values must be finite".into()));
        }
        Ok(Self { breakpoints, values })
    }

    pub fn constant(value: Complex64, end: f64) -> Result<Self> {
        Self::new(vec![0.0, end], vec![value])
    }

    pub fn zero(end: f64) -> Result<Self> {
        Self::constant(Complex64::new(0.0, 0.0), end)
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn end(&self) -> f64 {
        *self.breakpoints.last().unwrap()
    }

    /// Value at `s`, right-continuous; the last piece extends to the end point.
    pub fn value_at(&self, s: f64) -> Complex64 {
        let k = self.breakpoints[1..].partition_point(|&b| b <= s);
        self.values[k.min(self.values.len() - 1)]
    }

    /// `s -> f(end - s)`.
    pub fn reversed(&self) -> Self {
        let end = self.end();
        Self {
            breakpoints: self.breakpoints.iter().rev().map(|b| end - b).collect(),
            values: self.values.iter().rev().copied().collect(),
        }
    }

    fn covers(&self, t: f64) -> Result<()> {
        if self.end() + 1e-12 * t.max(1.0) < t {
            return Err(Error::InvalidStepFunction(format!(
                "domain [0, {}] does not cover [0, {t}]",
                self.end()
            )));
        }
        Ok(())
    }
}

/// `int_0^t f^*(s) g(s) ds`.
pub fn overlap_exponent(f: &StepFunction, g: &StepFunction, t: f64) -> Complex64 {
    common_pieces(f, g, t)
        .into_iter()
        .map(|(h, fv, gv)| fv.conj() * gv * h)
        .sum()
}

/// Lengths of the common refinement of `f` and `g` on `[0, t]` with the
/// values of both on each piece.
fn common_pieces(f: &StepFunction, g: &StepFunction, t: f64) -> Vec<(f64, Complex64, Complex64)> {
    let mut cuts: Vec<f64> = f
        .breakpoints
        .iter()
        .chain(&g.breakpoints)
        .copied()
        .filter(|&b| b > 0.0 && b < t)
        .collect();
    cuts.push(0.0);
    cuts.push(t);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    cuts.windows(2)
        .filter(|w| w[1] > w[0])
        .map(|w| {
            let mid = 0.5 * (w[0] + w[1]);
            (w[1] - w[0], f.value_at(mid), g.value_at(mid))
        })
        .collect()
}

/// Piecewise-constant generator `(f^*)^a L_{ab} g^b` on `[0, t]`.
fn generator_pieces(
    l: &ItoCoefficients,
    f: &StepFunction,
    g: &StepFunction,
    t: f64,
) -> Result<Vec<(f64, CMatrix)>> {
    if !(t >= 0.0) {
        return Err(Error::InvalidParameter(format!("time horizon {t} must be non-negative")));
    }
    f.covers(t)?;
    g.covers(t)?;
    Ok(common_pieces(f, g, t)
        .into_iter()
        .map(|(h, fv, gv)| (h, l.coherent_generator(fv, gv)))
        .collect())
}

/// `c = 4 max_{a,b,s} |f^*(s)^a g(s)^b| ||L_{ab}||`, the growth rate used by
/// every a-priori bound on the evolution.
pub fn generator_bound(l: &ItoCoefficients, f: &StepFunction, g: &StepFunction, t: f64) -> f64 {
    let norms = [0, 1].map(|a| [0, 1].map(|b| linalg::spectral_norm(l.l(a, b))));
    let mut worst: f64 = 0.0;
    for (_, fv, gv) in common_pieces(f, g, t) {
        let (fa, ga) = (fv.norm(), gv.norm());
        let amp = [[1.0, ga], [fa, fa * ga]];
        for a in 0..2 {
            for b in 0..2 {
                worst = worst.max(amp[a][b] * norms[a][b]);
            }
        }
    }
    4.0 * worst
}

/// `sum_{n > n_max} x^n / n!`, summed directly.
fn exp_tail(x: f64, n_max: usize) -> f64 {
    let mut term = 1.0;
    for n in 1..=n_max {
        term *= x / n as f64;
    }
    let mut tail = 0.0;
    let mut n = n_max + 1;
    loop {
        term *= x / n as f64;
        tail += term;
        if term <= tail * 1e-17 || term == 0.0 || n > n_max + 10_000 {
            break;
        }
        n += 1;
    }
    tail
}

/// Maximum truncation order of [`series_matrix_element`].
pub const MAX_SERIES_ORDER: usize = 24;

/// Truncated iterated-integral series and its a-priori tail bound.
#[derive(Debug, Clone)]
pub struct SeriesResult {
    pub value: CMatrix,
    pub tail_bound: f64,
}

/// Sum of the iterated integrals of order `<= n_max` over the simplex, with
/// later times to the left. On each piece of constant generator `A_j` of
/// length `h_j` the simplex factorises, so order `n` collects
/// `prod_j (A_j h_j)^{n_j} / n_j!` over compositions of `n`.
pub fn series_matrix_element(
    l: &ItoCoefficients,
    f: &StepFunction,
    g: &StepFunction,
    t: f64,
    n_max: usize,
) -> Result<SeriesResult> {
    if n_max > MAX_SERIES_ORDER {
        return Err(Error::InvalidParameter(format!(
            "series order {n_max} exceeds {MAX_SERIES_ORDER}"
        )));
    }
    let d = l.dim();
    let pieces = generator_pieces(l, f, g, t)?;
    // by_order[k]: contribution of total order k from the pieces seen so far
    let mut by_order: Vec<CMatrix> = (0..=n_max).map(|_| linalg::zeros(d)).collect();
    by_order[0] = linalg::identity(d);
    for (h, a) in &pieces {
        let step = a * Complex64::new(*h, 0.0);
        let mut powers = vec![linalg::identity(d)];
        for p in 1..=n_max {
            let next = &powers[p - 1] * &step * Complex64::new(1.0 / p as f64, 0.0);
            powers.push(next);
        }
        let mut next: Vec<CMatrix> = (0..=n_max).map(|_| linalg::zeros(d)).collect();
        for (k, slot) in next.iter_mut().enumerate() {
            for p in 0..=k {
                *slot += &powers[p] * &by_order[k - p];
            }
        }
        by_order = next;
    }
    let value = by_order.into_iter().fold(linalg::zeros(d), |acc, m| acc + m);
    let c = generator_bound(l, f, g, t);
    Ok(SeriesResult {
        value,
        tail_bound: exp_tail(c * t, n_max),
    })
}

/// Solution `M(t)` of `M' = (f^*)^a L_{ab} g^b M`, `M(0) = 1`, as the ordered
/// product of exact exponentials over the pieces of the step functions.
pub fn ode_matrix_element(
    l: &ItoCoefficients,
    f: &StepFunction,
    g: &StepFunction,
    t: f64,
) -> Result<CMatrix> {
    let pieces = generator_pieces(l, f, g, t)?;
    Ok(pieces
        .iter()
        .fold(linalg::identity(l.dim()), |m, (h, a)| {
            linalg::expm(&(a * Complex64::new(*h, 0.0))) * m
        }))
}

/// Two-point function `G(u)` with `G(-u) = G(u)^*`.
#[derive(Debug, Clone, PartialEq)]
pub enum KernelSpec {
    /// `c e^{-|u|/tau} e^{i omega u}` with real `c`.
    Exponential { amplitude: f64, tau: f64, omega: f64 },
    /// Values on a grid `0 = u_0 < u_1 < ...`, linearly interpolated, zero
    /// beyond the last point and extended to `u < 0` by conjugation.
    Tabulated { grid: Vec<f64>, values: Vec<Complex64> },
}

const TABULATED_TOL: f64 = 1e-10;

impl KernelSpec {
    pub fn exponential(amplitude: f64, tau: f64, omega: f64) -> Result<Self> {
        let k = Self::Exponential { amplitude, tau, omega };
        k.validate()?;
        Ok(k)
    }

    pub fn tabulated(grid: Vec<f64>, values: Vec<Complex64>) -> Result<Self> {
        let k = Self::Tabulated { grid, values };
        k.validate()?;
        Ok(k)
    }

    /// Samples `base` on a uniform grid of `points` nodes over `[0, u_max]`.
    pub fn tabulate(base: &KernelSpec, u_max: f64, points: usize) -> Result<Self> {
        if points < 2 || !(u_max > 0.0) {
            return Err(Error::InvalidKernel("tabulation needs u_max > 0 and two points".into()));
        }
        let grid: Vec<f64> = (0..points)
            .map(|k| u_max * k as f64 / (points - 1) as f64)
            .collect();
        let mut values: Vec<Complex64> = grid.iter().map(|&u| base.eval(u)).collect();
        values[0].im = 0.0;
        Self::tabulated(grid, values)
    }

    fn validate(&self) -> Result<()> {
        match self {
            Self::Exponential { amplitude, tau, omega } => {
                if !(*tau > 0.0) || !tau.is_finite() {
                    return Err(Error::InvalidKernel(format!(
                        "decay time tau = {tau} must be positive (kernel not integrable)"
                    )));
                }
                if !omega.is_finite() || !amplitude.is_finite() {
                    return Err(Error::InvalidKernel("parameters must be finite".into()));
                }
            }
            Self::Tabulated { grid, values } => {
                if grid.len() < 2 || grid.len() != values.len() {
                    return Err(Error::InvalidKernel(
                        "tabulated kernel needs matching grid and values with at least two points".into(),
                    ));
                }
                if grid[0] != 0.0 || grid.windows(2).any(|w| !(w[1] > w[0])) {
                    return Err(Error::InvalidKernel(
                        "grid must start at 0 and increase strictly".into(),
                    ));
                }
                if values[0].im.abs() > 1e-14 {
                    return Err(Error::InvalidKernel(
                        "G(0) must be real for G(-u) = G(u)^*".into(),
                    ));
                }
                if grid.iter().any(|x| !x.is_finite()) || values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
                    return Err(Error::InvalidKernel("tabulated kernel must be finite".into()));
                }
            }
        }
        let (gamma, _) = self.moments_unchecked();
        if !(gamma > 0.0) {
            return Err(Error::InvalidKernel(format!("gamma = {gamma} must be positive")));
        }
        Ok(())
    }

    pub fn eval(&self, u: f64) -> Complex64 {
        match self {
            Self::Exponential { amplitude, tau, omega } => {
                Complex64::new(0.0, omega * u).exp() * (amplitude * (-u.abs() / tau).exp())
            }
            Self::Tabulated { grid, values } => {
                let x = u.abs();
                let last = grid.len() - 1;
                let value = if x > grid[last] {
                    Complex64::new(0.0, 0.0)
                } else {
                    let k = grid.partition_point(|&g| g <= x).clamp(1, last);
                    let w = (x - grid[k - 1]) / (grid[k] - grid[k - 1]);
                    values[k - 1] * (1.0 - w) + values[k] * w
                };
                if u < 0.0 {
                    value.conj()
                } else {
                    value
                }
            }
        }
    }

    /// Kernel with values `|G|`; for tabulated kernels the interpolated
    /// moduli, which dominate `|G|` pointwise.
    pub fn modulus(&self) -> Self {
        match self {
            Self::Exponential { amplitude, tau, .. } => Self::Exponential {
                amplitude: amplitude.abs(),
                tau: *tau,
                omega: 0.0,
            },
            Self::Tabulated { grid, values } => Self::Tabulated {
                grid: grid.clone(),
                values: values.iter().map(|v| Complex64::new(v.norm(), 0.0)).collect(),
            },
        }
    }

    fn moments_unchecked(&self) -> (f64, Complex64) {
        match self {
            Self::Exponential { amplitude, tau, omega } => {
                let kappa = Complex64::new(amplitude * tau, 0.0) / Complex64::new(1.0, -omega * tau);
                let gamma = 2.0 * amplitude * tau / (1.0 + omega * omega * tau * tau);
                (gamma, kappa)
            }
            Self::Tabulated { grid, .. } => {
                let kappa = quadrature::integrate_piecewise(|u| self.eval(u), grid, TABULATED_TOL, 0.0);
                let mut full: Vec<f64> = grid.iter().rev().map(|g| -g).collect();
                full.extend(&grid[1..]);
                let gamma = quadrature::integrate_piecewise(|u| self.eval(u), &full, TABULATED_TOL, 0.0);
                (gamma.re, kappa)
            }
        }
    }
}

/// `gamma = int G` over the real line and `kappa = int_0^inf G`.
pub fn kernel_moments(k: &KernelSpec) -> Result<(f64, Complex64)> {
    k.validate()?;
    Ok(k.moments_unchecked())
}

/// `G_lambda(u) = lambda^{-2} G(u / lambda^2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaledKernel {
    pub base: KernelSpec,
    pub lambda: f64,
}

impl ScaledKernel {
    pub fn new(base: KernelSpec, lambda: f64) -> Result<Self> {
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(Error::InvalidParameter(format!("lambda = {lambda} must be positive")));
        }
        Ok(Self { base, lambda })
    }

    pub fn eval(&self, u: f64) -> Complex64 {
        let l2 = self.lambda * self.lambda;
        self.base.eval(u / l2) / l2
    }

    pub fn modulus(&self) -> Self {
        Self {
            base: self.base.modulus(),
            lambda: self.lambda,
        }
    }

    /// Width of the region outside which the kernel is negligible (or zero).
    fn support(&self) -> f64 {
        let l2 = self.lambda * self.lambda;
        match &self.base {
            KernelSpec::Exponential { tau, .. } => 60.0 * tau * l2,
            KernelSpec::Tabulated { grid, .. } => grid[grid.len() - 1] * l2,
        }
    }

    /// `int G_lambda` over the real line by adaptive quadrature.
    pub fn total_integral_numeric(&self) -> Complex64 {
        let w = self.support();
        let mut points = vec![-w, 0.0, w];
        if let KernelSpec::Tabulated { grid, .. } = &self.base {
            let l2 = self.lambda * self.lambda;
            points = grid.iter().rev().map(|g| -g * l2).collect();
            points.extend(grid[1..].iter().map(|g| g * l2));
        }
        quadrature::integrate_piecewise(|u| self.eval(u), &points, 1e-12, 1e-12)
    }

    /// For the exponential family: `(c', mu')` with `G_lambda(u) = c' e^{-mu' u}`
    /// for `u > 0`.
    fn exponential_form(&self) -> Option<(f64, Complex64)> {
        match self.base {
            KernelSpec::Exponential { amplitude, tau, omega } => {
                let l2 = self.lambda * self.lambda;
                Some((amplitude / l2, Complex64::new(1.0 / tau, -omega) / l2))
            }
            KernelSpec::Tabulated { .. } => None,
        }
    }
}

/// Vertex limit for diagram integrals with exponential kernels.
pub const MAX_EXACT_VERTICES: usize = 12;
/// Vertex limit for diagram integrals evaluated by nested quadrature.
pub const MAX_QUADRATURE_VERTICES: usize = 6;
/// Relative tolerance of the nested quadrature.
pub const QUADRATURE_REL_TOL: f64 = 1e-6;

/// `sum coeff * x^p * e^{m mu x}`, keyed by `(m, p)`. Exponents stay exact
/// integer multiples of `mu`, so growing and decaying factors cancel
/// symbolically rather than numerically.
#[derive(Debug, Clone, Default)]
struct ExpPoly {
    terms: BTreeMap<(i64, u32), Complex64>,
}

impl ExpPoly {
    fn one() -> Self {
        let mut terms = BTreeMap::new();
        terms.insert((0, 0), Complex64::new(1.0, 0.0));
        Self { terms }
    }

    fn add(&mut self, key: (i64, u32), c: Complex64) {
        *self.terms.entry(key).or_default() += c;
    }

    fn shift(self, dm: i64) -> Self {
        Self {
            terms: self.terms.into_iter().map(|((m, p), c)| ((m + dm, p), c)).collect(),
        }
    }

    /// `x -> int_0^x self(s) ds`.
    fn integrate(&self, mu: Complex64) -> Self {
        let mut out = Self::default();
        for (&(m, p), &c) in &self.terms {
            if m == 0 {
                out.add((0, p + 1), c / (p as f64 + 1.0));
                continue;
            }
            let beta = mu * m as f64;
            // antiderivative e^{beta s} sum_j (-1)^{p-j} p!/j! s^j / beta^{p-j+1}
            let mut ratio = 1.0; // p!/j!
            let mut beta_pow = beta; // beta^{p-j+1}
            for j in (0..=p).rev() {
                let sign = if (p - j) % 2 == 0 { 1.0 } else { -1.0 };
                out.add((m, j), c * (sign * ratio) / beta_pow);
                if j == 0 {
                    // lower limit: subtract the antiderivative at 0
                    out.add((0, 0), -c * (sign * ratio) / beta_pow);
                }
                ratio *= j as f64;
                beta_pow *= beta;
            }
        }
        out
    }

    fn eval(&self, mu: Complex64, x: f64) -> Complex64 {
        self.terms
            .iter()
            .map(|(&(m, p), &c)| c * x.powi(p as i32) * (mu * (m as f64 * x)).exp())
            .sum()
    }
}

fn exact_exponential_integral(d: &GoldstoneDiagram, amp: f64, mu: Complex64, t: f64) -> Complex64 {
    let n = d.n();
    let mut weight = vec![0i64; n + 1];
    for &(i, j) in d.edges() {
        weight[j] += 1;
        weight[i] -= 1;
    }
    let mut f = ExpPoly::one();
    for w in weight.iter().skip(1) {
        f = f.shift(*w).integrate(mu);
    }
    f.eval(mu, t) * amp.powi(d.edges().len() as i32)
}

fn nested_quadrature(d: &GoldstoneDiagram, k: &ScaledKernel, t: f64) -> Complex64 {
    fn level(
        v: usize,
        upper: f64,
        times: &mut Vec<f64>,
        d: &GoldstoneDiagram,
        k: &ScaledKernel,
    ) -> Complex64 {
        if v == 0 {
            return d
                .edges()
                .iter()
                .map(|&(i, j)| k.eval(times[i - 1] - times[j - 1]))
                .product();
        }
        if upper <= 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        quadrature::integrate(
            |s| {
                times[v - 1] = s;
                level(v - 1, s, times, d, k)
            },
            0.0,
            upper,
            1e-13,
            QUADRATURE_REL_TOL,
        )
    }
    let mut times = vec![0.0; d.n()];
    level(d.n(), t, &mut times, d, k)
}

/// `int_{t > t_n > ... > t_1 > 0} prod_{(i,j)} G_lambda(t_i - t_j) dt`.
pub fn diagram_integral(d: &GoldstoneDiagram, k: &ScaledKernel, t: f64) -> Result<Complex64> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::InvalidParameter(format!("time horizon {t} must be non-negative")));
    }
    let limit = match k.base {
        KernelSpec::Exponential { .. } => MAX_EXACT_VERTICES,
        KernelSpec::Tabulated { .. } => MAX_QUADRATURE_VERTICES,
    };
    if d.n() > limit {
        return Err(Error::InvalidParameter(format!(
            "diagram has {} vertices, limit is {limit}",
            d.n()
        )));
    }
    if t == 0.0 {
        return Ok(if d.n() == 0 { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) });
    }
    Ok(match k.exponential_form() {
        Some((amp, mu)) => exact_exponential_integral(d, amp, mu, t),
        None => nested_quadrature(d, k, t),
    })
}

/// `sum over pair diagrams on n vertices of int prod |G_lambda|`.
pub fn pair_diagram_modulus_sum(n: usize, k: &ScaledKernel, t: f64) -> Result<f64> {
    let modulus = k.modulus();
    let mut total = 0.0;
    for d in enumerate_pair_partitions(n)? {
        total += diagram_integral(&d, &modulus, t)?.re;
    }
    Ok(total)
}

/// `|kappa'|^{n2} max(t, 1)^{n2} / n2!`.
pub fn pule_bound_gaussian(n2: usize, kappa_abs: f64, t: f64) -> f64 {
    let x = kappa_abs * t.max(1.0);
    (1..=n2).fold(1.0, |acc, k| acc * x / k as f64)
}

/// `exp(e^{A+B} / (1 - e^A))`, finite exactly when `A < 0`.
pub fn xi_bound(a: f64, b: f64) -> Result<f64> {
    if !(a < 0.0) {
        return Err(Error::XiDomain { a });
    }
    Ok(((a + b).exp() / (1.0 - a.exp())).exp())
}

/// `(A, B)` with `e^A = ||kappa E11||` and `e^B = C max(t, 1)`.
pub fn xi_parameters(norm_kappa_e11: f64, c: f64, t: f64) -> (f64, f64) {
    (norm_kappa_e11.ln(), (c * t.max(1.0)).ln())
}

/// Multiplicity vectors `(n_1, n_2, ...)` with `sum_j j n_j = n`.
pub fn multiplicity_vectors(n: usize) -> Vec<Vec<usize>> {
    fn rec(rest: usize, max_part: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if rest == 0 {
            out.push(current.clone());
            return;
        }
        for part in (1..=max_part.min(rest)).rev() {
            current[part - 1] += 1;
            rec(rest - part, part, current, out);
            current[part - 1] -= 1;
        }
    }
    let mut out = Vec::new();
    rec(n, n, &mut vec![0; n], &mut out);
    out
}

/// `sum' prod_j e^{(A j + B) n_j} / n_j!` restricted to `sum_j j n_j = n`.
pub fn restricted_xi_sum(a: f64, b: f64, n: usize) -> f64 {
    multiplicity_vectors(n)
        .iter()
        .map(|mult| {
            mult.iter()
                .enumerate()
                .map(|(idx, &nj)| {
                    let j = idx as f64 + 1.0;
                    let fact: f64 = (1..=nj).map(|x| x as f64).product();
                    ((a * j + b) * nj as f64).exp() / fact
                })
                .product::<f64>()
        })
        .sum()
}

/// Predicted `lambda -> 0` value of a diagram: each interval block of size
/// `s` contributes `kappa^{s-1}` and the `m` collapsed blocks fill a simplex of
/// volume `t^m / m!`. Non-consecutive diagrams vanish.
pub fn limit_prediction(d: &GoldstoneDiagram, kappa: Complex64, t: f64) -> Complex64 {
    if !is_time_consecutive(d) {
        return Complex64::new(0.0, 0.0);
    }
    let blocks = d.blocks();
    let m = blocks.num_blocks();
    let volume = (1..=m).fold(1.0, |acc, k| acc * t / k as f64);
    kappa.powu(d.edges().len() as u32) * volume
}

/// Default scan grid.
pub const DEFAULT_LAMBDAS: [f64; 5] = [1.0, 0.5, 0.25, 0.125, 0.0625];
/// Vertex limit for [`markov_scan`].
pub const MAX_SCAN_VERTICES: usize = 5;

#[derive(Debug, Clone, PartialEq)]
pub struct ScanRow {
    pub diagram: String,
    pub lambda: f64,
    pub integral: Complex64,
    pub limit_prediction: Complex64,
    /// Log-log slope of `|integral - prediction|` against `lambda`, relative
    /// to the previous row of the same diagram.
    pub slope_estimate: Option<f64>,
}

/// Diagram integrals along a decreasing `lambda` grid, next to their
/// predicted white-noise limits.
pub fn markov_scan(
    k: &KernelSpec,
    diagrams: &[GoldstoneDiagram],
    lambdas: &[f64],
    t: f64,
) -> Result<Vec<ScanRow>> {
    if lambdas.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(Error::InvalidParameter("lambda grid must be strictly decreasing".into()));
    }
    let (_, kappa) = kernel_moments(k)?;
    let mut rows = Vec::with_capacity(diagrams.len() * lambdas.len());
    for d in diagrams {
        if d.n() > MAX_SCAN_VERTICES {
            return Err(Error::InvalidParameter(format!(
                "scan diagrams are limited to {MAX_SCAN_VERTICES} vertices"
            )));
        }
        let prediction = limit_prediction(d, kappa, t);
        let mut previous: Option<(f64, f64)> = None;
        for &lambda in lambdas {
            let scaled = ScaledKernel::new(k.clone(), lambda)?;
            let integral = diagram_integral(d, &scaled, t)?;
            let deviation = (integral - prediction).norm();
            let slope_estimate = previous.and_then(|(l0, d0)| {
                let s = (deviation / d0).ln() / (lambda / l0).ln();
                s.is_finite().then_some(s)
            });
            previous = Some((lambda, deviation));
            rows.push(ScanRow {
                diagram: d.compact(),
                lambda,
                integral,
                limit_prediction: prediction,
                slope_estimate,
            });
        }
    }
    Ok(rows)
}

/// CSV header of [`markov_scan_csv`].
pub const MARKOV_SCAN_HEADER: &str =
    "diagram,lambda,abs_integral,re_integral,im_integral,limit_prediction,slope_estimate";

/// Scan rows as CSV. The diagram column is quoted (it contains commas); the
/// prediction column holds `|prediction|`; the slope is empty on the first
/// row of each diagram.
pub fn markov_scan_csv(rows: &[ScanRow]) -> String {
    let mut out = String::from(MARKOV_SCAN_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "\"{}\",{},{},{},{},{},{}\n",
            r.diagram,
            linalg::fmt_sig(r.lambda),
            linalg::fmt_sig(r.integral.norm()),
            linalg::fmt_sig(r.integral.re),
            linalg::fmt_sig(r.integral.im),
            linalg::fmt_sig(r.limit_prediction.norm()),
            r.slope_estimate.map(linalg::fmt_sig).unwrap_or_default(),
        ));
    }
    out
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn log_log_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let cov: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let var: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    cov / var
}
