//! Discrete-time (toy Fock space) approximation of coherent matrix elements.
//!
//! Time is cut into slots of width `dt`. Between coherent slot states each
//! slot contributes a system-space transfer matrix; the matrix element is
//! the chronologically ordered product of those.

use num_complex::Complex64;

use crate::coefficients::ItoCoefficients;
use crate::dyson::{generator_bound, ode_matrix_element, overlap_exponent, StepFunction};
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};

/// Relative tolerance when matching step-function breakpoints to slot edges.
pub const ALIGNMENT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlotLattice {
    horizon: f64,
    n_slots: usize,
}

impl SlotLattice {
    pub fn new(horizon: f64, n_slots: usize) -> Result<Self> {
        if !(horizon > 0.0) || !horizon.is_finite() {
            return Err(Error::InvalidParameter(format!("horizon {horizon} must be positive")));
        }
        if n_slots == 0 {
            return Err(Error::InvalidParameter("slot count must be positive".into()));
        }
        Ok(Self { horizon, n_slots })
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn n_slots(&self) -> usize {
        self.n_slots
    }

    pub fn dt(&self) -> f64 {
        self.horizon / self.n_slots as f64
    }

    /// `[k dt, (k + 1) dt)`.
    pub fn slot(&self, k: usize) -> (f64, f64) {
        let dt = self.dt();
        (k as f64 * dt, (k + 1) as f64 * dt)
    }

    /// Midpoint of slot `k`.
    pub fn midpoint(&self, k: usize) -> f64 {
        (k as f64 + 0.5) * self.dt()
    }

    /// Fails unless every breakpoint of `f` inside the horizon is a slot edge.
    pub fn check_aligned(&self, f: &StepFunction) -> Result<()> {
        if f.end() + ALIGNMENT_TOL * self.horizon < self.horizon {
            return Err(Error::InvalidStepFunction(format!(
                "domain [0, {}] does not cover [0, {}]",
                f.end(),
                self.horizon
            )));
        }
        let dt = self.dt();
        for &b in f.breakpoints() {
            if b <= 0.0 || b >= self.horizon {
                continue;
            }
            let k = (b / dt).round();
            if (b - k * dt).abs() > ALIGNMENT_TOL * self.horizon {
                return Err(Error::Misaligned { breakpoint: b, dt });
            }
        }
        Ok(())
    }
}

/// Slot propagator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TransferMode {
    /// `1 + A dt`.
    #[default]
    FirstOrder,
    /// `exp(A dt)`.
    Exponential,
}

/// `1 + (f^*)^a L_{ab} g^b dt`, or its exponential in [`TransferMode::Exponential`].
pub fn slot_transfer(l: &ItoCoefficients, f_k: Complex64, g_k: Complex64, dt: f64, mode: TransferMode) -> CMatrix {
    let a = l.coherent_generator(f_k, g_k) * Complex64::new(dt, 0.0);
    match mode {
        TransferMode::FirstOrder => linalg::identity(l.dim()) + a,
        TransferMode::Exponential => linalg::expm(&a),
    }
}

/// Per-slot transfer matrices and their ordered product `T_{n-1} ... T_0`.
#[derive(Debug, Clone)]
pub struct TransferChain {
    transfers: Vec<CMatrix>,
    product: CMatrix,
}

impl TransferChain {
    pub fn from_transfers(d: usize, transfers: Vec<CMatrix>) -> Result<Self> {
        let mut product = linalg::identity(d);
        for t in &transfers {
            if t.nrows() != d || t.ncols() != d {
                return Err(Error::DimensionMismatch { expected: d, found: t.nrows() });
            }
            product = t * product;
        }
        Ok(Self { transfers, product })
    }

    pub fn transfers(&self) -> &[CMatrix] {
        &self.transfers
    }

    pub fn product(&self) -> &CMatrix {
        &self.product
    }

    /// Appends later slots; the result equals building the chain in one go.
    pub fn extend(mut self, later: TransferChain) -> Self {
        self.product = &later.product * &self.product;
        self.transfers.extend(later.transfers);
        self
    }
}

/// Coherent matrix element on a lattice. `matrix` is the system-space part;
/// the full element is `matrix * normalization`.
#[derive(Debug, Clone)]
pub struct ToyFockResult {
    pub matrix: CMatrix,
    pub normalization: Complex64,
    pub dt: f64,
}

pub fn transfer_chain(
    l: &ItoCoefficients,
    f: &StepFunction,
    g: &StepFunction,
    lattice: &SlotLattice,
    mode: TransferMode,
) -> Result<TransferChain> {
    lattice.check_aligned(f)?;
    lattice.check_aligned(g)?;
    let dt = lattice.dt();
    let transfers = (0..lattice.n_slots())
        .map(|k| {
            let s = lattice.midpoint(k);
            slot_transfer(l, f.value_at(s), g.value_at(s), dt, mode)
        })
        .collect();
    TransferChain::from_transfers(l.dim(), transfers)
}

pub fn coherent_matrix_element(
    l: &ItoCoefficients,
    f: &StepFunction,
    g: &StepFunction,
    lattice: &SlotLattice,
    mode: TransferMode,
) -> Result<ToyFockResult> {
    let chain = transfer_chain(l, f, g, lattice, mode)?;
    Ok(ToyFockResult {
        matrix: chain.product,
        normalization: overlap_exponent(f, g, lattice.horizon()).exp(),
        dt: lattice.dt(),
    })
}

/// A-priori bound on `|first-order product - exact|`: `c^2 t dt e^{ct} / 2`
/// with the growth rate `c` of [`generator_bound`].
pub fn first_order_error_bound(l: &ItoCoefficients, f: &StepFunction, g: &StepFunction, lattice: &SlotLattice) -> f64 {
    let t = lattice.horizon();
    let c = generator_bound(l, f, g, t);
    0.5 * c * c * t * lattice.dt() * (c * t).exp()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceRow {
    pub n_slots: usize,
    pub dt: f64,
    pub deviation: f64,
}

/// Largest entry of `toyfock - ode` for each slot count.
pub fn convergence_scan(
    l: &ItoCoefficients,
    f: &StepFunction,
    g: &StepFunction,
    t: f64,
    n_slots_list: &[usize],
) -> Result<Vec<ConvergenceRow>> {
    if n_slots_list.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter("slot counts must increase".into()));
    }
    let reference = ode_matrix_element(l, f, g, t)?;
    n_slots_list
        .iter()
        .map(|&n| {
            let lattice = SlotLattice::new(t, n)?;
            let r = coherent_matrix_element(l, f, g, &lattice, TransferMode::FirstOrder)?;
            Ok(ConvergenceRow {
                n_slots: n,
                dt: r.dt,
                deviation: linalg::max_abs(&(r.matrix - &reference)),
            })
        })
        .collect()
}

/// `|| M^dagger M - E^dagger E ||` in the vacuum, with `M` the slot product and
/// `E = exp(L00 t)`.
pub fn vacuum_unitarity_defect(l: &ItoCoefficients, lattice: &SlotLattice) -> Result<f64> {
    let zero = StepFunction::zero(lattice.horizon())?;
    let m = coherent_matrix_element(l, &zero, &zero, lattice, TransferMode::FirstOrder)?.matrix;
    let e = linalg::expm(&(l.l(0, 0) * Complex64::new(lattice.horizon(), 0.0)));
    Ok(linalg::spectral_norm(&(linalg::dagger(&m) * &m - linalg::dagger(&e) * &e)))
}
