mod common;

use std::collections::HashSet;

use num_bigint::BigUint;
use num_complex::Complex64;
use proptest::prelude::*;
use qsc_core::coefficients::{
    ito_coefficients, ito_coefficients_series, ito_multiply, series_error_constant,
    unitarity_residual, ItoSymbol,
};
use qsc_core::dyson::{
    diagram_integral, kernel_moments, limit_prediction, ode_matrix_element,
    series_matrix_element, KernelSpec, ScaledKernel, DEFAULT_LAMBDAS,
};
use qsc_core::linalg;
use qsc_core::oscillator::{
    char_n, char_q, expand_q_power, moment_from_cumulants, moment_n, moment_q,
    moment_q_closed_form, moment_q_diagram_sum, vacuum_moment_numeric, Amplitude,
};
use qsc_core::partitions::{
    admissible_reorder, bell, canonical_diagram, diagram_from_partition,
    enumerate_pair_partitions, enumerate_set_partitions, is_time_consecutive, stirling2,
    GoldstoneDiagram, SetPartition,
};
use qsc_core::toyfock::{transfer_chain, SlotLattice, TransferMode};

fn growth_string() -> impl Strategy<Value = Vec<usize>> {
    (1usize..=9).prop_flat_map(|n| prop::collection::vec(0usize..n, n)).prop_map(|raw| {
        // clamp into a restricted growth string
        let mut labels = Vec::with_capacity(raw.len());
        let mut next = 0;
        for r in raw {
            let l = r.min(next);
            if l == next {
                next += 1;
            }
            labels.push(l);
        }
        labels
    })
}

fn symbol(rng: &mut common::TestRng, d: usize) -> ItoSymbol {
    ItoSymbol {
        constant: common::matrix(rng, d, 1.0),
        diff: [
            [common::matrix(rng, d, 1.0), common::matrix(rng, d, 1.0)],
            [common::matrix(rng, d, 1.0), common::matrix(rng, d, 1.0)],
        ],
    }
}

/// Central `n`-th difference at 0 with one Richardson step.
fn derivative_at_zero(f: impl Fn(f64) -> Complex64, n: usize, h: f64) -> Complex64 {
    let raw = |h: f64| {
        let mut acc = Complex64::new(0.0, 0.0);
        let mut binom = 1.0;
        for k in 0..=n {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            acc += f((n as f64 / 2.0 - k as f64) * h) * (sign * binom);
            binom = binom * (n - k) as f64 / (k + 1) as f64;
        }
        acc / h.powi(n as i32)
    };
    (raw(h / 2.0) * 4.0 - raw(h)) / 3.0
}

#[test]
fn partition_counts_match_bell_and_stirling() {
    for n in 0..=10 {
        let count = enumerate_set_partitions(n).unwrap().count();
        let stirling_sum: BigUint = (0..=n).map(|m| stirling2(n, m)).sum();
        assert_eq!(BigUint::from(count), bell(n));
        assert_eq!(stirling_sum, bell(n));
    }
}

#[test]
fn pair_partition_counts() {
    for n in (0..=12).step_by(2) {
        let m = n / 2;
        let expected: u64 = (1..=m as u64).map(|k| 2 * k - 1).product();
        assert_eq!(enumerate_pair_partitions(n).unwrap().count() as u64, expected);
    }
}

#[test]
fn reorder_is_injective_for_each_profile() {
    for n in 1..=8 {
        let mut seen = HashSet::new();
        let mut total = 0;
        for p in enumerate_set_partitions(n).unwrap() {
            let d = diagram_from_partition(&p);
            let sigma = admissible_reorder(&d);
            assert_eq!(sigma.apply(&d).unwrap(), canonical_diagram(&p.profile()));
            seen.insert((sigma.as_slice().to_vec(), p.profile()));
            total += 1;
        }
        assert_eq!(seen.len(), total);
    }
}

#[test]
fn diagrams_are_injective_on_partitions() {
    let diagrams: HashSet<String> = enumerate_set_partitions(8)
        .unwrap()
        .map(|p| diagram_from_partition(&p).compact())
        .collect();
    assert_eq!(BigUint::from(diagrams.len()), bell(8));
}

#[test]
fn gaussian_diagram_sums_match_word_oracle() {
    for n in (0..=12).step_by(2) {
        assert_eq!(moment_q_diagram_sum(n).unwrap(), moment_q_closed_form(n));
        let words = expand_q_power(n);
        for r in [0.5, 1.0, 2.0] {
            let z = Amplitude(Complex64::from_polar(r, 0.4));
            let oracle: Complex64 = words
                .iter()
                .map(|w| vacuum_moment_numeric(w, z, n + 4).unwrap())
                .sum();
            let exact = moment_q(n, z).unwrap();
            assert!((oracle.re - exact).abs() <= 1e-9 * exact, "n = {n}, |z| = {r}");
            assert!(oracle.im.abs() <= 1e-9 * exact);
        }
    }
}

#[test]
fn char_q_derivatives_are_moments() {
    for r in [0.5, 1.0] {
        let z = Amplitude(Complex64::from_polar(r, 1.1));
        for n in 0..=6 {
            let d = derivative_at_zero(|t| char_q(t, z), n, 0.05) / Complex64::i().powu(n as u32);
            let m = moment_q(n, z).unwrap();
            assert!((d - m).norm() <= 1e-4 * m.max(1.0), "n = {n}: {d} vs {m}");
        }
    }
}

#[test]
fn log_char_n_cumulants_are_constant() {
    let z = Amplitude::new(0.6, -0.5);
    for n in 1..=5 {
        let d = derivative_at_zero(|t| char_n(t, z).ln(), n, 0.05) / Complex64::i().powu(n as u32);
        assert!((d - z.norm_sqr()).norm() <= 1e-4 * z.norm_sqr(), "n = {n}: {d}");
    }
}

#[test]
fn cumulants_rebuild_moments() {
    let z = Amplitude::new(0.7, 0.2);
    let x = z.norm_sqr();
    for n in 0..=8 {
        let poisson = moment_from_cumulants(n, &vec![x; n.max(1)]).unwrap();
        let direct = moment_n(n, z).unwrap();
        assert!((poisson - direct).abs() <= 1e-12 * direct.max(1.0));
        let mut gaussian = vec![0.0; n.max(2)];
        gaussian[1] = x;
        let direct = moment_q(n, z).unwrap();
        assert!((moment_from_cumulants(n, &gaussian).unwrap() - direct).abs() <= 1e-12 * direct.max(1.0));
    }
}

#[test]
fn consecutive_diagrams_reach_their_limits() {
    let k = KernelSpec::exponential(0.5, 1.0, 0.7).unwrap();
    let (_, kappa) = kernel_moments(&k).unwrap();
    let smallest = DEFAULT_LAMBDAS[DEFAULT_LAMBDAS.len() - 1];
    let scaled = ScaledKernel::new(k, smallest).unwrap();
    let t = 1.0;
    for n in 1..=5 {
        for p in enumerate_set_partitions(n).unwrap() {
            let d = diagram_from_partition(&p);
            if !is_time_consecutive(&d) {
                continue;
            }
            let prediction = limit_prediction(&d, kappa, t);
            let value = diagram_integral(&d, &scaled, t).unwrap();
            assert!(
                (value - prediction).norm() <= 0.02 * prediction.norm(),
                "{d}: {value} vs {prediction}"
            );
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn partitions_round_trip_through_diagrams(labels in growth_string()) {
        let p = SetPartition::from_growth_string(&labels);
        let d = diagram_from_partition(&p);
        prop_assert_eq!(d.blocks(), p.clone());
        prop_assert_eq!(is_time_consecutive(&d), p.has_interval_blocks());
        let parsed: GoldstoneDiagram = d.to_string().parse().unwrap();
        prop_assert_eq!(&parsed, &d);
        let sigma = admissible_reorder(&d);
        prop_assert_eq!(sigma.apply(&d).unwrap(), canonical_diagram(&p.profile()));
    }

    #[test]
    fn ito_product_is_associative(seed in any::<u64>(), d in 1usize..=3) {
        let mut rng = common::rng(seed);
        let (x, y, z) = (symbol(&mut rng, d), symbol(&mut rng, d), symbol(&mut rng, d));
        let left = ito_multiply(&ito_multiply(&x, &y).unwrap(), &z).unwrap();
        let right = ito_multiply(&x, &ito_multiply(&y, &z).unwrap()).unwrap();
        prop_assert!(left.max_abs_difference(&right) < 1e-12);
    }

    #[test]
    fn ito_product_is_adjoint_covariant(seed in any::<u64>(), d in 1usize..=3) {
        let mut rng = common::rng(seed);
        let (x, y) = (symbol(&mut rng, d), symbol(&mut rng, d));
        let lhs = ito_multiply(&x, &y).unwrap().adjoint();
        let rhs = ito_multiply(&y.adjoint(), &x.adjoint()).unwrap();
        prop_assert!(lhs.max_abs_difference(&rhs) < 1e-12);
    }

    #[test]
    fn hermitian_families_satisfy_unitarity(seed in any::<u64>(), d in 1usize..=4) {
        let mut rng = common::rng(seed);
        let (e, k) = common::family(&mut rng, d, 0.9);
        let l = ito_coefficients(&e, &k).unwrap();
        prop_assert!(unitarity_residual(&l, k.gamma()) < 1e-10);
    }

    #[test]
    fn series_coefficients_converge(seed in any::<u64>(), d in 1usize..=3) {
        let mut rng = common::rng(seed);
        let (e, k) = common::family(&mut rng, d, 0.8);
        let closed = ito_coefficients(&e, &k).unwrap();
        let c = series_error_constant(&e, &k).unwrap();
        let q = e.scattering_norm(&k);
        let mut previous_bound = f64::INFINITY;
        for r in 1..=60 {
            let bound = c * q.powi(r);
            prop_assert!(bound <= previous_bound);
            previous_bound = bound;
            let err = ito_coefficients_series(&e, &k, r as usize).unwrap().max_abs_difference(&closed);
            prop_assert!(err <= bound * (1.0 + 1e-9) + 1e-14);
        }
        prop_assert!(previous_bound < 1e-4);
    }

    #[test]
    fn scaled_kernels_keep_gamma(amp in 0.1f64..2.0, tau in 0.2f64..3.0, omega in -3.0f64..3.0, idx in 0usize..5) {
        let k = KernelSpec::exponential(amp, tau, omega).unwrap();
        let (gamma, kappa) = kernel_moments(&k).unwrap();
        prop_assert!((gamma - 2.0 * kappa.re).abs() < 1e-12);
        let total = ScaledKernel::new(k, DEFAULT_LAMBDAS[idx]).unwrap().total_integral_numeric();
        prop_assert!((total.re - gamma).abs() < 1e-8);
        prop_assert!(total.im.abs() < 1e-8);
    }

    #[test]
    fn series_stays_within_tail_bound(seed in any::<u64>(), d in 1usize..=3, n_max in 8usize..=20) {
        let mut rng = common::rng(seed);
        let (e, k) = common::family(&mut rng, d, 0.9);
        let l = ito_coefficients(&e, &k).unwrap();
        let f = common::step_function(&mut rng, 1.0, 3, 0.8);
        let g = common::step_function(&mut rng, 1.0, 5, 0.8);
        let ode = ode_matrix_element(&l, &f, &g, 1.0).unwrap();
        let s = series_matrix_element(&l, &f, &g, 1.0, n_max).unwrap();
        prop_assert!(linalg::spectral_norm(&(s.value - ode)) <= s.tail_bound + 1e-10);
    }

    #[test]
    fn exchange_symmetry_with_time_reversal(seed in any::<u64>(), d in 1usize..=3) {
        let mut rng = common::rng(seed);
        let (e, k) = common::family(&mut rng, d, 0.9);
        let l = ito_coefficients(&e, &k).unwrap();
        let f = common::step_function(&mut rng, 1.5, 3, 0.8);
        let g = common::step_function(&mut rng, 1.5, 4, 0.8);
        let forward = ode_matrix_element(&l, &f, &g, 1.5).unwrap();
        let backward = ode_matrix_element(&l.adjoint_family(), &g.reversed(), &f.reversed(), 1.5).unwrap();
        prop_assert!(linalg::max_abs(&(linalg::dagger(&forward) - backward)) < 1e-10);
    }

    #[test]
    fn chains_compose_at_lattice_points(seed in any::<u64>(), split in 1usize..12) {
        let mut rng = common::rng(seed);
        let (e, k) = common::family(&mut rng, 2, 0.9);
        let l = ito_coefficients(&e, &k).unwrap();
        let f = common::step_function(&mut rng, 1.2, 12, 0.8);
        let g = common::step_function(&mut rng, 1.2, 12, 0.8);
        let s = 0.1 * split as f64;
        let full = transfer_chain(&l, &f, &g, &SlotLattice::new(1.2, 12).unwrap(), TransferMode::FirstOrder).unwrap();
        // f and g extend past s; only their breakpoints below s must align
        let head = transfer_chain(&l, &f, &g, &SlotLattice::new(s, split).unwrap(), TransferMode::FirstOrder).unwrap();
        let shift = |h: &qsc_core::dyson::StepFunction| {
            let bps: Vec<f64> = (0..=(12 - split)).map(|j| 0.1 * j as f64).collect();
            let vals = (split..12).map(|j| h.value_at(0.1 * j as f64 + 0.05)).collect();
            qsc_core::dyson::StepFunction::new(bps, vals).unwrap()
        };
        let tail = transfer_chain(&l, &shift(&f), &shift(&g), &SlotLattice::new(1.2 - s, 12 - split).unwrap(), TransferMode::FirstOrder).unwrap();
        let joined = head.extend(tail);
        prop_assert!(linalg::max_abs(&(joined.product() - full.product())) < 1e-12);
    }
}
