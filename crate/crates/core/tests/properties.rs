mod common;

use common::rel_err;
use leeyang::zeros::backward_error;
use leeyang::*;
use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;

fn kind() -> impl Strategy<Value = ModelKind> {
    prop_oneof![Just(ModelKind::IsingZz), Just(ModelKind::Heisenberg)]
}

/// Bath on `1..=max_sites` spins with an optional bond on every pair.
fn model(max_sites: usize, kind: impl Strategy<Value = ModelKind>, j: (f64, f64)) -> impl Strategy<Value = SpinModel> {
    (1..=max_sites, kind, -2.0..2.0f64).prop_flat_map(move |(n, kind, h)| {
        let pairs = n * (n - 1) / 2;
        prop::collection::vec(prop::option::weighted(0.7, j.0..j.1), pairs).prop_map(move |strengths| {
            let mut bonds = Vec::new();
            let mut it = strengths.into_iter();
            for i in 0..n {
                for k in (i + 1)..n {
                    if let Some(s) = it.next().flatten() {
                        bonds.push((i, k, s));
                    }
                }
            }
            SpinModel::new(n, kind, bonds, h).unwrap()
        })
    })
}

fn thermal() -> impl Strategy<Value = ThermalParams> {
    (0.1..3.0f64).prop_map(|b| ThermalParams::new(b).unwrap())
}

fn probe() -> impl Strategy<Value = ProbeParams> {
    (prop_oneof![-2.0..-0.05f64, 0.05..2.0f64], -2.0..2.0f64).prop_map(|(l, h0)| ProbeParams::new(l, h0).unwrap())
}

fn polynomial(model: &SpinModel, thermal: &ThermalParams) -> LeeYangPolynomial {
    lee_yang_polynomial(&sector_spectra(model).unwrap(), thermal)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn bath_conserves_magnetisation(m in model(5, kind(), (-2.0, 2.0))) {
        let h = build_bath_interaction(&m).unwrap();
        let sz = total_sz_operator(m.n_sites()).unwrap();
        prop_assert!(commutator_norm(&h, &sz).unwrap() < 1e-12);
        prop_assert!(h.hermiticity_error() < 1e-14);
    }

    #[test]
    fn probe_sz_is_conserved(m in model(4, kind(), (-2.0, 2.0)), p in probe()) {
        let ht = build_total_hamiltonian(&m, &p).unwrap();
        let probe_z = site_operator(m.n_sites() + 1, m.n_sites(), Pauli::Z).unwrap();
        prop_assert!(commutator_norm(&ht, &probe_z).unwrap() < 1e-12);
        prop_assert!(ht.hermiticity_error() < 1e-14);
    }

    #[test]
    fn sector_spectrum_matches_full_diagonalisation(m in model(5, kind(), (-2.0, 2.0))) {
        let mut sectors = sector_spectra(&m).unwrap().full_spectrum();
        sectors.sort_by(f64::total_cmp);
        let full = build_bath_interaction(&m).unwrap().eigenvalues();
        prop_assert_eq!(sectors.len(), full.len());
        for (a, b) in sectors.iter().zip(&full) {
            prop_assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn weights_are_palindromic(m in model(6, kind(), (-2.0, 2.0)), t in thermal()) {
        let w = polynomial(&m, &t).ln_weights().to_vec();
        for k in 0..w.len() {
            prop_assert!((w[k] - w[w.len() - 1 - k]).abs() < 1e-10 * (1.0 + w[k].abs()));
        }
    }

    #[test]
    fn partition_conjugation_and_positivity(
        m in model(5, kind(), (-2.0, 2.0)),
        t in thermal(),
        re in -3.0..3.0f64,
        im in -5.0..5.0f64,
    ) {
        let poly = polynomial(&m, &t);
        let z = evaluate_partition(&poly, &ComplexField::new(re, im).unwrap());
        let zc = evaluate_partition(&poly, &ComplexField::new(re, -im).unwrap());
        prop_assert!(z.conj().rel_diff(&zc) < 1e-12);
        let real = evaluate_partition(&poly, &ComplexField::real(re)).to_complex();
        prop_assert!(real.re > 0.0 && real.im.abs() <= 1e-12 * real.re);
    }

    #[test]
    fn partition_matches_brute_force(
        m in model(4, kind(), (-2.0, 2.0)),
        t in thermal(),
        re in -2.0..2.0f64,
        im in -5.0..5.0f64,
    ) {
        let field = ComplexField::new(re, im).unwrap();
        let a = evaluate_partition(&polynomial(&m, &t), &field);
        let b = brute_force_partition(&m, &t, &field).unwrap();
        prop_assert!(a.rel_diff(&b) < 1e-10);
    }

    #[test]
    fn roots_close_under_inversion_and_conjugation(m in model(6, kind(), (-2.0, 2.0)), t in thermal()) {
        let poly = polynomial(&m, &t);
        let roots = find_polynomial_roots(&poly).unwrap();
        let near = |z: Complex64| roots.roots.iter().map(|r| (r - z).norm() / (1.0 + z.norm())).fold(f64::MAX, f64::min);
        for &q in &roots.roots {
            prop_assert!(near(q.conj()) < 1e-6);
            prop_assert!(near(1.0 / q) < 1e-6);
        }
        let product: Complex64 = roots.roots.iter().product();
        let expected = if poly.degree().is_multiple_of(2) { 1.0 } else { -1.0 };
        prop_assert!((product - expected).norm() < 1e-8);
        let c = poly.scaled_coefficients();
        let sum: Complex64 = roots.roots.iter().sum();
        prop_assert!((sum + c[c.len() - 2] / c[c.len() - 1]).norm() < 1e-8 * (1.0 + sum.norm()));
    }

    #[test]
    fn ferromagnetic_zeros_on_circle(m in model(6, Just(ModelKind::IsingZz), (0.0, 2.0)), t in thermal()) {
        let zeros = roots_to_fields(&find_polynomial_roots(&polynomial(&m, &t)).unwrap(), &t);
        prop_assert!(unit_circle_check(&zeros) < 1e-8);
    }

    #[test]
    fn roots_match_companion_matrix(m in model(5, kind(), (-2.0, 2.0)), t in thermal()) {
        let poly = polynomial(&m, &t);
        let c = poly.scaled_coefficients();
        let n = poly.degree();
        let companion = DMatrix::from_fn(n, n, |i, j| {
            if j == n - 1 {
                -c[i] / c[n]
            } else if i == j + 1 {
                1.0
            } else {
                0.0
            }
        });
        let scale = companion.amax() + 1.0;
        let eig = companion.complex_eigenvalues();
        let roots = find_polynomial_roots(&poly).unwrap();
        for e in eig.iter() {
            let k = (0..n)
                .min_by(|&a, &b| (roots.roots[a] - e).norm().total_cmp(&(roots.roots[b] - e).norm()))
                .unwrap();
            let nearest = roots.roots[k];
            // eigenvalues of an m-fold root move by about (eps·‖C‖)^(1/m)
            let tol = 1e-3f64.max(10.0 * (f64::EPSILON * scale).powf(1.0 / roots.multiplicities[k] as f64));
            prop_assert!((nearest - e).norm() < tol * (1.0 + e.norm()), "eigenvalue {} unmatched", e);
            prop_assert!(backward_error(c, nearest) <= 10.0 * backward_error(c, *e) + 1e-14);
        }
    }

    #[test]
    fn correlator_is_bounded_and_conjugate_symmetric(
        m in model(4, kind(), (-2.0, 2.0)),
        p in probe(),
        t in thermal(),
        tau in 0.0..10.0f64,
    ) {
        let c = ClosedFormCorrelator::new(&m, &p, &t).unwrap();
        let v = c.evaluate(0.0, tau);
        prop_assert!(v.norm() <= 1.0 + 1e-12);
        prop_assert!(rel_err(c.evaluate(0.0, -tau), v.conj()) < 1e-10);
    }

    #[test]
    fn closed_form_matches_oracle(
        m in model(3, kind(), (-2.0, 2.0)),
        p in probe(),
        t in thermal(),
        tau in 0.0..10.0f64,
        shift in 0.0..10.0f64,
    ) {
        let a = ClosedFormCorrelator::new(&m, &p, &t).unwrap().evaluate(shift, tau);
        let b = OracleCorrelator::new(&m, &p, &t).unwrap().evaluate(shift, tau);
        prop_assert!(rel_err(a, b) < 1e-10);
    }
}
