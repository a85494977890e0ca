mod common;

use rand::Rng;
use stabcleanse::dense::DensityMatrix;
use stabcleanse::doped::build_doped_circuit_nf;
use stabcleanse::protocol::{
    estimate_alpha, lambda_diagnostic, purity_bounds, resource_comparison, swap_shots_needed,
    swap_test, swap_test_purity,
};

use common::*;

#[test]
fn clifford_circuit_bounds_are_tight() {
    for seed in 0..20 {
        let (c, part) = build_doped_circuit_nf(8, 0, 3, seed).unwrap();
        let r = purity_bounds(&c, &part).unwrap();
        assert_eq!(r.upper_factor_log2, 0);
        assert_eq!(r.lower_e, r.lower_f);
        let truth = r.true_purity.unwrap();
        assert!((truth - r.lower()).abs() < 1e-12);
        assert!((truth - r.upper()).abs() < 1e-12);
    }
}

#[test]
fn sandwich_on_small_doped_instances() {
    for seed in 0..100 {
        let (c, part) = build_doped_circuit_nf(6, 2, 2, seed).unwrap();
        let r = purity_bounds(&c, &part).unwrap();
        assert!(r.sandwich_holds(r.true_purity.unwrap(), 1e-9), "seed {seed}: {r:?}");
    }
}

#[test]
fn alpha_window_contains_dense_value() {
    for seed in 0..100 {
        let (c, part) = build_doped_circuit_nf(12, 3, 4, seed).unwrap();
        let r = purity_bounds(&c, &part).unwrap();
        let (_, w) = estimate_alpha(&r).unwrap();
        let a = -r.true_purity.unwrap().log2() / 12.0;
        assert!(w[0] - 1e-12 <= a && a <= w[1] + 1e-12, "seed {seed}: {a} not in {w:?}");
    }
}

#[test]
fn pure_product_has_zero_alpha() {
    let (c, part) = build_doped_circuit_nf(1, 0, 0, 5).unwrap();
    let r = purity_bounds(&c, &part).unwrap();
    assert_eq!(estimate_alpha(&r).unwrap().0, 0.0);
}

#[test]
fn bounds_json_shape() {
    let (c, part) = build_doped_circuit_nf(6, 1, 2, 1).unwrap();
    let v = serde_json::to_value(purity_bounds(&c, &part).unwrap()).unwrap();
    for key in ["n", "t", "nE", "lower_E", "lower_F", "upper_factor_log2", "true_purity", "alpha_window"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    assert!(v["lower_E"]["k"].is_i64());
}

#[test]
fn swap_test_examples() {
    let r = swap_test(&DensityMatrix::maximally_mixed(1).unwrap(), 4_000_000, 1).unwrap();
    assert!((r.estimate - 0.5).abs() < 2e-3);
    let pure = t_product(2).density_matrix().unwrap();
    assert_eq!(swap_test(&pure, 17, 3).unwrap().estimate, 1.0);
}

#[test]
fn swap_test_spread_is_binomial() {
    let (pur, shots) = (0.3, 400u64);
    let mut r = rng(4);
    let xs: Vec<f64> = (0..3000)
        .map(|_| swap_test_purity(pur, shots, r.random()).unwrap().estimate)
        .collect();
    let mean = xs.iter().sum::<f64>() / xs.len() as f64;
    let sd = (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (xs.len() - 1) as f64).sqrt();
    let p = (1.0 + pur) / 2.0;
    let expected = 2.0 * (p * (1.0 - p) / shots as f64).sqrt();
    assert!((sd / expected - 1.0).abs() < 0.05, "{sd} vs {expected}");
}

#[test]
fn resource_rows() {
    let (c, part) = build_doped_circuit_nf(6, 0, 2, 3).unwrap();
    let rows = resource_comparison(&c, &part, 0.1).unwrap();
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0].method, "swap-test");
    assert_eq!(rows[1].error, 0.0);
    assert!(rows[1].cost_value > 0.0);
    assert!(resource_comparison(&c, &part, 0.0).is_err());
    assert_eq!(swap_shots_needed(1.0, 0.1), 1);
}

#[test]
fn lambda_contractions_reproduce_proxy_purities() {
    // the full swap and the identity give Pur(ρ_F) and Pur(ρ_E) exactly;
    // these pin the normalization of the two-copy contraction
    for (n, t, n_f) in [(4, 1, 1), (4, 1, 2), (5, 2, 2), (6, 2, 2), (6, 1, 2)] {
        for seed in 0..4 {
            let (c, part) = build_doped_circuit_nf(n, t, n_f, seed).unwrap();
            let r = lambda_diagnostic(&c, &part).unwrap();
            assert!((r.full_swap - r.pur_rho_f).abs() < 1e-10, "{r:?}");
            assert!((r.no_swap - r.pur_rho_e).abs() < 1e-10, "{r:?}");
            assert!(r.lambda1 >= -1e-12 && r.lambda2 >= -1e-12);
        }
    }
}

#[test]
fn lambda_guards() {
    let (c, part) = build_doped_circuit_nf(4, 0, 1, 0).unwrap();
    assert!(lambda_diagnostic(&c, &part).is_err());
    let (c, part) = build_doped_circuit_nf(9, 1, 3, 0).unwrap();
    assert!(lambda_diagnostic(&c, &part).is_err());
}
