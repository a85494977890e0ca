mod common;

use proptest::prelude::*;
use rand::Rng;
use stabcleanse::doped::build_doped_circuit_nf;
use stabcleanse::phase::{g_formula, g_formula_exact, g_value, PhasePoint};
use stabcleanse::protocol::{estimate_alpha, purity_bounds, swap_shots_needed, swap_test_purity};
use stabcleanse::{CliffordTableau, PauliString, Region, StabilizerMixedState};

use common::*;

fn pauli(n: usize) -> impl Strategy<Value = PauliString> {
    (prop::collection::vec(0u8..4, n), 0u8..4).prop_map(|(v, ph)| {
        let mut p = PauliString::identity(v.len());
        for (q, k) in v.into_iter().enumerate() {
            p.set(q, k & 1 == 1, k & 2 == 2);
        }
        p.set_phase(ph);
        p
    })
}

fn three_paulis() -> impl Strategy<Value = (PauliString, PauliString, PauliString)> {
    (1usize..70).prop_flat_map(|n| (pauli(n), pauli(n), pauli(n)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn pauli_product_is_associative((a, b, c) in three_paulis()) {
        let l = a.mul(&b).unwrap().mul(&c).unwrap();
        let r = a.mul(&b.mul(&c).unwrap()).unwrap();
        prop_assert_eq!(l, r);
    }

    #[test]
    fn commutation_matches_product_order((a, b, _c) in three_paulis()) {
        let ab = a.mul(&b).unwrap();
        let ba = b.mul(&a).unwrap();
        let comm = a.commutes(&b).unwrap();
        prop_assert_eq!(comm, b.commutes(&a).unwrap());
        let expected = if comm { ab.phase() } else { (ab.phase() + 2) % 4 };
        prop_assert_eq!(ba.phase(), expected);
    }

    #[test]
    fn pauli_text_round_trips(p in (1usize..40).prop_flat_map(pauli)) {
        let back: PauliString = p.to_string().parse().unwrap();
        prop_assert_eq!(back, p);
    }

    #[test]
    fn conjugation_is_a_homomorphism(seed in any::<u64>(), (a, b, _c) in (1usize..9).prop_flat_map(|n| (pauli(n), pauli(n), pauli(n)))) {
        let n = a.num_qubits();
        let u = CliffordTableau::random(n, &mut rng(seed));
        let lhs = u.conjugate(&a.mul(&b).unwrap()).unwrap();
        let rhs = u.conjugate(&a).unwrap().mul(&u.conjugate(&b).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
        prop_assert_eq!(u.inverse().conjugate(&u.conjugate(&a).unwrap()).unwrap(), a);
    }

    #[test]
    fn random_cliffords_are_symplectic(n in 1usize..40, seed in any::<u64>()) {
        let u = CliffordTableau::random(n, &mut rng(seed));
        prop_assert!(u.is_symplectic());
        prop_assert_eq!(u.compose(&u.inverse()).unwrap(), CliffordTableau::identity(n));
    }

    #[test]
    fn region_complement_partitions(n in 1usize..30, mask in any::<u32>()) {
        let idx: Vec<usize> = (0..n).filter(|q| mask >> q & 1 == 1).collect();
        let a = Region::new(idx, n).unwrap();
        let b = a.complement(n);
        prop_assert_eq!(a.len() + b.len(), n);
        prop_assert!(a.intersection(&b).is_empty());
        prop_assert_eq!(a.union(&b), Region::full(n));
    }

    #[test]
    fn pure_state_marginals_agree(n in 1usize..60, cut in 0usize..60, seed in any::<u64>()) {
        // Pur(ψ_A) = Pur(ψ_Ā) for a pure state
        let cut = cut % (n + 1);
        let s = StabilizerMixedState::from_tableau(&CliffordTableau::random(n, &mut rng(seed)));
        let a = Region::range(0, cut);
        let pa = s.marginal_purity(&a).unwrap();
        let pb = s.marginal_purity(&a.complement(n)).unwrap();
        prop_assert_eq!(pa, pb);
        prop_assert!(pa.log2 <= 0);
        prop_assert!(pa.log2 >= -(cut.min(n - cut) as i64));
    }

    #[test]
    fn canonical_form_is_idempotent(n in 1usize..20, keep in any::<u32>(), seed in any::<u64>()) {
        let s = StabilizerMixedState::from_tableau(&CliffordTableau::random(n, &mut rng(seed)));
        let reg = Region::new((0..n).filter(|q| keep >> q & 1 == 1).collect(), n).unwrap();
        let m = s.partial_trace(&reg).unwrap();
        prop_assert_eq!(m.canonicalize(), m.clone());
        let text = m.to_text();
        let back: StabilizerMixedState = text.parse().unwrap();
        prop_assert_eq!(back, m);
    }

    #[test]
    fn bounds_are_consistent(n in 2usize..40, t in 0usize..5, seed in any::<u64>()) {
        let n_f = (n / 3).max(1);
        let t = t.min(n);
        let (c, part) = build_doped_circuit_nf(n, t, n_f, seed).unwrap();
        let r = purity_bounds(&c, &part).unwrap();
        prop_assert!(r.lower() <= r.upper());
        prop_assert_eq!(r.upper_factor_log2, 2 * t as i64);
        let (point, w) = estimate_alpha(&r).unwrap();
        prop_assert!(w[0] <= point + 1e-15 && point == w[1]);
        let width_bits = (w[1] - w[0]) * n as f64;
        prop_assert!(width_bits <= (2 * t + n) as f64 + 1e-9);
        if r.lower_e == r.lower_f {
            prop_assert!((width_bits - 2.0 * t as f64).abs() < 1e-9);
        }
        if let Some(truth) = r.true_purity {
            prop_assert!(r.sandwich_holds(truth, 1e-9));
        }
    }

    #[test]
    fn swap_estimate_is_in_range(pur in 0.0f64..=1.0, shots in 1u64..5000, seed in any::<u64>()) {
        let r = swap_test_purity(pur, shots, seed).unwrap();
        prop_assert!(r.accept_count <= shots);
        prop_assert!((r.estimate - (2.0 * r.accept_count as f64 / shots as f64 - 1.0)).abs() < 1e-15);
        prop_assert!((0.0..=1.0).contains(&r.estimate_clamped));
        prop_assert!(swap_shots_needed(pur.max(1e-3), 0.1) >= 1);
    }

    #[test]
    fn g_is_zero_in_localized_phase(n in 3usize..80, a in 0usize..1000, b in 1usize..1000) {
        let n_f = 1 + b % ((n - 1) / 2).max(1);
        if 2 * n_f < n {
            let t = a % (n_f + 1);
            let p = PhasePoint::from_counts(n, t, n_f).unwrap();
            prop_assert_eq!(g_value(&p).unwrap(), 0.0);
        }
    }

    #[test]
    fn g_precisions_agree(n in 4usize..61, tf in 1usize..100, ff in 1usize..100) {
        let n_f = 1 + ff % ((n - 1) / 2);
        if 2 * n_f < n {
            let t = n_f + 1 + tf % (n - n_f);
            let fast = g_formula(n, t as f64, n_f as f64).unwrap();
            let exact = g_formula_exact(n, t, n_f).unwrap();
            prop_assert!((fast - exact).abs() <= 1e-6 * exact.abs().max(1.0), "{} vs {}", fast, exact);
            prop_assert!(fast >= -1e-9);
            prop_assert!(fast <= n as f64 * (1.0 - n_f as f64 / n as f64) + 1e-9);
        }
    }
}

#[test]
fn random_circuit_generator_is_clifford() {
    let mut r = rng(0);
    for _ in 0..10 {
        let n = r.random_range(1..5);
        assert!(random_clifford_circuit(n, 10, &mut r).is_clifford());
    }
}
