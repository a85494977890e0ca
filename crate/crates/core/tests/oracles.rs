mod common;

use std::collections::HashMap;

use num_complex::Complex64;
use num_traits::ToPrimitive;
use rand::Rng;
use stabcleanse::dense::{fourth_moment_exact, DenseState, DensityMatrix};
use stabcleanse::doped::{build_doped_circuit_nf, cleansed_se_e};
use stabcleanse::moments::{
    orbit_exhaustive, orbit_samples, page_purity, prop1_exact, ratio_of_averages, McEstimate,
};
use stabcleanse::{Circuit, CliffordTableau, Gate, Region, StabilizerMixedState};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use common::*;

fn all_regions(n: usize) -> Vec<Region> {
    (1..(1usize << n))
        .map(|m| Region::new((0..n).filter(|q| m >> q & 1 == 1).collect(), n).unwrap())
        .collect()
}

#[test]
fn tableau_conjugation_matches_dense_action() {
    let mut r = rng(1);
    for _ in 0..300 {
        let n = r.random_range(1..=4);
        let c = random_clifford_circuit(n, 30, &mut r);
        let u = CliffordTableau::from_circuit(&c).unwrap();
        let psi = random_state(n, &mut r);
        let p = random_pauli(n, &mut r);
        // C P |ψ⟩ == (C P C†) C |ψ⟩ with the phase included
        let mut lhs = psi.clone();
        lhs.apply_pauli(&p).unwrap();
        lhs.apply_circuit(&c).unwrap();
        let mut rhs = psi.clone();
        rhs.apply_circuit(&c).unwrap();
        rhs.apply_pauli(&u.conjugate(&p).unwrap()).unwrap();
        assert!(max_diff(lhs.amplitudes(), rhs.amplitudes()) < 1e-12);
    }
}

#[test]
fn synthesized_circuit_reproduces_tableau() {
    let mut r = rng(2);
    for n in 1..=7 {
        for _ in 0..20 {
            let u = CliffordTableau::random(n, &mut r);
            let back = CliffordTableau::from_circuit(&u.to_circuit()).unwrap();
            assert_eq!(back, u);
        }
    }
}

#[test]
fn composition_matches_circuit_concatenation() {
    let mut r = rng(3);
    for _ in 0..100 {
        let n = r.random_range(1..=5);
        let a = random_clifford_circuit(n, 20, &mut r);
        let b = random_clifford_circuit(n, 20, &mut r);
        let mut ab = a.clone();
        ab.extend(&b);
        let ua = CliffordTableau::from_circuit(&a).unwrap();
        let ub = CliffordTableau::from_circuit(&b).unwrap();
        assert_eq!(ub.compose(&ua).unwrap(), CliffordTableau::from_circuit(&ab).unwrap());
        assert_eq!(ua.compose(&ua.inverse()).unwrap(), CliffordTableau::identity(n));
    }
}

fn chi_square_uniform(n: usize, per_bin: usize, seed: u64) -> f64 {
    let group = CliffordTableau::enumerate(n).unwrap();
    let index: HashMap<String, usize> = group
        .iter()
        .enumerate()
        .map(|(i, u)| (u.to_text(), i))
        .collect();
    assert_eq!(index.len(), group.len());
    let mut counts = vec![0usize; group.len()];
    let mut r = rng(seed);
    let total = per_bin * group.len();
    for _ in 0..total {
        let u = CliffordTableau::random(n, &mut r);
        counts[index[&u.to_text()]] += 1;
    }
    let e = per_bin as f64;
    let stat: f64 = counts.iter().map(|&c| (c as f64 - e).powi(2) / e).sum();
    let dist = ChiSquared::new((group.len() - 1) as f64).unwrap();
    1.0 - dist.cdf(stat)
}

#[test]
fn random_clifford_is_uniform_on_one_qubit() {
    assert!(chi_square_uniform(1, 2000, 4) > 1e-3);
}

#[test]
fn random_clifford_is_uniform_on_two_qubits() {
    assert!(chi_square_uniform(2, 20, 5) > 1e-3);
}

#[test]
fn one_qubit_group_is_a_one_design() {
    let group = CliffordTableau::enumerate(1).unwrap();
    let mut avg = vec![Complex64::new(0.0, 0.0); 4];
    for u in &group {
        let rho = DensityMatrix::from_stabilizer(&StabilizerMixedState::from_tableau(u)).unwrap();
        for (a, b) in avg.iter_mut().zip(rho.entries()) {
            *a += b / group.len() as f64;
        }
    }
    let half = DensityMatrix::maximally_mixed(1).unwrap();
    assert!(max_diff(&avg, half.entries()) < 1e-15);
}

#[test]
fn stabilizer_purities_match_dense() {
    let mut r = rng(6);
    for _ in 0..400 {
        let n = r.random_range(1..=4);
        let c = random_clifford_circuit(n, 25, &mut r);
        let u = CliffordTableau::from_circuit(&c).unwrap();
        let stab = StabilizerMixedState::from_tableau(&u);
        let psi = DenseState::simulate(&c).unwrap();
        let dense = DensityMatrix::from_stabilizer(&stab).unwrap();
        assert!(max_diff(dense.entries(), psi.density_matrix().unwrap().entries()) < 1e-12);
        for reg in all_regions(n) {
            let exact = stab.marginal_purity(&reg).unwrap().to_f64();
            let num = psi.reduced_density(&reg).unwrap().purity();
            assert!((exact - num).abs() < 1e-12);
            let red = DensityMatrix::from_stabilizer(&stab.partial_trace(&reg).unwrap()).unwrap();
            assert!(max_diff(red.entries(), psi.reduced_density(&reg).unwrap().entries()) < 1e-12);
        }
    }
}

#[test]
fn stabilizer_purity_fast_path_matches_naive_sum() {
    let mut r = rng(7);
    for n in 1..=4 {
        let psi = random_state(n, &mut r);
        let rho = psi.density_matrix().unwrap();
        assert!((rho.stab_purity() - rho.stab_purity_naive()).abs() < 1e-13);
        let half = psi.reduced_density(&Region::range(0, n.div_ceil(2))).unwrap();
        assert!((half.stab_purity() - half.stab_purity_naive()).abs() < 1e-13);
    }
}

#[test]
fn unit_entropy_values() {
    let m2_t = (4.0f64 / 3.0).log2();
    for k in 1..=4 {
        let r = t_product(k).density_matrix().unwrap().se_report().unwrap();
        assert!((r.m2 - k as f64 * m2_t).abs() < 1e-10, "k = {k}: {}", r.m2);
    }
    let mut r = rng(8);
    for _ in 0..50 {
        let n = r.random_range(1..=5);
        let c = random_clifford_circuit(n, 30, &mut r);
        let rep = DenseState::simulate(&c).unwrap().density_matrix().unwrap().se_report().unwrap();
        assert!(rep.m2.abs() < 1e-10);
        assert!(rep.m_lin.abs() < 1e-12);
    }
}

#[test]
fn entropy_is_clifford_invariant() {
    let mut r = rng(9);
    let psi = t_product(3);
    let base = psi.density_matrix().unwrap().se_report().unwrap().m2;
    for _ in 0..10 {
        let mut s = psi.clone();
        s.apply_circuit(&random_clifford_circuit(3, 20, &mut r)).unwrap();
        let m2 = s.density_matrix().unwrap().se_report().unwrap().m2;
        assert!((m2 - base).abs() < 1e-10);
    }
}

#[test]
fn fourth_moment_decomposition_is_exact_on_small_orbits() {
    let mut r = rng(10);
    for n in 1..=2 {
        for _ in 0..3 {
            let psi = random_state(n, &mut r);
            for reg in all_regions(n) {
                let fm = fourth_moment_exact(&psi, &reg).unwrap();
                assert!((fm.enumerated - fm.predicted).abs() < 1e-12, "{fm:?}");
            }
        }
    }
}

#[test]
fn prop1_exhaustive_two_qubits() {
    let psi = t_product(2);
    let m_lin = psi.density_matrix().unwrap().se_report().unwrap().m_lin;
    let e = Region::range(0, 1);
    let f = Region::range(1, 2);
    let (pe, pf) = prop1_exact(m_lin, 2, 1).unwrap();
    let se = orbit_exhaustive(&psi, &e).unwrap();
    let sf = orbit_exhaustive(&psi, &f).unwrap();
    let ae = ratio_of_averages(&se, 2.0, 0).unwrap().mean;
    let af = ratio_of_averages(&sf, 2.0, 0).unwrap().mean;
    assert!((ae - pe).abs() < 1e-12, "{ae} vs {pe}");
    assert!((af - pf).abs() < 1e-12, "{af} vs {pf}");
    assert!((ae + af - m_lin).abs() < 1e-12);
}

#[test]
fn prop1_exhaustive_one_qubit_is_identity() {
    let psi = t_product(1);
    let m_lin = psi.density_matrix().unwrap().se_report().unwrap().m_lin;
    let s = orbit_exhaustive(&psi, &Region::full(1)).unwrap();
    let a = ratio_of_averages(&s, 2.0, 0).unwrap().mean;
    assert!((a - prop1_exact(m_lin, 1, 1).unwrap().0).abs() < 1e-12);
    assert!((a - m_lin).abs() < 1e-12);
}

#[test]
fn page_purity_mc() {
    // the orbit of any pure state under a 2-design: E[Pur(ψ_E)] is Page's value
    let psi = DenseState::zero(6).unwrap();
    let e = Region::range(0, 4);
    let s = orbit_samples(&psi, &e, 2000, 11).unwrap();
    let est = McEstimate::from_values(&s.iter().map(|x| x.purity).collect::<Vec<_>>(), 11).unwrap();
    let target = page_purity(16, 4).unwrap().to_f64().unwrap();
    assert!(est.within(target, 4.0), "{est:?} vs {target}");
}

#[test]
fn cleansed_state_matches_dense_partial_trace() {
    let mut r = rng(12);
    for _ in 0..60 {
        let n = r.random_range(2..=7);
        let n_f = r.random_range(1..n);
        let t = r.random_range(0..=n_f.min(3));
        let (c, part) = build_doped_circuit_nf(n, t, n_f, r.random()).unwrap();
        let out = c.cleanse(&part).unwrap();
        // magic sits on Y, so the Ȳ marginal is the stabilizer state phi_bar
        let dense = c.dense_phi_bar(&part).unwrap();
        let stab = DensityMatrix::from_stabilizer(&out.phi_bar).unwrap();
        assert!(dense.max_abs_diff(&stab) < 1e-10);
        assert!(cleansed_se_e(&c, &part).unwrap().abs() < 1e-9);
    }
}

#[test]
fn doped_circuit_text_round_trips() {
    let (c, _) = build_doped_circuit_nf(6, 3, 2, 99).unwrap();
    let flat = c.flattened();
    let back = Circuit::parse(&flat.to_text(), Some(6)).unwrap();
    assert_eq!(back, flat);
    assert_eq!(back.gates.iter().filter(|g| matches!(g, Gate::T(_))).count(), 3);
}
