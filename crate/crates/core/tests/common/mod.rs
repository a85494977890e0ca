#![allow(dead_code)]

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;
use stabcleanse::dense::DenseState;
use stabcleanse::{Circuit, Gate, PauliString};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform random gate string over {H, S, SDG, CX}.
pub fn random_clifford_circuit<R: Rng>(n: usize, len: usize, r: &mut R) -> Circuit {
    let mut c = Circuit::new(n);
    for _ in 0..len {
        let q = r.random_range(0..n);
        let g = match r.random_range(0..4) {
            0 => Gate::H(q),
            1 => Gate::S(q),
            2 => Gate::Sdg(q),
            _ if n > 1 => {
                let mut p = r.random_range(0..n - 1);
                if p >= q {
                    p += 1;
                }
                Gate::CX(q, p)
            }
            _ => Gate::H(q),
        };
        c.push(g).unwrap();
    }
    c
}

pub fn random_pauli<R: Rng>(n: usize, r: &mut R) -> PauliString {
    let mut p = PauliString::identity(n);
    for q in 0..n {
        p.set(q, r.random(), r.random());
    }
    p.set_phase(r.random_range(0..4));
    p
}

/// Normalized Gaussian amplitudes.
pub fn random_state<R: Rng>(n: usize, r: &mut R) -> DenseState {
    let mut a: Vec<Complex64> = (0..1usize << n)
        .map(|_| Complex64::new(r.random::<f64>() - 0.5, r.random::<f64>() - 0.5))
        .collect();
    let norm = a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    for z in &mut a {
        *z /= norm;
    }
    DenseState::from_amplitudes(n, a).unwrap()
}

/// `(T|+⟩)^{⊗k}`.
pub fn t_product(k: usize) -> DenseState {
    let mut c = Circuit::new(k);
    for q in 0..k {
        c.push(Gate::H(q)).unwrap();
        c.push(Gate::T(q)).unwrap();
    }
    DenseState::simulate(&c).unwrap()
}

pub fn max_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}
