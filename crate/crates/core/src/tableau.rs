//! Clifford unitaries stored as the images of the Pauli generators.
//!
//! Entry `i < n` of `images` is `U X_i U†`, entry `n + i` is `U Z_i U†`.
//! Two unitaries with the same tableau differ by a global phase only.

use std::collections::{HashSet, VecDeque};
use std::fmt;

use rand::Rng;

use crate::circuit::{check_permutation, Circuit, Gate};
use crate::error::{Error, Result};
use crate::gf2::BitMatrix;
use crate::pauli::{Pauli1, PauliString};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CliffordTableau {
    n: usize,
    images: Vec<PauliString>,
}

impl CliffordTableau {
    pub fn identity(n: usize) -> Self {
        let mut images = Vec::with_capacity(2 * n);
        for p in [Pauli1::X, Pauli1::Z] {
            for q in 0..n {
                images.push(PauliString::single(n, q, p).expect("in range"));
            }
        }
        CliffordTableau { n, images }
    }

    /// Builds a tableau from explicit images, checking that they are
    /// Hermitian and satisfy the canonical commutation relations.
    pub fn from_images(images: Vec<PauliString>) -> Result<Self> {
        if images.len() % 2 != 0 {
            return Err(Error::InvalidState("odd number of images".into()));
        }
        let n = images.len() / 2;
        for im in &images {
            if im.num_qubits() != n {
                return Err(Error::SizeMismatch {
                    left: im.num_qubits(),
                    right: n,
                });
            }
        }
        let t = CliffordTableau { n, images };
        if !t.is_symplectic() {
            return Err(Error::InvalidState(
                "images violate the commutation relations".into(),
            ));
        }
        Ok(t)
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn images(&self) -> &[PauliString] {
        &self.images
    }

    pub fn x_image(&self, q: usize) -> &PauliString {
        &self.images[q]
    }

    pub fn z_image(&self, q: usize) -> &PauliString {
        &self.images[self.n + q]
    }

    /// Images are Hermitian, X_i and Z_j images anticommute iff `i == j`,
    /// and all other pairs commute.
    pub fn is_symplectic(&self) -> bool {
        let n = self.n;
        if self.images.iter().any(|p| !p.is_hermitian() || p.is_identity_bits()) {
            return false;
        }
        for a in 0..2 * n {
            for b in a + 1..2 * n {
                let should_anti = b == a + n && a < n;
                if self.images[a].commutes_unchecked(&self.images[b]) == should_anti {
                    return false;
                }
            }
        }
        true
    }

    /// The 2n x 2n symplectic matrix: row `r` holds the `(x | z)` bits of image `r`.
    pub fn symplectic_matrix(&self) -> BitMatrix {
        let n = self.n;
        let mut m = BitMatrix::zeros(2 * n, 2 * n);
        for (r, im) in self.images.iter().enumerate() {
            for q in 0..n {
                m.set(r, q, im.x(q));
                m.set(r, q + n, im.z(q));
            }
        }
        m
    }

    /// Conjugates every image by `gate`, i.e. replaces `U` by `gate · U`.
    pub fn apply_gate(&mut self, gate: &Gate) -> Result<()> {
        gate.check(self.n)?;
        match gate {
            Gate::T(_) | Gate::Tdg(_) => return Err(Error::UnsupportedGate(gate.to_string())),
            _ => {}
        }
        for im in &mut self.images {
            conj_gate_unchecked(im, gate);
        }
        Ok(())
    }

    pub fn from_circuit(c: &Circuit) -> Result<Self> {
        let mut t = Self::identity(c.n);
        for g in &c.gates {
            t.apply_gate(g)?;
        }
        Ok(t)
    }

    /// `U P U†`.
    pub fn conjugate(&self, p: &PauliString) -> Result<PauliString> {
        if p.num_qubits() != self.n {
            return Err(Error::SizeMismatch {
                left: p.num_qubits(),
                right: self.n,
            });
        }
        Ok(self.conjugate_unchecked(p))
    }

    /// As `conjugate_unchecked`, adding `2n` bit operations per image
    /// multiplied in.
    pub(crate) fn conjugate_counted(&self, p: &PauliString, ops: &mut u64) -> PauliString {
        let ones: u32 = p.x_words().iter().chain(p.z_words()).map(|w| w.count_ones()).sum();
        *ops += ones as u64 * 2 * self.n as u64;
        self.conjugate_unchecked(p)
    }

    pub(crate) fn conjugate_unchecked(&self, p: &PauliString) -> PauliString {
        let n = self.n;
        let mut acc = PauliString::identity(n);
        // σ(x,z) = i^{|x&z|} Π X^x Π Z^z
        acc.set_phase(((p.phase() as u32 + p.y_count()) & 3) as u8);
        for (k, &w) in p.x_words().iter().enumerate() {
            let mut w = w;
            while w != 0 {
                let q = k * 64 + w.trailing_zeros() as usize;
                acc.mul_assign_right_unchecked(&self.images[q]);
                w &= w - 1;
            }
        }
        for (k, &w) in p.z_words().iter().enumerate() {
            let mut w = w;
            while w != 0 {
                let q = k * 64 + w.trailing_zeros() as usize;
                acc.mul_assign_right_unchecked(&self.images[n + q]);
                w &= w - 1;
            }
        }
        acc
    }

    /// The tableau of `self · first` (apply `first`, then `self`).
    pub fn compose(&self, first: &CliffordTableau) -> Result<CliffordTableau> {
        self.compose_counted(first, &mut 0)
    }

    pub(crate) fn compose_counted(&self, first: &CliffordTableau, ops: &mut u64) -> Result<CliffordTableau> {
        if first.n != self.n {
            return Err(Error::SizeMismatch {
                left: self.n,
                right: first.n,
            });
        }
        Ok(CliffordTableau {
            n: self.n,
            images: first
                .images
                .iter()
                .map(|im| self.conjugate_counted(im, ops))
                .collect(),
        })
    }

    pub fn inverse(&self) -> CliffordTableau {
        self.inverse_counted(&mut 0)
    }

    pub(crate) fn inverse_counted(&self, ops: &mut u64) -> CliffordTableau {
        let n = self.n;
        *ops += 4 * (n * n) as u64;
        let omega = |c: usize| if c < n { c + n } else { c - n };
        let mut images = Vec::with_capacity(2 * n);
        for a in 0..2 * n {
            let mut p = PauliString::identity(n);
            for q in 0..n {
                let xb = self.images[omega(q)].symplectic_bit(omega(a));
                let zb = self.images[omega(q + n)].symplectic_bit(omega(a));
                p.set(q, xb, zb);
            }
            // fix the sign so that U p U† = +generator
            let back = self.conjugate_counted(&p, ops);
            if back.phase() == 2 {
                p.set_phase(2);
            }
            images.push(p);
        }
        CliffordTableau { n, images }
    }

    /// `T_π`: moves qubit `i` to `perm[i]`.
    pub fn permutation(perm: &[usize]) -> Result<CliffordTableau> {
        let n = perm.len();
        check_permutation(perm, n)?;
        let mut t = Self::identity(n);
        t.apply_gate(&Gate::Perm(perm.to_vec()))?;
        Ok(t)
    }

    /// Uniformly random Clifford (modulo global phase), canonical-form sampler.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CliffordTableau {
        if n == 0 {
            return Self::identity(0);
        }
        let (had, perm) = sample_qmallows(n, rng);

        let sym = |rng: &mut R| {
            let mut g = BitMatrix::zeros(n, n);
            for i in 0..n {
                g.set(i, i, rng.random());
            }
            for i in 0..n {
                for j in 0..i {
                    let b = rng.random();
                    g.set(i, j, b);
                    g.set(j, i, b);
                }
            }
            g
        };
        let tril = |rng: &mut R| {
            let mut d = BitMatrix::identity(n);
            for i in 0..n {
                for j in 0..i {
                    d.set(i, j, rng.random());
                }
            }
            d
        };
        let gamma1 = sym(rng);
        let gamma2 = sym(rng);
        let delta1 = tril(rng);
        let delta2 = tril(rng);

        let zero = BitMatrix::zeros(n, n);
        let block = |g: &BitMatrix, d: &BitMatrix| {
            let inv_t = d.inverse().expect("unit triangular").transpose();
            BitMatrix::from_blocks(d, &zero, &g.mul(d), &inv_t)
        };
        let table1 = block(&gamma1, &delta1);
        let table2 = block(&gamma2, &delta2);

        let mut table = BitMatrix::zeros(2 * n, 2 * n);
        for i in 0..n {
            table.row_mut(i).copy_from_slice(table2.row(perm[i]));
            table.row_mut(n + i).copy_from_slice(table2.row(n + perm[i]));
        }
        for (i, &h) in had.iter().enumerate() {
            if h {
                table.swap_rows(i, i + n);
            }
        }
        let m = table1.mul(&table);

        let images = (0..2 * n)
            .map(|r| {
                let mut p = PauliString::identity(n);
                for q in 0..n {
                    p.set(q, m.get(r, q), m.get(r, q + n));
                }
                if rng.random::<bool>() {
                    p.set_phase(2);
                }
                p
            })
            .collect();
        CliffordTableau { n, images }
    }

    /// Every Clifford on `n ≤ 2` qubits modulo global phase, in BFS order
    /// from the identity under H, S and CX.
    pub fn enumerate(n: usize) -> Result<Vec<CliffordTableau>> {
        if n > 2 {
            return Err(Error::TooLarge {
                what: "n for group enumeration",
                value: n,
                max: 2,
            });
        }
        let mut gens = Vec::new();
        for q in 0..n {
            gens.push(Gate::H(q));
            gens.push(Gate::S(q));
        }
        for a in 0..n {
            for b in 0..n {
                if a != b {
                    gens.push(Gate::CX(a, b));
                }
            }
        }
        let start = Self::identity(n);
        let mut seen = HashSet::new();
        seen.insert(start.clone());
        let mut order = vec![start.clone()];
        let mut queue = VecDeque::from([start]);
        while let Some(t) = queue.pop_front() {
            for g in &gens {
                let mut u = t.clone();
                u.apply_gate(g)?;
                if seen.insert(u.clone()) {
                    order.push(u.clone());
                    queue.push_back(u);
                }
            }
        }
        Ok(order)
    }

    /// A gate list over {H, S, SDG, CX, PERM} implementing `U` up to a
    /// global phase.
    pub fn to_circuit(&self) -> Circuit {
        let n = self.n;
        let mut w = self.clone();
        let mut gates: Vec<Gate> = Vec::new();
        let mut apply = |w: &mut CliffordTableau, g: Gate| {
            for im in &mut w.images {
                conj_gate_unchecked(im, &g);
            }
            gates.push(g);
        };

        for i in 0..n {
            // image of X_i -> ±X_i
            if !(i..n).any(|k| w.images[i].x(k)) {
                for k in i..n {
                    if w.images[i].z(k) {
                        apply(&mut w, Gate::H(k));
                    }
                }
            }
            let k = (i..n).find(|&k| w.images[i].x(k)).expect("nontrivial image");
            if k != i {
                let mut p: Vec<usize> = (0..n).collect();
                p.swap(i, k);
                apply(&mut w, Gate::Perm(p));
            }
            for k in i + 1..n {
                if w.images[i].x(k) {
                    apply(&mut w, Gate::CX(i, k));
                }
            }
            if w.images[i].z(i) {
                apply(&mut w, Gate::S(i));
            }
            for k in i + 1..n {
                if w.images[i].z(k) {
                    apply(&mut w, Gate::H(k));
                    apply(&mut w, Gate::CX(i, k));
                }
            }

            // image of Z_i -> ±Z_i, keeping X_i fixed
            let zi = n + i;
            if w.images[zi].x(i) {
                apply(&mut w, Gate::H(i));
                apply(&mut w, Gate::S(i));
                apply(&mut w, Gate::H(i));
            }
            for k in i + 1..n {
                match (w.images[zi].x(k), w.images[zi].z(k)) {
                    (true, true) => {
                        apply(&mut w, Gate::Sdg(k));
                        apply(&mut w, Gate::H(k));
                    }
                    (true, false) => apply(&mut w, Gate::H(k)),
                    _ => {}
                }
            }
            for k in i + 1..n {
                if w.images[zi].z(k) {
                    apply(&mut w, Gate::CX(k, i));
                }
            }
        }
        for i in 0..n {
            if w.images[i].phase() == 2 {
                // Z_i flips the sign of X_i only
                apply(&mut w, Gate::S(i));
                apply(&mut w, Gate::S(i));
            }
            if w.images[n + i].phase() == 2 {
                apply(&mut w, Gate::H(i));
                apply(&mut w, Gate::S(i));
                apply(&mut w, Gate::S(i));
                apply(&mut w, Gate::H(i));
            }
        }
        debug_assert!(w == CliffordTableau::identity(n));
        Circuit {
            n,
            gates: gates.iter().rev().map(Gate::inverse).collect(),
        }
    }

    /// Canonical text: one image per line, X images first.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for im in &self.images {
            s.push_str(&im.to_string());
            s.push('\n');
        }
        s
    }
}

pub(crate) fn conj_gate_unchecked(p: &mut PauliString, gate: &Gate) {
    match gate {
        Gate::H(q) => p.conj_h(*q),
        Gate::S(q) => p.conj_s(*q),
        Gate::Sdg(q) => p.conj_sdg(*q),
        Gate::CX(c, t) => p.conj_cx(*c, *t),
        Gate::Perm(perm) => p.conj_perm(perm),
        Gate::T(_) | Gate::Tdg(_) => unreachable!("non-Clifford gate"),
    }
}

/// Quantum Mallows sample: a Hadamard pattern and a permutation. Index
/// `j` in `[0, 2m)` is drawn with weight `2^-j` from fair coin flips.
fn sample_qmallows<R: Rng + ?Sized>(n: usize, rng: &mut R) -> (Vec<bool>, Vec<usize>) {
    let mut had = vec![false; n];
    let mut perm = vec![0; n];
    let mut inds: Vec<usize> = (0..n).collect();
    for i in 0..n {
        let m = n - i;
        let j = loop {
            let mut j = 0;
            while !rng.random::<bool>() {
                j += 1;
                if j >= 2 * m {
                    break;
                }
            }
            if j < 2 * m {
                break j;
            }
        };
        had[i] = j < m;
        let k = if j < m { j } else { 2 * m - j - 1 };
        perm[i] = inds.remove(k);
    }
    (had, perm)
}

impl fmt::Debug for CliffordTableau {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CliffordTableau(n={}, ", self.n)?;
        f.debug_list().entries(self.images.iter()).finish()?;
        f.write_str(")")
    }
}
