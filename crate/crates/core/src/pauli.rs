//! Symplectic representation of n-qubit Pauli operators.
//!
//! A [`PauliString`] stores one x bit and one z bit per qubit plus an
//! exponent `phase` of `i`. The operator it denotes is
//! `i^phase * σ(x_0, z_0) ⊗ ... ⊗ σ(x_{n-1}, z_{n-1})` where
//! `σ(0,0) = I`, `σ(1,0) = X`, `σ(0,1) = Z` and `σ(1,1) = Y = i·X·Z`.
//! With this convention `X·Z = -i·Y`, i.e. phase 3 with bits (1,1).
//!
//! Text form: an optional prefix from `+`, `-`, `+i`, `-i` followed by one
//! character per qubit, qubit 0 first.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub(crate) fn words_for(n: usize) -> usize {
    n.div_ceil(64)
}

#[inline]
pub(crate) fn get_bit(words: &[u64], i: usize) -> bool {
    (words[i >> 6] >> (i & 63)) & 1 == 1
}

#[inline]
pub(crate) fn set_bit(words: &mut [u64], i: usize, v: bool) {
    let mask = 1u64 << (i & 63);
    if v {
        words[i >> 6] |= mask;
    } else {
        words[i >> 6] &= !mask;
    }
}

/// An n-qubit Pauli operator with a power-of-i phase.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PauliString {
    n: usize,
    x: Vec<u64>,
    z: Vec<u64>,
    phase: u8,
}

/// Single-qubit Pauli letter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Pauli1 {
    I,
    X,
    Y,
    Z,
}

impl Pauli1 {
    pub fn bits(self) -> (bool, bool) {
        match self {
            Pauli1::I => (false, false),
            Pauli1::X => (true, false),
            Pauli1::Y => (true, true),
            Pauli1::Z => (false, true),
        }
    }

    pub fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Pauli1::I,
            (true, false) => Pauli1::X,
            (true, true) => Pauli1::Y,
            (false, true) => Pauli1::Z,
        }
    }

    fn letter(self) -> char {
        match self {
            Pauli1::I => 'I',
            Pauli1::X => 'X',
            Pauli1::Y => 'Y',
            Pauli1::Z => 'Z',
        }
    }
}

impl PauliString {
    pub fn identity(n: usize) -> Self {
        let w = words_for(n);
        PauliString {
            n,
            x: vec![0; w],
            z: vec![0; w],
            phase: 0,
        }
    }

    /// A single-qubit Pauli `p` on qubit `q`, identity elsewhere.
    pub fn single(n: usize, q: usize, p: Pauli1) -> Result<Self> {
        if q >= n {
            return Err(Error::QubitOutOfRange { qubit: q, n });
        }
        let mut out = Self::identity(n);
        let (x, z) = p.bits();
        out.set(q, x, z);
        Ok(out)
    }

    /// Builds a string from explicit bit vectors and phase exponent.
    pub fn from_bits(x: &[bool], z: &[bool], phase: u8) -> Result<Self> {
        if x.len() != z.len() {
            return Err(Error::SizeMismatch {
                left: x.len(),
                right: z.len(),
            });
        }
        let mut out = Self::identity(x.len());
        for (q, (&xb, &zb)) in x.iter().zip(z).enumerate() {
            out.set(q, xb, zb);
        }
        out.phase = phase & 3;
        Ok(out)
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn phase(&self) -> u8 {
        self.phase
    }

    pub fn set_phase(&mut self, phase: u8) {
        self.phase = phase & 3;
    }

    pub fn x_words(&self) -> &[u64] {
        &self.x
    }

    pub fn z_words(&self) -> &[u64] {
        &self.z
    }

    #[inline]
    pub fn x(&self, q: usize) -> bool {
        get_bit(&self.x, q)
    }

    #[inline]
    pub fn z(&self, q: usize) -> bool {
        get_bit(&self.z, q)
    }

    pub fn get(&self, q: usize) -> Pauli1 {
        Pauli1::from_bits(self.x(q), self.z(q))
    }

    #[inline]
    pub fn set(&mut self, q: usize, x: bool, z: bool) {
        set_bit(&mut self.x, q, x);
        set_bit(&mut self.z, q, z);
    }

    /// Bit of the concatenated `(x | z)` row, column `c < 2n`.
    #[inline]
    pub fn symplectic_bit(&self, c: usize) -> bool {
        if c < self.n {
            self.x(c)
        } else {
            self.z(c - self.n)
        }
    }

    /// True when every qubit carries the identity (phase ignored).
    pub fn is_identity_bits(&self) -> bool {
        self.x.iter().chain(&self.z).all(|&w| w == 0)
    }

    /// Hermitian strings have phase 0 or 2.
    pub fn is_hermitian(&self) -> bool {
        self.phase & 1 == 0
    }

    pub fn weight(&self) -> usize {
        self.x
            .iter()
            .zip(&self.z)
            .map(|(a, b)| (a | b).count_ones() as usize)
            .sum()
    }

    /// Number of qubits carrying `Y`.
    pub fn y_count(&self) -> u32 {
        self.x.iter().zip(&self.z).map(|(a, b)| (a & b).count_ones()).sum()
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(Error::SizeMismatch {
                left: self.n,
                right: other.n,
            });
        }
        Ok(())
    }

    /// Exponent of i picked up when multiplying the bare letters `self * other`.
    fn product_phase(&self, other: &Self) -> u8 {
        let mut pos = 0u32;
        let mut neg = 0u32;
        for k in 0..self.x.len() {
            let (ax, az, bx, bz) = (self.x[k], self.z[k], other.x[k], other.z[k]);
            // XY = iZ, YZ = iX, ZX = iY
            let p = (ax & !az & bx & bz) | (ax & az & !bx & bz) | (!ax & az & bx & !bz);
            // YX = -iZ, ZY = -iX, XZ = -iY
            let m = (ax & az & bx & !bz) | (!ax & az & bx & bz) | (ax & !az & !bx & bz);
            pos += p.count_ones();
            neg += m.count_ones();
        }
        ((self.phase as u32 + other.phase as u32 + pos + 4 * neg - neg) % 4) as u8
    }

    /// The product `self * other`.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let mut out = self.clone();
        out.mul_assign_right_unchecked(other);
        Ok(out)
    }

    /// `self <- self * other`, sizes assumed equal.
    pub(crate) fn mul_assign_right_unchecked(&mut self, other: &Self) {
        self.phase = self.product_phase(other);
        for k in 0..self.x.len() {
            self.x[k] ^= other.x[k];
            self.z[k] ^= other.z[k];
        }
    }

    /// True iff the symplectic form `a.x·b.z + a.z·b.x` vanishes mod 2.
    pub fn commutes(&self, other: &Self) -> Result<bool> {
        self.check_same(other)?;
        Ok(self.commutes_unchecked(other))
    }

    pub(crate) fn commutes_unchecked(&self, other: &Self) -> bool {
        let mut acc = 0u32;
        for k in 0..self.x.len() {
            acc ^= ((self.x[k] & other.z[k]) ^ (self.z[k] & other.x[k])).count_ones() & 1;
        }
        acc == 0
    }

    /// Restriction to `region`, or `None` when the string acts
    /// non-trivially outside it (its partial trace then vanishes).
    pub fn restrict(&self, region: &Region) -> Option<PauliString> {
        let mut mask = vec![0u64; self.x.len()];
        for &q in region.indices() {
            if q >= self.n {
                return None;
            }
            set_bit(&mut mask, q, true);
        }
        let outside = self
            .x
            .iter()
            .zip(&self.z)
            .zip(&mask)
            .any(|((a, b), m)| (a | b) & !m != 0);
        if outside {
            return None;
        }
        let mut out = PauliString::identity(region.len());
        for (j, &q) in region.indices().iter().enumerate() {
            out.set(j, self.x(q), self.z(q));
        }
        out.phase = self.phase;
        Some(out)
    }

    /// Places `self` on the qubits `positions` of an `n`-qubit register.
    pub fn embed(&self, n: usize, positions: &[usize]) -> Result<PauliString> {
        if positions.len() != self.n {
            return Err(Error::SizeMismatch {
                left: positions.len(),
                right: self.n,
            });
        }
        let mut out = PauliString::identity(n);
        for (j, &q) in positions.iter().enumerate() {
            if q >= n {
                return Err(Error::QubitOutOfRange { qubit: q, n });
            }
            out.set(q, self.x(j), self.z(j));
        }
        out.phase = self.phase;
        Ok(out)
    }

    // Conjugation updates `P -> G P G†`. Indices are assumed valid.

    pub(crate) fn conj_h(&mut self, q: usize) {
        let (x, z) = (self.x(q), self.z(q));
        if x && z {
            self.phase = (self.phase + 2) & 3;
        }
        self.set(q, z, x);
    }

    pub(crate) fn conj_s(&mut self, q: usize) {
        let (x, z) = (self.x(q), self.z(q));
        if x {
            if z {
                self.phase = (self.phase + 2) & 3;
            }
            set_bit(&mut self.z, q, !z);
        }
    }

    pub(crate) fn conj_sdg(&mut self, q: usize) {
        let (x, z) = (self.x(q), self.z(q));
        if x {
            if !z {
                self.phase = (self.phase + 2) & 3;
            }
            set_bit(&mut self.z, q, !z);
        }
    }

    pub(crate) fn conj_cx(&mut self, c: usize, t: usize) {
        let (xc, zc, xt, zt) = (self.x(c), self.z(c), self.x(t), self.z(t));
        if xc && zt && !(xt ^ zc) {
            self.phase = (self.phase + 2) & 3;
        }
        set_bit(&mut self.x, t, xt ^ xc);
        set_bit(&mut self.z, c, zc ^ zt);
    }

    /// Moves the content of qubit `i` to qubit `perm[i]`.
    pub(crate) fn conj_perm(&mut self, perm: &[usize]) {
        let mut out = PauliString::identity(self.n);
        for (i, &p) in perm.iter().enumerate() {
            out.set(p, self.x(i), self.z(i));
        }
        out.phase = self.phase;
        *self = out;
    }

    /// Bytes uniquely identifying the operator (used for hashing and keys).
    pub fn key_bytes(&self, out: &mut Vec<u8>) {
        for w in self.x.iter().chain(&self.z) {
            out.extend_from_slice(&w.to_le_bytes());
        }
        out.push(self.phase);
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prefix = match self.phase {
            0 => "+",
            1 => "+i",
            2 => "-",
            _ => "-i",
        };
        f.write_str(prefix)?;
        for q in 0..self.n {
            write!(f, "{}", self.get(q).letter())?;
        }
        Ok(())
    }
}

impl fmt::Debug for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PauliString({self})")
    }
}

impl FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (phase, body) = if let Some(rest) = s.strip_prefix("+i") {
            (1, rest)
        } else if let Some(rest) = s.strip_prefix("-i") {
            (3, rest)
        } else if let Some(rest) = s.strip_prefix('+') {
            (0, rest)
        } else if let Some(rest) = s.strip_prefix('-') {
            (2, rest)
        } else {
            (0, s)
        };
        let mut out = PauliString::identity(body.chars().count());
        for (q, c) in body.chars().enumerate() {
            let p = match c {
                'I' => Pauli1::I,
                'X' => Pauli1::X,
                'Y' => Pauli1::Y,
                'Z' => Pauli1::Z,
                other => {
                    return Err(Error::Parse {
                        line: 1,
                        msg: format!("unexpected character {other:?} in Pauli string"),
                    })
                }
            };
            let (x, z) = p.bits();
            out.set(q, x, z);
        }
        out.phase = phase;
        Ok(out)
    }
}

impl Serialize for PauliString {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for PauliString {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A set of qubit positions, kept sorted and free of duplicates.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Region {
    indices: Vec<usize>,
}

impl Region {
    /// Validates `indices` against an `n`-qubit register. Order of the
    /// input does not matter; duplicates are rejected.
    pub fn new(mut indices: Vec<usize>, n: usize) -> Result<Self> {
        indices.sort_unstable();
        if let Some(w) = indices.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::InvalidRegion(format!("duplicate qubit {}", w[0])));
        }
        if let Some(&q) = indices.last() {
            if q >= n {
                return Err(Error::QubitOutOfRange { qubit: q, n });
            }
        }
        Ok(Region { indices })
    }

    pub fn range(start: usize, end: usize) -> Self {
        Region {
            indices: (start..end).collect(),
        }
    }

    pub fn full(n: usize) -> Self {
        Self::range(0, n)
    }

    pub fn empty() -> Self {
        Region { indices: vec![] }
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn contains(&self, q: usize) -> bool {
        self.indices.binary_search(&q).is_ok()
    }

    pub fn complement(&self, n: usize) -> Region {
        Region {
            indices: (0..n).filter(|q| !self.contains(*q)).collect(),
        }
    }

    pub fn union(&self, other: &Region) -> Region {
        let mut v: Vec<usize> = self.indices.iter().chain(&other.indices).copied().collect();
        v.sort_unstable();
        v.dedup();
        Region { indices: v }
    }

    pub fn intersection(&self, other: &Region) -> Region {
        Region {
            indices: self
                .indices
                .iter()
                .copied()
                .filter(|q| other.contains(*q))
                .collect(),
        }
    }

    pub fn difference(&self, other: &Region) -> Region {
        Region {
            indices: self
                .indices
                .iter()
                .copied()
                .filter(|q| !other.contains(*q))
                .collect(),
        }
    }

    pub fn is_valid_for(&self, n: usize) -> bool {
        self.indices.last().is_none_or(|&q| q < n)
    }

    pub(crate) fn check(&self, n: usize) -> Result<()> {
        match self.indices.last() {
            Some(&q) if q >= n => Err(Error::QubitOutOfRange { qubit: q, n }),
            _ => Ok(()),
        }
    }
}
