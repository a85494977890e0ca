//! Mixed stabilizer states `ρ = 2^-n Σ_{g ∈ ⟨S⟩} g` and their exact marginals.

use std::fmt;
use std::str::FromStr;

use crate::circuit::Gate;
use crate::error::{Error, Result};
use crate::pauli::{PauliString, Region};
use crate::tableau::{conj_gate_unchecked, CliffordTableau};

/// `2^log2`, kept as an integer exponent so no rounding ever happens.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Dyadic {
    pub log2: i64,
}

impl Dyadic {
    pub fn to_f64(self) -> f64 {
        (self.log2 as f64).exp2()
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.log2 >= 0 {
            write!(f, "{}", 1u128 << self.log2.min(127))
        } else {
            write!(f, "2^{}", self.log2)
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct StabilizerMixedState {
    n: usize,
    gens: Vec<PauliString>,
}

impl StabilizerMixedState {
    /// `|0…0⟩`.
    pub fn zero_state(n: usize) -> Self {
        let gens = (0..n)
            .map(|q| PauliString::single(n, q, crate::pauli::Pauli1::Z).expect("in range"))
            .collect();
        StabilizerMixedState { n, gens }
    }

    pub fn maximally_mixed(n: usize) -> Self {
        StabilizerMixedState { n, gens: vec![] }
    }

    /// `U|0…0⟩` for a Clifford `U`.
    pub fn from_tableau(u: &CliffordTableau) -> Self {
        let n = u.num_qubits();
        StabilizerMixedState {
            n,
            gens: (0..n).map(|q| u.z_image(q).clone()).collect(),
        }
    }

    /// Validates and stores the generators as given.
    pub fn from_generators(n: usize, gens: Vec<PauliString>) -> Result<Self> {
        for g in &gens {
            if g.num_qubits() != n {
                return Err(Error::SizeMismatch {
                    left: g.num_qubits(),
                    right: n,
                });
            }
            if !g.is_hermitian() {
                return Err(Error::InvalidState(format!("generator {g} is not Hermitian")));
            }
        }
        let s = StabilizerMixedState { n, gens };
        s.validate()?;
        Ok(s)
    }

    /// Pairwise commuting and independent; together with Hermitian
    /// phases this also rules out `-I` in the group.
    pub fn validate(&self) -> Result<()> {
        if self.gens.len() > self.n {
            return Err(Error::InvalidState("more generators than qubits".into()));
        }
        for (i, a) in self.gens.iter().enumerate() {
            if !a.is_hermitian() {
                return Err(Error::InvalidState(format!("generator {a} is not Hermitian")));
            }
            for b in &self.gens[i + 1..] {
                if !a.commutes_unchecked(b) {
                    return Err(Error::InvalidState(format!("{a} and {b} anticommute")));
                }
            }
        }
        if self.rank() != self.gens.len() {
            return Err(Error::InvalidState("generators are dependent".into()));
        }
        Ok(())
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn num_generators(&self) -> usize {
        self.gens.len()
    }

    pub fn generators(&self) -> &[PauliString] {
        &self.gens
    }

    pub fn is_pure(&self) -> bool {
        self.gens.len() == self.n
    }

    fn rank(&self) -> usize {
        let mut rows = self.gens.clone();
        eliminate(&mut rows, &all_columns(self.n), &mut 0)
    }

    pub fn apply_gate(&mut self, gate: &Gate) -> Result<()> {
        gate.check(self.n)?;
        if !gate.is_clifford() {
            return Err(Error::UnsupportedGate(gate.to_string()));
        }
        for g in &mut self.gens {
            conj_gate_unchecked(g, gate);
        }
        Ok(())
    }

    /// `U ρ U†`.
    pub fn conjugate_by(&self, u: &CliffordTableau) -> Result<Self> {
        self.conjugate_by_counted(u, &mut 0)
    }

    pub(crate) fn conjugate_by_counted(&self, u: &CliffordTableau, ops: &mut u64) -> Result<Self> {
        if u.num_qubits() != self.n {
            return Err(Error::SizeMismatch {
                left: self.n,
                right: u.num_qubits(),
            });
        }
        let gens = self.gens.iter().map(|g| u.conjugate_counted(g, ops)).collect();
        Ok(StabilizerMixedState { n: self.n, gens })
    }

    /// Reduced row echelon form over columns `x_0..x_{n-1}, z_0..z_{n-1}`;
    /// pivots are taken from the lowest available row index.
    pub fn canonicalize(&self) -> Self {
        let mut rows = self.gens.clone();
        let k = eliminate(&mut rows, &all_columns(self.n), &mut 0);
        rows.truncate(k);
        StabilizerMixedState { n: self.n, gens: rows }
    }

    /// Generators of the subgroup acting trivially off `keep`, restricted
    /// to `keep` and canonicalized.
    pub fn partial_trace(&self, keep: &Region) -> Result<Self> {
        let mut ops = 0u64;
        self.partial_trace_counted(keep, &mut ops)
    }

    /// As [`partial_trace`](Self::partial_trace), adding the number of
    /// bit operations spent on elimination to `ops`: one per pivot probe and
    /// `2n` per row multiplication.
    pub fn partial_trace_counted(&self, keep: &Region, ops: &mut u64) -> Result<Self> {
        keep.check(self.n)?;
        let traced = keep.complement(self.n);
        let cols = region_columns(self.n, &traced);
        let mut rows = self.gens.clone();
        let pivots = eliminate(&mut rows, &cols, ops);
        let mut kept: Vec<PauliString> = rows[pivots..]
            .iter()
            .map(|g| g.restrict(keep).expect("zero on traced columns"))
            .collect();
        let m = keep.len();
        let k = eliminate(&mut kept, &all_columns(m), ops);
        kept.truncate(k);
        Ok(StabilizerMixedState { n: m, gens: kept })
    }

    /// `tr ρ_A² = 2^{k_A - n_A}`.
    pub fn marginal_purity(&self, region: &Region) -> Result<Dyadic> {
        let mut ops = 0;
        self.marginal_purity_counted(region, &mut ops)
    }

    pub fn marginal_purity_counted(&self, region: &Region, ops: &mut u64) -> Result<Dyadic> {
        let r = self.partial_trace_counted(region, ops)?;
        Ok(Dyadic {
            log2: r.gens.len() as i64 - region.len() as i64,
        })
    }

    /// Purity of the whole state, `2^{k - n}`.
    pub fn purity(&self) -> Dyadic {
        Dyadic {
            log2: self.gens.len() as i64 - self.n as i64,
        }
    }

    /// Generators placed on `positions` of an `n`-qubit register, identity elsewhere.
    pub fn embed(&self, n: usize, positions: &[usize]) -> Result<Self> {
        let gens = self
            .gens
            .iter()
            .map(|g| g.embed(n, positions))
            .collect::<Result<Vec<_>>>()?;
        Ok(StabilizerMixedState { n, gens })
    }

    /// Every element of the group, `2^k` of them. Only for small `k`.
    pub fn group_elements(&self) -> Result<Vec<PauliString>> {
        let k = self.gens.len();
        if k > 20 {
            return Err(Error::TooLarge {
                what: "generator count for enumeration",
                value: k,
                max: 20,
            });
        }
        let mut out = vec![PauliString::identity(self.n)];
        for g in &self.gens {
            let more: Vec<PauliString> = out
                .iter()
                .map(|e| {
                    let mut e = e.clone();
                    e.mul_assign_right_unchecked(g);
                    e
                })
                .collect();
            out.extend(more);
        }
        Ok(out)
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("STAB n={} k={}\n", self.n, self.gens.len());
        for g in &self.gens {
            s.push_str(&g.to_string());
            s.push('\n');
        }
        s
    }
}

impl FromStr for StabilizerMixedState {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty());
        let (hl, header) = lines.next().ok_or(Error::Parse {
            line: 1,
            msg: "missing header".into(),
        })?;
        let bad = |line: usize, msg: &str| Error::Parse {
            line,
            msg: msg.to_string(),
        };
        let mut parts = header.split_whitespace();
        if parts.next() != Some("STAB") {
            return Err(bad(hl, "header must start with STAB"));
        }
        let mut field = |key: &str| -> Result<usize> {
            parts
                .next()
                .and_then(|p| p.strip_prefix(key))
                .and_then(|v| v.parse().ok())
                .ok_or_else(|| bad(hl, &format!("expected {key}<integer>")))
        };
        let n = field("n=")?;
        let k = field("k=")?;
        let mut gens = Vec::with_capacity(k);
        for (line, l) in lines {
            let g: PauliString = l.parse().map_err(|_| bad(line, "malformed Pauli string"))?;
            if g.num_qubits() != n {
                return Err(bad(line, "generator length differs from n"));
            }
            gens.push(g);
        }
        if gens.len() != k {
            return Err(bad(hl, &format!("header says k={k}, found {}", gens.len())));
        }
        StabilizerMixedState::from_generators(n, gens)
    }
}

impl fmt::Debug for StabilizerMixedState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "StabilizerMixedState(n={}, ", self.n)?;
        f.debug_list().entries(self.gens.iter()).finish()?;
        f.write_str(")")
    }
}

/// Symplectic column index: `q` for x bits, `n + q` for z bits.
fn all_columns(n: usize) -> Vec<usize> {
    (0..2 * n).collect()
}

fn region_columns(n: usize, r: &Region) -> Vec<usize> {
    r.indices()
        .iter()
        .copied()
        .chain(r.indices().iter().map(|q| q + n))
        .collect()
}

/// Gauss-Jordan elimination over the listed columns, in that order, with
/// Pauli multiplication so phases follow the row operations. Pivot rows are
/// moved to the front; returns how many there are.
fn eliminate(rows: &mut [PauliString], cols: &[usize], ops: &mut u64) -> usize {
    let mut r = 0;
    let bits = rows.first().map_or(0, |p| 2 * p.num_qubits() as u64);
    for &c in cols {
        if r == rows.len() {
            break;
        }
        let found = (r..rows.len()).find(|&i| rows[i].symplectic_bit(c));
        *ops += (found.unwrap_or(rows.len()) - r + 1) as u64;
        let Some(p) = found else {
            continue;
        };
        rows.swap(r, p);
        let pivot = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            *ops += 1;
            if i != r && row.symplectic_bit(c) {
                row.mul_assign_right_unchecked(&pivot);
                *ops += bits;
            }
        }
        r += 1;
    }
    r
}
