//! Brute-force state vectors and density matrices, used as the oracle side.
//!
//! Qubit `q` is bit `q` of a basis index.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, Gate};
use crate::error::{Error, Result};
use crate::pauli::{PauliString, Region};
use crate::stabilizer::StabilizerMixedState;
use crate::tableau::CliffordTableau;

pub const MAX_STATE_QUBITS: usize = 14;
pub const MAX_DENSITY_QUBITS: usize = 10;

const C0: Complex64 = Complex64::new(0.0, 0.0);
const C1: Complex64 = Complex64::new(1.0, 0.0);
const CI: Complex64 = Complex64::new(0.0, 1.0);

fn i_pow(k: u32) -> Complex64 {
    match k & 3 {
        0 => C1,
        1 => CI,
        2 => -C1,
        _ => -CI,
    }
}

fn check_cap(what: &'static str, value: usize, max: usize) -> Result<()> {
    if value > max {
        Err(Error::TooLarge { what, value, max })
    } else {
        Ok(())
    }
}

/// Applies `gate` (or its complex conjugate) to a vector of `2^n` amplitudes.
fn apply_gate_slice(amps: &mut [Complex64], n: usize, gate: &Gate, conj: bool) {
    let phase = |z: Complex64| if conj { z.conj() } else { z };
    match gate {
        Gate::H(q) => {
            let bit = 1usize << q;
            let s = std::f64::consts::FRAC_1_SQRT_2;
            for i in 0..amps.len() {
                if i & bit == 0 {
                    let (a, b) = (amps[i], amps[i | bit]);
                    amps[i] = (a + b) * s;
                    amps[i | bit] = (a - b) * s;
                }
            }
        }
        Gate::S(q) | Gate::Sdg(q) | Gate::T(q) | Gate::Tdg(q) => {
            let f = match gate {
                Gate::S(_) => CI,
                Gate::Sdg(_) => -CI,
                Gate::T(_) => Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_4),
                _ => Complex64::from_polar(1.0, -std::f64::consts::FRAC_PI_4),
            };
            let f = phase(f);
            let bit = 1usize << q;
            for (i, a) in amps.iter_mut().enumerate() {
                if i & bit != 0 {
                    *a *= f;
                }
            }
        }
        Gate::CX(c, t) => {
            let (cb, tb) = (1usize << c, 1usize << t);
            for i in 0..amps.len() {
                if i & cb != 0 && i & tb == 0 {
                    amps.swap(i, i | tb);
                }
            }
        }
        Gate::Perm(p) => {
            let mut out = vec![C0; amps.len()];
            for (i, a) in amps.iter().enumerate() {
                out[permute_index(i, p, n)] = *a;
            }
            amps.copy_from_slice(&out);
        }
    }
}

fn permute_index(i: usize, p: &[usize], n: usize) -> usize {
    let mut j = 0;
    for (q, &target) in p.iter().enumerate().take(n) {
        j |= ((i >> q) & 1) << target;
    }
    j
}

/// `(x mask, z mask, i^{phase + |x&z|})` of a string on at most 64 qubits.
pub(crate) fn pauli_masks(p: &PauliString) -> (usize, usize, Complex64) {
    let x = p.x_words().first().copied().unwrap_or(0) as usize;
    let z = p.z_words().first().copied().unwrap_or(0) as usize;
    let coef = i_pow(p.phase() as u32 + (x & z).count_ones());
    (x, z, coef)
}

pub(crate) fn parity(v: usize) -> f64 {
    if v.count_ones() & 1 == 1 {
        -1.0
    } else {
        1.0
    }
}

/// A normalized pure state on at most 14 qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseState {
    n: usize,
    amps: Vec<Complex64>,
}

impl DenseState {
    pub fn zero(n: usize) -> Result<Self> {
        check_cap("state qubits", n, MAX_STATE_QUBITS)?;
        let mut amps = vec![C0; 1 << n];
        amps[0] = C1;
        Ok(DenseState { n, amps })
    }

    pub fn from_amplitudes(n: usize, amps: Vec<Complex64>) -> Result<Self> {
        check_cap("state qubits", n, MAX_STATE_QUBITS)?;
        if amps.len() != 1 << n {
            return Err(Error::InvalidArgument(format!(
                "{} amplitudes for {n} qubits",
                amps.len()
            )));
        }
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidState(format!("norm {norm} is not 1")));
        }
        Ok(DenseState { n, amps })
    }

    /// `C|0…0⟩`.
    pub fn simulate(circuit: &Circuit) -> Result<Self> {
        let mut s = Self::zero(circuit.n)?;
        s.apply_circuit(circuit)?;
        Ok(s)
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn apply_gate(&mut self, gate: &Gate) -> Result<()> {
        gate.check(self.n)?;
        apply_gate_slice(&mut self.amps, self.n, gate, false);
        Ok(())
    }

    pub fn apply_circuit(&mut self, c: &Circuit) -> Result<()> {
        if c.n != self.n {
            return Err(Error::SizeMismatch {
                left: c.n,
                right: self.n,
            });
        }
        for g in &c.gates {
            self.apply_gate(g)?;
        }
        Ok(())
    }

    /// Applies a Clifford through a synthesized circuit (global phase arbitrary).
    pub fn apply_clifford(&mut self, u: &CliffordTableau) -> Result<()> {
        self.apply_circuit(&u.to_circuit())
    }

    /// `P|ψ⟩`.
    pub fn apply_pauli(&mut self, p: &PauliString) -> Result<()> {
        if p.num_qubits() != self.n {
            return Err(Error::SizeMismatch {
                left: p.num_qubits(),
                right: self.n,
            });
        }
        let (x, z, coef) = pauli_masks(p);
        let mut out = vec![C0; self.amps.len()];
        for (b, a) in self.amps.iter().enumerate() {
            out[b ^ x] = *a * coef * parity(z & b);
        }
        self.amps = out;
        Ok(())
    }

    /// `⟨ψ|P|ψ⟩`.
    pub fn expectation(&self, p: &PauliString) -> Result<Complex64> {
        let mut q = self.clone();
        q.apply_pauli(p)?;
        Ok(self.inner(&q))
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &DenseState) -> Complex64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn fidelity(&self, other: &DenseState) -> f64 {
        self.inner(other).norm_sqr()
    }

    /// `self ⊗ other`, with `self` on the low qubits.
    pub fn tensor(&self, other: &DenseState) -> Result<DenseState> {
        let n = self.n + other.n;
        check_cap("state qubits", n, MAX_STATE_QUBITS)?;
        let mut amps = vec![C0; 1 << n];
        for (j, b) in other.amps.iter().enumerate() {
            for (i, a) in self.amps.iter().enumerate() {
                amps[(j << self.n) | i] = a * b;
            }
        }
        Ok(DenseState { n, amps })
    }

    /// `tr_{complement}(|ψ⟩⟨ψ|)`, with the kept qubits relabelled in region order.
    pub fn reduced_density(&self, region: &Region) -> Result<DensityMatrix> {
        region.check(self.n)?;
        let m = region.len();
        check_cap("density qubits", m, MAX_DENSITY_QUBITS)?;
        let rest = region.complement(self.n);
        let (da, db) = (1usize << m, 1usize << rest.len());
        let mut mat = vec![C0; da * db];
        for (i, a) in self.amps.iter().enumerate() {
            let ka = gather(i, region.indices());
            let kb = gather(i, rest.indices());
            mat[ka * db + kb] = *a;
        }
        let mut data = vec![C0; da * da];
        for r in 0..da {
            for c in r..da {
                let v: Complex64 = (0..db)
                    .map(|k| mat[r * db + k] * mat[c * db + k].conj())
                    .sum();
                data[r * da + c] = v;
                data[c * da + r] = v.conj();
            }
        }
        Ok(DensityMatrix { m, data })
    }

    pub fn density_matrix(&self) -> Result<DensityMatrix> {
        self.reduced_density(&Region::full(self.n))
    }
}

fn gather(i: usize, qubits: &[usize]) -> usize {
    qubits
        .iter()
        .enumerate()
        .fold(0, |acc, (j, &q)| acc | (((i >> q) & 1) << j))
}

/// Stabilizer-entropy summary of a state. `sp` is `Σ_P d^-2 tr⁴(Pρ)`, which
/// is `1/d` on pure stabilizer states.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SEReport {
    pub sp: f64,
    pub sp_normalized: f64,
    pub purity: f64,
    pub w: f64,
    pub m2: f64,
    pub m_lin: f64,
}

/// A `2^m x 2^m` density matrix, row-major, `m ≤ 10`.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    m: usize,
    data: Vec<Complex64>,
}

impl DensityMatrix {
    pub fn from_entries(m: usize, data: Vec<Complex64>) -> Result<Self> {
        check_cap("density qubits", m, MAX_DENSITY_QUBITS)?;
        let d = 1usize << m;
        if data.len() != d * d {
            return Err(Error::InvalidArgument(format!(
                "{} entries for a {d}x{d} matrix",
                data.len()
            )));
        }
        let rho = DensityMatrix { m, data };
        for r in 0..d {
            for c in 0..d {
                if (rho.get(r, c) - rho.get(c, r).conj()).norm() > 1e-10 {
                    return Err(Error::InvalidState("matrix is not Hermitian".into()));
                }
            }
        }
        if (rho.trace().re - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidState("trace is not 1".into()));
        }
        Ok(rho)
    }

    pub fn maximally_mixed(m: usize) -> Result<Self> {
        check_cap("density qubits", m, MAX_DENSITY_QUBITS)?;
        let d = 1usize << m;
        let mut data = vec![C0; d * d];
        for i in 0..d {
            data[i * d + i] = Complex64::new(1.0 / d as f64, 0.0);
        }
        Ok(DensityMatrix { m, data })
    }

    /// The group average `2^-m Σ_{g ∈ G} g`.
    pub fn from_stabilizer(s: &StabilizerMixedState) -> Result<Self> {
        let m = s.num_qubits();
        check_cap("density qubits", m, MAX_DENSITY_QUBITS)?;
        let d = 1usize << m;
        let mut data = vec![C0; d * d];
        let norm = 1.0 / d as f64;
        for g in s.group_elements()? {
            let (x, z, coef) = pauli_masks(&g);
            for b in 0..d {
                data[(b ^ x) * d + b] += coef * parity(z & b) * norm;
            }
        }
        Ok(DensityMatrix { m, data })
    }

    pub fn num_qubits(&self) -> usize {
        self.m
    }

    pub fn dim(&self) -> usize {
        1 << self.m
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        self.data[r * self.dim() + c]
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.data
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim()).map(|i| self.get(i, i)).sum()
    }

    /// `tr ρ²`.
    pub fn purity(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Largest entrywise distance to `other`.
    pub fn max_abs_diff(&self, other: &DensityMatrix) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// `tr(Pρ)` in `O(2^m)` using the one-entry-per-row structure of `P`.
    pub fn pauli_expectation(&self, p: &PauliString) -> Result<Complex64> {
        if p.num_qubits() != self.m {
            return Err(Error::SizeMismatch {
                left: p.num_qubits(),
                right: self.m,
            });
        }
        let (x, z, coef) = pauli_masks(p);
        let s: Complex64 = (0..self.dim())
            .map(|c| self.get(c, c ^ x) * parity(z & c))
            .sum();
        Ok(coef * s)
    }

    /// `Σ_P d^-2 tr⁴(Pρ)` by sweeping all `4^m` Pauli strings one at a time.
    pub fn stab_purity_naive(&self) -> f64 {
        let d = self.dim();
        let mut total = 0.0;
        for x in 0..d {
            for z in 0..d {
                let mut p = PauliString::identity(self.m);
                for q in 0..self.m {
                    p.set(q, (x >> q) & 1 == 1, (z >> q) & 1 == 1);
                }
                let e = self.pauli_expectation(&p).expect("sizes match").re;
                total += e.powi(4);
            }
        }
        total / (d * d) as f64
    }

    /// Same sum as [`stab_purity_naive`](Self::stab_purity_naive): for each
    /// x pattern the expectations over all z patterns are one
    /// Walsh-Hadamard transform of the shifted diagonal `ρ_{c, c⊕x}`.
    pub fn stab_purity(&self) -> f64 {
        let d = self.dim();
        let partial: Vec<f64> = (0..d)
            .into_par_iter()
            .map(|x| {
                let mut v: Vec<Complex64> = (0..d).map(|c| self.get(c, c ^ x)).collect();
                let mut h = 1;
                while h < d {
                    for i in (0..d).step_by(2 * h) {
                        for j in i..i + h {
                            let (a, b) = (v[j], v[j + h]);
                            v[j] = a + b;
                            v[j + h] = a - b;
                        }
                    }
                    h *= 2;
                }
                v.iter()
                    .enumerate()
                    .map(|(z, w)| (i_pow((x & z).count_ones()) * w).re.powi(4))
                    .sum::<f64>()
            })
            .collect();
        partial.iter().sum::<f64>() / (d * d) as f64
    }

    pub fn se_report(&self) -> Result<SEReport> {
        let d = self.dim() as f64;
        let purity = self.purity();
        if purity < 1.0 / d - 1e-9 {
            return Err(Error::InvalidState(format!(
                "purity {purity} below 1/d"
            )));
        }
        let sp = self.stab_purity();
        let w = d * sp / purity;
        Ok(SEReport {
            sp,
            sp_normalized: d * sp,
            purity,
            w,
            m2: -w.log2(),
            m_lin: 1.0 - w,
        })
    }

    /// `G ρ G†`.
    pub fn apply_gate(&mut self, gate: &Gate) -> Result<()> {
        gate.check(self.m)?;
        let d = self.dim();
        let mut col = vec![C0; d];
        for c in 0..d {
            for r in 0..d {
                col[r] = self.data[r * d + c];
            }
            apply_gate_slice(&mut col, self.m, gate, false);
            for r in 0..d {
                self.data[r * d + c] = col[r];
            }
        }
        for r in 0..d {
            apply_gate_slice(&mut self.data[r * d..(r + 1) * d], self.m, gate, true);
        }
        Ok(())
    }

    pub fn apply_circuit(&mut self, c: &Circuit) -> Result<()> {
        for g in &c.gates {
            self.apply_gate(g)?;
        }
        Ok(())
    }

    pub fn partial_trace(&self, keep: &Region) -> Result<DensityMatrix> {
        keep.check(self.m)?;
        Ok(DensityMatrix {
            m: keep.len(),
            data: partial_trace_raw(&self.data, self.m, keep),
        })
    }
}

/// Partial trace of an arbitrary (not necessarily Hermitian) square matrix.
pub(crate) fn partial_trace_raw(data: &[Complex64], m: usize, keep: &Region) -> Vec<Complex64> {
    let d = 1usize << m;
    let rest = keep.complement(m);
    let dk = 1usize << keep.len();
    let mut out = vec![C0; dk * dk];
    for r in 0..d {
        let (ra, rb) = (gather(r, keep.indices()), gather(r, rest.indices()));
        for c in 0..d {
            if gather(c, rest.indices()) == rb {
                out[ra * dk + gather(c, keep.indices())] += data[r * d + c];
            }
        }
    }
    out
}

/// Exhaustive Clifford-orbit fourth moment next to its prediction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FourthMoment {
    /// Group average of `tr(Q_A ⊗ 1 · (CψC†)^{⊗4})`, i.e. of `SP((CψC†)_A)`.
    pub enumerated: f64,
    /// `α tr(QΠ_sym) + (β/24) Σ_π tr(Q_A T_π) tr(T_π)` from the coefficients.
    pub predicted: f64,
}

/// Averages `SP` of the marginal on `region` over all Cliffords on `n ≤ 2`
/// qubits and compares with the closed-form fourth-moment decomposition.
pub fn fourth_moment_exact(psi: &DenseState, region: &Region) -> Result<FourthMoment> {
    let n = psi.num_qubits();
    if n > 2 {
        return Err(Error::TooLarge {
            what: "n for exact fourth moment",
            value: n,
            max: 2,
        });
    }
    region.check(n)?;
    let group = CliffordTableau::enumerate(n)?;
    let mut total = 0.0;
    for u in &group {
        let mut s = psi.clone();
        s.apply_clifford(u)?;
        total += s.reduced_density(region)?.stab_purity();
    }
    let enumerated = total / group.len() as f64;

    let sp = psi.density_matrix()?.stab_purity();
    let d = (1u64 << n) as f64;
    let de = (1u64 << region.len()) as f64;
    let df = d / de;
    let coef = crate::moments::moment_coefficients(sp, 1u64 << n)?;
    let contraction = de * de * df.powi(4)
        + 6.0 * de * df.powi(3)
        + 3.0 * de * de * df * df
        + 8.0 * df * df
        + 6.0 * de * df;
    let predicted = coef.alpha * crate::moments::trace_q_pi_sym(d) + coef.beta / 24.0 * contraction;
    Ok(FourthMoment {
        enumerated,
        predicted,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t_plus() -> DenseState {
        let c = Circuit::from_gates(1, vec![Gate::H(0), Gate::T(0)]).unwrap();
        DenseState::simulate(&c).unwrap()
    }

    #[test]
    fn bell_amplitudes() {
        let c = Circuit::from_gates(2, vec![Gate::H(0), Gate::CX(0, 1)]).unwrap();
        let s = DenseState::simulate(&c).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let want = [h, 0.0, 0.0, h];
        for (a, w) in s.amplitudes().iter().zip(want) {
            assert!((a - Complex64::new(w, 0.0)).norm() < 1e-15);
        }
        let r = s.reduced_density(&Region::new(vec![0], 2).unwrap()).unwrap();
        assert!((r.purity() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn caps_are_enforced() {
        assert!(DenseState::zero(15).is_err());
        assert!(DensityMatrix::maximally_mixed(11).is_err());
    }

    #[test]
    fn single_qubit_stab_purities() {
        let zero = DenseState::zero(1).unwrap().density_matrix().unwrap();
        assert!((zero.stab_purity() - 0.5).abs() < 1e-15);
        let tp = t_plus().density_matrix().unwrap();
        assert!((tp.stab_purity() - 0.375).abs() < 1e-15);
        assert!((tp.stab_purity_naive() - 0.375).abs() < 1e-15);
        let mixed = DensityMatrix::maximally_mixed(1).unwrap();
        assert!((mixed.stab_purity() - 0.25).abs() < 1e-15);
        let r = mixed.se_report().unwrap();
        assert!(r.m2.abs() < 1e-15);
    }

    #[test]
    fn t_state_entropy() {
        let r = t_plus().density_matrix().unwrap().se_report().unwrap();
        assert!((r.m2 - (4.0f64 / 3.0).log2()).abs() < 1e-12);
        assert!((r.sp_normalized - 0.75).abs() < 1e-12);
    }

    #[test]
    fn perm_gate_moves_excitation() {
        let mut s = DenseState::zero(3).unwrap();
        s.apply_gate(&Gate::H(0)).unwrap();
        s.apply_gate(&Gate::Perm(vec![2, 0, 1])).unwrap();
        let z2: PauliString = "IIX".parse().unwrap();
        assert!((s.expectation(&z2).unwrap().re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn density_gate_matches_state_gate() {
        let c = Circuit::from_gates(2, vec![Gate::H(0), Gate::T(0), Gate::CX(0, 1), Gate::S(1)])
            .unwrap();
        let s = DenseState::simulate(&c).unwrap();
        let mut rho = DenseState::zero(2).unwrap().density_matrix().unwrap();
        rho.apply_circuit(&c).unwrap();
        assert!(rho.max_abs_diff(&s.density_matrix().unwrap()) < 1e-14);
    }
}
