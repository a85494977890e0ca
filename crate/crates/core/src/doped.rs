//! t-doped Clifford circuits in decomposed form `C_t = D† c_t D V`, the
//! cleansing map `ℰ(·) = tr_Y W(·)W†` with `W = T_π D`, and the stabilizer
//! proxy `ρ = W†(Φ_Ȳ ⊗ I_Y/d_Y)W`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::circuit::{Circuit, Gate};
use crate::dense::{DenseState, DensityMatrix};
use crate::error::{Error, Result};
use crate::pauli::Region;
use crate::stabilizer::StabilizerMixedState;
use crate::tableau::CliffordTableau;

/// E is the first `n - n_F` qubits, F the rest. Y holds the `t` qubits the
/// magic is moved onto.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Partition {
    pub n: usize,
    pub e: Region,
    pub f: Region,
    pub y: Region,
}

impl Partition {
    /// With `t ≤ n_F`, Y is the last `t` qubits of F. Otherwise Y is F
    /// together with the first `t - n_F` qubits of E.
    pub fn new(n: usize, n_f: usize, t: usize) -> Result<Self> {
        if n_f > n {
            return Err(Error::InvalidArgument(format!("n_F = {n_f} > n = {n}")));
        }
        if t > n {
            return Err(Error::InvalidArgument(format!("t = {t} > n = {n}")));
        }
        let n_e = n - n_f;
        let y = if t <= n_f {
            Region::range(n - t, n)
        } else {
            Region::range(0, t - n_f).union(&Region::range(n_e, n))
        };
        Ok(Partition {
            n,
            e: Region::range(0, n_e),
            f: Region::range(n_e, n),
            y,
        })
    }

    pub fn n_e(&self) -> usize {
        self.e.len()
    }

    pub fn n_f(&self) -> usize {
        self.f.len()
    }

    pub fn y_bar(&self) -> Region {
        self.y.complement(self.n)
    }

    pub fn is_localized(&self) -> bool {
        self.y.len() <= self.n_f()
    }
}

/// `n_F = round(f n)`.
pub fn n_f_for(n: usize, f_fraction: f64) -> Result<usize> {
    if !(0.0..=1.0).contains(&f_fraction) {
        return Err(Error::InvalidArgument(format!("f = {f_fraction}")));
    }
    Ok((f_fraction * n as f64).round() as usize)
}

#[derive(Debug, Clone, PartialEq)]
pub struct DopedCircuit {
    pub n: usize,
    pub t: usize,
    pub seed: u64,
    pub v: CliffordTableau,
    pub d: CliffordTableau,
    /// Acts on qubits `0..t`; contains exactly `t` T gates.
    pub c_t: Circuit,
    /// `pi_y[..t]` lists Y ∩ F then Y ∩ E; the remaining qubits go to Ȳ in order.
    pub pi_y: Vec<usize>,
    pub y: Region,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CleanseOutput {
    pub w: CliffordTableau,
    /// `ℰ(ψ_t)` on the qubits of Ȳ, relabelled in increasing order.
    pub phi_bar: StabilizerMixedState,
    pub rho: StabilizerMixedState,
}

/// `t` layers of [random t-qubit Clifford, T on qubit `layer mod t`].
fn random_c_t(t: usize, rng: &mut ChaCha8Rng) -> Circuit {
    let mut c = Circuit::new(t);
    for layer in 0..t {
        let u = CliffordTableau::random(t, rng);
        c.extend(&u.to_circuit());
        c.gates.push(Gate::T(layer % t));
    }
    c
}

/// Draws `V`, `D` and `c_t` from `seed` and places Y per [`Partition::new`].
pub fn build_doped_circuit(
    n: usize,
    t: usize,
    f_fraction: f64,
    seed: u64,
) -> Result<(DopedCircuit, Partition)> {
    let n_f = n_f_for(n, f_fraction)?;
    build_doped_circuit_nf(n, t, n_f, seed)
}

pub fn build_doped_circuit_nf(
    n: usize,
    t: usize,
    n_f: usize,
    seed: u64,
) -> Result<(DopedCircuit, Partition)> {
    let part = Partition::new(n, n_f, t)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let v = CliffordTableau::random(n, &mut rng);
    let d = CliffordTableau::random(n, &mut rng);
    let c_t = random_c_t(t, &mut rng);
    // Y ∩ F first: the last T of c_t is not followed by a Clifford, so it
    // must land on E for all t gates to reach the E marginal
    let y_bar = part.y_bar();
    let y_f = part.y.intersection(&part.f);
    let y_e = part.y.intersection(&part.e);
    let pi_y: Vec<usize> = y_f
        .indices()
        .iter()
        .chain(y_e.indices())
        .chain(y_bar.indices())
        .copied()
        .collect();
    Ok((
        DopedCircuit {
            n,
            t,
            seed,
            v,
            d,
            c_t,
            pi_y,
            y: part.y.clone(),
        },
        part,
    ))
}

/// Hex SHA-256 of a text serialization.
pub fn text_hash(text: &str) -> String {
    format!("{:x}", Sha256::digest(text.as_bytes()))
}

/// Reproducibility record written next to a circuit file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, serde::Deserialize)]
pub struct Sidecar {
    pub n: usize,
    pub t: usize,
    pub n_f: usize,
    #[serde(rename = "Y")]
    pub y: Vec<usize>,
    pub seed: u64,
    pub hashes: SidecarHashes,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, serde::Deserialize)]
pub struct SidecarHashes {
    #[serde(rename = "V")]
    pub v: String,
    #[serde(rename = "D")]
    pub d: String,
    pub c_t: String,
    pub circuit: String,
}

impl DopedCircuit {
    /// `c_t` moved onto the qubits of Y.
    pub fn c_t_on_y(&self) -> Circuit {
        let mut map: Vec<usize> = self.pi_y.clone();
        map.truncate(self.t);
        Circuit {
            n: self.n,
            gates: self.c_t.gates.iter().map(|g| g.relabel(&map, self.n)).collect(),
        }
    }

    /// `c_t` on the first `t` qubits of the full register.
    fn c_t_embedded(&self) -> Circuit {
        let map: Vec<usize> = (0..self.t).collect();
        Circuit {
            n: self.n,
            gates: self.c_t.gates.iter().map(|g| g.relabel(&map, self.n)).collect(),
        }
    }

    /// The gate list of `C_t`: V, then D, then `c_t`, then `D⁻¹`.
    pub fn flattened(&self) -> Circuit {
        let mut c = self.v.to_circuit();
        c.extend(&self.d.to_circuit());
        c.extend(&self.c_t_embedded());
        c.extend(&self.d.inverse().to_circuit());
        c
    }

    pub fn w(&self) -> CliffordTableau {
        self.w_counted(&mut 0)
    }

    fn w_counted(&self, ops: &mut u64) -> CliffordTableau {
        CliffordTableau::permutation(&self.pi_y)
            .expect("pi_y is a permutation")
            .compose_counted(&self.d, ops)
            .expect("sizes match")
    }

    pub fn cleanse(&self, part: &Partition) -> Result<CleanseOutput> {
        self.cleanse_counted(part, &mut 0)
    }

    /// As [`cleanse`](Self::cleanse), adding the bit operations of every
    /// tableau step to `ops`.
    pub fn cleanse_counted(&self, part: &Partition, ops: &mut u64) -> Result<CleanseOutput> {
        let w = self.w_counted(ops);
        let phi = StabilizerMixedState::from_tableau(&self.v).conjugate_by_counted(&w, ops)?;
        let y_bar = part.y_bar();
        let phi_bar = phi.partial_trace_counted(&y_bar, ops)?;
        let rho = phi_bar
            .embed(self.n, y_bar.indices())?
            .conjugate_by_counted(&w.inverse_counted(ops), ops)?;
        Ok(CleanseOutput { w, phi_bar, rho })
    }

    /// `ψ_t = C_t|0…0⟩`, simulated gate by gate.
    pub fn dense_state(&self) -> Result<DenseState> {
        DenseState::simulate(&self.flattened())
    }

    /// `W ψ_t W†` as a dense state.
    pub fn dense_cleansed_state(&self) -> Result<DenseState> {
        let mut s = self.dense_state()?;
        s.apply_circuit(&self.w().to_circuit())?;
        Ok(s)
    }

    /// `tr_Y(W ψ_t W†)` densely, on Ȳ in increasing qubit order.
    pub fn dense_phi_bar(&self, part: &Partition) -> Result<DensityMatrix> {
        self.dense_cleansed_state()?.reduced_density(&part.y_bar())
    }

    pub fn sidecar(&self, part: &Partition) -> Sidecar {
        Sidecar {
            n: self.n,
            t: self.t,
            n_f: part.n_f(),
            y: self.y.indices().to_vec(),
            seed: self.seed,
            hashes: SidecarHashes {
                v: text_hash(&self.v.to_text()),
                d: text_hash(&self.d.to_text()),
                c_t: text_hash(&self.c_t.to_text()),
                circuit: text_hash(&self.flattened().to_text()),
            },
        }
    }
}

/// M₂ of the E marginal of `W ψ_t W†`, E taken whole (Y ∩ E included).
pub fn cleansed_se_e(circuit: &DopedCircuit, part: &Partition) -> Result<f64> {
    if circuit.t == 0 {
        return Ok(0.0);
    }
    let s = circuit.dense_cleansed_state()?;
    let r = s.reduced_density(&part.e)?.se_report()?;
    Ok(r.m2)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn y_placement() {
        let p = Partition::new(9, 3, 2).unwrap();
        assert_eq!(p.y.indices(), &[7, 8]);
        assert!(p.is_localized());
        let p = Partition::new(9, 3, 5).unwrap();
        assert_eq!(p.y.indices(), &[0, 1, 6, 7, 8]);
        assert!(!p.is_localized());
        assert!(Partition::new(4, 1, 5).is_err());
    }

    #[test]
    fn t_zero_is_clifford() {
        let (c, p) = build_doped_circuit(5, 0, 0.4, 3).unwrap();
        assert!(c.c_t.gates.is_empty());
        assert!(p.y.is_empty());
        assert!(c.flattened().is_clifford());
        let out = c.cleanse(&p).unwrap();
        assert!(out.rho.is_pure());
    }

    #[test]
    fn t_count_matches() {
        let (c, _) = build_doped_circuit(6, 3, 1.0 / 3.0, 11).unwrap();
        assert_eq!(c.flattened().t_count(), 3);
        assert_eq!(c.c_t.n, 3);
    }

    #[test]
    fn deterministic_per_seed() {
        let (a, _) = build_doped_circuit(6, 2, 1.0 / 3.0, 4).unwrap();
        let (b, _) = build_doped_circuit(6, 2, 1.0 / 3.0, 4).unwrap();
        assert_eq!(a, b);
    }
}
