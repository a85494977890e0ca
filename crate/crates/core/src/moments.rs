//! Clifford-orbit averages: fourth-moment coefficients, the linear-entropy
//! split between subsystems, Page purity, and Monte Carlo checks of each.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use rayon::prelude::*;
use serde::Serialize;

use crate::dense::DenseState;
use crate::error::{Error, Result};
use crate::pauli::Region;
use crate::rng;
use crate::stabilizer::StabilizerMixedState;
use crate::tableau::CliffordTableau;

/// Coefficients of `E_C[ψ^{C⊗4}] = α QΠ_sym + β Π_sym`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MomentCoefficients {
    pub alpha: f64,
    pub beta: f64,
    pub d: u64,
}

/// `tr(QΠ_sym) = (d+1)(d+2)/6`.
pub fn trace_q_pi_sym(d: f64) -> f64 {
    (d + 1.0) * (d + 2.0) / 6.0
}

/// `tr(Π_sym) = d(d+1)(d+2)(d+3)/24`.
pub fn trace_pi_sym(d: f64) -> f64 {
    d * (d + 1.0) * (d + 2.0) * (d + 3.0) / 24.0
}

/// `sp` is the stabilizer purity `tr(Qψ^{⊗4}) = Σ_P P_ψ²`, equal to `1/d`
/// for stabilizer states. This is the normalization under which both
/// `tr(avg) = 1` and `tr(Q avg) = sp` hold.
pub fn moment_coefficients(sp: f64, d: u64) -> Result<MomentCoefficients> {
    if d < 2 {
        return Err(Error::InvalidArgument(format!("dimension {d} < 2")));
    }
    if !(0.0..=1.0).contains(&sp) {
        return Err(Error::InvalidArgument(format!("sp = {sp} outside [0, 1]")));
    }
    let df = d as f64;
    let beta = (1.0 - sp) / ((df - 1.0) * (df + 1.0) * (df + 2.0) * (df + 4.0) / 24.0);
    let alpha = sp / trace_q_pi_sym(df) - beta;
    Ok(MomentCoefficients { alpha, beta, d })
}

fn pow2(k: usize) -> BigInt {
    BigInt::one() << k
}

/// Exact rational factors `(c_E, c_F)` with `E_C[M_lin(ψ_E)] = c_E M_lin(ψ)`
/// and `E_C[M_lin(ψ_F)] = c_F M_lin(ψ)`.
pub fn prop1_factors(n: usize, n_e: usize) -> Result<(BigRational, BigRational)> {
    if n_e == 0 || n_e > n {
        return Err(Error::InvalidArgument(format!("n_E = {n_e} with n = {n}")));
    }
    let d = pow2(n);
    let de2 = pow2(2 * n_e);
    let one = BigInt::one();
    let den = (&d - &one) * (&d + &de2);
    let ce = BigRational::new((&de2 - &one) * &d, den.clone());
    let cf = BigRational::new(&d * &d - &de2, den);
    Ok((ce, cf))
}

/// Closed-form orbit averages of the linear stabilizer entropy on E and F.
pub fn prop1_exact(m_lin_psi: f64, n: usize, n_e: usize) -> Result<(f64, f64)> {
    if !(0.0..=1.0).contains(&m_lin_psi) {
        return Err(Error::InvalidArgument(format!("M_lin = {m_lin_psi}")));
    }
    let (ce, cf) = prop1_factors(n, n_e)?;
    let ce = ce.to_f64().unwrap_or(f64::NAN);
    let cf = cf.to_f64().unwrap_or(f64::NAN);
    Ok((ce * m_lin_psi, cf * m_lin_psi))
}

/// `(d_E + d_F) / (d_E d_F + 1)`.
pub fn page_purity(d_e: u64, d_f: u64) -> Result<BigRational> {
    if d_e == 0 || d_f == 0 {
        return Err(Error::InvalidArgument("dimensions must be positive".into()));
    }
    let (a, b) = (BigInt::from(d_e), BigInt::from(d_f));
    Ok(BigRational::new(&a + &b, &a * &b + 1))
}

/// Sample mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub samples: usize,
    pub seed: u64,
}

impl McEstimate {
    pub fn from_values(values: &[f64], seed: u64) -> Result<Self> {
        let n = values.len();
        if n < 2 {
            return Err(Error::InvalidArgument("need at least two samples".into()));
        }
        let mean = values.iter().sum::<f64>() / n as f64;
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        Ok(McEstimate {
            mean,
            std_error: (var / n as f64).sqrt(),
            samples: n,
            seed,
        })
    }

    /// `|mean - target| ≤ k · std_error`.
    pub fn within(&self, target: f64, k: f64) -> bool {
        (self.mean - target).abs() <= k * self.std_error
    }
}

/// Marginal statistics of one orbit element `CψC†` on the region.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OrbitSample {
    pub sp: f64,
    pub purity: f64,
    pub m_lin: f64,
}

fn orbit_sample(psi: &DenseState, u: &CliffordTableau, region: &Region) -> Result<OrbitSample> {
    let mut s = psi.clone();
    s.apply_clifford(u)?;
    let r = s.reduced_density(region)?.se_report()?;
    Ok(OrbitSample {
        sp: r.sp,
        purity: r.purity,
        m_lin: r.m_lin,
    })
}

pub const MAX_ORBIT_QUBITS: usize = 10;
pub const MAX_ORBIT_REGION: usize = 8;

/// Marginal statistics over `samples` uniformly random Cliffords; sample
/// `i` uses stream `(seed, i)`, results in sample order.
pub fn orbit_samples(
    psi: &DenseState,
    region: &Region,
    samples: usize,
    seed: u64,
) -> Result<Vec<OrbitSample>> {
    let n = psi.num_qubits();
    if n > MAX_ORBIT_QUBITS {
        return Err(Error::TooLarge {
            what: "orbit qubits",
            value: n,
            max: MAX_ORBIT_QUBITS,
        });
    }
    if region.len() > MAX_ORBIT_REGION {
        return Err(Error::TooLarge {
            what: "orbit region",
            value: region.len(),
            max: MAX_ORBIT_REGION,
        });
    }
    region.check(n)?;
    (0..samples as u64)
        .into_par_iter()
        .map(|i| {
            let u = CliffordTableau::random(n, &mut rng::stream(seed, i));
            orbit_sample(psi, &u, region)
        })
        .collect()
}

/// Every orbit element for `n ≤ 2`, one per Clifford modulo phase.
pub fn orbit_exhaustive(psi: &DenseState, region: &Region) -> Result<Vec<OrbitSample>> {
    let group = CliffordTableau::enumerate(psi.num_qubits())?;
    region.check(psi.num_qubits())?;
    group.iter().map(|u| orbit_sample(psi, u, region)).collect()
}

/// Monte Carlo mean of `M_lin` of the marginal over the Clifford orbit.
pub fn mc_orbit_mlin(
    psi: &DenseState,
    region: &Region,
    samples: usize,
    seed: u64,
) -> Result<McEstimate> {
    let xs = orbit_samples(psi, region, samples, seed)?;
    McEstimate::from_values(&xs.iter().map(|s| s.m_lin).collect::<Vec<_>>(), seed)
}

/// `1 - d_A E[SP] / E[Pur]`: the ratio-of-averages statistic that the
/// closed forms describe. The standard error comes from the delta method.
pub fn ratio_of_averages(samples: &[OrbitSample], d_a: f64, seed: u64) -> Result<McEstimate> {
    let n = samples.len();
    if n < 2 {
        return Err(Error::InvalidArgument("need at least two samples".into()));
    }
    let nf = n as f64;
    let ms = samples.iter().map(|s| s.sp).sum::<f64>() / nf;
    let mp = samples.iter().map(|s| s.purity).sum::<f64>() / nf;
    let r = d_a * ms / mp;
    let (mut vs, mut vp, mut cov) = (0.0, 0.0, 0.0);
    for s in samples {
        let (a, b) = (d_a * s.sp - d_a * ms, s.purity - mp);
        vs += a * a;
        vp += b * b;
        cov += a * b;
    }
    let k = (n - 1) as f64;
    let (vs, vp, cov) = (vs / k, vp / k, cov / k);
    let var_r = ((vs - 2.0 * r * cov + r * r * vp) / (nf * mp * mp)).max(0.0);
    Ok(McEstimate {
        mean: 1.0 - r,
        std_error: var_r.sqrt(),
        samples: n,
        seed,
    })
}

/// Relative purity fluctuation over the Clifford orbit of `|0…0⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Fluctuation {
    pub relative_error: f64,
    pub bound: f64,
    pub n_e: usize,
    pub n_f: usize,
    pub mean_purity: f64,
}

/// `Δ Pur / E Pur` for the marginal on E = the first `n - round(f n)`
/// qubits, with exact tableau purities; `bound = 2^{-n(1-2f)/2}`.
pub fn purity_fluctuation(n: usize, f_fraction: f64, samples: usize, seed: u64) -> Result<Fluctuation> {
    if !(0.0..0.5).contains(&f_fraction) {
        return Err(Error::InvalidArgument(format!(
            "f = {f_fraction} must lie in [0, 1/2)"
        )));
    }
    let n_f = (f_fraction * n as f64).round() as usize;
    let n_e = n - n_f;
    let e = Region::range(0, n_e);
    let purities: Vec<f64> = (0..samples as u64)
        .into_par_iter()
        .map(|i| {
            let u = CliffordTableau::random(n, &mut rng::stream(seed, i));
            StabilizerMixedState::from_tableau(&u)
                .marginal_purity(&e)
                .map(|p| p.to_f64())
        })
        .collect::<Result<_>>()?;
    let est = McEstimate::from_values(&purities, seed)?;
    let std = est.std_error * (samples as f64).sqrt();
    Ok(Fluctuation {
        relative_error: std / est.mean,
        bound: (-(n as f64) * (1.0 - 2.0 * f_fraction) / 2.0).exp2(),
        n_e,
        n_f,
        mean_purity: est.mean,
    })
}
