//! Stabilizer-proxy purity bounds, the α window they imply, the two-copy
//! Λ diagnostic, and a simulated swap test for cost comparison.

use std::time::Instant;

use num_complex::Complex64;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use crate::dense::{parity, partial_trace_raw, pauli_masks, DenseState, DensityMatrix, MAX_DENSITY_QUBITS, MAX_STATE_QUBITS};
use crate::doped::{DopedCircuit, Partition};
use crate::error::{Error, Result};
use crate::pauli::{PauliString, Region};
use crate::rng;
use crate::stabilizer::Dyadic;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DyadicJson {
    pub k: i64,
}

impl From<Dyadic> for DyadicJson {
    fn from(d: Dyadic) -> Self {
        DyadicJson { k: d.log2 }
    }
}

/// Exact proxy purities `Pur(ρ_E) = 2^{k_E}`, `Pur(ρ_F) = 2^{k_F}` and the
/// sandwich `max_X Pur(ρ_X) ≤ Pur(ψ_E) ≤ 4^t min_X Pur(ρ_X)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundsReport {
    pub n: usize,
    pub t: usize,
    #[serde(rename = "nE")]
    pub n_e: usize,
    #[serde(rename = "lower_E")]
    pub lower_e: DyadicJson,
    #[serde(rename = "lower_F")]
    pub lower_f: DyadicJson,
    pub upper_factor_log2: i64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub true_purity: Option<f64>,
    pub alpha_window: [f64; 2],
    /// Bit operations of the whole proxy: cleansing plus both marginals.
    #[serde(skip)]
    pub proxy_bit_ops: u64,
}

impl BoundsReport {
    /// `log2` of the best lower bound.
    pub fn lower_log2(&self) -> i64 {
        self.lower_e.k.max(self.lower_f.k)
    }

    /// `log2` of the best upper bound (not clamped at 1).
    pub fn upper_log2(&self) -> i64 {
        self.upper_factor_log2 + self.lower_e.k.min(self.lower_f.k)
    }

    pub fn lower(&self) -> f64 {
        (self.lower_log2() as f64).exp2()
    }

    pub fn upper(&self) -> f64 {
        (self.upper_log2() as f64).exp2()
    }

    /// Both X variants individually: `Pur(ρ_X) ≤ truth ≤ 4^t Pur(ρ_X)`.
    pub fn sandwich_holds(&self, truth: f64, tol: f64) -> bool {
        [self.lower_e.k, self.lower_f.k].iter().all(|&k| {
            let lo = (k as f64).exp2();
            let hi = ((k + self.upper_factor_log2) as f64).exp2();
            lo <= truth * (1.0 + tol) && truth <= hi * (1.0 + tol)
        })
    }
}

/// Proxy bounds through the tableau path; the dense truth is filled in when
/// `n ≤ 14` and `n_E ≤ 10` and `with_dense` is set.
pub fn purity_bounds_opts(c: &DopedCircuit, part: &Partition, with_dense: bool) -> Result<BoundsReport> {
    let mut ops = 0u64;
    let out = c.cleanse_counted(part, &mut ops)?;
    let le = out.rho.marginal_purity_counted(&part.e, &mut ops)?;
    let lf = out.rho.marginal_purity_counted(&part.f, &mut ops)?;
    let true_purity = if with_dense && c.n <= MAX_STATE_QUBITS && part.n_e() <= MAX_DENSITY_QUBITS {
        Some(c.dense_state()?.reduced_density(&part.e)?.purity())
    } else {
        None
    };
    let mut r = BoundsReport {
        n: c.n,
        t: c.t,
        n_e: part.n_e(),
        lower_e: le.into(),
        lower_f: lf.into(),
        upper_factor_log2: 2 * c.t as i64,
        true_purity,
        alpha_window: [0.0, 0.0],
        proxy_bit_ops: ops,
    };
    let (_, w) = estimate_alpha(&r)?;
    r.alpha_window = w;
    Ok(r)
}

pub fn purity_bounds(c: &DopedCircuit, part: &Partition) -> Result<BoundsReport> {
    purity_bounds_opts(c, part, true)
}

/// `α_point = -log2(max lower)/n`, window `[-log2(upper)/n, α_point]`.
pub fn estimate_alpha(r: &BoundsReport) -> Result<(f64, [f64; 2])> {
    if r.n == 0 {
        return Err(Error::InvalidArgument("degenerate report with n = 0".into()));
    }
    let n = r.n as f64;
    let point = -(r.lower_log2() as f64) / n;
    Ok((point, [-(r.upper_log2() as f64) / n, point]))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SwapTestResult {
    /// `2·accept/shots - 1`, unclamped.
    pub estimate: f64,
    pub estimate_clamped: f64,
    pub shots: u64,
    pub accept_count: u64,
    pub seed: u64,
}

/// Simulated swap test on two copies of a state with purity `purity`:
/// each shot accepts with probability `(1 + purity)/2`.
pub fn swap_test_purity(purity: f64, shots: u64, seed: u64) -> Result<SwapTestResult> {
    if shots == 0 {
        return Err(Error::InvalidArgument("shots must be positive".into()));
    }
    if !(0.0..=1.0 + 1e-9).contains(&purity) {
        return Err(Error::InvalidArgument(format!("purity {purity}")));
    }
    let p = ((1.0 + purity) / 2.0).min(1.0);
    let accept_count = Binomial::new(shots, p)
        .map_err(|e| Error::InvalidArgument(e.to_string()))?
        .sample(&mut rng::seeded(seed));
    let estimate = 2.0 * accept_count as f64 / shots as f64 - 1.0;
    Ok(SwapTestResult {
        estimate,
        estimate_clamped: estimate.clamp(0.0, 1.0),
        shots,
        accept_count,
        seed,
    })
}

pub fn swap_test(rho: &DensityMatrix, shots: u64, seed: u64) -> Result<SwapTestResult> {
    swap_test_purity(rho.purity(), shots, seed)
}

/// Shots for a swap-test standard deviation of `eps · purity`:
/// `(1 - Pur²) / (eps Pur)²`, at least one.
pub fn swap_shots_needed(purity: f64, eps: f64) -> u64 {
    let n = (1.0 - purity * purity) / (eps * purity).powi(2);
    n.ceil().max(1.0) as u64
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResourceRow {
    pub method: String,
    pub cost_metric: String,
    pub cost_value: f64,
    pub error: f64,
}

/// Swap-test shots for relative error `eps` next to the proxy's exact cost.
/// The swap row uses the dense purity when available, else the proxy lower bound.
pub fn resource_comparison(c: &DopedCircuit, part: &Partition, eps: f64) -> Result<Vec<ResourceRow>> {
    if !(eps > 0.0) {
        return Err(Error::InvalidArgument(format!("epsilon {eps}")));
    }
    let r = purity_bounds(c, part)?;
    let pur = r.true_purity.unwrap_or_else(|| r.lower());
    Ok(vec![
        ResourceRow {
            method: "swap-test".into(),
            cost_metric: "shots".into(),
            cost_value: swap_shots_needed(pur, eps) as f64,
            error: eps * pur,
        },
        ResourceRow {
            method: "stabilizer-proxy".into(),
            cost_metric: "bit_ops".into(),
            cost_value: r.proxy_bit_ops as f64,
            error: 0.0,
        },
    ])
}

/// Wall-clock seconds of [`purity_bounds_opts`] without the dense part.
pub fn timed_bounds(c: &DopedCircuit, part: &Partition) -> Result<(BoundsReport, f64)> {
    let start = Instant::now();
    let r = purity_bounds_opts(c, part, false)?;
    Ok((r, start.elapsed().as_secs_f64()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LambdaReport {
    pub lambda1: f64,
    pub lambda2: f64,
    /// `d_Y/(d_Y²-1) · Pur(ρ_F)`.
    pub predicted1: f64,
    /// `d_Y/(d_Y²-1) · Pur(ρ_E)`.
    pub predicted2: f64,
    pub check1: bool,
    pub check2: bool,
    /// `tr[X Φ'^{⊗2} T] / d_Y²` with the full swap T; equals `Pur(ρ_F)`.
    pub full_swap: f64,
    /// `tr[X Φ'^{⊗2}] / d_Y²`; equals `Pur(ρ_E)`.
    pub no_swap: f64,
    pub pur_rho_e: f64,
    pub pur_rho_f: f64,
}

pub const MAX_LAMBDA_QUBITS: usize = 8;

fn apply_pauli_left(p: &PauliString, m: &[Complex64], dim: usize) -> Vec<Complex64> {
    let (x, z, coef) = pauli_masks(p);
    let mut out = vec![Complex64::new(0.0, 0.0); m.len()];
    for b in 0..dim {
        let s = coef * parity(z & b);
        let dst = (b ^ x) * dim;
        for c in 0..dim {
            out[dst + c] = s * m[b * dim + c];
        }
    }
    out
}

fn trace_square(m: &[Complex64], dim: usize) -> Complex64 {
    let mut t = Complex64::new(0.0, 0.0);
    for r in 0..dim {
        for c in 0..dim {
            t += m[r * dim + c] * m[c * dim + r];
        }
    }
    t
}

fn trace(m: &[Complex64], dim: usize) -> Complex64 {
    (0..dim).map(|i| m[i * dim + i]).sum()
}

/// Λ₁ and Λ₂ by dense two-copy contraction. With `X = W^{⊗2} T_E W^{†⊗2}`
/// and `Φ' = Φ_Ȳ ⊗ I_Y`, `Λ₁ = tr[X Φ'^{⊗2} T_Ȳ]/(d_Y(d_Y²-1))` and `Λ₂` the
/// same with `T_Y`. Each term is evaluated as `tr_Z[(tr_Z̄(W P_E W† Φ'))²]`.
pub fn lambda_diagnostic(c: &DopedCircuit, part: &Partition) -> Result<LambdaReport> {
    let n = c.n;
    if n > MAX_LAMBDA_QUBITS {
        return Err(Error::TooLarge {
            what: "qubits for the Λ diagnostic",
            value: n,
            max: MAX_LAMBDA_QUBITS,
        });
    }
    if c.t == 0 {
        return Err(Error::InvalidArgument("t = 0 makes d_Y² - 1 vanish".into()));
    }
    let out = c.cleanse(part)?;
    let y = &part.y;
    let y_bar = part.y_bar();
    let dim = 1usize << n;

    // Φ' from the dense cleansed state, identity on Y
    let phi_ybar = c.dense_phi_bar(part)?;
    let mut phi_p = vec![Complex64::new(0.0, 0.0); dim * dim];
    let gather = |i: usize, qs: &[usize]| {
        qs.iter()
            .enumerate()
            .fold(0usize, |acc, (j, &q)| acc | (((i >> q) & 1) << j))
    };
    for r in 0..dim {
        for col in 0..dim {
            if gather(r, y.indices()) == gather(col, y.indices()) {
                phi_p[r * dim + col] =
                    phi_ybar.get(gather(r, y_bar.indices()), gather(col, y_bar.indices()));
            }
        }
    }

    let n_e = part.n_e();
    let d_e = 1usize << n_e;
    let (mut s1, mut s2, mut full, mut none) = (0.0, 0.0, 0.0, 0.0);
    for code in 0..d_e * d_e {
        let mut p = PauliString::identity(n);
        for (j, &q) in part.e.indices().iter().enumerate() {
            let k = (code >> (2 * j)) & 3;
            p.set(q, k & 1 == 1, k & 2 == 2);
        }
        let a = out.w.conjugate(&p)?;
        let m = apply_pauli_left(&a, &phi_p, dim);
        let r1 = partial_trace_raw(&m, n, &y_bar);
        let r2 = partial_trace_raw(&m, n, y);
        s1 += trace_square(&r1, 1 << y_bar.len()).re;
        s2 += trace_square(&r2, 1 << y.len()).re;
        full += trace_square(&m, dim).re;
        none += trace(&m, dim).norm_sqr();
    }
    let dy = (1u64 << c.t) as f64;
    let norm = d_e as f64 * dy * (dy * dy - 1.0);
    let lambda1 = s1 / norm;
    let lambda2 = s2 / norm;
    let pur_rho_e = out.rho.marginal_purity(&part.e)?.to_f64();
    let pur_rho_f = out.rho.marginal_purity(&part.f)?.to_f64();
    let k = dy / (dy * dy - 1.0);
    let (predicted1, predicted2) = (k * pur_rho_f, k * pur_rho_e);
    Ok(LambdaReport {
        lambda1,
        lambda2,
        predicted1,
        predicted2,
        check1: (lambda1 - predicted1).abs() <= 1e-9,
        check2: (lambda2 - predicted2).abs() <= 1e-9,
        full_swap: full / (d_e as f64 * dy * dy),
        no_swap: none / (d_e as f64 * dy * dy),
        pur_rho_e,
        pur_rho_f,
    })
}

/// Pure-state purity on a region, densely.
pub fn dense_purity(state: &DenseState, region: &Region) -> Result<f64> {
    Ok(state.reduced_density(region)?.purity())
}
