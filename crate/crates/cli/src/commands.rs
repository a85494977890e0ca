use std::path::Path;

use rand::Rng;
use serde::Serialize;
use stabcleanse::dense::DenseState;
use stabcleanse::doped::{
    build_doped_circuit_nf, cleansed_se_e, text_hash, DopedCircuit, Partition, Sidecar,
};
use stabcleanse::moments::{
    orbit_exhaustive, orbit_samples, page_purity, prop1_exact, ratio_of_averages, McEstimate,
    OrbitSample, MAX_ORBIT_QUBITS,
};
use stabcleanse::phase::{g_value, mc_se_samples, phase_curve as curve, PhasePoint};
use stabcleanse::protocol::{
    lambda_diagnostic, purity_bounds, resource_comparison, swap_shots_needed, swap_test_purity,
    DyadicJson, LambdaReport, ResourceRow,
};
use stabcleanse::{rng, Circuit, CliffordTableau, Gate, Region};

use crate::config::ExperimentConfig;
use crate::format::{csv_string, json_string, real};
use crate::{CliError, Outcome};

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn outcome(cfg: &ExperimentConfig, primary: String) -> Outcome {
    Outcome {
        primary,
        output_path: cfg.output_path.clone(),
        files: Vec::new(),
    }
}

fn default_n_f(n: usize) -> usize {
    (n as f64 / 3.0).round() as usize
}

/// `(n, t, n_F)` for commands that build a doped circuit.
fn doped_params(cfg: &ExperimentConfig, n: usize, t: usize) -> Result<(usize, usize, usize), CliError> {
    let n = cfg.n_or(n);
    let t = cfg.t_or(n, t)?;
    let n_f = cfg.n_f_or(n, default_n_f(n))?;
    Ok((n, t, n_f))
}

fn sub_seed(seed: u64, stream: u64, i: u64) -> u64 {
    rng::stream(seed, (stream << 40) | i).random()
}

// phase-curve

pub fn phase_curve(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let n = cfg.n_or(60);
    let f = cfg.f_density.unwrap_or(1.0 / 3.0);
    if !(f > 0.0 && f < 0.5) {
        return Err(usage(format!("f_density = {f} must lie in (0, 1/2)")));
    }
    let grid = cfg
        .grid
        .clone()
        .unwrap_or_else(|| (0..=60).map(|i| i as f64 / 20.0).collect());
    let c = curve(n, f, &grid).map_err(|e| usage(format!("invalid grid: {e}")))?;
    let rows: Vec<Vec<String>> = c
        .points
        .iter()
        .map(|p| vec![real(p.t_over_f), real(p.g), real(p.g_ratio)])
        .collect();
    Ok(outcome(cfg, csv_string(&["t_over_f", "g_bits", "g_ratio"], &rows)?))
}

// prop1

#[derive(Debug, Serialize)]
struct RegionReport {
    qubits: usize,
    predicted: f64,
    mean: f64,
    std_error: f64,
    /// Mean of the per-sample linear entropies (average of ratios).
    mean_m_lin: f64,
    pass: bool,
}

#[derive(Debug, Serialize)]
struct PageReport {
    predicted: f64,
    mean: f64,
    std_error: f64,
    pass: bool,
}

#[derive(Debug, Serialize)]
struct Prop1Report {
    n: usize,
    #[serde(rename = "n_E")]
    n_e: usize,
    state: String,
    mode: String,
    samples: usize,
    seed: Option<u64>,
    m_lin_psi: f64,
    #[serde(rename = "E")]
    e: RegionReport,
    #[serde(rename = "F")]
    f: RegionReport,
    identity_residual: f64,
    exact_match: Option<bool>,
    page: PageReport,
    pass: bool,
}

fn input_state(kind: &str, n: usize) -> Result<DenseState, CliError> {
    let mut c = Circuit::new(n);
    match kind {
        "t-product" => {
            for q in 0..n {
                c.push(Gate::H(q))?;
                c.push(Gate::T(q))?;
            }
        }
        "stabilizer" => {}
        other => return Err(usage(format!("unknown state {other:?} (t-product, stabilizer)"))),
    }
    Ok(DenseState::simulate(&c)?)
}

fn region_report(
    samples: &[OrbitSample],
    qubits: usize,
    predicted: f64,
    seed: u64,
    tol: f64,
) -> Result<RegionReport, CliError> {
    let est = ratio_of_averages(samples, (1u64 << qubits) as f64, seed)?;
    let mean_m_lin = samples.iter().map(|s| s.m_lin).sum::<f64>() / samples.len() as f64;
    Ok(RegionReport {
        qubits,
        predicted,
        mean: est.mean,
        std_error: est.std_error,
        mean_m_lin,
        pass: (est.mean - predicted).abs() <= 3.0 * est.std_error + tol,
    })
}

pub fn prop1(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let n = cfg.n_or(6);
    if n == 0 || n > MAX_ORBIT_QUBITS {
        return Err(usage(format!("n = {n} must lie in 1..={MAX_ORBIT_QUBITS}")));
    }
    let n_e = cfg.n_e.unwrap_or((2 * n).div_ceil(3));
    if n_e == 0 || n_e > n {
        return Err(usage(format!("n_e = {n_e} must lie in 1..={n}")));
    }
    let state = cfg.state.clone().unwrap_or_else(|| "t-product".into());
    let mode = cfg.mode.clone().unwrap_or_else(|| "mc".into());
    let psi = input_state(&state, n)?;
    let m_lin_psi = psi.density_matrix()?.se_report()?.m_lin;
    let (pe, pf) = prop1_exact(m_lin_psi.clamp(0.0, 1.0), n, n_e)?;
    let e = Region::range(0, n_e);
    let f = Region::range(n_e, n);
    let (se, sf, seed, tol) = match mode.as_str() {
        "mc" => {
            let seed = cfg.require_seed()?;
            let samples = cfg.samples.unwrap_or(10_000);
            if samples < 2 {
                return Err(usage("samples must be at least 2"));
            }
            // the same Cliffords serve both regions
            let se = orbit_samples(&psi, &e, samples, seed)?;
            let sf = orbit_samples(&psi, &f, samples, seed)?;
            (se, sf, Some(seed), 1e-12)
        }
        "exhaustive" => {
            if n > 2 {
                return Err(usage(format!("exhaustive mode needs n ≤ 2, got {n}")));
            }
            (orbit_exhaustive(&psi, &e)?, orbit_exhaustive(&psi, &f)?, None, 1e-12)
        }
        other => return Err(usage(format!("unknown mode {other:?} (mc, exhaustive)"))),
    };
    let s = seed.unwrap_or(0);
    let re = region_report(&se, n_e, pe, s, tol)?;
    let rf = region_report(&sf, n - n_e, pf, s, tol)?;
    let identity_residual = (re.mean + rf.mean - m_lin_psi).abs();
    let exact_match = (mode == "exhaustive").then(|| {
        (re.mean - pe).abs() <= 1e-12 && (rf.mean - pf).abs() <= 1e-12 && identity_residual <= 1e-12
    });
    let purities: Vec<f64> = se.iter().map(|x| x.purity).collect();
    let pur = McEstimate::from_values(&purities, s)?;
    let page_pred = {
        let r = page_purity(1u64 << n_e, 1u64 << (n - n_e))?;
        num_traits_f64(&r)
    };
    let page = PageReport {
        predicted: page_pred,
        mean: pur.mean,
        std_error: pur.std_error,
        pass: (pur.mean - page_pred).abs() <= 3.0 * pur.std_error + 1e-12,
    };
    let pass = re.pass && rf.pass && page.pass && exact_match.unwrap_or(true);
    let report = Prop1Report {
        n,
        n_e,
        state,
        mode,
        samples: se.len(),
        seed,
        m_lin_psi,
        e: re,
        f: rf,
        identity_residual,
        exact_match,
        page,
        pass,
    };
    Ok(outcome(cfg, json_string(&report)?))
}

fn num_traits_f64(r: &num_rational::BigRational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}

// purity-estimate

fn read_text(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))
}

/// A Clifford circuit as a doped circuit with no magic: `V` is the whole
/// circuit and `D` the identity.
fn clifford_as_doped(c: &Circuit) -> Result<DopedCircuit, CliError> {
    let v = CliffordTableau::from_circuit(c)?;
    Ok(DopedCircuit {
        n: c.n,
        t: 0,
        seed: 0,
        d: CliffordTableau::identity(c.n),
        v,
        c_t: Circuit::new(0),
        pi_y: (0..c.n).collect(),
        y: Region::empty(),
    })
}

fn circuit_from_file(cfg: &ExperimentConfig, path: &Path) -> Result<(DopedCircuit, Partition), CliError> {
    let text = read_text(path)?;
    let sidecar_path = cfg.sidecar.clone().or_else(|| {
        let p = path.with_extension("json");
        p.exists().then_some(p)
    });
    let parse = |n: Option<usize>| {
        Circuit::parse(&text, n).map_err(|e| usage(format!("{}: {e}", path.display())))
    };
    match sidecar_path {
        Some(sp) => {
            let sc: Sidecar = serde_json::from_str(&read_text(&sp)?)
                .map_err(|e| usage(format!("{}: {e}", sp.display())))?;
            let parsed = parse(Some(sc.n))?;
            let (c, part) = build_doped_circuit_nf(sc.n, sc.t, sc.n_f, sc.seed)?;
            if c.sidecar(&part) != sc {
                return Err(usage(format!(
                    "{} does not match the circuit regenerated from its seed",
                    sp.display()
                )));
            }
            if text_hash(&parsed.to_text()) != sc.hashes.circuit {
                return Err(usage(format!(
                    "{} does not match the hash recorded in {}",
                    path.display(),
                    sp.display()
                )));
            }
            Ok((c, part))
        }
        None => {
            let c = parse(cfg.n)?;
            if !c.is_clifford() {
                return Err(usage(format!(
                    "{} contains T gates; its JSON sidecar is needed to recover the decomposition",
                    path.display()
                )));
            }
            let n_f = cfg.n_f_or(c.n, default_n_f(c.n))?;
            let part = Partition::new(c.n, n_f, 0)?;
            Ok((clifford_as_doped(&c)?, part))
        }
    }
}

pub fn purity_estimate(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let (c, part) = match &cfg.circuit {
        Some(path) => circuit_from_file(cfg, path)?,
        None => {
            let (n, t, n_f) = doped_params(cfg, 12, 3)?;
            build_doped_circuit_nf(n, t, n_f, cfg.require_seed()?)?
        }
    };
    let r = purity_bounds(&c, &part)?;
    if let Some(truth) = r.true_purity {
        if !r.sandwich_holds(truth, 1e-9) {
            return Err(CliError::Internal(format!("bounds violated: {r:?}")));
        }
    }
    Ok(outcome(cfg, json_string(&r)?))
}

// mc-se

pub fn mc_se(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let seed = cfg.require_seed()?;
    let n = cfg.n_or(9);
    let n_f = cfg.n_f_or(n, default_n_f(n))?;
    let samples = cfg.samples.unwrap_or(500);
    if samples < 2 {
        return Err(usage("samples must be at least 2"));
    }
    let t_min = cfg.t_min.unwrap_or(0);
    let t_max = cfg.t_max.unwrap_or(n);
    if t_min > t_max || t_max > n {
        return Err(usage(format!("t range {t_min}..={t_max} must lie in 0..={n}")));
    }
    let mut rows = Vec::new();
    for t in t_min..=t_max {
        let p = PhasePoint::from_counts(n, t, n_f)?;
        let xs = mc_se_samples(n, t, n_f, samples, sub_seed(seed, 0, t as u64))?;
        let est = McEstimate::from_values(&xs, seed)?;
        if est.mean < -1e-9 {
            return Err(CliError::Internal(format!("negative mean entropy at t = {t}")));
        }
        rows.push(vec![
            t.to_string(),
            real(est.mean),
            real(est.std_error),
            real(g_value(&p)?),
        ]);
    }
    Ok(outcome(cfg, csv_string(&["t", "mean", "std_error", "g_value"], &rows)?))
}

// cleanse

#[derive(Debug, Serialize)]
struct CleanseReport {
    n: usize,
    t: usize,
    #[serde(rename = "n_F")]
    n_f: usize,
    #[serde(rename = "Y")]
    y: Vec<usize>,
    localized: bool,
    #[serde(rename = "pur_rho_E")]
    pur_rho_e: DyadicJson,
    #[serde(rename = "pur_rho_F")]
    pur_rho_f: DyadicJson,
    /// M₂ of the cleansed state on E (dense, small n only).
    #[serde(rename = "se_E", skip_serializing_if = "Option::is_none")]
    se_e: Option<f64>,
    phi_bar: String,
    rho: String,
    sidecar: Sidecar,
}

pub const MAX_CLEANSE_DENSE: usize = 12;

pub fn cleanse(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let seed = cfg.require_seed()?;
    let (n, t, n_f) = doped_params(cfg, 8, 2)?;
    let (c, part) = build_doped_circuit_nf(n, t, n_f, seed)?;
    let out = c.cleanse(&part)?;
    let se_e = if n <= MAX_CLEANSE_DENSE {
        Some(cleansed_se_e(&c, &part)?)
    } else {
        None
    };
    if part.is_localized() && se_e.is_some_and(|s| s.abs() > 1e-9) {
        return Err(CliError::Internal("localized magic left entropy on E".into()));
    }
    let sidecar = c.sidecar(&part);
    let report = CleanseReport {
        n,
        t,
        n_f,
        y: part.y.indices().to_vec(),
        localized: part.is_localized(),
        pur_rho_e: out.rho.marginal_purity(&part.e)?.into(),
        pur_rho_f: out.rho.marginal_purity(&part.f)?.into(),
        se_e,
        phi_bar: out.phi_bar.to_text(),
        rho: out.rho.to_text(),
        sidecar: sidecar.clone(),
    };
    let mut o = outcome(cfg, json_string(&report)?);
    if let Some(dir) = &cfg.out_dir {
        o.files = vec![
            (dir.join("circuit.txt"), c.flattened().to_text()),
            (dir.join("circuit.json"), json_string(&sidecar)?),
            (dir.join("phi_bar.stab"), out.phi_bar.to_text()),
            (dir.join("rho.stab"), out.rho.to_text()),
        ];
    }
    Ok(o)
}

// lambda-check

#[derive(Debug, Serialize)]
struct LambdaInstance {
    index: usize,
    seed: u64,
    #[serde(flatten)]
    report: LambdaReport,
}

#[derive(Debug, Serialize)]
struct LambdaSummary {
    n: usize,
    t: usize,
    #[serde(rename = "n_F")]
    n_f: usize,
    seed: u64,
    instances: Vec<LambdaInstance>,
    all_pass: bool,
}

pub fn lambda_check(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let seed = cfg.require_seed()?;
    let n = cfg.n_or(4);
    let t = cfg.t_or(n, 1)?;
    let n_f = cfg.n_f_or(n, default_n_f(n).max(1))?;
    let count = cfg.count.unwrap_or(10);
    let mut instances = Vec::with_capacity(count);
    for i in 0..count {
        let s = sub_seed(seed, 1, i as u64);
        let (c, part) = build_doped_circuit_nf(n, t, n_f, s)?;
        instances.push(LambdaInstance {
            index: i,
            seed: s,
            report: lambda_diagnostic(&c, &part)?,
        });
    }
    let all_pass = instances.iter().all(|x| x.report.check1 && x.report.check2);
    let s = LambdaSummary {
        n,
        t,
        n_f,
        seed,
        instances,
        all_pass,
    };
    Ok(outcome(cfg, json_string(&s)?))
}

// swap-bench

#[derive(Debug, Serialize)]
struct Unbiased {
    n: usize,
    purity: f64,
    shots: u64,
    reps: usize,
    mean: f64,
    std_error: f64,
    pass: bool,
}

#[derive(Debug, Serialize)]
struct ScalingRow {
    epsilon: f64,
    shots: u64,
    /// Spread of the estimate over repetitions, relative to the purity.
    empirical_relative_error: f64,
}

#[derive(Debug, Serialize)]
struct Scaling {
    rows: Vec<ScalingRow>,
    /// Fitted exponent of shots against epsilon.
    shots_exponent: f64,
    /// Fitted exponent of the empirical error against shots.
    error_exponent: f64,
    pass: bool,
}

#[derive(Debug, Clone, Serialize)]
struct ComparisonEntry {
    n: usize,
    purity: f64,
    rows: Vec<ResourceRow>,
}

#[derive(Debug, Serialize)]
struct Comparison {
    entries: Vec<ComparisonEntry>,
    /// Fitted exponent of proxy bit operations against n.
    proxy_degree: f64,
    /// Fitted exponent of swap-test shots against 1/Pur².
    shots_vs_inverse_purity_sq: f64,
}

#[derive(Debug, Serialize)]
struct SwapReport {
    seed: u64,
    t: usize,
    f_density: f64,
    epsilon: f64,
    unbiased: Unbiased,
    scaling: Scaling,
    comparison: Comparison,
}

fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

fn repeated_estimates(pur: f64, shots: u64, reps: usize, seed: u64, stream: u64) -> Result<Vec<f64>, CliError> {
    (0..reps)
        .map(|i| Ok(swap_test_purity(pur, shots, sub_seed(seed, stream, i as u64))?.estimate))
        .collect()
}

pub fn swap_bench(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let seed = cfg.require_seed()?;
    let t = cfg.t.unwrap_or(2);
    let f = cfg.f_density.unwrap_or(0.5);
    let shots = cfg.shots.unwrap_or(10_000);
    let reps = cfg.reps.unwrap_or(1000);
    let eps = cfg.epsilon.unwrap_or(0.1);
    let epsilons = cfg.epsilons.clone().unwrap_or_else(|| vec![0.1, 0.05, 0.025]);
    let n_list = cfg.n_list.clone().unwrap_or_else(|| vec![6, 8, 10, 12]);
    if n_list.len() < 2 || epsilons.len() < 2 || reps < 2 {
        return Err(usage("need at least two n values, two epsilons and two repetitions"));
    }
    if epsilons.iter().any(|e| !(*e > 0.0)) || !(eps > 0.0) {
        return Err(usage("epsilons must be positive"));
    }

    let mut entries = Vec::new();
    for (j, &n) in n_list.iter().enumerate() {
        let n_f = ExperimentConfig {
            f_density: Some(f),
            ..Default::default()
        }
        .n_f_or(n, 0)?;
        let (c, part) = build_doped_circuit_nf(n, t, n_f, sub_seed(seed, 2, j as u64))?;
        let rows = resource_comparison(&c, &part, eps)?;
        let b = purity_bounds(&c, &part)?;
        let purity = b
            .true_purity
            .ok_or_else(|| usage(format!("n = {n} is beyond the dense purity cap")))?;
        entries.push(ComparisonEntry { n, purity, rows });
    }

    let pur = entries[0].purity;
    let xs = repeated_estimates(pur, shots, reps, seed, 3)?;
    let est = McEstimate::from_values(&xs, seed)?;
    let unbiased = Unbiased {
        n: entries[0].n,
        purity: pur,
        shots,
        reps,
        mean: est.mean,
        std_error: est.std_error,
        pass: (est.mean - pur).abs() <= 3.0 * est.std_error,
    };

    let mut rows = Vec::new();
    for (k, &e) in epsilons.iter().enumerate() {
        let s = swap_shots_needed(pur, e);
        let xs = repeated_estimates(pur, s, reps, seed, 4 + k as u64)?;
        let sd = McEstimate::from_values(&xs, seed)?.std_error * (reps as f64).sqrt();
        rows.push(ScalingRow {
            epsilon: e,
            shots: s,
            empirical_relative_error: sd / pur,
        });
    }
    let ln = |v: f64| v.ln();
    let shots_exponent = slope(
        &rows.iter().map(|r| ln(r.epsilon)).collect::<Vec<_>>(),
        &rows.iter().map(|r| ln(r.shots as f64)).collect::<Vec<_>>(),
    );
    let error_exponent = slope(
        &rows.iter().map(|r| ln(r.shots as f64)).collect::<Vec<_>>(),
        &rows.iter().map(|r| ln(r.empirical_relative_error)).collect::<Vec<_>>(),
    );
    let pass = (shots_exponent + 2.0).abs() < 0.1
        && (error_exponent + 0.5).abs() < 0.1
        && rows
            .iter()
            .all(|r| (r.empirical_relative_error / r.epsilon - 1.0).abs() < 0.15);
    let scaling = Scaling {
        rows,
        shots_exponent,
        error_exponent,
        pass,
    };

    let proxy_degree = slope(
        &entries.iter().map(|e| ln(e.n as f64)).collect::<Vec<_>>(),
        &entries.iter().map(|e| ln(e.rows[1].cost_value)).collect::<Vec<_>>(),
    );
    let shots_vs_inverse_purity_sq = slope(
        &entries.iter().map(|e| -2.0 * ln(e.purity)).collect::<Vec<_>>(),
        &entries.iter().map(|e| ln(e.rows[0].cost_value)).collect::<Vec<_>>(),
    );

    let mut o = outcome(cfg, String::new());
    if let Some(p) = &cfg.table_path {
        let body: Vec<Vec<String>> = entries
            .iter()
            .flat_map(|e| {
                e.rows.iter().map(move |r| {
                    vec![
                        e.n.to_string(),
                        r.method.clone(),
                        r.cost_metric.clone(),
                        real(r.cost_value),
                        real(r.error),
                    ]
                })
            })
            .collect();
        o.files.push((
            p.clone(),
            csv_string(&["n", "method", "cost_metric", "cost_value", "error"], &body)?,
        ));
    }
    let report = SwapReport {
        seed,
        t,
        f_density: f,
        epsilon: eps,
        unbiased,
        scaling,
        comparison: Comparison {
            entries,
            proxy_degree,
            shots_vs_inverse_purity_sq,
        },
    };
    o.primary = json_string(&report)?;
    Ok(o)
}
