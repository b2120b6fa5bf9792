//! Scenario runners. Each one computes every artifact in memory so that a
//! failing run leaves nothing on disk.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::thread;

use decohere_core::averaging::{coherence_report, dephase_in_basis, fit_inverse_t, offdiag_norms, trace_distance, CoherenceReport, InverseTFit, ThermalSystem};
use decohere_core::localization::{
    coherence_length, ehrenfest_track, evolve_and_reduce, gaussian_packet, localization_report, lumps, plane_wave, pointer_positions,
    position_variance, potentials, product_state, t_dec_matrix, LatticeModel, Monitor, Resolution,
};
use decohere_core::quadrature::{linspace, logspace};
use decohere_core::random::random_state;
use decohere_core::twostate::{
    coherence_factor, coherence_factor_average, coherence_envelope, decoherence_time, noncommutative_diagnostic, noncommutative_growth,
    saddle_comparison, v_from_split, SaddleComparison, TwoStateModel,
};
use decohere_core::{Complex64 as C64, DensityMatrix};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::config::{first_order_window, InitialState, LocalizeParams, NoncommutativeParams, Params, PotentialShape, ScenarioConfig, SweepPlan, ThermalParams, TwoStateParams};
use crate::error::{CliError, Result};
use crate::output::{Artifact, CsvTable};

pub const TWOSTATE_HEADER: [&str; 7] =
    ["t", "re_r", "im_r", "avg_r_modulus", "offdiag_l1_reduced", "exact_offdiag_V", "estimate_offdiag_V"];
pub const LOCALIZE_HEADER: [&str; 6] = ["t", "offdiag_l1", "coherence_length", "purity", "mean_R", "var_R"];

/// Computes all artifacts for `cfg`.
pub fn run(cfg: &ScenarioConfig) -> Result<Vec<Artifact>> {
    match &cfg.params {
        Params::Thermal(p) => thermal(cfg, p),
        Params::Twostate(p) => twostate(cfg, p),
        Params::Noncommutative(p) => noncommutative(cfg, p),
        Params::Localize(p) => localize(cfg, p),
        Params::Sweep(plan) => sweep(plan),
    }
}

fn rng(cfg: &ScenarioConfig, what: &str) -> Result<ChaCha8Rng> {
    Ok(ChaCha8Rng::seed_from_u64(cfg.require_seed(what)?))
}

#[derive(Serialize)]
struct ComplexValue {
    re: f64,
    im: f64,
    modulus: f64,
}

impl From<C64> for ComplexValue {
    fn from(z: C64) -> Self {
        ComplexValue { re: z.re, im: z.im, modulus: z.norm() }
    }
}

#[derive(Serialize)]
struct ThermalSummary {
    energies: Vec<f64>,
    min_gap: f64,
    window_min: f64,
    window_max: f64,
    windows: usize,
    fit: InverseTFit,
    /// Trace distance between the dephased initial state and the longest average.
    dephased_trace_distance: f64,
    dephased_max_abs_diff: f64,
}

fn thermal(cfg: &ScenarioConfig, p: &ThermalParams) -> Result<Vec<Artifact>> {
    let sys = match &p.energies {
        Some(e) => ThermalSystem::new(e.clone(), vec![C64::new(1.0, 0.0); e.len()], cfg.hbar)?,
        None => ThermalSystem::random(&mut rng(cfg, "the thermal spectrum")?, p.levels, p.spacing, cfg.hbar)?,
    };
    let unit = cfg.hbar / sys.min_gap();
    let windows = logspace(p.t_min * unit, p.t_max * unit, p.windows);
    let averages = sys.window_sweep(&windows, p.points_per_period)?;
    let reports: Vec<CoherenceReport> = averages.iter().zip(&windows).map(|(rho, &w)| coherence_report(rho, w)).collect();

    let mut csv = CsvTable::new(&CoherenceReport::CSV_HEADER);
    for r in &reports {
        csv.row(&r.csv_fields());
    }
    let l1: Vec<f64> = reports.iter().map(|r| r.offdiag_l1).collect();
    let fit = fit_inverse_t(&windows, &l1)?;
    let dephased = dephase_in_basis(&sys.density_at(0.0), &sys.spectrum())?;
    let last = averages.last().expect("at least three windows");
    let diff = dephased.entries() - last.entries();
    let summary = ThermalSummary {
        energies: sys.energies().to_vec(),
        min_gap: sys.min_gap(),
        window_min: windows[0],
        window_max: windows[windows.len() - 1],
        windows: windows.len(),
        fit,
        dephased_trace_distance: trace_distance(&dephased, last)?,
        dephased_max_abs_diff: diff.iter().map(|z| z.norm()).fold(0.0, f64::max),
    };
    Ok(vec![csv.into_artifact("thermal.csv"), Artifact::json("summary.json", &summary)])
}

#[derive(Serialize)]
struct TwoStateSummary {
    tau: f64,
    rate_gap: f64,
    theta0: f64,
    window: f64,
    coherence_average: ComplexValue,
    envelope: f64,
    saddle_time: f64,
    saddle: SaddleComparison,
}

fn twostate(cfg: &ScenarioConfig, p: &TwoStateParams) -> Result<Vec<Artifact>> {
    let (up, down) = (p.lambda_up.expect("resolved"), p.lambda_down.expect("resolved"));
    let model = TwoStateModel::constant_rate(p.eps_up, p.eps_down, up, down)?.with_hbar(cfg.hbar)?;
    let tau = decoherence_time(&model)?;
    let saddle_time = p.saddle_time.expect("resolved");
    let saddle = saddle_comparison(&model, p.n_theta, saddle_time, p.gap_threshold)?;
    let weight = 2.0 * (p.theta0.cos() * p.theta0.sin()).abs();

    let mut csv = CsvTable::new(&TWOSTATE_HEADER);
    for t in linspace(0.0, p.window, p.samples) {
        let r = coherence_factor(&model, t)?;
        let avg = if t > 0.0 { coherence_factor_average(&model, t)?.norm() } else { 1.0 };
        csv.row(&[t, r.re, r.im, avg, weight * avg, 0.0, 0.0]);
    }
    let summary = TwoStateSummary {
        tau,
        rate_gap: model.rate_gap(),
        theta0: p.theta0,
        window: p.window,
        coherence_average: coherence_factor_average(&model, p.window)?.into(),
        envelope: coherence_envelope(&model, p.window),
        saddle_time,
        saddle,
    };
    Ok(vec![csv.into_artifact("twostate.csv"), Artifact::json("summary.json", &summary)])
}

#[derive(Serialize)]
struct NoncommutativeSummary {
    delta_eps: f64,
    delta_v: f64,
    first_order_window: f64,
    t_max: f64,
    /// Largest `|exact − estimate| / |estimate|` for `0 < t ≤ first_order_window`.
    max_relative_difference: Option<f64>,
    diagnostic_time: f64,
    diagnostic_peak: f64,
    diagnostic_estimate: f64,
}

fn noncommutative(cfg: &ScenarioConfig, p: &NoncommutativeParams) -> Result<Vec<Artifact>> {
    let (eu, ed) = (p.eps_up.expect("resolved"), p.eps_down.expect("resolved"));
    let (vp, vm) = (p.v_plus.expect("resolved"), p.v_minus.expect("resolved"));
    let model = TwoStateModel::with_v(eu, ed, v_from_split(vp, vm)?)?.with_hbar(cfg.hbar)?;
    let t_max = p.t_max.expect("resolved");
    let valid = first_order_window(cfg.hbar, eu - ed, vp - vm);
    let weight = 2.0 * (p.theta0.cos() * p.theta0.sin()).abs();

    let mut csv = CsvTable::new(&TWOSTATE_HEADER);
    let mut worst: Option<f64> = None;
    for t in linspace(0.0, t_max, p.samples) {
        let r = coherence_factor(&model, t)?;
        let avg = if t > 0.0 && model.rate_gap() != 0.0 { coherence_factor_average(&model, t)?.norm() } else { 1.0 };
        let g = noncommutative_growth(&model, t)?;
        if t > 0.0 && t <= valid * (1.0 + 1e-12) {
            let rel = g.difference.norm() / g.estimate.norm();
            worst = Some(worst.map_or(rel, |w: f64| w.max(rel)));
        }
        csv.row(&[t, r.re, r.im, avg, weight * avg, g.exact.im, g.estimate.im]);
    }
    let (peak, estimate) = noncommutative_diagnostic(&model, p.diagnostic_samples)?;
    let summary = NoncommutativeSummary {
        delta_eps: eu - ed,
        delta_v: vp - vm,
        first_order_window: valid,
        t_max,
        max_relative_difference: worst,
        diagnostic_time: 2.0 * cfg.hbar / (eu - ed).abs(),
        diagnostic_peak: peak,
        diagnostic_estimate: estimate,
    };
    Ok(vec![csv.into_artifact("noncommutative.csv"), Artifact::json("summary.json", &summary)])
}

#[derive(Serialize)]
struct LocalizeSummary {
    effective_potential: Vec<f64>,
    pointer_positions: Vec<usize>,
    t_dec_matrix: Vec<Vec<Option<f64>>>,
    t_dec: Option<f64>,
    t_coh: f64,
    branch_resolution: Resolution,
    window: f64,
    coherence_length_initial: f64,
    coherence_length_final: f64,
    offdiag_l1_initial: f64,
    offdiag_l1_final: f64,
    pointer_weights_initial: Vec<f64>,
    pointer_weights_final: Vec<f64>,
}

/// Lattice model and initial position state described by `p`.
pub fn localize_setup(cfg: &ScenarioConfig, p: &LocalizeParams) -> Result<(LatticeModel, decohere_core::StateVector)> {
    let n = p.n_sites;
    let raw = match p.potential {
        PotentialShape::Cosine => potentials::cosine(n, p.amplitude),
        PotentialShape::Ramp => potentials::ramp(n, p.amplitude),
        PotentialShape::DoubleWell => potentials::double_well(n, p.amplitude),
        PotentialShape::Random => potentials::random(&mut rng(cfg, "the potential")?, n, p.amplitude),
        PotentialShape::Values => p.potential_values.clone().expect("resolved"),
    };
    let potential = if p.normalize_potential { potentials::unit_range(&raw) } else { raw };
    let monitors = (0..p.env_monitors).map(|_| Monitor { coupling: p.coupling, splitting: p.splitting, profile: None }).collect();
    let model = LatticeModel::new(n, p.hop.expect("resolved"), potential, monitors)?.with_hbar(cfg.hbar)?;
    let centers = p.centers.as_deref().expect("resolved");
    let psi = match p.initial {
        InitialState::Lumps => lumps(n, centers, p.sigma)?,
        InitialState::Gaussian => gaussian_packet(n, centers[0], p.sigma, p.momentum)?,
        InitialState::PlaneWave => plane_wave(n, p.mode)?,
        InitialState::Random => {
            // separate stream from the potential draw
            let mut r = ChaCha8Rng::seed_from_u64(cfg.require_seed("the initial state")?);
            r.set_stream(1);
            random_state(&mut r, &model.position_space())?
        }
    };
    Ok((model, psi))
}

fn localize(cfg: &ScenarioConfig, p: &LocalizeParams) -> Result<Vec<Artifact>> {
    let (model, psi_cm) = localize_setup(cfg, p)?;
    let psi0 = product_state(&model, &psi_cm)?;
    let times = linspace(0.0, p.t_max, p.samples);
    let traj = evolve_and_reduce(&model, &psi0, &times)?;
    let rhos: Vec<DensityMatrix> = traj.into_iter().map(|(_, r)| r).collect();
    let means = ehrenfest_track(&rhos);
    let vars = position_variance(&rhos);

    let mut csv = CsvTable::new(&LOCALIZE_HEADER);
    for (k, rho) in rhos.iter().enumerate() {
        csv.row(&[times[k], offdiag_norms(rho.entries()).0, coherence_length(rho), rho.purity(), means[k], vars[k]]);
    }
    let window = p.window.expect("resolved");
    let (first, last) = (&rhos[0], &rhos[rhos.len() - 1]);
    let report = localization_report(&model, last, window, p.separation_factor, p.probe_factor)?;
    let pointers = pointer_positions(&model)?;
    let weights = |rho: &DensityMatrix| pointers.iter().map(|&r| rho.entries()[(r, r)].re).collect::<Vec<f64>>();
    let summary = LocalizeSummary {
        effective_potential: model.effective_potential(),
        t_dec_matrix: t_dec_matrix(&model, &pointers)?,
        pointer_positions: report.pointer_positions,
        t_dec: report.t_dec,
        t_coh: report.t_coh,
        branch_resolution: report.branch_resolution,
        window,
        coherence_length_initial: coherence_length(first),
        coherence_length_final: report.coherence_length,
        offdiag_l1_initial: offdiag_norms(first.entries()).0,
        offdiag_l1_final: offdiag_norms(last.entries()).0,
        pointer_weights_initial: weights(first),
        pointer_weights_final: weights(last),
    };
    Ok(vec![csv.into_artifact("localize.csv"), Artifact::json("summary.json", &summary)])
}

#[derive(Serialize)]
struct SweepRun {
    index: usize,
    directory: String,
    value: toml::Value,
    outputs: Vec<String>,
}

pub fn run_directory(index: usize) -> String {
    format!("run-{index:03}")
}

/// Independent runs on a small worker pool; results keep the order of
/// `plan.values` regardless of completion order.
fn sweep(plan: &SweepPlan) -> Result<Vec<Artifact>> {
    let workers = match plan.threads {
        0 => thread::available_parallelism().map(|n| n.get()).unwrap_or(1),
        n => n,
    }
    .min(plan.runs.len())
    .max(1);
    let next = AtomicUsize::new(0);
    let results: Mutex<Vec<Option<Result<Vec<Artifact>>>>> = Mutex::new((0..plan.runs.len()).map(|_| None).collect());
    thread::scope(|s| {
        for _ in 0..workers {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= plan.runs.len() {
                    break;
                }
                let out = run(&plan.runs[i]);
                results.lock().expect("worker panicked")[i] = Some(out);
            });
        }
    });

    let mut artifacts = Vec::new();
    let mut index = Vec::with_capacity(plan.runs.len());
    for (i, res) in results.into_inner().expect("worker panicked").into_iter().enumerate() {
        let dir = run_directory(i);
        let run = res.expect("every run visited").map_err(|e| annotate(e, i, &plan.parameter, &plan.values[i]))?;
        index.push(SweepRun {
            index: i,
            directory: dir.clone(),
            value: plan.values[i].clone(),
            outputs: run.iter().map(|a| a.path.clone()).collect(),
        });
        artifacts.extend(run.into_iter().map(|a| a.nested(&dir)));
    }
    artifacts.push(Artifact::json("sweep.json", &index));
    Ok(artifacts)
}

fn annotate(e: CliError, i: usize, parameter: &str, value: &toml::Value) -> CliError {
    let ctx = |m: String| format!("sweep run {i} ({parameter} = {value}): {m}");
    match e {
        CliError::Config(m) => CliError::Config(ctx(m)),
        CliError::Regime(m) => CliError::Regime(ctx(m)),
        CliError::Io(m) => CliError::Io(ctx(m)),
    }
}
