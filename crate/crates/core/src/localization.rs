//! Particle on a ring lattice whose position is monitored by two-level
//! environment probes.
//!
//! Each monitor `e` couples as `g_e f_e(R̂) ⊗ σz^(e)` and starts in
//! `(|0⟩ + |1⟩)/√2`, so every monitor configuration `s ∈ {±1}^E` is a branch
//! that evolves under `ĥ_R + Σ_e s_e g_e f_e(R̂)` and accumulates its own
//! position-dependent phase.

use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::averaging::DensityMatrix;
use crate::dynamics::{ActionAccumulator, ExactEngine, HamiltonianSplit, Propagator};
use crate::error::{Error, Result};
use crate::hilbert::{
    hermitian_eigen, partial_trace, tensor_product, CMatrix, CVector, CompositeSpace, OperatorMatrix,
    StateVector, MAX_TOTAL_DIM,
};
use crate::quadrature::linspace;

pub const DEFAULT_SEPARATION_FACTOR: f64 = 10.0;
pub const DEFAULT_PROBE_FACTOR: f64 = 10.0;

const PLATEAU_TOL: f64 = 1e-12;
const PROBE_SAMPLES: usize = 4000;

/// One environment probe.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Monitor {
    pub coupling: f64,
    /// Splitting `ω` in `(ω/2) σz`; zero for a static probe.
    pub splitting: f64,
    /// Site profile `f_e(R)`; `None` uses the lattice potential.
    pub profile: Option<Vec<f64>>,
}

impl Monitor {
    pub fn new(coupling: f64) -> Self {
        Monitor { coupling, splitting: 0.0, profile: None }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LatticeModel {
    pub n_sites: usize,
    pub hop: f64,
    pub potential: Vec<f64>,
    pub monitors: Vec<Monitor>,
    pub hbar: f64,
    pub t0: f64,
}

impl LatticeModel {
    pub fn new(n_sites: usize, hop: f64, potential: Vec<f64>, monitors: Vec<Monitor>) -> Result<Self> {
        let m = LatticeModel { n_sites, hop, potential, monitors, hbar: 1.0, t0: 0.0 };
        m.validate()?;
        Ok(m)
    }

    /// `hop = ħ² / (2 m)` on a unit-spacing lattice.
    pub fn from_mass(n_sites: usize, mass_proxy: f64, potential: Vec<f64>, monitors: Vec<Monitor>) -> Result<Self> {
        if !(mass_proxy > 0.0) {
            return Err(Error::domain("mass_proxy must be positive"));
        }
        Self::new(n_sites, 1.0 / (2.0 * mass_proxy), potential, monitors)
    }

    /// `n` identical monitors with coupling `g` following the potential.
    pub fn with_uniform_monitors(n_sites: usize, hop: f64, potential: Vec<f64>, monitors: usize, g: f64) -> Result<Self> {
        Self::new(n_sites, hop, potential, vec![Monitor::new(g); monitors])
    }

    pub fn with_hbar(mut self, hbar: f64) -> Result<Self> {
        if !(hbar > 0.0 && hbar.is_finite()) {
            return Err(Error::domain(format!("hbar must be positive, got {hbar}")));
        }
        self.hbar = hbar;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_sites < 4 {
            return Err(Error::domain(format!("need at least 4 sites, got {}", self.n_sites)));
        }
        if !(self.hop > 0.0 && self.hop.is_finite()) {
            return Err(Error::domain(format!("hop must be positive, got {}", self.hop)));
        }
        if self.potential.len() != self.n_sites {
            return Err(Error::DimensionMismatch { expected: self.n_sites, found: self.potential.len() });
        }
        if self.potential.iter().any(|v| !v.is_finite()) {
            return Err(Error::domain("potential must be finite at every site"));
        }
        for (e, m) in self.monitors.iter().enumerate() {
            if let Some(p) = &m.profile {
                if p.len() != self.n_sites || p.iter().any(|v| !v.is_finite()) {
                    return Err(Error::domain(format!("monitor {e} profile must have {} finite entries", self.n_sites)));
                }
            }
            if !m.coupling.is_finite() || !m.splitting.is_finite() {
                return Err(Error::domain(format!("monitor {e} parameters must be finite")));
            }
        }
        let total = (self.n_sites as u128) << self.monitors.len().min(100);
        if total > MAX_TOTAL_DIM as u128 {
            return Err(Error::DimensionCap { total: total.min(usize::MAX as u128) as usize, cap: MAX_TOTAL_DIM });
        }
        Ok(())
    }

    pub fn mass_proxy(&self) -> f64 {
        self.hbar * self.hbar / (2.0 * self.hop)
    }

    pub fn position_space(&self) -> CompositeSpace {
        CompositeSpace::single(self.n_sites).expect("validated size")
    }

    pub fn composite_space(&self) -> Result<CompositeSpace> {
        let mut dims = vec![self.n_sites];
        dims.extend(std::iter::repeat_n(2, self.monitors.len()));
        CompositeSpace::new(dims)
    }

    pub fn profile(&self, e: usize) -> &[f64] {
        self.monitors[e].profile.as_deref().unwrap_or(&self.potential)
    }

    /// `Σ_e g_e f_e(R)`.
    pub fn effective_potential(&self) -> Vec<f64> {
        (0..self.n_sites)
            .map(|r| (0..self.monitors.len()).map(|e| self.monitors[e].coupling * self.profile(e)[r]).sum())
            .collect()
    }

    /// `ĥ_R = hop · (2 − shift − shift†)` on the ring.
    pub fn kinetic(&self) -> OperatorMatrix {
        let n = self.n_sites;
        let mut m = CMatrix::zeros(n, n);
        for r in 0..n {
            m[(r, r)] = C64::new(2.0 * self.hop, 0.0);
            m[(r, (r + 1) % n)] = C64::new(-self.hop, 0.0);
            m[((r + 1) % n, r)] = C64::new(-self.hop, 0.0);
        }
        OperatorMatrix::hermitian(self.position_space(), m).expect("symmetric by construction")
    }

    /// Position Hamiltonian seen by the branch with monitor signs `signs`.
    pub fn branch_hamiltonian(&self, signs: &[i8]) -> Result<OperatorMatrix> {
        if signs.len() != self.monitors.len() {
            return Err(Error::DimensionMismatch { expected: self.monitors.len(), found: signs.len() });
        }
        let diag: Vec<f64> = (0..self.n_sites)
            .map(|r| {
                signs
                    .iter()
                    .enumerate()
                    .map(|(e, &s)| f64::from(s) * self.monitors[e].coupling * self.profile(e)[r])
                    .sum()
            })
            .collect();
        self.kinetic().add(&OperatorMatrix::diagonal(self.position_space(), &diag)?)
    }
}

/// `h_sys` = ring hopping, `h_env` = monitor splittings,
/// `h_int = Σ_e g_e f_e(R̂) ⊗ σz^(e)`.
pub fn build_composite(model: &LatticeModel) -> Result<HamiltonianSplit> {
    model.validate()?;
    let space = model.composite_space()?;
    let pos = model.position_space();
    let n_mon = model.monitors.len();
    let kinetic = model.kinetic();
    let h_sys = kinetic.embed(&space, 0)?;
    let mut h_env = OperatorMatrix::zeros(space.clone());
    let mut h_int = OperatorMatrix::zeros(space.clone());
    for (e, mon) in model.monitors.iter().enumerate() {
        let z_full = OperatorMatrix::pauli_z().embed(&space, 1 + e)?;
        if mon.splitting != 0.0 {
            h_env = h_env.add(&z_full.scale(0.5 * mon.splitting))?;
        }
        let f = OperatorMatrix::diagonal(pos.clone(), model.profile(e))?.scale(mon.coupling);
        let mut term = f;
        for k in 0..n_mon {
            let factor = if k == e { OperatorMatrix::pauli_z() } else { OperatorMatrix::identity(CompositeSpace::single(2)?) };
            term = tensor_product(&term, &factor)?;
        }
        h_int = h_int.add(&term)?;
    }
    HamiltonianSplit::new(h_sys, h_env, h_int, 1)?.with_hbar(model.hbar)
}

/// Sites where the potential has a discrete local extremum on the ring.
///
/// Runs of equal values are treated as one plateau; a plateau whose two
/// outside neighbors lie on the same side of it is an extremum and all of its
/// sites are returned.
pub fn local_extrema(v: &[f64]) -> Result<Vec<usize>> {
    let n = v.len();
    let scale = v.iter().fold(0.0f64, |m, x| m.max(x.abs())).max(1.0);
    let eq = |a: f64, b: f64| (a - b).abs() <= PLATEAU_TOL * scale;
    if n == 0 || v.iter().all(|&x| eq(x, v[0])) {
        return Err(Error::ConstantPotential);
    }
    // Start scanning right after a value change so no plateau straddles the start.
    let start = (0..n).find(|&i| !eq(v[i], v[(i + n - 1) % n])).expect("non-constant");
    let mut out = Vec::new();
    let mut i = 0;
    while i < n {
        let first = (start + i) % n;
        let mut len = 1;
        while len < n && eq(v[(first + len) % n], v[first]) {
            len += 1;
        }
        let before = v[(first + n - 1) % n];
        let after = v[(first + len) % n];
        let here = v[first];
        if (before < here && after < here) || (before > here && after > here) {
            out.extend((0..len).map(|k| (first + k) % n));
        }
        i += len;
    }
    out.sort_unstable();
    Ok(out)
}

/// Extrema of the monitored potential (the lattice potential when no
/// monitors are attached).
pub fn pointer_positions(model: &LatticeModel) -> Result<Vec<usize>> {
    if model.monitors.is_empty() {
        local_extrema(&model.potential)
    } else {
        local_extrema(&model.effective_potential())
    }
}

fn gaussian_weight(n: usize, r: usize, center: f64, sigma: f64) -> f64 {
    let d = (r as f64 - center).rem_euclid(n as f64);
    let d = d.min(n as f64 - d);
    (-d * d / (4.0 * sigma * sigma)).exp()
}

/// Gaussian packet `∝ e^{-(R−R0)²/4σ²} e^{ikR}` using ring distance.
pub fn gaussian_packet(n: usize, center: f64, sigma: f64, k: f64) -> Result<StateVector> {
    if !(sigma > 0.0) {
        return Err(Error::domain("packet width must be positive"));
    }
    let amps = CVector::from_iterator(
        n,
        (0..n).map(|r| C64::from_polar(gaussian_weight(n, r, center, sigma), k * r as f64)),
    );
    StateVector::normalized(CompositeSpace::single(n)?, amps, 0.0)
}

/// Equal-weight sum of real Gaussian lumps at `centers`.
pub fn lumps(n: usize, centers: &[f64], sigma: f64) -> Result<StateVector> {
    if !(sigma > 0.0) || centers.is_empty() {
        return Err(Error::domain("need at least one lump of positive width"));
    }
    let amps = CVector::from_iterator(
        n,
        (0..n).map(|r| C64::new(centers.iter().map(|&c| gaussian_weight(n, r, c, sigma)).sum(), 0.0)),
    );
    StateVector::normalized(CompositeSpace::single(n)?, amps, 0.0)
}

/// `e^{2πi m R / n} / √n`.
pub fn plane_wave(n: usize, m: i64) -> Result<StateVector> {
    let k = std::f64::consts::TAU * m as f64 / n as f64;
    let amps = CVector::from_iterator(n, (0..n).map(|r| C64::from_polar(1.0 / (n as f64).sqrt(), k * r as f64)));
    StateVector::new(CompositeSpace::single(n)?, amps, 0.0)
}

/// `|ψ_cm⟩ ⊗ |+⟩^{⊗E}`.
pub fn product_state(model: &LatticeModel, psi_cm: &StateVector) -> Result<StateVector> {
    if psi_cm.space() != &model.position_space() {
        return Err(Error::DimensionMismatch { expected: model.n_sites, found: psi_cm.space().total_dim() });
    }
    let plus = StateVector::from_real(CompositeSpace::single(2)?, &[1.0, 1.0])?;
    let mut psi = psi_cm.clone();
    for _ in &model.monitors {
        psi = psi.tensor(&plus)?;
    }
    Ok(psi)
}

/// Exact evolution of the composite followed by a trace over the monitors.
pub fn evolve_and_reduce(model: &LatticeModel, psi0: &StateVector, times: &[f64]) -> Result<Vec<(f64, DensityMatrix)>> {
    let h = build_composite(model)?;
    if psi0.space() != h.space() {
        return Err(Error::DimensionMismatch { expected: h.space().total_dim(), found: psi0.space().total_dim() });
    }
    if times.windows(2).any(|w| !(w[1] >= w[0])) {
        return Err(Error::domain("sample times must be ascending"));
    }
    let engine = ExactEngine::new(&h)?;
    times
        .iter()
        .map(|&t| {
            let psi = engine.state_at(psi0, t)?;
            let rho = DensityMatrix::from_pure(&psi, "position");
            Ok((t, partial_trace(&rho, &[0])?))
        })
        .collect()
}

/// Every monitor sign pattern with its probability `2^{-E}`.
pub fn monitor_branches(model: &LatticeModel) -> Vec<(Vec<i8>, f64)> {
    let e = model.monitors.len();
    let w = 0.5f64.powi(e as i32);
    (0..1usize << e)
        .map(|bits| ((0..e).map(|k| if bits >> (e - 1 - k) & 1 == 0 { 1 } else { -1 }).collect(), w))
        .collect()
}

/// Normalized ring coherence `y(d) = Σ_R |ρ(R,R+d)| / Σ_R √(ρ_RR ρ_{R+d,R+d})`.
pub fn normalized_coherence(rho: &DensityMatrix, d: usize) -> f64 {
    let m = rho.entries();
    let n = m.nrows();
    let (mut num, mut den) = (0.0, 0.0);
    for r in 0..n {
        let s = (r + d) % n;
        num += m[(r, s)].norm();
        den += (m[(r, r)].re.max(0.0) * m[(s, s)].re.max(0.0)).sqrt();
    }
    if den < 1e-300 {
        1.0
    } else {
        num / den
    }
}

/// Decay length `ℓ` of `y(d) ≈ e^{-d/ℓ}` over `d = 1..=n/4`, fitted through
/// the origin in log space. Capped at `n`; no decay reports `n`.
pub fn coherence_length(rho: &DensityMatrix) -> f64 {
    let n = rho.dim();
    let d_max = (n / 4).max(1);
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for d in 1..=d_max {
        let y = normalized_coherence(rho, d).max(1e-300);
        sxy += d as f64 * y.ln();
        sxx += (d * d) as f64;
    }
    let slope = sxy / sxx;
    if slope >= 0.0 {
        n as f64
    } else {
        (-1.0 / slope).min(n as f64)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Timescales {
    /// `None` when the two sites see the same monitored potential.
    pub t_dec: Option<f64>,
    pub t_coh: f64,
}

fn ring_distance(n: usize, a: usize, b: usize) -> usize {
    let d = a.abs_diff(b);
    d.min(n - d)
}

/// `ħ/|V_eff(r1) − V_eff(r2)|`, `None` for equal values.
pub fn decoherence_time(model: &LatticeModel, r1: usize, r2: usize) -> Result<Option<f64>> {
    let v = model.effective_potential();
    check_sites(model, r1, r2)?;
    let dv = (v[r1] - v[r2]).abs();
    Ok(if dv <= contrast_floor(&v) { None } else { Some(model.hbar / dv) })
}

fn contrast_floor(v: &[f64]) -> f64 {
    PLATEAU_TOL * v.iter().fold(0.0f64, |m, x| m.max(x.abs())).max(1.0)
}

fn check_sites(model: &LatticeModel, r1: usize, r2: usize) -> Result<()> {
    if r1 >= model.n_sites || r2 >= model.n_sites {
        return Err(Error::domain(format!("site index out of range 0..{}", model.n_sites)));
    }
    if r1 == r2 {
        return Err(Error::domain("timescales need two distinct sites"));
    }
    Ok(())
}

/// Effective hopping element between two sites: `|hop|` for neighbors,
/// otherwise `max_{t ∈ (0, t_probe]} ħ |⟨r1|e^{-iĥ_R t/ħ}|r2⟩| / t` with
/// `t_probe = probe_factor · ħ / hop`.
pub fn effective_hopping(model: &LatticeModel, r1: usize, r2: usize, probe_factor: f64) -> Result<f64> {
    check_sites(model, r1, r2)?;
    if ring_distance(model.n_sites, r1, r2) == 1 {
        return Ok(model.hop.abs());
    }
    let t_probe = probe_factor * model.hbar / model.hop;
    let eig = hermitian_eigen(model.kinetic().entries());
    let u = eig.eigenvectors();
    let best = linspace(0.0, t_probe, PROBE_SAMPLES + 1)
        .into_iter()
        .skip(1)
        .map(|t| {
            let amp: C64 = (0..model.n_sites)
                .map(|k| u[(r1, k)] * u[(r2, k)].conj() * C64::from_polar(1.0, -eig.eigenvalues()[k] * t / model.hbar))
                .sum();
            model.hbar * amp.norm() / t
        })
        .fold(0.0, f64::max);
    Ok(best)
}

pub fn timescales(model: &LatticeModel, r1: usize, r2: usize, probe_factor: f64) -> Result<Timescales> {
    let t_dec = decoherence_time(model, r1, r2)?;
    let h = effective_hopping(model, r1, r2, probe_factor)?;
    Ok(Timescales { t_dec, t_coh: if h > 0.0 { model.hbar / h } else { f64::INFINITY } })
}

/// Pairwise `t_dec` between the listed sites; diagonal entries are `None`.
pub fn t_dec_matrix(model: &LatticeModel, sites: &[usize]) -> Result<Vec<Vec<Option<f64>>>> {
    sites
        .iter()
        .map(|&a| sites.iter().map(|&b| if a == b { Ok(None) } else { decoherence_time(model, a, b) }).collect())
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Resolution {
    Resolved(usize),
    Unresolved,
}

/// Smallest ring separation `d` such that every pair `(R, R+d)` decoheres
/// within `T / separation_factor`.
pub fn branch_resolution(model: &LatticeModel, window: f64, separation_factor: f64) -> Result<Resolution> {
    if !(window > 0.0) || !(separation_factor > 0.0) {
        return Err(Error::domain("window and separation factor must be positive"));
    }
    let v = model.effective_potential();
    let n = model.n_sites;
    let bound = window / separation_factor;
    let floor = contrast_floor(&v);
    for d in 1..=n / 2 {
        let worst = (0..n).map(|r| (v[r] - v[(r + d) % n]).abs()).fold(f64::INFINITY, f64::min);
        if worst > floor && model.hbar / worst <= bound {
            return Ok(Resolution::Resolved(d));
        }
    }
    Ok(Resolution::Unresolved)
}

/// `⟨R⟩` per sample, with sites labelled `0..n`.
pub fn ehrenfest_track(rhos: &[DensityMatrix]) -> Vec<f64> {
    rhos.iter()
        .map(|rho| (0..rho.dim()).map(|r| r as f64 * rho.entries()[(r, r)].re).sum())
        .collect()
}

/// `⟨R²⟩ − ⟨R⟩²` per sample.
pub fn position_variance(rhos: &[DensityMatrix]) -> Vec<f64> {
    rhos.iter()
        .map(|rho| {
            let p = |r: usize| rho.entries()[(r, r)].re;
            let mean: f64 = (0..rho.dim()).map(|r| r as f64 * p(r)).sum();
            (0..rho.dim()).map(|r| (r as f64 - mean).powi(2) * p(r)).sum()
        })
        .collect()
}

/// Position-space density matrices of one monitor branch evolved on its own.
pub fn branch_trajectory(model: &LatticeModel, signs: &[i8], psi0: &StateVector, times: &[f64]) -> Result<Vec<DensityMatrix>> {
    let prop = Propagator::new(&model.branch_hamiltonian(signs)?, model.hbar)?;
    times
        .iter()
        .map(|&t| Ok(DensityMatrix::from_pure(&prop.evolve(psi0, t - psi0.time())?, "position")))
        .collect()
}

/// Result of constrained stationarity of `Λ[a] = Σ_R |a_R|² V_eff(R)`.
#[derive(Clone, Debug)]
pub struct StationaryState {
    pub state: StateVector,
    pub site: usize,
    pub action_rate: f64,
    pub residual: f64,
    pub iterations: usize,
}

impl StationaryState {
    /// Plane-wave coefficients `a_k = ⟨k|a⟩` for `k = 2πm/n`, `m = 0..n`.
    pub fn plane_wave_coefficients(&self) -> Vec<C64> {
        let n = self.state.space().total_dim();
        let a = self.state.amplitudes();
        (0..n)
            .map(|m| {
                let k = std::f64::consts::TAU * m as f64 / n as f64;
                (0..n).map(|r| C64::from_polar(1.0 / (n as f64).sqrt(), -k * r as f64) * a[r]).sum()
            })
            .collect()
    }
}

/// Projected gradient flow of `Λ` on the unit sphere: `a ← a ± η(V a − Λ a)`
/// followed by renormalization, which enforces the norm constraint in place
/// of a Lagrange multiplier. Stops when `‖V a − Λ a‖ < tol`.
pub fn stationary_action_state(
    model: &LatticeModel,
    init: &StateVector,
    ascend: bool,
    tol: f64,
    max_iter: usize,
) -> Result<StationaryState> {
    let v = if model.monitors.is_empty() { model.potential.clone() } else { model.effective_potential() };
    let spread = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - v.iter().cloned().fold(f64::INFINITY, f64::min);
    if spread == 0.0 {
        return Err(Error::ConstantPotential);
    }
    if init.space() != &model.position_space() {
        return Err(Error::DimensionMismatch { expected: model.n_sites, found: init.space().total_dim() });
    }
    let eta = if ascend { 0.5 / spread } else { -0.5 / spread };
    let mut a = init.amplitudes().clone();
    let mut residual = f64::INFINITY;
    let mut lambda = 0.0;
    let mut iterations = 0;
    while iterations < max_iter {
        lambda = (0..a.len()).map(|r| a[r].norm_sqr() * v[r]).sum();
        let grad = CVector::from_iterator(a.len(), (0..a.len()).map(|r| a[r] * (v[r] - lambda)));
        residual = grad.norm();
        if residual < tol {
            break;
        }
        a += grad * C64::new(eta, 0.0);
        let norm = a.norm();
        a /= C64::new(norm, 0.0);
        iterations += 1;
    }
    let site = (0..a.len()).max_by(|&i, &j| a[i].norm_sqr().total_cmp(&a[j].norm_sqr())).unwrap_or(0);
    Ok(StationaryState {
        state: StateVector::normalized(init.space().clone(), a, init.time())?,
        site,
        action_rate: lambda,
        residual,
        iterations,
    })
}

/// `(numeric, static)` action of a position packet over `[t0, t]`. The
/// numeric value integrates `⟨ψ(s)|V_eff|ψ(s)⟩` along free hopping evolution;
/// the static value is `⟨ψ0|V_eff|ψ0⟩ (t − t0)`.
pub fn pointer_action(model: &LatticeModel, psi0: &StateVector, t: f64, dt: f64) -> Result<(f64, f64)> {
    if !(dt > 0.0) || !(t >= model.t0) {
        return Err(Error::domain("need a positive step and t ≥ t0"));
    }
    let v = model.effective_potential();
    let energy = |psi: &StateVector| -> f64 { psi.amplitudes().iter().zip(&v).map(|(a, v)| a.norm_sqr() * v).sum() };
    let prop = Propagator::new(&model.kinetic(), model.hbar)?;
    let span = t - model.t0;
    let steps = (span / dt).ceil().max(1.0) as usize;
    let mut acc = ActionAccumulator::new();
    acc.push(model.t0, energy(psi0))?;
    if span > 0.0 {
        for k in 1..=steps {
            let s = span * k as f64 / steps as f64;
            acc.push(model.t0 + s, energy(&prop.evolve(psi0, s)?))?;
        }
    }
    Ok((acc.value(), energy(psi0) * span))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LocalizationReport {
    pub coherence_length: f64,
    pub pointer_positions: Vec<usize>,
    pub t_dec: Option<f64>,
    pub t_coh: f64,
    pub branch_resolution: Resolution,
}

/// Summary for a reduced position matrix. Timescales refer to the first two
/// pointer positions.
pub fn localization_report(
    model: &LatticeModel,
    rho: &DensityMatrix,
    window: f64,
    separation_factor: f64,
    probe_factor: f64,
) -> Result<LocalizationReport> {
    let pointers = pointer_positions(model)?;
    let (t_dec, t_coh) = match pointers.as_slice() {
        [a, b, ..] => {
            let ts = timescales(model, *a, *b, probe_factor)?;
            (ts.t_dec, ts.t_coh)
        }
        _ => (None, f64::INFINITY),
    };
    Ok(LocalizationReport {
        coherence_length: coherence_length(rho),
        pointer_positions: pointers,
        t_dec,
        t_coh,
        branch_resolution: branch_resolution(model, window, separation_factor)?,
    })
}

/// Potential profiles.
pub mod potentials {
    use rand::Rng;

    /// `amp · cos(2πR/n)`.
    pub fn cosine(n: usize, amp: f64) -> Vec<f64> {
        (0..n).map(|r| amp * (std::f64::consts::TAU * r as f64 / n as f64).cos()).collect()
    }

    /// `slope · R`.
    pub fn ramp(n: usize, slope: f64) -> Vec<f64> {
        (0..n).map(|r| slope * r as f64).collect()
    }

    /// `depth · (x² − 1)²` with `x` running over `[-1.5, 1.5)` around the ring.
    pub fn double_well(n: usize, depth: f64) -> Vec<f64> {
        (0..n)
            .map(|r| {
                let x = -1.5 + 3.0 * r as f64 / n as f64;
                depth * (x * x - 1.0).powi(2)
            })
            .collect()
    }

    /// Independent uniform values in `[-amp, amp]`.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, n: usize, amp: f64) -> Vec<f64> {
        (0..n).map(|_| rng.random_range(-amp..=amp)).collect()
    }

    /// Shifts and scales `v` onto `[0, 1]`; constant input maps to zeros.
    pub fn unit_range(v: &[f64]) -> Vec<f64> {
        let lo = v.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let span = hi - lo;
        v.iter().map(|x| if span > 0.0 { (x - lo) / span } else { 0.0 }).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn ring(n: usize, monitors: usize) -> LatticeModel {
        LatticeModel::with_uniform_monitors(n, 0.1, potentials::cosine(n, 0.5), monitors, 1.0).unwrap()
    }

    #[test]
    fn validation() {
        assert!(LatticeModel::new(3, 0.1, vec![0.0; 3], vec![]).is_err());
        assert!(LatticeModel::new(8, 0.0, vec![0.0; 8], vec![]).is_err());
        assert!(LatticeModel::new(8, 0.1, vec![f64::NAN; 8], vec![]).is_err());
        let err = LatticeModel::with_uniform_monitors(16, 0.1, vec![0.0; 16], 9, 1.0).unwrap_err();
        assert!(matches!(err, Error::DimensionCap { .. }));
        assert_abs_diff_eq!(LatticeModel::from_mass(8, 5.0, vec![0.0; 8], vec![]).unwrap().hop, 0.1);
    }

    #[test]
    fn cosine_extrema() {
        assert_eq!(local_extrema(&potentials::cosine(16, 1.0)).unwrap(), vec![0, 8]);
        assert_eq!(local_extrema(&[1.0; 6]), Err(Error::ConstantPotential));
    }

    #[test]
    fn plateau_sites_all_returned() {
        let v = [0.0, 1.0, 1.0, 1.0, 0.0, -1.0, -1.0, 0.0];
        assert_eq!(local_extrema(&v).unwrap(), vec![1, 2, 3, 5, 6]);
    }

    #[test]
    fn ramp_extrema_at_wrap() {
        assert_eq!(local_extrema(&potentials::ramp(10, 0.3)).unwrap(), vec![0, 9]);
    }

    #[test]
    fn no_monitor_composite_is_free() {
        let h = build_composite(&ring(8, 0)).unwrap();
        assert_eq!(h.h_int().max_abs(), 0.0);
        assert_eq!(h.space().dims(), &[8]);
    }

    #[test]
    fn timescale_examples() {
        let m = LatticeModel::with_uniform_monitors(8, 0.1, vec![0.0, 0.5, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0], 1, 1.0).unwrap();
        let ts = timescales(&m, 0, 1, DEFAULT_PROBE_FACTOR).unwrap();
        assert_abs_diff_eq!(ts.t_dec.unwrap(), 2.0);
        assert_abs_diff_eq!(ts.t_coh, 10.0);
        assert_eq!(timescales(&m, 2, 3, DEFAULT_PROBE_FACTOR).unwrap().t_dec, None);
        assert!(timescales(&m, 2, 2, DEFAULT_PROBE_FACTOR).is_err());
    }

    #[test]
    fn monitor_branch_enumeration() {
        let b = monitor_branches(&ring(8, 2));
        assert_eq!(b.len(), 4);
        assert_eq!(b[0].0, vec![1, 1]);
        assert_eq!(b[3].0, vec![-1, -1]);
        assert_abs_diff_eq!(b.iter().map(|x| x.1).sum::<f64>(), 1.0);
    }

    #[test]
    fn branch_resolution_limits() {
        let flat = LatticeModel::with_uniform_monitors(8, 0.1, vec![0.3; 8], 1, 1.0).unwrap();
        assert_eq!(branch_resolution(&flat, 100.0, 10.0).unwrap(), Resolution::Unresolved);
        let m = ring(16, 1);
        assert_eq!(branch_resolution(&m, 1e9, 10.0).unwrap(), Resolution::Resolved(1));
    }
}
