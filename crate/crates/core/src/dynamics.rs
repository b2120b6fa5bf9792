//! Evolution engines.
//!
//! * exact unitary propagation under `h_sys + h_env + h_int`,
//! * the interaction-picture coefficient equation
//!   `iħ ∂t C_n = Σ C_n' ⟨Φ0n(t)| h_int |Φ0n'(t)⟩`,
//! * the diagonal-phase approximation, where each branch keeps its
//!   unperturbed vector and only picks up `e^{-iΛ_n(t)/ħ}`,
//! * mean-field evolution of a single state with its own accumulated action.
//!
//! Branches never split here; callers prepare one [`BranchState`] per
//! distinct action history.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::hilbert::{
    expectation, hermitian_eigen, partial_trace_matrix, tensor_product, CMatrix, CVector,
    CompositeSpace, OperatorMatrix, SpectralDecomposition, StateVector,
};

/// Largest total dimension propagated through the full eigen-decomposition;
/// anything bigger uses fixed-step RK4.
pub const SPECTRAL_DIM_LIMIT: usize = 512;

/// `‖H‖·dt` bound used to pick the engine step.
pub const STEP_NORM_BOUND: f64 = 0.05;

const STRUCTURE_TOL: f64 = 1e-12;
const ORTHONORMAL_TOL: f64 = 1e-8;

/// The three Hamiltonian parts `h_sys`, `h_env`, `h_int` on one composite space.
///
/// The first `system_subsystems` factors of the space belong to the system,
/// the rest to the environment.
#[derive(Clone, Debug)]
pub struct HamiltonianSplit {
    h_sys: OperatorMatrix,
    h_env: OperatorMatrix,
    h_int: OperatorMatrix,
    system_subsystems: usize,
    hbar: f64,
}

impl HamiltonianSplit {
    pub fn new(
        h_sys: OperatorMatrix,
        h_env: OperatorMatrix,
        h_int: OperatorMatrix,
        system_subsystems: usize,
    ) -> Result<Self> {
        let space = h_sys.space().clone();
        if h_env.space() != &space || h_int.space() != &space {
            return Err(Error::domain("Hamiltonian parts act on different spaces"));
        }
        for (name, op) in [("h_sys", &h_sys), ("h_env", &h_env), ("h_int", &h_int)] {
            if !op.is_hermitian() {
                return Err(Error::domain(format!("{name} is not Hermitian")));
            }
        }
        let n = space.n_subsystems();
        if system_subsystems > n {
            return Err(Error::domain("system subsystem count exceeds space"));
        }
        check_local(&h_sys, 0..system_subsystems, "h_sys")?;
        check_local(&h_env, system_subsystems..n, "h_env")?;
        Ok(HamiltonianSplit { h_sys, h_env, h_int, system_subsystems, hbar: 1.0 })
    }

    /// Builds the split from operators that live on the system and
    /// environment factors alone.
    pub fn from_factors(
        sys: &OperatorMatrix,
        env: &OperatorMatrix,
        h_int: OperatorMatrix,
    ) -> Result<Self> {
        let id_sys = OperatorMatrix::identity(sys.space().clone());
        let id_env = OperatorMatrix::identity(env.space().clone());
        let h_sys = tensor_product(sys, &id_env)?;
        let h_env = tensor_product(&id_sys, env)?;
        Self::new(h_sys, h_env, h_int, sys.space().n_subsystems())
    }

    pub fn with_hbar(mut self, hbar: f64) -> Result<Self> {
        if !(hbar > 0.0 && hbar.is_finite()) {
            return Err(Error::domain(format!("hbar must be positive, got {hbar}")));
        }
        self.hbar = hbar;
        Ok(self)
    }

    pub fn space(&self) -> &CompositeSpace {
        self.h_sys.space()
    }

    pub fn h_sys(&self) -> &OperatorMatrix {
        &self.h_sys
    }

    pub fn h_env(&self) -> &OperatorMatrix {
        &self.h_env
    }

    pub fn h_int(&self) -> &OperatorMatrix {
        &self.h_int
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn system_subsystems(&self) -> usize {
        self.system_subsystems
    }

    /// `h_sys + h_env`.
    pub fn free(&self) -> OperatorMatrix {
        self.h_sys.add(&self.h_env).expect("parts share a space")
    }

    /// `h_sys + h_env + h_int`.
    pub fn total(&self) -> OperatorMatrix {
        self.free().add(&self.h_int).expect("parts share a space")
    }

    /// Engine step for action quadrature: `‖H‖∞ · dt ≤ 0.05 ħ`.
    pub fn engine_step(&self) -> f64 {
        step_for(&self.total(), self.hbar)
    }
}

// h must equal (Tr_rest h / d_rest) ⊗ 1_rest on the factors outside `own`.
fn check_local(h: &OperatorMatrix, own: std::ops::Range<usize>, name: &str) -> Result<()> {
    let space = h.space();
    let keep: Vec<usize> = own.clone().collect();
    let (_, reduced) = partial_trace_matrix(space, h.entries(), &keep)?;
    let d_rest = (space.total_dim() / space.dim_of(own.clone())) as f64;
    let local = reduced / C64::new(d_rest, 0.0);
    let left = space.dim_of(0..own.start);
    let right = space.dim_of(own.end..space.n_subsystems());
    let rebuilt = CMatrix::identity(left, left)
        .kronecker(&local)
        .kronecker(&CMatrix::identity(right, right));
    let dev = (h.entries() - rebuilt).iter().fold(0.0f64, |m, z| m.max(z.norm()));
    if dev > STRUCTURE_TOL * h.max_abs().max(1.0) {
        return Err(Error::domain(format!(
            "{name} does not act as the identity outside its own factors (deviation {dev:.3e})"
        )));
    }
    Ok(())
}

fn step_for(h: &OperatorMatrix, hbar: f64) -> f64 {
    let norm = h.inf_norm();
    if norm == 0.0 {
        f64::INFINITY
    } else {
        STEP_NORM_BOUND * hbar / norm
    }
}

/// Time-independent propagator `e^{-iHt/ħ}`.
#[derive(Clone, Debug)]
pub enum Propagator {
    Spectral { decomposition: SpectralDecomposition, space: CompositeSpace, hbar: f64 },
    Rk4 { h: CMatrix, space: CompositeSpace, hbar: f64, max_step: f64 },
}

impl Propagator {
    /// Spectral route up to [`SPECTRAL_DIM_LIMIT`], RK4 above.
    pub fn new(h: &OperatorMatrix, hbar: f64) -> Result<Self> {
        if h.dim() <= SPECTRAL_DIM_LIMIT {
            Self::spectral(h, hbar)
        } else {
            Self::rk4(h, hbar)
        }
    }

    pub fn spectral(h: &OperatorMatrix, hbar: f64) -> Result<Self> {
        check_total_hermitian(h)?;
        Ok(Propagator::Spectral {
            decomposition: hermitian_eigen(h.entries()),
            space: h.space().clone(),
            hbar,
        })
    }

    pub fn rk4(h: &OperatorMatrix, hbar: f64) -> Result<Self> {
        check_total_hermitian(h)?;
        Ok(Propagator::Rk4 {
            h: h.entries().clone(),
            space: h.space().clone(),
            hbar,
            max_step: step_for(h, hbar),
        })
    }

    fn space(&self) -> &CompositeSpace {
        match self {
            Propagator::Spectral { space, .. } | Propagator::Rk4 { space, .. } => space,
        }
    }

    /// Advances `psi` by `t ≥ 0`; the returned state's time is `psi.time() + t`.
    pub fn evolve(&self, psi: &StateVector, t: f64) -> Result<StateVector> {
        if psi.space() != self.space() {
            return Err(Error::DimensionMismatch {
                expected: self.space().total_dim(),
                found: psi.space().total_dim(),
            });
        }
        if !(t >= 0.0) || !t.is_finite() {
            return Err(Error::domain(format!("evolution time must be finite and non-negative, got {t}")));
        }
        let amps = if t == 0.0 {
            psi.amplitudes().clone()
        } else {
            match self {
                Propagator::Spectral { decomposition, hbar, .. } => {
                    decomposition.apply_fn(psi.amplitudes(), |e| C64::from_polar(1.0, -e * t / hbar))
                }
                Propagator::Rk4 { h, hbar, max_step, .. } => {
                    rk4_schrodinger(h, *hbar, psi.amplitudes(), t, *max_step)
                }
            }
        };
        Ok(StateVector::from_parts_unchecked(psi.space().clone(), amps, psi.time() + t))
    }
}

fn check_total_hermitian(h: &OperatorMatrix) -> Result<()> {
    let dev = h.hermiticity_deviation();
    if !h.is_hermitian() || dev >= crate::hilbert::HERMITIAN_TOL * h.max_abs().max(1.0) {
        return Err(Error::domain(format!("Hamiltonian is not Hermitian (deviation {dev:.3e})")));
    }
    Ok(())
}

fn rk4_schrodinger(h: &CMatrix, hbar: f64, psi: &CVector, t: f64, max_step: f64) -> CVector {
    let steps = if max_step.is_finite() { (t / max_step).ceil().max(1.0) as usize } else { 1 };
    let dt = t / steps as f64;
    let minus_i = C64::new(0.0, -1.0 / hbar);
    let rhs = |v: &CVector| (h * v) * minus_i;
    let mut y = psi.clone();
    for _ in 0..steps {
        let k1 = rhs(&y);
        let k2 = rhs(&(&y + &k1 * C64::new(0.5 * dt, 0.0)));
        let k3 = rhs(&(&y + &k2 * C64::new(0.5 * dt, 0.0)));
        let k4 = rhs(&(&y + &k3 * C64::new(dt, 0.0)));
        y += (k1 + k2 * C64::new(2.0, 0.0) + k3 * C64::new(2.0, 0.0) + k4) * C64::new(dt / 6.0, 0.0);
        let n = y.norm();
        y /= C64::new(n, 0.0);
    }
    y
}

/// `e^{-iHt/ħ} ψ0` with `H = h_sys + h_env + h_int`.
pub fn evolve_exact(h: &HamiltonianSplit, psi0: &StateVector, t: f64) -> Result<StateVector> {
    Propagator::new(&h.total(), h.hbar)?.evolve(psi0, t)
}

/// Reusable exact engine for sampling a trajectory.
#[derive(Clone, Debug)]
pub struct ExactEngine {
    propagator: Propagator,
}

impl ExactEngine {
    pub fn new(h: &HamiltonianSplit) -> Result<Self> {
        Ok(ExactEngine { propagator: Propagator::new(&h.total(), h.hbar)? })
    }

    /// State at absolute time `t` given the state at `psi0.time()`.
    pub fn state_at(&self, psi0: &StateVector, t: f64) -> Result<StateVector> {
        self.propagator.evolve(psi0, t - psi0.time())
    }

    /// States at each of `times` (ascending, absolute).
    pub fn trajectory(&self, psi0: &StateVector, times: &[f64]) -> Result<Vec<StateVector>> {
        times.iter().map(|&t| self.state_at(psi0, t)).collect()
    }
}

fn check_orthonormal(basis: &[StateVector]) -> Result<()> {
    for (i, a) in basis.iter().enumerate() {
        for (j, b) in basis.iter().enumerate().skip(i) {
            let ov = a.inner(b)?;
            let expect = if i == j { 1.0 } else { 0.0 };
            if (ov - C64::new(expect, 0.0)).norm() > ORTHONORMAL_TOL {
                return Err(Error::domain(format!(
                    "basis is not orthonormal: ⟨{i}|{j}⟩ = {ov}"
                )));
            }
        }
    }
    Ok(())
}

/// Integrates the interaction-picture coefficient equation on a co-evolving
/// unperturbed basis.
#[derive(Clone, Debug)]
pub struct CoefficientIntegrator {
    free: Propagator,
    h_int: CMatrix,
    hbar: f64,
}

impl CoefficientIntegrator {
    pub fn new(h: &HamiltonianSplit) -> Result<Self> {
        Ok(CoefficientIntegrator {
            free: Propagator::new(&h.free(), h.hbar)?,
            h_int: h.h_int.entries().clone(),
            hbar: h.hbar,
        })
    }

    fn coupling(&self, basis: &[StateVector]) -> CMatrix {
        let n = basis.len();
        let applied: Vec<CVector> = basis.iter().map(|b| &self.h_int * b.amplitudes()).collect();
        CMatrix::from_fn(n, n, |i, j| basis[i].amplitudes().dotc(&applied[j]))
    }

    /// One RK4 step of length `dt`. Returns the basis at `t + dt` and the new
    /// coefficients.
    pub fn step(
        &self,
        basis: &[StateVector],
        coeffs: &[C64],
        dt: f64,
    ) -> Result<(Vec<StateVector>, Vec<C64>)> {
        if !(dt > 0.0) {
            return Err(Error::domain(format!("step must be positive, got {dt}")));
        }
        if basis.len() != coeffs.len() {
            return Err(Error::DimensionMismatch { expected: basis.len(), found: coeffs.len() });
        }
        check_orthonormal(basis)?;
        let half: Vec<StateVector> =
            basis.iter().map(|b| self.free.evolve(b, 0.5 * dt)).collect::<Result<_>>()?;
        let full: Vec<StateVector> =
            basis.iter().map(|b| self.free.evolve(b, dt)).collect::<Result<_>>()?;
        let m0 = self.coupling(basis);
        let mh = self.coupling(&half);
        let m1 = self.coupling(&full);

        let f = C64::new(0.0, -1.0 / self.hbar);
        let c = CVector::from_column_slice(coeffs);
        let k1 = &m0 * &c * f;
        let k2 = &mh * (&c + &k1 * C64::new(0.5 * dt, 0.0)) * f;
        let k3 = &mh * (&c + &k2 * C64::new(0.5 * dt, 0.0)) * f;
        let k4 = &m1 * (&c + &k3 * C64::new(dt, 0.0)) * f;
        let next = c + (k1 + k2 * C64::new(2.0, 0.0) + k3 * C64::new(2.0, 0.0) + k4) * C64::new(dt / 6.0, 0.0);
        Ok((full, next.iter().copied().collect()))
    }
}

/// Single coefficient-equation step; see [`CoefficientIntegrator::step`].
pub fn coefficient_ode_step(
    h: &HamiltonianSplit,
    basis: &[StateVector],
    coeffs: &[C64],
    dt: f64,
) -> Result<(Vec<StateVector>, Vec<C64>)> {
    CoefficientIntegrator::new(h)?.step(basis, coeffs, dt)
}

/// Running trapezoid integral of sampled interaction energies.
#[derive(Clone, Debug, Default)]
pub struct ActionAccumulator {
    samples: Vec<(f64, f64)>,
    value: f64,
    monotone: bool,
}

impl ActionAccumulator {
    pub fn new() -> Self {
        ActionAccumulator { samples: Vec::new(), value: 0.0, monotone: true }
    }

    /// Appends `(t, energy)`; times must strictly increase.
    pub fn push(&mut self, t: f64, energy: f64) -> Result<()> {
        if let Some(&(t_prev, e_prev)) = self.samples.last() {
            if !(t > t_prev) {
                return Err(Error::domain(format!("sample time {t} does not exceed {t_prev}")));
            }
            let delta = 0.5 * (t - t_prev) * (e_prev + energy);
            if delta < 0.0 {
                self.monotone = false;
            }
            self.value += delta;
        }
        self.samples.push((t, energy));
        Ok(())
    }

    /// Current action; zero at the first sample.
    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn samples(&self) -> &[(f64, f64)] {
        &self.samples
    }

    /// False once the action has decreased over any step.
    pub fn is_monotone(&self) -> bool {
        self.monotone
    }
}

/// One branch `C_n(t0) |Φ0n(t)⟩ e^{-iΛ_n(t)/ħ}`.
#[derive(Clone, Debug)]
pub struct BranchState {
    pub base: StateVector,
    pub action: f64,
    pub coefficient: C64,
}

impl BranchState {
    pub fn new(base: StateVector, coefficient: C64) -> Self {
        BranchState { base, action: 0.0, coefficient }
    }

    pub fn time(&self) -> f64 {
        self.base.time()
    }

    /// `|Φ0n(t)⟩ e^{-iΛ_n/ħ}` without the coefficient.
    pub fn phased(&self, hbar: f64) -> StateVector {
        self.base.clone().with_global_phase(-self.action / hbar)
    }
}

/// Steps branch bases under the free Hamiltonian while accumulating their
/// interaction actions.
#[derive(Clone, Debug)]
pub struct PhaseApproxEngine {
    free: Propagator,
    h_int: OperatorMatrix,
    hbar: f64,
    step: f64,
}

impl PhaseApproxEngine {
    pub fn new(h: &HamiltonianSplit) -> Result<Self> {
        Ok(PhaseApproxEngine {
            free: Propagator::new(&h.free(), h.hbar)?,
            h_int: h.h_int.clone(),
            hbar: h.hbar,
            step: h.engine_step(),
        })
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    fn energy(&self, psi: &StateVector) -> Result<f64> {
        Ok(expectation(&self.h_int, psi)?.re)
    }

    fn advance_one(&self, branch: &BranchState, t: f64) -> Result<BranchState> {
        let t0 = branch.time();
        if t < t0 {
            return Err(Error::domain(format!("cannot evolve backwards from {t0} to {t}")));
        }
        let span = t - t0;
        let steps = if span == 0.0 {
            0
        } else if self.step.is_finite() {
            (span / self.step).ceil().max(1.0) as usize
        } else {
            1
        };
        let mut action = branch.action;
        let mut base = branch.base.clone();
        let mut e_prev = self.energy(&base)?;
        for k in 1..=steps {
            let tk = t0 + span * k as f64 / steps as f64;
            let next = self.free.evolve(&branch.base, tk - t0)?;
            let e = self.energy(&next)?;
            action += 0.5 * (span / steps as f64) * (e_prev + e);
            e_prev = e;
            base = next;
        }
        Ok(BranchState { base: base.with_time(t), action, coefficient: branch.coefficient })
    }

    /// Evolves every branch to absolute time `t`.
    pub fn advance(&self, branches: &[BranchState], t: f64) -> Result<Vec<BranchState>> {
        branches.iter().map(|b| self.advance_one(b, t)).collect()
    }

    /// Samples all branches at each of `times` (ascending). Entry `k` holds
    /// the branches at `times[k]`.
    pub fn trajectory(&self, branches: &[BranchState], times: &[f64]) -> Result<Vec<Vec<BranchState>>> {
        let mut out = Vec::with_capacity(times.len());
        let mut current = branches.to_vec();
        for &t in times {
            current = self.advance(&current, t)?;
            out.push(current.clone());
        }
        Ok(out)
    }
}

fn check_mutually_orthogonal(branches: &[BranchState]) -> Result<()> {
    for (i, a) in branches.iter().enumerate() {
        for (j, b) in branches.iter().enumerate().skip(i + 1) {
            let ov = a.base.inner(&b.base)?.norm();
            if ov > ORTHONORMAL_TOL {
                return Err(Error::domain(format!("branches {i} and {j} overlap by {ov:.3e}")));
            }
        }
    }
    Ok(())
}

/// Diagonal-phase approximation: bases evolve under `h_sys + h_env`, each
/// action accumulates `∫⟨base|h_int|base⟩dt`, coefficients stay fixed.
pub fn evolve_phase_approx(h: &HamiltonianSplit, branches: &[BranchState], t: f64) -> Result<Vec<BranchState>> {
    check_mutually_orthogonal(branches)?;
    PhaseApproxEngine::new(h)?.advance(branches, t)
}

/// `Σ C_n |Φ0n⟩ e^{-iΛ_n/ħ}`.
pub fn reassemble(branches: &[BranchState], hbar: f64) -> Result<StateVector> {
    let first = branches.first().ok_or_else(|| Error::domain("no branches to reassemble"))?;
    let mut amps = CVector::zeros(first.base.space().total_dim());
    for b in branches {
        if b.base.space() != first.base.space() {
            return Err(Error::domain("branches live on different spaces"));
        }
        amps += b.base.amplitudes() * (b.coefficient * C64::from_polar(1.0, -b.action / hbar));
    }
    StateVector::new(first.base.space().clone(), amps, first.time())
}

/// Mean-field evolution of a single state: the base evolves under the free
/// Hamiltonian on a grid of step `dt` and the returned state carries
/// `e^{-iΛ_Φ(t)/ħ}`.
pub fn evolve_mean_field(
    h: &HamiltonianSplit,
    psi0: &StateVector,
    t: f64,
    dt: f64,
) -> Result<(StateVector, ActionAccumulator)> {
    if !(dt > 0.0) {
        return Err(Error::domain(format!("step must be positive, got {dt}")));
    }
    if !(t >= psi0.time()) {
        return Err(Error::domain("mean-field target time precedes the initial state"));
    }
    let free = Propagator::new(&h.free(), h.hbar)?;
    let t0 = psi0.time();
    let span = t - t0;
    let steps = (span / dt).ceil() as usize;
    let mut acc = ActionAccumulator::new();
    acc.push(t0, expectation(&h.h_int, psi0)?.re)?;
    let mut base = psi0.clone();
    for k in 1..=steps {
        let tk = if k == steps { t } else { t0 + k as f64 * dt };
        base = free.evolve(psi0, tk - t0)?;
        acc.push(tk, expectation(&h.h_int, &base)?.re)?;
    }
    let state = base.with_global_phase(-acc.value() / h.hbar).with_time(t);
    Ok((state, acc))
}

/// `(1/T) ∫ ⟨Φ(t)|Φ'(t)⟩ dt` with `|Φ⟩ = |base⟩ e^{-iΛ/ħ}`, trapezoid on the
/// shared sample grid.
pub fn branch_overlap_time_average(b1: &[BranchState], b2: &[BranchState], hbar: f64) -> Result<C64> {
    if b1.len() != b2.len() || b1.len() < 2 {
        return Err(Error::domain("trajectories must share a grid of at least two samples"));
    }
    let mut times = Vec::with_capacity(b1.len());
    let mut values = Vec::with_capacity(b1.len());
    for (x, y) in b1.iter().zip(b2) {
        if (x.time() - y.time()).abs() > 1e-12 * x.time().abs().max(1.0) {
            return Err(Error::domain(format!("grids differ: {} vs {}", x.time(), y.time())));
        }
        times.push(x.time());
        values.push(x.base.inner(&y.base)? * C64::from_polar(1.0, (x.action - y.action) / hbar));
    }
    let window = times[times.len() - 1] - times[0];
    if !(window > 0.0) {
        return Err(Error::domain("trajectory window has zero length"));
    }
    Ok(crate::quadrature::trapezoid(&times, &values) / window)
}
