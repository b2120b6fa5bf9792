//! Two-level system monitored by an environment.
//!
//! A continuous family of branches
//! `|Φ_θ⟩ = (cos θ |φ↑⟩|ε↑⟩ + sin θ |φ↓⟩|ε↓⟩) e^{-iΛ_θ/ħ}`, `θ ∈ [0, π/2]`,
//! carries the action `Λ_θ = cos²θ Λ↑ + sin²θ Λ↓`. Branches with distinct
//! actions become orthogonal under time averaging, and the superposition
//! over θ collapses onto the endpoint (pointer) branches by stationary phase.

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::dynamics::{ActionAccumulator, HamiltonianSplit};
use crate::error::{Error, Result};
use crate::hilbert::{CMatrix, CompositeSpace, OperatorMatrix};
use crate::quadrature::{gauss_legendre, linspace, window_average_of_phase};

/// Default minimum `|Λ↑ − Λ↓| / ħ` for the stationary-phase reduction.
pub const DEFAULT_GAP_THRESHOLD: f64 = 10.0;

/// Default θ-grid size.
pub const DEFAULT_THETA_POINTS: usize = 2001;

/// How branch actions are obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Monitoring {
    /// `Λ_s = λ_s (t − t0)` with the configured rates.
    ConstantRate,
    /// `Λ_θ = ∫⟨φ_θ(s)|V|φ_θ(s)⟩ ds` sampled along free evolution.
    Quadrature,
}

#[derive(Clone, Debug)]
pub struct TwoStateModel {
    pub eps_up: f64,
    pub eps_down: f64,
    pub lambda_up_rate: f64,
    pub lambda_down_rate: f64,
    v_matrix: OperatorMatrix,
    pub env_dim: usize,
    pub t0: f64,
    pub hbar: f64,
    pub monitoring: Monitoring,
}

impl TwoStateModel {
    /// Constant-monitoring model whose `V` is diagonal with the two rates.
    pub fn constant_rate(eps_up: f64, eps_down: f64, lambda_up_rate: f64, lambda_down_rate: f64) -> Result<Self> {
        let v = OperatorMatrix::diagonal(CompositeSpace::single(2)?, &[lambda_up_rate, lambda_down_rate])?;
        Self::new(eps_up, eps_down, lambda_up_rate, lambda_down_rate, v, 1)
    }

    /// Model with a general `V` (energy basis); rates are read off its diagonal.
    pub fn with_v(eps_up: f64, eps_down: f64, v_matrix: OperatorMatrix) -> Result<Self> {
        let (a, d) = (v_matrix.entries()[(0, 0)].re, v_matrix.entries()[(1, 1)].re);
        let mut m = Self::new(eps_up, eps_down, a, d, v_matrix, 1)?;
        m.monitoring = Monitoring::Quadrature;
        Ok(m)
    }

    pub fn new(
        eps_up: f64,
        eps_down: f64,
        lambda_up_rate: f64,
        lambda_down_rate: f64,
        v_matrix: OperatorMatrix,
        env_dim: usize,
    ) -> Result<Self> {
        if v_matrix.dim() != 2 {
            return Err(Error::DimensionMismatch { expected: 2, found: v_matrix.dim() });
        }
        if !v_matrix.is_hermitian() || v_matrix.hermiticity_deviation() > crate::hilbert::HERMITIAN_TOL {
            return Err(Error::domain("v_matrix must be Hermitian"));
        }
        if env_dim == 0 {
            return Err(Error::domain("env_dim must be at least 1"));
        }
        Ok(TwoStateModel {
            eps_up,
            eps_down,
            lambda_up_rate,
            lambda_down_rate,
            v_matrix,
            env_dim,
            t0: 0.0,
            hbar: 1.0,
            monitoring: Monitoring::ConstantRate,
        })
    }

    pub fn with_hbar(mut self, hbar: f64) -> Result<Self> {
        if !(hbar > 0.0 && hbar.is_finite()) {
            return Err(Error::domain(format!("hbar must be positive, got {hbar}")));
        }
        self.hbar = hbar;
        Ok(self)
    }

    pub fn with_env_dim(mut self, env_dim: usize) -> Result<Self> {
        if env_dim == 0 {
            return Err(Error::domain("env_dim must be at least 1"));
        }
        self.env_dim = env_dim;
        Ok(self)
    }

    pub fn v_matrix(&self) -> &OperatorMatrix {
        &self.v_matrix
    }

    /// `λ↑ − λ↓`.
    pub fn rate_gap(&self) -> f64 {
        self.lambda_up_rate - self.lambda_down_rate
    }

    fn check_time(&self, t: f64) -> Result<()> {
        if !(t >= self.t0) || !t.is_finite() {
            return Err(Error::domain(format!("time {t} precedes t0 = {}", self.t0)));
        }
        Ok(())
    }

    fn quadrature_step(&self) -> f64 {
        let scale = self.eps_up.abs().max(self.eps_down.abs()) + self.v_matrix.inf_norm();
        if scale > 0.0 {
            0.05 * self.hbar / scale
        } else {
            f64::INFINITY
        }
    }

    fn energy_along(&self, theta: f64, s: f64) -> f64 {
        let v = self.v_matrix.entries();
        let (c, sn) = (theta.cos(), theta.sin());
        let rel = C64::from_polar(1.0, (self.eps_up - self.eps_down) * s / self.hbar);
        c * c * v[(0, 0)].re + sn * sn * v[(1, 1)].re + 2.0 * c * sn * (v[(0, 1)] * rel).re
    }
}

fn check_theta(theta: f64) -> Result<()> {
    if !(0.0..=FRAC_PI_2 + 1e-12).contains(&theta) {
        return Err(Error::domain(format!("theta {theta} outside [0, π/2]")));
    }
    Ok(())
}

/// `Λ_θ(t)`.
pub fn lambda_theta(model: &TwoStateModel, theta: f64, t: f64) -> Result<f64> {
    check_theta(theta)?;
    model.check_time(t)?;
    let span = t - model.t0;
    match model.monitoring {
        Monitoring::ConstantRate => {
            let c2 = theta.cos().powi(2);
            Ok(c2 * model.lambda_up_rate * span + (1.0 - c2) * model.lambda_down_rate * span)
        }
        Monitoring::Quadrature => {
            let mut acc = ActionAccumulator::new();
            acc.push(model.t0, model.energy_along(theta, 0.0))?;
            if span > 0.0 {
                let step = model.quadrature_step();
                let n = if step.is_finite() { (span / step).ceil().max(1.0) as usize } else { 1 };
                for k in 1..=n {
                    let s = span * k as f64 / n as f64;
                    acc.push(model.t0 + s, model.energy_along(theta, s))?;
                }
            }
            Ok(acc.value())
        }
    }
}

/// `cos(θ1−θ2) · (1/T)∫₀ᵀ e^{-i(Λ_θ1 − Λ_θ2)/ħ} dt` for constant rates.
pub fn theta_overlap_average(model: &TwoStateModel, theta1: f64, theta2: f64, window: f64) -> Result<C64> {
    check_theta(theta1)?;
    check_theta(theta2)?;
    if !(window > 0.0) {
        return Err(Error::domain("averaging window must be positive"));
    }
    let a = (theta1.cos().powi(2) - theta2.cos().powi(2)) * model.rate_gap() / model.hbar;
    Ok(window_average_of_phase(a, window) * (theta1 - theta2).cos())
}

/// `ħ / |λ↑ − λ↓|`.
pub fn decoherence_time(model: &TwoStateModel) -> Result<f64> {
    let gap = model.rate_gap().abs();
    if gap == 0.0 {
        return Err(Error::NoDecoherence);
    }
    Ok(model.hbar / gap)
}

/// Many-level estimate `N ħ / Δε`, reported only as a diagnostic.
pub fn many_level_timescale(levels: usize, delta_eps: f64, hbar: f64) -> Result<f64> {
    if levels == 0 || delta_eps == 0.0 {
        return Err(Error::domain("need at least one level and a nonzero energy spread"));
    }
    Ok(levels as f64 * hbar / delta_eps.abs())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ThetaBranch {
    pub theta: f64,
    pub coefficient: C64,
    pub action: f64,
}

/// `n` equally spaced branches over `[0, π/2]` with equal coefficients and
/// their actions at time `t`.
pub fn uniform_branches(model: &TwoStateModel, n: usize, t: f64) -> Result<Vec<ThetaBranch>> {
    if n < 2 {
        return Err(Error::domain("θ grid needs at least two points"));
    }
    let c = C64::new(1.0 / (n as f64).sqrt(), 0.0);
    linspace(0.0, FRAC_PI_2, n)
        .into_iter()
        .map(|theta| Ok(ThetaBranch { theta, coefficient: c, action: lambda_theta(model, theta, t)? }))
        .collect()
}

/// Sums in a fixed binary-tree order so that results do not depend on how
/// work is split.
pub fn pairwise_sum(xs: &[C64]) -> C64 {
    match xs.len() {
        0 => C64::new(0.0, 0.0),
        1 => xs[0],
        n => pairwise_sum(&xs[..n / 2]) + pairwise_sum(&xs[n / 2..]),
    }
}

/// Trapezoid-weighted sums `(Σ w C cosθ e^{-iΛ/ħ}, Σ w C sinθ e^{-iΛ/ħ})`,
/// the `|φ↑⟩` and `|φ↓⟩` components of the θ superposition.
pub fn theta_grid_sum(branches: &[ThetaBranch], hbar: f64) -> Result<[C64; 2]> {
    if branches.len() < 2 {
        return Err(Error::domain("θ grid needs at least two branches"));
    }
    let last = branches.len() - 1;
    let term = |k: usize, b: &ThetaBranch, f: f64| {
        let w = if k == 0 || k == last { 0.5 } else { 1.0 };
        b.coefficient * C64::from_polar(w * f, -b.action / hbar)
    };
    let up: Vec<C64> = branches.iter().enumerate().map(|(k, b)| term(k, b, b.theta.cos())).collect();
    let down: Vec<C64> = branches.iter().enumerate().map(|(k, b)| term(k, b, b.theta.sin())).collect();
    Ok([pairwise_sum(&up), pairwise_sum(&down)])
}

/// Endpoint stationary-phase weights `C̃_0`, `C̃_{π/2}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PointerPair {
    pub c_up: C64,
    pub c_down: C64,
    pub lambda_up: f64,
    pub lambda_down: f64,
    pub lambda_gap: f64,
    pub hbar: f64,
}

impl PointerPair {
    /// `C̃ e^{-iΛ/ħ} / (2h)` per component, the continuum counterpart of
    /// [`theta_grid_sum`] on a grid of spacing `h`.
    pub fn components(&self, grid_spacing: f64) -> [C64; 2] {
        let s = 1.0 / (2.0 * grid_spacing);
        [
            self.c_up * C64::from_polar(s, -self.lambda_up / self.hbar),
            self.c_down * C64::from_polar(s, -self.lambda_down / self.hbar),
        ]
    }
}

/// Reduces a θ family to its two endpoint contributions. The family must be
/// sorted by θ and include both θ = 0 and θ = π/2.
pub fn saddle_point_reduce(branches: &[ThetaBranch], hbar: f64, gap_threshold: f64) -> Result<PointerPair> {
    let (first, last) = match (branches.first(), branches.last()) {
        (Some(f), Some(l)) if branches.len() >= 2 => (f, l),
        _ => return Err(Error::domain("θ family needs at least two branches")),
    };
    if first.theta.abs() > 1e-12 || (last.theta - FRAC_PI_2).abs() > 1e-12 {
        return Err(Error::domain("θ family must include both endpoints 0 and π/2"));
    }
    let gap = first.action - last.action;
    if gap.abs() < gap_threshold * hbar {
        return Err(Error::StationaryPhaseRegime { gap: gap.abs(), threshold: gap_threshold * hbar });
    }
    let i = C64::new(0.0, 1.0);
    let w_up = (i * (std::f64::consts::PI * hbar / gap)).sqrt();
    let w_down = (-i * (std::f64::consts::PI * hbar / gap)).sqrt();
    Ok(PointerPair {
        c_up: first.coefficient * w_up,
        c_down: last.coefficient * w_down,
        lambda_up: first.action,
        lambda_down: last.action,
        lambda_gap: gap,
        hbar,
    })
}

/// Grid sum against the two-term pointer expression.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SaddleComparison {
    pub gap_over_hbar: f64,
    pub grid: [C64; 2],
    pub pointer: [C64; 2],
    /// `|grid − pointer| / |pointer|` per component.
    pub relative_error: [f64; 2],
    /// `|grid − pointer| · h / |C|` per component.
    pub scaled_abs_error: [f64; 2],
}

impl SaddleComparison {
    pub fn max_relative_error(&self) -> f64 {
        self.relative_error[0].max(self.relative_error[1])
    }

    pub fn max_scaled_abs_error(&self) -> f64 {
        self.scaled_abs_error[0].max(self.scaled_abs_error[1])
    }
}

pub fn saddle_comparison(model: &TwoStateModel, n_theta: usize, t: f64, gap_threshold: f64) -> Result<SaddleComparison> {
    let branches = uniform_branches(model, n_theta, t)?;
    let pair = saddle_point_reduce(&branches, model.hbar, gap_threshold)?;
    let grid = theta_grid_sum(&branches, model.hbar)?;
    let h = FRAC_PI_2 / (n_theta - 1) as f64;
    let pointer = pair.components(h);
    let c = branches[0].coefficient.norm();
    let err = |k: usize| (grid[k] - pointer[k]).norm();
    Ok(SaddleComparison {
        gap_over_hbar: pair.lambda_gap / model.hbar,
        grid,
        pointer,
        relative_error: [err(0) / pointer[0].norm(), err(1) / pointer[1].norm()],
        scaled_abs_error: [err(0) * h / c, err(1) * h / c],
    })
}

/// `r(t) = e^{i(Λ↑(t) − Λ↓(t))/ħ}`.
pub fn coherence_factor(model: &TwoStateModel, t: f64) -> Result<C64> {
    let gap = lambda_theta(model, 0.0, t)? - lambda_theta(model, FRAC_PI_2, t)?;
    Ok(C64::from_polar(1.0, gap / model.hbar))
}

/// Closed-form `(1/T)∫_{t0}^{t0+T} r(t) dt` for constant rates.
pub fn coherence_factor_average(model: &TwoStateModel, window: f64) -> Result<C64> {
    if !(window > 0.0) {
        return Err(Error::domain("averaging window must be positive"));
    }
    Ok(window_average_of_phase(-model.rate_gap() / model.hbar, window))
}

/// The same window average by composite Gauss–Legendre quadrature of `r`.
pub fn coherence_factor_average_numeric(model: &TwoStateModel, window: f64, panels: usize) -> Result<C64> {
    if !(window > 0.0) {
        return Err(Error::domain("averaging window must be positive"));
    }
    let w = model.rate_gap() / model.hbar;
    Ok(gauss_legendre(|s| C64::from_polar(1.0, w * s), 0.0, window, panels) / window)
}

/// `min(1, 2ħ / (|Δλ| T))`.
pub fn coherence_envelope(model: &TwoStateModel, window: f64) -> f64 {
    let gap = model.rate_gap().abs();
    if gap == 0.0 {
        1.0
    } else {
        (2.0 * model.hbar / (gap * window)).min(1.0)
    }
}

/// First-order estimate and exact value of `⟨φ₊(t)|V|φ₋(t)⟩`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct NoncommutativeGrowth {
    pub exact: C64,
    pub estimate: C64,
    pub difference: C64,
}

/// `V₊, V₋` for a `V` of the form `a·1 + b·σx` in the energy basis.
pub fn split_eigenvalues(v: &OperatorMatrix) -> Result<(f64, f64)> {
    let m = v.entries();
    let scale = v.max_abs().max(1.0);
    let diag_gap = (m[(0, 0)] - m[(1, 1)]).norm();
    let imag = m[(0, 1)].im.abs();
    if v.dim() != 2 || diag_gap > 1e-12 * scale || imag > 1e-12 * scale {
        return Err(Error::domain(format!(
            "V must be a·1 + b·σx in the energy basis so that (|↑⟩±|↓⟩)/√2 are its eigenvectors \
             (diagonal difference {diag_gap:.3e}, imaginary off-diagonal {imag:.3e})"
        )));
    }
    let a = m[(0, 0)].re;
    let b = m[(0, 1)].re;
    Ok((a + b, a - b))
}

pub fn noncommutative_growth(model: &TwoStateModel, t: f64) -> Result<NoncommutativeGrowth> {
    let (v_plus, v_minus) = split_eigenvalues(&model.v_matrix)?;
    model.check_time(t)?;
    let s = t - model.t0;
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let prop = |sign: f64| {
        [
            C64::from_polar(r, -model.eps_up * s / model.hbar),
            C64::from_polar(r, -model.eps_down * s / model.hbar) * sign,
        ]
    };
    let plus = prop(1.0);
    let minus = prop(-1.0);
    let v = model.v_matrix.entries();
    let mut exact = C64::new(0.0, 0.0);
    for i in 0..2 {
        for j in 0..2 {
            exact += plus[i].conj() * v[(i, j)] * minus[j];
        }
    }
    let estimate =
        C64::new(0.0, s * (v_minus - v_plus) * (model.eps_up - model.eps_down) / (2.0 * model.hbar));
    Ok(NoncommutativeGrowth { exact, estimate, difference: exact - estimate })
}

/// `(max_{[0,τ]} |exact|, |estimate(τ)|)` with `τ = 2ħ/|ε↑ − ε↓|`, sampled
/// on `samples` points.
pub fn noncommutative_diagnostic(model: &TwoStateModel, samples: usize) -> Result<(f64, f64)> {
    let de = (model.eps_up - model.eps_down).abs();
    if de == 0.0 {
        return Err(Error::domain("degenerate ε↑ = ε↓ has no diagnostic window"));
    }
    let tau = 2.0 * model.hbar / de;
    let mut peak = 0.0f64;
    for t in linspace(model.t0, model.t0 + tau, samples.max(2)) {
        peak = peak.max(noncommutative_growth(model, t)?.exact.norm());
    }
    Ok((peak, noncommutative_growth(model, model.t0 + tau)?.estimate.norm()))
}

/// Composite system ⊗ environment in which the environment only adds the
/// phases `λ↑`, `λ↓`: `h_sys = diag(ε↑, ε↓) ⊗ 1`, `h_env = 1 ⊗ diag(env)`,
/// `h_int = diag(λ↑, λ↓) ⊗ 1`.
pub fn dephasing_composite(model: &TwoStateModel, env_energies: &[f64]) -> Result<HamiltonianSplit> {
    if env_energies.len() != model.env_dim {
        return Err(Error::DimensionMismatch { expected: model.env_dim, found: env_energies.len() });
    }
    let sys_space = CompositeSpace::single(2)?;
    let env_space = CompositeSpace::single(model.env_dim)?;
    let sys = OperatorMatrix::diagonal(sys_space.clone(), &[model.eps_up, model.eps_down])?;
    let env = OperatorMatrix::diagonal(env_space.clone(), env_energies)?;
    let v = OperatorMatrix::diagonal(sys_space, &[model.lambda_up_rate, model.lambda_down_rate])?;
    let h_int = crate::hilbert::tensor_product(&v, &OperatorMatrix::identity(env_space))?;
    HamiltonianSplit::from_factors(&sys, &env, h_int)?.with_hbar(model.hbar)
}

/// Closed-form reduced off-diagonal `ρ↑↓(t)` of the dephasing composite for
/// initial system amplitudes `(a, b)`.
pub fn dephasing_offdiag(model: &TwoStateModel, a: C64, b: C64, t: f64) -> Result<C64> {
    let s = t - model.t0;
    let free = C64::from_polar(1.0, -(model.eps_up - model.eps_down) * s / model.hbar);
    Ok(a * b.conj() * free * coherence_factor(model, t)?.conj())
}

/// 2×2 helper used by tests and scenarios: `a·1 + b·σx`.
pub fn v_from_split(v_plus: f64, v_minus: f64) -> Result<OperatorMatrix> {
    let a = 0.5 * (v_plus + v_minus);
    let b = 0.5 * (v_plus - v_minus);
    let m = CMatrix::from_row_slice(2, 2, &[C64::new(a, 0.0), C64::new(b, 0.0), C64::new(b, 0.0), C64::new(a, 0.0)]);
    OperatorMatrix::hermitian(CompositeSpace::single(2)?, m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn lambda_theta_examples() {
        let m = TwoStateModel::constant_rate(0.0, 0.0, 2.0, 0.0).unwrap();
        assert_abs_diff_eq!(lambda_theta(&m, std::f64::consts::FRAC_PI_4, 1.0).unwrap(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(lambda_theta(&m, 0.0, 3.0).unwrap(), 6.0);
        assert!(lambda_theta(&m, 2.0, 1.0).is_err());
        assert!(lambda_theta(&m, -0.1, 1.0).is_err());
    }

    #[test]
    fn decoherence_time_examples() {
        let m = TwoStateModel::constant_rate(0.0, 0.0, 10.0, 0.0).unwrap();
        assert_abs_diff_eq!(decoherence_time(&m).unwrap(), 0.1);
        let m = TwoStateModel::constant_rate(0.0, 0.0, 1.5, 0.5).unwrap();
        assert_abs_diff_eq!(decoherence_time(&m).unwrap(), 1.0);
        let m = TwoStateModel::constant_rate(0.0, 0.0, 1.0, 1.0).unwrap();
        assert_eq!(decoherence_time(&m), Err(Error::NoDecoherence));
    }

    #[test]
    fn weight_magnitude_at_gap_pi() {
        let c = C64::new(1.0, 0.0);
        let branches = [
            ThetaBranch { theta: 0.0, coefficient: c, action: std::f64::consts::PI },
            ThetaBranch { theta: FRAC_PI_2, coefficient: c, action: 0.0 },
        ];
        let pair = saddle_point_reduce(&branches, 1.0, 1.0).unwrap();
        assert_abs_diff_eq!(pair.c_up.norm(), 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(pair.c_up.arg(), std::f64::consts::FRAC_PI_4, epsilon = 1e-14);
        assert_abs_diff_eq!(pair.c_down.arg(), -std::f64::consts::FRAC_PI_4, epsilon = 1e-14);
        assert!(matches!(
            saddle_point_reduce(&branches, 1.0, 10.0),
            Err(Error::StationaryPhaseRegime { .. })
        ));
    }

    #[test]
    fn negative_gap_flips_phases() {
        let c = C64::new(1.0, 0.0);
        let branches = [
            ThetaBranch { theta: 0.0, coefficient: c, action: 0.0 },
            ThetaBranch { theta: FRAC_PI_2, coefficient: c, action: 50.0 },
        ];
        let pair = saddle_point_reduce(&branches, 1.0, 10.0).unwrap();
        assert_abs_diff_eq!(pair.c_up.arg(), -std::f64::consts::FRAC_PI_4, epsilon = 1e-14);
        assert_abs_diff_eq!(pair.c_down.arg(), std::f64::consts::FRAC_PI_4, epsilon = 1e-14);
    }

    #[test]
    fn split_rejects_non_sigma_x() {
        let v = OperatorMatrix::diagonal(CompositeSpace::single(2).unwrap(), &[1.0, 0.0]).unwrap();
        assert!(split_eigenvalues(&v).is_err());
        let v = OperatorMatrix::pauli_y();
        assert!(split_eigenvalues(&v).is_err());
        let (p, m) = split_eigenvalues(&v_from_split(1.0, -1.0).unwrap()).unwrap();
        assert_eq!((p, m), (1.0, -1.0));
    }

    #[test]
    fn pairwise_sum_matches_naive() {
        let xs: Vec<C64> = (0..37).map(|k| C64::new(k as f64, -(k as f64) * 0.5)).collect();
        let naive: C64 = xs.iter().sum();
        assert_abs_diff_eq!((pairwise_sum(&xs) - naive).norm(), 0.0, epsilon = 1e-12);
    }
}
