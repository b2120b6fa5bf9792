//! Density matrices and their time averages.

use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hilbert::{hermitian_eigen, CMatrix, CVector, CompositeSpace, SpectralDecomposition, StateVector};
use crate::quadrature::linspace;

pub const DENSITY_TOL: f64 = 1e-10;
pub const PSD_TOL: f64 = 1e-9;

/// Relative tolerance for treating two eigenvalues as degenerate.
pub const DEGENERACY_TOL: f64 = 1e-9;

const ENTROPY_FLOOR: f64 = 1e-14;

/// Hermitian, unit-trace, positive semidefinite matrix tagged with the basis
/// it is written in.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    space: CompositeSpace,
    entries: CMatrix,
    basis_label: String,
}

impl DensityMatrix {
    pub fn new(space: CompositeSpace, entries: CMatrix, basis_label: impl Into<String>) -> Result<Self> {
        let rho = Self::from_parts_unchecked(space, entries, basis_label.into());
        rho.validate()?;
        Ok(rho)
    }

    pub(crate) fn from_parts_unchecked(space: CompositeSpace, entries: CMatrix, basis_label: String) -> Self {
        DensityMatrix { space, entries, basis_label }
    }

    /// `|ψ⟩⟨ψ|`.
    pub fn from_pure(psi: &StateVector, basis_label: impl Into<String>) -> Self {
        let a = psi.amplitudes();
        Self::from_parts_unchecked(psi.space().clone(), a * a.adjoint(), basis_label.into())
    }

    pub fn maximally_mixed(space: CompositeSpace) -> Self {
        let d = space.total_dim();
        let entries = CMatrix::identity(d, d) / C64::new(d as f64, 0.0);
        Self::from_parts_unchecked(space, entries, "computational".to_string())
    }

    /// Rejects matrices that are not valid density matrices.
    pub fn validate(&self) -> Result<()> {
        let d = self.space.total_dim();
        if self.entries.nrows() != d || self.entries.ncols() != d {
            return Err(Error::DimensionMismatch { expected: d, found: self.entries.nrows() });
        }
        let herm = (&self.entries - self.entries.adjoint()).iter().fold(0.0f64, |m, z| m.max(z.norm()));
        if herm > DENSITY_TOL {
            return Err(Error::domain(format!("density matrix is not Hermitian (deviation {herm:.3e})")));
        }
        let tr = self.entries.trace();
        if (tr - C64::new(1.0, 0.0)).norm() > DENSITY_TOL {
            return Err(Error::domain(format!("density matrix trace is {tr}")));
        }
        let min = self.eigenvalues().first().copied().unwrap_or(0.0);
        if min < -PSD_TOL {
            return Err(Error::domain(format!("density matrix has eigenvalue {min:.3e}")));
        }
        Ok(())
    }

    pub fn space(&self) -> &CompositeSpace {
        &self.space
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    pub fn basis_label(&self) -> &str {
        &self.basis_label
    }

    pub fn dim(&self) -> usize {
        self.space.total_dim()
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.basis_label = label.into();
        self
    }

    /// Ascending eigenvalues of the Hermitian part.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let h = (&self.entries + self.entries.adjoint()) * C64::new(0.5, 0.0);
        hermitian_eigen(&h).eigenvalues().to_vec()
    }

    pub fn purity(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum()
    }

    /// `-Tr ρ ln ρ` with eigenvalues clamped at zero and a log floor.
    pub fn entropy(&self) -> f64 {
        -self
            .eigenvalues()
            .into_iter()
            .map(|l| {
                let l = l.max(0.0);
                l * l.max(ENTROPY_FLOOR).ln()
            })
            .sum::<f64>()
    }

    /// `U† ρ U` where the columns of `U` are the basis vectors.
    pub fn in_basis(&self, basis: &SpectralDecomposition, label: impl Into<String>) -> Result<DensityMatrix> {
        self.check_basis(basis)?;
        let u = basis.eigenvectors();
        Ok(Self::from_parts_unchecked(self.space.clone(), u.adjoint() * &self.entries * u, label.into()))
    }

    /// Inverse of [`in_basis`](Self::in_basis).
    pub fn from_basis(&self, basis: &SpectralDecomposition, label: impl Into<String>) -> Result<DensityMatrix> {
        self.check_basis(basis)?;
        let u = basis.eigenvectors();
        Ok(Self::from_parts_unchecked(self.space.clone(), u * &self.entries * u.adjoint(), label.into()))
    }

    fn check_basis(&self, basis: &SpectralDecomposition) -> Result<()> {
        if basis.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: basis.dim() });
        }
        Ok(())
    }
}

/// Streaming trapezoid average of matrix samples. Memory use does not grow
/// with the number of samples.
#[derive(Clone, Debug)]
pub struct TimeAverager {
    space: CompositeSpace,
    label: String,
    sum: CMatrix,
    last: Option<(f64, CMatrix)>,
    t0: f64,
    count: usize,
}

impl TimeAverager {
    pub fn new(space: CompositeSpace, label: impl Into<String>) -> Self {
        let d = space.total_dim();
        TimeAverager { space, label: label.into(), sum: CMatrix::zeros(d, d), last: None, t0: 0.0, count: 0 }
    }

    /// Adds the sample `entries` taken at time `t`; times must increase.
    pub fn push(&mut self, t: f64, entries: CMatrix) -> Result<()> {
        let d = self.space.total_dim();
        if entries.nrows() != d || entries.ncols() != d {
            return Err(Error::DimensionMismatch { expected: d, found: entries.nrows() });
        }
        match self.last.take() {
            None => self.t0 = t,
            Some((tp, prev)) => {
                if !(t > tp) {
                    self.last = Some((tp, prev));
                    return Err(Error::domain(format!("sample time {t} does not exceed {tp}")));
                }
                let w = C64::new(0.5 * (t - tp), 0.0);
                self.sum += (prev + &entries) * w;
            }
        }
        self.last = Some((t, entries));
        self.count += 1;
        Ok(())
    }

    pub fn push_density(&mut self, t: f64, rho: &DensityMatrix) -> Result<()> {
        if rho.space() != &self.space {
            return Err(Error::DimensionMismatch { expected: self.space.total_dim(), found: rho.dim() });
        }
        self.push(t, rho.entries().clone())
    }

    pub fn count(&self) -> usize {
        self.count
    }

    /// Covered window length.
    pub fn window(&self) -> f64 {
        self.last.as_ref().map_or(0.0, |(t, _)| t - self.t0)
    }

    /// `(1/T) ∫ ρ dt` over the samples seen so far.
    pub fn average(&self) -> Result<DensityMatrix> {
        let window = self.window();
        if self.count < 2 || !(window > 0.0) {
            return Err(Error::domain("time average needs at least two samples spanning a positive window"));
        }
        Ok(DensityMatrix::from_parts_unchecked(
            self.space.clone(),
            &self.sum / C64::new(window, 0.0),
            self.label.clone(),
        ))
    }
}

/// Entrywise trapezoid average of a recorded trajectory.
pub fn time_average_density(times: &[f64], traj: &[DensityMatrix]) -> Result<DensityMatrix> {
    if traj.is_empty() {
        return Err(Error::domain("empty trajectory"));
    }
    if times.len() != traj.len() {
        return Err(Error::DimensionMismatch { expected: traj.len(), found: times.len() });
    }
    let mut avg = TimeAverager::new(traj[0].space().clone(), traj[0].basis_label());
    for (&t, rho) in times.iter().zip(traj) {
        avg.push_density(t, rho)?;
    }
    avg.average()
}

/// Groups of indices whose eigenvalues agree within the degeneracy tolerance.
pub fn degeneracy_groups(eigenvalues: &[f64]) -> Vec<Vec<usize>> {
    let scale = eigenvalues.iter().fold(0.0f64, |m, e| m.max(e.abs())).max(f64::MIN_POSITIVE);
    let tol = DEGENERACY_TOL * scale;
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for (k, &e) in eigenvalues.iter().enumerate() {
        match groups.last_mut() {
            Some(g) if (e - eigenvalues[*g.last().unwrap()]).abs() <= tol => g.push(k),
            _ => groups.push(vec![k]),
        }
    }
    groups
}

/// `Σ_k P_k ρ P_k` over the eigenvalue projectors of `basis`, returned in the
/// representation `rho` was given in.
pub fn dephase_in_basis(rho: &DensityMatrix, basis: &SpectralDecomposition) -> Result<DensityMatrix> {
    let in_eig = rho.in_basis(basis, rho.basis_label())?;
    let groups = degeneracy_groups(basis.eigenvalues());
    let mut group_of = vec![0usize; basis.dim()];
    for (g, members) in groups.iter().enumerate() {
        for &k in members {
            group_of[k] = g;
        }
    }
    let d = basis.dim();
    let kept = CMatrix::from_fn(d, d, |i, j| {
        if group_of[i] == group_of[j] {
            in_eig.entries()[(i, j)]
        } else {
            C64::new(0.0, 0.0)
        }
    });
    DensityMatrix::from_parts_unchecked(rho.space().clone(), kept, rho.basis_label().to_string())
        .from_basis(basis, rho.basis_label())
}

/// `½‖ρ − σ‖₁`.
pub fn trace_distance(a: &DensityMatrix, b: &DensityMatrix) -> Result<f64> {
    if a.space() != b.space() {
        return Err(Error::DimensionMismatch { expected: a.dim(), found: b.dim() });
    }
    let diff = a.entries() - b.entries();
    let herm = (&diff + diff.adjoint()) * C64::new(0.5, 0.0);
    Ok(0.5 * hermitian_eigen(&herm).eigenvalues().iter().map(|l| l.abs()).sum::<f64>())
}

/// Uniform mixture of the eigenstates with eigenvalue in `[lo, hi]`, in the
/// original representation.
pub fn microcanonical_state(
    space: &CompositeSpace,
    window: (f64, f64),
    basis: &SpectralDecomposition,
) -> Result<DensityMatrix> {
    let (lo, hi) = window;
    let inside: Vec<usize> = (0..basis.dim()).filter(|&k| (lo..=hi).contains(&basis.eigenvalues()[k])).collect();
    if inside.is_empty() {
        return Err(Error::domain(format!("no eigenvalue inside the energy window [{lo}, {hi}]")));
    }
    let d = basis.dim();
    let w = C64::new(1.0 / inside.len() as f64, 0.0);
    let mut m = CMatrix::zeros(d, d);
    for k in inside {
        let v: CVector = basis.eigenvector(k);
        m += &v * v.adjoint() * w;
    }
    Ok(DensityMatrix::from_parts_unchecked(space.clone(), m, "microcanonical".to_string()))
}

/// Trace distance between `rho_bar` and the microcanonical mixture over the
/// energy window.
pub fn microcanonical_compare(
    rho_bar: &DensityMatrix,
    window: (f64, f64),
    basis: &SpectralDecomposition,
) -> Result<f64> {
    let mc = microcanonical_state(rho_bar.space(), window, basis)?;
    trace_distance(rho_bar, &mc)
}

/// Coherence metrics of one density matrix.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CoherenceReport {
    pub window: f64,
    pub offdiag_l1: f64,
    pub offdiag_max: f64,
    pub purity: f64,
    pub entropy: f64,
}

impl CoherenceReport {
    pub const CSV_HEADER: [&'static str; 5] = ["window", "offdiag_l1", "offdiag_max", "purity", "entropy"];

    pub fn csv_fields(&self) -> [f64; 5] {
        [self.window, self.offdiag_l1, self.offdiag_max, self.purity, self.entropy]
    }
}

pub fn coherence_report(rho: &DensityMatrix, window: f64) -> CoherenceReport {
    let (offdiag_l1, offdiag_max) = offdiag_norms(rho.entries());
    CoherenceReport { window, offdiag_l1, offdiag_max, purity: rho.purity(), entropy: rho.entropy() }
}

/// `(Σ_{i≠j}|m_ij|, max_{i≠j}|m_ij|)`.
pub fn offdiag_norms(m: &CMatrix) -> (f64, f64) {
    let mut l1 = 0.0;
    let mut max = 0.0f64;
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            if i != j {
                let a = m[(i, j)].norm();
                l1 += a;
                max = max.max(a);
            }
        }
    }
    (l1, max)
}

/// Fit of `y ≈ C/T` in log space.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct InverseTFit {
    /// Prefactor with the slope pinned to −1.
    pub c: f64,
    /// Coefficient of determination of `ln y` for the pinned fit.
    pub r_squared: f64,
    /// Least-squares slope of `ln y` against `ln T`.
    pub free_slope: f64,
}

pub fn fit_inverse_t(ts: &[f64], ys: &[f64]) -> Result<InverseTFit> {
    if ts.len() != ys.len() || ts.len() < 3 {
        return Err(Error::domain("inverse-T fit needs at least three matched samples"));
    }
    if ts.iter().chain(ys).any(|v| !(*v > 0.0)) {
        return Err(Error::domain("inverse-T fit needs positive windows and values"));
    }
    let lx: Vec<f64> = ts.iter().map(|t| t.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let ln_c = lx.iter().zip(&ly).map(|(x, y)| y + x).sum::<f64>() / n;
    let mean_y = ly.iter().sum::<f64>() / n;
    let ss_tot: f64 = ly.iter().map(|y| (y - mean_y).powi(2)).sum();
    let ss_res: f64 = lx.iter().zip(&ly).map(|(x, y)| (y - (ln_c - x)).powi(2)).sum();
    let r_squared = if ss_tot > 0.0 { 1.0 - ss_res / ss_tot } else { 0.0 };
    let mean_x = lx.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|x| (x - mean_x).powi(2)).sum();
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mean_x) * (y - mean_y)).sum();
    Ok(InverseTFit { c: ln_c.exp(), r_squared, free_slope: sxy / sxx })
}

/// Pure state of a nondegenerate spectrum written in its energy basis.
#[derive(Clone, Debug)]
pub struct ThermalSystem {
    energies: Vec<f64>,
    amplitudes: Vec<C64>,
    hbar: f64,
    space: CompositeSpace,
}

impl ThermalSystem {
    pub fn new(energies: Vec<f64>, amplitudes: Vec<C64>, hbar: f64) -> Result<Self> {
        if energies.len() != amplitudes.len() {
            return Err(Error::DimensionMismatch { expected: energies.len(), found: amplitudes.len() });
        }
        if !(hbar > 0.0) {
            return Err(Error::domain("hbar must be positive"));
        }
        let space = CompositeSpace::single(energies.len())?;
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0) {
            return Err(Error::domain("amplitudes vanish"));
        }
        let amplitudes = amplitudes.into_iter().map(|a| a / norm).collect();
        let sys = ThermalSystem { energies, amplitudes, hbar, space };
        if sys.min_gap() <= DEGENERACY_TOL * sys.max_abs_energy() {
            return Err(Error::domain("spectrum is degenerate"));
        }
        Ok(sys)
    }

    /// Levels `k·spacing` jittered by up to ±0.2 spacing, equal-magnitude
    /// amplitudes with random phases.
    pub fn random<R: rand::Rng + ?Sized>(rng: &mut R, levels: usize, spacing: f64, hbar: f64) -> Result<Self> {
        if levels < 2 || !(spacing > 0.0) {
            return Err(Error::domain("need at least two levels and a positive spacing"));
        }
        let energies: Vec<f64> =
            (0..levels).map(|k| (k as f64 + rng.random_range(-0.2..0.2)) * spacing).collect();
        let amplitudes: Vec<C64> = (0..levels)
            .map(|_| C64::from_polar(1.0, rng.random_range(0.0..std::f64::consts::TAU)))
            .collect();
        Self::new(energies, amplitudes, hbar)
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn space(&self) -> &CompositeSpace {
        &self.space
    }

    fn max_abs_energy(&self) -> f64 {
        self.energies.iter().fold(0.0f64, |m, e| m.max(e.abs()))
    }

    fn gaps(&self) -> impl Iterator<Item = f64> + '_ {
        let e = &self.energies;
        (0..e.len()).flat_map(move |i| (i + 1..e.len()).map(move |j| (e[i] - e[j]).abs()))
    }

    pub fn min_gap(&self) -> f64 {
        self.gaps().fold(f64::INFINITY, f64::min)
    }

    pub fn max_gap(&self) -> f64 {
        self.gaps().fold(0.0, f64::max)
    }

    /// Diagonal spectral decomposition of the energy-basis Hamiltonian.
    pub fn spectrum(&self) -> SpectralDecomposition {
        let d = self.energies.len();
        let h = CMatrix::from_fn(d, d, |i, j| if i == j { C64::new(self.energies[i], 0.0) } else { C64::new(0.0, 0.0) });
        hermitian_eigen(&h)
    }

    pub fn state_at(&self, t: f64) -> StateVector {
        let amps = CVector::from_iterator(
            self.energies.len(),
            self.energies.iter().zip(&self.amplitudes).map(|(&e, &a)| a * C64::from_polar(1.0, -e * t / self.hbar)),
        );
        StateVector::from_parts_unchecked(self.space.clone(), amps, t)
    }

    pub fn density_at(&self, t: f64) -> DensityMatrix {
        DensityMatrix::from_pure(&self.state_at(t), "energy")
    }

    /// Trapezoid average over `[0, window]` with at least `points_per_period`
    /// samples per period of the fastest Bohr frequency.
    pub fn time_average(&self, window: f64, points_per_period: usize) -> Result<DensityMatrix> {
        if !(window > 0.0) || points_per_period < 2 {
            return Err(Error::domain("window must be positive and sampling at least two points per period"));
        }
        let period = std::f64::consts::TAU * self.hbar / self.max_gap();
        let n = ((window / period) * points_per_period as f64).ceil() as usize + 1;
        let mut avg = TimeAverager::new(self.space.clone(), "energy");
        for t in linspace(0.0, window, n.max(2)) {
            avg.push_density(t, &self.density_at(t))?;
        }
        avg.average()
    }

    /// Averages over `[0, T]` for every `T` in `windows` (ascending) from a
    /// single pass along the trajectory.
    pub fn window_sweep(&self, windows: &[f64], points_per_period: usize) -> Result<Vec<DensityMatrix>> {
        if windows.is_empty() || !(windows[0] > 0.0) || windows.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::domain("windows must be positive and strictly ascending"));
        }
        if points_per_period < 2 {
            return Err(Error::domain("need at least two points per period"));
        }
        let max_step = std::f64::consts::TAU * self.hbar / self.max_gap() / points_per_period as f64;
        let mut avg = TimeAverager::new(self.space.clone(), "energy");
        avg.push_density(0.0, &self.density_at(0.0))?;
        let mut t_prev = 0.0;
        let mut out = Vec::with_capacity(windows.len());
        for &w in windows {
            let n = ((w - t_prev) / max_step).ceil().max(1.0) as usize;
            for k in 1..=n {
                let t = if k == n { w } else { t_prev + (w - t_prev) * k as f64 / n as f64 };
                avg.push_density(t, &self.density_at(t))?;
            }
            t_prev = w;
            out.push(avg.average()?);
        }
        Ok(out)
    }

    /// `(1/T)∫ρ dt` in closed form.
    pub fn exact_average(&self, window: f64) -> DensityMatrix {
        let d = self.energies.len();
        let m = CMatrix::from_fn(d, d, |i, j| {
            let w = (self.energies[i] - self.energies[j]) / self.hbar;
            self.amplitudes[i] * self.amplitudes[j].conj() * crate::quadrature::window_average_of_phase(w, window)
        });
        DensityMatrix::from_parts_unchecked(self.space.clone(), m, "energy".to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn qubit(entries: [[f64; 2]; 2]) -> DensityMatrix {
        let m = CMatrix::from_fn(2, 2, |i, j| C64::new(entries[i][j], 0.0));
        DensityMatrix::new(CompositeSpace::single(2).unwrap(), m, "computational").unwrap()
    }

    #[test]
    fn report_examples() {
        let r = coherence_report(&qubit([[1.0, 0.0], [0.0, 0.0]]), 1.0);
        assert_abs_diff_eq!(r.purity, 1.0);
        assert_abs_diff_eq!(r.entropy, 0.0, epsilon = 1e-12);
        assert_eq!(r.offdiag_l1, 0.0);

        let r = coherence_report(&DensityMatrix::maximally_mixed(CompositeSpace::single(4).unwrap()), 1.0);
        assert_abs_diff_eq!(r.purity, 0.25, epsilon = 1e-14);
        assert_abs_diff_eq!(r.entropy, 4f64.ln(), epsilon = 1e-12);

        let r = coherence_report(&qubit([[0.5, 0.5], [0.5, 0.5]]), 1.0);
        assert_abs_diff_eq!(r.offdiag_l1, 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(r.purity, 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(r.entropy, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn validation_rejects_bad_matrices() {
        let s = CompositeSpace::single(2).unwrap();
        let m = |a: f64, b: f64, c: f64| CMatrix::from_row_slice(2, 2, &[C64::new(a, 0.0), C64::new(b, 0.0), C64::new(c, 0.0), C64::new(1.0 - a, 0.0)]);
        assert!(DensityMatrix::new(s.clone(), m(0.5, 0.2, 0.1), "x").is_err());
        assert!(DensityMatrix::new(s.clone(), m(1.5, 0.0, 0.0), "x").is_err());
        assert!(DensityMatrix::new(s, m(0.5, 0.6, 0.6), "x").is_err());
    }

    #[test]
    fn stationary_average_is_exact() {
        let rho = qubit([[0.7, 0.1], [0.1, 0.3]]);
        let times = [0.0, 0.4, 1.3];
        let avg = time_average_density(&times, &[rho.clone(), rho.clone(), rho.clone()]).unwrap();
        assert_abs_diff_eq!((avg.entries() - rho.entries()).norm(), 0.0, epsilon = 1e-15);
        assert!(time_average_density(&[], &[]).is_err());
        assert!(time_average_density(&[0.0], &[rho]).is_err());
    }

    #[test]
    fn microcanonical_examples() {
        let sys = ThermalSystem::new(vec![0.0, 1.0, 2.5], vec![C64::new(1.0, 0.0); 3], 1.0).unwrap();
        let basis = sys.spectrum();
        let pure = DensityMatrix::from_pure(&StateVector::basis(sys.space().clone(), 0).unwrap(), "energy");
        assert_abs_diff_eq!(microcanonical_compare(&pure, (-0.5, 1.5), &basis).unwrap(), 0.5, epsilon = 1e-12);
        let mc = microcanonical_state(sys.space(), (-0.5, 1.5), &basis).unwrap();
        assert_abs_diff_eq!(microcanonical_compare(&mc, (-0.5, 1.5), &basis).unwrap(), 0.0, epsilon = 1e-14);
        assert!(microcanonical_compare(&pure, (10.0, 11.0), &basis).is_err());
    }

    #[test]
    fn degenerate_blocks_survive_dephasing() {
        let groups = degeneracy_groups(&[0.0, 1.0, 1.0 + 1e-12, 2.0]);
        assert_eq!(groups, vec![vec![0], vec![1, 2], vec![3]]);
    }

    #[test]
    fn fit_recovers_exact_inverse() {
        let ts = [1.0, 10.0, 100.0, 1000.0];
        let ys: Vec<f64> = ts.iter().map(|t| 3.0 / t).collect();
        let fit = fit_inverse_t(&ts, &ys).unwrap();
        assert_abs_diff_eq!(fit.c, 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(fit.r_squared, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(fit.free_slope, -1.0, epsilon = 1e-12);
    }
}
