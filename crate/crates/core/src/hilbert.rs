//! Dense linear algebra on composite Hilbert spaces.
//!
//! Index convention: for a space with subsystem dimensions `[d0, d1, ...]`
//! the flat basis index is row-major, so the first-listed subsystem varies
//! slowest (`i = i0 * d1 * d2 * ... + i1 * d2 * ... + ...`). Every Kronecker
//! product in the crate follows this convention.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64 as C64;

use crate::averaging::DensityMatrix;
use crate::error::{Error, Result};

pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

/// Largest total dimension any space may have.
pub const MAX_TOTAL_DIM: usize = 4096;

/// Normalization tolerance for state vectors.
pub const NORM_TOL: f64 = 1e-10;

/// Hermiticity tolerance for operators flagged as Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Ordered list of subsystem dimensions.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CompositeSpace {
    dims: Vec<usize>,
}

impl CompositeSpace {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if let Some(pos) = dims.iter().position(|&d| d == 0) {
            return Err(Error::domain(format!("subsystem {pos} has dimension 0")));
        }
        let mut total: usize = 1;
        for &d in &dims {
            total = total.saturating_mul(d);
        }
        if total > MAX_TOTAL_DIM {
            return Err(Error::DimensionCap { total, cap: MAX_TOTAL_DIM });
        }
        Ok(CompositeSpace { dims })
    }

    /// A space with one subsystem.
    pub fn single(dim: usize) -> Result<Self> {
        Self::new(vec![dim])
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn n_subsystems(&self) -> usize {
        self.dims.len()
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().product()
    }

    /// `self ⊗ other`.
    pub fn join(&self, other: &CompositeSpace) -> Result<Self> {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        Self::new(dims)
    }

    /// Product of the dimensions of the subsystems in `range`.
    pub fn dim_of(&self, range: std::ops::Range<usize>) -> usize {
        self.dims[range].iter().product()
    }

    fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1; self.dims.len()];
        for k in (0..self.dims.len().saturating_sub(1)).rev() {
            strides[k] = strides[k + 1] * self.dims[k + 1];
        }
        strides
    }

    fn check_same(&self, other: &CompositeSpace) -> Result<()> {
        if self != other {
            return Err(Error::DimensionMismatch {
                expected: self.total_dim(),
                found: other.total_dim(),
            });
        }
        Ok(())
    }
}

/// Normalized state on a composite space, stamped with its simulation time.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    space: CompositeSpace,
    amplitudes: CVector,
    time: f64,
}

impl StateVector {
    /// Validates length and unit norm.
    pub fn new(space: CompositeSpace, amplitudes: CVector, time: f64) -> Result<Self> {
        if amplitudes.len() != space.total_dim() {
            return Err(Error::DimensionMismatch {
                expected: space.total_dim(),
                found: amplitudes.len(),
            });
        }
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::domain(format!("state norm {norm} differs from 1")));
        }
        Ok(StateVector { space, amplitudes, time })
    }

    /// Rescales `amplitudes` to unit norm.
    pub fn normalized(space: CompositeSpace, amplitudes: CVector, time: f64) -> Result<Self> {
        let norm = amplitudes.norm();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::domain("cannot normalize a zero or non-finite vector"));
        }
        Self::new(space, amplitudes / C64::new(norm, 0.0), time)
    }

    pub fn basis(space: CompositeSpace, index: usize) -> Result<Self> {
        let n = space.total_dim();
        if index >= n {
            return Err(Error::domain(format!("basis index {index} out of range 0..{n}")));
        }
        let mut amps = CVector::zeros(n);
        amps[index] = C64::new(1.0, 0.0);
        Ok(StateVector { space, amplitudes: amps, time: 0.0 })
    }

    pub fn from_real(space: CompositeSpace, amplitudes: &[f64]) -> Result<Self> {
        let amps = CVector::from_iterator(amplitudes.len(), amplitudes.iter().map(|&a| C64::new(a, 0.0)));
        Self::normalized(space, amps, 0.0)
    }

    pub(crate) fn from_parts_unchecked(space: CompositeSpace, amplitudes: CVector, time: f64) -> Self {
        StateVector { space, amplitudes, time }
    }

    pub fn space(&self) -> &CompositeSpace {
        &self.space
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn with_time(mut self, time: f64) -> Self {
        self.time = time;
        self
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Result<C64> {
        self.space.check_same(&other.space)?;
        Ok(self.amplitudes.dotc(&other.amplitudes))
    }

    /// Multiplies by `e^{iφ}`.
    pub fn with_global_phase(mut self, phi: f64) -> Self {
        let p = C64::from_polar(1.0, phi);
        self.amplitudes.iter_mut().for_each(|a| *a *= p);
        self
    }

    /// `|self⟩ ⊗ |other⟩`.
    pub fn tensor(&self, other: &StateVector) -> Result<StateVector> {
        let space = self.space.join(&other.space)?;
        let amps = self.amplitudes.kronecker(&other.amplitudes);
        Ok(StateVector { space, amplitudes: amps, time: self.time })
    }
}

/// Square operator on a composite space.
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorMatrix {
    space: CompositeSpace,
    entries: CMatrix,
    hermitian: bool,
}

impl OperatorMatrix {
    pub fn new(space: CompositeSpace, entries: CMatrix) -> Result<Self> {
        let n = space.total_dim();
        if entries.nrows() != n || entries.ncols() != n {
            return Err(Error::DimensionMismatch { expected: n, found: entries.nrows() });
        }
        Ok(OperatorMatrix { space, entries, hermitian: false })
    }

    /// Validates and sets the Hermitian flag.
    pub fn hermitian(space: CompositeSpace, entries: CMatrix) -> Result<Self> {
        let op = Self::new(space, entries)?;
        let dev = op.hermiticity_deviation();
        if dev >= HERMITIAN_TOL {
            return Err(Error::domain(format!("operator is not Hermitian (max |A - A†| = {dev:.3e})")));
        }
        Ok(OperatorMatrix { hermitian: true, ..op })
    }

    /// Real diagonal operator, always Hermitian.
    pub fn diagonal(space: CompositeSpace, diag: &[f64]) -> Result<Self> {
        let n = space.total_dim();
        if diag.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: diag.len() });
        }
        let entries = CMatrix::from_diagonal(&CVector::from_iterator(n, diag.iter().map(|&d| C64::new(d, 0.0))));
        Ok(OperatorMatrix { space, entries, hermitian: true })
    }

    pub fn identity(space: CompositeSpace) -> Self {
        let n = space.total_dim();
        OperatorMatrix { space, entries: CMatrix::identity(n, n), hermitian: true }
    }

    pub fn zeros(space: CompositeSpace) -> Self {
        let n = space.total_dim();
        OperatorMatrix { space, entries: CMatrix::zeros(n, n), hermitian: true }
    }

    pub fn pauli_x() -> Self {
        Self::qubit([[0.0, 1.0], [1.0, 0.0]].map(|r| r.map(|x| C64::new(x, 0.0))))
    }

    pub fn pauli_y() -> Self {
        let i = C64::new(0.0, 1.0);
        let z = C64::new(0.0, 0.0);
        Self::qubit([[z, -i], [i, z]])
    }

    pub fn pauli_z() -> Self {
        Self::qubit([[1.0, 0.0], [0.0, -1.0]].map(|r| r.map(|x| C64::new(x, 0.0))))
    }

    fn qubit(m: [[C64; 2]; 2]) -> Self {
        let entries = CMatrix::from_fn(2, 2, |i, j| m[i][j]);
        OperatorMatrix {
            space: CompositeSpace { dims: vec![2] },
            entries,
            hermitian: true,
        }
    }

    pub fn space(&self) -> &CompositeSpace {
        &self.space
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    /// `max |A - A†|`.
    pub fn hermiticity_deviation(&self) -> f64 {
        let n = self.dim();
        let mut dev: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                dev = dev.max((self.entries[(i, j)] - self.entries[(j, i)].conj()).norm());
            }
        }
        dev
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.entries.iter().fold(0.0, |m, z| m.max(z.norm()))
    }

    /// Maximum absolute row sum; bounds the spectral radius.
    pub fn inf_norm(&self) -> f64 {
        self.entries
            .row_iter()
            .map(|r| r.iter().map(|z| z.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Sum of two operators on the same space; Hermitian if both are.
    pub fn add(&self, other: &OperatorMatrix) -> Result<OperatorMatrix> {
        self.space.check_same(&other.space)?;
        Ok(OperatorMatrix {
            space: self.space.clone(),
            entries: &self.entries + &other.entries,
            hermitian: self.hermitian && other.hermitian,
        })
    }

    pub fn scale(&self, s: f64) -> OperatorMatrix {
        OperatorMatrix {
            space: self.space.clone(),
            entries: &self.entries * C64::new(s, 0.0),
            hermitian: self.hermitian,
        }
    }

    /// `A |ψ⟩` as a raw vector.
    pub fn apply(&self, psi: &StateVector) -> Result<CVector> {
        self.space.check_same(&psi.space)?;
        Ok(&self.entries * &psi.amplitudes)
    }

    /// Embeds an operator on the consecutive subsystems starting at `first`
    /// into `space`, padding with identities.
    pub fn embed(&self, space: &CompositeSpace, first: usize) -> Result<OperatorMatrix> {
        let k = self.space.n_subsystems();
        if first + k > space.n_subsystems() || space.dims()[first..first + k] != *self.space.dims() {
            return Err(Error::domain(format!(
                "cannot embed operator on {:?} at subsystem {first} of {:?}",
                self.space.dims(),
                space.dims()
            )));
        }
        let left = space.dim_of(0..first);
        let right = space.dim_of(first + k..space.n_subsystems());
        let entries = CMatrix::identity(left, left)
            .kronecker(&self.entries)
            .kronecker(&CMatrix::identity(right, right));
        Ok(OperatorMatrix { space: space.clone(), entries, hermitian: self.hermitian })
    }
}

/// Eigen-decomposition `H = U diag(λ) U†` of a Hermitian operator.
#[derive(Clone, Debug)]
pub struct SpectralDecomposition {
    eigenvalues: Vec<f64>,
    eigenvectors: CMatrix,
}

impl SpectralDecomposition {
    /// Ascending eigenvalues.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Unitary whose columns are the eigenvectors, in eigenvalue order.
    pub fn eigenvectors(&self) -> &CMatrix {
        &self.eigenvectors
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn reconstruct(&self) -> CMatrix {
        let d = CVector::from_iterator(self.dim(), self.eigenvalues.iter().map(|&l| C64::new(l, 0.0)));
        &self.eigenvectors * CMatrix::from_diagonal(&d) * self.eigenvectors.adjoint()
    }

    /// Column `k` as a vector.
    pub fn eigenvector(&self, k: usize) -> CVector {
        self.eigenvectors.column(k).into_owned()
    }

    /// Applies `f(H)` to a vector: `U f(λ) U† v`.
    pub fn apply_fn(&self, v: &CVector, f: impl Fn(f64) -> C64) -> CVector {
        let mut coeffs = self.eigenvectors.ad_mul(v);
        for (c, &l) in coeffs.iter_mut().zip(&self.eigenvalues) {
            *c *= f(l);
        }
        &self.eigenvectors * coeffs
    }

    /// `f(H)` as a matrix.
    pub fn matrix_fn(&self, f: impl Fn(f64) -> C64) -> CMatrix {
        let d = CVector::from_iterator(self.dim(), self.eigenvalues.iter().map(|&l| f(l)));
        &self.eigenvectors * CMatrix::from_diagonal(&d) * self.eigenvectors.adjoint()
    }
}

/// `A ⊗ B` with A's indices slowest.
pub fn tensor_product(a: &OperatorMatrix, b: &OperatorMatrix) -> Result<OperatorMatrix> {
    let space = a.space.join(&b.space)?;
    Ok(OperatorMatrix {
        space,
        entries: a.entries.kronecker(&b.entries),
        hermitian: a.hermitian && b.hermitian,
    })
}

fn subsystem_offsets(subsystems: &[usize], dims: &[usize], strides: &[usize]) -> Vec<usize> {
    let mut offsets = vec![0usize];
    for &s in subsystems {
        let mut next = Vec::with_capacity(offsets.len() * dims[s]);
        for &o in &offsets {
            for digit in 0..dims[s] {
                next.push(o + digit * strides[s]);
            }
        }
        offsets = next;
    }
    offsets
}

/// Partial trace of an arbitrary square matrix. Kept subsystems retain their
/// original relative order; an empty `keep` returns the 1×1 full trace.
pub fn partial_trace_matrix(
    space: &CompositeSpace,
    m: &CMatrix,
    keep: &[usize],
) -> Result<(CompositeSpace, CMatrix)> {
    let n = space.n_subsystems();
    let mut kept = keep.to_vec();
    kept.sort_unstable();
    if kept.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::domain("duplicate subsystem index in partial trace"));
    }
    if let Some(&bad) = kept.iter().find(|&&k| k >= n) {
        return Err(Error::domain(format!("subsystem index {bad} out of range 0..{n}")));
    }
    if m.nrows() != space.total_dim() || m.ncols() != space.total_dim() {
        return Err(Error::DimensionMismatch { expected: space.total_dim(), found: m.nrows() });
    }
    let traced: Vec<usize> = (0..n).filter(|i| kept.binary_search(i).is_err()).collect();
    let strides = space.strides();
    let kept_off = subsystem_offsets(&kept, space.dims(), &strides);
    let traced_off = subsystem_offsets(&traced, space.dims(), &strides);

    let dk = kept_off.len();
    let mut out = CMatrix::zeros(dk, dk);
    for (a, &ra) in kept_off.iter().enumerate() {
        for (b, &rb) in kept_off.iter().enumerate() {
            let mut acc = C64::new(0.0, 0.0);
            for &e in &traced_off {
                acc += m[(ra + e, rb + e)];
            }
            out[(a, b)] = acc;
        }
    }
    let kept_space = CompositeSpace::new(kept.iter().map(|&k| space.dims()[k]).collect())?;
    Ok((kept_space, out))
}

/// Reduced density matrix on the subsystems in `keep`.
pub fn partial_trace(rho: &DensityMatrix, keep: &[usize]) -> Result<DensityMatrix> {
    let (space, entries) = partial_trace_matrix(rho.space(), rho.entries(), keep)?;
    Ok(DensityMatrix::from_parts_unchecked(space, entries, rho.basis_label().to_string()))
}

/// `⟨ψ|A|ψ⟩`.
pub fn expectation(op: &OperatorMatrix, psi: &StateVector) -> Result<C64> {
    op.space.check_same(&psi.space)?;
    Ok(psi.amplitudes.dotc(&(&op.entries * &psi.amplitudes)))
}

/// Eigen-decomposition with ascending eigenvalues.
pub fn spectral_decompose(h: &OperatorMatrix) -> Result<SpectralDecomposition> {
    if !h.hermitian {
        return Err(Error::domain("spectral decomposition requires a Hermitian operator"));
    }
    let dev = h.hermiticity_deviation();
    if dev >= HERMITIAN_TOL * h.max_abs().max(1.0) {
        return Err(Error::domain(format!("operator flagged Hermitian deviates by {dev:.3e}")));
    }
    Ok(hermitian_eigen(&h.entries))
}

pub(crate) fn hermitian_eigen(m: &CMatrix) -> SpectralDecomposition {
    let eig = SymmetricEigen::new(m.clone());
    let n = eig.eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let eigenvalues = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let eigenvectors = CMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    SpectralDecomposition { eigenvalues, eigenvectors }
}

/// `max |(AB - BA)_{ij}|`.
pub fn commutator_norm(a: &OperatorMatrix, b: &OperatorMatrix) -> Result<f64> {
    a.space.check_same(&b.space)?;
    let c = &a.entries * &b.entries - &b.entries * &a.entries;
    Ok(c.iter().fold(0.0, |m, z| m.max(z.norm())))
}
