//! Decoherence of subsystems through accumulated interaction phases.
//!
//! The crate evolves a system coupled to an environment both exactly and in
//! a branch picture where each unperturbed branch only collects a phase
//! `e^{-iΛ(t)/ħ}`, then measures how time averaging and stationary phase
//! strip the reduced density matrix of its coherences.
//!
//! * [`hilbert`]: tensor-product spaces with states and operators on them.
//! * [`dynamics`]: exact and branch-phase propagation.
//! * [`averaging`]: time-averaged density matrices and their coherence metrics.
//! * [`twostate`]: the monitored two-level system.
//! * [`localization`]: a ring-lattice particle watched by two-level probes.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod averaging;
pub mod dynamics;
pub mod error;
pub mod hilbert;
pub mod localization;
pub mod quadrature;
pub mod random;
pub mod twostate;

pub use averaging::{coherence_report, CoherenceReport, DensityMatrix, TimeAverager};
pub use dynamics::{BranchState, HamiltonianSplit, Propagator};
pub use error::{Error, Result};
pub use hilbert::{CMatrix, CVector, CompositeSpace, OperatorMatrix, SpectralDecomposition, StateVector};
pub use localization::{LatticeModel, LocalizationReport, Monitor, Resolution};
pub use num_complex::Complex64;
pub use twostate::{Monitoring, PointerPair, ThetaBranch, TwoStateModel};
