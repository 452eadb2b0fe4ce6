//! Two-level atom in a rotating ring cavity: a two-mode Jaynes-Cummings model
//! whose counter-propagating modes are split by rotation.
//!
//! The driven-dissipative steady state is computed two ways: by solving the
//! Lindblad master equation in a truncated Fock space ([`liouville`]) and from
//! a closed set of first-order moment equations with closed-form solutions
//! ([`moments`]). [`analysis`] builds the drive-detuning spectra and the
//! rotation sensitivity of the side peaks on top of both.

pub mod analysis;
pub mod error;
pub mod field;
pub mod hilbert;
pub mod model;
pub mod moments;
pub mod liouville;
pub mod spectrum;

pub use error::{Error, Result};
pub use hilbert::{HilbertConfig, OperatorMatrix, StateVector, C64};
pub use model::PhysicalParams;
pub use analysis::{Method, Mode, Path, Peak, SweepOptions, SweepResult};
pub use field::{DipoleConfig, RingGeometry, Units};
pub use hilbert::{CompositeOps, SigmaYConvention};
pub use liouville::{DensityMatrix, Superoperator};
pub use moments::MomentSolution;
pub use spectrum::EigenTriple;
