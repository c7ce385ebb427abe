//! Numerical engine for conditional quantum-state engineering at two-mode
//! optical couplers.
//!
//! The crate works in a truncated Fock basis. It builds the unitary
//! transformation of a parametric amplifier (U(1,1)) or a frequency
//! converter (U(2)), the non-unitary operators obtained by conditioning on
//! an idler measurement, the repeated displaced photon-adding protocol for
//! synthesizing finite Fock superpositions, and the lossy feedback-loop
//! recursion used to prepare Fock states.
//!
//! Cutoffs are always explicit. Operations that can lose probability past
//! the cutoff report the lost tail mass.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod conditional;
pub mod couplers;
pub mod error;
pub mod feedback;
pub mod fock;
pub mod linalg;
pub mod multiport;
pub mod sorder;
pub mod synthesis;

pub use error::{Error, Result};

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;
/// Dense complex matrix.
pub type CMatrix = nalgebra::DMatrix<C64>;
/// Dense complex column vector.
pub type CVector = nalgebra::DVector<C64>;

pub use conditional::{ConditionalOperator, PolynomialState};
pub use couplers::{CouplerAngles, CouplerKind, CouplerParams};
pub use feedback::{FeedbackConfig, ScheduleRule, TraceRecord};
pub use fock::{DensityDiagonal, FockVector, OperatorMatrix, TwoModeOperator};
pub use multiport::{HermitianCoupling, ModePartition};
pub use sorder::NormalPoly;
pub use synthesis::SynthesisPlan;
