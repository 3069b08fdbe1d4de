//! Distillability of bipartite Gaussian states, decided and constructed at
//! the level of correlation matrices.
//!
//! A Gaussian state of N×M modes is distillable exactly when its partial
//! transpose is not positive. Besides deciding that, the crate builds the
//! local operations that make it constructive:
//!
//! 1. [`protocol::find_npt_witness`] and [`protocol::concentrate`] move the
//!    partial-transpose violation onto one mode per side with local
//!    symplectic maps and discard the rest;
//! 2. [`two_mode::standard_form_transform`] brings the 1×1 state to standard
//!    form;
//! 3. [`protocol::symmetrize`] equalizes both sides with a vacuum ancilla, a
//!    beam splitter and a homodyne measurement;
//! 4. [`two_mode::rc_value`] certifies the result with the reduction
//!    criterion against a two-mode squeezed probe.
//!
//! [`protocol::distill_pipeline`] runs all of it and checks every stage.

pub mod error;
pub mod fuzz;
pub mod gaussian;
pub mod io;
mod linalg;
pub mod protocol;
pub mod random;
pub mod symplectic;
pub mod two_mode;

pub use error::{Error, Result, Stage};
pub use gaussian::{
    condition_on_x_measurement, is_npt, partial_transpose, reduce_to_modes, validate_physical,
    wigner_cm, CorrelationMatrix, GaussianState, NptVerdict, PhysicalityVerdict, DEFAULT_TOL,
};
pub use linalg::rows;
pub use protocol::{
    concentrate, distill_pipeline, find_npt_witness, symmetrize, PipelineOptions, PipelineReport,
    Verdict,
};
pub use symplectic::{
    extend_to_symplectic_basis, is_symplectic, make_form, random_symplectic,
    symplectic_eigenvalues, SymplecticBasis, SymplecticForm, SymplecticMatrix,
};
pub use two_mode::{
    check_inseparable, check_physical, check_symmetric_inseparable, is_symmetric, rc_value,
    standard_form_params, standard_form_transform, tmss_cm, RcWitnessResult, StdFormParams,
    WignerParams,
};
