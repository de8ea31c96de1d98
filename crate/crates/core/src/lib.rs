//! Steady-state propagation of a probe beam through a cold ensemble of
//! strongly interacting Rydberg atoms under electromagnetically induced
//! transparency.
//!
//! The medium is coarse-grained into superatoms: blockade spheres that hold
//! at most one shared Rydberg excitation. A blockaded sphere responds to the
//! probe as an absorbing two-level system, an unblockaded one shows the
//! usual EIT response, and the excitation probability of each sphere follows
//! the local probe intensity weighted by its two-photon correlation. The
//! probe intensity and the correlation therefore evolve as a coupled pair
//! along the propagation axis, integrated either by Monte-Carlo sampling of
//! the blockade state per sphere (with averaging over realizations) or with
//! the probability-weighted polarizability directly.
//!
//! Units: angular frequencies in rad/s throughout, lengths in μm, densities
//! in μm⁻³.

// `!(x > 0)`-style guards double as NaN rejection.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod experiment;
pub mod medium;
pub mod physics;
pub mod propagation;

pub use experiment::{
    derived_quantities, extract_line, run_sweep, DerivedQuantities, ExperimentError,
    LineObservables, PointStats, SpectrumResult, SweepPoint, SweepSpec,
};
pub use medium::{GridCell, MediumError, MediumProfile, ProfileKind, SuperatomGrid};
pub use physics::{
    alpha_conditional, alpha_eit, alpha_tla, sigma_rr, AtomicSystem, DetuningPoint, PhysicsError,
    Polarizability,
};
pub use propagation::{
    propagate, realization_rng, run_realizations, run_realizations_in_stream, CellRecord,
    FieldState, G2Weight, PropagationConfig, PropagationError, PropagationMode, PropagationTrace,
    RealizationStats,
};
