//! Polarization correlations of photon pairs emitted by a quantum-dot
//! biexciton cascade.
//!
//! The pipeline runs in four stages:
//!
//! 1. [`qdmodel`] turns physical inputs into phonon rates and a Lindblad
//!    generator for the four-level dot.
//! 2. [`dynamics`] propagates operators under that generator and evaluates the
//!    two-time biexciton/exciton photon correlator through the quantum
//!    regression theorem.
//! 3. [`pairstate`] gate-integrates the correlator into the measured
//!    two-photon polarization state and mixes in the distinguishable part and
//!    background noise.
//! 4. [`correlations`] computes mutual information, classical correlation
//!    (optimized over projective measurements on the exciton photon), discord
//!    and concurrence.
//!
//! [`critical`] sits on top and locates the correlation sudden-change
//! temperature and the entanglement sudden-death temperature.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod correlations;
pub mod critical;
pub mod dynamics;
mod error;
pub mod linalg;
mod optimize;
pub mod pairstate;
pub mod qdmodel;
mod quadrature;

pub use correlations::{
    concurrence_witness,
    classical_correlation, concurrence, mutual_information, quantum_discord,
    von_neumann_entropy, CorrelationReport, MeasurementDirection,
};
pub use critical::{
    calibrate_kappa, critical_vs, evaluate, find_esd_t, find_sudden_change_t, sweep, Axis, Calibration,
    CriticalKind, CriticalPoint, CriticalRow, Detector, KinkCheck, SweepRow, SweepTable,
};
pub use dynamics::{pair_correlator, propagate, ConditionalOperator, DensityMatrix, PairCorrelator};
pub use error::{Error, Result};
pub use pairstate::{mix_state, polarization_state, rho1_gated, rho2_dephased, TwoPhotonState};
pub use qdmodel::{
    bose_occupation, build_liouvillian, phonon_rates, DotParams, Liouvillian, PhononRates,
    PhysConstants, CONSTANTS,
};
