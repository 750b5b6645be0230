//! Spectrally pure photon-pair design for periodically poled KTP-family
//! crystals.
//!
//! The pipeline runs from Sellmeier dispersion ([`registry`], [`dispersion`])
//! through group-velocity matching and quasi-phase-matching periods ([`gvm`]),
//! joint spectral amplitudes ([`jsa`]), Schmidt purity and pump optimization
//! ([`schmidt`], [`tuning`]) to Hong-Ou-Mandel interference ([`hom`]).
//!
//! Wavelengths are vacuum wavelengths. The dispersion layer works in μm,
//! user-facing structs carry nm, frequencies are angular (rad/s) and
//! wavenumbers are rad/μm.

// Validation is written as `!(x > 0.0)` so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dispersion;
pub mod error;
pub mod export;
pub mod gvm;
pub mod hom;
pub mod jsa;
pub mod numeric;
pub mod registry;
pub mod reproduce;
pub mod schmidt;
pub mod tuning;
pub mod units;

pub use error::{Error, Result};
pub use gvm::{GvmCondition, GvmSolution, PolingPeriod, ProcessConvention};
pub use hom::{Herald, HomTrace};
pub use jsa::{FrequencyGrid, JointAmplitude, PhaseMatchSpec, PumpSpec};
pub use registry::{Axis, CrystalRecord, Registry, SellmeierForm};
pub use schmidt::SchmidtResult;
pub use tuning::{BandwidthOptimum, PumpPolicy, PurityScanRow};
