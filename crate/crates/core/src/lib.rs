//! Design and simulation of 4x4 Butler-matrix beamforming networks.
//!
//! The crate is organised bottom-up:
//!
//! * [`microstrip`] synthesizes line widths and lengths on a substrate.
//! * [`components`] produces scattering-matrix models of hybrids, crossovers,
//!   phase shifters and transmission lines.
//! * [`network`] interconnects multiport devices and assembles the Butler matrix.
//! * [`antenna`] sizes the inset-fed rectangular patch.
//! * [`array`] predicts beam directions and far-field cuts.
//! * [`touchstone`] and [`report`] handle persistence and reproducible reports.

pub mod antenna;
pub mod array;
pub mod components;
pub mod error;
pub mod microstrip;
pub mod network;
pub mod report;
pub mod smatrix;
pub mod touchstone;

mod fmt;

pub use antenna::{design_patch, element_pattern, inset_position, ElementModel, PatchDims};
pub use array::{
    array_factor, beam_angle, inter_element_phase, pattern_metrics, ArrayGeometry, PatternCut,
    PatternMetrics,
};
pub use components::{DeviceKind, DeviceModel, DeviceRole, Fidelity};
pub use error::{Error, Result};
pub use microstrip::{MicrostripLineSpec, Substrate};
pub use network::{
    build_butler_4x4, excite, interconnect, sweep, ExcitationResult, Netlist, PortRef,
};
pub use smatrix::ScatteringMatrix;

pub use num_complex::Complex64;

/// Speed of light in vacuum (m/s).
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Reference impedance used by every model in the crate (ohms).
pub const Z_REF: f64 = 50.0;

/// Free-space wavelength at `frequency` (Hz).
pub fn free_space_wavelength(frequency: f64) -> f64 {
    SPEED_OF_LIGHT / frequency
}
