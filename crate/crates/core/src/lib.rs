//! Preisach hysteresis operator with an exact staircase memory interface,
//! remnant (zero-input output) control by triangular pulse trains, sector
//! bounds for the remnant response, and a brute-force relay lattice used as
//! a correctness oracle.
//!
//! The memory state is a [`MemoryInterface`]: a finite staircase of corners
//! starting on the diagonal `alpha = beta`. Relays below the staircase are in
//! the `+1` state, relays above it in the `-1` state. Outputs are computed by
//! integrating a [`WeightingField`] over the two regions.

pub mod error;
pub mod interface;
pub mod oracle;
pub mod plane;
pub mod remnant;
pub mod weighting;

pub use error::{Error, Result};
pub use interface::{Ell, MemoryInterface, MERGE_TOL};
pub use oracle::{oracle_simulate, OracleComparison, RelayGrid};
pub use plane::{PlanePoint, RelaySign, SupportBox};
pub use remnant::controller::{
    dead_zone_start, run_controller, ControlStatus, ControlTrace, ControllerConfig, PulseRecord, SignalRecord,
};
pub use remnant::pulse::{
    drive_pulse, half_period_samples, pulse_value, render_signal, triangle_sample, PulsePlan, SignalSample,
};
pub use remnant::{
    apply_pulse, dead_zone, delta_remnant_explicit, max_gain, remnant, remnant_extrema,
    repair_initial_interface, validate_initial_interface, GainMode,
};
pub use weighting::bounds::{sector_bounds, QRegion, SectorBounds, DEFAULT_RESOLUTION};
pub use weighting::butterfly::{make_butterfly, ButterflySpec};
pub use weighting::{
    evaluate_output, integrate_staircase_region, GaussianComponent, GaussianMixture, GridField, Side,
    WeightingField,
};
