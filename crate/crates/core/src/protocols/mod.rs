//! End-to-end simulations built on the model and dynamics layers.

mod entangle;
mod hotbath;
mod protect;
mod symmetric;

pub use entangle::{run_entanglement_generation, samples_in_bias_window, value_near_bias, EntangleSetup};
pub use hotbath::{half_rise_time, peak, run_hotbath, HotBathSetup};
pub use protect::{
    encoded_projector, info_process, loglog_slope, protection_sweep, recovery_unitary, run_error_protection,
    unencoded_baseline, verify_first_order_structure, FirstOrderReport, InfoProcess, ProtectionConfig,
    ProtectionReport, SweepPoint,
};
pub use symmetric::{
    ground_resonances, run_ghz_attempt, run_symmetric, run_w_generation, sector_eigenstate, GhzReport, GhzSetup,
    SymmetricSweep,
};
