//! Hamiltonians, noise operators and bias schedules.

mod bias;
mod hamiltonians;
mod noise;
pub mod states;
mod vertical;

pub use bias::{bias_eval, BiasSchedule, RampShape};
pub use hamiltonians::{
    build_h1, build_h2, build_h2_sym, build_h3, build_h3_sym, build_h_ec, build_hn_full, build_hn_sym,
    h2_family, h2_singlet_energy, h3_family, h_ec_family, hn_full_family, hn_sym_family, AffineFamily, WellParams,
};
pub use noise::{
    identity_channel, left_projector_channel, rescale, sigma_x_channel, sigma_z_channel, ErrorOperator,
    NoiseChannel,
};
pub use vertical::VerticalLevels;
