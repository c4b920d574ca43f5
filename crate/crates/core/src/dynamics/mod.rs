//! Fixed-step integration of closed, dissipative and hot-bath dynamics.

mod grid;
mod hamiltonian;
mod hotbath;
mod master;
mod pure;
mod track;
mod trajectory;

pub use grid::{check_dt, default_dt, TimeGrid, DT_FRACTION, DT_LIMIT, DT_WARN};
pub use hamiltonian::{ConstantHamiltonian, DrivenHamiltonian, Hamiltonian};
pub use hotbath::{integrate_hotbath, rhs_hotbath, sector_configs, HotBathProblem, SectorState, VerticalTopology};
pub use master::{evolve_observed, integrate, integrate_final, rhs_master, EvolutionProblem, TRACE_ABORT};
pub use pure::integrate_pure;
pub use track::{adiabatic_track, TrackedLevel, DEGENERACY_GAP};
pub use trajectory::Trajectory;
