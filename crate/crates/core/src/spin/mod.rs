//! NV ground-state spin in the body frame: effective Hamiltonian, density
//! matrix, dissipative evolution and closed-form steady state.

pub mod hamiltonian;
pub mod master;
pub mod state;
pub mod steady;

pub use hamiltonian::{build_hamiltonian, spin1_operators, SpinHamiltonian};
pub use master::{
    bloch_generator, evolve_master, evolve_to_steady, Levels, MasterOptions, Rates, SpinTrajectory,
};
pub use state::{SpinState, TwoLevelView};
pub use steady::{adiabatic_coherence, saturation_parameter, steady_state_analytic, SteadyState};
