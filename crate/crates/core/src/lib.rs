//! Single-excitation qubit-chain simulations: SSH, Rice–Mele, trimer
//! Rice–Mele and Aubry–André–Harper chains, their edge states, adiabatic
//! edge-state pumping, the two-level Landau–Zener reduction, frequency
//! modulation couplings and the charge-basis model of a gap-tunable flux
//! qubit.
//!
//! Units throughout: ħ = 1 and the inter-cell coupling `b = 1` sets the
//! energy scale, so times are measured in `1/b`. Sites are 0-based in the
//! API and 1-based in exported files.

pub mod couplings;
pub mod dynamics;
pub mod effective;
mod error;
pub mod export;
pub mod fluxcircuit;
pub mod linalg;
pub mod models;
pub mod spectra;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;

pub use dynamics::{
    evolve, pump, quench, sigma_z, transfer_fidelity, IntegratorConfig, Method, StateVector,
    Trajectory,
};
pub use models::{
    apply_disorder, build_aah, build_rice_mele, build_ssh, build_trimer, sample_schedule,
    ChainHamiltonian, DisorderSpec, DisorderTarget, ModelKind, Param, Schedule, ScheduleConfig,
    Term, TermForm,
};
pub use spectra::{
    analytic_edge_states, edge_weight, eigendecompose, instantaneous_spectrum,
    localization_length, trimer_edge_states, EdgeStatePair, Spectrum, SpectrumTrace,
    TrimerEdgeStates,
};
