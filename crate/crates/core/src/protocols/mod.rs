//! Decision-problem constructions built on the sign-eliminating maps.

pub mod excited;
pub mod sat;

pub use excited::{
    acceptance_operator, acceptance_operator_capped, antisym_projector, build_hc, direct_sum, first_register_weight, slater_witness, swap_registers,
    AcceptanceReport, EnergyVerdict, ExcitedEnergyProblem,
};
pub use sat::{
    decide_sat, reduce_qsat, Reduction, SatClass, SatDecision, SatInstance, Verdict,
    REDUCTION_P, SAT_ZERO_TOL,
};
