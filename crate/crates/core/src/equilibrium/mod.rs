//! Optimality given beliefs, perturbed responses, equilibrium verification and solving.

mod certificate;
mod cross_check;
mod optimality;
mod perturbation;
mod solve;
mod verify;

pub use certificate::{EquilibriumCertificate, OptimalityGap, PlayerSupport, Rejection, Verdict};
pub use cross_check::{cross_check, AnalogyStructure, CheckMode, CrossCheckLine, CrossCheckReport, NatureSplit};
pub use optimality::{belief_expected_payoff, best_response_actions, best_responses, perturbed_strategy};
pub use perturbation::{argmax, PerturbationFamily, PerturbationStructure};
pub use solve::{perturbed_equilibrium, solve, HomotopyStep, HomotopyTrace, SolveOutcome};
pub use verify::{verify_berk_nash, EquilibriumConfig};
