//! Bayesian learning in repeated play: posterior updates, policies, simulation and
//! stability of candidate equilibria.

mod belief;
mod output;
mod policy;
mod prior;
mod simulate;
mod stability;

pub use belief::{bayes_update, conjugate_update, ConjugateNormalBelief, GridBelief, Observation};
pub use output::{read_jsonl, write_csv, write_jsonl};
pub use policy::{payoff_sensitivity, policy_action, predictive_distance, EpsilonSchedule, Policy};
pub use prior::{default_prior, MAX_PRIOR_ATOMS};
pub use simulate::{simulate, BeliefTrack, PlayerBelief, PlayerHistory, SimulationHistory, SimulationOptions};
pub use stability::{limit_check, seed_outcome, stability_report, summarize, LimitCheck, SeedOutcome, StabilityConfig, StabilityReport};
