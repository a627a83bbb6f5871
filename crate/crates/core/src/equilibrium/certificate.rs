use serde::{Deserialize, Serialize};

use crate::game::StrategyProfile;
use crate::subjective::Belief;

/// Evidence that a strategy profile is a Berk-Nash equilibrium (of the perturbed game when
/// `scale > 0`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumCertificate {
    pub strategy: StrategyProfile,
    pub scale: f64,
    pub players: Vec<PlayerSupport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlayerSupport {
    pub player: String,
    /// Supporting belief, with atoms in the minimizer set.
    pub belief: Belief,
    pub minimum_k: f64,
    /// K of each atom minus the minimum.
    pub atom_k_gaps: Vec<f64>,
    /// Minimizers looked like a continuum rather than isolated points.
    pub segment: bool,
    /// Payoff of each supported action minus the best payoff, under the belief.
    pub optimality_gaps: Vec<OptimalityGap>,
    /// Largest |σ − perturbed response| (perturbed games only).
    pub strategy_residual: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimalityGap {
    pub signal: usize,
    pub action: usize,
    pub gap: f64,
}

/// Why a profile failed verification: the smallest violation the belief search found.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Rejection {
    pub player: String,
    pub signal: usize,
    pub action: usize,
    pub violation: f64,
    pub minimizer_clusters: usize,
    /// The minimizers looked like a continuum, so supporting beliefs outside the cluster
    /// representatives were not searched.
    pub segment: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    Accepted(EquilibriumCertificate),
    Rejected(Rejection),
}

impl Verdict {
    pub fn certificate(self) -> Option<EquilibriumCertificate> {
        match self {
            Self::Accepted(c) => Some(c),
            Self::Rejected(_) => None,
        }
    }

    pub fn is_accepted(&self) -> bool {
        matches!(self, Self::Accepted(_))
    }
}
