//! Subjective models, the weighted Kullback-Leibler divergence and its minimizers.

mod belief;
mod diagnose;
mod domain;
mod minimize;
mod model;
mod trading;
mod wkld;

pub use belief::Belief;
pub use diagnose::{diagnose, SpecificationReport};
pub use domain::ParameterDomain;
pub use minimize::{minimize, minimize_from, minimizer_set, MinimizerConfig, MinimizerSet};
pub use model::{
    CategoricalKernel, CategoricalModel, GaussianCell, GaussianMeanModel, PlayerModel, Predictive, SubjectiveModel,
};
pub use trading::{TradingFeedback, TradingKernel};
pub use wkld::{wkld, Quadratic, Wkld};

use crate::error::Result;
use crate::game::ObjectiveGame;

/// Mixture predictive of a belief (`Q̄_μ` for categorical models, mean moments otherwise).
pub fn predictive(game: &ObjectiveGame, model: &SubjectiveModel, belief: &Belief, player: usize) -> Result<Predictive> {
    PlayerModel::new(game, model, player)?.predictive(belief)
}
