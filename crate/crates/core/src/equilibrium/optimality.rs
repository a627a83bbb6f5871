use super::perturbation::PerturbationStructure;
use crate::error::{Error, Result};
use crate::game::ObjectiveGame;
use crate::subjective::{Belief, PlayerModel, SubjectiveModel};

fn check_indices(pm: &PlayerModel<'_>, s: usize, x: Option<usize>) -> Result<()> {
    if s >= pm.n_signals() || x.is_some_and(|x| x >= pm.n_actions()) {
        return Err(Error::InvalidProfile(format!("signal {s} / action {x:?} out of range")));
    }
    Ok(())
}

/// Expected payoff of action `x` after signal `s` under the belief's predictive.
pub fn belief_expected_payoff(
    game: &ObjectiveGame,
    model: &SubjectiveModel,
    belief: &Belief,
    s: usize,
    x: usize,
    player: usize,
) -> Result<f64> {
    let pm = PlayerModel::new(game, model, player)?;
    check_indices(&pm, s, Some(x))?;
    Ok(pm.payoff_table(belief)?[s][x])
}

/// Actions within `tie_tol` of the best, in label order.
pub fn best_responses(payoffs: &[f64], tie_tol: f64) -> Vec<usize> {
    let best = payoffs.iter().fold(f64::NEG_INFINITY, |m, v| m.max(*v));
    (0..payoffs.len()).filter(|&x| payoffs[x] >= best - tie_tol).collect()
}

pub fn best_response_actions(
    game: &ObjectiveGame,
    model: &SubjectiveModel,
    belief: &Belief,
    s: usize,
    player: usize,
    tie_tol: f64,
) -> Result<Vec<usize>> {
    let pm = PlayerModel::new(game, model, player)?;
    check_indices(&pm, s, None)?;
    Ok(best_responses(&pm.payoff_table(belief)?[s], tie_tol))
}

/// Probability of each action being optimal in the perturbed game.
pub fn perturbed_strategy(
    game: &ObjectiveGame,
    model: &SubjectiveModel,
    belief: &Belief,
    perturbation: &PerturbationStructure,
    s: usize,
    player: usize,
    n_mc: usize,
) -> Result<Vec<f64>> {
    perturbation.check()?;
    let pm = PlayerModel::new(game, model, player)?;
    check_indices(&pm, s, None)?;
    Ok(perturbation.choice_probabilities(&pm.payoff_table(belief)?[s], n_mc))
}
